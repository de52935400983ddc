import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, TypeVar

T = TypeVar("T")


def load_json(path, default: Callable[[], T] = dict) -> T:
    """Загружает JSON-данные из файла.

    Args:
        path: Путь к файлу.
        default (Callable): Функция, возвращающая значение по умолчанию.

    Returns:
        T: Загруженные данные или значение по умолчанию.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except (FileNotFoundError, json.JSONDecodeError, OSError):
        return default()


def atomic_write_text(path, text: str) -> Path:
    """Записывает текст через временный файл в том же каталоге и os.replace.

    Args:
        path: Путь к итоговому файлу.
        text (str): Содержимое.

    Returns:
        Path: Путь к записанному файлу.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        dir=path.parent, prefix=f".{path.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return path


def save_json(path, data) -> Path:
    """Сохраняет данные в JSON-файл атомарно.

    Args:
        path: Путь к файлу.
        data: Данные для сохранения.
    """
    return atomic_write_text(path, json.dumps(data, indent=4, ensure_ascii=False))


def format_float(value: float) -> str:
    """Кратчайшая десятичная запись, однозначно восстанавливающая число."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def json_float(value: float) -> float | None:
    """Число для JSON: None вместо NaN и бесконечностей."""
    value = float(value)
    return value if math.isfinite(value) else None


def utc_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")
