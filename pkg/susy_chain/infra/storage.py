import csv
import io
from pathlib import Path

import numpy as np

from susy_chain.core.chain import GridSample, Pole, PoleKind
from susy_chain.core.utils import (
    atomic_write_text,
    format_float,
    json_float,
    load_json,
    save_json,
)
from susy_chain.infra.settings import SettingsLoader
from susy_chain.logging_config import get_logger

CSV_HEADER = ["x", "V_n", "is_singular", "pole_kind"]


def grid_to_csv(sample: GridSample) -> str:
    """Сериализует выборку в CSV `x,V_n,is_singular,pole_kind`."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for x, v, singular, kind in zip(
        sample.x, sample.v, sample.is_singular, sample.pole_kind
    ):
        writer.writerow(
            [
                format_float(x),
                format_float(v),
                "true" if singular else "false",
                str(kind),
            ]
        )
    return buffer.getvalue()


def grid_from_csv(text: str) -> GridSample:
    """Читает CSV, записанный grid_to_csv, без потери точности.

    Raises:
        ValueError: Если заголовок не совпадает с ожидаемым.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValueError(f"Unexpected grid header: {header}")
    xs, vs, flags, kinds = [], [], [], []
    for row in reader:
        if not row:
            continue
        xs.append(float(row[0]))
        vs.append(float(row[1]))
        flags.append(row[2] == "true")
        kinds.append(row[3])
    return GridSample(
        x=np.array(xs),
        v=np.array(vs),
        is_singular=np.array(flags, dtype=bool),
        pole_kind=np.array(kinds, dtype=object),
    )


def sidecar_document(sample: GridSample, wells: list | None = None) -> dict:
    """Сопроводительный JSON: затравки, энергии, полюса и ямы."""
    return {
        "seeds": sample.seeds,
        "energies": [float(e) for e in sample.energies],
        "poles": [
            {"location": p.location, "kind": str(p.kind), "level": p.level}
            for p in sample.poles
        ],
        "cancelled": [float(c) for c in sample.cancelled],
        "wells": [
            {"location": w.location, "depth": w.depth} for w in (wells or [])
        ],
    }


def grid_document(sample: GridSample, wells: list | None = None) -> dict:
    """Единый JSON-документ выборки (формат json команды generate)."""
    document = sidecar_document(sample, wells)
    document["grid"] = {
        "x": [float(x) for x in sample.x],
        "V_n": [json_float(v) for v in sample.v],
        "is_singular": [bool(s) for s in sample.is_singular],
        "pole_kind": [str(k) for k in sample.pole_kind],
    }
    return document


class ArtifactStorage:
    """Атомарная запись артефактов (CSV-сетки, JSON-отчёты) в каталог вывода.

    Attributes:
        output_dir (Path): Каталог для относительных путей.
    """

    def __init__(self, output_dir: str | Path | None = None):
        base = SettingsLoader().get("output_dir", "output")
        self.output_dir = Path(output_dir if output_dir is not None else base)
        self.logger = get_logger()

    def _resolve(self, path: str | Path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.output_dir / path

    def save_grid_csv(self, sample: GridSample, path: str | Path) -> Path:
        target = atomic_write_text(self._resolve(path), grid_to_csv(sample))
        self.logger.info(f"Grid saved: {target} ({len(sample.x)} points)")
        return target

    def load_grid_csv(self, path: str | Path) -> GridSample:
        with self._resolve(path).open("r", encoding="utf-8", newline="") as f:
            return grid_from_csv(f.read())

    def save_json(self, data: dict, path: str | Path) -> Path:
        target = save_json(self._resolve(path), data)
        self.logger.info(f"JSON saved: {target}")
        return target

    def load_json(self, path: str | Path) -> dict:
        return load_json(self._resolve(path), default=dict)

    @staticmethod
    def sidecar_path(path: str | Path) -> Path:
        return Path(path).with_suffix(".json")

    @staticmethod
    def poles_from_document(document: dict) -> list[Pole]:
        return [
            Pole(float(p["location"]), PoleKind(p["kind"]), int(p["level"]))
            for p in document.get("poles", [])
        ]
