import os
import tomllib
from pathlib import Path
from typing import Any


class SettingsLoader:
    """
    Singleton для управления числовыми допусками и путями приложения.

    Реализован через __new__, как и загрузчик настроек в остальных слоях:
    - Не требует метакласса
    - Явный контроль создания экземпляра в одном месте

    Attributes:
        _instance (SettingsLoader | None): Единственный экземпляр класса.
        _initialized (bool): Флаг инициализации для предотвращения повторной загрузки.
        _config (dict[str, Any]): Словарь с настройками приложения.
    """

    _instance: "SettingsLoader | None" = None
    _initialized: bool = False

    def __new__(cls) -> "SettingsLoader":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if self._initialized:
            return

        self._config: dict[str, Any] = {}
        self._load_config()
        self._initialized = True

    def _load_config(self) -> None:
        project_root = Path(__file__).parent.parent.parent
        pyproject_path = project_root / "pyproject.toml"

        defaults: dict[str, Any] = {
            "pole_guard": 1e-8,
            "denom_guard": 1e-10,
            "removable_radius": 2e-3,
            "pole_strength": 0.25,
            "bisection_tol": 1e-12,
            "box_left": -40.0,
            "box_right": 40.0,
            "numerov_step": 1e-3,
            "bound_step": 2e-3,
            "energy_tol": 1e-8,
            "asymptote_tol": 1e-10,
            "transparency_threshold": 1e-4,
            "flux_tol": 1e-6,
            "spectrum_tol": 1e-5,
            "riccati_tol": 1e-9,
            "riccati_margin": 1.5,
            "fd_step": 1e-5,
            "oracle_tol": 1e-9,
            "census_separation": 10,
            "census_prominence": 1e-8,
            "threads": 0,
            "logs_dir": str(project_root / "logs"),
            "log_file": "actions.log",
            "log_level": "INFO",
            "log_max_bytes": 10 * 1024 * 1024,
            "log_backups": 5,
            "output_dir": str(project_root / "output"),
        }

        if pyproject_path.exists():
            try:
                with open(pyproject_path, "rb") as f:
                    pyproject_data = tomllib.load(f)
                    tool_config = pyproject_data.get("tool", {}).get("susy_chain", {})
                    defaults.update(tool_config)
            except Exception:
                pass

        # relative directories are anchored at the project root, not the CWD
        for key in ("logs_dir", "output_dir"):
            path = Path(defaults[key]).expanduser()
            defaults[key] = str(path if path.is_absolute() else project_root / path)

        threads_env = os.getenv("SUSY_CHAIN_THREADS")
        if threads_env is not None and threads_env.strip():
            try:
                defaults["threads"] = int(threads_env)
            except ValueError:
                pass

        self._config = defaults

    def get(self, key: str, default: Any = None) -> Any:
        """Получает значение конфигурации по ключу.

        Args:
            key (str): Ключ настройки.
            default (Any): Значение по умолчанию.

        Returns:
            Any: Значение настройки.
        """
        return self._config.get(key, default)

    def reload(self) -> None:
        """Перезагружает конфигурацию из файла и окружения."""
        self._config = {}
        self._load_config()

    @property
    def pole_guard(self) -> float:
        return float(self.get("pole_guard", 1e-8))

    @property
    def denom_guard(self) -> float:
        return float(self.get("denom_guard", 1e-10))

    @property
    def box(self) -> tuple[float, float]:
        return float(self.get("box_left", -40.0)), float(self.get("box_right", 40.0))

    @property
    def threads(self) -> int:
        """Число рабочих потоков; 0 означает os.cpu_count()."""
        requested = int(self.get("threads", 0))
        if requested <= 0:
            return os.cpu_count() or 1
        return requested

    def __repr__(self) -> str:
        return f"<SettingsLoader(config_keys={list(self._config.keys())})>"
