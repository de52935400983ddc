import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from susy_chain.core.chain import BacklundChain
from susy_chain.core.exceptions import ConfigError
from susy_chain.core.seeds import SeedSpec

CHECK_NAMES = ("riccati", "oracle", "scattering", "spectrum", "poles")
OUTPUT_FORMATS = ("csv", "json")


def _default_verify() -> dict[str, bool]:
    return {name: True for name in CHECK_NAMES}


@dataclass
class ChainConfig:
    """Описание одного запуска: затравки, сетка, проверки и вывод.

    JSON-документ:
        {"seeds": [{"family": "S", "kappa": 1.0, "shift": 0.0}, ...],
         "grid": {"x_min": -15, "x_max": 15, "samples": 2001},
         "verify": {"riccati": true, ...},
         "output": {"format": "csv", "path": "grid.csv"}}
    """

    seeds: list[SeedSpec]
    x_min: float = -15.0
    x_max: float = 15.0
    samples: int = 2001
    verify: dict[str, bool] = field(default_factory=_default_verify)
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ConfigError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ConfigError("grid requires x_min < x_max")
        if self.samples < 2:
            raise ConfigError("grid requires at least 2 samples")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"unknown output format '{self.output_format}'")
        unknown = set(self.verify) - set(CHECK_NAMES)
        if unknown:
            raise ConfigError(f"unknown checks: {', '.join(sorted(unknown))}")
        energies = [s.energy for s in self.seeds]
        if len(set(energies)) != len(energies):
            raise ConfigError("factorization energies must be distinct")

    @property
    def enabled_checks(self) -> list[str]:
        return [name for name in CHECK_NAMES if self.verify.get(name, False)]

    def build_chain(self) -> BacklundChain:
        try:
            return BacklundChain(self.seeds)
        except ValueError as e:
            raise ConfigError(str(e))

    @staticmethod
    def from_dict(data: dict) -> "ChainConfig":
        """Создаёт конфигурацию из словаря.

        Raises:
            ConfigError: Если документ невалиден.
        """
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        raw_seeds = data.get("seeds")
        if not isinstance(raw_seeds, list):
            raise ConfigError("'seeds' must be a list")
        try:
            seeds = [SeedSpec.from_dict(s) for s in raw_seeds]
        except (ValueError, AttributeError) as e:
            raise ConfigError(str(e))

        grid = data.get("grid", {})
        verify = data.get("verify", _default_verify())
        output = data.get("output", {})
        if not all(isinstance(d, dict) for d in (grid, verify, output)):
            raise ConfigError("'grid', 'verify' and 'output' must be objects")
        try:
            return ChainConfig(
                seeds=seeds,
                x_min=float(grid.get("x_min", -15.0)),
                x_max=float(grid.get("x_max", 15.0)),
                samples=int(grid.get("samples", 2001)),
                verify={str(k): bool(v) for k, v in verify.items()},
                output_format=str(output.get("format", "csv")).lower(),
                output_path=output.get("path"),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e))

    def to_dict(self) -> dict:
        return {
            "seeds": [SeedSpec.to_dict(s) for s in self.seeds],
            "grid": {"x_min": self.x_min, "x_max": self.x_max, "samples": self.samples},
            "verify": dict(self.verify),
            "output": {"format": self.output_format, "path": self.output_path},
        }

    @staticmethod
    def load(path: str | Path) -> "ChainConfig":
        path = Path(path)
        try:
            with path.open("r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file '{path}' not found")
        except (json.JSONDecodeError, OSError) as e:
            raise ConfigError(f"cannot read '{path}': {e}")
        return ChainConfig.from_dict(data)

    @staticmethod
    def default() -> "ChainConfig":
        """Регулярная двухъямная цепочка S(κ=1) + R(κ=0.5) на [-15, 15]."""
        return ChainConfig(seeds=[SeedSpec("S", 1.0, 0.0), SeedSpec("R", 0.5, 0.0)])
