import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from susy_chain.core.analysis import (
    TwoWellParams,
    dense_pole_count,
    v1_profile,
    v2_profile,
)
from susy_chain.core.chain import BacklundChain, count_poles, eval_grid
from susy_chain.core.exceptions import AsymptoteNotReached, SingularPotential
from susy_chain.core.quantum import bound_states, scattering
from susy_chain.core.seeds import SeedFamily, SeedSpec
from susy_chain.core.utils import json_float
from susy_chain.infra.chain_config import ChainConfig
from susy_chain.infra.settings import SettingsLoader

SWEEP_KAPPAS = (0.5, 1.0, 2.0)
SWEEP_SHIFTS = (-3.0, 0.0, 5.0)
SWEEP_WINDOW = (-10.0, 10.0, 2001)
SCATTERING_ENERGIES = tuple(float(e) for e in np.geomspace(0.05, 5.0, 5))


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    threshold: float
    passed: bool
    status: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": json_float(self.max_residual),
            "threshold": json_float(self.threshold),
            "pass": self.passed,
            "status": self.status,
            "detail": self.detail,
        }


def _away_from(xs: np.ndarray, locations: list[float], margin: float) -> np.ndarray:
    mask = np.ones(xs.shape, dtype=bool)
    for c in locations:
        mask &= np.abs(xs - c) >= margin
    return mask


def _candidate_locations(
    chain: BacklundChain, config: ChainConfig, margin: float
) -> list[float]:
    # poles just outside the window still spoil stencils at its edges
    step = (config.x_max - config.x_min) / (config.samples - 1)
    pad = int(math.ceil(margin / step))
    padded = config.x_min + step * np.arange(-pad, config.samples + pad)
    return [p.location for p in chain.candidates(padded)]


def _regular_free_chain(chain: BacklundChain) -> bool:
    return all(
        isinstance(s, SeedSpec) and s.family in (SeedFamily.S, SeedFamily.R)
        for s in chain.seeds
    )


class BaseCheck(ABC):
    """Базовый класс численной проверки цепочки."""

    name: str = "check"

    @abstractmethod
    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        """Выполняет проверку.

        Returns:
            CheckResult: Максимальная невязка, порог и статус.
        """
        pass

    def _verdict(
        self, residual: float, threshold: float, detail: str = ""
    ) -> CheckResult:
        passed = bool(np.isfinite(residual) and residual <= threshold)
        return CheckResult(
            self.name,
            float(residual),
            float(threshold),
            passed,
            "passed" if passed else "failed",
            detail,
        )

    def _skipped(self, reason: str) -> CheckResult:
        nan = float("nan")
        return CheckResult(self.name, nan, nan, True, "skipped", reason)

    def _failed(self, threshold: float, reason: str) -> CheckResult:
        return CheckResult(
            self.name, float("inf"), float(threshold), False, "failed", reason
        )


class RiccatiCheck(BaseCheck):
    """Невязка уравнения Риккати с производной по центральной разности.

    Проверяются все уровни цепочки и таблица семейств затравок.
    """

    name = "riccati"

    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        settings = SettingsLoader()
        tol = float(settings.get("riccati_tol", 1e-9))
        margin = float(settings.get("riccati_margin", 1.5))
        h = float(settings.get("fd_step", 1e-5))

        width = margin / chain.kappa_max
        xs = np.linspace(config.x_min, config.x_max, config.samples)
        xs = xs[_away_from(xs, _candidate_locations(chain, config, width), width)]
        worst = 0.0
        for k, energy in enumerate(chain.energies, start=1):
            if xs.size == 0:
                break
            beta, _, v_prev = chain.level_betas(k, xs)
            plus = chain.level_betas(k, xs + h)[0]
            minus = chain.level_betas(k, xs - h)[0]
            fd = (plus - minus) / (2.0 * h)
            residual = np.abs(-fd + beta * beta - 2.0 * (v_prev - energy))
            worst = max(worst, float(np.max(residual)) / max(1.0, abs(energy)))

        worst = max(worst, family_sweep_residual(margin, h))
        return self._verdict(worst, tol, f"{len(xs)} chain points + family sweep")


def family_sweep_residual(margin: float = 1.5, h: float = 1e-5) -> float:
    """Максимальная нормированная невязка по всем семействам затравок."""
    x_min, x_max, m = SWEEP_WINDOW
    grid = np.linspace(x_min, x_max, m)
    worst = 0.0
    for family in SeedFamily:
        kappas = (0.0,) if family is SeedFamily.N else SWEEP_KAPPAS
        for kappa in kappas:
            for shift in SWEEP_SHIFTS:
                spec = SeedSpec(family, kappa, shift)
                width = margin if family is SeedFamily.N else margin / kappa
                x = grid[_away_from(grid, spec.poles(x_min - 1, x_max + 1), width)]
                if x.size == 0:
                    continue
                beta = spec.evaluate(x)[0]
                fd = (spec.evaluate(x + h)[0] - spec.evaluate(x - h)[0]) / (2.0 * h)
                residual = np.abs(-fd + beta * beta + 2.0 * spec.energy)
                worst = max(
                    worst, float(np.max(residual)) / max(1.0, abs(spec.energy))
                )
    return worst


class OracleCheck(BaseCheck):
    """Сравнение с замкнутыми формулами: двухъямный V₂ или V₁ семейства."""

    name = "oracle"

    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        settings = SettingsLoader()
        tol = float(settings.get("oracle_tol", 1e-9))
        margin = float(settings.get("riccati_margin", 1.5))
        xs = np.linspace(config.x_min, config.x_max, config.samples)

        params = TwoWellParams.from_seeds(chain.seeds)
        if params is not None:
            reference, _ = v2_profile(params, xs)
            scale = params.kappa1**2
            label = "two-well closed form"
        elif chain.n == 1 and isinstance(chain.seeds[0], SeedSpec):
            seed = chain.seeds[0]
            reference = v1_profile(seed.family, seed.kappa, seed.shift, xs)
            scale = max(1.0, seed.kappa**2)
            label = f"first-order {seed.family.value} closed form"
        else:
            return self._skipped("no closed form for this seed sequence")

        values = chain(xs)
        width = margin / chain.kappa_max
        keep = _away_from(xs, _candidate_locations(chain, config, width), width)
        keep &= np.isfinite(values) & np.isfinite(reference)
        if not np.any(keep):
            return self._failed(tol, "no mutually regular points")
        diff = np.abs(values[keep] - reference[keep])
        weight = scale * np.maximum(1.0, np.abs(reference[keep]))
        residual = float(np.max(diff / weight))
        return self._verdict(residual, tol, label)


class ScatteringCheck(BaseCheck):
    """Прозрачность: |R|² на пяти энергиях в [0.05, 5] и сохранение потока."""

    name = "scattering"

    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        settings = SettingsLoader()
        threshold = float(settings.get("transparency_threshold", 1e-4))
        flux_tol = float(settings.get("flux_tol", 1e-6))
        if not _regular_free_chain(chain):
            return self._skipped("periodic and null seeds have no scattering states")
        try:
            results = [scattering(chain, e) for e in SCATTERING_ENERGIES]
        except (SingularPotential, AsymptoteNotReached) as e:
            return self._failed(threshold, str(e))

        worst_flux = max(r.flux_error for r in results)
        if worst_flux > flux_tol:
            return self._failed(threshold, f"flux not conserved: {worst_flux:.3e}")
        residual = max(r.r_sq for r in results)
        return self._verdict(
            residual, threshold, f"max |R|^2, flux error {worst_flux:.1e}"
        )


class SpectrumCheck(BaseCheck):
    """Связанные состояния совпадают с энергиями факторизации."""

    name = "spectrum"

    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        tol = float(SettingsLoader().get("spectrum_tol", 1e-5))
        if not _regular_free_chain(chain):
            return self._skipped("spectrum is defined for S/R chains only")
        try:
            found = bound_states(chain)
        except SingularPotential as e:
            return self._failed(tol, str(e))

        expected = sorted(chain.energies)
        if len(found.energies) != len(expected):
            return self._failed(
                tol, f"found {len(found.energies)} levels, expected {len(expected)}"
            )
        residual = max(abs(a - b) for a, b in zip(found.energies, expected))
        return self._verdict(residual, tol, f"levels {found.energies}")


class PolesCheck(BaseCheck):
    """Число уточнённых полюсов против плотного прямого вычисления."""

    name = "poles"

    def run(self, chain: BacklundChain, config: ChainConfig) -> CheckResult:
        sample = eval_grid(chain, config.x_min, config.x_max, config.samples)
        refined, _ = count_poles(sample)
        dense = dense_pole_count(chain, config.x_min, config.x_max, 10 * config.samples)
        return self._verdict(
            float(abs(refined - dense)), 0.0, f"refined {refined}, dense {dense}"
        )


def default_checks() -> list[BaseCheck]:
    return [
        RiccatiCheck(),
        OracleCheck(),
        ScatteringCheck(),
        SpectrumCheck(),
        PolesCheck(),
    ]
