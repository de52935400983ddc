"""Замкнутые формулы-оракулы и структурный анализ потенциалов цепочки."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.signal import find_peaks

from susy_chain.core.chain import BacklundChain, GridSample, Pole, PoleKind
from susy_chain.core.exceptions import DenominatorZero, SingularPoint
from susy_chain.core.seeds import SeedFamily, SeedSpec, get_family
from susy_chain.infra.settings import SettingsLoader

# Dense evaluation flags a point when |V|·Δx² exceeds this.
_DENSE_THRESHOLD = 0.1


@dataclass(frozen=True)
class TwoWellParams:
    """Параметры двухъямного потенциала второго порядка.

    Центр сингулярной затравки x = -b, центр регулярной x = a.
    """

    kappa1: float
    kappa2: float
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self) -> None:
        for name in ("kappa1", "kappa2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number.")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("Centers must be finite numbers.")

    def chain_seeds(self) -> list[SeedSpec]:
        """Затравки S(κ₁, -b) и R(κ₂, -a), воспроизводящие ту же V₂."""
        return [
            SeedSpec(SeedFamily.S, self.kappa1, -self.b),
            SeedSpec(SeedFamily.R, self.kappa2, -self.a),
        ]

    @staticmethod
    def from_seeds(seeds) -> "TwoWellParams | None":
        if len(seeds) != 2 or not all(isinstance(s, SeedSpec) for s in seeds):
            return None
        first, second = seeds
        if first.family is not SeedFamily.S or second.family is not SeedFamily.R:
            return None
        return TwoWellParams(first.kappa, second.kappa, -second.shift, -first.shift)


def _reduced_denominator(p: TwoWellParams, x: np.ndarray) -> np.ndarray:
    # denominator times tanh(κ₁(x+b)): bounded, with the same zeros
    return -p.kappa1 + p.kappa2 * np.tanh(p.kappa2 * (x - p.a)) * np.tanh(
        p.kappa1 * (x + p.b)
    )


def v2_profile(p: TwoWellParams, xs) -> tuple[np.ndarray, np.ndarray]:
    """Векторизованный двухъямный потенциал второго порядка.

    V₂ = -(κ₁² - κ₂²)(κ₁² csch²s + κ₂² sech²t) / (-κ₁ coth s + κ₂ tanh t)²,
    s = κ₁(x + b), t = κ₂(x - a). При |s| < 1 числитель и знаменатель
    домножаются на sinh²s: это точное продолжение через x = -b, где полюса
    csch² и coth сокращаются.

    Args:
        p (TwoWellParams): Параметры κ₁, κ₂, a, b.
        xs: Точки оси.

    Returns:
        tuple[np.ndarray, np.ndarray]: (values, singular); NaN в нулях
            знаменателя.
    """
    x = np.atleast_1d(np.asarray(xs, dtype=float))
    k1, k2 = p.kappa1, p.kappa2
    if k1 == k2:
        return np.zeros_like(x), np.zeros(x.shape, dtype=bool)

    guard = SettingsLoader().denom_guard
    with np.errstate(all="ignore"):
        s = k1 * (x + p.b)
        t = k2 * (x - p.a)
        sech2 = 1.0 / np.cosh(t) ** 2
        tanh_t = np.tanh(t)
        prefactor = -(k1 * k1 - k2 * k2)

        far = prefactor * (k1 * k1 / np.sinh(s) ** 2 + k2 * k2 * sech2) / (
            -k1 / np.tanh(s) + k2 * tanh_t
        ) ** 2

        sh = np.sinh(s)
        near = prefactor * (k1 * k1 + k2 * k2 * sech2 * sh * sh) / (
            -k1 * np.cosh(s) + k2 * tanh_t * sh
        ) ** 2

        values = np.where(np.abs(s) < 1.0, near, far)
        reduced = _reduced_denominator(p, x)
    singular = (np.abs(reduced) <= guard * max(1.0, k1 + k2)) | ~np.isfinite(values)
    return np.where(singular, np.nan, values), singular


def v2_closed_form(p: TwoWellParams, x: float) -> float:
    """Значение двухъямного V₂ в точке; для κ₁ == κ₂ ровно 0.

    Raises:
        DenominatorZero: Если знаменатель обращается в ноль.
    """
    if p.kappa1 == p.kappa2:
        return 0.0
    values, singular = v2_profile(p, [x])
    if singular[0]:
        raise DenominatorZero(x, level=2)
    return float(values[0])


def v2_poles(
    p: TwoWellParams, x_min: float, x_max: float, samples: int = 20001
) -> list[float]:
    """Нули знаменателя двухъямного V₂ в окне, уточнённые бисекцией."""
    if p.kappa1 == p.kappa2:
        return []
    tol = float(SettingsLoader().get("bisection_tol", 1e-12))
    grid = np.linspace(x_min, x_max, samples)
    d = _reduced_denominator(p, grid)

    def reduced(t: float) -> float:
        return float(_reduced_denominator(p, np.array([t]))[0])

    roots = [float(x) for x in grid[d == 0.0]]
    for i in np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0):
        roots.append(float(bisect(reduced, grid[i], grid[i + 1], xtol=tol)))
    return sorted(roots)


def sample_v2(p: TwoWellParams, x_min: float, x_max: float, m: int) -> GridSample:
    """Выборка замкнутой формы в том же контейнере, что и у цепочки."""
    if not x_min < x_max or int(m) < 2:
        raise ValueError("Grid requires x_min < x_max and at least 2 samples.")
    x = np.linspace(x_min, x_max, int(m))
    values, singular = v2_profile(p, x)
    roots = v2_poles(p, x_min, x_max)
    for root in roots:
        singular[int(np.argmin(np.abs(x - root)))] = True
    values = np.where(singular, np.nan, values)
    kinds = np.where(
        singular, PoleKind.DENOMINATOR_ZERO.value, PoleKind.NONE.value
    ).astype(object)
    cancelled = [-p.b] if p.kappa1 != p.kappa2 and x_min <= -p.b <= x_max else []
    return GridSample(
        x=x,
        v=values,
        is_singular=singular,
        pole_kind=kinds,
        poles=[Pole(c, PoleKind.DENOMINATOR_ZERO, 2) for c in roots],
        cancelled=cancelled,
        energies=[-0.5 * p.kappa1**2, -0.5 * p.kappa2**2],
        seeds=[SeedSpec.to_dict(s) for s in p.chain_seeds()],
    )


def _v1_values(family: SeedFamily, kappa: float, shift: float, x: np.ndarray):
    with np.errstate(all="ignore"):
        match family:
            case SeedFamily.R:
                return -(kappa**2) / np.cosh(kappa * (x + shift)) ** 2
            case SeedFamily.S:
                return kappa**2 / np.sinh(kappa * (x - shift)) ** 2
            case SeedFamily.P:
                return kappa**2 / np.sin(kappa * (x - shift)) ** 2
            case _:
                return 1.0 / (x - shift) ** 2


def v1_profile(family: str | SeedFamily, kappa: float, shift: float, xs) -> np.ndarray:
    """Партнёры первого порядка по замкнутым формулам; NaN у полюсов."""
    fam = get_family(family)
    x = np.atleast_1d(np.asarray(xs, dtype=float))
    spec = SeedSpec(fam, 0.0 if fam is SeedFamily.N else kappa, shift)
    _, _, singular = spec.evaluate(x)
    return np.where(singular, np.nan, _v1_values(fam, spec.kappa, shift, x))


def v1_closed_forms(
    family: str | SeedFamily, kappa: float, shift: float, x: float
) -> float:
    """V₁ по замкнутой формуле семейства.

    R: -κ² sech²[κ(x+b)], S: κ² csch²[κ(x-a)], P: k² csc²[k(x-a)],
    N: (x-a)⁻².

    Raises:
        SingularPoint: В окрестности полюса семейства.
    """
    value = v1_profile(family, kappa, shift, [x])[0]
    if not np.isfinite(value):
        raise SingularPoint(x, level=1, pole_kind="seed_pole")
    return float(value)


@dataclass(frozen=True)
class Well:
    location: float
    depth: float
    index: int


def well_census(
    sample: GridSample,
    separation: int | None = None,
    prominence: float | None = None,
) -> list[Well]:
    """Находит локальные минимумы (ямы) выборки потенциала.

    Минимумы ищутся как пики -V (scipy.signal.find_peaks) с выраженностью
    не ниже prominence·max|V|; из минимумов ближе separation шагов остаётся
    более глубокий. Положение и глубина уточняются параболой по трём точкам.
    Особые узлы считаются барьерами.

    Args:
        sample (GridSample): Выборка потенциала.
        separation (int | None): Минимальное расстояние в шагах сетки.
        prominence (float | None): Относительный порог выраженности.

    Returns:
        list[Well]: Ямы в порядке возрастания x.
    """
    settings = SettingsLoader()
    w = int(settings.get("census_separation", 10) if separation is None else separation)
    rel = float(
        settings.get("census_prominence", 1e-8) if prominence is None else prominence
    )
    v = np.asarray(sample.v, dtype=float)
    x = np.asarray(sample.x, dtype=float)
    finite = np.isfinite(v)
    if np.count_nonzero(finite) < 3:
        return []
    scale = float(np.max(np.abs(v[finite])))
    if scale == 0.0:
        return []
    barrier = float(np.min(-v[finite])) - scale
    peaks, _ = find_peaks(
        np.where(finite, -v, barrier), distance=max(w, 1), prominence=rel * scale
    )

    h = sample.step
    found: list[Well] = []
    for i in peaks:
        left, mid, right = v[i - 1], v[i], v[i + 1]
        curvature = right - 2.0 * mid + left
        if np.isfinite(left) and np.isfinite(right) and curvature > 0.0:
            location = x[i] - 0.5 * h * (right - left) / curvature
            depth = mid - (right - left) ** 2 / (8.0 * curvature)
        else:
            location, depth = x[i], mid
        found.append(Well(float(location), float(depth), int(i)))
    return found


def lattice_survivors(
    sample: GridSample, spec: SeedSpec, tol: float = 1e-6
) -> list[float]:
    """Точки решётки полюсов затравки, оставшиеся настоящими полюсами V_n."""
    lattice = spec.poles(float(sample.x[0]), float(sample.x[-1]))
    locations = [p.location for p in sample.poles]
    return [c for c in lattice if any(abs(c - loc) <= tol for loc in locations)]


def dense_pole_count(
    chain: BacklundChain, x_min: float, x_max: float, m: int = 100_000
) -> int:
    """Независимый подсчёт полюсов прямым плотным вычислением V_n.

    Точка помечается, если |V_n|·Δx² > 0.1; нечисловое значение считается
    только рядом с такой точкой (изолированные NaN лежат на устранимых
    особенностях). Результат равен числу связных групп помеченных точек.
    """
    x = np.linspace(x_min, x_max, int(m))
    dx = x[1] - x[0]
    v = chain.level_potential(chain.n)(x)
    finite = np.isfinite(v)
    big = np.zeros(x.shape, dtype=bool)
    big[finite] = np.abs(v[finite]) * dx * dx > _DENSE_THRESHOLD

    neighbour = np.zeros_like(big)
    neighbour[1:] |= big[:-1]
    neighbour[:-1] |= big[1:]
    flagged = big | (~finite & neighbour)

    starts = flagged[1:] & ~flagged[:-1]
    return int(np.count_nonzero(starts)) + int(flagged[0])
