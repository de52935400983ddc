"""Численное уравнение Шрёдингера H = -½ d²/dx² + V.

Интегрирование Нумерова для ψ'' = 2(V - E)ψ, коэффициенты рассеяния и
связанные состояния методом стрельбы.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from susy_chain.core.chain import Pole
from susy_chain.core.exceptions import (
    AsymptoteNotReached,
    SingularPoint,
    SingularPotential,
)
from susy_chain.infra.settings import SettingsLoader
from susy_chain.logging_config import get_logger

# Shooting solutions are rescaled once they exceed this magnitude.
_RESCALE_LIMIT = 1e150


@runtime_checkable
class SupportsSample(Protocol):
    def sample(self, xs: np.ndarray): ...


@dataclass
class PotentialSample:
    x: np.ndarray
    v: np.ndarray
    poles: list[float] = field(default_factory=list)


class FunctionPotential:
    """Обёртка над векторизованной функцией V(x) (например, V = 0)."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], name: str = "V"):
        self._func = func
        self.name = name

    def sample(self, xs) -> PotentialSample:
        x = np.atleast_1d(np.asarray(xs, dtype=float))
        with np.errstate(all="ignore"):
            v = np.asarray(self._func(x), dtype=float) * np.ones_like(x)
        return PotentialSample(x, v, [float(p) for p in x[~np.isfinite(v)]])

    def __call__(self, xs) -> np.ndarray:
        return self.sample(xs).v

    def __repr__(self) -> str:
        return f"FunctionPotential({self.name})"


def as_potential(obj) -> SupportsSample:
    """Приводит цепочку или функцию к интерфейсу потенциала."""
    if isinstance(obj, SupportsSample):
        return obj
    if callable(obj):
        return FunctionPotential(obj)
    raise ValueError(f"Object {obj!r} is not a potential.")


def _sample(potential, xs: np.ndarray) -> tuple[np.ndarray, list[float]]:
    # chains resolve singularities on increasing grids only
    reverse = len(xs) > 1 and xs[0] > xs[-1]
    s = as_potential(potential).sample(xs[::-1] if reverse else xs)
    v = np.asarray(s.v, dtype=float)
    if reverse:
        v = v[::-1]
    poles = [p.location if isinstance(p, Pole) else float(p) for p in s.poles]
    lo, hi = float(np.min(xs)), float(np.max(xs))
    inside = [p for p in poles if lo <= p <= hi]
    inside += [float(p) for p in np.asarray(xs)[~np.isfinite(v)]]
    return v, sorted(set(inside))


def _grid(x0: float, x1: float, step: float) -> np.ndarray:
    if step <= 0 or not math.isfinite(step):
        raise ValueError("Integration step must be positive.")
    if x0 == x1:
        raise ValueError("Integration interval must not be empty.")
    count = max(2, int(round(abs(x1 - x0) / step)))
    return np.linspace(x0, x1, count + 1)


def _numerov(f: list, psi0, psi1, h2: float) -> list:
    psi = [psi0, psi1]
    c = h2 / 12.0
    w = [1.0 - c * fi for fi in f]
    for i in range(1, len(f) - 1):
        psi.append(
            (2.0 * psi[i] * (1.0 + 5.0 * c * f[i]) - w[i - 1] * psi[i - 1]) / w[i + 1]
        )
    return psi


def numerov_integrate(
    potential,
    energy: float,
    x0: float,
    x1: float,
    step: float,
    psi0: float,
    dpsi0: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Решает ψ'' = 2(V - E)ψ от x0 до x1 (допускается x1 < x0).

    Второе стартовое значение берётся из одного шага DOP853, дальше идёт
    трёхточечная схема Нумерова четвёртого порядка.

    Args:
        potential: Цепочка или функция V(x).
        energy (float): Энергия E.
        x0 (float): Начальная точка.
        x1 (float): Конечная точка.
        step (float): Шаг сетки.
        psi0 (float): ψ(x0).
        dpsi0 (float): ψ'(x0).

    Raises:
        SingularPoint: Если потенциал особый хотя бы в одном узле.

    Returns:
        tuple[np.ndarray, np.ndarray]: Узлы и значения ψ.
    """
    xs = _grid(x0, x1, step)
    v, poles = _sample(potential, xs)
    if poles:
        raise SingularPoint(poles[0], level=0, pole_kind="seed_pole")
    h = float(xs[1] - xs[0])

    def rhs(t: float, y: np.ndarray) -> list:
        vt, _ = _sample(potential, np.array([t]))
        return [y[1], 2.0 * (float(vt[0]) - energy) * y[0]]

    start = solve_ivp(
        rhs,
        (float(xs[0]), float(xs[1])),
        [psi0, dpsi0],
        method="DOP853",
        rtol=1e-13,
        atol=1e-15,
    )
    psi1 = float(start.y[0, -1])
    f = (2.0 * (v - energy)).tolist()
    return xs, np.asarray(_numerov(f, float(psi0), psi1, h * h))


@dataclass(frozen=True)
class ScatteringResult:
    energy: float
    t_sq: float
    r_sq: float
    match_window: tuple[float, float]

    @property
    def flux_error(self) -> float:
        return abs(self.t_sq + self.r_sq - 1.0)


def discrete_wavenumber(k: float, h: float) -> float:
    """Волновое число плоской волны схемы Нумерова при шаге h."""
    # cos(kh) = (1 - 5q/12)/(1 + q/12) written through the half angle
    q = (h * k) ** 2
    return 2.0 * math.asin(0.5 * abs(h) * k / math.sqrt(1.0 + q / 12.0)) / abs(h)


def scattering(
    potential,
    energy: float,
    box: tuple[float, float] | None = None,
    step: float | None = None,
) -> ScatteringResult:
    """Коэффициенты прохождения и отражения для волны, падающей слева.

    Справа задаётся уходящая волна e^{ikx}, решение интегрируется налево,
    и на левом краю раскладывается на A e^{ikx} + B e^{-ikx}:
    |T|² = 1/|A|², |R|² = |B|²/|A|².

    Args:
        potential: Цепочка или функция V(x).
        energy (float): Энергия E > 0.
        box (tuple[float, float] | None): Область интегрирования.
        step (float | None): Шаг сетки.

    Raises:
        ValueError: Если E <= 0.
        SingularPotential: Если внутри области есть полюса.
        AsymptoteNotReached: Если потенциал не затух на краях.

    Returns:
        ScatteringResult: |T|², |R|² и область согласования.
    """
    settings = SettingsLoader()
    if not energy > 0:
        raise ValueError("Scattering energy must be positive.")
    x_left, x_right = settings.box if box is None else box
    h_req = float(settings.get("numerov_step", 1e-3)) if step is None else step

    xs = _grid(x_right, x_left, h_req)
    v, poles = _sample(potential, xs)
    if poles:
        raise SingularPotential(poles)

    scale = float(np.max(np.abs(v)))
    tol = float(settings.get("asymptote_tol", 1e-10)) * scale
    edge = max(abs(float(v[0])), abs(float(v[-1])))
    if edge > tol:
        raise AsymptoteNotReached(x_left, x_right, edge, tol)

    h = float(xs[0] - xs[1])
    k = discrete_wavenumber(math.sqrt(2.0 * energy), h)
    psi = _numerov(
        (2.0 * (v - energy)).tolist(),
        complex(np.exp(1j * k * xs[0])),
        complex(np.exp(1j * k * xs[1])),
        h * h,
    )

    last = len(xs) - 1
    shift = max(1, min(last // 4, int(round(math.pi / (2.0 * k * h)))))
    xa, xb = float(xs[last]), float(xs[last - shift])
    matrix = np.array(
        [
            [np.exp(1j * k * xa), np.exp(-1j * k * xa)],
            [np.exp(1j * k * xb), np.exp(-1j * k * xb)],
        ]
    )
    amp_in, amp_back = np.linalg.solve(matrix, np.array([psi[last], psi[last - shift]]))
    norm = abs(amp_in) ** 2
    return ScatteringResult(
        energy=float(energy),
        t_sq=float(1.0 / norm),
        r_sq=float(abs(amp_back) ** 2 / norm),
        match_window=(float(x_left), float(x_right)),
    )


@dataclass(frozen=True)
class BoundStateResult:
    energies: list[float]
    node_counts: list[int]
    window: tuple[float, float] = (0.0, 0.0)

    def __len__(self) -> int:
        return len(self.energies)


def _shoot(f_base: list, energy: float, h: float) -> tuple[float, int]:
    # Dirichlet at the left edge: ψ₀ = 0, ψ₁ = h
    c = h * h / 12.0
    two_e = 2.0 * energy
    prev, cur = 0.0, h
    w_prev = 1.0 - c * (f_base[0] - two_e)
    w_cur = 1.0 - c * (f_base[1] - two_e)
    nodes = 0
    for i in range(1, len(f_base) - 1):
        fi = f_base[i] - two_e
        w_next = 1.0 - c * (f_base[i + 1] - two_e)
        nxt = (2.0 * cur * (1.0 + 5.0 * c * fi) - w_prev * prev) / w_next
        if nxt * cur < 0.0:
            nodes += 1
        prev, cur = cur, nxt
        w_prev, w_cur = w_cur, w_next
        if abs(cur) > _RESCALE_LIMIT:
            prev /= _RESCALE_LIMIT
            cur /= _RESCALE_LIMIT
    return cur, nodes


def _potential_profile(potential, box, step) -> tuple[list, float, np.ndarray]:
    xs = _grid(box[0], box[1], step)
    v, poles = _sample(potential, xs)
    if poles:
        raise SingularPotential(poles)
    return (2.0 * v).tolist(), float(xs[1] - xs[0]), v


def node_count(
    potential,
    energy: float,
    box: tuple[float, float] | None = None,
    step: float | None = None,
) -> int:
    """Число узлов решения задачи Дирихле слева при энергии E.

    По осцилляционной теореме Штурма совпадает с числом собственных
    значений ниже E.
    """
    settings = SettingsLoader()
    box = settings.box if box is None else box
    step = float(settings.get("bound_step", 2e-3)) if step is None else step
    f_base, h, _ = _potential_profile(potential, box, step)
    return _shoot(f_base, energy, h)[1]


def bound_states(
    potential,
    box: tuple[float, float] | None = None,
    search: tuple[float, float] | None = None,
    step: float | None = None,
) -> BoundStateResult:
    """Находит связанные состояния в окне энергий.

    Окно делится пополам по числу узлов, пока в каждом отрезке не останется
    ровно одно собственное значение; затем корень ψ(x_R; E) уточняется
    методом Брента.

    Args:
        potential: Цепочка или функция V(x), регулярная в области.
        box (tuple[float, float] | None): Область задачи Дирихле.
        search (tuple[float, float] | None): Окно энергий; по умолчанию
            (-κ_max², -1e-6) для цепочек и (min V, -1e-6) иначе.
        step (float | None): Шаг сетки.

    Raises:
        SingularPotential: Если внутри области есть полюса.

    Returns:
        BoundStateResult: Энергии по возрастанию и числа узлов.
    """
    settings = SettingsLoader()
    box = settings.box if box is None else box
    step = float(settings.get("bound_step", 2e-3)) if step is None else step
    energy_tol = float(settings.get("energy_tol", 1e-8))

    f_base, h, v = _potential_profile(potential, box, step)
    if search is None:
        kappa_max = getattr(potential, "kappa_max", None)
        lower = -(kappa_max**2) if kappa_max else float(np.min(v))
        search = (lower, -1e-6)
    lo, hi = search
    if not lo < hi:
        return BoundStateResult([], [], (lo, hi))

    def count(e: float) -> int:
        return _shoot(f_base, e, h)[1]

    brackets: list[tuple[float, float, int]] = []
    stack = [(lo, hi, count(lo), count(hi))]
    while stack:
        a, b, na, nb = stack.pop()
        if nb <= na:
            continue
        if nb - na == 1:
            brackets.append((a, b, na))
            continue
        if b - a < energy_tol:
            get_logger().warning(
                f"Unresolved cluster of {nb - na} levels near E={a:.10g}"
            )
            brackets.append((a, b, na))
            continue
        mid = 0.5 * (a + b)
        nm = count(mid)
        stack.append((a, mid, na, nm))
        stack.append((mid, b, nm, nb))

    energies, nodes = [], []
    for a, b, na in sorted(brackets):
        root = brentq(lambda e: _shoot(f_base, e, h)[0], a, b, xtol=1e-13)
        energies.append(float(root))
        nodes.append(na)
    return BoundStateResult(energies, nodes, (float(lo), float(hi)))
