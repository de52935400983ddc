"""Рекуррентная схема Бэклунда: β_k и V_k для k = 1..n из n решений Риккати.

Треугольная таблица β_k(x, ε_j), j ≥ k:

    β_k(x, ε_j) = -β_{k-1}(x, ε_{k-1})
                  - 2(ε_{k-1} - ε_j) / (β_{k-1}(x, ε_{k-1}) - β_{k-1}(x, ε_j)),

производная берётся из тождества Риккати
β_k'(x, ε_j) = β_k² - 2(V_{k-1} - ε_j), а V_k = V_{k-1} + β_k'(x, ε_k).
"""

import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.optimize import bisect

from susy_chain.core.exceptions import DenominatorZero, SingularPoint
from susy_chain.core.seeds import SeedEvaluator, SeedSpec
from susy_chain.infra.settings import SettingsLoader
from susy_chain.logging_config import get_logger

# Offset at which the double-pole strength |V|·δ² is measured.
_STRENGTH_OFFSET = 1e-4
# Candidates closer than this are the same singularity.
_MERGE_TOL = 1e-6


class PoleKind(StrEnum):
    NONE = "none"
    SEED_POLE = "seed_pole"
    DENOMINATOR_ZERO = "denominator_zero"


_KIND_BY_CODE = {
    0: PoleKind.NONE,
    1: PoleKind.SEED_POLE,
    2: PoleKind.DENOMINATOR_ZERO,
}
_CODE_BY_KIND = {kind: code for code, kind in _KIND_BY_CODE.items()}


@dataclass(frozen=True)
class LevelValue:
    beta: float
    beta_prime: float
    v: float
    is_singular: bool
    pole_kind: PoleKind
    level: int = 0


@dataclass(frozen=True)
class Pole:
    location: float
    kind: PoleKind
    level: int


@dataclass
class GridSample:
    """Равномерная выборка V_n с пометками особых точек.

    Attributes:
        x (np.ndarray): Узлы сетки.
        v (np.ndarray): Значения V_n (NaN в особых узлах).
        is_singular (np.ndarray): Маска особых узлов.
        pole_kind (np.ndarray): Тип особенности для каждого узла.
        poles (list[Pole]): Уточнённые полюса V_n в окне.
        cancelled (list[float]): Устранимые особенности (сокращающиеся полюса).
        energies (list[float]): Энергии факторизации ε_1..ε_n.
        seeds (list[dict]): Описание затравочных решений.
    """

    x: np.ndarray
    v: np.ndarray
    is_singular: np.ndarray
    pole_kind: np.ndarray
    poles: list[Pole] = field(default_factory=list)
    cancelled: list[float] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    seeds: list[dict] = field(default_factory=list)

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0]) if len(self.x) > 1 else 0.0

    @property
    def singular_count(self) -> int:
        return int(np.count_nonzero(self.is_singular))


@dataclass
class _Entry:
    beta: np.ndarray
    beta_prime: np.ndarray
    kind: np.ndarray
    level: np.ndarray


@dataclass
class _Table:
    entries: dict[tuple[int, int], _Entry]
    potentials: list[np.ndarray]
    v_kind: np.ndarray
    v_level: np.ndarray
    denominators: dict[tuple[int, int], np.ndarray]


def backlund_step(
    beta_a: float,
    beta_b: float,
    eps_a: float,
    eps_b: float,
    denom_guard: float | None = None,
) -> float:
    """Нелинейная суперпозиция двух решений уравнения Риккати.

    β = -β_a - 2(ε_a - ε_b)/(β_a - β_b); аргумент beta_a несёт энергию
    предыдущей диагонали ε_{k-1}.

    Args:
        beta_a (float): Значение β_{k-1}(x, ε_{k-1}).
        beta_b (float): Значение β_{k-1}(x, ε_j).
        eps_a (float): Энергия ε_{k-1}.
        eps_b (float): Энергия ε_j.
        denom_guard (float | None): Относительный порог нуля знаменателя.

    Raises:
        DenominatorZero: Если |β_a - β_b| не превышает порога.

    Returns:
        float: Новое значение β.
    """
    guard = SettingsLoader().denom_guard if denom_guard is None else denom_guard
    denominator = beta_a - beta_b
    if abs(denominator) <= guard * max(1.0, abs(beta_a) + abs(beta_b)):
        raise DenominatorZero()
    return -beta_a - 2.0 * (eps_a - eps_b) / denominator


class BacklundChain:
    """Упорядоченная цепочка из n затравочных решений и её таблица Бэклунда.

    Цепочка неизменяема после создания и может разделяться между потоками.
    Для регулярных цепочек свободной частицы затравки удобно упорядочивать
    так, чтобы каждый промежуточный уровень оставался регулярным
    (например, S(κ₁) затем R(κ₂) при κ₂ < κ₁); порядок не навязывается.

    Attributes:
        _seeds (tuple[SeedEvaluator, ...]): Затравки в порядке ε_1..ε_n.
        _energies (tuple[float, ...]): Энергии факторизации.
        _base_potential (Callable | None): Исходный потенциал V₀ (None = 0).
    """

    def __init__(
        self,
        seeds: Sequence[SeedEvaluator],
        base_potential: Callable[[np.ndarray], np.ndarray] | None = None,
        pole_guard: float | None = None,
        denom_guard: float | None = None,
    ) -> None:
        if not seeds:
            raise ValueError("A chain needs at least one seed.")
        for seed in seeds:
            if not isinstance(seed, SeedEvaluator):
                raise ValueError(f"Object {seed!r} is not a seed evaluator.")
        energies = tuple(float(s.energy) for s in seeds)
        for i, e_i in enumerate(energies):
            for e_j in energies[i + 1 :]:
                if abs(e_i - e_j) <= 1e-12 * max(1.0, abs(e_i), abs(e_j)):
                    raise ValueError(
                        f"Factorization energies must be distinct, got {e_i} twice."
                    )
        settings = SettingsLoader()
        self._seeds = tuple(seeds)
        self._energies = energies
        self._base_potential = base_potential
        self._pole_guard = settings.pole_guard if pole_guard is None else pole_guard
        self._denom_guard = (
            settings.denom_guard if denom_guard is None else denom_guard
        )

    @property
    def seeds(self) -> tuple[SeedEvaluator, ...]:
        return self._seeds

    @property
    def energies(self) -> tuple[float, ...]:
        return self._energies

    @property
    def n(self) -> int:
        return len(self._seeds)

    @property
    def kappa_max(self) -> float:
        kappas = [s.kappa for s in self._seeds if isinstance(s, SeedSpec)]
        kappas += [math.sqrt(2 * abs(e)) for e in self._energies]
        return max([k for k in kappas if k > 0], default=1.0)

    def describe_seeds(self) -> list[dict]:
        described = []
        for seed, energy in zip(self._seeds, self._energies):
            if isinstance(seed, SeedSpec):
                described.append({**SeedSpec.to_dict(seed), "energy": energy})
            else:
                described.append({"family": type(seed).__name__, "energy": energy})
        return described

    def _evaluate_seed(self, seed: SeedEvaluator, x: np.ndarray):
        if isinstance(seed, SeedSpec):
            return seed.evaluate(x, self._pole_guard)
        return seed.evaluate(x)

    def _evaluate(self, xs) -> _Table:
        x = np.atleast_1d(np.asarray(xs, dtype=float))
        eps = self._energies
        n = self.n

        with np.errstate(all="ignore"):
            if self._base_potential is None:
                v_prev = np.zeros_like(x)
            else:
                v_prev = np.asarray(self._base_potential(x), dtype=float)
            v_kind = np.where(np.isfinite(v_prev), 0, 1).astype(np.int8)
            v_level = np.zeros(x.shape, dtype=np.int16)

            entries: dict[tuple[int, int], _Entry] = {}
            denominators: dict[tuple[int, int], np.ndarray] = {}
            for j, seed in enumerate(self._seeds, start=1):
                beta, beta_prime, singular = self._evaluate_seed(seed, x)
                entries[(1, j)] = _Entry(
                    np.asarray(beta, dtype=float),
                    np.asarray(beta_prime, dtype=float),
                    np.where(singular, 1, 0).astype(np.int8),
                    np.where(singular, 1, 0).astype(np.int16),
                )

            potentials = [v_prev]
            for k in range(1, n + 1):
                if k >= 2:
                    diag = entries[(k - 1, k - 1)]
                    for j in range(k, n + 1):
                        other = entries[(k - 1, j)]
                        d = diag.beta - other.beta
                        guard = self._denom_guard * np.maximum(
                            1.0, np.abs(diag.beta) + np.abs(other.beta)
                        )
                        small = np.abs(d) <= guard
                        beta = -diag.beta - 2.0 * (eps[k - 2] - eps[j - 1]) / d

                        kind = np.where(diag.kind != 0, diag.kind, other.kind)
                        level = np.where(diag.kind != 0, diag.level, other.level)
                        fresh = (kind == 0) & small
                        kind = np.where(fresh, 2, kind)
                        level = np.where(fresh, k, level)
                        from_v = (kind == 0) & (v_kind != 0)
                        kind = np.where(from_v, v_kind, kind).astype(np.int8)
                        level = np.where(from_v, v_level, level).astype(np.int16)

                        beta_prime = beta * beta - 2.0 * (v_prev - eps[j - 1])
                        singular = kind != 0
                        entries[(k, j)] = _Entry(
                            np.where(singular, np.nan, beta),
                            np.where(singular, np.nan, beta_prime),
                            kind,
                            level,
                        )
                        denominators[(k, j)] = d

                diag_k = entries[(k, k)]
                v_k = v_prev + diag_k.beta_prime
                newly = (v_kind == 0) & (diag_k.kind != 0)
                v_kind = np.where(newly, diag_k.kind, v_kind).astype(np.int8)
                v_level = np.where(newly, diag_k.level, v_level).astype(np.int16)
                v_k = np.where(v_kind != 0, np.nan, v_k)
                potentials.append(v_k)
                v_prev = v_k

        return _Table(entries, potentials, v_kind, v_level, denominators)

    def eval_level(self, k: int, j: int, x: float) -> LevelValue:
        """Вычисляет β_k(x, ε_j), β_k' и V_k в одной точке.

        Для j == k поле v равно V_k(x); для j > k это потенциал, который
        получился бы при выборе ε_j на k-м шаге.

        Args:
            k (int): Уровень, 1 ≤ k ≤ n.
            j (int): Индекс энергии, k ≤ j ≤ n.
            x (float): Точка оси.

        Raises:
            ValueError: Если индексы вне треугольной таблицы.

        Returns:
            LevelValue: Значения уровня с пометкой особенности.
        """
        if not (1 <= k <= j <= self.n):
            raise ValueError(f"Level indices must satisfy 1 <= k <= j <= {self.n}.")
        table = self._evaluate([x])
        entry = table.entries[(k, j)]
        v_prev = table.potentials[k - 1]
        code = int(entry.kind[0])
        level = int(entry.level[0])
        if code == 0 and k >= 2 and not np.isfinite(v_prev[0]):
            code, level = 1, 0
        return LevelValue(
            beta=float(entry.beta[0]),
            beta_prime=float(entry.beta_prime[0]),
            v=float(v_prev[0] + entry.beta_prime[0]),
            is_singular=code != 0,
            pole_kind=_KIND_BY_CODE[code],
            level=level,
        )

    def eval_potential(self, x: float) -> float:
        """Вычисляет V_n(x) = V₀(x) + Σ β_k'(x, ε_k).

        Args:
            x (float): Точка оси, регулярная на всех уровнях.

        Raises:
            SingularPoint: Если x особая точка хотя бы одного уровня.
            DenominatorZero: Если на каком-то уровне обнулился знаменатель.

        Returns:
            float: Значение V_n(x).
        """
        table = self._evaluate([x])
        total = float(table.potentials[0][0])
        for k in range(1, self.n + 1):
            entry = table.entries[(k, k)]
            code = int(entry.kind[0])
            if code == 2:
                raise DenominatorZero(x, int(entry.level[0]))
            if code != 0:
                raise SingularPoint(x, int(entry.level[0]), _KIND_BY_CODE[code])
            total = total + float(entry.beta_prime[0])
        return total

    def level_potential(self, k: int) -> Callable[[np.ndarray], np.ndarray]:
        """Возвращает векторизованный V_k (без разрешения устранимых точек)."""
        if not (0 <= k <= self.n):
            raise ValueError(f"Level must be within 0..{self.n}.")

        def potential(xs: np.ndarray) -> np.ndarray:
            return self._evaluate(xs).potentials[k]

        return potential

    def _denominator_at(self, k: int, j: int, t: float) -> float:
        return float(self._evaluate([t]).denominators[(k, j)][0])

    def _denominator_roots(
        self, k: int, j: int, x: np.ndarray, d: np.ndarray
    ) -> list[float]:
        tol = float(SettingsLoader().get("bisection_tol", 1e-12))
        finite = np.isfinite(d)
        roots = [float(x[i]) for i in np.flatnonzero(finite & (d == 0.0))]
        signs = np.sign(d)
        crossing = finite[:-1] & finite[1:] & (signs[:-1] * signs[1:] < 0)
        for i in np.flatnonzero(crossing):
            lo, hi = float(x[i]), float(x[i + 1])
            try:
                root = bisect(lambda t: self._denominator_at(k, j, t), lo, hi, xtol=tol)
            except (ValueError, RuntimeError):
                continue
            value = self._denominator_at(k, j, root)
            scale = max(1.0, abs(float(d[i])), abs(float(d[i + 1])))
            # a sign change through infinity converges onto a pole of d, not a zero
            if np.isfinite(value) and abs(value) <= 1e-6 * scale:
                roots.append(float(root))
        return roots

    def _candidates(
        self, x: np.ndarray, table: _Table, upto_level: int | None = None
    ) -> list[Pole]:
        lo, hi = float(x.min()), float(x.max())
        top = self.n if upto_level is None else upto_level
        exact: list[Pole] = []
        for seed in self._seeds:
            exact += [Pole(c, PoleKind.SEED_POLE, 1) for c in seed.poles(lo, hi)]
        for (k, j), d in table.denominators.items():
            if k > top:
                continue
            exact += [
                Pole(c, PoleKind.DENOMINATOR_ZERO, k)
                for c in self._denominator_roots(k, j, x, d)
            ]
        flagged = [
            Pole(
                float(x[i]),
                _KIND_BY_CODE[int(table.v_kind[i])],
                int(table.v_level[i]),
            )
            for i in np.flatnonzero(table.v_kind != 0)
        ]

        merged: list[Pole] = []
        for cand in sorted(exact, key=lambda p: (p.location, p.level)) + flagged:
            if any(abs(cand.location - m.location) <= _MERGE_TOL for m in merged):
                continue
            merged.append(cand)
        return sorted(merged, key=lambda p: p.location)

    def candidates(self, xs) -> list[Pole]:
        """Все кандидаты в особые точки в окне xs, до классификации."""
        x = np.atleast_1d(np.asarray(xs, dtype=float))
        return self._candidates(x, self._evaluate(x))

    def level_betas(self, k: int, xs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Диагональ уровня k: (β_k(x, ε_k), β_k', V_{k-1}) без разрешения."""
        if not (1 <= k <= self.n):
            raise ValueError(f"Level must be within 1..{self.n}.")
        table = self._evaluate(xs)
        entry = table.entries[(k, k)]
        return entry.beta, entry.beta_prime, table.potentials[k - 1]

    def _is_genuine(self, location: float) -> bool:
        strength = float(SettingsLoader().get("pole_strength", 0.25))
        points = np.array([location - _STRENGTH_OFFSET, location + _STRENGTH_OFFSET])
        values = self._evaluate(points).potentials[-1]
        if not np.all(np.isfinite(values)):
            return True
        return float(np.min(np.abs(values))) * _STRENGTH_OFFSET**2 >= strength

    def _fill_removable(
        self, location: float, x: np.ndarray, values: np.ndarray, codes: np.ndarray
    ) -> bool:
        radius = float(SettingsLoader().get("removable_radius", 2e-3))
        near = np.abs(x - location) <= radius
        if not np.any(near):
            return True
        delta = 1.5 * radius
        nodes = location + delta * np.array([-2.0, -1.0, 1.0, 2.0])
        node_values = self._evaluate(nodes).potentials[-1]
        if not np.all(np.isfinite(node_values)):
            return False
        values[near] = BarycentricInterpolator(nodes, node_values)(x[near])
        codes[near] = 0
        return True

    def sample(self, xs) -> GridSample:
        """Строит выборку V_n с разрешением особенностей.

        Кандидаты в особые точки (полюса затравок и нули всех знаменателей
        таблицы) уточняются бисекцией и классифицируются по силе двойного
        полюса |V|·δ²: настоящий полюс помечается в ближайшем узле сетки (V = NaN),
        устранимые точки заполняются интерполяцией по соседним узлам.

        Args:
            xs: Узлы оси x (возрастающие).

        Returns:
            GridSample: Значения, маски, список полюсов и устранимых точек.
        """
        x = np.atleast_1d(np.asarray(xs, dtype=float))
        table = self._evaluate(x)
        values = table.potentials[-1].copy()
        codes = table.v_kind.copy()

        poles: list[Pole] = []
        cancelled: list[float] = []
        for cand in self._candidates(x, table):
            if self._is_genuine(cand.location):
                poles.append(cand)
            elif self._fill_removable(cand.location, x, values, codes):
                cancelled.append(cand.location)
            else:
                poles.append(cand)

        # a pole between nodes is carried by the nearest node
        for pole in poles:
            nearest = int(np.argmin(np.abs(x - pole.location)))
            codes[nearest] = _CODE_BY_KIND[pole.kind]

        if cancelled:
            get_logger().info(
                f"Chain n={self.n}: {len(cancelled)} removable singularities "
                f"resolved, {len(poles)} poles kept"
            )

        singular = codes != 0
        values = np.where(singular, np.nan, values)
        kinds = np.array([_KIND_BY_CODE[int(c)].value for c in codes], dtype=object)
        return GridSample(
            x=x,
            v=values,
            is_singular=singular,
            pole_kind=kinds,
            poles=poles,
            cancelled=cancelled,
            energies=list(self._energies),
            seeds=self.describe_seeds(),
        )

    def __call__(self, xs) -> np.ndarray:
        return self.sample(xs).v

    def __repr__(self) -> str:
        return f"<BacklundChain(n={self.n}, energies={list(self._energies)})>"


class TableSeed:
    """Элемент таблицы β_k(x, ε_j) существующей цепочки как новая затравка.

    Вместе с base_potential=chain.level_potential(k - 1) позволяет строить
    цепочку над ненулевым V₀ = V_{k-1}.
    """

    def __init__(self, chain: BacklundChain, level: int, energy_index: int) -> None:
        if not (1 <= level <= energy_index <= chain.n):
            raise ValueError(
                f"Table entry must satisfy 1 <= level <= energy_index <= {chain.n}."
            )
        self._chain = chain
        self._level = level
        self._index = energy_index

    @property
    def energy(self) -> float:
        return self._chain.energies[self._index - 1]

    def evaluate(self, xs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        entry = self._chain._evaluate(xs).entries[(self._level, self._index)]
        return entry.beta, entry.beta_prime, entry.kind != 0

    def poles(self, x_min: float, x_max: float) -> list[float]:
        grid = np.linspace(x_min, x_max, 4001)
        table = self._chain._evaluate(grid)
        return [
            p.location
            for p in self._chain._candidates(grid, table, upto_level=self._level)
        ]

    def __repr__(self) -> str:
        return f"TableSeed(level={self._level}, energy_index={self._index})"


def eval_level(chain: BacklundChain, k: int, j: int, x: float) -> LevelValue:
    return chain.eval_level(k, j, x)


def eval_potential(chain: BacklundChain, x: float) -> float:
    return chain.eval_potential(x)


def eval_grid(chain: BacklundChain, x_min: float, x_max: float, m: int) -> GridSample:
    """Строит равномерную сетку V_n из m точек на [x_min, x_max].

    Raises:
        ValueError: Если x_min >= x_max или m < 2.
    """
    if not x_min < x_max:
        raise ValueError("Grid requires x_min < x_max.")
    if int(m) < 2:
        raise ValueError("Grid requires at least 2 samples.")
    return chain.sample(np.linspace(x_min, x_max, int(m)))


def count_poles(sample: GridSample) -> tuple[int, list[float]]:
    """Число различных уточнённых полюсов в окне выборки и их положения."""
    locations: list[float] = []
    for pole in sorted(sample.poles, key=lambda p: p.location):
        if not locations or abs(pole.location - locations[-1]) > _MERGE_TOL:
            locations.append(pole.location)
    return len(locations), locations
