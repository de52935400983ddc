"""Суперпотенциалы первого порядка свободной частицы (четыре семейства S/R/P/N).

Единицы: ħ = m = 1, гамильтониан H = -½ d²/dx² + V.
"""

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Protocol, runtime_checkable

import numpy as np

from susy_chain.core.exceptions import SingularPoint
from susy_chain.infra.settings import SettingsLoader


class SeedFamily(StrEnum):
    S = "S"
    R = "R"
    P = "P"
    N = "N"


_FAMILY_REGISTRY: dict[SeedFamily, str] = {
    SeedFamily.S: "singular: -κ coth[κ(x-a)], ε = -κ²/2",
    SeedFamily.R: "regular: -κ tanh[κ(x+b)], ε = -κ²/2",
    SeedFamily.P: "periodic: -k cot[k(x-a)], ε = +k²/2",
    SeedFamily.N: "null: -1/(x-a), ε = 0",
}


def get_family(code: str | SeedFamily) -> SeedFamily:
    """Возвращает семейство суперпотенциала по его коду.

    Args:
        code (str | SeedFamily): Код семейства (S, R, P или N).

    Raises:
        ValueError: Если код не соответствует ни одному семейству.

    Returns:
        SeedFamily: Семейство из таблицы решений свободной частицы.
    """
    if isinstance(code, SeedFamily):
        return code
    if not isinstance(code, str) or not code.strip():
        raise ValueError(f"Unknown seed family '{code}'.")
    try:
        return SeedFamily(code.strip().upper())
    except ValueError:
        raise ValueError(
            f"Unknown seed family '{code}'. Expected one of "
            f"{', '.join(f.value for f in _FAMILY_REGISTRY)}."
        )


def describe_family(family: str | SeedFamily) -> str:
    return _FAMILY_REGISTRY[get_family(family)]


@dataclass(frozen=True)
class SeedValue:
    beta: float
    beta_prime: float
    is_singular: bool


@runtime_checkable
class SeedEvaluator(Protocol):
    """Любое решение уравнения Риккати, пригодное для цепочки Бэклунда."""

    @property
    def energy(self) -> float: ...

    def evaluate(
        self, xs: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...

    def poles(self, x_min: float, x_max: float) -> list[float]: ...


class SeedSpec:
    """Суперпотенциал первого порядка β₁(x, ε) свободной частицы.

    Attributes:
        _family (SeedFamily): Семейство из таблицы решений (S, R, P, N).
        _kappa (float): Волновое число κ (S, R) или k (P); 0 для N.
        _shift (float): Сдвиг a (S, P, N) или b (R).
    """

    _family: SeedFamily
    _kappa: float
    _shift: float

    def __init__(self, family: str | SeedFamily, kappa: float, shift: float = 0.0):
        fam = get_family(family)
        if not isinstance(kappa, (int, float)) or not math.isfinite(kappa):
            raise ValueError("Seed kappa must be a finite number.")
        if fam is SeedFamily.N:
            if kappa != 0:
                raise ValueError("Seed kappa must be 0 for the N family.")
        elif kappa <= 0:
            raise ValueError(f"Seed kappa must be positive for the {fam} family.")
        if not isinstance(shift, (int, float)) or not math.isfinite(shift):
            raise ValueError("Seed shift must be a finite number.")
        self._family = fam
        self._kappa = float(kappa)
        self._shift = float(shift)

    @property
    def family(self) -> SeedFamily:
        return self._family

    @property
    def kappa(self) -> float:
        return self._kappa

    @property
    def shift(self) -> float:
        return self._shift

    @property
    def energy(self) -> float:
        return factorization_energy(self)

    @property
    def center(self) -> float:
        """Центр профиля: a для S/P/N, -b для R."""
        if self._family is SeedFamily.R:
            return -self._shift
        return self._shift

    def evaluate(
        self, xs: np.ndarray, pole_guard: float | None = None
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Вычисляет β₁ и β₁' на массиве точек по замкнутым формулам.

        Args:
            xs (np.ndarray): Точки оси x.
            pole_guard (float | None): Радиус окрестности полюса; по умолчанию
                берётся из настроек.

        Returns:
            tuple[np.ndarray, np.ndarray, np.ndarray]: (beta, beta_prime,
                singular); в особых точках значения равны NaN.
        """
        guard = SettingsLoader().pole_guard if pole_guard is None else pole_guard
        x = np.asarray(xs, dtype=float)
        k = self._kappa
        with np.errstate(all="ignore"):
            match self._family:
                case SeedFamily.S:
                    u = k * (x - self._shift)
                    beta = -k / np.tanh(u)
                    beta_prime = k * k / np.sinh(u) ** 2
                    singular = np.abs(x - self._shift) <= guard
                case SeedFamily.R:
                    u = k * (x + self._shift)
                    beta = -k * np.tanh(u)
                    beta_prime = -k * k / np.cosh(u) ** 2
                    singular = np.zeros(x.shape, dtype=bool)
                case SeedFamily.P:
                    u = k * (x - self._shift)
                    beta = -k / np.tan(u)
                    beta_prime = k * k / np.sin(u) ** 2
                    period = math.pi / k
                    offset = x - self._shift
                    residue = offset - np.round(offset / period) * period
                    singular = np.abs(residue) <= guard
                case SeedFamily.N:
                    d = x - self._shift
                    beta = -1.0 / d
                    beta_prime = 1.0 / d**2
                    singular = np.abs(d) <= guard
        beta = np.where(singular, np.nan, beta)
        beta_prime = np.where(singular, np.nan, beta_prime)
        return beta, beta_prime, singular

    def poles(self, x_min: float, x_max: float) -> list[float]:
        """Возвращает аналитические положения полюсов β₁ в окне [x_min, x_max].

        Args:
            x_min (float): Левая граница окна.
            x_max (float): Правая граница окна.

        Returns:
            list[float]: Отсортированный список полюсов.
        """
        match self._family:
            case SeedFamily.S | SeedFamily.N:
                a = self._shift
                return [a] if x_min <= a <= x_max else []
            case SeedFamily.P:
                period = math.pi / self._kappa
                m_lo = math.ceil((x_min - self._shift) / period)
                m_hi = math.floor((x_max - self._shift) / period)
                return [self._shift + m * period for m in range(m_lo, m_hi + 1)]
            case _:
                return []

    @staticmethod
    def to_dict(spec: "SeedSpec") -> dict:
        return {
            "family": spec.family.value,
            "kappa": spec.kappa,
            "shift": spec.shift,
        }

    @staticmethod
    def from_dict(data: dict) -> "SeedSpec":
        """Создает SeedSpec из словаря {family, kappa, shift}.

        Raises:
            ValueError: Если данные невалидны или отсутствуют обязательные поля.
        """
        try:
            family = get_family(data["family"])
            kappa = 0.0 if family is SeedFamily.N else float(data["kappa"])
            return SeedSpec(family, kappa, float(data.get("shift", 0.0)))
        except (KeyError, TypeError) as e:
            raise ValueError(f"Invalid seed data: {e}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeedSpec):
            return NotImplemented
        return (self._family, self._kappa, self._shift) == (
            other._family,
            other._kappa,
            other._shift,
        )

    def __hash__(self) -> int:
        return hash((self._family, self._kappa, self._shift))

    def __repr__(self) -> str:
        return (
            f"SeedSpec(family={self._family.value}, kappa={self._kappa}, "
            f"shift={self._shift})"
        )


def factorization_energy(spec: SeedSpec) -> float:
    """Энергия факторизации ε семейства: -κ²/2 (S, R), +k²/2 (P), 0 (N)."""
    match spec.family:
        case SeedFamily.S | SeedFamily.R:
            return -0.5 * spec.kappa**2
        case SeedFamily.P:
            return 0.5 * spec.kappa**2
        case _:
            return 0.0


def eval_seed(spec: SeedSpec, x: float, pole_guard: float | None = None) -> SeedValue:
    """Вычисляет β₁(x) и β₁'(x) в одной точке.

    Особые точки помечаются флагом is_singular, исключение не выбрасывается.

    Args:
        spec (SeedSpec): Описание суперпотенциала.
        x (float): Точка оси.
        pole_guard (float | None): Радиус окрестности полюса.

    Returns:
        SeedValue: Значения β₁, β₁' и флаг особенности.
    """
    beta, beta_prime, singular = spec.evaluate(np.array([x], dtype=float), pole_guard)
    return SeedValue(float(beta[0]), float(beta_prime[0]), bool(singular[0]))


def first_order_partner(
    spec: SeedSpec, x: float, pole_guard: float | None = None
) -> float:
    """Партнёр первого порядка V₁ = V₀ + β₁' при V₀ = 0.

    Args:
        spec (SeedSpec): Описание суперпотенциала.
        x (float): Точка оси.
        pole_guard (float | None): Радиус окрестности полюса.

    Raises:
        SingularPoint: Если x лежит в окрестности полюса семейства.

    Returns:
        float: Значение V₁(x).
    """
    value = eval_seed(spec, x, pole_guard)
    if value.is_singular:
        raise SingularPoint(x, level=1, pole_kind="seed_pole")
    return value.beta_prime
