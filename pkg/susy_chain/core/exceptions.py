class SingularPoint(Exception):
    def __init__(self, x: float, level: int = 1, pole_kind: str = "seed_pole"):
        self.x = float(x)
        self.level = int(level)
        self.pole_kind = str(pole_kind)
        super().__init__(
            f"Особая точка x={self.x:.12g} на уровне {self.level} ({self.pole_kind})"
        )


class DenominatorZero(SingularPoint):
    def __init__(self, x: float = float("nan"), level: int = 2):
        super().__init__(x, level, "denominator_zero")


class AsymptoteNotReached(Exception):
    def __init__(self, x_left: float, x_right: float, value: float, tol: float):
        self.x_left = x_left
        self.x_right = x_right
        self.value = value
        self.tol = tol
        super().__init__(
            f"Потенциал не затух на краях [{x_left}, {x_right}]: "
            f"|V|={value:.3e} > {tol:.3e}"
        )


class SingularPotential(Exception):
    def __init__(self, locations: list[float]):
        self.locations = [float(x) for x in locations]
        shown = ", ".join(f"{x:.6g}" for x in self.locations[:5])
        super().__init__(
            f"Потенциал сингулярен внутри области: {len(self.locations)} "
            f"полюс(ов) [{shown}]"
        )


class ConfigError(Exception):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"Ошибка конфигурации: {reason}")


class AllSingularGrid(Exception):
    def __init__(self, samples: int):
        self.samples = samples
        super().__init__(f"Все {samples} точек сетки сингулярны")
