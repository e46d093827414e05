"""Exceptions shared across the package."""


class ConfigError(ValueError):
    """A scenario or controller configuration failed validation.

    The message always names the offending key or quantity.
    """


class SimulationDiverged(RuntimeError):
    """A closed-loop state became non-finite during integration."""

    def __init__(self, time: float, detail: str = ""):
        self.time = time
        msg = f"simulation diverged at t = {time:.6g} s"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
