"""State discretization for tabular agents."""

from __future__ import annotations

from ..gymspec import GymSpec


class NonDiscretizableState(Exception):
    """A continuous state variable has no usable binning configuration."""


class StateDiscretizer:
    """Maps raw state vectors to hashable table keys.

    Integer variables pass through; real variables are uniformly binned over
    their declared bounds (default 10 bins).
    """

    def __init__(self, spec: GymSpec, bins: int = 10):
        self.spec = spec
        self.bins = bins
        self._plan = []
        for var in spec.state_vars:
            if var.kind == "integer":
                self._plan.append(("int", 0.0, 0.0))
            else:
                if bins < 1:
                    raise NonDiscretizableState(
                        f"state var '{var.name}' is continuous and bins={bins}"
                    )
                width = (var.upper - var.lower) / bins
                self._plan.append(("bin", var.lower, width))

    def key(self, vector: tuple[float, ...]) -> tuple[int, ...]:
        out = []
        for value, (mode, lower, width) in zip(vector, self._plan):
            if mode == "int":
                out.append(int(value))
            elif width == 0.0:
                out.append(0)
            else:
                out.append(min(int((value - lower) / width), self.bins - 1))
        return tuple(out)
