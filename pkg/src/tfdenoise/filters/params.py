from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import InvalidArgumentError
from ..tfr import TFR


@dataclass
class FilterParams:
    """Parameters shared by the three spectrogram filters.

    ``eps_tilde`` defaults to ``0.01 * Q`` when left as None.  ``n_steps``
    overrides the ``1/(eps*dtau)`` step count of the PDE filter (required when
    ``eps == 0``); ``y_iterations`` overrides the Yaroslavsky iteration count,
    which otherwise follows the PDE step count.
    """

    h: float = 10.0
    rho: float = 10.0
    eps: float = 0.02
    eps_tilde: float | None = None
    sigma_smooth: float = 2.0
    dtau: float = 2.5
    tol: float = 0.04
    max_iter: int = 100
    Q: int = 255
    n_steps: int | None = None
    y_iterations: int | None = None
    truncate: bool = True
    cg_rtol: float = 1e-8

    def __post_init__(self):
        if self.eps_tilde is None:
            self.eps_tilde = 0.01 * self.Q
        checks = {
            "h": self.h > 0, "rho": self.rho > 0, "eps": self.eps >= 0,
            "eps_tilde": self.eps_tilde > 0, "dtau": self.dtau > 0, "tol": self.tol > 0,
            "max_iter": self.max_iter >= 1, "Q": self.Q >= 1,
        }
        bad = [k for k, ok in checks.items() if not ok]
        if bad:
            raise InvalidArgumentError(f"invalid filter parameters: {', '.join(bad)}")

    def pde_steps(self) -> int:
        """Number of semi-implicit steps needed to reach tau_end = 1/eps."""
        if self.n_steps is not None:
            return int(self.n_steps)
        if self.eps == 0:
            raise InvalidArgumentError("eps = 0 needs an explicit n_steps (tau_end undefined)")
        n = 1.0 / (self.eps * self.dtau)
        k = int(round(n))
        if k < 1 or abs(n - k) > 1e-9 * max(1.0, n):
            raise InvalidArgumentError(f"dtau={self.dtau} does not divide 1/eps={1 / self.eps}")
        return k

    def yaroslavsky_iterations(self) -> int:
        return int(self.y_iterations) if self.y_iterations is not None else self.pde_steps()

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FilterResult:
    image: TFR
    iterations: int
    per_iter_change: list = field(default_factory=list)
    wall_time: float = 0.0
    hit_max_iter: bool = False
    timings: dict = field(default_factory=dict)

    def report(self) -> dict:
        return {
            "iterations": self.iterations,
            "per_iter_change": [float(c) for c in self.per_iter_change],
            "wall_time": self.wall_time,
            "hit_max_iter": self.hit_max_iter,
            "timings": dict(self.timings),
        }


def relative_change(new: np.ndarray, old: np.ndarray) -> float:
    d = np.linalg.norm(new - old)
    n = np.linalg.norm(old)
    return float(d / n) if n > 0 else (0.0 if d == 0 else float("inf"))
