"""Discrete line ensembles: (curve index x integer time) arrays with linear
interpolation semantics, the common currency of every sampler in the package."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DiscreteLineEnsemble"]


@dataclass(frozen=True)
class DiscreteLineEnsemble:
    """K real-valued curves sampled on the integer times t0..t1.

    ``curves[i, j]`` holds the value of curve ``i + 1`` (1-based outward) at
    time ``t0 + j``.  Evaluation at non-integer times linearly interpolates
    the two adjacent integer values; evaluation outside [t0, t1] is a domain
    error.
    """

    curves: np.ndarray
    t0: int
    t1: int

    def __post_init__(self):
        curves = np.asarray(self.curves, dtype=float)
        object.__setattr__(self, "curves", curves)
        if curves.ndim != 2:
            raise ValueError("curves must be a 2-d array (K x times)")
        if self.t1 <= self.t0:
            raise ValueError(f"need t0 < t1, got [{self.t0}, {self.t1}]")
        if curves.shape[1] != self.t1 - self.t0 + 1:
            raise ValueError(
                f"curves have {curves.shape[1]} columns, expected {self.t1 - self.t0 + 1}"
            )

    @property
    def k(self) -> int:
        return self.curves.shape[0]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t0, self.t1 + 1)

    def curve(self, i: int) -> np.ndarray:
        """Stored values of curve i (1-based)."""
        if not 1 <= i <= self.k:
            raise ValueError(f"curve index {i} outside [1, {self.k}]")
        return self.curves[i - 1]

    def value(self, i: int, s) -> np.ndarray | float:
        """Curve i evaluated at (possibly non-integer) time(s) s by linear interpolation."""
        sa = np.asarray(s, dtype=float)
        if np.any(sa < self.t0) or np.any(sa > self.t1):
            raise ValueError(f"time {s!r} outside [{self.t0}, {self.t1}]")
        res = np.interp(sa, self.times, self.curve(i))
        return res if isinstance(s, np.ndarray) else float(res)
