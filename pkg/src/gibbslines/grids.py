"""Tabulated densities on truncated uniform grids and inverse-CDF sampling.

This is the quadrature backbone shared by the bridge, Gibbs and coupling
modules: trapezoid mass, cumulative CDFs, and monotone linear-interpolation
inverses, in both single-row and batched (samples x grid) form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PrecisionError

__all__ = ["GridDensity", "trapezoid_cdf", "inverse_cdf_rows"]


def trapezoid_cdf(values: np.ndarray, step: float) -> np.ndarray:
    """Cumulative trapezoid integral along the last axis, starting at 0."""
    inner = 0.5 * (values[..., 1:] + values[..., :-1]) * step
    out = np.zeros(values.shape)
    np.cumsum(inner, axis=-1, out=out[..., 1:])
    return out


def inverse_cdf_rows(x_rows: np.ndarray, pdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise inverse-CDF draw: one uniform per row of tabulated pdf values.

    ``x_rows`` may be a single shared grid (1-d) or per-row grids (2-d with
    uniform spacing per row).  Zero-mass rows raise ``PrecisionError``.
    """
    pdf_rows = np.atleast_2d(pdf_rows)
    x_rows = np.atleast_2d(x_rows)
    step = x_rows[:, 1] - x_rows[:, 0]
    cdf = trapezoid_cdf(pdf_rows, 1.0) * step[:, None]
    total = cdf[:, -1]
    if np.any(~np.isfinite(total)) or np.any(total <= 0.0):
        raise PrecisionError("conditional density has zero or non-finite mass on its grid")
    target = np.asarray(u) * total
    k = np.clip((cdf < target[:, None]).sum(axis=1), 1, cdf.shape[1] - 1)
    rows = np.arange(cdf.shape[0])
    c_lo = cdf[rows, k - 1]
    c_hi = cdf[rows, k]
    frac = np.where(c_hi > c_lo, (target - c_lo) / np.maximum(c_hi - c_lo, 1e-300), 0.0)
    x_lo = x_rows[np.minimum(rows, x_rows.shape[0] - 1), k - 1]
    return x_lo + frac * step[np.minimum(rows, x_rows.shape[0] - 1)]


@dataclass(frozen=True)
class GridDensity:
    """Nonnegative values tabulated on the uniform grid [lo, hi].

    The represented function is ``values * exp(log_scale)``; the extra log
    offset lets heavily rescaled conditional densities stay in range.  For a
    probability density the trapezoid mass must be within 1e-6 of 1.
    """

    lo: float
    hi: float
    values: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values.size < 4:
            raise ValueError("values must be a 1-d array with at least 4 points")
        if not self.hi > self.lo:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if np.any(values < 0.0) or np.any(~np.isfinite(values)):
            raise ValueError("density values must be finite and nonnegative")

    @classmethod
    def from_log_values(cls, lo: float, hi: float, log_values: np.ndarray) -> "GridDensity":
        """Build from log-density values, absorbing the maximum into log_scale."""
        log_values = np.asarray(log_values, dtype=float)
        peak = np.max(log_values)
        if not np.isfinite(peak):
            raise PrecisionError("conditional density underflowed on its whole grid")
        return cls(lo=lo, hi=hi, values=np.exp(log_values - peak), log_scale=float(peak))

    @property
    def m(self) -> int:
        return self.values.size

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.m - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.m)

    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.step) * np.exp(self.log_scale))

    def normalized(self) -> "GridDensity":
        total = np.trapezoid(self.values, dx=self.step)
        if not total > 0.0:
            raise PrecisionError("cannot normalize a zero-mass density")
        return GridDensity(self.lo, self.hi, self.values / total, 0.0)

    def pdf(self, x) -> np.ndarray:
        return np.interp(x, self.x, self.values, left=0.0, right=0.0) * np.exp(self.log_scale)

    def log_pdf(self, x) -> np.ndarray:
        with np.errstate(divide="ignore"):
            logv = np.log(self.values)
        return np.interp(x, self.x, logv, left=-np.inf, right=-np.inf) + self.log_scale

    def cdf_values(self) -> np.ndarray:
        c = trapezoid_cdf(self.values, self.step)
        return c / c[-1]

    def cdf(self, s) -> np.ndarray:
        return np.interp(s, self.x, self.cdf_values(), left=0.0, right=1.0)

    def ppf(self, u) -> np.ndarray:
        """Inverse CDF by monotone linear interpolation."""
        return np.interp(u, self.cdf_values(), self.x)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.ppf(rng.uniform(size=size))

    def mean(self) -> float:
        d = self.normalized()
        return float(np.trapezoid(d.x * d.values, dx=d.step))

    def var(self) -> float:
        d = self.normalized()
        mu = d.mean()
        return float(np.trapezoid((d.x - mu) ** 2 * d.values, dx=d.step))
