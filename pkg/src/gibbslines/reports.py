"""Empirical CDFs, the exact KS distance, and named-statistic reports."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["EmpiricalCDF", "ks_distance", "ks_two_sample_critical", "StatReport"]


@dataclass(frozen=True)
class EmpiricalCDF:
    """A sorted-sample step CDF."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float))
        if s.size < 1:
            raise ValueError("need at least one sample")
        object.__setattr__(self, "samples", s)

    @property
    def count(self) -> int:
        return self.samples.size

    def evaluate(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.count

    def mean(self) -> float:
        import math

        return math.fsum(self.samples) / self.count


def ks_distance(a: EmpiricalCDF, b: EmpiricalCDF) -> float:
    """Exact sup-norm distance between two step CDFs, over the merged samples."""
    grid = np.concatenate([a.samples, b.samples])
    fa = a.evaluate(grid)
    fb = b.evaluate(grid)
    # step functions also differ just below each jump
    fa_left = (np.searchsorted(a.samples, grid, side="left")) / a.count
    fb_left = (np.searchsorted(b.samples, grid, side="left")) / b.count
    return float(max(np.abs(fa - fb).max(), np.abs(fa_left - fb_left).max()))


def ks_two_sample_critical(n: int, m: int, alpha: float = 0.01) -> float:
    """Asymptotic two-sample KS critical value at level alpha."""
    c = np.sqrt(-0.5 * np.log(alpha / 2.0))
    return float(c * np.sqrt((n + m) / (n * m)))


@dataclass
class StatReport:
    """Named point estimates with (nonnegative) standard errors and free-form
    metadata; serializes to a flat JSON-ready dict."""

    statistics: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, name: str, estimate: float, std_error: float = 0.0) -> None:
        if std_error < 0.0:
            raise ValueError("standard errors must be nonnegative")
        self.statistics[name] = (float(estimate), float(std_error))

    def __getitem__(self, name: str) -> tuple[float, float]:
        return self.statistics[name]

    def to_dict(self) -> dict:
        out = dict(self.meta)
        for name, (est, err) in self.statistics.items():
            out[name] = est
            out[name + "_stderr"] = err
        return out
