"""Grand monotone coupling of Gibbs bridge ensembles on common uniforms.

All boundary data (entrance/exit vectors and a bottom curve, with the top
boundary at +inf) are coupled on the single probability space
(0,1)^(k(T-2)): interior points are filled in reverse lexicographic order by
inverting the conditional CDF of each point given the already-assigned ones,
with the not-yet-assigned block integrated out.

The integration exploits the nearest-neighbor product structure: all
conditionals are obtained from transfer sweeps that carry a (<= k)-dimensional
grid function across time columns, never forming the full-dimensional
integral.  Raising the boundary data pointwise raises every conditional
quantile, so outputs driven by common uniforms are ordered pathwise; this and
the continuity of the construction are exposed as empirical check routines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bridge import HrwSpec
from .ensembles import DiscreteLineEnsemble
from .errors import PrecisionError
from .gibbs import InteractionSpec
from .grids import GridDensity, trapezoid_cdf
from .reports import StatReport

__all__ = [
    "PointOrder",
    "order_points",
    "BoundaryTriple",
    "GrandCouplingEngine",
    "conditional_density",
    "conditional_cdf",
    "grand_coupling_sample",
    "monotonicity_check",
    "continuity_check",
    "default_window",
]

DEFAULT_COUPLING_GRID_M = 256


@dataclass(frozen=True)
class PointOrder:
    """The lexicographic (row-major) complete order on the interior lattice
    [1, k] x [1, T-2]; successors of a point are its conditioning set during
    the reverse-order fill."""

    k: int
    t: int

    def __post_init__(self):
        if self.k < 1 or self.t < 2:
            raise ValueError("need k >= 1 and T >= 2")

    @property
    def points(self) -> tuple:
        n = self.t - 2
        return tuple((i, j) for i in range(1, self.k + 1) for j in range(1, n + 1))

    def a_set(self, point) -> frozenset:
        """Points strictly after ``point`` (already assigned when it is drawn)."""
        return frozenset(q for q in self.points if q > tuple(point))

    def b_set(self, point) -> frozenset:
        """Points strictly before ``point`` (integrated out)."""
        return frozenset(q for q in self.points if q < tuple(point))


def order_points(k: int, T: int) -> PointOrder:
    return PointOrder(k=k, t=T)


@dataclass(frozen=True)
class BoundaryTriple:
    """Entrance/exit vectors (length k, top to bottom) and the bottom curve
    on times 0..T-1 (-inf entries switch the bottom interaction off)."""

    x_vec: tuple
    y_vec: tuple
    z_vec: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x_vec)
        y = tuple(float(v) for v in self.y_vec)
        z = tuple(float(v) for v in self.z_vec)
        if len(x) != len(y):
            raise ValueError("x_vec and y_vec must have equal length")
        if not all(np.isfinite(x)) or not all(np.isfinite(y)):
            raise ValueError("entrance/exit values must be finite")
        if any(v == np.inf or (v != v) for v in z):
            raise ValueError("bottom curve must be < +inf")
        object.__setattr__(self, "x_vec", x)
        object.__setattr__(self, "y_vec", y)
        object.__setattr__(self, "z_vec", z)

    @property
    def k(self) -> int:
        return len(self.x_vec)

    def shifted(self, c: float) -> "BoundaryTriple":
        return BoundaryTriple(
            tuple(v + c for v in self.x_vec),
            tuple(v + c for v in self.y_vec),
            tuple(v + c for v in self.z_vec),
        )


def default_window(
    boundaries, T: int, hrw: HrwSpec, pad_sigmas: float = 8.0
) -> tuple[float, float]:
    """A grid window wide enough for every transfer function of the given
    boundary data: finite data range padded by the free-walk spread."""
    vals = []
    for b in boundaries:
        vals.extend(b.x_vec)
        vals.extend(b.y_vec)
        vals.extend(v for v in b.z_vec if np.isfinite(v))
    vals = np.asarray(vals)
    mu = hrw.increment_mean()
    sig = np.sqrt(hrw.increment_var())
    pad = abs(mu) * T + pad_sigmas * sig * np.sqrt(T) + 4.0 * sig
    return float(vals.min() - pad), float(vals.max() + pad)


class GrandCouplingEngine:
    """Transfer-sweep machinery for one boundary datum on a fixed grid.

    Rows are processed bottom-to-top; within the active row p1 the forward
    functions alpha_j (rows 1..p1 free) and the backward functions (rows
    1..p1-1 free, row p1 pinned at its already-drawn values) meet at the
    site being drawn.  The bottom-row alphas depend only on the boundary and
    are cached across draws.
    """

    def __init__(
        self,
        boundary: BoundaryTriple,
        T: int,
        hrw: HrwSpec,
        interaction: InteractionSpec | None = None,
        m: int = DEFAULT_COUPLING_GRID_M,
        window: tuple[float, float] | None = None,
    ):
        if T < 2:
            raise ValueError("need T >= 2")
        if m < 256:
            raise ValueError("grid resolution must be >= 256")
        if len(boundary.z_vec) != T:
            raise ValueError(f"bottom curve must have {T} values")
        self.boundary = boundary
        self.k = boundary.k
        self.T = T
        self.n = T - 2
        self.hrw = hrw
        self.interaction = interaction if interaction is not None else InteractionSpec.exp(0, T - 1)
        if self.interaction.a > 0 or self.interaction.b < T - 1:
            raise ValueError("interaction must cover bonds 0..T-2")
        if window is None:
            window = default_window([boundary], T, hrw)
        self.lo, self.hi = window
        self.m = m
        self.grid = np.linspace(self.lo, self.hi, m)
        with np.errstate(under="ignore"):
            # gmat[a, b] = G(grid_b - grid_a)
            self.gmat = np.exp(hrw.log_g(self.grid[None, :] - self.grid[:, None]))
        self._emats: dict[int, np.ndarray] = {}
        self._bottom_alphas: list[np.ndarray] | None = None

    # -- kernel pieces ----------------------------------------------------
    def _emat(self, j: int) -> np.ndarray:
        """exp(-H_j(grid_b - grid_a)) for adjacent free rows."""
        if j not in self._emats:
            with np.errstate(under="ignore"):
                self._emats[j] = np.exp(
                    self.interaction.bond(j).log_weight(self.grid[None, :] - self.grid[:, None])
                )
        return self._emats[j]

    def _wvec(self, j: int, s: float) -> np.ndarray:
        """exp(-H_j(s - grid)): bond to a known lower-row value s."""
        with np.errstate(under="ignore"):
            return np.exp(self.interaction.bond(j).log_weight(s - self.grid))

    def _g_from(self, v: float) -> np.ndarray:
        """G(grid - v)."""
        with np.errstate(under="ignore"):
            return np.exp(self.hrw.log_g(self.grid - v))

    def _g_to(self, v: float) -> np.ndarray:
        """G(v - grid)."""
        with np.errstate(under="ignore"):
            return np.exp(self.hrw.log_g(v - self.grid))

    # -- forward transfer functions ---------------------------------------
    def _alphas(self, p1: int, below: np.ndarray) -> list[np.ndarray]:
        """alpha_j for j = 1..n with rows 1..p1 free and the row below pinned
        at ``below`` (a length-T vector of values, -inf allowed)."""
        x = self.boundary.x_vec
        n = self.n
        vecs = []
        for i in range(1, p1 + 1):
            v = self._g_from(x[i - 1])
            if i >= 2:
                v = v * np.exp(self.interaction.bond(0).log_weight(self.grid - x[i - 2]))
            vecs.append(v)
        # the bond-0 factor to the row below has constant argument (it sits at
        # the entrance column) and drops out of every normalized conditional
        alpha = vecs[0]
        for v in vecs[1:]:
            alpha = np.multiply.outer(alpha, v)
        alphas = [self._rescaled(alpha)]
        letters = "abcdefgh"[:p1]
        uppers = letters.upper()
        for j in range(1, n):
            operands = [alphas[-1]]
            script = [letters]
            for i in range(p1):
                operands.append(self.gmat)
                script.append(letters[i] + uppers[i])
            for i in range(p1 - 1):
                operands.append(self._emat(j))
                script.append(letters[i] + uppers[i + 1])
            operands.append(self._wvec(j, below[j + 1]))
            script.append(letters[p1 - 1])
            sub = ",".join(script) + "->" + uppers
            nxt = np.einsum(sub, *operands, optimize=True)
            alphas.append(self._rescaled(nxt))
        return alphas

    @staticmethod
    def _rescaled(arr: np.ndarray) -> np.ndarray:
        peak = arr.max()
        if not peak > 0.0:
            raise PrecisionError("transfer function underflowed to zero mass")
        return arr / peak

    def bottom_alphas(self) -> list[np.ndarray]:
        if self._bottom_alphas is None:
            z = np.asarray(self.boundary.z_vec)
            self._bottom_alphas = self._alphas(self.k, z)
        return self._bottom_alphas

    # -- backward (pinned-row) transfer functions --------------------------
    def _beta_init(self, p1: int) -> np.ndarray:
        """beta at column n: everything to the right is the exit vector."""
        if p1 == 1:
            return np.ones(1)
        y = self.boundary.y_vec
        j = self.n  # bond n couples column n to column n+1 = T-1
        vecs = []
        for i in range(1, p1):
            v = self._g_to(y[i - 1]) * np.exp(
                self.interaction.bond(j).log_weight(y[i] - self.grid)
            )
            vecs.append(v)
        beta = vecs[0]
        for v in vecs[1:]:
            beta = np.multiply.outer(beta, v)
        return self._rescaled(beta)

    def _beta_step(self, beta: np.ndarray, p1: int, j: int, s_right: float) -> np.ndarray:
        """beta_{j} from beta_{j+1}: rows 1..p1-1 free, row p1 pinned at
        s_right = its value at column j+1."""
        if p1 == 1:
            return beta
        q = p1 - 1
        letters = "abcdefgh"[:q]
        uppers = letters.upper()
        operands = [beta]
        script = [uppers]
        for i in range(q):
            operands.append(self.gmat)
            script.append(letters[i] + uppers[i])
        for i in range(q - 1):
            operands.append(self._emat(j))
            script.append(letters[i] + uppers[i + 1])
        operands.append(self._wvec(j, s_right))
        script.append(letters[q - 1])
        sub = ",".join(script) + "->" + letters
        return self._rescaled(np.einsum(sub, *operands, optimize=True))

    # -- site conditionals --------------------------------------------------
    def _site_values(
        self, p1: int, p2: int, alphas, beta, s_right: float, below_right: float
    ) -> np.ndarray:
        """Unnormalized conditional density of the point (p1, p2) on the grid.

        ``s_right``  -- value of row p1 at column p2+1 (exit value if p2 = n)
        ``below_right`` -- value of row p1+1 at column p2+1 (bottom curve for
        the lowest row)
        """
        u = self._g_to(s_right) * np.exp(
            self.interaction.bond(p2).log_weight(below_right - self.grid)
        )
        alpha = alphas[p2 - 1]
        if p1 == 1:
            vals = alpha * u
        else:
            letters = "abcdefgh"[: p1 - 1]
            sub = letters + "x," + letters + "->x"
            vals = np.einsum(sub, alpha, beta, optimize=True) * u
        peak = vals.max()
        if not peak > 0.0:
            raise PrecisionError("site conditional underflowed on the grid")
        return vals / peak

    # -- sampling -----------------------------------------------------------
    def sample(self, omega: np.ndarray) -> np.ndarray:
        """Fill all interior points from the uniform vector omega (length
        k(T-2), consumed in the reverse-lexicographic draw order) and return
        the full (k, T) value array."""
        k, T, n = self.k, self.T, self.n
        omega = np.asarray(omega, dtype=float)
        if omega.shape != (k * n,):
            raise ValueError(f"omega must have length k(T-2) = {k * n}")
        if n and (omega.min() <= 0.0 or omega.max() >= 1.0):
            raise ValueError("uniforms must lie strictly in (0, 1)")
        vals = np.empty((k, T))
        vals[:, 0] = self.boundary.x_vec
        vals[:, -1] = self.boundary.y_vec
        if n == 0:
            return vals
        order = [(i, j) for i in range(1, k + 1) for j in range(1, n + 1)]
        for p1 in range(k, 0, -1):
            below = np.asarray(self.boundary.z_vec) if p1 == k else vals[p1]
            alphas = self.bottom_alphas() if p1 == k else self._alphas(p1, below)
            beta = self._beta_init(p1)
            for p2 in range(n, 0, -1):
                s_right = vals[p1 - 1, p2 + 1] if p2 < n else self.boundary.y_vec[p1 - 1]
                dens = self._site_values(p1, p2, alphas, beta, s_right, below[p2 + 1])
                cdf = trapezoid_cdf(dens, 1.0)
                cdf /= cdf[-1]
                idx = order.index((p1, p2))
                vals[p1 - 1, p2] = np.interp(omega[idx], cdf, self.grid)
                if p2 > 1:
                    beta = self._beta_step(beta, p1, p2 - 1, vals[p1 - 1, p2])
        return vals

    def site_density(self, point, assigned: dict) -> GridDensity:
        """Normalized conditional density of ``point`` given values on its
        successor set (everything before it in draw order integrated out)."""
        p1, p2 = point
        k, n = self.k, self.n
        expected = order_points(k, self.T).a_set(point)
        if set(assigned.keys()) != set(expected):
            raise ValueError("assigned values must cover exactly the successor set")
        vals = np.empty((k, self.T))
        vals[:, 0] = self.boundary.x_vec
        vals[:, -1] = self.boundary.y_vec
        for (i, j), v in assigned.items():
            vals[i - 1, j] = float(v)
        below = np.asarray(self.boundary.z_vec) if p1 == k else vals[p1]
        alphas = self.bottom_alphas() if p1 == k else self._alphas(p1, below)
        beta = self._beta_init(p1)
        for j in range(n, p2, -1):
            beta = self._beta_step(beta, p1, j - 1, vals[p1 - 1, j])
        s_right = vals[p1 - 1, p2 + 1] if p2 < n else self.boundary.y_vec[p1 - 1]
        dens = self._site_values(p1, p2, alphas, beta, s_right, below[p2 + 1])
        return GridDensity(lo=self.lo, hi=self.hi, values=dens).normalized()


def conditional_density(
    boundary: BoundaryTriple,
    fixed: dict,
    point,
    T: int,
    hrw: HrwSpec,
    interaction: InteractionSpec | None = None,
    m: int = DEFAULT_COUPLING_GRID_M,
    window: tuple[float, float] | None = None,
) -> GridDensity:
    """Conditional density of one interior lattice point given its successor
    set, with all predecessors integrated out by transfer sweeps."""
    engine = GrandCouplingEngine(boundary, T, hrw, interaction, m, window)
    return engine.site_density(tuple(point), dict(fixed))


def conditional_cdf(density: GridDensity, s) -> float:
    """F(s) of a grid conditional density: cumulative trapezoid, normalized.

    The numeric CDF must be nondecreasing (it is, for nonnegative values);
    a decrease signals corrupted input and raises ``RuntimeError``.
    """
    c = trapezoid_cdf(density.values, density.step)
    if np.any(np.diff(c) < 0.0):
        raise RuntimeError("non-monotone numeric CDF")
    return float(np.interp(s, density.x, c / c[-1]))


def grand_coupling_sample(
    boundary: BoundaryTriple,
    omega: np.ndarray,
    k: int,
    T: int,
    hrw: HrwSpec,
    interaction: InteractionSpec | None = None,
    m: int = DEFAULT_COUPLING_GRID_M,
    window: tuple[float, float] | None = None,
) -> DiscreteLineEnsemble:
    """One coupled draw: the Gibbs ensemble for ``boundary`` evaluated at the
    sample point omega in (0,1)^(k(T-2)).  T = 2 returns the deterministic
    endpoint configuration."""
    if boundary.k != k:
        raise ValueError("boundary has wrong number of curves")
    engine = GrandCouplingEngine(boundary, T, hrw, interaction, m, window)
    return DiscreteLineEnsemble(curves=engine.sample(omega), t0=0, t1=T - 1)


def monotonicity_check(
    b_low: BoundaryTriple,
    b_high: BoundaryTriple,
    n_draws: int,
    k: int,
    T: int,
    rng: np.random.Generator,
    hrw: HrwSpec,
    interaction: InteractionSpec | None = None,
    m: int = DEFAULT_COUPLING_GRID_M,
    eps_grid: float | None = None,
) -> StatReport:
    """Pathwise-ordering check under common uniforms.

    Draws ``n_draws`` omegas, evaluates both boundary data on each, and
    records the worst violation of low <= high over all lattice points; a
    violation beyond eps_grid (default 1e-8 of the grid width) is counted,
    not raised.
    """
    for name in ("x_vec", "y_vec", "z_vec"):
        lo_v = np.asarray(getattr(b_low, name))
        hi_v = np.asarray(getattr(b_high, name))
        if not np.all(lo_v <= hi_v):
            raise ValueError(f"boundary data not ordered in {name}")
    window = default_window([b_low, b_high], T, hrw)
    if eps_grid is None:
        eps_grid = 1e-8 * (window[1] - window[0])
    eng_lo = GrandCouplingEngine(b_low, T, hrw, interaction, m, window)
    eng_hi = GrandCouplingEngine(b_high, T, hrw, interaction, m, window)
    n_sites = k * (T - 2)
    max_violation = 0.0
    n_violations = 0
    for _ in range(n_draws):
        omega = rng.uniform(size=n_sites) if n_sites else np.empty(0)
        lo_curves = eng_lo.sample(omega)
        hi_curves = eng_hi.sample(omega)
        gap = float((lo_curves - hi_curves).max())
        max_violation = max(max_violation, gap)
        if gap > eps_grid:
            n_violations += 1
    report = StatReport(
        meta={"n_draws": n_draws, "grid_m": m, "eps_grid": eps_grid, "k": k, "T": T}
    )
    report.add("max_violation", max_violation)
    report.add("n_violations", float(n_violations))
    return report


def continuity_check(
    boundary: BoundaryTriple,
    delta: float,
    omega: np.ndarray,
    k: int,
    T: int,
    hrw: HrwSpec,
    interaction: InteractionSpec | None = None,
    m: int = DEFAULT_COUPLING_GRID_M,
    halvings: int = 3,
) -> StatReport:
    """Output response to shrinking boundary perturbations at fixed omega.

    The boundary is shifted up by delta, delta/2, ... (finite entries only)
    and the sup-norm output change is recorded for each step; under the
    continuous coupling these changes shrink with delta (within grid
    interpolation error).
    """
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    deltas = [delta / 2**i for i in range(halvings + 1)]
    window = default_window([boundary, boundary.shifted(delta)], T, hrw)
    base = GrandCouplingEngine(boundary, T, hrw, interaction, m, window).sample(omega)
    report = StatReport(meta={"grid_m": m, "k": k, "T": T})
    for i, d in enumerate(deltas):
        moved = GrandCouplingEngine(
            boundary.shifted(d), T, hrw, interaction, m, window
        ).sample(omega)
        report.add(f"sup_change_delta_{i}", float(np.abs(moved - base).max()))
        report.meta[f"delta_{i}"] = d
    return report
