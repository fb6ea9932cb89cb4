"""Brownian ensembles, the bridge process and the moment operators.

The probability space is a finite ensemble of sample paths, so a random
variable is a :class:`~rieszlp.lattice.LatticeElement` with one entry per
path.  Arrays in this module are laid out ``(n_nodes, n_paths)``.

The moment operator

    Phi(x, s) = x s^-x  int_0^s f(t) t^(x-1) dt

is evaluated after the substitution ``t = s v^(1/x)``, which turns the weight
into the uniform density on [0, 1]:  ``Phi(x, s) = int_0^1 f(s v^(1/x)) dv``.
No power ``s^x`` is ever formed, so large x is stable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from .errors import BoundaryConditionError, RieszLPError, StabilityCapError
from .lattice import LatticeElement, m_norm

__all__ = [
    "TimeGrid",
    "SampledFunction",
    "PathEnsemble",
    "ProcessBounds",
    "Process",
    "BridgeProcess",
    "PolynomialBump",
    "sample_bm",
    "path_bounds",
    "bridge",
    "deterministic_process",
    "phi",
    "phi_field",
    "ode_residual",
    "pde_residual",
    "ito_integral",
    "psi",
    "psi_field",
    "phipsi_residual",
    "sde_residual",
    "uniform_convergence_scan",
    "moment_error_bound",
    "signal_recover",
    "RecoveryResult",
    "DEFAULT_QUAD_NODES",
    "RECOVERY_CAP",
]

DEFAULT_QUAD_NODES = 4096
RECOVERY_CAP = 200.0
_GL_POINTS = 4
_GRADING = 3


@dataclass(frozen=True)
class TimeGrid:
    """Uniform nodes ``t_i = i * t_end / n_steps`` for i = 0..n_steps."""

    t_end: float
    n_steps: int

    def __post_init__(self):
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError("n_steps must be a positive integer")

    @property
    def dt(self) -> float:
        return self.t_end / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self.dt

    def index_of(self, t: float, snap: bool = False) -> int:
        """Node index of t; off-grid times raise unless ``snap`` is set."""
        k = t / self.dt
        kr = int(round(k))
        if abs(k - kr) > 1e-9 * max(1.0, abs(k)):
            if not snap:
                raise ValueError(f"t = {t} is not a grid node")
            warnings.warn(f"t = {t} snapped to grid node {kr * self.dt}", stacklevel=3)
        if kr < 0 or kr > self.n_steps:
            raise ValueError(f"t = {t} lies outside [0, {self.t_end}]")
        return kr


class SampledFunction:
    """Node values on a TimeGrid, linearly interpolated in between.

    Calling the object with an array of times returns an array of shape
    ``t.shape + (dim,)``.
    """

    def __init__(self, grid: TimeGrid, values: np.ndarray):
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != grid.n_nodes:
            raise ValueError("need one row of values per grid node")
        self.grid = grid
        self.values = v

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        pos = np.clip(t / self.grid.dt, 0.0, self.grid.n_steps)
        i = np.minimum(pos.astype(int), self.grid.n_steps - 1)
        w = (pos - i)[..., None]
        return self.values[i] * (1.0 - w) + self.values[i + 1] * w

    def at_node(self, i: int) -> LatticeElement:
        return LatticeElement(self.values[i])

    def squared(self) -> "SampledFunction":
        return SampledFunction(self.grid, self.values ** 2)

    def column(self, j: int) -> "SampledFunction":
        return SampledFunction(self.grid, self.values[:, j : j + 1])


@dataclass(frozen=True)
class PathEnsemble:
    """Brownian sample paths; ``values[i, j]`` is path j at node i."""

    grid: TimeGrid
    values: np.ndarray
    seed: int | None = None

    @property
    def n_paths(self) -> int:
        return self.values.shape[1]

    def at(self, i: int) -> LatticeElement:
        return LatticeElement(self.values[i])

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=0)

    def subsample(self, n_steps: int) -> "PathEnsemble":
        """The same paths observed on a coarser grid (n_steps must divide)."""
        if self.grid.n_steps % n_steps:
            raise ValueError("coarse step count must divide the fine one")
        k = self.grid.n_steps // n_steps
        return PathEnsemble(TimeGrid(self.grid.t_end, n_steps), self.values[::k].copy(), self.seed)


@dataclass(frozen=True)
class ProcessBounds:
    """Entrywise bounds ``|B_t| <= zbound`` and ``|B_{t+h} - B_t| <= |h|^(1/4) w``.

    ``unit = w + zbound`` (plus a tiny floor so it is strictly positive) is the
    order unit of the lattice of path functionals dominated by it.
    """

    zbound: LatticeElement
    w: LatticeElement
    unit: LatticeElement
    lags: tuple = ()


def sample_bm(grid: TimeGrid, n_paths: int, seed: int) -> PathEnsemble:
    """Standard Brownian motion by Gaussian increments of variance dt.

    Path j uses its own generator spawned from ``SeedSequence(seed)``, so the
    result does not depend on how paths are batched.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    children = np.random.SeedSequence(int(seed)).spawn(int(n_paths))
    xi = np.empty((grid.n_steps, n_paths))
    for j, child in enumerate(children):
        xi[:, j] = np.random.Generator(np.random.PCG64(child)).standard_normal(grid.n_steps)
    values = np.zeros((grid.n_nodes, n_paths))
    np.cumsum(np.sqrt(grid.dt) * xi, axis=0, out=values[1:])
    return PathEnsemble(grid, values, int(seed))


def path_bounds(ens: PathEnsemble, floor: float = 1e-12) -> ProcessBounds:
    """Per-path maximum and Hoelder-1/4 constant over dyadic lags."""
    B = ens.values
    zb = np.max(np.abs(B), axis=0)
    w = np.zeros(ens.n_paths)
    lags = []
    k = 1
    while k <= ens.grid.n_steps:
        h = k * ens.grid.dt
        ratio = np.max(np.abs(B[k:] - B[:-k]), axis=0) / h ** 0.25
        w = np.maximum(w, ratio)
        lags.append(k)
        k *= 2
    return ProcessBounds(LatticeElement(zb), LatticeElement(w), LatticeElement(zb + w + floor), tuple(lags))


@dataclass(frozen=True)
class Process:
    """A path process with node values and per-step differentials.

    ``df[i]`` is the differential over ``[t_i, t_{i+1}]``; Ito-type sums use it
    with left-endpoint integrands.
    """

    grid: TimeGrid
    f: np.ndarray
    df: np.ndarray

    @property
    def dim(self) -> int:
        return self.f.shape[1]

    @property
    def sampled(self) -> SampledFunction:
        return SampledFunction(self.grid, self.f)


@dataclass(frozen=True)
class BridgeProcess(Process):
    """``f(t) = (t - T)(B_t - B_a)`` on [a, T], zero elsewhere."""

    a: float = 1.5
    T: float = 3.0
    ensemble: PathEnsemble | None = field(default=None, repr=False)


def bridge(ens: PathEnsemble, a: float, T: float) -> BridgeProcess:
    """Build the bridge process; a and T are snapped to grid nodes with a warning."""
    if not T > a > 1:
        raise ValueError("need T > a > 1")
    grid = ens.grid
    if T > grid.t_end + 1e-12:
        raise ValueError("the grid must cover [0, T]")
    ia = grid.index_of(a, snap=True)
    iT = grid.index_of(T, snap=True)
    a_, T_ = ia * grid.dt, iT * grid.dt
    t = grid.nodes[:, None]
    B = ens.values
    Ba = B[ia]
    inside = (np.arange(grid.n_nodes) >= ia) & (np.arange(grid.n_nodes) <= iT)
    f = np.where(inside[:, None], (t - T_) * (B - Ba), 0.0)
    f[iT] = 0.0
    # (B_{i+1} - B_a) dt + (t_i - T) dB_i: Ito in dB, and it telescopes exactly
    dB = np.diff(B, axis=0)
    step_in = (np.arange(grid.n_steps) >= ia) & (np.arange(grid.n_steps) < iT)
    df = np.where(step_in[:, None], (B[1:] - Ba) * grid.dt + (t[:-1] - T_) * dB, 0.0)
    return BridgeProcess(grid, f, df, a_, T_, ens)


def deterministic_process(grid: TimeGrid, fn: Callable[[np.ndarray], np.ndarray]) -> Process:
    """A smooth process with ``df`` the exact node-to-node differences."""
    f = np.asarray(fn(grid.nodes), dtype=float)
    if f.ndim == 1:
        f = f[:, None]
    return Process(grid, f, np.diff(f, axis=0))


def raw_process(ens: PathEnsemble) -> Process:
    return Process(ens.grid, ens.values, ens.increments())


# ---------------------------------------------------------------------------
# moment operator


@lru_cache(maxsize=16)
def _unit_rule(n_quad: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1] for ``int_0^1 F(v) dv``.

    Composite Gauss-Legendre on a mesh graded as ``v = u^3`` toward 0, where
    ``v^(1/x)`` is singular for large x.  Weights sum to one, so constants are
    integrated exactly.
    """
    panels = max(1, n_quad // _GL_POINTS)
    g, gw = np.polynomial.legendre.leggauss(_GL_POINTS)
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    u = (lo + hi) / 2 + (hi - lo) / 2 * g
    du = (hi - lo) / 2 * gw
    v = u ** _GRADING
    w = _GRADING * u ** (_GRADING - 1) * du
    w = w.reshape(-1)
    return v.reshape(-1), w / w.sum()


@lru_cache(maxsize=16)
def _midpoint_rule(n_quad: int) -> tuple[np.ndarray, np.ndarray]:
    v = (np.arange(n_quad) + 0.5) / n_quad
    return v, np.full(n_quad, 1.0 / n_quad)


def _as_2d(y: np.ndarray, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim == 0:
        y = np.full((n, 1), float(y))
    elif y.ndim == 1:
        y = y[:, None]
    return y


FunctionLike = Union[SampledFunction, Callable[[np.ndarray], np.ndarray]]


def _phi_exact_sampled(f: SampledFunction, x: float, s: float) -> np.ndarray:
    """Closed-form Phi for the piecewise-linear interpolant of node values."""
    grid = f.grid
    k = min(int(np.floor(s / grid.dt + 1e-12)), grid.n_steps)
    t = np.append(grid.nodes[: k + 1], s) if s > grid.nodes[k] + 1e-15 else grid.nodes[: k + 1]
    vals = f(t)
    r = t / s
    Wx = r ** x
    Wx1 = r ** (x + 1)
    f0, f1 = vals[:-1], vals[1:]
    dt = np.diff(t)[:, None]
    slope = np.divide(f1 - f0, dt, out=np.zeros_like(f1), where=dt > 0)
    dW = np.diff(Wx)[:, None]
    # int_{t_c}^{t_c+1} (t - t_c) dW = dt * W_{c+1} - int W dt
    intW = (s / (x + 1)) * np.diff(Wx1)[:, None]
    return np.sum(f0 * dW + slope * (dt * Wx[1:, None] - intW), axis=0)


def phi_field(
    f: FunctionLike,
    x: float,
    s: Sequence[float] | np.ndarray,
    n_quad: int = DEFAULT_QUAD_NODES,
    rule: str = "gauss",
) -> np.ndarray:
    """Phi(x, s) for many s at once; returns ``(len(s), dim)``.

    ``rule`` is ``"gauss"`` (default), ``"midpoint"`` (plain composite midpoint
    in v) or ``"exact"`` (closed form for a SampledFunction's interpolant).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if x <= 0:
        raise RieszLPError("x must be positive")
    if np.any(s <= 0):
        raise RieszLPError("s must be positive")
    if rule == "exact":
        if not isinstance(f, SampledFunction):
            raise TypeError("the exact rule needs a SampledFunction")
        return np.stack([_phi_exact_sampled(f, x, si) for si in s])
    v, w = _unit_rule(n_quad) if rule == "gauss" else _midpoint_rule(n_quad)
    tau = v ** (1.0 / x)
    out = []
    # chunk over s to bound memory at (chunk * n_quad * dim)
    chunk = max(1, 2 ** 20 // max(1, v.size))
    for i in range(0, s.size, chunk):
        si = s[i : i + chunk]
        t = si[:, None] * tau[None, :]
        y = np.asarray(f(t), dtype=float)
        if y.ndim == 2:
            y = y[..., None]
        out.append(np.einsum("sqd,q->sd", y, w))
    return np.concatenate(out, axis=0)


def phi(f: FunctionLike, x: float, s: float, n_quad: int = DEFAULT_QUAD_NODES, rule: str = "gauss") -> LatticeElement:
    """The moment operator at a single (x, s)."""
    if np.ndim(s) != 0:
        raise TypeError("use phi_field for arrays of s")
    return LatticeElement(phi_field(f, x, [s], n_quad=n_quad, rule=rule)[0])


def _fvals(f: FunctionLike, s: np.ndarray) -> np.ndarray:
    y = np.asarray(f(s), dtype=float)
    return y[:, None] if y.ndim == 1 else y


def ode_residual(f: FunctionLike, x: float, s: Sequence[float], ds: float, rule: str = "gauss", n_quad: int = DEFAULT_QUAD_NODES) -> np.ndarray:
    """Residual of ``s dPhi/ds + x Phi - x f(s)`` with a central difference in s.

    Returns ``(len(s), dim)``.
    """
    s = np.asarray(s, dtype=float)
    p_plus = phi_field(f, x, s + ds, n_quad, rule)
    p_minus = phi_field(f, x, s - ds, n_quad, rule)
    p0 = phi_field(f, x, s, n_quad, rule)
    return s[:, None] * (p_plus - p_minus) / (2 * ds) + x * p0 - x * _fvals(f, s)


def pde_residual(
    f: FunctionLike, x: float, s: Sequence[float], ds: float, dx: float = 0.5, rule: str = "gauss", n_quad: int = DEFAULT_QUAD_NODES
) -> np.ndarray:
    """Residual of ``s d2Phi/dxds + x dPhi/dx + Phi - f(s)``.

    Central differences with steps dx (in x) and ds (in s).  Needs x > dx.
    """
    if x - dx <= 0:
        raise RieszLPError("need x > dx")
    s = np.asarray(s, dtype=float)

    def field(xx, ss):
        return phi_field(f, xx, ss, n_quad, rule)

    mixed = (
        field(x + dx, s + ds) - field(x + dx, s - ds) - field(x - dx, s + ds) + field(x - dx, s - ds)
    ) / (4 * dx * ds)
    dphidx = (field(x + dx, s) - field(x - dx, s)) / (2 * dx)
    return s[:, None] * mixed + x * dphidx + field(x, s) - _fvals(f, s)


# ---------------------------------------------------------------------------
# stochastic operator


def _weights(w, grid: TimeGrid, dim: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        return np.full((grid.n_nodes, dim), float(w))
    if w.ndim == 1:
        return w[:, None]
    return w


def ito_integral(g, proc: Process | PathEnsemble, s: float) -> LatticeElement:
    """Left-point sum ``sum_{t_i < s} g(t_i) df_i``.

    ``g`` is a scalar, a per-node vector, or a ``(n_nodes, dim)`` array.  A
    raw PathEnsemble integrates against ``dB``.
    """
    if isinstance(proc, PathEnsemble):
        proc = raw_process(proc)
    k = proc.grid.index_of(s)
    gw = _weights(g, proc.grid, proc.dim)
    return LatticeElement(np.sum(gw[:k] * proc.df[:k], axis=0))


def psi_field(proc: Process, x: float, s_index: Sequence[int]) -> np.ndarray:
    """``Psi(x, s_k) = (x/s) sum_{i<k} (t_i/s)^(x-1) df_i`` at node indices k."""
    if x <= 0:
        raise RieszLPError("x must be positive")
    t = proc.grid.nodes
    out = np.zeros((len(s_index), proc.dim))
    for j, k in enumerate(s_index):
        if k <= 0:
            raise RieszLPError("s must be positive")
        s = t[k]
        w = (t[:k] / s) ** (x - 1)
        out[j] = (x / s) * (w @ proc.df[:k])
    return out


def psi(proc: Process, x: float, s: float) -> LatticeElement:
    """Stochastic moment operator at one grid time s."""
    if s <= 0:
        raise RieszLPError("s must be positive")
    return LatticeElement(psi_field(proc, x, [proc.grid.index_of(s)])[0])


def phipsi_residual(proc: Process, x: float, s: float, rule: str = "gauss", n_quad: int = DEFAULT_QUAD_NODES) -> tuple[LatticeElement, float]:
    """``Psi(x,s) - (x/s)(f(s) - Phi(x-1,s))`` and its M-norm."""
    if x < 2:
        raise RieszLPError("need x >= 2")
    k = proc.grid.index_of(s)
    lhs = psi_field(proc, x, [k])[0]
    rhs = (x / s) * (proc.f[k] - phi_field(proc.sampled, x - 1, [s], n_quad, rule)[0])
    res = LatticeElement(lhs - rhs)
    return res, m_norm(res)


def sde_residual(proc: Process, x: float, s_range: tuple[float, float]) -> tuple[np.ndarray, float]:
    """Per-step residual ``dPsi_i + (x/s_i) Psi_i dt - (x/s_i) df_i`` on a range.

    Returns the residual rows (one per step starting in the range) and their
    maximal absolute entry.
    """
    grid = proc.grid
    i0 = int(np.ceil(s_range[0] / grid.dt - 1e-9))
    i1 = min(int(np.floor(s_range[1] / grid.dt + 1e-9)), grid.n_steps)
    if i0 < 1 or i1 <= i0:
        raise RieszLPError("need 0 < s_lo < s_hi")
    idx = np.arange(i0, i1 + 1)
    P = psi_field(proc, x, idx)
    s = grid.nodes[idx[:-1]][:, None]
    res = np.diff(P, axis=0) + (x / s) * P[:-1] * grid.dt - (x / s) * proc.df[idx[:-1]]
    return res, float(np.max(np.abs(res))) if res.size else 0.0


def uniform_convergence_scan(
    f: FunctionLike, x_list: Sequence[float], s_values: Sequence[float], n_quad: int = DEFAULT_QUAD_NODES, rule: str = "gauss"
) -> np.ndarray:
    """``sup_s ||Phi(x, s) - f(s)||`` (M-norm, unit e = ones) for each x."""
    s_values = np.asarray(s_values, dtype=float)
    fs = _fvals(f, s_values)
    return np.array([m_norm(phi_field(f, x, s_values, n_quad, rule) - fs) for x in x_list])


def moment_error_bound(f: SampledFunction, x: float) -> np.ndarray:
    """Per-path bound on ``sup_s |Phi(x, s) - f(s)|`` from the modulus of f.

    Points ``s v^(1/x)`` farther than delta from s carry mass at most
    ``(1 - delta/t_end)^x``, so the error is below
    ``omega(delta) + 2 max|f| (1 - delta/t_end)^x``; minimised over the dyadic
    levels.  The gap within ``2 delta`` on nodes bounds the gap of the
    interpolant within delta.
    """
    from .inequalities import GridFunction, uniform_continuity_modulus

    g = f.grid
    mod = uniform_continuity_modulus(GridFunction(0.0, g.t_end, f.values))
    zmax = np.max(np.abs(f.values), axis=0)
    t_end = g.t_end
    best = 2 * zmax
    for p in range(1, mod.delta.size):
        tail = (1.0 - mod.delta[p] / t_end) ** x
        best = np.minimum(best, mod.sigma[p - 1] + 2 * zmax * tail)
    return best


# ---------------------------------------------------------------------------
# signal recovery


@dataclass(frozen=True)
class PolynomialBump:
    """``h(t) = scale * ((t - lo)(hi - t))^power`` on [lo, hi], zero elsewhere."""

    lo: float
    hi: float
    power: int = 2
    scale: float = 1.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.lo) & (t <= self.hi)
        return np.where(inside, self.scale * ((t - self.lo) * (self.hi - t)) ** self.power, 0.0)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.lo) & (t <= self.hi)
        q = (t - self.lo) * (self.hi - t)
        dq = self.lo + self.hi - 2 * t
        if self.power == 0:
            return np.zeros_like(t)
        return np.where(inside, self.scale * self.power * q ** (self.power - 1) * dq, 0.0)

    def validate(self, a: float, T: float) -> None:
        """h and h' must vanish on [0, a] and for t >= T."""
        if self.scale != 0 and (self.lo < a - 1e-12 or self.hi > T + 1e-12):
            raise BoundaryConditionError("bump support must lie inside [a, T]")
        if self.scale != 0 and self.power < 2:
            raise BoundaryConditionError("power must be >= 2 so that h' vanishes at the ends")


@dataclass
class RecoveryResult:
    epsilon: float
    s: np.ndarray
    estimate: np.ndarray
    h_prime: np.ndarray
    sup_error_per_path: np.ndarray

    @property
    def sup_error(self) -> float:
        """Ensemble average of the per-path sup-error."""
        return float(np.mean(self.sup_error_per_path))


def signal_recover(
    h: PolynomialBump,
    epsilon: float,
    noise: BridgeProcess,
    s_values: Sequence[float] | None = None,
    cap: float = RECOVERY_CAP,
) -> RecoveryResult:
    """Estimate h' from ``G = h + eps f`` via ``Psi_G(1/eps, s)``.

    The stochastic integral is taken directly against ``dG = dh + eps df``.
    """
    if epsilon <= 0:
        raise RieszLPError("epsilon must be positive")
    x = 1.0 / epsilon
    if x > cap:
        raise StabilityCapError(f"1/eps = {x:g} exceeds the cap {cap:g}; use a larger epsilon or raise the cap")
    h.validate(noise.a, noise.T)
    grid = noise.grid
    hv = h(grid.nodes)[:, None]
    dG = np.diff(hv, axis=0) + epsilon * noise.df
    G = Process(grid, hv + epsilon * noise.f, dG)
    if s_values is None:
        idx = np.arange(1, grid.n_nodes)
    else:
        idx = np.array([grid.index_of(si, snap=True) for si in s_values])
    est = psi_field(G, x, idx)
    s = grid.nodes[idx]
    hp = h.derivative(s)
    err = np.max(np.abs(est - hp[:, None]), axis=0)
    return RecoveryResult(epsilon, s, est, hp, err)
