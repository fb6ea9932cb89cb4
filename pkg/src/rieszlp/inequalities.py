"""Convexity tools and integral inequalities for lattice-valued grid functions.

A :class:`GridFunction` samples ``f : [a, b] -> R^dim`` at equally spaced
nodes.  Integrals use node weights of a :class:`~rieszlp.measure.GridMeasure`
on the same grid (trapezoid by default, Simpson on request).  Both rules
have positive weights that are symmetric about the midpoint, so each
inequality also holds exactly for the discrete measure; a failure beyond
rounding is a genuine violation, not quadrature noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .convergence import Verdict
from .errors import AsymmetricWeightError, NonConvexError, NotProbabilityError
from .lattice import as_array, m_norm
from .lpspace import SimpleFunction, refine_family

__all__ = [
    "GridFunction",
    "Modulus",
    "ConvexityWitness",
    "uniform_continuity_modulus",
    "finite_diff_derivative",
    "midpoint_convexity_check",
    "support_line",
    "chord_line",
    "node_weights",
    "jensen_check",
    "hermite_hadamard_check",
    "fejer_check",
    "schwartz_check",
    "lagrange_discriminant",
    "random_convex_polynomial",
    "random_simple_pair",
]


class GridFunction:
    """Values of a lattice-valued function at the nodes of a uniform grid."""

    def __init__(self, lo: float, hi: float, values):
        if not hi > lo:
            raise ValueError("need lo < hi")
        v = np.asarray(as_array(values), dtype=float)
        v = v[:, None] if v.ndim == 1 else v
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError("need at least two nodes")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        self.lo, self.hi, self.values = float(lo), float(hi), v

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n_nodes: int) -> "GridFunction":
        t = np.linspace(lo, hi, n_nodes)
        return cls(lo, hi, fn(t))

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n_nodes - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_nodes)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def at(self, t: float) -> np.ndarray:
        """Piecewise-linear interpolation at t."""
        return np.array([np.interp(t, self.nodes, self.values[:, j]) for j in range(self.dim)])

    def apply(self, phi: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return GridFunction(self.lo, self.hi, phi(self.values))


@dataclass(frozen=True)
class Modulus:
    """``|f(t1) - f(t2)| <= sigma_p u`` whenever ``|t1 - t2| <= delta_p``."""

    delta: np.ndarray
    sigma: np.ndarray
    u: np.ndarray

    def holds_on(self, f: GridFunction, tol: float = 1e-12) -> bool:
        """Brute-force re-verification over every node pair."""
        t, v = f.nodes, f.values
        dist = np.abs(t[:, None] - t[None, :])
        gap = np.abs(v[:, None, :] - v[None, :, :])
        for d, s in zip(self.delta, self.sigma):
            close = dist <= d * (1 + 1e-12)
            if np.any(gap[close] > s * self.u + tol):
                return False
        return True


@dataclass(frozen=True)
class ConvexityWitness:
    v: float
    beta: np.ndarray
    r: GridFunction
    r_star: GridFunction


def uniform_continuity_modulus(f: GridFunction, depth: int | None = None) -> Modulus:
    """``delta_p = (b - a)/2^p`` and ``sigma_p`` = largest gap within delta_p.

    Levels stop once delta_p drops below the node spacing.
    """
    n = f.n_nodes
    depth = int(np.floor(np.log2(n - 1))) if depth is None else depth
    delta = (f.hi - f.lo) / 2.0 ** np.arange(1, depth + 1)
    lag_gap = np.zeros((n, f.dim))
    for k in range(1, n):
        lag_gap[k] = np.max(np.abs(f.values[k:] - f.values[:-k]), axis=0)
    cum = np.maximum.accumulate(lag_gap, axis=0)
    lags = np.floor(delta / f.h * (1 + 1e-12)).astype(int)
    sigma = cum[np.minimum(lags, n - 1)]
    mod = Modulus(delta, sigma, np.ones(f.dim))
    return mod


def finite_diff_derivative(f: GridFunction) -> GridFunction:
    """Central differences inside, second-order one-sided at the ends."""
    if f.n_nodes < 3:
        raise ValueError("need at least three nodes")
    return GridFunction(f.lo, f.hi, np.gradient(f.values, f.h, axis=0, edge_order=2))


def _scale(v: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(v))))


def midpoint_convexity_check(f: GridFunction, tol: float = 1e-12) -> Verdict:
    """``f((s+t)/2) <= (f(s) + f(t))/2`` over node pairs with a node midpoint."""
    v = f.values
    n = f.n_nodes
    thr = tol * _scale(v)
    for gap in range(2, n, 2):
        i = np.arange(0, n - gap)
        j = i + gap
        m = i + gap // 2
        excess = v[m] - 0.5 * (v[i] + v[j])
        bad = np.any(excess > thr, axis=1)
        if bad.any():
            k = int(np.argmax(bad))
            t = f.nodes
            return Verdict(False, n, witness={"triple": (float(t[i[k]]), float(t[m[k]]), float(t[j[k]])),
                                              "excess": excess[k].tolist()})
    return Verdict(True, n)


def chord_line(f: GridFunction) -> tuple[GridFunction, Verdict]:
    """``r*(t) = f(a) + (f(b) - f(a))(t - a)/(b - a)`` and the check ``f <= r*``."""
    t = f.nodes
    lam = ((t - f.lo) / (f.hi - f.lo))[:, None]
    r = f.values[0] + (f.values[-1] - f.values[0]) * lam
    excess = f.values - r
    thr = 1e-12 * _scale(f.values)
    g = GridFunction(f.lo, f.hi, r)
    if np.any(excess > thr):
        k = int(np.argmax(np.any(excess > thr, axis=1)))
        return g, Verdict(False, f.n_nodes, witness={"t": float(t[k]), "excess": excess[k].tolist()})
    return g, Verdict(True, f.n_nodes)


def support_line(f: GridFunction, v: float, tol: float = 1e-9) -> ConvexityWitness:
    """Support line at the node v with slope from central differences.

    Raises NonConvexError when f dips below ``r(t) = f(v) + beta (t - v)``
    by more than tol (relative to the size of f).
    """
    k = int(round((v - f.lo) / f.h))
    if k < 0 or k >= f.n_nodes or abs(f.lo + k * f.h - v) > 1e-9 * max(1.0, abs(v)):
        raise ValueError(f"{v} is not a node")
    beta = finite_diff_derivative(f).values[k] if f.n_nodes >= 3 else (f.values[1] - f.values[0]) / f.h
    t = f.nodes
    r = f.values[k] + beta * (t - t[k])[:, None]
    gap = r - f.values
    if np.any(gap > tol * _scale(f.values)):
        i = int(np.argmax(np.any(gap > tol * _scale(f.values), axis=1)))
        raise NonConvexError(f"f lies below its support line at t={t[i]:g} by {gap[i].max():.3g}")
    chord, _ = chord_line(f)
    return ConvexityWitness(float(t[k]), beta, GridFunction(f.lo, f.hi, r), chord)


def node_weights(f: GridFunction, mu=None, rule: str = "trapezoid") -> np.ndarray:
    """Quadrature weights on f's nodes for the grid measure mu."""
    n_cells = f.n_nodes - 1
    if mu is not None:
        if mu.n_cells != n_cells or abs(mu.lo - f.lo) > 1e-12 or abs(mu.hi - f.hi) > 1e-12:
            raise ValueError("measure grid does not match the function grid")
        mass = mu.mass
    else:
        mass = f.hi - f.lo
    if rule == "trapezoid":
        w = np.full(f.n_nodes, 1.0)
        w[0] = w[-1] = 0.5
        w /= n_cells
    elif rule == "simpson":
        if n_cells % 2:
            raise ValueError("Simpson's rule needs an even number of cells")
        w = np.ones(f.n_nodes)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w /= 3.0 * n_cells
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return w * mass


def _convex_on_range(phi, lo: float, hi: float, n: int = 257) -> Verdict:
    if hi <= lo:
        hi = lo + 1.0
    return midpoint_convexity_check(GridFunction(lo, hi, phi(np.linspace(lo, hi, n))), tol=1e-10)


def _leq(lhs, rhs, tol):
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return bool(np.all(lhs <= rhs + tol * np.maximum(1.0, np.abs(rhs))))


def jensen_check(f: GridFunction, phi: Callable[[np.ndarray], np.ndarray], mu, rule: str = "trapezoid",
                 tol: float = 1e-9) -> Verdict:
    """``phi(int f dmu) <= int phi(f) dmu`` entrywise for a probability mu.

    phi acts coordinatewise and is midpoint-checked on the range of f.  The
    modulus of ``phi o f`` is returned in the details.
    """
    if not mu.is_probability:
        raise NotProbabilityError(f"total mass {mu.mass:g} is not 1")
    lo, hi = float(f.values.min()), float(f.values.max())
    cv = _convex_on_range(phi, lo, hi)
    if not cv:
        raise NonConvexError(f"phi is not convex on the range of f: {cv.witness}")
    w = node_weights(f, mu, rule)
    lhs = phi(w @ f.values)
    rhs = w @ phi(f.values)
    mod = uniform_continuity_modulus(f.apply(phi))
    details = {"lhs": lhs, "rhs": rhs, "composite_modulus": mod}
    if _leq(lhs, rhs, tol) and np.all(np.isfinite(mod.sigma)):
        return Verdict(True, f.n_nodes, details=details)
    return Verdict(False, f.n_nodes, witness={"lhs": lhs.tolist(), "rhs": rhs.tolist()}, details=details)


def hermite_hadamard_check(f: GridFunction, mu=None, rule: str = "trapezoid", tol: float = 1e-9) -> Verdict:
    """``f(mid) <= (1/mu[a,b]) int f dmu <= (f(a) + f(b))/2`` entrywise.

    For Lebesgue measure the normalization is ``1/(b - a)``.
    """
    cv = midpoint_convexity_check(f)
    if not cv:
        raise NonConvexError(f"f is not convex: {cv.witness}")
    w = node_weights(f, mu, rule)
    left = f.at(f.midpoint)
    mid = (w @ f.values) / w.sum()
    right = 0.5 * (f.values[0] + f.values[-1])
    details = {"left": left, "middle": mid, "right": right}
    if _leq(left, mid, tol) and _leq(mid, right, tol):
        return Verdict(True, f.n_nodes, details=details)
    return Verdict(False, f.n_nodes, witness=details, details=details)


def fejer_check(f: GridFunction, weight: GridFunction, mu=None, rule: str = "trapezoid", tol: float = 1e-9,
                sym_tol: float = 1e-12) -> Verdict:
    """Weighted Hermite-Hadamard for a symmetric nonnegative weight.

    ``f(mid) int w <= int f w <= ((f(a) + f(b))/2) int w`` entrywise, plus
    the moment identity ``mid * int w = int t w(t)``.
    """
    wv = weight.values[:, 0]
    if weight.n_nodes != f.n_nodes or weight.lo != f.lo or weight.hi != f.hi:
        raise ValueError("weight and f must share a grid")
    if np.any(wv < 0):
        raise ValueError("weight must be nonnegative")
    if np.any(np.abs(wv - wv[::-1]) > sym_tol * max(1.0, float(np.max(np.abs(wv))))):
        k = int(np.argmax(np.abs(wv - wv[::-1])))
        raise AsymmetricWeightError(f"weight is not symmetric at t={f.nodes[k]:g}")
    cv = midpoint_convexity_check(f)
    if not cv:
        raise NonConvexError(f"f is not convex: {cv.witness}")
    q = node_weights(f, mu, rule)
    W = float(q @ wv)
    I = (q * wv) @ f.values
    left = f.at(f.midpoint) * W
    right = 0.5 * (f.values[0] + f.values[-1]) * W
    moment_lhs = f.midpoint * W
    moment_rhs = float((q * wv) @ f.nodes)
    details = {"left": left, "middle": I, "right": right, "moment": (moment_lhs, moment_rhs)}
    ok = _leq(left, I, tol) and _leq(I, right, tol) and abs(moment_lhs - moment_rhs) <= tol * max(1.0, abs(moment_lhs))
    if ok:
        return Verdict(True, f.n_nodes, details=details)
    return Verdict(False, f.n_nodes, witness=details, details=details)


def lagrange_discriminant(c: np.ndarray, d: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``sum_{i<j} (c_i d_j - c_j d_i)^2 w_i w_j`` per entry, by direct pair loops."""
    n = len(w)
    out = np.zeros(c.shape[1])
    for i in range(n):
        for j in range(i + 1, n):
            out += (c[i] * d[j] - c[j] * d[i]) ** 2 * w[i] * w[j]
    return out


def schwartz_check(f: SimpleFunction, g: SimpleFunction, e=None, tol: float = 1e-9) -> Verdict:
    """Cauchy-Schwarz for simple functions, with its two textbook certificates.

    Checks ``(int |fg|)^2 <= (int f^2)(int g^2)`` entrywise and
    ``sqrt(||(int |fg|)^2||_e) <= ||f||_2 ||g||_2``.  The product is rebuilt
    by polarization ``fg = ((f+g)^2 - f^2 - g^2)/2`` and compared with the
    direct product; the norm-product gap is compared with the pairwise
    discriminant sum.
    """
    _, mu, (c, d) = refine_family([f, g])
    w = mu.weights
    dim = c.shape[1]
    e = np.ones(dim) if e is None else np.asarray(as_array(e))
    prod = c * d
    polar = 0.5 * ((c + d) ** 2 - c ** 2 - d ** 2)
    polar_err = float(np.max(np.abs(polar - prod))) if prod.size else 0.0
    A, B = w @ c ** 2, w @ d ** 2
    abs_fg = w @ np.abs(prod)
    fg = w @ prod
    norm_lhs = np.sqrt(m_norm(abs_fg ** 2, e))
    norm_rhs = np.sqrt(m_norm(A, e)) * np.sqrt(m_norm(B, e))
    gap = A * B - fg ** 2
    disc = lagrange_discriminant(c, d, w)
    disc_abs = lagrange_discriminant(np.abs(c), np.abs(d), w)
    details = {"abs_fg": abs_fg, "f2": A, "g2": B, "norm": (norm_lhs, norm_rhs), "gap": gap,
               "discriminant": disc, "polarization_error": polar_err}
    scale = max(1.0, float(np.max(np.abs(A * B))) if A.size else 1.0)
    checks = {
        "integral": _leq(abs_fg ** 2, A * B, tol),
        "norm": norm_lhs <= norm_rhs + tol * max(1.0, norm_rhs),
        "polarization": polar_err <= tol * max(1.0, float(np.max(np.abs(prod))) if prod.size else 1.0),
        "discriminant_nonneg": bool(np.all(disc >= 0)),
        "discriminant_matches_gap": bool(np.all(np.abs(disc - gap) <= tol * scale)),
        "abs_discriminant_matches": bool(np.all(np.abs(disc_abs - (A * B - abs_fg ** 2)) <= tol * scale)),
    }
    details["checks"] = checks
    if all(checks.values()):
        return Verdict(True, len(w), details=details)
    return Verdict(False, len(w), witness=[k for k, v in checks.items() if not v], details=details)


def random_convex_polynomial(rng: np.random.Generator, dim: int = 1, max_degree: int = 4, lo: float = -1.0,
                             hi: float = 1.0, n_nodes: int = 201, max_tries: int = 1000) -> GridFunction:
    """A lattice-valued convex polynomial on ``[lo, hi]``, one per coordinate.

    Each coordinate is an even-degree polynomial with nonnegative leading
    coefficient; coefficients come from ``[-1, 1]`` and draws failing the
    midpoint check are rejected.
    """
    t = np.linspace(lo, hi, n_nodes)
    cols = []
    for _ in range(dim):
        for _ in range(max_tries):
            deg = 2 * int(rng.integers(0, max_degree // 2 + 1))
            coef = rng.uniform(-1, 1, deg + 1)
            if deg:
                coef[-1] = abs(coef[-1])
            col = np.polynomial.polynomial.polyval(t, coef)
            if midpoint_convexity_check(GridFunction(lo, hi, col)):
                cols.append(col)
                break
        else:
            raise RuntimeError("no convex draw accepted")
    return GridFunction(lo, hi, np.column_stack(cols))


def random_simple_pair(rng: np.random.Generator, mu, dim: int = 1, max_parts: int = 8) -> tuple[SimpleFunction, SimpleFunction]:
    """Two simple functions over random partitions of mu's cells."""
    out = []
    for _ in range(2):
        k = int(rng.integers(1, min(max_parts, mu.n_cells) + 1))
        labels = rng.integers(0, k, mu.n_cells)
        parts = [(set(np.flatnonzero(labels == j).tolist()), rng.uniform(-2, 2, dim)) for j in range(k)]
        out.append(SimpleFunction([(A, v) for A, v in parts if A], mu, dim))
    return out[0], out[1]
