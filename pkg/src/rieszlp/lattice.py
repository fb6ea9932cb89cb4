"""Finite-dimensional vector lattice C(Omega) with an order unit.

An element of the lattice is a tuple of reals indexed by the points of a
finite set Omega.  Order, lattice operations and the f-algebra product are
all pointwise, so every statement about the abstract lattice reduces to a
statement about finitely many real numbers.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

from .errors import DimensionError

__all__ = [
    "LatticeElement",
    "OrderUnit",
    "as_array",
    "join_meet_abs",
    "mul",
    "power",
    "m_norm",
    "unit",
    "zero",
]

ArrayLike = Union["LatticeElement", np.ndarray, Iterable[float], float]


class LatticeElement:
    """An immutable element of C(Omega) for a finite Omega.

    Arithmetic operators act pointwise.  Comparisons implement the lattice
    (partial) order: ``x <= y`` is true iff every entry of x is at most the
    matching entry of y.
    """

    __slots__ = ("_v",)

    def __init__(self, values: ArrayLike):
        v = np.array(as_array(values), dtype=float).reshape(-1)
        if v.size == 0:
            raise ValueError("a lattice element needs at least one entry")
        if not np.all(np.isfinite(v)):
            raise ValueError("lattice entries must be finite reals")
        v.setflags(write=False)
        self._v = v

    @property
    def values(self) -> np.ndarray:
        return self._v

    @property
    def dim(self) -> int:
        return self._v.size

    def __len__(self) -> int:
        return self._v.size

    def __iter__(self):
        return iter(self._v.tolist())

    def __repr__(self) -> str:
        return f"LatticeElement({tuple(self._v.tolist())})"

    def __hash__(self):
        return hash(self._v.tobytes())

    def _other(self, other) -> np.ndarray:
        if isinstance(other, LatticeElement):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other._v
        if np.isscalar(other):
            return np.full(self.dim, float(other))
        arr = np.asarray(other, dtype=float).reshape(-1)
        if arr.size != self.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {arr.size}")
        return arr

    def __add__(self, other):
        return LatticeElement(self._v + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return LatticeElement(self._v - self._other(other))

    def __rsub__(self, other):
        return LatticeElement(self._other(other) - self._v)

    def __mul__(self, other):
        return LatticeElement(self._v * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return LatticeElement(self._v / self._other(other))

    def __neg__(self):
        return LatticeElement(-self._v)

    def __abs__(self):
        return LatticeElement(np.abs(self._v))

    def __eq__(self, other):
        if not isinstance(other, LatticeElement):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._v, other._v))

    def __le__(self, other):
        return bool(np.all(self._v <= self._other(other)))

    def __ge__(self, other):
        return bool(np.all(self._v >= self._other(other)))

    def __lt__(self, other):
        return self <= other and not self == other

    def __gt__(self, other):
        return self >= other and not self == other

    def join(self, other) -> "LatticeElement":
        return LatticeElement(np.maximum(self._v, self._other(other)))

    def meet(self, other) -> "LatticeElement":
        return LatticeElement(np.minimum(self._v, self._other(other)))

    def positive_part(self) -> "LatticeElement":
        return LatticeElement(np.maximum(self._v, 0.0))

    def is_positive(self) -> bool:
        return bool(np.all(self._v >= 0.0))

    def power(self, p: int) -> "LatticeElement":
        return power(self, p)


class OrderUnit(LatticeElement):
    """A lattice element with strictly positive entries.

    Every element x of matching dimension satisfies |x| <= c e with
    c = max |x| / e, which is what makes e an order unit.
    """

    __slots__ = ()

    def __init__(self, values: ArrayLike):
        super().__init__(values)
        if not np.all(self._v > 0):
            raise ValueError("an order unit must be strictly positive")

    def bound_constant(self, x: ArrayLike) -> float:
        """Smallest c >= 0 with |x| <= c e."""
        return float(np.max(np.abs(self._other(as_array(x))) / self._v))


def as_array(x: ArrayLike) -> np.ndarray:
    if isinstance(x, LatticeElement):
        return x.values
    return np.asarray(x, dtype=float)


def unit(dim: int) -> OrderUnit:
    """The default order unit: the all-ones tuple (idempotent, e*e = e)."""
    return OrderUnit(np.ones(dim))


def zero(dim: int) -> LatticeElement:
    return LatticeElement(np.zeros(dim))


def _pair(x: ArrayLike, y: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    a = as_array(x).reshape(-1)
    b = as_array(y).reshape(-1)
    if a.size != b.size:
        raise DimensionError(f"dimension mismatch: {a.size} vs {b.size}")
    return a, b


def join_meet_abs(x: ArrayLike, y: ArrayLike) -> tuple[LatticeElement, LatticeElement, LatticeElement]:
    """Return ``(x v y, x ^ y, |x|)`` with |x| = x v (-x)."""
    a, b = _pair(x, y)
    return (
        LatticeElement(np.maximum(a, b)),
        LatticeElement(np.minimum(a, b)),
        LatticeElement(np.maximum(a, -a)),
    )


def mul(x: ArrayLike, y: ArrayLike) -> LatticeElement:
    """f-algebra product (pointwise)."""
    a, b = _pair(x, y)
    return LatticeElement(a * b)


def power(x: ArrayLike, p: int) -> LatticeElement:
    """Pointwise p-th power for a positive integer p."""
    if int(p) != p or p < 1:
        raise ValueError("p must be a positive integer")
    return LatticeElement(as_array(x) ** int(p))


def m_norm(x: ArrayLike, e: ArrayLike | None = None) -> float:
    """M-norm ``inf{eps > 0 : |x| <= eps e}`` = max |x(w)| / e(w).

    Accepts a single element or a stacked array whose last axis indexes
    Omega; in the latter case the maximum runs over everything.
    """
    a = np.abs(as_array(x))
    if e is None:
        return float(np.max(a)) if a.size else 0.0
    ev = as_array(e).reshape(-1)
    if a.shape[-1] != ev.size:
        raise DimensionError(f"dimension mismatch: {a.shape[-1]} vs {ev.size}")
    return float(np.max(a / ev)) if a.size else 0.0
