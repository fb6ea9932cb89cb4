"""Set algebras and finitely additive measures.

Two ground sets are supported:

* the positive integers with the algebra of finite or cofinite sets and the
  dyadic measure ``mu(A) = sum 2^-i`` (finite A) or ``2 - sum_{A^c} 2^-i``
  (cofinite A), together with its outer measure on arbitrary subsets;
* finite families of cells with nonnegative weights, of which the uniform
  grid over an interval is the main case.

Dyadic sums are accumulated as exact rationals and rounded once at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import IllDescribedTailError, MisalignedSetError, NotInAlgebraError

__all__ = [
    "FinCofinSet",
    "NSubset",
    "DyadicMeasure",
    "CellMeasure",
    "GridMeasure",
    "dyadic_measure",
    "dyadic_measure_exact",
    "outer_measure",
    "outer_measure_exact",
    "symmetric_difference_measure",
    "grid_measure",
    "initial_segment",
]


def _dyadic_sum(indices: Iterable[int]) -> Fraction:
    return sum((Fraction(1, 2 ** i) for i in indices), Fraction(0))


@dataclass(frozen=True)
class FinCofinSet:
    """A finite or cofinite subset of the positive integers.

    ``basis`` is the set itself when ``cofinite`` is False and its complement
    otherwise.
    """

    basis: frozenset = frozenset()
    cofinite: bool = False

    def __post_init__(self):
        basis = frozenset(int(i) for i in self.basis)
        if any(i < 1 for i in basis):
            raise ValueError("elements must be positive integers")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "FinCofinSet":
        return cls(frozenset(elements), False)

    @classmethod
    def co(cls, excluded: Iterable[int]) -> "FinCofinSet":
        return cls(frozenset(excluded), True)

    @classmethod
    def empty(cls) -> "FinCofinSet":
        return cls(frozenset(), False)

    @classmethod
    def everything(cls) -> "FinCofinSet":
        return cls(frozenset(), True)

    @property
    def is_finite(self) -> bool:
        return not self.cofinite

    def is_empty(self) -> bool:
        return not self.cofinite and not self.basis

    def __contains__(self, n: int) -> bool:
        return (n in self.basis) != self.cofinite

    def complement(self) -> "FinCofinSet":
        return FinCofinSet(self.basis, not self.cofinite)

    def union(self, other: "FinCofinSet") -> "FinCofinSet":
        if not self.cofinite and not other.cofinite:
            return FinCofinSet(self.basis | other.basis, False)
        if self.cofinite and other.cofinite:
            return FinCofinSet(self.basis & other.basis, True)
        fin, cof = (self, other) if other.cofinite else (other, self)
        return FinCofinSet(cof.basis - fin.basis, True)

    def intersection(self, other: "FinCofinSet") -> "FinCofinSet":
        return self.complement().union(other.complement()).complement()

    def difference(self, other: "FinCofinSet") -> "FinCofinSet":
        return self.intersection(other.complement())

    def symmetric_difference(self, other: "FinCofinSet") -> "FinCofinSet":
        return self.difference(other).union(other.difference(self))

    def issubset(self, other: "FinCofinSet") -> bool:
        return self.difference(other).is_empty()

    def max_relevant(self) -> int:
        """Largest integer whose membership differs from the tail (0 if none)."""
        return max(self.basis, default=0)

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __xor__ = symmetric_difference


def initial_segment(n: int) -> FinCofinSet:
    """``A_n = {1, ..., n}``."""
    return FinCofinSet.finite(range(1, n + 1))


@dataclass(frozen=True)
class NSubset:
    """An arbitrary subset of the positive integers, described exactly.

    Membership of n <= ``bound`` is given by ``contains``; past the bound,
    membership repeats ``tail`` periodically (a one-element tail means the set
    is eventually constant).
    """

    contains: Callable[[int], bool]
    bound: int
    tail: tuple = (False,)

    def __post_init__(self):
        if int(self.bound) != self.bound or self.bound < 0:
            raise IllDescribedTailError("bound must be a nonnegative integer")
        if len(self.tail) == 0:
            raise IllDescribedTailError("tail pattern must be nonempty")
        object.__setattr__(self, "tail", tuple(bool(b) for b in self.tail))

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "NSubset":
        s = frozenset(elements)
        return cls(s.__contains__, max(s, default=0), (False,))

    @classmethod
    def cofinite(cls, excluded: Iterable[int]) -> "NSubset":
        s = frozenset(excluded)
        return cls(lambda n: n not in s, max(s, default=0), (True,))

    @classmethod
    def periodic(cls, residues: Iterable[int], period: int) -> "NSubset":
        """``{n >= 1 : n mod period in residues}``."""
        if period < 1:
            raise IllDescribedTailError("period must be positive")
        r = frozenset(int(x) % period for x in residues)
        pattern = tuple(((k + 1) % period) in r for k in range(period))
        return cls(lambda n: n % period in r, 0, pattern)

    def __contains__(self, n: int) -> bool:
        if n <= self.bound:
            return bool(self.contains(n))
        return self.tail[(n - self.bound - 1) % len(self.tail)]

    def head(self) -> list[int]:
        return [n for n in range(1, self.bound + 1) if self.contains(n)]

    @property
    def is_finite(self) -> bool:
        return not any(self.tail)

    @property
    def is_cofinite(self) -> bool:
        return all(self.tail)

    def to_algebra(self) -> FinCofinSet:
        if self.is_finite:
            return FinCofinSet.finite(self.head())
        if self.is_cofinite:
            return FinCofinSet.co(n for n in range(1, self.bound + 1) if not self.contains(n))
        raise NotInAlgebraError("set is infinite with infinite complement")

    def dyadic_mass_exact(self) -> Fraction:
        """``sum_{i in B} 2^-i`` in closed form."""
        head = _dyadic_sum(self.head())
        period = len(self.tail)
        block = _dyadic_sum(self.bound + 1 + k for k, b in enumerate(self.tail) if b)
        return head + block / (1 - Fraction(1, 2 ** period))

    def members(self, upto: int) -> list[int]:
        return [n for n in range(1, upto + 1) if n in self]


def dyadic_measure_exact(A: FinCofinSet | NSubset) -> Fraction:
    if isinstance(A, NSubset):
        A = A.to_algebra()
    if A.is_finite:
        return _dyadic_sum(A.basis)
    return 2 - _dyadic_sum(A.basis)


def dyadic_measure(A: FinCofinSet | NSubset) -> float:
    """The dyadic finite/cofinite measure; raises NotInAlgebraError otherwise."""
    return float(dyadic_measure_exact(A))


def outer_measure_exact(B: NSubset | FinCofinSet) -> Fraction:
    """``mu*(B) = inf{mu(A) : A in algebra, A >= B}``.

    A finite B is its own best cover.  An infinite B is covered only by
    cofinite sets, and the infimum of ``2 - sum_{A^c} 2^-i`` over finite
    ``A^c`` inside ``B^c`` equals ``1 + sum_{i in B} 2^-i``.
    """
    if isinstance(B, FinCofinSet):
        return dyadic_measure_exact(B)
    mass = B.dyadic_mass_exact()
    if B.is_finite:
        return mass
    return 1 + mass


def outer_measure(B: NSubset | FinCofinSet) -> float:
    return float(outer_measure_exact(B))


def symmetric_difference_measure(A: FinCofinSet, B: FinCofinSet) -> float:
    return dyadic_measure(A ^ B)


class DyadicMeasure:
    """The dyadic measure viewed as a measure space for simple functions.

    Sets are FinCofinSet instances.  Any finite family of sets is refined
    exactly by the atoms ``{1}, ..., {K}`` and ``{n > K}``.
    """

    def measure(self, A: FinCofinSet) -> float:
        return dyadic_measure(A)

    def full(self) -> FinCofinSet:
        return FinCofinSet.everything()

    def empty(self) -> FinCofinSet:
        return FinCofinSet.empty()

    def union(self, A, B):
        return A | B

    def intersection(self, A, B):
        return A & B

    def complement(self, A):
        return A.complement()

    def is_empty(self, A) -> bool:
        return A.is_empty()

    def refine(self, sets: Sequence[FinCofinSet]) -> tuple[list[FinCofinSet], np.ndarray]:
        K = max((s.max_relevant() for s in sets), default=0)
        atoms = [FinCofinSet.finite([i]) for i in range(1, K + 1)]
        atoms.append(FinCofinSet.co(range(1, K + 1)))
        weights = np.array([float(dyadic_measure_exact(a)) for a in atoms])
        return atoms, weights

    def atom_in(self, atom: FinCofinSet, A: FinCofinSet) -> bool:
        return atom.issubset(A)

    def __repr__(self):
        return "DyadicMeasure()"


class CellMeasure:
    """A finite ground set of cells ``0..n-1`` with nonnegative weights.

    Sets are frozensets of cell indices.
    """

    def __init__(self, weights: Sequence[float]):
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.size == 0 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("cell weights must be finite and nonnegative")
        w.setflags(write=False)
        self.weights = w

    @property
    def n_cells(self) -> int:
        return self.weights.size

    @property
    def total(self) -> float:
        return float(math.fsum(self.weights))

    def measure(self, A: Iterable[int]) -> float:
        idx = self._indices(A)
        return float(math.fsum(self.weights[idx])) if idx.size else 0.0

    def mask_measure(self, mask: np.ndarray) -> np.ndarray:
        """Measure of boolean cell masks (last axis indexes cells)."""
        return mask @ self.weights

    def _indices(self, A) -> np.ndarray:
        idx = np.fromiter((int(i) for i in A), dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n_cells):
            raise MisalignedSetError("cell index out of range")
        return idx

    def full(self) -> frozenset:
        return frozenset(range(self.n_cells))

    def empty(self) -> frozenset:
        return frozenset()

    def union(self, A, B):
        return frozenset(A) | frozenset(B)

    def intersection(self, A, B):
        return frozenset(A) & frozenset(B)

    def complement(self, A):
        return self.full() - frozenset(A)

    def is_empty(self, A) -> bool:
        return len(A) == 0

    def refine(self, sets) -> tuple[list[frozenset], np.ndarray]:
        return [frozenset([i]) for i in range(self.n_cells)], np.array(self.weights)

    def atom_in(self, atom, A) -> bool:
        return atom <= frozenset(A)

    def __repr__(self):
        return f"CellMeasure(n_cells={self.n_cells}, total={self.total:g})"


class GridMeasure(CellMeasure):
    """Uniform grid on ``[lo, hi]``: ``n_cells`` cells of equal weight.

    The default total mass is ``hi - lo`` (Lebesgue measure);
    :meth:`normalized` gives the probability version.
    """

    def __init__(self, lo: float, hi: float, n_cells: int, mass: float | None = None):
        if not hi > lo:
            raise ValueError("need lo < hi")
        if n_cells < 1:
            raise ValueError("need at least one cell")
        self.lo = float(lo)
        self.hi = float(hi)
        self.mass = float(hi - lo) if mass is None else float(mass)
        super().__init__(np.full(int(n_cells), self.mass / n_cells))

    @property
    def cell_width(self) -> float:
        return (self.hi - self.lo) / self.n_cells

    @property
    def cell_weight(self) -> float:
        return self.mass / self.n_cells

    @property
    def is_probability(self) -> bool:
        return abs(self.mass - 1.0) <= 1e-12

    def normalized(self) -> "GridMeasure":
        return GridMeasure(self.lo, self.hi, self.n_cells, mass=1.0)

    def midpoints(self) -> np.ndarray:
        return self.lo + (np.arange(self.n_cells) + 0.5) * self.cell_width

    def nodes(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n_cells + 1)

    def trapezoid_weights(self) -> np.ndarray:
        """Node weights integrating piecewise-linear data against this measure."""
        w = np.full(self.n_cells + 1, self.cell_weight)
        w[0] = w[-1] = self.cell_weight / 2
        return w

    def cells_of_interval(self, a: float, b: float) -> frozenset:
        """Cells making up ``[a, b]``; the endpoints must fall on cell boundaries."""
        pos = []
        for x in (a, b):
            k = (x - self.lo) / self.cell_width
            kr = round(k)
            if abs(k - kr) > 1e-9 or kr < 0 or kr > self.n_cells:
                raise MisalignedSetError(f"{x} is not a cell boundary of {self!r}")
            pos.append(int(kr))
        if pos[0] > pos[1]:
            raise MisalignedSetError("interval endpoints out of order")
        return frozenset(range(pos[0], pos[1]))

    def __repr__(self):
        return f"GridMeasure([{self.lo:g}, {self.hi:g}], n_cells={self.n_cells}, mass={self.mass:g})"


def grid_measure(cells, m: GridMeasure) -> float:
    """Measure of a union of whole grid cells.

    ``cells`` is an interval ``(a, b)``, a list of intervals, or an iterable
    of cell indices.
    """
    if isinstance(cells, tuple) and len(cells) == 2 and any(isinstance(c, float) for c in cells):
        return m.measure(m.cells_of_interval(*cells))
    cells = list(cells)
    if cells and all(isinstance(c, tuple) for c in cells):
        idx: frozenset = frozenset()
        for a, b in cells:
            idx |= m.cells_of_interval(a, b)
        return m.measure(idx)
    for c in cells:
        if isinstance(c, float) and not float(c).is_integer():
            raise MisalignedSetError(f"{c} is not a cell index")
    return m.measure(int(c) for c in set(cells))
