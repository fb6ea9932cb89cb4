"""Reproducible test corpora shared by the verification suites and the tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .measure import CellMeasure, GridMeasure

__all__ = [
    "random_family",
    "classical_o_convergence",
    "VitaliInstance",
    "vitali_corpus",
    "spike_family",
]


def random_family(rng: np.random.Generator, horizon: int = 200, dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """A family ``x_1..x_horizon`` and a candidate limit, of a random kind.

    Kinds: harmonic decay, geometric decay, decay after a burn-in of junk,
    oscillation, decay too slow for ``e/n``, eventually constant.
    """
    limit = rng.uniform(-1, 1, dim)
    n = np.arange(1, horizon + 1)[:, None]
    kind = int(rng.integers(0, 6))
    sign = rng.choice([-1.0, 1.0], size=(horizon, dim))
    if kind == 0:
        X = limit + sign * rng.uniform(0, 1, dim) / n
    elif kind == 1:
        X = limit + sign * 0.5 ** n
    elif kind == 2:
        burn = int(rng.integers(1, horizon // 2))
        X = limit + sign * 0.5 / n
        X[:burn] = rng.uniform(-5, 5, (burn, dim))
    elif kind == 3:
        X = limit + (-1.0) ** n * rng.uniform(0.5, 1, dim)
    elif kind == 4:
        X = limit + sign / np.sqrt(n)
    else:
        X = np.repeat(rng.uniform(-1, 1, (1, dim)), horizon, axis=0)
        if rng.random() < 0.5:
            limit = X[0].copy()
    return X, limit


def classical_o_convergence(X: np.ndarray, limit: np.ndarray, sigma: np.ndarray) -> bool:
    """For each level p, find n0 with ``|x_n - x| <= sigma_p`` for all n0 <= n <= H."""
    H = X.shape[0]
    for s in sigma:
        found = False
        for n0 in range(H):
            if all(np.all(np.abs(X[n] - limit) <= s) for n in range(n0, H)):
                found = True
                break
        if not found:
            return False
    return True


@dataclass
class VitaliInstance:
    name: str
    family: Callable[[int], np.ndarray]
    mu: CellMeasure
    horizon: int
    hypotheses_expected: bool


def spike_family(horizon: int, base: float = 2.0, dim: int = 1) -> tuple[Callable[[int], np.ndarray], CellMeasure]:
    """``f_n = base^n 1_{B_n}`` with ``mu(B_n) = 2^-n``; base 2 is not equi-a.c."""
    mu = CellMeasure(2.0 ** -np.arange(1, horizon + 1))

    def f(n: int) -> np.ndarray:
        v = np.zeros((horizon, dim))
        v[n - 1] = base ** n
        return v

    return f, mu


def vitali_corpus(horizon: int = 128) -> list[VitaliInstance]:
    H = horizon
    cells = CellMeasure(1.0 / np.arange(1, H + 1))

    def shrinking(n):
        v = np.zeros((H, 2))
        v[n - 1] = 1.0
        return v

    grid = GridMeasure(0.0, 1.0, 32)

    def decaying(n):
        return np.full((32, 2), 1.0 / n)

    def zero(n):
        return np.zeros((32, 2))

    def travelling(n):
        v = np.zeros((32, 1))
        v[(n - 1) % 4 * 8:(n - 1) % 4 * 8 + 8] = 1.0
        return v

    linear, mu_lin = spike_family(H, 1.0)

    def linear_spike(n):
        v = linear(n)
        v[n - 1] = n
        return v

    spike, mu_spike = spike_family(min(H, 60))
    return [
        VitaliInstance("shrinking cells", shrinking, cells, H, True),
        VitaliInstance("uniform decay", decaying, grid, H, True),
        VitaliInstance("zero family", zero, grid, H, True),
        VitaliInstance("n on sets of measure 2^-n", linear_spike, mu_lin, H, True),
        VitaliInstance("travelling block", travelling, grid, H, False),
        VitaliInstance("2^n on sets of measure 2^-n", spike, mu_spike, min(H, 60), False),
    ]
