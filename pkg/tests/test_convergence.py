import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rieszlp import convergence as cv
from rieszlp.corpora import classical_o_convergence, random_family, spike_family, vitali_corpus
from rieszlp.errors import NotPositiveError, UndecidableTailError
from rieszlp.measure import CellMeasure, GridMeasure

COF = cv.FilterSpec.cofinite()


def test_verdict_failure_needs_witness():
    with pytest.raises(ValueError):
        cv.Verdict(False, 10)
    assert not cv.Verdict(False, 10, witness=3)


def test_cofinite_filter_examples():
    assert cv.filter_contains(COF, cv.IndexSet.tail_from(5), 100).holds
    v = cv.filter_contains(COF, cv.IndexSet.finite(range(1, 11)), 100)
    assert not v.holds and v.witness == 11


def test_cofinite_needs_declared_tail():
    with pytest.raises(UndecidableTailError):
        cv.filter_contains(COF, cv.IndexSet(lambda n: n % 2 == 0), 100)


def test_density_filter():
    non_squares = cv.IndexSet(lambda n: round(n ** 0.5) ** 2 != n, monotone_tail=True)
    assert cv.filter_contains(cv.FilterSpec.density(), non_squares, 10 ** 4).holds
    evens = cv.IndexSet(lambda n: n % 2 == 0, monotone_tail=True)
    assert not cv.filter_contains(cv.FilterSpec.density(), evens, 10 ** 4).holds


def test_explicit_filter():
    F = cv.FilterSpec.explicit([cv.IndexSet.tail_from(3), cv.IndexSet.finite(range(1, 50))])
    assert cv.filter_contains(F, cv.IndexSet.finite(range(3, 50)), 60).holds
    v = cv.filter_contains(F, cv.IndexSet.finite(range(4, 50)), 60)
    assert not v.holds and v.witness == 3


def test_product_filter_examples():
    FF = cv.FilterSpec.product(COF)
    v = cv.product_filter_contains(FF, lambda m, n: m >= 3 and n >= 3, 40)
    assert v.holds and v.details["rectangle"] == (3, 3)
    assert not cv.product_filter_contains(FF, lambda m, n: m == n, 40).holds
    assert cv.product_filter_contains(FF, lambda m, n: True, 40).holds


def test_o_sequence_validate_examples():
    assert cv.o_sequence_validate(cv.OSequenceSpec(lambda p: np.ones(2) / p, 100, 0.02)).holds
    v = cv.o_sequence_validate(cv.OSequenceSpec(lambda p: np.ones(2), 20, 0.5))
    assert not v.holds and "infimum_above_tol" in v.witness
    v = cv.o_sequence_validate(cv.OSequenceSpec(lambda p: np.ones(1) * (1.0 if p % 2 else 2.0) / p, 20, 0.5))
    assert v.witness == {"monotone_fails_at": 3}
    with pytest.raises(NotPositiveError):
        cv.o_sequence_validate(cv.OSequenceSpec(lambda p: np.zeros(1), 5, 0.5))


def test_of_convergence_examples():
    sigma = cv.OSequenceSpec(lambda p: np.ones(2) / p, 20, 0.06)
    e = np.ones(2)
    assert cv.of_convergence_check(lambda n: e / n, np.zeros(2), sigma, COF, 200).holds
    v = cv.of_convergence_check(lambda n: (-1.0) ** n * e, np.zeros(2), sigma, COF, 200)
    assert not v.holds and v.witness["level"] == 2


def test_of_convergence_density_matches_enumeration():
    H = 4000
    x = [np.ones(1) / n if n % 2 == 0 else np.ones(1) for n in range(1, H + 1)]
    sigma = cv.OSequenceSpec(lambda p: np.ones(1) / p, 20, 0.06)
    got = cv.of_convergence_check(x, np.zeros(1), sigma, cv.FilterSpec.density(), H).holds
    # the set {n : |x_n| <= 1/p} is the large evens plus nothing else: density 1/2
    dens = [np.mean([abs(x[n - 1][0]) <= 1 / p for n in range(1, H + 1)]) for p in range(1, 21)]
    assert got == all(d >= 1 - 1e-3 for d in dens)
    assert not got


def test_of_convergence_vs_classical(rng):
    sigma = cv.OSequenceSpec(lambda p: np.ones(2) / p, 20, 0.06)
    for _ in range(20):
        X, L = random_family(rng, 120)
        assert cv.of_convergence_check(X, L, sigma, COF, 120).holds == classical_o_convergence(X, L, sigma.levels())


def test_rf_convergence():
    eps = cv.OSequenceSpec.harmonic(20)
    u = np.array([1.0, 2.0])
    x = lambda n: u / (n + 1)  # noqa: E731
    assert cv.rf_convergence_check(x, np.zeros(2), u, eps, COF, 200).holds
    with pytest.raises(NotPositiveError):
        cv.rf_convergence_check(x, np.zeros(2), np.array([1.0, 0.0]), eps, COF, 200)


def test_uniform_convergence_check():
    eps = cv.OSequenceSpec.harmonic(10)
    t = np.linspace(0, 1, 11)
    assert cv.uniform_convergence_check(lambda z: t ** 2 + 1 / (z + 1), t ** 2, eps, COF, 100).holds
    assert not cv.uniform_convergence_check(lambda z: t ** z, np.zeros(11), eps, COF, 100).holds


def test_mu_convergence_examples():
    H = 128
    eps = cv.OSequenceSpec.geometric(6)
    sigma = cv.OSequenceSpec.geometric(6)
    cells = CellMeasure(1.0 / np.arange(1, H + 1))

    def shrinking(n):
        v = np.zeros((H, 1))
        v[n - 1] = 1.0
        return v

    assert cv.mu_convergence_check(shrinking, np.zeros((H, 1)), cells, eps, sigma, COF, H).holds
    grid = GridMeasure(0, 1, 16)
    v = cv.mu_convergence_check(lambda n: np.ones((16, 1)), np.zeros((16, 1)), grid, eps, sigma, COF, H)
    assert not v.holds
    fam, mu = spike_family(H, 1.0)

    def linear(n):
        f = fam(n)
        f[n - 1] = n
        return f

    v = cv.mu_convergence_check(linear, np.zeros((H, 1)), mu, eps, sigma, COF, H)
    assert v.holds
    assert v.details["exceptional_measure_at_horizon"][0] == 2.0 ** -H


def test_equi_ac_examples():
    grid = GridMeasure(0, 1, 16)
    rng = np.random.default_rng(0)
    rows = [rng.uniform(-1, 1, (16, 2)) for _ in range(30)]
    v = cv.equi_ac_check(rows, cv.iota_modular, 1.0, grid, horizon=30)
    assert v.holds and v.details["B"] == "G"
    fam, mu = spike_family(30)
    v = cv.equi_ac_check(fam, cv.iota_modular, 1.0, mu, horizon=30)
    assert not v.holds and v.witness["condition"] == "ac1"
    # iota(f_n 1_{B_n}) = e for every n
    assert all(cv.iota_modular(fam(n), mu)[0] == 1.0 for n in range(1, 31))
    assert cv.equi_ac_check([], cv.iota_modular, 1.0, grid).holds


def test_equi_ac_rejects_too_small_witness():
    grid = GridMeasure(0, 1, 8)
    fam = [np.ones((8, 1))] * 10
    v = cv.equi_ac_check(fam, cv.iota_modular, 1.0, grid, horizon=10)
    w = v.details["w"] * 0.25
    bad = cv.equi_ac_check(fam, cv.iota_modular, 1.0, grid, horizon=10, witnesses={"w": w})
    assert not bad.holds and "exceeds_w" in bad.witness


def test_small_set_bound_dominates_every_set(rng):
    mu = CellMeasure(rng.uniform(0.01, 0.3, 10))
    f = rng.normal(size=(10, 2))
    sig = np.array([0.05, 0.2, 0.5])
    bound = cv._small_set_sup(f, cv.iota_modular, mu, sig)
    for mask in range(1 << 10):
        cells = [c for c in range(10) if mask >> c & 1]
        m = mu.weights[cells].sum()
        val = np.abs(f[cells]).T @ mu.weights[cells]
        for k, s in enumerate(sig):
            if m <= s:
                assert np.all(val <= bound[k] + 1e-12)


def _samples(rng, n=6, cells=8):
    return [rng.normal(size=(cells, 2)) * rng.integers(0, 2, (cells, 1)) for _ in range(n)]


def test_iota_satisfies_axioms(rng):
    grid = GridMeasure(0, 1, 8)
    res = cv.modular_axioms_check(cv.iota_modular, grid, _samples(rng))
    assert set(res) == set(cv.AXIOMS)
    assert all(v.holds for v in res.values())


def test_shifted_modular_fails_rho0(rng):
    grid = GridMeasure(0, 1, 8)
    shifted = cv.ModularSpec(lambda f, mu: mu.weights @ np.abs(f) + 1.0)
    assert not cv.modular_axioms_check(shifted, grid, _samples(rng))["rho0"].holds


def test_rho2_counterexample():
    grid = GridMeasure(0, 1, 8)
    a = np.zeros((8, 1))
    a[:4] = 1.0
    b = np.zeros((8, 1))
    b[4:] = -1.0
    squared = cv.ModularSpec(lambda f, mu: (mu.weights @ np.abs(f)) ** 2)
    assert cv.modular_axioms_check(squared, grid, [a, b])["rho2"].holds
    cross = cv.ModularSpec(lambda f, mu: (mu.weights @ np.maximum(f, 0)) * (mu.weights @ np.maximum(-f, 0)))
    res = cv.modular_axioms_check(cross, grid, [a, b])
    assert res["rho0"].holds and res["rho1"].holds
    assert not res["rho2"].holds and res["rho2"].witness["pair"] in ((0, 1), (1, 0))


def test_vitali_examples():
    H = 128
    cells = CellMeasure(1.0 / np.arange(1, H + 1))

    def shrinking(n):
        v = np.zeros((H, 2))
        v[n - 1] = 1.0
        return v

    v = cv.vitali_conclusion_check(shrinking, cv.iota_modular, cells, COF, H)
    assert v.holds and v.details["alpha"] == 1.0
    fam, mu = spike_family(60)
    v = cv.vitali_conclusion_check(fam, cv.iota_modular, mu, COF, 60)
    assert v.status == "hypotheses not met"
    for k in range(11):
        alpha = 0.5 ** k
        vals = [cv.iota_modular(alpha * fam(n), mu)[0] for n in range(1, 61)]
        assert np.allclose(vals, alpha)
    grid = GridMeasure(0, 1, 8)
    assert cv.vitali_conclusion_check(lambda n: np.zeros((8, 1)), cv.iota_modular, grid, COF, 64).holds


def test_vitali_corpus():
    for inst in vitali_corpus():
        v = cv.vitali_conclusion_check(inst.family, cv.iota_modular, inst.mu, COF, inst.horizon)
        met = v.status != "hypotheses not met"
        assert met == inst.hypotheses_expected, inst.name
        if met:
            assert v.holds, inst.name


def test_cauchy_vitali():
    grid = GridMeasure(0, 1, 8)
    assert cv.cauchy_vitali_check(lambda n: np.full((8, 1), 1.0 / n ** 2), cv.iota_modular, grid, COF, 64).holds

    def travelling(n):
        v = np.zeros((8, 1))
        v[(n - 1) % 2 * 4:(n - 1) % 2 * 4 + 4] = 1.0
        return v

    assert cv.cauchy_vitali_check(travelling, cv.iota_modular, grid, COF, 64).status == "hypotheses not met"


def test_dominated_vitali():
    grid = GridMeasure(0, 1, 8)
    g = np.ones((8, 1))
    assert cv.dominated_vitali_check(lambda n: g / n ** 2, g, cv.iota_modular, grid, COF, 64).holds
    v = cv.dominated_vitali_check(lambda n: 2 * g, g, cv.iota_modular, grid, COF, 64)
    assert v.status == "hypotheses not met" and v.witness == {"domination_fails_at": 1}


@given(st.lists(st.booleans(), min_size=5, max_size=40), st.lists(st.booleans(), min_size=5, max_size=40))
def test_cofinite_filter_closed_under_intersection(a, b):
    A, B = cv.IndexSet.from_mask(a), cv.IndexSet.from_mask(b)
    both = cv.IndexSet(lambda n: n in A and n in B, max(A.bound, B.bound), A.tail and B.tail)
    ina, inb = cv.filter_contains(COF, A, 50).holds, cv.filter_contains(COF, B, 50).holds
    assert cv.filter_contains(COF, both, 50).holds == (ina and inb)


def test_of_convergence_density_ignores_sparse_exceptions():
    H = 10 ** 4
    x = [np.ones(1) if round(n ** 0.5) ** 2 == n else np.ones(1) / n for n in range(1, H + 1)]
    sigma = cv.OSequenceSpec(lambda p: np.ones(1) / p, 10, 0.11)
    assert cv.of_convergence_check(x, np.zeros(1), sigma, cv.FilterSpec.density(), H).holds
    with pytest.raises(UndecidableTailError):
        cv.filter_contains(COF, cv.IndexSet(lambda n: round(n ** 0.5) ** 2 != n), H)
