"""Acceptance suite: ten criteria at their stated tolerances.

Each test records one PASS/FAIL line; the lines are printed at the end of
the pytest run (see conftest.py) and when this file is run as a script.
"""

import sys
import warnings
from fractions import Fraction

import numpy as np
import pytest

from rieszlp import cli
from rieszlp import convergence as cv
from rieszlp import inequalities as iq
from rieszlp import lpspace as lp
from rieszlp import stochastic as sto
from rieszlp.corpora import classical_o_convergence, random_family, vitali_corpus
from rieszlp.measure import DyadicMeasure, GridMeasure, NSubset, dyadic_measure_exact, initial_segment, outer_measure_exact

SEED = 12345
A, T = 1.5, 3.0
RESULTS: dict[int, str] = {}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} | {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def bridge_ensemble(n_steps=1024, n_paths=64, seed=SEED):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return sto.bridge(sto.sample_bm(sto.TimeGrid(T, n_steps), n_paths, seed), A, T)


def test_criterion_01_moment_operator_oracles():
    xs = (1, 2, 5, 10, 50, 200)
    s = np.linspace(0.05, 3.0, 60)
    const_err, mono_err = 0.0, 0.0
    for x in xs:
        c = sto.phi_field(lambda t: np.full(np.shape(t), -1.25), x, s, n_quad=4096)
        const_err = max(const_err, float(np.max(np.abs(c + 1.25))))
        for k in (1, 2):
            got = sto.phi_field(lambda t, k=k: np.asarray(t) ** k, x, s, n_quad=4096)[:, 0]
            exact = x * s ** k / (x + k)
            mono_err = max(mono_err, float(np.max(np.abs(got / exact - 1))))
    ok = const_err <= 1e-12 and mono_err <= 1e-6
    record(1, "moment-operator oracles", ok, f"constant abs err {const_err:.2e} (tol 1e-12), monomial rel err {mono_err:.2e} (tol 1e-6)")


def test_criterion_02_uniform_convergence():
    fsq = bridge_ensemble().sampled.squared().column(0)
    xs = (5, 10, 20, 50)
    table = sto.uniform_convergence_scan(fsq, xs, fsq.grid.nodes[1:])
    decreasing = bool(np.all(np.diff(table) < 0))
    s = np.linspace(0.01, 1.0, 100)
    lin = sto.uniform_convergence_scan(lambda t: np.asarray(t), xs, s)
    lin_err = float(np.max(np.abs(lin - 1.0 / (np.array(xs) + 1))))
    ok = decreasing and lin_err <= 1e-9
    record(2, "uniform convergence", ok,
           f"bridge-squared sup table {np.round(table, 4).tolist()} strictly decreasing={decreasing}; f(t)=t table err {lin_err:.1e}")


def test_criterion_03_ode_residual():
    s = np.linspace(0.1, 2.9, 50)
    cases = [lambda t: np.full(np.shape(t), 2.0), lambda t: np.asarray(t), lambda t: np.asarray(t) ** 2]
    closed = max(float(np.max(np.abs(sto.ode_residual(f, x, s, 1e-3)))) for f in cases for x in (1.0, 10.0, 50.0))
    br = bridge_ensemble(1024, 1)
    fsq = br.sampled.squared()
    nodes = br.grid.nodes
    sv = nodes[(nodes > A + 0.1) & (nodes < T - 0.1)][::8]
    res = [float(np.max(np.abs(sto.ode_residual(fsq, 10.0, sv, br.grid.dt / 2 ** k)))) for k in range(1, 5)]
    ratios = np.array(res[:-1]) / np.array(res[1:])
    first_order = bool(np.all((ratios >= 1.5) & (ratios <= 2.5)))
    ok = closed <= 1e-8 and first_order
    record(3, "ODE residual", ok, f"closed-form max residual {closed:.1e} (tol 1e-8); bridge halving ratios {np.round(ratios, 3).tolist()}")


def test_criterion_04_phipsi_identity():
    x, s = 10.0, 0.875 * T
    h = sto.PolynomialBump(A, T)
    dp = sto.deterministic_process(sto.TimeGrid(T, 2 ** 14), h)
    _, nrm = sto.phipsi_residual(dp, x, s)
    rel = nrm / float(np.max(np.abs(sto.psi(dp, x, s).values)))
    fine = sto.sample_bm(sto.TimeGrid(T, 2 ** 14), 8, 777)
    res = [sto.phipsi_residual(sto.bridge(fine.subsample(2 ** n), A, T), x, s)[1] for n in range(10, 15)]
    monotone = all(r1 > r2 for r1, r2 in zip(res, res[1:]))
    ok = rel < 1e-3 and monotone
    record(4, "Phi-Psi identity", ok, f"deterministic relative residual {rel:.2e} (tol 1e-3); bridge residuals {[f'{r:.2e}' for r in res]}")


def test_criterion_05_sde_residual():
    x = 10.0
    h = sto.PolynomialBump(A, T)
    fine = sto.sample_bm(sto.TimeGrid(T, 2 ** 14), 8, 777)
    levels = range(8, 15)
    det = [sto.sde_residual(sto.deterministic_process(sto.TimeGrid(T, 2 ** n), h), x, (A, T))[1] for n in levels]
    sto_res = [sto.sde_residual(sto.bridge(fine.subsample(2 ** n), A, T), x, (A, T))[1] for n in levels]
    dec = lambda r: all(a > b for a, b in zip(r, r[1:]))  # noqa: E731
    ok = dec(det) and dec(sto_res)
    record(5, "SDE residual", ok, f"deterministic {det[0]:.1e}->{det[-1]:.1e}, stochastic {sto_res[0]:.1e}->{sto_res[-1]:.1e} over 2^8..2^14")


def test_criterion_06_signal_recovery():
    br = bridge_ensemble(1024, 64)
    h = sto.PolynomialBump(A, T)
    eps = (0.2, 0.1, 0.05, 0.02)
    errs = [sto.signal_recover(h, e, br).sup_error for e in eps]
    ok = all(e1 >= e2 for e1, e2 in zip(errs, errs[1:]))
    record(6, "signal recovery", ok, "sup-error by eps " + ", ".join(f"{e:g}:{v:.4f}" for e, v in zip(eps, errs)))


def test_criterion_07_inequality_suite():
    rng = np.random.default_rng(SEED)
    tol = 1e-9
    grid = GridMeasure(0.0, 1.0, 32)
    fails = {}
    for p in (1, 2, 3, 4):
        bad = 0
        for _ in range(100):
            f, g = iq.random_simple_pair(rng, grid, int(rng.choice([1, 4])))
            bad += not lp.minkowski_check(f, g, p, tol=tol).holds
        fails[f"minkowski p={p}"] = bad
    prob = GridMeasure(-1.0, 1.0, 200, mass=1.0)
    tri = iq.GridFunction.from_callable(lambda t: 1 - np.abs(t), -1.0, 1.0, 201)
    phis = (np.square, np.exp, np.abs, lambda x: x ** 4)
    bj = bh = bf = 0
    for k in range(100):
        f = iq.random_convex_polynomial(rng, 2)
        bj += not iq.jensen_check(f, phis[k % 4], prob, tol=tol).holds
        bh += not iq.hermite_hadamard_check(f, tol=tol).holds
        bf += not iq.fejer_check(f, tri, tol=tol).holds
    fails.update(jensen=bj, hermite_hadamard=bh, fejer=bf)
    bs, worst = 0, 0.0
    for k in range(100):
        f, g = iq.random_simple_pair(rng, grid, (1, 4, 16)[k % 3])
        v = iq.schwartz_check(f, g, tol=tol)
        _, mu, (c, d) = lp.refine_family([f, g])
        w = mu.weights
        disc = np.zeros(c.shape[1])
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                disc += (c[i] * d[j] - c[j] * d[i]) ** 2 * w[i] * w[j]
        gap = (w @ c ** 2) * (w @ d ** 2) - (w @ (c * d)) ** 2
        worst = max(worst, float(np.max(np.abs(disc - gap))))
        bs += (not v.holds) or bool(np.any(disc < 0)) or bool(np.any(np.abs(disc - gap) > tol))
    fails["schwartz"] = bs
    ok = not any(fails.values())
    record(7, "inequality suite", ok, f"failures per family {fails}; max |discriminant - gap| {worst:.1e}")


def test_criterion_08_noncompleteness():
    D = DyadicMeasure()
    n_max = 40
    ind = [lp.SimpleFunction.indicator(initial_segment(n), D) for n in range(1, n_max + 1)]
    cauchy = True
    for p in (1, 2, 3, 4):
        for n in range(1, n_max + 1):
            for m in range(1, n_max + 1):
                val = lp.integral_simple(abs(ind[n - 1] - ind[m - 1]).power(p)).values[0]
                cauchy &= Fraction(val) == abs(Fraction(1, 2 ** n) - Fraction(1, 2 ** m))
    masses = all(dyadic_measure_exact(initial_segment(n)) == 1 - Fraction(1, 2 ** n) for n in range(1, n_max + 1))
    rng = np.random.default_rng(SEED)
    n_finite = n_infinite = 0
    certified = True
    for _ in range(60):
        elems = set(rng.choice(np.arange(1, 61), size=int(rng.integers(1, 12)), replace=False).tolist())
        gap = 1 - outer_measure_exact(NSubset.finite(elems))
        certified &= gap > 0 and gap >= Fraction(1, 2 ** max(elems))
        n_finite += 1
    for period in range(2, 8):
        for r in range(period):
            first = r if r >= 1 else period
            series = Fraction(1, 2 ** first) / (1 - Fraction(1, 2 ** period))
            gap = outer_measure_exact(NSubset.periodic([r], period)) - 1
            certified &= gap == series and gap > 0
            n_infinite += 1
    ok = cauchy and masses and certified
    record(8, "non-completeness", ok,
           f"Cauchy values exact={cauchy}, masses exact={masses}, {n_finite} finite + {n_infinite} infinite candidates certified={certified}")


def test_criterion_09_convergence_machinery():
    rng = np.random.default_rng(SEED)
    F = cv.FilterSpec.cofinite()
    sigma = cv.OSequenceSpec(lambda p: np.ones(2) / p, 20, 1.0 / 20)
    agree = 0
    for _ in range(50):
        X, L = random_family(rng, 200)
        agree += cv.of_convergence_check(X, L, sigma, F, 200).holds == classical_o_convergence(X, L, sigma.levels())
    statuses, vitali_ok = [], True
    for inst in vitali_corpus():
        v = cv.vitali_conclusion_check(inst.family, cv.iota_modular, inst.mu, F, inst.horizon)
        if inst.hypotheses_expected:
            vitali_ok &= v.holds
        else:
            vitali_ok &= v.status == "hypotheses not met"
        statuses.append(f"{inst.name}={v.status}")
    ok = agree == 50 and vitali_ok
    record(9, "convergence machinery", ok, f"o_F agreement {agree}/50; corpus: {'; '.join(statuses)}")


def test_criterion_10_determinism(tmp_path):
    digests = []
    for run in ("a", "b"):
        cfg = cli.RunConfig(seed=SEED, out=str(tmp_path / run))
        code, _ = cli.run_verify(cfg, "all")
        digests.append(((tmp_path / run / "verify.csv").read_bytes(), (tmp_path / run / "noncompleteness.csv").read_bytes(), code))
    ok = digests[0] == digests[1] and digests[0][2] == 0
    record(10, "determinism", ok, f"two full verify runs bit-identical={digests[0][:2] == digests[1][:2]}, exit code {digests[0][2]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
