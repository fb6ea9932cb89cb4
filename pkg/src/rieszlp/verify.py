"""Verification suites driving every checker; each check yields one Check row."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import convergence as cv
from . import inequalities as iq
from . import lpspace as lp
from . import stochastic as st
from .corpora import classical_o_convergence, random_family, spike_family, vitali_corpus
from .measure import CellMeasure, DyadicMeasure, GridMeasure, initial_segment

__all__ = ["Check", "SUITES", "run_suite", "bridge_squared"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    holds: bool
    value: float
    tol: float
    detail: str = ""


def bridge_squared(seed: int, n_paths: int, n_steps: int, a: float, T: float) -> st.SampledFunction:
    grid = st.TimeGrid(T, n_steps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        br = st.bridge(st.sample_bm(grid, n_paths, seed), a, T)
    return br.sampled.squared()


def _ineq_suite(cfg, tamper: bool) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    out = []
    grid = GridMeasure(0.0, 1.0, 32)
    for p in cfg.p:
        worst, ok = -np.inf, True
        for _ in range(100):
            f, g = iq.random_simple_pair(rng, grid, int(rng.choice([1, 4])))
            v = lp.minkowski_check(f, g, p)
            ok &= v.holds
            worst = max(worst, v.details.get("lhs", 0) - v.details.get("rhs", 0))
        out.append(Check("inequalities", f"minkowski p={p}", bool(ok), float(worst), 1e-9))
    phis = [np.square, np.exp, np.abs, lambda x: x ** 4]
    prob = GridMeasure(-1.0, 1.0, 200, mass=1.0)
    ok_j = ok_h = ok_f = True
    worst_j = worst_h = worst_f = -np.inf
    tri = iq.GridFunction.from_callable(lambda t: 1 - np.abs(t), -1.0, 1.0, 201)
    for k in range(100):
        f = iq.random_convex_polynomial(rng, 2)
        vj = iq.jensen_check(f, phis[k % 4], prob)
        ok_j &= vj.holds
        worst_j = max(worst_j, float(np.max(vj.details["lhs"] - vj.details["rhs"])))
        vh = iq.hermite_hadamard_check(f)
        ok_h &= vh.holds
        worst_h = max(worst_h, float(np.max(vh.details["left"] - vh.details["middle"])),
                      float(np.max(vh.details["middle"] - vh.details["right"])))
        vf = iq.fejer_check(f, tri)
        ok_f &= vf.holds
        worst_f = max(worst_f, float(np.max(vf.details["middle"] - vf.details["right"])))
    out.append(Check("inequalities", "jensen", bool(ok_j), worst_j, 1e-9))
    out.append(Check("inequalities", "hermite-hadamard", bool(ok_h), worst_h, 1e-9))
    out.append(Check("inequalities", "fejer", bool(ok_f), worst_f, 1e-9))
    ok_s, worst_s = True, 0.0
    for k in range(100):
        f, g = iq.random_simple_pair(rng, grid, [1, 4, 16][k % 3])
        v = iq.schwartz_check(f, g)
        ok_s &= v.holds
        worst_s = max(worst_s, float(np.max(np.abs(v.details["discriminant"] - v.details["gap"]))))
    out.append(Check("inequalities", "schwartz + discriminant", bool(ok_s), worst_s, 1e-9))
    agree = True
    for k in range(20):
        f = iq.random_convex_polynomial(rng, 1, n_nodes=41) if k % 2 == 0 else iq.GridFunction.from_callable(
            lambda t, c=rng.uniform(0.5, 2): np.sin(c * 3 * t), -1.0, 1.0, 41)
        mid = iq.midpoint_convexity_check(f).holds
        sup = True
        for v in f.nodes[1:-1]:
            try:
                iq.support_line(f, float(v))
            except iq.NonConvexError:
                sup = False
                break
        agree &= mid == sup
    out.append(Check("inequalities", "midpoint vs support-line convexity", bool(agree), 0.0, 0.0))
    return out


def _lp_suite(cfg, tamper: bool) -> list[Check]:
    out = []
    for p in cfg.p:
        rep = lp.noncompleteness_demo(p, 40)
        s = rep.summary
        ok = s["cauchy_exact"] and s["masses_exact"] and s["no_candidate_reaches_one"]
        out.append(Check("lp", f"noncompleteness p={p}", bool(ok), s["min_gap"], 0.0, rep.summary_line()))
    rng = np.random.default_rng(cfg.seed)
    mu = GridMeasure(0.0, 1.0, 16)
    vals = rng.normal(size=(16, 2))
    H = 64
    cert = lp.DefiningSequence([vals * (1 - 2.0 ** -n) for n in range(1, H + 1)], vals, H, mu=mu)
    lp.defining_sequence_check(cert)
    supplied = lp.DefiningSequence(cert.sequence, vals, H, mu=mu, w=cert.w, r=cert.r)
    if tamper:
        supplied.w = np.asarray(cert.w) * 0.25
    v = lp.defining_sequence_check(supplied)
    out.append(Check("lp", "supplied certificate verifies", v.holds, float(np.max(supplied.w[-1])), 1e-3,
                     "" if v.holds else str(v.witness)))
    fam, mu_s = spike_family(40)
    bad = lp.DefiningSequence([fam(n) for n in range(1, 41)], np.zeros((40, 1)), 40, mu=mu_s)
    out.append(Check("lp", "non-equi-ac family rejected", not lp.defining_sequence_check(bad).holds, 0.0, 0.0))
    vals2 = rng.normal(size=(16, 2))
    cg = lp.DefiningSequence([vals2] * H, vals2, H, mu=mu)
    lp.defining_sequence_check(cg)
    comb = lp.combine_certificates(cert, cg, 2)
    out.append(Check("lp", "combined certificate verifies", lp.defining_sequence_check(comb).holds, 0.0, 0.0))
    D = DyadicMeasure()
    ind = lp.SimpleFunction.indicator(initial_segment(5), D)
    ok = all(lp.lp_membership(ind, p, lp.DefiningSequence([ind] * 8, ind, 8)).holds for p in cfg.p)
    out.append(Check("lp", "indicators belong to every L^p", bool(ok), 0.0, 0.0))
    f = lp.SimpleFunction([({0, 1, 2, 3}, [2.0, 2.0])], mu)
    n2 = lp.lp_norm(f, 2).value
    out.append(Check("lp", "norm of 2e on a quarter", abs(n2 - 1.0) <= 1e-12, n2 - 1.0, 1e-12))
    null = lp.essentially_null_check(np.zeros((16, 2)), mu).holds and not lp.essentially_null_check(vals, mu).holds
    out.append(Check("lp", "essentially null", bool(null), 0.0, 0.0))
    return out


def _conv_suite(cfg, tamper: bool) -> list[Check]:
    out = []
    F = cv.FilterSpec.cofinite()
    sq = cv.IndexSet(lambda n: int(round(n ** 0.5)) ** 2 != n, monotone_tail=True)
    out.append(Check("convergence", "density filter: non-squares", cv.filter_contains(cv.FilterSpec.density(), sq, 10 ** 4).holds, 0.0, 1e-3))
    out.append(Check("convergence", "product filter: diagonal rejected",
                     not cv.product_filter_contains(cv.FilterSpec.product(F), lambda m, n: m == n, 64).holds, 0.0, 0.0))
    rng = np.random.default_rng(cfg.seed)
    H, depth = 200, 20
    sigma = cv.OSequenceSpec(lambda p: np.ones(2) / p, depth, 1.0 / depth)
    agree = 0
    for _ in range(50):
        X, L = random_family(rng, H)
        a = cv.of_convergence_check(X, L, sigma, F, H).holds
        b = classical_o_convergence(X, L, sigma.levels())
        agree += a == b
    out.append(Check("convergence", "o_F cofinite agrees with enumeration", agree == 50, float(50 - agree), 0.0))
    ok, detail = True, []
    for inst in vitali_corpus():
        v = cv.vitali_conclusion_check(inst.family, cv.iota_modular, inst.mu, F, inst.horizon)
        met = v.status != "hypotheses not met"
        good = (met == inst.hypotheses_expected) and (v.holds if met else True)
        ok &= good
        detail.append(f"{inst.name}:{v.status}")
    out.append(Check("convergence", "vitali corpus", bool(ok), 0.0, 0.0, "; ".join(detail)))
    return out


def _stoch_suite(cfg, tamper: bool) -> list[Check]:
    out = []
    s_grid = np.linspace(0.05, 3.0, 60)
    worst = 0.0
    for x in (1, 2, 5, 10, 50, 200):
        c = st.phi_field(lambda t: np.full(np.shape(t), 0.7), x, s_grid)
        worst = max(worst, float(np.max(np.abs(c - 0.7))))
    out.append(Check("stochastic", "phi of constants", worst <= 1e-12, worst, 1e-12))
    worst = 0.0
    for k in (1, 2):
        for x in (1, 2, 5, 10, 50, 200):
            got = st.phi_field(lambda t, k=k: np.asarray(t) ** k, x, s_grid)[:, 0]
            exact = x * s_grid ** k / (x + k)
            worst = max(worst, float(np.max(np.abs(got / exact - 1))))
    out.append(Check("stochastic", "phi of monomials", worst <= 1e-6, worst, 1e-6))
    fsq = bridge_squared(cfg.seed, cfg.paths, cfg.steps, cfg.a, cfg.T).column(0)
    nodes = fsq.grid.nodes[1:]
    xs = list(cfg.x)
    table = st.uniform_convergence_scan(fsq, xs, nodes)
    dec = bool(np.all(np.diff(table) < 0))
    out.append(Check("stochastic", "bridge-squared sup distance decreasing", dec, float(table[-1]), 0.0,
                     " ".join(f"{x:g}:{d:.6g}" for x, d in zip(xs, table))))
    bound = float(st.moment_error_bound(fsq, xs[-1])[0])
    out.append(Check("stochastic", "largest-x distance within modulus bound", table[-1] <= bound, float(table[-1]), bound))
    # recovery
    grid = st.TimeGrid(cfg.T, cfg.steps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        br = st.bridge(st.sample_bm(grid, cfg.paths, cfg.seed), cfg.a, cfg.T)
    h = st.PolynomialBump(cfg.a, cfg.T)
    errs = [st.signal_recover(h, e, br).sup_error for e in cfg.eps]
    out.append(Check("stochastic", "recovery sup-error non-increasing", bool(np.all(np.diff(errs) <= 0)),
                     float(errs[-1]), 0.0, " ".join(f"{e:g}:{v:.6g}" for e, v in zip(cfg.eps, errs))))
    return out


SUITES: dict[str, Callable] = {
    "inequalities": _ineq_suite,
    "lp": _lp_suite,
    "convergence": _conv_suite,
    "stochastic": _stoch_suite,
}


def run_suite(cfg, suite: str = "all", tamper_certificate: bool = False) -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    rows = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        rows.extend(SUITES[name](cfg, tamper_certificate))
    return rows
