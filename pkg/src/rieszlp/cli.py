"""Command-line front end: figure data, verification suites, signal recovery.

Exit codes: 0 pass, 1 a check failed, 2 usage error.  Every option can also
be set through an environment variable ``RIESZLP_<OPTION>`` (for example
``RIESZLP_SEED=7``); command-line flags take precedence.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import stochastic as st
from .errors import RieszLPError
from .plotting import plot_paths, plot_surface
from .report import write_table
from .verify import run_suite

__all__ = ["RunConfig", "run_figures", "run_verify", "run_recover", "main", "ENV_PREFIX"]

ENV_PREFIX = "RIESZLP_"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 12345
    paths: int = 64
    steps: int = 1024
    a: float = 1.5
    T: float = 3.0
    x: tuple = (5.0, 10.0, 20.0, 50.0)
    eps: tuple = (0.2, 0.1, 0.05, 0.02)
    p: tuple = (1, 2, 3, 4)
    out: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if not self.T > self.a > 1:
            raise ValueError("need T > a > 1")
        if self.paths < 1 or self.steps < 1:
            raise ValueError("paths and steps must be positive")
        if not self.x or any(v <= 0 for v in self.x):
            raise ValueError("x values must be positive")
        if not self.eps or any(v <= 0 for v in self.eps):
            raise ValueError("epsilon values must be positive")
        if not self.p or any(int(v) != v or v < 1 for v in self.p):
            raise ValueError("p values must be positive integers")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "eps", tuple(float(v) for v in self.eps))
        object.__setattr__(self, "p", tuple(int(v) for v in self.p))

    def meta(self, **extra) -> dict:
        d = asdict(self)
        d.pop("out")
        d.update(extra)
        return d

    @classmethod
    def from_meta(cls, meta: dict, out: str) -> "RunConfig":
        """Rebuild the config recorded in a table header, writing to ``out``."""
        keys = {f.name for f in fields(cls)} - {"out"}
        return cls(out=out, **{k: tuple(v) if isinstance(v, list) else v for k, v in meta.items() if k in keys})

    @property
    def outdir(self) -> Path:
        return Path(self.out)


def _grid(cfg: RunConfig) -> st.TimeGrid:
    return st.TimeGrid(cfg.T, cfg.steps)


def _bridge(cfg: RunConfig) -> st.BridgeProcess:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return st.bridge(st.sample_bm(_grid(cfg), cfg.paths, cfg.seed), cfg.a, cfg.T)


def _prepare_out(cfg: RunConfig) -> Path:
    d = cfg.outdir
    d.mkdir(parents=True, exist_ok=True)
    if not os.access(d, os.W_OK):
        raise PermissionError(f"output directory {d} is not writable")
    return d


def run_figures(cfg: RunConfig, f_override: Callable[[np.ndarray], np.ndarray] | None = None) -> dict[str, Path]:
    """Squared-bridge paths, the moment surface for path 0 and its largest-x slice.

    ``f_override`` replaces the squared bridge by a deterministic function of t.
    """
    d = _prepare_out(cfg)
    grid = _grid(cfg)
    t = grid.nodes
    if f_override is None:
        fsq = _bridge(cfg).sampled.squared()
    else:
        fsq = st.SampledFunction(grid, np.asarray(f_override(t), dtype=float))
    vals = fsq.values
    rows1 = [(float(t[i]), j, float(vals[i, j])) for j in range(vals.shape[1]) for i in range(t.size)]
    files = {"figure1": write_table(d / "figure1", ("t", "path_id", "f_squared"), rows1, cfg.meta(figure=1), cfg.format)}
    f0 = fsq.column(0)
    s = t[1:]
    xs = np.arange(1, 51, dtype=float)
    surface = np.stack([st.phi_field(f0, x, s)[:, 0] for x in xs])
    rows2 = [(float(x), float(s[k]), float(surface[i, k])) for i, x in enumerate(xs) for k in range(s.size)]
    files["figure2"] = write_table(d / "figure2", ("x", "s", "phi"), rows2, cfg.meta(figure=2, path_id=0), cfg.format)
    last = surface[-1]
    diff = np.abs(last - f0.values[1:, 0])
    sup = float(diff.max())
    rows3 = [(float(s[k]), float(f0.values[k + 1, 0]), float(last[k]), float(diff[k])) for k in range(s.size)]
    files["section"] = write_table(d / "section", ("s", "f_squared", "phi", "abs_diff"), rows3,
                                   cfg.meta(x=50.0, path_id=0, sup_distance=sup), cfg.format)
    table = st.uniform_convergence_scan(f0, cfg.x, s)
    files["convergence"] = write_table(d / "convergence", ("x", "sup_distance"),
                                       [(x, float(v)) for x, v in zip(cfg.x, table)], cfg.meta(path_id=0), cfg.format)
    files["figure1_png"] = plot_paths(t, vals, d / "figure1.png")
    files["figure2_png"] = plot_surface(xs, s, surface, d / "figure2.png")
    return files


def run_verify(cfg: RunConfig, suite: str = "all", tamper_certificate: bool = False) -> tuple[int, list]:
    """Run a suite, write ``verify.<fmt>`` and return ``(exit_code, checks)``."""
    d = _prepare_out(cfg)
    checks = run_suite(cfg, suite, tamper_certificate)
    rows = [(c.suite, c.name, c.holds, c.value, c.tol, c.detail) for c in checks]
    write_table(d / "verify", ("suite", "check", "holds", "value", "tol", "detail"), rows, cfg.meta(suite=suite), cfg.format)
    if suite in ("lp", "all"):
        from .lpspace import noncompleteness_demo

        rep = noncompleteness_demo(cfg.p[0], 40)
        write_table(d / "noncompleteness", rep.COLUMNS, rep.rows, cfg.meta(p_table=cfg.p[0], summary=rep.summary_line()),
                    cfg.format)
    return (0 if all(c.holds for c in checks) else 1), checks


def run_recover(cfg: RunConfig, h: str = "bump") -> tuple[int, list[tuple[float, float]]]:
    """Recover h' from ``h + eps f``; returns exit code and (eps, sup_error) rows.

    ``recovery`` lists path 0 per s; ``recovery_summary`` gives the
    ensemble-averaged sup-error per eps.
    """
    d = _prepare_out(cfg)
    if h == "bump":
        hf = st.PolynomialBump(cfg.a, cfg.T)
    elif h == "zero":
        hf = st.PolynomialBump(cfg.a, cfg.T, scale=0.0)
    else:
        raise ValueError(f"unknown h family {h!r}")
    hf.validate(cfg.a, cfg.T)
    br = _bridge(cfg)
    rows, summary = [], []
    for e in cfg.eps:
        res = st.signal_recover(hf, e, br)
        est = res.estimate[:, 0]
        for k in range(res.s.size):
            rows.append((e, float(res.s[k]), float(est[k]), float(res.h_prime[k]), float(abs(est[k] - res.h_prime[k]))))
        summary.append((e, res.sup_error))
    write_table(d / "recovery", ("epsilon", "s", "psi_G", "h_prime", "abs_error"), rows, cfg.meta(h=h, path_id=0), cfg.format)
    write_table(d / "recovery_summary", ("epsilon", "sup_error"), summary, cfg.meta(h=h, average="paths"), cfg.format)
    errs = [v for _, v in summary]
    order = np.argsort([-e for e, _ in summary], kind="stable")
    monotone = bool(np.all(np.diff(np.asarray(errs)[order]) <= 0))
    return (0 if monotone else 1), summary


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


_OPTIONS = [
    ("seed", int, "master seed"),
    ("paths", int, "number of Brownian paths"),
    ("steps", int, "grid steps on [0, T]"),
    ("a", float, "left end of the bridge window"),
    ("T", float, "right end of the bridge window"),
    ("x", _floats, "comma-separated moment orders"),
    ("eps", _floats, "comma-separated noise levels"),
    ("p", _ints, "comma-separated exponents"),
    ("out", str, "output directory"),
    ("format", str, "csv or json"),
]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    for name, typ, help_ in _OPTIONS:
        common.add_argument(f"--{name}", type=typ, default=None, help=help_)
    parser = argparse.ArgumentParser(prog="rieszlp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("figures", parents=[common], help="write figure data and PNGs")
    pv = sub.add_parser("verify", parents=[common], help="run verification suites")
    pv.add_argument("--suite", choices=["inequalities", "lp", "convergence", "stochastic", "all"], default="all")
    pv.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    pr = sub.add_parser("recover", parents=[common], help="signal recovery scan")
    pr.add_argument("--h", choices=["bump", "zero"], default="bump")
    return parser


def config_from(args: argparse.Namespace, env: dict | None = None) -> RunConfig:
    env = os.environ if env is None else env
    values = {}
    for name, typ, _ in _OPTIONS:
        v = getattr(args, name, None)
        if v is None and ENV_PREFIX + name.upper() in env:
            v = typ(env[ENV_PREFIX + name.upper()])
        if v is not None:
            values[name] = v
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        cfg = config_from(args)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"rieszlp: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "figures":
            files = run_figures(cfg)
            for k, v in files.items():
                print(f"{k}: {v}")
            return 0
        if args.command == "verify":
            code, checks = run_verify(cfg, args.suite, args.tamper)
            for c in checks:
                print(f"{'PASS' if c.holds else 'FAIL'}  {c.suite:<13} {c.name}  value={c.value:.6g} tol={c.tol:g}")
            failed = [c for c in checks if not c.holds]
            if failed:
                print(f"first failure: {failed[0].suite}/{failed[0].name} {failed[0].detail}", file=sys.stderr)
            return code
        code, summary = run_recover(cfg, args.h)
        for e, v in summary:
            print(f"epsilon={e:g} sup_error={v:.6g}")
        return code
    except (RieszLPError, OSError) as exc:
        print(f"rieszlp: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
