import numpy as np
import pytest

from rieszlp import cli
from rieszlp.report import read_table


def small(tmp_path, **kw):
    base = dict(paths=4, steps=128, out=str(tmp_path))
    base.update(kw)
    return cli.RunConfig(**base)


def test_run_config_validation():
    with pytest.raises(ValueError):
        cli.RunConfig(a=0.5)
    with pytest.raises(ValueError):
        cli.RunConfig(a=3.0, T=3.0)
    with pytest.raises(ValueError):
        cli.RunConfig(paths=0)
    with pytest.raises(ValueError):
        cli.RunConfig(p=(1, 0))
    with pytest.raises(ValueError):
        cli.RunConfig(format="xml")


def test_figures_schema(tmp_path):
    cfg = small(tmp_path)
    files = cli.run_figures(cfg)
    for key in ("figure1", "figure2", "section", "figure1_png", "figure2_png"):
        assert files[key].exists()
    meta, cols, rows = read_table(files["figure1"])
    assert cols == ["t", "path_id", "f_squared"]
    assert len(rows) == (cfg.steps + 1) * cfg.paths
    meta, cols, rows = read_table(files["figure2"])
    assert cols == ["x", "s", "phi"]
    assert len(rows) == 50 * cfg.steps
    assert meta["seed"] == cfg.seed
    meta, _, rows = read_table(files["section"])
    assert meta["sup_distance"] == max(float(r[3]) for r in rows)


def test_figures_constant_override(tmp_path):
    files = cli.run_figures(small(tmp_path), f_override=lambda t: np.full(np.shape(t), 0.4))
    _, _, rows = read_table(files["figure2"])
    assert np.allclose([float(r[2]) for r in rows], 0.4, rtol=0, atol=1e-12)


def test_figures_deterministic(tmp_path):
    a = cli.run_figures(small(tmp_path / "a"))
    b = cli.run_figures(small(tmp_path / "b"))
    for key in ("figure1", "figure2", "section"):
        assert a[key].read_bytes() == b[key].read_bytes()


def test_verify_inequalities_passes(tmp_path):
    code, checks = cli.run_verify(small(tmp_path), "inequalities")
    assert code == 0 and all(c.holds for c in checks)
    _, cols, rows = read_table(tmp_path / "verify.csv")
    assert cols[:3] == ["suite", "check", "holds"] and len(rows) == len(checks)


def test_verify_lp_emits_table(tmp_path):
    code, _ = cli.run_verify(small(tmp_path), "lp")
    assert code == 0
    meta, cols, rows = read_table(tmp_path / "noncompleteness.csv")
    assert cols == ["n", "m", "mu_symm_diff", "cauchy_value"]
    assert len(rows) == 40 * 41 // 2
    assert "cauchy_exact=True" in meta["summary"]


def test_verify_tampered_certificate_fails(tmp_path):
    code, checks = cli.run_verify(small(tmp_path), "lp", tamper_certificate=True)
    assert code != 0
    assert [c.name for c in checks if not c.holds] == ["supplied certificate verifies"]


def test_recover_default(tmp_path):
    cfg = small(tmp_path, paths=64, steps=1024)
    code, summary = cli.run_recover(cfg)
    assert code == 0 and len(summary) == 4
    errs = [v for _, v in summary]
    assert all(e1 >= e2 for e1, e2 in zip(errs, errs[1:]))
    _, cols, rows = read_table(tmp_path / "recovery.csv")
    assert cols == ["epsilon", "s", "psi_G", "h_prime", "abs_error"]
    assert len(rows) == 4 * cfg.steps


def test_recover_singleton(tmp_path):
    code, summary = cli.run_recover(small(tmp_path, eps=(0.1,)))
    assert code == 0 and len(summary) == 1


def test_recover_zero_signal(tmp_path):
    code, summary = cli.run_recover(small(tmp_path, paths=16, steps=512), "zero")
    errs = [v for _, v in summary]
    assert code == 0 and all(e1 >= e2 for e1, e2 in zip(errs, errs[1:]))
    _, _, rows = read_table(tmp_path / "recovery.csv")
    by_eps = {}
    for r in rows:
        by_eps.setdefault(float(r[0]), []).append(abs(float(r[2])))
    sups = [max(by_eps[e]) for e in sorted(by_eps, reverse=True)]
    assert sups[-1] < sups[0]


def test_main_exit_codes(tmp_path, capsys):
    assert cli.main(["verify", "--suite", "convergence", "--out", str(tmp_path)]) == 0
    assert cli.main(["verify", "--suite", "lp", "--tamper", "--out", str(tmp_path)]) == 1
    assert cli.main(["recover", "--a", "0.5", "--out", str(tmp_path)]) == 2
    assert cli.main(["verify", "--suite", "nope"]) == 2
    assert cli.main([]) == 2
    assert cli.main(["recover", "--eps", "x,y"]) == 2
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" in out


def test_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("RIESZLP_SEED", "7")
    monkeypatch.setenv("RIESZLP_EPS", "0.2,0.1")
    args = cli._parser().parse_args(["recover", "--out", str(tmp_path)])
    cfg = cli.config_from(args)
    assert cfg.seed == 7 and cfg.eps == (0.2, 0.1)
    args = cli._parser().parse_args(["recover", "--seed", "9"])
    assert cli.config_from(args).seed == 9


def test_json_format(tmp_path):
    code, _ = cli.run_recover(small(tmp_path, format="json", eps=(0.2,)))
    assert code == 0 and (tmp_path / "recovery_summary.json").exists()


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["recover", "--out", str(blocker / "sub")]) == 1


def test_replay_from_header(tmp_path):
    first = cli.run_figures(small(tmp_path / "a", seed=99))
    meta, _, _ = read_table(first["figure2"])
    again = cli.run_figures(cli.RunConfig.from_meta(meta, str(tmp_path / "b")))
    assert first["figure2"].read_bytes() == again["figure2"].read_bytes()
    assert first["figure1"].read_bytes() == again["figure1"].read_bytes()
