import json
from collections import Counter
from pathlib import Path

import pytest

from xoprec import xop
from xoprec.ratpoly import Poly
from xoprec.verify import (
    CHECKS,
    PAPER_CHECKS,
    ConfigError,
    SweepConfig,
    default_config,
    run_checks,
    sweep,
    verify,
)

SMALL = {
    "families": {"hermite": [{}], "laguerre": [{"a": "7/3"}], "jacobi": [{"a": "1", "b": "1"}]},
    "types": ["I", "II", "III"],
    "j": [1, 2],
    "n": [0, 5],
    "checks": ["sparsity", "jzero"],
}


def small(**over):
    data = json.loads(json.dumps(SMALL))
    data.update(over)
    return data


# --- config strictness --------------------------------------------------------


def test_default_config_is_shipped_json():
    shipped = Path(__file__).parents[1] / "src" / "xoprec" / "data" / "default_sweep.json"
    data = json.loads(shipped.read_text())
    cfg = default_config()
    assert cfg == SweepConfig.from_dict(data)
    assert list(cfg.checks) == list(CHECKS)
    assert set(cfg.families["laguerre"][i]["a"] for i in range(4)) == {"1/2", "1", "7/3", "4"}


def test_config_round_trips():
    cfg = SweepConfig.from_dict(small())
    assert SweepConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize(
    "change",
    [
        {"colour": "blue"},
        {"checks": []},
        {"checks": ["nope"]},
        {"types": ["IV"]},
        {"j": [0, 2]},
        {"n": [3, 1]},
        {"workers": 0},
        {"quadrature": {"precision": "high"}},
        {"quadrature": {"tol": 1e-20}},
        {"quadrature": {"order": 8}},
        {"limits": {"gram": {"kmax": 3}}},
        {"limits": {"bogus": {"nmax": 3}}},
        {"families": {"laguerre": [{"a": 0.5}]}},
        {"families": {"laguerre": [{"a": "1", "b": "2"}]}},
        {"families": {"chebyshev": [{}]}},
        {"families": {}},
    ],
)
def test_config_rejects(change):
    with pytest.raises(ConfigError) as info:
        SweepConfig.from_dict(small(**change))
    assert info.value.exit_code == 2


def test_config_requires_checks_and_families():
    data = small()
    del data["checks"]
    with pytest.raises(ConfigError):
        SweepConfig.from_dict(data)
    with pytest.raises(ConfigError):
        SweepConfig.from_dict([])


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        SweepConfig.load(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        SweepConfig.load(bad)


def test_limits_clip_to_range():
    cfg = SweepConfig.from_dict(small(limits={"sparsity": {"nmax": 99, "jmax": 1}}))
    assert cfg.limit("sparsity", "nmax") == 5
    assert cfg.limit("sparsity", "jmax") == 1


# --- verify ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def paper_report():
    return verify("paper")


def test_paper_scope_runs_three_checks(paper_report):
    assert list(paper_report.results) == list(PAPER_CHECKS)
    assert paper_report.results["lemma2"].status == "pass"
    assert paper_report.results["hermite_pin"].status == "pass"


def test_paper_scope_fails_only_on_misprinted_coefficient(paper_report):
    tables = paper_report.results["paper_tables"]
    assert tables.status == "fail"
    assert paper_report.exit_code == 1
    assert {(f["relation"], f["shift"]) for f in tables.failures} == {("jacobi-I-2", -1)}
    assert tables.passed > 0


def test_skip_marks_checks(paper_report):
    rep = verify("paper", skip=["paper_tables"])
    assert rep.results["paper_tables"].status == "skip"
    assert rep.exit_code == 0
    assert "SKIP paper_tables" in rep.summary_lines()[0]
    with pytest.raises(ConfigError):
        verify("paper", skip=["nonsense"])
    with pytest.raises(ConfigError):
        verify("everything")


def test_run_checks_skip():
    cfg = SweepConfig.from_dict(small(checks=["jzero", "gram"]))
    res = run_checks(cfg, cfg.checks, skip=["gram"])
    assert res["gram"].status == "skip"
    assert res["gram"].notes == ["skipped on request"]
    assert res["jzero"].status == "pass"


def test_hermite_single_point_cells_skip_with_reason():
    cfg = SweepConfig.from_dict(small(checks=["sparsity"]))
    res = run_checks(cfg, cfg.checks)["sparsity"]
    assert res.status == "pass"
    reasons = [s for s in res.skips if s["family"] == "hermite" and s["type"] in ("I", "II")]
    assert len(reasons) == 4
    assert all(s["reason"].startswith("NonexistentCombination") for s in reasons)


def test_report_json_shape(paper_report):
    d = paper_report.to_dict()
    assert d["scope"] == "paper" and d["status"] == "fail"
    json.dumps(d)
    first = d["checks"]["paper_tables"]["first_failure"]
    assert first["relation"] == "jacobi-I-2" and first["shift"] == -1


# --- mutation ---------------------------------------------------------------------


def test_seed_sign_error_is_caught(monkeypatch):
    original = xop.seed_polynomial

    def flipped(fam, rho, j):
        c = list(original(fam, rho, j).coeffs)
        c[0] = -c[0]
        return Poly(c)

    monkeypatch.setattr(xop, "seed_polynomial", flipped)
    xop._xop_poly.cache_clear()
    try:
        cfg = SweepConfig.from_dict(small(checks=["sparsity", "constructions"]))
        res = run_checks(cfg, cfg.checks)
    finally:
        monkeypatch.undo()
        xop._xop_poly.cache_clear()
    falsifying = {"ClosedFormMismatch", "UnrepresentableTarget", "SparsityViolation"}
    for name in ("sparsity", "constructions"):
        assert res[name].status == "fail"
        kinds = Counter(f.get("error") for f in res[name].failures)
        assert set(kinds) <= falsifying, kinds
    assert verify("paper").results["lemma2"].status == "pass"


# --- sweep -----------------------------------------------------------------------


def _tree(root: Path) -> dict:
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def test_sweep_is_deterministic(tmp_path):
    cfg = SweepConfig.from_dict(small())
    rep_a, cells_a = sweep(cfg, output_dir=str(tmp_path / "a"))
    rep_b, cells_b = sweep(cfg, workers=2, output_dir=str(tmp_path / "b"))
    assert cells_a == cells_b
    a, b = _tree(tmp_path / "a"), _tree(tmp_path / "b")
    assert a == b
    assert "summary.json" in a
    assert any(k.startswith("tables/laguerre-a7_3-I-j1") for k in a)
    assert rep_a.exit_code == 0
    assert rep_a.results["cells"].status == "pass"
    assert not list((tmp_path / "a").rglob("*.tmp"))


def test_sweep_tables_parse_back(tmp_path):
    from xoprec.recurrence import CoeffTable

    cfg = SweepConfig.from_dict(small(families={"laguerre": [{"a": "3"}]}, types=["II"], j=[1, 1]))
    _, cells = sweep(cfg, output_dir=str(tmp_path))
    (cell,) = cells
    records = json.loads((tmp_path / cell["file"]).read_text())
    assert len(records) == 6
    table = CoeffTable.from_json(json.dumps(records[2]))
    assert table.to_dict() == records[2]
    assert table.get(0) == 104


def test_sweep_skips_hermite_single_point_cells(tmp_path):
    cfg = SweepConfig.from_dict(small(families={"hermite": [{}]}))
    _, cells = sweep(cfg, output_dir=str(tmp_path))
    skipped = [c for c in cells if c["status"] == "skip"]
    assert {(c["type"], c["j"]) for c in skipped} == {("I", 1), ("I", 2), ("II", 1), ("II", 2), ("III", 1)}
    assert all(c["reason"] for c in skipped)
