import json
import os

import numpy as np
import pytest

from wgpoly.cli import main as cli_main
from wgpoly.harness import (ConfigError, NonPositiveError, StudyConfig,
                            compute_rates, config_from_json, emit_table,
                            parse_levels, parse_table, run_study)
from wgpoly.mesh import build_triangle_grid, save_mesh

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


def test_compute_rates_halving():
    rates = compute_rates([0.1075e-03, 0.2688e-04])
    assert rates == pytest.approx([2.00], abs=5e-3)


def test_compute_rates_trivial():
    assert compute_rates([8, 4, 2]) == pytest.approx([1.0, 1.0])
    assert compute_rates([1, 1]) == pytest.approx([0.0])


def test_compute_rates_rejects_nonpositive():
    with pytest.raises(NonPositiveError):
        compute_rates([1.0, 0.0])
    with pytest.raises(NonPositiveError):
        compute_rates([1.0, -2.0])


def test_parse_levels():
    assert parse_levels("2..5") == (2, 5)
    assert parse_levels("4") == (4, 4)
    with pytest.raises(ConfigError):
        parse_levels("a..b")


def test_config_validation():
    with pytest.raises(ConfigError):
        StudyConfig(k=0).validate()
    with pytest.raises(ConfigError):
        StudyConfig(levels=(4, 2)).validate()
    with pytest.raises(ConfigError):
        StudyConfig(k=1, levels=(1, 9)).validate()
    with pytest.raises(ConfigError):
        StudyConfig(exact="bogus").validate()
    with pytest.raises(ConfigError):
        StudyConfig(j=1, k=1).validate()   # needs expect_singular
    StudyConfig(j=1, k=1, expect_singular=True).validate()


def test_config_from_json():
    cfg = config_from_json(json.dumps(
        {"family": "polygon", "k": 2, "levels": "1..3"}))
    assert cfg.family == "polygon"
    assert cfg.k == 2
    assert cfg.levels == (1, 3)
    with pytest.raises(ConfigError):
        config_from_json('{"bogus_field": 1}')
    with pytest.raises(ConfigError):
        config_from_json("[1,2]")
    with pytest.raises(ConfigError):
        config_from_json("{not json")


def test_emit_parse_roundtrip():
    cfg = StudyConfig(k=1, j=2, levels=(2, 4))
    records = run_study(cfg)
    text = emit_table(records)
    back = parse_table(text)
    assert len(back) == len(records)
    for a, b in zip(records, back):
        assert (a.level, a.cells, a.dofs, a.status) == \
            (b.level, b.cells, b.dofs, b.status)
        assert b.l2_error == pytest.approx(a.l2_error, rel=5e-4)
        assert b.energy_error == pytest.approx(a.energy_error, rel=5e-4)


def test_singular_rows_have_empty_error_fields():
    cfg = StudyConfig(k=1, j=1, levels=(2, 3), expect_singular=True)
    records = run_study(cfg)
    assert all(r.status == "singular" for r in records)
    text = emit_table(records)
    for line in text.splitlines()[1:]:
        parts = line.split(",")
        assert parts[3] == parts[4] == parts[5] == parts[6] == ""
        assert parts[7] == "singular"


def test_markdown_format():
    cfg = StudyConfig(k=1, j=2, levels=(2, 2), format="markdown")
    records = run_study(cfg)
    text = emit_table(records, "markdown")
    assert text.startswith("| level |")
    assert "| ok |" in text


def test_rates_match_halving_convention():
    cfg = StudyConfig(k=1, j=2, levels=(3, 5))
    records = run_study(cfg)
    assert records[0].l2_rate is None
    for r in records[1:]:
        assert abs(r.l2_rate - 2.0) < 0.2
        assert abs(r.energy_rate - 1.0) < 0.2


@pytest.mark.parametrize("k,j", [(1, 2), (2, 3), (3, 4)])
def test_golden_tables(k, j):
    with open(os.path.join(GOLDEN_DIR, f"triangle_k{k}_j{j}.csv")) as fh:
        expected = fh.read()
    records = run_study(StudyConfig(k=k, j=j, levels=(4, 6)))
    assert emit_table(records) == expected


def test_cli_success(tmp_path, capsys):
    out = tmp_path / "table.csv"
    code = cli_main(["study", "--family", "triangle", "--k", "1",
                     "--j", "2", "--levels", "2..3", "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == ("level,cells,dofs,l2_error,l2_rate,"
                                    "energy_error,energy_rate,status")
    assert len(text.splitlines()) == 3


def test_cli_config_error():
    assert cli_main(["study", "--k", "0"]) == 1
    assert cli_main(["study", "--levels", "nope"]) == 1


def test_cli_unexpected_singular(capsys):
    code = cli_main(["study", "--k", "1", "--j", "1", "--levels", "2..2",
                     "--expect-singular"])
    assert code == 0
    code2 = cli_main(["study", "--k", "1", "--j", "3", "--levels", "2..2",
                      "--expect-singular"])
    assert code2 == 2
    capsys.readouterr()


def test_cli_json_config(tmp_path):
    cfg = tmp_path / "study.json"
    cfg.write_text(json.dumps({"k": 1, "j": 2, "levels": "2..2"}))
    out = tmp_path / "t.csv"
    assert cli_main(["study", "--config", str(cfg),
                     "--out", str(out)]) == 0
    assert "ok" in out.read_text()


def test_cli_mesh_file(tmp_path):
    mesh_file = tmp_path / "tri.wgmesh"
    mesh_file.write_text(save_mesh(build_triangle_grid(1)))
    out = tmp_path / "t.csv"
    code = cli_main(["study", "--mesh", str(mesh_file), "--k", "1",
                     "--j", "2", "--levels", "1..3", "--out", str(out)])
    assert code == 0
    rows = parse_table(out.read_text())
    assert [r.cells for r in rows] == [2, 8, 32]
    # coarse levels are pre-asymptotic; just require decreasing errors
    assert rows[0].l2_error > rows[1].l2_error > rows[2].l2_error


def test_cli_export_matrix(tmp_path):
    mm = tmp_path / "A.mtx"
    out = tmp_path / "t.csv"
    code = cli_main(["study", "--family", "triangle", "--k", "1", "--j", "2",
                     "--levels", "2..2", "--out", str(out),
                     "--export-matrix", str(mm)])
    assert code == 0
    assert mm.read_text().startswith(
        "%%MatrixMarket matrix coordinate real symmetric")


def test_determinism_byte_identical():
    cfg = StudyConfig(k=1, j=2, levels=(2, 4))
    t1 = emit_table(run_study(cfg))
    t2 = emit_table(run_study(cfg))
    assert t1 == t2
