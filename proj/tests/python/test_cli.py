import csv
import json

import jsonschema
import numpy as np

from conftest import split_csv, write_csv


def test_gen_toy_smiley_is_deterministic(cli, tmp_path):
    _, out = cli("gen-toy", "--kind", "smiley", "--n", 120, "--seed", 0, "--out-dir", tmp_path / "a")
    assert len(out["outputs"]) == 3
    cli("gen-toy", "--kind", "smiley", "--n", 120, "--seed", 0, "--out-dir", tmp_path / "b")
    for name in ("toy_smiley_proteins.csv", "toy_smiley_ligands.csv", "toy_smiley_labels.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_gen_toy_rejects_indivisible_n(cli, tmp_path):
    proc, _ = cli("gen-toy", "--kind", "smiley", "--n", 121, "--out-dir", tmp_path, expect=2)
    assert "divisible" in proc.stderr


def test_tune_default_grid(cli, tmp_path):
    cli("gen-toy", "--kind", "quadratic", "--n", 60, "--seed", 1, "--out-dir", tmp_path)
    args = ["tune", "--proteins", tmp_path / "toy_quadratic_proteins.csv",
            "--ligands", tmp_path / "toy_quadratic_ligands.csv", "--method", "kcca", "--kernel", "rbf",
            "--seed", 3]
    _, first = cli(*args, "--out", tmp_path / "a")
    _, second = cli(*args, "--out", tmp_path / "b")
    assert first["configs"] == 81
    with open(tmp_path / "a_cv.csv") as f:
        assert len(list(csv.DictReader(f))) == 81
    assert first["best"] == second["best"]
    cli(*args, "--folds", 1, "--out", tmp_path / "c", expect=2)


def test_fit_and_reload(cli, tmp_path):
    cli("gen-toy", "--kind", "linear", "--n", 40, "--seed", 4, "--out-dir", tmp_path)
    p, l = tmp_path / "toy_linear_proteins.csv", tmp_path / "toy_linear_ligands.csv"
    _, out = cli("fit", "--proteins", p, "--ligands", l, "--method", "kcca", "--kernel", "rbf",
                 "--model-out", tmp_path / "m.json")
    assert out["p"] == 2 and not out["rank_deficient"]
    for name in ("x.csv", "y.csv"):
        cli("export-projections", "--model", tmp_path / "m.json", "--data", p, "--side", "protein",
            "--out", tmp_path / name)
    assert (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()
    rows = list(csv.reader(open(tmp_path / "x.csv")))
    assert rows[0] == ["id", "cv1", "cv2"]
    assert len(rows) == 41
    cli("fit", "--proteins", p, "--ligands", l, "--method", "kcca", "--sigma", -1,
        "--model-out", tmp_path / "bad.json", expect=2)


def test_fit_rank_deficiency_warns(cli, tmp_path):
    write_csv(tmp_path / "p.csv", ["a", "b"], ["u", "v"], [[0, 1], [2, 0]])
    write_csv(tmp_path / "l.csv", ["a", "b"], ["w", "z"], [[1, 1], [0, 3]])
    proc, out = cli("fit", "--proteins", tmp_path / "p.csv", "--ligands", tmp_path / "l.csv", "--method", "kcca",
                    "--p", 3, "--model-out", tmp_path / "m.json")
    assert out["rank_deficient"] and out["p"] < 3
    assert any("rank" in w for w in out["warnings"])


def test_export_side_mismatch_is_usage_error(cli, tmp_path):
    cli("gen-toy", "--kind", "linear", "--n", 20, "--out-dir", tmp_path)
    p, l = tmp_path / "toy_linear_proteins.csv", tmp_path / "toy_linear_ligands.csv"
    cli("fit", "--proteins", p, "--ligands", l, "--method", "cca", "--model-out", tmp_path / "m.json")
    cli("export-projections", "--model", tmp_path / "m.json", "--data", p, "--side", "ligand",
        "--out", tmp_path / "o.csv", expect=2)


def test_screen_aligned_and_schema(cli, tmp_path, schema_dir):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 2))
    ids = [f"q{i:02d}" for i in range(50)]
    write_csv(tmp_path / "all_p.csv", ids, ["a", "b"], x)
    write_csv(tmp_path / "all_l.csv", ids, ["a", "b"], x)
    for side in ("p", "l"):
        split_csv(tmp_path / f"all_{side}.csv", tmp_path / f"train_{side}.csv", tmp_path / f"test_{side}.csv", 40)
    cli("fit", "--proteins", tmp_path / "train_p.csv", "--ligands", tmp_path / "train_l.csv", "--method", "cca",
        "--kappa", 0, "--model-out", tmp_path / "m.json")
    _, out = cli("screen", "--model", tmp_path / "m.json", "--proteins", tmp_path / "test_p.csv",
                 "--ligands", tmp_path / "test_l.csv", "--embed", tmp_path / "all_l.csv", "--k-lle", 3,
                 "--report-out", tmp_path / "rep")
    assert out["mean_rank"] == 1.0
    report = json.loads((tmp_path / "rep.json").read_text())
    schema = json.loads((schema_dir / "screen_report.schema.json").read_text())
    jsonschema.validate(report, schema)
    assert report["queries"] == 10

    proc, _ = cli("screen", "--model", tmp_path / "m.json", "--proteins", tmp_path / "test_p.csv",
                  "--ligands", tmp_path / "test_l.csv", "--embed", tmp_path / "nope.csv", "--k-lle", 3,
                  "--report-out", tmp_path / "rep2", expect=3)
    assert "nope.csv" in proc.stderr


def test_corrupt_model_exit_code(cli, tmp_path):
    (tmp_path / "m.json").write_text('{"format": "canonscreen-model", "format_version": 1')
    cli("gen-toy", "--kind", "linear", "--n", 12, "--out-dir", tmp_path)
    cli("predict", "--model", tmp_path / "m.json", "--proteins", tmp_path / "toy_linear_proteins.csv",
        "--out", tmp_path / "o.csv", expect=3)
