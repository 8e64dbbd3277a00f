import json

import pytest
from click.testing import CliRunner

from fieldforge.cli.main import cli
from fieldforge.services.corpus import class_distribution, read_label_table
from fieldforge.services.mosaic import parse_annotations

GRID = ["--grid", "4x3", "--tile", "8x6"]


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, [str(a) for a in args], catch_exceptions=False)


@pytest.fixture
def mosaics_dir(runner, tmp_path, labels_csv, image_root):
    out = tmp_path / "mosaics"
    result = invoke(runner, "generate", "--labels", labels_csv, "--images", image_root,
                    "--count", 2, "--seed", 7, "--out", out, *GRID)
    assert result.exit_code == 0, result.output
    return out


def test_stats_json(runner, labels_csv):
    result = invoke(runner, "-q", "stats", "--labels", labels_csv, "--json")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["counts"] == {"healthy": 2, "multiple_diseases": 0, "rust": 3, "scab": 2}
    assert payload["total"] == 7


def test_stats_tables(runner, labels_csv):
    rich_table = invoke(runner, "-q", "stats", "--labels", labels_csv)
    assert rich_table.exit_code == 0
    assert "Class distribution" in rich_table.stdout
    assert "multiple_diseases" in rich_table.stdout
    plain = invoke(runner, "-q", "stats", "--labels", labels_csv, "--plain")
    assert plain.exit_code == 0
    lines = plain.stdout.splitlines()
    assert lines[0].split() == ["|", "class", "|", "count", "|"]
    assert lines[-1].split() == ["|", "total", "|", "7", "|"]


def test_plan_json(runner, labels_csv):
    result = invoke(runner, "-q", "plan", "--labels", labels_csv, "--json")
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["quota"] == {"healthy": 1, "multiple_diseases": 3, "rust": 0, "scab": 1}
    assert payload["total"] == 5


def test_generate_is_reproducible(runner, tmp_path, labels_csv, image_root):
    outputs = []
    for name in ("a", "b"):
        result = invoke(runner, "generate", "--labels", labels_csv, "--images", image_root,
                        "--count", 1, "--seed", 7, "--out", tmp_path / name, *GRID)
        assert result.exit_code == 0, result.output
        outputs.append(tmp_path / name)
    for suffix in (".png", ".csv"):
        first, second = (d / f"train_0{suffix}" for d in outputs)
        assert first.read_bytes() == second.read_bytes()
    rows = parse_annotations((outputs[0] / "train_0.csv").read_text(encoding="utf-8"))
    assert all(r.bbox[2:] == (8, 6) for r in rows)


def test_generate_names_pairs_by_index(mosaics_dir):
    assert sorted(p.name for p in mosaics_dir.iterdir()) == [
        "train_0.csv", "train_0.png", "train_1.csv", "train_1.png"]


def test_fuse_wbf(runner, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps([{"box": [0, 0, 10, 10], "score": 0.6, "label": 0}]))
    b.write_text(json.dumps([{"box": [2, 0, 12, 10], "score": 0.4, "label": 0}]))
    out = tmp_path / "fused.json"
    result = invoke(runner, "fuse", "--method", "wbf", "--iou", 0.55, a, b, "--out", out)
    assert result.exit_code == 0
    fused = json.loads(out.read_text())
    assert len(fused) == 1
    assert fused[0]["box"] == pytest.approx([0.8, 0.0, 10.8, 10.0])
    assert fused[0]["score"] == pytest.approx(0.5)


def test_fuse_nms(runner, tmp_path):
    a = tmp_path / "a.json"
    a.write_text(json.dumps([{"box": [0, 0, 10, 10], "score": 0.9},
                             {"box": [1, 1, 11, 11], "score": 0.8}]))
    out = tmp_path / "kept.json"
    assert invoke(runner, "fuse", "--method", "nms", a, "--out", out).exit_code == 0
    assert [b["score"] for b in json.loads(out.read_text())] == [0.9]


def test_fuse_rejects_non_list(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"box": [0, 0, 1, 1]}))
    assert invoke(runner, "fuse", bad).exit_code == 1


def test_fuse_rejects_entries_without_score(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps([{"box": [0, 0, 1, 1]}]))
    result = invoke(runner, "fuse", bad)
    assert result.exit_code == 1
    assert "malformed" in result.stderr


def test_lr_dump(runner, tmp_path):
    out = tmp_path / "lr.csv"
    result = invoke(runner, "lr-dump", "--epochs", 8, "--out", out)
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "epoch,lr"
    assert len(lines) == 9
    assert lines[1] == "0,1e-05"
    assert lines[6] == "5,0.001"


def test_evaluate(runner, tmp_path):
    preds = tmp_path / "preds.csv"
    preds.write_text("truth,predicted\nrust,rust\nscab,scab\nhealthy,rust\nrust,rust\n")
    out = tmp_path / "report.json"
    result = invoke(runner, "evaluate", preds, "--identifier-acc", 0.75, "--out", out)
    assert result.exit_code == 0
    report = json.loads(out.read_text())
    assert report["accuracy"] == pytest.approx(0.75)
    assert report["bounds"]["upper_bound"] == pytest.approx(0.75)


def test_evaluate_with_detections(runner, tmp_path):
    preds = tmp_path / "preds.csv"
    preds.write_text("truth,predicted\nrust,rust\nscab,scab\nhealthy,rust\nrust,rust\n")
    annotations = tmp_path / "train_0.csv"
    annotations.write_text(
        "id,bbox,class label\n"
        'Train_0.jpg,"[0, 0, 64, 43]",0\n'
        'Train_1.jpg,"[64, 0, 64, 43]",1\n'
        'Train_2.jpg,"[128, 0, 64, 43]",1\n')
    boxes = tmp_path / "boxes.json"
    boxes.write_text(json.dumps([{"box": [64, 0, 128, 43], "score": 0.8, "label": 0},
                                 {"box": [400, 400, 450, 450], "score": 0.2, "label": 0}]))
    out = tmp_path / "report.json"
    result = invoke(runner, "evaluate", preds, "--detections", boxes,
                    "--annotations", annotations, "--out", out)
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert set(report) >= {"confusion", "per_class", "accuracy", "confidence", "bounds"}
    assert report["confidence"]["avg_positive_confidence"] == pytest.approx(0.8)
    assert report["confidence"]["avg_negative_confidence"] == pytest.approx(0.2)
    assert report["identifier_accuracy"] == pytest.approx(0.5)
    assert report["bounds"]["independent_estimate"] == pytest.approx(0.375)


def test_evaluate_detections_need_annotations(runner, tmp_path):
    preds = tmp_path / "preds.csv"
    preds.write_text("truth,predicted\nrust,rust\n")
    boxes = tmp_path / "boxes.json"
    boxes.write_text("[]")
    assert invoke(runner, "evaluate", preds, "--detections", boxes).exit_code == 2


def test_evaluate_rejects_missing_columns(runner, tmp_path):
    preds = tmp_path / "preds.csv"
    preds.write_text("a,b\nrust,rust\n")
    assert invoke(runner, "evaluate", preds).exit_code == 1


def test_simulate_with_perfect_oracles(runner, tmp_path, mosaics_dir, labels_csv, image_root):
    out = tmp_path / "report.json"
    result = invoke(runner, "simulate", "--mosaics", mosaics_dir, "--labels", labels_csv,
                    "--images", image_root, "--miss-rate", 0, "--error-rate", 0,
                    "--seed", 1, "--out", out, *GRID)
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert report["mosaics"] == 2
    assert "diagnoses" not in report
    if report["sick_tiles"]:
        assert report["end_to_end_accuracy"] == 1.0


def test_simulate_with_tta_adds_identity(runner, tmp_path, mosaics_dir, labels_csv, image_root):
    out = tmp_path / "report.json"
    result = invoke(runner, "simulate", "--mosaics", mosaics_dir, "--labels", labels_csv,
                    "--images", image_root, "--miss-rate", 0, "--error-rate", 0,
                    "--tta", "hflip", "--diagnoses", "--out", out, *GRID)
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert len(report["diagnoses"]) == sum(
        len(parse_annotations(p.read_text(encoding="utf-8")))
        for p in mosaics_dir.glob("*.csv"))


def test_simulate_correlated_needs_oracles(runner, mosaics_dir, labels_csv, image_root):
    result = invoke(runner, "simulate", "--mosaics", mosaics_dir, "--labels", labels_csv,
                    "--images", image_root, "--correlated", "--classifier", "baseline", *GRID)
    assert result.exit_code == 2


def test_split(runner, tmp_path, labels_csv):
    out = tmp_path / "split"
    result = invoke(runner, "split", "--labels", labels_csv, "--test-fraction", 0.3,
                    "--seed", 4, "--out", out)
    assert result.exit_code == 0
    train, test = read_label_table(out / "train.csv"), read_label_table(out / "test.csv")
    assert (len(train), len(test)) == (5, 2)
    assert {r.image_id for r in train} | {r.image_id for r in test} == {
        r.image_id for r in read_label_table(labels_csv)}


def test_augment(runner, tmp_path, mosaics_dir):
    out = tmp_path / "mixed"
    result = invoke(runner, "augment", "--in", mosaics_dir, "--out", out,
                    "--probability", 1, "--seed", 2, *GRID)
    assert result.exit_code == 0, result.output
    assert sorted(p.name for p in out.iterdir()) == sorted(p.name for p in mosaics_dir.iterdir())


def test_synthesize_needs_a_source_for_every_class(runner, tmp_path, labels_csv, image_root):
    out = tmp_path / "synthetic"
    result = invoke(runner, "synthesize", "--labels", labels_csv, "--images", image_root,
                    "--seed", 3, "--out", out)
    assert result.exit_code == 1
    assert not (out / "labels.csv").exists()


def tree_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def run_twice(runner, tmp_path, *args):
    """Run a command into ``tmp_path/a`` and ``tmp_path/b``; return both output trees."""
    trees = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = invoke(runner, *args, "--out", out)
        assert result.exit_code == 0, result.output
        trees.append(tree_bytes(out) if out.is_dir() else {"report": out.read_bytes()})
    return trees


def test_generate_accepts_negative_seed(runner, tmp_path, labels_csv, image_root):
    first, second = run_twice(runner, tmp_path, "generate", "--labels", labels_csv,
                              "--images", image_root, "--count", 2, "--seed=-1", *GRID)
    assert first == second
    assert sorted(first) == ["train_0.csv", "train_0.png", "train_1.csv", "train_1.png"]


def test_synthesize_balances_the_table(runner, tmp_path, all_classes_csv, image_root):
    first, second = run_twice(runner, tmp_path, "synthesize", "--labels", all_classes_csv,
                              "--images", image_root, "--seed", 3, "--rotate", "180")
    assert first == second
    novel = read_label_table(tmp_path / "a" / "labels.csv")
    assert sorted(r.image_id for r in novel) == [
        "synth_healthy_0.png", "synth_multiple_diseases_0.png", "synth_multiple_diseases_1.png",
        "synth_scab_0.png"]
    assert sorted(first) == sorted([r.image_id for r in novel] + ["labels.csv"])
    combined = read_label_table(all_classes_csv) + novel
    assert set(class_distribution(combined).as_dict().values()) == {3}


def test_split_is_reproducible(runner, tmp_path, all_classes_csv):
    first, second = run_twice(runner, tmp_path, "split", "--labels", all_classes_csv,
                              "--test-fraction", 0.25, "--seed", 9)
    assert first == second
    assert len(read_label_table(tmp_path / "a" / "test.csv")) == 2


def test_augment_is_reproducible(runner, tmp_path, mosaics_dir):
    first, second = run_twice(runner, tmp_path, "augment", "--in", mosaics_dir,
                              "--probability", 1, "--cutout", 0.5, "--seed", 2, *GRID)
    assert first == second


def test_simulate_is_reproducible(runner, tmp_path, mosaics_dir, labels_csv, image_root):
    first, second = run_twice(runner, tmp_path, "simulate", "--mosaics", mosaics_dir,
                              "--labels", labels_csv, "--images", image_root,
                              "--miss-rate", 0.3, "--false-alarm-rate", 0.1,
                              "--error-rate", 0.2, "--workers", 3, "--diagnoses",
                              "--seed", 5, *GRID)
    assert first == second


def test_unknown_command(runner):
    assert invoke(runner, "frobnicate").exit_code == 2


def test_missing_label_table(runner, tmp_path):
    result = invoke(runner, "stats", "--labels", tmp_path / "absent.csv")
    assert result.exit_code == 1
