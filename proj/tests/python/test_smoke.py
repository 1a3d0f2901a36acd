import math
import os
import pathlib

import pytest

import relmerge

HERE = pathlib.Path(__file__).resolve().parent
DATA = HERE.parent / "data" / "corpora"
PROFILES = HERE.parent.parent / "profiles"


def read(path):
    return pathlib.Path(path).read_text(encoding="utf-8")


def test_round_trip():
    text = read(DATA / "biored" / "corpus.txt")
    docs = relmerge.parse_pubtator(text)
    assert len(docs) == 2
    assert relmerge.parse_pubtator(relmerge.write_pubtator(docs)) == docs
    doc = docs[0]
    for m in doc.mentions:
        assert doc.text()[m.start:m.end] == m.text


def test_parse_error_carries_line():
    with pytest.raises(relmerge.ParseError, match="line 3"):
        relmerge.parse_pubtator("1|t|A\n1|a|B\n1\t0\t9\tA\tGene\tN1\n")


def test_harmonize_instances_score():
    harmonized, report = relmerge.harmonize(
        read(DATA / "biored" / "corpus.txt"), read(PROFILES / "biored.json")
    )
    assert report == ""
    instances = relmerge.generate_instances(harmonized)
    assert len(instances) == 11
    first = instances[0]
    assert first["prompt"].startswith("What is the relation in BioRED between ")
    gold = [
        (i["doc_id"], i["id1"], i["type1"], i["id2"], i["type2"], i["label"])
        for i in instances
    ]
    result = relmerge.score(gold, gold)
    assert result["f1"] == 1.0
    predicted = relmerge.baseline_predict(relmerge.instances_jsonl(harmonized))
    assert len(predicted) == len(instances)


def test_merge_tags():
    a, _ = relmerge.harmonize(read(DATA / "aimed" / "corpus.txt"), read(PROFILES / "aimed.json"))
    b, _ = relmerge.harmonize(read(DATA / "ddi" / "corpus.txt"), read(PROFILES / "ddi.json"))
    merged = relmerge.merge([a, b])
    corpora = {i["corpus"] for i in relmerge.generate_instances(merged)}
    assert corpora == {"AIMed", "DDI"}
    with pytest.raises(relmerge.ValidationError):
        relmerge.merge([a, a])


def test_paired_t_test_worked_example():
    r = relmerge.paired_t_test([80, 82, 78, 81], [75, 77, 74, 76])
    assert r["df"] == 3
    assert math.isclose(r["t"], 19.0, rel_tol=1e-12)
    assert math.isclose(r["p"], 3.18e-4, rel_tol=2e-3)


def test_sampling_is_seeded():
    ids = [f"d{i}" for i in range(10)]
    folds = relmerge.kfold_split(ids, 3, 7)
    assert sorted(sum(folds, [])) == sorted(ids)
    assert folds == relmerge.kfold_split(ids, 3, 7)
    assert relmerge.subsample(ids, 5, count=4) == relmerge.subsample(ids, 5, count=4)
    with pytest.raises(relmerge.ValidationError):
        relmerge.subsample(ids, 5)


def test_prompt_and_pairs():
    assert relmerge.build_prompt("DDI", "a", "b") == "What is the relation in DDI between a and b?"
    assert relmerge.canonicalize_pair("N1", "Gene", "D1", "Disease") == (
        "D1",
        "Disease",
        "N1",
        "Gene",
    )


def test_run_cli(tmp_path):
    out = tmp_path / "h.json"
    code, stdout, stderr = relmerge.run_cli(
        [
            "harmonize",
            "--profile",
            str(PROFILES / "bc5cdr.json"),
            "--input",
            str(DATA / "bc5cdr" / "corpus.txt"),
            "--out",
            str(out),
        ]
    )
    assert code == 0, stderr
    assert "BC5CDR" in stdout
    assert out.exists()
    code, _, stderr = relmerge.run_cli(["harmonize", "--nope"])
    assert code == 1
    assert stderr


@pytest.mark.skipif("RELMERGE_CLI" not in os.environ, reason="CLI binary not provided")
def test_cli_binary():
    import subprocess

    proc = subprocess.run(
        [os.environ["RELMERGE_CLI"], "ttest", "--xs", "/dev/null", "--ys", "/dev/null"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert proc.stderr.startswith("error:")
