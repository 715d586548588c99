import json

import matplotlib

matplotlib.use("Agg")

import pytest  # noqa: E402

from acep.scripts import acep_analyze, acep_closure, acep_metric  # noqa: E402


@pytest.fixture
def spec(tmp_path):
    path = tmp_path / "h1.json"
    path.write_text(json.dumps({"alphabet": ["x", "y"], "generators": ["xx", "Yxxy"]}))
    return str(path)


def _read(path):
    return json.loads(path.read_text())


def test_analyze_writes_report(spec, tmp_path):
    dot = tmp_path / "dot"
    code = acep_analyze.main(
        [spec, "-o", str(tmp_path), "--json", "report.json", "--dot", str(dot)]
    )
    assert code == 0
    document = _read(tmp_path / "report.json")
    assert document["verdict"] == "no_ACEP"
    assert sorted(p.name for p in dot.iterdir()) == ["core.dot", "product.dot", "stallings.dot"]
    assert (dot / "stallings.dot").read_text().startswith("digraph")


def test_analyze_prints_and_plots(spec, tmp_path, capsys):
    assert acep_analyze.main([spec, "-o", str(tmp_path), "--plot", "--skip-metric"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["constants"] is None
    assert (tmp_path / acep_analyze.PLOT_FNAME).is_file()


def test_analyze_rejects_bad_spec(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"alphabet": ["x", "y"], "generators": ["xq"]}')
    assert acep_analyze.main([str(broken)]) == 1
    assert acep_analyze.main([str(tmp_path / "missing.json")]) == 1


def test_closure_certifies(spec, tmp_path):
    code = acep_closure.main(
        [spec, "--relators", "xx", "--target", "xxyXXY", "--target", "x",
         "-o", str(tmp_path), "--json", "closure.json"]
    )
    assert code == 0
    positive, negative = _read(tmp_path / "closure.json")["targets"]
    assert positive["positive"]["verified"]
    assert positive["negative"] is None
    assert negative["positive"] is None
    assert negative["negative"]["verified"]


def test_closure_unresolved(spec, tmp_path):
    code = acep_closure.main(
        [spec, "--relators", "xx", "--target", "x", "--budget", "50", "--max-degree", "1",
         "-o", str(tmp_path), "--json", "closure.json"]
    )
    assert code == 2
    (record,) = _read(tmp_path / "closure.json")["targets"]
    assert not record["resolved"]


def test_closure_in_subgroup(spec, tmp_path):
    assert acep_closure.main([spec, "--relators", "x", "--target", "xx", "--in-subgroup"]) == 1
    code = acep_closure.main(
        [spec, "--relators", "xxxx", "--target", "xx", "--in-subgroup",
         "-o", str(tmp_path), "--json", "closure.json"]
    )
    assert code == 0
    document = _read(tmp_path / "closure.json")
    assert document["level"] == "H"
    assert document["targets"][0]["negative"]["verified"]


def test_metric(spec, tmp_path):
    code = acep_metric.main(
        [spec, "--words", "xxxx,xy", "-o", str(tmp_path), "--json", "metric.json"]
    )
    assert code == 0
    document = _read(tmp_path / "metric.json")
    assert [w["h_length"] for w in document["words"]] == [1, 2]
    assert acep_metric.main([spec, "--words", "xq"]) == 1
