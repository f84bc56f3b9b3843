import json

import pytest
from click.testing import CliRunner

from lsskit import docio, fixtures
from lsskit.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def _doc(tmp_path, fx, name=None, maps=None):
    doc = docio.space_document(fx.space, fx.metric, fx.scales).to_json()
    if maps:
        doc["maps"] = maps
    p = tmp_path / f"{name or fx.name}.json"
    p.write_text(docio.dumps(doc))
    return str(p)


def _cert(result):
    return json.loads(result.stdout)


def test_bsm_check_d23(runner, tmp_path):
    res = runner.invoke(main, ["bsm", "check", _doc(tmp_path, fixtures.D23()), "--base", "Comp"])
    assert res.exit_code == 0, res.output
    assert _cert(res)["result"]["bound"] == 1


def test_net_compute_all_p5(runner, tmp_path):
    res = runner.invoke(main, ["net", "compute", _doc(tmp_path, fixtures.P5()), "--scale", "Balls1", "--all"])
    assert res.exit_code == 0
    assert _cert(res)["result"]["count"] == 4


def test_map_classify_collapse(runner, tmp_path):
    fx = fixtures.D23()
    src = _doc(tmp_path, fx, maps={"collapse": {lab: "a1" for lab in fx.ground.labels}})
    res = runner.invoke(main, ["map", "classify", src, "--map", "collapse"])
    assert res.exit_code == 1
    out = _cert(res)
    assert out["verdict"] == "false" and out["result"]["coarse_embedding"] is False
    assert out["result"]["coarse_embedding_counterexample"] == ["a1", "a2"]


def test_map_invert_identity(runner, tmp_path):
    fx = fixtures.D23()
    src = _doc(tmp_path, fx, maps={"id": {lab: lab for lab in fx.ground.labels}})
    res = runner.invoke(main, ["map", "invert", src, "--map", "id"])
    assert res.exit_code == 0
    inv = _cert(res)["result"]["inverse"]
    assert inv == {lab: lab for lab in fx.ground.labels}


def test_certificates_reverify(runner, tmp_path):
    space = _doc(tmp_path, fixtures.P5())
    out = tmp_path / "cert.json"
    res = runner.invoke(main, ["bsm", "check", space, "--base", "Balls1", "--mode", "all-nets", "--out", str(out)])
    assert res.exit_code == 0
    ok = runner.invoke(main, ["verify", str(out)])
    assert ok.exit_code == 0 and json.loads(ok.stdout)["agrees"] is True
    cert = json.loads(out.read_text())
    cert["result"]["bound"] += 1
    out.write_text(docio.dumps(cert))
    assert runner.invoke(main, ["verify", str(out)]).exit_code == 1


def test_search_exhausted_is_exit_3(runner, tmp_path):
    space = _doc(tmp_path, fixtures.D23())
    res = runner.invoke(main, ["propa", "search", space, "--epsilon", "1/100", "--test", "Comp", "--support", "Singletons"])
    assert res.exit_code == 3
    assert _cert(res)["verdict"] == "exhausted"


def test_search_and_verify_witness(runner, tmp_path):
    space = _doc(tmp_path, fixtures.D23())
    wit = tmp_path / "w.json"
    res = runner.invoke(main, ["propa", "search", space, "--epsilon", "1/100", "--test", "Comp", "--support", "Comp",
                               "--witness-out", str(wit)])
    assert res.exit_code == 0
    assert runner.invoke(main, ["propa", "verify", space, str(wit)]).exit_code == 0
    conv = tmp_path / "sako.json"
    res = runner.invoke(main, ["coarse", "convert-witness", space, str(wit), "--witness-out", str(conv)])
    assert res.exit_code == 0
    assert runner.invoke(main, ["coarse", "verify-sako", space, str(conv)]).exit_code == 0


def test_oracle_limit_is_exit_2(runner, tmp_path):
    space = _doc(tmp_path, fixtures.path(12))
    res = runner.invoke(main, ["net", "compute", space, "--scale", "Balls1", "--all"], env={"LSSKIT_ORACLE_LIMIT": "5"})
    assert res.exit_code == 2
    assert "LSSKIT_ORACLE_LIMIT" in res.stderr


def test_bad_document_is_exit_2(runner, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"ground": ["x"], "metric": [[0]]')
    res = runner.invoke(main, ["space", "validate", str(p)])
    assert res.exit_code == 2 and ":1:" in res.stderr


def test_unknown_flag(runner, tmp_path):
    res = runner.invoke(main, ["space", "validate", _doc(tmp_path, fixtures.P5()), "--bogus"])
    assert res.exit_code == 2


def test_coarse_convert(runner, tmp_path):
    res = runner.invoke(main, ["coarse", "convert", _doc(tmp_path, fixtures.D23())])
    assert res.exit_code == 0
    assert _cert(res)["result"]["uniformly_locally_finite"] == 3


@pytest.mark.parametrize("args", [
    ["path", "--n", "6"], ["components", "--sizes", "2,3"], ["grid", "--d", "2"],
    ["product", "--t", "2"], ["random", "--n", "7", "--seed", "11"],
])
def test_fixture_generation_is_deterministic(runner, args):
    a = runner.invoke(main, ["fixtures", "generate", *args])
    b = runner.invoke(main, ["fixtures", "generate", *args])
    assert a.exit_code == 0 and a.stdout == b.stdout
    docio.parse_space_text(a.stdout).build()


def test_generated_d23_matches_fixture(runner):
    out = runner.invoke(main, ["fixtures", "generate", "components", "--sizes", "2,3"]).stdout
    assert docio.parse_space_text(out).build().space == fixtures.D23().space
