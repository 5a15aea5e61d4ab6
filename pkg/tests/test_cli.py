import io
import json

import pytest

from finitary_beta import free_group
from finitary_beta.cli import end_to_end, join_list_values, run
from finitary_beta.prob import ProbVector


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, out, err = invoke(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def vectors(tmp_path):
    paths = {}
    for name, weights in {
        "half": [0.5, 0.5],
        "p3": [0.5, 0.3, 0.2],
        "uniform4": [0.25] * 4,
        "half_eighths": [0.5, 0.125, 0.125, 0.125, 0.125],
    }.items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({"p": weights}))
        paths[name] = str(path)
    return paths


def test_beta_closed(vectors):
    doc = invoke_json("beta", "--p", vectors["half"], "--t", "2", "--closed")
    assert doc["results"][0]["closed_form"] == pytest.approx(0.5)


def test_beta_limit_and_csv(vectors):
    doc = invoke_json("beta", "--p", vectors["p3"], "--t", "0,2", "--limit", "4")
    assert doc["results"][1]["limit_exact"][-1]["value"] == pytest.approx(0.38, rel=1e-12)
    code, out, _ = invoke("beta", "--p", vectors["p3"], "--t", "2", "--closed", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "t,closed,limit_n,mc,stderr"


def test_beta_mc_is_byte_identical(vectors):
    argv = ["beta", "--p", vectors["p3"], "--t", "-1,2", "--mc", "--n", "6", "--samples", "5000", "--seed", "4"]
    first = invoke(*argv)
    second = invoke(*argv)
    assert first[0] == 0
    assert first[1] == second[1]


def test_distinguish(vectors):
    doc = invoke_json("distinguish", "--p", vectors["uniform4"], "--q", vectors["half_eighths"])
    assert doc["summary"] == (
        "entropy equal (ln 4), beta differs at t=2: 0.25 vs 0.3125 → NOT permutation-equivalent")
    assert doc["power_sums_agree"] is False


def test_recover():
    doc = invoke_json("recover", "--power-sums", "1,0.625", "--m", "2")
    assert doc["vector"] == pytest.approx([0.75, 0.25], abs=1e-12)


def test_recover_inconsistent_exits_three():
    code, out, err = invoke("recover", "--power-sums", "1,0.3", "--m", "2")
    assert code == 3
    assert out == ""
    assert len(err.strip().splitlines()) == 1
    assert "Inconsistent power sums" in err


def test_power_sums(vectors):
    doc = invoke_json("power-sums", "--p", vectors["p3"])
    assert doc["power_sums"] == pytest.approx([1.0, 0.38, 0.16])


def test_validation_errors_exit_two(tmp_path, vectors):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"p": [0.5, -0.5]}))
    assert invoke("beta", "--p", str(bad), "--t", "2", "--closed")[0] == 2
    assert invoke("beta", "--p", vectors["half"], "--closed")[0] == 2
    assert invoke("ball", "--ell", "2", "--gen", "3", "--radius", "1")[0] == 2
    assert invoke("distinguish", "--p", vectors["half"], "--q", vectors["p3"], "--format", "csv")[0] == 2
    assert invoke("ball", "--ell", "3", "--radius", "12", "--cap", "1000")[0] == 2


def test_unknown_flag_prints_usage():
    code, out, err = invoke("beta", "--bogus")
    assert code == 2
    assert out == ""
    assert "usage" in err


def test_list_flags_may_start_with_a_minus_sign(vectors):
    assert join_list_values(["--t", "-1,2", "--n", "3"]) == ["--t=-1,2", "--n", "3"]
    assert join_list_values(["--t", "-.5"]) == ["--t=-.5"]
    assert join_list_values(["--t", "--closed"]) == ["--t", "--closed"]
    doc = invoke_json("beta", "--p", vectors["p3"], "--t", "-1,2", "--closed")
    assert [row["t"] for row in doc["results"]] == [-1.0, 2.0]
    assert doc["results"][0]["closed_form"] == pytest.approx(1 / 0.5 + 1 / 0.3 + 1 / 0.2)


def test_ball(vectors):
    doc = invoke_json("ball", "--ell", "2", "--radius", "2")
    assert doc["cardinality"] == doc["closed_form"] == 17
    assert doc["elements"][:3] == ["e", "a1", "A1"]
    code, out, _ = invoke("ball", "--ell", "1", "--radius", "1", "--format", "csv")
    assert out.splitlines() == ["index,word,length", "0,e,0", "1,a1,1", "2,A1,1"]


def test_enum_wa_and_bounds():
    doc = invoke_json("enum-wa", "--ell", "2", "--n", "5")
    assert doc["elements"] == ["e", "a1", "a1a1", "a2a1", "A2a1"]
    doc = invoke_json("check-bounds", "--ell", "2", "--n", "2000")
    assert doc["ok"] is True
    assert doc["wa_first_violation"] is None
    assert doc["complement_first_violation"] is None
    assert invoke("check-bounds", "--ell", "1", "--n", "10")[0] == 2


def test_check_bounds_enumerates_once(monkeypatch):
    calls = []
    original = free_group.enumerate_Wa

    def counting(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(free_group, "enumerate_Wa", counting)
    assert invoke_json("check-bounds", "--ell", "2", "--n", "500")["ok"] is True
    assert len(calls) == 1


def test_code_stats(vectors):
    doc = invoke_json("code-stats", "--ell", "1", "--p", vectors["half"], "--builtin", "e-then-a")
    assert doc["stats"]["v_mean"] == pytest.approx(2.0)
    doc = invoke_json("code-stats", "--ell", "2", "--p", vectors["half"], "--builtin", "parity",
                      "--radius", "1", "--horizon", "2")
    assert doc["m_phi_at_seed"] == 1
    assert doc["a_phi_at_seed"] == 0
    code, out, _ = invoke("code-stats", "--ell", "1", "--p", vectors["half"], "--builtin", "e-then-a",
                          "--format", "csv")
    assert out.splitlines()[0] == "n,tail_n"
    doc = invoke_json("code-stats", "--ell", "2", "--p", vectors["half"], "--builtin", "identity",
                      "--horizon", "0")
    assert doc["a_phi_at_seed"] == "unbounded-below"


def test_code_stats_from_file(tmp_path, vectors):
    code_file = tmp_path / "code.json"
    code_file.write_text(json.dumps({
        "kind": "adaptive", "rank": 1, "m": 2, "n": 2,
        "tree": {"query": "e", "branches": {"1": {"leaf": 2}, "2": {"leaf": 1}}},
    }))
    doc = invoke_json("code-stats", "--ell", "1", "--p", vectors["half"], "--code", str(code_file))
    assert doc["stats"]["v_mean"] == pytest.approx(1.0)


def test_cocycle_check(vectors):
    doc = invoke_json("cocycle-check", "--p", vectors["p3"], "--trials", "60", "--max-power", "10")
    assert doc["ok"] is True
    assert doc["cocycle_identity_max_defect"] < 1e-10


@pytest.mark.parametrize("ell, outer", [(2, 2), (3, 2)])
def test_weakmix_check(vectors, ell, outer):
    doc = invoke_json("weakmix-check", "--p", vectors["p3"], "--ell", str(ell), "--N", "1",
                      "--outer", str(outer), "--trials", "20")
    assert doc["ok"] is True
    assert doc["h_plus_in_HC_plus"] and doc["h_minus_in_HC_minus"]


def test_restricted_beta(vectors):
    doc = invoke_json("restricted-beta", "--p", vectors["p3"], "--t", "2", "--n", "10,20,40,80",
                      "--fix", '{"assign": [["e", 1], ["a1", 2]]}')
    gaps = [abs(row["log_gap"]) for row in doc["rows"]]
    assert all(big / small >= 1.8 for big, small in zip(gaps, gaps[1:]))
    assert invoke("restricted-beta", "--p", vectors["p3"], "--t", "2", "--n", "2",
                  "--fix", '{"assign": [["e", 1], ["a1", 2]]}')[0] == 2


def test_pressure(vectors):
    doc = invoke_json("pressure", "--p", vectors["p3"], "--t", "2", "--n", "4")
    row = doc["results"][0]
    assert row["exp_pressure"] == pytest.approx(0.38)
    assert row["separated_sets"] == pytest.approx(row["pressure"])


def _assert_positive_instance(report):
    checks = dict(report["checks"])
    # sampled marginals are judged separately with a wider band
    checks.pop("pushforward_within_3_sigma")
    assert all(checks.values()), checks
    assert report["pushforward"]["max_z"] < 5
    assert report["expected_v"] == pytest.approx(1.0)
    assert report["m_phi"] == 0
    assert report["a_phi"] == -1


def test_end_to_end_cli(vectors):
    doc = invoke_json("end-to-end", "--p", vectors["p3"], "--perm", "(2 3)")
    _assert_positive_instance(doc)
    assert doc["q"] == [0.5, 0.2, 0.3]
    assert all(row["beta_p"] == row["beta_q"] for row in doc["beta"])
    assert "NOT permutation-equivalent" in doc["negative_instance"]


def test_end_to_end_identity_permutation():
    report = end_to_end(ProbVector([0.6, 0.4]), [1, 2], samples=20_000)
    _assert_positive_instance(report)
    assert report["q"] == report["p"]


def test_end_to_end_rejects_bad_permutation(vectors):
    assert invoke("end-to-end", "--p", vectors["p3"], "--perm", "(1 4)")[0] == 2
