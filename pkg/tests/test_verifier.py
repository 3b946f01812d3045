import json

import pytest

from core.errors import InvalidParams
from core.verifier import CheckResult, Verifier, VerifyPlanLoader, brute_sigma_counts, summarize


@pytest.fixture(scope="module")
def verifier():
    return Verifier()


def _all_pass(results):
    failing = [r for r in results if not r.passed]
    assert not failing, failing
    assert results


def test_plan_loader_modes():
    loader = VerifyPlanLoader()
    assert set(loader.grid("quick")) == set(loader.grid("full"))
    assert loader.seed == 20240601
    with pytest.raises(InvalidParams):
        loader.grid("medium")


def test_plan_loader_missing(tmp_path):
    with pytest.raises(InvalidParams):
        VerifyPlanLoader(str(tmp_path / "none.json"))


def test_unknown_family(tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"seed": 1, "quick": {"bogus": {}}, "full": {}}), encoding="utf-8")
    with pytest.raises(InvalidParams):
        Verifier(VerifyPlanLoader(str(plan))).run("quick")


def test_family_error_becomes_failed_row(tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"seed": 1, "quick": {"tail_dominance": {"cases": [[8, 3]]}}, "full": {}}), encoding="utf-8")
    results = Verifier(VerifyPlanLoader(str(plan))).run("quick")
    assert summarize(results) == (0, 1)
    assert results[0].name == "error"


def test_brute_sigma_counts():
    counts = brute_sigma_counts(4)
    assert dict(counts) == {1: 6, 2: 11, 3: 6, 4: 1}


def test_exact_moments_family(verifier):
    _all_pass(verifier.check_exact_moments({"n_max": 5}))


def test_gf_identity_family(verifier):
    _all_pass(verifier.check_gf_identity({"n_max": 30}))


def test_tail_dominance_family(verifier):
    _all_pass(verifier.check_tail_dominance({"cases": [[6, 3], [8, 4]], "gf_points": ["1", "3/2", "2"]}))


def test_glue_family(verifier):
    _all_pass(verifier.check_glue_invariants({"cases": [[60, 3, 200]], "audit": [[6, 3]]}))


def test_conjugacy_family(verifier):
    _all_pass(verifier.check_conjugacy({"cases": [[6, 3], [8, 4]], "conjugations": 2}))


def test_tv_family(verifier):
    _all_pass(verifier.check_tv_regime({"in_regime": [[12, 3]], "off_regime": [[6, 3], [6, 6]]}))


def test_chi_square_family(verifier):
    _all_pass(verifier.check_chi_square({"cases": [[6, 3, 5000]], "sigma_n": 5, "sigma_draws": 5000}))


def test_mc_family(verifier):
    _all_pass(verifier.check_mc_moments({"cases": [[6, 3, 5000]], "threads": 2}))


def test_summarize():
    rows = [CheckResult("a", "x", True), CheckResult("a", "y", False), CheckResult("b", "z", True)]
    assert summarize(rows) == (2, 1)
