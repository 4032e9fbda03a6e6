import csv
import json

import numpy as np
import pytest

from orbitconvex.scenarios import (
    SCENARIOS,
    ConfigError,
    majorization_violation,
    make_config,
    parallel_map,
    parse_action,
    run_scenario,
    saturated_suite,
)


def test_parse_action_strings_and_dicts():
    assert parse_action("O2").family == "O"
    a = parse_action("O4x3")
    assert a.rep == "diagonal" and a.ambient_dim == 12
    assert parse_action("SO3:conj").ambient_dim == 6
    assert len(parse_action("D5").elements()) == 10
    assert len(parse_action("C5").elements()) == 5
    assert len(parse_action("pm2").elements()) == 2
    assert parse_action({"family": "S", "n": 4}).ambient_dim == 4
    assert parse_action('{"family": "O", "n": 3, "rep": "diagonal", "copies": 2}').ambient_dim == 6
    for bad in ("Q3", "O", {"family": "O"}, {"family": "O", "n": 2, "colour": 1}, "{oops"):
        with pytest.raises(ConfigError):
            parse_action(bad)


def test_majorization_oracle_matches_permutohedron():
    lam = np.array([3.0, 2.0, 1.0])
    assert np.all(majorization_violation(np.array([[2.0, 2.0, 2.0], [3, 1, 2]]), lam) <= 1e-12)
    assert majorization_violation(np.array([[3.5, 1.5, 1.0]]), lam)[0] > 0


def test_parallel_map_preserves_order():
    assert parallel_map(lambda x: x * x, range(10), jobs=3) == [x * x for x in range(10)]


def test_config_errors():
    with pytest.raises(ConfigError, match="unknown"):
        make_config("schur-horn", {"colour": 1})
    with pytest.raises(ConfigError):
        make_config("orbitope-gap", {"n": 5, "k": 2})
    with pytest.raises(ConfigError):
        run_scenario("finite-counterexample", {"group": "O2"})
    with pytest.raises(ConfigError):
        run_scenario("finite-counterexample", {"group": "pm2", "v": [1, 2, 3]})


def test_schur_horn_small_cases():
    rep = run_scenario("schur-horn", {"n": 2, "eigenvalues": [1, 0], "orbit_budget": 500,
                                      "direction_budget": 50}, seed=3)
    assert rep.passed and rep.metrics["inclusion_violations"] == 0
    flat = run_scenario("schur-horn", {"n": 3, "eigenvalues": [2, 2, 2], "orbit_budget": 100,
                                       "direction_budget": 20}, seed=3)
    assert flat.passed and flat.metrics["hausdorff_gap"] == pytest.approx(0.0, abs=1e-12)


def test_schur_horn_small_budget_is_unconverged_not_failed():
    rep = run_scenario("schur-horn", {"n": 4, "orbit_budget": 50, "direction_budget": 100, "tol": 0.01}, seed=1)
    assert rep.status == "unconverged"
    assert rep.metrics["inclusion_violations"] == 0


def test_two_by_two_diagonals_fill_segment():
    rep = run_scenario("schur-horn", {"n": 2, "eigenvalues": [1, 0], "orbit_budget": 2000,
                                      "direction_budget": 20}, seed=5)
    assert rep.metrics["hausdorff_gap"] <= 1e-2


def test_fat_section_small_and_polar_case():
    rep = run_scenario("fat-section", {"n": 3, "k": 2, "orbit_budget": 2000, "pairs": 10,
                                       "sample_check_points": 20}, seed=2)
    assert rep.passed
    polar = run_scenario("fat-section", {"n": 3, "k": 1, "orbit_budget": 500, "pairs": 5,
                                         "sample_check_points": 10}, seed=2)
    assert polar.passed
    zero = run_scenario("fat-section", {"n": 3, "k": 2, "v": [0, 0, 0, 0], "orbit_budget": 200,
                                        "pairs": 3, "sample_check_points": 5}, seed=2)
    assert zero.metrics["inclusion_violations"] == 0


def test_orbitope_gap_three_two():
    rep = run_scenario("orbitope-gap", {"n": 3, "k": 2}, seed=4)
    assert rep.passed
    assert rep.metrics["projected_dimension"] == 3 and rep.metrics["orbitope_dimension"] == 4
    degenerate = run_scenario("orbitope-gap", {"n": 3, "k": 2, "v": [0, 0, 0, 0]}, seed=4)
    assert degenerate.verdict == "degenerate-seed"


def test_finite_counterexample_guards():
    rep = run_scenario("finite-counterexample", {"group": "pm2", "v": [0, 0]}, seed=1)
    assert rep.verdict == "degenerate-seed"
    five = run_scenario("finite-counterexample", {"group": "C5", "probe_budget": 40}, seed=1)
    assert five.passed and five.metrics["orbit_size"] == 5


@pytest.mark.parametrize("action", ["S3", "O2", "D5"])
def test_fixed_points(action):
    rep = run_scenario("fixed-points", {"action": action, "translations": 3, "orbit_budget": 400}, seed=6)
    assert rep.passed
    assert rep.metrics["fat_4_3_fixed_in_section"] == rep.metrics["fat_4_3_reduced_fixed"] == 0


def test_suite_covers_required_families():
    suite = saturated_suite(50, seed=7)
    assert len(suite) == 50
    dims = {S.dim for S, _ in suite}
    fams = {S.action.family for S, _ in suite}
    assert dims == {2, 3, 4} and {"O", "S", "dihedral"} <= fams
    assert any(c for _, c in suite) and not all(c for _, c in suite)


def test_reports_are_reproducible_and_written(tmp_path):
    params = {"n": 3, "orbit_budget": 300, "direction_budget": 30}
    a = run_scenario("schur-horn", params, seed=9, output_dir=str(tmp_path / "a"))
    b = run_scenario("schur-horn", params, seed=9, output_dir=str(tmp_path / "b"))
    assert a.to_json() == b.to_json()
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert "schur-horn_seed9.json" in files and "schur-horn_seed9_values.csv" in files
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    obj = json.loads((tmp_path / "a" / "schur-horn_seed9.json").read_text())
    assert obj["config"]["seed"] == 9 and obj["status"] in ("pass", "unconverged")
    with open(tmp_path / "a" / "schur-horn_seed9_values.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["path", "value"] and any(r[0] == "metrics.hausdorff_gap" for r in rows)


def test_registry_names():
    assert set(SCENARIOS) == {"schur-horn", "fat-section", "orbitope-gap", "finite-counterexample",
                              "fixed-points", "slope-criterion"}
