import math

import numpy as np
import pytest

from pygraphonldp.General import ValidationError, triu_pack
from pygraphonldp.Graphon import Graphon
from pygraphonldp.Rate import rate_I, rel_entropy
from pygraphonldp.Eigen import constants, operator_norm
from pygraphonldp.Solver import (
    PsiProblem,
    SolverResult,
    psi_solve,
    is_rank1,
    scaling_experiment,
    psi_resolution_study,
)


def test_psi_is_infinite_outside_unit_interval():
    r = Graphon.constant(4, 0.5)
    for beta in (1.5, -0.1):
        res = psi_solve(r, beta)
        assert res.isInfinite()
        assert res.h_opt is None
        assert res.toInfo()["psi"] == "inf"
    assert SolverResult.infinite(2.0).toInfo()["constraint_residual"] is None


def test_psi_vanishes_at_reference_norm():
    r = Graphon.constant(8, 0.5)
    res = psi_solve(r, constants(r).C)
    assert res.psi == pytest.approx(0.0, abs=1e-12)
    assert np.abs(res.h_opt.values - r.values).max() <= 1e-8
    assert res.constraint_residual <= 1e-5


def test_psi_constant_reference_upper_deviation():
    r = Graphon.constant(8, 0.5)
    res = psi_solve(r, 0.55)
    assert 0.0045 <= res.psi <= 0.0056
    assert res.psi == pytest.approx(rel_entropy(0.55, 0.5), abs=1e-7)
    assert np.allclose(res.h_opt.values, 0.55, atol=1e-6)


def test_psi_solver_result_invariants(xy):
    r = xy(8)
    consts = constants(r)
    beta = consts.C + 0.03
    res = psi_solve(r, beta)
    assert res.constraint_residual <= 1e-5
    assert abs(operator_norm(res.h_opt).value - beta) == pytest.approx(res.constraint_residual, abs=1e-12)
    assert 0.0 <= res.h_opt.values.min() and res.h_opt.values.max() <= 1.0
    assert np.array_equal(res.h_opt.values, res.h_opt.values.T)
    assert res.psi == rate_I(res.h_opt, r).value
    assert res.psi > 0.0
    # the rescaled reference r * beta / C_r is feasible, so it bounds psi from above
    assert res.psi <= rate_I(Graphon(r.values * beta / consts.C), r).value + 1e-9
    assert [s["start"] for s in res.starts] == ["rescaled", "warm", "random"]
    assert res.start in ("rescaled", "warm", "random")
    info = res.toInfo()
    assert "trace" not in info
    assert info["m"] == 8


def test_psi_solver_without_warm_start(xy):
    res = psi_solve(xy(8), constants(xy(8)).C + 0.03, warm_start=False)
    assert [s["start"] for s in res.starts] == ["rescaled", "random"]


def test_merit_decreases_within_each_outer_iteration(xy):
    r = xy(8)
    res = psi_solve(r, constants(r).C + 0.04)
    trace = res.toInfo(verbose=True)["trace"]
    assert len(trace) > 0
    for a, b in zip(trace, trace[1:]):
        if a["outer"] == b["outer"]:
            assert b["merit"] <= a["merit"] + 1e-12
            assert b["iteration"] == a["iteration"] + 1


def test_psi_problem_gradients_match_central_differences(random_graphon, rng):
    r = random_graphon(5, 0.2, 0.8)
    problem = PsiProblem(r, 0.6)
    x = triu_pack(random_graphon(5, 0.2, 0.8).values)
    t = 1e-6
    _, gf = problem.objective(x)
    _, gm = problem.merit(x, 0.3, 10.0)
    for _ in range(10):
        i = int(rng.integers(0, x.shape[0]))
        e = np.zeros_like(x)
        e[i] = t
        df = (problem.objective(x + e)[0] - problem.objective(x - e)[0]) / (2 * t)
        dm = (problem.merit(x + e, 0.3, 10.0)[0] - problem.merit(x - e, 0.3, 10.0)[0]) / (2 * t)
        assert df == pytest.approx(gf[i], rel=1e-5, abs=1e-9)
        assert dm == pytest.approx(gm[i], rel=1e-5, abs=1e-9)


def test_psi_is_monotone_away_from_reference_norm():
    r = Graphon.constant(8, 0.5)
    C = constants(r).C
    above = [psi_solve(r, C + d).psi for d in (0.02, 0.05, 0.1)]
    below = [psi_solve(r, C - d).psi for d in (0.02, 0.05, 0.1)]
    assert above[0] < above[1] < above[2]
    assert below[0] < below[1] < below[2]
    assert below[2] == pytest.approx(rel_entropy(0.4, 0.5), abs=1e-7)


def test_is_rank1(xy):
    assert is_rank1(Graphon.constant(5, 0.3))
    assert is_rank1(xy(16))
    assert not is_rank1(Graphon([[0.2, 0.6], [0.6, 0.2]]))


def test_scaling_experiment_constant_reference():
    r = Graphon.constant(32, 0.5)
    calls = []
    report = scaling_experiment(r, [0.1, 0.05, 0.025], progress_callback=lambda d, t: calls.append((d, t)))
    assert calls[-1] == (3, 3)
    assert report.consts.K == pytest.approx(2.0)
    assert all(0.85 <= q <= 1.15 for q in report.ratio_list)
    deviations = [abs(q - 1.0) for q in report.ratio_list]
    assert all(b <= a + 1e-4 for a, b in zip(deviations, deviations[1:]))
    assert deviations[0] == pytest.approx(0.0068, abs=0.0005)
    assert deviations[-1] <= 1e-3
    assert all(d < 0.01 for d in report.minimizer_dirs)
    lines = report.toCsv().splitlines()
    assert lines[0] == "eps,psi,ratio,minimizer_dir"
    assert len(lines) == 4
    assert not any(row["flagged"] for row in report.toInfo()["rows"])


def test_scaling_experiment_product_reference(xy):
    report = scaling_experiment(xy(16), [0.05, 0.02], warm_start=False)
    dirs = report.minimizer_dirs
    assert dirs[0] <= 0.25
    assert dirs[-1] <= dirs[0] + 1e-3
    assert all(abs(q - 1.0) < 0.2 for q in report.ratio_list)


def test_scaling_experiment_product_reference_direction_decreases(xy):
    report = scaling_experiment(xy(32), [0.1, 0.05, 0.025], warm_start=False)
    dirs = report.minimizer_dirs
    assert dirs[0] > dirs[1] > dirs[2]
    assert all(d <= 0.25 for d in dirs)
    assert all(0.85 <= q <= 1.15 for q in report.ratio_list)
    assert not any(row.isFlagged() for row in report.rows)


def test_scaling_experiment_flags_failed_rows():
    report = scaling_experiment(Graphon.constant(8, 0.5), [0.6, 0.05])
    flagged = report.rows[0]
    assert flagged.isFlagged() and flagged.error == "validation"
    assert math.isnan(flagged.psi)
    assert not report.rows[1].isFlagged()
    assert report.toInfo()["rows"][0] == {"eps": 0.6, "flagged": True, "error": "validation"}


def test_scaling_experiment_rejects_bad_input():
    assert scaling_experiment(Graphon.constant(4, 0.5), []).toCsv() == "eps,psi,ratio,minimizer_dir\n"
    with pytest.raises(ValidationError):
        scaling_experiment(Graphon([[0.2, 0.6], [0.6, 0.2]]), [0.05])
    with pytest.raises(ValidationError):
        scaling_experiment(Graphon.constant(4, 0.5), [0.05, 0.0])


def test_psi_resolution_study():
    rows = psi_resolution_study("builtin:const:0.5", beta=0.55, m_list=(4, 8))
    assert [row["m"] for row in rows] == [4, 8]
    for row in rows:
        assert row["C_r"] == pytest.approx(0.5)
        assert row["psi"] == pytest.approx(rel_entropy(0.55, 0.5), abs=1e-7)
        assert row["residual"] <= 1e-5
    rows = psi_resolution_study("builtin:const:0.5", eps=0.6, m_list=(4,))
    assert rows[0]["psi"] == "inf" and rows[0]["residual"] is None
    with pytest.raises(ValidationError):
        psi_resolution_study("builtin:const:0.5", m_list=(4,))
    with pytest.raises(ValidationError):
        psi_resolution_study("builtin:const:0.5", beta=0.5, eps=0.1, m_list=(4,))
