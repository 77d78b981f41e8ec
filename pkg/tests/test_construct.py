import pytest

from cmvspectra.cmv import diff_norm_bound_seq
from cmvspectra.construct import ac_iterate, cantor_iterate, open_all_gaps
from cmvspectra.floquet import band_structure
from cmvspectra.odometer import make_sampling, sup_distance, to_periodic


def test_open_all_gaps_from_free_case():
    f = make_sampling((0.0, 0.0), 0.5)  # all gaps closed
    eps = 0.2
    g = open_all_gaps(f, eps, seed=1)
    assert sup_distance(f, g) < eps
    bs = band_structure(to_periodic(g), compute_masses=False)
    assert bs.open_gap_count() == bs.q


def test_open_all_gaps_short_circuits_when_already_open():
    f = make_sampling((0.3, 0.0), 0.6)  # both gaps already open
    assert open_all_gaps(f, 0.1, seed=3) is f


def test_open_all_gaps_rejects_bad_eps():
    with pytest.raises(ValueError):
        open_all_gaps(make_sampling((0.3, 0.0), 0.6), 0.0)


def test_cantor_stage_budgets_hold():
    f = make_sampling((0.3, 0.0), 0.6)
    eps = 0.9
    reports, final = cantor_iterate(f, eps, K=2, seed=7)
    assert len(reports) == 3
    prev = None
    for r in reports:
        assert r.s_norm <= r.budget_eps
        assert r.open_gap_count == r.period  # every gap open at every stage
        if r.stage > 0:
            assert r.period == 2 * prev.period
            assert r.movement is not None and r.movement < r.budget_move
            assert r.min_gap_before is not None
        prev = r
    assert final.period == 8
    # total coefficient drift below the geometric-sum bound eps^2/54
    assert sup_distance(f, final) < eps * eps / 54.0


def test_cantor_min_gap_stays_above_detection_threshold():
    f = make_sampling((0.3, 0.0), 0.6)
    reports, _ = cantor_iterate(f, 0.9, K=3, seed=7)
    for r in reports:
        assert r.min_gap_after > 1e-9


def test_cantor_movement_matches_certified_bound():
    import numpy as np

    from cmvspectra.construct import _stage_zero

    f = make_sampling((0.3, 0.0), 0.6)
    reports, final = cantor_iterate(f, 0.9, K=1, seed=7)
    # replay stage 0 with the same seed to recover the intermediate sequence,
    # then recompute the certified stage-1 movement independently
    cand, _, _ = _stage_zero(f, 0.9, np.random.default_rng(7))
    expected = diff_norm_bound_seq(to_periodic(cand), to_periodic(final))
    assert reports[1].movement == pytest.approx(expected, rel=1e-9)


def test_cantor_deterministic_under_seed():
    f = make_sampling((0.3, 0.0), 0.6)
    _, a = cantor_iterate(f, 0.9, K=2, seed=11)
    _, b = cantor_iterate(f, 0.9, K=2, seed=11)
    _, c = cantor_iterate(f, 0.9, K=2, seed=12)
    assert a.table == b.table
    assert a.table != c.table


def test_cantor_validates_arguments():
    f = make_sampling((0.3, 0.0), 0.6)
    with pytest.raises(ValueError):
        cantor_iterate(f, -1.0, K=1)
    with pytest.raises(ValueError):
        cantor_iterate(f, 0.5, K=-1)


def test_ac_iterate_enforces_drift_cap():
    f = make_sampling((0.3, 0.0), 0.6)
    t = 1.5
    reports, final = ac_iterate(f, 0.9, K=2, u={0: 1.0}, t=t, seed=7)
    for r in reports:
        if r.stage > 0:
            assert r.density_drift is not None
            assert r.density_drift ** (1.0 / t) <= 2.0**-r.stage + 1e-12
    assert final.period == 8


def test_ac_iterate_validates_arguments():
    f = make_sampling((0.3, 0.0), 0.6)
    with pytest.raises(ValueError):
        ac_iterate(f, 0.9, 1, u={0: 1.0}, t=2.5, seed=0)
    with pytest.raises(ValueError):
        ac_iterate(f, 0.9, 1, u={}, t=1.5, seed=0)


def test_stage_reports_serialize():
    f = make_sampling((0.3, 0.0), 0.6)
    reports, _ = cantor_iterate(f, 0.9, K=1, seed=7)
    for r in reports:
        obj = r.to_json()
        assert obj["stage"] == r.stage
        assert obj["period"] == r.period
