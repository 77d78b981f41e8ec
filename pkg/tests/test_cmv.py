import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmvspectra.cmv import (
    apply,
    assemble_window,
    cmv_entry,
    diff_norm_bound,
    diff_norm_bound_seq,
    spectrum_movement_check,
)
from cmvspectra.coeffs import make_periodic
from cmvspectra.odometer import make_sampling


def _random_alpha(seed, scale=0.4):
    rng = np.random.default_rng(seed)
    vals = {}

    def alpha(n):
        if n not in vals:
            s = np.random.default_rng((seed, n % (1 << 20), n < 0))
            vals[n] = scale * (s.uniform(-1, 1) + 1j * s.uniform(-1, 1)) / np.sqrt(2)
        return vals[n]

    return alpha


def test_window_entries_match_closed_form():
    alpha = _random_alpha(3)
    w = assemble_window(alpha, -4, 12)
    for i in range(12):
        m = w.offset + i
        for j in range(12):
            n = w.offset + j
            assert w.matrix[i, j] == pytest.approx(cmv_entry(alpha, m, n), abs=1e-14)


def test_entry_bandwidth_is_five_diagonal():
    alpha = _random_alpha(9)
    for m in range(-6, 6):
        for n in range(-9, 9):
            if abs(n - m) > 2:
                assert cmv_entry(alpha, m, n) == 0.0


def test_interior_rows_are_orthonormal():
    # interior rows/columns of a window coincide with the two-sided unitary
    alpha = _random_alpha(17)
    w = assemble_window(alpha, 0, 16).matrix
    G = w @ w.conj().T
    inner = G[4:12, 4:12]
    assert np.allclose(inner, np.eye(8), atol=1e-12)


def test_windows_agree_on_overlap():
    alpha = _random_alpha(23)
    w1 = assemble_window(alpha, -2, 10)
    w2 = assemble_window(alpha, 2, 10)
    # rows/cols 4.. of w1 equal rows/cols ..6 of w2
    assert np.allclose(w1.matrix[4:, 4:], w2.matrix[:6, :6], atol=1e-14)


def test_window_validation():
    alpha = _random_alpha(1)
    with pytest.raises(ValueError):
        assemble_window(alpha, 1, 8)  # odd offset
    with pytest.raises(ValueError):
        assemble_window(alpha, 0, 2)  # too small


def test_apply_checks_dimension():
    w = assemble_window(_random_alpha(2), 0, 8)
    with pytest.raises(ValueError):
        apply(w, np.ones(5))
    out = apply(w, np.eye(8)[0])
    assert np.allclose(out, w.matrix[:, 0] * 0 + w.matrix @ np.eye(8)[0])


def test_diff_norm_bound_zero_for_identical():
    f = make_periodic([0.1, -0.2, 0.3j, 0.05], 0.5)
    assert diff_norm_bound_seq(f, f) == 0.0


def test_diff_norm_bound_dominates_finite_window_norm():
    f = make_periodic([0.1, -0.2, 0.3j, 0.05], 0.5)
    g = make_periodic([0.12, -0.21, 0.28j, 0.06], 0.5)
    bound = diff_norm_bound_seq(f, g)
    dim = 64
    wf = assemble_window(f.value_at, 0, dim).matrix
    wg = assemble_window(g.value_at, 0, dim).matrix
    actual = np.linalg.norm(wf - wg, 2)
    assert actual <= bound + 1e-12
    assert bound <= 10 * actual  # not wildly pessimistic


def test_diff_norm_bound_handles_different_periods():
    f = make_periodic([0.1, -0.2], 0.5)
    g = make_periodic([0.1, -0.2, 0.1, -0.19], 0.5)
    assert diff_norm_bound_seq(f, g) > 0


@given(st.floats(1e-4, 1e-2))
def test_diff_norm_bound_scales_with_perturbation(delta):
    f = make_sampling((0.1, -0.2), 0.5)
    g = make_sampling((0.1 + delta, -0.2), 0.5)
    b = diff_norm_bound(f, g)
    # a rank-controlled banded difference: norm between delta and a small multiple
    assert delta * 0.5 <= b <= 10 * delta


def test_spectrum_movement_check_passes_for_small_perturbation():
    f = make_periodic([0.3, 0.0], 0.6)
    g = make_periodic([0.301, 0.002], 0.6)
    report = spectrum_movement_check(f, g, grid=400)
    assert report.passed
    assert report.max_displacement <= report.bound + 1e-8
