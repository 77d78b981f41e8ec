import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmvspectra.coeffs import make_periodic, rho
from cmvspectra.transfer import (
    build_A,
    build_A_unimodular,
    estimate_lipschitz,
    four_block,
    gamma,
    product,
)

disk = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)
angles = st.floats(0.0, 2 * np.pi, allow_nan=False)


@given(disk, disk, disk, angles)
def test_determinant_is_rho_ratio(a0, a1, a2, t):
    z = np.exp(1j * t)
    A = build_A(a0, a1, a2, z)
    assert A.det() == pytest.approx(rho(a0) / rho(a2), abs=1e-10)


@given(disk, disk, disk, angles)
def test_unimodular_variant_has_det_one(a0, a1, a2, t):
    z = np.exp(1j * t)
    A = build_A_unimodular(a0, a1, a2, z)
    assert A.det() == pytest.approx(1.0, abs=1e-10)


def test_rejects_non_unimodular_spectral_parameter():
    with pytest.raises(ValueError):
        build_A(0.1, 0.2, 0.3, 1.1)


def test_product_matches_manual_composition():
    seq = make_periodic([0.1, -0.2, 0.3j, 0.05, 0.2, -0.1], 0.5)
    z = np.exp(0.7j)
    man = np.eye(2, dtype=complex)
    for n in (1, 3, 5):
        man = build_A(seq.value_at(n), seq.value_at(n + 1), seq.value_at(n + 2), z).entries @ man
    assert np.allclose(product(seq, z, 1, 3).entries, man)


def test_product_requires_odd_start():
    seq = make_periodic([0.1, 0.2], 0.5)
    with pytest.raises(ValueError):
        product(seq, 1.0, 0, 2)


@st.composite
def invertible_2x2(draw):
    # SVD form with singular values spanning several orders of magnitude
    def unit(t, p):
        return np.array(
            [[np.cos(t), -np.sin(t) * np.exp(1j * p)], [np.sin(t), np.cos(t) * np.exp(1j * p)]]
        )

    u = unit(draw(angles), draw(angles))
    v = unit(draw(angles), draw(angles))
    s1 = draw(st.floats(0.1, 100.0))
    s2 = draw(st.floats(0.001, 1.0)) * s1
    return u @ np.diag([s1, s2]).astype(complex) @ v.conj().T


@given(invertible_2x2(), angles, angles)
def test_four_block_lower_bound(A, t, p):
    x = np.array([np.cos(t), np.sin(t) * np.exp(1j * p)])
    x /= np.linalg.norm(x)
    assert four_block(A, x) >= 0.5 - 1e-10


def test_four_block_requires_unit_vector():
    with pytest.raises(ValueError):
        four_block(np.eye(2), np.array([2.0, 0.0]))


def test_lipschitz_modulus_is_positive_and_cached():
    m1 = estimate_lipschitz(0.5)
    m2 = estimate_lipschitz(0.5)
    assert m1.L > 0
    assert m1 == m2  # deterministic cache


def test_lipschitz_bounds_actual_finite_differences():
    L = estimate_lipschitz(0.5).L
    rng = np.random.default_rng(5)
    z = np.exp(1j * 0.3)
    for _ in range(200):
        tri = 0.45 * (rng.uniform(-1, 1, 3) + 1j * rng.uniform(-1, 1, 3)) / np.sqrt(2)
        d = 1e-6 * rng.uniform(-1, 1, 3)
        a = build_A(*tri, z).entries
        b = build_A(*(tri + d), z).entries
        assert np.linalg.norm(a - b, 2) <= L * np.max(np.abs(d)) * (1 + 1e-6)


def test_gamma_decreases_in_k_and_q():
    assert gamma(2, 4, 0.5) < gamma(1, 4, 0.5)
    assert gamma(3, 8, 0.5) < gamma(2, 8, 0.5)
    assert gamma(2, 16, 0.5) < gamma(2, 8, 0.5)
    assert gamma(1, 4, 0.5) > 0


def test_gamma_rejects_bad_arguments():
    with pytest.raises(ValueError):
        gamma(0, 4, 0.5)
    with pytest.raises(ValueError):
        gamma(1, 4, 1.2)
