import numpy as np
import pytest

from phaseflow import (
    embed_plus,
    embed_minus,
    apply_M,
    unembed,
    rotate_phase,
    hermitian_inner,
    phase_align,
    dist_to_orbit,
)
from conftest import random_complex


def test_embed_plus_reads_off_parts():
    assert np.array_equal(embed_plus([1 + 2j]), [1.0, 2.0])
    assert np.array_equal(embed_plus(np.zeros(5, dtype=complex)), np.zeros(10))
    assert np.array_equal(embed_plus([1j, -1]), [0.0, -1.0, 1.0, 0.0])


def test_embed_plus_linear_and_isometric():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b = random_complex(rng, 6), random_complex(rng, 6)
        s = rng.standard_normal()
        assert np.allclose(embed_plus(s * a + b), s * embed_plus(a) + embed_plus(b), atol=1e-12)
        assert np.isclose(np.linalg.norm(embed_plus(a)), np.linalg.norm(a), rtol=1e-13)


def test_apply_M_block_swap():
    assert np.array_equal(apply_M([1.0, 2.0]), [-2.0, 1.0])


def test_apply_M_squares_to_minus_identity_and_skew():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.standard_normal(8)
        assert np.array_equal(apply_M(apply_M(x)), -x)
        assert abs(np.dot(apply_M(x), x)) <= 1e-12 * np.dot(x, x)


def test_apply_M_matches_multiplication_by_i():
    rng = np.random.default_rng(2)
    for _ in range(20):
        z = random_complex(rng, 5)
        assert np.allclose(apply_M(embed_plus(z)), embed_plus(1j * z), atol=1e-14)
        assert np.allclose(embed_minus(z), embed_plus(1j * z), atol=1e-14)


def test_unembed_inverts_embed():
    assert np.array_equal(unembed([1.0, 2.0]), [1 + 2j])
    assert np.array_equal(unembed([0.0, -1.0, 1.0, 0.0]), [1j, -1])
    rng = np.random.default_rng(3)
    for _ in range(100):
        z = random_complex(rng, 4)
        assert np.array_equal(unembed(embed_plus(z)), z)


def test_unembed_rejects_odd_length():
    with pytest.raises(ValueError):
        unembed([1.0, 2.0, 3.0])


def test_hermitian_inner_hand_cases():
    assert hermitian_inner([1, 1j], [1, 1]) == 1 + 1j
    assert hermitian_inner([1, 1j], [1, 1j]) == 2
    with pytest.raises(ValueError):
        hermitian_inner([1, 2], [1])


def test_intensity_identity_in_embeddings():
    # |<a, x>|^2 = <a+, x+>^2 + <a+, x->^2
    rng = np.random.default_rng(4)
    for _ in range(100):
        a, x = random_complex(rng, 5), random_complex(rng, 5)
        lhs = abs(hermitian_inner(a, x)) ** 2
        rhs = np.dot(embed_plus(a), embed_plus(x)) ** 2 + np.dot(embed_plus(a), embed_minus(x)) ** 2
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, lhs)


def test_pairing_identity_against_ground_truth():
    # <x+, g+>^2 + <x+, g->^2 = |<x, g>|^2
    rng = np.random.default_rng(5)
    for _ in range(100):
        x, g = random_complex(rng, 4), random_complex(rng, 4)
        lhs = np.dot(embed_plus(x), embed_plus(g)) ** 2 + np.dot(embed_plus(x), embed_minus(g)) ** 2
        rhs = abs(hermitian_inner(x, g)) ** 2
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


def test_phase_align_aligned_and_rotated():
    rng = np.random.default_rng(6)
    g = random_complex(rng, 3)
    assert phase_align(g, g) == 0.0
    assert abs(phase_align(1j * g, g) - np.pi / 2) <= 1e-9


def test_phase_align_orthogonal_ties_to_zero():
    assert phase_align([1, 0], [0, 1]) == 0.0
    with pytest.raises(ValueError):
        phase_align([1, 0], [0, 0])


def test_phase_align_beats_720_point_grid():
    rng = np.random.default_rng(7)
    thetas = np.arange(720) * (2 * np.pi / 720)
    for _ in range(10):
        x, g = random_complex(rng, 4), random_complex(rng, 4)
        best = phase_align(x, g)
        assert 0.0 <= best < 2 * np.pi
        attained = np.linalg.norm(x - g * np.exp(1j * best))
        grid = [np.linalg.norm(x - g * np.exp(1j * t)) for t in thetas]
        assert attained <= min(grid) + 1e-12 * max(1.0, attained)


def test_dist_to_orbit_on_and_off_orbit():
    rng = np.random.default_rng(8)
    g = random_complex(rng, 4)
    for theta in rng.uniform(0, 2 * np.pi, 8):
        assert dist_to_orbit(g * np.exp(1j * theta), g) <= 1e-7 * np.linalg.norm(g)
    assert np.isclose(dist_to_orbit(np.zeros(4, dtype=complex), g), np.linalg.norm(g), rtol=1e-13)


def test_dist_to_orbit_matches_grid_minimum():
    rng = np.random.default_rng(9)
    thetas = np.arange(720) * (2 * np.pi / 720)
    for _ in range(10):
        x, g = random_complex(rng, 3), random_complex(rng, 3)
        d = dist_to_orbit(x, g)
        grid_min = min(np.linalg.norm(x - g * np.exp(1j * t)) for t in thetas)
        assert d <= grid_min + 1e-9
        # second-order bound on the grid offset
        slack = abs(hermitian_inner(x, g)) * (np.pi / 720) ** 2
        assert grid_min - d <= slack + 1e-9


def test_dist_to_orbit_phase_invariances():
    rng = np.random.default_rng(10)
    x, g = random_complex(rng, 4), random_complex(rng, 4)
    d = dist_to_orbit(x, g)
    for alpha in rng.uniform(0, 2 * np.pi, 5):
        assert np.isclose(dist_to_orbit(x * np.exp(1j * alpha), g), d, rtol=1e-10)
        assert np.isclose(dist_to_orbit(x, g * np.exp(1j * alpha)), d, rtol=1e-10)


def test_rotate_phase_matches_complex_rotation():
    rng = np.random.default_rng(11)
    z = random_complex(rng, 5)
    for theta in rng.uniform(0, 2 * np.pi, 5):
        assert np.allclose(
            rotate_phase(embed_plus(z), theta), embed_plus(z * np.exp(1j * theta)), atol=1e-12
        )
