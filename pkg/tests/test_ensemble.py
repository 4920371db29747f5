import numpy as np
import pytest

import phaseflow as pf
from phaseflow.ensemble import dense_sensing_matrix
from conftest import random_complex, small_instance


def test_sampling_is_deterministic():
    a = pf.sample_ensemble(4, 100, seed=42)
    b = pf.sample_ensemble(4, 100, seed=42)
    assert np.array_equal(a.vectors, b.vectors)
    c = pf.sample_ensemble(4, 100, seed=43)
    assert not np.array_equal(a.vectors, c.vectors)


def test_sampling_moments_at_large_m():
    ens = pf.sample_ensemble(4, 10**4, seed=5)
    entries = ens.vectors.ravel()
    assert -0.05 < entries.mean() < 0.05
    assert 0.95 < entries.var() < 1.05


def test_sampling_shapes_and_errors():
    ens = pf.sample_ensemble(1, 1, seed=0)
    assert ens.vectors.shape == (1, 2)
    assert ens.c == 1.0
    with pytest.raises(ValueError):
        pf.sample_ensemble(0, 5, seed=0)
    with pytest.raises(ValueError):
        pf.sample_ensemble(5, 0, seed=0)


def test_ensemble_invariants():
    with pytest.raises(ValueError):
        pf.SensingEnsemble(np.zeros((2, 3)))  # odd embedding dimension
    with pytest.raises(ValueError):
        pf.SensingEnsemble(np.zeros((2, 4)), sigma=0.0)
    ens = pf.SensingEnsemble(np.ones((3, 4)), sigma=2.0)
    assert ens.c == 3 * 16


def test_measure_zero_and_hand_case():
    ens = pf.SensingEnsemble(np.array([[1.0, 0.0, 0.0, 1.0]]))  # a = (1, i)
    assert pf.measure(ens, [0, 0]) == pytest.approx([0.0])
    assert pf.measure(ens, [1, 1]) == pytest.approx([2.0])


def test_measure_phase_invariance():
    rng = np.random.default_rng(1)
    ens = pf.sample_ensemble(3, 20, seed=2)
    g = random_complex(rng, 3)
    y = pf.measure(ens, g)
    for theta in rng.uniform(0, 2 * np.pi, 5):
        assert np.allclose(pf.measure(ens, g * np.exp(1j * theta)), y, rtol=1e-10)


def test_quadratic_form_reproduces_measurements():
    inst = small_instance()
    q = pf.quadratic_forms(inst.ensemble, inst.gt_plus)
    assert np.array_equal(q, inst.measurements)
    assert pf.quadratic_form(inst.ensemble.vectors[0], np.zeros(inst.ensemble.dim)) == 0.0


def test_quadratic_form_against_dense_matrix():
    rng = np.random.default_rng(3)
    for _ in range(100):
        dim = rng.choice([4, 6, 8])
        a = rng.standard_normal(dim)
        x = rng.standard_normal(dim)
        direct = pf.quadratic_form(a, x)
        dense = float(x @ dense_sensing_matrix(a) @ x)
        assert abs(direct - dense) <= 1e-10 * max(1.0, abs(direct), abs(dense))


def test_quadratic_form_equals_complex_intensity():
    rng = np.random.default_rng(4)
    for _ in range(50):
        a, x = random_complex(rng, 4), random_complex(rng, 4)
        lhs = pf.quadratic_form(pf.embed_plus(a), pf.embed_plus(x))
        rhs = abs(pf.hermitian_inner(a, x)) ** 2
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, rhs)


def test_eigen_structure_basis_case():
    lam, (v1, v2) = pf.eigen_structure([1.0, 0.0])
    assert lam == 1.0
    assert np.array_equal(v1, [1.0, 0.0])
    assert np.array_equal(v2, [0.0, 1.0])
    with pytest.raises(ValueError):
        pf.eigen_structure([0.0, 0.0])


def test_eigen_structure_orthonormal_and_reconstructs():
    rng = np.random.default_rng(5)
    for _ in range(100):
        a = rng.standard_normal(6)
        x = rng.standard_normal(6)
        lam, (v1, v2) = pf.eigen_structure(a)
        assert abs(np.dot(v1, v2)) <= 1e-12
        assert np.isclose(np.linalg.norm(v1), 1.0, atol=1e-12)
        assert np.isclose(np.linalg.norm(v2), 1.0, atol=1e-12)
        recon = lam * (np.dot(v1, x) ** 2 + np.dot(v2, x) ** 2)
        direct = pf.quadratic_form(a, x)
        assert abs(recon - direct) <= 1e-10 * max(1.0, direct)


def test_instance_rejects_inconsistent_measurements():
    inst = small_instance()
    bad = inst.measurements.copy()
    bad[0] += 1.0 + bad[0] * 1e-6
    with pytest.raises(ValueError):
        pf.ProblemInstance(inst.ensemble, inst.ground_truth, bad)


def test_instance_json_round_trip():
    inst = small_instance(n=2, m=9, seed=21)
    text = pf.instance_to_json(inst)
    back = pf.instance_from_json(text)
    assert np.array_equal(back.ensemble.vectors, inst.ensemble.vectors)
    assert np.array_equal(back.ground_truth, inst.ground_truth)
    assert np.array_equal(back.measurements, inst.measurements)
    assert back.ensemble.sigma == inst.ensemble.sigma
    # corrupting a measurement must fail validation on load
    import json

    doc = json.loads(text)
    doc["measurements"][0] += 1.0
    with pytest.raises(ValueError):
        pf.instance_from_json(json.dumps(doc))
