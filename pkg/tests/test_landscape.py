import numpy as np
import pytest

import phaseflow as pf
from phaseflow.landscape import _restricted_min_eig_dense, _restricted_min_eig_iterative
from phaseflow.embedding import apply_M
from conftest import random_complex, small_instance


def _cfg(delta0=1e-4, **kw):
    return pf.LandscapeConfig(delta0=delta0, **kw)


def _orthogonal_half_norm_point(rng, g):
    # complex-orthogonal to g with ||x||^2 = ||g||^2 / 2
    n = g.size
    q, _ = np.linalg.qr(g.reshape(-1, 1).astype(np.complex128), mode="complete")
    w = q[:, 1]
    return w * (np.linalg.norm(g) / np.sqrt(2.0))


def test_region1_far_rays_and_critical_points():
    rng = np.random.default_rng(0)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=1e-2)  # delta0 < 32/C1 = 0.8
    far = 100.0 * g / np.linalg.norm(g) * np.linalg.norm(g)
    assert pf.in_region1(100.0 * g, g, cfg).satisfied
    assert pf.in_region1(far, g, cfg).satisfied
    assert not pf.in_region1(g, g, cfg).satisfied  # grad g = 0
    assert not pf.in_region1(np.zeros(3, dtype=complex), g, cfg).satisfied


def test_region1_monotone_in_delta0():
    rng = np.random.default_rng(1)
    g = random_complex(rng, 3)
    x = 2.5 * random_complex(rng, 3)
    for delta0 in (1e-1, 1e-2, 1e-3):
        if pf.in_region1(x, g, _cfg(delta0=delta0)).satisfied:
            assert pf.in_region1(x, g, _cfg(delta0=delta0 / 10)).satisfied


def test_region1_c_cancels():
    rng = np.random.default_rng(2)
    g = random_complex(rng, 3)
    x = 3.0 * random_complex(rng, 3)
    a = pf.in_region1(x, g, _cfg(c=1.0))
    b = pf.in_region1(x, g, _cfg(c=123.0))
    assert a.satisfied == b.satisfied
    assert np.isclose(a.rhs, b.rhs, rtol=1e-12)


def test_region2_membership_cases():
    rng = np.random.default_rng(3)
    g = random_complex(rng, 3)
    zero = np.zeros(3, dtype=complex)
    # 0 is inside iff delta0 * C2 < 16
    assert pf.in_region2(zero, g, _cfg(delta0=0.1, c2=120.0)).satisfied  # 12 < 16
    assert not pf.in_region2(zero, g, _cfg(delta0=0.2, c2=120.0)).satisfied  # 24 > 16
    # the ground truth is excluded: lhs = 12 + delta0 C2/4 > 4
    check = pf.in_region2(g, g, _cfg(delta0=1e-300))
    assert not check.satisfied
    assert np.isclose(check.lhs, 12.0, rtol=1e-9)


def test_region2_orthogonal_half_norm_boundary():
    rng = np.random.default_rng(4)
    g = random_complex(rng, 4)
    x = _orthogonal_half_norm_point(rng, g)
    # lhs = 2 + delta0 C2 / 8: inside iff delta0 C2 <= 16/3
    inside = pf.in_region2(x, g, _cfg(delta0=0.01, c2=120.0))
    assert inside.satisfied
    assert np.isclose(inside.lhs, 2.0 + 0.01 * 120.0 / 8.0, rtol=1e-9)
    assert not pf.in_region2(x, g, _cfg(delta0=0.1, c2=120.0)).satisfied
    with pytest.raises(ValueError):
        pf.in_region2(x, np.zeros(4, dtype=complex), _cfg())


def test_region3_membership_cases():
    rng = np.random.default_rng(5)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=1e-4)
    for theta in rng.uniform(0, 2 * np.pi, 4):
        assert pf.in_region3(g * np.exp(1j * theta), g, cfg).satisfied
    zero_check = pf.in_region3(np.zeros(3, dtype=complex), g, cfg)
    assert not zero_check.satisfied
    assert np.isclose(zero_check.lhs, 1.0, rtol=1e-12)
    tiny = pf.in_region3(g, g, _cfg(delta0=1e-300))
    assert np.isclose(tiny.rhs, 16.0 / 192.0, rtol=1e-12)


def test_region3_contains_orbit_strictly_and_region2_excludes_it():
    rng = np.random.default_rng(6)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=1e-4)
    gnorm = np.linalg.norm(g)
    for _ in range(5):
        bump = random_complex(rng, 3)
        x = g + 0.05 * gnorm * bump / np.linalg.norm(bump)
        assert pf.in_region3(x, g, cfg).satisfied
        assert not pf.in_region2(x, g, cfg).satisfied


def test_config_validation_and_emptiness_flags():
    with pytest.raises(ValueError):
        pf.LandscapeConfig(delta0=0.0)
    cfg = pf.LandscapeConfig(delta0=10.0, c2=120.0)
    assert not cfg.region2_nonempty
    assert not cfg.region3_nonempty
    assert _cfg(delta0=1e-4).region3_nonempty


def test_classify_global_minimum_on_orbit():
    for seed in (11, 12, 13):
        inst = small_instance(n=3, m=16, seed=seed)
        cfg = _cfg()
        for theta in np.arange(16) * (2 * np.pi / 16):
            x = inst.ground_truth * np.exp(1j * theta)
            report = pf.classify_point(inst, x, cfg)
            assert report.classification is pf.PointClass.GLOBAL_MINIMUM
            assert report.orbit_dist_rel <= cfg.dist_tol
            assert report.min_hess_eig is not None
            assert report.in_r3


def test_classify_strict_saddle_at_origin():
    inst = small_instance(n=3, m=14, seed=21)
    report = pf.classify_point(inst, np.zeros(3, dtype=complex), _cfg())
    assert report.classification is pf.PointClass.STRICT_SADDLE_CANDIDATE
    expected = -4.0 * float(inst.measurements @ inst.measurements)
    assert abs(report.saddle_witness - expected) <= 1e-10 * abs(expected)
    assert report.min_hess_eig < 0
    assert report.in_r2


def test_classify_random_points_not_critical():
    inst = small_instance(n=3, m=14, seed=22)
    rng = np.random.default_rng(7)
    for _ in range(50):
        x = random_complex(rng, 3, scale=rng.uniform(0.3, 3.0))
        report = pf.classify_point(inst, x, _cfg())
        assert report.classification is pf.PointClass.NOT_CRITICAL


def test_restricted_eig_iterative_matches_dense():
    inst = small_instance(n=2, m=10, seed=23)
    hess = pf.f_hess_dense(inst, inst.gt_plus)
    tangent = apply_M(inst.gt_plus)
    dense_min, dense_scale = _restricted_min_eig_dense(hess, tangent)
    iter_min, iter_scale = _restricted_min_eig_iterative(
        lambda v: hess @ v, hess.shape[0], tangent, iters=800
    )
    assert abs(iter_min - dense_min) <= 1e-6 * max(1.0, dense_scale)


def test_g_critical_points_are_critical():
    rng = np.random.default_rng(8)
    g = random_complex(rng, 3)
    c = 1.0
    points = pf.g_critical_points(g, count=6)
    bound = 1e-9 * 8.0 * c * np.linalg.norm(g) ** 3
    for x in points:
        grad = pf.g_grad(pf.embed_plus(x), pf.embed_plus(g), c)
        assert np.linalg.norm(grad) <= bound
    # orbit representatives are exact minimizers of the empirical loss too
    ens = pf.sample_ensemble(3, 14, seed=9)
    inst = pf.ProblemInstance.from_ground_truth(ens, g)
    y2 = float(inst.measurements @ inst.measurements)
    for x in points[1:5]:
        assert pf.f_value(inst, pf.embed_plus(x)) <= 1e-20 * y2
    # the orthogonal half-norm family lands in region 2 for small delta0
    cfg = _cfg(delta0=1e-4)
    for x in points[5:]:
        assert pf.in_region2(x, g, cfg).satisfied


def test_g_critical_points_n1_has_no_orthogonal_family():
    g = np.array([1.0 + 0.5j])
    points = pf.g_critical_points(g, count=5)
    assert len(points) == 5  # origin + 4 orbit representatives only


def test_coverage_full_at_small_delta0():
    rng = np.random.default_rng(10)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=1e-4)
    result = pf.coverage_check(g, cfg, sample_count=2000, radius_multiplier=3.0, seed=5)
    assert result.fraction == 1.0
    assert not result.uncovered_points


def test_coverage_fails_at_huge_delta0_near_saddles():
    rng = np.random.default_rng(11)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=10.0)
    assert not cfg.region2_nonempty and not cfg.region3_nonempty
    result = pf.coverage_check(g, cfg, sample_count=500, radius_multiplier=3.0, seed=6)
    assert result.fraction < 1.0
    # the surrogate's critical points themselves are uncovered
    crit = pf.g_critical_points(g)
    gnorm = np.linalg.norm(g)
    close_to_crit = 0
    for x in result.uncovered_points:
        dists = [np.linalg.norm(x - p) for p in crit] + [pf.dist_to_orbit(x, g)]
        close_to_crit += min(dists) <= 0.1 * gnorm
    assert close_to_crit >= 1


def test_coverage_far_points_fall_in_region1():
    rng = np.random.default_rng(12)
    g = random_complex(rng, 3)
    cfg = _cfg(delta0=1e-2)
    for _ in range(10):
        x = random_complex(rng, 3)
        x = 100.0 * np.linalg.norm(g) * x / np.linalg.norm(x)
        assert pf.in_region1(x, g, cfg).satisfied


def test_region_report_serializes():
    inst = small_instance(n=2, m=10, seed=31)
    report = pf.classify_point(inst, inst.ground_truth, _cfg())
    doc = report.to_json_dict()
    assert doc["classification"] == "global_minimum"
    assert set(doc) >= {"in_r1", "in_r2", "in_r3", "grad_f_norm", "orbit_dist_rel"}
