"""Region tests and critical-point classification for the quartic loss.

When the empirical fourth moment sits within delta0 of its Gaussian target
in operator norm, three regions cover the whole space: points where the
surrogate gradient is large (no critical points of the loss), a
neighborhood of the origin-side critical set (strict saddles only), and a
tube around the minimizer circle (global minimizers only).  This module
evaluates the membership inequalities with their diagnostic scalars,
classifies candidate critical points, generates the surrogate's known
critical points, and Monte Carlo checks that the three regions cover.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embedding import (
    as_complex_vector,
    embed_plus,
    apply_M,
    unembed,
    dist_to_orbit,
)
from .objective import f_grad, f_hess_vec, f_hess_dense, g_grad, DENSE_HESSIAN_CAP
from .seeding import derive_seed


@dataclass
class LandscapeConfig:
    """Constants and tolerances for region tests and classification.

    delta0 is the assumed operator-norm deviation; c1, c2 are the absolute
    constants of the gradient/Hessian comparison bounds; c scales the
    surrogate (it cancels in every region inequality).  Region 2 is nonempty
    only when 4 - c2*delta0/4 > 0 and region 3 only when 16 - 5*c2*delta0 > 0.
    """

    delta0: float
    c1: float = 40.0
    c2: float = 120.0
    c: float = 1.0
    grad_tol: float = 1e-8
    eig_tol: float = 1e-8
    dist_tol: float = 1e-6
    dense_cap: int = DENSE_HESSIAN_CAP

    def __post_init__(self):
        for name in ("delta0", "c1", "c2", "c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def region2_nonempty(self):
        return 4.0 - self.c2 * self.delta0 / 4.0 > 0

    @property
    def region3_nonempty(self):
        return 16.0 - 5.0 * self.c2 * self.delta0 > 0


@dataclass
class RegionCheck:
    """One membership inequality with both sides, lhs <= rhs."""

    satisfied: bool
    lhs: float
    rhs: float

    def __bool__(self):
        return self.satisfied


class PointClass(str, Enum):
    NOT_CRITICAL = "not_critical"
    STRICT_SADDLE_CANDIDATE = "strict_saddle_candidate"
    GLOBAL_MINIMUM = "global_minimum"
    UNRESOLVED = "unresolved"


@dataclass
class RegionReport:
    """Region membership plus the scalars that decided the classification."""

    in_r1: bool
    in_r2: bool
    in_r3: bool
    grad_f_norm: float
    grad_g_norm: float
    saddle_witness: float
    min_hess_eig: float | None
    orbit_dist_rel: float
    classification: PointClass

    def to_json_dict(self):
        return {
            "in_r1": self.in_r1,
            "in_r2": self.in_r2,
            "in_r3": self.in_r3,
            "grad_f_norm": self.grad_f_norm,
            "grad_g_norm": self.grad_g_norm,
            "saddle_witness": self.saddle_witness,
            "min_hess_eig": self.min_hess_eig,
            "orbit_dist_rel": self.orbit_dist_rel,
            "classification": self.classification.value,
        }


def in_region1(x, x_gt, cfg):
    """Large-surrogate-gradient test: (||x|| + ||x_gt||)^3 <= ||grad g|| / (c1 delta0 c)."""
    x = as_complex_vector(x)
    g = as_complex_vector(x_gt)
    xp, gp = embed_plus(x), embed_plus(g)
    lhs = (np.linalg.norm(xp) + np.linalg.norm(gp)) ** 3
    rhs = np.linalg.norm(g_grad(xp, gp, cfg.c)) / (cfg.c1 * cfg.delta0 * cfg.c)
    return RegionCheck(bool(lhs <= rhs), float(lhs), float(rhs))


def in_region2(x, x_gt, cfg):
    """Saddle-neighborhood test:
    8|<x,x_gt>|^2/||x_gt||^4 + (4 + delta0 c2/4)||x||^2/||x_gt||^2 <= 4 - delta0 c2/4."""
    x = as_complex_vector(x)
    g = as_complex_vector(x_gt)
    gg = float(np.vdot(g, g).real)
    if gg == 0.0:
        raise ValueError("region test needs a nonzero ground truth")
    xx = float(np.vdot(x, x).real)
    ip2 = abs(np.vdot(g, x)) ** 2
    lhs = 8.0 * ip2 / gg**2 + (4.0 + cfg.delta0 * cfg.c2 / 4.0) * xx / gg
    rhs = 4.0 - cfg.delta0 * cfg.c2 / 4.0
    return RegionCheck(bool(lhs <= rhs), float(lhs), float(rhs))


def in_region3(x, x_gt, cfg):
    """Minimizer-tube test: d(x, orbit)/||x_gt|| <= (16 - 5 c2 delta0)/(192 + 4 c2 delta0).

    The threshold never exceeds 1/12, so the unit guard from the underlying
    derivation is vacuous.
    """
    x = as_complex_vector(x)
    g = as_complex_vector(x_gt)
    gnorm = float(np.linalg.norm(g))
    if gnorm == 0.0:
        raise ValueError("region test needs a nonzero ground truth")
    lhs = dist_to_orbit(x, g) / gnorm
    rhs = (16.0 - 5.0 * cfg.c2 * cfg.delta0) / (192.0 + 4.0 * cfg.c2 * cfg.delta0)
    return RegionCheck(bool(lhs <= rhs), float(lhs), float(rhs))


def _complement_basis(direction):
    """Orthonormal basis of the complement of a unit direction, via QR."""
    dim = direction.size
    mat = np.concatenate([direction[:, None], np.eye(dim)], axis=1)
    q, _ = np.linalg.qr(mat)
    return q[:, 1:dim]


def _restricted_min_eig_dense(hess, tangent):
    """Smallest eigenvalue restricted to the complement of the tangent line,
    plus the spectral scale max|eig| of the full matrix."""
    full = np.linalg.eigvalsh(hess)
    scale = float(np.max(np.abs(full))) if full.size else 0.0
    tnorm = np.linalg.norm(tangent)
    if tnorm == 0.0:
        return float(full[0]), scale
    basis = _complement_basis(tangent / tnorm)
    restricted = basis.T @ hess @ basis
    return float(np.linalg.eigvalsh(restricted)[0]), scale


def _restricted_min_eig_iterative(hvp, dim, tangent, iters=300, seed=0):
    """Power iteration on the shifted operator, matrix-free fallback above the
    dense cap.  Restriction projects out the tangent direction."""
    tnorm = np.linalg.norm(tangent)
    that = tangent / tnorm if tnorm > 0 else None

    def project(v):
        return v - np.dot(that, v) * that if that is not None else v

    def apply(v):
        return project(hvp(project(v)))

    rng = np.random.default_rng(derive_seed(seed, dim))
    v = project(rng.standard_normal(dim))
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = apply(v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, 0.0
        v = w / norm
    dominant = float(np.dot(v, apply(v)))
    scale = abs(dominant)
    shift = 1.01 * scale + 1e-30
    v = project(rng.standard_normal(dim))
    v /= np.linalg.norm(v)
    for _ in range(iters):
        # keep the shift inside the projected subspace, or the tangent
        # direction (eigenvalue `shift`) would dominate
        w = shift * project(v) - apply(v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        v = w / norm
    min_eig = float(np.dot(v, apply(v)))
    return min_eig, scale


def classify_point(instance, x, cfg):
    """Classify x as non-critical, strict-saddle candidate, global minimum,
    or unresolved, and report the deciding diagnostics.

    Criticality uses the quartic-scaled threshold grad_tol*(1+||x||^3)*c of
    the instance; eigenvalue sign calls are relative to the spectral scale.
    """
    x = as_complex_vector(x)
    xp = embed_plus(x)
    gp = instance.gt_plus
    gnorm = float(np.linalg.norm(gp))
    c_inst = instance.ensemble.c

    grad_f = f_grad(instance, xp)
    grad_f_norm = float(np.linalg.norm(grad_f))
    grad_g_norm = float(np.linalg.norm(g_grad(xp, gp, cfg.c)))
    witness = float(f_hess_vec(instance, xp, gp) @ gp)
    dist_rel = dist_to_orbit(x, instance.ground_truth) / gnorm

    r1 = in_region1(x, instance.ground_truth, cfg).satisfied
    r2 = in_region2(x, instance.ground_truth, cfg).satisfied
    r3 = in_region3(x, instance.ground_truth, cfg).satisfied

    crit_scale = cfg.grad_tol * (1.0 + float(np.linalg.norm(xp)) ** 3) * c_inst
    min_eig = None
    if grad_f_norm > crit_scale:
        label = PointClass.NOT_CRITICAL
    else:
        tangent = apply_M(xp)  # orbit tangent direction at x (zero at the origin)
        if instance.ensemble.dim <= cfg.dense_cap:
            hess = f_hess_dense(instance, xp, cap=cfg.dense_cap)
            min_eig, scale = _restricted_min_eig_dense(hess, tangent)
        else:
            min_eig, scale = _restricted_min_eig_iterative(
                lambda v: f_hess_vec(instance, xp, v), instance.ensemble.dim, tangent
            )
        eig_margin = cfg.eig_tol * scale
        if dist_rel <= cfg.dist_tol and min_eig >= -eig_margin:
            label = PointClass.GLOBAL_MINIMUM
        elif min_eig < -eig_margin or witness < -eig_margin * gnorm**2:
            label = PointClass.STRICT_SADDLE_CANDIDATE
        else:
            label = PointClass.UNRESOLVED

    return RegionReport(
        in_r1=r1,
        in_r2=r2,
        in_r3=r3,
        grad_f_norm=grad_f_norm,
        grad_g_norm=grad_g_norm,
        saddle_witness=witness,
        min_hess_eig=min_eig,
        orbit_dist_rel=float(dist_rel),
        classification=label,
    )


def g_critical_points(x_gt, count=4):
    """The surrogate's known critical points: the origin, orbit
    representatives, and `count` points of the half-norm circle orthogonal
    to the ground truth (requires ambient n >= 2; for n = 1 only the origin
    and orbit points exist and are returned)."""
    g = as_complex_vector(x_gt)
    if not np.any(g):
        raise ValueError("ground truth must be nonzero")
    n = g.size
    points = [np.zeros(n, dtype=np.complex128)]
    for theta in (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi):
        points.append(g * np.exp(1j * theta))
    if n == 1:
        return points
    q, _ = np.linalg.qr(g.reshape(-1, 1).astype(np.complex128), mode="complete")
    basis = q[:, 1:]  # complex-orthogonal complement of x_gt
    scale = float(np.linalg.norm(g)) / np.sqrt(2.0)
    for j in range(count):
        column = basis[:, j % (n - 1)]
        phase = np.exp(2j * np.pi * j / max(count, 1))
        points.append(scale * phase * column)
    return points


@dataclass
class CoverageResult:
    """Outcome of a region-coverage sweep."""

    total: int
    covered: int
    records: list  # (x_plus, in_r1, in_r2, in_r3, covered) per sampled point
    uncovered_points: list

    @property
    def fraction(self):
        return self.covered / self.total if self.total else 1.0


def coverage_check(x_gt, cfg, sample_count=10000, radius_multiplier=3.0, seed=0):
    """Sample the ball of radius radius_multiplier*||x_gt|| (plus points at and
    near the surrogate's critical set) and report the fraction covered by the
    union of the three regions."""
    g = as_complex_vector(x_gt)
    n = g.size
    dim = 2 * n
    gnorm = float(np.linalg.norm(g))
    rng = np.random.default_rng(derive_seed(seed, 0))

    points = []
    radius = radius_multiplier * gnorm
    for _ in range(sample_count):
        direction = rng.standard_normal(dim)
        direction /= np.linalg.norm(direction)
        r = radius * rng.uniform() ** (1.0 / dim)
        points.append(r * direction)
    for p in g_critical_points(g):
        base = embed_plus(p)
        points.append(base)
        for eps_rel in (1e-3, 1e-2, 5e-2):
            direction = rng.standard_normal(dim)
            direction /= np.linalg.norm(direction)
            points.append(base + eps_rel * gnorm * direction)

    records = []
    uncovered = []
    covered = 0
    for xp in points:
        x = unembed(xp)
        r1 = in_region1(x, g, cfg).satisfied
        r2 = in_region2(x, g, cfg).satisfied
        r3 = in_region3(x, g, cfg).satisfied
        hit = r1 or r2 or r3
        covered += hit
        records.append((xp, r1, r2, r3, hit))
        if not hit:
            uncovered.append(x)
    return CoverageResult(len(points), covered, records, uncovered)
