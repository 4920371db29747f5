"""The quartic intensity loss, its idealized surrogate, and their derivatives.

The loss is f(x) = sum_i (q_i(x) - y_i)^2 on the real embedding, q_i the
sensing quadratic form.  The surrogate is the closed-form landscape the
Gaussian fourth moment induces,

    g(x) = 8c (||x||^4 + ||x_gt||^4 - |<x, x_gt>|^2 - ||x||^2 ||x_gt||^2),

which depends on the ensemble only through c = m sigma^4.  Gradients and
Hessians here are the analytic forms; central finite differences of the
values are provided as an independent self-check.
"""

from dataclasses import dataclass

import numpy as np

from .embedding import as_real_embedding, apply_M

DENSE_HESSIAN_CAP = 64  # max 2n for dense Hessian assembly


@dataclass
class EvalReport:
    """Value, gradient, and (optionally) dense Hessian at one point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray | None = None


def _projections(instance, x_plus):
    """Per-measurement inner products u = A+ x, v = A- x and residuals."""
    x = as_real_embedding(x_plus)
    if x.size != instance.ensemble.dim:
        raise ValueError(f"dimension mismatch: {x.size} vs {instance.ensemble.dim}")
    u = instance.ensemble.vectors @ x
    v = instance.ensemble.vectors_minus @ x
    r = u**2 + v**2 - instance.measurements
    return x, u, v, r


def f_value(instance, x_plus):
    """Sum of squared intensity residuals; zero exactly on the solution orbit."""
    _, _, _, r = _projections(instance, x_plus)
    return float(r @ r)


def f_grad(instance, x_plus):
    """Gradient 4 sum_i r_i A_i x of the intensity loss."""
    _, u, v, r = _projections(instance, x_plus)
    ap, am = instance.ensemble.vectors, instance.ensemble.vectors_minus
    return 4.0 * (ap.T @ (r * u) + am.T @ (r * v))


def f_hess_vec(instance, x_plus, direction):
    """Hessian-vector product 4 sum_i [ r_i A_i w + 2 <A_i x, w> A_i x ]."""
    _, u, v, r = _projections(instance, x_plus)
    w = as_real_embedding(direction)
    if w.size != instance.ensemble.dim:
        raise ValueError(f"dimension mismatch: {w.size} vs {instance.ensemble.dim}")
    ap, am = instance.ensemble.vectors, instance.ensemble.vectors_minus
    uw = ap @ w
    vw = am @ w
    s = u * uw + v * vw  # <A_i x, w>
    return 4.0 * (ap.T @ (r * uw) + am.T @ (r * vw) + 2.0 * (ap.T @ (s * u) + am.T @ (s * v)))


def f_hess_dense(instance, x_plus, cap=DENSE_HESSIAN_CAP):
    """Dense Hessian 4 sum_i [ r_i A_i + 2 (A_i x)(A_i x)^T ], dim <= cap."""
    if instance.ensemble.dim > cap:
        raise ValueError(f"dense Hessian capped at dim {cap}")
    _, u, v, r = _projections(instance, x_plus)
    ap, am = instance.ensemble.vectors, instance.ensemble.vectors_minus
    rows = u[:, None] * ap + v[:, None] * am  # A_i x
    h = 4.0 * (ap.T @ (r[:, None] * ap) + am.T @ (r[:, None] * am) + 2.0 * rows.T @ rows)
    return 0.5 * (h + h.T)


def evaluate_f(instance, x_plus, with_hessian=False, cap=DENSE_HESSIAN_CAP):
    hess = f_hess_dense(instance, x_plus, cap=cap) if with_hessian else None
    return EvalReport(f_value(instance, x_plus), f_grad(instance, x_plus), hess)


def _surrogate_parts(x_plus, x_gt_plus):
    x = as_real_embedding(x_plus)
    g = as_real_embedding(x_gt_plus)
    if x.size != g.size:
        raise ValueError(f"length mismatch: {x.size} vs {g.size}")
    gm = apply_M(g)
    return x, g, gm, float(x @ x), float(g @ g)


def g_value(x_plus, x_gt_plus, c):
    """Closed-form surrogate 8c(||x||^4 + ||g||^4 - |<x,g>|^2 - ||x||^2 ||g||^2)."""
    x, g, gm, xx, gg = _surrogate_parts(x_plus, x_gt_plus)
    ip2 = float(x @ g) ** 2 + float(x @ gm) ** 2  # |<x, x_gt>|^2 in embeddings
    return 8.0 * c * (xx**2 + gg**2 - ip2 - xx * gg)


def g_grad(x_plus, x_gt_plus, c):
    """Surrogate gradient 8c(4x||x||^2 - 2x||g||^2 - 2g<x,g> - 2(Mg)<Mg,x>)."""
    x, g, gm, xx, gg = _surrogate_parts(x_plus, x_gt_plus)
    return 8.0 * c * (4.0 * xx * x - 2.0 * gg * x - 2.0 * float(x @ g) * g - 2.0 * float(x @ gm) * gm)


def g_hess(x_plus, x_gt_plus, c):
    """Surrogate Hessian 8c(8xx^T + 4||x||^2 I - 2gg^T - 2(Mg)(Mg)^T - 2||g||^2 I).

    Identity blocks act on the full embedding space R^{2n}.
    """
    x, g, gm, xx, gg = _surrogate_parts(x_plus, x_gt_plus)
    eye = np.eye(x.size)
    h = 8.0 * c * (
        8.0 * np.outer(x, x)
        + 4.0 * xx * eye
        - 2.0 * np.outer(g, g)
        - 2.0 * np.outer(gm, gm)
        - 2.0 * gg * eye
    )
    return 0.5 * (h + h.T)


def evaluate_g(x_plus, x_gt_plus, c, with_hessian=False):
    hess = g_hess(x_plus, x_gt_plus, c) if with_hessian else None
    return EvalReport(g_value(x_plus, x_gt_plus, c), g_grad(x_plus, x_gt_plus, c), hess)


def fd_step(x_plus):
    """Reference central-difference step 1e-5 * (1 + ||x||)."""
    return 1e-5 * (1.0 + float(np.linalg.norm(x_plus)))


def fd_gradient(fun, x_plus, step=None):
    """Central-difference gradient of a scalar function on the embedding.

    Independent of any analytic derivative; uses only point evaluations.
    """
    x = as_real_embedding(x_plus)
    h = fd_step(x) if step is None else step
    grad = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        grad[j] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return grad


def fd_hess_vec(grad_fun, x_plus, direction, step=None):
    """Central difference of a gradient along a direction."""
    x = as_real_embedding(x_plus)
    w = as_real_embedding(direction)
    h = fd_step(x) if step is None else step
    return (grad_fun(x + h * w) - grad_fun(x - h * w)) / (2.0 * h)
