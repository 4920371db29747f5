"""Gradient descent and gradient-flow integration for the intensity loss,
with per-measurement boundedness certificates along trajectories.

A descending loss forces q_i(x(t)) <= sqrt(2 f(x_0) + 2 y_i^2) for every
sensing quadratic form along the continuous flow x' = -grad f; the
certificate margin tracks how far each recorded state sits below that
bound (exact for the flow, within integrator error for discretizations).
Euler integration of the flow with step h is bit-identical to gradient
descent with fixed step h: both run the same update loop.
"""

from dataclasses import dataclass
from enum import Enum
import math
import time

import numpy as np

from .embedding import as_real_embedding
from .objective import f_grad

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes for gradient descent: fixed alpha, an explicit sequence, or
    alpha/m scaled by the measurement count (step alpha on the loss divided
    by m).  Every emitted step lies in (0, alpha_bar]; fixed and scaled
    schedules sum to infinity by construction."""

    kind: str
    alpha: float | None = None
    steps: tuple[float, ...] | None = None
    alpha_bar: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "scaled", "sequence"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.alpha_bar > 0:
            raise ValueError("alpha_bar must be positive")
        if self.kind in ("fixed", "scaled"):
            if self.alpha is None or not 0 < self.alpha <= self.alpha_bar:
                raise ValueError("alpha must lie in (0, alpha_bar]")
        else:
            if not self.steps or any(not 0 < s <= self.alpha_bar for s in self.steps):
                raise ValueError("sequence steps must lie in (0, alpha_bar]")

    @classmethod
    def fixed(cls, alpha, alpha_bar=None):
        return cls("fixed", alpha=alpha, alpha_bar=alpha if alpha_bar is None else alpha_bar)

    @classmethod
    def scaled(cls, alpha_hat, alpha_bar=None):
        """Per-run step alpha_hat / m, i.e. step alpha_hat on the loss f/m."""
        return cls("scaled", alpha=alpha_hat,
                   alpha_bar=alpha_hat if alpha_bar is None else alpha_bar)

    @classmethod
    def sequence(cls, steps, alpha_bar=None):
        steps = tuple(float(s) for s in steps)
        bar = max(steps) if alpha_bar is None else alpha_bar
        return cls("sequence", steps=steps, alpha_bar=bar)

    def step_at(self, k, m=1):
        if self.kind == "fixed":
            return self.alpha
        if self.kind == "scaled":
            return self.alpha / m
        if k >= len(self.steps):
            raise ValueError(f"sequence schedule exhausted at step {k}")
        return self.steps[k]


class RunOutcome(str, Enum):
    CONVERGED_GLOBAL = "converged_global"
    STALLED = "stalled"
    DIVERGED = "diverged"


@dataclass
class Trajectory:
    """Recorded series of one descent or flow run.

    losses, orbit_dists, and cert_margins are recorded at every step;
    iterates are thinned to every record_stride-th state plus the endpoint.
    times is the flow time grid (None for discrete descent runs).
    """

    losses: np.ndarray
    orbit_dists: np.ndarray
    cert_margins: np.ndarray
    iterates: list
    iterate_steps: list
    x_final: np.ndarray
    times: np.ndarray | None
    diverged: bool
    wall_time: float
    m: int

    @property
    def normalized_losses(self):
        return self.losses / self.m

    @property
    def n_steps(self):
        return len(self.losses) - 1


def _orbit_dist_embedded(xp, gt_plus, gt_minus, gt_norm2):
    ip = math.sqrt(float(xp @ gt_plus) ** 2 + float(xp @ gt_minus) ** 2)
    d2 = float(xp @ xp) + gt_norm2 - 2.0 * ip
    return math.sqrt(max(d2, 0.0))


class _Recorder:
    """Accumulates per-step series and thinned iterates for a Trajectory."""

    def __init__(self, instance, record_stride):
        self.instance = instance
        self.stride = max(1, int(record_stride))
        self.gt_norm2 = float(instance.gt_plus @ instance.gt_plus)
        self.gt_norm = math.sqrt(self.gt_norm2)
        self.bounds = None
        self.losses = []
        self.dists = []
        self.margins = []
        self.iterates = []
        self.iterate_steps = []

    def record(self, k, x, q, f):
        if self.bounds is None:
            self.bounds = np.sqrt(2.0 * f + 2.0 * self.instance.measurements**2)
        self.losses.append(f)
        self.dists.append(
            _orbit_dist_embedded(x, self.instance.gt_plus, self.instance.gt_minus, self.gt_norm2)
            / self.gt_norm
        )
        self.margins.append(float(np.min(self.bounds - q)))
        if k % self.stride == 0:
            self.iterates.append(x.copy())
            self.iterate_steps.append(k)

    def finish(self, x_final, k_final, times, diverged, wall_time):
        if not self.iterate_steps or self.iterate_steps[-1] != k_final:
            self.iterates.append(np.asarray(x_final, dtype=np.float64).copy())
            self.iterate_steps.append(k_final)
        return Trajectory(
            losses=np.asarray(self.losses),
            orbit_dists=np.asarray(self.dists),
            cert_margins=np.asarray(self.margins),
            iterates=self.iterates,
            iterate_steps=self.iterate_steps,
            x_final=np.asarray(x_final, dtype=np.float64).copy(),
            times=times,
            diverged=diverged,
            wall_time=wall_time,
            m=self.instance.m,
        )


def _out_of_range(x):
    return not np.all(np.isfinite(x)) or np.max(np.abs(x)) > DIVERGENCE_LIMIT


def _descend(instance, x0, step_fn, max_steps, stop_norm_tol, record_stride):
    """Shared explicit-update loop: x <- x - step_fn(k) * grad f(x).

    Used both by gradient descent and by Euler flow integration so that the
    two are bit-identical for equal steps.
    """
    t0 = time.perf_counter()
    ap = instance.ensemble.vectors
    am = instance.ensemble.vectors_minus
    y = instance.measurements
    m = instance.m
    rec = _Recorder(instance, record_stride)

    x = as_real_embedding(x0).copy()
    prev = x
    k = 0
    diverged = False
    while True:
        if _out_of_range(x):
            diverged = True
            x = prev  # keep the last finite state
            k -= 1
            break
        u = ap @ x
        v = am @ x
        q = u**2 + v**2
        r = q - y
        f = float(r @ r)
        rec.record(k, x, q, f)
        if f / m <= stop_norm_tol or k >= max_steps:
            break
        grad = 4.0 * (ap.T @ (r * u) + am.T @ (r * v))
        prev = x
        x = x - step_fn(k) * grad
        k += 1
    return rec.finish(x, max(k, 0), None, diverged, time.perf_counter() - t0)


def gd_run(instance, x0, schedule, max_iter=5000, stop_tol=1e-10, record_stride=10):
    """Gradient descent x_{k+1} = x_k - alpha_k grad f(x_k).

    Stops at max_iter or when the normalized loss f/m drops to stop_tol;
    non-finite or out-of-range iterates terminate with the divergence flag
    set and the last finite state kept.
    """
    m = instance.m
    return _descend(
        instance, x0, lambda k: schedule.step_at(k, m), max_iter, stop_tol, record_stride
    )


def default_flow_step(instance, x0):
    """Integration step from a crude curvature cap:
    h = min(1e-4, 0.1 / (8 sum_i ||a_i||^4 (||x0||^2 + ||x_gt||^2)))."""
    x0 = as_real_embedding(x0)
    norms4 = float(np.sum(np.sum(instance.ensemble.vectors**2, axis=1) ** 2))
    curvature = 8.0 * norms4 * (float(x0 @ x0) + float(instance.gt_plus @ instance.gt_plus))
    return min(1e-4, 0.1 / max(curvature, 1e-30))


def flow_integrate(instance, x0, t_end, step=None, method="rk4", record_stride=10,
                   stop_loss=None):
    """Integrate the gradient flow x' = -grad f(x) to time t_end.

    method "rk4" (default) or "euler"; Euler with step h replays gradient
    descent with fixed step h exactly.  stop_loss, when given, ends the run
    early once the raw loss falls to that value.  Non-finite states flag
    divergence (step too large for the local curvature, not unbounded flow).
    """
    if step is None:
        step = default_flow_step(instance, x0)
    if not step > 0:
        raise ValueError("step must be positive")
    n_steps = max(1, math.ceil(t_end / step - 1e-12))

    if method == "euler":
        stop_norm = -np.inf if stop_loss is None else stop_loss / instance.m
        traj = _descend(instance, x0, lambda k: step, n_steps, stop_norm, record_stride)
        times = step * np.arange(len(traj.losses))
        traj.times = times
        return traj
    if method != "rk4":
        raise ValueError(f"unknown integrator {method!r}")

    t0 = time.perf_counter()
    ap = instance.ensemble.vectors
    am = instance.ensemble.vectors_minus
    y = instance.measurements
    rec = _Recorder(instance, record_stride)
    stop = -np.inf if stop_loss is None else stop_loss

    x = as_real_embedding(x0).copy()
    prev = x
    k = 0
    diverged = False
    while True:
        if _out_of_range(x):
            diverged = True
            x = prev
            k -= 1
            break
        u = ap @ x
        v = am @ x
        q = u**2 + v**2
        r = q - y
        f = float(r @ r)
        rec.record(k, x, q, f)
        if f <= stop or k >= n_steps:
            break
        k1 = -f_grad(instance, x)
        k2 = -f_grad(instance, x + 0.5 * step * k1)
        k3 = -f_grad(instance, x + 0.5 * step * k2)
        k4 = -f_grad(instance, x + step * k3)
        prev = x
        x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        k += 1
    traj = rec.finish(x, max(k, 0), None, diverged, time.perf_counter() - t0)
    traj.times = step * np.arange(len(traj.losses))
    return traj


@dataclass
class CertificateReport:
    """Boundedness-certificate margins bound_i - q_i(x) over recorded states."""

    bounds: np.ndarray
    per_measurement_min: np.ndarray
    min_margin: float


def boundedness_certificate(instance, traj):
    """Check q_i(x) <= sqrt(2 f(x_0) + 2 y_i^2) at the thinned trajectory
    states (which include the endpoint); returns per-measurement minima of
    the margins and the overall minimum."""
    if len(traj.losses) == 0:
        raise ValueError("trajectory has no recorded states")
    f0 = float(traj.losses[0])
    bounds = np.sqrt(2.0 * f0 + 2.0 * instance.measurements**2)
    mins = np.full(instance.m, np.inf)
    for x in traj.iterates:
        q = (instance.ensemble.vectors @ x) ** 2 + (instance.ensemble.vectors_minus @ x) ** 2
        mins = np.minimum(mins, bounds - q)
    return CertificateReport(bounds, mins, float(np.min(mins)))


def success_check(instance, traj, loss_tol=1e-6, dist_tol=1e-4):
    """Classify a finished run: converged to the global-minimizer orbit
    (normalized loss and relative orbit distance both under tolerance),
    diverged, or stalled elsewhere."""
    if len(traj.losses) == 0:
        raise ValueError("trajectory has no recorded states")
    if traj.diverged:
        return RunOutcome.DIVERGED
    final_loss = float(traj.losses[-1]) / traj.m
    final_dist = float(traj.orbit_dists[-1])
    if final_loss <= loss_tol and final_dist <= dist_tol:
        return RunOutcome.CONVERGED_GLOBAL
    return RunOutcome.STALLED
