"""Experiment campaigns behind the CLI.

Deviation-norm grids over (n, m), gradient-descent trials from random
initialization boxes, landscape coverage sweeps, and flow certificates;
every campaign resolves all of its randomness from one root seed (children
derived per cell/trial by value, not position) and emits deterministic CSV
series and JSON summaries stamped with the package version and the resolved
configuration.
"""

from dataclasses import dataclass, field, asdict
from concurrent.futures import ThreadPoolExecutor
import json
import math
from pathlib import Path

import numpy as np

from ._version import __version__
from .seeding import derive_seed
from .ensemble import (
    sample_ensemble,
    ProblemInstance,
    instance_to_json,
)
from .tensors import deviation_opnorm
from .landscape import LandscapeConfig, coverage_check, g_critical_points, classify_point
from .dynamics import (
    StepSchedule,
    gd_run,
    flow_integrate,
    boundedness_certificate,
    success_check,
    default_flow_step,
)

_EXPERIMENTS = ("fig2_grid", "fig3_loss", "opnorm_single", "solve_single", "landscape",
                "flow", "gen")


@dataclass
class CampaignSpec:
    """Fully resolved parameters of one campaign run."""

    experiment: str
    out_dir: Path
    seed: int = 0
    n_values: tuple = (4,)
    m_values: tuple = (40,)
    trials: int = 1
    eta: float = 5e-5
    iters: int = 5000
    init_box: float = 10.0
    stop_tol: float = 1e-10
    restarts: int = 20
    delta0: float = 1e-4
    c1: float = 40.0
    c2: float = 120.0
    sample_count: int = 10000
    radius: float = 3.0
    t_end: float = 1.0
    step: float | None = None
    fmt: str = "csv"
    workers: int = 1

    def __post_init__(self):
        if self.experiment not in _EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        self.out_dir = Path(self.out_dir)
        self.n_values = tuple(int(n) for n in self.n_values)
        self.m_values = tuple(int(m) for m in self.m_values)
        if not self.n_values or not self.m_values:
            raise ValueError("parameter grids must be nonempty")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")

    def config_dict(self):
        cfg = asdict(self)
        cfg["out_dir"] = str(self.out_dir)
        cfg["n_values"] = list(self.n_values)
        cfg["m_values"] = list(self.m_values)
        cfg["package"] = "phaseflow"
        cfg["version"] = __version__
        return cfg


def _fmt_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def write_csv(path, header, rows, config):
    """CSV with one provenance comment line; floats use shortest round-trip."""
    path = Path(path)
    compact = json.dumps(config, sort_keys=True, separators=(",", ":"))
    lines = [f"# phaseflow={__version__} config={compact}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _summary(config, body):
    return {"package": "phaseflow", "version": __version__, "config": config, **body}


def make_instance(n, m, ensemble_seed, gt_seed):
    """Instance with N(0, I_{2n}) sensing vectors and ground-truth embedding."""
    ens = sample_ensemble(n, m, ensemble_seed)
    gt_plus = np.random.default_rng(gt_seed).standard_normal(2 * n)
    return ProblemInstance.from_ground_truth(ens, gt_plus[:n] + 1j * gt_plus[n:])


def _map_cells(fn, cells, workers):
    if workers <= 1 or len(cells) <= 1:
        return [fn(cell) for cell in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))  # submission order keeps outputs deterministic


def run_fig2(spec):
    """Averaged deviation-opnorm estimates over an (n, m) grid.

    Per cell: `trials` fresh ensembles, one estimate each, arithmetic mean.
    Non-convergence of the estimator is recorded per cell, never fatal.
    """
    if spec.experiment != "fig2_grid":
        raise ValueError("spec.experiment must be fig2_grid")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    grid = [(n, m) for n in spec.n_values for m in spec.m_values]

    def cell_job(cell):
        n, m = cell
        estimates = []
        ens_seeds = []
        est_seeds = []
        for t in range(spec.trials):
            ens_seed = derive_seed(spec.seed, 0, n, m, t)
            est_seed = derive_seed(spec.seed, 1, n, m, t)
            ens_seeds.append(ens_seed)
            est_seeds.append(est_seed)
            ens = sample_ensemble(n, m, ens_seed)
            estimates.append(deviation_opnorm(ens, restarts=spec.restarts, seed=est_seed))
        values = [e.value for e in estimates]
        return {
            "n": n,
            "m": m,
            "mean_opnorm": float(np.mean(values)),
            "std": float(np.std(values)),
            "values": values,
            "converged": [e.converged for e in estimates],
            "ensemble_seeds": ens_seeds,
            "estimator_seeds": est_seeds,
        }

    cells = _map_cells(cell_job, grid, spec.workers)
    config = spec.config_dict()
    rows = [
        (c["n"], c["m"], c["mean_opnorm"], c["std"], spec.trials, spec.seed) for c in cells
    ]
    csv_path = write_csv(
        spec.out_dir / "opnorm_grid.csv",
        ("n", "m", "mean_opnorm", "std", "trials", "seed"),
        rows,
        config,
    )
    json_path = write_json(
        spec.out_dir / "opnorm_grid.json", _summary(config, {"cells": cells})
    )
    return {"cells": cells, "csv_path": csv_path, "json_path": json_path}


def _loss_slope(normalized_losses, window=1000, floor=1e-300):
    """Least-squares slope of log10(loss) over the final `window` entries."""
    tail = np.asarray(normalized_losses)[-window:]
    if tail.size < 2:
        return 0.0
    ks = np.arange(tail.size, dtype=np.float64)
    logs = np.log10(np.maximum(tail, floor))
    ks -= ks.mean()
    return float((ks @ (logs - logs.mean())) / (ks @ ks))


def run_fig3(spec):
    """Gradient-descent loss curves for each m: one fresh instance per m,
    `trials` initial points uniform in the 2n-coordinate box, scaled steps
    eta/m, full-length series.  Divergent trials are recorded, never fatal."""
    if spec.experiment != "fig3_loss":
        raise ValueError("spec.experiment must be fig3_loss")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n = spec.n_values[0]
    schedule = StepSchedule.scaled(spec.eta)

    def m_job(m):
        ens_seed = derive_seed(spec.seed, 2, m, 0)
        gt_seed = derive_seed(spec.seed, 2, m, 1)
        instance = make_instance(n, m, ens_seed, gt_seed)
        trials = []
        curve_rows = []
        for t in range(spec.trials):
            x0_seed = derive_seed(spec.seed, 3, m, t)
            x0 = np.random.default_rng(x0_seed).uniform(-spec.init_box, spec.init_box, 2 * n)
            traj = gd_run(instance, x0, schedule, max_iter=spec.iters, stop_tol=0.0)
            outcome = success_check(instance, traj)
            norm_losses = traj.normalized_losses
            for k, value in enumerate(norm_losses):
                curve_rows.append((m, t, k, value))
            trials.append(
                {
                    "trial": t,
                    "x0_seed": x0_seed,
                    "outcome": outcome.value,
                    "final_normalized_loss": float(norm_losses[-1]),
                    "final_orbit_dist_rel": float(traj.orbit_dists[-1]),
                    "log_loss_slope_tail": _loss_slope(norm_losses),
                    "diverged": traj.diverged,
                }
            )
        successes = sum(t["outcome"] == "converged_global" for t in trials)
        return {
            "m": m,
            "ensemble_seed": ens_seed,
            "gt_seed": gt_seed,
            "successes": successes,
            "trials": trials,
        }, curve_rows

    results = _map_cells(m_job, list(spec.m_values), spec.workers)
    config = spec.config_dict()
    curve_rows = [row for _, rows in results for row in rows]
    groups = [group for group, _ in results]
    csv_path = write_csv(
        spec.out_dir / "loss_curves.csv",
        ("m", "trial", "k", "normalized_loss"),
        curve_rows,
        config,
    )
    summary = _summary(
        config,
        {
            "n": n,
            "groups": groups,
            "success_counts": {str(g["m"]): g["successes"] for g in groups},
        },
    )
    json_path = write_json(spec.out_dir / "loss_curves.json", summary)
    return {"groups": groups, "csv_path": csv_path, "json_path": json_path}


def write_trajectory_csv(traj, path, config):
    """Trajectory series as CSV: (k or t, loss, normalized_loss,
    orbit_dist_rel, certificate_margin)."""
    flow_like = traj.times is not None
    header = ("t" if flow_like else "k", "loss", "normalized_loss", "orbit_dist_rel",
              "certificate_margin")
    axis = traj.times if flow_like else np.arange(len(traj.losses))
    rows = zip(axis, traj.losses, traj.normalized_losses, traj.orbit_dists, traj.cert_margins)
    return write_csv(path, header, rows, config)


def _trajectory_rows_json(traj):
    flow_like = traj.times is not None
    axis = traj.times if flow_like else np.arange(len(traj.losses))
    return [
        {
            ("t" if flow_like else "k"): (float(a) if flow_like else int(a)),
            "loss": float(l),
            "normalized_loss": float(l) / traj.m,
            "orbit_dist_rel": float(d),
            "certificate_margin": float(c),
        }
        for a, l, d, c in zip(axis, traj.losses, traj.orbit_dists, traj.cert_margins)
    ]


def run_solve(spec):
    """One gradient-descent run from a random box initialization."""
    if spec.experiment != "solve_single":
        raise ValueError("spec.experiment must be solve_single")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n, m = spec.n_values[0], spec.m_values[0]
    config = spec.config_dict()
    ens_seed = derive_seed(spec.seed, 4, n, m, 0)
    gt_seed = derive_seed(spec.seed, 4, n, m, 1)
    x0_seed = derive_seed(spec.seed, 5, n, m, 0)
    config["derived_seeds"] = {"ensemble": ens_seed, "ground_truth": gt_seed, "x0": x0_seed}
    instance = make_instance(n, m, ens_seed, gt_seed)
    x0 = np.random.default_rng(x0_seed).uniform(-spec.init_box, spec.init_box, 2 * n)
    traj = gd_run(instance, x0, StepSchedule.scaled(spec.eta), max_iter=spec.iters,
                  stop_tol=spec.stop_tol)
    outcome = success_check(instance, traj)
    body = {
        "outcome": outcome.value,
        "steps": traj.n_steps,
        "final_loss": float(traj.losses[-1]),
        "final_normalized_loss": float(traj.normalized_losses[-1]),
        "final_orbit_dist_rel": float(traj.orbit_dists[-1]),
        "diverged": traj.diverged,
        "min_certificate_margin": float(np.min(traj.cert_margins)),
    }
    paths = {}
    if spec.fmt == "csv":
        paths["csv"] = str(write_trajectory_csv(traj, spec.out_dir / "trajectory.csv", config))
    else:
        body["series"] = _trajectory_rows_json(traj)
    paths["json"] = str(
        write_json(spec.out_dir / "solve.json", _summary(config, body))
    )
    return {"trajectory": traj, "outcome": outcome, "paths": paths}


def run_opnorm_single(spec):
    """One deviation-opnorm estimate, JSON output."""
    if spec.experiment != "opnorm_single":
        raise ValueError("spec.experiment must be opnorm_single")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n, m = spec.n_values[0], spec.m_values[0]
    config = spec.config_dict()
    ens_seed = derive_seed(spec.seed, 0, n, m, 0)
    est_seed = derive_seed(spec.seed, 1, n, m, 0)
    config["derived_seeds"] = {"ensemble": ens_seed, "estimator": est_seed}
    ens = sample_ensemble(n, m, ens_seed)
    est = deviation_opnorm(ens, restarts=spec.restarts, seed=est_seed)
    path = write_json(
        spec.out_dir / "opnorm.json", _summary(config, {"estimate": est.to_json_dict()})
    )
    return {"estimate": est, "paths": {"json": str(path)}}


def run_landscape(spec):
    """Coverage sweep plus classification of the surrogate's critical points."""
    if spec.experiment != "landscape":
        raise ValueError("spec.experiment must be landscape")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n, m = spec.n_values[0], spec.m_values[0]
    config = spec.config_dict()
    ens_seed = derive_seed(spec.seed, 6, n, m, 0)
    gt_seed = derive_seed(spec.seed, 6, n, m, 1)
    cover_seed = derive_seed(spec.seed, 7, n, m, 0)
    config["derived_seeds"] = {"ensemble": ens_seed, "ground_truth": gt_seed,
                               "coverage": cover_seed}
    instance = make_instance(n, m, ens_seed, gt_seed)
    cfg = LandscapeConfig(delta0=spec.delta0, c1=spec.c1, c2=spec.c2)
    result = coverage_check(
        instance.ground_truth, cfg, sample_count=spec.sample_count,
        radius_multiplier=spec.radius, seed=cover_seed,
    )
    dim = 2 * n
    header = tuple(f"x{i}" for i in range(dim)) + ("r1", "r2", "r3", "covered")
    rows = [tuple(xp) + (r1, r2, r3, hit) for xp, r1, r2, r3, hit in result.records]
    csv_path = write_csv(spec.out_dir / "coverage.csv", header, rows, config)
    known = [
        {"point_kind": kind, "report": classify_point(instance, x, cfg).to_json_dict()}
        for kind, x in _known_points(instance.ground_truth)
    ]
    body = {
        "coverage_fraction": result.fraction,
        "covered": result.covered,
        "total": result.total,
        "uncovered_count": len(result.uncovered_points),
        "known_critical_points": known,
    }
    json_path = write_json(spec.out_dir / "landscape.json", _summary(config, body))
    return {"coverage": result, "paths": {"csv": str(csv_path), "json": str(json_path)}}


def _known_points(x_gt):
    points = g_critical_points(x_gt)
    kinds = ["origin"] + ["orbit"] * 4 + ["orthogonal_circle"] * (len(points) - 5)
    return list(zip(kinds, points))


def run_flow(spec):
    """One RK4 gradient-flow run with its boundedness certificate."""
    if spec.experiment != "flow":
        raise ValueError("spec.experiment must be flow")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n, m = spec.n_values[0], spec.m_values[0]
    config = spec.config_dict()
    ens_seed = derive_seed(spec.seed, 8, n, m, 0)
    gt_seed = derive_seed(spec.seed, 8, n, m, 1)
    x0_seed = derive_seed(spec.seed, 9, n, m, 0)
    config["derived_seeds"] = {"ensemble": ens_seed, "ground_truth": gt_seed, "x0": x0_seed}
    instance = make_instance(n, m, ens_seed, gt_seed)
    x0 = np.random.default_rng(x0_seed).standard_normal(2 * n)
    step = spec.step if spec.step is not None else default_flow_step(instance, x0)
    traj = flow_integrate(instance, x0, spec.t_end, step=step, method="rk4")
    cert = boundedness_certificate(instance, traj)
    body = {
        "step": step,
        "steps_taken": traj.n_steps,
        "final_loss": float(traj.losses[-1]),
        "min_certificate_margin": cert.min_margin,
        "per_measurement_min_margin": cert.per_measurement_min.tolist(),
        "diverged": traj.diverged,
    }
    paths = {}
    if spec.fmt == "csv":
        paths["csv"] = str(write_trajectory_csv(traj, spec.out_dir / "flow.csv", config))
    else:
        body["series"] = _trajectory_rows_json(traj)
    paths["json"] = str(write_json(spec.out_dir / "flow.json", _summary(config, body)))
    return {"trajectory": traj, "certificate": cert, "paths": paths}


def run_gen(spec):
    """Generate and write one problem instance document."""
    if spec.experiment != "gen":
        raise ValueError("spec.experiment must be gen")
    spec.out_dir.mkdir(parents=True, exist_ok=True)
    n, m = spec.n_values[0], spec.m_values[0]
    ens_seed = derive_seed(spec.seed, 4, n, m, 0)
    gt_seed = derive_seed(spec.seed, 4, n, m, 1)
    instance = make_instance(n, m, ens_seed, gt_seed)
    path = Path(spec.out_dir) / "instance.json"
    path.write_text(instance_to_json(instance) + "\n")
    return {"instance": instance, "paths": {"json": str(path)}}
