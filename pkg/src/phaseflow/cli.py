"""Command-line interface.

Subcommands: gen | solve | opnorm | landscape | flow | reproduce {fig2,fig3}.
Every run writes a JSON summary carrying the fully resolved configuration
(including derived seeds); repeated runs with the same seed produce
byte-identical outputs.  Exit codes: 0 success, 1 usage error, 2 runtime
failure.
"""

import argparse
import sys

from ._version import __version__
from .harness import (
    CampaignSpec,
    run_fig2,
    run_fig3,
    run_solve,
    run_opnorm_single,
    run_landscape,
    run_flow,
    run_gen,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(p, out_required=True):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=out_required, help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="series format: separate CSV (default) or embedded in the JSON summary")
    p.add_argument("--workers", type=int, default=1)


def build_parser():
    parser = _Parser(prog="phaseflow", description="Phase-retrieval landscape experiments")
    parser.add_argument("--version", action="version", version=f"phaseflow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a problem instance JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", required=True)
    _add_common(p)

    p = sub.add_parser("solve", help="one gradient-descent run")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", required=True)
    p.add_argument("--eta", type=float, default=5e-5)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--init-box", type=float, default=10.0)
    p.add_argument("--stop-tol", type=float, default=1e-10)
    _add_common(p)

    p = sub.add_parser("opnorm", help="one deviation operator-norm estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", required=True)
    p.add_argument("--restarts", type=int, default=20)
    _add_common(p)

    p = sub.add_parser("landscape", help="region coverage sweep and classification")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", required=True)
    p.add_argument("--delta0", type=float, default=1e-4)
    p.add_argument("--c1", type=float, default=40.0)
    p.add_argument("--c2", type=float, default=120.0)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--radius", type=float, default=3.0)
    _add_common(p)

    p = sub.add_parser("flow", help="one RK4 gradient-flow run with certificate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, action="append", required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--step", type=float, default=None)
    _add_common(p)

    p = sub.add_parser("reproduce", help="desk-scale reproduction campaigns")
    p.add_argument("target", choices=("fig2", "fig3"))
    p.add_argument("--n", type=int, action="append", default=None)
    p.add_argument("--m", type=int, action="append", default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--eta", type=float, default=5e-5)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--init-box", type=float, default=10.0)
    _add_common(p)

    return parser


def _spec_from(args, experiment, **overrides):
    fields = dict(
        experiment=experiment,
        out_dir=args.out,
        seed=args.seed,
        fmt=args.format,
        workers=args.workers,
    )
    fields.update(overrides)
    return CampaignSpec(**fields)


def _dispatch_parsed(args):
    if args.command == "gen":
        run_gen(_spec_from(args, "gen", n_values=(args.n,), m_values=tuple(args.m)))
    elif args.command == "solve":
        run_solve(
            _spec_from(
                args, "solve_single", n_values=(args.n,), m_values=tuple(args.m),
                eta=args.eta, iters=args.iters, init_box=args.init_box,
                stop_tol=args.stop_tol,
            )
        )
    elif args.command == "opnorm":
        run_opnorm_single(
            _spec_from(
                args, "opnorm_single", n_values=(args.n,), m_values=tuple(args.m),
                restarts=args.restarts,
            )
        )
    elif args.command == "landscape":
        run_landscape(
            _spec_from(
                args, "landscape", n_values=(args.n,), m_values=tuple(args.m),
                delta0=args.delta0, c1=args.c1, c2=args.c2,
                sample_count=args.samples, radius=args.radius,
            )
        )
    elif args.command == "flow":
        run_flow(
            _spec_from(
                args, "flow", n_values=(args.n,), m_values=tuple(args.m),
                t_end=args.t_end, step=args.step,
            )
        )
    elif args.command == "reproduce":
        if args.target == "fig2":
            run_fig2(
                _spec_from(
                    args, "fig2_grid",
                    n_values=tuple(args.n) if args.n else (1, 2),
                    m_values=tuple(args.m) if args.m else (250, 500, 1000, 2000, 4000),
                    trials=args.trials if args.trials is not None else 5,
                    restarts=args.restarts,
                )
            )
        else:
            run_fig3(
                _spec_from(
                    args, "fig3_loss",
                    n_values=tuple(args.n) if args.n else (4,),
                    m_values=tuple(args.m) if args.m else (10, 20, 30, 40),
                    trials=args.trials if args.trials is not None else 20,
                    eta=args.eta, iters=args.iters, init_box=args.init_box,
                )
            )
    else:  # pragma: no cover - argparse enforces choices
        raise _UsageError(f"unknown command {args.command!r}")
    return 0


def cli_dispatch(argv):
    """Parse argv and run; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version paths
        return int(exc.code or 0)
    try:
        return _dispatch_parsed(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
