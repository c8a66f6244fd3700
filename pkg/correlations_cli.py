#!/usr/bin/env python3
"""
Command-line interface for the Bell diagonal correlation toolkit.

Subcommands:
    correlations   trace-distance and relative-entropy correlations of one state
    verify         analytic formulas against the numerical oracle on random states
    dynamics       correlation trajectories under a non-Markovian channel
    sweep          Werner or rank-2 family sweep with closed-form references
    freezing-scan  freezing plateaus and first sudden changes under random fields

Exit codes: 0 success, 1 verification failure, 2 invalid input.
Negative values must be attached with '=', e.g. --r=-0.7,-0.7,-0.8.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from bell_states import bd_from_spectrum, require_valid
from models import (
    BellDiagonal, BellSpectrum, CorrelationError, CorrelationsConfig, DynamicsConfig,
    DynamicsModel, FreezingScanConfig, OptimizerConfig, OutputFormat, PhaseFlipParams,
    RandomFieldParams, StateInput, SweepConfig, VerifyConfig,
)
from nonmarkov_dynamics import default_window, freezing_scaling_scan, trajectory
from numerical_oracle import FULL_SCALE_SAMPLES, verify_sweep
from report_export import (
    correlations_frame, correlations_report, emit, freezing_summary_frame, render_csv,
    render_json, sweep_frame, trajectory_footer, trajectory_frame, verify_footer, verify_frame,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID_INPUT = 2


def parse_floats(text: str) -> List[float]:
    """Parse a comma-separated list of numbers."""
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got '{text}'")


def resolve_state(state: StateInput) -> BellDiagonal:
    """
    Turn an R triple or a lambda quadruple into validated coefficients.

    Raises:
        InvalidState: If the R triple is unphysical
        InvalidSpectrum: If the lambda quadruple is not a probability vector
    """
    if state.r is not None:
        r = BellDiagonal.from_array(state.r)
        require_valid(r)
        return r
    return bd_from_spectrum(BellSpectrum.from_array(state.lam))


def _state_input(args) -> StateInput:
    return StateInput(r=tuple(args.r) if args.r else None, lam=tuple(args.lam) if args.lam else None)


def _metadata(command: str, cfg: BaseModel) -> Dict[str, Any]:
    dump = cfg.model_dump(mode='json')
    return {
        "command": command,
        "seed": dump.get("seed"),
        "config": json.dumps(dump, sort_keys=True),
    }


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_correlations(cfg: CorrelationsConfig) -> int:
    """Report both correlation hierarchies, the triangle gap and the marginal baseline."""
    r = resolve_state(cfg.state)
    if cfg.fmt is OutputFormat.JSON:
        payload = correlations_report(r)
        payload["seed"] = cfg.seed
        emit(render_json(payload), cfg.output)
    else:
        emit(render_csv(correlations_frame(r), _metadata("correlations", cfg)), cfg.output)
    return EXIT_OK


def cmd_verify(cfg: VerifyConfig) -> int:
    """Compare analytic and oracle values; exit 1 if the oracle ever wins."""
    samples = FULL_SCALE_SAMPLES if cfg.full_scale else cfg.samples
    summary = verify_sweep(samples, cfg.seed, cfg.optimizer, workers=cfg.workers)
    text = render_csv(verify_frame(summary), _metadata("verify", cfg), verify_footer(summary))
    emit(text, cfg.output)
    if not summary.passed:
        logger.error(f"Verification failed: {summary.undercut_count} sample(s) beat the analytic total correlation, "
                     f"{summary.off_vertex_undercut_count} of them away from the Bell vertices")
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def _channel_params(cfg: DynamicsConfig):
    if cfg.model is DynamicsModel.PHASE_FLIP:
        cfg.phase_flip.mu()
        return cfg.phase_flip
    return cfg.random_field


def cmd_dynamics(cfg: DynamicsConfig) -> int:
    """Write a trajectory CSV with sudden-change times in the trailing comment block."""
    r0 = resolve_state(cfg.state)
    traj = trajectory(r0, cfg.model, _channel_params(cfg), cfg.t_max, cfg.steps)
    text = render_csv(trajectory_frame(traj), _metadata("dynamics", cfg), trajectory_footer(traj))
    emit(text, cfg.output)
    return EXIT_OK


def cmd_sweep(cfg: SweepConfig) -> int:
    """Write the family sweep CSV."""
    emit(render_csv(sweep_frame(cfg.family, cfg.points), _metadata("sweep", cfg)), cfg.output)
    return EXIT_OK


def cmd_freezing_scan(cfg: FreezingScanConfig) -> int:
    """Write per-value trajectory CSVs (when an output directory is set) and a summary CSV."""
    results = freezing_scaling_scan(cfg.lambda1p_values, cfg.t_max, cfg.steps)
    if cfg.output_dir:
        directory = Path(cfg.output_dir)
        for res in results:
            meta = _metadata("freezing-scan", cfg)
            meta["lambda1p"] = res.lambda1p
            text = render_csv(trajectory_frame(res.trajectory), meta, trajectory_footer(res.trajectory))
            emit(text, str(directory / f"freezing_lambda_{res.lambda1p:g}.csv"))
    emit(render_csv(freezing_summary_frame(results), _metadata("freezing-scan", cfg)), cfg.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser, fmt_default: str = "csv"):
    parser.add_argument("--seed", type=int, default=42, help="Random seed (default: 42)")
    parser.add_argument("--output", default=None, help="Output file (default: stdout)")
    parser.add_argument("--format", dest="fmt", choices=[f.value for f in OutputFormat],
                        default=fmt_default, help=f"Output format (default: {fmt_default})")
    parser.add_argument("--verbose", action="store_true", help="Enable debug logging")


def _add_state(parser: argparse.ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=parse_floats, help="Correlation coefficients R11,R22,R33")
    group.add_argument("--lambda", dest="lam", type=parse_floats,
                       help="Bell-basis eigenvalues l1+,l1-,l2+,l2-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="correlations_cli",
        description="Trace-distance and entropic correlations of Bell diagonal states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlations", help="Correlations of a single state")
    _add_state(p)
    _add_common(p, fmt_default="json")

    p = sub.add_parser("verify", help="Cross-check closed forms against the numerical oracle")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--full-scale", action="store_true", help=f"Use {FULL_SCALE_SAMPLES} samples")
    p.add_argument("--workers", type=int, default=None,
                   help="Worker processes (default: all CPU cores)")
    p.add_argument("--starts", type=int, default=OptimizerConfig().starts,
                   help="Random starts per oracle search")
    _add_common(p)

    p = sub.add_parser("dynamics", help="Correlation trajectory under a channel")
    p.add_argument("--model", required=True, choices=[m.value for m in DynamicsModel])
    _add_state(p)
    p.add_argument("--tau", type=float, default=5.0, help="Phase flip memory time (s)")
    p.add_argument("--alpha", type=float, default=1.0, help="Phase flip coupling |alpha| (1/s)")
    p.add_argument("--g", type=float, default=1.0, help="Random field coupling (1/s)")
    p.add_argument("--tmax", "--gtmax", dest="t_max", type=float, default=None,
                   help="End of the window in nu (phase flip) or gt (random field) units")
    p.add_argument("--steps", type=int, default=2000)
    _add_common(p)

    p = sub.add_parser("sweep", help="Werner or rank-2 family sweep")
    p.add_argument("--family", required=True, help="werner or rank2")
    p.add_argument("--points", type=int, default=101)
    _add_common(p)

    p = sub.add_parser("freezing-scan", help="Freezing scaling under random fields")
    p.add_argument("--lambdas", type=parse_floats, default=[1.0, 0.9, 0.8, 0.7],
                   help="Comma-separated lambda_1^+ values")
    p.add_argument("--gtmax", dest="t_max", type=float, default=None)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--output-dir", default=None, help="Directory for per-value trajectory CSVs")
    _add_common(p)

    return parser


def build_config(args) -> BaseModel:
    """Validate parsed arguments into the command's configuration model."""
    common = {"seed": args.seed, "output": args.output, "fmt": args.fmt}
    if args.command == "correlations":
        return CorrelationsConfig(state=_state_input(args), **common)
    if args.command == "verify":
        workers = (os.cpu_count() or 1) if args.workers is None else args.workers
        return VerifyConfig(samples=args.samples, full_scale=args.full_scale, workers=workers,
                            optimizer=OptimizerConfig(starts=args.starts, seed=args.seed), **common)
    if args.command == "dynamics":
        t_max = default_window(args.model) if args.t_max is None else args.t_max
        return DynamicsConfig(
            state=_state_input(args), model=args.model,
            phase_flip=PhaseFlipParams(tau=args.tau, alpha_abs=args.alpha),
            random_field=RandomFieldParams(g=args.g),
            t_max=t_max, steps=args.steps, **common,
        )
    if args.command == "sweep":
        return SweepConfig(family=args.family, points=args.points, **common)
    extra = {} if args.t_max is None else {"t_max": args.t_max}
    return FreezingScanConfig(lambda1p_values=args.lambdas, steps=args.steps,
                              output_dir=args.output_dir, **extra, **common)


COMMANDS = {
    "correlations": cmd_correlations,
    "verify": cmd_verify,
    "dynamics": cmd_dynamics,
    "sweep": cmd_sweep,
    "freezing-scan": cmd_freezing_scan,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        int: Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID_INPUT if e.code else EXIT_OK

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_INVALID_INPUT
    except CorrelationError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
