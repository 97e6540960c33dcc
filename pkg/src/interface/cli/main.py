import argparse
import logging
import sys

from core.utils import EXIT_VALIDATION_ERROR, logger
from infrastructure.config import settings
from interface.cli import commands


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybridsplat", description="Hybrid static/dynamic Gaussian scene generation")
    parser.add_argument("--threads", type=_positive_int, default=None,
                        help=f"Worker threads (default: HYBRIDSPLAT_THREADS or CPU count, now {settings.runtime.threads})")
    parser.add_argument("--log-level", default=None, help="Log level, e.g. DEBUG or WARNING")
    parser.add_argument("--no-progress", action="store_true", help="Disable progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="Render a synthetic oracle bundle")
    source = synth.add_mutually_exclusive_group(required=True)
    source.add_argument("spec", nargs="?", help="Oracle scene spec JSON")
    source.add_argument("--preset", help="Built-in oracle scene: static, moving_sphere, wall or crossing")
    synth.add_argument("--seed", type=int, default=0, help="Jitter seed")
    synth.add_argument("--out", required=True, help="Output bundle directory")
    synth.set_defaults(handler=commands.synth)

    generate = sub.add_parser("generate", help="Generate a hybrid scene from a bundle")
    generate.add_argument("--bundle", required=True, help="Input bundle directory")
    generate.add_argument("--config", default=None, help="Pipeline config JSON (all fields optional)")
    generate.add_argument("--out", required=True, help="Output scene file; metrics and decomposition JSON go alongside")
    generate.set_defaults(handler=commands.generate)

    report = sub.add_parser("decompose-report", help="Write score and label overlays plus the decomposition sidecar")
    report.add_argument("--scene", required=True, help="Scene file")
    report.add_argument("--bundle", required=True, help="Bundle directory to overlay on")
    report.add_argument("--sidecar", default=None, help="Decomposition JSON (default: next to the scene)")
    report.add_argument("--out", required=True, help="Output directory")
    report.set_defaults(handler=commands.decompose_report)

    render = sub.add_parser("render", help="Render a trajectory to a PNG sequence")
    render.add_argument("--scene", required=True, help="Scene file")
    render.add_argument("--traj", required=True, help="Trajectory JSON")
    render.add_argument("--out", required=True, help="Output directory")
    render.set_defaults(handler=commands.render)

    evaluate = sub.add_parser("eval", help="Score held-out frames and decomposition IoU")
    evaluate.add_argument("--scene", required=True, help="Scene file")
    evaluate.add_argument("--bundle", required=True, help="Bundle directory")
    evaluate.add_argument("--holdout", required=True, help='Comma-separated frame indices, e.g. "3,7,11"')
    evaluate.add_argument("--out", required=True, help="Report JSON")
    evaluate.set_defaults(handler=commands.evaluate)

    plan = sub.add_parser("plan", help="Collision costs and a laterally refined trajectory")
    plan.add_argument("--scene", required=True, help="Scene file")
    plan.add_argument("--traj", required=True, help="Trajectory JSON")
    plan.add_argument("--config", default=None, help="Pipeline config JSON; only its planning group is used")
    plan.add_argument("--out", required=True, help="Adjusted trajectory JSON; costs go to <out>.costs.json")
    plan.set_defaults(handler=commands.plan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_VALIDATION_ERROR if e.code else 0
    logging.getLogger().setLevel((args.log_level or settings.runtime.log_level).upper())
    commands.apply_runtime_flags(args)
    logger.debug(f"Running {args.command}")
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
