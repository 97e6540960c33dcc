"""Command handlers. Inputs are validated before anything is written; outputs appear together or not at all."""

import argparse
import json
from pathlib import Path

import numpy as np

from core.exceptions import ConfigValidationError
from core.models import HybridScene
from core.utils import atomic_directory, atomic_outputs, atomic_write_text, handle_command_errors, logger
from infrastructure.config import load_config, settings
from infrastructure.oracle import PRESETS, generate_bundle, load_oracle_spec
from infrastructure.rendering import RenderOptions
from infrastructure.storage import (
    dump_trajectory,
    encode_scene,
    ingest_bundle,
    load_scene,
    load_trajectory,
    write_bundle,
)
from infrastructure.storage.bundle_io import frame_name, write_png
from application.decomposition import DecompositionResult, read_sidecar, write_decomposition_report, write_sidecar
from application.evaluation import (
    collision_cost,
    collision_rate,
    decomposition_iou,
    evaluate_views,
    optimize_trajectory,
    render_trajectory,
    trajectory_l2,
)
from application.pipeline import generate_scene


def _json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def sidecar_path(scene_path: Path) -> Path:
    return scene_path.with_suffix(".decomposition.json")


def metrics_path(scene_path: Path) -> Path:
    return scene_path.with_suffix(".metrics.json")


def costs_path(trajectory_path: Path) -> Path:
    return trajectory_path.with_suffix(".costs.json")


def parse_holdout(text: str) -> list[int]:
    """"3,7,11" -> [3, 7, 11]; an empty list is a validation error."""
    try:
        frames = sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError as e:
        raise ConfigValidationError(f"holdout must be comma-separated frame indices, got '{text}'") from e
    if not frames:
        raise ConfigValidationError("holdout list is empty")
    if frames[0] < 0:
        raise ConfigValidationError(f"holdout frames must be >= 0, got {frames}")
    return frames


def result_from_scene(scene: HybridScene, tau: float = 0.5) -> DecompositionResult:
    """Decomposition view reconstructed from a scene file when no sidecar is available."""
    ids = np.concatenate([scene.static_gaussians.ids, scene.dynamic_gaussians.ids])
    scores = np.concatenate([scene.static_gaussians.dynamic_scores, scene.dynamic_gaussians.dynamic_scores])
    labels = np.concatenate([np.zeros(len(scene.static_gaussians), bool), np.ones(len(scene.dynamic_gaussians), bool)])
    return DecompositionResult(ids=ids, scores=scores, threshold_labels=scores > tau, grouped_labels=labels,
                               cluster_ids=np.full(len(ids), -1), tau=tau)


def _scene_options(scene: HybridScene) -> RenderOptions:
    return RenderOptions(background=np.asarray(scene.metadata.get("background", (0.0, 0.0, 0.0))))


@handle_command_errors
def synth(args: argparse.Namespace) -> None:
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigValidationError(f"unknown preset '{args.preset}'; choose from {sorted(PRESETS)}")
        spec = PRESETS[args.preset]()
    else:
        spec = load_oracle_spec(args.spec)
    bundle = generate_bundle(spec, seed=args.seed)
    write_bundle(bundle, args.out)


@handle_command_errors
def generate(args: argparse.Namespace) -> None:
    config = load_config(args.config)
    bundle = ingest_bundle(args.bundle)
    out = Path(args.out)
    result = generate_scene(bundle, config)
    with atomic_outputs() as stage:
        stage(out).write_bytes(encode_scene(result.scene))
        stage(metrics_path(out)).write_text(result.report.model_dump_json(indent=2))
        write_sidecar(result.decomposition, stage(sidecar_path(out)))
    logger.info(f"Wrote scene to {out}")


@handle_command_errors
def decompose_report(args: argparse.Namespace) -> None:
    scene = load_scene(args.scene)
    bundle = ingest_bundle(args.bundle)
    sidecar = Path(args.sidecar) if args.sidecar else sidecar_path(Path(args.scene))
    result = read_sidecar(sidecar) if sidecar.is_file() else result_from_scene(scene)
    write_decomposition_report(scene, result, bundle, args.out, _scene_options(scene))


@handle_command_errors
def render(args: argparse.Namespace) -> None:
    scene = load_scene(args.scene)
    trajectory = load_trajectory(args.traj)
    frames = render_trajectory(scene, trajectory, _scene_options(scene))
    with atomic_directory(args.out) as tmp:
        for i, image in enumerate(frames):
            write_png(tmp / frame_name(i, ".png"), image)
    logger.info(f"Rendered {len(frames)} views to {args.out}")


@handle_command_errors
def evaluate(args: argparse.Namespace) -> None:
    holdout = parse_holdout(args.holdout)
    scene = load_scene(args.scene)
    bundle = ingest_bundle(args.bundle)
    missing = [i for i in holdout if i >= len(bundle)]
    if missing:
        raise ConfigValidationError(f"holdout frames {missing} do not exist in a {len(bundle)}-frame bundle")
    options = RenderOptions(background=bundle.background)
    per_frame = evaluate_views(scene, bundle, holdout, options)
    summary = {
        "psnr": float(np.mean([m["psnr"] for m in per_frame])),
        "ssim": float(np.mean([m["ssim"] for m in per_frame])),
        "frames": len(per_frame),
    }
    if bundle.has_masks:
        summary["decomposition_iou"] = decomposition_iou(scene, bundle, options=options)
    atomic_write_text(args.out, _json({"per_frame": per_frame, "summary": summary}))
    logger.info(f"Held-out PSNR {summary['psnr']:.2f} dB, SSIM {summary['ssim']:.4f}")


@handle_command_errors
def plan(args: argparse.Namespace) -> None:
    scene = load_scene(args.scene)
    trajectory = load_trajectory(args.traj)
    params = load_config(args.config).planning
    initial_costs = collision_cost(scene, trajectory, params)
    result = optimize_trajectory(scene, trajectory, params)
    out = Path(args.out)
    report = {
        "per_step": [
            {"step": i, "t": pose.timestamp_index, "initial_cost": float(a), "cost": float(b), "offset": float(o)}
            for i, (pose, a, b, o) in enumerate(zip(trajectory, initial_costs, result.costs, result.offsets))
        ],
        "summary": {
            "initial_total": float(initial_costs.sum()),
            "total": result.total,
            "initial_collision_rate": collision_rate(initial_costs, params.collision_threshold),
            "collision_rate": collision_rate(result.costs, params.collision_threshold),
            "l2": trajectory_l2(trajectory, result.trajectory),
            "accepted_moves": len(result.accepted),
        },
    }
    with atomic_outputs() as stage:
        stage(out).write_text(dump_trajectory(result.trajectory))
        stage(costs_path(out)).write_text(_json(report))


def apply_runtime_flags(args: argparse.Namespace) -> None:
    if args.threads is not None:
        settings.runtime.threads = args.threads
    if args.no_progress:
        settings.runtime.progress = False
