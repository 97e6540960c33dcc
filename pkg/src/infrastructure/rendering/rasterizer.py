"""Tile-based Gaussian splatting: forward render, analytic backward, and a brute-force reference."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, TypeVar

import numpy as np

from core.exceptions import InvalidInputError
from core.models import CameraPose, GaussianSnapshot
from core.utils import logger
from infrastructure.rendering.compositing import (
    BlockBackward,
    BlockForward,
    block_weights,
    composite_block,
    composite_block_backward,
)
from infrastructure.rendering.options import GaussianGradients, RenderGrad, RenderOptions, RenderOutput
from infrastructure.rendering.projection import ScreenSpace, project_gaussians, project_gaussians_backward

T = TypeVar("T")


@dataclass(frozen=True)
class Tile:
    y0: int
    y1: int
    x0: int
    x1: int

    def pixels(self) -> np.ndarray:
        ys, xs = np.mgrid[self.y0:self.y1, self.x0:self.x1]
        return np.stack([xs.ravel(), ys.ravel()], axis=-1).astype(np.float64)


def make_tiles(height: int, width: int, tile_size: int) -> list[Tile]:
    return [
        Tile(y0, min(y0 + tile_size, height), x0, min(x0 + tile_size, width))
        for y0 in range(0, height, tile_size)
        for x0 in range(0, width, tile_size)
    ]


def _tile_members(screen: ScreenSpace, tile: Tile) -> np.ndarray:
    """Gaussians whose footprint box touches the tile, in compositing order."""
    order = screen.order
    u, v = screen.means2d[order, 0], screen.means2d[order, 1]
    r = screen.radii[order]
    hit = (u + r >= tile.x0) & (u - r <= tile.x1 - 1) & (v + r >= tile.y0) & (v - r <= tile.y1 - 1)
    return order[hit]


def _parallel_map(func: Callable[[Tile], T], tiles: Iterable[Tile], threads: int) -> list[T]:
    # Results come back in tile order whatever the worker count.
    if threads <= 1:
        return [func(tile) for tile in tiles]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, tiles))


def _forward_block(screen: ScreenSpace, members: np.ndarray, pixels: np.ndarray, options: RenderOptions,
                   termination: float) -> BlockForward:
    bw = block_weights(
        pixels,
        screen.means2d[members],
        screen.conics[members],
        screen.opacities[members],
        options.footprint_sigma,
        options.min_alpha,
        termination,
    )
    payloads = screen.payloads[members] if screen.payloads is not None else None
    return composite_block(bw, screen.colors[members], screen.depths[members], payloads, options.background)


def _empty_output(pose: CameraPose, options: RenderOptions, skipped: int) -> RenderOutput:
    h, w = pose.height, pose.width
    return RenderOutput(
        color=np.broadcast_to(options.background, (h, w, 3)).copy(),
        alpha=np.zeros((h, w)),
        depth=np.zeros((h, w)),
        contrib_count=np.zeros((h, w), dtype=np.int64),
        transmittance=np.ones((h, w)),
        scalar=np.zeros((h, w)) if options.payload else None,
        skipped=skipped,
    )


def _write_block(output: RenderOutput, tile: Tile, block: BlockForward) -> None:
    shape = (tile.y1 - tile.y0, tile.x1 - tile.x0)
    region = (slice(tile.y0, tile.y1), slice(tile.x0, tile.x1))
    output.color[region] = block.color.reshape(shape + (3,))
    output.alpha[region] = block.alpha.reshape(shape)
    output.depth[region] = block.depth.reshape(shape)
    output.contrib_count[region] = block.contrib_count.reshape(shape)
    output.transmittance[region] = block.transmittance.reshape(shape)
    if output.scalar is not None and block.scalar is not None:
        output.scalar[region] = block.scalar.reshape(shape)


def render(snapshot: GaussianSnapshot, pose: CameraPose, options: RenderOptions | None = None) -> RenderOutput:
    """Render a snapshot from a pose.

    Compositing runs per 16x16 tile over the Gaussians whose footprint box touches the tile,
    sorted by camera depth with the snapshot index as tie-break. A pixel stops compositing once
    its transmittance falls below `options.termination_transmittance`.
    """
    options = options or RenderOptions()
    screen = project_gaussians(snapshot, pose, options)
    if screen.skipped:
        logger.debug(f"Skipped {screen.skipped} Gaussians with degenerate 2D covariance")
    output = _empty_output(pose, options, screen.skipped)
    if screen.order.size == 0:
        return output

    tiles = make_tiles(pose.height, pose.width, options.tile_size)

    def run(tile: Tile) -> BlockForward | None:
        members = _tile_members(screen, tile)
        if members.size == 0:
            return None
        return _forward_block(screen, members, tile.pixels(), options, options.termination_transmittance)

    for tile, block in zip(tiles, _parallel_map(run, tiles, options.threads)):
        if block is not None:
            _write_block(output, tile, block)
    return output


def brute_force_render(snapshot: GaussianSnapshot, pose: CameraPose,
                       options: RenderOptions | None = None) -> RenderOutput:
    """Reference renderer: every pixel composites every Gaussian, no tiles, no early termination."""
    options = options or RenderOptions()
    screen = project_gaussians(snapshot, pose, options)
    output = _empty_output(pose, options, screen.skipped)
    if screen.order.size == 0:
        return output
    whole = Tile(0, pose.height, 0, pose.width)
    block = _forward_block(screen, screen.order, whole.pixels(), options, termination=0.0)
    _write_block(output, whole, block)
    return output


def _check_upstream(upstream: RenderGrad, pose: CameraPose, options: RenderOptions) -> RenderGrad:
    h, w = pose.height, pose.width
    expected = {"color": (h, w, 3), "alpha": (h, w), "depth": (h, w), "scalar": (h, w)}
    resolved = {}
    for name, shape in expected.items():
        value = getattr(upstream, name)
        if value is None:
            resolved[name] = np.zeros(shape)
            continue
        value = np.asarray(value, dtype=np.float64)
        if value.shape != shape:
            raise InvalidInputError(f"upstream {name} gradient has shape {value.shape}, expected {shape}")
        resolved[name] = value
    if upstream.scalar is not None and not options.payload:
        raise InvalidInputError("scalar gradient given but payload rendering is off")
    return RenderGrad(**resolved)


def render_backward(snapshot: GaussianSnapshot, pose: CameraPose, options: RenderOptions | None,
                    upstream: RenderGrad) -> GaussianGradients:
    """Gradients of a scalar loss w.r.t. the snapshot's raw parameters, given dLoss/dRenderOutput.

    The forward pass is recomputed tile by tile. Per-tile gradient buffers are summed in tile
    order, so results do not depend on the worker count.
    """
    options = options or RenderOptions()
    upstream = _check_upstream(upstream, pose, options)
    screen = project_gaussians(snapshot, pose, options)
    n = len(snapshot)
    grad_means2d = np.zeros((n, 2))
    grad_conics = np.zeros((n, 2, 2))
    grad_opacities = np.zeros(n)
    grad_colors = np.zeros((n, 3))
    grad_depths = np.zeros(n)
    grad_payloads = np.zeros(n) if options.payload else None
    if screen.order.size == 0:
        return project_gaussians_backward(snapshot, pose, screen, grad_means2d, grad_conics, grad_opacities,
                                          grad_colors, grad_depths)

    tiles = make_tiles(pose.height, pose.width, options.tile_size)

    def run(tile: Tile) -> tuple[np.ndarray, BlockBackward] | None:
        members = _tile_members(screen, tile)
        if members.size == 0:
            return None
        region = (slice(tile.y0, tile.y1), slice(tile.x0, tile.x1))
        bw = block_weights(tile.pixels(), screen.means2d[members], screen.conics[members],
                           screen.opacities[members], options.footprint_sigma, options.min_alpha,
                           options.termination_transmittance)
        payloads = screen.payloads[members] if screen.payloads is not None else None
        block = composite_block_backward(
            bw,
            screen.opacities[members],
            screen.conics[members],
            screen.colors[members],
            screen.depths[members],
            payloads,
            options.background,
            upstream.color[region].reshape(-1, 3),
            upstream.alpha[region].reshape(-1),
            upstream.depth[region].reshape(-1),
            upstream.scalar[region].reshape(-1) if options.payload else None,
        )
        return members, block

    for result in _parallel_map(run, tiles, options.threads):
        if result is None:
            continue
        members, block = result
        grad_means2d[members] += block.means2d
        grad_conics[members] += block.conics
        grad_opacities[members] += block.opacities
        grad_colors[members] += block.colors
        grad_depths[members] += block.depths
        if grad_payloads is not None:
            grad_payloads[members] += block.payloads

    grads = project_gaussians_backward(snapshot, pose, screen, grad_means2d, grad_conics, grad_opacities,
                                       grad_colors, grad_depths)
    grads.payloads = grad_payloads
    return grads
