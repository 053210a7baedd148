"""Per-block focus measures.

The compressed-domain measures (sml_dct, variance_dct, ac_max) work directly
on 8x8 DCT coefficient blocks and broadcast over (..., 8, 8) stacks, so a
whole block grid evaluates in one call. The spatial-domain SML is the slow
pixel-space reference the DCT route is checked against.
"""

from dataclasses import dataclass

import numpy as np

from .blocks import BLOCK_SIZE, build_derivative_kernel, check_block_aligned


@dataclass(frozen=True)
class SpatialSmlParams:
    """Parameters of the spatial-domain SML: pixel step and ML cutoff."""

    step: int = 1
    ml_threshold: float = 0.0

    def __post_init__(self):
        if not 1 <= self.step < BLOCK_SIZE:
            raise ValueError(f"step must be in [1, {BLOCK_SIZE}), got {self.step}")
        if self.ml_threshold < 0:
            raise ValueError(f"ml_threshold must be >= 0, got {self.ml_threshold}")


def sml_dct(coeffs, kernel=None):
    """Sum of modified Laplacian computed straight from DCT coefficients.

    The precomputed second-derivative kernel is applied down the columns and
    along the rows of the coefficient block; the measure is the sum of
    absolute values of both filtered blocks. Accepts (..., n, n) stacks and
    returns a matching stack of non-negative scalars.
    """
    g = np.asarray(coeffs, dtype=float)
    n = g.shape[-1]
    if kernel is None:
        kernel = build_derivative_kernel(n)
    k = np.asarray(kernel, dtype=float)
    gx = k @ g
    gy = g @ k.T
    return (np.abs(gx) + np.abs(gy)).sum(axis=(-2, -1))


def variance_dct(coeffs):
    """Pixel variance of a block expressed as its AC coefficient energy.

    Under the orthonormal DCT the AC energy divided by the pixel count equals
    the spatial variance exactly, so no inverse transform is needed.
    """
    g = np.asarray(coeffs, dtype=float)
    total = (g * g).sum(axis=(-2, -1))
    dc = g[..., 0, 0]
    return (total - dc * dc) / (g.shape[-1] * g.shape[-2])


def ac_max(coeffs):
    """Largest absolute AC coefficient of a block (DC excluded)."""
    mags = np.abs(np.asarray(coeffs, dtype=float)).copy()
    mags[..., 0, 0] = 0.0
    return mags.max(axis=(-2, -1))


def ml_spatial(img, x, y, step=1):
    """Modified Laplacian at pixel (x, y): absolute second differences
    along rows and columns, at the given pixel step.

    x is the row index, y the column index. The step-neighbourhood must lie
    inside the image; callers wanting border values pad first.
    """
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    if not (step <= x < h - step and step <= y < w - step):
        raise IndexError(
            f"pixel ({x}, {y}) with step {step} has neighbours outside {h}x{w}"
        )
    horiz = abs(2.0 * img[x, y] - img[x - step, y] - img[x + step, y])
    vert = abs(2.0 * img[x, y] - img[x, y - step] - img[x, y + step])
    return horiz + vert


def _ml_map(img, step):
    # Replicate-edge padding keeps border pixels defined.
    padded = np.pad(img, step, mode="edge")
    center = padded[step:-step, step:-step]
    up = padded[: -2 * step, step:-step]
    down = padded[2 * step :, step:-step]
    left = padded[step:-step, : -2 * step]
    right = padded[step:-step, 2 * step :]
    return np.abs(2.0 * center - up - down) + np.abs(2.0 * center - left - right)


def sml_spatial(img, top, left, params=None):
    """Spatial-domain SML of the 8x8 window with top-left pixel (top, left).

    Context comes from the surrounding image; where the step-neighbourhood
    leaves the image the edge is replicated. Only ML values at or above the
    threshold contribute.
    """
    p = params or SpatialSmlParams()
    img = np.asarray(img, dtype=float)
    h, w = img.shape
    if not (0 <= top <= h - BLOCK_SIZE and 0 <= left <= w - BLOCK_SIZE):
        raise IndexError(f"block at ({top}, {left}) does not fit inside {h}x{w}")
    ml = _ml_map(img, p.step)[top : top + BLOCK_SIZE, left : left + BLOCK_SIZE]
    return float(ml[ml >= p.ml_threshold].sum())


def sml_spatial_map(img, params=None):
    """Spatial-domain SML for every 8x8 block of an aligned image."""
    p = params or SpatialSmlParams()
    img = np.asarray(img, dtype=float)
    check_block_aligned(img)
    ml = _ml_map(img, p.step)
    ml = np.where(ml >= p.ml_threshold, ml, 0.0)
    r = img.shape[0] // BLOCK_SIZE
    c = img.shape[1] // BLOCK_SIZE
    return ml.reshape(r, BLOCK_SIZE, c, BLOCK_SIZE).sum(axis=(1, 3))
