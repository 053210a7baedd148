"""Blockwise 8x8 orthonormal DCT-II and block-grid plumbing.

Images are 2-D float64 arrays (rows x cols). A block grid is a 4-D array of
shape (block_rows, block_cols, 8, 8), so per-block math broadcasts over the
first two axes. Everything here is a pure function of its inputs; the cached
matrices are marked read-only and safe to share across threads.
"""

import functools

import numpy as np

BLOCK_SIZE = 8


class DimensionError(ValueError):
    """Image or grid dimensions violate the 8x8 block contract."""


def check_block_aligned(img, name="image"):
    """Raise DimensionError unless both dimensions are multiples of 8."""
    h, w = img.shape[0], img.shape[1]
    if h % BLOCK_SIZE or w % BLOCK_SIZE:
        raise DimensionError(
            f"{name}: dimensions {w}x{h} are not multiples of {BLOCK_SIZE}"
        )


def partition_blocks(img):
    """Split an image into a (rows/8, cols/8, 8, 8) grid of pixel blocks.

    Lossless: assemble_image(partition_blocks(img)) reproduces img exactly.
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2:
        raise DimensionError(f"expected a 2-D image, got shape {img.shape}")
    check_block_aligned(img)
    r = img.shape[0] // BLOCK_SIZE
    c = img.shape[1] // BLOCK_SIZE
    return img.reshape(r, BLOCK_SIZE, c, BLOCK_SIZE).swapaxes(1, 2).copy()


def assemble_image(blocks):
    """Inverse of partition_blocks: stitch a 4-D block grid back into an image."""
    try:
        grid = np.asarray(blocks, dtype=float)
    except ValueError as exc:
        raise DimensionError(f"ragged block grid: {exc}") from None
    if grid.ndim != 4:
        raise DimensionError(f"expected a 4-D block grid, got shape {grid.shape}")
    r, c, bh, bw = grid.shape
    if r == 0 or c == 0:
        raise DimensionError("block grid is empty")
    if bh != BLOCK_SIZE or bw != BLOCK_SIZE:
        raise DimensionError(f"blocks must be {BLOCK_SIZE}x{BLOCK_SIZE}, got {bh}x{bw}")
    return grid.swapaxes(1, 2).reshape(r * bh, c * bw).copy()


@functools.lru_cache(maxsize=None)
def dct_basis(n=BLOCK_SIZE):
    """Orthonormal DCT-II basis matrix.

    Row u holds sqrt(2/n) * c(u) * cos((2m+1) u pi / 2n) for m = 0..n-1, with
    c(0) = 1/sqrt(2) and c(u) = 1 otherwise, so the matrix is orthogonal and
    Parseval holds exactly.
    """
    m = np.arange(n)
    basis = np.sqrt(2.0 / n) * np.cos((2 * m + 1) * m[:, None] * np.pi / (2 * n))
    basis[0] /= np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def dct2_forward(block):
    """2-D orthonormal DCT-II of square blocks; accepts (..., n, n) stacks."""
    x = np.asarray(block, dtype=float)
    n = x.shape[-1]
    if x.ndim < 2 or x.shape[-2] != n:
        raise DimensionError(f"blocks must be square, got shape {x.shape}")
    b = dct_basis(n)
    return b @ x @ b.T


def dct2_inverse(coeffs):
    """Exact inverse of dct2_forward; accepts (..., n, n) stacks."""
    g = np.asarray(coeffs, dtype=float)
    n = g.shape[-1]
    if g.ndim < 2 or g.shape[-2] != n:
        raise DimensionError(f"coefficient blocks must be square, got shape {g.shape}")
    b = dct_basis(n)
    return b.T @ g @ b


@functools.lru_cache(maxsize=None)
def build_derivative_kernel(n=BLOCK_SIZE):
    """Second-derivative cosine kernel k, input-independent, computed once.

    k[a, u] = sum_m 2 (u pi)^2 / n^3 * c(a) c(u)
              * cos((2m+1) a pi / 2n) * cos((2m+1) u pi / 2n)

    Applying k down the columns (k @ G) or along the rows (G @ k.T) of a DCT
    coefficient block yields the coefficients of the block's second derivative
    in the corresponding direction. The sum over m is carried out literally;
    cosine orthogonality makes the result diagonal with k[u, u] = (u pi / n)^2,
    which the tests exploit as an independent check.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"kernel size must be at least 2, got {n}")
    m = np.arange(n)
    cos_t = np.cos((2 * m[None, :] + 1) * m[:, None] * np.pi / (2 * n))
    c = np.ones(n)
    c[0] = 1.0 / np.sqrt(2.0)
    scale = 2.0 * (m * np.pi) ** 2 / n**3
    kern = np.einsum("am,um->au", cos_t, cos_t) * np.outer(c, c) * scale[None, :]
    kern.setflags(write=False)
    return kern


# Shared read-only kernel for the standard 8x8 block size.
DERIVATIVE_KERNEL = build_derivative_kernel(BLOCK_SIZE)
