"""Synthetic split-focus benchmark harness.

Builds artificial multi-focus pairs by disk-blurring one half of a pristine
image, runs every requested fusion method over the suite, scores each result
against the ground truth, and times the per-block cost of the method stages
(the stages every method runs anyway, forward/inverse DCT and file I/O, are
kept out of the timer).
"""

import statistics
import time
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import metrics
from .blocks import (
    BLOCK_SIZE,
    DimensionError,
    assemble_image,
    check_block_aligned,
    dct2_forward,
    dct2_inverse,
    partition_blocks,
)
from .fusion import MEASURES, FusionConfig, fusion_stages
from .pgm import quantize_u8


def disk_kernel(radius):
    """Binary pillbox kernel: taps where dx^2 + dy^2 <= r^2, normalized to 1.

    Radius 0 degenerates to the 1x1 identity kernel.
    """
    r = int(radius)
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    if r == 0:
        return np.ones((1, 1))
    dy, dx = np.mgrid[-r : r + 1, -r : r + 1]
    taps = (dx * dx + dy * dy <= r * r).astype(float)
    return taps / taps.sum()


def convolve(img, kernel):
    """2-D correlation with replicate-edge padding; output size matches input."""
    return ndimage.correlate(np.asarray(img, dtype=float), kernel, mode="nearest")


def synthetic_image(width=512, height=512, seed=0):
    """Deterministic textured test image: smooth shading, oriented gratings,
    and broadband grain, quantized to integral values in [0, 255].

    Texture covers every block, so defocus blur measurably lowers any
    per-block sharpness score; that makes these images usable as hermetic
    stand-ins for scanned photographic test material.
    """
    if width % BLOCK_SIZE or height % BLOCK_SIZE:
        raise DimensionError(
            f"synthetic image dimensions {width}x{height} are not multiples of 8"
        )
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    img = np.zeros((height, width))
    # A few very low frequency waves give large-scale light/dark structure.
    for _ in range(3):
        theta = rng.uniform(0.0, np.pi)
        freq = rng.uniform(1.5, 4.0) / max(width, height)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(20.0, 35.0)
        img += amp * np.sin(
            2.0 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase
        )
    # Oriented mid-frequency gratings carry the focus signal.
    for _ in range(6):
        theta = rng.uniform(0.0, np.pi)
        freq = rng.uniform(0.06, 0.22)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        amp = rng.uniform(8.0, 18.0)
        img += amp * np.sin(
            2.0 * np.pi * freq * (xx * np.cos(theta) + yy * np.sin(theta)) + phase
        )
    # Broadband grain.
    img += rng.normal(0.0, 3.0, img.shape)
    lo, hi = img.min(), img.max()
    img = (img - lo) * (235.0 / (hi - lo)) + 10.0
    return quantize_u8(img)


def make_split_focus_pair(img, radius):
    """Build a split-focus pair from a pristine image.

    Source A is blurred on the left half and sharp on the right, source B
    the other way around; the pristine image is the ground truth. The blur
    is a normalized disk and the blurred field is quantized to 8 bits, so
    the pair matches what would round-trip through image files. The seam
    sits at column width/2; if that is not a multiple of 8 a warning is
    issued because blocks then straddle the seam.
    """
    img = np.asarray(img, dtype=float)
    check_block_aligned(img)
    h, w = img.shape
    if w < 2 * BLOCK_SIZE:
        raise DimensionError(f"image width {w} too small to split into halves")
    half = w // 2
    if half % BLOCK_SIZE:
        warnings.warn(
            f"focus seam at column {half} is not block aligned; "
            "seam blocks will mix sharp and blurred pixels",
            stacklevel=2,
        )
    blurred = quantize_u8(convolve(img, disk_kernel(radius)))
    a = img.copy()
    a[:, :half] = blurred[:, :half]
    b = img.copy()
    b[:, half:] = blurred[:, half:]
    return a, b, img.copy()


def parse_method(token):
    """Split a benchmark method token into (measure, cv): 'sml-dct+cv' means
    the sml-dct measure with consistency verification enabled."""
    t = token.strip().lower()
    cv = t.endswith("+cv")
    if cv:
        t = t[: -len("+cv")]
    if t not in MEASURES:
        raise ValueError(
            f"unknown method '{token}'; measures are {MEASURES}, "
            "optionally suffixed with +cv"
        )
    return t, cv


@dataclass
class BenchRow:
    image: str
    radius: int
    method: str
    ssim: float
    us_per_block: float


@dataclass
class BenchReport:
    rows: list

    def methods(self):
        seen = []
        for row in self.rows:
            if row.method not in seen:
                seen.append(row.method)
        return seen

    def method_means(self):
        """Per-method (mean ssim, mean us_per_block), in first-seen order."""
        means = {}
        for method in self.methods():
            picked = [r for r in self.rows if r.method == method]
            means[method] = (
                sum(r.ssim for r in picked) / len(picked),
                sum(r.us_per_block for r in picked) / len(picked),
            )
        return means

    def radius_means(self, method):
        """Mean ssim per radius for one method, sorted by radius."""
        radii = sorted({r.radius for r in self.rows if r.method == method})
        out = []
        for radius in radii:
            picked = [
                r for r in self.rows if r.method == method and r.radius == radius
            ]
            out.append((radius, sum(r.ssim for r in picked) / len(picked)))
        return out

    def to_csv(self, include_means=True):
        lines = ["image,radius,method,ssim,us_per_block"]
        for r in self.rows:
            lines.append(
                f"{r.image},{r.radius},{r.method},{r.ssim:.6f},{r.us_per_block:.3f}"
            )
        if include_means:
            for method, (mean_ssim, mean_us) in self.method_means().items():
                lines.append(f"mean,all,{method},{mean_ssim:.6f},{mean_us:.3f}")
        return "\n".join(lines) + "\n"


def _method_config(token, threshold):
    measure, cv = parse_method(token)
    return FusionConfig(
        measure=measure,
        decision_threshold=threshold,
        consistency_verification=cv,
    )


def _stage_seconds(a, b, ca, cb, cfg, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fusion_stages(a, b, ca, cb, cfg)
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def bench_triples(triples, methods, threshold=0.0, repeat=5):
    """Run every method over prebuilt (name, radius, a, b, truth) triples.

    SSIM compares the 8-bit-quantized fused output against the truth, i.e.
    exactly what would land in an output file. Runtime is the median over
    `repeat` runs of the measure/decision/selection stages, expressed in
    microseconds per 8x8 block.
    """
    if not triples:
        raise ValueError("no benchmark triples given")
    if not methods:
        raise ValueError("no methods given")
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    rows = []
    for name, radius, a, b, truth in triples:
        try:
            ca = dct2_forward(partition_blocks(a))
            cb = dct2_forward(partition_blocks(b))
            n_blocks = ca.shape[0] * ca.shape[1]
            truth_q = quantize_u8(truth)
            for token in methods:
                cfg = _method_config(token, threshold)
                fused_grid, _, _ = fusion_stages(a, b, ca, cb, cfg)
                fused = assemble_image(dct2_inverse(fused_grid))
                score = metrics.ssim(truth_q, quantize_u8(fused))
                seconds = _stage_seconds(a, b, ca, cb, cfg, repeat)
                rows.append(
                    BenchRow(name, int(radius), token, score, seconds / n_blocks * 1e6)
                )
        except Exception as exc:
            # Annotate failures with the triple being processed.
            exc.args = (f"[{name}, radius {radius}] {exc}",) + exc.args[1:]
            raise
    return BenchReport(rows)


def run_benchmark(images, radii, methods, threshold=0.0, repeat=5):
    """Synthesize split-focus pairs for every (image, radius) and benchmark
    every method on them; images is a sequence of (name, array) pairs."""
    if not images:
        raise ValueError("no images given")
    if not radii:
        raise ValueError("no radii given")
    triples = []
    for name, img in images:
        for radius in radii:
            a, b, truth = make_split_focus_pair(img, radius)
            triples.append((name, radius, a, b, truth))
    return bench_triples(triples, methods, threshold=threshold, repeat=repeat)


def time_per_block(method, pairs, threshold=0.0, repeat=5):
    """Median microseconds per block of one method's stages over a dataset
    of (a, b) source pairs."""
    if not pairs:
        raise ValueError("no image pairs given")
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    cfg = _method_config(method, threshold)
    prepared = []
    total_blocks = 0
    for a, b in pairs:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        ca = dct2_forward(partition_blocks(a))
        cb = dct2_forward(partition_blocks(b))
        prepared.append((a, b, ca, cb))
        total_blocks += ca.shape[0] * ca.shape[1]
    for a, b, ca, cb in prepared:  # warmup
        fusion_stages(a, b, ca, cb, cfg)
    totals = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        for a, b, ca, cb in prepared:
            fusion_stages(a, b, ca, cb, cfg)
        totals.append(time.perf_counter() - t0)
    return statistics.median(totals) / total_blocks * 1e6
