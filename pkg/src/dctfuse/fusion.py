"""Block-selection fusion pipeline.

Two (or more) sources are partitioned into 8x8 blocks, transformed to the
DCT domain, scored with a focus measure, and the fused image is stitched
from the sharper blocks. An optional 3x3 consistency-verification pass
majority-filters the per-block decisions before selection. All selection
and averaging happens on DCT coefficients; pixels only reappear at the
final inverse transform.
"""

from dataclasses import dataclass, field

import numpy as np

from . import measures
from .blocks import (
    DimensionError,
    assemble_image,
    check_block_aligned,
    dct2_forward,
    dct2_inverse,
    partition_blocks,
)
from .measures import SpatialSmlParams

MEASURES = ("sml-dct", "variance-dct", "ac-max", "sml-spatial")


@dataclass(frozen=True)
class FusionConfig:
    """Pipeline knobs: focus measure, decision threshold, and CV toggle."""

    measure: str = "sml-dct"
    decision_threshold: float = 0.0
    consistency_verification: bool = True
    spatial: SpatialSmlParams = field(default_factory=SpatialSmlParams)

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ValueError(
                f"unknown focus measure '{self.measure}'; choose from {MEASURES}"
            )
        if self.decision_threshold < 0:
            raise ValueError(
                f"decision threshold must be >= 0, got {self.decision_threshold}"
            )


@dataclass
class FusionResult:
    fused: np.ndarray
    decision: np.ndarray
    refined: np.ndarray


def decision_map(fa, fb, threshold=0.0):
    """Ternary per-block choice: +1 where fa leads fb by more than the
    threshold, -1 where it trails by more, 0 inside the band."""
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    if fa.shape != fb.shape:
        raise DimensionError(f"focus map shapes differ: {fa.shape} vs {fb.shape}")
    m = np.zeros(fa.shape, dtype=int)
    m[fa > fb + threshold] = 1
    m[fa < fb - threshold] = -1
    return m


def consistency_verify(m):
    """3x3 neighbourhood sum of the decision map (centre included).

    Out-of-grid neighbours contribute 0, so values stay within [-9, 9].
    A lone misdecision surrounded by agreeing neighbours is outvoted.
    """
    m = np.asarray(m, dtype=int)
    r, c = m.shape
    padded = np.pad(m, 1)
    s = np.zeros_like(m)
    for di in range(3):
        for dj in range(3):
            s += padded[di : di + r, dj : dj + c]
    return s


def select_blocks(ga, gb, s):
    """Pick coefficient blocks by the sign of the refined map.

    Positive picks the first source, negative the second, zero averages the
    two coefficient-wise (which equals pixel averaging, by linearity).
    """
    ga = np.asarray(ga, dtype=float)
    gb = np.asarray(gb, dtype=float)
    s = np.asarray(s)
    if ga.shape != gb.shape:
        raise DimensionError(f"block grid shapes differ: {ga.shape} vs {gb.shape}")
    if s.shape != ga.shape[:2]:
        raise DimensionError(
            f"map shape {s.shape} does not match block grid {ga.shape[:2]}"
        )
    s4 = s[:, :, None, None]
    return np.where(s4 > 0, ga, np.where(s4 < 0, gb, 0.5 * (ga + gb)))


def _focus_map(img, coeffs, config):
    if config.measure == "sml-dct":
        return measures.sml_dct(coeffs)
    if config.measure == "variance-dct":
        return measures.variance_dct(coeffs)
    if config.measure == "ac-max":
        return measures.ac_max(coeffs)
    if config.measure == "sml-spatial":
        return measures.sml_spatial_map(img, config.spatial)
    raise ValueError(f"unknown focus measure '{config.measure}'")


def fusion_stages(a, b, ca, cb, config):
    """Measure maps, decision, optional CV, and block selection, given the
    precomputed DCT grids of both sources.

    Returns (fused block grid, decision map, refined map). Split out from
    fuse_pair so the benchmark can time exactly these stages.
    """
    fa = _focus_map(a, ca, config)
    fb = _focus_map(b, cb, config)
    m = decision_map(fa, fb, config.decision_threshold)
    s = consistency_verify(m) if config.consistency_verification else m
    return select_blocks(ca, cb, s), m, s


def fuse_pair(a, b, config=None):
    """Fuse two same-size sources; returns the fused image plus the decision
    and refined maps as diagnostics."""
    cfg = config if config is not None else FusionConfig()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"source dimensions differ: {a.shape} vs {b.shape}")
    check_block_aligned(a)
    ca = dct2_forward(partition_blocks(a))
    cb = dct2_forward(partition_blocks(b))
    fused_grid, m, s = fusion_stages(a, b, ca, cb, cfg)
    return FusionResult(assemble_image(dct2_inverse(fused_grid)), m, s)


def _majority_labels(labels, maps):
    """3x3 majority vote over source indices; ties go to the candidate with
    the larger focus value at the block (then the lower index)."""
    k, r, c = maps.shape
    padded = np.pad(labels, 1, constant_values=-1)
    counts = np.zeros((k, r, c), dtype=int)
    for di in range(3):
        for dj in range(3):
            window = padded[di : di + r, dj : dj + c]
            for idx in range(k):
                counts[idx] += window == idx
    best = counts.max(axis=0)
    tied = np.where(counts == best, maps, -np.inf)
    return np.argmax(tied, axis=0)


def fuse_multi(sources, config=None, return_labels=False):
    """Fuse two or more same-size sources by per-block focus argmax.

    With consistency verification enabled the winning source indices are
    majority-filtered over each 3x3 block neighbourhood. This is the
    many-source generalisation of the pairwise rule; it reduces to fuse_pair
    for two sources wherever their focus values differ.
    """
    cfg = config if config is not None else FusionConfig()
    imgs = [np.asarray(s, dtype=float) for s in sources]
    if len(imgs) < 2:
        raise ValueError(f"need at least two source images, got {len(imgs)}")
    shape = imgs[0].shape
    for i, img in enumerate(imgs[1:], start=1):
        if img.shape != shape:
            raise DimensionError(
                f"source {i} dimensions {img.shape} differ from {shape}"
            )
    check_block_aligned(imgs[0])
    coeffs = np.stack([dct2_forward(partition_blocks(img)) for img in imgs])
    maps = np.stack(
        [_focus_map(img, cg, cfg) for img, cg in zip(imgs, coeffs)]
    )
    labels = np.argmax(maps, axis=0)
    if cfg.consistency_verification:
        labels = _majority_labels(labels, maps)
    picked = np.take_along_axis(coeffs, labels[None, :, :, None, None], axis=0)[0]
    fused = assemble_image(dct2_inverse(picked))
    if return_labels:
        return fused, labels
    return fused


def format_map(m):
    """Serialize a decision/refined/label map as a plain-text grid, one row
    per line, space-separated integers."""
    grid = np.asarray(m)
    return "\n".join(" ".join(str(int(v)) for v in row) for row in grid) + "\n"
