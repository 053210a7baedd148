"""Fusion quality metrics.

Three metrics cover the two evaluation regimes: SSIM against a known ground
truth, and mutual information plus the gradient-preservation score for real
pairs where no reference exists. All three take float images in the nominal
[0, 255] range.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.signal import fftconvolve

from .blocks import DimensionError
from .pgm import quantize_u8

# Standard SSIM parameterization: 11x11 Gaussian window, sigma 1.5,
# K1 = 0.01, K2 = 0.03 on an 8-bit dynamic range.
_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
_DYNAMIC_RANGE = 255.0

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = _SOBEL_X.T

# Sigmoid constants of the gradient-preservation metric, scaled below so a
# perfectly preserved edge scores exactly 1.
_GAMMA_G, _KAPPA_G, _SIGMA_G = 0.9994, -15.0, 0.5
_GAMMA_A, _KAPPA_A, _SIGMA_A = 0.9879, -22.0, 0.8


@dataclass
class MetricsReport:
    """Per-image metric values; absent metrics stay None."""

    name: str = ""
    ssim: float | None = None
    mi: float | None = None
    qabf: float | None = None

    def csv_rows(self):
        rows = []
        for label, value in (("ssim", self.ssim), ("mi", self.mi), ("qabf", self.qabf)):
            if value is not None:
                rows.append(f"{label},{value:.6f}")
        return rows


def _gaussian_window(size, sigma):
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(ref, test):
    """Mean structural similarity over all valid 11x11 window positions.

    Identical inputs score exactly 1.0. The result lives in (-1, 1].
    """
    x = np.asarray(ref, dtype=float)
    y = np.asarray(test, dtype=float)
    if x.shape != y.shape:
        raise DimensionError(f"image dimensions differ: {x.shape} vs {y.shape}")
    if min(x.shape) < _SSIM_WINDOW:
        raise ValueError(
            f"images must be at least {_SSIM_WINDOW}x{_SSIM_WINDOW}, got {x.shape}"
        )
    w = _gaussian_window(_SSIM_WINDOW, _SSIM_SIGMA)
    c1 = (_SSIM_K1 * _DYNAMIC_RANGE) ** 2
    c2 = (_SSIM_K2 * _DYNAMIC_RANGE) ** 2

    mu_x = fftconvolve(x, w, mode="valid")
    mu_y = fftconvolve(y, w, mode="valid")
    var_x = fftconvolve(x * x, w, mode="valid") - mu_x * mu_x
    var_y = fftconvolve(y * y, w, mode="valid") - mu_y * mu_y
    cov = fftconvolve(x * y, w, mode="valid") - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def _mi_pair(x, y):
    joint, _, _ = np.histogram2d(
        x.ravel(), y.ravel(), bins=256, range=[[0, 256], [0, 256]]
    )
    p = joint / joint.sum()
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    outer = px[:, None] * py[None, :]
    nz = p > 0
    return float(np.sum(p[nz] * np.log2(p[nz] / outer[nz])))


def mutual_information(a, b, f):
    """Total mutual information I(F;A) + I(F;B), in bits.

    Histograms use 256 bins over 8-bit-quantized intensities, so for
    f = a = b the result equals twice the image entropy.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.asarray(f, dtype=float)
    if a.shape != b.shape or a.shape != f.shape:
        raise DimensionError(
            f"image dimensions differ: {a.shape}, {b.shape}, {f.shape}"
        )
    qa, qb, qf = quantize_u8(a), quantize_u8(b), quantize_u8(f)
    return _mi_pair(qf, qa) + _mi_pair(qf, qb)


def _edge_fields(img):
    sx = ndimage.correlate(img, _SOBEL_X, mode="reflect")
    sy = ndimage.correlate(img, _SOBEL_Y, mode="reflect")
    strength = np.hypot(sx, sy)
    # Orientation modulo pi; guard the vertical-edge division.
    safe = np.where(sx == 0.0, 1e-12, sx)
    angle = np.arctan(sy / safe)
    return strength, angle


def _sigmoid(x, gamma, kappa, sigma):
    return gamma / (1.0 + np.exp(kappa * (x - sigma)))


def _preservation(gs, angs, gf, angf):
    hi = np.maximum(gs, gf)
    lo = np.minimum(gs, gf)
    ratio = np.divide(lo, hi, out=np.zeros_like(hi), where=hi > 0)
    angle_sim = 1.0 - np.abs(angs - angf) * (2.0 / np.pi)
    qg = _sigmoid(ratio, _GAMMA_G, _KAPPA_G, _SIGMA_G) / _sigmoid(
        1.0, _GAMMA_G, _KAPPA_G, _SIGMA_G
    )
    qa = _sigmoid(angle_sim, _GAMMA_A, _KAPPA_A, _SIGMA_A) / _sigmoid(
        1.0, _GAMMA_A, _KAPPA_A, _SIGMA_A
    )
    return qg * qa


def petrovic_qabf(a, b, f):
    """Edge-preservation score of the fused image against both sources.

    Per-pixel Sobel edge strength and orientation feed two sigmoid
    preservation factors whose product is averaged with edge-strength
    weights. Scores lie in [0, 1]; a fused image identical to both sources
    scores 1, and all-constant inputs score 0 by convention (no edges to
    preserve).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    f = np.asarray(f, dtype=float)
    if a.shape != b.shape or a.shape != f.shape:
        raise DimensionError(
            f"image dimensions differ: {a.shape}, {b.shape}, {f.shape}"
        )
    ga, aa = _edge_fields(a)
    gb, ab = _edge_fields(b)
    gf, af = _edge_fields(f)

    q_af = _preservation(ga, aa, gf, af)
    q_bf = _preservation(gb, ab, gf, af)

    weight_total = np.sum(ga + gb)
    if weight_total == 0.0:
        return 0.0
    return float(np.sum(q_af * ga + q_bf * gb) / weight_total)
