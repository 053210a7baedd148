"""Binary PGM (P5, maxval 255) reading and writing.

Pixels stay float64 inside the pipeline; quantization to 8 bits happens only
here, on write (round half up, clamp to [0, 255]). Reads reject anything
that is not an 8-bit binary PGM with block-aligned dimensions, each failure
with its own exception type so callers can map them to distinct exit codes.
"""

from pathlib import Path

import numpy as np

from .blocks import check_block_aligned


class PgmError(Exception):
    """Base class for PGM container problems."""


class PgmMagicError(PgmError):
    """File is not a binary P5 PGM."""


class PgmHeaderError(PgmError):
    """Header fields are missing or malformed."""


class PgmMaxvalError(PgmError):
    """Maxval is not 255."""


class PgmDataError(PgmError):
    """Pixel data is truncated."""


_WS = frozenset(b" \t\r\n\x0b\x0c")


def quantize_u8(img):
    """Round half up and clamp to [0, 255]; returns integral-valued floats."""
    return np.clip(np.floor(np.asarray(img, dtype=float) + 0.5), 0.0, 255.0)


def _tokens(data):
    pos = 0
    end = len(data)
    while True:
        while pos < end:
            ch = data[pos]
            if ch in _WS:
                pos += 1
            elif ch == ord("#"):
                while pos < end and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < end and data[pos] not in _WS:
            pos += 1
        if start == pos:
            yield None, pos
            return
        yield data[start:pos], pos


def read_image(path):
    """Read a binary PGM into a float64 image array."""
    path = Path(path)
    data = path.read_bytes()
    scanner = _tokens(data)

    magic, _ = next(scanner)
    if magic is None:
        raise PgmHeaderError(f"{path}: empty file")
    if magic != b"P5":
        kind = "ASCII PGM (P2)" if magic == b"P2" else f"magic {magic!r}"
        raise PgmMagicError(f"{path}: unsupported format, {kind}; need binary P5")

    fields = []
    pos = 0
    for name in ("width", "height", "maxval"):
        token, pos = next(scanner)
        if token is None:
            raise PgmHeaderError(f"{path}: truncated header, missing {name}")
        try:
            value = int(token)
        except ValueError:
            raise PgmHeaderError(f"{path}: malformed {name} field {token!r}") from None
        if value <= 0:
            raise PgmHeaderError(f"{path}: {name} must be positive, got {value}")
        fields.append(value)
    width, height, maxval = fields

    if maxval != 255:
        raise PgmMaxvalError(f"{path}: maxval {maxval} unsupported; need 255")

    # Exactly one whitespace byte separates the header from the raster.
    if pos >= len(data) or data[pos] not in _WS:
        raise PgmHeaderError(f"{path}: missing whitespace before pixel data")
    pos += 1

    raster = data[pos : pos + width * height]
    if len(raster) < width * height:
        raise PgmDataError(
            f"{path}: expected {width * height} pixel bytes, got {len(raster)}"
        )

    img = np.frombuffer(raster, dtype=np.uint8).reshape(height, width).astype(float)
    check_block_aligned(img, name=str(path))
    return img


def write_image(img, path):
    """Quantize to 8 bits and write as binary PGM."""
    arr = np.asarray(img, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {arr.shape}")
    h, w = arr.shape
    q = quantize_u8(arr).astype(np.uint8)
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + q.tobytes())
