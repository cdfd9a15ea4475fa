"""Binary PPM (P6, 8-bit) image I/O for goldens and CLI output."""

from __future__ import annotations

import numpy as np

from .errors import FormatError


def write_ppm(path, image):
    """Write an (H, W, 3) float image in [0, 1] as 8-bit P6."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got {image.shape}")
    h, w = image.shape[:2]
    data = np.floor(np.clip(image, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(data.tobytes())


def read_ppm(path):
    """Read a P6 PPM into an (H, W, 3) float64 image in [0, 1]."""
    with open(path, "rb") as f:
        raw = f.read()
    if not raw.startswith(b"P6"):
        raise FormatError(f"{path}: not a P6 PPM")
    # header = magic, width, height, maxval as whitespace-separated tokens,
    # with '#' comments allowed
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PPM header")
        tokens.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError as e:
        raise FormatError(f"{path}: bad PPM header") from e
    if maxval != 255:
        raise FormatError(f"{path}: only maxval 255 supported, got {maxval}")
    expected = w * h * 3
    payload = raw[pos : pos + expected]
    if len(payload) != expected:
        raise FormatError(f"{path}: truncated PPM payload")
    img = np.frombuffer(payload, dtype=np.uint8).reshape(h, w, 3)
    return img.astype(np.float64) / 255.0
