"""Per-pixel 3D point grids with confidences, and their binary format.

PMAP layout (little-endian): magic "PMAP", u32 version=1, u32 H, u32 W,
i32 frame_id, i32 ref_frame_id, then H*W*3 float32 points (row-major),
then H*W float32 confidences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

MAGIC = b"PMAP"
VERSION = 1
CONFIDENCE_FLOOR = 1.0


@dataclass(frozen=True, eq=False)
class PointMap:
    """Points of frame ``frame_id`` expressed in frame ``ref_frame_id``'s camera.

    Confidence has floor 1.0; points with confidence > 1 must be finite
    (background pixels carry confidence exactly 1.0 and zero points).
    """

    frame_id: int
    ref_frame_id: int
    points: np.ndarray      # (H, W, 3) float64
    confidence: np.ndarray  # (H, W) float64, >= 1

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        conf = np.ascontiguousarray(np.asarray(self.confidence, dtype=np.float64))
        if pts.ndim != 3 or pts.shape[2] != 3:
            raise ValueError(f"points must be (H, W, 3), got {pts.shape}")
        if conf.shape != pts.shape[:2]:
            raise ValueError(f"confidence shape {conf.shape} != grid {pts.shape[:2]}")
        if np.any(conf < CONFIDENCE_FLOOR - 1e-12):
            raise ValueError("confidence below floor 1.0")
        trusted = conf > CONFIDENCE_FLOOR
        if not np.all(np.isfinite(pts[trusted])):
            raise ValueError("non-finite point with confidence > 1")
        pts.flags.writeable = False
        conf.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "confidence", conf)

    @property
    def shape(self):
        return self.confidence.shape

    def flat_points(self):
        return self.points.reshape(-1, 3)

    def flat_confidence(self):
        return self.confidence.reshape(-1)

    def with_points(self, points) -> "PointMap":
        return PointMap(self.frame_id, self.ref_frame_id, points, self.confidence)


def write_pointmap(path, pm: PointMap):
    h, w = pm.shape
    header = MAGIC + struct.pack("<IIIii", VERSION, h, w, pm.frame_id, pm.ref_frame_id)
    with open(path, "wb") as f:
        f.write(header)
        f.write(pm.points.astype("<f4").tobytes())
        f.write(pm.confidence.astype("<f4").tobytes())


def read_pointmap(path) -> PointMap:
    with open(path, "rb") as f:
        head = f.read(24)
        if len(head) != 24 or head[:4] != MAGIC:
            raise FormatError(f"{path}: not a PMAP file")
        version, h, w, frame_id, ref_frame_id = struct.unpack("<IIIii", head[4:])
        if version != VERSION:
            raise FormatError(f"{path}: unsupported PMAP version {version}")
        n = h * w
        raw = f.read(n * 3 * 4 + n * 4)
        if len(raw) != n * 16:
            raise FormatError(f"{path}: truncated PMAP payload")
    pts = np.frombuffer(raw[: n * 12], dtype="<f4").reshape(h, w, 3).astype(np.float64)
    conf = np.frombuffer(raw[n * 12:], dtype="<f4").reshape(h, w).astype(np.float64)
    # float32 round-trip can dip a hair under the floor
    conf = np.maximum(conf, CONFIDENCE_FLOOR)
    return PointMap(frame_id, ref_frame_id, pts, conf)
