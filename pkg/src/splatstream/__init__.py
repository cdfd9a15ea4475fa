"""Streaming pose-free Gaussian-splat reconstruction."""

from .geometry import CameraModel, Intrinsics, PoseSE3, Sim3, project, unproject
from .pointmap import PointMap, read_pointmap, write_pointmap

__all__ = [
    "CameraModel",
    "Intrinsics",
    "PoseSE3",
    "Sim3",
    "project",
    "unproject",
    "PointMap",
    "read_pointmap",
    "write_pointmap",
]

__version__ = "0.1.0"
