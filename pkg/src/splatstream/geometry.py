"""Rotations, rigid/similarity transforms and the pinhole camera.

Conventions used everywhere in the package:
  * double precision for all geometry,
  * quaternions are wxyz and unit-norm,
  * camera looks down +z, x right, y down; pixel (u, v) = c + f*(x/z, y/z),
  * pixel centers sit at integer coordinates, principal point at
    ((W-1)/2, (H-1)/2),
  * PoseSE3 / Sim3 values held by CameraModel are camera-to-world maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Chained compositions tolerated before the rotation is re-orthonormalized
# via polar decomposition (bounds drift over long streams).
REORTHONORMALIZE_EVERY = 64


def _freeze(a, shape, dtype=np.float64):
    out = np.ascontiguousarray(np.asarray(a, dtype=dtype))
    if out.shape != shape:
        raise ValueError(f"expected shape {shape}, got {out.shape}")
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# rotations
# ---------------------------------------------------------------------------

def polar_orthonormalize(m):
    """Nearest rotation matrix (Frobenius) to ``m`` via SVD polar factor."""
    u, _, vt = np.linalg.svd(np.asarray(m, dtype=np.float64))
    r = u @ vt
    if np.linalg.det(r) < 0.0:
        u = u.copy()
        u[:, -1] = -u[:, -1]
        r = u @ vt
    return r


def is_rotation(r, tol=1e-9):
    r = np.asarray(r)
    return (
        r.shape == (3, 3)
        and np.allclose(r.T @ r, np.eye(3), atol=tol)
        and abs(np.linalg.det(r) - 1.0) <= tol
    )


def rotation_about(axis, angle_rad):
    """Rodrigues rotation about ``axis`` (need not be unit) by ``angle_rad``."""
    axis = np.asarray(axis, dtype=np.float64)
    n = np.linalg.norm(axis)
    if n == 0.0:
        raise ValueError("zero rotation axis")
    k = axis / n
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + np.sin(angle_rad) * kx + (1.0 - np.cos(angle_rad)) * (kx @ kx)


def rotation_from_vector(w):
    """Rotation from an axis-angle vector (angle = |w| radians)."""
    w = np.asarray(w, dtype=np.float64)
    angle = np.linalg.norm(w)
    if angle < 1e-300:
        return np.eye(3)
    return rotation_about(w, angle)


def random_rotation(rng):
    """Uniform-ish random rotation from a normalized Gaussian quaternion."""
    q = rng.normal(size=4)
    return quat_to_mat(q / np.linalg.norm(q))


def rotation_geodesic(ra, rb):
    """Geodesic angle (radians) between two rotation matrices.

    Uses ||Ra^T Rb - I||_F = 2*sqrt(2)*|sin(theta/2)|, which stays
    well-conditioned near zero (the arccos-of-trace form has a ~sqrt(eps)
    noise floor).
    """
    d = np.asarray(ra).T @ np.asarray(rb) - np.eye(3)
    s = np.linalg.norm(d) / (2.0 * np.sqrt(2.0))
    return float(2.0 * np.arcsin(np.clip(s, 0.0, 1.0)))


def quat_normalize(q):
    q = np.asarray(q, dtype=np.float64)
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    return q / n


def quat_to_mat(q):
    """Unit quaternion (wxyz) to rotation matrix."""
    w, x, y, z = np.asarray(q, dtype=np.float64)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def mat_to_quat(r):
    """Rotation matrix to unit quaternion (wxyz), w >= 0."""
    r = np.asarray(r, dtype=np.float64)
    t = np.trace(r)
    if t > 0.0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        )
    else:
        i = int(np.argmax(np.diag(r)))
        j, k = (i + 1) % 3, (i + 2) % 3
        s = np.sqrt(max(r[i, i] - r[j, j] - r[k, k] + 1.0, 0.0)) * 2.0
        q = np.empty(4)
        q[0] = (r[k, j] - r[j, k]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (r[j, i] + r[i, j]) / s
        q[1 + k] = (r[k, i] + r[i, k]) / s
    if q[0] < 0.0:
        q = -q
    return q / np.linalg.norm(q)


def quat_geodesic(qa, qb):
    """Geodesic distance on the quaternion sphere, arccos|<qa,qb>| in [0, pi/2]."""
    d = abs(float(np.dot(np.asarray(qa, dtype=np.float64), np.asarray(qb, dtype=np.float64))))
    return float(np.arccos(np.clip(d, -1.0, 1.0)))


# ---------------------------------------------------------------------------
# SE(3) / Sim(3)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PoseSE3:
    """Rigid transform x -> R @ x + t. Immutable after construction."""

    rotation: np.ndarray
    translation: np.ndarray
    # compositions since the last re-orthonormalization; excluded from repr
    chain: int = field(default=0, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rotation", _freeze(self.rotation, (3, 3)))
        object.__setattr__(self, "translation", _freeze(self.translation, (3,)))

    @staticmethod
    def identity():
        return PoseSE3(np.eye(3), np.zeros(3))

    def compose(self, other: "PoseSE3") -> "PoseSE3":
        """self ∘ other: apply ``other`` first."""
        r = self.rotation @ other.rotation
        t = self.rotation @ other.translation + self.translation
        chain = max(self.chain, other.chain) + 1
        if chain >= REORTHONORMALIZE_EVERY:
            r = polar_orthonormalize(r)
            chain = 0
        return PoseSE3(r, t, chain)

    def inverse(self) -> "PoseSE3":
        rt = self.rotation.T
        return PoseSE3(rt, -(rt @ self.translation), self.chain)

    def apply(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        return pts @ self.rotation.T + self.translation


@dataclass(frozen=True, eq=False)
class Sim3:
    """Similarity transform x -> scale * (R @ x) + t.

    register_pointmaps solves the jointly-scaled objective
    ||s(Rx + t') - y||^2 internally and converts to this convention
    (t = s*t'); both describe the same family of maps.
    """

    scale: float
    pose: PoseSE3

    def __post_init__(self):
        if not (self.scale > 0.0 and np.isfinite(self.scale)):
            raise ValueError(f"Sim3 scale must be positive, got {self.scale}")
        object.__setattr__(self, "scale", float(self.scale))

    @staticmethod
    def identity():
        return Sim3(1.0, PoseSE3.identity())

    @staticmethod
    def from_parts(scale, rotation, translation):
        return Sim3(scale, PoseSE3(rotation, translation))

    @property
    def rotation(self):
        return self.pose.rotation

    @property
    def translation(self):
        return self.pose.translation

    def compose(self, other: "Sim3") -> "Sim3":
        """self ∘ other: apply ``other`` first."""
        r = self.rotation @ other.rotation
        t = self.scale * (self.rotation @ other.translation) + self.translation
        return Sim3.from_parts(self.scale * other.scale, r, t)

    def inverse(self) -> "Sim3":
        rt = self.rotation.T
        inv_s = 1.0 / self.scale
        return Sim3.from_parts(inv_s, rt, -inv_s * (rt @ self.translation))

    def apply(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        return self.scale * (pts @ self.rotation.T) + self.translation

    def se3(self) -> PoseSE3:
        """Rigid part (R, t); for a camera-to-world map this keeps the camera
        center and orientation, and pinhole projection is invariant to the
        dropped uniform scale."""
        return PoseSE3(self.rotation, self.translation)


# ---------------------------------------------------------------------------
# camera
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Intrinsics:
    """Pinhole camera with square pixels and centered principal point."""

    focal: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.focal > 0.0 and np.isfinite(self.focal)):
            raise ValueError(f"focal must be positive, got {self.focal}")
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        object.__setattr__(self, "focal", float(self.focal))

    @property
    def principal_point(self):
        return ((self.width - 1) * 0.5, (self.height - 1) * 0.5)


@dataclass(frozen=True, eq=False)
class CameraModel:
    """Intrinsics plus camera-to-world pose."""

    intrinsics: Intrinsics
    pose: PoseSE3


def project(intr: Intrinsics, pose: PoseSE3, pts):
    """World points -> pixel coordinates.

    Returns (pixels, in_front); pixels are valid only where in_front is
    True (camera-frame z > 0).
    """
    pts = np.asarray(pts, dtype=np.float64)
    single = pts.ndim == 1
    cam = pose.inverse().apply(pts.reshape(-1, 3))
    z = cam[:, 2]
    in_front = z > 0.0
    zsafe = np.where(in_front, z, 1.0)
    cx, cy = intr.principal_point
    pix = np.stack(
        [cx + intr.focal * cam[:, 0] / zsafe, cy + intr.focal * cam[:, 1] / zsafe], axis=-1
    )
    if single:
        return pix[0], bool(in_front[0])
    return pix, in_front


def unproject(intr: Intrinsics, pose: PoseSE3, pixels, depth):
    """Pixels + positive z-depths -> world points (inverse of project)."""
    pixels = np.asarray(pixels, dtype=np.float64)
    depth = np.asarray(depth, dtype=np.float64)
    single = pixels.ndim == 1
    pixels = pixels.reshape(-1, 2)
    depth = np.atleast_1d(depth).astype(np.float64)
    if np.any(depth <= 0.0):
        raise ValueError("unproject requires depth > 0")
    cx, cy = intr.principal_point
    cam = np.stack(
        [(pixels[:, 0] - cx) / intr.focal * depth, (pixels[:, 1] - cy) / intr.focal * depth, depth],
        axis=-1,
    )
    out = pose.apply(cam)
    return out[0] if single else out


def depth_grid_to_camera_points(intr: Intrinsics, depth):
    """Unproject a full H x W z-depth grid into camera coordinates.

    Zero/negative depths yield the zero point (background convention).
    """
    depth = np.asarray(depth, dtype=np.float64)
    h, w = depth.shape
    cx, cy = intr.principal_point
    u = np.arange(w, dtype=np.float64)[None, :].repeat(h, axis=0)
    v = np.arange(h, dtype=np.float64)[:, None].repeat(w, axis=1)
    valid = depth > 0.0
    z = np.where(valid, depth, 0.0)
    pts = np.stack([(u - cx) / intr.focal * z, (v - cy) / intr.focal * z, z], axis=-1)
    return pts, valid
