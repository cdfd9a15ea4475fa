"""Synthetic stand-in for the pretrained coarse predictor and matching head.

Generates deterministic surfel scenes, smooth camera trajectories, exact
ground-truth renders (images + z-depth), pair point-map predictions with
controllable corruption, per-pixel descriptors, and the exact covisibility
oracle used to score matching.

Every operation is a pure function of (seed, config, inputs).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .geometry import (
    CameraModel,
    Intrinsics,
    PoseSE3,
    Sim3,
    depth_grid_to_camera_points,
    mat_to_quat,
    project,
    quat_to_mat,
    rotation_about,
    rotation_from_vector,
)
from .pointmap import PointMap

CONFIDENCE_EPS = 1e-3

# per-purpose salts for independent deterministic RNG streams
_SALT_EMBED = 101
_SALT_BIAS = 211
_SALT_NOISE_SELF = 307
_SALT_NOISE_CROSS = 311
_SALT_DESC_NOISE = 401
_SALT_DESC_BG = 409
_SALT_DESC_OUTLIER = 419


# ---------------------------------------------------------------------------
# configuration / domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SceneConfig:
    kind: str = "heightfield"   # heightfield | box
    surfel_count: int = 1600
    extent: float = 2.0         # half-size of the sheet / box in x and y
    base_depth: float = 2.5     # z of the sheet (scene units, camera-0 frame)
    bump_amplitude: float = 0.25
    albedo_waves: int = 3
    radius_factor: float = 0.9  # disk radius as a fraction of grid spacing
    backdrop: bool = True


@dataclass(frozen=True)
class TrajectoryConfig:
    frames: int = 8
    max_rot_deg: float = 1.5        # per-frame rotation bound
    max_trans: float = 0.04         # per-frame translation bound
    smooth_rot_deg: float = 0.5     # second-difference bound, rotation
    smooth_trans: float = 0.015     # second-difference bound, translation


@dataclass(frozen=True)
class CorruptionConfig:
    point_noise: float = 0.0          # per-axis noise std as fraction of depth
    bias_rot_deg: float = 0.0         # systematic bias on cross-frame maps
    bias_trans: float = 0.0
    confidence_fidelity: float = 1.0  # 1 = confidence tracks true noise
    descriptor_noise: float = 0.0
    outlier_fraction: float = 0.0

    def __post_init__(self):
        if self.point_noise < 0 or self.descriptor_noise < 0:
            raise ValueError("noise levels must be >= 0")
        if not 0.0 <= self.outlier_fraction < 1.0:
            raise ValueError("outlier fraction must be in [0, 1)")


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    seed: int
    kind: str
    positions: np.ndarray  # (S, 3)
    normals: np.ndarray    # (S, 3), unit
    albedos: np.ndarray    # (S, 3) in [0, 1]
    radii: np.ndarray      # (S,)
    bounds: np.ndarray     # (2, 3) min/max corners

    def __post_init__(self):
        for name in ("positions", "normals", "albedos", "radii", "bounds"):
            arr = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.float64))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def surfel_count(self):
        return self.positions.shape[0]

    @property
    def diagonal(self):
        return float(np.linalg.norm(self.bounds[1] - self.bounds[0]))


@dataclass(frozen=True, eq=False)
class DescriptorMap:
    frame_id: int
    features: np.ndarray  # (H, W, d), unit rows

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        norms = np.linalg.norm(feats, axis=-1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("descriptors must be unit-normalized")
        feats.flags.writeable = False
        object.__setattr__(self, "features", feats)

    @property
    def shape(self):
        return self.features.shape[:2]

    @property
    def dim(self):
        return self.features.shape[2]

    def flat(self):
        return self.features.reshape(-1, self.features.shape[2])


@dataclass(frozen=True, eq=False)
class Frame:
    frame_id: int
    camera: CameraModel
    image: np.ndarray         # (H, W, 3) in [0, 1]
    depth: np.ndarray         # (H, W) z-depth, 0 = background
    surfel_index: np.ndarray  # (H, W) int64, -1 = background

    @property
    def shape(self):
        return self.depth.shape


# ---------------------------------------------------------------------------
# scene generation
# ---------------------------------------------------------------------------

def scene_from_surfels(seed, positions, normals, albedos, radii) -> SyntheticScene:
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    normals = normals / np.linalg.norm(normals, axis=1, keepdims=True)
    albedos = np.asarray(albedos, dtype=np.float64).reshape(-1, 3)
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    bounds = np.stack([positions.min(axis=0), positions.max(axis=0)])
    return SyntheticScene(seed, "explicit", positions, normals, albedos, radii, bounds)


def _smooth_field(rng, waves, extent):
    """Random low-frequency scalar field over (x, y); returns a closure."""
    k = rng.uniform(0.4, 1.6, size=(waves, 2)) * np.pi / extent
    phase = rng.uniform(0.0, 2 * np.pi, size=waves)
    amp = rng.uniform(0.4, 1.0, size=waves)
    amp = amp / amp.sum()

    def f(x, y):
        out = np.zeros_like(x)
        for i in range(waves):
            out = out + amp[i] * np.sin(k[i, 0] * x + k[i, 1] * y + phase[i])
        return out

    return f


def generate_scene(seed, config: SceneConfig) -> SyntheticScene:
    """Deterministic surfel scene; same (seed, config) -> bitwise-same scene."""
    if config.surfel_count < 1:
        raise ValueError("surfel count must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 17]))
    ext, z0 = config.extent, config.base_depth

    if config.kind == "box":
        pos = np.stack(
            [
                rng.uniform(-ext, ext, config.surfel_count),
                rng.uniform(-ext, ext, config.surfel_count),
                rng.uniform(z0 - ext, z0 + ext, config.surfel_count),
            ],
            axis=-1,
        )
        nrm = rng.normal(size=(config.surfel_count, 3))
        nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
        alb = rng.uniform(0.05, 0.95, size=(config.surfel_count, 3))
        rad = rng.uniform(0.02, 0.08, config.surfel_count) * ext
        bounds = np.array([[-ext, -ext, z0 - ext], [ext, ext, z0 + ext]])
        return SyntheticScene(seed, "box", pos, nrm, alb, rad, bounds)

    if config.kind != "heightfield":
        raise ValueError(f"unknown scene kind {config.kind!r}")

    n = max(2, int(np.ceil(np.sqrt(config.surfel_count))))
    xs = np.linspace(-ext, ext, n)
    gx, gy = np.meshgrid(xs, xs)
    height = _smooth_field(rng, max(1, config.albedo_waves), ext)
    hz = z0 + config.bump_amplitude * height(gx, gy)
    pos = np.stack([gx.reshape(-1), gy.reshape(-1), hz.reshape(-1)], axis=-1)

    # normals from the analytic-ish gradient (central differences), facing -z
    eps = 1e-4 * ext
    dzdx = (height(gx + eps, gy) - height(gx - eps, gy)) * config.bump_amplitude / (2 * eps)
    dzdy = (height(gx, gy + eps) - height(gx, gy - eps)) * config.bump_amplitude / (2 * eps)
    nrm = np.stack([dzdx.reshape(-1), dzdy.reshape(-1), -np.ones(n * n)], axis=-1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)

    alb = np.empty((n * n, 3))
    for c in range(3):
        f = _smooth_field(rng, max(1, config.albedo_waves), ext)
        alb[:, c] = 0.5 + 0.45 * f(pos[:, 0], pos[:, 1])
    alb = np.clip(alb, 0.02, 0.98)

    spacing = xs[1] - xs[0]
    rad = np.full(n * n, config.radius_factor * spacing)

    if config.backdrop:
        rng_bd = np.random.default_rng(np.random.SeedSequence([seed, 23]))
        pos = np.vstack([pos, [0.0, 0.0, z0 * 3.0 + config.bump_amplitude * 4.0]])
        nrm = np.vstack([nrm, [0.0, 0.0, -1.0]])
        alb = np.vstack([alb, rng_bd.uniform(0.2, 0.8, size=3)])
        rad = np.append(rad, 60.0 * ext)

    bounds = np.stack([pos.min(axis=0), pos.max(axis=0)])
    return SyntheticScene(seed, "heightfield", pos, nrm, alb, rad, bounds)


# ---------------------------------------------------------------------------
# ground-truth rendering
# ---------------------------------------------------------------------------

@njit(cache=True)
def _raycast_kernel(cent, nrm, rad, alb, f, cx, cy, h, w):  # pragma: no cover
    image = np.zeros((h, w, 3))
    best_t = np.full((h, w), np.inf)
    best_d2 = np.full((h, w), np.inf)
    index = np.full((h, w), -1, np.int64)
    n_surf = cent.shape[0]
    for s in range(n_surf):
        czs = cent[s, 2]
        r = rad[s]
        if czs - r <= 1e-9:
            x0, x1, y0, y1 = 0, w, 0, h
        else:
            u0 = cx + f * cent[s, 0] / czs
            v0 = cy + f * cent[s, 1] / czs
            ru = f * r * (czs + abs(cent[s, 0])) / ((czs - r) * czs)
            rv = f * r * (czs + abs(cent[s, 1])) / ((czs - r) * czs)
            x0 = max(0, int(np.floor(u0 - ru)))
            x1 = min(w, int(np.ceil(u0 + ru)) + 1)
            y0 = max(0, int(np.floor(v0 - rv)))
            y1 = min(h, int(np.ceil(v0 + rv)) + 1)
        if x0 >= x1 or y0 >= y1:
            continue
        nx, ny, nz = nrm[s, 0], nrm[s, 1], nrm[s, 2]
        cn = nx * cent[s, 0] + ny * cent[s, 1] + nz * czs
        for py in range(y0, y1):
            dy = (py - cy) / f
            for px in range(x0, x1):
                dx = (px - cx) / f
                denom = nx * dx + ny * dy + nz
                if abs(denom) < 1e-12:
                    continue
                t = cn / denom
                if t <= 1e-9:
                    continue
                hx = t * dx - cent[s, 0]
                hy = t * dy - cent[s, 1]
                hz = t - czs
                d2 = hx * hx + hy * hy + hz * hz
                if d2 > r * r:
                    continue
                bt = best_t[py, px]
                tie = 1e-9 * (1.0 + abs(t))
                take = False
                if t < bt - tie:
                    take = True
                elif t < bt + tie and d2 < best_d2[py, px]:
                    take = True
                if take:
                    if t < bt:
                        best_t[py, px] = t
                    best_d2[py, px] = d2
                    index[py, px] = s
                    image[py, px, 0] = alb[s, 0]
                    image[py, px, 1] = alb[s, 1]
                    image[py, px, 2] = alb[s, 2]
    depth = np.where(index >= 0, best_t, 0.0)
    return image, depth, index


def render_buffers(scene: SyntheticScene, camera: CameraModel):
    """Render (image, z-depth, surfel index) from a camera.

    Nearest hit wins per pixel; depth ties resolved by distance to the surfel
    center then by lower surfel index (scan order is fixed, so the result is
    deterministic).
    """
    intr, pose = camera.intrinsics, camera.pose
    inv = pose.inverse()
    cent = inv.apply(scene.positions)
    nrm = scene.normals @ pose.rotation  # R^T n, row-vector form
    cx, cy = intr.principal_point
    image, depth, index = _raycast_kernel(
        np.ascontiguousarray(cent),
        np.ascontiguousarray(nrm),
        np.ascontiguousarray(scene.radii),
        np.ascontiguousarray(scene.albedos),
        intr.focal,
        cx,
        cy,
        intr.height,
        intr.width,
    )
    return image, depth, index


def render_ground_truth(scene: SyntheticScene, camera: CameraModel):
    image, depth, _ = render_buffers(scene, camera)
    return image, depth


def make_frame(scene: SyntheticScene, frame_id: int, camera: CameraModel) -> Frame:
    image, depth, index = render_buffers(scene, camera)
    return Frame(frame_id, camera, image, depth, index)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def _clip_norm(v, bound):
    n = np.linalg.norm(v)
    if n > bound and n > 0:
        return v * (bound / n)
    return v


def generate_trajectory(seed, config: TrajectoryConfig, start: PoseSE3 | None = None):
    """Smooth camera path: per-frame deltas follow a bounded random walk, so
    consecutive deltas differ by at most the smoothness bounds and never
    exceed the per-frame maxima."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 29]))
    poses = [start if start is not None else PoseSE3.identity()]
    w = _clip_norm(rng.normal(size=3), 1.0) * config.max_rot_deg * 0.5
    v = _clip_norm(rng.normal(size=3), 1.0) * config.max_trans * 0.5
    for _ in range(1, config.frames):
        w = _clip_norm(w + _clip_norm(rng.normal(size=3), 1.0) * config.smooth_rot_deg,
                       config.max_rot_deg)
        v = _clip_norm(v + _clip_norm(rng.normal(size=3), 1.0) * config.smooth_trans,
                       config.max_trans)
        delta = PoseSE3(rotation_from_vector(np.deg2rad(w)), v)
        poses.append(poses[-1].compose(delta))
    return poses


# ---------------------------------------------------------------------------
# predictor stand-ins
# ---------------------------------------------------------------------------

def _pair_rng(seed, a, b, salt):
    return np.random.default_rng(np.random.SeedSequence([seed, a, b, salt]))


def pair_bias(seed, a, b, corruption: CorruptionConfig) -> Sim3:
    """The systematic Sim3 error injected into the cross map of pair (a, b)."""
    if corruption.bias_rot_deg == 0.0 and corruption.bias_trans == 0.0:
        return Sim3.identity()
    rng = _pair_rng(seed, a, b, _SALT_BIAS)
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    rot = rotation_about(axis, np.deg2rad(corruption.bias_rot_deg))
    return Sim3.from_parts(1.0, rot, corruption.bias_trans * direction)


def _corrupt_points(pts, depth, valid, corruption, rng):
    """Add per-axis noise of std sigma_eff * depth; returns (pts, conf)."""
    conf = np.ones(depth.shape)
    if corruption.point_noise > 0.0:
        mult = rng.uniform(0.5, 1.5, size=depth.shape)
        sigma_eff = corruption.point_noise * mult
        noise = rng.normal(size=pts.shape) * (sigma_eff * depth)[..., None]
        pts = np.where(valid[..., None], pts + noise, pts)
        mean_sigma = float(sigma_eff[valid].mean()) if np.any(valid) else 0.0
        reported = (
            corruption.confidence_fidelity * sigma_eff
            + (1.0 - corruption.confidence_fidelity) * mean_sigma
        )
    else:
        reported = np.zeros(depth.shape)
    conf = np.where(valid, 1.0 + 1.0 / (reported + CONFIDENCE_EPS), 1.0)
    return pts, conf


def predict_pointmaps(frame_a: Frame, frame_b: Frame, corruption: CorruptionConfig, seed=0):
    """Stand-in pair prediction: (points of a in a, points of b in a), with
    confidences. The systematic bias is applied to the cross map only, so the
    self map stays a clean refinement anchor."""
    intr_a = frame_a.camera.intrinsics
    intr_b = frame_b.camera.intrinsics
    a, b = frame_a.frame_id, frame_b.frame_id

    pts_aa, valid_a = depth_grid_to_camera_points(intr_a, frame_a.depth)
    pts_aa, conf_aa = _corrupt_points(
        pts_aa, frame_a.depth, valid_a, corruption, _pair_rng(seed, a, b, _SALT_NOISE_SELF)
    )
    pts_aa = np.where(valid_a[..., None], pts_aa, 0.0)

    pts_bb, valid_b = depth_grid_to_camera_points(intr_b, frame_b.depth)
    rel = frame_a.camera.pose.inverse().compose(frame_b.camera.pose)
    shape = pts_bb.shape
    pts_ba = rel.apply(pts_bb.reshape(-1, 3)).reshape(shape)
    if corruption.bias_rot_deg != 0.0 or corruption.bias_trans != 0.0:
        bias = pair_bias(seed, a, b, corruption)
        pts_ba = bias.apply(pts_ba.reshape(-1, 3)).reshape(shape)
    pts_ba, conf_ba = _corrupt_points(
        pts_ba, frame_b.depth, valid_b, corruption, _pair_rng(seed, a, b, _SALT_NOISE_CROSS)
    )
    pts_ba = np.where(valid_b[..., None], pts_ba, 0.0)

    return PointMap(a, a, pts_aa, conf_aa), PointMap(b, a, pts_ba, conf_ba)


def _embedding_matrix(seed, dim):
    if dim < 10:
        raise ValueError("descriptor dim must be >= 10")
    rng = np.random.default_rng(np.random.SeedSequence([seed, _SALT_EMBED]))
    q, _ = np.linalg.qr(rng.normal(size=(dim, 10)))
    return q  # (dim, 10), orthonormal columns


# attribute weights inside the descriptor embedding: position dominates so
# mutual-NN matching is driven by geometry; albedo is deliberately faint
_ATTR_WEIGHTS = (1.0, 0.5, 0.25, 0.5)


def predict_descriptors(
    scene: SyntheticScene, frame: Frame, corruption: CorruptionConfig, dim=24, seed=0
) -> DescriptorMap:
    """Per-pixel descriptor of the surfel seen at that pixel: a fixed random
    orthogonal embedding of (center, normal, albedo, 1), unit-normalized.
    All pixels on one surfel share one descriptor, so with zero corruption
    mutual nearest neighbors recover the surfel-level covisibility exactly.
    """
    h, w = frame.shape
    emb = _embedding_matrix(seed, dim)
    idx = frame.surfel_index.reshape(-1)
    valid = idx >= 0

    wp, wn, wa, wh = _ATTR_WEIGHTS
    attrs = np.empty((h * w, 10))
    safe = np.where(valid, idx, 0)
    attrs[:, 0:3] = scene.positions[safe] * wp
    attrs[:, 3:6] = scene.normals[safe] * wn
    attrs[:, 6:9] = scene.albedos[safe] * wa
    attrs[:, 9] = wh
    feats = attrs @ emb.T

    if np.any(~valid):
        rng_bg = _pair_rng(seed, frame.frame_id, 0, _SALT_DESC_BG)
        feats[~valid] = rng_bg.normal(size=(int((~valid).sum()), dim))

    if corruption.descriptor_noise > 0.0:
        rng_n = _pair_rng(seed, frame.frame_id, 0, _SALT_DESC_NOISE)
        feats = feats + rng_n.normal(size=feats.shape) * corruption.descriptor_noise

    if corruption.outlier_fraction > 0.0:
        rng_o = _pair_rng(seed, frame.frame_id, 0, _SALT_DESC_OUTLIER)
        out = rng_o.random(h * w) < corruption.outlier_fraction
        feats[out] = rng_o.normal(size=(int(out.sum()), dim))

    feats /= np.linalg.norm(feats, axis=1, keepdims=True)
    return DescriptorMap(frame.frame_id, feats.reshape(h, w, dim))


def _visible_pixels(scene: SyntheticScene, frame: Frame):
    """Linear pixel index of each surfel's projected center where that surfel
    is the rendered nearest hit; -1 where invisible."""
    intr = frame.camera.intrinsics
    pix, in_front = project(intr, frame.camera.pose, scene.positions)
    u = np.floor(pix[:, 0] + 0.5).astype(np.int64)
    v = np.floor(pix[:, 1] + 0.5).astype(np.int64)
    ok = in_front & (u >= 0) & (u < intr.width) & (v >= 0) & (v < intr.height)
    lin = np.full(scene.surfel_count, -1, dtype=np.int64)
    su = np.where(ok, u, 0)
    sv = np.where(ok, v, 0)
    hit = frame.surfel_index[sv, su] == np.arange(scene.surfel_count)
    lin[ok & hit] = (sv * intr.width + su)[ok & hit]
    return lin


def covisible_pairs(scene: SyntheticScene, frame_a: Frame, frame_b: Frame):
    """Exact ground-truth correspondences: surfels whose projected center is
    rendered (visible) in both frames. Returns (pairs (M, 2) of linear pixel
    indices, surfel ids (M,))."""
    lin_a = _visible_pixels(scene, frame_a)
    lin_b = _visible_pixels(scene, frame_b)
    both = (lin_a >= 0) & (lin_b >= 0)
    ids = np.nonzero(both)[0]
    pairs = np.stack([lin_a[both], lin_b[both]], axis=-1)
    order = np.argsort(pairs[:, 0], kind="stable")
    return pairs[order], ids[order]


# ---------------------------------------------------------------------------
# streams
# ---------------------------------------------------------------------------

class OracleStream:
    """A scene plus a camera trajectory, exposing the predictor interface the
    pipeline consumes (point maps, descriptors) and ground truth for scoring.
    Frames are rendered lazily and cached."""

    def __init__(self, scene, intrinsics, poses, corruption=None, seed=0, descriptor_dim=24):
        self.scene = scene
        self.intrinsics = intrinsics
        self.poses = list(poses)
        self.corruption = corruption if corruption is not None else CorruptionConfig()
        self.seed = seed
        self.descriptor_dim = descriptor_dim
        self._frames: dict[int, Frame] = {}
        self._descriptors: dict[int, DescriptorMap] = {}

    @property
    def n_frames(self):
        return len(self.poses)

    @property
    def shape(self):
        return (self.intrinsics.height, self.intrinsics.width)

    def camera(self, t) -> CameraModel:
        return CameraModel(self.intrinsics, self.poses[t])

    def frame(self, t) -> Frame:
        if t not in self._frames:
            self._frames[t] = make_frame(self.scene, t, self.camera(t))
        return self._frames[t]

    def image(self, t):
        return self.frame(t).image

    def predict_pointmaps(self, a, b):
        return predict_pointmaps(self.frame(a), self.frame(b), self.corruption, self.seed)

    def predict_descriptors(self, t) -> DescriptorMap:
        if t not in self._descriptors:
            self._descriptors[t] = predict_descriptors(
                self.scene, self.frame(t), self.corruption, self.descriptor_dim, self.seed
            )
        return self._descriptors[t]

    def covisible_pairs(self, a, b):
        return covisible_pairs(self.scene, self.frame(a), self.frame(b))

    def with_corruption(self, corruption) -> "OracleStream":
        return OracleStream(
            self.scene, self.intrinsics, self.poses, corruption, self.seed, self.descriptor_dim
        )

    def interpolated_camera(self, t, alpha=0.5) -> CameraModel:
        """Camera between poses t and t+1 (small-motion quaternion blend)."""
        a, b = self.poses[t], self.poses[t + 1]
        delta = a.inverse().compose(b)
        qd = mat_to_quat(delta.rotation)
        q = (1 - alpha) * np.array([1.0, 0.0, 0.0, 0.0]) + alpha * qd
        q /= np.linalg.norm(q)
        part = PoseSE3(quat_to_mat(q), alpha * delta.translation)
        return CameraModel(self.intrinsics, a.compose(part))


def heightfield_stream(
    seed,
    n_frames=8,
    width=64,
    height=64,
    focal=80.0,
    traj: TrajectoryConfig | None = None,
    corruption: CorruptionConfig | None = None,
    scene_config: SceneConfig | None = None,
    descriptor_dim=24,
) -> OracleStream:
    """Generic smooth stream over a bumpy, fully-covering surfel sheet."""
    traj = traj if traj is not None else TrajectoryConfig(frames=n_frames)
    if traj.frames != n_frames:
        traj = replace(traj, frames=n_frames)
    scene_config = scene_config if scene_config is not None else SceneConfig()
    scene = generate_scene(seed, scene_config)
    poses = generate_trajectory(seed, traj)
    intr = Intrinsics(focal, width, height)
    return OracleStream(scene, intr, poses, corruption, seed, descriptor_dim)


def lattice_stream(
    seed,
    n_frames=4,
    width=16,
    height=16,
    focal=80.0,
    depth=2.0,
    shift_px=(1, 0),
    corruption: CorruptionConfig | None = None,
    descriptor_dim=24,
) -> OracleStream:
    """Pixel-aligned planar stream: one surfel per pixel ray of an extended
    lattice, cameras translated by exact whole-pixel footprints. Every pixel
    of every frame sees exactly one surfel at its center, so matching and
    covisibility coincide exactly."""
    kx, ky = shift_px
    intr = Intrinsics(focal, width, height)
    cx, cy = intr.principal_point
    margin = int(np.ceil(n_frames * max(abs(kx), abs(ky)))) + 1
    us = np.arange(-margin, width + margin, dtype=np.float64)
    vs = np.arange(-margin, height + margin, dtype=np.float64)
    gu, gv = np.meshgrid(us, vs)
    pos = np.stack(
        [(gu.reshape(-1) - cx) * depth / focal, (gv.reshape(-1) - cy) * depth / focal,
         np.full(gu.size, depth)],
        axis=-1,
    )
    nrm = np.tile([0.0, 0.0, -1.0], (pos.shape[0], 1))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 31]))
    fields = [_smooth_field(rng, 3, max(width, height)) for _ in range(3)]
    alb = np.stack(
        [np.clip(0.5 + 0.45 * f(gu.reshape(-1), gv.reshape(-1)), 0.02, 0.98) for f in fields],
        axis=-1,
    )
    spacing = depth / focal
    rad = np.full(pos.shape[0], 0.75 * spacing)
    scene = scene_from_surfels(seed, pos, nrm, alb, rad)

    step = np.array([kx * depth / focal, ky * depth / focal, 0.0])
    poses = [PoseSE3(np.eye(3), t * step) for t in range(n_frames)]
    return OracleStream(scene, intr, poses, corruption, seed, descriptor_dim)
