"""Geometric solvers: focal from a self point map, weighted Sim3
registration, and PnP-RANSAC pose estimation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InsufficientDataError, NoConsensusError
from .geometry import Intrinsics, PoseSE3, Sim3, polar_orthonormalize
from .pointmap import PointMap

WEISZFELD_EPS = 1e-9
MIN_FOCAL_PIXELS = 10
# pixels lighter than this are dropped from registration (numerical hygiene)
MIN_REGISTRATION_WEIGHT = 1e-6


# ---------------------------------------------------------------------------
# focal estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FocalEstimate:
    focal: float
    iterations: int
    converged: bool
    mean_residual_px: float
    used_pixels: int


def estimate_focal(pm: PointMap, max_iters=50, rtol=1e-8) -> FocalEstimate:
    """Focal length minimizing sum_i ||u_i - f * v_i|| over valid pixels,
    where u_i is the pixel offset from the principal point and
    v_i = (x_i, y_i) / z_i of the self-frame point map.

    The sum-of-distances objective is solved by Weiszfeld iteratively
    reweighted least squares: f0 from plain least squares, then
    f <- sum w_i (u_i . v_i) / sum w_i (v_i . v_i) with
    w_i = 1 / max(eps, ||u_i - f v_i||) until |df|/f < rtol.
    """
    if pm.ref_frame_id != pm.frame_id:
        raise ValueError("estimate_focal needs a self-frame point map")
    h, w = pm.shape
    cx, cy = (w - 1) * 0.5, (h - 1) * 0.5

    pts = pm.flat_points()
    z = pts[:, 2]
    valid = (z > 0.0) & np.all(np.isfinite(pts), axis=1)
    if int(valid.sum()) < MIN_FOCAL_PIXELS:
        raise InsufficientDataError(
            f"focal estimation needs >= {MIN_FOCAL_PIXELS} pixels in front, got {int(valid.sum())}"
        )

    uu, vv = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    u = np.stack([uu.reshape(-1) - cx, vv.reshape(-1) - cy], axis=-1)[valid]
    v = pts[valid, :2] / z[valid, None]

    uv = np.einsum("ij,ij->i", u, v)
    vv_dot = np.einsum("ij,ij->i", v, v)
    denom = vv_dot.sum()
    if denom <= 0.0:
        raise DegenerateGeometryError("all rays at the principal point")
    f = uv.sum() / denom

    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        r = np.linalg.norm(u - f * v, axis=1)
        wgt = 1.0 / np.maximum(r, WEISZFELD_EPS)
        f_new = float((wgt * uv).sum() / (wgt * vv_dot).sum())
        if abs(f_new - f) <= rtol * abs(f_new):
            f = f_new
            converged = True
            break
        f = f_new

    residual = float(np.mean(np.linalg.norm(u - f * v, axis=1)))
    return FocalEstimate(float(f), iterations, converged, residual, int(valid.sum()))


# ---------------------------------------------------------------------------
# weighted Sim3 registration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegistrationResult:
    transform: Sim3
    rms: float          # sqrt(sum w ||T(src) - dst||^2 / sum w)
    used_points: int


def fit_sim3(src, dst, weights=None) -> RegistrationResult:
    """Weighted closed-form similarity fit (Umeyama) of src onto dst.

    Minimizes sum_i w_i ||s (R src_i + t') - dst_i||^2 — the jointly-scaled
    parameterization — and returns the equivalent Sim3 (t = s t').
    """
    src = np.asarray(src, dtype=np.float64).reshape(-1, 3)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 3)
    if src.shape != dst.shape:
        raise ValueError("src/dst size mismatch")
    n = src.shape[0]
    if weights is None:
        weights = np.ones(n)
    weights = np.asarray(weights, dtype=np.float64).reshape(-1)
    if weights.shape[0] != n:
        raise ValueError("weights size mismatch")
    if np.any(weights < 0.0):
        raise ValueError("negative weights")
    if n < 3:
        raise InsufficientDataError(f"registration needs >= 3 points, got {n}")

    wsum = weights.sum()
    if wsum <= 0.0:
        raise DegenerateGeometryError("zero total weight")

    mu_s = (weights[:, None] * src).sum(axis=0) / wsum
    mu_d = (weights[:, None] * dst).sum(axis=0) / wsum
    sc = src - mu_s
    dc = dst - mu_d

    cov = (weights[:, None] * dc).T @ sc / wsum
    u, d, vt = np.linalg.svd(cov)
    if d[1] <= max(d[0] * 1e-9, 1e-300):
        raise DegenerateGeometryError("weighted covariance rank < 2 (collinear points)")
    sign = 1.0 if np.linalg.det(u) * np.linalg.det(vt) >= 0.0 else -1.0
    s_fix = np.array([1.0, 1.0, sign])
    rot = (u * s_fix) @ vt

    var_src = float((weights * np.einsum("ij,ij->i", sc, sc)).sum() / wsum)
    if var_src <= 0.0:
        raise DegenerateGeometryError("source points coincide")
    scale = float((d * s_fix).sum() / var_src)
    if scale <= 0.0:
        raise DegenerateGeometryError(f"non-positive fitted scale {scale}")

    # paper-form translation t' = mu_d / s - R mu_s; stored as t = s t'
    t = mu_d - scale * (rot @ mu_s)
    sim = Sim3.from_parts(scale, rot, t)
    res = sim.apply(src) - dst
    rms = float(np.sqrt((weights * np.einsum("ij,ij->i", res, res)).sum() / wsum))
    return RegistrationResult(sim, rms, n)


def registration_objective(sim: Sim3, src, dst, weights=None) -> float:
    """The weighted objective sum w ||sim(src) - dst||^2 (brute-force probes)."""
    src = np.asarray(src, dtype=np.float64).reshape(-1, 3)
    dst = np.asarray(dst, dtype=np.float64).reshape(-1, 3)
    if weights is None:
        weights = np.ones(src.shape[0])
    res = sim.apply(src) - dst
    return float((np.asarray(weights, dtype=np.float64) * np.einsum("ij,ij->i", res, res)).sum())


def register_pointmaps(src: PointMap, dst: PointMap, weights) -> RegistrationResult:
    """Register one point-map grid onto another under per-pixel weights
    (the confidence product of Eq.-style weighting is the caller's choice).
    """
    if src.shape != dst.shape:
        raise ValueError(f"grid mismatch {src.shape} vs {dst.shape}")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != src.shape:
        raise ValueError("weights grid mismatch")
    w = weights.reshape(-1)
    sp = src.flat_points()
    dp = dst.flat_points()
    keep = (
        (w >= MIN_REGISTRATION_WEIGHT)
        & np.all(np.isfinite(sp), axis=1)
        & np.all(np.isfinite(dp), axis=1)
    )
    if int(keep.sum()) < 3:
        raise InsufficientDataError(f"only {int(keep.sum())} weighted pixels")
    return fit_sim3(sp[keep], dp[keep], w[keep])


# ---------------------------------------------------------------------------
# PnP-RANSAC
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PnPConfig:
    threshold_px: float = 2.0
    max_iters: int = 256
    confidence: float = 0.999
    seed: int = 0
    gn_iters: int = 10
    min_inliers: int = 6


@dataclass(frozen=True)
class PnPResult:
    pose: PoseSE3  # camera-to-world
    inliers: np.ndarray
    iterations: int
    mean_reproj_px: float


def _pnp_dlt(xyz, xn):
    """Minimal 6-point DLT for [R|t] in normalized image coordinates."""
    n = xyz.shape[0]
    a = np.zeros((2 * n, 12))
    a[0::2, 0:3] = xyz
    a[0::2, 3] = 1.0
    a[0::2, 8:11] = -xn[:, 0:1] * xyz
    a[0::2, 11] = -xn[:, 0]
    a[1::2, 4:7] = xyz
    a[1::2, 7] = 1.0
    a[1::2, 8:11] = -xn[:, 1:2] * xyz
    a[1::2, 11] = -xn[:, 1]
    _, _, vt = np.linalg.svd(a)
    p = vt[-1].reshape(3, 4)
    m = p[:, :3]
    det = np.linalg.det(m)
    if abs(det) < 1e-12:
        return None
    lam = np.cbrt(det)
    rot = polar_orthonormalize(m / lam)
    t = p[:, 3] / lam
    return rot, t


def _reproj_residuals(rot, t, xyz, xn):
    cam = xyz @ rot.T + t
    z = cam[:, 2]
    ok = z > 1e-12
    zsafe = np.where(ok, z, 1.0)
    res = cam[:, :2] / zsafe[:, None] - xn
    err = np.linalg.norm(res, axis=1)
    err[~ok] = np.inf
    return err


def _hat(v):
    return np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])


def _gauss_newton(rot, t, xyz, xn, iters):
    """Refine [R|t] on normalized reprojection residuals; left-multiplied
    rotation increments exp(w)R."""
    for _ in range(iters):
        cam = xyz @ rot.T + t
        z = cam[:, 2]
        ok = z > 1e-9
        if not np.any(ok):
            break
        c = cam[ok]
        r = c[:, :2] / c[:, 2:3] - xn[ok]
        # d(x/z, y/z)/d cam
        zinv = 1.0 / c[:, 2]
        jproj = np.zeros((c.shape[0], 2, 3))
        jproj[:, 0, 0] = zinv
        jproj[:, 1, 1] = zinv
        jproj[:, 0, 2] = -c[:, 0] * zinv * zinv
        jproj[:, 1, 2] = -c[:, 1] * zinv * zinv
        # cam = exp(w) R x + t + dt  =>  d cam/dw = -[Rx]_x = -[cam - t]_x
        jw = np.einsum("nij,njk->nik", jproj, -np.stack([_hat(p) for p in (c - t)]))
        jt = jproj
        j = np.concatenate([jw, jt], axis=2).reshape(-1, 6)
        rhs = -(j.T @ r.reshape(-1))
        jtj = j.T @ j
        try:
            delta = np.linalg.solve(jtj + 1e-14 * np.eye(6), rhs)
        except np.linalg.LinAlgError:
            break
        w_vec, dt = delta[:3], delta[3:]
        angle = np.linalg.norm(w_vec)
        if angle > 0.0:
            from .geometry import rotation_about

            rot = rotation_about(w_vec, angle) @ rot
        t = t + dt
        if np.linalg.norm(delta) < 1e-14:
            break
    return rot, t


def pnp_ransac(points3d, pixels, intr: Intrinsics, config: PnPConfig) -> PnPResult:
    """Robust pose from 3D-2D correspondences.

    6-point DLT hypotheses scored by reprojection error, confidence-based
    early exit, Gauss-Newton polish on the best inlier set. The returned
    pose is camera-to-world (project(intr, pose, X) reproduces the pixels).
    Deterministic for a fixed config.seed.
    """
    xyz = np.asarray(points3d, dtype=np.float64).reshape(-1, 3)
    pix = np.asarray(pixels, dtype=np.float64).reshape(-1, 2)
    n = xyz.shape[0]
    if pix.shape[0] != n:
        raise ValueError("points/pixels size mismatch")
    if n < 6:
        raise InsufficientDataError(f"PnP needs >= 6 correspondences, got {n}")

    cx, cy = intr.principal_point
    xn = (pix - np.array([cx, cy])) / intr.focal
    thr = config.threshold_px / intr.focal

    rng = np.random.default_rng(config.seed)
    best_count = 0
    best_rt = None
    iterations = 0
    for iterations in range(1, config.max_iters + 1):
        sel = rng.choice(n, size=6, replace=False)
        model = _pnp_dlt(xyz[sel], xn[sel])
        if model is not None:
            err = _reproj_residuals(*model, xyz, xn)
            count = int((err <= thr).sum())
            if count > best_count:
                best_count = count
                best_rt = model
        if best_count > 0:
            ratio = best_count / n
            denom = np.log1p(-min(ratio**6, 1.0 - 1e-12))
            needed = np.log(max(1.0 - config.confidence, 1e-300)) / denom
            if iterations >= needed:
                break

    if best_rt is None or best_count < config.min_inliers:
        raise NoConsensusError(f"no pose with >= {config.min_inliers} inliers (best {best_count})")

    rot, t = best_rt
    inliers = _reproj_residuals(rot, t, xyz, xn) <= thr
    # refit/recount until the consensus set stabilizes
    for _ in range(3):
        rot, t = _gauss_newton(rot, t, xyz[inliers], xn[inliers], config.gn_iters)
        err = _reproj_residuals(rot, t, xyz, xn)
        new_inliers = err <= thr
        if np.array_equal(new_inliers, inliers):
            inliers = new_inliers
            break
        inliers = new_inliers
    if int(inliers.sum()) < config.min_inliers:
        raise NoConsensusError("inlier set collapsed during refinement")
    mean_err = float(np.mean(err[inliers]) * intr.focal)

    # invert world->camera into camera-to-world
    pose = PoseSE3(rot.T, -(rot.T @ t))
    return PnPResult(pose, inliers, iterations, mean_err)
