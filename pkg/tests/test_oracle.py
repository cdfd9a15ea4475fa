"""Synthetic scene / predictor stand-in tests."""

import numpy as np
import pytest

from splatstream.geometry import (
    CameraModel,
    Intrinsics,
    PoseSE3,
    Sim3,
    rotation_about,
    rotation_geodesic,
)
from splatstream.oracle import (
    CorruptionConfig,
    SceneConfig,
    TrajectoryConfig,
    covisible_pairs,
    generate_scene,
    generate_trajectory,
    heightfield_stream,
    lattice_stream,
    make_frame,
    pair_bias,
    predict_descriptors,
    predict_pointmaps,
    render_ground_truth,
    scene_from_surfels,
)
from splatstream.solvers import fit_sim3


def single_surfel_scene(position=(0.0, 0.0, 2.0), albedo=(0.8, 0.2, 0.1), radius=0.5):
    return scene_from_surfels(
        0, [position], [[0.0, 0.0, -1.0]], [albedo], [radius]
    )


def identity_camera(focal=100.0, w=32, h=32):
    return CameraModel(Intrinsics(focal, w, h), PoseSE3.identity())


# ---------------------------------------------------------------------------
# scenes
# ---------------------------------------------------------------------------

def test_generate_scene_deterministic():
    cfg = SceneConfig(surfel_count=400)
    a = generate_scene(7, cfg)
    b = generate_scene(7, cfg)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.albedos, b.albedos)
    assert np.array_equal(a.radii, b.radii)
    c = generate_scene(8, cfg)
    assert not np.array_equal(a.positions, c.positions)


def test_explicit_single_surfel():
    scene = single_surfel_scene()
    assert scene.surfel_count == 1
    assert np.allclose(scene.positions[0], [0.0, 0.0, 2.0])


def test_box_scene_positions_inside_bounds():
    cfg = SceneConfig(kind="box", surfel_count=5000, extent=0.5, base_depth=0.5)
    scene = generate_scene(3, cfg)
    assert scene.surfel_count == 5000
    assert np.all(scene.positions >= scene.bounds[0] - 1e-12)
    assert np.all(scene.positions <= scene.bounds[1] + 1e-12)


def test_heightfield_positions_inside_bounds():
    scene = generate_scene(5, SceneConfig(surfel_count=900))
    assert np.all(scene.positions >= scene.bounds[0] - 1e-12)
    assert np.all(scene.positions <= scene.bounds[1] + 1e-12)


# ---------------------------------------------------------------------------
# ground-truth rendering
# ---------------------------------------------------------------------------

def test_render_camera_looking_away():
    scene = single_surfel_scene()
    cam = CameraModel(
        Intrinsics(100.0, 32, 32), PoseSE3(rotation_about([0, 1, 0], np.pi), np.zeros(3))
    )
    image, depth = render_ground_truth(scene, cam)
    assert np.all(image == 0.0)
    assert np.all(depth == 0.0)


def test_render_single_surfel_on_axis():
    scene = single_surfel_scene()
    image, depth = render_ground_truth(scene, identity_camera(w=33, h=33))
    cy, cx = 16, 16  # principal pixel of a 33x33 image
    assert depth[cy, cx] == pytest.approx(2.0, abs=1e-12)
    assert np.allclose(image[cy, cx], [0.8, 0.2, 0.1])


def test_render_albedo_does_not_change_depth():
    cfg = SceneConfig(surfel_count=300)
    scene = generate_scene(11, cfg)
    recolored = scene_from_surfels(
        scene.seed,
        scene.positions,
        scene.normals,
        np.clip(scene.albedos + 0.1, 0, 1),
        scene.radii,
    )
    cam = identity_camera(80.0, 48, 48)
    _, d1 = render_ground_truth(scene, cam)
    _, d2 = render_ground_truth(recolored, cam)
    assert np.array_equal(d1, d2)


def test_render_deterministic():
    scene = generate_scene(2, SceneConfig(surfel_count=500))
    cam = identity_camera(80.0, 40, 40)
    i1, d1 = render_ground_truth(scene, cam)
    i2, d2 = render_ground_truth(scene, cam)
    assert np.array_equal(i1, i2)
    assert np.array_equal(d1, d2)


def test_heightfield_stream_full_coverage():
    stream = heightfield_stream(seed=1, n_frames=4, width=48, height=48)
    for t in range(4):
        assert np.all(stream.frame(t).depth > 0.0), f"frame {t} has background pixels"


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------

def test_trajectory_bounds_and_smoothness():
    cfg = TrajectoryConfig(
        frames=40, max_rot_deg=2.0, max_trans=0.05, smooth_rot_deg=0.6, smooth_trans=0.01
    )
    poses = generate_trajectory(3, cfg)
    assert len(poses) == 40
    prev_rot, prev_trans = None, None
    for a, b in zip(poses[:-1], poses[1:]):
        delta = a.inverse().compose(b)
        rot = np.rad2deg(rotation_geodesic(np.eye(3), delta.rotation))
        trans = float(np.linalg.norm(delta.translation))
        assert rot <= cfg.max_rot_deg + 1e-9
        assert trans <= cfg.max_trans + 1e-12
        if prev_rot is not None:
            assert abs(rot - prev_rot) <= cfg.smooth_rot_deg + 1e-9
            assert abs(trans - prev_trans) <= cfg.smooth_trans + 1e-12
        prev_rot, prev_trans = rot, trans


# ---------------------------------------------------------------------------
# point-map prediction
# ---------------------------------------------------------------------------

def test_pointmaps_zero_corruption_exact():
    stream = heightfield_stream(seed=4, n_frames=2, width=32, height=32)
    fa, fb = stream.frame(0), stream.frame(1)
    pm_aa, pm_ba = predict_pointmaps(fa, fb, CorruptionConfig(), seed=4)

    # self map: unprojected ground truth in a's own camera
    from splatstream.geometry import depth_grid_to_camera_points

    expect_aa, _ = depth_grid_to_camera_points(fa.camera.intrinsics, fa.depth)
    assert np.max(np.abs(pm_aa.points - expect_aa)) < 1e-12

    # cross map: b's unprojection expressed in a's camera
    pts_bb, _ = depth_grid_to_camera_points(fb.camera.intrinsics, fb.depth)
    rel = fa.camera.pose.inverse().compose(fb.camera.pose)
    expect_ba = rel.apply(pts_bb.reshape(-1, 3)).reshape(pts_bb.shape)
    assert np.max(np.abs(pm_ba.points - expect_ba)) < 1e-12


def test_pointmaps_bias_recoverable():
    corr = CorruptionConfig(bias_rot_deg=5.0, bias_trans=0.1)
    stream = heightfield_stream(seed=9, n_frames=2, width=32, height=32, corruption=corr)
    fa, fb = stream.frame(0), stream.frame(1)
    _, pm_biased = predict_pointmaps(fa, fb, corr, seed=9)
    _, pm_clean = predict_pointmaps(fa, fb, CorruptionConfig(), seed=9)

    res = fit_sim3(pm_clean.flat_points(), pm_biased.flat_points())
    injected = pair_bias(9, 0, 1, corr)
    assert rotation_geodesic(res.transform.rotation, injected.rotation) < 1e-9
    assert np.allclose(res.transform.translation, injected.translation, atol=1e-9)
    assert abs(res.transform.scale - 1.0) < 1e-9


def test_pointmaps_noise_magnitude_monte_carlo():
    # empirical per-axis noise std on >= 1e5 samples within 10% of 0.01*depth
    corr = CorruptionConfig(point_noise=0.01)
    stream = heightfield_stream(seed=5, n_frames=2, width=96, height=96)
    fa, fb = stream.frame(0), stream.frame(1)
    clean_aa, _ = predict_pointmaps(fa, fb, CorruptionConfig(), seed=5)
    errs = []
    for trial in range(4):
        noisy_aa, _ = predict_pointmaps(fa, fb, corr, seed=1000 + trial)
        diff = (noisy_aa.points - clean_aa.points) / fa.depth[..., None]
        errs.append(diff.reshape(-1))
    samples = np.concatenate(errs)
    assert samples.size >= 1e5
    # per-pixel multiplier is U(0.5, 1.5): E[m^2] = 1 + 1/12
    expected = 0.01 * np.sqrt(1 + 1 / 12)
    assert abs(samples.std() - expected) / expected < 0.10


def test_confidence_tracks_noise():
    corr = CorruptionConfig(point_noise=0.02, confidence_fidelity=1.0)
    stream = heightfield_stream(seed=6, n_frames=2, width=32, height=32)
    pm_aa, _ = predict_pointmaps(stream.frame(0), stream.frame(1), corr, seed=6)
    conf = pm_aa.flat_confidence()
    sigma_back = 1.0 / (conf - 1.0) - 1e-3
    assert sigma_back.min() >= 0.02 * 0.5 - 1e-9
    assert sigma_back.max() <= 0.02 * 1.5 + 1e-9
    # zero fidelity collapses confidence to a single value
    flat = CorruptionConfig(point_noise=0.02, confidence_fidelity=0.0)
    pm_flat, _ = predict_pointmaps(stream.frame(0), stream.frame(1), flat, seed=6)
    assert np.ptp(pm_flat.flat_confidence()) < 1e-12


def test_pointmaps_pure_function():
    stream = heightfield_stream(seed=8, n_frames=2, width=24, height=24)
    corr = CorruptionConfig(point_noise=0.01, bias_rot_deg=2.0)
    a1, b1 = predict_pointmaps(stream.frame(0), stream.frame(1), corr, seed=8)
    a2, b2 = predict_pointmaps(stream.frame(0), stream.frame(1), corr, seed=8)
    assert np.array_equal(a1.points, a2.points)
    assert np.array_equal(b1.points, b2.points)
    assert np.array_equal(a1.confidence, a2.confidence)


# ---------------------------------------------------------------------------
# descriptors + covisibility
# ---------------------------------------------------------------------------

def test_descriptors_unit_norm_and_deterministic():
    stream = heightfield_stream(seed=2, n_frames=1, width=24, height=24)
    d1 = predict_descriptors(stream.scene, stream.frame(0), CorruptionConfig(), seed=2)
    d2 = predict_descriptors(stream.scene, stream.frame(0), CorruptionConfig(), seed=2)
    assert np.array_equal(d1.features, d2.features)
    assert np.allclose(np.linalg.norm(d1.flat(), axis=1), 1.0, atol=1e-9)


def test_descriptors_same_surfel_same_descriptor():
    stream = heightfield_stream(seed=3, n_frames=2, width=32, height=32)
    fa, fb = stream.frame(0), stream.frame(1)
    da = predict_descriptors(stream.scene, fa, CorruptionConfig(), seed=3)
    db = predict_descriptors(stream.scene, fb, CorruptionConfig(), seed=3)
    pairs, _ = covisible_pairs(stream.scene, fa, fb)
    assert pairs.shape[0] > 50
    fa_flat, fb_flat = da.flat(), db.flat()
    diffs = np.linalg.norm(fa_flat[pairs[:, 0]] - fb_flat[pairs[:, 1]], axis=1)
    assert np.max(diffs) < 1e-12


def test_covisibility_lattice_counts():
    stream = lattice_stream(seed=1, n_frames=2, width=16, height=16, shift_px=(3, 0))
    pairs, _ = stream.covisible_pairs(0, 1)
    # every pixel is covered; overlap is a 13-column band
    assert pairs.shape[0] == 13 * 16
    a = pairs[:, 0]
    b = pairs[:, 1]
    # shifting the camera +x by 3 pixel footprints moves content 3 pixels left
    assert np.array_equal(a % 16, b % 16 + 3)
    assert np.array_equal(a // 16, b // 16)


def test_outlier_fraction_breaks_descriptors():
    corr = CorruptionConfig(outlier_fraction=0.2)
    stream = lattice_stream(seed=4, n_frames=2, width=24, height=24, shift_px=(1, 0))
    clean = predict_descriptors(stream.scene, stream.frame(0), CorruptionConfig(), seed=4)
    dirty = predict_descriptors(stream.scene, stream.frame(0), corr, seed=4)
    changed = np.linalg.norm(clean.flat() - dirty.flat(), axis=1) > 1e-9
    frac = changed.mean()
    assert 0.15 < frac < 0.25
