import math

import numpy as np
import pytest

from roadrand import geometry as g


def default_rig():
    intr = g.CameraIntrinsics(500.0, 500.0, 320.0, 128.0, 640, 256)
    pose = g.GroundPlanePose(camera_height=1.5, pitch=0.0, yaw=0.0)
    return intr, pose


def test_hand_projection_zero_pitch():
    intr, pose = default_rig()
    # v = center_v + focal_v * height / forward
    p = g.ground_to_image(g.GroundPoint(0.0, 10.0), intr, pose)
    assert p.u == pytest.approx(320.0, abs=1e-12)
    assert p.v == pytest.approx(128.0 + 500.0 * 1.5 / 10.0, abs=1e-12)


def test_far_points_approach_horizon_row():
    intr, pose = default_rig()
    v_prev = None
    for forward in (10.0, 100.0, 1e4, 1e7):
        v = g.ground_to_image(g.GroundPoint(0.0, forward), intr, pose).v
        assert v > 128.0
        if v_prev is not None:
            assert v < v_prev
        v_prev = v
    assert v_prev == pytest.approx(128.0, abs=1e-4)


def test_lateral_mirror_symmetry():
    intr, pose = default_rig()
    for lat, fwd in ((1.0, 5.0), (3.5, 12.0), (7.0, 40.0)):
        a = g.ground_to_image(g.GroundPoint(lat, fwd), intr, pose)
        b = g.ground_to_image(g.GroundPoint(-lat, fwd), intr, pose)
        assert b.u == pytest.approx(2 * 320.0 - a.u, abs=1e-9)
        assert b.v == pytest.approx(a.v, abs=1e-9)


def test_inverse_of_hand_projection():
    intr, pose = default_rig()
    q = g.image_to_ground(g.PixelPoint(320.0, 203.0), intr, pose)
    assert q.lateral == pytest.approx(0.0, abs=1e-9)
    assert q.forward == pytest.approx(10.0, abs=1e-9)


def test_center_pixel_is_horizon_at_zero_pitch():
    intr, pose = default_rig()
    with pytest.raises(g.NoGroundIntersectionError):
        g.image_to_ground(g.PixelPoint(320.0, 128.0), intr, pose)
    with pytest.raises(g.NoGroundIntersectionError):
        g.image_to_ground(g.PixelPoint(320.0, 60.0), intr, pose)  # above horizon


def test_round_trip_single_point():
    intr, pose = default_rig()
    p = g.GroundPoint(2.0, 5.0)
    q = g.image_to_ground(g.ground_to_image(p, intr, pose), intr, pose)
    assert abs(q.lateral - p.lateral) < 1e-9
    assert abs(q.forward - p.forward) < 1e-9


def test_pixel_round_trip_residual():
    intr = g.CameraIntrinsics(500.0, 500.0, 320.0, 128.0, 640, 256)
    pose = g.GroundPlanePose(1.6, 0.1, 0.04)
    rng = np.random.default_rng(17)
    for _ in range(200):
        # pixels safely below the horizon
        q = g.PixelPoint(float(rng.uniform(0, 640)), float(rng.uniform(190, 256)))
        back = g.ground_to_image(g.image_to_ground(q, intr, pose), intr, pose)
        assert math.hypot(back.u - q.u, back.v - q.v) < 1e-9


def test_round_trip_random_rigs_and_points():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(1000):
        intr = g.CameraIntrinsics(
            focal_u=float(rng.uniform(200, 1500)),
            focal_v=float(rng.uniform(200, 1500)),
            center_u=float(rng.uniform(100, 540)),
            center_v=float(rng.uniform(50, 200)),
            image_width=640,
            image_height=256,
        )
        pose = g.GroundPlanePose(
            camera_height=float(rng.uniform(0.8, 3.0)),
            pitch=float(rng.uniform(-0.1, 0.4)),
            yaw=float(rng.uniform(-0.3, 0.3)),
        )
        p = g.GroundPoint(float(rng.uniform(-10, 10)), float(rng.uniform(2, 60)))
        try:
            q = g.image_to_ground(g.ground_to_image(p, intr, pose), intr, pose)
        except g.NotVisibleError:
            continue  # point behind a strongly yawed/pitched camera
        err = math.hypot(q.lateral - p.lateral, q.forward - p.forward)
        worst = max(worst, err)
    assert worst < 1e-9


def test_v_monotone_decreasing_with_distance():
    intr, _ = default_rig()
    for pitch in (0.0, 0.1, 0.3):
        pose = g.GroundPlanePose(1.5, pitch, 0.0)
        forwards = np.linspace(2.0, 80.0, 200)
        vs = [g.ground_to_image(g.GroundPoint(0.0, f), intr, pose).v for f in forwards]
        assert all(a > b for a, b in zip(vs, vs[1:]))


def test_homography_inverse_is_identity():
    intr, _ = default_rig()
    pose = g.GroundPlanePose(1.7, 0.12, 0.05)
    h = g.ground_homography(intr, pose)
    assert abs(np.linalg.det(h)) > 1e-12
    prod = h @ np.linalg.inv(h)
    prod /= prod[2, 2]
    assert np.max(np.abs(prod - np.eye(3))) < 1e-10


def _projected_square_area(intr, pose, forward):
    corners = [
        g.GroundPoint(-0.5, forward - 0.5),
        g.GroundPoint(0.5, forward - 0.5),
        g.GroundPoint(0.5, forward + 0.5),
        g.GroundPoint(-0.5, forward + 0.5),
    ]
    pts = [g.ground_to_image(c, intr, pose) for c in corners]
    area = 0.0
    for i in range(4):
        a, b = pts[i], pts[(i + 1) % 4]
        area += a.u * b.v - b.u * a.v
    return abs(area) / 2.0


def test_farther_square_has_smaller_pixel_footprint():
    intr, _ = default_rig()
    pose = g.GroundPlanePose(1.5, 0.08, 0.0)
    for d in (3.0, 5.0, 9.0, 16.0, 30.0):
        assert _projected_square_area(intr, pose, 2 * d) < _projected_square_area(
            intr, pose, d
        )


def test_invalid_poses_rejected():
    with pytest.raises(g.InvalidPoseError):
        g.GroundPlanePose(camera_height=0.0, pitch=0.0)
    with pytest.raises(g.InvalidPoseError):
        g.GroundPlanePose(camera_height=-1.0, pitch=0.0)
    with pytest.raises(g.InvalidPoseError):
        g.GroundPlanePose(camera_height=1.5, pitch=math.pi / 2)


def test_intrinsics_invariants():
    with pytest.raises(ValueError):
        g.CameraIntrinsics(0.0, 500.0, 320.0, 128.0, 640, 256)
    with pytest.raises(ValueError):
        g.CameraIntrinsics(500.0, 500.0, 700.0, 128.0, 640, 256)
    with pytest.raises(ValueError):
        g.CameraIntrinsics(500.0, 500.0, 320.0, 128.0, 0, 256)


def test_point_behind_camera_not_visible():
    intr, pose = default_rig()
    with pytest.raises(g.NotVisibleError):
        g.ground_to_image(g.GroundPoint(0.0, -5.0), intr, pose)


def test_calibration_round_trip():
    intr, _ = default_rig()
    rig = g.CameraRig(intr, g.GroundPlanePose(1.5, 0.1, -0.02))
    assert g.CameraRig.from_dict(rig.to_dict()) == rig
