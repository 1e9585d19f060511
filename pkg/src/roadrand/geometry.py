"""Pinhole camera model and the metric ground-plane <-> image homography.

Coordinate conventions:

* Ground frame: ``lateral`` (meters, right-positive) and ``forward``
  (meters, away from the camera along its heading projected onto the
  road plane).  The road plane is horizontal and passes
  ``camera_height`` meters below the camera center.
* Image frame: origin top-left, ``u`` = column, ``v`` = row, v grows
  downward.  Positive ``pitch`` tilts the optical axis toward the road.
* ``yaw`` rotates the camera heading about the vertical axis,
  right-handed (positive yaw turns the heading toward -lateral).

All projective math is double precision; dehomogenization rejects
|w| < 1e-12.
"""

import math
from dataclasses import dataclass

import numpy as np

# Homogeneous coordinates with |w| below this are treated as points at
# infinity (the horizon).
W_EPSILON = 1e-12


class InvalidPoseError(ValueError):
    """Camera pose that admits no ground-plane homography."""


class NotVisibleError(ValueError):
    """Ground point behind the camera or at/above the horizon."""


class NoGroundIntersectionError(ValueError):
    """Pixel whose viewing ray never meets the road plane in front."""


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics in pixel units."""

    focal_u: float
    focal_v: float
    center_u: float
    center_v: float
    image_width: int
    image_height: int

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise ValueError("image dimensions must be at least 1 pixel")
        if self.focal_u <= 0 or self.focal_v <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.center_u < self.image_width):
            raise ValueError("center_u outside image")
        if not (0 <= self.center_v < self.image_height):
            raise ValueError("center_v outside image")

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.focal_u, 0.0, self.center_u],
                [0.0, self.focal_v, self.center_v],
                [0.0, 0.0, 1.0],
            ]
        )


@dataclass(frozen=True)
class GroundPlanePose:
    """Camera extrinsics relative to a horizontal road plane.

    camera_height: meters above the road plane, > 0.
    pitch: radians, positive tilts the optical axis down, |pitch| < pi/2.
    yaw: radians about the vertical axis.
    """

    camera_height: float
    pitch: float
    yaw: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.camera_height) or self.camera_height <= 0:
            raise InvalidPoseError(f"camera_height must be > 0, got {self.camera_height}")
        if not math.isfinite(self.pitch) or abs(self.pitch) >= math.pi / 2:
            raise InvalidPoseError(f"|pitch| must be < pi/2, got {self.pitch}")
        if not math.isfinite(self.yaw):
            raise InvalidPoseError("yaw must be finite")


@dataclass(frozen=True)
class GroundPoint:
    """Metric point on the road plane."""

    lateral: float
    forward: float


@dataclass(frozen=True)
class PixelPoint:
    """Continuous image coordinates; may lie outside the image bounds."""

    u: float
    v: float


@dataclass(frozen=True)
class CameraRig:
    """Intrinsics plus ground-plane extrinsics of one camera."""

    intrinsics: CameraIntrinsics
    pose: GroundPlanePose

    def to_dict(self) -> dict:
        i, p = self.intrinsics, self.pose
        return {
            "focal_u": i.focal_u,
            "focal_v": i.focal_v,
            "center_u": i.center_u,
            "center_v": i.center_v,
            "image_width": i.image_width,
            "image_height": i.image_height,
            "camera_height": p.camera_height,
            "pitch": p.pitch,
            "yaw": p.yaw,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CameraRig":
        intrinsics = CameraIntrinsics(
            focal_u=float(d["focal_u"]),
            focal_v=float(d["focal_v"]),
            center_u=float(d["center_u"]),
            center_v=float(d["center_v"]),
            image_width=int(d["image_width"]),
            image_height=int(d["image_height"]),
        )
        pose = GroundPlanePose(
            camera_height=float(d["camera_height"]),
            pitch=float(d["pitch"]),
            yaw=float(d.get("yaw", 0.0)),
        )
        return cls(intrinsics, pose)


def _camera_rotation(pose: GroundPlanePose) -> np.ndarray:
    """Rotation whose columns are the camera axes (right, down, optical)
    expressed in the ground frame (lateral, forward, up)."""
    ct, st = math.cos(pose.pitch), math.sin(pose.pitch)
    # Zero-yaw camera axes: x = image-right, y = image-down, z = optical.
    x_axis = np.array([1.0, 0.0, 0.0])
    y_axis = np.array([0.0, -st, -ct])
    z_axis = np.array([0.0, ct, -st])
    r = np.column_stack([x_axis, y_axis, z_axis])
    cy, sy = math.cos(pose.yaw), math.sin(pose.yaw)
    yaw_rot = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    return yaw_rot @ r


def ground_homography(intrinsics: CameraIntrinsics, pose: GroundPlanePose) -> np.ndarray:
    """3x3 projective map H with image coords ~ H @ (lateral, forward, 1).

    Raises InvalidPoseError for degenerate poses (enforced at
    GroundPlanePose construction).  H is always invertible for a valid
    pose.
    """
    rot = _camera_rotation(pose)
    # A ground point (x, f) sits at (x, f, -h) relative to the camera.
    offset = np.array(
        [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, -pose.camera_height],
        ]
    )
    return intrinsics.matrix() @ rot.T @ offset


def ground_to_image(
    point: GroundPoint, intrinsics: CameraIntrinsics, pose: GroundPlanePose
) -> PixelPoint:
    """Project a metric road-plane point to continuous pixel coordinates."""
    h = ground_homography(intrinsics, pose)
    q = h @ np.array([point.lateral, point.forward, 1.0])
    if q[2] < W_EPSILON:
        raise NotVisibleError(
            f"ground point ({point.lateral}, {point.forward}) is behind the "
            "camera or at/above the horizon"
        )
    return PixelPoint(u=float(q[0] / q[2]), v=float(q[1] / q[2]))


def image_to_ground(
    pixel: PixelPoint, intrinsics: CameraIntrinsics, pose: GroundPlanePose
) -> GroundPoint:
    """Back-project a pixel onto the road plane.

    Raises NoGroundIntersectionError for pixels at or above the horizon.
    """
    h = ground_homography(intrinsics, pose)
    g = np.linalg.inv(h) @ np.array([pixel.u, pixel.v, 1.0])
    if abs(g[2]) < W_EPSILON:
        raise NoGroundIntersectionError(
            f"pixel ({pixel.u}, {pixel.v}) lies on the horizon"
        )
    lateral, forward = float(g[0] / g[2]), float(g[1] / g[2])
    if forward <= 0:
        raise NoGroundIntersectionError(
            f"pixel ({pixel.u}, {pixel.v}) is at/above the horizon "
            "(no road intersection in front of the camera)"
        )
    return GroundPoint(lateral=lateral, forward=forward)


def project_points(points: np.ndarray, homography: np.ndarray) -> np.ndarray:
    """Project an (N, 2) array of (lateral, forward) ground points.

    Callers must ensure all points are strictly on the visible side of
    the plane-at-infinity (see visibility_halfplane); this is enforced
    with NotVisibleError.
    """
    pts = np.asarray(points, dtype=float)
    ones = np.ones((pts.shape[0], 1))
    q = np.hstack([pts, ones]) @ homography.T
    w = q[:, 2]
    if np.any(w < W_EPSILON):
        raise NotVisibleError("point set crosses the horizon; clip it first")
    return q[:, :2] / w[:, None]


def visibility_halfplane(homography: np.ndarray) -> tuple[float, float, float]:
    """Coefficients (a, b, c) with w = a*lateral + b*forward + c.

    Ground points are projectable iff w > 0; w = 0 is the horizon line
    in ground coordinates.
    """
    return float(homography[2, 0]), float(homography[2, 1]), float(homography[2, 2])
