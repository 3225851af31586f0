"""Synthetic shape, outlier-scene, and cylinder-cloud generators."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np


class ShapeKind(enum.Enum):
    ELLIPSE = "ellipse"
    RECTANGLE = "rectangle"


class Span(enum.Enum):
    FULL = 1.0
    THREE_QUARTER = 0.75
    HALF = 0.5


@dataclass(frozen=True)
class ShapeSimConfig:
    kind: ShapeKind = ShapeKind.ELLIPSE
    theta: float = np.pi / 4
    aspect: float = 2.0  # a / b
    b: float = 1.0  # semi-minor (rectangle half-height before rotation)
    n: int = 100
    sigma: float = 0.0  # isotropic noise per coordinate
    span: Span = Span.FULL
    phase: float = 0.0  # arc start, radians (perimeter fraction for rectangles)
    seed: int = 0

    def __post_init__(self):
        if self.aspect < 1.0 or self.b <= 0 or self.n < 5 or self.sigma < 0:
            raise ValueError("invalid shape configuration")

    @property
    def a(self) -> float:
        return self.aspect * self.b


@dataclass(frozen=True)
class OutlierSceneConfig:
    ellipse: ShapeSimConfig = field(
        default_factory=lambda: ShapeSimConfig(n=1000, sigma=0.01)
    )
    outlier_ratio: float = 0.5
    rect_margin_minor: float = 1.5
    rect_margin_major: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.outlier_ratio < 1.0:
            raise ValueError("outlier ratio must lie in [0, 1)")


def ellipse_points(t, a, b, theta, xc=0.0, yc=0.0) -> np.ndarray:
    """Parametric-angle samples of an ellipse."""
    t = np.asarray(t, dtype=np.float64)
    ct, st = math.cos(theta), math.sin(theta)
    u = a * np.cos(t)
    v = b * np.sin(t)
    return np.column_stack((xc + u * ct - v * st, yc + u * st + v * ct))


def rectangle_points(s, a, b, theta, xc=0.0, yc=0.0) -> np.ndarray:
    """Arc-length-fraction samples of a rectangle with half-sides (a, b).

    s in [0, 1) walks the perimeter counterclockwise from (a, 0).
    """
    s = np.asarray(s, dtype=np.float64) % 1.0
    per = 4.0 * (a + b)
    d = s * per
    x = np.empty_like(d)
    y = np.empty_like(d)
    # segment layout from (a, 0): up b, left 2a, down 2b, right 2a, up b
    seg = np.array([b, 2 * a, 2 * b, 2 * a, b])
    ends = np.cumsum(seg)
    m0 = d < ends[0]
    m1 = (d >= ends[0]) & (d < ends[1])
    m2 = (d >= ends[1]) & (d < ends[2])
    m3 = (d >= ends[2]) & (d < ends[3])
    m4 = d >= ends[3]
    x[m0], y[m0] = a, d[m0]
    x[m1], y[m1] = a - (d[m1] - ends[0]), b
    x[m2], y[m2] = -a, b - (d[m2] - ends[1])
    x[m3], y[m3] = -a + (d[m3] - ends[2]), -b
    x[m4], y[m4] = a, -b + (d[m4] - ends[3])
    ct, st = math.cos(theta), math.sin(theta)
    return np.column_stack((xc + x * ct - y * st, yc + x * st + y * ct))


def simulate_shape(cfg: ShapeSimConfig, rng=None) -> np.ndarray:
    """Noisy point sample of one shape; angles uniform over the span."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    frac = cfg.span.value
    if cfg.kind is ShapeKind.ELLIPSE:
        t = cfg.phase + rng.uniform(0.0, frac * 2.0 * np.pi, cfg.n)
        pts = ellipse_points(t, cfg.a, cfg.b, cfg.theta)
    else:
        s = cfg.phase / (2.0 * np.pi) + rng.uniform(0.0, frac, cfg.n)
        pts = rectangle_points(s, cfg.a, cfg.b, cfg.theta)
    if cfg.sigma > 0:
        pts = pts + rng.normal(0.0, cfg.sigma, pts.shape)
    return pts


def simulate_outlier_scene(cfg: OutlierSceneConfig, rng=None):
    """Ellipse inliers plus two concentric rectangles of outliers.

    Returns (points, labels) with label True for ellipse points.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.ellipse.seed)
    e = cfg.ellipse
    n_total = e.n
    n_in = int(round((1.0 - cfg.outlier_ratio) * n_total))
    n_out = n_total - n_in
    n1 = n_out // 2
    n2 = n_out - n1
    parts = [simulate_shape(replace(e, n=max(n_in, 5)), rng)[:n_in]]
    for mult, cnt in ((1.0, n1), (2.0, n2)):
        if cnt == 0:
            continue
        half_a = e.a + mult * cfg.rect_margin_major
        half_b = e.b + mult * cfg.rect_margin_minor
        s = rng.uniform(0.0, 1.0, cnt)
        pts = rectangle_points(s, half_a, half_b, e.theta)
        if e.sigma > 0:
            pts = pts + rng.normal(0.0, e.sigma, pts.shape)
        parts.append(pts)
    pts = np.concatenate(parts, axis=0)
    labels = np.zeros(len(pts), dtype=bool)
    labels[:n_in] = True
    return pts, labels


@dataclass(frozen=True)
class CuboidSpec:
    center: tuple
    half_sizes: tuple
    n: int


def _cuboid_surface(rng, spec: CuboidSpec) -> np.ndarray:
    hx, hy, hz = spec.half_sizes
    areas = np.array([hy * hz, hy * hz, hx * hz, hx * hz, hx * hy, hx * hy])
    face = rng.choice(6, size=spec.n, p=areas / areas.sum())
    u = rng.uniform(-1.0, 1.0, spec.n)
    v = rng.uniform(-1.0, 1.0, spec.n)
    pts = np.empty((spec.n, 3))
    for f in range(6):
        m = face == f
        axis = f // 2
        sign = 1.0 if f % 2 == 0 else -1.0
        if axis == 0:
            pts[m] = np.column_stack((np.full(m.sum(), sign * hx), u[m] * hy, v[m] * hz))
        elif axis == 1:
            pts[m] = np.column_stack((u[m] * hx, np.full(m.sum(), sign * hy), v[m] * hz))
        else:
            pts[m] = np.column_stack((u[m] * hx, v[m] * hy, np.full(m.sum(), sign * hz)))
    return pts + np.asarray(spec.center)


def simulate_cylinder_cloud(
    radius: float,
    length: float,
    axis,
    center,
    n: int,
    sigma: float,
    clutter: list[CuboidSpec] | None = None,
    seed=0,
):
    """Points on a cylinder's lateral surface plus optional cuboid clutter.

    Returns (points, labels) with label True for cylinder points.
    """
    if radius <= 0 or length <= 0:
        raise ValueError("radius and length must be positive")
    rng = np.random.default_rng(seed)
    w = np.asarray(axis, dtype=np.float64)
    w = w / np.linalg.norm(w)
    helper = np.array([0.0, 0.0, 1.0]) if abs(w[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(w, helper)
    u /= np.linalg.norm(u)
    v = np.cross(w, u)
    t = rng.uniform(-0.5 * length, 0.5 * length, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    pts = (
        np.asarray(center, dtype=np.float64)
        + np.outer(t, w)
        + radius * (np.outer(np.cos(phi), u) + np.outer(np.sin(phi), v))
    )
    parts = [pts]
    for spec in clutter or []:
        parts.append(_cuboid_surface(rng, spec))
    cloud = np.concatenate(parts, axis=0)
    if sigma > 0:
        cloud = cloud + rng.normal(0.0, sigma, cloud.shape)
    labels = np.zeros(len(cloud), dtype=bool)
    labels[:n] = True
    return cloud, labels
