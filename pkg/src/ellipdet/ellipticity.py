"""Ellipticity measures for point sets and filled shapes, plus the
segment validation rule used by the detection pipeline."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import DistanceKind, EllipseGeom, as_points2, ellipse_distances


class SingularCovariance(ValueError):
    """Sample covariance of the points is singular."""


class EmptyShape(ValueError):
    """The shape has no interior cells/points."""


class EllipticityMeasure(enum.Enum):
    ELLIPTIC_VARIANCE = "elliptic_variance"
    MOMENT_INVARIANT = "moment_invariant"
    EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class EllipticityScore:
    value: float
    measure: EllipticityMeasure


@dataclass(frozen=True)
class ValidationConfig:
    th_e: float = 0.96  # empirically derived global threshold

    def __post_init__(self):
        if not 0.0 < self.th_e < 1.0:
            raise ValueError("th_e must lie strictly between 0 and 1")


def elliptic_variance(pts) -> EllipticityScore:
    """Spread of the Mahalanobis distances from the sample mean, mapped to [0, 1]."""
    p = as_points2(pts)
    n = len(p)
    if n < 3:
        raise SingularCovariance("need at least 3 points")
    mu = p.mean(axis=0)
    d = p - mu
    cov = d.T @ d / (n - 1)
    det = cov[0, 0] * cov[1, 1] - cov[0, 1] * cov[1, 0]
    tr = cov[0, 0] + cov[1, 1]
    if not np.isfinite(det) or det <= 1e-14 * tr * tr:
        raise SingularCovariance("sample covariance is singular")
    inv = np.array([[cov[1, 1], -cov[0, 1]], [-cov[1, 0], cov[0, 0]]]) / det
    r = np.sqrt(np.einsum("ij,jk,ik->i", d, inv, d))
    mr = r.mean()
    if mr <= 0.0:
        raise SingularCovariance("all points coincide with the mean")
    sigma_v = np.sum((r - mr) ** 2) / (n * mr * mr)
    return EllipticityScore(1.0 / (1.0 + sigma_v), EllipticityMeasure.ELLIPTIC_VARIANCE)


FOUR_PI_SQ = 4.0 * np.pi * np.pi


@njit(cache=True)
def _polygon_fill_mask(px, py, x0, y0, w, h):
    """Even-odd scanline fill of a closed polygon onto a unit grid."""
    mask = np.zeros((h, w), dtype=np.bool_)
    n = px.size
    xs = np.empty(n)
    for iy in range(h):
        yc = y0 + iy + 0.5
        m = 0
        for i in range(n):
            j = (i + 1) % n
            yi, yj = py[i], py[j]
            if (yi > yc) != (yj > yc):
                xs[m] = px[i] + (yc - yi) * (px[j] - px[i]) / (yj - yi)
                m += 1
        if m < 2:
            continue
        sub = np.sort(xs[:m])
        for k in range(0, m - 1, 2):
            lo = int(np.ceil(sub[k] - x0 - 0.5))
            hi = int(np.floor(sub[k + 1] - x0 - 0.5))
            if lo < 0:
                lo = 0
            if hi >= w:
                hi = w - 1
            for ix in range(lo, hi + 1):
                mask[iy, ix] = True
    return mask


def fill_boundary(pts) -> np.ndarray:
    """Rasterize an ordered boundary point sequence onto a 1 unit/cell grid."""
    p = as_points2(pts)
    if len(p) < 3:
        raise EmptyShape("need at least 3 boundary points to enclose area")
    x0 = math.floor(p[:, 0].min()) - 1
    y0 = math.floor(p[:, 1].min()) - 1
    w = int(math.ceil(p[:, 0].max()) - x0 + 2)
    h = int(math.ceil(p[:, 1].max()) - y0 + 2)
    return _polygon_fill_mask(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        float(x0),
        float(y0),
        w,
        h,
    )


def moment_invariant_ellipticity(shape) -> EllipticityScore:
    """Hu-moment ellipticity of a filled shape.

    Accepts a 2D boolean mask, or an ordered boundary point sequence which is
    rasterized at one unit per cell and filled (even-odd rule).
    """
    arr = np.asarray(shape)
    if arr.ndim == 2 and arr.shape[1] == 2 and np.issubdtype(arr.dtype, np.floating):
        mask = fill_boundary(arr)
    else:
        mask = arr.astype(bool)
    ys, xs = np.nonzero(mask)
    n = xs.size
    if n == 0:
        raise EmptyShape("shape has no interior cells")
    x = xs - xs.mean()
    y = ys - ys.mean()
    mu00 = float(n)
    eta20 = float(np.sum(x * x)) / mu00**2
    eta02 = float(np.sum(y * y)) / mu00**2
    eta11 = float(np.sum(x * y)) / mu00**2
    h1 = eta20 + eta02
    h2 = (eta20 - eta02) ** 2 + 4.0 * eta11**2
    sigma_i2 = h1 * h1 - h2
    if sigma_i2 <= 0.0:
        value = 0.0
    elif sigma_i2 <= 1.0 / FOUR_PI_SQ:
        value = FOUR_PI_SQ * sigma_i2
    else:
        value = 1.0 / (FOUR_PI_SQ * sigma_i2)
    return EllipticityScore(value, EllipticityMeasure.MOMENT_INVARIANT)


def arc_area(e: EllipseGeom, arc_angle_beta: float) -> float:
    """Pie-sector area of the occupied elliptical arc."""
    return (arc_angle_beta / (2.0 * np.pi)) * np.pi * e.a * e.b


def euclidean_ellipticity(
    pts, e: EllipseGeom, arc_angle_beta: float = 2.0 * np.pi
) -> EllipticityScore:
    """RMS deviation from the best-fit ellipse normalized by the arc area."""
    p = as_points2(pts)
    if len(p) == 0:
        raise ValueError("need at least one point")
    if not 0.0 < arc_angle_beta <= 2.0 * np.pi + 1e-12:
        raise ValueError("arc angle must lie in (0, 2*pi]")
    d = ellipse_distances(p, e, DistanceKind.CONFOCAL_HYPERBOLA)
    sigma_e = math.sqrt(float(np.mean(d * d)))
    area = arc_area(e, arc_angle_beta)
    return EllipticityScore(
        1.0 / (1.0 + sigma_e / math.sqrt(area)), EllipticityMeasure.EUCLIDEAN
    )


def validate_segment(score: EllipticityScore, cfg: ValidationConfig) -> bool:
    """A segment is elliptical iff its Euclidean ellipticity strictly exceeds th_e."""
    if score.measure is not EllipticityMeasure.EUCLIDEAN:
        raise ValueError("validation is defined on the Euclidean ellipticity")
    return score.value > cfg.th_e
