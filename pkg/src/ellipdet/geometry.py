"""Geometric primitives: ellipse/circle fitting and point-to-ellipse distances.

Conventions used throughout the package:
  - 2D point sets are float64 arrays of shape (n, 2), columns (x, y).
  - An ellipse is (xc, yc, a, b, theta) with a >= b > 0 and theta in [0, pi).
  - Distances are Euclidean lengths in the units of the input points.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

CHI2_95_2 = 5.991464547107979  # chi-square 0.95 quantile, 2 dof
CHI_GATE = math.sqrt(CHI2_95_2)  # ~2.4477, the inlier gate used by the robust loops
MADN_SCALE = 0.67449  # MAD of a normal sample -> sigma

REFINE_MAX_ITER = 50
REFINE_REL_TOL = 1e-10


class NotAnEllipse(ValueError):
    """The conic is not a real, non-degenerate ellipse."""


class DegenerateInput(ValueError):
    """Too few points, or a degenerate configuration (e.g. collinear)."""


class DistanceKind(enum.Enum):
    ALGEBRAIC = 0
    SAMPSON = 1
    CONFOCAL_HYPERBOLA = 2
    GEOMETRIC_ORACLE = 3


@dataclass(frozen=True)
class EllipseGeom:
    xc: float
    yc: float
    a: float  # semi-major
    b: float  # semi-minor
    theta: float  # major-axis rotation, radians in [0, pi)

    def params(self) -> np.ndarray:
        return np.array([self.xc, self.yc, self.a, self.b, self.theta])


@dataclass(frozen=True)
class ConicCoeffs:
    """Algebraic conic A x^2 + B xy + C y^2 + D x + E y + F = 0."""

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def coeffs(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D, self.E, self.F])


@dataclass(frozen=True)
class CircleGeom:
    cx: float
    cy: float
    r: float


def as_points2(pts) -> np.ndarray:
    out = np.ascontiguousarray(pts, dtype=np.float64)
    if out.ndim != 2 or out.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {out.shape}")
    return out


# ---------------------------------------------------------------------------
# numba cores
# ---------------------------------------------------------------------------


@njit(cache=True)
def _canon_axes(a, b, theta):
    """Fold to a >= b with theta in [0, pi)."""
    if b > a:
        a, b = b, a
        theta += 0.5 * np.pi
    theta = theta % np.pi
    if theta >= np.pi:
        theta -= np.pi
    return a, b, theta


@njit(cache=True)
def _conic_from_geom(xc, yc, a, b, theta):
    ct = math.cos(theta)
    st = math.sin(theta)
    ia = 1.0 / (a * a)
    ib = 1.0 / (b * b)
    A = ct * ct * ia + st * st * ib
    B = 2.0 * ct * st * (ia - ib)
    C = st * st * ia + ct * ct * ib
    D = -2.0 * A * xc - B * yc
    E = -B * xc - 2.0 * C * yc
    F = A * xc * xc + B * xc * yc + C * yc * yc - 1.0
    return A, B, C, D, E, F


@njit(cache=True)
def _geom_from_conic(A, B, C, D, E, F):
    """Return (ok, xc, yc, a, b, theta); ok=False when not a real ellipse."""
    disc = B * B - 4.0 * A * C
    if disc >= 0.0:
        return False, 0.0, 0.0, 0.0, 0.0, 0.0
    xc = (2.0 * C * D - B * E) / disc
    yc = (2.0 * A * E - B * D) / disc
    # conic value at the center
    f0 = F + 0.5 * (D * xc + E * yc)
    # eigenvalues of [[A, B/2], [B/2, C]]
    mean = 0.5 * (A + C)
    delta = math.hypot(0.5 * (A - C), 0.5 * B)
    lam1 = mean - delta  # smaller in signed order
    lam2 = mean + delta
    if mean < 0.0:  # normalize orientation so both eigenvalues are positive
        lam1, lam2 = -lam2, -lam1
        f0 = -f0
        A, B, C = -A, -B, -C
    if lam1 <= 0.0 or f0 >= 0.0:
        return False, 0.0, 0.0, 0.0, 0.0, 0.0
    a = math.sqrt(-f0 / lam1)
    b = math.sqrt(-f0 / lam2)
    # major axis direction = eigenvector of lam1
    if abs(B) > 1e-14 * (abs(A) + abs(C)):
        vx = 0.5 * B
        vy = lam1 - A
        if vx * vx + vy * vy < 1e-30 * (lam1 * lam1 + 1e-300):
            vx = lam1 - C
            vy = 0.5 * B
        theta = math.atan2(vy, vx)
    else:
        theta = 0.0 if A <= C else 0.5 * np.pi
    a, b, theta = _canon_axes(a, b, theta)
    return True, xc, yc, a, b, theta


@njit(cache=True)
def _solve3(M, rhs0, rhs1, rhs2, out):
    """Solve M x = rhs for a 3x3 system via the adjugate; returns det."""
    a, b, c = M[0, 0], M[0, 1], M[0, 2]
    d, e, f = M[1, 0], M[1, 1], M[1, 2]
    g, h, i = M[2, 0], M[2, 1], M[2, 2]
    A = e * i - f * h
    B = -(d * i - f * g)
    C = d * h - e * g
    det = a * A + b * B + c * C
    if det == 0.0:
        return 0.0
    D = -(b * i - c * h)
    E = a * i - c * g
    F = -(a * h - b * g)
    G = b * f - c * e
    H = -(a * f - c * d)
    I = a * e - b * d
    out[0] = (A * rhs0 + D * rhs1 + G * rhs2) / det
    out[1] = (B * rhs0 + E * rhs1 + H * rhs2) / det
    out[2] = (C * rhs0 + F * rhs1 + I * rhs2) / det
    return det


@njit(cache=True)
def _eig3_real(M, vals, vecs):
    """Real eigenpairs of a 3x3 matrix via the characteristic cubic.

    Writes eigenvalues into vals and unit right-eigenvectors into vecs
    columns; returns the number of real eigenpairs found (cross-product
    null vectors; falls back to 0 when the null space is ill-determined
    so the caller can retry with LAPACK).
    """
    scale = 0.0
    for r in range(3):
        for c in range(3):
            v = abs(M[r, c])
            if v > scale:
                scale = v
    if scale == 0.0:
        return 0
    S = M / scale
    tr = S[0, 0] + S[1, 1] + S[2, 2]
    m2 = (
        S[0, 0] * S[1, 1]
        - S[0, 1] * S[1, 0]
        + S[0, 0] * S[2, 2]
        - S[0, 2] * S[2, 0]
        + S[1, 1] * S[2, 2]
        - S[1, 2] * S[2, 1]
    )
    det = (
        S[0, 0] * (S[1, 1] * S[2, 2] - S[1, 2] * S[2, 1])
        - S[0, 1] * (S[1, 0] * S[2, 2] - S[1, 2] * S[2, 0])
        + S[0, 2] * (S[1, 0] * S[2, 1] - S[1, 1] * S[2, 0])
    )
    # lambda^3 - tr lambda^2 + m2 lambda - det = 0; depressed t = lambda - tr/3
    p = m2 - tr * tr / 3.0
    q = -det + tr * m2 / 3.0 - 2.0 * tr * tr * tr / 27.0
    half_q = 0.5 * q
    third_p = p / 3.0
    disc = half_q * half_q + third_p * third_p * third_p
    n = 0
    roots = np.empty(3)
    if disc > 1e-14 * max(half_q * half_q, 1e-30):
        s = math.sqrt(disc)
        u = -half_q + s
        v = -half_q - s
        t = math.copysign(abs(u) ** (1.0 / 3.0), u) + math.copysign(
            abs(v) ** (1.0 / 3.0), v
        )
        roots[0] = t + tr / 3.0
        n = 1
    else:
        if third_p >= 0.0:
            # triple-ish root
            roots[0] = tr / 3.0
            n = 1
        else:
            rho = math.sqrt(-third_p * third_p * third_p)
            arg = -half_q / rho
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            phi = math.acos(arg)
            m = 2.0 * math.sqrt(-third_p)
            roots[0] = m * math.cos(phi / 3.0) + tr / 3.0
            roots[1] = m * math.cos((phi + 2.0 * np.pi) / 3.0) + tr / 3.0
            roots[2] = m * math.cos((phi + 4.0 * np.pi) / 3.0) + tr / 3.0
            n = 3
    found = 0
    for k in range(n):
        lam = roots[k]
        r0 = np.array([S[0, 0] - lam, S[0, 1], S[0, 2]])
        r1 = np.array([S[1, 0], S[1, 1] - lam, S[1, 2]])
        r2 = np.array([S[2, 0], S[2, 1], S[2, 2] - lam])
        c01 = np.array(
            [
                r0[1] * r1[2] - r0[2] * r1[1],
                r0[2] * r1[0] - r0[0] * r1[2],
                r0[0] * r1[1] - r0[1] * r1[0],
            ]
        )
        c02 = np.array(
            [
                r0[1] * r2[2] - r0[2] * r2[1],
                r0[2] * r2[0] - r0[0] * r2[2],
                r0[0] * r2[1] - r0[1] * r2[0],
            ]
        )
        c12 = np.array(
            [
                r1[1] * r2[2] - r1[2] * r2[1],
                r1[2] * r2[0] - r1[0] * r2[2],
                r1[0] * r2[1] - r1[1] * r2[0],
            ]
        )
        n01 = c01[0] ** 2 + c01[1] ** 2 + c01[2] ** 2
        n02 = c02[0] ** 2 + c02[1] ** 2 + c02[2] ** 2
        n12 = c12[0] ** 2 + c12[1] ** 2 + c12[2] ** 2
        best = c01
        nb = n01
        if n02 > nb:
            best = c02
            nb = n02
        if n12 > nb:
            best = c12
            nb = n12
        if nb < 1e-24:
            continue  # ill-determined null space; caller falls back
        inv = 1.0 / math.sqrt(nb)
        vx = best[0] * inv
        vy = best[1] * inv
        vz = best[2] * inv
        # residual check ||S v - lam v||
        e0 = S[0, 0] * vx + S[0, 1] * vy + S[0, 2] * vz - lam * vx
        e1 = S[1, 0] * vx + S[1, 1] * vy + S[1, 2] * vz - lam * vy
        e2 = S[2, 0] * vx + S[2, 1] * vy + S[2, 2] * vz - lam * vz
        if e0 * e0 + e1 * e1 + e2 * e2 > 1e-16:
            continue
        vals[found] = lam * scale
        vecs[0, found] = vx
        vecs[1, found] = vy
        vecs[2, found] = vz
        found += 1
    return found


@njit(cache=True)
def _fit_conic_direct(x, y):
    """Halir-Flusser direct algebraic ellipse fit, with data normalization.

    Returns (status, A, B, C, D, E, F) where status is 0 ok,
    1 degenerate input, 2 not an ellipse.
    """
    n = x.size
    if n < 5:
        return 1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += x[i]
        my += y[i]
    mx /= n
    my /= n
    s2 = 0.0
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        s2 += dx * dx + dy * dy
    s2 /= n
    if s2 <= 0.0:
        return 1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    s = math.sqrt(s2)
    # scatter sums of the normalized design [x^2, xy, y^2] and [x, y, 1]
    S1 = np.zeros((3, 3))
    S2 = np.zeros((3, 3))
    S3 = np.zeros((3, 3))
    for i in range(n):
        u = (x[i] - mx) / s
        v = (y[i] - my) / s
        d1 = (u * u, u * v, v * v)
        d2 = (u, v, 1.0)
        for r in range(3):
            for c in range(3):
                S1[r, c] += d1[r] * d1[c]
                S2[r, c] += d1[r] * d2[c]
                S3[r, c] += d2[r] * d2[c]
    # T = -S3^-1 S2^T : solve column by column
    T = np.empty((3, 3))
    col = np.empty(3)
    ok_cols = True
    for c in range(3):
        det = _solve3(S3, S2[c, 0], S2[c, 1], S2[c, 2], col)
        if abs(det) <= 1e-10 * n * n * n:
            ok_cols = False
            break
        T[0, c] = -col[0]
        T[1, c] = -col[1]
        T[2, c] = -col[2]
    if not ok_cols:
        return 1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    M = S1 + S2 @ T
    # apply inverse constraint matrix C1^-1 = [[0,0,.5],[0,-1,0],[.5,0,0]]
    R = np.empty((3, 3))
    for c in range(3):
        R[0, c] = 0.5 * M[2, c]
        R[1, c] = -M[1, c]
        R[2, c] = 0.5 * M[0, c]
    vals = np.empty(3)
    vecs = np.empty((3, 3))
    nfound = _eig3_real(R, vals, vecs)
    if nfound == 0:
        # fall back to LAPACK for ill-conditioned null spaces
        w, V = np.linalg.eig(R)
        nfound = 0
        for k in range(3):
            if abs(w[k].imag) <= 1e-8 * (abs(w[k].real) + 1e-30):
                vals[nfound] = w[k].real
                vecs[0, nfound] = V[0, k].real
                vecs[1, nfound] = V[1, k].real
                vecs[2, nfound] = V[2, k].real
                nfound += 1
    a1 = np.empty(3)
    got = False
    for k in range(nfound):
        ca = vecs[0, k]
        cb = vecs[1, k]
        cc = vecs[2, k]
        if 4.0 * ca * cc - cb * cb > 0.0:
            a1[0] = ca
            a1[1] = cb
            a1[2] = cc
            got = True
            break
    if not got:
        return 2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0
    a2 = T @ a1
    At, Bt, Ct = a1[0], a1[1], a1[2]
    Dt, Et, Ft = a2[0], a2[1], a2[2]
    # denormalize: x_t = (x - mx)/s, y_t = (y - my)/s
    inv_s2 = 1.0 / (s * s)
    A = At * inv_s2
    B = Bt * inv_s2
    C = Ct * inv_s2
    D = (-2.0 * At * mx - Bt * my) * inv_s2 + Dt / s
    E = (-Bt * mx - 2.0 * Ct * my) * inv_s2 + Et / s
    F = (
        (At * mx * mx + Bt * mx * my + Ct * my * my) * inv_s2
        - (Dt * mx + Et * my) / s
        + Ft
    )
    return 0, A, B, C, D, E, F


@njit(cache=True)
def _fit_ellipse_direct_core(x, y):
    """Returns (status, xc, yc, a, b, theta); status 0 ok / 1 degenerate / 2 not ellipse."""
    st, A, B, C, D, E, F = _fit_conic_direct(x, y)
    if st != 0:
        return st, 0.0, 0.0, 0.0, 0.0, 0.0
    ok, xc, yc, a, b, theta = _geom_from_conic(A, B, C, D, E, F)
    if not ok:
        return 2, 0.0, 0.0, 0.0, 0.0, 0.0
    return 0, xc, yc, a, b, theta


@njit(cache=True)
def _geometric_dist_frame(x0, y0, a, b):
    """True orthogonal distance from (x0, y0) to the ellipse, in its frame."""
    x0 = abs(x0)
    y0 = abs(y0)
    c2 = a * a - b * b
    if c2 <= 1e-14 * a * a:
        return abs(math.hypot(x0, y0) - a)
    if x0 < 1e-14 * a and y0 < 1e-14 * b:
        return b
    if y0 <= 1e-14 * b:
        # on the major axis: nearest point is the vertex beyond the evolute cusp
        xcusp = c2 / a
        if x0 >= xcusp:
            return abs(x0 - a)
        ct = a * x0 / c2
        stt = math.sqrt(max(0.0, 1.0 - ct * ct))
        return math.hypot(x0 - a * ct, b * stt)
    if x0 <= 1e-14 * a:
        return abs(y0 - b)
    # safeguarded Newton on the parametric angle in (0, pi/2)
    lo = 0.0
    hi = 0.5 * np.pi
    t = math.atan2(a * y0, b * x0)
    for _ in range(200):
        ct = math.cos(t)
        stt = math.sin(t)
        f = (b * b - a * a) * stt * ct + a * x0 * stt - b * y0 * ct
        if f > 0.0:
            hi = t
        else:
            lo = t
        df = (b * b - a * a) * (ct * ct - stt * stt) + a * x0 * ct + b * y0 * stt
        if df != 0.0:
            tn = t - f / df
        else:
            tn = 0.5 * (lo + hi)
        if tn <= lo or tn >= hi:
            tn = 0.5 * (lo + hi)
        if abs(tn - t) <= 1e-13 * (abs(t) + 1e-13):
            t = tn
            break
        t = tn
    return math.hypot(x0 - a * math.cos(t), y0 - b * math.sin(t))


@njit(cache=True)
def _confocal_dist_frame(x0, y0, a, b):
    """Confocal-hyperbola distance approximation, in the ellipse frame.

    Solves the confocal parameter of the hyperbola through the point and
    measures to its intersection with the ellipse; degenerate positions
    (inside the focal segment) use the geometric distance.
    """
    xq = abs(x0)
    yq = abs(y0)
    c2 = a * a - b * b
    if c2 <= 1e-14 * a * a:
        return abs(math.hypot(xq, yq) - a)
    c = math.sqrt(c2)
    if yq <= 1e-9 * b and xq < c:
        return _geometric_dist_frame(xq, yq, a, b)
    q1 = a * a + b * b - xq * xq - yq * yq
    q0 = a * a * b * b - xq * xq * b * b - yq * yq * a * a
    disc = q1 * q1 - 4.0 * q0
    if disc < 0.0:
        if disc < -1e-9 * (q1 * q1 + abs(q0) + 1e-30):
            return _geometric_dist_frame(xq, yq, a, b)
        disc = 0.0
    sq = math.sqrt(disc)
    if q1 >= 0.0:
        r1 = 0.5 * (-q1 - sq)
    else:
        r1 = 0.5 * (-q1 + sq)
    if r1 != 0.0:
        r2 = q0 / r1
    else:
        r2 = 0.0
    lam = r1 if r1 < r2 else r2
    tol = 1e-9 * a * a
    if lam < -a * a - tol or lam > -b * b + tol:
        return _geometric_dist_frame(xq, yq, a, b)
    if lam < -a * a:
        lam = -a * a
    if lam > -b * b:
        lam = -b * b
    u = a * a * (a * a + lam) / c2
    v = -b * b * (b * b + lam) / c2
    if u < 0.0:
        u = 0.0
    if v < 0.0:
        v = 0.0
    return math.hypot(xq - math.sqrt(u), yq - math.sqrt(v))


@njit(cache=True)
def _dist_frame(x0, y0, a, b, kind):
    """Point distance in the ellipse frame for a DistanceKind code."""
    if kind == 3:
        return _geometric_dist_frame(x0, y0, a, b)
    if kind == 2:
        return _confocal_dist_frame(x0, y0, a, b)
    q = (x0 / a) ** 2 + (y0 / b) ** 2 - 1.0
    if kind == 0:
        return abs(q)
    gx = 2.0 * x0 / (a * a)
    gy = 2.0 * y0 / (b * b)
    g = math.hypot(gx, gy)
    if g < 1e-300:
        return _geometric_dist_frame(x0, y0, a, b)
    return abs(q) / g


@njit(cache=True)
def _ellipse_distances(x, y, xc, yc, a, b, theta, kind, signed):
    ct = math.cos(theta)
    st = math.sin(theta)
    out = np.empty(x.size)
    for i in range(x.size):
        dx = x[i] - xc
        dy = y[i] - yc
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        d = _dist_frame(u, v, a, b, kind)
        if signed and (u / a) ** 2 + (v / b) ** 2 < 1.0:
            d = -d
        out[i] = d
    return out


@njit(cache=True)
def _refine_objective(x, y, p, kind):
    ct = math.cos(p[4])
    st = math.sin(p[4])
    s = 0.0
    for i in range(x.size):
        dx = x[i] - p[0]
        dy = y[i] - p[1]
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        d = _dist_frame(u, v, p[2], p[3], kind)
        s += d * d
    return s


@njit(cache=True)
def _refine_residuals(x, y, p, kind, out):
    ct = math.cos(p[4])
    st = math.sin(p[4])
    for i in range(x.size):
        dx = x[i] - p[0]
        dy = y[i] - p[1]
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        d = _dist_frame(u, v, p[2], p[3], kind)
        if (u / p[2]) ** 2 + (v / p[3]) ** 2 < 1.0:
            d = -d
        out[i] = d


@njit(cache=True)
def _canon_params(p):
    a, b, theta = _canon_axes(p[2], p[3], p[4])
    p[2] = a
    p[3] = b
    p[4] = theta


@njit(cache=True)
def _refine_ellipse_core(x, y, p0, kind, max_iter, rel_tol):
    """Damped Gauss-Newton refinement of (xc, yc, a, b, theta).

    Minimizes the sum of squared distances of the requested kind; steps are
    accepted only when the objective decreases. Returns
    (params, obj_init, obj_final, converged).
    """
    n = x.size
    p = p0.copy()
    _canon_params(p)
    obj0 = _refine_objective(x, y, p, kind)
    obj = obj0
    r = np.empty(n)
    rt = np.empty(n)
    J = np.empty((n, 5))
    lam = 1e-3
    converged = False
    for _ in range(max_iter):
        _refine_residuals(x, y, p, kind, r)
        # forward-difference Jacobian
        for j in range(5):
            if j == 4:
                h = 1e-7
            else:
                h = 1e-7 * max(abs(p[j]), p[3])
            pj = p[j]
            p[j] = pj + h
            if p[3] <= 0.0:  # keep axes positive while differencing
                p[j] = pj
                h = -h
                p[j] = pj + h
            _refine_residuals(x, y, p, kind, rt)
            p[j] = pj
            for i in range(n):
                J[i, j] = (rt[i] - r[i]) / h
        JtJ = J.T @ J
        g = J.T @ r
        accepted = False
        for _inner in range(12):
            H = JtJ.copy()
            for j in range(5):
                H[j, j] += lam * max(JtJ[j, j], 1e-12)
            step = np.linalg.solve(H, -g)
            pn = p + step
            if pn[2] <= 0.0 or pn[3] <= 0.0:
                lam *= 10.0
                continue
            _canon_params(pn)
            on = _refine_objective(x, y, pn, kind)
            if on < obj:
                rel = (obj - on) / (obj + 1e-300)
                p = pn
                obj = on
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                if rel < rel_tol:
                    converged = True
                break
            lam *= 10.0
        if not accepted:
            converged = True  # no descent direction left
            break
        if converged:
            break
    return p, obj0, obj, converged


@njit(cache=True)
def _circle_char_newton(Mz, Cov_xy, Mxz, Myz, Mzz, Mxx, Myy, Mxy):
    """Smallest non-negative root of the shared Pratt/Hyper quartic.

    P(eta) = 4 eta^4 + A2 eta^2 + A1 eta + A0 on centered data
    (Newton from 0, after Chernov's formulation).
    """
    Var_z = Mzz - Mz * Mz
    A2 = 4.0 * Cov_xy - 3.0 * Mz * Mz - Mzz
    A1 = Var_z * Mz + 4.0 * Cov_xy * Mz - Mxz * Mxz - Myz * Myz
    A0 = (
        Mxz * (Mxz * Myy - Myz * Mxy)
        + Myz * (Myz * Mxx - Mxz * Mxy)
        - Var_z * Cov_xy
    )
    A22 = A2 + A2
    xnew = 0.0
    ynew = 1e300
    for _ in range(32):
        yold = ynew
        ynew = A0 + xnew * (A1 + xnew * (A2 + 4.0 * xnew * xnew))
        if abs(ynew) > abs(yold):
            xnew = 0.0
            break
        Dy = A1 + xnew * (A22 + 16.0 * xnew * xnew)
        if Dy == 0.0:
            break
        xold = xnew
        xnew = xold - ynew / Dy
        if xnew != 0.0 and abs((xnew - xold) / xnew) < 1e-13:
            break
        if xnew < 0.0:
            xnew = 0.0
    return xnew


@njit(cache=True)
def _fit_circle_core(x, y, hyper):
    """Pratt (hyper=False) or hyper-accurate (hyper=True) algebraic circle fit.

    Returns (ok, cx, cy, r).
    """
    n = x.size
    if n < 3:
        return False, 0.0, 0.0, 0.0
    mx = 0.0
    my = 0.0
    for i in range(n):
        mx += x[i]
        my += y[i]
    mx /= n
    my /= n
    Mxx = 0.0
    Myy = 0.0
    Mxy = 0.0
    Mxz = 0.0
    Myz = 0.0
    Mzz = 0.0
    for i in range(n):
        u = x[i] - mx
        v = y[i] - my
        z = u * u + v * v
        Mxx += u * u
        Myy += v * v
        Mxy += u * v
        Mxz += u * z
        Myz += v * z
        Mzz += z * z
    Mxx /= n
    Myy /= n
    Mxy /= n
    Mxz /= n
    Myz /= n
    Mzz /= n
    Mz = Mxx + Myy
    Cov_xy = Mxx * Myy - Mxy * Mxy
    if not (Cov_xy > 1e-14 * Mz * Mz):
        return False, 0.0, 0.0, 0.0  # collinear or all coincident
    eta = _circle_char_newton(Mz, Cov_xy, Mxz, Myz, Mzz, Mxx, Myy, Mxy)
    det = eta * eta - eta * Mz + Cov_xy
    if abs(det) <= 1e-14 * Mz * Mz:
        return False, 0.0, 0.0, 0.0
    cx = (Mxz * (Myy - eta) - Myz * Mxy) / det * 0.5
    cy = (Myz * (Mxx - eta) - Mxz * Mxy) / det * 0.5
    if hyper:
        r2 = cx * cx + cy * cy + Mz - 2.0 * eta
    else:
        r2 = cx * cx + cy * cy + Mz + 2.0 * eta
    if r2 <= 0.0:
        return False, 0.0, 0.0, 0.0
    return True, cx + mx, cy + my, math.sqrt(r2)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------


def geom_to_conic(e: EllipseGeom) -> ConicCoeffs:
    return ConicCoeffs(*_conic_from_geom(e.xc, e.yc, e.a, e.b, e.theta))


def conic_to_geom(c: ConicCoeffs) -> EllipseGeom:
    ok, xc, yc, a, b, theta = _geom_from_conic(c.A, c.B, c.C, c.D, c.E, c.F)
    if not ok:
        raise NotAnEllipse(f"conic {c} is not a real non-degenerate ellipse")
    return EllipseGeom(xc, yc, a, b, theta)


def fit_ellipse_direct(pts) -> EllipseGeom:
    """Direct algebraic least-squares ellipse fit (stable split-matrix form)."""
    p = as_points2(pts)
    st, xc, yc, a, b, theta = _fit_ellipse_direct_core(
        np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1])
    )
    if st == 1:
        raise DegenerateInput(f"cannot fit an ellipse to {len(p)} points (degenerate)")
    if st == 2:
        raise NotAnEllipse("the fitted conic is not an ellipse")
    return EllipseGeom(xc, yc, a, b, theta)


def fit_ellipse_refined(
    pts,
    kind: DistanceKind = DistanceKind.CONFOCAL_HYPERBOLA,
    max_iter: int = REFINE_MAX_ITER,
    rel_tol: float = REFINE_REL_TOL,
) -> EllipseGeom:
    """Direct fit followed by damped Gauss-Newton distance minimization."""
    p = as_points2(pts)
    init = fit_ellipse_direct(p)
    params, _, _, converged = _refine_ellipse_core(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        init.params(),
        kind.value,
        max_iter,
        rel_tol,
    )
    if not converged:
        warnings.warn(
            "ellipse refinement hit the iteration cap; returning best iterate",
            RuntimeWarning,
            stacklevel=2,
        )
    return EllipseGeom(params[0], params[1], params[2], params[3], params[4])


def point_ellipse_distance(p, e: EllipseGeom, kind: DistanceKind) -> float:
    x, y = float(p[0]), float(p[1])
    d = _ellipse_distances(
        np.array([x]), np.array([y]), e.xc, e.yc, e.a, e.b, e.theta, kind.value, False
    )
    return float(d[0])


def ellipse_distances(
    pts, e: EllipseGeom, kind: DistanceKind, signed: bool = False
) -> np.ndarray:
    """Vectorized point-to-ellipse distances (negative inside when signed)."""
    p = as_points2(pts)
    return _ellipse_distances(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        e.xc,
        e.yc,
        e.a,
        e.b,
        e.theta,
        kind.value,
        signed,
    )


def geometric_distance_oracle(p, e: EllipseGeom) -> float:
    return point_ellipse_distance(p, e, DistanceKind.GEOMETRIC_ORACLE)


def fit_circle_pratt(pts) -> CircleGeom:
    p = as_points2(pts)
    ok, cx, cy, r = _fit_circle_core(
        np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1]), False
    )
    if not ok:
        raise DegenerateInput("circle fit needs >= 3 non-collinear points")
    return CircleGeom(cx, cy, r)


def fit_circle_hyper(pts) -> CircleGeom:
    p = as_points2(pts)
    ok, cx, cy, r = _fit_circle_core(
        np.ascontiguousarray(p[:, 0]), np.ascontiguousarray(p[:, 1]), True
    )
    if not ok:
        raise DegenerateInput("circle fit needs >= 3 non-collinear points")
    return CircleGeom(cx, cy, r)


def ellipse_boundary(e: EllipseGeom, n: int = 360, t0: float = 0.0, t1: float = 2.0 * np.pi):
    """Sample n points on the ellipse over the parametric range [t0, t1)."""
    t = t0 + (t1 - t0) * np.arange(n) / n
    ct, st = math.cos(e.theta), math.sin(e.theta)
    u = e.a * np.cos(t)
    v = e.b * np.sin(t)
    return np.column_stack((e.xc + u * ct - v * st, e.yc + u * st + v * ct))
