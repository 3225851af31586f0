"""Robust Monte-Carlo ellipse fitting: polar-angle bucketed subsampling,
affine-to-circle inlier detection, candidate validation, and the
least-median-of-squares baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .ellipticity import ValidationConfig
from .geometry import (
    CHI2_95_2,
    CHI_GATE,
    MADN_SCALE,
    DegenerateInput,
    DistanceKind,
    EllipseGeom,
    NotAnEllipse,
    _dist_frame,
    _fit_circle_core,
    _fit_ellipse_direct_core,
    as_points2,
    ellipse_distances,
    fit_ellipse_direct,
    fit_ellipse_refined,
)

MAX_CONCENTRATION_ITER = 100
ZERO_OBJECTIVE = 1e-14
# median of |z| for a standard normal restricted to its central quarter,
# i.e. Phi^-1(0.5625); rescales the mode-anchored quarter-sample MAD to a
# normal sigma (the quarter keeps its breakdown above 75% contamination,
# mirroring the percentile argument used for LMedS beyond 50%)
QUARTER_MAD_SCALE = 0.15731068461017067


@dataclass(frozen=True)
class SamplingConfig:
    k: int = 6  # subsample size
    prob: float = 0.995  # target probability of one outlier-free subsample
    eps: float = 0.6  # assumed outlier ratio
    phi: float = np.pi  # arc angle k consecutive same-parity sections must span
    n_max: int = 30000  # cap on the number of subsamples

    def __post_init__(self):
        if self.k < 5:
            raise ValueError("k must be at least 5")
        if not 0.0 < self.prob < 1.0:
            raise ValueError("prob must lie in (0, 1)")
        if not 0.0 <= self.eps < 1.0:
            raise ValueError("eps must lie in [0, 1)")
        if not 0.0 < self.phi <= 2.0 * np.pi:
            raise ValueError("phi must lie in (0, 2*pi]")


@dataclass(frozen=True)
class ArcLayout:
    alpha_gap: float  # largest angular gap
    beta: float  # occupied arc angle, 2*pi - alpha_gap
    shift: float  # angle shifted to zero (the gap's ccw end)
    p: int  # section divisor; sections are 1 .. 2p
    section_of_point: np.ndarray  # per-point section index in [1, 2p]


@dataclass
class SubsampleCandidate:
    sample_indices: np.ndarray
    inliers: np.ndarray  # in_e
    rs: float
    xs: float
    ys: float
    ee: float
    fit: EllipseGeom | None
    valid: bool = True
    converged: bool = True

    @property
    def norm(self) -> float:
        return math.sqrt((self.rs - 1.0) ** 2 + self.xs**2 + self.ys**2)


@dataclass
class RobustResult:
    inliers: np.ndarray
    fit: EllipseGeom | None
    found: bool


# ---------------------------------------------------------------------------
# robust scale / location estimators
# ---------------------------------------------------------------------------


@njit(cache=True)
def _hsm_sorted(s):
    """Half-sample mode: repeatedly keep the shortest half of a sorted array."""
    n = s.size
    lo = 0
    length = n
    while length > 3:
        half = (length + 1) // 2
        best = np.inf
        besti = lo
        for i in range(lo, lo + length - half + 1):
            w = s[i + half - 1] - s[i]
            if w < best:
                best = w
                besti = i
        lo = besti
        length = half
    if length == 1:
        return s[lo]
    if length == 2:
        return 0.5 * (s[lo] + s[lo + 1])
    ind = -s[lo] + 2.0 * s[lo + 1] - s[lo + 2]
    if ind < 0.0:
        return 0.5 * (s[lo] + s[lo + 1])
    if ind > 0.0:
        return 0.5 * (s[lo + 1] + s[lo + 2])
    return s[lo + 1]


@njit(cache=True)
def _median_sorted(s):
    n = s.size
    if n % 2 == 1:
        return s[n // 2]
    return 0.5 * (s[n // 2 - 1] + s[n // 2])


@njit(cache=True)
def _mad_from_sorted(s, med):
    """Median of |s - med| for ascending s via an outward two-pointer merge."""
    n = s.size
    lo = 0
    hi = n
    while lo < hi:
        mid = (lo + hi) // 2
        if s[mid] < med:
            lo = mid + 1
        else:
            hi = mid
    i = lo - 1
    j = lo
    target = (n + 1) // 2  # count of elements up to the lower median
    prev = 0.0
    cur = 0.0
    count = 0
    limit = target + 1 if n % 2 == 0 else target
    while count < limit:
        left = med - s[i] if i >= 0 else np.inf
        right = s[j] - med if j < n else np.inf
        if left <= right:
            val = left
            i -= 1
        else:
            val = right
            j += 1
        prev = cur
        cur = val
        count += 1
    if n % 2 == 0:
        return 0.5 * (prev + cur)
    return cur


def mode_estimate(values) -> float:
    """Half-sample mode of a nonnegative sample."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("mode of an empty sample")
    return float(_hsm_sorted(np.sort(v)))


def madn(values) -> float:
    """Normalized median absolute deviation (consistent for a normal sigma)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("MADN of an empty sample")
    med = float(np.median(v))
    return float(np.median(np.abs(v - med))) / MADN_SCALE


# ---------------------------------------------------------------------------
# Eq. 1 sample count and the bucketed layout
# ---------------------------------------------------------------------------


def required_subsamples(
    prob: float, eps: float, k: int, n_max: int | None = None, even: bool = True
) -> int:
    """Minimum subsample count for one outlier-free draw, evened for the
    odd/even section split and capped at n_max."""
    if not 0.0 < prob < 1.0 or not 0.0 <= eps < 1.0 or k < 1:
        raise ValueError("invalid sampling parameters")
    if eps == 0.0:
        raw = 1
    else:
        w = (1.0 - eps) ** k
        raw = int(math.ceil(math.log(1.0 - prob) / math.log(1.0 - w)))
        raw = max(raw, 1)
    if not even:
        return raw
    n = 2 * int(math.ceil(raw / 2.0))
    if n_max is not None:
        n = min(n, 2 * (n_max // 2))
    return n


@njit(cache=True)
def _unit_frame_transform(x, y, xc, yc, a, b, theta, px, py):
    ct = math.cos(theta)
    st = math.sin(theta)
    for i in range(x.size):
        dx = x[i] - xc
        dy = y[i] - yc
        px[i] = (dx * ct + dy * st) / a
        py[i] = (-dx * st + dy * ct) / b


@njit(cache=True)
def _occupied_arc(px, py):
    """(beta, alpha_gap, shift): the largest angular gap, wrap-around included."""
    n = px.size
    ang = np.empty(n)
    for i in range(n):
        t = math.atan2(py[i], px[i])
        if t < 0.0:
            t += 2.0 * np.pi
        ang[i] = t
    s = np.sort(ang)
    gap = 2.0 * np.pi - s[n - 1] + s[0]
    shift = s[0]
    for i in range(1, n):
        g = s[i] - s[i - 1]
        if g > gap:
            gap = g
            shift = s[i]
    return 2.0 * np.pi - gap, gap, shift


def occupied_arc_angle(pts, e: EllipseGeom) -> float:
    """Arc angle covered by the points in the ellipse's unit-circle frame."""
    p = as_points2(pts)
    if len(p) < 2:
        return 0.0
    px = np.empty(len(p))
    py = np.empty(len(p))
    _unit_frame_transform(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        e.xc,
        e.yc,
        e.a,
        e.b,
        e.theta,
        px,
        py,
    )
    beta, _, _ = _occupied_arc(px, py)
    return float(beta)


def build_arc_layout(pts, e: EllipseGeom, cfg: SamplingConfig) -> ArcLayout:
    """Polar-angle bucketing of the points in the unit-circle frame."""
    p = as_points2(pts)
    n = len(p)
    if n < cfg.k:
        raise DegenerateInput(f"need at least k={cfg.k} points, got {n}")
    if not (np.isfinite(e.a) and np.isfinite(e.b) and e.b > 0):
        raise DegenerateInput("layout requires a valid ellipse")
    px = np.empty(n)
    py = np.empty(n)
    _unit_frame_transform(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        e.xc,
        e.yc,
        e.a,
        e.b,
        e.theta,
        px,
        py,
    )
    beta, alpha, shift = _occupied_arc(px, py)
    phi = min(cfg.phi, beta) if beta > 0 else cfg.phi
    if beta > 0 and phi > 0:
        p_div = int(math.ceil(cfg.k * beta / phi))
    else:
        p_div = cfg.k
    p_div = max(p_div, cfg.k)
    ang = np.arctan2(py, px)
    ang = np.where(ang < 0, ang + 2 * np.pi, ang)
    shifted = (ang - shift) % (2 * np.pi)
    width = max(beta, 1e-12) / (2 * p_div)
    section = np.clip(np.floor(shifted / width).astype(np.int64) + 1, 1, 2 * p_div)
    return ArcLayout(float(alpha), float(beta), float(shift), p_div, section)


class InsufficientSections(RuntimeError):
    """Fewer than k non-empty sections in both parity classes."""


def moment_ellipse(pts) -> EllipseGeom:
    """Second-moment (covariance) ellipse of a point set.

    Exact for uniform samples of a full ellipse and stable on concentric
    outlier scenes, which makes it the bucketing reference: least-squares
    ellipse fits can drift arbitrarily on outlier-dominated segments, and the
    polar-angle layout only needs a sane center and orientation.
    """
    p = as_points2(pts)
    if len(p) < 3:
        raise DegenerateInput("need at least 3 points")
    mu = p.mean(axis=0)
    d = p - mu
    cov = d.T @ d / (len(p) - 1)
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] <= 1e-14 * max(evals[1], 1e-300):
        raise DegenerateInput("points are collinear")
    a = math.sqrt(2.0 * evals[1])
    b = math.sqrt(2.0 * evals[0])
    theta = math.atan2(evecs[1, 1], evecs[0, 1]) % np.pi
    return EllipseGeom(float(mu[0]), float(mu[1]), a, b, theta)


def _draw_from_parity(rng, members, counts, offsets, nonempty, k, n_draws):
    """Subsamples from one parity class: k distinct sections, one point each."""
    m = nonempty.size
    secs = np.argsort(rng.random((n_draws, m)), axis=1)[:, :k]
    chosen = nonempty[secs]  # (n_draws, k) section ids
    cnt = counts[chosen]
    pick = (rng.random((n_draws, k)) * cnt).astype(np.int64)
    pick = np.minimum(pick, cnt - 1)
    return members[offsets[chosen] + pick]


def draw_subsamples(layout: ArcLayout, cfg: SamplingConfig, seed) -> np.ndarray:
    """N subsamples of k point indices, half from odd and half from even
    sections; no two chosen sections are adjacent by construction."""
    rng = np.random.default_rng(seed)
    n_total = required_subsamples(cfg.prob, cfg.eps, cfg.k, cfg.n_max)
    half = n_total // 2
    sections = layout.section_of_point
    order = np.argsort(sections, kind="stable")
    members = order
    sec_sorted = sections[order]
    counts = np.zeros(2 * layout.p + 1, dtype=np.int64)
    np.add.at(counts, sections, 1)
    offsets = np.zeros_like(counts)
    offsets[1:] = np.cumsum(counts)[:-1]
    # members[offsets[s]:offsets[s]+counts[s]] are the points of section s
    del sec_sorted
    out = []
    for parity in (1, 0):  # odd sections first, then even
        ids = np.arange(1, 2 * layout.p + 1)
        ids = ids[ids % 2 == parity]
        nonempty = ids[counts[ids] > 0]
        if nonempty.size < cfg.k:
            continue
        out.append(
            _draw_from_parity(rng, members, counts, offsets, nonempty, cfg.k, half)
        )
    if not out:
        return np.empty((0, cfg.k), dtype=np.int64)
    return np.concatenate(out, axis=0)


# ---------------------------------------------------------------------------
# Algorithm 2: concentration-based inlier detection
# ---------------------------------------------------------------------------


@njit(cache=True)
def _concentrate(px, py, is_sample, require_sample, chi_gate, max_iter):
    """Mode-anchored concentration on squared center distances.

    The working set shrinks: each round gates the current set's d^2 around
    its half-sample mode, then recenters with a Pratt fit. The scale is a
    MAD over the quarter-sample nearest the mode (rescaled to a normal
    sigma); a plain MADN over the whole set breaks down above 50% outliers
    and the loop stalls. With require_sample, the subsample points must
    stay in the working set (the transformed final set of a useful
    candidate contains its own samples), which rejects hopeless candidates
    without running them to convergence.
    Returns (status, mask, rs, xs, ys, converged); status 0 ok,
    1 degenerate, 2 sample dropped.
    """
    n = px.size
    idx = np.arange(n)
    cx = 0.0
    cy = 0.0
    mask = np.zeros(n, dtype=np.bool_)
    converged = False
    for _ in range(max_iter):
        m = idx.size
        if m < 3:
            return 1, mask, 0.0, 0.0, 0.0, False
        d2 = np.empty(m)
        for t in range(m):
            i = idx[t]
            d2[t] = (px[i] - cx) ** 2 + (py[i] - cy) ** 2
        s = np.sort(d2)
        mod = _hsm_sorted(s)
        # scale from the quarter-sample nearest the mode
        r = np.abs(d2 - mod)
        h = min(max((m + 3) // 4, 3), m)
        rad = np.partition(r, h - 1)[h - 1]
        hv = np.empty(h)
        t = 0
        for q in range(m):
            if r[q] <= rad and t < h:
                hv[t] = d2[q]
                t += 1
        med_h = np.median(hv[:t])
        scale = np.median(np.abs(hv[:t] - med_h)) / QUARTER_MAD_SCALE
        floor = 1e-12 * (abs(mod) + 1e-12)
        if scale < floor:
            scale = floor
        gate = chi_gate * scale
        keep = np.empty(m, dtype=np.int64)
        k = 0
        kept_samples = 0
        for t in range(m):
            if abs(d2[t] - mod) <= gate:
                keep[k] = idx[t]
                k += 1
                if is_sample[idx[t]]:
                    kept_samples += 1
        if require_sample and kept_samples < np.sum(is_sample):
            return 2, mask, 0.0, 0.0, 0.0, False
        if k < 3:
            return 1, mask, 0.0, 0.0, 0.0, False
        new_idx = keep[:k]
        if k == m:
            idx = new_idx
            converged = True
            break
        # recenter on the new set with a Pratt fit
        gx = np.empty(k)
        gy = np.empty(k)
        for t in range(k):
            gx[t] = px[new_idx[t]]
            gy[t] = py[new_idx[t]]
        ok, pcx, pcy, pr = _fit_circle_core(gx, gy, False)
        if not ok:
            return 1, mask, 0.0, 0.0, 0.0, False
        cx = pcx
        cy = pcy
        idx = new_idx
        obj = 0.0
        for t in range(k):
            obj += (math.hypot(gx[t] - cx, gy[t] - cy) - pr) ** 2
        if obj / k < ZERO_OBJECTIVE:
            converged = True
            break
    # hyper-accurate fit of the final set
    m = idx.size
    gx = np.empty(m)
    gy = np.empty(m)
    for t in range(m):
        gx[t] = px[idx[t]]
        gy[t] = py[idx[t]]
    ok, hx, hy, hr = _fit_circle_core(gx, gy, True)
    if not ok:
        return 1, mask, 0.0, 0.0, 0.0, False
    for t in range(m):
        mask[idx[t]] = True
    return 0, mask, hr, hx, hy, converged


@njit(cache=True)
def _signed_confocal(x, y, xc, yc, a, b, theta, out):
    ct = math.cos(theta)
    st = math.sin(theta)
    for i in range(x.size):
        dx = x[i] - xc
        dy = y[i] - yc
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        d = _dist_frame(u, v, a, b, 2)
        if (u / a) ** 2 + (v / b) ** 2 < 1.0:
            d = -d
        out[i] = d


@njit(cache=True)
def _detect_inliers_core(x, y, sample, chi_gate, max_iter, early_reject):
    """Full Algorithm-2 evaluation of one subsample.

    Returns (status, in_mask, rs, xs, ys, ee, fit_params, converged) with
    status: 0 ok, 1 sample fit failed, 2 degenerate intermediate state,
    3 rejected early because a sample point fails the residual gate
    (only when early_reject is set).
    """
    n = x.size
    k = sample.size
    fitp = np.zeros(5)
    in_mask = np.zeros(n, dtype=np.bool_)
    sx = np.empty(k)
    sy = np.empty(k)
    for i in range(k):
        sx[i] = x[sample[i]]
        sy[i] = y[sample[i]]
    st0, exc, eyc, ea, eb, eth = _fit_ellipse_direct_core(sx, sy)
    if st0 != 0:
        return 1, in_mask, 0.0, 0.0, 0.0, 0.0, fitp, False
    px = np.empty(n)
    py = np.empty(n)
    _unit_frame_transform(x, y, exc, eyc, ea, eb, eth, px, py)
    is_sample = np.zeros(n, dtype=np.bool_)
    for i in range(k):
        is_sample[sample[i]] = True
    cst, conc_mask, rs, xs_, ys_, converged = _concentrate(
        px, py, is_sample, early_reject, chi_gate, max_iter
    )
    if cst == 2:
        return 3, in_mask, 0.0, 0.0, 0.0, 0.0, fitp, converged
    if cst != 0:
        return 2, in_mask, 0.0, 0.0, 0.0, 0.0, fitp, converged
    m = int(np.sum(conc_mask))
    gx = np.empty(m)
    gy = np.empty(m)
    t = 0
    for i in range(n):
        if conc_mask[i]:
            gx[t] = x[i]
            gy[t] = y[i]
            t += 1
    st1, fxc, fyc, fa, fb, fth = _fit_ellipse_direct_core(gx, gy)
    if st1 != 0:
        return 2, in_mask, rs, xs_, ys_, 0.0, fitp, converged
    res_conc = np.empty(m)
    _signed_confocal(gx, gy, fxc, fyc, fa, fb, fth, res_conc)
    mean_r = 0.0
    for i in range(m):
        mean_r += res_conc[i]
    mean_r /= m
    var = 0.0
    for i in range(m):
        var += (res_conc[i] - mean_r) ** 2
    sigma_f = math.sqrt(var / (m - 1)) if m > 1 else 0.0
    if sigma_f < 1e-12 * fb:
        sigma_f = 1e-12 * fb
    gate = chi_gate * sigma_f
    if early_reject:
        sres = np.empty(k)
        _signed_confocal(sx, sy, fxc, fyc, fa, fb, fth, sres)
        for i in range(k):
            if abs(sres[i]) > gate:
                return 3, in_mask, rs, xs_, ys_, 0.0, fitp, converged
    res_all = np.empty(n)
    _signed_confocal(x, y, fxc, fyc, fa, fb, fth, res_all)
    cnt = 0
    for i in range(n):
        if abs(res_all[i]) <= gate:
            in_mask[i] = True
            cnt += 1
    if cnt < 5:
        return 2, in_mask, rs, xs_, ys_, 0.0, fitp, converged
    ix = np.empty(cnt)
    iy = np.empty(cnt)
    t = 0
    for i in range(n):
        if in_mask[i]:
            ix[t] = x[i]
            iy[t] = y[i]
            t += 1
    st2, gxc, gyc, ga, gb, gth = _fit_ellipse_direct_core(ix, iy)
    if st2 != 0:
        return 2, in_mask, rs, xs_, ys_, 0.0, fitp, converged
    fitp[0] = gxc
    fitp[1] = gyc
    fitp[2] = ga
    fitp[3] = gb
    fitp[4] = gth
    # Euclidean ellipticity of in_e against its own fit
    qx = np.empty(cnt)
    qy = np.empty(cnt)
    _unit_frame_transform(ix, iy, gxc, gyc, ga, gb, gth, qx, qy)
    beta, _, _ = _occupied_arc(qx, qy)
    dres = np.empty(cnt)
    _signed_confocal(ix, iy, gxc, gyc, ga, gb, gth, dres)
    ss = 0.0
    for i in range(cnt):
        ss += dres[i] * dres[i]
    sigma_e = math.sqrt(ss / cnt)
    area = (beta / (2.0 * np.pi)) * np.pi * ga * gb
    if area <= 0.0:
        return 2, in_mask, rs, xs_, ys_, 0.0, fitp, converged
    ee = 1.0 / (1.0 + sigma_e / math.sqrt(area))
    return 0, in_mask, rs, xs_, ys_, ee, fitp, converged


@njit(cache=True)
def _scan_candidates(x, y, samples, chi_gate, max_iter, th_e):
    """Evaluate all subsamples, returning the per-candidate survival data.

    Candidates failing the sample-coverage gate (Algorithm 3 step 1) skip
    the full inlier pass; they can never be selected.
    """
    ns = samples.shape[0]
    ok = np.zeros(ns, dtype=np.bool_)
    norm = np.full(ns, np.inf)
    ee = np.zeros(ns)
    n_in = np.zeros(ns, dtype=np.int64)
    for s in range(ns):
        status, mask, rs, xs_, ys_, e_val, _, _ = _detect_inliers_core(
            x, y, samples[s], chi_gate, max_iter, True
        )
        if status != 0:
            continue
        ee[s] = e_val
        n_in[s] = np.sum(mask)
        if e_val > th_e:
            ok[s] = True
            norm[s] = math.sqrt((rs - 1.0) ** 2 + xs_ * xs_ + ys_ * ys_)
    return ok, norm, ee, n_in


def detect_inliers(pts, sample) -> SubsampleCandidate:
    """Algorithm-2 inlier detection for one k-point subsample."""
    p = as_points2(pts)
    sample = np.asarray(sample, dtype=np.int64).ravel()
    status, in_mask, rs, xs, ys, ee, fitp, converged = _detect_inliers_core(
        np.ascontiguousarray(p[:, 0]),
        np.ascontiguousarray(p[:, 1]),
        sample,
        CHI_GATE,
        MAX_CONCENTRATION_ITER,
        False,
    )
    inliers = np.flatnonzero(in_mask)
    fit = None
    if status == 0:
        fit = EllipseGeom(fitp[0], fitp[1], fitp[2], fitp[3], fitp[4])
    return SubsampleCandidate(
        sample_indices=sample,
        inliers=inliers,
        rs=float(rs),
        xs=float(xs),
        ys=float(ys),
        ee=float(ee),
        fit=fit,
        valid=status == 0,
        converged=bool(converged),
    )


def select_best(
    cands: list[SubsampleCandidate], cfg: ValidationConfig
) -> RobustResult:
    """Algorithm 3: sample-coverage filter, ellipticity filter, then the
    candidate whose transformed circle is closest to (1, 0, 0)."""
    best = None
    best_norm = np.inf
    for cand in cands:
        if not cand.valid or cand.fit is None:
            continue
        if cand.inliers.size == 0:
            continue
        if not np.all(np.isin(cand.sample_indices, cand.inliers)):
            continue
        if not cand.ee > cfg.th_e:
            continue
        if cand.norm < best_norm:
            best = cand
            best_norm = cand.norm
    if best is None:
        return RobustResult(np.empty(0, dtype=np.int64), None, False)
    return RobustResult(best.inliers.copy(), best.fit, True)


def robust_ellipse_fit(
    pts,
    cfg: SamplingConfig = SamplingConfig(),
    vcfg: ValidationConfig = ValidationConfig(),
    seed=0,
) -> RobustResult:
    """Bucketed Monte-Carlo robust ellipse fit (Algorithms 1-3)."""
    p = as_points2(pts)
    if len(p) < max(cfg.k, 10):
        raise DegenerateInput(f"need at least {max(cfg.k, 10)} points")
    not_found = RobustResult(np.empty(0, dtype=np.int64), None, False)
    try:
        layout_fit = moment_ellipse(p)
    except DegenerateInput:
        return not_found
    layout = build_arc_layout(p, layout_fit, cfg)
    samples = draw_subsamples(layout, cfg, seed)
    if samples.shape[0] == 0:
        return not_found
    x = np.ascontiguousarray(p[:, 0])
    y = np.ascontiguousarray(p[:, 1])
    ok, norm, _, _ = _scan_candidates(
        x, y, samples, CHI_GATE, MAX_CONCENTRATION_ITER, vcfg.th_e
    )
    if not np.any(ok):
        return not_found
    winner = int(np.argmin(norm))  # ties resolve to the lowest index
    cand = detect_inliers(p, samples[winner])
    if not cand.valid or cand.inliers.size < 5:
        return not_found
    fit = fit_ellipse_refined(p[cand.inliers])
    return RobustResult(cand.inliers, fit, True)


# ---------------------------------------------------------------------------
# LMedS baseline
# ---------------------------------------------------------------------------


@njit(cache=True)
def _lmeds_scan(x, y, samples):
    """Median squared confocal distance per subsample; returns the argmin."""
    ns = samples.shape[0]
    n = x.size
    best = np.inf
    besti = -1
    d = np.empty(n)
    k = samples.shape[1]
    sx = np.empty(k)
    sy = np.empty(k)
    for s in range(ns):
        for i in range(k):
            sx[i] = x[samples[s, i]]
            sy[i] = y[samples[s, i]]
        st0, exc, eyc, ea, eb, eth = _fit_ellipse_direct_core(sx, sy)
        if st0 != 0:
            continue
        ct = math.cos(eth)
        stq = math.sin(eth)
        for i in range(n):
            dx = x[i] - exc
            dy = y[i] - eyc
            u = dx * ct + dy * stq
            v = -dx * stq + dy * ct
            dd = _dist_frame(u, v, ea, eb, 2)
            d[i] = dd * dd
        med = np.median(d)
        if med < best:
            best = med
            besti = s
    return besti, best


def _uniform_subsets(rng, n, count, k):
    """count subsets of k distinct indices from range(n)."""
    out = rng.integers(0, n, size=(count, k))
    for _ in range(64):
        bad = np.array([len(set(row)) != k for row in out])
        if not bad.any():
            break
        out[bad] = rng.integers(0, n, size=(int(bad.sum()), k))
    return out


def lmeds_fit(
    pts,
    sampling: str = "bucketed",
    cfg: SamplingConfig = SamplingConfig(),
    sigma_rule: str = "zhang",
    seed=0,
) -> RobustResult:
    """Least-median-of-squares ellipse fit with Eq. 2/3 inlier classification.

    sampling: "bucketed" (Algorithm 1) or "random" (uniform k-subsets).
    sigma_rule: "zhang" (default) or "rosin" (as printed in the source;
    experimental, see the ambiguity note in the docs).
    """
    p = as_points2(pts)
    n = len(p)
    if n < max(cfg.k, 10):
        raise DegenerateInput(f"need at least {max(cfg.k, 10)} points")
    not_found = RobustResult(np.empty(0, dtype=np.int64), None, False)
    rng = np.random.default_rng(seed)
    if sampling == "bucketed":
        try:
            layout_fit = moment_ellipse(p)
        except DegenerateInput:
            return not_found
        layout = build_arc_layout(p, layout_fit, cfg)
        samples = draw_subsamples(layout, cfg, seed)
    elif sampling == "random":
        count = required_subsamples(cfg.prob, cfg.eps, cfg.k, cfg.n_max)
        samples = _uniform_subsets(rng, n, count, cfg.k)
    else:
        raise ValueError(f"unknown sampling mode {sampling!r}")
    if samples.shape[0] == 0:
        return not_found
    x = np.ascontiguousarray(p[:, 0])
    y = np.ascontiguousarray(p[:, 1])
    besti, best_med = _lmeds_scan(x, y, samples)
    if besti < 0:
        return not_found
    best_fit = fit_ellipse_direct(p[samples[besti]])
    d = ellipse_distances(p, best_fit, DistanceKind.CONFOCAL_HYPERBOLA)
    if sigma_rule == "zhang":
        sigma = 1.4826 * (1.0 + 5.0 / (n - cfg.k)) * math.sqrt(best_med)
    elif sigma_rule == "rosin":
        # as printed: a MAD-to-RMS-median ratio; dimensionless, experimental
        med_d = float(np.median(d))
        cr = float(np.median(np.abs(d - med_d))) / math.sqrt(best_med)
        sigma = 1.4826 * (1.0 + 5.0 / (n - 1)) * cr
    else:
        raise ValueError(f"unknown sigma rule {sigma_rule!r}")
    inliers = np.flatnonzero(d * d < CHI2_95_2 * sigma * sigma)
    if inliers.size < 5:
        return not_found
    fit = fit_ellipse_refined(p[inliers])
    return RobustResult(inliers, fit, True)
