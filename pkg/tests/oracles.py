"""Independent reference computations used to freeze or cross-check
expected values. Nothing here imports the package's geometry or daylight
internals: each oracle carries its own math.
"""

import math

import numpy as np


def rect_frame(origin, e1, e2):
    origin = np.asarray(origin, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    n = np.cross(e1, e2)
    n = n / np.linalg.norm(n)
    return origin, e1, e2, n


def _ray_hits_rect(p, dirs, frame):
    origin, e1, e2, n = frame
    denom = dirs @ n
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((origin - p) @ n) / denom
    hit = np.isfinite(t) & (t > 1e-9)
    x = p + t[:, None] * dirs
    l1 = float(e1 @ e1)
    l2 = float(e2 @ e2)
    s1 = (x - origin) @ e1 / l1
    s2 = (x - origin) @ e2 / l2
    hit &= (s1 >= 0.0) & (s1 <= 1.0) & (s2 >= 0.0) & (s2 <= 1.0)
    return hit, np.where(hit, t, np.inf)


def mc_sky_fractions(point, window_rect, obstruction_rects=(), n=1_200_000, seed=0):
    """Monte-Carlo estimate of the sky and externally-reflected fractions.

    Uniform solid-angle sampling of the sky hemisphere under the overcast
    luminance (1 + 2 sin g)/3; the same samples estimate the full-dome
    denominator, so the ratio converges fast. ``window_rect`` is
    (corner, edge1, edge2); obstructions add a luminance fraction each.
    """
    p = np.asarray(point, dtype=float)
    rng = np.random.default_rng(seed)
    sin_g = rng.uniform(0.0, 1.0, n)  # sin(elevation) is uniform over solid angle
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    cos_g = np.sqrt(1.0 - sin_g**2)
    dirs = np.column_stack((np.sin(phi) * cos_g, np.cos(phi) * cos_g, sin_g))
    weight = (1.0 + 2.0 * sin_g) / 3.0 * sin_g

    through, t_win = _ray_hits_rect(p, dirs, rect_frame(*window_rect))
    fraction = np.zeros(n)
    t_best = np.full(n, np.inf)
    for corner, e1, e2, frac in obstruction_rects:
        hit, t_o = _ray_hits_rect(p, dirs, rect_frame(corner, e1, e2))
        cand = hit & through & (t_o > t_win) & (t_o < t_best)
        fraction[cand] = frac
        t_best[cand] = t_o[cand]
    blocked = np.isfinite(t_best) & (t_best < np.inf)

    total = weight.sum()
    sc = float(weight[through & ~blocked].sum() / total)
    erc = float((weight * fraction)[through & blocked].sum() / total)
    return sc, erc


def _even_odd_mask(px, py, ring):
    inside = np.zeros(px.shape, dtype=bool)
    m = len(ring)
    for i in range(m):
        ax, ay = ring[i]
        bx, by = ring[(i + 1) % m]
        cond = (ay > py) != (by > py)
        if by != ay:
            xi = ax + (py - ay) * (bx - ax) / (by - ay)
            inside ^= cond & (px < xi)
    return inside


def rasterized_overlap_area(ring_a, ring_b, res=0.001):
    """Area of the intersection of two simple 2-D polygons by counting
    cell centers of a ``res``-sized raster inside both."""
    ring_a = np.asarray(ring_a, dtype=float)
    ring_b = np.asarray(ring_b, dtype=float)
    lo = np.maximum(ring_a.min(axis=0), ring_b.min(axis=0)) - res
    hi = np.minimum(ring_a.max(axis=0), ring_b.max(axis=0)) + res
    if np.any(hi <= lo):
        return 0.0
    xs = np.arange(lo[0] + res / 2.0, hi[0], res)
    ys = np.arange(lo[1] + res / 2.0, hi[1], res)
    if len(xs) == 0 or len(ys) == 0:
        return 0.0
    px, py = np.meshgrid(xs, ys)
    px = px.ravel()
    py = py.ravel()
    inside = _even_odd_mask(px, py, ring_a) & _even_odd_mask(px, py, ring_b)
    return float(inside.sum()) * res * res


def loop_metrics(sim, ref):
    """Spreadsheet-style plain-Python recomputation of every indicator."""
    n = len(sim)
    mean = sum(ref) / n
    sum_sq = sum((s - r) ** 2 for s, r in zip(sim, ref))
    rmsd = math.sqrt(sum_sq / n) / mean
    mbd = sum(s - r for s, r in zip(sim, ref)) / (n * mean) * 100.0
    denom = sum((r - mean) ** 2 for r in ref)
    r2_printed = sum_sq / denom
    eps = [(s - r) / abs(r) for s, r in zip(sim, ref) if r != 0.0]
    eps_mean = sum(eps) / len(eps)
    eps_mean_abs = sum(abs(e) for e in eps) / len(eps)
    return {
        "rmsd": rmsd,
        "mbd_pct": mbd,
        "r2_printed": r2_printed,
        "r2_standard": 1.0 - r2_printed,
        "eps_mean": eps_mean,
        "eps_mean_abs": eps_mean_abs,
        "n_excluded": n - len(eps),
    }
