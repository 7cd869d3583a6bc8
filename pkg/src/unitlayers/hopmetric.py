"""Graph distance in the unit distance graph of a layer.

``rho(a, b)`` is the least number of unit l_p hops from ``a`` to ``b`` that
stay inside the layer.  Lower bounds are always certified; upper bounds only
come from witness paths that pass :func:`validate_witness`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq, least_squares

from .layer_core import (
    DEFAULT_TOL,
    LayerPoint,
    LayerSpec,
    Tolerance,
    _equidistant_on_ray,
    chain_points,
    in_layer,
    lp_dist,
    lp_norm,
)

__all__ = [
    "ConstructionError",
    "HopConfig",
    "HopInterval",
    "WitnessPath",
    "default_far_threshold",
    "validate_witness",
    "hop_lower_bound",
    "projection_lower_bound",
    "far_witness_path",
    "two_hop_decision",
    "two_hop_witness",
    "near_search",
    "hop_distance",
]

# Vertical swing of one zigzag hop in a strip, capped so hops stay far from vertical.
_ZIGZAG_MAX_AMPLITUDE = 0.8


class ConstructionError(RuntimeError):
    """A witness construction failed (usually: the pair is not far enough)."""


def _zigzag_amplitude(spec: LayerSpec) -> float:
    return min(spec.eps, _ZIGZAG_MAX_AMPLITUDE)


def _zigzag_hops(spec: LayerSpec) -> int:
    """Number of zigzag hops that can absorb up to one unit of slack."""
    A = _zigzag_amplitude(spec)
    waste = 1.0 - (1.0 - A ** spec.p) ** (1.0 / spec.p)
    return int(math.ceil(2.0 + 1.5 / waste)) + 1


def default_far_threshold(spec: LayerSpec) -> float:
    """Distance beyond which ``rho = ceil(dist)`` is constructed for every pair.

    For ``n >= 2`` this is ``10 eps + 12``.  Thin strips (``n = 1``) need a
    longer zigzag to lose a unit of length, so the threshold is raised to the
    zigzag length when that is larger.
    """
    base = 10.0 * spec.eps + 12.0
    if spec.n == 1:
        base = max(base, float(_zigzag_hops(spec)))
    return base


@dataclass(frozen=True)
class HopConfig:
    """Knobs for hop-distance computations.

    ``far_threshold=None`` means :func:`default_far_threshold`.
    ``near_budget`` is the largest hop count tried by the near search.
    """

    far_threshold: Optional[float] = None
    near_budget: int = 8
    restarts: int = 32
    seed: int = 0
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        if self.near_budget < 2:
            raise ValueError("near_budget must be at least 2")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.far_threshold is not None and not self.far_threshold > 0:
            raise ValueError("far_threshold must be positive")

    def threshold(self, spec: LayerSpec) -> float:
        if self.far_threshold is None:
            return default_far_threshold(spec)
        if spec.n == 1 and self.far_threshold < 10.0 * spec.eps + 10.0:
            raise ValueError(
                f"far_threshold {self.far_threshold} below 10*eps + 10 for a strip")
        return float(self.far_threshold)


@dataclass(frozen=True)
class WitnessPath:
    """Sequence of layer points; consecutive points should be at unit distance."""

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))

    @property
    def edges(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)

    def coords(self) -> np.ndarray:
        return np.array([v.coords for v in self.vertices])


def validate_witness(path: WitnessPath, spec: LayerSpec, tol: Tolerance = DEFAULT_TOL,
                     start=None, end=None) -> bool:
    """Every vertex in the layer, every hop of length 1 within ``tol.abs_tol``."""
    if len(path.vertices) == 0:
        return False
    for v in path.vertices:
        if not in_layer(v, spec, tol):
            return False
    for u, v in zip(path.vertices, path.vertices[1:]):
        if not tol.is_unit(lp_dist(u, v, spec)):
            return False
    if start is not None and lp_dist(path.vertices[0], start, spec) > tol.abs_tol:
        return False
    if end is not None and lp_dist(path.vertices[-1], end, spec) > tol.abs_tol:
        return False
    return True


@dataclass(frozen=True)
class HopInterval:
    """Certified bounds on ``rho``; ``upper=None`` means no witness was found."""

    lower: int
    upper: Optional[int]
    exact: bool
    witness: Optional[WitnessPath] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower bound must be nonnegative")
        if self.upper is not None and self.upper < self.lower:
            raise ValueError(f"upper {self.upper} below lower {self.lower}")
        if self.exact and self.upper != self.lower:
            raise ValueError("exact interval needs lower == upper")


def _integer_near(d: float, tol: Tolerance) -> Optional[int]:
    k = round(d)
    return int(k) if abs(d - k) < tol.abs_tol else None


def hop_lower_bound(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                    tol: Tolerance = DEFAULT_TOL) -> int:
    """``ceil(||a - b||_p)``: every hop covers at most unit length."""
    d = lp_dist(a, b, spec)
    k = _integer_near(d, tol)
    return k if k is not None else int(math.ceil(d))


def _reachable_horizontal(x: float, k: int, s: float, slack: float) -> bool:
    # k hop lengths in +-[s, 1]; with j negative ones the sum covers [(k-j)s - j, (k-j) - js]
    for j in range(k + 1):
        lo = (k - j) * s - j
        hi = (k - j) - j * s
        if lo - slack <= x <= hi + slack:
            return True
    return False


def projection_lower_bound(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                           tol: Tolerance = DEFAULT_TOL, limit: int = 10_000) -> int:
    """Lower bound on ``rho`` for ``n = 1`` using the horizontal component of each hop.

    A unit hop changes the vertical coordinates by at most ``eps * m^(1/p)``,
    so its horizontal part has length at least ``s = (1 - (eps m^(1/p))^p)^(1/p)``.
    The horizontal offset of ``a`` and ``b`` must be a signed sum of ``k``
    numbers from ``[s, 1]``; the smallest such ``k`` (at least ``ceil(dist)``)
    is returned.  For ``n >= 2`` this is just :func:`hop_lower_bound`.
    """
    base = hop_lower_bound(a, b, spec, tol)
    d = lp_dist(a, b, spec)
    if d <= tol.abs_tol:
        return 0
    if base == 1 and _integer_near(d, tol) is None:
        base = 2
    if spec.n != 1:
        return base
    vmax = spec.eps * float(spec.m) ** (1.0 / spec.p)
    if vmax >= 1.0:
        return base
    s = (1.0 - vmax ** spec.p) ** (1.0 / spec.p)
    x = abs(float(a.h[0] - b.h[0]))
    slack = 1e-12 * max(1.0, x) + 1e-12
    for k in range(max(base, 1), limit):
        if _reachable_horizontal(x, k, s, slack):
            return k
    return limit


def _unit_dir(v: np.ndarray, p: float) -> np.ndarray:
    return v / lp_norm(v, p)


def _sphere_path(a: LayerPoint, b: LayerPoint, spec: LayerSpec) -> list:
    """``ceil(d)`` hops for ``n >= 2``: one hop to a point at integer distance from ``b``.

    The unit sphere around ``a`` inside the layer is connected.  A curve on it
    runs from the point on ``[a, b]`` (distance ``floor(d) - 1 + frac < floor(d)``
    from ``b``) to a horizontal point pointing away from ``b`` (distance above
    ``d``).  The intermediate value theorem gives a point at distance exactly
    ``floor(d)``, after which a straight chain finishes the path.
    """
    p, n = spec.p, spec.n
    ca, cb = a.coords, b.coords
    d = lp_norm(cb - ca, p)
    m_int = int(math.floor(d))
    diff = cb - ca
    h = np.concatenate([diff[:n], np.zeros(spec.m)])
    if lp_norm(h, p) < 1.0:
        raise ConstructionError("horizontal offset shorter than one hop")
    e = h / np.linalg.norm(h)
    j = int(np.argmin(np.abs(e[:n])))
    w = -e[j] * e
    w[j] += 1.0
    w /= np.linalg.norm(w)

    def curve(s: float) -> np.ndarray:
        if s <= 1.0:
            vec = (1.0 - s) * diff + s * h
        else:
            theta = (s - 1.0) * math.pi
            vec = math.cos(theta) * e + math.sin(theta) * w
        return ca + _unit_dir(vec, p)

    def g(s: float) -> float:
        return lp_norm(curve(s) - cb, p) - m_int

    grid = np.linspace(0.0, 2.0, 129)
    prev = grid[0]
    gprev = g(prev)
    if gprev >= 0:
        raise ConstructionError("start of sphere curve is not inside the target ball")
    for s in grid[1:]:
        gs = g(s)
        if gs >= 0:
            root = brentq(g, prev, s, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            break
        prev, gprev = s, gs
    else:
        raise ConstructionError("sphere curve never leaves the target ball")
    x3 = LayerPoint.split(curve(root), n)
    if m_int == 0:
        return [a, x3]
    chain = chain_points(x3, b, m_int, spec, Tolerance(abs_tol=1e-8))
    return [a] + chain


def _zigzag_path(a: LayerPoint, b: LayerPoint, k: int, spec: LayerSpec) -> list:
    """``k = ceil(d)`` hops for ``n = 1`` by a shooting zigzag.

    A straight prefix along ``[a, b]`` is followed by a zigzag whose interior
    vertices alternate between a low and a high level in the first vertical
    coordinate.  A blend factor ``lam`` moves the levels from the segment
    itself (``lam = 0``, no slack lost) to the full swing (``lam = 1``); every
    vertex is the forward unit hop onto its level curve, and ``lam`` is tuned
    so the last vertex sits at unit distance from ``b``.
    """
    p, eps = spec.p, spec.eps
    ca, cb = a.coords.copy(), b.coords.copy()
    sgn = 1.0 if cb[0] >= ca[0] else -1.0
    ca[0] *= sgn
    cb[0] *= sgn
    d = lp_norm(cb - ca, p)
    Z = min(k, _zigzag_hops(spec))
    s1 = k - Z
    prefix = [ca + (i / d) * (cb - ca) for i in range(s1 + 1)]
    start = prefix[-1]
    sx, bx = start[0], cb[0]
    sv, bv = start[1:], cb[1:]
    span = bx - sx
    if span <= 0:
        raise ConstructionError("degenerate horizontal span")
    A = _zigzag_amplitude(spec)

    if spec.m == 1:
        # scalar fast path: the strip case dominates the cost of far-pair checks
        sv0, bv0 = float(sv[0]), float(bv[0])
        inv_p = 1.0 / p
        lo_c, hi_c = 0.5 * A, eps - 0.5 * A

        slope = (bv0 - sv0) / span

        guess = {}

        def hop(px: float, py: float, i: int, lam: float):
            shift = 0.5 * A if i % 2 else -0.5 * A

            def f(x):
                # value and derivative of the unit-hop residual along the level curve
                t = (x - sx) / span
                if t <= 0.0:
                    base, dbase = sv0, 0.0
                elif t >= 1.0:
                    base, dbase = bv0, 0.0
                else:
                    base, dbase = sv0 + t * (bv0 - sv0), slope
                if base < lo_c:
                    c, dc = lo_c, 0.0
                elif base > hi_c:
                    c, dc = hi_c, 0.0
                else:
                    c, dc = base, dbase
                y = (1.0 - lam) * base + lam * (c + shift)
                dy = (1.0 - lam) * dbase + lam * dc
                dx, dv = x - px, y - py
                if dx == 0.0 and dv == 0.0:
                    return -1.0, 1.0, y
                if p == 2.0:
                    nrm = math.hypot(dx, dv)
                    return nrm - 1.0, (dx + dv * dy) / nrm, y
                nrm = (abs(dx) ** p + abs(dv) ** p) ** inv_p
                g = (math.copysign(abs(dx) ** (p - 1.0), dx)
                     + math.copysign(abs(dv) ** (p - 1.0), dv) * dy) / nrm ** (p - 1.0)
                return nrm - 1.0, g, y

            lo, hi = px, px + 1.0
            if f(lo)[0] >= 0:
                raise ConstructionError("zigzag level too steep for a unit hop")
            # warm start from the same hop of the previous shot
            x = px + guess.get(i, 0.9)
            if not (lo < x < hi):
                x = px + 0.9
            y = py
            for _ in range(100):
                val, der, y = f(x)
                if abs(val) < 1e-15:
                    break
                if val < 0:
                    lo = x
                else:
                    hi = x
                step = val / der if der > 0 else math.inf
                if abs(step) <= 4e-16 * max(1.0, abs(x)):
                    # below the float spacing of x
                    break
                x_new = x - step
                if not (lo < x_new < hi):
                    x_new = 0.5 * (lo + hi)
                x = x_new
            guess[i] = x - px
            return x, y

        bxf = float(cb[0])

        def shoot(lam: float):
            px, py = float(start[0]), sv0
            pts = [start]
            for i in range(1, Z):
                px, py = hop(px, py, i, lam)
                pts.append((px, py))
            dx, dv = abs(bxf - px), abs(bv0 - py)
            r = (math.hypot(dx, dv) if p == 2.0 else (dx ** p + dv ** p) ** inv_p) - 1.0
            return r, pts

    else:
        def level(x: float, i: int, lam: float) -> np.ndarray:
            t = min(max((x - sx) / span, 0.0), 1.0)
            base = sv + t * (bv - sv)
            c = min(max(base[0], 0.5 * A), eps - 0.5 * A)
            target = c + 0.5 * A if i % 2 else c - 0.5 * A
            out = base.copy()
            out[0] = (1.0 - lam) * base[0] + lam * target
            return out

        def hop(P: np.ndarray, i: int, lam: float) -> np.ndarray:
            px, pv = P[0], P[1:]

            def phi(x):
                dv = level(x, i, lam) - pv
                return lp_norm(np.concatenate([[x - px], dv]), p) - 1.0

            if phi(px) >= 0:
                raise ConstructionError("zigzag level too steep for a unit hop")
            x = brentq(phi, px, px + 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                       maxiter=200)
            return np.concatenate([[x], level(x, i, lam)])

        def shoot(lam: float):
            pts = [start]
            P = start
            for i in range(1, Z):
                P = hop(P, i, lam)
                pts.append(P)
            return lp_norm(cb - P, p) - 1.0, pts

    r0, _ = shoot(0.0)
    r1, _ = shoot(1.0)
    if not (r0 < 0 < r1):
        raise ConstructionError(
            f"zigzag cannot absorb the slack (residuals {r0:.3g}, {r1:.3g}); pair too close")
    lam = brentq(lambda t: shoot(t)[0], 0.0, 1.0, xtol=1e-13, maxiter=300)
    _, zig = shoot(lam)
    coords = prefix[:-1] + [np.asarray(z, dtype=float) for z in zig] + [cb]
    out = []
    for c in coords:
        c = c.copy()
        c[0] *= sgn
        out.append(LayerPoint.split(c, spec.n))
    out[0], out[-1] = a, b
    return out


def _ceiling_path(a: LayerPoint, b: LayerPoint, spec: LayerSpec, tol: Tolerance) -> WitnessPath:
    d = lp_dist(a, b, spec)
    k = _integer_near(d, tol)
    if k is not None:
        if k == 0:
            return WitnessPath((a,))
        return WitnessPath(chain_points(a, b, k, spec, tol))
    k = int(math.ceil(d))
    if spec.n >= 2:
        verts = _sphere_path(a, b, spec)
    else:
        verts = _zigzag_path(a, b, k, spec)
    path = WitnessPath(verts)
    if not validate_witness(path, spec, tol, start=a, end=b):
        raise ConstructionError("constructed path failed validation")
    return path


def far_witness_path(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                     cfg: HopConfig = HopConfig()) -> WitnessPath:
    """Witness of ``ceil(dist)`` hops for a pair beyond the far threshold."""
    spec.require_smooth()
    d = lp_dist(a, b, spec)
    T = cfg.threshold(spec)
    if d <= T:
        raise ValueError(f"distance {d:.6g} does not exceed the far threshold {T:.6g}")
    try:
        return _ceiling_path(a, b, spec, cfg.tol)
    except ConstructionError as exc:
        raise ConstructionError(f"{exc}; far_threshold {T} is too low for this layer") from exc


def _apexes(a: LayerPoint, b: LayerPoint, spec: LayerSpec) -> list:
    """Both points at unit distance from ``a`` and ``b`` in the plane of a strip."""
    ca, cb = a.coords, b.coords
    diff = cb - ca
    d = lp_norm(diff, spec.p)
    if spec.p == 2.0:
        e = diff / d
        nrm = np.array([-e[1], e[0]])
        hgt = math.sqrt(max(0.0, 1.0 - d * d / 4.0))
        c = 0.5 * (ca + cb)
        return [c + hgt * nrm, c - hgt * nrm]
    e = diff / np.linalg.norm(diff)
    w = np.array([-e[1], e[0]])
    return [_equidistant_on_ray(ca, cb, e, w, spec.p, s) for s in (1.0, -1.0)]


def two_hop_witness(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                    tol: Tolerance = DEFAULT_TOL, sweep: int = 256) -> Optional[LayerPoint]:
    """A layer point at unit distance from both ``a`` and ``b``, or ``None``."""
    spec.require_smooth()
    d = lp_dist(a, b, spec)
    if d <= tol.abs_tol or d > 2.0 + tol.abs_tol:
        return None
    if abs(d - 2.0) < tol.abs_tol:
        return LayerPoint.split(0.5 * (a.coords + b.coords), spec.n)
    if spec.n >= 2:
        from .layer_core import unit_equidistant_pair
        return unit_equidistant_pair(a, b, spec, tol).points[0]
    ca, cb = a.coords, b.coords
    if spec.m == 1:
        cands = _apexes(a, b, spec)
    else:
        # equidistant locus is (m-1)-dimensional: sweep planes through [a, b]
        diff = cb - ca
        e = diff / np.linalg.norm(diff)
        rng = np.random.default_rng(12345)
        dirs = list(np.eye(spec.dim)) + list(rng.normal(size=(sweep, spec.dim)))
        cands = []
        for w in dirs:
            w = w - (w @ e) * e
            nw = np.linalg.norm(w)
            if nw < 1e-9:
                continue
            w /= nw
            for s in (1.0, -1.0):
                cands.append(_equidistant_on_ray(ca, cb, e, w, spec.p, s))
    for z in cands:
        if in_layer(z, spec, tol):
            v = np.clip(z[spec.n:], 0.0, spec.eps)
            return LayerPoint.split(np.concatenate([z[:spec.n], v]), spec.n)
    return None


def two_hop_decision(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                     tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether some layer point is at unit distance from both ``a`` and ``b``.

    For ``n >= 2`` the answer is always yes (``0 < dist <= 2``).  For strips
    the two candidate apexes are computed in closed form (``p = 2``) or by
    root finding along the bisector, and checked against the slab.
    """
    return two_hop_witness(a, b, spec, tol) is not None


def _hop_residuals(flat: np.ndarray, ca: np.ndarray, cb: np.ndarray, k: int, dim: int, p: float):
    pts = np.vstack([ca, flat.reshape(k - 1, dim), cb])
    diffs = np.diff(pts, axis=0)
    absd = np.abs(diffs)
    norms = np.sum(absd ** p, axis=1) ** (1.0 / p)
    return pts, diffs, norms


def near_search(a: LayerPoint, b: LayerPoint, k: int, spec: LayerSpec,
                cfg: HopConfig = HopConfig()) -> Optional[WitnessPath]:
    """Look for a ``k``-hop path by multistart bounded least squares.

    Residuals are ``||z_{i+1} - z_i||_p - 1``; the slab enters as box bounds
    on the vertical coordinates.  ``None`` is not a proof that no path exists.
    """
    spec.require_smooth()
    tol = cfg.tol
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return WitnessPath((a, b)) if tol.is_unit(lp_dist(a, b, spec)) else None
    ca, cb = a.coords, b.coords
    dim, n, p, eps = spec.dim, spec.n, spec.p, spec.eps
    lower = np.full((k - 1, dim), -np.inf)
    upper = np.full((k - 1, dim), np.inf)
    lower[:, n:] = 0.0
    upper[:, n:] = eps
    lower, upper = lower.ravel(), upper.ravel()

    def fun(flat):
        _, _, norms = _hop_residuals(flat, ca, cb, k, dim, p)
        return norms - 1.0

    def jac(flat):
        _, diffs, norms = _hop_residuals(flat, ca, cb, k, dim, p)
        safe = np.maximum(norms, 1e-300)
        grad = np.sign(diffs) * np.abs(diffs) ** (p - 1.0) / safe[:, None] ** (p - 1.0)
        J = np.zeros((k, (k - 1) * dim))
        for i in range(k):
            if i >= 1:
                J[i, (i - 1) * dim:i * dim] = -grad[i]
            if i <= k - 2:
                J[i, i * dim:(i + 1) * dim] = grad[i]
        return J

    rng = np.random.default_rng([cfg.seed, k])
    ts = np.arange(1, k)[:, None] / k
    for _ in range(cfg.restarts):
        x0 = ca + ts * (cb - ca)
        x0[:, :n] += rng.normal(scale=0.8, size=(k - 1, n))
        x0[:, n:] = rng.uniform(0.0, eps, size=(k - 1, spec.m))
        try:
            res = least_squares(fun, x0.ravel(), jac=jac, bounds=(lower, upper),
                                method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15,
                                max_nfev=400)
        except (ValueError, FloatingPointError):
            continue
        if np.max(np.abs(res.fun)) > 1e-2 * tol.abs_tol:
            continue
        flat = res.x.reshape(k - 1, dim)
        verts = [a] + [LayerPoint.split(row, n) for row in flat] + [b]
        path = WitnessPath(verts)
        if validate_witness(path, spec, tol, start=a, end=b):
            return path
    return None


def hop_distance(a: LayerPoint, b: LayerPoint, spec: LayerSpec,
                 cfg: HopConfig = HopConfig()) -> HopInterval:
    """Certified interval for ``rho(a, b)``, with a witness whenever one is known.

    Exact cases: ``a == b``; integer distance (straight chain); distance in
    ``(0, 2)`` when a two-hop point exists; any pair with ``n >= 2`` and
    distance above 1 (sphere construction); strips beyond the far threshold
    (zigzag).  Otherwise the near search tries hop counts from the certified
    lower bound up to ``cfg.near_budget``.
    """
    spec.require_smooth()
    tol = cfg.tol
    if not (in_layer(a, spec, tol) and in_layer(b, spec, tol)):
        raise ValueError("both points must lie in the layer")
    d = lp_dist(a, b, spec)
    if d <= tol.abs_tol:
        return HopInterval(0, 0, True, WitnessPath((a,)))
    lower = projection_lower_bound(a, b, spec, tol)
    k_int = _integer_near(d, tol)
    if k_int is not None:
        path = WitnessPath(chain_points(a, b, k_int, spec, tol))
        return HopInterval(k_int, k_int, True, path)

    if d < 2.0:
        z = two_hop_witness(a, b, spec, tol)
        if z is not None:
            path = WitnessPath((a, z, b))
            if validate_witness(path, spec, tol):
                return HopInterval(2, 2, True, path)
        elif lower == 2:
            lower = 3

    far = d > cfg.threshold(spec)
    if spec.n >= 2 or d > 2.0:
        try:
            path = _ceiling_path(a, b, spec, tol)
            return HopInterval(path.edges, path.edges, path.edges == lower, path)
        except ConstructionError:
            if far:
                raise

    for k in range(lower, cfg.near_budget + 1):
        path = near_search(a, b, k, spec, cfg)
        if path is not None:
            return HopInterval(lower, k, k == lower, path)
    return HopInterval(lower, None, False)
