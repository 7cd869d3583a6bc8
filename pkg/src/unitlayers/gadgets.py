"""Planar gadgets whose existence depends on the width of a strip.

Combs separate widths below one, modified combs separate fractional parts,
sandwiches separate integer parts, and odd cycles give a numeric width scale.
All constructions live in the Euclidean strip ``R x [0, eps]`` unless noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .exact import comb_threshold_sq, float_slack, is_exact_input, to_fraction
from .layer_core import DEFAULT_TOL, LayerPoint, LayerSpec, Tolerance, in_layer, lp_dist

__all__ = [
    "Comb",
    "CombReport",
    "Sandwich",
    "WidthSignature",
    "CycleEmbedding",
    "CycleConfig",
    "comb_min_width",
    "comb_exists",
    "build_extreme_comb",
    "validate_comb",
    "modified_comb_exists",
    "build_modified_comb",
    "validate_modified_comb",
    "delta_region_contains",
    "sandwich_fits",
    "build_sandwich",
    "border_points",
    "cycle_embeds",
    "odd_cycle_min_width",
]


def _check_nm(N: int, M: int) -> None:
    if int(N) != N or int(M) != M or N < 1 or M < 1:
        raise ValueError(f"N and M must be positive integers, got {N!r}, {M!r}")
    if not 2 * M > N:
        raise ValueError(f"comb needs 2M > N, got N={N}, M={M}")


def comb_min_width(N: int, M: int) -> float:
    """Least strip width holding an ``(N, M)``-comb, ``sqrt(1 - N^2 / (4 M^2))``.

    >>> round(comb_min_width(4, 5), 5)
    0.91652
    """
    _check_nm(N, M)
    return math.sqrt(4 * M * M - N * N) / (2 * M)


def _at_least(x, thr_sq: Fraction, strict: bool) -> bool:
    # exact comparison of x against sqrt(thr_sq); floats get a few ulps of slack
    xf = to_fraction(x)
    if xf < 0:
        return False
    exact = xf * xf > thr_sq if strict else xf * xf >= thr_sq
    if is_exact_input(x):
        return exact
    thr = math.sqrt(float(thr_sq))
    if abs(float(x) - thr) <= float_slack(thr):
        return not strict
    return exact


def comb_exists(N: int, M: int, eps) -> bool:
    """Whether the strip of width ``eps < 1`` contains an ``(N, M)``-comb.

    Rational inputs (``Fraction``, ``int``, ``"7/10"``) compare exactly.
    Floats compare exactly through their decimal ``repr`` except within a
    few ulps of the threshold, where they count as hitting it.
    """
    _check_nm(N, M)
    e = to_fraction(eps)
    if e <= 0:
        raise ValueError("eps must be positive")
    if e >= 1:
        raise ValueError("comb_exists needs eps < 1; use modified_comb_exists")
    return _at_least(eps, comb_threshold_sq(N, M), strict=False)


@dataclass(frozen=True)
class Comb:
    """Points ``a_0..a_N``, ``b_0..b_M`` and apexes ``c_1..c_M`` of a comb.

    ``c[i]`` holds ``c_{i+1}``.
    """

    a: tuple
    b: tuple
    c: tuple
    N: int
    M: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "c", tuple(self.c))

    def points(self) -> list:
        return list(self.a) + list(self.b) + list(self.c)

    def zigzag(self) -> list:
        """``b_0, c_1, b_1, ..., c_M, b_M``."""
        out = [self.b[0]]
        for i in range(self.M):
            out += [self.c[i], self.b[i + 1]]
        return out


@dataclass
class CombReport:
    valid: bool
    violations: list = field(default_factory=list)
    regime_note: Optional[str] = None

    @property
    def first(self) -> Optional[str]:
        """Clause label of the first violation, or ``None``."""
        return self.violations[0][0] if self.violations else None

    def __bool__(self):
        return self.valid


def _extreme_points(N: int, M: int, base: float, apex: float):
    step = N / M
    a = [LayerPoint([float(i)], [base]) for i in range(N + 1)]
    b = [LayerPoint([i * step], [base]) for i in range(M + 1)]
    # keep the endpoints bit-identical to a_0 and a_N
    b[0], b[-1] = a[0], a[-1]
    c = [LayerPoint([(i - 0.5) * step], [apex]) for i in range(1, M + 1)]
    return a, b, c


def build_extreme_comb(N: int, M: int, eps) -> Comb:
    """The extreme comb: ``b_i`` split ``[a_0, a_N]`` evenly, apexes at full height.

    The baseline sits on ``y = 0`` and the apexes at
    ``y = comb_min_width(N, M)``.
    """
    if not comb_exists(N, M, eps):
        raise ValueError(f"no ({N},{M})-comb in a strip of width {eps}")
    h = min(comb_min_width(N, M), float(to_fraction(eps)))
    a, b, c = _extreme_points(N, M, 0.0, h)
    return Comb(a, b, c, N, M)


def validate_comb(comb: Comb, spec: LayerSpec, tol: Tolerance = DEFAULT_TOL) -> CombReport:
    """Check clauses (i) to (vi) of the comb definition plus layer membership.

    Every violated clause is reported; ``report.first`` is the earliest.
    Interleaving clauses need a margin larger than ``tol.abs_tol``.
    """
    if spec.n != 1:
        raise ValueError("combs are planar gadgets (n = 1)")
    N, M = comb.N, comb.M
    out = []

    def bad(clause, msg):
        out.append((clause, msg))

    if len(comb.a) != N + 1 or len(comb.b) != M + 1 or len(comb.c) != M:
        bad("shape", f"expected {N + 1} a, {M + 1} b and {M} c points")
        return CombReport(False, out)

    for name, pts in (("a", comb.a), ("b", comb.b), ("c", comb.c)):
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if lp_dist(pts[i], pts[j], spec) <= tol.abs_tol:
                    bad("distinct", f"{name}_{i} and {name}_{j} coincide")
    for pt in comb.points():
        if not in_layer(pt, spec, tol):
            bad("layer", f"point {pt.tolist()} is outside the strip")
            break

    v0 = comb.a[0].v
    if any(np.max(np.abs(x.v - v0)) > tol.abs_tol for x in comb.a):
        bad("i", "a points are not on one horizontal line")
    for i in range(N):
        d = lp_dist(comb.a[i], comb.a[i + 1], spec)
        if not tol.is_unit(d):
            bad("ii", f"|a_{i} a_{i + 1}| = {d:.12g}")
    if lp_dist(comb.a[0], comb.b[0], spec) > tol.abs_tol:
        bad("iii", "a_0 != b_0")
    if lp_dist(comb.a[N], comb.b[M], spec) > tol.abs_tol:
        bad("iii", "a_N != b_M")
    for i in range(1, M + 1):
        for lhs, rhs, label in ((comb.b[i - 1], comb.c[i - 1], f"b_{i - 1} c_{i}"),
                                (comb.c[i - 1], comb.b[i], f"c_{i} b_{i}")):
            d = lp_dist(lhs, rhs, spec)
            if not tol.is_unit(d):
                bad("iv", f"|{label}| = {d:.12g}")

    pa0, paN = float(comb.a[0].h[0]), float(comb.a[N].h[0])
    lo, hi = min(pa0, paN), max(pa0, paN)
    m = tol.abs_tol

    def inside(x, left, right):
        l, r = min(left, right), max(left, right)
        return l + m < x < r - m

    pb = [float(x.h[0]) for x in comb.b]
    pc = [float(x.h[0]) for x in comb.c]
    for i in range(1, M):
        if not inside(pb[i], lo, hi):
            bad("v", f"pr(b_{i}) not strictly inside [pr(a_0), pr(a_N)]")
    for i in range(1, M + 1):
        if not inside(pc[i - 1], lo, hi):
            bad("v", f"pr(c_{i}) not strictly inside [pr(a_0), pr(a_N)]")
    for i in range(1, M):
        if not inside(pb[i], pb[i - 1], pb[i + 1]):
            bad("vi", f"pr(b_{i}) not strictly between pr(b_{i - 1}) and pr(b_{i + 1})")
    for i in range(1, M + 1):
        if not inside(pc[i - 1], pb[i - 1], pb[i]):
            bad("vi", f"pr(c_{i}) not strictly between pr(b_{i - 1}) and pr(b_{i})")

    order = ["shape", "distinct", "layer", "i", "ii", "iii", "iv", "v", "vi"]
    out.sort(key=lambda cv: order.index(cv[0]))
    note = None if M > N else f"M={M} <= N={N}: outside the stated M > N regime"
    return CombReport(not out, out, note)


@dataclass(frozen=True)
class WidthSignature:
    """Integer and fractional part of a width."""

    integer_part: int
    fractional_part: float
    exact: Optional[Fraction] = None

    def __post_init__(self):
        if self.integer_part < 0 or not 0 <= self.fractional_part < 1:
            raise ValueError("need integer_part >= 0 and fractional_part in [0, 1)")

    @property
    def eps(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return self.integer_part + self.fractional_part

    @classmethod
    def of(cls, eps) -> "WidthSignature":
        e = to_fraction(eps)
        if e <= 0:
            raise ValueError("eps must be positive")
        m = math.floor(e)
        return cls(int(m), float(e - m), e)


def delta_region_contains(x: LayerPoint, sig: WidthSignature) -> bool:
    """``y in [0, delta) or y in (m, eps]`` with the endpoints exactly as written."""
    y = float(x.v[0])
    m, delta, eps = sig.integer_part, sig.fractional_part, sig.eps
    return (0.0 <= y < delta) or (m < y <= eps)


def _fractional(eps) -> tuple[WidthSignature, Fraction]:
    sig = WidthSignature.of(eps)
    return sig, sig.exact - sig.integer_part


def modified_comb_exists(N: int, M: int, eps) -> bool:
    """Whether a modified ``(N, M)``-comb fits in the Δ-region of width ``eps``.

    A modified comb lives in one of the half-open bands of width ``delta``,
    so the comparison with the comb threshold is strict.
    """
    _check_nm(N, M)
    sig, delta = _fractional(eps)
    if sig.integer_part < 1:
        raise ValueError("modified combs need eps >= 1; use comb_exists")
    if delta == 0:
        raise ValueError("modified combs need a positive fractional part")
    if is_exact_input(eps):
        return _at_least(delta, comb_threshold_sq(N, M), strict=True)
    # float input: carry the float's slack over to delta
    thr = comb_min_width(N, M)
    if abs(float(delta) - thr) <= float_slack(float(to_fraction(eps))):
        return False
    return delta * delta > comb_threshold_sq(N, M)


def build_modified_comb(N: int, M: int, eps, side: str = "bottom") -> Comb:
    """Extreme comb inside the Δ-region with every apex on the strip boundary.

    ``side="bottom"`` puts it in ``R x [0, delta)`` with apexes on ``y = 0``;
    ``side="top"`` mirrors it into ``R x (m, eps]`` with apexes on ``y = eps``.
    """
    if not modified_comb_exists(N, M, eps):
        raise ValueError(f"no modified ({N},{M})-comb in a strip of width {eps}")
    e = float(to_fraction(eps))
    h = comb_min_width(N, M)
    if side == "bottom":
        a, b, c = _extreme_points(N, M, h, 0.0)
    elif side == "top":
        a, b, c = _extreme_points(N, M, e - h, e)
    else:
        raise ValueError("side must be 'bottom' or 'top'")
    return Comb(a, b, c, N, M)


def validate_modified_comb(comb: Comb, eps, tol: Tolerance = DEFAULT_TOL) -> CombReport:
    """Comb clauses plus Δ-region membership and apexes on ``y in {0, eps}``."""
    sig = WidthSignature.of(eps)
    rep = validate_comb(comb, LayerSpec.strip(sig.eps), tol)
    for pt in comb.points():
        if not delta_region_contains(pt, sig):
            rep.violations.append(("delta", f"point {pt.tolist()} is outside the Δ-region"))
            break
    for i, pt in enumerate(comb.c, start=1):
        y = float(pt.v[0])
        if min(abs(y), abs(y - sig.eps)) > tol.abs_tol:
            rep.violations.append(("boundary", f"c_{i} is not on the strip boundary"))
    rep.valid = not rep.violations
    return rep


@dataclass(frozen=True)
class Sandwich:
    """Finite window ``origin + (j, k)``, ``|j| <= cols``, ``k = 0..rows``, of an m-sandwich."""

    origin: LayerPoint
    rows: int
    cols: int = 8

    def grid(self) -> np.ndarray:
        """Array of shape ``(2 cols + 1, rows + 1, 2)``, indexed by column then row."""
        j = np.arange(-self.cols, self.cols + 1, dtype=float)
        k = np.arange(self.rows + 1, dtype=float)
        J, K = np.meshgrid(j, k, indexing="ij")
        return np.stack([self.origin.h[0] + J, self.origin.v[0] + K], axis=-1)

    def points(self) -> list:
        g = self.grid().reshape(-1, 2)
        return [LayerPoint([x], [y]) for x, y in g]


def sandwich_fits(m_s: int, eps) -> bool:
    """An ``m_s``-sandwich fits in the strip iff ``m_s <= eps``."""
    if int(m_s) != m_s or m_s < 0:
        raise ValueError("m_s must be a nonnegative integer")
    return int(m_s) <= to_fraction(eps)


def build_sandwich(m_s: int, eps, shift: Sequence[float] = (0.0, 0.0), cols: int = 8) -> Sandwich:
    """Window of an ``m_s``-sandwich shifted by ``shift``; rows must stay in ``[0, eps]``."""
    if not sandwich_fits(m_s, eps):
        raise ValueError(f"a {m_s}-sandwich does not fit in width {eps}")
    sx, sy = (float(t) for t in shift)
    e = float(to_fraction(eps))
    if not 0.0 <= sy <= e - m_s:
        raise ValueError(f"vertical shift {sy} puts rows outside [0, {e}]")
    if cols < 0:
        raise ValueError("cols must be nonnegative")
    return Sandwich(LayerPoint([sx], [sy]), int(m_s), int(cols))


def border_points(s: Sandwich) -> list:
    """Points not strictly between two points of their vertical column.

    Those are the bottom and top rows; when ``rows == 0`` that is everything.
    """
    g = s.grid()
    keep = sorted({0, s.rows})
    return [LayerPoint([g[j, k, 0]], [g[j, k, 1]]) for j in range(g.shape[0]) for k in keep]


@dataclass(frozen=True)
class CycleEmbedding:
    k: int
    vertices: tuple
    eps: float

    def coords(self) -> np.ndarray:
        return np.array([v.coords for v in self.vertices])


@dataclass(frozen=True)
class CycleConfig:
    """Search settings for odd cycles.

    ``separation`` is the least distance kept between non-adjacent vertices
    so the optimizer cannot fold the cycle onto itself.
    """

    restarts: int = 16
    seed: int = 0
    separation: float = 0.05
    bisect_tol: float = 2.5e-4
    tol: Tolerance = DEFAULT_TOL


def _check_odd(k: int) -> None:
    if int(k) != k or k < 3 or k % 2 == 0:
        raise ValueError(f"k must be an odd integer >= 3, got {k!r}")


def _cycle_vertices(z: np.ndarray, k: int):
    th, y0 = z[:k], z[k]
    x = np.concatenate([[0.0], np.cumsum(np.cos(th))[:-1]])
    y = y0 + np.concatenate([[0.0], np.cumsum(np.sin(th))[:-1]])
    return x, y, th


def cycle_embeds(k: int, eps: float, cfg: CycleConfig = CycleConfig()) -> Optional[CycleEmbedding]:
    """Search for a ``k``-cycle of the unit distance graph in ``R x [0, eps]``.

    Each edge is a unit vector at angle ``theta_i``, so edge lengths are exact
    and least squares only has to close the polygon, keep it inside the strip
    and keep non-adjacent vertices apart.  Returns ``None`` when no restart
    succeeds.
    """
    _check_odd(k)
    if not eps > 0:
        raise ValueError("eps must be positive")
    rng = np.random.default_rng([cfg.seed, k])
    iu, ju = np.triu_indices(k, 2)
    nonadj = ~((iu == 0) & (ju == k - 1))
    iu, ju = iu[nonadj], ju[nonadj]
    sep = cfg.separation

    def residuals(z):
        x, y, th = _cycle_vertices(z, k)
        gaps = np.hypot(x[iu] - x[ju], y[iu] - y[ju])
        return np.concatenate([[np.sum(np.cos(th)), np.sum(np.sin(th))],
                               np.maximum(0.0, y - eps), np.maximum(0.0, -y),
                               np.maximum(0.0, sep - gaps)])

    for _ in range(cfg.restarts):
        z0 = np.concatenate([rng.uniform(0.0, 2 * np.pi, k), [rng.uniform(0.0, eps)]])
        sol = least_squares(residuals, z0, method="trf", xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, max_nfev=200 * k)
        if np.max(np.abs(sol.fun)) >= 1e-12:
            continue
        x, y, _ = _cycle_vertices(sol.x, k)
        y = np.clip(y, 0.0, eps)
        verts = tuple(LayerPoint([xi], [yi]) for xi, yi in zip(x, y))
        spec = LayerSpec.strip(eps)
        if all(cfg.tol.is_unit(lp_dist(verts[i], verts[(i + 1) % k], spec)) for i in range(k)):
            return CycleEmbedding(k, verts, float(eps))
    return None


def odd_cycle_min_width(k: int, cfg: CycleConfig = CycleConfig()) -> float:
    """Bisect the least strip width in which :func:`cycle_embeds` finds a ``k``-cycle.

    Returns the upper end of the final bracket, a width where a cycle was found.
    """
    _check_odd(k)
    lo, hi = 0.0, 1.0
    if cycle_embeds(k, hi, cfg) is None:
        raise RuntimeError(f"no {k}-cycle found even at width 1")
    while hi - lo > cfg.bisect_tol:
        mid = 0.5 * (lo + hi)
        if cycle_embeds(k, mid, cfg) is not None:
            hi = mid
        else:
            lo = mid
    return hi
