"""Geometry of the layer ``R^n x [0, eps]^m`` under an l_p norm.

Points are stored as a horizontal part ``h`` (length ``n``) and a vertical
part ``v`` (length ``m``).  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "DimensionError",
    "NormError",
    "Tolerance",
    "DEFAULT_TOL",
    "LayerSpec",
    "LayerPoint",
    "SupportNormal",
    "Equidistant",
    "lp_norm",
    "lp_dist",
    "project",
    "in_layer",
    "support_normal",
    "cube_diameter",
    "chain_points",
    "unit_equidistant_pair",
    "hull_interior_contains",
]


class DimensionError(ValueError):
    """Vector lengths do not match the layer dimensions."""


class NormError(ValueError):
    """The norm exponent is outside the range an operation supports."""


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair.

    Predicates of the form "distance equals k" compare the residual against
    ``abs_tol`` only; ``rel_tol`` is used for generic float comparisons.
    """

    abs_tol: float = 1e-9
    rel_tol: float = 1e-12

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one tolerance must be positive")

    def close(self, a: float, b: float) -> bool:
        return abs(a - b) <= max(self.abs_tol, self.rel_tol * max(abs(a), abs(b)))

    def is_unit(self, d: float) -> bool:
        return abs(d - 1.0) < self.abs_tol


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class LayerSpec:
    """The layer L(n, m, p, eps).

    ``p`` may be ``1`` or ``inf`` for raw norm evaluation; every
    smoothness-dependent operation calls :meth:`require_smooth` first.
    """

    n: int
    m: int
    p: float
    eps: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not self.p >= 1:
            raise NormError(f"p must be >= 1, got {self.p!r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "eps", float(self.eps))

    @classmethod
    def strip(cls, eps: float) -> "LayerSpec":
        """Euclidean planar strip ``R x [0, eps]``."""
        return cls(1, 1, 2.0, eps)

    @property
    def dim(self) -> int:
        return self.n + self.m

    @property
    def smooth(self) -> bool:
        return 1.0 < self.p < math.inf

    def require_smooth(self) -> None:
        if not self.smooth:
            raise NormError(f"operation requires p in (1, inf), got p={self.p}")

    def point(self, h: Sequence[float], v: Sequence[float],
              tol: Tolerance = DEFAULT_TOL) -> "LayerPoint":
        """Build a validated point of this layer."""
        pt = LayerPoint(h, v)
        if pt.h.size != self.n or pt.v.size != self.m:
            raise DimensionError(
                f"expected h of length {self.n} and v of length {self.m}, "
                f"got {pt.h.size} and {pt.v.size}")
        if not in_layer(pt.coords, self, tol):
            raise ValueError(f"vertical coordinates {pt.v.tolist()} leave [0, {self.eps}]")
        return pt

    def from_coords(self, coords: Sequence[float],
                    tol: Tolerance = DEFAULT_TOL) -> "LayerPoint":
        c = np.asarray(coords, dtype=float).ravel()
        if c.size != self.dim:
            raise DimensionError(f"expected {self.dim} coordinates, got {c.size}")
        return self.point(c[:self.n], c[self.n:], tol)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).ravel()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LayerPoint:
    """Point of a layer, split into horizontal and vertical coordinates.

    Arrays are read-only. Membership in a particular layer is checked by
    :meth:`LayerSpec.point`; the bare constructor does not know ``eps``.
    """

    h: np.ndarray
    v: np.ndarray
    coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h, v = _frozen(self.h), _frozen(self.v)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "coords", _frozen(np.concatenate([h, v])))

    @classmethod
    def split(cls, coords, n: int) -> "LayerPoint":
        c = np.asarray(coords, dtype=float).ravel()
        return cls(c[:n], c[n:])

    def __eq__(self, other):
        if not isinstance(other, LayerPoint):
            return NotImplemented
        return (self.h.shape == other.h.shape and self.v.shape == other.v.shape
                and bool(np.all(self.coords == other.coords)))

    def __hash__(self):
        return hash((self.h.size, self.coords.tobytes()))

    def tolist(self) -> list:
        return self.coords.tolist()


def _coords(a) -> np.ndarray:
    if isinstance(a, LayerPoint):
        return a.coords
    return np.asarray(a, dtype=float).ravel()


def lp_norm(x, p: float) -> float:
    """l_p norm of a vector, for p in [1, inf]."""
    x = np.abs(np.asarray(x, dtype=float).ravel())
    if x.size == 0:
        return 0.0
    if p == math.inf:
        return float(x.max())
    if p == 1:
        return float(x.sum())
    scale = x.max()
    if scale == 0.0:
        return 0.0
    return float(scale * np.sum((x / scale) ** p) ** (1.0 / p))


def lp_dist(a, b, spec: LayerSpec) -> float:
    """l_p distance between two points of the ambient space of ``spec``."""
    ca, cb = _coords(a), _coords(b)
    if ca.size != spec.dim or cb.size != spec.dim:
        raise DimensionError(
            f"points must have {spec.dim} coordinates, got {ca.size} and {cb.size}")
    return lp_norm(ca - cb, spec.p)


def project(a: LayerPoint) -> np.ndarray:
    """Horizontal projection ``pr(a)``."""
    return a.h.copy()


def in_layer(a, spec: LayerSpec, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff every vertical coordinate lies in ``[0, eps]`` up to ``tol``."""
    c = _coords(a)
    if c.size != spec.dim:
        raise DimensionError(f"expected {spec.dim} coordinates, got {c.size}")
    v = c[spec.n:]
    return bool(np.all(v >= -tol.abs_tol) and np.all(v <= spec.eps + tol.abs_tol))


@dataclass(frozen=True, eq=False)
class SupportNormal:
    """Boundary point ``u`` of the unit ball and the normal ``s`` of its tangent plane."""

    u: np.ndarray
    s: np.ndarray


def support_normal(u, spec: LayerSpec, tol: Tolerance = DEFAULT_TOL) -> SupportNormal:
    """Normal of the supporting hyperplane to the l_p unit ball at horizontal ``u``.

    ``u`` may be given with ``n`` or ``n + m`` coordinates; in the latter case
    its vertical part must vanish.  The returned normal is the gradient of
    the norm at ``u``: ``sign(u_i) |u_i|^(p-1)`` horizontally, zero vertically.
    """
    spec.require_smooth()
    u = np.asarray(u, dtype=float).ravel()
    if u.size == spec.dim:
        if np.any(np.abs(u[spec.n:]) > tol.abs_tol):
            raise ValueError("u must be horizontal")
        u = u[:spec.n]
    elif u.size != spec.n:
        raise DimensionError(f"expected {spec.n} or {spec.dim} coordinates, got {u.size}")
    if abs(lp_norm(u, spec.p) - 1.0) > tol.abs_tol:
        raise ValueError(f"u is not on the unit sphere: ||u||_p = {lp_norm(u, spec.p)}")
    s = np.sign(u) * np.abs(u) ** (spec.p - 1.0)
    full_u = np.concatenate([u, np.zeros(spec.m)])
    full_s = np.concatenate([s, np.zeros(spec.m)])
    return SupportNormal(_frozen(full_u), _frozen(full_s))


def cube_diameter(m: int, p: float) -> float:
    """Diameter of ``[0, 1]^m`` under the l_p metric, i.e. ``m^(1/p)``."""
    if m < 1:
        raise ValueError("m must be positive")
    return float(m) ** (1.0 / p)


def chain_points(x: LayerPoint, y: LayerPoint, k: int, spec: LayerSpec,
                 tol: Tolerance = DEFAULT_TOL) -> list[LayerPoint]:
    """Split ``[x, y]`` into ``k`` unit steps; requires ``||x - y||_p == k``."""
    if k < 1:
        raise ValueError("k must be positive")
    d = lp_dist(x, y, spec)
    if abs(d - k) >= tol.abs_tol:
        raise ValueError(f"distance {d!r} is not the integer {k} within tolerance")
    cx, cy = x.coords, y.coords
    pts = [x]
    for i in range(1, k):
        pts.append(LayerPoint.split(cx + (i / k) * (cy - cx), spec.n))
    pts.append(y)
    return pts


@dataclass(frozen=True)
class Equidistant:
    """Outcome of :func:`unit_equidistant_pair`.

    ``kind`` is ``"pair"``, ``"unique-midpoint"`` or ``"none"``.
    """

    kind: str
    points: tuple = ()


def _expand_root(f, lo: float, step: float, limit: float = 1e6) -> float:
    """Root of ``f`` beyond ``lo`` (with ``f(lo) < 0``) found by doubling the bracket."""
    hi = lo + step
    while f(hi) < 0:
        lo, hi = hi, lo + 2 * (hi - lo)
        if abs(hi) > limit:
            raise RuntimeError("could not bracket root")
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def _equidistant_on_ray(x: np.ndarray, y: np.ndarray, e: np.ndarray, w: np.ndarray,
                        p: float, sign: float) -> np.ndarray:
    """Point ``z`` with ``||z-x|| = ||z-y|| = 1`` reached from the midpoint along ``sign*w``.

    ``z = c + s e + t w``: for each ``t`` the offset ``s`` along ``e`` keeps ``z``
    on the l_p bisector of ``x, y``; ``t`` is then chosen so ``||z-x|| = 1``.
    When ``e`` is zero the bisector contains the whole ray and ``s`` stays 0.
    """
    c = 0.5 * (x + y)
    # Euclidean bisector is the orthogonal hyperplane, so no correction is needed.
    need_s = p != 2.0 and bool(np.any(e != 0.0))
    span = lp_norm(x - y, 2.0) + 4.0

    def bisector(t: float) -> np.ndarray:
        base = c + t * w
        if not need_s:
            return base

        def phi(s):
            z = base + s * e
            return lp_norm(z - x, p) - lp_norm(z - y, p)

        lo, hi = -span, span
        flo, fhi = phi(lo), phi(hi)
        while flo * fhi > 0:
            lo, hi = 2 * lo, 2 * hi
            flo, fhi = phi(lo), phi(hi)
            if hi > 1e8:
                raise RuntimeError("bisector bracket failed")
        if flo == 0:
            return base + lo * e
        if fhi == 0:
            return base + hi * e
        s = brentq(phi, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        return base + s * e

    def g(t):
        return lp_norm(bisector(sign * t) - x, p) - 1.0

    t = _expand_root(g, 0.0, 0.5)
    return bisector(sign * t)


def _horizontal_frame(dh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean unit vectors ``e`` along ``dh`` and ``w`` orthogonal to it (needs n >= 2)."""
    n = dh.size
    norm = float(np.linalg.norm(dh))
    if norm == 0.0:
        e = np.zeros(n)
        w = np.zeros(n)
        w[0] = 1.0
        return e, w
    e = dh / norm
    j = int(np.argmin(np.abs(e)))
    w = -e[j] * e
    w[j] += 1.0
    w /= np.linalg.norm(w)
    return e, w


def unit_equidistant_pair(x: LayerPoint, y: LayerPoint, spec: LayerSpec,
                          tol: Tolerance = DEFAULT_TOL) -> Equidistant:
    """Points at l_p distance 1 from both ``x`` and ``y``.

    Distance exactly 2 gives the unique midpoint, more than 2 gives nothing,
    and less than 2 gives two distinct points, one on each side of the
    midpoint inside a horizontal 2-plane.
    """
    spec.require_smooth()
    if spec.n < 2:
        raise DimensionError("a horizontal 2-plane needs n >= 2")
    d = lp_dist(x, y, spec)
    if d <= tol.abs_tol:
        raise ValueError("x and y must be distinct")
    if abs(d - 2.0) < tol.abs_tol:
        mid = 0.5 * (x.coords + y.coords)
        return Equidistant("unique-midpoint", (LayerPoint.split(mid, spec.n),))
    if d > 2.0:
        return Equidistant("none")
    cx, cy = x.coords, y.coords
    e_h, w_h = _horizontal_frame(cx[:spec.n] - cy[:spec.n])
    zeros = np.zeros(spec.m)
    e = np.concatenate([e_h, zeros])
    w = np.concatenate([w_h, zeros])
    z1 = _equidistant_on_ray(cx, cy, e, w, spec.p, +1.0)
    z2 = _equidistant_on_ray(cx, cy, e, w, spec.p, -1.0)
    return Equidistant("pair", (LayerPoint.split(z1, spec.n), LayerPoint.split(z2, spec.n)))


def hull_interior_contains(points, q, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether ``q`` lies strictly inside the simplex spanned by ``n + 1`` points of R^n.

    A degenerate (flat) simplex has empty interior and contains nothing.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    q = np.asarray(q, dtype=float).ravel()
    k, n = P.shape
    if k != n + 1 or q.size != n:
        raise DimensionError(f"need {n + 1} points of dimension {n} and a point of dimension {n}")
    A = (P[1:] - P[0]).T
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= max(tol.abs_tol, 1e-12 * sv[0]):
        return False
    lam_tail = np.linalg.solve(A, q - P[0])
    lam = np.concatenate([[1.0 - lam_tail.sum()], lam_tail])
    return bool(np.all(lam > tol.abs_tol))
