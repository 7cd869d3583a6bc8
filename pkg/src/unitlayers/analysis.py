"""Width invariants, the two-width distinguisher and separation samplers.

The separation samplers compare two characterisations of "``y`` sits inside
the points ``x_k``": a purely affine one on horizontal projections, and a
metric one saying every far-away horizontal point is closer to some ``x_k``
than to ``y``.  The metric side is evaluated along horizontal escape rays
with a cancellation-free formula, so it stays reliable at radii around 1e7.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.stats import ortho_group, qmc
from scipy.special import ndtri

from .exact import comb_threshold_sq, sqrt_text, to_fraction
from .gadgets import WidthSignature, comb_min_width
from .hopmetric import HopConfig
from .layer_core import (
    DEFAULT_TOL,
    LayerPoint,
    LayerSpec,
    Tolerance,
    cube_diameter,
    hull_interior_contains,
    in_layer,
    lp_dist,
    lp_norm,
)

__all__ = [
    "DistinguishWitness",
    "SeparationConfig",
    "SeparationVerdict",
    "WidthWitnessTriple",
    "RigidMotion",
    "LayerNotPreservedError",
    "width_signature",
    "distinguish",
    "omega_check",
    "gamma_check",
    "omega_hat_check",
    "gamma_hat_check",
    "width_witness",
    "width_inequality_holds",
    "recover_width",
    "random_layer_motion",
    "isometry_sanity",
]


def width_signature(eps) -> WidthSignature:
    """``(floor(eps), eps - floor(eps))``; rational inputs are kept exact."""
    return WidthSignature.of(eps)


# --------------------------------------------------------------------------
# distinguisher

@dataclass(frozen=True)
class DistinguishWitness:
    """Gadget present in exactly one of two strips.

    ``present_in`` is 1 or 2 (the argument position), or ``None`` for
    ``kind == "equal"``.  ``params`` holds ``m_s`` for a sandwich and
    ``N, M`` for (modified) combs.
    """

    kind: str
    params: dict = field(default_factory=dict)
    present_in: Optional[int] = None
    threshold: Optional[float] = None
    threshold_text: Optional[str] = None
    note: Optional[str] = None


def _comb_scan(lo: Fraction, hi: Fraction, max_M: int) -> tuple[int, int]:
    # smallest M, then smallest N, with lo < sqrt(1 - N^2/4M^2) < hi
    for M in range(1, max_M + 1):
        upper = 4 * M * M * (1 - lo * lo)   # N^2 must stay below
        lower = 4 * M * M * (1 - hi * hi)   # N^2 must exceed
        N = math.isqrt(max(math.floor(lower), 0)) + 1
        if N < 2 * M and N * N < upper:
            return N, M
    raise RuntimeError(f"no comb separates {lo} and {hi} with M <= {max_M}")


def distinguish(eps1, eps2, max_M: int = 10**6) -> DistinguishWitness:
    """Name a gadget that exists in one strip width but not the other.

    Different integer parts: a sandwich with as many rows as the larger one.
    Both below one: an ``(N, M)``-comb whose threshold lies strictly between.
    Same positive integer part: a modified comb separating the fractional parts.

    >>> w = distinguish("3/5", "7/10")
    >>> (w.kind, w.params["N"], w.params["M"], w.threshold_text, w.present_in)
    ('comb', 3, 2, 'sqrt(7)/4', 2)
    """
    e1, e2 = to_fraction(eps1), to_fraction(eps2)
    if e1 <= 0 or e2 <= 0:
        raise ValueError("widths must be positive")
    if e1 == e2:
        return DistinguishWitness("equal")
    wide = 1 if e1 > e2 else 2
    s1, s2 = WidthSignature.of(e1), WidthSignature.of(e2)
    if s1.integer_part != s2.integer_part:
        m_s = max(s1.integer_part, s2.integer_part)
        return DistinguishWitness("sandwich", {"m_s": m_s}, wide)
    m = s1.integer_part
    d1, d2 = e1 - m, e2 - m
    N, M = _comb_scan(min(d1, d2), max(d1, d2), max_M)
    note = None if M > N else f"M={M} <= N={N}: outside the stated M > N regime"
    return DistinguishWitness("comb" if m == 0 else "modified-comb", {"N": N, "M": M}, wide,
                              comb_min_width(N, M), sqrt_text(N, M), note)


# --------------------------------------------------------------------------
# separation samplers

@dataclass(frozen=True)
class SeparationConfig:
    """Sampling settings for the metric side of the separation checks.

    Radii run geometrically from just past the far threshold to
    ``max_radius``; a direction passes when the strict inequality holds on
    the last ``tail`` radii.
    """

    max_radius: float = 1e7
    radii: int = 24
    tail: int = 4
    directions: int = 512
    hop: HopConfig = HopConfig()
    metric: str = "norm"


@dataclass(frozen=True)
class SeparationVerdict:
    omega: bool
    gamma: bool
    samples: int
    max_radius: float
    failing_direction: Optional[tuple] = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("a verdict needs at least one sample")

    @property
    def agree(self) -> bool:
        return self.omega == self.gamma


def _pow_excess(U: np.ndarray, A: np.ndarray, t: np.ndarray, p: float) -> np.ndarray:
    """``||u + t a||_p^p - 1`` for unit ``u`` without cancellation.

    Shapes: ``U (D, dim)``, ``A (K, dim)``, ``t (R,)``; result ``(D, R, K)``.
    """
    u = U[:, None, None, :]
    ta = t[None, :, None, None] * A[None, None, :, :]
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        w = np.where(au > 0, ta / np.where(au > 0, u, 1.0), 0.0)
        small = (au > 0) & (w > -0.5)
        near = au ** p * np.expm1(p * np.log1p(np.where(small, w, 0.0)))
        direct = np.abs(u + ta) ** p - au ** p
    terms = np.where(small, near, direct)
    return terms.sum(axis=-1)


def _ray_distances(U, A, radii, p):
    """Distances ``||y + R u - x_k|| - R`` (``A = y - x_k``), shape ``(D, R, K)``."""
    ex = _pow_excess(U, A, 1.0 / radii, p)
    return radii[None, :, None] * np.expm1(np.log1p(ex) / p)


def _radii(spec: LayerSpec, A: np.ndarray, cfg: SeparationConfig) -> np.ndarray:
    T = cfg.hop.threshold(spec)
    r0 = T + 1.0 + float(max(lp_norm(a, spec.p) for a in A))
    r1 = max(cfg.max_radius, 4.0 * r0)
    return np.geomspace(r0, r1, cfg.radii)


def _closer(U, A, radii, p, metric) -> np.ndarray:
    """Whether some ``x_k`` beats ``y`` at each (direction, radius)."""
    if metric == "norm":
        return np.any(_pow_excess(U, A, 1.0 / radii, p) < 0.0, axis=-1)
    if metric == "hop":
        # far regime: hop distance is the ceiling of the norm distance
        ex = _ray_distances(U, A, radii, p)
        R = radii[None, :, None]
        return np.any(np.ceil(R + ex) < np.ceil(R), axis=-1)
    raise ValueError("metric must be 'norm' or 'hop'")


def _distinct(points, spec: LayerSpec) -> None:
    for i, j in itertools.combinations(range(len(points)), 2):
        if np.array_equal(points[i].coords, points[j].coords):
            raise ValueError("points must be distinct")


def _directions_verdict(U, A, spec, cfg, omega):
    radii = _radii(spec, A, cfg)
    ok = _closer(U, A, radii, spec.p, cfg.metric)
    if cfg.metric == "norm":
        passed = np.all(ok[:, -cfg.tail:], axis=1)
    else:
        passed = np.all(ok, axis=1)
    bad = np.flatnonzero(~passed)
    fail = tuple(U[bad[0]].tolist()) if bad.size else None
    return SeparationVerdict(omega, bool(passed.all()), int(ok.size), float(radii[-1]), fail)


def omega_check(x1: LayerPoint, x2: LayerPoint, y: LayerPoint) -> bool:
    """Projections of ``x1, x2`` differ and ``pr(y)`` is strictly between them."""
    a, b, c = float(x1.h[0]), float(x2.h[0]), float(y.h[0])
    return a != b and min(a, b) < c < max(a, b)


def gamma_check(x1: LayerPoint, x2: LayerPoint, y: LayerPoint, spec: LayerSpec,
                cfg: SeparationConfig = SeparationConfig()) -> bool:
    """Far points on both horizontal rays from ``y`` end up closer to ``x1`` or ``x2``.

    With ``cfg.metric == "hop"`` the comparison uses hop distances, which in
    the far regime are ceilings of norm distances; integer ties then make
    the test fail whenever a projection gap is below one.
    """
    if spec.n != 1:
        raise ValueError("gamma_check is planar; use gamma_hat_check for n >= 2")
    _distinct([x1, x2, y], spec)
    A = np.array([y.coords - x1.coords, y.coords - x2.coords])
    U = np.array([[1.0] + [0.0] * spec.m, [-1.0] + [0.0] * spec.m])
    return _directions_verdict(U, A, spec, cfg, omega_check(x1, x2, y)).gamma


def omega_hat_check(xs: Sequence[LayerPoint], y: LayerPoint,
                    tol: Tolerance = DEFAULT_TOL) -> bool:
    """``pr(y)`` lies in the nonempty interior of the hull of the ``pr(x_k)``."""
    n = y.h.size
    if len(xs) != n + 1:
        raise ValueError(f"need {n + 1} points for n = {n}")
    return hull_interior_contains(np.array([x.h for x in xs]), y.h, tol)


def _sphere_directions(n: int, count: int, p: float) -> np.ndarray:
    if n == 1:
        E = np.array([[1.0], [-1.0]])
    elif n == 2:
        th = 2 * np.pi * (np.arange(count) + 0.5) / count
        E = np.column_stack([np.cos(th), np.sin(th)])
    else:
        s = qmc.Sobol(n, scramble=True, seed=0).random(count)
        E = ndtri(np.clip(s, 1e-12, 1 - 1e-12))
    return E / np.array([lp_norm(e, p) for e in E])[:, None]


def _from_normal(nu: np.ndarray, p: float) -> np.ndarray:
    # unit vector whose l_p support normal points along nu
    u = np.sign(nu) * np.abs(nu) ** (1.0 / (p - 1.0))
    return u / lp_norm(u, p)


def _adversarial_normals(P: np.ndarray) -> list:
    """Outward facet normals of the simplex on ``P``, or normals of its affine hull."""
    k, n = P.shape
    D = P[1:] - P[0]
    _, sv, Vt = np.linalg.svd(D)
    rank = int(np.sum(sv > 1e-12 * max(sv[0], 1.0))) if sv.size else 0
    if rank < n:
        out = []
        for v in Vt[rank:]:
            out += [v, -v]
        return out
    out = []
    for j in range(k):
        F = np.delete(P, j, axis=0)
        _, _, Vf = np.linalg.svd(F[1:] - F[0])
        nu = Vf[-1]
        if np.dot(nu, P[j] - F[0]) > 0:
            nu = -nu
        out.append(nu)
    return out


def gamma_hat_check(xs: Sequence[LayerPoint], y: LayerPoint, spec: LayerSpec,
                    cfg: SeparationConfig = SeparationConfig()) -> SeparationVerdict:
    """Sampled version of: beyond some radius, every horizontal point near ``y``'s
    section is closer to some ``x_k`` than to ``y``.

    Directions are a low-discrepancy set on the horizontal unit sphere plus
    the directions whose support normals are the outward facet normals of
    the projected simplex (or the normals of its affine hull when flat).
    """
    spec.require_smooth()
    n = spec.n
    if n < 2:
        raise ValueError("gamma_hat_check needs n >= 2")
    if len(xs) != n + 1:
        raise ValueError(f"need {n + 1} points for n = {n}")
    pts = list(xs) + [y]
    if any(pt.h.size != n or pt.v.size != spec.m for pt in pts):
        raise ValueError("points do not match the layer dimensions")
    _distinct(pts, spec)
    P = np.array([x.h for x in xs])
    extra = [_from_normal(nu, spec.p) for nu in _adversarial_normals(P)]
    Uh = np.vstack([_sphere_directions(n, cfg.directions, spec.p)] + [e[None, :] for e in extra])
    U = np.hstack([Uh, np.zeros((Uh.shape[0], spec.m))])
    A = np.array([y.coords - x.coords for x in xs])
    return _directions_verdict(U, A, spec, cfg, omega_hat_check(xs, y))


# --------------------------------------------------------------------------
# width detector

@dataclass(frozen=True)
class WidthWitnessTriple:
    """``y`` above ``x`` across the vertical cube, ``z`` beside ``x``, ``|y - z| = k``."""

    x: LayerPoint
    y: LayerPoint
    z: LayerPoint
    k: int
    delta: float


def width_witness(spec: LayerSpec, tol: Tolerance = DEFAULT_TOL) -> WidthWitnessTriple:
    """Triple certifying ``k^p - delta^p >= (eps d)^p`` with ``d`` the cube diameter.

    ``k`` is the least integer at least ``eps * d`` (and at least one), and
    ``delta`` makes ``|y - z|_p`` equal to ``k`` exactly.
    """
    spec.require_smooth()
    p, n, m = spec.p, spec.n, spec.m
    s = spec.eps * cube_diameter(m, p)
    k = round(s) if abs(s - round(s)) <= 1e-12 * max(1.0, s) else math.ceil(s)
    k = max(int(k), 1)
    delta = max(k ** p - s ** p, 0.0) ** (1.0 / p)
    x = LayerPoint(np.zeros(n), np.zeros(m))
    y = LayerPoint(np.zeros(n), np.full(m, spec.eps))
    zh = np.zeros(n)
    zh[0] = delta
    z = LayerPoint(zh, np.zeros(m))
    trip = WidthWitnessTriple(x, y, z, k, delta)
    if not (abs(lp_dist(y, z, spec) - k) < tol.abs_tol
            and abs(lp_dist(x, z, spec) - delta) < tol.abs_tol
            and k ** p - delta ** p >= s ** p - tol.abs_tol):
        raise RuntimeError("width witness failed its own invariants")
    return trip


def width_inequality_holds(trip: WidthWitnessTriple, eps_prime: float, spec: LayerSpec) -> bool:
    """``k^p - delta^p >= eps'^p d^p`` for the stored triple."""
    p = spec.p
    d = cube_diameter(spec.m, p)
    return trip.k ** p - trip.delta ** p >= (eps_prime * d) ** p


def recover_width(trip: WidthWitnessTriple, spec: LayerSpec, xtol: float = 1e-12) -> float:
    """Largest ``eps'`` satisfying :func:`width_inequality_holds`, by bisection."""
    lo, hi = 0.0, trip.k / cube_diameter(spec.m, spec.p) + 1.0
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if width_inequality_holds(trip, mid, spec):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# --------------------------------------------------------------------------
# isometries

class LayerNotPreservedError(ValueError):
    """The map sends some point of the layer outside it."""


@dataclass(frozen=True)
class RigidMotion:
    """Affine map ``h -> Q h + t``, ``v -> B v + c`` of ``R^n x R^m``."""

    Q: np.ndarray
    t: np.ndarray
    B: np.ndarray
    c: np.ndarray

    @classmethod
    def identity(cls, spec: LayerSpec) -> "RigidMotion":
        return cls(np.eye(spec.n), np.zeros(spec.n), np.eye(spec.m), np.zeros(spec.m))

    def then(self, other: "RigidMotion") -> "RigidMotion":
        """Apply ``self`` first, then ``other``."""
        return RigidMotion(other.Q @ self.Q, other.Q @ self.t + other.t,
                           other.B @ self.B, other.B @ self.c + other.c)

    def apply(self, pt: LayerPoint) -> LayerPoint:
        return LayerPoint(self.Q @ pt.h + self.t, self.B @ pt.v + self.c)

    @classmethod
    def translation(cls, spec: LayerSpec, t) -> "RigidMotion":
        return cls(np.eye(spec.n), np.asarray(t, float), np.eye(spec.m), np.zeros(spec.m))

    @classmethod
    def vertical_flip(cls, spec: LayerSpec, mask=None) -> "RigidMotion":
        """``v_i -> eps - v_i`` on the coordinates selected by ``mask`` (all by default)."""
        mask = np.ones(spec.m, bool) if mask is None else np.asarray(mask, bool)
        sgn = np.where(mask, -1.0, 1.0)
        return cls(np.eye(spec.n), np.zeros(spec.n), np.diag(sgn), np.where(mask, spec.eps, 0.0))


def random_layer_motion(spec: LayerSpec, rng: np.random.Generator) -> RigidMotion:
    """Random composition of layer symmetries.

    Horizontal part: any orthogonal map when ``p = 2``, a signed permutation
    otherwise.  Vertical part: a permutation of the cube coordinates with
    independent flips ``v -> eps - v``.
    """
    n, m = spec.n, spec.m
    if spec.p == 2.0 and n >= 2:
        Q = ortho_group.rvs(n, random_state=rng)
    else:
        Q = np.eye(n)[rng.permutation(n)] * rng.choice([-1.0, 1.0], size=n)[:, None]
    t = rng.uniform(-10.0, 10.0, n)
    B = np.eye(m)[rng.permutation(m)]
    flips = rng.random(m) < 0.5
    B = np.diag(np.where(flips, -1.0, 1.0)) @ B
    c = np.where(flips, spec.eps, 0.0)
    return RigidMotion(Q, t, B, c)


def _unit_pairs(spec: LayerSpec, count: int, rng: np.random.Generator) -> list:
    out = []
    while len(out) < count:
        a = np.concatenate([rng.uniform(-5.0, 5.0, spec.n), rng.uniform(0.0, spec.eps, spec.m)])
        d = rng.normal(size=spec.dim)
        b = a + d / lp_norm(d, spec.p)
        if in_layer(b, spec, Tolerance(abs_tol=0.0, rel_tol=1e-12)):
            out.append((LayerPoint.split(a, spec.n), LayerPoint.split(b, spec.n)))
    return out


def isometry_sanity(spec: LayerSpec, transform: RigidMotion, sample: int = 100,
                    seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Check that ``transform`` maps unit pairs of the layer to unit pairs of the layer.

    Raises :class:`LayerNotPreservedError` when a corner of the vertical cube
    or a sampled point leaves the layer; returns ``False`` when a unit
    distance is broken.
    """
    corners = itertools.product([0.0, spec.eps], repeat=spec.m)
    for v in corners:
        img = transform.apply(LayerPoint(np.zeros(spec.n), v))
        if not in_layer(img, spec, tol):
            raise LayerNotPreservedError(f"corner {list(v)} maps to {img.v.tolist()}")
    rng = np.random.default_rng(seed)
    for a, b in _unit_pairs(spec, sample, rng):
        fa, fb = transform.apply(a), transform.apply(b)
        if not (in_layer(fa, spec, tol) and in_layer(fb, spec, tol)):
            raise LayerNotPreservedError("a sampled point leaves the layer")
        if not tol.is_unit(lp_dist(fa, fb, spec)):
            return False
    return True
