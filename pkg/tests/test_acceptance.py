"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line that is echoed in the pytest terminal
summary under "acceptance criteria".
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from unitlayers.analysis import (
    LayerNotPreservedError,
    RigidMotion,
    distinguish,
    gamma_check,
    gamma_hat_check,
    isometry_sanity,
    omega_check,
    random_layer_motion,
    recover_width,
    width_witness,
)
from unitlayers.gadgets import (
    build_extreme_comb,
    comb_exists,
    comb_min_width,
    modified_comb_exists,
    odd_cycle_min_width,
    sandwich_fits,
    validate_comb,
)
from unitlayers.hopmetric import HopConfig, hop_distance, two_hop_decision, validate_witness
from unitlayers.layer_core import LayerPoint, LayerSpec, lp_dist, unit_equidistant_pair


def _far_pair(spec, T, rng):
    d = rng.uniform(T, T + 50)
    while d <= T:
        d = rng.uniform(T, T + 50)
    a_v = rng.uniform(0, spec.eps, spec.m)
    b_v = rng.uniform(0, spec.eps, spec.m)
    dv = np.abs(a_v - b_v)
    hlen = (d ** spec.p - np.sum(dv ** spec.p)) ** (1 / spec.p)
    u = rng.normal(size=spec.n)
    u /= np.sum(np.abs(u) ** spec.p) ** (1 / spec.p)
    a_h = rng.uniform(-100, 100, spec.n)
    return LayerPoint(a_h, a_v), LayerPoint(a_h + hlen * u, b_v)


def test_criterion_1_ceiling_formula(record_criterion):
    specs = [LayerSpec.strip(0.3), LayerSpec.strip(0.7), LayerSpec.strip(1.5), LayerSpec(2, 1, 2, 0.4)]
    rng = np.random.default_rng(2024)
    cfg = HopConfig()
    pairs = []
    for i in range(1000):
        spec = specs[i % 4]
        a, b = _far_pair(spec, cfg.threshold(spec), rng)
        pairs.append((spec, a, b))
    t0 = time.perf_counter()
    bad = 0
    for spec, a, b in pairs:
        d = lp_dist(a, b, spec)
        iv = hop_distance(a, b, spec, cfg)
        ok = (iv.exact and iv.lower == iv.upper == math.ceil(d) and iv.witness is not None
              and validate_witness(iv.witness, spec, cfg.tol, start=a, end=b))
        bad += not ok
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 10.0
    record_criterion(1, ok, f"{1000 - bad}/1000 exact with validated witness in {elapsed:.2f} s (< 10 s)")
    assert bad == 0
    assert elapsed < 10.0


def test_criterion_2_comb_threshold_sharpness(record_criterion):
    worst = 0.0
    ok = True
    for N, M in [(1, 1), (3, 2), (4, 5), (9, 10)]:
        thr = comb_min_width(N, M)
        closed = math.sqrt(1 - N * N / (4 * M * M))
        worst = max(worst, abs(thr - closed))
        eps_hi = thr + 1e-6
        rep = validate_comb(build_extreme_comb(N, M, eps_hi), LayerSpec.strip(eps_hi))
        ok &= rep.valid and not comb_exists(N, M, thr - 1e-6) and comb_exists(N, M, eps_hi)
    ok &= worst <= 1e-12
    record_criterion(2, ok, f"validated at +1e-6, absent at -1e-6, closed-form error {worst:.1e}")
    assert ok


def test_criterion_3_distinguisher(record_criterion):
    w1 = distinguish(0.6, 0.7)
    ok1 = (w1.kind == "comb" and (w1.params["N"], w1.params["M"]) == (3, 2)
           and w1.threshold_text == "sqrt(7)/4" and abs(w1.threshold - math.sqrt(7) / 4) < 1e-15
           and 0.6 < w1.threshold < 0.7 and comb_exists(3, 2, 0.7) and not comb_exists(3, 2, 0.6))
    w2 = distinguish(1.6, 1.7)
    ok2 = (w2.kind == "modified-comb" and (w2.params["N"], w2.params["M"]) == (3, 2)
           and modified_comb_exists(3, 2, 1.7) and not modified_comb_exists(3, 2, 1.6))
    w3 = distinguish(1.3, 2.3)
    ok3 = (w3.kind == "sandwich" and w3.params["m_s"] == 2 and w3.present_in == 2
           and sandwich_fits(2, 2.3) and not sandwich_fits(2, 1.3))
    rng = np.random.default_rng(3)
    equal = 0
    for _ in range(100):
        x = Fraction(int(rng.integers(1, 10**6)), int(rng.integers(1, 10**4)))
        equal += distinguish(x, Fraction(x.numerator * 7, x.denominator * 7)).kind == "equal"
    ok = ok1 and ok2 and ok3 and equal == 100
    record_criterion(3, ok, f"comb (3,2) sqrt(7)/4: {ok1}; modified comb: {ok2}; sandwich m_s=2: {ok3}; "
                            f"equal {equal}/100")
    assert ok


def test_criterion_4_midpoint_law(record_criterion):
    rng = np.random.default_rng(4)
    worst_mid, worst_res, bad = 0.0, 0.0, 0
    for i in range(500):
        p = [1.5, 2.0, 3.0][i % 3]
        spec = LayerSpec(2, 1, p, rng.uniform(0.3, 2.0))
        x = LayerPoint(rng.uniform(-5, 5, 2), [rng.uniform(0, spec.eps)])
        while True:
            yv = rng.uniform(0, spec.eps)
            dv = abs(yv - x.v[0])
            if dv < 2:
                break
        u = rng.normal(size=2)
        u /= np.sum(np.abs(u) ** p) ** (1 / p)
        h = (2 ** p - dv ** p) ** (1 / p)
        y = LayerPoint(x.h + h * u, [yv])
        res = unit_equidistant_pair(x, y, spec)
        if res.kind != "unique-midpoint":
            bad += 1
            continue
        worst_mid = max(worst_mid, float(np.max(np.abs(res.points[0].coords - 0.5 * (x.coords + y.coords)))))
    for i in range(500):
        p = [1.5, 2.0, 3.0][i % 3]
        spec = LayerSpec(2, 1, p, rng.uniform(0.3, 2.0))
        x = LayerPoint(rng.uniform(-5, 5, 2), [rng.uniform(0, spec.eps)])
        yv = rng.uniform(0, spec.eps)
        dv = abs(yv - x.v[0])
        d = rng.uniform(min(dv, 1.9) + 0.05, 1.99)
        u = rng.normal(size=2)
        u /= np.sum(np.abs(u) ** p) ** (1 / p)
        y = LayerPoint(x.h + (d ** p - dv ** p) ** (1 / p) * u, [yv])
        res = unit_equidistant_pair(x, y, spec)
        if res.kind != "pair":
            bad += 1
            continue
        z1, z2 = res.points
        if np.array_equal(z1.coords, z2.coords):
            bad += 1
        for z in (z1, z2):
            worst_res = max(worst_res, abs(lp_dist(z, x, spec) - 1), abs(lp_dist(z, y, spec) - 1))
    ok = bad == 0 and worst_mid < 1e-9 and worst_res < 1e-8
    record_criterion(4, ok, f"midpoint error {worst_mid:.1e} (< 1e-9), pair residual {worst_res:.1e} "
                            f"(< 1e-8), failures {bad}")
    assert ok


def test_criterion_5_gamma_omega_equivalence(record_criterion):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    planar_agree = 0
    for i in range(1000):
        eps = [0.4, 0.9, 1.7][i % 3]
        spec = LayerSpec.strip(eps)
        pts = [LayerPoint([rng.uniform(-3, 3)], [rng.uniform(0, eps)]) for _ in range(3)]
        if i % 2:
            # put y between the other two half of the time
            lo, hi = sorted([pts[0].h[0], pts[1].h[0]])
            pts[2] = LayerPoint([rng.uniform(lo, hi)], pts[2].v)
        planar_agree += omega_check(*pts) == gamma_check(*pts, spec)
    layer_agree, layer_total = 0, 0
    for p in (1.5, 2.0, 3.0):
        for i in range(300):
            spec = LayerSpec(2, 1, p, [0.3, 0.8, 1.6][i % 3])
            xs = [LayerPoint(rng.uniform(-3, 3, 2), [rng.uniform(0, spec.eps)]) for _ in range(3)]
            if i % 2:
                lam = rng.dirichlet(np.ones(3))
                yh = sum(l * x.h for l, x in zip(lam, xs))
            else:
                yh = rng.uniform(-3, 3, 2)
            y = LayerPoint(yh, [rng.uniform(0, spec.eps)])
            v = gamma_hat_check(xs, y, spec)
            layer_agree += v.omega == v.gamma
            layer_total += 1
    elapsed = time.perf_counter() - t0
    ok = planar_agree == 1000 and layer_agree == layer_total and elapsed < 60
    record_criterion(5, ok, f"planar {planar_agree}/1000, layer {layer_agree}/{layer_total}, {elapsed:.1f} s (< 60 s)")
    assert ok


def test_criterion_6_width_detector(record_criterion):
    spec = LayerSpec(2, 1, 2.0, 0.5)
    t = width_witness(spec)
    resid = abs(lp_dist(t.y, t.z, spec) - 1)
    rec = recover_width(t, spec)
    ok = t.k == 1 and abs(t.delta - math.sqrt(0.75)) < 1e-12 and resid < 1e-12 and abs(rec - 0.5) < 1e-9
    record_criterion(6, ok, f"k={t.k}, delta={t.delta:.15f}, |d(y,z)-1|={resid:.1e}, recovered eps error {abs(rec - 0.5):.1e}")
    assert ok


def test_criterion_7_odd_cycle_threshold(record_criterion):
    widths = {k: odd_cycle_min_width(k) for k in (3, 5, 7, 9)}
    err3 = abs(widths[3] - math.sqrt(3) / 2)
    mono = all(widths[a] >= widths[b] for a, b in [(3, 5), (5, 7), (7, 9)])
    ok = err3 <= 1e-3 and mono
    record_criterion(7, ok, "min widths " + ", ".join(f"k={k}: {w:.4f}" for k, w in widths.items())
                     + f"; |w3 - sqrt(3)/2| = {err3:.1e}")
    assert ok


def test_criterion_8_near_pair_case_study(record_criterion):
    spec = LayerSpec.strip(0.5)
    a, b = LayerPoint([0.0], [0.0]), LayerPoint([0.5], [0.0])
    apex = math.sqrt(1 - 0.25 ** 2)
    two = two_hop_decision(a, b, spec)
    iv = hop_distance(a, b, spec)
    witness_ok = iv.witness is not None and validate_witness(iv.witness, spec, start=a, end=b)
    ok = (not two) and abs(apex - math.sqrt(15) / 4) < 1e-15 and iv.exact and iv.lower == 3 \
        and iv.upper == 3 and witness_ok
    record_criterion(8, ok, f"two-hop {two} (apex {apex:.4f} > 0.5); hop interval "
                            f"[{iv.lower}, {iv.upper}], exact={iv.exact}, expected exactly 3")
    assert ok


def test_criterion_9_isometry_sanity(record_criterion):
    rng = np.random.default_rng(9)
    specs = [LayerSpec(2, 1, 2.0, 0.5), LayerSpec(3, 2, 2.0, 0.7), LayerSpec(2, 2, 3.0, 0.4),
             LayerSpec(1, 1, 2.0, 0.8), LayerSpec(2, 1, 1.5, 1.3)]
    passed = 0
    for i in range(200):
        spec = specs[i % len(specs)]
        passed += isometry_sanity(spec, random_layer_motion(spec, rng), sample=100, seed=i)
    rejected = 0
    for j, (spec, T) in enumerate(_violating_maps(specs)):
        try:
            rejected += not isometry_sanity(spec, T, sample=100, seed=j)
        except LayerNotPreservedError:
            rejected += 1
    ok = passed == 200 and rejected == 20
    record_criterion(9, ok, f"{passed}/200 layer motions pass, {rejected}/20 violating maps rejected")
    assert ok


def _violating_maps(specs):
    out = []
    for spec in specs:
        n, m, e = spec.n, spec.m, spec.eps
        ident = RigidMotion.identity(spec)
        # vertical shift leaves the slab
        out.append((spec, RigidMotion(ident.Q, ident.t, ident.B, np.full(m, 0.1))))
        # vertical squeeze keeps the slab but breaks distances
        out.append((spec, RigidMotion(ident.Q, ident.t, 0.8 * ident.B, ident.c)))
        # horizontal scaling
        out.append((spec, RigidMotion(1.1 * ident.Q, ident.t, ident.B, ident.c)))
        # horizontal shear (or a non-permutation rotation for n >= 2)
        if n >= 2:
            Q = np.eye(n)
            Q[0, 1] = 0.5
        else:
            Q = np.array([[0.9]])
        out.append((spec, RigidMotion(Q, ident.t, ident.B, ident.c)))
    return out[:20]


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-q", "-rA"]))
