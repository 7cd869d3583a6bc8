import math

import numpy as np
import pytest

from unitlayers.hopmetric import (
    HopConfig,
    HopInterval,
    WitnessPath,
    default_far_threshold,
    far_witness_path,
    hop_distance,
    hop_lower_bound,
    near_search,
    projection_lower_bound,
    two_hop_decision,
    two_hop_witness,
    validate_witness,
)
from unitlayers.layer_core import LayerPoint, LayerSpec, lp_dist


def P(x, y):
    return LayerPoint([x], [y])


class TestBounds:
    def test_ceiling_lower_bound(self):
        s = LayerSpec.strip(0.5)
        assert hop_lower_bound(P(0, 0), P(20.5, 0), s) == 21
        assert hop_lower_bound(P(0, 0), P(3, 0), s) == 3
        # integer up to tolerance is not bumped
        assert hop_lower_bound(P(0, 0), P(3 + 1e-12, 0), s) == 3

    def test_projection_bound_thin_strip(self):
        # every hop moves at least sqrt(0.75) horizontally
        s = LayerSpec.strip(0.5)
        assert projection_lower_bound(P(0, 0), P(0.5, 0), s) == 7
        assert projection_lower_bound(P(0, 0), P(0.9, 0), s) == 3

    def test_projection_bound_brute_force(self):
        # compare with direct enumeration of sign patterns
        s = LayerSpec.strip(0.6)
        smin = math.sqrt(1 - 0.36)
        for x in np.linspace(0.05, 6.0, 60):
            k = projection_lower_bound(P(0, 0), P(x, 0), s)
            reach = lambda k: any((k - j) * smin - j <= x <= (k - j) - j * smin for j in range(k + 1))
            assert reach(k)
            assert k >= math.ceil(x)
            # one hop is only possible at distance exactly 1
            assert not any(reach(kk) for kk in range(max(math.ceil(x), 2), k))

    def test_wide_layer_uses_ceiling(self):
        s = LayerSpec.strip(1.5)
        assert projection_lower_bound(P(0, 0), P(0.5, 0), s) == 2


class TestThreshold:
    def test_default_values(self):
        assert default_far_threshold(LayerSpec.strip(0.3)) == 36
        assert default_far_threshold(LayerSpec.strip(0.7)) == pytest.approx(19.0)
        assert default_far_threshold(LayerSpec(2, 1, 2, 0.4)) == pytest.approx(16.0)

    def test_override_lower_limit(self):
        with pytest.raises(ValueError):
            HopConfig(far_threshold=5).threshold(LayerSpec.strip(0.5))
        assert HopConfig(far_threshold=40).threshold(LayerSpec.strip(0.5)) == 40


class TestInterval:
    def test_invariants(self):
        with pytest.raises(ValueError):
            HopInterval(3, 2, False)
        with pytest.raises(ValueError):
            HopInterval(2, 3, True)
        assert HopInterval(2, None, False).upper is None


class TestHopDistance:
    def test_spec_example(self):
        s = LayerSpec.strip(0.5)
        iv = hop_distance(P(0, 0), P(20.5, 0), s)
        assert (iv.lower, iv.upper, iv.exact) == (21, 21, True)
        assert validate_witness(iv.witness, s, start=P(0, 0), end=P(20.5, 0))

    def test_zero_and_unit(self):
        s = LayerSpec.strip(0.5)
        assert hop_distance(P(1, 0.2), P(1, 0.2), s).upper == 0
        iv = hop_distance(P(0, 0), P(1, 0), s)
        assert (iv.lower, iv.upper, iv.exact) == (1, 1, True)

    def test_two_hops_when_apex_fits(self):
        s = LayerSpec.strip(1.0)
        a, b = P(0, 0), P(1.8, 0)
        iv = hop_distance(a, b, s)
        assert (iv.lower, iv.upper, iv.exact) == (2, 2, True)
        assert validate_witness(iv.witness, s, start=a, end=b)

    def test_near_pair_thin_strip(self):
        s = LayerSpec.strip(0.5)
        a, b = P(0, 0), P(0.5, 0)
        assert not two_hop_decision(a, b, s)
        iv = hop_distance(a, b, s)
        # a unit hop in this strip moves at least 0.866 sideways, so 3..6 hops cannot net 0.5
        assert iv.lower == 7 and iv.upper == 7 and iv.exact
        assert validate_witness(iv.witness, s, start=a, end=b)

    @pytest.mark.parametrize("spec", [LayerSpec.strip(0.3), LayerSpec.strip(0.7), LayerSpec.strip(1.5),
                                      LayerSpec(2, 1, 2, 0.4), LayerSpec(1, 1, 3.0, 0.7),
                                      LayerSpec(1, 2, 2.0, 0.5), LayerSpec(2, 2, 1.5, 0.6)])
    def test_far_pairs_are_ceilings(self, spec):
        rng = np.random.default_rng(11)
        T = HopConfig().threshold(spec)
        for _ in range(15):
            a = LayerPoint(rng.uniform(-10, 10, spec.n), rng.uniform(0, spec.eps, spec.m))
            u = rng.normal(size=spec.n)
            u /= np.linalg.norm(u)
            b = LayerPoint(a.h + rng.uniform(T + 0.5, T + 30) * u, rng.uniform(0, spec.eps, spec.m))
            d = lp_dist(a, b, spec)
            path = far_witness_path(a, b, spec)
            assert path.edges == math.ceil(d)
            assert validate_witness(path, spec, start=a, end=b)

    def test_far_path_rejects_near_pairs(self):
        with pytest.raises(ValueError):
            far_witness_path(P(0, 0), P(3.5, 0), LayerSpec.strip(0.5))

    def test_sphere_construction_for_n2_short_distance(self):
        s = LayerSpec(2, 1, 2, 0.4)
        a, b = LayerPoint([0, 0], [0]), LayerPoint([2.3, 0.4], [0.3])
        iv = hop_distance(a, b, s)
        assert iv.exact and iv.upper == 3

    def test_outside_layer_rejected(self):
        with pytest.raises(ValueError):
            hop_distance(P(0, 0), P(1, 0.7), LayerSpec.strip(0.5))


class TestTwoHop:
    def test_apex_height(self):
        s = LayerSpec.strip(0.97)
        z = two_hop_witness(P(0, 0), P(0.5, 0), s)
        assert z is not None and z.v[0] == pytest.approx(math.sqrt(15) / 4)

    def test_n2_always_true(self):
        s = LayerSpec(2, 1, 3.0, 0.1)
        assert two_hop_decision(LayerPoint([0, 0], [0]), LayerPoint([0.2, 0.1], [0.1]), s)

    def test_general_p_strip(self):
        s = LayerSpec(1, 1, 3.0, 1.0)
        a, b = P(0, 0.1), P(1.5, 0.2)
        z = two_hop_witness(a, b, s)
        assert z is not None
        assert abs(lp_dist(a, z, s) - 1) < 1e-12 and abs(lp_dist(b, z, s) - 1) < 1e-12


def test_near_search_finds_three_hops():
    s = LayerSpec.strip(0.9)
    a, b = P(0, 0), P(0.3, 0.1)
    assert not two_hop_decision(a, b, s)
    path = near_search(a, b, 3, s)
    assert path is not None and path.edges == 3
    assert validate_witness(path, s, start=a, end=b)


def test_validate_witness_rejects_broken_paths():
    s = LayerSpec.strip(0.5)
    assert not validate_witness(WitnessPath(()), s)
    assert not validate_witness(WitnessPath((P(0, 0), P(0.9, 0))), s)
    assert not validate_witness(WitnessPath((P(0, 0), P(0, 1))), s)
    assert validate_witness(WitnessPath((P(0, 0), P(1, 0))), s, start=P(0, 0), end=P(1, 0))
    assert not validate_witness(WitnessPath((P(0, 0), P(1, 0))), s, end=P(2, 0))
