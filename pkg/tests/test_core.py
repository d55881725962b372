import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trophar.core import (DomainError, canonicalize, sample_segment,
                          segment_breakpoints, segment_point_at, trop_add,
                          trop_dist, trop_lin_combo, trop_scale)


def vectors(e_min=3, e_max=8, lo=-50, hi=50):
    return st.integers(e_min, e_max).flatmap(
        lambda e: st.lists(
            st.floats(lo, hi, allow_nan=False, width=32), min_size=e,
            max_size=e))


class TestCanonicalize:
    def test_first_coordinate_zero(self):
        x = canonicalize([3.0, 5.0, 1.0])
        assert x[0] == 0.0
        np.testing.assert_allclose(x, [0.0, 2.0, -2.0])

    @given(vectors())
    def test_idempotent_and_translation_invariant(self, v):
        x = canonicalize(v)
        np.testing.assert_array_equal(canonicalize(x), x)
        np.testing.assert_allclose(canonicalize(np.asarray(v) + 7.5), x,
                                   atol=1e-9)


class TestSemiringOps:
    def test_trop_add_is_max_canonicalized(self):
        # coordinatewise max of the canonical forms, re-canonicalized
        np.testing.assert_array_equal(
            trop_add([0, 1, 5], [0, 2, 3]), [0, 2, 5])

    def test_trop_scale_is_identity_on_classes(self):
        np.testing.assert_array_equal(trop_scale(2.0, [0, 1, 5]), [0, 1, 5])

    def test_lin_combo_matches_manual(self):
        V = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        lam = np.array([0.0, -1.0])
        expect = np.maximum(lam[0] + V[0], lam[1] + V[1])
        np.testing.assert_array_equal(trop_lin_combo(lam, V), expect)


class TestTropicalDistance:
    def test_known_value(self):
        assert trop_dist([0, 1, 0], [0, 0, 1]) == 2.0

    @given(vectors(), vectors())
    def test_metric_axioms(self, a, b):
        if len(a) != len(b):
            return
        a, b = np.asarray(a, float), np.asarray(b, float)
        d = trop_dist(a, b)
        assert d >= 0
        assert trop_dist(b, a) == pytest.approx(d, abs=1e-9)
        assert trop_dist(a + 3.0, b) == pytest.approx(d, abs=1e-9)

    @given(vectors())
    def test_zero_iff_projectively_equal(self, a):
        a = np.asarray(a, float)
        assert trop_dist(a, a + 2.0) == pytest.approx(0.0, abs=1e-12)


class TestSegment:
    def setup_method(self):
        self.rng = np.random.default_rng(11)

    def test_endpoints(self):
        u = np.array([0.0, 0.0, 0.0])
        v = np.array([0.0, 3.0, 1.0])
        d = v - u
        np.testing.assert_allclose(segment_point_at(u, v, d.min()),
                                   canonicalize(v), atol=1e-12)
        np.testing.assert_allclose(segment_point_at(u, v, d.max()),
                                   canonicalize(u), atol=1e-12)

    def test_out_of_range_raises(self):
        with pytest.raises(DomainError):
            segment_point_at([0, 0, 0], [0, 3, 1], 100.0)

    def test_distance_law_random(self):
        for _ in range(300):
            e = self.rng.integers(3, 9)
            u = canonicalize(self.rng.uniform(-10, 10, e))
            v = canonicalize(self.rng.uniform(-10, 10, e))
            d = v - u
            l1, l2 = self.rng.uniform(d.min(), d.max(), 2)
            got = trop_dist(segment_point_at(u, v, l1),
                            segment_point_at(u, v, l2))
            assert got == pytest.approx(abs(l2 - l1), abs=1e-9)

    def test_sampled_point_between_endpoints(self):
        u = canonicalize(self.rng.uniform(-5, 5, 5))
        v = canonicalize(self.rng.uniform(-5, 5, 5))
        total = trop_dist(u, v)
        for _ in range(100):
            x = sample_segment(u, v, self.rng)
            assert trop_dist(u, x) + trop_dist(x, v) == pytest.approx(
                total, abs=1e-9)

    def test_breakpoints_interior_count(self):
        for _ in range(100):
            e = self.rng.integers(3, 9)
            u = canonicalize(self.rng.uniform(-10, 10, e))
            v = canonicalize(self.rng.uniform(-10, 10, e))
            seg = segment_breakpoints(u, v)
            assert len(seg.breakpoints) <= e
            assert len(seg.breakpoints) - 2 <= e - 2
            np.testing.assert_allclose(seg.breakpoints[0], v, atol=1e-12)
            np.testing.assert_allclose(seg.breakpoints[-1], u, atol=1e-12)

    def test_breakpoints_lie_on_segment(self):
        u = canonicalize(np.array([0.0, 0.0, 0.0, 0.0]))
        v = canonicalize(np.array([0.0, 1.0, 3.0, 1.0]))
        seg = segment_breakpoints(u, v)
        total = trop_dist(u, v)
        for b in seg.breakpoints:
            b = np.asarray(b)
            assert trop_dist(u, b) + trop_dist(b, v) == pytest.approx(
                total, abs=1e-12)

    def test_known_breakpoint(self):
        # v - u = (0, 2, 0) bends once, at the point (0, 2, 0) itself
        seg = segment_breakpoints([0, 0, 0], [0, 2, 0])
        assert len(seg.breakpoints) == 2
