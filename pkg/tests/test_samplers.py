import numpy as np
import pytest

from trophar.core import DomainError, canonicalize, trop_dist
from trophar.diagnostics import chi_square_two_sample
from trophar.polytope import TropicalPolytope
from trophar.samplers import (KERNELS, ChainConfig, MixingError,
                              TargetDensity, extend_segment, mh_filter,
                              resolve_kernel, run_chain, spawn_config)

TRIANGLE = TropicalPolytope([[0, 0, 0], [0, 3, 1], [0, 2, 5]])
FOUR = TropicalPolytope([[0, 0, 0, 0], [0, 1, 3, 1], [0, 1, 2, 5],
                         [0, 2, 5, 10]])


class TestChainConfig:
    def test_defaults_valid(self):
        cfg = ChainConfig()
        assert cfg.iterations >= 1

    @pytest.mark.parametrize("kwargs", [
        {"iterations": 0},
        {"extension_scale": 1.0},
        {"extension_scale": 0.5},
        {"anchor": "nope"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            ChainConfig(**kwargs)

    def test_spawn_config_distinct(self):
        base = ChainConfig(seed=42)
        seeds = {spawn_config(base, k).seed for k in range(8)}
        assert len(seeds) == 8


class TestExtendSegment:
    def test_identity_at_one(self):
        u, v = np.array([0.0, 0.0, 0.0]), np.array([0.0, 3.0, 1.0])
        with pytest.raises(DomainError):
            ChainConfig(extension_scale=1.0)  # config forbids the identity
        u2, v2 = extend_segment(u, v, 1.0 + 1e-15)
        np.testing.assert_allclose(u2, u, atol=1e-9)
        np.testing.assert_allclose(v2, v, atol=1e-9)

    def test_degenerate_raises(self):
        with pytest.raises(DomainError):
            extend_segment([0, 1, 2], [0, 1, 2], 2.0)

    def test_breakpoints_preserved_random(self):
        from trophar.core import segment_breakpoints
        rng = np.random.default_rng(7)
        for _ in range(300):
            e = rng.integers(3, 7)
            u = canonicalize(rng.uniform(-5, 5, e))
            v = canonicalize(rng.uniform(-5, 5, e))
            d = rng.uniform(1.0 + 1e-9, 10.0)
            u2, v2 = extend_segment(u, v, d)
            orig = segment_breakpoints(u, v).breakpoints[1:-1]
            ext = segment_breakpoints(u2, v2).breakpoints[1:-1]
            assert len(orig) == len(ext)
            for a, b in zip(orig, ext):
                np.testing.assert_allclose(a, b, atol=1e-9)

    def test_original_contained_in_extension(self):
        from trophar.core import sample_segment
        rng = np.random.default_rng(8)
        for _ in range(100):
            u = canonicalize(rng.uniform(-5, 5, 4))
            v = canonicalize(rng.uniform(-5, 5, 4))
            u2, v2 = extend_segment(u, v, 4.0)
            ext = TropicalPolytope([u2, v2])
            for _ in range(20):
                assert ext.contains(sample_segment(u, v, rng), 1e-9)


class TestKernelClosure:
    @pytest.mark.parametrize("name", sorted(KERNELS))
    def test_emissions_contained(self, name):
        cfg = ChainConfig(iterations=10, burn_in=20, n_samples=500, seed=1)
        res = run_chain(name, TRIANGLE, TRIANGLE.vertices[0], cfg)
        assert res.samples.shape == (500, 3)
        assert TRIANGLE.contains_batch(res.samples, 1e-9).all()

    @pytest.mark.parametrize("name", sorted(KERNELS))
    def test_reference_path_contained(self, name, monkeypatch):
        import trophar.samplers as samplers
        monkeypatch.setattr(samplers, "_fast", None)
        cfg = ChainConfig(iterations=5, burn_in=5, n_samples=100, seed=2)
        res = run_chain(name, TRIANGLE, TRIANGLE.vertices[0], cfg)
        assert TRIANGLE.contains_batch(res.samples, 1e-9).all()

    def test_single_vertex_polytope_constant(self):
        P = TropicalPolytope([[0, 1, 2]])
        cfg = ChainConfig(iterations=3, n_samples=10, seed=0)
        res = run_chain("vertex2", P, P.vertices[0], cfg)
        assert np.ptp(res.samples, axis=0).max() == 0.0


class TestChainRunner:
    def test_deterministic_for_seed(self):
        cfg = ChainConfig(iterations=5, n_samples=50, seed=9)
        a = run_chain("extrapolation", TRIANGLE, TRIANGLE.vertices[0], cfg)
        b = run_chain("extrapolation", TRIANGLE, TRIANGLE.vertices[0], cfg)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_seed_changes_stream(self):
        a = run_chain("extrapolation", TRIANGLE, TRIANGLE.vertices[0],
                      ChainConfig(iterations=5, n_samples=50, seed=9))
        b = run_chain("extrapolation", TRIANGLE, TRIANGLE.vertices[0],
                      ChainConfig(iterations=5, n_samples=50, seed=10))
        assert not np.array_equal(a.samples, b.samples)

    def test_start_outside_raises(self):
        with pytest.raises(DomainError):
            run_chain("vertex2", TRIANGLE, [0, -5, 0], ChainConfig())

    def test_unknown_kernel(self):
        with pytest.raises(DomainError):
            resolve_kernel("warp-drive")


class TestVertexNu:
    def test_nu_out_of_range(self):
        with pytest.raises(DomainError):
            run_chain("vertexnu", TRIANGLE, TRIANGLE.vertices[0],
                      ChainConfig(nu=5, n_samples=1))

    def test_nu2_matches_vertex_pair(self):
        cfg2 = ChainConfig(iterations=15, burn_in=100, n_samples=8000, seed=3,
                           nu=2)
        a = run_chain("vertex2", TRIANGLE, TRIANGLE.vertices[0], cfg2)
        b = run_chain("vertexnu", TRIANGLE, TRIANGLE.vertices[0], cfg2)
        rep = chi_square_two_sample(a.samples, b.samples, bins=10)
        assert rep.p_value >= 0.001


class TestVertexExtended:
    def test_two_vertex_coverage_beyond_anchor(self):
        # extension lets draws reach the far side of a segment polytope
        P = TropicalPolytope([[0, 0, 0], [0, 4, 4]])
        cfg = ChainConfig(iterations=1, burn_in=0, n_samples=3000, seed=4,
                          extension_scale=4.0)
        res = run_chain("vertex-ext", P, P.vertices[0], cfg)
        pos = res.samples[:, 1]
        assert pos.min() <= 0.1
        assert pos.max() >= 3.9

    def test_mixing_error_on_zero_budget(self):
        cfg = ChainConfig(iterations=5, n_samples=10, seed=5, max_rejects=0)
        with pytest.raises(MixingError):
            run_chain("vertex-ext", TRIANGLE, TRIANGLE.vertices[0], cfg)

    def test_rejection_counter_populated(self):
        cfg = ChainConfig(iterations=50, n_samples=50, seed=6)
        res = run_chain("vertex-ext", TRIANGLE, TRIANGLE.vertices[0], cfg)
        assert res.rejected_segments > 0


class TestTargetDensity:
    def test_validation(self):
        with pytest.raises(DomainError):
            TargetDensity(mu=np.zeros(3), sigma_tr=0.0)
        with pytest.raises(DomainError):
            TargetDensity(mu=np.zeros(3), sigma_tr=1.0, kind="cubic")

    def test_log_density_peak_at_mu(self):
        t = TargetDensity(mu=np.array([0.0, 1.0, 1.0]), sigma_tr=1.0)
        assert t.log_density([0, 1, 1]) == 0.0
        assert t.log_density([0, 3, 1]) < 0.0

    def test_linear_vs_squared(self):
        lin = TargetDensity(mu=np.zeros(3), sigma_tr=2.0, kind="linear")
        sq = TargetDensity(mu=np.zeros(3), sigma_tr=2.0, kind="squared")
        x = [0, 3, 0]
        assert lin.log_density(x) == pytest.approx(-1.5)
        assert sq.log_density(x) == pytest.approx(-4.5)


class TestMHFilter:
    def test_mode_start_always_accepts_itself(self):
        t = TargetDensity(mu=np.array([0.0, 1.0, 1.0]), sigma_tr=1e9)
        cfg = ChainConfig(iterations=3, n_samples=50, seed=7)
        res = mh_filter(TRIANGLE, "extrapolation", t, cfg)
        # near-flat target: every proposal accepted
        assert res.accepted == res.proposed == 50

    def test_flat_limit_matches_base_kernel(self):
        t = TargetDensity(mu=np.array([0.0, 1.0, 1.0]), sigma_tr=1e6)
        cfg = ChainConfig(iterations=15, burn_in=0, n_samples=8000, seed=8)
        filt = mh_filter(TRIANGLE, "vertex2", t, cfg)
        base = run_chain("vertex2", TRIANGLE, canonicalize([0, 1, 1]),
                         ChainConfig(iterations=15, n_samples=8000, seed=81))
        rep = chi_square_two_sample(filt.samples, base.samples, bins=10)
        assert rep.p_value >= 0.001

    def test_tighter_sigma_concentrates(self):
        mu = np.array([0.0, 1.0, 1.0])
        means = []
        for sigma in (0.1, 2.0, 30.0):
            t = TargetDensity(mu=mu, sigma_tr=sigma)
            cfg = ChainConfig(iterations=10, n_samples=1000, seed=12)
            res = mh_filter(TRIANGLE, "extrapolation", t, cfg)
            d = np.array([trop_dist(mu, x) for x in res.samples])
            means.append(d.mean())
        assert means[0] < means[1] < means[2]

    def test_start_outside_raises(self):
        t = TargetDensity(mu=np.array([0.0, -9.0, 0.0]), sigma_tr=1.0)
        with pytest.raises(DomainError):
            mh_filter(TRIANGLE, "vertex2", t, ChainConfig(n_samples=1))
