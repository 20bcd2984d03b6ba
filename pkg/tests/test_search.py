import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from conftest import solved
from mufpairs.decomposition import decomposition_residual
from mufpairs.experiments import product_pair
from mufpairs.frames import Frame, MufPair, muf_relation_check
from mufpairs.search import (
    FOUND,
    NOT_FOUND,
    PreconditionError,
    SearchConfig,
    continuation_sweep,
    covariant_residual,
    encode_pair,
    encode_vectors,
    local_optimize,
    loss_and_gradient,
    multistart_search,
    random_start,
    restart_seed,
)


def finite_difference(cfg, x, h=1e-6):
    g = np.empty_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (loss_and_gradient(x + e, cfg)[0] - loss_and_gradient(x - e, cfg)[0]) / (2 * h)
    return g


def random_unitary(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        dict(d=1, t=0.0),
        dict(d=2, t=0.5),
        dict(d=2, t=-0.4),
        dict(d=2, t=0.1, ansatz="other"),
        dict(d=2, t=0.1, restarts=0),
        dict(d=2, t=0.1, max_iterations=-1),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)

    def test_endpoints_accepted(self):
        SearchConfig(2, 1 / 3)
        SearchConfig(2, -1 / 3)

    def test_sizes(self):
        assert SearchConfig(3, 0.1).n_params == 2 * 3 * 18
        assert SearchConfig(3, 0.1, "covariant").n_params == 12
        assert SearchConfig(3, 0.25, "sic").n_params == 6

    def test_wrong_param_count(self):
        with pytest.raises(ValueError):
            loss_and_gradient(np.zeros(3), SearchConfig(2, 0.1))


class TestGradient:
    @pytest.mark.parametrize("d", [2, 3])
    @pytest.mark.parametrize("ansatz", ["general", "covariant", "sic"])
    def test_finite_differences(self, d, ansatz):
        t = 1 / (d + 1) if ansatz == "sic" else 0.1
        cfg = SearchConfig(d, t, ansatz)
        rng = np.random.default_rng(100 + d)
        for _ in range(10):
            x = random_start(rng, cfg)
            g = loss_and_gradient(x, cfg)[1]
            fd = finite_difference(cfg, x)
            assert np.linalg.norm(g - fd) / np.linalg.norm(fd) < 1e-5

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_exact_t0_solution(self, d):
        cfg = SearchConfig(d, 0.0)
        loss, g = loss_and_gradient(encode_pair(product_pair(d)), cfg)
        assert loss < 1e-24
        assert np.linalg.norm(g) < 1e-10

    def test_loss_matches_residual(self, rng):
        cfg = SearchConfig(3, 0.2)
        x = random_start(rng, cfg)
        loss = loss_and_gradient(x, cfg)[0]
        V = x.view(complex).reshape(18, 3)
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        p = MufPair(Frame(V[:9]), Frame(V[9:]), 0.2)
        assert loss == pytest.approx(decomposition_residual(p) ** 2, rel=1e-12)

    def test_invariances(self, rng):
        d = 3
        cfg = SearchConfig(d, 0.15)
        V = random_start(rng, cfg).view(complex).reshape(2 * d * d, d)
        base = loss_and_gradient(encode_vectors(V), cfg)[0]
        ph = np.exp(2j * np.pi * rng.random(2 * d * d))[:, None]
        assert abs(loss_and_gradient(encode_vectors(V * ph), cfg)[0] - base) < 1e-12
        U = random_unitary(rng, d)
        assert abs(loss_and_gradient(encode_vectors(V @ U.T), cfg)[0] - base) < 1e-12
        swapped = np.concatenate([V[d * d:], V[: d * d]])
        assert abs(loss_and_gradient(encode_vectors(swapped), cfg)[0] - base) < 1e-12
        assert abs(loss_and_gradient(encode_vectors(3.0 * V), cfg)[0] - base) < 1e-12

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_covariant_reduction(self, rng, d):
        cfg = SearchConfig(d, 0.1, "covariant")
        x = random_start(rng, cfg)
        loss = loss_and_gradient(x, cfg)[0]
        V = x.view(complex).reshape(2, d)
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        e = covariant_residual(V[0], V[1], 0.1)
        assert d**2 * loss == pytest.approx(np.sum(np.abs(e) ** 2), rel=1e-12)
        # equal to the full orbit decomposition residual
        full = loss_and_gradient(encode_pair(cfg_pair(cfg, x)), SearchConfig(d, 0.1))[0]
        assert loss == pytest.approx(full, rel=1e-10)


def cfg_pair(cfg, x):
    from mufpairs.search import decode_pair

    return decode_pair(x, cfg)


class TestLocalOptimize:
    def test_perturbed_solution(self, rng):
        res = solved(2, 0.2)
        cfg = SearchConfig(2, 0.2)
        start = res.params + 1e-3 * rng.standard_normal(res.params.size)
        out = local_optimize(start, cfg)
        assert out.status == FOUND and out.best_loss < 1e-18
        assert muf_relation_check(out.best_pair).max_dev < 1e-8

    def test_exact_start_returns_immediately(self):
        out = local_optimize(encode_pair(product_pair(3)), SearchConfig(3, 0.0))
        assert out.found and out.iterations == 0 and out.loss_trace == []

    def test_budget(self, rng):
        cfg = SearchConfig(4, 0.1, max_iterations=5)
        out = local_optimize(random_start(rng, cfg), cfg)
        assert len(out.loss_trace) <= 5
        assert out.status == NOT_FOUND and out.reason == "max_iterations"

    def test_trace_monotone(self, rng):
        cfg = SearchConfig(3, 0.1)
        out = local_optimize(random_start(rng, cfg), cfg)
        trace = np.array(out.loss_trace)
        assert np.all(np.diff(trace) <= 0)


class TestMultistart:
    def test_seeds(self):
        assert restart_seed(5, 3) == 6
        assert restart_seed(0, 7) == 7

    @pytest.mark.parametrize("d,t", [(2, 0.1), (2, 0.2), (3, 0.1), (3, 0.2)])
    def test_found(self, d, t):
        res = solved(d, t)
        assert res.found and res.best_loss < 1e-12
        assert muf_relation_check(res.best_pair).max_dev < 1e-8

    def test_determinism_across_workers(self, monkeypatch):
        cfg = SearchConfig(2, 0.15, restarts=6, master_seed=99, stop_on_success=False, max_iterations=300)
        results = []
        for threads in ("1", "4"):
            monkeypatch.setenv("MUF_THREADS", threads)
            results.append(multistart_search(cfg))
        results.append(multistart_search(cfg, workers=3))
        for r in results[1:]:
            assert r.restart_index == results[0].restart_index
            assert r.best_loss == results[0].best_loss
            assert np.array_equal(r.params, results[0].params)

    def test_stop_on_success_deterministic(self):
        cfg = SearchConfig(3, 0.1, restarts=8, master_seed=3)
        a = multistart_search(cfg, workers=1)
        b = multistart_search(cfg, workers=8)
        assert a.restart_index == b.restart_index
        assert np.array_equal(a.params, b.params)

    def test_bad_thread_env(self, monkeypatch):
        monkeypatch.setenv("MUF_THREADS", "0")
        with pytest.raises(ValueError):
            multistart_search(SearchConfig(2, 0.1))


class TestCovariant:
    def test_d3(self):
        res = solved(3, 0.25, "covariant")
        assert res.found
        assert decomposition_residual(res.best_pair) < 1e-8
        assert len(res.fiducials) == 2

    def test_d2_t0(self):
        res = solved(2, 0.0, "covariant")
        assert res.found and decomposition_residual(res.best_pair) < 1e-8


class TestContinuation:
    @pytest.mark.parametrize("d,t0,t1,steps", [(2, 1 / 3, 0.01, 32), (3, 0.25, 0.05, 20)])
    def test_branch(self, d, t0, t1, steps):
        start = solved(d, t0)
        branch = continuation_sweep(d, t0, t1, steps, SearchConfig(d, t0), start=start)
        assert branch[-1].t == pytest.approx(t1)
        assert all(r.best_loss < 1e-16 for r in branch)
        ts = [r.t for r in branch]
        assert np.all(np.diff(ts) < 0)

    def test_requires_start(self):
        with pytest.raises(PreconditionError):
            continuation_sweep(2, 0.2, 0.1, 4, SearchConfig(2, 0.2))

    def test_rejects_non_solution(self, rng):
        cfg = SearchConfig(3, 0.2, max_iterations=1)
        with pytest.raises(PreconditionError):
            continuation_sweep(3, 0.2, 0.1, 4, cfg, start=random_start(rng, cfg))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.floats(-0.05, 0.2), st.integers(0, 2**32 - 1))
def test_loss_nonnegative(d, t, seed):
    cfg = SearchConfig(d, t)
    loss, g = loss_and_gradient(random_start(np.random.default_rng(seed), cfg), cfg)
    assert loss >= 0 and np.all(np.isfinite(g))
