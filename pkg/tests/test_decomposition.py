import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import random_hermitian, random_unit, solved, solved_sic
from mufpairs.channels import ChannelParams, pt_isotropic
from mufpairs.decomposition import (
    FAILED,
    INCONCLUSIVE,
    NOT_APPLICABLE_T0,
    VERIFIED,
    NotVerifiedError,
    decomposition_residual,
    product_sum,
    reconstruct,
    reconstruction_check,
    theorem1_report,
    theorem2_check,
)
from mufpairs.experiments import fourier_pair, product_pair
from mufpairs.frames import Frame, MufPair


def brute_residual(p):
    """Sum of explicit Kronecker products of rank-one projectors."""
    d = p.d
    total = np.zeros((d * d, d * d), dtype=complex)
    for w, x, y in zip(p.weights, p.x.vectors, p.y.vectors):
        total += w * np.kron(np.outer(x, x.conj()), np.outer(y, y.conj()))
    return np.linalg.norm(total - pt_isotropic(ChannelParams(d, p.t)))


def random_unitary(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


class TestResidual:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_t0_product(self, rng, d):
        a, b = random_unitary(rng, d).T, random_unitary(rng, d).T
        assert decomposition_residual(product_pair(d, a, b)) < 1e-12

    def test_sic(self):
        res = solved_sic(2)
        assert decomposition_residual(res.best_pair) < 1e-9

    def test_broken_norm(self):
        p = fourier_pair(2)
        X = p.x.vectors.copy()
        X[1] *= 1.1
        broken = MufPair(Frame(X, check=False), Frame(p.y.vectors, check=False), 0.0)
        assert decomposition_residual(broken) > 1e-3

    def test_matches_brute_force(self, rng):
        d = 3
        p = MufPair(Frame([random_unit(rng, d) for _ in range(9)]), Frame([random_unit(rng, d) for _ in range(9)]), 0.1)
        assert decomposition_residual(p) == pytest.approx(brute_residual(p), rel=1e-12)

    def test_invariances(self, rng):
        res = solved(3, 0.2)
        p = res.best_pair
        d = p.d
        base = decomposition_residual(p)
        perturbed = MufPair(Frame(p.x.vectors + 1e-3 * rng.standard_normal(p.x.vectors.shape), check=False),
                            Frame(p.y.vectors, check=False), p.t)
        r0 = decomposition_residual(perturbed)
        ph = np.exp(2j * np.pi * rng.random((2, d * d)))
        U = random_unitary(rng, d)
        variants = [
            MufPair(Frame(perturbed.x.vectors * ph[0][:, None], check=False),
                    Frame(perturbed.y.vectors * ph[1][:, None], check=False), p.t),
            MufPair(Frame(perturbed.x.vectors @ U.T, check=False), Frame(perturbed.y.vectors @ U.T, check=False), p.t),
            perturbed.swapped(),
        ]
        for q in variants:
            assert abs(decomposition_residual(q) - r0) < 1e-10
        assert base < 1e-9

    def test_uniform_weights_are_optimal(self):
        p = solved(2, 0.2).best_pair
        base = decomposition_residual(p)
        for sign in (1, -1):
            w = np.full(4, 0.25)
            w[0] += sign * 1e-3
            w /= w.sum()
            q = MufPair(Frame(p.x.vectors, w), Frame(p.y.vectors, w), p.t)
            assert decomposition_residual(q) > base


class TestTheorem1:
    def test_verified(self):
        rep = theorem1_report(solved(2, 0.2).best_pair)
        assert rep.verdict == VERIFIED
        assert rep.weights_dev < 1e-6
        assert rep.ic_rank == (4, 4)

    def test_swapped(self):
        assert theorem1_report(solved(2, 0.2).best_pair.swapped()).verdict == VERIFIED

    def test_t0(self):
        rep = theorem1_report(fourier_pair(3))
        assert rep.verdict == NOT_APPLICABLE_T0
        assert rep.residual_frobenius < 1e-12
        assert rep.ic_rank[0] == 3

    def test_failed_reports_everything(self):
        p = fourier_pair(2).with_t(0.1)
        rep = theorem1_report(p)
        assert rep.verdict == FAILED
        assert "residual" in rep.failures
        assert rep.tightness[0] < 1e-12


class TestTheorem2:
    def test_sic_pair(self):
        p = solved_sic(2).best_pair
        rep = theorem2_check(p, tol=1e-5)
        assert rep.verdict == VERIFIED
        assert rep.residual_frobenius < 1e-8

    def test_t0_basis_product(self):
        rep = theorem2_check(product_pair(2))
        assert rep.verdict == INCONCLUSIVE
        assert "informational-completeness" in rep.failures
        assert rep.residual_frobenius < 1e-15

    def test_violated_relations(self, rng):
        p = solved(2, 0.2).best_pair
        Y = p.y.vectors.copy()
        Y[0] = Y[0] + 0.3 * random_unit(rng, 2)
        Y[0] /= np.linalg.norm(Y[0])
        rep = theorem2_check(MufPair(p.x, Frame(Y), p.t))
        assert rep.verdict == INCONCLUSIVE and "overlaps" in rep.failures

    @pytest.mark.parametrize("d,t", [(2, 0.1), (2, 0.2), (3, 0.1), (3, 0.2), (2, -1 / 3)])
    def test_corollary_both_directions(self, d, t):
        p = solved(d, t).best_pair
        assert theorem1_report(p).verdict == VERIFIED
        rep = theorem2_check(p, tol=1e-8)
        assert rep.verdict == VERIFIED and rep.residual_frobenius < 1e-6


class TestReconstruction:
    def test_identity(self):
        p = solved(2, 0.2).best_pair
        assert reconstruction_check(p, np.eye(2)) < 1e-12

    def test_projector(self):
        p = solved(2, 0.2).best_pair
        for rho in p.y.projectors():
            assert reconstruction_check(p, rho) < 1e-6

    def test_random_hermitian(self, rng):
        for d, t in ((2, 0.2), (3, 0.1)):
            p = solved(d, t).best_pair
            for _ in range(5):
                assert reconstruction_check(p, random_hermitian(rng, d)) < 1e-6

    def test_guards(self):
        with pytest.raises(ZeroDivisionError):
            reconstruction_check(fourier_pair(2), np.eye(2))
        with pytest.raises(ZeroDivisionError):
            reconstruct(fourier_pair(2), np.eye(2))
        with pytest.raises(NotVerifiedError):
            reconstruction_check(fourier_pair(2).with_t(0.1), np.eye(2))

    def test_product_sum_trace(self):
        assert np.trace(product_sum(solved(3, 0.1).best_pair)) == pytest.approx(1)
