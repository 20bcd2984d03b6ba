"""Unit-norm frames and the pointwise relations of mutually unbiased frame pairs."""

from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import sym_asym_projectors

UNIT_ATOL = 1e-10
IC_SIGMA_MIN = 1e-6
GAUGE_ZERO = 1e-8


class NormalizationError(ValueError):
    """A vector that must have unit norm does not."""


class UnsupportedWeightsError(ValueError):
    pass


def _as_vectors(vectors):
    V = np.array(vectors, dtype=complex)
    if V.ndim != 2:
        raise ValueError(f"frame vectors must form an (n, d) array, got shape {V.shape}")
    return V


@dataclass(frozen=True, eq=False)
class Frame:
    """``n`` vectors in C^d (rows of ``vectors``) with convex weights.

    Unit norm is checked on construction unless ``check=False``, which
    exists so that deliberately broken frames can be fed to the verifiers.
    """

    vectors: np.ndarray
    weights: np.ndarray = None
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        V = _as_vectors(self.vectors)
        n = V.shape[0]
        w = np.full(n, 1.0 / n) if self.weights is None else np.array(self.weights, dtype=float)
        if w.shape != (n,):
            raise ValueError(f"expected {n} weights, got shape {w.shape}")
        if self.check:
            norms = np.linalg.norm(V, axis=1)
            bad = np.flatnonzero(np.abs(norms - 1) > UNIT_ATOL)
            if bad.size:
                i = int(bad[0])
                raise NormalizationError(f"vector {i} has norm {norms[i]!r}, expected 1")
            if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
                raise ValueError("weights must be nonnegative and sum to 1")
        V.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vectors", V)
        object.__setattr__(self, "weights", w)

    @property
    def d(self):
        return self.vectors.shape[1]

    @property
    def n(self):
        return self.vectors.shape[0]

    def projectors(self):
        V = self.vectors
        return V[:, :, None] * V[:, None, :].conj()

    def gram(self):
        """G[i, j] = <v_i|v_j>."""
        return self.vectors.conj() @ self.vectors.T

    def is_uniform(self, atol=1e-12):
        return bool(np.all(np.abs(self.weights - 1.0 / self.n) <= atol))


@dataclass(frozen=True, eq=False)
class MufPair:
    x: Frame
    y: Frame
    t: float = None

    def __post_init__(self):
        if self.x.vectors.shape != self.y.vectors.shape:
            raise ValueError(
                f"frames differ in shape: {self.x.vectors.shape} vs {self.y.vectors.shape}"
            )
        if not np.array_equal(self.x.weights, self.y.weights):
            raise ValueError("frames must share their weights")

    @property
    def d(self):
        return self.x.d

    @property
    def n(self):
        return self.x.n

    @property
    def weights(self):
        return self.x.weights

    def swapped(self):
        return MufPair(self.y, self.x, self.t)

    def with_t(self, t):
        return replace(self, t=t)

    @classmethod
    def from_vectors(cls, x, y, t, weights=None, check=True):
        return cls(Frame(x, weights, check), Frame(y, weights, check), t)


def tightness_defect(f):
    """|| sum_i w_i pi_i - I/d ||_F."""
    S = np.einsum("i,ia,ib->ab", f.weights, f.vectors, f.vectors.conj())
    return float(np.linalg.norm(S - np.eye(f.d) / f.d))


def info_completeness(f):
    """Numerical rank and smallest singular value of the span of the frame projectors.

    The rank counts singular values above ``IC_SIGMA_MIN``; the frame is
    informationally complete when the rank is ``d**2``.
    """
    P = f.projectors().reshape(f.n, f.d * f.d)
    s = np.linalg.svd(P, compute_uv=False)
    if s.size < f.d**2:
        s = np.concatenate([s, np.zeros(f.d**2 - s.size)])
    return int(np.sum(s > IC_SIGMA_MIN)), float(s[-1])


def is_informationally_complete(f):
    rank, _ = info_completeness(f)
    return rank == f.d**2


@dataclass(frozen=True, eq=False)
class MufRelationReport:
    max_offdiag_dev: float
    max_diag_dev: float
    max_bij_dev: float
    max_bij_abs_dev: float
    b: np.ndarray = field(repr=False)

    @property
    def max_dev(self):
        return max(self.max_offdiag_dev, self.max_diag_dev, self.max_bij_dev)


def bij_table(p):
    """b[i, j] = <x_j|x_i><y_i|y_j> off the diagonal and ``t`` on it."""
    Gx, Gy = p.x.gram(), p.y.gram()
    b = Gx.T * Gy
    np.fill_diagonal(b, p.t)
    return b


def muf_relation_check(p):
    """Deviations of a pair from the MUF relations at its parameter t.

    The signed ``b_ij = t`` check is evaluated after :func:`gauge_fix_phases`;
    ``max_bij_abs_dev`` is the phase-free version ``| |b_ij| - |t| |``.
    """
    d, n, t = p.d, p.n, p.t
    overlaps = np.abs(p.x.vectors.conj() @ p.y.vectors.T) ** 2
    off = ~np.eye(n, dtype=bool)
    offdiag = np.max(np.abs(overlaps[off] - (1 - t) / d), initial=0.0)
    diag = np.max(np.abs(np.diag(overlaps) - (t * (d * d - 1) + 1) / d))
    b = bij_table(gauge_fix_phases(p))
    return MufRelationReport(
        max_offdiag_dev=float(offdiag),
        max_diag_dev=float(diag),
        max_bij_dev=float(np.max(np.abs(b[off] - t), initial=0.0)),
        max_bij_abs_dev=float(np.max(np.abs(np.abs(b[off]) - abs(t)), initial=0.0)),
        b=b,
    )


def sic_check(f):
    """max_{i != j} | |<x_i|x_j>|^2 - 1/(d+1) | plus the tightness defect."""
    G = np.abs(f.gram()) ** 2
    off = ~np.eye(f.n, dtype=bool)
    dev = np.max(np.abs(G[off] - 1.0 / (f.d + 1)), initial=0.0)
    return float(dev + tightness_defect(f))


def design2_defect(f):
    """|| (1/n) sum_i pi_i (x) pi_i - 2/(d(d+1)) Pi_sym ||_F for a uniformly weighted frame."""
    if not f.is_uniform():
        raise UnsupportedWeightsError("the 2-design defect is defined for uniform weights")
    d, n = f.d, f.n
    Z = np.einsum("ia,ib->iab", f.vectors, f.vectors).reshape(n, d * d)
    avg = Z.T @ Z.conj() / n
    sym, _ = sym_asym_projectors(d)
    return float(np.linalg.norm(avg - 2.0 / (d * (d + 1)) * sym))


def gauge_fix_phases(p):
    """Rephase the y-vectors so that each <x_i|y_i> is real and nonnegative.

    When some <x_i|y_i> vanishes (below ``GAUGE_ZERO``, as at the lower end
    t = -1/(d^2-1)) the diagonal gauge is undefined; then y_j is rephased so
    that b_1j = <x_j|x_1><y_1|y_j> has the sign of t, i.e. b_1j = |b_1j| sgn t.
    Projectors are unchanged either way.
    """
    X, Y = p.x.vectors, p.y.vectors
    diag = np.einsum("ia,ia->i", X.conj(), Y)
    mags = np.abs(diag)
    if np.all(mags >= GAUGE_ZERO):
        phases = diag.conj() / mags
    else:
        b1 = (X.conj() @ X[0]) * (Y[0].conj() @ Y.T)
        target = -1.0 if p.t < 0 else 1.0
        phases = np.ones(p.n, dtype=complex)
        nz = np.abs(b1) >= GAUGE_ZERO
        nz[0] = False
        phases[nz] = target * np.abs(b1[nz]) / b1[nz]
    y = Frame(Y * phases[:, None], p.y.weights, check=False)
    return MufPair(p.x, y, p.t)
