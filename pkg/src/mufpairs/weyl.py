"""Weyl-Heisenberg displacement operators.

``W_a = tau**(a1*a2) S**a1 C**a2`` with the cyclic shift ``S|i> = |i+1>``,
the clock ``C|i> = omega**i |i>``, ``omega = exp(2 pi i / d)`` and
``tau = exp(2 pi i (d+1) / (2d))``. Orbit frames are ordered row-major in
``(a1, a2)``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .linalg import DimensionError, as_matrix, local_dim


def symplectic(a, b):
    """<a, b> = a2*b1 - b2*a1."""
    return a[1] * b[0] - b[1] * a[0]


def labels(d):
    """All labels in {0..d-1}^2, row-major."""
    return [(a1, a2) for a1 in range(d) for a2 in range(d)]


@dataclass(frozen=True, eq=False)
class WHContext:
    d: int
    tau: complex = field(init=False)
    omega: complex = field(init=False)
    S: np.ndarray = field(init=False, repr=False)
    C: np.ndarray = field(init=False, repr=False)
    ops: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d = self.d
        if d < 1:
            raise ValueError("d must be positive")
        S = np.roll(np.eye(d, dtype=complex), 1, axis=0)
        C = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
        for name, value in (("S", S), ("C", C)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "tau", self.tau_power(1))
        object.__setattr__(self, "omega", self.tau_power(2))
        ops = np.array([self.operator(a) for a in labels(d)])
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)

    def tau_power(self, k):
        """tau**k, with the integer exponent reduced mod 2d first."""
        d = self.d
        m = ((d + 1) * (k % (2 * d))) % (2 * d)
        return complex(np.exp(1j * np.pi * m / d))

    def operator(self, a):
        d = self.d
        a1, a2 = int(a[0]), int(a[1])
        # S^a1 C^a2 |i> = omega^(i*a2) |i+a1>
        i = np.arange(d)
        W = np.zeros((d, d), dtype=complex)
        W[(i + a1) % d, i] = np.exp(2j * np.pi * ((i * a2) % d) / d)
        return self.tau_power(a1 * a2) * W


@lru_cache(maxsize=32)
def context(d):
    return WHContext(d)


def weyl_operator(ctx, a):
    return ctx.operator(a)


def fourier_matrix(d):
    """F = d**-1/2 sum_kl omega**(kl) |k><l|."""
    k = np.arange(d)
    return np.exp(2j * np.pi * (np.outer(k, k) % d) / d) / np.sqrt(d)


def wh_relations_check(ctx):
    """Largest deviation in each of the three group relations over all label pairs.

    Returns a dict with keys ``product`` (W_a W_b = tau^<a,b> W_{a+b}),
    ``adjoint`` (W_a^dag = W_{-a}) and ``periodicity``
    (W_{a+db} = tau^(d<a,b>) W_a), plus their maximum under ``max``.
    """
    d = ctx.d
    prod = adj = per = 0.0
    for a in labels(d):
        Wa = ctx.operator(a)
        adj = max(adj, np.max(np.abs(Wa.conj().T - ctx.operator((-a[0], -a[1])))))
        for b in labels(d):
            Wb = ctx.operator(b)
            ab = (a[0] + b[0], a[1] + b[1])
            lhs = Wa @ Wb
            rhs = ctx.tau_power(symplectic(a, b)) * ctx.operator(ab)
            prod = max(prod, np.max(np.abs(lhs - rhs)))
            shifted = ctx.operator((a[0] + d * b[0], a[1] + d * b[1]))
            per = max(per, np.max(np.abs(shifted - ctx.tau_power(d * symplectic(a, b)) * Wa)))
    report = {"product": float(prod), "adjoint": float(adj), "periodicity": float(per)}
    report["max"] = max(report.values())
    return report


def orbit_vectors(ctx, fiducial):
    """Stack of W_a |fiducial> for a in row-major order, shape (d*d, d)."""
    v = np.asarray(fiducial, dtype=complex)
    if v.shape != (ctx.d,):
        raise DimensionError(f"fiducial must have length {ctx.d}")
    return ctx.ops @ v


def wh_orbit(ctx, fiducial, weights=None):
    """The WH-covariant frame generated by a unit fiducial vector."""
    from .frames import Frame, NormalizationError

    v = np.asarray(fiducial, dtype=complex)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"fiducial has norm {norm!r}, expected 1")
    return Frame(orbit_vectors(ctx, v), weights)


def twirl_conjugation(ctx, X):
    """sum_a (W_a (x) W_a) X (W_a (x) W_a)^dag."""
    X = as_matrix(X)
    if local_dim(X) != ctx.d:
        raise DimensionError(f"expected a {ctx.d**2}x{ctx.d**2} operator")
    out = np.zeros_like(X)
    for W in ctx.ops:
        WW = np.kron(W, W)
        out += WW @ X @ WW.conj().T
    return out


def twirl_coefficient_form(ctx, X):
    """sum_a tr(X (W_a^dag (x) W_a)) W_a (x) W_a^dag, the projection form of the twirl."""
    X = as_matrix(X)
    if local_dim(X) != ctx.d:
        raise DimensionError(f"expected a {ctx.d**2}x{ctx.d**2} operator")
    out = np.zeros_like(X)
    for W in ctx.ops:
        coeff = np.trace(X @ np.kron(W.conj().T, W))
        out += coeff * np.kron(W, W.conj().T)
    return out


def swap_expansion(ctx):
    """(1/d) sum_a W_a (x) W_a^dag, which equals the swap operator."""
    return sum(np.kron(W, W.conj().T) for W in ctx.ops) / ctx.d
