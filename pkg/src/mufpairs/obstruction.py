"""Why a differentiable covariant branch cannot leave the Fourier pair at t = 0.

Differentiating the orbit decomposition at t = 0 requires, for every label
a != 0, that tr(pi_0 W_a^dag) tr(rho_0' W_a) + tr(pi_0' W_a^dag) tr(rho_0 W_a) = 1.
If both characters <x|W_a|x> and <y|W_a|y> vanish at some a, no choice of
derivatives can satisfy this, so the starting pair is obstructed.
"""

from dataclasses import dataclass

import numpy as np

from .decomposition import decomposition_residual
from .frames import Frame, MufPair, NormalizationError
from .weyl import context, fourier_matrix, labels

ZERO = 1e-10
NONZERO = 1e-6
MAX_DRAWS = 1000


class NotASolutionError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class CharTable:
    """values[a1, a2] = <v|W_a|v>."""

    d: int
    values: np.ndarray

    def __getitem__(self, a):
        return self.values[a[0] % self.d, a[1] % self.d]

    def zeros(self, atol=ZERO):
        return {a for a in labels(self.d) if abs(self[a]) < atol}


def _unit(v):
    v = np.asarray(v, dtype=complex)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"vector has norm {norm!r}, expected 1")
    return v


def char_table(v):
    v = _unit(v)
    d = v.shape[0]
    vals = np.einsum("a,kab,b->k", v.conj(), context(d).ops, v)
    return CharTable(d, vals.reshape(d, d))


def basis_vector(d, k=0):
    e = np.zeros(d, dtype=complex)
    e[k] = 1.0
    return e


def fourier_fiducials(d):
    """(|0>, F|0>)."""
    e0 = basis_vector(d)
    return e0, fourier_matrix(d) @ e0


def orbit_pair(x, y, t=0.0):
    ctx = context(len(x))
    return MufPair(Frame(ctx.ops @ x), Frame(ctx.ops @ y), t)


@dataclass(frozen=True)
class ObstructionVerdict:
    obstructed: bool
    witnesses: tuple
    residual: float

    def summary(self):
        if not self.obstructed:
            return "not obstructed; no label with both characters zero"
        shown = ", ".join(f"a=({a1},{a2})" for a1, a2 in self.witnesses[:4])
        more = " ..." if len(self.witnesses) > 4 else ""
        return f"obstructed; witness {shown}{more} ({len(self.witnesses)} labels)"


def prop4_obstruction(x, y, tol=1e-8):
    """Labels a != 0 at which both fiducial characters vanish.

    The orbit pair of (x, y) must solve the t = 0 decomposition within
    ``tol``; otherwise :class:`NotASolutionError` is raised.
    """
    x, y = _unit(x), _unit(y)
    residual = decomposition_residual(orbit_pair(x, y))
    if residual >= tol:
        raise NotASolutionError(f"orbit pair residual at t=0 is {residual:.3e}")
    zx, zy = char_table(x).zeros(), char_table(y).zeros()
    witnesses = tuple(sorted(a for a in zx & zy if a != (0, 0)))
    return ObstructionVerdict(bool(witnesses), witnesses, residual)


def evading_fiducial(d, seed):
    """A flat vector y (all |y_i| = 1/sqrt(d)) with <y|W_a|y> != 0 whenever a1 != 0.

    Together with x = |0> its orbit pair solves the t = 0 decomposition
    without the Fourier pair's obstruction. Phases are drawn uniformly from
    ``default_rng(seed)`` and redrawn until every such character exceeds
    ``NONZERO`` in magnitude.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = np.random.default_rng(seed)
    needed = [a for a in labels(d) if a[0] != 0]
    for _ in range(MAX_DRAWS):
        y = np.exp(2j * np.pi * rng.random(d)) / np.sqrt(d)
        table = char_table(y)
        if min(abs(table[a]) for a in needed) > NONZERO:
            return y
    raise GenerationError(f"no admissible phases found in {MAX_DRAWS} draws")
