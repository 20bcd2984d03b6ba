"""Depolarizing channels Phi_t(X) = t X + (1 - t) tr(X) I / d and their Choi matrices."""

from dataclasses import dataclass

import numpy as np

from .linalg import DimensionError, as_matrix, max_entangled_projector, numerical_rank, swap_operator

# Upper bounds on the separability length of C_t known from the literature.
# Documentation only; nothing in the package computes them.
CARATHEODORY_LENGTH_BOUND = "d**4"
SIC_POINT_LENGTH_BOUND = "d**2 * (d + 1)**2 / 4"
MUB_LENGTH_BOUND = "d * (d + 1) for prime-power d"


class ParameterRangeError(ValueError):
    """t lies outside the range an operation is defined on."""


@dataclass(frozen=True)
class ChannelParams:
    d: int
    t: float

    @property
    def t_min(self):
        return -1.0 / (self.d**2 - 1)

    @property
    def t_sic(self):
        return 1.0 / (self.d + 1)

    def is_channel(self, atol=1e-12):
        return self.t_min - atol <= self.t <= 1.0 + atol

    def is_separable(self, atol=1e-12):
        return self.t_min - atol <= self.t <= self.t_sic + atol


def phi_t_apply(p, X):
    X = as_matrix(X)
    if X.shape[0] != p.d:
        raise DimensionError(f"expected a {p.d}x{p.d} matrix, got {X.shape}")
    return p.t * X + (1 - p.t) * np.trace(X) * np.eye(p.d) / p.d


def choi_matrix(p):
    """Normalized Choi matrix C_t = t |beta><beta| + (1 - t) I / d**2 (the isotropic state)."""
    d = p.d
    return p.t * max_entangled_projector(d) + (1 - p.t) * np.eye(d * d) / d**2


def pt_isotropic(p):
    """Closed form of the partial transpose of C_t: (t/d) U_SW + (1 - t)/d**2 I."""
    d = p.d
    return p.t / d * swap_operator(d) + (1 - p.t) / d**2 * np.eye(d * d)


def rank_lower_bound(p, rtol=1e-9):
    """max(rank C_t, rank C_t^Gamma), a lower bound on the separability length."""
    if not p.is_separable():
        raise ParameterRangeError(
            f"t={p.t} is outside the separable range [{p.t_min}, {p.t_sic}]"
        )
    return max(numerical_rank(choi_matrix(p), rtol), numerical_rank(pt_isotropic(p), rtol))
