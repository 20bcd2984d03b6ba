"""Product decompositions of the partially transposed isotropic state.

A pair (x, y) with weights w realizes a length-d**2 decomposition when
``sum_i w_i |x_i><x_i| (x) |y_i><y_i| = (t/d) U_SW + (1-t)/d**2 I``.
For t != 0 this forces equal weights, tight informationally complete
frames and the MUF relations; conversely tight IC frames obeying the
overlap relations give the decomposition. This module evaluates both
directions numerically.
"""

from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelParams, pt_isotropic
from .frames import (
    MufRelationReport,
    info_completeness,
    muf_relation_check,
    tightness_defect,
)

RESIDUAL_TOL = 1e-8
CONCLUSION_TOL = 1e-5
T_ZERO = 1e-14

VERIFIED = "verified"
FAILED = "failed"
NOT_APPLICABLE_T0 = "not-applicable-t0"
INCONCLUSIVE = "inconclusive"


class NotVerifiedError(ValueError):
    """A pair was required to realize the decomposition but does not."""


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    residual_frobenius: float
    weights_dev: float
    relations: MufRelationReport
    tightness: tuple
    ic_rank: tuple
    ic_sigma_min: tuple
    verdict: str
    failures: list = field(default_factory=list)

    @property
    def verified(self):
        return self.verdict == VERIFIED

    def as_dict(self):
        r = self.relations
        return {
            "verdict": self.verdict,
            "residual_frobenius": self.residual_frobenius,
            "weights_dev": self.weights_dev,
            "max_offdiag_dev": r.max_offdiag_dev,
            "max_diag_dev": r.max_diag_dev,
            "max_bij_dev": r.max_bij_dev,
            "max_bij_abs_dev": r.max_bij_abs_dev,
            "tightness": list(self.tightness),
            "ic_rank": list(self.ic_rank),
            "ic_sigma_min": list(self.ic_sigma_min),
            "failures": list(self.failures),
        }


def product_sum(p):
    """sum_i w_i pi_i (x) rho_i built from the raw (possibly unnormalized) vectors."""
    n, d = p.n, p.d
    Z = np.einsum("ia,ib->iab", p.x.vectors, p.y.vectors).reshape(n, d * d)
    return (Z.T * p.weights) @ Z.conj()


def decomposition_residual(p):
    """|| sum_i w_i pi_i (x) rho_i - ((t/d) U_SW + (1-t)/d**2 I) ||_F."""
    target = pt_isotropic(ChannelParams(p.d, p.t))
    return float(np.linalg.norm(product_sum(p) - target))


def _collect(p):
    rx, sx = info_completeness(p.x)
    ry, sy = info_completeness(p.y)
    return dict(
        residual_frobenius=decomposition_residual(p),
        weights_dev=float(np.max(np.abs(p.weights - 1.0 / p.d**2))),
        relations=muf_relation_check(p),
        tightness=(tightness_defect(p.x), tightness_defect(p.y)),
        ic_rank=(rx, ry),
        ic_sigma_min=(sx, sy),
    )


def theorem1_report(p, tol=RESIDUAL_TOL, conclusion_tol=CONCLUSION_TOL):
    """Check every consequence a solution with t != 0 must have.

    Verdict ``verified`` needs the residual below ``tol`` and, within
    ``conclusion_tol``: uniform weights, tight frames, the overlap
    relations and (after gauge fixing) b_ij = t; both frames must also be
    informationally complete. ``not-applicable-t0`` is returned at t = 0,
    where those conclusions do not follow.
    """
    parts = _collect(p)
    if abs(p.t) < T_ZERO:
        return DecompositionReport(verdict=NOT_APPLICABLE_T0, **parts)
    failures = []
    if parts["residual_frobenius"] >= tol:
        failures.append("residual")
    if parts["weights_dev"] >= conclusion_tol:
        failures.append("weights")
    if max(parts["tightness"]) >= conclusion_tol:
        failures.append("tightness")
    if min(parts["ic_rank"]) < p.d**2:
        failures.append("informational-completeness")
    rel = parts["relations"]
    if rel.max_offdiag_dev >= conclusion_tol or rel.max_diag_dev >= conclusion_tol:
        failures.append("overlaps")
    if rel.max_bij_dev >= conclusion_tol:
        failures.append("bij")
    verdict = FAILED if failures else VERIFIED
    return DecompositionReport(verdict=verdict, failures=failures, **parts)


def theorem2_check(p, tol=RESIDUAL_TOL):
    """Forward implication: tight IC frames with the overlap relations realize the decomposition.

    When a hypothesis fails the verdict is ``inconclusive``; the residual is
    still reported. With all hypotheses met the residual must be below
    ``d**2 * tol``, otherwise the verdict is ``failed``.
    """
    if not p.x.is_uniform():
        raise ValueError("the forward check assumes uniform weights")
    parts = _collect(p)
    rel = parts["relations"]
    failures = []
    if max(parts["tightness"]) >= tol:
        failures.append("tightness")
    if min(parts["ic_rank"]) < p.d**2:
        failures.append("informational-completeness")
    if rel.max_offdiag_dev >= tol or rel.max_diag_dev >= tol:
        failures.append("overlaps")
    if failures:
        return DecompositionReport(verdict=INCONCLUSIVE, failures=failures, **parts)
    ok = parts["residual_frobenius"] < p.d**2 * tol
    return DecompositionReport(
        verdict=VERIFIED if ok else FAILED, failures=[] if ok else ["residual"], **parts
    )


def reconstruct(p, A):
    """(d/t) sum_i w_i (tr(pi_i A) - (1-t)/d tr A) rho_i."""
    d, t = p.d, p.t
    if abs(t) < T_ZERO:
        raise ZeroDivisionError("the reconstruction formula needs t != 0")
    X, Y = p.x.vectors, p.y.vectors
    A = np.asarray(A, dtype=complex)
    # tr(pi_i A) = <x_i|A|x_i>
    coeff = np.einsum("ia,ab,ib->i", X.conj(), A, X) - (1 - t) / d * np.trace(A)
    return d / t * np.einsum("i,i,ia,ib->ab", p.weights, coeff, Y, Y.conj())


def reconstruction_check(p, A, tol=1e-6):
    """|| A - reconstruct(p, A) ||_F; ``p`` must realize the decomposition within ``tol``."""
    if abs(p.t) < T_ZERO:
        raise ZeroDivisionError("the reconstruction formula needs t != 0")
    residual = decomposition_residual(p)
    if residual >= tol:
        raise NotVerifiedError(f"pair residual {residual:.3e} is not below {tol:g}")
    return float(np.linalg.norm(np.asarray(A) - reconstruct(p, A)))
