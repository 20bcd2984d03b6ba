"""Mutually unbiased frame pairs and the entanglement-breaking rank of depolarizing channels."""

from .channels import ChannelParams, choi_matrix, phi_t_apply, pt_isotropic, rank_lower_bound
from .decomposition import (
    DecompositionReport,
    decomposition_residual,
    reconstruction_check,
    theorem1_report,
    theorem2_check,
)
from .frames import (
    Frame,
    MufPair,
    design2_defect,
    gauge_fix_phases,
    info_completeness,
    muf_relation_check,
    sic_check,
    tightness_defect,
)
from .kernels import BACKEND
from .search import (
    SearchConfig,
    SearchResult,
    continuation_sweep,
    covariant_residual,
    covariant_search,
    local_optimize,
    loss_and_gradient,
    multistart_search,
)
from .weyl import WHContext, context, fourier_matrix, weyl_operator, wh_orbit

__version__ = "0.1.0"
