"""Quartic phase-retrieval landscapes: real embeddings of the complex loss,
fourth-moment tensor diagnostics, region classification, gradient dynamics
with boundedness certificates, and reproducible experiment campaigns."""

from ._version import __version__
from .embedding import (
    embed_plus,
    embed_minus,
    apply_M,
    unembed,
    rotate_phase,
    hermitian_inner,
    phase_align,
    dist_to_orbit,
)
from .seeding import derive_seed
from .ensemble import (
    SensingEnsemble,
    ProblemInstance,
    sample_ensemble,
    random_instance,
    measure,
    quadratic_form,
    quadratic_forms,
    eigen_structure,
    dense_sensing_matrix,
    instance_to_json,
    instance_from_json,
)
from .objective import (
    EvalReport,
    f_value,
    f_grad,
    f_hess_vec,
    f_hess_dense,
    g_value,
    g_grad,
    g_hess,
    evaluate_f,
    evaluate_g,
    fd_gradient,
    fd_hess_vec,
)
from .tensors import (
    Rank1Probe,
    OpNormEstimate,
    fourth_moment_contract,
    gaussian_moment_contract,
    deviation_contract,
    deviation_partial_contract,
    deviation_opnorm,
    loss_expansion_terms,
    loss_via_moments,
    surrogate_via_moments,
)
from .landscape import (
    LandscapeConfig,
    RegionCheck,
    RegionReport,
    PointClass,
    CoverageResult,
    in_region1,
    in_region2,
    in_region3,
    classify_point,
    g_critical_points,
    coverage_check,
)
from .dynamics import (
    StepSchedule,
    Trajectory,
    RunOutcome,
    CertificateReport,
    gd_run,
    flow_integrate,
    default_flow_step,
    boundedness_certificate,
    success_check,
)
from .harness import CampaignSpec, run_fig2, run_fig3
from .cli import cli_dispatch
