"""Numerical laboratory for positive contractions on lp sequence spaces.

The package models operators as finite nonnegative blocks with structured
infinite tails, computes operator p-norms and norming vectors, measures
finite-index gaps for the weak/strong/adjoint operator topologies, produces
and stress-tests explicit continuity certificates, realizes the classical
operator constructions and counterexample sequences of the subject, and
runs Monte-Carlo campaigns over random positive contractions.
"""

from .core import (
    CoordVector,
    GeometricTail,
    IdentityTail,
    ModelError,
    OperatorModel,
    SupportSet,
    ZeroTail,
    adjoint,
    apply,
    basis,
    corner,
    is_positive,
    modulus,
    pairing,
    project_head,
    support,
)
from .norms import (
    NonConvergenceError,
    NormResult,
    NormingCertificate,
    NormingReport,
    make_certificate,
    matrix_norm,
    modulus_norming,
    norming_from_image,
    norming_vector,
    operator_norm,
    power_norm_history,
    tail_certificate,
    vector_norm,
    verify_norming,
)
from .topologies import (
    ConvergenceReport,
    GapProfile,
    MetricInterval,
    adj_gap,
    canonical_metric,
    converge_report,
    gap_profile,
    sot_gap,
    wot_gap,
)
from .certificates import (
    CertificateError,
    ContinuityCertificate,
    FalsifyReport,
    WotNeighborhood,
    class_m_certificate,
    delta_for_corner,
    diameter_certificate,
    falsify,
    load_certificate,
    save_certificate,
)
from .constructions import (
    density_embed,
    diagonal_non_attainer,
    extend_with_full_norming,
    locate_norming_representative,
    seq_non_attaining,
    seq_norm_deficit,
    seq_zero_row,
)
from .typicality import (
    CampaignReport,
    EigenPersistenceTrace,
    SamplerSpec,
    probe_attainment,
    probe_class_m,
    probe_class_m_prime,
    probe_eigen_persistence,
    probe_irreducible,
    probe_not_coisometry,
    run_campaign,
    sample_positive_contraction,
)
from .serialization import (
    load_operator,
    load_vector,
    save_operator,
    save_vector,
)

__version__ = "0.1.0"
