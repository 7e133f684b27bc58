"""Spectral and discrepancy quantities for simplicial complexes and uniform hypergraphs."""

__version__ = "0.1.0"

from .complexes import (  # noqa: E402
    DegreeProfile,
    Hypergraph,
    OrientedCell,
    SimplicialComplex,
    degree_profile,
    gen_complex,
    gen_hypergraph,
    orientation_sign,
)
from .forms import MultilinearForm, SpectralEstimate, count_e, d_norm_bounds, eval_form, make_form, spectral_norm_estimate  # noqa: E402
from .hypergraph_mixing import (  # noqa: E402
    RhoEnvelope,
    random_rho_experiment,
    rho_alpha,
    rho_envelope,
    verify_fw_comparison,
    verify_inverse_hypergraph,
    verify_mixing_hypergraph,
)
from .io import read_object, write_object  # noqa: E402
from .reports import DiscrepancyReport, VerificationReport, write_report  # noqa: E402
from .simplicial import boundary_matrix, kernel_basis, operator_matrix, restricted_norm, row_l1_norms  # noqa: E402
from .simplicial_mixing import count_F, rho_simplicial, verify_inverse_simplicial, verify_mixing_simplicial  # noqa: E402
