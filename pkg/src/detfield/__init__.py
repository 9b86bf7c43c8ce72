"""Determinantal random point fields from finite-dimensional linear systems.

The package builds linear systems (-A, B, C) with scalar input/output, turns
them into Hankel-type integral operators on L2(0, inf), and verifies the
determinant identities that make their spectra the counting laws of
determinantal point fields.  It also recovers reflectionless Schrodinger and
Zakharov-Shabat potentials from scattering data and evolves the data under
the KdV flow.
"""

from detfield.realization import (
    HypothesisReport,
    ScatteringData,
    StateSpaceSystem,
    matrix_exponential,
    phi,
    phi_grid,
    realize_from_bound_states,
    shift,
    transfer,
    validate_hypotheses,
)
from detfield.gramian import (
    GramianBundle,
    ctrl_gramian,
    gramian_bundle,
    hankel_product_R,
    lyapunov_residual,
    obs_gramian,
    plancherel_trace_check,
    trace_derivative_check,
)
from detfield.fredholm import (
    DiscretizedKernel,
    HypothesisError,
    conjugation_invariance_check,
    det_gap,
    det_hankel_via_R,
    det_shifted,
    det_square,
    det_zs,
    log_det_shifted,
    nystrom_hankel,
    nystrom_obs,
)
from detfield.glsolver import (
    GLSolution,
    gl_residual,
    gl_T,
    logdet_diagonal_check,
    nls_potential_sq,
    potential_q,
    schrodinger_residual,
    wavefunction,
    zs_diag_logdet_check,
    zs_T,
    zs_U,
    zs_V,
)
from detfield.pointfield import (
    CountDistribution,
    correlation,
    count_distribution,
    density_ratio,
    gap_probability,
    generating_function,
    sample_count,
    spectrum_for_case,
)
from detfield.kernels import (
    HamiltonianKernel,
    airy,
    airy_deriv,
    airy_kernel,
    airy_square_check,
    hamiltonian_kernel,
    mercer_trace,
    sine_kernel,
    tw_gap,
)
from detfield.flows import (
    LaxPairField,
    derivative_kernel_rank,
    kdv_evolve,
    kdv_lax_field,
    kdv_pde_residual,
    kdv_potential,
    mkdv_kink_field,
    nls_bright_soliton_field,
    nls_lax_field,
    zero_curvature_residual,
)

__version__ = "0.1.0"
