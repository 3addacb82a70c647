"""Spin-chain engineering for perfect quantum state transfer."""

__version__ = "0.1.0"

from pstchain.core import (
    ChainSpec,
    GapSequence,
    MirrorSplit,
    Spectrum,
    TransferWindow,
    linear_spectrum,
    optimal_chain,
    reference_max_coupling,
    spectrum_from_gaps,
    validate_pst_spectrum,
)
from pstchain.dynamics import (
    FidelityCurve,
    evolve,
    extract_phase,
    fidelity_curve,
    mirror_symmetric,
    transfer_amplitude,
)
from pstchain.engineer import (
    arrowhead_from_spectra,
    center_coupling_even,
    center_coupling_recursion,
    persymmetric_oracle,
    reconstruct_chain,
    split_mirror_spectra,
)
from pstchain.metrics import EfficiencyReport, MLBound, efficiency, ml_bound, range_bound_residual, sos_efficiency
from pstchain.spectral import (
    ArrowheadForm,
    EigenDecomposition,
    build_full_hamiltonian,
    eigendecompose,
    eigenvalue_gradients,
    lanczos_tridiagonalize,
    sign_change_count,
)
