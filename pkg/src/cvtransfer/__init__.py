"""Transfer of continuous-variable states into a small qubit register and back."""

from .hilbert import (
    CvDensity,
    CvOperator,
    CvState,
    DimensionError,
    TruncationError,
    TruncationWarning,
    cat,
    coherent,
    displacement,
    fidelity_mixed,
    fidelity_pure,
    fock,
    quadrature_p,
    quadrature_q,
    squeezed_vacuum,
    vacuum,
    wavefunction,
    wigner,
)
from .noise import KrausChannel, amplitude_damping, dephasing, identity_channel
from .protocol import (
    ConvergenceError,
    HybridState,
    ProtocolParams,
    decode,
    encode,
    epsilon,
    optimize_lambda,
    recovered_cv_density,
    recovered_fidelity,
    reset_cv,
    tilde0,
)
from .randgen import RandomStateSpec, mean_photon, random_state, random_states
from .register import RegisterState, SignVector, all_sign_vectors, gamma, grid_point, phi_state

__version__ = "0.1.0"

__all__ = [
    "CvDensity",
    "CvOperator",
    "CvState",
    "DimensionError",
    "TruncationError",
    "TruncationWarning",
    "cat",
    "coherent",
    "displacement",
    "fidelity_mixed",
    "fidelity_pure",
    "fock",
    "quadrature_p",
    "quadrature_q",
    "squeezed_vacuum",
    "vacuum",
    "wavefunction",
    "wigner",
    "KrausChannel",
    "amplitude_damping",
    "dephasing",
    "identity_channel",
    "ConvergenceError",
    "HybridState",
    "ProtocolParams",
    "decode",
    "encode",
    "epsilon",
    "optimize_lambda",
    "recovered_cv_density",
    "recovered_fidelity",
    "reset_cv",
    "tilde0",
    "RandomStateSpec",
    "mean_photon",
    "random_state",
    "random_states",
    "RegisterState",
    "SignVector",
    "all_sign_vectors",
    "gamma",
    "grid_point",
    "phi_state",
    "__version__",
]
