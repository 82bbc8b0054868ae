"""The transfer protocol: encoding unitary, pointer state, error and recovery.

The encoding acts on the joint space of one truncated mode and N qubits and
is a product of conditional displacements,

    V_k = exp(i v_k q σ_y^{(k)})   with v_k = π/(2 λ 2^k),
    W_k = exp(±i w_k p σ_x^{(k)})  with w_k = λ 2^k / 2,

applied as the pair W_k V_k for k = 1 … N (k = 1 first, minus sign at
k = N).  A successful encoding leaves the mode in an input-independent
pointer state with position wavefunction sinc(πq/2λ)/√(2λ) and the input
wavefunction, sampled on the 2^N-point grid q_s, written into the register.

Joint states are stored mode-major: flat index n·2^N + r for Fock level n
and register basis index r (qubit k at bit k−1).  Every gate is a pair of
mode unitaries attached to the ±1 eigenprojectors of the qubit Pauli, so a
gate application costs two dense (d×d)·(d×2^N) products and never builds the
full joint matrix except on demand in tests.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import hilbert, noise, register
from .hilbert import (
    CvDensity,
    CvState,
    DimensionError,
    HYBRID_NORM_TOL,
    TruncationWarning,
)

logger = logging.getLogger(__name__)

BRANCH_PRUNE_TOL = 1e-12

TILDE0_METHODS = ("sinc-projection", "iterated-encode", "squeezed")

# quadrature parameters for the canonical pointer-state construction
_QUAD_RANGE = 60.0
_QUAD_TOL = 1e-10
_QUAD_ORDER = 16
_POINTER_REFERENCE_DIM = 300


class ConvergenceError(RuntimeError):
    """A numerical refinement loop failed to reach its target tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class ProtocolParams:
    """Interaction parameter, register size and mode truncation."""

    lam: float
    n_qubits: int
    dim: int

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.n_qubits < 2:
            raise ValueError("the protocol needs at least two qubits")
        if self.dim < 2:
            raise DimensionError("mode dimension must be at least 2")

    def v(self, k: int) -> float:
        """Phase-kick strength of the k-th position-conditioned rotation."""
        self._check_k(k)
        return math.pi / (2.0 * self.lam * 2.0**k)

    def w(self, k: int) -> float:
        """Shift length of the k-th momentum-generated displacement."""
        self._check_k(k)
        return self.lam * 2.0**k / 2.0

    def _check_k(self, k: int) -> None:
        if not 1 <= k <= self.n_qubits:
            raise ValueError(f"qubit index {k} outside 1..{self.n_qubits}")

    @property
    def register_dim(self) -> int:
        return 2**self.n_qubits

    @property
    def joint_dim(self) -> int:
        return self.dim * self.register_dim


@dataclass(frozen=True)
class HybridState:
    """Pure state of mode ⊗ register, mode-major flat amplitudes."""

    amps: np.ndarray
    dim: int
    n_qubits: int

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.shape != (self.dim * 2**self.n_qubits,):
            raise DimensionError("hybrid amplitudes have the wrong length")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > HYBRID_NORM_TOL:
            raise ValueError(f"hybrid norm {nrm} deviates from 1 beyond {HYBRID_NORM_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    def as_matrix(self) -> np.ndarray:
        """View with Fock level as rows and register index as columns."""
        return self.amps.reshape(self.dim, 2**self.n_qubits)

    @classmethod
    def from_product(cls, cv: CvState, reg: register.RegisterState) -> "HybridState":
        mat = np.outer(cv.amps, reg.amps)
        return cls(mat.ravel(), cv.dim, reg.n_qubits)


# ---------------------------------------------------------------------------
# gates
# ---------------------------------------------------------------------------

_PROJECTORS = {
    "x": (
        np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
        np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex),
    ),
    "y": (
        np.array([[0.5, -0.5j], [0.5j, 0.5]], dtype=complex),
        np.array([[0.5, 0.5j], [-0.5j, 0.5]], dtype=complex),
    ),
}
for _pair in _PROJECTORS.values():
    for _m in _pair:
        _m.flags.writeable = False


@dataclass(frozen=True)
class ConditionalGate:
    """exp(i c G σ^{(k)}) with G the mode quadrature q or p.

    Acts as identity on every other qubit.  Realized as the eigenbasis block
    form  exp(+i c G) ⊗ P_+  +  exp(−i c G) ⊗ P_−  with P_± the ±1
    eigenprojectors of the chosen Pauli axis on qubit k, each block a pure
    displacement of the mode.
    """

    generator: str  # "q" or "p"
    axis: str  # Pauli axis of the qubit factor, "x" or "y"
    strength: float
    k: int
    n_qubits: int
    dim: int

    def __post_init__(self):
        if self.generator not in ("q", "p") or self.axis not in ("x", "y"):
            raise ValueError("generator must be 'q' or 'p' and axis 'x' or 'y'")
        if not 1 <= self.k <= self.n_qubits:
            raise ValueError(f"qubit index {self.k} outside 1..{self.n_qubits}")

    def adjoint(self) -> "ConditionalGate":
        return replace(self, strength=-self.strength)

    def apply(self, block: np.ndarray) -> np.ndarray:
        """Apply to (dim, 2^N · batch) amplitudes, register-major columns."""
        d, m = block.shape
        reg = 2**self.n_qubits
        if d != self.dim or m % reg:
            raise DimensionError("block shape incompatible with gate dimensions")
        low = 2 ** (self.k - 1) * (m // reg)
        high = 2 ** (self.n_qubits - self.k)
        x = block.reshape(d, high, 2, low)
        p_plus, p_minus = _PROJECTORS[self.axis]
        z_plus = np.einsum("ab,dhbl->dhal", p_plus, x).reshape(d, m)
        z_minus = np.einsum("ab,dhbl->dhal", p_minus, x).reshape(d, m)
        expi = hilbert.apply_expi_q if self.generator == "q" else hilbert.apply_expi_p
        return expi(d, self.strength, z_plus) + expi(d, -self.strength, z_minus)

    def matrix(self) -> np.ndarray:
        """Full joint unitary; intended for verification at small sizes."""
        d = self.dim
        block = hilbert.expi_q if self.generator == "q" else hilbert.expi_p
        eye_low = np.eye(2 ** (self.k - 1))
        eye_high = np.eye(2 ** (self.n_qubits - self.k))
        p_plus, p_minus = _PROJECTORS[self.axis]
        full_plus = np.kron(eye_high, np.kron(p_plus, eye_low))
        full_minus = np.kron(eye_high, np.kron(p_minus, eye_low))
        return np.kron(block(d, self.strength), full_plus) + np.kron(
            block(d, -self.strength), full_minus
        )


@lru_cache(maxsize=512)
def gate_V(k: int, params: ProtocolParams) -> ConditionalGate:
    """Position-conditioned qubit rotation exp(i v_k q σ_y^{(k)})."""
    return ConditionalGate("q", "y", params.v(k), k, params.n_qubits, params.dim)


@lru_cache(maxsize=512)
def gate_W(k: int, params: ProtocolParams) -> ConditionalGate:
    """Qubit-conditioned mode displacement exp(±i w_k p σ_x^{(k)}).

    The sign is +1 for k < N and −1 for the last qubit.
    """
    sign = 1.0 if k < params.n_qubits else -1.0
    return ConditionalGate("p", "x", sign * params.w(k), k, params.n_qubits, params.dim)


def _encode_block(block: np.ndarray, params: ProtocolParams) -> np.ndarray:
    for k in range(1, params.n_qubits + 1):
        block = gate_V(k, params).apply(block)
        block = gate_W(k, params).apply(block)
    return block


def _decode_block(block: np.ndarray, params: ProtocolParams) -> np.ndarray:
    for k in range(params.n_qubits, 0, -1):
        block = gate_W(k, params).adjoint().apply(block)
        block = gate_V(k, params).adjoint().apply(block)
    return block


def encode_diagnostics(state: CvState, params: ProtocolParams) -> list[str]:
    """Truncation-safety notes for encoding this input; empty when clean."""
    notes = []
    radius = math.sqrt(2.0 * (hilbert.mean_photon_number(state) + 1.0))
    reach = params.lam * 2**params.n_qubits * math.sqrt(2.0) / 2.0
    turning = math.sqrt(2.0 * (params.dim - 1) + 1.0)
    if reach + radius >= turning:
        notes.append(
            f"displacement reach {reach:.3g} plus input radius {radius:.3g} "
            f"exceeds the truncation turning point {turning:.3g}"
        )
    # the pointer state is momentum-limited by the first conditional rotation
    momentum_reach = math.pi / (2.0 * params.lam)
    if momentum_reach + radius >= turning:
        notes.append(
            f"pointer momentum reach {momentum_reach:.3g} plus input radius "
            f"{radius:.3g} exceeds the truncation turning point {turning:.3g}"
        )
    return notes


def encode(state: CvState, params: ProtocolParams, warn: bool = True) -> HybridState:
    """Run the full gate sequence on input ⊗ |0…0⟩."""
    if state.dim != params.dim:
        raise DimensionError(f"input dimension {state.dim} != params.dim {params.dim}")
    if warn:
        for note in encode_diagnostics(state, params):
            warnings.warn(TruncationWarning(note), stacklevel=2)
    block = np.zeros((params.dim, params.register_dim), dtype=complex)
    block[:, 0] = state.amps
    block = _encode_block(block, params)
    drift = abs(float(np.linalg.norm(block)) - 1.0)
    if drift > 1e-6:
        warnings.warn(
            TruncationWarning(f"norm drifted by {drift:.3g} during encoding"), stacklevel=2
        )
    return HybridState(block.ravel(), params.dim, params.n_qubits)


def decode(state: HybridState, params: ProtocolParams) -> HybridState:
    """Apply the exact adjoint of the encoding (gates reversed and adjointed)."""
    if (state.dim, state.n_qubits) != (params.dim, params.n_qubits):
        raise DimensionError("hybrid state does not match protocol parameters")
    block = _decode_block(state.as_matrix().copy(), params)
    return HybridState(block.ravel(), params.dim, params.n_qubits)


# ---------------------------------------------------------------------------
# the pointer state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureReport:
    """Convergence record of the pointer-state quadrature."""

    panels: int
    estimated_error: float
    tolerance: float
    converged: bool


@lru_cache(maxsize=64)
def _sinc_pointer(lam: float, dim: int) -> tuple[CvState, QuadratureReport]:
    """Fock coefficients of the sinc pointer state by adaptive quadrature.

    Integrates ⟨n|ψ⟩ = ∫ h_n(q) sinc(πq/2λ)/√(2λ) dq over ±60 with composite
    Gauss–Legendre panels, doubling the panel count until the coefficients
    move by less than 1e−10, on a reference dimension of at least 300 before
    truncating and renormalizing.  Odd coefficients vanish by parity and are
    set to zero exactly.
    """
    nref = max(_POINTER_REFERENCE_DIM, dim)
    nodes0, weights0 = np.polynomial.legendre.leggauss(_QUAD_ORDER)
    # start near one sinc lobe per half-panel so the first pass is already close
    panels = max(32, int(math.ceil(_QUAD_RANGE / (4.0 * lam))))
    prev = None
    err = math.inf
    for _ in range(8):
        edges = np.linspace(0.0, _QUAD_RANGE, panels + 1)
        half = np.diff(edges) / 2.0
        mid = (edges[:-1] + edges[1:]) / 2.0
        qs = (mid[:, None] + half[:, None] * nodes0[None, :]).ravel()
        ws = (half[:, None] * weights0[None, :]).ravel()
        kernel = np.sinc(qs / (2.0 * lam)) / math.sqrt(2.0 * lam)
        h = hilbert.hermite_functions(nref, qs)
        coeffs = 2.0 * (h @ (ws * kernel))  # even part; odd entries zeroed below
        coeffs[1::2] = 0.0
        if prev is not None:
            err = float(np.max(np.abs(coeffs - prev)))
            if err < _QUAD_TOL:
                report = QuadratureReport(panels, err, _QUAD_TOL, True)
                state = CvState.normalized(coeffs[:dim].astype(complex))
                return state, report
        prev = coeffs
        panels *= 2
    raise ConvergenceError(
        f"pointer-state quadrature stalled at error {err:.3g} (tolerance {_QUAD_TOL})", err
    )


def _iterated_pointer(params: ProtocolParams) -> CvState:
    """Pointer state from recycling one qubit through all N interactions.

    The qubit is reset to its ground state after each W V pair; tracing it
    there is exact because it never interacts again, so the mode evolves
    through a two-operator Kraus map per step.  The Kraus tree is carried as
    unnormalized pure columns (squared column norm = branch weight, branches
    below 1e−12 dropped); the result is the dominant spectral branch of the
    final mode state, whose weight is logged.
    """
    d = params.dim
    cols = np.zeros((d, 1), dtype=complex)
    cols[0, 0] = 1.0
    for k in range(1, params.n_qubits + 1):
        v = ConditionalGate("q", "y", params.v(k), 1, 1, d)
        sign = 1.0 if k < params.n_qubits else -1.0
        w = ConditionalGate("p", "x", sign * params.w(k), 1, 1, d)
        b = cols.shape[1]
        joint = np.zeros((d, 2 * b), dtype=complex)
        joint[:, :b] = cols  # qubit freshly prepared in |0⟩
        joint = w.apply(v.apply(joint))
        cols = np.concatenate((joint[:, :b], joint[:, b:]), axis=1)
        weights = np.sum(np.abs(cols) ** 2, axis=0)
        cols = cols[:, weights > BRANCH_PRUNE_TOL]
    rho = cols @ cols.conj().T
    evals, evecs = np.linalg.eigh(rho)
    logger.debug("iterated pointer state purity: dominant weight %.6f", evals[-1])
    return CvState.normalized(evecs[:, -1])


def tilde0(params: ProtocolParams, method: str = "sinc-projection") -> CvState:
    """The input-independent pointer state, by one of three constructions.

    ``sinc-projection``
        Quadrature projection of the ideal sinc wavefunction onto the Fock
        basis; this is the canonical reference used by :func:`epsilon`.
    ``iterated-encode``
        Apply the W V pairs to vacuum recycling a single reset qubit.
    ``squeezed``
        Squeezed vacuum with r = log(1.12/λ), the best Gaussian stand-in
        (overlap ≈ 0.89 with the canonical state).
    """
    if method == "sinc-projection":
        return _sinc_pointer(params.lam, params.dim)[0]
    if method == "iterated-encode":
        return _iterated_pointer(params)
    if method == "squeezed":
        return hilbert.squeezed_vacuum(
            params.dim, math.log(1.12 / params.lam), leakage_tol=None
        )
    raise ValueError(f"unknown method {method!r}; expected one of {TILDE0_METHODS}")


def tilde0_report(params: ProtocolParams) -> QuadratureReport:
    """Convergence report of the canonical pointer-state quadrature."""
    return _sinc_pointer(params.lam, params.dim)[1]


# ---------------------------------------------------------------------------
# error, reset and recovery
# ---------------------------------------------------------------------------


def _pointer_overlap_vector(block: np.ndarray, params: ProtocolParams) -> np.ndarray:
    """y_r = ⟨pointer ⊗ e_r | state⟩ over register indices r."""
    pointer = tilde0(params)
    return pointer.amps.conj() @ block


def epsilon(state: CvState, params: ProtocolParams) -> float:
    """Transfer error: 1 − ‖(⟨pointer| ⊗ 1) U (input ⊗ ground)‖²."""
    chi = encode(state, params)
    y = _pointer_overlap_vector(chi.as_matrix(), params)
    val = 1.0 - float(np.sum(np.abs(y) ** 2))
    if val < 0.0:
        logger.debug("clamping epsilon round-off %.3g to 0", val)
        val = 0.0
    return min(val, 1.0)


def encoded_register_amplitudes(
    state: CvState, params: ProtocolParams, basis: str = "phi"
) -> tuple[np.ndarray, float]:
    """Register amplitudes carried by the pointer component after encoding.

    Returns (normalized amplitudes, weight) where weight = 1 − ε is the
    squared norm of the projection.  ``basis`` selects the computational
    basis or the σ_x product basis |φ_s⟩ (index order of the sign vectors).
    """
    chi = encode(state, params)
    y = _pointer_overlap_vector(chi.as_matrix(), params)
    weight = float(np.sum(np.abs(y) ** 2))
    if weight == 0.0:
        raise ValueError("encoded state has no overlap with the pointer state")
    if basis == "phi":
        y = register.phi_basis_matrix(params.n_qubits).conj().T @ y
    elif basis != "computational":
        raise ValueError("basis must be 'phi' or 'computational'")
    return y / math.sqrt(weight), weight


@dataclass(frozen=True)
class ResetResult:
    """Mode reset outcome: pointer state plus register spectral ensemble."""

    pointer: CvState
    branches: tuple[tuple[float, np.ndarray], ...]
    rank: int

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.branches])


def register_reduced_density(state: HybridState) -> np.ndarray:
    """Trace out the mode: ρ_reg[r, r'] = Σ_n χ[n,r] χ*[n,r']."""
    x = state.as_matrix()
    rho = x.T @ x.conj()
    return 0.5 * (rho + rho.conj().T)


def cv_reduced_density(state: HybridState) -> CvDensity:
    """Trace out the register."""
    x = state.as_matrix()
    return CvDensity(x @ x.conj().T)


def reset_cv(state: HybridState, params: ProtocolParams) -> ResetResult:
    """Replace the mode by the canonical pointer state.

    The register keeps its reduced state, returned as a spectral branch
    ensemble (weights descending, pruned below 1e−12).
    """
    rho = register_reduced_density(state)
    evals, evecs = np.linalg.eigh(rho)
    branches = []
    for idx in range(evals.size - 1, -1, -1):
        w = float(evals[idx])
        if w > BRANCH_PRUNE_TOL:
            vec = evecs[:, idx].copy()
            vec.flags.writeable = False
            branches.append((w, vec))
    return ResetResult(tilde0(params), tuple(branches), len(branches))


def _ensemble_density(branches, n_qubits: int) -> np.ndarray:
    rho = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for w, vec in branches:
        rho += w * np.outer(vec, np.conj(vec))
    return rho


def _spectral_branches(rho: np.ndarray) -> list[tuple[float, np.ndarray]]:
    evals, evecs = np.linalg.eigh(rho)
    out = []
    for idx in range(evals.size - 1, -1, -1):
        if float(evals[idx]) > BRANCH_PRUNE_TOL:
            out.append((float(evals[idx]), evecs[:, idx]))
    return out


def recovered_fidelity(
    state: CvState,
    params: ProtocolParams,
    channel: noise.KrausChannel | None = None,
    via_decode: bool = False,
) -> float:
    """Fidelity of the round trip encode → mode reset → noise → decode.

    The stored register goes through ``channel`` on every qubit (identity
    when None); each spectral branch of the result is decoded jointly with
    the pointer state and compared against input ⊗ ground.  Because decoding
    is exactly unitary, each branch overlap equals the direct inner product
    with the encoded state, which is how the default path evaluates it; the
    ``via_decode`` path runs the literal per-branch decoding instead and is
    kept for verification.
    """
    chi = encode(state, params)
    reset = reset_cv(chi, params)
    branches = reset.branches
    if channel is not None:
        branches = noise.apply_to_register(branches, channel, "all")
    # any ensemble on the register equals its spectral form of rank ≤ 2^N
    rho = _ensemble_density(branches, params.n_qubits)
    if not via_decode:
        y = _pointer_overlap_vector(chi.as_matrix(), params)
        val = float(np.real(y.conj() @ rho @ y))
        return min(1.0, max(0.0, val))
    pointer = reset.pointer
    target = np.zeros((params.dim, params.register_dim), dtype=complex)
    target[:, 0] = state.amps
    total = 0.0
    for w, vec in _spectral_branches(rho):
        joint = np.outer(pointer.amps, vec)
        dec = _decode_block(joint, params)
        total += w * abs(np.vdot(target, dec)) ** 2
    return min(1.0, max(0.0, total))


def recovered_cv_density(
    state: CvState,
    params: ProtocolParams,
    channel: noise.KrausChannel | None = None,
) -> CvDensity:
    """Reduced mode state after the full round trip (for phase-space plots)."""
    chi = encode(state, params)
    reset = reset_cv(chi, params)
    branches = reset.branches
    if channel is not None:
        branches = noise.apply_to_register(branches, channel, "all")
    spectral = _spectral_branches(_ensemble_density(branches, params.n_qubits))
    pointer = reset.pointer
    rho_cv = np.zeros((params.dim, params.dim), dtype=complex)
    for w, vec in spectral:
        joint = np.outer(pointer.amps, vec)
        dec = _decode_block(joint, params)
        rho_cv += w * (dec @ dec.conj().T)
    rho_cv /= float(np.trace(rho_cv).real)
    return CvDensity(0.5 * (rho_cv + rho_cv.conj().T))


# ---------------------------------------------------------------------------
# interaction-parameter optimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptimizeResult:
    lam: float
    epsilon: float
    evaluations: int


def optimize_lambda(
    state: CvState,
    n_qubits: int,
    bounds: tuple[float, float] = (0.02, 0.8),
    coarse_points: int = 30,
    tol: float = 1e-3,
) -> OptimizeResult:
    """Minimize the transfer error over the interaction parameter.

    A coarse grid over ``bounds`` seeds a golden-section refinement of the
    best bracket; the error landscape has a single interior minimum for the
    inputs considered here, so this is reliable and deterministic.
    """
    lo, hi = bounds
    if not (0 < lo < hi):
        raise ValueError("invalid bounds")
    cache: dict[float, float] = {}

    def f(lam: float) -> float:
        if lam not in cache:
            cache[lam] = epsilon(state, ProtocolParams(lam, n_qubits, state.dim))
        return cache[lam]

    grid = np.linspace(lo, hi, coarse_points)
    values = [f(x) for x in grid]
    best = int(np.argmin(values))
    a = grid[max(0, best - 1)]
    b = grid[min(len(grid) - 1, best + 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    while b - a > tol:
        if f(c) < f(d):
            b, d = d, c
            c = b - invphi * (b - a)
        else:
            a, c = c, d
            d = a + invphi * (b - a)
    lam_best = min(cache, key=cache.get)
    return OptimizeResult(float(lam_best), cache[lam_best], len(cache))
