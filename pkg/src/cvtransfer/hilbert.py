"""Dense truncated Fock-space numerics for a single bosonic mode.

Conventions used throughout the package:

* quadratures ``q = (a + a†)/√2`` and ``p = i(a† − a)/√2``, so ``[q, p] = i``,
* the vacuum therefore has ⟨q²⟩ = ⟨p²⟩ = 1/2 and position wavefunction
  ``π^{-1/4} exp(-q²/2)``,
* states are complex amplitude vectors over the number basis |0⟩ … |d−1⟩.

Unitaries are built by exponentiating truncated generators through their
eigendecomposition, so they are exactly unitary at any dimension.  They agree
with the infinite-dimensional operators only away from the truncation edge,
which is why several checks in this package restrict themselves to an
"interior" fraction of the basis.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10
HYBRID_NORM_TOL = 1e-9
DEFAULT_LEAKAGE_TOL = 1e-6


class DimensionError(ValueError):
    """A dimension is too small, or two objects live in different spaces."""


class TruncationError(RuntimeError):
    """A construction does not fit inside the truncated basis."""

    def __init__(self, message: str, leakage: float):
        super().__init__(message)
        self.leakage = leakage


class TruncationWarning(UserWarning):
    """An operation strains the truncated basis but can proceed."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CvState:
    """Pure state of the mode: complex amplitudes over |0⟩ … |d−1⟩."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise DimensionError("a CV state needs at least two basis levels")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {nrm} deviates from 1 by more than {NORM_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def normalized(cls, amps) -> "CvState":
        amps = np.asarray(amps, dtype=complex)
        nrm = float(np.linalg.norm(amps))
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / nrm)

    @property
    def dim(self) -> int:
        return self.amps.size


@dataclass(frozen=True)
class CvOperator:
    """Dense operator on the truncated mode."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
            raise DimensionError("operator must be square with dimension >= 2")
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dagger(self) -> "CvOperator":
        return CvOperator(self.mat.conj().T)

    def apply(self, state: CvState) -> CvState:
        if state.dim != self.dim:
            raise DimensionError("operator and state dimensions differ")
        return CvState.normalized(self.mat @ state.amps)


@dataclass(frozen=True)
class CvDensity:
    """Density operator: Hermitian, unit trace, positive within tolerance."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 2:
            raise DimensionError("density must be square with dimension >= 2")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian within 1e-10")
        tr = float(np.trace(mat).real)
        if abs(tr - 1.0) > 1e-8:
            raise ValueError(f"density trace {tr} deviates from 1 by more than 1e-8")
        if float(np.linalg.eigvalsh(mat).min()) < -1e-8:
            raise ValueError("density matrix has an eigenvalue below -1e-8")
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_state(cls, state: CvState) -> "CvDensity":
        return cls(np.outer(state.amps, state.amps.conj()))

    @classmethod
    def from_branches(cls, branches) -> "CvDensity":
        """Build from an ensemble of ``(weight, amplitude-vector)`` pairs."""
        mat = None
        for weight, vec in branches:
            vec = np.asarray(vec, dtype=complex)
            term = weight * np.outer(vec, vec.conj())
            mat = term if mat is None else mat + term
        return cls(mat)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _ladder(dim: int) -> np.ndarray:
    """Annihilation operator a with a|n⟩ = √n |n−1⟩ (read-only)."""
    a = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    a[ns - 1, ns] = np.sqrt(ns)
    a.flags.writeable = False
    return a


def _check_dim(dim: int) -> None:
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise DimensionError(f"dimension must be an integer >= 2, got {dim!r}")


def quadrature_q(dim: int) -> CvOperator:
    """Position quadrature q = (a + a†)/√2 in the Fock basis."""
    _check_dim(dim)
    a = _ladder(dim)
    return CvOperator((a + a.conj().T) / math.sqrt(2.0))


def quadrature_p(dim: int) -> CvOperator:
    """Momentum quadrature p = i(a† − a)/√2 in the Fock basis."""
    _check_dim(dim)
    a = _ladder(dim)
    return CvOperator(1j * (a.conj().T - a) / math.sqrt(2.0))


@lru_cache(maxsize=None)
def q_eigenbasis(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and (real orthogonal) eigenvectors of the truncated q.

    q is real symmetric tridiagonal with zero diagonal, so this is cheap even
    for a few thousand levels.  Cached per dimension; both arrays read-only.
    """
    _check_dim(dim)
    offdiag = np.sqrt(np.arange(1, dim)) / math.sqrt(2.0)
    evals, evecs = eigh_tridiagonal(np.zeros(dim), offdiag)
    evals.flags.writeable = False
    evecs.flags.writeable = False
    return evals, evecs


@lru_cache(maxsize=None)
def fock_phases(dim: int) -> np.ndarray:
    """Diagonal of diag(i^n); conjugating q by it gives p."""
    ph = 1j ** (np.arange(dim) % 4)
    ph.flags.writeable = False
    return ph


def expi_q(dim: int, c: float) -> np.ndarray:
    """Unitary exp(i c q) built from the eigendecomposition of q."""
    evals, evecs = q_eigenbasis(dim)
    return (evecs * np.exp(1j * c * evals)[None, :]) @ evecs.T


def expi_p(dim: int, c: float) -> np.ndarray:
    """Unitary exp(i c p); uses p = D q D† with D = diag(i^n)."""
    ph = fock_phases(dim)
    return (ph[:, None] * expi_q(dim, c)) * ph.conj()[None, :]


def apply_expi_q(dim: int, c: float, block: np.ndarray) -> np.ndarray:
    """exp(i c q) @ block without materializing the unitary."""
    evals, evecs = q_eigenbasis(dim)
    return evecs @ (np.exp(1j * c * evals)[:, None] * (evecs.T @ block))


def apply_expi_p(dim: int, c: float, block: np.ndarray) -> np.ndarray:
    """exp(i c p) @ block via the diag(i^n) conjugation of exp(i c q)."""
    ph = fock_phases(dim)
    return ph[:, None] * apply_expi_q(dim, c, ph.conj()[:, None] * block)


def displacement(dim: int, beta: complex) -> CvOperator:
    """Displacement exp(β a† − β* a), exactly unitary on the truncated space.

    Warns when |β| gets close to the truncation radius; the matrix then no
    longer agrees with the infinite-dimensional displacement on the upper
    part of the basis.
    """
    _check_dim(dim)
    beta = complex(beta)
    if abs(beta) > math.sqrt(dim) / 4.0:
        warnings.warn(
            TruncationWarning(
                f"displacement |beta|={abs(beta):.3g} is large for dimension {dim}; "
                f"matrix elements are reliable only on the basis interior"
            ),
            stacklevel=2,
        )
    # β a† − β* a = i(√2 Im β) q − i(√2 Re β) p; exponentiate the Hermitian
    # generator H with exp(iH) so the result is unitary to round-off.
    h = (
        math.sqrt(2.0) * beta.imag * quadrature_q(dim).mat
        - math.sqrt(2.0) * beta.real * quadrature_p(dim).mat
    )
    evals, evecs = np.linalg.eigh(h)
    return CvOperator((evecs * np.exp(1j * evals)[None, :]) @ evecs.conj().T)


def interior_unitarity_defect(op: CvOperator | np.ndarray, fraction: float = 0.8) -> float:
    """Max elementwise deviation of U†U from identity on the lower basis block."""
    mat = op.mat if isinstance(op, CvOperator) else np.asarray(op)
    m = max(2, int(round(fraction * mat.shape[0])))
    defect = mat.conj().T @ mat - np.eye(mat.shape[0])
    return float(np.max(np.abs(defect[:m, :m])))


# ---------------------------------------------------------------------------
# standard states
# ---------------------------------------------------------------------------


def fock(dim: int, m: int) -> CvState:
    """Number state |m⟩."""
    _check_dim(dim)
    if not 0 <= m < dim:
        raise DimensionError(f"Fock index {m} outside 0..{dim - 1}")
    amps = np.zeros(dim, dtype=complex)
    amps[m] = 1.0
    return CvState(amps)


def vacuum(dim: int) -> CvState:
    return fock(dim, 0)


def squeezed_vacuum(dim: int, r: float, leakage_tol: float | None = DEFAULT_LEAKAGE_TOL) -> CvState:
    """Position-squeezed vacuum with ⟨q²⟩ = e^{−2r}/2.

    Amplitudes follow the exact two-term recurrence of the infinite-dimensional
    state, truncated at ``dim`` and renormalized, so the norm shortfall is the
    exact truncation leakage.  ``leakage_tol=None`` downgrades the leakage
    error to a warning (used when a lossy approximation is acceptable).
    """
    _check_dim(dim)
    amps = np.zeros(dim, dtype=complex)
    t = math.tanh(r)
    amps[0] = 1.0 / math.sqrt(math.cosh(r))
    for n in range(0, dim - 2, 2):
        amps[n + 2] = -t * math.sqrt((n + 1) / (n + 2)) * amps[n]
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if leakage_tol is not None and leakage > leakage_tol:
        raise TruncationError(
            f"squeezed vacuum r={r:.4g} leaks {leakage:.3g} of its norm beyond {dim} levels",
            leakage,
        )
    if leakage_tol is None and leakage > DEFAULT_LEAKAGE_TOL:
        warnings.warn(
            TruncationWarning(
                f"squeezed vacuum r={r:.4g} truncated with leakage {leakage:.3g}"
            ),
            stacklevel=2,
        )
    return CvState.normalized(amps)


def coherent(dim: int, alpha: complex, leakage_tol: float | None = DEFAULT_LEAKAGE_TOL) -> CvState:
    """Coherent state |α⟩ from its exact Fock amplitudes."""
    _check_dim(dim)
    alpha = complex(alpha)
    ns = np.arange(dim)
    # e^{-|α|²/2} α^n/√(n!) evaluated in log space to avoid overflow
    logmag = -abs(alpha) ** 2 / 2.0 + ns * math.log(max(abs(alpha), 1e-300))
    logmag -= 0.5 * np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    amps = np.exp(logmag) * np.exp(1j * ns * np.angle(alpha))
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    if leakage_tol is not None and leakage > leakage_tol:
        raise TruncationError(
            f"coherent state |alpha|={abs(alpha):.4g} leaks {leakage:.3g} beyond {dim} levels",
            leakage,
        )
    return CvState.normalized(amps)


def cat(dim: int, alpha: float, leakage_tol: float | None = DEFAULT_LEAKAGE_TOL) -> CvState:
    """Even cat state: the symmetric superposition of two position-displaced vacua.

    Built as (D(α) + D(−α))|0⟩ up to normalization, i.e. two coherent states
    on the q axis; the position distribution peaks near q = ±√2 α.
    """
    _check_dim(dim)
    alpha = float(alpha)
    ns = np.arange(dim)
    logfact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, dim)))))
    logterm = -(alpha**2) / 2.0 + ns * math.log(max(abs(alpha), 1e-300)) - 0.5 * logfact
    amps = np.where(ns % 2 == 0, 2.0 * np.exp(logterm), 0.0).astype(complex)
    norm_exact = 2.0 * (1.0 + math.exp(-2.0 * alpha**2))
    leakage = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)) / norm_exact)
    if leakage_tol is not None and leakage > leakage_tol:
        raise TruncationError(
            f"cat alpha={alpha:.4g} leaks {leakage:.3g} of its norm beyond {dim} levels",
            leakage,
        )
    return CvState.normalized(amps)


# ---------------------------------------------------------------------------
# wavefunctions and Wigner functions
# ---------------------------------------------------------------------------


def hermite_functions(nmax: int, qgrid: np.ndarray) -> np.ndarray:
    """Orthonormal Hermite functions h_0 … h_{nmax−1} on a grid, shape (nmax, nq).

    These satisfy ∫ h_m h_n dq = δ_{mn} with the vacuum ⟨q²⟩ = 1/2 convention;
    evaluated with the stable upward recurrence.
    """
    q = np.asarray(qgrid, dtype=float)
    if not np.all(np.isfinite(q)):
        raise ValueError("grid contains non-finite points")
    out = np.zeros((nmax, q.size), dtype=float)
    if nmax == 0:
        return out
    out[0] = np.pi ** (-0.25) * np.exp(-0.5 * q * q)
    if nmax > 1:
        out[1] = math.sqrt(2.0) * q * out[0]
    for n in range(2, nmax):
        out[n] = math.sqrt(2.0 / n) * q * out[n - 1] - math.sqrt((n - 1) / n) * out[n - 2]
    return out


def wavefunction(state: CvState, qgrid: np.ndarray) -> np.ndarray:
    """Position wavefunction ψ(q) = Σ_n c_n h_n(q) of a pure state."""
    h = hermite_functions(state.dim, qgrid)
    return state.amps @ h


def q_distribution(rho: CvDensity | CvState, qgrid: np.ndarray) -> np.ndarray:
    """Position distribution ⟨q|ρ|q⟩ on a grid."""
    if isinstance(rho, CvState):
        return np.abs(wavefunction(rho, qgrid)) ** 2
    h = hermite_functions(rho.dim, qgrid)
    return np.einsum("mi,mn,ni->i", h, rho.mat, h).real


def photon_distribution(rho: CvDensity | CvState) -> np.ndarray:
    if isinstance(rho, CvState):
        return np.abs(rho.amps) ** 2
    return np.diag(rho.mat).real.copy()


def mean_photon_number(rho: CvDensity | CvState) -> float:
    probs = photon_distribution(rho)
    return float(np.arange(probs.size) @ probs)


def default_grid(extent: float = 7.5, points: int = 301) -> tuple[np.ndarray, np.ndarray]:
    """Default phase-space grid used by normalization checks and the CLI."""
    g = np.linspace(-extent, extent, points)
    return g, g.copy()


def _laguerre_clenshaw(ell: int, x: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Clenshaw evaluation of Σ_n c_n β_n(x) for the scaled Laguerre terms.

    β_n = (−1)^n √(ℓ! n!/(ℓ+n)!) L_n^{(ℓ)}(x) obeys
    β_{n+1} = A_n β_n + B_n β_{n−1} with
    A_n = −(2n+ℓ+1−x)/√((n+1)(ℓ+n+1)) and B_n = −√(n(n+ℓ))/√((n+1)(ℓ+n+1)).
    """
    m = len(coeffs)
    if m == 0:
        return np.zeros_like(x)
    y1 = np.zeros_like(x, dtype=complex)
    y2 = np.zeros_like(x, dtype=complex)
    for n in range(m - 1, -1, -1):
        a_n = -((2 * n + ell + 1) - x) / math.sqrt((n + 1) * (ell + n + 1))
        b_n1 = -math.sqrt((n + 1) * (n + 1 + ell)) / math.sqrt((n + 2) * (ell + n + 2))
        y1, y2 = coeffs[n] + a_n * y1 + b_n1 * y2, y1
    return y1


def wigner(rho: CvDensity | CvState, qgrid: np.ndarray, pgrid: np.ndarray) -> np.ndarray:
    """Wigner function W(q, p) normalized so that ∬ W dq dp = 1.

    Evaluated through the displaced-parity series, summing analytic Laguerre
    terms diagonal-by-diagonal with Clenshaw recurrences (no grid aliasing;
    every point is computed independently).  Returns shape (len(q), len(p)).
    """
    if isinstance(rho, CvState):
        rho = CvDensity.from_state(rho)
    q = np.asarray(qgrid, dtype=float)
    p = np.asarray(pgrid, dtype=float)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise ValueError("grid contains non-finite points")
    d = rho.dim
    qq, pp = np.meshgrid(q, p, indexing="ij")
    a2 = math.sqrt(2.0) * (qq + 1j * pp)  # argument of the displaced parity
    b = np.abs(a2) ** 2
    # Horner over diagonals: S = Σ_L c_L(b) a2^L/√(L!), off-diagonals doubled
    # by the later Re[…]; diagonals with no weight are skipped.
    acc = np.zeros_like(a2, dtype=complex)
    for ell in range(d - 1, -1, -1):
        acc *= a2 / math.sqrt(ell + 1)
        diag = np.diagonal(rho.mat, offset=ell)
        scale = 1.0 if ell == 0 else 2.0
        if np.max(np.abs(diag)) > 1e-300:
            acc += _laguerre_clenshaw(ell, b, scale * diag)
    return acc.real * np.exp(-0.5 * b) / math.pi


# ---------------------------------------------------------------------------
# fidelities and expectation values
# ---------------------------------------------------------------------------


def _amps_of(obj) -> np.ndarray:
    amps = getattr(obj, "amps", obj)
    return np.asarray(amps, dtype=complex)


def fidelity_pure(a, b) -> float:
    """|⟨a|b⟩|² for two pure states (CV, register or hybrid)."""
    va, vb = _amps_of(a), _amps_of(b)
    if va.shape != vb.shape:
        raise DimensionError(f"state dimensions differ: {va.shape} vs {vb.shape}")
    return float(min(1.0, abs(np.vdot(va, vb)) ** 2))


def fidelity_mixed(psi, rho: CvDensity | np.ndarray) -> float:
    """⟨ψ|ρ|ψ⟩ for a pure state against a density operator."""
    v = _amps_of(psi)
    mat = rho.mat if isinstance(rho, CvDensity) else np.asarray(rho)
    if mat.shape != (v.size, v.size):
        raise DimensionError("state and density dimensions differ")
    val = float(np.real(v.conj() @ mat @ v))
    return min(1.0, max(0.0, val))


def expectation(state: CvState, op: CvOperator | np.ndarray) -> complex:
    mat = op.mat if isinstance(op, CvOperator) else np.asarray(op)
    if mat.shape != (state.dim, state.dim):
        raise DimensionError("operator and state dimensions differ")
    return complex(state.amps.conj() @ mat @ state.amps)
