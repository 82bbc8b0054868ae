"""Sign-vector bookkeeping for the qubit register.

The register basis used by the transfer protocol is indexed by sign vectors
s = (s_1, …, s_N) with s_k = ±1.  Each s labels a product state |φ_s⟩ whose
k-th qubit is the s_k eigenstate of σ_x, a sign exponent γ_s (only (−1)^γ_s
matters downstream) and a position-grid sample point q_s.

Storage convention: qubit k = 1 interacts with the mode first and occupies
the *least significant* bit of the computational-basis index; the bit value
is b_k = (1 − s_k)/2, so s = (+1, …, +1) maps to index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .hilbert import DimensionError, NORM_TOL


@dataclass(frozen=True)
class SignVector:
    """Element of {+1, −1}^N."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 1 or any(s not in (-1, 1) for s in signs):
            raise ValueError(f"sign vector entries must be ±1, got {self.signs!r}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def from_index(cls, index: int, n_qubits: int) -> "SignVector":
        if not 0 <= index < 2**n_qubits:
            raise ValueError(f"index {index} outside 0..{2 ** n_qubits - 1}")
        return cls(tuple(1 - 2 * ((index >> k) & 1) for k in range(n_qubits)))

    @property
    def index(self) -> int:
        """Basis index with bit b_k = (1 − s_k)/2 at position k−1."""
        return sum(((1 - s) // 2) << k for k, s in enumerate(self.signs))

    def __len__(self) -> int:
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)


def all_sign_vectors(n_qubits: int) -> list[SignVector]:
    """All 2^N sign vectors in basis-index order."""
    return [SignVector.from_index(i, n_qubits) for i in range(2**n_qubits)]


@dataclass(frozen=True)
class RegisterState:
    """Pure state of the N-qubit register."""

    amps: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if self.n_qubits < 1 or amps.shape != (2**self.n_qubits,):
            raise DimensionError("register amplitudes must have length 2^N")
        nrm = float(np.linalg.norm(amps))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"register norm {nrm} deviates from 1 beyond {NORM_TOL}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)


def phi_state(s: SignVector) -> RegisterState:
    """Product state with qubit k in the s_k eigenstate of σ_x.

    Amplitude at basis index r is Π_k s_k^{b_k} / 2^{N/2} where b_k is bit
    k−1 of r (qubit 1 least significant).
    """
    n = len(s)
    acc = np.array([1.0], dtype=complex)
    for sk in reversed(s.signs):  # qubit N contributes the most significant bit
        acc = np.kron(acc, np.array([1.0, float(sk)]))
    return RegisterState(acc / np.sqrt(acc.size), n)


def gamma(s: SignVector) -> int:
    """Sign exponent attached to |φ_s⟩ by the protocol; exact integer.

    Defined for N ≥ 2 as Σ_{k=1}^{N−2}(s_k + s_{k+1})/2 + (s_{N−1} − s_N)/2,
    every term being −1, 0 or +1.
    """
    signs = s.signs
    n = len(signs)
    if n < 2:
        raise ValueError("sign exponent needs at least two qubits")
    total = sum((signs[k] + signs[k + 1]) // 2 for k in range(n - 2))
    total += (signs[n - 2] - signs[n - 1]) // 2
    return int(total)


def grid_point(s: SignVector, lam: float) -> float:
    """Sample position q_s = Σ_{l<N} s_l λ 2^{l−1} − s_N λ 2^{N−1}.

    Over all s these form the equidistant array −λ(2^N−1) … λ(2^N−1) with
    spacing 2λ.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    signs = s.signs
    n = len(signs)
    total = sum(signs[l] * 2**l for l in range(n - 1)) - signs[n - 1] * 2 ** (n - 1)
    return lam * float(total)


def grid(n_qubits: int, lam: float) -> np.ndarray:
    """q_s for every sign vector, in basis-index order."""
    return np.array([grid_point(s, lam) for s in all_sign_vectors(n_qubits)])


@lru_cache(maxsize=None)
def phi_basis_matrix(n_qubits: int) -> np.ndarray:
    """Unitary whose column j is |φ_s⟩ for the sign vector with index j."""
    cols = [phi_state(s).amps for s in all_sign_vectors(n_qubits)]
    mat = np.column_stack(cols)
    mat.flags.writeable = False
    return mat


def ground_state(n_qubits: int) -> RegisterState:
    """All qubits in |0⟩ (basis index 0)."""
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    return RegisterState(amps, n_qubits)
