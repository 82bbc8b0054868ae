"""Single-qubit Kraus channels applied to register branch ensembles.

Mixed register states are carried around as ensembles of weighted pure
states; applying a channel splits each branch into one sub-branch per Kraus
operator, which keeps downstream decoding at pure-state cost.  Branches with
negligible weight are pruned deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

PRUNE_TOL = 1e-12
COMPLETENESS_TOL = 1e-12

_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class KrausChannel:
    """A qubit channel as a tuple of 2×2 Kraus operators.

    Completeness Σ K†K = 1 is certified at construction.
    """

    ops: tuple[np.ndarray, ...]
    label: str

    def __post_init__(self):
        ops = tuple(np.array(op, dtype=complex) for op in self.ops)
        if not ops or any(op.shape != (2, 2) for op in ops):
            raise ValueError("Kraus operators must be 2x2 matrices")
        total = sum(op.conj().T @ op for op in ops)
        defect = float(np.max(np.abs(total - np.eye(2))))
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"channel {self.label!r} violates completeness by {defect:.3g}")
        for op in ops:
            op.flags.writeable = False
        object.__setattr__(self, "ops", ops)


def identity_channel() -> KrausChannel:
    return KrausChannel((np.eye(2, dtype=complex),), "identity")


def dephasing(p_z: float) -> KrausChannel:
    """Phase flip with probability p_z: {√(1−p_z) 1, √p_z σ_z}."""
    if not 0.0 <= p_z <= 1.0:
        raise ValueError(f"p_z must lie in [0, 1], got {p_z}")
    ops = (
        np.sqrt(1.0 - p_z) * np.eye(2, dtype=complex),
        np.sqrt(p_z) * _SIGMA_Z,
    )
    return KrausChannel(ops, f"dephasing({p_z:g})")


def amplitude_damping(gamma: float) -> KrausChannel:
    """Decay |1⟩→|0⟩ with probability γ: {|0⟩⟨0| + √(1−γ)|1⟩⟨1|, √γ|0⟩⟨1|}."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    k1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k2 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel((k1, k2), f"amplitude-damping({gamma:g})")


Ensemble = Sequence[tuple[float, np.ndarray]]


def _apply_on_qubit(vec: np.ndarray, op: np.ndarray, k: int, n_qubits: int) -> np.ndarray:
    """Apply a 2×2 operator on qubit k (bit k−1) of a register vector."""
    x = vec.reshape(2 ** (n_qubits - k), 2, 2 ** (k - 1))
    return np.einsum("ab,hbl->hal", op, x).reshape(-1)


def apply_to_register(
    branches: Ensemble, channel: KrausChannel, qubit: int | str = "all"
) -> list[tuple[float, np.ndarray]]:
    """Send an ensemble through the channel on one qubit or on every qubit.

    Each branch splits into one weighted, renormalized sub-branch per Kraus
    operator; sub-branches below weight 1e−12 are dropped.  Branch order
    follows the input ensemble (then Kraus-operator order), so the result is
    independent of any parallel scheduling of the caller.
    """
    branches = list(branches)
    if not branches:
        return []
    n_qubits = int(np.log2(len(branches[0][1])))
    if 2**n_qubits != len(branches[0][1]):
        raise ValueError("register vectors must have length 2^N")
    if qubit == "all":
        targets: Iterable[int] = range(1, n_qubits + 1)
    else:
        k = int(qubit)
        if not 1 <= k <= n_qubits:
            raise ValueError(f"qubit index {k} outside 1..{n_qubits}")
        targets = (k,)
    for k in targets:
        next_branches = []
        for weight, vec in branches:
            for op in channel.ops:
                new = _apply_on_qubit(vec, op, k, n_qubits)
                w = weight * float(np.sum(np.abs(new) ** 2))
                if w > PRUNE_TOL:
                    next_branches.append((w, new / np.linalg.norm(new)))
        branches = next_branches
    return branches


def ensemble_density(branches: Ensemble, n_qubits: int) -> np.ndarray:
    """Density matrix represented by a branch ensemble."""
    rho = np.zeros((2**n_qubits, 2**n_qubits), dtype=complex)
    for w, vec in branches:
        rho += w * np.outer(vec, np.conj(vec))
    return rho


def apply_to_density(rho: np.ndarray, channel: KrausChannel, qubit: int) -> np.ndarray:
    """Direct superoperator action on a register density matrix.

    Reference route used to validate the branch semantics.
    """
    n_qubits = int(np.log2(rho.shape[0]))
    out = np.zeros_like(rho)
    for op in channel.ops:
        full = np.kron(
            np.eye(2 ** (n_qubits - qubit)), np.kron(op, np.eye(2 ** (qubit - 1)))
        )
        out += full @ rho @ full.conj().T
    return out
