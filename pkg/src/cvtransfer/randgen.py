"""Seeded generator of random mode states with a prescribed mean photon number.

A state is drawn as a vector of complex Fock coefficients with uniform
amplitudes in [0, 1) and phases in [0, 2π), then damped by an exponential
filter e^{−κm} whose strength is solved so the normalized state hits the
requested mean photon number.  Identical seeds give bitwise-identical
states; ensemble members derive their seeds from a master seed through
spawned seed sequences, so parallel generation is order-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .hilbert import CvState

KAPPA_MAX = 50.0
NBAR_TOL = 1e-6


@dataclass(frozen=True)
class RandomStateSpec:
    target_nbar: float
    seed: int
    dim: int = 200
    n_terms: int = 200

    def __post_init__(self):
        if self.n_terms < 2 or self.n_terms > self.dim:
            raise ValueError("need 2 <= n_terms <= dim")
        if not 0.0 < self.target_nbar < self.n_terms / 2.0:
            raise ValueError(
                f"target mean photon number {self.target_nbar} outside the reachable "
                f"range (0, {self.n_terms / 2})"
            )


def mean_photon(state: CvState) -> float:
    """Σ_m m |c_m|² of a normalized state."""
    probs = np.abs(state.amps) ** 2
    return float(np.arange(state.dim) @ probs)


def _filtered_nbar(kappa: float, weights: np.ndarray) -> float:
    """Mean photon number after the e^{−κm} filter, for |c_m|² = weights."""
    ms = np.arange(weights.size)
    damped = weights * np.exp(-2.0 * kappa * ms)
    return float((ms @ damped) / np.sum(damped))


def _draw(seq: np.random.SeedSequence, spec: RandomStateSpec) -> CvState:
    rng = np.random.Generator(np.random.PCG64(seq))
    mags = rng.uniform(0.0, 1.0, spec.n_terms)
    phases = rng.uniform(0.0, 2.0 * np.pi, spec.n_terms)
    coeffs = mags * np.exp(1j * phases)
    weights = mags**2

    def objective(kappa: float) -> float:
        return _filtered_nbar(kappa, weights) - spec.target_nbar

    low, high = objective(0.0), objective(KAPPA_MAX)
    if low < 0.0 or high > 0.0:
        raise RuntimeError(
            f"mean photon target {spec.target_nbar} not bracketed: filter range "
            f"[{high + spec.target_nbar:.4g}, {low + spec.target_nbar:.4g}] "
            f"for kappa in [0, {KAPPA_MAX}]"
        )
    kappa = brentq(objective, 0.0, KAPPA_MAX, xtol=1e-13, rtol=8.9e-16)
    amps = np.zeros(spec.dim, dtype=complex)
    amps[: spec.n_terms] = coeffs * np.exp(-kappa * np.arange(spec.n_terms))
    state = CvState.normalized(amps)
    achieved = mean_photon(state)
    if abs(achieved - spec.target_nbar) > NBAR_TOL:
        raise RuntimeError(
            f"filter tuning stopped at mean photon {achieved}, "
            f"target {spec.target_nbar} ± {NBAR_TOL}"
        )
    return state


def random_state(spec: RandomStateSpec) -> CvState:
    """One reproducible random state; identical spec ⇒ identical amplitudes."""
    return _draw(np.random.SeedSequence(spec.seed), spec)


def random_states(
    master_seed: int, count: int, target_nbar: float, dim: int = 200, n_terms: int = 200
) -> list[CvState]:
    """An ensemble of reproducible states indexed by a master seed.

    Member i is fully determined by (master_seed, i) via spawned seed
    sequences, so generation order (or parallelism) cannot change results.
    """
    spec = RandomStateSpec(target_nbar, 0, dim, n_terms)
    children = np.random.SeedSequence(master_seed).spawn(count)
    return [_draw(child, spec) for child in children]
