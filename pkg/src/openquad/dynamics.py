"""Time-domain tools for static and driven quadratic Liouvilleans.

For a static Liouvillean the propagator is diagonal in the normal-master
-mode excitation basis, which yields closed-form steady-state dynamical
correlation functions and an O(n^3) propagation rule for the two-point
matrix of any Gaussian initial state.  Explicitly time-dependent
problems are handled through the time-ordered 4n x 4n group element
U = T exp(2 Int A(t) dt) and its logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .ness import NonUniqueNESSError, TwoPointMatrix, ness_two_point
from .spectra import NormalModes, StructureMatrix, normal_modes

__all__ = [
    "BranchAmbiguityError",
    "StepTooLargeError",
    "DriveSchedule",
    "dynamic_correlator",
    "time_ordered_propagator",
    "propagate_two_point",
    "propagate_schedule",
]


class BranchAmbiguityError(Exception):
    """An eigenvalue of the time-ordered propagator sits too close to the
    negative real axis; the principal matrix logarithm is unreliable."""


class StepTooLargeError(Exception):
    """The midpoint-rule step violates ||2 A|| dt < 0.5."""


@dataclass(frozen=True)
class DriveSchedule:
    """Sampled drive A(t), A0(t) on [0, t_final] with fixed step dt.

    ``sampler`` maps a time to the instantaneous structure matrix data;
    each sampled A must be antisymmetric.
    """

    sampler: Callable[[float], tuple[np.ndarray, complex]]
    t_final: float
    dt: float

    def __post_init__(self):
        if self.t_final <= 0 or self.dt <= 0:
            raise ValueError("horizon and step must be positive")


def dynamic_correlator(modes: NormalModes, pair_jk, pair_lm, times) -> np.ndarray:
    """Steady-state response C_(j,k),(l,m)(t) = <w_j(t) w_k(t) w_l w_m>.

    Only zero- and two-excitation sectors contribute, giving the
    factorized static term plus a double sum over mode pairs weighted by
    exp(-2t(beta_r + beta_r')).  The relative sign of the two-excitation
    term is fixed by Wick's theorem at t = 0 (it comes out opposite to
    the obvious pairing because the two annihilation maps anticommute
    past each other when contracted).  Majorana indices are 1-based;
    t >= 0.
    """
    _require_unique(modes)
    j, k = pair_jk
    l, m = pair_lm
    scalar = np.ndim(times) == 0
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if (times < 0).any():
        raise ValueError("correlator defined for t >= 0")
    V = modes.V
    beta = modes.rapidities
    cols = [2 * (idx - 1) for idx in (j, k, l, m)]  # odd 1-based -> 0-based even
    Ve = V[1::2]  # rows 2r (1-based)
    Vo = V[0::2]  # rows 2r-1 (1-based)
    uj, uk = Ve[:, cols[0]], Ve[:, cols[1]]
    vl, vm = Vo[:, cols[2]], Vo[:, cols[3]]
    static = 4.0 * (uj @ Vo[:, cols[1]]) * (Ve[:, cols[2]] @ vm)
    F = np.outer(uk, uj) - np.outer(uj, uk)
    G = np.outer(vm, vl) - np.outer(vl, vm)
    pair_rate = beta[:, None] + beta[None, :]
    iu = np.triu_indices(len(beta), k=1)
    weights = (F * G)[iu]
    rates = pair_rate[iu]
    out = static - 4.0 * np.exp(-2.0 * np.outer(times, rates)) @ weights
    return complex(out[0]) if scalar else out


def _require_unique(modes: NormalModes) -> None:
    if modes.rapidities.real.min() <= 1e-10:
        raise NonUniqueNESSError("dynamics formulas need all Re beta > 0")


def time_ordered_propagator(schedule: DriveSchedule):
    """U = T exp(2 Int_0^t A(tau) dtau) by an ordered product of midpoint
    exponentials, and its generator (C, C0) with C = log(U)/2, C0 = Int A0.

    Second-order accurate in dt.  Raises StepTooLargeError when
    ||2 A|| dt >= 0.5 at any midpoint, and BranchAmbiguityError when an
    eigenvalue of U has phase within 0.1 rad of +-pi (principal log
    branch undefined).
    """
    n_steps = int(round(schedule.t_final / schedule.dt))
    if n_steps < 1 or abs(n_steps * schedule.dt - schedule.t_final) > 1e-9 * schedule.t_final:
        raise ValueError("t_final must be an integer number of steps")
    dt = schedule.dt
    U = None
    C0 = 0.0 + 0.0j
    for i in range(n_steps):
        A, A0 = schedule.sampler((i + 0.5) * dt)
        A = np.asarray(A, dtype=complex)
        if np.abs(A + A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
            raise ValueError("sampled structure matrix is not antisymmetric")
        if 2.0 * np.linalg.norm(A, 2) * dt >= 0.5:
            raise StepTooLargeError(
                f"||2A|| dt = {2 * np.linalg.norm(A, 2) * dt:.3f} >= 0.5 at step {i}"
            )
        step = sla.expm(2.0 * dt * A)
        U = step if U is None else step @ U  # later times act on the left
        C0 += complex(A0) * dt
    phases = np.angle(np.linalg.eigvals(U))
    if (np.abs(np.abs(phases) - np.pi) < 0.1).any():
        raise BranchAmbiguityError(
            "an eigenvalue of U lies within 0.1 rad of the branch cut"
        )
    C = 0.5 * sla.logm(U)
    C = 0.5 * (C - C.T)  # the exact generator is antisymmetric; strip noise
    return U, C, C0


def _mode_correlations(two_point: TwoPointMatrix) -> np.ndarray:
    """<1| a_r a_s |rho> for an even, trace-one state with two-point
    matrix T, over all 4n adjoint-Majorana indices."""
    T = two_point.T
    two_n = T.shape[0]
    S = np.empty((2 * two_n, 2 * two_n), dtype=complex)
    S[0::2, 0::2] = T / 2.0
    S[0::2, 1::2] = -0.5j * T.T
    S[1::2, 0::2] = 0.5j * T
    S[1::2, 1::2] = T.T / 2.0
    return S


def propagate_two_point(
    modes: NormalModes, initial: TwoPointMatrix, t: float
) -> TwoPointMatrix:
    """Evolve the two-point matrix of a Gaussian state for time t under
    the static Liouvillean with the given normal modes.

    T(t) = T_ness + 2 Ve^T (g o E(t)) Ve, where g_rs = <1| b_r b_s |rho0>
    collects the two-excitation content of the initial state and
    E_rs(t) = exp(-2t(beta_r + beta_s)).  T(t) -> T_ness at the rate set
    by the spectral gap.
    """
    _require_unique(modes)
    beta = modes.rapidities
    V = modes.V
    T_ness = ness_two_point(modes).T
    S = _mode_correlations(initial)
    Vplus = V[0::2]  # +beta rows define the annihilation maps b_r
    g = Vplus @ S @ Vplus.T
    g = 0.5 * (g - g.T)  # exactly antisymmetric in exact arithmetic
    E = np.exp(-2.0 * t * (beta[:, None] + beta[None, :]))
    Ve_odd = V[1::2, 0::2]
    T_t = T_ness + 2.0 * Ve_odd.T @ (g * E) @ Ve_odd
    return TwoPointMatrix(T_t)


def propagate_schedule(schedule: DriveSchedule, initial: TwoPointMatrix) -> TwoPointMatrix:
    """Two-point matrix after evolving ``initial`` through the full drive.

    The time-ordered propagator is collapsed to its generator C, which is
    then treated as a static Liouvillean for unit time.
    """
    _, C, _ = time_ordered_propagator(schedule)
    modes = normal_modes(StructureMatrix(C, 0.0))
    return propagate_two_point(modes, initial, 1.0)
