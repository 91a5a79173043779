"""Steady-state two-point matrix and every observable derived from it.

The non-equilibrium steady state of a quadratic Liouvillean is Gaussian:
it is fully described by T_jk = <w_j w_k> = delta_jk + i B_jk with a real
antisymmetric B.  This module computes T two independent ways (from the
normal-mode eigenvectors, and by quadrature of the resolvent Green's
function), and evaluates magnetization, spin-spin correlators, heat
currents, energy densities, block entropies, and mutual information via
Wick's theorem.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .model import ChainParams
from .spectra import NormalModes, StructureMatrix

__all__ = [
    "NonUniqueNESSError",
    "PositivityWarning",
    "TwoPointMatrix",
    "ObservableReport",
    "ness_two_point",
    "ness_two_point_green",
    "quadratic_expectation",
    "commutator_quadratic",
    "wick_four_point",
    "energy_density_matrices",
    "magnetization_profile",
    "heat_current_profile",
    "energy_density_profile",
    "energy_fluctuation_profile",
    "spin_spin_correlator",
    "correlation_matrix",
    "residual_correlator",
    "correlation_decay",
    "correlation_spectrum",
    "block_entropy",
    "positivity_excess",
    "quantum_mutual_information",
    "observable_report",
]

UNIQUENESS_TOL = 1e-10


class NonUniqueNESSError(Exception):
    """A rapidity real part (numerically) vanishes: no unique steady state."""


class PositivityWarning(UserWarning):
    """Correlation spectrum slightly exceeds 1: the Redfield steady state
    is not exactly positive (expected at low temperature / strong coupling)."""


@dataclass(frozen=True)
class TwoPointMatrix:
    """T_jk = <w_j w_k> in the steady state; T = 1 + iB with B real
    antisymmetric."""

    T: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "T", np.asarray(self.T, dtype=complex))

    @property
    def n(self) -> int:
        return self.T.shape[0] // 2

    @property
    def B(self) -> np.ndarray:
        """Real antisymmetric part: B = -i (T - 1)."""
        return (-1j * (self.T - np.eye(self.T.shape[0]))).real


def _check_unique(modes: NormalModes, tol: float = UNIQUENESS_TOL) -> None:
    if modes.rapidities.real.min() <= tol:
        raise NonUniqueNESSError(
            f"min Re beta <= {tol:g}: steady state is not unique; "
            "two-point matrix undefined"
        )


def ness_two_point(
    modes: NormalModes, uniqueness_tol: float = UNIQUENESS_TOL
) -> TwoPointMatrix:
    """Steady-state T_jk from the normal-mode eigenvectors,

        T_jk = 2 sum_m V[2m, 2j-1] V[2m-1, 2k-1]   (1-based),

    i.e. only odd columns of V enter.  Requires all Re beta_j > 0; the
    default refusal threshold 1e-10 can be lowered for critical points
    whose finite gap underflows it (relaxation there is still unique,
    just slow).
    """
    _check_unique(modes, uniqueness_tol)
    V = modes.V
    Vmin_odd = V[1::2, 0::2]  # rows of -beta eigenvectors, odd columns
    Vplus_odd = V[0::2, 0::2]  # rows of +beta eigenvectors, odd columns
    T = 2.0 * Vmin_odd.T @ Vplus_odd
    return TwoPointMatrix(T)


def _matrix_panel_quad(f, a: float, b: float, tol: float, depth: int = 0):
    """Adaptive Gauss-Lobatto-style panel integration of a matrix-valued
    function: 7-point Simpson refinement with max-norm error control."""
    xs = np.linspace(a, b, 5)
    vals = [f(x) for x in xs]
    h = (b - a) / 4
    coarse = (b - a) / 6.0 * (vals[0] + 4 * vals[2] + vals[4])
    fine = h / 3.0 * (vals[0] + 4 * vals[1] + 2 * vals[2] + 4 * vals[3] + vals[4])
    err = np.abs(fine - coarse).max() / 15.0
    if err < tol or depth >= 28:
        return fine + (fine - coarse) / 15.0, err
    left, el = _matrix_panel_quad(f, a, 0.5 * (a + b), tol / 2, depth + 1)
    right, er = _matrix_panel_quad(f, 0.5 * (a + b), b, tol / 2, depth + 1)
    return left + right, el + er


def ness_two_point_green(
    struct: StructureMatrix | np.ndarray,
    omega_max: float | None = None,
    tol: float = 1e-7,
    rapidity_hint: np.ndarray | None = None,
) -> TwoPointMatrix:
    """Steady-state T_jk by quadrature of the non-equilibrium Green's
    function G(w) = (A - i w)^(-1):

        <w_j w_k> = delta_jk - (1/pi) Int dw [G(w)]_{2j-1, 2k-1}.

    G(w) ~ 1/(i w) at large |w|; the asymptote S(w) = (A + i w)/(w^2 + c^2)
    is subtracted inside the integral (its principal-value integral,
    pi A / c, is restored analytically, and the identity carries the
    delta_jk part), leaving an absolutely convergent integrand

        G - S = (c^2 - A^2) (A - i w)^(-1) / (w^2 + c^2) = O(w^-3).

    The symmetric tail beyond omega_max is corrected to O(omega_max^-5).
    Completely independent of the eigenvector route: one dense solve per
    quadrature node.
    """
    A = struct.A if isinstance(struct, StructureMatrix) else np.asarray(struct)
    four_n = A.shape[0]
    if rapidity_hint is None:
        evals = np.linalg.eigvals(A)
    else:
        evals = np.concatenate([rapidity_hint, -np.asarray(rapidity_hint)])
    beta_scale = np.abs(evals).max()
    if beta_scale == 0:
        raise NonUniqueNESSError("structure matrix vanishes; no unique NESS")
    c = beta_scale
    if omega_max is None:
        omega_max = 1e3 * beta_scale
    eye = np.eye(four_n)
    A2 = A @ A
    prefactor = c**2 * eye - A2

    def integrand(w: float) -> np.ndarray:
        G = np.linalg.solve(A - 1j * w * eye, eye)
        return prefactor @ G / (w**2 + c**2)

    # panel boundaries at the projections of the resolvent poles onto the
    # real axis so the adaptive splitter starts near the sharp features
    marks = np.unique(np.concatenate([evals.imag, [-omega_max, 0.0, omega_max]]))
    marks = marks[(marks >= -omega_max) & (marks <= omega_max)]
    marks = np.unique(np.concatenate([marks, [-omega_max, omega_max]]))
    total = np.zeros((four_n, four_n), dtype=complex)
    err = 0.0
    panel_tol = tol * np.pi / max(len(marks) - 1, 1)
    for a, b in zip(marks[:-1], marks[1:]):
        part, e = _matrix_panel_quad(integrand, a, b, panel_tol)
        total += part
        err += e
    tail = 2.0 * (prefactor @ A) / (3.0 * omega_max**3)
    integral = total + tail + np.pi * A / c
    est_error = (err + np.abs(prefactor @ A2).max() / omega_max**4) / np.pi
    if est_error > 10 * tol:
        raise RuntimeError(
            f"green-function quadrature error estimate {est_error:.2e} "
            f"exceeds tolerance {tol:.2e}"
        )
    iB_full = -integral / np.pi
    T = np.eye(four_n // 2, dtype=complex) + iB_full[0::2, 0::2]
    return TwoPointMatrix(T)


def quadratic_expectation(two_point: TwoPointMatrix, P: np.ndarray) -> complex:
    """<w . P w> = sum_jk P_jk T_jk for antisymmetric P."""
    P = np.asarray(P)
    if np.abs(P + P.T).max() > 1e-12 * max(1.0, np.abs(P).max()):
        raise ValueError("coefficient matrix must be antisymmetric")
    return complex(np.sum(P * two_point.T))


def commutator_quadratic(P: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Coefficient matrix of [w.Pw, w.Rw] = w.Cw:  C = 4 (PR - RP)."""
    P = np.asarray(P)
    R = np.asarray(R)
    for name, Q in (("P", P), ("R", R)):
        if np.abs(Q + Q.T).max() > 1e-12 * max(1.0, np.abs(Q).max()):
            raise ValueError(f"{name} must be antisymmetric")
    return 4.0 * (P @ R - R @ P)


def wick_four_point(two_point: TwoPointMatrix, j: int, k: int, l: int, m: int) -> complex:
    """<w_j w_k w_l w_m> by Wick contraction (0-based Majorana indices)."""
    T = two_point.T
    return complex(T[j, k] * T[l, m] - T[j, l] * T[k, m] + T[j, m] * T[k, l])


def energy_density_matrices(params: ChainParams) -> list[np.ndarray]:
    """Coefficient matrices of the two-body energy density H_m, m=1..n-1:

        H_m = -i (1+g)/2 w_2m w_2m+1 + i (1-g)/2 w_2m-1 w_2m+2
              - i h/2 w_2m-1 w_2m - i h/2 w_2m+1 w_2m+2.

    The sum over m gives the full Hamiltonian matrix minus half the field
    term on the two boundary sites.
    """
    if params.n < 2:
        raise ValueError("energy densities need n >= 2")
    n, gamma, h = params.n, params.gamma, params.h
    out = []
    for m in range(n - 1):
        P = np.zeros((2 * n, 2 * n), dtype=complex)
        a = 2 * m  # w_{2m-1} (1-based) = index 2m (0-based)
        pairs = (
            (a + 1, a + 2, -1j * (1 + gamma) / 2),
            (a, a + 3, 1j * (1 - gamma) / 2),
            (a, a + 1, -1j * h / 2),
            (a + 2, a + 3, -1j * h / 2),
        )
        for i, j, coeff in pairs:
            P[i, j] += coeff / 2
            P[j, i] -= coeff / 2
        out.append(P)
    return out


def magnetization_profile(two_point: TwoPointMatrix) -> np.ndarray:
    """<sz_m> for every site: sz_m = -i w_2m-1 w_2m, so s_z(m) = B[2m-1, 2m]."""
    B = two_point.B
    return np.array([B[2 * m, 2 * m + 1] for m in range(two_point.n)])


def heat_current_profile(two_point: TwoPointMatrix, params: ChainParams) -> np.ndarray:
    """<Q_m> for m = 1..n-2, with Q_m = i [H_m, H_m+1].

    The commutator is evaluated on the six Majorana components the two
    densities share, which keeps the profile O(n) overall.
    """
    if params.n < 3:
        raise ValueError("heat current needs n >= 3")
    hmats = energy_density_matrices(params)
    out = np.empty(params.n - 2)
    for m in range(params.n - 2):
        idx = np.arange(2 * m, 2 * m + 6)
        P = hmats[m][np.ix_(idx, idx)]
        R = hmats[m + 1][np.ix_(idx, idx)]
        C = 1j * commutator_quadratic(P, R)
        val = np.sum(C * two_point.T[np.ix_(idx, idx)])
        if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
            warnings.warn(f"heat current Q_{m + 1} has imaginary part {val.imag:.2e}")
        out[m] = val.real
    return out


def energy_density_profile(two_point: TwoPointMatrix, params: ChainParams) -> np.ndarray:
    """<H_m> for m = 1..n-1."""
    hmats = energy_density_matrices(params)
    vals = np.empty(params.n - 1)
    for m, P in enumerate(hmats):
        idx = np.arange(2 * m, 2 * m + 4)
        val = np.sum(P[np.ix_(idx, idx)] * two_point.T[np.ix_(idx, idx)])
        vals[m] = val.real
    return vals


def energy_fluctuation_profile(
    two_point: TwoPointMatrix, params: ChainParams
) -> np.ndarray:
    """Relative spatial fluctuation f(m) = |<H_m> - Hbar| / |Hbar| with the
    bulk average Hbar over m = 2..n-2 (1-based).  Falls back to absolute
    fluctuations (and warns) when the bulk average vanishes."""
    if params.n < 5:
        raise ValueError("fluctuation profile needs n >= 5")
    dens = energy_density_profile(two_point, params)
    bulk = dens[1 : params.n - 2]  # m = 2 .. n-2 (1-based)
    hbar = bulk.mean()
    if hbar == 0.0:
        warnings.warn("bulk energy density averages to zero; reporting |<H_m> - 0|")
        return np.abs(dens)
    return np.abs(dens - hbar) / abs(hbar)


def spin_spin_correlator(two_point: TwoPointMatrix, l: int, m: int) -> float:
    """Connected <sz_l sz_m> correlator (1-based sites) via Wick's theorem:

        C_lm = <w_2l-1 w_2m-1><w_2l w_2m> - <w_2l-1 w_2m><w_2l w_2m-1>

    for l != m, and 1 - s_z(l)^2 on the diagonal.
    """
    n = two_point.n
    if not (1 <= l <= n and 1 <= m <= n):
        raise ValueError("site indices out of range")
    T = two_point.T
    if l == m:
        sz = two_point.B[2 * l - 2, 2 * l - 1]
        return float(1.0 - sz**2)
    a, b = 2 * l - 2, 2 * m - 2
    val = T[a, b] * T[a + 1, b + 1] - T[a, b + 1] * T[a + 1, b]
    return float(val.real)


def correlation_matrix(two_point: TwoPointMatrix) -> np.ndarray:
    """All connected sz-sz correlations C_lm as an n x n symmetric matrix."""
    T = two_point.T
    Too = T[0::2, 0::2]
    Tee = T[1::2, 1::2]
    Toe = T[0::2, 1::2]
    Teo = T[1::2, 0::2]
    C = (Too * Tee - Toe * Teo).real
    sz = magnetization_profile(two_point)
    np.fill_diagonal(C, 1.0 - sz**2)
    return C


def residual_correlator(C: np.ndarray, n: int | None = None) -> float:
    """Mean |C_lm| over site pairs farther apart than n/2."""
    if n is None:
        n = C.shape[0]
    if n < 4:
        raise ValueError("residual correlator needs n >= 4")
    l, m = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    far = np.abs(l - m) > n / 2
    return float(np.abs(C[far]).mean())


def correlation_decay(C: np.ndarray) -> np.ndarray:
    """Distance-resolved correlator C(r) = mean of C_lm over m - l = r,
    returned for r = 0..n-1."""
    n = C.shape[0]
    return np.array([np.mean(np.diagonal(C, offset=r)) for r in range(n)])


def _binary_entropy(x: np.ndarray) -> np.ndarray:
    """H2(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0."""
    x = np.clip(x, 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0) & (x < 1)
    xi = x[inner]
    out[inner] = -(xi * np.log2(xi) + (1 - xi) * np.log2(1 - xi))
    return out


def correlation_spectrum(two_point: TwoPointMatrix, block) -> np.ndarray:
    """The nu_j >= 0 with +-i nu_j the eigenvalues of B restricted to the
    Majorana rows/columns of the given (1-based) sites."""
    block = sorted(block)
    idx = np.concatenate([[2 * a - 2, 2 * a - 1] for a in block])
    Bsub = two_point.B[np.ix_(idx, idx)]
    nu = np.linalg.eigvalsh(1j * Bsub)
    return np.sort(nu[nu > -1e-12 * max(1.0, np.abs(nu).max())])[::-1][: len(block)]


def block_entropy(two_point: TwoPointMatrix, block) -> float:
    """Von Neumann entropy (base 2) of the sites in ``block``:

        S_A = sum_j H2((1 + nu_j)/2)

    over the #A correlation eigenvalues of the block.  nu is clamped to
    [0, 1]; a clamped excess beyond 1e-7 triggers PositivityWarning but
    never an error (the Redfield steady state may be slightly
    non-positive).
    """
    nu = np.abs(correlation_spectrum(two_point, block))
    excess = max(0.0, nu.max() - 1.0) if len(nu) else 0.0
    if excess > 1e-7:
        warnings.warn(
            f"correlation eigenvalue exceeds 1 by {excess:.2e}; "
            "steady state slightly non-positive",
            PositivityWarning,
            stacklevel=2,
        )
    return float(_binary_entropy((1.0 + np.minimum(nu, 1.0)) / 2.0).sum())


def positivity_excess(two_point: TwoPointMatrix) -> float:
    """max_j nu_j - 1 (clamped below at 0) over the whole lattice."""
    nu = np.abs(correlation_spectrum(two_point, range(1, two_point.n + 1)))
    return float(max(0.0, nu.max() - 1.0))


def quantum_mutual_information(two_point: TwoPointMatrix, n: int | None = None) -> float:
    """I(n) = S_{1..n/2} + S_{n/2+1..n} - S_{1..n} between the chain halves."""
    if n is None:
        n = two_point.n
    if n % 2:
        raise ValueError("mutual information between halves needs even n")
    left = range(1, n // 2 + 1)
    right = range(n // 2 + 1, n + 1)
    whole = range(1, n + 1)
    return (
        block_entropy(two_point, left)
        + block_entropy(two_point, right)
        - block_entropy(two_point, whole)
    )


@dataclass
class ObservableReport:
    """Serializable bundle of every steady-state observable of one model."""

    s_z: np.ndarray
    correlations: np.ndarray
    residual_correlator: float
    correlation_decay: np.ndarray
    heat_current: np.ndarray
    energy_density: np.ndarray
    energy_fluctuation: np.ndarray
    entropy_left: float
    entropy_right: float
    entropy_total: float
    mutual_information: float | None
    positivity_excess: float
    spectral_gap: float | None = None

    def to_dict(self) -> dict:
        return {
            "s_z": self.s_z.tolist(),
            "correlations": self.correlations.tolist(),
            "residual_correlator": self.residual_correlator,
            "correlation_decay": self.correlation_decay.tolist(),
            "heat_current": self.heat_current.tolist(),
            "energy_density": self.energy_density.tolist(),
            "energy_fluctuation": self.energy_fluctuation.tolist(),
            "entropy_left": self.entropy_left,
            "entropy_right": self.entropy_right,
            "entropy_total": self.entropy_total,
            "mutual_information": self.mutual_information,
            "positivity_excess": self.positivity_excess,
            "spectral_gap": self.spectral_gap,
        }


def observable_report(
    two_point: TwoPointMatrix, params: ChainParams, gap: float | None = None
) -> ObservableReport:
    """Evaluate the full observable set of one steady state."""
    n = params.n
    C = correlation_matrix(two_point)
    half = n // 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PositivityWarning)
        s_left = block_entropy(two_point, range(1, half + 1))
        s_right = block_entropy(two_point, range(half + 1, n + 1))
        s_total = block_entropy(two_point, range(1, n + 1))
    qmi = s_left + s_right - s_total if n % 2 == 0 else None
    return ObservableReport(
        s_z=magnetization_profile(two_point),
        correlations=C,
        residual_correlator=residual_correlator(C, n) if n >= 4 else float("nan"),
        correlation_decay=correlation_decay(C),
        heat_current=heat_current_profile(two_point, params) if n >= 3 else np.array([]),
        energy_density=energy_density_profile(two_point, params),
        energy_fluctuation=(
            energy_fluctuation_profile(two_point, params) if n >= 5 else np.array([])
        ),
        entropy_left=s_left,
        entropy_right=s_right,
        entropy_total=s_total,
        mutual_information=qmi,
        positivity_excess=positivity_excess(two_point),
        spectral_gap=gap,
    )
