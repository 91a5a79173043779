"""From a quadratic model to the diagonalized Liouvillean.

Pipeline:

    H  --eigh-->  (eps_m, u_m)          Hamiltonian eigensystem
    couplings + baths  -->  z_nu        bath vectors
    M = sum_nu x_nu (x) z_nu            bath matrix
    (H, M)  -->  (A, A0)                4n x 4n structure matrix
    A  --eig-->  (beta_j, V)            normal master modes, V V^T = J

The eigenvector matrix V is row-based: row 2j-1 (1-based) is the
eigenvector of A with rapidity +beta_j, row 2j the one with -beta_j, and
V is normalized so that V V^T equals J = diag(sx, sx, ...).  Everything
downstream (steady state, spectrum, relaxation) reads off (beta, V).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .model import QuadraticModel

__all__ = [
    "HamiltonianEigensystem",
    "StructureMatrix",
    "NormalModes",
    "NonDiagonalizableError",
    "ZeroRapidityWarning",
    "hamiltonian_eigensystem",
    "bath_vector",
    "bath_vectors",
    "bath_matrix",
    "bath_matrix_from_jumps",
    "assemble_structure_matrix",
    "structure_matrix",
    "normal_modes",
    "spectral_gap",
    "liouvillean_eigenvalues",
    "full_liouvillean_spectrum",
    "even_weight_selectors",
    "symplectic_form",
]

ZERO_RAPIDITY_TOL = 1e-10
COND_LIMIT = 1e12


class NonDiagonalizableError(Exception):
    """Structure matrix is numerically defective (eigenbasis ill-conditioned)."""


class ZeroRapidityWarning(UserWarning):
    """Some rapidity has (numerically) vanishing real part; the steady
    state may be non-unique and the +/- pairing is arbitrary there."""


@dataclass(frozen=True)
class HamiltonianEigensystem:
    """Eigen-decomposition of the antisymmetric imaginary matrix H.

    ``epsilons`` are the n nonnegative eigenvalues, ascending; row m of
    ``modes`` is the eigenvector u_m with H u_m = eps_m u_m.  The
    conjugate rows are the -eps_m eigenvectors, and normalization follows
    the bilinear convention u_l . u_m = 0, u_l . u_m* = delta_lm.
    """

    epsilons: np.ndarray
    modes: np.ndarray


@dataclass(frozen=True)
class StructureMatrix:
    """Antisymmetric 4n x 4n matrix A and scalar A0 of the quadratic
    Liouvillean  L+ = a . A a - A0."""

    A: np.ndarray
    A0: complex

    @property
    def n(self) -> int:
        return self.A.shape[0] // 4


@dataclass(frozen=True)
class NormalModes:
    """Rapidities beta_j (Re >= 0) and the row-eigenvector matrix V."""

    rapidities: np.ndarray  # (2n,)
    V: np.ndarray  # (4n, 4n)

    @property
    def n(self) -> int:
        return len(self.rapidities) // 2


def symplectic_form(two_n: int) -> np.ndarray:
    """J = diag(sx, sx, ...) of size 2*two_n, pairing rows (2j-1, 2j)."""
    J = np.zeros((2 * two_n, 2 * two_n))
    idx = np.arange(two_n)
    J[2 * idx, 2 * idx + 1] = 1.0
    J[2 * idx + 1, 2 * idx] = 1.0
    return J


def hamiltonian_eigensystem(H: np.ndarray) -> HamiltonianEigensystem:
    """Paired eigensystem of a purely imaginary antisymmetric H.

    Such a matrix is Hermitian, so its spectrum is real and comes in
    pairs (eps_m, -eps_m) with eigenvectors (u_m, u_m*).  Returns the
    nonnegative half, ascending, with the bilinear normalization
    u_l . u_m = 0 and u_l . u_m* = delta_lm.

    Worked on the real Schur form of the real antisymmetric -iH: the
    orthogonal 2x2-block canonical form provides exactly paired vectors
    even for degenerate, exponentially split (boundary-mode) or zero
    eigenvalues, where a plain Hermitian eigensolver would mix the
    (u, u*) partners.
    """
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, np.abs(H).max())
    if np.abs(H + H.T).max() > 1e-12 * scale:
        raise ValueError("H must be antisymmetric")
    if np.abs(H - H.conj().T).max() > 1e-12 * scale:
        raise ValueError("H must be Hermitian (purely imaginary antisymmetric)")
    two_n = H.shape[0]
    n = two_n // 2
    K = 0.5 * (H.imag - H.imag.T)  # -iH, exactly real antisymmetric
    T, Q = sla.schur(K, output="real")
    # collect 2x2 antisymmetric blocks and (paired-up) 1x1 zero blocks
    cols_a, cols_b, eps_list = [], [], []
    singles = []
    i = 0
    while i < two_n:
        if i + 1 < two_n and abs(T[i + 1, i]) > 0.0:
            t = 0.5 * (T[i, i + 1] - T[i + 1, i])
            if t >= 0:
                cols_a.append(i)
                cols_b.append(i + 1)
                eps_list.append(t)
            else:
                cols_a.append(i + 1)
                cols_b.append(i)
                eps_list.append(-t)
            i += 2
        else:
            singles.append(i)
            i += 1
    if len(singles) % 2:
        raise ValueError("odd number of zero modes: H is not antisymmetric-paired")
    for a, b in zip(singles[0::2], singles[1::2]):
        cols_a.append(a)
        cols_b.append(b)
        eps_list.append(0.0)
    eps = np.array(eps_list)
    # K q_a = -eps q_b, K q_b = eps q_a  =>  H (q_a - i q_b)/sqrt2 = +eps (...)
    modes = (Q[:, cols_a].T - 1j * Q[:, cols_b].T) / np.sqrt(2.0)
    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    modes = modes[order]
    if len(eps) != n:
        raise ValueError("eigenvalues did not split into +/- pairs")
    return HamiltonianEigensystem(eps, modes)


def _ohmic_pair_weights(eps: np.ndarray, beta: float, lam: float):
    """pi * (Gamma(4 eps), Gamma(-4 eps)) evaluated overflow-safely.

    Gamma(-w) = e^{beta w} Gamma(w); the product with the Boltzmann
    factor is combined analytically: Gamma(-4e) = lam^2 4e / (1 - e^{-4 e beta}).
    Both weights tend to lam^2/beta at eps = 0.
    """
    w = 4.0 * eps
    lo = np.empty_like(w)
    hi = np.empty_like(w)
    z = w == 0
    nz = ~z
    lo[z] = lam**2 / beta
    hi[z] = lam**2 / beta
    ew = np.exp(-beta * w[nz])
    denom = -np.expm1(-beta * w[nz])
    lo[nz] = lam**2 * w[nz] * ew / denom
    hi[nz] = lam**2 * w[nz] / denom
    return np.pi * lo, np.pi * hi


def bath_vector(
    x: np.ndarray, beta: float, lam: float, eigensystem: HamiltonianEigensystem
) -> np.ndarray:
    """Bath vector of one coupling against an Ohmic bath,

        z = pi sum_m [ G(4 eps_m) (x . u_m*) u_m + G(-4 eps_m) (x . u_m) u_m* ].

    The bath spectral function is sampled exactly at the Bohr
    frequencies 4 eps_m; no broadening or frequency cutoff enters.
    """
    if beta <= 0:
        raise ValueError(f"inverse temperature must be positive, got {beta}")
    eps, modes = eigensystem.epsilons, eigensystem.modes
    w_lo, w_hi = _ohmic_pair_weights(eps, beta, lam)
    proj_conj = modes.conj() @ x  # (x . u_m*)
    proj = modes @ x  # (x . u_m)
    return (w_lo * proj_conj) @ modes + (w_hi * proj) @ modes.conj()


def bath_vectors(model: QuadraticModel, eigensystem: HamiltonianEigensystem):
    """One bath vector per coupling (Redfield problems only)."""
    if model.is_lindblad:
        raise ValueError("bath vectors are a Redfield concept; model is Lindblad")
    out = []
    for c in model.couplings:
        spec = model.bath[c.bath_id]
        out.append(bath_vector(c.x, spec.beta, spec.lam, eigensystem))
    return out


def bath_matrix(model: QuadraticModel, eigensystem=None, z_vectors=None) -> np.ndarray:
    """Bath matrix M.

    Redfield: M = sum_nu x_nu (x) z_nu with the bath vectors computed
    from ``eigensystem`` (or passed explicitly).  Lindblad:
    M = sum_{nu,mu} gamma[nu,mu] x_nu (x) x_mu, which is Hermitian.
    """
    two_n = model.H.shape[0]
    M = np.zeros((two_n, two_n), dtype=complex)
    if model.is_lindblad:
        gamma = model.bath.gamma
        xs = np.array([c.x for c in model.couplings])
        M = np.einsum("nm,nj,mk->jk", gamma, xs, xs)
        return M
    if z_vectors is None:
        if eigensystem is None:
            eigensystem = hamiltonian_eigensystem(model.H)
        z_vectors = bath_vectors(model, eigensystem)
    for c, z in zip(model.couplings, z_vectors):
        M += np.outer(c.x, z)
    return M


def bath_matrix_from_jumps(jump_vectors) -> np.ndarray:
    """Bath matrix of a Lindblad problem given directly by jump operators
    L_mu = l_mu . w:  M_jk = sum_mu conj(l_mu)_j (l_mu)_k."""
    ls = np.atleast_2d(np.asarray(jump_vectors, dtype=complex))
    return np.einsum("mj,mk->jk", ls.conj(), ls)


def assemble_structure_matrix(H: np.ndarray, M: np.ndarray) -> StructureMatrix:
    """Interleave H and M into the 4n x 4n structure matrix.

    With odd structure indices 2j-1 paired to the real adjoint Majorana
    of mode j and even ones to the imaginary part:

        A[odd, odd]   = -2i H - M + M^T
        A[odd, even]  =  i (M^T + conj(M))
        A[even, odd]  = -i (M + conj(M)^T)
        A[even, even] = -2i H - conj(M) + conj(M)^T
        A0 = tr M + tr conj(M)
    """
    H = np.asarray(H, dtype=complex)
    M = np.asarray(M, dtype=complex)
    two_n = H.shape[0]
    if M.shape != (two_n, two_n):
        raise ValueError("H and M dimensions disagree")
    A = np.zeros((2 * two_n, 2 * two_n), dtype=complex)
    Mc = M.conj()
    A[0::2, 0::2] = -2j * H - M + M.T
    A[0::2, 1::2] = 1j * (M.T + Mc)
    A[1::2, 0::2] = -1j * (M + Mc.T)
    A[1::2, 1::2] = -2j * H - Mc + Mc.T
    A0 = np.trace(M) + np.trace(Mc)
    scale = max(1.0, np.abs(A).max())
    if np.abs(A + A.T).max() > 1e-12 * scale:
        raise AssertionError("assembled structure matrix is not antisymmetric")
    return StructureMatrix(A, complex(A0))


def structure_matrix(model: QuadraticModel) -> StructureMatrix:
    """Convenience: model -> (A, A0) in one call."""
    if model.is_lindblad:
        M = bath_matrix(model)
    else:
        eig = hamiltonian_eigensystem(model.H)
        M = bath_matrix(model, eigensystem=eig)
    return assemble_structure_matrix(model.H, M)


def _pair_eigenvalues(evals: np.ndarray, zero_tol: float):
    """Greedy (+beta, -beta) pairing, nearest -lambda match, largest first."""
    order = np.argsort(-np.abs(evals), kind="stable")
    unused = list(order)
    pairs = []
    while unused:
        i = unused.pop(0)
        target = -evals[i]
        jbest = min(unused, key=lambda j: abs(evals[j] - target))
        unused.remove(jbest)
        a, b = evals[i], evals[jbest]
        if abs(a.real) <= zero_tol and abs(b.real) <= zero_tol:
            plus, minus = (i, jbest) if a.imag >= b.imag else (jbest, i)
        else:
            plus, minus = (i, jbest) if a.real >= b.real else (jbest, i)
        pairs.append((plus, minus))
    return pairs


def _hyperbolic_basis(rows: np.ndarray) -> np.ndarray:
    """Rework ``rows`` (2d vectors spanning one eigenspace) into hyperbolic
    pairs (p_1, q_1, ..., p_d, q_d) with p_i . q_j = delta_ij and all other
    bilinear products zero.  Complex Gram-Schmidt on the symmetric form."""
    remaining = [r.copy() for r in rows]
    out = []
    while remaining:
        u = remaining.pop(0)
        if abs(u @ u) > 1e-14 * (np.abs(u) ** 2).sum():
            # make u isotropic by mixing in another basis vector
            for v in remaining:
                disc = (u @ v) ** 2 - (u @ u) * (v @ v)
                alpha_den = v @ v
                if abs(alpha_den) > 1e-300:
                    alpha = (-(u @ v) + np.sqrt(disc)) / alpha_den
                else:
                    if abs(u @ v) < 1e-300:
                        continue
                    alpha = -(u @ u) / (2 * (u @ v))
                u = u + alpha * v
                break
        # partner with maximal pairing
        scores = [abs(u @ v) for v in remaining]
        if not remaining or max(scores) < 1e-300:
            raise NonDiagonalizableError("degenerate cluster has no symplectic partner")
        w = remaining.pop(int(np.argmax(scores)))
        w = w / (u @ w)
        w = w - 0.5 * (w @ w) * u
        remaining = [v - (v @ w) * u - (v @ u) * w for v in remaining]
        out.extend([u, w])
    return np.array(out)


def normal_modes(struct: StructureMatrix | np.ndarray) -> NormalModes:
    """Diagonalize the structure matrix into normal master modes.

    Eigenvalues are paired into (beta_j, -beta_j) with Re beta_j >= 0 and
    the eigenvector rows are rescaled (within rapidity-degenerate
    clusters: re-mixed through a small linear solve) so that V V^T = J.
    Raises NonDiagonalizableError when the eigenvector matrix condition
    number exceeds 1e12; warns ZeroRapidityWarning when min Re beta falls
    below 1e-10.
    """
    A = struct.A if isinstance(struct, StructureMatrix) else np.asarray(struct)
    four_n = A.shape[0]
    two_n = four_n // 2
    evals, evecs = np.linalg.eig(A)
    if np.linalg.cond(evecs) > COND_LIMIT:
        raise NonDiagonalizableError(
            "eigenvector matrix condition number exceeds 1e12; structure matrix "
            "is numerically defective"
        )
    scale = max(np.abs(evals).max(), 1e-300)
    zero_tol = ZERO_RAPIDITY_TOL * max(1.0, scale)
    pairs = _pair_eigenvalues(evals, zero_tol)
    betas = np.array([0.5 * (evals[p] - evals[m]) for p, m in pairs])
    if betas.real.min() < ZERO_RAPIDITY_TOL:
        warnings.warn(
            "rapidity with vanishing real part: steady state may be non-unique",
            ZeroRapidityWarning,
            stacklevel=2,
        )
    V = np.empty((four_n, four_n), dtype=complex)
    for j, (p, m) in enumerate(pairs):
        V[2 * j] = evecs[:, p]
        V[2 * j + 1] = evecs[:, m]

    # cluster rapidities; within a cluster enforce V V^T = J by solving
    # plus . minus' = identity on the cluster block
    cluster_tol = 1e-8 * max(np.abs(betas).max(), 1e-300)
    order = np.argsort(betas.real + 1e-9 * np.abs(betas.imag), kind="stable")
    assigned = np.full(two_n, -1, dtype=int)
    n_clusters = 0
    for j in order:
        placed = False
        for c in range(n_clusters):
            rep = np.flatnonzero(assigned == c)[0]
            if abs(betas[j] - betas[rep]) <= cluster_tol:
                assigned[j] = c
                placed = True
                break
        if not placed:
            assigned[j] = n_clusters
            n_clusters += 1
    for c in range(n_clusters):
        members = np.flatnonzero(assigned == c)
        rows_plus = V[2 * members]
        rows_minus = V[2 * members + 1]
        if abs(betas[members[0]]) <= zero_tol:
            # exact zero cluster: +/- eigenspaces coincide, build hyperbolic
            # pairs from scratch
            basis = np.vstack([rows_plus, rows_minus])
            hyp = _hyperbolic_basis(basis)
            V[2 * members] = hyp[0::2]
            V[2 * members + 1] = hyp[1::2]
            continue
        G = rows_plus @ rows_minus.T
        try:
            X = np.linalg.solve(G.T, np.eye(len(members)))
        except np.linalg.LinAlgError as exc:
            raise NonDiagonalizableError(
                "singular pairing within a degenerate rapidity cluster"
            ) from exc
        V[2 * members + 1] = X @ rows_minus
    return NormalModes(betas, V)


def spectral_gap(modes: NormalModes) -> float:
    """Relaxation rate Delta = 2 min_j Re beta_j (>= 0)."""
    return float(max(2.0 * modes.rapidities.real.min(), 0.0))


def even_weight_selectors(n: int) -> np.ndarray:
    """All binary selectors nu in {0,1}^(2n) with even weight (n <= 4)."""
    if n > 4:
        raise ValueError("full enumeration of selectors is limited to n <= 4")
    two_n = 2 * n
    sel = ((np.arange(4**n)[:, None] >> np.arange(two_n)) & 1).astype(np.int64)
    return sel[sel.sum(axis=1) % 2 == 0]


def liouvillean_eigenvalues(modes: NormalModes, selectors) -> np.ndarray:
    """Liouvillean eigenvalues -2 nu . beta for each binary selector nu."""
    sel = np.atleast_2d(np.asarray(selectors))
    two_n = len(modes.rapidities)
    if sel.shape[1] != two_n:
        raise ValueError(f"selectors must have length {two_n}")
    if not np.isin(sel, (0, 1)).all():
        raise ValueError("selectors must be binary")
    return -2.0 * (sel @ modes.rapidities)


def full_liouvillean_spectrum(modes: NormalModes) -> np.ndarray:
    """All 4^n eigenvalues -2 nu . beta, nu in {0,1}^(2n).

    Refused for n > 8: the enumeration grows as 4^n.
    """
    n = modes.n
    if n > 8:
        raise ValueError("full spectrum enumeration refused for n > 8")
    two_n = 2 * n
    sel = ((np.arange(4**n)[:, None] >> np.arange(two_n)) & 1).astype(np.int64)
    return -2.0 * (sel @ modes.rapidities)
