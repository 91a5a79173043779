import math
import warnings

import numpy as np
import pytest

from conftest import random_antisymmetric
from openquad import model as mdl
from openquad import spectra as sp


def test_eigensystem_n1():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(1, 0.0, 1.0))
    eig = sp.hamiltonian_eigensystem(H)
    assert eig.epsilons == pytest.approx([0.5])


def test_eigensystem_pairing_and_normalization():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(6, 0.7, 0.4))
    eig = sp.hamiltonian_eigensystem(H)
    n = 6
    assert np.all(np.diff(eig.epsilons) >= 0)
    for m in range(n):
        u = eig.modes[m]
        assert np.linalg.norm(H @ u - eig.epsilons[m] * u) < 1e-11
        assert np.linalg.norm(H @ u.conj() + eig.epsilons[m] * u.conj()) < 1e-11
    G = eig.modes @ eig.modes.T
    D = eig.modes @ eig.modes.conj().T
    assert np.abs(G).max() < 1e-11
    assert np.abs(D - np.eye(n)).max() < 1e-11
    # multiset {+-eps} equals the eigenvalue multiset of H
    full = np.sort(np.concatenate([eig.epsilons, -eig.epsilons]))
    assert np.abs(full - np.sort(np.linalg.eigvalsh(H).real)).max() < 1e-11


def test_eigensystem_handles_boundary_zero_modes():
    # deep topological phase: edge epsilon is exponentially split and a
    # Hermitian eigensolver would mix the (u, u*) partners
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(40, 0.5, 0.2))
    eig = sp.hamiltonian_eigensystem(H)
    G = eig.modes @ eig.modes.T
    D = eig.modes @ eig.modes.conj().T
    assert np.abs(G).max() < 1e-11
    assert np.abs(D - np.eye(40)).max() < 1e-11


def test_eigensystem_rejects_malformed():
    with pytest.raises(ValueError):
        sp.hamiltonian_eigensystem(np.eye(4))
    bad = 1j * np.ones((4, 4))
    with pytest.raises(ValueError):
        sp.hamiltonian_eigensystem(bad)


def test_eigensystem_periodic_matches_half_dispersion():
    # with periodic bonds the positive eigenvalues are omega(2 pi j / n) / 2
    n = 12
    params = mdl.ChainParams(n, 0.4, 0.7)
    H = mdl.build_xy_hamiltonian(params).copy()
    for (a, b, c) in (
        (2 * n - 1, 0, -1j * (1 + params.gamma) / 2),
        (2 * n - 2, 1, 1j * (1 - params.gamma) / 2),
    ):
        H[a, b] += c / 2
        H[b, a] -= c / 2
    eig = sp.hamiltonian_eigensystem(H)
    om = np.sort(mdl.dispersion(2 * np.pi * np.arange(n) / n, params))
    assert np.abs(np.sort(eig.epsilons) - om / 2.0).max() < 1e-12


def test_bath_vector_zero_coupling():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(2, 0.5, 0.9))
    eig = sp.hamiltonian_eigensystem(H)
    z = sp.bath_vector(np.array([1.0, 0, 0, 0]), 1.0, 0.0, eig)
    assert np.abs(z).max() == 0.0
    with pytest.raises(ValueError):
        sp.bath_vector(np.array([1.0, 0, 0, 0]), -1.0, 0.1, eig)


def test_bath_vector_quadrature_oracle():
    """Independent check of the bath vector: the closed-form correlation
    function -lam^2 (pi/beta)^2 / sinh^2(pi t / beta) (inverse Fourier
    transform of the Ohmic spectral function) is integrated against the
    Heisenberg propagator along the shifted contour Im t = -beta/2, where
    the integrand is smooth and exponentially decaying."""
    from numpy.polynomial.legendre import leggauss

    params = mdl.ChainParams(1, 0.0, 0.8)
    H = mdl.build_xy_hamiltonian(params)
    eig = sp.hamiltonian_eigensystem(H)
    x = np.array([1.0, 0.0], dtype=complex)
    beta, lam = 1.3, 0.2
    z = sp.bath_vector(x, beta, lam, eig)

    xs_, ws_ = leggauss(400)
    smax = 8.0 * beta
    s = smax * xs_
    w = smax * ws_
    gamma_mid = lam**2 * (np.pi / beta) ** 2 / np.cosh(np.pi * s / beta) ** 2
    zq = np.zeros(2, dtype=complex)
    for m, eps in enumerate(eig.epsilons):
        e4 = 4.0 * eps
        phase_minus = np.exp(1j * e4 * s + e4 * beta / 2)
        phase_plus = np.exp(-1j * e4 * s - e4 * beta / 2)
        proj = eig.modes[m] @ x
        proj_c = eig.modes[m].conj() @ x
        zq += 0.5 * np.sum(w * gamma_mid * phase_minus) * proj * eig.modes[m].conj()
        zq += 0.5 * np.sum(w * gamma_mid * phase_plus) * proj_c * eig.modes[m]
    assert np.abs(z - zq).max() < 1e-6


def test_bath_vector_degenerate_remix_invariance():
    # two identical uncoupled sites: eps_1 = eps_2; z must not depend on
    # which orthonormal basis of the degenerate pair was picked
    H = np.zeros((4, 4), dtype=complex)
    for j in (0, 1):
        H[2 * j, 2 * j + 1] = -0.5j
        H[2 * j + 1, 2 * j] = 0.5j
    eig = sp.hamiltonian_eigensystem(H)
    assert eig.epsilons == pytest.approx([0.5, 0.5])
    x = np.array([1.0, 0.0, 1.0, 0.0], dtype=complex)
    z = sp.bath_vector(x, 0.9, 0.3, eig)
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    mixed = sp.HamiltonianEigensystem(eig.epsilons, q @ eig.modes)
    z2 = sp.bath_vector(x, 0.9, 0.3, mixed)
    assert np.abs(z - z2).max() < 1e-12


def test_bath_matrix_outer_product_structure():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(2, 0.5, 0.9))
    x = np.array([1.0, 0, 0, 0], dtype=complex)
    z = np.array([0.3, 0.4j, 0, 0])
    model = mdl.QuadraticModel(
        H,
        (mdl.CouplingOperator(x, "L"),),
        {"L": mdl.RedfieldOhmic(1.0, 0.1)},
    )
    M = sp.bath_matrix(model, z_vectors=[z])
    assert np.allclose(M[0], z)
    assert np.abs(M[1:]).max() == 0.0


def test_lindblad_two_parametrizations_agree(lindblad_n2):
    M_rates = sp.bath_matrix(lindblad_n2)
    M_jumps = sp.bath_matrix_from_jumps(mdl.lindblad_jump_vectors(2))
    assert np.abs(M_rates - M_jumps).max() < 1e-12
    assert np.abs(M_rates - M_rates.conj().T).max() < 1e-12


def test_delta_correlated_bath_reduces_to_lindblad():
    """Gamma(t) -> gamma delta(t+0) turns the bath-vector integral into
    z_nu = sum_mu gamma[nu,mu] x_mu exactly, reproducing the Lindblad
    bath matrix; verified also as the narrow-kernel limit."""
    params = mdl.ChainParams(2, 0.5, 0.9)
    H = mdl.build_xy_hamiltonian(params)
    eig = sp.hamiltonian_eigensystem(H)
    xs = np.array([c.x for c in mdl.build_xy_couplings((1, 1, 1, 1), (0, np.pi / 2, 0, np.pi / 2), 2)])
    gamma = np.array(
        [[0.2, 0.05j, 0, 0], [-0.05j, 0.3, 0, 0], [0, 0, 0.25, 0], [0, 0, 0, 0.15]]
    )
    z_delta = gamma @ xs  # the one-sided delta integrates to full weight
    M_red = np.einsum("nj,nk->jk", xs, z_delta)
    M_lind = np.einsum("nm,nj,mk->jk", gamma, xs, xs)
    assert np.abs(M_red - M_lind).max() < 1e-12

    # narrow one-sided kernel converges to the same z (first order in width,
    # removed by Richardson extrapolation)
    def z_width(w):
        # integral_0^inf of a one-sided kernel of width w against f(-tau),
        # with f(-tau) in its spectral form for the first coupling
        taus = np.linspace(0, 12 * w, 4001)
        kern = (2.0 / (w * math.sqrt(math.pi))) * np.exp(-((taus / w) ** 2))
        f0 = np.zeros((len(taus), 2 * params.n), dtype=complex)
        for m, eps in enumerate(eig.epsilons):
            u = eig.modes[m]
            f0 += np.exp(4j * eps * taus)[:, None] * ((xs[0] @ u) * u.conj())[None, :]
            f0 += np.exp(-4j * eps * taus)[:, None] * ((xs[0] @ u.conj()) * u)[None, :]
        return np.trapezoid(kern[:, None] * f0, taus, axis=0)

    target = xs[0].astype(complex)
    z1 = z_width(1e-3)
    z2 = z_width(5e-4)
    extrap = 2 * z2 - z1
    assert np.abs(extrap - target).max() < 1e-5


def test_structure_matrix_free_case():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(3, 0.5, 0.9))
    st = sp.assemble_structure_matrix(H, np.zeros((6, 6), dtype=complex))
    assert st.A0 == 0
    assert np.abs(st.A[0::2, 0::2] + 2j * H).max() < 1e-15
    assert np.abs(st.A[1::2, 1::2] + 2j * H).max() < 1e-15
    assert np.abs(st.A[0::2, 1::2]).max() == 0.0


def test_structure_matrix_block_tridiagonal_form():
    # free part is block tridiagonal with the printed 4x4 blocks
    g, h = 0.7, 0.4
    params = mdl.ChainParams(5, g, h)
    A = sp.assemble_structure_matrix(
        mdl.build_xy_hamiltonian(params), np.zeros((10, 10), dtype=complex)
    ).A
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    a_blk = -1j * h * np.kron(sy, np.eye(2))
    b_blk = 0.5 * np.kron(1j * sy - g * sx, np.eye(2))
    for m in range(5):
        assert np.abs(A[4 * m : 4 * m + 4, 4 * m : 4 * m + 4] - a_blk).max() < 1e-14
    for m in range(4):
        blk = A[4 * m : 4 * m + 4, 4 * m + 4 : 4 * m + 8]
        assert np.abs(blk - b_blk).max() < 1e-14
        blk_c = A[4 * m + 4 : 4 * m + 8, 4 * m : 4 * m + 4]
        assert np.abs(blk_c + b_blk.T).max() < 1e-14


def test_structure_matrix_properties(redfield_n3):
    st = sp.structure_matrix(redfield_n3)
    assert np.abs(st.A + st.A.T).max() < 1e-12
    M = sp.bath_matrix(redfield_n3)
    assert st.A0 == pytest.approx(np.trace(M) + np.trace(M.conj()))
    assert abs(complex(st.A0).imag) < 1e-12


def test_border_blocks_decay_exponentially():
    # bath-dressed border blocks l_j decay with the distance from the edge
    model = mdl.xy_redfield_model(mdl.ChainParams(40, 0.5, 0.9))
    M = sp.bath_matrix(model)
    A = sp.assemble_structure_matrix(model.H, M).A
    A_free = sp.assemble_structure_matrix(model.H, np.zeros_like(M)).A
    B = A - A_free
    norms = np.array(
        [np.linalg.norm(B[0:4, 4 * j : 4 * j + 4]) for j in range(40)]
    )
    # monotone decay after a short burn-in, down to the noise floor
    tail = norms[2:12]
    assert np.all(np.diff(np.log(tail)) < 0)
    assert tail[-1] < 1e-6 * tail[0]


def test_normal_modes_reconstruction(redfield_n2):
    st = sp.structure_matrix(redfield_n2)
    modes = sp.normal_modes(st)
    n = 2
    J = sp.symplectic_form(2 * n)
    assert np.abs(modes.V @ modes.V.T - J).max() < 1e-9
    D = np.zeros((4 * n, 4 * n), dtype=complex)
    for j, b in enumerate(modes.rapidities):
        D[2 * j, 2 * j] = b
        D[2 * j + 1, 2 * j + 1] = -b
    recon = modes.V.T @ D @ J @ modes.V
    assert np.abs(recon - st.A).max() < 1e-9 * max(1.0, np.abs(st.A).max())
    assert np.all(modes.rapidities.real > 0)


def test_normal_modes_recovers_synthetic_rapidities():
    rng = np.random.default_rng(11)
    base = sp.normal_modes(random_antisymmetric(rng, 8))
    V = base.V
    J = sp.symplectic_form(4)
    target = np.array([2.0 + 1.0j, 1.5, 0.9 - 0.3j, 0.4 + 0.2j])
    D = np.zeros((8, 8), dtype=complex)
    for j, b in enumerate(target):
        D[2 * j, 2 * j] = b
        D[2 * j + 1, 2 * j + 1] = -b
    A = V.T @ D @ J @ V
    got = sp.normal_modes(A)
    assert np.abs(np.sort_complex(got.rapidities) - np.sort_complex(target)).max() < 1e-9


def test_normal_modes_scaling_linearity():
    rng = np.random.default_rng(5)
    A = random_antisymmetric(rng, 8)
    m1 = sp.normal_modes(A)
    m2 = sp.normal_modes(2.5 * A)
    assert (
        np.abs(np.sort_complex(m2.rapidities) - np.sort_complex(2.5 * m1.rapidities)).max()
        < 1e-9
    )


def test_normal_modes_degenerate_cluster():
    # two decoupled identical dissipative blocks produce exactly degenerate
    # rapidities; the J-normalization must still come out
    rng = np.random.default_rng(2)
    blk = random_antisymmetric(rng, 4)
    A = np.zeros((8, 8), dtype=complex)
    A[:4, :4] = blk
    A[4:, 4:] = blk
    modes = sp.normal_modes(A)
    J = sp.symplectic_form(4)
    assert np.abs(modes.V @ modes.V.T - J).max() < 1e-9


def test_normal_modes_zero_rapidity_warns():
    H = mdl.build_xy_hamiltonian(mdl.ChainParams(2, 0.5, 0.9))
    st = sp.assemble_structure_matrix(H, np.zeros((4, 4), dtype=complex))
    with pytest.warns(sp.ZeroRapidityWarning):
        modes = sp.normal_modes(st)
    assert sp.spectral_gap(modes) == 0.0
    # the unitary case still satisfies the J-normalization
    J = sp.symplectic_form(4)
    assert np.abs(modes.V @ modes.V.T - J).max() < 1e-9


def test_spectral_gap_definition():
    modes = sp.NormalModes(np.array([1 + 1j, 0.3, 2.0]), np.eye(12))
    assert sp.spectral_gap(modes) == pytest.approx(0.6)


def test_liouvillean_eigenvalues_and_selectors(redfield_n2):
    modes = sp.normal_modes(sp.structure_matrix(redfield_n2))
    beta = modes.rapidities
    assert sp.liouvillean_eigenvalues(modes, np.zeros((1, 4), dtype=int))[0] == 0
    sel = np.array([[1, 1, 0, 0]])
    assert sp.liouvillean_eigenvalues(modes, sel)[0] == pytest.approx(
        -2 * (beta[0] + beta[1])
    )
    sels = sp.even_weight_selectors(2)
    assert len(sels) == 8
    assert (sels.sum(axis=1) % 2 == 0).all()
    with pytest.raises(ValueError):
        sp.even_weight_selectors(5)
    big = sp.NormalModes(np.ones(18, dtype=complex), np.eye(36))
    with pytest.raises(ValueError):
        sp.full_liouvillean_spectrum(big)


def test_nondiagonalizable_rejected():
    # nilpotent antisymmetric matrix (A^2 = 0, rank 2): genuinely defective
    B = np.array([[1.0, 1j], [1j, -1.0]])  # symmetric, B^2 = 0
    A = np.zeros((4, 4), dtype=complex)
    A[:2, 2:] = B
    A[2:, :2] = -B
    with pytest.raises(sp.NonDiagonalizableError):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            sp.normal_modes(A)
