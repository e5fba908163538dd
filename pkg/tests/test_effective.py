import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from dispersive_jcm.effective import (
    BranchHamiltonian,
    branch_params,
    branch_reduce,
    build_heff,
    hopping_pattern,
    normal_modes,
    rotation_angle,
    rotation_operator,
    theta_sweep,
    verify_diagonal,
)
from dispersive_jcm.errors import DomainError, ResonanceError
from dispersive_jcm.hilbert import atomic_ops, ladder_a, ladder_b, make_space, number_a, number_b
from dispersive_jcm.model import ModelParams, build_h0, derive
from dispersive_jcm.schrieffer_wolff import exchange_residual

from conftest import baseline


def test_heff_structure(params, space):
    h = build_heff(params, space)
    assert exchange_residual(h, space) == 0
    assert np.max(np.abs(h - h.conj().T)) == 0
    _, _, atom = space.labels()
    assert not h[np.ix_(atom == 1, atom == 0)].any()
    d = derive(params)
    assert h[space.index(1, 0, "plus"), space.index(0, 1, "plus")] == pytest.approx(d.j_coupling * 0.5, rel=1e-15)


def test_heff_single_mode_limit(space):
    p = baseline(g_b=0.0)
    sz, _, _ = atomic_ops(space, "half")
    expected = build_h0(p, space) + derive(p).chi_a * number_a(space) @ sz
    np.testing.assert_allclose(build_heff(p, space), expected, atol=1e-15)


def test_heff_resonance():
    with pytest.raises(ResonanceError):
        build_heff(baseline(Omega0=1.0))


def test_branch_reduce_examples(params):
    d = derive(params)
    plus, minus = branch_reduce(params, 1), branch_reduce(params, -1)
    assert plus.omega_a_tilde == params.omega_a + 0.5 * d.chi_a
    assert minus.omega_a_tilde - params.omega_a == pytest.approx(-(plus.omega_a_tilde - params.omega_a), abs=1e-15)
    assert minus.omega_b_tilde - params.omega_b == pytest.approx(-(plus.omega_b_tilde - params.omega_b), abs=1e-15)
    assert minus.j_eff == -plus.j_eff == -0.5 * d.j_coupling
    assert plus.detuning == pytest.approx((params.omega_a - params.omega_b) + 0.5 * (d.chi_a - d.chi_b), abs=1e-15)
    unit = branch_reduce(baseline(convention="unit"), 1)
    assert unit.j_eff == d.j_coupling
    with pytest.raises(DomainError):
        branch_reduce(params, 0)


def test_rotation_angle_examples():
    assert rotation_angle(BranchHamiltonian(1, 2.0, 1.0, 0.0)) == 0.0
    assert rotation_angle(BranchHamiltonian(1, 1.0, 2.0, 0.0)) == 0.0
    assert rotation_angle(BranchHamiltonian(1, 1.5, 1.5, 0.1)) == pytest.approx(math.pi / 4, abs=0)
    assert rotation_angle(BranchHamiltonian(1, 1.5, 1.5, -0.1)) == pytest.approx(-math.pi / 4, abs=0)
    assert rotation_angle(BranchHamiltonian(1, 1.5, 1.5, 0.0)) == 0.0


def _eig_oracle(br):
    w, v = np.linalg.eigh(br.matrix())
    return w, v


branch_st = st.builds(
    BranchHamiltonian,
    st.just(1),
    st.floats(0.1, 5.0),
    st.floats(0.1, 5.0),
    st.floats(-1.0, 1.0),
)


@settings(max_examples=100)
@given(branch_st)
def test_geometry_matches_two_by_two_eigensolver(br):
    w, v = _eig_oracle(br)
    hi, lo = normal_modes(br)
    assert hi >= lo
    assert hi == pytest.approx(w[1], abs=1e-12)
    assert lo == pytest.approx(w[0], abs=1e-12)
    theta = rotation_angle(br)
    u = np.array([math.cos(theta), math.sin(theta)])
    # (cos, sin) must be an eigenvector of the 2x2 form with one of the solver's eigenvalues
    m = br.matrix()
    lam = u @ m @ u
    assert np.min(np.abs(w - lam)) < 1e-12
    assert np.linalg.norm(m @ u - lam * u) < 1e-12
    if w[1] - w[0] > 1e-6:
        assert max(np.abs(v.T @ u)) == pytest.approx(1.0, abs=1e-12)
    # tan(2 theta) * detuning = 2 j, written without the pole at 2 theta = pi/2
    assert math.sin(2 * theta) * br.detuning == pytest.approx(2 * br.j_eff * math.cos(2 * theta), abs=1e-12)
    assert hi + lo == pytest.approx(br.omega_a_tilde + br.omega_b_tilde, abs=1e-12)
    assert hi * lo == pytest.approx(br.omega_a_tilde * br.omega_b_tilde - br.j_eff ** 2, abs=1e-12)
    assert -math.pi / 4 <= theta <= math.pi / 4


@given(branch_st)
def test_rotation_angle_is_odd_in_coupling(br):
    if br.detuning == 0:
        return
    flipped = BranchHamiltonian(br.s, br.omega_a_tilde, br.omega_b_tilde, -br.j_eff)
    assert rotation_angle(flipped) == -rotation_angle(br)


def test_normal_modes_examples():
    assert normal_modes(BranchHamiltonian(1, 1.0, 2.0, 0.0)) == (2.0, 1.0)
    hi, lo = normal_modes(BranchHamiltonian(1, 1.5, 1.5, -0.2))
    assert (hi, lo) == pytest.approx((1.7, 1.3), abs=1e-15)


def test_mode_frequencies_follow_rotated_modes(params):
    for s in (1, -1):
        bp = branch_params(params, s)
        br = branch_reduce(params, s)
        u = np.array([math.cos(bp.theta), math.sin(bp.theta)])
        wa = u @ br.matrix() @ u
        assert bp.mode_frequencies[0] == pytest.approx(wa, abs=1e-14)
        assert bp.tau_eff == pytest.approx(1 / (bp.omega_A - bp.omega_B))


def test_single_photon_block_is_branch_matrix(params, space):
    h = build_heff(params, space)
    for s, atom in ((1, "plus"), (-1, "minus")):
        idx = [space.index(1, 0, atom), space.index(0, 1, atom)]
        block = h[np.ix_(idx, idx)].real
        expected = branch_reduce(params, s).matrix() + s * 0.5 * params.Omega0 * np.eye(2)
        np.testing.assert_allclose(block, expected, atol=1e-15)


@pytest.mark.parametrize("theta", [0.0, 0.3, -1.1, math.pi / 4])
def test_rotation_operator(theta):
    sp = make_space(4, 4)
    r = rotation_operator(sp, theta)
    a, b = ladder_a(sp), ladder_b(sp)
    k = a.conj().T @ b
    oracle = scipy.linalg.expm(theta * (k - k.conj().T))
    np.testing.assert_allclose(r, oracle, atol=1e-11)
    np.testing.assert_allclose(r.conj().T @ r, np.eye(sp.dim), atol=1e-11)
    np.testing.assert_allclose(r @ rotation_operator(sp, -theta), np.eye(sp.dim), atol=1e-11)
    n = number_a(sp) + number_b(sp)
    assert np.max(np.abs(r @ n - n @ r)) < 1e-12
    safe = sp.complete_manifolds()
    for op, expected in ((a, a * math.cos(theta) + b * math.sin(theta)),
                         (b, b * math.cos(theta) - a * math.sin(theta))):
        conj = r.conj().T @ op @ r
        np.testing.assert_allclose(conj[:, safe], expected[:, safe], atol=1e-10)


def test_rotation_identity():
    sp = make_space(2, 3)
    np.testing.assert_allclose(rotation_operator(sp, 0.0), np.eye(sp.dim), atol=1e-15)


def test_verify_diagonal(params, space):
    for s in (1, -1):
        assert verify_diagonal(params, s, space) < 1e-10
    d = derive(params)
    _, _, atom = space.labels()
    sector = (atom == 1) & space.complete_manifolds()
    mask = hopping_pattern(space) & sector[:, None] & sector[None, :]
    hop = ladder_a(space).conj().T @ ladder_b(space)
    pattern_norm = np.linalg.norm((hop + hop.conj().T)[mask])
    assert verify_diagonal(params, 1, space, theta=0.0) == pytest.approx(0.5 * abs(d.j_coupling) * pattern_norm, rel=1e-12)
    assert verify_diagonal(baseline(g_b=0.0), 1, space, theta=0.0) == 0


def test_theta_sweep_degeneracy_crossing():
    p = baseline()
    rows = theta_sweep(p, "omega_b", np.linspace(0.9, 1.1, 21) + 0.005)
    flagged = [r for r in rows if r.asymptote_plus]
    assert len(flagged) == 2
    lo, hi = flagged
    assert lo.plus.detuning > 0 > hi.plus.detuning
    assert abs(lo.plus.theta) > 0.1 and abs(hi.plus.theta) > 0.1


def test_theta_sweep_uncoupled_and_generic():
    rows = theta_sweep(baseline(g_a=0.0, g_b=0.0), "omega_b", [0.5, 1.5, 2.5])
    assert all(r.plus.theta == r.minus.theta == 0 for r in rows)
    rows = theta_sweep(baseline(), "omega_b", [1.1, 1.2])
    assert all(r.plus.theta != r.minus.theta for r in rows)


def test_theta_sweep_resonant_row_is_not_fatal():
    rows = theta_sweep(baseline(), "omega_b", [4.5, 5.0, 5.5])
    assert [r.resonant for r in rows] == [False, True, False]


def test_theta_sweep_validation():
    with pytest.raises(DomainError):
        theta_sweep(baseline(), "cutoff_a", [1, 2])
    with pytest.raises(DomainError):
        theta_sweep(baseline(), "omega_b", [1.0, 1.0])
