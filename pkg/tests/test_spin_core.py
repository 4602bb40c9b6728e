import numpy as np
import pytest

from qlab import (
    SpinLength,
    SphereDirection,
    TwoSpinState,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    angle_between,
    cat_rotation,
    coherent_amplitudes,
    macro_entangled_state,
    rotation,
    singlet_state,
    spin_component,
    spin_x,
    spin_y,
    spin_z,
    wigner_small_d,
)

SPINS = [SpinLength(1), SpinLength(2), SpinLength(5), SpinLength(20)]


def test_spin_length_basics():
    s = SpinLength(3)
    assert s.two_s == 3
    assert s.s == 1.5
    assert s.dim == 4
    assert np.array_equal(s.m_values(), [-1.5, -0.5, 0.5, 1.5])
    assert str(s) == "3/2"
    assert str(SpinLength(4)) == "2"
    assert SpinLength.from_spin(2.5) == SpinLength(5)
    with pytest.raises(ValueError):
        SpinLength(-1)
    with pytest.raises(ValueError):
        SpinLength.from_spin(0.3)


def test_direction_validation():
    d = SphereDirection(1.0, 2 * np.pi + 0.5)
    assert np.isclose(d.phi, 0.5)
    with pytest.raises(ValueError):
        SphereDirection(-0.1, 0.0)
    with pytest.raises(ValueError):
        SphereDirection(np.pi + 0.1, 0.0)

    n = SphereDirection(0.7, 4.0).unit_vector()
    assert np.isclose(np.linalg.norm(n), 1.0)
    back = SphereDirection.from_vector(3.0 * n)
    assert np.isclose(back.theta, 0.7) and np.isclose(back.phi, 4.0)

    assert np.isclose(angle_between(Z_AXIS, X_AXIS), np.pi / 2)
    assert np.isclose(angle_between(X_AXIS, Y_AXIS), np.pi / 2)
    assert angle_between(Z_AXIS, Z_AXIS) == 0.0


def test_operator_algebra():
    for s in SPINS:
        sx, sy, sz = spin_x(s), spin_y(s), spin_z(s)
        eye = np.eye(s.dim)
        # su(2) commutators and the Casimir invariant
        assert np.allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-12)
        assert np.allclose(sy @ sz - sz @ sy, 1j * sx, atol=1e-12)
        assert np.allclose(sz @ sx - sx @ sz, 1j * sy, atol=1e-12)
        assert np.allclose(sx @ sx + sy @ sy + sz @ sz, s.s * (s.s + 1) * eye, atol=1e-11)

        n = SphereDirection(0.9, 2.3).unit_vector()
        sn = spin_component(s, SphereDirection(0.9, 2.3))
        assert np.allclose(sn, n[0] * sx + n[1] * sy + n[2] * sz)
        # eigenvalues of any component are the m ladder
        assert np.allclose(np.linalg.eigvalsh(sn), s.m_values(), atol=1e-12)


def test_wigner_d_special_points():
    for s in SPINS:
        d0 = wigner_small_d(s, 0.0)
        assert np.allclose(d0, np.eye(s.dim), atol=1e-14)
        # beta = pi maps |m> to +/-|-m>
        dpi = wigner_small_d(s, np.pi)
        expect = np.zeros((s.dim, s.dim))
        for c in range(s.dim):
            expect[s.dim - 1 - c, c] = (-1.0) ** (s.two_s - c)
        assert np.allclose(dpi, expect, atol=1e-14)


def test_wigner_d_orthogonality_and_composition():
    for s in SPINS:
        for beta in (0.3, 1.1, 2.8):
            d = wigner_small_d(s, beta)
            assert np.allclose(d @ d.T, np.eye(s.dim), atol=1e-12)
        a, b = 0.8, 1.7
        comp = wigner_small_d(s, a) @ wigner_small_d(s, b)
        assert np.allclose(comp, wigner_small_d(s, a + b), atol=1e-12)


def test_rotation_unitary_and_coherent_column():
    for s in SPINS[:3]:
        direction = SphereDirection(1.2, 0.7)
        r = rotation(s, direction)
        assert np.allclose(r @ r.conj().T, np.eye(s.dim), atol=1e-12)
        # rotating the top ladder state lands on the coherent state up to
        # the rotation's global phase exp(-i s phi)
        top = np.zeros(s.dim)
        top[-1] = 1.0
        col = r @ top
        expect = coherent_amplitudes(s, direction) * np.exp(-1j * s.s * direction.phi)
        assert np.allclose(col, expect, atol=1e-12)


def test_coherent_overlap_law():
    # |<Omega1|Omega2>|^2 = cos(gamma/2)^(4s)
    rng = np.random.default_rng(7)
    for s in SPINS:
        for _ in range(5):
            d1 = SphereDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            d2 = SphereDirection(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            ov = np.vdot(coherent_amplitudes(s, d1), coherent_amplitudes(s, d2))
            gamma = angle_between(d1, d2)
            assert np.isclose(abs(ov) ** 2, np.cos(gamma / 2) ** (2 * s.two_s), atol=1e-12)


def test_coherent_expectation_is_maximal():
    for s in SPINS:
        d = SphereDirection(2.1, 5.5)
        psi = coherent_amplitudes(s, d)
        val = np.vdot(psi, spin_component(s, d) @ psi).real
        assert np.isclose(val, s.s, atol=1e-12)


def test_cat_rotation():
    s = SpinLength(6)
    for alpha in (0.0, 0.4, np.pi / 2):
        u = cat_rotation(s, alpha)
        assert np.allclose(u @ u.conj().T, np.eye(s.dim), atol=1e-14)
        # only the extremal pair mixes
        interior = u[1:-1, 1:-1]
        assert np.allclose(interior, np.eye(s.dim - 2), atol=1e-15)
        assert np.isclose(u[-1, -1], np.cos(alpha))
        assert np.isclose(u[0, -1], np.sin(alpha))
    with pytest.raises(ValueError):
        cat_rotation(SpinLength(0), 0.3)


def test_two_spin_state_validation():
    s = SpinLength(1)
    flat = np.array([0.0, 1.0, 0.0, 0.0])
    st = TwoSpinState(s, flat)
    assert st.amplitudes.shape == (4,)
    assert not st.amplitudes.flags.writeable
    assert np.allclose(st.matrix(), flat.reshape(2, 2))
    # matrix-shaped input is accepted too
    st2 = TwoSpinState(s, flat.reshape(2, 2))
    assert np.allclose(st2.amplitudes, st.amplitudes)
    with pytest.raises(ValueError):
        TwoSpinState(s, flat * 2.0)
    with pytest.raises(ValueError):
        TwoSpinState(s, np.ones(3))
    rho = st.density()
    assert rho.shape == (4, 4)
    assert np.isclose(np.trace(rho).real, 1.0)


def test_singlet_is_rotation_invariant():
    for s in SPINS[:3]:
        psi = singlet_state(s).matrix()
        sx, sy, sz = spin_x(s), spin_y(s), spin_z(s)
        # total spin annihilates the singlet: (S x 1 + 1 x S) psi = 0
        for op in (sx, sy, sz):
            total = op @ psi + psi @ op.T
            assert np.max(np.abs(total)) < 1e-12
        r = rotation(s, SphereDirection(1.9, 0.4))
        rotated = r @ psi @ r.T
        phase = rotated.ravel() @ psi.conj().ravel()
        assert np.isclose(abs(phase), 1.0, atol=1e-12)
        assert np.allclose(rotated, phase * psi, atol=1e-12)


def test_macro_entangled_state():
    s = SpinLength(10)
    psi = macro_entangled_state(s).matrix()
    assert np.isclose(abs(psi[-1, 0]), 1 / np.sqrt(2))
    assert np.isclose(abs(psi[0, -1]), 1 / np.sqrt(2))
    assert np.count_nonzero(psi) == 2
    # overlap with the generalized singlet is sqrt(2/(2s+1))
    ov = np.vdot(singlet_state(s).amplitudes, macro_entangled_state(s).amplitudes)
    assert np.isclose(abs(ov), np.sqrt(2.0 / 11.0), atol=1e-14)
