import math

import numpy as np
import pytest

from ggm.hilbert import DensityMatrix, PureState, SystemShape
from ggm.states import dicke, ghz, superpose, uniform_sector_state
from ggm.twirl import (
    GROUP_KINDS,
    LocalUnitaryElement,
    UnitaryGroup,
    apply_local_unitary,
    builtin_group,
    twirl,
    verify_invariance,
    verify_preimage,
)

QUBITS3 = SystemShape((2, 2, 2))
SIGMA_Z = np.diag([1.0, -1.0])


def sector_projector_cross_term(shape, modulus, q, r):
    a = uniform_sector_state(shape, modulus, q)
    b = uniform_sector_state(shape, modulus, r)
    return np.outer(a.amplitudes, b.amplitudes.conj())


class TestLocalUnitaryElement:
    def test_rejects_nonunitary(self):
        with pytest.raises(ValueError):
            LocalUnitaryElement(QUBITS3, (np.eye(2), np.eye(2), np.ones((2, 2))))

    def test_rejects_wrong_factor_count(self):
        with pytest.raises(ValueError):
            LocalUnitaryElement(QUBITS3, (np.eye(2), np.eye(2)))

    def test_full_matrix_order(self):
        el = LocalUnitaryElement(QUBITS3, (SIGMA_Z, np.eye(2), np.eye(2)))
        full = el.full_matrix()
        # party 0 is most significant: sign flips on indices >= 4
        assert np.allclose(np.diagonal(full), [1, 1, 1, 1, -1, -1, -1, -1])


class TestApply:
    def test_identity(self):
        ident = LocalUnitaryElement(QUBITS3, (np.eye(2),) * 3)
        psi = dicke(3, 1)
        assert np.allclose(apply_local_unitary(ident, psi).amplitudes, psi.amplitudes)

    def test_sigma_z_on_w(self):
        el = LocalUnitaryElement(QUBITS3, (SIGMA_Z,) * 3)
        out = apply_local_unitary(el, dicke(3, 1))
        assert np.allclose(out.amplitudes, -dicke(3, 1).amplitudes)

    def test_phase_on_dicke2(self):
        # each weight-2 term picks up the phase twice
        w = np.exp(2j * np.pi / 3)
        el = LocalUnitaryElement(QUBITS3, (np.diag([1.0, w]),) * 3)
        out = apply_local_unitary(el, dicke(3, 2))
        assert np.allclose(out.amplitudes, w**2 * dicke(3, 2).amplitudes)

    def test_density_matrix_action(self):
        el = LocalUnitaryElement(QUBITS3, (SIGMA_Z,) * 3)
        rho = dicke(3, 1).projector()
        out = apply_local_unitary(el, rho)
        assert np.allclose(out.entries, rho.entries)  # phases cancel in rho

    def test_shape_mismatch(self):
        el = LocalUnitaryElement(SystemShape((2, 2)), (np.eye(2),) * 2)
        with pytest.raises(ValueError):
            apply_local_unitary(el, dicke(3, 1))


class TestBuiltinGroups:
    def test_parity_order(self):
        group = builtin_group("parity", SystemShape((2, 2, 2, 2)))
        assert group.order == 2

    def test_omega_order(self):
        group = builtin_group("omega", SystemShape((2,) * 5))
        assert group.order == 5
        gen = group.elements[1].factors[0]
        assert np.allclose(gen, np.diag([1.0, np.exp(2j * np.pi / 5)]))

    def test_qudit_qutrits(self):
        group = builtin_group("qudit", SystemShape((3, 3, 3)))
        assert group.order == 3
        z3 = np.diag(np.exp(2j * np.pi * np.arange(3) / 3))
        assert np.allclose(group.elements[1].factors[0], z3)
        assert np.allclose(group.elements[2].factors[0], z3 @ z3)

    def test_qudit_mixed_dims_order_is_lcm(self):
        group = builtin_group("qudit", SystemShape((2, 4)))
        assert group.order == 4
        group = builtin_group("qudit", SystemShape((2, 3)))
        assert group.order == 6

    def test_zeta_order(self):
        group = builtin_group("zeta", QUBITS3)
        assert group.order == 4

    @pytest.mark.parametrize("kind,dims", [
        ("parity", (2, 2, 2)),
        ("omega", (2, 2, 2, 2, 2)),
        ("zeta", (2, 2, 2)),
        ("qudit", (3, 3, 3)),
        ("qudit", (2, 4)),
    ])
    def test_group_axioms_validated_on_construction(self, kind, dims):
        # UnitaryGroup.__post_init__ enforces identity/closure/inverse
        group = builtin_group(kind, SystemShape(dims))
        assert group.order >= 1

    def test_incompatible_shapes_rejected(self):
        with pytest.raises(ValueError):
            builtin_group("parity", SystemShape((3, 3)))
        with pytest.raises(ValueError):
            builtin_group("zeta", SystemShape((2, 2)))
        with pytest.raises(ValueError):
            builtin_group("nope", QUBITS3)

    def test_closure_violation_rejected(self):
        c, s = math.cos(math.pi / 4), math.sin(math.pi / 4)
        rot = np.array([[c, -s], [s, c]])
        shape = SystemShape((2, 2))
        with pytest.raises(ValueError):
            UnitaryGroup(shape, (
                LocalUnitaryElement(shape, (np.eye(2),) * 2),
                LocalUnitaryElement(shape, (rot, rot)),
            ))

    def test_missing_identity_rejected(self):
        shape = SystemShape((2, 2))
        with pytest.raises(ValueError):
            UnitaryGroup(shape, (
                LocalUnitaryElement(shape, (SIGMA_Z, SIGMA_Z)),
            ))


class TestTwirl:
    def test_identity_group_fixes_everything(self):
        shape = SystemShape((2, 2))
        group = UnitaryGroup(shape, (LocalUnitaryElement(shape, (np.eye(2),) * 2),))
        rho = DensityMatrix(shape, np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex))
        assert np.allclose(twirl(group, rho).entries, rho.entries)

    def test_parity_cancels_cross_terms(self):
        n = 4
        shape = SystemShape((2,) * n)
        group = builtin_group("parity", shape)
        even = uniform_sector_state(shape, 2, 0)
        odd = uniform_sector_state(shape, 2, 1)
        x = 0.3
        member = superpose([even, odd], [x, 1 - x], [0.0, 0.8])
        expected = x * np.outer(even.amplitudes, even.amplitudes.conj()) \
            + (1 - x) * np.outer(odd.amplitudes, odd.amplitudes.conj())
        out = twirl(group, member)
        assert np.max(np.abs(out.entries - expected)) < 1e-12

    def test_omega_annihilates_dicke_cross_terms(self):
        n = 5
        shape = SystemShape((2,) * n)
        group = builtin_group("omega", shape)
        for q, r in [(1, 2), (0, 3), (2, 4)]:
            cross = np.outer(dicke(n, q).amplitudes, dicke(n, r).amplitudes.conj())
            out = twirl(group, cross)
            assert np.max(np.abs(out)) < 1e-12

    def test_qudit_annihilates_sector_cross_terms(self):
        shape = SystemShape((3, 3, 3))
        group = builtin_group("qudit", shape)
        for q, r in [(0, 1), (1, 2), (0, 2)]:
            out = twirl(group, sector_projector_cross_term(shape, 3, q, r))
            assert np.max(np.abs(out)) < 1e-12

    @pytest.mark.parametrize("kind,dims", [
        ("parity", (2, 2, 2)),
        ("omega", (2, 2, 2, 2)),
        ("zeta", (2, 2, 2)),
        ("qudit", (3, 3, 3)),
    ])
    def test_idempotent_and_commutes(self, kind, dims):
        rng = np.random.default_rng(17)
        shape = SystemShape(dims)
        group = builtin_group(kind, shape)
        gauss = rng.standard_normal((shape.total_dim,) * 2) \
            + 1j * rng.standard_normal((shape.total_dim,) * 2)
        herm = gauss + gauss.conj().T
        rho_mat = herm @ herm.conj().T
        rho = DensityMatrix(shape, rho_mat / rho_mat.trace())
        once = twirl(group, rho)
        twice = twirl(group, once)
        assert np.max(np.abs(twice.entries - once.entries)) < 1e-9
        for full in group.full_matrices():
            comm = full @ once.entries - once.entries @ full
            assert np.max(np.abs(comm)) < 1e-9


class TestVerifyInvariance:
    def test_parity_family_invariant(self):
        n = 4
        shape = SystemShape((2,) * n)
        group = builtin_group("parity", shape)
        for x in (0.2, 0.5, 0.9):
            rho = DensityMatrix.mixture(
                [uniform_sector_state(shape, 2, 0), uniform_sector_state(shape, 2, 1)],
                [x, 1 - x])
            ok, dev = verify_invariance(group, rho)
            assert ok and dev < 1e-12

    def test_omega_fixes_rank3_mixture(self):
        group = builtin_group("omega", QUBITS3)
        rho = DensityMatrix.mixture(
            [ghz(3), dicke(3, 1), dicke(3, 2)], [0.5, 0.3, 0.2])
        assert verify_invariance(group, rho).ok

    def test_pure_superposition_not_invariant(self):
        n = 3
        shape = SystemShape((2,) * n)
        group = builtin_group("parity", shape)
        member = superpose(
            [uniform_sector_state(shape, 2, 0), uniform_sector_state(shape, 2, 1)],
            [0.5, 0.5])
        ok, dev = verify_invariance(group, member.projector())
        assert not ok
        assert dev > 1e-3


class TestVerifyPreimage:
    def test_parity_family(self):
        n = 4
        shape = SystemShape((2,) * n)
        group = builtin_group("parity", shape)
        basis = [uniform_sector_state(shape, 2, 0), uniform_sector_state(shape, 2, 1)]
        explicit = [np.array([0.0, phi]) for phi in (0.0, np.pi / 4, np.pi)]
        ok, dev = verify_preimage(group, basis, [0.3, 0.7], phases=explicit)
        assert ok and dev < 1e-12

    def test_zeta_family_random_draws(self):
        group = builtin_group("zeta", QUBITS3)
        from ggm.states import zeta
        basis = [zeta(i) for i in range(1, 5)]
        ok, dev = verify_preimage(group, basis, [0.4, 0.2, 0.3, 0.1], random_draws=20)
        assert ok and dev < 1e-9

    def test_broken_preimage_detected(self):
        # rotate one basis state by a non-group local unitary
        n = 3
        shape = SystemShape((2,) * n)
        group = builtin_group("parity", shape)
        theta = 0.3
        rot = np.array([[math.cos(theta), -math.sin(theta)],
                        [math.sin(theta), math.cos(theta)]])
        full = np.kron(np.kron(rot, np.eye(2)), np.eye(2))
        even = uniform_sector_state(shape, 2, 0)
        rotated = PureState(shape, full @ even.amplitudes)
        odd = uniform_sector_state(shape, 2, 1)
        ok, dev = verify_preimage(group, [rotated, odd], [0.5, 0.5], random_draws=5)
        assert not ok
        assert dev > 1e-3


class TestGroupKindsExported:
    def test_all_four_kinds(self):
        assert set(GROUP_KINDS) == {"parity", "omega", "zeta", "qudit"}
