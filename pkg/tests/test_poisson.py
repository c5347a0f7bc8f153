from fractions import Fraction

import pytest

from todavolterra import catalog
from todavolterra.polyalg import Poly
from todavolterra.poisson import (
    LinearMap,
    PoissonTensor,
    PolyVectorField,
    bracket,
    directional_action,
    hamiltonian_vf,
    is_compatible,
    is_poisson,
    jacobiator,
    lie_derivative_bivector,
    pushforward_bivector,
    pushforward_sign,
    pushforward_vf,
)

from conftest import random_poly


T2 = catalog.SystemId("toda", "a", 2)
T3 = catalog.SystemId("toda", "a", 3)
V2 = catalog.variables(T2)  # (a1, b1, b2)


def p2(text):
    return Poly.parse(text, V2)


class TestBracket:
    def test_linear_bracket_value(self):
        pi1 = catalog.tensor(T2, 1)
        assert bracket(pi1, p2("a1"), p2("b1")) == p2("a1")

    def test_antisymmetry_diagonal(self, rng):
        pi2 = catalog.tensor(T2, 2)
        for _ in range(10):
            F = random_poly(rng, V2)
            assert bracket(pi2, F, F).is_zero

    def test_quadratic_bb_entry(self):
        pi2 = catalog.tensor(T2, 2)
        assert bracket(pi2, p2("b1"), p2("b2")) == p2("-a1")

    def test_leibniz(self, rng):
        pi2 = catalog.tensor(T2, 2)
        for _ in range(15):
            F, G, H = (random_poly(rng, V2) for _ in range(3))
            lhs = bracket(pi2, F, G * H)
            assert lhs == G * bracket(pi2, F, H) + bracket(pi2, F, G) * H


class TestJacobiator:
    def test_catalog_linear_bracket_is_poisson(self):
        assert is_poisson(catalog.tensor(T3, 1))

    def test_zero_tensor(self):
        assert is_poisson(PoissonTensor.zero(("b1", "b2", "b3")))

    def test_non_poisson_candidate(self):
        # pi^12 = b1, pi^23 = b2, pi^13 = 0 has J^123 = b1 (hand-expanded)
        vs = ("b1", "b2", "b3")
        pi = PoissonTensor(
            vs,
            {(0, 1): Poly.var(vs, "b1"), (1, 2): Poly.var(vs, "b2")},
        )
        jac = jacobiator(pi)
        assert jac[(0, 1, 2)] == Poly.var(vs, "b1")
        assert not is_poisson(pi)

    def test_jacobiator_matches_cyclic_brackets(self, rng):
        # J = 0 iff {F,{G,H}} + cyc = 0; cross-check both formulations
        vs = ("b1", "b2", "b3")
        for _ in range(10):
            upper = {
                key: random_poly(rng, vs, max_terms=2, max_exp=1)
                for key in ((0, 1), (0, 2), (1, 2))
            }
            pi = PoissonTensor(vs, upper)
            F, G, H = (Poly.var(vs, v) for v in vs)
            cyclic = (
                bracket(pi, F, bracket(pi, G, H))
                + bracket(pi, G, bracket(pi, H, F))
                + bracket(pi, H, bracket(pi, F, G))
            )
            assert cyclic == jacobiator(pi)[(0, 1, 2)]

    def test_cyclic_identity_for_poisson_tensor(self, rng):
        # for a tensor with zero jacobiator the cyclic sum vanishes for
        # arbitrary polynomials, not just coordinates
        pi = catalog.tensor(T3, 2)
        vs = catalog.variables(T3)
        for _ in range(8):
            F, G, H = (random_poly(rng, vs, max_terms=3, max_exp=2) for _ in range(3))
            cyclic = (
                bracket(pi, F, bracket(pi, G, H))
                + bracket(pi, G, bracket(pi, H, F))
                + bracket(pi, H, bracket(pi, F, G))
            )
            assert cyclic.is_zero


class TestCompatibility:
    def test_toda_pairs(self):
        assert is_compatible(catalog.tensor(T3, 1), catalog.tensor(T3, 2))
        assert is_compatible(catalog.tensor(T3, 2), catalog.tensor(T3, 3))

    def test_self_compatibility(self):
        pi = catalog.tensor(T3, 2)
        assert is_compatible(pi, pi)


class TestHamiltonianVF:
    def test_toda_equations(self):
        X = hamiltonian_vf(catalog.tensor(T2, 1), catalog.hamiltonian(T2, 2))
        assert X == PolyVectorField(V2, [p2("a1*b1 - a1*b2"), p2("-a1"), p2("a1")])

    def test_constant_hamiltonian(self):
        X = hamiltonian_vf(catalog.tensor(T2, 2), Poly.const(V2, 7))
        assert X.is_zero

    def test_energy_conservation_symbolically(self, rng):
        pi = catalog.tensor(T3, 2)
        for _ in range(10):
            H = random_poly(rng, catalog.variables(T3))
            X = hamiltonian_vf(pi, H)
            assert directional_action(X, H).is_zero

    def test_km_field(self):
        sys = catalog.SystemId("volterra", "a", 5)
        X = hamiltonian_vf(catalog.tensor(sys, 2), catalog.hamiltonian(sys, 2))
        vs = catalog.variables(sys)
        expect = [
            Poly.parse("-a1*a2", vs),
            Poly.parse("a1*a2 - a2*a3", vs),
            Poly.parse("a2*a3 - a3*a4", vs),
            Poly.parse("a3*a4", vs),
        ]
        assert X == PolyVectorField(vs, expect)


class TestLieDerivative:
    def test_euler_scales_linear_bracket(self):
        pi1 = catalog.tensor(T2, 1)
        Z0 = catalog.euler_field(T2)
        assert lie_derivative_bivector(Z0, pi1) == pi1.scale(-1)

    def test_zero_tensor(self):
        Z = catalog.euler_field(T2)
        assert lie_derivative_bivector(Z, PoissonTensor.zero(V2)).is_zero

    def test_master_symmetry_generates_cubic(self):
        for sys in (T2, T3):
            Z1 = catalog.master_symmetry(sys)
            assert lie_derivative_bivector(Z1, catalog.tensor(sys, 2)) == catalog.tensor(
                sys, 3
            ).scale(-1)


class TestPushforward:
    def test_psi_fixes_quadratic(self):
        psi = catalog.symmetry("psi", T2)
        assert pushforward_bivector(psi, catalog.tensor(T2, 2)) == catalog.tensor(T2, 2)

    def test_identity(self):
        ident = LinearMap.identity(V2)
        pi = catalog.tensor(T2, 3)
        assert pushforward_bivector(ident, pi) == pi

    def test_phi_fixes_cubic_on_five_sites(self):
        sys = catalog.SystemId("toda", "a", 5)
        phi = catalog.symmetry("phi_toda", sys)
        assert pushforward_sign(phi, catalog.tensor(sys, 3)) == 1

    def test_functoriality(self):
        sys = catalog.SystemId("toda", "a", 3)
        psi = catalog.symmetry("psi", sys)
        phi = catalog.symmetry("phi_toda", sys)
        pi = catalog.tensor(sys, 2)
        lhs = pushforward_bivector(phi.compose(psi), pi)
        rhs = pushforward_bivector(phi, pushforward_bivector(psi, pi))
        assert lhs == rhs

    def test_vector_field_pushforward(self):
        psi = catalog.symmetry("psi", T2)
        Z1 = catalog.master_symmetry(T2)
        assert pushforward_vf(psi, Z1) == Z1.scale(-1)


class TestDirectionalAction:
    def test_euler_on_h2(self):
        Z0 = catalog.euler_field(T2)
        H2 = catalog.hamiltonian(T2, 2)
        assert directional_action(Z0, H2) == H2.scale(2)

    def test_constant(self):
        Z = catalog.master_symmetry(T2)
        assert directional_action(Z, Poly.const(V2, 5)).is_zero

    def test_master_symmetry_raises_h1(self):
        Z1 = catalog.master_symmetry(T2)
        H1 = catalog.hamiltonian(T2, 1)
        assert directional_action(Z1, H1) == catalog.hamiltonian(T2, 2).scale(2)


class TestLinearMap:
    def test_declared_order_checked(self):
        with pytest.raises(ValueError):
            LinearMap(V2, {"a1": ("a1", 1), "b1": ("b1", -1), "b2": ("b2", -1)}, order=3)

    def test_inverse(self):
        phi = catalog.symmetry("phi_toda", T3)
        assert phi.compose(phi.inverse()).is_identity()

    def test_singular_rejected(self):
        with pytest.raises(ValueError):
            LinearMap(V2, {"a1": ("a1", 0), "b1": ("b1", 1), "b2": ("b2", 1)})

    def test_tensor_json(self):
        doc = catalog.tensor(T2, 1).to_json_dict()
        assert doc["dim"] == 3
        assert {"i": 1, "j": 2, "poly": "a1"} in doc["entries"]
