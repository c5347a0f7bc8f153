from fractions import Fraction

import pytest

from todavolterra import bogo, catalog
from todavolterra.polyalg import Poly


class TestRootData:
    def test_a_marks_all_one(self):
        for n in (1, 2, 3, 4):
            assert bogo.root_data("A", n).marks == (1,) * n

    def test_rank_one(self):
        rd = bogo.root_data("A", 1)
        assert rd.marks == (1,)
        assert rd.omega0 == tuple(-x for x in rd.simple_roots[0])

    def test_b2_marks(self):
        assert bogo.root_data("B", 2).marks == (1, 2)

    def test_c_and_d_marks(self):
        assert bogo.root_data("C", 2).marks == (2, 1)
        assert bogo.root_data("C", 4).marks == (2, 2, 2, 1)
        assert bogo.root_data("D", 4).marks == (1, 2, 1, 1)

    def test_mark_relation_exact(self):
        for t, ranks in (("A", (1, 2, 3, 4)), ("B", (2, 3, 4)), ("C", (2, 3, 4)), ("D", (3, 4))):
            for n in ranks:
                rd = bogo.root_data(t, n)
                total = list(rd.omega0)
                for k, w in zip(rd.marks, rd.simple_roots):
                    total = [x + k * y for x, y in zip(total, w)]
                assert not any(total)

    def test_d_needs_rank_3(self):
        with pytest.raises(ValueError):
            bogo.root_data("D", 2)

    def test_gram_symmetric(self):
        rd = bogo.root_data("B", 3)
        for i in range(3):
            for j in range(3):
                assert rd.gram[i][j] == rd.gram[j][i]


class TestSignMatrix:
    def test_a2(self):
        assert bogo.sign_matrix(bogo.root_data("A", 2)) == [[0, 1], [-1, 0]]

    def test_rank_one_zero(self):
        assert bogo.sign_matrix(bogo.root_data("A", 1)) == [[0]]

    def test_b3_edges(self):
        assert bogo.edges(bogo.root_data("B", 3)) == [(1, 2), (2, 3)]

    def test_d4_fork(self):
        assert bogo.edges(bogo.root_data("D", 4)) == [(1, 2), (2, 3), (2, 4)]


class TestBSystem:
    def test_a2(self):
        bsys = bogo.b_system_rhs(bogo.root_data("A", 2))
        assert bsys.coeffs == ({2: Fraction(-1)}, {1: Fraction(1)})

    def test_rank_one_static(self):
        bsys = bogo.b_system_rhs(bogo.root_data("A", 1))
        assert bsys.coeffs == ({},)
        assert bsys.eval([2.0]) == [0.0]

    def test_b2(self):
        bsys = bogo.b_system_rhs(bogo.root_data("B", 2))
        assert bsys.coeffs == ({2: Fraction(-2)}, {1: Fraction(1)})
        assert bsys.eval([1.0, 2.0]) == [-1.0, 1.0]

    def test_zero_point_rejected(self):
        bsys = bogo.b_system_rhs(bogo.root_data("B", 2))
        with pytest.raises(ZeroDivisionError):
            bsys.eval([1.0, 0.0])


class TestXSystem:
    def test_transform_antisymmetric(self):
        rd = bogo.root_data("B", 3)
        xs = bogo.x_transform(rd, [1.0, 2.0, 0.5])
        for (i, j), v in xs.items():
            assert xs[(j, i)] == -v

    def test_transform_rejects_zero(self):
        rd = bogo.root_data("A", 2)
        with pytest.raises(ZeroDivisionError):
            bogo.x_transform(rd, [0.0, 1.0])

    @pytest.mark.parametrize(
        "type_,ranks",
        [("A", (1, 2, 3, 4)), ("B", (2, 3, 4)), ("C", (2, 3, 4)), ("D", (3, 4))],
    )
    def test_chain_rule_identity(self, type_, ranks):
        for n in ranks:
            assert bogo.chain_rule_identity_holds(bogo.root_data(type_, n))

    def test_numeric_chain_rule(self):
        # d/dt x_ij along the B-system equals the X-system value, numerically
        rd = bogo.root_data("B", 3)
        b = [0.7, 1.3, 0.4]
        db = bogo.b_system_rhs(rd).eval(b)
        xs = bogo.x_transform(rd, b)
        field = bogo.x_system_rhs(rd)
        point = [xs[e] for e in bogo.edges(rd)]
        for k, (i, j) in enumerate(bogo.edges(rd)):
            # x_ij = c_ij / (b_i b_j)
            c = bogo.sign_matrix(rd)[i - 1][j - 1]
            dx = -c * (db[i - 1] * b[j - 1] + b[i - 1] * db[j - 1]) / (
                b[i - 1] * b[j - 1]
            ) ** 2
            rhs = float(field.components[k].eval(point))
            assert dx == pytest.approx(rhs, rel=1e-12)


class TestVolterraForm:
    def test_a_gives_km(self):
        for rank in (2, 3, 4):
            rd = bogo.root_data("A", rank)
            f = bogo.transformed_x_system(rd)
            km = catalog.flow(catalog.SystemId("volterra", "a", rank), 2)
            assert f == km

    def test_b_gives_b_type_volterra(self):
        for rank in (2, 3, 4):
            rd = bogo.root_data("B", rank)
            f = bogo.transformed_x_system(rd)
            assert f == catalog.bn_volterra_flow(rank - 1)

    def test_c_gives_b_type_volterra(self):
        for rank in (2, 3, 4):
            rd = bogo.root_data("C", rank)
            f = bogo.transformed_x_system(rd)
            assert f == catalog.bn_volterra_flow(rank - 1)

    def test_d_has_no_chain_form(self):
        assert bogo.volterra_form(bogo.root_data("D", 4)) is None

    def test_recorded_substitution_shape(self):
        # the change of variables is a diagonal scaling of edge variables
        rd = bogo.root_data("B", 3)
        target, sub = bogo.volterra_form(rd)
        assert target == ("a1", "a2")
        assert sub["a2"].canonical_str() == "x12"
        assert sub["a1"].canonical_str() == "2*x23"
