"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All symbolic criteria are exact (polynomial zero); the numerical criteria
carry the stated float tolerances.  Three sub-items are marked strict-xfail
because the literally quoted values contradict identities enforced elsewhere
in this suite; the catalog follows the identities.  Each xfail reason states
the obstruction; see README "Sign conventions and recorded constants".
"""

import random

import numpy as np
import pytest

from todavolterra import bogo, catalog, flows, moser, reduction
from todavolterra.polyalg import Poly
from todavolterra.poisson import (
    bracket,
    directional_action,
    hamiltonian_vf,
    is_poisson,
    jacobiator,
    lie_derivative_bivector,
    pushforward_sign,
)


def check(criterion: str, description: str, ok: bool):
    print(f"[{criterion}] {'PASS' if ok else 'FAIL'}: {description}")
    assert ok, f"{criterion}: {description}"


def sid(text):
    return catalog.parse_system(text)


def group_of(name, sys_id):
    return reduction.FiniteGroupAction(catalog.symmetry_group(name, sys_id))


# --------------------------------------------------------------- criterion 1


def test_criterion_1_exact_jacobi():
    """pi1..pi3 (toda-a), pi1/pi3 (toda-b), pi2/pi4 (volterra-a),
    pi4 (volterra-b) all have exactly zero Jacobiator up to size 11."""
    cases = []
    for n in range(2, 6):
        cases += [(f"toda-a:{n}", k) for k in (1, 2, 3)]
    for n in range(1, 6):
        cases += [(f"toda-b:{n}", k) for k in (1, 3)]
    for N in range(3, 12):
        cases += [(f"volterra-a:{N}", k) for k in (2, 4)]
    for n in range(1, 6):
        cases.append((f"volterra-b:{n}", 4))
    for system, k in cases:
        ok = is_poisson(catalog.tensor(sid(system), k))
        check("criterion 1", f"jacobiator(pi{k}) = 0 on {system}", ok)


# --------------------------------------------------------------- criterion 2


def test_criterion_2_compatibility():
    """jacobiator(pi_i + pi_j) = 0 exactly for the catalog pairs."""
    for n in range(2, 5):
        sys_id = sid(f"toda-a:{n}")
        for i, j in ((1, 2), (2, 3), (1, 3)):
            ok = is_poisson(catalog.tensor(sys_id, i) + catalog.tensor(sys_id, j))
            check("criterion 2", f"toda-a:{n} pair ({i},{j})", ok)
    for N in range(3, 10):
        sys_id = sid(f"volterra-a:{N}")
        ok = is_poisson(catalog.tensor(sys_id, 2) + catalog.tensor(sys_id, 4))
        check("criterion 2", f"volterra-a:{N} pair (2,4)", ok)


# --------------------------------------------------------------- criterion 3


def test_criterion_3_deformation_relations():
    """L_Z0 pi_l = (l-2) pi_l; L_Z1 pi1 = -2 pi2; L_Z1 pi2 = -pi3;
    Z0(H_l) = l H_l; Z1(H_l) = (1+l) H_{l+1} for l <= 3; exact, n <= 4."""
    for n in (2, 3, 4):
        sys_id = sid(f"toda-a:{n}")
        Z0 = catalog.euler_field(sys_id)
        Z1 = catalog.master_symmetry(sys_id)
        for l in (1, 2, 3):
            pi = catalog.tensor(sys_id, l)
            check(
                "criterion 3",
                f"L_Z0 pi{l} = ({l}-2) pi{l} on toda-a:{n}",
                lie_derivative_bivector(Z0, pi) == pi.scale(l - 2),
            )
        check(
            "criterion 3",
            f"L_Z1 pi1 = -2 pi2 on toda-a:{n}",
            lie_derivative_bivector(Z1, catalog.tensor(sys_id, 1))
            == catalog.tensor(sys_id, 2).scale(-2),
        )
        check(
            "criterion 3",
            f"L_Z1 pi2 = -pi3 on toda-a:{n}",
            lie_derivative_bivector(Z1, catalog.tensor(sys_id, 2))
            == catalog.tensor(sys_id, 3).scale(-1),
        )
        for l in (1, 2, 3):
            H = catalog.hamiltonian(sys_id, l)
            check(
                "criterion 3",
                f"Z0(H{l}) = {l} H{l} on toda-a:{n}",
                directional_action(Z0, H) == H.scale(l),
            )
            check(
                "criterion 3",
                f"Z1(H{l}) = {l + 1} H{l + 1} on toda-a:{n}",
                directional_action(Z1, H)
                == catalog.hamiltonian(sys_id, l + 1).scale(l + 1),
            )


# --------------------------------------------------------------- criterion 4


def test_criterion_4_pushforward_signs():
    """psi: (-1)^k; mirror on odd chains: (-1)^(k+1); volterra mirror:
    (-1)^(k/2); order-4 twist preserves the embedded quartic tensor."""
    for n in (2, 3, 4):
        sys_id = sid(f"toda-a:{n}")
        psi = catalog.symmetry("psi", sys_id)
        for k in (1, 2, 3):
            check(
                "criterion 4",
                f"psi_* pi{k} = (-1)^{k} pi{k} on toda-a:{n}",
                pushforward_sign(psi, catalog.tensor(sys_id, k)) == (-1) ** k,
            )
    for n in (1, 2):
        sys_id = sid(f"toda-a:{2 * n + 1}")
        phi = catalog.symmetry("phi_toda", sys_id)
        for k in (1, 2, 3):
            check(
                "criterion 4",
                f"phi_* pi{k} = (-1)^{k + 1} pi{k} on toda-a:{2 * n + 1}",
                pushforward_sign(phi, catalog.tensor(sys_id, k)) == (-1) ** (k + 1),
            )
    for n in (1, 2):
        sys_id = sid(f"volterra-a:{2 * n + 1}")
        phiv = catalog.symmetry("phi_volterra", sys_id)
        for k in (2, 4):
            check(
                "criterion 4",
                f"phi_volterra_* pi{k} = (-1)^{k // 2} pi{k} on volterra-a:{2 * n + 1}",
                pushforward_sign(phiv, catalog.tensor(sys_id, k)) == (-1) ** (k // 2),
            )
    for n in (1, 2):
        N = 2 * n + 1
        pt = catalog.symmetry("phi_tilde", sid(f"toda-a:{N}"))
        emb = catalog.embedded_volterra_tensor(N, 4, "Qi")
        check(
            "criterion 4",
            f"phi_tilde preserves the embedded pi4 over Q(i), N={N}",
            pushforward_sign(pt, emb) == 1,
        )


@pytest.mark.xfail(
    strict=True,
    reason="the mirror on even-size chains transforms pi_k with sign (-1)^(k+1) "
    "(verified exactly, and required for the C-type lattice to inherit the odd "
    "brackets pi1, pi3); the stated (-1)^k table is incompatible with that",
)
def test_criterion_4_even_mirror_stated_signs():
    """Stated variant: phi_C_* pi_k = (-1)^k pi_k on even chains (k = 1, 2)."""
    for n in (1, 2):
        sys_id = sid(f"toda-a:{2 * n}")
        phi = catalog.symmetry("phi_toda", sys_id)
        for k in (1, 2):
            check(
                "criterion 4 (stated even-mirror signs)",
                f"phi_C_* pi{k} = (-1)^{k} pi{k} on toda-a:{2 * n}",
                pushforward_sign(phi, catalog.tensor(sys_id, k)) == (-1) ** k,
            )


def test_criterion_4_even_mirror_verified_signs():
    """Machine-verified even-mirror signs: (-1)^(k+1), same as the odd case."""
    for n in (1, 2):
        sys_id = sid(f"toda-a:{2 * n}")
        phi = catalog.symmetry("phi_toda", sys_id)
        for k in (1, 2):
            check(
                "criterion 4 (verified even-mirror signs)",
                f"phi_C_* pi{k} = (-1)^{k + 1} pi{k} on toda-a:{2 * n}",
                pushforward_sign(phi, catalog.tensor(sys_id, k)) == (-1) ** (k + 1),
            )


# --------------------------------------------------------------- criterion 5


def test_criterion_5_reduction_regressions():
    """The four reduction regressions, entrywise exact."""
    # b-sign flip: quadratic bracket descends to the Volterra bracket
    for N in (3, 4, 5):
        sys_t = sid(f"toda-a:{N}")
        report = reduction.verify_reduction(
            catalog.tensor(sys_t, 2),
            group_of("psi", sys_t),
            None,
            catalog.tensor(sid(f"volterra-a:{N}"), 2),
        )
        check("criterion 5", f"psi-reduction of pi2 on toda-a:{N}", report.matches)
    # mirror: cubic bracket descends to the B-type cubic bracket
    for n in (1, 2):
        sys_t = sid(f"toda-a:{2 * n + 1}")
        report = reduction.verify_reduction(
            catalog.tensor(sys_t, 3),
            group_of("phi_toda", sys_t),
            None,
            catalog.tensor(sid(f"toda-b:{n}"), 3),
        )
        check("criterion 5", f"phi-reduction of pi3 on toda-a:{2 * n + 1}", report.matches)
    # the distinguished corner entry carries the doubled a^2 term
    red = reduction.reduced_bracket(
        catalog.tensor(sid("toda-a:5"), 3), group_of("phi_toda", sid("toda-a:5"))
    )
    vs = red.variables
    check(
        "criterion 5",
        "corner entry {a_n, b_n} = (1/2)(a_n b_n^2 + 2 a_n^2) up to the global "
        "cubic sign",
        red.entry_named("a2", "b2") == Poly.parse("1/2*a2*b2^2 + a2^2", vs),
    )
    # volterra mirror: quartic bracket descends to the B-type quartic bracket
    for n in (2, 3):
        sys_v = sid(f"volterra-a:{2 * n + 1}")
        report = reduction.verify_reduction(
            catalog.tensor(sys_v, 4),
            group_of("phi_volterra", sys_v),
            None,
            catalog.tensor(sid(f"volterra-b:{n}"), 4),
        )
        check(
            "criterion 5",
            f"phi_volterra-reduction of pi4 on volterra-a:{2 * n + 1}",
            report.matches,
        )
    # one stage (order-4 twist) equals two stages (two involutions)
    for n in (1, 2):
        N = 2 * n + 1
        sys_t = sid(f"toda-a:{N}")
        one = reduction.reduced_bracket(
            catalog.embedded_volterra_tensor(N, 4, "Qi"),
            reduction.FiniteGroupAction.generated_by(
                catalog.symmetry("phi_tilde", sys_t)
            ),
        )
        stage1 = reduction.reduced_bracket(
            catalog.embedded_volterra_tensor(N, 4), group_of("psi", sys_t)
        )
        stage2 = reduction.reduced_bracket(
            stage1, group_of("phi_volterra", sid(f"volterra-a:{N}"))
        )
        check(
            "criterion 5",
            f"one-stage (order 4) = two-stage (two involutions) on pi4, n={n}",
            one == stage2.to_gaussian(),
        )


@pytest.mark.xfail(
    strict=True,
    reason="the commonly printed cubic/quartic tables carry the opposite global "
    "sign to the master-symmetry recursion pi3 = -L_Z1 pi2 and the ladders of "
    "criteria 3 and 6, which this catalog satisfies exactly; the reductions "
    "reproduce those tables only up to that single global sign",
)
def test_criterion_5_literal_printed_entries():
    """Literally quoted reduced entries: {a_n,b_n}^3 = -1/2(a_n b_n^2 + 2a_n^2)
    and {a_{n-1},a_n}^4 = +1/2 a_{n-1} a_n (a_{n-1} + 2 a_n)."""
    red3 = reduction.reduced_bracket(
        catalog.tensor(sid("toda-a:5"), 3), group_of("phi_toda", sid("toda-a:5"))
    )
    vs3 = red3.variables
    check(
        "criterion 5 (literal signs)",
        "{a2, b2}^3 = -1/2*a2*b2^2 - a2^2",
        red3.entry_named("a2", "b2") == Poly.parse("-1/2*a2*b2^2 - a2^2", vs3),
    )
    red4 = reduction.reduced_bracket(
        catalog.tensor(sid("volterra-a:5"), 4),
        group_of("phi_volterra", sid("volterra-a:5")),
    )
    vs4 = red4.variables
    check(
        "criterion 5 (literal signs)",
        "{a1, a2}^4 = 1/2*a1*a2*(a1 + 2*a2)",
        red4.entry_named("a1", "a2") == Poly.parse("1/2*a1^2*a2 + a1*a2^2", vs4),
    )


# --------------------------------------------------------------- criterion 6


def test_criterion_6_multi_hamiltonian_ladders():
    """pi3 dH1 = pi2 dH2 = pi1 dH3 (toda-a); pi3 dH2 = pi1 dH4 (toda-b);
    pi4 dH2 = pi2 dH4 (volterra-a); hamiltonian_vf(pi2, H2) = KM; exact."""
    for n in (2, 3, 4):
        sys_id = sid(f"toda-a:{n}")
        x31 = hamiltonian_vf(catalog.tensor(sys_id, 3), catalog.hamiltonian(sys_id, 1))
        x22 = hamiltonian_vf(catalog.tensor(sys_id, 2), catalog.hamiltonian(sys_id, 2))
        x13 = hamiltonian_vf(catalog.tensor(sys_id, 1), catalog.hamiltonian(sys_id, 3))
        check("criterion 6", f"toda-a:{n} pi3 dH1 = pi2 dH2", x31 == x22)
        check("criterion 6", f"toda-a:{n} pi2 dH2 = pi1 dH3", x22 == x13)
    for n in (1, 2, 3):
        sys_id = sid(f"toda-b:{n}")
        lhs = hamiltonian_vf(catalog.tensor(sys_id, 3), catalog.hamiltonian(sys_id, 2))
        rhs = hamiltonian_vf(catalog.tensor(sys_id, 1), catalog.hamiltonian(sys_id, 4))
        check("criterion 6", f"toda-b:{n} pi3 dH2 = pi1 dH4", lhs == rhs)
    for N in (4, 5, 6, 7):
        sys_id = sid(f"volterra-a:{N}")
        lhs = hamiltonian_vf(catalog.tensor(sys_id, 4), catalog.hamiltonian(sys_id, 2))
        rhs = hamiltonian_vf(catalog.tensor(sys_id, 2), catalog.hamiltonian(sys_id, 4))
        check("criterion 6", f"volterra-a:{N} pi4 dH2 = pi2 dH4", lhs == rhs)
    # the quadratic bracket generates the lattice equations themselves
    for N in (4, 5, 6):
        sys_id = sid(f"volterra-a:{N}")
        vs = catalog.variables(sys_id)
        X = hamiltonian_vf(catalog.tensor(sys_id, 2), catalog.hamiltonian(sys_id, 2))
        expected = []
        for i in range(1, N):
            rhs = Poly.zero(vs)
            ai = Poly.var(vs, f"a{i}")
            if i > 1:
                rhs = rhs + ai * Poly.var(vs, f"a{i - 1}")
            if i < N - 1:
                rhs = rhs - ai * Poly.var(vs, f"a{i + 1}")
            expected.append(rhs)
        check(
            "criterion 6",
            f"volterra-a:{N} pi2 dH2 = a_i(a_(i-1) - a_(i+1))",
            list(X.components) == expected,
        )


@pytest.mark.xfail(
    strict=True,
    reason="degree obstruction: the quartic B-type bracket has cubic entries and "
    "I4 is quadratic, so hamiltonian_vf(pi4, I4) is homogeneous of degree 4 "
    "while the B-type lattice equations are quadratic; no scalar can relate "
    "them (already visible at n=1, where pi4 and I4 both vanish but the "
    "equation a1' = a1^2 does not).  The lattice equations are instead the "
    "exact restriction of the KM flow, verified in the catalog tests.",
)
def test_criterion_6_i4_generates_lattice():
    """Stated pairing: hamiltonian_vf(pi4 of volterra-b, I4) = lattice
    equations up to one scalar."""
    for n in (1, 2, 3):
        sys_id = sid(f"volterra-b:{n}")
        X = hamiltonian_vf(catalog.tensor(sys_id, 4), catalog.i4_hamiltonian(n))
        target = catalog.bn_volterra_flow(n)
        scalars = set()
        ok = True
        for got, want in zip(X.components, target.components):
            if want.is_zero:
                ok = ok and got.is_zero
                continue
            # look for a single constant c with got = c * want
            candidates = {
                got.coefficient(e) / c for e, c in want.terms.items() if e in got.terms
            }
            if len(candidates) != 1:
                ok = False
                break
            c = candidates.pop()
            scalars.add(c)
            ok = ok and got == want.scale(c)
        check(
            "criterion 6 (I4 pairing)",
            f"volterra-b:{n} pi4 dI4 proportional to the lattice equations",
            ok and len(scalars) <= 1,
        )


# --------------------------------------------------------------- criterion 7


def test_criterion_7_moser_nine_sites():
    """Odd-deleted block of L^2 at N=9 matches the reference 5x5 matrix
    symbol for symbol, and the induced equations are the B2 Toda system."""
    split = moser.square_and_split(9)
    got = [[p.canonical_str() for p in row] for row in split.odd_deleted.matrix]
    expected = [
        ["x1^2", "x1*x2", "0", "0", "0"],
        ["x1*x2", "x2^2 + x3^2", "x3*x4", "0", "0"],
        ["0", "x3*x4", "0", "-x3*x4", "0"],
        ["0", "0", "-x3*x4", "-x2^2 - x3^2", "-x1*x2"],
        ["0", "0", "0", "-x1*x2", "-x1^2"],
    ]
    check("criterion 7", "N=9 odd-deleted block matches the 5x5 reference", got == expected)
    ident = moser.identify_jacobi(split.odd_deleted, moser.x_flow(4))
    check(
        "criterion 7",
        "induced equations are the B2 Toda system",
        ident.equation_strings()
        == [
            "A1' = -A1*B1 + A1*B2",
            "A2' = -A2*B2",
            "B1' = 2*A1^2",
            "B2' = -2*A1^2 + 2*A2^2",
        ],
    )


# --------------------------------------------------------------- criterion 8


def test_criterion_8_bogoyavlensky():
    """Marks solved exactly (A-marks all 1); chain-rule identity (a1)->(a2)
    exact; the B-route matches the B-type lattice after the recorded change."""
    for type_, ranks in (("A", (1, 2, 3, 4)), ("B", (2, 3, 4)), ("C", (2, 3, 4)), ("D", (3, 4))):
        for n in ranks:
            rd = bogo.root_data(type_, n)
            total = list(rd.omega0)
            for k, w in zip(rd.marks, rd.simple_roots):
                total = [x + k * y for x, y in zip(total, w)]
            check("criterion 8", f"{type_}{n} marks satisfy the integer relation", not any(total))
            if type_ == "A":
                check("criterion 8", f"A{n} marks all 1", rd.marks == (1,) * n)
            check(
                "criterion 8",
                f"{type_}{n} chain-rule identity for the x-variables",
                bogo.chain_rule_identity_holds(rd),
            )
    # the B-route: recorded diagonal change takes the edge system to the
    # B-type Volterra equations (rank-2 target comes from the rank-3 algebra,
    # whose Dynkin chain has two edges)
    for rank, m in ((2, 1), (3, 2), (4, 3)):
        rd = bogo.root_data("B", rank)
        f = bogo.transformed_x_system(rd)
        check(
            "criterion 8",
            f"B{rank} edge system = B-type Volterra equations at rank {m}",
            f == catalog.bn_volterra_flow(m),
        )


# --------------------------------------------------------------- criterion 9


def test_criterion_9_numerics():
    """RK4 on toda-a:3 (seeded x0 in [-1,1]^5, t in [0,10], h=1e-3):
    H and char-poly drifts < 1e-8; halving h gives a ratio in [12,20];
    H2/H3 flow commutation < 1e-6."""
    sys_id = sid("toda-a:3")
    cf = flows.compile_field(catalog.flow(sys_id, 2))
    r = random.Random(0)
    x0 = [r.uniform(-1, 1) for _ in range(5)]
    traj = flows.integrate(cf, x0, 10.0, 1e-3)
    rep = flows.monitors(traj, sys_id)
    check(
        "criterion 9",
        f"max H drift {rep.max_hamiltonian_drift:.2e} < 1e-8",
        rep.max_hamiltonian_drift < 1e-8,
    )
    check(
        "criterion 9",
        f"max char-poly drift {rep.max_charpoly_drift:.2e} < 1e-8",
        rep.max_charpoly_drift < 1e-8,
    )

    def drift(h):
        t = flows.integrate(cf, x0, 10.0, h)
        return flows.monitors(t, sys_id).max_hamiltonian_drift

    # measure where truncation error dominates roundoff
    ratio = drift(8e-3) / drift(4e-3)
    check("criterion 9", f"halving h improves drift by {ratio:.1f} in [12, 20]", 12 <= ratio <= 20)

    disc = flows.commutation_check(
        sys_id, [catalog.flow(sys_id, 2), catalog.flow(sys_id, 3)], x0, 0.5, 1e-3
    )
    check("criterion 9", f"H2/H3 flow commutation {disc:.2e} < 1e-6", disc < 1e-6)
