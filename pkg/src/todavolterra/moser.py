"""Squaring map from B-type Volterra lattices to B/C-type Toda lattices.

In the variables x_i with a_i = -2 x_i^2 the B-type Volterra Lax matrix
becomes the symmetric tridiagonal matrix with superdiagonal
(x_1, ..., x_n, i x_n, ..., i x_1) and zero diagonal.  Its square couples
only positions of equal parity, so deleting every other row and column
leaves two Jacobi-type blocks; reading A_k off the block off-diagonal and
B_k off the diagonal turns the Volterra flow into Toda equations of type
B or C depending on the block size.

Deletion convention: positions are counted 0-based, `odd_deleted` removes
the 0-based-odd rows/columns (keeping the 1st, 3rd, 5th, ... in 1-based
counting).  With this convention the odd-deleted block at N = 9 is the
5x5 matrix with rows (x1^2, x1 x2, 0, 0, 0), (x1 x2, x2^2+x3^2, x3 x4,
0, 0), ... and its induced equations are the B2 Toda system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._linsolve import solve_exact
from .polyalg import GAUSS, GaussianRational, I_UNIT, Poly, poly_matrix_mul
from .poisson import PolyVectorField


def x_variables(n: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, n + 1))


def x_lax(N: int) -> list[list[Poly]]:
    """Symmetric Gaussian Lax matrix of size N = 2n+1 (zero diagonal)."""
    if N < 3 or N % 2 == 0:
        raise ValueError("size must be odd and >= 3")
    n = N // 2
    vars_ = x_variables(n)
    zero = Poly.zero(vars_, GAUSS)
    L = [[zero for _ in range(N)] for _ in range(N)]
    for s in range(1, N):
        if s <= n:
            entry = Poly.var(vars_, f"x{s}", GAUSS)
        else:
            entry = Poly.var(vars_, f"x{2 * n + 1 - s}", GAUSS).scale(I_UNIT)
        L[s - 1][s] = entry
        L[s][s - 1] = entry
    return L


def x_flow(n: int) -> PolyVectorField:
    """The B-type Volterra equations in the squared variables a_i = -2 x_i^2:

    x1' = x1 x2^2,  x_i' = x_i (x_{i+1}^2 - x_{i-1}^2),
    x_n' = -x_n (x_n^2 + x_{n-1}^2).

    The middle line is pinned by the chain rule against the a-equations
    a_i' = a_i (a_{i-1} - a_{i+1}) (regression-tested symbolically).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    vars_ = x_variables(n)
    V = lambda name: Poly.var(vars_, name)
    comps = []
    for i in range(1, n + 1):
        xi = V(f"x{i}")
        if i == n:
            rhs = -(xi * xi * xi)
            if n > 1:
                rhs = rhs - xi * V(f"x{n - 1}") ** 2
        else:
            rhs = xi * V(f"x{i + 1}") ** 2
            if i > 1:
                rhs = rhs - xi * V(f"x{i - 1}") ** 2
        comps.append(rhs)
    return PolyVectorField(vars_, comps)


@dataclass(frozen=True)
class JacobiBlock:
    """A principal parity block of the squared Lax matrix."""

    size: int
    kept_indices: tuple[int, ...]  # 1-based positions kept from the ambient matrix
    matrix: tuple[tuple[Poly, ...], ...]
    tag: str  # "B<m>" for odd size 2m+1, "C<m>" for even size 2m

    @property
    def half_rank(self) -> int:
        return self.size // 2

    def diagonal(self) -> list[Poly]:
        return [self.matrix[k][k] for k in range(self.size)]

    def superdiagonal(self) -> list[Poly]:
        return [self.matrix[k][k + 1] for k in range(self.size - 1)]


@dataclass(frozen=True)
class MoserSplit:
    N: int
    squared: tuple[tuple[Poly, ...], ...]
    odd_deleted: JacobiBlock
    even_deleted: JacobiBlock


def _block(square, kept: list[int]) -> tuple[tuple[Poly, ...], ...]:
    return tuple(tuple(square[i - 1][j - 1] for j in kept) for i in kept)


def _tag(size: int) -> str:
    return f"B{size // 2}" if size % 2 else f"C{size // 2}"


def square_and_split(N: int) -> MoserSplit:
    """Square the x-variable Lax matrix and return both parity blocks.

    The mixed-parity entries of L^2 vanish identically (checked), so the
    square decomposes into the two blocks.  Block of odd size 2m+1 is
    tagged B_m, block of even size 2m is tagged C_m.
    """
    if N < 5:
        raise ValueError("need size >= 5 to split")
    L = x_lax(N)
    M = poly_matrix_mul(L, L)
    for i in range(N):
        for j in range(N):
            if (i - j) % 2 and not M[i][j].is_zero:
                raise AssertionError("squared matrix couples parities")
    keep_for_odd_deleted = [k for k in range(1, N + 1) if k % 2 == 1]
    keep_for_even_deleted = [k for k in range(1, N + 1) if k % 2 == 0]
    odd_block = _block(M, keep_for_odd_deleted)
    even_block = _block(M, keep_for_even_deleted)
    odd = JacobiBlock(
        len(keep_for_odd_deleted), tuple(keep_for_odd_deleted), odd_block,
        _tag(len(keep_for_odd_deleted)),
    )
    even = JacobiBlock(
        len(keep_for_even_deleted), tuple(keep_for_even_deleted), even_block,
        _tag(len(keep_for_even_deleted)),
    )
    _check_block_structure(odd)
    _check_block_structure(even)
    return MoserSplit(N, tuple(tuple(row) for row in M), odd, even)


def _check_block_structure(block: JacobiBlock) -> None:
    """Mirror structure and realness of the block entries.

    B-type (odd) blocks are fully real with a zero central diagonal entry;
    C-type (even) blocks are real except the single central off-diagonal
    entry, which is purely imaginary (its square is real, so the induced
    equations still close over the A, B generators).
    """
    p = block.size
    m = block.half_rank
    diag = block.diagonal()
    sup = block.superdiagonal()
    for idx, entry in enumerate(diag):
        if not entry.imag_part().is_zero:
            raise AssertionError("diagonal entry is not real")
    for idx, entry in enumerate(sup):
        central = (p % 2 == 0) and idx == m - 1
        if central:
            if not entry.real_part().is_zero:
                raise AssertionError("central C-block entry is not purely imaginary")
        elif not entry.imag_part().is_zero:
            raise AssertionError("off-central block entry is not real")
    if p % 2 == 1 and not diag[m].is_zero:
        raise AssertionError("central diagonal entry of a B-block must vanish")
    for k in range(m):
        if not (diag[k] + diag[p - 1 - k]).is_zero:
            raise AssertionError("diagonal is not mirror-antisymmetric")
    for k in range(m if p % 2 else m - 1):
        if not (sup[k] + sup[p - 2 - k]).is_zero:
            raise AssertionError("off-diagonal is not mirror-antisymmetric")


@dataclass(frozen=True)
class IdentifiedSystem:
    """Toda-variable reading of a block and its induced equations."""

    tag: str
    a_defs: tuple[Poly, ...]  # A_k as polynomials in x
    b_defs: tuple[Poly, ...]  # B_k as polynomials in x
    variables: tuple[str, ...]  # A1..Am, B1..Bm
    equations: tuple[Poly, ...]  # d/dt of each generator, in the A/B variables

    def equation_strings(self) -> list[str]:
        return [
            f"{v}' = {p.canonical_str()}"
            for v, p in zip(self.variables, self.equations)
        ]


def identify_jacobi(block: JacobiBlock, flow: PolyVectorField) -> IdentifiedSystem:
    """Read A_k, B_k off the block, differentiate along the flow, and express
    the derivatives as polynomials in the generators.

    Raises if some derivative is not a polynomial of degree <= 2 in the
    generators (which would mean the block does not close into a Toda-type
    system).
    """
    m = block.half_rank
    a_defs = tuple(block.superdiagonal()[k] for k in range(m))
    b_defs = tuple(block.diagonal()[k] for k in range(m))
    gen_names = tuple(f"A{k}" for k in range(1, m + 1)) + tuple(
        f"B{k}" for k in range(1, m + 1)
    )
    gens = list(a_defs) + list(b_defs)

    derivs = [_time_derivative(g, flow) for g in gens]
    equations = tuple(
        _express_in_generators(d, gens, gen_names) for d in derivs
    )
    return IdentifiedSystem(block.tag, a_defs, b_defs, gen_names, equations)


def _time_derivative(g: Poly, flow: PolyVectorField) -> Poly:
    out = Poly.zero(g.variables, g.field)
    for v, comp in zip(flow.variables, flow.components):
        out = out + g.diff(v) * comp.with_field(g.field)
    return out


def _monomial_basis(names: tuple[str, ...]) -> list[tuple[tuple[str, int], ...]]:
    """Monomials of degree <= 2 in the generators, deterministic order."""
    basis: list[tuple[tuple[str, int], ...]] = [()]
    for k, u in enumerate(names):
        basis.append(((u, 1),))
    for k, u in enumerate(names):
        for l in range(k, len(names)):
            v = names[l]
            basis.append(((u, 2),) if u == v else ((u, 1), (v, 1)))
    return basis


def _express_in_generators(
    target: Poly, gens: list[Poly], names: tuple[str, ...]
) -> Poly:
    """Exact linear solve of target = sum(c_m * monomial_m(generators))."""
    basis = _monomial_basis(names)
    expanded: list[Poly] = []
    by_name = dict(zip(names, gens))
    for mono in basis:
        p = Poly.const(target.variables, 1, target.field)
        for u, e in mono:
            for _ in range(e):
                p = p * by_name[u].with_field(target.field)
        expanded.append(p)
    support: list[tuple[int, ...]] = sorted(
        set().union(*(set(p.terms) for p in expanded + [target]))
    )
    zero = GaussianRational.of(0) if target.field == GAUSS else Fraction(0)
    rows = [[p.terms.get(e, zero) for p in expanded] for e in support]
    rhs = [target.terms.get(e, zero) for e in support]
    sol = solve_exact(rows, rhs)
    if sol is None:
        raise ValueError(
            "induced equation is not expressible in the block generators"
        )
    coeffs, _ = sol
    out = Poly.zero(names, target.field)
    for c, mono in zip(coeffs, basis):
        if not c:
            continue
        term = Poly.const(names, c, target.field)
        for u, e in mono:
            term = term * Poly.var(names, u, target.field) ** e
        out = out + term
    # double-check by substitution
    check = out.substitute({u: by_name[u].with_field(target.field) for u in names})
    if check != target:
        raise ValueError("generator expression failed verification")
    return out


# ------------------------------------------------------------- cross-checks


def _exact_charpoly(mat: list[list[GaussianRational]]) -> list[GaussianRational]:
    """Coefficients c_1..c_N of det(tI - M) = t^N + c_1 t^{N-1} + ... + c_N,
    by Newton's identities on exact traces of powers."""
    N = len(mat)

    def matmul(A, B):
        return [
            [sum((A[i][k] * B[k][j] for k in range(N)), GaussianRational.of(0))
             for j in range(N)]
            for i in range(N)
        ]

    power = mat
    traces = []
    for k in range(N):
        traces.append(sum((power[i][i] for i in range(N)), GaussianRational.of(0)))
        if k < N - 1:
            power = matmul(power, mat)
    coeffs: list[GaussianRational] = []
    for k in range(1, N + 1):
        acc = traces[k - 1]
        for j in range(1, k):
            acc = acc + coeffs[j - 1] * traces[k - j - 1]
        coeffs.append(acc * GaussianRational.of(Fraction(-1, k)))
    return coeffs


def _poly_from_charcoeffs(coeffs) -> list[GaussianRational]:
    # monic univariate polynomial, highest degree first
    return [GaussianRational.of(1)] + list(coeffs)


def _poly1d_mul(p, q):
    out = [GaussianRational.of(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def block_spectrum_consistency(N: int, point: list[Fraction]) -> bool:
    """Exact check that both blocks carry the full spectrum of L^2.

    At a rational point, the characteristic polynomial of L^2 factors exactly
    as the product of the block characteristic polynomials (the square is the
    direct sum of the two parity blocks); no floating tolerance involved.
    """
    split = square_and_split(N)
    n = N // 2
    if len(point) != n:
        raise ValueError("point dimension mismatch")
    pt = [Fraction(x) for x in point]

    def eval_matrix(rows):
        return [[GaussianRational.of(0) + p.eval(pt) for p in row] for row in rows]

    L2 = eval_matrix(split.squared)
    odd = eval_matrix(split.odd_deleted.matrix)
    even = eval_matrix(split.even_deleted.matrix)
    char_full = _poly_from_charcoeffs(_exact_charpoly(L2))
    char_prod = _poly1d_mul(
        _poly_from_charcoeffs(_exact_charpoly(odd)),
        _poly_from_charcoeffs(_exact_charpoly(even)),
    )
    return char_full == char_prod


def lax_eigen_consistency(N: int, rng: np.random.Generator) -> float:
    """Float spot check: sorted union of block eigenvalues vs spectrum of L^2.

    The exact statement is block_spectrum_consistency; this measures how well
    a plain eigensolver reproduces it (limited by clustered-eigenvalue
    conditioning of the complex-symmetric matrices).
    """
    split = square_and_split(N)
    n = N // 2
    x = rng.uniform(0.2, 1.0, size=n)
    L = np.array(
        [[complex(p.eval(list(x))) for p in row] for row in x_lax(N)], dtype=complex
    )
    sq_eigs = np.sort_complex(np.linalg.eigvals(L @ L))
    block_eigs = []
    for block in (split.odd_deleted, split.even_deleted):
        B = np.array(
            [[complex(p.eval(list(x))) for p in row] for row in block.matrix],
            dtype=complex,
        )
        block_eigs.extend(np.linalg.eigvals(B))
    return float(np.max(np.abs(np.sort_complex(np.array(block_eigs)) - sq_eigs)))


def squared_variable_conjugation(N: int, rng: np.random.Generator) -> float:
    """Numeric check of the recorded relation between the two Lax forms.

    With a_i = -2 x_i^2 the a-form Lax matrix L_a and the x-form matrix L_x
    satisfy L_x = c D L_a D^{-1} with the recorded scalar c = sqrt(-1/2)
    and a diagonal D built from the superdiagonal ratios; equivalently
    spec(L_x^2) = -1/2 spec(L_a^2).  Returns the max spectral mismatch.
    """
    from . import catalog

    n = N // 2
    x = rng.uniform(0.2, 1.0, size=n)
    a = [-2.0 * xi**2 for xi in x]
    La_sym = catalog.lax(catalog.SystemId("volterra", "b", n))
    La = np.array(
        [[complex(p.eval(list(a))) for p in row] for row in La_sym], dtype=complex
    )
    Lx = np.array(
        [[complex(p.eval(list(x))) for p in row] for row in x_lax(N)], dtype=complex
    )
    lhs = np.sort_complex(np.linalg.eigvals(Lx @ Lx))
    rhs = np.sort_complex(-0.5 * np.linalg.eigvals(La @ La))
    return float(np.max(np.abs(lhs - rhs)))
