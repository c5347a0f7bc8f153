"""Poisson bivectors, polynomial vector fields and linear symmetry maps.

All operations are exact: a tensor is Poisson iff the Jacobiator vanishes as a
polynomial, a map is a Poisson automorphism iff the pushforward reproduces the
tensor entrywise.  Everything here is pure and immutable.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .polyalg import (
    GAUSS,
    RAT,
    FieldMismatchError,
    Poly,
    Scalar,
    coerce_scalar,
    format_scalar,
    join_fields,
    scalar_field,
)


class LinearMap:
    """Invertible scaled permutation of the phase-space coordinates.

    `images[v] = (w, c)` means the image point has v-coordinate c * x_w.
    These maps model the lattice symmetries (b-sign flips, index mirrors,
    and the order-4 Gaussian twist); the group order is computed on
    construction and checked against `order` when given.
    """

    __slots__ = ("variables", "field", "images", "order")

    def __init__(
        self,
        variables: Sequence[str],
        images: Mapping[str, tuple[str, Scalar]],
        order: int | None = None,
    ):
        variables = tuple(variables)
        if set(images) != set(variables):
            raise ValueError("images must be given for exactly the variable list")
        field = RAT
        table = {}
        for v in variables:
            w, c = images[v]
            if w not in variables:
                raise ValueError(f"image variable {w!r} not in variable list")
            field = join_fields(field, scalar_field(c))
            table[v] = (w, c)
        sources = sorted(w for w, _ in table.values())
        if sources != sorted(variables):
            raise ValueError("not a scaled permutation (sources must be a bijection)")
        table = {v: (w, coerce_scalar(c, field)) for v, (w, c) in table.items()}
        for v, (w, c) in table.items():
            if not c:
                raise ValueError("zero scale factor makes the map singular")
        self.variables = variables
        self.field = field
        self.images = table
        actual = self._compute_order()
        if order is not None and order != actual:
            raise ValueError(f"declared order {order} but map has order {actual}")
        self.order = actual

    def _compute_order(self, bound: int = 16) -> int:
        one = coerce_scalar(1, self.field)

        def is_ident(table):
            return all(w == v and c == one for v, (w, c) in table.items())

        def compose_tables(t1, t2):
            # (t1 then t2 applied) as in self.compose: t1∘t2
            out = {}
            for v, (w, c) in t1.items():
                w2, c2 = t2[w]
                out[v] = (w2, c * c2)
            return out

        table = dict(self.images)
        for k in range(1, bound + 1):
            if is_ident(table):
                return k
            table = compose_tables(table, self.images)
        raise ValueError(f"map order exceeds {bound}")

    @staticmethod
    def identity(variables: Sequence[str]) -> "LinearMap":
        return LinearMap(variables, {v: (v, 1) for v in variables})

    def is_identity(self) -> bool:
        one = coerce_scalar(1, self.field)
        return all(w == v and c == one for v, (w, c) in self.images.items())

    def compose(self, other: "LinearMap") -> "LinearMap":
        """self after other: (self∘other)(x) = self(other(x))."""
        if self.variables != other.variables:
            raise ValueError("maps act on different variable lists")
        images = {}
        for v, (w, c) in self.images.items():
            w2, c2 = other.images[w]
            images[v] = (w2, c * c2)
        return LinearMap(self.variables, images)

    def inverse(self) -> "LinearMap":
        images = {}
        one = coerce_scalar(1, self.field)
        for v, (w, c) in self.images.items():
            images[w] = (v, one / c)
        return LinearMap(self.variables, images)

    def substitution_table(self) -> dict[str, tuple[str, Scalar]]:
        return dict(self.images)

    def apply_point(self, point: Sequence) -> list:
        """Apply to a numeric/exact coordinate vector."""
        pos = {v: k for k, v in enumerate(self.variables)}
        out = []
        for v in self.variables:
            w, c = self.images[v]
            cv = complex(c) if isinstance(point[pos[w]], (float, complex)) else c
            out.append(cv * point[pos[w]])
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        if self.variables != other.variables:
            return False
        field = join_fields(self.field, other.field)
        a = {v: (w, coerce_scalar(c, field)) for v, (w, c) in self.images.items()}
        b = {v: (w, coerce_scalar(c, field)) for v, (w, c) in other.images.items()}
        return a == b

    __hash__ = None

    def __repr__(self) -> str:
        body = ", ".join(
            f"{v}->{format_scalar(c)}*{w}" for v, (w, c) in self.images.items()
        )
        return f"LinearMap({body})"


class PolyVectorField:
    """Coordinate vector of polynomials (a polynomial vector field)."""

    __slots__ = ("variables", "field", "components")

    def __init__(self, variables: Sequence[str], components: Sequence[Poly]):
        variables = tuple(variables)
        components = tuple(p.extend(variables) if p.variables != variables else p
                           for p in components)
        if len(components) != len(variables):
            raise ValueError("need one component per variable")
        fields = {p.field for p in components}
        if len(fields) > 1:
            raise FieldMismatchError("mixed coefficient fields in vector field")
        self.variables = variables
        self.field = components[0].field if components else RAT
        self.components = components

    @staticmethod
    def zero(variables: Sequence[str], field: str = RAT) -> "PolyVectorField":
        return PolyVectorField(variables, [Poly.zero(variables, field)] * len(tuple(variables)))

    def component(self, name: str) -> Poly:
        return self.components[self.variables.index(name)]

    def scale(self, c: Scalar) -> "PolyVectorField":
        return PolyVectorField(self.variables, [p.scale(c) for p in self.components])

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        if self.variables != other.variables:
            raise ValueError("vector fields on different variable lists")
        return PolyVectorField(
            self.variables, [p + q for p, q in zip(self.components, other.components)]
        )

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.variables == other.variables and self.components == other.components

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.components)

    def __repr__(self) -> str:
        rows = ", ".join(f"{v}' = {p}" for v, p in zip(self.variables, self.components))
        return f"PolyVectorField({rows})"


class PoissonTensor:
    """Antisymmetric matrix of polynomials, stored by its strict upper triangle.

    Antisymmetry is structural: entry(i, j) returns the stored polynomial for
    i < j, its negative for i > j and zero on the diagonal.  The Jacobi
    identity is *not* assumed; candidates are tested with `is_poisson`.
    """

    __slots__ = ("variables", "field", "degree", "upper")

    def __init__(
        self,
        variables: Sequence[str],
        upper: Mapping[tuple[int, int], Poly],
        degree: int | None = None,
        field: str | None = None,
    ):
        variables = tuple(variables)
        fields = {p.field for p in upper.values()} | ({field} if field else set())
        if len(fields) > 1:
            raise FieldMismatchError("mixed coefficient fields in tensor entries")
        fld = fields.pop() if fields else RAT
        clean = {}
        m = len(variables)
        for (i, j), p in upper.items():
            if not (0 <= i < j < m):
                raise ValueError(f"upper-triangle index ({i},{j}) out of range")
            p = p.extend(variables) if p.variables != variables else p
            if not p.is_zero:
                clean[(i, j)] = p
        self.variables = variables
        self.field = fld
        self.degree = degree
        self.upper = clean

    # ------------------------------------------------------------- building

    @staticmethod
    def from_brackets(
        variables: Sequence[str],
        brackets: Mapping[tuple[str, str], Poly],
        degree: int | None = None,
        field: str = RAT,
    ) -> "PoissonTensor":
        """Build from named entries {x_u, x_v}; (u, v) order is respected."""
        variables = tuple(variables)
        pos = {v: k for k, v in enumerate(variables)}
        upper: dict[tuple[int, int], Poly] = {}
        for (u, v), p in brackets.items():
            i, j = pos[u], pos[v]
            if i == j:
                raise ValueError("diagonal bracket {x,x} must be zero")
            key, q = ((i, j), p) if i < j else ((j, i), -p)
            if key in upper:
                upper[key] = upper[key] + q
            else:
                upper[key] = q
        return PoissonTensor(variables, upper, degree, field)

    @staticmethod
    def from_matrix(
        variables: Sequence[str], matrix: Sequence[Sequence[Poly]], degree: int | None = None
    ) -> "PoissonTensor":
        """Build from a full matrix, verifying exact antisymmetry."""
        m = len(tuple(variables))
        upper = {}
        for i in range(m):
            if not matrix[i][i].is_zero:
                raise ValueError("diagonal entries must vanish")
            for j in range(i + 1, m):
                if not (matrix[i][j] + matrix[j][i]).is_zero:
                    raise ValueError(f"matrix not antisymmetric at ({i},{j})")
                upper[(i, j)] = matrix[i][j]
        return PoissonTensor(variables, upper, degree)

    @staticmethod
    def zero(variables: Sequence[str], field: str = RAT) -> "PoissonTensor":
        return PoissonTensor(variables, {}, field=field)

    # ------------------------------------------------------------- accessors

    @property
    def dim(self) -> int:
        return len(self.variables)

    def entry(self, i: int, j: int) -> Poly:
        if i == j:
            return Poly.zero(self.variables, self.field)
        if i < j:
            return self.upper.get((i, j), Poly.zero(self.variables, self.field))
        return -self.upper.get((j, i), Poly.zero(self.variables, self.field))

    def entry_named(self, u: str, v: str) -> Poly:
        pos = {name: k for k, name in enumerate(self.variables)}
        return self.entry(pos[u], pos[v])

    def matrix(self) -> list[list[Poly]]:
        return [[self.entry(i, j) for j in range(self.dim)] for i in range(self.dim)]

    # ------------------------------------------------------------ arithmetic

    def __add__(self, other: "PoissonTensor") -> "PoissonTensor":
        if self.variables != other.variables:
            raise ValueError("tensors on different variable lists")
        keys = set(self.upper) | set(other.upper)
        upper = {k: self.entry(*k) + other.entry(*k) for k in keys}
        return PoissonTensor(self.variables, upper, None, join_fields(self.field, other.field))

    def scale(self, c: Scalar) -> "PoissonTensor":
        return PoissonTensor(
            self.variables, {k: p.scale(c) for k, p in self.upper.items()}, self.degree
        )

    def __neg__(self) -> "PoissonTensor":
        return self.scale(-1)

    def __sub__(self, other: "PoissonTensor") -> "PoissonTensor":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PoissonTensor):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.field == other.field
            and self.upper == other.upper
        )

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.upper

    def to_gaussian(self) -> "PoissonTensor":
        return PoissonTensor(
            self.variables,
            {k: p.to_gaussian() for k, p in self.upper.items()},
            self.degree,
            GAUSS,
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{{{self.variables[i]},{self.variables[j]}}}={p}"
            for (i, j), p in sorted(self.upper.items())
        )
        return f"PoissonTensor(dim={self.dim}, {body or '0'})"

    # ---------------------------------------------------------------- output

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "variables": list(self.variables),
            "entries": [
                {"i": i + 1, "j": j + 1, "poly": p.canonical_str()}
                for (i, j), p in sorted(self.upper.items())
            ],
        }


# ------------------------------------------------------------------ operations


def bracket(pi: PoissonTensor, F: Poly, G: Poly) -> Poly:
    """{F, G} = sum_ij pi^ij dF/dx_i dG/dx_j."""
    F = F.extend(pi.variables) if F.variables != pi.variables else F
    G = G.extend(pi.variables) if G.variables != pi.variables else G
    out = Poly.zero(pi.variables, join_fields(pi.field, F.field))
    for (i, j), p in pi.upper.items():
        vi, vj = pi.variables[i], pi.variables[j]
        out = out + p * (F.diff(vi) * G.diff(vj) - F.diff(vj) * G.diff(vi))
    return out


def hamiltonian_vf(pi: PoissonTensor, H: Poly) -> PolyVectorField:
    """Hamiltonian field with X_H(F) = {F, H}: component i is sum_j pi^ij dH/dx_j."""
    H = H.extend(pi.variables) if H.variables != pi.variables else H
    comps = [Poly.zero(pi.variables, join_fields(pi.field, H.field)) for _ in pi.variables]
    for (i, j), p in pi.upper.items():
        vi, vj = pi.variables[i], pi.variables[j]
        comps[i] = comps[i] + p * H.diff(vj)
        comps[j] = comps[j] - p * H.diff(vi)
    return PolyVectorField(pi.variables, comps)


def jacobiator(pi: PoissonTensor) -> dict[tuple[int, int, int], Poly]:
    """J^ijk = sum_l (pi^il d_l pi^jk + pi^jl d_l pi^ki + pi^kl d_l pi^ij)."""
    m = pi.dim
    vars_ = pi.variables
    out = {}
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                total = Poly.zero(vars_, pi.field)
                for l in range(m):
                    vl = vars_[l]
                    total = total + pi.entry(i, l) * pi.entry(j, k).diff(vl)
                    total = total + pi.entry(j, l) * pi.entry(k, i).diff(vl)
                    total = total + pi.entry(k, l) * pi.entry(i, j).diff(vl)
                out[(i, j, k)] = total
    return out


def is_poisson(pi: PoissonTensor) -> bool:
    return all(p.is_zero for p in jacobiator(pi).values())


def is_compatible(pi: PoissonTensor, rho: PoissonTensor) -> bool:
    """Compatibility of two Poisson tensors: their sum is again Poisson."""
    if pi.variables != rho.variables:
        raise ValueError("tensors on different variable lists")
    return is_poisson(pi + rho)


def lie_derivative_bivector(Z: PolyVectorField, pi: PoissonTensor) -> PoissonTensor:
    """(L_Z pi)^ij = Z^k d_k pi^ij - pi^kj d_k Z^i - pi^ik d_k Z^j (candidate)."""
    if Z.variables != pi.variables:
        raise ValueError("field and tensor on different variable lists")
    vars_ = pi.variables
    m = pi.dim
    upper = {}
    for i in range(m):
        for j in range(i + 1, m):
            entry = Poly.zero(vars_, join_fields(pi.field, Z.field))
            pij = pi.entry(i, j)
            for k in range(m):
                vk = vars_[k]
                entry = entry + Z.components[k] * pij.diff(vk)
                entry = entry - pi.entry(k, j) * Z.components[i].diff(vk)
                entry = entry - pi.entry(i, k) * Z.components[j].diff(vk)
            upper[(i, j)] = entry
    return PoissonTensor(vars_, upper)


def directional_action(Z: PolyVectorField, H: Poly) -> Poly:
    """Z(H) = sum_i Z^i dH/dx_i."""
    H = H.extend(Z.variables) if H.variables != Z.variables else H
    out = Poly.zero(Z.variables, join_fields(Z.field, H.field))
    for v, comp in zip(Z.variables, Z.components):
        out = out + comp * H.diff(v)
    return out


def pushforward_bivector(A: LinearMap, pi: PoissonTensor) -> PoissonTensor:
    """(A_* pi)^uv = c_u c_v pi^{s(u) s(v)} o A^{-1} for scaled permutations."""
    if A.variables != pi.variables:
        raise ValueError("map and tensor on different variable lists")
    inv = A.inverse()
    field = join_fields(A.field, pi.field)
    pos = {v: k for k, v in enumerate(pi.variables)}
    upper = {}
    for i, u in enumerate(pi.variables):
        su, cu = A.images[u]
        for j in range(i + 1, pi.dim):
            v = pi.variables[j]
            sv, cv = A.images[v]
            p = pi.entry(pos[su], pos[sv])
            if p.is_zero:
                continue
            q = p.with_field(field).subst_linear(inv).scale(coerce_scalar(cu, field) * coerce_scalar(cv, field))
            if not q.is_zero:
                upper[(i, j)] = q
    return PoissonTensor(pi.variables, upper, pi.degree, field)


def pushforward_vf(A: LinearMap, Z: PolyVectorField) -> PolyVectorField:
    """(A_* Z)^u = c_u Z^{s(u)} o A^{-1}."""
    if A.variables != Z.variables:
        raise ValueError("map and field on different variable lists")
    inv = A.inverse()
    field = join_fields(A.field, Z.field)
    comps = []
    for u in Z.variables:
        su, cu = A.images[u]
        comps.append(Z.component(su).with_field(field).subst_linear(inv).scale(coerce_scalar(cu, field)))
    return PolyVectorField(Z.variables, comps)


def pushforward_sign(A: LinearMap, pi: PoissonTensor) -> int | None:
    """+1 / -1 if A_* pi = +/- pi exactly, else None."""
    pushed = pushforward_bivector(A, pi)
    base = PoissonTensor(
        pi.variables,
        {k: p.with_field(pushed.field) for k, p in pi.upper.items()},
        pi.degree,
        pushed.field,
    )
    if pushed == base:
        return 1
    if pushed == base.scale(-1):
        return -1
    return None
