"""Numerical integration of the lattice flows with conservation monitors.

Polynomial vector fields are compiled to float coefficient arrays and
integrated with fixed-step RK4 (numba kernel or numpy fallback, see
`_kernels`).  Monitors track the drift of the trace Hamiltonians and of the
characteristic-polynomial coefficients of the Lax matrix along a trajectory;
both are exactly conserved by the flows, so any drift measures integrator
error.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import catalog
from ._kernels import BACKEND, eval_field, eval_poly_many_numpy, rk4_integrate
from .polyalg import GaussianRational, Poly, poly_matrix_mul, poly_matrix_power
from .poisson import PolyVectorField


class NonFiniteStateError(RuntimeError):
    def __init__(self, t_last: float):
        super().__init__(f"state left float range; last valid time {t_last}")
        self.t_last = t_last


@dataclass(frozen=True)
class CompiledPoly:
    """One polynomial as float arrays (coefs[t], expts[t, v])."""

    variables: tuple[str, ...]
    coefs: np.ndarray
    expts: np.ndarray

    def eval_many(self, states: np.ndarray) -> np.ndarray:
        return eval_poly_many_numpy(self.coefs, self.expts, states)


def compile_poly(p: Poly) -> CompiledPoly:
    items = p.sorted_terms()
    coefs = np.array([_as_float(c) for _, c in items], dtype=float)
    expts = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), len(p.variables))
    return CompiledPoly(p.variables, coefs, expts)


def _as_float(c) -> float:
    if isinstance(c, GaussianRational):
        if c.im != 0:
            raise ValueError("cannot compile a polynomial with imaginary coefficients")
        return float(c.re)
    return float(c)


@dataclass(frozen=True)
class CompiledField:
    """A polynomial vector field in CSR layout for the float kernels."""

    variables: tuple[str, ...]
    coefs: np.ndarray
    expts: np.ndarray
    comp_ptr: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.variables)

    def eval(self, x) -> np.ndarray:
        return eval_field(self.coefs, self.expts, self.comp_ptr, np.asarray(x, dtype=float))


def compile_field(vf: PolyVectorField) -> CompiledField:
    coefs: list[float] = []
    expts: list[tuple[int, ...]] = []
    ptr = [0]
    for comp in vf.components:
        for e, c in comp.sorted_terms():
            coefs.append(_as_float(c))
            expts.append(e)
        ptr.append(len(coefs))
    dim = len(vf.variables)
    return CompiledField(
        vf.variables,
        np.asarray(coefs, dtype=float),
        np.asarray(expts, dtype=np.int64).reshape(len(coefs), dim),
        np.asarray(ptr, dtype=np.int64),
    )


@dataclass
class Trajectory:
    """Uniform-grid trajectory with per-step monitor values attached later."""

    variables: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    h: float
    monitors: dict = field(default_factory=dict)


def integrate(
    vf: PolyVectorField | CompiledField,
    x0,
    t_end: float,
    h: float,
    record_stride: int = 1,
) -> Trajectory:
    """Classical RK4 with fixed step h from t=0 to t_end (deterministic)."""
    if h <= 0:
        raise ValueError("step size must be positive")
    cf = vf if isinstance(vf, CompiledField) else compile_field(vf)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (cf.dim,):
        raise ValueError(f"initial point has shape {x0.shape}, expected ({cf.dim},)")
    n_steps = int(round(t_end / h))
    states, done = rk4_integrate(
        cf.coefs, cf.expts, cf.comp_ptr, x0, float(h), n_steps, int(record_stride)
    )
    if done < n_steps:
        raise NonFiniteStateError(done * h)
    times = np.arange(states.shape[0]) * (h * record_stride)
    return Trajectory(cf.variables, times, states, h)


# ------------------------------------------------------------------ lax flows


def _strict_upper(M, zero):
    n = len(M)
    return [[M[i][j] if j > i else zero for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class LaxRhs:
    """Commutator right-hand side [L, (L^k)_+] and its phase-space reading."""

    system: catalog.SystemId
    power: int
    matrix: tuple[tuple[Poly, ...], ...]
    field: PolyVectorField

    def eval_matrix(self, point) -> np.ndarray:
        return np.array(
            [[float(p.eval(list(point))) for p in row] for row in self.matrix]
        )


def lax_rhs(sys: catalog.SystemId | str, k: int) -> LaxRhs:
    """Matrix flow d/dt L = [L, (L^k)_+], projected onto the phase variables.

    (.)_+ is the strictly upper triangular part; with this convention the
    k = 1 commutator reproduces hamiltonian_vf(pi1, H2) exactly, and in
    general [L, (L^k)_+] is the pi1-Hamiltonian flow of H_{k+1}.  The
    commutator is checked to stay inside the system's Lax template (zero
    where the template is constant, mirror-consistent where entries repeat).
    """
    sys = catalog.parse_system(sys) if isinstance(sys, str) else sys
    if k < 1:
        raise ValueError("power must be >= 1")
    L = catalog.lax(sys)
    vars_ = L[0][0].variables
    zero = Poly.zero(vars_)
    P = poly_matrix_power(L, k) if k > 1 else L
    B = _strict_upper(P, zero)
    C = [
        [x - y for x, y in zip(row_lb, row_bl)]
        for row_lb, row_bl in zip(poly_matrix_mul(L, B), poly_matrix_mul(B, L))
    ]
    positions = _template_positions(sys, L)
    comps: dict[str, Poly] = {}
    covered = set()
    for name, slots in positions.items():
        ref = None
        for (i, j, scale) in slots:
            covered.add((i, j))
            value = C[i][j].scale(Fraction(1, scale) if scale != 1 else 1)
            if ref is None:
                ref = value
            elif ref != value:
                raise ValueError(
                    f"commutator is inconsistent across template slots of {name}"
                )
        comps[name] = ref
    N = len(L)
    for i in range(N):
        for j in range(N):
            if (i, j) not in covered and not C[i][j].is_zero:
                raise ValueError("commutator leaves the phase-space template")
    vf = PolyVectorField(vars_, [comps[v] for v in vars_])
    return LaxRhs(sys, k, tuple(tuple(row) for row in C), vf)


def _template_positions(sys, L):
    """Where each variable sits in the Lax template: {var: [(i, j, scale)]}."""
    vars_ = L[0][0].variables
    out: dict[str, list[tuple[int, int, int]]] = {v: [] for v in vars_}
    N = len(L)
    for i in range(N):
        for j in range(N):
            p = L[i][j]
            if p.is_zero or p.degree() == 0:
                continue
            ((expo, coeff),) = p.terms.items()
            name = vars_[list(expo).index(1)]
            out[name].append((i, j, int(coeff)))
    return out


# ------------------------------------------------------------------- monitors


def monitored_hamiltonian_indices(sys: catalog.SystemId) -> list[int]:
    fam, kind, n = sys.family, sys.kind, sys.n
    if fam == "toda" and kind == "a":
        return list(range(1, n + 1))
    if fam == "toda":
        return [2 * k for k in range(1, n + 1)]
    if fam == "volterra" and kind == "a":
        return [2 * k for k in range(1, (n - 1) // 2 + 1)] or [2]
    return [4, 8]


@dataclass
class DriftReport:
    hamiltonian_drift: dict[int, float]
    charpoly_drift: list[float]

    @property
    def max_hamiltonian_drift(self) -> float:
        return max(self.hamiltonian_drift.values()) if self.hamiltonian_drift else 0.0

    @property
    def max_charpoly_drift(self) -> float:
        return max(self.charpoly_drift) if self.charpoly_drift else 0.0

    def to_json_dict(self) -> dict:
        return {
            "hamiltonian_drift": {str(k): v for k, v in self.hamiltonian_drift.items()},
            "charpoly_drift": self.charpoly_drift,
        }


def hamiltonian_values(sys: catalog.SystemId | str, k: int, states: np.ndarray) -> np.ndarray:
    sys = catalog.parse_system(sys) if isinstance(sys, str) else sys
    return compile_poly(catalog.hamiltonian(sys, k)).eval_many(states)


def lax_values(sys: catalog.SystemId | str, states: np.ndarray) -> np.ndarray:
    """Dense Lax matrices along a trajectory, shape [T, N, N]."""
    sys = catalog.parse_system(sys) if isinstance(sys, str) else sys
    L = catalog.lax(sys)
    N = len(L)
    T = states.shape[0]
    out = np.zeros((T, N, N))
    for i in range(N):
        for j in range(N):
            p = L[i][j]
            if p.is_zero:
                continue
            if p.degree() == 0:
                out[:, i, j] = float(Fraction(p.coefficient((0,) * len(p.variables))))
            else:
                out[:, i, j] = compile_poly(p).eval_many(states)
    return out


def charpoly_coefficients(mats: np.ndarray) -> np.ndarray:
    """Characteristic-polynomial coefficients c_1..c_N for a batch of matrices.

    Faddeev-LeVerrier via Newton's identities on batched traces of powers;
    deterministic, no eigenvalue solver.
    """
    T, N, _ = mats.shape
    power = mats.copy()
    traces = np.empty((T, N))
    traces[:, 0] = np.trace(mats, axis1=1, axis2=2)
    for k in range(1, N):
        power = power @ mats
        traces[:, k] = np.trace(power, axis1=1, axis2=2)
    coeffs = np.empty((T, N))
    for k in range(1, N + 1):
        acc = traces[:, k - 1].copy()
        for j in range(1, k):
            acc += coeffs[:, j - 1] * traces[:, k - j - 1]
        coeffs[:, k - 1] = -acc / k
    return coeffs


def monitors(traj: Trajectory, sys: catalog.SystemId | str) -> DriftReport:
    """Max drift of the trace Hamiltonians and char-poly coefficients."""
    sys = catalog.parse_system(sys) if isinstance(sys, str) else sys
    h_drift = {}
    for k in monitored_hamiltonian_indices(sys):
        vals = hamiltonian_values(sys, k, traj.states)
        h_drift[k] = float(np.max(np.abs(vals - vals[0])))
    coeffs = charpoly_coefficients(lax_values(sys, traj.states))
    cp_drift = [float(np.max(np.abs(coeffs[:, k] - coeffs[0, k]))) for k in range(coeffs.shape[1])]
    report = DriftReport(h_drift, cp_drift)
    traj.monitors = report.to_json_dict()
    return report


# --------------------------------------------------------------- commutation


def commutation_check(
    sys: catalog.SystemId | str,
    flow_fields: list[PolyVectorField],
    x0,
    t: float,
    h: float,
) -> float:
    """|| phi_t^1 phi_t^2 (x0) - phi_t^2 phi_t^1 (x0) || for the given flows."""
    if len(flow_fields) < 2:
        raise ValueError("need at least two flows")
    compiled = [compile_field(f) for f in flow_fields]
    worst = 0.0
    for a in range(len(compiled)):
        for b in range(a + 1, len(compiled)):
            x_ab = integrate(compiled[b], integrate(compiled[a], x0, t, h).states[-1], t, h).states[-1]
            x_ba = integrate(compiled[a], integrate(compiled[b], x0, t, h).states[-1], t, h).states[-1]
            worst = max(worst, float(np.linalg.norm(x_ab - x_ba)))
    return worst


# ---------------------------------------------------------------------- csv


def trajectory_csv(
    traj: Trajectory, sys: catalog.SystemId | str, decimate: int = 1
) -> str:
    """CSV text: t, <vars...>, <H_k...>, <charpoly drifts...> per row."""
    sys = catalog.parse_system(sys) if isinstance(sys, str) else sys
    ks = monitored_hamiltonian_indices(sys)
    h_vals = {k: hamiltonian_values(sys, k, traj.states) for k in ks}
    coeffs = charpoly_coefficients(lax_values(sys, traj.states))
    drifts = np.abs(coeffs - coeffs[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["t", *traj.variables, *[f"H{k}" for k in ks], *[f"c{j+1}_drift" for j in range(coeffs.shape[1])]]
    )
    for row in range(0, traj.states.shape[0], decimate):
        writer.writerow(
            [repr(float(traj.times[row]))]
            + [repr(float(x)) for x in traj.states[row]]
            + [repr(float(h_vals[k][row])) for k in ks]
            + [repr(float(d)) for d in drifts[row]]
        )
    return buf.getvalue()


def backend_name() -> str:
    return BACKEND
