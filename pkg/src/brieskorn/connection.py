"""Gauss-Manin connection on the Brieskorn lattice in the adapted basis.

Conventions (calibrated so the worked quintic example is reproduced
verbatim, and fixed once here):

* sections are columns; the class of ``m * vol`` for a basis monomial m
  is a basis section, with ``vol = du1/u1 ^ ... ^ dun/un`` in laurent
  mode and ``du1 ^ ... ^ dun`` in polynomial mode;
* ``theta^2 nabla_theta [m vol] = [F m vol]`` and
  ``nabla_{x_i} [m vol] = -theta^{-1} [g_i m vol]``;
* the lattice relation rewrites a Jacobian combination as a theta term:
  ``[sum_i a_i u_i dF/du_i vol] = theta [sum_i u_i d(a_i)/du_i vol]``
  (laurent) resp. ``[sum_i a_i dF/du_i vol] = theta [sum_i da_i/du_i vol]``.

theta-reduction iterates the certified division: the cofactor weight
bounds make each theta payload at least one weight unit lighter, so the
expansion is finite.  The theta^0/theta^1 parts of the reduced columns
assemble the pre-gauge matrices A0(x), A1(x), C(i)_{-1}(x), C(i)_0(x);
higher theta parts are recorded as residuals (the adapted basis is then
not a Birkhoff solution and the report is the deliverable).  The gauge
of the normalisation step solves dP/dx_i = -C0^(i) P degree by degree in
x with P(0) = Id, kills C0 and must leave B_inf constant; everything is
verified by exact recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError, HypothesisViolation, ReductionWatchdog
from .jacobi import (
    DivisionResult,
    JacobianSystem,
    MilnorBasis,
    verify_division,
)
from .linalg import (
    PMatrix,
    pm_add,
    pm_commutator,
    pm_dx,
    pm_eq,
    pm_identity,
    pm_is_zero,
    pm_mul,
    pm_neg,
    pm_scale,
    pm_sub,
    pm_x_degree,
    pm_zero,
)
from .polyring import LAURENT, LaurentPoly, ParamCoeff, pc_dx, pc_scale

import math


@dataclass
class ThetaExpansion:
    """Finite expansion  [h vol] = sum_k theta^k (coordinates over the basis)."""

    coefficients: List[List[ParamCoeff]]  # [theta power][basis position]
    divisions: List[DivisionResult]
    inputs: List[LaurentPoly]             # dividend at each theta level
    basis: MilnorBasis

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def component(self, k: int) -> List[ParamCoeff]:
        if k < len(self.coefficients):
            return self.coefficients[k]
        return [dict() for _ in range(self.basis.mu)]

    def verify(self, system: JacobianSystem) -> bool:
        """Un-reduce: every division identity re-multiplies to its input."""
        return all(verify_division(h, system, res)
                   for h, res in zip(self.inputs, self.divisions))


def _theta_payload(res: DivisionResult, system: JacobianSystem) -> LaurentPoly:
    acc = LaurentPoly.zero(system.n, system.r, system.mode)
    for i, a in enumerate(res.cofactors):
        if a.is_zero():
            continue
        acc = acc + (a.log_derivative(i) if system.mode == LAURENT
                     else a.partial_derivative(i))
    return acc


def theta_reduce(h: LaurentPoly, system: JacobianSystem) -> ThetaExpansion:
    """Reduce the class of h*vol to its theta expansion over the basis."""
    basis = system.engine.basis()
    if h.r != system.r:
        h = system.lift(h)
    coefficients: List[List[ParamCoeff]] = []
    divisions: List[DivisionResult] = []
    inputs: List[LaurentPoly] = []
    cur = h
    prev_alpha: Optional[Fraction] = None
    cap: Optional[int] = None
    while not cur.is_zero():
        res = system.divide(cur)
        if cap is None:
            cap = max(0, math.floor(res.alpha)) + 2
        if len(divisions) > cap:
            raise ReductionWatchdog("theta expansion did not terminate")
        if prev_alpha is not None and res.alpha > prev_alpha - 1:
            raise ReductionWatchdog(
                "theta payload weight did not drop by a full unit")
        prev_alpha = res.alpha
        coefficients.append(res.coordinates(basis))
        divisions.append(res)
        inputs.append(cur)
        cur = _theta_payload(res, system)
    return ThetaExpansion(coefficients, divisions, inputs, basis)


@dataclass
class Residual:
    operator: str        # "theta" or "x<i>"
    column: int
    theta_power: int
    vector: List[ParamCoeff]


@dataclass
class GaugeTransform:
    P: PMatrix
    inverse: PMatrix
    r: int

    def is_identity(self) -> bool:
        return pm_eq(self.P, pm_identity(len(self.P), self.r))

    def verify(self, C0: Sequence[PMatrix]) -> bool:
        mu = len(self.P)
        ident = pm_identity(mu, self.r)
        if not pm_eq(pm_mul(self.P, self.inverse), ident):
            return False
        if not pm_eq(pm_mul(self.inverse, self.P), ident):
            return False
        zero_x = [Fraction(0)] * self.r
        from .linalg import pm_eval, rmat_identity
        if pm_eval(self.P, zero_x) != rmat_identity(mu):
            return False
        for i, c0 in enumerate(C0):
            if not pm_eq(pm_dx(self.P, i), pm_neg(pm_mul(c0, self.P))):
                return False
        return True


@dataclass
class ConnectionData:
    """Connection matrices in the adapted basis.

    Pre-gauge (``gauge is None`` and some C0 nonzero): B0/Binf hold
    A0(x)/A1(x) and C holds the theta^{-1} blocks C_{-1}.  After
    :func:`gauge_normalize`, C0 vanishes, Binf is checked constant and
    ``birkhoff_ok`` records whether the matrix has the normal form
    (B0(x)/theta + Binf) dtheta/theta + sum C^(i)(x)/theta dx_i exactly.
    """

    B0: PMatrix
    Binf: PMatrix
    C: List[PMatrix]
    C0: List[PMatrix]
    basis: MilnorBasis
    system: JacobianSystem
    residuals: List[Residual]
    gauge: Optional[GaugeTransform] = None
    birkhoff_ok: Optional[bool] = None
    binf_constant: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def mu(self) -> int:
        return self.basis.mu

    @property
    def r(self) -> int:
        return self.system.r


def _set_column(M: PMatrix, k: int, coords: List[ParamCoeff]) -> None:
    for row, pc in enumerate(coords):
        M[row][k] = dict(pc)


def build_connection(system: JacobianSystem) -> ConnectionData:
    """Pre-gauge connection matrices from theta-reduced columns."""
    basis = system.engine.basis()
    mu = basis.mu
    r = system.r
    F = system.full_polynomial()
    A0, A1 = pm_zero(mu), pm_zero(mu)
    Cm1 = [pm_zero(mu) for _ in range(r)]
    C0 = [pm_zero(mu) for _ in range(r)]
    residuals: List[Residual] = []
    for k, m in enumerate(basis.monomials):
        mono = LaurentPoly.monomial(m, system.n, r, system.mode)
        exp = theta_reduce(F * mono, system)
        _set_column(A0, k, exp.component(0))
        _set_column(A1, k, exp.component(1))
        for j in range(2, exp.order + 1):
            vec = exp.component(j)
            if any(vec[p] for p in range(mu)):
                residuals.append(Residual("theta", k, j, vec))
        for i in range(r):
            g = system.lift(system.deformation[i])
            expx = theta_reduce(g * mono, system)
            _set_column(Cm1[i], k, [pc_scale(pc, Fraction(-1))
                                    for pc in expx.component(0)])
            _set_column(C0[i], k, [pc_scale(pc, Fraction(-1))
                                   for pc in expx.component(1)])
            for j in range(2, expx.order + 1):
                vec = [pc_scale(pc, Fraction(-1)) for pc in expx.component(j)]
                if any(vec[p] for p in range(mu)):
                    residuals.append(Residual(f"x{i+1}", k, j, vec))
    return ConnectionData(B0=A0, Binf=A1, C=Cm1, C0=C0, basis=basis,
                          system=system, residuals=residuals)


def _degree_slice(M: PMatrix, d: int) -> PMatrix:
    return [[{k: v for k, v in pc.items() if sum(k) == d} for pc in row]
            for row in M]


def _times_x(M: PMatrix, i: int) -> PMatrix:
    return [[{key[:i] + (key[i] + 1,) + key[i + 1:]: v for key, v in pc.items()}
             for pc in row] for row in M]


def _solve_flat_frame(C0: Sequence[PMatrix], mu: int, r: int,
                      sign: int, weights: Sequence[Fraction]) -> PMatrix:
    """Solve dP/dx_i = sign * C0^(i) * P (sign=-1) or = P * C0^(i) (sign=+1)
    degree by degree with P(0) = Id, using the Euler integration formula.
    """
    distinct = len(set(weights))
    maxdeg = max((pm_x_degree(c) for c in C0), default=-1)
    bound = distinct * (max(0, maxdeg) + 1) + 1
    P = pm_identity(mu, r)
    for d in range(bound + 1):
        nxt = pm_zero(mu)
        for i in range(r):
            if sign < 0:
                prod = pm_neg(pm_mul(C0[i], P))
            else:
                prod = pm_mul(P, C0[i])
            nxt = pm_add(nxt, _times_x(_degree_slice(prod, d), i))
        nxt = pm_scale(nxt, Fraction(1, d + 1))
        if pm_is_zero(nxt):
            continue
        P = pm_add(P, nxt)
    # exact verification: residual means C0 was not nilpotent in the
    # required degree window
    for i in range(r):
        if sign < 0:
            rhs = pm_neg(pm_mul(C0[i], P))
        else:
            rhs = pm_mul(P, C0[i])
        if not pm_eq(pm_dx(P, i), rhs):
            raise HypothesisViolation(
                "gauge degree bound exceeded: C0 is not nilpotent "
                "(weight triangularity hypothesis violated)")
    return P


def gauge_normalize(conn: ConnectionData) -> ConnectionData:
    """Remove the theta^0 blocks of the x-matrices by the polynomial gauge
    of the normalisation step; verify every claimed identity exactly."""
    mu, r = conn.mu, conn.r
    weights = conn.basis.weights
    if all(pm_is_zero(c0) for c0 in conn.C0):
        binf_const = pm_x_degree(conn.Binf) <= 0
        ok = (not conn.residuals) and binf_const
        return replace(conn, gauge=None, birkhoff_ok=ok,
                       binf_constant=binf_const,
                       notes=conn.notes + (["B_inf is not constant"]
                                           if not binf_const else []))
    # strict weight triangularity of every C0
    for i, c0 in enumerate(conn.C0):
        for k in range(mu):
            for l in range(mu):
                if c0[k][l] and weights[k] >= weights[l]:
                    raise HypothesisViolation(
                        f"C0^{i+1} entry ({k+1},{l+1}) breaks strict weight "
                        "triangularity")
    # integrability pre-check: d_i C0_j - d_j C0_i = [C0_j, C0_i]
    for i in range(r):
        for j in range(i + 1, r):
            lhs = pm_sub(pm_dx(conn.C0[j], i), pm_dx(conn.C0[i], j))
            rhs = pm_commutator(conn.C0[j], conn.C0[i])
            if not pm_eq(lhs, rhs):
                raise HypothesisViolation(
                    f"integrability pre-check failed for parameters "
                    f"{i+1},{j+1}")
    P = _solve_flat_frame(conn.C0, mu, r, sign=-1, weights=weights)
    Q = _solve_flat_frame(conn.C0, mu, r, sign=+1, weights=weights)
    gauge = GaugeTransform(P, Q, r)
    if not gauge.verify(conn.C0):
        raise HypothesisViolation("gauge verification failed")
    B0 = pm_mul(Q, pm_mul(conn.B0, P))
    Binf = pm_mul(Q, pm_mul(conn.Binf, P))
    C = [pm_mul(Q, pm_mul(c, P)) for c in conn.C]
    C0_new = []
    for i in range(r):
        res = pm_add(pm_mul(Q, pm_mul(conn.C0[i], P)), pm_mul(Q, pm_dx(P, i)))
        if not pm_is_zero(res):
            raise HypothesisViolation("gauge failed to remove a C0 block")
        C0_new.append(res)
    binf_const = pm_x_degree(Binf) <= 0
    ok = (not conn.residuals) and binf_const
    notes = list(conn.notes)
    if not binf_const:
        notes.append("B_inf is not constant after the gauge")
    return ConnectionData(B0=B0, Binf=Binf, C=C, C0=C0_new, basis=conn.basis,
                          system=conn.system, residuals=conn.residuals,
                          gauge=gauge, birkhoff_ok=ok, binf_constant=binf_const,
                          notes=notes)


@dataclass
class IntegrabilityReport:
    commuting_dx: Dict[Tuple[int, int], PMatrix]   # I.1 residuals
    commuting_C: Dict[Tuple[int, int], PMatrix]    # I.2 residuals
    commuting_B0: Dict[int, PMatrix]               # I.3 residuals
    flatness: Dict[int, PMatrix]                   # I.4 residuals

    @property
    def ok(self) -> bool:
        return all(pm_is_zero(m) for m in self.commuting_dx.values()) and \
            all(pm_is_zero(m) for m in self.commuting_C.values()) and \
            all(pm_is_zero(m) for m in self.commuting_B0.values()) and \
            all(pm_is_zero(m) for m in self.flatness.values())


def integrability_residuals(B0: PMatrix, Binf: PMatrix,
                            C: Sequence[PMatrix]) -> IntegrabilityReport:
    """Exact residuals of the four integrability relations on raw matrices:
    d_j C^i = d_i C^j, [C^i, C^j] = 0, [B0, C^i] = 0 and
    d_i B0 + C^i = [Binf, C^i]."""
    r = len(C)
    i1: Dict[Tuple[int, int], PMatrix] = {}
    i2: Dict[Tuple[int, int], PMatrix] = {}
    i3: Dict[int, PMatrix] = {}
    i4: Dict[int, PMatrix] = {}
    for i in range(r):
        for j in range(i + 1, r):
            i1[(i, j)] = pm_sub(pm_dx(C[i], j), pm_dx(C[j], i))
            i2[(i, j)] = pm_commutator(C[i], C[j])
    for i in range(r):
        i3[i] = pm_commutator(B0, C[i])
        i4[i] = pm_sub(pm_add(pm_dx(B0, i), C[i]),
                       pm_commutator(Binf, C[i]))
    return IntegrabilityReport(i1, i2, i3, i4)


def verify_integrability(conn: ConnectionData) -> IntegrabilityReport:
    """Exact residuals of the four integrability relations of the data."""
    return integrability_residuals(conn.B0, conn.Binf, conn.C)


@dataclass
class ReconstructionReport:
    C: List[PMatrix]
    matches: bool
    inconsistencies: List[Tuple[int, int, int]]  # (parameter, row, col)


def reconstruct_C_from_B0(conn: ConnectionData) -> ReconstructionReport:
    """Rebuild every C^(i) entrywise from B0 via relation I.4.

    With Binf = diag(alpha) the relation reads
    (alpha_k - alpha_l - 1) c_kl = d_i b0_kl, so away from the resonance
    alpha_k = 1 + alpha_l the entry is determined by B0; at resonance the
    entry vanishes and a nonzero derivative of b0 is an inconsistency.
    """
    alphas = _diagonal_spectrum(conn)
    mu, r = conn.mu, conn.r
    rec: List[PMatrix] = []
    bad: List[Tuple[int, int, int]] = []
    for i in range(r):
        M = pm_zero(mu)
        for k in range(mu):
            for l in range(mu):
                db = pc_dx(conn.B0[k][l], i)
                denom = 1 - alphas[k] + alphas[l]
                if denom == 0:
                    if db:
                        bad.append((i, k, l))
                    M[k][l] = {}
                else:
                    M[k][l] = pc_scale(db, Fraction(-1) / denom)
        rec.append(M)
    matches = all(pm_eq(a, b) for a, b in zip(rec, conn.C)) and not bad
    return ReconstructionReport(rec, matches, bad)


def _diagonal_spectrum(conn: ConnectionData) -> List[Fraction]:
    mu = conn.mu
    out: List[Fraction] = []
    for k in range(mu):
        for l in range(mu):
            pc = conn.Binf[k][l]
            if k == l:
                if any(any(key) for key in pc):
                    raise DomainError("B_inf is not constant")
                out.append(sum(pc.values(), Fraction(0)))
            elif pc:
                raise DomainError("B_inf is not diagonal")
    return out


def spectrum(conn: ConnectionData) -> List[Fraction]:
    """Diagonal of B_inf: the spectrum at infinity (basis weights on the
    adapted path)."""
    return _diagonal_spectrum(conn)
