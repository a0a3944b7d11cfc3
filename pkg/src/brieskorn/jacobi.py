"""The Milnor algebra E0 = K / (Jacobian ideal) and its certified division.

Two independent computational routes live here, and the toolkit keeps
both honest against each other:

* :func:`groebner` — Buchberger completion of the Jacobian ideal with
  exact cofactor tracking.  Laurent ideals are cleared into Q[u, t] with
  the relation t*u1*...*un = 1 and the auxiliary variable eliminated;
  the surviving u-block is a Groebner basis of the saturated ideal and
  its staircase gives the Milnor number.

* :class:`DivisionEngine` — a weight-filtered division solver.  At each
  Newton weight level alpha it expresses the level slice of the dividend
  over monomial multiples u^b * gen_i whose exponents satisfy the
  division-lemma cofactor bounds (laurent: phi(b) = alpha - 1;
  polynomial: phi*(b) <= alpha - 1 + phi(u_i) and
  phi*(b - e_i) <= alpha - 1), so every emitted cofactor carries its
  weight certificate by construction.  Deformation tails are strictly
  lighter, so the parametric division descends and terminates; a
  watchdog guards the strict descent.  The non-pivot level monomials are
  the weight-adapted basis; its size must agree with the Groebner
  dimension (and its classes are re-verified independent against the
  Groebner normal forms), otherwise the input is declared degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import buchberger as bb
from .buchberger import DEFAULT_BUDGET, MonomialOrder
from .errors import (
    DegenerateInput,
    DomainError,
    ReductionWatchdog,
    SubdiagramViolation,
)
from .linalg import RowReducer
from .newton import (
    NewtonPolyhedron,
    SubdiagramReport,
    build_polyhedron,
    is_subdiagram,
    phi,
    phi_star,
)
from .polyring import (
    LAURENT,
    POLYNOMIAL,
    Exponent,
    LaurentPoly,
    ParamCoeff,
    pc_add,
    pc_scale,
)

RawPoly = Dict[Exponent, Fraction]


def _raw(p: LaurentPoly) -> RawPoly:
    """Strip an x-free polynomial to {u-exponent: Fraction}."""
    out: RawPoly = {}
    for ue, pc in p.terms.items():
        (out.setdefault(ue, Fraction(0)))
        for _, c in pc.items():
            out[ue] += c
        if not out[ue]:
            del out[ue]
    return out


def jacobian_generators(f: LaurentPoly) -> List[LaurentPoly]:
    """u_i dF/du_i in laurent mode, dF/du_i in polynomial mode."""
    if f.mode == LAURENT:
        return [f.log_derivative(i) for i in range(f.n)]
    return [f.partial_derivative(i) for i in range(f.n)]


# ---------------------------------------------------------------------------
# Groebner oracle
# ---------------------------------------------------------------------------

@dataclass
class GroebnerBasis:
    """Reduced basis of the (saturated) Jacobian ideal with cofactors.

    ``elements[k] == sum_i cofactors[k][i] * generators[i]`` holds exactly
    in K, where the generators are :func:`jacobian_generators` of f.
    """

    elements: List[LaurentPoly]
    cofactors: List[List[LaurentPoly]]
    generators: List[LaurentPoly]
    standard_monomials: List[Exponent]
    order_description: str
    steps: int
    mode: str
    n: int

    @property
    def mu(self) -> int:
        return len(self.standard_monomials)

    def verify_cofactors(self) -> bool:
        for el, combo in zip(self.elements, self.cofactors):
            acc = LaurentPoly.zero(self.n, 0, self.mode)
            for c, g in zip(combo, self.generators):
                acc = acc + c * g
            if acc != el:
                return False
        return True

    def normal_form(self, p: LaurentPoly) -> RawPoly:
        """Remainder of an x-free polynomial-ring element modulo the basis."""
        raw = _raw(p)
        return bb.normal_form(raw, self._poly_result)

    # filled by groebner(); kept out of the dataclass signature
    _poly_result: bb.BuchResult = None  # type: ignore[assignment]


def groebner(f: LaurentPoly, P: Optional[NewtonPolyhedron] = None,
             budget: int = DEFAULT_BUDGET) -> GroebnerBasis:
    """Buchberger completion of the Jacobian ideal of f (x-free, r = 0)."""
    if not f.is_x_free():
        raise DomainError("groebner expects the parameter-free polynomial f")
    if P is None:
        P = build_polyhedron(f)
    n = f.n
    gens = jacobian_generators(f)

    if f.mode == POLYNOMIAL:
        weights = P.single_facet_weights()
        order = MonomialOrder(n, weights=weights)
        raw_gens = [_raw(g) for g in gens]
        result = bb.buchberger(raw_gens, order, budget=budget)
        monos = bb.staircase(result, list(range(n)))
        if monos is None:
            raise DegenerateInput(
                "Jacobian quotient is infinite-dimensional: "
                "f has non-isolated critical points")
        elements = [_from_raw(p, n, f.mode) for p in result.basis]
        cof = [[_from_raw(c[i], n, f.mode) for i in range(n)]
               for c in result.combos]
        gb = GroebnerBasis(elements, cof, gens, sorted(monos),
                           result.order.describe(), result.steps, f.mode, n)
        gb._poly_result = result
        return gb

    # laurent: clear denominators, saturate via t*u1..un = 1, eliminate t
    shifts: List[Exponent] = []
    raw_gens = []
    for g in gens:
        supp = g.support()
        shift = tuple(max(0, -min(a[i] for a in supp)) if supp else 0
                      for i in range(n))
        shifts.append(shift)
        raw = {tuple(a[i] + shift[i] for i in range(n)) + (0,): c
               for a, c in _raw(g).items()}
        raw_gens.append(raw)
    relation = {tuple([1] * n + [1]): Fraction(1), (0,) * (n + 1): Fraction(-1)}
    order = MonomialOrder(n + 1, elim=n)
    result = bb.buchberger(raw_gens + [relation], order, budget=budget)
    u_elements = []
    u_combos = []
    for p, combo in zip(result.basis, result.combos):
        if any(m[n] for m in p):
            continue
        u_elements.append({m[:n]: c for m, c in p.items()})
        # substitute t -> (u1...un)^-1 in the generator cofactors; the
        # relation cofactor multiplies t*u1..un - 1 = 0 and drops out.
        mapped = []
        for i in range(n):
            lau: RawPoly = {}
            for m, c in combo[i].items():
                key = tuple(m[k] - m[n] + shifts[i][k] for k in range(n))
                s = lau.get(key, Fraction(0)) + c
                if s:
                    lau[key] = s
                else:
                    lau.pop(key, None)
            mapped.append(lau)
        u_combos.append(mapped)
    # the t-free block is a Groebner basis of the saturated ideal in Q[u]
    # under the induced graded-lex order
    poly_result = bb.BuchResult(basis=u_elements, combos=[],
                                order=MonomialOrder(n), steps=result.steps,
                                ngens=result.ngens)
    monos = bb.staircase(poly_result, list(range(n)))
    if monos is None:
        raise DegenerateInput(
            "saturated Jacobian quotient is infinite-dimensional: "
            "f has non-isolated critical points on the torus")
    elements = [_from_raw(p, n, f.mode) for p in u_elements]
    cof = [[_from_raw(c, n, f.mode) for c in combo] for combo in u_combos]
    gb = GroebnerBasis(elements, cof, gens, sorted(monos),
                       result.order.describe(), result.steps, f.mode, n)
    gb._poly_result = poly_result
    return gb


def _from_raw(p: RawPoly, n: int, mode: str) -> LaurentPoly:
    return LaurentPoly(n, 0, mode, {a: {(): c} for a, c in p.items()})


def milnor_number(f: LaurentPoly, P: Optional[NewtonPolyhedron] = None,
                  budget: int = DEFAULT_BUDGET) -> int:
    """dim of K modulo the (saturated) Jacobian ideal, via the staircase."""
    return groebner(f, P, budget).mu


# ---------------------------------------------------------------------------
# Weight-adapted basis and certified division
# ---------------------------------------------------------------------------

@dataclass
class MilnorBasis:
    monomials: List[Exponent]
    weights: List[Fraction]       # phi in laurent mode, phi* in polynomial mode
    mode: str

    @property
    def mu(self) -> int:
        return len(self.monomials)

    def __post_init__(self):
        self.position = {m: k for k, m in enumerate(self.monomials)}

    def weight_of(self, mono: Exponent) -> Fraction:
        return self.weights[self.position[mono]]


@dataclass
class CofactorCertificate:
    generator: int
    weight: Optional[Fraction]        # phi(a_i) resp. phi*(a_i)
    bound: Fraction
    derivative_weight: Optional[Fraction]  # phi(u_i d a_i/du_i) resp. phi*(da_i/du_i)
    derivative_bound: Fraction
    ok: bool


@dataclass
class DivisionResult:
    """Exact identity  h = remainder + sum_i cofactor_i * gen_i(F)."""

    remainder: Dict[Exponent, ParamCoeff]
    cofactors: List[LaurentPoly]
    alpha: Optional[Fraction]
    certificates: List[CofactorCertificate]
    mode: str

    def coordinates(self, basis: MilnorBasis) -> List[ParamCoeff]:
        out: List[ParamCoeff] = [dict() for _ in range(basis.mu)]
        for mono, pc in self.remainder.items():
            out[basis.position[mono]] = dict(pc)
        return out

    def remainder_poly(self, n: int, r: int, mode: str) -> LaurentPoly:
        return LaurentPoly(n, r, mode,
                           {m: dict(pc) for m, pc in self.remainder.items()})


class _Level:
    __slots__ = ("dw", "reducer", "chosen")

    def __init__(self, dw: int, reducer: RowReducer, chosen: List[Exponent]):
        self.dw = dw
        self.reducer = reducer
        self.chosen = chosen


def _scan_key(a: Exponent):
    return (sum(a), a)


class DivisionEngine:
    """Division and normal forms adapted to the Newton filtration of f.

    The engine depends only on f (deformations enter per call), so one
    instance serves every deformation of the same polynomial; weight
    levels and their solvers are cached.
    """

    def __init__(self, f: LaurentPoly, P: Optional[NewtonPolyhedron] = None,
                 budget: int = DEFAULT_BUDGET):
        if not f.is_x_free():
            raise DomainError("the reference polynomial must be parameter-free")
        if f.r:
            f = f.substitute_params([Fraction(0)] * f.r)
        self.f = f
        self.P = P if P is not None else build_polyhedron(f)
        self.mode = f.mode
        self.n = f.n
        self.budget = budget
        self.D = self.P.weight_denominator
        self.gens = jacobian_generators(f)
        self.gens_raw = [_raw(g) for g in self.gens]
        unit = [tuple(1 if j == i else 0 for j in range(self.n))
                for i in range(self.n)]
        self._dw_unit = [self.P.dweight(u) for u in unit]
        self._levels: Dict[int, _Level] = {}
        self._points: Dict[int, List[Exponent]] = {}
        self._enum_bound = -1
        self._gb: Optional[GroebnerBasis] = None
        self._basis: Optional[MilnorBasis] = None

    # -- weights -------------------------------------------------------------

    def dweight_mono(self, a: Exponent) -> int:
        """Basis-weight scale: D*phi in laurent mode, D*phi* in polynomial."""
        if self.mode == LAURENT:
            return self.P.dweight(a)
        return self.P.dweight(tuple(x + 1 for x in a))

    def poly_dweight(self, terms: Dict[Exponent, object]) -> int:
        return max(self.dweight_mono(a) for a in terms)

    # -- lattice enumeration ---------------------------------------------------

    def _ensure_points(self, dbound: int) -> None:
        """Enumerate lattice monomials of weight <= dbound/D, bucketed by
        weight.  Extending the bound only adds buckets at higher weights,
        so cached level solvers stay valid."""
        if dbound <= self._enum_bound:
            return
        bound = Fraction(dbound, self.D)
        lo: List[int] = []
        hi: List[int] = []
        for i in range(self.n):
            coords = [v[i] for v in self.P.vertices]
            a, b = bound * min(coords), bound * max(coords)
            if self.mode == LAURENT:
                lo.append(math.ceil(a))
                hi.append(math.floor(b))
            else:
                lo.append(0)
                hi.append(max(0, math.floor(b) - 1))
        stack: List[Tuple[int, ...]] = [()]
        for i in range(self.n):
            stack = [m + (e,) for m in stack for e in range(lo[i], hi[i] + 1)]
        buckets: Dict[int, List[Exponent]] = {}
        for a in stack:
            dw = self.dweight_mono(a)
            if dw <= dbound:
                buckets.setdefault(dw, []).append(a)
        self._points = {dw: sorted(ms, key=_scan_key)
                        for dw, ms in buckets.items()}
        self._enum_bound = dbound

    def _points_at(self, dw: int) -> List[Exponent]:
        return self._points.get(dw, [])

    def _points_upto(self, dw: int) -> List[Tuple[int, Exponent]]:
        out = []
        for d in sorted(self._points):
            if d > dw:
                break
            out.extend((d, a) for a in self._points[d])
        return out

    # -- level solvers ---------------------------------------------------------

    def _multiple_tags(self, dw: int):
        """Cofactor monomials (i, b) allowed by the division-lemma bounds."""
        if self.mode == LAURENT:
            if dw < self.D:
                return
            for b in self._points_at(dw - self.D):
                for i in range(self.n):
                    yield i, b
            return
        for i in range(self.n):
            cap = dw - self.D + self._dw_unit[i]
            for db, b in self._points_upto(cap):
                if b[i]:
                    down = tuple(x - (1 if j == i else 0)
                                 for j, x in enumerate(b))
                    if self.dweight_mono(down) > dw - self.D:
                        continue
                yield i, b

    def _level(self, dw: int) -> _Level:
        cached = self._levels.get(dw)
        if cached is not None:
            return cached
        cols = self._points_at(dw)
        reducer = RowReducer(track=True)
        for i, b in self._multiple_tags(dw):
            vec: Dict[Tuple, Fraction] = {}
            for c_exp, c in self.gens_raw[i].items():
                key = tuple(x + y for x, y in zip(b, c_exp))
                if self.dweight_mono(key) == dw:
                    s = vec.get(_scan_key(key), Fraction(0)) + c
                    if s:
                        vec[_scan_key(key)] = s
                    else:
                        vec.pop(_scan_key(key), None)
            if vec:
                reducer.add(vec, tag=(i, b))
        pivots = set(reducer.rows.keys())
        chosen = [a for a in cols if _scan_key(a) not in pivots]
        level = _Level(dw, reducer, chosen)
        self._levels[dw] = level
        return level

    # -- Groebner cross-checks ---------------------------------------------------

    def groebner_basis(self) -> GroebnerBasis:
        if self._gb is None:
            self._gb = groebner(self.f, self.P, budget=self.budget)
        return self._gb

    def basis(self) -> MilnorBasis:
        """Weight-adapted monomial basis of E0 (ascending weight, then
        ascending total degree and lexicographic order inside a level)."""
        if self._basis is not None:
            return self._basis
        mu = self.groebner_basis().mu
        top = self.n * self.D
        self._ensure_points(top)
        monomials: List[Exponent] = []
        weights: List[Fraction] = []
        for dw in range(top + 1):
            if not self._points_at(dw):
                continue
            level = self._level(dw)
            for a in level.chosen:
                monomials.append(a)
                weights.append(Fraction(dw, self.D))
            if len(monomials) > mu:
                raise DegenerateInput(
                    f"adapted basis exceeds the Milnor number {mu}: "
                    "the division theorem hypotheses fail for this input")
        if len(monomials) != mu:
            raise DegenerateInput(
                f"adapted basis has {len(monomials)} elements but mu = {mu}")
        self._verify_independent(monomials)
        self._basis = MilnorBasis(monomials, weights, self.mode)
        return self._basis

    def _verify_independent(self, monomials: List[Exponent]) -> None:
        """Classes of the adapted monomials must be independent in the
        Groebner presentation of E0 (independent route)."""
        gb = self.groebner_basis()
        shift = 0
        if self.mode == LAURENT:
            shift = max(0, -min(min(a) for a in monomials))
        red = RowReducer(track=False)
        for m in monomials:
            lifted = LaurentPoly.monomial(
                tuple(x + shift for x in m), self.n, 0, self.mode)
            nf = gb.normal_form(lifted)
            if not nf:
                raise DegenerateInput(
                    f"adapted basis monomial {m} lies in the Jacobian ideal")
            if red.add(dict(nf)) is None:
                raise DegenerateInput(
                    f"adapted basis monomial {m} is dependent modulo the ideal")

    # -- division ------------------------------------------------------------------

    def divide(self, h: LaurentPoly,
               deformation: Optional[Sequence[LaurentPoly]] = None) -> DivisionResult:
        """Certified division of h by the Jacobian generators of
        F = f + sum_j x_j g_j (g's from ``deformation``, may be empty)."""
        defo = list(deformation) if deformation else []
        r = h.r
        if r != len(defo):
            raise DomainError(f"h has {r} parameters but {len(defo)} deformation terms given")
        basis = self.basis()
        # x_j * (derivative part of g_j with respect to u_i), per generator i
        tails: List[List[Tuple[int, RawPoly]]] = [[] for _ in range(self.n)]
        for j, g in enumerate(defo):
            for i in range(self.n):
                part = g.log_derivative(i) if self.mode == LAURENT \
                    else g.partial_derivative(i)
                if not part.is_zero():
                    tails[i].append((j, _raw(part)))

        work: Dict[Exponent, ParamCoeff] = {ue: dict(pc) for ue, pc in h.terms.items()}
        remainder: Dict[Exponent, ParamCoeff] = {}
        cof_raw: List[Dict[Exponent, ParamCoeff]] = [dict() for _ in range(self.n)]
        alpha: Optional[Fraction] = None
        alpha_dw: Optional[int] = None
        prev_dw: Optional[int] = None
        guard = 0

        while work:
            dw = self.poly_dweight(work)
            if prev_dw is not None and dw >= prev_dw:
                raise ReductionWatchdog(
                    "weight failed to decrease strictly; the sub-diagram "
                    "hypothesis is violated")
            prev_dw = dw
            guard += 1
            if alpha is None:
                alpha = Fraction(dw, self.D)
                alpha_dw = dw
                self._ensure_points(dw)
            if guard > alpha_dw + 2:
                raise ReductionWatchdog("division did not terminate")
            level = self._level(dw)
            level_monos = [a for a in work if self.dweight_mono(a) == dw]
            xes = sorted({xe for a in level_monos for xe in work[a]})
            for xe in xes:
                vec: Dict[Tuple, Fraction] = {}
                for a in level_monos:
                    c = work.get(a, {}).get(xe)
                    if c:
                        vec[_scan_key(a)] = c
                if not vec:
                    continue
                residual, combo = level.reducer.reduce(vec)
                # residual lands on the chosen monomials of the level
                for key, c in residual.items():
                    mono = key[1]
                    if mono not in basis.position:
                        raise DegenerateInput(
                            f"remainder monomial {mono} is outside the adapted basis")
                    pc = remainder.setdefault(mono, {})
                    s = pc.get(xe, Fraction(0)) + c
                    if s:
                        pc[xe] = s
                    else:
                        pc.pop(xe, None)
                    self._work_sub(work, mono, xe, c)
                for (i, b), c in combo.items():
                    pc = cof_raw[i].setdefault(b, {})
                    s = pc.get(xe, Fraction(0)) + c
                    if s:
                        pc[xe] = s
                    else:
                        pc.pop(xe, None)
                    # subtract c * x^xe * u^b * gen_i(F) from the work poly
                    for c_exp, cc in self.gens_raw[i].items():
                        self._work_sub(work, tuple(x + y for x, y in zip(b, c_exp)),
                                       xe, c * cc)
                    for j, part in tails[i]:
                        xe2 = xe[:j] + (xe[j] + 1,) + xe[j + 1:]
                        for c_exp, cc in part.items():
                            self._work_sub(work, tuple(x + y for x, y in zip(b, c_exp)),
                                           xe2, c * cc)

        cofactors = [LaurentPoly(self.n, r, self.mode,
                                 {b: pc for b, pc in raw.items() if pc})
                     for raw in cof_raw]
        certs = self._certificates(cofactors, alpha)
        return DivisionResult(remainder, cofactors, alpha, certs, self.mode)

    @staticmethod
    def _work_sub(work: Dict[Exponent, ParamCoeff], mono: Exponent,
                  xe: Exponent, c: Fraction) -> None:
        pc = work.get(mono)
        if pc is None:
            if c:
                work[mono] = {xe: -c}
            return
        s = pc.get(xe, Fraction(0)) - c
        if s:
            pc[xe] = s
        else:
            pc.pop(xe, None)
            if not pc:
                del work[mono]

    def _certificates(self, cofactors: List[LaurentPoly],
                      alpha: Optional[Fraction]) -> List[CofactorCertificate]:
        certs: List[CofactorCertificate] = []
        if alpha is None:
            return certs
        for i, a in enumerate(cofactors):
            if a.is_zero():
                continue
            if self.mode == LAURENT:
                w = phi(a, self.P).value
                dv = a.log_derivative(i)
                wd = phi(dv, self.P).value if not dv.is_zero() else None
                bound = alpha - 1
                dbound = alpha - 1
            else:
                w = phi_star(a, self.P).value
                dv = a.partial_derivative(i)
                wd = phi_star(dv, self.P).value if not dv.is_zero() else None
                bound = alpha - 1 + self.P.weight(
                    tuple(1 if j == i else 0 for j in range(self.n)))
                dbound = alpha - 1
            ok = w <= bound and (wd is None or wd <= dbound)
            certs.append(CofactorCertificate(i, w, bound, wd, dbound, ok))
            if not ok:
                raise DegenerateInput(
                    f"cofactor {i} violates its weight certificate "
                    f"({w} > {bound})")
        return certs

    def nf(self, h: LaurentPoly,
           deformation: Optional[Sequence[LaurentPoly]] = None) -> List[ParamCoeff]:
        return self.divide(h, deformation).coordinates(self.basis())


def e0_basis(f: LaurentPoly, P: Optional[NewtonPolyhedron] = None,
             budget: int = DEFAULT_BUDGET) -> MilnorBasis:
    """Weight-adapted monomial basis of E0, sorted by nondecreasing weight."""
    return DivisionEngine(f, P, budget).basis()


# ---------------------------------------------------------------------------
# Deformed Jacobian system
# ---------------------------------------------------------------------------

@dataclass
class JacobianSystem:
    """F = f + sum_j x_j g_j with certified strictly-sub-diagram g's."""

    f: LaurentPoly
    deformation: List[LaurentPoly]
    P: NewtonPolyhedron
    engine: DivisionEngine
    subdiagram_reports: List[SubdiagramReport]

    @property
    def mode(self) -> str:
        return self.f.mode

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def r(self) -> int:
        return len(self.deformation)

    @property
    def generators(self) -> List[LaurentPoly]:
        """u_i dF/du_i (laurent) resp. dF/du_i (polynomial), over Q[x]."""
        return jacobian_generators(self.full_polynomial())

    def full_polynomial(self) -> LaurentPoly:
        """F as an element of Q[x][u]."""
        r = self.r
        F = LaurentPoly(self.f.n, r, self.mode,
                        {ue: {(0,) * r: c for _, c in pc.items()}
                         for ue, pc in self.f.terms.items()})
        for j, g in enumerate(self.deformation):
            gx = LaurentPoly(g.n, r, g.mode,
                             {ue: {(0,) * r: c for _, c in pc.items()}
                              for ue, pc in g.terms.items()})
            F = F + gx.times_param(j)
        return F

    def lift(self, p: LaurentPoly) -> LaurentPoly:
        """Reinterpret an x-free polynomial inside Q[x][u] with this r."""
        return LaurentPoly(p.n, self.r, p.mode,
                           {ue: {(0,) * self.r: c for _, c in pc.items()}
                            for ue, pc in p.terms.items()})

    def divide(self, h: LaurentPoly) -> DivisionResult:
        if h.r != self.r:
            h = self.lift(h)
        return self.engine.divide(h, self.deformation)

    @classmethod
    def build(cls, f: LaurentPoly, deformation: Sequence[LaurentPoly],
              P: Optional[NewtonPolyhedron] = None,
              engine: Optional[DivisionEngine] = None,
              budget: int = DEFAULT_BUDGET,
              validate: bool = True) -> "JacobianSystem":
        if engine is not None:
            P = engine.P
        elif P is None:
            P = build_polyhedron(f)
        reports = []
        for j, g in enumerate(deformation):
            rep = is_subdiagram(g, P)
            reports.append(rep)
            if validate and not rep.ok:
                w = rep.condition("phi<1")
                raise SubdiagramViolation(
                    f"deformation term {j + 1} is not strictly sub-diagram: "
                    f"phi = {w.value} (needs < 1)")
        if engine is None:
            engine = DivisionEngine(f, P, budget)
        return cls(f, list(deformation), P, engine, reports)


def divide(h: LaurentPoly, system: JacobianSystem) -> DivisionResult:
    """Certified division of h against the deformed Jacobian generators."""
    return system.divide(h)


def verify_division(h: LaurentPoly, system: JacobianSystem,
                    result: DivisionResult) -> bool:
    """Re-multiply the division identity; True iff it reproduces h exactly."""
    if h.r != system.r:
        h = system.lift(h)
    acc = result.remainder_poly(system.n, system.r, system.mode)
    for cof, gen in zip(result.cofactors, system.generators):
        acc = acc + cof * gen
    return acc == h


def multiplication_matrix(g: LaurentPoly, system: JacobianSystem,
                          basis: Optional[MilnorBasis] = None) -> List[List[ParamCoeff]]:
    """Matrix of multiplication by g on E0[x]: column k holds the remainder
    coordinates of g * (basis monomial k)."""
    if basis is None:
        basis = system.engine.basis()
    if g.r != system.r:
        g = system.lift(g)
    cols: List[List[ParamCoeff]] = []
    for m in basis.monomials:
        mono = LaurentPoly.monomial(m, system.n, system.r, system.mode)
        cols.append(system.divide(g * mono).coordinates(basis))
    return [[cols[k][i] for k in range(basis.mu)] for i in range(basis.mu)]
