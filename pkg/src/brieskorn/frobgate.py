"""Deployment hypotheses for the unfolding construction.

Three conditions on the primitive class zeta (the class of the volume
form, i.e. of the monomial 1) decide whether the connection data deploys:

* EC — zeta is a minimal-weight eigenclass: the minimal spectral value is
  attained exactly once, by the monomial 1.  Automatic in laurent mode
  (the monomial 1 is the unique weight-0 class).
* IC — the classes of the deformation terms g_j are independent in E0.
* GC — zeta generates E0 under iterated multiplication by the g_j (and,
  optionally, by f itself, i.e. the operator whose matrix is B0 at x = 0).

The checks run at parameter value zero; verdicts certify hypotheses and
never claim the unfolding itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import DomainError
from .jacobi import DivisionEngine, MilnorBasis
from .linalg import RowReducer
from .newton import is_subdiagram
from .polyring import LAURENT, LaurentPoly, ParamCoeff, poly_to_str


@dataclass
class ECReport:
    ok: bool
    zeta_weight: Fraction
    min_weight: Fraction
    multiplicity: int


@dataclass
class ICReport:
    ok: bool
    rank: int
    r: int


@dataclass
class GCReport:
    ok: bool
    dimension: int
    mu: int
    words: Dict[int, str]  # basis position -> generator word reaching it


def _zeta_position(basis: MilnorBasis, n: int) -> int:
    one = (0,) * n
    if one not in basis.position:
        raise DomainError("the class of the volume form is not a basis element")
    return basis.position[one]


def check_EC(engine: DivisionEngine, basis: Optional[MilnorBasis] = None) -> ECReport:
    """Minimal spectral value attained only by the class of 1."""
    if basis is None:
        basis = engine.basis()
    pos = _zeta_position(basis, engine.n)
    zeta_w = basis.weights[pos]
    min_w = min(basis.weights)
    mult = sum(1 for w in basis.weights if w == min_w)
    return ECReport(ok=(zeta_w == min_w and mult == 1),
                    zeta_weight=zeta_w, min_weight=min_w, multiplicity=mult)


def _rational_vector(coords: List[ParamCoeff]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for k, pc in enumerate(coords):
        val = sum(pc.values(), Fraction(0))
        if val:
            out[k] = val
    return out


def check_IC(engine: DivisionEngine, deformation: Sequence[LaurentPoly],
             basis: Optional[MilnorBasis] = None) -> ICReport:
    """Rank of the classes of the g_j in E0 must equal r."""
    if basis is None:
        basis = engine.basis()
    red = RowReducer(track=False)
    for g in deformation:
        red.add(_rational_vector(engine.nf(g)))
    return ICReport(ok=(red.rank == len(deformation)), rank=red.rank,
                    r=len(deformation))


def _mult_columns(engine: DivisionEngine, basis: MilnorBasis,
                  g: LaurentPoly) -> List[Dict[int, Fraction]]:
    cols = []
    for m in basis.monomials:
        mono = LaurentPoly.monomial(m, engine.n, 0, engine.mode)
        cols.append(_rational_vector(engine.nf(g * mono)))
    return cols


def _apply(cols: List[Dict[int, Fraction]], v: Dict[int, Fraction]) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for k, c in v.items():
        for row, cc in cols[k].items():
            s = out.get(row, Fraction(0)) + c * cc
            if s:
                out[row] = s
            else:
                out.pop(row, None)
    return out


def check_GC(engine: DivisionEngine, deformation: Sequence[LaurentPoly],
             basis: Optional[MilnorBasis] = None,
             include_r0: bool = True) -> GCReport:
    """Krylov closure of zeta under multiplication by the g_j (and by f
    when ``include_r0``); passes iff the closure spans all of E0."""
    if basis is None:
        basis = engine.basis()
    mu = basis.mu
    ops: List[Tuple[str, List[Dict[int, Fraction]]]] = []
    for j, g in enumerate(deformation):
        ops.append((f"mul[{poly_to_str(g)}]", _mult_columns(engine, basis, g)))
    if include_r0:
        ops.append(("R0", _mult_columns(engine, basis, engine.f)))
    red = RowReducer(track=False)
    words: Dict[int, str] = {}
    zeta = {_zeta_position(basis, engine.n): Fraction(1)}
    queue: List[Tuple[Dict[int, Fraction], str]] = [(zeta, "zeta")]
    pivot = red.add(zeta)
    if pivot is not None:
        words[pivot] = "zeta"
    while queue and red.rank < mu:
        vec, word = queue.pop(0)
        for name, cols in ops:
            img = _apply(cols, vec)
            if not img:
                continue
            pivot = red.add(img)
            if pivot is not None:
                nw = f"{name}({word})"
                words[pivot] = nw
                queue.append((img, nw))
    return GCReport(ok=(red.rank == mu), dimension=red.rank, mu=mu, words=words)


@dataclass
class ConditionReport:
    ec: ECReport
    ic: ICReport
    gc: GCReport
    subdiagram: list

    @property
    def ok(self) -> bool:
        return self.ec.ok and self.ic.ok and self.gc.ok and \
            all(rep.ok for rep in self.subdiagram)


def check_conditions(engine: DivisionEngine, deformation: Sequence[LaurentPoly],
                     include_r0: bool = True) -> ConditionReport:
    basis = engine.basis()
    return ConditionReport(
        ec=check_EC(engine, basis),
        ic=check_IC(engine, deformation, basis),
        gc=check_GC(engine, deformation, basis, include_r0),
        subdiagram=[is_subdiagram(g, engine.P) for g in deformation],
    )


def suggest_deformation(engine: DivisionEngine,
                        include_r0: bool = True) -> Optional[List[LaurentPoly]]:
    """Greedy search for a small strictly-sub-diagram monomial list passing
    IC and GC; axis monomials u_i (and 1/u_i on the torus) are seeded
    first, then basis monomials by weight.  Returns None when no list
    within the candidate pool passes."""
    basis = engine.basis()
    n, mode = engine.n, engine.mode
    seeds: List[LaurentPoly] = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        seeds.append(LaurentPoly.monomial(e, n, 0, mode))
        if mode == LAURENT:
            seeds.append(LaurentPoly.monomial(tuple(-x for x in e), n, 0, mode))
    for m in basis.monomials:
        if any(m):
            seeds.append(LaurentPoly.monomial(m, n, 0, mode))
    seen = set()
    candidates: List[LaurentPoly] = []
    for g in seeds:
        key = tuple(sorted(g.terms))
        if key in seen:
            continue
        seen.add(key)
        if is_subdiagram(g, engine.P).ok:
            candidates.append(g)

    def passes(gs: List[LaurentPoly]) -> bool:
        return check_IC(engine, gs, basis).ok and \
            check_GC(engine, gs, basis, include_r0).ok

    chosen: List[LaurentPoly] = []
    if not passes(chosen):
        for g in candidates:
            chosen.append(g)
            if passes(chosen):
                break
        else:
            return None
    # greedy minimisation, preserving order
    k = 0
    while k < len(chosen):
        trial = chosen[:k] + chosen[k + 1:]
        if passes(trial):
            chosen = trial
        else:
            k += 1
    return chosen
