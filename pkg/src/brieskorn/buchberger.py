"""Buchberger completion over Q with exact cofactor tracking.

The engine works on plain sparse dictionaries ``{exponent tuple: Fraction}``
in a polynomial ring with nonnegative exponents; Laurent ideals reach it
after clearing denominators and adjoining an auxiliary inverse variable
(see :mod:`brieskorn.jacobi`).  Every basis element carries its exact
expression over the input generators, so ideal-membership certificates
can be re-multiplied and checked.

Budgets are counted in reduction steps (one leading-term cancellation
each); exceeding the cap raises :class:`~brieskorn.errors.BudgetExceeded`
so callers can downgrade to an "unknown" verdict instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded

Mono = Tuple[int, ...]
Poly = Dict[Mono, Fraction]
Combo = List[Poly]  # cofactor polynomial per input generator

DEFAULT_BUDGET = 100_000


class MonomialOrder:
    """Graded (optionally weighted) lexicographic order with an optional
    elimination variable placed in a leading block."""

    def __init__(self, nvars: int, weights: Optional[Sequence[int]] = None,
                 elim: Optional[int] = None):
        self.nvars = nvars
        self.weights = tuple(weights) if weights is not None else None
        self.elim = elim
        if self.weights is not None and any(w <= 0 for w in self.weights):
            raise ValueError("order weights must be positive")

    def key(self, mono: Mono):
        if self.elim is not None:
            main = mono[:self.elim] + mono[self.elim + 1:]
            head: Tuple[int, ...] = (mono[self.elim],)
        else:
            main = mono
            head = ()
        if self.weights is not None:
            head = head + (sum(w * e for w, e in zip(self.weights, main)),)
        return head + (sum(main), main)

    def leading(self, p: Poly) -> Mono:
        return max(p, key=self.key)

    def describe(self) -> str:
        core = ("weight" + str(self.weights)) if self.weights else "grlex"
        if self.elim is not None:
            return f"elim(v{self.elim + 1}) + {core}"
        return core


def mono_mul(a: Mono, b: Mono) -> Mono:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: Mono, b: Mono) -> Optional[Mono]:
    """a / b, or None when b does not divide a."""
    out = []
    for x, y in zip(a, b):
        if x < y:
            return None
        out.append(x - y)
    return tuple(out)


def mono_lcm(a: Mono, b: Mono) -> Mono:
    return tuple(max(x, y) for x, y in zip(a, b))


def p_axpy(target: Poly, c: Fraction, mono: Mono, src: Poly) -> None:
    """target += c * u^mono * src (in place, zero-free)."""
    if not c:
        return
    for m, v in src.items():
        key = mono_mul(m, mono)
        s = target.get(key, Fraction(0)) + c * v
        if s:
            target[key] = s
        else:
            target.pop(key, None)


def combo_axpy(target: Combo, c: Fraction, mono: Mono, src: Combo) -> None:
    for t, s in zip(target, src):
        p_axpy(t, c, mono, s)


def p_scale(p: Poly, c: Fraction) -> Poly:
    return {m: v * c for m, v in p.items()} if c else {}


@dataclass
class _Element:
    poly: Poly
    combo: Combo

    def monic(self, order: MonomialOrder) -> None:
        lc = self.poly[order.leading(self.poly)]
        if lc != 1:
            inv = 1 / lc
            self.poly = p_scale(self.poly, inv)
            self.combo = [p_scale(c, inv) for c in self.combo]


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.cap:
            raise BudgetExceeded(f"reduction budget of {self.cap} steps exhausted")


def _reduce_full(p: Poly, combo: Combo, basis: List[_Element],
                 order: MonomialOrder, budget: _Budget) -> Tuple[Poly, Combo]:
    """Fully reduce p modulo the basis, updating the cofactor combination."""
    work = dict(p)
    combo = [dict(c) for c in combo]
    result: Poly = {}
    while work:
        lt = order.leading(work)
        hit = None
        for b in basis:
            q = mono_div(lt, order.leading(b.poly))
            if q is not None:
                hit = (b, q)
                break
        if hit is None:
            result[lt] = work.pop(lt)
            continue
        b, q = hit
        budget.tick()
        c = work[lt] / b.poly[order.leading(b.poly)]
        p_axpy(work, -c, q, b.poly)
        combo_axpy(combo, -c, q, b.combo)
    return result, combo


@dataclass
class BuchResult:
    basis: List[Poly]
    combos: List[Combo]
    order: MonomialOrder
    steps: int
    ngens: int


def buchberger(gens: Sequence[Poly], order: MonomialOrder,
               budget: int = DEFAULT_BUDGET) -> BuchResult:
    """Reduced Groebner basis with cofactors over the input generators."""
    ngens = len(gens)
    budget_ = _Budget(budget)
    basis: List[_Element] = []
    for i, g in enumerate(gens):
        if not g:
            continue
        combo: Combo = [dict() for _ in range(ngens)]
        combo[i][(0,) * order.nvars] = Fraction(1)
        nf, combo = _reduce_full(g, combo, basis, order, budget_)
        if nf:
            el = _Element(nf, combo)
            el.monic(order)
            basis.append(el)

    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    while pairs:
        pairs.sort(key=lambda ij: order.key(
            mono_lcm(order.leading(basis[ij[0]].poly), order.leading(basis[ij[1]].poly))))
        i, j = pairs.pop(0)
        fi, fj = basis[i], basis[j]
        lti, ltj = order.leading(fi.poly), order.leading(fj.poly)
        lcm = mono_lcm(lti, ltj)
        if lcm == mono_mul(lti, ltj):
            continue  # coprime leading terms: S-polynomial reduces to zero
        budget_.tick()
        s: Poly = {}
        combo: Combo = [dict() for _ in range(ngens)]
        p_axpy(s, Fraction(1), mono_div(lcm, lti), fi.poly)
        combo_axpy(combo, Fraction(1), mono_div(lcm, lti), fi.combo)
        p_axpy(s, Fraction(-1), mono_div(lcm, ltj), fj.poly)
        combo_axpy(combo, Fraction(-1), mono_div(lcm, ltj), fj.combo)
        nf, combo = _reduce_full(s, combo, basis, order, budget_)
        if nf:
            el = _Element(nf, combo)
            el.monic(order)
            basis.append(el)
            pairs.extend((k, len(basis) - 1) for k in range(len(basis) - 1))

    # interreduce to the unique reduced basis
    changed = True
    while changed:
        changed = False
        for i in range(len(basis)):
            el = basis[i]
            if el is None:
                continue
            others = [b for k, b in enumerate(basis) if k != i and b is not None]
            nf, combo = _reduce_full(el.poly, el.combo, others, order, budget_)
            if nf != el.poly:
                changed = True
                if nf:
                    nel = _Element(nf, combo)
                    nel.monic(order)
                    basis[i] = nel
                else:
                    basis[i] = None
    final = [b for b in basis if b is not None]
    final.sort(key=lambda b: order.key(order.leading(b.poly)))
    return BuchResult([b.poly for b in final], [b.combo for b in final],
                      order, budget_.steps, ngens)


def normal_form(p: Poly, result: BuchResult,
                budget: int = DEFAULT_BUDGET) -> Poly:
    """Remainder of p modulo the completed basis (no cofactors)."""
    basis = [_Element(q, []) for q in result.basis]
    work = dict(p)
    out: Poly = {}
    b = _Budget(budget)
    order = result.order
    while work:
        lt = order.leading(work)
        hit = None
        for el in basis:
            q = mono_div(lt, order.leading(el.poly))
            if q is not None:
                hit = (el, q)
                break
        if hit is None:
            out[lt] = work.pop(lt)
            continue
        el, q = hit
        b.tick()
        c = work[lt] / el.poly[order.leading(el.poly)]
        p_axpy(work, -c, q, el.poly)
    return out


def contains_unit(result: BuchResult) -> bool:
    zero = (0,) * result.order.nvars
    return any(set(p) == {zero} for p in result.basis)


def staircase(result: BuchResult, variables: Sequence[int]) -> Optional[List[Mono]]:
    """Standard monomials in the given variable block, or None if infinite.

    The block is a list of variable indices; leading terms involving other
    variables are ignored (used for eliminated Laurent ideals where the
    auxiliary inverse variable has been projected away).
    """
    order = result.order
    lts = []
    for p in result.basis:
        lt = order.leading(p)
        if all(lt[i] == 0 for i in range(order.nvars) if i not in variables):
            lts.append(tuple(lt[i] for i in variables))
    k = len(variables)
    bounds = []
    for pos in range(k):
        pure = [lt[pos] for lt in lts if all(e == 0 for q, e in enumerate(lt) if q != pos)]
        if not pure:
            return None  # no pure power: infinite staircase
        bounds.append(min(pure))
    monos: List[Mono] = []
    stack = [()]
    for pos in range(k):
        stack = [m + (e,) for m in stack for e in range(bounds[pos])]
    for m in stack:
        if not any(mono_div(m, lt) is not None for lt in lts):
            monos.append(m)
    return monos


def verify_cofactors(result: BuchResult, gens: Sequence[Poly]) -> bool:
    """Re-multiply every cofactor identity; True when all hold exactly."""
    for p, combo in zip(result.basis, result.combos):
        acc: Poly = {}
        for g, c in zip(gens, combo):
            for m, v in c.items():
                p_axpy(acc, v, m, g)
        if acc != p:
            return False
    return True
