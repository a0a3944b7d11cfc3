"""Newton polyhedron geometry and the weight filtrations.

Builds the Newton polyhedron at infinity of a (Laurent) polynomial with
exact rational facet forms L_sigma normalised to take the value 1 on
their facet, and derives from it everything downstream modules consume:

* the weight phi(g) = max over facets and support monomials of L_sigma
  (parameters x are weightless), and the shifted weight
  phi*(g) = phi(u1...un * g) used in polynomial mode;
* convenience (commode) and strict sub-diagram tests with witnesses;
* the lattice-volume Milnor number oracle (Kouchnirenko);
* the face-by-face nondegeneracy check (saturated face-Jacobian ideals
  must contain 1), budget-bounded with an "unknown" verdict.

Hulls are computed by exact brute-force facet enumeration over n-point
subsets; the scale of interest (n <= 4, supports of a dozen monomials)
makes this the simplest fully exact choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd, lcm
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .buchberger import (
    DEFAULT_BUDGET,
    MonomialOrder,
    buchberger,
    contains_unit,
)
from .errors import BudgetExceeded, DomainError, HypothesisViolation, NotCommode
from .linalg import RowReducer, rmat_det
from .polyring import LAURENT, POLYNOMIAL, Exponent, LaurentPoly

Vector = Tuple[Fraction, ...]


def _dot(a: Sequence[Fraction], b: Sequence[int | Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def _affine_rank(points: Sequence[Sequence[int | Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    red = RowReducer(track=False)
    for p in points[1:]:
        red.add({i: Fraction(x - y) for i, (x, y) in enumerate(zip(p, base)) if x != y})
    return red.rank


def _nullspace_line(vectors: Sequence[Sequence[Fraction]], n: int) -> Optional[Vector]:
    """A nonzero c with <c, v> = 0 for all v, when the nullspace is a line."""
    red = RowReducer(track=False)
    for v in vectors:
        red.add({i: Fraction(x) for i, x in enumerate(v) if x})
    if red.rank != n - 1:
        return None
    pivots = set(red.rows.keys())
    free = next(i for i in range(n) if i not in pivots)
    c = [Fraction(0)] * n
    c[free] = Fraction(1)
    for pivot, (row, _) in red.rows.items():
        c[pivot] = -row.get(free, Fraction(0))
    return tuple(c)


def _canonical_halfspace(c: Sequence[Fraction], d: Fraction) -> Tuple[Tuple[int, ...], int]:
    """Scale (c, d) to a primitive integer tuple, keeping orientation."""
    den = lcm(*[x.denominator for x in c], d.denominator)
    ints = [int(x * den) for x in c] + [int(d * den)]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints[:-1]), ints[-1]


def _hull_halfspaces(points: Sequence[Exponent]) -> List[Tuple[Tuple[int, ...], int]]:
    """Facet halfspaces <c, x> <= d of a full-dimensional hull (primitive)."""
    n = len(points[0])
    seen: Dict[Tuple, Tuple[Tuple[int, ...], int]] = {}
    for idx in combinations(range(len(points)), n):
        base = points[idx[0]]
        vecs = [[Fraction(points[j][k] - base[k]) for k in range(n)] for j in idx[1:]]
        c = _nullspace_line(vecs, n)
        if c is None:
            continue
        d = _dot(c, base)
        vals = [_dot(c, p) for p in points]
        if max(vals) <= d and min(vals) < d:
            key = _canonical_halfspace(c, d)
        elif min(vals) >= d and max(vals) > d:
            key = _canonical_halfspace(tuple(-x for x in c), -d)
        else:
            continue
        seen[key] = key
    return sorted(seen.values())


@dataclass(frozen=True)
class Facet:
    """Newton-boundary facet carrying the form L_sigma with L_sigma = 1 on it."""

    normal: Vector  # coefficients of L_sigma (rational, possibly negative)

    def value(self, a: Sequence[int]) -> Fraction:
        return _dot(self.normal, a)


@dataclass
class NewtonPolyhedron:
    n: int
    mode: str
    support: List[Exponent]           # support of f (origin included in polynomial mode)
    vertices: List[Exponent]
    facets: List[Facet]               # Newton-boundary facets only
    halfspaces: List[Tuple[Tuple[int, ...], int]]  # all hull facets <c,x> <= d
    weight_denominator: int = field(init=False)
    _int_forms: List[Tuple[int, ...]] = field(init=False)

    def __post_init__(self):
        dens = [lcm(*[c.denominator for c in f.normal]) if f.normal else 1
                for f in self.facets]
        D = 1
        for d in dens:
            D = lcm(D, d)
        self.weight_denominator = D
        self._int_forms = [tuple(int(c * D) for c in f.normal) for f in self.facets]

    def dweight(self, a: Sequence[int]) -> int:
        """weight_denominator * phi for a single exponent vector."""
        return max(sum(w * e for w, e in zip(form, a) if e)
                   for form in self._int_forms)

    def weight(self, a: Sequence[int]) -> Fraction:
        return Fraction(self.dweight(a), self.weight_denominator)

    def argmax_facet(self, a: Sequence[int]) -> int:
        vals = [sum(w * e for w, e in zip(form, a) if e) for form in self._int_forms]
        return vals.index(max(vals))

    def single_facet_weights(self) -> Optional[Tuple[int, ...]]:
        """Positive integer variable weights when phi is linear, else None."""
        if len(self.facets) != 1:
            return None
        form = self._int_forms[0]
        if any(w <= 0 for w in form):
            return None
        return form


@dataclass
class WeightReport:
    """phi value with the facet and monomial attaining it (None for g = 0)."""

    value: Optional[Fraction]
    facet_index: Optional[int] = None
    monomial: Optional[Exponent] = None

    @property
    def is_bottom(self) -> bool:
        return self.value is None


@dataclass
class CommodeReport:
    ok: bool
    reason: str = ""
    axis: Optional[int] = None                  # 1-based axis missing (polynomial)
    hyperplane: Optional[Tuple[Tuple[int, ...], int]] = None  # separating (laurent)


@dataclass
class ConditionCheck:
    name: str
    ok: bool
    value: Optional[Fraction] = None
    bound: Optional[Fraction] = None
    witness: str = ""


@dataclass
class SubdiagramReport:
    ok: bool
    conditions: List[ConditionCheck]

    def condition(self, name: str) -> ConditionCheck:
        return next(c for c in self.conditions if c.name == name)


@dataclass
class FaceCheck:
    monomials: List[Exponent]
    status: str  # "ok" | "degenerate" | "unknown"


@dataclass
class NondegeneracyReport:
    verdict: Optional[bool]  # True / False / None (= unknown, budget exhausted)
    faces: List[FaceCheck]
    assumed: bool = False


def _support_points(f: LaurentPoly) -> List[Exponent]:
    if f.is_zero():
        raise DomainError("zero polynomial has no Newton polyhedron")
    if not f.is_x_free():
        raise DomainError("weights are defined by the parameter-free part")
    return sorted(f.support())


def is_commode(f: LaurentPoly) -> CommodeReport:
    """Convenience test: polynomial mode needs a pure power on every axis,
    laurent mode needs the origin strictly inside the polytope."""
    pts = _support_points(f)
    n = f.n
    if f.mode == POLYNOMIAL:
        for i in range(n):
            if not any(p[i] > 0 and all(p[j] == 0 for j in range(n) if j != i)
                       for p in pts):
                return CommodeReport(False, f"no pure power of u{i+1} in the support",
                                     axis=i + 1)
        return CommodeReport(True)
    if _affine_rank(pts) < n:
        return CommodeReport(False, "support is not full-dimensional")
    for c, d in _hull_halfspaces(pts):
        if d <= 0:
            desc = " + ".join(f"{w}*a{k+1}" for k, w in enumerate(c) if w) or "0"
            return CommodeReport(False,
                                 f"origin is not interior: {desc} <= {d} on the polytope",
                                 hyperplane=(c, d))
    return CommodeReport(True)


def build_polyhedron(f: LaurentPoly) -> NewtonPolyhedron:
    """Convex hull of the support (plus the origin in polynomial mode) with
    facet forms normalised to take the value 1 on each Newton-boundary facet."""
    pts = _support_points(f)
    n = f.n
    if f.mode == POLYNOMIAL:
        origin = (0,) * n
        if origin not in pts:
            pts = sorted(pts + [origin])
    if _affine_rank(pts) < n:
        raise HypothesisViolation(
            f"Newton polyhedron is not full-dimensional (support rank < {n})")
    halfspaces = _hull_halfspaces(pts)
    facets: List[Facet] = []
    for c, d in halfspaces:
        if d > 0:
            facets.append(Facet(tuple(Fraction(w, d) for w in c)))
        elif f.mode == LAURENT:
            desc = " + ".join(f"{w}*a{k+1}" for k, w in enumerate(c) if w) or "0"
            raise NotCommode(
                f"origin is not interior to the Newton polytope ({desc} <= {d})")
        # polynomial mode: facets through the origin carry no L_sigma
    if not facets:
        raise HypothesisViolation("no Newton-boundary facet (empty diagram)")
    vertices = []
    for p in pts:
        tight = [c for c, d in halfspaces if _dot([Fraction(x) for x in c], p) == d]
        red = RowReducer(track=False)
        for c in tight:
            red.add({i: Fraction(x) for i, x in enumerate(c) if x})
        if red.rank == n:
            vertices.append(p)
    return NewtonPolyhedron(n=n, mode=f.mode, support=pts,
                            vertices=vertices, facets=facets, halfspaces=halfspaces)


def phi(g: LaurentPoly, P: NewtonPolyhedron) -> WeightReport:
    """Newton weight of g: max over u-monomials and facets of L_sigma(a).

    Parameters are weightless, so g may live over Q[x]; in that case the
    weight is the weight of its u-support.
    """
    if g.is_zero():
        return WeightReport(None)
    best: Optional[Tuple[int, int, Exponent]] = None
    for a in g.support():
        dv = P.dweight(a)
        if best is None or dv > best[0]:
            best = (dv, P.argmax_facet(a), a)
    dv, fi, a = best
    return WeightReport(Fraction(dv, P.weight_denominator), fi, a)


def phi_star(g: LaurentPoly, P: NewtonPolyhedron) -> WeightReport:
    """Shifted weight phi(u1...un * g); polynomial mode only."""
    if P.mode != POLYNOMIAL:
        raise DomainError("phi_star is defined in polynomial mode")
    if g.is_zero():
        return WeightReport(None)
    one = (1,) * P.n
    best: Optional[Tuple[int, int, Exponent]] = None
    for a in g.support():
        shifted = tuple(x + 1 for x in a)
        dv = P.dweight(shifted)
        if best is None or dv > best[0]:
            best = (dv, P.argmax_facet(shifted), a)
    dv, fi, a = best
    return WeightReport(Fraction(dv, P.weight_denominator), fi, a)


def monomial_weight(P: NewtonPolyhedron, a: Exponent) -> Fraction:
    """Basis weight of a single monomial: phi in laurent mode, phi* else."""
    if P.mode == LAURENT:
        return P.weight(a)
    return P.weight(tuple(x + 1 for x in a))


# ---------------------------------------------------------------------------
# Kouchnirenko's Milnor-number oracle
# ---------------------------------------------------------------------------

def _hull_vertices(points: List[Tuple]) -> List[Tuple]:
    n = len(points[0])
    halfspaces = _hull_halfspaces(points)
    verts = []
    for p in points:
        tight = [c for c, d in halfspaces
                 if _dot([Fraction(x) for x in c], p) == d]
        red = RowReducer(track=False)
        for c in tight:
            red.add({i: Fraction(x) for i, x in enumerate(c) if x})
        if red.rank == n:
            verts.append(p)
    return verts


def _triangulate(verts: List[Tuple]) -> List[List[Tuple]]:
    """Combinatorial triangulation of a full-dimensional polytope."""
    n = len(verts[0])
    verts = sorted(set(verts))
    if len(verts) == n + 1:
        return [verts]
    simplices: List[List[Tuple]] = []
    apex = verts[0]
    for c, d in _hull_halfspaces(verts):
        cf = [Fraction(x) for x in c]
        if _dot(cf, apex) == d:
            continue
        tight = [v for v in verts if _dot(cf, v) == d]
        for facet_simplex in _triangulate_affine(tight, n - 1):
            simplices.append([apex] + facet_simplex)
    return simplices


def _triangulate_affine(pts: List[Tuple], dim: int) -> List[List[Tuple]]:
    """Triangulate points of affine dimension dim inside a larger ambient."""
    pts = sorted(set(pts))
    if dim == 0:
        return [[pts[0]]]
    base = pts[0]
    red = RowReducer(track=True)
    axes: List[Tuple] = []
    for p in pts[1:]:
        vec = {i: Fraction(x - y) for i, (x, y) in enumerate(zip(p, base)) if x != y}
        if red.add(vec, tag=len(axes)) is not None:
            axes.append(p)
        if len(axes) == dim:
            break
    coords: Dict[Tuple, Tuple] = {}
    for p in pts:
        vec = {i: Fraction(x - y) for i, (x, y) in enumerate(zip(p, base)) if x != y}
        residual, combo = red.reduce(vec)
        if residual:
            raise HypothesisViolation("face points exceed declared dimension")
        coords[p] = tuple(combo.get(k, Fraction(0)) for k in range(dim))
    back = {v: p for p, v in coords.items()}
    return [[back[v] for v in simplex]
            for simplex in _triangulate(sorted(coords.values()))]


def _normalized_volume(points: List[Tuple]) -> int:
    """k! times the Euclidean volume of conv(points) in Z^k (0 if flat)."""
    points = sorted(set(tuple(p) for p in points))
    if not points:
        return 0
    k = len(points[0])
    if k == 0:
        return 1
    if _affine_rank(points) < k:
        return 0
    verts = _hull_vertices(points)
    total = 0
    for simplex in _triangulate(verts):
        base = simplex[0]
        mat = [[Fraction(x - y) for x, y in zip(v, base)] for v in simplex[1:]]
        total += abs(rmat_det(mat))
    assert total == int(total)
    return int(total)


def newton_number(P: NewtonPolyhedron) -> int:
    """Kouchnirenko's formula: n!*vol in laurent mode, the alternating sum
    over coordinate-subspace sections in polynomial mode."""
    if P.mode == LAURENT:
        return _normalized_volume(P.vertices)
    n = P.n
    total = 0
    for k in range(n + 1):
        for subset in combinations(range(n), k):
            if k == 0:
                vol = 1
            else:
                section = [tuple(p[i] for i in subset) for p in P.support
                           if all(p[j] == 0 for j in range(n) if j not in subset)]
                vol = _normalized_volume(section)
            total += (-1) ** (n - k) * vol
    if total < 0:
        raise HypothesisViolation("negative Newton number: polytope is not commode")
    return total


# ---------------------------------------------------------------------------
# Sub-diagram test
# ---------------------------------------------------------------------------

def is_subdiagram(g: LaurentPoly, P: NewtonPolyhedron) -> SubdiagramReport:
    """Strict sub-diagram conditions for a deformation term.

    Laurent mode: phi(g) < 1.  Polynomial mode additionally checks the
    division-compatibility bound phi(dg/du_i) < 1 - phi(u_i) for every i,
    and reports (informationally) the stronger injectivity bound
    phi*(g) < 1 - phi(u_i).
    """
    checks: List[ConditionCheck] = []
    w = phi(g, P)
    one = Fraction(1)
    ok_phi = (not w.is_bottom) and w.value < one or w.is_bottom
    checks.append(ConditionCheck(
        "phi<1", ok_phi, w.value, one,
        witness=f"monomial {w.monomial}" if w.monomial is not None else ""))
    overall = ok_phi
    if P.mode == POLYNOMIAL and not g.is_zero():
        worst: Optional[Tuple[Fraction, Fraction, int]] = None
        ok_der = True
        for i in range(P.n):
            dg = g.partial_derivative(i)
            if dg.is_zero():
                continue
            lhs = phi(dg, P).value
            rhs = one - P.weight(tuple(1 if j == i else 0 for j in range(P.n)))
            if worst is None or lhs - rhs > worst[0] - worst[1]:
                worst = (lhs, rhs, i)
            if lhs >= rhs:
                ok_der = False
        if worst is None:
            checks.append(ConditionCheck("derivative", True, witness="g is constant"))
        else:
            lhs, rhs, i = worst
            checks.append(ConditionCheck("derivative", ok_der, lhs, rhs,
                                         witness=f"d/du{i+1}"))
        overall = overall and ok_der
        ws = phi_star(g, P)
        max_wu = max(P.weight(tuple(1 if j == i else 0 for j in range(P.n)))
                     for i in range(P.n))
        checks.append(ConditionCheck("strong", ws.value < one - max_wu,
                                     ws.value, one - max_wu,
                                     witness="phi*(g) vs 1 - max phi(u_i)"))
    return SubdiagramReport(overall, checks)


# ---------------------------------------------------------------------------
# Nondegeneracy
# ---------------------------------------------------------------------------

def _boundary_faces(P: NewtonPolyhedron) -> List[FrozenSet[Exponent]]:
    """Closed faces of the Newton boundary as support subsets."""
    support = [p for p in P.support if any(p)]
    tight_sets = []
    for c, d in P.halfspaces:
        cf = [Fraction(x) for x in c]
        tight_sets.append(frozenset(p for p in support if _dot(cf, p) == d))
    newton = [frozenset(p for p in support
                        if _dot(f.normal, p) == 1) for f in P.facets]
    faces = set(s for s in newton if s)
    frontier = set(faces)
    while frontier:
        nxt = set()
        for face in frontier:
            for t in tight_sets:
                sub = face & t
                if sub and sub not in faces:
                    faces.add(sub)
                    nxt.add(sub)
        frontier = nxt
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def _face_part(f: LaurentPoly, face: FrozenSet[Exponent]) -> LaurentPoly:
    terms = {a: dict(pc) for a, pc in f.terms.items() if a in face}
    return LaurentPoly(f.n, f.r, f.mode, terms, _canonical=True)


def _torus_critical_free(face_poly: LaurentPoly, budget: int) -> Optional[bool]:
    """True if the face part has no critical point on the torus (i.e. the
    saturated face-Jacobian ideal contains 1); None if the budget ran out."""
    n = face_poly.n
    gens = []
    for i in range(n):
        d = face_poly.log_derivative(i)
        if not d.is_zero():
            gens.append(d)
    aux: List[Dict[Tuple[int, ...], Fraction]] = []
    for g in gens:
        shift = [min(0, min(a[i] for a in g.support())) for i in range(n)]
        poly = {tuple(a[i] - shift[i] for i in range(n)) + (0,): c
                for a, pc in g.terms.items() for _, c in pc.items()}
        aux.append(poly)
    relation = {tuple([1] * n + [1]): Fraction(1), (0,) * (n + 1): Fraction(-1)}
    aux.append(relation)
    order = MonomialOrder(n + 1)
    try:
        result = buchberger(aux, order, budget=budget)
    except BudgetExceeded:
        return None
    return contains_unit(result)


def is_nondegenerate(f: LaurentPoly, P: Optional[NewtonPolyhedron] = None,
                     budget: int = DEFAULT_BUDGET) -> NondegeneracyReport:
    """Check that every face part of f is critical-point free on the torus.

    Budget exhaustion on a face yields verdict None ("unknown"), never a
    wrong boolean.
    """
    if P is None:
        P = build_polyhedron(f)
    faces = _boundary_faces(P)
    checks: List[FaceCheck] = []
    verdict: Optional[bool] = True
    for face in faces:
        res = _torus_critical_free(_face_part(f, face), budget)
        if res is None:
            status = "unknown"
            if verdict is True:
                verdict = None
        elif res:
            status = "ok"
        else:
            status = "degenerate"
            verdict = False
        checks.append(FaceCheck(sorted(face), status))
    return NondegeneracyReport(verdict, checks)
