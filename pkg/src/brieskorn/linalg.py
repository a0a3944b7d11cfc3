"""Exact linear algebra over Q and over Q[x].

Two layers live here:

* ``RowReducer`` — an incremental Gaussian eliminator over Q for sparse
  vectors keyed by arbitrary orderable column keys, tracking for every
  stored row the exact combination of the vectors that were fed in.  It
  backs the weight-level division solver, rank computations and the
  Krylov closure.

* ``pm_*`` helpers — dense mu x mu matrices whose entries are Q[x]
  coefficients (``ParamCoeff`` dicts), plus plain-Fraction matrix
  utilities.  Everything stays exact; nothing here ever touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .polyring import (
    ParamCoeff,
    pc_add,
    pc_const,
    pc_dx,
    pc_eval,
    pc_mul,
    pc_neg,
    pc_scale,
)

Vec = Dict[Hashable, Fraction]
Combo = Dict[Hashable, Fraction]


def vec_axpy(target: Vec, c: Fraction, source: Vec) -> None:
    """target += c * source, dropping cancellations (in place)."""
    if not c:
        return
    for k, v in source.items():
        s = target.get(k, Fraction(0)) + c * v
        if s:
            target[k] = s
        else:
            target.pop(k, None)


class RowReducer:
    """Incremental row echelon form with combination tracking.

    Rows are reduced against each other so that each stored row has a
    unique pivot: the smallest column key (under the natural ordering of
    the keys) with a nonzero entry, normalised to coefficient 1.  Feeding
    vectors in a fixed order makes pivots deterministic: earlier column
    keys are consumed as pivots first, later keys survive as "free"
    columns.
    """

    def __init__(self, track: bool = True):
        self.track = track
        # pivot key -> (row vector, combination over fed tags)
        self.rows: Dict[Hashable, Tuple[Vec, Combo]] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> List[Hashable]:
        return sorted(self.rows.keys())

    def reduce(self, vec: Vec) -> Tuple[Vec, Combo]:
        """Return (residual, combo) with  vec == residual + sum combo[t]*fed[t]."""
        residual: Vec = dict(vec)
        combo: Combo = {}
        while True:
            hit = None
            for key in residual:
                if key in self.rows:
                    if hit is None or key < hit:
                        hit = key
            if hit is None:
                return residual, combo
            row, row_combo = self.rows[hit]
            c = residual[hit]
            vec_axpy(residual, -c, row)
            if self.track:
                for t, cv in row_combo.items():
                    s = combo.get(t, Fraction(0)) + c * cv
                    if s:
                        combo[t] = s
                    else:
                        combo.pop(t, None)

    def add(self, vec: Vec, tag: Hashable = None) -> Optional[Hashable]:
        """Feed a vector; return its pivot key, or None if dependent."""
        residual, combo = self.reduce(vec)
        if not residual:
            return None
        pivot = min(residual.keys())
        c = residual[pivot]
        row = {k: v / c for k, v in residual.items()}
        if self.track:
            row_combo: Combo = {t: -cv / c for t, cv in combo.items()}
            if tag is not None:
                row_combo[tag] = row_combo.get(tag, Fraction(0)) + 1 / c
        else:
            row_combo = {}
        # keep earlier rows reduced against the new pivot
        for key, (orow, ocombo) in list(self.rows.items()):
            if pivot in orow:
                oc = orow[pivot]
                vec_axpy(orow, -oc, row)
                if self.track:
                    for t, cv in row_combo.items():
                        s = ocombo.get(t, Fraction(0)) - oc * cv
                        if s:
                            ocombo[t] = s
                        else:
                            ocombo.pop(t, None)
        self.rows[pivot] = (row, row_combo)
        return pivot


# ---------------------------------------------------------------------------
# Fraction matrices (dense, small)
# ---------------------------------------------------------------------------

RMatrix = List[List[Fraction]]


def rmat_identity(m: int) -> RMatrix:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(m)] for i in range(m)]


def rmat_mul(a: RMatrix, b: RMatrix) -> RMatrix:
    m, k, n2 = len(a), len(b), len(b[0])
    out = [[Fraction(0)] * n2 for _ in range(m)]
    for i in range(m):
        for t in range(k):
            c = a[i][t]
            if c:
                row = b[t]
                orow = out[i]
                for j in range(n2):
                    if row[j]:
                        orow[j] += c * row[j]
    return out


def rmat_vec(a: RMatrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((c * x for c, x in zip(row, v) if c and x), Fraction(0)) for row in a]


def rmat_rank(a: RMatrix) -> int:
    red = RowReducer(track=False)
    for row in a:
        red.add({j: c for j, c in enumerate(row) if c})
    return red.rank


def rmat_det(a: RMatrix) -> Fraction:
    m = [row[:] for row in a]
    k = len(m)
    det = Fraction(1)
    for col in range(k):
        piv = next((i for i in range(col, k) if m[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for i in range(col + 1, k):
            if m[i][col]:
                c = m[i][col] * inv
                for j in range(col, k):
                    m[i][j] -= c * m[col][j]
    return det


def rmat_inverse(a: RMatrix) -> Optional[RMatrix]:
    k = len(a)
    m = [row[:] + ident_row for row, ident_row in zip(a, rmat_identity(k))]
    for col in range(k):
        piv = next((i for i in range(col, k) if m[i][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [c * inv for c in m[col]]
        for i in range(k):
            if i != col and m[i][col]:
                c = m[i][col]
                m[i] = [x - c * y for x, y in zip(m[i], m[col])]
    return [row[k:] for row in m]


# ---------------------------------------------------------------------------
# Matrices over Q[x] (entries are ParamCoeff dicts)
# ---------------------------------------------------------------------------

PMatrix = List[List[ParamCoeff]]


def pm_zero(m: int) -> PMatrix:
    return [[{} for _ in range(m)] for _ in range(m)]


def pm_identity(m: int, r: int) -> PMatrix:
    return [[pc_const(1 if i == j else 0, r) for j in range(m)] for i in range(m)]


def pm_from_rational(a: RMatrix, r: int) -> PMatrix:
    return [[pc_const(c, r) for c in row] for row in a]


def pm_add(a: PMatrix, b: PMatrix) -> PMatrix:
    return [[pc_add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pm_sub(a: PMatrix, b: PMatrix) -> PMatrix:
    return [[pc_add(x, pc_neg(y)) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def pm_neg(a: PMatrix) -> PMatrix:
    return [[pc_neg(x) for x in row] for row in a]


def pm_scale(a: PMatrix, c: Fraction) -> PMatrix:
    return [[pc_scale(x, c) for x in row] for row in a]


def pm_mul(a: PMatrix, b: PMatrix) -> PMatrix:
    m = len(a)
    out = pm_zero(m)
    for i in range(m):
        for t in range(m):
            c = a[i][t]
            if c:
                for j in range(m):
                    if b[t][j]:
                        out[i][j] = pc_add(out[i][j], pc_mul(c, b[t][j]))
    return out


def pm_dx(a: PMatrix, j: int) -> PMatrix:
    return [[pc_dx(x, j) for x in row] for row in a]


def pm_eval(a: PMatrix, point: Sequence[Fraction]) -> RMatrix:
    return [[pc_eval(x, point) for x in row] for row in a]


def pm_is_zero(a: PMatrix) -> bool:
    return all(not x for row in a for x in row)


def pm_eq(a: PMatrix, b: PMatrix) -> bool:
    return pm_is_zero(pm_sub(a, b))


def pm_commutator(a: PMatrix, b: PMatrix) -> PMatrix:
    return pm_sub(pm_mul(a, b), pm_mul(b, a))


def pm_anti_transpose(a: PMatrix) -> PMatrix:
    """Reflection across the antidiagonal: out[i][j] = a[m-1-j][m-1-i]."""
    m = len(a)
    return [[a[m - 1 - j][m - 1 - i] for j in range(m)] for i in range(m)]


def pm_x_degree(a: PMatrix) -> int:
    return max((sum(k) for row in a for pc in row for k in pc), default=-1)


def pm_degree_slice(a: PMatrix, d: int) -> PMatrix:
    """Terms of total x-degree exactly d."""
    return [[{k: v for k, v in pc.items() if sum(k) == d} for pc in row] for row in a]


def pm_is_constant(a: PMatrix) -> bool:
    return pm_x_degree(a) <= 0


def pm_permute(a: PMatrix, perm: Sequence[int]) -> PMatrix:
    """Reindex basis positions: out[i][j] = a[perm[i]][perm[j]]."""
    return [[a[pi][pj] for pj in perm] for pi in perm]


def pm_constant_part(a: PMatrix) -> RMatrix:
    out = []
    for row in a:
        orow = []
        for pc in row:
            val = Fraction(0)
            for k, v in pc.items():
                if not any(k):
                    val += v
            orow.append(val)
        out.append(orow)
    return out
