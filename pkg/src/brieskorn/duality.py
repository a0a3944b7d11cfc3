"""Residue pairing on the Milnor algebra, T-symmetry and orthonormalisation.

The pairing is computed by the socle-coefficient method: with a unique
top-weight basis class (the socle), S_kl is the socle coefficient of the
normal form of m_k * m_l at parameter value zero, normalised so that the
pairing of the bottom class with the socle is 1.  Weight orthogonality
(S_kl = 0 unless weight_k + weight_l = n) is checked, not assumed; a
violation flags the method as inapplicable for the input.

T-symmetry is transposition across the antidiagonal; for a weight-sorted
basis it expresses self-adjointness of the connection matrices for S.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .connection import ConnectionData
from .errors import DomainError, HypothesisViolation
from .jacobi import DivisionEngine, MilnorBasis
from .linalg import (
    PMatrix,
    RMatrix,
    pm_add,
    pm_anti_transpose,
    pm_identity,
    pm_is_zero,
    pm_permute,
    pm_scale,
    pm_sub,
    rmat_det,
    rmat_identity,
    rmat_inverse,
    rmat_mul,
)
from .polyring import LaurentPoly


@dataclass
class PairingMatrix:
    S: RMatrix
    socle_index: int
    normalization: Fraction
    weight_orthogonal: bool
    nondegenerate: bool
    weights: List[Fraction]
    n: int


class SocleUnavailable(DomainError):
    """Top spectral weight is attained more than once."""


def socle(basis: MilnorBasis) -> int:
    """Index of the unique maximal-weight basis element."""
    top = max(basis.weights)
    hits = [k for k, w in enumerate(basis.weights) if w == top]
    if len(hits) != 1:
        raise SocleUnavailable(
            f"maximal weight {top} is attained {len(hits)} times; "
            "the socle-coefficient pairing is unavailable")
    return hits[0]


def residue_pairing(basis: MilnorBasis, engine: DivisionEngine) -> PairingMatrix:
    """S_kl = socle coefficient of NF(m_k * m_l), top value normalised to 1."""
    soc = socle(basis)
    mu = basis.mu
    n = engine.n
    S: RMatrix = [[Fraction(0)] * mu for _ in range(mu)]
    for k in range(mu):
        mk = LaurentPoly.monomial(basis.monomials[k], engine.n, 0, engine.mode)
        for l in range(k, mu):
            ml = LaurentPoly.monomial(basis.monomials[l], engine.n, 0, engine.mode)
            coords = engine.nf(mk * ml)
            pc = coords[soc]
            val = sum(pc.values(), Fraction(0))
            S[k][l] = val
            S[l][k] = val
    bottom = min(range(mu), key=lambda k: (basis.weights[k], k))
    norm = S[bottom][soc]
    if norm == 0:
        raise SocleUnavailable(
            "bottom class does not pair with the socle; the socle-coefficient "
            "method is degenerate here")
    if norm != 1:
        S = [[v / norm for v in row] for row in S]
    ortho = all(S[k][l] == 0
                for k in range(mu) for l in range(mu)
                if basis.weights[k] + basis.weights[l] != n)
    nondeg = rmat_det(S) != 0
    return PairingMatrix(S, soc, norm, ortho, nondeg, list(basis.weights), n)


@dataclass
class TSymmetryReport:
    B0_residual: PMatrix
    Binf_residual: PMatrix
    C_residuals: List[PMatrix]

    @property
    def ok(self) -> bool:
        return pm_is_zero(self.B0_residual) and pm_is_zero(self.Binf_residual) \
            and all(pm_is_zero(m) for m in self.C_residuals)


def check_T_symmetry(conn: ConnectionData,
                     order: Optional[Sequence[int]] = None) -> TSymmetryReport:
    """Exact residuals of T B0 = B0, B_inf + T B_inf = n Id, T C^i = C^i.

    ``order`` permutes the basis positions first (unit tests feed a
    scrambled order as a negative control); the identities require the
    weight-sorted order.
    """
    mu = conn.mu
    n = conn.system.n
    B0, Binf, Cs = conn.B0, conn.Binf, conn.C
    if order is not None:
        if sorted(order) != list(range(mu)):
            raise DomainError("order must be a permutation of the basis")
        B0 = pm_permute(B0, order)
        Binf = pm_permute(Binf, order)
        Cs = [pm_permute(c, order) for c in Cs]
    n_id = pm_scale(pm_identity(mu, conn.r), Fraction(n))
    return TSymmetryReport(
        B0_residual=pm_sub(pm_anti_transpose(B0), B0),
        Binf_residual=pm_sub(pm_add(Binf, pm_anti_transpose(Binf)), n_id),
        C_residuals=[pm_sub(pm_anti_transpose(c), c) for c in Cs],
    )


@dataclass
class OrthonormalizeResult:
    achieved: bool
    transform: Optional[RMatrix]          # basis-change Q, weight-homogeneous
    obstruction: Optional[List[Fraction]]  # middle-block diagonal if stuck
    message: str = ""


def _block_indices(weights: Sequence[Fraction]) -> Dict[Fraction, List[int]]:
    blocks: Dict[Fraction, List[int]] = {}
    for k, w in enumerate(weights):
        blocks.setdefault(w, []).append(k)
    return blocks


def _sym_diagonalize(M: RMatrix) -> Tuple[RMatrix, List[Fraction]]:
    """Congruence diagonalisation of a symmetric matrix over Q: returns
    (Q, diag) with Q^T M Q = diag(diag)."""
    k = len(M)
    A = [row[:] for row in M]
    Q = rmat_identity(k)
    for i in range(k):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, k) if A[j][j] != 0), None)
            if j is not None:
                # swap basis vectors i and j
                A[i], A[j] = A[j], A[i]
                for row in A:
                    row[i], row[j] = row[j], row[i]
                for row in Q:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, k) if A[i][j] != 0), None)
                if j is None:
                    continue
                # add vector j to vector i to create a diagonal entry
                for t in range(k):
                    A[i][t] += A[j][t]
                for t in range(k):
                    A[t][i] += A[t][j]
                for t in range(k):
                    Q[t][i] += Q[t][j]
        if A[i][i] == 0:
            continue
        for j in range(i + 1, k):
            if A[i][j]:
                c = A[i][j] / A[i][i]
                for t in range(k):
                    A[j][t] -= c * A[i][t]
                for t in range(k):
                    A[t][j] -= c * A[t][i]
                for t in range(k):
                    Q[t][j] -= c * Q[t][i]
    return Q, [A[i][i] for i in range(k)]


def _is_square(x: Fraction) -> Optional[Fraction]:
    if x <= 0:
        return None
    from math import isqrt
    pn, pd = isqrt(x.numerator), isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


def _middle_block_transform(M: RMatrix) -> Tuple[Optional[RMatrix], Optional[List[Fraction]]]:
    """Bring a symmetric block to the exchange (antidiagonal identity)
    form over Q when rationally possible; otherwise report the
    congruence-diagonal obstruction."""
    k = len(M)
    exchange = [[Fraction(1) if i + j == k - 1 else Fraction(0) for j in range(k)]
                for i in range(k)]
    if M == exchange:
        return rmat_identity(k), None
    # hyperbolic extraction with easily found rational isotropic vectors
    pairs: List[Tuple[List[Fraction], List[Fraction]]] = []
    center: Optional[List[Fraction]] = None

    def bil(u: List[Fraction], v: List[Fraction]) -> Fraction:
        return sum(u[a] * M[a][b] * v[b] for a in range(k) for b in range(k)
                   if u[a] and v[b])

    remaining = [[Fraction(1) if t == s else Fraction(0) for s in range(k)]
                 for t in range(k)]

    def orth_complement(vs: List[List[Fraction]], u: List[Fraction],
                        v: List[Fraction]) -> List[List[Fraction]]:
        out = []
        for w in vs:
            bu, bv = bil(w, u), bil(w, v)
            # subtract components along the hyperbolic pair (B(u,v)=1)
            w2 = [w[t] - bv * u[t] - bu * v[t] for t in range(k)]
            if any(w2):
                out.append(w2)
        return out

    def find_isotropic(vs: List[List[Fraction]]) -> Optional[List[Fraction]]:
        for w in vs:
            if bil(w, w) == 0:
                return w
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                u, v = vs[a], vs[b]
                quu, quv, qvv = bil(u, u), bil(u, v), bil(v, v)
                # solve q(u + t v) = 0 for rational t
                if qvv == 0:
                    continue
                disc = quv * quv - quu * qvv
                root = _is_square(disc) if disc > 0 else (Fraction(0) if disc == 0 else None)
                if root is None:
                    continue
                t = (-quv + root) / qvv
                cand = [u[s] + t * v[s] for s in range(k)]
                if any(cand):
                    return cand
        return None

    while len(remaining) >= 2:
        iso = find_isotropic(remaining)
        if iso is None:
            break
        mate = next((w for w in remaining if bil(iso, w) != 0), None)
        if mate is None:
            break
        c = bil(iso, mate)
        mate = [x / c for x in mate]
        # make the mate isotropic too: v' = v - q(v)/2 * u
        qv = bil(mate, mate)
        mate = [mate[t] - qv / 2 * iso[t] for t in range(k)]
        pairs.append((iso, mate))
        remaining = orth_complement(remaining, iso, mate)
    if len(remaining) == 1 and k % 2 == 1:
        w = remaining[0]
        c = bil(w, w)
        root = _is_square(c)
        if root is not None:
            center = [x / root for x in w]
            remaining = []
    if remaining:
        _, diag = _sym_diagonalize(M)
        return None, [d for d in diag]
    cols: List[List[Fraction]] = [None] * k  # type: ignore[list-item]
    for a, (u, v) in enumerate(pairs):
        cols[a] = u
        cols[k - 1 - a] = v
    if center is not None:
        cols[k // 2] = center
    Q = [[cols[j][i] for j in range(k)] for i in range(k)]
    check = rmat_mul([[Q[a][i] for a in range(k)] for i in range(k)],
                     rmat_mul(M, Q))
    if check != exchange:
        _, diag = _sym_diagonalize(M)
        return None, diag
    return Q, None


def orthonormalize(basis: MilnorBasis, pairing: PairingMatrix) -> OrthonormalizeResult:
    """Weight-homogeneous basis change making S the antidiagonal identity.

    Cross-weight block pairs are always solvable over Q; the middle block
    may carry a square-root obstruction, reported as the congruence
    diagonal instead of extending the field.
    """
    if not pairing.nondegenerate:
        return OrthonormalizeResult(False, None, None, "pairing is degenerate")
    weights = pairing.weights
    mu = len(weights)
    n = pairing.n
    S = pairing.S
    if not pairing.weight_orthogonal:
        return OrthonormalizeResult(False, None, None,
                                    "pairing is not weight-orthogonal")
    blocks = _block_indices(weights)
    Q: RMatrix = rmat_identity(mu)
    for w, rows in sorted(blocks.items()):
        dual = Fraction(n) - w
        if dual not in blocks:
            return OrthonormalizeResult(False, None, None,
                                        f"weight {w} has no dual block")
        cols = blocks[dual]
        if len(cols) != len(rows):
            return OrthonormalizeResult(False, None, None,
                                        f"dual blocks of weight {w} differ in size")
        if w > dual:
            continue
        k = len(rows)
        # S block between rows (ascending) and the dual block in reversed
        # order, so the target is the identity on these indices
        M = [[S[rows[a]][cols[k - 1 - b]] for b in range(k)] for a in range(k)]
        if w < dual:
            Minv = rmat_inverse(M)
            if Minv is None:
                return OrthonormalizeResult(False, None, None,
                                            f"singular block at weight {w}")
            # change basis on the dual block only: columns cols[k-1-b]
            for b in range(k):
                for a in range(k):
                    Q[cols[k - 1 - a]][cols[k - 1 - b]] = Minv[a][b]
        else:
            # middle block: reorder to natural ascending indices
            Mm = [[S[rows[a]][rows[b]] for b in range(k)] for a in range(k)]
            T, obstruction = _middle_block_transform(Mm)
            if T is None:
                return OrthonormalizeResult(
                    False, None, obstruction,
                    "middle weight block needs square roots over Q")
            for b in range(k):
                for a in range(k):
                    Q[rows[a]][rows[b]] = T[a][b]
    # exact verification: Q^T S Q must be the exchange matrix
    QT = [[Q[a][i] for a in range(mu)] for i in range(mu)]
    final = rmat_mul(QT, rmat_mul(S, Q))
    exchange = [[Fraction(1) if i + j == mu - 1 else Fraction(0)
                 for j in range(mu)] for i in range(mu)]
    if final != exchange:
        return OrthonormalizeResult(False, None, None,
                                    "verification failed: result is not the "
                                    "antidiagonal identity")
    return OrthonormalizeResult(True, Q, None, "")
