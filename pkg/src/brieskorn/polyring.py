"""Exact sparse multivariate (Laurent) polynomial arithmetic over the rationals.

A polynomial lives in Q[x1..xr][u1..un] (mode ``"polynomial"``) or in
Q[x1..xr][u1..un, u1^-1..un^-1] (mode ``"laurent"``).  It is stored as a
two-level dictionary::

    terms : { u-exponent tuple -> { x-exponent tuple -> Fraction } }

u-exponents may be negative in laurent mode only; x-exponents are always
>= 0.  Zero coefficients are never stored, so structural equality is
polynomial equality.  Values are immutable by convention: every operation
returns a fresh object and nothing mutates ``terms`` after construction.

The module also owns the expression grammar used by the CLI and the
reports: terms separated by ``+``/``-``, each term an optional rational
coefficient (``3`` or ``4/25``) times factors ``u<k>^<e>`` / ``x<k>^<e>``
joined by ``*`` (the ``*`` is optional before a variable), whitespace
insignificant.  Printing is canonical and ``parse(str(p)) == p``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import DomainError, ParseError

Rational = Fraction
Exponent = Tuple[int, ...]
# Coefficient polynomial in the deformation parameters x.
ParamCoeff = Dict[Exponent, Fraction]

LAURENT = "laurent"
POLYNOMIAL = "polynomial"
MODES = (LAURENT, POLYNOMIAL)


# ---------------------------------------------------------------------------
# ParamCoeff helpers (plain dicts; shared with the matrix layer)
# ---------------------------------------------------------------------------

def pc_zero() -> ParamCoeff:
    return {}


def pc_const(c: Fraction | int, r: int) -> ParamCoeff:
    c = Fraction(c)
    return {(0,) * r: c} if c else {}


def pc_add(a: ParamCoeff, b: ParamCoeff) -> ParamCoeff:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, Fraction(0)) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def pc_neg(a: ParamCoeff) -> ParamCoeff:
    return {k: -v for k, v in a.items()}

def pc_scale(a: ParamCoeff, c: Fraction) -> ParamCoeff:
    if not c:
        return {}
    return {k: v * c for k, v in a.items()}


def pc_mul(a: ParamCoeff, b: ParamCoeff) -> ParamCoeff:
    out: ParamCoeff = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            s = out.get(k, Fraction(0)) + va * vb
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def pc_dx(a: ParamCoeff, j: int) -> ParamCoeff:
    """Partial derivative with respect to the parameter x_{j+1}."""
    out: ParamCoeff = {}
    for k, v in a.items():
        if k[j]:
            nk = k[:j] + (k[j] - 1,) + k[j + 1:]
            s = out.get(nk, Fraction(0)) + v * k[j]
            if s:
                out[nk] = s
            else:
                out.pop(nk, None)
    return out


def pc_eval(a: ParamCoeff, point: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for k, v in a.items():
        term = v
        for e, p in zip(k, point):
            if e:
                term *= Fraction(p) ** e
        total += term
    return total


def pc_degree(a: ParamCoeff) -> int:
    """Total x-degree (-1 for the zero coefficient)."""
    return max((sum(k) for k in a), default=-1)


# ---------------------------------------------------------------------------
# LaurentPoly
# ---------------------------------------------------------------------------

class LaurentPoly:
    """Sparse exact polynomial in u-variables with Q[x] coefficients."""

    __slots__ = ("n", "r", "mode", "terms")

    def __init__(self, n: int, r: int, mode: str,
                 terms: Dict[Exponent, ParamCoeff] | None = None,
                 _canonical: bool = False):
        if mode not in MODES:
            raise DomainError(f"unknown mode {mode!r}")
        self.n = n
        self.r = r
        self.mode = mode
        if terms is None:
            terms = {}
        if not _canonical:
            terms = self._canon(terms)
        self.terms = terms

    def _canon(self, terms: Dict[Exponent, ParamCoeff]) -> Dict[Exponent, ParamCoeff]:
        out: Dict[Exponent, ParamCoeff] = {}
        for ue, pc in terms.items():
            if len(ue) != self.n:
                raise DomainError("u-exponent length does not match n")
            if self.mode == POLYNOMIAL and any(e < 0 for e in ue):
                raise DomainError("negative u-exponent in polynomial mode")
            clean = {xe: c for xe, c in pc.items() if c}
            for xe in clean:
                if len(xe) != self.r or any(e < 0 for e in xe):
                    raise DomainError("bad x-exponent")
            if clean:
                out[ue] = clean
        return out

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int, r: int, mode: str) -> "LaurentPoly":
        return cls(n, r, mode, {}, _canonical=True)

    @classmethod
    def constant(cls, c: Fraction | int, n: int, r: int, mode: str) -> "LaurentPoly":
        c = Fraction(c)
        if not c:
            return cls.zero(n, r, mode)
        return cls(n, r, mode, {(0,) * n: {(0,) * r: c}}, _canonical=True)

    @classmethod
    def monomial(cls, uexp: Sequence[int], n: int, r: int, mode: str,
                 coeff: Fraction | int = 1,
                 xexp: Sequence[int] | None = None) -> "LaurentPoly":
        c = Fraction(coeff)
        if not c:
            return cls.zero(n, r, mode)
        xe = tuple(xexp) if xexp is not None else (0,) * r
        return cls(n, r, mode, {tuple(uexp): {xe: c}})

    # -- basic structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> List[Exponent]:
        """u-exponents carrying a nonzero coefficient."""
        return list(self.terms.keys())

    def coefficient(self, uexp: Sequence[int]) -> ParamCoeff:
        return dict(self.terms.get(tuple(uexp), {}))

    def is_x_free(self) -> bool:
        zero = (0,) * self.r
        return all(set(pc) == {zero} for pc in self.terms.values())

    def x_degree(self) -> int:
        return max((sum(xe) for pc in self.terms.values() for xe in pc), default=-1)

    def rational_coefficient(self, uexp: Sequence[int]) -> Fraction:
        """Constant-in-x coefficient of a u-monomial (requires x-free term)."""
        pc = self.terms.get(tuple(uexp), {})
        if not pc:
            return Fraction(0)
        if set(pc) != {(0,) * self.r}:
            raise DomainError("coefficient depends on the parameters")
        return pc[(0,) * self.r]

    def _compat(self, other: "LaurentPoly") -> None:
        if (self.n, self.r, self.mode) != (other.n, other.r, other.mode):
            raise DomainError(
                f"ring mismatch: ({self.n},{self.r},{self.mode}) vs "
                f"({other.n},{other.r},{other.mode})")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._compat(other)
        out = {ue: dict(pc) for ue, pc in self.terms.items()}
        for ue, pc in other.terms.items():
            merged = pc_add(out.get(ue, {}), pc)
            if merged:
                out[ue] = merged
            else:
                out.pop(ue, None)
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def __neg__(self) -> "LaurentPoly":
        out = {ue: pc_neg(pc) for ue, pc in self.terms.items()}
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._compat(other)
        out: Dict[Exponent, ParamCoeff] = {}
        for ua, pa in self.terms.items():
            for ub, pb in other.terms.items():
                ue = tuple(a + b for a, b in zip(ua, ub))
                merged = pc_add(out.get(ue, {}), pc_mul(pa, pb))
                if merged:
                    out[ue] = merged
                else:
                    out.pop(ue, None)
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def scale(self, c: Fraction | int) -> "LaurentPoly":
        c = Fraction(c)
        if not c:
            return LaurentPoly.zero(self.n, self.r, self.mode)
        out = {ue: pc_scale(pc, c) for ue, pc in self.terms.items()}
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def shift(self, uexp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial u^uexp."""
        sh = tuple(uexp)
        out = {tuple(a + b for a, b in zip(ue, sh)): dict(pc)
               for ue, pc in self.terms.items()}
        return LaurentPoly(self.n, self.r, self.mode, out)

    def times_param(self, j: int) -> "LaurentPoly":
        """Multiply by the parameter x_{j+1}."""
        out: Dict[Exponent, ParamCoeff] = {}
        for ue, pc in self.terms.items():
            out[ue] = {xe[:j] + (xe[j] + 1,) + xe[j + 1:]: c for xe, c in pc.items()}
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return (self.n, self.r, self.mode) == (other.n, other.r, other.mode) \
            and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    # -- calculus ------------------------------------------------------------

    def log_derivative(self, i: int) -> "LaurentPoly":
        """u_i * d/du_i: scales each term by its i-th exponent (0-based i)."""
        if not 0 <= i < self.n:
            raise DomainError(f"variable index {i} out of range")
        out: Dict[Exponent, ParamCoeff] = {}
        for ue, pc in self.terms.items():
            if ue[i]:
                out[ue] = pc_scale(pc, Fraction(ue[i]))
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def partial_derivative(self, i: int) -> "LaurentPoly":
        """Ordinary d/du_i; polynomial mode only (use log_derivative on tori)."""
        if self.mode != POLYNOMIAL:
            raise DomainError("partial_derivative requires polynomial mode")
        if not 0 <= i < self.n:
            raise DomainError(f"variable index {i} out of range")
        out: Dict[Exponent, ParamCoeff] = {}
        for ue, pc in self.terms.items():
            if ue[i]:
                ne = ue[:i] + (ue[i] - 1,) + ue[i + 1:]
                merged = pc_add(out.get(ne, {}), pc_scale(pc, Fraction(ue[i])))
                if merged:
                    out[ne] = merged
                else:
                    out.pop(ne, None)
        return LaurentPoly(self.n, self.r, self.mode, out, _canonical=True)

    def substitute_params(self, point: Sequence[Fraction | int]) -> "LaurentPoly":
        """Evaluate every coefficient at a parameter point; result has r = 0."""
        if len(point) != self.r:
            raise DomainError(f"expected {self.r} parameter values, got {len(point)}")
        pt = [Fraction(p) for p in point]
        out: Dict[Exponent, ParamCoeff] = {}
        for ue, pc in self.terms.items():
            val = pc_eval(pc, pt)
            if val:
                out[ue] = {(): val}
        return LaurentPoly(self.n, 0, self.mode, out, _canonical=True)

    # -- printing ------------------------------------------------------------

    def __str__(self) -> str:
        return poly_to_str(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({poly_to_str(self)!r}, n={self.n}, r={self.r}, mode={self.mode!r})"


# ---------------------------------------------------------------------------
# Canonical printing
# ---------------------------------------------------------------------------

def _term_sort_key(ue: Exponent, xe: Exponent):
    return (sum(ue), ue, sum(xe), xe)


def _format_term(c: Fraction, ue: Exponent, xe: Exponent) -> str:
    factors: List[str] = []
    mag = abs(c)
    for i, e in enumerate(ue):
        if e:
            factors.append(f"u{i+1}" + (f"^{e}" if e != 1 else ""))
    for j, e in enumerate(xe):
        if e:
            factors.append(f"x{j+1}" + (f"^{e}" if e != 1 else ""))
    if mag != 1 or not factors:
        factors.insert(0, str(mag))
    return "*".join(factors)


def poly_to_str(p: LaurentPoly) -> str:
    """Deterministic rendering, graded-lex descending on (u, x) exponents."""
    items = [(ue, xe, c) for ue, pc in p.terms.items() for xe, c in pc.items()]
    if not items:
        return "0"
    items.sort(key=lambda t: _term_sort_key(t[0], t[1]), reverse=True)
    pieces: List[str] = []
    for k, (ue, xe, c) in enumerate(items):
        body = _format_term(c, ue, xe)
        if k == 0:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append((" - " if c < 0 else " + ") + body)
    return "".join(pieces)


def param_to_str(pc: ParamCoeff, r: int) -> str:
    """Render a Q[x] coefficient with the same grammar (no u-variables)."""
    return poly_to_str(LaurentPoly(0, r, POLYNOMIAL, {(): dict(pc)}))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<num>\d+)|(?P<var>[ux]\d+)|(?P<op>[-+*/^])|(?P<bad>\S)")


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup or "bad"
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", m.start())
        tokens.append(_Token(kind, m.group(), m.start()))
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int, r: int, mode: str):
        self.text = text
        self.n = n
        self.r = r
        self.mode = mode
        self.tokens = _tokenize(text.replace("−", "-"))
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> LaurentPoly:
        acc = LaurentPoly.zero(self.n, self.r, self.mode)
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            sign = -1 if tok.text == "-" else 1
        elif tok.kind == "end":
            raise ParseError("empty expression", tok.pos)
        acc = acc + self.term(sign)
        while True:
            tok = self.peek()
            if tok.kind == "end":
                return acc
            if tok.kind == "op" and tok.text in "+-":
                self.take()
                acc = acc + self.term(-1 if tok.text == "-" else 1)
            else:
                raise ParseError(f"expected '+' or '-', found {tok.text!r}", tok.pos)

    def term(self, sign: int) -> LaurentPoly:
        coeff = Fraction(sign)
        uexp = [0] * self.n
        xexp = [0] * self.r
        saw_factor = False
        while True:
            tok = self.peek()
            if tok.kind == "num":
                coeff *= self.number()
            elif tok.kind == "var":
                self.variable(uexp, xexp)
            else:
                raise ParseError(f"expected a factor, found {tok.text or 'end of input'!r}", tok.pos)
            saw_factor = True
            nxt = self.peek()
            if nxt.kind == "op" and nxt.text == "*":
                self.take()
                continue
            if nxt.kind == "var":
                continue  # implicit '*' before a variable
            break
        if not saw_factor:
            raise ParseError("empty term", self.peek().pos)
        return LaurentPoly.monomial(uexp, self.n, self.r, self.mode,
                                    coeff=coeff, xexp=xexp)

    def number(self) -> Fraction:
        tok = self.take()
        value = Fraction(int(tok.text))
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "/":
            self.take()
            den = self.take()
            if den.kind != "num":
                raise ParseError("expected an integer denominator", den.pos)
            if int(den.text) == 0:
                raise ParseError("zero denominator", den.pos)
            value /= int(den.text)
        return value

    def variable(self, uexp: List[int], xexp: List[int]) -> None:
        tok = self.take()
        family, idx = tok.text[0], int(tok.text[1:])
        if family == "u":
            if not 1 <= idx <= self.n:
                raise ParseError(f"unknown variable {tok.text!r}", tok.pos)
        else:
            if not 1 <= idx <= self.r:
                raise ParseError(f"unknown variable {tok.text!r}", tok.pos)
        exp = 1
        nxt = self.peek()
        if nxt.kind == "op" and nxt.text == "^":
            self.take()
            exp = self.exponent(tok)
        if family == "u":
            uexp[idx - 1] += exp
        else:
            if exp < 0:
                raise ParseError("negative exponent on a parameter", tok.pos)
            xexp[idx - 1] += exp

    def exponent(self, var_tok: _Token) -> int:
        sign = 1
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok.kind != "num":
            raise ParseError("expected an integer exponent", tok.pos)
        exp = sign * int(tok.text)
        if exp < 0 and (self.mode == POLYNOMIAL and var_tok.text[0] == "u"):
            raise ParseError("negative exponent in polynomial mode", tok.pos)
        return exp


def parse_poly(text: str, n: int, r: int, mode: str) -> LaurentPoly:
    """Parse an expression into canonical sparse form.

    The grammar is documented at module level; ``parse_poly`` of a printed
    polynomial is the identity on canonical forms.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    stripped = text.replace("−", "-").strip()
    if stripped == "0":
        return LaurentPoly.zero(n, r, mode)
    return _Parser(stripped, n, r, mode).parse()


def parse_param(text: str, r: int) -> ParamCoeff:
    """Parse a Q[x]-coefficient (used when re-reading report matrices)."""
    p = parse_poly(text, 0, r, POLYNOMIAL)
    return dict(p.terms.get((), {}))
