"""Command-line front end: job ingestion, pipeline orchestration, reports.

Job files are JSON documents::

    {
      "mode": "polynomial",            # or "laurent"
      "n": 2,
      "f": "u1^5 + u2^5",
      "deformation": ["u1", "u2"],     # r = its length; may be empty
      "flags": {                        # optional, overridden by CLI flags
        "assume_nondegenerate": false,
        "gc_include_R0": true,
        "budget": 100000
      }
    }

Subcommands: ``analyze`` (full pipeline), ``milnor``, ``spectrum``,
``connection``, ``check`` and ``divide --h <expr>``.  Reports are a
single JSON document (or a plain-text rendering with ``--format text``);
every rational is a "p/q" string and every matrix entry an expression in
the x-variables, so reports re-parse exactly.  Exit codes: 0 success,
1 usage error, 2 violated standing hypothesis, 3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from .buchberger import DEFAULT_BUDGET
from .connection import (
    ConnectionData,
    build_connection,
    gauge_normalize,
    reconstruct_C_from_B0,
    spectrum,
    verify_integrability,
)
from .duality import (
    SocleUnavailable,
    check_T_symmetry,
    orthonormalize,
    residue_pairing,
)
from .errors import (
    BrieskornError,
    BudgetExceeded,
    DegenerateInput,
    DomainError,
    NotCommode,
    ParseError,
)
from .frobgate import check_conditions, suggest_deformation
from .jacobi import DivisionEngine, JacobianSystem
from .linalg import PMatrix, pm_is_zero, pm_x_degree
from .newton import build_polyhedron, is_commode, is_nondegenerate, newton_number
from .polyring import (
    LaurentPoly,
    ParamCoeff,
    param_to_str,
    parse_poly,
    poly_to_str,
)


@dataclass
class JobSpec:
    mode: str
    n: int
    f: str
    deformation: List[str] = field(default_factory=list)
    assume_nondegenerate: bool = False
    gc_include_r0: bool = True
    budget: int = DEFAULT_BUDGET

    @property
    def r(self) -> int:
        return len(self.deformation)


def load_jobspec(path: str) -> JobSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read job file {path}: {exc}") from exc
    try:
        flags = data.get("flags", {})
        return JobSpec(
            mode=data["mode"],
            n=int(data["n"]),
            f=data["f"],
            deformation=list(data.get("deformation", [])),
            assume_nondegenerate=bool(flags.get("assume_nondegenerate", False)),
            gc_include_r0=bool(flags.get("gc_include_R0", True)),
            budget=int(flags.get("budget", DEFAULT_BUDGET)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed job file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Rendering helpers (exact: all rationals as "p/q" strings)
# ---------------------------------------------------------------------------

def _frac(x: Fraction) -> str:
    return str(x)


def _pc(pc: ParamCoeff, r: int) -> str:
    return param_to_str(pc, r)


def _pmatrix(M: PMatrix, r: int) -> List[List[str]]:
    return [[_pc(entry, r) for entry in row] for row in M]


def _vector(vec: Sequence[ParamCoeff], r: int) -> List[str]:
    return [_pc(pc, r) for pc in vec]


# ---------------------------------------------------------------------------
# Pipeline stages
# ---------------------------------------------------------------------------

@dataclass
class _Stage:
    spec: JobSpec
    f: LaurentPoly
    deformation: List[LaurentPoly]
    report: Dict[str, Any]
    engine: Optional[DivisionEngine] = None
    system: Optional[JacobianSystem] = None
    conn: Optional[ConnectionData] = None


def _parse_inputs(spec: JobSpec) -> _Stage:
    if spec.mode not in ("laurent", "polynomial"):
        raise DomainError(f"unknown mode {spec.mode!r}")
    f = parse_poly(spec.f, spec.n, 0, spec.mode)
    gs = [parse_poly(g, spec.n, 0, spec.mode) for g in spec.deformation]
    report: Dict[str, Any] = {
        "input": {
            "mode": spec.mode,
            "n": spec.n,
            "r": spec.r,
            "f": poly_to_str(f),
            "deformation": [poly_to_str(g) for g in gs],
        }
    }
    return _Stage(spec, f, gs, report)


def _stage_hypotheses(st: _Stage) -> None:
    com = is_commode(st.f)
    verdicts: Dict[str, Any] = {"commode": com.ok}
    st.report["verdicts"] = verdicts
    if not com.ok:
        raise NotCommode(com.reason)
    P = build_polyhedron(st.f)
    if st.spec.assume_nondegenerate:
        verdicts["nondegenerate"] = "assumed"
    else:
        nd = is_nondegenerate(st.f, P, budget=st.spec.budget)
        if nd.verdict is False:
            bad = next(fc for fc in nd.faces if fc.status == "degenerate")
            raise DegenerateInput(
                "degenerate face with support "
                + ", ".join(str(m) for m in bad.monomials))
        if nd.verdict is None:
            raise BudgetExceeded(
                "nondegeneracy undecided within the step budget; "
                "rerun with --assume-nondegenerate or a larger --budget")
        verdicts["nondegenerate"] = "true"
    st.engine = DivisionEngine(st.f, P, budget=st.spec.budget)
    system = JacobianSystem.build(st.f, st.deformation, engine=st.engine)
    st.system = system
    verdicts["subdiagram"] = [
        {
            "term": poly_to_str(g),
            "ok": rep.ok,
            "conditions": [
                {"name": c.name, "ok": c.ok,
                 "value": _frac(c.value) if c.value is not None else None,
                 "bound": _frac(c.bound) if c.bound is not None else None}
                for c in rep.conditions
            ],
        }
        for g, rep in zip(st.deformation, system.subdiagram_reports)
    ]


def _stage_milnor(st: _Stage) -> None:
    engine = st.engine
    assert engine is not None
    mu = engine.groebner_basis().mu
    nn = newton_number(engine.P)
    st.report["mu"] = mu
    st.report["newton_number"] = nn
    if mu != nn:
        raise DegenerateInput(
            f"Groebner Milnor number {mu} disagrees with the Newton number "
            f"{nn}: the nondegeneracy hypothesis fails")


def _stage_basis(st: _Stage) -> None:
    engine = st.engine
    assert engine is not None
    basis = engine.basis()
    st.report["basis"] = [
        {"monomial": poly_to_str(
            LaurentPoly.monomial(m, engine.n, 0, engine.mode)),
         "weight": _frac(w)}
        for m, w in zip(basis.monomials, basis.weights)
    ]


def _stage_connection(st: _Stage) -> None:
    system = st.system
    assert system is not None
    r = system.r
    conn = gauge_normalize(build_connection(system))
    st.conn = conn
    st.report["matrices"] = {
        "B0": _pmatrix(conn.B0, r),
        "Binf": _pmatrix(conn.Binf, r),
        "C": [_pmatrix(c, r) for c in conn.C],
    }
    st.report["degrees"] = {
        "B0": pm_x_degree(conn.B0),
        "C": [pm_x_degree(c) for c in conn.C],
    }
    st.report["verdicts"]["birkhoff_ok"] = bool(conn.birkhoff_ok)
    st.report["verdicts"]["binf_constant"] = bool(conn.binf_constant)
    gauge = conn.gauge
    if gauge is None or gauge.is_identity():
        st.report["gauge"] = {"trivial": True}
    else:
        st.report["gauge"] = {
            "trivial": False,
            "P": _pmatrix(gauge.P, r),
            "P_inverse": _pmatrix(gauge.inverse, r),
        }
    st.report["residuals"] = [
        {"operator": res.operator, "column": res.column,
         "theta_power": res.theta_power,
         "vector": _vector(res.vector, r)}
        for res in conn.residuals
    ]
    integ = verify_integrability(conn)
    nonzero = []
    for label, group in (("I1", integ.commuting_dx), ("I2", integ.commuting_C),
                         ("I3", integ.commuting_B0), ("I4", integ.flatness)):
        for key, mat in sorted(group.items(), key=str):
            if not pm_is_zero(mat):
                nonzero.append({"relation": label, "indices": str(key),
                                "residual": _pmatrix(mat, r)})
    st.report["integrability"] = {"ok": integ.ok, "nonzero_residuals": nonzero}
    try:
        spec_vals = spectrum(conn)
        st.report["spectrum"] = [_frac(v) for v in spec_vals]
        st.report["verdicts"]["binf_diagonal"] = True
        recon = reconstruct_C_from_B0(conn)
        st.report["reconstruction"] = {
            "matches": recon.matches,
            "inconsistencies": [list(t) for t in recon.inconsistencies],
        }
    except DomainError as exc:
        st.report["spectrum"] = None
        st.report["verdicts"]["binf_diagonal"] = False
        st.report["reconstruction"] = {"matches": None, "reason": str(exc)}


def _stage_duality(st: _Stage) -> None:
    engine, conn = st.engine, st.conn
    assert engine is not None and conn is not None
    basis = engine.basis()
    r = st.system.r if st.system else 0
    try:
        pairing = residue_pairing(basis, engine)
    except SocleUnavailable as exc:
        st.report["pairing"] = {"available": False, "reason": str(exc)}
        st.report["t_symmetry"] = None
        st.report["orthonormalize"] = None
        return
    st.report["pairing"] = {
        "available": True,
        "S": [[_frac(v) for v in row] for row in pairing.S],
        "socle_index": pairing.socle_index,
        "weight_orthogonal": pairing.weight_orthogonal,
        "nondegenerate": pairing.nondegenerate,
    }
    tsym = check_T_symmetry(conn)
    st.report["t_symmetry"] = {
        "ok": tsym.ok,
        "B0_residual_zero": pm_is_zero(tsym.B0_residual),
        "Binf_residual_zero": pm_is_zero(tsym.Binf_residual),
        "C_residual_zero": [pm_is_zero(m) for m in tsym.C_residuals],
    }
    ortho = orthonormalize(basis, pairing)
    entry: Dict[str, Any] = {"achieved": ortho.achieved}
    if ortho.achieved and ortho.transform is not None:
        ident = all(ortho.transform[i][j] == (1 if i == j else 0)
                    for i in range(basis.mu) for j in range(basis.mu))
        entry["transform_is_identity"] = ident
        if not ident:
            entry["transform"] = [[_frac(v) for v in row]
                                  for row in ortho.transform]
    else:
        entry["message"] = ortho.message
        if ortho.obstruction is not None:
            entry["obstruction_diagonal"] = [_frac(v) for v in ortho.obstruction]
    st.report["orthonormalize"] = entry


def _stage_conditions(st: _Stage) -> None:
    engine = st.engine
    assert engine is not None
    rep = check_conditions(engine, st.deformation,
                           include_r0=st.spec.gc_include_r0)
    st.report["conditions"] = {
        "EC": {"ok": rep.ec.ok, "zeta_weight": _frac(rep.ec.zeta_weight),
               "min_weight": _frac(rep.ec.min_weight),
               "multiplicity": rep.ec.multiplicity},
        "IC": {"ok": rep.ic.ok, "rank": rep.ic.rank, "r": rep.ic.r},
        "GC": {"ok": rep.gc.ok, "dimension": rep.gc.dimension,
               "mu": rep.gc.mu,
               "words": {str(k): w for k, w in sorted(rep.gc.words.items())}},
    }


def run_analyze(spec: JobSpec) -> Dict[str, Any]:
    """Full pipeline; returns the deterministic report dictionary."""
    st = _parse_inputs(spec)
    _stage_hypotheses(st)
    _stage_milnor(st)
    _stage_basis(st)
    _stage_connection(st)
    _stage_duality(st)
    _stage_conditions(st)
    if st.conn is not None and st.conn.notes:
        st.report["notes"] = list(st.conn.notes)
    return st.report


def run_subcommand(name: str, spec: JobSpec,
                   h: Optional[str] = None) -> Dict[str, Any]:
    """Pipeline prefixes: milnor, spectrum, connection, check, divide."""
    st = _parse_inputs(spec)
    _stage_hypotheses(st)
    _stage_milnor(st)
    if name == "milnor":
        return st.report
    _stage_basis(st)
    if name == "spectrum":
        basis = st.engine.basis()
        st.report["spectrum"] = [_frac(w) for w in basis.weights]
        return st.report
    if name == "check":
        _stage_conditions(st)
        return st.report
    if name == "connection":
        _stage_connection(st)
        return st.report
    if name == "divide":
        if h is None:
            raise DomainError("divide needs --h <expression>")
        system = st.system
        assert system is not None
        hpoly = parse_poly(h, spec.n, spec.r, spec.mode)
        res = system.divide(hpoly)
        basis = st.engine.basis()
        st.report["divide"] = {
            "h": poly_to_str(hpoly),
            "alpha": _frac(res.alpha) if res.alpha is not None else None,
            "remainder": [
                {"monomial": poly_to_str(
                    LaurentPoly.monomial(m, spec.n, 0, spec.mode)),
                 "coefficient": _pc(pc, spec.r)}
                for m, pc in sorted(res.remainder.items())
            ],
            "cofactors": [poly_to_str(c) for c in res.cofactors],
            "certificates": [
                {"generator": c.generator,
                 "weight": _frac(c.weight) if c.weight is not None else None,
                 "bound": _frac(c.bound),
                 "ok": c.ok}
                for c in res.certificates
            ],
        }
        return st.report
    raise DomainError(f"unknown subcommand {name!r}")


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _render_text(doc: Dict[str, Any], indent: int = 0) -> str:
    lines: List[str] = []

    def emit(key: str, value: Any, depth: int) -> None:
        pad = "  " * depth
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            for k, v in value.items():
                emit(k, v, depth + 1)
        elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
            lines.append(f"{pad}{key}:")
            for i, v in enumerate(value):
                emit(f"[{i}]", v, depth + 1)
        else:
            lines.append(f"{pad}{key}: {json.dumps(value)}")

    for k, v in doc.items():
        emit(k, v, indent)
    return "\n".join(lines)


def _emit(doc: Dict[str, Any], fmt: str) -> None:
    if fmt == "text":
        print(_render_text(doc))
    else:
        print(json.dumps(doc, indent=2))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brieskorn",
        description="Exact Brieskorn-lattice connection data for convenient "
                    "nondegenerate (Laurent) polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("analyze", "full pipeline report"),
        ("milnor", "Milnor number and its Newton-number cross-check"),
        ("spectrum", "spectrum at infinity (basis weights)"),
        ("connection", "connection matrices and integrability"),
        ("check", "hypothesis verdicts and the EC/IC/GC conditions"),
        ("divide", "certified division of an expression"),
    ):
        p = sub.add_parser(name, help=desc)
        p.add_argument("jobfile", help="JSON job specification")
        p.add_argument("--assume-nondegenerate", action="store_true",
                       default=None,
                       help="skip the face nondegeneracy computation")
        p.add_argument("--budget", type=int, default=None,
                       help="reduction step budget (default 100000)")
        p.add_argument("--gc-no-r0", action="store_true", default=None,
                       help="exclude multiplication by f from the GC closure")
        p.add_argument("--format", choices=("json", "text"), default="json")
        if name == "divide":
            p.add_argument("--h", required=True,
                           help="expression to divide (may involve x's)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        spec = load_jobspec(args.jobfile)
        if args.assume_nondegenerate:
            spec.assume_nondegenerate = True
        if args.budget is not None:
            spec.budget = args.budget
        if args.gc_no_r0:
            spec.gc_include_r0 = False
        if args.command == "analyze":
            doc = run_analyze(spec)
        else:
            doc = run_subcommand(args.command, spec,
                                 h=getattr(args, "h", None))
    except BrieskornError as exc:
        _emit({"error": {"kind": type(exc).__name__, "message": str(exc),
                         "exit_code": exc.exit_code}}, args.format)
        return exc.exit_code
    _emit(doc, args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
