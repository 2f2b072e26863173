"""Command-line front end for ``.gman`` model files.

Exit codes: 0 ok, 1 violated, 2 usage or parse error, 3 indeterminate.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .aksz import AKSZRefused, SourceSpec, total_action
from .core import GradedError, Polynomial
from .derivations import GradedVectorField
from .dsl import Model, ParseError, parse_expression, parse_source
from .reduction import (
    NON_CONSTANT_RANK,
    ConstraintLocus,
    characteristic_distribution,
    poisson_reduction_conditions,
    pullback_form,
    reduce_function,
    reduced_bracket,
)
from .render import render_latex, render_plain
from .structures import (
    LInfinityTruncation,
    StructureError,
    check_generalized_complex,
    courant_to_S,
    linf_truncated_to_Q,
    poisson_to_S,
    verify_algebroid,
    verify_courant,
    verify_lie,
    verify_poisson,
)
from .symplectic import (
    Degenerate,
    NondegeneracyUnverified,
    NotClosed,
    SymplecticForm,
    check_master_equation,
    check_symplectic,
    poisson_bracket,
)

__all__ = ["CommandOutcome", "run", "main"]

EXIT = {"ok": 0, "violated": 1, "error": 2, "indeterminate": 3}


@dataclass
class CommandOutcome:
    status: str
    payload: str

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]


class _Fail(Exception):
    def __init__(self, status: str, message: str):
        super().__init__(message)
        self.outcome = CommandOutcome(status, message)


def _load(path: str) -> Model:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise _Fail("error", f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_source(text)
    except ParseError as exc:
        raise _Fail("error", f"{path}:{exc}") from None


def _binding(model: Model, name: str, kind=Polynomial):
    if name not in model.bindings:
        if kind is Polynomial:
            # not a binding: read it as an expression over the model chart
            try:
                return parse_expression(name, model.ctx)
            except ParseError as exc:
                raise _Fail("error", f"no binding named {name!r} and not an expression ({exc.message})") from None
        raise _Fail("error", f"no binding named {name!r}")
    value = model.bindings[name]
    if not isinstance(value, kind):
        raise _Fail("error", f"{name!r} is not a {kind.__name__}")
    return value


def _symplectic(form: Polynomial) -> SymplecticForm:
    try:
        return check_symplectic(form)
    except NotClosed as exc:
        raise _Fail("violated", f"violated: omega is not closed; d(omega) = {render_plain(exc.witness)}") from None
    except Degenerate as exc:
        raise _Fail("violated", f"violated: omega is degenerate ({exc})") from None
    except NondegeneracyUnverified as exc:
        raise _Fail("indeterminate", f"indeterminate: nondegeneracy unverified ({exc})") from None
    except GradedError as exc:
        raise _Fail("error", f"omega is not a symplectic two-form: {exc}") from None


def _master_names(model: Model, s: Optional[str], omega: Optional[str]):
    for word, args, _ in model.directives:
        if word == "master" and len(args) == 2:
            s = s or args[0]
            omega = omega or args[1]
    if s is None:
        s = next((n for n in ("S", "Theta") if n in model.bindings), "S")
    return s, omega or "omega"


def _target(model: Model, s: Optional[str], omega: Optional[str]):
    """``(omega, S)`` from explicit names, directives, bindings or a table."""
    explicit = s is not None or omega is not None
    s_name, w_name = _master_names(model, s, omega)
    if explicit or (s_name in model.bindings and w_name in model.bindings):
        w = _symplectic(_binding(model, w_name))
        S = _binding(model, s_name)
        return w, S
    if "poisson" in model.structures:
        return poisson_to_S(model.structures["poisson"])
    if "courant" in model.structures:
        return courant_to_S(model.structures["courant"])
    raise _Fail("error", "no symplectic target: declare S and omega or a poisson/courant table")


def _master_outcome(S: Polynomial, w: SymplecticForm) -> CommandOutcome:
    try:
        res = check_master_equation(S, w)
    except GradedError as exc:
        raise _Fail("error", str(exc)) from None
    if res.ok:
        return CommandOutcome("ok", f"ok: {{S,S}} = 0 (k = {w.k})")
    return CommandOutcome("violated", f"violated: {{S,S}} = {render_plain(res.bracket)}")


def cmd_check_master(args) -> CommandOutcome:
    model = _load(args.file)
    s, w = _master_names(model, args.s, args.omega)
    return _master_outcome(_binding(model, s), _symplectic(_binding(model, w)))


def _structure(model: Model, kind: str):
    if kind not in model.structures:
        raise _Fail("error", f"the file declares no {kind} table")
    return model.structures[kind]


def cmd_verify(args) -> CommandOutcome:
    model = _load(args.file)
    kind = args.structure
    if kind == "lie":
        res = verify_lie(_structure(model, "lie"))
        if res.ok:
            return CommandOutcome("ok", "ok: [Q,Q] = 0 (Jacobi holds)")
        triple = res.details.get("triple")
        names = _structure(model, "lie").names
        where = ", ".join(names[i] for i in triple) if triple else "?"
        return CommandOutcome(
            "violated",
            f"violated: [Q,Q]^{res.where} = {render_plain(res.witness)}; Jacobi fails on ({where})",
        )
    if kind == "algebroid":
        res = verify_algebroid(_structure(model, "algebroid"))
        if res.ok:
            return CommandOutcome("ok", "ok: [Q,Q] = 0")
        return CommandOutcome("violated", f"violated: [Q,Q]^{res.where} = {render_plain(res.witness)}")
    if kind == "linfty":
        name = args.field or next(iter(model.names_of_kind("field")), None)
        if name is None:
            raise _Fail("error", "the file declares no field")
        Q = _binding(model, name, GradedVectorField)
        pieces: dict = {}
        for coord, comp in Q.components.items():
            for mono, c in comp._terms.items():
                m = sum(mono)
                pieces.setdefault(m, {}).setdefault(coord, Q.ctx.zero())
                pieces[m][coord] = pieces[m][coord] + Polynomial(Q.ctx, {mono: c})
        try:
            T = LInfinityTruncation.from_fields(
                Q.ctx, {m: GradedVectorField(Q.ctx, comps, Q.degree) for m, comps in pieces.items()}
            )
        except StructureError as exc:
            raise _Fail("error", str(exc)) from None
        _, report = linf_truncated_to_Q(T)
        if report.ok:
            return CommandOutcome("ok", f"ok: arities {sorted(pieces)} close")
        lines = [f"violated: arities {report.violated_arities}"]
        for r in report.violated_arities:
            for coord, v in sorted(report.residues[r].items()):
                if v:
                    lines.append(f"  arity {r}, {coord}: {render_plain(v)}")
        return CommandOutcome("violated", "\n".join(lines))
    if kind == "poisson":
        if "poisson" in model.structures:
            res = verify_poisson(model.structures["poisson"])
            if res.ok:
                return CommandOutcome("ok", "ok: {S,S} = 0 (Jacobi holds)")
            return CommandOutcome("violated", f"violated: {{S,S}} = {render_plain(res.bracket)}")
        w, S = _target(model, args.s, args.omega)
        return _master_outcome(S, w)
    if kind == "courant":
        try:
            res = verify_courant(_structure(model, "courant"))
        except GradedError as exc:
            raise _Fail("error", str(exc)) from None
        if res.ok:
            return CommandOutcome("ok", "ok: {S,S} = 0")
        return CommandOutcome("violated", f"violated: {{S,S}} = {render_plain(res.bracket)}")
    if kind == "gcs":
        w, S = _target(model, args.s, args.omega)
        J = _binding(model, args.j)
        try:
            J = J.transfer(w.base)
            res = check_generalized_complex(S, J, w)
        except GradedError as exc:
            raise _Fail("error", str(exc)) from None
        lines = [
            f"lambda = {res.lam}",
            f"normalized = {res.normalized}",
            f"{{T,T}} = 0: {res.TT_zero}",
        ]
        if res.ok:
            return CommandOutcome("ok", "ok: " + "; ".join(lines))
        if res.lam is None:
            return CommandOutcome("violated", "violated: {{S,J},J} is not proportional to S")
        return CommandOutcome("violated", "violated: " + "; ".join(lines))
    raise _Fail("error", f"unknown structure {kind!r}")


def _names(text: Optional[str]) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()] if text else []


def cmd_reduce(args) -> CommandOutcome:
    model = _load(args.file)
    constrain = _names(args.constrain)
    wanted = _names(args.distribution)
    if "poisson" in model.structures and args.omega is None:
        pi = model.structures["poisson"]
        try:
            rep = poisson_reduction_conditions(pi, constrain, wanted, args.degree_bound)
        except GradedError as exc:
            raise _Fail("error", str(exc)) from None
        lines = [
            f"cond1 (pi#(dC^0) in B): {rep.cond1}",
            f"cond2 (brackets of B-invariant functions, degree <= {rep.degree_bound}): {rep.cond2}",
        ]
        lines += [f"  failure: {f}" for f in rep.failures]
        return CommandOutcome("ok" if rep else "violated", "\n".join(lines))
    w = _binding(model, args.omega or "omega")
    try:
        locus = ConstraintLocus(model.ctx, tuple(constrain))
        iw = pullback_form(w, locus)
    except GradedError as exc:
        raise _Fail("error", str(exc)) from None
    dist = characteristic_distribution(iw)
    lines = [f"pullback: {render_plain(iw)}"]
    if dist == NON_CONSTANT_RANK:
        lines.append("characteristic distribution: rank is not certified constant")
        return CommandOutcome("indeterminate", "\n".join(lines))
    if dist.aligned:
        lines.append(f"characteristic distribution: span({', '.join(dist.span)})")
    else:
        frame = "; ".join(
            " + ".join(f"{c}*d/d{n}" for n, c in vec.items()) for vec in dist.frame
        )
        lines.append(f"characteristic distribution: frame {frame}")
    if wanted and set(wanted) != set(dist.span):
        lines.append(f"requested distribution ({', '.join(wanted)}) is not the kernel")
        return CommandOutcome("violated", "\n".join(lines))
    if args.f and args.g:
        try:
            sw = check_symplectic(w)
            f = reduce_function(_binding(model, args.f), locus, dist)
            g = reduce_function(_binding(model, args.g), locus, dist)
            lines.append(f"reduced {{{args.f},{args.g}}} = {render_plain(reduced_bracket(f, g, locus, sw, dist))}")
        except GradedError as exc:
            lines.append(f"not reducible: {exc}")
            return CommandOutcome("violated", "\n".join(lines))
    return CommandOutcome("ok", "\n".join(lines))


def cmd_aksz(args) -> CommandOutcome:
    model = _load(args.file)
    w, S = _target(model, args.s, args.omega)
    try:
        src = SourceSpec(args.source_dim)
    except ValueError as exc:
        raise _Fail("error", str(exc)) from None
    try:
        terms, report = total_action(w, S, src)
    except AKSZRefused as exc:
        return CommandOutcome("violated", f"violated: refusing to emit; {{S,S}} = {render_plain(exc.witness)}")
    except GradedError as exc:
        raise _Fail("error", str(exc)) from None
    if args.emit == "json-terms":
        return CommandOutcome("ok", json.dumps([t.as_json() for t in terms], indent=2))
    header = [
        f"formalism: {report.formalism} (k = {report.k}, n = {report.n})",
        f"mapping-space symplectic degree: k - n = {report.mapping_space_degree}",
        f"total ghost degree per term: k + 1 - n = {report.ghost_total}; audit {'passed' if report.audit_ok else 'FAILED'}",
    ] + report.notes
    if args.emit == "latex":
        lines = ["% " + h for h in header]
        lines.append("% ghost-zero sector")
        lines.append(render_latex(terms, thin_space=False))
        lines.append("% all terms")
        lines.append(render_latex(terms, expanded=True))
    else:
        lines = ["# " + h for h in header] + [t.text() for t in terms]
    return CommandOutcome("ok" if report.audit_ok else "violated", "\n".join(lines))


def cmd_bracket(args) -> CommandOutcome:
    model = _load(args.file)
    if args.omega or "omega" in model.bindings:
        w = _symplectic(_binding(model, args.omega or "omega"))
    elif "poisson" in model.structures:
        # functions on the base: use the derived bracket -{{f,S},g} = pi(df,dg)
        w, S = poisson_to_S(model.structures["poisson"])
        try:
            f = _binding(model, args.f).transfer(w.base)
            g = _binding(model, args.g).transfer(w.base)
            inner = poisson_bracket(f, S, w)
            value = -poisson_bracket(inner, g, w) if inner else w.base.zero()
        except GradedError as exc:
            raise _Fail("error", str(exc)) from None
        return CommandOutcome("ok", render_plain(value))
    else:
        raise _Fail("error", "no symplectic form: declare omega or pass --omega")
    try:
        f = _binding(model, args.f).transfer(w.base)
        g = _binding(model, args.g).transfer(w.base)
        value = poisson_bracket(f, g, w)
    except GradedError as exc:
        raise _Fail("error", str(exc)) from None
    return CommandOutcome("ok", render_plain(value))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradedgeom", description="Exact graded-geometry checks on .gman files.")
    sub = p.add_subparsers(dest="command", required=True)

    cm = sub.add_parser("check-master", help="test {S,S} = 0")
    cm.add_argument("file")
    cm.add_argument("--s")
    cm.add_argument("--omega")
    cm.set_defaults(func=cmd_check_master)

    v = sub.add_parser("verify", help="verify a declared structure")
    v.add_argument("structure", choices=["lie", "algebroid", "linfty", "poisson", "courant", "gcs"])
    v.add_argument("file")
    v.add_argument("--s")
    v.add_argument("--omega")
    v.add_argument("--field")
    v.add_argument("--j", default="J")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="presymplectic or Poisson reduction")
    r.add_argument("file")
    r.add_argument("--constrain", default="")
    r.add_argument("--distribution", default="")
    r.add_argument("--degree-bound", type=int, default=3)
    r.add_argument("--omega")
    r.add_argument("--f")
    r.add_argument("--g")
    r.set_defaults(func=cmd_reduce)

    a = sub.add_parser("aksz", help="emit the AKSZ action")
    a.add_argument("file")
    a.add_argument("--source-dim", type=int, required=True)
    a.add_argument("--emit", choices=["latex", "text", "json-terms"], default="text")
    a.add_argument("--s")
    a.add_argument("--omega")
    a.set_defaults(func=cmd_aksz)

    b = sub.add_parser("bracket", help="graded Poisson bracket of two bindings")
    b.add_argument("file")
    b.add_argument("--f", required=True)
    b.add_argument("--g", required=True)
    b.add_argument("--omega")
    b.set_defaults(func=cmd_bracket)
    return p


def run(argv: Sequence[str]) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return CommandOutcome("ok" if exc.code == 0 else "error", "")
    try:
        return args.func(args)
    except _Fail as fail:
        return fail.outcome
    except GradedError as exc:
        return CommandOutcome("error", str(exc))


def main(argv: Optional[Sequence[str]] = None) -> int:
    outcome = run(sys.argv[1:] if argv is None else argv)
    if outcome.payload:
        stream = sys.stderr if outcome.status == "error" else sys.stdout
        print(outcome.payload, file=stream)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
