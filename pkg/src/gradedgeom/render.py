"""Plain-text and LaTeX renderers for polynomials, forms and action terms."""
from __future__ import annotations

import re
import unicodedata
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .aksz import ActionTerm, Family, families
from .core import Polynomial, plain
from .forms import DoubledContext

__all__ = ["render_plain", "render_latex", "latex_name", "latex_families", "latex_terms"]

_GREEK = {
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota",
    "kappa", "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau", "upsilon",
    "phi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi",
    "Sigma", "Upsilon", "Phi", "Psi", "Omega",
}
_GREEK_INDICES = [r"\alpha", r"\beta", r"\gamma", r"\delta", r"\epsilon", r"\zeta"]
_LATIN_INDICES = ["i", "j", "k", "l", "m", "n"]


def _plain_names(p: Polynomial) -> list[str]:
    ctx = p.ctx
    if not isinstance(ctx, DoubledContext):
        return list(ctx.names)
    return list(ctx.base.names) + [f"d({n})" for n in ctx.base.names]


def render_plain(value: Union[Polynomial, Sequence[ActionTerm]]) -> str:
    """Text the DSL parser reads back to the same value."""
    if isinstance(value, Polynomial):
        return plain(value, _plain_names(value))
    return "\n".join(t.text() for t in value) if value else "0"


def _greek_head(head: str) -> str:
    if head in _GREEK:
        return "\\" + head
    if len(head) == 1 and not head.isascii():
        try:
            word = unicodedata.name(head).split()[-1].lower()
        except ValueError:
            return head
        if unicodedata.name(head).startswith("GREEK CAPITAL"):
            word = word.capitalize()
        if word in _GREEK:
            return "\\" + word
    return head


def latex_name(name: str, names: Optional[Mapping[str, str]] = None) -> str:
    if names and name in names:
        return names[name]
    m = re.fullmatch(r"D\[(.+)\]", name)
    if m:
        return r"\mathrm{d}" + latex_name(m.group(1), names)
    if "_" in name:
        head, rest = name.split("_", 1)
        return f"{_greek_head(head)}_{{{rest}}}"
    m = re.fullmatch(r"(\D+?)(\d+)", name)
    if m:
        return f"{_greek_head(m.group(1))}_{{{m.group(2)}}}"
    return _greek_head(name)


def _frac(c: Fraction) -> str:
    c = abs(c)
    if c.denominator == 1:
        return str(c.numerator)
    return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def _signed_coeff(c: Fraction) -> str:
    """Leading coefficient text; units print as an empty string or a sign."""
    sign = "-" if c < 0 else ""
    return sign if abs(c) == 1 else sign + _frac(c)


def _join(pieces: list[str]) -> str:
    out = pieces[0]
    for piece in pieces[1:]:
        out += " - " + piece[1:] if piece.startswith("-") else " + " + piece
    return out


def _latex_poly(p: Polynomial, names) -> str:
    if not p:
        return "0"
    ctx = p.ctx
    pieces = []
    for mono, c in p.items():
        factors = []
        for i, e in enumerate(mono):
            if not e:
                continue
            sym = latex_name(ctx.names[i], names)
            if e > 1 and sym.startswith(r"\mathrm{d}"):
                sym = f"({sym})"
            factors.append(sym if e == 1 else f"{sym}^{{{e}}}")
        if not factors:
            pieces.append(("-" if c < 0 else "") + _frac(c))
        else:
            pieces.append(_signed_coeff(c) + " ".join(factors))
    return _join(pieces)


def _species(deg: int, k: int):
    """Field symbol, natural index position and index alphabet for a degree."""
    if deg == 0:
        return "X", "upper", _LATIN_INDICES
    if deg == 1:
        return (r"\eta", "lower", _LATIN_INDICES) if k == 1 else ("A", "upper", _GREEK_INDICES)
    if deg == 2 and k == 2:
        return "P", "lower", _LATIN_INDICES
    return f"Z_{{[{deg}]}}", "upper", ["a", "b", "c", "d", "e", "f"]


def _attach(sym: str, where: str, idx: str) -> str:
    mark = "^" if where == "upper" else "_"
    if len(idx) == 1:
        return f"{sym}{mark}{idx}"
    return f"{sym}{mark}{{{idx}}}"


def _term_degree(t: ActionTerm) -> int:
    return sum(c.target_degree + int(d) for c, d in t.factors)


def _tensor_symbol(pattern, k: int) -> str:
    degs = [deg for deg, d in pattern]
    if any(d for _, d in pattern):
        return "g"
    if k == 1 and degs == [1, 1]:
        return r"\pi"
    if degs == [1, 1, 1]:
        return "f"
    if degs == [2, 1]:
        return r"\rho"
    return "T"


def _family_latex(fam: Family, k: int, sep: str) -> str:
    coeff = _signed_coeff(fam.coefficient)
    if fam.kronecker:
        (d1, dd1), (d2, dd2) = fam.pattern
        s1, _, alpha = _species(d1, k)
        s2, _, _ = _species(d2, k)
        idx = alpha[0]
        first = (r"\mathrm{d}" if dd1 else "") + _attach(s1, "lower", idx)
        second = (r"\mathrm{d}" if dd2 else "") + _attach(s2, "upper", idx)
        second = (sep if dd2 else "") + second
        return rf"{coeff}\int_\Sigma {first}{second}"
    used: dict = {}
    factors = []
    upper, lower = [], []
    for deg, d in fam.pattern:
        sym, where, alpha = _species(deg, k)
        key = id(alpha)
        idx = alpha[used.get(key, 0)]
        used[key] = used.get(key, 0) + 1
        text = _attach(sym, where, idx)
        factors.append((sep + r"\mathrm{d}" + text) if d else text)
        (lower if where == "upper" else upper).append(idx)
    tensor = _tensor_symbol(fam.pattern, k)
    if upper:
        tensor += "^{" + "".join(upper) + "}"
    if lower:
        tensor += "_{" + "".join(lower) + "}"
    if not fam.constant:
        tensor += "(X)"
    return rf"{coeff}\int_\Sigma {tensor}" + "".join(factors)


def latex_families(terms: Sequence[ActionTerm], thin_space: bool = True) -> str:
    """Index form of the ghost-zero sector, one integral per family."""
    fams = families(terms)
    if not fams:
        return "0"
    k = _term_degree(fams[0].terms[0]) - 1
    sep = r"\, " if thin_space else " "
    return _join([_family_latex(f, k, sep) for f in fams])


def latex_terms(terms: Sequence[ActionTerm]) -> str:
    """Every emitted term with explicit component indices."""
    if not terms:
        return "0"
    k = _term_degree(terms[0]) - 1
    order: dict = {}
    for t in terms:
        for c, _ in t.factors:
            order.setdefault(c.target_degree, [])
            if c.target not in order[c.target_degree]:
                order[c.target_degree].append(c.target)
    for deg in order:
        order[deg].sort(key=lambda s: [int(x) if x.isdigit() else x for x in re.split(r"(\d+)", s)])
    pieces = []
    for t in terms:
        body = []
        for c, d in t.factors:
            sym, where, _ = _species(c.target_degree, k)
            pos = str(order[c.target_degree].index(c.target) + 1)
            text = _attach(sym, where, pos)
            text += ("_" if where == "upper" else "^") + f"{{({c.form_degree})}}"
            body.append((r"\mathrm{d}" if d else "") + text)
        pieces.append(_signed_coeff(t.coefficient) + r"\int_\Sigma " + " ".join(body))
    return _join(pieces)


def render_latex(
    value: Union[Polynomial, Sequence[ActionTerm]],
    names: Optional[Mapping[str, str]] = None,
    thin_space: bool = True,
    expanded: bool = False,
) -> str:
    """Deterministic LaTeX.

    Polynomials and forms print term by term (``D[x]`` as ``\\mathrm{d}x``).
    A list of action terms prints its ghost-zero sector in index form, or every
    term when ``expanded`` is set.
    """
    if isinstance(value, Polynomial):
        return _latex_poly(value, names)
    terms = list(value)
    if expanded:
        return latex_terms(terms)
    return latex_families(terms, thin_space)
