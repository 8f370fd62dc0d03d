"""Symbolic logarithmic differential forms with exact coefficients.

Forms live on a chart with named variables, some of which are declared
divisor branches.  The canonical basis of one-forms is dlog(z) for divisor
variables and dz for the rest; dz for a divisor variable is rewritten as
z * dlog(z) on input, which makes the consistency relation d(alpha(f)) =
alpha(f) dlog(f) hold by construction.  Coefficients are exact rational
functions whose denominators may not vanish on any declared branch, so log
poles are always simple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .rational import Poly, RatFunc, parse_rational

Symbol = tuple[str, str]  # ("dlog", var) or ("d", var)


@dataclass(frozen=True)
class FormContext:
    """Variable context: which names exist, which carry log poles."""

    variables: tuple[str, ...]
    divisor: frozenset[str] = frozenset()

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variables")
        unknown = self.divisor - set(self.variables)
        if unknown:
            raise ValueError(f"divisor branches {sorted(unknown)} not in context")

    def symbol_order(self, sym: Symbol) -> tuple[int, str]:
        kind, var = sym
        return (0 if kind == "dlog" else 1, var)

    def basis_symbol(self, var: str) -> Symbol:
        if var not in self.variables:
            raise KeyError(f"unknown variable {var}")
        return ("dlog", var) if var in self.divisor else ("d", var)

    def without(self, gone: Iterable[str]) -> FormContext:
        gone = set(gone)
        return FormContext(
            tuple(v for v in self.variables if v not in gone),
            frozenset(self.divisor - gone),
        )


def _sort_symbols(ctx: FormContext, syms: tuple[Symbol, ...]) -> tuple[tuple[Symbol, ...], int] | None:
    """Sort an exterior word; returns (sorted, sign) or None if repeated."""
    keyed = [(ctx.symbol_order(s), s) for s in syms]
    arr = list(keyed)
    sign = 1
    # insertion sort with parity tracking (words are short)
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1][0] > arr[j][0]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(arr, arr[1:]):
        if a[1] == b[1]:
            return None
    return tuple(s for _, s in arr), sign


class LogForm:
    """A graded sum of exterior monomials with rational coefficients."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: FormContext, terms: Mapping[tuple[Symbol, ...], RatFunc] | None = None):
        self.ctx = ctx
        clean: dict[tuple[Symbol, ...], RatFunc] = {}
        if terms:
            for word, coeff in terms.items():
                c = RatFunc.of(coeff)
                if c.is_zero():
                    continue
                sorted_word = _sort_symbols(ctx, tuple(word))
                if sorted_word is None:
                    continue
                word2, sign = sorted_word
                c = c if sign == 1 else -c
                if word2 in clean:
                    c = clean[word2] + c
                if c.is_zero():
                    clean.pop(word2, None)
                else:
                    clean[word2] = c
        for word, coeff in clean.items():
            _check_pole_order(self.ctx, coeff)
        self.terms = clean

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(ctx: FormContext) -> LogForm:
        return LogForm(ctx)

    @staticmethod
    def function(ctx: FormContext, coeff) -> LogForm:
        return LogForm(ctx, {(): RatFunc.of(coeff)})

    @staticmethod
    def d_var(ctx: FormContext, var: str) -> LogForm:
        """The exact differential of a coordinate, in the canonical basis."""
        if var in ctx.divisor:
            return LogForm(ctx, {(("dlog", var),): RatFunc.var(var)})
        return LogForm(ctx, {(("d", var),): RatFunc.const(1)})

    @staticmethod
    def dlog_var(ctx: FormContext, var: str) -> LogForm:
        """dlog of a coordinate: a basis symbol on the divisor, dz/z off it."""
        if var in ctx.divisor:
            return LogForm(ctx, {(("dlog", var),): RatFunc.const(1)})
        return LogForm(ctx, {(("d", var),): RatFunc(Poly.const(1), Poly.var(var))})

    @staticmethod
    def dlog(ctx: FormContext, f: "Poly | RatFunc") -> LogForm:
        """dlog of a rational section, factoring out divisor branches.

        f = prod(z^k) * g with g nonvanishing on the divisor gives
        dlog(f) = sum k dlog(z) + dg/g.
        """
        f = RatFunc.of(f)
        if f.is_zero():
            raise ZeroDivisionError("dlog of zero")
        out = LogForm.zero(ctx)
        num, den = f.num, f.den
        for var in sorted(ctx.divisor):
            k = num.min_degree_in(var) - den.min_degree_in(var)
            if k:
                out = out + LogForm(ctx, {(("dlog", var),): RatFunc.const(k)})
            # strip the branch factor so the remaining part is off-divisor
        stripped = f
        for var in sorted(ctx.divisor):
            k = stripped.num.min_degree_in(var) - stripped.den.min_degree_in(var)
            if k:
                stripped = stripped * RatFunc.var(var) ** (-k)
        out = out + LogForm.d_of(ctx, stripped) * stripped.inv()
        return out

    @staticmethod
    def d_of(ctx: FormContext, f: "Poly | RatFunc") -> LogForm:
        """Exterior differential of a function."""
        f = RatFunc.of(f)
        out = LogForm.zero(ctx)
        for var in sorted(f.variables()):
            if var not in ctx.variables:
                continue  # parameters are constants for d
            df = f.derivative(var)
            if df.is_zero():
                continue
            out = out + LogForm.d_var(ctx, var) * df
        return out

    # -- algebra --------------------------------------------------------

    def degree_terms(self, k: int) -> dict:
        return {w: c for w, c in self.terms.items() if len(w) == k}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LogForm") -> LogForm:
        if isinstance(other, (int, Fraction, RatFunc, Poly)):
            other = LogForm.function(self.ctx, other)
        if self.ctx != other.ctx:
            raise ValueError("forms live in different variable contexts")
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, RatFunc.const(0)) + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return LogForm(self.ctx, out)

    __radd__ = __add__

    def __neg__(self) -> LogForm:
        return LogForm(self.ctx, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> LogForm:
        return self + (-other if isinstance(other, LogForm) else LogForm.function(self.ctx, other) * -1)

    def __mul__(self, scalar) -> LogForm:
        c = RatFunc.of(scalar)
        return LogForm(self.ctx, {w: k * c for w, k in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogForm):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if set(self.terms) != set(other.terms):
            return False
        return all(self.terms[w] == other.terms[w] for w in self.terms)

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms)))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for word in sorted(self.terms, key=lambda w: (len(w), [self.ctx.symbol_order(s) for s in w])):
            c = self.terms[word]
            sym = "^".join(f"{k}({v})" if k == "dlog" else f"d{v}" for k, v in word)
            cs = str(c)
            wrapped = cs if cs.startswith("(") and cs.endswith(")") else f"({cs})"
            if not sym:
                parts.append(wrapped)
            elif cs == "1":
                parts.append(sym)
            else:
                parts.append(f"{sym} * {wrapped}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LogForm({self})"


def _check_pole_order(ctx: FormContext, coeff: RatFunc) -> None:
    for var in ctx.divisor:
        if coeff.den.min_degree_in(var) > 0:
            raise ValueError(
                f"coefficient {coeff} has a pole along the branch {var}; "
                "only simple log poles are representable"
            )


def wedge(a: LogForm, b: LogForm) -> LogForm:
    """Graded-commutative exterior product in normal form."""
    if a.ctx != b.ctx:
        raise ValueError("forms live in different variable contexts")
    out: dict[tuple[Symbol, ...], RatFunc] = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            word = w1 + w2
            sorted_word = _sort_symbols(a.ctx, word)
            if sorted_word is None:
                continue
            word2, sign = sorted_word
            c = c1 * c2 * sign
            if word2 in out:
                c = out[word2] + c
            if c.is_zero():
                out.pop(word2, None)
            else:
                out[word2] = c
    return LogForm(a.ctx, out)


def wedge_all(forms: Iterable[LogForm]) -> LogForm:
    forms = list(forms)
    if not forms:
        raise ValueError("empty wedge")
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def exterior_derivative(a: LogForm) -> LogForm:
    """d on coefficients; the dlog and d symbols themselves are closed."""
    ctx = a.ctx
    out = LogForm.zero(ctx)
    for word, coeff in a.terms.items():
        dc = LogForm.d_of(ctx, coeff)
        if dc.is_zero():
            continue
        tail = LogForm(ctx, {tuple(word): RatFunc.const(1)})
        out = out + wedge(dc, tail)
    return out


def residue(a: LogForm, branch: str) -> LogForm:
    """Residue along a divisor branch: the coefficient form of dlog(branch),
    with the sign from moving the symbol to the front, restricted to the
    branch."""
    if branch not in a.ctx.divisor:
        raise ValueError(f"{branch} is not a divisor branch of the context")
    target = ("dlog", branch)
    new_ctx = a.ctx.without({branch})
    out: dict[tuple[Symbol, ...], RatFunc] = {}
    for word, coeff in a.terms.items():
        if target not in word:
            continue
        idx = word.index(target)
        sign = -1 if idx % 2 else 1
        rest = word[:idx] + word[idx + 1 :]
        c = coeff.restrict(branch, 0) * sign
        if c.is_zero():
            continue
        out[rest] = out.get(rest, RatFunc.const(0)) + c
        if out[rest].is_zero():
            del out[rest]
    return LogForm(new_ctx, out)


def regularized_pullback(
    a: LogForm,
    stratum: Iterable[str],
    jets: Mapping[str, tuple[Fraction, Mapping[str, int]]],
) -> LogForm:
    """Restrict a log form to a coordinate stratum after cancelling its poles.

    Each stratum branch s carries a defining 1-jet y_s = c * prod(z^e) with
    exponent 1 on s and the rest supported off the stratum; substituting
    dlog(s) -> dlog(s) - dlog(y_s) removes the pole along s, after which the
    coefficients restrict to the stratum.
    """
    stratum = tuple(stratum)
    ctx = a.ctx
    for s in stratum:
        if s not in ctx.divisor:
            raise ValueError(f"{s} is not a divisor branch")
    replacements: dict[str, LogForm] = {}
    for s in stratum:
        if s not in jets:
            raise ValueError(f"missing defining jet for branch {s}")
        coeff, exps = jets[s]
        if coeff == 0:
            raise ValueError("jet coefficient must be nonzero")
        exps = dict(exps)
        if exps.get(s, 0) != 1:
            raise ValueError(f"jet for {s} must have exponent 1 on {s}")
        bad = [
            v
            for v, e in exps.items()
            if e and v != s and (v in stratum or v not in ctx.divisor)
        ]
        if bad:
            raise ValueError(
                f"jet for {s} must be invertible off the stratum divisor; "
                f"offending variables {bad}"
            )
        # dlog(s) - dlog(y_s) = -sum_{k != s} e_k dlog(z_k)
        correction = LogForm.zero(ctx)
        for v, e in exps.items():
            if v == s or not e:
                continue
            correction = correction + LogForm.dlog_var(ctx, v) * Fraction(-e)
        replacements[s] = correction

    out = a
    for s in stratum:
        target = ("dlog", s)
        acc: dict[tuple[Symbol, ...], RatFunc] = {}
        result = LogForm.zero(ctx)
        untouched: dict[tuple[Symbol, ...], RatFunc] = {}
        for word, coeff in out.terms.items():
            if target not in word:
                untouched[word] = coeff
                continue
            idx = word.index(target)
            sign = -1 if idx % 2 else 1
            rest = word[:idx] + word[idx + 1 :]
            beta = LogForm(ctx, {rest: coeff * sign})
            result = result + wedge(replacements[s], beta)
        result = result + LogForm(ctx, untouched)
        out = result
    # Now restrict the coefficients to the stratum.
    new_ctx = ctx.without(stratum)
    restricted: dict[tuple[Symbol, ...], RatFunc] = {}
    for word, coeff in out.terms.items():
        if any(v in stratum for _, v in word):
            raise AssertionError("pole cancellation left a stratum symbol")
        c = coeff
        for s in stratum:
            c = c.restrict(s, 0)
        if c.is_zero():
            continue
        restricted[word] = restricted.get(word, RatFunc.const(0)) + c
        if restricted[word].is_zero():
            del restricted[word]
    return LogForm(new_ctx, restricted)


# -- text format --------------------------------------------------------

_SYMBOL_RE = re.compile(r"^(?:dlog\(([A-Za-z_][A-Za-z_0-9]*)\)|d([A-Za-z_][A-Za-z_0-9]*))$")


def parse_form(ctx: FormContext, text: str) -> LogForm:
    """Parse the linear text format, e.g. "dlog(z1)^dz2 * (z2/(1+z2)) + dz2".

    Each summand is an optional chain of symbols joined by '^', optionally
    followed by '*' and a coefficient expression; a summand with no symbols
    is a plain coefficient.
    """
    out = LogForm.zero(ctx)
    for piece, sign in _split_sum(text):
        term = _parse_term(ctx, piece)
        out = out + (term if sign > 0 else term * Fraction(-1))
    return out


def _split_sum(text: str):
    depth = 0
    token = []
    sign = 1
    first = True
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-":
            chunk = "".join(token).strip()
            if chunk:
                yield chunk, sign
                sign = 1
            elif not first and not chunk:
                pass
            if ch == "-":
                sign = -sign if not chunk else -1
            else:
                sign = 1 if chunk else sign
            token = []
            first = False
            continue
        token.append(ch)
        first = False
    chunk = "".join(token).strip()
    if chunk:
        yield chunk, sign


def _parse_term(ctx: FormContext, piece: str) -> LogForm:
    # split at top-level '*' into symbol chain and coefficient factors
    factors = _split_top(piece, "*")
    symbols: list[Symbol] = []
    coeff = RatFunc.const(1)
    for f in factors:
        f = f.strip()
        m = _SYMBOL_RE.match(f)
        if m or "^" in f and all(_SYMBOL_RE.match(x.strip()) for x in _split_top(f, "^")):
            for x in _split_top(f, "^"):
                mm = _SYMBOL_RE.match(x.strip())
                if not mm:
                    raise ValueError(f"bad symbol {x!r}")
                if mm.group(1):
                    symbols.append(("dlog", mm.group(1)))
                else:
                    symbols.append(("d", mm.group(2)))
        else:
            coeff = coeff * parse_rational(f)
    # canonicalize symbols: dz on the divisor means z * dlog z
    form = LogForm.function(ctx, coeff)
    for kind, var in symbols:
        if var not in ctx.variables:
            raise ValueError(f"unknown variable {var}")
        sym_form = LogForm.d_var(ctx, var) if kind == "d" else LogForm.dlog_var(ctx, var)
        form = wedge(form, sym_form)
    return form


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, token = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch == sep:
            out.append("".join(token))
            token = []
        else:
            token.append(ch)
    out.append("".join(token))
    return [t for t in out if t.strip()]


def render_form(a: LogForm) -> str:
    return str(a)
