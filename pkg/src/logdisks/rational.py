"""Exact multivariate polynomial and rational-function arithmetic over Q.

Everything here is built on ``fractions.Fraction``; there is no floating
point anywhere.  Polynomials are sparse dicts mapping monomials to
coefficients, where a monomial is a sorted tuple of (variable, exponent)
pairs.  Rational functions keep an unreduced numerator/denominator pair;
equality is decided exactly by cross multiplication, so full multivariate
gcd is never needed.  Only common monomial factors and scalar content are
cancelled, which is what the restriction maps (setting a variable to zero)
require.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple[tuple[str, int], ...]

Scalar = Union[int, Fraction]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected exact scalar, got {type(c).__name__}")


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = _as_fraction(coeff)
                if c:
                    clean[mono] = c
        self.terms = clean

    # -- constructors ------------------------------------------------

    @staticmethod
    def const(c) -> Poly:
        c = _as_fraction(c)
        return Poly({(): c} if c else {})

    @staticmethod
    def var(name: str, exp: int = 1) -> Poly:
        if exp == 0:
            return Poly.const(1)
        if exp < 0:
            raise ValueError("Poly.var needs a non-negative exponent")
        return Poly({((name, exp),): Fraction(1)})

    @staticmethod
    def monomial(exps: Mapping[str, int], coeff=1) -> Poly:
        mono = tuple(sorted((v, e) for v, e in exps.items() if e))
        if any(e < 0 for _, e in mono):
            raise ValueError("polynomial monomials need non-negative exponents")
        return Poly({mono: _as_fraction(coeff)})

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), Fraction(0))

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return 0
        return max((dict(m).get(var, 0) for m in self.terms), default=0)

    def min_degree_in(self, var: str) -> int:
        if not self.terms:
            return 0
        return min(dict(m).get(var, 0) for m in self.terms)

    # -- arithmetic --------------------------------------------------

    def __add__(self, other) -> Poly:
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, Fraction(0)) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_poly(other) - self

    def __mul__(self, other) -> Poly:
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono, Fraction(0)) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Poly:
        if n < 0:
            raise ValueError("negative power of a Poly; use RatFunc")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus and substitution ------------------------------------

    def derivative(self, var: str) -> Poly:
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            d = dict(mono)
            e = d.get(var, 0)
            if not e:
                continue
            d[var] = e - 1
            new = tuple(sorted((v, k) for v, k in d.items() if k))
            s = out.get(new, Fraction(0)) + c * e
            if s:
                out[new] = s
            else:
                out.pop(new, None)
        return Poly(out)

    def subs(self, values: Mapping[str, "Poly | Fraction | int"]) -> Poly:
        """Substitute polynomials (or constants) for variables."""
        out = Poly.const(0)
        for mono, c in self.terms.items():
            term = Poly.const(c)
            for v, e in mono:
                if v in values:
                    val = values[v]
                    repl = val if isinstance(val, Poly) else Poly.const(val)
                    term = term * repl**e
                else:
                    term = term * Poly.var(v, e)
            out = out + term
        return out

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            val = c
            for v, e in mono:
                if v not in point:
                    raise KeyError(f"no value for variable {v!r}")
                val *= _as_fraction(point[v]) ** e
            total += val
        return total

    def content(self) -> Fraction:
        """Positive rational content (gcd of coefficients), 0 for the zero poly."""
        if not self.terms:
            return Fraction(0)
        from math import gcd

        nums = [abs(c.numerator) for c in self.terms.values()]
        dens = [c.denominator for c in self.terms.values()]
        g = 0
        for n in nums:
            g = gcd(g, n)
        l = 1
        for d in dens:
            l = l * d // gcd(l, d)
        return Fraction(g, l)

    def leading_sign(self) -> int:
        """Sign of the coefficient on the largest monomial in a fixed order."""
        if not self.terms:
            return 0
        mono = max(self.terms)
        return 1 if self.terms[mono] > 0 else -1

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, reverse=True):
            c = self.terms[mono]
            factors = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in mono
            )
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append(factors)
            elif c == -1:
                parts.append(f"-{factors}")
            else:
                parts.append(f"{c}*{factors}")
        out = " + ".join(parts)
        return out.replace("+ -", "- ")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def _coerce_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    if isinstance(x, (int, Fraction)):
        return Poly.const(x)
    return NotImplemented


class RatFunc:
    """Quotient of two Polys; exact, with lazy (monomial-only) cancellation."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.const(1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly.const(1)
        else:
            num, den = _cancel_monomials(num, den)
            num, den = _cancel_content(num, den)
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------

    @staticmethod
    def const(c) -> RatFunc:
        return RatFunc(Poly.const(c))

    @staticmethod
    def var(name: str) -> RatFunc:
        return RatFunc(Poly.var(name))

    @staticmethod
    def of(x) -> RatFunc:
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, Poly):
            return RatFunc(x)
        return RatFunc.const(x)

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> RatFunc:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> RatFunc:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce_rat(other) - self

    def __mul__(self, other) -> RatFunc:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RatFunc:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_rat(other) / self

    def __pow__(self, n: int) -> RatFunc:
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num**n, self.den**n)

    def inv(self) -> RatFunc:
        return RatFunc(self.den, self.num)

    def __eq__(self, other) -> bool:
        other = _coerce_rat(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.num * other.den) == (other.num * self.den)

    def __hash__(self):
        # Cheap canonical-ish hash: constants hash like Fractions.
        if self.is_constant():
            return hash(self.constant_value())
        return hash(frozenset(self.variables()))

    # -- calculus and substitution ------------------------------------

    def derivative(self, var: str) -> RatFunc:
        p, q = self.num, self.den
        return RatFunc(q * p.derivative(var) - p * q.derivative(var), q * q)

    def subs(self, values: Mapping[str, "RatFunc | Poly | Fraction | int"]) -> RatFunc:
        num = _subs_poly_rational(self.num, values)
        den = _subs_poly_rational(self.den, values)
        if den.is_zero():
            raise ZeroDivisionError("substitution makes denominator vanish")
        return num / den

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at {dict(point)}")
        return self.num.evaluate(point) / d

    def restrict(self, var: str, value=0) -> RatFunc:
        """Set one variable to a constant, cancelling stray powers first."""
        num, den = self.num, self.den
        if value == 0:
            k = min(num.min_degree_in(var), den.min_degree_in(var))
            if k:
                num = _divide_var_power(num, var, k)
                den = _divide_var_power(den, var, k)
        num = num.subs({var: Poly.const(value)})
        den = den.subs({var: Poly.const(value)})
        if den.is_zero():
            raise ZeroDivisionError(f"pole at {var} = {value}")
        return RatFunc(num, den)

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if self.den == Poly.const(1):
            return str(self.num)
        return f"({self.num})/({self.den})"


def _coerce_rat(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (Poly, int, Fraction)):
        return RatFunc.of(x)
    return NotImplemented


def _divide_var_power(p: Poly, var: str, k: int) -> Poly:
    out = {}
    for mono, c in p.terms.items():
        d = dict(mono)
        d[var] = d.get(var, 0) - k
        if d[var] < 0:
            raise ValueError("monomial not divisible")
        out[tuple(sorted((v, e) for v, e in d.items() if e))] = c
    return Poly(out)


def _cancel_monomials(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    common_vars = num.variables() & den.variables()
    for v in sorted(common_vars):
        k = min(num.min_degree_in(v), den.min_degree_in(v))
        if k > 0:
            num = _divide_var_power(num, v, k)
            den = _divide_var_power(den, v, k)
    return num, den


def _cancel_content(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    c = den.content() * den.leading_sign()
    if c in (0, 1):
        return num, den
    inv = 1 / c
    return (
        Poly({m: k * inv for m, k in num.terms.items()}),
        Poly({m: k * inv for m, k in den.terms.items()}),
    )


def _subs_poly_rational(p: Poly, values) -> RatFunc:
    out = RatFunc.const(0)
    for mono, c in p.terms.items():
        term = RatFunc.const(c)
        for v, e in mono:
            if v in values:
                term = term * RatFunc.of(values[v]) ** e
            else:
                term = term * RatFunc.var(v) ** e
        out = out + term
    return out


# -- parsing ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z_0-9]*|\*\*|[-+*/^()])")


def _tokenize(s: str) -> list[str]:
    tokens, pos = [], 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"bad character in expression at {s[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


class _ExprParser:
    """Recursive-descent parser for +,-,*,/,^ expressions over named variables."""

    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> RatFunc:
        out = self.sum_expr()
        if self.peek() is not None:
            raise ValueError(f"trailing tokens: {self.tokens[self.pos:]}")
        return out

    def sum_expr(self) -> RatFunc:
        sign = 1
        while self.peek() in ("+", "-"):
            if self.take() == "-":
                sign = -sign
        out = self.product() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            term = self.product()
            out = out + term if op == "+" else out - term
        return out

    def product(self) -> RatFunc:
        out = self.power()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.power()
            out = out * rhs if op == "*" else out / rhs
        return out

    def power(self) -> RatFunc:
        base = self.atom()
        if self.peek() in ("^", "**"):
            self.take()
            neg = False
            if self.peek() == "-":
                self.take()
                neg = True
            tok = self.take()
            if tok is None or not tok.isdigit():
                raise ValueError("exponent must be an integer")
            e = int(tok)
            return base ** (-e if neg else e)
        return base

    def atom(self) -> RatFunc:
        tok = self.take()
        if tok is None:
            raise ValueError("unexpected end of expression")
        if tok == "(":
            inner = self.sum_expr()
            if self.take() != ")":
                raise ValueError("missing closing parenthesis")
            return inner
        if tok == "-":
            return -self.atom()
        if tok.isdigit():
            return RatFunc.const(int(tok))
        if re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
            return RatFunc.var(tok)
        raise ValueError(f"unexpected token {tok!r}")


def parse_rational(s: str) -> RatFunc:
    """Parse expressions like "3/4", "(1+2*g)/(g^2)", "z2/(1+z2")."""
    return _ExprParser(_tokenize(s)).parse()


def parse_scalar(s: str) -> Fraction:
    """Parse a plain rational scalar "p/q"."""
    return Fraction(s.strip())


def format_scalar(x) -> str:
    """Render a field element (Fraction or RatFunc) as a string."""
    if isinstance(x, RatFunc):
        return str(x)
    return str(_as_fraction(x))
