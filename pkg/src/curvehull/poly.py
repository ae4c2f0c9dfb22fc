"""Exact sparse multivariate polynomials with rational coefficients.

A polynomial is a map from exponent tuples to nonzero Fraction
coefficients, over a fixed ordered tuple of variable names.  All
arithmetic is exact; floats never enter this module except through
evaluation at float points.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Scalar = Union[int, Fraction]


class PolyError(ValueError):
    """Structural error in polynomial construction or arithmetic."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise PolyError(f"coefficient {c!r} is not exact (int/Fraction/str expected)")


def grlex_key(exps: tuple) -> tuple:
    """Graded-lexicographic sort key for an exponent tuple."""
    return (sum(exps), exps)


class Poly:
    """Immutable sparse polynomial over Q.

    ``terms`` maps exponent tuples (one entry per variable, nonnegative)
    to nonzero Fraction coefficients.  Invariants: no zero coefficient is
    stored, and every tuple has arity len(vars).
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, Scalar]):
        vars = tuple(vars)
        clean = {}
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(vars):
                raise PolyError(f"exponent tuple {exps} has arity {len(exps)}, expected {len(vars)}")
            if any(e < 0 for e in exps):
                raise PolyError(f"negative exponent in {exps}")
            c = _as_fraction(c)
            if c != 0:
                clean[exps] = c
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("Poly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Poly":
        return cls(vars, {})

    @classmethod
    def const(cls, vars: Sequence[str], c) -> "Poly":
        return cls(vars, {(0,) * len(tuple(vars)): _as_fraction(c)})

    @classmethod
    def var(cls, vars: Sequence[str], name: str) -> "Poly":
        vars = tuple(vars)
        if name not in vars:
            raise PolyError(f"unknown variable {name!r} (have {vars})")
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): Fraction(1)})

    # -- coercion ----------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.vars == self.vars:
                return other
            return other.with_vars(sorted(set(self.vars) | set(other.vars)))
        return Poly.const(self.vars, other)

    def with_vars(self, vars: Sequence[str]) -> "Poly":
        """Re-express over a variable tuple that contains all current vars."""
        vars = tuple(vars)
        idx = []
        for v in self.vars:
            if v not in vars:
                raise PolyError(f"variable {v!r} missing from target tuple {vars}")
            idx.append(vars.index(v))
        terms = {}
        for exps, c in self.terms.items():
            e = [0] * len(vars)
            for i, p in zip(idx, exps):
                e[i] = p
            terms[tuple(e)] = c
        return Poly(vars, terms)

    def _aligned(self, other):
        other = self._coerce(other)
        if other.vars == self.vars:
            return self, other
        vars = tuple(sorted(set(self.vars) | set(other.vars)))
        return self.with_vars(vars), other.with_vars(vars)

    def project(self, vars: Sequence[str]) -> "Poly":
        """Re-express over vars, dropping variables of degree zero.

        Fails if a variable of positive degree is not in the target."""
        vars = tuple(vars)
        used = {v for v in self.vars if self.degree_in(v) > 0}
        if not used <= set(vars):
            raise PolyError(f"variables {used - set(vars)} cannot be projected away")
        pos = {v: i for i, v in enumerate(vars)}
        terms = {}
        for e, c in self.terms.items():
            e2 = [0] * len(vars)
            for v, p in zip(self.vars, e):
                if p:
                    e2[pos[v]] = p
            key = tuple(e2)
            terms[key] = terms.get(key, Fraction(0)) + c
        return Poly(vars, terms)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        a, b = self._aligned(other)
        terms = dict(a.terms)
        for e, c in b.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Poly(a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._aligned(other)
        terms = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return Poly(a.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolyError("exponent must be a nonnegative integer")
        out = Poly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        c = _as_fraction(c)
        return Poly(self.vars, {e: c * v for e, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = self._coerce(other)
        a, b = self._aligned(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolyError("polynomial is not constant")
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.vars.index(name)
        if not self.terms:
            return 0
        return max(e[i] for e in self.terms)

    def coeff_in(self, name: str, k: int) -> "Poly":
        """Coefficient of name**k, as a polynomial over the same variables."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                terms[tuple(e2)] = c
        return Poly(self.vars, terms)

    def shift(self, name: str, k: int) -> "Poly":
        """Multiply by name**k."""
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[i] += k
            terms[tuple(e2)] = c
        return Poly(self.vars, terms)

    def top_form(self) -> "Poly":
        """Homogeneous part of highest total degree."""
        d = self.total_degree()
        return Poly(self.vars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def derivative(self, name: str) -> "Poly":
        i = self.vars.index(name)
        terms = {}
        for e, c in self.terms.items():
            if e[i] > 0:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i]
        return Poly(self.vars, terms)

    def substitute(self, name: str, repl: "Poly") -> "Poly":
        """Replace a variable by a polynomial (exact)."""
        i = self.vars.index(name)
        repl = repl.with_vars(tuple(sorted(set(self.vars) | set(repl.vars))))
        out = Poly.zero(repl.vars)
        powers = {0: Poly.const(repl.vars, 1)}
        for e, c in self.terms.items():
            k = e[i]
            if k not in powers:
                powers[k] = repl ** k
            rest = list(e)
            rest[i] = 0
            mono = Poly(self.vars, {tuple(rest): c}).with_vars(repl.vars)
            out = out + mono * powers[k]
        return out

    def evaluate(self, point: Mapping[str, object]):
        """Evaluate at a point given as {var: value}.

        Exact (Fraction) when all values are int/Fraction, float otherwise.
        """
        vals = []
        exact = True
        for v in self.vars:
            if v not in point:
                raise PolyError(f"no value supplied for variable {v!r}")
            x = point[v]
            if isinstance(x, (int, Fraction)):
                vals.append(Fraction(x))
            else:
                vals.append(float(x))
                exact = False
        total = Fraction(0) if exact else 0.0
        for e, c in self.terms.items():
            t = c if exact else float(c)
            for x, p in zip(vals, e):
                if p:
                    t = t * x ** p
            total = total + t
        return total

    # -- rendering ---------------------------------------------------------

    def sorted_terms(self):
        """Terms ordered graded-lex descending (deterministic rendering)."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            factors = []
            for v, e in zip(self.vars, exps):
                if e == 1:
                    factors.append(v)
                elif e > 1:
                    factors.append(f"{v}^{e}")
            mono = "*".join(factors)
            if not mono:
                body = str(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = "-" + mono
            else:
                body = f"{c}*{mono}"
            if parts and not body.startswith("-"):
                parts.append("+" + body)
            else:
                parts.append(body)
        return "".join(parts)

    __repr__ = __str__


# -- parsing ----------------------------------------------------------------

class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise PolyError(f"parse error at column {self.pos + 1}: {msg} (in {self.text!r})")

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def take_number(self) -> Fraction:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit() or self.text[self.pos] == "."):
            self.pos += 1
        tok = self.text[start:self.pos]
        try:
            return Fraction(tok)
        except (ValueError, ZeroDivisionError):
            self.error(f"bad number {tok!r}")

    def take_name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def parse_poly(text: str, vars: Sequence[str]) -> Poly:
    """Parse '+ - * / ^ ( )' expressions over the given variables.

    Division is only allowed by nonzero constants; exponents are
    nonnegative integers ('**' is accepted as a synonym for '^').
    """
    vars = tuple(vars)
    toks = _Tokens(text)

    def parse_expr():
        node = parse_term()
        while True:
            ch = toks.peek()
            if ch == "+":
                toks.pos += 1
                node = node + parse_term()
            elif ch == "-":
                toks.pos += 1
                node = node - parse_term()
            else:
                return node

    def parse_term():
        node = parse_factor()
        while True:
            ch = toks.peek()
            if ch == "*" and not toks.text[toks.pos:toks.pos + 2] == "**":
                toks.pos += 1
                node = node * parse_factor()
            elif ch == "/":
                toks.pos += 1
                d = parse_factor()
                if not d.is_constant() or d.constant_value() == 0:
                    toks.error("division is only allowed by a nonzero constant")
                node = node.scale(Fraction(1) / d.constant_value())
            else:
                return node

    def parse_factor():
        ch = toks.peek()
        sign = 1
        while ch in ("+", "-"):
            if ch == "-":
                sign = -sign
            toks.pos += 1
            ch = toks.peek()
        node = parse_atom()
        while True:
            ch = toks.peek()
            if ch == "^" or toks.text[toks.pos:toks.pos + 2] == "**":
                toks.pos += 1 if ch == "^" else 2
                if toks.peek() is None or not toks.peek().isdigit():
                    toks.error("integer exponent expected")
                k = toks.take_number()
                if k.denominator != 1 or k < 0:
                    toks.error("exponent must be a nonnegative integer")
                node = node ** int(k)
            else:
                break
        return node if sign == 1 else -node

    def parse_atom():
        ch = toks.peek()
        if ch is None:
            toks.error("unexpected end of input")
        if ch == "(":
            toks.pos += 1
            node = parse_expr()
            if toks.peek() != ")":
                toks.error("missing ')'")
            toks.pos += 1
            return node
        if ch.isdigit() or ch == ".":
            return Poly.const(vars, toks.take_number())
        if ch.isalpha() or ch == "_":
            name = toks.take_name()
            if name not in vars:
                toks.error(f"unknown variable {name!r} (expected one of {list(vars)})")
            return Poly.var(vars, name)
        toks.error(f"unexpected character {ch!r}")

    node = parse_expr()
    if toks.peek() is not None:
        toks.error(f"trailing input {toks.text[toks.pos:]!r}")
    return node
