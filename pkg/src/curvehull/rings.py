"""Product coordinate rings of prepared plane curves.

A ring is a product of components: plane-curve quotients
R[x,y]/(f) with f monic in the dependent variable, and point components
isomorphic to R.  Elements carry one normal form per component (a Poly
of dependent-variable degree < deg f, or a rational scalar).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Tuple, Union

from .exactla import resultant
from .poly import Poly, PolyError, grlex_key


class RingError(ValueError):
    """Structural error: mismatched rings, bad component data."""


class OffCurveError(ValueError):
    """Evaluation point does not satisfy the defining equation."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(f"point is off the curve: |f| = {residual!r} exceeds tolerance {tol!r}")


ON_CURVE_TOL = 1e-9  # scaled by (1 + |point|^deg f) at evaluation sites


def monicize(f: Poly, indep: str, dep: str) -> Tuple[Poly, int]:
    """Make f monic in the dependent variable, shearing if necessary.

    Returns (g, m) where g is monic in dep and g(x, y) = c * f(x + m*y, y)
    for the smallest integer m >= 0 that makes the leading form of f
    nonvanishing in the dependent direction (c a normalizing constant).
    """
    f = f.with_vars(tuple(sorted({indep, dep} | set(f.vars))))
    if f.is_zero():
        raise RingError("defining polynomial is zero")
    for m in range(0, f.total_degree() + 2):
        g = f if m == 0 else f.substitute(indep, Poly.var(f.vars, indep) + Poly.var(f.vars, dep).scale(m))
        d = g.degree_in(dep)
        if d < 1:
            continue
        lead = g.coeff_in(dep, d)
        if lead.is_constant() and not lead.is_zero():
            return g.scale(Fraction(1) / lead.constant_value()), m
    raise RingError("no integer shear makes the curve monic in the dependent variable")


def _is_squarefree(f: Poly, indep: str, dep: str) -> bool:
    """Squarefreeness of a dep-monic bivariate f via specialized resultants.

    Res_dep(f, df/d dep) is a polynomial in the independent variable of
    degree at most (2d-1)*m; it vanishes identically iff f has a square
    factor.  f monic in dep means specialization is faithful.
    """
    d = f.degree_in(dep)
    fp = f.derivative(dep)
    m = f.degree_in(indep)
    bound = (2 * d - 1) * max(m, 1) + 1
    for x0 in range(bound + 1):
        pc = [f.coeff_in(dep, k).evaluate({indep: x0, dep: 0}) for k in range(d + 1)]
        qc = [fp.coeff_in(dep, k).evaluate({indep: x0, dep: 0}) for k in range(max(d - 1, 0) + 1)]
        if resultant(pc, qc) != 0:
            return True
    return False


@dataclass(frozen=True)
class PlaneQuotient:
    """Component R[indep, dep]/(f) with f monic of degree >= 1 in dep."""

    indep: str
    dep: str
    f: Poly

    def __post_init__(self):
        if self.indep == self.dep:
            raise RingError("independent and dependent variables must differ")
        extra = {v for v in self.f.vars if self.f.degree_in(v) > 0} - {self.indep, self.dep}
        if extra:
            raise RingError(f"defining polynomial uses variables {extra} beyond ({self.indep},{self.dep})")
        pair = tuple(sorted((self.indep, self.dep)))
        f = Poly(pair, {(e[self.f.vars.index(pair[0])] if pair[0] in self.f.vars else 0,
                         e[self.f.vars.index(pair[1])] if pair[1] in self.f.vars else 0): c
                        for e, c in self.f.terms.items()})
        object.__setattr__(self, "f", f)
        d = f.degree_in(self.dep)
        if d < 1:
            raise RingError("defining polynomial must involve the dependent variable")
        lead = f.coeff_in(self.dep, d)
        if not (lead.is_constant() and lead.constant_value() == 1):
            raise RingError("defining polynomial is not monic in the dependent variable "
                            "(apply monicize() first)")
        if not _is_squarefree(f, self.indep, self.dep):
            raise RingError("defining polynomial is not squarefree")

    @property
    def degree(self) -> int:
        return self.f.degree_in(self.dep)

    def vars(self) -> Tuple[str, str]:
        return (self.indep, self.dep)


@dataclass(frozen=True)
class PointComponent:
    """Component Spec(R): an isolated real point with its ambient image."""

    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))


CurveComponent = Union[PlaneQuotient, PointComponent]


def normal_form(p: Poly, comp: PlaneQuotient) -> Poly:
    """Remainder of p under division by comp.f in the dependent variable."""
    if not isinstance(comp, PlaneQuotient):
        raise RingError("normal_form applies to plane-quotient components only")
    allowed = {comp.indep, comp.dep}
    used = {v for v in p.vars if p.degree_in(v) > 0}
    if not used <= allowed:
        raise RingError(f"polynomial uses variables {used - allowed} outside component ({comp.indep},{comp.dep})")
    p = p.project(comp.f.vars)
    f = comp.f
    d = comp.degree
    k = p.degree_in(comp.dep)
    while not p.is_zero() and k >= d:
        c = p.coeff_in(comp.dep, k)
        p = p - c.shift(comp.dep, k - d) * f
        k = p.degree_in(comp.dep)
    return p


class CurveRing:
    """Ordered product of curve components with unique normal forms."""

    def __init__(self, components: Sequence[CurveComponent]):
        if not components:
            raise RingError("a curve ring needs at least one component")
        self.components = tuple(components)
        for c in self.components:
            if not isinstance(c, (PlaneQuotient, PointComponent)):
                raise RingError(f"unknown component type {type(c).__name__}")

    def __eq__(self, other):
        return isinstance(other, CurveRing) and self.components == other.components

    def element(self, parts: Sequence) -> "RingElement":
        return RingElement(self, parts)

    def zero(self) -> "RingElement":
        return self.element([Poly.zero(c.f.vars) if isinstance(c, PlaneQuotient) else Fraction(0)
                             for c in self.components])

    def one(self) -> "RingElement":
        return self.element([Poly.const(c.f.vars, 1) if isinstance(c, PlaneQuotient) else Fraction(1)
                             for c in self.components])

    def idempotent(self, i: int) -> "RingElement":
        """The elementary idempotent supported on component i."""
        parts = []
        for j, c in enumerate(self.components):
            if isinstance(c, PlaneQuotient):
                parts.append(Poly.const(c.f.vars, 1 if i == j else 0))
            else:
                parts.append(Fraction(1 if i == j else 0))
        return self.element(parts)

    def monomial(self, i: int, exps: Tuple[int, int]) -> "RingElement":
        """indep^a * dep^b supported on plane component i (already reduced)."""
        comp = self.components[i]
        if not isinstance(comp, PlaneQuotient):
            raise RingError(f"component {i} is not a plane quotient")
        a, b = exps
        p = Poly.var(comp.f.vars, comp.indep) ** a * Poly.var(comp.f.vars, comp.dep) ** b
        parts = [normal_form(p, comp) if j == i else
                 (Poly.zero(c.f.vars) if isinstance(c, PlaneQuotient) else Fraction(0))
                 for j, c in enumerate(self.components)]
        return self.element(parts)


class RingElement:
    """Element of a CurveRing in componentwise normal form."""

    __slots__ = ("ring", "parts")

    def __init__(self, ring: CurveRing, parts: Sequence):
        if len(parts) != len(ring.components):
            raise RingError(f"{len(parts)} parts for {len(ring.components)} components")
        norm = []
        for part, comp in zip(parts, ring.components):
            if isinstance(comp, PlaneQuotient):
                if not isinstance(part, Poly):
                    part = Poly.const(comp.f.vars, part)
                norm.append(normal_form(part.with_vars(comp.f.vars), comp))
            else:
                norm.append(Fraction(part))
        self.ring = ring
        self.parts = tuple(norm)

    def _check(self, other: "RingElement"):
        if not isinstance(other, RingElement) or other.ring is not self.ring and other.ring != self.ring:
            raise RingError("ring mismatch")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.ring, [a + b for a, b in zip(self.parts, other.parts)])

    def __sub__(self, other):
        self._check(other)
        return RingElement(self.ring, [a - b for a, b in zip(self.parts, other.parts)])

    def __neg__(self):
        return RingElement(self.ring, [-p for p in self.parts])

    def __mul__(self, other):
        self._check(other)
        return RingElement(self.ring, [a * b for a, b in zip(self.parts, other.parts)])

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.ring, [p.scale(c) if isinstance(p, Poly) else p * c for p in self.parts])

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, RingElement) and self.ring == other.ring and self.parts == other.parts

    def is_zero(self) -> bool:
        return all(p.is_zero() if isinstance(p, Poly) else p == 0 for p in self.parts)

    def is_constant(self) -> bool:
        """True iff the element is a rational multiple of 1 (same on all components)."""
        vals = []
        for p in self.parts:
            if isinstance(p, Poly):
                if not p.is_constant():
                    return False
                vals.append(p.constant_value())
            else:
                vals.append(p)
        return all(v == vals[0] for v in vals)

    def total_degree(self) -> int:
        return max((p.total_degree() for p in self.parts if isinstance(p, Poly)), default=0)

    def support(self):
        """Sparse exact coordinates over monomial keys (comp index, exponents)."""
        out = {}
        for i, (p, comp) in enumerate(zip(self.parts, self.ring.components)):
            if isinstance(p, Poly):
                iv = p.vars.index(comp.indep)
                dv = p.vars.index(comp.dep)
                for e, c in p.terms.items():
                    out[(i, (e[iv], e[dv]))] = c
            elif p != 0:
                out[(i, ())] = p
        return out

    def leading_key(self):
        """Largest support key under (component, total degree, grlex) order."""
        sup = self.support()
        if not sup:
            return (-1, -1, ())
        return max(support_key(k) for k in sup)

    def sort_key(self):
        sup = self.support()
        items = tuple(sorted((support_key(k), c) for k, c in sup.items()))
        return (self.leading_key(), len(items), items)

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.parts) + ")"

    __repr__ = __str__


def support_key(key) -> tuple:
    comp, exps = key
    return (comp, sum(exps), exps)


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    """Componentwise product, reduced to normal form."""
    return a * b


def evaluate(a: RingElement, comp_index: int, point: Sequence, tol: float = ON_CURVE_TOL):
    """Value of the normal form at a point of component comp_index.

    For plane components, point = (indep value, dep value) and must
    satisfy the defining equation within tol * (1 + |point|^deg f);
    point components ignore the argument and return the stored scalar.
    Exact rational points return exact values.
    """
    comp = a.ring.components[comp_index]
    part = a.parts[comp_index]
    if isinstance(comp, PointComponent):
        return part
    if len(point) != 2:
        raise RingError("plane-component points have two coordinates (indep, dep)")
    vals = {comp.indep: point[0], comp.dep: point[1]}
    res = comp.f.evaluate(vals)
    d = comp.f.total_degree()
    norm = max(abs(float(point[0])), abs(float(point[1])), 0.0)
    allowance = tol * (1.0 + (1.0 + norm) ** d)
    if abs(float(res)) > allowance:
        raise OffCurveError(res, allowance)
    return part.evaluate(vals)
