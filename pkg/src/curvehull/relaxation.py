"""Moment relaxation of a constrained curve: lifted space, localizing
matrices, and the exported matrix pencil.

Given generators h_0 = 1, h_1, ..., h_r, subspaces W_0, ..., W_r of the
curve ring and the coordinate subspace L = span(1, x_1, ..., x_n), the
lifted space is U = span of all h_i * w * w' (w, w' in W_i).  Dual
vectors lambda on U with lambda(1) = 1 and all localizing matrices
[lambda(h_i w_j w_k)] PSD project to the relaxed hull via
lambda -> (lambda(x_1), ..., lambda(x_n)).  All coefficients here are
exact rationals; floats appear only when a pencil is handed to the SDP
solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exactla import IncrementalBasis
from .rings import CurveRing, RingElement, RingError, support_key


class RelaxationError(ValueError):
    """Construction error in the relaxation data."""


def _support_order(key):
    return support_key(key)


class SubspaceBasis:
    """Ordered, certified-independent tuple of ring elements."""

    def __init__(self, elements: Sequence[RingElement]):
        elements = tuple(elements)
        if not elements:
            raise RelaxationError("empty subspace basis")
        tracker = IncrementalBasis(key_order=_support_order)
        for el in elements:
            if not tracker.add(el.support()):
                raise RelaxationError(f"subspace basis is linearly dependent at element {el}")
        self.elements = elements

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


@dataclass
class RelaxationSpec:
    """The data (ring, L, generators h_i, subspaces W_i) of one relaxation level.

    L's basis must start with 1 followed by the coordinate functions of
    the embedding; h_0 must be 1 and W_0 must contain 1 in its span.
    """

    ring: CurveRing
    L: SubspaceBasis
    generators: Tuple[RingElement, ...]
    W: Tuple[SubspaceBasis, ...]
    coordinate_names: Tuple[str, ...] = ()

    def __post_init__(self):
        self.generators = tuple(self.generators)
        self.W = tuple(self.W)
        one = self.ring.one()
        if not self.L.elements or self.L.elements[0] != one:
            raise RelaxationError("L must start with the constant 1")
        if not self.generators or self.generators[0] != one:
            raise RelaxationError("the first generator h_0 must be 1")
        if len(self.W) != len(self.generators):
            raise RelaxationError(f"{len(self.W)} subspaces for {len(self.generators)} generators")
        w0 = IncrementalBasis(key_order=_support_order)
        for el in self.W[0]:
            w0.add(el.support())
        if not w0.contains(one.support()):
            raise RelaxationError("W_0 must contain the constant 1 in its span")
        if not self.coordinate_names:
            self.coordinate_names = tuple(f"x{i}" for i in range(1, len(self.L.elements)))

    @property
    def n(self) -> int:
        return len(self.L.elements) - 1

    def check_generators_nonnegative(self, cloud, tol: float = 1e-7) -> None:
        """Numerically verify each h_i >= -tol on sampled curve points."""
        from .rings import evaluate
        for gi, h in enumerate(self.generators):
            for (ci, local) in cloud.sources:
                v = float(evaluate(h, ci, local))
                if v < -tol:
                    raise RelaxationError(
                        f"generator h_{gi} is negative ({v:.3e}) at a sampled point of K")


class USpace:
    """Basis of U with exact coordinate solving and the L embedding."""

    def __init__(self, basis: List[RingElement], tracker: IncrementalBasis,
                 l_indices: List[int]):
        self.basis = tuple(basis)
        self._tracker = tracker
        self.l_indices = tuple(l_indices)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coords(self, el: RingElement) -> Tuple[Fraction, ...]:
        c = self._tracker.coords(el.support())
        if c is None:
            raise RelaxationError(f"element {el} lies outside U")
        return tuple(c) + (Fraction(0),) * (self.dim - len(c))

    def contains(self, el: RingElement) -> bool:
        return self._tracker.coords(el.support()) is not None

    def labels(self) -> List[str]:
        return [str(b) for b in self.basis]


def build_U(spec: RelaxationSpec) -> USpace:
    """Span of all h_i * w * w', with a deterministic basis.

    The basis starts with 1 and the coordinate functions of L (the
    construction requires L inside U), followed by the generated
    products ordered by their leading monomial (graded lex over
    (component, total degree, exponents)), simplest-first on ties.
    """
    candidates: List[RingElement] = []
    seen = set()
    for h, w in zip(spec.generators, spec.W):
        basis = list(w.elements)
        for j in range(len(basis)):
            for k in range(j, len(basis)):
                prod = h * basis[j] * basis[k]
                key = tuple(sorted(((comp, exps), c) for (comp, exps), c in prod.support().items()))
                if key and key not in seen:
                    seen.add(key)
                    candidates.append(prod)

    pool = IncrementalBasis(key_order=_support_order)
    for el in candidates:
        pool.add(el.support())
    for el in spec.L:
        if not pool.contains(el.support()):
            raise RelaxationError(
                f"L is not contained in U: element {el} of L is outside the span of the products")

    tracker = IncrementalBasis(key_order=_support_order)
    basis: List[RingElement] = []
    l_indices: List[int] = []
    for el in spec.L:
        if not tracker.add(el.support()):
            raise RelaxationError("L basis is linearly dependent inside U")
        l_indices.append(len(basis))
        basis.append(el)
    for el in sorted(candidates, key=lambda e: e.sort_key()):
        if tracker.add(el.support()):
            basis.append(el)
    return USpace(basis, tracker, l_indices)


class MomentSDP:
    """Block description of the relaxed moment body.

    For each generator h_i the localizing matrix has entries that are
    exact affine forms in the dual coordinates (lambda(b) for b in the
    U basis past the constant), after substituting lambda(1) = 1.
    ``entries[i][j][k]`` is the coordinate vector (length dim U) of
    normal_form(h_i * w_j * w_k) in the U basis.
    """

    def __init__(self, spec: RelaxationSpec, uspace: USpace):
        self.spec = spec
        self.uspace = uspace
        self.entries: List[List[List[Tuple[Fraction, ...]]]] = []
        for h, w in zip(spec.generators, spec.W):
            basis = list(w.elements)
            dim = len(basis)
            block = [[None] * dim for _ in range(dim)]
            for j in range(dim):
                for k in range(j, dim):
                    coords = uspace.coords(h * basis[j] * basis[k])
                    block[j][k] = coords
                    block[k][j] = coords
            self.entries.append(block)
        self._pencil: Optional[Pencil] = None

    @property
    def n(self) -> int:
        return self.spec.n

    def block_sizes(self) -> List[int]:
        return [len(w.elements) for w in self.spec.W]

    def pencil(self) -> "Pencil":
        if self._pencil is None:
            self._pencil = export_pencil(self)
        return self._pencil

    def evaluation_vector(self, cloud_source) -> np.ndarray:
        """Dual coordinates of the evaluation functional at a curve point."""
        from .rings import evaluate
        comp_index, local = cloud_source
        return np.array([float(evaluate(b, comp_index, local)) for b in self.uspace.basis])

    def instantiate(self, lam: np.ndarray) -> List[np.ndarray]:
        """Numeric localizing matrices for a full dual vector (lam[0] = lambda(1))."""
        out = []
        for block in self.entries:
            dim = len(block)
            mat = np.empty((dim, dim))
            for j in range(dim):
                for k in range(dim):
                    mat[j, k] = sum(float(c) * lam[t]
                                    for t, c in enumerate(block[j][k]) if c != 0)
            out.append(mat)
        return out


def assemble_moment_sdp(spec: RelaxationSpec) -> MomentSDP:
    """Build U and the localizing-matrix forms for the given spec."""
    for w in spec.W:
        if len(w.elements) == 0:
            raise RelaxationError("empty subspace W_i")
    uspace = build_U(spec)
    return MomentSDP(spec, uspace)


@dataclass
class PencilBlock:
    dim: int
    mats: List[List[List[Fraction]]]  # length 1 + nx + ny, each dim x dim

    def constant(self):
        return self.mats[0]


class Pencil:
    """Symmetric pencil M(x, y) = M0 + sum x_i M_i + sum y_j N_j, block diagonal.

    Entries are exact rationals.  x variables are the projected hull
    coordinates; y variables are the remaining dual coordinates of the
    lifted space.
    """

    def __init__(self, blocks: List[PencilBlock], x_names: Sequence[str],
                 y_names: Sequence[str]):
        self.blocks = blocks
        self.x_names = tuple(x_names)
        self.y_names = tuple(y_names)
        for b in blocks:
            if len(b.mats) != 1 + self.nx + self.ny:
                raise RelaxationError("pencil block has wrong number of coefficient matrices")
        self._float_cache = None

    @property
    def nx(self) -> int:
        return len(self.x_names)

    @property
    def ny(self) -> int:
        return len(self.y_names)

    def as_float(self):
        """List of (F0, Fs) per block with Fs stacked over (x..., y...)."""
        if self._float_cache is None:
            out = []
            for b in self.blocks:
                f0 = np.array([[float(v) for v in row] for row in b.mats[0]])
                fs = np.array([[[float(v) for v in row] for row in m] for m in b.mats[1:]])
                if fs.size == 0:
                    fs = np.zeros((self.nx + self.ny, b.dim, b.dim))
                out.append((f0, fs))
            self._float_cache = out
        return self._float_cache

    def instantiate(self, x: Sequence[float], y: Sequence[float]) -> List[np.ndarray]:
        z = np.concatenate([np.asarray(x, dtype=float), np.asarray(y, dtype=float)])
        out = []
        for f0, fs in self.as_float():
            out.append(f0 + np.tensordot(z, fs, axes=(0, 0)))
        return out

    def serialize(self) -> str:
        """Stable textual form; exact rationals, bit-reproducible."""
        lines = [f"pencil nx {self.nx} ny {self.ny} blocks {len(self.blocks)}"]
        for name in self.x_names:
            lines.append(f"xvar {name}")
        for name in self.y_names:
            lines.append(f"yvar {name}")
        names = ["1"] + [f"x:{n}" for n in self.x_names] + [f"y:{n}" for n in self.y_names]
        for bi, b in enumerate(self.blocks):
            lines.append(f"block {bi} dim {b.dim}")
            for mat, name in zip(b.mats, names):
                if all(v == 0 for row in mat for v in row):
                    continue
                lines.append(f"matrix {name}")
                for row in mat:
                    lines.append(" ".join(_frac_str(v) for v in row))
        return "\n".join(lines) + "\n"


def _frac_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def export_pencil(msdp: MomentSDP) -> Pencil:
    """Affine pencil over (x, y) after eliminating lambda(1) = 1.

    Dual coordinate t >= 1 of the U basis becomes variable number t:
    the first n of these are the hull coordinates x (the L part), the
    rest the lifted y variables.
    """
    spec = msdp.spec
    n = spec.n
    dimU = msdp.uspace.dim
    x_names = spec.coordinate_names
    y_names = tuple(str(b) for b in msdp.uspace.basis[1 + n:])
    blocks = []
    for block in msdp.entries:
        dim = len(block)
        mats = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dimU)]
        for j in range(dim):
            for k in range(dim):
                coords = block[j][k]
                for t, c in enumerate(coords):
                    if c != 0:
                        mats[t][j][k] = c
        blocks.append(PencilBlock(dim, mats))
    return Pencil(blocks, x_names, y_names)
