from fractions import Fraction

import numpy as np
import pytest

from curvehull.poly import Poly, parse_poly
from curvehull.relaxation import (MomentSDP, Pencil, RelaxationError, RelaxationSpec,
                                  SubspaceBasis, assemble_moment_sdp, build_U,
                                  export_pencil)
from curvehull.rings import CurveRing, PlaneQuotient, PointComponent

XZ = ("x", "z")
XY = ("x", "y")


def golden_spec():
    """Quartic with isolated origin: ring R[x,z]/(z^2+(x-1)(x-2)) x R,
    L = (1, u, uv), W_0 = (1-e, e, u, v)."""
    ring = CurveRing([
        PlaneQuotient("x", "z", parse_poly("z^2 + (x-1)*(x-2)", XZ)),
        PointComponent((0, 0)),
    ])
    x = Poly.var(XZ, "x")
    z = Poly.var(XZ, "z")
    one = ring.one()
    e = ring.element([1, 0])
    u = ring.element([x, 0])
    v = ring.element([z, 0])
    uv = ring.element([x * z, 0])
    L = SubspaceBasis([one, u, uv])
    W0 = SubspaceBasis([one - e, e, u, v])
    return RelaxationSpec(ring, L, (one,), (W0,), coordinate_names=("x", "y"))


def cubic_spec():
    """y^2 = x^3 - x with W_0 = span(1, x, y) and the identity embedding."""
    ring = CurveRing([PlaneQuotient("x", "y", parse_poly("y^2 - x^3 + x", XY))])
    x = ring.element([Poly.var(XY, "x")])
    y = ring.element([Poly.var(XY, "y")])
    one = ring.one()
    L = SubspaceBasis([one, x, y])
    W0 = SubspaceBasis([one, x, y])
    return RelaxationSpec(ring, L, (one,), (W0,), coordinate_names=("x", "y"))


def test_subspace_basis_rejects_dependence():
    ring = CurveRing([PlaneQuotient("x", "z", parse_poly("z^2 + (x-1)*(x-2)", XZ))])
    one = ring.one()
    x = ring.element([Poly.var(XZ, "x")])
    with pytest.raises(RelaxationError):
        SubspaceBasis([one, x, one + x])


def test_build_U_golden_dimension_and_basis():
    spec = golden_spec()
    u = build_U(spec)
    assert u.dim == 6
    labels = u.labels()
    # L-first ordering, then generated products in graded-lex order
    assert labels[0] == "(1, 1)"         # 1
    assert labels[1] == "(x, 0)"         # u
    assert labels[2] == "(x*z, 0)"       # uv
    assert set(labels[3:]) == {"(1, 0)", "(z, 0)", "(x^2, 0)"}   # e, v, u^2


def test_build_U_rejects_L_outside_U():
    ring = CurveRing([PlaneQuotient("x", "z", parse_poly("z^2 + (x-1)*(x-2)", XZ))])
    one = ring.one()
    x = ring.element([Poly.var(XZ, "x")])
    L = SubspaceBasis([one, x])
    W0 = SubspaceBasis([one])
    spec = RelaxationSpec(ring, L, (one,), (W0,))
    with pytest.raises(RelaxationError, match="not contained"):
        build_U(spec)


def test_build_U_cubic_products_reduce():
    spec = cubic_spec()
    u = build_U(spec)
    # products of (1, x, y): 1, x, y, x^2, xy, y^2 -> x^3 - x; dimension 6
    assert u.dim == 6
    ring = spec.ring
    x3 = ring.element([Poly.var(XY, "x") ** 3])
    assert u.contains(x3)


def test_golden_localizing_matrix_symbolic():
    spec = golden_spec()
    msdp = assemble_moment_sdp(spec)
    assert msdp.block_sizes() == [4]
    basis_labels = msdp.uspace.labels()
    # dual coordinates: xi = lam(u), eta = lam(uv), then lam(e), lam(v), lam(u^2)
    iu = basis_labels.index("(x, 0)")
    iuv = basis_labels.index("(x*z, 0)")
    ie = basis_labels.index("(1, 0)")
    iv = basis_labels.index("(z, 0)")
    iu2 = basis_labels.index("(x^2, 0)")
    assert (iu, iuv) == (1, 2)

    def form(j, k):
        return msdp.entries[0][j][k]

    def affine(const=0, **coeffs):
        vec = [Fraction(0)] * msdp.uspace.dim
        vec[0] = Fraction(const)
        for name, c in coeffs.items():
            vec[{"xi": iu, "eta": iuv, "c": ie, "a": iv, "b": iu2}[name]] = Fraction(c)
        return tuple(vec)

    # matrix in W basis (1-e, e, u, v):
    #   [[1-c, 0,   0,  0  ],
    #    [0,   c,   xi, a  ],
    #    [0,   xi,  b,  eta],
    #    [0,   a,   eta, 3xi - b - 2c]]
    assert form(0, 0) == affine(const=1, c=-1)
    assert form(0, 1) == affine() and form(0, 2) == affine() and form(0, 3) == affine()
    assert form(1, 1) == affine(c=1)
    assert form(1, 2) == affine(xi=1)
    assert form(1, 3) == affine(a=1)
    assert form(2, 2) == affine(b=1)
    assert form(2, 3) == affine(eta=1)
    assert form(3, 3) == affine(xi=3, b=-1, c=-2)


def test_golden_evaluation_feasibility():
    spec = golden_spec()
    msdp = assemble_moment_sdp(spec)
    # evaluation at the curve point (x,z) = (2,0)
    lam = msdp.evaluation_vector((0, (Fraction(2), Fraction(0))))
    assert lam[0] == 1.0
    mats = msdp.instantiate(lam)
    eigs = np.linalg.eigvalsh(mats[0])
    assert eigs.min() >= -1e-12
    # the dual coordinates are (c, xi, a, b, eta) = (1, 2, 0, 4, 0)
    labels = msdp.uspace.labels()
    assert lam[labels.index("(1, 0)")] == 1.0
    assert lam[labels.index("(x, 0)")] == 2.0
    assert lam[labels.index("(x^2, 0)")] == 4.0


def test_golden_evaluation_at_point_component():
    spec = golden_spec()
    msdp = assemble_moment_sdp(spec)
    lam = msdp.evaluation_vector((1, ()))
    mats = msdp.instantiate(lam)
    assert np.allclose(mats[0], np.diag([1.0, 0, 0, 0]))


def test_export_pencil_golden_shape_and_entries():
    spec = golden_spec()
    msdp = assemble_moment_sdp(spec)
    pencil = export_pencil(msdp)
    assert pencil.nx == 2 and pencil.ny == 3
    assert pencil.blocks[0].dim == 4
    y = list(pencil.y_names)
    jc, ja, jb = y.index("(1, 0)"), y.index("(z, 0)"), y.index("(x^2, 0)")

    def mat(label):
        idx = {"M0": 0, "xi": 1, "eta": 2, "c": 3 + jc, "a": 3 + ja, "b": 3 + jb}[label]
        return [[Fraction(v) for v in row] for row in pencil.blocks[0].mats[idx]]

    F = Fraction
    assert mat("M0") == [[F(1), 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert mat("xi") == [[0, 0, 0, 0], [0, 0, F(1), 0], [0, F(1), 0, 0], [0, 0, 0, F(3)]]
    assert mat("eta") == [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, F(1)], [0, 0, F(1), 0]]
    assert mat("c") == [[F(-1), 0, 0, 0], [0, F(1), 0, 0], [0, 0, 0, 0], [0, 0, 0, F(-2)]]
    assert mat("a") == [[0, 0, 0, 0], [0, 0, 0, F(1)], [0, 0, 0, 0], [0, F(1), 0, 0]]
    assert mat("b") == [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, F(1), 0], [0, 0, 0, F(-1)]]


def test_trivial_pencil_no_variables():
    ring = CurveRing([PlaneQuotient("x", "z", parse_poly("z^2 + (x-1)*(x-2)", XZ))])
    one = ring.one()
    spec = RelaxationSpec(ring, SubspaceBasis([one]), (one,), (SubspaceBasis([one]),))
    pencil = export_pencil(assemble_moment_sdp(spec))
    assert pencil.nx == 0 and pencil.ny == 0
    assert pencil.blocks[0].mats[0] == [[Fraction(1)]]


def test_cubic_band_block_sizes():
    # y^2 = x^3 - x ... oval band at level 2: W_0 has monomials of degree <= 2
    # with y-degree < 2, W_1 (deg h = 2) the constants plus degree-1 terms? no:
    # 2 - ceil(2/2) = 1 -> (1, x, y) minus cap -> degree <= 1
    from curvehull.pipeline import default_subspaces
    ring = CurveRing([PlaneQuotient("x", "y", parse_poly("y^2 + x^3 - x", XY))])
    x = ring.element([Poly.var(XY, "x")])
    one = ring.one()
    h1 = x - x * x  # band selecting the oval 0 <= x <= 1
    W = default_subspaces(ring, (one, h1), level=2)
    assert [len(w) for w in W] == [5, 3]   # (1,x,y,x^2,xy) and (1,x,y)


def test_spec_requires_h0_one_and_w0_one():
    ring = CurveRing([PlaneQuotient("x", "z", parse_poly("z^2 + (x-1)*(x-2)", XZ))])
    one = ring.one()
    x = ring.element([Poly.var(XZ, "x")])
    with pytest.raises(RelaxationError):
        RelaxationSpec(ring, SubspaceBasis([one, x]), (x,), (SubspaceBasis([one]),))
    with pytest.raises(RelaxationError):
        RelaxationSpec(ring, SubspaceBasis([one, x]), (one,), (SubspaceBasis([x]),))


def test_serialize_stable():
    spec = golden_spec()
    pencil = export_pencil(assemble_moment_sdp(spec))
    text1 = pencil.serialize()
    text2 = export_pencil(assemble_moment_sdp(golden_spec())).serialize()
    assert text1 == text2
    assert text1.startswith("pencil nx 2 ny 3 blocks 1\n")
    assert "matrix 1" in text1 and "matrix x:x" in text1
