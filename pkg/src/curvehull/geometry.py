"""Ground truth and certification: curve sampling, support functions,
membership queries, asymptotic directions, homogenization and base
compactification.

Curve points are sampled by scanning the independent variable of each
plane component and solving the dependent-variable equation by
companion-matrix eigenvalues with one Newton polish; branch turning
points (where the real-root count changes) are localized by bisection so
that support values at vertical tangents are sharp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import sdp
from .kernels import poly_eval, poly_to_arrays
from .poly import Poly
from .relaxation import MomentSDP, Pencil, PencilBlock
from .rings import (ON_CURVE_TOL, CurveRing, PlaneQuotient, PointComponent,
                    RingElement, evaluate)

CONSTRAINT_TOL = 1e-9
DEFAULT_SEED = 2024


class GeometryError(ValueError):
    pass


class UnboundedSupport(GeometryError):
    """A support direction came back unbounded although K was asserted
    compact: the relaxation level does not yet confine the lift."""


class SolverInaccurate(RuntimeError):
    """An SDP subproblem finished without a trustworthy status."""

    def __init__(self, solution, context=""):
        self.solution = solution
        super().__init__(f"SDP solve inaccurate ({context}): {solution.message}")


# -- sample clouds -----------------------------------------------------------

@dataclass
class SampleCloud:
    """Images under the embedding of sampled curve points.

    sources[i] identifies the curve point behind points[i]: a component
    index and the local coordinates ((indep, dep) for plane components,
    () for point components).
    """

    points: np.ndarray                   # (N, n)
    residuals: np.ndarray                # (N,)
    sources: List[Tuple[int, tuple]]

    def __len__(self):
        return len(self.sources)

    def is_empty(self) -> bool:
        return len(self.sources) == 0

    def diameter(self) -> float:
        if len(self.sources) < 2:
            return 0.0
        pts = self.points
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def to_csv(self, names: Sequence[str]) -> str:
        lines = [",".join(list(names) + ["residual"])]
        for p, r in zip(self.points, self.residuals):
            lines.append(",".join(f"{v:.17g}" for v in p) + f",{r:.17g}")
        return "\n".join(lines) + "\n"


def _real_roots(coeffs: np.ndarray, imag_tol: float = 1e-8) -> np.ndarray:
    """Real roots of c_0 + c_1 t + ... + c_d t^d (c_d nonzero) via the
    companion matrix, imaginary parts below imag_tol discarded."""
    d = len(coeffs) - 1
    if d == 0:
        return np.zeros(0)
    if d == 1:
        return np.array([-coeffs[0] / coeffs[1]])
    comp = np.zeros((d, d))
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -np.asarray(coeffs[:-1]) / coeffs[-1]
    roots = np.linalg.eigvals(comp)
    scale = 1.0 + np.abs(roots).max(initial=0.0)
    keep = np.abs(roots.imag) <= imag_tol * scale
    return np.sort(roots[keep].real)


def _dep_coeff_arrays(comp: PlaneQuotient):
    d = comp.degree
    return [poly_to_arrays(comp.f.coeff_in(comp.dep, k), comp.indep, comp.dep)
            for k in range(d + 1)]


def _coeffs_at(comp_arrays, xs: np.ndarray) -> np.ndarray:
    zeros = np.zeros_like(xs)
    cols = [poly_eval(e1, e2, c, xs, zeros) for (e1, e2, c) in comp_arrays]
    return np.stack(cols, axis=1)   # (N, d+1)


def _roots_on_fiber(comp: PlaneQuotient, arrays, x0: float, fpoly, fprime) -> List[float]:
    coeffs = _coeffs_at(arrays, np.array([x0]))[0]
    roots = _real_roots(coeffs)
    out = []
    for y0 in roots:
        y0 = float(y0)
        f0 = fpoly.evaluate({comp.indep: x0, comp.dep: y0})
        fy = fprime.evaluate({comp.indep: x0, comp.dep: y0})
        if abs(fy) > 1e-12 * (1.0 + abs(f0)):
            y1 = y0 - f0 / fy
            if abs(fpoly.evaluate({comp.indep: x0, comp.dep: y1})) < abs(f0):
                y0 = y1
        out.append(y0)
    return out


def _on_curve(comp: PlaneQuotient, fpoly, x0: float, y0: float) -> Tuple[bool, float]:
    res = abs(fpoly.evaluate({comp.indep: x0, comp.dep: y0}))
    norm = max(abs(x0), abs(y0))
    allowance = ON_CURVE_TOL * (1.0 + (1.0 + norm) ** fpoly.total_degree())
    return res <= allowance, res


def sample_curve(ring: CurveRing, phi: Sequence[RingElement],
                 constraints: Sequence[RingElement],
                 box: Dict[str, Tuple[float, float]], grid: int,
                 refine_turnings: bool = True,
                 extra_fibers: Optional[Dict[int, Sequence[float]]] = None) -> SampleCloud:
    """Sample the constrained set K and map it through the embedding phi.

    box gives the scan interval per independent-variable name (missing
    names fall back to the widest interval present).  Points failing a
    constraint by more than 1e-9 are discarded.  extra_fibers adds
    specific independent-variable values per component (used for tail
    sampling of noncompact curves).
    """
    if grid < 2:
        raise GeometryError("grid must be >= 2")
    points, residuals, sources = [], [], []

    def admit(ci, local):
        for h in constraints:
            if float(evaluate(h, ci, local)) < -CONSTRAINT_TOL:
                return False
        return True

    def image(ci, local):
        return [float(evaluate(p, ci, local)) for p in phi]

    fallback = None
    if box:
        m = max(max(abs(lo), abs(hi)) for lo, hi in box.values())
        fallback = (-2.0 * m, 2.0 * m)

    for ci, comp in enumerate(ring.components):
        if isinstance(comp, PointComponent):
            if admit(ci, ()):
                points.append(image(ci, ()))
                residuals.append(0.0)
                sources.append((ci, ()))
            continue
        interval = box.get(comp.indep, fallback)
        if interval is None:
            raise GeometryError(f"no scan interval for variable {comp.indep!r}")
        lo, hi = float(interval[0]), float(interval[1])
        if not hi > lo:
            raise GeometryError(f"empty scan interval for {comp.indep!r}")
        arrays = _dep_coeff_arrays(comp)
        fpoly = comp.f
        fprime = comp.f.derivative(comp.dep)
        xs = list(np.linspace(lo, hi, grid))
        if extra_fibers and ci in extra_fibers:
            xs.extend(float(v) for v in extra_fibers[ci])
        fiber_roots = {x0: _roots_on_fiber(comp, arrays, x0, fpoly, fprime) for x0 in xs}

        if refine_turnings:
            base = sorted(np.linspace(lo, hi, grid))
            for a, b in zip(base[:-1], base[1:]):
                na, nb = len(fiber_roots[a]), len(fiber_roots[b])
                if na == nb:
                    continue
                la, lb = a, b
                ra, rb = na, nb
                for _ in range(60):
                    mid = 0.5 * (la + lb)
                    if lb - la <= 1e-13 * (1.0 + abs(mid)):
                        break
                    nm = len(_roots_on_fiber(comp, arrays, mid, fpoly, fprime))
                    if nm == ra:
                        la = mid
                    else:
                        lb = mid
                # keep the endpoint on the side with more branches
                x_t = la if ra > rb else lb
                fiber_roots[x_t] = _roots_on_fiber(comp, arrays, x_t, fpoly, fprime)

        for x0 in sorted(fiber_roots):
            for y0 in fiber_roots[x0]:
                ok, res = _on_curve(comp, fpoly, x0, y0)
                if not ok:
                    continue
                local = (x0, y0)
                if admit(ci, local):
                    points.append(image(ci, local))
                    residuals.append(res)
                    sources.append((ci, local))

    n = len(phi)
    pts = np.array(points, dtype=float).reshape(len(sources), n)
    return SampleCloud(pts, np.array(residuals, dtype=float), sources)


# -- support functions and exactness ----------------------------------------

def uniform_directions(n: int, count: int = 64, seed: int = DEFAULT_SEED) -> np.ndarray:
    """64 uniform angles for n=2; axes plus seeded random directions for n>=3."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        ang = np.arange(count) * (2.0 * np.pi / count)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rng = np.random.default_rng(seed)
    dirs = [v for i in range(n) for v in (np.eye(n)[i], -np.eye(n)[i])]
    raw = rng.normal(size=(200, n))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return np.concatenate([np.array(dirs), raw], axis=0)


def support_sampled(cloud: SampleCloud, dirs: np.ndarray) -> np.ndarray:
    if cloud.is_empty():
        raise GeometryError("empty sample cloud")
    return (np.asarray(dirs, dtype=float) @ cloud.points.T).max(axis=1)


def _pencil_of(obj) -> Pencil:
    if isinstance(obj, Pencil):
        return obj
    if isinstance(obj, MomentSDP):
        return obj.pencil()
    raise GeometryError(f"expected a Pencil or MomentSDP, got {type(obj).__name__}")


def support_problem(pencil: Pencil, direction: np.ndarray) -> sdp.SDPProblem:
    m = pencil.nx + pencil.ny
    g = np.zeros(m)
    g[:pencil.nx] = np.asarray(direction, dtype=float)
    blocks = [(f0.copy(), fs.copy()) for f0, fs in pencil.as_float()]
    return sdp.SDPProblem(m, blocks, objective=g)


def support_relaxed(msdp_or_pencil, dirs: np.ndarray,
                    on_inaccurate: str = "raise") -> np.ndarray:
    """SDP support values of the relaxed body; Unbounded maps to +inf."""
    pencil = _pencil_of(msdp_or_pencil)
    out = np.empty(len(dirs))
    for i, c in enumerate(np.asarray(dirs, dtype=float)):
        sol = sdp.solve(support_problem(pencil, c))
        if sol.status == sdp.OPTIMAL:
            out[i] = sol.objective
        elif sol.status == sdp.UNBOUNDED:
            out[i] = np.inf
        elif sol.status == sdp.INFEASIBLE:
            out[i] = -np.inf
        else:
            if on_inaccurate == "raise":
                raise SolverInaccurate(sol, context=f"support direction {c}")
            out[i] = np.nan
    return out


@dataclass
class GapReport:
    directions: np.ndarray
    sampled: np.ndarray
    relaxed: np.ndarray

    @property
    def gap(self) -> float:
        return float(max(0.0, np.max(self.relaxed - self.sampled)))

    def to_csv(self) -> str:
        n = self.directions.shape[1]
        head = ",".join([f"c{i+1}" for i in range(n)] + ["sampled", "relaxed", "gap"])
        lines = [head]
        for c, s, r in zip(self.directions, self.sampled, self.relaxed):
            lines.append(",".join(f"{v:.17g}" for v in c)
                         + f",{s:.17g},{r:.17g},{r - s:.17g}")
        return "\n".join(lines) + "\n"


def exactness_gap(msdp_or_pencil, dirs: np.ndarray, cloud: SampleCloud,
                  containment_tol: float = 1e-6) -> GapReport:
    """Max over directions of (relaxed support - sampled support).

    The sampled support can never exceed the relaxed one beyond
    containment_tol (the relaxation contains the hull); a violation or an
    unbounded direction on a compact job is an inconsistency error.
    """
    dirs = np.asarray(dirs, dtype=float)
    sampled = support_sampled(cloud, dirs)
    relaxed = support_relaxed(msdp_or_pencil, dirs)
    if np.any(np.isposinf(relaxed)):
        bad = dirs[np.isposinf(relaxed)][0]
        raise UnboundedSupport(f"relaxed support is unbounded in direction {bad} "
                               "but K was asserted compact")
    worst = float(np.min(relaxed - sampled))
    if worst < -containment_tol:
        raise GeometryError(f"containment violated: sampled exceeds relaxed by {-worst:.3e}")
    return GapReport(dirs, sampled, relaxed)


# -- membership ---------------------------------------------------------------

@dataclass
class MembershipResult:
    status: str                       # "Inside" | "Outside" | "Indeterminate"
    margin: float
    witness: Optional[np.ndarray] = None
    separating_direction: Optional[np.ndarray] = None

    def __bool__(self):
        return self.status == "Inside"


def restrict_pencil(pencil: Pencil, fixed: Dict[int, Fraction]) -> Pencil:
    """Pin a subset of the x variables to exact values (new exact pencil)."""
    keep = [i for i in range(pencil.nx) if i not in fixed]
    blocks = []
    for b in pencil.blocks:
        m0 = [[b.mats[0][j][k] for k in range(b.dim)] for j in range(b.dim)]
        for i, v in fixed.items():
            mi = b.mats[1 + i]
            v = Fraction(v)
            for j in range(b.dim):
                for k in range(b.dim):
                    m0[j][k] += v * mi[j][k]
        mats = [m0] + [b.mats[1 + i] for i in keep] + list(b.mats[1 + pencil.nx:])
        blocks.append(PencilBlock(b.dim, mats))
    return Pencil(blocks, [pencil.x_names[i] for i in keep], pencil.y_names)


def membership_problem(pencil: Pencil, point: Sequence[float],
                       cap: Optional[float] = 1.0) -> sdp.SDPProblem:
    """Max-margin feasibility: maximize t s.t. M(point, y) - t*I >= 0, t <= cap.

    The cap keeps the optimum attained whenever the uncapped margin
    supremum exceeds it (the supremum may otherwise be approached only as
    the lifted moments grow without bound); membership only needs the
    sign of the margin."""
    point = np.asarray(point, dtype=float)
    if len(point) != pencil.nx:
        raise GeometryError(f"point has {len(point)} coordinates, pencil has nx={pencil.nx}")
    m = pencil.ny + 1
    blocks = []
    for f0, fs in pencil.as_float():
        d = f0.shape[0]
        F0 = f0 + np.tensordot(point, fs[:pencil.nx], axes=(0, 0))
        Fs = np.concatenate([fs[pencil.nx:], -np.eye(d)[None]], axis=0)
        blocks.append((F0, Fs))
    if cap is not None:
        capFs = np.zeros((m, 1, 1))
        capFs[-1, 0, 0] = -1.0
        blocks.append((np.eye(1) * cap, capFs))
    g = np.zeros(m)
    g[-1] = 1.0
    return sdp.SDPProblem(m, blocks, objective=g)


def membership(point: Sequence[float], msdp_or_pencil, tol: float = 1e-7,
               dirs: Optional[np.ndarray] = None,
               find_separator: bool = True) -> MembershipResult:
    """Inside with a PSD witness margin, or Outside with a separating
    direction found by support comparison.

    When the max-margin solve stalls (the margin supremum can be
    unattained over the lift), the final iterate is still checked as an
    explicit witness, and the separating-direction scan can certify
    Outside independently of the stalled margin value."""
    pencil = _pencil_of(msdp_or_pencil)
    point = np.asarray(point, dtype=float)
    margin = None
    witness = None
    # caps: an informative margin first; if the supremum is unattained the
    # solve stalls, and a cap at the decision threshold forces attainment
    # for any point whose true margin exceeds it
    for cap in (1.0, max(tol, 1e-9)):
        sol = sdp.solve(membership_problem(pencil, point, cap=cap))
        if sol.status == sdp.UNBOUNDED:
            return MembershipResult("Inside", np.inf)
        if sol.status == sdp.OPTIMAL:
            margin = sol.objective
            witness = sol.x[:-1]
            break
        if sol.x is not None:
            lb = sol.psd_residual + sol.x[-1]
            if lb >= -tol:
                return MembershipResult("Inside", lb, witness=sol.x[:-1])
    if margin is not None and margin >= -tol:
        return MembershipResult("Inside", margin, witness=witness)
    sep = None
    if find_separator or margin is None:
        if dirs is None:
            dirs = uniform_directions(pencil.nx)
        vals = support_relaxed(pencil, dirs, on_inaccurate="nan")
        with np.errstate(invalid="ignore"):
            viol = dirs @ point - vals
        viol = np.where(np.isnan(viol), -np.inf, viol)
        best = int(np.argmax(viol))
        if viol[best] > max(tol, 1e-9 * (1.0 + np.abs(point).max())):
            sep = dirs[best]
    if margin is None:
        if sep is not None:
            return MembershipResult("Outside", np.nan, separating_direction=sep)
        return MembershipResult("Indeterminate", np.nan)
    return MembershipResult("Outside", margin, separating_direction=sep)


def membership_via_forms(point: Sequence[float], msdp: MomentSDP,
                         tol: float = 1e-7) -> MembershipResult:
    """Membership through the internal moment form with pinned projections
    (equality constraints), used to cross-check the exported pencil."""
    pencil = msdp.pencil()
    point = np.asarray(point, dtype=float)
    m = pencil.nx + pencil.ny + 1
    blocks = []
    for f0, fs in pencil.as_float():
        d = f0.shape[0]
        Fs = np.concatenate([fs, -np.eye(d)[None]], axis=0)
        blocks.append((f0.copy(), Fs))
    cap = np.zeros((m, 1, 1))
    cap[-1, 0, 0] = -1.0
    blocks.append((np.eye(1), cap))
    g = np.zeros(m)
    g[-1] = 1.0
    eq_A = np.zeros((pencil.nx, m))
    for i in range(pencil.nx):
        eq_A[i, i] = 1.0
    prob = sdp.SDPProblem(m, blocks, objective=g, eq_A=eq_A, eq_b=point)
    sol = sdp.solve(prob)
    if sol.status == sdp.UNBOUNDED:
        return MembershipResult("Inside", np.inf)
    if sol.status != sdp.OPTIMAL:
        return MembershipResult("Indeterminate", np.nan)
    margin = sol.objective
    if margin >= -tol:
        return MembershipResult("Inside", margin, witness=sol.x[pencil.nx:-1])
    return MembershipResult("Outside", margin)


# -- recession fans ------------------------------------------------------------

@dataclass
class RecessionFan:
    rays: np.ndarray                    # (k, n) unit vectors
    provenance: List[dict] = field(default_factory=list)

    def __len__(self):
        return len(self.rays)

    def has_opposite_pair(self, tol: float = 1e-9) -> bool:
        for i in range(len(self.rays)):
            for j in range(i + 1, len(self.rays)):
                if np.linalg.norm(self.rays[i] + self.rays[j]) <= tol:
                    return True
        return False

    def to_csv(self, names: Sequence[str]) -> str:
        lines = [",".join(list(names) + ["confirmation_radius"])]
        for ray, prov in zip(self.rays, self.provenance):
            lines.append(",".join(f"{v:.17g}" for v in ray)
                         + f",{prov.get('radius', float('nan')):.17g}")
        return "\n".join(lines) + "\n"


def asymptotic_candidates(f: Poly, xname: str, yname: str) -> List[np.ndarray]:
    """Unit representatives of the real projective roots of the top form."""
    if f.is_zero():
        raise GeometryError("zero defining polynomial")
    top = f.top_form()
    # roots along (1, t)
    d = f.total_degree()
    coeffs = [float(top.coeff_in(yname, k).evaluate({xname: 1, yname: 0})) for k in range(d + 1)]
    while coeffs and coeffs[-1] == 0.0:
        coeffs.pop()
    cands = []
    if len(coeffs) >= 2:
        for t in _real_roots(np.array(coeffs)):
            v = np.array([1.0, float(t)])
            cands.append(v / np.linalg.norm(v))
    # the vertical direction iff x divides the top form
    vert = top.coeff_in(xname, 0)
    if vert.is_zero():
        cands.append(np.array([0.0, 1.0]))
    out = []
    for v in cands:
        for s in (1.0, -1.0):
            u = s * v
            if not any(np.linalg.norm(u - w) <= 1e-9 for w in out):
                out.append(u)
    return out


def asymptotic_directions(f: Poly, cloud: SampleCloud, r0: float,
                          angle_tol: float = 0.1,
                          xname: str = "x", yname: str = "y") -> RecessionFan:
    """Candidate rays from the top form of f, confirmed against far-out
    cloud points within angle_tol radians."""
    cands = asymptotic_candidates(f, xname, yname)
    rays, prov = [], []
    if not cloud.is_empty():
        pts = cloud.points
        norms = np.linalg.norm(pts, axis=1)
        far = pts[norms >= r0]
        fnorm = norms[norms >= r0]
        for u in cands:
            if len(far) == 0:
                continue
            cosang = (far @ u) / fnorm
            hits = int(np.sum(cosang >= math.cos(angle_tol)))
            if hits > 0:
                if not any(np.linalg.norm(u - w) <= 1e-9 for w in rays):
                    rays.append(u)
                    prov.append({"radius": r0, "hits": hits})
    arr = np.array(rays, dtype=float).reshape(len(rays), 2)
    return RecessionFan(arr, prov)


# -- homogenization and base compactification ---------------------------------

def homogenize_pencil(pencil: Pencil, t_name: str = "t") -> Pencil:
    """Cone form: replace the constant block M0 by t*M0 and append the
    scalar block [t]; x variables become (t, x_1, ..., x_n)."""
    if t_name in pencil.x_names:
        t_name = t_name + "_h"
    blocks = []
    for b in pencil.blocks:
        zero = [[Fraction(0)] * b.dim for _ in range(b.dim)]
        mats = [zero, b.mats[0]] + list(b.mats[1:])
        blocks.append(PencilBlock(b.dim, mats))
    nz = pencil.nx + pencil.ny
    one = [[Fraction(1)]]
    z = [[Fraction(0)]]
    tmats = [z, one] + [z for _ in range(nz)]
    blocks.append(PencilBlock(1, tmats))
    return Pencil(blocks, (t_name,) + pencil.x_names, pencil.y_names)


@dataclass
class SlicePencil:
    """Affine slice <z, w> = 1 of a homogeneous pencil, in chart coordinates
    (the pivot coordinate is eliminated)."""

    pencil: Pencil
    w: np.ndarray
    pivot: int
    full_names: Tuple[str, ...]

    def chart_of(self, z: np.ndarray) -> np.ndarray:
        """Map a cone point to chart coordinates (scales to <z,w> = 1)."""
        z = np.asarray(z, dtype=float)
        s = float(z @ self.w)
        if s <= 1e-12:
            raise GeometryError("point is not on the positive side of the slice functional")
        zs = z / s
        return np.delete(zs, self.pivot)


def compactify_base(pencil_h: Pencil, w: Sequence[float],
                    fan: Optional[RecessionFan] = None,
                    cloud_points: Optional[np.ndarray] = None,
                    interior_margin: float = 1e-6,
                    verify_bounded: bool = True,
                    seed: int = DEFAULT_SEED) -> SlicePencil:
    """Slice the cone pencil by <z, w> = 1.

    w must be strictly positive on all confirmed recession rays and on
    (1, xi) for the sampled points xi (numerical interiority proxy).  The
    slice is checked bounded via support finiteness in 2n random
    directions.
    """
    w = np.asarray(w, dtype=float)
    n1 = pencil_h.nx
    if w.shape != (n1,):
        raise GeometryError(f"w must have {n1} coordinates")
    if np.abs(w).max() == 0.0:
        raise GeometryError("w = 0 is never an interior point of the dual cone")
    if fan is not None:
        for ray in fan.rays:
            if float(np.concatenate([[0.0], ray]) @ w) < interior_margin:
                raise GeometryError(
                    f"w is not strictly positive on the recession ray {ray}; "
                    "pick a new w (default: (1, delta * mean ray))")
    if cloud_points is not None and len(cloud_points):
        lifted = np.concatenate([np.ones((len(cloud_points), 1)), cloud_points], axis=1)
        if float((lifted @ w).min()) < interior_margin:
            raise GeometryError("w is not strictly positive on the lifted sample points; "
                                "pick a new w")
    pivot = int(np.argmax(np.abs(w)))
    wf = [Fraction(x).limit_denominator(10 ** 12) for x in w]
    blocks = []
    for b in pencil_h.blocks:
        mp = b.mats[1 + pivot]
        inv = Fraction(1) / wf[pivot]
        m0 = [[b.mats[0][j][k] + inv * mp[j][k] for k in range(b.dim)] for j in range(b.dim)]
        mats = [m0]
        for i in range(n1):
            if i == pivot:
                continue
            r = wf[i] * inv
            mats.append([[b.mats[1 + i][j][k] - r * mp[j][k] for k in range(b.dim)]
                         for j in range(b.dim)])
        mats.extend(b.mats[1 + n1:])
        blocks.append(PencilBlock(b.dim, mats))
    names = [nm for i, nm in enumerate(pencil_h.x_names) if i != pivot]
    sliced = Pencil(blocks, names, pencil_h.y_names)
    if verify_bounded and sliced.nx:
        rng = np.random.default_rng(seed)
        dirs = rng.normal(size=(2 * sliced.nx, sliced.nx))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        vals = support_relaxed(sliced, dirs, on_inaccurate="nan")
        if np.any(np.isinf(vals)):
            raise GeometryError("slice is unbounded; w is not interior to the dual cone "
                                "(suggest w = (1, delta * mean confirmed ray))")
    return SlicePencil(sliced, w, pivot, pencil_h.x_names)
