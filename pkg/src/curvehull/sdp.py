"""Dense block semidefinite programming at desk scale.

Problems are affine matrix inequalities: maximize g'u subject to
F0 + sum_j u_j Fj >= 0 per block, plus optional linear equalities on u.
The solver is a primal-dual path-following method with Nesterov-Todd
scaling on the homogeneous self-dual embedding, so genuinely infeasible
or unbounded instances terminate with an improving-ray certificate
instead of a numerical breakdown.  Tolerances: feasibility 1e-8, gap
1e-8, iteration cap 200; dimensions are capped at 200 (total PSD size).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .kernels import gram_scaled

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
INACCURATE = "Inaccurate"

GAP_TOL = 1e-8
FEAS_TOL = 1e-8
MAX_ITER = 200
STEP = 0.98
DIM_CAP = 200


class SDPError(ValueError):
    """Structural or capacity error in the problem data."""


@dataclass
class SDPProblem:
    """maximize objective @ u  s.t.  F0_b + sum_j u_j Fj_b >= 0, eq_A u = eq_b.

    blocks: list of (F0, Fs) with F0 (d,d) and Fs (m,d,d) symmetric.
    objective None means a pure feasibility problem.
    """

    m: int
    blocks: List[Tuple[np.ndarray, np.ndarray]]
    objective: Optional[np.ndarray] = None
    eq_A: Optional[np.ndarray] = None
    eq_b: Optional[np.ndarray] = None

    def __post_init__(self):
        total = 0
        for F0, Fs in self.blocks:
            F0 = np.asarray(F0, dtype=float)
            Fs = np.asarray(Fs, dtype=float)
            d = F0.shape[0]
            if F0.shape != (d, d) or Fs.shape != (self.m, d, d):
                raise SDPError(f"block shapes {F0.shape} / {Fs.shape} inconsistent with m={self.m}")
            if d < 1:
                raise SDPError("block dimensions must be >= 1")
            total += d
        if total > DIM_CAP:
            raise SDPError(f"total PSD dimension {total} exceeds the cap {DIM_CAP}")


@dataclass
class SDPSolution:
    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    psd_residual: float = np.inf
    gap: float = np.inf
    dual_bound: Optional[float] = None
    iterations: int = 0
    message: str = ""
    certificate: Optional[np.ndarray] = None  # improving ray (Unbounded) or None


def check_psd(matrix: np.ndarray, tol: float) -> Tuple[bool, float]:
    """(min eigenvalue >= -tol, min eigenvalue); rejects asymmetric input."""
    matrix = np.asarray(matrix, dtype=float)
    scale = max(1.0, np.abs(matrix).max()) if matrix.size else 1.0
    if np.abs(matrix - matrix.T).max() > 1e-12 * scale:
        raise SDPError("matrix is not symmetric within 1e-12")
    w = np.linalg.eigvalsh((matrix + matrix.T) / 2.0)
    mineig = float(w[0])
    return mineig >= -tol, mineig


def _chol(mat: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        # ridge just enough to factor; iterates stay interior so this is rare
        d = mat.shape[0]
        jitter = 1e-14 * max(1.0, np.trace(mat) / max(d, 1))
        for _ in range(12):
            try:
                return np.linalg.cholesky(mat + jitter * np.eye(d))
            except np.linalg.LinAlgError:
                jitter *= 10.0
        raise


def _max_step_psd(L: np.ndarray, delta: np.ndarray) -> float:
    """sup alpha with X + alpha*delta >= 0, X = L L'."""
    Y = np.linalg.solve(L, np.linalg.solve(L, delta).T)
    w = np.linalg.eigvalsh((Y + Y.T) / 2.0)
    lam = float(w[0])
    if lam >= -1e-14:
        return np.inf
    return 1.0 / (-lam)


def _eliminate_equalities(p: SDPProblem):
    """Reduce eq_A u = eq_b by an affine change u = u0 + Z w."""
    A = np.asarray(p.eq_A, dtype=float)
    b = np.asarray(p.eq_b, dtype=float).ravel()
    u0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ u0 - b) > 1e-9 * (1.0 + np.linalg.norm(b)):
        return None, None, None
    _, s, Vh = np.linalg.svd(A)
    rank = int(np.sum(s > max(A.shape) * np.finfo(float).eps * (s[0] if len(s) else 1.0)))
    Z = Vh[rank:].T  # (m, m - rank)
    return u0, Z, rank


def solve(problem: SDPProblem, gap_tol: float = GAP_TOL, feas_tol: float = FEAS_TOL,
          max_iter: int = MAX_ITER, trace: Optional[list] = None) -> SDPSolution:
    """Solve the block SDP; see module docstring for the algorithm."""
    m = problem.m
    g = np.zeros(m) if problem.objective is None else np.asarray(problem.objective, dtype=float)
    blocks = [(np.asarray(F0, dtype=float), np.asarray(Fs, dtype=float))
              for F0, Fs in problem.blocks]

    if problem.eq_A is not None:
        u0, Z, _ = _eliminate_equalities(problem)
        if u0 is None:
            return SDPSolution(status=INFEASIBLE, message="inconsistent linear equalities")
        red_blocks = []
        for F0, Fs in blocks:
            F0r = F0 + np.tensordot(u0, Fs, axes=(0, 0))
            Fsr = np.tensordot(Z.T, Fs, axes=(1, 0)) if Z.shape[1] else np.zeros((0,) + F0.shape)
            red_blocks.append((F0r, Fsr))
        sub = SDPProblem(Z.shape[1], red_blocks,
                         objective=(Z.T @ g) if problem.objective is not None else None)
        sol = solve(sub, gap_tol=gap_tol, feas_tol=feas_tol, max_iter=max_iter)
        if sol.x is not None:
            sol = SDPSolution(status=sol.status, x=u0 + Z @ sol.x,
                              objective=(None if sol.objective is None else sol.objective + float(g @ u0)),
                              psd_residual=sol.psd_residual, gap=sol.gap,
                              dual_bound=(None if sol.dual_bound is None else sol.dual_bound + float(g @ u0)),
                              iterations=sol.iterations, message=sol.message,
                              certificate=None if sol.certificate is None else Z @ sol.certificate)
        return sol

    # variable-free problem: just report PSD-ness of the constants
    if m == 0:
        mineig = min(check_psd(F0, np.inf)[1] for F0, _ in blocks)
        if mineig >= -feas_tol:
            return SDPSolution(status=OPTIMAL, x=np.zeros(0), objective=0.0,
                               psd_residual=mineig, gap=0.0, dual_bound=0.0)
        return SDPSolution(status=INFEASIBLE, psd_residual=mineig,
                           message="constant blocks are not PSD")

    # prescaling: per-block magnitude and objective magnitude
    bscales = []
    for i, (F0, Fs) in enumerate(blocks):
        s = max(1.0, np.abs(F0).max(), np.abs(Fs).max() if Fs.size else 0.0)
        blocks[i] = (F0 / s, Fs / s)
        bscales.append(s)
    gscale = max(1.0, np.abs(g).max())
    b = g / gscale

    dims = [F0.shape[0] for F0, _ in blocks]
    nu = sum(dims)
    X = [np.eye(d) for d in dims]
    S = [np.eye(d) for d in dims]
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    mu0 = (sum(np.trace(Xb) for Xb in X) + tau * kappa) / (nu + 1)

    normb = 1.0 + np.abs(b).max() if m else 1.0
    normc = 1.0 + max(np.abs(F0).max() for F0, _ in blocks)

    def Aop(Xl):
        out = np.zeros(m)
        for (F0, Fs), Xb in zip(blocks, Xl):
            if Fs.size:
                out -= np.tensordot(Fs, Xb, axes=([1, 2], [0, 1]))
        return out

    def Aadj(z):
        return [-np.tensordot(z, Fs, axes=(0, 0)) if Fs.size else np.zeros_like(F0)
                for F0, Fs in blocks]

    def cdot(Xl):
        return float(sum(np.tensordot(F0, Xb) for (F0, _), Xb in zip(blocks, Xl)))

    def dehomogenized(status, msg, iters):
        u = y / tau
        # residual in the caller's (unscaled) units
        xres = min(s * check_psd(F0i + np.tensordot(u, Fsi, axes=(0, 0)), np.inf)[1]
                   for (F0i, Fsi), s in zip(blocks, bscales))
        pobj = float(b @ u) * gscale
        dbound = cdot([Xb / tau for Xb in X]) * gscale
        gap = abs(dbound - pobj)
        if status == INACCURATE and tau >= 1e-4:
            # the iterate may still satisfy the user-facing certificates even
            # when the embedding stalled (degenerate optimal faces); tau must
            # be healthy or the de-homogenized gap is meaningless
            scale = max(bscales) * gscale
            if xres >= -FEAS_TOL * scale and gap <= GAP_TOL * (1.0 + abs(pobj) + abs(dbound)) * scale:
                status, msg = OPTIMAL, msg + "; certified from the final iterate"
        return SDPSolution(status=status, x=u, objective=pobj, psd_residual=xres,
                           gap=gap, dual_bound=dbound,
                           iterations=iters, message=msg)

    best_msg = ""
    for it in range(max_iter):
        Rp = Aop(X) - b * tau
        AjY = Aadj(y)
        Rd = [-Ay + F0 * tau - Sb for Ay, (F0, _), Sb in zip(AjY, blocks, S)]
        cx = cdot(X)
        by = float(b @ y)
        Rg = by - cx - kappa
        mu = (sum(float(np.tensordot(Xb, Sb)) for Xb, Sb in zip(X, S)) + tau * kappa) / (nu + 1)

        # optimality of the de-homogenized point
        if tau > 1e-12:
            relp = np.abs(Rp).max() / (tau * normb) if m else 0.0
            reld = max(np.abs(R).max() for R in Rd) / (tau * normc)
            pval, dval = by / tau, cx / tau
            relgap = abs(pval - dval) / (1.0 + abs(pval) + abs(dval))
            if trace is not None:
                trace.append(dict(it=it, tau=tau, kappa=kappa, mu=mu,
                                  relp=relp, reld=reld, relgap=relgap))
            if relp <= feas_tol and reld <= feas_tol and relgap <= gap_tol:
                return dehomogenized(OPTIMAL, "converged", it)

        # infeasibility / unboundedness certificates as tau -> 0
        if tau <= 1e-9 * max(1.0, kappa) or (mu <= 1e-14 * mu0 and tau <= 1e-7):
            if cx < -1e-12:
                Xr = [Xb / (-cx) for Xb in X]
                viol = np.abs(Aop(Xr)).max() if m else 0.0
                mineig = min(np.linalg.eigvalsh(Xb)[0] for Xb in Xr)
                if viol <= 1e-6 and mineig >= -1e-9:
                    return SDPSolution(status=INFEASIBLE, iterations=it, gap=np.inf,
                                       message="improving-ray certificate of infeasibility")
            if by > 1e-12:
                yr = y / by
                ray = [np.tensordot(yr, Fs, axes=(0, 0)) if Fs.size else np.zeros_like(F0)
                       for F0, Fs in blocks]
                mineig = min(np.linalg.eigvalsh((Rb + Rb.T) / 2)[0] for Rb in ray)
                if mineig >= -1e-7:
                    return SDPSolution(status=UNBOUNDED, iterations=it, gap=np.inf,
                                       certificate=yr,
                                       message="improving-ray certificate of unboundedness")
            return SDPSolution(status=INACCURATE, iterations=it,
                               message="tau collapsed without a clean certificate")

        # NT scaling per block
        Rs, lams, Gs, Ls = [], [], [], []
        P = np.zeros((m + 1, m + 1))
        for (F0, Fs), Xb, Sb in zip(blocks, X, S):
            Lx = _chol(Xb)
            Lsb = _chol(Sb)
            U, sig, Vh = np.linalg.svd(Lsb.T @ Lx)
            sig = np.maximum(sig, 1e-150)
            R = Lx @ Vh.T @ np.diag(sig ** -0.5)
            Rs.append(R)
            lams.append(sig)
            Ls.append((Lx, Lsb))
            Fall = np.concatenate([F0[None], Fs], axis=0) if Fs.size else F0[None]
            G, Pb = gram_scaled(np.ascontiguousarray(R), np.ascontiguousarray(Fall))
            Gs.append(G)
            if Fs.size:
                P += Pb
            else:
                P[0, 0] += Pb[0, 0]
        M = P[1:, 1:]
        q = -P[0, 1:]
        gamma0 = P[0, 0]

        reg = 1e-12 * (np.trace(M) / max(m, 1) + 1.0)
        Msys = M + reg * np.eye(m)
        try:
            Lm = np.linalg.cholesky(Msys)
        except np.linalg.LinAlgError:
            Msys = M + 1e-8 * (np.trace(M) / max(m, 1) + 1.0) * np.eye(m)
            Lm = np.linalg.cholesky(Msys)

        def msolve(rhs):
            z = np.linalg.solve(Lm, rhs)
            return np.linalg.solve(Lm.T, z)

        Rdhat = [R.T @ Rdb @ R for R, Rdb in zip(Rs, Rd)]
        gammas = [2.0 / np.add.outer(lam, lam) for lam in lams]
        u2 = msolve(q + b)

        def direction(eta, sigma_mu, Cx, c_tk):
            Dt = []
            r1 = -eta * Rp
            r2 = -eta * Rg
            for bi in range(len(blocks)):
                lam = lams[bi]
                D = -np.diag(lam ** 2) + sigma_mu * np.eye(len(lam))
                if Cx is not None:
                    D = D - Cx[bi]
                Dtb = gammas[bi] * D
                Dt.append(Dtb)
                G = Gs[bi]
                contrib = np.tensordot(G, Dtb, axes=([1, 2], [0, 1])) \
                    - eta * np.tensordot(G, Rdhat[bi], axes=([1, 2], [0, 1]))
                r2 += contrib[0]
                if m:
                    r1 += contrib[1:]
            d_tk = sigma_mu - tau * kappa - c_tk
            r2 += d_tk / tau
            denom = gamma0 + kappa / tau + float((b - q) @ u2)
            if abs(denom) < 1e-300:
                return None

            def reduced_solve(rr1, rr2):
                v1 = msolve(rr1)
                dt = (rr2 - float((b - q) @ v1)) / denom
                return v1 + u2 * dt, dt

            dy, dtau = reduced_solve(r1, r2)
            # iterative refinement against the unregularized system
            for _ in range(2):
                res1 = r1 - (M @ dy - (q + b) * dtau)
                res2 = r2 - (float((b - q) @ dy) + (gamma0 + kappa / tau) * dtau)
                if np.abs(res1).max() <= 1e-14 * (1.0 + np.abs(r1).max()):
                    break
                cy, ct = reduced_solve(res1, res2)
                dy = dy + cy
                dtau = dtau + ct
            dS, dX, dShat, dXhat = [], [], [], []
            for bi, ((F0, Fs), R) in enumerate(zip(blocks, Rs)):
                dSb = (np.tensordot(dy, Fs, axes=(0, 0)) if Fs.size else np.zeros_like(F0)) \
                    + F0 * dtau + eta * Rd[bi]
                dSb = (dSb + dSb.T) / 2
                Sdel = R.T @ dSb @ R
                Xhat = Dt[bi] - Sdel
                dXb = Rs[bi] @ Xhat @ Rs[bi].T
                dS.append(dSb)
                dX.append((dXb + dXb.T) / 2)
                dShat.append(Sdel)
                dXhat.append(Xhat)
            dkappa = (d_tk - kappa * dtau) / tau
            return dX, dy, dS, dtau, dkappa, dXhat, dShat

        aff = direction(1.0, 0.0, None, 0.0)
        if aff is None:
            return dehomogenized(INACCURATE, "singular reduced system", it)
        dXa, dya, dSa, dtaua, dkappaa, dXha, dSha = aff

        alpha_aff = 1.0
        for bi in range(len(blocks)):
            alpha_aff = min(alpha_aff, _max_step_psd(Ls[bi][0], dXa[bi]),
                            _max_step_psd(Ls[bi][1], dSa[bi]))
        if dtaua < 0:
            alpha_aff = min(alpha_aff, tau / -dtaua)
        if dkappaa < 0:
            alpha_aff = min(alpha_aff, kappa / -dkappaa)

        mu_aff = (sum(float(np.tensordot(X[bi] + alpha_aff * dXa[bi],
                                         S[bi] + alpha_aff * dSa[bi]))
                      for bi in range(len(blocks)))
                  + (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) / (nu + 1)
        sigma = min(max((max(mu_aff, 0.0) / mu) ** 3, 1e-8), 1.0 - 1e-8)

        Cx = [(Xh @ Sh + Sh @ Xh) / 2 for Xh, Sh in zip(dXha, dSha)]
        comb = direction(1.0 - sigma, sigma * mu, Cx, dtaua * dkappaa)
        if comb is None:
            return dehomogenized(INACCURATE, "singular reduced system", it)
        dX, dy, dS, dtau, dkappa, _, _ = comb

        alpha = np.inf
        for bi in range(len(blocks)):
            alpha = min(alpha, _max_step_psd(Ls[bi][0], dX[bi]),
                        _max_step_psd(Ls[bi][1], dS[bi]))
        if dtau < 0:
            alpha = min(alpha, tau / -dtau)
        if dkappa < 0:
            alpha = min(alpha, kappa / -dkappa)
        alpha = min(1.0, STEP * alpha)
        if not np.isfinite(alpha) or alpha <= 1e-13:
            return dehomogenized(INACCURATE, "step length collapsed", it)

        for bi in range(len(blocks)):
            X[bi] = (X[bi] + alpha * dX[bi] + (X[bi] + alpha * dX[bi]).T) / 2
            S[bi] = (S[bi] + alpha * dS[bi] + (S[bi] + alpha * dS[bi]).T) / 2
        y = y + alpha * dy
        tau += alpha * dtau
        kappa += alpha * dkappa

    return dehomogenized(INACCURATE, f"iteration cap {max_iter} reached", max_iter)
