"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

Set CURVEHULL_PURE_NUMPY=1 to force the numpy path (e.g. when numba is
unavailable or for benchmarking); see benchmarks/bench_kernels.py for a
timing comparison.  Both implementations of each kernel are kept in
NUMPY_IMPLS / NUMBA_IMPLS so they can be cross-checked.
"""

from __future__ import annotations

import os

import numpy as np


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


PURE_NUMPY = _flag("CURVEHULL_PURE_NUMPY")


# -- pure numpy implementations ----------------------------------------------

def _gram_scaled_numpy(R, F):
    """G_i = R.T @ F_i @ R for a stack F, and the Gram matrix <G_i, G_j>."""
    G = np.einsum("ba,ibc,cd->iad", R, F, R, optimize=True)
    P = np.einsum("iab,jab->ij", G, G, optimize=True)
    return G, P


def _poly_eval_numpy(e1, e2, coeffs, xs, ys):
    """Evaluate sum_j coeffs[j] * x^e1[j] * y^e2[j] at paired points."""
    terms = (xs[None, :] ** e1[:, None]) * (ys[None, :] ** e2[:, None])
    return coeffs @ terms


NUMPY_IMPLS = {"gram_scaled": _gram_scaled_numpy, "poly_eval": _poly_eval_numpy}
NUMBA_IMPLS = {}

BACKEND = "numpy"

if not PURE_NUMPY:
    try:
        from numba import njit

        @njit(cache=True)
        def _gram_scaled_numba(R, F):
            k, d, _ = F.shape
            G = np.empty((k, d, d))
            tmp = np.empty((d, d))
            for i in range(k):
                for a in range(d):
                    for b in range(d):
                        s = 0.0
                        for c in range(d):
                            s += F[i, a, c] * R[c, b]
                        tmp[a, b] = s
                for a in range(d):
                    for b in range(d):
                        s = 0.0
                        for c in range(d):
                            s += R[c, a] * tmp[c, b]
                        G[i, a, b] = s
            P = np.empty((k, k))
            for i in range(k):
                for j in range(i, k):
                    s = 0.0
                    for a in range(d):
                        for b in range(d):
                            s += G[i, a, b] * G[j, a, b]
                    P[i, j] = s
                    P[j, i] = s
            return G, P

        @njit(cache=True)
        def _poly_eval_numba(e1, e2, coeffs, xs, ys):
            n = xs.shape[0]
            t = coeffs.shape[0]
            out = np.zeros(n)
            for i in range(n):
                s = 0.0
                for j in range(t):
                    s += coeffs[j] * xs[i] ** e1[j] * ys[i] ** e2[j]
                out[i] = s
            return out

        NUMBA_IMPLS = {"gram_scaled": _gram_scaled_numba, "poly_eval": _poly_eval_numba}
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

_ACTIVE = NUMBA_IMPLS if BACKEND == "numba" else NUMPY_IMPLS

gram_scaled = _ACTIVE["gram_scaled"]
poly_eval = _ACTIVE["poly_eval"]


def poly_to_arrays(p, xname: str, yname: str):
    """Exponent/coefficient arrays of a bivariate Poly for poly_eval."""
    xi = p.vars.index(xname)
    yi = p.vars.index(yname)
    items = p.sorted_terms()
    e1 = np.array([e[xi] for e, _ in items], dtype=np.int64)
    e2 = np.array([e[yi] for e, _ in items], dtype=np.int64)
    coeffs = np.array([float(c) for _, c in items])
    if len(items) == 0:
        e1 = np.zeros(1, dtype=np.int64)
        e2 = np.zeros(1, dtype=np.int64)
        coeffs = np.zeros(1)
    return e1, e2, coeffs
