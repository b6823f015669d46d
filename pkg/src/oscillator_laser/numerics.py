"""Small numerical kernels: bisection, quadrature over the real line,
batched dense solves and a pivoted symmetric factorization.

The linear algebra here is deliberately limited to matrices of order
eight or less; every system in this package is three or four
dimensional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSignChange, NonConvergentQuadrature, SingularMatrix

MAX_DENSE_ORDER = 8

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# nodes on [-1, 1] ordered left to right, with matching weights
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[1:7:2] = _WG[:3]
_GW[7] = _WG[3]
_GW[9:15:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def bisect(f, lo, hi, tol=1e-12, full_output=False):
    """Root of ``f`` on the bracket ``[lo, hi]`` by plain bisection.

    The bracket is halved until it is narrower than ``tol`` or ``f``
    hits zero exactly; the end point (or midpoint) with the smallest
    ``|f|`` is returned.  At most ``ceil(log2((hi - lo) / tol)) + 2``
    function evaluations are spent inside the loop.

    Raises
    ------
    NoSignChange
        If ``f(lo)`` and ``f(hi)`` have the same strict sign.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    flo, fhi = f(lo), f(hi)
    if flo * fhi > 0:
        raise NoSignChange(f"f({lo:g}) = {flo:g} and f({hi:g}) = {fhi:g} have the same sign")
    best = min([(abs(flo), lo), (abs(fhi), hi)])
    max_iter = math.ceil(math.log2((hi - lo) / tol)) + 2 if hi - lo > tol else 0
    iterations = 0
    while hi - lo > tol and iterations < max_iter and best[0] != 0.0:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fmid = f(mid)
        iterations += 1
        best = min(best, (abs(fmid), mid))
        if fmid == 0.0:
            break
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    root = best[1]
    if full_output:
        return root, iterations
    return root


def _gk15(g, a, b):
    """Kronrod value and |Kronrod - Gauss| on each panel ``[a_i, b_i]``."""
    half = 0.5 * (b - a)
    centre = 0.5 * (b + a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(g(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (y @ _KW)
    gauss = half * (y @ _GW)
    return kron, np.abs(kron - gauss)


def integrate_line(f, rel_tol=1e-9, abs_tol=1e-14, scale=1.0, max_panels=20000, initial_panels=16):
    r"""Integrate ``f`` over the whole real line.

    The substitution :math:`\omega = s\tan\theta` maps the line onto
    :math:`(-\pi/2, \pi/2)`; panels in :math:`\theta` are refined with a
    Gauss-Kronrod (7, 15) pair until the summed error estimate drops
    below ``max(abs_tol, rel_tol * |value|)``.  ``f`` must accept a numpy
    array and decay at least like :math:`\omega^{-2}`.

    ``scale`` (``s`` above) should be a characteristic width of the
    integrand; it only affects efficiency.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def g(theta):
        c = np.cos(theta)
        return f(scale * np.tan(theta)) * scale / (c * c)

    edges = np.linspace(-0.5 * np.pi, 0.5 * np.pi, initial_panels + 1)
    a, b = edges[:-1], edges[1:]
    vals, errs = _gk15(g, a, b)
    evaluations = 15 * len(a)
    while True:
        total = float(vals.sum())
        err = float(errs.sum())
        tol = max(abs_tol, rel_tol * abs(total))
        if not np.isfinite(total):
            raise NonConvergentQuadrature("integrand produced a non-finite value")
        if err <= tol:
            return QuadratureResult(total, err, evaluations)
        split = errs > tol / len(errs)
        if len(errs) + split.sum() > max_panels:
            raise NonConvergentQuadrature(
                f"error estimate {err:.3g} above tolerance {tol:.3g} after {len(errs)} panels")
        mid = 0.5 * (a[split] + b[split])
        na = np.concatenate([a[split], mid])
        nb = np.concatenate([mid, b[split]])
        nv, ne = _gk15(g, na, nb)
        evaluations += 15 * len(na)
        keep = ~split
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])


def solve_dense(a, b):
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    ``a`` has shape ``(..., n, n)`` with ``n <= 8``; ``b`` has shape
    ``(..., n)`` or ``(..., n, k)``.  Leading dimensions are a batch and
    are eliminated together.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    n = a.shape[-1]
    if a.ndim < 2 or a.shape[-2] != n:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if n > MAX_DENSE_ORDER:
        raise ValueError(f"order {n} exceeds the supported maximum of {MAX_DENSE_ORDER}")
    vector = b.ndim == a.ndim - 1
    if vector:
        b = b[..., None]
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    dtype = np.result_type(a, b, float)
    lu = np.array(np.broadcast_to(a, batch + (n, n)), dtype=dtype).reshape(-1, n, n)
    rhs = np.array(np.broadcast_to(b, batch + b.shape[-2:]), dtype=dtype).reshape(-1, n, b.shape[-1])
    m = lu.shape[0]
    rows = np.arange(m)
    scale = np.abs(lu).reshape(m, -1).max(axis=1) if m else np.zeros(0)
    tiny = n * np.finfo(float).eps * scale

    for col in range(n):
        piv = col + np.argmax(np.abs(lu[:, col:, col]), axis=1)
        lu[rows, col], lu[rows, piv] = lu[rows, piv].copy(), lu[rows, col].copy()
        rhs[rows, col], rhs[rows, piv] = rhs[rows, piv].copy(), rhs[rows, col].copy()
        p = lu[:, col, col]
        bad = ~(np.abs(p) > tiny)
        if bad.any():
            raise SingularMatrix(f"zero pivot in column {col} for {int(bad.sum())} of {m} matrices")
        if col + 1 < n:
            factors = lu[:, col + 1:, col] / p[:, None]
            lu[:, col + 1:, col:] -= factors[:, :, None] * lu[:, None, col, col:]
            rhs[:, col + 1:] -= factors[:, :, None] * rhs[:, None, col, :]

    x = np.empty_like(rhs)
    for row in range(n - 1, -1, -1):
        acc = rhs[:, row] - np.einsum("mj,mjk->mk", lu[:, row, row + 1:], x[:, row + 1:])
        x[:, row] = acc / lu[:, row, row][:, None]
    x = x.reshape(batch + (n, b.shape[-1]))
    return x[..., 0] if vector else x


@dataclass(frozen=True)
class SymmetricFactor:
    """Outcome of :func:`factor_symmetric`.

    For a positive semidefinite input ``factor`` is an ``(n, rank)``
    matrix with ``factor @ factor.T`` reproducing the input.  For an
    indefinite input ``factor`` is None and ``eigenvalues`` holds the
    spectrum so the caller can report it.
    """

    factor: np.ndarray | None
    rank: int
    indefinite: bool
    eigenvalues: np.ndarray | None = field(default=None, repr=False)

    @property
    def min_eigenvalue(self):
        return None if self.eigenvalues is None else float(self.eigenvalues.min())


def factor_symmetric(m, tol=1e-10):
    """Pivoted Cholesky factorization of a symmetric matrix.

    Pivots on the largest remaining diagonal entry and stops once the
    remaining block is below ``tol`` relative to the largest entry.  A
    matrix whose smallest eigenvalue is below ``-tol`` (relative) is
    reported as indefinite instead of raising.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {m.shape}")
    if n > MAX_DENSE_ORDER:
        raise ValueError(f"order {n} exceeds the supported maximum of {MAX_DENSE_ORDER}")
    if not np.allclose(m, m.T, rtol=0, atol=1e-12 * max(1.0, np.abs(m).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    m = 0.5 * (m + m.T)
    scale = np.abs(m).max(initial=0.0)
    if scale == 0.0:
        return SymmetricFactor(np.zeros((n, 0)), 0, False)

    work = m.copy()
    low = np.zeros((n, n))
    perm = np.arange(n)
    rank = 0
    negative_pivot = False
    for k in range(n):
        j = k + int(np.argmax(np.diag(work)[k:]))
        d = work[j, j]
        if d <= tol * scale:
            negative_pivot = d < -tol * scale or np.abs(work[k:, k:]).max() > tol * scale
            break
        work[[k, j], :] = work[[j, k], :]
        work[:, [k, j]] = work[:, [j, k]]
        low[[k, j], :] = low[[j, k], :]
        perm[[k, j]] = perm[[j, k]]
        pivot = math.sqrt(work[k, k])
        low[k, k] = pivot
        low[k + 1:, k] = work[k + 1:, k] / pivot
        work[k + 1:, k + 1:] -= np.outer(low[k + 1:, k], low[k + 1:, k])
        rank += 1

    factor = np.zeros((n, rank))
    factor[perm] = low[:, :rank]
    residual = np.abs(factor @ factor.T - m).max()
    if not negative_pivot and residual <= 1e3 * tol * scale:
        return SymmetricFactor(factor, rank, False)

    eig, vec = np.linalg.eigh(m)
    if eig.min() < -tol * scale:
        return SymmetricFactor(None, rank, True, eig)
    keep = eig > tol * scale
    factor = vec[:, keep] * np.sqrt(eig[keep])
    return SymmetricFactor(factor, int(keep.sum()), False, eig)
