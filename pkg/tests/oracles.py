"""Reference implementations used only by the tests.

They avoid the code paths under test: eigenvalues come from a Householder
tridiagonal reduction plus Sturm-sequence bisection on the characteristic
polynomials of the leading minors.
"""

import numpy as np


def householder_tridiagonal(a):
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = -np.copysign(np.linalg.norm(x), x[0] if x[0] != 0 else 1.0)
        v = x.copy()
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0:
            continue
        v /= vn
        h = np.eye(n)
        h[k + 1:, k + 1:] -= 2.0 * np.outer(v, v)
        a = h @ a @ h
    return np.diag(a).copy(), np.diag(a, 1).copy()


def sturm_count(d, e, x):
    """Number of eigenvalues of the tridiagonal (d, e) strictly below ``x``."""
    count = 0
    q = 1.0
    tiny = np.finfo(float).eps * (abs(x) + 1.0)
    for i in range(len(d)):
        q = d[i] - x - (e[i - 1] ** 2 / q if i > 0 else 0.0)
        if abs(q) < tiny:
            q = -tiny
        if q < 0:
            count += 1
    return count


def sturm_eigenvalues(a, tol=1e-13):
    d, e = householder_tridiagonal(a)
    n = len(d)
    if n == 1:
        return d.copy()
    # Gershgorin bounds
    r = np.abs(np.concatenate([[0.0], e])) + np.abs(np.concatenate([e, [0.0]]))
    lo, hi = float(np.min(d - r)) - 1.0, float(np.max(d + r)) + 1.0
    scale = max(abs(lo), abs(hi), 1.0)
    out = np.empty(n)
    for k in range(n):
        a_, b_ = lo, hi
        while b_ - a_ > tol * scale:
            mid = 0.5 * (a_ + b_)
            if sturm_count(d, e, mid) > k:
                b_ = mid
            else:
                a_ = mid
        out[k] = 0.5 * (a_ + b_)
    return out
