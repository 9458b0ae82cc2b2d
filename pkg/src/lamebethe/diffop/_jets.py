"""Truncated Taylor-series (jet) arithmetic on complex numpy arrays.

A jet of order p at center c is the array of Taylor coefficients
[f(c), f'(c), f''(c)/2!, ...] of length p+1.  Jets drive stable pointwise
application of factored differential operators and the analytic
continuation of flag solutions: each first-order factor inverts to one
antiderivative, which on jets is a coefficient shift.
"""

from __future__ import annotations

import numpy as np

from .._scalars import as_complex


def jconst(value, p):
    out = np.zeros(p + 1, dtype=np.complex128)
    out[0] = value
    return out


def jadd(a, b):
    return a + b


def jmul(a, b):
    p = a.size - 1
    return np.convolve(a, b)[:p + 1]


def jdiv(a, b):
    """a/b as jets; requires b[0] != 0."""
    p = a.size - 1
    if b[0] == 0:
        raise ZeroDivisionError("jet division by a jet vanishing at the center")
    out = np.zeros(p + 1, dtype=np.complex128)
    for k in range(p + 1):
        acc = a[k]
        for j in range(1, k + 1):
            acc -= b[j] * out[k - j]
        out[k] = acc / b[0]
    return out


def jexp(a):
    """exp of a jet (classical recurrence e_k = (1/k) sum j a_j e_{k-j})."""
    p = a.size - 1
    out = np.zeros(p + 1, dtype=np.complex128)
    out[0] = np.exp(a[0])
    for k in range(1, p + 1):
        acc = 0j
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def jder(a):
    p = a.size - 1
    out = np.zeros(p + 1, dtype=np.complex128)
    for k in range(p):
        out[k] = (k + 1) * a[k + 1]
    return out


def jint(a, const=0j):
    """Antiderivative jet with value `const` at the center."""
    out = np.zeros(a.size, dtype=np.complex128)
    out[0] = const
    for k in range(1, a.size):
        out[k] = a[k - 1] / k
    return out


def jeval(a, dx):
    acc = 0j
    for c in a[::-1]:
        acc = acc * dx + c
    return acc


def jeval_many(a, dxs):
    dxs = np.asarray(dxs, dtype=np.complex128)
    acc = np.zeros_like(dxs)
    for c in a[::-1]:
        acc = acc * dxs + c
    return acc


def poly_jet(poly, c, p):
    """Taylor coefficients of a Poly at center c (repeated synthetic division)."""
    coeffs = list(poly.coeffs_complex())
    if len(coeffs) == 1 and coeffs[0] == 0:
        return np.zeros(p + 1, dtype=np.complex128)
    cc = as_complex(c)
    out = np.zeros(p + 1, dtype=np.complex128)
    work = coeffs[:]
    for k in range(min(p, len(work) - 1) + 1):
        # one synthetic division by (x - c): remainder is the k-th coefficient
        rem = work[-1]
        newwork = [work[-1]]
        for j in range(len(work) - 2, -1, -1):
            rem = rem * cc + work[j]
            newwork.append(rem)
        out[k] = rem
        work = newwork[:-1][::-1] if len(newwork) > 1 else [0j]
        if len(work) == 1 and work[0] == 0:
            break
    return out


def pole_jet(z, lam, c, p):
    """Jet of lam / (x - z) at center c (requires c != z)."""
    d = as_complex(c) - as_complex(z)
    if d == 0:
        raise ZeroDivisionError("jet centered on a pole")
    out = np.zeros(p + 1, dtype=np.complex128)
    inv = 1.0 / d
    term = as_complex(lam) * inv
    for k in range(p + 1):
        out[k] = term
        term = -term * inv
    return out


def rational_jet(rf, c, p):
    """Jet of a RationalFn at a point where no denominator factor vanishes."""
    num = poly_jet(rf.num, c, p)
    out = num
    for f, e in rf.den_factors.items():
        fj = poly_jet(f, c, p)
        for _ in range(e):
            out = jdiv(out, fj)
    return out
