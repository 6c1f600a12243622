"""Vectorised double-double arithmetic for complex arrays.

A value is ``(re_hi, re_lo, im_hi, im_lo)``; each part is a float64 array and
``hi + lo`` carries about 106 bits.  Only what the trace recurrence of the
characteristic-polynomial oracle needs is provided.  Error-free transforms
follow Dekker and Knuth (no FMA required).
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _add(x, y):
    s, e = _two_sum(x[0], y[0])
    t, f = _two_sum(x[1], y[1])
    s, e = _quick_two_sum(s, e + t)
    return _quick_two_sum(s, e + f)


def _mul(x, y):
    p, e = _two_prod(x[0], y[0])
    return _quick_two_sum(p, e + (x[0] * y[1] + x[1] * y[0]))


def _neg(x):
    return -x[0], -x[1]


def from_complex(z):
    z = np.asarray(z, dtype=complex)
    zero = np.zeros(z.shape)
    return (z.real.copy(), zero, z.imag.copy(), zero.copy())


def to_complex(z):
    return (z[0] + z[1]) + 1j * (z[2] + z[3])


def add(x, y):
    return _add(x[:2], y[:2]) + _add(x[2:], y[2:])


def mul(x, y):
    re = _add(_mul(x[:2], y[:2]), _neg(_mul(x[2:], y[2:])))
    im = _add(_mul(x[:2], y[2:]), _mul(x[2:], y[:2]))
    return re + im


def div_real(x, k: float):
    """Divide by a nonzero float (one correction step per part)."""
    out = []
    for hi, lo in (x[:2], x[2:]):
        q1 = hi / k
        p, e = _two_prod(q1, np.full_like(q1, k))
        s, f = _two_sum(hi, -p)
        q2 = (s + (f - e + lo)) / k
        out.extend(_quick_two_sum(q1, q2))
    return tuple(out)


def sum_axis(x, axis: int):
    """Pairwise double-double sum along ``axis``."""
    parts = [np.moveaxis(p, axis, 0) for p in x]
    while parts[0].shape[0] > 1:
        if parts[0].shape[0] % 2:
            parts = [np.concatenate([p, np.zeros((1,) + p.shape[1:])]) for p in parts]
        h = parts[0].shape[0] // 2
        parts = list(add(tuple(p[:h] for p in parts), tuple(p[h:] for p in parts)))
    return tuple(p[0] for p in parts)


def matmul(x, y):
    prod = mul(tuple(p[:, :, None] for p in x), tuple(p[None, :, :] for p in y))
    return sum_axis(prod, 1)


def trace(x):
    return sum_axis(tuple(np.diagonal(p).copy() for p in x), 0)
