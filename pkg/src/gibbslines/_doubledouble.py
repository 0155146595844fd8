"""Minimal double-double (~31 significant digits) scalar arithmetic.

Used only by the path-family determinant when plain double elimination loses
the sign of a near-singular matrix.  Numbers are (hi, lo) pairs with
hi + lo the represented value and |lo| <= ulp(hi)/2, built from the classic
error-free transformations (Knuth two-sum, Dekker split product).
"""

from __future__ import annotations

__all__ = ["dd_from_float", "dd_add", "dd_sub", "dd_mul", "dd_div", "dd_neg", "det_dd"]

_SPLIT = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    v = s - a
    e = (a - (s - v)) + (b - v)
    return s, e


def _two_prod(a: float, b: float):
    p = a * b
    a_hi = (a * _SPLIT) - ((a * _SPLIT) - a)
    a_lo = a - a_hi
    b_hi = (b * _SPLIT) - ((b * _SPLIT) - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def dd_from_float(a: float):
    return (float(a), 0.0)


def dd_neg(a):
    return (-a[0], -a[1])


def dd_add(a, b):
    s, e = _two_sum(a[0], b[0])
    e += a[1] + b[1]
    s, e = _two_sum(s, e)
    return (s, e)


def dd_sub(a, b):
    return dd_add(a, dd_neg(b))


def dd_mul(a, b):
    p, e = _two_prod(a[0], b[0])
    e += a[0] * b[1] + a[1] * b[0]
    p, e = _two_sum(p, e)
    return (p, e)


def dd_div(a, b):
    q1 = a[0] / b[0]
    r = dd_sub(a, dd_mul((q1, 0.0), b))
    q2 = r[0] / b[0]
    r = dd_sub(r, dd_mul((q2, 0.0), b))
    q3 = r[0] / b[0]
    s, e = _two_sum(q1, q2)
    e += q3
    s, e = _two_sum(s, e)
    return (s, e)


def det_dd(matrix) -> float:
    """Determinant of a small square matrix by Gaussian elimination with
    partial pivoting, carried out entirely in double-double arithmetic."""
    n = len(matrix)
    a = [[dd_from_float(matrix[i][j]) for j in range(n)] for i in range(n)]
    sign = 1.0
    det = dd_from_float(1.0)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col][0]))
        if a[pivot][col][0] == 0.0:
            return 0.0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            sign = -sign
        det = dd_mul(det, a[col][col])
        for r in range(col + 1, n):
            factor = dd_div(a[r][col], a[col][col])
            for c in range(col, n):
                a[r][c] = dd_sub(a[r][c], dd_mul(factor, a[col][c]))
    return sign * (det[0] + det[1])
