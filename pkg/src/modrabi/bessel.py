"""Bessel functions of the first kind, integer order.

Two regimes, both accurate to better than 1e-12 absolute on |x| <= 50:

* ascending power series for |x| <= 12, terms accumulated with ``math.fsum``
  so cancellation near the upper end of the range does not eat the budget;
* downward (Miller-style) three-term recurrence above, normalized with the
  identity J0(x) + 2*sum_k J_{2k}(x) = 1.

Only n >= 0 is exposed; negative orders follow from J_{-n}(x) = (-1)^n J_n(x)
at the call site.
"""

import math

# First zero of J0. Drive amplitudes at eta = _J0_ZERO1 / 2 null one of the
# two effective couplings exactly.
J0_FIRST_ZERO = 2.404825557695773

X_LIMIT = 50.0
_SERIES_LIMIT = 12.0
_TERM_CUTOFF = 1e-15


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer n >= 0 and |x| <= 50."""
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a nonnegative integer, got {n}")
    n = int(n)
    x = float(x)
    if not abs(x) <= X_LIMIT:
        raise ValueError(f"argument {x} outside validated range |x| <= {X_LIMIT}")
    if x < 0.0:
        sign = -1.0 if n % 2 else 1.0
        return sign * bessel_j(n, -x)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x <= _SERIES_LIMIT:
        return _series(n, x)
    return _miller(n, x)


def _series(n: int, x: float) -> float:
    # J_n(x) = sum_k (-1)^k (x/2)^(n+2k) / (k! (n+k)!)
    half = 0.5 * x
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
        if term == 0.0:  # underflow: result below representable range
            return 0.0
    terms = [term]
    qsq = half * half
    k = 0
    while abs(term) > _TERM_CUTOFF * 1e-3 and k < 400:
        term = -term * qsq / ((k + 1) * (n + k + 1))
        terms.append(term)
        k += 1
    return math.fsum(terms)


def _miller(n: int, x: float) -> float:
    # Downward recurrence J_{k-1} = (2k/x) J_k - J_{k+1} from a seed high
    # above max(n, x); the normalization sum fixes the overall scale.
    big = 1e10
    start = max(n, int(x)) + 64
    if start % 2:
        start += 1
    jp = 0.0
    jc = 1e-30
    norm = 0.0
    result = 0.0
    for k in range(start, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp = jc
        jc = jm
        if abs(jc) > big:
            jc /= big
            jp /= big
            norm /= big
            result /= big
        if k % 2 == 1:  # jc now holds J_{k-1}, an even order
            norm += 2.0 * jc
        if k - 1 == n:
            result = jc
    norm -= jc  # J0 was added with weight 2 in the loop
    return result / norm
