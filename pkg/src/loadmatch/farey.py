"""Exact search over fractions with bounded denominator.

The core routine walks the Stern-Brocot tree with run acceleration, so a
monotone yes/no oracle is queried O(log^2) times instead of once per tree
level. It is used to locate block densities and densest-subgraph densities
exactly, without floating-point rounding.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable


def largest_satisfying_fraction(
    pred: Callable[[int, int], bool],
    max_den: int,
    max_num: int | None = None,
) -> Fraction:
    """Largest fraction a/b with b <= max_den satisfying a monotone predicate.

    pred(a, b) must be True on every fraction below some unknown boundary
    value and False above it; pred(0, 1) is assumed True and never queried.
    The boundary itself must be representable with denominator <= max_den,
    which makes the returned fraction exact.

    max_num, when given, additionally caps the numerator of the answer
    (the boundary must respect it).
    """
    if max_den < 1:
        raise ValueError("max_den must be >= 1")
    ln, ld = 0, 1          # largest known True fraction ln/ld
    hn, hd = 1, 0          # smallest known False fraction (1/0 = +infinity)

    def num_ok(a: int) -> bool:
        return max_num is None or a <= max_num

    while ld + hd <= max_den and num_ok(ln + hn):
        if pred(ln + hn, ld + hd):
            # run of right moves: L <- L + k*H, maximal k keeping pred True
            # and L within the budget
            k = 1
            while True:
                a, b = ln + 2 * k * hn, ld + 2 * k * hd
                if (hd > 0 and b > max_den) or (hn > 0 and not num_ok(a)):
                    break
                if not pred(a, b):
                    break
                k *= 2
            lo, hi = k, 2 * k
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                a, b = ln + mid * hn, ld + mid * hd
                if (hd == 0 or b <= max_den) and (hn == 0 or num_ok(a)) and pred(a, b):
                    lo = mid
                else:
                    hi = mid
            ln, ld = ln + lo * hn, ld + lo * hd
        else:
            # run of left moves: H <- H + k*L, maximal k keeping pred False;
            # capped at the point where the next mediant leaves the budget,
            # which lets the outer loop terminate
            cap = -(-(max_den + 1 - ld - hd) // ld)
            if max_num is not None and ln > 0:
                cap = min(cap, -(-(max_num + 1 - ln - hn) // ln))
            cap = max(cap, 1)
            k = 1
            while 2 * k <= cap and not pred(hn + 2 * k * ln, hd + 2 * k * ld):
                k *= 2
            lo, hi = k, min(2 * k, cap + 1)
            while lo + 1 < hi:
                mid = (lo + hi) // 2
                if not pred(hn + mid * ln, hd + mid * ld):
                    lo = mid
                else:
                    hi = mid
            hn, hd = hn + lo * ln, hd + lo * ld
    # no admissible fraction lies strictly between L and H anymore
    return Fraction(ln, ld)


def farey_successor(value: Fraction, max_den: int) -> Fraction:
    """Smallest fraction with denominator <= max_den strictly above value."""
    a, b = value.numerator, value.denominator
    if b > max_den:
        raise ValueError("value has denominator beyond the bound")
    # particular solution of p*b - q*a = 1, then shift by (a, b) to the
    # largest admissible denominator
    g, x, y = _ext_gcd(b, a)
    assert g == 1
    p0, q0 = x, -y
    k = (max_den - q0) // b
    return Fraction(p0 + k * a, q0 + k * b)


def _ext_gcd(a: int, b: int):
    if b == 0:
        return a, 1, 0
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y
