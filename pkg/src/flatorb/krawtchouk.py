"""Binary Krawtchouk polynomials evaluated at integers."""

from __future__ import annotations

from math import comb


def binom(m: int, n: int) -> int:
    """Binomial coefficient that vanishes for n < 0 or n > m (m >= 0)."""
    if n < 0 or m < 0 or n > m:
        return 0
    return comb(m, n)


def krawtchouk(d: int, p: int, x: int) -> int:
    """K_p^d(x) = sum_j (-1)^j C(x, j) C(d - x, p - j), exactly."""
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if not 0 <= p <= d:
        raise ValueError(f"p={p} outside [0, {d}]")
    return sum((-1) ** j * binom(x, j) * binom(d - x, p - j) for j in range(p + 1))


def krawtchouk_zeros(d: int, p: int) -> list[int]:
    """Integers k in [1, d-1] at which K_p^d vanishes."""
    return [k for k in range(1, d) if krawtchouk(d, p, k) == 0]


def odd_dimension_zero_scan(d_max: int) -> dict[int, list[tuple[int, int]]]:
    """For each odd d in [3, d_max], all (p, k) in [1, d-1]^2 with K_p^d(k) = 0.

    Degrees 0 and d are skipped: K_0 is identically 1 and K_d is +-1.
    """
    if d_max < 3:
        raise ValueError("d_max must be at least 3")
    return {
        d: [(p, k) for p in range(1, d) for k in krawtchouk_zeros(d, p)]
        for d in range(3, d_max + 1, 2)
    }
