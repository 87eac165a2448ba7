"""Independent classical and free cumulant oracles.

Deliberately self-contained: no imports from the partition or epsilon
machinery, so these stay valid as cross-checks for the main engine.  The
classical inversion uses the explicit Mobius weights of the full partition
lattice; the free inversion uses the first-block recursion over moment
compositions and never touches partitions at all.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence


def _partitions_of(n: int):
    """All partitions of [1..n] as lists of lists, by direct recursion."""
    if n == 0:
        yield []
        return
    for smaller in _partitions_of(n - 1):
        for i in range(len(smaller)):
            yield smaller[:i] + [smaller[i] + [n]] + smaller[i + 1 :]
        yield smaller + [[n]]


def classical_cumulants_oracle(moments: Sequence[Fraction]) -> list[Fraction]:
    """Cumulants kappa_1..kappa_N from moments m_1..m_N via the signed
    factorial Mobius weights: kappa_n = sum over partitions of
    (-1)^(k-1) (k-1)! times the product of block moments."""
    ms = [Fraction(m) for m in moments]
    out: list[Fraction] = []
    for n in range(1, len(ms) + 1):
        total = Fraction(0)
        for blocks in _partitions_of(n):
            k = len(blocks)
            weight = Fraction((-1) ** (k - 1) * factorial(k - 1))
            prod = Fraction(1)
            for b in blocks:
                prod *= ms[len(b) - 1]
            total += weight * prod
        out.append(total)
    return out


def free_cumulants_oracle(moments: Sequence[Fraction]) -> list[Fraction]:
    """Free cumulants kappa_1..kappa_N from moments m_1..m_N.

    Uses the recursion m_n = sum_s kappa_s * sum over compositions
    i_1+...+i_s = n-s of m_{i_1} ... m_{i_s} (with m_0 = 1), obtained by
    conditioning on the block of the first element; solved for kappa_n.
    """
    ms = [Fraction(1)] + [Fraction(m) for m in moments]
    kappas: list[Fraction] = [Fraction(0)]  # kappa_0 placeholder

    def composition_sum(s: int, total: int) -> Fraction:
        # sum over (i_1,...,i_s) >= 0 with sum = total of prod m_{i_j}
        if s == 0:
            return Fraction(1) if total == 0 else Fraction(0)
        acc = Fraction(0)
        for first in range(total + 1):
            acc += ms[first] * composition_sum(s - 1, total - first)
        return acc

    for n in range(1, len(ms)):
        rest = Fraction(0)
        for s in range(1, n):
            rest += kappas[s] * composition_sum(s, n - s)
        kappas.append(ms[n] - rest)
    return kappas[1:]
