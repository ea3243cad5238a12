"""Working-precision context shared by every value in a computation.

A context fixes the odd prime l, the coefficient precision N (digits base
l), the series truncation degree D (everything is computed mod T^(D+1))
and the cyclotomic level m (roots of unity of order dividing l^m are
available).  Values from different contexts never mix.
"""

from dataclasses import dataclass

from .errors import BadInput


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable bundle (l, N, D, m) of finite-precision parameters.

    l must be an odd prime, N >= 1 coefficient digits, D >= 1 truncation
    degree, m >= 0 cyclotomic level.  phi = phi(l^m) is the rank of the
    cyclotomic coefficient ring over Z/l^N.
    """

    l: int
    N: int
    D: int
    m: int = 0

    def __post_init__(self):
        if self.l < 3 or not _is_prime(self.l):
            raise BadInput(f"l must be an odd prime, got {self.l}")
        if self.N < 1:
            raise BadInput(f"N must be >= 1, got {self.N}")
        if self.D < 1:
            raise BadInput(f"D must be >= 1, got {self.D}")
        if self.m < 0:
            raise BadInput(f"m must be >= 0, got {self.m}")

    @property
    def modulus(self) -> int:
        return self.l ** self.N

    @property
    def phi(self) -> int:
        """Degree of Z_l[zeta_{l^m}] over Z_l: phi(l^m)."""
        if self.m == 0:
            return 1
        return self.l ** (self.m - 1) * (self.l - 1)

    @property
    def zeta_order(self) -> int:
        return self.l ** self.m

    def with_precision(self, N: int) -> "PrecisionContext":
        return PrecisionContext(self.l, N, self.D, self.m)

    def with_degree(self, D: int) -> "PrecisionContext":
        return PrecisionContext(self.l, self.N, D, self.m)

    def with_level(self, m: int) -> "PrecisionContext":
        return PrecisionContext(self.l, self.N, self.D, m)

    def require_same(self, other: "PrecisionContext"):
        if self != other:
            raise BadInput(f"context mismatch: {self} vs {other}")
