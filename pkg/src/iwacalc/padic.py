"""Exact arithmetic in Z/l^N and in Z_l[zeta_{l^m}]/l^N with valuations.

Scalars carry their own effective precision: every residue is stored
modulo l^prec with prec <= N, and the only operations that lower prec are
the documented lossy ones (division by l, logarithm denominators).  The
cyclotomic ring Z_l[zeta] is represented on the power basis modulo the
l^m-th cyclotomic polynomial; it is local with uniformizer pi = zeta - 1,
and pi-valuations are computed exactly through the unimodular change of
basis zeta = 1 + pi.

No floating point anywhere; everything is plain integer arithmetic.
"""

from __future__ import annotations

from functools import lru_cache

from .context import PrecisionContext
from .errors import BadInput, NonUnit, NotOneUnit, PrecisionExhausted


def valuation_int(n: int, l: int) -> int | None:
    """l-adic valuation of an integer, None for 0 (means +infinity here)."""
    if n == 0:
        return None
    v = 0
    while n % l == 0:
        n //= l
        v += 1
    return v


class PadicScalar:
    """An element of Z_l known modulo l^prec.

    residue is normalized into [0, l^prec).  A zero residue does not mean
    the element is zero, only that it is indistinguishable from zero at
    this precision; valuation() returns None in that case.
    """

    __slots__ = ("ctx", "residue", "prec")

    def __init__(self, ctx: PrecisionContext, residue: int, prec: int | None = None):
        self.ctx = ctx
        self.prec = ctx.N if prec is None else min(prec, ctx.N)
        if self.prec < 0:
            raise PrecisionExhausted("no digits of precision left")
        self.residue = residue % (ctx.l ** self.prec) if self.prec > 0 else 0

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, 0)

    @classmethod
    def one(cls, ctx):
        return cls(ctx, 1)

    # -- structure ---------------------------------------------------------

    def valuation(self) -> int | None:
        """min(v_l(residue), prec); None when residue is 0 at precision."""
        v = valuation_int(self.residue, self.ctx.l)
        if v is None or v >= self.prec:
            return None
        return v

    def valuation_lower_bound(self) -> int:
        v = self.valuation()
        return self.prec if v is None else v

    def is_zero_at_precision(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.prec > 0 and self.residue % self.ctx.l != 0

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            self.ctx.require_same(other.ctx)
            return other
        if isinstance(other, int):
            return PadicScalar(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = min(self.prec, o.prec)
        return PadicScalar(self.ctx, self.residue + o.residue, p)

    __radd__ = __add__

    def __neg__(self):
        return PadicScalar(self.ctx, -self.residue, self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # interval rule: error terms l^p1*y and l^p2*x pick up the other
        # factor's valuation
        p = min(self.prec + o.valuation_lower_bound(),
                o.prec + self.valuation_lower_bound(),
                self.ctx.N)
        return PadicScalar(self.ctx, self.residue * o.residue, p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.unit_inverse() ** (-k)
        out = PadicScalar(self.ctx, 1, self.prec if k else self.ctx.N)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def unit_inverse(self) -> "PadicScalar":
        if not self.is_unit():
            raise NonUnit(f"not a unit at precision: {self!r}")
        inv = pow(self.residue, -1, self.ctx.l ** self.prec)
        return PadicScalar(self.ctx, inv, self.prec)

    def divexact_l(self, j: int) -> "PadicScalar":
        """Divide by l^j; the quotient is known to j fewer digits."""
        if j == 0:
            return self
        lj = self.ctx.l ** j
        if self.residue % lj != 0:
            raise PrecisionExhausted(
                f"residue {self.residue} not divisible by l^{j}")
        return PadicScalar(self.ctx, self.residue // lj, self.prec - j)

    # -- comparison --------------------------------------------------------

    def eq_at(self, other, digits: int | None = None) -> bool:
        """Equality of residues modulo l^digits (default: shared precision)."""
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        if digits is not None:
            p = min(p, digits)
        mod = self.ctx.l ** p
        return (self.residue - o.residue) % mod == 0

    def __eq__(self, other):
        if isinstance(other, (PadicScalar, int)):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover - not used as dict key in anger
        return hash((self.residue, self.prec))

    def __repr__(self):
        return f"PadicScalar({self.residue} mod {self.ctx.l}^{self.prec})"

    def digits(self) -> list[int]:
        """Base-l digits, lowest first, one per known digit."""
        out, r = [], self.residue
        for _ in range(self.prec):
            r, d = divmod(r, self.ctx.l)
            out.append(d)
        return out


# ---------------------------------------------------------------------------
# cyclotomic layer
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _cyclo_tables(l: int, m: int):
    """Reduction and basis data for Z[x]/Phi_{l^m}(x).

    Returns (phi, power_rows, binom_rows) where power_rows[k] is the
    coefficient vector of x^k mod Phi for 0 <= k < l^m, and binom_rows is
    the unimodular matrix taking zeta-basis coefficients to pi-basis
    coefficients via zeta^i = (1+pi)^i.
    """
    if m == 0:
        return 1, ((1,),), ((1,),)
    phi = l ** (m - 1) * (l - 1)
    lm = l ** m
    step = l ** (m - 1)
    rows = []
    for k in range(phi):
        row = [0] * phi
        row[k] = 1
        rows.append(tuple(row))
    # x^phi = -(1 + x^step + ... + x^((l-2) step)); for phi <= k < l^m all
    # exponents k - phi + i*step stay below phi, so one pass suffices
    for k in range(phi, lm):
        row = [0] * phi
        for i in range(l - 1):
            row[k - phi + i * step] -= 1
        rows.append(tuple(row))
    # c_j = sum_i a_i * C(i, j): triangular, unimodular
    from math import comb
    binom = tuple(tuple(comb(i, j) for i in range(phi)) for j in range(phi))
    return phi, tuple(rows), binom


class CycloScalar:
    """An element of Z_l[zeta_{l^m}] mod l^prec on the power basis.

    coeffs has length phi(l^m); the ring is local with maximal ideal
    (zeta - 1), and valuation() counts (zeta-1)-units.  v(l) = phi(l^m).
    """

    __slots__ = ("ctx", "coeffs", "prec")

    def __init__(self, ctx: PrecisionContext, coeffs, prec: int | None = None):
        self.ctx = ctx
        self.prec = ctx.N if prec is None else min(prec, ctx.N)
        if self.prec < 0:
            raise PrecisionExhausted("no digits of precision left")
        mod = ctx.l ** self.prec
        phi = ctx.phi
        cs = list(coeffs)
        if len(cs) > phi:
            raise BadInput("coefficient vector longer than phi(l^m)")
        cs += [0] * (phi - len(cs))
        if self.prec > 0:
            self.coeffs = tuple(c % mod for c in cs)
        else:
            self.coeffs = tuple(0 for _ in cs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_int(cls, ctx, n: int, prec=None):
        return cls(ctx, [n], prec)

    @classmethod
    def from_padic(cls, x: PadicScalar):
        return cls(x.ctx, [x.residue], x.prec)

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [])

    @classmethod
    def one(cls, ctx):
        return cls(ctx, [1])

    @classmethod
    def zeta_pow(cls, ctx, k: int, prec=None):
        """zeta_{l^m}^k as a ring element."""
        _, rows, _ = _cyclo_tables(ctx.l, ctx.m)
        lm = ctx.zeta_order
        return cls(ctx, rows[k % lm], prec)

    # -- structure ---------------------------------------------------------

    def padic_coeffs(self):
        return tuple(PadicScalar(self.ctx, c, self.prec) for c in self.coeffs)

    def is_zero_at_precision(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def as_padic(self) -> PadicScalar:
        if not self.is_rational():
            raise BadInput("value is not in Z_l")
        return PadicScalar(self.ctx, self.coeffs[0], self.prec)

    def pi_basis(self):
        """Coefficients on the basis 1, pi, ..., pi^(phi-1), pi = zeta-1."""
        phi, _, binom = _cyclo_tables(self.ctx.l, self.ctx.m)
        mod = self.ctx.l ** self.prec if self.prec else 1
        return tuple(
            sum(self.coeffs[i] * binom[j][i] for i in range(j, phi)) % mod
            for j in range(phi))

    def valuation(self) -> int | None:
        """(zeta-1)-valuation; None when 0 at working precision.

        On the pi-basis the candidate values e*v_l(c_j) + j are pairwise
        distinct mod e, so the minimum is attained by a unique term and no
        cancellation can hide it.
        """
        e = self.ctx.phi
        l = self.ctx.l
        best = None
        for j, c in enumerate(self.pi_basis()):
            v = valuation_int(c, l)
            if v is None or v >= self.prec:
                continue
            cand = e * v + j
            if best is None or cand < best:
                best = cand
        return best

    def valuation_l_content(self) -> int:
        """Largest k with self in l^k * (ring), capped at prec."""
        l = self.ctx.l
        best = self.prec
        for c in self.coeffs:
            v = valuation_int(c, l)
            if v is None:
                continue
            best = min(best, v)
        return best

    def is_unit(self) -> bool:
        return self.prec > 0 and self.valuation() == 0

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycloScalar):
            self.ctx.require_same(other.ctx)
            return other
        if isinstance(other, int):
            return CycloScalar.from_int(self.ctx, other)
        if isinstance(other, PadicScalar):
            return CycloScalar.from_padic(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = min(self.prec, o.prec)
        return CycloScalar(self.ctx,
                           [a + b for a, b in zip(self.coeffs, o.coeffs)], p)

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.ctx, [-a for a in self.coeffs], self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        phi, rows, _ = _cyclo_tables(self.ctx.l, self.ctx.m)
        p = min(self.prec + o.valuation_l_content(),
                o.prec + self.valuation_l_content(),
                self.ctx.N)
        if p <= 0:
            return CycloScalar(self.ctx, [], 0)
        a, b = self.coeffs, o.coeffs
        conv = [0] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        conv[i + j] += ai * bj
        out = list(conv[:phi])
        lm = self.ctx.zeta_order
        for k in range(phi, 2 * phi - 1):
            ck = conv[k]
            if ck:
                row = rows[k % lm]
                for j in range(phi):
                    if row[j]:
                        out[j] += ck * row[j]
        return CycloScalar(self.ctx, out, p)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return invert(self) ** (-k)
        out = CycloScalar.one(self.ctx)
        out = CycloScalar(self.ctx, out.coeffs, self.prec if k else self.ctx.N)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divexact_l(self, j: int) -> "CycloScalar":
        """Divide by l^j; every coefficient must be divisible at precision."""
        if j == 0:
            return self
        lj = self.ctx.l ** j
        for c in self.coeffs:
            if c % lj != 0:
                raise PrecisionExhausted(
                    f"coefficient {c} not divisible by l^{j}")
        return CycloScalar(self.ctx, [c // lj for c in self.coeffs],
                           self.prec - j)

    def divexact_int(self, k: int) -> "CycloScalar":
        """Divide by a nonzero integer: unit part exactly, l-part lossily."""
        if k == 0:
            raise BadInput("division by zero")
        sign = -1 if k < 0 else 1
        k = abs(k)
        j = 0
        while k % self.ctx.l == 0:
            k //= self.ctx.l
            j += 1
        x = self.divexact_l(j)
        if k != 1:
            inv = pow(k, -1, self.ctx.l ** max(x.prec, 1))
            x = CycloScalar(self.ctx, [c * inv for c in x.coeffs], x.prec)
        return -x if sign < 0 else x

    def galois(self, a: int) -> "CycloScalar":
        """The automorphism zeta -> zeta^a, a prime to l."""
        if a % self.ctx.l == 0 and self.ctx.m > 0:
            raise BadInput("galois exponent must be prime to l")
        phi, rows, _ = _cyclo_tables(self.ctx.l, self.ctx.m)
        lm = self.ctx.zeta_order
        out = [0] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                row = rows[(i * a) % lm]
                for j in range(phi):
                    if row[j]:
                        out[j] += c * row[j]
        return CycloScalar(self.ctx, out, self.prec)

    def conj(self) -> "CycloScalar":
        return self.galois(-1 % self.ctx.zeta_order) if self.ctx.m else self

    # -- comparison --------------------------------------------------------

    def eq_at(self, other, digits: int | None = None) -> bool:
        o = self._coerce(other)
        p = min(self.prec, o.prec)
        if digits is not None:
            p = min(p, digits)
        mod = self.ctx.l ** p
        return all((a - b) % mod == 0 for a, b in zip(self.coeffs, o.coeffs))

    def __eq__(self, other):
        if isinstance(other, (CycloScalar, PadicScalar, int)):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        return hash((self.coeffs, self.prec))

    def __repr__(self):
        return f"CycloScalar({list(self.coeffs)} mod {self.ctx.l}^{self.prec})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def invert(x: CycloScalar) -> CycloScalar:
    """Inverse of a unit of Z_l[zeta]/l^prec.

    A unit is an element of (zeta-1)-valuation 0, equivalently x(1) is
    prime to l.  Start from the inverse mod l (extended Euclid against
    (x-1)^phi, the reduction of the cyclotomic polynomial) and Hensel-lift
    quadratically.
    """
    if x.is_zero_at_precision():
        raise PrecisionExhausted("cannot invert: zero at working precision")
    v = x.valuation()
    if v is None or v > 0:
        raise NonUnit(f"valuation {v} > 0, not invertible in the ring")
    l = x.ctx.l
    aug = sum(x.coeffs) % l  # evaluation at zeta = 1, mod l
    inv_aug = pow(aug, -1, l)
    # mod l the pi-basis is triangular: compute inverse by Hensel from the
    # constant approximation (x * inv_aug = 1 + nilpotent mod l).
    y = CycloScalar.from_int(x.ctx, inv_aug, x.prec)
    one = CycloScalar.from_int(x.ctx, 1, x.prec)
    # y <- y(2 - xy) converges in the (l, zeta-1)-adic topology
    guard = 0
    while True:
        err = x * y - one
        if err.is_zero_at_precision():
            return y
        y = y * (one + one - x * y)
        guard += 1
        if guard > 4 * x.ctx.phi * max(x.prec, 1) + 16:
            raise NonUnit("inversion did not converge; not a unit")


def teichmuller(ctx: PrecisionContext, a: int) -> PadicScalar:
    """The Teichmuller lift: the (l-1)-st root of unity congruent to a mod l.

    Computed by iterating a -> a^l, which converges in at most N steps.
    """
    if a % ctx.l == 0:
        raise BadInput(f"{a} is divisible by l = {ctx.l}")
    mod = ctx.modulus
    t = a % mod
    for _ in range(ctx.N + 1):
        t_next = pow(t, ctx.l, mod)
        if t_next == t:
            break
        t = t_next
    return PadicScalar(ctx, t)


def log_1unit(x: CycloScalar) -> CycloScalar:
    """log of a 1-unit via the alternating series in (x - 1).

    Requires x = 1 mod (l, zeta-1).  Terms (x-1)^k / k are divided exactly;
    if a division fails (possible only for deeply ramified inputs outside
    the integral convergence region) PrecisionExhausted is raised.  The
    result loses max_k v_l(k) digits over the contributing range.
    """
    ctx = x.ctx
    y = x - CycloScalar.one(ctx)
    v = y.valuation()
    if v is None:
        # x = 1 exactly at precision
        return CycloScalar.zero(ctx)
    if v < 1:
        raise NotOneUnit(f"x - 1 has valuation {v}, not a 1-unit")
    e = ctx.phi
    total = CycloScalar.zero(ctx)
    power = y
    k = 1
    # stop once (x-1)^k can no longer contribute a digit
    kmax = (e * ctx.N) // v + e + ctx.l + 4
    while k <= kmax:
        if power.is_zero_at_precision() and k * v >= e * ctx.N:
            break
        term = power.divexact_int(k)
        if k % 2 == 0:
            term = -term
        total = total + term
        k += 1
        if k <= kmax:
            power = power * y
    return total
