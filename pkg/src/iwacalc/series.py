"""Truncated Iwasawa algebra Z_l[zeta][[T]]/T^(D+1) and its localization.

IwasawaSeries is a hard-truncated power series with CycloScalar
coefficients; the variable T stands for gamma - 1 for whichever procyclic
group a caller has in mind (the engine never mixes variables of different
groups in one expression without an explicit substitution).

LocalizedElement is a fraction num/den with den outside the coefficient
maximal ideal pi*Lambda (some coefficient is a pi-unit) together with an
explicit power of l split off, value = l^(-lshift) * num / den.  The shift
is how honestly non-integral values (pseudomeasure poles aside) are carried
around; integrality checks report the leftover shift as their deficit.

Substitution endomorphisms: psi_endo is T -> (1+T)^l - 1 (gamma -> gamma^l)
and rho_sharp(xi) is T -> xi(1+T) - 1 (the twist gamma -> xi*gamma by a
finite character of the procyclic group).
"""

from __future__ import annotations

from math import comb

from .context import PrecisionContext
from .errors import (BadInput, CongruenceFails, InLIdeal, NonUnit,
                     PrecisionExhausted)
from .padic import CycloScalar, invert


class IwasawaSeries:
    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: PrecisionContext, coeffs):
        self.ctx = ctx
        cs = list(coeffs)
        if len(cs) > ctx.D + 1:
            cs = cs[:ctx.D + 1]
        while len(cs) < ctx.D + 1:
            cs.append(CycloScalar.zero(ctx))
        self.coeffs = tuple(cs)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, [])

    @classmethod
    def one(cls, ctx):
        return cls(ctx, [CycloScalar.one(ctx)])

    @classmethod
    def constant(cls, ctx, c):
        if isinstance(c, int):
            c = CycloScalar.from_int(ctx, c)
        return cls(ctx, [c])

    @classmethod
    def from_ints(cls, ctx, ints):
        return cls(ctx, [CycloScalar.from_int(ctx, n) for n in ints])

    @classmethod
    def variable(cls, ctx):
        return cls(ctx, [CycloScalar.zero(ctx), CycloScalar.one(ctx)])

    @classmethod
    def one_plus_T_pow(cls, ctx, j: int, scalar: CycloScalar | None = None):
        """(1+T)^j truncated, any j in Z; optionally scaled."""
        D = ctx.D
        if j >= 0:
            ints = [comb(j, k) for k in range(min(j, D) + 1)]
        else:
            n = -j
            ints = [((-1) ** k) * comb(n + k - 1, k) for k in range(D + 1)]
        s = cls.from_ints(ctx, ints)
        if scalar is not None:
            s = s.scale(scalar)
        return s

    # -- structure ---------------------------------------------------------

    def degree_bound(self):
        return self.ctx.D

    def is_zero_at_precision(self):
        return all(c.is_zero_at_precision() for c in self.coeffs)

    def first_unit_index(self) -> int | None:
        """Least i with coeff i a pi-unit; None means the series is in
        pi*Lambda at working precision (not localizable)."""
        for i, c in enumerate(self.coeffs):
            if c.prec > 0 and c.valuation() == 0:
                return i
        return None

    def l_content(self) -> int:
        """Largest k with all coefficients in l^k, capped at precision."""
        return min(c.valuation_l_content() for c in self.coeffs)

    def min_prec(self) -> int:
        return min(c.prec for c in self.coeffs)

    def in_l_ideal(self) -> bool:
        return self.first_unit_index() is None

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, IwasawaSeries):
            self.ctx.require_same(other.ctx)
            return other
        if isinstance(other, (int, CycloScalar)):
            return IwasawaSeries.constant(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return IwasawaSeries(self.ctx,
                             [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return IwasawaSeries(self.ctx, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if isinstance(c, int):
            c = CycloScalar.from_int(self.ctx, c)
        return IwasawaSeries(self.ctx, [c * a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, (int, CycloScalar)):
            return self.scale(other)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        fast = _mul_fullprec_kronecker(self, o)
        if fast is not None:
            return fast
        D = self.ctx.D
        zero = CycloScalar.zero(self.ctx)
        out = [zero] * (D + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero_at_precision() and a.prec >= a.ctx.N:
                continue
            top = D - i
            for j, b in enumerate(o.coeffs[:top + 1]):
                out[i + j] = out[i + j] + a * b
        return IwasawaSeries(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise BadInput("negative series powers go through LocalizedElement")
        out = IwasawaSeries.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift_T(self, k: int):
        """Multiply by T^k (k >= 0), hard-truncating."""
        zero = CycloScalar.zero(self.ctx)
        return IwasawaSeries(self.ctx, [zero] * k + list(self.coeffs))

    def divexact_l(self, j: int):
        return IwasawaSeries(self.ctx, [c.divexact_l(j) for c in self.coeffs])

    def unit_inverse(self) -> "IwasawaSeries":
        """Inverse when the constant coefficient is a pi-unit."""
        a0 = self.coeffs[0]
        if not (a0.prec > 0 and a0.valuation() == 0):
            raise NonUnit("constant coefficient is not a unit")
        inv0 = invert(a0)
        out = [inv0]
        for k in range(1, self.ctx.D + 1):
            acc = CycloScalar.zero(self.ctx)
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(inv0 * acc))
        return IwasawaSeries(self.ctx, out)

    def compose(self, g: "IwasawaSeries") -> "IwasawaSeries":
        """f(g(T)) by Horner; exact under hard truncation."""
        self.ctx.require_same(g.ctx)
        acc = IwasawaSeries.constant(self.ctx, self.coeffs[-1])
        for i in range(self.ctx.D - 1, -1, -1):
            acc = acc * g + IwasawaSeries.constant(self.ctx, self.coeffs[i])
        return acc

    def evaluate(self, x: CycloScalar) -> CycloScalar:
        """Plain Horner evaluation at a scalar point."""
        acc = self.coeffs[-1]
        for i in range(self.ctx.D - 1, -1, -1):
            acc = acc * x + self.coeffs[i]
        return acc

    def galois(self, a: int) -> "IwasawaSeries":
        return IwasawaSeries(self.ctx, [c.galois(a) for c in self.coeffs])

    # -- comparison --------------------------------------------------------

    def eq_at(self, other, digits: int | None = None) -> bool:
        o = self._coerce(other)
        return all(a.eq_at(b, digits) for a, b in zip(self.coeffs, o.coeffs))

    def __eq__(self, other):
        if isinstance(other, (IwasawaSeries, int, CycloScalar)):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        return hash(self.coeffs)

    def __repr__(self):
        return "IwasawaSeries(" + ", ".join(
            f"T^{i}:{list(c.coeffs)}" for i, c in enumerate(self.coeffs)
            if not c.is_zero_at_precision()) + ")"


def _mul_fullprec_kronecker(a: IwasawaSeries, b: IwasawaSeries):
    """One-bigint-multiply product for full-precision series, else None.

    Both factors are packed as integer polynomials in (zeta, T) evaluated at
    64-bit limb positions (Kronecker substitution); convolution coefficients
    are bounded by (D+1)*phi*l^(2N) which fits a limb for every desk-scale
    context.  Only valid when every coefficient carries full precision N,
    since then the interval rule degenerates to 'result has precision N'.
    """
    ctx = a.ctx
    N = ctx.N
    if 2 * N * ctx.l.bit_length() + (ctx.D + ctx.phi + 2).bit_length() > 62:
        return None
    for c in a.coeffs:
        if c.prec != N:
            return None
    for c in b.coeffs:
        if c.prec != N:
            return None
    phi = ctx.phi
    D = ctx.D
    width = 2 * phi - 1        # zeta-lane width; no overlap after products
    total = (2 * D + 1) * width
    buf_a = bytearray(8 * ((D + 1) * width + phi))
    buf_b = bytearray(8 * ((D + 1) * width + phi))
    for t, c in enumerate(a.coeffs):
        base = 8 * t * width
        for i, v in enumerate(c.coeffs):
            if v:
                buf_a[base + 8 * i:base + 8 * i + 8] = v.to_bytes(8, "little")
    for t, c in enumerate(b.coeffs):
        base = 8 * t * width
        for i, v in enumerate(c.coeffs):
            if v:
                buf_b[base + 8 * i:base + 8 * i + 8] = v.to_bytes(8, "little")
    prod = int.from_bytes(bytes(buf_a), "little") * \
        int.from_bytes(bytes(buf_b), "little")
    raw = prod.to_bytes(8 * (total + 2 * phi) + 16, "little")
    _, rows, _ = _kron_tables(ctx)
    lm = ctx.zeta_order
    mod = ctx.modulus
    out = []
    for t in range(D + 1):
        base = 8 * t * width
        lane = [int.from_bytes(raw[base + 8 * i:base + 8 * i + 8], "little")
                for i in range(width)]
        cs = list(lane[:phi])
        for k in range(phi, width):
            v = lane[k]
            if v:
                row = rows[k % lm]
                for j in range(phi):
                    if row[j]:
                        cs[j] += v * row[j]
        out.append(CycloScalar(ctx, [x % mod for x in cs], N))
    return IwasawaSeries(ctx, out)


def _kron_tables(ctx):
    from .padic import _cyclo_tables
    return _cyclo_tables(ctx.l, ctx.m)


# ---------------------------------------------------------------------------
# substitution endomorphisms
# ---------------------------------------------------------------------------


def psi_endo(f: IwasawaSeries) -> IwasawaSeries:
    """The Frobenius-type endomorphism gamma -> gamma^l: T -> (1+T)^l - 1."""
    g = IwasawaSeries.one_plus_T_pow(f.ctx, f.ctx.l) - IwasawaSeries.one(f.ctx)
    return f.compose(g)


def rho_sharp(xi: CycloScalar, f: IwasawaSeries) -> IwasawaSeries:
    """Twist automorphism gamma -> xi*gamma: T -> xi(1+T) - 1.

    xi must be an l-power root of unity of the context level.

    The substitution has constant term xi - 1, which is pi-small but not
    T-small, so it does not preserve the T-adic filtration: this map is the
    exact polynomial substitution on the truncated representative.  Unlike
    psi_endo (whose substitution kills T = 0 and is therefore exact mod
    T^(D+1)), identities mixing rho_sharp with truncated products hold only
    up to pi-precision (D+1-j)*v(xi-1) at T^j.
    """
    ctx = f.ctx
    if not (xi ** ctx.zeta_order).eq_at(1):
        raise BadInput("twist scalar is not an l-power root of unity")
    g = IwasawaSeries(ctx, [xi - CycloScalar.one(ctx), xi])
    return f.compose(g)


# ---------------------------------------------------------------------------
# Weierstrass division and preparation
# ---------------------------------------------------------------------------


def weierstrass_divide(f: IwasawaSeries, g: IwasawaSeries):
    """f = q*g + r with deg r < mu, mu the first unit index of g.

    Classical contraction: each round pushes the remainder one step deeper
    into the pi-ideal, so at precision N it stops after at most phi*N + D
    rounds.
    """
    ctx = f.ctx
    mu = g.first_unit_index()
    if mu is None:
        raise InLIdeal("divisor lies in the maximal ideal at this precision")
    g_low = IwasawaSeries(ctx, g.coeffs[:mu])
    g_high = IwasawaSeries(ctx, g.coeffs[mu:])
    g_high_inv = g_high.unit_inverse()
    q = IwasawaSeries.zero(ctx)
    r = f
    guard = ctx.phi * ctx.N + ctx.D + 8
    for _ in range(guard):
        r_high = IwasawaSeries(ctx, r.coeffs[mu:])
        if r_high.is_zero_at_precision():
            break
        delta = r_high * g_high_inv
        q = q + delta
        r = IwasawaSeries(ctx, r.coeffs[:mu]) - delta * g_low
    else:
        raise PrecisionExhausted("weierstrass division did not terminate")
    return q, IwasawaSeries(ctx, r.coeffs[:mu] if mu else [])


def weierstrass_split(g: IwasawaSeries):
    """g = unit * distinguished at working precision.

    distinguished is monic of degree mu (the first unit index of g) with
    lower coefficients in the maximal ideal; returned as an IwasawaSeries.
    """
    ctx = g.ctx
    mu = g.first_unit_index()
    if mu is None:
        raise InLIdeal("series lies in the maximal ideal at this precision")
    if mu > ctx.D:  # pragma: no cover - mu <= D by construction
        raise PrecisionExhausted("distinguished degree exceeds truncation")
    t_mu = IwasawaSeries(ctx, [CycloScalar.zero(ctx)] * mu +
                         [CycloScalar.one(ctx)])
    q, r = weierstrass_divide(t_mu, g)
    distinguished = t_mu - r
    unit = q.unit_inverse()
    return unit, distinguished


# ---------------------------------------------------------------------------
# localized elements
# ---------------------------------------------------------------------------


class LocalizedElement:
    """value = l^(-lshift) * num / den with den outside pi*Lambda.

    Denominators are kept unreduced (no gcds); equality is decided by
    cross multiplication at working precision.  Negative shifts are folded
    into the numerator immediately, so lshift >= 0 always.
    """

    __slots__ = ("num", "den", "lshift")

    def __init__(self, num: IwasawaSeries, den: IwasawaSeries | None = None,
                 lshift: int = 0):
        ctx = num.ctx
        if den is None:
            den = IwasawaSeries.one(ctx)
        ctx.require_same(den.ctx)
        if den.first_unit_index() is None:
            raise InLIdeal("denominator lies in pi*Lambda at this precision")
        if lshift < 0:
            num = num.scale(ctx.l ** (-lshift))
            lshift = 0
        self.num = num
        self.den = den
        self.lshift = lshift

    @property
    def ctx(self):
        return self.num.ctx

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_series(cls, s: IwasawaSeries):
        return cls(s)

    @classmethod
    def from_int(cls, ctx, n: int):
        return cls(IwasawaSeries.constant(ctx, n))

    @classmethod
    def one(cls, ctx):
        return cls.from_int(ctx, 1)

    @classmethod
    def zero(cls, ctx):
        return cls(IwasawaSeries.zero(ctx))

    # -- normal forms ------------------------------------------------------

    def normalized(self) -> "LocalizedElement":
        """Fold unit denominators into the numerator, try exact division by
        distinguished denominators, and clear common powers of l."""
        num, den, shift = self.num, self.den, self.lshift
        mu = den.first_unit_index()
        if mu == 0:
            num = num * den.unit_inverse()
            den = IwasawaSeries.one(self.ctx)
        elif mu is not None and mu > 0:
            unit, dist = weierstrass_split(den)
            q, r = weierstrass_divide(num, dist)
            if r.is_zero_at_precision():
                num = q * unit.unit_inverse()
                den = IwasawaSeries.one(self.ctx)
        if shift > 0:
            c = num.l_content()
            if c > 0:
                k = min(c, shift)
                num = num.divexact_l(k)
                shift -= k
        return LocalizedElement(num, den, shift)

    def is_integral(self) -> bool:
        n = self.normalized()
        return n.lshift == 0 and n.den.first_unit_index() == 0

    def integrality_deficit(self) -> int | None:
        """0 when integral; k > 0 when the value is l^-k * integral;
        None when the denominator does not divide out at precision."""
        n = self.normalized()
        if n.den.first_unit_index() != 0 and not n.den.eq_at(
                IwasawaSeries.one(self.ctx)):
            return None
        return n.lshift

    def as_series(self) -> IwasawaSeries:
        n = self.normalized()
        if n.lshift != 0:
            raise PrecisionExhausted(
                f"value is non-integral (l-deficit {n.lshift})")
        mu = n.den.first_unit_index()
        if mu != 0:
            raise InLIdeal("denominator does not divide out at precision")
        return n.num * n.den.unit_inverse()

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, LocalizedElement):
            self.ctx.require_same(other.ctx)
            return other
        if isinstance(other, (int, CycloScalar)):
            return LocalizedElement(IwasawaSeries.constant(self.ctx, other))
        if isinstance(other, IwasawaSeries):
            return LocalizedElement(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        s = max(self.lshift, o.lshift)
        lf = self.ctx.l ** (s - self.lshift)
        lo = self.ctx.l ** (s - o.lshift)
        num = self.num.scale(lf) * o.den + o.num.scale(lo) * self.den
        return LocalizedElement(num, self.den * o.den, s)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedElement(-self.num, self.den, self.lshift)

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
        return LocalizedElement(self.num * o.num, self.den * o.den,
                                self.lshift + o.lshift)

    __rmul__ = __mul__

    def inverse(self) -> "LocalizedElement":
        num, shift = self.num, self.lshift
        if num.first_unit_index() is None:
            # maybe the numerator is l^c * (something localizable)
            c = num.l_content()
            if c == 0:
                raise InLIdeal("numerator in pi*Lambda; cannot invert")
            num = num.divexact_l(c)
            shift -= c
            if num.first_unit_index() is None:
                raise InLIdeal("numerator in pi*Lambda; cannot invert")
        # value = l^-shift * num/den, inverse = l^shift * den/num
        return LocalizedElement(self.den, num, -shift)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = LocalizedElement.one(self.ctx)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divexact_l(self, j: int) -> "LocalizedElement":
        """Divide by l^j, preferring exact numerator division."""
        if j <= 0:
            return self if j == 0 else self * (self.ctx.l ** (-j))
        c = self.num.l_content()
        k = min(c, j)
        num = self.num.divexact_l(k) if k else self.num
        return LocalizedElement(num, self.den, self.lshift + (j - k))

    def apply_series_map(self, fn) -> "LocalizedElement":
        """Apply a ring endomorphism of the series ring to num and den."""
        den = fn(self.den)
        if den.first_unit_index() is None:
            raise PrecisionExhausted(
                "substitution pushed the denominator into pi*Lambda "
                "(truncation too short)")
        return LocalizedElement(fn(self.num), den, self.lshift)

    def galois(self, a: int) -> "LocalizedElement":
        return LocalizedElement(self.num.galois(a), self.den.galois(a),
                                self.lshift)

    # -- comparison --------------------------------------------------------

    def eq_at(self, other, digits: int | None = None) -> bool:
        o = self._coerce(other)
        s = max(self.lshift, o.lshift)
        lf = self.ctx.l ** (s - self.lshift)
        lo = self.ctx.l ** (s - o.lshift)
        lhs = self.num.scale(lf) * o.den
        rhs = o.num.scale(lo) * self.den
        return lhs.eq_at(rhs, digits)

    def __eq__(self, other):
        if isinstance(other, (LocalizedElement, IwasawaSeries, int,
                              CycloScalar)):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        return hash((self.num, self.den, self.lshift))

    def __repr__(self):
        return (f"LocalizedElement(l^-{self.lshift} * {self.num!r} / "
                f"{self.den!r})")


def localized_div(f: IwasawaSeries, g: IwasawaSeries) -> LocalizedElement:
    """f/g in the localization; den normalizes away when g divides f."""
    return LocalizedElement(f, g).normalized()


def one_over_l_log_quotient(a: LocalizedElement,
                            b: LocalizedElement) -> LocalizedElement:
    """(1/l) log(a/b) for a/b = 1 mod the maximal ideal, termwise series.

    The hypothesis congruence requires every coefficient of a/b - 1 to
    have positive pi-valuation (CongruenceFails otherwise, with the first
    offending index in the message).  When a/b = 1 mod l the result is
    integral; shallower congruences yield an honest positive lshift.
    """
    ctx = a.ctx
    q = (a / b).normalized()
    h = (q - 1).normalized()
    if h.lshift > 0:
        raise CongruenceFails("a/b - 1 has a genuine l-denominator")
    # congruence test on the numerator, which decides membership in the
    # maximal ideal of the localization since den is invertible there
    for i, c in enumerate(h.num.coeffs):
        if c.prec > 0 and c.valuation() == 0:
            raise CongruenceFails(
                f"a/b - 1 has a unit coefficient at T^{i}")
    total = LocalizedElement.zero(ctx)
    power = h
    c_l = max(h.num.l_content(), 0)
    k = 1
    kmax = ctx.phi * ctx.N + ctx.l + 8 if c_l == 0 else \
        (ctx.N // max(c_l, 1)) + ctx.l + 8
    while k <= kmax:
        term = power
        # divide by k = unit * l^v
        kk, v = k, 0
        while kk % ctx.l == 0:
            kk //= ctx.l
            v += 1
        if kk != 1:
            inv = pow(kk, -1, ctx.modulus)
            term = term * inv
        if v:
            term = term.divexact_l(v)
        if k % 2 == 0:
            term = -term
        total = total + term
        k += 1
        if k <= kmax:
            power = (power * h).normalized()
            if power.lshift == 0 and power.num.is_zero_at_precision():
                break
    return total.divexact_l(1).normalized()
