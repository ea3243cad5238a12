"""Abelian l-adic L-values over Q and the pseudomeasure that encodes them.

Two independent pipelines live here, and the test suites play them against
each other:

* the interpolation oracle: Kubota-Leopoldt values L_l(1-n, chi) =
  -(1 - chi omega^-n(l) l^(n-1)) B_{n, chi omega^-n} / n from exact
  generalized Bernoulli sums (classical B_1 = -1/2 convention; for the
  trivial character B_{n,1} = B_n(1), so B_{1,1} = +1/2);

* the construction: the regularized Stickelberger measure at level l^(nu+1),
  cell values w(a) = B_1(a/q) - c B_1(<c^-1 a>/q) (exactly l-integral),
  twisted to the totally real side by one inverse cyclotomic-character
  weight, bucketed over the group H x Gamma/Gamma^(l^nu) and divided by the
  regularizer element 1 - [sigma_c] in the localized algebra.

The group is G = Gal(Q(zeta_{l^infty})^+/Q) = H x Gamma with H cyclic of
order (l-1)/2 (classes of Teichmueller units mod +-1) and Gamma procyclic
with the fixed generator gamma acting on l-power roots of unity by
u = 1 + l.  Everything even; odd characters are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import sympy

from .context import PrecisionContext
from .errors import (BadAuxiliary, BadInput, PoleAtTrivial,
                     PrecisionExhausted, TruncationDominates)
from .logpseudo import CongruenceReport
from .padic import CycloScalar, PadicScalar, teichmuller, valuation_int
from .series import (IwasawaSeries, LocalizedElement, psi_endo, rho_sharp,
                     weierstrass_divide, weierstrass_split)


def bernoulli_minus(k: int) -> Fraction:
    """Classical Bernoulli numbers with B_1 = -1/2."""
    if k == 1:
        return Fraction(-1, 2)
    return Fraction(sympy.bernoulli(k))


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(n: int):
    """Coefficients of B_n(x) = sum_k C(n,k) B_k x^(n-k)."""
    return tuple(math.comb(n, k) * bernoulli_minus(k) for k in range(n + 1))


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum(c * x ** (n - k)
               for k, c in enumerate(bernoulli_poly_coeffs(n)))


# ---------------------------------------------------------------------------
# characters of G = H x Gamma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacterDatum:
    """An even character: omega^tame times a wild character of Gamma.

    tame is an exponent mod l-1 (must be even); the wild part has level
    wild_level = w (conductor l^(w+1) when nontrivial) and sends gamma to
    zeta_{l^w}^wild_exp.  Normalizes itself to primitive form.
    """

    ctx: PrecisionContext
    tame: int
    wild_level: int = 0
    wild_exp: int = 0

    def __post_init__(self):
        l = self.ctx.l
        t = self.tame % (l - 1)
        w, j = self.wild_level, self.wild_exp % (l ** self.wild_level or 1)
        while w > 0 and j % l == 0:
            w -= 1
            j //= l
        if w == 0:
            j = 0
        object.__setattr__(self, "tame", t)
        object.__setattr__(self, "wild_level", w)
        object.__setattr__(self, "wild_exp", j)
        if w > self.ctx.m:
            raise BadInput(f"wild level {w} exceeds context level "
                           f"m={self.ctx.m}")

    @property
    def is_even(self) -> bool:
        return self.tame % 2 == 0

    def require_even(self):
        if not self.is_even:
            raise BadInput("only even characters live on the totally real "
                           "side")
        return self

    @property
    def conductor(self) -> int:
        l = self.ctx.l
        if self.wild_level > 0:
            return l ** (self.wild_level + 1)
        return l if self.tame else 1

    @property
    def is_trivial(self) -> bool:
        return self.tame == 0 and self.wild_level == 0

    def h_index(self) -> int:
        """Index of the H-character omega^tame: tame/2 mod (l-1)/2."""
        self.require_even()
        return (self.tame // 2) % ((self.ctx.l - 1) // 2)

    def gamma_value(self) -> CycloScalar:
        """chi(gamma) as a root of unity."""
        ctx = self.ctx
        if self.wild_level == 0:
            return CycloScalar.one(ctx)
        exp = self.wild_exp * ctx.l ** (ctx.m - self.wild_level)
        return CycloScalar.zeta_pow(ctx, exp)

    def omega_twist(self, n: int) -> "DirichletCharacterDatum":
        """The primitive character chi * omega^n."""
        return DirichletCharacterDatum(self.ctx, self.tame + n,
                                       self.wild_level, self.wild_exp)

    def power(self, k: int) -> "DirichletCharacterDatum":
        """chi^k; note omega^(l*t) = omega^t so psi_l(chi) = chi^l keeps
        the tame part."""
        return DirichletCharacterDatum(
            self.ctx, self.tame * k,
            self.wild_level, self.wild_exp * k)

    def value_int(self, a: int, prec: int) -> "tuple[int, int, int]":
        """chi(sigma_a) split as (teich-part residue, wild zeta exponent,
        wild zeta order), all for a prime to l."""
        ctx = self.ctx
        l = ctx.l
        if a % l == 0:
            raise BadInput("character values need arguments prime to l")
        mod = l ** prec
        tame_val = pow(teichmuller(ctx.with_precision(prec), a).residue,
                       self.tame, mod) if self.tame else 1
        if self.wild_level == 0:
            return tame_val, 0, 1
        lw = l ** self.wild_level
        y = _dlog_unit(l, a, self.wild_level, prec)
        return tame_val, (self.wild_exp * y) % lw, lw

    def value(self, a: int) -> CycloScalar:
        """chi(sigma_a) in the working coefficient ring."""
        ctx = self.ctx
        tame_val, zexp, zord = self.value_int(a, ctx.N)
        out = CycloScalar.from_int(ctx, tame_val)
        if zord > 1:
            out = out * CycloScalar.zeta_pow(
                ctx, zexp * (ctx.zeta_order // zord))
        return out


def _dlog_unit(l: int, a: int, w: int, prec: int) -> int:
    """y with <a> = (1+l)^y mod l^(w+1), i.e. the wild coordinate of
    sigma_a at level w."""
    if w == 0:
        return 0
    modq = l ** (w + 1)
    ctx = PrecisionContext(l, w + 1, 1)
    om = teichmuller(ctx, a).residue
    ua = a * pow(om, -1, modq) % modq
    return _dlog_table(l, w)[ua]


@lru_cache(maxsize=None)
def _dlog_table(l: int, w: int):
    modq = l ** (w + 1)
    u = 1 + l
    table = {}
    x = 1
    for y in range(l ** w):
        table[x] = y
        x = x * u % modq
    return table


# ---------------------------------------------------------------------------
# Kubota-Leopoldt oracle
# ---------------------------------------------------------------------------


def gen_bernoulli(ctx: PrecisionContext, n: int,
                  theta: DirichletCharacterDatum,
                  allow_odd: bool = True):
    """B_{n,theta} = f^(n-1) sum_{a=1}^f theta(a) B_n(a/f), exactly.

    Rational arithmetic stays exact until one final l-adic reduction; the
    result is (CycloScalar, lshift) with value = l^-lshift * scalar (the
    trivial branch picks up l in the denominator when (l-1) | n).
    """
    if n < 1:
        raise BadInput("weights start at 1")
    ctx_x = ctx.with_precision(ctx.N + n + 4)
    l = ctx.l
    f = theta.conductor
    coeffs = bernoulli_poly_coeffs(n)
    vals = []
    denlcm = 1
    for a in range(1, f + 1):
        if f > 1 and a % l == 0:
            continue
        v = bernoulli_poly(n, Fraction(a, f)) * Fraction(f) ** (n - 1)
        vals.append((a, v))
        denlcm = denlcm * v.denominator // math.gcd(denlcm, v.denominator)
    v_l = 0
    du = denlcm
    while du % l == 0:
        du //= l
        v_l += 1
    acc = CycloScalar.zero(ctx_x)
    for a, v in vals:
        t_int = v.numerator * (denlcm // v.denominator)
        if f == 1:
            chi_a = CycloScalar.one(ctx_x)
        else:
            tame_val, zexp, zord = theta.value_int(a, ctx_x.N)
            chi_a = CycloScalar.from_int(ctx_x, tame_val)
            if zord > 1:
                chi_a = chi_a * CycloScalar.zeta_pow(
                    ctx_x, zexp * (ctx_x.zeta_order // zord))
        acc = acc + chi_a * t_int
    acc = acc.divexact_int(du)
    # value = acc / l^v_l; normalize what divides
    shift = v_l
    while shift > 0 and acc.valuation_l_content() >= 1:
        acc = acc.divexact_l(1)
        shift -= 1
    return CycloScalar(ctx, acc.coeffs, min(acc.prec, ctx.N)), shift


def padic_l_value(ctx: PrecisionContext, n: int,
                  chi: DirichletCharacterDatum, S=()):
    """L_{l,S}(1-n, chi) by the Kubota-Leopoldt formula.

    Returns (CycloScalar, lshift).  S lists auxiliary primes (not l) whose
    Euler factors (1 - chi omega^-n(p) p^(n-1)) are multiplied in.
    """
    if n < 1:
        raise PoleAtTrivial("interpolation range is n >= 1")
    chi.require_even()
    l = ctx.l
    theta = chi.omega_twist(-n)
    B, shift = gen_bernoulli(ctx, n, theta)
    if theta.is_trivial:
        euler_l = CycloScalar.from_int(ctx, 1 - l ** (n - 1))
    else:
        euler_l = CycloScalar.one(ctx)
    val = B * euler_l
    vn = valuation_int(n, l) or 0
    val = -val.divexact_int(n // l ** vn)
    for _ in range(vn):
        if val.valuation_l_content() >= 1:
            val = val.divexact_l(1)
        else:
            shift += 1
    for p in S:
        if p in ("inf", l):
            continue
        # theta(p) p^(n-1)
        tame_val, zexp, zord = theta.value_int(p, ctx.N)
        tp = CycloScalar.from_int(ctx, tame_val)
        if zord > 1:
            tp = tp * CycloScalar.zeta_pow(ctx,
                                           zexp * (ctx.zeta_order // zord))
        val = val * (CycloScalar.one(ctx) - tp * pow(p, n - 1, ctx.modulus))
    return val, shift


# ---------------------------------------------------------------------------
# Stickelberger construction
# ---------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _measure_buckets(l: int, level: int, c: int, prec: int):
    """Raw twisted-measure buckets at cell level q = l^(level+1).

    Returns buckets[h][y] = sum over units a in the (h, y) fiber of
    -w(a) a^-1 mod l^prec, with h the H-class of a and y its wild
    coordinate mod l^level.
    """
    if c % l == 0 or c % l ** (level + 1) == 1:
        raise BadAuxiliary("auxiliary c must be a unit with sigma_c != 1")
    q = l ** (level + 1)
    mod = l ** prec
    cinv = pow(c, -1, q)
    inv2 = pow(2, -1, mod)
    hsize = (l - 1) // 2
    h_of = [0] * l
    reps = sorted(min(d, l - d) for d in range(1, (l + 1) // 2))
    pos = {r: i for i, r in enumerate(reps)}
    for d in range(1, l):
        h_of[d] = pos[min(d, l - d)]
    # teichmueller residues mod l^prec for tame classes
    ctxt = PrecisionContext(l, prec, 1)
    teich_tab = [0] * l
    for d in range(1, l):
        teich_tab[d] = teichmuller(ctxt, d).residue
    ln = l ** level
    dlog = _dlog_table(l, level) if level else {1: 0}
    cst = (c - 1) * inv2 % mod
    buckets = [[0] * ln for _ in range(hsize)]
    modq_mask = q
    for a in range(1, q):
        if a % l == 0:
            continue
        b = (cinv * a) % q
        w = ((a - c * b) // q + cst) % mod
        if w == 0:
            continue
        om = teich_tab[a % l]
        ua = a * pow(om, -1, q) % q
        y = dlog[ua % (l ** (level + 1))] if level else 0
        coeff = (-w * pow(a, -1, mod)) % mod
        buckets[h_of[a % l]][y] = (buckets[h_of[a % l]][y] + coeff) % mod
    return tuple(tuple(row) for row in buckets)


def _buckets_to_components(ctx, buckets, level):
    """H-Fourier + rolling-binomial conversion to T-series numerators."""
    l = ctx.l
    hsize = (l - 1) // 2
    mod = ctx.modulus
    reps = sorted(min(d, l - d) for d in range(1, (l + 1) // 2))
    teich_tab = [teichmuller(ctx, r).residue for r in reps]
    # chi_t(class of rep) = teich(rep)^(2t)
    char = [[pow(teich_tab[h], 2 * t, mod) for h in range(hsize)]
            for t in range(hsize)]
    ln = l ** level
    D = ctx.D
    acc = [[0] * (D + 1) for _ in range(hsize)]
    row = [1] + [0] * D  # binomials C(y, k), rolling in y
    for y in range(ln):
        for h in range(hsize):
            cyh = buckets[h][y]
            if cyh:
                for t in range(hsize):
                    w = char[t][h] * cyh % mod
                    ac = acc[t]
                    for k in range(D + 1):
                        if row[k]:
                            ac[k] = (ac[k] + w * row[k]) % mod
        for k in range(D, 0, -1):
            row[k] = (row[k] + row[k - 1]) % mod
    return [IwasawaSeries.from_ints(ctx, a) for a in acc]


class AbelianPseudomeasure:
    """The pseudomeasure as per-H-character component fractions.

    components[t] = (regularized numerator)/(1 - chi_t(h_c)(1+T)^(y_c)),
    kept unreduced; the trivial component carries the pole at T = 0.
    S-Euler factors are stored factored (p, gamma-exponent of sigma_p,
    tame residues per component): keeping them out of the truncated
    product lets wild twists act exactly on each monomial factor.  The
    a-coefficient form (one Z_l[H] vector per power of T, from T^-1 up)
    merges everything and is derived on demand.
    """

    def __init__(self, ctx, level, c, S, components, digits,
                 euler_factors=()):
        self.ctx = ctx
        self.level = level
        self.c = c
        self.S = tuple(S)
        self.components = components  # list[LocalizedElement], minimal S
        self.euler_factors = tuple(euler_factors)  # (p, y_p, [tame_t])
        self.digits = digits          # trustworthy l-digits per coefficient
        self.u = 1 + ctx.l
        self._a_cache = None

    @property
    def hsize(self):
        return (self.ctx.l - 1) // 2

    def h_char_scalar(self, t: int, h: int) -> int:
        """chi_t evaluated at the h-th H-class representative."""
        reps = sorted(min(d, self.ctx.l - d)
                      for d in range(1, (self.ctx.l + 1) // 2))
        return pow(teichmuller(self.ctx, reps[h]).residue, 2 * t,
                   self.ctx.modulus)

    def euler_value(self, t: int, p: int, y_p: int, tame_p: int,
                    xi: CycloScalar) -> LocalizedElement:
        """The twisted Euler factor 1 - chi(sigma_p) p^-1 (xi(1+T))^(y_p);
        exact, since the twist acts on a single monomial."""
        ctx = self.ctx
        scal = (xi ** y_p) * tame_p * pow(p, -1, ctx.modulus)
        return LocalizedElement(
            IwasawaSeries.one(ctx) -
            IwasawaSeries.one_plus_T_pow(ctx, y_p).scale(scal))

    def value(self, chi: DirichletCharacterDatum) -> LocalizedElement:
        """The hom value at chi: component of the tame part, wild-twisted,
        times the twisted S-Euler factors."""
        t = chi.h_index()
        comp = self.components[t]
        xi = chi.gamma_value()
        if not (xi - CycloScalar.one(self.ctx)).is_zero_at_precision():
            comp = comp.apply_series_map(lambda s: rho_sharp(xi, s))
        for p, y_p, tame_list in self.euler_factors:
            comp = comp * self.euler_value(t, p, y_p, tame_list[t], xi)
        return comp

    def merged_components(self):
        """Components with the S-Euler factors multiplied in (truncated)."""
        if not self.euler_factors:
            return self.components
        one = CycloScalar.one(self.ctx)
        out = []
        for t, comp in enumerate(self.components):
            for p, y_p, tame_list in self.euler_factors:
                comp = comp * self.euler_value(t, p, y_p, tame_list[t], one)
            out.append(comp)
        return out

    def coefficient_table(self):
        """(a_-1, [a_0 .. a_D]) with a_m in Z_l[H] as PadicScalar vectors."""
        if self._a_cache is not None:
            return self._a_cache
        ctx = self.ctx
        hsize = self.hsize
        mod = ctx.modulus
        lau = []  # per component: (pole_coeff, series)
        for t, comp in enumerate(self.merged_components()):
            if t == 0:
                unit, dist = weierstrass_split(comp.den)
                # dist = T exactly (den vanishes at 0 to first order)
                s = comp.num * unit.unit_inverse()
                pole = s.coeffs[0]
                rest = IwasawaSeries(ctx, list(s.coeffs[1:]) +
                                     [CycloScalar.zero(ctx)])
                lau.append((pole, rest, comp.lshift))
            else:
                s = comp.normalized()
                lau.append((CycloScalar.zero(ctx), s.as_series(), s.lshift))
        inv_h = pow(hsize, -1, mod)
        a_pole = []
        for h in range(hsize):
            acc = CycloScalar.zero(ctx)
            for t, (pole, _, sh) in enumerate(lau):
                scal = pow(self.h_char_scalar(t, h), -1, mod)
                acc = acc + pole * scal
            a_pole.append(acc * inv_h)
        a_rows = []
        for m in range(ctx.D + 1):
            row = []
            for h in range(hsize):
                acc = CycloScalar.zero(ctx)
                for t, (_, rest, sh) in enumerate(lau):
                    scal = pow(self.h_char_scalar(t, h), -1, mod)
                    acc = acc + rest.coeffs[m] * scal
                row.append(acc * inv_h)
            a_rows.append(row)
        self._a_cache = (a_pole, a_rows)
        return self._a_cache

    def is_unit_verdict(self) -> bool:
        """mu = 0 shape: every component numerator lies outside l*Lambda."""
        return all(comp.num.l_content() == 0 for comp in self.components)


def stickelberger_lambda(ctx: PrecisionContext, level: int, S=(),
                         c: int = 2) -> AbelianPseudomeasure:
    """Build the pseudomeasure at wild level l^level from exact
    Stickelberger-measure sums, S-enlarged at the group-ring level.

    S may contain 'inf' and l (ignored: the construction is minimally
    S = {inf, l} already) plus auxiliary primes whose Euler elements
    1 - p^-1 [sigma_p] multiply in.
    """
    l = ctx.l
    if level < 1:
        raise BadInput("need wild level >= 1")
    prec_x = ctx.N + 2
    buckets = _measure_buckets(l, level, c, prec_x)
    comps_num = _buckets_to_components(ctx, buckets, level)
    y_c = _dlog_unit(l, c, level, prec_x)
    mod = ctx.modulus
    hsize = (l - 1) // 2
    reps = sorted(min(d, l - d) for d in range(1, (l + 1) // 2))
    teich_c = teichmuller(ctx, c).residue
    components = []
    for t in range(hsize):
        # regularizer component: 1 - chi_t(h(c)) (1+T)^(y(c))
        chi_t_c = pow(teich_c, 2 * t, mod)
        den = IwasawaSeries.one(ctx) - \
            IwasawaSeries.one_plus_T_pow(ctx, y_c).scale(chi_t_c)
        components.append(LocalizedElement(comps_num[t], den))
    euler_factors = []
    for p in S:
        if p in ("inf", l):
            continue
        if p % l == 0:
            raise BadInput("auxiliary S-primes must be prime to l")
        y_p = _dlog_unit(l, p, level, prec_x)
        tame_list = [pow(teichmuller(ctx, p).residue, 2 * t, mod)
                     for t in range(hsize)]
        euler_factors.append((p, y_p, tame_list))
    digits = max(1, min(ctx.N,
                        level - _floor_log(max(ctx.D, 1), l)))
    return AbelianPseudomeasure(ctx, level, c, S, components, digits,
                                euler_factors)


def _floor_log(n, l):
    k = 0
    while l ** (k + 1) <= n:
        k += 1
    return k


# ---------------------------------------------------------------------------
# interpolation and hom checks
# ---------------------------------------------------------------------------


def interpolation_check(lam: AbelianPseudomeasure,
                        chi: DirichletCharacterDatum, n_values,
                        min_digits: int = 1) -> CongruenceReport:
    """Evaluate the expansion at chi(gamma) u^n - 1 against the
    Kubota-Leopoldt oracle, reporting the honest digit budget.

    The m = -1 term is handled by multiplying both sides through by the
    evaluation point, keeping everything integral.
    """
    ctx = lam.ctx
    l = ctx.l
    report = CongruenceReport()
    a_pole, a_rows = lam.coefficient_table()
    hsize = lam.hsize
    mod = ctx.modulus
    t = chi.h_index()
    chi_h = [lam.h_char_scalar(t, h) for h in range(hsize)]

    def pair_h(row):
        acc = CycloScalar.zero(ctx)
        for h in range(hsize):
            acc = acc + row[h] * chi_h[h]
        return acc

    xi = chi.gamma_value()
    for n in n_values:
        if n < 1:
            raise PoleAtTrivial("interpolation points are n >= 1")
        point = xi * pow(lam.u, n, mod) - CycloScalar.one(ctx)
        vpt = point.valuation()
        if vpt is None:
            raise PoleAtTrivial(f"evaluation point vanishes at n={n}")
        tail_digits = ((ctx.D + 1) * vpt) // ctx.phi
        digits = min(lam.digits, tail_digits, ctx.N - 2)
        if digits < min_digits:
            report.add("interpolation", f"chi:{chi},n:{n}", False,
                       note=f"truncation dominates: {digits} digits")
            continue
        # lhs * point = chi(a_-1) + sum_m chi(a_m) point^(m+1)
        lhs = pair_h(a_pole)
        ppow = point
        for m in range(ctx.D + 1):
            lhs = lhs + pair_h(a_rows[m]) * ppow
            ppow = ppow * point
        want, shift = padic_l_value(ctx, n, chi, lam.S)
        rhs = want * point
        if shift:
            lhs = lhs * (l ** shift)
        ok = lhs.eq_at(rhs, digits=digits)
        report.add("interpolation", f"chi:{chi.tame},w{chi.wild_level},"
                   f"n:{n}", ok, note=f"{digits} digits")
    return report


def hom_conditions_check_abelian(lam: AbelianPseudomeasure,
                                 chis, galois_exps=(2,),
                                 twists=(1,)) -> CongruenceReport:
    """The three hom-group conditions for the pseudomeasure's values."""
    ctx = lam.ctx
    report = CongruenceReport()
    one = LocalizedElement.one(ctx)
    for chi in chis:
        v = lam.value(chi)
        # condition 1: sigma(value(chi)) = value(chi^sigma)
        for s in galois_exps:
            if ctx.m == 0 or s % ctx.l == 0:
                continue
            chi_s = DirichletCharacterDatum(ctx, chi.tame, chi.wild_level,
                                            chi.wild_exp * s)
            ok = lam.value(chi_s).eq_at(v.galois(s))
            report.add("condition1-galois", f"chi:{chi.tame},w{chi.wild_level}"
                       f",s:{s}", ok)
        # condition 2: twisting by a wild rho is rho_sharp on values
        for r in twists:
            exp_m = (chi.wild_exp * ctx.l ** (ctx.m - chi.wild_level)
                     if chi.wild_level else 0) + r
            chi_r = DirichletCharacterDatum(ctx, chi.tame, ctx.m, exp_m)
            direct = lam.value(chi_r)
            via_rho = v.apply_series_map(
                lambda s2: rho_sharp(CycloScalar.zeta_pow(ctx, r), s2))
            ok = direct.eq_at(via_rho)
            report.add("condition2-twist",
                       f"chi:{chi.tame},w{chi.wild_level},r:{r}", ok)
        # condition 3: value(chi)^l / Psi value(chi^l) = 1 mod l
        chil = chi.power(ctx.l)
        q = (v ** ctx.l) / lam.value(chil).apply_series_map(psi_endo)
        diff = (q - one).normalized()
        if diff.lshift > 0:
            report.add("condition3", f"chi:{chi.tame},w{chi.wild_level}",
                       False, deficit=diff.lshift)
        else:
            content = diff.num.l_content()
            report.add("condition3", f"chi:{chi.tame},w{chi.wild_level}",
                       content >= 1, deficit=max(0, 1 - content))
    return report


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def write_pseudomeasure(lam: AbelianPseudomeasure) -> str:
    ctx = lam.ctx
    a_pole, a_rows = lam.coefficient_table()
    lines = [f"l {ctx.l}", f"N {ctx.N}", f"D {ctx.D}", f"m {ctx.m}",
             f"level {lam.level}", f"c {lam.c}", f"u {lam.u}",
             "S " + " ".join(str(p) for p in lam.S),
             f"digits {lam.digits}", "coefficients"]

    def render(row):
        return " ".join(",".join(str(x) for x in sc.coeffs) for sc in row)

    lines.append("a[-1] " + render(a_pole))
    for mdeg, row in enumerate(a_rows):
        lines.append(f"a[{mdeg}] " + render(row))
    return "\n".join(lines) + "\n"


def read_pseudomeasure(ctx: PrecisionContext, text: str):
    """Round-trip reader: returns (header dict, a_pole, a_rows)."""
    head = {}
    rows = {}
    in_coeffs = False
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln == "coefficients":
            in_coeffs = True
            continue
        if not in_coeffs:
            k, _, v = ln.partition(" ")
            head[k] = v
            continue
        tag, _, body = ln.partition(" ")
        m = int(tag[2:-1])
        row = []
        for part in body.split():
            row.append(CycloScalar(ctx, [int(x) for x in part.split(",")]))
        rows[m] = row
    if int(head["l"]) != ctx.l:
        raise BadInput("prime mismatch in pseudomeasure file")
    a_pole = rows.pop(-1)
    a_rows = [rows[m] for m in sorted(rows)]
    return head, a_pole, a_rows
