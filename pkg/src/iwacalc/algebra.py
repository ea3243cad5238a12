"""Completed group algebra for a pro-l datum: Det, Tr, Fourier inversion.

A pro-l group G here is a central extension 1 -> Gamma -> G -> F -> 1 with
Gamma procyclic and F a finite l-group, encoded by a normalized integer
2-cocycle c (the section rule s(f1)s(f2) = gamma^c(f1,f2) s(f1 f2)) together
with the quotient map onto the procyclic Galois side: bar(s(f) gamma^z) =
gamma_k^(eps(f) + m*z).  Algebra elements are finitely supported
Lambda(Gamma)-combinations of the section basis, carried as one truncated
series per F-element plus a global power of l split off (the only
denominators the implemented operations ever produce are central l-powers).

Values of Det and Tr live on the gamma_k side: truncated series in
T_k = gamma_k - 1 with cyclotomic coefficients, wrapped as LocalizedElement.
Irreducible characters of F index everything; their monomial presentations
(from the character table) drive the determinant evaluation, and type-W
twists act through rho_sharp substitutions or, independently, by twisting
the monomial representation itself.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import PrecisionContext
from .errors import (BadInput, BadSubgroupIndex, CycloLevelTooSmall,
                     DatumError, NonUnit, NotInGammaBarComponent, NotNormal,
                     PrecisionExhausted, SingularMatrix)
from .lgroup import CharacterTable, ExactCyclo, FiniteLGroup, SubgroupView
from .padic import CycloScalar
from .series import IwasawaSeries, LocalizedElement, psi_endo, rho_sharp


def exact_to_cyclo(ctx: PrecisionContext, v: ExactCyclo) -> CycloScalar:
    """Reduce an exact cyclotomic integer into the working coefficient ring."""
    if v.m > ctx.m:
        raise CycloLevelTooSmall(
            f"value needs level {v.m}, context has {ctx.m}")
    return CycloScalar(ctx, v.embed(ctx.m).coeffs)


# ---------------------------------------------------------------------------
# the pro-l datum
# ---------------------------------------------------------------------------


class ProLGroupDatum:
    """F, central cocycle into Gamma, and the bar data onto Gamma_k."""

    def __init__(self, ctx: PrecisionContext, F: FiniteLGroup, cocycle=None,
                 eps=None, m_idx: int = 1, name: str = ""):
        if F.l != ctx.l:
            raise DatumError("group prime and context prime differ")
        self.ctx = ctx
        self.F = F
        self.name = name or F.name
        n = F.n
        if cocycle is None:
            self.cocycle = None
        else:
            self.cocycle = tuple(tuple(row) for row in cocycle)
            if len(self.cocycle) != n or any(len(r) != n
                                             for r in self.cocycle):
                raise DatumError("cocycle must be an n x n integer matrix")
        if m_idx < 1 or _lpow_or_raise(m_idx, ctx.l) is None:
            raise DatumError("bar index m must be a positive l-power")
        self.m_idx = m_idx
        self.eps = tuple(eps) if eps is not None else (0,) * n
        if len(self.eps) != n:
            raise DatumError("eps needs one exponent per group element")
        self._validate()
        self.cd = F.conjugacy_classes()
        self._twists = self._build_class_twists()
        self._inv_class = self._build_inverse_class_data()
        # forward map: for class j, (t|Gamma)(s(rep_j)) = gamma^-e * coeff_j0
        self._fwd_class = [None] * self.cd.s
        for j0, (j, e) in enumerate(self._inv_class):
            self._fwd_class[j] = (j0, e)
        self._onepT = {}

    # -- structure ----------------------------------------------------------

    def is_split(self):
        return self.cocycle is None

    def c(self, f1, f2) -> int:
        if self.cocycle is None:
            return 0
        return self.cocycle[f1][f2]

    def _validate(self):
        F, n = self.F, self.F.n
        e = F.e
        for f in range(n):
            if self.c(e, f) or self.c(f, e):
                raise DatumError("cocycle must be normalized (c(e,.) = 0)")
        if self.cocycle is not None:
            for x in range(n):
                for y in range(n):
                    for z in range(n):
                        if self.c(x, y) + self.c(F.table[x][y], z) != \
                                self.c(y, z) + self.c(x, F.table[y][z]):
                            raise DatumError(
                                f"cocycle identity fails at {(x, y, z)}")
        for f1 in range(n):
            for f2 in range(n):
                if self.eps[f1] + self.eps[f2] != \
                        self.eps[self.F.table[f1][f2]] + \
                        self.m_idx * self.c(f1, f2):
                    raise DatumError(
                        f"bar exponents incompatible at {(f1, f2)}")

    def mul_elem(self, g1, g2):
        """(f1,z1)*(f2,z2) in section coordinates."""
        f1, z1 = g1
        f2, z2 = g2
        return (self.F.table[f1][f2], z1 + z2 + self.c(f1, f2))

    def inv_elem(self, g):
        f, z = g
        fi = self.F.inv[f]
        return (fi, -z - self.c(f, fi))

    def conj_twist(self, w, f) -> int:
        """d with s(w) s(f) s(w)^-1 = gamma^d s(w f w^-1)."""
        if self.cocycle is None:
            return 0
        F = self.F
        wi = F.inv[w]
        return self.c(w, f) + self.c(F.table[w][f], wi) - self.c(w, wi)

    def conj_elem(self, g, w):
        f, z = g
        return (self.F.conj(f, w), z + self.conj_twist(w, f))

    def bar_exp(self, g) -> int:
        f, z = g
        return self.eps[f] + self.m_idx * z

    def power_elem(self, g, k: int):
        if k < 0:
            return self.power_elem(self.inv_elem(g), -k)
        out = (self.F.e, 0)
        base = g
        while k:
            if k & 1:
                out = self.mul_elem(out, base)
            base = self.mul_elem(base, base)
            k >>= 1
        return out

    def _build_class_twists(self):
        """For each f: gamma-exponent t with tau(s(f)) = gamma^t tau(s(rep))."""
        F = self.F
        twists = [None] * F.n
        for i, rep in enumerate(self.cd.reps):
            twists[rep] = 0
            for w in range(F.n):
                f = F.conj(rep, w)
                t = -self.conj_twist(w, rep)
                if twists[f] is None:
                    twists[f] = t
                elif twists[f] != t:
                    raise DatumError(
                        "inconsistent conjugation twists; the cocycle does "
                        "not give a torsion-free central extension")
        return tuple(twists)

    def class_twist(self, f) -> int:
        return self._twists[f]

    def _build_inverse_class_data(self):
        """Per class i: (j, exp) with tau(s(rep_i)^-1) = gamma^exp tau(rep_j)."""
        out = []
        for rep in self.cd.reps:
            fi, z = self.inv_elem((rep, 0))
            j = self.cd.class_of[fi]
            out.append((j, z + self._twists[fi]))
        return tuple(out)

    def central_elements(self):
        """F-parts of Z(G): central in F with vanishing conjugation twists."""
        zf = []
        for f in self.F.center():
            if all(self.conj_twist(w, f) == 0 for w in range(self.F.n)):
                zf.append(f)
        return tuple(zf)

    def h_elements(self):
        """ker(bar) as pairs (f, z); finite iff eps(f) = 0 mod m everywhere
        it must be."""
        out = []
        for f in range(self.F.n):
            if self.eps[f] % self.m_idx == 0:
                out.append((f, -self.eps[f] // self.m_idx))
        return tuple(out)

    def one_plus_T_pow(self, j: int) -> IwasawaSeries:
        s = self._onepT.get(j)
        if s is None:
            s = IwasawaSeries.one_plus_T_pow(self.ctx, j)
            self._onepT[j] = s
        return s

    def table(self) -> CharacterTable:
        tab = self.F.character_table()
        if tab.level > self.ctx.m:
            raise CycloLevelTooSmall(
                f"character values need cyclotomic level {tab.level}, "
                f"context has m={self.ctx.m}")
        return tab

    # -- derived datums -------------------------------------------------------

    def subdatum(self, elements) -> "SubDatum":
        import math
        view = self.F.subgroup_view(tuple(sorted(set(elements))))
        n = view.group.n
        if self.cocycle is None:
            sub_c = None
        else:
            sub_c = [[self.c(view.to_parent[i], view.to_parent[j])
                      for j in range(n)] for i in range(n)]
        eps_par = [self.eps[view.to_parent[i]] for i in range(n)]
        # bar(G') = <gamma_k^t> with t = gcd(m, eps on U); t divides the
        # l-power m, so it is itself an l-power, and gamma_k' := gamma_k^t
        t = self.m_idx
        for v in eps_par:
            t = math.gcd(t, v)
        datum = ProLGroupDatum(self.ctx, view.group, sub_c,
                               [v // t for v in eps_par],
                               self.m_idx // t, name=f"{self.name}'")
        return SubDatum(self, view, datum, t)

    def abelianization(self):
        """Quotient datum G -> G^ab = G/[G,G]; split datums only."""
        if not self.is_split():
            raise DatumError(
                "abelianization implemented for split cocycles only")
        der = self.F.derived_subgroup()
        if any(self.eps[d] != 0 for d in der):
            raise DatumError("bar map must kill the derived subgroup")
        q, proj = self.F.quotient(der)
        reps = {}
        for f in range(self.F.n):
            reps.setdefault(proj[f], f)
        eps_q = [self.eps[reps[i]] for i in range(q.n)]
        datum = ProLGroupDatum(self.ctx, q, None, eps_q, self.m_idx,
                               name=f"{self.name}^ab")
        return QuotientDatum(self, datum, proj, der)

    def quotient_datum(self, kernel_elements):
        """Quotient by a finite normal subgroup lifted by the section;
        split datums only (the lifted kernel is then honestly normal)."""
        if not self.is_split():
            raise DatumError("quotients implemented for split cocycles only")
        ker = tuple(sorted(set(kernel_elements)))
        if not self.F.is_normal(ker):
            raise NotNormal("kernel is not normal in F")
        if any(self.eps[k] != 0 for k in ker):
            raise NotNormal("kernel does not lie in ker(bar)")
        q, proj = self.F.quotient(ker)
        reps = {}
        for f in range(self.F.n):
            reps.setdefault(proj[f], f)
        eps_q = [self.eps[reps[i]] for i in range(q.n)]
        datum = ProLGroupDatum(self.ctx, q, None, eps_q, self.m_idx,
                               name=f"{self.name}/N")
        return QuotientDatum(self, datum, proj, ker)


def _lpow_or_raise(n, l):
    k = 0
    while n > 1:
        if n % l:
            return None
        n //= l
        k += 1
    return k


@dataclass
class SubDatum:
    """An open subgroup datum plus the maps relating it to its parent.

    gamma_factor t records gamma_k' = gamma_k^t: values computed over the
    subdatum live in series in gamma_k' - 1.
    """

    parent: ProLGroupDatum
    view: SubgroupView
    datum: ProLGroupDatum
    gamma_factor: int


@dataclass
class QuotientDatum:
    parent: ProLGroupDatum
    datum: ProLGroupDatum
    proj: tuple
    kernel: tuple


# ---------------------------------------------------------------------------
# algebra elements
# ---------------------------------------------------------------------------


class AlgebraElement:
    """sum_f coeff_f(T) s(f), coefficients truncated series over Gamma,
    divided by the global l-power l^lshift."""

    __slots__ = ("datum", "coeffs", "lshift")

    def __init__(self, datum: ProLGroupDatum, coeffs, lshift: int = 0):
        self.datum = datum
        cs = list(coeffs)
        if len(cs) != datum.F.n:
            raise BadInput("one coefficient per group element required")
        if lshift < 0:
            scale = datum.ctx.l ** (-lshift)
            cs = [c.scale(scale) for c in cs]
            lshift = 0
        self.coeffs = tuple(cs)
        self.lshift = lshift

    @property
    def ctx(self):
        return self.datum.ctx

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, datum):
        z = IwasawaSeries.zero(datum.ctx)
        return cls(datum, [z] * datum.F.n)

    @classmethod
    def one(cls, datum):
        return cls.group_element(datum, datum.F.e)

    @classmethod
    def group_element(cls, datum, f, z: int = 0):
        cs = [IwasawaSeries.zero(datum.ctx) for _ in range(datum.F.n)]
        cs[f] = datum.one_plus_T_pow(z)
        return cls(datum, cs)

    @classmethod
    def from_map(cls, datum, mapping, lshift=0):
        cs = [IwasawaSeries.zero(datum.ctx) for _ in range(datum.F.n)]
        for f, series in mapping.items():
            cs[f] = cs[f] + series
        return cls(datum, cs, lshift)

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, AlgebraElement):
            if other.datum is not self.datum:
                raise BadInput("algebra elements from different datums")
            return other
        if isinstance(other, (int, CycloScalar, IwasawaSeries)):
            cs = [IwasawaSeries.zero(self.ctx) for _ in range(self.datum.F.n)]
            cs[self.datum.F.e] = IwasawaSeries.constant(self.ctx, other) \
                if not isinstance(other, IwasawaSeries) else other
            return AlgebraElement(self.datum, cs)
        return NotImplemented

    def _aligned(self, other):
        s = max(self.lshift, other.lshift)
        a = self if self.lshift == s else AlgebraElement(
            self.datum,
            [c.scale(self.ctx.l ** (s - self.lshift)) for c in self.coeffs], s)
        b = other if other.lshift == s else AlgebraElement(
            self.datum,
            [c.scale(self.ctx.l ** (s - other.lshift))
             for c in other.coeffs], s)
        return a, b, s

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b, s = self._aligned(o)
        return AlgebraElement(self.datum,
                              [x + y for x, y in zip(a.coeffs, b.coeffs)], s)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.datum, [-c for c in self.coeffs],
                              self.lshift)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, CycloScalar, IwasawaSeries)):
            if isinstance(other, IwasawaSeries):
                return AlgebraElement(self.datum,
                                      [c * other for c in self.coeffs],
                                      self.lshift)
            return AlgebraElement(self.datum,
                                  [c.scale(other) for c in self.coeffs],
                                  self.lshift)
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        datum = self.datum
        table = datum.F.table
        n = datum.F.n
        out = [None] * n
        left = [(f, c) for f, c in enumerate(self.coeffs)
                if not c.is_zero_at_precision()]
        right = [(f, c) for f, c in enumerate(o.coeffs)
                 if not c.is_zero_at_precision()]
        split = datum.is_split()
        for f1, c1 in left:
            row = table[f1]
            for f2, c2 in right:
                prod = c1 * c2
                if not split:
                    cc = datum.c(f1, f2)
                    if cc:
                        prod = prod * datum.one_plus_T_pow(cc)
                f3 = row[f2]
                out[f3] = prod if out[f3] is None else out[f3] + prod
        zero = IwasawaSeries.zero(self.ctx)
        return AlgebraElement(datum, [c if c is not None else zero
                                      for c in out],
                              self.lshift + o.lshift)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = AlgebraElement.one(self.datum)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def divexact_l(self, j: int) -> "AlgebraElement":
        """Divide by l^j, exactly on coefficients where possible."""
        if j <= 0:
            return self if j == 0 else AlgebraElement(
                self.datum, self.coeffs, self.lshift + j)
        c = min(x.l_content() for x in self.coeffs)
        k = min(c, j)
        cs = [x.divexact_l(k) for x in self.coeffs] if k else list(self.coeffs)
        return AlgebraElement(self.datum, cs, self.lshift + (j - k))

    def normalized(self) -> "AlgebraElement":
        if self.lshift == 0:
            return self
        c = min(x.l_content() for x in self.coeffs)
        k = min(c, self.lshift)
        if k == 0:
            return self
        return AlgebraElement(self.datum,
                              [x.divexact_l(k) for x in self.coeffs],
                              self.lshift - k)

    def is_integral(self):
        return self.normalized().lshift == 0

    # -- unit structure --------------------------------------------------------

    def augmentation(self) -> CycloScalar:
        """Sum of constant coefficients: the image under G -> 1, T -> 0."""
        acc = CycloScalar.zero(self.ctx)
        for c in self.coeffs:
            acc = acc + c.coeffs[0]
        return acc

    def is_unit(self):
        """Unit of the local ring: augmentation a unit mod the max ideal."""
        return self.lshift == 0 and self.augmentation().valuation() == 0

    def inverse(self) -> "AlgebraElement":
        """Newton inversion in the local ring; certified by a final check."""
        from .padic import invert as _scalar_invert
        x = self.normalized()
        if x.lshift != 0:
            raise NonUnit("element has an l-denominator")
        aug = x.augmentation()
        if aug.valuation() != 0:
            raise NonUnit("augmentation vanishes mod the maximal ideal")
        y = AlgebraElement.one(self.datum) * _scalar_invert(aug)
        one = AlgebraElement.one(self.datum)
        two = one + one
        steps = max(self.ctx.N, self.ctx.D + 1,
                    self.datum.F.a * self.ctx.l).bit_length() + \
            self.datum.F.a + 3
        for _ in range(steps):
            err = x * y - one
            if all(c.is_zero_at_precision() for c in err.coeffs):
                return y
            y = y * (two - x * y)
        err = x * y - one
        if all(c.is_zero_at_precision() for c in err.coeffs):
            return y
        raise NonUnit("inversion did not converge")

    # -- comparison -------------------------------------------------------------

    def eq_at(self, other, digits=None):
        o = self._coerce(other)
        a, b, _ = self._aligned(o)
        return all(x.eq_at(y, digits) for x, y in zip(a.coeffs, b.coeffs))

    def __eq__(self, other):
        if isinstance(other, (AlgebraElement, int)):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        return hash((self.coeffs, self.lshift))

    def support(self):
        return tuple(f for f, c in enumerate(self.coeffs)
                     if not c.is_zero_at_precision())

    def __repr__(self):
        return (f"AlgebraElement({self.datum.name}, support="
                f"{self.support()}, lshift={self.lshift})")


# ---------------------------------------------------------------------------
# trace side
# ---------------------------------------------------------------------------


class TraceClassElement:
    """Element of T(Lambda G): one localized Gamma-series per F-class."""

    __slots__ = ("datum", "coeffs")

    def __init__(self, datum: ProLGroupDatum, coeffs):
        self.datum = datum
        cs = list(coeffs)
        if len(cs) != datum.cd.s:
            raise BadInput("one coefficient per conjugacy class")
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, datum):
        z = LocalizedElement.zero(datum.ctx)
        return cls(datum, [z] * datum.cd.s)

    def __add__(self, other):
        if other.datum is not self.datum:
            raise BadInput("mismatched datums")
        return TraceClassElement(self.datum,
                                 [a + b for a, b in
                                  zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        if other.datum is not self.datum:
            raise BadInput("mismatched datums")
        return TraceClassElement(self.datum,
                                 [a - b for a, b in
                                  zip(self.coeffs, other.coeffs)])

    def eq_at(self, other, digits=None):
        return all(a.eq_at(b, digits)
                   for a, b in zip(self.coeffs, other.coeffs))

    def __eq__(self, other):
        if isinstance(other, TraceClassElement):
            return self.eq_at(other)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        return hash(self.coeffs)


def trace_project(x: AlgebraElement) -> TraceClassElement:
    """tau: Lambda G -> T(Lambda G), with the conjugation gamma-twists."""
    datum = x.datum
    acc = [LocalizedElement.zero(datum.ctx) for _ in range(datum.cd.s)]
    shift = x.lshift
    for f, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        i = datum.cd.class_of[f]
        t = datum.class_twist(f)
        series = c if t == 0 else c * datum.one_plus_T_pow(t)
        acc[i] = acc[i] + LocalizedElement(series, lshift=shift)
    return TraceClassElement(datum, acc)


def coefficient_at(t: TraceClassElement, g) -> LocalizedElement:
    """The coefficient of t at g, i.e. (t|Gamma)(g^-1), any g = (f, z).

    For g a class representative this returns the stored basis coefficient;
    in general the unique Gamma-semilinear conjugation-invariant extension.
    """
    datum = t.datum
    f, z = g if isinstance(g, tuple) else (g, 0)
    fi, zi = datum.inv_elem((f, z))
    j = datum.cd.class_of[fi]
    # (t|Gamma)(g^-1) = gamma^(zi + twist(fi)) (t|Gamma)(s(rep_j)) and
    # (t|Gamma)(s(rep_j)) = gamma^-e0 coeff_j0 via the forward class map
    j0, e0 = datum._fwd_class[j]
    shift_exp = zi + datum.class_twist(fi) - e0
    val = t.coeffs[j0]
    if shift_exp:
        val = val * LocalizedElement(datum.one_plus_T_pow(shift_exp))
    return val


# ---------------------------------------------------------------------------
# hom side: values per irreducible character
# ---------------------------------------------------------------------------


class HomValue:
    """Map from irreducible characters of F to gamma_k-side values.

    Only the untwisted values are stored; type-W twists are produced on
    demand by the rho_sharp substitution (and can be cross-checked against
    direct twisted determinant evaluation).
    """

    __slots__ = ("datum", "values")

    def __init__(self, datum: ProLGroupDatum, values):
        self.datum = datum
        vs = list(values)
        if len(vs) != datum.table().s:
            raise BadInput("one value per irreducible required")
        self.values = tuple(vs)

    @classmethod
    def constant_one(cls, datum):
        one = LocalizedElement.one(datum.ctx)
        return cls(datum, [one] * datum.table().s)

    def value(self, i: int, twist: int = 0) -> LocalizedElement:
        v = self.values[i]
        if twist % self.datum.ctx.zeta_order == 0:
            return v
        xi = CycloScalar.zeta_pow(self.datum.ctx, twist)
        return v.apply_series_map(lambda s: rho_sharp(xi, s))

    def virtual_value(self, multiplicities) -> LocalizedElement:
        out = LocalizedElement.one(self.datum.ctx)
        for i, m in enumerate(multiplicities):
            if m:
                out = out * (self.values[i] ** m)
        return out

    def __mul__(self, other):
        if isinstance(other, HomValue):
            return HomValue(self.datum, [a * b for a, b in
                                         zip(self.values, other.values)])
        return NotImplemented

    def __truediv__(self, other):
        return HomValue(self.datum, [a / b for a, b in
                                     zip(self.values, other.values)])

    def psi_applied(self) -> "HomValue":
        return HomValue(self.datum,
                        [v.apply_series_map(psi_endo) for v in self.values])

    def eq_at(self, other, digits=None):
        return all(a.eq_at(b, digits)
                   for a, b in zip(self.values, other.values))


# ---------------------------------------------------------------------------
# Det and Tr evaluation
# ---------------------------------------------------------------------------


def _bar_series(datum: ProLGroupDatum, s: IwasawaSeries,
                twist: int = 0) -> IwasawaSeries:
    """Push a Gamma-series to the gamma_k side: T -> (1+T_k)^m - 1, with an
    optional type-W twist folding zeta^(m*twist) into the substitution."""
    m = datum.m_idx
    if m == 1 and twist % datum.ctx.zeta_order == 0:
        return s
    ctx = datum.ctx
    g = datum.one_plus_T_pow(m)
    if twist % ctx.zeta_order:
        g = g.scale(CycloScalar.zeta_pow(ctx, (m * twist) % ctx.zeta_order))
    g = g - IwasawaSeries.one(ctx)
    return s.compose(g)


def det_eval(x: AlgebraElement, chi_index: int,
             twist: int = 0) -> LocalizedElement:
    """Det(x) at the chi_index-th irreducible, through its monomial datum.

    Builds the induced monomial representation over the gamma_k side and
    returns its determinant; for linear characters this collapses to
    sum_f bar(x_f) chi(f) gamma_k^eps(f).  A nonzero twist evaluates at the
    W-twisted character chi (x) rho with rho(gamma_k) = zeta^twist, by
    twisting the representation directly (an independent route from
    rho_sharp on the untwisted value).
    """
    datum = x.datum
    ctx = datum.ctx
    tab = datum.table()
    mon = tab.monomials[chi_index]
    F = datum.F
    zeta_order = ctx.zeta_order
    tw = twist % zeta_order

    def monomial(exp_k: int) -> IwasawaSeries:
        s = datum.one_plus_T_pow(exp_k)
        if tw:
            s = s.scale(CycloScalar.zeta_pow(ctx, (tw * exp_k) % zeta_order))
        return s

    if len(mon.subgroup) == F.n:
        # linear character: 1x1 determinant
        acc = IwasawaSeries.zero(ctx)
        vals = mon.linear_values
        for f, c in enumerate(x.coeffs):
            if c.is_zero_at_precision():
                continue
            scal = exact_to_cyclo(ctx, vals[f])
            term = _bar_series(datum, c, tw) * monomial(datum.eps[f])
            acc = acc + term.scale(scal)
        return LocalizedElement(acc, lshift=x.lshift).normalized()

    view = F.subgroup_view(mon.subgroup)
    in_u = view.from_parent
    # left coset representatives of U, minimal element each
    coset_of = [None] * F.n
    reps = []
    for f in range(F.n):
        if coset_of[f] is None:
            j = len(reps)
            reps.append(f)
            for u in mon.subgroup:
                coset_of[F.table[f][u]] = j
    r = len(reps)
    zero = IwasawaSeries.zero(ctx)
    mat = [[zero] * r for _ in range(r)]
    for f, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        cbar = _bar_series(datum, c, tw)
        for j in range(r):
            frj = F.table[f][reps[j]]
            j2 = coset_of[frj]
            u = F.table[F.inv[reps[j2]]][frj]
            exp_k = datum.m_idx * (datum.c(f, reps[j]) -
                                   datum.c(reps[j2], u)) + datum.eps[u]
            scal = exact_to_cyclo(ctx, mon.linear_values[in_u[u]])
            entry = (cbar * monomial(exp_k)).scale(scal)
            mat[j2][j] = mat[j2][j] + entry
    det = _series_det(mat, ctx)
    return LocalizedElement(det, lshift=r * x.lshift).normalized()


def _series_det(mat, ctx) -> IwasawaSeries:
    """Determinant of a small matrix over the truncated series ring."""
    r = len(mat)
    if r == 1:
        return mat[0][0]
    if r == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    if r <= 5:
        import itertools as it
        acc = IwasawaSeries.zero(ctx)
        for perm in it.permutations(range(r)):
            sign = _perm_sign(perm)
            term = mat[0][perm[0]]
            for i in range(1, r):
                term = term * mat[i][perm[i]]
            acc = acc + (term if sign > 0 else -term)
        return acc
    # fraction-free Gaussian elimination would be needed beyond degree 5;
    # no catalog character requires it
    raise SingularMatrix(f"determinants of size {r} not supported")


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, clen = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def det_hom(x: AlgebraElement) -> HomValue:
    """All Det values of x: the image of x under Det into the hom side."""
    tab = x.datum.table()
    return HomValue(x.datum, [det_eval(x, i) for i in range(tab.s)])


def tr_eval(t: TraceClassElement, chi_index: int,
            twist: int = 0) -> LocalizedElement:
    """Tr(t)(chi) = sum_i coeff_i-bar * chi(rep_i) * bar(rep_i)."""
    datum = t.datum
    ctx = datum.ctx
    tab = datum.table()
    chi = tab.irreducibles[chi_index]
    tw = twist % ctx.zeta_order
    acc = LocalizedElement.zero(ctx)
    for i, rep in enumerate(datum.cd.reps):
        v = t.coeffs[i]
        if v.num.is_zero_at_precision() and v.lshift == 0:
            continue
        scal = exact_to_cyclo(ctx, chi.values[i])
        exp_k = datum.eps[rep]
        mono = datum.one_plus_T_pow(exp_k)
        if tw:
            mono = mono.scale(
                CycloScalar.zeta_pow(ctx, (tw * exp_k) % ctx.zeta_order))
        v = v.apply_series_map(lambda s: _bar_series(datum, s, tw))
        acc = acc + v * LocalizedElement(mono.scale(scal))
    return acc


def tr_hom(t: TraceClassElement) -> HomValue:
    tab = t.datum.table()
    return HomValue(t.datum, [tr_eval(t, i) for i in range(tab.s)])


def fourier_invert(datum: ProLGroupDatum, values) -> TraceClassElement:
    """Recover t from its Tr pairings: the inverse of tr_hom.

    [G:Gamma] coeff-bar(rep_i^-1) bar(rep_i) = sum_j h_i chi_j(rep_i^-1)
    values[j]; the division by [G:Gamma] = |F| costs v_l(|F|) digits (or is
    carried as an l-shift when not exactly divisible, which the integrality
    reports then surface).
    """
    tab = datum.table()
    if isinstance(values, HomValue):
        values = values.values
    values = list(values)
    if len(values) != tab.s:
        raise BadInput("need a value at every irreducible")
    ctx = datum.ctx
    cd = datum.cd
    out = []
    for i, rep in enumerate(cd.reps):
        acc = LocalizedElement.zero(ctx)
        iinv = cd.class_of_inverse(i)
        for j in range(tab.s):
            scal = exact_to_cyclo(ctx, tab.irreducibles[j].values[iinv])
            acc = acc + values[j] * LocalizedElement(
                IwasawaSeries.constant(ctx, scal))
        acc = (acc * cd.sizes[i]).divexact_l(datum.F.a)
        # remove the bar of the representative, then descend along bar
        if datum.eps[rep]:
            acc = acc * LocalizedElement(
                datum.one_plus_T_pow(-datum.eps[rep]))
        out.append(_unbar_localized(datum, acc))
    return TraceClassElement(datum, out)


def _unbar_localized(datum, v: LocalizedElement) -> LocalizedElement:
    """Pull a gamma_k-side value back along bar: Lambda(Gamma-bar) is the
    series in (1+T_k)^m - 1.  For m = 1 this is the identity."""
    m = datum.m_idx
    if m == 1:
        return v
    num = _unbar_series(datum, v.num)
    den = _unbar_series(datum, v.den)
    return LocalizedElement(num, den, v.lshift)


def _unbar_series(datum, w: IwasawaSeries) -> IwasawaSeries:
    """Solve w = x((1+T)^m - 1) for x; triangular with diagonal m^d.

    m is an l-power, so degree d costs d*v_l(m) digits of the coefficient;
    failure to divide exactly means w is not in the bar image.
    """
    ctx = datum.ctx
    m = datum.m_idx
    vm = _lpow_or_raise(m, ctx.l)
    sub = datum.one_plus_T_pow(m) - IwasawaSeries.one(ctx)
    powers = [IwasawaSeries.one(ctx)]
    for _ in range(ctx.D):
        powers.append(powers[-1] * sub)
    rem = w
    out = []
    for d in range(ctx.D + 1):
        c = rem.coeffs[d]
        if vm * d >= c.prec:
            # the diagonal m^d exceeds the known digits: coefficient is
            # honestly unknown at this precision
            cd = CycloScalar(ctx, [], 0)
        else:
            try:
                cd = c.divexact_l(vm * d) if vm * d else c
            except PrecisionExhausted as exc:
                raise NotInGammaBarComponent(
                    f"degree-{d} coefficient does not descend: "
                    f"{exc}") from exc
        out.append(cd)
        rem = rem - powers[d].scale(cd)
    for c in rem.coeffs:
        if not c.is_zero_at_precision():
            raise NotInGammaBarComponent("series does not descend along bar")
    return IwasawaSeries(ctx, out)


# ---------------------------------------------------------------------------
# transfer, norm, trace ideal, deflation
# ---------------------------------------------------------------------------


def ver_element(datum: ProLGroupDatum, sub: SubDatum, a_rep: int, g):
    """Transfer of a single element in section coordinates.

    For g with F-part inside U the ordered product of the l conjugates by
    powers of s(a_rep); otherwise g^l.  The value is independent of choices
    exactly when it should be (abelian target), which callers validate.
    """
    f, z = g
    if sub.view.contains(f):
        out = (datum.F.e, 0)
        w = (datum.F.e, 0)
        ar = (a_rep, 0)
        for _ in range(datum.ctx.l):
            conj = datum.mul_elem(datum.mul_elem(w, (f, z)),
                                  datum.inv_elem(w))
            out = datum.mul_elem(out, conj)
            w = datum.mul_elem(w, ar)
        return out
    return datum.power_elem((f, z), datum.ctx.l)


def ver_algebra(x: AlgebraElement, parent: ProLGroupDatum, sub: SubDatum,
                a_rep: int | None = None,
                quotient: QuotientDatum | None = None) -> AlgebraElement:
    """The transfer on the algebra: Psi on coefficients, ver on elements.

    x may live over the parent datum itself or over a quotient of it (the
    abelianization, say), in which case `quotient` supplies the projection
    and minimal preimages are used (differences land in the kernel of ver).
    """
    U = set(sub.view.elements)
    if a_rep is None:
        a_rep = min(f for f in range(parent.F.n) if f not in U)
    if len(U) * parent.ctx.l != parent.F.n:
        raise BadSubgroupIndex("transfer needs an index-l subgroup")
    if quotient is None:
        if x.datum is not parent:
            raise BadInput("element does not live over the parent datum")
        preimage = {f: f for f in range(parent.F.n)}
        src = parent
    else:
        if x.datum is not quotient.datum:
            raise BadInput("element does not live over the quotient datum")
        preimage = {}
        for f in range(parent.F.n):
            fq = quotient.proj[f]
            if fq not in preimage or f < preimage[fq]:
                preimage[fq] = f
        src = quotient.datum
    acc = [IwasawaSeries.zero(parent.ctx) for _ in range(sub.datum.F.n)]
    for fq, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        u, zz = ver_element(parent, sub, a_rep, (preimage[fq], 0))
        if not sub.view.contains(u):
            raise BadSubgroupIndex("transfer image left the subgroup")
        series = psi_endo(c)
        if zz:
            series = series * parent.one_plus_T_pow(zz)
        k = sub.view.from_parent[u]
        acc[k] = acc[k] + series
    return AlgebraElement(sub.datum, acc, x.lshift)


def norm_res(y: AlgebraElement, parent: ProLGroupDatum, sub: SubDatum,
             a_rep: int | None = None) -> AlgebraElement:
    """res on K1: the determinant of right multiplication by y on the free
    rank-l module over the (abelian) index-l subalgebra."""
    U = set(sub.view.elements)
    l = parent.ctx.l
    if a_rep is None:
        a_rep = min(f for f in range(parent.F.n) if f not in U)
    if len(U) * l != parent.F.n:
        raise BadSubgroupIndex("norm needs an index-l subgroup")
    if not sub.datum.F.is_abelian():
        raise BadInput("determinant norm needs an abelian subgroup")
    if y.datum is not parent:
        raise BadInput("element does not live over the parent datum")
    F = parent.F
    # basis t_i = s(a)^i, with accumulated gamma-exponents tau_i
    ts = [(F.e, 0)]
    for _ in range(l - 1):
        ts.append(parent.mul_elem(ts[-1], (a_rep, 0)))
    coset_index = {}
    for j, (aj, _) in enumerate(ts):
        for u in U:
            coset_index[F.table[u][aj]] = j
    mat = [[AlgebraElement.zero(sub.datum) for _ in range(l)]
           for _ in range(l)]
    for i in range(l):
        for f, c in enumerate(y.coeffs):
            if c.is_zero_at_precision():
                continue
            h, w = parent.mul_elem(ts[i], (f, 0))
            j = coset_index[h]
            aj, tau_j = ts[j]
            u = F.table[h][F.inv[aj]]
            exp = w - parent.c(u, aj) - tau_j
            series = c if exp == 0 else c * parent.one_plus_T_pow(exp)
            cs = [IwasawaSeries.zero(parent.ctx)
                  for _ in range(sub.datum.F.n)]
            cs[sub.view.from_parent[u]] = series
            mat[i][j] = mat[i][j] + AlgebraElement(sub.datum, cs)
    det = _algebra_det(mat, sub.datum)
    if y.lshift:
        det = AlgebraElement(det.datum, det.coeffs,
                             det.lshift + l * y.lshift)
    return det


def _algebra_det(mat, datum) -> AlgebraElement:
    r = len(mat)
    import itertools as it
    acc = AlgebraElement.zero(datum)
    for perm in it.permutations(range(r)):
        sign = _perm_sign(perm)
        term = mat[0][perm[0]]
        for i in range(1, r):
            term = term * mat[i][perm[i]]
        acc = acc + (term if sign > 0 else -term)
    return acc


class TraceIdealData:
    """Orbit data for the conjugation action of A = G/G' on Lambda G'.

    Orbits of U under conjugation by a, with the gamma-twists of the lifted
    conjugates; the twisted orbit sums tr_A(b) form a Lambda(Gamma)-basis of
    the trace ideal.
    """

    def __init__(self, parent: ProLGroupDatum, sub: SubDatum,
                 a_rep: int | None = None):
        U = list(sub.view.elements)
        l = parent.ctx.l
        if a_rep is None:
            a_rep = min(f for f in range(parent.F.n)
                        if f not in set(U))
        self.parent = parent
        self.sub = sub
        self.a_rep = a_rep
        seen = set()
        self.orbits = []  # list of list[(u_parent, twist)]
        for b in U:
            if b in seen:
                continue
            orbit = []
            f, tw = b, 0
            for _ in range(l):
                orbit.append((f, tw))
                tw = tw + parent.conj_twist(a_rep, f)
                f = parent.F.conj(f, a_rep)
                if f == b:
                    break
            # orbit sizes divide l; the closing twist must vanish (this is
            # where Gamma cap [G,G] = 1 enters for fixed cosets)
            if f != b or tw != 0:
                raise DatumError(
                    "conjugation orbit does not close without a gamma "
                    "twist; the trace-ideal basis is not defined")
            for u, _ in orbit:
                seen.add(u)
            self.orbits.append(orbit)

    def tr_A(self, b_parent: int) -> AlgebraElement:
        """The A-trace of a basis element: sum of its twisted conjugates
        (which is l*b at a fixed point)."""
        for orbit in self.orbits:
            if orbit[0][0] == b_parent:
                out = AlgebraElement.zero(self.sub.datum)
                if len(orbit) == 1:
                    return AlgebraElement.group_element(
                        self.sub.datum,
                        self.sub.view.from_parent[b_parent]) * \
                        self.parent.ctx.l
                for u, tw in orbit:
                    out = out + AlgebraElement.group_element(
                        self.sub.datum, self.sub.view.from_parent[u], 0) * \
                        self.parent.one_plus_T_pow(tw)
                return out
        raise BadInput("not an orbit representative")

    def membership(self, x: AlgebraElement):
        """Is x in the trace ideal?  Returns (bool, witness dict).

        Coefficients must match around each free orbit (with the twist
        monomials) and be divisible by l at fixed points.
        """
        if x.datum is not self.sub.datum:
            raise BadInput("element lives over the wrong datum")
        x = x.normalized()
        if x.lshift != 0:
            return False, {"reason": "l-denominator", "lshift": x.lshift}
        witness = {}
        ok = True
        for orbit in self.orbits:
            b = orbit[0][0]
            cb = x.coeffs[self.sub.view.from_parent[b]]
            if len(orbit) == 1:
                deficit = 1 - cb.l_content()
                if deficit > 0:
                    ok = False
                    witness[f"fixed:{b}"] = deficit
                continue
            for u, tw in orbit[1:]:
                cu = x.coeffs[self.sub.view.from_parent[u]]
                want = cb if tw == 0 else cb * self.parent.one_plus_T_pow(tw)
                if not cu.eq_at(want):
                    ok = False
                    witness[f"orbit:{b}->{u}"] = "coefficient mismatch"
        return ok, witness


def deflate_algebra(x: AlgebraElement,
                    quot: QuotientDatum) -> AlgebraElement:
    """Push x along G -> G/N, summing coefficients over kernel cosets."""
    if x.datum is not quot.parent:
        raise BadInput("element does not live over the parent datum")
    out = [IwasawaSeries.zero(x.ctx) for _ in range(quot.datum.F.n)]
    for f, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        out[quot.proj[f]] = out[quot.proj[f]] + c
    return AlgebraElement(quot.datum, out, x.lshift)


def deflate_trace(t: TraceClassElement,
                  quot: QuotientDatum) -> TraceClassElement:
    """defl on T(Lambda G): push the class basis along the projection."""
    if t.datum is not quot.parent:
        raise BadInput("element does not live over the parent datum")
    out = [LocalizedElement.zero(t.datum.ctx)
           for _ in range(quot.datum.cd.s)]
    for i, rep in enumerate(t.datum.cd.reps):
        fq = quot.proj[rep]
        jq = quot.datum.cd.class_of[fq]
        tw = quot.datum.class_twist(fq)
        v = t.coeffs[i]
        if tw:
            v = v * LocalizedElement(quot.datum.one_plus_T_pow(tw))
        out[jq] = out[jq] + v
    return TraceClassElement(quot.datum, out)


def inflation_index_map(quot: QuotientDatum):
    """For each irreducible of G/N, the index of its inflation in the
    parent table."""
    from .lgroup import inflate_cf
    ptab = quot.parent.table()
    qtab = quot.datum.table()
    out = []
    for ch in qtab.irreducibles:
        lifted = inflate_cf(ch, quot.parent.F, quot.proj)
        out.append(ptab.index_of(lifted.at_level(ptab.level)))
    return tuple(out)


def deflate_hom(f: HomValue, quot: QuotientDatum) -> HomValue:
    """Hom-level deflation: value at chi-tilde is the value at its
    inflation."""
    if f.datum is not quot.parent:
        raise BadInput("hom value does not live over the parent datum")
    idx = inflation_index_map(quot)
    return HomValue(quot.datum, [f.values[i] for i in idx])


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def resolve_subgroup_id(datum: ProLGroupDatum, token: str):
    """Subgroup ids used by datum and prime files: all | center | derived |
    gen:i,j,... (closure of the listed elements)."""
    token = token.strip().lower()
    F = datum.F
    if token == "all":
        return tuple(range(F.n))
    if token == "center":
        return F.center()
    if token == "derived":
        return F.derived_subgroup()
    if token.startswith("gen:"):
        gens = [int(x) for x in token[4:].split(",") if x != ""]
        return F.closure(gens)
    raise BadInput(f"unknown subgroup id {token!r}")


def write_prolgroup_datum(datum: ProLGroupDatum) -> str:
    from .lgroup import write_group
    lines = ["prolgroup", f"m {datum.m_idx}",
             "eps " + " ".join(str(e) for e in datum.eps)]
    if datum.cocycle is not None:
        lines.append("cocycle")
        for row in datum.cocycle:
            lines.append(" ".join(str(x) for x in row))
    lines.append("group")
    return "\n".join(lines) + "\n" + write_group(datum.F)


def read_prolgroup_datum(ctx: PrecisionContext, text: str) -> ProLGroupDatum:
    from .lgroup import read_group, catalog_group
    lines = text.splitlines()
    if not lines or lines[0].strip() != "prolgroup":
        raise BadInput("datum file must start with 'prolgroup'")
    m_idx, eps, cocycle = 1, None, None
    group = None
    i = 1
    while i < len(lines):
        ln = lines[i].split("#")[0].strip()
        i += 1
        if not ln:
            continue
        if ln.startswith("m "):
            m_idx = int(ln.split()[1])
        elif ln.startswith("eps"):
            eps = [int(x) for x in ln.split()[1:]]
        elif ln == "cocycle":
            rows = []
            while i < len(lines) and lines[i].split("#")[0].strip() and \
                    not lines[i].startswith(("group", "eps", "m ")):
                rows.append([int(x) for x in lines[i].split()])
                i += 1
            cocycle = rows
        elif ln.startswith("group"):
            rest = ln[len("group"):].strip()
            if rest.startswith("catalog:"):
                group = catalog_group(rest[len("catalog:"):])
            else:
                group = read_group("\n".join(lines[i:]))
                break
    if group is None:
        raise BadInput("datum file lacks a group section")
    return ProLGroupDatum(ctx, group, cocycle, eps, m_idx)


def write_algebra_element(x: AlgebraElement) -> str:
    """Sparse rows: (element index, numerator coefficients, denominator);
    denominators here are always the central power l^lshift."""
    lines = ["algebra-element", f"lshift {x.lshift}"]
    for f, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        body = " ".join(",".join(str(v) for v in sc.coeffs)
                        for sc in c.coeffs)
        lines.append(f"coeff {f} num {body} den 1")
    return "\n".join(lines) + "\n"


def read_algebra_element(datum: ProLGroupDatum, text: str) -> AlgebraElement:
    ctx = datum.ctx
    coeffs = [IwasawaSeries.zero(ctx) for _ in range(datum.F.n)]
    lshift = 0
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln == "algebra-element":
            continue
        if ln.startswith("lshift"):
            lshift = int(ln.split()[1])
            continue
        parts = ln.split()
        if parts[0] != "coeff" or "num" not in parts or "den" not in parts:
            raise BadInput(f"bad algebra element line {ln!r}")
        f = int(parts[1])
        num_i = parts.index("num") + 1
        den_i = parts.index("den")
        scs = [CycloScalar(ctx, [int(v) for v in tok.split(",")])
               for tok in parts[num_i:den_i]]
        if parts[den_i + 1] != "1":
            raise BadInput("only trivial series denominators are stored")
        coeffs[f] = IwasawaSeries(ctx, scs)
    return AlgebraElement(datum, coeffs, lshift)
