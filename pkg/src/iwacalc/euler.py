"""K1 Euler factors: construction, Mackey restriction, Det evaluation.

A prime datum consists of a decomposition subgroup D (given through its
finite part), a finite inertia subgroup I normal in D and killed by the bar
map, a Frobenius representative g mod I, and the residue norm Np prime to
l.  The Euler factor is the K1 class of 1 - (g/Np) e_I with e_I the inertia
idempotent; it is carried as an explicit algebra element over D (the 1/|I|
is an honest l-denominator, Np a unit) and induction to the full group is
lazy: determinants at induced characters restrict the character instead.

Restriction to an open subgroup is pure bookkeeping (double cosets,
conjugated data, companion-matrix reduction g -> g^f, Np -> Np^f) producing
new prime datums, which is exactly how the arithmetic of primes above p
behaves; the determinant-level product identity over the new datums is the
checkable content.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (AlgebraElement, ProLGroupDatum, SubDatum, det_eval,
                      exact_to_cyclo)
from .context import PrecisionContext
from .errors import (BadInput, InertiaNotNormalInD, NotAOneUnit,
                     PrecisionExhausted)
from .lgroup import restrict_cf
from .logpseudo import CongruenceReport
from .padic import CycloScalar, PadicScalar, log_1unit, teichmuller
from .series import IwasawaSeries, LocalizedElement


@dataclass
class PrimeDatum:
    """Decomposition data for a prime not above l, in ambient coordinates."""

    ambient: ProLGroupDatum
    D_els: tuple           # F-part of the decomposition subgroup
    I_els: tuple           # inertia, finite normal in D, inside ker(bar)
    frob: tuple            # (f, z) Frobenius representative, in D
    Np: int
    _sub: SubDatum | None = field(default=None, repr=False)

    def __post_init__(self):
        amb = self.ambient
        F = amb.F
        D = set(self.D_els)
        I = set(self.I_els)
        if self.Np < 2 or self.Np % amb.ctx.l == 0:
            raise BadInput("Np must be >= 2 and prime to l")
        if not I <= D:
            raise InertiaNotNormalInD("inertia must sit inside D")
        if self.frob[0] not in D:
            raise BadInput("Frobenius must lie in D")
        for i in I:
            if amb.eps[i] != 0:
                raise InertiaNotNormalInD("inertia must die under bar")
            for j in I:
                if amb.c(i, j) != 0:
                    raise InertiaNotNormalInD(
                        "inertia does not lift to a subgroup")
        for d in D:
            for i in I:
                if F.conj(i, d) not in I or amb.conj_twist(d, i) != 0:
                    raise InertiaNotNormalInD(
                        "inertia is not normal in D without twists")
        # the decomposition quotient is procyclic: Frobenius and inertia
        # generate D over the central procyclic part
        if set(F.closure(I | {self.frob[0]})) != D:
            raise BadInput(
                "Frobenius does not generate D over inertia; not the "
                "shape of a prime's decomposition data")

    @property
    def sub(self) -> SubDatum:
        if self._sub is None:
            self._sub = self.ambient.subdatum(self.D_els)
        return self._sub

    def conjugate(self, t: int) -> "PrimeDatum":
        """The datum for the t-conjugate choice of the prime above."""
        amb = self.ambient
        F = amb.F
        return PrimeDatum(
            amb,
            tuple(sorted(F.conj(d, t) for d in self.D_els)),
            tuple(sorted(F.conj(i, t) for i in self.I_els)),
            amb.conj_elem(self.frob, t),
            self.Np)


@dataclass
class EulerFactorElement:
    """The K1 class [1 - (g/Np) e_I] over its base subgroup."""

    prime: PrimeDatum
    element: AlgebraElement     # over prime.sub.datum
    provenance: str = "undecomposed"


def euler_factor(pd: PrimeDatum) -> EulerFactorElement:
    """Build 1 - (g/Np) e_I over the decomposition subgroup.

    e_I = (1/|I|) sum_{h in I} s(h); |I| is an l-power, carried as the
    element's l-shift, and 1/Np is a unit scalar.
    """
    amb = pd.ambient
    sub = pd.sub
    ctx = amb.ctx
    nI = len(pd.I_els)
    a = 0
    while nI % ctx.l == 0:
        nI //= ctx.l
        a += 1
    if nI != 1:
        raise BadInput("inertia order must be an l-power")
    np_inv = pow(pd.Np, -1, ctx.modulus)
    coeffs = [IwasawaSeries.zero(ctx) for _ in range(sub.datum.F.n)]
    # |I| * 1 minus sum over g s(h), all over l^a
    coeffs[sub.datum.F.e] = IwasawaSeries.constant(ctx, len(pd.I_els))
    for h in pd.I_els:
        gh = amb.mul_elem(pd.frob, (h, 0))
        k = sub.view.from_parent[gh[0]]
        term = amb.one_plus_T_pow(gh[1]).scale(np_inv)
        coeffs[k] = coeffs[k] - term
    return EulerFactorElement(pd, AlgebraElement(sub.datum, coeffs,
                                                 lshift=a))


def det_euler(E: EulerFactorElement, chi_index: int,
              twist: int = 0) -> LocalizedElement:
    """Det of the induced class at an ambient irreducible.

    Det(ind x)(chi) = Det_D(x)(res chi): the restriction is decomposed into
    irreducibles of the decomposition subgroup and the determinant is
    multiplicative over the constituents.
    """
    amb = E.prime.ambient
    sub = E.prime.sub
    subtab = sub.datum.table()
    ambtab = amb.table()
    chi = ambtab.irreducibles[chi_index]
    res = restrict_cf(chi.at_level(max(chi.level, subtab.level)), sub.view)
    dec = subtab.decompose(res)
    out = LocalizedElement.one(amb.ctx)
    for j, mult in enumerate(dec):
        if mult < 0:
            raise BadInput("restriction decomposed with negative "
                           "multiplicity")
        for _ in range(mult):
            out = out * det_eval(E.element, j, twist=twist)
    return out


def det_euler_linear_formula(E: EulerFactorElement,
                             j_linear: int) -> LocalizedElement:
    """Independent product-formula route at a linear character of D:
    1 - chi'(g)/Np * bar(g), or 1 when inertia is not in the kernel."""
    sub = E.prime.sub
    amb = E.prime.ambient
    ctx = amb.ctx
    subtab = sub.datum.table()
    chi = subtab.irreducibles[j_linear]
    if chi.degree != 1:
        raise BadInput("formula route needs a linear character")
    one = CycloScalar.one(ctx)
    in_kernel = all(
        exact_to_cyclo(ctx, chi.value(sub.view.from_parent[h])).eq_at(one)
        for h in E.prime.I_els)
    if not in_kernel:
        return LocalizedElement.one(ctx)
    g = E.prime.frob
    scal = exact_to_cyclo(ctx, chi.value(sub.view.from_parent[g[0]]))
    scal = scal * pow(E.prime.Np, -1, ctx.modulus)
    mono = sub.datum.one_plus_T_pow(
        sub.datum.eps[sub.view.from_parent[g[0]]] + sub.datum.m_idx * g[1])
    return LocalizedElement(IwasawaSeries.one(ctx) - mono.scale(scal))


def restrict_k1(E: EulerFactorElement, U_els) -> list:
    """Mackey restriction: the prime data over an open subgroup.

    Double cosets U t D give one prime below per t; within each, the
    companion-matrix reduction replaces the Frobenius by its f-th power
    (f the residue degree) and Np by Np^f.  Returns a list of PrimeDatum
    over the subgroup's own datum.
    """
    amb = E.prime.ambient
    F = amb.F
    U = set(U_els)
    D = set(E.prime.D_els)
    usub = amb.subdatum(tuple(sorted(U)))
    # double coset decomposition F = U t D
    seen = set()
    reps = []
    for t in range(F.n):
        if t in seen:
            continue
        reps.append(t)
        for u in U:
            for d in D:
                seen.add(F.table[F.table[u][t]][d])
    out = []
    for t in reps:
        pdt = E.prime.conjugate(t)
        Dt = set(pdt.D_els)
        It = set(pdt.I_els)
        D_new = U & Dt
        I_new = U & It
        UI = {F.table[u][i] for u in D_new for i in It}
        f_deg = 1
        g_pow = pdt.frob
        guard = len(Dt) + 1
        while g_pow[0] not in UI:
            g_pow = amb.mul_elem(g_pow, pdt.frob)
            f_deg += 1
            if f_deg > guard:
                raise BadInput("no residue degree found; inconsistent datum")
        # write g^f = g' h with g' in U cap D_t, h in I_t
        g_new = None
        for h in It:
            cand = amb.mul_elem(g_pow, amb.inv_elem((h, 0)))
            if cand[0] in D_new:
                g_new = cand
                break
        if g_new is None:
            raise BadInput("failed to split the Frobenius power")
        out.append(PrimeDatum(
            usub.datum,
            tuple(sorted(usub.view.from_parent[x] for x in D_new)),
            tuple(sorted(usub.view.from_parent[x] for x in I_new)),
            (usub.view.from_parent[g_new[0]], g_new[1]),
            E.prime.Np ** f_deg))
    return out


# ---------------------------------------------------------------------------
# Frobenius exponents and the abelian ratio check
# ---------------------------------------------------------------------------


def frobenius_exponent(ctx: PrecisionContext, Np: int,
                       u_prime: int) -> PadicScalar:
    """b with <Np> = u'^b, via the quotient of 1-unit logarithms."""
    l = ctx.l
    if Np % l == 0:
        raise BadInput("Np must be prime to l")
    if u_prime % l != 1 or u_prime == 1:
        raise NotAOneUnit("u' must be a nontrivial 1-unit")
    om = teichmuller(ctx, Np)
    unit_part = CycloScalar.from_int(
        ctx, Np * pow(om.residue, -1, ctx.modulus))
    log_np = log_1unit(unit_part)
    log_u = log_1unit(CycloScalar.from_int(ctx, u_prime))
    vu = log_u.valuation_l_content()
    if vu >= log_u.prec:
        raise NotAOneUnit("log u' vanished at working precision")
    num = log_np.divexact_l(vu)
    den = log_u.divexact_l(vu)
    from .padic import invert
    return (num * invert(den)).as_padic()


def binomial_series(ctx: PrecisionContext, b: PadicScalar) -> IwasawaSeries:
    """(1+T)^b for an l-adic exponent: sum C(b,k) T^k, honest losses from
    the k! denominators."""
    coeffs = [CycloScalar.one(ctx)]
    cur = CycloScalar.from_padic(b)
    acc = cur
    for k in range(1, ctx.D + 1):
        term = acc.divexact_int(_factorial_lfree(k, ctx.l))
        vk = _factorial_lval(k, ctx.l)
        try:
            term = term.divexact_l(vk)
        except PrecisionExhausted:
            term = CycloScalar.zero(ctx.with_precision(
                max(term.prec - vk, 0)))
        coeffs.append(term)
        if k <= ctx.D - 1:
            bk = CycloScalar.from_padic(b) - k
            acc = acc * bk
    return IwasawaSeries(ctx, coeffs)


def _factorial_lval(k, l):
    v, pk = 0, l
    while pk <= k:
        v += k // pk
        pk *= l
    return v


def _factorial_lfree(k, l):
    out = 1
    for i in range(2, k + 1):
        ii = i
        while ii % l == 0:
            ii //= l
        out *= ii
    return out


def abelian_euler_factor(ctx: PrecisionContext, chi, p: int) -> \
        LocalizedElement:
    """1 - chi(Fr_p)/p (1+T)^b_p over Q: the analytic route, using the
    l-adic Frobenius exponent (independent of the group-ring route)."""
    b = frobenius_exponent(ctx, p, 1 + ctx.l)
    mono = binomial_series(ctx, b)
    xi = chi.gamma_value()
    if not (xi - CycloScalar.one(ctx)).is_zero_at_precision():
        # the twisted monomial (xi(1+T))^b = xi^b (1+T)^b carries the wild
        # value of Frobenius; only the tame part multiplies separately
        mono = mono.scale(xi ** (b.residue % ctx.zeta_order))
    tame, _, _ = chi.value_int(p, ctx.N)
    scal = CycloScalar.from_int(ctx, tame) * pow(p, -1, ctx.modulus)
    return LocalizedElement(IwasawaSeries.one(ctx) - mono.scale(scal))


def s_ratio_check(ctx: PrecisionContext, lam_S, lam_Sp, chi, p: int,
                  digits: int | None = None) -> CongruenceReport:
    """The S-independence ratio: the analytic Euler factor against the
    ratio of two independently built pseudomeasures."""
    report = CongruenceReport()
    ratio = lam_Sp.value(chi) / lam_S.value(chi)
    analytic = abelian_euler_factor(ctx, chi, p)
    if digits is None:
        digits = min(lam_S.digits, ctx.N - 2)
    ok = ratio.eq_at(analytic, digits=digits)
    report.add("s-ratio", f"p:{p},chi:{chi.tame},w{chi.wild_level}", ok,
               note=f"{digits} digits")
    return report


def parse_prime_datum(datum: ProLGroupDatum, line: str) -> PrimeDatum:
    """Parse 'prime Np D=<subgroup-id> I=<subgroup-id> frob=<elt[:z]>'."""
    from .algebra import resolve_subgroup_id
    parts = line.split()
    if not parts or parts[0] != "prime":
        raise BadInput("prime datum lines start with 'prime'")
    Np = int(parts[1])
    fields = {}
    for tok in parts[2:]:
        k, _, v = tok.partition("=")
        fields[k] = v
    D = resolve_subgroup_id(datum, fields.get("D", "all"))
    I = resolve_subgroup_id(datum, fields.get("I", "gen:"))
    frob_tok = fields.get("frob", "0")
    if ":" in frob_tok:
        f, z = frob_tok.split(":")
        frob = (int(f), int(z))
    else:
        frob = (int(frob_tok), 0)
    return PrimeDatum(datum, D, I, frob, Np)
