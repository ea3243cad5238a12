"""Logarithmic pseudomeasures and the congruence checkers built on them.

The central object is the map taking a hom-side value f to
chi -> (1/l) log( f(chi)^l / Psi f(psi_l chi) ), realized termwise on
truncated series, followed by Fourier inversion over the conjugacy classes:
the result is the trace-side element whose integrality the torsion
congruences govern.  Every check returns a CongruenceReport carrying
valuation witnesses rather than bare booleans: a check passes when the
recorded deficit is <= 0 at the stated precision, and a failing check says
which class, character or central element failed and by how many digits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .algebra import (AlgebraElement, HomValue, ProLGroupDatum, SubDatum,
                      QuotientDatum, TraceClassElement, TraceIdealData,
                      coefficient_at, det_eval, fourier_invert, norm_res,
                      tr_eval, trace_project, ver_algebra, _bar_series)
from .errors import (BadInput, Condition3Fails, CongruenceFails,
                     HypothesisViolation, NotAInvariant, SeriesDivergence)
from .lgroup import adams_psi_l, ver_on_classfunction
from .padic import CycloScalar
from .series import (IwasawaSeries, LocalizedElement,
                     one_over_l_log_quotient, psi_endo)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class ReportItem:
    check: str
    key: str
    passed: bool
    deficit: int | None = None
    note: str = ""

    def as_dict(self):
        return {"check": self.check, "key": self.key, "passed": self.passed,
                "deficit": self.deficit, "note": self.note}


@dataclass
class CongruenceReport:
    items: list = field(default_factory=list)

    def add(self, check, key, passed, deficit=None, note=""):
        self.items.append(ReportItem(check, str(key), bool(passed),
                                     deficit, note))

    def extend(self, other: "CongruenceReport"):
        self.items.extend(other.items)

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def failures(self):
        return [it for it in self.items if not it.passed]

    def to_json(self) -> str:
        return json.dumps([it.as_dict() for it in self.items],
                          sort_keys=True, indent=1)

    def __repr__(self):
        n_fail = len(self.failures())
        return f"CongruenceReport({len(self.items)} items, {n_fail} failed)"


@dataclass
class LogPseudomeasure:
    """Trace-side element with its per-class integrality ledger."""

    t: TraceClassElement
    report: CongruenceReport
    source: HomValue

    @property
    def integral(self) -> bool:
        return self.report.passed


# ---------------------------------------------------------------------------
# the logarithm map on hom values
# ---------------------------------------------------------------------------


def _psi_decompositions(datum: ProLGroupDatum):
    """Cache: integer decomposition of psi_l(chi_i) for every irreducible."""
    dec = getattr(datum, "_psi_dec", None)
    if dec is None:
        tab = datum.table()
        dec = tuple(adams_psi_l(ch)[1] for ch in tab.irreducibles)
        datum._psi_dec = dec
    return dec


def condition3_quotient(f: HomValue, i: int) -> LocalizedElement:
    """f(chi_i)^l / Psi f(psi_l chi_i), the 1-unit the logarithm eats."""
    datum = f.datum
    l = datum.ctx.l
    dec = _psi_decompositions(datum)[i]
    num = f.values[i] ** l
    den = f.virtual_value(dec).apply_series_map(psi_endo)
    return num / den


def big_L(f: HomValue) -> HomValue:
    """chi -> (1/l) log of the condition-3 quotient, all irreducibles."""
    datum = f.datum
    out = []
    one = LocalizedElement.one(datum.ctx)
    for i in range(datum.table().s):
        q = condition3_quotient(f, i)
        try:
            out.append(one_over_l_log_quotient(q, one))
        except CongruenceFails as exc:
            raise Condition3Fails(
                f"condition 3 fails at irreducible {i}: {exc}") from exc
    return HomValue(datum, out)


def log_pseudomeasure(L: HomValue) -> LogPseudomeasure:
    """Fourier inversion of big_L(L), with per-class integrality ledger."""
    datum = L.datum
    values = big_L(L)
    t = fourier_invert(datum, values)
    report = CongruenceReport()
    for i, c in enumerate(t.coeffs):
        d = c.integrality_deficit()
        report.add("coefficient-integrality", f"class:{datum.cd.reps[i]}",
                   d == 0, deficit=d if d is not None else -1,
                   note="" if d is not None else
                   "denominator did not normalize away")
    return LogPseudomeasure(t, report, L)


# ---------------------------------------------------------------------------
# hom conditions for datum-backed values
# ---------------------------------------------------------------------------


def hom_conditions_check(f: HomValue, source: AlgebraElement | None = None,
                         twists=(1,), galois_exps=(2,)) -> CongruenceReport:
    """The three membership conditions for hom values at working precision.

    1. Galois equivariance: f(chi^sigma) = sigma(f(chi)).
    2. W-twists: f(chi (x) rho) = rho-sharp(f(chi)); when the source algebra
       element is known the twisted value is recomputed independently by
       twisting the monomial representation, and compared at the graded
       tolerance that rho-sharp's constant term allows.
    3. f(chi)^l / Psi f(psi_l chi) = 1 mod l.
    """
    datum = f.datum
    ctx = datum.ctx
    tab = datum.table()
    report = CongruenceReport()
    for t in galois_exps:
        if ctx.m == 0 or t % ctx.l == 0:
            continue
        perm = tab.galois_permutation(t)
        for i in range(tab.s):
            ok = f.values[perm[i]].eq_at(f.values[i].galois(t))
            report.add("condition1-galois", f"chi:{i},sigma:{t}", ok)
    if source is not None:
        e = ctx.phi
        for w in twists:
            if w % ctx.zeta_order == 0:
                continue
            v_xi = ctx.l ** _int_val(w, ctx.l)
            dcut = ctx.D // 2
            digits = max(1, ((ctx.D + 1 - dcut) * v_xi) // e)
            for i in range(tab.s):
                via_rho = f.value(i, twist=w)
                direct = det_eval(source, i, twist=w)
                ok = _eq_graded(via_rho, direct, dcut, digits)
                report.add("condition2-twist", f"chi:{i},w:{w}", ok,
                           note=f"graded compare deg<={dcut} "
                                f"digits<={digits}")
    for i in range(tab.s):
        try:
            q = condition3_quotient(f, i)
            diff = (q - 1).normalized()
            if diff.lshift > 0:
                report.add("condition3", f"chi:{i}", False,
                           deficit=diff.lshift, note="l-denominator")
                continue
            deficit = 1 - min(diff.num.l_content(), 1) \
                if diff.den.first_unit_index() == 0 else None
            content = diff.num.l_content()
            report.add("condition3", f"chi:{i}", content >= 1,
                       deficit=max(0, 1 - content))
        except (CongruenceFails, BadInput) as exc:
            report.add("condition3", f"chi:{i}", False, note=str(exc))
    return report


def _int_val(w, l):
    v = 0
    while w % l == 0:
        w //= l
        v += 1
    return v


def _eq_graded(a: LocalizedElement, b: LocalizedElement, dcut: int,
               digits: int) -> bool:
    """Compare two localized values coefficientwise up to degree dcut at
    the given number of l-digits (after cross multiplication)."""
    ctx = a.ctx
    s = max(a.lshift, b.lshift)
    lhs = a.num.scale(ctx.l ** (s - a.lshift)) * b.den
    rhs = b.num.scale(ctx.l ** (s - b.lshift)) * a.den
    for j in range(dcut + 1):
        if not lhs.coeffs[j].eq_at(rhs.coeffs[j], digits):
            return False
    return True


# ---------------------------------------------------------------------------
# torsion-congruence checkers
# ---------------------------------------------------------------------------


def conj_subalgebra(x: AlgebraElement, parent: ProLGroupDatum, sub: SubDatum,
                    w_parent: int) -> AlgebraElement:
    """Conjugation of an element of the subalgebra by a parent element."""
    out = [IwasawaSeries.zero(parent.ctx) for _ in range(sub.datum.F.n)]
    for i, c in enumerate(x.coeffs):
        if c.is_zero_at_precision():
            continue
        u = sub.view.to_parent[i]
        d = parent.conj_twist(w_parent, u)
        series = c if d == 0 else c * parent.one_plus_T_pow(d)
        u2 = parent.F.conj(u, w_parent)
        out[sub.view.from_parent[u2]] = \
            out[sub.view.from_parent[u2]] + series
    return AlgebraElement(sub.datum, out, x.lshift)


def require_a_invariant(x: AlgebraElement, parent, sub, a_rep):
    if not conj_subalgebra(x, parent, sub, a_rep).eq_at(x):
        raise NotAInvariant(
            "element is not invariant under the index-l conjugation action")


def torsion_congruence_check(lambda_prime: AlgebraElement,
                             lambda_ab: AlgebraElement,
                             parent: ProLGroupDatum, sub: SubDatum,
                             a_rep: int, quot_ab: QuotientDatum,
                             ) -> CongruenceReport:
    """Is lambda' = ver(lambda_ab) mod the trace ideal?

    lambda' must be invariant under the conjugation action (validated, not
    assumed) and both inputs must be units.  The quotient
    lambda'/ver(lambda_ab) - 1 is tested for trace-ideal membership.
    """
    require_a_invariant(lambda_prime, parent, sub, a_rep)
    ver_lab = ver_algebra(lambda_ab, parent, sub, a_rep, quotient=quot_ab)
    x = lambda_prime * ver_lab.inverse() - 1
    tid = TraceIdealData(parent, sub, a_rep)
    ok, witness = tid.membership(x)
    report = CongruenceReport()
    report.add("torsion-congruence", "lambda'/ver(lambda_ab) - 1", ok,
               note=json.dumps(witness, sort_keys=True) if witness else "")
    return report


def congruence3_check(L: HomValue, L_prime: HomValue,
                      parent: ProLGroupDatum, sub: SubDatum,
                      a_rep: int) -> CongruenceReport:
    """Central-element form of the averaged hom congruence.

    For each central z: (1/[G':Gamma]) sum_chi' chi'(z^-1)
    (L'(chi')/Psi L(chi' o ver) - 1) must be divisible by l.
    """
    ctx = parent.ctx
    subtab = sub.datum.table()
    ptab = parent.table()
    report = CongruenceReport()
    quotients = []
    for j in range(subtab.s):
        idx = _ver_pullback_index(parent, sub, a_rep, j)
        q = L_prime.values[j] / L.values[idx].apply_series_map(psi_endo)
        quotients.append((q - 1).normalized())
    for z in parent.central_elements():
        if z not in sub.view.from_parent:
            continue
        acc = LocalizedElement.zero(ctx)
        for j in range(subtab.s):
            chi = subtab.irreducibles[j]
            zi = sub.datum.cd.class_of[sub.view.from_parent[parent.F.inv[z]]]
            scal = CycloScalar(ctx, chi.values[zi].embed(ctx.m).coeffs)
            acc = acc + quotients[j] * LocalizedElement(
                IwasawaSeries.constant(ctx, scal))
        acc = acc.divexact_l(sub.datum.F.a).normalized()
        if acc.lshift > 0:
            report.add("congruence3", f"z:{z}", False, deficit=acc.lshift + 1,
                       note="sum has an l-denominator")
            continue
        content = acc.num.l_content()
        report.add("congruence3", f"z:{z}", content >= 1,
                   deficit=max(0, 1 - content))
    return report


def _ver_pullback_index(parent, sub, a_rep, j) -> int:
    """Index in the parent table of chi'_j o ver (a linear character)."""
    cache = getattr(parent, "_ver_pullback", None)
    if cache is None:
        cache = {}
        parent._ver_pullback = cache
    key = (id(sub.datum), a_rep, j)
    if key not in cache:
        subtab = sub.datum.table()
        chi = subtab.irreducibles[j]
        if chi.degree != 1:
            raise BadInput("ver pullback needs a linear character")
        values = {sub.view.to_parent[i]:
                  chi.values[sub.datum.cd.class_of[i]]
                  for i in range(sub.datum.F.n)}
        ptab = parent.table()
        cf = ver_on_classfunction(parent.F, sub.view.elements, a_rep,
                                  values, ptab.level)
        cache[key] = ptab.index_of(cf)
    return cache[key]


def det_ver_identity_check(lambda_prime: AlgebraElement,
                           lambda_ab: AlgebraElement,
                           parent: ProLGroupDatum, sub: SubDatum, a_rep: int,
                           quot_ab: QuotientDatum, L: HomValue,
                           L_prime: HomValue,
                           digits: int | None = None) -> CongruenceReport:
    """Two independent evaluations of the same hom value.

    Det(lambda'/ver(lambda_ab)) at chi' versus L'(chi')/Psi(L(chi' o ver)),
    for every linear character chi' of the subgroup.
    """
    ctx = parent.ctx
    if digits is None:
        digits = ctx.N - 2
    ver_lab = ver_algebra(lambda_ab, parent, sub, a_rep, quotient=quot_ab)
    quot = lambda_prime * ver_lab.inverse()
    subtab = sub.datum.table()
    report = CongruenceReport()
    for j in range(subtab.s):
        if subtab.irreducibles[j].degree != 1:
            continue
        lhs = det_eval(quot, j)
        idx = _ver_pullback_index(parent, sub, a_rep, j)
        rhs = L_prime.values[j] / L.values[idx].apply_series_map(psi_endo)
        report.add("det-ver-identity", f"chi':{j}",
                   lhs.eq_at(rhs, digits=digits),
                   note=f"compared at {digits} digits")
    return report


def trace_ideal_power_check(x: AlgebraElement, v: int,
                            tid: TraceIdealData) -> CongruenceReport:
    """x in T' implies x^(l^v) in l^v T'."""
    report = CongruenceReport()
    ok0, wit = tid.membership(x)
    if not ok0:
        raise BadInput(f"x is not in the trace ideal: {wit}")
    l = x.ctx.l
    y = (x ** (l ** v)).divexact_l(v)
    if y.normalized().lshift > 0:
        report.add("trace-ideal-power", f"v:{v}", False,
                   deficit=y.normalized().lshift,
                   note="power not divisible by l^v")
        return report
    ok, wit = tid.membership(y.normalized())
    report.add("trace-ideal-power", f"v:{v}", ok,
               note=json.dumps(wit, sort_keys=True) if wit else "")
    return report


def central_log_series(x: AlgebraElement, z_parent: int,
                       parent: ProLGroupDatum,
                       sub: SubDatum) -> LocalizedElement:
    """sum_nu (-1)^(nu-1) (1/(l nu)) (x^nu | Gamma)(z^-1), bar applied.

    This is the trace-side series for the averaged (1/l) log of
    Det(1+x)(chi') over the subgroup characters; it converges because x
    lies in the radical (validated via the augmentation).
    """
    ctx = parent.ctx
    aug = x.augmentation().valuation()
    if x.lshift == 0 and aug == 0:
        raise SeriesDivergence("x is not in the maximal ideal")
    z_sub = sub.view.from_parent[z_parent]
    acc = LocalizedElement.zero(ctx)
    power = x
    nu = 1
    numax = 2 * ctx.phi * ctx.N + ctx.D + 16
    while True:
        t = trace_project(power)
        c = coefficient_at(t, (z_sub, 0))
        # divide by l * nu
        kk, vv = nu, 1
        while kk % ctx.l == 0:
            kk //= ctx.l
            vv += 1
        term = c
        if kk != 1:
            term = term * pow(kk, -1, ctx.modulus)
        term = term.divexact_l(vv)
        if nu % 2 == 0:
            term = -term
        acc = acc + term
        nu += 1
        if nu > numax:
            raise SeriesDivergence("central log series did not terminate")
        power = (power * x).normalized()
        if power.lshift == 0 and all(c2.is_zero_at_precision()
                                     for c2 in power.coeffs):
            break
    # push to the gamma_k side with the bar monomial of z
    acc = acc.apply_series_map(lambda s: _bar_series(sub.datum, s))
    eps_z = sub.datum.eps[z_sub]
    if eps_z:
        acc = acc * LocalizedElement(sub.datum.one_plus_T_pow(eps_z))
    return acc.normalized()


def central_log_integral_check(x: AlgebraElement, z_parent: int,
                               parent: ProLGroupDatum, sub: SubDatum,
                               tid: TraceIdealData) -> CongruenceReport:
    """The averaged (1/l) log of Det(1+x) at a central z is integral for
    x in the trace ideal."""
    report = CongruenceReport()
    ok0, wit = tid.membership(x)
    if not ok0:
        raise BadInput(f"x is not in the trace ideal: {wit}")
    val = central_log_series(x, z_parent, parent, sub)
    d = val.integrality_deficit()
    report.add("central-log-integral", f"z:{z_parent}", d == 0,
               deficit=d if d is not None else -1,
               note="" if d is not None else "denominator survived")
    return report


def noncentral_relation_check(t_G: TraceClassElement,
                              t_Gp: TraceClassElement,
                              parent: ProLGroupDatum,
                              sub: SubDatum) -> CongruenceReport:
    """Off-center coefficient relations between the two trace elements.

    For g in the subgroup, noncentral and outside the transfer image:
    (t_G|Gamma)(g^-1) = (h_g/l) (t_G'|Gamma)(g^-1).  For g outside the
    subgroup: (t_G|Gamma)(g^-1) is integral.
    """
    from .algebra import ver_element
    ctx = parent.ctx
    l = ctx.l
    report = CongruenceReport()
    a_rep = min(f for f in range(parent.F.n)
                if f not in sub.view.from_parent)
    ver_image = {ver_element(parent, sub, a_rep, (f, 0))[0]
                 for f in range(parent.F.n)}
    central = set(parent.central_elements())
    for i, rep in enumerate(parent.cd.reps):
        if rep in central:
            continue
        h_g = parent.cd.sizes[i]
        if rep in sub.view.from_parent and rep not in ver_image:
            lhs = coefficient_at(t_G, (rep, 0))
            rhs = coefficient_at(t_Gp, (rep, 0))
            if h_g % l:
                raise HypothesisViolation(
                    f"class size {h_g} of noncentral element not divisible "
                    f"by l")
            rhs = rhs * (h_g // l)
            report.add("noncentral-relation", f"g:{rep}", lhs.eq_at(rhs))
        else:
            d = coefficient_at(t_G, (rep, 0)).integrality_deficit()
            report.add("noncentral-integrality", f"g:{rep}", d == 0,
                       deficit=d if d is not None else -1)
    return report


def prop44_pipeline(lambda_prime: AlgebraElement, lambda_ab: AlgebraElement,
                    L: HomValue, L_prime: HomValue,
                    parent: ProLGroupDatum, sub: SubDatum, a_rep: int,
                    quot_ab: QuotientDatum):
    """Full integrality pipeline for class-2 groups with an abelian
    index-l subgroup.

    Computes the trace element of L by Fourier inversion, checks the
    off-center coefficients are integral, evaluates the central-coefficient
    identity through the subgroup data, cross-checks the two central routes
    against each other, and reports whether the whole element is integral
    exactly when the trace-ideal congruence holds.
    """
    F = parent.F
    if len(sub.view.elements) * parent.ctx.l != F.n:
        raise HypothesisViolation("need an index-l subgroup")
    if not sub.datum.F.is_abelian():
        raise HypothesisViolation("need an abelian index-l subgroup")
    der = set(F.derived_subgroup())
    if not der <= set(F.center()):
        raise HypothesisViolation("need nilpotency class <= 2")
    ctx = parent.ctx
    report = CongruenceReport()
    lp = log_pseudomeasure(L)
    t = lp.t
    # off-center integrality straight from the Fourier coefficients
    central = set(parent.central_elements())
    for i, rep in enumerate(parent.cd.reps):
        if rep in central:
            continue
        d = t.coeffs[i].integrality_deficit()
        report.add("prop44-noncentral", f"g:{rep}", d == 0,
                   deficit=d if d is not None else -1)
    # central coefficients via the subgroup identity
    subtab = sub.datum.table()
    for z in central:
        acc = LocalizedElement.zero(ctx)
        one = LocalizedElement.one(ctx)
        for j in range(subtab.s):
            chi = subtab.irreducibles[j]
            zi = sub.datum.cd.class_of[sub.view.from_parent[F.inv[z]]]
            scal = CycloScalar(ctx, chi.values[zi].embed(ctx.m).coeffs)
            idx = _ver_pullback_index(parent, sub, a_rep, j)
            q = L_prime.values[j] / L.values[idx].apply_series_map(psi_endo)
            try:
                logq = one_over_l_log_quotient(q, one)
            except CongruenceFails as exc:
                report.add("prop44-central", f"z:{z}", False, note=str(exc))
                break
            acc = acc + logq * LocalizedElement(
                IwasawaSeries.constant(ctx, scal))
        else:
            acc = acc.divexact_l(sub.datum.F.a).normalized()
            d = acc.integrality_deficit()
            report.add("prop44-central", f"z:{z}", d == 0,
                       deficit=d if d is not None else -1)
            # cross-check against the direct Fourier coefficient
            direct = coefficient_at(t, (z, 0)).apply_series_map(
                lambda s: _bar_series(parent, s))
            if parent.eps[z]:
                direct = direct * LocalizedElement(
                    parent.one_plus_T_pow(parent.eps[z]))
            report.add("prop44-central-identity", f"z:{z}",
                       direct.eq_at(acc, digits=ctx.N - 2),
                       note="fourier route vs subgroup route")
    return LogPseudomeasure(t, report, L), report
