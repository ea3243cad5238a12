"""Named check suites: the orchestration layer shared by CLI and tests.

Each suite draws all randomness from the seeded generator it is handed and
returns a CongruenceReport; identical configuration and seed give identical
reports.  Counts are parameters so the acceptance run can pin the sizes the
criteria demand while the CLI default stays fast.
"""

from __future__ import annotations

import random

from .algebra import (AlgebraElement, ProLGroupDatum, TraceIdealData,
                      deflate_algebra, det_hom, fourier_invert, norm_res,
                      tr_hom, trace_project, ver_algebra)
from .context import PrecisionContext
from .errors import IwacalcError
from .lgroup import (ClassFunction, ExactCyclo, center_ratio_check,
                     induce_values, linear_characters, nonabelian_catalog,
                     ver_on_classfunction)
from .lgroup import _linear_characters_abelian
from .logpseudo import (CongruenceReport, central_log_integral_check,
                        congruence3_check, det_ver_identity_check,
                        hom_conditions_check, log_pseudomeasure,
                        noncentral_relation_check, prop44_pipeline,
                        torsion_congruence_check, trace_ideal_power_check)
from .lfunc import (DirichletCharacterDatum, hom_conditions_check_abelian,
                    interpolation_check, stickelberger_lambda)
from .euler import PrimeDatum, det_euler, euler_factor, restrict_k1, \
    s_ratio_check
from .series import LocalizedElement
from .synth import rand_trace_element, rand_unit


def _heisenberg_setup(ctx):
    from .lgroup import heisenberg
    datum = ProLGroupDatum(ctx, heisenberg(ctx.l))
    U = datum.F.abelian_maximal_subgroups()[0]
    sub = datum.subdatum(U)
    a_rep = min(f for f in range(datum.F.n) if f not in set(U))
    return datum, sub, a_rep


def _y_family(datum, sub, a_rep, rng):
    """One consistent synthetic family from a random unit."""
    quot_ab = getattr(datum, "_ab_cache", None)
    if quot_ab is None:
        quot_ab = datum.abelianization()
        datum._ab_cache = quot_ab
    y = rand_unit(datum, rng)
    lam_ab = deflate_algebra(y, quot_ab)
    lam_p = norm_res(y, datum, sub, a_rep)
    return y, lam_ab, lam_p, quot_ab


def suite_hom(ctx: PrecisionContext, rng: random.Random,
              count: int = 10) -> CongruenceReport:
    """Membership conditions for Det images and for the arithmetic
    pseudomeasure."""
    datum, _, _ = _heisenberg_setup(ctx)
    report = CongruenceReport()
    g = AlgebraElement.group_element(datum, rng.randrange(datum.F.n))
    report.extend(hom_conditions_check(det_hom(g), source=g))
    for _ in range(count):
        y = rand_unit(datum, rng)
        report.extend(hom_conditions_check(det_hom(y), source=y))
    actx = PrecisionContext(ctx.l, min(ctx.N, 6), min(ctx.D, 8), m=1)
    lam = stickelberger_lambda(actx, level=min(ctx.N, 6))
    chis = [DirichletCharacterDatum(actx, t) for t in
            range(0, actx.l - 1, 2)]
    chis.append(DirichletCharacterDatum(actx, 0, 1, 1))
    report.extend(hom_conditions_check_abelian(lam, chis))
    return report


def suite_wall(ctx, rng, count: int = 100) -> CongruenceReport:
    """Norm-vs-transfer congruence modulo the trace ideal, plus
    no-false-negative checks on constructed trace-ideal elements."""
    datum, sub, a_rep = _heisenberg_setup(ctx)
    tid = TraceIdealData(datum, sub, a_rep)
    report = CongruenceReport()
    for k in range(count):
        y = rand_unit(datum, rng)
        ny = norm_res(y, datum, sub, a_rep)
        vy = ver_algebra(y, datum, sub, a_rep)
        ok, wit = tid.membership(ny - vy)
        report.add("wall", f"unit:{k}", ok, note=str(wit) if wit else "")
    from .series import IwasawaSeries
    from .synth import rand_series
    for k in range(max(count // 5, 5)):
        x = AlgebraElement.zero(sub.datum)
        for orbit in tid.orbits:
            x = x + tid.tr_A(orbit[0][0]) * rand_series(ctx, rng)
        ok, wit = tid.membership(x)
        report.add("trace-ideal-no-false-negative", f"elt:{k}", ok,
                   note=str(wit) if wit else "")
    return report


def suite_lemma41(ctx, rng) -> CongruenceReport:
    """The induction/Adams/transfer character identity, pointwise and
    exactly, over every linear character of every abelian index-l
    subgroup of every catalog group; and the center-index ratios."""
    report = CongruenceReport()
    for F in nonabelian_catalog(ctx.l):
        lev = F.cyclo_level()
        cd = F.conjugacy_classes()
        one = ExactCyclo.integer(F.l, lev, 1)
        for U in F.abelian_maximal_subgroups():
            view = F.subgroup_view(U)
            a_rep = min(x for x in range(F.n) if x not in set(U))
            omega = next(v for v in linear_characters(F)
                         if all(v[u] == one for u in U)
                         and not v[a_rep] == one)
            omega_cf = ClassFunction(F, lev, [omega[r] for r in cd.reps])
            for ci, chiv in enumerate(_linear_characters_abelian(view.group)):
                pv = {view.to_parent[i]: chiv[i].embed(lev)
                      for i in range(view.group.n)}
                psi_pv = {view.to_parent[g]:
                          pv[view.to_parent[view.group.power(g, F.l)]]
                          for g in range(view.group.n)}
                lhs = induce_values(F, view, psi_pv, lev)
                ind_chi = induce_values(F, view, pv, lev)
                psi_ind = ClassFunction(
                    F, lev, [ind_chi.values[cd.class_of[F.power(r, F.l)]]
                             for r in cd.reps])
                lhs = lhs - psi_ind
                cv = ver_on_classfunction(F, U, a_rep, pv, lev)
                rhs = None
                om_pow = ClassFunction(F, lev, [one] * cd.s)
                for _ in range(F.l):
                    term = cv * om_pow
                    rhs = term if rhs is None else rhs + term
                    om_pow = om_pow * omega_cf
                rhs = rhs - cv * F.l
                report.add("induction-twist-identity",
                           f"{F.name},U:{U[1]},chi:{ci}", lhs == rhs)
        try:
            ratio = center_ratio_check(F)
            report.add("center-ratio", F.name, True,
                       note=f"ratio={ratio}")
        except IwacalcError as exc:
            report.add("center-ratio", F.name, False, note=str(exc))
    return report


def suite_lemma43(ctx, rng, count: int = 50) -> CongruenceReport:
    """Trace-ideal powers land in l^v T', and the central log sums are
    integral."""
    datum, sub, a_rep = _heisenberg_setup(ctx)
    tid = TraceIdealData(datum, sub, a_rep)
    report = CongruenceReport()
    from .synth import rand_series
    zs = [z for z in datum.central_elements()
          if z in sub.view.from_parent and z != datum.F.e]
    for k in range(count):
        x = AlgebraElement.zero(sub.datum)
        for orbit in tid.orbits:
            x = x + tid.tr_A(orbit[0][0]) * rand_series(ctx, rng)
        v = 1 + (k % 2)
        rep = trace_ideal_power_check(x, v, tid)
        for it in rep.items:
            report.add("trace-ideal-power", f"elt:{k},{it.key}", it.passed,
                       it.deficit, it.note)
        if k < max(count // 5, 5):
            z = zs[k % len(zs)]
            rep2 = central_log_integral_check(x, z, datum, sub, tid)
            for it in rep2.items:
                report.add("central-log", f"elt:{k},{it.key}", it.passed,
                           it.deficit, it.note)
    return report


def suite_prop23(ctx, rng, count: int = 100) -> CongruenceReport:
    """Fourier inversion roundtrip at the documented precision debit."""
    datum, _, _ = _heisenberg_setup(ctx)
    report = CongruenceReport()
    digits = ctx.N - datum.F.a
    for k in range(count):
        t = rand_trace_element(datum, rng)
        values = tr_hom(t)
        back = fourier_invert(datum, values)
        report.add("fourier-roundtrip", f"elt:{k}",
                   t.eq_at(back, digits=digits),
                   note=f"{digits} digits")
    return report


def suite_prop32(ctx, rng, count: int = 8,
                 sabotage: bool = False) -> CongruenceReport:
    """Torsion congruence, averaged congruence and the two-route identity
    on synthetic families; with sabotage, designed failures must be
    detected."""
    datum, sub, a_rep = _heisenberg_setup(ctx)
    report = CongruenceReport()
    tid = TraceIdealData(datum, sub, a_rep)
    zs = [z for z in datum.central_elements()
          if z in sub.view.from_parent and z != datum.F.e]
    for k in range(count):
        y, lam_ab, lam_p, quot_ab = _y_family(datum, sub, a_rep, rng)
        L = det_hom(y)
        Lp = det_hom(lam_p)
        if sabotage:
            bad = AlgebraElement.one(sub.datum) + \
                AlgebraElement.group_element(
                    sub.datum, sub.view.from_parent[zs[k % len(zs)]])
            lam_bad = lam_p * bad
            r1 = torsion_congruence_check(lam_bad, lam_ab, datum, sub,
                                          a_rep, quot_ab)
            report.add("torsion-congruence-sabotage", f"family:{k}",
                       not r1.passed, note="must fail")
            r2 = congruence3_check(L, det_hom(lam_bad), datum, sub, a_rep)
            report.add("congruence3-sabotage", f"family:{k}",
                       not r2.passed, note="must fail")
            continue
        r1 = torsion_congruence_check(lam_p, lam_ab, datum, sub, a_rep,
                                      quot_ab)
        for it in r1.items:
            report.add("torsion-congruence", f"family:{k}", it.passed,
                       it.deficit, it.note)
        free_orbit = next(o for o in tid.orbits if len(o) > 1)
        lam_pert = lam_p * (AlgebraElement.one(sub.datum) +
                            tid.tr_A(free_orbit[0][0]))
        r1b = torsion_congruence_check(lam_pert, lam_ab, datum, sub,
                                       a_rep, quot_ab)
        report.add("torsion-congruence-trace-perturbed", f"family:{k}",
                   r1b.passed, note="perturbation inside the ideal")
        r2 = congruence3_check(L, Lp, datum, sub, a_rep)
        for it in r2.items:
            report.add("congruence3", f"family:{k},{it.key}", it.passed,
                       it.deficit, it.note)
        r3 = det_ver_identity_check(lam_p, lam_ab, datum, sub, a_rep,
                                    quot_ab, L, Lp)
        for it in r3.items:
            report.add("det-ver-identity", f"family:{k},{it.key}",
                       it.passed, it.deficit, it.note)
    return report


def suite_prop42(ctx, rng, count: int = 6) -> CongruenceReport:
    """Off-center coefficient relations between the two trace elements of
    a consistent family."""
    datum, sub, a_rep = _heisenberg_setup(ctx)
    report = CongruenceReport()
    for k in range(count):
        y, lam_ab, lam_p, quot_ab = _y_family(datum, sub, a_rep, rng)
        t_G = log_pseudomeasure(det_hom(y)).t
        t_Gp = log_pseudomeasure(det_hom(lam_p)).t
        r = noncentral_relation_check(t_G, t_Gp, datum, sub)
        for it in r.items:
            report.add(it.check, f"family:{k},{it.key}", it.passed,
                       it.deficit, it.note)
    return report


def suite_prop44(ctx, rng, count: int = 4,
                 sabotage: bool = False) -> CongruenceReport:
    """The full integrality pipeline; central coefficients flag exactly
    when the trace-ideal hypothesis is broken."""
    datum, sub, a_rep = _heisenberg_setup(ctx)
    report = CongruenceReport()
    zs = [z for z in datum.central_elements()
          if z in sub.view.from_parent and z != datum.F.e]
    for k in range(count):
        y, lam_ab, lam_p, quot_ab = _y_family(datum, sub, a_rep, rng)
        L = det_hom(y)
        Lp = det_hom(lam_p)
        if sabotage:
            bad = AlgebraElement.one(sub.datum) + \
                AlgebraElement.group_element(
                    sub.datum, sub.view.from_parent[zs[k % len(zs)]])
            Lp = det_hom(lam_p * bad)
        _, rep = prop44_pipeline(lam_p, lam_ab, L, Lp, datum, sub, a_rep,
                                 quot_ab)
        nc = [it for it in rep.items if it.check == "prop44-noncentral"]
        ce = [it for it in rep.items if it.check == "prop44-central"]
        report.add("prop44-noncentral", f"family:{k}",
                   all(it.passed for it in nc))
        if sabotage:
            report.add("prop44-central-sabotage", f"family:{k}",
                       not all(it.passed for it in ce), note="must fail")
        else:
            report.add("prop44-central", f"family:{k}",
                       all(it.passed for it in ce))
            ident = [it for it in rep.items
                     if it.check == "prop44-central-identity"]
            report.add("prop44-central-identity", f"family:{k}",
                       all(it.passed for it in ident))
    return report


def suite_fact2(ctx, rng, count: int = 100) -> CongruenceReport:
    """The master integrality oracle: the log pseudomeasure of every Det
    image of a unit is integral, and the hom conditions hold."""
    datum, _, _ = _heisenberg_setup(ctx)
    report = CongruenceReport()
    for k in range(count):
        y = rand_unit(datum, rng)
        L = det_hom(y)
        lp = log_pseudomeasure(L)
        report.add("fact2-integrality", f"unit:{k}", lp.integral,
                   note="" if lp.integral else str(
                       [it.as_dict() for it in lp.report.failures()]))
        if k < max(3, count // 20):
            report.extend(hom_conditions_check(L, source=y))
    return report


def suite_lemma52(ctx, rng, count: int = 20) -> CongruenceReport:
    """Mackey restriction of Euler factors at the Det level."""
    from .lgroup import heisenberg, modular_l3
    report = CongruenceReport()
    groups = [heisenberg(ctx.l), modular_l3(ctx.l)]
    done = 0
    gi = 0
    while done < count:
        F = groups[gi % len(groups)]
        gi += 1
        datum = ProLGroupDatum(ctx, F)
        tab = datum.table()
        ams = F.abelian_maximal_subgroups()
        configs = _prime_configs(datum, ams, rng)
        for pd in configs:
            if done >= count:
                break
            E = euler_factor(pd)
            U = ams[rng.randrange(len(ams))]
            ok = _mackey_det_identity(datum, tab, E, U)
            report.add("mackey-det", f"{F.name},|I|={len(pd.I_els)},"
                       f"Np={pd.Np},U:{U[1]}", ok)
            done += 1
    return report


def _prime_configs(datum, ams, rng):
    F = datum.F
    out = []
    zgen = [z for z in F.center() if z != F.e][0]
    Z3 = F.closure([zgen])
    for I in ams:
        g = min(x for x in range(F.n) if x not in set(I))
        out.append(PrimeDatum(datum, tuple(range(F.n)), I,
                              (g, rng.randrange(3)),
                              rng.choice([2, 7, 11, 13])))
    for Del in ams[:2]:
        for gg in Del:
            if set(F.closure(set(Z3) | {gg})) == set(Del):
                out.append(PrimeDatum(datum, Del, Z3, (gg, 0),
                                      rng.choice([2, 7, 11])))
                break
    out.append(PrimeDatum(datum, Z3, (F.e,), (Z3[1], 0), 2))
    return out


def _mackey_det_identity(datum, tab, E, U):
    ctx = datum.ctx
    usub = datum.subdatum(U)
    primes_below = restrict_k1(E, U)
    subtab = usub.datum.table()
    for j in range(subtab.s):
        chi_p = subtab.irreducibles[j]
        pv = {usub.view.to_parent[i]:
              chi_p.values[usub.datum.cd.class_of[i]]
              for i in range(usub.datum.F.n)}
        ind = induce_values(datum.F, usub.view, pv, tab.level)
        dec = tab.decompose(ind)
        lhs = LocalizedElement.one(ctx)
        for i2, m2 in enumerate(dec):
            for _ in range(m2):
                lhs = lhs * det_euler(E, i2)
        rhs = LocalizedElement.one(ctx)
        for pdn in primes_below:
            rhs = rhs * det_euler(euler_factor(pdn), j)
        if not lhs.eq_at(rhs):
            return False
    return True


def suite_prop51(ctx, rng, p: int = 11, level: int = 7,
                 digits: int = 5) -> CongruenceReport:
    """S-independence at the Det level over Q: the analytic Euler factor
    against the ratio of independently built pseudomeasures."""
    report = CongruenceReport()
    lam_S = stickelberger_lambda(ctx, level=level, S=())
    lam_Sp = stickelberger_lambda(ctx, level=level, S=(p,))
    chis = [DirichletCharacterDatum(ctx, t)
            for t in range(0, ctx.l - 1, 2)]
    if ctx.m >= 1:
        chis += [DirichletCharacterDatum(ctx, 0, 1, 1),
                 DirichletCharacterDatum(ctx, 2, 1, 1)]
    for chi in chis:
        report.extend(s_ratio_check(ctx, lam_S, lam_Sp, chi, p,
                                    digits=digits))
    rep = interpolation_check(lam_Sp, chis[0], [1, 2, 3], min_digits=2)
    report.extend(rep)
    return report


def suite_interpolation(ctx, rng, level: int = 7,
                        n_values=(1, 2, 3, 4, 5)) -> CongruenceReport:
    """Arithmetic pseudomeasure vs the Bernoulli oracle at held-out n."""
    lam = stickelberger_lambda(ctx, level=level, S=())
    report = CongruenceReport()
    report.add("unit-verdict", "mu=0", lam.is_unit_verdict())
    chis = [DirichletCharacterDatum(ctx, t)
            for t in range(0, ctx.l - 1, 2)]
    if ctx.m >= 1:
        chis += [DirichletCharacterDatum(ctx, 0, 1, 1),
                 DirichletCharacterDatum(ctx, 2, 1, 2)]
    for chi in chis:
        report.extend(interpolation_check(lam, chi, list(n_values),
                                          min_digits=2))
    return report


SUITES = {
    "hom": suite_hom,
    "wall": suite_wall,
    "lemma41": suite_lemma41,
    "lemma43": suite_lemma43,
    "prop23": suite_prop23,
    "prop32": suite_prop32,
    "prop42": suite_prop42,
    "prop44": suite_prop44,
    "fact2": suite_fact2,
    "lemma52": suite_lemma52,
    "prop51": suite_prop51,
    "interp": suite_interpolation,
}
