import random

import pytest

from iwacalc.context import PrecisionContext
from iwacalc.errors import BadInput, InertiaNotNormalInD
from iwacalc.lgroup import heisenberg, induce_values
from iwacalc.series import IwasawaSeries, LocalizedElement
from iwacalc.algebra import ProLGroupDatum
from iwacalc.euler import (PrimeDatum, abelian_euler_factor, binomial_series,
                           det_euler, det_euler_linear_formula, euler_factor,
                           frobenius_exponent, parse_prime_datum,
                           restrict_k1, s_ratio_check)
from iwacalc.lfunc import (DirichletCharacterDatum, stickelberger_lambda,
                           _dlog_unit)

CTX = PrecisionContext(3, 6, 8, m=1)
RNG = random.Random(31)


@pytest.fixture(scope="module")
def datum():
    return ProLGroupDatum(CTX, heisenberg(3))


@pytest.fixture(scope="module")
def pd_full(datum):
    # undecomposed prime: D = G, inertia an abelian maximal, Frobenius
    # generating the cyclic quotient
    I = datum.F.abelian_maximal_subgroups()[0]
    g = min(x for x in range(datum.F.n) if x not in set(I))
    return PrimeDatum(datum, tuple(range(datum.F.n)), I, (g, 0), Np=2)


def test_validation(datum):
    F = datum.F
    I = F.abelian_maximal_subgroups()[0]
    g = min(x for x in range(F.n) if x not in set(I))
    with pytest.raises(BadInput):
        PrimeDatum(datum, tuple(range(F.n)), I, (g, 0), Np=3)  # Np | l
    with pytest.raises(InertiaNotNormalInD):
        PrimeDatum(datum, I, tuple(range(F.n)), (g, 0), Np=2)  # I > D
    # Frobenius failing to generate D over I
    z = next(x for x in F.center() if x != F.e)
    with pytest.raises(BadInput):
        PrimeDatum(datum, tuple(range(F.n)), F.closure([z]), (z, 0), Np=2)


def test_euler_element_shape(datum, pd_full):
    E = euler_factor(pd_full)
    assert E.element.lshift == 2  # 1/|I| = 1/9
    # unramified case is integral
    zsub = datum.F.closure([next(x for x in datum.F.center()
                                 if x != datum.F.e)])
    pd0 = PrimeDatum(datum, zsub, (datum.F.e,), (zsub[1], 0), Np=5)
    E0 = euler_factor(pd0)
    assert E0.element.lshift == 0


def test_linear_formula_agreement(datum, pd_full):
    E = euler_factor(pd_full)
    tab = datum.table()
    for j in range(tab.s):
        if tab.irreducibles[j].degree == 1:
            assert det_euler(E, j).eq_at(det_euler_linear_formula(E, j))


def test_ramified_branch_gives_one(datum, pd_full):
    # characters nontrivial on inertia contribute factor 1
    E = euler_factor(pd_full)
    tab = datum.table()
    I = set(pd_full.I_els)
    from iwacalc.algebra import exact_to_cyclo
    one = LocalizedElement.one(CTX)
    seen_one = 0
    for j in range(tab.s):
        chi = tab.irreducibles[j]
        if chi.degree != 1:
            continue
        triv_on_I = all(exact_to_cyclo(CTX, chi.value(i)).eq_at(1)
                        for i in I)
        if not triv_on_I:
            assert det_euler(E, j).eq_at(one)
            seen_one += 1
    assert seen_one > 0


def test_conjugation_invariance(datum, pd_full):
    E = euler_factor(pd_full)
    tab = datum.table()
    for t in (5, 11):
        E2 = euler_factor(pd_full.conjugate(t))
        assert all(det_euler(E, j).eq_at(det_euler(E2, j))
                   for j in range(tab.s))


def _mackey_ok(datum, E, U):
    ctx = datum.ctx
    tab = datum.table()
    usub = datum.subdatum(U)
    below = restrict_k1(E, U)
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
        for pdn in below:
            rhs = rhs * det_euler(euler_factor(pdn), j)
        if not lhs.eq_at(rhs):
            return False
    return True


def test_mackey_identity(datum, pd_full):
    E = euler_factor(pd_full)
    ams = datum.F.abelian_maximal_subgroups()
    assert all(_mackey_ok(datum, E, U) for U in ams)
    # residue degrees multiply correctly for the inert direction
    below = restrict_k1(E, pd_full.I_els)
    assert sorted(p.Np for p in below) in ([8], [2, 2, 2])


def test_frobenius_exponent_properties():
    ctx5 = PrecisionContext(5, 8, 6, m=1)
    b = frobenius_exponent(ctx5, 11, 6)
    for w in (1, 2, 3):
        assert b.residue % 5 ** w == _dlog_unit(5, 11, w, 8)
    assert frobenius_exponent(ctx5, 6, 6).eq_at(1, digits=6)
    b2 = frobenius_exponent(ctx5, 121, 6)
    assert b2.eq_at(b * 2, digits=6)


def test_binomial_series_matches_integer_exponent():
    ctx5 = PrecisionContext(5, 8, 6, m=0)
    from iwacalc.padic import PadicScalar
    for k in (0, 1, 7, 30):
        got = binomial_series(ctx5, PadicScalar(ctx5, k))
        want = IwasawaSeries.one_plus_T_pow(ctx5, k)
        assert got.eq_at(want, digits=5)


def test_s_ratio(datum):
    ctx5 = PrecisionContext(5, 6, 6, m=1)
    lam_S = stickelberger_lambda(ctx5, level=6, S=())
    lam_Sp = stickelberger_lambda(ctx5, level=6, S=(11,))
    for chi in (DirichletCharacterDatum(ctx5, 0),
                DirichletCharacterDatum(ctx5, 2),
                DirichletCharacterDatum(ctx5, 2, 1, 1)):
        rep = s_ratio_check(ctx5, lam_S, lam_Sp, chi, 11, digits=4)
        assert rep.passed


def test_prime_file_block(datum):
    U = datum.F.abelian_maximal_subgroups()[0]
    gens = ",".join(str(x) for x in U)
    g = min(x for x in range(datum.F.n) if x not in set(U))
    pd = parse_prime_datum(datum,
                           f"prime 11 D=all I=gen:{gens} frob={g}:1")
    assert pd.Np == 11 and pd.frob == (g, 1)
    assert set(pd.I_els) == set(U)
    with pytest.raises(BadInput):
        parse_prime_datum(datum, "prjme 11")
