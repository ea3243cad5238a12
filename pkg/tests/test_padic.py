import random

import pytest
from hypothesis import given, settings, strategies as st

from iwacalc.context import PrecisionContext
from iwacalc.errors import BadInput, NonUnit, NotOneUnit
from iwacalc.padic import (CycloScalar, PadicScalar, invert, log_1unit,
                           teichmuller)

CTX53 = PrecisionContext(5, 3, 6, m=1)
CTX50 = PrecisionContext(5, 3, 6, m=0)
CTX32 = PrecisionContext(3, 6, 6, m=2)


def test_invert_identity():
    one = CycloScalar.one(CTX53)
    assert invert(one) == one


def test_invert_two_mod_125():
    # 2 * 63 = 126 = 1 mod 125 (extended-Euclid oracle value)
    got = invert(CycloScalar.from_int(CTX53, 2))
    assert got == CycloScalar.from_int(CTX53, 63)


def test_invert_zeta_is_power():
    z = CycloScalar.zeta_pow(CTX53, 1)
    assert invert(z) == CycloScalar.zeta_pow(CTX53, 4)
    assert invert(z) * z == 1


def test_invert_rejects_nonunit():
    with pytest.raises(NonUnit):
        invert(CycloScalar.from_int(CTX53, 5))
    pi = CycloScalar.zeta_pow(CTX53, 1) - CycloScalar.one(CTX53)
    with pytest.raises(NonUnit):
        invert(pi)


def test_teichmuller_values():
    ctx = PrecisionContext(5, 2, 4)
    assert teichmuller(ctx, 1).residue == 1
    # 7^4 = 2401 = 1 mod 25 and 7 = 2 mod 5
    assert teichmuller(ctx, 2).residue == 7
    assert teichmuller(ctx, 4).residue == 24  # lift of -1


def test_teichmuller_is_root_of_unity_and_multiplicative():
    ctx = PrecisionContext(5, 6, 4)
    for a in range(1, 10):
        if a % 5 == 0:
            continue
        t = teichmuller(ctx, a)
        assert (t ** 4).residue == 1
        assert t.residue % 5 == a % 5
    for a in (2, 3, 7):
        for b in (2, 4, 11):
            assert teichmuller(ctx, a) * teichmuller(ctx, b) == \
                teichmuller(ctx, a * b)


def test_teichmuller_rejects_multiples_of_l():
    with pytest.raises(BadInput):
        teichmuller(CTX50, 10)


def test_log_one_is_zero():
    assert log_1unit(CycloScalar.one(CTX50)).is_zero_at_precision()


def test_log_six_mod_125():
    # partial sums of log(1+5) in exact rationals reduce to 55 mod 125
    got = log_1unit(CycloScalar.from_int(CTX50, 6))
    assert got == CycloScalar.from_int(CTX50, 55)


def test_log_rejects_non_one_unit():
    with pytest.raises(NotOneUnit):
        log_1unit(CycloScalar.from_int(CTX50, 2))


def test_log_homomorphism():
    rng = random.Random(7)
    for _ in range(10):
        x = CycloScalar(CTX53, [1 + 5 * rng.randrange(25),
                                5 * rng.randrange(25),
                                5 * rng.randrange(25),
                                5 * rng.randrange(25)])
        y = CycloScalar(CTX53, [1 + 5 * rng.randrange(25),
                                5 * rng.randrange(25), 0, 0])
        assert log_1unit(x * y).eq_at(log_1unit(x) + log_1unit(y), digits=2)
        assert log_1unit(x * x).eq_at(log_1unit(x) * 2, digits=2)


def test_log_injective_on_one_units():
    # log is an isometry on 1 + l Z_l (l odd): it separates any two
    # 1-units that are distinguishable at the post-loss precision N - 1
    units = [CycloScalar.from_int(CTX50, 1 + 5 * a) for a in range(25)]
    logs = [log_1unit(x) for x in units]
    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            diff_v = (units[i] - units[j]).valuation()
            if diff_v is not None and diff_v < CTX50.N - 1:
                assert not logs[i].eq_at(logs[j]), (i, j)
                assert (logs[i] - logs[j]).valuation() == diff_v


def test_valuations():
    z = CycloScalar.zeta_pow(CTX53, 1)
    pi = z - CycloScalar.one(CTX53)
    assert pi.valuation() == 1
    assert CycloScalar.from_int(CTX53, 5).valuation() == 4
    assert (pi * pi).valuation() == 2
    assert CycloScalar.zero(CTX53).valuation() is None
    # additivity below precision
    x = pi * CycloScalar.from_int(CTX53, 5)
    assert x.valuation() == 5


def test_valuation_m2():
    z = CycloScalar.zeta_pow(CTX32, 1)
    pi = z - CycloScalar.one(CTX32)
    assert CTX32.phi == 6
    assert pi.valuation() == 1
    assert CycloScalar.from_int(CTX32, 3).valuation() == 6
    # zeta_9^3 is a primitive cube root: v(zeta_3 - 1) = 3
    z3 = CycloScalar.zeta_pow(CTX32, 3)
    assert (z3 - CycloScalar.one(CTX32)).valuation() == 3


def test_precision_drops_on_l_division():
    x = PadicScalar(CTX50, 50)
    y = x.divexact_l(1)
    assert y.residue == 10 and y.prec == 2


small_ints = st.integers(min_value=-200, max_value=200)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_ints, min_size=4, max_size=4),
       st.lists(small_ints, min_size=4, max_size=4),
       st.lists(small_ints, min_size=4, max_size=4))
def test_ring_axioms(a, b, c):
    x = CycloScalar(CTX53, a)
    y = CycloScalar(CTX53, b)
    z = CycloScalar(CTX53, c)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@settings(max_examples=40, deadline=None)
@given(st.lists(small_ints, min_size=6, max_size=6),
       st.lists(small_ints, min_size=6, max_size=6))
def test_valuation_multiplicative_m2(a, b):
    x = CycloScalar(CTX32, a)
    y = CycloScalar(CTX32, b)
    vx, vy = x.valuation(), y.valuation()
    if vx is None or vy is None:
        return
    vxy = (x * y).valuation()
    if vx + vy < CTX32.phi * (CTX32.N - 1):
        assert vxy == vx + vy


def test_galois_is_ring_hom():
    rng = random.Random(3)
    for a in (2, 4, 7, 8):
        x = CycloScalar(CTX32, [rng.randrange(100) for _ in range(6)])
        y = CycloScalar(CTX32, [rng.randrange(100) for _ in range(6)])
        assert (x * y).galois(a) == x.galois(a) * y.galois(a)
        assert (x + y).galois(a) == x.galois(a) + y.galois(a)
    z = CycloScalar.zeta_pow(CTX32, 1)
    assert z.galois(4) == CycloScalar.zeta_pow(CTX32, 4)
