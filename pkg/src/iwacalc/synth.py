"""Seeded generators for synthetic test data.

Every randomized suite draws from a caller-supplied random.Random so that
identical seeds give byte-identical reports.
"""

from __future__ import annotations

import random

from .algebra import AlgebraElement, ProLGroupDatum, TraceClassElement
from .series import IwasawaSeries, LocalizedElement


def rand_series(ctx, rng: random.Random, content: int = 0) -> IwasawaSeries:
    scale = ctx.l ** content
    return IwasawaSeries.from_ints(
        ctx, [scale * rng.randrange(ctx.modulus // scale or 1)
              for _ in range(ctx.D + 1)])


def rand_unit(datum: ProLGroupDatum, rng: random.Random) -> AlgebraElement:
    """A random unit of the completed group algebra (integral, invertible)."""
    x = AlgebraElement(datum,
                       [rand_series(datum.ctx, rng)
                        for _ in range(datum.F.n)])
    v = x.augmentation().valuation()
    if v is None or v > 0:
        x = x + 1
    return x


def rand_trace_element(datum: ProLGroupDatum,
                       rng: random.Random) -> TraceClassElement:
    return TraceClassElement(
        datum, [LocalizedElement(rand_series(datum.ctx, rng))
                for _ in range(datum.cd.s)])


def rand_one_unit_series(ctx, rng: random.Random) -> IwasawaSeries:
    """1 + l * (random series): the condition-3 shape."""
    return IwasawaSeries.one(ctx) + rand_series(ctx, rng).scale(ctx.l)
