"""Finite l-groups: multiplication tables, conjugacy classes, characters.

Character theory is done in exact integer cyclotomic arithmetic (ExactCyclo,
values in Z[zeta_{l^m}] with m chosen so l^m is the group exponent), never
mod l^N: orthogonality, Frobenius reciprocity and integrality of virtual
decompositions are all checked as exact identities.  Every irreducible comes
with a monomial presentation (a subgroup and a linear character inducing it),
which is what the determinant evaluation downstream consumes; for l-groups
the monomial search always succeeds.

Groups enter as explicit multiplication tables, as power-commutator
presentations (collected into tables), or from the built-in catalog
(Heisenberg and modular groups of order l^3, a modular group of order l^4,
cyclics and products).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import (BadInput, BadSubgroupIndex, CycloLevelTooSmall,
                     DatumError, IncompatibleDatum, NonIntegerDecomposition,
                     NotIntegral)
from .padic import _cyclo_tables


def _pow_val(n: int, l: int):
    """Return a with n = l^a, or raise."""
    a = 0
    while n > 1:
        if n % l:
            raise BadInput(f"{n} is not a power of {l}")
        n //= l
        a += 1
    return a


# ---------------------------------------------------------------------------
# exact cyclotomic integers for character values
# ---------------------------------------------------------------------------


class ExactCyclo:
    """Element of Z[zeta_{l^m}], canonical power-basis coefficients."""

    __slots__ = ("l", "m", "coeffs")

    def __init__(self, l: int, m: int, coeffs):
        self.l = l
        self.m = m
        phi, _, _ = _cyclo_tables(l, m)
        cs = list(coeffs)
        if len(cs) > phi:
            raise BadInput("coefficient vector too long")
        cs += [0] * (phi - len(cs))
        self.coeffs = tuple(cs)

    @classmethod
    def integer(cls, l, m, n):
        return cls(l, m, [n])

    @classmethod
    def zeta(cls, l, m, k=1):
        _, rows, _ = _cyclo_tables(l, m)
        return cls(l, m, rows[k % (l ** m)])

    def _check(self, other):
        if not isinstance(other, ExactCyclo):
            if isinstance(other, int):
                return ExactCyclo.integer(self.l, self.m, other)
            return NotImplemented
        if (self.l, self.m) != (other.l, other.m):
            raise BadInput("cyclotomic level mismatch; embed first")
        return other

    def embed(self, m_new: int) -> "ExactCyclo":
        """Embed into the level-m_new ring via zeta_old = zeta_new^(l^diff)."""
        if m_new == self.m:
            return self
        if m_new < self.m:
            raise CycloLevelTooSmall(f"cannot lower level {self.m} -> {m_new}")
        step = self.l ** (m_new - self.m)
        phi, rows, _ = _cyclo_tables(self.l, m_new)
        lm = self.l ** m_new
        out = [0] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                row = rows[(i * step) % lm]
                for j in range(phi):
                    if row[j]:
                        out[j] += c * row[j]
        return ExactCyclo(self.l, m_new, out)

    def __add__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return ExactCyclo(self.l, self.m,
                          [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return ExactCyclo(self.l, self.m, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        phi, rows, _ = _cyclo_tables(self.l, self.m)
        lm = self.l ** self.m
        conv = [0] * (2 * phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    if b:
                        conv[i + j] += a * b
        out = list(conv[:phi])
        for k in range(phi, 2 * phi - 1):
            c = conv[k]
            if c:
                row = rows[k % lm]
                for j in range(phi):
                    if row[j]:
                        out[j] += c * row[j]
        return ExactCyclo(self.l, self.m, out)

    __rmul__ = __mul__

    def galois(self, a: int) -> "ExactCyclo":
        phi, rows, _ = _cyclo_tables(self.l, self.m)
        lm = self.l ** self.m
        if self.m and a % self.l == 0:
            raise BadInput("galois exponent must be prime to l")
        out = [0] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                row = rows[(i * a) % lm]
                for j in range(phi):
                    if row[j]:
                        out[j] += c * row[j]
        return ExactCyclo(self.l, self.m, out)

    def conj(self):
        return self.galois(-1 % (self.l ** self.m)) if self.m else self

    def divexact(self, n: int) -> "ExactCyclo":
        if any(c % n for c in self.coeffs):
            raise NonIntegerDecomposition(f"not divisible by {n}: {self}")
        return ExactCyclo(self.l, self.m, [c // n for c in self.coeffs])

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_integer(self):
        return all(c == 0 for c in self.coeffs[1:])

    def as_integer(self) -> int:
        if not self.is_integer():
            raise NotIntegral(f"{self} is not a rational integer")
        return self.coeffs[0]

    def __eq__(self, other):
        o = self._check(other)
        if o is NotImplemented:
            return o
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.l, self.m, self.coeffs))

    def __repr__(self):
        return f"ExactCyclo(l={self.l},m={self.m},{list(self.coeffs)})"


# ---------------------------------------------------------------------------
# the group itself
# ---------------------------------------------------------------------------


class FiniteLGroup:
    """A finite l-group given by its multiplication table.

    Elements are 0..n-1; table[x][y] is the product xy.  Group axioms are
    checked on construction (associativity exhaustively up to order 81,
    on random triples beyond that).
    """

    def __init__(self, l: int, table, name: str = "", check: bool = True):
        self.l = l
        self.table = tuple(tuple(row) for row in table)
        self.n = len(self.table)
        self.name = name
        self.a = _pow_val(self.n, l)
        e = None
        for x in range(self.n):
            if all(self.table[x][y] == y for y in range(self.n)) and \
                    all(self.table[y][x] == y for y in range(self.n)):
                e = x
                break
        if e is None:
            raise DatumError("no identity element")
        self.e = e
        inv = [None] * self.n
        for x in range(self.n):
            for y in range(self.n):
                if self.table[x][y] == e:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise DatumError(f"element {x} has no inverse")
        self.inv = tuple(inv)
        if check:
            self._check_axioms()
        self._classes = None
        self._chartab = None

    def _check_axioms(self):
        n = self.n
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise DatumError("multiplication table row is not a bijection")
        if n <= 81:
            triples = itertools.product(range(n), repeat=3)
        else:
            import random
            rng = random.Random(0xA55)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n))
                       for _ in range(2000))
        t = self.table
        for x, y, z in triples:
            if t[t[x][y]][z] != t[x][t[y][z]]:
                raise DatumError(f"associativity fails at {(x, y, z)}")

    # -- basic element ops ---------------------------------------------------

    def mul(self, x, y):
        return self.table[x][y]

    def power(self, x, k: int):
        if k < 0:
            return self.power(self.inv[x], -k)
        out, base = self.e, x
        while k:
            if k & 1:
                out = self.table[out][base]
            base = self.table[base][base]
            k >>= 1
        return out

    def conj(self, x, w):
        """w x w^-1."""
        return self.table[self.table[w][x]][self.inv[w]]

    def comm(self, x, y):
        """x y x^-1 y^-1."""
        return self.table[self.table[x][y]][
            self.table[self.inv[x]][self.inv[y]]]

    def order_of(self, x):
        k, y = 1, x
        while y != self.e:
            y = self.table[y][x]
            k += 1
        return k

    def exponent(self):
        return max(self.order_of(x) for x in range(self.n))

    def cyclo_level(self):
        """Smallest m with exponent | l^m; character values live there."""
        return _pow_val(self.exponent(), self.l)

    # -- subgroup machinery ---------------------------------------------------

    def closure(self, gens):
        seen = set([self.e])
        frontier = [self.e]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return tuple(sorted(seen))

    def center(self):
        return tuple(x for x in range(self.n)
                     if all(self.table[x][y] == self.table[y][x]
                            for y in range(self.n)))

    def derived_subgroup(self):
        gens = set()
        for x in range(self.n):
            for y in range(self.n):
                gens.add(self.comm(x, y))
        return self.closure(gens)

    def is_abelian(self):
        return all(self.table[x][y] == self.table[y][x]
                   for x in range(self.n) for y in range(x))

    def is_normal(self, elements):
        s = set(elements)
        return all(self.conj(x, w) in s for x in s for w in range(self.n))

    def subgroup_view(self, elements) -> "SubgroupView":
        return SubgroupView(self, tuple(sorted(set(elements))))

    def quotient(self, kernel):
        """Quotient by a normal subgroup; returns (Q, projection array)."""
        ker = set(kernel)
        if self.e not in ker or not self.is_normal(ker):
            raise DatumError("kernel is not a normal subgroup")
        coset_of = [None] * self.n
        reps = []
        for x in range(self.n):
            if coset_of[x] is None:
                idx = len(reps)
                reps.append(x)
                for k in ker:
                    coset_of[self.table[x][k]] = idx
        q = len(reps)
        table = [[coset_of[self.table[reps[i]][reps[j]]] for j in range(q)]
                 for i in range(q)]
        return FiniteLGroup(self.l, table, name=f"{self.name}/N",
                            check=False), tuple(coset_of)

    def maximal_subgroups(self):
        """All subgroups of index l (kernels of epimorphisms onto C_l)."""
        frat_gens = set(self.derived_subgroup())
        for x in range(self.n):
            frat_gens.add(self.power(x, self.l))
        frat = self.closure(frat_gens)
        q, proj = self.quotient(frat)
        # q is elementary abelian of rank d; pick a basis by greedy closure
        basis = []
        span = {q.e}
        for x in range(q.n):
            if x not in span:
                basis.append(x)
                span = set(q.closure(set(span) | {x}))
        d = len(basis)
        coords = {}
        for vec in itertools.product(range(self.l), repeat=d):
            el = q.e
            for b, c in zip(basis, vec):
                el = q.table[el][q.power(b, c)]
            coords[el] = vec
        out = []
        seen = set()
        # hyperplanes = kernels of nonzero functionals up to scaling
        for func in itertools.product(range(self.l), repeat=d):
            if all(f == 0 for f in func):
                continue
            if next(f for f in func if f) != 1:  # normalize first nonzero = 1
                continue
            members = tuple(sorted(
                x for x in range(self.n)
                if sum(f * c for f, c in
                       zip(func, coords[proj[x]])) % self.l == 0))
            if members not in seen:
                seen.add(members)
                out.append(members)
        return out

    def abelian_maximal_subgroups(self):
        return [s for s in self.maximal_subgroups()
                if self.subgroup_view(s).group.is_abelian()]

    # -- conjugacy classes -----------------------------------------------------

    def conjugacy_classes(self):
        """Classes sorted by minimal element; reps are those minima."""
        if self._classes is not None:
            return self._classes
        class_of = [None] * self.n
        classes = []
        for x in range(self.n):
            if class_of[x] is None:
                orbit = sorted({self.conj(x, w) for w in range(self.n)})
                for y in orbit:
                    class_of[y] = len(classes)
                classes.append(tuple(orbit))
        order = sorted(range(len(classes)), key=lambda i: classes[i][0])
        classes = [classes[i] for i in order]
        renum = {old: new for new, old in enumerate(order)}
        class_of = [renum[c] for c in class_of]
        self._classes = ConjugacyData(self, tuple(classes), tuple(class_of))
        return self._classes

    # -- characters -----------------------------------------------------------

    def character_table(self):
        if self._chartab is None:
            self._chartab = _build_character_table(self)
        return self._chartab

    def __repr__(self):
        return f"FiniteLGroup({self.name or 'order %d' % self.n})"


@dataclass(frozen=True)
class ConjugacyData:
    group: FiniteLGroup
    classes: tuple
    class_of: tuple

    @property
    def s(self):
        return len(self.classes)

    @property
    def reps(self):
        return tuple(c[0] for c in self.classes)

    @property
    def sizes(self):
        return tuple(len(c) for c in self.classes)

    def class_of_inverse(self, i):
        return self.class_of[self.group.inv[self.reps[i]]]


class SubgroupView:
    """A subgroup re-indexed as a group of its own, with embeddings."""

    def __init__(self, parent: FiniteLGroup, elements):
        self.parent = parent
        self.elements = elements  # sorted tuple of parent indices
        pos = {g: i for i, g in enumerate(elements)}
        if parent.e not in pos:
            raise DatumError("subgroup must contain the identity")
        try:
            table = [[pos[parent.table[x][y]] for y in elements]
                     for x in elements]
        except KeyError:
            raise DatumError("subset is not closed under multiplication")
        self.group = FiniteLGroup(parent.l, table, check=False,
                                  name=f"{parent.name}<sub{len(elements)}>")
        self.to_parent = elements
        self.from_parent = pos

    def contains(self, g):
        return g in self.from_parent


# ---------------------------------------------------------------------------
# class functions and virtual characters
# ---------------------------------------------------------------------------


class ClassFunction:
    """A cyclotomic-valued class function, stored per conjugacy class."""

    __slots__ = ("group", "level", "values")

    def __init__(self, group: FiniteLGroup, level: int, values):
        self.group = group
        self.level = level  # cyclotomic level m of the value ring
        self.values = tuple(values)
        if len(self.values) != group.conjugacy_classes().s:
            raise BadInput("one value per conjugacy class required")

    @classmethod
    def from_function(cls, group, level, fn):
        cd = group.conjugacy_classes()
        return cls(group, level, [fn(r) for r in cd.reps])

    def value(self, g) -> ExactCyclo:
        return self.values[self.group.conjugacy_classes().class_of[g]]

    @property
    def degree(self) -> int:
        cd = self.group.conjugacy_classes()
        return self.values[cd.class_of[self.group.e]].as_integer()

    def at_level(self, m):
        if m == self.level:
            return self
        return ClassFunction(self.group, m, [v.embed(m) for v in self.values])

    def _pair(self, other):
        if self.group is not other.group:
            raise IncompatibleDatum("class functions on different groups")
        m = max(self.level, other.level)
        return self.at_level(m), other.at_level(m), m

    def __add__(self, other):
        a, b, m = self._pair(other)
        return ClassFunction(self.group, m,
                             [x + y for x, y in zip(a.values, b.values)])

    def __sub__(self, other):
        a, b, m = self._pair(other)
        return ClassFunction(self.group, m,
                             [x - y for x, y in zip(a.values, b.values)])

    def __mul__(self, other):
        if isinstance(other, int):
            return ClassFunction(self.group, self.level,
                                 [v * other for v in self.values])
        a, b, m = self._pair(other)
        return ClassFunction(self.group, m,
                             [x * y for x, y in zip(a.values, b.values)])

    __rmul__ = __mul__

    def inner(self, other) -> ExactCyclo:
        """<self, other> = (1/|F|) sum chi(g) psi(g^-1), exact."""
        a, b, m = self._pair(other)
        cd = self.group.conjugacy_classes()
        acc = ExactCyclo.integer(self.group.l, m, 0)
        for i, h in enumerate(cd.sizes):
            acc = acc + a.values[i] * b.values[cd.class_of_inverse(i)] * h
        return acc.divexact(self.group.n)

    def is_irreducible(self):
        v = self.inner(self)
        return v.is_integer() and v.as_integer() == 1

    def galois(self, t: int) -> "ClassFunction":
        return ClassFunction(self.group, self.level,
                             [v.galois(t) for v in self.values])

    def __eq__(self, other):
        if not isinstance(other, ClassFunction):
            return NotImplemented
        a, b, _ = self._pair(other)
        return a.values == b.values

    def __hash__(self):
        return hash((id(self.group), self.level, self.values))

    def sort_key(self):
        return (self.degree, tuple(v.coeffs for v in self.values))


@dataclass(frozen=True)
class MonomialDatum:
    """(subgroup U, linear character of U) inducing an irreducible."""

    subgroup: tuple          # parent element indices
    linear_values: tuple     # ExactCyclo per subgroup element, parent order

    def value_at(self, view: SubgroupView, g_parent):
        return self.linear_values[view.from_parent[g_parent]]


class CharacterTable:
    """All irreducibles of an l-group with monomial presentations."""

    def __init__(self, group, irreducibles, monomials):
        self.group = group
        self.irreducibles = irreducibles    # sorted list of ClassFunction
        self.monomials = monomials          # parallel list of MonomialDatum
        self.level = max(ch.level for ch in irreducibles)
        self.trivial_index = next(
            i for i, ch in enumerate(irreducibles)
            if all(v == ExactCyclo.integer(group.l, ch.level, 1)
                   for v in ch.values))

    @property
    def s(self):
        return len(self.irreducibles)

    def degrees(self):
        return tuple(ch.degree for ch in self.irreducibles)

    def index_of(self, chi: ClassFunction):
        for i, ch in enumerate(self.irreducibles):
            if ch == chi:
                return i
        raise BadInput("not an irreducible of this table")

    def decompose(self, chi: ClassFunction):
        """Integer coordinates of a virtual character; exactness enforced."""
        out = []
        for irr in self.irreducibles:
            c = chi.inner(irr)
            if not c.is_integer():
                raise NonIntegerDecomposition("non-integral multiplicity")
            out.append(c.as_integer())
        recon = None
        for m, irr in zip(out, self.irreducibles):
            term = irr * m
            recon = term if recon is None else recon + term
        if not recon == chi.at_level(recon.level):
            raise NonIntegerDecomposition(
                "decomposition does not reconstruct the class function")
        return tuple(out)

    def galois_permutation(self, t: int):
        """Index permutation chi -> chi^sigma_t (zeta -> zeta^t)."""
        perm = []
        for ch in self.irreducibles:
            perm.append(self.index_of(ch.galois(t)))
        return tuple(perm)


def _linear_characters_abelian(group: FiniteLGroup):
    """All homs of an abelian l-group into mu_{l^m}, m = cyclo level.

    Works from a greedy generating set: exponent vectors come from a BFS
    spanning tree, relation rows from its edges plus generator orders, and
    characters are the nullspace of the relation matrix mod the exponent.
    """
    if not group.is_abelian():
        raise BadInput("linear character enumeration needs an abelian group")
    m = group.cyclo_level()
    exp = group.exponent()
    gens = []
    span = {group.e}
    for x in range(group.n):
        if x not in span:
            gens.append(x)
            span = set(group.closure(set(span) | {x}))
    k = len(gens)
    if k == 0:
        return [{group.e: ExactCyclo.integer(group.l, 0, 1)}]
    # BFS exponent vectors
    vec = {group.e: (0,) * k}
    frontier = [group.e]
    rel_rows = []
    while frontier:
        x = frontier.pop()
        for i, g in enumerate(gens):
            y = group.table[x][g]
            new = list(vec[x])
            new[i] += 1
            new = tuple(new)
            if y in vec:
                rel_rows.append(tuple(a - b for a, b in zip(new, vec[y])))
            else:
                vec[y] = new
                frontier.append(y)
    for i, g in enumerate(gens):
        row = [0] * k
        row[i] = group.order_of(g)
        rel_rows.append(tuple(row))
    # nullspace mod exp by brute force (desk scale: exp^k <= a few thousand)
    sols = []
    for t in itertools.product(range(exp), repeat=k):
        if all(sum(r * ti for r, ti in zip(row, t)) % exp == 0
               for row in rel_rows):
            sols.append(t)
    if len(sols) != group.n:
        raise DatumError("linear character count mismatch; bad group data")
    zmul = (group.l ** m) // exp
    chars = []
    for t in sols:
        values = {}
        for x in range(group.n):
            expo = sum(ti * vi for ti, vi in zip(t, vec[x])) % exp
            values[x] = ExactCyclo.zeta(group.l, m, expo * zmul)
        chars.append(values)
    return chars


def linear_characters(group: FiniteLGroup):
    """Linear characters of any l-group (through its abelianization).

    Returned as dicts element -> ExactCyclo at the group's cyclo level.
    """
    der = group.derived_subgroup()
    q, proj = group.quotient(der)
    level = group.cyclo_level()
    return [{x: ch[proj[x]].embed(level) for x in range(group.n)}
            for ch in _linear_characters_abelian(q)]


def induce_values(group: FiniteLGroup, view: SubgroupView, values: dict,
                  level: int) -> ClassFunction:
    """ind_U^F of a character given by values on U (parent indices)."""
    cd = group.conjugacy_classes()
    zero = ExactCyclo.integer(group.l, level, 0)
    out = []
    for rep in cd.reps:
        acc = zero
        for x in range(group.n):
            y = group.conj(rep, group.inv[x])  # x^-1 rep x
            if view.contains(y):
                acc = acc + values[y].embed(level)
        out.append(acc.divexact(len(view.elements)))
    return ClassFunction(group, level, out)


def _build_character_table(group: FiniteLGroup) -> CharacterTable:
    cd = group.conjugacy_classes()
    level = group.cyclo_level()
    found = []       # list of (ClassFunction, MonomialDatum)
    seen_values = set()

    def add(chi, datum):
        key = tuple(v.coeffs for v in chi.at_level(level).values)
        if key not in seen_values:
            seen_values.add(key)
            found.append((chi.at_level(level), datum))

    full = group.subgroup_view(range(group.n))
    for values in linear_characters(group):
        chi = ClassFunction(group, level,
                            [values[r].embed(level) for r in cd.reps])
        add(chi, MonomialDatum(tuple(range(group.n)),
                               tuple(values[g].embed(level)
                                     for g in range(group.n))))

    # induce linear characters up maximal chains until the table is full
    layers = [group.subgroup_view(s) for s in group.maximal_subgroups()]
    depth = 0
    while sum(ch.degree ** 2 for ch, _ in found) < group.n:
        depth += 1
        if depth > group.a:
            raise DatumError("monomial search failed; inconsistent group")
        next_layers = []
        for view in layers:
            for values in linear_characters(view.group):
                pv = {view.to_parent[i]: values[i]
                      for i in range(view.group.n)}
                chi = induce_values(group, view, pv, level)
                if chi.is_irreducible():
                    add(chi, MonomialDatum(
                        view.elements,
                        tuple(pv[g].embed(level) if pv[g].m < level else pv[g]
                              for g in view.elements)))
            if sum(ch.degree ** 2 for ch, _ in found) >= group.n:
                break
        else:
            for view in layers:
                for s in view.group.maximal_subgroups():
                    elems = tuple(sorted(view.to_parent[i] for i in s))
                    next_layers.append(group.subgroup_view(elems))
            layers = next_layers
            continue
        break

    if sum(ch.degree ** 2 for ch, _ in found) != group.n or \
            len(found) != cd.s:
        raise DatumError("character table incomplete or overcomplete")
    found.sort(key=lambda pair: pair[0].sort_key())
    return CharacterTable(group, [ch for ch, _ in found],
                          [d for _, d in found])


# ---------------------------------------------------------------------------
# character operations
# ---------------------------------------------------------------------------


def adams_psi_l(chi: ClassFunction):
    """psi_l: chi -> (g -> chi(g^l)), with its integer decomposition."""
    g = chi.group
    cd = g.conjugacy_classes()
    values = [chi.values[cd.class_of[g.power(r, g.l)]] for r in cd.reps]
    out = ClassFunction(g, chi.level, values)
    table = g.character_table()
    return out, table.decompose(out)


def restrict_cf(chi: ClassFunction, view: SubgroupView) -> ClassFunction:
    cd = view.group.conjugacy_classes()
    return ClassFunction(view.group, chi.level,
                         [chi.value(view.to_parent[r]) for r in cd.reps])


def inflate_cf(chi_q: ClassFunction, group: FiniteLGroup,
               proj) -> ClassFunction:
    cd = group.conjugacy_classes()
    return ClassFunction(group, chi_q.level,
                         [chi_q.values[
                             chi_q.group.conjugacy_classes().class_of[proj[r]]]
                          for r in cd.reps])


def deflate_cf(chi: ClassFunction, group_q: FiniteLGroup, proj,
               kernel) -> ClassFunction:
    """defl(chi)(gN) = (1/|N|) sum_{n in N} chi(gn); left adjoint of infl."""
    g = chi.group
    cdq = group_q.conjugacy_classes()
    reps_parent = {}
    for x in range(g.n):
        reps_parent.setdefault(proj[x], x)
    out = []
    for r in cdq.reps:
        x = reps_parent[r]
        acc = ExactCyclo.integer(g.l, chi.level, 0)
        for nn in kernel:
            acc = acc + chi.value(g.table[x][nn])
        out.append(acc.divexact(len(kernel)))
    return ClassFunction(group_q, chi.level, out)


def transfer_ver(group: FiniteLGroup, subgroup, a_rep, g):
    """Transfer F -> U for [F:U] = l with coset generator a_rep.

    For g in U the product of the l conjugates g^(a^i); otherwise g^l.
    The target subgroup must be abelian for the product to be canonical.
    """
    sub = set(subgroup)
    if a_rep in sub:
        raise BadSubgroupIndex("coset representative lies in the subgroup")
    if len(sub) * group.l != group.n:
        raise BadSubgroupIndex(
            f"need index l: |F|={group.n}, |U|={len(sub)}")
    if g in sub:
        out = group.e
        w = group.e
        for _ in range(group.l):
            out = group.table[out][group.conj(g, group.inv[w])]
            w = group.table[w][a_rep]
        return out
    return group.power(g, group.l)


def ver_on_classfunction(group: FiniteLGroup, subgroup, a_rep,
                         values_on_sub: dict, level: int) -> ClassFunction:
    """chi' o ver as a class function on F, chi' linear on the subgroup."""
    cd = group.conjugacy_classes()
    out = []
    for r in cd.reps:
        t = transfer_ver(group, subgroup, a_rep, r)
        v = values_on_sub[t]
        out.append(v.embed(level) if v.m < level else v)
    return ClassFunction(group, level, out)


def center_ratio_check(group: FiniteLGroup) -> int:
    """[F:Z(F)] / (l * |[F,F]|) as an exact integer (nonabelian F)."""
    if group.is_abelian():
        raise BadInput("ratio is about nonabelian groups")
    z = len(group.center())
    der = len(group.derived_subgroup())
    num = group.n // z
    den = group.l * der
    if num % den:
        raise NotIntegral(f"[F:Z]={num} not divisible by l*|[F,F]|={den}")
    return num // den


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def _table_from_elements(elems, mul, name, l):
    idx = {e: i for i, e in enumerate(elems)}
    table = [[idx[mul(x, y)] for y in elems] for x in elems]
    return FiniteLGroup(l, table, name=name, check=False)


@lru_cache(maxsize=None)
def heisenberg(l: int) -> FiniteLGroup:
    """Upper unitriangular 3x3 matrices over F_l; order l^3, exponent l."""
    elems = [(a, b, c) for a in range(l) for b in range(l) for c in range(l)]

    def mul(x, y):
        return ((x[0] + y[0]) % l, (x[1] + y[1]) % l,
                (x[2] + y[2] + x[0] * y[1]) % l)

    return _table_from_elements(elems, mul, f"heisenberg{l ** 3}", l)


@lru_cache(maxsize=None)
def modular_l3(l: int) -> FiniteLGroup:
    """The modular group of order l^3: C_{l^2} x| C_l, exponent l^2."""
    l2 = l * l
    elems = [(x, y) for x in range(l2) for y in range(l)]

    def mul(u, v):
        x, y = u
        xp, yp = v
        return ((x + xp * pow(1 + l, y, l2)) % l2, (y + yp) % l)

    return _table_from_elements(elems, mul, f"m{l ** 3}", l)


@lru_cache(maxsize=None)
def modular_l4(l: int) -> FiniteLGroup:
    """C_{l^2} x| C_{l^2} with b a b^-1 = a^(1+l); order l^4, class 2."""
    l2 = l * l
    elems = [(x, y) for x in range(l2) for y in range(l2)]

    def mul(u, v):
        x, y = u
        xp, yp = v
        return ((x + xp * pow(1 + l, y, l2)) % l2, (y + yp) % l2)

    return _table_from_elements(elems, mul, f"m{l ** 4}", l)


@lru_cache(maxsize=None)
def cyclic(l: int, k: int) -> FiniteLGroup:
    n = l ** k
    return FiniteLGroup(l, [[(x + y) % n for y in range(n)] for x in range(n)],
                        name=f"c{n}", check=False)


def direct_product(g1: FiniteLGroup, g2: FiniteLGroup) -> FiniteLGroup:
    if g1.l != g2.l:
        raise BadInput("factors must share l")
    elems = [(x, y) for x in range(g1.n) for y in range(g2.n)]

    def mul(u, v):
        return (g1.table[u[0]][v[0]], g2.table[u[1]][v[1]])

    return _table_from_elements(elems, mul, f"{g1.name}x{g2.name}", g1.l)


def catalog_group(name: str, l: int | None = None) -> FiniteLGroup:
    """Resolve a catalog name like heisenberg27, m27, m81, c9 or c3xc3."""
    name = name.strip().lower()
    if "x" in name and name.startswith("c"):
        parts = name.split("x")
        groups = [catalog_group(p) for p in parts]
        g = groups[0]
        for h in groups[1:]:
            g = direct_product(g, h)
        return g
    if name.startswith("heisenberg"):
        order = int(name[len("heisenberg"):])
        ll = _nth_root(order, 3)
        return heisenberg(ll)
    if name.startswith("m"):
        order = int(name[1:])
        for ll in _prime_candidates(order):
            if ll ** 3 == order:
                return modular_l3(ll)
            if ll ** 4 == order:
                return modular_l4(ll)
        raise BadInput(f"no modular catalog group of order {order}")
    if name.startswith("c"):
        n = int(name[1:])
        for ll in _prime_candidates(n):
            k = 0
            nn = n
            while nn % ll == 0:
                nn //= ll
                k += 1
            if nn == 1:
                return cyclic(ll, k)
        raise BadInput(f"{n} is not an odd prime power")
    raise BadInput(f"unknown catalog group {name!r}")


def _nth_root(order, k):
    ll = round(order ** (1.0 / k))
    for cand in (ll - 1, ll, ll + 1):
        if cand > 1 and cand ** k == order:
            return cand
    raise BadInput(f"{order} is not a perfect {k}-th power")


def _prime_candidates(n):
    out = []
    for p in (3, 5, 7, 11, 13):
        if n % p == 0:
            out.append(p)
    return out


def nonabelian_catalog(l: int = 3):
    """The groups every nonabelian-suite check runs over."""
    return [heisenberg(l), modular_l3(l), modular_l4(l)]


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def write_group(group: FiniteLGroup) -> str:
    lines = [f"{group.l} {group.a}", "table"]
    for row in group.table:
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def read_group(text: str) -> FiniteLGroup:
    """Parse the group file format: header 'l a', then a table or pc block."""
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise BadInput("empty group file")
    head = lines[0].split()
    if len(head) != 2:
        raise BadInput("header must be 'l a'")
    l, a = int(head[0]), int(head[1])
    n = l ** a
    if len(lines) < 2:
        raise BadInput("missing body")
    if lines[1] == "table":
        rows = []
        for k, ln in enumerate(lines[2:2 + n]):
            row = [int(x) for x in ln.split()]
            if len(row) != n or any(x < 0 or x >= n for x in row):
                raise BadInput(f"table row {k}: need {n} entries in [0,{n})")
            rows.append(row)
        if len(rows) != n:
            raise BadInput(f"expected {n} table rows, got {len(rows)}")
        return FiniteLGroup(l, rows)
    if lines[1] == "pc":
        return _group_from_pc(l, a, lines[2:])
    raise BadInput("body must start with 'table' or 'pc'")


def _group_from_pc(l, a, lines):
    """Collect a power-commutator presentation into a full table.

    Relations: 'pow i : e_0 .. e_{a-1}' gives g_i^l as a normal word
    (support on indices > i), 'conj j i : e_0 ..' gives g_i^-1 g_j g_i
    for i < j (support on indices >= j).  Omitted conjugations commute.
    """
    pow_rel = {}
    conj_rel = {}
    for ln in lines:
        head, _, body = ln.partition(":")
        parts = head.split()
        word = tuple(int(x) for x in body.split())
        if len(word) != a:
            raise BadInput(f"relation word needs {a} exponents: {ln!r}")
        if parts[0] == "pow" and len(parts) == 2:
            i = int(parts[1])
            if any(word[k] and k <= i for k in range(a)):
                raise BadInput(f"pow word must use indices > {i}")
            pow_rel[i] = word
        elif parts[0] == "conj" and len(parts) == 3:
            j, i = int(parts[1]), int(parts[2])
            if i >= j:
                raise BadInput("conj j i requires i < j")
            if any(word[k] and k < j for k in range(a)):
                raise BadInput(f"conj word must use indices >= {j}")
            conj_rel[(j, i)] = word
        else:
            raise BadInput(f"bad pc relation {ln!r}")

    def idx(vec):
        out = 0
        for e in vec:
            out = out * l + e
        return out

    def unidx(x):
        vec = [0] * a
        for i in range(a - 1, -1, -1):
            vec[i] = x % l
            x //= l
        return tuple(vec)

    from functools import lru_cache as _lru

    @_lru(maxsize=None)
    def mul_gen(x: int, j: int) -> int:
        """normal_form(x) * g_j, collected."""
        vec = list(unidx(x))
        top = max((k for k in range(a) if vec[k]), default=-1)
        if top <= j:
            vec[j] += 1
            if vec[j] == l:
                vec[j] = 0
                y = idx(tuple(vec))
                word = pow_rel.get(j, (0,) * a)
                return mul_word(y, word)
            return idx(tuple(vec))
        # x = y * g_top; g_top g_j = g_j (g_j^-1 g_top g_j)
        vec[top] -= 1
        y = idx(tuple(vec))
        z = mul_gen(y, j)
        word = conj_rel.get((top, j))
        if word is None:
            w = [0] * a
            w[top] = 1
            word = tuple(w)
        return mul_word(z, word)

    def mul_word(x: int, word) -> int:
        for k in range(a):
            for _ in range(word[k] % l):
                x = mul_gen(x, k)
        return x

    n = l ** a
    table = []
    for x in range(n):
        vx = unidx(x)
        row = []
        for y in range(n):
            row.append(mul_word(x, unidx(y)))
        table.append(row)
    return FiniteLGroup(l, table)
