"""Finite groups given by multiplication tables."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .checks import CheckReport
from .errors import ArgumentError, DimensionError


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on indices ``0..order-1`` with ``table[g, h] = gh``."""

    table: np.ndarray
    identity_index: int
    inverse: tuple[int, ...]
    name: str = "G"
    labels: tuple[str, ...] = field(default=())

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @classmethod
    def from_table(cls, table, name: str = "G", labels=(), strict: bool = True) -> "FiniteGroup":
        """Build from a Cayley table, locating the identity and inverses.

        Raises :class:`DimensionError` on a non-square table.  With
        ``strict`` a missing identity or inverse raises :class:`ArgumentError`;
        otherwise placeholders are used so :func:`verify_group` can report
        the defect.
        """
        t = np.asarray(table)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise DimensionError(f"group table must be a nonempty square, got shape {t.shape}")
        n = t.shape[0]
        if not np.issubdtype(t.dtype, np.integer) or t.min() < 0 or t.max() >= n:
            raise ArgumentError(f"table entries must be indices in 0..{n - 1}")
        t = t.astype(int)
        t.setflags(write=False)
        ident = next((e for e in range(n)
                      if np.array_equal(t[e], np.arange(n)) and np.array_equal(t[:, e], np.arange(n))),
                     None)
        if ident is None:
            if strict:
                raise ArgumentError("table has no two-sided identity")
            ident = 0
        inv = []
        for g in range(n):
            hits = [h for h in range(n) if t[g, h] == ident and t[h, g] == ident]
            if not hits:
                if strict:
                    raise ArgumentError(f"element {g} has no inverse")
                hits = [0]
            inv.append(hits[0])
        return cls(t, ident, tuple(inv), name, tuple(labels))

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return self.inverse[g]

    def elements(self) -> range:
        return range(self.order)

    def check_index(self, g) -> int:
        if not isinstance(g, (int, np.integer)) or not 0 <= g < self.order:
            raise ArgumentError(f"group element index {g!r} out of range for order {self.order}")
        return int(g)

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity_index:
            x, k = self.mul(x, g), k + 1
        return k

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, by brute force over generated subsets."""
        found = {frozenset([self.identity_index])}
        frontier = list(found)
        while frontier:
            new = []
            for h in frontier:
                for g in self.elements():
                    if g not in h:
                        s = self._generate(h | {g})
                        if s not in found:
                            found.add(s)
                            new.append(s)
            frontier = new
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def _generate(self, gens) -> frozenset[int]:
        out = {self.identity_index} | set(gens)
        while True:
            more = {self.mul(a, b) for a in out for b in out} - out
            if not more:
                return frozenset(out)
            out |= more

    def subgroup_classes(self) -> list[frozenset[int]]:
        """One representative subgroup per conjugacy class."""
        reps: list[frozenset[int]] = []
        seen: set[frozenset[int]] = set()
        for h in self.subgroups():
            if h in seen:
                continue
            reps.append(h)
            for g in self.elements():
                seen.add(frozenset(self.mul(self.mul(g, x), self.inv(g)) for x in h))
        return reps

    def coset_action(self, subgroup) -> list[list[int]]:
        """Permutations of the left cosets ``G/H`` induced by left multiplication."""
        h = sorted(subgroup)
        cosets: list[frozenset[int]] = []
        for g in self.elements():
            c = frozenset(self.mul(g, x) for x in h)
            if c not in cosets:
                cosets.append(c)
        index = {c: i for i, c in enumerate(cosets)}
        perms = []
        for g in self.elements():
            perms.append([index[frozenset(self.mul(g, x) for x in c)] for c in cosets])
        return perms

    def __repr__(self):
        return f"FiniteGroup({self.name}, order={self.order})"


def verify_group(g: FiniteGroup) -> CheckReport:
    """Latin-square, associativity, identity and inverse checks on the table."""
    rep = CheckReport("group")
    t = g.table
    n = g.order
    if t.shape != (n, n):
        raise DimensionError(f"table shape {t.shape} inconsistent with order {n}")
    full = set(range(n))
    for i in range(n):
        if set(t[i].tolist()) != full:
            rep.fail("latin_square", f"row {i} is not a permutation")
            return rep
        if set(t[:, i].tolist()) != full:
            rep.fail("latin_square", f"column {i} is not a permutation")
            return rep
    for a, b, c in itertools.product(range(n), repeat=3):
        if t[t[a, b], c] != t[a, t[b, c]]:
            rep.fail("associativity", f"({a}*{b})*{c} != {a}*({b}*{c})")
            return rep
    e = g.identity_index
    if not all(t[e, x] == x == t[x, e] for x in range(n)):
        rep.fail("identity", f"index {e} is not a two-sided identity")
    if len(g.inverse) != n:
        rep.fail("inverse", "inverse list has wrong length")
    else:
        for x in range(n):
            if not t[x, g.inverse[x]] == e == t[g.inverse[x], x]:
                rep.fail("inverse", f"inverse of {x} is wrong")
                break
    return rep


def trivial_group() -> FiniteGroup:
    return FiniteGroup.from_table([[0]], name="C1", labels=("e",))


def cyclic_group(n: int) -> FiniteGroup:
    t = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup.from_table(t, name=f"C{n}", labels=tuple(f"r^{i}" for i in range(n)))


def klein_four() -> FiniteGroup:
    t = [[i ^ j for j in range(4)] for i in range(4)]
    return FiniteGroup.from_table(t, name="V4", labels=("e", "a", "b", "ab"))


def symmetric_group(k: int) -> FiniteGroup:
    """``S_k`` with the identity permutation first; ``(gh)(x) = g(h(x))``."""
    perms = sorted(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    t = [[index[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    return FiniteGroup.from_table(t, name=f"S{k}", labels=tuple("".join(map(str, p)) for p in perms))


NAMED_GROUPS = {
    "C1": trivial_group,
    "C2": lambda: cyclic_group(2),
    "C3": lambda: cyclic_group(3),
    "C4": lambda: cyclic_group(4),
    "C6": lambda: cyclic_group(6),
    "V4": klein_four,
    "S3": lambda: symmetric_group(3),
}


def group_by_name(name: str) -> FiniteGroup:
    try:
        return NAMED_GROUPS[name]()
    except KeyError:
        raise ArgumentError(f"unknown group {name!r}; known: {sorted(NAMED_GROUPS)}") from None
