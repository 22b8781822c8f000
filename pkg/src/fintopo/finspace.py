"""Finite topological spaces encoded as specialization preorders.

le(x, y) holds when x lies in the closure of {y}. Open sets are exactly
the up-closed sets of this relation, closed sets the down-closed ones,
and U(x) = {y : le(x, y)} is the smallest open set containing x. Finite
topologies and preorders determine each other bijectively, so every
operator below is a bitmask computation over order facts.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations

from .errors import (
    MissingExtremes,
    NotAPreorder,
    NotATopology,
    PointOutOfRange,
    SizeGuardExceeded,
)


def max_points_guard() -> int:
    return int(os.environ.get("FINTOPO_MAX_POINTS", "62"))


def bits(mask: int):
    """Yield the set bit positions of mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


class FiniteSpace:
    """A finite topological space, stored as minimal-open-neighborhood masks.

    up[x] is the bitmask of U(x) = {y : le(x, y)}; down[x] is the bitmask
    of the point closure cl{x} = {y : le(y, x)}. Instances are immutable
    and safe to share between workers.
    """

    __slots__ = ("n", "up", "down", "full", "_hash", "__dict__")

    def __init__(self, n: int, up, *, max_points: int | None = None):
        limit = max_points_guard() if max_points is None else max_points
        if n > limit:
            raise SizeGuardExceeded(f"{n} points exceeds the guard of {limit}")
        up = tuple(up)
        if len(up) != n:
            raise NotAPreorder(f"expected {n} neighborhood masks, got {len(up)}")
        full = (1 << n) - 1
        for x in range(n):
            if up[x] & ~full:
                raise PointOutOfRange(f"mask of point {x} mentions points >= {n}")
            if not (up[x] >> x) & 1:
                raise NotAPreorder(f"relation is not reflexive at {x}", witness=(x, x))
        for x in range(n):
            for y in bits(up[x]):
                if up[y] | up[x] != up[x]:
                    z = next(bits(up[y] & ~up[x]))
                    raise NotAPreorder(
                        f"relation is not transitive: le({x},{y}) and le({y},{z}) "
                        f"but not le({x},{z})",
                        witness=(x, y, z),
                    )
        down = [0] * n
        for x in range(n):
            for y in bits(up[x]):
                down[y] |= 1 << x
        self.n = n
        self.up = up
        self.down = tuple(down)
        self.full = full
        self._hash = hash((n, up))

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_le_pairs(cls, n: int, pairs, *, close: bool = False) -> "FiniteSpace":
        """Build from le(x, y) pairs; reflexive pairs are implied.

        With close=True the transitive closure is taken instead of
        requiring the pair list to be transitively complete.
        """
        up = [1 << x for x in range(n)]
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise PointOutOfRange(f"pair ({x},{y}) outside 0..{n - 1}")
            up[x] |= 1 << y
        if close:
            changed = True
            while changed:
                changed = False
                for x in range(n):
                    acc = up[x]
                    for y in bits(up[x]):
                        acc |= up[y]
                    if acc != up[x]:
                        up[x] = acc
                        changed = True
        return cls(n, up)

    @classmethod
    def from_open_family(cls, n: int, opens) -> "FiniteSpace":
        """Build the unique space whose open sets are exactly the given family.

        The family is validated: it must contain the empty and full sets
        and be closed under pairwise union and intersection.
        """
        full = (1 << n) - 1
        masks = set()
        for o in opens:
            mask = o if isinstance(o, int) else _mask_from_iter(o, n)
            masks.add(mask)
        if 0 not in masks or full not in masks:
            raise MissingExtremes("open family must contain the empty and full sets")
        for a, b in combinations(sorted(masks), 2):
            if a | b not in masks:
                raise NotATopology(
                    f"family is missing the union of {a:#x} and {b:#x}",
                    witness=(a, b, "union"),
                )
            if a & b not in masks:
                raise NotATopology(
                    f"family is missing the intersection of {a:#x} and {b:#x}",
                    witness=(a, b, "intersection"),
                )
        up = []
        for x in range(n):
            # U(x) = intersection of all opens containing x
            acc = full
            for mask in masks:
                if (mask >> x) & 1:
                    acc &= mask
            up.append(acc)
        return cls(n, up)

    @classmethod
    def discrete(cls, n: int) -> "FiniteSpace":
        return cls(n, [1 << x for x in range(n)])

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteSpace":
        full = (1 << n) - 1
        return cls(n, [full] * n) if n else cls(0, [])

    @classmethod
    def sierpinski(cls) -> "FiniteSpace":
        """Two points with le(0, 1): opens are {}, {1}, {0, 1}."""
        return cls(2, [0b11, 0b10])

    @classmethod
    def chain(cls, n: int) -> "FiniteSpace":
        """Points 0 <= 1 <= ... <= n-1 in specialization order."""
        full = (1 << n) - 1
        return cls(n, [full & ~((1 << x) - 1) for x in range(n)])

    # -- identity --------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSpace)
            and self.n == other.n
            and self.up == other.up
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteSpace(n={self.n}, up={[bin(u) for u in self.up]})"

    def le(self, x: int, y: int) -> bool:
        return bool((self.up[x] >> y) & 1)

    @cached_property
    def canonical_digest(self) -> str:
        return canonical_form(self).digest

    # -- open/closed machinery -------------------------------------------

    def is_open(self, mask: int) -> bool:
        acc = 0
        for x in bits(mask):
            acc |= self.up[x]
        return acc | mask == mask

    def is_closed(self, mask: int) -> bool:
        acc = 0
        for x in bits(mask):
            acc |= self.down[x]
        return acc | mask == mask

    def closure_mask(self, mask: int) -> int:
        acc = 0
        for x in bits(mask):
            acc |= self.down[x]
        return acc

    def interior_mask(self, mask: int) -> int:
        acc = 0
        for x in bits(mask):
            if self.up[x] & ~mask == 0:
                acc |= 1 << x
        return acc

    # -- point sets --------------------------------------------------------

    def points(self, members) -> "PointSet":
        mask = members if isinstance(members, int) else _mask_from_iter(members, self.n)
        if mask & ~self.full:
            raise PointOutOfRange("member outside 0..n-1")
        return PointSet(self, mask)

    def full_set(self) -> "PointSet":
        return PointSet(self, self.full)

    def empty_set(self) -> "PointSet":
        return PointSet(self, 0)

    def singletons(self):
        return [PointSet(self, 1 << x) for x in range(self.n)]


def _mask_from_iter(members, n: int) -> int:
    mask = 0
    for x in members:
        if not 0 <= x < n:
            raise PointOutOfRange(f"point {x} outside 0..{n - 1}")
        mask |= 1 << x
    return mask


@dataclass(frozen=True)
class PointSet:
    """A subset of a finite space; all operators stay over the same ambient."""

    space: FiniteSpace
    mask: int

    def __post_init__(self):
        if self.mask & ~self.space.full:
            raise PointOutOfRange("member outside the ambient space")

    def members(self) -> tuple[int, ...]:
        return tuple(bits(self.mask))

    def __len__(self):
        return popcount(self.mask)

    def __contains__(self, x: int) -> bool:
        return bool((self.mask >> x) & 1)

    def __bool__(self):
        return self.mask != 0

    def __or__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.mask | other.mask)

    def __and__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.mask & other.mask)

    def __sub__(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.space, self.mask & ~other.mask)

    def __le__(self, other: "PointSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def _check(self, other):
        if self.space != other.space:
            from .errors import DomainMismatch

            raise DomainMismatch("point sets live on different spaces")

    def complement(self) -> "PointSet":
        return PointSet(self.space, self.space.full & ~self.mask)

    def closure(self) -> "PointSet":
        return PointSet(self.space, self.space.closure_mask(self.mask))

    def interior(self) -> "PointSet":
        return PointSet(self.space, self.space.interior_mask(self.mask))

    def isolated_points(self) -> "PointSet":
        """Points x of the subspace with U(x) meeting it only in x."""
        space, mask = self.space, self.mask
        acc = 0
        for x in bits(mask):
            if space.up[x] & mask == 1 << x:
                acc |= 1 << x
        return PointSet(space, acc)

    def is_open(self) -> bool:
        return self.space.is_open(self.mask)

    def is_closed(self) -> bool:
        return self.space.is_closed(self.mask)

    def __repr__(self):
        return "{" + ",".join(str(x) for x in self.members()) + "}"


# -- scatteredness ---------------------------------------------------------


@dataclass(frozen=True)
class CantorBendixson:
    """Result of iteratively deleting isolated points.

    levels starts at the whole space and ends at the kernel; the space is
    scattered exactly when the kernel is empty. height counts the strict
    deletion steps performed.
    """

    levels: tuple[PointSet, ...]
    scattered: bool
    height: int

    @property
    def kernel(self) -> PointSet:
        return self.levels[-1]


def cantor_bendixson(space: FiniteSpace) -> CantorBendixson:
    levels = [space.full_set()]
    while levels[-1].mask:
        iso = levels[-1].isolated_points()
        if not iso.mask:
            break
        levels.append(levels[-1] - iso)
    return CantorBendixson(
        levels=tuple(levels),
        scattered=levels[-1].mask == 0,
        height=len(levels) - 1,
    )


# -- separation properties -------------------------------------------------


@dataclass(frozen=True)
class SpaceProperties:
    t0: bool
    t1: bool
    t2: bool
    regular: bool
    scattered: bool
    partition: bool


def is_regular(space: FiniteSpace) -> bool:
    """Point/closed-set separation by disjoint opens.

    Closed sets are unions of point closures and minimal opens are the
    tightest separating candidates, so the search over separating opens
    reduces to the pairwise test U(x) disjoint from the up-closure of
    cl{y} whenever x is outside cl{y}. regular_bruteforce is the
    unreduced search used to cross-check this.
    """
    for y in range(space.n):
        cl_y = space.down[y]
        hull = 0
        for z in bits(cl_y):
            hull |= space.up[z]
        for x in range(space.n):
            if not (cl_y >> x) & 1 and space.up[x] & hull:
                return False
    return True


def open_family(space: FiniteSpace, guard: int = 16) -> list[int]:
    """All open masks; exponential, intended for small cross-checks."""
    if space.n > guard:
        raise SizeGuardExceeded(f"open family of {space.n} points exceeds guard {guard}")
    return [m for m in range(space.full + 1) if space.is_open(m)]


def regular_bruteforce(space: FiniteSpace, guard: int = 12) -> bool:
    """Literal search over all pairs of separating opens, for all closed sets."""
    if space.n > guard:
        raise SizeGuardExceeded(f"{space.n} points exceeds guard {guard}")
    opens = open_family(space, guard=guard)
    closeds = [space.full & ~m for m in opens]
    for f in closeds:
        if not f:
            continue
        for x in range(space.n):
            if (f >> x) & 1:
                continue
            if not any(
                (u >> x) & 1 and f & ~v == 0 and u & v == 0
                for u in opens
                for v in opens
            ):
                return False
    return True


def properties(space: FiniteSpace) -> SpaceProperties:
    n = space.n
    t0 = all(
        not (space.le(x, y) and space.le(y, x))
        for x in range(n)
        for y in range(x + 1, n)
    )
    t1 = all(space.up[x] == 1 << x for x in range(n))
    # minimal opens are the optimal separating candidates
    t2 = all(
        space.up[x] & space.up[y] == 0 for x in range(n) for y in range(x + 1, n)
    )
    partition = all(space.is_open(space.down[x]) for x in range(n))
    return SpaceProperties(
        t0=t0,
        t1=t1,
        t2=t2,
        regular=is_regular(space),
        scattered=cantor_bendixson(space).scattered,
        partition=partition,
    )


def paracompactness_number(space: FiniteSpace) -> int:
    """Degenerate on finite spaces: every open cover is finite, hence
    locally finite, and refines itself; the number is always 1."""
    return 1


def large_pseudocharacter(space: FiniteSpace) -> int | None:
    """Least number of opens whose intersection can cut out any closed set.

    Intersections of opens are open here, so the invariant is 1 when
    every closed set is open and undefined (None) otherwise.
    """
    return 1 if properties(space).partition else None


def closed_chain_length(space: FiniteSpace) -> int:
    """Length of the longest strictly decreasing chain of non-empty closed sets.

    Closed sets are down-closed unions of specialization classes and a
    maximal class can always be deleted one at a time, so the longest
    chain walks down one class per step: its length is the class count.
    """
    return len(set(space.up))


# -- constructions -----------------------------------------------------------


def subspace(space: FiniteSpace, members) -> FiniteSpace:
    sub, _ = subspace_with_map(space, members)
    return sub


def subspace_with_map(space: FiniteSpace, members) -> tuple[FiniteSpace, dict[int, int]]:
    """Subspace plus the old-point -> new-point renumbering."""
    if isinstance(members, PointSet):
        mask = members.mask
    else:
        mask = members if isinstance(members, int) else _mask_from_iter(members, space.n)
    if mask & ~space.full:
        raise PointOutOfRange("subspace members outside the space")
    old = list(bits(mask))
    index = {x: i for i, x in enumerate(old)}
    up = []
    for x in old:
        m = 0
        for y in bits(space.up[x] & mask):
            m |= 1 << index[y]
        up.append(m)
    return FiniteSpace(len(old), up), index


def space_sum(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    """Disjoint topological sum; points of a come first."""
    up = list(a.up) + [m << a.n for m in b.up]
    return FiniteSpace(a.n + b.n, up)


def space_product(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    """Product space on pairs indexed x * b.n + y; le holds componentwise."""
    n = a.n * b.n
    up = []
    for x in range(a.n):
        for y in range(b.n):
            m = 0
            for xx in bits(a.up[x]):
                for yy in bits(b.up[y]):
                    m |= 1 << (xx * b.n + yy)
            up.append(m)
    return FiniteSpace(n, up)


# -- canonical forms ---------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    """A relabeling making isomorphic spaces byte-identical.

    order[i] is the original point placed at position i; digest is
    invariant under input point order and separates isomorphism classes.
    """

    order: tuple[int, ...]
    digest: str
    space: FiniteSpace


def _refined_colors(space: FiniteSpace) -> list[int]:
    n = space.n
    colors = [
        (popcount(space.up[x]), popcount(space.down[x])) for x in range(n)
    ]
    colors = _rank(colors)
    while True:
        sigs = []
        for x in range(n):
            ups = sorted(colors[y] for y in bits(space.up[x]) if y != x)
            downs = sorted(colors[y] for y in bits(space.down[x]) if y != x)
            sigs.append((colors[x], tuple(ups), tuple(downs)))
        new = _rank(sigs)
        if new == colors:
            return colors
        colors = new


def _rank(values):
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def _swap_is_automorphism(space: FiniteSpace, u: int, v: int) -> bool:
    swap = list(range(space.n))
    swap[u], swap[v] = v, u
    for x in range(space.n):
        for y in range(space.n):
            if space.le(x, y) != space.le(swap[x], swap[y]):
                return False
    return True


def _matrix_key(space: FiniteSpace, order) -> tuple[int, ...]:
    pos = {x: i for i, x in enumerate(order)}
    rows = []
    for x in order:
        m = 0
        for y in bits(space.up[x]):
            m |= 1 << pos[y]
        rows.append(m)
    return tuple(rows)


def canonical_form(space: FiniteSpace, search_guard: int = 1_000_000) -> CanonicalForm:
    """Canonical labeling by minimizing the relation matrix over the
    color-respecting permutations; exact for isomorphism classification."""
    n = space.n
    colors = _refined_colors(space)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(colors[x], []).append(x)
    ordered_groups = [groups[c] for c in sorted(groups)]
    # a color class whose members are pairwise swappable contributes no choice
    per_group: list[list[tuple[int, ...]]] = []
    total = 1
    for g in ordered_groups:
        uniform = all(
            _swap_is_automorphism(space, g[i], g[j])
            for i in range(len(g))
            for j in range(i + 1, len(g))
        )
        if uniform:
            per_group.append([tuple(g)])
        else:
            opts = [tuple(p) for p in permutations(g)]
            per_group.append(opts)
            total *= len(opts)
        if total > search_guard:
            raise SizeGuardExceeded("canonical labeling search too large")
    from itertools import product as iproduct

    best_key = None
    best_order = None
    for pieces in iproduct(*per_group):
        order = tuple(x for piece in pieces for x in piece)
        key = _matrix_key(space, order)
        if best_key is None or key < best_key:
            best_key = key
            best_order = order
    payload = f"{n}:" + ",".join(str(r) for r in best_key)
    digest = hashlib.sha256(payload.encode("ascii")).hexdigest()
    return CanonicalForm(
        order=best_order, digest=digest, space=FiniteSpace(n, best_key)
    )
