"""Countable tree spaces with threshold-definable sets and maps.

Points are integer sequences of length at most k. A node of length
below k is the limit of its children: its basic neighborhoods consist
of the node together with all full subtrees of children past some
index. Every point of length k is isolated, the space is compact,
countable and scattered of height k + 1; for height k it is
homeomorphic to the ordinal omega^k + 1, but every computation here
stays in tree coordinates.

Sets and maps are presented through shapes: a coordinate below a
threshold N is kept, anything at or above N collapses to a star. The
shape class is closed under boolean operations, closure, interior and
discontinuity sets with the same threshold, which makes every series
computation finite and exact. A separate truncated model re-evaluates
the defining quantifiers pointwise on coordinates up to a depth and is
used to cross-check every symbolic result.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

from .errors import (
    CoverVerificationFailed,
    HeightExceeded,
    MemberDiscontinuous,
    NotStablyConvergent,
    PointOutOfRange,
)
from .finspace import FiniteSpace
from .mapcalc import Cardinality, CoverResult, SeriesReport

STAR = -1  # coordinate at or above the threshold
MID = -2  # tail-rule class: between the threshold and the family index
HIGH = -3  # tail-rule class: at or above the family index


def tree_height_guard() -> int:
    return int(os.environ.get("FINTOPO_TREE_HEIGHT", "3"))


@dataclass(frozen=True)
class TreeSpace:
    """The tree of integer sequences of length at most k."""

    k: int

    def __post_init__(self):
        limit = tree_height_guard()
        if self.k > limit:
            raise HeightExceeded(f"height {self.k} exceeds the guard of {limit}")
        if self.k < 1:
            raise PointOutOfRange("height must be at least 1")


def shape_of(point: tuple[int, ...], threshold: int) -> tuple[int, ...]:
    return tuple(c if c < threshold else STAR for c in point)


def all_shapes(k: int, threshold: int) -> tuple[tuple[int, ...], ...]:
    alphabet = list(range(threshold)) + [STAR]
    out = []
    for length in range(k + 1):
        out.extend(iproduct(alphabet, repeat=length))
    return tuple(sorted(out))


def _check_shape(shape, k, threshold):
    if len(shape) > k:
        raise PointOutOfRange(f"shape {shape} longer than the height {k}")
    for c in shape:
        if c != STAR and not 0 <= c < threshold:
            raise PointOutOfRange(f"shape {shape} has coordinate outside the threshold")


@dataclass(frozen=True)
class ShapeSet:
    """A subset of the tree space whose membership depends only on shapes."""

    k: int
    threshold: int
    members: frozenset

    def __post_init__(self):
        TreeSpace(self.k)
        object.__setattr__(self, "members", frozenset(self.members))
        for s in self.members:
            _check_shape(s, self.k, self.threshold)

    @classmethod
    def full(cls, k: int, threshold: int) -> "ShapeSet":
        return cls(k, threshold, frozenset(all_shapes(k, threshold)))

    @classmethod
    def empty(cls, k: int, threshold: int) -> "ShapeSet":
        return cls(k, threshold, frozenset())

    def contains_point(self, point) -> bool:
        return shape_of(tuple(point), self.threshold) in self.members

    def _align(self, other: "ShapeSet") -> tuple["ShapeSet", "ShapeSet"]:
        if self.k != other.k:
            raise PointOutOfRange("shape sets over different heights")
        t = max(self.threshold, other.threshold)
        return self.refine(t), other.refine(t)

    def __or__(self, other):
        a, b = self._align(other)
        return ShapeSet(a.k, a.threshold, a.members | b.members)

    def __and__(self, other):
        a, b = self._align(other)
        return ShapeSet(a.k, a.threshold, a.members & b.members)

    def __sub__(self, other):
        a, b = self._align(other)
        return ShapeSet(a.k, a.threshold, a.members - b.members)

    def __le__(self, other):
        a, b = self._align(other)
        return a.members <= b.members

    def complement(self) -> "ShapeSet":
        return ShapeSet(
            self.k,
            self.threshold,
            frozenset(all_shapes(self.k, self.threshold)) - self.members,
        )

    def __bool__(self):
        return bool(self.members)

    def __len__(self):
        return len(self.members)

    def refine(self, new_threshold: int) -> "ShapeSet":
        """The same set of points presented at a larger threshold."""
        if new_threshold < self.threshold:
            raise PointOutOfRange("refinement must not lower the threshold")
        if new_threshold == self.threshold:
            return self
        out = set()
        for s in self.members:
            out.update(_expand_shape(s, self.threshold, new_threshold))
        return ShapeSet(self.k, new_threshold, frozenset(out))

    def sorted_members(self):
        return sorted(self.members)

    def __repr__(self):
        body = " ".join(render_shape(s) for s in self.sorted_members())
        return f"ShapeSet(k={self.k}, N={self.threshold}, {{{body}}})"


def _expand_shape(shape, old, new):
    choices = []
    for c in shape:
        if c == STAR:
            choices.append(list(range(old, new)) + [STAR])
        else:
            choices.append([c])
    return [tuple(t) for t in iproduct(*choices)]


def render_shape(shape) -> str:
    if not shape:
        return "()"
    return ",".join("*" if c == STAR else str(c) for c in shape)


class ThresholdMap:
    """A total map from the tree space to a finite space, constant on shapes."""

    def __init__(self, k: int, threshold: int, cod: FiniteSpace, values):
        TreeSpace(k)
        self.k = k
        self.threshold = threshold
        self.cod = cod
        table = dict(values)
        for s in all_shapes(k, threshold):
            if s not in table:
                raise PointOutOfRange(f"no value for shape {render_shape(s)}")
        for s, v in table.items():
            _check_shape(s, k, threshold)
            if not 0 <= v < cod.n:
                raise PointOutOfRange(f"value {v} of shape {render_shape(s)} outside the codomain")
        self.values = {s: table[s] for s in all_shapes(k, threshold)}

    def value_of_shape(self, shape) -> int:
        return self.values[shape]

    def value_of_point(self, point) -> int:
        return self.values[shape_of(tuple(point), self.threshold)]

    def refine(self, new_threshold: int) -> "ThresholdMap":
        if new_threshold < self.threshold:
            raise PointOutOfRange("refinement must not lower the threshold")
        if new_threshold == self.threshold:
            return self
        values = {}
        for s, v in self.values.items():
            for t in _expand_shape(s, self.threshold, new_threshold):
                values[t] = v
        return ThresholdMap(self.k, new_threshold, self.cod, values)

    def __eq__(self, other):
        return (
            isinstance(other, ThresholdMap)
            and (self.k, self.threshold, self.cod) == (other.k, other.threshold, other.cod)
            and self.values == other.values
        )

    def __repr__(self):
        return f"ThresholdMap(k={self.k}, N={self.threshold}, |cod|={self.cod.n})"


# -- topology on shape sets --------------------------------------------------


def _star_descendants(members, shape):
    """True when some member extends shape by a star coordinate: the star
    child subtree of any point with this shape meets the set, hence so do
    infinitely many child subtrees."""
    probe = shape + (STAR,)
    depth = len(probe)
    return any(
        len(m) >= depth and m[: depth - 1] == shape and m[depth - 1] == STAR
        for m in members
    )


def tree_closure(a: ShapeSet) -> ShapeSet:
    out = set(a.members)
    for s in all_shapes(a.k, a.threshold):
        if len(s) < a.k and _star_descendants(a.members, s):
            out.add(s)
    return ShapeSet(a.k, a.threshold, frozenset(out))


def tree_interior(a: ShapeSet) -> ShapeSet:
    """s is interior when some basic neighborhood fits in the set; past the
    threshold all child subtrees look alike, so the star-prefixed shapes
    decide it."""
    out = set()
    full = all_shapes(a.k, a.threshold)
    for s in a.members:
        if len(s) == a.k:
            out.add(s)
            continue
        tail = [
            m
            for m in full
            if len(m) > len(s) and m[: len(s)] == s and m[len(s)] == STAR
        ]
        if all(m in a.members for m in tail):
            out.add(s)
    return ShapeSet(a.k, a.threshold, frozenset(out))


def tree_is_closed(a: ShapeSet) -> bool:
    return tree_closure(a).members == a.members


def tree_is_open(a: ShapeSet) -> bool:
    return tree_interior(a).members == a.members


def subtree_set(k: int, threshold: int, shape) -> ShapeSet:
    """All shapes extending the given one: the family of full subtrees
    rooted at its representatives."""
    members = frozenset(
        m for m in all_shapes(k, threshold) if m[: len(shape)] == shape
    )
    return ShapeSet(k, threshold, members)


def tree_discontinuity_set(f: ThresholdMap, a: ShapeSet | None = None) -> ShapeSet:
    """Discontinuity points of f restricted to a.

    A point of length k is isolated, hence continuous. A shorter point is
    discontinuous exactly when its star-child subtree within a carries a
    value outside the minimal neighborhood of its own value: finitely
    many explicit children are excludable by the neighborhood choice, the
    star children are not.
    """
    if a is None:
        a = ShapeSet.full(f.k, f.threshold)
    if a.threshold != f.threshold:
        t = max(a.threshold, f.threshold)
        return tree_discontinuity_set(f.refine(t), a.refine(t))
    out = set()
    members = a.members
    for s in members:
        if len(s) == f.k:
            continue
        allowed = f.cod.up[f.value_of_shape(s)]
        depth = len(s)
        for m in members:
            if (
                len(m) > depth
                and m[:depth] == s
                and m[depth] == STAR
                and not (allowed >> f.value_of_shape(m)) & 1
            ):
                out.add(s)
                break
    return ShapeSet(a.k, a.threshold, frozenset(out))


def tree_series(f: ThresholdMap, kind: str = "plain") -> SeriesReport:
    """Discontinuity series over shape sets. The domain is scattered, so
    the series always vanishes; the index is at most k + 1."""
    if kind not in ("plain", "closed"):
        raise PointOutOfRange(f"unknown series kind {kind!r}")
    current = ShapeSet.full(f.k, f.threshold)
    sets = [current]
    while current:
        nxt = tree_discontinuity_set(f, current)
        if kind == "closed":
            nxt = tree_closure(nxt)
        if nxt.members == current.members:
            raise CoverVerificationFailed(
                "series stalled on a scattered domain; this cannot happen"
            )
        sets.append(nxt)
        current = nxt
    return SeriesReport(kind=kind, sets=tuple(sets), index=len(sets) - 1, holds=True)


# -- decompositions ----------------------------------------------------------


@dataclass(frozen=True)
class TreePiece:
    """One closed piece or a uniformly described countable family of them.

    kind "set" is a single closed shape set; "singletons" is the family
    of one-point pieces over a shape; "subtrees" is the family of full
    clopen subtrees rooted at a shape's representatives.
    """

    kind: str
    shape: tuple | None = None
    shape_set: ShapeSet | None = None

    def family_cardinality(self) -> Cardinality:
        if self.kind == "set":
            return Cardinality.finite(1)
        if STAR in self.shape:
            return Cardinality.countably_infinite()
        return Cardinality.finite(1)


def tree_decomposition(f: ThresholdMap) -> CoverResult:
    """A countable closed cover with continuous restrictions, presented
    finitely: per level of the closed series, either the whole level when
    it is already closed, or per-shape subtree families when a full
    subtree stays inside the level, or singleton families otherwise.
    Every piece is verified closed and continuous symbolically."""
    rep = tree_series(f, "closed")
    pieces: list[TreePiece] = []
    k, n = f.k, f.threshold
    for here, nxt in zip(rep.sets, rep.sets[1:]):
        level = here - nxt
        if not level:
            continue
        if tree_is_closed(level) and not tree_discontinuity_set(f, level):
            pieces.append(TreePiece(kind="set", shape_set=level))
            continue
        remaining = set(level.members)
        for s in sorted(remaining):
            if s not in remaining:
                continue
            if len(s) == k:
                pieces.append(TreePiece(kind="singletons", shape=s))
                remaining.discard(s)
                continue
            sub = subtree_set(k, n, s)
            if sub.members <= level.members and not tree_discontinuity_set(f, sub):
                pieces.append(TreePiece(kind="subtrees", shape=s))
                remaining -= sub.members
            else:
                pieces.append(TreePiece(kind="singletons", shape=s))
                remaining.discard(s)
    infinite = any(
        p.family_cardinality() == Cardinality.countably_infinite() for p in pieces
    )
    card = Cardinality.countably_infinite() if infinite else Cardinality.finite(len(pieces))
    return CoverResult(
        mode="closed",
        pieces=tuple(pieces),
        cardinality=card,
        certificates=tuple(_piece_checks(f, p) for p in pieces),
    )


def _piece_checks(f: ThresholdMap, piece: TreePiece) -> bool:
    if piece.kind == "set":
        return tree_is_closed(piece.shape_set) and not tree_discontinuity_set(
            f, piece.shape_set
        )
    if piece.kind == "singletons":
        return True  # one-point sets are closed: no point is a limit of a single point
    sub = subtree_set(f.k, f.threshold, piece.shape)
    return not tree_discontinuity_set(f, sub)


def decomposition_covers(f: ThresholdMap, cover: CoverResult) -> bool:
    covered = set()
    for p in cover.pieces:
        if p.kind == "set":
            covered |= p.shape_set.members
        elif p.kind == "singletons":
            covered.add(p.shape)
        else:
            covered |= subtree_set(f.k, f.threshold, p.shape).members
    return covered == set(all_shapes(f.k, f.threshold))


@dataclass(frozen=True)
class PigeonholeCertificate:
    """Evidence that no finite closed cover works: the bad-valued points
    in the star-child subtrees of the witness accumulate at it, so any
    closed piece grabbing infinitely many of them must contain the
    witness and be discontinuous there."""

    witness_shape: tuple
    bad_shape: tuple
    note: str = (
        "a closed set containing points from infinitely many child "
        "subtrees of a node contains the node itself"
    )


@dataclass(frozen=True)
class TreeDecResult:
    cardinality: Cardinality
    cover: CoverResult
    certificate: PigeonholeCertificate | None


def tree_dec_closed(f: ThresholdMap) -> TreeDecResult:
    """Exact closed decomposition number: one piece for a continuous map,
    countably many otherwise. Exactness is only claimed up to height 2;
    the countable upper bound always comes from tree_decomposition."""
    if f.k > 2:
        raise HeightExceeded("exact closed decomposition is only claimed for heights 1 and 2")
    cover = tree_decomposition(f)
    d = tree_discontinuity_set(f)
    if not d:
        return TreeDecResult(Cardinality.finite(1), cover, None)
    witness = min(d.members)
    allowed = f.cod.up[f.value_of_shape(witness)]
    bad = None
    depth = len(witness)
    for m in sorted(ShapeSet.full(f.k, f.threshold).members):
        if (
            len(m) > depth
            and m[:depth] == witness
            and m[depth] == STAR
            and not (allowed >> f.value_of_shape(m)) & 1
        ):
            bad = m
            break
    return TreeDecResult(
        Cardinality.countably_infinite(),
        cover,
        PigeonholeCertificate(witness_shape=witness, bad_shape=bad),
    )


# -- truncated model ---------------------------------------------------------


class TruncatedModel:
    """Pointwise evaluator on coordinates up to a depth.

    The infinite quantifier "infinitely many child subtrees" is read as
    "some child subtree with index in [tail_start, depth]"; for
    threshold-definable sets with threshold at most tail_start the two
    agree, so the model is an independent ground-truth oracle on all
    points it contains.
    """

    def __init__(self, k: int, tail_start: int, depth: int):
        if depth < tail_start:
            raise PointOutOfRange("depth must reach the tail start")
        self.k = k
        self.tail_start = tail_start
        self.depth = depth

    @cached_property
    def points(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for length in range(self.k + 1):
            out.extend(iproduct(range(self.depth + 1), repeat=length))
        return tuple(sorted(out))

    def _subtree(self, root):
        return [p for p in self.points if p[: len(root)] == root]

    def closure(self, member) -> set:
        out = set()
        for p in self.points:
            if member(p):
                out.add(p)
            elif len(p) < self.k and any(
                any(member(q) for q in self._subtree(p + (j,)))
                for j in range(self.tail_start, self.depth + 1)
            ):
                out.add(p)
        return out

    def interior(self, member) -> set:
        out = set()
        for p in self.points:
            if not member(p):
                continue
            if len(p) == self.k:
                out.add(p)
            elif all(
                all(member(q) for q in self._subtree(p + (j,)))
                for j in range(self.tail_start, self.depth + 1)
            ):
                out.add(p)
        return out

    def disc_set(self, value, cod: FiniteSpace, member) -> set:
        """D(f|A) evaluated pointwise: a bad value in some tail child
        subtree within A witnesses discontinuity."""
        out = set()
        for p in self.points:
            if not member(p) or len(p) == self.k:
                continue
            allowed = cod.up[value(p)]
            for j in range(self.tail_start, self.depth + 1):
                if any(
                    member(q) and not (allowed >> value(q)) & 1
                    for q in self._subtree(p + (j,))
                ):
                    out.add(p)
                    break
        return out

    def series(self, value, cod: FiniteSpace, kind: str) -> list[set]:
        current = set(self.points)
        sets = [set(current)]
        while current:
            nxt = self.disc_set(value, cod, current.__contains__)
            if kind == "closed":
                nxt = self.closure(nxt.__contains__)
            sets.append(set(nxt))
            if nxt == current:
                break
            current = nxt
        return sets

    def agrees(self, symbolic: ShapeSet, model_set: set) -> bool:
        return all(symbolic.contains_point(p) == (p in model_set) for p in self.points)


def verify_pigeonhole(
    f: ThresholdMap, cert: PigeonholeCertificate, depth: int
) -> bool:
    """Re-check the certificate pointwise up to a depth: every tail child
    subtree of the witness carries a point whose value escapes the
    minimal neighborhood of the witness value, so the bad points form a
    family accumulating at the witness."""
    witness = tuple(
        c if c != STAR else f.threshold for c in cert.witness_shape
    )
    if len(witness) >= f.k:
        return False
    allowed = f.cod.up[f.value_of_point(witness)]
    pos = len(cert.witness_shape)
    for j in range(f.threshold, depth + 1):
        coords = list(witness) + [j]
        for c in cert.bad_shape[pos + 1 :]:
            coords.append(c if c != STAR else f.threshold)
        q = tuple(coords)
        if q[: pos + 1] != witness + (j,):
            return False
        if (allowed >> f.value_of_point(q)) & 1:
            return False
    return True


# -- stable pointwise limits ---------------------------------------------------


class StableSequenceDescription:
    """A finitely presented family (f_j) of threshold maps.

    The first members are explicit; from index M = len(explicit) on, the
    member f_j reads each coordinate as an explicit value below the
    threshold, MID between the threshold and j, or HIGH at j and above,
    and looks the resulting pattern up in a cyclic list of rules. A
    single rule gives a genuinely uniform tail; a longer cycle can
    oscillate, which is how non-convergent families are expressed.
    """

    def __init__(self, k, threshold, cod, explicit, tail_rules):
        TreeSpace(k)
        self.k = k
        self.threshold = threshold
        self.cod = cod
        self.explicit = tuple(explicit)
        self.tail_rules = tuple(dict(r) for r in tail_rules)
        if not self.tail_rules:
            raise PointOutOfRange("at least one tail rule is required")
        if len(self.explicit) <= threshold:
            raise PointOutOfRange(
                "need at least threshold+1 explicit members so every tail "
                "member has a non-empty MID class"
            )
        for g in self.explicit:
            if g.k != k or g.cod != cod:
                raise PointOutOfRange("explicit member over a different space")
        patterns = self._patterns()
        for rule in self.tail_rules:
            for p in patterns:
                if p not in rule:
                    raise PointOutOfRange(f"tail rule misses pattern {p}")
                if not 0 <= rule[p] < cod.n:
                    raise PointOutOfRange("tail rule value outside the codomain")

    @property
    def start(self) -> int:
        return len(self.explicit)

    def _patterns(self):
        alphabet = list(range(self.threshold)) + [MID, HIGH]
        out = []
        for length in range(self.k + 1):
            out.extend(iproduct(alphabet, repeat=length))
        return tuple(out)

    def _classify(self, c: int, j: int) -> int:
        if c < self.threshold:
            return c
        return MID if c < j else HIGH

    def member_value(self, j: int, point) -> int:
        """f_j(point) without materializing the member's full table."""
        point = tuple(point)
        if j < self.start:
            return self.explicit[j].value_of_point(point)
        rule = self.tail_rules[(j - self.start) % len(self.tail_rules)]
        return rule[tuple(self._classify(c, j) for c in point)]

    def member(self, j: int) -> ThresholdMap:
        if j < self.start:
            return self.explicit[j]
        values = {}
        for s in all_shapes(self.k, j):
            pattern = tuple(
                HIGH if c == STAR else self._classify(c, j) for c in s
            )
            rule = self.tail_rules[(j - self.start) % len(self.tail_rules)]
            values[s] = rule[pattern]
        return ThresholdMap(self.k, j, self.cod, values)

    def limit(self) -> ThresholdMap:
        """Pointwise stable limit: once j passes every coordinate, each
        non-explicit coordinate sits in MID forever, so the cycle rules
        must agree on the fully matured pattern."""
        values = {}
        for s in all_shapes(self.k, self.threshold):
            pattern = tuple(MID if c == STAR else c for c in s)
            got = {rule[pattern] for rule in self.tail_rules}
            if len(got) > 1:
                raise NotStablyConvergent(
                    f"values at shape {render_shape(s)} never stabilize", shape=s
                )
            values[s] = got.pop()
        return ThresholdMap(self.k, self.threshold, self.cod, values)

    def stabilization_bound(self, point) -> int:
        """An index past which f_j(point) equals the limit value."""
        point = tuple(point)
        return max(self.start, max(point, default=0) + 1)


def _stable_membership(desc: StableSequenceDescription, n: int, point) -> bool:
    """Whether f_m(point) = f_n(point) for all m >= n, decided by scanning
    past the point's stabilization bound and one full rule cycle."""
    horizon = max(
        desc.stabilization_bound(point) + len(desc.tail_rules), n + 1
    )
    base = desc.member_value(n, point)
    return all(
        desc.member_value(m, point) == base for m in range(n, horizon + 1)
    )


@dataclass(frozen=True)
class StableCoverResult:
    limit: ThresholdMap
    cover: CoverResult
    horizon: int


def stable_sequence_cover(
    desc: StableSequenceDescription, horizon: int | None = None
) -> StableCoverResult:
    """Closed sets X_n of points already stable at index n.

    Members are verified continuous first. The X_n are emitted as shape
    sets up to a horizon, checked closed, increasing and with the limit
    restriction continuous on each; every point enters X_n once n passes
    its stabilization bound, which is the exhaustion argument.
    """
    for i, g in enumerate(desc.explicit):
        if tree_discontinuity_set(g):
            raise MemberDiscontinuous(f"explicit member {i} is discontinuous", index=i)
    for phase in range(len(desc.tail_rules) + 1):
        j = desc.start + phase
        if tree_discontinuity_set(desc.member(j)):
            raise MemberDiscontinuous(f"tail member {j} is discontinuous", index=j)

    limit = desc.limit()
    h = horizon if horizon is not None else max(desc.start, desc.threshold) + 3
    sets = []
    for n in range(h + 1):
        t_n = max(desc.threshold, desc.start, n)
        members = set()
        for s in all_shapes(desc.k, t_n):
            reps = _representatives(s, t_n)
            got = {_stable_membership(desc, n, p) for p in reps}
            if len(got) > 1:
                raise NotStablyConvergent(
                    "stability at this index is not determined by the shape",
                    shape=s,
                )
            if got.pop():
                members.add(s)
        sets.append(ShapeSet(desc.k, t_n, frozenset(members)))

    for x_n in sets:
        if not tree_is_closed(x_n):
            raise CoverVerificationFailed(
                "a stability set failed to be closed; the codomain is "
                "likely not Hausdorff"
            )
        if tree_discontinuity_set(limit, x_n):
            raise CoverVerificationFailed(
                "limit restriction discontinuous on a stability set"
            )
    common = max(s.threshold for s in sets)
    refined = [s.refine(common) for s in sets]
    for a, b in zip(refined, refined[1:]):
        if not a.members <= b.members:
            raise CoverVerificationFailed("stability sets failed to increase")
    # exhaustion: every point is stable once the index passes its bound
    for s in all_shapes(desc.k, common):
        for rep in _representatives(s, common):
            if not _stable_membership(desc, desc.stabilization_bound(rep), rep):
                raise CoverVerificationFailed(
                    "a point failed to stabilize by its bound"
                )

    full_at = next(
        (n for n, s in enumerate(refined) if s.members == set(all_shapes(desc.k, common))),
        None,
    )
    card = (
        Cardinality.finite(1) if full_at is not None else Cardinality.countably_infinite()
    )
    cover = CoverResult(
        mode="closed",
        pieces=tuple(sets),
        cardinality=card,
        certificates=tuple(True for _ in sets),
    )
    return StableCoverResult(limit=limit, cover=cover, horizon=h)


def _representatives(shape, threshold):
    """Concrete points for a shape; stars get distinct large coordinates in
    both orders to expose any dependence on their relative sizes."""
    stars = sum(1 for c in shape if c == STAR)
    if stars == 0:
        return [tuple(shape)]
    ups = iter(range(threshold, threshold + stars))
    downs = iter(range(threshold + stars - 1, threshold - 1, -1))
    asc = tuple(c if c != STAR else next(ups) for c in shape)
    desc_ = tuple(c if c != STAR else next(downs) for c in shape)
    return [asc] if asc == desc_ else [asc, desc_]


def verify_stable_cover_model(
    desc: StableSequenceDescription, result: StableCoverResult, depth: int
) -> bool:
    """Pointwise re-check at a depth: membership of each emitted set,
    the limit value, and the exhaustion bound."""
    model = TruncatedModel(desc.k, desc.threshold, depth)
    for p in model.points:
        bound = desc.stabilization_bound(p)
        if desc.member_value(bound, p) != result.limit.value_of_point(p):
            return False
        if not _stable_membership(desc, bound, p):
            return False
        for n, x_n in enumerate(result.cover.pieces):
            if x_n.contains_point(p) != _stable_membership(desc, n, p):
                return False
    return True


# -- measurability -----------------------------------------------------------


@dataclass(frozen=True)
class MeasurabilityCertificate:
    """Witnesses that a shape set is both a countable union of closed sets
    and a countable intersection of open sets. In this countable space
    every singleton is closed, so both decompositions always exist; the
    certificate makes them explicit and checkable."""

    subject: ShapeSet
    fsigma_pieces: tuple  # TreePiece entries, each closed
    gdelta_opens: tuple  # ("set", ShapeSet) or ("cofinite-singletons", shape)
    note: str


def tree_measurability_certificate(a: ShapeSet) -> MeasurabilityCertificate:
    if tree_is_closed(a):
        fsigma = (TreePiece(kind="set", shape_set=a),)
    else:
        fsigma = tuple(
            TreePiece(kind="singletons", shape=s) for s in a.sorted_members()
        )
    if tree_is_open(a):
        gdelta = (("set", a),)
    else:
        gdelta = tuple(
            ("cofinite-singletons", s) for s in a.complement().sorted_members()
        )
    return MeasurabilityCertificate(
        subject=a,
        fsigma_pieces=fsigma,
        gdelta_opens=gdelta,
        note=(
            "every subset of this countable space is simultaneously a "
            "countable union of closed sets and a countable intersection "
            "of opens; every threshold map is therefore measurable "
            "against countable intersections of opens"
        ),
    )


def verify_measurability_certificate(
    cert: MeasurabilityCertificate, depth: int
) -> bool:
    """Check the witnesses symbolically and pointwise at a depth."""
    a = cert.subject
    covered = set()
    for p in cert.fsigma_pieces:
        if p.kind == "set":
            if not tree_is_closed(p.shape_set):
                return False
            covered |= p.shape_set.members
        else:
            covered.add(p.shape)
    if covered != a.members:
        return False
    model = TruncatedModel(a.k, a.threshold, depth)
    for point in model.points:
        inside = a.contains_point(point)
        in_gdelta = all(
            entry[1].contains_point(point)
            if entry[0] == "set"
            else shape_of(point, a.threshold) != entry[1]
            for entry in cert.gdelta_opens
        )
        if inside != in_gdelta:
            return False
    for entry in cert.gdelta_opens:
        if entry[0] == "set" and not tree_is_open(entry[1]):
            return False
    # a single point meets at most one child subtree of any node, so it can
    # never witness "infinitely many": singletons are closed
    for p in cert.fsigma_pieces:
        if p.kind == "singletons":
            rep = tuple(c if c != STAR else a.threshold for c in p.shape)
            for s in model.points:
                if s != rep and len(s) < a.k:
                    hits = sum(
                        1
                        for j in range(model.depth + 1)
                        if rep[: len(s) + 1] == s + (j,)
                    )
                    if hits > 1:
                        return False
    return True
