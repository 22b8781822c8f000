"""Continuity structure of a map between finite spaces.

The central objects are the two decreasing series obtained by iterating
"discontinuity points of the restriction": the plain series D_{a+1} =
D(f|D_a) whose vanishing length is the scattered-continuity index, and
the closed series that takes a closure after each step, whose vanishing
length is the weak-discontinuity index. Negative answers come with
machine-checkable certificates: a kernel on which the map has no
continuity point, a closed set in which the discontinuity points are
dense, or a specialization pair that no continuous closed piece can
swallow.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import (
    DomainMismatch,
    MalformedSeries,
    PointOutOfRange,
    SizeGuardExceeded,
    SpaceMismatch,
)
from .finspace import FiniteSpace, PointSet, bits, popcount, subspace_with_map


def brute_guard() -> int:
    return int(os.environ.get("FINTOPO_BRUTE_GUARD", "12"))


@dataclass(frozen=True)
class FiniteMap:
    """A total value table between two finite spaces."""

    dom: FiniteSpace
    cod: FiniteSpace
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != self.dom.n:
            raise PointOutOfRange(
                f"table has {len(self.table)} entries for {self.dom.n} points"
            )
        for x, y in enumerate(self.table):
            if not 0 <= y < self.cod.n:
                raise PointOutOfRange(f"value {y} of point {x} outside the codomain")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def image_mask(self, mask: int) -> int:
        acc = 0
        for x in bits(mask):
            acc |= 1 << self.table[x]
        return acc

    def preimage_mask(self, mask: int) -> int:
        acc = 0
        for x, y in enumerate(self.table):
            if (mask >> y) & 1:
                acc |= 1 << x
        return acc

    def is_bijective(self) -> bool:
        return self.dom.n == self.cod.n and len(set(self.table)) == self.dom.n


def compose(f: FiniteMap, g: FiniteMap) -> FiniteMap:
    """g after f; requires cod(f) = dom(g)."""
    if f.cod != g.dom:
        raise SpaceMismatch("codomain of the first map differs from the domain of the second")
    return FiniteMap(f.dom, g.cod, tuple(g.table[y] for y in f.table))


def restrict(f: FiniteMap, members) -> FiniteMap:
    """Restriction of f onto the subspace spanned by the given points."""
    if isinstance(members, PointSet):
        if members.space != f.dom:
            raise DomainMismatch("restriction set lives on a different space")
        members = members.mask
    sub, index = subspace_with_map(f.dom, members)
    table = [0] * sub.n
    for old, new in index.items():
        table[new] = f.table[old]
    return FiniteMap(sub, f.cod, tuple(table))


# -- pointwise continuity ----------------------------------------------------


def _disc_mask(f: FiniteMap, amask: int) -> int:
    """Discontinuity points of f restricted to the subspace on amask.

    x is discontinuous when the image of its minimal relative
    neighborhood U(x) & A escapes U(f(x)); minimal neighborhoods make
    this single check equivalent to the full quantifier over opens.
    """
    dom, cod, table = f.dom, f.cod, f.table
    res = 0
    for x in bits(amask):
        img = 0
        for y in bits(dom.up[x] & amask):
            img |= 1 << table[y]
        if img & ~cod.up[table[x]]:
            res |= 1 << x
    return res


def discontinuity_set(f: FiniteMap, a: PointSet | None = None) -> PointSet:
    if a is None:
        a = f.dom.full_set()
    if a.space != f.dom:
        raise DomainMismatch("set lives on a different space than the map domain")
    return PointSet(f.dom, _disc_mask(f, a.mask))


def continuity_set(f: FiniteMap, a: PointSet | None = None) -> PointSet:
    if a is None:
        a = f.dom.full_set()
    return a - discontinuity_set(f, a)


def is_continuous(f: FiniteMap) -> bool:
    return _disc_mask(f, f.dom.full) == 0


def ac_qc_sets(f: FiniteMap) -> tuple[PointSet, PointSet]:
    """Almost-continuity and quasi-continuity points.

    x is almost continuous when the preimage of every neighborhood of
    f(x) is dense in some neighborhood of x, and quasi-continuous when
    the interior of that preimage is. On finite spaces both reduce to
    U(x) landing inside the closure of (the interior of) the preimage
    of U(f(x)).
    """
    dom = f.dom
    ac = 0
    qc = 0
    for x in range(dom.n):
        pre = f.preimage_mask(f.cod.up[f.table[x]])
        if dom.up[x] & ~dom.closure_mask(pre) == 0:
            ac |= 1 << x
        if dom.up[x] & ~dom.closure_mask(dom.interior_mask(pre)) == 0:
            qc |= 1 << x
    return PointSet(dom, ac), PointSet(dom, qc)


# -- series and indices ------------------------------------------------------


@dataclass(frozen=True)
class SeriesReport:
    """A discontinuity series with its index and a positive or negative
    certificate. sets strictly decreases; when the series vanishes the
    index is its length minus one, otherwise the last set is the kernel."""

    kind: str  # "plain" | "closed"
    sets: tuple
    index: int | None
    holds: bool
    kernel: object | None = None

    @property
    def verdict(self) -> str:
        return "holds" if self.holds else "fails"


def sc_series(f: FiniteMap) -> SeriesReport:
    """Plain series D_{a+1} = D(f|D_a); vanishes exactly for scatteredly
    continuous maps, stabilizes on a kernel without continuity points
    otherwise."""
    dom = f.dom
    sets = [dom.full]
    while sets[-1]:
        nxt = _disc_mask(f, sets[-1])
        if nxt == sets[-1]:
            return SeriesReport(
                kind="plain",
                sets=tuple(PointSet(dom, m) for m in sets),
                index=None,
                holds=False,
                kernel=PointSet(dom, nxt),
            )
        sets.append(nxt)
    return SeriesReport(
        kind="plain",
        sets=tuple(PointSet(dom, m) for m in sets),
        index=len(sets) - 1,
        holds=True,
    )


def wd_series(f: FiniteMap) -> SeriesReport:
    """Closed series D_{a+1} = cl(D(f|D_a)); vanishes exactly for weakly
    discontinuous maps, stabilizes on a closed set in which the
    discontinuity points are dense otherwise."""
    dom = f.dom
    sets = [dom.full]
    while sets[-1]:
        nxt = dom.closure_mask(_disc_mask(f, sets[-1]))
        if nxt == sets[-1]:
            return SeriesReport(
                kind="closed",
                sets=tuple(PointSet(dom, m) for m in sets),
                index=None,
                holds=False,
                kernel=PointSet(dom, nxt),
            )
        sets.append(nxt)
    return SeriesReport(
        kind="closed",
        sets=tuple(PointSet(dom, m) for m in sets),
        index=len(sets) - 1,
        holds=True,
    )


def sc_bruteforce(f: FiniteMap, guard: int | None = None) -> bool:
    """Definition scan: every non-empty subspace restriction has a
    continuity point. Independent oracle for sc_series."""
    limit = brute_guard() if guard is None else guard
    if f.dom.n > limit:
        raise SizeGuardExceeded(f"{f.dom.n} points exceeds guard {limit}")
    for a in range(1, f.dom.full + 1):
        if _disc_mask(f, a) == a:
            return False
    return True


def wd_bruteforce(f: FiniteMap, guard: int | None = None) -> bool:
    """Definition scan: for every subspace Z the discontinuity set of the
    restriction is nowhere dense in Z. Independent oracle for wd_series."""
    limit = brute_guard() if guard is None else guard
    if f.dom.n > limit:
        raise SizeGuardExceeded(f"{f.dom.n} points exceeds guard {limit}")
    dom = f.dom
    for z in range(1, dom.full + 1):
        d = _disc_mask(f, z)
        cl_z = dom.closure_mask(d) & z
        # relative interior within the subspace z
        for x in bits(z):
            if dom.up[x] & z & ~cl_z == 0 and (cl_z >> x) & 1:
                return False
    return True


# -- well orders -------------------------------------------------------------


@dataclass(frozen=True)
class WellOrderWitness:
    """A point order such that f restricted to each tail is continuous at
    the tail's first point; this pushes continuity at the minimum down to
    every subset containing it."""

    order: tuple[int, ...]


def well_order_witness(f: FiniteMap) -> WellOrderWitness | None:
    rep = sc_series(f)
    if not rep.holds:
        return None
    order: list[int] = []
    for here, nxt in zip(rep.sets, rep.sets[1:]):
        order.extend(bits(here.mask & ~nxt.mask))
    return WellOrderWitness(order=tuple(order))


def witness_verifies(f: FiniteMap, witness: WellOrderWitness) -> bool:
    """Tail criterion: f restricted to each suffix of the order is
    continuous at the suffix's first point."""
    if sorted(witness.order) != list(range(f.dom.n)):
        return False
    tail = f.dom.full
    for x in witness.order:
        if (_disc_mask(f, tail) >> x) & 1:
            return False
        tail &= ~(1 << x)
    return True


def witness_verifies_all_subsets(
    f: FiniteMap, witness: WellOrderWitness, guard: int | None = None
) -> bool:
    """Literal criterion: the order-minimum of every non-empty subset is a
    continuity point of the restriction to it."""
    limit = brute_guard() if guard is None else guard
    if f.dom.n > limit:
        raise SizeGuardExceeded(f"{f.dom.n} points exceeds guard {limit}")
    position = {x: i for i, x in enumerate(witness.order)}
    for a in range(1, f.dom.full + 1):
        first = min(bits(a), key=position.__getitem__)
        if (_disc_mask(f, a) >> first) & 1:
            return False
    return True


def verify_vanishing_series(f: FiniteMap, sets, closed_required: bool) -> bool:
    """Check a candidate vanishing series against the map.

    Structural defects (wrong endpoints, non-strict decrease) raise
    MalformedSeries; semantic defects (a step missing discontinuity
    points, a non-closed level when closedness is required) return
    False. A valid series can never be shorter than the computed index.
    """
    masks = [s.mask if isinstance(s, PointSet) else s for s in sets]
    if not masks or masks[0] != f.dom.full:
        raise MalformedSeries("series must start at the whole domain")
    if masks[-1] != 0:
        raise MalformedSeries("series must end at the empty set")
    for a, b in zip(masks, masks[1:]):
        if b == a:
            raise MalformedSeries("series must strictly decrease")
        if b & ~a:
            raise MalformedSeries("series must decrease")
    for a, b in zip(masks, masks[1:]):
        if _disc_mask(f, a) & ~b:
            return False
    if closed_required and not all(f.dom.is_closed(m) for m in masks):
        return False
    computed = wd_series(f) if closed_required else sc_series(f)
    if computed.holds and len(masks) - 1 < computed.index:
        raise MalformedSeries(
            "a valid series shorter than the minimal vanishing length"
        )
    return True


# -- decomposition numbers ---------------------------------------------------


@dataclass(frozen=True)
class Cardinality:
    """Size class of a cover: Finite(n) < CountablyInfinite < None."""

    kind: str  # "finite" | "countably-infinite" | "none"
    size: int | None = None

    @classmethod
    def finite(cls, n: int) -> "Cardinality":
        return cls("finite", n)

    @classmethod
    def countably_infinite(cls) -> "Cardinality":
        return cls("countably-infinite")

    @classmethod
    def impossible(cls) -> "Cardinality":
        return cls("none")

    def key(self):
        if self.kind == "finite":
            return (0, self.size)
        if self.kind == "countably-infinite":
            return (1, 0)
        return (2, 0)

    def __le__(self, other: "Cardinality") -> bool:
        return self.key() <= other.key()

    def __lt__(self, other: "Cardinality") -> bool:
        return self.key() < other.key()

    def __str__(self):
        if self.kind == "finite":
            return f"finite:{self.size}"
        return self.kind


@dataclass(frozen=True)
class ImpossibilityWitness:
    """A specialization pair x below y with f(x) not below f(y); every
    closed piece containing y contains x and breaks there."""

    x: int
    y: int
    uncovered: int


@dataclass(frozen=True)
class CoverResult:
    mode: str  # "arbitrary" | "closed"
    pieces: tuple
    cardinality: Cardinality
    certificates: tuple = ()
    impossibility: ImpossibilityWitness | None = None
    greedy_size: int | None = None


def _min_cover_size(candidates: list[int], full: int):
    """Exact minimum cover by branch and bound over the candidate masks;
    returns (size, chosen masks)."""
    if full == 0:
        return 0, []
    # greedy upper bound
    chosen = []
    uncovered = full
    while uncovered:
        best = max(candidates, key=lambda m: popcount(m & uncovered))
        if not best & uncovered:
            return None, None
        chosen.append(best)
        uncovered &= ~best
    best_size = len(chosen)
    best_sets = list(chosen)
    biggest = max(popcount(m) for m in candidates)

    def search(uncovered: int, picked: list[int]):
        nonlocal best_size, best_sets
        if not uncovered:
            if len(picked) < best_size:
                best_size = len(picked)
                best_sets = list(picked)
            return
        lower = len(picked) + (popcount(uncovered) + biggest - 1) // biggest
        if lower >= best_size:
            return
        x = next(bits(uncovered))
        for m in candidates:
            if (m >> x) & 1:
                picked.append(m)
                search(uncovered & ~m, picked)
                picked.pop()

    search(full, [])
    return best_size, best_sets


def dec_arbitrary(f: FiniteMap, guard: int | None = None) -> CoverResult:
    """Least number of arbitrary pieces with continuous restrictions.

    Continuity is inherited by subsets, so only maximal continuous
    subsets matter; the exact minimum comes from branch and bound over
    them, with the greedy bound reported alongside.
    """
    limit = brute_guard() if guard is None else guard
    dom = f.dom
    if dom.n > limit:
        raise SizeGuardExceeded(f"{dom.n} points exceeds guard {limit}")
    if dom.n == 0:
        return CoverResult("arbitrary", (), Cardinality.finite(0), greedy_size=0)
    if _disc_mask(f, dom.full) == 0:
        full = dom.full_set()
        return CoverResult(
            "arbitrary", (full,), Cardinality.finite(1), (True,), greedy_size=1
        )
    continuous = [m for m in range(1, dom.full + 1) if _disc_mask(f, m) == 0]
    maximal = [
        m
        for m in continuous
        if all(
            _disc_mask(f, m | (1 << x)) != 0 for x in bits(dom.full & ~m)
        )
    ]
    # greedy pass for the reported upper bound
    uncovered = dom.full
    greedy = 0
    while uncovered:
        best = max(maximal, key=lambda m: popcount(m & uncovered))
        uncovered &= ~best
        greedy += 1
    size, sets = _min_cover_size(maximal, dom.full)
    pieces = tuple(PointSet(dom, m) for m in sets)
    return CoverResult(
        mode="arbitrary",
        pieces=pieces,
        cardinality=Cardinality.finite(size),
        certificates=tuple(_disc_mask(f, p.mask) == 0 for p in pieces),
        greedy_size=greedy,
    )


def dec_closed(f: FiniteMap, guard: int | None = None) -> CoverResult:
    """Least size of a closed cover with continuous restrictions, by
    exhaustive search over closed pieces; when no cover exists the result
    carries a forced non-monotone specialization pair."""
    limit = brute_guard() if guard is None else guard
    dom = f.dom
    if dom.n > limit:
        raise SizeGuardExceeded(f"{dom.n} points exceeds guard {limit}")
    if dom.n == 0:
        return CoverResult("closed", (), Cardinality.finite(0))
    closed_continuous = [
        m
        for m in range(1, dom.full + 1)
        if dom.is_closed(m) and _disc_mask(f, m) == 0
    ]
    coverable = 0
    for m in closed_continuous:
        coverable |= m
    if coverable != dom.full:
        uncovered = next(bits(dom.full & ~coverable))
        witness = None
        region = dom.down[uncovered]
        for x in bits(region):
            for y in bits(dom.up[x] & region):
                if not f.cod.le(f.table[x], f.table[y]):
                    witness = ImpossibilityWitness(x=x, y=y, uncovered=uncovered)
                    break
            if witness:
                break
        return CoverResult(
            mode="closed",
            pieces=(),
            cardinality=Cardinality.impossible(),
            impossibility=witness,
        )
    maximal = [
        m
        for m in closed_continuous
        if not any(
            other != m and m & ~other == 0 for other in closed_continuous
        )
    ]
    size, sets = _min_cover_size(maximal, dom.full)
    pieces = tuple(PointSet(dom, m) for m in sets)
    return CoverResult(
        mode="closed",
        pieces=pieces,
        cardinality=Cardinality.finite(size),
        certificates=tuple(
            dom.is_closed(p.mask) and _disc_mask(f, p.mask) == 0 for p in pieces
        ),
    )


def impossibility_verifies(f: FiniteMap, witness: ImpossibilityWitness) -> bool:
    return f.dom.le(witness.x, witness.y) and not f.cod.le(
        f.table[witness.x], f.table[witness.y]
    )


# -- measurability -----------------------------------------------------------


@dataclass(frozen=True)
class GdeltaResult:
    """Countable intersections of opens collapse to opens on a finite
    space, so measurability against them coincides with continuity; the
    note records that degeneration and a failing open is kept as witness."""

    measurable: bool
    witness_open: PointSet | None
    witness_preimage: PointSet | None
    note: str = (
        "finite space: countable intersections of opens are open, "
        "so the check degenerates to continuity"
    )


def gdelta_measurable(f: FiniteMap) -> GdeltaResult:
    # minimal opens generate all opens under union, and preimages commute
    # with unions, so scanning them decides every open at once
    for y in range(f.cod.n):
        u = f.cod.up[y]
        pre = f.preimage_mask(u)
        if not f.dom.is_open(pre):
            return GdeltaResult(
                measurable=False,
                witness_open=PointSet(f.cod, u),
                witness_preimage=PointSet(f.dom, pre),
            )
    return GdeltaResult(measurable=True, witness_open=None, witness_preimage=None)


# -- composition bounds ------------------------------------------------------


def ordinal_product(a: int, b: int) -> int:
    """Product by the successor recursion: a*0 = 0, a*(b+1) = a*b + a.
    Equals ordinary multiplication on naturals."""
    total = 0
    for _ in range(b):
        total += a
    return total


@dataclass(frozen=True)
class CheckOutcome:
    check: str
    status: str  # "holds" | "violated" | "hypothesis-not-met"
    detail: str = ""


@dataclass(frozen=True)
class CompositionReport:
    f_summary: str
    g_summary: str
    checks: tuple[CheckOutcome, ...]

    @property
    def violations(self) -> tuple[CheckOutcome, ...]:
        return tuple(c for c in self.checks if c.status == "violated")


def check_composition_bounds(f: FiniteMap, g: FiniteMap) -> CompositionReport:
    """Evaluate the applicable composition laws for the given pair.

    Index bounds use the ordinal product. The scattered-continuity law
    for a composition of two scatteredly continuous maps is gated on the
    regularity of the middle space: a failure without that hypothesis is
    reported as hypothesis-not-met, never as a violation.
    """
    from .finspace import properties

    h = compose(f, g)
    sc_f, wd_f = sc_series(f), wd_series(f)
    sc_g, wd_g = sc_series(g), wd_series(g)
    sc_h, wd_h = sc_series(h), wd_series(h)
    middle_regular = properties(f.cod).regular
    checks = []

    if wd_f.holds and wd_g.holds:
        bound = ordinal_product(wd_g.index, wd_f.index)
        ok = wd_h.holds and wd_h.index <= bound
        checks.append(
            CheckOutcome(
                "comp-wd-wd",
                "holds" if ok else "violated",
                f"wd(g.f)={wd_h.index if wd_h.holds else 'fails'} <= "
                f"wd(g)*wd(f)={bound}",
            )
        )
    else:
        checks.append(CheckOutcome("comp-wd-wd", "hypothesis-not-met", "needs both maps weakly discontinuous"))

    if wd_f.holds and sc_g.holds:
        bound = ordinal_product(sc_g.index, wd_f.index)
        ok = sc_h.holds and sc_h.index <= bound
        checks.append(
            CheckOutcome(
                "comp-sc-after-wd",
                "holds" if ok else "violated",
                f"sc(g.f)={sc_h.index if sc_h.holds else 'fails'} <= "
                f"sc(g)*wd(f)={bound}",
            )
        )
    else:
        checks.append(
            CheckOutcome(
                "comp-sc-after-wd",
                "hypothesis-not-met",
                "needs f weakly discontinuous and g scatteredly continuous",
            )
        )

    if sc_f.holds and sc_g.holds:
        if middle_regular:
            checks.append(
                CheckOutcome(
                    "comp-sc-sc-regular-middle",
                    "holds" if sc_h.holds else "violated",
                    f"composite sc verdict: {sc_h.verdict}",
                )
            )
        else:
            checks.append(
                CheckOutcome(
                    "comp-sc-sc-regular-middle",
                    "hypothesis-not-met",
                    f"middle space not regular; composite sc verdict: {sc_h.verdict}",
                )
            )
    else:
        checks.append(
            CheckOutcome(
                "comp-sc-sc-regular-middle",
                "hypothesis-not-met",
                "needs both maps scatteredly continuous",
            )
        )

    try:
        dc_f = dec_closed(f).cardinality
        dc_g = dec_closed(g).cardinality
        dc_h = dec_closed(h).cardinality
        bound = max(dc_f, dc_g, key=Cardinality.key)
        checks.append(
            CheckOutcome(
                "comp-dec-closed-max",
                "holds" if dc_h <= bound else "violated",
                f"dec_c(g.f)={dc_h} <= max({dc_f},{dc_g})",
            )
        )
    except SizeGuardExceeded:
        checks.append(
            CheckOutcome("comp-dec-closed-max", "hypothesis-not-met", "size guard")
        )

    return CompositionReport(
        f_summary=f"f: {f.dom.n} -> {f.cod.n} points",
        g_summary=f"g: {g.dom.n} -> {g.cod.n} points",
        checks=tuple(checks),
    )
