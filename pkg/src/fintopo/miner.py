"""Exhaustive enumeration, law verification and counterexample mining.

Campaigns run over all preorders up to configured sizes (optionally one
representative per isomorphism class; the checked laws are invariant
under relabeling both sides). A violation is a law failing inside its
hypotheses and is fatal; an instance escaping a law outside its
hypotheses is an expected, separately counted finding. Reports are
deterministic given bounds and seed, independent of the worker count:
shards are independent and the merge sorts findings and sums counters.
"""

from __future__ import annotations

import os
import random
import time
from collections import Counter
from dataclasses import dataclass
from itertools import permutations, product

from .errors import SizeGuardExceeded, UnknownPattern
from .finspace import (
    FiniteSpace,
    canonical_form,
    cantor_bendixson,
    closed_chain_length,
    large_pseudocharacter,
    open_family,
    properties,
    regular_bruteforce,
)
from .mapcalc import (
    Cardinality,
    FiniteMap,
    compose,
    dec_closed,
    gdelta_measurable,
    impossibility_verifies,
    is_continuous,
    ordinal_product,
    sc_bruteforce,
    sc_series,
    wd_bruteforce,
    wd_series,
)

RNG_NAME = "mt19937"  # python's random.Random; streams reproduce from the seed


def enum_guard() -> int:
    return int(os.environ.get("FINTOPO_ENUM_GUARD", "5"))


def map_guard() -> int:
    return int(os.environ.get("FINTOPO_MAP_GUARD", "1000000"))


# -- enumeration -------------------------------------------------------------


def enumerate_spaces(n: int, up_to_iso: bool = False, guard: int | None = None):
    """All reflexive-transitive relations on n points, as spaces.

    Rows are assigned depth-first as minimal-neighborhood masks with the
    pairwise transitivity condition pruned along the way. With up_to_iso
    one representative per canonical digest is kept.
    """
    limit = enum_guard() if guard is None else guard
    if n > limit:
        raise SizeGuardExceeded(f"enumeration of {n}-point spaces exceeds guard {limit}")
    seen: set[str] = set()
    for up in _preorder_rows(n):
        space = FiniteSpace(n, up)
        if up_to_iso:
            if space.canonical_digest in seen:
                continue
            seen.add(space.canonical_digest)
        yield space


def _preorder_rows(n: int):
    if n == 0:
        yield ()
        return
    rows: list[int] = []

    def consistent(i: int) -> bool:
        ri = rows[i]
        for j in range(i + 1):
            rj = rows[j]
            if (ri >> j) & 1 and rj | ri != ri:
                return False
            if (rj >> i) & 1 and ri | rj != rj:
                return False
        return True

    def rec(i: int):
        if i == n:
            yield tuple(rows)
            return
        for mask in range(1 << n):
            if not (mask >> i) & 1:
                continue
            rows.append(mask)
            if consistent(i):
                yield from rec(i + 1)
            rows.pop()

    yield from rec(0)


def enumerate_maps(
    x: FiniteSpace, y: FiniteSpace, bijective_only: bool = False, guard: int | None = None
):
    """All total tables from x to y, optionally bijections only."""
    limit = map_guard() if guard is None else guard
    total = y.n**x.n if x.n else 1
    if not bijective_only and total > limit:
        raise SizeGuardExceeded(f"{total} maps exceeds guard {limit}")
    if bijective_only:
        if x.n != y.n:
            return
        for perm in permutations(range(y.n)):
            yield FiniteMap(x, y, perm)
        return
    if x.n == 0:
        yield FiniteMap(x, y, ())
        return
    if y.n == 0:
        return
    for table in product(range(y.n), repeat=x.n):
        yield FiniteMap(x, y, table)


def automorphisms(space: FiniteSpace) -> list[tuple[int, ...]]:
    out = []
    for perm in permutations(range(space.n)):
        if all(
            space.le(x, y) == space.le(perm[x], perm[y])
            for x in range(space.n)
            for y in range(space.n)
        ):
            out.append(perm)
    return out


# -- canonical instance codes --------------------------------------------------


def encode_space(space: FiniteSpace) -> str:
    return f"{space.n}:" + ".".join(str(r) for r in space.up)


def decode_space(code: str) -> FiniteSpace:
    head, _, body = code.partition(":")
    n = int(head)
    rows = [int(r) for r in body.split(".")] if body else []
    return FiniteSpace(n, rows)


def encode_map(f: FiniteMap) -> str:
    table = ",".join(str(v) for v in f.table)
    return f"{encode_space(f.dom)}>{encode_space(f.cod)}|{table}"


def decode_map(code: str) -> FiniteMap:
    spaces, _, table = code.partition("|")
    dom_code, _, cod_code = spaces.partition(">")
    values = tuple(int(v) for v in table.split(",")) if table else ()
    return FiniteMap(decode_space(dom_code), decode_space(cod_code), values)


def canonical_map_code(f: FiniteMap) -> str:
    """Instance code invariant under relabeling the domain and codomain:
    both spaces are canonicalized and the table is minimized over their
    automorphism pairs."""
    cdom = canonical_form(f.dom)
    ccod = canonical_form(f.cod)
    dom_pos = {x: i for i, x in enumerate(cdom.order)}
    cod_pos = {y: i for i, y in enumerate(ccod.order)}
    base = [0] * f.dom.n
    for old_x, val in enumerate(f.table):
        base[dom_pos[old_x]] = cod_pos[val]
    best = None
    for pa in automorphisms(cdom.space):
        for pb in automorphisms(ccod.space):
            table = tuple(pb[base[pa[x]]] for x in range(f.dom.n))
            if best is None or table < best:
                best = table
    probe = FiniteMap(cdom.space, ccod.space, best if best is not None else ())
    return encode_map(probe)


# -- reports -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Finding:
    check: str
    kind: str  # "violation" | "counterexample" | "hypothesis-gated" | "witness" | "extremal"
    instance: str
    certificate: str = ""

    def record_line(self) -> str:
        return (
            f"finding check={self.check} kind={self.kind} "
            f"instance={self.instance} certificate={self.certificate or '-'}"
        )


@dataclass
class MinerReport:
    campaign: str
    bounds: dict
    seed: int | None
    counts: dict
    findings: list[Finding]
    wall_time: float
    rng: str = RNG_NAME

    @property
    def violations(self) -> list[Finding]:
        return [f for f in self.findings if f.kind == "violation"]

    def record_lines(self) -> list[str]:
        # timing and worker count are excluded so records are byte-stable
        meta = [
            f"meta campaign={self.campaign} "
            + " ".join(f"{k}={v}" for k, v in sorted(self.bounds.items()))
            + f" rng={self.rng} seed={self.seed if self.seed is not None else '-'}"
        ]
        counts = [f"count {k} = {v}" for k, v in sorted(self.counts.items())]
        findings = [f.record_line() for f in sorted(self.findings)]
        return sorted(meta + counts + findings)


@dataclass(frozen=True)
class EnumerationTask:
    max_points_x: int = 3
    max_points_y: int = 3
    max_points_space: int = 4  # space-level property cross-checks
    up_to_iso: bool = True
    seed: int | None = None
    samples: int = 0
    sample_max_n: int = 6
    jobs: int = 1


# -- space list cache ----------------------------------------------------------

_SPACE_CACHE: dict = {}


def _space_lists(max_n: int, up_to_iso: bool) -> dict[int, list[FiniteSpace]]:
    key = (max_n, up_to_iso)
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = {
            n: list(enumerate_spaces(n, up_to_iso=up_to_iso)) for n in range(1, max_n + 1)
        }
    return _SPACE_CACHE[key]


_PROPS_CACHE: dict = {}


def _props(space: FiniteSpace):
    key = (space.n, space.up)
    if key not in _PROPS_CACHE:
        _PROPS_CACHE[key] = properties(space)
    return _PROPS_CACHE[key]


# -- verification campaigns ------------------------------------------------------


def _map_checks(x, y, f, counts, findings):
    scs = sc_series(f)
    wds = wd_series(f)
    scb = sc_bruteforce(f)
    wdb = wd_bruteforce(f)
    counts["maps"] += 1
    code = None

    def instance():
        nonlocal code
        if code is None:
            code = canonical_map_code(f)
        return code

    if scs.holds != scb:
        findings.append(
            Finding(
                "sc-series-oracle",
                "violation",
                instance(),
                f"series={scs.verdict},bruteforce={scb}",
            )
        )
    if wds.holds != wdb:
        findings.append(
            Finding(
                "wd-series-oracle",
                "violation",
                instance(),
                f"series={wds.verdict},bruteforce={wdb}",
            )
        )
    if wds.holds and not scs.holds:
        findings.append(Finding("wd-implies-sc", "violation", instance()))
    y_regular = _props(y).regular
    if scs.holds and not wds.holds:
        if y_regular:
            findings.append(
                Finding("sc-implies-wd-regular-target", "violation", instance())
            )
        else:
            counts["gated-sc-not-wd-nonregular-target"] += 1
            findings.append(
                Finding(
                    "sc-not-wd-nonregular-target",
                    "hypothesis-gated",
                    instance(),
                    f"wd-kernel={_kernel_code(wds)}",
                )
            )
    if wds.holds:
        if not (scs.holds and scs.index <= wds.index <= closed_chain_length(x)):
            findings.append(
                Finding(
                    "index-chain-bound",
                    "violation",
                    instance(),
                    f"sc={scs.index},wd={wds.index},chain={closed_chain_length(x)}",
                )
            )
    dc = dec_closed(f)
    cont = is_continuous(f)
    if dc.cardinality.kind == "none":
        ok = (
            not cont
            and dc.impossibility is not None
            and impossibility_verifies(f, dc.impossibility)
        )
        if not ok:
            findings.append(
                Finding("dec-closed-dichotomy", "violation", instance(), "bad-impossibility")
            )
    elif dc.cardinality != Cardinality.finite(1) or not cont:
        findings.append(
            Finding(
                "dec-closed-dichotomy",
                "violation",
                instance(),
                f"cardinality={dc.cardinality},continuous={cont}",
            )
        )
    gd = gdelta_measurable(f)
    if dc.cardinality.kind == "finite" and not gd.measurable:
        findings.append(Finding("piecewise-implies-gdelta", "violation", instance()))
    psi = large_pseudocharacter(x)
    if psi is not None:
        if wds.holds:
            bound = max(wds.index, psi)
            if not (dc.cardinality.kind == "finite" and dc.cardinality.size <= bound):
                findings.append(
                    Finding(
                        "dec-closed-partition-domain",
                        "violation",
                        instance(),
                        f"dec={dc.cardinality},bound={bound}",
                    )
                )
    else:
        counts["gated-partition-domain"] += 1
    return scs, wds, dc


def _kernel_code(report) -> str:
    if report.kernel is None:
        return "-"
    return ".".join(str(x) for x in report.kernel.members()) or "-"


def _pair_shard(task: EnumerationTask, nx, ix, ny, iy):
    lists = _space_lists(max(task.max_points_x, task.max_points_y), task.up_to_iso)
    x = lists[nx][ix]
    y = lists[ny][iy]
    counts: Counter = Counter()
    findings: list[Finding] = []
    counts["pairs"] += 1

    composite_cache: dict = {}
    g_cache: dict = {}

    for f in enumerate_maps(x, y):
        scs, wds, dec_f = _map_checks(x, y, f, counts, findings)
        # composition laws against every continuation out of y
        for nz in range(1, task.max_points_y + 1):
            for iz, z in enumerate(lists[nz]):
                for g in enumerate_maps(y, z):
                    gkey = (nz, iz, g.table)
                    if gkey not in g_cache:
                        g_cache[gkey] = (sc_series(g), wd_series(g), dec_closed(g))
                    sc_g, wd_g, dec_g = g_cache[gkey]
                    h = compose(f, g)
                    hkey = (nz, iz, h.table)
                    if hkey not in composite_cache:
                        composite_cache[hkey] = (
                            sc_series(h),
                            wd_series(h),
                            dec_closed(h),
                        )
                    sc_h, wd_h, dec_h = composite_cache[hkey]
                    counts["composable-pairs"] += 1
                    pair_code = None

                    def pinstance():
                        nonlocal pair_code
                        if pair_code is None:
                            pair_code = f"{canonical_map_code(f)};{canonical_map_code(g)}"
                        return pair_code

                    if wds.holds and wd_g.holds:
                        bound = ordinal_product(wd_g.index, wds.index)
                        if not (wd_h.holds and wd_h.index <= bound):
                            findings.append(
                                Finding("comp-wd-wd", "violation", pinstance())
                            )
                    if wds.holds and sc_g.holds:
                        bound = ordinal_product(sc_g.index, wds.index)
                        if not (sc_h.holds and sc_h.index <= bound):
                            findings.append(
                                Finding("comp-sc-after-wd", "violation", pinstance())
                            )
                    if scs.holds and sc_g.holds:
                        if _props(y).regular:
                            if not sc_h.holds:
                                findings.append(
                                    Finding(
                                        "comp-sc-sc-regular-middle",
                                        "violation",
                                        pinstance(),
                                    )
                                )
                        elif not sc_h.holds:
                            counts["gated-comp-sc-sc"] += 1
                    big = max(dec_g.cardinality, dec_f.cardinality, key=Cardinality.key)
                    if not dec_h.cardinality <= big:
                        findings.append(
                            Finding("comp-dec-closed-max", "violation", pinstance())
                        )
    # bijections into scattered targets of the same size
    if nx == ny:
        x_scattered = _props(x).scattered
        y_scattered = _props(y).scattered
        if x_scattered and y_scattered:
            for b in enumerate_maps(x, y, bijective_only=True):
                counts["bijections-checked"] += 1
                if not sc_bruteforce(b):
                    findings.append(
                        Finding(
                            "scattered-bijection-forward",
                            "violation",
                            canonical_map_code(b),
                        )
                    )
    return counts, findings


def _converse_shard(task: EnumerationTask, nx, ix):
    """A non-scattered domain must admit a bijection onto some scattered
    space of the same size that is not scatteredly continuous."""
    lists = _space_lists(max(task.max_points_x, task.max_points_y), task.up_to_iso)
    x = lists[nx][ix]
    counts: Counter = Counter()
    findings: list[Finding] = []
    if _props(x).scattered:
        return counts, findings
    counts["non-scattered-domains"] += 1
    for y in lists.get(nx, []):
        if not _props(y).scattered:
            continue
        for b in enumerate_maps(x, y, bijective_only=True):
            if not sc_bruteforce(b):
                findings.append(
                    Finding(
                        "scattered-bijection-converse",
                        "witness",
                        canonical_map_code(b),
                    )
                )
                return counts, findings
    findings.append(
        Finding("scattered-bijection-converse", "violation", encode_space(x))
    )
    return counts, findings


def _space_shard(task: EnumerationTask, n, i):
    """Space-level property cross-checks: the separation predicates must
    agree with their first-principles reformulations."""
    lists = _space_lists(
        max(task.max_points_x, task.max_points_y, task.max_points_space),
        task.up_to_iso,
    )
    x = lists[n][i]
    counts: Counter = Counter()
    findings: list[Finding] = []
    counts["spaces-checked"] += 1
    p = properties(x)
    ok = True
    ok &= p.t1 == all(x.up[v] == 1 << v for v in range(x.n))
    ok &= p.t2 == p.t1
    ok &= (not p.partition) or p.regular
    ok &= p.regular == regular_bruteforce(x)
    ok &= p.scattered == cantor_bendixson(x).scattered
    ok &= p.scattered == all(
        x.points(m).isolated_points().mask for m in range(1, x.full + 1)
    )
    ok &= FiniteSpace.from_open_family(x.n, open_family(x)) == x
    if not ok:
        findings.append(Finding("space-properties", "violation", encode_space(x)))
    return counts, findings


def _samples_shard(task: EnumerationTask):
    counts: Counter = Counter()
    findings: list[Finding] = []
    if not task.samples:
        return counts, findings
    rng = random.Random(task.seed if task.seed is not None else 0)
    for _ in range(task.samples):
        nx = rng.randint(1, task.sample_max_n)
        ny = rng.randint(1, min(task.max_points_y, 4))
        x = _random_space(rng, nx)
        y = _random_space(rng, ny)
        f = FiniteMap(x, y, tuple(rng.randrange(ny) for _ in range(nx)))
        counts["samples"] += 1
        scs, wds = sc_series(f), wd_series(f)
        if scs.holds != sc_bruteforce(f) or wds.holds != wd_bruteforce(f):
            findings.append(
                Finding("sc-series-oracle", "violation", encode_map(f), "sampled")
            )
        if wds.holds and not (
            scs.holds and scs.index <= wds.index <= closed_chain_length(x)
        ):
            findings.append(
                Finding("index-chain-bound", "violation", encode_map(f), "sampled")
            )
    return counts, findings


def _random_space(rng: random.Random, n: int) -> FiniteSpace:
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and rng.random() < 0.3
    ]
    return FiniteSpace.from_le_pairs(n, pairs, close=True)


def _run_shard(args):
    task, shard = args
    if shard[0] == "pair":
        return _pair_shard(task, *shard[1:])
    if shard[0] == "converse":
        return _converse_shard(task, *shard[1:])
    if shard[0] == "space":
        return _space_shard(task, *shard[1:])
    return _samples_shard(task)


def verify_suite(task: EnumerationTask) -> MinerReport:
    """Run every law campaign inside the bounds; zero violations expected."""
    start = time.monotonic()
    empty = task.max_points_x == 0 and task.max_points_y == 0
    space_bound = 0 if empty else task.max_points_space
    lists = _space_lists(
        max(task.max_points_x, task.max_points_y, space_bound),
        task.up_to_iso,
    )
    shards: list[tuple] = []
    for n in range(1, space_bound + 1):
        for i in range(len(lists[n])):
            shards.append(("space", n, i))
    for nx in range(1, task.max_points_x + 1):
        for ix in range(len(lists[nx])):
            shards.append(("converse", nx, ix))
            for ny in range(1, task.max_points_y + 1):
                for iy in range(len(lists[ny])):
                    shards.append(("pair", nx, ix, ny, iy))
    shards.append(("samples",))
    payload = [(task, s) for s in shards]
    if task.jobs > 1:
        import multiprocessing

        with multiprocessing.Pool(task.jobs) as pool:
            results = pool.map(_run_shard, payload)
    else:
        results = [_run_shard(p) for p in payload]
    counts: Counter = Counter()
    findings: list[Finding] = []
    for c, f in results:
        counts.update(c)
        findings.extend(f)
    findings = sorted(set(findings))  # canonical instances collapse duplicates
    return MinerReport(
        campaign="verify",
        bounds={
            "max-x": task.max_points_x,
            "max-y": task.max_points_y,
            "labeled": not task.up_to_iso,
            "samples": task.samples,
        },
        seed=task.seed,
        counts=dict(counts),
        findings=findings,
        wall_time=time.monotonic() - start,
    )


# -- counterexample mining -------------------------------------------------------


MINE_PATTERNS = ("sc-not-wd", "composition-break", "sc-wd-gap", "max-sc")


def mine(
    pattern: str,
    max_x: int,
    max_y: int,
    regular_middle: bool = False,
) -> MinerReport:
    """Search for witnesses of a pattern; absence is reported as a count
    of instances checked, never as a theorem."""
    start = time.monotonic()
    if pattern not in MINE_PATTERNS:
        raise UnknownPattern(f"unknown pattern {pattern!r}; know {MINE_PATTERNS}")
    lists = _space_lists(max(max_x, max_y), True)
    counts: Counter = Counter()
    witnesses: dict[str, Finding] = {}

    if pattern == "sc-not-wd":
        for nx in range(1, max_x + 1):
            for x in lists[nx]:
                for ny in range(1, max_y + 1):
                    for y in lists[ny]:
                        for f in enumerate_maps(x, y):
                            counts["maps"] += 1
                            if sc_bruteforce(f) and not wd_bruteforce(f):
                                code = canonical_map_code(f)
                                wds = wd_series(f)
                                witnesses[code] = Finding(
                                    "sc-not-wd",
                                    "counterexample",
                                    code,
                                    f"wd-kernel={_kernel_code(wds)}",
                                )
    elif pattern == "sc-wd-gap":
        for nx in range(1, max_x + 1):
            for x in lists[nx]:
                for ny in range(1, max_y + 1):
                    for y in lists[ny]:
                        for f in enumerate_maps(x, y):
                            counts["maps"] += 1
                            scs, wds = sc_series(f), wd_series(f)
                            if scs.holds and wds.holds and scs.index < wds.index:
                                code = canonical_map_code(f)
                                witnesses[code] = Finding(
                                    "sc-wd-gap",
                                    "counterexample",
                                    code,
                                    f"sc={scs.index},wd={wds.index}",
                                )
    elif pattern == "composition-break":
        sc_cache: dict = {}

        def sc_holds(key, m):
            if key not in sc_cache:
                sc_cache[key] = sc_series(m).holds
            return sc_cache[key]

        for nx in range(1, max_x + 1):
            for ix, x in enumerate(lists[nx]):
                for ny in range(1, max_y + 1):
                    for iy, y in enumerate(lists[ny]):
                        if regular_middle and not _props(y).regular:
                            continue
                        for f in enumerate_maps(x, y):
                            if not sc_bruteforce(f):
                                continue
                            for nz in range(1, max_y + 1):
                                for iz, z in enumerate(lists[nz]):
                                    for g in enumerate_maps(y, z):
                                        counts["pairs"] += 1
                                        if not sc_holds((ny, iy, nz, iz, g.table), g):
                                            continue
                                        h = compose(f, g)
                                        if not sc_holds(
                                            (nx, ix, nz, iz, h.table), h
                                        ):
                                            code = (
                                                f"{canonical_map_code(f)};"
                                                f"{canonical_map_code(g)}"
                                            )
                                            witnesses[code] = Finding(
                                                "composition-break",
                                                "counterexample",
                                                code,
                                                f"middle-regular={_props(y).regular}",
                                            )
    elif pattern == "max-sc":
        best = 0
        for x in lists[max_x]:
            for ny in range(1, max_y + 1):
                for y in lists[ny]:
                    for f in enumerate_maps(x, y):
                        counts["maps"] += 1
                        scs = sc_series(f)
                        if scs.holds and scs.index > best:
                            best = scs.index
                            witnesses.clear()
                        if scs.holds and scs.index == best:
                            code = canonical_map_code(f)
                            # chain length recorded to probe whether the
                            # index can escape the closed-chain bound
                            witnesses[code] = Finding(
                                "max-sc",
                                "extremal",
                                code,
                                f"sc={best},chain={closed_chain_length(x)}",
                            )
        counts["max-sc-index"] = best

    findings = sorted(witnesses.values())
    return MinerReport(
        campaign=f"mine-{pattern}",
        bounds={"max-x": max_x, "max-y": max_y, "regular-middle": regular_middle},
        seed=None,
        counts=dict(counts),
        findings=findings,
        wall_time=time.monotonic() - start,
    )


def finding_reverifies(finding: Finding) -> bool:
    """Re-check a finding's certificate through the map analyses; every
    report is expected to survive this."""
    if finding.check == "sc-not-wd":
        f = decode_map(finding.instance)
        return sc_bruteforce(f) and not wd_bruteforce(f)
    if finding.check == "sc-wd-gap":
        f = decode_map(finding.instance)
        scs, wds = sc_series(f), wd_series(f)
        return scs.holds and wds.holds and scs.index < wds.index
    if finding.check == "composition-break":
        fc, _, gc = finding.instance.partition(";")
        f, g = decode_map(fc), decode_map(gc)
        return (
            sc_bruteforce(f)
            and sc_bruteforce(g)
            and not sc_bruteforce(compose(f, g))
        )
    if finding.check == "max-sc":
        f = decode_map(finding.instance)
        rep = sc_series(f)
        return rep.holds and finding.certificate.startswith(f"sc={rep.index},")
    if finding.check == "scattered-bijection-converse" and finding.kind == "witness":
        f = decode_map(finding.instance)
        return f.is_bijective() and not sc_bruteforce(f)
    if finding.check == "sc-not-wd-nonregular-target":
        f = decode_map(finding.instance)
        return sc_bruteforce(f) and not wd_bruteforce(f) and not properties(f.cod).regular
    return True
