"""Command-line surface.

Subcommands: space check, map report, map compose, tree report, verify,
mine, enum spaces. Human-readable tables by default; --format records
emits one self-contained line per fact in sorted order, stable across
runs and worker counts. Report paths can render figures to files next
to the text output via --figures.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 guard exceeded, 4 law
violation found.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import figures, formats, miner, treespace
from .errors import (
    DocumentError,
    FintopoError,
    HeightExceeded,
    SizeGuardExceeded,
    UnknownPattern,
)
from .finspace import (
    cantor_bendixson,
    canonical_form,
    closed_chain_length,
    large_pseudocharacter,
    properties,
)
from .mapcalc import (
    ac_qc_sets,
    check_composition_bounds,
    compose,
    continuity_set,
    dec_arbitrary,
    dec_closed,
    discontinuity_set,
    gdelta_measurable,
    sc_series,
    wd_series,
    well_order_witness,
    witness_verifies,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="fintopo")
    sub = p.add_subparsers(dest="command")

    sp = sub.add_parser("space", add_help=True)
    sp_sub = sp.add_subparsers(dest="space_command")
    sp_check = sp_sub.add_parser("check")
    sp_check.add_argument("file")
    sp_check.add_argument("--close", action="store_true", help="take the transitive closure instead of rejecting")
    sp_check.add_argument("--format", choices=("table", "records"), default="table")

    mp = sub.add_parser("map")
    mp_sub = mp.add_subparsers(dest="map_command")
    mp_report = mp_sub.add_parser("report")
    mp_report.add_argument("file")
    mp_report.add_argument("--close", action="store_true")
    mp_report.add_argument("--format", choices=("table", "records"), default="table")
    mp_report.add_argument("--figures", metavar="DIR", help="render figures into DIR")
    mp_compose = mp_sub.add_parser("compose")
    mp_compose.add_argument("file_f")
    mp_compose.add_argument("file_g", nargs="?")
    mp_compose.add_argument("--close", action="store_true")
    mp_compose.add_argument("--bounds", action="store_true", help="evaluate composition index bounds")
    mp_compose.add_argument("--format", choices=("table", "records"), default="table")

    tp = sub.add_parser("tree")
    tp_sub = tp.add_subparsers(dest="tree_command")
    tp_report = tp_sub.add_parser("report")
    tp_report.add_argument("file")
    tp_report.add_argument("--close", action="store_true")
    tp_report.add_argument("--truncate", type=int, default=None, metavar="T")
    tp_report.add_argument("--format", choices=("table", "records"), default="table")
    tp_report.add_argument("--figures", metavar="DIR")

    vp = sub.add_parser("verify")
    vp.add_argument("--max-x", type=int, default=3)
    vp.add_argument("--max-y", type=int, default=3)
    vp.add_argument("--jobs", type=int, default=1)
    vp.add_argument("--seed", type=int, default=None)
    vp.add_argument("--samples", type=int, default=0)
    vp.add_argument("--labeled", action="store_true", help="enumerate labeled spaces instead of iso classes")
    vp.add_argument("--format", choices=("table", "records"), default="table")

    mn = sub.add_parser("mine")
    mn.add_argument("--pattern", required=True)
    mn.add_argument("--max-x", type=int, default=2)
    mn.add_argument("--max-y", type=int, default=2)
    mn.add_argument("--regular-middle", action="store_true")
    mn.add_argument("--format", choices=("table", "records"), default="table")

    en = sub.add_parser("enum")
    en_sub = en.add_subparsers(dest="enum_command")
    en_spaces = en_sub.add_parser("spaces")
    en_spaces.add_argument("--n", type=int, required=True)
    en_spaces.add_argument("--up-to-iso", action="store_true")
    en_spaces.add_argument("--format", choices=("table", "records"), default="table")

    return p


def _load(path: str, close: bool) -> formats.LoadedFile:
    text = Path(path).read_text(encoding="utf-8")
    return formats.instantiate(formats.parse_documents(text, close=close))


def _members(ps) -> str:
    body = ",".join(str(x) for x in ps.members())
    return body or "-"


def cmd_space_check(args) -> int:
    loaded = _load(args.file, args.close)
    lines = []
    for name, space in sorted(loaded.spaces.items()):
        props = properties(space)
        cb = cantor_bendixson(space)
        digest = canonical_form(space).digest[:16]
        psi = large_pseudocharacter(space)
        psi_s = "undefined" if psi is None else str(psi)
        if args.format == "records":
            lines.append(
                f"space name={name} points={space.n} t0={_yn(props.t0)} "
                f"t1={_yn(props.t1)} t2={_yn(props.t2)} regular={_yn(props.regular)} "
                f"scattered={_yn(props.scattered)} partition={_yn(props.partition)} "
                f"cb-height={cb.height} chain={closed_chain_length(space)} "
                f"psi={psi_s} par=1 digest={digest}"
            )
        else:
            lines.append(f"space {name}: {space.n} points")
            lines.append(
                f"  t0={_yn(props.t0)} t1={_yn(props.t1)} t2={_yn(props.t2)} "
                f"regular={_yn(props.regular)} partition={_yn(props.partition)}"
            )
            lines.append(
                f"  scattered={_yn(props.scattered)} (height {cb.height}), "
                f"closed chain length {closed_chain_length(space)}, "
                f"psi {psi_s}, par 1, digest {digest}"
            )
    print("\n".join(sorted(lines) if args.format == "records" else lines))
    return 0


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _map_records(name: str, f) -> list[str]:
    scs, wds = sc_series(f), wd_series(f)
    ac, qc = ac_qc_sets(f)
    c = continuity_set(f)
    d = discontinuity_set(f)
    dec = dec_arbitrary(f)
    dc = dec_closed(f)
    gd = gdelta_measurable(f)
    wo = well_order_witness(f)
    lines = [
        f"acqc map={name} c={_members(c)} d={_members(d)} ac={_members(ac)} qc={_members(qc)}",
        _series_record(name, scs),
        _series_record(name, wds),
        _cover_record(name, dec),
        _cover_record(name, dc),
        (
            f"gdelta map={name} measurable={_yn(gd.measurable)}"
            + (
                f" witness={_members(gd.witness_open)} preimage={_members(gd.witness_preimage)}"
                if not gd.measurable
                else ""
            )
        ),
        (
            f"wellorder map={name} order="
            + (",".join(str(x) for x in wo.order) if wo else "-")
            + f" verified={_yn(bool(wo and witness_verifies(f, wo)))}"
        ),
    ]
    return lines


def _series_record(name, rep) -> str:
    levels = "|".join(_members(s) for s in rep.sets)
    line = (
        f"series map={name} kind={rep.kind} verdict={rep.verdict} "
        f"index={rep.index if rep.index is not None else 'none'} levels={levels}"
    )
    if rep.kernel is not None:
        line += f" kernel={_members(rep.kernel)}"
    return line


def _cover_record(name, cover) -> str:
    line = f"cover map={name} mode={cover.mode} cardinality={cover.cardinality}"
    if cover.greedy_size is not None:
        line += f" greedy={cover.greedy_size}"
    pieces = "|".join(_members(p) for p in cover.pieces)
    if pieces:
        line += f" pieces={pieces}"
    if cover.impossibility is not None:
        w = cover.impossibility
        line += f" witness={w.x},{w.y}"
    return line


def _map_table(name: str, f) -> list[str]:
    scs, wds = sc_series(f), wd_series(f)
    ac, qc = ac_qc_sets(f)
    dec = dec_arbitrary(f)
    dc = dec_closed(f)
    gd = gdelta_measurable(f)
    wo = well_order_witness(f)
    out = [f"map {name}: {f.dom.n} -> {f.cod.n} points, table {list(f.table)}"]
    out.append(f"  continuity    C={_members(continuity_set(f))} D={_members(discontinuity_set(f))}")
    out.append(f"  almost/quasi  AC={_members(ac)} QC={_members(qc)}")
    for rep in (scs, wds):
        chain = " > ".join("{" + _members(s).replace("-", "") + "}" for s in rep.sets)
        tail = (
            f"index {rep.index}"
            if rep.holds
            else f"fails, kernel {{{_members(rep.kernel)}}}"
        )
        out.append(f"  series {rep.kind:<6} {tail}: {chain}")
    out.append(
        f"  dec           {dec.cardinality} pieces "
        + " ".join("{" + _members(p) + "}" for p in dec.pieces)
        + f" (greedy {dec.greedy_size})"
    )
    if dc.impossibility is None:
        out.append(f"  dec_c         {dc.cardinality}")
    else:
        w = dc.impossibility
        out.append(
            f"  dec_c         {dc.cardinality}; witness {w.x} below {w.y} "
            f"with values {f.table[w.x]} not below {f.table[w.y]}"
        )
    out.append(
        f"  gdelta        {_yn(gd.measurable)}"
        + ("" if gd.measurable else f" (preimage of {{{_members(gd.witness_open)}}} is {{{_members(gd.witness_preimage)}}}, not open)")
        + "; " + gd.note
    )
    if wo:
        out.append(
            f"  well-order    {','.join(str(x) for x in wo.order)} "
            f"(tail criterion {_yn(witness_verifies(f, wo))})"
        )
    else:
        out.append("  well-order    none (map is not scatteredly continuous)")
    return out


def _render_map_figures(loaded, out_dir: str) -> list[str]:
    dest = Path(out_dir)
    dest.mkdir(parents=True, exist_ok=True)
    names = {id(s): n for n, s in loaded.spaces.items()}
    emitted = []
    for name, f in sorted(loaded.maps.items()):
        dom_name = names.get(id(f.dom), "dom")
        cod_name = names.get(id(f.cod), "cod")
        emitted.append(
            figures.save(
                figures.space_figure(f.dom, f"{dom_name} (domain)"),
                dest / f"{name}-dom.png",
            )
        )
        emitted.append(
            figures.save(
                figures.space_figure(f.cod, f"{cod_name} (codomain)"),
                dest / f"{name}-cod.png",
            )
        )
        emitted.append(
            figures.save(
                figures.series_figure([sc_series(f), wd_series(f)], f"{name} series"),
                dest / f"{name}-series.png",
            )
        )
        emitted.append(
            figures.save(
                figures.cover_figure(dec_arbitrary(f), f.dom.n, f"{name} cover"),
                dest / f"{name}-cover.png",
            )
        )
    return emitted


def cmd_map_report(args) -> int:
    loaded = _load(args.file, args.close)
    lines: list[str] = []
    for name, f in sorted(loaded.maps.items()):
        if args.format == "records":
            lines.extend(_map_records(name, f))
        else:
            lines.extend(_map_table(name, f))
    if args.figures:
        for path in _render_map_figures(loaded, args.figures):
            lines.append(f"figure {path}" if args.format != "records" else f"figure path={path}")
    print("\n".join(sorted(lines) if args.format == "records" else lines))
    return 0


def cmd_map_compose(args) -> int:
    loaded_f = _load(args.file_f, args.close)
    if args.file_g:
        loaded_g = _load(args.file_g, args.close)
        maps_f = sorted(loaded_f.maps.items())
        maps_g = sorted(loaded_g.maps.items())
        if len(maps_f) != 1 or len(maps_g) != 1:
            raise UsageError("each compose input file must hold exactly one map")
        (name_f, f), (name_g, g) = maps_f[0], maps_g[0]
    else:
        maps_f = sorted(loaded_f.maps.items())
        if len(maps_f) != 2:
            raise UsageError("compose with one file needs exactly two maps in it")
        (name_f, f), (name_g, g) = maps_f
    h = compose(f, g)
    name_h = f"{name_g}.{name_f}"
    lines = []
    if args.format == "records":
        lines.extend(_map_records(name_h, h))
    else:
        lines.extend(_map_table(name_h, h))
    if args.bounds:
        report = check_composition_bounds(f, g)
        for chk in report.checks:
            if args.format == "records":
                lines.append(
                    f"bound check={chk.check} status={chk.status} detail={chk.detail.replace(' ', '_') or '-'}"
                )
            else:
                lines.append(f"  bound {chk.check}: {chk.status} ({chk.detail})")
        if report.violations:
            print("\n".join(sorted(lines) if args.format == "records" else lines))
            return 4
    print("\n".join(sorted(lines) if args.format == "records" else lines))
    return 0


def cmd_tree_report(args) -> int:
    loaded = _load(args.file, args.close)
    lines: list[str] = []
    fig_reports = {}
    for name, f in sorted(loaded.treemaps.items()):
        plain = treespace.tree_series(f, "plain")
        closed = treespace.tree_series(f, "closed")
        fig_reports[name] = (plain, closed)
        cover = treespace.tree_decomposition(f)
        depth = args.truncate if args.truncate is not None else f.threshold + 5
        model = treespace.TruncatedModel(f.k, f.threshold, depth)
        sym = treespace.tree_discontinuity_set(f)
        model_d = model.disc_set(f.value_of_point, f.cod, lambda p: True)
        agree = model.agrees(sym, model_d)
        if args.format == "records":
            lines.append(
                f"treeseries map={name} kind=plain index={plain.index} "
                f"kind2=closed index2={closed.index}"
            )
            lines.append(
                f"treecover map={name} cardinality={cover.cardinality} pieces={len(cover.pieces)}"
            )
            lines.append(f"treemodel map={name} depth={depth} agrees={_yn(agree)}")
        else:
            lines.append(f"treemap {name}: k={f.k} N={f.threshold} -> {f.cod.n}-point space")
            lines.append(f"  series indices: plain {plain.index}, closed {closed.index}")
            lines.append(
                f"  decomposition: {cover.cardinality} with {len(cover.pieces)} described pieces"
            )
            lines.append(f"  truncated model depth {depth}: D(f) agreement {_yn(agree)}")
        if f.k <= 2:
            dec = treespace.tree_dec_closed(f)
            ok = (
                treespace.verify_pigeonhole(f, dec.certificate, depth)
                if dec.certificate
                else True
            )
            if args.format == "records":
                lines.append(
                    f"treedec map={name} cardinality={dec.cardinality} certificate={_yn(ok)}"
                )
            else:
                lines.append(f"  dec_c: {dec.cardinality} (certificate verified {_yn(ok)})")
    if args.figures:
        dest = Path(args.figures)
        dest.mkdir(parents=True, exist_ok=True)
        for name, reps in sorted(fig_reports.items()):
            path = figures.save(
                figures.tree_series_figure(list(reps), f"{name} series"),
                dest / f"{name}-series.png",
            )
            lines.append(f"figure {path}" if args.format != "records" else f"figure path={path}")
    print("\n".join(sorted(lines) if args.format == "records" else lines))
    return 0


def _print_report(report, fmt: str) -> int:
    if fmt == "records":
        print("\n".join(report.record_lines()))
    else:
        print(f"campaign {report.campaign}: {sum(report.counts.values())} instances")
        for k, v in sorted(report.counts.items()):
            print(f"  {k}: {v}")
        for f in report.findings:
            print(f"  {f.kind} [{f.check}] {f.instance} {f.certificate}")
        print(f"  wall time {report.wall_time:.2f}s")
    return 4 if report.violations else 0


def cmd_verify(args) -> int:
    task = miner.EnumerationTask(
        max_points_x=args.max_x,
        max_points_y=args.max_y,
        up_to_iso=not args.labeled,
        seed=args.seed,
        samples=args.samples,
        jobs=args.jobs,
    )
    report = miner.verify_suite(task)
    return _print_report(report, args.format)


def cmd_mine(args) -> int:
    report = miner.mine(
        args.pattern,
        max_x=args.max_x,
        max_y=args.max_y,
        regular_middle=args.regular_middle,
    )
    return _print_report(report, args.format)


def cmd_enum_spaces(args) -> int:
    spaces = list(miner.enumerate_spaces(args.n, up_to_iso=args.up_to_iso))
    lines = [
        f"space n={args.n} code={miner.encode_space(s)}" for s in spaces
    ]
    lines.append(f"count spaces = {len(spaces)}")
    if args.format == "records":
        print("\n".join(sorted(lines)))
    else:
        print(f"{len(spaces)} spaces on {args.n} points" + (" up to isomorphism" if args.up_to_iso else ""))
        for line in lines[:-1]:
            print("  " + line)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "space" and args.space_command == "check":
            return cmd_space_check(args)
        if args.command == "map" and args.map_command == "report":
            return cmd_map_report(args)
        if args.command == "map" and args.map_command == "compose":
            return cmd_map_compose(args)
        if args.command == "tree" and args.tree_command == "report":
            return cmd_tree_report(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "mine":
            return cmd_mine(args)
        if args.command == "enum" and args.enum_command == "spaces":
            return cmd_enum_spaces(args)
        raise UsageError("missing or unknown subcommand")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except UnknownPattern as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (SizeGuardExceeded, HeightExceeded) as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return 3
    except FintopoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
