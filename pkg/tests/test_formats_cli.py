import pytest

from fintopo import cli, formats
from fintopo.errors import (
    DocumentSyntaxError,
    NotTransitive,
    PartialTable,
    UnknownSpaceRef,
    ValueOutOfRange,
)
from fintopo.finspace import FiniteSpace
from fintopo.mapcalc import FiniteMap, dec_closed, sc_series
from fintopo.miner import EnumerationTask, verify_suite
from fintopo.treespace import STAR


class TestParsing:
    def test_sierpinski_file(self):
        docs = formats.parse_documents("space s\npoints 2\nle 0 1\n")
        loaded = formats.instantiate(docs)
        space = loaded.spaces["s"]
        assert space.up == (0b11, 0b10)
        assert sum(1 for i in range(2) for j in range(2) if space.le(i, j)) == 3

    def test_missing_transitivity_witness(self):
        with pytest.raises(NotTransitive) as exc:
            formats.parse_documents("space x\npoints 3\nle 0 1\nle 1 2\n")
        assert exc.value.witness == (0, 1, 2)

    def test_close_flag(self):
        docs = formats.parse_documents("space x\npoints 3\nle 0 1\nle 1 2\n", close=True)
        assert formats.instantiate(docs).spaces["x"].le(0, 2)

    def test_value_out_of_range(self):
        with pytest.raises(ValueOutOfRange):
            formats.instantiate(
                formats.parse_documents(
                    "space s\npoints 2\nle 0 1\n\nmap m : s -> s\nval 0 5\nval 1 0\n"
                )
            )

    def test_partial_table(self):
        with pytest.raises(PartialTable):
            formats.instantiate(
                formats.parse_documents(
                    "space s\npoints 2\nle 0 1\n\nmap m : s -> s\nval 0 1\n"
                )
            )

    def test_unknown_space_ref(self):
        with pytest.raises(UnknownSpaceRef):
            formats.instantiate(
                formats.parse_documents("map m : nowhere -> nowhere\nval 0 0\n")
            )

    def test_syntax_error_carries_line(self):
        with pytest.raises(DocumentSyntaxError) as exc:
            formats.parse_documents("space s\npoints 2\nbogus line here\n")
        assert exc.value.line == 3

    def test_treemap_wildcard_expansion(self):
        text = "space d2\npoints 2\n\ntreemap t k=1 N=1 -> d2\nshape () 1\nshape * 0\n"
        f = formats.instantiate(formats.parse_documents(text)).treemaps["t"]
        assert f.values == {(): 1, (0,): 0, (STAR,): 0}

    def test_treemap_specific_beats_wildcard(self):
        text = (
            "space d3\npoints 3\n\n"
            "treemap t k=1 N=2 -> d3\n"
            "shape () 0\nshape 1 2\nshape * 1\n"
        )
        f = formats.instantiate(formats.parse_documents(text)).treemaps["t"]
        assert f.values[(1,)] == 2
        assert f.values[(0,)] == 1
        assert f.values[(STAR,)] == 1

    def test_single_document_parse(self):
        doc = formats.parse("space s\npoints 1\n")
        assert doc.kind == "space"
        with pytest.raises(DocumentSyntaxError):
            formats.parse("space a\npoints 1\n\nspace b\npoints 1\n")


class TestRoundTrip:
    def test_corpus_files_roundtrip(self, corpus_dir):
        files = sorted(corpus_dir.iterdir())
        total = 0
        for path in files:
            text = path.read_text(encoding="utf-8")
            docs = formats.parse_documents(text)
            total += len(docs)
            once = formats.serialize_documents(docs)
            docs2 = formats.parse_documents(once)
            twice = formats.serialize_documents(docs2)
            assert once == twice, path.name
            # semantic round trip
            a = formats.instantiate(docs)
            b = formats.instantiate(docs2)
            assert a.spaces == b.spaces
            assert {k: (m.dom, m.cod, m.table) for k, m in a.maps.items()} == {
                k: (m.dom, m.cod, m.table) for k, m in b.maps.items()
            }
            for name in a.treemaps:
                assert a.treemaps[name].values == b.treemaps[name].values
        assert total >= 20

    def test_series_and_cover_documents_roundtrip(self):
        space = FiniteSpace.sierpinski()
        swap = FiniteMap(space, space, (1, 0))
        for doc in (
            formats.series_document("swap", sc_series(swap)),
            formats.cover_document("swap", dec_closed(swap)),
            formats.report_document(
                verify_suite(EnumerationTask(max_points_x=1, max_points_y=1))
            ),
        ):
            text = formats.serialize_document(doc)
            again = formats.serialize_document(formats.parse(text))
            assert text == again


class TestCli:
    def test_space_check(self, tmp_path, capsys):
        f = tmp_path / "s.space"
        f.write_text("space s\npoints 2\nle 0 1\n")
        assert cli.main(["space", "check", str(f)]) == 0
        out = capsys.readouterr().out
        assert "t0=yes" in out and "regular=no" in out

    def test_map_report_records(self, tmp_path, capsys):
        f = tmp_path / "swap.map"
        f.write_text(
            "space s\npoints 2\nle 0 1\n\nmap swap : s -> s\nval 0 1\nval 1 0\n"
        )
        assert cli.main(["map", "report", str(f), "--format", "records"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out == sorted(out)
        assert any("kind=plain" in line and "index=2" in line for line in out)
        assert any("mode=closed" in line and "cardinality=none" in line for line in out)

    def test_map_report_figures(self, tmp_path, capsys):
        f = tmp_path / "swap.map"
        f.write_text(
            "space s\npoints 2\nle 0 1\n\nmap swap : s -> s\nval 0 1\nval 1 0\n"
        )
        figdir = tmp_path / "figs"
        assert cli.main(["map", "report", str(f), "--figures", str(figdir)]) == 0
        capsys.readouterr()
        names = sorted(p.name for p in figdir.iterdir())
        assert names == [
            "swap-cod.png",
            "swap-cover.png",
            "swap-dom.png",
            "swap-series.png",
        ]
        assert all((figdir / n).stat().st_size > 0 for n in names)

    def test_map_compose(self, corpus_dir, capsys):
        path = corpus_dir / "compose_break.map"
        assert cli.main(["map", "compose", str(path), "--bounds"]) == 0
        out = capsys.readouterr().out
        assert "comp-sc-sc-regular-middle: hypothesis-not-met" in out

    def test_tree_report(self, corpus_dir, capsys):
        path = corpus_dir / "root_flag_k1.tree"
        assert cli.main(["tree", "report", str(path), "--truncate", "30"]) == 0
        out = capsys.readouterr().out
        assert "plain 2, closed 2" in out
        assert "countably-infinite" in out
        assert "agreement yes" in out

    def test_tree_report_figures(self, corpus_dir, tmp_path, capsys):
        figdir = tmp_path / "figs"
        assert (
            cli.main(
                [
                    "tree",
                    "report",
                    str(corpus_dir / "parity_k2.tree"),
                    "--figures",
                    str(figdir),
                ]
            )
            == 0
        )
        capsys.readouterr()
        assert (figdir / "parity_k2-series.png").stat().st_size > 0

    def test_verify_exit_zero(self, capsys):
        assert cli.main(["verify", "--max-x", "2", "--max-y", "2"]) == 0
        capsys.readouterr()

    def test_mine_witness_exit_zero(self, capsys):
        assert (
            cli.main(["mine", "--pattern", "sc-not-wd", "--max-x", "2", "--max-y", "2"])
            == 0
        )
        out = capsys.readouterr().out
        assert "counterexample" in out

    def test_enum_spaces(self, capsys):
        assert cli.main(["enum", "spaces", "--n", "2", "--up-to-iso"]) == 0
        out = capsys.readouterr().out
        assert "3 spaces" in out

    def test_exit_codes(self, tmp_path, capsys):
        assert cli.main(["bogus"]) == 1
        bad = tmp_path / "bad.space"
        bad.write_text("space x\npoints 3\nle 0 1\nle 1 2\n")
        assert cli.main(["space", "check", str(bad)]) == 2
        assert cli.main(["space", "check", str(bad), "--close"]) == 0
        assert cli.main(["enum", "spaces", "--n", "9"]) == 3
        assert cli.main(["mine", "--pattern", "nope", "--max-x", "2", "--max-y", "2"]) == 1
        capsys.readouterr()

    def test_missing_file_is_parse_error(self, capsys):
        assert cli.main(["space", "check", "/nonexistent/z.space"]) == 2
        capsys.readouterr()

    def test_violation_finding_exits_four(self, capsys):
        from fintopo.miner import Finding, MinerReport

        report = MinerReport(
            campaign="verify",
            bounds={},
            seed=None,
            counts={},
            findings=[Finding("probe", "violation", "i")],
            wall_time=0.0,
        )
        assert cli._print_report(report, "records") == 4
        capsys.readouterr()


class TestGuardOverrides:
    def test_brute_guard_env(self, monkeypatch):
        from fintopo.errors import SizeGuardExceeded
        from fintopo.mapcalc import sc_bruteforce

        big = FiniteSpace.discrete(13)
        ident = FiniteMap(big, big, tuple(range(13)))
        monkeypatch.setenv("FINTOPO_BRUTE_GUARD", "13")
        assert sc_bruteforce(ident)
        monkeypatch.setenv("FINTOPO_BRUTE_GUARD", "5")
        with pytest.raises(SizeGuardExceeded):
            sc_bruteforce(ident)

    def test_enum_guard_env(self, monkeypatch):
        from fintopo.errors import SizeGuardExceeded
        from fintopo.miner import enumerate_spaces

        monkeypatch.setenv("FINTOPO_ENUM_GUARD", "2")
        with pytest.raises(SizeGuardExceeded):
            list(enumerate_spaces(3))
