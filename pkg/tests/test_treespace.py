import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fintopo import formats
from fintopo.errors import (
    HeightExceeded,
    MemberDiscontinuous,
    NotStablyConvergent,
)
from fintopo.finspace import FiniteSpace
from fintopo.mapcalc import Cardinality
from fintopo.treespace import (
    HIGH,
    MID,
    STAR,
    ShapeSet,
    StableSequenceDescription,
    ThresholdMap,
    TreeSpace,
    TruncatedModel,
    all_shapes,
    decomposition_covers,
    shape_of,
    stable_sequence_cover,
    subtree_set,
    tree_closure,
    tree_dec_closed,
    tree_decomposition,
    tree_discontinuity_set,
    tree_interior,
    tree_is_closed,
    tree_measurability_certificate,
    tree_series,
    verify_measurability_certificate,
    verify_pigeonhole,
    verify_stable_cover_model,
)

D2 = FiniteSpace.discrete(2)
D3 = FiniteSpace.discrete(3)


def tmap(k, n, cod, fn):
    return ThresholdMap(k, n, cod, {s: fn(s) for s in all_shapes(k, n)})


ROOT_FLAG = tmap(1, 1, D2, lambda s: 1 if len(s) == 0 else 0)
PARITY = tmap(2, 1, D3, lambda s: len(s) % 2)
UPPER = tmap(2, 1, D2, lambda s: 1 if len(s) <= 1 else 0)


class TestTopology:
    def test_closure_examples(self):
        leaves = ShapeSet(1, 1, {(0,), (STAR,)})
        assert tree_closure(leaves).members == frozenset(all_shapes(1, 1))
        root = ShapeSet(1, 1, {()})
        assert tree_closure(root).members == {()}
        upper = ShapeSet(2, 1, {(), (0,), (STAR,)})
        assert tree_closure(upper).members == upper.members

    def test_interior_duality_and_idempotence_on_corpus(self, corpus_dir):
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                for probe in _probe_sets(f):
                    dual = tree_closure(probe.complement()).complement()
                    assert tree_interior(probe).members == dual.members
                    cl = tree_closure(probe)
                    assert tree_closure(cl).members == cl.members

    def test_threshold_refinement_preserves_membership(self):
        a = ShapeSet(2, 1, {(), (STAR,), (STAR, 0)})
        b = a.refine(3)
        for p in [(), (0,), (5,), (5, 0), (5, 7), (1, 0), (2, 2)]:
            if len(p) <= 2:
                assert a.contains_point(p) == b.contains_point(p)


def _probe_sets(f):
    yield ShapeSet.full(f.k, f.threshold)
    yield tree_discontinuity_set(f)
    yield tree_closure(tree_discontinuity_set(f))
    for v in range(f.cod.n):
        members = {s for s, val in f.values.items() if val == v}
        yield ShapeSet(f.k, f.threshold, members)


class TestDiscontinuity:
    def test_root_flag(self):
        assert tree_discontinuity_set(ROOT_FLAG).members == {()}

    def test_constant(self):
        const = tmap(2, 1, D2, lambda s: 1)
        assert not tree_discontinuity_set(const).members

    def test_upper_flag(self):
        got = tree_discontinuity_set(UPPER).members
        assert got == {(), (0,), (STAR,)}

    def test_model_agreement_on_corpus(self, corpus_dir):
        count = 0
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                count += 1
                for depth in (f.threshold + 1, f.threshold + 5):
                    model = TruncatedModel(f.k, f.threshold, depth)
                    for probe in _probe_sets(f):
                        sym_cl = tree_closure(probe)
                        model_cl = model.closure(probe.contains_point)
                        assert model.agrees(sym_cl, model_cl)
                        sym_int = tree_interior(probe)
                        model_int = model.interior(probe.contains_point)
                        assert model.agrees(sym_int, model_int)
                        sym_d = tree_discontinuity_set(f, probe)
                        model_d = model.disc_set(
                            f.value_of_point, f.cod, probe.contains_point
                        )
                        assert model.agrees(sym_d, model_d)
        assert count >= 10


class TestSeries:
    def test_root_flag_indices(self):
        assert tree_series(ROOT_FLAG, "plain").index == 2
        assert tree_series(ROOT_FLAG, "closed").index == 2

    def test_parity_index(self):
        rep = tree_series(PARITY, "plain")
        assert rep.index == 3
        lens = [len(s) for s in rep.sets]
        assert lens[-1] == 0

    def test_continuous(self):
        const = tmap(1, 1, D2, lambda s: 0)
        assert tree_series(const, "plain").index == 1
        assert tree_series(const, "closed").index == 1

    def test_indices_bounded_and_ordered_on_corpus(self, corpus_dir):
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                plain = tree_series(f, "plain")
                closed = tree_series(f, "closed")
                assert plain.holds and closed.holds
                assert plain.index <= closed.index <= f.k + 1

    def test_indices_invariant_under_refinement(self, corpus_dir):
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                refined = f.refine(f.threshold + 2)
                for kind in ("plain", "closed"):
                    assert (
                        tree_series(f, kind).index == tree_series(refined, kind).index
                    )

    def test_model_series_agreement(self):
        for f in (ROOT_FLAG, PARITY, UPPER):
            model = TruncatedModel(f.k, f.threshold, f.threshold + 5)
            for kind in ("plain", "closed"):
                sym = tree_series(f, kind)
                got = model.series(f.value_of_point, f.cod, kind)
                # the model iterates to the same vanishing point
                assert len(got) - 1 == sym.index
                for sym_set, model_set in zip(sym.sets, got):
                    assert model.agrees(sym_set, model_set)


class TestDecomposition:
    def test_continuous_single_piece(self):
        const = tmap(1, 1, D2, lambda s: 0)
        cov = tree_decomposition(const)
        assert cov.cardinality == Cardinality.finite(1)
        assert cov.pieces[0].kind == "set"

    def test_root_flag_cover(self):
        cov = tree_decomposition(ROOT_FLAG)
        assert cov.cardinality == Cardinality.countably_infinite()
        kinds = sorted(p.kind for p in cov.pieces)
        assert kinds == ["set", "singletons", "singletons"]
        assert decomposition_covers(ROOT_FLAG, cov)
        assert all(cov.certificates)

    def test_upper_flag_cover(self):
        cov = tree_decomposition(UPPER)
        assert cov.cardinality == Cardinality.countably_infinite()
        set_pieces = [p for p in cov.pieces if p.kind == "set"]
        assert len(set_pieces) == 1
        assert set_pieces[0].shape_set.members == {(), (0,), (STAR,)}
        assert decomposition_covers(UPPER, cov)

    def test_subtree_pieces_fire(self):
        # discontinuous at the root only; each child subtree is constant,
        # so whole clopen subtrees become pieces
        root_only = tmap(2, 1, D2, lambda s: 1 if not s else 0)
        cov = tree_decomposition(root_only)
        assert any(p.kind == "subtrees" for p in cov.pieces)
        assert decomposition_covers(root_only, cov)
        assert all(cov.certificates)

    def test_cover_verifies_on_corpus(self, corpus_dir):
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                cov = tree_decomposition(f)
                assert decomposition_covers(f, cov)
                assert all(cov.certificates)


class TestDecClosed:
    def test_continuous(self):
        const = tmap(1, 1, D2, lambda s: 0)
        assert tree_dec_closed(const).cardinality == Cardinality.finite(1)

    def test_root_flag(self):
        got = tree_dec_closed(ROOT_FLAG)
        assert got.cardinality == Cardinality.countably_infinite()
        assert verify_pigeonhole(ROOT_FLAG, got.certificate, 100)

    def test_upper_flag(self):
        got = tree_dec_closed(UPPER)
        assert got.cardinality == Cardinality.countably_infinite()
        assert verify_pigeonhole(UPPER, got.certificate, 100)

    def test_height_guard(self):
        deep = tmap(3, 1, D2, lambda s: 1 if len(s) <= 2 else 0)
        with pytest.raises(HeightExceeded):
            tree_dec_closed(deep)
        # the countable upper bound is still available
        assert tree_decomposition(deep).cardinality == Cardinality.countably_infinite()


def _committed_family():
    # f_j maps leaf c to 0 when c < j and to 1 otherwise; the root sticks at 1.
    # Members are continuous, the stable limit is the root characteristic map.
    f0 = tmap(1, 1, D2, lambda s: 1)
    f1 = tmap(1, 1, D2, lambda s: 0 if s == (0,) else 1)
    rule = {(): 1, (0,): 0, (MID,): 0, (HIGH,): 1}
    return StableSequenceDescription(1, 1, D2, [f0, f1], [rule])


class TestStableSequences:
    def test_constant_family(self):
        c = tmap(1, 1, D2, lambda s: 1)
        fam = StableSequenceDescription(
            1, 1, D2, [c, c], [{(): 1, (0,): 1, (MID,): 1, (HIGH,): 1}]
        )
        res = stable_sequence_cover(fam)
        assert res.cover.cardinality == Cardinality.finite(1)
        assert res.limit.values == c.values

    def test_committed_family(self):
        fam = _committed_family()
        res = stable_sequence_cover(fam)
        assert res.limit.values == ROOT_FLAG.values
        # X_n = {root} union {leaves below n}
        for n, x_n in enumerate(res.cover.pieces):
            assert x_n.contains_point(())
            for c in range(n + 3):
                assert x_n.contains_point((c,)) == (c < n)
            assert tree_is_closed(x_n)
        assert res.cover.cardinality == Cardinality.countably_infinite()
        assert verify_stable_cover_model(fam, res, 100)

    def test_leafward_family(self):
        # members pick up value 1 leaf by leaf; the limit flags the leaves
        f0 = tmap(1, 1, D2, lambda s: 0)
        f1 = tmap(1, 1, D2, lambda s: 1 if s == (0,) else 0)
        rule = {(): 0, (0,): 1, (MID,): 1, (HIGH,): 0}
        fam = StableSequenceDescription(1, 1, D2, [f0, f1], [rule])
        res = stable_sequence_cover(fam)
        assert res.limit.values == {(): 0, (0,): 1, (STAR,): 1}
        assert not tree_discontinuity_set(res.limit, res.cover.pieces[0])
        assert verify_stable_cover_model(fam, res, 60)

    def test_oscillation_detected(self):
        c = tmap(1, 1, D2, lambda s: 1)
        r0 = {(): 0, (0,): 0, (MID,): 0, (HIGH,): 0}
        r1 = {(): 1, (0,): 1, (MID,): 1, (HIGH,): 1}
        fam = StableSequenceDescription(1, 1, D2, [c, c], [r0, r1])
        with pytest.raises(NotStablyConvergent):
            stable_sequence_cover(fam)

    def test_member_discontinuous(self):
        fam = StableSequenceDescription(
            1,
            1,
            D2,
            [ROOT_FLAG, ROOT_FLAG],
            [{(): 1, (0,): 0, (MID,): 0, (HIGH,): 1}],
        )
        with pytest.raises(MemberDiscontinuous):
            stable_sequence_cover(fam)

    def test_discontinuous_tail_member(self):
        c = tmap(1, 1, D2, lambda s: 1)
        # tail members keep infinitely many leaves at 0 while the root is 1
        rule = {(): 1, (0,): 1, (MID,): 1, (HIGH,): 0}
        fam = StableSequenceDescription(1, 1, D2, [c, c], [rule])
        with pytest.raises(MemberDiscontinuous):
            stable_sequence_cover(fam)


class TestMeasurability:
    def test_root_singleton(self):
        root = ShapeSet(1, 1, {()})
        cert = tree_measurability_certificate(root)
        assert [p.kind for p in cert.fsigma_pieces] == ["set"]
        assert verify_measurability_certificate(cert, 50)

    def test_all_leaves(self):
        leaves = ShapeSet(1, 1, {(0,), (STAR,)})
        cert = tree_measurability_certificate(leaves)
        assert [e[0] for e in cert.gdelta_opens] == ["set"]  # already open
        assert verify_measurability_certificate(cert, 50)

    def test_mixed_set_at_depth_100(self):
        # even explicit leaf plus root, threshold 2
        mixed = ShapeSet(1, 2, {(), (0,)})
        cert = tree_measurability_certificate(mixed)
        assert verify_measurability_certificate(cert, 100)

    def test_corpus_sets(self, corpus_dir):
        for path in sorted(corpus_dir.glob("*.tree")):
            loaded = formats.instantiate(
                formats.parse_documents(path.read_text(encoding="utf-8"))
            )
            for f in loaded.treemaps.values():
                cert = tree_measurability_certificate(tree_discontinuity_set(f))
                assert verify_measurability_certificate(cert, f.threshold + 5)


class TestRandomShapeSets:
    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_closure_laws_and_model_agreement(self, seed):
        import random as _random

        rng = _random.Random(seed)
        k = rng.randint(1, 3)
        n = rng.randint(0, 2)
        shapes = all_shapes(k, n)
        a = ShapeSet(k, n, frozenset(s for s in shapes if rng.random() < 0.4))
        b = ShapeSet(k, n, frozenset(s for s in shapes if rng.random() < 0.4))
        cl = tree_closure(a)
        assert tree_closure(cl).members == cl.members
        assert tree_interior(a).members == tree_closure(a.complement()).complement().members
        assert tree_closure(a | b).members == (tree_closure(a) | tree_closure(b)).members
        assert a.members <= cl.members
        model = TruncatedModel(k, n, n + 2)
        assert model.agrees(cl, model.closure(a.contains_point))
        assert model.agrees(tree_interior(a), model.interior(a.contains_point))


class TestGuards:
    def test_tree_height_guard(self):
        with pytest.raises(HeightExceeded):
            TreeSpace(4)

    def test_shape_of(self):
        assert shape_of((0, 7), 2) == (0, STAR)
        assert shape_of((), 2) == ()

    def test_subtree_set(self):
        sub = subtree_set(2, 1, (STAR,))
        assert sub.members == {(STAR,), (STAR, 0), (STAR, STAR)}
