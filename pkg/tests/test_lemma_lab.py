"""Tests for the rainbow-clique extractors and their trial harness.

Every extractor output is re-checked by the independent oracles below
(brute-force clique/colour scans that share no code with the library
paths under test); deterministic hand-built instances freeze the exact
choice each procedure must make.
"""

import json
import random
from itertools import combinations

import pytest

from rainbowlab.colouring import EdgeColouring, is_proper
from rainbowlab.errors import CounterexampleFound, ParameterError, StructureUnsupported
from rainbowlab.graph import Graph, hat_k
from rainbowlab.lemma_lab import (
    JoinedTriangleBlock,
    certify_lemma,
    disjoint_colour_triangles,
    extract_rainbow_k4,
    extract_rainbow_k5,
    extract_rainbow_k6,
    extract_rainbow_k7,
    LEMMA_NAMES,
    rainbow_k4_in_block,
    rainbow_k4_scaffold,
    rainbow_k5_scaffold,
    rainbow_k6_scaffold,
    rainbow_k7_scaffold,
    sample_fan_matchings,
    sample_rainbow_k4_colouring,
    sample_rainbow_k5_colouring,
    sample_rainbow_k6_colouring,
    sample_rainbow_k7_colouring,
    sample_triangle_pair_colouring,
    spoked_fan_instance,
    surviving_triangle,
    triangle_pair_instance,
)
import rainbowlab.lemma_lab as lemma_lab


# -- independent oracles ------------------------------------------------------


def oracle_clique_colours(g: Graph, psi: EdgeColouring, vs):
    """Edge colours of the subset, or None if it is not a clique."""
    cols = []
    for u, v in combinations(sorted(vs), 2):
        if not g.has_edge(u, v):
            return None
        cols.append(psi.get(u, v))
    return cols


def assert_rainbow_clique(g: Graph, psi: EdgeColouring, vs, order):
    assert len(set(vs)) == order
    cols = oracle_clique_colours(g, psi, vs)
    assert cols is not None, f"{vs} is not a clique"
    assert None not in cols
    assert len(set(cols)) == len(cols), f"{vs} is not rainbow: {cols}"


def oracle_triangle_colours(g: Graph, psi: EdgeColouring, tri):
    cols = oracle_clique_colours(g, psi, tri)
    assert cols is not None and len(cols) == 3
    return set(cols)


def fresh_colouring(g: Graph) -> EdgeColouring:
    psi = EdgeColouring(g)
    for u, v in g.edges:
        psi.assign_fresh(u, v)
    return psi


def greedy_proper_colouring(g: Graph, order=None) -> EdgeColouring:
    """Smallest legal colour per edge, edges taken in the given order."""
    psi = EdgeColouring(g)
    for u, v in g.edges if order is None else order:
        blocked = psi.colours_at(u) | psi.colours_at(v)
        c = 0
        while c in blocked:
            c += 1
        psi.assign(u, v, c)
    return psi


def rng_for(label: str) -> random.Random:
    return random.Random(label)


# -- rainbow K4 from the star join -------------------------------------------


class TestExtractRainbowK4:
    def test_all_distinct_uses_first_right_edge(self):
        sc = rainbow_k4_scaffold()
        psi = fresh_colouring(sc.graph)
        out = extract_rainbow_k4(sc, psi)
        assert out == (0, 1, 4, 5)
        assert_rainbow_clique(sc.graph, psi, out, 4)

    def test_eight_colour_instance_picks_remaining_right_edge(self):
        # Left star reuses colours 0,1,2; right star shows 0,1,2,3; the
        # greedy cross completion keeps the total palette at 8 colours.
        sc = rainbow_k4_scaffold()
        order = (
            list(sc.left_edges())
            + list(sc.right_edges())
            + sorted(
                (x, z) for x in (0, 1, 2, 3) for z in (4, 5, 6, 7, 8)
            )
        )
        psi = greedy_proper_colouring(sc.graph, order)
        assert len(psi.colours_used()) == 8
        left = {psi.get(0, x) for x in (1, 2, 3)}
        assert [c for z in (5, 6, 7, 8) if (c := psi.get(4, z)) not in left] == [3]
        assert psi.get(4, 8) == 3
        out = extract_rainbow_k4(sc, psi)
        assert 4 in out and 8 in out
        assert out == (0, 2, 4, 8)
        assert_rainbow_clique(sc.graph, psi, out, 4)

    def test_randomised_runs_always_extract(self):
        sc = rainbow_k4_scaffold()
        for t in range(800):
            psi = sample_rainbow_k4_colouring(sc, rng_for(f"k4:{t}"))
            assert is_proper(sc.graph, psi)
            out = extract_rainbow_k4(sc, psi)
            assert_rainbow_clique(sc.graph, psi, out, 4)

    def test_improper_input_reported(self):
        sc = rainbow_k4_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(0, 1, psi.get(0, 2))
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k4(sc, psi)
        assert exc.value.offending.check == "proper-colouring"

    def test_partial_input_reported(self):
        sc = rainbow_k4_scaffold()
        psi = EdgeColouring(sc.graph)
        psi.assign_fresh(0, 1)
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k4(sc, psi)
        assert exc.value.offending.check == "total-colouring"


# -- rainbow K5 from the triangle-star join ----------------------------------


class TestExtractRainbowK5:
    def test_fresh_star_edges_pick_first_leaf(self):
        sc = rainbow_k5_scaffold()
        psi = fresh_colouring(sc.graph)
        out = extract_rainbow_k5(sc, psi)
        assert out == (0, 1, 2, 3, 4)
        assert_rainbow_clique(sc.graph, psi, out, 5)

    def test_three_star_edges_reuse_triangle_colours(self):
        sc = rainbow_k5_scaffold()
        psi = EdgeColouring(sc.graph)
        for k in sc.core_keys:
            psi.assign_fresh(*k)
        tri_cols = [psi.get(0, 1), psi.get(0, 2), psi.get(1, 2)]
        for z, c in zip((4, 5, 6), tri_cols):
            psi.assign(3, z, c)
        psi.assign_fresh(3, 7)
        assert is_proper(sc.graph, psi)
        out = extract_rainbow_k5(sc, psi)
        assert out == (0, 1, 2, 3, 7)
        assert_rainbow_clique(sc.graph, psi, out, 5)

    def test_core_clash_is_reported_not_extracted(self):
        sc = rainbow_k5_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(0, 4, psi.get(1, 2))  # proper, but the core repeats a colour
        assert is_proper(sc.graph, psi)
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k5(sc, psi)
        failure = exc.value.offending
        assert failure.check == "rainbow-core"
        assert set(failure.witness[:2]) == {(1, 2), (0, 4)}

    def test_randomised_runs_always_extract(self):
        sc = rainbow_k5_scaffold()
        for t in range(800):
            psi = sample_rainbow_k5_colouring(sc, rng_for(f"k5:{t}"))
            assert is_proper(sc.graph, psi)
            out = extract_rainbow_k5(sc, psi)
            assert_rainbow_clique(sc.graph, psi, out, 5)
            assert 3 in out  # star centre always participates


# -- colour-disjoint triangle pair --------------------------------------------


def cherry_fan_hand_colouring(gamma_pair=50, alpha=7, spoke_overrides=()):
    """The hand-built duplicated-base instance: cherry hub colours 1..6,
    pendants 7..10, fan spokes 20..39, first two fan bases sharing
    `gamma_pair`, remaining bases 51, 52, then fresh."""
    inst = triangle_pair_instance()
    psi = EdgeColouring(inst.graph)
    ch = inst.cherry
    u1, u2, u3 = ch.left, ch.hub, ch.right
    w1, w2 = ch.left_tips
    w3, w4 = ch.right_tips
    psi.assign(u1, u2, 1)
    psi.assign(u2, w1, 2)
    psi.assign(u2, w2, 3)
    psi.assign(u2, w3, 4)
    psi.assign(u2, w4, 5)
    psi.assign(u2, u3, 6)
    psi.assign(u1, w1, alpha)
    psi.assign(u1, w2, 8)
    psi.assign(u3, w3, 9)
    psi.assign(u3, w4, 10)
    overrides = dict(spoke_overrides)
    fan = inst.fan
    for i, (a, b) in enumerate(fan.rim):
        psi.assign(fan.hub, a, overrides.get((i, 0), 20 + 2 * i))
        psi.assign(fan.hub, b, overrides.get((i, 1), 21 + 2 * i))
    bases = {0: gamma_pair, 1: gamma_pair, 2: 51, 3: 52}
    for i, (a, b) in enumerate(fan.rim):
        psi.assign(a, b, bases.get(i, 60 + i))
    assert is_proper(inst.graph, psi)
    return inst, psi


class TestDisjointColourTriangles:
    def test_all_distinct_returns_first_candidates(self):
        inst = triangle_pair_instance()
        psi = fresh_colouring(inst.graph)
        q1, q2 = disjoint_colour_triangles(inst, psi)
        assert q1 == (7, 8, 9)
        assert q2 == (0, 1, 3)
        assert not (
            oracle_triangle_colours(inst.graph, psi, q1)
            & oracle_triangle_colours(inst.graph, psi, q2)
        )

    def test_duplicated_base_picks_first_left_triangle(self):
        inst, psi = cherry_fan_hand_colouring()
        q1, q2 = disjoint_colour_triangles(inst, psi)
        assert q1 == (7, 8, 9)  # first fan triangle
        assert q2 == (0, 1, 3)  # left path edge plus its first pendant tip
        assert not (
            oracle_triangle_colours(inst.graph, psi, q1)
            & oracle_triangle_colours(inst.graph, psi, q2)
        )

    def test_duplicated_base_pendant_pollution_moves_to_second_triangle(self):
        # The pendant colour sits on a hub edge of the first duplicated
        # fan triangle, so the second one is chosen.
        inst, psi = cherry_fan_hand_colouring(spoke_overrides={(0, 0): 7})
        q1, q2 = disjoint_colour_triangles(inst, psi)
        assert q1 == (7, 10, 11)
        assert q2 == (0, 1, 3)
        assert not (
            oracle_triangle_colours(inst.graph, psi, q1)
            & oracle_triangle_colours(inst.graph, psi, q2)
        )

    def test_duplicated_base_inside_left_hub_colours_switches_side(self):
        inst, psi = cherry_fan_hand_colouring(gamma_pair=2)
        q1, q2 = disjoint_colour_triangles(inst, psi)
        assert q1 == (7, 8, 9)
        assert q2 == (1, 2, 5)  # right path edge plus its first pendant tip
        assert not (
            oracle_triangle_colours(inst.graph, psi, q1)
            & oracle_triangle_colours(inst.graph, psi, q2)
        )

    def test_randomised_runs_always_disjoint(self):
        inst = triangle_pair_instance()
        for t in range(2500):
            psi = sample_triangle_pair_colouring(inst, rng_for(f"pair:{t}"))
            q1, q2 = disjoint_colour_triangles(inst, psi)
            assert q1[0] == 7 or 7 in q1  # fan triangle contains the fan hub
            assert set(q2) <= set(range(7))
            assert not (
                oracle_triangle_colours(inst.graph, psi, q1)
                & oracle_triangle_colours(inst.graph, psi, q2)
            )

    def test_improper_reported(self):
        inst = triangle_pair_instance()
        psi = fresh_colouring(inst.graph)
        psi.assign(0, 1, psi.get(1, 3))
        with pytest.raises(StructureUnsupported) as exc:
            disjoint_colour_triangles(inst, psi)
        assert exc.value.offending.check == "proper-colouring"


# -- rainbow K6 ----------------------------------------------------------------


class TestExtractRainbowK6:
    def test_fresh_colouring_first_candidate(self):
        sc = rainbow_k6_scaffold()
        psi = fresh_colouring(sc.graph)
        out = extract_rainbow_k6(sc, psi)
        assert out == (0, 1, 3, 217, 218, 219)
        assert_rainbow_clique(sc.graph, psi, out, 6)

    def test_three_clashing_cross_blocks_fourth_chosen(self):
        sc = rainbow_k6_scaffold()
        psi = fresh_colouring(sc.graph)
        hub = sc.fan.hub
        a, b = sc.fan.rim[0]
        # Pollute the cross blocks of the first three voting cherries
        # with one colour of the common fan triangle each.
        psi.assign(0 * 7, b, psi.get(hub, a))
        psi.assign(1 * 7, a, psi.get(hub, b))
        psi.assign(2 * 7, hub, psi.get(a, b))
        assert is_proper(sc.graph, psi)
        out = extract_rainbow_k6(sc, psi)
        assert out == (21, 22, 24, 217, 218, 219)
        assert_rainbow_clique(sc.graph, psi, out, 6)

    def test_randomised_runs_always_extract(self):
        sc = rainbow_k6_scaffold()
        left_n = 7 * len(sc.cherries)
        for t in range(200):
            psi = sample_rainbow_k6_colouring(sc, rng_for(f"k6:{t}"))
            out = extract_rainbow_k6(sc, psi)
            assert_rainbow_clique(sc.graph, psi, out, 6)
            assert sum(v < left_n for v in out) == 3

    def test_cross_colour_repeat_reported(self):
        sc = rainbow_k6_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(0, 220, psi.get(1, 221))
        assert is_proper(sc.graph, psi)
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k6(sc, psi)
        assert exc.value.offending.check == "cross-rainbow"

    def test_cross_colour_leaking_into_cherries_reported(self):
        sc = rainbow_k6_scaffold()
        psi = fresh_colouring(sc.graph)
        last = sc.cherries[-1]
        psi.assign(0, 218, psi.get(last.left, last.hub))
        assert is_proper(sc.graph, psi)
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k6(sc, psi)
        assert exc.value.offending.check == "cross-avoids-side"


# -- surviving triangle of the spoked fan --------------------------------------


class TestSurvivingTriangle:
    def test_no_matchings_first_triangle(self):
        inst = spoked_fan_instance()
        assert surviving_triangle(inst, []) == (0, 1, 26)

    def test_24_matchings_wiping_48_of_49_triangles(self):
        inst = spoked_fan_instance()
        fan = inst.roles
        matchings = [
            [(0, fan.apexes[0][2 * t]), (1, fan.apexes[0][2 * t + 1])]
            for t in range(24)
        ]
        tri = surviving_triangle(inst, matchings)
        assert tri == (0, 1, fan.apexes[0][48])
        removed = {e for m in matchings for e in m}
        for e in combinations(tri, 2):
            assert tuple(sorted(e)) not in removed

    def test_skeleton_pruning_moves_to_last_spoke(self):
        inst = spoked_fan_instance()
        matchings = [[(0, s)] for s in range(1, 25)]
        tri = surviving_triangle(inst, matchings)
        assert tri == (0, 25, inst.roles.apexes[24][0])
        assert tri == (0, 25, 1202)

    def test_too_many_matchings_rejected(self):
        inst = spoked_fan_instance()
        with pytest.raises(ParameterError, match="at most 24"):
            surviving_triangle(inst, [[(0, 1)]] * 25)

    def test_non_matching_rejected(self):
        inst = spoked_fan_instance()
        with pytest.raises(ParameterError, match="not a matching"):
            surviving_triangle(inst, [[(0, 1), (0, 2)]])

    def test_non_edge_rejected(self):
        inst = spoked_fan_instance()
        with pytest.raises(ParameterError, match="non-edge"):
            surviving_triangle(inst, [[(1, 2)]])

    def test_randomised_batches_always_survive(self):
        inst = spoked_fan_instance()
        g = inst.graph
        for t in range(400):
            matchings = sample_fan_matchings(inst, rng_for(f"sv:{t}"))
            tri = surviving_triangle(inst, matchings)
            removed = {tuple(sorted(e)) for m in matchings for e in m}
            for e in combinations(tri, 2):
                assert g.has_edge(*e)
                assert tuple(sorted(e)) not in removed


# -- rainbow K7 ----------------------------------------------------------------


class TestRainbowK4InBlock:
    def test_three_polluted_free_vertices_leave_the_fourth(self):
        g = hat_k(3, 4)
        block = JoinedTriangleBlock.at_offset(0)
        psi = fresh_colouring(g)
        psi.assign(0, 3, psi.get(1, 2))
        psi.assign(1, 4, psi.get(0, 2))
        psi.assign(2, 5, psi.get(0, 1))
        assert is_proper(g, psi)
        out = rainbow_k4_in_block(psi, block)
        assert out == (0, 1, 2, 6)
        assert_rainbow_clique(g, psi, out, 4)

    def test_random_proper_colourings_always_contain_rainbow_k4(self):
        from rainbowlab.colouring import random_proper_colouring

        g = hat_k(3, 4)
        block = JoinedTriangleBlock.at_offset(0)
        for t in range(400):
            rng = rng_for(f"block:{t}")
            psi = random_proper_colouring(g, rng, rng.random() * 0.5)
            out = rainbow_k4_in_block(psi, block)
            assert_rainbow_clique(g, psi, out, 4)


class TestExtractRainbowK7:
    def test_fresh_colouring_immediate(self):
        sc = rainbow_k7_scaffold()
        psi = fresh_colouring(sc.graph)
        out = extract_rainbow_k7(sc, psi)
        assert out == (0, 1, 2, 3, 28, 29, 54)
        assert_rainbow_clique(sc.graph, psi, out, 7)

    def test_rim_pruning_skips_first_fan_triangle(self):
        sc = rainbow_k7_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(29, 54, psi.get(0, 1))  # rim edge wears a block-K4 colour
        assert is_proper(sc.graph, psi)
        out = extract_rainbow_k7(sc, psi)
        assert out == (0, 1, 2, 3, 28, 29, 55)
        assert_rainbow_clique(sc.graph, psi, out, 7)

    def test_skeleton_pruning_skips_first_spoke(self):
        sc = rainbow_k7_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(28, 29, psi.get(0, 1))  # skeleton edge wears a block colour
        assert is_proper(sc.graph, psi)
        out = extract_rainbow_k7(sc, psi)
        assert out == (0, 1, 2, 3, 28, 30, 103)
        assert_rainbow_clique(sc.graph, psi, out, 7)

    def test_three_clashing_cross_blocks_fourth_chosen(self):
        sc = rainbow_k7_scaffold()
        psi = fresh_colouring(sc.graph)
        centre, spoke, apex = 28, 29, 54
        psi.assign(0, apex, psi.get(centre, spoke))
        psi.assign(7, spoke, psi.get(centre, apex))
        psi.assign(14, centre, psi.get(spoke, apex))
        assert is_proper(sc.graph, psi)
        out = extract_rainbow_k7(sc, psi)
        assert out == (21, 22, 23, 24, 28, 29, 54)
        assert_rainbow_clique(sc.graph, psi, out, 7)

    def test_randomised_runs_always_extract(self):
        sc = rainbow_k7_scaffold()
        for t in range(40):
            psi = sample_rainbow_k7_colouring(sc, rng_for(f"k7:{t}"))
            out = extract_rainbow_k7(sc, psi)
            assert_rainbow_clique(sc.graph, psi, out, 7)
            assert sum(v < 28 for v in out) == 4

    def test_cross_colour_repeat_reported(self):
        sc = rainbow_k7_scaffold()
        psi = fresh_colouring(sc.graph)
        psi.assign(0, 30, psi.get(1, 31))
        with pytest.raises(StructureUnsupported) as exc:
            extract_rainbow_k7(sc, psi)
        assert exc.value.offending.check == "cross-rainbow"


# -- trial harness --------------------------------------------------------------


class TestCertifyLemma:
    def test_registry_covers_all_extractors(self):
        assert set(LEMMA_NAMES) == {
            "extract-rainbow-k4",
            "extract-rainbow-k5",
            "disjoint-colour-triangles",
            "extract-rainbow-k6",
            "surviving-triangle",
            "extract-rainbow-k7",
        }

    @pytest.mark.parametrize("name", LEMMA_NAMES)
    def test_small_certification_passes(self, name):
        trials = 5 if name in ("extract-rainbow-k6", "extract-rainbow-k7") else 50
        report = certify_lemma(name, trials, seed=20240811)
        assert report.passed and report.failures == 0
        assert report.trials == trials
        assert report.archive is None

    def test_reports_are_deterministic(self):
        a = certify_lemma("disjoint-colour-triangles", 40, seed=5)
        b = certify_lemma("disjoint-colour-triangles", 40, seed=5)
        assert a.to_json_dict(include_timing=False) == b.to_json_dict(
            include_timing=False
        )

    def test_unknown_lemma_rejected(self):
        with pytest.raises(ParameterError, match="unknown lemma"):
            certify_lemma("no-such-lemma", 1, seed=0)
        with pytest.raises(ParameterError, match="trials"):
            certify_lemma("extract-rainbow-k4", 0, seed=0)

    def test_counterexample_is_archived(self, tmp_path, monkeypatch):
        def explode(inst, psi):
            raise CounterexampleFound(
                "forced failure for harness test", {"detail": {"reason": "synthetic"}}
            )

        monkeypatch.setitem(
            lemma_lab._LEMMAS,
            "always-fails",
            (rainbow_k4_scaffold, sample_rainbow_k4_colouring, explode),
        )
        report = certify_lemma("always-fails", 10, seed=1, archive_dir=tmp_path)
        assert report.failures == 1 and not report.passed
        assert report.archive is not None
        record = json.loads((tmp_path / report.archive.split("/")[-1]).read_text())
        assert record["lemma"] == "always-fails"
        assert record["trial"] == 0
        assert record["payload"]["detail"]["reason"] == "synthetic"
