"""PD parsing, orientation/sign conventions, resolutions, and edge effects."""

import itertools

import pytest

from khoval.diagram import (
    LinkDiagram,
    Merge,
    Split,
    edge_effect,
    parse_pd,
    resolve,
    serialize_pd,
)
from khoval.errors import MoveError, OrientationError, ParseError
from khoval.corpus import PD_CODES

from oracles import bfs_circle_count

TREFOIL = PD_CODES["trefoil"]


# -- parsing --------------------------------------------------------------------


def test_parse_empty():
    d = parse_pd("")
    assert d.n == 0 and d.free_loops == 0 and d.is_empty()


def test_parse_one_loop_token():
    d = parse_pd("L0")
    assert d.n == 0 and d.free_loops == 1


def test_parse_multiple_loop_tokens():
    d = parse_pd("L0 L1 L7")
    assert d.free_loops == 3


def test_parse_trefoil_signs_all_positive():
    # hand trace of the standard right trefoil with sequential arcs: at each
    # crossing the over-strand enters at slot 1, so every sign is +1
    d = parse_pd(TREFOIL)
    assert [c.sign for c in d.crossings] == [1, 1, 1]
    assert d.n_plus == 3 and d.n_minus == 0


def test_parse_malformed_token():
    with pytest.raises(ParseError):
        parse_pd("X(1,2,3)")
    with pytest.raises(ParseError):
        parse_pd("Y(1,2,3,4)")
    with pytest.raises(ParseError):
        parse_pd("L0 L0")


def test_parse_arc_count_violation():
    with pytest.raises(ParseError):
        parse_pd("X(1,2,3,4)")  # every arc appears once
    with pytest.raises(ParseError):
        parse_pd("X(1,1,1,2) X(2,3,3,4)")  # arc 1 appears three times


def test_parse_orientation_inconsistency():
    # arc 1 is the incoming under-strand of both crossings: two heads
    with pytest.raises(OrientationError):
        parse_pd("X(1,3,2,4) X(1,4,2,3)")


def test_roundtrip_serialization(corpus):
    for name, d in corpus.items():
        d2 = parse_pd(serialize_pd(d))
        assert d2.n == d.n
        assert d2.free_loops == d.free_loops
        assert [c.sign for c in d2.crossings] == [c.sign for c in d.crossings]
        # same incidence structure up to loop-arc renumbering
        assert [c.arcs for c in d2.crossings] == [c.arcs for c in d.crossings]


def test_sign_invariant_under_global_reversal(corpus):
    # reversing every component turns X(a,b,c,d) into X(c,d,a,b); signs persist
    for name, d in corpus.items():
        if d.n == 0:
            continue
        reversed_code = " ".join(
            f"X({c.arcs[2]},{c.arcs[3]},{c.arcs[0]},{c.arcs[1]})" for c in d.crossings
        )
        reversed_code += " " + " ".join(f"L{i}" for i in range(d.free_loops))
        d2 = parse_pd(reversed_code)
        assert [c.sign for c in d2.crossings] == [c.sign for c in d.crossings], name


# -- resolutions ------------------------------------------------------------------


def test_resolve_unknot():
    d = parse_pd("L0")
    assert resolve(d, ()).count == 1


def test_resolve_trefoil_extremes():
    # frozen from the hand trace and confirmed by the BFS oracle below:
    # the all-0 resolution has 2 circles, the all-1 resolution 3
    d = parse_pd(TREFOIL)
    assert resolve(d, (0, 0, 0)).count == 2
    assert resolve(d, (1, 1, 1)).count == 3


def test_resolve_against_bfs_oracle(corpus):
    for name, d in corpus.items():
        for bits in itertools.product((0, 1), repeat=d.n):
            got = resolve(d, bits).count
            want = bfs_circle_count(d, bits)
            assert got == want, (name, bits)


def test_resolve_vertex_length_mismatch():
    d = parse_pd(TREFOIL)
    with pytest.raises(Exception):
        resolve(d, (0, 0))


def test_single_bit_flip_changes_circles_by_one(corpus):
    for name, d in corpus.items():
        for bits in itertools.product((0, 1), repeat=d.n):
            base = resolve(d, bits).count
            for j in range(d.n):
                flipped = list(bits)
                flipped[j] ^= 1
                assert abs(resolve(d, flipped).count - base) == 1, (name, bits, j)


def test_resolution_partitions_arcs(corpus):
    for name, d in corpus.items():
        r = resolve(d, (0,) * d.n)
        seen = [a for circ in r.circles for a in circ]
        assert sorted(seen) == sorted(d.arc_ids())
        assert len(set(seen)) == len(seen)


# -- edge effects ------------------------------------------------------------------


def test_edge_effect_trefoil_first_crossing():
    # (*,0,0): both circles of the oriented resolution merge into one
    d = parse_pd(TREFOIL)
    eff = edge_effect(d, ("*", 0, 0))
    assert isinstance(eff, Merge)
    assert eff.sources == (0, 1)
    assert resolve(d, (1, 0, 0)).count == 1


def test_edge_effect_split():
    d = parse_pd(TREFOIL)
    # from (1,1,0): flipping the last crossing goes 2 -> 3 circles
    base = resolve(d, (1, 1, 0)).count
    tgt = resolve(d, (1, 1, 1)).count
    eff = edge_effect(d, (1, 1, "*"))
    if tgt == base + 1:
        assert isinstance(eff, Split)
    else:
        assert isinstance(eff, Merge)


def test_edge_effect_classification_matches_counts(corpus):
    for name, d in corpus.items():
        for bits in itertools.product((0, 1), repeat=d.n):
            for j in range(d.n):
                if bits[j] == 1:
                    continue
                edge = list(bits)
                edge[j] = "*"
                eff = edge_effect(d, edge)
                delta = (
                    resolve(d, tuple(bits[:j]) + (1,) + tuple(bits[j + 1 :])).count
                    - resolve(d, bits).count
                )
                assert isinstance(eff, Split if delta == 1 else Merge)
                # untouched circles correspond bijectively
                assert len(eff.correspondence) == resolve(d, bits).count - (
                    2 if isinstance(eff, Merge) else 1
                )


def test_edge_effect_malformed():
    d = parse_pd(TREFOIL)
    with pytest.raises(MoveError):
        edge_effect(d, (0, 0, 0))  # no star
    with pytest.raises(MoveError):
        edge_effect(d, ("*", "*", 0))


def test_diagram_rejects_loop_arc_reuse():
    with pytest.raises(ParseError):
        LinkDiagram([], [(1, 2), (2, 3)])
    with pytest.raises(ParseError):
        LinkDiagram([(1, (1, 2, 2, 1))], [(1,)])
