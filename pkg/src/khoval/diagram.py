"""Oriented link diagrams in PD notation, their resolutions, and circle tracing.

A diagram is a list of crossings plus a list of crossing-free loops.  Each
crossing is a 4-tuple of arc ids in PD convention: slot 0 holds the incoming
under-strand, slots 1..3 follow counterclockwise.  Crossing-free circles
cannot be expressed by crossings, so they are stored as cyclic tuples of
synthetic arc ids (at least one arc each); this makes them addressable by
saddle and death events.

Orientation is not stored: it is solved from the PD structure (slot 0 is
always incoming, slot 2 outgoing, and the over-strand direction is propagated
globally).  The crossing sign is +1 exactly when the over-strand enters at
slot 1.  With this convention the standard right-trefoil code
``X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)`` has three positive crossings.

Smoothings: the 0-smoothing of a crossing joins slots (0,3) and (1,2) --- the
orientation-respecting smoothing at a positive crossing --- and the
1-smoothing joins (0,1) and (2,3).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import KhovalError, MoveError, OrientationError, ParseError

__all__ = [
    "Crossing",
    "LinkDiagram",
    "ResolvedDiagram",
    "Merge",
    "Split",
    "parse_pd",
    "serialize_pd",
    "resolve",
    "edge_effect",
]

# Slot pairs joined by each smoothing.
SMOOTHING_JOINS = {
    0: ((0, 3), (1, 2)),
    1: ((0, 1), (2, 3)),
}


@dataclass(frozen=True)
class Crossing:
    """A PD crossing: id, four arc ids (slot 0 = incoming under), and sign."""

    cid: int
    arcs: tuple[int, int, int, int]
    sign: int

    def slot_incoming(self, slot: int) -> bool:
        """Whether the arc at `slot` points into this crossing."""
        if slot == 0:
            return True
        if slot == 2:
            return False
        if slot == 1:
            return self.sign > 0
        return self.sign < 0


class LinkDiagram:
    """An oriented link diagram: crossings plus crossing-free loops.

    Construction validates arc incidences and solves the orientation; signs
    are always derived, never trusted from the caller.
    """

    __slots__ = ("crossings", "loops", "n_plus", "n_minus", "_arc_ids")

    def __init__(
        self,
        crossings: Iterable[tuple[int, tuple[int, int, int, int]]] = (),
        loops: Iterable[Sequence[int]] = (),
    ):
        raw = [(int(cid), tuple(int(a) for a in arcs)) for cid, arcs in crossings]
        loop_list = tuple(tuple(int(a) for a in lp) for lp in loops)
        self._validate_ids(raw, loop_list)
        signs = _solve_orientation(raw)
        self.crossings: tuple[Crossing, ...] = tuple(
            Crossing(cid, arcs, signs[idx]) for idx, (cid, arcs) in enumerate(raw)
        )
        self.loops: tuple[tuple[int, ...], ...] = loop_list
        self.n_plus = sum(1 for c in self.crossings if c.sign > 0)
        self.n_minus = len(self.crossings) - self.n_plus
        arc_ids = set()
        for _, arcs in raw:
            arc_ids.update(arcs)
        for lp in loop_list:
            arc_ids.update(lp)
        self._arc_ids = frozenset(arc_ids)

    @staticmethod
    def _validate_ids(raw, loop_list) -> None:
        counts: dict[int, int] = {}
        cids = set()
        for cid, arcs in raw:
            if len(arcs) != 4:
                raise ParseError(f"crossing {cid} does not have 4 arcs")
            if cid in cids:
                raise ParseError(f"duplicate crossing id {cid}")
            cids.add(cid)
            for a in arcs:
                if a < 1:
                    raise ParseError(f"arc id {a} is not a positive integer")
                counts[a] = counts.get(a, 0) + 1
        for a, k in counts.items():
            if k != 2:
                raise ParseError(f"arc {a} appears {k} times (expected 2)")
        seen_loop_arcs = set()
        for lp in loop_list:
            if not lp:
                raise ParseError("empty loop")
            for a in lp:
                if a < 1:
                    raise ParseError(f"arc id {a} is not a positive integer")
                if a in counts or a in seen_loop_arcs:
                    raise ParseError(f"loop arc {a} reused")
                seen_loop_arcs.add(a)

    # -- basic queries ---------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def free_loops(self) -> int:
        return len(self.loops)

    def is_empty(self) -> bool:
        return not self.crossings and not self.loops

    def arc_ids(self) -> frozenset[int]:
        return self._arc_ids

    def max_arc_id(self) -> int:
        return max(self._arc_ids, default=0)

    def max_crossing_id(self) -> int:
        return max((c.cid for c in self.crossings), default=0)

    def crossing_by_id(self, cid: int) -> tuple[int, Crossing]:
        for idx, c in enumerate(self.crossings):
            if c.cid == cid:
                return idx, c
        raise MoveError(f"no crossing with id {cid}")

    def crossing_arc_slots(self, arc: int) -> list[tuple[int, int]]:
        """All (crossing index, slot) occurrences of a crossing arc."""
        out = []
        for idx, c in enumerate(self.crossings):
            for slot, a in enumerate(c.arcs):
                if a == arc:
                    out.append((idx, slot))
        return out

    def loop_of_arc(self, arc: int) -> int | None:
        for i, lp in enumerate(self.loops):
            if arc in lp:
                return i
        return None

    def arc_tail(self, arc: int) -> tuple[int, int]:
        """(crossing index, slot) where a crossing arc leaves its crossing."""
        for idx, slot in self.crossing_arc_slots(arc):
            if not self.crossings[idx].slot_incoming(slot):
                return idx, slot
        raise KhovalError(f"arc {arc} has no tail slot")

    def arc_head(self, arc: int) -> tuple[int, int]:
        for idx, slot in self.crossing_arc_slots(arc):
            if self.crossings[idx].slot_incoming(slot):
                return idx, slot
        raise KhovalError(f"arc {arc} has no head slot")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinkDiagram):
            return NotImplemented
        return (
            tuple((c.cid, c.arcs) for c in self.crossings)
            == tuple((c.cid, c.arcs) for c in other.crossings)
            and self.loops == other.loops
        )

    def __hash__(self) -> int:
        return hash(
            (tuple((c.cid, c.arcs) for c in self.crossings), self.loops)
        )

    def __repr__(self) -> str:
        return f"LinkDiagram({serialize_pd(self)!r})"


@dataclass(frozen=True)
class ResolvedDiagram:
    """A complete resolution: the partition of arcs into circles.

    Circles are stored as sorted arc tuples, listed in increasing order of
    their smallest arc id (the canonical circle order used everywhere).
    """

    circles: tuple[tuple[int, ...], ...]
    circle_of: dict[int, int]

    @property
    def count(self) -> int:
        return len(self.circles)


@dataclass(frozen=True)
class Merge:
    sources: tuple[int, int]
    target: int
    correspondence: dict[int, int]


@dataclass(frozen=True)
class Split:
    source: int
    targets: tuple[int, int]
    correspondence: dict[int, int]


# -- parsing -----------------------------------------------------------------

_X_TOKEN = re.compile(r"X\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)$")
_L_TOKEN = re.compile(r"L(\d+)$")


def parse_pd(text: str) -> LinkDiagram:
    """Parse PD notation: `X(a,b,c,d)` tokens plus `L<k>` loop tokens.

    Each `L<k>` token declares one crossing-free loop (k is a label and must
    be unique).  The empty string is the empty diagram.
    """
    crossings = []
    loop_labels = []
    for token in text.split():
        m = _X_TOKEN.match(token)
        if m:
            crossings.append(tuple(int(g) for g in m.groups()))
            continue
        m = _L_TOKEN.match(token)
        if m:
            label = int(m.group(1))
            if label in loop_labels:
                raise ParseError(f"duplicate loop token L{label}")
            loop_labels.append(label)
            continue
        raise ParseError(f"malformed token {token!r}")
    raw = [(i + 1, arcs) for i, arcs in enumerate(crossings)]
    next_arc = max((a for _, arcs in raw for a in arcs), default=0) + 1
    loops = []
    for _ in loop_labels:
        loops.append((next_arc, next_arc + 1))
        next_arc += 2
    return LinkDiagram(raw, loops)


def serialize_pd(d: LinkDiagram) -> str:
    """Canonical PD text; loop arc ids are not representable and renumber."""
    parts = [f"X({c.arcs[0]},{c.arcs[1]},{c.arcs[2]},{c.arcs[3]})" for c in d.crossings]
    parts.extend(f"L{i}" for i in range(d.free_loops))
    return " ".join(parts)


# -- orientation solving ------------------------------------------------------

def _solve_orientation(raw: list[tuple[int, tuple[int, int, int, int]]]) -> list[int]:
    """Assign a consistent direction to every arc; return crossing signs.

    Slot 0 is incoming and slot 2 outgoing by convention.  Each crossing has
    one boolean x: x=0 means slot 1 incoming / slot 3 outgoing (sign +1),
    x=1 the reverse (sign -1).  Arcs must be incoming at exactly one of their
    two occurrences, which yields unary and parity constraints on the x's.
    Components without any constraint default to x=0.
    """
    n = len(raw)
    occurrences: dict[int, list[tuple[int, int]]] = {}
    for idx, (_, arcs) in enumerate(raw):
        for slot, a in enumerate(arcs):
            occurrences.setdefault(a, []).append((idx, slot))

    x: list[int | None] = [None] * n
    # parity[i] relative to component root; DSU with parity.
    parent = list(range(n))
    parity = [0] * n

    def find(i: int) -> tuple[int, int]:
        p = 0
        while parent[i] != i:
            p ^= parity[i]
            i = parent[i]
        return i, p

    def union(i: int, j: int, rel: int) -> None:
        ri, pi = find(i)
        rj, pj = find(j)
        if ri == rj:
            if pi ^ pj != rel:
                raise OrientationError("orientation inconsistency in PD code")
            return
        parent[ri] = rj
        parity[ri] = pi ^ pj ^ rel

    def head_expr(idx: int, slot: int):
        """Incoming-ness as (constant) or ('x', idx, flip)."""
        if slot == 0:
            return 1
        if slot == 2:
            return 0
        if slot == 1:
            return ("x", idx, 1)  # incoming iff x=0
        return ("x", idx, 0)  # slot 3: incoming iff x=1

    pending: list[tuple[int, int]] = []  # unary assignments (idx, value)
    for a, occ in occurrences.items():
        (i1, s1), (i2, s2) = occ
        e1, e2 = head_expr(i1, s1), head_expr(i2, s2)
        if isinstance(e1, int) and isinstance(e2, int):
            if e1 + e2 != 1:
                raise OrientationError(f"arc {a} oriented inconsistently")
        elif isinstance(e1, int) or isinstance(e2, int):
            const, var = (e1, e2) if isinstance(e1, int) else (e2, e1)
            _, idx, flip = var
            # head(var) must be 1 - const;  head = flip XOR x ... with
            # flip=1: head iff x=0, so head = 1 ^ x;  flip=0: head = x.
            want_head = 1 - const
            value = want_head ^ flip
            pending.append((idx, value))
        else:
            _, i, f1 = e1
            _, j, f2 = e2
            if i == j:
                # (1^x)+(x)=1 holds identically when flips differ; otherwise
                # the same slot-kind twice at one crossing cannot sum to 1.
                if f1 == f2:
                    raise OrientationError(f"arc {a} oriented inconsistently")
                continue
            # head1 + head2 = 1  =>  (f1^xi) + (f2^xj) = 1
            rel = 1 ^ f1 ^ f2
            union(i, j, rel)

    root_value: dict[int, int] = {}
    for idx, value in pending:
        r, p = find(idx)
        want_root = value ^ p
        if root_value.setdefault(r, want_root) != want_root:
            raise OrientationError("orientation inconsistency in PD code")
    for i in range(n):
        r, p = find(i)
        x[i] = root_value.get(r, 0) ^ p
    return [1 if xi == 0 else -1 for xi in x]


# -- resolutions ---------------------------------------------------------------

class _DSU:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, a: int) -> int:
        parent = self.parent
        root = parent.setdefault(a, a)
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def resolve(d: LinkDiagram, v: Sequence[int] | int) -> ResolvedDiagram:
    """Compute the circles of the complete resolution selected by `v`.

    `v` is a bit per crossing in crossing order (or an int bitmask with bit j
    for crossing j).
    """
    bits = _as_bits(v, d.n)
    dsu = _DSU()
    for a in d.arc_ids():
        dsu.find(a)
    for c, bit in zip(d.crossings, bits):
        for s1, s2 in SMOOTHING_JOINS[bit]:
            dsu.union(c.arcs[s1], c.arcs[s2])
    for lp in d.loops:
        for i in range(len(lp) - 1):
            dsu.union(lp[i], lp[i + 1])
    groups: dict[int, list[int]] = {}
    for a in d.arc_ids():
        groups.setdefault(dsu.find(a), []).append(a)
    circles = tuple(sorted((tuple(sorted(g)) for g in groups.values())))
    circle_of = {}
    for i, circ in enumerate(circles):
        for a in circ:
            circle_of[a] = i
    return ResolvedDiagram(circles, circle_of)


def _as_bits(v: Sequence[int] | int, n: int) -> tuple[int, ...]:
    if isinstance(v, int):
        return tuple((v >> j) & 1 for j in range(n))
    bits = tuple(int(b) for b in v)
    if len(bits) != n:
        raise KhovalError(f"vertex length {len(bits)} != crossing count {n}")
    if any(b not in (0, 1) for b in bits):
        raise KhovalError("vertex bits must be 0 or 1")
    return bits


def edge_effect(d: LinkDiagram, e: Sequence) -> Merge | Split:
    """Classify the circle rewiring along a cube edge.

    `e` is a sequence over {0, 1, '*'} with exactly one star.  Returns which
    circles of the star=0 endpoint merge, or which one splits, plus the
    index correspondence for untouched circles.
    """
    e = list(e)
    stars = [i for i, b in enumerate(e) if b in ("*", "star")]
    if len(stars) != 1 or len(e) != d.n:
        raise MoveError("edge must have exactly one star and full length")
    j = stars[0]
    bits0 = [int(b) for b in e[:j]] + [0] + [int(b) for b in e[j + 1 :]]
    bits1 = list(bits0)
    bits1[j] = 1
    return edge_effect_from_resolutions(resolve(d, bits0), resolve(d, bits1))


def edge_effect_from_resolutions(
    src: ResolvedDiagram, tgt: ResolvedDiagram
) -> Merge | Split:
    """Edge effect computed from two precomputed resolutions."""
    tgt_index = {circ: i for i, circ in enumerate(tgt.circles)}
    corr: dict[int, int] = {}
    unmatched_src = []
    for i, circ in enumerate(src.circles):
        t = tgt_index.get(circ)
        if t is None:
            unmatched_src.append(i)
        else:
            corr[i] = t
    matched_tgt = set(corr.values())
    unmatched_tgt = [i for i in range(tgt.count) if i not in matched_tgt]
    if len(unmatched_src) == 2 and len(unmatched_tgt) == 1:
        return Merge(tuple(unmatched_src), unmatched_tgt[0], corr)
    if len(unmatched_src) == 1 and len(unmatched_tgt) == 2:
        return Split(unmatched_src[0], tuple(unmatched_tgt), corr)
    raise MoveError(
        "crossing change neither merges two circles nor splits one "
        "(the PD code is not planar)"
    )
