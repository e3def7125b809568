"""Elementary string interactions: Morse moves and Reidemeister moves on PD codes.

Each move rewrites a diagram into a new one and reports an arc correspondence
(`arc_map`) used downstream to track circles across the move: untouched arcs
keep their ids, and consumed arcs point at a representative arc of the circle
they land in.  Fresh ids are assigned deterministically (max existing id + 1,
in creation order), so replaying a movie always produces the same ids.

Conventions baked into the rewrites:

* Reidemeister moves prepend their new crossings, so the active crossings of
  an `add` move occupy the first positions of the crossing order (the local
  chain-map formulas assume this).
* A positive kink on arc a with pieces p, l, r is the crossing X(p,l,l,r);
  the negative kink is X(p,r,l,l).
* An R2 poke of arc `o` over arc `u` creates X(u1,o1,u2,o2), X(u2,o3,u3,o2)
  with pieces u -> u1,u2,u3 and o -> o1,o2,o3 (closed loops alias u1 = u3).
* The braid-like R3 rewires the three triangle arcs by reversing, for each of
  the three strands, the order of its two crossings; signs are preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .diagram import LinkDiagram
from .errors import MoveError, ParseError, UnsupportedMoveError

__all__ = ["ESI", "MoveInfo", "apply_esi", "apply_esi_info"]

ESI_KINDS = ("birth", "death", "saddle", "r1", "r2", "r3")


@dataclass(frozen=True)
class ESI:
    """One elementary string interaction, addressing ids in the current still."""

    kind: str
    variant: str | None = None
    arc: int | None = None
    arcs: tuple[int, ...] | None = None
    crossing: int | None = None
    crossings: tuple[int, ...] | None = None
    circle: int | None = None

    def __post_init__(self):
        if self.kind not in ESI_KINDS:
            raise ParseError(f"unknown ESI kind {self.kind!r}")

    @classmethod
    def from_json(cls, obj: dict) -> "ESI":
        if not isinstance(obj, dict) or "op" not in obj:
            raise ParseError(f"malformed movie event {obj!r}")
        op = obj["op"]
        try:
            if op == "birth":
                return cls("birth")
            if op == "death":
                return cls("death", circle=int(obj["circle"]))
            if op == "saddle":
                a, b = obj["arcs"]
                return cls("saddle", arcs=(int(a), int(b)))
            if op == "r1":
                variant = obj["variant"]
                if variant in ("add_pos", "add_neg"):
                    return cls("r1", variant=variant, arc=int(obj["arc"]))
                if variant == "remove":
                    return cls("r1", variant="remove", crossing=int(obj["crossing"]))
                raise ParseError(f"unknown r1 variant {variant!r}")
            if op == "r2":
                variant = obj["variant"]
                if variant == "add":
                    a, b = obj["arcs"]
                    return cls("r2", variant="add", arcs=(int(a), int(b)))
                if variant == "remove":
                    c1, c2 = obj["crossings"]
                    return cls("r2", variant="remove", crossings=(int(c1), int(c2)))
                raise ParseError(f"unknown r2 variant {variant!r}")
            if op == "r3":
                c1, c2, c3 = obj["crossings"]
                return cls(
                    "r3",
                    variant=obj.get("variant", "braid"),
                    crossings=(int(c1), int(c2), int(c3)),
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed movie event {obj!r}: {exc}") from exc
        raise ParseError(f"unknown ESI op {op!r}")

    def to_json(self) -> dict:
        out: dict[str, Any] = {"op": self.kind}
        if self.kind == "death":
            out["circle"] = self.circle
        elif self.kind == "saddle":
            out["arcs"] = list(self.arcs)
        elif self.kind == "r1":
            out["variant"] = self.variant
            if self.variant == "remove":
                out["crossing"] = self.crossing
            else:
                out["arc"] = self.arc
        elif self.kind == "r2":
            out["variant"] = self.variant
            if self.variant == "remove":
                out["crossings"] = list(self.crossings)
            else:
                out["arcs"] = list(self.arcs)
        elif self.kind == "r3":
            out["crossings"] = list(self.crossings)
            out["variant"] = self.variant
        return out


@dataclass
class MoveInfo:
    """Everything a chain map needs to know about one applied move."""

    kind: str
    variant: str | None
    arc_map: dict[int, int]  # old arc -> representative new arc
    created_arcs: list[int] = field(default_factory=list)
    created_crossings: list[int] = field(default_factory=list)
    # birth: created loop arcs are in created_arcs
    victim_arcs: tuple[int, ...] = ()  # death: arcs of the dying circle
    saddle_arcs: tuple[int, int] | None = None
    # r1: the kink loop arc, the strand representative in the new diagram,
    # kink sign, and (for removals) the position of the crossing.
    loop_arc: int | None = None
    strand_arc: int | None = None
    positive: bool | None = None
    positions: tuple[int, ...] = ()
    # r2: piece arcs in template roles (aliases allowed)
    pieces: dict[str, int] = field(default_factory=dict)


def apply_esi(d: LinkDiagram, event: ESI) -> LinkDiagram:
    """Rewrite a diagram by one elementary string interaction."""
    return apply_esi_info(d, event)[0]


def apply_esi_info(d: LinkDiagram, event: ESI) -> tuple[LinkDiagram, MoveInfo]:
    kind = event.kind
    if kind == "birth":
        return _apply_birth(d)
    if kind == "death":
        return _apply_death(d, event.circle)
    if kind == "saddle":
        a, b = event.arcs
        return _apply_saddle(d, a, b)
    if kind == "r1":
        if event.variant == "add_pos":
            return _apply_r1_add(d, event.arc, positive=True)
        if event.variant == "add_neg":
            return _apply_r1_add(d, event.arc, positive=False)
        if event.variant == "remove":
            return _apply_r1_remove(d, event.crossing)
        raise MoveError(f"unknown r1 variant {event.variant!r}")
    if kind == "r2":
        if event.variant == "add":
            a, b = event.arcs
            return _apply_r2_add(d, a, b)
        if event.variant == "remove":
            c1, c2 = event.crossings
            return _apply_r2_remove(d, c1, c2)
        raise MoveError(f"unknown r2 variant {event.variant!r}")
    if kind == "r3":
        return _apply_r3(d, event.crossings, event.variant)
    raise MoveError(f"unknown ESI kind {kind!r}")


# -- helpers -------------------------------------------------------------------


def _fresh_arcs(d: LinkDiagram, k: int) -> list[int]:
    base = d.max_arc_id()
    return [base + i + 1 for i in range(k)]


def _raw(d: LinkDiagram) -> list[tuple[int, list[int]]]:
    return [(c.cid, list(c.arcs)) for c in d.crossings]


def _build(raw, loops) -> LinkDiagram:
    return LinkDiagram(
        [(cid, tuple(arcs)) for cid, arcs in raw],
        [tuple(lp) for lp in loops],
    )


def _rotate(lp: tuple[int, ...], a: int) -> list[int]:
    k = lp.index(a)
    return list(lp[k:]) + list(lp[:k])


def _require_arc(d: LinkDiagram, a: int) -> None:
    if a not in d.arc_ids():
        raise MoveError(f"arc {a} does not exist in the current still")


# -- Morse moves ---------------------------------------------------------------


def _apply_birth(d: LinkDiagram) -> tuple[LinkDiagram, MoveInfo]:
    f1, f2 = _fresh_arcs(d, 2)
    new = _build(_raw(d), list(d.loops) + [(f1, f2)])
    info = MoveInfo("birth", None, {}, created_arcs=[f1, f2])
    return new, info


def _apply_death(d: LinkDiagram, circle: int) -> tuple[LinkDiagram, MoveInfo]:
    li = d.loop_of_arc(circle)
    if li is None:
        raise MoveError(
            f"death needs a crossing-free circle; id {circle} is not on one"
        )
    loops = [lp for i, lp in enumerate(d.loops) if i != li]
    new = _build(_raw(d), loops)
    info = MoveInfo("death", None, {}, victim_arcs=d.loops[li])
    return new, info


def _apply_saddle(d: LinkDiagram, a: int, b: int) -> tuple[LinkDiagram, MoveInfo]:
    if a == b:
        raise MoveError("saddle arcs must be distinct")
    _require_arc(d, a)
    _require_arc(d, b)
    la, lb = d.loop_of_arc(a), d.loop_of_arc(b)
    raw = _raw(d)
    loops = [lp for lp in d.loops]
    arc_map: dict[int, int] = {}

    if la is None and lb is None:
        ta, sa = d.arc_tail(a)
        ha, sha = d.arc_head(a)
        tb, sb = d.arc_tail(b)
        hb, shb = d.arc_head(b)
        u, w = _fresh_arcs(d, 2)
        raw[ta][1][sa] = u  # tail of a -> u -> head of b
        raw[hb][1][shb] = u
        raw[tb][1][sb] = w  # tail of b -> w -> head of a
        raw[ha][1][sha] = w
        arc_map = {a: u, b: w}
        created = [u, w]
    elif la is not None and lb is not None:
        if la == lb:
            lp = _rotate(d.loops[la], a)
            j = lp.index(b)
            alpha, beta = _fresh_arcs(d, 2)
            circle1 = [alpha] + lp[j + 1 :]
            circle2 = [beta] + lp[1:j]
            loops = [x for i, x in enumerate(loops) if i != la]
            loops.extend([tuple(circle1), tuple(circle2)])
            arc_map = {a: alpha, b: beta}
            created = [alpha, beta]
        else:
            lpa = _rotate(d.loops[la], a)
            lpb = _rotate(d.loops[lb], b)
            alpha, beta = _fresh_arcs(d, 2)
            merged = [alpha] + lpb[1:] + [beta] + lpa[1:]
            loops = [x for i, x in enumerate(loops) if i not in (la, lb)]
            loops.append(tuple(merged))
            arc_map = {a: alpha, b: beta}
            created = [alpha, beta]
    else:
        x, y, ly = (a, b, lb) if la is None else (b, a, la)
        tx, sx = d.arc_tail(x)
        hx, shx = d.arc_head(x)
        (w,) = _fresh_arcs(d, 1)
        raw[tx][1][sx] = w
        raw[hx][1][shx] = w
        arc_map = {x: w}
        for z in d.loops[ly]:
            arc_map[z] = w
        loops = [lp for i, lp in enumerate(loops) if i != ly]
        created = [w]

    new = _build(raw, loops)
    info = MoveInfo("saddle", None, arc_map, created_arcs=created, saddle_arcs=(a, b))
    return new, info


# -- Reidemeister 1 ------------------------------------------------------------


def _apply_r1_add(
    d: LinkDiagram, a: int, positive: bool
) -> tuple[LinkDiagram, MoveInfo]:
    _require_arc(d, a)
    la = d.loop_of_arc(a)
    cid = d.max_crossing_id() + 1
    raw = _raw(d)
    loops = [lp for lp in d.loops]
    if la is None:
        p, loop_arc, r = _fresh_arcs(d, 3)
        ta, sa = d.arc_tail(a)
        ha, sha = d.arc_head(a)
        raw[ta][1][sa] = p
        raw[ha][1][sha] = r
        arc_map = {a: p}
        created = [p, loop_arc, r]
        strand = p
    else:
        strand, loop_arc = _fresh_arcs(d, 2)
        arc_map = {z: strand for z in d.loops[la]}
        loops = [lp for i, lp in enumerate(loops) if i != la]
        created = [strand, loop_arc]
        p, r = strand, strand
    arcs = (p, loop_arc, loop_arc, r) if positive else (p, r, loop_arc, loop_arc)
    raw.insert(0, (cid, list(arcs)))
    new = _build(raw, loops)
    info = MoveInfo(
        "r1",
        "add_pos" if positive else "add_neg",
        arc_map,
        created_arcs=created,
        created_crossings=[cid],
        loop_arc=loop_arc,
        strand_arc=strand,
        positive=positive,
    )
    return new, info


# kink patterns: repeated-arc slots -> (positive?, p slot, r slot)
_KINK_PATTERNS = {
    (1, 2): (True, 0, 3),
    (0, 3): (True, 1, 2),
    (2, 3): (False, 0, 1),
    (0, 1): (False, 3, 2),
}


def _apply_r1_remove(d: LinkDiagram, cid: int) -> tuple[LinkDiagram, MoveInfo]:
    idx, c = d.crossing_by_id(cid)
    # a kinked unknot X(m,l,l,m) matches two patterns; take the first in order
    for (s1, s2), (positive, p_slot, r_slot) in _KINK_PATTERNS.items():
        if c.arcs[s1] == c.arcs[s2]:
            loop_arc = c.arcs[s1]
            break
    else:
        raise MoveError(f"crossing {cid} is not a kink")
    p, r = c.arcs[p_slot], c.arcs[r_slot]
    raw = [(ci, arcs) for ci, arcs in _raw(d) if ci != cid]
    loops = [lp for lp in d.loops]
    if p == r:
        f1, f2 = _fresh_arcs(d, 2)
        loops.append((f1, f2))
        arc_map = {p: f1}
        created = [f1, f2]
        strand = f1
    else:
        (f,) = _fresh_arcs(d, 1)
        for _, arcs in raw:
            for s, x in enumerate(arcs):
                if x in (p, r):
                    arcs[s] = f
        arc_map = {p: f, r: f}
        created = [f]
        strand = f
    new = _build(raw, loops)
    info = MoveInfo(
        "r1",
        "remove",
        arc_map,
        created_arcs=created,
        loop_arc=loop_arc,
        strand_arc=strand,
        positive=positive,
        positions=(idx,),
    )
    return new, info


# -- Reidemeister 2 ------------------------------------------------------------


def _r2_pieces(d, arc, loop_idx, fresh):
    """Cut one strand for an R2 poke: returns (p1, p2, p3, slot updates, consumed)."""
    if loop_idx is None:
        p1, p2, p3 = fresh(3)
        t, st = d.arc_tail(arc)
        h, sh = d.arc_head(arc)
        return p1, p2, p3, [(t, st, p1), (h, sh, p3)], {arc: p1}
    # closed: the long way around is a single piece
    pw, p2 = fresh(2)
    consumed = {z: pw for z in d.loops[loop_idx]}
    return pw, p2, pw, [], consumed


def _apply_r2_add(d: LinkDiagram, a: int, b: int) -> tuple[LinkDiagram, MoveInfo]:
    """Poke arc b over arc a (parallel finger template)."""
    if a == b:
        raise MoveError("r2 arcs must be distinct")
    _require_arc(d, a)
    _require_arc(d, b)
    la, lb = d.loop_of_arc(a), d.loop_of_arc(b)
    raw = _raw(d)
    loops = list(d.loops)
    fresh_pool = _fresh_arcs(d, 6)

    def fresh(k: int) -> list[int]:
        return [fresh_pool.pop(0) for _ in range(k)]

    arc_map: dict[int, int] = {}
    slot_updates = []
    if la is not None and lb is not None and la == lb:
        # both feet on one crossing-free circle: the two chains between the
        # cut points become the shared pieces Q1 = u3 = o1 and Q2 = u1 = o3.
        lp = _rotate(d.loops[la], a)
        j = lp.index(b)
        q2, q1, u2, o2 = fresh(4)
        u1, u3 = q2, q1
        o1, o3 = q1, q2
        for z in lp[1:j]:
            arc_map[z] = q1
        for z in lp[j + 1 :]:
            arc_map[z] = q2
        arc_map[a] = q2
        arc_map[b] = q1
        loops = [x for i, x in enumerate(loops) if i != la]
        created = [q2, q1, u2, o2]
    else:
        u1, u2, u3, upd_u, cons_u = _r2_pieces(d, a, la, fresh)
        o1, o2, o3, upd_o, cons_o = _r2_pieces(d, b, lb, fresh)
        slot_updates = upd_u + upd_o
        arc_map.update(cons_u)
        arc_map.update(cons_o)
        for li in sorted({x for x in (la, lb) if x is not None}, reverse=True):
            del loops[li]
        created = sorted({u1, u2, u3, o1, o2, o3})
    for idx, slot, new_arc in slot_updates:
        raw[idx][1][slot] = new_arc
    cid_a = d.max_crossing_id() + 1
    cid_b = cid_a + 1
    raw.insert(0, (cid_b, [u2, o3, u3, o2]))
    raw.insert(0, (cid_a, [u1, o1, u2, o2]))
    new = _build(raw, loops)
    info = MoveInfo(
        "r2",
        "add",
        arc_map,
        created_arcs=created,
        created_crossings=[cid_a, cid_b],
        pieces={"u1": u1, "u2": u2, "u3": u3, "o1": o1, "o2": o2, "o3": o3},
    )
    return new, info


def _match_r2_pair(d: LinkDiagram, c1: int, c2: int):
    """Find the (cA, cB) role assignment of a removable R2 pair."""
    i1, x1 = d.crossing_by_id(c1)
    i2, x2 = d.crossing_by_id(c2)
    for (ia, ca), (ib, cb) in (((i1, x1), (i2, x2)), ((i2, x2), (i1, x1))):
        u2 = ca.arcs[2]
        o2 = ca.arcs[3]
        if cb.arcs[0] == u2 and cb.arcs[3] == o2 and u2 != o2:
            if ca.sign + cb.sign != 0:
                raise MoveError(
                    f"crossings {c1},{c2} match the R2 pattern but have equal signs"
                )
            return ia, ca, ib, cb
    raise MoveError(f"crossings {c1},{c2} do not form a removable R2 pair")


def _apply_r2_remove(
    d: LinkDiagram, c1: int, c2: int
) -> tuple[LinkDiagram, MoveInfo]:
    ia, ca, ib, cb = _match_r2_pair(d, c1, c2)
    u1, o1, u2, o2 = ca.arcs
    _, o3, u3, _ = cb.arcs
    raw = [(ci, arcs) for ci, arcs in _raw(d) if ci not in (ca.cid, cb.cid)]
    loops = list(d.loops)
    arc_map: dict[int, int] = {}
    created: list[int] = []

    # Chain-fuse the four outer pieces along the relations u1~u3 and o1~o3.
    # A piece aliased across the two relations sits in the middle of a chain;
    # a chain that closes up becomes a crossing-free circle.
    next_id = d.max_arc_id()
    links: dict[int, set[int]] = {}
    for x, y in ((u1, u3), (o1, o3)):
        links.setdefault(x, set()).add(y)
        links.setdefault(y, set()).add(x)
    seen: set[int] = set()
    for start in sorted(links):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        while frontier:
            z = frontier.pop()
            for nxt in links[z]:
                if nxt not in component:
                    component.add(nxt)
                    frontier.append(nxt)
        seen |= component
        # a chain closes into a circle iff every piece has both occurrences
        # inside the removed pair, i.e. none survives in the remaining crossings
        outer_ends = [
            z
            for z in component
            if any(z in arcs for _, arcs in raw)
        ]
        if not outer_ends:
            next_id += 1
            f1 = next_id
            next_id += 1
            f2 = next_id
            loops.append((f1, f2))
            for z in component:
                arc_map[z] = f1
            created.extend([f1, f2])
        else:
            next_id += 1
            f = next_id
            for _, arcs in raw:
                for s, x in enumerate(arcs):
                    if x in component:
                        arcs[s] = f
            for z in component:
                arc_map[z] = f
            created.append(f)
    new = _build(raw, loops)
    info = MoveInfo(
        "r2",
        "remove",
        arc_map,
        created_arcs=created,
        positions=(ia, ib),
        pieces={"u1": u1, "u2": u2, "u3": u3, "o1": o1, "o2": o2, "o3": o3},
    )
    return new, info


# -- Reidemeister 3 ------------------------------------------------------------


def _over_slots(sign: int) -> tuple[int, int]:
    """(in, out) over-strand slots for a crossing of the given sign."""
    return (1, 3) if sign > 0 else (3, 1)


def _apply_r3(
    d: LinkDiagram, cids: tuple[int, int, int], variant: str | None
) -> tuple[LinkDiagram, MoveInfo]:
    if variant not in (None, "braid"):
        raise UnsupportedMoveError(f"r3 variant {variant!r} is not implemented")
    picked = [d.crossing_by_id(c) for c in cids]
    indices = {c.cid: idx for idx, c in picked}
    crossings = {c.cid: c for _, c in picked}
    if len(crossings) != 3:
        raise MoveError("r3 needs three distinct crossings")

    # triangle arcs: arcs whose two occurrences both lie in the chosen crossings
    occ: dict[int, list[tuple[int, int]]] = {}
    for cid, c in crossings.items():
        for slot, a in enumerate(c.arcs):
            occ.setdefault(a, []).append((cid, slot))
    inner = {a: places for a, places in occ.items() if len(places) == 2}
    inner = {
        a: places
        for a, places in inner.items()
        if places[0][0] != places[1][0]
    }
    if len(inner) != 3:
        raise MoveError("the three crossings do not form a triangle")
    pairs = {frozenset((p[0][0], p[1][0])) for p in inner.values()}
    if len(pairs) != 3:
        raise MoveError("the three crossings do not form a triangle")

    def is_over(slot: int) -> bool:
        return slot in (1, 3)

    # classify the three strands by their height pattern
    strands = []  # (inner arc, [(cid, over?)] at its two ends)
    for a, places in inner.items():
        levels = [(cid, is_over(slot)) for cid, slot in places]
        strands.append((a, levels))
    over_counts = sorted(sum(1 for _, ov in lv if ov) for _, lv in strands)
    if over_counts != [0, 1, 2]:
        raise MoveError("triangle is not braid-like (no top/middle/bottom strand)")

    new_arcs = {cid: list(c.arcs) for cid, c in crossings.items()}
    base = d.max_arc_id()
    arc_map: dict[int, int] = {}
    created: list[int] = []
    for k, (a, levels) in enumerate(sorted(strands)):
        # orient the inner arc: P is the crossing it leaves, Q the one it enters
        (cid1, slot1), (cid2, slot2) = occ[a]
        inc1 = crossings[cid1].slot_incoming(slot1)
        p_cid, q_cid = (cid2, cid1) if inc1 else (cid1, cid2)

        def level_slots(cid: int) -> tuple[int, int]:
            c = crossings[cid]
            slot = next(s for loc, s in occ[a] if loc == cid)
            if is_over(slot):
                oin, oout = _over_slots(c.sign)
                return oin, oout
            return 0, 2

        p_in, p_out = level_slots(p_cid)
        q_in, q_out = level_slots(q_cid)
        s_in = crossings[p_cid].arcs[p_in]
        s_out = crossings[q_cid].arcs[q_out]
        fresh = base + k + 1
        created.append(fresh)
        arc_map[a] = fresh
        # the strand now runs through Q first, then P
        new_arcs[q_cid][q_in] = s_in
        new_arcs[q_cid][q_out] = fresh
        new_arcs[p_cid][p_in] = fresh
        new_arcs[p_cid][p_out] = s_out

    raw = []
    for cid, arcs in _raw(d):
        raw.append((cid, new_arcs[cid]) if cid in new_arcs else (cid, arcs))
    new = _build(raw, list(d.loops))
    for cid in cids:
        if new.crossings[indices[cid]].sign != crossings[cid].sign:
            raise MoveError("r3 rewiring changed a crossing sign; not a valid move")
    info = MoveInfo(
        "r3",
        "braid",
        arc_map,
        created_arcs=created,
        positions=tuple(indices[c] for c in cids),
    )
    return new, info
