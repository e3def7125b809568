"""Movie presentations of link cobordisms and their chain-level evaluation.

A movie is a sequence of elementary string interactions starting from the
empty diagram (or from a trivial knot, for punctured evaluations).  Each
event induces a chain map between the cube complexes of consecutive stills:

* birth / death: tensor with the unit on the new circle / apply the counit
  to the dying circle (degree +1);
* saddle: merge or split per resolution (degree -1);
* Reidemeister moves: degree-0 homotopy equivalences.  The R1 and R2 maps
  are local formulas valid when the active crossings sit first in the
  crossing order, so removals conjugate by the Koszul reordering sign
  (-1)^(inversions among 1-bits).  The R3 map is assembled at runtime from
  Gaussian-elimination equivalences of the two cubes.

Evaluating a closed movie on 1 gives the endomorphism of the ground ring:
its absolute value is the deformed invariant (a polynomial in t), whose
value at t = 0 is the undeformed integer invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .algebra import Label, TPoly, Theory, comultiply, counit, multiply, xmult
from .cube import CochainElement, CubeComplex, Generator, build_cube
from .diagram import LinkDiagram, ResolvedDiagram
from .errors import (
    KhovalError,
    MoveError,
    NonMonomialError,
    UnsupportedMoveError,
    ValidationError,
)
from .moves import ESI, MoveInfo, apply_esi, apply_esi_info
from .reduce import match_reduced, reduce_cube

__all__ = [
    "ChainMapRep",
    "Movie",
    "MovieReport",
    "esi_chain_map",
    "r3_equivalence",
    "eval_movie",
    "bn_invariant",
    "kj_number",
    "punctured_eval",
    "connected_sum",
    "validate_movie",
    "concatenate",
    "trivial_surface_movie",
    "punctured_from_empty",
    "punctured_to_empty",
    "torus_with_detour_movie",
    "canonical_movies",
    "movie_to_json",
    "movie_from_json",
]

ESI_Q_DEGREE = {"birth": 1, "death": 1, "saddle": -1, "r1": 0, "r2": 0, "r3": 0}


class ChainMapRep:
    """A chain map between two cube complexes, applied generator by generator."""

    def __init__(
        self,
        source: CubeComplex,
        target: CubeComplex,
        q_degree: int,
        fn: Callable[[Generator], CochainElement],
    ):
        self.source = source
        self.target = target
        self.q_degree = q_degree
        self._fn = fn
        self._memo: dict[Generator, CochainElement] = {}

    def of_generator(self, g: Generator) -> CochainElement:
        out = self._memo.get(g)
        if out is None:
            out = self._fn(g)
            self._memo[g] = out
        return out

    def apply(self, x: CochainElement) -> CochainElement:
        if x.cube is not self.source:
            raise KhovalError("element does not live on the map's source")
        acc = self.target.element()
        for g, coeff in x.terms.items():
            acc = acc + self.of_generator(g).scale(coeff)
        return acc


# -- circle bookkeeping across a move ------------------------------------------


def _hint_tuples(arc_map: dict[int, int]) -> dict[int, tuple[int, ...]]:
    return {a: (b,) for a, b in arc_map.items()}


def _circle_targets(
    src_res: ResolvedDiagram,
    tgt_res: ResolvedDiagram,
    hints: dict[int, tuple[int, ...]],
) -> list[tuple[int, ...]]:
    out = []
    for circ in src_res.circles:
        targets: set[int] = set()
        for a in circ:
            for na in hints.get(a, (a,)):
                t = tgt_res.circle_of.get(na)
                if t is not None:
                    targets.add(t)
        out.append(tuple(sorted(targets)))
    return out


def _local_transfer(
    src_res: ResolvedDiagram,
    tgt_res: ResolvedDiagram,
    hints: dict[int, tuple[int, ...]],
    labels: tuple[Label, ...],
    theory: Theory,
    fixed: dict[int, Label] | None = None,
    death_coeff: Callable[[Label], TPoly] | None = None,
) -> list[tuple[tuple[Label, ...], TPoly]]:
    """Transport labels across a move, applying at most one merge or split.

    `fixed` pre-assigns labels to target circles not hit by the matching
    (newly born circles, the middle circle of an R2).  A source circle with
    no surviving arcs must be sanctioned by `death_coeff`.
    """
    targets = _circle_targets(src_res, tgt_res, hints)
    assignment: dict[int, Label] = dict(fixed or {})
    coeff = TPoly(1)
    merge_at: dict[int, list[int]] = {}
    split_src: list[int] = []
    for i, ts in enumerate(targets):
        if len(ts) == 0:
            if death_coeff is None:
                raise KhovalError("a circle vanished without a death rule")
            coeff = coeff * death_coeff(labels[i])
            if coeff.is_zero():
                return []
        elif len(ts) == 1:
            merge_at.setdefault(ts[0], []).append(i)
        elif len(ts) == 2:
            split_src.append(i)
        else:
            raise KhovalError("circle transfer is not a single merge or split")

    n_merges = sum(1 for srcs in merge_at.values() if len(srcs) > 1)
    if n_merges + len(split_src) > 1:
        raise KhovalError("circle transfer is not a single merge or split")

    results: list[tuple[dict[int, Label], TPoly]] = [(assignment, coeff)]
    for t, srcs in merge_at.items():
        if len(srcs) == 1:
            for asg, _ in results:
                asg[t] = labels[srcs[0]]
        elif len(srcs) == 2:
            branched = []
            for asg, c in results:
                for lbl, poly in multiply(
                    labels[srcs[0]], labels[srcs[1]], theory
                ).items():
                    asg2 = dict(asg)
                    asg2[t] = lbl
                    branched.append((asg2, c * poly))
            results = branched
        else:
            raise KhovalError("more than two circles merged at once")
    for i in split_src:
        t1, t2 = targets[i]
        branched = []
        for asg, c in results:
            for (l1, l2), poly in comultiply(labels[i], theory).items():
                asg2 = dict(asg)
                asg2[t1] = l1
                asg2[t2] = l2
                branched.append((asg2, c * poly))
        results = branched

    out = []
    for asg, c in results:
        if len(asg) != tgt_res.count:
            raise KhovalError("circle transfer left target circles unlabeled")
        out.append((tuple(asg[k] for k in range(tgt_res.count)), c))
    return out


def _koszul_to_front(mask: int, front: tuple[int, ...], n: int) -> tuple[int, int]:
    """Reorder crossings so `front` comes first; return (new mask, Koszul sign)."""
    order = list(front) + [j for j in range(n) if j not in front]
    pos = {old: p for p, old in enumerate(order)}
    new_mask = 0
    for p, old in enumerate(order):
        if (mask >> old) & 1:
            new_mask |= 1 << p
    ones = [j for j in range(n) if (mask >> j) & 1]
    inv = 0
    for a in range(len(ones)):
        for b in range(a + 1, len(ones)):
            if pos[ones[a]] > pos[ones[b]]:
                inv += 1
    return new_mask, (-1 if inv & 1 else 1)


# -- the chain maps -------------------------------------------------------------


def esi_chain_map(
    event: ESI,
    src: CubeComplex,
    tgt: CubeComplex,
    th: Theory | None = None,
) -> ChainMapRep:
    """The chain map induced by one elementary string interaction."""
    th = th or src.theory
    if src.theory is not th or tgt.theory is not th:
        raise KhovalError("cube theories do not match the requested theory")
    rewritten, info = apply_esi_info(src.diagram, event)
    if rewritten != tgt.diagram:
        raise MoveError("target cube was not built from the rewritten diagram")
    kind = event.kind
    if kind == "birth":
        fn = _birth_fn(src, tgt, info)
    elif kind == "death":
        fn = _death_fn(src, tgt, info)
    elif kind == "saddle":
        fn = _saddle_fn(src, tgt, info)
    elif kind == "r1":
        fn = _r1_add_fn(src, tgt, info) if info.variant != "remove" else _r1_remove_fn(src, tgt, info)
    elif kind == "r2":
        fn = _r2_add_fn(src, tgt, info) if info.variant == "add" else _r2_remove_fn(src, tgt, info)
    elif kind == "r3":
        fn = _r3_fn(src, tgt)
    else:
        raise MoveError(f"unknown ESI kind {kind!r}")
    return ChainMapRep(src, tgt, ESI_Q_DEGREE[kind], fn)


def _element(tgt: CubeComplex, mask: int, terms) -> CochainElement:
    acc: dict[Generator, TPoly] = {}
    for labels, poly in terms:
        g = Generator(mask, labels)
        cur = acc.get(g)
        total = poly if cur is None else cur + poly
        reduced = tgt.theory.reduce(total)
        if reduced.is_zero():
            acc.pop(g, None)
        else:
            acc[g] = reduced
    return CochainElement(tgt, acc)


def _birth_fn(src, tgt, info: MoveInfo):
    born = info.created_arcs[0]

    def fn(g: Generator) -> CochainElement:
        tgt_res = tgt.resolutions[g.mask]
        fixed = {tgt_res.circle_of[born]: Label.PLUS}
        terms = _local_transfer(
            src.resolutions[g.mask], tgt_res, {}, g.labels, tgt.theory, fixed
        )
        return _element(tgt, g.mask, terms)

    return fn


def _death_fn(src, tgt, info: MoveInfo):
    def fn(g: Generator) -> CochainElement:
        terms = _local_transfer(
            src.resolutions[g.mask],
            tgt.resolutions[g.mask],
            {},
            g.labels,
            tgt.theory,
            death_coeff=lambda lbl: counit(lbl, tgt.theory),
        )
        return _element(tgt, g.mask, terms)

    return fn


def _saddle_fn(src, tgt, info: MoveInfo):
    hints = _hint_tuples(info.arc_map)

    def fn(g: Generator) -> CochainElement:
        terms = _local_transfer(
            src.resolutions[g.mask],
            tgt.resolutions[g.mask],
            hints,
            g.labels,
            tgt.theory,
        )
        return _element(tgt, g.mask, terms)

    return fn


def _scaled(terms, factor: TPoly | int):
    if isinstance(factor, int):
        factor = TPoly(factor)
    return [(labels, poly * factor) for labels, poly in terms]


def _xmult_target(terms, circle: int, theory: Theory, factor: int = 1):
    """Multiply the label of one target circle by X = v- in every term."""
    out = []
    for labels, poly in terms:
        for lbl, extra in xmult(labels[circle], theory).items():
            new_labels = list(labels)
            new_labels[circle] = lbl
            out.append((tuple(new_labels), poly * extra * factor))
    return out


def _r1_add_fn(src, tgt, info: MoveInfo):
    hints = _hint_tuples(info.arc_map)
    positive = info.positive
    loop_arc = info.loop_arc
    strand_arc = info.strand_arc

    def fn(g: Generator) -> CochainElement:
        src_res = src.resolutions[g.mask]
        if positive:
            mask = g.mask << 1  # kink bit 0
            tgt_res = tgt.resolutions[mask]
            kink = tgt_res.circle_of[loop_arc]
            base = _local_transfer(
                src_res, tgt_res, hints, g.labels, tgt.theory,
                fixed={kink: Label.MINUS},
            )
            plus = _local_transfer(
                src_res, tgt_res, hints, g.labels, tgt.theory,
                fixed={kink: Label.PLUS},
            )
            strand = tgt_res.circle_of[strand_arc]
            terms = base + _xmult_target(plus, strand, tgt.theory, factor=-1)
        else:
            mask = (g.mask << 1) | 1
            tgt_res = tgt.resolutions[mask]
            kink = tgt_res.circle_of[loop_arc]
            terms = _local_transfer(
                src_res, tgt_res, hints, g.labels, tgt.theory,
                fixed={kink: Label.PLUS},
            )
        return _element(tgt, mask, terms)

    return fn


def _r1_remove_fn(src, tgt, info: MoveInfo):
    hints = _hint_tuples(info.arc_map)
    positive = info.positive
    loop_arc = info.loop_arc
    strand_arc = info.strand_arc
    idx = info.positions[0]

    def fn(g: Generator) -> CochainElement:
        rmask, sign = _koszul_to_front(g.mask, (idx,), src.n)
        bit = rmask & 1
        mask = rmask >> 1
        src_res = src.resolutions[g.mask]
        kink = src_res.circle_of[loop_arc]
        kink_label = g.labels[kink]

        def consumed(_lbl: Label) -> TPoly:
            return TPoly(1)  # the kink circle is handled by the branch below

        if positive:
            if bit != 0 or kink_label is not Label.MINUS:
                return tgt.element()
            terms = _local_transfer(
                src_res, tgt.resolutions[mask], hints, g.labels, tgt.theory,
                death_coeff=consumed,
            )
            return _element(tgt, mask, _scaled(terms, sign))
        if bit != 1:
            return tgt.element()
        terms = _local_transfer(
            src_res, tgt.resolutions[mask], hints, g.labels, tgt.theory,
            death_coeff=consumed,
        )
        if kink_label is Label.PLUS:
            return _element(tgt, mask, _scaled(terms, sign))
        strand = tgt.resolutions[mask].circle_of[strand_arc]
        terms = _xmult_target(terms, strand, tgt.theory, factor=-1)
        return _element(tgt, mask, _scaled(terms, sign))

    return fn


def _r2_add_fn(src, tgt, info: MoveInfo):
    p = info.pieces
    through_hints = _hint_tuples(info.arc_map)
    # on the circle-side slice both cut ends of each poked strand serve as hints
    u_pair = tuple(sorted({p["u1"], p["u3"]}))
    o_pair = tuple(sorted({p["o1"], p["o3"]}))
    side_hints = {}
    for old, rep in info.arc_map.items():
        if rep == p["u1"]:
            side_hints[old] = u_pair
        elif rep == p["o1"]:
            side_hints[old] = o_pair
        else:
            raise KhovalError("unexpected r2 hint")

    def fn(g: Generator) -> CochainElement:
        src_res = src.resolutions[g.mask]
        # through slice: first crossing 0-smoothed, second 1-smoothed
        mask_through = (g.mask << 2) | 0b10
        through = _local_transfer(
            src_res, tgt.resolutions[mask_through], through_hints,
            g.labels, tgt.theory,
        )
        out = _element(tgt, mask_through, through)
        # circle slice: first crossing 1-smoothed, second 0-smoothed
        mask_circle = (g.mask << 2) | 0b01
        tgt_res = tgt.resolutions[mask_circle]
        mid = tgt_res.circle_of[p["u2"]]
        circle_terms = _local_transfer(
            src_res, tgt_res, side_hints, g.labels, tgt.theory,
            fixed={mid: Label.PLUS},
        )
        return out + _element(tgt, mask_circle, circle_terms)

    return fn


def _r2_remove_fn(src, tgt, info: MoveInfo):
    p = info.pieces
    hints = _hint_tuples(info.arc_map)
    ia, ib = info.positions

    def fn(g: Generator) -> CochainElement:
        rmask, sign = _koszul_to_front(g.mask, (ia, ib), src.n)
        b_a = rmask & 1
        b_b = (rmask >> 1) & 1
        mask = rmask >> 2
        src_res = src.resolutions[g.mask]
        if (b_a, b_b) == (0, 1):
            terms = _local_transfer(
                src_res, tgt.resolutions[mask], hints, g.labels, tgt.theory
            )
            return _element(tgt, mask, _scaled(terms, sign))
        if (b_a, b_b) == (1, 0):
            mid = src_res.circle_of[p["u2"]]
            if g.labels[mid] is not Label.MINUS:
                return tgt.element()
            reduced_labels = g.labels
            terms = _local_transfer(
                src_res, tgt.resolutions[mask], hints, reduced_labels,
                tgt.theory,
                death_coeff=lambda lbl: TPoly(1),  # the mid circle is consumed
            )
            return _element(tgt, mask, _scaled(terms, -sign))
        return tgt.element()

    return fn


def _conjugated_fn(reduction_in, pairing, reduction_out, tgt):
    def fn(g: Generator) -> CochainElement:
        acc: dict[Generator, TPoly] = {}
        for r, c1 in reduction_in.project.get(g, {}).items():
            tr, sign = pairing[r]
            for h, c2 in reduction_out.include[tr].items():
                poly = tgt.theory.reduce(c1 * c2 * sign)
                cur = acc.get(h)
                total = poly if cur is None else cur + poly
                if total.is_zero():
                    acc.pop(h, None)
                else:
                    acc[h] = total
        return CochainElement(tgt, acc)

    return fn


def r3_equivalence(
    src: CubeComplex, tgt: CubeComplex
) -> tuple[ChainMapRep, ChainMapRep]:
    """Both directions of the triangle-move homotopy equivalence."""
    red_src = reduce_cube(src)
    red_tgt = reduce_cube(tgt)
    # q is not a grading once t = 1 has been specialized
    key = (lambda deg: deg[0]) if src.theory is Theory.LEE else None
    u = match_reduced(red_src.reduced, red_tgt.reduced, degree_key=key)
    if u is None:
        raise UnsupportedMoveError(
            "no chain-level identification found for this r3 configuration"
        )
    u_inv = {t: (s, sign) for s, (t, sign) in u.items()}
    fwd = ChainMapRep(src, tgt, 0, _conjugated_fn(red_src, u, red_tgt, tgt))
    bwd = ChainMapRep(tgt, src, 0, _conjugated_fn(red_tgt, u_inv, red_src, src))
    return fwd, bwd


def _r3_fn(src, tgt):
    return r3_equivalence(src, tgt)[0].of_generator


# -- movies ----------------------------------------------------------------------


@dataclass(frozen=True)
class MovieReport:
    ok: bool
    index: int | None = None
    reason: str | None = None


class Movie:
    """An ordered list of ESIs replayed from the empty (or unknot) diagram."""

    def __init__(self, events, initial: str = "empty"):
        if initial not in ("empty", "unknot"):
            raise KhovalError(f"unknown initial still {initial!r}")
        self.events: tuple[ESI, ...] = tuple(events)
        self.initial = initial
        self._replay: tuple[list[LinkDiagram], list[MoveInfo], MovieReport] | None = None

    def initial_diagram(self) -> LinkDiagram:
        if self.initial == "empty":
            return LinkDiagram()
        return LinkDiagram([], [(1, 2)])

    def replay(self):
        """(stills up to failure, move infos, validation report).

        Failure indices are 1-based: event 1 is the first event.
        """
        if self._replay is None:
            stills = [self.initial_diagram()]
            infos: list[MoveInfo] = []
            report = MovieReport(True)
            for k, event in enumerate(self.events):
                try:
                    d, info = apply_esi_info(stills[-1], event)
                except KhovalError as exc:
                    report = MovieReport(False, k + 1, str(exc))
                    break
                stills.append(d)
                infos.append(info)
            self._replay = (stills, infos, report)
        return self._replay

    def stills(self) -> list[LinkDiagram]:
        stills, _, report = self.replay()
        if not report.ok:
            raise ValidationError(report.index, report.reason)
        return stills

    def validate(self) -> MovieReport:
        return self.replay()[2]

    def is_closed(self) -> bool:
        return self.stills()[-1].is_empty()

    def __eq__(self, other):
        if not isinstance(other, Movie):
            return NotImplemented
        return self.events == other.events and self.initial == other.initial

    def __repr__(self):
        return f"Movie({len(self.events)} events, initial={self.initial!r})"


def validate_movie(m: Movie) -> MovieReport:
    return m.validate()


def eval_movie(
    m: Movie,
    th: Theory = Theory.BAR_NATAN,
    start_label: Label | None = None,
    cap: int = 16,
    workers: int = 1,
) -> CochainElement:
    """Thread the initial element through all ESI chain maps."""
    report = m.validate()
    if not report.ok:
        raise ValidationError(report.index, report.reason)
    stills = m.stills()
    cube = build_cube(stills[0], th, cap=cap, workers=workers)
    if m.initial == "empty":
        if start_label is not None:
            raise KhovalError("a movie from the empty diagram starts at 1")
        x = cube.basis_element(Generator(0, ()))
    else:
        label = start_label or Label.PLUS
        x = cube.basis_element(Generator(0, (label,)))
    for event, still in zip(m.events, stills[1:]):
        nxt = build_cube(still, th, cap=cap, workers=workers)
        x = esi_chain_map(event, cube, nxt, th).apply(x)
        cube = nxt
    return x


def _closed_value(m: Movie, th: Theory, cap: int = 16, workers: int = 1) -> TPoly:
    if not m.is_closed() or m.initial != "empty":
        raise MoveError("movie is not a closed empty-to-empty movie")
    x = eval_movie(m, th, cap=cap, workers=workers)
    return x.terms.get(Generator(0, ()), TPoly(0))


def bn_invariant(m: Movie, cap: int = 16, workers: int = 1) -> TPoly:
    """The deformed invariant: |closed-movie evaluation|, a monomial in t."""
    value = _closed_value(m, Theory.BAR_NATAN, cap, workers)
    if value.is_zero():
        return TPoly(0)
    if not value.is_monomial():
        raise NonMonomialError(f"closed movie evaluated to a non-monomial: {value}")
    ((exp, coeff),) = value.items()
    return TPoly({exp: abs(coeff)})


def kj_number(m: Movie, cap: int = 16, workers: int = 1) -> int:
    """The undeformed integer invariant; cross-checked against t = 0."""
    plain = abs(_closed_value(m, Theory.KHOVANOV, cap, workers).coefficient(0))
    from_deformed = abs(bn_invariant(m, cap, workers).specialize(0))
    if plain != from_deformed:
        raise KhovalError(
            "internal error: t=0 specialization disagrees with the plain evaluation"
        )
    return plain


def lee_value(m: Movie, cap: int = 16, workers: int = 1) -> int:
    """Closed-movie evaluation at t = 1."""
    return _closed_value(m, Theory.LEE, cap, workers).coefficient(0)


def _is_unknot_still(d: LinkDiagram) -> bool:
    return d.n == 0 and d.free_loops == 1


def punctured_eval(
    m: Movie,
    x: Label | None = None,
    direction: str = "to_empty",
    th: Theory = Theory.BAR_NATAN,
):
    """Evaluate a punctured movie: unknot -> empty on a label, or empty -> unknot on 1."""
    if direction == "to_empty":
        if m.initial != "unknot" or not m.stills()[-1].is_empty():
            raise MoveError("to_empty movie must run from the unknot to the empty diagram")
        if x is None:
            raise MoveError("to_empty evaluation needs a starting label")
        out = eval_movie(m, th, start_label=x)
        return out.terms.get(Generator(0, ()), TPoly(0))
    if direction == "from_empty":
        if m.initial != "empty" or not _is_unknot_still(m.stills()[-1]):
            raise MoveError("from_empty movie must run from the empty diagram to the unknot")
        return eval_movie(m, th)
    raise MoveError(f"unknown punctured direction {direction!r}")


def connected_sum(m1: Movie, m2: Movie, th: Theory = Theory.BAR_NATAN) -> TPoly:
    """Compose punctured evaluations: m1 (empty->unknot) then m2 (unknot->empty)."""
    element = punctured_eval(m1, direction="from_empty", th=th)
    final = m1.stills()[-1]
    if not _is_unknot_still(final):
        raise MoveError("m1 must end at a trivial-knot still")
    total = TPoly(0)
    for g, coeff in element.terms.items():
        (label,) = g.labels
        total = total + coeff * punctured_eval(m2, label, "to_empty", th)
    if total.is_zero():
        return TPoly(0)
    if not total.is_monomial():
        raise NonMonomialError(f"connected sum evaluated to a non-monomial: {total}")
    ((exp, coeff),) = total.items()
    return TPoly({exp: abs(coeff)})


# -- concatenation -----------------------------------------------------------------


def _translate_event(e: ESI, arc_map: dict[int, int], cross_map: dict[int, int]) -> ESI:
    def arcs(t):
        return tuple(arc_map[a] for a in t)

    def crossings(t):
        return tuple(cross_map[c] for c in t)

    try:
        if e.kind == "death":
            return ESI("death", circle=arc_map[e.circle])
        if e.kind == "saddle":
            return ESI("saddle", arcs=arcs(e.arcs))
        if e.kind == "r1":
            if e.variant == "remove":
                return ESI("r1", variant="remove", crossing=cross_map[e.crossing])
            return ESI("r1", variant=e.variant, arc=arc_map[e.arc])
        if e.kind == "r2":
            if e.variant == "remove":
                return ESI("r2", variant="remove", crossings=crossings(e.crossings))
            return ESI("r2", variant="add", arcs=arcs(e.arcs))
        if e.kind == "r3":
            return ESI("r3", variant=e.variant, crossings=crossings(e.crossings))
    except KeyError as exc:
        raise MoveError(f"cannot translate event {e}: unknown id {exc}") from exc
    return e  # birth needs no ids


def concatenate(m1: Movie, m2: Movie) -> Movie:
    """Glue a movie ending at the unknot to one starting there."""
    if m2.initial != "unknot":
        raise MoveError("second movie must start at the unknot")
    final = m1.stills()[-1]
    if not _is_unknot_still(final):
        raise MoveError("first movie must end at a trivial-knot still")
    lp = final.loops[0]
    if len(lp) != 2:
        raise MoveError("gluing needs a two-arc final circle")
    arc_map = {1: lp[0], 2: lp[1]}
    cross_map: dict[int, int] = {}
    d_concat = final
    d_solo = m2.initial_diagram()
    events = list(m1.events)
    for e in m2.events:
        e_t = _translate_event(e, arc_map, cross_map)
        d_concat, info_c = apply_esi_info(d_concat, e_t)
        d_solo, info_s = apply_esi_info(d_solo, e)
        if len(info_c.created_arcs) != len(info_s.created_arcs):
            raise MoveError("concatenation lost arc correspondence")
        for a_s, a_c in zip(info_s.created_arcs, info_c.created_arcs):
            arc_map[a_s] = a_c
        for c_s, c_c in zip(info_s.created_crossings, info_c.created_crossings):
            cross_map[c_s] = c_c
        events.append(e_t)
    return Movie(events, m1.initial)


# -- canonical movies ----------------------------------------------------------------


def _tube_events(d: LinkDiagram) -> tuple[list[ESI], LinkDiagram]:
    """Split the unique free loop into two circles and merge them back."""
    lp = d.loops[0]
    if len(lp) < 2:
        raise MoveError("tube needs a circle with two addressable arcs")
    split = ESI("saddle", arcs=(lp[0], lp[1]))
    d = apply_esi(d, split)
    a = d.loops[-2][0]
    b = d.loops[-1][0]
    merge = ESI("saddle", arcs=(a, b))
    d = apply_esi(d, merge)
    return [split, merge], d


def trivial_surface_movie(genus: int) -> Movie:
    """The standard closed surface of a given genus: birth, tubes, death."""
    if genus < 0:
        raise KhovalError("genus must be non-negative")
    events = [ESI("birth")]
    d = apply_esi(LinkDiagram(), events[0])
    for _ in range(genus):
        tube, d = _tube_events(d)
        events.extend(tube)
    events.append(ESI("death", circle=min(d.loops[0])))
    return Movie(events)


def punctured_from_empty(genus: int) -> Movie:
    """Trivial genus-g surface with the puncture at the end: empty -> unknot."""
    events = [ESI("birth")]
    d = apply_esi(LinkDiagram(), events[0])
    for _ in range(genus):
        tube, d = _tube_events(d)
        events.extend(tube)
    return Movie(events)


def punctured_to_empty(genus: int) -> Movie:
    """Trivial genus-g surface with the puncture at the start: unknot -> empty."""
    events: list[ESI] = []
    d = LinkDiagram([], [(1, 2)])
    for _ in range(genus):
        tube, d = _tube_events(d)
        events.extend(tube)
    events.append(ESI("death", circle=min(d.loops[0])))
    return Movie(events, initial="unknot")


def torus_with_detour_movie() -> Movie:
    """The torus movie with an R2 poke and its removal inserted in the middle."""
    events = [ESI("birth")]
    d = apply_esi(LinkDiagram(), events[0])
    lp = d.loops[0]
    split = ESI("saddle", arcs=(lp[0], lp[1]))
    d = apply_esi(d, split)
    events.append(split)
    a = d.loops[-2][0]
    b = d.loops[-1][0]
    poke = ESI("r2", variant="add", arcs=(a, b))
    d, info = apply_esi_info(d, poke)
    events.append(poke)
    unpoke = ESI("r2", variant="remove", crossings=tuple(info.created_crossings))
    d = apply_esi(d, unpoke)
    events.append(unpoke)
    a = d.loops[-2][0]
    b = d.loops[-1][0]
    merge = ESI("saddle", arcs=(a, b))
    d = apply_esi(d, merge)
    events.append(merge)
    events.append(ESI("death", circle=min(d.loops[0])))
    return Movie(events)


def canonical_movies() -> dict[str, Movie]:
    movies = {
        "sphere": trivial_surface_movie(0),
        "torus": trivial_surface_movie(1),
        "torus_r2_detour": torus_with_detour_movie(),
    }
    for g in range(2, 6):
        movies[f"genus{g}"] = trivial_surface_movie(g)
    return movies


# -- JSON ------------------------------------------------------------------------------


def movie_to_json(m: Movie) -> dict:
    out: dict = {"movie": [e.to_json() for e in m.events]}
    if m.initial != "empty":
        out["initial"] = m.initial
    return out


def movie_from_json(obj: dict) -> Movie:
    from .errors import ParseError

    if not isinstance(obj, dict) or "movie" not in obj:
        raise ParseError("movie file must be an object with a 'movie' list")
    events = [ESI.from_json(e) for e in obj["movie"]]
    initial = obj.get("initial", "empty")
    if initial not in ("empty", "unknot"):
        raise ParseError(f"unknown initial still {initial!r}")
    return Movie(events, initial)
