"""Gaussian elimination of based chain complexes with tracked equivalences.

Cancelling a differential entry of coefficient +-1 (a unit of Z[t]) between
two basis generators yields a smaller complex homotopy equivalent to the
original; the projection and inclusion maps of the equivalence are maintained
through repeated cancellations.  The projection is a strict retraction:
project o include = identity on the reduced complex.

This is used to construct triangle-move chain maps: reduce both cubes, match
the reduced complexes by a signed block bijection, and conjugate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .algebra import TPoly
from .cube import CubeComplex, Generator

__all__ = ["BasedComplex", "Reduction", "reduce_cube", "match_reduced"]

Element = dict[Generator, TPoly]


def elem_add(a: Element, b: Element, scale: TPoly | None = None) -> Element:
    out = dict(a)
    for g, p in b.items():
        q = p if scale is None else p * scale
        cur = out.get(g)
        total = q if cur is None else cur + q
        if total.is_zero():
            out.pop(g, None)
        else:
            out[g] = total
    return out


@dataclass
class BasedComplex:
    """Finite free complex with a chosen basis and sparse differential columns."""

    degrees: dict[Generator, tuple[int, int]]
    diff: dict[Generator, Element]

    @classmethod
    def from_cube(cls, cube: CubeComplex) -> "BasedComplex":
        degrees = {}
        diff = {}
        for g in cube.generators():
            degrees[g] = cube.degrees(g)
            diff[g] = dict(cube.differential_of(g).terms)
        return cls(degrees, diff)

    def is_zero_differential(self) -> bool:
        return all(not col for col in self.diff.values())


@dataclass
class Reduction:
    """A homotopy equivalence between an original complex and its reduction."""

    reduced: BasedComplex
    project: dict[Generator, Element]  # original generator -> reduced element
    include: dict[Generator, Element]  # reduced generator -> original element


def _unit_entry(poly: TPoly) -> int | None:
    terms = poly.terms
    if terms == {0: 1}:
        return 1
    if terms == {0: -1}:
        return -1
    return None


def reduce_cube(cube: CubeComplex) -> Reduction:
    return reduce_complex(BasedComplex.from_cube(cube))


def reduce_complex(cx: BasedComplex) -> Reduction:
    degrees = dict(cx.degrees)
    diff: dict[Generator, Element] = {g: dict(col) for g, col in cx.diff.items()}
    project: dict[Generator, Element] = {g: {g: TPoly(1)} for g in degrees}
    include: dict[Generator, Element] = {g: {g: TPoly(1)} for g in degrees}

    def find_pivot():
        for g in sorted(diff, key=lambda x: (degrees[x], x)):
            for h in sorted(diff[g], key=lambda x: (degrees[x], x)):
                lam = _unit_entry(diff[g][h])
                if lam is not None:
                    return g, h, lam
        return None

    while True:
        pivot = find_pivot()
        if pivot is None:
            break
        g, h, lam = pivot
        # rho = d(g) with the h-component removed
        rho = {k: v for k, v in diff[g].items() if k != h}
        inv = lam  # lam in {1,-1} is its own inverse
        # columns hitting h receive the correction, lose their h-component
        hitters = [
            x
            for x, col in diff.items()
            if x != g and h in col
        ]
        corrections = {}
        for x in hitters:
            c = diff[x].pop(h)
            corrections[x] = c
            scale = c * TPoly(-inv)
            diff[x] = elem_add(diff[x], rho, scale)
            if not diff[x]:
                diff[x] = {}
        # drop the pair
        del degrees[g], degrees[h]
        del diff[g]
        diff.pop(h, None)
        for col in diff.values():
            col.pop(g, None)  # entries into g from one degree lower
        # update projection: h -> -inv * rho, g -> 0
        h_image = {k: v * TPoly(-inv) for k, v in rho.items()}
        for o, elem in project.items():
            if g in elem or h in elem:
                new = {k: v for k, v in elem.items() if k not in (g, h)}
                if h in elem:
                    new = elem_add(new, h_image, elem[h])
                project[o] = new
        # update inclusion: survivors x with a (removed) h-component gain -inv*c(x)*G[g]
        g_image = include.pop(g)
        include.pop(h, None)
        for x, c in corrections.items():
            if x in include:
                include[x] = elem_add(include[x], g_image, c * TPoly(-inv))

    return Reduction(BasedComplex(degrees, diff), project, include)


# -- matching reduced complexes ---------------------------------------------------


def match_reduced(
    src: BasedComplex,
    tgt: BasedComplex,
    max_tries: int = 200000,
    degree_key=None,
) -> dict[Generator, tuple[Generator, int]] | None:
    """A signed bijection u with u o d = d o u, or None if none is found.

    Generators are paired within blocks of equal degree; `degree_key` projects
    the stored (i, q) when only part of it is preserved (q is meaningless
    after the t = 1 specialization).
    """
    degree_key = degree_key or (lambda deg: deg)
    src_blocks: dict = {}
    tgt_blocks: dict = {}
    for g, deg in src.degrees.items():
        src_blocks.setdefault(degree_key(deg), []).append(g)
    for g, deg in tgt.degrees.items():
        tgt_blocks.setdefault(degree_key(deg), []).append(g)
    if set(src_blocks) != set(tgt_blocks):
        return None
    for key in src_blocks:
        if len(src_blocks[key]) != len(tgt_blocks[key]):
            return None
        src_blocks[key].sort()
        tgt_blocks[key].sort()

    keys = sorted(src_blocks)
    if src.is_zero_differential() and tgt.is_zero_differential():
        return {
            s: (t, 1)
            for key in keys
            for s, t in zip(src_blocks[key], tgt_blocks[key])
        }

    def commutes(u: dict) -> bool:
        # u(d_src(g)) must equal d_tgt(u(g)) for every reduced source generator
        for g, (tg, sign) in u.items():
            lhs: Element = {}
            for h, p in src.diff.get(g, {}).items():
                th, s2 = u[h]
                lhs = elem_add(lhs, {th: p * s2})
            rhs = {k: v * sign for k, v in tgt.diff.get(tg, {}).items()}
            if lhs != rhs:
                return False
        return True

    block_options = []
    for key in keys:
        size = len(src_blocks[key])
        options = [
            list(zip(perm, signs))
            for perm in permutations(tgt_blocks[key])
            for signs in product((1, -1), repeat=size)
        ]
        block_options.append(options)

    tries = 0
    for combo in product(*block_options):
        tries += 1
        if tries > max_tries:
            return None
        u: dict[Generator, tuple[Generator, int]] = {}
        for key, choice in zip(keys, combo):
            for s, (t, sign) in zip(src_blocks[key], choice):
                u[s] = (t, sign)
        if commutes(u):
            return u
    return None
