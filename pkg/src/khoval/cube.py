"""The cube of modules: cochain groups, gradings, and the signed differential.

Vertices of the cube are bitmasks (bit j = smoothing of crossing j).  A
generator is a vertex together with one label per circle of its resolution,
circles being listed in canonical order (increasing smallest arc id).  The
differential applies the merge/split maps along edges with the sign
(-1)^(number of 1-bits after the flipped position), which makes every square
face anticommute.

Cohomological degree of a generator is |v| - n_minus; its q-degree is the sum
of label degrees plus (|v| - n_minus) + (n_plus - n_minus), and a coefficient
t^k lowers q by 4k.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, NamedTuple

from .algebra import Label, TPoly, Theory, comultiply, multiply
from .diagram import (
    LinkDiagram,
    Merge,
    ResolvedDiagram,
    Split,
    edge_effect_from_resolutions,
    resolve,
)
from .errors import CapExceededError, KhovalError

__all__ = [
    "Generator",
    "CochainElement",
    "CubeComplex",
    "CheckReport",
    "build_cube",
    "differential",
    "degrees",
    "check_d_squared",
    "check_faces",
]

DEFAULT_CAP = 16


class Generator(NamedTuple):
    """A cube vertex (bitmask) with a labeling of its circles."""

    mask: int
    labels: tuple[Label, ...]

    def bits(self, n: int) -> tuple[int, ...]:
        return tuple((self.mask >> j) & 1 for j in range(n))

    def __str__(self) -> str:
        lab = "(x)".join(str(l) for l in self.labels) or "1"
        return f"[{self.mask:b}|{lab}]"


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    detail: str = ""


class CubeComplex:
    """All resolutions of a diagram with the theory's cube of modules."""

    def __init__(
        self,
        diagram: LinkDiagram,
        theory: Theory = Theory.KHOVANOV,
        cap: int = DEFAULT_CAP,
        workers: int = 1,
    ):
        if diagram.n > cap:
            raise CapExceededError(
                f"diagram has {diagram.n} crossings, cap is {cap}"
            )
        self.diagram = diagram
        self.theory = theory
        self.n = diagram.n
        self.n_plus = diagram.n_plus
        self.n_minus = diagram.n_minus
        masks = range(1 << self.n)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                self.resolutions = list(pool.map(lambda m: resolve(diagram, m), masks))
        else:
            self.resolutions = [resolve(diagram, m) for m in masks]
        self._edges: dict[tuple[int, int], Merge | Split] = {}

    # -- structure ---------------------------------------------------------

    def edge(self, mask: int, j: int) -> Merge | Split:
        """Merge/split data for the edge flipping crossing j at `mask`."""
        if (mask >> j) & 1:
            raise KhovalError("edge must start at a 0-bit")
        key = (mask, j)
        data = self._edges.get(key)
        if data is None:
            data = edge_effect_from_resolutions(
                self.resolutions[mask], self.resolutions[mask | (1 << j)]
            )
            self._edges[key] = data
        return data

    def edge_sign(self, mask: int, j: int) -> int:
        """(-1)^(sum of vertex coordinates after position j)."""
        return -1 if (mask >> (j + 1)).bit_count() & 1 else 1

    def circles(self, mask: int) -> ResolvedDiagram:
        return self.resolutions[mask]

    # -- generators and degrees ---------------------------------------------

    def generators_at(self, mask: int) -> Iterator[Generator]:
        k = self.resolutions[mask].count
        for labels in itertools.product((Label.PLUS, Label.MINUS), repeat=k):
            yield Generator(mask, labels)

    def generators(self) -> Iterator[Generator]:
        for mask in range(1 << self.n):
            yield from self.generators_at(mask)

    def degrees(self, g: Generator) -> tuple[int, int]:
        """(cohomological degree, q-degree) of a generator."""
        if len(g.labels) != self.resolutions[g.mask].count:
            raise KhovalError("generator does not live on this cube")
        i = g.mask.bit_count() - self.n_minus
        q = sum(l.q_degree for l in g.labels) + i + (self.n_plus - self.n_minus)
        return i, q

    def element(self, terms: dict[Generator, TPoly] | None = None) -> "CochainElement":
        return CochainElement(self, terms or {})

    def debug_json(self) -> dict:
        """A JSON-friendly dump of vertices, circle counts and edge effects."""
        vertices = [
            {
                "mask": mask,
                "bits": list(Generator(mask, ()).bits(self.n)),
                "circles": [list(c) for c in self.resolutions[mask].circles],
            }
            for mask in range(1 << self.n)
        ]
        edges = []
        for mask in range(1 << self.n):
            for j in range(self.n):
                if (mask >> j) & 1:
                    continue
                data = self.edge(mask, j)
                kind = "merge" if isinstance(data, Merge) else "split"
                edges.append(
                    {
                        "from": mask,
                        "crossing": j,
                        "kind": kind,
                        "sign": self.edge_sign(mask, j),
                    }
                )
        return {
            "theory": self.theory.value,
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "vertices": vertices,
            "edges": edges,
        }

    def basis_element(self, g: Generator) -> "CochainElement":
        return CochainElement(self, {g: TPoly(1)})

    # -- differential --------------------------------------------------------

    def apply_edge(self, g: Generator, j: int) -> list[tuple[Generator, TPoly]]:
        """Unsigned edge map on one generator."""
        data = self.edge(g.mask, j)
        tgt_mask = g.mask | (1 << j)
        tgt_count = self.resolutions[tgt_mask].count
        out = []
        if isinstance(data, Merge):
            base: list[Label | None] = [None] * tgt_count
            for s, t in data.correspondence.items():
                base[t] = g.labels[s]
            i1, i2 = data.sources
            for lbl, poly in multiply(g.labels[i1], g.labels[i2], self.theory).items():
                labels = list(base)
                labels[data.target] = lbl
                out.append((Generator(tgt_mask, tuple(labels)), poly))
        else:
            base = [None] * tgt_count
            for s, t in data.correspondence.items():
                base[t] = g.labels[s]
            t1, t2 = sorted(data.targets)
            for (l1, l2), poly in comultiply(g.labels[data.source], self.theory).items():
                labels = list(base)
                labels[t1] = l1
                labels[t2] = l2
                out.append((Generator(tgt_mask, tuple(labels)), poly))
        return out

    def differential_of(
        self, g: Generator, sign_fn: Callable[[int, int], int] | None = None
    ) -> "CochainElement":
        sign_fn = sign_fn or self.edge_sign
        acc: dict[Generator, TPoly] = {}
        for j in range(self.n):
            if (g.mask >> j) & 1:
                continue
            sign = sign_fn(g.mask, j)
            for tgt, poly in self.apply_edge(g, j):
                _accumulate(acc, tgt, poly * sign, self.theory)
        return CochainElement(self, acc)

    def differential(
        self, x: "CochainElement", sign_fn: Callable[[int, int], int] | None = None
    ) -> "CochainElement":
        if x.cube is not self:
            raise KhovalError("cochain element lives on a different cube")
        acc: dict[Generator, TPoly] = {}
        for g, coeff in x.terms.items():
            for tgt, poly in self.differential_of(g, sign_fn).terms.items():
                _accumulate(acc, tgt, poly * coeff, self.theory)
        return CochainElement(self, acc)


class CochainElement:
    """A sparse Z[t]-combination of generators on one cube."""

    __slots__ = ("cube", "terms")

    def __init__(self, cube: CubeComplex, terms: dict[Generator, TPoly]):
        self.cube = cube
        self.terms = {g: p for g, p in terms.items() if not p.is_zero()}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CochainElement") -> "CochainElement":
        if other.cube is not self.cube:
            raise KhovalError("cannot add elements on different cubes")
        acc = dict(self.terms)
        for g, p in other.terms.items():
            _accumulate(acc, g, p, self.cube.theory)
        return CochainElement(self.cube, acc)

    def __sub__(self, other: "CochainElement") -> "CochainElement":
        return self + other.scale(-1)

    def scale(self, factor: TPoly | int) -> "CochainElement":
        if isinstance(factor, int):
            factor = TPoly(factor)
        acc = {}
        for g, p in self.terms.items():
            _accumulate(acc, g, p * factor, self.cube.theory)
        return CochainElement(self.cube, acc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CochainElement):
            return NotImplemented
        return self.cube is other.cube and self.terms == other.terms

    def degree(self) -> tuple[int, int]:
        """The common (i, q) of all terms; error if inhomogeneous or zero.

        A coefficient monomial t^k contributes -4k to the q-degree.
        """
        degs = set()
        for g, poly in self.terms.items():
            i, q = self.cube.degrees(g)
            for exp, _ in poly.items():
                degs.add((i, q - 4 * exp))
        if len(degs) != 1:
            raise KhovalError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for g in sorted(self.terms, key=lambda g: (g.mask, g.labels)):
            bits.append(f"({self.terms[g]})*{g}")
        return " + ".join(bits)


def _accumulate(acc: dict, key, poly: TPoly, theory: Theory) -> None:
    poly = theory.reduce(poly)
    cur = acc.get(key)
    total = poly if cur is None else cur + poly
    if total.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = total


# -- module-level operation wrappers -------------------------------------------


def build_cube(
    d: LinkDiagram,
    th: Theory = Theory.KHOVANOV,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> CubeComplex:
    return CubeComplex(d, th, cap=cap, workers=workers)


def differential(c: CubeComplex, x: CochainElement) -> CochainElement:
    return c.differential(x)


def degrees(g: Generator, c: CubeComplex) -> tuple[int, int]:
    return c.degrees(g)


def check_d_squared(
    c: CubeComplex, sign_fn: Callable[[int, int], int] | None = None
) -> CheckReport:
    """Evaluate d o d on every basis generator; report the first violation."""
    for g in c.generators():
        dd = c.differential(c.differential_of(g, sign_fn), sign_fn)
        if not dd.is_zero():
            return CheckReport(False, f"d(d({g})) = {dd}")
    return CheckReport(True, "d o d = 0 on all basis generators")


def check_faces(c: CubeComplex) -> CheckReport:
    """Check every 2-face: unsigned composites commute, signed ones cancel."""
    for mask in range(1 << c.n):
        free = [j for j in range(c.n) if not (mask >> j) & 1]
        for a_idx in range(len(free)):
            for b_idx in range(a_idx + 1, len(free)):
                j, k = free[a_idx], free[b_idx]
                sign_jk = c.edge_sign(mask, j) * c.edge_sign(mask | (1 << j), k)
                sign_kj = c.edge_sign(mask, k) * c.edge_sign(mask | (1 << k), j)
                if sign_jk != -sign_kj:
                    return CheckReport(
                        False, f"edge signs fail to anticommute at {mask:b},{j},{k}"
                    )
                for g in c.generators_at(mask):
                    path1: dict[Generator, TPoly] = {}
                    for mid, p1 in c.apply_edge(g, j):
                        for tgt, p2 in c.apply_edge(mid, k):
                            _accumulate(path1, tgt, p1 * p2, c.theory)
                    path2: dict[Generator, TPoly] = {}
                    for mid, p1 in c.apply_edge(g, k):
                        for tgt, p2 in c.apply_edge(mid, j):
                            _accumulate(path2, tgt, p1 * p2, c.theory)
                    if path1 != path2:
                        return CheckReport(
                            False,
                            f"face at vertex {mask:b}, crossings {j},{k} does not "
                            f"commute on {g}",
                        )
    return CheckReport(True, "all 2-faces commute and anticommute after signs")
