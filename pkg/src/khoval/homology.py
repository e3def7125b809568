"""Integral cohomology via Smith normal form, plus the Jones-polynomial oracle.

Homology is computed blockwise: for the undeformed theory each (i, q) block is
a finitely generated abelian group ker/im presented by integer matrices; at
t = 1 the q-grading collapses and blocks are keyed by i alone.  Smith normal
form over arbitrary-precision integers gives ranks and invariant factors;
pivots are chosen by minimal absolute value to limit coefficient growth.

`kauffman_jones` is an independent computation path for the graded Euler
characteristic: a Kauffman bracket state sum in the variable A with writhe
correction (-A^3)^(-w), then the substitution A^2 = -1/q.  It shares nothing
with the cohomology path except the parsed diagram.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .algebra import Theory
from .cube import CubeComplex, Generator
from .diagram import LinkDiagram
from .errors import CapExceededError, KhovalError, TheoryError

__all__ = [
    "LaurentPoly",
    "IntegerMatrix",
    "HomologyGroup",
    "smith_normal_form",
    "homology",
    "graded_euler",
    "kauffman_jones",
]


class LaurentPoly:
    """Sparse Laurent polynomial in q with integer coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, int] | int = 0):
        if isinstance(terms, int):
            terms = {0: terms} if terms else {}
        self._terms = {int(e): int(c) for e, c in terms.items() if c}

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def coefficient(self, exp: int) -> int:
        return self._terms.get(exp, 0)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return LaurentPoly(terms)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly | int") -> "LaurentPoly":
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self._terms.items()})
        terms: dict[int, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms[e1 + e2] = terms.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, coeff in sorted(self._terms.items()):
            if exp == 0:
                body = str(abs(coeff))
            else:
                mag = "" if abs(coeff) == 1 else f"{abs(coeff)}*"
                body = f"{mag}q" if exp == 1 else f"{mag}q^{exp}"
            if not parts:
                parts.append(f"-{body}" if coeff < 0 else body)
            else:
                parts.append(f"- {body}" if coeff < 0 else f"+ {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self._terms!r})"


class IntegerMatrix:
    """A sparse integer matrix (no stored zeros)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], int] = ()):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], int] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (r, c), v in items:
            if not (0 <= r < rows and 0 <= c < cols):
                raise KhovalError(f"entry ({r},{c}) out of range")
            if v:
                self.entries[(r, c)] = int(v)

    @classmethod
    def from_dense(cls, dense: list[list[int]]) -> "IntegerMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(
            rows, cols,
            {(r, c): v for r, row in enumerate(dense) for c, v in enumerate(row) if v},
        )

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out


@dataclass(frozen=True)
class HomologyGroup:
    """Z^free_rank plus cyclic torsion in invariant-factor order."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


# -- Smith normal form ----------------------------------------------------------


def _identity(k: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(k)] for i in range(k)]


def _sparse_unit_eliminate(dense: list[list[int]]) -> tuple[int, list[list[int]]]:
    """Pivot away +-1 entries by unimodular operations, sparsely.

    Returns (number of unit invariant factors, dense residual matrix).  Each
    unit pivot contributes an invariant factor 1 and strictly shrinks the
    matrix, so only the (typically tiny) non-unit core reaches the dense
    Smith routine.  Pivots are chosen by Markowitz cost to limit fill-in.
    """
    rows: dict[int, dict[int, int]] = {}
    col_rows: dict[int, set[int]] = {}
    for r, row in enumerate(dense):
        entries = {c: v for c, v in enumerate(row) if v}
        if entries:
            rows[r] = entries
            for c in entries:
                col_rows.setdefault(c, set()).add(r)
    unit_count = 0
    while True:
        best = None
        best_cost = None
        for r, row in rows.items():
            r_nnz = len(row)
            for c, v in row.items():
                if v in (1, -1):
                    cost = (r_nnz - 1) * (len(col_rows[c]) - 1)
                    if best_cost is None or cost < best_cost:
                        best, best_cost = (r, c, v), cost
                        if cost == 0:
                            break
            if best_cost == 0:
                break
        if best is None:
            break
        pr, pc, pv = best
        pivot_row = rows.pop(pr)
        for c in pivot_row:
            col_rows[c].discard(pr)
        others = [r for r in col_rows.get(pc, ()) if r in rows]
        for r in others:
            factor = rows[r].pop(pc) * pv  # pv is its own inverse
            col_rows[pc].discard(r)
            if not factor:
                continue
            target = rows[r]
            for c, v in pivot_row.items():
                if c == pc:
                    continue
                new = target.get(c, 0) - factor * v
                if new:
                    if c not in target:
                        col_rows.setdefault(c, set()).add(r)
                    target[c] = new
                else:
                    target.pop(c, None)
                    col_rows[c].discard(r)
            if not target:
                del rows[r]
        col_rows.pop(pc, None)
        unit_count += 1
    live_rows = sorted(rows)
    live_cols = sorted({c for row in rows.values() for c in row})
    col_index = {c: j for j, c in enumerate(live_cols)}
    residual = [[0] * len(live_cols) for _ in live_rows]
    for i, r in enumerate(live_rows):
        for c, v in rows[r].items():
            residual[i][col_index[c]] = v
    return unit_count, residual


def _snf_dense(dense: list[list[int]], want_transforms: bool = False):
    """Diagonalize by unimodular row/column operations.

    Returns (diagonal factors d1 | d2 | ..., U, V) with  U * A * V  diagonal;
    U, V are None unless requested.
    """
    A = [row[:] for row in dense]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m) if want_transforms else None
    V = _identity(n) if want_transforms else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        Ai, Aj = A[i], A[j]
        for k in range(n):
            Ai[k] += q * Aj[k]
        if U is not None:
            Ui, Uj = U[i], U[j]
            for k in range(m):
                Ui[k] += q * Uj[k]

    def add_col(i, j, q):
        for row in A:
            row[i] += q * row[j]
        if V is not None:
            for row in V:
                row[i] += q * row[j]

    t = 0
    while t < min(m, n):
        # minimal-absolute-value pivot in the trailing submatrix
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t; remainders force a re-pivot
        dirty = False
        for i in range(t + 1, m):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                if q:
                    add_row(i, t, -q)
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, n):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                if q:
                    add_col(j, t, -q)
                if A[t][j]:
                    dirty = True
        if dirty:
            continue
        # divisibility: the pivot must divide every remaining entry
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if A[i][j] % A[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if A[t][t] < 0:
            add_row(t, t, -2)  # negate row t
        t += 1

    factors = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    return factors, U, V


def smith_normal_form(
    m: "IntegerMatrix | list[list[int]]",
) -> tuple[tuple[int, ...], int]:
    """Invariant factors d1 | d2 | ... and the rank, in exact arithmetic.

    Unit entries are pivoted away sparsely first; the dense minimal-pivot
    routine diagonalizes the remaining core.
    """
    dense = m.to_dense() if isinstance(m, IntegerMatrix) else m
    units, residual = _sparse_unit_eliminate(dense)
    factors, _, _ = _snf_dense(residual)
    all_factors = (1,) * units + tuple(factors)
    return all_factors, len(all_factors)


def kernel_basis(dense: list[list[int]]) -> list[list[int]]:
    """An integral basis of ker(A), as column vectors."""
    m = len(dense)
    n = len(dense[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    factors, _, V = _snf_dense(dense, want_transforms=True)
    rank = len(factors)
    return [[V[i][j] for i in range(n)] for j in range(rank, n)]


def in_image(dense: list[list[int]], vector: list[int]) -> bool:
    """Whether an integer vector lies in the column span of A over Z."""
    m = len(dense)
    if m == 0:
        return all(v == 0 for v in vector)
    factors, U, _ = _snf_dense(dense, want_transforms=True)
    rank = len(factors)
    w = [sum(U[i][k] * vector[k] for k in range(m)) for i in range(m)]
    for i in range(m):
        if i < rank:
            if w[i] % factors[i]:
                return False
        elif w[i]:
            return False
    return True


# -- homology --------------------------------------------------------------------


def _int_coefficient(poly) -> int:
    terms = poly.terms
    if any(e != 0 for e in terms):
        raise KhovalError("non-constant coefficient where an integer was expected")
    return terms.get(0, 0)


def block_basis(c: CubeComplex) -> dict:
    """Basis generators per block: keyed (i, q) graded, or i for Lee."""
    graded = c.theory is Theory.KHOVANOV
    blocks: dict = {}
    for g in c.generators():
        i, q = c.degrees(g)
        key = (i, q) if graded else i
        blocks.setdefault(key, []).append(g)
    for basis in blocks.values():
        basis.sort()
    return blocks


def block_matrix(
    c: CubeComplex, source: list[Generator], target: list[Generator]
) -> list[list[int]]:
    index = {g: r for r, g in enumerate(target)}
    dense = [[0] * len(source) for _ in range(len(target))]
    for col, g in enumerate(source):
        for tgt, poly in c.differential_of(g).terms.items():
            r = index.get(tgt)
            if r is not None:
                dense[r][col] = _int_coefficient(poly)
    return dense


def homology(c: CubeComplex) -> dict:
    """Blockwise integral cohomology: {(i, q): group} or {i: group} for Lee."""
    if c.theory is Theory.BAR_NATAN:
        raise TheoryError(
            "homology over Z[t] is not supported; use theory khovanov or lee"
        )
    graded = c.theory is Theory.KHOVANOV
    blocks = block_basis(c)

    def succ(key):
        return (key[0] + 1, key[1]) if graded else key + 1

    def pred(key):
        return (key[0] - 1, key[1]) if graded else key - 1

    ranks: dict = {}
    torsions: dict = {}
    for key, basis in blocks.items():
        nxt = blocks.get(succ(key), [])
        dense = block_matrix(c, basis, nxt)
        factors, rank = smith_normal_form(dense) if nxt else ((), 0)
        ranks[key] = rank
        torsions[succ(key)] = tuple(f for f in factors if f > 1)

    out: dict = {}
    for key, basis in blocks.items():
        free = len(basis) - ranks.get(key, 0) - ranks.get(pred(key), 0)
        tors = torsions.get(key, ())
        group = HomologyGroup(free, tors)
        if not group.is_zero():
            out[key] = group
    return out


def graded_euler(c: CubeComplex) -> LaurentPoly:
    """Alternating sum of graded cochain ranks (no homology computation)."""
    if c.theory is not Theory.KHOVANOV:
        raise TheoryError("graded Euler characteristic needs theory khovanov")
    terms: dict[int, int] = {}
    for g in c.generators():
        i, q = c.degrees(g)
        terms[q] = terms.get(q, 0) + (1 if i % 2 == 0 else -1)
    return LaurentPoly(terms)


# -- the independent Jones oracle -------------------------------------------------


def kauffman_jones(d: LinkDiagram, cap: int = 12) -> LaurentPoly:
    """Unnormalized Jones polynomial by Kauffman bracket state sum.

    Normalized so the unknot evaluates to q + 1/q.  Uses its own smoothing
    joins and union-find, the bracket variable A, the writhe correction
    (-A^3)^(-writhe), and finally the substitution A^2 = -1/q.
    """
    if d.n > cap:
        raise CapExceededError(f"diagram has {d.n} crossings, oracle cap is {cap}")
    n = d.n
    writhe = d.n_plus - d.n_minus
    crossings = [c.arcs for c in d.crossings]
    arcs = sorted(d.arc_ids())
    index = {a: i for i, a in enumerate(arcs)}

    delta = {2: -1, -2: -1}  # -A^2 - A^-2
    delta_pows: list[dict[int, int]] = [{0: 1}]

    def delta_pow(k: int) -> dict[int, int]:
        while len(delta_pows) <= k:
            prev = delta_pows[-1]
            nxt: dict[int, int] = {}
            for e1, c1 in prev.items():
                for e2, c2 in delta.items():
                    nxt[e1 + e2] = nxt.get(e1 + e2, 0) + c1 * c2
            delta_pows.append(nxt)
        return delta_pows[k]

    bracket: dict[int, int] = {}
    for state in range(1 << n):
        parent = list(range(len(arcs)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(x: int, y: int) -> None:
            rx, ry = find(index[x]), find(index[y])
            if rx != ry:
                parent[rx] = ry

        for j, (a0, a1, a2, a3) in enumerate(crossings):
            if (state >> j) & 1:  # B-smoothing
                union(a0, a1)
                union(a2, a3)
            else:  # A-smoothing
                union(a0, a3)
                union(a1, a2)
        for lp in d.loops:
            for i in range(len(lp) - 1):
                union(lp[i], lp[i + 1])
        components = {find(i) for i in range(len(arcs))}
        k = len(components)
        sigma = n - 2 * ((state).bit_count())
        for e, coeff in delta_pow(k).items():
            exp = sigma + e
            bracket[exp] = bracket.get(exp, 0) + coeff

    sign = -1 if writhe % 2 else 1
    result: dict[int, int] = {}
    for exp, coeff in bracket.items():
        e = exp - 3 * writhe
        if e % 2:
            raise KhovalError("odd A-exponent in writhe-corrected bracket")
        half = e // 2
        q_coeff = sign * coeff * (1 if half % 2 == 0 else -1)
        q_exp = -half
        result[q_exp] = result.get(q_exp, 0) + q_coeff
    return LaurentPoly(result)
