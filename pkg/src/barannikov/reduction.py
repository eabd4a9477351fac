"""Reduction of a filtered complex to its unique simple form.

The sweep processes generators in increasing value order, eliminating each
boundary column against the already-simple columns.  A surviving column is
normalized to a single unit pivot, which couples the column's generator
(upper type) to the pivot generator (lower type).  All column operations are
accumulated into a triangular witness so the equivalence can be replayed.

Rank-based oracles (persistence pairing by inclusion-exclusion, homology by
plain elimination, birth/death levels of cycles) live here as well; they are
deliberately independent of the sweep so they can cross-check it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .complexes import (
    Chain,
    FilteredComplex,
    TriangularMap,
    add_scaled,
    add_term,
    validate,
)
from .scalars import Scalar


class InvalidComplexError(ValueError):
    """Raised when an operation needs a valid complex; carries the report."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class GeneratorType(str, Enum):
    UPPER = "upper"
    LOWER = "lower"
    HOMOLOGICAL = "homological"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BarannikovResult:
    complex: FilteredComplex
    simple_boundary: Mapping[str, str | None]
    types: Mapping[str, GeneratorType]
    witness: TriangularMap

    def couples(self) -> list[tuple[str, str]]:
        """(lower, upper) pairs, sorted by the lower generator's value."""
        pairs = [(q, p) for p, q in self.simple_boundary.items() if q is not None]
        order = self.complex.order_index
        return sorted(pairs, key=lambda qp: order(qp[0]))

    def partner(self) -> dict[str, str | None]:
        """Symmetric partner map over all generators."""
        out: dict[str, str | None] = {g.name: None for g in self.complex.generators}
        for p, q in self.simple_boundary.items():
            if q is not None:
                out[p] = q
                out[q] = p
        return out


def _require_valid(c: FilteredComplex) -> None:
    problems = validate(c)
    if problems:
        raise InvalidComplexError(problems)


def reduce(c: FilteredComplex) -> BarannikovResult:
    """Compute the simple form, the type of every generator and a witness."""
    _require_valid(c)
    field = c.field
    order = c.order_index
    names = [g.name for g in c.generators]
    degree_of = {g.name: g.degree for g in c.generators}

    cols: dict[str, dict[str, Scalar]] = {
        name: dict(c.boundary_of(name).terms) for name in names
    }
    tmap: dict[str, dict[str, Scalar]] = {name: {name: field.one()} for name in names}
    by_degree: dict[int, list[str]] = {}
    for name in names:
        by_degree.setdefault(degree_of[name], []).append(name)

    def add_column(target: str, source: str, coeff: Scalar) -> None:
        # basis change target := target + coeff * source, same degree
        add_scaled(tmap[target], tmap[source], coeff)
        add_scaled(cols[target], cols[source], coeff)
        for h in by_degree.get(degree_of[target] + 1, ()):
            col = cols[h]
            c_t = col.get(target)
            if c_t is not None:
                add_term(col, source, -(coeff * c_t))

    def scale_column(target: str, coeff: Scalar) -> None:
        tmap[target] = {n: coeff * v for n, v in tmap[target].items()}
        cols[target] = {n: coeff * v for n, v in cols[target].items()}
        inv = coeff.inverse()
        for h in by_degree.get(degree_of[target] + 1, ()):
            col = cols[h]
            c_t = col.get(target)
            if c_t is not None:
                col[target] = c_t * inv

    owner: dict[str, str] = {}
    for name in names:
        col = cols[name]
        while col:
            top = max(col, key=order)
            holder = owner.get(top)
            if holder is None:
                break
            add_column(name, holder, -col[top])
        if not col:
            continue
        pivot = max(col, key=order)
        scale_column(name, col[pivot].inverse())
        for tname in sorted((t for t in col if t != pivot), key=order):
            add_column(pivot, tname, col[tname])
        owner[pivot] = name

    simple: dict[str, str | None] = {}
    types: dict[str, GeneratorType] = {}
    owned = set(owner)
    for name in names:
        col = cols[name]
        if col:
            (pivot,) = col.keys()
            simple[name] = pivot
            types[name] = GeneratorType.UPPER
        else:
            simple[name] = None
            types[name] = GeneratorType.LOWER if name in owned else GeneratorType.HOMOLOGICAL

    witness_cols = {
        name: Chain(degree_of[name], dict(terms))
        for name, terms in tmap.items()
        if terms != {name: field.one()}
    }
    return BarannikovResult(
        complex=c,
        simple_boundary=simple,
        types=types,
        witness=TriangularMap(field, witness_cols),
    )


def render_result(r: BarannikovResult) -> str:
    """One line per generator: name degree value type [-> partner]."""
    lines = []
    for g in r.complex.generators:
        line = f"{g.name} {g.degree} {g.value} {r.types[g.name]}"
        target = r.simple_boundary[g.name]
        if target is not None:
            line += f" -> {target}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


# -- independent linear-algebra oracles ---------------------------------------


class _Echelon:
    """Column echelon keyed by highest-value pivot; exact arithmetic."""

    def __init__(self, c: FilteredComplex):
        self.order = c.order_index
        self.pivots: dict[str, dict[str, Scalar]] = {}

    def reduce_vector(self, vec: dict[str, Scalar]) -> dict[str, Scalar]:
        while vec:
            top = max(vec, key=self.order)
            col = self.pivots.get(top)
            if col is None:
                return vec
            add_scaled(vec, col, -vec[top])
        return vec

    def insert(self, vec: dict[str, Scalar]) -> str | None:
        """Reduce and absorb a vector; returns its pivot, or None if dependent."""
        vec = self.reduce_vector(dict(vec))
        if not vec:
            return None
        top = max(vec, key=self.order)
        inv = vec[top].inverse()
        self.pivots[top] = {n: inv * v for n, v in vec.items()}
        return top

    @property
    def rank(self) -> int:
        return len(self.pivots)


def homology_ranks(c: FilteredComplex) -> dict[int, int]:
    """Betti numbers by plain Gaussian elimination on the boundary matrices."""
    _require_valid(c)
    if not c.generators:
        return {}
    degrees = c.degrees()
    max_deg = max(degrees)
    counts = {k: len(c.generators_of_degree(k)) for k in range(max_deg + 1)}
    rank_d: dict[int, int] = {}
    for k in range(max_deg + 2):
        ech = _Echelon(c)
        for g in c.generators_of_degree(k):
            ech.insert(dict(c.boundary_of(g.name).terms))
        rank_d[k] = ech.rank
    return {
        k: counts.get(k, 0) - rank_d.get(k, 0) - rank_d.get(k + 1, 0)
        for k in range(max_deg + 1)
    }


def _check_cycle(c: FilteredComplex, z: Chain) -> None:
    for name in z.terms:
        if name not in c:
            raise ValueError(f"chain uses unknown generator {name}")
        if c.generator(name).degree != z.degree:
            raise ValueError(f"chain term {name} does not have degree {z.degree}")
    if not c.apply_boundary(z).is_zero():
        raise ValueError("chain is not a cycle")


def birth_level(c: FilteredComplex, z: Chain, below: Fraction | None = None) -> Fraction | None:
    """Lowest value v such that z is homologous to a cycle supported at or
    below v, where the homologies may use boundaries of generators of value
    strictly under ``below``.

    ``below`` defaults to the top value of z's support, i.e. the homology is
    taken inside the sublevel complex spanned by z's support.  Returns None
    for the zero cycle (and for cycles that bound inside the window).
    """
    _check_cycle(c, z)
    if z.is_zero():
        return None
    order = c.order_index
    top_name = max(z.terms, key=order)
    limit = c.value_of(top_name) if below is None else below
    ech = _Echelon(c)
    for g in c.generators:
        if g.degree == z.degree + 1 and g.value < limit:
            ech.insert(dict(c.boundary_of(g.name).terms))
    residue = ech.reduce_vector(dict(z.terms))
    if not residue:
        return None
    return c.value_of(max(residue, key=order))


def class_birth(c: FilteredComplex, z: Chain) -> Fraction | None:
    """Birth level of the class of z inside the sublevel complex of its
    support; None is the "minus infinity" answer for the zero cycle."""
    return birth_level(c, z, below=None)


def death_level(
    c: FilteredComplex,
    target: dict[str, Scalar],
    degree: int,
    modulo_below: Fraction | None = None,
) -> Fraction | float | None:
    """Lowest value v such that the target degree-``degree`` vector is a
    boundary of a chain supported at values <= v, working modulo generators
    of value strictly under ``modulo_below`` when given.

    Returns math.inf when no sublevel suffices and None for a zero target.
    """
    def project(terms: Mapping[str, Scalar]) -> dict[str, Scalar]:
        if modulo_below is None:
            return dict(terms)
        return {n: s for n, s in terms.items() if c.value_of(n) >= modulo_below}

    goal = project(target)
    if not goal:
        return None
    ech = _Echelon(c)
    residue = dict(goal)
    for g in c.generators:
        if g.degree != degree + 1:
            continue
        ech.insert(project(c.boundary_of(g.name).terms))
        residue = ech.reduce_vector(residue)
        if not residue:
            return g.value
    return math.inf


def class_death(c: FilteredComplex, z: Chain) -> Fraction | float | None:
    """Lowest value v such that z bounds a chain supported at values <= v;
    math.inf when the cycle survives forever, None for the zero cycle."""
    _check_cycle(c, z)
    if z.is_zero():
        return None
    return death_level(c, dict(z.terms), z.degree)


def persistence_rank_oracle(c: FilteredComplex, q, p) -> bool:
    """Decide whether (q, p) is a couple purely from ranks of value-window
    submatrices of the boundary (inclusion-exclusion multiplicity)."""
    _require_valid(c)
    qg = c.generator(q) if isinstance(q, str) else q
    pg = c.generator(p) if isinstance(p, str) else p
    if pg.degree != qg.degree + 1:
        raise ValueError(
            f"degree mismatch: {pg.name} has degree {pg.degree}, {qg.name} has degree {qg.degree}"
        )
    if pg.value <= qg.value:
        return False

    def window_rank(rows_from: Fraction, cols_to: Fraction, strict_rows: bool, strict_cols: bool) -> int:
        ech = _Echelon(c)
        for g in c.generators:
            if g.degree != pg.degree:
                continue
            if g.value > cols_to or (strict_cols and g.value == cols_to):
                continue
            vec = {
                n: s
                for n, s in c.boundary_of(g.name).terms.items()
                if c.value_of(n) > rows_from or (not strict_rows and c.value_of(n) == rows_from)
            }
            ech.insert(vec)
        return ech.rank

    r1 = window_rank(qg.value, pg.value, strict_rows=False, strict_cols=False)
    r2 = window_rank(qg.value, pg.value, strict_rows=True, strict_cols=False)
    r3 = window_rank(qg.value, pg.value, strict_rows=False, strict_cols=True)
    r4 = window_rank(qg.value, pg.value, strict_rows=True, strict_cols=True)
    return r1 - r2 - r3 + r4 == 1


def bounds_exactly_from_above(c: FilteredComplex, q) -> bool:
    """Whether some combination of strictly higher generators has boundary
    equal to q modulo generators strictly below q.

    This is the elimination form of the lower-type criterion: it holds for
    exactly the lower-type generators.
    """
    _require_valid(c)
    qg = c.generator(q) if isinstance(q, str) else q
    level = death_level(c, {qg.name: c.field.one()}, qg.degree, modulo_below=qg.value)
    return level is not None and level != math.inf
