"""Generic one-parameter events on a filtered complex.

Three event kinds: birth of a cancelling pair, death of a coupled adjacent
pair, and transposition of two value-adjacent generators.  A transposition
between same-degree generators is classified against the three crossing
cases (A: mixed types, B: both upper, C: both lower); the deciding condition
is evaluated twice, once by recomputing the coupling and once by an
independent elimination over the sublevel strictly below the crossing pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .complexes import Chain, FilteredComplex, Generator, validate
from .reduction import (
    BarannikovResult,
    GeneratorType,
    birth_level,
    death_level,
    reduce,
    _Echelon,
)
from .scalars import Scalar


class PathEventError(ValueError):
    """An event whose preconditions fail on the current complex."""


@dataclass(frozen=True)
class Birth:
    p_name: str
    q_name: str
    degree: int
    below: Fraction


@dataclass(frozen=True)
class Death:
    p_name: str
    q_name: str


@dataclass(frozen=True)
class Swap:
    a_name: str
    b_name: str


PathEvent = Union[Birth, Death, Swap]


@dataclass(frozen=True)
class BifurcationReport:
    event: Swap
    same_index: bool
    case: str  # "A" | "B" | "C" | "none" | "extremal"
    condition_held: bool | None
    coupling_before: Mapping[str, str | None]
    coupling_after: Mapping[str, str | None]
    types_before: Mapping[str, GeneratorType]
    types_after: Mapping[str, GeneratorType]

    @property
    def changed(self) -> bool:
        return (
            self.coupling_before != self.coupling_after
            or self.types_before != self.types_after
        )


@dataclass(frozen=True)
class PathStep:
    event: PathEvent
    complex: FilteredComplex
    reduction: BarannikovResult
    report: BifurcationReport | None


@dataclass(frozen=True)
class PathTrace:
    initial: FilteredComplex
    steps: tuple[PathStep, ...]

    def final(self) -> FilteredComplex:
        return self.steps[-1].complex if self.steps else self.initial


class PathError(RuntimeError):
    """Event application failed mid-path; carries the partial trace."""

    def __init__(self, index: int, reason: Exception, trace: PathTrace):
        self.index = index
        self.reason = reason
        self.trace = trace
        super().__init__(f"event {index} inapplicable: {reason}")


# -- event application ---------------------------------------------------------


def _fresh_birth_values(c: FilteredComplex, below: Fraction) -> tuple[Fraction, Fraction]:
    lower_candidates = [g.value for g in c.generators if g.value < below]
    lo = max(lower_candidates) if lower_candidates else below - 1
    step = (below - lo) / 3
    return lo + step, lo + 2 * step


def apply_event(c: FilteredComplex, e: PathEvent) -> FilteredComplex:
    if isinstance(e, Birth):
        return _apply_birth(c, e)
    if isinstance(e, Death):
        return _apply_death(c, e)
    if isinstance(e, Swap):
        return _apply_swap(c, e)
    raise TypeError(f"unknown event {e!r}")


def _apply_birth(c: FilteredComplex, e: Birth) -> FilteredComplex:
    for name in (e.p_name, e.q_name):
        if name in c:
            raise PathEventError(f"birth: name {name} already in use")
    if e.p_name == e.q_name:
        raise PathEventError("birth: the two names must differ")
    if e.degree < 0:
        raise PathEventError("birth: negative degree")
    if c.ambient_dim is not None and e.degree + 1 > c.ambient_dim:
        raise PathEventError("birth: pair degree exceeds ambient dimension")
    v_q, v_p = _fresh_birth_values(c, e.below)
    gens = list(c.generators)
    gens.append(Generator(e.q_name, e.degree, v_q))
    gens.append(Generator(e.p_name, e.degree + 1, v_p))
    boundary = dict(c.boundary)
    boundary[e.p_name] = Chain(e.degree, {e.q_name: c.field.one()})
    return FilteredComplex(c.field, gens, boundary, c.ambient_dim)


def _apply_death(c: FilteredComplex, e: Death) -> FilteredComplex:
    for name in (e.p_name, e.q_name):
        if name not in c:
            raise PathEventError(f"death: unknown generator {name}")
    p = c.generator(e.p_name)
    q = c.generator(e.q_name)
    if p.degree != q.degree + 1:
        raise PathEventError("death: generators are not in adjacent degrees")
    if p.value <= q.value:
        raise PathEventError("death: the upper generator must sit above the lower")
    if abs(c.order_index(e.p_name) - c.order_index(e.q_name)) != 1:
        raise PathEventError("death: generators are not value-adjacent")
    alpha = c.boundary_of(e.p_name).terms.get(e.q_name)
    if alpha is None or alpha.is_zero():
        raise PathEventError("death: no incidence between the pair")
    coupling = reduce(c).simple_boundary
    if coupling.get(e.p_name) != e.q_name:
        raise PathEventError("death: the generators are not coupled")

    dp = c.boundary_of(e.p_name).terms
    inv_alpha = alpha.inverse()
    boundary: dict[str, Chain] = {}
    for g in c.generators:
        if g.name in (e.p_name, e.q_name):
            continue
        terms = dict(c.boundary_of(g.name).terms)
        if g.degree == p.degree:
            beta = terms.get(e.q_name)
            if beta is not None and not beta.is_zero():
                from .complexes import add_scaled

                add_scaled(terms, dp, -(beta * inv_alpha))
        elif g.degree == p.degree + 1:
            terms.pop(e.p_name, None)
        if terms:
            boundary[g.name] = Chain(g.degree - 1, terms)
    gens = [g for g in c.generators if g.name not in (e.p_name, e.q_name)]
    out = FilteredComplex(c.field, gens, boundary, c.ambient_dim)
    problems = validate(out)
    if problems:  # cancellation of a coupled adjacent pair always stays valid
        raise AssertionError(f"death produced an invalid complex: {problems[0]}")
    return out


def _swap_pair(c: FilteredComplex, e: Swap) -> tuple[Generator, Generator]:
    """The two generators, lower value first, after adjacency checks."""
    for name in (e.a_name, e.b_name):
        if name not in c:
            raise PathEventError(f"swap: unknown generator {name}")
    a = c.generator(e.a_name)
    b = c.generator(e.b_name)
    if a.name == b.name:
        raise PathEventError("swap: the two names must differ")
    lo, hi = (a, b) if a.value < b.value else (b, a)
    if c.order_index(hi.name) - c.order_index(lo.name) != 1:
        raise PathEventError("swap: generators are not adjacent in the value order")
    if c.boundary_of(hi.name).terms.get(lo.name):
        raise PathEventError("swap: the pair is incident, values cannot cross")
    return lo, hi


def _apply_swap(c: FilteredComplex, e: Swap) -> FilteredComplex:
    lo, hi = _swap_pair(c, e)
    gens = []
    for g in c.generators:
        if g.name == lo.name:
            gens.append(Generator(g.name, g.degree, hi.value))
        elif g.name == hi.name:
            gens.append(Generator(g.name, g.degree, lo.value))
        else:
            gens.append(g)
    return FilteredComplex(c.field, gens, dict(c.boundary), c.ambient_dim)


# -- crossing classification ---------------------------------------------------


def _boundary_space_below(c: FilteredComplex, degree: int, below: Fraction) -> _Echelon:
    """Echelon of boundaries of degree-``degree`` generators under ``below``."""
    ech = _Echelon(c)
    for g in c.generators:
        if g.degree == degree and g.value < below:
            ech.insert(dict(c.boundary_of(g.name).terms))
    return ech


def _proportional_condition(c: FilteredComplex, z_upper: Chain, z_lower: Chain, below: Fraction) -> bool:
    """Case A: the two boundary classes are nonzero proportional in the
    homology of the sublevel strictly below the pair."""
    degree = z_upper.degree + 1
    ech = _boundary_space_below(c, degree, below)
    res_lower = ech.reduce_vector(dict(z_lower.terms))
    if not res_lower:
        return False
    res_upper = ech.reduce_vector(dict(z_upper.terms))
    if not res_upper:
        return False
    # proportional iff res_lower dies after adjoining res_upper
    ech.insert(res_upper)
    return not ech.reduce_vector(res_lower)


def classify_transposition(c: FilteredComplex, e: Swap) -> BifurcationReport:
    lo, hi = _swap_pair(c, e)
    before = reduce(c)
    swapped = _apply_swap(c, e)
    after = reduce(swapped)

    involved = {lo.name, hi.name}
    for r in (before, after):
        partner = r.partner()
        for name in (lo.name, hi.name):
            mate = partner[name]
            if mate is not None:
                involved.add(mate)
    partner_before = before.partner()
    partner_after = after.partner()
    coupling_before = {n: partner_before.get(n) for n in sorted(involved)}
    coupling_after = {n: partner_after.get(n) for n in sorted(involved)}
    types_before = {n: before.types[n] for n in (lo.name, hi.name)}
    types_after = {n: after.types[n] for n in (lo.name, hi.name)}

    same_index = lo.degree == hi.degree
    case = "none"
    condition: bool | None = None
    if same_index:
        t_lo = before.types[lo.name]
        t_hi = before.types[hi.name]
        if GeneratorType.HOMOLOGICAL in (t_lo, t_hi):
            case = "extremal"
        elif t_lo == GeneratorType.UPPER and t_hi == GeneratorType.UPPER:
            case = "B"
            z_lo = c.boundary_of(lo.name)
            z_hi = c.boundary_of(hi.name)
            condition = birth_level(c, z_lo, below=lo.value) == birth_level(
                c, z_hi, below=lo.value
            )
        elif t_lo == GeneratorType.LOWER and t_hi == GeneratorType.LOWER:
            case = "C"
            one = c.field.one()
            mu_lo = death_level(c, {lo.name: one}, lo.degree, modulo_below=lo.value)
            mu_hi = death_level(c, {hi.name: one}, hi.degree, modulo_below=lo.value)
            if mu_lo == math.inf or mu_hi == math.inf:
                raise AssertionError("lower-type generator with no death level")
            condition = mu_lo == mu_hi
        else:
            case = "A"
            if t_lo == GeneratorType.UPPER:
                condition = _proportional_condition(
                    c, c.boundary_of(lo.name), c.boundary_of(hi.name), lo.value
                )
            else:
                # upper above lower: the crossing never changes anything
                condition = False

    return BifurcationReport(
        event=e,
        same_index=same_index,
        case=case,
        condition_held=condition,
        coupling_before=coupling_before,
        coupling_after=coupling_after,
        types_before=types_before,
        types_after=types_after,
    )


# -- running paths --------------------------------------------------------------


def run_path(c: FilteredComplex, events: list[PathEvent]) -> PathTrace:
    steps: list[PathStep] = []
    current = c
    for i, event in enumerate(events):
        try:
            report = classify_transposition(current, event) if isinstance(event, Swap) else None
            nxt = apply_event(current, event)
        except PathEventError as exc:
            raise PathError(i, exc, PathTrace(c, tuple(steps))) from exc
        current = nxt
        steps.append(PathStep(event, current, reduce(current), report))
    return PathTrace(c, tuple(steps))


# -- path file format ------------------------------------------------------------


def parse_path(text: str | bytes) -> list[PathEvent]:
    """Parse lines of the form
    ``birth <p> <q> <k> below <value>`` | ``death <p> <q>`` | ``swap <a> <b>``.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    events: list[PathEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "birth":
                if len(parts) != 6 or parts[4] != "below":
                    raise ValueError("expected 'birth <p> <q> <k> below <value>'")
                events.append(Birth(parts[1], parts[2], int(parts[3]), Fraction(parts[5])))
            elif kind == "death":
                if len(parts) != 3:
                    raise ValueError("expected 'death <p> <q>'")
                events.append(Death(parts[1], parts[2]))
            elif kind == "swap":
                if len(parts) != 3:
                    raise ValueError("expected 'swap <a> <b>'")
                events.append(Swap(parts[1], parts[2]))
            else:
                raise ValueError(f"unknown event {kind!r}")
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return events
