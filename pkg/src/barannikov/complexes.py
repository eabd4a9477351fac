"""Filtered chain complexes over an exact field.

A complex is a finite set of graded generators with pairwise distinct
critical values and a boundary operator that strictly decreases the value.
The text format, validation and triangular changes of basis live here.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .scalars import FieldSpec, Scalar


class ComplexParseError(ValueError):
    """Parse or structural error in a complex file.

    ``code`` is one of: syntax, duplicate-name, duplicate-value,
    unknown-generator, degree-mismatch, dsquared, filtration.
    """

    def __init__(self, code: str, message: str, line: int | None = None):
        self.code = code
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{code}: {message}{where}")


class TriangularMapError(ValueError):
    """A change of basis that is not triangular or not invertible."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    value: Fraction


@dataclass(frozen=True)
class Chain:
    """A formal combination of same-degree generators; no zero terms stored."""

    degree: int
    terms: Mapping[str, Scalar]

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, name: str, field: FieldSpec) -> Scalar:
        return self.terms.get(name, field.zero())

    def __iter__(self):
        return iter(self.terms.items())


def add_term(acc: dict[str, Scalar], name: str, coeff: Scalar) -> None:
    """Accumulate coeff * name into acc, dropping cancellations."""
    cur = acc.get(name)
    new = coeff if cur is None else cur + coeff
    if new.is_zero():
        acc.pop(name, None)
    else:
        acc[name] = new


def add_scaled(acc: dict[str, Scalar], terms: Mapping[str, Scalar], coeff: Scalar) -> None:
    if coeff.is_zero():
        return
    for name, c in terms.items():
        add_term(acc, name, coeff * c)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    generators: tuple[str, ...] = ()

    def __str__(self):
        return f"{self.code}: {self.message}"


class FilteredComplex:
    """Generators sorted by value plus a boundary map.

    Construction is lenient (it only requires representable data) so that
    ``validate`` can report broken invariants as data.
    """

    def __init__(
        self,
        field: FieldSpec,
        generators: Iterable[Generator],
        boundary: Mapping[str, Chain] | None = None,
        ambient_dim: int | None = None,
    ):
        self.field = field
        self.ambient_dim = ambient_dim
        gens = sorted(generators, key=lambda g: (g.value, g.name))
        self.generators: tuple[Generator, ...] = tuple(gens)
        self.boundary: dict[str, Chain] = {}
        if boundary:
            for name, chain in boundary.items():
                if chain.terms:
                    self.boundary[name] = chain
        self._by_name = {g.name: g for g in self.generators}
        self._order = {g.name: i for i, g in enumerate(self.generators)}

    # -- accessors ---------------------------------------------------------

    def __len__(self):
        return len(self.generators)

    def __contains__(self, name: str):
        return name in self._by_name

    def generator(self, name: str) -> Generator:
        return self._by_name[name]

    def value_of(self, name: str) -> Fraction:
        return self._by_name[name].value

    def order_index(self, name: str) -> int:
        """Rank of a generator in the global value order (0-based)."""
        return self._order[name]

    def boundary_of(self, name: str) -> Chain:
        chain = self.boundary.get(name)
        if chain is not None:
            return chain
        return Chain(self._by_name[name].degree - 1, {})

    def degrees(self) -> list[int]:
        return sorted({g.degree for g in self.generators})

    def generators_of_degree(self, k: int) -> list[Generator]:
        return [g for g in self.generators if g.degree == k]

    def apply_boundary(self, chain: Chain) -> Chain:
        """Linear extension of the boundary operator to chains."""
        acc: dict[str, Scalar] = {}
        for name, coeff in chain.terms.items():
            add_scaled(acc, self.boundary_of(name).terms, coeff)
        return Chain(chain.degree - 1, acc)

    def chain(self, degree: int, terms: Mapping[str, Scalar]) -> Chain:
        return Chain(degree, {n: c for n, c in terms.items() if not c.is_zero()})

    def with_boundary(self, boundary: Mapping[str, Chain]) -> "FilteredComplex":
        return FilteredComplex(self.field, self.generators, boundary, self.ambient_dim)

    def __eq__(self, other):
        return (
            isinstance(other, FilteredComplex)
            and self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.generators == other.generators
            and self.boundary == other.boundary
        )

    def __repr__(self):
        return f"<FilteredComplex {self.field} with {len(self.generators)} generators>"


# -- validation --------------------------------------------------------------


def validate(c: FilteredComplex) -> list[Violation]:
    """All invariant violations; the empty list means the complex is valid."""
    out: list[Violation] = []
    seen_names: set[str] = set()
    seen_values: dict[Fraction, str] = {}
    for g in c.generators:
        if g.name in seen_names:
            out.append(Violation("duplicate-name", f"generator {g.name} repeated", (g.name,)))
        seen_names.add(g.name)
        if g.value in seen_values:
            out.append(
                Violation(
                    "duplicate-value",
                    f"generators {seen_values[g.value]} and {g.name} share value {g.value}",
                    (seen_values[g.value], g.name),
                )
            )
        else:
            seen_values[g.value] = g.name
        if g.degree < 0:
            out.append(Violation("degree-mismatch", f"{g.name} has negative degree", (g.name,)))
        if c.ambient_dim is not None and g.degree > c.ambient_dim:
            out.append(
                Violation(
                    "degree-mismatch",
                    f"{g.name} has degree {g.degree} above ambient dimension {c.ambient_dim}",
                    (g.name,),
                )
            )

    for name, chain in sorted(c.boundary.items()):
        if name not in c._by_name:
            out.append(Violation("unknown-generator", f"boundary of unknown generator {name}", (name,)))
            continue
        g = c.generator(name)
        if g.degree == 0 and chain.terms:
            out.append(
                Violation("degree-mismatch", f"degree-0 generator {name} has nonzero boundary", (name,))
            )
            continue
        for tname, coeff in chain.terms.items():
            if coeff.is_zero():
                out.append(Violation("degree-mismatch", f"zero coefficient stored in boundary of {name}", (name, tname)))
            if tname not in c._by_name:
                out.append(
                    Violation("unknown-generator", f"boundary of {name} uses unknown generator {tname}", (name, tname))
                )
                continue
            t = c.generator(tname)
            if t.degree != g.degree - 1:
                out.append(
                    Violation(
                        "degree-mismatch",
                        f"boundary of {name} (degree {g.degree}) has degree-{t.degree} term {tname}",
                        (name, tname),
                    )
                )
            if t.value >= g.value:
                out.append(
                    Violation(
                        "filtration",
                        f"boundary term {tname} of {name} does not lie strictly below",
                        (name, tname),
                    )
                )

    # d-squared only makes sense once the structural checks pass
    if not out:
        for g in c.generators:
            dd = c.apply_boundary(c.boundary_of(g.name))
            if not dd.is_zero():
                hit = ", ".join(sorted(dd.terms))
                out.append(Violation("dsquared", f"boundary of boundary of {g.name} hits {hit}", (g.name,)))
    return out


# -- text format --------------------------------------------------------------


def parse_complex(text: str | bytes) -> FilteredComplex:
    """Parse the line-oriented complex format and validate the result."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    field: FieldSpec | None = None
    ambient_dim: int | None = None
    generators: list[Generator] = []
    names: set[str] = set()
    values: set[Fraction] = set()
    boundary_lines: list[tuple[int, str, str]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kw = parts[0]
        if kw == "field":
            if len(parts) != 2:
                raise ComplexParseError("syntax", "expected 'field <F?|Q>'", lineno)
            spec = parts[1]
            if spec == "Q":
                field = FieldSpec.rationals()
            elif spec.startswith("F") and spec[1:].isdigit():
                try:
                    field = FieldSpec.prime(int(spec[1:]))
                except ValueError as exc:
                    raise ComplexParseError("syntax", str(exc), lineno) from exc
            else:
                raise ComplexParseError("syntax", f"unknown field {spec!r}", lineno)
        elif kw == "dim":
            if len(parts) != 2 or not parts[1].lstrip("-").isdigit():
                raise ComplexParseError("syntax", "expected 'dim <n>'", lineno)
            ambient_dim = int(parts[1])
        elif kw == "generator":
            if len(parts) != 4:
                raise ComplexParseError("syntax", "expected 'generator <name> <degree> <value>'", lineno)
            name = parts[1]
            try:
                degree = int(parts[2])
                value = Fraction(parts[3])
            except (ValueError, ZeroDivisionError) as exc:
                raise ComplexParseError("syntax", f"bad generator line: {exc}", lineno) from exc
            if name in names:
                raise ComplexParseError("duplicate-name", f"generator {name} already declared", lineno)
            if value in values:
                raise ComplexParseError("duplicate-value", f"critical value {value} already used", lineno)
            names.add(name)
            values.add(value)
            generators.append(Generator(name, degree, value))
        elif kw == "boundary":
            rest = line[len("boundary"):].strip()
            if ":" not in rest:
                raise ComplexParseError("syntax", "expected 'boundary <name> : <terms>'", lineno)
            name, terms = rest.split(":", 1)
            boundary_lines.append((lineno, name.strip(), terms.strip()))
        else:
            raise ComplexParseError("syntax", f"unknown directive {kw!r}", lineno)

    if field is None:
        if generators or boundary_lines:
            raise ComplexParseError("syntax", "missing 'field' declaration")
        field = FieldSpec.prime(2)

    by_name = {g.name: g for g in generators}
    boundary: dict[str, dict[str, Scalar]] = {}
    for lineno, name, terms in boundary_lines:
        if name not in by_name:
            raise ComplexParseError("unknown-generator", f"boundary of unknown generator {name}", lineno)
        acc = boundary.setdefault(name, {})
        if not terms:
            continue
        for item in terms.split(" + "):
            item = item.strip()
            if "*" not in item:
                raise ComplexParseError("syntax", f"expected '<coeff>*<name>', got {item!r}", lineno)
            coeff_text, tname = item.rsplit("*", 1)
            tname = tname.strip()
            if tname not in by_name:
                raise ComplexParseError(
                    "unknown-generator", f"boundary of {name} uses unknown generator {tname}", lineno
                )
            if by_name[tname].degree != by_name[name].degree - 1:
                raise ComplexParseError(
                    "degree-mismatch",
                    f"boundary term {tname} has degree {by_name[tname].degree}, "
                    f"expected {by_name[name].degree - 1}",
                    lineno,
                )
            try:
                coeff = field.parse(coeff_text.strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ComplexParseError("syntax", f"bad coefficient {coeff_text!r}: {exc}", lineno) from exc
            add_term(acc, tname, coeff)

    chains = {
        name: Chain(by_name[name].degree - 1, terms)
        for name, terms in boundary.items()
        if terms
    }
    c = FilteredComplex(field, generators, chains, ambient_dim)
    problems = validate(c)
    if problems:
        first = problems[0]
        raise ComplexParseError(first.code, first.message)
    return c


def format_scalar(s: Scalar) -> str:
    return str(s.value)


def print_complex(c: FilteredComplex) -> str:
    """Canonical text rendering; parse_complex round-trips it."""
    lines = [f"field {c.field}"]
    if c.ambient_dim is not None:
        lines.append(f"dim {c.ambient_dim}")
    for g in c.generators:
        lines.append(f"generator {g.name} {g.degree} {g.value}")
    for g in c.generators:
        chain = c.boundary.get(g.name)
        if not chain:
            continue
        terms = sorted(chain.terms.items(), key=lambda kv: c.order_index(kv[0]))
        rendered = " + ".join(f"{format_scalar(coeff)}*{name}" for name, coeff in terms)
        lines.append(f"boundary {g.name} : {rendered}")
    return "\n".join(lines) + "\n"


# -- triangular changes of basis ----------------------------------------------


class TriangularMap:
    """A per-degree change of basis sending each generator to a nonzero
    multiple of itself plus strictly lower-value generators of the same degree.

    Generators absent from ``columns`` map to themselves.
    """

    def __init__(self, field: FieldSpec, columns: Mapping[str, Chain] | None = None):
        self.field = field
        self.columns: dict[str, Chain] = dict(columns or {})

    @staticmethod
    def identity(field: FieldSpec) -> "TriangularMap":
        return TriangularMap(field, {})

    def check(self, c: FilteredComplex) -> None:
        for name, chain in self.columns.items():
            if name not in c:
                raise TriangularMapError(f"map defined on unknown generator {name}")
            g = c.generator(name)
            diag = chain.terms.get(name)
            if diag is None or diag.is_zero():
                raise TriangularMapError(f"singular: zero diagonal at {name}")
            for tname in chain.terms:
                if tname == name:
                    continue
                if tname not in c:
                    raise TriangularMapError(f"image of {name} uses unknown generator {tname}")
                t = c.generator(tname)
                if t.degree != g.degree:
                    raise TriangularMapError(f"image of {name} mixes degrees")
                if t.value >= g.value:
                    raise TriangularMapError(
                        f"not triangular: image of {name} contains {tname} at or above it"
                    )

    def image_of(self, c: FilteredComplex, name: str) -> Chain:
        chain = self.columns.get(name)
        if chain is not None:
            return chain
        return Chain(c.generator(name).degree, {name: self.field.one()})

    def apply(self, c: FilteredComplex, chain: Chain) -> Chain:
        acc: dict[str, Scalar] = {}
        for name, coeff in chain.terms.items():
            add_scaled(acc, self.image_of(c, name).terms, coeff)
        return Chain(chain.degree, acc)

    def inverse(self, c: FilteredComplex) -> "TriangularMap":
        """Invert by forward substitution in increasing value order."""
        self.check(c)
        inv_cols: dict[str, Chain] = {}

        def inverse_image(name: str) -> Chain:
            cached = inv_cols.get(name)
            if cached is not None:
                return cached
            g = c.generator(name)
            chain = self.columns.get(name)
            if chain is None:
                result = Chain(g.degree, {name: self.field.one()})
            else:
                diag = chain.terms[name]
                inv_diag = diag.inverse()
                acc: dict[str, Scalar] = {name: inv_diag}
                for tname, coeff in chain.terms.items():
                    if tname == name:
                        continue
                    # lower-value generators are resolved first
                    add_scaled(acc, inverse_image(tname).terms, -(inv_diag * coeff))
                result = Chain(g.degree, acc)
            inv_cols[name] = result
            return result

        for g in c.generators:
            inverse_image(g.name)
        return TriangularMap(self.field, {n: ch for n, ch in inv_cols.items() if ch.terms != {n: self.field.one()}})


def conjugate(c: FilteredComplex, t: TriangularMap) -> FilteredComplex:
    """The complex with boundary T^-1 after the boundary after T."""
    t.check(c)
    inv = t.inverse(c)
    new_boundary: dict[str, Chain] = {}
    for g in c.generators:
        image = t.image_of(c, g.name)
        bd = c.apply_boundary(image)
        new_chain = inv.apply(c, bd)
        if new_chain.terms:
            new_boundary[g.name] = new_chain
    return c.with_boundary(new_boundary)
