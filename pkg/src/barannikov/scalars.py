"""Exact field arithmetic: prime fields F_p and the rationals Q.

Every quantity in this package is exact.  Prime-field elements are stored
as the least non-negative residue, rationals as reduced ``Fraction`` values,
so equal scalars are identical objects up to ``==`` and ``hash``.
"""
from __future__ import annotations

from fractions import Fraction


class FieldMismatchError(ValueError):
    """Raised when combining scalars from different fields."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class FieldSpec:
    """Either F_p for a prime p, or the rationals (p is None)."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not isinstance(p, int) or not (2 <= p < 2**31):
                raise ValueError(f"field characteristic out of range: {p!r}")
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("FieldSpec is immutable")

    @staticmethod
    def rationals() -> "FieldSpec":
        return FieldSpec(None)

    @staticmethod
    def prime(p: int) -> "FieldSpec":
        return FieldSpec(p)

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def scalar(self, x) -> "Scalar":
        """Coerce an int, Fraction, Scalar or string to a canonical scalar."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatchError("field mismatch")
            return x
        if isinstance(x, str):
            return self.parse(x)
        if self.p is None:
            return Scalar(self, Fraction(x))
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("division by zero")
            num = x.numerator % self.p
            den = pow(x.denominator % self.p, self.p - 2, self.p)
            return Scalar(self, (num * den) % self.p)
        return Scalar(self, int(x) % self.p)

    def parse(self, text: str) -> "Scalar":
        text = text.strip()
        try:
            if self.p is None:
                return Scalar(self, Fraction(text))
            if "/" in text:
                num, den = text.split("/", 1)
                return self.scalar(Fraction(int(num), int(den)))
            return Scalar(self, int(text) % self.p)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ZeroDivisionError):
                raise
            raise ValueError(f"cannot parse scalar {text!r} over {self}") from exc

    def zero(self) -> "Scalar":
        return Scalar(self, Fraction(0) if self.p is None else 0)

    def one(self) -> "Scalar":
        return Scalar(self, Fraction(1) if self.p is None else 1)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self.p == other.p

    def __hash__(self):
        return hash(("FieldSpec", self.p))

    def __str__(self):
        return "Q" if self.p is None else f"F{self.p}"

    def __repr__(self):
        return f"FieldSpec({self.p!r})"


class Scalar:
    """An immutable field element in canonical form."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value):
        # Caller guarantees canonical form; use FieldSpec.scalar to coerce.
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def _check(self, other: "Scalar") -> None:
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError("field mismatch")

    def __add__(self, other):
        self._check(other)
        p = self.field.p
        v = self.value + other.value
        return Scalar(self.field, v if p is None else v % p)

    def __sub__(self, other):
        self._check(other)
        p = self.field.p
        v = self.value - other.value
        return Scalar(self.field, v if p is None else v % p)

    def __mul__(self, other):
        self._check(other)
        p = self.field.p
        v = self.value * other.value
        return Scalar(self.field, v if p is None else v % p)

    def __neg__(self):
        p = self.field.p
        return Scalar(self.field, -self.value if p is None else (-self.value) % p)

    def inverse(self) -> "Scalar":
        if not self.value:
            raise ZeroDivisionError("division by zero")
        p = self.field.p
        if p is None:
            return Scalar(self.field, 1 / self.value)
        return Scalar(self.field, pow(self.value, p - 2, p))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def is_zero(self) -> bool:
        return not self.value

    def __bool__(self):
        return bool(self.value)

    def __eq__(self, other):
        return (
            isinstance(other, Scalar)
            and self.field == other.field
            and self.value == other.value
        )

    def __hash__(self):
        return hash((self.field, self.value))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"Scalar({self.field}, {self.value})"


def scalar_arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    """Named dispatch over the four ring operations."""
    if op == "neg":
        return -a
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def scalar_inverse(a: Scalar) -> Scalar:
    return a.inverse()
