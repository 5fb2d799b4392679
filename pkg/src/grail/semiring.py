"""Resource semirings and their grades.

Four instances ship: the one-point semiring {inf}, the naturals and the
naturals with infinity (both ordered by equality), and the non-negative
rationals with the numeric order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import GradeError, MixedSemiringError, ParseError, UnsupportedJoin


class _Inf:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_Inf, ())


INF = _Inf()

KINDS = ("trivial", "nat", "nat-inf", "nonneg-real")
_ALIASES = {
    "trivial": "trivial", "trivial-infinity": "trivial",
    "nat": "nat", "nat-discrete": "nat",
    "nat-inf": "nat-inf", "nat-inf-discrete": "nat-inf",
    "nonneg-real": "nonneg-real",
}
_LITERAL = re.compile(r"^(\d+)(?:\.(\d+))?(?:/(\d+))?$")


@dataclass(frozen=True)
class Semiring:
    kind: str
    joins: bool | None = None

    def __post_init__(self):
        if self.kind not in _ALIASES:
            raise GradeError(f"unknown semiring kind {self.kind!r}")
        object.__setattr__(self, "kind", _ALIASES[self.kind])
        if self.joins is None:
            object.__setattr__(self, "joins", self.kind == "nonneg-real")
        if self.joins and self.kind != "nonneg-real":
            raise GradeError(f"{self.kind} has no binary joins")

    def __str__(self):
        return self.kind

    # carrier

    def contains(self, value) -> bool:
        if self.kind == "trivial":
            return value is INF
        if self.kind == "nat":
            return isinstance(value, int) and not isinstance(value, bool) and value >= 0
        if self.kind == "nat-inf":
            return value is INF or (isinstance(value, int) and not isinstance(value, bool) and value >= 0)
        return isinstance(value, Fraction) and value >= 0

    def grade(self, value) -> "Grade":
        """Coerce an int, Fraction, float-free literal or INF into a grade."""
        if isinstance(value, Grade):
            self._same(value)
            return value
        if self.kind == "trivial":
            return Grade(INF, self)
        if self.kind == "nonneg-real":
            if value is INF:
                raise GradeError("inf is not a grade of nonneg-real")
            if isinstance(value, float):
                raise GradeError("grades are exact; pass a Fraction or an int")
            value = Fraction(value)
        elif isinstance(value, Fraction):
            if value.denominator != 1:
                raise GradeError(f"{value} is not a natural number")
            value = int(value)
        if not self.contains(value):
            raise GradeError(f"{value!r} is not in the carrier of {self.kind}")
        return Grade(value, self)

    def parse(self, text: str, line=None, col=None) -> "Grade":
        """Parse a grade literal: ``2``, ``0.5``, ``3/4`` or ``inf``."""
        if text == "inf":
            if self.kind in ("trivial", "nat-inf"):
                return Grade(INF, self)
            raise ParseError(f"inf is not a grade of {self.kind}", line, col)
        m = _LITERAL.match(text)
        if not m:
            raise ParseError(f"malformed grade literal {text!r}", line, col)
        whole, frac, den = m.groups()
        if frac is not None and den is not None:
            raise ParseError(f"malformed grade literal {text!r}", line, col)
        q = Fraction(int(whole))
        if frac is not None:
            q = Fraction(int(whole + frac), 10 ** len(frac))
        if den is not None:
            if int(den) == 0:
                raise ParseError("zero denominator in grade literal", line, col)
            q = q / int(den)
        if self.kind == "trivial":
            return Grade(INF, self)
        try:
            return self.grade(q)
        except GradeError as exc:
            raise ParseError(str(exc), line, col) from None

    @cached_property
    def zero(self) -> "Grade":
        return self.grade(0)

    @cached_property
    def one(self) -> "Grade":
        return self.grade(1)

    def samples(self, extra=()) -> list["Grade"]:
        """Law-checking sample: 0, 1, 2, 3, inf when present, plus extras."""
        if self.kind == "trivial":
            return [Grade(INF, self)]
        out = [self.grade(v) for v in range(4)]
        if self.kind == "nat-inf":
            out.append(Grade(INF, self))
        for g in extra:
            g = self.grade(g)
            if g not in out:
                out.append(g)
        return out

    # operations

    def _same(self, *gs):
        for g in gs:
            if g.ring != self:
                raise MixedSemiringError(f"grade {g} of {g.ring} used with {self}")

    def add(self, a: "Grade", b: "Grade") -> "Grade":
        self._same(a, b)
        if a.value is INF or b.value is INF:
            return Grade(INF, self)
        if not a.value:
            return b
        if not b.value:
            return a
        return Grade(a.value + b.value, self)

    def mul(self, a: "Grade", b: "Grade") -> "Grade":
        self._same(a, b)
        if self.kind == "trivial":
            return Grade(INF, self)
        # zero annihilates, also against inf
        if a.value == 0 or b.value == 0:
            return self.zero
        if a.value is INF or b.value is INF:
            return Grade(INF, self)
        if a.value == 1:
            return b
        if b.value == 1:
            return a
        return Grade(a.value * b.value, self)

    def leq(self, a: "Grade", b: "Grade") -> bool:
        self._same(a, b)
        if self.kind == "trivial":
            return True
        if self.kind == "nonneg-real":
            return a.value <= b.value
        return a.value == b.value

    def join(self, a: "Grade", b: "Grade") -> "Grade":
        self._same(a, b)
        if not self.joins:
            raise UnsupportedJoin(f"{self.kind} has no binary joins")
        return a if a.value >= b.value else b

    def total(self, grades) -> "Grade":
        acc = self.zero
        for g in grades:
            acc = self.add(acc, g)
        return acc


@dataclass(frozen=True)
class Grade:
    value: object
    ring: Semiring

    def __add__(self, other):
        return self.ring.add(self, other)

    def __mul__(self, other):
        return self.ring.mul(self, other)

    def __le__(self, other):
        return self.ring.leq(self, other)

    def join(self, other):
        return self.ring.join(self, other)

    @property
    def is_inf(self) -> bool:
        return self.value is INF

    def to_float(self) -> float:
        return math.inf if self.value is INF else float(self.value)

    def __str__(self):
        return "inf" if self.value is INF else str(self.value)

    def __repr__(self):
        return f"Grade({self}, {self.ring.kind})"


def semiring(kind: str) -> Semiring:
    return Semiring(kind)
