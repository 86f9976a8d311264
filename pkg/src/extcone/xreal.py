"""Exact arithmetic in [0, infinity] and on extended vectors.

Scalars are nonnegative rationals (stdlib ``Fraction``, always in lowest
terms) extended with a single infinity element.  The one non-obvious rule,
used everywhere downstream, is that 0 * inf = 0: multiplication is jointly
lower semicontinuous, so the product must be the supremum of 0 * t over
finite t.

Floating point is banned in this package; every quantity is a Fraction or
the canonical ``INF``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional, Union

from .errors import PreconditionError, SchemaError

RationalLike = Union[int, Fraction, str, "ExtScalar"]

_SCALAR_RE = re.compile(r"[0-9]+(/[0-9]+)?")


class ExtScalar:
    """An element of [0, infinity]: a nonnegative Fraction or infinity."""

    __slots__ = ("_v",)

    def __init__(self, value: Optional[Union[int, Fraction]]):
        if value is None:
            self._v = None
            return
        f = Fraction(value)
        if f < 0:
            raise PreconditionError("extended scalars are nonnegative, got %s" % f)
        self._v = f

    @property
    def is_infinite(self) -> bool:
        return self._v is None

    @property
    def is_zero(self) -> bool:
        return self._v == 0

    @property
    def finite(self) -> Fraction:
        if self._v is None:
            raise PreconditionError("infinite scalar has no finite value")
        return self._v

    def __add__(self, other: "ExtScalar") -> "ExtScalar":
        other = ext(other)
        if self._v is None or other._v is None:
            return INF
        return ExtScalar(self._v + other._v)

    __radd__ = __add__

    def __mul__(self, other: "ExtScalar") -> "ExtScalar":
        other = ext(other)
        # 0 * inf = 0, in either order.
        if (self._v == 0) or (other._v == 0):
            return ZERO
        if self._v is None or other._v is None:
            return INF
        return ExtScalar(self._v * other._v)

    __rmul__ = __mul__

    def __le__(self, other: "ExtScalar") -> bool:
        other = ext(other)
        if other._v is None:
            return True
        if self._v is None:
            return False
        return self._v <= other._v

    def __lt__(self, other: "ExtScalar") -> bool:
        other = ext(other)
        return self <= other and not other <= self

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (ExtScalar, int, Fraction)):
            return NotImplemented
        return self._v == ext(other)._v

    def __hash__(self) -> int:
        return hash(("ExtScalar", self._v))

    def __repr__(self) -> str:
        return "ext(%r)" % (format_scalar(self),)

    def __str__(self) -> str:
        return format_scalar(self)


ZERO = ExtScalar(0)
ONE = ExtScalar(1)
INF = ExtScalar(None)


def ext(value: RationalLike) -> ExtScalar:
    """Coerce an int, Fraction, "p/q"/"inf" string, or ExtScalar to ExtScalar."""
    if isinstance(value, ExtScalar):
        return value
    if isinstance(value, str):
        return parse_scalar(value)
    return ExtScalar(value)


def parse_scalar(text: str) -> ExtScalar:
    """Parse "p/q", "p", or "inf" (the only serialized forms)."""
    text = text.strip()
    if text == "inf":
        return INF
    if not _SCALAR_RE.fullmatch(text):
        raise SchemaError('bad scalar literal %r: expected "p/q", "p", or "inf"'
                          % text)
    try:
        return ExtScalar(Fraction(text))
    except ZeroDivisionError as exc:
        raise SchemaError("bad scalar literal %r: %s" % (text, exc)) from exc


def format_scalar(value: ExtScalar) -> str:
    if value.is_infinite:
        return "inf"
    return str(value.finite)


def xr_arith(a: RationalLike, b: RationalLike, kind: str):
    """Dispatch facade: kind is one of "add", "mul", "leq"."""
    a, b = ext(a), ext(b)
    if kind == "add":
        return a + b
    if kind == "mul":
        return a * b
    if kind == "leq":
        return a <= b
    raise PreconditionError("unknown arithmetic kind %r" % kind)


class ExtVector:
    """A vector over [0, infinity] with componentwise structure."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[RationalLike]):
        self.entries = tuple(ext(e) for e in entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> ExtScalar:
        return self.entries[i]

    def __add__(self, other: "ExtVector") -> "ExtVector":
        _check_dim(self, other)
        return ExtVector(a + b for a, b in zip(self.entries, other.entries))

    def scale(self, t: RationalLike) -> "ExtVector":
        t = ext(t)
        return ExtVector(t * a for a in self.entries)

    def __le__(self, other: "ExtVector") -> bool:
        _check_dim(self, other)
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExtVector):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(("ExtVector", self.entries))

    def __repr__(self) -> str:
        return "ExtVector([%s])" % ", ".join(format_scalar(a) for a in self.entries)


def _check_dim(a: ExtVector, b: ExtVector) -> None:
    if len(a) != len(b):
        raise PreconditionError(
            "dimension mismatch: %d vs %d" % (len(a), len(b)))


def vec_way_below(x: ExtVector, y: ExtVector) -> bool:
    """Decide x << y in [0, inf]^n.

    Closed form: in each coordinate, x_i < y_i strictly with x_i finite, or
    x_i = y_i = 0.  Equivalently x lies below some member of the canonical
    approximating sequence of y (the sequence-based form is kept as the
    independent test oracle).
    """
    _check_dim(x, y)
    for a, b in zip(x.entries, y.entries):
        if a.is_zero and b.is_zero:
            continue
        if a.is_infinite or not a < b:
            return False
    return True


def vec_approx_member(y: ExtVector, n: int) -> ExtVector:
    """The n-th member of the canonical approximating sequence of y.

    Each member caps entries at 2^n and shrinks by (1 - 2^-n); the sequence
    increases with supremum y, and every member is way below y.
    """
    if n < 0:
        raise PreconditionError("sequence index must be >= 0")
    cap = Fraction(2) ** n
    shrink = 1 - Fraction(1, 2 ** n)
    out = []
    for a in y.entries:
        capped = cap if a.is_infinite or a.finite > cap else a.finite
        out.append(ExtScalar(shrink * capped))
    return ExtVector(out)


def vec_support_idem(x: ExtVector) -> ExtVector:
    """The support idempotent of x: the limit of (1/n) x.

    Componentwise this sends finite entries to 0 and keeps infinite ones, and
    it is the largest idempotent vector absorbed by x.
    """
    return ExtVector(INF if a.is_infinite else ZERO for a in x.entries)


def vec_is_idempotent(x: ExtVector) -> bool:
    return all(a.is_infinite or a.is_zero for a in x.entries)
