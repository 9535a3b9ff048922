"""Exact arithmetic over constructible reals.

A :class:`Scalar` is a node in an expression DAG whose leaves are arbitrary
precision rationals and whose inner nodes are ``add``, ``sub``, ``mul``,
``div`` and ``sqrt``.  Nothing is ever rounded: the value is only
*approximated* by an enclosing interval that can be refined on demand.

The sign of a scalar is decided by refining the enclosure until it excludes
zero.  When the enclosure keeps straddling zero, a separation bound computed
from the DAG (the BFMSS bound for radical expressions) tells us how small a
nonzero value could possibly be; once the enclosure is narrower than that
bound the value is certified to be exactly zero.  This makes :func:`sign`
total and exact.

Nodes are hash-consed: building the same expression twice yields the same
object, which keeps the number of distinct square roots (and therefore the
separation bound) as small as the input allows.

Text form (``ScalarText``)::

    expr := rational | expr ('+'|'-'|'*'|'/') expr | 'sqrt' '(' expr ')' | '(' expr ')'
    rational := int | int '/' posint
"""

from __future__ import annotations

import math
import os
import re
import threading
import weakref
from fractions import Fraction
from typing import Iterator, Union

from mpmath.libmp import (
    from_int,
    from_rational,
    mpf_add,
    mpf_div,
    mpf_lt,
    mpf_mul,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_float,
)
from mpmath.libmp import mpf_sign as _mpf_sign

__all__ = [
    "Scalar",
    "ScalarError",
    "ScalarSyntaxError",
    "DivisionByZeroError",
    "SqrtOfNegativeError",
    "parse_scalar",
    "sign",
    "sqrt",
    "arith",
    "as_scalar",
    "precision_cap",
]

Number = Union["Scalar", int, Fraction]

DEFAULT_PRECISION_CAP = 4096
_START_PRECISION = 64
_FZERO = from_int(0)


class ScalarError(ValueError):
    """Base class for kernel errors."""


class ScalarSyntaxError(ScalarError):
    """Malformed scalar text; ``position`` is the 0-based offset of the problem."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = " " * position + "^"
        super().__init__(f"{message} at position {position}\n  {text}\n  {pointer}")


class DivisionByZeroError(ScalarError):
    """A divisor evaluated to exactly zero."""


class SqrtOfNegativeError(ScalarError):
    """A square root operand evaluated to a negative number."""


def precision_cap() -> int:
    """Bits of plain interval refinement before the separation bound is used.

    Read from ``DISSECT_PRECISION_CAP`` (default 4096).  With a low cap, zero
    tests jump straight to the precision demanded by the separation bound;
    with a high cap, tiny nonzero values get more cheap doubling attempts
    first.  Correctness never depends on the cap, only running time does.
    """
    raw = os.environ.get("DISSECT_PRECISION_CAP")
    if not raw:
        return DEFAULT_PRECISION_CAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise ScalarError(f"DISSECT_PRECISION_CAP must be an integer, got {raw!r}") from exc
    return max(value, _START_PRECISION)


# ---------------------------------------------------------------------------
# interval helpers on raw mpmath mantissa/exponent tuples
# ---------------------------------------------------------------------------

def _iv_rational(q: Fraction, prec: int):
    return (
        from_rational(q.numerator, q.denominator, prec, round_floor),
        from_rational(q.numerator, q.denominator, prec, round_ceiling),
    )


def _iv_min(values):
    best = values[0]
    for v in values[1:]:
        if mpf_lt(v, best):
            best = v
    return best


def _iv_max(values):
    best = values[0]
    for v in values[1:]:
        if mpf_lt(best, v):
            best = v
    return best


def _iv_add(a, b, prec):
    return (mpf_add(a[0], b[0], prec, round_floor), mpf_add(a[1], b[1], prec, round_ceiling))


def _iv_sub(a, b, prec):
    return (mpf_sub(a[0], b[1], prec, round_floor), mpf_sub(a[1], b[0], prec, round_ceiling))


def _iv_mul(a, b, prec):
    lows = [mpf_mul(x, y, prec, round_floor) for x in a for y in b]
    highs = [mpf_mul(x, y, prec, round_ceiling) for x in a for y in b]
    return (_iv_min(lows), _iv_max(highs))


def _iv_div(a, b, prec):
    if _mpf_sign(b[0]) <= 0 <= _mpf_sign(b[1]):
        return None
    lows = [mpf_div(x, y, prec, round_floor) for x in a for y in b]
    highs = [mpf_div(x, y, prec, round_ceiling) for x in a for y in b]
    return (_iv_min(lows), _iv_max(highs))


def _iv_sqrt(a, prec):
    lo = a[0] if _mpf_sign(a[0]) > 0 else _FZERO
    hi = a[1] if _mpf_sign(a[1]) > 0 else _FZERO
    return (mpf_sqrt(lo, prec, round_floor), mpf_sqrt(hi, prec, round_ceiling))


def _iv_intersect(old, new):
    """Intersect two enclosures of the same value so refinement stays nested."""
    if old is None:
        return new
    if new is None:
        return old
    lo = new[0] if mpf_lt(old[0], new[0]) else old[0]
    hi = new[1] if mpf_lt(new[1], old[1]) else old[1]
    return (lo, hi)


# ---------------------------------------------------------------------------
# the expression DAG
# ---------------------------------------------------------------------------

_INTERN: "weakref.WeakValueDictionary[tuple, Scalar]" = weakref.WeakValueDictionary()
_INTERN_LOCK = threading.RLock()


class Scalar:
    """Immutable exact constructible real.

    Build scalars with the arithmetic operators, :func:`sqrt` or
    :func:`parse_scalar`.  Comparisons are exact.  ``hash`` is value based:
    two scalars that compare equal always hash equal, even when their
    expressions differ.
    """

    __slots__ = ("_op", "_args", "_q", "_iv", "_prec", "_sep", "_hash", "_lock", "__weakref__")

    _op: str
    _args: tuple
    _q: Fraction | None

    def __new__(cls, value: Number = 0):
        if isinstance(value, Scalar):
            return value
        return _leaf(Fraction(value))

    # construction ---------------------------------------------------------

    @classmethod
    def _make(cls, op: str, args: tuple, q: Fraction | None) -> "Scalar":
        key = ("q", q) if op == "q" else (op,) + tuple(id(a) for a in args)
        with _INTERN_LOCK:
            found = _INTERN.get(key)
            if found is not None:
                return found
            node = object.__new__(cls)
            node._op = op
            node._args = args
            node._q = q
            node._iv = None
            node._prec = 0
            node._sep = None
            node._hash = None
            node._lock = threading.Lock()
            _INTERN[key] = node
            return node

    # structural accessors ----------------------------------------------------

    @property
    def op(self) -> str:
        """Node kind: ``q`` (rational leaf), ``add``, ``sub``, ``mul``, ``div`` or ``sqrt``."""
        return self._op

    @property
    def args(self) -> tuple["Scalar", ...]:
        return self._args

    @property
    def is_rational_leaf(self) -> bool:
        return self._op == "q"

    @property
    def rational(self) -> Fraction | None:
        """The exact rational value for leaves, else ``None``."""
        return self._q

    def nodes(self) -> Iterator["Scalar"]:
        """Yield every distinct node of the DAG in post-order (children first)."""
        seen: set[int] = set()
        stack: list[tuple[Scalar, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if id(node) in seen:
                continue
            if expanded or node._op == "q":
                seen.add(id(node))
                yield node
                continue
            stack.append((node, True))
            for child in reversed(node._args):
                if id(child) not in seen:
                    stack.append((child, False))

    def sqrt_count(self) -> int:
        """Number of distinct square-root nodes in the DAG."""
        return sum(1 for n in self.nodes() if n._op == "sqrt")

    # enclosures ---------------------------------------------------------------

    def enclosure(self, prec: int = _START_PRECISION):
        """Return an enclosing interval ``(lo, hi)`` as mpmath raw floats.

        ``None`` means the enclosure is currently unbounded (a divisor interval
        still contains zero at this precision).  Successive calls at increasing
        precision return nested intervals.
        """
        if self._prec >= prec and self._iv is not None:
            return self._iv
        for node in self.nodes():
            node._refine_local(prec)
        return self._iv

    def _refine_local(self, prec: int) -> None:
        with self._lock:
            if self._prec >= prec and (self._iv is not None or self._op == "q"):
                return
            op = self._op
            if op == "q":
                new = _iv_rational(self._q, prec)
            else:
                kids = [a._iv for a in self._args]
                if any(k is None for k in kids):
                    new = None
                elif op == "add":
                    new = _iv_add(kids[0], kids[1], prec)
                elif op == "sub":
                    new = _iv_sub(kids[0], kids[1], prec)
                elif op == "mul":
                    new = _iv_mul(kids[0], kids[1], prec)
                elif op == "div":
                    new = _iv_div(kids[0], kids[1], prec)
                else:
                    new = _iv_sqrt(kids[0], prec)
            self._iv = _iv_intersect(self._iv, new)
            self._prec = prec

    def interval(self, prec: int = _START_PRECISION) -> tuple[float, float] | None:
        """Float view of the enclosure (outward rounded), for diagnostics."""
        iv = self.enclosure(prec)
        if iv is None:
            return None
        return (to_float(iv[0], rnd=round_floor), to_float(iv[1], rnd=round_ceiling))

    def separation_bits(self) -> float:
        """``-log2`` of the smallest possible magnitude of this value if nonzero."""
        if self._sep is None:
            self._sep = _separation_bits(self)
        return self._sep

    # conversions ---------------------------------------------------------------

    def __float__(self) -> float:
        if self._q is not None:
            return float(self._q)
        prec = _START_PRECISION
        while True:
            iv = self.enclosure(prec)
            if iv is not None:
                lo = to_float(iv[0])
                hi = to_float(iv[1])
                if lo == hi or (math.isfinite(lo) and math.isfinite(hi) and abs(hi - lo) <= 1e-15 * max(1.0, abs(lo))):
                    return (lo + hi) / 2
            if prec > 1 << 16:
                return (lo + hi) / 2 if iv is not None else math.nan
            prec *= 2

    def to_text(self) -> str:
        """Serialize in the ScalarText grammar (fully parenthesized)."""
        memo: dict[int, str] = {}
        for node in self.nodes():
            if node._op == "q":
                q = node._q
                body = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
                memo[id(node)] = f"({body})" if q < 0 or q.denominator != 1 else body
            elif node._op == "sqrt":
                memo[id(node)] = f"sqrt({memo[id(node._args[0])]})"
            else:
                sym = {"add": "+", "sub": "-", "mul": "*", "div": "/"}[node._op]
                memo[id(node)] = f"({memo[id(node._args[0])]}{sym}{memo[id(node._args[1])]})"
        text = memo[id(self)]
        if text.startswith("(") and _balanced_outer(text):
            text = text[1:-1]
        return text

    def __repr__(self) -> str:
        return f"Scalar({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    # arithmetic ----------------------------------------------------------------

    def __add__(self, other: Number) -> "Scalar":
        return arith(self, other, "add")

    def __radd__(self, other: Number) -> "Scalar":
        return arith(other, self, "add")

    def __sub__(self, other: Number) -> "Scalar":
        return arith(self, other, "sub")

    def __rsub__(self, other: Number) -> "Scalar":
        return arith(other, self, "sub")

    def __mul__(self, other: Number) -> "Scalar":
        return arith(self, other, "mul")

    def __rmul__(self, other: Number) -> "Scalar":
        return arith(other, self, "mul")

    def __truediv__(self, other: Number) -> "Scalar":
        return arith(self, other, "div")

    def __rtruediv__(self, other: Number) -> "Scalar":
        return arith(other, self, "div")

    def __neg__(self) -> "Scalar":
        return arith(0, self, "sub")

    def __pos__(self) -> "Scalar":
        return self

    def __abs__(self) -> "Scalar":
        return -self if sign(self) < 0 else self

    def sqrt(self) -> "Scalar":
        return sqrt(self)

    # comparisons ----------------------------------------------------------------

    def cmp(self, other: Number) -> int:
        """Exact three-way comparison: -1, 0 or +1."""
        other = as_scalar(other)
        if other is self:
            return 0
        return sign(arith(self, other, "sub"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self.cmp(other) == 0

    def __ne__(self, other: object) -> bool:
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self.cmp(other) != 0

    def __lt__(self, other: Number) -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: Number) -> bool:
        return self.cmp(other) <= 0

    def __gt__(self, other: Number) -> bool:
        return self.cmp(other) > 0

    def __ge__(self, other: Number) -> bool:
        return self.cmp(other) >= 0

    def __bool__(self) -> bool:
        return sign(self) != 0

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(_grid_floor(self))
        return self._hash

    def __reduce__(self):
        return (parse_scalar, (self.to_text(),))


def _balanced_outer(text: str) -> bool:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0 and i != len(text) - 1:
                return False
    return True


def _leaf(q: Fraction) -> Scalar:
    return Scalar._make("q", (), q)


ZERO = _leaf(Fraction(0))
ONE = _leaf(Fraction(1))


def as_scalar(value: Number) -> Scalar:
    """Coerce ints, Fractions and Scalars to a Scalar."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, Fraction)):
        return _leaf(Fraction(value))
    if isinstance(value, str):
        return parse_scalar(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Scalar (floats are not exact)")


def _is_perfect_square(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def arith(x: Number, y: Number, op: str) -> Scalar:
    """Exact ``x op y`` for op in {add, sub, mul, div}.

    Rational operands are folded eagerly and a few trivial identities are
    applied (``x + 0``, ``x * 1``, ``x - x``, ``sqrt(a) * sqrt(a)``); no other
    simplification is attempted.
    """
    a = as_scalar(x)
    b = as_scalar(y)
    if op not in ("add", "sub", "mul", "div"):
        raise ValueError(f"unknown operation {op!r}")
    if op == "div" and sign(b) == 0:
        raise DivisionByZeroError(f"division by zero: {a.to_text()} / ({b.to_text()})")
    qa, qb = a._q, b._q
    if qa is not None and qb is not None:
        if op == "add":
            return _leaf(qa + qb)
        if op == "sub":
            return _leaf(qa - qb)
        if op == "mul":
            return _leaf(qa * qb)
        return _leaf(qa / qb)
    if op == "add":
        if qa == 0:
            return b
        if qb == 0:
            return a
    elif op == "sub":
        if qb == 0:
            return a
        if a is b:
            return ZERO
    elif op == "mul":
        if qa == 0 or qb == 0:
            return ZERO
        if qa == 1:
            return b
        if qb == 1:
            return a
        if a is b and a._op == "sqrt":
            return a._args[0]
    else:
        if qa == 0:
            return ZERO
        if qb == 1:
            return a
        if a is b:
            return ONE
    return Scalar._make(op, (a, b), None)


def sqrt(x: Number) -> Scalar:
    """Exact square root; raises :class:`SqrtOfNegativeError` for negative operands."""
    a = as_scalar(x)
    s = sign(a)
    if s < 0:
        raise SqrtOfNegativeError(f"square root of a negative number: {a.to_text()}")
    if s == 0:
        return ZERO
    q = a._q
    if q is not None:
        rn = _is_perfect_square(q.numerator)
        rd = _is_perfect_square(q.denominator)
        if rn is not None and rd is not None:
            return _leaf(Fraction(rn, rd))
    return Scalar._make("sqrt", (a,), None)


# ---------------------------------------------------------------------------
# sign determination
# ---------------------------------------------------------------------------

def _log2_up(n: int) -> float:
    """An upper bound on log2(max(|n|, 1))."""
    n = abs(n)
    return float(n.bit_length()) if n > 1 else 0.0


def _separation_bits(x: Scalar) -> float:
    """Number of bits below which a nonzero value of ``x`` cannot lie.

    Each node carries upper bounds ``u`` (on the conjugates of a numerator
    that is an algebraic integer) and ``l`` (on the conjugates of a
    denominator), tracked as base-2 logarithms.  For a nonzero value of degree
    at most ``D`` the magnitude is at least ``1 / (u^(D-1) * l)``.  ``D`` is
    bounded by ``2**k`` where ``k`` is the number of distinct square roots.
    """
    lu: dict[int, float] = {}
    ll: dict[int, float] = {}
    k = 0
    for node in x.nodes():
        op = node._op
        if op == "q":
            u, l = _log2_up(node._q.numerator), _log2_up(node._q.denominator)
        else:
            a = node._args[0]
            ua, la = lu[id(a)], ll[id(a)]
            if op == "sqrt":
                k += 1
                u, l = (ua + la) / 2.0, la
            else:
                b = node._args[1]
                ub, lb = lu[id(b)], ll[id(b)]
                if op in ("add", "sub"):
                    u, l = max(ua + lb, ub + la) + 1.0, la + lb
                elif op == "mul":
                    u, l = ua + ub, la + lb
                else:
                    u, l = ua + lb, la + ub
        # a little slack absorbs float rounding in the logarithms
        lu[id(node)] = u * (1 + 1e-12) + 1e-9
        ll[id(node)] = l * (1 + 1e-12) + 1e-9
    degree = 2.0 ** k
    return (degree - 1.0) * lu[id(x)] + ll[id(x)] + 1.0


def _width_below(iv, bits: float, prec: int) -> bool:
    width = mpf_sub(iv[1], iv[0], prec, round_ceiling)
    limit = (0, 1, -int(math.ceil(bits)), 1)
    return mpf_lt(width, limit)


def sign(x: Number) -> int:
    """Exact sign of ``x``: -1, 0 or +1.  Always terminates."""
    x = as_scalar(x)
    if x._q is not None:
        return (x._q > 0) - (x._q < 0)
    cap = precision_cap()
    prec = _START_PRECISION
    bits: float | None = None
    while True:
        iv = x.enclosure(prec)
        if iv is not None:
            if _mpf_sign(iv[0]) > 0:
                return 1
            if _mpf_sign(iv[1]) < 0:
                return -1
            if bits is None:
                bits = x.separation_bits()
            if _width_below(iv, bits, prec):
                return 0
        if prec < cap:
            prec = min(prec * 2, cap)
        else:
            if bits is None:
                bits = x.separation_bits()
            target = int(bits) + 64
            prec = max(prec * 2, target) if prec >= target else target


def _grid_floor(x: Scalar, grid_bits: int = 24) -> int:
    """Exact ``floor(x * 2**grid_bits)``; the basis of the value hash."""
    if x._q is not None:
        return math.floor(x._q * (1 << grid_bits))
    prec = _START_PRECISION
    while True:
        lohi = x.interval(prec)
        if lohi is not None and all(math.isfinite(v) for v in lohi):
            lo = math.floor(lohi[0] * (1 << grid_bits))
            hi = math.floor(lohi[1] * (1 << grid_bits))
            if lo == hi:
                return lo
            if hi == lo + 1:
                boundary = Fraction(hi, 1 << grid_bits)
                return hi if sign(x - boundary) >= 0 else lo
        prec *= 2
        if prec > 1 << 14:
            # the enclosure is stubbornly wide only when x is huge; fall back
            # to exact comparisons around the float estimate
            guess = math.floor(float(x) * (1 << grid_bits))
            while sign(x - Fraction(guess, 1 << grid_bits)) < 0:
                guess -= 1
            while sign(x - Fraction(guess + 1, 1 << grid_bits)) >= 0:
                guess += 1
            return guess


# ---------------------------------------------------------------------------
# text grammar
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<sqrt>sqrt)|(?P<op>[-+*/()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ScalarSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value:
            shown = val if kind != "end" else "end of input"
            raise ScalarSyntaxError(f"expected {value!r}, found {shown!r}", self.text, pos)

    def parse(self) -> Scalar:
        value = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ScalarSyntaxError(f"unexpected {val!r}", self.text, pos)
        return value

    def expr(self) -> Scalar:
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            _, op, _ = self.take()
            rhs = self.term()
            value = arith(value, rhs, "add" if op == "+" else "sub")
        return value

    def term(self) -> Scalar:
        value = self.atom()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.atom()
            try:
                value = arith(value, rhs, "mul" if op == "*" else "div")
            except DivisionByZeroError as exc:
                raise DivisionByZeroError(f"division by zero at position {pos}: {exc}") from None
        return value

    def atom(self) -> Scalar:
        kind, val, pos = self.take()
        if kind == "num":
            return self.rational(int(val), pos)
        if val == "-" and self.peek()[0] == "num":
            _, digits, npos = self.take()
            return self.rational(-int(digits), pos)
        if kind == "sqrt":
            self.expect("(")
            inner = self.expr()
            self.expect(")")
            try:
                return sqrt(inner)
            except SqrtOfNegativeError as exc:
                raise SqrtOfNegativeError(f"square root of a negative number at position {pos}: {exc}") from None
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        shown = val if kind != "end" else "end of input"
        raise ScalarSyntaxError(f"expected a number, 'sqrt' or '(', found {shown!r}", self.text, pos)

    def rational(self, numerator: int, pos: int) -> Scalar:
        return _leaf(Fraction(numerator))


def parse_scalar(text: str) -> Scalar:
    """Parse ScalarText into an exact Scalar.

    Raises :class:`ScalarSyntaxError` (with position), :class:`DivisionByZeroError`
    or :class:`SqrtOfNegativeError`.
    """
    if not isinstance(text, str):
        raise TypeError("scalar text must be a string")
    return _Parser(text).parse()
