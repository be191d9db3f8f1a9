"""Exact coefficients, monomial orders and multivariate polynomials.

Polynomials are stored as a dict mapping exponent tuples to nonzero
coefficients.  Coefficients are :class:`fractions.Fraction` over the
rationals or :class:`ModP` residues over a prime field.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DomainError, ParseError

Monomial = tuple  # tuple[int, ...]


# ---------------------------------------------------------------------------
# coefficient fields


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


class ModP:
    """A residue modulo a prime, always stored reduced in ``[0, p)``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise DomainError(f"mixing residues mod {self.p} and mod {other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pow__(self, e: int):
        return ModP(pow(self.v, e, self.p), self.p)

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"ModP({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class RationalField:
    characteristic = 0

    def __call__(self, x) -> Fraction:
        if isinstance(x, ModP):
            raise DomainError("cannot coerce a prime-field residue into QQ")
        return Fraction(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __str__(self):
        return "QQ"

    __repr__ = __str__


class PrimeField:
    def __init__(self, p: int):
        if not _is_prime(p):
            raise DomainError(f"{p} is not prime")
        self.characteristic = p

    def __call__(self, x) -> ModP:
        p = self.characteristic
        if isinstance(x, ModP):
            if x.p != p:
                raise DomainError(f"residue mod {x.p} is not in GF({p})")
            return x
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise DomainError(f"{x} has no image in GF({p})")
            return ModP(x.numerator * pow(x.denominator, -1, p), p)
        return ModP(int(x), p)

    @property
    def zero(self):
        return ModP(0, self.characteristic)

    @property
    def one(self):
        return ModP(1, self.characteristic)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("GF", self.characteristic))

    def __str__(self):
        return f"GF({self.characteristic})"

    __repr__ = __str__


QQ = RationalField()


def field_from_spec(spec: str):
    """Parse ``Q``, ``QQ``, ``Fp:7``, ``F7`` or ``GF(7)``."""
    s = spec.strip()
    if s in ("Q", "QQ"):
        return QQ
    m = re.fullmatch(r"(?:Fp:|F|GF\()(\d+)\)?", s)
    if m:
        return PrimeField(int(m.group(1)))
    raise DomainError(f"unknown coefficient field {spec!r}")


def format_coefficient(c) -> str:
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, Fraction):
        return str(c.numerator)
    return str(c)


# ---------------------------------------------------------------------------
# monomial orders

ORDER_NAMES = ("grevlex", "lex", "grlex")


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order: ``grevlex``, ``lex`` or ``grlex`` (graded lex).

    ``priority`` lists variable indices from most to least significant.
    """

    name: str = "grevlex"
    priority: tuple | None = None

    def __post_init__(self):
        if self.name == "graded-lex":
            object.__setattr__(self, "name", "grlex")
        if self.name not in ORDER_NAMES:
            raise DomainError(f"unknown monomial order {self.name!r}")

    def key_function(self, nvars: int):
        perm = self.priority if self.priority is not None else tuple(range(nvars))
        if sorted(perm) != list(range(nvars)):
            raise DomainError("variable priority is not a permutation")
        if self.name == "lex":
            def key(m):
                return tuple(m[i] for i in perm)
        elif self.name == "grlex":
            def key(m):
                return (sum(m),) + tuple(m[i] for i in perm)
        else:
            rev = tuple(reversed(perm))

            def key(m):
                return (sum(m),) + tuple(-m[i] for i in rev)
        return lru_cache(maxsize=None)(key)


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    """Return a / b, assuming b divides a."""
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(b, a) -> bool:
    return all(x <= y for x, y in zip(b, a))


def mono_lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# polynomial rings


class PolyRing:
    """The polynomial ring ``field[names]`` with a fixed monomial order."""

    def __init__(self, names: Sequence[str], field=QQ, order: MonomialOrder | str = "grevlex"):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise DomainError("duplicate variable names")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", n):
                raise DomainError(f"bad variable name {n!r}")
        if isinstance(order, str):
            order = MonomialOrder(order)
        self.names = names
        self.nvars = len(names)
        self.field = field
        self.order = order
        self.key = order.key_function(self.nvars)
        self._index = {n: i for i, n in enumerate(names)}
        self.unit_mono = (0,) * self.nvars

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.names == other.names
            and self.field == other.field
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.names, self.field, self.order))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, {self.field}, {self.order.name!r}, {self.order.priority!r})"

    def __str__(self):
        return f"{self.field}[{', '.join(self.names)}]"

    @property
    def zero(self) -> Poly:
        return Poly(self, {})

    @property
    def one(self) -> Poly:
        return self.constant(1)

    @property
    def gens(self) -> tuple:
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append(Poly(self, {tuple(e): self.field.one}))
        return tuple(out)

    def var(self, name: str) -> Poly:
        if name not in self._index:
            raise DomainError(f"unknown identifier {name!r}")
        return self.gens[self._index[name]]

    def index(self, name: str) -> int:
        return self._index[name]

    def constant(self, c) -> Poly:
        c = self.field(c)
        return Poly(self, {self.unit_mono: c} if c else {})

    def monomial(self, exps, c=1) -> Poly:
        c = self.field(c)
        return Poly(self, {tuple(exps): c} if c else {})

    def __call__(self, x) -> Poly:
        if isinstance(x, Poly):
            if x.ring != self:
                raise DomainError(f"polynomial over {x.ring} is not in {self}")
            return x
        if isinstance(x, str):
            return self.parse(x)
        return self.constant(x)

    def parse(self, text: str) -> Poly:
        return _Parser(text, self).parse()

    def extend(self, extra: Sequence[str]) -> PolyRing:
        """The ring with ``extra`` variables appended (same field and order name)."""
        return PolyRing(self.names + tuple(extra), self.field, MonomialOrder(self.order.name))

    def embed(self, f: Poly, target: PolyRing) -> Poly:
        """Map ``f`` into ``target``, whose variables extend ours."""
        pad = (0,) * (target.nvars - self.nvars)
        return Poly(target, {m + pad: c for m, c in f.terms.items()})


class Poly:
    """An immutable polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # -- structure
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring.unit_mono in self.terms)

    def constant_value(self):
        return self.terms.get(self.ring.unit_mono, self.ring.field.zero)

    def sorted_terms(self) -> list:
        """Terms in strictly descending order for the ring's monomial order."""
        return sorted(self.terms.items(), key=lambda t: self.ring.key(t[0]), reverse=True)

    def leading_monomial(self):
        return max(self.terms, key=self.ring.key)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def monic(self) -> Poly:
        if not self.terms:
            return self
        lc = self.leading_coefficient()
        return Poly(self.ring, {m: c / lc for m, c in self.terms.items()})

    # -- arithmetic
    def _check(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise DomainError(f"mismatched rings {self.ring} and {other.ring}")
            return other
        if isinstance(other, (int, Fraction, ModP)):
            return self.ring.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            v = t.get(m)
            if v is None:
                t[m] = c
            else:
                v = v + c
                if v:
                    t[m] = v
                else:
                    del t[m]
        return Poly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = t.get(m)
                c = c1 * c2
                if v is None:
                    t[m] = c
                else:
                    v = v + c
                    if v:
                        t[m] = v
                    else:
                        del t[m]
        return Poly(self.ring, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise DomainError("only division by nonzero constants is supported")
            other = other.constant_value()
        c = self.ring.field(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return Poly(self.ring, {m: v / c for m, v in self.terms.items()})

    def __pow__(self, e: int):
        if e < 0:
            raise DomainError("negative exponent")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def scale(self, c, mono=None) -> Poly:
        """Return ``c * x^mono * self``."""
        if not c:
            return self.ring.zero
        if mono is None:
            return Poly(self.ring, {m: v * c for m, v in self.terms.items()})
        return Poly(self.ring, {mono_mul(m, mono): v * c for m, v in self.terms.items()})

    # -- comparison
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction, ModP)):
            return self == self.ring.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def frozen(self) -> tuple:
        return tuple(sorted(self.terms.items()))

    def __repr__(self):
        return f"Poly({str(self)!r})"

    def __str__(self):
        return format_poly(self)


def format_poly(f: Poly) -> str:
    if not f.terms:
        return "0"
    names = f.ring.names
    parts = []
    for i, (m, c) in enumerate(f.sorted_terms()):
        factors = []
        for n, e in zip(names, m):
            if e == 1:
                factors.append(n)
            elif e > 1:
                factors.append(f"{n}^{e}")
        neg = False
        if isinstance(c, Fraction) and c < 0:
            neg = True
            c = -c
        cs = format_coefficient(c)
        if factors:
            body = "*".join(factors) if cs == "1" else cs + "*" + "*".join(factors)
        else:
            body = cs
        if i == 0:
            parts.append("-" + body if neg else body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str) -> list:
    """Split into ``(kind, value, position)`` triples; kinds are int, id, op."""
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    # expr   := ['+'|'-'] term (('+'|'-') term)*
    # term   := factor (('*' factor) | ('/' INT))*
    # factor := '-' factor | atom ['^' INT]
    # atom   := INT | IDENT | '(' expr ')'

    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, pos=None):
        if pos is None:
            pos = self.peek()[2]
        raise ParseError(msg, pos)

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            self.error("empty expression")
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            if kind in ("int", "id") or (kind == "op" and val == "("):
                self.error("implicit multiplication is not allowed; use '*'", pos)
            self.error(f"unexpected {val!r}", pos)
        return f

    def expr(self) -> Poly:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        f = self.term()
        if sign < 0:
            f = -f
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                g = self.term()
                f = f + g if val == "+" else f - g
            else:
                return f

    def term(self) -> Poly:
        f = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.factor()
            elif kind == "op" and val == "/":
                self.take()
                k, v, p = self.take()
                if k != "int":
                    self.error("only division by an integer literal is allowed", p)
                if v == 0:
                    self.error("division by zero", p)
                f = f / v
            elif kind in ("int", "id") or (kind == "op" and val == "("):
                self.error("implicit multiplication is not allowed; use '*'", pos)
            else:
                return f

    def factor(self) -> Poly:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return -self.factor()
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, v, p = self.take()
            if k != "int":
                self.error("exponent must be a nonnegative integer literal", p)
            base = base ** v
        return base

    def atom(self) -> Poly:
        kind, val, pos = self.take()
        if kind == "int":
            return self.ring.constant(val)
        if kind == "id":
            if val not in self.ring._index:
                raise ParseError(f"unknown identifier {val!r}", pos)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            f = self.expr()
            k, v, p = self.take()
            if not (k == "op" and v == ")"):
                self.error("expected ')'", p)
            return f
        if kind == "end":
            self.error("unexpected end of input", pos)
        self.error(f"unexpected {val!r}", pos)


def parse_polynomial(text: str, ring) -> Poly:
    """Parse ``text`` over ``ring`` (a PolyRing or a quotient ring).

    Over a quotient ring the result is reduced modulo the relations.
    """
    if isinstance(ring, PolyRing):
        return ring.parse(text)
    return ring.parse(text)


def poly_arith(f: Poly, g: Poly, kind: str) -> Poly:
    if f.ring != g.ring:
        raise DomainError(f"mismatched rings {f.ring} and {g.ring}")
    if kind == "add":
        return f + g
    if kind == "sub":
        return f - g
    if kind == "mul":
        return f * g
    raise DomainError(f"unknown operation {kind!r}")


# ---------------------------------------------------------------------------
# small matrix helpers (rows = target basis, columns = source basis)


def zero_matrix(ring: PolyRing, nrows: int, ncols: int) -> list:
    return [[ring.zero for _ in range(ncols)] for _ in range(nrows)]


def identity_matrix(ring: PolyRing, n: int) -> list:
    m = zero_matrix(ring, n, n)
    for i in range(n):
        m[i][i] = ring.one
    return m


def matmul(ring: PolyRing, a: Sequence[Sequence[Poly]], b: Sequence[Sequence[Poly]], inner: int | None = None) -> list:
    n = len(a)
    k = len(b) if inner is None else inner
    m = len(b[0]) if b else 0
    out = zero_matrix(ring, n, m)
    for i in range(n):
        row = a[i]
        for t in range(k):
            x = row[t]
            if not x:
                continue
            brow = b[t]
            for j in range(m):
                y = brow[j]
                if y:
                    out[i][j] = out[i][j] + x * y
    return out


def transpose(m: Sequence[Sequence[Poly]], ncols: int | None = None) -> list:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def determinant(m: Sequence[Sequence[Poly]], ring: PolyRing) -> Poly:
    """Determinant by cofactor expansion (matrices here are at most a few rows)."""
    n = len(m)
    if n == 0:
        return ring.one

    @lru_cache(maxsize=None)
    def det(rows: tuple, cols: tuple) -> Poly:
        if len(rows) == 1:
            return m[rows[0]][cols[0]]
        r0 = rows[0]
        rest = rows[1:]
        total = ring.zero
        for idx, c in enumerate(cols):
            e = m[r0][c]
            if not e:
                continue
            sub = det(rest, cols[:idx] + cols[idx + 1:])
            if not sub:
                continue
            term = e * sub
            total = total + term if idx % 2 == 0 else total - term
        return total

    return det(tuple(range(n)), tuple(range(n)))


def polys_from_strings(ring, items: Iterable[str]) -> list:
    return [ring.parse(s) if isinstance(s, str) else ring(s) for s in items]
