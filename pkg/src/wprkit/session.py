"""Session scripts: declarations of rings, ideals, modules, complexes and maps, then commands.

Grammar (one statement per line, ``#`` starts a comment)::

    ring A = QQ[x, y] / (x*y) order lex
    ideal a = (x) over A
    seq b = (x^2, y^2)
    module P = A/(x) | A^2 | A^2/<(x, 0), (0, y)> | P ++ Q | A
    complex K = koszul(a) | koszul(a, 2) | dual(K) | free(A^2, 0)
              | chain(A, -1, [[x]]) | tensor(K, L) | shift(K, 1)
    map phi = hom(A, A, [[1 - x]])
    wpr a J=4
    flat P=A/(x) a=(x)

Arguments are ``name=value`` pairs (or positional, in the command's
parameter order); values are declared names or inline expressions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .arith import QQ, field_from_spec
from .complexes import FreeComplex, ModuleComplex, dual, shift, tensor_complexes
from .errors import DomainError, ParseError
from .groebner import FreeVector
from .koszul import koszul_complex
from .modules import FpModule, ModuleMap, direct_sum
from .rings import IdealSpec, QuotientRing

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
ARG_START = re.compile(r"\s+(?=[A-Za-z_][A-Za-z0-9_]*=)")

INT_PARAMS = {"J", "j", "kmax", "k", "tor_depth", "bound", "r"}
BOOL_PARAMS = {"dual", "roundtrip"}

COMMANDS = {
    "wpr": ["a", "J"],
    "koszul": ["a", "j", "dual"],
    "complete": ["M", "a", "kmax", "candidates"],
    "lift": ["phi", "n", "a", "k"],
    "flat": ["P", "a", "kmax", "tor_depth"],
    "torsion": ["M", "a", "bound"],
    "derived-complete": ["M", "a", "J", "roundtrip"],
    "derived-torsion": ["M", "a", "J"],
    "compare-completion": ["a", "b", "kmax"],
    "nakayama-derived": ["P", "a", "r"],
    "base-change": ["a", "vars", "J"],
}
REQUIRED = {
    "complete": ["M"],
    "lift": ["phi", "n"],
    "flat": ["P"],
    "torsion": ["M"],
    "derived-complete": ["M"],
    "derived-torsion": ["M"],
    "compare-completion": ["b"],
    "nakayama-derived": ["P", "r"],
    "base-change": ["vars"],
}


@dataclass
class Command:
    id: str
    line: int
    name: str
    args: dict  # resolved values
    echo: dict  # canonical strings of the arguments


@dataclass
class Script:
    objects: dict = field(default_factory=dict)
    commands: list = field(default_factory=list)
    rings: list = field(default_factory=list)


class _Scanner:
    def __init__(self, text: str, line: int, offset: int = 0):
        self.s = text
        self.i = 0
        self.line = line
        self.offset = offset

    def error(self, msg: str, at: int | None = None):
        raise ParseError(msg, self.offset + (self.i if at is None else at), self.line)

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self, t: str) -> bool:
        self.ws()
        return self.s.startswith(t, self.i)

    def accept(self, t: str) -> bool:
        if self.peek(t):
            self.i += len(t)
            return True
        return False

    def expect(self, t: str):
        if not self.accept(t):
            self.error(f"expected {t!r}")

    def ident(self) -> str:
        self.ws()
        m = IDENT.match(self.s, self.i)
        if not m:
            self.error("expected a name")
        self.i = m.end()
        return m.group()

    def integer(self) -> int:
        self.ws()
        m = re.compile(r"[+-]?\d+").match(self.s, self.i)
        if not m:
            self.error("expected an integer")
        self.i = m.end()
        return int(m.group())

    def at_end(self) -> bool:
        self.ws()
        return self.i >= len(self.s)

    def raw_until(self, stops: str) -> tuple:
        """Text up to the first stop character at bracket depth 0."""
        self.ws()
        start = self.i
        depth = 0
        while self.i < len(self.s):
            c = self.s[self.i]
            if c in "([<" and not (c == "<" and depth):
                depth += 1
            elif c in ")]>":
                if depth == 0:
                    break
                depth -= 1
            elif c in stops and depth == 0:
                break
            self.i += 1
        if depth:
            self.error("unbalanced brackets", start)
        return self.s[start:self.i].strip(), start


class SessionParser:
    def __init__(self, default_field=QQ, default_order: str = "grevlex", default_level: int = 4):
        self.default_field = default_field
        self.default_order = default_order
        self.default_level = default_level
        self.script = Script()
        self._count = 0

    # -- helpers
    def _lookup(self, sc: _Scanner, name: str, kinds: tuple, at: int):
        obj = self.script.objects.get(name)
        if obj is None:
            sc.error(f"unknown identifier {name!r}", at)
        kind, value = obj
        if kind not in kinds:
            sc.error(f"{name!r} is a {kind}, expected {' or '.join(kinds)}", at)
        return value

    def _ring_named(self, sc, name, at) -> QuotientRing:
        return self._lookup(sc, name, ("ring",), at)

    def _poly(self, sc: _Scanner, ring: QuotientRing, text: str, start: int):
        try:
            return ring.parse(text)
        except ParseError as e:
            raise ParseError(e.message, sc.offset + start + e.position, sc.line) from None
        except DomainError as e:
            raise ParseError(str(e), sc.offset + start, sc.line) from None

    def _poly_list(self, sc: _Scanner, ring, open_: str = "(", close: str = ")") -> list:
        sc.expect(open_)
        out = []
        if sc.accept(close):
            return out
        while True:
            text, start = sc.raw_until("," + close)
            if not text:
                sc.error("empty entry")
            out.append(self._poly(sc, ring, text, start))
            if sc.accept(close):
                return out
            sc.expect(",")

    def _matrix(self, sc: _Scanner, ring) -> list:
        sc.expect("[")
        rows = []
        while True:
            rows.append(self._poly_list(sc, ring, "[", "]"))
            if sc.accept("]"):
                break
            sc.expect(",")
        if len({len(r) for r in rows}) != 1:
            sc.error("matrix rows have different lengths")
        return rows

    @staticmethod
    def _matching(sc: _Scanner, start: int) -> int:
        depth = 0
        for i in range(start, len(sc.s)):
            if sc.s[i] in "([":
                depth += 1
            elif sc.s[i] in ")]":
                depth -= 1
                if depth == 0:
                    return i
        sc.error("unbalanced brackets", start)

    def _default_ring(self, sc) -> QuotientRing:
        if not self.script.rings:
            sc.error("no ring declared yet")
        return self.script.rings[-1]

    # -- expressions
    def ring_expr(self, sc: _Scanner) -> QuotientRing:
        sc.ws()
        fld = self.default_field
        if not sc.peek("["):
            fstart = sc.i
            m = re.compile(r"GF\(\d+\)|Fp:\d+|F\d+|QQ|Q").match(sc.s, sc.i)
            if not m:
                sc.error("expected a coefficient field (QQ, GF(p), Fp:p)")
            try:
                fld = field_from_spec(m.group())
            except DomainError as e:
                sc.error(str(e), fstart)
            sc.i = m.end()
        sc.expect("[")
        names = []
        while True:
            names.append(sc.ident())
            if sc.accept("]"):
                break
            sc.expect(",")
        order = self.default_order
        rel_texts = []
        if sc.accept("/"):
            sc.expect("(")
            while True:
                text, start = sc.raw_until(",)")
                rel_texts.append((text, start))
                if sc.accept(")"):
                    break
                sc.expect(",")
        if sc.accept("order"):
            ostart = sc.i
            order = sc.ident()
            if order not in ("grevlex", "lex", "grlex"):
                sc.error(f"unknown monomial order {order!r}", ostart)
        try:
            R = QuotientRing.polynomial(names, fld, order)
        except DomainError as e:
            sc.error(str(e))
        rels = [self._poly(sc, R, t, s) for t, s in rel_texts]
        return QuotientRing(R.base, rels)

    def ideal_expr(self, sc: _Scanner, ring: QuotientRing | None) -> IdealSpec:
        sc.ws()
        if not sc.peek("("):
            at = sc.i
            return self._lookup(sc, sc.ident(), ("ideal", "seq"), at)
        gstart = sc.i
        close = self._matching(sc, gstart)
        after = _Scanner(sc.s, sc.line, sc.offset)
        after.i = close + 1
        target = ring
        if after.accept("over"):
            at = after.i
            target = self._ring_named(after, after.ident(), at)
        if target is None:
            target = self._default_ring(sc)
        gens = self._poly_list(sc, target)
        if sc.accept("over"):
            sc.ident()
        if not gens:
            sc.error("an ideal needs at least one generator", gstart)
        return IdealSpec(target, gens)

    def module_term(self, sc: _Scanner) -> FpModule:
        at = sc.i
        name = sc.ident()
        obj = self.script.objects.get(name)
        if obj is None:
            sc.error(f"unknown identifier {name!r}", at)
        kind, value = obj
        if kind == "module":
            return value
        if kind != "ring":
            sc.error(f"{name!r} is a {kind}, expected a ring or module", at)
        A = value
        if sc.accept("^"):
            n = sc.integer()
            if n < 0:
                sc.error("negative rank")
            if sc.accept("/"):
                sc.expect("<")
                rows = []
                while True:
                    rows.append(self._poly_list(sc, A))
                    if sc.accept(">"):
                        break
                    sc.expect(",")
                for r in rows:
                    if len(r) != n:
                        sc.error(f"relation has {len(r)} entries, expected {n}")
                return FpModule.from_rows(A, n, rows)
            return FpModule.free(A, n)
        if sc.accept("/"):
            return FpModule.cyclic(A, self._poly_list(sc, A))
        return FpModule.free(A, 1)

    def module_expr(self, sc: _Scanner) -> FpModule:
        parts = [self.module_term(sc)]
        while sc.accept("++"):
            parts.append(self.module_term(sc))
        if len(parts) == 1:
            return parts[0]
        try:
            return direct_sum(*parts)
        except DomainError as e:
            sc.error(str(e))

    def complex_expr(self, sc: _Scanner) -> ModuleComplex:
        sc.ws()
        at = sc.i
        name = sc.ident()
        try:
            if name == "koszul" and sc.peek("("):
                sc.expect("(")
                a = self.ideal_expr(sc, None)
                j = sc.integer() if sc.accept(",") else 1
                sc.expect(")")
                if j < 1:
                    sc.error("Koszul power must be at least 1")
                return koszul_complex(a, j)
            if name == "dual" and sc.peek("("):
                sc.expect("(")
                C = self.complex_expr(sc)
                sc.expect(")")
                return dual(C)
            if name == "shift" and sc.peek("("):
                sc.expect("(")
                C = self.complex_expr(sc)
                sc.expect(",")
                n = sc.integer()
                sc.expect(")")
                return shift(C, n)
            if name == "tensor" and sc.peek("("):
                sc.expect("(")
                C = self.complex_expr(sc)
                sc.expect(",")
                D = self.complex_expr(sc)
                sc.expect(")")
                return tensor_complexes(C, D)
            if name == "free" and sc.peek("("):
                sc.expect("(")
                M = self.module_expr(sc)
                deg = sc.integer() if sc.accept(",") else 0
                sc.expect(")")
                if M.relations:
                    sc.error("free(...) needs a free module")
                return FreeComplex.concentrated(M.ring, M.rank, deg)
            if name == "chain" and sc.peek("("):
                sc.expect("(")
                rat = sc.i
                A = self._ring_named(sc, sc.ident(), rat)
                sc.expect(",")
                lo = sc.integer()
                mats = []
                while sc.accept(","):
                    mats.append(self._matrix(sc, A))
                sc.expect(")")
                if not mats:
                    sc.error("chain(...) needs at least one matrix")
                ranks = [len(mats[0][0])] + [len(m) for m in mats]
                for k in range(1, len(mats)):
                    if len(mats[k][0]) != len(mats[k - 1]):
                        sc.error(f"matrix {k + 1} does not compose with matrix {k}")
                return FreeComplex(A, lo, ranks, mats)
        except DomainError as e:
            sc.error(str(e), at)
        obj = self.script.objects.get(name)
        if obj is None:
            sc.error(f"unknown identifier {name!r}", at)
        kind, value = obj
        if kind == "complex":
            return value
        sc.error(f"{name!r} is a {kind}, expected a complex", at)

    def map_expr(self, sc: _Scanner) -> ModuleMap:
        sc.ws()
        at = sc.i
        name = sc.ident()
        if name == "hom" and sc.peek("("):
            sc.expect("(")
            S = self.module_expr(sc)
            sc.expect(",")
            T = self.module_expr(sc)
            sc.expect(",")
            m = self._matrix(sc, T.ring)
            sc.expect(")")
            try:
                return ModuleMap.from_matrix(S, T, m)
            except DomainError as e:
                sc.error(str(e), at)
        return self._lookup(sc, name, ("map",), at)

    def element_expr(self, sc: _Scanner, ring, rank: int) -> FreeVector:
        sc.ws()
        start = sc.i
        if sc.peek("("):
            polys = self._poly_list(sc, ring)
        else:
            text, s = sc.raw_until(" ")
            polys = [self._poly(sc, ring, text, s)]
        if len(polys) != rank:
            sc.error(f"element has {len(polys)} components, expected {rank}", start)
        return FreeVector.from_polys(ring.base, polys)

    # -- statements
    def declare(self, sc: _Scanner, kind: str):
        at = sc.i
        name = sc.ident()
        if name in self.script.objects:
            sc.error(f"{name!r} is already declared", at)
        if name in COMMANDS or name in ("ring", "ideal", "seq", "module", "complex", "map"):
            sc.error(f"{name!r} is a reserved word", at)
        sc.expect("=")
        if kind == "ring":
            value = self.ring_expr(sc)
            self.script.rings.append(value)
        elif kind in ("ideal", "seq"):
            value = self.ideal_expr(sc, None)
        elif kind == "module":
            value = self.module_expr(sc)
        elif kind == "complex":
            value = self.complex_expr(sc)
        else:
            value = self.map_expr(sc)
        if not sc.at_end():
            sc.error("unexpected text after declaration")
        self.script.objects[name] = (kind, value)

    def _split_args(self, text: str, offset: int, line: int) -> list:
        """``(key or None, value text, column)`` triples, split at depth-0 whitespace."""
        out = []
        i = 0
        depth = 0
        start = 0
        pieces = []
        while i <= len(text):
            c = text[i] if i < len(text) else " "
            if c in "([<":
                depth += 1
            elif c in ")]>":
                depth -= 1
            if c.isspace() and depth <= 0:
                if i > start:
                    pieces.append((text[start:i], start))
                start = i + 1
            i += 1
        for piece, col in pieces:
            m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)=(.*)$", piece, re.S)
            if m:
                out.append((m.group(1), m.group(2), col + len(m.group(1)) + 1))
            else:
                out.append((None, piece, col))
        del offset, line
        return out

    def command(self, sc: _Scanner, name: str):
        params = COMMANDS[name]
        rest = sc.s[sc.i:]
        base_col = sc.offset + sc.i
        raw = {}
        positional = 0
        for key, value, col in self._split_args(rest, base_col, sc.line):
            if key is None:
                if positional >= len(params):
                    raise ParseError("too many positional arguments", base_col + col, sc.line)
                key = params[positional]
                positional += 1
            if key not in params:
                raise ParseError(f"unknown parameter {key!r} for {name}", base_col + col - len(key) - 1, sc.line)
            if key in raw:
                raise ParseError(f"parameter {key!r} given twice", base_col + col, sc.line)
            raw[key] = (value, base_col + col)
        for req in REQUIRED.get(name, []):
            if req not in raw:
                raise ParseError(f"{name} needs {req}=...", sc.offset + sc.i, sc.line)
        args, echo = {}, {}

        def sub(key):
            value, col = raw[key]
            return _Scanner(value, sc.line, col)

        def finish(s2):
            if not s2.at_end():
                s2.error("unexpected text in argument")

        context = None
        for key in ("M", "P", "phi"):
            if key in raw:
                s2 = sub(key)
                if key == "phi":
                    obj = self.map_expr(s2)
                elif name in ("derived-complete", "nakayama-derived", "torsion"):
                    obj = self._module_or_complex(s2)
                else:
                    obj = self.module_expr(s2)
                finish(s2)
                args[key] = obj
                echo[key] = raw[key][0]
                context = obj.target.ring if key == "phi" else obj.ring
        for key in ("a", "b"):
            if key in raw:
                s2 = sub(key)
                args[key] = self.ideal_expr(s2, context)
                finish(s2)
                echo[key] = str(args[key])
                context = context or args[key].ring
        if "a" in params and "a" not in args:
            ideals = [v for k, v in self.script.objects.values() if k in ("ideal", "seq") and (context is None or v.ring == context)]
            if not ideals:
                raise ParseError(f"{name} needs an ideal: pass a=... or declare one", sc.offset + sc.i, sc.line)
            args["a"] = ideals[-1]
            echo["a"] = str(ideals[-1])
        ring = args["a"].ring
        for key in params:
            if key not in raw or key in args:
                continue
            s2 = sub(key)
            if key in INT_PARAMS:
                args[key] = s2.integer()
            elif key in BOOL_PARAMS:
                at = s2.i
                word = s2.ident()
                if word not in ("true", "false", "yes", "no"):
                    s2.error("expected true or false", at)
                args[key] = word in ("true", "yes")
            elif key == "vars":
                if s2.accept("("):
                    names = [s2.ident()]
                    while s2.accept(","):
                        names.append(s2.ident())
                    s2.expect(")")
                else:
                    names = [s2.ident()]
                args[key] = names
            elif key == "n":
                phi = args["phi"]
                args[key] = self.element_expr(s2, phi.target.ring, phi.target.rank)
            elif key == "candidates":
                M = args["M"]
                s2.expect("[")
                cands = []
                if not s2.accept("]"):
                    while True:
                        cands.append(self.element_expr(s2, M.ring, M.rank))
                        if s2.accept("]"):
                            break
                        s2.expect(",")
                args[key] = cands
            finish(s2)
            echo[key] = raw[key][0]
        del ring
        self._count += 1
        self.script.commands.append(Command(f"c{self._count}", sc.line, name, args, echo))

    def _module_or_complex(self, sc: _Scanner):
        sc.ws()
        m = IDENT.match(sc.s, sc.i)
        if m:
            obj = self.script.objects.get(m.group())
            word = m.group()
            if (obj and obj[0] == "complex") or (word in ("koszul", "dual", "shift", "tensor", "free", "chain") and obj is None):
                return self.complex_expr(sc)
        return self.module_expr(sc)

    def parse_line(self, text: str, lineno: int):
        body = text.split("#", 1)[0]
        if not body.strip():
            return
        sc = _Scanner(body, lineno)
        at = sc.i
        sc.ws()
        at = sc.i
        m = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*").match(body, sc.i)
        if not m:
            sc.error("expected a declaration or command", at)
        word = m.group()
        sc.i = m.end()
        if word in ("ring", "ideal", "seq", "module", "complex", "map"):
            self.declare(sc, word)
        elif word in COMMANDS:
            self.command(sc, word)
        else:
            sc.error(f"unknown statement {word!r}", at)

    def parse(self, text: str) -> Script:
        for lineno, line in enumerate(text.splitlines(), start=1):
            self.parse_line(line, lineno)
        return self.script


def parse_script(text: str, default_field=QQ, default_order: str = "grevlex") -> Script:
    return SessionParser(default_field, default_order).parse(text)
