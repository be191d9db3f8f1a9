"""Inverse and direct systems of modules, with replayable certificates.

A certificate never claims more than the checked levels show.  Absence of a
zero composite up to the bound gives ``inconclusive``, never a negative
verdict.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from typing import Callable

from .arith import MonomialOrder, field_from_spec
from .errors import DomainError, RefusedError
from .modules import FpModule, ModuleMap, find_inverse
from .rings import QuotientRing

PRO_ZERO = "pro-zero"
ESSENTIALLY_ZERO = "essentially-zero"
STABILIZED = "stabilized"
INCONCLUSIVE = "inconclusive"


class _System:
    kind = ""

    def __init__(self, level_fn: Callable, map_fn: Callable, start: int, stop: int, label: str = ""):
        if stop < start:
            raise DomainError("empty level range")
        self._level_fn = level_fn
        self._map_fn = map_fn
        self.start = start
        self.stop = stop
        self.label = label
        self._levels = {}
        self._maps = {}
        self._composites = {}
        self._lock = threading.RLock()

    @classmethod
    def from_lists(cls, levels: list, maps: list, start: int = 1, label: str = ""):
        """``levels[i]`` is level ``start + i``; ``maps[i]`` joins levels ``start+i`` and ``start+i+1``."""
        if len(maps) != len(levels) - 1:
            raise DomainError("need one map between each pair of adjacent levels")
        return cls(lambda j: levels[j - start], lambda j: maps[j - start], start, start + len(levels) - 1, label)

    def level(self, j: int) -> FpModule:
        if not self.start <= j <= self.stop:
            raise DomainError(f"level {j} outside {self.start}..{self.stop}")
        with self._lock:
            if j not in self._levels:
                self._levels[j] = self._level_fn(j)
            return self._levels[j]

    def levels(self) -> dict:
        return {j: self.level(j) for j in range(self.start, self.stop + 1)}

    def _adjacent(self, j: int) -> ModuleMap:
        if not self.start <= j < self.stop:
            raise DomainError(f"no map at level {j}")
        with self._lock:
            if j not in self._maps:
                self._maps[j] = self._map_fn(j)
            return self._maps[j]

    def __len__(self):
        return self.stop - self.start + 1


class ModuleTower(_System):
    """Inverse system ``T_start <- T_(start+1) <- ... <- T_stop``."""

    kind = "inverse"

    def transition(self, j: int) -> ModuleMap:
        """``T_(j+1) -> T_j``."""
        return self._adjacent(j)

    def composite(self, j1: int, j0: int) -> ModuleMap:
        """``T_j1 -> T_j0`` for ``j1 >= j0``."""
        if j1 < j0:
            raise DomainError("composite needs j1 >= j0")
        with self._lock:
            key = (j1, j0)
            if key not in self._composites:
                if j1 == j0:
                    f = ModuleMap.identity(self.level(j0))
                else:
                    f = self.composite(j1 - 1, j0).compose(self.transition(j1 - 1))
                self._composites[key] = f
            return self._composites[key]

    def restrict(self, start: int, stop: int) -> ModuleTower:
        return ModuleTower(self.level, self.transition, max(start, self.start), min(stop, self.stop), self.label)


class DirectSystem(_System):
    """Direct system ``T_start -> T_(start+1) -> ... -> T_stop``."""

    kind = "direct"

    def transition(self, j: int) -> ModuleMap:
        """``T_j -> T_(j+1)``."""
        return self._adjacent(j)

    def composite(self, j0: int, j1: int) -> ModuleMap:
        """``T_j0 -> T_j1`` for ``j1 >= j0``."""
        if j1 < j0:
            raise DomainError("composite needs j1 >= j0")
        with self._lock:
            key = (j0, j1)
            if key not in self._composites:
                if j1 == j0:
                    f = ModuleMap.identity(self.level(j0))
                else:
                    f = self.transition(j1 - 1).compose(self.composite(j0, j1 - 1))
                self._composites[key] = f
            return self._composites[key]


class ComplexTower:
    """Inverse system of complexes with chain-map transitions."""

    def __init__(self, level_fn: Callable, map_fn: Callable, start: int, stop: int, label: str = ""):
        self._level_fn = level_fn
        self._map_fn = map_fn
        self.start, self.stop, self.label = start, stop, label
        self._levels, self._maps = {}, {}
        self._lock = threading.RLock()

    def level(self, j):
        with self._lock:
            if j not in self._levels:
                self._levels[j] = self._level_fn(j)
            return self._levels[j]

    def transition(self, j):
        """Chain map from level ``j+1`` to level ``j``."""
        with self._lock:
            if j not in self._maps:
                self._maps[j] = self._map_fn(j)
            return self._maps[j]

    def cohomology_tower(self, i: int) -> ModuleTower:
        from .complexes import induced_map

        return ModuleTower(
            lambda j: self.level(j).cohomology(i),
            lambda j: induced_map(self.transition(j), i),
            self.start,
            self.stop,
            f"H^{i}({self.label})",
        )


# ---------------------------------------------------------------------------
# serialization of the data needed to replay evidence


def ring_to_json(ring: QuotientRing) -> dict:
    base = ring.base
    return {
        "variables": list(base.names),
        "field": str(base.field),
        "order": base.order.name,
        "priority": list(base.order.priority) if base.order.priority is not None else None,
        "relations": [str(p) for p in ring.relations.polys()],
    }


def ring_from_json(d: dict) -> QuotientRing:
    prio = d.get("priority")
    order = MonomialOrder(d["order"], tuple(prio) if prio is not None else None)
    return QuotientRing.from_strings(d["variables"], d["relations"], field_from_spec(d["field"]), order)


def module_to_json(M: FpModule) -> dict:
    return {"rank": M.rank, "relations": [[str(p) for p in r.components()] for r in M.relations]}


def module_from_json(d: dict, ring: QuotientRing) -> FpModule:
    return FpModule.from_rows(ring, d["rank"], d["relations"])


def map_from_json(matrix: list, source: FpModule, target: FpModule) -> ModuleMap:
    return ModuleMap.from_matrix(source, target, matrix, check=False)


@dataclass
class Evidence:
    source_level: int
    target_level: int
    claim: str  # "zero", "nonzero", "iso", "not-iso"
    source: dict
    target: dict
    matrix: list
    inverse: list | None = None

    def to_json(self) -> dict:
        d = {
            "from": self.source_level,
            "to": self.target_level,
            "claim": self.claim,
            "source": self.source,
            "target": self.target,
            "matrix": self.matrix,
        }
        if self.inverse is not None:
            d["inverse"] = self.inverse
        return d

    @classmethod
    def from_json(cls, d: dict) -> Evidence:
        return cls(d["from"], d["to"], d["claim"], d["source"], d["target"], d["matrix"], d.get("inverse"))

    def replay(self, ring: QuotientRing) -> bool:
        """Re-check the claim from the stored presentations and matrices alone."""
        S = module_from_json(self.source, ring)
        T = module_from_json(self.target, ring)
        f = map_from_json(self.matrix, S, T)
        if self.claim == "zero":
            return f.is_zero()
        if self.claim == "nonzero":
            return not f.is_zero()
        if self.claim == "iso":
            g = map_from_json(self.inverse, T, S)
            return g.compose(f).is_identity() and f.compose(g).is_identity()
        if self.claim == "not-iso":
            return find_inverse(f) is None
        return False


def _evidence(f: ModuleMap, src_level: int, tgt_level: int, claim: str, inverse: ModuleMap | None = None) -> Evidence:
    return Evidence(
        src_level,
        tgt_level,
        claim,
        module_to_json(f.source),
        module_to_json(f.target),
        f.matrix_strings(),
        inverse.matrix_strings() if inverse is not None else None,
    )


@dataclass
class Certificate:
    verdict: str
    kind: str
    start: int
    bound: int
    offset: int | None = None
    stable_from: int | None = None
    witnesses: dict = field(default_factory=dict)
    smallest_unwitnessed: int | None = None
    evidence: list = field(default_factory=list)
    stable_value: dict | None = None
    ring: dict | None = None
    label: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict != INCONCLUSIVE

    @property
    def is_zero_verdict(self) -> bool:
        return self.verdict in (PRO_ZERO, ESSENTIALLY_ZERO)

    def to_json(self) -> dict:
        d = {
            "verdict": self.verdict,
            "kind": self.kind,
            "label": self.label,
            "start": self.start,
            "bound": self.bound,
            "offset": self.offset,
            "stable_from": self.stable_from,
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
            "smallest_unwitnessed": self.smallest_unwitnessed,
            "evidence": [e.to_json() for e in self.evidence],
            "evidence_hash": self.evidence_hash(),
        }
        if self.stable_value is not None:
            d["stable_value"] = self.stable_value
        if self.ring is not None:
            d["ring"] = self.ring
        return d

    @classmethod
    def from_json(cls, d: dict) -> Certificate:
        return cls(
            d["verdict"], d["kind"], d["start"], d["bound"], d.get("offset"), d.get("stable_from"),
            {int(k): v for k, v in d.get("witnesses", {}).items()}, d.get("smallest_unwitnessed"),
            [Evidence.from_json(e) for e in d.get("evidence", [])], d.get("stable_value"), d.get("ring"), d.get("label", ""),
        )

    def evidence_hash(self) -> str:
        blob = json.dumps([e.to_json() for e in self.evidence], sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replay(self, ring: QuotientRing | None = None) -> bool:
        """Re-verify every stored claim and that the verdict follows from them."""
        ring = ring or (ring_from_json(self.ring) if self.ring else None)
        if ring is None:
            raise DomainError("no ring to replay against")
        if not all(e.replay(ring) for e in self.evidence):
            return False
        claims = {(e.source_level, e.target_level): e.claim for e in self.evidence}
        if self.verdict in (PRO_ZERO, ESSENTIALLY_ZERO):
            for j0, j1 in self.witnesses.items():
                key = (j1, j0) if self.kind == "inverse" else (j0, j1)
                if claims.get(key) != "zero":
                    return False
            if self.offset is None or self.bound - self.offset < self.start + 1:
                return False
            return all(
                j0 in self.witnesses and self.witnesses[j0] - j0 <= self.offset
                for j0 in range(self.start, self.bound - self.offset + 1)
            )
        if self.verdict == STABILIZED:
            for j in range(self.stable_from, self.bound):
                key = (j + 1, j) if self.kind == "inverse" else (j, j + 1)
                if claims.get(key) != "iso":
                    return False
            return True
        return True


# ---------------------------------------------------------------------------
# decisions


def _ring_of(T) -> QuotientRing:
    return T.level(T.start).ring


def _uniform_offset(witnesses: dict, start: int, J: int):
    # at least two source levels must be covered, so d <= J - start - 1
    for d in range(0, J - start):
        if all(j0 in witnesses and witnesses[j0] - j0 <= d for j0 in range(start, J - d + 1)):
            return d
    return None


def is_pro_zero_up_to(T, J: int | None = None) -> Certificate:
    """Search for zero composites out of every level up to ``J``.

    For each ``j0`` the least ``j1`` in ``[j0, J]`` with a zero composite is
    recorded (the checked nonzero composites are kept as evidence).  The
    verdict is pro-zero (essentially zero for direct systems) with the
    smallest uniform offset ``d`` such that every ``j0 <= J - d`` has a
    witness within ``d`` levels, where ``J - d`` must leave at least two
    source levels; otherwise inconclusive.
    """
    J = T.stop if J is None else min(J, T.stop)
    start = T.start
    witnesses = {}
    evidence = []
    for j0 in range(start, J + 1):
        for j1 in range(j0, J + 1):
            f = T.composite(j1, j0) if T.kind == "inverse" else T.composite(j0, j1)
            src, tgt = (j1, j0) if T.kind == "inverse" else (j0, j1)
            if f.is_zero():
                evidence.append(_evidence(f, src, tgt, "zero"))
                witnesses[j0] = j1
                break
            evidence.append(_evidence(f, src, tgt, "nonzero"))
    d = _uniform_offset(witnesses, start, J)
    zero_verdict = PRO_ZERO if T.kind == "inverse" else ESSENTIALLY_ZERO
    unwitnessed = [j for j in range(start, J + 1) if j not in witnesses]
    return Certificate(
        zero_verdict if d is not None else INCONCLUSIVE,
        T.kind,
        start,
        J,
        offset=d,
        witnesses=witnesses,
        smallest_unwitnessed=unwitnessed[0] if unwitnessed else None,
        evidence=evidence,
        ring=ring_to_json(_ring_of(T)),
        label=T.label,
    )


def stabilization(T, J: int | None = None) -> Certificate:
    """Smallest ``s`` such that every map between levels ``s..J`` has an explicit two-sided inverse."""
    J = T.stop if J is None else min(J, T.stop)
    if J - T.start < 1:
        raise DomainError("stabilization needs at least two levels")
    evidence = []
    s = J
    for j in range(J - 1, T.start - 1, -1):
        f = T.transition(j)
        g = find_inverse(f)
        src, tgt = (j + 1, j) if T.kind == "inverse" else (j, j + 1)
        if g is None:
            evidence.append(_evidence(f, src, tgt, "not-iso"))
            break
        evidence.append(_evidence(f, src, tgt, "iso", g))
        s = j
    evidence.reverse()
    if s >= J:
        return Certificate(INCONCLUSIVE, T.kind, T.start, J, evidence=evidence, ring=ring_to_json(_ring_of(T)), label=T.label)
    return Certificate(
        STABILIZED, T.kind, T.start, J, stable_from=s, evidence=evidence,
        stable_value=module_to_json(T.level(s)), ring=ring_to_json(_ring_of(T)), label=T.label,
    )


def certify(T, J: int | None = None) -> Certificate:
    """Pro-zero first, then stabilization, otherwise inconclusive (keeping both searches' evidence)."""
    c = is_pro_zero_up_to(T, J)
    if c.certified:
        return c
    J2 = T.stop if J is None else min(J, T.stop)
    if J2 - T.start >= 1:
        s = stabilization(T, J)
        if s.certified:
            return s
        c.evidence.extend(s.evidence)
    return c


def limit_under_certificate(T, c: Certificate) -> FpModule:
    """The stable module, or zero for a pro-zero (essentially zero) system."""
    if c.is_zero_verdict:
        return FpModule.zero(_ring_of(T))
    if c.verdict == STABILIZED:
        return T.level(c.stable_from)
    raise RefusedError(f"cannot materialize the limit of {T.label or 'a system'}: certificate is inconclusive up to {c.bound}")
