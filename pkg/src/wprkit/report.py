"""Executing parsed session scripts, the JSON report, and ``explain``."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .adic import CompletionTower, adic_generators_check, adically_flat_check, nakayama_lift, torsion_submodule
from .complexes import ModuleComplex
from .derived import (
    completion_koszul_compare,
    derived_completion,
    derived_nakayama_check,
    derived_torsion,
    flat_base_change_wpr,
    is_derived_torsion,
    mgm_roundtrip,
    wpr_check,
)
from .errors import DomainError, RefusedError, WprkitError
from .koszul import dual_koszul, koszul_complex
from .modules import FpModule, vector_space_dim
from .session import Command, Script
from .towers import INCONCLUSIVE, Evidence, module_to_json, ring_from_json, ring_to_json

SCHEMA_VERSION = "1.0"

OK, VIOLATION, INCONCLUSIVE_STATUS, REFUSED, ERROR = "ok", "violation", "inconclusive", "refused", "error"
TIMING_KEYS = ("timing_ms",)


def load_schema() -> dict:
    return json.loads(resources.files("wprkit").joinpath("report_schema.json").read_text())


# ---------------------------------------------------------------------------
# command handlers: each returns (status, verdict, result dict)


def _cohomology_json(C: ModuleComplex) -> dict:
    out = {}
    for n in C.degrees():
        H = C.cohomology(n)
        out[str(n)] = {"module": module_to_json(H), "dim": vector_space_dim(H), "zero": H.is_zero()}
    return out


def _wpr(args, J):
    a = args["a"]
    rep = wpr_check(a.ring, a, args.get("J", J))
    status = OK if rep.certified else INCONCLUSIVE_STATUS
    return status, rep.verdict, rep.to_json()


def _koszul(args, J):
    a = args["a"]
    j = args.get("j", 1)
    if j < 1:
        raise DomainError("Koszul power must be at least 1")
    C = dual_koszul(a, j) if args.get("dual") else koszul_complex(a, j)
    return OK, "computed", {"sequence": str(a), "power": j, "dual": bool(args.get("dual")), "complex": C.to_json(), "cohomology": _cohomology_json(C)}


def _complete(args, J):
    M, a = args["M"], args["a"]
    kmax = args.get("kmax", J)
    T = CompletionTower(M, a, kmax)
    cert = T.stabilization()
    result = {
        "module": module_to_json(M),
        "ideal": str(a),
        "kmax": kmax,
        "levels": [module_to_json(T.tower.level(k)) for k in range(kmax + 1)],
        "dims": T.dims(),
        "surjective_transitions": T.surjective_transitions(),
        "stabilization": cert.to_json(),
    }
    verdict = "levels computed"
    if "candidates" in args:
        g = adic_generators_check(T, args["candidates"])
        result["generators"] = {"verdict": g.verdict, "missing": g.missing}
        verdict = "generates" if g else "does not generate"
    return OK, verdict, result


def _lift(args, J):
    phi, n, a = args["phi"], args["n"], args["a"]
    k = args.get("k", J)
    res = nakayama_lift(phi, n, k, a)
    d = res.to_json()
    d["ideal"] = str(a)
    d["target_element"] = str(n)
    d["ring"] = ring_to_json(phi.target.ring)
    return OK, "lifted", d


def _flat(args, J):
    P, a = args["P"], args["a"]
    rep = adically_flat_check(P, a, args.get("kmax", J), args.get("tor_depth"))
    return (OK if rep.verdict == "consistent" else VIOLATION), rep.verdict, rep.to_json()


def _torsion(args, J):
    M, a = args["M"], args["a"]
    bound = args.get("bound", J)
    if isinstance(M, ModuleComplex):
        v = is_derived_torsion(M, a, bound)
        return (INCONCLUSIVE_STATUS if v.verdict == INCONCLUSIVE else OK), v.verdict, v.to_json()
    t = torsion_submodule(M, a, bound)
    d = {"certificate": t.certificate.to_json(), "module": module_to_json(t.module), "stable_index": t.index, "whole": t.whole, "zero": t.zero}
    if not t.certified:
        return INCONCLUSIVE_STATUS, INCONCLUSIVE, d
    verdict = "torsion" if t.whole else ("torsion-free" if t.zero else "proper torsion submodule")
    return OK, verdict, d


def _derived_complete(args, J):
    M, a = args["M"], args["a"]
    J = args.get("J", J)
    if args.get("roundtrip"):
        if not isinstance(M, FpModule):
            raise DomainError("roundtrip needs a module")
        r = mgm_roundtrip(M, a, J)
        status = {"consistent": OK, "mismatch": VIOLATION}.get(r.verdict, INCONCLUSIVE_STATUS)
        return status, r.verdict, r.to_json()
    v = derived_completion(M, a, J)
    return (OK if v.certified else INCONCLUSIVE_STATUS), ("certified" if v.certified else INCONCLUSIVE), v.to_json()


def _derived_torsion(args, J):
    M, a = args["M"], args["a"]
    v = derived_torsion(M, a, args.get("J", J))
    return (OK if v.certified else INCONCLUSIVE_STATUS), ("certified" if v.certified else INCONCLUSIVE), v.to_json()


def _compare(args, J):
    a, b = args["a"], args["b"]
    if a.ring != b.ring:
        raise DomainError("a and b live in different rings")
    r = completion_koszul_compare(a.ring, a, b, args.get("kmax", J))
    return (INCONCLUSIVE_STATUS if r.verdict == INCONCLUSIVE else OK), r.verdict, r.to_json()


def _nakayama(args, J):
    P, a = args["P"], args["a"]
    if isinstance(P, FpModule):
        from .complexes import module_complex

        P = module_complex(P, 0)
    r = derived_nakayama_check(P, a, args["r"])
    status = {"consistent": OK, "violated": VIOLATION}.get(r.verdict, INCONCLUSIVE_STATUS)
    return status, r.verdict, r.to_json()


def _base_change(args, J):
    a = args["a"]
    clash = set(args["vars"]) & set(a.ring.names)
    if clash:
        raise DomainError(f"variables already present: {sorted(clash)}")
    r = flat_base_change_wpr(a.ring, a, args["vars"], args.get("J", J))
    status = {"preserved": OK, "not preserved": VIOLATION}.get(r.verdict, INCONCLUSIVE_STATUS)
    return status, r.verdict, r.to_json()


HANDLERS = {
    "wpr": _wpr,
    "koszul": _koszul,
    "complete": _complete,
    "lift": _lift,
    "flat": _flat,
    "torsion": _torsion,
    "derived-complete": _derived_complete,
    "derived-torsion": _derived_torsion,
    "compare-completion": _compare,
    "nakayama-derived": _nakayama,
    "base-change": _base_change,
}


# ---------------------------------------------------------------------------
# report


@dataclass
class Report:
    commands: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @property
    def exit_code(self) -> int:
        statuses = {c["status"] for c in self.commands}
        if ERROR in statuses:
            return 64
        if VIOLATION in statuses or REFUSED in statuses:
            return 1
        if INCONCLUSIVE_STATUS in statuses:
            return 2
        return 0

    def summary(self) -> dict:
        counts = {}
        for c in self.commands:
            counts[c["status"]] = counts.get(c["status"], 0) + 1
        return {"commands": len(self.commands), "statuses": dict(sorted(counts.items())), "exit_code": self.exit_code}

    def to_json(self, timings: bool = True) -> dict:
        cmds = self.commands if timings else [{k: v for k, v in c.items() if k not in TIMING_KEYS} for c in self.commands]
        return {"schema_version": self.schema_version, "commands": cmds, "summary": self.summary()}

    def dumps(self, timings: bool = True) -> str:
        return json.dumps(self.to_json(timings), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> Report:
        return cls(list(d.get("commands", [])), d.get("schema_version", SCHEMA_VERSION))

    @classmethod
    def loads(cls, text: str) -> Report:
        return cls.from_json(json.loads(text))

    def command(self, cid: str) -> dict:
        for c in self.commands:
            if c["id"] == cid:
                return c
        raise KeyError(f"no command with id {cid!r}")

    def human(self) -> str:
        lines = []
        for c in self.commands:
            lines.append(f"[{c['id']}] line {c['line']}: {c['command']} -> {c['status']} ({c['verdict']})")
            if "message" in c:
                lines.append(f"    {c['message']}")
        s = self.summary()
        lines.append(f"{s['commands']} command(s), exit code {s['exit_code']}")
        return "\n".join(lines)


def run_command(cmd: Command, level: int) -> dict:
    entry = {"id": cmd.id, "line": cmd.line, "command": cmd.name, "args": dict(sorted(cmd.echo.items()))}
    t0 = time.perf_counter()
    try:
        status, verdict, result = HANDLERS[cmd.name](cmd.args, level)
        entry.update(status=status, verdict=verdict, result=result)
    except RefusedError as e:
        entry.update(status=REFUSED, verdict="refused", message=str(e), result={"witness": e.witness})
    except WprkitError as e:
        entry.update(status=ERROR, verdict="error", message=str(e), result={})
    entry["timing_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    return entry



def run_script(script: Script, level: int = 4, threads: int = 1) -> Report:
    """Run every command; results are assembled in script order whatever the scheduling."""
    cmds = script.commands
    if threads > 1 and len(cmds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            entries = list(pool.map(lambda c: run_command(c, level), cmds))
    else:
        entries = [run_command(c, level) for c in cmds]
    return Report(entries)


# ---------------------------------------------------------------------------
# explain


def _arrow(e: dict) -> str:
    return f"level {e['from']}→{e['to']}"


_CLAIM_TEXT = {"zero": "composite = 0", "nonzero": "composite ≠ 0", "iso": "isomorphism", "not-iso": "not an isomorphism"}


def _explain_certificate(cert: dict, title: str, out: list):
    ring = ring_from_json(cert["ring"]) if cert.get("ring") else None
    label = f" [{cert['label']}]" if cert.get("label") else ""
    out.append(f"{title}: {cert['verdict']}{label}")
    if cert["verdict"] in ("pro-zero", "essentially-zero"):
        out.append(f"  uniform offset {cert['offset']}, checked up to level {cert['bound']}")
    elif cert["verdict"] == "stabilized":
        out.append(f"  stable from level {cert['stable_from']}, checked up to level {cert['bound']}")
    else:
        out.append(f"  no certificate within bound J = {cert['bound']}")
        if cert.get("smallest_unwitnessed") is not None:
            out.append(f"  smallest unwitnessed j0 = {cert['smallest_unwitnessed']}")
    for e in cert.get("evidence", []):
        mark = "unchecked"
        if ring is not None:
            mark = "verified" if Evidence.from_json(e).replay(ring) else "FAILED replay"
        out.append(f"  {_arrow(e)}: {_CLAIM_TEXT.get(e['claim'], e['claim'])} ({mark})")


def _walk_certificates(obj, path: str, out: list):
    if isinstance(obj, dict):
        if "evidence" in obj and "verdict" in obj and "kind" in obj:
            _explain_certificate(obj, path or "certificate", out)
            return
        for k in sorted(obj, key=str):
            _walk_certificates(obj[k], f"{path}.{k}" if path else str(k), out)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _walk_certificates(v, f"{path}[{i}]", out)


def _explain_lift(entry: dict, out: list):
    r = entry["result"]
    out.append(f"lift of {r['target_element']} to precision {r['precision']} modulo powers of {r['ideal']}")
    for i, (m, res, ok) in enumerate(zip(r["corrections"], r["residuals"], r["residual_checks"])):
        out.append(f"  m_{i} = {m}")
        out.append(f"  residual after m_{i}: {res} in a^{i + 1} N ({'verified' if ok else 'FAILED'})")
    out.append(f"  lift = {r['lift'][str(r['precision'])]}")


def explain(report: Report | dict, cid: str) -> str:
    if isinstance(report, dict):
        report = Report.from_json(report)
    entry = report.command(cid)
    out = [f"[{entry['id']}] line {entry['line']}: {entry['command']} {' '.join(f'{k}={v}' for k, v in entry['args'].items())}"]
    out.append(f"status {entry['status']}, verdict {entry['verdict']}")
    if "message" in entry:
        out.append(entry["message"])
    if entry["command"] == "lift" and entry["status"] == OK:
        _explain_lift(entry, out)
    else:
        _walk_certificates(entry.get("result", {}), "", out)
        if entry["command"] == "flat" and entry["result"].get("violation"):
            out.append(f"violation: {json.dumps(entry['result']['violation'], sort_keys=True)}")
    return "\n".join(out)
