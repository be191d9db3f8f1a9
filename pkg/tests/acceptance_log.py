"""Per-criterion PASS/FAIL lines collected while the acceptance suite runs."""

LINES = {}


def record(n: int, ok: bool, title: str, detail: str = "") -> str:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    LINES[n] = line
    print(line)
    return line
