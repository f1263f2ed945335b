"""Collects one PASS/FAIL line per acceptance criterion for the summary."""

LINES = []


def record(number, name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({name}): {detail}"
    LINES.append(line)
    print(line)
    return ok
