from __future__ import annotations

LINES: list[str] = []


def record(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d} {title}: {detail}"
    LINES.append(line)
    print(line)
