"""Assemble and render verification reports."""
import json
import logging
import pathlib
from typing import List, Optional

import carverify.schemas as schemas

logger = logging.getLogger("carverify")


def make_report(checks: List[dict]) -> dict:
    """Return a validated ``Report`` for a list of ``Check`` records."""
    passed = sum(bool(check["passed"]) for check in checks)
    payload = {
        "checks": checks,
        "summary": {"total": len(checks), "passed": passed, "failed": len(checks) - passed},
    }
    return dict(schemas.Report().load(payload))


def exit_status(report: dict) -> int:
    """Return 0 if every check passed and 1 otherwise."""
    return 0 if report["summary"]["failed"] == 0 else 1


def _format_error(max_error: Optional[float]) -> str:
    return "null" if max_error is None else f"{max_error:.3e}"


def emit_report(report: dict, format: str = "json") -> str:
    """Render a report.

    ``json`` is a single compact document with keys in schema order. ``text`` has exactly
    one line per check, starting with ``PASS`` or ``FAIL``.

    Raises:
        ValueError: unknown format.

    """
    if format == "json":
        return json.dumps(schemas.Report().dump(report), separators=(",", ":"))
    if format == "text":
        lines = []
        for check in report["checks"]:
            line = (
                f"{'PASS' if check['passed'] else 'FAIL'} {check['suite']}/{check['name']} "
                f"dim={check['dim']} seed={check['seed']} max_error={_format_error(check['max_error'])} "
                f"elapsed_ms={check['elapsed_ms']:.1f}"
            )
            if "median_ns" in check:
                line += f" median_ns={check['median_ns']:.0f}"
            if "error" in check:
                line += f" error={check['error']!r}"
            lines.append(line)
        return "\n".join(lines)
    raise ValueError(f"Unknown report format `{format}`.")


def write_report(text: str, out: Optional[str] = None) -> None:
    """Write a rendered report to ``out`` or, if ``out`` is None, to stdout."""
    if out is None:
        print(text)
        return
    path = pathlib.Path(out)
    path.write_text(text + "\n")
    logger.info(f"Report written to `{path}`.")
