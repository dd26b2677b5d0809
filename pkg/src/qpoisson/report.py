"""Deterministic CSV / JSON writers with embedded config and content hash."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import numbers
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from gmpy2 import mpq

from . import __version__

TOOL = "qpoisson"


def fmt(x: Any) -> Any:
    """Render a value for output: exact rationals as ``p/r`` strings."""
    if isinstance(x, bool) or x is None:
        return x
    if type(x).__name__ == "mpq":
        return str(x)
    if isinstance(x, float):
        return repr(float(x))
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, numbers.Real):
        return repr(float(x))
    if hasattr(x, "encode") and not isinstance(x, (str, bytes)):
        return x.encode()
    if isinstance(x, dict):
        return {str(fmt(k)): fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [fmt(v) for v in x]
    return x


def canonical(obj: Any) -> str:
    return json.dumps(fmt(obj), sort_keys=True, separators=(",", ":"))


def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
        h.update(b"\0")
    return h.hexdigest()


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]], config: dict) -> str:
    body = io.StringIO()
    w = csv.writer(body, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    cfg = canonical(config)
    text = body.getvalue()
    head = f"# tool: {TOOL} {__version__}\n# config: {cfg}\n# sha256: {digest(cfg, text)}\n"
    return head + text


def write_csv(path: Path, header, rows, config: dict) -> str:
    text = csv_text(header, rows, config)
    Path(path).write_text(text)
    return digest(text)


def read_csv(path: Path) -> tuple[dict, list[dict]]:
    """Return (config, rows) from a file written by ``write_csv``."""
    lines = Path(path).read_text().splitlines()
    config = {}
    data = []
    for line in lines:
        if line.startswith("# config: "):
            config = json.loads(line[len("# config: "):])
        elif not line.startswith("#"):
            data.append(line)
    return config, list(csv.DictReader(data))


def manifest(config: dict, results: list) -> dict:
    body = {"tool_version": f"{TOOL} {__version__}", "config": fmt(config), "results": fmt(results)}
    body["hash"] = digest(canonical(body))
    return body


def write_json(path: Path, config: dict, results: list) -> str:
    text = json.dumps(manifest(config, results), sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text)
    return digest(text)


def parse_scalar(text: str, q) -> Any:
    """Parse a mass like ``1/2`` or ``0.25`` in the mode of *q*."""
    v = Fraction(text.strip())
    if q.is_exact:
        return mpq(v.numerator, v.denominator)
    return float(v)
