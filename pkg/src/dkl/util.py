"""Shared plumbing: capped parallel mapping, CSV emission, config files."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TextIO


def thread_budget() -> int:
    """Worker cap from DKL_THREADS; defaults to serial execution."""
    raw = os.environ.get("DKL_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order; parallel only when DKL_THREADS allows."""
    n = thread_budget()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(value) -> str:
    """Canonical CSV field: 17 significant digits, inf spelled out."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out: TextIO) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")


def parse_config_file(path: str) -> dict[str, str]:
    """line-based `key = value` pairs with # comments."""
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ValueError(f"{path}:{lineno}: expected `key = value`")
            key, _, val = stripped.partition("=")
            values[key.strip()] = val.strip()
    return values


def log_uniform(rng, lo: float, hi: float) -> float:
    """One draw spanning the decades between lo and hi."""
    return float(lo * (hi / lo) ** rng.random())
