"""
Workload sets: the bundled reference GEMM layers, CSV ingestion and a seeded
random generator.

CSV format: a ``name,M,K,N`` header, one workload per row, integer dims,
UTF-8, ``#`` lines ignored.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .model import Workload

CSV_HEADER = ("name", "M", "K", "N")

# (name, M, K, N)
TABLE1: tuple[tuple[str, int, int, int], ...] = (
    ("RN0", 64, 12100, 147),
    ("RN1", 512, 784, 128),
    ("GNMT0", 128, 4096, 2048),
    ("GNMT1", 320, 4096, 3072),
    ("DB0", 1024, 50000, 16),
    ("DB1", 35, 2560, 4096),
    ("TF0", 31999, 84, 1024),
    ("TF1", 84, 4096, 1024),
)


class WorkloadFormatError(ValueError):
    pass


@dataclass(frozen=True)
class WorkloadSet:
    entries: tuple[Workload, ...]
    source: str = "builtin"

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for w in self.entries:
            if w.name in seen:
                raise WorkloadFormatError(f"duplicate workload name {w.name!r} in {self.source}")
            seen.add(w.name)

    def __iter__(self) -> Iterator[Workload]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, name: str) -> Workload:
        for w in self.entries:
            if w.name == name:
                return w
        raise KeyError(name)

    def names(self) -> list[str]:
        return [w.name for w in self.entries]


def builtin_table1() -> WorkloadSet:
    return WorkloadSet(tuple(Workload(*row) for row in TABLE1), source="builtin")


def dumps_csv(workloads: WorkloadSet) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for w in workloads:
        writer.writerow((w.name, w.m, w.k, w.n))
    return buf.getvalue()


def save_csv(workloads: WorkloadSet, path: str | Path) -> None:
    Path(path).write_text(dumps_csv(workloads), encoding="utf-8")


def loads_csv(text: str, source: str = "<string>") -> WorkloadSet:
    entries: list[Workload] = []
    names: dict[str, int] = {}
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        row = [cell.strip() for cell in next(csv.reader([stripped]))]
        if not header_seen:
            header_seen = True
            if row and row[0].lower() == "name":
                if [c.lower() for c in row] != [c.lower() for c in CSV_HEADER]:
                    raise WorkloadFormatError(f"{source}:{lineno}: header must be {','.join(CSV_HEADER)}")
                continue
        if len(row) != 4:
            raise WorkloadFormatError(f"{source}:{lineno}: expected 4 fields (name,M,K,N), got {len(row)}")
        name = row[0]
        if not name:
            raise WorkloadFormatError(f"{source}:{lineno}: empty workload name")
        try:
            m, k, n = (int(c) for c in row[1:])
        except ValueError:
            raise WorkloadFormatError(f"{source}:{lineno}: dimensions must be integers: {row[1:]}") from None
        if min(m, k, n) < 1:
            raise WorkloadFormatError(f"{source}:{lineno}: dimensions must be positive, got M={m} K={k} N={n}")
        if name in names:
            raise WorkloadFormatError(
                f"{source}:{lineno}: duplicate workload name {name!r} (first seen on line {names[name]})"
            )
        names[name] = lineno
        entries.append(Workload(name, m, k, n))
    return WorkloadSet(tuple(entries), source=source)


def load_csv(path: str | Path) -> WorkloadSet:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"workload file not found: {path}")
    return loads_csv(path.read_text(encoding="utf-8"), source=str(path))


@dataclass(frozen=True)
class WorkloadRanges:
    """Inclusive log-uniform sampling ranges for random workloads."""

    m: tuple[int, int] = (32, 2048)
    k: tuple[int, int] = (128, 16384)
    n: tuple[int, int] = (32, 2048)

    def __post_init__(self):
        for dim in ("m", "k", "n"):
            lo, hi = getattr(self, dim)
            if lo < 1 or hi < lo:
                raise ValueError(f"invalid range for {dim}: [{lo}, {hi}]")


def _log_uniform(rng: np.random.Generator, bounds: tuple[int, int], size: int) -> np.ndarray:
    lo, hi = bounds
    draws = np.exp(rng.uniform(math.log(lo), math.log(hi), size=size))
    return np.clip(np.rint(draws), lo, hi).astype(np.int64)


def generate_random(n: int, ranges: WorkloadRanges | None = None, seed: int = 0) -> WorkloadSet:
    if n < 1:
        raise ValueError(f"need at least one workload, got n={n}")
    ranges = ranges or WorkloadRanges()
    rng = np.random.default_rng(seed)
    ms = _log_uniform(rng, ranges.m, n)
    ks = _log_uniform(rng, ranges.k, n)
    ns = _log_uniform(rng, ranges.n, n)
    width = len(str(n - 1))
    entries = tuple(
        Workload(f"rand{i:0{width}d}", int(m), int(k), int(nn))
        for i, (m, k, nn) in enumerate(zip(ms, ks, ns))
    )
    return WorkloadSet(entries, source=f"random({seed})")
