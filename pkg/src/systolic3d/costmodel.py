"""
Silicon-area model for planar, TSV-stacked and monolithic (MIV) arrays.

Vertical links are provisioned worst-case: every MAC gets its own link
array to the MAC directly below it. The link area of each inter-tier gap is
booked on the upper tier of the pair, so the bottom tier carries none.

The default constants are placeholders, not measured values. Pass real
ones through :func:`load_tech_params`.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum
from pathlib import Path

from .model import ArrayShape, Workload
from .optimizer import Budget, optimize_shape


class Link(str, Enum):
    NONE = "none"
    TSV = "tsv"
    MIV = "miv"


@dataclass(frozen=True)
class TechParams:
    mac_area: float = 250.0  # um^2 per MAC cell
    tsv_array_area: float = 800.0  # um^2 per link array, keep-out zone included
    miv_array_area: float = 2.0  # um^2 per link array
    fixed_overhead_3d: float = 0.02  # fractional logic overhead per stacked tier

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be >= 0, got {getattr(self, f.name)}")
        if self.miv_array_area > self.tsv_array_area:
            raise ValueError("miv_array_area must not exceed tsv_array_area")

    def link_area(self, link: Link) -> float:
        return {Link.NONE: 0.0, Link.TSV: self.tsv_array_area, Link.MIV: self.miv_array_area}[link]


def load_tech_params(path: str | Path) -> TechParams:
    """Read ``key = value`` lines (``#`` comments). Every field is required."""
    path = Path(path)
    known = {f.name for f in fields(TechParams)}
    values: dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = float(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: {key} is not a number: {value!r}") from None
    missing = sorted(known - values.keys())
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(missing)}")
    return TechParams(**values)


@dataclass(frozen=True)
class AreaReport:
    footprint: float
    total_silicon: float
    perf_per_area_vs_2d: float | None = None


def _check_link(tiers: int, link: Link) -> None:
    if tiers == 1 and link is not Link.NONE:
        raise ValueError("a single-tier array has no vertical links (use link='none')")
    if tiers > 1 and link is Link.NONE:
        raise ValueError(f"a {tiers}-tier stack needs link='tsv' or 'miv'")


def tier_areas(macs_per_tier: int, tiers: int, link: Link | str, tech: TechParams) -> list[float]:
    """Area of every tier, top first; the bottom tier has no downward links."""
    link = Link(link)
    _check_link(tiers, link)
    overhead = 1.0 + (tech.fixed_overhead_3d if tiers > 1 else 0.0)
    upper = macs_per_tier * (tech.mac_area + tech.link_area(link)) * overhead
    bottom = macs_per_tier * tech.mac_area * overhead
    return [upper] * (tiers - 1) + [bottom]


def area(shape: ArrayShape, link: Link | str, tech: TechParams) -> AreaReport:
    per_tier = tier_areas(shape.rows * shape.cols, shape.tiers, link, tech)
    return AreaReport(footprint=max(per_tier), total_silicon=sum(per_tier))


def perf_per_area(w: Workload, budget: Budget, tiers: int, link: Link | str, tech: TechParams) -> AreaReport:
    """Throughput per silicon area of the stacked design, relative to the planar one.

    Both designs are charged for the whole MAC budget, spread evenly over the
    tiers, rather than only for the cells the optimized shape keeps busy. With
    zero link area and overhead the areas cancel and the ratio is the speedup.
    """
    link = Link(link)
    _check_link(tiers, link)
    point = optimize_shape(budget, tiers, w)
    base = optimize_shape(budget, 1, w)
    overhead = 1.0 + (tech.fixed_overhead_3d if tiers > 1 else 0.0)
    link_share = tech.link_area(link) * (tiers - 1) / tiers
    stacked = budget.macs * (tech.mac_area + link_share) * overhead
    planar = budget.macs * tech.mac_area
    footprint = budget.macs / tiers * (tech.mac_area + tech.link_area(link)) * overhead
    ratio = (base.cycles * planar) / (point.cycles * stacked)
    return AreaReport(footprint=footprint, total_silicon=stacked, perf_per_area_vs_2d=ratio)
