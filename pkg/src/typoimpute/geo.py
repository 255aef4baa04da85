"""Great-circle geometry and neighbor queries over language coordinates.

Distances are spherical (haversine) with the IUGG mean Earth radius.
The index is a plain linear scan; language counts in typological
datasets are small enough that nothing faster is warranted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

__all__ = [
    "EARTH_RADIUS_KM",
    "GeoPoint",
    "NeighborIndex",
    "haversine_km",
    "within_radius",
    "nearest_with_predicate",
]

EARTH_RADIUS_KM = 6371.0088


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points in kilometres.

    The formula is evaluated symmetrically, so d(a, b) == d(b, a)
    exactly in floating point.
    """
    lat1 = math.radians(a.latitude)
    lat2 = math.radians(b.latitude)
    # abs() keeps the evaluation bit-identical under argument swap; the
    # half-angle sines are squared, so the sign never mattered anyway.
    dlat = math.radians(abs(b.latitude - a.latitude))
    dlon = math.radians(abs(b.longitude - a.longitude))
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    # Guard against rounding pushing h a hair above 1 near antipodes.
    h = min(1.0, h)
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(h))


class NeighborIndex:
    """Immutable list of (language code, position) supporting radius and
    nearest-neighbor queries by linear scan."""

    def __init__(self, points: Iterable[tuple[str, GeoPoint]]):
        self._points = list(points)
        codes = [code for code, _ in self._points]
        if len(codes) != len(set(codes)):
            raise ValueError("duplicate language codes in neighbor index")

    def __len__(self) -> int:
        return len(self._points)

    def points(self) -> list[tuple[str, GeoPoint]]:
        return list(self._points)


def within_radius(
    idx: NeighborIndex,
    center: GeoPoint,
    radius_km: float,
    exclude: Optional[str] = None,
) -> set[str]:
    """Codes of all points within ``radius_km`` of ``center`` (inclusive).

    ``exclude`` drops the query language's own code from the result.
    """
    if radius_km < 0:
        raise ValueError("radius must be nonnegative")
    result = set()
    for code, point in idx.points():
        if code == exclude:
            continue
        if haversine_km(center, point) <= radius_km:
            result.add(code)
    return result


def nearest_with_predicate(
    idx: NeighborIndex,
    center: GeoPoint,
    accept: Callable[[str], bool],
) -> Optional[tuple[str, float]]:
    """Closest accepted point, or None if the predicate rejects all.

    Distance ties break on the lexicographically smaller code.
    """
    best: Optional[tuple[float, str]] = None
    for code, point in idx.points():
        if not accept(code):
            continue
        d = haversine_km(center, point)
        if best is None or (d, code) < best:
            best = (d, code)
    if best is None:
        return None
    return best[1], best[0]
