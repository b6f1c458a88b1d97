"""NDBC buoy ingestion and two-level K-means sea-state selection."""

from __future__ import annotations

import gzip
import json
import time
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# NDBC standard-meteorological missing-data sentinels.
_SENTINELS = {99.0, 999.0, 9999.0}


class NdbcFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Observation:
    timestamp: str
    Hs: float
    Tp: float
    station_id: str = ""


@dataclass
class ParseLedger:
    accepted: int = 0
    sentinel_count: int = 0
    missing_count: int = 0
    bad_row_count: int = 0


@dataclass
class ClusterSet:
    centers: np.ndarray          # shape (k, 2), columns (Tp, Hs)
    weights: np.ndarray          # member counts
    k: int
    collapsed: bool = False      # fewer distinct centers than requested
    inertia_history: list[float] = field(default_factory=list)
    station_counts: np.ndarray | None = None

    def to_json(self) -> str:
        doc = {
            "schema_version": 1,
            "k": self.k,
            "collapsed": self.collapsed,
            "sea_states": [
                {
                    "Tp": float(tp),
                    "Hs": float(hs),
                    "weight": int(wt),
                    **(
                        {"locations": int(self.station_counts[i])}
                        if self.station_counts is not None
                        else {}
                    ),
                }
                for i, ((tp, hs), wt) in enumerate(zip(self.centers, self.weights))
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)


def parse_ndbc(text: str, station_id: str = "") -> tuple[list[Observation], ParseLedger]:
    """Parse NDBC standard-meteorological text into (Hs, Tp) observations.

    Rows with sentinel or missing WVHT/DPD are dropped and counted in the
    ledger rather than raising.
    """
    ledger = ParseLedger()
    lines = text.splitlines()
    header = None
    data_start = 0
    for i, line in enumerate(lines):
        stripped = line.lstrip("#").split()
        if not stripped:
            continue
        first = stripped[0].upper()
        if first in ("YY", "YYYY", "#YY"):
            header = stripped
            data_start = i + 1
        elif line.startswith("#"):
            continue  # units row
        else:
            break
    if header is None:
        if not any(line.strip() for line in lines):
            return [], ledger
        raise NdbcFormatError(
            f"unrecognized header; first line: {lines[0][:80]!r}"
        )
    try:
        wvht_col = header.index("WVHT")
        dpd_col = header.index("DPD")
    except ValueError as exc:
        raise NdbcFormatError(f"header missing WVHT/DPD columns: {header}") from exc

    # Timestamp spans the leading date columns up to the first named field.
    n_date = min(
        i for i, name in enumerate(header) if name in ("WDIR", "WD", "WVHT")
    )

    observations = []
    for line in lines[data_start:]:
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) <= max(wvht_col, dpd_col):
            ledger.missing_count += 1
            continue
        try:
            hs = float(fields[wvht_col])
            tp = float(fields[dpd_col])
        except ValueError:
            ledger.bad_row_count += 1
            continue
        if hs in _SENTINELS or tp in _SENTINELS:
            ledger.sentinel_count += 1
            continue
        if not (hs > 0 and tp > 0) or not (np.isfinite(hs) and np.isfinite(tp)):
            ledger.bad_row_count += 1
            continue
        observations.append(
            Observation(
                timestamp=" ".join(fields[:n_date]),
                Hs=hs,
                Tp=tp,
                station_id=station_id,
            )
        )
        ledger.accepted += 1
    return observations, ledger


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator):
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    idx = int(rng.integers(n))
    centers[0] = points[idx]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            # No spread left: remaining seeds fall on duplicate points.
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = points[idx]
        d2 = np.minimum(d2, np.sum((points - centers[j]) ** 2, axis=1))
    return centers


def kmeans(points: np.ndarray, k: int, seed: int = 0, max_iter: int = 300) -> ClusterSet:
    """Seeded k-means++ with Lloyd iterations to an assignment fixpoint.

    Points are canonically sorted first so the result is independent of
    input ordering. Columns are (Hs, Tp) on input; centers are reported
    as (Tp, Hs) to match the sea-state table convention.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if len(points) < k:
        raise ValueError(f"need at least k={k} points, got {len(points)}")
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp_init(pts, k, rng)

    inertia_history: list[float] = []
    labels = np.full(len(pts), -1)
    for _ in range(max_iter):
        d2 = np.sum((pts[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        inertia_history.append(float(d2[np.arange(len(pts)), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = pts[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)

    weights = np.bincount(labels, minlength=k)
    keep = weights > 0
    collapsed = bool(np.any(~keep))
    centers = centers[keep]
    weights = weights[keep]
    return ClusterSet(
        centers=centers[:, ::-1].copy(),  # (Hs, Tp) -> (Tp, Hs)
        weights=weights,
        k=int(keep.sum()),
        collapsed=collapsed,
        inertia_history=inertia_history,
    )


def two_level_cluster(
    per_station: dict[str, list[Observation]],
    k1: int = 10,
    k2: int = 20,
    seed: int = 0,
) -> ClusterSet:
    """Per-station k-means, then k-means over the pooled station centers.

    Each final center is annotated with the number of distinct stations
    whose level-1 centers it absorbed.
    """
    if len(per_station) < 1:
        raise ValueError("need at least one station")
    level1_centers = []
    level1_station = []
    for station in sorted(per_station):
        obs = per_station[station]
        pts = np.array([[o.Hs, o.Tp] for o in obs])
        cs = kmeans(pts, k1, seed=seed)
        for tp, hs in cs.centers:
            level1_centers.append([hs, tp])
            level1_station.append(station)
    pooled = np.array(level1_centers)
    result = kmeans(pooled, k2, seed=seed)

    # Count contributing stations per final center via membership.
    d2 = np.sum(
        (pooled[:, None, :] - result.centers[None, :, ::-1]) ** 2, axis=2
    )
    labels = np.argmin(d2, axis=1)
    counts = np.zeros(result.k, dtype=int)
    for j in range(result.k):
        stations = {level1_station[i] for i in np.flatnonzero(labels == j)}
        counts[j] = len(stations)
    result.station_counts = counts
    return result


# --- Optional NDBC fetcher (local files remain the primary path) ---------

NDBC_URL = (
    "https://www.ndbc.noaa.gov/view_text_file.php"
    "?filename={station}h{year}.txt.gz&dir=data/historical/stdmet/"
)


def fetch_station_year(
    station: str, year: int, cache_dir: str | Path, retries: int = 3
) -> Path:
    """Download one historical stdmet archive, with retry and disk cache."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    target = cache_dir / f"{station}_{year}.txt"
    if target.exists():
        return target
    url = NDBC_URL.format(station=station, year=year)
    last_error: Exception | None = None
    for attempt in range(retries):
        try:
            with urllib.request.urlopen(url, timeout=60) as response:
                raw = response.read()
            try:
                raw = gzip.decompress(raw)
            except gzip.BadGzipFile:
                pass
            target.write_text(raw.decode("utf-8", errors="replace"))
            return target
        except Exception as exc:  # noqa: BLE001 - retried, then re-raised
            last_error = exc
            time.sleep(2.0**attempt)
    raise RuntimeError(
        f"failed to fetch {station} {year} after {retries} attempts: {last_error}"
    )


def load_station_files(
    data_dir: str | Path, stations: list[str]
) -> dict[str, list[Observation]]:
    """Read all local stdmet files whose names start with a station id."""
    data_dir = Path(data_dir)
    per_station: dict[str, list[Observation]] = {}
    for station in stations:
        observations: list[Observation] = []
        for path in sorted(data_dir.glob(f"{station}*")):
            obs, _ = parse_ndbc(path.read_text(), station_id=station)
            observations.extend(obs)
        if observations:
            per_station[station] = observations
    return per_station
