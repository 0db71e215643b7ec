"""Datasets, run configuration files and grid output.

File formats
------------
Data CSV     ``lon_deg,lat_deg,value`` header, one record per line.
Grid CSV     ``lon_deg,lat_deg,prediction,variance`` (kriging) or
             ``lon_deg,lat_deg,value`` (simulation, smoothing).
Config       flat ``key=value`` lines; ``#`` starts a comment.  Keys:
             degrees, family, c, s, coeffs, lmax, sigma2, alpha, grid_deg, seed.

Floats are written with 17 significant digits so that write/read round-trips
are exact.
"""
from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core_sphere import SpherePoint
from .errors import ValidationError
from .spectral_model import SpectralModel, explicit_model, power_law_model

DATA_HEADER = "lon_deg,lat_deg,value"


class DatasetError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temporary file beside ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True, eq=False)
class Dataset:
    records: np.ndarray
    source: str = ""

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def values(self) -> np.ndarray:
        return self.records[:, 2]

    @property
    def points(self) -> list[SpherePoint]:
        return [SpherePoint.from_lonlat_deg(lon, lat) for lon, lat, _ in self.records]

    @property
    def angles(self) -> np.ndarray:
        """``(n, 2)`` array of ``(psi, zeta)`` radians, ``zeta = pi/2 - lat``."""
        return lonlat_to_angles(self.records[:, 0], self.records[:, 1])


def lonlat_to_angles(lon, lat) -> np.ndarray:
    psi = np.mod(np.radians(np.asarray(lon, dtype=float)), 2.0 * np.pi)
    zeta = np.pi / 2.0 - np.radians(np.asarray(lat, dtype=float))
    return np.column_stack([psi, np.clip(zeta, 0.0, np.pi)])


def read_dataset(path) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"{path}: no such file")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip().replace(" ", "") != DATA_HEADER:
        raise DatasetError(f"{path}: expected header {DATA_HEADER!r}")
    rows, problems = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            problems.append(f"line {lineno}: expected 3 fields, got {len(parts)}")
            continue
        try:
            lon, lat, val = (float(p) for p in parts)
        except ValueError:
            problems.append(f"line {lineno}: non-numeric field in {line!r}")
            continue
        if not (-180.0 <= lon < 360.0):
            problems.append(f"line {lineno}: longitude {lon} outside [-180, 360)")
        elif not (-90.0 <= lat <= 90.0):
            problems.append(f"line {lineno}: latitude {lat} outside [-90, 90]")
        elif not np.isfinite(val):
            problems.append(f"line {lineno}: non-finite value")
        else:
            rows.append((lon, lat, val))
    if problems:
        raise DatasetError(f"{path}: malformed rows\n" + "\n".join(problems))
    return Dataset(np.array(rows, dtype=float).reshape(-1, 3), str(path))


def write_dataset(path, ds: Dataset) -> None:
    body = "".join(f"{fmt(a)},{fmt(b)},{fmt(c)}\n" for a, b, c in ds.records)
    atomic_write_text(path, DATA_HEADER + "\n" + body)


_FLOAT_KEYS = ("c", "s", "sigma2", "alpha", "grid_deg")
_KEY_ORDER = ("degrees", "family", "c", "s", "coeffs", "lmax", "sigma2", "alpha", "grid_deg", "seed")


@dataclass(frozen=True)
class RunConfig:
    degrees: tuple = (0,)
    family: str = "power_law"
    c: float = 1.0
    s: float = 3.0
    coeffs: tuple = ()
    lmax: int = 50
    sigma2: float = 0.0
    alpha: float = 1e-3
    grid_deg: float = 10.0
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def model(self) -> SpectralModel:
        if self.family == "power_law":
            return power_law_model(self.degrees, self.c, self.s, self.sigma2, self.lmax)
        if self.family == "explicit":
            if not self.coeffs:
                raise ConfigError("family=explicit needs a coeffs list")
            return explicit_model(self.degrees, self.coeffs, self.sigma2)
        raise ConfigError(f"unknown family {self.family!r}")

    def to_text(self) -> str:
        vals = {
            "degrees": ",".join(str(d) for d in self.degrees),
            "family": self.family,
            "c": fmt(self.c),
            "s": fmt(self.s),
            "coeffs": ",".join(fmt(v) for v in self.coeffs),
            "lmax": str(self.lmax),
            "sigma2": fmt(self.sigma2),
            "alpha": fmt(self.alpha),
            "grid_deg": fmt(self.grid_deg),
            "seed": str(self.seed),
        }
        return "".join(f"{k}={vals[k]}\n" for k in _KEY_ORDER)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    kw = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        try:
            if key == "degrees":
                kw[key] = tuple(sorted({int(v) for v in value.split(",") if v.strip()}))
            elif key == "coeffs":
                kw[key] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key in ("lmax", "seed"):
                kw[key] = int(value)
            elif key in _FLOAT_KEYS:
                kw[key] = float(value)
            elif key == "family":
                kw[key] = value
            else:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {value!r}") from exc
    return RunConfig(**kw)


def read_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    return parse_config(path.read_text(encoding="utf-8"), str(path))


def write_config(path, cfg: RunConfig) -> None:
    atomic_write_text(path, cfg.to_text())


def global_grid(res_deg: float) -> tuple[np.ndarray, np.ndarray]:
    """Equiangular lon/lat grid; each pole appears once at longitude 0."""
    if not res_deg > 0:
        raise ValidationError(f"grid resolution must be positive, got {res_deg}")
    n_lat = int(round(180.0 / res_deg))
    n_lon = int(round(360.0 / res_deg))
    if abs(n_lat * res_deg - 180.0) > 1e-9 or n_lat < 1:
        raise ValidationError(f"grid resolution {res_deg} does not divide 180 degrees")
    lon, lat = [0.0], [-90.0]
    for i in range(1, n_lat):
        la = -90.0 + i * res_deg
        for j in range(n_lon):
            lon.append(j * res_deg)
            lat.append(la)
    lon.append(0.0)
    lat.append(90.0)
    return np.array(lon), np.array(lat)


def write_grid(path, lon, lat, columns: dict) -> None:
    names = ["lon_deg", "lat_deg", *columns]
    cols = [np.asarray(lon), np.asarray(lat), *(np.asarray(v) for v in columns.values())]
    lines = [",".join(names)]
    lines += [",".join(fmt(c[i]) for c in cols) for i in range(len(lon))]
    atomic_write_text(path, "\n".join(lines) + "\n")
