# File: lle_spectra/outputs.py
"""CSV / JSON artifacts and the run manifests that make them reproducible."""
from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, field
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .const import (
    CSV_SIGNIFICANT_DIGITS,
    LIBRARY_VERSION,
    MANIFEST_SUFFIX,
    METRIC_EUCLIDEAN,
    SIDECAR_SUFFIX,
)
from .exceptions import InvalidArgument
from .geometry import PointCloud

_LOGGER = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """17 significant digits for reals, plain text otherwise."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{CSV_SIGNIFICANT_DIGITS}g}"
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
    _LOGGER.debug("Wrote %s", path)
    return path


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body of a CSV written by `write_csv`."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        header = next(csv.reader(f))
    body = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return header, body


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def sidecar_path(path: str | Path) -> Path:
    """The JSON sidecar next to a points file: `<name>.json` with the full name kept."""
    path = Path(path)
    return path.with_name(path.name + SIDECAR_SUFFIX)


def params_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.params.csv")


def write_cloud(cloud: PointCloud, path: str | Path) -> list[Path]:
    """Points CSV, optional params CSV and the JSON sidecar describing them."""
    path = Path(path)
    written = [
        write_csv(path, [f"x{j}" for j in range(cloud.p)], cloud.points.tolist())
    ]
    params_file = None
    if cloud.params is not None:
        params = np.asarray(cloud.params, dtype=float).reshape(cloud.n, -1)
        params_file = params_path(path)
        written.append(
            write_csv(params_file, [f"t{j}" for j in range(params.shape[1])], params.tolist())
        )
    meta = {
        "n": cloud.n,
        "p": cloud.p,
        "d": cloud.intrinsic_dim,
        "sampler": cloud.meta.get("sampler"),
        "seed": cloud.meta.get("seed"),
        "params_file": params_file.name if params_file else None,
        "metric": cloud.metric,
        "period": cloud.period,
        "meta": cloud.meta,
    }
    sidecar = sidecar_path(path)
    with open(sidecar, "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    written.append(sidecar)
    return written


def read_cloud(path: str | Path, d: int | None = None) -> PointCloud:
    """Load a cloud written by `write_cloud` (or a bare CSV when `d` is given)."""
    path = Path(path)
    if not path.exists():
        raise InvalidArgument(f"cloud file {path} does not exist")
    _, points = read_csv(path)
    meta: dict[str, Any] = {}
    sidecar = sidecar_path(path)
    if sidecar.exists():
        with open(sidecar, encoding="utf-8") as f:
            meta = json.load(f)
    elif d is None:
        raise InvalidArgument(f"{path} has no sidecar; pass the intrinsic dimension")
    params = None
    if meta.get("params_file"):
        _, body = read_csv(path.with_name(meta["params_file"]))
        params = body[:, 0] if body.shape[1] == 1 else body
    return PointCloud(
        points,
        intrinsic_dim=int(d if d is not None else meta["d"]),
        params=params,
        metric=meta.get("metric", METRIC_EUCLIDEAN),
        period=meta.get("period"),
        meta=meta.get("meta", {}),
    )


@dataclass
class RunManifest:
    """Everything needed to rerun a command and check its outputs."""

    command: str
    argv: list[str]
    parameters: dict[str, Any]
    seed: int | None = None
    inputs: list[dict[str, str]] = field(default_factory=list)
    outputs: list[dict[str, str]] = field(default_factory=list)
    wall_time_s: float = 0.0
    status: str = "ok"
    library_version: str = LIBRARY_VERSION

    def add_input(self, path: str | Path) -> None:
        self.inputs.append({"path": str(path), "sha256": sha256_file(path)})

    def add_output(self, path: str | Path) -> None:
        self.outputs.append({"path": str(path), "sha256": sha256_file(path)})

    def write(self, primary: str | Path) -> Path:
        """Write next to the primary output as `<output>.manifest.json`."""
        primary = Path(primary)
        target = primary.with_name(primary.name + MANIFEST_SUFFIX)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True, default=str)
            f.write("\n")
        return target

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        try:
            return cls(**data)
        except TypeError as err:
            raise InvalidArgument(f"{path} is not a run manifest: {err}") from err

    def mismatched_outputs(self) -> list[str]:
        """Outputs whose current hash differs from the recorded one."""
        bad = []
        for entry in self.outputs:
            path = Path(entry["path"])
            if not path.exists() or sha256_file(path) != entry["sha256"]:
                bad.append(entry["path"])
        return bad
