# tests/test_outputs.py

import hashlib
import json

import numpy as np
import pytest

from lle_spectra.const import LIBRARY_VERSION, METRIC_PERIODIC
from lle_spectra.exceptions import InvalidArgument
from lle_spectra.geometry import sample_flat_torus, sample_sphere
from lle_spectra.outputs import (
    RunManifest,
    format_value,
    read_cloud,
    read_csv,
    sha256_file,
    sidecar_path,
    write_cloud,
    write_csv,
)


@pytest.mark.parametrize(
    "value, text",
    [
        (None, ""),
        (True, "1"),
        (np.bool_(False), "0"),
        (7, "7"),
        (np.int64(-3), "-3"),
        (0.1, "0.10000000000000001"),
        (np.float64(2.0), "2"),
        (float("nan"), "nan"),
        ("lle", "lle"),
    ],
)
def test_format_value(value, text):
    """Test CSV cell formatting."""
    assert format_value(value) == text


def test_write_csv(tmp_path):
    """Test the header and numeric body round-trip."""
    path = write_csv(tmp_path / "sub" / "t.csv", ("a", "b"), [(1, 0.5), (2, 1.5)])
    header, body = read_csv(path)
    assert header == ["a", "b"]
    np.testing.assert_array_equal(body, [[1, 0.5], [2, 1.5]])
    assert path.read_text(encoding="utf-8").splitlines()[1] == "1,0.5"


def test_cloud_round_trip(tmp_path, small_grid):
    """Test a circle cloud and its angles survive the CSV files."""
    path = tmp_path / "circle.csv"
    written = write_cloud(small_grid, path)
    assert [p.name for p in written] == ["circle.csv", "circle.params.csv", "circle.csv.json"]
    cloud = read_cloud(path)
    np.testing.assert_array_equal(cloud.points, small_grid.points)
    np.testing.assert_array_equal(cloud.params, small_grid.params)
    assert cloud.intrinsic_dim == 1
    assert cloud.meta["sampler"] == "circle"


def test_periodic_cloud_round_trip(tmp_path):
    """Test the periodic metric and period come back from the sidecar."""
    path = tmp_path / "flat.csv"
    write_cloud(sample_flat_torus(50), path)
    cloud = read_cloud(path)
    assert cloud.metric == METRIC_PERIODIC
    assert cloud.period == pytest.approx(2 * np.pi)


def test_sidecar_contents(tmp_path):
    """Test the sidecar describes the cloud."""
    path = tmp_path / "sphere.csv"
    write_cloud(sample_sphere(40, radius=2.0, seed=5), path)
    meta = json.loads(sidecar_path(path).read_text(encoding="utf-8"))
    assert meta["n"] == 40
    assert meta["p"] == 3
    assert meta["d"] == 2
    assert meta["seed"] == 5
    assert meta["sampler"] == "sphere"
    assert meta["params_file"] == "sphere.params.csv"
    assert meta["meta"]["radius"] == 2.0


def test_json_named_points_file_keeps_its_points(tmp_path, small_grid):
    """Test a points file ending in .json is not overwritten by its sidecar."""
    path = tmp_path / "circle.json"
    written = write_cloud(small_grid, path)
    assert sidecar_path(path).name == "circle.json.json"
    assert len({p.name for p in written}) == len(written)
    cloud = read_cloud(path)
    np.testing.assert_array_equal(cloud.points, small_grid.points)
    assert cloud.intrinsic_dim == 1


def test_read_cloud_errors(tmp_path):
    """Test missing files and bare CSVs without a dimension."""
    with pytest.raises(InvalidArgument):
        read_cloud(tmp_path / "missing.csv")
    bare = write_csv(tmp_path / "bare.csv", ("x0", "x1"), [(0.0, 1.0), (1.0, 0.0)])
    with pytest.raises(InvalidArgument):
        read_cloud(bare)
    cloud = read_cloud(bare, d=1)
    assert cloud.n == 2
    assert cloud.params is None


def test_sha256(tmp_path):
    """Test file hashing."""
    path = tmp_path / "abc.txt"
    path.write_bytes(b"abc")
    assert sha256_file(path) == hashlib.sha256(b"abc").hexdigest()


def test_manifest_round_trip(tmp_path):
    """Test manifests are written next to the output and detect changes."""
    output = tmp_path / "out.csv"
    output.write_text("k,value\n1,0\n", encoding="utf-8")
    manifest = RunManifest(command="theory", argv=["theory"], parameters={"m": 1}, seed=3)
    manifest.add_output(output)
    target = manifest.write(output)
    assert target.name == "out.csv.manifest.json"

    loaded = RunManifest.load(target)
    assert loaded == manifest
    assert loaded.library_version == LIBRARY_VERSION
    assert loaded.mismatched_outputs() == []

    output.write_text("k,value\n1,1\n", encoding="utf-8")
    assert loaded.mismatched_outputs() == [str(output)]
    output.unlink()
    assert loaded.mismatched_outputs() == [str(output)]


def test_manifest_load_rejects_other_json(tmp_path):
    """Test loading a JSON file that is not a manifest."""
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"hello": 1}), encoding="utf-8")
    with pytest.raises(InvalidArgument):
        RunManifest.load(path)
