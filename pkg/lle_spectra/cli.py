# File: lle_spectra/cli.py
"""Command line interface: sample clouds, run LLE and write CSV artifacts."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
from pathlib import Path
import sys
import time
from typing import Any, Sequence

import numpy as np
import voluptuous as vol

from . import LLECoordinator
from .baseline_dm import DMConfig, dm_embed
from .const import (
    COMPARE_RHOS,
    DEFAULT_EIG_TOL,
    DEFAULT_MAX_ITER,
    DM_RECOVERY_THRESHOLD,
    DOMAIN,
    ENV_THREADS,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    LIBRARY_VERSION,
    LLE_RECOVERY_THRESHOLD,
    REGIME_BALANCED,
    REGIME_FOURTH_ORDER,
    RULE_EPS,
    RULE_KNN,
    SAMPLER_CIRCLE,
    SAMPLER_FLAT_TORUS,
    SAMPLER_SHEPP_LOGAN,
    SAMPLER_SPHERE,
    SAMPLER_TORUS,
    TORUS_POINTS,
    VALID_COEFFICIENT_TABLES,
    VALID_SAMPLERS,
    VALID_THEORIES,
)
from .descriptions import DESCRIPTIONS_BY_KEY
from .exceptions import InvalidArgument, LLESpectraError, SolverNotConverged
from .geometry import (
    PointCloud,
    sample_circle,
    sample_flat_torus,
    sample_sphere,
    sample_torus,
    shepp_logan_dataset,
)
from .kernel import covariance_spectrum
from .lle_matrix import LLEConfig, validate_rho, write_matrix_market
from .neighbors import eps_for_neighbor_count
from .outputs import (
    RunManifest,
    format_value,
    read_cloud,
    sidecar_path,
    write_cloud,
    write_csv,
)
from .spectral import (
    angle_recovery_spearman,
    embed,
    generator_spectrum,
    neighbors_for,
    smallest_eigs_sym,
)
from .theory import coefficient_table, prediction

_LOGGER = logging.getLogger(__name__)

OPERATOR_GENERATOR = "generator"
OPERATOR_FOURTH_ORDER = "fourth-order"
OPERATOR_EMBEDDING = "embedding"
VALID_OPERATORS = {OPERATOR_GENERATOR, OPERATOR_FOURTH_ORDER, OPERATOR_EMBEDDING}

SPECTRUM_HEADER = (
    "k",
    "eigenvalue",
    "rescaled_eigenvalue",
    "theory_value",
    "error",
    "residual",
    "imaginary",
    "converged",
)

_POSITIVE_FLOAT = vol.All(vol.Coerce(float), vol.Range(min=0, min_included=False))
_POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))

THREADS_SCHEMA = _POSITIVE_INT

GENERATE_SCHEMA = vol.Schema(
    {
        vol.Required("sampler"): vol.In(VALID_SAMPLERS),
        vol.Required("n"): _POSITIVE_INT,
        vol.Optional("seed"): vol.Any(None, vol.Coerce(int)),
        vol.Optional("radius"): vol.Any(None, _POSITIVE_FLOAT),
        vol.Optional("p"): vol.Any(None, vol.All(vol.Coerce(int), vol.Range(min=2))),
    },
    extra=vol.ALLOW_EXTRA,
)

RULE_SCHEMA = vol.Schema(
    {
        vol.Optional("eps"): vol.Any(None, _POSITIVE_FLOAT),
        vol.Optional("knn"): vol.Any(None, _POSITIVE_INT),
        vol.Optional("target_neighbors"): vol.Any(None, _POSITIVE_INT),
        vol.Optional("d"): vol.Any(None, _POSITIVE_INT),
    },
    extra=vol.ALLOW_EXTRA,
)

LLE_RUN_SCHEMA = RULE_SCHEMA.extend({vol.Required("rho"): validate_rho})

SPECTRUM_SCHEMA = LLE_RUN_SCHEMA.extend(
    {
        vol.Required("m"): _POSITIVE_INT,
        vol.Required("operator"): vol.In(VALID_OPERATORS),
        vol.Optional("theory"): vol.Any(None, vol.In(VALID_THEORIES)),
        vol.Required("radius"): _POSITIVE_FLOAT,
        vol.Required("tol"): _POSITIVE_FLOAT,
        vol.Required("max_iter"): _POSITIVE_INT,
    }
)

KERNEL_SCHEMA = LLE_RUN_SCHEMA.extend(
    {vol.Required("center"): vol.All(vol.Coerce(int), vol.Range(min=0))}
)

COVARIANCE_SCHEMA = vol.Schema(
    {
        vol.Required("center"): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Required("eps"): [_POSITIVE_FLOAT],
    },
    extra=vol.ALLOW_EXTRA,
)

EMBED_SCHEMA = LLE_RUN_SCHEMA.extend({vol.Required("ell"): _POSITIVE_INT})

COMPARE_SCHEMA = RULE_SCHEMA.extend(
    {
        vol.Required("rhos"): [validate_rho],
        vol.Required("alpha"): vol.All(vol.Coerce(float), vol.Range(min=0, max=1)),
        vol.Optional("sigma"): vol.Any(None, _POSITIVE_FLOAT),
        vol.Required("ell"): _POSITIVE_INT,
    }
)

THEORY_SCHEMA = vol.Schema(
    {
        vol.Required("name"): vol.In(VALID_THEORIES | VALID_COEFFICIENT_TABLES),
        vol.Optional("m"): vol.Any(None, _POSITIVE_INT),
        vol.Required("radius"): _POSITIVE_FLOAT,
        vol.Optional("p"): vol.Any(None, vol.All(vol.Coerce(int), vol.Range(min=2))),
        vol.Optional("point"): vol.Any(None, vol.In(TORUS_POINTS)),
        vol.Required("regime"): vol.In((REGIME_BALANCED, REGIME_FOURTH_ORDER)),
        vol.Optional("k"): vol.Any(None, _POSITIVE_INT),
        vol.Optional("n"): vol.Any(None, _POSITIVE_INT),
        vol.Optional("density"): vol.Any(None, _POSITIVE_FLOAT),
        vol.Optional("d"): vol.Any(None, _POSITIVE_INT),
        vol.Optional("rho"): vol.Any(None, validate_rho),
        vol.Optional("eps"): vol.Any(None, _POSITIVE_FLOAT),
        vol.Optional("grad"): vol.Any(None, vol.Coerce(float)),
        vol.Optional("laplacian"): vol.Any(None, vol.Coerce(float)),
    },
    extra=vol.ALLOW_EXTRA,
)


# attributes every LogRecord carries; anything else came in through `extra`
_RECORD_FIELDS = frozenset(vars(logging.makeLogRecord({}))) | {"message", "asctime"}


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record with the structured `extra` fields inlined."""

    def format(self, record: logging.LogRecord) -> str:
        payload: dict[str, Any] = {
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key, value in vars(record).items():
            if key not in _RECORD_FIELDS:
                payload[key] = value
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def setup_logging(verbose: bool = False) -> logging.Handler:
    """Route the package logger to stderr as JSON lines."""
    logger = logging.getLogger(DOMAIN)
    for handler in list(logger.handlers):
        if isinstance(handler.formatter, JsonLineFormatter):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(JsonLineFormatter())
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    return handler


def resolve_threads(flag: int | None) -> int:
    """LLE_SPECTRA_THREADS wins over --threads; all cores when neither is set."""
    value = os.environ.get(ENV_THREADS) or flag
    if value is None:
        return os.cpu_count() or 1
    try:
        return THREADS_SCHEMA(value)
    except vol.Invalid as err:
        raise InvalidArgument(f"Invalid thread count {value!r}: {err}") from err


def _validate(schema: vol.Schema, args: argparse.Namespace) -> dict[str, Any]:
    try:
        return schema(vars(args))
    except vol.Invalid as err:
        raise InvalidArgument(f"Invalid arguments for {args.command}: {err}") from err


class _Run:
    """Inputs, outputs and timing of one command, flushed into its manifest."""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]) -> None:
        self.args = args
        self.argv = list(argv)
        self.start = time.perf_counter()
        self.inputs: list[Path] = []
        self.outputs: list[Path] = []
        self.seed: int | None = None

    def add_cloud(self, path: str | Path) -> None:
        self.inputs.append(Path(path))
        sidecar = sidecar_path(path)
        if sidecar.exists():
            self.inputs.append(sidecar)

    def finish(self, primary: str | Path, status: str = "ok") -> Path:
        parameters = {
            key: value for key, value in vars(self.args).items() if key != "func"
        }
        manifest = RunManifest(
            command=self.args.command,
            argv=self.argv,
            parameters=parameters,
            seed=self.seed,
            wall_time_s=time.perf_counter() - self.start,
            status=status,
        )
        for path in self.inputs:
            manifest.add_input(path)
        for path in self.outputs:
            manifest.add_output(path)
        target = manifest.write(primary)
        _LOGGER.debug("Wrote manifest %s", target)
        return target


def _load_cloud(run: _Run, path: str, d: int | None) -> PointCloud:
    cloud = read_cloud(path, d=d)
    run.add_cloud(path)
    run.seed = cloud.meta.get("seed")
    return cloud


def _rule_kwargs(params: dict[str, Any]) -> dict[str, Any]:
    return {
        "eps": params.get("eps"),
        "knn": params.get("knn"),
        "target_neighbors": params.get("target_neighbors"),
    }


def _sample(params: dict[str, Any]) -> PointCloud:
    sampler = params["sampler"]
    desc = DESCRIPTIONS_BY_KEY[sampler]
    if params["n"] < desc.min_n:
        raise InvalidArgument(f"{sampler} needs n >= {desc.min_n}")
    for option in ("mode", "radius", "p"):
        if params.get(option) is not None and option not in desc.options:
            raise InvalidArgument(f"--{option} does not apply to {sampler}")
    n, seed = params["n"], params.get("seed")
    if sampler == SAMPLER_CIRCLE:
        return sample_circle(n, mode=params.get("mode") or "uniform", seed=seed)
    if sampler == SAMPLER_SPHERE:
        return sample_sphere(
            n,
            radius=params.get("radius") or 1.0,
            mode=params.get("mode") or "uniform",
            seed=seed,
        )
    if sampler == SAMPLER_TORUS:
        return sample_torus(n, seed=seed)
    if sampler == SAMPLER_FLAT_TORUS:
        return sample_flat_torus(n)
    if sampler == SAMPLER_SHEPP_LOGAN:
        if params.get("p") is None:
            raise InvalidArgument("shepp-logan needs --p")
        return shepp_logan_dataset(n, params["p"])
    raise InvalidArgument(f"unknown sampler {sampler!r}")


def cmd_generate(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(GENERATE_SCHEMA, args)
    run = _Run(args, argv)
    run.seed = params.get("seed")
    cloud = _sample(params)
    run.outputs.extend(write_cloud(cloud, args.output))
    run.finish(args.output)
    _LOGGER.info(
        "Generated %s cloud",
        DESCRIPTIONS_BY_KEY[params["sampler"]].name,
        extra={"n": cloud.n, "p": cloud.p},
    )
    return EXIT_OK


def _log_error(values: np.ndarray, theory: np.ndarray | None) -> np.ndarray:
    """log10 |lambda_k| - log10 L_k, NaN where either side vanishes."""
    if theory is None:
        return np.full(values.size, np.nan)
    theory = theory[: values.size]
    with np.errstate(divide="ignore", invalid="ignore"):
        error = np.log10(np.abs(values)) - np.log10(theory)
    error[(theory == 0) | ~np.isfinite(error)] = np.nan
    return error


def _spectrum_rows(values, scale, residuals, imaginary, theory, converged):
    error = _log_error(values, theory)
    imaginary = np.zeros(values.size) if imaginary is None else imaginary
    for i, value in enumerate(values):
        yield (
            i + 1,
            value / scale,
            value,
            None if theory is None else theory[i],
            error[i],
            residuals[i] if i < len(residuals) else np.nan,
            imaginary[i],
            converged,
        )


def cmd_spectrum(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(SPECTRUM_SCHEMA, args)
    run = _Run(args, argv)
    cloud = _load_cloud(run, args.cloud, params.get("d"))
    coordinator = LLECoordinator(
        cloud, params["rho"], threads=args.threads, **_rule_kwargs(params)
    )
    m = params["m"]
    theory = None
    if params.get("theory"):
        theory = prediction(params["theory"], m, params["radius"]).values
    if args.matrix_market:
        run.outputs.append(write_matrix_market(coordinator.W, args.matrix_market))

    if params["operator"] == OPERATOR_EMBEDDING:
        op = coordinator.embedding_matrix
    elif params["operator"] == OPERATOR_FOURTH_ORDER:
        op = coordinator.fourth_order_generator
    else:
        op = coordinator.generator
    solver_kwargs = {
        "tol": params["tol"],
        "max_iter": params["max_iter"],
        "dense": True if args.dense else None,
    }
    try:
        if params["operator"] == OPERATOR_EMBEDDING:
            result = smallest_eigs_sym(op, m, **solver_kwargs)
        else:
            result = generator_spectrum(op, m, **solver_kwargs)
    except SolverNotConverged as err:
        values = np.sort(np.asarray(err.eigenvalues).real)
        write_csv(
            args.output,
            SPECTRUM_HEADER,
            _spectrum_rows(values, op.scale, err.residuals, None, theory, False),
        )
        run.outputs.append(Path(args.output))
        run.finish(args.output, status="partial")
        _LOGGER.error(
            "%s; wrote %d partial eigenvalues", err, values.size, extra={"m": m}
        )
        return EXIT_NUMERICAL

    write_csv(
        args.output,
        SPECTRUM_HEADER,
        _spectrum_rows(
            result.eigenvalues,
            result.scaling,
            result.residuals,
            result.imaginary,
            theory,
            True,
        ),
    )
    run.outputs.append(Path(args.output))
    run.finish(args.output)
    _LOGGER.info(
        "Computed %d eigenvalues",
        result.m,
        extra={"method": result.method, "operator": params["operator"]},
    )
    return EXIT_OK


def cmd_kernel(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(KERNEL_SCHEMA, args)
    run = _Run(args, argv)
    cloud = _load_cloud(run, args.cloud, params.get("d"))
    if params["center"] >= cloud.n:
        raise InvalidArgument(f"center {params['center']} outside [0, {cloud.n})")
    coordinator = LLECoordinator(
        cloud, params["rho"], threads=args.threads, **_rule_kwargs(params)
    )
    kslice = coordinator.kernel(params["center"])
    write_csv(
        args.output,
        ("neighbor_index", "distance", "raw_value", "normalized_value"),
        zip(kslice.neighbors, kslice.distances, kslice.raw, kslice.normalized),
    )
    run.outputs.append(Path(args.output))
    run.finish(args.output)
    _LOGGER.info(
        "Kernel slice at point %d",
        kslice.center,
        extra={"neighbors": int(kslice.neighbors.size), "negative": int((kslice.raw < 0).sum())},
    )
    return EXIT_OK


def cmd_covariance(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(COVARIANCE_SCHEMA, args)
    run = _Run(args, argv)
    cloud = _load_cloud(run, args.cloud, args.d)
    center = params["center"]
    if center >= cloud.n:
        raise InvalidArgument(f"center {center} outside [0, {cloud.n})")
    rows = []
    for eps in params["eps"]:
        spectrum = covariance_spectrum(cloud, center, eps)
        rows.extend(
            (center, eps, i + 1, value) for i, value in enumerate(spectrum.eigenvalues)
        )
        d = cloud.intrinsic_dim
        if spectrum.eigenvalues.size > d:
            _LOGGER.debug(
                "eps=%g normal/tangent ratio %.3e",
                eps,
                spectrum.eigenvalues[d] / spectrum.eigenvalues[0],
            )
    write_csv(args.output, ("center", "eps", "index", "eigenvalue"), rows)
    run.outputs.append(Path(args.output))
    run.finish(args.output)
    return EXIT_OK


def _recovery(cloud: PointCloud, coords: np.ndarray) -> float | None:
    if cloud.intrinsic_dim != 1 or cloud.params is None or coords.shape[1] < 2:
        return None
    return angle_recovery_spearman(coords, np.asarray(cloud.params).reshape(cloud.n))


def cmd_embed(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(EMBED_SCHEMA, args)
    run = _Run(args, argv)
    cloud = _load_cloud(run, args.cloud, params.get("d"))
    coordinator = LLECoordinator(
        cloud, params["rho"], threads=args.threads, **_rule_kwargs(params)
    )
    coords = coordinator.embed(params["ell"])
    write_csv(args.output, [f"y{j}" for j in range(coords.shape[1])], coords.tolist())
    run.outputs.append(Path(args.output))
    run.finish(args.output)
    spearman = _recovery(cloud, coords)
    if spearman is not None:
        _LOGGER.info("Angle recovery", extra={"spearman": spearman, "rho": params["rho"]})
    return EXIT_OK


def _rho_label(rho: float) -> str:
    return "inf" if math.isinf(rho) else format(rho, "g")


def cmd_compare(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(COMPARE_SCHEMA, args)
    run = _Run(args, argv)
    cloud = _load_cloud(run, args.cloud, params.get("d"))
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    eps, knn = params.get("eps"), params.get("knn")
    if params.get("target_neighbors") is not None:
        eps = eps_for_neighbor_count(cloud, params["target_neighbors"])
    ell = params["ell"]
    header = [f"y{j}" for j in range(ell)]

    rows = []
    nbrs = None
    for rho in params["rhos"]:
        config = LLEConfig(
            rule=RULE_KNN if knn is not None else RULE_EPS,
            rho=rho,
            d=cloud.intrinsic_dim,
            n=cloud.n,
            eps=eps,
            k=knn,
        )
        # the neighbor list does not depend on rho
        nbrs = nbrs or neighbors_for(cloud, config)
        coords = embed(cloud, config, ell, nbrs=nbrs, threads=args.threads)
        run.outputs.append(
            write_csv(out_dir / f"lle_rho{_rho_label(rho)}.csv", header, coords.tolist())
        )
        rows.append(("lle", rho, _recovery(cloud, coords), LLE_RECOVERY_THRESHOLD))

    dm_config = DMConfig(bandwidth=params.get("sigma"), alpha=params["alpha"], ell=ell)
    coords = dm_embed(cloud, dm_config)
    run.outputs.append(write_csv(out_dir / "dm.csv", header, coords.tolist()))
    rows.append(("dm", None, _recovery(cloud, coords), DM_RECOVERY_THRESHOLD))

    rows = [
        (method, rho, score, threshold, None if score is None else score >= threshold)
        for method, rho, score, threshold in rows
    ]
    primary = write_csv(
        out_dir / "compare.csv",
        ("method", "rho", "spearman", "threshold", "passed"),
        rows,
    )
    run.outputs.append(primary)
    run.finish(primary)
    for method, rho, score, _, passed in rows:
        _LOGGER.info(
            "Curve recovery",
            extra={"method": method, "rho": rho, "spearman": score, "passed": passed},
        )
    return EXIT_OK


def _theory_rows(params: dict[str, Any]) -> tuple[tuple[str, str], list[tuple]]:
    name = params["name"]
    if name in VALID_COEFFICIENT_TABLES:
        table = coefficient_table(name, params)
        return ("name", "value"), list(table.items())
    if params.get("m") is None:
        raise InvalidArgument(f"{name} needs --m")
    values = prediction(name, params["m"], params["radius"]).values
    return ("k", "value"), [(k + 1, value) for k, value in enumerate(values)]


def cmd_theory(args: argparse.Namespace, argv: Sequence[str]) -> int:
    params = _validate(THEORY_SCHEMA, args)
    header, rows = _theory_rows(params)
    if args.output is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([format_value(v) for v in row] for row in rows)
        return EXIT_OK
    run = _Run(args, argv)
    run.outputs.append(write_csv(args.output, header, rows))
    run.finish(args.output)
    return EXIT_OK


def cmd_rerun(args: argparse.Namespace, argv: Sequence[str]) -> int:
    recorded = RunManifest.load(args.manifest)
    if recorded.command == "rerun":
        raise InvalidArgument("a rerun manifest cannot be rerun")
    if recorded.library_version != LIBRARY_VERSION:
        _LOGGER.warning(
            "Manifest written by version %s, running %s",
            recorded.library_version,
            LIBRARY_VERSION,
        )
    code = main(recorded.argv)
    if code != EXIT_OK:
        return code
    mismatched = recorded.mismatched_outputs()
    if mismatched:
        _LOGGER.error("Outputs differ from the manifest", extra={"outputs": mismatched})
        return EXIT_NUMERICAL
    _LOGGER.info("Reproduced %d outputs", len(recorded.outputs))
    return EXIT_OK


def _add_rule_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--eps", type=float, help="neighborhood radius")
    group.add_argument("--knn", type=int, help="number of nearest neighbors")
    group.add_argument(
        "--target-neighbors",
        type=int,
        help="pick eps so the median point has this many neighbors",
    )
    parser.add_argument("--d", type=int, help="intrinsic dimension (default: sidecar)")


def _add_cloud_arguments(parser: argparse.ArgumentParser, rule: bool = True) -> None:
    parser.add_argument("cloud", help="cloud CSV written by `generate`")
    if rule:
        _add_rule_arguments(parser)
        parser.add_argument("--rho", type=float, required=True, help="regularization order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lle-spectra",
        description="Locally linear embedding with an explicit regularization order.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {LIBRARY_VERSION}")
    parser.add_argument("--threads", type=int, help=f"worker threads ({ENV_THREADS} overrides)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a point cloud")
    p.add_argument("sampler", choices=sorted(VALID_SAMPLERS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float)
    p.add_argument("--p", type=int, help="detector count for shepp-logan")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("spectrum", help="low spectrum of an LLE operator")
    _add_cloud_arguments(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--operator", choices=sorted(VALID_OPERATORS), default=OPERATOR_GENERATOR)
    p.add_argument("--theory", choices=sorted(VALID_THEORIES))
    p.add_argument("--radius", type=float, default=1.0, help="sphere radius for --theory")
    p.add_argument("--tol", type=float, default=DEFAULT_EIG_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--dense", action="store_true", help="force the dense eigensolver")
    p.add_argument("--matrix-market", help="also write W in Matrix Market format")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("kernel", help="empirical kernel around one point")
    _add_cloud_arguments(p)
    p.add_argument("--center", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("covariance", help="local covariance spectra")
    _add_cloud_arguments(p, rule=False)
    p.add_argument("--center", type=int, required=True)
    p.add_argument("--eps", type=float, nargs="+", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_covariance)

    p = sub.add_parser("embed", help="LLE coordinates")
    _add_cloud_arguments(p)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("compare", help="LLE at several rho against diffusion maps")
    _add_cloud_arguments(p, rule=False)
    _add_rule_arguments(p)
    p.add_argument("--rhos", type=float, nargs="+", default=list(COMPARE_RHOS))
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--sigma", type=float, help="DM bandwidth (default: data-driven)")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--output-dir", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("theory", help="print a closed-form spectrum or coefficient table")
    p.add_argument("name", choices=sorted(VALID_THEORIES | VALID_COEFFICIENT_TABLES))
    p.add_argument("--m", type=int, help="number of eigenvalues for spectrum tables")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--p", type=int, help="ambient dimension for sphere-rho8")
    p.add_argument("--point", choices=sorted(TORUS_POINTS))
    p.add_argument(
        "--regime",
        choices=(REGIME_BALANCED, REGIME_FOURTH_ORDER),
        default=REGIME_BALANCED,
    )
    p.add_argument("--k", type=int, help="neighbor count for knn-radius")
    p.add_argument("--n", type=int)
    p.add_argument("--density", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--grad", type=float, help="grad P . grad f for bias")
    p.add_argument("--laplacian", type=float, help="Laplacian of f for bias")
    p.add_argument("--output")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("rerun", help="repeat a recorded run and check its hashes")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code not in (0, None) else EXIT_OK
    setup_logging(args.verbose)
    try:
        args.threads = resolve_threads(args.threads)
        return args.func(args, argv)
    except InvalidArgument as err:
        _LOGGER.error("%s", err, extra={"error": type(err).__name__})
        return EXIT_USAGE
    except LLESpectraError as err:
        _LOGGER.error("%s", err, extra={"error": type(err).__name__})
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
