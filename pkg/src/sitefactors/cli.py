"""Command-line front end: describe / fit / score / sweep / synth.

Exit codes are a stable contract: 0 success, 2 schema or data errors,
3 no factor retained, 4 singular correlation matrix, 5 composite or range
errors. Non-convergence is not an error; it lands in the manifest and on
stderr as a warning.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from . import __version__
from .composite import (
    TypologyConfig,
    composite_scores,
    default_definition,
    load_definition,
    score_regions,
    sweep,
    top_k,
)
from .config import KEY_TYPES, RunConfig, load_config_file
from .datamodel import IngestionConfig, describe, load_table, standardize
from .engine import EngineConfig, dominant_attributes, factor_scores, fit_factor_model
from .errors import (
    AlphaRangeError,
    DegenerateDataError,
    DimensionMismatchError,
    IncompleteDefinitionError,
    KRangeError,
    NoFactorRetainedError,
    ParseError,
    SchemaError,
    SiteFactorsError,
    SingularCorrelationError,
    ZeroDenominatorError,
    ZeroVarianceError,
)
from .reports import (
    grid_label,
    write_eigenvalues_csv,
    write_loadings_csv,
    write_manifest,
    write_provenance,
    write_scores_csv,
    write_stats_csv,
    write_sweep_long_csv,
    write_sweep_wide_csv,
    write_top_csv,
    write_weights_csv,
)
from .synth import SynthConfig, write_synth_csv

EXIT_CODES = {
    ParseError: 2,
    SchemaError: 2,
    DegenerateDataError: 2,
    ZeroVarianceError: 2,
    NoFactorRetainedError: 3,
    SingularCorrelationError: 4,
    DimensionMismatchError: 5,
    IncompleteDefinitionError: 5,
    AlphaRangeError: 5,
    ZeroDenominatorError: 5,
    KRangeError: 5,
}


def _exit_code(exc: SiteFactorsError) -> int:
    for klass, code in EXIT_CODES.items():
        if isinstance(exc, klass):
            return code
    return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sitefactors",
        description="Latent-factor site scoring: describe, fit, score, sweep, synth.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "describe": "write per-attribute descriptive statistics",
        "fit": "extract, rotate and weight the latent factors",
        "score": "write per-region composite scores at a given alpha",
        "sweep": "run the (alpha, theta) sensitivity sweep",
        "synth": "generate a synthetic dataset with a planted structure",
    }
    for name, help_text in commands.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="JSON config file of dotted keys")
        cmd.add_argument("--input", help="input CSV path")
        cmd.add_argument("--out", help="output directory")
        cmd.add_argument("--quiet", action="store_true", default=None)
        if name == "score":
            cmd.add_argument("--alpha", help="suitability weight in [0, 1]")
        if name == "synth":
            cmd.add_argument("--seed", help="generator seed")
        for key in KEY_TYPES:
            if key in ("input", "out", "quiet"):
                continue
            cmd.add_argument(f"--{key}", dest=key, help=argparse.SUPPRESS)
    return parser


def _resolve_config(args) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {}
    for key in KEY_TYPES:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "alpha", None) is not None:
        overrides["score.alpha"] = args.alpha
    if getattr(args, "seed", None) is not None:
        overrides["synth.seed"] = args.seed
    return RunConfig.resolve(file_values, overrides)


def _say(config: RunConfig, message: str) -> None:
    if not config["quiet"]:
        print(message)


def _warn(messages) -> None:
    for message in messages:
        print(f"warning: {message}", file=sys.stderr)


def _input_path(config: RunConfig) -> Path:
    path = config["input"]
    if not path:
        raise ParseError("no input file given (set --input or the 'input' key)")
    return Path(path)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _load(config: RunConfig):
    table = load_table(
        _input_path(config),
        IngestionConfig(missing_policy=config["data.missing_policy"]),
    )
    if table.provenance:
        write_provenance(Path(config["out"]) / "provenance.log", table.provenance)
        _warn(f"missing value handled: {line}" for line in table.provenance)
    return table


def _engine_config(config: RunConfig) -> EngineConfig:
    return EngineConfig(
        epsilon=config["engine.epsilon"],
        max_iterations=config["engine.max_iterations"],
        kaiser_threshold=config["engine.kaiser_threshold"],
        ridge_fallback=config["engine.ridge_fallback"],
        varimax_tolerance=config["engine.varimax_tolerance"],
    )


def _definition(config: RunConfig, n_factors: int):
    path = config["composite.definition"]
    definition = load_definition(path) if path else default_definition(n_factors)
    definition.validate_for(n_factors)
    if config["composite.binary"]:
        definition = definition.as_binary()
    return definition


def _fit(config: RunConfig):
    """Shared fit stage: table -> standardized matrix -> canonical model."""
    table = _load(config)
    matrix = standardize(table)
    model = fit_factor_model(matrix, _engine_config(config))
    dominant = dominant_attributes(model.rotated_loadings)
    warnings = list(model.warnings) + list(dominant.warnings)
    _warn(warnings)
    return table, matrix, model, dominant, warnings


def _manifest_payload(config: RunConfig, model, warnings) -> dict:
    # input/out/quiet are environment locations, not computation parameters;
    # the digest pins the input content, so reruns into any directory of the
    # same data and settings produce byte-identical artifacts
    snapshot = {
        key: value
        for key, value in config.snapshot().items()
        if key not in ("input", "out", "quiet")
    }
    return {
        "config": snapshot,
        "input_digest": _digest(_input_path(config)),
        "tool_version": __version__,
        "converged": model.converged,
        "iterations_used": model.iterations_used,
        "n_factors": model.n_factors,
        "warnings": list(warnings),
    }


def cmd_describe(config: RunConfig) -> int:
    table = _load(config)
    stats = describe(table)
    _warn(stats.warnings)
    write_stats_csv(Path(config["out"]) / "stats.csv", stats)
    _say(config, f"N={table.n_attributes} R={table.n_regions}")
    return 0


def cmd_fit(config: RunConfig) -> int:
    table, _, model, dominant, warnings = _fit(config)
    out = Path(config["out"])
    write_loadings_csv(out / "loadings.csv", model, dominant)
    write_eigenvalues_csv(out / "eigenvalues.csv", model)
    write_weights_csv(out / "weights.csv", model)
    write_manifest(out / "manifest.json", _manifest_payload(config, model, warnings))
    _say(
        config,
        f"N={table.n_attributes} R={table.n_regions} M={model.n_factors} "
        f"converged={model.converged} iterations={model.iterations_used}",
    )
    return 0


def cmd_score(config: RunConfig) -> int:
    _, matrix, model, _, warnings = _fit(config)
    definition = _definition(config, model.n_factors)
    scores = factor_scores(model.scoring_weights, matrix)
    alpha = config["score.alpha"]
    regions = score_regions(
        scores,
        definition,
        alpha,
        TypologyConfig(
            balance_band=config["composite.balance_band"],
            bias_band=config["composite.bias_band"],
        ),
    )
    out = Path(config["out"])
    write_scores_csv(out / "scores.csv", regions)
    k = min(config["score.top_k"], regions.n_regions)
    write_top_csv(
        out / "top_suitability.csv", top_k(regions, k, "suitability"), "suitability"
    )
    write_top_csv(
        out / "top_attractiveness.csv",
        top_k(regions, k, "attractiveness"),
        "attractiveness",
    )
    write_manifest(out / "manifest.json", _manifest_payload(config, model, warnings))
    _say(config, f"scored {regions.n_regions} regions at alpha={alpha:g}")
    return 0


def cmd_sweep(config: RunConfig) -> int:
    _, matrix, model, _, warnings = _fit(config)
    definition = _definition(config, model.n_factors)
    scores = factor_scores(model.scoring_weights, matrix)
    typology = TypologyConfig(
        balance_band=config["composite.balance_band"],
        bias_band=config["composite.bias_band"],
    )
    composites = composite_scores(scores, definition)
    grid = sweep(composites, config.alphas(), config["sweep.thetas"])
    out = Path(config["out"])
    write_sweep_wide_csv(out / "sweep_wide.csv", grid)
    write_sweep_long_csv(out / "sweep_long.csv", grid)
    k = min(config["sweep.top_k"], len(composites.region_ids))
    for alpha in grid.alphas:
        ranking = top_k(score_regions(scores, definition, alpha, typology), k, "v_score")
        write_top_csv(
            out / f"top_regions_alpha_{grid_label(alpha)}.csv", ranking, "v_score"
        )
    write_manifest(out / "manifest.json", _manifest_payload(config, model, warnings))
    _say(
        config,
        f"sweep grid {len(grid.thetas)}x{len(grid.alphas)} over "
        f"{grid.n_regions} regions",
    )
    return 0


def cmd_synth(config: RunConfig) -> int:
    out = Path(config["out"])
    out.mkdir(parents=True, exist_ok=True)
    path = out / "synthetic.csv"
    synth_config = SynthConfig(
        seed=config["synth.seed"],
        n_attributes=config["synth.attributes"],
        n_regions=config["synth.regions"],
        n_factors=config["synth.factors"],
        loading=config["synth.loading"],
        noise_std=config["synth.noise_std"],
    )
    table = write_synth_csv(path, synth_config)
    _say(
        config,
        f"wrote {path} ({table.n_attributes} attributes x {table.n_regions} regions)",
    )
    return 0


COMMANDS = {
    "describe": cmd_describe,
    "fit": cmd_fit,
    "score": cmd_score,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        return COMMANDS[args.command](config)
    except SiteFactorsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
