"""Command-line surface. Every subcommand is a thin shell over the library:
its output is exactly the corresponding library call's serialization.

Errors print one machine-parsable ``error_code: message`` line on stderr and
exit nonzero. Defaults resolve flag > config file ($GRADREC_CONFIG) > built-in.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import __version__
from .catalog import (
    SyntheticSpec,
    bundle_base,
    generate_synthetic,
    load_catalog,
    load_oracle,
    load_prompt_bank,
    save_synthetic_bundle,
    _atomic_write,
)
from .defaults import load_defaults, traversal_config
from .direction import DirectionVector, build_direction
from .errors import GradRecError, InvalidParameter, IoFailure
from .evaluation import run_discovery_benchmark, write_benchmark_artifacts
from .index import KnnIndex
from .traversal import traverse


def _json_dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def report_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GradRecError as exc:
            click.echo(f"{exc.code}: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load_index(catalog_path: str) -> KnnIndex:
    return KnnIndex(load_catalog(catalog_path))


def _emit(payload: str, out: str | None) -> None:
    if out:
        _atomic_write(out, payload.encode("utf-8"))
    else:
        click.echo(payload, nl=False)


@click.group()
@click.version_option(version=__version__)
def main():
    """Comparative-recommendation engine over precomputed embeddings."""


@main.command("synth")
@click.option("--dim", default=64, show_default=True, type=int,
              help="Embedding dim. Synthetic discovery demos are validated at "
                   "dim 4-64; noise is per-channel, so higher dims need tuning.")
@click.option("--n-products", default=600, show_default=True, type=int)
@click.option("--n-attributes", default=1, show_default=True, type=int)
@click.option("--levels", default=3, show_default=True, type=int)
@click.option("--noise-sigma", default=0.05, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, help="Bundle base path (suffixes are appended).")
@report_errors
def cmd_synth(dim, n_products, n_attributes, levels, noise_sigma, seed, out):
    """Generate a synthetic catalog bundle with planted attribute directions."""
    spec = SyntheticSpec(
        dim=dim,
        n_products=n_products,
        n_attributes=n_attributes,
        intensity_levels=levels,
        noise_sigma=noise_sigma,
        seed=seed,
    )
    catalog, bank, oracle = generate_synthetic(spec)
    for path in save_synthetic_bundle(catalog, bank, oracle, out):
        click.echo(path)


@main.command("retrieve")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--prompts", "prompts_path", required=True)
@click.option("--prompt", required=True)
@click.option("--n", default=10, show_default=True, type=int)
@report_errors
def cmd_retrieve(catalog_path, prompts_path, prompt, n):
    """Print the ids of the n products closest to a prompt, one per line."""
    index = _load_index(catalog_path)
    bank = load_prompt_bank(prompts_path, dim=index.dim)
    for nb in index.retrieve_by_prompt(bank, prompt, n):
        click.echo(nb.id)


@main.command("direction")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--prompts", "prompts_path", required=True)
@click.option("--neutral", required=True, help="Neutral-class prompt.")
@click.option("--exemplar", required=True, help="Exemplar-class prompt.")
@click.option("--m", type=int, default=None, help="Neutral class-set size.")
@click.option("--n", type=int, default=None, help="Exemplar class-set size.")
@click.option("--epsilon", type=float, default=None)
@click.option("--out", default=None, help="Write JSON here (atomic) instead of stdout.")
@report_errors
def cmd_direction(catalog_path, prompts_path, neutral, exemplar, m, n, epsilon, out):
    """Build an attribute direction vector from a prompt pair."""
    defaults = load_defaults()
    index = _load_index(catalog_path)
    bank = load_prompt_bank(prompts_path, dim=index.dim)
    direction = build_direction(
        index,
        bank,
        neutral_prompt=neutral,
        exemplar_prompt=exemplar,
        m=m if m is not None else defaults["class_m"],
        n=n if n is not None else defaults["class_n"],
        epsilon=epsilon if epsilon is not None else defaults["epsilon"],
    )
    _emit(_json_dumps(direction.to_json()), out)


@main.command("traverse")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--direction", "direction_path", required=True, help="Direction JSON file.")
@click.option("--seed-id", required=True)
@click.option("--lambda", "step_scale", type=float, default=None)
@click.option("--rho", "reg_weight", type=float, default=None)
@click.option("--k-reg", type=int, default=None)
@click.option("--k-rec", type=int, default=None)
@click.option("--steps", "max_steps", type=int, default=None)
@click.option("--invert", is_flag=True, help="Walk the attribute in the opposite sense.")
@click.option("--include-positions", is_flag=True)
@click.option("--out", default=None, help="Write JSON here (atomic) instead of stdout.")
@report_errors
def cmd_traverse(
    catalog_path,
    direction_path,
    seed_id,
    step_scale,
    reg_weight,
    k_reg,
    k_rec,
    max_steps,
    invert,
    include_positions,
    out,
):
    """Traverse from a seed product along a direction; emit the path JSON."""
    index = _load_index(catalog_path)
    try:
        with open(direction_path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read direction {direction_path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"direction {direction_path!r} is not JSON: {exc}") from exc
    try:
        direction = DirectionVector.from_json(payload)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidParameter(f"malformed direction file {direction_path!r}: {exc}") from exc
    if invert:
        direction = direction.invert()
    cfg = traversal_config(
        load_defaults(),
        step_scale=step_scale,
        reg_weight=reg_weight,
        k_reg=k_reg,
        k_rec=k_rec,
        max_steps=max_steps,
    )
    path = traverse(seed_id, direction, index, cfg)
    _emit(_json_dumps(path.to_json(include_positions=include_positions)), out)


@main.command("eval")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--prompts", "prompts_path", required=True)
@click.option("--neg", required=True, help="Negative-intensity prompt.")
@click.option("--neu", required=True, help="Neutral-intensity prompt.")
@click.option("--pos", required=True, help="Positive-intensity prompt.")
@click.option("--seed-id", required=True)
@click.option("--window", type=int, default=None)
@click.option("--steps", "max_steps", type=int, default=None)
@click.option("--m", type=int, default=None, help="Neutral class-set size.")
@click.option("--n", type=int, default=None, help="Exemplar class-set size.")
@click.option("--intensity-n", type=int, default=None, help="Products per intensity dataset.")
@click.option("--oracle", "oracle_path", default=None, help="Planted-intensity file for monotonicity scoring.")
@click.option("--out-dir", required=True)
@report_errors
def cmd_eval(
    catalog_path,
    prompts_path,
    neg,
    neu,
    pos,
    seed_id,
    window,
    max_steps,
    m,
    n,
    intensity_n,
    oracle_path,
    out_dir,
):
    """Run the discovery benchmark; write curves/trajectory/projection/summary."""
    defaults = load_defaults()
    index = _load_index(catalog_path)
    bank = load_prompt_bank(prompts_path, dim=index.dim)
    alphas = None
    if oracle_path:
        alphas = load_oracle(oracle_path).alpha_map()
    cfg = traversal_config(defaults, max_steps=max_steps)
    result = run_discovery_benchmark(
        index,
        bank,
        negative_prompt=neg,
        neutral_prompt=neu,
        positive_prompt=pos,
        seed_id=seed_id,
        cfg=cfg,
        window=window if window is not None else defaults["window"],
        class_m=m if m is not None else defaults["class_m"],
        class_n=n if n is not None else defaults["class_n"],
        intensity_n=intensity_n if intensity_n is not None else defaults["intensity_n"],
        epsilon=defaults["epsilon"],
        min_peak=defaults["min_peak"],
        alphas=alphas,
    )
    for path in write_benchmark_artifacts(result, index, out_dir):
        click.echo(path)
    for source, peaks in (("gradrec", result.gradrec_peaks), ("visual", result.visual_peaks)):
        verdict = "pass" if peaks.passed else f"fail ({peaks.reason})"
        click.echo(f"{source} peak order: {verdict}")


@main.command("serve")
@click.option("--catalog", "catalog_path", required=True)
@click.option("--prompts", "prompts_path", required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@report_errors
def cmd_serve(catalog_path, prompts_path, host, port):
    """Serve the HTTP API over a loaded catalog."""
    import uvicorn

    from .service.app import create_app
    from .service.state import load_state

    state = load_state(bundle_base(catalog_path), prompts_path)
    uvicorn.run(create_app(state), host=host, port=port)


if __name__ == "__main__":
    main()
