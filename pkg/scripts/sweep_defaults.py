#!/usr/bin/env python3
"""Parameter sweep backing the shipped traversal defaults.

Runs the synthetic discovery protocol across generator seeds for a grid of
(lambda, rho) values and reports, per grid point:

  - direction recovery: cosine between the direction built from the level-0 /
    level-+1 prompt pair and the planted one
  - forward monotonicity: Spearman(discovery order, planted intensity) from a
    bottom-level seed walking up, direction built from the extreme prompt
    pair (level -1 / level +1), which spans the attribute symmetrically
  - inverted monotonicity: the mirrored walk (top-level seed, same direction
    inverted), which should reverse the sign
  - peak protocol: traversal passes the three-peak order check while the
    visual-similarity baseline fails it

The synthetic style norm interacts with these metrics (it sets the angular
gap between level clusters); the shipped value was picked by running this
sweep over candidate norms and keeping the center of the region where the
default walk both crosses all levels and keeps discovery order clean.

Usage: python scripts/sweep_defaults.py [--seeds 20] [--out sweep.json]
"""

from __future__ import annotations

import argparse
import json

from gradrec import (
    KnnIndex,
    SyntheticSpec,
    TraversalConfig,
    build_direction,
    generate_synthetic,
    monotonicity_score,
    prompt_name,
    run_discovery_benchmark,
    traverse,
)
from gradrec.vectors import cosine

GRID_LAMBDA = [0.05, 0.1, 0.2]
GRID_RHO = [0.0, 0.3, 0.6]

STANDARD = dict(dim=64, n_products=600, n_attributes=1, intensity_levels=3, noise_sigma=0.05)


def run_seed(seed: int, step_scale: float, reg_weight: float) -> dict:
    spec = SyntheticSpec(seed=seed, **STANDARD)
    catalog, bank, oracle = generate_synthetic(spec)
    index = KnnIndex(catalog)
    neg, neu, pos = (prompt_name(0, lv) for lv in (-1.0, 0.0, 1.0))
    alphas = oracle.alpha_map()
    cfg = TraversalConfig(step_scale=step_scale, reg_weight=reg_weight)

    adjacent = build_direction(index, bank, neutral_prompt=neu, exemplar_prompt=pos)
    recovery = cosine(adjacent.vector, oracle.directions[0])

    span = build_direction(index, bank, neutral_prompt=neg, exemplar_prompt=pos)
    seed_low = index.retrieve_by_prompt(bank, neg, 1)[0].id
    seed_high = index.retrieve_by_prompt(bank, pos, 1)[0].id
    forward = monotonicity_score(traverse(seed_low, span, index, cfg).discovered(), alphas)
    inverted = monotonicity_score(
        traverse(seed_high, span.invert(), index, cfg).discovered(), alphas
    )

    bench = run_discovery_benchmark(index, bank, neg, neu, pos, seed_low, cfg, alphas=alphas)
    return {
        "recovery": recovery,
        "forward": forward,
        "inverted": inverted,
        "gradrec_peaks": bench.gradrec_peaks.passed,
        "visual_fails": not bench.visual_peaks.passed,
        "bench_monotonicity": bench.gradrec_monotonicity,
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=20)
    parser.add_argument("--out", default=None, help="Write full results as JSON here.")
    args = parser.parse_args()

    results = {}
    print(f"{'lambda':>7} {'rho':>5} {'recov>=0.9':>11} {'fwd>=0.8':>9} "
          f"{'inv<=-0.8':>10} {'peaks':>6} {'vis-fail':>9}")
    for lam in GRID_LAMBDA:
        for rho in GRID_RHO:
            runs = [run_seed(s, lam, rho) for s in range(args.seeds)]
            n = len(runs)
            summary = {
                "recovery_pass": sum(r["recovery"] >= 0.9 for r in runs) / n,
                "forward_pass": sum(r["forward"] >= 0.8 for r in runs) / n,
                "inverted_pass": sum(r["inverted"] <= -0.8 for r in runs) / n,
                "peaks_pass": sum(r["gradrec_peaks"] for r in runs) / n,
                "visual_fail": sum(r["visual_fails"] for r in runs) / n,
                "forward_min": min(r["forward"] for r in runs),
                "recovery_min": min(r["recovery"] for r in runs),
            }
            results[f"lambda={lam},rho={rho}"] = {"runs": runs, "summary": summary}
            print(f"{lam:>7} {rho:>5} {summary['recovery_pass']:>11.2f} "
                  f"{summary['forward_pass']:>9.2f} {summary['inverted_pass']:>10.2f} "
                  f"{summary['peaks_pass']:>6.2f} {summary['visual_fail']:>9.2f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
