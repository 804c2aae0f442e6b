"""
Sample warehouse generator for the XWeB benchmark toolkit.

Generates a ladder of desk-scale warehouses whose expected fact counts go
from 500 to 7000, one directory per rung, for response-time-vs-size runs.
Outputs to sample_warehouses/ in the project root.
"""

import os
from math import prod

from xwebbench.codec.manifest import RunManifest, document_digests, write_manifest
from xwebbench.datagen.build import write_warehouse
from xwebbench.datagen.params import GenParams
from xwebbench.datagen.sizing import expected_cardinalities

FACT_LADDER = (500, 1000, 2000, 4000, 7000)


def ladder_params(seed: int, divisor: int) -> list:
    """
    One GenParams per rung; the density of each rung is its target fact
    count over the number of candidate combinations.
    """
    base = GenParams.create(density=1.0, seed=seed, scale_divisor=divisor)
    candidates = prod(card.finest for card in expected_cardinalities(base).values())
    return [
        (target, base.model_copy(update={"density": target / candidates}))
        for target in FACT_LADDER
    ]


def generate_ladder(output_dir: str = None) -> list:
    """
    Write every rung of the ladder.

    Args:
        output_dir: Where the rungs go (default: sample_warehouses/ in project root)

    Returns:
        List of (target fact count, directory, emitted fact count)
    """
    if output_dir is None:
        output_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), "sample_warehouses")

    seed = int(os.getenv("XWEB_SEED", "42"))
    divisor = int(os.getenv("XWEB_DIVISOR", "1000"))

    results = []
    for target, gp in ladder_params(seed, divisor):
        directory = os.path.join(output_dir, f"facts-{target}")
        generated = write_warehouse(gp, directory)
        write_manifest(
            RunManifest(
                params=gp.echo(),
                fact_count=generated.fact_count,
                counts=generated.dimension_counts,
                digests=document_digests(directory),
            ),
            directory,
        )
        results.append((target, directory, generated.fact_count))
    return results


def main():
    """
    Main entry point for the sample warehouse generator.
    """
    print("🏗️  Generating sample warehouses...")

    results = generate_ladder()

    print(f"✅ Generated {len(results)} warehouses")
    print()
    print("Warehouses generated:")
    for i, (target, directory, facts) in enumerate(results, 1):
        print(f"  {i}. {directory} - {facts} facts (expected {target})")
    print()
    print("📄 Benchmark one with: python -m xwebbench run --warehouse <directory>")

    return results


if __name__ == "__main__":
    main()
