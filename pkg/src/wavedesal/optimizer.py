"""Binary-encoded genetic algorithm with tournament selection, elitism,
and periodic mass immigration against premature convergence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import DESIGN_BOUNDS, DESIGN_VARIABLES, DesignVector


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 400
    mutation_rate: float = 0.2       # per-individual chance of one bit flip
    crossover_rate: float = 0.8
    elites: int = 1
    tournament_size: int = 2
    bits_per_variable: int = 8
    immigration_interval: int = 50   # generations
    immigrant_count: int = 300
    max_generations: int = 400
    seed: int = 0

    def __post_init__(self):
        if not self.immigrant_count < self.population_size:
            raise ValueError("immigrant_count must be < population_size")
        if not self.elites < self.population_size:
            raise ValueError("elites must be < population_size")

    @staticmethod
    def scaled(population_size: int, max_generations: int, seed: int = 0) -> "GaConfig":
        """Desk-scale config keeping the 75% immigration fraction."""
        return GaConfig(
            population_size=population_size,
            max_generations=max_generations,
            immigrant_count=(3 * population_size) // 4,
            seed=seed,
        )


def decode_value(code: int, lo: float, hi: float, bits: int = 8) -> float:
    levels = (1 << bits) - 1
    return lo + (code / levels) * (hi - lo)


def encode_value(x: float, lo: float, hi: float, bits: int = 8) -> int:
    levels = (1 << bits) - 1
    code = int(round((x - lo) / (hi - lo) * levels))
    return min(max(code, 0), levels)


def decode(genome: np.ndarray, bounds: Sequence[tuple[float, float]], bits: int = 8):
    """Bit array -> list of variable values, MSB first per field."""
    if len(genome) != bits * len(bounds):
        raise ValueError(
            f"genome length {len(genome)} != {bits} x {len(bounds)} variables"
        )
    values = []
    for k, (lo, hi) in enumerate(bounds):
        code = 0
        for b in genome[k * bits : (k + 1) * bits]:
            code = (code << 1) | int(b)
        values.append(decode_value(code, lo, hi, bits))
    return values


def encode(values: Sequence[float], bounds: Sequence[tuple[float, float]], bits: int = 8):
    genome = np.zeros(bits * len(bounds), dtype=np.uint8)
    for k, ((lo, hi), x) in enumerate(zip(bounds, values)):
        code = encode_value(x, lo, hi, bits)
        for j in range(bits):
            genome[k * bits + j] = (code >> (bits - 1 - j)) & 1
    return genome


def decode_design(
    genome: np.ndarray,
    active: Sequence[str],
    base: DesignVector,
    bits: int = 8,
) -> DesignVector:
    """Decode a genome over the active variables, others frozen at ``base``."""
    bounds = [DESIGN_BOUNDS[name] for name in active]
    values = decode(genome, bounds, bits)
    return base.replace(**dict(zip(active, values)))


def encode_design(design: DesignVector, active: Sequence[str], bits: int = 8):
    bounds = [DESIGN_BOUNDS[name] for name in active]
    return encode([getattr(design, name) for name in active], bounds, bits)


@dataclass
class GaHistory:
    best: list[float] = field(default_factory=list)
    mean: list[float] = field(default_factory=list)
    feasible_fraction: list[float] = field(default_factory=list)


@dataclass
class GaResult:
    best_genome: np.ndarray
    best_value: float
    history: GaHistory
    evaluations: int


def ga_run(
    objective: Callable[[np.ndarray], float],
    config: GaConfig,
    genome_length: int,
    initial_genomes: Sequence[np.ndarray] = (),
    feasible_threshold: float = 1e6,
) -> GaResult:
    """Minimize a pure objective over fixed-length bitstrings.

    Deterministic given the seed: the population is evaluated and merged
    in index order. Repeated genomes hit a value cache, which matters a
    lot once the population starts converging.
    """
    rng = np.random.default_rng(config.seed)
    pop_size = config.population_size
    L = genome_length

    population = rng.integers(0, 2, size=(pop_size, L)).astype(np.uint8)
    for i, g in enumerate(initial_genomes):
        if i >= pop_size:
            break
        if len(g) != L:
            raise ValueError("initial genome length mismatch")
        population[i] = g

    cache: dict[bytes, float] = {}
    evaluations = 0

    def evaluate(pop: np.ndarray) -> np.ndarray:
        nonlocal evaluations
        values = np.empty(len(pop))
        for i, genome in enumerate(pop):
            key = genome.tobytes()
            if key not in cache:
                cache[key] = float(objective(genome))
                evaluations += 1
            values[i] = cache[key]
        return values

    history = GaHistory()
    best_genome = population[0].copy()
    best_value = np.inf

    fitness = evaluate(population)
    for gen in range(config.max_generations):
        # Immigration: refill the worst fraction with fresh random genomes.
        if gen > 0 and gen % config.immigration_interval == 0:
            order = np.argsort(fitness, kind="stable")
            survivors = order[: pop_size - config.immigrant_count]
            immigrants = rng.integers(
                0, 2, size=(config.immigrant_count, L)
            ).astype(np.uint8)
            population = np.concatenate([population[survivors], immigrants])
            fitness = evaluate(population)

        gen_best = int(np.argmin(fitness))
        if fitness[gen_best] < best_value:
            best_value = float(fitness[gen_best])
            best_genome = population[gen_best].copy()
        history.best.append(best_value)
        history.mean.append(float(fitness.mean()))
        history.feasible_fraction.append(
            float(np.mean(fitness < feasible_threshold))
        )

        if gen == config.max_generations - 1:
            break

        # Elites, then tournament selection + crossover + mutation.
        order = np.argsort(fitness, kind="stable")
        children = [population[i].copy() for i in order[: config.elites]]
        # Best-so-far always survives, including across immigration events.
        if not any(np.array_equal(c, best_genome) for c in children):
            children[0] = best_genome.copy()
        while len(children) < pop_size:
            parents = []
            for _ in range(2):
                contenders = rng.integers(0, pop_size, size=config.tournament_size)
                winner = min(contenders, key=lambda i: fitness[i])
                parents.append(population[winner])
            a, b = parents[0].copy(), parents[1].copy()
            if rng.random() < config.crossover_rate and L > 1:
                cut = int(rng.integers(1, L))
                a[cut:], b[cut:] = parents[1][cut:], parents[0][cut:]
            for child in (a, b):
                if rng.random() < config.mutation_rate:
                    child[rng.integers(0, L)] ^= 1
                if len(children) < pop_size:
                    children.append(child)
        population = np.array(children, dtype=np.uint8)
        fitness = evaluate(population)

    return GaResult(
        best_genome=best_genome,
        best_value=best_value,
        history=history,
        evaluations=evaluations,
    )
