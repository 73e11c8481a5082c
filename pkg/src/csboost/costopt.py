"""Genetic search over per-class cost vectors.

Fitness of a cost vector is the validation MAvG of a cost-sensitive
ensemble trained with it. The rarest class's cost is pinned to a fixed
value in every member of every generation; the search only moves the
other entries, inside [cost_low, cost_high].
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .boost import CostVector, Variant, fit, predict_batch
from .data import Dataset
from .errors import ConfigError, ContractError, InfeasibleError
from .metrics import confusion_matrix, mavg, recall_per_class

__all__ = [
    "GAConfig",
    "GAGeneration",
    "GATrace",
    "tune_costs",
    "roulette_select",
    "crossover",
    "mutate",
    "write_ga_trace_csv",
]


@dataclass(frozen=True)
class GAConfig:
    """Knobs of the genetic search.

    generations counts the populations built after the initial one, so
    generations=0 evaluates only the initial population.
    """

    population_size: int = 10
    generations: int = 10
    cost_low: float = 0.95
    cost_high: float = 0.999
    fixed_minority_cost: float = 0.999
    mutation_scale: float = 0.001
    seed: int = 0
    elitism: bool = True

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 0:
            raise ConfigError("generations must be >= 0")
        if not (0.0 < self.cost_low < self.cost_high <= 1.0):
            raise ConfigError("need 0 < cost_low < cost_high <= 1")
        if not (0.0 < self.fixed_minority_cost <= 1.0):
            raise ConfigError("fixed_minority_cost must lie in (0, 1]")
        if not self.mutation_scale > 0:
            raise ConfigError("mutation_scale must be positive")

    @classmethod
    def from_dict(cls, doc: dict) -> "GAConfig":
        allowed = {f: None for f in ("population_size", "generations",
                                     "cost_low", "cost_high",
                                     "fixed_minority_cost", "mutation_scale",
                                     "seed", "elitism")}
        unknown = set(doc) - set(allowed)
        if unknown:
            raise ConfigError(f"unknown GAConfig fields: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "GAConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid GAConfig JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConfigError("GAConfig JSON must be an object")
        return cls.from_dict(doc)


@dataclass(frozen=True, eq=False)
class GAGeneration:
    """One population snapshot: M cost vectors and their fitness values."""

    index: int
    members: np.ndarray
    fitness: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.fitness))

    @property
    def best_fitness(self) -> float:
        return float(self.fitness[self.best_index])

    @property
    def best_member(self) -> np.ndarray:
        return self.members[self.best_index]


@dataclass(frozen=True, eq=False)
class GATrace:
    generations: tuple[GAGeneration, ...]

    def best_fitness_per_generation(self) -> np.ndarray:
        return np.array([g.best_fitness for g in self.generations])


def roulette_select(fitness, rng: np.random.Generator) -> int:
    """Index drawn with probability proportional to fitness.

    An all-zero fitness vector falls back to a uniform draw, so a
    population where every member scores 0 still evolves.
    """
    f = np.asarray(fitness, dtype=np.float64)
    if f.ndim != 1 or f.size < 1:
        raise ContractError("fitness must be a non-empty vector")
    if (f < 0).any():
        raise ContractError("fitness values must be nonnegative")
    total = float(f.sum())
    if total == 0.0:
        return int(rng.integers(f.size))
    pick = rng.uniform(0.0, total)
    idx = int(np.searchsorted(np.cumsum(f), pick, side="right"))
    return min(idx, f.size - 1)


def crossover(a: CostVector, b: CostVector) -> CostVector:
    """Elementwise midpoint of two parents.

    The midpoint of equal entries is exact in floating point, so a cost
    entry shared by both parents (the pinned minority cost in particular)
    is preserved bit for bit.
    """
    if a.K != b.K:
        raise ContractError(f"parents disagree on K: {a.K} vs {b.K}")
    return CostVector.of((a.cost + b.cost) / 2.0)


def mutate(v: CostVector, ga: GAConfig, rng: np.random.Generator,
           fixed_index: int | None = None) -> CostVector:
    """Add an independent Uniform(-scale, +scale) nudge per entry, clamped
    to [cost_low, cost_high]; the entry at fixed_index is left untouched."""
    if fixed_index is not None and not (0 <= fixed_index < v.K):
        raise ContractError(f"fixed_index out of range for K={v.K}")
    nudged = np.clip(
        v.cost + rng.uniform(-ga.mutation_scale, ga.mutation_scale, v.K),
        ga.cost_low, ga.cost_high)
    if fixed_index is not None:
        nudged[fixed_index] = v.cost[fixed_index]
    return CostVector.of(nudged)


def _fitness(member: np.ndarray, train: Dataset, val: Dataset,
             boost_T: int) -> float:
    """Validation MAvG of a cost-sensitive fit with this cost vector.

    A degenerate fit with zero accepted rounds cannot predict and scores 0.
    """
    model, _ = fit(train, Variant.SAMME_C2, boost_T, CostVector.of(member))
    if model.n_rounds == 0:
        return 0.0
    preds = predict_batch(model, val)
    return mavg(recall_per_class(confusion_matrix(val.labels, preds, val.K)))


def tune_costs(train: Dataset, val: Dataset, boost_T: int,
               ga: GAConfig) -> tuple[CostVector, GATrace]:
    """Evolve cost vectors toward maximal validation MAvG.

    The initial population draws every entry from Uniform[cost_low,
    cost_high] and pins the rarest training class (ties to the higher
    class index) at fixed_minority_cost. Each later generation keeps an
    unmodified copy of the best member when elitism is on, and fills the
    rest with mutate(crossover(select, select)) children. Returns the best
    vector ever seen (earliest on ties) and the full trace.
    """
    if train.K != val.K:
        raise ContractError(f"train K={train.K} differs from val K={val.K}")
    if train.n_features != val.n_features:
        raise ContractError("train and val feature dimensions differ")
    if boost_T < 1:
        raise ContractError("boost_T must be >= 1")
    missing = np.flatnonzero(val.class_counts == 0) + 1
    if missing.size:
        raise InfeasibleError(
            f"validation set lacks class {int(missing[0])}; MAvG undefined")

    K = train.K
    counts = train.class_counts
    fixed_index = K - 1 - int(np.argmin(counts[::-1]))

    rng = np.random.default_rng(ga.seed)
    M = ga.population_size
    members = rng.uniform(ga.cost_low, ga.cost_high, (M, K))
    members[:, fixed_index] = ga.fixed_minority_cost

    best_vector: np.ndarray | None = None
    best_fitness = -1.0
    generations: list[GAGeneration] = []
    fitness = np.empty(M)

    for gen in range(ga.generations + 1):
        if gen > 0:
            children = []
            cached: float | None = None
            if ga.elitism:
                elite = int(np.argmax(fitness))
                children.append(members[elite].copy())
                cached = float(fitness[elite])
            while len(children) < M:
                pa = members[roulette_select(fitness, rng)]
                pb = members[roulette_select(fitness, rng)]
                child = mutate(crossover(CostVector.of(pa), CostVector.of(pb)),
                               ga, rng, fixed_index=fixed_index)
                children.append(child.cost)
            members = np.array(children)
            # All random draws for this generation happen above, before any
            # fitness evaluation, so evaluations stay order-independent.
            fitness = np.empty(M)
            start = 0
            if ga.elitism:
                fitness[0] = cached
                start = 1
            for m in range(start, M):
                fitness[m] = _fitness(members[m], train, val, boost_T)
        else:
            for m in range(M):
                fitness[m] = _fitness(members[m], train, val, boost_T)

        generations.append(GAGeneration(gen, members.copy(), fitness.copy()))
        gen_best = int(np.argmax(fitness))
        if float(fitness[gen_best]) > best_fitness:
            best_fitness = float(fitness[gen_best])
            best_vector = members[gen_best].copy()

    return CostVector.of(best_vector), GATrace(tuple(generations))


def write_ga_trace_csv(trace: GATrace, path, K: int) -> None:
    """CSV with one row per (generation, member): costs then fitness."""
    header = ["generation", "member"] + \
        [f"cost_{k}" for k in range(1, K + 1)] + ["mavg"]
    lines = [",".join(header)]
    for g in trace.generations:
        for m in range(g.members.shape[0]):
            cells = [str(g.index), str(m)]
            cells += [repr(float(c)) for c in g.members[m]]
            cells.append(repr(float(g.fitness[m])))
            lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")
