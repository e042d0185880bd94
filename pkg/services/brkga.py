"""
Random-key population for the memetic solver: bounded-width encoding,
hybrid decoding, good-pair crossover and key normalization
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config.settings import DECODE_RATIO_MAX, DECODE_RATIO_MIN, GENE_EPSILON
from processors.insertion import fast_insert
from processors.schedule import Schedule, greedy_schedule
from processors.slack import attach_slacks
from utils.errors import InputError
from utils.random_streams import CROSSOVER, MUTATION, substream

ELITE = 1
NON_ELITE = 2


@dataclass
class Chromosome:
    """One key per order (index i holds order i+1) plus the cached decode"""

    genes: np.ndarray
    fitness: Optional[float] = None
    schedule: Optional[Schedule] = None

    def __len__(self):
        return len(self.genes)

    @property
    def decoded(self):
        return self.schedule is not None

    def set_genes(self, genes):
        """Replace the keys; the cached decode no longer applies"""
        self.genes = np.asarray(genes, dtype=float)
        self.schedule = None
        self.fitness = None

    def adopt(self, schedule):
        """Cache a schedule produced for these keys (decode or local search)"""
        self.schedule = schedule
        self.fitness = schedule.fitness

    def copy(self):
        return Chromosome(self.genes.copy(), self.fitness,
                          self.schedule.copy() if self.schedule is not None else None)


@dataclass(frozen=True)
class GoodPairMark:
    preceding: int
    following: int
    unit_reward: float


def init_chromosome_bounded(instance, rng):
    """Keys drawn uniformly from each order's window scaled onto [0, 1]"""
    horizon = instance.horizon
    if horizon <= 0:
        raise InputError("Scheduling horizon is zero; bounded keys are undefined")
    low = np.array([o.release for o in instance.orders], dtype=float) / horizon
    high = np.array([o.deadline for o in instance.orders], dtype=float) / horizon
    genes = rng.uniform(low, high) if instance.n else np.zeros(0)
    return Chromosome(np.clip(genes, 0.0, 1.0))


def decode_ratio(instance):
    """Probability of the simple decoder: mean processing time over the horizon"""
    if instance.n == 0 or instance.horizon <= 0:
        return DECODE_RATIO_MAX
    mean_processing = float(np.mean([o.processing for o in instance.orders]))
    return min(max(mean_processing / instance.horizon, DECODE_RATIO_MIN), DECODE_RATIO_MAX)


def decode_order(genes):
    """Order ids by ascending key, ties by id"""
    return [int(i) + 1 for i in np.argsort(np.asarray(genes), kind="stable")]


def simple_decode(instance, genes):
    """Append in key order at earliest start; reject late or non-positive orders"""
    schedule, _ = greedy_schedule(instance, decode_order(genes), reject_nonpositive=True)
    attach_slacks(instance, schedule)
    return schedule


def complex_decode(instance, genes):
    """Fast-insert orders in key order; scheduled orders may move but stay"""
    schedule = Schedule()
    attach_slacks(instance, schedule)
    for order_id in decode_order(genes):
        fast_insert(instance, schedule, order_id)
    return schedule


def decode(instance, chromosome, rng, ratio=None):
    """Hybrid decode: simple with probability ratio, complex otherwise"""
    ratio = decode_ratio(instance) if ratio is None else ratio
    if rng.random() < ratio:
        schedule = simple_decode(instance, chromosome.genes)
    else:
        schedule = complex_decode(instance, chromosome.genes)
    chromosome.adopt(schedule)
    return schedule


def mark_good_pairs(instance, schedule, threshold):
    """Consecutive pairs whose joint reward per unit of spanned time beats threshold"""
    marks = []
    rewards = schedule.rewards(instance)
    for k in range(len(schedule.sequence) - 1):
        first, second = schedule.sequence[k], schedule.sequence[k + 1]
        span = schedule.starts[k + 1] + instance.processing_times[second] - schedule.starts[k]
        if span <= 0:
            continue
        unit_reward = (rewards[k] + rewards[k + 1]) / span
        if unit_reward > threshold:
            marks.append(GoodPairMark(first, second, unit_reward))
    return marks


def nudge_unique(value, taken, epsilon=GENE_EPSILON):
    """Shift value up by epsilon steps until it collides with no other key"""
    while value in taken and value < 1.0:
        value += epsilon
    return min(value, 1.0)


def pin_good_pairs(genes, marks, epsilon=GENE_EPSILON):
    """Working copy of genes with every following order keyed just after its predecessor"""
    pinned = np.array(genes, dtype=float)
    taken = set(pinned.tolist())
    for mark in marks:
        old = pinned[mark.following - 1]
        taken.discard(old)
        value = nudge_unique(pinned[mark.preceding - 1] + epsilon, taken, epsilon)
        pinned[mark.following - 1] = value
        taken.add(value)
    return pinned


def _partners(marks, n):
    partners = [[] for _ in range(n + 1)]
    for mark in marks:
        partners[mark.preceding].append(mark.following)
        partners[mark.following].append(mark.preceding)
    return partners


def intelligent_crossover(instance, elite, non_elite, rng, rho_e, pair_probability, pair_threshold):
    """
    Child built gene by gene in ascending order id. A gene whose good-pair
    partner was already taken from the same parent follows it with
    probability pair_probability; other genes come from the elite parent
    with probability rho_e.
    """
    if len(elite) != len(non_elite):
        raise InputError(f"Parent length mismatch: {len(elite)} vs {len(non_elite)}")
    n = len(elite)
    elite_marks = mark_good_pairs(instance, elite.schedule, pair_threshold) if elite.schedule is not None else []
    non_elite_marks = mark_good_pairs(instance, non_elite.schedule, pair_threshold) if non_elite.schedule is not None else []
    elite_genes = pin_good_pairs(elite.genes, elite_marks)
    non_elite_genes = pin_good_pairs(non_elite.genes, non_elite_marks)
    elite_partners = _partners(elite_marks, n)
    non_elite_partners = _partners(non_elite_marks, n)

    child = np.empty(n, dtype=float)
    source = [0] * (n + 1)
    for order_id in range(1, n + 1):
        draw = rng.random()
        if any(source[p] == ELITE for p in elite_partners[order_id]):
            take_elite = draw < pair_probability
        elif any(source[p] == NON_ELITE for p in non_elite_partners[order_id]):
            take_elite = not draw < pair_probability
        else:
            take_elite = draw < rho_e
        source[order_id] = ELITE if take_elite else NON_ELITE
        child[order_id - 1] = elite_genes[order_id - 1] if take_elite else non_elite_genes[order_id - 1]
    return Chromosome(np.clip(child, 0.0, 1.0))


def normalize_chromosome(chromosome):
    """Key of rank k (1-based, ties by id) becomes k/(n+1); decode order is unchanged"""
    n = len(chromosome.genes)
    if n == 0:
        return chromosome
    ranks = np.empty(n, dtype=float)
    ranks[np.argsort(chromosome.genes, kind="stable")] = np.arange(1, n + 1)
    # The ascending permutation is preserved, so the cached schedule still applies
    chromosome.genes = ranks / (n + 1)
    return chromosome


def normalize_keys(population):
    for chromosome in population:
        normalize_chromosome(chromosome)
    return population


@dataclass
class Population:
    """Chromosomes of one generation; the first elite_count members are carried-over elites"""

    members: List[Chromosome] = field(default_factory=list)
    elite_count: int = 0

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @classmethod
    def initial(cls, instance, size, seed, init_stream):
        return cls([init_chromosome_bounded(instance, substream(seed, 0, m, init_stream)) for m in range(size)])

    def ranked(self):
        """Members by descending fitness, ties keep their current order"""
        return sorted(self.members, key=lambda c: -(c.fitness if c.fitness is not None else float("-inf")))

    def next_generation(self, instance, config, seed, generation):
        """E ∪ M ∪ C: elites survive, mutants are fresh bounded keys, the rest are crossover children"""
        ranked = self.ranked()
        elite = ranked[:config.elite_count]
        non_elite = ranked[config.elite_count:]
        mutants = [
            init_chromosome_bounded(instance, substream(seed, generation, m, MUTATION))
            for m in range(config.mutant_count)
        ]
        children = []
        for m in range(config.crossover_count):
            rng = substream(seed, generation, m, CROSSOVER)
            elite_parent = elite[int(rng.integers(len(elite)))]
            non_elite_parent = non_elite[int(rng.integers(len(non_elite)))]
            children.append(intelligent_crossover(
                instance, elite_parent, non_elite_parent, rng,
                config.rho_e, config.good_pair_probability, config.good_pair_threshold,
            ))
        return Population(elite + mutants + children, elite_count=len(elite))

    def is_elite(self, index):
        """Carried-over elite in a population that also breeds; a lone member is never one"""
        return index < self.elite_count < len(self.members)

    def best(self):
        return self.ranked()[0] if self.members else None
