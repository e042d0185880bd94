"""
Adaptive large neighbourhood search: one destroy/repair pass per call,
roulette-wheel operator choice, simulated-annealing acceptance and the key
reassignment that keeps chromosomes consistent with repaired schedules
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config import settings
from config.settings import EPS, GENE_EPSILON, INSERTION_OPERATORS, REMOVAL_OPERATORS
from processors.insertion import fast_insert
from processors.schedule import greedy_schedule
from processors.slack import attach_slacks
from services.brkga import nudge_unique
from utils.errors import ConfigError

NEW_BEST = "new-best"
IMPROVED = "improved"
SA_ACCEPTED = "sa-accepted"
REJECTED = "rejected"
OUTCOMES = (NEW_BEST, IMPROVED, SA_ACCEPTED, REJECTED)


@dataclass
class AlnsState:
    """Operator weights and scores, temperature and score increments shared by a population"""

    weights: Dict[str, float]
    scores: Dict[str, float]
    temperature: float
    reaction_factor: float = settings.REACTION_FACTOR
    cooling: float = settings.COOLING_COEFFICIENT
    sigma1: float = settings.SIGMA_NEW_BEST
    sigma2: float = settings.SIGMA_IMPROVED
    sigma3: float = settings.SIGMA_ACCEPTED
    removal_fraction: float = settings.REMOVAL_FRACTION
    usage: Counter = field(default_factory=Counter)
    outcomes: Dict[str, Counter] = field(default_factory=dict)
    passes: int = 0

    @classmethod
    def initial(cls, config=None, operators=REMOVAL_OPERATORS + INSERTION_OPERATORS):
        if not operators:
            raise ConfigError("ALNS needs at least one operator")
        state = cls(
            weights={op: settings.INITIAL_OPERATOR_WEIGHT for op in operators},
            scores={op: 0.0 for op in operators},
            temperature=settings.INITIAL_TEMPERATURE,
        )
        if config is not None:
            state.temperature = config.initial_temperature
            state.reaction_factor = config.reaction_factor
            state.cooling = config.cooling
            state.sigma1, state.sigma2, state.sigma3 = config.sigma1, config.sigma2, config.sigma3
            state.removal_fraction = config.removal_fraction
        return state

    def group_weights(self, operators):
        return {op: self.weights[op] for op in operators if op in self.weights}

    def credit(self, removal, insertion, amount):
        self.scores[removal] += amount
        self.scores[insertion] += amount

    def record(self, removal, insertion, outcome):
        self.passes += 1
        for op in (removal, insertion):
            self.usage[op] += 1
            self.outcomes.setdefault(op, Counter())[outcome] += 1

    def cool(self):
        self.temperature *= self.cooling
        return self.temperature

    def summary(self):
        return {
            op: {"weight": self.weights[op], "used": self.usage.get(op, 0),
                 **{o: self.outcomes.get(op, Counter()).get(o, 0) for o in OUTCOMES}}
            for op in self.weights
        }


@dataclass
class PassResult:
    schedule: object
    outcome: str
    removal: str
    insertion: str
    removed: List[int] = field(default_factory=list)
    inserted: List[int] = field(default_factory=list)

    @property
    def accepted(self):
        return self.outcome != REJECTED


@dataclass(frozen=True)
class Removal:
    order_id: int
    scheduled: tuple


@dataclass(frozen=True)
class Insertion:
    order_id: int
    prev_id: Optional[int]
    next_id: Optional[int]


def select_operator(weights, rng):
    """Roulette wheel: operator k with probability weight_k / sum of weights"""
    if not weights:
        raise ConfigError("Cannot select from an empty operator set")
    names = list(weights)
    values = [weights[name] for name in names]
    if any(not v > 0 or not math.isfinite(v) for v in values):
        raise ConfigError(f"Operator weights must be positive and finite: {weights}")
    total = math.fsum(values)
    pick = rng.random() * total
    cumulative = 0.0
    for name, value in zip(names, values):
        cumulative += value
        if pick < cumulative:
            return name
    return names[-1]


def removal_count(schedule_size, fraction=settings.REMOVAL_FRACTION):
    return max(1, int(math.floor(fraction * schedule_size)))


def _removal_positions(instance, kind, schedule, count, rng):
    sequence = schedule.sequence
    n = len(sequence)
    if kind == "random":
        return [int(k) for k in rng.choice(n, size=count, replace=False)]
    if kind == "min_revenue":
        return sorted(range(n), key=lambda k: (instance.revenues[sequence[k]], sequence[k]))[:count]
    if kind == "min_unit_revenue":
        return sorted(
            range(n),
            key=lambda k: (instance.revenues[sequence[k]] / instance.processing_times[sequence[k]], sequence[k]),
        )[:count]
    if kind == "max_setup_time":
        incurred = [instance.setup_time(sequence[k - 1] if k > 0 else None, sequence[k]) for k in range(n)]
        return sorted(range(n), key=lambda k: (-incurred[k], sequence[k]))[:count]
    if kind == "sequence":
        return list(range(*worst_run(instance, schedule, count)))
    raise ConfigError(f"Unknown removal operator: {kind}")


def worst_run(instance, schedule, length):
    """(first, end) of the contiguous run with the lowest reward per spanned time"""
    rewards = schedule.rewards(instance)
    best_first, best_value = 0, None
    for first in range(len(schedule.sequence) - length + 1):
        last = first + length - 1
        span = schedule.completion(instance, last) - schedule.starts[first]
        value = math.fsum(rewards[first:last + 1]) / span
        if best_value is None or value < best_value:
            best_first, best_value = first, value
    return best_first, best_first + length


def apply_removal(instance, kind, schedule, count, rng):
    """
    Remove min(count, |S|) orders chosen by kind and restart the rest at
    their earliest starts. Orders that the tighter sequence can no longer fit
    (setups need not obey the triangle inequality) are dropped as well.

    Returns (new schedule, removed ids).
    """
    if kind not in REMOVAL_OPERATORS:
        raise ConfigError(f"Unknown removal operator: {kind}")
    n = len(schedule.sequence)
    if n == 0:
        result = schedule.copy()
        attach_slacks(instance, result)
        return result, []
    count = min(count, n)
    chosen = set(_removal_positions(instance, kind, schedule, count, rng))
    remaining = [o for k, o in enumerate(schedule.sequence) if k not in chosen]
    result, dropped = greedy_schedule(instance, remaining, reject_nonpositive=False)
    attach_slacks(instance, result)
    removed = [schedule.sequence[k] for k in sorted(chosen)] + dropped
    return result, removed


def insertion_priority(instance, kind, bank):
    """Bank sorted by descending revenue or unit revenue, ties by id"""
    if kind == "max_revenue":
        return sorted(bank, key=lambda o: (-instance.revenues[o], o))
    if kind == "max_unit_revenue":
        return sorted(bank, key=lambda o: (-instance.revenues[o] / instance.processing_times[o], o))
    raise ConfigError(f"Unknown insertion operator: {kind}")


def apply_insertion(instance, kind, schedule, bank):
    """Fast-insert bank orders in priority order, in place; inserted orders leave the bank"""
    if schedule.slacks is None:
        attach_slacks(instance, schedule)
    inserted = []
    for order_id in insertion_priority(instance, kind, bank):
        if fast_insert(instance, schedule, order_id) is not None:
            inserted.append(order_id)
    for order_id in inserted:
        bank.remove(order_id)
    return inserted


def sa_accept(current, candidate, temperature, rng):
    """Simulated-annealing test for a candidate fitness against the current one"""
    if candidate > current:
        return True
    if current <= 0:
        return candidate >= current
    rho = math.exp((settings.SA_SCALE / temperature) * ((candidate - current) / current))
    return rng.random() < rho


def acceptance_probability(current, candidate, temperature):
    if candidate > current:
        return 1.0
    if current <= 0:
        return 1.0 if candidate >= current else 0.0
    return math.exp((settings.SA_SCALE / temperature) * ((candidate - current) / current))


def update_weights(state, groups=(REMOVAL_OPERATORS, INSERTION_OPERATORS)):
    """w = (1 - λ) w + λ π / Σπ within each operator group, then clear the scores"""
    lam = state.reaction_factor
    for group in groups:
        members = [op for op in group if op in state.weights]
        total = math.fsum(state.scores[op] for op in members)
        if total <= 0:
            continue
        for op in members:
            updated = (1.0 - lam) * state.weights[op] + lam * state.scores[op] / total
            state.weights[op] = max(updated, settings.MIN_OPERATOR_WEIGHT)
    for op in state.scores:
        state.scores[op] = 0.0
    return state


def alns_pass(instance, schedule, state, best_fitness, rng, bank=None):
    """One destroy and repair of schedule, scored against best_fitness"""
    if schedule.slacks is None:
        attach_slacks(instance, schedule)
    bank = list(schedule.unscheduled(instance)) if bank is None else list(bank)

    removal = select_operator(state.group_weights(REMOVAL_OPERATORS), rng)
    candidate, removed = apply_removal(
        instance, removal, schedule, removal_count(len(schedule.sequence), state.removal_fraction), rng,
    )
    bank.extend(removed)

    insertion = select_operator(state.group_weights(INSERTION_OPERATORS), rng)
    inserted = apply_insertion(instance, insertion, candidate, bank)

    if candidate.fitness > best_fitness + EPS:
        outcome, increment = NEW_BEST, state.sigma1
    elif candidate.fitness > schedule.fitness + EPS:
        outcome, increment = IMPROVED, state.sigma2
    elif sa_accept(schedule.fitness, candidate.fitness, state.temperature, rng):
        outcome, increment = SA_ACCEPTED, state.sigma3
    else:
        outcome, increment = REJECTED, 0.0

    if increment:
        state.credit(removal, insertion, increment)
    state.record(removal, insertion, outcome)
    if outcome == REJECTED:
        return PassResult(schedule, outcome, removal, insertion, removed, inserted)
    return PassResult(candidate, outcome, removal, insertion, removed, inserted)


def _uniform_open(rng, low, high):
    value = float(rng.uniform(low, high))
    if not low < value < high:
        value = (low + high) / 2.0
    return value


def reassign_genes(genes, event, rng):
    """
    Key for an order after a removal (above every scheduled key) or an
    insertion (strictly between its neighbours' keys). Updates genes in place.
    """
    if isinstance(event, Removal):
        g_max = max((genes[o - 1] for o in event.scheduled), default=0.0)
        if g_max >= 1.0:
            value = 1.0
        elif g_max >= 1.0 - GENE_EPSILON:
            value = (g_max + 1.0) / 2.0
        else:
            value = _uniform_open(rng, g_max, 1.0)
    elif isinstance(event, Insertion):
        low = genes[event.prev_id - 1] if event.prev_id is not None else 0.0
        high = genes[event.next_id - 1] if event.next_id is not None else 1.0
        if high - low <= GENE_EPSILON:
            value = nudge_unique(low + GENE_EPSILON / 2.0, set(genes.tolist()))
        else:
            value = _uniform_open(rng, low, high)
    else:
        raise ConfigError(f"Unknown key reassignment event: {event!r}")
    genes[event.order_id - 1] = value
    return genes


def encode_schedule(chromosome, result, rng):
    """
    Align a chromosome with an accepted pass: untouched orders keep their key
    values in schedule order, inserted orders get keys between their
    neighbours, banked orders get keys above every scheduled key.
    """
    genes = np.array(chromosome.genes, dtype=float)
    sequence = result.schedule.sequence
    inserted = set(result.inserted)
    kept = [o for o in sequence if o not in inserted]

    values = sorted(genes[o - 1] for o in kept)
    for k in range(1, len(values)):
        if values[k] <= values[k - 1]:
            values[k] = min(values[k - 1] + GENE_EPSILON, 1.0)
    for order_id, value in zip(kept, values):
        genes[order_id - 1] = value

    for k, order_id in enumerate(sequence):
        if order_id not in inserted:
            continue
        prev_id = sequence[k - 1] if k > 0 else None
        next_id = next((o for o in sequence[k + 1:] if o not in inserted), None)
        reassign_genes(genes, Insertion(order_id, prev_id, next_id), rng)

    scheduled = tuple(sequence)
    g_max = max((genes[o - 1] for o in scheduled), default=0.0)
    removed = set(result.removed)
    scheduled_set = set(scheduled)
    for order_id in range(1, len(genes) + 1):
        if order_id in scheduled_set:
            continue
        if order_id in removed or genes[order_id - 1] <= g_max:
            reassign_genes(genes, Removal(order_id, scheduled), rng)

    chromosome.genes = genes
    chromosome.adopt(result.schedule)
    return chromosome
