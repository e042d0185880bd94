"""
Problem and solution data model with earliest-start evaluation
"""
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.settings import EPS
from utils.errors import ContractViolation, InputError

# Violation kinds reported by validate()
SETUP_GAP = "setup-gap"
WINDOW = "window"
TARDINESS_MISMATCH = "tardiness-mismatch"
FITNESS_MISMATCH = "fitness-mismatch"
DUPLICATE = "duplicate"
UNKNOWN_ORDER = "unknown-order"
NEGATIVE_REWARD = "negative-reward"
SHAPE = "shape"


@dataclass(frozen=True)
class Order:
    """One order: revenue, processing time and its time window"""

    id: int
    release: float
    processing: float
    due: float
    deadline: float
    revenue: float
    weight: float

    def __post_init__(self):
        if self.processing <= 0:
            raise InputError(f"Order {self.id}: processing time must be positive, got {self.processing}")
        if self.revenue < 0 or self.weight < 0:
            raise InputError(f"Order {self.id}: revenue and tardiness weight must be non-negative")
        if not self.release <= self.due <= self.deadline:
            raise InputError(
                f"Order {self.id}: expected release <= due <= deadline, "
                f"got {self.release}, {self.due}, {self.deadline}"
            )

    @property
    def latest_start(self):
        return self.deadline - self.processing

    @property
    def unit_revenue(self):
        return self.revenue / self.processing

    @property
    def schedulable(self):
        return self.release + self.processing <= self.deadline + EPS


@dataclass(frozen=True, eq=False)
class Instance:
    """
    Full problem datum. Orders carry ids 1..n; setup is (n+1)x(n+1) with
    row 0 holding the optional dummy-origin setups.
    """

    orders: Tuple[Order, ...]
    setup: np.ndarray
    initial_setup_enabled: bool = False
    label: str = "instance"
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        orders = tuple(self.orders)
        object.__setattr__(self, "orders", orders)
        n = len(orders)
        for index, order in enumerate(orders, 1):
            if order.id != index:
                raise InputError(f"Order ids must run 1..n in order; position {index} holds id {order.id}")
        setup = np.asarray(self.setup, dtype=float)
        if setup.shape != (n + 1, n + 1):
            raise InputError(f"Setup matrix must be {n + 1}x{n + 1}, got {setup.shape[0]}x{setup.shape[1]}")
        if (setup < 0).any():
            raise InputError("Setup times must be non-negative")
        setup = setup.copy()
        np.fill_diagonal(setup, 0.0)
        setup[:, 0] = 0.0
        setup.setflags(write=False)
        object.__setattr__(self, "setup", setup)

        # Plain tuples indexed by order id (slot 0 unused) for the hot loops
        object.__setattr__(self, "setup_rows", tuple(tuple(row) for row in setup.tolist()))
        object.__setattr__(self, "releases", (0.0,) + tuple(float(o.release) for o in orders))
        object.__setattr__(self, "processing_times", (0.0,) + tuple(float(o.processing) for o in orders))
        object.__setattr__(self, "dues", (0.0,) + tuple(float(o.due) for o in orders))
        object.__setattr__(self, "deadlines", (0.0,) + tuple(float(o.deadline) for o in orders))
        object.__setattr__(self, "revenues", (0.0,) + tuple(float(o.revenue) for o in orders))
        object.__setattr__(self, "weights", (0.0,) + tuple(float(o.weight) for o in orders))

    def __len__(self):
        return len(self.orders)

    @property
    def n(self):
        return len(self.orders)

    @property
    def order_ids(self):
        return range(1, len(self.orders) + 1)

    @property
    def horizon(self):
        """Scheduling horizon end, with the horizon start taken as 0"""
        return max((o.deadline for o in self.orders), default=0.0)

    @property
    def total_revenue(self):
        return math.fsum(o.revenue for o in self.orders)

    @property
    def generated(self):
        """True for instances produced by the benchmark generator"""
        return "family" in self.metadata

    def order(self, order_id):
        """Get order by id (1-indexed)"""
        if not 1 <= order_id <= len(self.orders):
            raise InputError(f"Unknown order id: {order_id}")
        return self.orders[order_id - 1]

    def setup_time(self, prev_id, order_id):
        """Setup before order_id when it follows prev_id (None = machine start)"""
        if prev_id is None:
            return self.setup_rows[0][order_id] if self.initial_setup_enabled else 0.0
        return self.setup_rows[prev_id][order_id]

    def start_after(self, prev_id, prev_completion, order_id):
        """Earliest start of order_id right after prev_id finishing at prev_completion"""
        if prev_id is None:
            if self.initial_setup_enabled:
                return max(self.releases[order_id], 0.0) + self.setup_rows[0][order_id]
            return self.releases[order_id]
        return max(self.releases[order_id], prev_completion) + self.setup_rows[prev_id][order_id]

    def tardiness_at(self, order_id, start):
        return max(start + self.processing_times[order_id] - self.dues[order_id], 0.0)

    def reward_at(self, order_id, start):
        """r - w*T without the window check (hot path)"""
        return self.revenues[order_id] - self.weights[order_id] * self.tardiness_at(order_id, start)

    def fits(self, order_id, start):
        return start + self.processing_times[order_id] <= self.deadlines[order_id] + EPS


@dataclass
class Schedule:
    """Accepted orders in processing sequence with their earliest starts"""

    sequence: List[int] = field(default_factory=list)
    starts: List[float] = field(default_factory=list)
    tardiness: List[float] = field(default_factory=list)
    fitness: float = 0.0
    slacks: Optional[Any] = None  # SlackTable, maintained by processors.slack

    def __len__(self):
        return len(self.sequence)

    def __contains__(self, order_id):
        return order_id in self.sequence

    def copy(self):
        return Schedule(
            sequence=list(self.sequence),
            starts=list(self.starts),
            tardiness=list(self.tardiness),
            fitness=self.fitness,
            slacks=self.slacks.copy() if self.slacks is not None else None,
        )

    def same_as(self, other):
        """Exact equality of sequence, starts and fitness"""
        return (self.sequence == other.sequence and self.starts == other.starts
                and self.fitness == other.fitness)

    def completion(self, instance, position):
        return self.starts[position] + instance.processing_times[self.sequence[position]]

    def rewards(self, instance):
        return [instance.revenues[o] - instance.weights[o] * tard
                for o, tard in zip(self.sequence, self.tardiness)]

    def total_tardiness(self):
        return math.fsum(self.tardiness)

    def refresh(self, instance, from_position=0):
        """Recompute tardiness from a position onward and the fitness sum"""
        for k in range(from_position, len(self.sequence)):
            self.tardiness[k] = instance.tardiness_at(self.sequence[k], self.starts[k])
        self.fitness = math.fsum(self.rewards(instance))
        return self

    def unscheduled(self, instance):
        scheduled = set(self.sequence)
        return [o for o in instance.order_ids if o not in scheduled]

    def to_dict(self, instance):
        return {
            "sequence": list(self.sequence),
            "starts": list(self.starts),
            "tardiness": list(self.tardiness),
            "rewards": self.rewards(instance),
            "fitness": self.fitness,
        }


@dataclass(frozen=True)
class Infeasibility:
    """First order of a sequence that cannot finish by its deadline"""

    order_id: int
    position: int
    start: float
    latest_start: float


@dataclass(frozen=True)
class Violation:
    kind: str
    position: Optional[int]
    order_id: Optional[int]
    message: str


def check_sequence(instance, sequence):
    """Raise InputError for unknown or duplicate ids"""
    seen = set()
    for order_id in sequence:
        if not isinstance(order_id, (int, np.integer)) or not 1 <= order_id <= instance.n:
            raise InputError(f"Unknown order id: {order_id}")
        if order_id in seen:
            raise InputError(f"Duplicate order id in sequence: {order_id}")
        seen.add(order_id)


def earliest_start_schedule(instance, sequence):
    """
    Start every order of the sequence as early as the setup and release rules allow.

    Returns a Schedule, or an Infeasibility naming the first order whose
    start exceeds its latest start (deadline - processing).
    """
    sequence = [int(o) for o in sequence]
    check_sequence(instance, sequence)

    schedule = Schedule()
    prev_id = None
    prev_completion = 0.0
    for position, order_id in enumerate(sequence):
        start = instance.start_after(prev_id, prev_completion, order_id)
        if not instance.fits(order_id, start):
            return Infeasibility(order_id, position, start, instance.deadlines[order_id] - instance.processing_times[order_id])
        schedule.sequence.append(order_id)
        schedule.starts.append(start)
        schedule.tardiness.append(instance.tardiness_at(order_id, start))
        prev_id = order_id
        prev_completion = start + instance.processing_times[order_id]

    schedule.fitness = math.fsum(schedule.rewards(instance))
    return schedule


def greedy_schedule(instance, sequence, reject_nonpositive=True):
    """
    Append orders one by one at their earliest start, skipping any that would
    miss the deadline (or earn nothing when reject_nonpositive is set).

    Returns (schedule, rejected ids).
    """
    schedule = Schedule()
    rejected = []
    prev_id = None
    prev_completion = 0.0
    for order_id in sequence:
        start = instance.start_after(prev_id, prev_completion, order_id)
        if not instance.fits(order_id, start):
            rejected.append(order_id)
            continue
        if reject_nonpositive and instance.reward_at(order_id, start) <= 0:
            rejected.append(order_id)
            continue
        schedule.sequence.append(order_id)
        schedule.starts.append(start)
        schedule.tardiness.append(instance.tardiness_at(order_id, start))
        prev_id = order_id
        prev_completion = start + instance.processing_times[order_id]

    schedule.fitness = math.fsum(schedule.rewards(instance))
    return schedule, rejected


def order_reward(order, start):
    """Reward r - w*max(start + t - d, 0) of an order started inside its window"""
    if start < order.release - EPS or start > order.latest_start + EPS:
        raise ContractViolation(
            f"Order {order.id}: start {start} outside [{order.release}, {order.latest_start}]"
        )
    return order.revenue - order.weight * max(start + order.processing - order.due, 0.0)


def propagate_starts(instance, schedule, from_position):
    """
    Recompute earliest starts from from_position forward, stopping at the first
    later order whose start does not change. Returns the last position touched.
    """
    sequence = schedule.sequence
    last = from_position - 1
    for k in range(from_position, len(sequence)):
        prev_id = sequence[k - 1] if k > 0 else None
        prev_completion = schedule.completion(instance, k - 1) if k > 0 else 0.0
        start = instance.start_after(prev_id, prev_completion, sequence[k])
        if k > from_position and start == schedule.starts[k]:
            break
        schedule.starts[k] = start
        schedule.tardiness[k] = instance.tardiness_at(sequence[k], start)
        last = k
    schedule.fitness = math.fsum(schedule.rewards(instance))
    return last


def validate(instance, schedule, tol=EPS, check_rewards=None):
    """Check a schedule against the setup, window, tardiness and fitness rules"""
    violations = []
    n = len(schedule.sequence)
    if len(schedule.starts) != n or len(schedule.tardiness) != n:
        violations.append(Violation(SHAPE, None, None, "sequence, starts and tardiness lengths differ"))
        return violations

    if check_rewards is None:
        check_rewards = instance.generated

    seen = set()
    prev_id = None
    prev_completion = 0.0
    rewards = []
    for position, (order_id, start, tard) in enumerate(zip(schedule.sequence, schedule.starts, schedule.tardiness)):
        if not isinstance(order_id, (int, np.integer)) or not 1 <= order_id <= instance.n:
            violations.append(Violation(UNKNOWN_ORDER, position, order_id, f"unknown order id {order_id}"))
            prev_id = None
            continue
        if order_id in seen:
            violations.append(Violation(DUPLICATE, position, order_id, f"order {order_id} scheduled twice"))
        seen.add(order_id)

        bound = instance.start_after(prev_id, prev_completion, order_id)
        if start < bound - tol:
            violations.append(Violation(
                SETUP_GAP, position, order_id,
                f"order {order_id} starts at {start}, setup and release require {bound}",
            ))
        release = instance.releases[order_id]
        latest = instance.deadlines[order_id] - instance.processing_times[order_id]
        if start < release - tol or start > latest + tol:
            violations.append(Violation(
                WINDOW, position, order_id,
                f"order {order_id} starts at {start}, window allows [{release}, {latest}]",
            ))
        expected = instance.tardiness_at(order_id, start)
        if abs(tard - expected) > tol:
            violations.append(Violation(
                TARDINESS_MISMATCH, position, order_id,
                f"order {order_id} tardiness {tard}, expected {expected}",
            ))
        reward = instance.revenues[order_id] - instance.weights[order_id] * expected
        if check_rewards and reward < -tol:
            violations.append(Violation(NEGATIVE_REWARD, position, order_id, f"order {order_id} reward {reward} < 0"))
        rewards.append(reward)
        prev_id = order_id
        prev_completion = start + instance.processing_times[order_id]

    fitness = math.fsum(rewards)
    if abs(schedule.fitness - fitness) > tol * max(1.0, abs(fitness)):
        violations.append(Violation(
            FITNESS_MISMATCH, None, None, f"fitness {schedule.fitness}, recomputed {fitness}",
        ))
    return violations
