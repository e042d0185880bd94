"""
Exact solver for small instances: depth-first enumeration of accepted
sequences at earliest starts with a revenue bound
"""
from dataclasses import dataclass, field
from typing import List, Optional

from config.settings import ORACLE_N_LIMIT
from processors.schedule import Schedule, earliest_start_schedule
from utils.errors import SizeLimitError


@dataclass
class OracleResult:
    optimal: float
    sequence: List[int] = field(default_factory=list)
    nodes: int = 0
    proven_optimal: bool = True
    schedule: Optional[Schedule] = None

    def to_dict(self):
        return {"optimal": self.optimal, "sequence": list(self.sequence), "nodes": self.nodes}


class SequenceSearch:
    """Enumerates every feasible sequence, branching on higher unit revenue first"""

    def __init__(self, instance, prune=True):
        self.instance = instance
        self.prune = prune
        self.nodes = 0
        self.best_reward = 0.0
        self.best_sequence = []
        candidates = [o for o in instance.order_ids if instance.order(o).schedulable]
        self.branch_order = sorted(
            candidates, key=lambda o: (-instance.revenues[o] / instance.processing_times[o], o)
        )

    def _bound(self, completion, reward, remaining):
        # Each remaining order relaxed to start at max(release, completion); setups
        # need not obey the triangle inequality, so the direct successor start is no bound
        instance = self.instance
        reachable = 0.0
        for order_id in remaining:
            start = max(instance.releases[order_id], completion)
            if instance.fits(order_id, start):
                reachable += max(instance.reward_at(order_id, start), 0.0)
        return reward + reachable

    def _extend(self, sequence, prev_id, completion, reward, remaining):
        self.nodes += 1
        if reward > self.best_reward:
            self.best_reward = reward
            self.best_sequence = list(sequence)
        if self.prune and self._bound(completion, reward, remaining) <= self.best_reward:
            return
        instance = self.instance
        for order_id in remaining:
            start = instance.start_after(prev_id, completion, order_id)
            if not instance.fits(order_id, start):
                continue
            sequence.append(order_id)
            self._extend(
                sequence, order_id, start + instance.processing_times[order_id],
                reward + instance.reward_at(order_id, start),
                [o for o in remaining if o != order_id],
            )
            sequence.pop()

    def run(self):
        self._extend([], None, 0.0, 0.0, self.branch_order)
        return self.best_sequence


def exact_solve(instance, n_limit=ORACLE_N_LIMIT, prune=True):
    """Optimal fitness over all subsets and orderings of an instance with at most n_limit orders"""
    if instance.n > n_limit:
        raise SizeLimitError(f"Exact search supports at most {n_limit} orders, instance has {instance.n}")
    search = SequenceSearch(instance, prune=prune)
    sequence = search.run()
    schedule = earliest_start_schedule(instance, sequence)
    return OracleResult(
        optimal=schedule.fitness,
        sequence=list(schedule.sequence),
        nodes=search.nodes,
        proven_optimal=True,
        schedule=schedule,
    )
