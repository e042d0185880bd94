"""
Fast insertion of one order into an earliest-start schedule.

Every position is screened with the slack table: positions that keep the
candidate and all later orders free of new tardiness go to PL1 (ranked by
setup increase), positions that still raise the total fitness go to PL2
(ranked by resulting fitness).
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from config.settings import EPS
from processors.schedule import propagate_starts
from processors.slack import attach_slacks, update_after_change
from utils.errors import ContractViolation

FRONT = -1


class PositionClass(str, Enum):
    PL1 = "PL1"
    PL2 = "PL2"


@dataclass(frozen=True)
class PositionCandidate:
    after_position: int  # FRONT (-1) inserts before the first order
    position_class: PositionClass
    start: float
    setup_increase: float = 0.0
    resulting_fitness: Optional[float] = None


def _prefix_rewards(instance, schedule):
    rewards = schedule.rewards(instance)
    prefix = [0.0]
    for reward in rewards:
        prefix.append(prefix[-1] + reward)
    return rewards, prefix


def insertion_fitness(instance, schedule, order_id, after_position, start, rewards=None, prefix=None):
    """Total fitness if order_id is inserted after after_position, starting at start"""
    if rewards is None:
        rewards, prefix = _prefix_rewards(instance, schedule)
    sequence = schedule.sequence
    first_after = after_position + 1
    parts = [prefix[first_after], instance.reward_at(order_id, start)]
    prev_id = order_id
    prev_completion = start + instance.processing_times[order_id]
    for k in range(first_after, len(sequence)):
        successor = sequence[k]
        new_start = instance.start_after(prev_id, prev_completion, successor)
        if new_start == schedule.starts[k] and k > first_after:
            parts.append(prefix[len(sequence)] - prefix[k])
            break
        parts.append(instance.reward_at(successor, new_start))
        prev_id = successor
        prev_completion = new_start + instance.processing_times[successor]
    return math.fsum(parts)


def _screen(instance, schedule, slacks, order_id, after_position):
    """(pl1, start, setup increase) of a feasible, unpruned position, else None"""
    sequence = schedule.sequence
    if after_position == FRONT:
        prev_id = None
        start = instance.start_after(None, 0.0, order_id)
    else:
        prev_id = sequence[after_position]
        if not instance.deadlines[order_id] > instance.releases[prev_id]:
            return None
        prev_completion = schedule.starts[after_position] + instance.processing_times[prev_id]
        start = instance.start_after(prev_id, prev_completion, order_id)

    end = start + instance.processing_times[order_id]
    if end > instance.deadlines[order_id] + EPS:
        return None

    next_position = after_position + 1
    if next_position < len(sequence):
        successor = sequence[next_position]
        postponement = instance.start_after(order_id, end, successor) - schedule.starts[next_position]
        if postponement > slacks.time_slack[next_position] + EPS:
            return None
        no_new_penalty = postponement <= slacks.due_slack[next_position] + EPS
        setup_increase = (instance.setup_time(prev_id, order_id) + instance.setup_rows[order_id][successor]
                          - instance.setup_time(prev_id, successor))
    else:
        no_new_penalty = True
        setup_increase = instance.setup_time(prev_id, order_id)

    return end <= instance.dues[order_id] + EPS and no_new_penalty, start, setup_increase


def classify_position(instance, schedule, slacks, order_id, after_position, rewards=None, prefix=None):
    """
    Classify inserting order_id right after position after_position.

    Returns a PositionCandidate (PL1 or PL2) or None when the position is
    pruned, infeasible, or would not raise the fitness.
    """
    screened = _screen(instance, schedule, slacks, order_id, after_position)
    if screened is None:
        return None
    pl1, start, setup_increase = screened
    if pl1:
        return PositionCandidate(after_position, PositionClass.PL1, start, setup_increase=setup_increase)

    fitness = insertion_fitness(instance, schedule, order_id, after_position, start, rewards, prefix)
    if fitness > schedule.fitness + EPS:
        return PositionCandidate(after_position, PositionClass.PL2, start, resulting_fitness=fitness)
    return None


def candidate_positions(instance, schedule, order_id, slacks=None):
    """All PL1 and PL2 candidates for order_id, front position first"""
    slacks = slacks if slacks is not None else schedule.slacks
    if slacks is None:
        slacks = attach_slacks(instance, schedule)
    rewards, prefix = _prefix_rewards(instance, schedule)
    candidates = []
    for after_position in range(FRONT, len(schedule.sequence)):
        candidate = classify_position(instance, schedule, slacks, order_id, after_position, rewards, prefix)
        if candidate is not None:
            candidates.append(candidate)
    return candidates


def select_position(candidates):
    """Minimal setup increase in PL1, else maximal fitness in PL2; ties go to the earliest position"""
    pl1 = [c for c in candidates if c.position_class is PositionClass.PL1]
    if pl1:
        return min(pl1, key=lambda c: (c.setup_increase, c.after_position))
    pl2 = [c for c in candidates if c.position_class is PositionClass.PL2]
    if pl2:
        return min(pl2, key=lambda c: (-c.resulting_fitness, c.after_position))
    return None


def best_position(instance, schedule, order_id, slacks=None):
    """
    (after_position, start) that select_position would pick from
    candidate_positions, or None. Resulting fitness is only evaluated when no
    PL1 position exists.
    """
    slacks = slacks if slacks is not None else schedule.slacks
    if slacks is None:
        slacks = attach_slacks(instance, schedule)
    processing = instance.processing_times[order_id]
    deadline = instance.deadlines[order_id] + EPS
    best_pl1 = None
    pl2 = []
    for after_position in range(FRONT, len(schedule.sequence)):
        # completions only grow along the sequence
        if after_position != FRONT and schedule.completion(instance, after_position) + processing > deadline:
            break
        screened = _screen(instance, schedule, slacks, order_id, after_position)
        if screened is None:
            continue
        pl1, start, setup_increase = screened
        if pl1:
            if best_pl1 is None or setup_increase < best_pl1[0]:
                best_pl1 = (setup_increase, after_position, start)
        elif best_pl1 is None:
            pl2.append((after_position, start))
    if best_pl1 is not None:
        return best_pl1[1], best_pl1[2]

    best = None
    if pl2:
        rewards, prefix = _prefix_rewards(instance, schedule)
        for after_position, start in pl2:
            fitness = insertion_fitness(instance, schedule, order_id, after_position, start, rewards, prefix)
            if fitness > schedule.fitness + EPS and (best is None or fitness > best[0]):
                best = (fitness, after_position, start)
    return (best[1], best[2]) if best is not None else None


def insert_at(instance, schedule, order_id, after_position, start=None):
    """Insert order_id after after_position and restore starts, fitness and slacks"""
    position = after_position + 1
    if start is None:
        if position == 0:
            start = instance.start_after(None, 0.0, order_id)
        else:
            prev_id = schedule.sequence[position - 1]
            start = instance.start_after(prev_id, schedule.completion(instance, position - 1), order_id)
    schedule.sequence.insert(position, order_id)
    schedule.starts.insert(position, start)
    schedule.tardiness.insert(position, instance.tardiness_at(order_id, start))
    if position + 1 < len(schedule.sequence):
        last_changed = propagate_starts(instance, schedule, position + 1)
    else:
        last_changed = position
        schedule.refresh(instance, from_position=position)
    if schedule.slacks is not None:
        schedule.slacks.insert_placeholder(position)
        update_after_change(instance, schedule.slacks, schedule, position, max(last_changed, position))
    else:
        attach_slacks(instance, schedule)
    return position


def fast_insert(instance, schedule, order_id, slacks=None):
    """
    Insert order_id at the best PL1/PL2 position, in place.

    Returns the position the order now occupies, or None when both lists
    are empty and the schedule is left unchanged.
    """
    if order_id in schedule.sequence:
        raise ContractViolation(f"Order {order_id} is already scheduled")
    if slacks is not None:
        schedule.slacks = slacks
    best = best_position(instance, schedule, order_id)
    if best is None:
        return None
    after_position, start = best
    return insert_at(instance, schedule, order_id, after_position, start)
