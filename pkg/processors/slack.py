"""
Time slack and due time slack of scheduled orders.

Both are computed back to front: the last order's slack comes from its own
window, every earlier order adds the idle gap before its successor to the
successor's slack and caps the result with its own window.
"""
from dataclasses import dataclass, field
from typing import List

from config.settings import EPS
from utils.errors import ContractViolation


@dataclass
class SlackTable:
    """Per-position postponement budgets, aligned with Schedule.sequence"""

    time_slack: List[float] = field(default_factory=list)
    due_slack: List[float] = field(default_factory=list)
    gap: List[float] = field(default_factory=list)

    def __len__(self):
        return len(self.time_slack)

    def copy(self):
        return SlackTable(list(self.time_slack), list(self.due_slack), list(self.gap))

    def insert_placeholder(self, position):
        """Open a slot for a newly inserted order; filled by update_after_change"""
        self.time_slack.insert(position, 0.0)
        self.due_slack.insert(position, 0.0)
        self.gap.insert(position, 0.0)

    def matches(self, other, tol=EPS):
        if len(self) != len(other):
            return False
        return all(
            abs(a - b) <= tol
            for mine, theirs in ((self.time_slack, other.time_slack),
                                 (self.due_slack, other.due_slack),
                                 (self.gap, other.gap))
            for a, b in zip(mine, theirs)
        )


def _position_values(instance, schedule, k, next_time_slack, next_due_slack):
    """(time slack, due slack, gap) of position k given its successor's slacks"""
    order_id = schedule.sequence[k]
    start = schedule.starts[k]
    completion = start + instance.processing_times[order_id]
    own_time = instance.deadlines[order_id] - completion
    own_due = max(instance.dues[order_id] - completion, 0.0)
    if own_time < -EPS:
        raise ContractViolation(f"Order {order_id} at position {k} misses its deadline")
    own_time = max(own_time, 0.0)

    if k == len(schedule.sequence) - 1:
        return own_time, own_due, 0.0

    successor = schedule.sequence[k + 1]
    # Largest delay of this order that leaves the successor's start untouched
    gap = max(schedule.starts[k + 1] - completion - instance.setup_rows[order_id][successor], 0.0)
    time_slack = min(own_time, gap + next_time_slack)
    due_slack = min(own_due, gap + next_due_slack)
    return time_slack, due_slack, gap


def compute_slacks(instance, schedule):
    """Slack table of a feasible schedule, from scratch"""
    n = len(schedule.sequence)
    table = SlackTable([0.0] * n, [0.0] * n, [0.0] * n)
    next_time = next_due = 0.0
    for k in range(n - 1, -1, -1):
        next_time, next_due, gap = _position_values(instance, schedule, k, next_time, next_due)
        table.time_slack[k] = next_time
        table.due_slack[k] = next_due
        table.gap[k] = gap
    return table


def update_after_change(instance, table, schedule, changed_position, last_changed=None):
    """
    Refresh a slack table after the schedule changed at changed_position and
    starts were propagated forward up to last_changed.

    The table must already be aligned with the new sequence (see
    SlackTable.insert_placeholder). Entries after the propagation
    stop are still valid; everything before is recomputed back to front until
    a position in front of the change comes out unchanged.
    """
    n = len(schedule.sequence)
    if len(table) != n:
        raise ContractViolation(f"Slack table has {len(table)} entries for {n} scheduled orders")
    if n == 0:
        return table

    top = changed_position if last_changed is None else max(changed_position, last_changed)
    top = min(max(top, 0), n - 1)
    next_time = table.time_slack[top + 1] if top + 1 < n else 0.0
    next_due = table.due_slack[top + 1] if top + 1 < n else 0.0
    for k in range(top, -1, -1):
        time_slack, due_slack, gap = _position_values(instance, schedule, k, next_time, next_due)
        unchanged = (time_slack == table.time_slack[k] and due_slack == table.due_slack[k]
                     and gap == table.gap[k])
        table.time_slack[k] = time_slack
        table.due_slack[k] = due_slack
        table.gap[k] = gap
        if unchanged and k < changed_position:
            break
        next_time, next_due = time_slack, due_slack
    return table


def attach_slacks(instance, schedule):
    """Compute the table and keep it on the schedule"""
    schedule.slacks = compute_slacks(instance, schedule)
    return schedule.slacks
