import numpy as np
import pytest

from processors.insertion import fast_insert
from processors.schedule import Schedule, greedy_schedule, validate
from processors.slack import SlackTable, attach_slacks, compute_slacks, update_after_change
from services.instance_generator import GenSpec, generate
from utils.errors import ContractViolation


def _delayed(instance, schedule, position, delay):
    """Starts after forcing one order to start `delay` later and pushing its successors"""
    starts = list(schedule.starts)
    starts[position] += delay
    for k in range(position + 1, len(schedule.sequence)):
        prev_id = schedule.sequence[k - 1]
        starts[k] = instance.start_after(prev_id, starts[k - 1] + instance.processing_times[prev_id],
                                         schedule.sequence[k])
    return starts


def _random_schedule(instance, rng):
    order = [int(o) for o in rng.permutation(list(instance.order_ids))]
    schedule, _ = greedy_schedule(instance, order, reject_nonpositive=False)
    attach_slacks(instance, schedule)
    return schedule


def test_single_order_slacks(make_instance):
    instance = make_instance([(0, 3, 7, 10, 5, 1)])
    table = compute_slacks(instance, greedy_schedule(instance, [1])[0])
    assert table.time_slack == [7]
    assert table.due_slack == [4]


def test_back_to_back_orders_take_successor_slack(make_instance):
    instance = make_instance([(0, 2, 5, 10, 5, 1), (0, 3, 6, 8, 5, 1)])
    schedule, _ = greedy_schedule(instance, [1, 2])
    table = compute_slacks(instance, schedule)
    assert table.gap == [0, 0]
    assert table.time_slack == [3, 3]  # min(10 - 2, 0 + (8 - 5))
    assert table.due_slack == [1, 1]


def test_idle_gap_is_added_to_successor_slack(make_instance):
    instance = make_instance([(0, 2, 10, 30, 5, 1), (6, 3, 12, 14, 5, 1)])
    schedule, _ = greedy_schedule(instance, [1, 2])
    table = compute_slacks(instance, schedule)
    assert table.gap[0] == 4
    assert table.time_slack == [9, 5]
    assert table.due_slack == [7, 3]


def test_slack_of_infeasible_schedule_is_a_contract_violation(make_instance):
    instance = make_instance([(0, 2, 4, 5, 10, 1)])
    schedule = Schedule(sequence=[1], starts=[4], tardiness=[2], fitness=8)
    with pytest.raises(ContractViolation):
        compute_slacks(instance, schedule)


def test_postponing_by_time_slack_is_the_feasibility_limit():
    rng = np.random.default_rng(5)
    for trial in range(40):
        instance = generate(GenSpec(n=8, tau=0.3, R=0.5, seed=trial))
        schedule = _random_schedule(instance, rng)
        for k, order_id in enumerate(schedule.sequence):
            slack = schedule.slacks.time_slack[k]
            starts = _delayed(instance, schedule, k, slack)
            assert all(instance.fits(o, s) for o, s in zip(schedule.sequence, starts))
            starts = _delayed(instance, schedule, k, slack + 1)
            assert not all(instance.fits(o, s) for o, s in zip(schedule.sequence, starts))


def test_postponing_by_due_slack_adds_no_tardiness():
    rng = np.random.default_rng(8)
    for trial in range(40):
        instance = generate(GenSpec(n=8, tau=0.5, R=0.9, seed=trial))
        schedule = _random_schedule(instance, rng)
        for k in range(len(schedule.sequence)):
            starts = _delayed(instance, schedule, k, schedule.slacks.due_slack[k])
            tardiness = [instance.tardiness_at(o, s) for o, s in zip(schedule.sequence, starts)]
            assert tardiness == schedule.tardiness


def test_no_op_update_leaves_table_unchanged(small_generated):
    schedule = _random_schedule(small_generated, np.random.default_rng(1))
    table = schedule.slacks.copy()
    for k in range(len(schedule.sequence)):
        update_after_change(small_generated, table, schedule, k)
        assert table.matches(schedule.slacks, tol=0.0)


def test_incremental_update_matches_full_recomputation():
    rng = np.random.default_rng(21)
    for trial in range(60):
        instance = generate(GenSpec(n=10, tau=0.5, R=0.5, seed=100 + trial))
        schedule = Schedule()
        attach_slacks(instance, schedule)
        for order_id in rng.permutation(list(instance.order_ids)):
            fast_insert(instance, schedule, int(order_id))
            assert schedule.slacks.matches(compute_slacks(instance, schedule), tol=1e-9)
            assert validate(instance, schedule) == []


def test_table_alignment_checks(small_generated):
    schedule = _random_schedule(small_generated, np.random.default_rng(2))
    table = SlackTable()
    if schedule.sequence:
        with pytest.raises(ContractViolation):
            update_after_change(small_generated, table, schedule, 0)
