import time

import numpy as np
import pytest

from config.settings import (
    TERMINATION_FULL_REVENUE,
    TERMINATION_MAX_ITERATIONS,
    TERMINATION_NO_IMPROVE,
)
from config.solver_config import SolverConfig
from processors.schedule import greedy_schedule, validate
from processors.slack import attach_slacks
from services import solver as solver_module
from services.alns import REJECTED, SA_ACCEPTED, AlnsState, PassResult
from services.brkga import Population, decode
from services.harness import run_grid
from services.instance_generator import GenSpec, generate
from services.oracle import exact_solve
from services.solver import SparrowSolver, run_parameter_set, solve
from utils.errors import ConfigError
from utils.random_streams import INIT


def test_full_revenue_stops_before_the_first_generation(make_instance, quick_config):
    instance = make_instance([(0, 2, 50, 60, 5, 1), (0, 3, 50, 60, 7, 1)])
    result = solve(instance, quick_config)
    assert result.termination_reason == TERMINATION_FULL_REVENUE
    assert result.generations == 0
    assert result.best_fitness == 12
    assert result.trace == [12]
    assert result.alns_invocations == 0


def test_zero_iterations_returns_initial_best(make_instance, quick_config):
    instance = make_instance([(0, 5, 5, 5, 4, 1), (0, 5, 5, 5, 9, 1)])
    result = solve(instance, quick_config.replace(max_iterations=0))
    assert result.termination_reason == TERMINATION_MAX_ITERATIONS
    assert result.generations == 0
    assert len(result.trace) == 1
    assert result.best_fitness in (4, 9)
    assert len(result.best_schedule.sequence) == 1


def test_same_seed_gives_same_run(medium_generated, quick_config):
    config = quick_config.replace(seed=3)
    first = solve(medium_generated, config)
    second = solve(medium_generated, config)
    assert first.best_fitness == second.best_fitness
    assert first.best_schedule.sequence == second.best_schedule.sequence
    assert first.trace == second.trace
    assert first.generations == second.generations


def test_parallel_decode_matches_serial(medium_generated, quick_config):
    serial = solve(medium_generated, quick_config.replace(seed=5))
    threaded = solve(medium_generated, quick_config.replace(seed=5, parallel=True, n_jobs=2))
    assert serial.trace == threaded.trace
    assert serial.best_schedule.sequence == threaded.best_schedule.sequence


def test_trace_is_monotone_and_best_is_valid(medium_generated, quick_config):
    result = solve(medium_generated, quick_config.replace(seed=9))
    assert len(result.trace) == result.generations + 1
    assert all(b >= a for a, b in zip(result.trace, result.trace[1:]))
    assert result.trace[-1] == result.best_fitness
    assert validate(medium_generated, result.best_schedule) == []
    assert result.termination_reason in (TERMINATION_FULL_REVENUE, TERMINATION_MAX_ITERATIONS,
                                         TERMINATION_NO_IMPROVE)
    assert result.generations <= quick_config.max_iterations


def test_result_dict_lists_unscheduled_orders(small_generated, quick_config):
    result = solve(small_generated, quick_config)
    payload = result.to_dict(small_generated)
    assert payload["instance"] == small_generated.label
    assert sorted(payload["schedule"]["sequence"] + payload["unscheduled"]) == list(small_generated.order_ids)
    assert payload["best_fitness"] == result.best_fitness
    assert result.accepted == len(result.best_schedule.sequence)


def test_set_five_never_runs_local_search(small_generated):
    config = SolverConfig.for_parameter_set(5).replace(population_size=10, seed=1)
    result = solve(small_generated, config)
    assert result.alns_invocations == 0
    assert result.parameter_set == 5
    assert all(stats["used"] == 0 for stats in result.operator_stats.values())


def test_set_one_keeps_a_single_member(medium_generated, monkeypatch):
    sizes = []
    original = Population.next_generation

    def spy(self, *args, **kwargs):
        following = original(self, *args, **kwargs)
        sizes.append(len(following))
        return following

    monkeypatch.setattr(Population, "next_generation", spy)
    config = SolverConfig.for_parameter_set(1).replace(max_iterations=30, seed=2)
    result = solve(medium_generated, config)
    assert len(sizes) == result.generations
    assert all(size == 1 for size in sizes)


def test_invalid_parameter_set_tag(small_generated):
    with pytest.raises(ConfigError):
        run_parameter_set(small_generated, 7, seed=0)
    with pytest.raises(ConfigError):
        SparrowSolver(small_generated, SolverConfig(population_size=0))


def test_local_search_only_runs_on_strong_members(medium_generated, quick_config, monkeypatch):
    calls = []

    def fake_pass(instance, schedule, state, best_fitness, rng, bank=None):
        calls.append((schedule.fitness, best_fitness))
        state.record("random", "max_revenue", REJECTED)
        return PassResult(schedule, REJECTED, "random", "max_revenue")

    monkeypatch.setattr(solver_module, "alns_pass", fake_pass)
    config = quick_config.replace(alns_fraction=0.95, max_iterations=10, seed=4)
    solver = SparrowSolver(medium_generated, config)
    result = solver.solve()
    assert calls
    assert len(calls) == result.alns_invocations
    assert all(fitness >= 0.95 * best for fitness, best in calls)



def _annealing_step_down(monkeypatch, instance, member):
    shorter, _ = greedy_schedule(instance, member.schedule.sequence[:-1], reject_nonpositive=False)
    attach_slacks(instance, shorter)

    def fake_pass(instance, schedule, state, best_fitness, rng, bank=None):
        return PassResult(shorter, SA_ACCEPTED, "random", "max_revenue", removed=[member.schedule.sequence[-1]])

    monkeypatch.setattr(solver_module, "alns_pass", fake_pass)
    return shorter


def test_elite_keeps_its_schedule_when_annealing_accepts_a_worse_one(medium_generated, quick_config, monkeypatch):
    member = Population.initial(medium_generated, 1, 0, INIT).members[0]
    decode(medium_generated, member, np.random.default_rng(1), ratio=1.0)
    shorter = _annealing_step_down(monkeypatch, medium_generated, member)
    assert shorter.fitness < member.fitness
    solver = SparrowSolver(medium_generated, quick_config)

    elite = member.copy()
    solver._improve(elite, 0, 1, AlnsState.initial(), member.fitness, protect=True)
    assert elite.fitness == member.fitness
    assert elite.schedule.sequence == member.schedule.sequence

    ordinary = member.copy()
    solver._improve(ordinary, 1, 1, AlnsState.initial(), member.fitness, protect=False)
    assert ordinary.fitness == shorter.fitness
    assert solver.alns_invocations == 2


def test_population_best_never_drops_between_generations(medium_generated, quick_config, monkeypatch):
    bests = []
    original = Population.next_generation

    def spy(self, *args, **kwargs):
        bests.append(max(member.fitness for member in self))
        return original(self, *args, **kwargs)

    monkeypatch.setattr(Population, "next_generation", spy)
    result = solve(medium_generated, quick_config.replace(seed=6, max_no_improve=None, max_iterations=40))
    assert len(bests) == result.generations
    assert all(b >= a - 1e-9 for a, b in zip(bests, bests[1:]))

@pytest.mark.slow
def test_matches_exact_optimum_on_small_instances():
    specs = [GenSpec(n=n, tau=tau, R=0.5, seed=17, replicate=i)
             for i, (n, tau) in enumerate([(5, 0.1), (5, 0.5), (6, 0.3), (6, 0.7), (7, 0.1),
                                           (7, 0.5), (8, 0.3), (8, 0.9), (6, 0.5), (7, 0.3)])]
    config = SolverConfig(population_size=10, max_iterations=300, max_no_improve=60, parameter_set=None)
    matched = 0
    for spec in specs:
        instance = generate(spec)
        optimum = exact_solve(instance).optimal
        found = solve(instance, config).best_fitness
        assert found <= optimum + 1e-9
        matched += int(np.isclose(found, optimum, atol=1e-6))
    assert matched >= 9


@pytest.mark.slow
def test_hybrid_sets_beat_standalone_sets():
    instances = [generate(GenSpec(n=25, tau=tau, R=R, seed=31))
                 for tau in (0.1, 0.5, 0.9) for R in (0.1, 0.5, 0.9)]
    configs = {f"set{tag}": SolverConfig.for_parameter_set(tag) for tag in range(1, 6)}
    runs = run_grid(instances, configs, [0, 1]).runs
    fitness = runs.groupby("config")["fitness"].mean()
    gap_to_best = runs.groupby("config")["gap"].mean()
    for hybrid in ("set2", "set3", "set4"):
        assert fitness[hybrid] > fitness["set5"], hybrid
        assert fitness[hybrid] > fitness["set1"], hybrid
        assert gap_to_best["set5"] >= 2 * gap_to_best[hybrid], hybrid


@pytest.mark.slow
def test_moderate_set_finishes_a_hundred_orders_in_time():
    instance = generate(GenSpec(n=100, tau=0.5, R=0.5, seed=1))
    started = time.perf_counter()
    result = run_parameter_set(instance, 3, seed=0)
    assert time.perf_counter() - started < 120
    assert validate(instance, result.best_schedule) == []
