"""
Sparrow memetic solver: a random-key genetic algorithm whose members are
improved by adaptive large neighbourhood search
"""
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from joblib import Parallel, delayed

from config.settings import (
    EPS,
    TERMINATION_FULL_REVENUE,
    TERMINATION_MAX_ITERATIONS,
    TERMINATION_NO_IMPROVE,
)
from config.solver_config import SolverConfig
from processors.schedule import Schedule
from services.alns import AlnsState, alns_pass, encode_schedule, update_weights
from services.brkga import Population, decode, normalize_keys
from utils.format_utils import format_duration
from utils.random_streams import ALNS, DECODE, INIT, substream


@dataclass
class SolveResult:
    """Best schedule found and how the run ended"""

    best_schedule: Schedule
    best_fitness: float
    generations: int
    termination_reason: str
    wall_time: float
    trace: List[float] = field(default_factory=list)  # f* after the initial decode, then per generation
    alns_invocations: int = 0
    operator_weights: Dict[str, float] = field(default_factory=dict)
    operator_stats: Dict[str, dict] = field(default_factory=dict)
    parameter_set: Optional[int] = None
    seed: int = 0

    @property
    def accepted(self):
        return len(self.best_schedule.sequence)

    def to_dict(self, instance):
        return {
            "instance": instance.label,
            "parameter_set": self.parameter_set,
            "seed": self.seed,
            "best_fitness": self.best_fitness,
            "generations": self.generations,
            "termination_reason": self.termination_reason,
            "wall_time": self.wall_time,
            "alns_invocations": self.alns_invocations,
            "schedule": self.best_schedule.to_dict(instance),
            "unscheduled": self.best_schedule.unscheduled(instance),
            "operators": self.operator_stats,
            "trace": list(self.trace),
        }


class SparrowSolver:
    """Runs the generation loop for one instance under one configuration"""

    def __init__(self, instance, config=None):
        self.instance = instance
        self.config = (config or SolverConfig()).validate()
        self.alns_invocations = 0

    def _decode_pending(self, population, generation):
        """Decode members that carry no cached schedule"""
        seed = self.config.seed
        pending = [(m, member) for m, member in enumerate(population) if not member.decoded]
        if not pending:
            return
        if self.config.parallel and len(pending) > 1:
            Parallel(n_jobs=self.config.n_jobs, prefer="threads")(
                delayed(decode)(self.instance, member, substream(seed, generation, m, DECODE))
                for m, member in pending
            )
            return
        for m, member in pending:
            decode(self.instance, member, substream(seed, generation, m, DECODE))

    def _improve(self, member, m, generation, state, best_fitness, protect=False):
        """
        One ALNS pass on a member. A carried-over elite keeps its schedule
        when the pass is only accepted by annealing at a lower fitness.
        """
        rng = substream(self.config.seed, generation, m, ALNS)
        result = alns_pass(self.instance, member.schedule, state, best_fitness, rng)
        self.alns_invocations += 1
        if not result.accepted:
            return result
        if protect and result.schedule.fitness < member.fitness - EPS:
            return result
        encode_schedule(member, result, rng)
        return result

    def _termination(self, generation, stale, best_fitness):
        if best_fitness >= self.instance.total_revenue - EPS:
            return TERMINATION_FULL_REVENUE
        if generation >= self.config.max_iterations:
            return TERMINATION_MAX_ITERATIONS
        if stale >= self.config.no_improve_limit(self.instance.n):
            return TERMINATION_NO_IMPROVE
        return None

    def solve(self):
        config = self.config
        instance = self.instance
        started = time.perf_counter()
        if config.verbose:
            print(f"🎯 Solving {instance.label} ({instance.n} orders, {config.tag}, seed {config.seed})")

        state = AlnsState.initial(config)
        population = Population.initial(instance, config.population_size, config.seed, INIT)
        self._decode_pending(population, 0)
        leader = population.best()
        best_fitness = leader.fitness
        best_schedule = leader.schedule.copy()
        trace = [best_fitness]

        generation = 0
        stale = 0
        while True:
            reason = self._termination(generation, stale, best_fitness)
            if reason is not None:
                break
            generation += 1
            self._decode_pending(population, generation)

            improved = False
            for m, member in enumerate(population):
                if config.alns_enabled and member.fitness >= config.alns_fraction * best_fitness:
                    self._improve(member, m, generation, state, best_fitness, population.is_elite(m))
                if member.fitness > best_fitness + EPS:
                    best_fitness = member.fitness
                    best_schedule = member.schedule.copy()
                    improved = True
            stale = 0 if improved else stale + 1
            trace.append(best_fitness)

            population = population.next_generation(instance, config, config.seed, generation)
            state.cool()
            update_weights(state)
            normalize_keys(population)

            if config.verbose and generation % config.progress_every == 0:
                print(f"📊 Generation {generation}: f*={best_fitness:.4f} T={state.temperature:.4f}")

        wall_time = time.perf_counter() - started
        if config.verbose:
            print(f"✅ Stopped after {generation} generations ({reason}), "
                  f"f*={best_fitness:.4f} in {format_duration(wall_time)}")

        return SolveResult(
            best_schedule=best_schedule,
            best_fitness=best_fitness,
            generations=generation,
            termination_reason=reason,
            wall_time=wall_time,
            trace=trace,
            alns_invocations=self.alns_invocations,
            operator_weights=dict(state.weights),
            operator_stats=state.summary(),
            parameter_set=config.parameter_set,
            seed=config.seed,
        )


def solve(instance, config=None):
    """Solve an instance; the configuration is validated before any work"""
    return SparrowSolver(instance, config).solve()


def run_parameter_set(instance, set_tag, seed, base=None):
    """Solve with one of the five parameter sets applied on top of base"""
    config = SolverConfig.for_parameter_set(set_tag, base).replace(seed=seed)
    return solve(instance, config)
