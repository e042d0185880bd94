"""
Deterministic random sub-streams derived from one master seed
"""
import numpy as np

# Purpose codes for solver sub-streams
INIT = 0
DECODE = 1
ALNS = 2
CROSSOVER = 3
MUTATION = 4


def substream(seed, *key):
    """Generator for (seed, *key); identical keys always give identical streams"""
    return np.random.default_rng([int(seed), *[int(k) for k in key]])
