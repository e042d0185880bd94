"""
Benchmark instance generation: the classic tardiness/range-factor grid and
the satellite, commerce and travelling-repairman families
"""
import os
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from dotenv import dotenv_values

from config import settings
from processors.schedule import Instance, Order
from utils.errors import InputError, ParseError
from utils.format_utils import format_value, round_half_up

CESARET = "cesaret"
SATELLITE = "satellite"
COMMERCE = "commerce"
REPAIRMAN = "repairman"


@dataclass(frozen=True)
class GenSpec:
    """One generated instance: family, size, tardiness and range factors, seed"""

    n: int
    tau: float
    R: float
    family: str = CESARET
    q: Optional[float] = None
    c: Optional[float] = None
    seed: int = 0
    replicate: int = 0

    def __post_init__(self):
        if self.family not in settings.FAMILIES:
            raise InputError(f"Unknown instance family: {self.family}")
        if self.n < 1:
            raise InputError(f"Instance size must be >= 1, got {self.n}")
        if self.tau < 0 or self.R < 0:
            raise InputError("Tardiness and range factors must be non-negative")
        if self.family == COMMERCE and (self.q is None or not 0.0 <= self.q <= 1.0):
            raise InputError(f"Commerce instances need q in [0, 1], got {self.q}")
        if self.family == REPAIRMAN and (self.c is None or self.c < 1.0):
            raise InputError(f"Repairman instances need c >= 1, got {self.c}")

    @property
    def order_count(self):
        if self.family == REPAIRMAN:
            return max(1, round_half_up(self.n * self.c))
        return self.n

    @property
    def label(self):
        parts = [self.family, f"n{self.n}", f"tau{format_value(self.tau)}", f"R{format_value(self.R)}"]
        if self.family == COMMERCE:
            parts.append(f"q{format_value(self.q)}")
        if self.family == REPAIRMAN:
            parts.append(f"c{format_value(self.c)}")
        if self.seed:
            parts.append(f"s{self.seed}")
        parts.append(f"i{self.replicate:02d}")
        return "-".join(parts)

    def stream_key(self):
        """Integer key that separates the random streams of different grid cells"""
        return [
            int(self.seed),
            settings.FAMILIES.index(self.family),
            int(self.n),
            round_half_up(self.tau * 1000),
            round_half_up(self.R * 1000),
            round_half_up((self.q or 0.0) * 1000),
            round_half_up((self.c or 0.0) * 1000),
            int(self.replicate),
        ]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_file(cls, path):
        """Key-value spec file: family, n, tau, R and optionally q, c, seed, replicate"""
        if not os.path.exists(path):
            raise InputError(f"Spec file not found: {path}")
        values = {k.strip().lower(): v for k, v in dotenv_values(path).items() if v is not None}
        return cls.from_mapping(values, path)

    @classmethod
    def from_mapping(cls, values, path=None):
        converters = {"n": int, "tau": float, "r": float, "family": str, "q": float,
                      "c": float, "seed": int, "replicate": int}
        kwargs = {}
        for key, raw in values.items():
            key = key.lower()
            if key not in converters:
                raise ParseError(f"Unknown spec key: {key}", path)
            try:
                kwargs["R" if key == "r" else key] = converters[key](str(raw).strip())
            except ValueError:
                raise ParseError(f"Invalid value for {key}: {raw!r}", path)
        missing = {"n", "tau", "R"} - set(kwargs)
        if missing:
            raise ParseError(f"Missing spec keys: {', '.join(sorted(missing))}", path)
        return cls(**kwargs)


def _v_interval(total, tau, R):
    low = max(round_half_up(total * (1.0 - tau - R / 2.0)), 0)
    high = round_half_up(total * (1.0 - tau + R / 2.0))
    if high < low:
        print(f"⚠️ Due-date interval [{low}, {high}] is empty for tau={tau}, R={R}; widening to [{low}, {low + 1}]")
        high = low + 1
    return low, high


def generate(spec):
    """Draw one instance for spec; the same spec always gives the same instance"""
    rng = np.random.default_rng(spec.stream_key())
    m = spec.order_count
    processing = rng.integers(settings.PROCESSING_RANGE[0], settings.PROCESSING_RANGE[1] + 1, size=m)
    if spec.family == COMMERCE:
        gamma = rng.integers(settings.GAMMA_RANGE[0], settings.GAMMA_RANGE[1] + 1, size=m)
        revenue = (1.0 - spec.q) * gamma + 2.0 * spec.q * processing
    else:
        revenue = rng.integers(settings.REVENUE_RANGE[0], settings.REVENUE_RANGE[1] + 1, size=m)
    setup = rng.integers(settings.SETUP_RANGE[0], settings.SETUP_RANGE[1] + 1, size=(m + 1, m + 1))
    np.fill_diagonal(setup, 0)
    setup[:, 0] = 0
    s_max = int(setup.max())

    total = float(processing.sum())
    if spec.family == REPAIRMAN:
        total *= spec.c
    release_high = round_half_up(spec.tau * total)
    v_low, v_high = _v_interval(total, spec.tau, spec.R)

    orders = []
    for i in range(m):
        t = int(processing[i])
        # d >= b + t by construction; the loop only guards the window invariant
        while True:
            b = int(rng.integers(0, release_high + 1))
            v = int(rng.integers(v_low, v_high + 1))
            d = b + s_max + max(v, t)
            e = d + max(1, round_half_up(spec.R * t))
            if b + t <= e:
                break
        r = revenue[i].item()
        orders.append(Order(id=i + 1, release=b, processing=t, due=d, deadline=e,
                            revenue=r, weight=r / (e - d)))

    metadata = {**spec.to_dict(), "deadline_rule": "e = d + max(1, round(R*t))"}
    return Instance(orders=tuple(orders), setup=setup, label=spec.label, metadata=metadata)


def family_grid(family, seed=0, per_cell=settings.INSTANCES_PER_CELL, sizes=None, factors=None):
    """GenSpecs covering the standard parameter grid of one family"""
    specs = []
    if family == CESARET:
        factors = factors or settings.CESARET_FACTORS
        for n in sizes or settings.CESARET_SIZES:
            for tau in factors:
                for R in factors:
                    specs.extend(GenSpec(n, tau, R, CESARET, seed=seed, replicate=i) for i in range(per_cell))
        return specs

    base_factor = settings.REALISTIC_FAMILY_FACTOR
    if family == SATELLITE:
        for n in sizes or settings.SATELLITE_SIZES:
            specs.extend(GenSpec(n, base_factor, base_factor, SATELLITE, seed=seed, replicate=i)
                         for i in range(per_cell))
    elif family == COMMERCE:
        for n in sizes or (settings.REALISTIC_FAMILY_N,):
            for q in settings.COMMERCE_Q_VALUES:
                specs.extend(GenSpec(n, base_factor, base_factor, COMMERCE, q=q, seed=seed, replicate=i)
                             for i in range(per_cell))
    elif family == REPAIRMAN:
        for n in sizes or (settings.REALISTIC_FAMILY_N,):
            for c in settings.REPAIRMAN_C_VALUES:
                specs.extend(GenSpec(n, base_factor, base_factor, REPAIRMAN, c=c, seed=seed, replicate=i)
                             for i in range(per_cell))
    else:
        raise InputError(f"Unknown instance family: {family}")
    return specs
