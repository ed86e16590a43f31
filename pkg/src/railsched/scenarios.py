"""Reproducible failure-scenario generation.

Each (railcar, scenario) pair gets its own counter-based substream, so a
scenario set is a pure function of ``(seed, fleet ages, horizon, Weibull
parameters)`` and is identical no matter in which order, or on how many
workers, the entries are produced. A further consequence is prefix
stability: growing a set from K to K' > K scenarios leaves the first K
columns untouched.
"""

from __future__ import annotations

import csv
import hashlib
import zlib
from dataclasses import dataclass

import numpy as np

from .domain import Instance
from .reliability import WeibullParams, sample_failure_time

__all__ = [
    "ScenarioSet",
    "generate_scenarios",
    "derive_seed",
    "write_scenarios",
    "read_scenarios",
]

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    """Per-railcar, per-scenario failure periods with uniform weights.

    ``failure_times[j, k]`` lies in ``[1, num_periods + 1]`` where the top
    value means "no failure within the horizon".
    """

    failure_times: np.ndarray  # (railcars, scenarios) int64
    probabilities: np.ndarray  # (scenarios,)
    seed: int | None = None
    weibull: WeibullParams | None = None

    def __post_init__(self) -> None:
        ft = np.asarray(self.failure_times, dtype=np.int64)
        object.__setattr__(self, "failure_times", ft)
        probs = np.asarray(self.probabilities, dtype=float)
        object.__setattr__(self, "probabilities", probs)
        if ft.ndim != 2:
            raise ValueError("failure_times must be a (railcars, scenarios) matrix")
        if probs.shape != (ft.shape[1],):
            raise ValueError("one probability per scenario required")
        if ft.shape[1] and abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("scenario probabilities must sum to one")
        if ft.size and ft.min() < 1:
            raise ValueError("failure periods must be >= 1")

    @property
    def num_railcars(self) -> int:
        return self.failure_times.shape[0]

    @property
    def num_scenarios(self) -> int:
        return self.failure_times.shape[1]

    def column(self, k: int) -> np.ndarray:
        """Failure periods of every railcar in scenario ``k`` (0-based)."""
        return self.failure_times[:, k]

    def content_hash(self) -> str:
        """Digest of the failure-time matrix, for fair-comparison checks."""
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.failure_times).tobytes())
        h.update(str(self.failure_times.shape).encode())
        return h.hexdigest()


def _pair_uniform(seed: int, railcar: int, scenario: int) -> float:
    """One Unif(0,1) draw from the (railcar, scenario) substream.

    The substream is a Philox counter-based generator keyed by
    ``(seed, (railcar+1) * 2^32 + (scenario+1))`` with railcar and scenario
    0-based; the draw is placed strictly inside the open interval by mapping
    a 53-bit integer through ``(i + 0.5) / 2^53``.
    """
    key = (seed & _MASK64, (((railcar + 1) & _MASK32) << 32) | ((scenario + 1) & _MASK32))
    gen = np.random.Generator(np.random.Philox(key=key))
    return (int(gen.integers(1 << 53)) + 0.5) * 2.0**-53


def generate_scenarios(
    instance: Instance,
    weibull: WeibullParams,
    num_scenarios: int,
    seed: int,
) -> ScenarioSet:
    """Sample a failure period for every (railcar, scenario) pair."""
    if num_scenarios < 1:
        raise ValueError("need at least one scenario")
    ages = instance.require_ages()
    horizon_len = instance.num_periods
    n = instance.num_railcars
    xi = np.empty((n, num_scenarios), dtype=np.int64)
    for j in range(n):
        for k in range(num_scenarios):
            u = _pair_uniform(seed, j, k)
            xi[j, k] = sample_failure_time(weibull, ages[j], horizon_len, u)
    return ScenarioSet(
        failure_times=xi,
        probabilities=np.full(num_scenarios, 1.0 / num_scenarios),
        seed=int(seed),
        weibull=weibull,
    )


def derive_seed(master_seed: int, *labels) -> int:
    """Stable 64-bit child seed for a labelled stream.

    String labels are folded in through CRC32 so that, e.g., in-sample
    replication streams, the out-of-sample stream and the age-sampling
    stream never collide for the same master seed.
    """
    entropy = [int(master_seed) & _MASK64]
    for label in labels:
        if isinstance(label, str):
            entropy.append(zlib.crc32(label.encode("utf-8")))
        else:
            entropy.append(int(label) & _MASK64)
    seq = np.random.SeedSequence(entropy)
    return int(seq.generate_state(1, np.uint64)[0])


def write_scenarios(scenarios: ScenarioSet, path) -> None:
    """Dump a scenario set as columnar CSV with 1-based indices."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["railcar", "scenario", "failure_time"])
        n, num = scenarios.failure_times.shape
        for j in range(n):
            for k in range(num):
                writer.writerow([j + 1, k + 1, int(scenarios.failure_times[j, k])])


def read_scenarios(path, weibull: WeibullParams | None = None) -> ScenarioSet:
    """Load a scenario set written by :func:`write_scenarios`."""
    entries: dict[tuple[int, int], int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            entries[(int(row["railcar"]) - 1, int(row["scenario"]) - 1)] = int(
                row["failure_time"]
            )
    if not entries:
        raise ValueError(f"no scenario rows found in {path}")
    n = 1 + max(j for j, _ in entries)
    num = 1 + max(k for _, k in entries)
    if len(entries) != n * num:
        raise ValueError(f"scenario file {path} is not a complete matrix")
    xi = np.empty((n, num), dtype=np.int64)
    for (j, k), value in entries.items():
        xi[j, k] = value
    return ScenarioSet(
        failure_times=xi,
        probabilities=np.full(num, 1.0 / num),
        seed=None,
        weibull=weibull,
    )
