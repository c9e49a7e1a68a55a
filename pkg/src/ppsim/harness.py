"""Session runner and aggregated statistics.

A session executes N protocol rounds, each on its own random stream
derived from the master seed in counter mode (Philox keyed by the seed,
counter = round index).  Identical (config, strategy) inputs therefore
yield bit-identical statistics and round logs, and rounds can be fanned
out to parallel workers without changing the result: aggregation uses
only commutative integer counting, with the float rates derived once at
the end.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import log2
from typing import Iterable, Mapping

import numpy as np

from .adversaries import AdversaryStrategy, StrategySpec, make_strategy
from .protocols import Mode, ProtocolConfig, RoundRecord, run_round


def round_rng(seed: int, index: int) -> np.random.Generator:
    """Independent per-round stream: Philox keyed by seed, counter = index."""
    return np.random.Generator(np.random.Philox(key=seed, counter=index << 192))


def _stream_factory(seed: int):
    """Chunk-local equivalent of :func:`round_rng` without per-round allocation.

    Reuses one Philox generator and rewinds its state to (seed,
    counter = index << 192) before each round; the emitted streams are
    bit-identical to fresh :func:`round_rng` generators.
    """
    bit_gen = np.random.Philox(key=seed)
    gen = np.random.Generator(bit_gen)
    template = bit_gen.state
    counter = template["state"]["counter"]

    def at(index: int) -> np.random.Generator:
        counter[:] = 0
        counter[3] = index
        template["buffer_pos"] = 4   # discard buffered blocks
        template["has_uint32"] = 0   # discard the cached 32-bit half
        bit_gen.state = template
        return gen

    return at


@dataclass(frozen=True)
class RunStats:
    rounds: int
    message_rounds: int
    control_rounds_evaluated: int
    qber: float
    control_failure_rate: float
    anomaly_count: int
    absorbed_total: int
    eve_accuracy: float | None
    eve_mutual_info_bits: float | None
    blind_rounds: int
    seed: int


JointCounts = Mapping[tuple[int, int], float]


def mutual_information(counts: JointCounts) -> float:
    """Plug-in mutual information, in bits, of an (alice, eve) count table.

    I = sum p(a,e) * log2(p(a,e) / (p(a) p(e))) over nonzero cells, with
    the empirical joint p = counts / total.
    """
    total = float(sum(counts.values()))
    if not counts or total <= 0:
        raise ValueError("mutual information needs a nonempty count table")
    pa: Counter = Counter()
    pe: Counter = Counter()
    for (a, e), c in counts.items():
        pa[a] += c
        pe[e] += c
    info = 0.0
    for (a, e), c in sorted(counts.items()):
        if c <= 0:
            continue
        p = c / total
        info += p * log2(p * total * total / (pa[a] * pe[e]))
    return max(info, 0.0)


def channel_mutual_information(counts: JointCounts) -> float:
    """Mutual information of the empirical channel p(e|a) under a uniform input.

    Reweights every observed alice value to equal mass before applying
    the plug-in formula.  For a deterministic, collision-free guess this
    equals log2(#observed alice values) exactly, independent of how the
    message bits happened to split.
    """
    rows: dict[int, Counter] = {}
    for (a, e), c in counts.items():
        if c > 0:
            rows.setdefault(a, Counter())[e] += c
    if not rows:
        raise ValueError("mutual information needs a nonempty count table")
    weight = 1.0 / len(rows)
    reweighted = {
        (a, e): weight * c / sum(row.values())
        for a, row in rows.items()
        for e, c in row.items()
    }
    return mutual_information(reweighted)


def qber(records: Iterable[RoundRecord]) -> float:
    """Fraction of message rounds decoded incorrectly.

    Any differing bit, a decode failure or an erasure makes the round
    one error.
    """
    messages = errors = 0
    for rec in records:
        if rec.mode is Mode.MESSAGE:
            messages += 1
            if rec.bob_bits != rec.alice_bits:
                errors += 1
    if messages == 0:
        raise ValueError("QBER needs at least one message round")
    return errors / messages


class _Accumulator:
    """Streaming, order-independent aggregation of round records."""

    __slots__ = (
        "rounds", "message_rounds", "message_errors", "control_evaluated",
        "control_failures", "anomalies", "absorbed", "blind",
        "guessed_messages", "correct_guesses", "joint",
    )

    def __init__(self) -> None:
        self.rounds = 0
        self.message_rounds = 0
        self.message_errors = 0
        self.control_evaluated = 0
        self.control_failures = 0
        self.anomalies = 0
        self.absorbed = 0
        self.blind = 0
        self.guessed_messages = 0
        self.correct_guesses = 0
        self.joint: Counter = Counter()

    def add(self, rec: RoundRecord) -> None:
        self.rounds += 1
        self.anomalies += rec.anomaly
        self.absorbed += rec.absorbed_count
        self.blind += rec.eve_blind
        if rec.mode is Mode.MESSAGE:
            self.message_rounds += 1
            if rec.bob_bits != rec.alice_bits:
                self.message_errors += 1
            if rec.eve_guess is not None:
                self.guessed_messages += 1
                self.correct_guesses += rec.eve_guess == rec.alice_bits
                self.joint[(rec.alice_bits, rec.eve_guess)] += 1
        elif rec.control_pass is not None:
            self.control_evaluated += 1
            self.control_failures += not rec.control_pass

    def merge(self, other: "_Accumulator") -> None:
        for name in self.__slots__:
            if name == "joint":
                self.joint.update(other.joint)
            else:
                setattr(self, name, getattr(self, name) + getattr(other, name))

    def stats(self, seed: int) -> RunStats:
        guessed = self.guessed_messages
        return RunStats(
            rounds=self.rounds,
            message_rounds=self.message_rounds,
            control_rounds_evaluated=self.control_evaluated,
            qber=self.message_errors / self.message_rounds if self.message_rounds else 0.0,
            control_failure_rate=(
                self.control_failures / self.control_evaluated if self.control_evaluated else 0.0
            ),
            anomaly_count=self.anomalies,
            absorbed_total=self.absorbed,
            eve_accuracy=self.correct_guesses / guessed if guessed else None,
            eve_mutual_info_bits=channel_mutual_information(self.joint) if guessed else None,
            blind_rounds=self.blind,
            seed=seed,
        )


def _run_chunk(cfg: ProtocolConfig, spec: StrategySpec,
               start: int, stop: int) -> tuple[_Accumulator, list[RoundRecord]]:
    adv: AdversaryStrategy = make_strategy(spec)
    stream_at = _stream_factory(cfg.seed)
    acc = _Accumulator()
    log: list[RoundRecord] = []
    for i in range(start, stop):
        rec = run_round(cfg, adv, stream_at(i))
        acc.add(rec)
        if cfg.log_rounds:
            log.append(rec)
    return acc, log


def run_session(cfg: ProtocolConfig, strategy: StrategySpec,
                workers: int = 1) -> tuple[RunStats, list[RoundRecord]]:
    """Run ``cfg.rounds`` rounds of the configured protocol under attack.

    Returns the aggregated statistics and the round log (empty unless
    ``cfg.log_rounds``).  ``workers`` > 1 splits the rounds over a
    thread pool; the round streams make the result identical to the
    sequential run.
    """
    cfg.validate()
    strategy.validate()
    if workers <= 1:
        acc, log = _run_chunk(cfg, strategy, 0, cfg.rounds)
        return acc.stats(cfg.seed), log

    bounds = np.linspace(0, cfg.rounds, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda se: _run_chunk(cfg, strategy, se[0], se[1]),
            zip(bounds[:-1], bounds[1:]),
        ))
    acc = _Accumulator()
    log = []
    for part_acc, part_log in parts:
        acc.merge(part_acc)
        log.extend(part_log)
    return acc.stats(cfg.seed), log
