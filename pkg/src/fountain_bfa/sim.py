"""Monte Carlo frame-error harness.

A point is one ``(p0, overhead)`` pair.  Trials draw a fresh source, ``m``
encoding rows and channel noise from a generator seeded by
``(master_seed, p0, overhead, trial_index)``, so a point's result does not
depend on batch size or worker count.  Besides the decoder outcome each trial
records ground-truth event flags (E, E1, E3, F, G) for instrumentation.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from . import bounds
from .bfa import decode_efficient_rows, decode_rows, find_basis_rows, sort_by_reliability, Verdict
from .bp import BpConfig, bp_decode_rows
from .channel import ReceivedSymbol, _corrupt, draw_error_pattern
from .gf2 import BitVector
from .lt import encode_bits, random_fountain_rows_bits, rsd, sample_rows_bits

__all__ = [
    "Code", "DecoderKind", "ReliabilityMode", "ExperimentConfig", "TrialOutcome",
    "FerPoint", "ConditionalEstimate", "NoData", "CSV_HEADER", "m_for_overhead",
    "trial_rng", "run_trial", "run_point", "run_sweep", "write_csv", "read_csv",
    "estimate_conditional_F",
]

CSV_HEADER = ("p0", "overhead", "m", "trials", "frame_errors_EF", "frame_errors_E",
              "fer_EF", "fer_E", "bound_one_minus_pE")


class Code(enum.Enum):
    LT = "lt"
    RANDOM = "random"


class DecoderKind(enum.Enum):
    BFA_STRAIGHT = "bfa-straight"
    BFA_EFFICIENT = "bfa-efficient"
    BP = "bp"

    @property
    def is_bfa(self) -> bool:
        return self is not DecoderKind.BP


class ReliabilityMode(enum.Enum):
    NONE = "none"
    OCCURRENCE_COUNT = "occurrence-count"


class NoData(ValueError):
    """No trial satisfied the conditioning event."""


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    l: int
    p0_list: tuple[float, ...] = ()
    overhead_list: tuple[float, ...] = ()
    code: Code = Code.LT
    delta: float = 0.01
    c: float = 0.02
    decoder: DecoderKind = DecoderKind.BFA_EFFICIENT
    max_iter: int = 100
    master_seed: int = 0
    min_frame_errors: int = 50
    max_trials: int = 100_000
    reliability_mode: ReliabilityMode = ReliabilityMode.NONE
    poisson_lambda: float = 2.0
    threads: int = 1
    batch_size: int = 64
    keep_outcomes: bool = False

    def __post_init__(self):
        if self.n < 1 or self.l < 1:
            raise ValueError("n and l must be positive")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_trials < 1:
            raise ValueError("max_trials must be >= 1")
        if self.threads < 1 or self.batch_size < 1:
            raise ValueError("threads and batch_size must be >= 1")
        object.__setattr__(self, "p0_list", tuple(self.p0_list))
        object.__setattr__(self, "overhead_list", tuple(self.overhead_list))


def m_for_overhead(n: int, p0: float, overhead: float) -> int:
    """``round((n + overhead) / p0)``, half-up, using the decimal value of the inputs."""
    q = (n + Fraction(repr(float(overhead)))) / Fraction(repr(float(p0)))
    m = math.floor(q + Fraction(1, 2))
    if m < 1:
        raise ValueError(f"overhead {overhead} gives m = {m} at p0 = {p0}")
    return m


def _float_key(v: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(v)))[0]


def trial_rng(master_seed: int, p0: float, overhead: float, trial: int) -> np.random.Generator:
    """Counter-mode generator for one trial."""
    ss = np.random.SeedSequence([master_seed & (2 ** 64 - 1), _float_key(p0),
                                 _float_key(overhead), trial])
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class TrialOutcome:
    event_E_failed: bool
    event_EF_failed: bool
    verdict: str
    E1: bool
    E3: bool
    F: bool
    G: bool
    wall_time: float = 0.0

    @property
    def E(self) -> bool:
        return not self.event_E_failed


@dataclass
class FerPoint:
    p0: float
    overhead: float
    m: int
    trials: int
    frame_errors_EF: int
    frame_errors_E: int
    bound_one_minus_pE: float | None = None
    censored: bool = False  # max_trials reached before min_frame_errors
    outcomes: list[TrialOutcome] | None = field(default=None, repr=False)

    @property
    def fer_EF(self) -> float:
        return self.frame_errors_EF / self.trials if self.trials else 0.0

    @property
    def fer_E(self) -> float:
        return self.frame_errors_E / self.trials if self.trials else 0.0

    def csv_row(self) -> list[str]:
        b = "" if self.bound_one_minus_pE is None else repr(self.bound_one_minus_pE)
        return [repr(float(self.p0)), repr(float(self.overhead)), str(self.m), str(self.trials),
                str(self.frame_errors_EF), str(self.frame_errors_E),
                repr(self.fer_EF), repr(self.fer_E), b]


def _independent(values: Sequence[int]) -> bool:
    pivots: dict[int, int] = {}
    for v in values:
        while v:
            top = v.bit_length()
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
        else:
            return False
    return True


def _rank(values: Sequence[int]) -> int:
    pivots: dict[int, int] = {}
    for v in values:
        while v:
            top = v.bit_length()
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


def _draw_symbols(config: ExperimentConfig, p0: float, m: int, rng: np.random.Generator, dist):
    """Source rows, received rows (packed) and per-row error patterns."""
    n, l = config.n, config.l
    x = random_fountain_rows_bits(l, rng, n)
    if config.code is Code.LT:
        a_rows = sample_rows_bits(dist, rng, m)
    else:
        a_rows = random_fountain_rows_bits(n, rng, m)

    if config.reliability_mode is ReliabilityMode.NONE:
        ok = rng.random(m) < p0 if p0 < 1 else np.ones(m, dtype=bool)
        rows, patterns = [], []
        for a, good in zip(a_rows, ok.tolist()):
            s = 0 if good else draw_error_pattern(rng, l)
            rows.append(a | ((encode_bits(x, a) ^ s) << n))
            patterns.append(s)
        return x, rows, patterns

    # every encoded symbol is read Poisson-many times, each read corrupted
    # independently; identical reads merge and their count is the reliability
    counts: dict[int, int] = {}
    pattern_of: dict[int, int] = {}
    order: list[int] = []
    for a in a_rows:
        z = encode_bits(x, a)
        for _ in range(int(rng.poisson(config.poisson_lambda))):
            s = _corrupt(rng, p0, l)
            row = a | ((z ^ s) << n)
            if row not in counts:
                counts[row] = 0
                pattern_of[row] = s
                order.append(row)
            counts[row] += 1
    amask = (1 << n) - 1
    syms = [ReceivedSymbol(BitVector(r & amask, n), BitVector(r >> n, l), float(counts[r])) for r in order]
    syms = sort_by_reliability(syms)
    rows = [s.row_bits() for s in syms]
    return x, rows, [pattern_of[r] for r in rows]


def run_trial(config: ExperimentConfig, p0: float, overhead: float, m: int, trial: int,
              dist=None) -> TrialOutcome:
    """One encode / corrupt / decode cycle with ground-truth event flags."""
    t0 = time.perf_counter()
    n, l = config.n, config.l
    if dist is None and config.code is Code.LT:
        dist = rsd(n, config.delta, config.c)
    rng = trial_rng(config.master_seed, p0, overhead, trial)
    x, rows, patterns = _draw_symbols(config, p0, m, rng, dist)

    if config.decoder is DecoderKind.BP:
        res_state = find_basis_rows(rows, n, l) if rows else None
        if rows:
            bp = bp_decode_rows([r & ((1 << n) - 1) for r in rows], [r >> n for r in rows],
                                n, l, p0, BpConfig(max_iterations=config.max_iter))
            ok = bp.x_hat.rows == x
            verdict = "CONVERGED" if bp.converged.all() else "NOT_CONVERGED"
        else:
            ok, verdict = False, "NO_SYMBOLS"
        state = res_state
    else:
        decode = decode_efficient_rows if config.decoder is DecoderKind.BFA_EFFICIENT else decode_rows
        res = decode(rows, n, l) if rows else decode_rows(rows, n, l)
        ok = res.success and res.x_hat.rows == x
        verdict = res.verdict.name
        state = res.state

    correct = [s == 0 for s in patterns]
    if state is not None:
        c_counts, e_counts = [], []
        for j, idx in enumerate(state.basis_index):
            (c_counts if correct[idx - 1] else e_counts).append(state.N[j])
    else:
        c_counts, e_counts = [], []
    E = len(c_counts) >= n
    F = not c_counts or not e_counts or min(c_counts) > max(e_counts)
    F_strict = bool(c_counts) and min(c_counts) > max(e_counts + [0])
    amask = (1 << n) - 1
    E1 = _rank([r & amask for r, ok_ in zip(rows, correct) if ok_]) == n
    E3 = _independent([s for s in patterns if s])
    out = TrialOutcome(event_E_failed=not E, event_EF_failed=not ok, verdict=verdict,
                       E1=E1, E3=E3, F=F, G=E1 and E3 and F_strict,
                       wall_time=time.perf_counter() - t0)
    if config.decoder.is_bfa and out.event_E_failed and not out.event_EF_failed:
        raise AssertionError(f"trial {trial}: decoded without event E")
    if config.decoder.is_bfa and verdict == Verdict.SUCCESS.name and E and F != ok:
        raise AssertionError(f"trial {trial}: success disagrees with event F")
    return out


def _run_batch(config: ExperimentConfig, p0: float, overhead: float, m: int,
               start: int, stop: int) -> list[TrialOutcome]:
    dist = rsd(config.n, config.delta, config.c) if config.code is Code.LT else None
    return [run_trial(config, p0, overhead, m, t, dist) for t in range(start, stop)]


def _bound(config: ExperimentConfig, p0: float, m: int) -> float | None:
    try:
        return 1.0 - bounds.p_E(p0, config.n, config.l, m)
    except (ValueError, OverflowError, MemoryError):
        return None


def run_point(config: ExperimentConfig, p0: float, overhead: float,
              executor: ProcessPoolExecutor | None = None) -> FerPoint:
    """Run trials until ``min_frame_errors`` (E,F) failures or ``max_trials``.

    Outcomes are folded in trial-index order and the point stops at the
    first index where the error target is met, so extra trials computed by
    parallel batches are discarded.
    """
    m = m_for_overhead(config.n, p0, overhead)
    bs = config.batch_size
    kept: list[TrialOutcome] = []
    err_EF = err_E = 0
    next_start = 0
    done = False
    while not done and next_start < config.max_trials:
        width = config.threads if executor is not None else 1
        ranges = []
        for _ in range(width):
            if next_start >= config.max_trials:
                break
            ranges.append((next_start, min(next_start + bs, config.max_trials)))
            next_start = ranges[-1][1]
        if executor is not None:
            futures = [executor.submit(_run_batch, config, p0, overhead, m, a, b) for a, b in ranges]
            batches = [f.result() for f in futures]
        else:
            batches = [_run_batch(config, p0, overhead, m, a, b) for a, b in ranges]
        for batch in batches:
            for o in batch:
                kept.append(o)
                err_EF += o.event_EF_failed
                err_E += o.event_E_failed
                if err_EF >= config.min_frame_errors:
                    done = True
                    break
            if done:
                break
    point = FerPoint(p0=p0, overhead=overhead, m=m, trials=len(kept),
                     frame_errors_EF=err_EF, frame_errors_E=err_E,
                     bound_one_minus_pE=_bound(config, p0, m),
                     censored=err_EF < config.min_frame_errors,
                     outcomes=kept if config.keep_outcomes else None)
    return point


def run_sweep(config: ExperimentConfig, out=None) -> list[FerPoint]:
    """All points of ``p0_list x overhead_list``; writes CSV to ``out`` if given."""
    points = []
    executor = ProcessPoolExecutor(config.threads) if config.threads > 1 else None
    try:
        for p0 in config.p0_list:
            for ov in config.overhead_list:
                points.append(run_point(config, p0, ov, executor))
    finally:
        if executor is not None:
            executor.shutdown()
    if out is not None:
        write_csv(points, out)
    return points


def write_csv(points: Sequence[FerPoint], out) -> None:
    """``out`` is a path or a text stream."""
    if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
        with open(out, "w", newline="") as fh:
            write_csv(points, fh)
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow(p.csv_row())


def read_csv(src) -> list[FerPoint]:
    if isinstance(src, str) and "\n" not in src:
        with open(src, newline="") as fh:
            return read_csv(io.StringIO(fh.read()))
    if isinstance(src, str):
        src = io.StringIO(src)
    reader = csv.DictReader(src)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    points = []
    for row in reader:
        b = row["bound_one_minus_pE"]
        points.append(FerPoint(p0=float(row["p0"]), overhead=float(row["overhead"]), m=int(row["m"]),
                               trials=int(row["trials"]), frame_errors_EF=int(row["frame_errors_EF"]),
                               frame_errors_E=int(row["frame_errors_E"]),
                               bound_one_minus_pE=float(b) if b else None))
    return points


@dataclass(frozen=True)
class ConditionalEstimate:
    estimate: float
    low: float
    high: float
    hits: int
    conditioning: int


def estimate_conditional_F(config: ExperimentConfig, point: FerPoint,
                           confidence: float = 0.95) -> ConditionalEstimate:
    """Empirical P(F | E) with a Wilson interval, from a point run with ``keep_outcomes``."""
    if point.outcomes is None:
        raise ValueError("point was run without keep_outcomes")
    given = [o for o in point.outcomes if o.E]
    if not given:
        raise NoData("no trial satisfied event E")
    hits = sum(o.F for o in given)
    ci = binomtest(hits, len(given)).proportion_ci(confidence, method="wilson")
    return ConditionalEstimate(hits / len(given), float(ci.low), float(ci.high), hits, len(given))
