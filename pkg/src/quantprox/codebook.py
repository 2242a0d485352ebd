"""Random-codebook waiting-time encoders and their simulated length bounds.

A codebook is an i.i.d. sequence of output letters drawn from a chosen
output distribution.  The waiting-time encoder transmits the index of the
first codeword inside the source letter's distortion ball; the give-up
variant first flips a coin with per-letter success probability and
transmits index 1 on failure.  The simulator draws a fresh codebook per
trial and compares the empirical description lengths against the exact
single-letter bounds.

Randomness is counter-based: trial t of a run seeded with s uses a Philox
stream keyed by (s, t), so trials are reproducible and order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .errors import CodebookExhaustedError, InstanceFormatError, ZeroBallMassError
from .infotheory import LN2, binary_divergence_vec, entropy_nats
from .model import BallTable, InstanceSpec, ball_table

_MASK64 = (1 << 64) - 1


def _stream(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & _MASK64, trial & _MASK64]))


@dataclass(frozen=True)
class Codebook:
    """A finite prefix of an i.i.d. codeword sequence.

    Reproducible: the entries are a pure function of (py, length, seed,
    trial), and extending the length keeps the existing prefix.
    """

    entries: np.ndarray
    seed: int
    trial: int
    generator_id: str

    @classmethod
    def draw(cls, py, length: int, seed: int, trial: int = 0):
        p = np.asarray(getattr(py, "py", py), dtype=float)
        rng = _stream(seed, trial)
        entries = _draw_entries(rng, p, int(length))
        return cls(
            entries=entries,
            seed=int(seed),
            trial=int(trial),
            generator_id=f"philox(key=[{int(seed)},{int(trial)}])",
        )

    def __len__(self):
        return int(self.entries.size)


def _draw_entries(rng, p, count):
    cum = np.cumsum(p)
    u = rng.random(count)
    return np.minimum(np.searchsorted(cum, u, side="right"), p.size - 1).astype(np.int64)


def encode_waiting(x: int, codebook: Codebook, ball: BallTable) -> int:
    """Index (1-based) of the first codeword inside the ball of x."""
    hits = ball.incidence[x][codebook.entries]
    if hits.size == 0 or not hits.any():
        raise CodebookExhaustedError(x, len(codebook))
    return int(np.argmax(hits)) + 1


def encode_giveup(x: int, codebook: Codebook, ball: BallTable, alpha_x: float, rng) -> int:
    """Waiting-time encoding with probability alpha_x, otherwise index 1."""
    alpha_x = float(alpha_x)
    if not 0.0 <= alpha_x <= 1.0:
        raise InstanceFormatError(f"alpha_x must lie in [0, 1], got {alpha_x}")
    if rng.random() < alpha_x:
        return encode_waiting(x, codebook, ball)
    return 1


def elias_gamma(w: int) -> str:
    """Gamma code for a positive integer: floor(log2 w) zeros, then w in binary."""
    w = int(w)
    if w < 1:
        raise InstanceFormatError(f"gamma code requires a positive integer, got {w}")
    level = w.bit_length() - 1
    return "0" * level + format(w, "b")


@dataclass(frozen=True)
class SimulationReport:
    trials: int
    effective_trials: int
    mean_floor_log_w: float  # bits
    se_floor_log_w: float
    mean_gamma_length: float  # bits
    se_gamma_length: float
    empirical_entropy_w: float  # bits
    empirical_excess_rate: float
    se_excess_rate: float
    per_letter_excess_rate: tuple
    bound_waiting_bits: float  # E[-log2 ball mass], full-success reference
    bound_giveup_bits: float  # E[d(alpha||B) + h(alpha)] in bits
    exhaustion_events: int
    exhaustion_rate: float
    insufficient_length: bool
    codebook_len: int
    seed: int

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["per_letter_excess_rate"] = list(self.per_letter_excess_rate)
        return d


def simulate(
    instance: InstanceSpec,
    d,
    py,
    alpha,
    trials: int,
    codebook_len: int = 64,
    seed: int = 0,
) -> SimulationReport:
    """Monte Carlo run of the give-up waiting-time encoder.

    Per trial: draw a fresh codebook keyed by (seed, trial), sample one
    source letter, encode, and record floor(log2 W), the gamma code length,
    and whether the reproduced letter violated the distortion threshold.
    A trial whose codebook is too short is extended by doubling (the prefix
    is preserved); such events are counted and flagged when their rate
    reaches 1e-3.
    """
    trials = int(trials)
    if trials < 1:
        raise InstanceFormatError("trials must be >= 1")
    codebook_len = int(codebook_len)
    if codebook_len < 1:
        raise InstanceFormatError("codebook_len must be >= 1")
    ball = ball_table(instance, d)
    p = np.asarray(getattr(py, "py", py), dtype=float)
    a = np.asarray(getattr(alpha, "alpha", alpha), dtype=float)
    if a.size != instance.m:
        raise InstanceFormatError("alpha profile length does not match the source")
    B = ball.incidence.astype(float) @ p
    for x in np.flatnonzero((a > 0.0) & (B <= 0.0)):
        raise ZeroBallMassError(int(x))

    cum_px = np.cumsum(instance.px)
    cum_py = np.cumsum(p)
    n = p.size

    floor_logs = np.empty(trials)
    gamma_lengths = np.empty(trials)
    excess = np.zeros(trials, dtype=bool)
    w_values = np.empty(trials, dtype=np.int64)
    letter_counts = np.zeros(instance.m, dtype=np.int64)
    letter_excess = np.zeros(instance.m, dtype=np.int64)
    exhaustion_events = 0

    for t in range(trials):
        rng = _stream(seed, t + 1)
        x = int(np.minimum(np.searchsorted(cum_px, rng.random(), side="right"), instance.m - 1))
        give_up = rng.random() >= a[x]
        entries = _draw_entries(rng, p, codebook_len if not give_up else 1)
        if give_up:
            w = 1
            violated = not ball.incidence[x, entries[0]]
        else:
            row = ball.incidence[x]
            hits = row[entries]
            extended = False
            while not hits.any():
                if entries.size >= (1 << 34):  # pragma: no cover - defensive
                    raise CodebookExhaustedError(x, int(entries.size))
                more = _draw_entries(rng, p, entries.size)
                entries = np.concatenate([entries, more])
                hits = row[entries]
                extended = True
            if extended:
                exhaustion_events += 1
            w = int(np.argmax(hits)) + 1
            violated = False
        level = w.bit_length() - 1
        floor_logs[t] = level
        gamma_lengths[t] = 2 * level + 1
        w_values[t] = w
        excess[t] = violated
        letter_counts[x] += 1
        letter_excess[x] += violated

    def _mean_se(values):
        mean = float(values.mean())
        se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
        return mean, se

    mean_l, se_l = _mean_se(floor_logs)
    mean_g, se_g = _mean_se(gamma_lengths)
    rate = float(excess.mean())
    se_rate = math.sqrt(max(rate * (1.0 - rate), 0.0) / trials)

    _, counts = np.unique(w_values, return_counts=True)
    h_w = entropy_nats(counts / trials) / LN2

    with np.errstate(divide="ignore"):
        neglog = -np.log(B) / LN2
    bound_waiting = float(instance.px @ neglog)
    h_alpha = -(xlogy(a, a) + xlogy(1.0 - a, 1.0 - a))
    bound_giveup = float(instance.px @ ((binary_divergence_vec(a, B) + h_alpha) / LN2))

    per_letter = tuple(
        float(letter_excess[x]) / letter_counts[x] if letter_counts[x] else 0.0
        for x in range(instance.m)
    )
    ex_rate = exhaustion_events / trials
    return SimulationReport(
        trials=trials,
        effective_trials=trials,
        mean_floor_log_w=mean_l,
        se_floor_log_w=se_l,
        mean_gamma_length=mean_g,
        se_gamma_length=se_g,
        empirical_entropy_w=float(h_w),
        empirical_excess_rate=rate,
        se_excess_rate=float(se_rate),
        per_letter_excess_rate=per_letter,
        bound_waiting_bits=bound_waiting,
        bound_giveup_bits=bound_giveup,
        exhaustion_events=exhaustion_events,
        exhaustion_rate=float(ex_rate),
        insufficient_length=ex_rate >= 1e-3,
        codebook_len=codebook_len,
        seed=int(seed),
    )
