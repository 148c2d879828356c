"""Diffusion channel with a fully absorbing spherical receiver.

Physics: a point transmitter releases M molecules per 1-bit; each molecule
diffuses independently in an unbounded 3-D medium and is absorbed by a sphere
of radius r whose centre sits r0 away.  The probability that one molecule has
been absorbed by time t is

    F(t) = (r / r0) * erfc((r0 - r) / sqrt(4 D t)),

so a molecule released at the start of slot j lands in slot j + i - 1 with
probability p_i = F(i ts) - F((i - 1) ts), or is never seen within the
channel memory of L slots.  Molecules from earlier slots absorbed in the
current one are intersymbol interference.

Transport is simulated exactly: one multinomial draw of M trials over
(p_1 .. p_L, remainder) per transmitted 1, since a molecule is absorbed in at
most one slot.  Receiver noise is zero-mean Gaussian added per slot, and
detection thresholds the real-valued slot observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .codebook import Codebook, CodeSpec, build_codebook
from .codec import swap_pairs

CONFIG_KEYS = ("D_um2_per_s", "r_um", "r0_um", "ts_s", "L", "M", "sigma_n2", "seed")


@dataclass(frozen=True)
class ChannelParams:
    """Physical and link parameters.

    D in um^2/s, radii in um, ts in seconds, L in slots, M in molecules per
    1-bit, sigma_n2 in squared molecule counts.
    """

    D: float
    r: float
    r0: float
    ts: float
    L: int
    M: int
    sigma_n2: float

    def __post_init__(self):
        if not (self.r0 > self.r > 0):
            raise ValueError(f"need r0 > r > 0, got r={self.r}, r0={self.r0}")
        if self.D <= 0 or self.ts <= 0:
            raise ValueError("D and ts must be positive")
        if self.L < 1:
            raise ValueError("channel memory L must be at least 1 slot")
        if self.M < 0 or self.sigma_n2 < 0:
            raise ValueError("M and sigma_n2 must be non-negative")

    def with_molecules(self, M: int) -> "ChannelParams":
        return replace(self, M=int(M))

    def with_noise(self, sigma_n2: float) -> "ChannelParams":
        return replace(self, sigma_n2=float(sigma_n2))


def load_channel_config(path) -> tuple[ChannelParams, int]:
    """Read `key = value` lines; all keys required, nothing defaulted."""
    text = Path(path).read_text()
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, val = stripped.partition("=")
        key, val = key.strip(), val.strip()
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = val
    missing = [k for k in CONFIG_KEYS if k not in values]
    if missing:
        raise ValueError(f"{path}: missing required keys: {', '.join(missing)}")
    params = ChannelParams(
        D=float(values["D_um2_per_s"]),
        r=float(values["r_um"]),
        r0=float(values["r0_um"]),
        ts=float(values["ts_s"]),
        L=int(values["L"]),
        M=int(values["M"]),
        sigma_n2=float(values["sigma_n2"]),
    )
    return params, int(values["seed"])


def hitting_prob(t: float, params: ChannelParams) -> float:
    """Probability that one molecule is absorbed within t seconds of release.

    Nondecreasing in t, zero at t = 0, approaching r/r0 as t grows.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    if t == 0:
        return 0.0
    return (params.r / params.r0) * math.erfc(
        (params.r0 - params.r) / math.sqrt(4.0 * params.D * t)
    )


@dataclass(frozen=True)
class SlotProfile:
    """Per-slot absorption probabilities p_1 .. p_L."""

    p: np.ndarray

    def __len__(self) -> int:
        return len(self.p)


def slot_probs(params: ChannelParams) -> SlotProfile:
    """p_i = F(i ts) - F((i-1) ts); partial sums telescope to F(L ts)."""
    f = [hitting_prob(i * params.ts, params) for i in range(params.L + 1)]
    p = np.diff(np.asarray(f, dtype=np.float64))
    if not (p > 0).all():
        raise ValueError("slot probabilities must all be positive; check ts and L")
    p.setflags(write=False)
    return SlotProfile(p=p)


def _probs(profile) -> np.ndarray:
    return np.asarray(getattr(profile, "p", profile), dtype=np.float64)


def isi_of_sequence(word, i: int, profile) -> float:
    """Interference hitting position i of one word from its earlier 1s,
    summed as c_l * p_{i-l+1} over l < i."""
    c = np.asarray(word)
    p = _probs(profile)
    if not (1 <= i <= c.size):
        raise ValueError(f"position {i} outside 1..{c.size}")
    if c.size > p.size:
        raise ValueError("word longer than the channel memory")
    if i == 1:
        return 0.0
    lags = c[i - 2 :: -1].astype(np.float64)  # positions i-1 down to 1
    return float(lags @ p[1 : i])


def expected_isi(words, i: int, profile) -> float:
    """Average of isi_of_sequence over a set of words (rows of a matrix or a
    Codebook; pass transmitted forms to evaluate the swapped code)."""
    mat = words.codewords if isinstance(words, Codebook) else np.atleast_2d(np.asarray(words))
    dens = mat.mean(axis=0)
    p = _probs(profile)
    if not (1 <= i <= mat.shape[1]):
        raise ValueError(f"position {i} outside 1..{mat.shape[1]}")
    if i == 1:
        return 0.0
    return float(dens[i - 2 :: -1] @ p[1 : i])


def streaming_expected_isi(densities, position: int, profile) -> float:
    """Expected interference at one codeword position inside an endless
    stream of codewords, extending the per-position densities periodically
    into earlier codewords.  Exact for any bit correlations because the
    interference is linear in the transmitted bits."""
    dens = np.asarray(densities, dtype=np.float64)
    p = _probs(profile)
    n = dens.size
    if not (1 <= position <= n):
        raise ValueError(f"position {position} outside 1..{n}")
    total = 0.0
    for g in range(1, p.size):
        total += dens[(position - g - 1) % n] * p[g]
    return total


def stream_average_isi(densities, profile) -> float:
    """Per-slot expected interference of the streamed code, averaged over the
    codeword period; proportional to the code's average bit-1 density."""
    dens = np.asarray(densities, dtype=np.float64)
    p = _probs(profile)
    return float(dens.mean() * p[1:].sum())


def swap_gain(code: Codebook | CodeSpec, profile, t: int) -> float:
    """Change of the two affected interference sums when the transmit swap for
    odd index t is applied alone.

    Swapping positions (ceil(k/2)+t, k+t) changes the summed interference at
    the two following positions by -(2^(k-1) - w) * p_{floor(k/2)+2}, where w
    is the column weight at position k+t.  Never positive, since no column
    outweighs a message column.
    """
    book = code if isinstance(code, Codebook) else build_codebook(code.k, code.m)
    k = book.spec.k
    valid_t = tuple(a - math.ceil(k / 2) for a, _ in swap_pairs(k))
    if t not in valid_t:
        raise ValueError(f"t must be one of {valid_t} for k={k}")
    p = _probs(profile)
    w = book.column_weights[k + t - 1]
    return -(2 ** (k - 1) - w) * float(p[k // 2 + 1])


@dataclass(frozen=True)
class ReceivedFrame:
    """Per-slot observations for a simulated stream and, when a threshold was
    supplied, the per-slot bit decisions."""

    counts: np.ndarray
    decisions: np.ndarray | None


def transmit_counts(
    tx_bits: np.ndarray,
    params: ChannelParams,
    rng: np.random.Generator,
    include_own_slot: bool = True,
) -> np.ndarray:
    """Absorbed-molecule counts per slot for a 0/1 transmit pattern.

    Each 1 releases M molecules whose landing slots are one multinomial draw
    over (p_1 .. p_L, never-absorbed).  With include_own_slot=False the
    same-slot arrivals are dropped, leaving pure interference counts.
    Contributions beyond the pattern end are discarded.
    """
    profile = slot_probs(params)
    L = params.L
    S = int(tx_bits.size)
    counts = np.zeros(S + L, dtype=np.float64)
    ones = np.flatnonzero(tx_bits)
    if params.M > 0 and ones.size:
        pext = np.append(profile.p, 1.0 - profile.p.sum())
        draws = rng.multinomial(params.M, pext, size=ones.size)
        start = 0 if include_own_slot else 1
        for d in range(start, L):
            counts[ones + d] += draws[:, d]
    return counts[:S]


def simulate_stream(
    messages,
    coder,
    params: ChannelParams,
    rng_seed,
    threshold: float | None = None,
) -> ReceivedFrame:
    """Transmit a batch of messages as one contiguous slot stream.

    Words are encoded, concatenated (so each word suffers interference from
    its predecessors), and preceded by L silent warm-up slots that are
    excluded from the returned frame.  Per-slot observations add Gaussian
    noise of variance sigma_n2; identical seeds give identical frames.
    """
    msgs = np.atleast_2d(np.asarray(messages, dtype=np.uint8))
    if msgs.size == 0:
        raise ValueError("need at least one message")
    if msgs.shape[1] != coder.message_len:
        raise ValueError(f"messages must have {coder.message_len} bits each")
    rng = np.random.default_rng(rng_seed)
    words = coder.encode(msgs)
    L = params.L
    tx = np.concatenate([np.zeros(L, dtype=np.uint8), words.reshape(-1)])
    counts = transmit_counts(tx, params, rng)
    if params.sigma_n2 > 0:
        counts = counts + rng.normal(0.0, math.sqrt(params.sigma_n2), size=counts.size)
    counts = counts[L:]
    decisions = detect(counts, threshold) if threshold is not None else None
    return ReceivedFrame(counts=counts, decisions=decisions)


def calibrate_threshold(params: ChannelParams, pilot_length: int, rng_seed) -> float:
    """Detection threshold minimizing the slot error rate of an uncoded pilot.

    The pilot is a stream of i.i.d. equiprobable bits through the same
    channel; candidate thresholds are 256 evenly spaced values spanning
    [0, 2 M p_1] and ties resolve to the lowest one.  Deterministic for a
    fixed seed.  The same threshold is then shared by every code under
    comparison so that detection does not favour any of them.
    """
    if pilot_length < 10_000:
        raise ValueError("pilot must cover at least 10^4 slots")
    profile = slot_probs(params)
    peak = params.M * float(profile.p[0])
    if peak <= 0:
        raise ValueError("cannot calibrate with M * p_1 = 0")
    rng = np.random.default_rng(rng_seed)
    L = params.L
    bits = np.concatenate(
        [np.zeros(L, dtype=np.uint8), rng.integers(0, 2, size=pilot_length, dtype=np.uint8)]
    )
    counts = transmit_counts(bits, params, rng)
    if params.sigma_n2 > 0:
        counts = counts + rng.normal(0.0, math.sqrt(params.sigma_n2), size=counts.size)
    counts, sent = counts[L:], bits[L:]
    grid = np.linspace(0.0, 2.0 * peak, 256)
    on = np.sort(counts[sent == 1])
    off = np.sort(counts[sent == 0])
    misses = np.searchsorted(on, grid, side="left")  # on-counts below threshold
    false_alarms = off.size - np.searchsorted(off, grid, side="left")
    return float(grid[int(np.argmin(misses + false_alarms))])


def detect(counts, threshold: float) -> np.ndarray:
    """Per-slot decisions: 1 where the observation reaches the threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return (np.asarray(counts, dtype=np.float64) >= threshold).astype(np.uint8)
