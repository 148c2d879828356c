"""Experiment drivers reproducing the expected-ISI and BER comparisons.

Two baselines are built in: uncoded transmission and the rate-1/3 repetition
code with majority decoding (the distance-3 single error corrector of length
3).  Other published comparison codes live in external references and are
intentionally not reimplemented here.

Every run is reproducible: trials are partitioned into fixed-size blocks,
each block draws its messages and channel randomness from a generator seeded
by (seed, point index, role, block index), and results are reduced in block
order.  The partitioning does not depend on the worker count, so a run
produces identical CSV bytes at any parallelism level.

BER is measured on decoded message bits.  The detection threshold is
calibrated once per sweep point on an uncoded pilot and shared by all codes
at that point (recorded per row in the CSV and in the manifest).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version
from .bits import as_bits
from .channel import (
    ChannelParams,
    calibrate_threshold,
    expected_isi,
    simulate_stream,
    slot_probs,
    transmit_counts,
)
from .codebook import build_codebook
from .codec import BatchCodec

DEFAULT_BLOCK_SIZE = 25_000
DEFAULT_PILOT_SLOTS = 200_000


def repetition3_encode(bits) -> np.ndarray:
    """Repeat every bit three times."""
    return np.repeat(as_bits(bits), 3)


def repetition3_decode(bits) -> np.ndarray:
    """Majority vote per triple; input length must be a multiple of 3."""
    arr = as_bits(bits)
    if arr.size % 3 != 0:
        raise ValueError(f"length {arr.size} is not a multiple of 3")
    return (arr.reshape(-1, 3).sum(axis=1) >= 2).astype(np.uint8)


class UncodedStream:
    """Pass-through coder: one slot per message bit."""

    label = "uncoded"
    message_len = 1
    block_len = 1

    def encode(self, msgs: np.ndarray) -> np.ndarray:
        return msgs

    def decode(self, words: np.ndarray) -> np.ndarray:
        return words


class Repetition3Stream:
    """Rate-1/3 repetition coder over one message bit per word."""

    label = "rep3"
    message_len = 1
    block_len = 3

    def encode(self, msgs: np.ndarray) -> np.ndarray:
        return np.repeat(msgs, 3, axis=1)

    def decode(self, words: np.ndarray) -> np.ndarray:
        return (words.sum(axis=1, keepdims=True) >= 2).astype(np.uint8)


class CkmStreamCode:
    """Proposed code wrapped for streaming, transmit swaps on by default."""

    def __init__(self, k: int, m: int, post_encoding: bool = True):
        self.codebook = build_codebook(k, m)
        self.post_encoding = post_encoding
        self._codec = BatchCodec(self.codebook, post_encoding=post_encoding)
        self.label = f"ckm:{k},{m}"
        self.message_len = k
        self.block_len = self.codebook.spec.n

    def encode(self, msgs: np.ndarray) -> np.ndarray:
        return self._codec.encode(msgs)

    def decode(self, words: np.ndarray) -> np.ndarray:
        return self._codec.decode(words)

    def transmitted_words(self) -> np.ndarray:
        """The 2^k words as they appear on the channel."""
        return self._codec.encode(self.codebook.message_bits)


def make_coder(label: str, post_encoding: bool = True):
    """Build a coder from its CLI label: ckm:K,M, uncoded, or rep3."""
    if label == "uncoded":
        return UncodedStream()
    if label == "rep3":
        return Repetition3Stream()
    if label.startswith("ckm:"):
        try:
            k_str, m_str = label[4:].split(",")
            return CkmStreamCode(int(k_str), int(m_str), post_encoding=post_encoding)
        except ValueError as exc:
            raise ValueError(f"bad code label {label!r}; expected ckm:K,M") from exc
    raise ValueError(f"unknown code label {label!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    codes: tuple[str, ...]
    channel: ChannelParams
    seed: int
    trials: int
    sweep: tuple[float, ...] = ()
    post_encoding: bool = True
    workers: int = 1
    block_size: int = DEFAULT_BLOCK_SIZE
    pilot_slots: int = DEFAULT_PILOT_SLOTS

    def __post_init__(self):
        if not self.codes:
            raise ValueError("select at least one code")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.workers < 1 or self.block_size < 1:
            raise ValueError("workers and block_size must be positive")


@dataclass(frozen=True)
class TrialReport:
    kind: str
    config: dict
    rows: tuple[dict, ...]
    wall_clock_s: float = field(compare=False, default=0.0)


def _config_echo(config: ExperimentConfig, kind: str) -> dict:
    ch = config.channel
    return {
        "experiment": kind,
        "codes": ",".join(config.codes),
        "D_um2_per_s": ch.D,
        "r_um": ch.r,
        "r0_um": ch.r0,
        "ts_s": ch.ts,
        "L": ch.L,
        "M": ch.M,
        "sigma_n2": ch.sigma_n2,
        "seed": config.seed,
        "trials": config.trials,
        "sweep": ",".join(_fmt(v) for v in config.sweep),
        "post_encoding": config.post_encoding,
        "workers": config.workers,
        "block_size": config.block_size,
        "pilot_slots": config.pilot_slots,
        "version": _version,
    }


# ---------------------------------------------------------------------------
# expected-ISI experiment


def _isi_mc_profile(coder, params: ChannelParams, trials: int, seed) -> np.ndarray:
    """Monte Carlo per-position mean interference (molecules) in a stream."""
    n = coder.block_len
    sums = np.zeros(n, dtype=np.float64)
    done = 0
    block = max(1, DEFAULT_BLOCK_SIZE // max(1, n // 8))
    b = 0
    while done < trials:
        nb = min(block, trials - done)
        rng_msg = np.random.default_rng([seed, 3, b])
        rng_ch = np.random.default_rng([seed, 4, b])
        msgs = rng_msg.integers(0, 2, size=(nb, coder.message_len), dtype=np.uint8)
        words = coder.encode(msgs)
        tx = np.concatenate([np.zeros(params.L, dtype=np.uint8), words.reshape(-1)])
        interference = transmit_counts(tx, params, rng_ch, include_own_slot=False)
        sums += interference[params.L :].reshape(nb, n).sum(axis=0)
        done += nb
        b += 1
    return sums / trials


def run_isi_experiment(config: ExperimentConfig) -> TrialReport:
    """Per-position expected interference, analytic and streamed Monte Carlo.

    The analytic column applies the per-code average densities to a single
    word in isolation; the Monte Carlo column streams words back to back and
    therefore also sees interference crossing word boundaries.  Both are
    reported in molecules (scaled by M).
    """
    t0 = time.monotonic()
    params = config.channel
    profile = slot_probs(params)
    rows = []
    for label in config.codes:
        coder = make_coder(label, post_encoding=config.post_encoding)
        if isinstance(coder, CkmStreamCode):
            words = coder.transmitted_words()
        elif isinstance(coder, Repetition3Stream):
            words = np.array([[0, 0, 0], [1, 1, 1]], dtype=np.uint8)
        else:
            words = np.array([[0], [1]], dtype=np.uint8)
        mc = _isi_mc_profile(coder, params, config.trials, config.seed)
        for pos in range(1, coder.block_len + 1):
            rows.append(
                {
                    "code": coder.label,
                    "ts_s": params.ts,
                    "L": params.L,
                    "position": pos,
                    "expected_isi_analytic": params.M * expected_isi(words, pos, profile),
                    "expected_isi_mc": float(mc[pos - 1]),
                }
            )
    return TrialReport(
        kind="isi",
        config=_config_echo(config, "isi"),
        rows=tuple(rows),
        wall_clock_s=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# BER experiments


def _ber_block(coder, params, theta, seed, point_idx, block_idx, nb):
    rng_msg = np.random.default_rng([seed, point_idx, 1, block_idx])
    msgs = rng_msg.integers(0, 2, size=(nb, coder.message_len), dtype=np.uint8)
    frame = simulate_stream(msgs, coder, params, [seed, point_idx, 2, block_idx], threshold=theta)
    words = frame.decisions.reshape(nb, coder.block_len)
    decoded = coder.decode(words)
    return int((decoded != msgs).sum()), msgs.size


def ber_point(
    coder,
    params: ChannelParams,
    trials: int,
    seed: int,
    point_idx: int = 0,
    workers: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
    pilot_slots: int = DEFAULT_PILOT_SLOTS,
    threshold: float | None = None,
) -> tuple[int, int, float]:
    """Bit errors, bits sent, and the threshold used for one sweep point."""
    if threshold is None:
        threshold = calibrate_threshold(params, pilot_slots, [seed, point_idx, 0])
    sizes = [
        min(block_size, trials - start) for start in range(0, trials, block_size)
    ]
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    lambda job: _ber_block(coder, params, threshold, seed, point_idx, *job),
                    jobs,
                )
            )
    else:
        results = [_ber_block(coder, params, threshold, seed, point_idx, b, nb) for b, nb in jobs]
    errors = sum(r[0] for r in results)
    bits = sum(r[1] for r in results)
    return errors, bits, threshold


def _ber_rows(config: ExperimentConfig, sweep_kind: str) -> list[dict]:
    params = config.channel
    rows = []
    for label in config.codes:
        coder = make_coder(label, post_encoding=config.post_encoding)
        if isinstance(coder, CkmStreamCode):
            post = "true" if coder.post_encoding else "false"
        else:
            post = "na"
        for pi, value in enumerate(config.sweep):
            if sweep_kind == "M":
                pt = params.with_molecules(int(value))
            else:
                pt = params.with_noise(float(value))
            # pilot seed depends on the sweep point only, so every code at a
            # given point is detected with the same threshold
            errors, bits, theta = ber_point(
                coder,
                pt,
                config.trials,
                config.seed,
                point_idx=pi,
                workers=config.workers,
                block_size=config.block_size,
                pilot_slots=config.pilot_slots,
            )
            rows.append(
                {
                    "code": coder.label,
                    "post_encoding": post,
                    "ts_s": pt.ts,
                    "L": pt.L,
                    "M": pt.M,
                    "sigma_n2": pt.sigma_n2,
                    "bits_sent": bits,
                    "bit_errors": errors,
                    "ber": errors / bits,
                    "threshold": theta,
                }
            )
    return rows


def run_ber_vs_molecules(config: ExperimentConfig) -> TrialReport:
    """BER per code over a sweep of molecules per 1-bit, noise held fixed."""
    t0 = time.monotonic()
    if not config.sweep:
        raise ValueError("ber-m needs a non-empty M sweep")
    rows = _ber_rows(config, "M")
    return TrialReport(
        kind="ber-m",
        config=_config_echo(config, "ber-m"),
        rows=tuple(rows),
        wall_clock_s=time.monotonic() - t0,
    )


def run_ber_vs_noise(config: ExperimentConfig) -> TrialReport:
    """BER per code over a sweep of noise variances, M held fixed."""
    t0 = time.monotonic()
    if not config.sweep:
        raise ValueError("ber-noise needs a non-empty noise sweep")
    rows = _ber_rows(config, "sigma")
    return TrialReport(
        kind="ber-noise",
        config=_config_echo(config, "ber-noise"),
        rows=tuple(rows),
        wall_clock_s=time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# output


ISI_COLUMNS = ("code", "ts_s", "L", "position", "expected_isi_analytic", "expected_isi_mc")
BER_COLUMNS = (
    "code",
    "post_encoding",
    "ts_s",
    "L",
    "M",
    "sigma_n2",
    "bits_sent",
    "bit_errors",
    "ber",
    "threshold",
)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def report_csv_text(report: TrialReport) -> str:
    columns = ISI_COLUMNS if report.kind == "isi" else BER_COLUMNS
    lines = [",".join(columns)]
    for row in report.rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def manifest_text(report: TrialReport) -> str:
    lines = [f"{key} = {_fmt(value)}" for key, value in report.config.items()]
    thresholds = sorted(
        {(row["code"], _fmt(row.get("threshold"))) for row in report.rows if "threshold" in row}
    )
    for code, theta in thresholds:
        lines.append(f"threshold[{code}] = {theta}")
    lines.append(f"wall_clock_s = {report.wall_clock_s:.3f}")
    return "\n".join(lines) + "\n"


def write_report(report: TrialReport, out_csv) -> None:
    """Write the CSV and a plain-text manifest next to it."""
    out_path = Path(out_csv)
    out_path.write_text(report_csv_text(report))
    out_path.with_suffix(".manifest.txt").write_text(manifest_text(report))
