"""Construction of the (k+m+1, 2^k, 3) ISI-reducing single error correcting codes.

A codebook is assembled from three parts per codeword:

* a message block: all k-bit words, ordered by decreasing decimal value;
* a parity body: the r-th row of the constant-weight row stack, which lists
  every m-bit word of weight 0, then weight 1, and so on, each weight class
  ordered by decreasing decimal value, truncated to 2^k rows;
* one extra bit recording the parity of the parity-body weight (1 when the
  weight is even).

Any two codewords then differ in at least 3 positions, so a single bit error
is always correctable.  Heavier parity rows are pushed to the bottom of the
stack, which keeps the average density of 1s low in the tail of the codeword
and thereby reduces the intersymbol interference the code induces on itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

from .bits import bits_to_str

# Practical caps keeping matrix construction in memory; raise explicitly if
# larger codes are ever needed.
MAX_K = 20
MAX_M = 40
_MAX_CLASS_ROWS = 1 << 20


@dataclass(frozen=True)
class CodeSpec:
    """Design parameters of one code: k message bits, m parity-body bits,
    codeword length n = k + m + 1, 2^k codewords, minimum distance 3."""

    k: int
    m: int
    max_parity_weight: int
    n: int
    size: int
    min_distance: int = 3

    @classmethod
    def for_params(cls, k: int, m: int, *, max_k: int = MAX_K, max_m: int = MAX_M) -> "CodeSpec":
        if not (isinstance(k, int) and isinstance(m, int)):
            raise ValueError("k and m must be integers")
        if not (1 <= k <= max_k):
            raise ValueError(f"k must be in [1, {max_k}], got {k}")
        if not (k < m <= max_m):
            raise ValueError(f"m must satisfy k < m <= {max_m}, got m={m} for k={k}")
        return cls(k=k, m=m, max_parity_weight=parity_weight_cap(k, m), n=k + m + 1, size=1 << k)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)


def message_matrix(k: int) -> np.ndarray:
    """All k-bit words as rows, decimal value strictly decreasing.

    Built by the doubling recursion: prepend a 1-column to the previous
    matrix, then a 0-column, and stack.  Row r (1-based) has value 2^k - r.
    """
    if not (isinstance(k, int) and 1 <= k <= MAX_K):
        raise ValueError(f"k must be in [1, {MAX_K}], got {k}")
    mat = np.array([[1], [0]], dtype=np.uint8)
    for _ in range(k - 1):
        ones = np.ones((mat.shape[0], 1), dtype=np.uint8)
        zeros = np.zeros((mat.shape[0], 1), dtype=np.uint8)
        mat = np.vstack([np.hstack([ones, mat]), np.hstack([zeros, mat])])
    return mat


def weight_class_matrix(m: int, i: int) -> np.ndarray:
    """All m-bit words of weight i as rows, decimal value strictly decreasing.

    Recursive construction: rows starting with 1 carry the weight-(i-1)
    classes of length m-1, rows starting with 0 carry the weight-i classes.
    """
    if not (isinstance(m, int) and isinstance(i, int)):
        raise ValueError("m and i must be integers")
    if not (0 <= i <= m):
        raise ValueError(f"weight i must satisfy 0 <= i <= m, got i={i}, m={m}")
    if m > MAX_M or math.comb(m, i) > _MAX_CLASS_ROWS:
        raise ValueError(f"refusing to materialize {math.comb(m, i)} rows for (m={m}, i={i})")
    if i == 0:
        return np.zeros((1, m), dtype=np.uint8)
    if i == m:
        return np.ones((1, m), dtype=np.uint8)
    top = weight_class_matrix(m - 1, i - 1)
    bottom = weight_class_matrix(m - 1, i)
    return np.vstack(
        [
            np.hstack([np.ones((top.shape[0], 1), dtype=np.uint8), top]),
            np.hstack([np.zeros((bottom.shape[0], 1), dtype=np.uint8), bottom]),
        ]
    )


def parity_weight_cap(k: int, m: int) -> int:
    """Smallest weight cap tau such that the classes of weight 0..tau hold at
    least 2^k rows.  Defined for m > k; equals ceil(k/2) when m = k + 1."""
    if m <= k:
        raise ValueError(f"parity weight cap requires m > k, got k={k}, m={m}")
    total, tau = 0, 0
    need = 1 << k
    while True:
        total += math.comb(m, tau)
        if need <= total:
            return tau
        tau += 1


def unrank_weight_class(r: int, m: int, i: int) -> np.ndarray:
    """Row r (1-based) of the weight-i class of length m, without building it."""
    if not (0 <= i <= m):
        raise ValueError(f"weight i must satisfy 0 <= i <= m, got i={i}, m={m}")
    if not (1 <= r <= math.comb(m, i)):
        raise ValueError(f"row index {r} outside [1, C({m},{i})]")
    bits = np.zeros(m, dtype=np.uint8)
    w = i
    for j in range(m):
        rest = m - j - 1
        ones_block = math.comb(rest, w - 1) if w >= 1 else 0
        if w >= 1 and r <= ones_block:
            bits[j] = 1
            w -= 1
        else:
            r -= ones_block
    return bits


def parity_rows(k: int, m: int) -> np.ndarray:
    """First 2^k rows of the stacked weight classes (weights 0, 1, ... in
    order), the last class truncated where the stack reaches 2^k rows."""
    tau = parity_weight_cap(k, m)
    need = 1 << k
    blocks = [weight_class_matrix(m, i) for i in range(tau)]
    have = sum(b.shape[0] for b in blocks)
    remaining = need - have
    tail = np.vstack([unrank_weight_class(r, m, tau) for r in range(1, remaining + 1)])
    return np.vstack(blocks + [tail])


@dataclass(frozen=True)
class Codebook:
    """An immutable code: 2^k codewords of length n as a read-only matrix,
    plus the per-position count of codewords carrying a 1 there."""

    spec: CodeSpec
    codewords: np.ndarray
    column_weights: tuple[int, ...]

    @property
    def message_bits(self) -> np.ndarray:
        return self.codewords[:, : self.spec.k]

    @property
    def parity_bodies(self) -> np.ndarray:
        return self.codewords[:, self.spec.k : self.spec.k + self.spec.m]

    @property
    def weight_parity_bits(self) -> np.ndarray:
        return self.codewords[:, -1]


def build_codebook(k: int, m: int) -> Codebook:
    spec = CodeSpec.for_params(k, m)
    msg = message_matrix(k)
    parity = parity_rows(k, m)
    # extra bit: 1 when the parity-body weight is even
    weights = parity.sum(axis=1) % 2
    extra = (1 - weights).astype(np.uint8).reshape(-1, 1)
    words = np.hstack([msg, parity, extra])
    words.setflags(write=False)
    col = tuple(int(c) for c in words.sum(axis=0, dtype=np.int64))
    return Codebook(spec=spec, codewords=words, column_weights=col)


def verify_min_distance(codebook: Codebook | np.ndarray) -> float:
    """Exact minimum pairwise Hamming distance by an all-pairs scan.

    Returns math.inf for a single-codeword input (no pairs to compare).
    """
    words = codebook.codewords if isinstance(codebook, Codebook) else np.asarray(codebook)
    if words.ndim != 2 or words.shape[0] == 0:
        raise ValueError("expected a non-empty matrix of codewords")
    s = words.shape[0]
    if s == 1:
        return math.inf
    best = words.shape[1]
    words_i16 = words.astype(np.int16)
    for a in range(s - 1):
        d = np.abs(words_i16[a + 1 :] - words_i16[a]).sum(axis=1).min()
        if d < best:
            best = int(d)
    return best


def density_profile(codebook: Codebook) -> np.ndarray:
    """Average density of 1s per position, column weight over code size."""
    return np.asarray(codebook.column_weights, dtype=np.float64) / codebook.spec.size


@dataclass(frozen=True)
class RateDesign:
    """Feasible (k, m, weight cap) triples achieving an exact target rate."""

    epsilon: Fraction
    candidates: tuple[tuple[int, int, int], ...]


def design_for_rate(epsilon, k_max: int) -> RateDesign:
    """All k <= k_max for which a rate-epsilon code of length k/epsilon exists.

    A candidate k must make k/epsilon an integer n, leave room for the parity
    section (cap + k + 1 < n), and satisfy the binomial sandwich that pins the
    weight cap for m = n - k - 1.  The cap may not exceed k.
    """
    eps = Fraction(epsilon)
    if not (0 < eps < Fraction(1, 2)):
        raise ValueError(f"target rate must lie strictly in (0, 1/2), got {eps}")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    found: list[tuple[int, int, int]] = []
    for k in range(1, k_max + 1):
        n = Fraction(k) / eps
        if n.denominator != 1:
            continue
        n = int(n)
        m = n - k - 1
        if m <= k:
            continue
        tau = parity_weight_cap(k, m)
        if tau > k or tau + k + 1 >= n:
            continue
        below = sum(math.comb(m, j) for j in range(tau))
        if not (below < (1 << k) <= below + math.comb(m, tau)):
            continue
        found.append((k, m, tau))
    return RateDesign(epsilon=eps, candidates=tuple(found))


def _profile_array(profile) -> np.ndarray:
    p = getattr(profile, "p", profile)
    return np.asarray(p, dtype=np.float64)


def codeword_isi_bound(codeword, profile, max_parity_weight: int, message_len: int) -> bool:
    """Check that the coding overhead of one codeword stays within the design
    ISI budget.

    At every position i, the interference contributed by the parity section
    (positions beyond message_len) must not exceed the interference that a
    run of max_parity_weight 1s immediately before the last position would
    cause, which is the worst arrangement a weight-capped parity allows.
    """
    c = np.asarray(codeword)
    p = _profile_array(profile)
    n = c.size
    if n > p.size:
        raise ValueError("codeword longer than the slot profile")
    budget = float(p[1 : max_parity_weight + 1].sum())  # p_2 + ... + p_{cap+1}
    for i in range(2, n + 1):
        lo = message_len  # 0-based start of parity section
        contrib = sum(float(p[i - l]) for l in range(lo + 1, i) if c[l - 1])
        if contrib > budget + 1e-12:
            return False
    return True


def reference_isi_budget(profile, max_parity_weight: int) -> float:
    """Interference at the last position of [0...0 1^cap 0], the worst-case
    parity arrangement used as the rate-design budget."""
    p = _profile_array(profile)
    return float(p[1 : max_parity_weight + 1].sum())


def export_codebook_csv(codebook: Codebook, out: TextIO) -> None:
    """Write rows `r,u,p,rho,codeword` with bits as 0/1 strings."""
    k, m = codebook.spec.k, codebook.spec.m
    out.write("r,u,p,rho,codeword\n")
    for r, word in enumerate(codebook.codewords, start=1):
        u = bits_to_str(word[:k])
        pb = bits_to_str(word[k : k + m])
        out.write(f"{r},{u},{pb},{int(word[-1])},{bits_to_str(word)}\n")
