"""Lossless codes: optimal one-to-one (non-prefix) codes, Huffman prefix
codes, and the entropy sandwiches relating their expected lengths to H(X).
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstanceFormatError
from .infotheory import LOG2_E, entropy
from .infotheory import _check_prob_vector


@dataclass(frozen=True)
class LosslessCode:
    lengths: tuple
    expected_length: float  # bits
    prefix_free: bool
    codewords: tuple | None = None

    @property
    def kraft_sum(self) -> float:
        return float(sum(2.0 ** -l for l in self.lengths))


def _canonical_string(k: int) -> str:
    """k-th binary string in the shortlex enumeration '', 0, 1, 00, ..."""
    if k < 1:
        raise InstanceFormatError("string index must be >= 1")
    length = k.bit_length() - 1
    offset = k - (1 << length)
    return format(offset, f"0{length}b") if length else ""


def one_to_one_optimal(p) -> LosslessCode:
    """Optimal injective (not prefix-free) binary code.

    Sorts probabilities in nonincreasing order and assigns the k-th shortest
    binary string, of length floor(log2 k), starting from the empty string.
    """
    p = _check_prob_vector(p)
    order = np.argsort(-p, kind="stable")
    lengths = np.zeros(p.size, dtype=np.int64)
    codewords = [""] * p.size
    for rank, i in enumerate(order, start=1):
        lengths[i] = rank.bit_length() - 1
        codewords[int(i)] = _canonical_string(rank)
    expected = float(p @ lengths)
    return LosslessCode(
        lengths=tuple(int(l) for l in lengths),
        expected_length=expected,
        prefix_free=False,
        codewords=tuple(codewords),
    )


def huffman(p) -> LosslessCode:
    """Optimal prefix-free code by the greedy merge, with deterministic
    tie-breaking by (probability, original index); canonical codewords."""
    p = _check_prob_vector(p)
    m = p.size
    if m == 1:
        return LosslessCode(lengths=(0,), expected_length=0.0, prefix_free=True, codewords=("",))
    heap = [(float(p[i]), i, (i,)) for i in range(m)]
    heapq.heapify(heap)
    counter = m
    lengths = np.zeros(m, dtype=np.int64)
    while len(heap) > 1:
        f1, _, leaves1 = heapq.heappop(heap)
        f2, _, leaves2 = heapq.heappop(heap)
        for leaf in leaves1 + leaves2:
            lengths[leaf] += 1
        heapq.heappush(heap, (f1 + f2, counter, leaves1 + leaves2))
        counter += 1
    expected = float(p @ lengths)
    # canonical codeword assignment: sort by (length, index)
    codewords = [""] * m
    code = 0
    prev_len = 0
    for length, i in sorted((int(lengths[i]), i) for i in range(m)):
        code <<= length - prev_len
        codewords[i] = format(code, f"0{length}b") if length else ""
        code += 1
        prev_len = length
    return LosslessCode(
        lengths=tuple(int(l) for l in lengths),
        expected_length=expected,
        prefix_free=True,
        codewords=tuple(codewords),
    )


@dataclass(frozen=True)
class LosslessVerdict:
    h_bits: float
    one_to_one_bits: float
    prefix_bits: float
    lower_slack_one_to_one: float  # L* - (H - log2(H+1) - log2 e)
    upper_slack_one_to_one: float  # H - L*
    lower_slack_prefix: float  # L_p - H
    upper_slack_prefix: float  # H + 1 - L_p

    @property
    def passed(self) -> bool:
        return all(
            s >= -1e-9
            for s in (
                self.lower_slack_one_to_one,
                self.upper_slack_one_to_one,
                self.lower_slack_prefix,
                self.upper_slack_prefix,
            )
        )


def lossless_sandwich_check(p) -> LosslessVerdict:
    """Verify H - log2(H+1) - log2 e <= L* <= H and H <= L_prefix <= H + 1."""
    h = entropy(p).bits
    lstar = one_to_one_optimal(p).expected_length
    lp = huffman(p).expected_length
    return LosslessVerdict(
        h_bits=h,
        one_to_one_bits=lstar,
        prefix_bits=lp,
        lower_slack_one_to_one=lstar - (h - math.log2(h + 1.0) - LOG2_E),
        upper_slack_one_to_one=h - lstar,
        lower_slack_prefix=lp - h,
        upper_slack_prefix=h + 1.0 - lp,
    )
