"""Scalar and vector information measures.

Everything is computed in nats; bits appear only through :class:`InfoValue`
accessors at the reporting boundary.  Zero-probability conventions follow the
usual ones (0 log 0 = 0, mass outside a reference support gives +inf), so the
functions below return infinities as values instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr, xlogy

from .errors import InstanceFormatError

LN2 = math.log(2.0)
LOG2_E = 1.0 / LN2

PROB_TOL = 1e-12


def _check_prob_vector(p, name="p"):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InstanceFormatError(f"{name} must be a non-empty 1-d probability vector")
    if not np.all(np.isfinite(p)):
        raise InstanceFormatError(f"{name} has non-finite entries")
    if np.any(p < 0):
        raise InstanceFormatError(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise InstanceFormatError(f"{name} sums to {p.sum()!r}, not 1 within {PROB_TOL}")
    return p


def _check_unit_interval(value, name):
    value = float(value)
    if math.isnan(value) or value < 0.0 or value > 1.0:
        raise InstanceFormatError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True, order=True)
class InfoValue:
    """A non-negative amount of information, stored in nats.

    +inf is a legitimate value and propagates through sums.  Tiny negative
    rounding residue (above -1e-9) is clipped to zero.
    """

    nats: float

    def __post_init__(self):
        v = float(self.nats)
        if v < 0.0:
            if v < -1e-9:
                raise ValueError(f"information value must be non-negative, got {v} nats")
            v = 0.0
        object.__setattr__(self, "nats", v)

    @property
    def bits(self) -> float:
        return self.nats / LN2

    def in_units(self, units: str) -> float:
        if units == "bits":
            return self.bits
        if units == "nats":
            return self.nats
        raise ValueError(f"unknown units {units!r} (expected 'bits' or 'nats')")

    def __add__(self, other):
        if isinstance(other, InfoValue):
            return InfoValue(self.nats + other.nats)
        return InfoValue(self.nats + float(other))

    __radd__ = __add__

    def __float__(self):
        return self.nats


def entropy_nats(p) -> float:
    """Shannon entropy of an array of masses, in nats, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    return float(-xlogy(p, p).sum())


def entropy(p) -> InfoValue:
    """Shannon entropy H(p) of a probability vector."""
    return InfoValue(entropy_nats(_check_prob_vector(p)))


def binary_entropy(alpha) -> InfoValue:
    """Entropy of a Bernoulli(alpha) variable."""
    a = _check_unit_interval(alpha, "alpha")
    return InfoValue(float(-(xlogy(a, a) + xlogy(1.0 - a, 1.0 - a))))


def binary_divergence_nats(alpha, q) -> float:
    """KL divergence between Bernoulli(alpha) and Bernoulli(q), in nats.

    Conventions: 0 log 0 = 0; the value is +inf when alpha puts mass where
    q puts none (q = 0 with alpha > 0, or q = 1 with alpha < 1).
    """
    return float(rel_entr(alpha, q) + rel_entr(1.0 - alpha, 1.0 - q))


def binary_divergence(alpha, q) -> InfoValue:
    a = _check_unit_interval(alpha, "alpha")
    qq = _check_unit_interval(q, "q")
    return InfoValue(binary_divergence_nats(a, qq))


def binary_divergence_vec(alpha, q) -> np.ndarray:
    """Elementwise binary divergence for arrays, in nats."""
    alpha = np.asarray(alpha, dtype=float)
    q = np.asarray(q, dtype=float)
    return rel_entr(alpha, q) + rel_entr(1.0 - alpha, 1.0 - q)


def mutual_information(px, kernel) -> InfoValue:
    """I(X; Y) for a source px and a row-stochastic kernel.

    Rows with zero source mass are ignored.  The output marginal is the one
    induced by (px, kernel).
    """
    px = _check_prob_vector(px, "px")
    rows = getattr(kernel, "rows", kernel)
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] != px.size:
        raise InstanceFormatError("kernel row count does not match px")
    marginal = px @ rows
    mi = float((px[:, None] * rel_entr(rows, marginal[None, :])).sum())
    return InfoValue(mi)


def conditional_divergence(px, kernel, q) -> InfoValue:
    """Average divergence of the kernel rows from a reference distribution q.

    Equals sum_x px(x) D(row_x || q); +inf when a supported row puts mass
    where q has none.  At q = induced marginal, this is exactly I(X; Y).
    """
    px = _check_prob_vector(px, "px")
    rows = np.asarray(getattr(kernel, "rows", kernel), dtype=float)
    qv = np.asarray(getattr(q, "py", q), dtype=float)
    value = float((px[:, None] * rel_entr(rows, qv[None, :])).sum())
    return InfoValue(value)


def tilted_information(py, dist_row, lam, d) -> float:
    """Exponentially tilted match score -log E[exp(lam*(d - dist(x, Y)))].

    Computed with a log-sum-exp shift over the support of py, so large
    lam*distortion products neither overflow nor underflow to log(0).
    Returns a plain float in nats; the value may be negative.
    """
    if lam < 0:
        raise InstanceFormatError("tilt parameter lam must be >= 0")
    py = np.asarray(getattr(py, "py", py), dtype=float)
    dist_row = np.asarray(dist_row, dtype=float)
    support = py > 0.0
    exponents = lam * (float(d) - dist_row[support])
    shift = exponents.max()
    total = float(np.sum(py[support] * np.exp(exponents - shift)))
    return float(-(shift + math.log(total)))
