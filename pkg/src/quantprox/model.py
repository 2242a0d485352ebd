"""Problem instances, distortion-ball geometry, and feasibility checks.

An instance is a finite source distribution together with a non-negative
distortion matrix.  All downstream solvers consume the boolean ball table
(which output letters sit within distortion d of each source letter) rather
than the raw matrix, so the threshold comparison lives here, done once,
with exact <= on the stored reals and no fuzz.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceFormatError
from .infotheory import PROB_TOL


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class InstanceSpec:
    """A finite-alphabet source plus distortion matrix.

    Use :meth:`from_arrays` / :meth:`from_json`; they validate, renormalize
    the source probabilities exactly once, and drop source letters with zero
    mass (the fidelity constraints only quantify over supported letters).
    """

    px: np.ndarray
    dist: np.ndarray
    labels_x: tuple | None = None
    labels_y: tuple | None = None

    @classmethod
    def from_arrays(cls, px, dist, labels_x=None, labels_y=None):
        px = np.asarray(px, dtype=float)
        dist = np.asarray(dist, dtype=float)
        problems = []
        if px.ndim != 1 or px.size == 0:
            problems.append("px must be a non-empty 1-d array")
        if dist.ndim != 2 or dist.size == 0:
            problems.append("dist must be a non-empty 2-d array")
        if problems:
            raise InstanceFormatError("; ".join(problems), problems)
        if not np.all(np.isfinite(px)):
            problems.append("px has non-finite entries")
        elif np.any(px < 0):
            problems.append("px has negative entries")
        elif abs(px.sum() - 1.0) > PROB_TOL:
            problems.append(f"px sums to {px.sum()!r}, not 1 within {PROB_TOL}")
        if not np.all(np.isfinite(dist)):
            problems.append("dist has non-finite entries")
        elif np.any(dist < 0):
            problems.append("dist has negative entries")
        if dist.ndim == 2 and px.ndim == 1 and dist.shape[0] != px.size:
            problems.append(
                f"dist has {dist.shape[0]} rows but px has {px.size} entries"
            )
        if problems:
            raise InstanceFormatError("; ".join(problems), problems)

        px = px / px.sum()  # single renormalization at load
        if labels_x is not None:
            labels_x = tuple(str(s) for s in labels_x)
            if len(labels_x) != px.size:
                raise InstanceFormatError("labels_x length does not match px")
        if labels_y is not None:
            labels_y = tuple(str(s) for s in labels_y)
            if len(labels_y) != dist.shape[1]:
                raise InstanceFormatError("labels_y length does not match dist columns")

        keep = px > 0.0
        if not np.all(keep):
            px = px[keep]
            dist = dist[keep, :]
            if labels_x is not None:
                labels_x = tuple(s for s, k in zip(labels_x, keep) if k)
        return cls(_readonly(px), _readonly(dist), labels_x, labels_y)

    @classmethod
    def from_json(cls, text):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(
                f"instance JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                [exc.msg],
            ) from exc
        if not isinstance(obj, dict):
            raise InstanceFormatError("instance JSON must be an object")
        missing = [key for key in ("px", "dist") if key not in obj]
        if missing:
            raise InstanceFormatError(f"instance JSON missing keys: {', '.join(missing)}")
        return cls.from_arrays(
            obj["px"], obj["dist"], obj.get("labels_x"), obj.get("labels_y")
        )

    @classmethod
    def load(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_json(self) -> str:
        obj = {"px": self.px.tolist(), "dist": self.dist.tolist()}
        if self.labels_x is not None:
            obj["labels_x"] = list(self.labels_x)
        if self.labels_y is not None:
            obj["labels_y"] = list(self.labels_y)
        return json.dumps(obj, indent=2)

    @property
    def m(self) -> int:
        return self.px.size

    @property
    def n(self) -> int:
        return self.dist.shape[1]

    @property
    def max_dist(self) -> float:
        return float(self.dist.max())

    @property
    def dmin_expected(self) -> float:
        """Smallest achievable expected distortion (best letter per row)."""
        return float(self.px @ self.dist.min(axis=1))

    @property
    def dmax_expected(self) -> float:
        """Expected distortion of the best single output letter."""
        return float((self.px @ self.dist).min())

    def label_x(self, i) -> str:
        return self.labels_x[i] if self.labels_x is not None else f"x{i}"

    def label_y(self, j) -> str:
        return self.labels_y[j] if self.labels_y is not None else f"y{j}"


@dataclass(frozen=True)
class BallTable:
    """Boolean incidence of the distortion balls at threshold d.

    ``incidence[x, y]`` is True exactly when dist(x, y) <= d.
    """

    incidence: np.ndarray
    d: float

    @property
    def ball_sizes(self) -> np.ndarray:
        return self.incidence.sum(axis=1)

    @property
    def m(self) -> int:
        return self.incidence.shape[0]

    @property
    def n(self) -> int:
        return self.incidence.shape[1]

    @property
    def covered_outputs(self) -> np.ndarray:
        """Mask of output letters that belong to at least one ball."""
        return self.incidence.any(axis=0)

    def ball(self, x) -> np.ndarray:
        return np.flatnonzero(self.incidence[x])

    def complement(self, x) -> np.ndarray:
        return np.flatnonzero(~self.incidence[x])


def ball_table(instance: InstanceSpec, d) -> BallTable:
    """Threshold the distortion matrix at d (exact <=, no tolerance)."""
    d = float(d)
    if not d >= 0.0:
        raise InstanceFormatError(f"distortion threshold must be >= 0, got {d}")
    return BallTable(_readonly(instance.dist <= d), d)


MODES = ("guaranteed", "cond_excess", "excess")


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    mode: str
    eps: float
    offending_letters: tuple
    uncovered_mass: float

    def describe(self, instance: InstanceSpec | None = None) -> str:
        if self.feasible:
            return f"feasible ({self.mode}, eps={self.eps:g})"
        if instance is not None:
            names = ", ".join(instance.label_x(i) for i in self.offending_letters)
        else:
            names = ", ".join(str(i) for i in self.offending_letters)
        return (
            f"infeasible ({self.mode}, eps={self.eps:g}): empty balls at {names}; "
            f"uncovered source mass {self.uncovered_mass:.6g}"
        )


def check_feasibility(ball: BallTable, px, mode: str, eps=0.0) -> FeasibilityVerdict:
    """Decide whether the constraint set for the given criterion is non-empty.

    guaranteed / cond_excess (eps < 1): every supported letter needs a
    non-empty ball.  cond_excess with eps = 1 is unconstrained.  excess:
    the total source mass of empty-ball letters must fit inside eps.
    """
    if mode not in MODES:
        raise InstanceFormatError(f"unknown mode {mode!r}; expected one of {MODES}")
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise InstanceFormatError(f"eps must lie in [0, 1], got {eps}")
    px = np.asarray(px, dtype=float)
    empty = (ball.ball_sizes == 0) & (px > 0)
    offending = tuple(int(i) for i in np.flatnonzero(empty))
    uncovered = float(px[empty].sum())
    if mode == "excess":
        feasible = uncovered <= eps
    elif mode == "cond_excess" and eps >= 1.0:
        feasible = True
    else:
        feasible = not offending
    return FeasibilityVerdict(feasible, mode, eps, offending, uncovered)


@dataclass(frozen=True)
class ReproductionDistribution:
    """A distribution on the output alphabet."""

    py: np.ndarray

    @classmethod
    def from_array(cls, py):
        py = np.asarray(py, dtype=float)
        if py.ndim != 1 or py.size == 0:
            raise InstanceFormatError("py must be a non-empty 1-d array")
        if not np.all(np.isfinite(py)) or np.any(py < 0):
            raise InstanceFormatError("py entries must be finite and >= 0")
        if abs(py.sum() - 1.0) > PROB_TOL:
            raise InstanceFormatError(f"py sums to {py.sum()!r}, not 1 within {PROB_TOL}")
        return cls(_readonly(py))

    @classmethod
    def uniform(cls, n):
        return cls.from_array(np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.py.size

    def ball_mass(self, ball: BallTable) -> np.ndarray:
        """Probability of each source letter's ball under this distribution."""
        return ball.incidence.astype(float) @ self.py


@dataclass(frozen=True)
class ConditionalKernel:
    """A row-stochastic matrix: row x is the output distribution given x."""

    rows: np.ndarray

    @classmethod
    def from_rows(cls, rows):
        rows = np.asarray(rows, dtype=float)
        if rows.ndim != 2 or rows.size == 0:
            raise InstanceFormatError("kernel must be a non-empty 2-d array")
        if not np.all(np.isfinite(rows)) or np.any(rows < 0):
            raise InstanceFormatError("kernel entries must be finite and >= 0")
        sums = rows.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > PROB_TOL)
        if bad.size:
            raise InstanceFormatError(
                f"kernel rows {bad.tolist()} do not sum to 1 within {PROB_TOL}"
            )
        return cls(_readonly(rows))

    @property
    def m(self) -> int:
        return self.rows.shape[0]

    @property
    def n(self) -> int:
        return self.rows.shape[1]

    def marginal(self, px) -> np.ndarray:
        return np.asarray(px, dtype=float) @ self.rows


@dataclass(frozen=True)
class AlphaProfile:
    """Per-source-letter success probabilities with a reporting threshold.

    ``alpha[x]`` is the probability that letter x is reproduced inside its
    distortion ball; ``eps_profile`` is the complementary per-letter excess
    probability.  ``q`` records the coverage threshold that separates
    letters kept at full success from the rest (0 when everything is kept).
    """

    alpha: np.ndarray
    q: float
    eps_profile: np.ndarray = field(init=False)

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        if alpha.ndim != 1 or np.any(alpha < -1e-15) or np.any(alpha > 1 + 1e-15):
            raise InstanceFormatError("alpha entries must lie in [0, 1]")
        alpha = np.clip(alpha, 0.0, 1.0)
        if not 0.0 <= float(self.q) <= 1.0:
            raise InstanceFormatError("q must lie in [0, 1]")
        object.__setattr__(self, "alpha", _readonly(alpha))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "eps_profile", _readonly(1.0 - alpha))

    @classmethod
    def ones(cls, m):
        return cls(np.ones(m), 0.0)

    @property
    def m(self) -> int:
        return self.alpha.size

    def mean_success(self, px) -> float:
        return float(np.asarray(px, dtype=float) @ self.alpha)
