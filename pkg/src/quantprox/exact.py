"""Exact minimum-entropy quantizers on small instances, an upper bound for
the mean-budget criterion, and the entropy-vs-proxy sandwich checks.

Exact values come from finite enumeration:

* guaranteed: every deterministic map sending each source letter into its
  distortion ball is tried (output entropy is what is minimized).
* per-letter excess: the output entropy is concave in the kernel and the
  marginal is linear in each row, so the minimum over the row-wise feasible
  polytope is attained at a product of row vertices.  The vertices of one
  row's polytope {row : row(outside ball) <= eps} are the point masses
  inside the ball and the two-point rows with mass 1-eps on a ball letter
  and eps on an outside letter (all point masses when eps = 1).  See the
  lemma in the README.

The mean-budget (excess) criterion couples rows through one average
constraint, so only an upper bound is produced, and it is labelled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InfeasibleError, InstanceFormatError, SearchTooLargeError
from .infotheory import LOG2_E, InfoValue, entropy_nats
from .model import (
    BallTable,
    ConditionalKernel,
    InstanceSpec,
    ball_table,
    check_feasibility,
)

SEARCH_LIMIT = 10**7
BASE_MAP_LIMIT = 10**6


@dataclass(frozen=True)
class QuantizerSolution:
    """A quantizer together with its output entropy.

    ``exact`` is True only when the value was proven minimal by exhaustive
    enumeration; the upper-bound constructions set it to False.
    """

    value: InfoValue
    kernel: ConditionalKernel
    exact: bool
    assignment: tuple | None = None
    search_size: int = 0


def _one_hot_rows(assignment, n):
    rows = np.zeros((len(assignment), n))
    rows[np.arange(len(assignment)), assignment] = 1.0
    return rows


def _feasible_choices(ball: BallTable):
    choices = [np.flatnonzero(ball.incidence[x]) for x in range(ball.m)]
    offsets = np.zeros(ball.m + 1, dtype=np.int64)
    for x, c in enumerate(choices):
        offsets[x + 1] = offsets[x] + c.size
    flat = np.concatenate(choices) if choices else np.empty(0, dtype=np.int64)
    return flat.astype(np.int64), offsets


def exact_h_guaranteed(instance: InstanceSpec, d, limit=SEARCH_LIMIT) -> QuantizerSolution:
    """Smallest output entropy of a deterministic quantizer with distortion
    at most d for every supported source letter.  Exhaustive; ties broken
    by lexicographic enumeration order of the assignments."""
    ball = ball_table(instance, d)
    verdict = check_feasibility(ball, instance.px, "guaranteed")
    if not verdict.feasible:
        raise InfeasibleError(verdict.describe(instance), verdict)
    size = math.prod(int(s) for s in ball.ball_sizes)
    if size > limit:
        raise SearchTooLargeError(size, limit)
    flat, offsets = _feasible_choices(ball)
    _, assignment = _kernels.exhaustive_min_entropy_map(
        flat, offsets, instance.px, instance.n
    )
    assignment = tuple(int(y) for y in assignment)
    rows = _one_hot_rows(assignment, instance.n)
    value = entropy_nats(instance.px @ rows)
    return QuantizerSolution(
        value=InfoValue(value),
        kernel=ConditionalKernel.from_rows(rows),
        exact=True,
        assignment=assignment,
        search_size=size,
    )


def _vertex_lists(ball: BallTable, eps):
    """Per-row vertex descriptors: (yin, -1) point masses, (yin, yout) pairs."""
    yin, yout, offsets = [], [], [0]
    for x in range(ball.m):
        inside = np.flatnonzero(ball.incidence[x])
        outside = np.flatnonzero(~ball.incidence[x])
        if eps >= 1.0:
            for y in range(ball.n):
                yin.append(y)
                yout.append(-1)
        else:
            for y in inside:
                yin.append(int(y))
                yout.append(-1)
            if eps > 0.0:
                for a in inside:
                    for b in outside:
                        yin.append(int(a))
                        yout.append(int(b))
        offsets.append(len(yin))
    return (
        np.asarray(yin, dtype=np.int64),
        np.asarray(yout, dtype=np.int64),
        np.asarray(offsets, dtype=np.int64),
    )


def exact_h_cond_excess(instance: InstanceSpec, d, eps, limit=SEARCH_LIMIT) -> QuantizerSolution:
    """Smallest output entropy of a randomized quantizer whose conditional
    excess-distortion probability is at most eps for every source letter.

    Enumerates products of per-row polytope vertices (see module docstring);
    at eps = 0 this degenerates to the deterministic search."""
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise InstanceFormatError(f"eps must lie in [0, 1], got {eps}")
    if eps == 0.0:
        return exact_h_guaranteed(instance, d, limit)
    ball = ball_table(instance, d)
    verdict = check_feasibility(ball, instance.px, "cond_excess", eps)
    if not verdict.feasible:
        raise InfeasibleError(verdict.describe(instance), verdict)
    yin, yout, offsets = _vertex_lists(ball, eps)
    lens = offsets[1:] - offsets[:-1]
    size = math.prod(int(s) for s in lens)
    if size > limit:
        raise SearchTooLargeError(size, limit)
    _, choice = _kernels.vertex_min_entropy(
        yin, yout, offsets, instance.px, eps, instance.n
    )
    rows = np.zeros((instance.m, instance.n))
    for x in range(instance.m):
        pos = int(offsets[x] + choice[x])
        if yout[pos] < 0:
            rows[x, yin[pos]] = 1.0
        else:
            rows[x, yin[pos]] = 1.0 - eps
            rows[x, yout[pos]] = eps
    value = entropy_nats(instance.px @ rows)
    return QuantizerSolution(
        value=InfoValue(value),
        kernel=ConditionalKernel.from_rows(rows),
        exact=True,
        assignment=None,
        search_size=size,
    )


def _xlnx(v):
    return v * math.log(v) if v > 0.0 else 0.0


def _greedy_redirect(px, q, assignment, ball, budget):
    """Redirect source mass toward the heaviest output letter within budget.

    Whole letters move in order of largest entropy reduction, finishing with
    one partial move; moves into a letter whose ball already contains the
    target are free.  Returns (entropy_nats, moved fraction per letter,
    target letter, updated assignment)."""
    q = q.copy()
    assignment = np.array(assignment, dtype=np.int64)
    ystar = int(np.argmax(q))
    for x in range(px.size):
        if assignment[x] != ystar and ball.incidence[x, ystar]:
            q[assignment[x]] -= px[x]
            q[ystar] += px[x]
            assignment[x] = ystar
    moved = np.zeros(px.size)
    remaining = [x for x in range(px.size) if assignment[x] != ystar]
    while budget > 1e-15 and remaining:
        best_x, best_red = -1, 0.0
        for x in remaining:
            w = min(px[x], budget)
            a = assignment[x]
            red = _xlnx(q[a] - w) + _xlnx(q[ystar] + w) - _xlnx(q[a]) - _xlnx(q[ystar])
            if red > best_red + 1e-15:
                best_x, best_red = x, red
        if best_x < 0:
            break
        w = min(px[best_x], budget)
        a = assignment[best_x]
        q[a] = max(q[a] - w, 0.0)
        q[ystar] += w
        moved[best_x] = w / px[best_x]
        budget -= w
        remaining.remove(best_x)
    return -sum(_xlnx(v) for v in q), moved, ystar, assignment


def upper_h_excess(
    instance: InstanceSpec,
    d,
    eps,
    base_limit=BASE_MAP_LIMIT,
    cond_limit=SEARCH_LIMIT,
) -> QuantizerSolution:
    """Upper bound on the smallest output entropy under a mean excess budget.

    Searches deterministic in-ball base maps combined with greedy give-up
    redirection of at most eps source mass toward the heaviest output
    letter, and also accepts the exact per-letter-budget quantizer when its
    enumeration is tractable (any per-letter-feasible quantizer meets the
    mean budget).  Not exhaustive over randomized quantizers: exact=False.
    """
    eps = float(eps)
    if not 0.0 <= eps <= 1.0:
        raise InstanceFormatError(f"eps must lie in [0, 1], got {eps}")
    ball = ball_table(instance, d)
    verdict = check_feasibility(ball, instance.px, "excess", eps)
    if not verdict.feasible:
        raise InfeasibleError(verdict.describe(instance), verdict)
    px = instance.px
    n = instance.n

    covered = np.flatnonzero(ball.ball_sizes > 0)
    uncovered = np.flatnonzero(ball.ball_sizes == 0)
    # uncovered letters are forcibly redirected; they consume budget upfront
    base_budget = eps - float(px[uncovered].sum())

    choice_lists = [np.flatnonzero(ball.incidence[x]) for x in covered]
    size = math.prod(int(c.size) for c in choice_lists) if covered.size else 1

    best_val = np.inf
    best_rows = None

    def consider(assignment_covered):
        nonlocal best_val, best_rows
        assignment = np.zeros(instance.m, dtype=np.int64)
        q = np.zeros(n)
        for i, x in enumerate(covered):
            assignment[x] = assignment_covered[i]
            q[assignment[x]] += px[x]
        ystar_seed = int(np.argmax(q)) if q.size and q.max() > 0 else 0
        for x in uncovered:
            assignment[x] = ystar_seed
            q[ystar_seed] += px[x]
        val, moved, ystar, assignment = _greedy_redirect(
            px, q, assignment, ball, max(base_budget, 0.0)
        )
        if val < best_val - 1e-15:
            rows = np.zeros((instance.m, n))
            for x in range(instance.m):
                rows[x, assignment[x]] += 1.0 - moved[x]
                rows[x, ystar] += moved[x]
            best_val = val
            best_rows = rows

    if size <= base_limit:
        idx = np.zeros(len(choice_lists), dtype=np.int64)
        while True:
            consider([choice_lists[i][idx[i]] for i in range(len(choice_lists))])
            k = len(choice_lists) - 1
            while k >= 0 and idx[k] + 1 >= choice_lists[k].size:
                idx[k] = 0
                k -= 1
            if k < 0:
                break
            idx[k] += 1
    else:
        # too many base maps to enumerate: a few greedy seeds still give a
        # valid (just weaker) upper bound
        popularity = px @ ball.incidence.astype(float)
        consider([int(c[np.argmax(popularity[c])]) for c in choice_lists])
        for target in range(n):
            consider(
                [
                    target if ball.incidence[x, target] else int(c[np.argmax(popularity[c])])
                    for c, x in zip(choice_lists, covered)
                ]
            )

    # the per-letter-budget exact quantizer is mean-budget feasible
    try:
        cond = exact_h_cond_excess(instance, d, eps, cond_limit)
        if cond.value.nats < best_val:
            best_val = cond.value.nats
            best_rows = np.asarray(cond.kernel.rows)
    except (SearchTooLargeError, InfeasibleError):
        pass

    return QuantizerSolution(
        value=InfoValue(best_val),
        kernel=ConditionalKernel.from_rows(best_rows),
        exact=False,
        assignment=None,
        search_size=min(size, base_limit),
    )


@dataclass(frozen=True)
class SandwichVerdict:
    mode: str
    r_bits: float
    h_bits: float
    lower_ok: bool | None
    upper_ok: bool
    lower_slack_bits: float | None
    upper_slack_bits: float

    @property
    def passed(self) -> bool:
        return (self.lower_ok is not False) and self.upper_ok


def sandwich_check(h, r, mode: str, h_is_exact=True) -> SandwichVerdict:
    """Check the proxy-entropy sandwich in bits.

    guaranteed:     r <= h <= r + log2(r + 1) + log2(e)
    excess_family:  r <= h (asserted only when h is an exact minimum)
                    h <= r + log2(r + 2) + 1 + log2(e)
    """
    if mode not in ("guaranteed", "excess_family"):
        raise InstanceFormatError(f"unknown sandwich mode {mode!r}")
    hb = h.bits if isinstance(h, InfoValue) else float(h)
    rb = r.bits if isinstance(r, InfoValue) else float(r)
    if not (math.isfinite(hb) and math.isfinite(rb)):
        raise InstanceFormatError("sandwich check requires finite values")
    if mode == "guaranteed":
        ub = rb + math.log2(rb + 1.0) + LOG2_E
        lower_ok = rb <= hb + 1e-9
        lower_slack = hb - rb
    else:
        ub = rb + math.log2(rb + 2.0) + 1.0 + LOG2_E
        lower_ok = (rb <= hb + 1e-9) if h_is_exact else None
        lower_slack = (hb - rb) if h_is_exact else None
    return SandwichVerdict(
        mode=mode,
        r_bits=rb,
        h_bits=hb,
        lower_ok=lower_ok,
        upper_ok=hb <= ub + 1e-9,
        lower_slack_bits=lower_slack,
        upper_slack_bits=ub - hb,
    )
