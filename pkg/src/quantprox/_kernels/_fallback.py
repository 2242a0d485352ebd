"""Pure-numpy fallback for the enumeration kernels.

Same contracts and enumeration order as the compiled backend in
``_speedups.pyx``, implemented with chunked vectorized sweeps.  Used when the
compiled extension is unavailable; also handy as a reference implementation.
"""

from __future__ import annotations

import numpy as np
from scipy.special import rel_entr, xlogy

_CHUNK = 1 << 17


def _triangle(total):
    """All (a, b) with a + b <= total, ordered lexicographically by (a, b)."""
    sizes = np.arange(total + 1, 0, -1)
    a = np.repeat(np.arange(total + 1), sizes)
    b = np.concatenate([np.arange(s) for s in sizes]) if total >= 0 else np.empty(0, int)
    return a, b


def _counts_for(inc, coords):
    # coords: tuple of n integer arrays of equal length
    m = inc.shape[0]
    k = coords[0].size
    cnt = [np.zeros(k, dtype=np.int64) for _ in range(m)]
    for x in range(m):
        for j, c in enumerate(coords):
            if inc[x, j]:
                cnt[x] += c
    return cnt


def _scan(inc, px, steps, evaluate):
    """Enumerate grid compositions, evaluate objective chunks, track the min.

    evaluate(cnt_list) -> objective array.  Returns (value, counts[n]).
    """
    inc = np.asarray(inc, dtype=bool)
    m, n = inc.shape
    best_val = np.inf
    best_counts = None

    if n == 1:
        coords = (np.array([steps], dtype=np.int64),)
        obj = evaluate(_counts_for(inc, coords))
        return float(obj[0]), np.array([steps], dtype=np.int64)

    if n == 2:
        c0 = np.arange(steps + 1, dtype=np.int64)
        coords = (c0, steps - c0)
        obj = evaluate(_counts_for(inc, coords))
        i = int(np.argmin(obj))
        return float(obj[i]), np.array([coords[0][i], coords[1][i]], dtype=np.int64)

    if n == 3:
        c0, c1 = _triangle(steps)
        coords = (c0, c1, steps - c0 - c1)
        obj = evaluate(_counts_for(inc, coords))
        i = int(np.argmin(obj))
        return float(obj[i]), np.array(
            [coords[0][i], coords[1][i], coords[2][i]], dtype=np.int64
        )

    if n == 4:
        for lead in range(steps + 1):
            rest = steps - lead
            c1, c2 = _triangle(rest)
            c0 = np.full(c1.size, lead, dtype=np.int64)
            coords = (c0, c1, c2, rest - c1 - c2)
            obj = evaluate(_counts_for(inc, coords))
            i = int(np.argmin(obj))
            if obj[i] < best_val:
                best_val = float(obj[i])
                best_counts = np.array(
                    [lead, c1[i], c2[i], rest - c1[i] - c2[i]], dtype=np.int64
                )
        return best_val, best_counts

    raise ValueError(f"grid scan supports n <= 4, got n = {n}")


def grid_min_guaranteed(inc, px, steps):
    """Min over the step-grid of sum_x px[x] * (-log ball_mass(x)), in nats."""
    px = np.asarray(px, dtype=float)
    tab = np.empty(steps + 1)
    tab[0] = np.inf
    tab[1:] = -np.log(np.arange(1, steps + 1) / steps)

    def evaluate(cnt):
        obj = np.zeros(cnt[0].size)
        for x in range(px.size):
            obj += px[x] * tab[cnt[x]]
        return obj

    return _scan(inc, px, steps, evaluate)


def grid_min_cond(inc, px, dtab, steps):
    """Min of sum_x px[x] * dtab[x, count_x] over the grid (dtab in nats)."""
    px = np.asarray(px, dtype=float)
    dtab = np.asarray(dtab, dtype=float)

    def evaluate(cnt):
        obj = np.zeros(cnt[0].size)
        for x in range(px.size):
            obj += px[x] * dtab[x, cnt[x]]
        return obj

    return _scan(inc, px, steps, evaluate)


def grid_min_excess(inc, px, target, steps):
    """Min over the grid and over success profiles meeting the mean budget.

    Profiles: full success on a subset of letters, minimal success (the ball
    mass itself) elsewhere, optionally raising one tied coverage class to a
    common fractional level that meets the budget with equality.
    """
    px = np.asarray(px, dtype=float)
    m = px.size
    tab = np.empty(steps + 1)
    tab[0] = np.inf
    tab[1:] = -np.log(np.arange(1, steps + 1) / steps)

    def evaluate(cnt):
        k = cnt[0].size
        B = [c / steps for c in cnt]
        best = np.full(k, np.inf)
        for mask in range(1 << m):
            member = [(mask >> x) & 1 for x in range(m)]
            E = np.zeros(k)
            obj = np.zeros(k)
            for x in range(m):
                if member[x]:
                    E += px[x]
                    obj += px[x] * tab[cnt[x]]
                else:
                    E += px[x] * B[x]
            feasible = E >= target - 1e-12
            best = np.minimum(best, np.where(feasible, obj, np.inf))
            deficit = ~feasible
            if not deficit.any():
                continue
            for x in range(m):
                if member[x]:
                    continue
                Pc = np.zeros(k)
                for x2 in range(m):
                    if not member[x2]:
                        Pc += px[x2] * (cnt[x2] == cnt[x])
                c = B[x]
                with np.errstate(invalid="ignore", divide="ignore"):
                    t = c + (target - E) / Pc
                    ok = deficit & (t <= 1.0 + 1e-12) & (c > 0)
                    t = np.clip(t, 0.0, 1.0)
                    dval = rel_entr(t, c) + rel_entr(1.0 - t, 1.0 - c)
                cand = np.where(ok, obj + Pc * dval, np.inf)
                best = np.minimum(best, cand)
        return best

    return _scan(inc, px, steps, evaluate)


def _chunked_argmin(total, width, build_entropy):
    best_val = np.inf
    best_idx = -1
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        h = build_entropy(idx)
        i = int(np.argmin(h))
        if h[i] < best_val:
            best_val = float(h[i])
            best_idx = int(idx[i])
    return best_val, best_idx


def exhaustive_min_entropy_map(choices_flat, offsets, px, n):
    """Minimize output entropy over all per-letter choices, in nats.

    choices_flat/offsets encode the allowed output letters per source letter.
    Returns (entropy_nats, assignment of output letters).
    """
    choices_flat = np.asarray(choices_flat, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    px = np.asarray(px, dtype=float)
    m = px.size
    lens = offsets[1:] - offsets[:-1]
    weights = np.ones(m, dtype=np.int64)
    for x in range(m - 2, -1, -1):
        weights[x] = weights[x + 1] * lens[x + 1]
    total = int(weights[0] * lens[0])

    def build_entropy(idx):
        k = idx.size
        q = np.zeros((k, n))
        rows = np.arange(k)
        for x in range(m):
            digit = (idx // weights[x]) % lens[x]
            y = choices_flat[offsets[x] + digit]
            q[rows, y] += px[x]
        return -xlogy(q, q).sum(axis=1)

    best_val, best_idx = _chunked_argmin(total, m, build_entropy)
    assignment = np.empty(m, dtype=np.int64)
    for x in range(m):
        digit = (best_idx // weights[x]) % lens[x]
        assignment[x] = choices_flat[offsets[x] + digit]
    return best_val, assignment


def vertex_min_entropy(yin_flat, yout_flat, offsets, px, eps, n):
    """Minimize output entropy over per-letter vertex rows, in nats.

    Each vertex is either a point mass (yout = -1) or a two-point row with
    mass 1-eps on yin and eps on yout.  Returns (entropy_nats, vertex index
    per source letter).
    """
    yin_flat = np.asarray(yin_flat, dtype=np.int64)
    yout_flat = np.asarray(yout_flat, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    px = np.asarray(px, dtype=float)
    m = px.size
    lens = offsets[1:] - offsets[:-1]
    weights = np.ones(m, dtype=np.int64)
    for x in range(m - 2, -1, -1):
        weights[x] = weights[x + 1] * lens[x + 1]
    total = int(weights[0] * lens[0])

    def build_entropy(idx):
        k = idx.size
        q = np.zeros((k, n))
        rows = np.arange(k)
        for x in range(m):
            digit = (idx // weights[x]) % lens[x]
            yin = yin_flat[offsets[x] + digit]
            yout = yout_flat[offsets[x] + digit]
            point = yout < 0
            win = np.where(point, px[x], px[x] * (1.0 - eps))
            q[rows, yin] += win
            wout = np.where(point, 0.0, px[x] * eps)
            q[rows, np.where(point, 0, yout)] += wout
        return -xlogy(q, q).sum(axis=1)

    best_val, best_idx = _chunked_argmin(total, m, build_entropy)
    choice = np.empty(m, dtype=np.int64)
    for x in range(m):
        choice[x] = (best_idx // weights[x]) % lens[x]
    return best_val, choice
