import math

import numpy as np
import pytest

from quantprox import (
    InstanceSpec,
    SearchTooLargeError,
    exact_h_cond_excess,
    exact_h_guaranteed,
    sandwich_check,
    solve_r_excess,
    solve_r_guaranteed,
    upper_h_excess,
)
from quantprox.infotheory import LOG2_E
from conftest import feasible_d, h2, random_instance


def test_exact_guaranteed_identity_balls(binary_instance):
    sol = exact_h_guaranteed(binary_instance, 0.0)
    assert sol.value.bits == pytest.approx(1.0, abs=1e-12)
    assert sol.exact
    assert sol.assignment == (0, 1)


def test_exact_guaranteed_full_coverage(binary_instance):
    sol = exact_h_guaranteed(binary_instance, 1.0)
    assert sol.value.bits == 0.0
    # lexicographic tie-break: everything to the first letter
    assert sol.assignment == (0, 0)


def test_exact_guaranteed_triangle(triangle_instance):
    sol = exact_h_guaranteed(triangle_instance, 1.0)
    assert sol.value.bits == pytest.approx(h2(1 / 3), abs=1e-12)
    assert sol.search_size == 8


def test_exact_guaranteed_brute_force_crosscheck():
    import itertools

    rng = np.random.default_rng(12)
    for _ in range(10):
        inst = random_instance(rng, m=3, n=3)
        d = feasible_d(inst, rng)
        sol = exact_h_guaranteed(inst, d)
        balls = [np.flatnonzero(inst.dist[x] <= d) for x in range(inst.m)]
        best = min(
            -sum(v * math.log2(v) for v in np.bincount(f, weights=inst.px, minlength=inst.n) if v > 0)
            for f in itertools.product(*balls)
        )
        assert sol.value.bits == pytest.approx(best, abs=1e-12)


def test_exact_guaranteed_too_large():
    inst = InstanceSpec.from_arrays(np.full(12, 1 / 12), np.zeros((12, 8)))
    with pytest.raises(SearchTooLargeError):
        exact_h_guaranteed(inst, 1.0)


def test_exact_cond_eps_zero_matches(triangle_instance):
    a = exact_h_guaranteed(triangle_instance, 1.0)
    b = exact_h_cond_excess(triangle_instance, 1.0, 0.0)
    assert abs(a.value.nats - b.value.nats) <= 1e-12


def test_exact_cond_binary_half(binary_instance):
    sol = exact_h_cond_excess(binary_instance, 0.0, 0.5)
    # two-point second row concentrates 0.75 mass on one letter
    assert sol.value.bits == pytest.approx(h2(0.25), abs=1e-12)
    assert sol.exact


def test_exact_cond_single_letter():
    inst = InstanceSpec.from_arrays([1.0], [[0.0, 1.0]])
    for eps in (0.0, 0.3, 1.0):
        sol = exact_h_cond_excess(inst, 0.0, eps)
        assert sol.value.bits == 0.0


def test_exact_cond_monotone_in_eps(instance_suite):
    for inst, d in instance_suite[:5]:
        values = [exact_h_cond_excess(inst, d, e).value.bits for e in (0.0, 0.1, 0.25, 1.0)]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


def test_exact_cond_vertex_value_is_entropy_of_marginal(instance_suite):
    for inst, d in instance_suite[:5]:
        sol = exact_h_cond_excess(inst, d, 0.2)
        q = inst.px @ sol.kernel.rows
        h = -sum(v * math.log(v) for v in q if v > 0)
        assert sol.value.nats == pytest.approx(h, abs=1e-12)


def test_upper_excess_eps_zero(triangle_instance):
    a = exact_h_guaranteed(triangle_instance, 1.0)
    b = upper_h_excess(triangle_instance, 1.0, 0.0)
    assert b.value.bits == pytest.approx(a.value.bits, abs=1e-12)
    assert not b.exact


def test_upper_excess_full_budget(triangle_instance):
    sol = upper_h_excess(triangle_instance, 1.0, 1.0)
    assert sol.value.bits == pytest.approx(0.0, abs=1e-12)


def test_upper_excess_triangle_bracket(triangle_instance):
    up = upper_h_excess(triangle_instance, 1.0, 0.2)
    r = solve_r_excess(triangle_instance, 1.0, 0.2)
    assert up.value.bits <= h2(1 / 3) + 1e-12
    assert up.value.bits >= r.value.bits - 1e-9


def test_upper_excess_below_exact_cond(instance_suite):
    for inst, d in instance_suite[:8]:
        for eps in (0.1, 0.25):
            up = upper_h_excess(inst, d, eps)
            cond = exact_h_cond_excess(inst, d, eps)
            assert up.value.nats <= cond.value.nats + 1e-12


def test_upper_excess_uncovered_letters():
    inst = InstanceSpec.from_arrays([0.3, 0.7], [[9.0, 9.0], [0.0, 1.0]])
    sol = upper_h_excess(inst, 1.0, 0.3)
    assert sol.value.bits == pytest.approx(0.0, abs=1e-12)


def test_sandwich_triangle_values():
    v = sandwich_check(h2(1 / 3), math.log2(1.5), "guaranteed")
    assert v.passed
    assert v.upper_slack_bits == pytest.approx(1.7738, abs=5e-4)


def test_sandwich_degenerate_zero():
    v = sandwich_check(0.0, 0.0, "guaranteed")
    assert v.passed


def test_sandwich_equal_one():
    v = sandwich_check(1.0, 1.0, "guaranteed")
    assert v.passed
    assert v.upper_slack_bits == pytest.approx(1.0 + LOG2_E, abs=1e-12)


def test_sandwich_excess_family_skips_lower_for_bounds():
    v = sandwich_check(5.0, 0.1, "excess_family", h_is_exact=False)
    assert v.lower_ok is None
    assert not v.upper_ok  # 5 bits exceeds 0.1 + log2(2.1) + 1 + log2(e)


def test_sandwich_guaranteed_on_suite(instance_suite):
    for inst, d in instance_suite:
        r = solve_r_guaranteed(inst, d)
        h = exact_h_guaranteed(inst, d)
        assert sandwich_check(h.value, r.value, "guaranteed").passed


def test_exact_cond_eps_one_empty_ball():
    inst = InstanceSpec.from_arrays([0.4, 0.6], [[9.0, 9.0], [0.0, 1.0]])
    sol = exact_h_cond_excess(inst, 1.0, 1.0)
    assert sol.value.nats == pytest.approx(0.0, abs=1e-12)
