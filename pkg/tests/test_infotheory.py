import math

import numpy as np
import pytest

from quantprox import (
    ConditionalKernel,
    InfoValue,
    binary_divergence,
    binary_entropy,
    conditional_divergence,
    entropy,
    mutual_information,
    tilted_information,
)
from quantprox.infotheory import LN2, binary_divergence_nats
from conftest import h2


def test_entropy_uniform_four():
    assert entropy([0.25] * 4).bits == pytest.approx(2.0, abs=1e-12)


def test_entropy_point_mass():
    assert entropy([1.0, 0.0, 0.0]).nats == 0.0


def test_entropy_quarter():
    assert entropy([0.25, 0.75]).bits == pytest.approx(h2(0.25), abs=1e-12)


def test_entropy_upper_bound_uniform():
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = int(rng.integers(2, 12))
        p = rng.dirichlet(np.ones(k))
        assert entropy(p).nats <= math.log(k) + 1e-9
    assert entropy(np.full(7, 1 / 7)).nats == pytest.approx(math.log(7), abs=1e-9)


def test_binary_divergence_zero_at_equal():
    assert binary_divergence(0.5, 0.5).nats == 0.0


def test_binary_divergence_degenerate_alpha_one():
    for q in (0.1, 0.5, 0.9):
        assert binary_divergence(1.0, q).nats == pytest.approx(math.log(1 / q), abs=1e-12)


def test_binary_divergence_infinities():
    assert binary_divergence(0.5, 0.0).nats == math.inf
    assert binary_divergence(0.5, 1.0).nats == math.inf
    assert binary_divergence(0.0, 0.0).nats == 0.0
    assert binary_divergence(1.0, 1.0).nats == 0.0


def test_binary_divergence_value():
    # d(0.75 || 0.25) = 0.5 * log2(3) bits
    assert binary_divergence(0.75, 0.25).bits == pytest.approx(0.5 * math.log2(3), abs=1e-12)


def test_binary_divergence_nonneg_and_monotone():
    rng = np.random.default_rng(6)
    for _ in range(30):
        q = float(rng.uniform(0.05, 0.95))
        grid = np.linspace(0, 1, 41)
        vals = [binary_divergence_nats(a, q) for a in grid]
        assert min(vals) >= 0.0
        below = [v for a, v in zip(grid, vals) if a <= q]
        above = [v for a, v in zip(grid, vals) if a >= q]
        assert all(x >= y - 1e-12 for x, y in zip(below, below[1:]))
        assert all(y >= x - 1e-12 for x, y in zip(above, above[1:]))


def test_mutual_information_independent_rows():
    kernel = ConditionalKernel.from_rows([[0.3, 0.7], [0.3, 0.7]])
    assert mutual_information([0.4, 0.6], kernel).nats == pytest.approx(0.0, abs=1e-15)


def test_mutual_information_identity():
    kernel = ConditionalKernel.from_rows(np.eye(3))
    assert mutual_information([1 / 3] * 3, kernel).bits == pytest.approx(math.log2(3), abs=1e-12)


def test_mutual_information_bsc():
    kernel = ConditionalKernel.from_rows([[0.89, 0.11], [0.11, 0.89]])
    assert mutual_information([0.5, 0.5], kernel).bits == pytest.approx(1 - h2(0.11), abs=1e-12)


def test_conditional_divergence_golden_identity():
    rng = np.random.default_rng(7)
    for _ in range(20):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        px = rng.dirichlet(np.ones(m))
        rows = rng.dirichlet(np.ones(n), size=m)
        kernel = ConditionalKernel.from_rows(rows)
        marginal = px @ rows
        mi = mutual_information(px, kernel)
        cd = conditional_divergence(px, kernel, marginal)
        assert cd.nats == pytest.approx(mi.nats, abs=1e-12)
        # any other reference cannot do better
        q = rng.dirichlet(np.ones(n))
        assert conditional_divergence(px, kernel, q).nats >= mi.nats - 1e-12


def test_conditional_divergence_rows_equal_reference():
    q = np.array([0.2, 0.8])
    kernel = ConditionalKernel.from_rows([q, q])
    assert conditional_divergence([0.5, 0.5], kernel, q).nats == 0.0


def test_conditional_divergence_off_support():
    kernel = ConditionalKernel.from_rows([[1.0, 0.0]])
    assert conditional_divergence([1.0], kernel, [0.5, 0.5]).bits == pytest.approx(1.0)
    assert conditional_divergence([1.0], kernel, [0.0, 1.0]).nats == math.inf


def test_tilted_information_lambda_zero():
    assert tilted_information([0.5, 0.5], [0.0, 1.0], 0.0, 0.3) == pytest.approx(0.0, abs=1e-15)


def test_tilted_information_point_mass():
    py = [0.0, 1.0]
    row = np.array([0.2, 0.9])
    for lam in (0.5, 2.0):
        for d in (0.0, 0.4):
            expect = lam * (row[1] - d)
            assert tilted_information(py, row, lam, d) == pytest.approx(expect, abs=1e-12)


def test_tilted_information_binary_value():
    val = tilted_information([0.5, 0.5], [0.0, 1.0], 1.0, 0.0)
    assert val == pytest.approx(-math.log((1 + math.exp(-1)) / 2), abs=1e-12)


def test_tilted_information_overflow_safe():
    val = tilted_information([0.5, 0.5], [0.0, 1000.0], 5000.0, 1000.0)
    assert math.isfinite(val)


def test_binary_entropy_values():
    assert binary_entropy(0.0).nats == 0.0
    assert binary_entropy(0.5).bits == pytest.approx(1.0, abs=1e-15)
    assert binary_entropy(0.11).bits == pytest.approx(h2(0.11), abs=1e-12)
    assert round(binary_entropy(0.11).bits, 4) == 0.4999


def test_info_value_units_and_sums():
    v = InfoValue(LN2)
    assert v.bits == pytest.approx(1.0)
    assert (v + v).bits == pytest.approx(2.0)
    assert (v + InfoValue(math.inf)).nats == math.inf
    assert float(sum([v, v], InfoValue(0.0))) == pytest.approx(2 * LN2)
    with pytest.raises(ValueError):
        InfoValue(-1.0)
