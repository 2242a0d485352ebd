"""Compiled backend vs numpy fallback: identical contracts, identical results."""

import numpy as np
import pytest

from quantprox._kernels import _fallback

_speedups = pytest.importorskip("quantprox._kernels._speedups")

from quantprox.infotheory import binary_divergence_vec  # noqa: E402
from conftest import feasible_d, random_instance  # noqa: E402


def _cases(count=8, seed=31):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        inst = random_instance(rng)
        d = feasible_d(inst, rng)
        inc = np.ascontiguousarray(inst.dist <= d, dtype=np.uint8)
        yield inst, inc


def test_grid_min_guaranteed_parity():
    for inst, inc in _cases():
        v1, c1 = _speedups.grid_min_guaranteed(inc, inst.px, 120)
        v2, c2 = _fallback.grid_min_guaranteed(inc, inst.px, 120)
        assert v1 == pytest.approx(v2, abs=1e-12)
        assert np.array_equal(c1, c2)
        assert c1.sum() == 120


def test_grid_min_cond_parity():
    for inst, inc in _cases():
        grid = np.arange(121) / 120
        dtab = np.empty((inst.m, 121))
        for x in range(inst.m):
            dtab[x] = binary_divergence_vec(np.maximum(0.9, grid), grid)
        v1, c1 = _speedups.grid_min_cond(inc, inst.px, dtab, 120)
        v2, c2 = _fallback.grid_min_cond(inc, inst.px, dtab, 120)
        assert v1 == pytest.approx(v2, abs=1e-12)
        assert np.array_equal(c1, c2)


def test_grid_min_excess_parity():
    for inst, inc in _cases(count=6):
        for target in (0.75, 0.9):
            v1, c1 = _speedups.grid_min_excess(inc, inst.px, target, 60)
            v2, c2 = _fallback.grid_min_excess(inc, inst.px, target, 60)
            assert v1 == pytest.approx(v2, abs=1e-12)
            assert np.array_equal(c1, c2)


def test_grid_small_n():
    px = np.array([1.0])
    inc = np.array([[1]], dtype=np.uint8)
    for impl in (_speedups, _fallback):
        v, c = impl.grid_min_guaranteed(inc, px, 50)
        assert v == 0.0
        assert c.tolist() == [50]


def test_exhaustive_map_parity():
    rng = np.random.default_rng(33)
    for _ in range(6):
        m, n = int(rng.integers(2, 6)), int(rng.integers(2, 6))
        px = rng.dirichlet(np.ones(m))
        choices = [
            np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)).astype(np.int64)
            for _ in range(m)
        ]
        flat = np.concatenate(choices)
        offsets = np.cumsum([0] + [c.size for c in choices]).astype(np.int64)
        v1, a1 = _speedups.exhaustive_min_entropy_map(flat, offsets, px, n)
        v2, a2 = _fallback.exhaustive_min_entropy_map(flat, offsets, px, n)
        assert v1 == pytest.approx(v2, abs=1e-9)
        assert np.array_equal(a1, a2)


def test_fallback_selected_when_compiled_missing():
    """The package must import and solve with the compiled module blocked."""
    import subprocess
    import sys

    script = r"""
import sys

class Block:
    def find_module(self, name, path=None):
        return self if name == "quantprox._kernels._speedups" else None
    def load_module(self, name):
        raise ImportError("blocked for test")

sys.meta_path.insert(0, Block())
import quantprox
assert quantprox.BACKEND == "python", quantprox.BACKEND
from quantprox import InstanceSpec, oracle_grid_min, exact_h_guaranteed, solve_r_guaranteed
inst = InstanceSpec.from_arrays([1/3]*3, [[0,1,2],[2,0,1],[1,2,0]])
sol = solve_r_guaranteed(inst, 1.0)
oracle = oracle_grid_min(inst, 1.0, 0.0, "guaranteed", 0.01)
h = exact_h_guaranteed(inst, 1.0)
assert abs(sol.value.nats - oracle) < 1e-4
assert abs(h.value.bits - 0.9182958340544896) < 1e-9
print("fallback-ok")
"""
    out = subprocess.run(
        [sys.executable, "-c", script], capture_output=True, text=True, timeout=120
    )
    assert out.returncode == 0, out.stderr
    assert "fallback-ok" in out.stdout


def test_vertex_parity():
    rng = np.random.default_rng(34)
    for _ in range(6):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        px = rng.dirichlet(np.ones(m))
        eps = float(rng.uniform(0.05, 0.5))
        yin, yout, offs = [], [], [0]
        for _x in range(m):
            k = int(rng.integers(1, n))
            inside = np.sort(rng.choice(n, size=k, replace=False))
            outside = [y for y in range(n) if y not in inside]
            for y in inside:
                yin.append(int(y))
                yout.append(-1)
            for a in inside:
                for b in outside:
                    yin.append(int(a))
                    yout.append(int(b))
            offs.append(len(yin))
        args = (
            np.asarray(yin, dtype=np.int64),
            np.asarray(yout, dtype=np.int64),
            np.asarray(offs, dtype=np.int64),
            px,
            eps,
            n,
        )
        v1, c1 = _speedups.vertex_min_entropy(*args)
        v2, c2 = _fallback.vertex_min_entropy(*args)
        assert v1 == pytest.approx(v2, abs=1e-9)
        assert np.array_equal(c1, c2)
