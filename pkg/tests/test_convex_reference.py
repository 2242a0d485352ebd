"""Cross-check the proxy solvers against a generic exponential-cone solver.

Completely independent route: the minimal mutual information under each
criterion is formulated directly over the kernel with rel_entr of the joint
against the product measure, and handed to cvxpy.  Guards the objective
derivations and the alternating solvers at once.
"""

import numpy as np
import pytest

cp = pytest.importorskip("cvxpy")

from quantprox import solve_r_cond_excess, solve_r_excess, solve_r_guaranteed  # noqa: E402
from conftest import feasible_d, random_instance  # noqa: E402

TOL_NATS = 1e-6


def mi_min_reference(inst, d, mode, eps):
    m, n = inst.m, inst.n
    px = inst.px
    inc = inst.dist <= d
    K = cp.Variable((m, n), nonneg=True)
    joint = cp.multiply(np.tile(px[:, None], (1, n)), K)
    py = px @ K
    product = cp.multiply(np.tile(px[:, None], (1, n)), cp.vstack([py] * m))
    objective = cp.sum(cp.rel_entr(joint, product))
    constraints = [cp.sum(K, axis=1) == 1]
    if mode == "guaranteed":
        constraints.append(K[~inc] == 0)
    elif mode == "cond":
        for x in range(m):
            if (~inc[x]).any():
                constraints.append(cp.sum(K[x, ~inc[x]]) <= eps)
    else:
        constraints.append(cp.sum(joint[~inc]) <= eps)
    problem = cp.Problem(cp.Minimize(objective), constraints)
    problem.solve(solver=cp.CLARABEL)
    assert problem.status == cp.OPTIMAL
    return float(problem.value)


def test_solvers_match_cone_program():
    rng = np.random.default_rng(5150)
    for _ in range(5):
        inst = random_instance(rng)
        d = feasible_d(inst, rng)
        ref = mi_min_reference(inst, d, "guaranteed", 0.0)
        assert abs(solve_r_guaranteed(inst, d).value.nats - ref) < TOL_NATS
        for eps in (0.1, 0.25):
            ref = mi_min_reference(inst, d, "cond", eps)
            assert abs(solve_r_cond_excess(inst, d, eps).value.nats - ref) < TOL_NATS
            ref = mi_min_reference(inst, d, "excess", eps)
            assert abs(solve_r_excess(inst, d, eps).value.nats - ref) < TOL_NATS
