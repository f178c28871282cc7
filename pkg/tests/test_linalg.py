import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from chernmoser.errors import ValidationError
from chernmoser.linalg import LinearSystemQ, SolvePlan, rank


def _rows(mat):
    return [{j: mpq(v) for j, v in enumerate(r) if v} for r in mat]


def test_rank_small():
    assert rank(_rows([[1, 2], [2, 4]])) == 1
    assert rank(_rows([[1, 2], [0, 1], [1, 3]])) == 2
    assert rank([]) == 0


def test_labelled_system():
    s = LinearSystemQ()
    s.add_row({"x": 1, "y": 1}, 3)
    s.add_row({"x": 1, "y": -1}, 1)
    assert s.solve() == {"x": 2, "y": 1}
    s.add_row({"x": 1}, 5)
    with pytest.raises(ValidationError):
        s.solve()


def test_kernel_basis_annihilated():
    s = LinearSystemQ()
    s.add_row({"a": 1, "b": 2, "c": 3})
    s.add_row({"a": 2, "b": 4, "c": 6})
    basis = s.kernel_basis()
    assert len(basis) == 2
    for v in basis:
        for row in s.rows:
            assert sum(c * v.get(s.col_labels[j], 0) for j, c in row.items()) == 0


@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_solve_plan_recovers_solution(seed, n):
    rng = random.Random(seed)
    while True:
        A = [[mpq(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n + 2)]
        if rank(_rows(A)) == n:
            break
    x = [mpq(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)]
    b = [sum(a * v for a, v in zip(r, x)) for r in A]
    plan = SolvePlan(_rows(A), n)
    assert plan.solve(b) == x
    b[0] += 1
    aug = [r + [v] for r, v in zip(A, b)]
    if rank(_rows(aug)) > n:
        with pytest.raises(ValidationError):
            plan.solve(b)
