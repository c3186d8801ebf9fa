import random
import sys

import numpy as np
import pytest

from comack.exactla.field import field_make


def naive_mul(ctx, a: int, b: int) -> int:
    """Schoolbook product of encoded elements, reduced by the modulus."""
    p, m = ctx.p, ctx.m
    da = [(a // p ** i) % p for i in range(m)]
    db = [(b // p ** i) % p for i in range(m)]
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(da):
        for j, y in enumerate(db):
            prod[i + j] = (prod[i + j] + x * y) % p
    mod = list(ctx.modulus)
    for d in range(len(prod) - 1, m - 1, -1):
        c = prod[d]
        if c:
            for k in range(m + 1):
                prod[d - m + k] = (prod[d - m + k] - c * mod[k]) % p
    return sum(prod[i] * p ** i for i in range(m))


def naive_matmul(ctx, A, B):
    A, B = np.asarray(A), np.asarray(B)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = 0
            for k in range(A.shape[1]):
                acc = ctx.add(acc, naive_mul(ctx, int(A[i, k]), int(B[k, j])))
            out[i, j] = acc
    return out


def random_matrix(ctx, rows, cols, rng, density=1.0):
    return np.array([[rng.randrange(ctx.q) if rng.random() < density else 0 for _ in range(cols)]
                     for _ in range(rows)], dtype=np.int64)


@pytest.fixture(params=[(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (2, 3)], ids=lambda t: f"F{t[0]}^{t[1]}")
def ctx(request):
    return field_make(*request.param)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, title, secs = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.1f}s)")
