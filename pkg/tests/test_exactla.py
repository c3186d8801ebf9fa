import numpy as np
import pytest
import sympy

from comack.exactla import poly as P
from comack.exactla.field import FieldCtx, field_make, is_prime, multiplicative_order
from comack.exactla.intmat import IntMatrix, int_det
from comack.exactla.linalg import (
    Echelon,
    FqMatrix,
    column_space_basis,
    crt_idempotent_polys,
    from_csv,
    in_image,
    inverse,
    is_invertible,
    min_poly,
    nullspace,
    poly_eval_matrix,
    rank,
    solve,
    to_csv,
)

from conftest import naive_matmul, naive_mul, random_matrix


# -- fields -------------------------------------------------------------------------

def test_multiplication_matches_schoolbook(ctx):
    for a in range(ctx.q):
        for b in range(ctx.q):
            assert ctx.mul(a, b) == naive_mul(ctx, a, b)


def test_field_axioms(ctx):
    for a in range(1, ctx.q):
        assert ctx.mul(a, ctx.inv(a)) == 1
        assert ctx.add(a, ctx.neg(a)) == 0
        assert ctx.pow(a, ctx.q - 1) == 1
    g = ctx.primitive_element()
    assert ctx.element_order(g) == ctx.q - 1


def test_array_ops_agree_with_scalars(ctx, rng):
    a = random_matrix(ctx, 4, 5, rng)
    b = random_matrix(ctx, 4, 5, rng)
    for i in range(4):
        for j in range(5):
            x, y = int(a[i, j]), int(b[i, j])
            assert ctx.add_a(a, b)[i, j] == ctx.add(x, y)
            assert ctx.sub_a(a, b)[i, j] == ctx.sub(x, y)
            assert ctx.mul_a(a, b)[i, j] == ctx.mul(x, y)


def test_matmul_matches_naive(ctx, rng):
    A = random_matrix(ctx, 5, 6, rng)
    B = random_matrix(ctx, 6, 3, rng)
    assert np.array_equal(ctx.matmul(A, B), naive_matmul(ctx, A, B))


def test_serialize_roundtrip_and_format_parse(ctx):
    assert FieldCtx.deserialize(ctx.serialize()) == ctx
    for a in range(ctx.q):
        assert ctx.parse(ctx.format(a)) == a


def test_field_errors():
    with pytest.raises(ValueError):
        field_make(4)
    with pytest.raises(ValueError):
        FieldCtx(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2 over F2


def test_prime_helpers():
    for n in range(2, 200):
        assert is_prime(n) == sympy.isprime(n)
    assert multiplicative_order(2, 17) == 8
    assert multiplicative_order(3, 7) == 6


# -- polynomials ----------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_factor_matches_sympy_over_prime_field(p, rng):
    ctx = field_make(p)
    x = sympy.symbols("x")
    for _ in range(15):
        deg = rng.randrange(1, 9)
        coeffs = [rng.randrange(p) for _ in range(deg)] + [1]
        got = P.factor_poly(ctx, np.array(coeffs), seed=rng.randrange(100))
        expr = sum(c * x ** i for i, c in enumerate(coeffs))
        _, facs = sympy.Poly(expr, x, modulus=p).factor_list()
        want = sorted((tuple(int(c) % p for c in reversed(f.all_coeffs())), k) for f, k in facs)
        # sympy uses symmetric residues; make factors monic
        norm = []
        for f, k in want:
            lead_inv = pow(f[-1], -1, p)
            norm.append((tuple(c * lead_inv % p for c in f), k))
        assert sorted((tuple(g.tolist()), k) for g, k in got) == sorted(norm)


def test_factor_product_recovers_polynomial_over_extension(rng):
    ctx = field_make(2, 3)
    for _ in range(10):
        f = np.array([rng.randrange(8) for _ in range(rng.randrange(2, 8))] + [1])
        prod = P.one(ctx)
        for g, k in P.factor_poly(ctx, f):
            assert P.is_irreducible(ctx, g)
            prod = P.mul(ctx, prod, P.power(ctx, g, k))
        assert np.array_equal(prod, P.monic(ctx, f))


def test_xgcd_identity(ctx, rng):
    for _ in range(10):
        f = P.poly(ctx, [rng.randrange(ctx.q) for _ in range(5)] + [1])
        g = P.poly(ctx, [rng.randrange(ctx.q) for _ in range(4)] + [1])
        d, s, t = P.xgcd(ctx, f, g)
        assert np.array_equal(P.add(ctx, P.mul(ctx, s, f), P.mul(ctx, t, g)), d)
        assert P.is_zero(P.mod(ctx, f, d)) and P.is_zero(P.mod(ctx, g, d))


# -- linear algebra -------------------------------------------------------------------

def test_rank_nullity_and_nullspace(ctx, rng):
    for _ in range(10):
        r, c = rng.randrange(1, 7), rng.randrange(1, 7)
        A = FqMatrix.wrap(ctx, random_matrix(ctx, r, c, rng, density=0.5))
        N = nullspace(A)  # rows
        assert rank(A) + len(N.a) == c
        for v in N.a:
            assert not ctx.matmul(A.a, v.reshape(-1, 1)).any()


def test_inverse_and_solve(ctx, rng):
    n = 5
    while True:
        A = FqMatrix.wrap(ctx, random_matrix(ctx, n, n, rng))
        if is_invertible(A):
            break
    assert (A @ inverse(A)).is_identity()
    b = FqMatrix.wrap(ctx, random_matrix(ctx, n, 2, rng))
    x = solve(A, b)
    assert A @ x == b


def test_in_image_witness(ctx, rng):
    A = FqMatrix.wrap(ctx, random_matrix(ctx, 5, 3, rng))
    v = FqMatrix.wrap(ctx, random_matrix(ctx, 3, 1, rng))
    res = in_image(A, A @ v)
    assert res and A @ res.witness == A @ v
    basis = column_space_basis(A)
    assert basis.cols == rank(A)


def test_singular_matrix_rejected(ctx):
    A = FqMatrix.wrap(ctx, np.zeros((3, 3), dtype=np.int64))
    assert not is_invertible(A)
    with pytest.raises(ZeroDivisionError):
        inverse(A)


def test_echelon_express(ctx, rng):
    ech = Echelon(ctx, 4, track=True)
    vecs = [random_matrix(ctx, 1, 4, rng)[0] for _ in range(3)]
    for v in vecs:
        ech.add(v)
    coeffs = ech.express(ctx.add_a(vecs[0], vecs[2]))
    assert coeffs is not None


def test_min_poly_annihilates_and_is_minimal(ctx, rng):
    for _ in range(5):
        A = FqMatrix.wrap(ctx, random_matrix(ctx, 5, 5, rng, density=0.4))
        f = min_poly(A)
        assert poly_eval_matrix(ctx, f, A).is_zero()
        # powers I, A, ..., A^{deg-1} are independent
        d = P.degree(f)
        powers = [np.eye(5, dtype=np.int64)]
        for _ in range(d - 1):
            powers.append(ctx.matmul(powers[-1], A.a))
        stacked = FqMatrix.wrap(ctx, np.stack([m.ravel() for m in powers]))
        assert rank(stacked) == d


def test_crt_idempotents_split_identity(rng):
    ctx = field_make(3)
    A = FqMatrix.from_ints(ctx, [[1, 0, 0], [0, 2, 0], [0, 0, 0]])
    f = min_poly(A)
    E = [poly_eval_matrix(ctx, e, A) for e in crt_idempotent_polys(ctx, f, P.factor_poly(ctx, f))]
    total = E[0]
    for e in E[1:]:
        total = total + e
    assert total.is_identity()
    for i, e in enumerate(E):
        assert e @ e == e
        for j, g in enumerate(E):
            if i != j:
                assert (e @ g).is_zero()


def test_csv_roundtrip(ctx, rng):
    A = FqMatrix.wrap(ctx, random_matrix(ctx, 3, 4, rng))
    assert from_csv(ctx, to_csv(A)) == A


# -- integer determinants --------------------------------------------------------------

def test_int_det_matches_sympy(rng):
    for n in range(0, 8):
        rows = [[rng.randrange(-5, 6) for _ in range(n)] for _ in range(n)]
        want = int(sympy.Matrix(rows).det()) if n else 1
        assert int_det(IntMatrix(rows)) == want


def test_int_det_singular_and_permutation():
    assert int_det([[1, 2], [2, 4]]) == 0
    assert int_det([[0, 1], [1, 0]]) == -1
    M = IntMatrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
    assert abs(M.permuted([2, 0, 1]).det()) == abs(M.det())


# -- documented examples ---------------------------------------------------------------

def test_f4_modulus_is_the_unique_irreducible_quadratic():
    irreducible = [c for c in [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]
                   if all((c[0] + c[1] * x + x * x) % 2 for x in (0, 1))]
    assert irreducible == [(1, 1, 1)]
    for seed in range(3):
        assert field_make(2, 2, seed).modulus == (1, 1, 1)


def test_f256_contains_primitive_17th_root():
    ctx = field_make(2, 8)
    z = ctx.pow(ctx.primitive_element(), 255 // 17)
    assert z != 1 and ctx.pow(z, 17) == 1


def test_in_image_examples():
    F2 = field_make(2)
    I = FqMatrix.identity(F2, 2)
    b = FqMatrix.from_ints(F2, [[1], [0]])
    assert in_image(I, b).witness == b
    assert not in_image(FqMatrix.zeros(F2, 2, 2), b)
    res = in_image(FqMatrix.from_ints(F2, [[1, 1], [1, 1]]), FqMatrix.from_ints(F2, [[1], [1]]))
    assert res and res.witness.a[:, 0].tolist() == [1, 0]


def test_min_poly_examples():
    F2, F3 = field_make(2), field_make(3)
    assert min_poly(FqMatrix.identity(F3, 3)).tolist() == [2, 1]  # x - 1
    comp = FqMatrix.from_ints(F2, [[0, 1], [1, 1]])  # companion of x^2 + x + 1
    f = min_poly(comp)
    assert f.tolist() == [1, 1, 1] and P.is_irreducible(F2, f)
    facs = P.factor_poly(F3, np.array([2, 0, 1]))  # x^2 - 1
    assert [(g.tolist(), k) for g, k in facs] == [([1, 1], 1), ([2, 1], 1)]


def test_frobenius_is_additive(ctx, rng):
    for _ in range(50):
        a, b = rng.randrange(ctx.q), rng.randrange(ctx.q)
        assert ctx.pow(ctx.add(a, b), ctx.p) == ctx.add(ctx.pow(a, ctx.p), ctx.pow(b, ctx.p))


def _cofactor_det(m):
    if not m:
        return 1
    return sum((-1) ** j * m[0][j] * _cofactor_det([r[:j] + r[j + 1:] for r in m[1:]])
               for j in range(len(m)))


def test_int_det_matches_cofactor_expansion(rng):
    for _ in range(1000):
        n = rng.randrange(1, 5)
        rows = [[rng.randrange(-3, 4) for _ in range(n)] for _ in range(n)]
        assert int_det(rows) == _cofactor_det(rows)


def test_int_det_examples():
    assert int_det(IntMatrix([[1 if i == j else 0 for j in range(6)] for i in range(6)])) == 1
    assert int_det([[2, 1], [1, 1]]) == 1
    assert int_det([[1, 2, 3], [4, 5, 6], [1, 2, 3]]) == 0
    with pytest.raises(ValueError):
        int_det([[1, 2, 3], [4, 5, 6]])
