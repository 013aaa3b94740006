import random

from hypothesis import given, settings, strategies as st

from ipgcd.intlinalg import (
    IntMatrix,
    determinant,
    gcd_of,
    hnf,
    integer_kernel,
    lattice_member,
    min_positive_multiplier,
)

small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.integers(1, 4).flatmap(
        lambda m: st.lists(
            st.lists(st.integers(-9, 9), min_size=m, max_size=m),
            min_size=n, max_size=n,
        )
    )
)


def test_hnf_identity():
    res = hnf(IntMatrix.identity(2))
    assert res.h == IntMatrix.identity(2)
    assert res.u == IntMatrix.identity(2)


def test_hnf_preserves_column_lattice():
    a = IntMatrix.from_rows([[2, 4], [0, 2]])
    h = hnf(a).h
    for j in range(a.cols):
        assert lattice_member(h, a.col_tuple(j))
    for j in range(h.cols):
        col = h.col_tuple(j)
        if any(col):
            assert lattice_member(a, col)


def test_hnf_pivot_is_gcd_of_first_row():
    # column ops on the row (6 4) reach gcd(6, 4) = 2 as the pivot
    h = hnf(IntMatrix.from_rows([[6, 4]])).h
    nonzero = [h.col_tuple(j) for j in range(h.cols) if any(h.col_tuple(j))]
    assert nonzero == [(2,)]
    # a single column is already a lattice basis; only its sign can change
    hcol = hnf(IntMatrix.from_cols([[6, 4]])).h
    assert hcol.col_tuple(0) in ((6, 4), (-6, -4))


def test_hnf_idempotent():
    a = IntMatrix.from_rows([[3, 1, -2], [0, 5, 5]])
    h = hnf(a).h
    assert hnf(h).h == h


@settings(max_examples=120, deadline=None)
@given(small_matrices)
def test_hnf_invariants_random(rows):
    a = IntMatrix.from_rows(rows)
    res = hnf(a)
    assert a.mul(res.u) == res.h
    assert abs(determinant(res.u)) == 1
    # pivots positive and strictly descending in row position
    last = -1
    for j in range(res.h.cols):
        col = res.h.col_tuple(j)
        if not any(col):
            continue
        piv = next(i for i, v in enumerate(col) if v)
        assert col[piv] > 0
        assert piv > last
        last = piv


@settings(max_examples=80, deadline=None)
@given(small_matrices)
def test_kernel_columns_annihilate_and_cover(rows):
    a = IntMatrix.from_rows(rows)
    k = integer_kernel(a)
    for j in range(k.cols):
        col = k.col_tuple(j)
        assert all(
            sum(a.at(i, t) * col[t] for t in range(a.cols)) == 0
            for i in range(a.rows)
        )
    # brute kernel vectors with small entries lie in the returned lattice
    rng = random.Random(hash(tuple(map(tuple, rows))) & 0xFFFF)
    for _ in range(20):
        v = [rng.randint(-4, 4) for _ in range(a.cols)]
        if all(sum(a.at(i, t) * v[t] for t in range(a.cols)) == 0 for i in range(a.rows)):
            assert lattice_member(k, v)


def test_kernel_examples():
    k = integer_kernel(IntMatrix.from_rows([[1, -1]]))
    assert k.cols == 1
    assert lattice_member(k, (1, 1))
    k2 = integer_kernel(IntMatrix.from_rows([[2, 4]]))
    assert k2.cols == 1
    assert lattice_member(k2, (2, -1))
    assert integer_kernel(IntMatrix.identity(3)).cols == 0


def test_kernel_of_zero_matrix_is_identity_lattice():
    k = integer_kernel(IntMatrix.zeros(2, 3))
    assert k.cols == 3
    for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        assert lattice_member(k, v)


def test_lattice_member_examples():
    basis = IntMatrix.from_cols([[2, 0], [0, 3]])
    assert lattice_member(basis, (4, 3))
    assert not lattice_member(basis, (1, 0))
    # (3, 2) is half of (6, 4), not an integer multiple
    h = hnf(IntMatrix.from_cols([[6, 4]])).h
    assert not lattice_member(h, (3, 2))
    assert lattice_member(h, (6, 4))
    assert lattice_member(h, (-12, -8))


def test_min_positive_multiplier_examples():
    assert min_positive_multiplier((1,), IntMatrix.from_cols([[2]])) == 2
    assert min_positive_multiplier((1, 0), IntMatrix.from_cols([[0, 1]])) is None
    assert min_positive_multiplier((3,), IntMatrix.from_cols([[2]])) == 2


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.integers(-6, 6), min_size=2, max_size=3),
    st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=3), min_size=1, max_size=3),
)
def test_min_positive_multiplier_is_minimal(g, cols):
    dim = len(g)
    cols = [c[:dim] + [0] * (dim - len(c)) for c in cols]
    basis = IntMatrix.from_cols(cols)
    lam = min_positive_multiplier(g, basis)
    brute = next(
        (k for k in range(1, 400) if lattice_member(basis, [k * x for x in g])),
        None,
    )
    if brute is not None:
        assert lam == brute
    else:
        assert lam is None or lam >= 400


def test_gcd_of():
    assert gcd_of([12, 18, 30]) == 6
    assert gcd_of([0, 0]) == 0
    assert gcd_of([-4, 6]) == 2
