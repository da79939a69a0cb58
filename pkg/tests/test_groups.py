"""Group algebra: laws, finite subsets, product sets, both route checks."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fiberent.groups as groups_mod
from fiberent.groups import (
    FiniteSubset,
    GroupMismatchError,
    HeisenbergGroup,
    ZdGroup,
    density_ratio,
    inverse,
    inverse_set,
    mul,
    product_set,
    product_set_size,
    random_element,
    subset_from_coords,
    symmetric_difference_size,
    translate,
)

Z1 = ZdGroup(1)
Z2 = ZdGroup(2)
Z3 = ZdGroup(3)
H = HeisenbergGroup()
GROUPS = [Z1, Z2, Z3, H]


def coords_strategy(group, bound=50):
    dims = group.d if isinstance(group, ZdGroup) else 3
    coord = st.integers(min_value=-bound, max_value=bound)
    return st.tuples(*([coord] * dims))


@st.composite
def group_elements(draw, count):
    group = draw(st.sampled_from(GROUPS))
    return group, [group.element(*draw(coords_strategy(group))) for _ in range(count)]


@st.composite
def group_subsets(draw, max_size=10):
    group = draw(st.sampled_from(GROUPS))
    cs = coords_strategy(group, bound=8)
    E = draw(st.frozensets(cs, min_size=1, max_size=max_size))
    F = draw(st.frozensets(cs, min_size=1, max_size=max_size))
    return subset_from_coords(group, E), subset_from_coords(group, F)


@settings(max_examples=1000)
@given(group_elements(3))
def test_associativity(ge):
    _, (g, h, k) = ge
    assert ((g * h) * k).coords == (g * (h * k)).coords


@settings(max_examples=300)
@given(group_elements(2))
def test_identity_and_inverse_laws(ge):
    group, (g, h) = ge
    e = group.identity()
    assert (g * g.inverse()).coords == e.coords
    assert (g.inverse() * g).coords == e.coords
    assert (g * e).coords == g.coords
    assert (e * g).coords == g.coords
    assert mul(g, h).inverse().coords == mul(h.inverse(), g.inverse()).coords
    assert inverse(inverse(g)).coords == g.coords


def test_identity_coords_are_zero():
    for group in GROUPS:
        assert all(c == 0 for c in group.identity().coords)
        assert group.identity().is_identity()


def test_heisenberg_is_noncommutative():
    a = H.element(1, 0, 0)
    b = H.element(0, 1, 0)
    assert (a * b).coords == (1, 1, 1)
    assert (b * a).coords == (1, 1, 0)


def test_heisenberg_inverse_formula():
    g = H.element(2, 3, 1)
    assert g.inverse().coords == (-2, -3, 5)
    assert (g * g.inverse()).is_identity()
    assert (g.inverse() * g).is_identity()


def test_z1_product_set_examples():
    E = subset_from_coords(Z1, [(0,), (1,)])
    assert product_set(E, E).coords_set() == {(0,), (1,), (2,)}
    W = product_set(inverse_set(Z1.box(3)), Z1.box(5))
    assert W.coords_set() == {(k,) for k in range(-2, 5)}
    assert len(W) == 7


def test_symmetric_difference_examples():
    A = subset_from_coords(Z1, [(0,), (1,)])
    B = subset_from_coords(Z1, [(1,), (2,)])
    assert symmetric_difference_size(A, A) == 0
    assert symmetric_difference_size(A, B) == 2
    sq = Z2.box(10, 10)
    shifted = translate(sq, Z2.element(1, 0))
    assert symmetric_difference_size(sq, shifted) == 20


@given(group_subsets())
def test_product_set_cardinality_bounds(EF):
    E, F = EF
    P = product_set(E, F)
    assert max(len(E), len(F)) <= len(P) <= len(E) * len(F)
    assert product_set_size(E, F) == len(P)


@given(group_subsets(), st.data())
def test_translate_preserves_cardinality(EF, data):
    E, _ = EF
    a = E.group.element(*data.draw(coords_strategy(E.group)))
    T = translate(E, a)
    assert len(T) == len(E)
    assert T.coords_set() == {mul(f, a).coords for f in E}


@given(group_subsets())
def test_inverse_set_involution(EF):
    E, _ = EF
    inv = inverse_set(E)
    assert len(inv) == len(E)
    assert inverse_set(inv).coords_set() == E.coords_set()


@given(group_subsets(), st.data())
def test_symmetric_difference_inclusion_exclusion(EF, data):
    A, B = EF
    expected = len(A) + len(B) - 2 * len(A.intersection(B))
    assert symmetric_difference_size(A, B) == expected


def test_fft_product_route_matches_naive(monkeypatch):
    E = subset_from_coords(
        Z2, {(x, y) for x in range(7) for y in range(5)} | {(-3, 2), (10, -4)}
    )
    F = subset_from_coords(Z2, {(x, y) for x in range(4) for y in range(6)})
    naive = product_set(E, F)
    monkeypatch.setattr(groups_mod, "_FFT_PAIR_THRESHOLD", 1)
    fft = product_set(E, F)
    assert fft.coords_set() == naive.coords_set()
    assert product_set_size(E, F) == len(naive)


@given(group_subsets(max_size=6))
def test_fft_route_matches_on_random_zd_sets(EF):
    E, F = EF
    if not isinstance(E.group, ZdGroup):
        return
    naive = product_set(E, F).coords_set()
    assert groups_mod._zd_product_fft(E, F).coords_set() == naive


def test_group_mismatch_is_rejected():
    with pytest.raises(GroupMismatchError):
        mul(Z1.element(1), Z2.element(1, 0))
    with pytest.raises(GroupMismatchError):
        product_set(Z1.box(2), Z2.box(2, 2))
    with pytest.raises(GroupMismatchError):
        translate(Z1.box(2), Z2.element(0, 0))


def test_element_arity_is_checked():
    with pytest.raises((TypeError, ValueError)):
        Z2.element(1)
    with pytest.raises((TypeError, ValueError)):
        Z1.element(1, 2)


def test_box_and_ball_sizes():
    assert len(Z1.box(5)) == 5
    assert len(Z2.box(3, 4)) == 12
    assert len(Z3.box(2, 2, 2)) == 8
    assert len(H.box(2, 3, 4)) == 24
    assert len(Z1.ball(2)) == 5
    assert len(Z2.ball(1)) == 9
    assert len(H.ball(1)) == 27


def test_density_ratio_is_exact():
    F = Z1.box(8)
    assert density_ratio(2, F) == Fraction(1, 4)


def test_random_element_is_deterministic_and_bounded():
    g = random_element(Z2, 5, 123, "a")
    h = random_element(Z2, 5, 123, "a")
    assert g.coords == h.coords
    assert g.norm_inf() <= 5
    other = random_element(Z2, 5, 123, "b")
    draws = {random_element(Z2, 5, 123, "a", i).coords for i in range(32)}
    assert len(draws) > 1
    assert all(max(abs(c) for c in cs) <= 5 for cs in draws)
    assert other.norm_inf() <= 5


def test_finite_subset_set_algebra():
    A = Z1.box(4)
    B = translate(A, Z1.element(2))
    assert A.union(B).coords_set() == {(k,) for k in range(6)}
    assert A.intersection(B).coords_set() == {(2,), (3,)}
    assert A.difference(B).coords_set() == {(0,), (1,)}
    assert A.intersection(B).is_subset(A)
    assert A.sorted_elements() == sorted(A.sorted_elements(), key=lambda g: g.coords)
