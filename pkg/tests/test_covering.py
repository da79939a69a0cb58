"""Greedy and randomized quasi-tiling covers and their exact verifiers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fiberent.groups import HeisenbergGroup, ZdGroup, mul, subset_from_coords
from fiberent.covering import (
    CoverInstance,
    CoverSolution,
    HypothesisError,
    RandomCoverInstance,
    check_hypotheses,
    greedy_cover,
    sample_many,
    sample_random_cover,
    verify_greedy_cover,
    verify_random_cover,
)

Z1 = ZdGroup(1)
Z2 = ZdGroup(2)
H = HeisenbergGroup()


def grid2(xs, ys):
    return [(x, y) for x in xs for y in ys]


def tiling_instance():
    # five disjoint [0,2) blocks tile [0,10) exactly
    return CoverInstance.create(
        Z1.box(10),
        [Z1.box(2)],
        [subset_from_coords(Z1, [(k,) for k in (0, 2, 4, 6, 8)])],
        delta=Fraction(1, 10),
        epsilon=Fraction(1, 2),
    )


def two_scale_z1_instance():
    # [0,6) tiles fill [0,36); every [0,3) candidate is then fully covered
    return CoverInstance.create(
        Z1.box(36),
        [Z1.box(3), Z1.box(6)],
        [
            subset_from_coords(Z1, [(3 * k,) for k in range(12)]),
            subset_from_coords(Z1, [(6 * k,) for k in range(6)]),
        ],
        delta=Fraction(1, 5),
        epsilon=Fraction(1, 2),
    )


def overlap_chain_instance(delta=Fraction(1, 4)):
    # [0,5) blocks at step 4: each accepted block overlaps its predecessor in one point
    return CoverInstance.create(
        Z1.box(50),
        [Z1.box(5)],
        [subset_from_coords(Z1, [(4 * k,) for k in range(12)])],
        delta=delta,
        epsilon=Fraction(1, 2),
    )


def two_scale_z2_instance():
    return CoverInstance.create(
        Z2.box(12, 12),
        [Z2.box(2, 2), Z2.box(4, 4)],
        [
            subset_from_coords(Z2, grid2(range(0, 12, 2), range(0, 12, 2))),
            subset_from_coords(Z2, grid2((0, 4, 8), (0, 4, 8))),
        ],
        delta=Fraction(1, 10),
        epsilon=Fraction(3, 5),
    )


HEISENBERG_CENTERS = [(a, b, c) for a in (0, 2) for b in (0, 2) for c in (0, 4, 8)]


def heisenberg_instance():
    return CoverInstance.create(
        H.box(4, 4, 16),
        [H.box(2, 2, 4)],
        [subset_from_coords(H, HEISENBERG_CENTERS)],
        delta=Fraction(1, 10),
        epsilon=Fraction(1, 2),
    )


def chain_fail_instance():
    # step 9 with width 10: every block overlaps the last in one point, so the
    # union loses 11 points against the total and (1+delta) cannot close the gap
    return CoverInstance.create(
        Z1.box(110),
        [Z1.box(10)],
        [subset_from_coords(Z1, [(9 * k,) for k in range(12)])],
        delta=Fraction(1, 10),
        epsilon=Fraction(1, 2),
    )


class TestInstanceValidation:
    def test_shape_center_count_mismatch(self):
        with pytest.raises(ValueError):
            CoverInstance.create(
                Z1.box(4), [Z1.box(2), Z1.box(3)], [subset_from_coords(Z1, [(0,)])],
                delta=Fraction(1, 10), epsilon=Fraction(1, 2),
            )
        with pytest.raises(ValueError):
            CoverInstance.create(Z1.box(4), [], [], delta=0.1, epsilon=0.5)

    def test_parameters_must_be_unit_fractions(self):
        for bad in (0, 1, Fraction(3, 2), -0.1):
            with pytest.raises(ValueError):
                CoverInstance.create(
                    Z1.box(4), [Z1.box(2)], [subset_from_coords(Z1, [(0,)])],
                    delta=bad, epsilon=Fraction(1, 2),
                )

    def test_random_instance_ragged_rows(self):
        with pytest.raises(ValueError):
            RandomCoverInstance.create(
                Z1.box(4),
                [[Z1.box(2), Z1.box(2)]],
                [[subset_from_coords(Z1, [(0,)])]],
                K=Z1.box(2), C=Fraction(4),
                alpha=Fraction(1, 2), delta=Fraction(1, 4), epsilon=Fraction(1, 2),
            )

    def test_unsupported_instance_type(self):
        with pytest.raises(TypeError):
            check_hypotheses("not an instance")


class TestHypotheses:
    def test_two_scale_growth_rows_exact(self):
        rows = {r.name: r for r in check_hypotheses(two_scale_z1_instance()).rows}
        growth = rows["growth-1"]
        # S_1^{-1} S_2 = [-2, 6) has 8 points against (1 + 1/2) * 6
        assert growth.lhs == 8
        assert growth.rhs == 9
        assert growth.ok

    def test_z2_growth_row_exact(self):
        rows = {r.name: r for r in check_hypotheses(two_scale_z2_instance()).rows}
        growth = rows["growth-1"]
        assert growth.lhs == 25
        assert growth.rhs == Fraction(128, 5)
        assert growth.ok

    def test_containment_failure_detected(self):
        inst = CoverInstance.create(
            Z1.box(10), [Z1.box(3)], [subset_from_coords(Z1, [(8,)])],
            delta=Fraction(1, 10), epsilon=Fraction(1, 2),
        )
        report = check_hypotheses(inst)
        assert not report.ok
        assert report.failures == ("shape-containment-1",)
        with pytest.raises(HypothesisError):
            greedy_cover(inst)

    def test_growth_failure_blocks_sampler(self):
        # a large shape before a small one violates the across-row growth bound:
        # |[0,8)^{-1} [0,2)| = 9 > (1 + 1/2) * 2
        inst = RandomCoverInstance.create(
            Z1.box(60),
            [[Z1.box(8)], [Z1.box(2)]],
            [
                [subset_from_coords(Z1, [(8 * k,) for k in range(7)])],
                [subset_from_coords(Z1, [(2 * k,) for k in range(28)])],
            ],
            K=Z1.box(4), C=Fraction(6),
            alpha=Fraction(1, 10), delta=Fraction(1, 4), epsilon=Fraction(1, 2),
        )
        report = check_hypotheses(inst)
        assert report.failures == ("growth-across-1-1",)
        with pytest.raises(HypothesisError):
            sample_random_cover(inst, 1)


class TestGreedyCover:
    def test_tiling_exact(self):
        inst = tiling_instance()
        sol = greedy_cover(inst)
        assert len(sol.picks) == 5
        assert sol.total_size == 10
        assert sol.union_size == 10
        assert set(sol.multiplicity_map().values()) == {1}
        report = verify_greedy_cover(inst, sol)
        assert report.disjointness_lhs == Fraction(11)
        assert report.disjointness_rhs == Fraction(10)
        assert report.coverage_lhs == 10
        assert report.coverage_rhs == Fraction(4)
        assert report.ok

    def test_two_scale_rejects_covered_smalls(self):
        inst = two_scale_z1_instance()
        sol = greedy_cover(inst)
        # big tiles claim everything; the small layer contributes nothing
        assert all(pick[0] == 2 for pick in sol.picks)
        assert len(sol.picks) == 6
        assert sol.total_size == 36
        assert sol.union_size == 36
        assert verify_greedy_cover(inst, sol).ok

    def test_overlap_chain_statistics(self):
        inst = overlap_chain_instance()
        sol = greedy_cover(inst)
        assert len(sol.picks) == 12
        assert sol.total_size == 60
        assert sol.union_size == 49
        assert max(sol.multiplicity_map().values()) == 2
        report = verify_greedy_cover(inst, sol)
        assert report.disjointness_lhs == Fraction(245, 4)
        assert report.disjointness_rhs == Fraction(60)
        assert report.ok

    def test_z2_two_scale(self):
        inst = two_scale_z2_instance()
        sol = greedy_cover(inst)
        assert len(sol.picks) == 9
        assert sol.total_size == 144
        assert sol.union_size == 144
        assert verify_greedy_cover(inst, sol).ok

    def test_heisenberg_blocks_are_disjoint(self):
        # right translates separate in the first two coordinates and the
        # center spacing absorbs the twist in the third
        inst = heisenberg_instance()
        sol = greedy_cover(inst)
        assert len(sol.picks) == 12
        assert sol.total_size == 192
        assert sol.union_size == 192
        assert set(sol.multiplicity_map().values()) == {1}
        assert verify_greedy_cover(inst, sol).ok

    def test_construction_bound_on_all_instances(self):
        for inst in (
            tiling_instance(),
            two_scale_z1_instance(),
            overlap_chain_instance(),
            two_scale_z2_instance(),
            heisenberg_instance(),
            chain_fail_instance(),
        ):
            sol = greedy_cover(inst)
            assert (1 - inst.delta) * sol.total_size <= sol.union_size

    def test_deterministic(self):
        assert greedy_cover(overlap_chain_instance()) == greedy_cover(overlap_chain_instance())

    def test_acceptance_threshold_boundary(self):
        # second block {1, 2} overlaps one point: accepted iff 1 <= 2 delta
        ambient = Z1.box(3)
        shapes = [Z1.box(2)]
        centers = [subset_from_coords(Z1, [(0,), (1,)])]
        at_half = greedy_cover(
            CoverInstance.create(ambient, shapes, centers, Fraction(1, 2), Fraction(1, 2))
        )
        assert at_half.picks == ((1, (0,)), (1, (1,)))
        below = greedy_cover(
            CoverInstance.create(ambient, shapes, centers, Fraction(2, 5), Fraction(1, 2))
        )
        assert below.picks == ((1, (0,)),)

    def test_empty_center_set_gives_empty_solution(self):
        inst = CoverInstance.create(
            Z1.box(10), [Z1.box(2)], [subset_from_coords(Z1, [])],
            delta=Fraction(1, 10), epsilon=Fraction(1, 2),
        )
        sol = greedy_cover(inst)
        assert sol.picks == ()
        assert sol.total_size == 0
        report = verify_greedy_cover(inst, sol)
        assert report.coverage_rhs == Fraction(-1)
        assert report.ok

    @settings(max_examples=60, deadline=None)
    @given(
        centers=st.sets(st.integers(0, 11), min_size=1),
        delta_num=st.integers(1, 9),
    )
    def test_construction_bound_property(self, centers, delta_num):
        inst = CoverInstance.create(
            Z1.box(50),
            [Z1.box(5)],
            [subset_from_coords(Z1, [(4 * k,) for k in sorted(centers)])],
            delta=Fraction(delta_num, 10),
            epsilon=Fraction(1, 2),
        )
        sol = greedy_cover(inst)
        assert (1 - inst.delta) * sol.total_size <= sol.union_size
        assert sol == greedy_cover(inst)


class TestGreedyConclusionFailure:
    def test_chain_instance_fails_lemma_form_honestly(self):
        # hypotheses hold and the construction bound holds, yet the stated
        # (1+delta) disjointness inequality fails: 119.9 < 120
        inst = chain_fail_instance()
        assert check_hypotheses(inst).ok
        sol = greedy_cover(inst)
        assert sol.total_size == 120
        assert sol.union_size == 109
        report = verify_greedy_cover(inst, sol)
        assert report.disjointness_lhs == Fraction(1199, 10)
        assert report.disjointness_rhs == Fraction(120)
        assert not report.disjointness_ok
        assert report.coverage_ok
        assert not report.ok

    def test_handmade_empty_solution_fails_coverage(self):
        inst = tiling_instance()
        fake = CoverSolution(picks=(), covered=frozenset(), total_size=0, multiplicity=())
        report = verify_greedy_cover(inst, fake)
        assert not report.coverage_ok
        assert not report.ok


class TestDeltaMonotonicity:
    def test_monotone_on_single_scale_chain(self):
        totals = [
            greedy_cover(overlap_chain_instance(delta)).total_size
            for delta in (
                Fraction(1, 20), Fraction(1, 5), Fraction(1, 4),
                Fraction(2, 5), Fraction(3, 5),
            )
        ]
        assert totals == sorted(totals)
        assert totals[0] == 30 and totals[-1] == 60

    def test_not_monotone_in_general(self):
        # a larger delta lets a second big block in, which then starves a
        # whole field of small blocks that the stricter run had accepted
        ambient = subset_from_coords(Z2, grid2(range(0, 20), range(-2, 8)))
        shapes = [
            subset_from_coords(Z2, [(0, 0), (0, 1)]),
            subset_from_coords(Z2, grid2(range(0, 8), range(0, 4))),
        ]
        centers = [
            subset_from_coords(Z2, grid2(range(8, 14), (-1, 1, 3))),
            subset_from_coords(Z2, [(0, 0), (6, 0)]),
        ]
        strict = greedy_cover(
            CoverInstance.create(ambient, shapes, centers, Fraction(1, 5), Fraction(1, 2))
        )
        loose = greedy_cover(
            CoverInstance.create(ambient, shapes, centers, Fraction(3, 10), Fraction(1, 2))
        )
        assert strict.total_size == 68
        assert loose.total_size == 64
        assert loose.total_size < strict.total_size


def deterministic_random_instance():
    # alpha is met by the big row alone, so q hits 1 there and 0 afterwards
    return RandomCoverInstance.create(
        Z1.box(60),
        [[Z1.box(2)], [Z1.box(4)]],
        [
            [subset_from_coords(Z1, [(2 * k,) for k in range(28)])],
            [subset_from_coords(Z1, [(4 * k,) for k in range(14)])],
        ],
        K=Z1.box(4), C=Fraction(6),
        alpha=Fraction(1, 2), delta=Fraction(1, 4), epsilon=Fraction(1, 2),
    )


def multiplicity_chain_instance(alpha=Fraction(2, 25), delta=Fraction(1, 4), spread=2):
    # [0,4) blocks at step 3: interior points on 3Z sit under two candidates
    return RandomCoverInstance.create(
        Z1.box(60),
        [[Z1.box(4)]],
        [[subset_from_coords(Z1, [(3 * k,) for k in range(18)])]],
        K=Z1.box(spread), C=Fraction(6),
        alpha=alpha, delta=delta, epsilon=Fraction(1, 2),
    )


def coverage_two_row_instance():
    return RandomCoverInstance.create(
        Z1.box(90),
        [[Z1.box(3)], [Z1.box(6)]],
        [
            [subset_from_coords(Z1, [(57 + 3 * k,) for k in range(11)])],
            [subset_from_coords(Z1, [(12 * k,) for k in range(5)])],
        ],
        K=Z1.box(12), C=Fraction(6),
        alpha=Fraction(9, 20), delta=Fraction(1, 5), epsilon=Fraction(1, 2),
    )


def z2_random_instance():
    return RandomCoverInstance.create(
        Z2.box(12, 12),
        [[Z2.box(3, 3)]],
        [[subset_from_coords(Z2, grid2((0, 3, 6, 9), (0, 3, 6, 9)))]],
        K=Z2.box(3, 3), C=Fraction(6),
        alpha=Fraction(1, 2), delta=Fraction(3, 25), epsilon=Fraction(1, 2),
    )


def heisenberg_random_instance():
    return RandomCoverInstance.create(
        H.box(4, 4, 16),
        [[H.box(2, 2, 4)]],
        [[subset_from_coords(H, HEISENBERG_CENTERS)]],
        K=H.box(2, 2, 2), C=Fraction(4),
        alpha=Fraction(3, 10), delta=Fraction(3, 20), epsilon=Fraction(1, 2),
    )


def replay_multiplicity(inst, sol):
    lam = {}
    for i, j, ac in sol.picks:
        shape = inst.shapes[i - 1][j - 1]
        for f in shape.sorted_elements():
            c = inst.ambient.group.mul_coords(f.coords, ac)
            lam[c] = lam.get(c, 0) + 1
    return lam


class TestRandomCover:
    def test_degenerate_instance_is_seed_independent(self):
        inst = deterministic_random_instance()
        assert check_hypotheses(inst).ok
        a = sample_random_cover(inst, 1)
        b = sample_random_cover(inst, 999)
        assert a == b
        # big layer keeps everything at q = 1; small layer is skipped at q = 0
        assert all(pick[:2] == (2, 1) for pick in a.picks)
        assert len(a.picks) == 14
        assert a.total_size == 56

    def test_degenerate_instance_matches_greedy(self):
        rand_sol = sample_random_cover(deterministic_random_instance(), 5)
        greedy_sol = greedy_cover(
            CoverInstance.create(
                Z1.box(60),
                [Z1.box(2), Z1.box(4)],
                [
                    subset_from_coords(Z1, [(2 * k,) for k in range(28)]),
                    subset_from_coords(Z1, [(4 * k,) for k in range(14)]),
                ],
                delta=Fraction(1, 4), epsilon=Fraction(1, 2),
            )
        )
        assert rand_sol.covered == greedy_sol.covered
        assert rand_sol.total_size == greedy_sol.total_size
        assert [(i, a) for i, j, a in rand_sol.picks] == list(greedy_sol.picks)

    def test_seed_purity(self):
        inst = multiplicity_chain_instance()
        assert sample_random_cover(inst, 5) == sample_random_cover(inst, 5)
        assert sample_random_cover(inst, 5) != sample_random_cover(inst, 6)

    def test_multiplicity_matches_replay(self):
        inst = multiplicity_chain_instance()
        for seed in range(5):
            sol = sample_random_cover(inst, seed)
            lam = replay_multiplicity(inst, sol)
            assert sol.multiplicity_map() == lam
            assert sol.covered == frozenset(lam)
            assert sol.total_size == sum(lam.values())

    def test_overlapping_chain_verifies_within_band(self):
        # q = 0.3, so a point under two candidates has E(mult | covered)
        # = 2 / (2 - q) which stays under 1 + delta
        inst = multiplicity_chain_instance()
        report = verify_random_cover(inst, sample_many(inst, 400, 11))
        assert report.samples == 400
        assert report.multiplicity_bound == 1.25
        assert report.max_conditional_multiplicity < 1.25 + 3 * report.max_conditional_se
        assert 1.0 <= report.max_conditional_multiplicity < 1.3
        assert report.coverage_bound < 0
        assert report.ok

    def test_two_row_coverage(self):
        inst = coverage_two_row_instance()
        assert check_hypotheses(inst).ok
        sols = sample_many(inst, 400, 13)
        # the big row runs at q = 1 and always lands all five disjoint tiles
        assert all(sum(1 for p in s.picks if p[0] == 2) == 5 for s in sols)
        report = verify_random_cover(inst, sols)
        assert report.max_conditional_multiplicity == 1.0
        assert report.coverage_bound == pytest.approx(22.5)
        assert report.mean_total_size > 45
        assert report.ok

    def test_z2_instance(self):
        inst = z2_random_instance()
        report = verify_random_cover(inst, sample_many(inst, 300, 17))
        assert report.max_conditional_multiplicity == 1.0
        band = 5 * report.total_size_se
        assert abs(report.mean_total_size - 138.24) <= band
        assert report.ok

    def test_heisenberg_instance(self):
        inst = heisenberg_random_instance()
        assert check_hypotheses(inst).ok
        report = verify_random_cover(inst, sample_many(inst, 300, 19))
        assert report.max_conditional_multiplicity == 1.0
        band = 5 * report.total_size_se
        assert abs(report.mean_total_size - 138.24) <= band
        assert report.ok

    def test_verifier_needs_samples(self):
        inst = multiplicity_chain_instance()
        with pytest.raises(ValueError):
            verify_random_cover(inst, sample_many(inst, 99, 1))


class TestRandomConclusionFailures:
    def test_forced_q1_breaks_multiplicity_bound(self):
        # alpha large enough pins q at 1, the sampler degenerates to the
        # greedy pass, and interior points on 3Z are always double covered
        inst = multiplicity_chain_instance(alpha=Fraction(4, 5), spread=9)
        assert check_hypotheses(inst).ok
        sols = sample_many(inst, 100, 23)
        assert len({s.total_size for s in sols}) == 1
        report = verify_random_cover(inst, sols)
        assert report.max_conditional_multiplicity == 2.0
        assert not report.multiplicity_ok
        assert report.coverage_ok
        assert not report.ok

    def test_tiny_delta_misses_coverage(self):
        inst = multiplicity_chain_instance(
            alpha=Fraction(1, 2), delta=Fraction(1, 100), spread=9
        )
        assert check_hypotheses(inst).ok
        report = verify_random_cover(inst, sample_many(inst, 400, 29))
        assert report.coverage_bound == pytest.approx(29.4)
        assert report.mean_total_size < 10
        assert not report.coverage_ok
        assert not report.ok
