#!/usr/bin/env python3
"""Run the curated cover-construction suite and print verifier verdicts.

Positive instances exercise tilings, overlapping chains, two-scale
families, and a Heisenberg block family; negative controls demonstrate
that conclusion failures are reported, never masked. See the test suite
for the arithmetic behind each instance.

Usage:
    python scripts/covering_demo.py [--samples 10000] [--seed 101]
"""

import argparse
from fractions import Fraction

from fiberent.covering import (
    CoverInstance,
    RandomCoverInstance,
    check_hypotheses,
    greedy_cover,
    sample_many,
    verify_greedy_cover,
    verify_random_cover,
)
from fiberent.groups import HeisenbergGroup, ZdGroup, subset_from_coords

Z1 = ZdGroup(1)
Z2 = ZdGroup(2)
H = HeisenbergGroup()


def grid2(xs, ys):
    return [(x, y) for x in xs for y in ys]


def greedy_instances():
    yield "tiling", CoverInstance.create(
        Z1.box(10), [Z1.box(2)],
        [subset_from_coords(Z1, [(k,) for k in (0, 2, 4, 6, 8)])],
        Fraction(1, 10), Fraction(1, 2))
    yield "two-scale-z1", CoverInstance.create(
        Z1.box(36), [Z1.box(3), Z1.box(6)],
        [subset_from_coords(Z1, [(3 * k,) for k in range(12)]),
         subset_from_coords(Z1, [(6 * k,) for k in range(6)])],
        Fraction(1, 5), Fraction(1, 2))
    yield "overlap-chain", CoverInstance.create(
        Z1.box(50), [Z1.box(5)],
        [subset_from_coords(Z1, [(4 * k,) for k in range(12)])],
        Fraction(1, 4), Fraction(1, 2))
    yield "two-scale-z2", CoverInstance.create(
        Z2.box(12, 12), [Z2.box(2, 2), Z2.box(4, 4)],
        [subset_from_coords(Z2, grid2(range(0, 12, 2), range(0, 12, 2))),
         subset_from_coords(Z2, grid2((0, 4, 8), (0, 4, 8)))],
        Fraction(1, 10), Fraction(3, 5))
    yield "heisenberg", CoverInstance.create(
        H.box(4, 4, 16), [H.box(2, 2, 4)],
        [subset_from_coords(H, [(a, b, c) for a in (0, 2) for b in (0, 2)
                                for c in (0, 4, 8)])],
        Fraction(1, 10), Fraction(1, 2))
    # negative control: hypotheses hold, the (1+delta) inequality does not
    yield "NEG chain-fail", CoverInstance.create(
        Z1.box(110), [Z1.box(10)],
        [subset_from_coords(Z1, [(9 * k,) for k in range(12)])],
        Fraction(1, 10), Fraction(1, 2))


def random_instances():
    yield "two-row-degenerate", RandomCoverInstance.create(
        Z1.box(60), [[Z1.box(2)], [Z1.box(4)]],
        [[subset_from_coords(Z1, [(2 * k,) for k in range(28)])],
         [subset_from_coords(Z1, [(4 * k,) for k in range(14)])]],
        K=Z1.box(4), C=Fraction(6),
        alpha=Fraction(1, 2), delta=Fraction(1, 4), epsilon=Fraction(1, 2))
    yield "chain-q30", RandomCoverInstance.create(
        Z1.box(60), [[Z1.box(4)]],
        [[subset_from_coords(Z1, [(3 * k,) for k in range(18)])]],
        K=Z1.box(2), C=Fraction(6),
        alpha=Fraction(2, 25), delta=Fraction(1, 4), epsilon=Fraction(1, 2))
    yield "two-row-coverage", RandomCoverInstance.create(
        Z1.box(90), [[Z1.box(3)], [Z1.box(6)]],
        [[subset_from_coords(Z1, [(57 + 3 * k,) for k in range(11)])],
         [subset_from_coords(Z1, [(12 * k,) for k in range(5)])]],
        K=Z1.box(12), C=Fraction(6),
        alpha=Fraction(9, 20), delta=Fraction(1, 5), epsilon=Fraction(1, 2))
    yield "z2-tiling", RandomCoverInstance.create(
        Z2.box(12, 12), [[Z2.box(3, 3)]],
        [[subset_from_coords(Z2, grid2((0, 3, 6, 9), (0, 3, 6, 9)))]],
        K=Z2.box(3, 3), C=Fraction(6),
        alpha=Fraction(1, 2), delta=Fraction(3, 25), epsilon=Fraction(1, 2))
    yield "heisenberg", RandomCoverInstance.create(
        H.box(4, 4, 16), [[H.box(2, 2, 4)]],
        [[subset_from_coords(H, [(a, b, c) for a in (0, 2) for b in (0, 2)
                                 for c in (0, 4, 8)])]],
        K=H.box(2, 2, 2), C=Fraction(4),
        alpha=Fraction(3, 10), delta=Fraction(3, 20), epsilon=Fraction(1, 2))
    # negative control: q pinned at 1 makes double coverage certain
    yield "NEG forced-q1", RandomCoverInstance.create(
        Z1.box(60), [[Z1.box(4)]],
        [[subset_from_coords(Z1, [(3 * k,) for k in range(18)])]],
        K=Z1.box(9), C=Fraction(6),
        alpha=Fraction(4, 5), delta=Fraction(1, 4), epsilon=Fraction(1, 2))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=101)
    args = parser.parse_args()

    print("== greedy construction ==")
    for name, inst in greedy_instances():
        hyp = check_hypotheses(inst)
        if not hyp.ok:
            print(f"{name:>20}: hypotheses FAIL ({', '.join(hyp.failures)})")
            continue
        sol = greedy_cover(inst)
        rep = verify_greedy_cover(inst, sol)
        print(f"{name:>20}: picks={len(sol.picks):>3} total={sol.total_size:>4} "
              f"union={sol.union_size:>4} disjointness={'ok' if rep.disjointness_ok else 'FAIL'} "
              f"coverage={'ok' if rep.coverage_ok else 'FAIL'}")

    print(f"== randomized construction ({args.samples} samples each) ==")
    for name, inst in random_instances():
        hyp = check_hypotheses(inst)
        if not hyp.ok:
            print(f"{name:>20}: hypotheses FAIL ({', '.join(hyp.failures)})")
            continue
        rep = verify_random_cover(inst, sample_many(inst, args.samples, args.seed))
        print(f"{name:>20}: worst_mult={rep.max_conditional_multiplicity:.4f} "
              f"(bound {rep.multiplicity_bound:.2f}) "
              f"mean_total={rep.mean_total_size:.2f} "
              f"(bound {rep.coverage_bound:.2f}) "
              f"multiplicity={'ok' if rep.multiplicity_ok else 'FAIL'} "
              f"coverage={'ok' if rep.coverage_ok else 'FAIL'}")


if __name__ == "__main__":
    main()
