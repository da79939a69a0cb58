#!/usr/bin/env python3
"""Print an SMB convergence table for one of the built-in models.

The empirical information rate -log mu_omega(cell) / |F_n| is averaged
over independent trajectories and compared against the closed-form fiber
entropy at every window size.

Usage:
    python scripts/smb_convergence.py --model bernoulli --n-max 16
    python scripts/smb_convergence.py --model markov --sides 16,64,256,1024
    python scripts/smb_convergence.py --model mixed --trajectories 200
"""

import argparse
import sys

from fiberent.entropy import smb_trace
from fiberent.folner import box_folner, box_folner_sizes, heisenberg_folner
from fiberent.groups import HeisenbergGroup, ZdGroup
from fiberent.rds import BernoulliModel, MarkovModel, RandomAlphabetModel


def build_model(name, group):
    if name == "bernoulli":
        return BernoulliModel.create(group, [0.7, 0.3])
    if name == "mixed":
        return RandomAlphabetModel.create(group, [0.5, 0.5], [[0.5, 0.5], [0.9, 0.1]])
    if name == "markov":
        if group != ZdGroup(1):
            sys.exit("the markov model acts on zd:1 only")
        return MarkovModel.create([[0.9, 0.1], [0.2, 0.8]])
    raise AssertionError(name)


def build_group(name):
    if name == "heisenberg":
        return HeisenbergGroup()
    return ZdGroup(int(name.split(":")[1]))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--model", choices=("bernoulli", "mixed", "markov"),
                        default="bernoulli")
    parser.add_argument("--group", choices=("zd:1", "zd:2", "zd:3", "heisenberg"),
                        default=None, help="default: zd:2, or zd:1 for markov")
    parser.add_argument("--n-max", type=int, default=16)
    parser.add_argument("--sides", type=str, default=None,
                        help="comma-separated box sides, overrides --n-max")
    parser.add_argument("--trajectories", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    group_name = args.group or ("zd:1" if args.model == "markov" else "zd:2")
    group = build_group(group_name)
    model = build_model(args.model, group)

    if isinstance(group, HeisenbergGroup):
        seq = heisenberg_folner(args.n_max)
    elif args.sides:
        seq = box_folner_sizes(group.d, [int(s) for s in args.sides.split(",")])
    else:
        seq = box_folner(group.d, args.n_max)

    trace = smb_trace(model, seq, trajectories=args.trajectories,
                      seed=args.seed, workers=args.workers)
    target = trace.rows[0].target
    print(f"model={model.kind} group={group.tag} trajectories={args.trajectories} "
          f"seed={args.seed}")
    print(f"fiber entropy target: {target:.9f}")
    print(f"{'n':>4} {'|F_n|':>8} {'estimate':>12} {'abs_error':>12} {'std_error':>12}")
    for row in trace.rows:
        print(f"{row.n:>4} {row.folner_size:>8} {row.estimate:>12.6f} "
              f"{row.abs_error:>12.2e} {row.std_error:>12.2e}")


if __name__ == "__main__":
    main()
