"""Folner sequences for Z^d and the Heisenberg group, with exact diagnostics.

A Folner sequence here is a concrete finite list F_1 subseteq ... subseteq F_N
of finite subsets containing the identity.  Two constructions are provided:
anchored boxes [0, n)^d for Z^d and the anisotropic boxes
{(a, b, c) : 0 <= a, b < n, 0 <= c < n^2} for the Heisenberg group (the
central direction must grow quadratically for the defect to vanish).

Everything measurable about a sequence is an exact cardinality ratio:
the defect |KF delta F| / |F| and the tempered (Shulman) constant
|union_{k<n} F_k^{-1} F_n| / |F_n| are returned as Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .groups import (
    DiscreteGroup,
    FiniteSubset,
    HeisenbergGroup,
    ZdGroup,
    inverse_set,
    product_set,
    product_set_size,
    symmetric_difference_size,
)


@dataclass(frozen=True)
class FolnerSequence:
    """Ordered list of finite subsets F_1, ..., F_N of one group.

    `nested_hint` marks sequences known to satisfy F_k subseteq F_{k+1} by
    construction; it only enables a shortcut in tempered_constant and is
    re-verified by validate_sequence.
    """

    group: DiscreteGroup
    sets: tuple
    name: str = "custom"
    nested_hint: bool = False

    def __post_init__(self) -> None:
        if not self.sets:
            raise ValueError("a Folner sequence needs at least one set")
        for F in self.sets:
            if F.group != self.group:
                raise ValueError("all sets must belong to the sequence's group")

    def __len__(self) -> int:
        return len(self.sets)

    def set(self, n: int) -> FiniteSubset:
        """F_n, 1-indexed as in the usual notation."""
        if not 1 <= n <= len(self.sets):
            raise IndexError(f"index {n} outside 1..{len(self.sets)}")
        return self.sets[n - 1]


def box_folner(d: int, n_max: int) -> FolnerSequence:
    """F_n = [0, n)^d for n = 1..n_max, so |F_n| = n^d."""
    if d < 1 or n_max < 1:
        raise ValueError("d and n_max must be positive")
    group = ZdGroup(d)
    sets = tuple(group.box(*([n] * d)) for n in range(1, n_max + 1))
    return FolnerSequence(group, sets, name=f"box-z{d}", nested_hint=True)


def box_folner_sizes(d: int, sides: list) -> FolnerSequence:
    """Boxes [0, s)^d over an increasing side schedule (e.g. dyadic sizes).

    Subsampling a box sequence keeps nesting and identity membership while
    letting experiments reach large |F| in few steps.
    """
    if d < 1 or not sides:
        raise ValueError("d must be positive and sides non-empty")
    if any(s < 1 for s in sides) or any(a >= b for a, b in zip(sides, sides[1:])):
        raise ValueError("sides must be positive and strictly increasing")
    group = ZdGroup(d)
    sets = tuple(group.box(*([s] * d)) for s in sides)
    return FolnerSequence(group, sets, name=f"box-z{d}-sched", nested_hint=True)


def heisenberg_folner(n_max: int) -> FolnerSequence:
    """F_n = {(a,b,c) : 0 <= a,b < n, 0 <= c < n^2}, so |F_n| = n^4."""
    if n_max < 1:
        raise ValueError("n_max must be positive")
    group = HeisenbergGroup()
    sets = tuple(group.box(n, n, n * n) for n in range(1, n_max + 1))
    return FolnerSequence(group, sets, name="box-heisenberg", nested_hint=True)


def folner_defect(K: FiniteSubset, F: FiniteSubset) -> Fraction:
    """Exact defect |KF delta F| / |F|."""
    if len(F) == 0:
        raise ValueError("F must be non-empty")
    KF = product_set(K, F)
    return Fraction(symmetric_difference_size(KF, F), len(F))


def tempered_constant(seq: FolnerSequence, n: int) -> Fraction:
    """Exact Shulman ratio |union_{k<n} F_k^{-1} F_n| / |F_n|.

    For nested sequences the union collapses to F_{n-1}^{-1} F_n, since
    F_k subseteq F_{n-1} implies F_k^{-1} F_n subseteq F_{n-1}^{-1} F_n.
    """
    if not 2 <= n <= len(seq.sets):
        raise ValueError(f"n must be in 2..{len(seq.sets)}")
    Fn = seq.set(n)
    if seq.nested_hint:
        return Fraction(product_set_size(inverse_set(seq.set(n - 1)), Fn), len(Fn))
    union_elems = frozenset()
    for k in range(1, n):
        union_elems |= product_set(inverse_set(seq.set(k)), Fn).elements
    return Fraction(len(union_elems), len(Fn))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on a Folner sequence.

    `size_ok` gates on |F_n| >= n, which every box sequence meets; the
    strict bound |F_n| > n fails for [0,n) in Z^1, so strictness is
    reported separately in `size_strict` rather than failing the sequence.
    """

    identity_ok: bool
    nested_ok: bool
    size_ok: bool
    size_strict: bool
    max_tempered: Optional[Fraction]
    messages: tuple = ()

    @property
    def ok(self) -> bool:
        return self.identity_ok and self.nested_ok and self.size_ok


def validate_sequence(seq: FolnerSequence, check_tempered: bool = True) -> ValidationReport:
    """Check identity membership, nesting, size growth, and temperedness."""
    messages = []
    identity_ok = seq.group.identity() in seq.set(1)
    if not identity_ok:
        messages.append("identity not in F_1")

    nested_ok = True
    for n in range(1, len(seq.sets)):
        if not seq.sets[n - 1].is_subset(seq.sets[n]):
            nested_ok = False
            messages.append(f"F_{n} not contained in F_{n + 1}")
            break

    size_ok = True
    size_strict = True
    for n, F in enumerate(seq.sets, start=1):
        if len(F) < n:
            size_ok = False
            messages.append(f"|F_{n}| = {len(F)} < {n}")
            break
        if len(F) <= n:
            size_strict = False

    max_tempered: Optional[Fraction] = None
    if check_tempered and nested_ok and len(seq.sets) >= 2:
        max_tempered = max(tempered_constant(seq, n) for n in range(2, len(seq.sets) + 1))

    return ValidationReport(
        identity_ok=identity_ok,
        nested_ok=nested_ok,
        size_ok=size_ok,
        size_strict=size_strict,
        max_tempered=max_tempered,
        messages=tuple(messages),
    )
