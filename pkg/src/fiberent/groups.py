"""Exact arithmetic for two discrete amenable groups and their finite subsets.

Supported groups are the integer lattices Z^d and the discrete Heisenberg
group of upper-triangular integer matrices, written as coordinate triples
(a, b, c) with product

    (a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a * b').

Elements are immutable and carry their group, so mixed-group operations
fail loudly.  All set operations are exact; Python integers never
overflow, so no width checks are needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _iterproduct
from typing import Iterable, Iterator, Union

import numpy as np
from scipy.signal import fftconvolve


class GroupMismatchError(ValueError):
    """Raised when an operation mixes elements of different groups."""


@dataclass(frozen=True)
class ZdGroup:
    """The free abelian group Z^d under coordinate-wise addition."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def tag(self) -> str:
        return f"zd:{self.d}"

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.d)

    def element(self, *coords: int) -> "GroupElement":
        if len(coords) != self.d:
            raise ValueError(f"expected {self.d} coordinates, got {len(coords)}")
        return GroupElement(self, tuple(int(c) for c in coords))

    def mul_coords(self, a: tuple, b: tuple) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def inverse_coords(self, a: tuple) -> tuple:
        return tuple(-x for x in a)

    def ball(self, radius: int) -> "FiniteSubset":
        """Sup-norm ball {g : max|g_i| <= radius}."""
        rng = range(-radius, radius + 1)
        return FiniteSubset(
            self, frozenset(GroupElement(self, c) for c in _iterproduct(rng, repeat=self.d))
        )

    def box(self, *extents: int) -> "FiniteSubset":
        """Anchored box [0, e_1) x ... x [0, e_d)."""
        if len(extents) != self.d:
            raise ValueError(f"expected {self.d} extents, got {len(extents)}")
        ranges = [range(e) for e in extents]
        return FiniteSubset(
            self, frozenset(GroupElement(self, c) for c in _iterproduct(*ranges))
        )


@dataclass(frozen=True)
class HeisenbergGroup:
    """Discrete Heisenberg group on integer triples (a, b, c)."""

    @property
    def tag(self) -> str:
        return "heisenberg"

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0, 0, 0))

    def element(self, a: int, b: int, c: int) -> "GroupElement":
        return GroupElement(self, (int(a), int(b), int(c)))

    def mul_coords(self, g: tuple, h: tuple) -> tuple:
        a, b, c = g
        ap, bp, cp = h
        return (a + ap, b + bp, c + cp + a * bp)

    def inverse_coords(self, g: tuple) -> tuple:
        # Solve (a,b,c)(x,y,z) = e: x=-a, y=-b, z = a*b - c.
        a, b, c = g
        return (-a, -b, a * b - c)

    def ball(self, radius: int) -> "FiniteSubset":
        rng = range(-radius, radius + 1)
        return FiniteSubset(
            self, frozenset(GroupElement(self, t) for t in _iterproduct(rng, rng, rng))
        )

    def box(self, na: int, nb: int, nc: int) -> "FiniteSubset":
        """{(a, b, c) : 0 <= a < na, 0 <= b < nb, 0 <= c < nc}."""
        return FiniteSubset(
            self,
            frozenset(
                GroupElement(self, t)
                for t in _iterproduct(range(na), range(nb), range(nc))
            ),
        )


DiscreteGroup = Union[ZdGroup, HeisenbergGroup]


@dataclass(frozen=True)
class GroupElement:
    """An element of a concrete discrete group, stored as integer coordinates."""

    group: DiscreteGroup
    coords: tuple

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return mul(self, other)

    def inverse(self) -> "GroupElement":
        return inverse(self)

    def norm_inf(self) -> int:
        return max(abs(c) for c in self.coords)

    def is_identity(self) -> bool:
        return all(c == 0 for c in self.coords)

    def __repr__(self) -> str:
        return f"{self.group.tag}{self.coords}"


def _require_same_group(a: DiscreteGroup, b: DiscreteGroup) -> None:
    if a != b:
        raise GroupMismatchError(f"group mismatch: {a.tag} vs {b.tag}")


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    """Group product g * h."""
    _require_same_group(g.group, h.group)
    return GroupElement(g.group, g.group.mul_coords(g.coords, h.coords))


def inverse(g: GroupElement) -> GroupElement:
    """Group inverse, so mul(g, inverse(g)) is the identity."""
    return GroupElement(g.group, g.group.inverse_coords(g.coords))


@dataclass(frozen=True)
class FiniteSubset:
    """A deduplicated finite set of elements of one group."""

    group: DiscreteGroup
    elements: frozenset

    def __post_init__(self) -> None:
        for el in self.elements:
            if el.group != self.group:
                raise GroupMismatchError(
                    f"element of {el.group.tag} in a {self.group.tag} subset"
                )

    @property
    def cardinality(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)

    def __contains__(self, g: GroupElement) -> bool:
        return g in self.elements

    def is_subset(self, other: "FiniteSubset") -> bool:
        _require_same_group(self.group, other.group)
        return self.elements <= other.elements

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        _require_same_group(self.group, other.group)
        return FiniteSubset(self.group, self.elements | other.elements)

    def difference(self, other: "FiniteSubset") -> "FiniteSubset":
        _require_same_group(self.group, other.group)
        return FiniteSubset(self.group, self.elements - other.elements)

    def intersection(self, other: "FiniteSubset") -> "FiniteSubset":
        _require_same_group(self.group, other.group)
        return FiniteSubset(self.group, self.elements & other.elements)

    def sorted_elements(self) -> list:
        """Elements in lexicographic coordinate order (the canonical scan order)."""
        return sorted(self.elements, key=lambda g: g.coords)

    def coords_set(self) -> frozenset:
        return frozenset(g.coords for g in self.elements)

    def __repr__(self) -> str:
        return f"FiniteSubset({self.group.tag}, n={len(self.elements)})"


def subset(group: DiscreteGroup, elements: Iterable[GroupElement]) -> FiniteSubset:
    return FiniteSubset(group, frozenset(elements))


def subset_from_coords(group: DiscreteGroup, coords: Iterable[tuple]) -> FiniteSubset:
    return FiniteSubset(group, frozenset(GroupElement(group, tuple(c)) for c in coords))


def translate(F: FiniteSubset, a: GroupElement) -> FiniteSubset:
    """Right translate {f * a : f in F}; cardinality is preserved."""
    _require_same_group(F.group, a.group)
    mc = F.group.mul_coords
    ac = a.coords
    return FiniteSubset(
        F.group, frozenset(GroupElement(F.group, mc(f.coords, ac)) for f in F.elements)
    )


def inverse_set(F: FiniteSubset) -> FiniteSubset:
    """Elementwise inverse {f^-1 : f in F}."""
    ic = F.group.inverse_coords
    return FiniteSubset(
        F.group, frozenset(GroupElement(F.group, ic(f.coords)) for f in F.elements)
    )


# Above this many coordinate pairs, abelian set products switch to the
# FFT-convolution backend (support of the convolution of indicator arrays).
_FFT_PAIR_THRESHOLD = 2_000_000


def product_set(E: FiniteSubset, F: FiniteSubset) -> FiniteSubset:
    """Exact set product {e * f : e in E, f in F}, deduplicated.

    For large inputs in Z^d the product is computed as the support of a
    convolution of indicator arrays, which is exact for integer counts;
    otherwise all pairs are enumerated.
    """
    _require_same_group(E.group, F.group)
    if not E.elements or not F.elements:
        return FiniteSubset(E.group, frozenset())
    if (
        isinstance(E.group, ZdGroup)
        and len(E.elements) * len(F.elements) > _FFT_PAIR_THRESHOLD
    ):
        return _zd_product_fft(E, F)
    mc = E.group.mul_coords
    out = {mc(e.coords, f.coords) for e in E.elements for f in F.elements}
    return FiniteSubset(E.group, frozenset(GroupElement(E.group, c) for c in out))


def _zd_product_counts(E: FiniteSubset, F: FiniteSubset):
    """Pair counts of e + f on a dense grid, via indicator convolution."""
    ea = np.array(sorted(e.coords for e in E.elements), dtype=np.int64)
    fa = np.array(sorted(f.coords for f in F.elements), dtype=np.int64)
    elo, ehi = ea.min(axis=0), ea.max(axis=0)
    flo, fhi = fa.min(axis=0), fa.max(axis=0)
    eind = np.zeros(tuple(int(h - l + 1) for l, h in zip(elo, ehi)), dtype=np.float64)
    find = np.zeros(tuple(int(h - l + 1) for l, h in zip(flo, fhi)), dtype=np.float64)
    eind[tuple((ea - elo).T)] = 1.0
    find[tuple((fa - flo).T)] = 1.0
    counts = np.rint(fftconvolve(eind, find)).astype(np.int64)
    counts[counts < 0] = 0
    # The convolution mass must equal the number of pairs exactly; this
    # guards against any loss of integer counts to roundoff.
    if int(counts.sum()) != len(E.elements) * len(F.elements):
        raise ArithmeticError("FFT product lost integer mass; inputs too large")
    return counts, elo + flo


def _zd_product_fft(E: FiniteSubset, F: FiniteSubset) -> FiniteSubset:
    group: ZdGroup = E.group  # type: ignore[assignment]
    counts, origin = _zd_product_counts(E, F)
    support = np.argwhere(counts > 0)
    return FiniteSubset(
        group,
        frozenset(
            GroupElement(group, tuple(int(v) for v in row + origin)) for row in support
        ),
    )


def product_set_size(E: FiniteSubset, F: FiniteSubset) -> int:
    """|EF| without materializing EF; exact, and cheap for large Z^d boxes."""
    _require_same_group(E.group, F.group)
    if not E.elements or not F.elements:
        return 0
    if (
        isinstance(E.group, ZdGroup)
        and len(E.elements) * len(F.elements) > _FFT_PAIR_THRESHOLD
    ):
        counts, _ = _zd_product_counts(E, F)
        return int(np.count_nonzero(counts))
    return len(product_set(E, F))


def symmetric_difference_size(A: FiniteSubset, B: FiniteSubset) -> int:
    """|A symmetric-difference B|, exactly."""
    _require_same_group(A.group, B.group)
    return len(A.elements ^ B.elements)


def density_ratio(numerator: int, F: FiniteSubset) -> Fraction:
    """Exact cardinality ratio numerator / |F|."""
    if not F.elements:
        raise ValueError("denominator set is empty")
    return Fraction(numerator, len(F.elements))


def random_element(group: DiscreteGroup, radius: int, seed: int, *path) -> GroupElement:
    """Seeded element with coordinates uniform in [-radius, radius]."""
    from .rng import mix64

    n = 2 * radius + 1
    dims = group.d if isinstance(group, ZdGroup) else 3
    coords = tuple(
        int(mix64(seed, "coord", i, *path) % n) - radius for i in range(dims)
    )
    return GroupElement(group, coords)
