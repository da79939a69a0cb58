"""Random dynamical systems over symbolic spaces, with three solvable models.

The base space Omega and the fiber space X are both symbolic: maps from the
group into a finite alphabet.  Configurations over an infinite group cannot
be stored, so each one is represented lazily as a sampler (a deterministic
function of a seed and a coordinate) plus a frame offset.

Action convention, used everywhere: the group acts by

    (g . c)_h = c_{h g}

so shifting a configuration by g multiplies its frame offset by g on the
left.  All cocycle identities below depend on this choice.

All three models use the shift as fiber map, F_{g, omega} x = g . x,
independent of omega; the omega-dependence lives in the fiber measures
(see the measures module).  This keeps entropies in closed form while the
disintegration is genuinely random for the mixed-alphabet model.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Callable, Optional, Sequence

from .groups import (
    DiscreteGroup,
    FiniteSubset,
    GroupElement,
    GroupMismatchError,
    ZdGroup,
    mul,
)
from .rng import derive_seed, uniform01


def exact_distribution(values: Sequence) -> tuple:
    """Convert to a tuple of Fractions summing to exactly 1.

    Float inputs are read via their shortest decimal repr, so 0.7 means
    7/10.  A total within 1e-12 of 1 is renormalized exactly; anything
    further off is rejected.
    """
    fracs = []
    for v in values:
        if isinstance(v, Rational):
            fr = Fraction(v)
        elif isinstance(v, float):
            fr = Fraction(repr(v))
        else:
            fr = Fraction(str(v))
        if fr < 0:
            raise ValueError(f"negative probability {v}")
        fracs.append(fr)
    total = sum(fracs, Fraction(0))
    if total == 0:
        raise ValueError("distribution sums to zero")
    if abs(float(total) - 1.0) > 1e-12:
        raise ValueError(f"distribution sums to {float(total)}, not 1")
    if total != 1:
        fracs = [f / total for f in fracs]
    return tuple(fracs)


def _cumulative(dist: tuple) -> tuple:
    acc, out = 0.0, []
    for p in dist:
        acc += float(p)
        out.append(acc)
    return tuple(out)


def _draw(cumulative: tuple, u: float) -> int:
    i = bisect.bisect_right(cumulative, u)
    return min(i, len(cumulative) - 1)


class ConstantSampler:
    """Every coordinate gets the same symbol; used for trivial bases."""

    def __init__(self, symbol: int = 0):
        self.symbol = symbol

    def symbol_at(self, coords: tuple) -> int:
        return self.symbol


class ProductSampler:
    """Coordinates i.i.d. from one distribution, keyed by (seed, coords)."""

    def __init__(self, dist: tuple, seed: int):
        self.cumulative = _cumulative(dist)
        self.seed = seed
        self._memo: dict = {}

    def symbol_at(self, coords: tuple) -> int:
        memo = self._memo
        s = memo.get(coords)
        if s is None:
            s = _draw(self.cumulative, uniform01(self.seed, "c", coords))
            memo[coords] = s
        return s


class ConditionalSampler:
    """Each coordinate drawn from a table row selected by another lookup.

    `select` reads the governing symbol at the same physical coordinate,
    so the conditional structure is preserved under simultaneous shifts
    of both configurations.
    """

    def __init__(self, select: Callable[[tuple], int], tables: tuple, seed: int):
        self.select = select
        self.cumulatives = tuple(_cumulative(t) for t in tables)
        self.seed = seed
        self._memo: dict = {}

    def symbol_at(self, coords: tuple) -> int:
        memo = self._memo
        s = memo.get(coords)
        if s is None:
            row = self.cumulatives[self.select(coords)]
            s = _draw(row, uniform01(self.seed, "c", coords))
            memo[coords] = s
        return s


class MarkovPathSampler:
    """Two-sided stationary Markov chain on Z, extended on demand.

    Position 0 is drawn from the stationary vector; the chain is extended
    rightward with the transition matrix and leftward with the reversed
    chain, so any finite window has the stationary law.  Extension order
    cannot change a symbol: each position's draw depends only on the seed,
    the position, and the previously fixed inward neighbor.
    """

    def __init__(self, transition: tuple, stationary: tuple, seed: int):
        self.fwd = tuple(_cumulative(row) for row in transition)
        self.bwd = tuple(_cumulative(row) for row in _reversed_chain(transition, stationary))
        self.start = _cumulative(stationary)
        self.seed = seed
        self._memo: dict = {}
        self._lo = 0
        self._hi = 0

    def symbol_at(self, coords: tuple) -> int:
        (k,) = coords
        memo = self._memo
        if not memo:
            memo[0] = _draw(self.start, uniform01(self.seed, "m", 0))
        while self._hi < k:
            i = self._hi + 1
            memo[i] = _draw(self.fwd[memo[i - 1]], uniform01(self.seed, "m", i))
            self._hi = i
        while self._lo > k:
            i = self._lo - 1
            memo[i] = _draw(self.bwd[memo[i + 1]], uniform01(self.seed, "m", i))
            self._lo = i
        return memo[k]


def _reversed_chain(transition: tuple, stationary: tuple) -> tuple:
    """Time-reversed transition matrix Q_ij = pi_j P_ji / pi_i."""
    k = len(stationary)
    return tuple(
        tuple(stationary[j] * transition[j][i] / stationary[i] for j in range(k))
        for i in range(k)
    )


@dataclass(frozen=True)
class SymbolicConfiguration:
    """Lazy symbolic configuration: value(h) = lookup(h * offset).

    `pins` maps physical coordinates to symbols and takes precedence over
    the sampler; it lets tests build explicit configurations.  Shifting
    never copies symbols, it only changes the offset, so all shifts of one
    configuration share one memo and stay mutually consistent.
    """

    group: DiscreteGroup
    alphabet_size: int
    sampler: object
    offset: GroupElement
    pins: dict

    def physical_value(self, coords: tuple) -> int:
        pinned = self.pins.get(coords)
        if pinned is not None:
            return pinned
        return self.sampler.symbol_at(coords)

    def value_at(self, coords: tuple) -> int:
        return self.physical_value(self.group.mul_coords(coords, self.offset.coords))

    def value(self, g: GroupElement) -> int:
        if g.group != self.group:
            raise GroupMismatchError(f"{g.group.tag} element on a {self.group.tag} configuration")
        return self.value_at(g.coords)

    def agrees_on(self, other: "SymbolicConfiguration", window: FiniteSubset) -> bool:
        return all(self.value(g) == other.value(g) for g in window)


def constant_configuration(
    group: DiscreteGroup, alphabet_size: int, symbol: int = 0
) -> SymbolicConfiguration:
    return SymbolicConfiguration(group, alphabet_size, ConstantSampler(symbol), group.identity(), {})


def configuration_from_pins(
    group: DiscreteGroup, alphabet_size: int, pins: dict, fill: int = 0
) -> SymbolicConfiguration:
    """Explicit configuration: `pins` coords -> symbol, `fill` elsewhere."""
    for coords, sym in pins.items():
        if not 0 <= sym < alphabet_size:
            raise ValueError(f"symbol {sym} at {coords} outside alphabet")
    return SymbolicConfiguration(
        group, alphabet_size, ConstantSampler(fill), group.identity(), dict(pins)
    )


def shift(config: SymbolicConfiguration, g: GroupElement) -> SymbolicConfiguration:
    """The action (g . c)_h = c_{h g}: left-multiply the frame offset."""
    if g.group != config.group:
        raise GroupMismatchError(f"{g.group.tag} element on a {config.group.tag} configuration")
    return SymbolicConfiguration(
        config.group,
        config.alphabet_size,
        config.sampler,
        mul(g, config.offset),
        config.pins,
    )


@dataclass(frozen=True)
class SkewPoint:
    """A point (omega, x) of the skew-product space."""

    omega: SymbolicConfiguration
    x: SymbolicConfiguration

    def __post_init__(self) -> None:
        if self.omega.group != self.x.group:
            raise GroupMismatchError("omega and x live over different groups")


@lru_cache(maxsize=None)
def _stationary_distribution(transition: tuple) -> tuple:
    """Exact stationary vector of a rational stochastic matrix.

    Solves pi (P - I) = 0 with sum(pi) = 1 by Fraction Gaussian
    elimination on the transpose, with the last equation replaced by the
    normalization.
    """
    k = len(transition)
    rows = [[transition[j][i] - (1 if i == j else 0) for j in range(k)] for i in range(k)]
    rows[k - 1] = [Fraction(1)] * k
    rhs = [Fraction(0)] * (k - 1) + [Fraction(1)]
    for col in range(k):
        piv = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if piv is None:
            raise ValueError("transition matrix has no unique stationary vector")
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = Fraction(1) / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        rhs[col] = rhs[col] * inv
        for r in range(k):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
                rhs[r] = rhs[r] - f * rhs[col]
    return tuple(rhs)


@dataclass(frozen=True)
class BernoulliModel:
    """Trivial base; fiber measure is the i.i.d. product of `p` on A^G."""

    group: DiscreteGroup
    p: tuple

    kind = "bernoulli"

    @staticmethod
    def create(group: DiscreteGroup, p: Sequence) -> "BernoulliModel":
        return BernoulliModel(group, exact_distribution(p))

    @property
    def base_alphabet_size(self) -> int:
        return 1

    @property
    def fiber_alphabet_size(self) -> int:
        return len(self.p)

    def sample_omega(self, stream_seed: int) -> SymbolicConfiguration:
        return constant_configuration(self.group, 1)

    def sample_x(self, omega: SymbolicConfiguration, stream_seed: int) -> SymbolicConfiguration:
        sampler = ProductSampler(self.p, derive_seed(stream_seed, "x"))
        return SymbolicConfiguration(self.group, len(self.p), sampler, self.group.identity(), {})

    def fiber_map(self, g: GroupElement, omega: SymbolicConfiguration,
                  x: SymbolicConfiguration) -> SymbolicConfiguration:
        return shift(x, g)


@dataclass(frozen=True)
class RandomAlphabetModel:
    """Base i.i.d. from `base_p`; fiber symbol at g drawn from row omega_g.

    The fiber measure mu_omega is the product over g of fiber_ps[omega_g],
    so the disintegration genuinely depends on omega.
    """

    group: DiscreteGroup
    base_p: tuple
    fiber_ps: tuple

    kind = "random-alphabet"

    @staticmethod
    def create(group: DiscreteGroup, base_p: Sequence, fiber_ps: Sequence) -> "RandomAlphabetModel":
        rows = tuple(exact_distribution(row) for row in fiber_ps)
        base = exact_distribution(base_p)
        if len(rows) != len(base):
            raise ValueError("need one fiber distribution per base symbol")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("fiber distributions must share one alphabet")
        return RandomAlphabetModel(group, base, rows)

    @property
    def base_alphabet_size(self) -> int:
        return len(self.base_p)

    @property
    def fiber_alphabet_size(self) -> int:
        return len(self.fiber_ps[0])

    def sample_omega(self, stream_seed: int) -> SymbolicConfiguration:
        sampler = ProductSampler(self.base_p, derive_seed(stream_seed, "omega"))
        return SymbolicConfiguration(self.group, len(self.base_p), sampler, self.group.identity(), {})

    def sample_x(self, omega: SymbolicConfiguration, stream_seed: int) -> SymbolicConfiguration:
        sampler = ConditionalSampler(
            omega.physical_value, self.fiber_ps, derive_seed(stream_seed, "x")
        )
        return SymbolicConfiguration(
            self.group, self.fiber_alphabet_size, sampler, self.group.identity(), {}
        )

    def fiber_map(self, g: GroupElement, omega: SymbolicConfiguration,
                  x: SymbolicConfiguration) -> SymbolicConfiguration:
        return shift(x, g)


@dataclass(frozen=True)
class MarkovModel:
    """Trivial base; fiber measure is a stationary Markov chain on Z.

    Only the one-dimensional lattice supports this model: the chain's
    consistency under marginalization is a property of linear orders.
    """

    transition: tuple

    kind = "markov"

    @staticmethod
    def create(transition: Sequence) -> "MarkovModel":
        rows = tuple(exact_distribution(row) for row in transition)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("transition matrix must be square")
        return MarkovModel(rows)

    @property
    def group(self) -> ZdGroup:
        return ZdGroup(1)

    @property
    def stationary(self) -> tuple:
        return _stationary_distribution(self.transition)

    @property
    def base_alphabet_size(self) -> int:
        return 1

    @property
    def fiber_alphabet_size(self) -> int:
        return len(self.transition)

    def sample_omega(self, stream_seed: int) -> SymbolicConfiguration:
        return constant_configuration(self.group, 1)

    def sample_x(self, omega: SymbolicConfiguration, stream_seed: int) -> SymbolicConfiguration:
        sampler = MarkovPathSampler(self.transition, self.stationary, derive_seed(stream_seed, "x"))
        return SymbolicConfiguration(
            self.group, self.fiber_alphabet_size, sampler, self.group.identity(), {}
        )

    def fiber_map(self, g: GroupElement, omega: SymbolicConfiguration,
                  x: SymbolicConfiguration) -> SymbolicConfiguration:
        return shift(x, g)


def base_action(model, g: GroupElement, omega: SymbolicConfiguration) -> SymbolicConfiguration:
    return shift(omega, g)


def fiber_map(model, g: GroupElement, omega: SymbolicConfiguration,
              x: SymbolicConfiguration) -> SymbolicConfiguration:
    return model.fiber_map(g, omega, x)


def skew(model, g: GroupElement, p: SkewPoint) -> SkewPoint:
    """The skew product (omega, x) -> (g . omega, F_{g, omega} x)."""
    return SkewPoint(base_action(model, g, p.omega), fiber_map(model, g, p.omega, p.x))


def sample_point(model, seed: int, index: int) -> SkewPoint:
    """Trajectory `index` of the root seed: an independent (omega, x) pair.

    Stream derivation is part of the external contract: trajectory i uses
    the sub-seed mix64(seed, "traj", i); omega and x split that further.
    """
    stream = derive_seed(seed, "traj", index)
    omega = model.sample_omega(stream)
    return SkewPoint(omega, model.sample_x(omega, stream))


def check_cocycle(model, g1: GroupElement, g2: GroupElement, p: SkewPoint,
                  window: FiniteSubset) -> bool:
    """Exact test of F_{g2, g1.omega} o F_{g1, omega} = F_{g2 g1, omega} on a window."""
    omega1 = base_action(model, g1, p.omega)
    lhs = fiber_map(model, g2, omega1, fiber_map(model, g1, p.omega, p.x))
    rhs = fiber_map(model, mul(g2, g1), p.omega, p.x)
    return lhs.agrees_on(rhs, window)


@lru_cache(maxsize=None)
def _norm_shells(group: DiscreteGroup, radius: int) -> tuple:
    """Coordinates grouped by sup-norm r = 0..radius (shared by both groups)."""
    from itertools import product as iterproduct

    dims = group.d if isinstance(group, ZdGroup) else 3
    shells = [[] for _ in range(radius + 1)]
    for coords in iterproduct(range(-radius, radius + 1), repeat=dims):
        shells[max(abs(c) for c in coords)].append(coords)
    return tuple(tuple(s) for s in shells)


def _first_mismatch_radius(x: SymbolicConfiguration, y: SymbolicConfiguration,
                           s: GroupElement, radius: int) -> Optional[int]:
    """Smallest sup-norm r with (s.x)_h != (s.y)_h at some |h| = r, if any."""
    mc = x.group.mul_coords
    sc = s.coords
    for r, shell in enumerate(_norm_shells(x.group, radius)):
        for h in shell:
            hs = mc(h, sc)
            if x.value_at(hs) != y.value_at(hs):
                return r
    return None


def bowen_distance(model, E: FiniteSubset, omega: SymbolicConfiguration,
                   x: SymbolicConfiguration, y: SymbolicConfiguration,
                   radius: int = 16) -> float:
    """max over s in E of d(F_{s,omega} x, F_{s,omega} y).

    The base distance is d(u, v) = 2^-r with r the smallest sup-norm of a
    disagreeing coordinate, truncated at `radius` (agreement out to the
    truncation radius counts as distance 0).
    """
    if len(E) == 0:
        raise ValueError("E must be non-empty")
    best = 0.0
    for s in E.sorted_elements():
        r = _first_mismatch_radius(x, y, s, radius)
        if r is not None:
            best = max(best, 2.0 ** (-r))
            if r == 0:
                break
    return best
