"""Disintegrated measures, partition cells, and closed-form cell measures.

A measure on Omega x X is stored as its disintegration: the base marginal
P (owned by the model) plus a rule giving mu_omega of any cylinder cell
exactly, as a Fraction.  No densities, no empirical measures: the only
statistical error anywhere downstream is the averaging the limit theorems
themselves perform.

Cells are cylinder sets: a finite window F and one atom label per window
coordinate.  With the canonical partition (label = x at the identity) the
joined pullback partition over F has exactly these cylinders as atoms,
because all fiber maps are shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as iterproduct
from typing import Optional

from .groups import FiniteSubset, GroupElement, translate
from .rds import (
    BernoulliModel,
    MarkovModel,
    RandomAlphabetModel,
    SkewPoint,
    SymbolicConfiguration,
    constant_configuration,
    shift,
)
from .rng import derive_seed

ZERO_COORDINATE = "zero-coordinate"

MARKOV_GAP_CAP = 64

ENUMERATION_LIMIT = 10 ** 6


class ZeroMeasureError(ValueError):
    """A cell of measure zero was queried for information."""


class EnumerationSizeError(ValueError):
    """A full cell enumeration would exceed the configured limit."""


@dataclass(frozen=True)
class PartitionSpec:
    """Finite partition of Omega x X given by a local label function.

    The canonical kind labels a point by the fiber symbol at the identity,
    label(omega, x) = x_e; its atom count is the fiber alphabet size and
    its locality is the singleton {e}.
    """

    kind: str
    atoms: int

    def __post_init__(self) -> None:
        if self.kind != ZERO_COORDINATE:
            raise ValueError(f"unsupported partition kind: {self.kind}")
        if self.atoms < 1:
            raise ValueError("a partition needs at least one atom")


def canonical_partition(model) -> PartitionSpec:
    return PartitionSpec(ZERO_COORDINATE, model.fiber_alphabet_size)


@dataclass(frozen=True)
class CellId:
    """One atom of the joined partition over a finite window.

    `labels` is a tuple of (coords, atom index) pairs sorted by coords;
    the window is recoverable as the set of first components.
    """

    domain: FiniteSubset
    labels: tuple

    @staticmethod
    def from_map(domain: FiniteSubset, label_map: dict) -> "CellId":
        items = tuple(sorted(label_map.items()))
        if len(items) != len(domain):
            raise ValueError("labels must be total on the domain")
        return CellId(domain, items)

    def label_map(self) -> dict:
        return dict(self.labels)


def cell_of(model, xi: PartitionSpec, F: FiniteSubset, p: SkewPoint) -> CellId:
    """The cell of the join over F containing p.

    Unfolding the join with shift fiber maps: the label contributed by
    g is the atom of the shifted point, which for the canonical partition
    is just x_g.
    """
    labels = tuple(sorted((g.coords, p.x.value(g)) for g in F))
    return CellId(F, labels)


@dataclass(frozen=True)
class DisintegratedMeasure:
    """Closed-form cell-measure rule for one model's invariant measure."""

    model: object

    @property
    def kind(self) -> str:
        return self.model.kind


def measure_for(model) -> DisintegratedMeasure:
    return DisintegratedMeasure(model)


def _mat_mul(a: tuple, b: tuple) -> tuple:
    k = len(a)
    return tuple(
        tuple(sum(a[i][m] * b[m][j] for m in range(k)) for j in range(k))
        for i in range(k)
    )


@lru_cache(maxsize=None)
def _matrix_power(transition: tuple, n: int) -> tuple:
    """Exact n-th power of a rational matrix, n >= 1."""
    if n == 1:
        return transition
    half = _matrix_power(transition, n // 2)
    out = _mat_mul(half, half)
    if n % 2:
        out = _mat_mul(out, transition)
    return out


def _markov_gap_power(transition: tuple, gap: int) -> tuple:
    if gap > MARKOV_GAP_CAP:
        raise EnumerationSizeError(
            f"Markov gap {gap} exceeds the marginalization cap {MARKOV_GAP_CAP}"
        )
    return _matrix_power(transition, gap)


@lru_cache(maxsize=None)
def _log_table(dist: tuple) -> tuple:
    return tuple(math.log(p) if p > 0 else None for p in map(float, dist))


@lru_cache(maxsize=None)
def _log_matrix(transition: tuple, gap: int) -> tuple:
    power = _markov_gap_power(transition, gap)
    return tuple(_log_table(row) for row in power)


def _log_or_raise(entry: Optional[float]) -> float:
    if entry is None:
        raise ZeroMeasureError("zero-measure cell")
    return entry


def cell_measure(mu: DisintegratedMeasure, omega: SymbolicConfiguration, cell: CellId) -> Fraction:
    """Exact mu_omega of the cylinder cell."""
    model = mu.model
    if isinstance(model, BernoulliModel):
        out = Fraction(1)
        for _, label in cell.labels:
            out *= model.p[label]
        return out
    if isinstance(model, RandomAlphabetModel):
        out = Fraction(1)
        for coords, label in cell.labels:
            out *= model.fiber_ps[omega.value_at(coords)][label]
        return out
    if isinstance(model, MarkovModel):
        return _markov_cell_measure(model, cell)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _markov_cell_measure(model: MarkovModel, cell: CellId) -> Fraction:
    positions = [(c[0], label) for c, label in cell.labels]
    if not positions:
        return Fraction(1)
    out = model.stationary[positions[0][1]]
    for (i, a), (j, b) in zip(positions, positions[1:]):
        out *= _markov_gap_power(model.transition, j - i)[a][b]
    return out


def cell_log_measure(mu: DisintegratedMeasure, omega: SymbolicConfiguration, cell: CellId) -> float:
    """ln of cell_measure, summed from per-coordinate log tables.

    Stays finite-precision-stable at windows of thousands of coordinates
    where the Fraction route would be exact but the probability itself
    underflows any float.
    """
    model = mu.model
    if isinstance(model, BernoulliModel):
        table = _log_table(model.p)
        return sum(_log_or_raise(table[label]) for _, label in cell.labels)
    if isinstance(model, RandomAlphabetModel):
        tables = tuple(_log_table(row) for row in model.fiber_ps)
        return sum(
            _log_or_raise(tables[omega.value_at(coords)][label])
            for coords, label in cell.labels
        )
    if isinstance(model, MarkovModel):
        positions = [(c[0], label) for c, label in cell.labels]
        if not positions:
            return 0.0
        total = _log_or_raise(_log_table(model.stationary)[positions[0][1]])
        for (i, a), (j, b) in zip(positions, positions[1:]):
            total += _log_or_raise(_log_matrix(model.transition, j - i)[a][b])
        return total
    raise TypeError(f"unsupported model type {type(model).__name__}")


def enumerate_cells(mu: DisintegratedMeasure, omega: SymbolicConfiguration,
                    xi: PartitionSpec, F: FiniteSubset) -> list:
    """All (cell, exact measure) pairs of the join over F."""
    count = xi.atoms ** len(F)
    if count > ENUMERATION_LIMIT:
        raise EnumerationSizeError(f"{count} cells exceed the enumeration limit")
    coords = [g.coords for g in F.sorted_elements()]
    out = []
    for assignment in iterproduct(range(xi.atoms), repeat=len(coords)):
        cell = CellId(F, tuple(zip(coords, assignment)))
        out.append((cell, cell_measure(mu, omega, cell)))
    return out


def check_invariance(mu: DisintegratedMeasure, g: GroupElement,
                     omega: SymbolicConfiguration, xi: PartitionSpec,
                     F: FiniteSubset) -> bool:
    """Exact check of the pushforward identity F_{g,omega} mu_omega = mu_{g omega}.

    For every cell C over F, mu_{g omega}(C) must equal mu_omega of the
    pullback of C under the shift by g, which is the cylinder over F g
    with the labels carried along.
    """
    shifted_omega = shift(omega, g)
    Fg = translate(F, g)
    mc = F.group.mul_coords
    for cell, forward in enumerate_cells(mu, shifted_omega, xi, F):
        pulled_labels = tuple(
            sorted((mc(coords, g.coords), label) for coords, label in cell.labels)
        )
        pulled = CellId(Fg, pulled_labels)
        if cell_measure(mu, omega, pulled) != forward:
            return False
    return True


def marginal_cell_measure(mu: DisintegratedMeasure, cell: CellId) -> Fraction:
    """Closed-form integral of mu_omega(cell) over the base measure P."""
    model = mu.model
    if isinstance(model, (BernoulliModel, MarkovModel)):
        # mu_omega does not depend on omega.
        return cell_measure(mu, constant_omega(model), cell)
    if isinstance(model, RandomAlphabetModel):
        out = Fraction(1)
        for _, label in cell.labels:
            out *= sum(
                pb * row[label] for pb, row in zip(model.base_p, model.fiber_ps)
            )
        return out
    raise TypeError(f"unsupported model type {type(model).__name__}")


def constant_omega(model) -> SymbolicConfiguration:
    """A base point for models whose fiber measure ignores omega."""
    return constant_configuration(model.group, model.base_alphabet_size)


@dataclass(frozen=True)
class DisintegrationRow:
    cell: CellId
    estimate: float
    closed_form: float
    std_error: float

    @property
    def within_3se(self) -> bool:
        slack = max(3.0 * self.std_error, 1e-12)
        return abs(self.estimate - self.closed_form) <= slack


@dataclass(frozen=True)
class DisintegrationReport:
    rows: tuple
    samples: int

    @property
    def all_within(self) -> bool:
        return all(r.within_3se for r in self.rows)


def check_disintegration(mu: DisintegratedMeasure, xi: PartitionSpec, F: FiniteSubset,
                         samples: int, seed: int) -> DisintegrationReport:
    """Monte Carlo check of mu(R) = integral of mu_omega(R_omega) dP.

    For each cell R over F, averages mu_omega(R) across sampled omega and
    compares with the closed-form marginal.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    model = mu.model
    omegas = [
        model.sample_omega(derive_seed(seed, "traj", i)) for i in range(samples)
    ]
    rows = []
    reference = omegas[0]
    for cell, _ in enumerate_cells(mu, reference, xi, F):
        values = [float(cell_measure(mu, om, cell)) for om in omegas]
        mean = math.fsum(values) / samples
        var = math.fsum((v - mean) ** 2 for v in values) / max(samples - 1, 1)
        se = math.sqrt(var / samples)
        rows.append(
            DisintegrationRow(
                cell=cell,
                estimate=mean,
                closed_form=float(marginal_cell_measure(mu, cell)),
                std_error=se,
            )
        )
    return DisintegrationReport(rows=tuple(rows), samples=samples)


def conditional_label_distribution(mu: DisintegratedMeasure, omega: SymbolicConfiguration,
                                   cond: CellId, at: GroupElement) -> tuple:
    """Exact distribution of the label at `at` given the labels in `cond`.

    For product models the conditional collapses to the single-coordinate
    distribution; for the Markov chain only the nearest conditioning
    neighbors on each side matter.
    """
    model = mu.model
    if isinstance(model, BernoulliModel):
        return model.p
    if isinstance(model, RandomAlphabetModel):
        return model.fiber_ps[omega.value(at)]
    if isinstance(model, MarkovModel):
        return _markov_conditional(model, cond, at.coords[0])
    raise TypeError(f"unsupported model type {type(model).__name__}")


def _markov_conditional(model: MarkovModel, cond: CellId, k: int) -> tuple:
    P = model.transition
    pi = model.stationary
    size = len(pi)
    left = None
    right = None
    for coords, label in cond.labels:
        pos = coords[0]
        if pos == k:
            raise ValueError("conditioning set may not contain the target coordinate")
        if pos < k and (left is None or pos > left[0]):
            left = (pos, label)
        if pos > k and (right is None or pos < right[0]):
            right = (pos, label)
    if left is None and right is None:
        return pi
    if right is None:
        step = _markov_gap_power(P, k - left[0])
        return tuple(step[left[1]][c] for c in range(size))
    if left is None:
        # Bayes against the stationary marginal of the right neighbor.
        step = _markov_gap_power(P, right[0] - k)
        total = pi[right[1]]
        return tuple(pi[c] * step[c][right[1]] / total for c in range(size))
    a, b = left[1], right[1]
    la, rb = _markov_gap_power(P, k - left[0]), _markov_gap_power(P, right[0] - k)
    bridge = _markov_gap_power(P, right[0] - left[0])[a][b]
    if bridge == 0:
        raise ZeroMeasureError("conditioning cell has measure zero")
    return tuple(la[a][c] * rb[c][b] / bridge for c in range(size))
