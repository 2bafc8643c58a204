"""
Partial-product generation for an unsigned n x n multiplier.

Term (i, j) is AND2(a_i, b_j), sits at weight i + j and carries the flat index
i + n*j, so a_0 b_0 is index 0 and a_1 b_0 is index 1.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from netlist import ConfigError, NetlistBuilder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartialProduct:
    i: int
    j: int
    net: int
    n: int

    @property
    def index(self) -> int:
        return self.i + self.n * self.j

    @property
    def weight(self) -> int:
        return self.i + self.j


@dataclass(frozen=True)
class PartialProductMatrix:
    """
    Weight-indexed columns of partial-product nets. A matrix may be a view
    restricted to a weight range (see partition()).
    """

    n: int
    terms: Tuple[PartialProduct, ...]
    weights: range

    def index_of(self, i: int, j: int) -> int:
        return i + self.n * j

    def term(self, i: int, j: int) -> PartialProduct:
        for term in self.terms:
            if term.i == i and term.j == j:
                return term
        raise KeyError((i, j))

    @property
    def columns(self) -> Dict[int, List[int]]:
        """weight -> nets in flat-index order"""
        cols: Dict[int, List[int]] = {w: [] for w in self.weights}
        for term in sorted(self.terms, key=lambda t: t.index):
            cols[term.weight].append(term.net)
        return cols

    def heights(self) -> List[int]:
        return [len(nets) for nets in self.columns.values()]

    def max_value(self) -> int:
        return sum(len(nets) << w for w, nets in self.columns.items())


@dataclass(frozen=True)
class Partition:
    part0: PartialProductMatrix
    part1: PartialProductMatrix


def generate_pp(n: int, a_nets: Sequence[int], b_nets: Sequence[int], builder: NetlistBuilder) -> PartialProductMatrix:
    """
    Build the n*n AND array, in flat-index order.

    :raises ConfigError: if n < 2 or the operand buses are not n bits wide
    """
    if n < 2:
        raise ConfigError(f"Operand width must be at least 2, got {n}")
    if len(a_nets) != n or len(b_nets) != n:
        raise ConfigError(f"Operand buses must be {n} bits wide, got {len(a_nets)} and {len(b_nets)}")

    terms = []
    for j in range(n):
        for i in range(n):
            terms.append(PartialProduct(i, j, builder.and2(a_nets[i], b_nets[j]), n))
    logger.debug(f"Generated {len(terms)} partial products for n={n}")
    return PartialProductMatrix(n, tuple(terms), range(0, 2 * n - 1))


def partition(matrix: PartialProductMatrix) -> Partition:
    """Split into part0 (weights 0..n-1) and part1 (weights n..2n-2)."""
    n = matrix.n
    low = tuple(t for t in matrix.terms if t.weight < n)
    high = tuple(t for t in matrix.terms if t.weight >= n)
    return Partition(
        part0=PartialProductMatrix(n, low, range(0, n)),
        part1=PartialProductMatrix(n, high, range(n, 2 * n - 1)),
    )


def weighted_values(columns: Mapping[int, Sequence[int]], values: np.ndarray) -> List[int]:
    """
    Per-vector sum of bits * 2^weight over a column set.

    :param columns: weight -> nets
    :param values: (count, num_nets) boolean matrix from simulator.net_values
    """
    totals = [0] * values.shape[0]
    for weight, nets in columns.items():
        if not nets:
            continue
        ones = values[:, list(nets)].sum(axis=1).tolist()
        totals = [total + (count << weight) for total, count in zip(totals, ones)]
    return totals
