"""Aggregation of alternative rankings from heterogeneous sources:
unification, Borda and Condorcet rules, Kemeny medians, and data-driven
source weights."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import (DegenerateEstimates, DegenerateVariance, DimensionalityExceeded,
                     InvalidArgument, InvalidRanking)

__all__ = [
    "Ranking",
    "SourceWeightProfile",
    "unify",
    "borda",
    "condorcet",
    "kemeny_distance",
    "kemeny_median",
    "source_weights",
]

KEMENY_EXACT_LIMIT = 8


@dataclass(frozen=True)
class Ranking:
    """Ordered alternatives with 1-based ranks; ties share a rank."""

    items: Tuple[Tuple[str, int], ...]
    source: str = ""

    def __post_init__(self):
        seen = set()
        for alt, rank in self.items:
            if alt in seen:
                raise InvalidRanking(f"duplicate alternative {alt!r}")
            seen.add(alt)
            if rank < 1:
                raise InvalidRanking("ranks must start at 1")

    @classmethod
    def from_order(cls, order: Sequence[str], source: str = "") -> "Ranking":
        return cls(tuple((alt, i + 1) for i, alt in enumerate(order)),
                   source=source)

    @property
    def alternatives(self) -> Tuple[str, ...]:
        return tuple(alt for alt, _ in self.items)

    @property
    def ranks(self) -> Dict[str, int]:
        return {alt: rank for alt, rank in self.items}

    def order(self) -> List[str]:
        """Alternatives sorted by rank, alphabetical within ties."""
        return [alt for alt, _ in sorted(self.items, key=lambda kv: (kv[1], kv[0]))]


def unify(rankings: Sequence[Ranking]) -> Tuple[List[str], List[Ranking]]:
    """Extend every ranking to the union of all alternatives.

    A source that omitted an alternative places it at rank m_i + 1,
    where m_i is the number of alternatives it did provide.
    """
    if not rankings:
        raise InvalidArgument("need at least one ranking")
    universe: Dict[str, None] = {}
    for r in rankings:
        for alt in r.alternatives:
            universe.setdefault(alt)
    alts = sorted(universe)
    padded = []
    for r in rankings:
        ranks = r.ranks
        pad = len(r.items) + 1
        padded.append(Ranking(tuple((a, ranks.get(a, pad)) for a in alts),
                              source=r.source))
    return alts, padded


def _weights(rankings: Sequence[Ranking],
             weights: Optional[Sequence[float]]) -> np.ndarray:
    if weights is None:
        return np.ones(len(rankings))
    w = np.asarray(weights, dtype=float)
    if w.size != len(rankings):
        raise InvalidArgument("one weight per ranking required")
    if np.any(w < 0) or not np.any(w > 0):
        raise InvalidArgument("weights must be >= 0 and not all zero")
    return w


def _dense_ranking(alts: Sequence[str], keys: Sequence[float],
                   source: str) -> Ranking:
    """Rank alternatives by ascending key; equal keys share a rank."""
    order = sorted(zip(alts, keys), key=lambda kv: (kv[1], kv[0]))
    items = []
    rank = 0
    prev = None
    for alt, key in order:
        if prev is None or key != prev:
            rank += 1
            prev = key
        items.append((alt, rank))
    return Ranking(tuple(sorted(items)), source=source)


def borda(rankings: Sequence[Ranking],
          weights: Optional[Sequence[float]] = None) -> Ranking:
    """Weighted rank-sum rule: smaller total rank is better."""
    alts, padded = unify(rankings)
    w = _weights(rankings, weights)
    sums = [float(sum(wj * r.ranks[a] for wj, r in zip(w, padded)))
            for a in alts]
    return _dense_ranking(alts, sums, "borda")


def _sign_matrix(r: Ranking, alts: Sequence[str]) -> np.ndarray:
    ranks = np.array([r.ranks[a] for a in alts], dtype=float)
    return np.sign(ranks[None, :] - ranks[:, None])  # +1 where row beats col


def condorcet(rankings: Sequence[Ranking],
              weights: Optional[Sequence[float]] = None
              ) -> Tuple[Ranking, List[List[str]]]:
    """Pairwise-majority rule with a cycle report.

    The majority sign matrix is ranked by descending line sums; the
    report lists the strongly connected components (size > 1) of the
    strict-domination tournament — the Condorcet-paradox groups.
    """
    alts, padded = unify(rankings)
    w = _weights(rankings, weights)
    acc = np.zeros((len(alts), len(alts)))
    for wj, r in zip(w, padded):
        acc += wj * _sign_matrix(r, alts)
    majority = np.sign(acc)
    line_sums = majority.sum(axis=1)
    ranking = _dense_ranking(alts, [-s for s in line_sums], "condorcet")
    tour = nx.DiGraph()
    tour.add_nodes_from(alts)
    for i, a in enumerate(alts):
        for j, b in enumerate(alts):
            if majority[i, j] > 0:
                tour.add_edge(a, b)
    cycles = [sorted(c) for c in nx.strongly_connected_components(tour)
              if len(c) > 1]
    return ranking, sorted(cycles)


def kemeny_distance(r1: Ranking, r2: Ranking) -> int:
    """Hamming-style distance between the pairwise sign matrices."""
    a1 = sorted(r1.alternatives)
    a2 = sorted(r2.alternatives)
    if a1 != a2:
        raise InvalidArgument("rankings cover different universes")
    d1 = _sign_matrix(r1, a1)
    d2 = _sign_matrix(r2, a1)
    return int(np.sum(np.abs(d1 - d2)))


def _objective(order: Sequence[str], padded: Sequence[Ranking],
               w: np.ndarray, alts: Sequence[str]) -> float:
    cand = Ranking.from_order(order)
    return float(sum(wj * kemeny_distance(cand, r)
                     for wj, r in zip(w, padded)))


def kemeny_median(rankings: Sequence[Ranking],
                  weights: Optional[Sequence[float]] = None,
                  mode: str = "exact") -> Tuple[Ranking, float]:
    """Strict ranking minimizing the weighted Kemeny distance total.

    Exact mode enumerates all strict orders (universe size <= 8, ties
    broken toward the lexicographically earlier order); heuristic mode
    descends by adjacent transpositions from the Borda solution.
    """
    alts, padded = unify(rankings)
    w = _weights(rankings, weights)
    if mode == "exact":
        if len(alts) > KEMENY_EXACT_LIMIT:
            raise DimensionalityExceeded(
                f"exact search limited to {KEMENY_EXACT_LIMIT} alternatives")
        best_order = None
        best = np.inf
        for perm in itertools.permutations(sorted(alts)):
            obj = _objective(perm, padded, w, alts)
            if obj < best:
                best, best_order = obj, perm
        return Ranking.from_order(best_order, source="kemeny"), best
    if mode != "heuristic":
        raise InvalidArgument(f"unknown mode {mode!r}")
    order = borda(rankings, weights).order()
    best = _objective(order, padded, w, alts)
    improved = True
    while improved:
        improved = False
        for i in range(len(order) - 1):
            trial = order[:]
            trial[i], trial[i + 1] = trial[i + 1], trial[i]
            obj = _objective(trial, padded, w, alts)
            if obj < best:
                order, best = trial, obj
                improved = True
    return Ranking.from_order(order, source="kemeny"), best


@dataclass(frozen=True)
class SourceWeightProfile:
    sources: Tuple[str, ...]
    e: np.ndarray
    m: np.ndarray
    v: np.ndarray
    o: np.ndarray
    w_star: np.ndarray
    w: np.ndarray
    rho: float
    x1: float
    x2: float
    mode: str

    def __post_init__(self):
        if abs(float(np.sum(self.w)) - 1.0) > 1e-12:
            raise InvalidArgument("weights must total 1")
        if not (0.0 <= self.x1 <= 1.0 and 0.0 <= self.x2 <= 1.0):
            raise InvalidArgument("x1, x2 must lie in [0, 1]")
        if abs(self.x1 + self.x2 - 1.0) > 1e-12:
            raise InvalidArgument("x1 + x2 must equal 1")


def source_weights(sources: Dict[str, Tuple[float, Sequence[str]]],
                   mode: str = "density") -> SourceWeightProfile:
    """Credibility weights from expert estimates and alternative lists.

    Combines each source's uniqueness share O_i = m_i / P (P unique
    alternatives overall) and volume share V_i = m_i / sum(m) as
    w*_i = E_i (x1 O_i + x2 V_i), normalized to total 1. Density mode
    sets x2 to the representation density rho; dispersion mode sets x1
    to the population variance of V (clipped to [0, 1]).
    """
    if not sources:
        raise InvalidArgument("need at least one source")
    names = tuple(sorted(sources))
    e = np.array([float(sources[s][0]) for s in names])
    lists = [list(sources[s][1]) for s in names]
    if np.any(e < 0) or not np.all(np.isfinite(e)):
        raise InvalidArgument("expert estimates must be finite and >= 0")
    if not np.any(e > 0):
        raise DegenerateEstimates("all expert estimates are zero")
    if any(len(lst) == 0 for lst in lists):
        raise InvalidArgument("every source must provide alternatives")
    if any(len(set(lst)) != len(lst) for lst in lists):
        raise InvalidRanking("duplicate alternative within one source")
    n = len(names)
    m = np.array([len(lst) for lst in lists], dtype=float)
    union: Dict[str, int] = {}
    for lst in lists:
        for alt in lst:
            union[alt] = union.get(alt, 0) + 1
    p = len(union)
    h_sum = float(sum(union.values()))
    rho = h_sum / (n * p)
    v = m / m.sum()
    o = m / p
    if mode == "density":
        x2 = rho
        x1 = 1.0 - x2
    elif mode == "dispersion":
        x1 = float(np.clip(np.var(v), 0.0, 1.0))
        x2 = 1.0 - x1
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    w_star = e * (x1 * o + x2 * v)
    total = float(w_star.sum())
    if total <= 0:
        raise DegenerateEstimates("weight mass vanished")
    w = w_star / total
    w = w / w.sum()  # second pass pins the total to 1 exactly
    return SourceWeightProfile(names, e, m, v, o, w_star, w,
                               rho=rho, x1=x1, x2=x2, mode=mode)
