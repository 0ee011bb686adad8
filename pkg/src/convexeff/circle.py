"""Angle-domain analyses: a non-convex optimal system and the need-swamped construction.

The domain is a discretized circle treated as the line segment [0, 2pi): a
category is convex here iff its bins form one contiguous run without
wraparound. Two results are reproduced numerically: (1) with
direction-indifferent similarity meanings, annealing in a moderate tradeoff
window yields an optimal 2-category system whose categories each occupy
several disjoint arcs; (2) for any convex partition there is a communicative
need prior under which it carries zero information while an equal-split
partition of the needed region attains the log2(k) maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import HardPartition, MeaningModel, NamingSystem, Prior, Universe, as_naming_system, make_partition, mode_partition
from . import ib


def make_circle_universe(n: int = 360) -> Universe:
    """n uniformly spaced angle bins spanning [0, 2pi)."""
    if n < 2:
        raise ValueError("need at least two bins")
    angles = 2.0 * np.pi * np.arange(n) / n
    return Universe(coords=angles[:, None])


def similarity_meanings(universe: Universe, sharpness: float = 2.0) -> MeaningModel:
    """Direction-indifferent meanings: m_t(u) proportional to exp(s |cos(u - t)|).

    The absolute cosine makes u and u + pi carry identical meanings, which is
    what forces optimal systems to be periodic. ``sharpness`` scales the
    exponent; at 1.0 the nontrivial regime starts near beta 26, at the default
    2.0 it starts inside the documented beta window (see find_nonconvex_optimum).
    """
    if sharpness <= 0:
        raise ValueError("sharpness must be positive")
    angles = universe.coords[:, 0]
    m = np.exp(sharpness * np.abs(np.cos(angles[None, :] - angles[:, None])))
    m /= m.sum(axis=1, keepdims=True)
    return MeaningModel(m=m, prior=Prior.uniform(universe.n))


def category_runs(partition: HardPartition, word_index: int) -> int:
    """Number of contiguous bin runs (no wraparound) forming one category."""
    member = partition.assign == word_index
    if not member.any():
        return 0
    starts = member & ~np.roll(member, 1)
    starts[0] = member[0]
    return int(starts.sum())


def is_segment_convex(partition: HardPartition) -> bool:
    """True iff every category is a single contiguous run of bins."""
    return all(category_runs(partition, i) == 1 for i in range(partition.k))


class NonConvexSearchError(RuntimeError):
    """No qualifying optimal system in the scanned window; carries diagnostics."""

    def __init__(self, message: str, scanned: list):
        super().__init__(message)
        self.scanned = scanned


@dataclass
class NonConvexOptimum:
    """A scanned optimal system violating segment convexity, plus its context.

    ``frontier`` is the two-word-restricted limit over the scanned window; the
    solution sits on it by construction.
    """

    solution: ib.IBSolution
    partition: HardPartition
    runs_per_category: tuple[int, ...]
    frontier: ib.Frontier
    symmetry_gap: float


def find_nonconvex_optimum(
    universe: Universe,
    beta_window: tuple[float, float] = (5.0, 15.0),
    num_betas: int = 101,
    *,
    meanings: MeaningModel | None = None,
    rng=None,
    tol: float = ib.BA_TOL,
    max_iter: int = ib.BA_MAX_ITER,
) -> NonConvexOptimum:
    """Anneal two-word category systems across the window and return an optimal
    one whose categories each span >= 2 disjoint arcs of the segment.

    The optimum is over systems with a fixed two-word vocabulary (the
    unconstrained optimum in this regime uses more categories). Degenerate
    near-uniform encoders below the nontrivial onset do not qualify. The
    returned point is the middle of the qualifying beta run; raises
    NonConvexSearchError with (beta, k, runs) diagnostics when nothing
    qualifies in the window.
    """
    if meanings is None:
        meanings = similarity_meanings(universe)
    lo, hi = beta_window
    if not (0 < lo < hi):
        raise ValueError("beta window must be positive and increasing")
    betas = np.geomspace(lo, hi, num_betas)

    n = universe.n
    generator = np.random.default_rng(rng)
    q = np.full((n, 2), 0.5) + 1e-2 * generator.random((n, 2))
    q /= q.sum(axis=1, keepdims=True)

    num = len(betas)
    comp = np.empty(num)
    acc = np.empty(num)
    fstar = np.empty(num)
    solutions: list[ib.IBSolution] = [None] * num
    for i in range(num - 1, -1, -1):
        sol = ib.ba_fixed_point(meanings, betas[i], q, tol=tol, max_iter=max_iter)
        q = sol.encoder.q
        comp[i] = sol.complexity
        acc[i] = sol.accuracy
        fstar[i] = sol.objective
        solutions[i] = sol
    frontier = ib.Frontier(betas=betas, complexity=comp, accuracy=acc, f_star=fstar)

    scanned = []
    candidates = []
    for i in range(num):
        part = mode_partition(solutions[i].encoder)
        runs = tuple(category_runs(part, j) for j in range(part.k))
        scanned.append({"beta": float(betas[i]), "k": part.k, "runs": runs})
        # genuinely nontrivial: strictly beats the one-word system's objective
        if part.k == 2 and all(r >= 2 for r in runs) and fstar[i] < -1e-9:
            candidates.append((i, part, runs))

    if not candidates:
        raise NonConvexSearchError(
            f"no optimal 2-category segment-convexity violation for beta in [{lo:g}, {hi:g}]",
            scanned,
        )
    i, part, runs = candidates[len(candidates) // 2]
    sol = solutions[i]

    zero = int(np.argmin(np.abs(universe.coords[:, 0] - 0.0)))
    half = int(np.argmin(np.abs(universe.coords[:, 0] - np.pi)))
    gap = float(np.abs(sol.encoder.q[zero] - sol.encoder.q[half]).max())
    return NonConvexOptimum(
        solution=sol,
        partition=part,
        runs_per_category=runs,
        frontier=frontier,
        symmetry_gap=gap,
    )


def random_convex_partition(universe: Universe, k: int, rng) -> HardPartition:
    """A uniformly drawn k-part partition of the bins into contiguous runs."""
    rng = np.random.default_rng(rng)
    n = universe.n
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    cuts = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
    bounds = np.concatenate(([0], cuts, [n]))
    labels = np.repeat(np.arange(k), np.diff(bounds))
    return make_partition(labels.tolist())


@dataclass
class NeedConstruction:
    """A prior under which a convex partition is uninformative, plus the witness."""

    prior: Prior
    informative: HardPartition
    accuracy_original: float
    accuracy_witness: float
    closed_form_witness: float
    k: int
    segment_bins: np.ndarray


def certainty_meanings(universe: Universe, prior: Prior) -> MeaningModel:
    """Speaker certainty: each meaning is a point mass on its own referent."""
    return MeaningModel(m=np.eye(universe.n), prior=prior)


def closed_form_accuracy(partition: HardPartition, segment: np.ndarray) -> float:
    """Accuracy of a hard partition under a uniform prior on ``segment`` bins.

    sum_w (|C_w n S| / |S|) log2(|S| / |C_w n S|), empty intersections drop out.
    """
    size = len(segment)
    total = 0.0
    for i in range(partition.k):
        overlap = int(np.sum(np.isin(segment, np.flatnonzero(partition.assign == i))))
        if overlap:
            total += (overlap / size) * np.log2(size / overlap)
    return total


def theorem2_construction(
    universe: Universe,
    partition: HardPartition,
    a_fraction: float = 1.0,
) -> NeedConstruction:
    """Build the adversarial communicative need for a convex partition.

    The prior is uniform over a sub-segment of the partition's largest
    category (trimmed so the bin count divides k exactly); the witness
    partition splits that segment into k equal runs and extends outward. The
    original partition scores zero accuracy; the witness scores log2(k).
    """
    if not is_segment_convex(partition):
        raise ValueError("partition must be segment-convex")
    if not 0 < a_fraction <= 1:
        raise ValueError("a_fraction must be in (0, 1]")
    k = partition.k
    sizes = np.bincount(partition.assign, minlength=k)
    host = int(np.argmax(sizes))
    host_bins = np.flatnonzero(partition.assign == host)
    want = int(round(a_fraction * len(host_bins)))
    usable = (want // k) * k
    if usable < k:
        raise ValueError(
            f"segment of {want} bins inside category {partition.words[host]!r} "
            f"cannot hold {k} equal parts"
        )
    segment = host_bins[:usable]

    p = np.zeros(universe.n)
    p[segment] = 1.0 / usable
    prior = Prior(p=p)

    # witness: k equal runs over the segment, nearest-run assignment elsewhere
    # (keeps every category one contiguous run over the whole domain)
    edges = segment[:: usable // k]
    labels = np.searchsorted(edges, np.arange(universe.n), side="right") - 1
    labels = np.clip(labels, 0, k - 1)
    witness = make_partition(labels.tolist())

    meanings = certainty_meanings(universe, prior)
    acc_p = ib.accuracy(as_naming_system(partition), meanings)
    acc_q = ib.accuracy(as_naming_system(witness), meanings)
    return NeedConstruction(
        prior=prior,
        informative=witness,
        accuracy_original=acc_p,
        accuracy_witness=acc_q,
        closed_form_witness=closed_form_accuracy(witness, segment),
        k=k,
        segment_bins=segment,
    )
