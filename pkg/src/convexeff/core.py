"""Shared data model: universes, priors, meaning models, and category systems.

Everything here is immutable after construction (arrays are marked read-only),
so values can be shared freely across threads and processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

# Absolute tolerance for probability-vector row sums. Double-precision
# accumulation across a 330-point universe stays well inside this.
PROB_ATOL = 1e-12


def _readonly(a, dtype=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _check_row_stochastic(mat: np.ndarray, what: str) -> None:
    if np.any(mat < 0):
        raise ValueError(f"{what} has negative entries")
    sums = mat.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > PROB_ATOL):
        t = int(np.argmax(off))
        raise ValueError(
            f"{what} row {t} sums to {sums[t]:.17g}, expected 1 within {PROB_ATOL}"
        )


@dataclass(frozen=True)
class Universe:
    """Finite referent set with coordinates in R^d and optional grid positions.

    Referent ids are the contiguous indices 0..n-1. ``grid``, when present,
    gives each referent a (row letter, column) position on a 2D naming grid.
    """

    coords: np.ndarray
    grid: tuple[tuple[str, int], ...] | None = None

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if coords.ndim != 2 or coords.shape[0] < 1:
            raise ValueError("coords must be a (n, d) array with n >= 1")
        object.__setattr__(self, "coords", _readonly(coords))
        if self.grid is not None:
            grid = tuple((str(r), int(c)) for r, c in self.grid)
            if len(grid) != coords.shape[0]:
                raise ValueError("grid must give one position per referent")
            if len(set(grid)) != len(grid):
                raise ValueError("grid positions must be unique")
            object.__setattr__(self, "grid", grid)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @property
    def referents(self) -> np.ndarray:
        return np.arange(self.n)


@dataclass(frozen=True)
class Prior:
    """Communicative need distribution over referents."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1:
            raise ValueError("prior must be a vector")
        if np.any(p < 0):
            raise ValueError("prior has negative entries")
        if abs(p.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"prior sums to {p.sum():.17g}, expected 1 within {PROB_ATOL}")
        object.__setattr__(self, "p", _readonly(p))

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "Prior":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class MeaningModel:
    """Speaker belief distributions: row t is the belief over referents given target t."""

    m: np.ndarray
    prior: Prior

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("meaning matrix must be square (n x n)")
        if m.shape[0] != self.prior.n:
            raise ValueError("meaning matrix and prior sizes disagree")
        _check_row_stochastic(m, "meaning matrix")
        object.__setattr__(self, "m", _readonly(m))

    @property
    def n(self) -> int:
        return self.m.shape[0]


@dataclass(frozen=True)
class NamingSystem:
    """A (possibly soft) encoder: row t is the word distribution used for referent t."""

    q: np.ndarray
    words: tuple = ()

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.q, dtype=float))
        if q.shape[1] < 1:
            raise ValueError("a naming system needs at least one word")
        _check_row_stochastic(q, "encoder")
        words = tuple(self.words) if self.words else tuple(range(q.shape[1]))
        if len(words) != q.shape[1]:
            raise ValueError("words must label every encoder column")
        object.__setattr__(self, "q", _readonly(q))
        object.__setattr__(self, "words", words)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def k(self) -> int:
        return self.q.shape[1]


@dataclass(frozen=True)
class HardPartition:
    """Deterministic category system: every referent is assigned exactly one word.

    ``assign`` holds indices into ``words``; every listed word has a nonempty
    extension (construction prunes unused words).
    """

    assign: np.ndarray
    words: tuple = ()

    def __post_init__(self):
        assign = np.asarray(self.assign, dtype=np.intp)
        if assign.ndim != 1 or assign.shape[0] < 1:
            raise ValueError("assign must be a nonempty vector of word indices")
        words = tuple(self.words) if self.words else tuple(range(int(assign.max()) + 1))
        used = np.unique(assign)
        if used[0] < 0 or used[-1] >= len(words):
            raise ValueError("assignment indexes outside the word list")
        if len(used) != len(words):
            raise ValueError("every listed word needs a nonempty extension (prune first)")
        object.__setattr__(self, "assign", _readonly(assign, dtype=np.intp))
        object.__setattr__(self, "words", words)

    @property
    def n(self) -> int:
        return self.assign.shape[0]

    @property
    def k(self) -> int:
        return len(self.words)

    def extensions(self) -> dict:
        """Word -> array of referent indices assigned to it."""
        return {w: np.flatnonzero(self.assign == i) for i, w in enumerate(self.words)}


@dataclass
class EvalRecord:
    """Per-system scores consumed by the statistics and CLI layers."""

    complexity: float
    accuracy: float
    cost: float
    epsilon: float
    fitted_beta: float
    convexity: float
    k: int
    meta: dict = field(default_factory=dict)


def make_partition(labels: Sequence[Any]) -> HardPartition:
    """Build a HardPartition from arbitrary per-referent labels.

    Word order follows first appearance order of the labels; unused words
    cannot occur by construction.
    """
    labels = list(labels)
    words: list = []
    index: dict = {}
    assign = np.empty(len(labels), dtype=np.intp)
    for t, lab in enumerate(labels):
        if lab not in index:
            index[lab] = len(words)
            words.append(lab)
        assign[t] = index[lab]
    return HardPartition(assign=assign, words=tuple(words))


def mode_partition(system: NamingSystem) -> HardPartition:
    """Collapse a soft system to its modal categories.

    Ties go to the lowest word index; words that win no referent are pruned
    (their extensions would be empty).
    """
    modal = np.argmax(system.q, axis=1)
    used = np.unique(modal)
    remap = np.full(system.k, -1, dtype=np.intp)
    remap[used] = np.arange(len(used))
    return HardPartition(
        assign=remap[modal],
        words=tuple(system.words[i] for i in used),
    )


def category_extension(partition: HardPartition, word) -> np.ndarray:
    """Referent indices mapped to ``word``. Unknown words are an error."""
    try:
        idx = partition.words.index(word)
    except ValueError:
        raise KeyError(f"word {word!r} is not in this partition") from None
    return np.flatnonzero(partition.assign == idx)


def count_major_categories(system: NamingSystem) -> int:
    """Number of distinct words appearing in the modal map of ``system``."""
    return mode_partition(system).k


def as_naming_system(partition: HardPartition) -> NamingSystem:
    """One-hot encoder equivalent of a hard partition."""
    q = np.zeros((partition.n, partition.k))
    q[np.arange(partition.n), partition.assign] = 1.0
    return NamingSystem(q=q, words=partition.words)
