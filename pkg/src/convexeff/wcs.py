"""World Color Survey ingestion and the color-domain model built from it.

Parses the standard WCS distribution files (chip.txt, cnum-vhcm-lab-new.txt,
term.txt) into a 330-chip CIELAB universe plus per-language naming counts,
and derives modal maps, probabilistic encoders, hue-grid rotations, and the
Gaussian meaning model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    HardPartition,
    MeaningModel,
    NamingSystem,
    Prior,
    Universe,
    make_partition,
)

N_CHIPS = 330
GRID_ROWS = "ABCDEFGHIJ"
N_HUE_COLS = 40


class IngestError(ValueError):
    """Malformed or inconsistent survey data; message names the file and line."""


@dataclass(frozen=True)
class LanguageNaming:
    """Pooled naming counts for one language: counts[t, j] uses of term j for chip t."""

    language: int
    terms: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[1] != len(self.terms):
            raise ValueError("counts must be (n_chips, n_terms)")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        if np.any(counts.sum(axis=1) == 0):
            chip = int(np.argmax(counts.sum(axis=1) == 0))
            raise ValueError(f"chip {chip} has no naming response")
        arr = np.array(counts, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "counts", arr)
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class WcsDataset:
    universe: Universe
    languages: tuple[LanguageNaming, ...]

    def language(self, number: int) -> LanguageNaming:
        for lang in self.languages:
            if lang.language == number:
                return lang
        raise KeyError(f"no language numbered {number}")


def _split_fields(line: str) -> list[str]:
    # chip/term files are tab-separated; the lab file mixes tabs and spaces
    return line.replace("\t", " ").split()


def _parse_chip_file(path) -> list[tuple[str, int]]:
    grid: dict[int, tuple[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = _split_fields(line)
            if len(fields) < 3:
                raise IngestError(f"{path}:{lineno}: expected chip, row, column")
            try:
                chip = int(fields[0])
                col = int(fields[2])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: {exc}") from None
            row = fields[1].strip().upper()
            if row not in GRID_ROWS:
                raise IngestError(f"{path}:{lineno}: grid row {row!r} outside A-J")
            if not 0 <= col <= N_HUE_COLS:
                raise IngestError(f"{path}:{lineno}: grid column {col} outside 0-40")
            if chip in grid:
                raise IngestError(f"{path}:{lineno}: duplicate chip {chip}")
            grid[chip] = (row, col)
    if len(grid) != N_CHIPS or set(grid) != set(range(1, N_CHIPS + 1)):
        raise IngestError(f"{path}: expected chips 1-{N_CHIPS}, found {len(grid)}")
    return [grid[c] for c in range(1, N_CHIPS + 1)]


def _parse_lab_file(path) -> np.ndarray:
    coords = np.full((N_CHIPS, 3), np.nan)
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines:
        raise IngestError(f"{path}: empty file")
    header = [h.lstrip("#").lower() for h in _split_fields(lines[0])]
    try:
        i_chip = next(i for i, h in enumerate(header) if h in ("cnum", "chip"))
        i_l = header.index("l*")
        i_a = header.index("a*")
        i_b = header.index("b*")
    except (StopIteration, ValueError):
        raise IngestError(f"{path}:1: header must name cnum, L*, a*, b* columns") from None
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        fields = _split_fields(line)
        try:
            chip = int(fields[i_chip])
            lab = (float(fields[i_l]), float(fields[i_a]), float(fields[i_b]))
        except (ValueError, IndexError) as exc:
            raise IngestError(f"{path}:{lineno}: {exc}") from None
        if not 1 <= chip <= N_CHIPS:
            raise IngestError(f"{path}:{lineno}: chip {chip} outside 1-{N_CHIPS}")
        coords[chip - 1] = lab
    missing = np.flatnonzero(np.isnan(coords).any(axis=1))
    if len(missing):
        raise IngestError(f"{path}: missing coordinates for chip {missing[0] + 1}")
    return coords


def _parse_term_file(path) -> dict[int, dict[str, np.ndarray]]:
    by_lang: dict[int, dict[str, np.ndarray]] = {}
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 4:
                fields = _split_fields(line)
            if len(fields) < 4:
                raise IngestError(
                    f"{path}:{lineno}: expected language, speaker, chip, term"
                )
            try:
                lang = int(fields[0])
                chip = int(fields[2])
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: {exc}") from None
            if not 1 <= chip <= N_CHIPS:
                raise IngestError(f"{path}:{lineno}: chip {chip} outside 1-{N_CHIPS}")
            term = fields[3].strip()
            if not term or term in ("*", "?"):
                dropped += 1
                continue
            counts = by_lang.setdefault(lang, {})
            if term not in counts:
                counts[term] = np.zeros(N_CHIPS)
            counts[term][chip - 1] += 1
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} responses with missing term codes")
    return by_lang


def load_wcs(chip_file, lab_file, term_file) -> WcsDataset:
    """Build the dataset from the three standard survey files."""
    grid = _parse_chip_file(chip_file)
    coords = _parse_lab_file(lab_file)
    universe = Universe(coords=coords, grid=tuple(grid))
    by_lang = _parse_term_file(term_file)
    out = []
    for lang in sorted(by_lang):
        terms = tuple(sorted(by_lang[lang]))
        counts = np.stack([by_lang[lang][t] for t in terms], axis=1)
        if np.any(counts.sum(axis=1) == 0):
            chip = int(np.argmax(counts.sum(axis=1) == 0)) + 1
            raise IngestError(f"{term_file}: language {lang} has no response for chip {chip}")
        out.append(LanguageNaming(language=lang, terms=terms, counts=counts))
    return WcsDataset(universe=universe, languages=tuple(out))


def modal_system(lang: LanguageNaming) -> HardPartition:
    """Chip -> most frequent term; ties go to the lowest term index."""
    modal = np.argmax(lang.counts, axis=1)
    return make_partition([lang.terms[j] for j in modal])


def probabilistic_system(lang: LanguageNaming) -> NamingSystem:
    """Row-normalized naming counts as a soft encoder."""
    totals = lang.counts.sum(axis=1, keepdims=True)
    return NamingSystem(q=lang.counts / totals, words=lang.terms)


def rotation_permutation(universe: Universe, r: int) -> np.ndarray:
    """dest[t] = index receiving chip t's naming under a hue rotation by r columns.

    Chromatic columns 1-40 shift cyclically; the achromatic column 0 is fixed.
    """
    if universe.grid is None:
        raise ValueError("rotation needs a universe with grid positions")
    if not 1 <= int(r) <= N_HUE_COLS - 1:
        raise ValueError(f"rotation must be in 1..{N_HUE_COLS - 1}, got {r}")
    pos_to_idx = {pos: i for i, pos in enumerate(universe.grid)}
    dest = np.empty(universe.n, dtype=np.intp)
    for t, (row, col) in enumerate(universe.grid):
        if col == 0:
            dest[t] = t
        else:
            dest[t] = pos_to_idx[(row, 1 + (col - 1 + int(r)) % N_HUE_COLS)]
    return dest


def rotate_system(universe: Universe, system, r: int):
    """Rotate a naming object along the hue dimension; returns the same kind."""
    dest = rotation_permutation(universe, r)
    if isinstance(system, LanguageNaming):
        counts = np.empty_like(np.asarray(system.counts))
        counts[dest] = system.counts
        return LanguageNaming(language=system.language, terms=system.terms, counts=counts)
    if isinstance(system, NamingSystem):
        q = np.empty_like(np.asarray(system.q))
        q[dest] = system.q
        return NamingSystem(q=q, words=system.words)
    if isinstance(system, HardPartition):
        assign = np.empty_like(np.asarray(system.assign))
        assign[dest] = system.assign
        return HardPartition(assign=assign, words=system.words)
    raise TypeError(f"cannot rotate {type(system).__name__}")


def gaussian_meanings(universe: Universe, sigma2: float = 64.0, prior: Prior | None = None) -> MeaningModel:
    """Perceptual-noise meanings: row t is a Gaussian kernel around chip t."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if prior is None:
        prior = Prior.uniform(universe.n)
    x = universe.coords
    sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(axis=2)
    m = np.exp(-sq / (2.0 * sigma2))
    m /= m.sum(axis=1, keepdims=True)
    return MeaningModel(m=m, prior=prior)


def chromatic_mask(universe: Universe) -> np.ndarray:
    """True for chips outside the achromatic column 0."""
    if universe.grid is None:
        raise ValueError("needs a universe with grid positions")
    return np.array([col != 0 for _, col in universe.grid])


def restrict(universe: Universe, partition: HardPartition, keep: np.ndarray):
    """Subset a universe and partition to ``keep`` (bool mask), re-pruning words."""
    keep = np.asarray(keep, dtype=bool)
    sub_grid = None
    if universe.grid is not None:
        sub_grid = tuple(g for g, k in zip(universe.grid, keep) if k)
    sub_universe = Universe(coords=universe.coords[keep], grid=sub_grid)
    labels = [partition.words[i] for i in partition.assign[keep]]
    return sub_universe, make_partition(labels)
