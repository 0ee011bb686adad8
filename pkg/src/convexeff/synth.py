"""Deterministic synthetic survey data in the standard WCS file formats.

The real survey distribution cannot be bundled, so this module emits a
structurally faithful stand-in: a 330-chip universe (rows A-J, hue columns
1-40, achromatic column 0) with an irregular but smooth CIELAB embedding, and
languages whose naming counts are sampled from soft nearest-exemplar encoders.
Everything is seeded; identical arguments give byte-identical files.

Usage: python -m convexeff.synth --out DIR [--seed 7] [--languages 110]
"""

from __future__ import annotations

import argparse
import string
from pathlib import Path

import numpy as np

from .core import Universe

# Lightness levels for grid rows A-J, roughly one Munsell value step apart.
ROW_LIGHTNESS = [96.5, 91.1, 81.3, 71.6, 61.7, 51.6, 41.2, 30.8, 20.5, 15.6]
ROWS = "ABCDEFGHIJ"
N_COLS = 40


def grid_layout() -> list[tuple[str, int]]:
    """Chip order of the standard grid: 10 neutrals, then row-major chromatics."""
    layout = [(row, 0) for row in ROWS]
    for row in ROWS[1:-1]:
        layout.extend((row, col) for col in range(1, N_COLS + 1))
    return layout


def build_universe() -> Universe:
    """330 chips with a fixed irregular CIELAB embedding of the grid."""
    layout = grid_layout()
    coords = np.zeros((len(layout), 3))
    for i, (row, col) in enumerate(layout):
        lightness = ROW_LIGHTNESS[ROWS.index(row)]
        if col == 0:
            coords[i] = (lightness, 0.0, 0.0)
            continue
        theta = 2.0 * np.pi * (col - 1) / N_COLS
        # chroma peaks at mid lightness and undulates with hue so that no two
        # grid rotations are geometrically equivalent
        base = 18.0 + 42.0 * np.exp(-(((lightness - 55.0) / 30.0) ** 2))
        ripple = (
            1.0
            + 0.30 * np.sin(theta + 0.7)
            + 0.16 * np.cos(2.0 * theta + 1.9)
            + 0.07 * np.sin(3.0 * theta + 0.3)
        )
        chroma = base * ripple
        hue = theta + 0.12 * np.sin(theta + lightness / 40.0)
        coords[i] = (lightness, chroma * np.cos(hue), chroma * np.sin(hue))
    return Universe(coords=coords, grid=tuple(layout))


def _term_labels(k: int) -> list[str]:
    letters = string.ascii_lowercase
    labels = []
    for i in range(k):
        if i < 26:
            labels.append(letters[i])
        else:
            labels.append(letters[i // 26 - 1] + letters[i % 26])
    return labels


def _spread_exemplars(coords: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++-style seeding: spread exemplar chips across CIELAB."""
    chosen = [int(rng.integers(len(coords)))]
    for _ in range(k - 1):
        d2 = np.min(
            ((coords[:, None, :] - coords[chosen][None, :, :]) ** 2).sum(axis=2), axis=1
        )
        probs = d2 / d2.sum()
        chosen.append(int(rng.choice(len(coords), p=probs)))
    return np.array(chosen)


def sample_language(
    universe: Universe,
    rng: np.random.Generator,
    *,
    k_values=range(3, 12),
    k_weights=(0.05, 0.12, 0.17, 0.20, 0.17, 0.12, 0.09, 0.05, 0.03),
    tau2_range=(90.0, 220.0),
    speakers_range=(8, 26),
) -> tuple[list[str], np.ndarray]:
    """Terms and a (330, k) count matrix for one sampled language."""
    k = int(rng.choice(list(k_values), p=np.asarray(k_weights) / np.sum(k_weights)))
    exemplars = _spread_exemplars(universe.coords, k, rng)
    tau2 = rng.uniform(*tau2_range)
    d2 = ((universe.coords[:, None, :] - universe.coords[exemplars][None, :, :]) ** 2).sum(axis=2)
    logits = -d2 / (2.0 * tau2)
    logits -= logits.max(axis=1, keepdims=True)
    q = np.exp(logits)
    q /= q.sum(axis=1, keepdims=True)
    speakers = int(rng.integers(*speakers_range))
    counts = np.stack([rng.multinomial(speakers, row) for row in q])
    return _term_labels(k), counts


def write_dataset(
    out_dir,
    *,
    seed: int = 7,
    n_languages: int = 110,
    tau2_range=(90.0, 220.0),
    speakers_range=(8, 26),
) -> dict[str, Path]:
    """Emit chip.txt, cnum-vhcm-lab-new.txt, and term.txt into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    universe = build_universe()
    layout = universe.grid

    chip_path = out / "chip.txt"
    with open(chip_path, "w", encoding="utf-8") as fh:
        for i, (row, col) in enumerate(layout, start=1):
            fh.write(f"{i}\t{row}\t{col}\t{row}{col}\n")

    lab_path = out / "cnum-vhcm-lab-new.txt"
    with open(lab_path, "w", encoding="utf-8") as fh:
        fh.write("#cnum\tV\tH\tC\tMunH\tMunV\tL*\ta*\tb*\n")
        for i, ((row, col), (ell, a, b)) in enumerate(zip(layout, universe.coords), start=1):
            fh.write(
                f"{i}\t{ROWS.index(row)}\t{col}\t0\t-\t-\t{ell:.4f}\t{a:.4f}\t{b:.4f}\n"
            )

    term_path = out / "term.txt"
    with open(term_path, "w", encoding="utf-8") as fh:
        for lang in range(1, n_languages + 1):
            rng = np.random.default_rng(np.random.SeedSequence((seed, lang)))
            terms, counts = sample_language(
                universe, rng, tau2_range=tau2_range, speakers_range=speakers_range
            )
            for chip in range(universe.n):
                speaker = 1
                for j, term in enumerate(terms):
                    for _ in range(int(counts[chip, j])):
                        fh.write(f"{lang}\t{speaker}\t{chip + 1}\t{term}\n")
                        speaker += 1

    return {"chip": chip_path, "lab": lab_path, "term": term_path}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--languages", type=int, default=110)
    args = parser.parse_args(argv)
    paths = write_dataset(args.out, seed=args.seed, n_languages=args.languages)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
