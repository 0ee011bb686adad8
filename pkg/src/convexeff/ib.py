"""Information measures, the complexity/accuracy objective, and its optimal frontier.

All mutual informations are reported in bits. The tradeoff objective for an
encoder q at tradeoff beta is I(M;W) - beta * I(W;U); its optimal value over
encoders, swept over beta by reverse deterministic annealing, is the frontier
against which systems are scored.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .core import HardPartition, MeaningModel, NamingSystem, as_naming_system

LN2 = float(np.log(2.0))

# Convergence contract for the fixed-point solver.
BA_TOL = 1e-10
BA_MAX_ITER = 10_000

# Annealing drops words whose marginal falls below this between grid points;
# such a word moves the objective by well under 1e-10 bits.
PRUNE_MARGINAL = 1e-12


class ConvergenceError(RuntimeError):
    """Raised by callers that refuse non-converged solutions."""


def _encoder(system) -> np.ndarray:
    if isinstance(system, HardPartition):
        system = as_naming_system(system)
    if isinstance(system, NamingSystem):
        return system.q
    return np.asarray(system, dtype=float)


_TINY = np.finfo(float).tiny


def _plogp(a: np.ndarray) -> float:
    """sum a*ln(a) with 0 ln 0 = 0, via a clamped log (fast, exact for zeros)."""
    return float((a * np.log(np.maximum(a, _TINY))).sum())


def _mi_bits(joint: np.ndarray) -> float:
    """Mutual information of a joint distribution, in bits."""
    pa = joint.sum(axis=1)
    pb = joint.sum(axis=0)
    return (_plogp(joint) - _plogp(pa) - _plogp(pb)) / LN2


def _weighted_joint(meanings: MeaningModel) -> np.ndarray:
    """p(t) m_t(u): the meaning/referent joint, shape (n, n)."""
    return meanings.prior.p[:, None] * meanings.m


def complexity(system, meanings: MeaningModel) -> float:
    """I(M;W): bits needed to communicate which meaning the speaker holds."""
    q = _encoder(system)
    return _mi_bits(meanings.prior.p[:, None] * q)


def accuracy(system, meanings: MeaningModel) -> float:
    """I(W;U): information the words carry about the target referent."""
    q = _encoder(system)
    return _mi_bits(q.T @ _weighted_joint(meanings))


def meaning_information(meanings: MeaningModel) -> float:
    """I(M;U): the accuracy ceiling attainable by any encoder."""
    return _mi_bits(_weighted_joint(meanings))


def bayes_decoder(system, meanings: MeaningModel) -> np.ndarray:
    """Listener reconstruction per word: row w is the posterior mixture of meanings.

    Words with zero marginal get the prior-mixture row so downstream logs stay
    finite; such words carry no probability anywhere they are used.
    """
    q = _encoder(system)
    pm = _weighted_joint(meanings)
    joint_wu = q.T @ pm  # (k, n)
    qw = joint_wu.sum(axis=1)
    decoder = np.empty_like(joint_wu)
    alive = qw > 0
    decoder[alive] = joint_wu[alive] / qw[alive, None]
    decoder[~alive] = pm.sum(axis=0)
    return decoder


def communicative_cost(system, meanings: MeaningModel) -> float:
    """Expected KL divergence speaker->listener, computed as I(M;U) - I(W;U).

    The identity holds for the Bayesian decoder; ``expected_kl`` computes the
    divergence directly and is kept as an independent cross-check.
    """
    return meaning_information(meanings) - accuracy(system, meanings)


def expected_kl(system, meanings: MeaningModel) -> float:
    """Direct E_q[ D[m_t || decoder_w] ] in bits, weighted by p(t) q(w|t)."""
    q = _encoder(system)
    decoder = bayes_decoder(system, meanings)
    m = meanings.m
    ent = xlogy(m, m).sum(axis=1)  # sum_u m log m, nats
    # Where decoder is 0 the weight p(t) q(w|t) m_t(u) is 0 too (Bayes support),
    # so a clamped log never contributes.
    logdec = np.log(np.maximum(decoder, np.finfo(float).tiny))
    cross = m @ logdec.T  # (n, k)
    weights = meanings.prior.p[:, None] * q
    return float((weights * (ent[:, None] - cross)).sum() / LN2)


def ib_objective(system, meanings: MeaningModel, beta: float) -> float:
    """complexity - beta * accuracy, in bits."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return complexity(system, meanings) - beta * accuracy(system, meanings)


@dataclass
class IBSolution:
    """Converged (or capped) fixed point of the self-consistent encoder equations."""

    beta: float
    encoder: NamingSystem
    marginal: np.ndarray
    decoder: np.ndarray
    objective: float
    complexity: float
    accuracy: float
    n_iter: int
    converged: bool
    objective_trace: np.ndarray


def ba_fixed_point(
    meanings: MeaningModel,
    beta: float,
    init: NamingSystem | np.ndarray,
    tol: float = BA_TOL,
    max_iter: int = BA_MAX_ITER,
) -> IBSolution:
    """Alternating fixed-point iteration for the optimal encoder at one beta.

    Each round updates (i) the word marginal, (ii) the Bayesian decoder, and
    (iii) the encoder via q(w|t) proportional to q(w) exp(-beta KL[m_t || decoder_w]),
    stopping when the objective moves less than ``tol`` between rounds. The
    objective is nonincreasing across rounds. Non-convergence after
    ``max_iter`` rounds returns a flagged solution rather than raising.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    q = np.array(_encoder(init), dtype=float)
    p = meanings.prior.p
    m = meanings.m
    pm = _weighted_joint(meanings)
    pu = pm.sum(axis=0)
    h_u = _plogp(pu)
    ent = (m * np.log(np.maximum(m, _TINY))).sum(axis=1)  # sum_u m ln m, (n,)

    f_prev = np.inf
    trace = []
    n_iter = 0
    converged = False
    decoder = None
    comp = acc = 0.0
    while n_iter < max_iter:
        n_iter += 1
        joint_wu = q.T @ pm  # (k, n)
        qw = joint_wu.sum(axis=1)
        alive = qw > 0
        decoder = np.empty_like(joint_wu)
        decoder[alive] = joint_wu[alive] / qw[alive, None]
        decoder[~alive] = pu

        h_w = _plogp(qw)
        acc = (_plogp(joint_wu) - h_w - h_u) / LN2
        comp = (((p[:, None] * q) * np.log(np.maximum(q, _TINY))).sum() - h_w) / LN2
        f_now = comp - beta * acc
        trace.append(f_now)
        if abs(f_now - f_prev) < tol:
            converged = True
            break
        f_prev = f_now

        # KL[m_t || decoder_w] in nats; dead words are forced out via -inf logits.
        cross = m @ np.log(np.maximum(decoder, _TINY)).T  # (n, k)
        logits = np.where(alive, np.log(np.maximum(qw, _TINY)), -np.inf)
        logits = logits[None, :] - beta * (ent[:, None] - cross)
        logits -= logits.max(axis=1, keepdims=True)
        q = np.exp(logits)
        q /= q.sum(axis=1, keepdims=True)

    if not converged:
        # the loop ended on an encoder update; refresh the dependent quantities
        joint_wu = q.T @ pm
        qw = joint_wu.sum(axis=1)
        alive = qw > 0
        decoder = np.empty_like(joint_wu)
        decoder[alive] = joint_wu[alive] / qw[alive, None]
        decoder[~alive] = pu
        h_w = _plogp(qw)
        acc = (_plogp(joint_wu) - h_w - h_u) / LN2
        comp = (((p[:, None] * q) * np.log(np.maximum(q, _TINY))).sum() - h_w) / LN2

    return IBSolution(
        beta=float(beta),
        encoder=NamingSystem(q=q),
        marginal=p @ q,
        decoder=decoder,
        objective=comp - beta * acc,
        complexity=comp,
        accuracy=acc,
        n_iter=n_iter,
        converged=converged,
        objective_trace=np.asarray(trace),
    )


def self_consistency_gap(solution: IBSolution, meanings: MeaningModel) -> float:
    """Max row-wise deviation between the encoder and its own fixed-point update."""
    q = solution.encoder.q
    m = meanings.m
    tiny = np.finfo(float).tiny
    ent = xlogy(m, m).sum(axis=1)
    cross = m @ np.log(np.maximum(solution.decoder, tiny)).T
    div = ent[:, None] - cross
    qw = solution.marginal
    alive = qw > 0
    logits = np.where(alive, np.log(qw, where=alive, out=np.zeros_like(qw)), -np.inf)
    logits = logits[None, :] - solution.beta * div
    logits -= logits.max(axis=1, keepdims=True)
    q_next = np.exp(logits)
    q_next /= q_next.sum(axis=1, keepdims=True)
    return float(np.abs(q - q_next).max())


def _group_duplicate_words(q: np.ndarray, decoder: np.ndarray, marginal: np.ndarray, tol: float):
    """Group words whose decoders differ by less than ``tol`` in L1.

    Returns the merged encoder (columns summed within groups, group
    representatives ordered by descending marginal) or None when nothing
    merges. Words with zero marginal are folded into the first group.
    """
    alive = marginal > 0
    if alive.sum() <= 1:
        return None
    order = [int(w) for w in np.argsort(-marginal) if alive[w]]
    reps: list[int] = []
    groups: dict[int, list[int]] = {}
    for w in order:
        for r in reps:
            if np.abs(decoder[w] - decoder[r]).sum() < tol:
                groups[r].append(w)
                break
        else:
            reps.append(w)
            groups[w] = [w]
    if len(reps) == q.shape[1]:
        return None
    dead = [int(w) for w in np.flatnonzero(~alive)]
    if dead:
        groups[reps[0]].extend(dead)
    merged = np.stack([q[:, groups[r]].sum(axis=1) for r in reps], axis=1)
    return merged / merged.sum(axis=1, keepdims=True)


def consolidate_solution(
    meanings: MeaningModel,
    solution: IBSolution,
    merge_tols=(0.05, 0.01, 0.002),
    *,
    tol: float = BA_TOL,
    max_iter: int = BA_MAX_ITER,
    guard: float = 1e-9,
) -> IBSolution:
    """Collapse redundant words in a converged solution when it costs nothing.

    Annealing can carry many near-duplicate soft words (exactly degenerate
    meanings make this generic). For each candidate tolerance, coarsest first,
    duplicate decoders are merged and the fixed point re-converged; the merge
    is kept only if the objective does not worsen by more than ``guard``.
    """
    for merge_tol in sorted(merge_tols, reverse=True):
        merged = _group_duplicate_words(
            solution.encoder.q, solution.decoder, solution.marginal, merge_tol
        )
        if merged is None:
            continue
        candidate = ba_fixed_point(meanings, solution.beta, merged, tol=tol, max_iter=max_iter)
        if candidate.objective <= solution.objective + guard:
            return candidate
    return solution


def geometric_betas(beta_min: float = 1.0, beta_max: float = 1024.0, num: int = 1000) -> np.ndarray:
    """Default annealing grid: geometric spacing, ascending."""
    if not (0 < beta_min < beta_max):
        raise ValueError("need 0 < beta_min < beta_max")
    return np.geomspace(beta_min, beta_max, num)


@dataclass
class Frontier:
    """The optimal complexity/accuracy limit, swept over an ascending beta grid.

    ``encoders`` maps grid indices to stored optimal encoders (a configurable
    subset); ``mode_assign`` holds the modal category of each referent at every
    grid point.
    """

    betas: np.ndarray
    complexity: np.ndarray
    accuracy: np.ndarray
    f_star: np.ndarray
    mode_assign: np.ndarray | None = None
    encoders: dict[int, np.ndarray] = field(default_factory=dict)
    converged: np.ndarray | None = None

    MONOTONE_TOL = 1e-9
    SLOPE_TOL = 1e-6

    def __len__(self) -> int:
        return len(self.betas)

    def validate(self) -> None:
        """Check ordering, monotonicity, and concavity of the stored points."""
        b = np.asarray(self.betas)
        if np.any(np.diff(b) <= 0):
            raise ValueError("betas must be strictly increasing")
        if np.any(np.diff(self.accuracy) < -self.MONOTONE_TOL):
            raise ValueError("accuracy must be nondecreasing in beta")
        if np.any(np.diff(self.complexity) < -self.MONOTONE_TOL):
            raise ValueError("complexity must be nondecreasing in beta")
        slopes = self.chord_slopes()
        if np.any(np.diff(slopes) > self.SLOPE_TOL):
            raise ValueError("chord slopes must be nonincreasing (concavity)")

    def chord_slopes(self) -> np.ndarray:
        """Delta accuracy / delta complexity between numerically distinct points.

        Points closer than a nanobit of complexity are collapsed first; slopes
        between them would be quantization noise.
        """
        slopes = []
        anchor_c, anchor_a = self.complexity[0], self.accuracy[0]
        for c, a in zip(self.complexity[1:], self.accuracy[1:]):
            if c - anchor_c > 1e-9:
                slopes.append((a - anchor_a) / (c - anchor_c))
                anchor_c, anchor_a = c, a
        return np.asarray(slopes)

    def accuracy_bound(self, complexity_bits) -> np.ndarray:
        """Interpolated frontier accuracy at the given complexity (clamped to the grid)."""
        order = np.argsort(self.complexity)
        c = self.complexity[order]
        a = self.accuracy[order]
        # np.interp needs strictly increasing x; collapse duplicates to max accuracy
        c_u, idx = np.unique(c, return_index=True)
        a_u = np.maximum.reduceat(a, idx)
        return np.interp(complexity_bits, c_u, a_u)

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("beta,complexity_bits,accuracy_bits,F_star\n")
            for b, c, a, f in zip(self.betas, self.complexity, self.accuracy, self.f_star):
                fh.write(f"{b:.12g},{c:.12g},{a:.12g},{f:.12g}\n")

    @classmethod
    def load_csv(cls, path) -> "Frontier":
        data = np.genfromtxt(path, delimiter=",", skip_header=1)
        data = np.atleast_2d(data)
        return cls(
            betas=data[:, 0],
            complexity=data[:, 1],
            accuracy=data[:, 2],
            f_star=data[:, 3],
        )


def perturbed_identity_init(n: int, noise: float = 1e-2, rng=None) -> np.ndarray:
    """Near-identity encoder over n words, with seeded uniform perturbation."""
    rng = np.random.default_rng(rng)
    q = np.eye(n) + noise * rng.random((n, n))
    return q / q.sum(axis=1, keepdims=True)


def compute_frontier(
    meanings: MeaningModel,
    betas: np.ndarray | None = None,
    *,
    rng=None,
    init_noise: float = 1e-2,
    tol: float = BA_TOL,
    max_iter: int = BA_MAX_ITER,
    encoder_stride: int = 25,
    merge_tols=(0.05, 0.01, 0.002),
    warn_nonconverged: bool = True,
) -> Frontier:
    """Sweep the beta grid by reverse deterministic annealing.

    The largest beta starts from a perturbed near-identity encoder; each smaller
    beta starts from the previous solution, consolidated via
    ``consolidate_solution`` when ``merge_tols`` is truthy. ``encoder_stride``
    controls which optimal encoders are retained (0 disables storage); modal
    assignments are always kept.
    """
    if betas is None:
        betas = geometric_betas()
    betas = np.asarray(betas, dtype=float)
    if np.any(np.diff(betas) <= 0):
        raise ValueError("beta grid must be strictly increasing")

    n = meanings.n
    num = len(betas)
    comp = np.empty(num)
    acc = np.empty(num)
    fstar = np.empty(num)
    conv = np.zeros(num, dtype=bool)
    modes = np.empty((num, n), dtype=np.int32)
    encoders: dict[int, np.ndarray] = {}

    q = perturbed_identity_init(n, noise=init_noise, rng=rng)
    for pos, i in enumerate(range(num - 1, -1, -1)):
        sol = ba_fixed_point(meanings, betas[i], q, tol=tol, max_iter=max_iter)
        if merge_tols:
            sol = consolidate_solution(
                meanings, sol, merge_tols, tol=tol, max_iter=max_iter
            )
        q = sol.encoder.q
        # words fading out on the reverse path never revive at lower beta; drop
        # columns whose objective contribution is far below every tolerance
        alive = sol.marginal > PRUNE_MARGINAL
        if not alive.all() and alive.any():
            q = q[:, alive]
            q = q / q.sum(axis=1, keepdims=True)
        comp[i] = sol.complexity
        acc[i] = sol.accuracy
        fstar[i] = sol.objective
        conv[i] = sol.converged
        modes[i] = np.argmax(q, axis=1)
        if encoder_stride and (pos % encoder_stride == 0 or i == 0):
            encoders[i] = q.copy()
        if warn_nonconverged and not sol.converged:
            warnings.warn(f"fixed point at beta={betas[i]:g} hit the iteration cap")

    return Frontier(
        betas=betas,
        complexity=comp,
        accuracy=acc,
        f_star=fstar,
        mode_assign=modes,
        encoders=encoders,
        converged=conv,
    )


def deviation_from_optimality(
    complexity_bits, accuracy_bits, frontier: Frontier
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized deviation: min over the grid of (F_beta[q] - F*_beta) / beta.

    Returns (epsilon, fitted beta) arrays matching the input shape.
    """
    c = np.atleast_1d(np.asarray(complexity_bits, dtype=float))
    a = np.atleast_1d(np.asarray(accuracy_bits, dtype=float))
    betas = frontier.betas
    if np.any(betas <= 0):
        raise ValueError("deviation needs strictly positive betas")
    # gaps[s, i] = (F_beta_i[q_s] - F*_i) / beta_i
    gaps = (c[:, None] - betas[None, :] * a[:, None] - frontier.f_star[None, :]) / betas[None, :]
    best = np.argmin(gaps, axis=1)
    return gaps[np.arange(len(c)), best], betas[best]


def epsilon(system, meanings: MeaningModel, frontier: Frontier) -> tuple[float, float]:
    """Deviation from optimality of one system; returns (bits, fitted beta)."""
    c = complexity(system, meanings)
    a = accuracy(system, meanings)
    eps, beta = deviation_from_optimality(c, a, frontier)
    return float(eps[0]), float(beta[0])
