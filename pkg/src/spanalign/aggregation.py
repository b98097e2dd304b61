"""Multi-annotator consensus for span-pair annotations.

Affinity propagation clusters the annotated pairs by their combined
two-sided Jaccard similarity; the representative of the biggest cluster
(upper-median joint span length) becomes the consensus pair.

The message-passing implementation is deliberately local rather than a
library call: on non-convergence it must return the best-so-far
partition with a flag, and tie handling must be bit-for-bit
deterministic for fixed parameters.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .corpus import AlignmentPair
from .errors import IntegrityError
from .metrics import joint_jaccard


@dataclass(frozen=True)
class APParams:
    damping: float = 0.9
    max_iter: int = 200
    convergence_iter: int = 15
    preference: float | None = None  # None: median of the similarity matrix
    jitter: float = 0.0  # seeded degeneracy-breaking noise scale
    seed: int = 0

    def __post_init__(self):
        if not 0.5 <= self.damping < 1.0:
            raise IntegrityError(f"damping must lie in [0.5, 1), got {self.damping}")


@dataclass(frozen=True)
class APResult:
    labels: tuple[int, ...]  # exemplar index per item
    exemplars: tuple[int, ...]
    converged: bool
    iterations: int

    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for i, label in enumerate(self.labels):
            out.setdefault(label, []).append(i)
        return out


def affinity_propagation(similarity, params: APParams | None = None) -> APResult:
    """Exemplar-based clustering by message passing over a similarity matrix.

    The input must be square and symmetric. Reaching max_iter without a
    stable exemplar set returns the current assignment with
    ``converged=False``.
    """
    params = params or APParams()
    S = np.array(similarity, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise IntegrityError(f"similarity matrix must be square, got shape {S.shape}")
    n = S.shape[0]
    if not np.allclose(S, S.T, atol=1e-8):
        raise IntegrityError("similarity matrix must be symmetric")
    if n == 1:
        return APResult(labels=(0,), exemplars=(0,), converged=True, iterations=0)

    preference = (
        float(np.median(S)) if params.preference is None else params.preference
    )
    np.fill_diagonal(S, preference)
    if params.jitter > 0.0:
        rng = np.random.RandomState(params.seed)
        S = S + params.jitter * rng.standard_normal(S.shape)

    A = np.zeros((n, n))
    R = np.zeros((n, n))
    damping = params.damping
    stable_for = 0
    prev_exemplars: tuple[int, ...] | None = None
    converged = False
    iteration = 0

    for iteration in range(1, params.max_iter + 1):
        # responsibilities
        AS = A + S
        idx = np.argmax(AS, axis=1)
        first_max = AS[np.arange(n), idx]
        AS[np.arange(n), idx] = -np.inf
        second_max = np.max(AS, axis=1)
        new_R = S - first_max[:, None]
        new_R[np.arange(n), idx] = S[np.arange(n), idx] - second_max
        R = damping * R + (1.0 - damping) * new_R

        # availabilities
        Rp = np.maximum(R, 0.0)
        np.fill_diagonal(Rp, np.diag(R))
        col_sums = Rp.sum(axis=0)
        new_A = col_sums[None, :] - Rp
        diag = np.diag(new_A).copy()
        new_A = np.minimum(new_A, 0.0)
        np.fill_diagonal(new_A, diag)
        A = damping * A + (1.0 - damping) * new_A

        exemplars = tuple(int(i) for i in np.flatnonzero(np.diag(A) + np.diag(R) > 0))
        if exemplars and exemplars == prev_exemplars:
            stable_for += 1
            if stable_for >= params.convergence_iter:
                converged = True
                break
        else:
            stable_for = 0
        prev_exemplars = exemplars

    evidence = np.diag(A) + np.diag(R)
    exemplars = [int(i) for i in np.flatnonzero(evidence > 0)]
    if not exemplars:
        exemplars = [int(np.argmax(evidence))]
    ex_array = np.array(exemplars)
    labels = ex_array[np.argmax(S[:, ex_array], axis=1)]
    labels[ex_array] = ex_array
    return APResult(
        labels=tuple(int(x) for x in labels),
        exemplars=tuple(sorted(set(int(x) for x in labels))),
        converged=converged,
        iterations=iteration,
    )


def pair_similarity_matrix(annotations: list[AlignmentPair]) -> np.ndarray:
    n = len(annotations)
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            value = 1.0 if i == j else joint_jaccard(annotations[i], annotations[j])
            S[i, j] = S[j, i] = value
    return S


def joint_length(pair: AlignmentPair) -> int:
    return len(pair.summary_iu.span) + len(pair.doc_iu.span)


def aggregate_span_annotations(
    annotations: list[AlignmentPair],
    rng: random.Random | None = None,
    params: APParams | None = None,
) -> AlignmentPair | None:
    """Reduce several workers' span-pair annotations to one consensus pair.

    Clusters by combined Jaccard, picks the biggest cluster (seeded random
    on ties) and returns its member with the upper-median joint length.
    Returns None when no annotation was given.
    """
    if not annotations:
        return None
    if len(annotations) == 1:
        return annotations[0]
    rng = rng or random.Random(0)
    params = params or APParams(jitter=1e-9)

    result = affinity_propagation(pair_similarity_matrix(annotations), params)
    clusters = list(result.clusters().items())
    clusters.sort(key=lambda item: item[0])
    max_size = max(len(members) for _, members in clusters)
    tied = [members for _, members in clusters if len(members) == max_size]
    members = tied[rng.randrange(len(tied))]

    ordered = sorted(members, key=lambda i: (joint_length(annotations[i]), i))
    # upper median: for an even count take the longer of the two middles
    representative = ordered[len(ordered) // 2]
    return annotations[representative]
