"""Affinity-propagation clustering engine.

Message passing over an arbitrary similarity matrix: responsibility and
availability updates with damping, convergence detection by assignment
stability, and exemplar extraction by row-wise argmax of A + R.

The per-iteration updates are the hot kernel of every simulated drop, so
they live in a compiled extension (compsim._ap_kernel) with a pure-numpy
twin (compsim._ap_numpy) selected at import when the extension is missing
or COMPSIM_PURE_PYTHON=1 is set.  benchmarks/bench_ap_backends.py compares
the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _ap_numpy

if os.environ.get("COMPSIM_PURE_PYTHON", "") == "1":
    _kernel = _ap_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _ap_kernel as _kernel

        BACKEND = "cython"
    except ImportError:
        _kernel = _ap_numpy
        BACKEND = "numpy"


@dataclass(frozen=True)
class APProblem:
    """Similarity matrix with the preference already written onto the diagonal."""

    similarity: np.ndarray  # [n, n]
    damping: float = 0.5
    max_iterations: int = 200
    stability_window: int = 10

    def __post_init__(self):
        S = np.asarray(self.similarity, dtype=float)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError(f"similarity must be square, got shape {S.shape}")
        if not np.all(np.isfinite(S)):
            raise ValueError("similarity entries must be finite")
        if not 0.0 <= self.damping < 1.0:
            raise ValueError(f"damping must lie in [0, 1), got {self.damping}")
        if self.stability_window < 1:
            raise ValueError(f"stability_window must be >= 1, got {self.stability_window}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        object.__setattr__(self, "similarity", S)

    @property
    def n(self) -> int:
        return self.similarity.shape[0]


@dataclass
class APState:
    responsibility: np.ndarray
    availability: np.ndarray
    iteration: int = 0

    @classmethod
    def zeros(cls, n: int) -> "APState":
        return cls(np.zeros((n, n)), np.zeros((n, n)), 0)


@dataclass(frozen=True)
class APResult:
    exemplars: np.ndarray  # sorted node ids
    assignment: np.ndarray  # node -> exemplar id
    converged: bool
    iterations_run: int

    @property
    def n_clusters(self) -> int:
        return len(self.exemplars)

    def members(self, exemplar: int) -> np.ndarray:
        """Nodes assigned to `exemplar`, excluding the exemplar itself."""
        idx = np.flatnonzero(self.assignment == exemplar)
        return idx[idx != exemplar]


def median_preference(similarity: np.ndarray) -> float:
    """Default diagonal preference: median of the off-diagonal similarities."""
    S = np.asarray(similarity, dtype=float)
    n = S.shape[0]
    if n == 1:
        return float(S[0, 0])
    off = S[~np.eye(n, dtype=bool)]
    return float(np.median(off))


def with_preference(similarity: np.ndarray, preference=None) -> np.ndarray:
    """Copy of `similarity` with `preference` (scalar, vector, or the
    median default when None) written onto the diagonal."""
    S = np.array(similarity, dtype=float, copy=True)
    if preference is None:
        preference = median_preference(S)
    np.fill_diagonal(S, preference)
    return S


def update_responsibility(state: APState, problem: APProblem) -> np.ndarray:
    """One damped responsibility update; does not mutate `state`."""
    return _kernel.responsibility_update(
        problem.similarity, state.responsibility, state.availability, problem.damping
    )


def update_availability(state: APState, problem: APProblem) -> np.ndarray:
    """One damped availability update (reads the current responsibilities)."""
    return _kernel.availability_update(
        state.responsibility, state.availability, problem.damping
    )


def _extract_assignment(S, R, A):
    """Row-wise argmax of A + R (ties break to the lowest index), refined so
    that every exemplar is self-assigned and every target is an exemplar."""
    n = S.shape[0]
    raw = np.argmax(A + R, axis=1)
    exemplars = np.flatnonzero(raw == np.arange(n))
    if len(exemplars) == 0:
        # degenerate (typically pre-convergence): treat argmax targets as exemplars
        exemplars = np.unique(raw)
    assignment = exemplars[np.argmax(S[:, exemplars], axis=1)]
    assignment[exemplars] = exemplars
    return exemplars, assignment, raw


def cluster(problem: APProblem) -> APResult:
    """Iterate messages until assignments are stable for `stability_window`
    consecutive iterations, or `max_iterations` is reached (reported via
    `converged`, not an error)."""
    n = problem.n
    state = APState.zeros(n)
    S = problem.similarity

    prev_raw = None
    stable = 0
    converged = False
    iterations = 0
    for iterations in range(1, problem.max_iterations + 1):
        state.responsibility = update_responsibility(state, problem)
        state.availability = update_availability(state, problem)
        state.iteration = iterations
        if not (np.all(np.isfinite(state.responsibility)) and np.all(np.isfinite(state.availability))):
            raise FloatingPointError(f"non-finite message at iteration {iterations}")

        raw = np.argmax(state.availability + state.responsibility, axis=1)
        if prev_raw is not None and np.array_equal(raw, prev_raw):
            stable += 1
        else:
            stable = 0
        prev_raw = raw
        if stable >= problem.stability_window:
            converged = True
            break

    exemplars, assignment, _ = _extract_assignment(
        S, state.responsibility, state.availability
    )
    return APResult(
        exemplars=exemplars,
        assignment=assignment,
        converged=converged,
        iterations_run=iterations,
    )
