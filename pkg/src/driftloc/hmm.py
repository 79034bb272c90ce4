"""Hidden Markov model over the cell chain and Viterbi trajectory decoding.

The model is (P, Q, pi): the chain's transition matrix, a compass emission
matrix, and an initial state distribution.  The compass reports the heading
of the move the drifter takes next, so the observation at step t is emitted
by the departing state: Q[z][y] is the total probability of the mapped cells
of z that lie in direction y.  A decoded trajectory for T observations has
T + 1 states and maximizes

    pi[x_0] * prod_t Q[x_{t-1}][y_t] * P[x_{t-1}][x_t]

over all state sequences, with ties broken toward the lexicographically
smallest sequence.  All scoring happens in log space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LandCellError, ZeroProbabilityError
from .gcm import StochasticCellMap, TransitionMatrix, transition_matrix
from .gridworld import N_DIRECTIONS, Direction, Workspace, direction_between


def emission_matrix(smap: StochasticCellMap) -> np.ndarray:
    """(n_free, 9) row-stochastic matrix of compass-symbol probabilities.

    Q[s, y] sums the mapped-set probability of state s over the targets whose
    displacement from s reads as direction y; each of the nine admissible
    targets has a distinct direction, so this is a relabeling of the rows of P.
    """
    w = smap.workspace
    n = smap.n_states
    Q = np.zeros((n, N_DIRECTIONS))
    for s in range(n):
        z = int(w.free_cells[s])
        row = smap.targets[s]
        for k in range(row.shape[0]):
            t = int(row[k])
            if t < 0:
                break
            y = direction_between(w, z, int(w.free_cells[t]))
            Q[s, y] += smap.probs[s, k]
    return Q


def initial_distribution(w: Workspace, x_init: int, mode: str) -> np.ndarray:
    """Initial state distribution over free cells.

    "deterministic": point mass at the known deployment cell.
    "probabilistic": uniform over the deployment cell and its water Moore
    neighbors (the deployment position is only known to one cell).
    """
    if w.is_land(x_init):
        raise LandCellError(f"initial cell {x_init} is land")
    pi = np.zeros(w.n_free)
    if mode == "deterministic":
        pi[w.state_of(x_init)] = 1.0
    elif mode == "probabilistic":
        support = sorted(w.neighbors(x_init) | {x_init})
        for z in support:
            pi[w.state_of(z)] = 1.0 / len(support)
    else:
        raise ValueError(f"unknown initial-distribution mode {mode!r}")
    return pi


@dataclass(frozen=True, eq=False)
class HmmModel:
    """lambda = (P, Q, pi) over the free cells and the 9-symbol alphabet."""

    P: TransitionMatrix
    Q: np.ndarray  # (n_free, 9)
    pi: np.ndarray  # (n_free,)

    def __post_init__(self):
        n = self.P.n_states
        if self.Q.shape != (n, N_DIRECTIONS):
            raise ValueError(f"emission matrix shape {self.Q.shape} != ({n}, 9)")
        if self.pi.shape != (n,):
            raise ValueError(f"initial distribution shape {self.pi.shape} != ({n},)")
        if abs(self.pi.sum() - 1.0) > 1e-12:
            raise ValueError("initial distribution does not sum to 1")
        # Dense log-space views, shared by every decode against this model.
        with np.errstate(divide="ignore"):
            object.__setattr__(self, "_logP", np.log(self.P.to_dense()))
            object.__setattr__(self, "_logQ", np.log(self.Q))
            object.__setattr__(self, "_logpi", np.log(self.pi))

    @property
    def workspace(self) -> Workspace:
        return self.P.workspace


def build_model(smap: StochasticCellMap, pi: np.ndarray) -> HmmModel:
    return HmmModel(P=transition_matrix(smap), Q=emission_matrix(smap), pi=pi)


def _check_feasible(model: HmmModel, obs: np.ndarray) -> None:
    """Forward sweep of reachable-state sets; raises at the first dead step."""
    support = np.isfinite(model._logP)
    reachable = model.pi > 0.0
    for t, y in enumerate(obs):
        departing = reachable & (model.Q[:, y] > 0.0)
        if not departing.any():
            raise ZeroProbabilityError(t + 1)
        reachable = support[departing].any(axis=0)


def viterbi(model: HmmModel, observations) -> tuple[list[int], float]:
    """Most likely state trajectory for a compass observation history.

    Returns (trajectory, log probability); the trajectory is a list of T + 1
    cell indices.  Raises ZeroProbabilityError (carrying the 1-based step) if
    no state sequence is consistent with the observations.
    """
    obs = np.asarray([int(Direction(y)) for y in observations], dtype=np.int64)
    T = len(obs)
    if T < 1:
        raise ValueError("observation history must contain at least one symbol")
    _check_feasible(model, obs)

    logP, logQ, logpi = model._logP, model._logQ, model._logpi

    # Backward pass: best[t][s] = best log score of observations t+1..T given
    # the chain sits at s after t of them (best[T] = 0).  Decoding forward
    # off these suffix scores makes np.argmax's first-maximum rule yield the
    # lexicographically smallest optimal trajectory; a forward trellis with
    # backpointers would break ties in reverse order instead.
    n = model.P.n_states
    best = np.empty((T + 1, n))
    best[T] = 0.0
    for t in range(T, 0, -1):
        cont = logP + best[t][None, :]
        best[t - 1] = logQ[:, obs[t - 1]] + cont.max(axis=1)

    start_scores = logpi + best[0]
    total = float(start_scores.max())
    if not np.isfinite(total):
        raise ZeroProbabilityError(1)

    path = [int(np.argmax(start_scores))]
    for t in range(1, T + 1):
        # the emission term of the departing state is fixed by path[-1]
        scores = logP[path[-1]] + best[t]
        path.append(int(np.argmax(scores)))

    cells = [int(model.workspace.free_cells[s]) for s in path]
    return cells, total


def viterbi_final_state(model: HmmModel, observations) -> int:
    """Last cell of the decoded trajectory: the probable final state."""
    cells, _ = viterbi(model, observations)
    return cells[-1]
