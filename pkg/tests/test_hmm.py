import math

import numpy as np
import pytest

from driftloc import (
    Direction,
    HmmModel,
    LandCellError,
    Workspace,
    ZeroProbabilityError,
    build_cell_map,
    build_stochastic_map,
    emission_matrix,
    initial_distribution,
    sample_trajectory,
    transition_matrix,
    viterbi,
    viterbi_final_state,
)
from conftest import make_field, random_field


def model_for(field_pair, r, x_init, mode="deterministic", dt=None):
    w, f = field_pair
    smap = build_stochastic_map(build_cell_map(f, dt=dt), r)
    P = transition_matrix(smap)
    return HmmModel(P=P, Q=emission_matrix(smap), pi=initial_distribution(w, x_init, mode))


def brute_force_best(model, obs):
    """Oracle: exhaustive enumeration of every feasible state sequence."""
    logP = model._logP
    logQ = model._logQ
    logpi = model._logpi
    succ = [np.flatnonzero(np.isfinite(row)) for row in logP]
    T = len(obs)
    best = -math.inf

    def walk(t, s, acc):
        nonlocal best
        if t == T:
            best = max(best, acc)
            return
        e = logQ[s, obs[t]]
        if not np.isfinite(e):
            return
        for s2 in succ[s]:
            walk(t + 1, int(s2), acc + e + logP[s, s2])

    for s0 in np.flatnonzero(np.isfinite(logpi)):
        walk(0, int(s0), float(logpi[s0]))
    return best


def path_logprob(model, cells, obs):
    """Log score of one explicit trajectory under the model."""
    w = model.workspace
    states = [w.state_of(z) for z in cells]
    total = model._logpi[states[0]]
    for t, y in enumerate(obs):
        total += model._logQ[states[t], int(y)] + model._logP[states[t], states[t + 1]]
    return float(total)


class TestEmissionMatrix:
    def test_deterministic_east(self):
        w, f = make_field(4, 4, u=1.0)
        smap = build_stochastic_map(build_cell_map(f), 1.0)
        Q = emission_matrix(smap)
        s = w.state_of(w.index(1, 1))
        assert Q[s, Direction.E] == 1.0
        assert Q[s].sum() == 1.0

    def test_interior_stencil_row(self):
        # image N with r = 0.9 and a 4-cell endpoint stencil: N carries 0.9,
        # IDLE / E / NE carry (1-r)/3 each.
        w, f = make_field(5, 5, u=0.4, v=0.9)
        smap = build_stochastic_map(build_cell_map(f, dt=1.0), 0.9)
        Q = emission_matrix(smap)
        s = w.state_of(w.index(2, 2))
        assert Q[s, Direction.N] == pytest.approx(0.9)
        for d in (Direction.IDLE, Direction.E, Direction.NE):
            assert Q[s, d] == pytest.approx(0.1 / 3)
        for d in (Direction.S, Direction.W, Direction.SW, Direction.SE, Direction.NW):
            assert Q[s, d] == 0.0

    def test_colliding_corner_four_quarter_entries(self):
        w, f = make_field(4, 4, u=-0.7, v=-0.7)
        smap = build_stochastic_map(build_cell_map(f, dt=1.0), 0.9)
        Q = emission_matrix(smap)
        s = w.state_of(1)
        nz = {Direction(d): Q[s, d] for d in np.flatnonzero(Q[s] > 0)}
        assert nz == {
            Direction.IDLE: 0.25, Direction.N: 0.25,
            Direction.E: 0.25, Direction.NE: 0.25,
        }

    def test_rows_stochastic(self):
        rng = np.random.default_rng(2)
        w, f = random_field(rng, 5, 6, land_prob=0.15)
        smap = build_stochastic_map(build_cell_map(f), 0.85)
        Q = emission_matrix(smap)
        assert np.abs(Q.sum(axis=1) - 1.0).max() < 1e-12


class TestInitialDistribution:
    def test_deterministic_point_mass(self):
        w, _ = make_field(4, 4)
        pi = initial_distribution(w, 6, "deterministic")
        assert pi[w.state_of(6)] == 1.0
        assert pi.sum() == 1.0

    def test_probabilistic_interior_ninth(self):
        w, _ = make_field(4, 4)
        pi = initial_distribution(w, w.index(1, 1), "probabilistic")
        assert np.count_nonzero(pi) == 9
        np.testing.assert_allclose(pi[pi > 0], 1 / 9)

    def test_probabilistic_corner_quarter(self):
        w, _ = make_field(4, 4)
        pi = initial_distribution(w, 1, "probabilistic")
        assert np.count_nonzero(pi) == 4
        assert pi[w.state_of(1)] == 0.25

    def test_land_start_rejected(self):
        mask = np.zeros((3, 3), dtype=bool)
        mask[0, 0] = True
        w = Workspace(rows=3, cols=3, land_mask=mask)
        with pytest.raises(LandCellError):
            initial_distribution(w, 1, "deterministic")

    def test_unknown_mode(self):
        w, _ = make_field(3, 3)
        with pytest.raises(ValueError):
            initial_distribution(w, 1, "exact")


class TestViterbi:
    def test_noiseless_chain_recovers_truth(self):
        rng = np.random.default_rng(8)
        w, f = random_field(rng, 5, 5, vmax=1.5)
        model = model_for((w, f), 1.0, int(w.free_cells[7]))
        true_path, obs = sample_trajectory(model.P, model.pi, 12, seed=4)
        decoded, logp = viterbi(model, obs)
        assert decoded == true_path
        assert logp == 0.0

    def test_single_step_point_mass(self):
        w, f = make_field(4, 4, u=1.0)
        x0 = w.index(1, 1)
        model = model_for((w, f), 1.0, x0)
        decoded, logp = viterbi(model, [Direction.E])
        assert decoded == [x0, w.index(1, 2)]
        assert logp == 0.0

    def test_identity_chain_all_idle(self):
        w, f = make_field(4, 4)
        x0 = w.index(2, 2)
        model = model_for((w, f), 0.9, x0)
        decoded, _ = viterbi(model, [Direction.IDLE] * 6)
        assert decoded == [x0] * 7
        assert viterbi_final_state(model, [Direction.IDLE] * 6) == x0

    def test_uniform_east_shifts_then_clamps(self):
        w, f = make_field(3, 6, u=1.0)
        x0 = w.index(1, 2)
        model = model_for((w, f), 1.0, x0)
        true_path, obs = sample_trajectory(model.P, model.pi, 5, seed=0)
        decoded, _ = viterbi(model, obs)
        assert decoded == true_path
        # east run of 3, then pinned at the east edge
        assert decoded[-1] == w.index(1, 5)

    def test_matches_bruteforce_enumeration(self):
        rng = np.random.default_rng(31)
        for trial in range(8):
            w, f = random_field(rng, 4, 4, land_prob=0.1, vmax=1.3)
            r = float(rng.choice([0.7, 0.9]))
            x0 = int(rng.choice(w.free_cells))
            mode = "deterministic" if trial % 2 else "probabilistic"
            model = model_for((w, f), r, x0, mode)
            T = int(rng.integers(2, 6))
            true_path, obs = sample_trajectory(model.P, model.pi, T, seed=trial)
            decoded, logp = viterbi(model, obs)
            assert logp == pytest.approx(brute_force_best(model, obs), abs=1e-9)
            assert path_logprob(model, decoded, obs) == pytest.approx(logp, abs=1e-9)

    def test_dominates_ground_truth(self):
        rng = np.random.default_rng(12)
        w, f = random_field(rng, 6, 6, vmax=1.5)
        model = model_for((w, f), 0.8, int(w.free_cells[10]), "probabilistic")
        for seed in range(5):
            true_path, obs = sample_trajectory(model.P, model.pi, 15, seed=seed)
            decoded, logp = viterbi(model, obs)
            assert logp >= path_logprob(model, true_path, obs) - 1e-12

    def test_decoded_transitions_feasible(self):
        rng = np.random.default_rng(40)
        w, f = random_field(rng, 6, 6, vmax=2.0)
        model = model_for((w, f), 0.8, int(w.free_cells[3]), "probabilistic")
        true_path, obs = sample_trajectory(model.P, model.pi, 20, seed=2)
        decoded, _ = viterbi(model, obs)
        for t in range(len(obs)):
            s = model.workspace.state_of(decoded[t])
            s2 = model.workspace.state_of(decoded[t + 1])
            assert model.Q[s, int(obs[t])] > 0.0
            assert np.isfinite(model._logP[s, s2])

    def test_relabeling_invariance(self):
        # permuting the direction alphabet consistently in Q and the
        # observations must not change the decoded path
        rng = np.random.default_rng(77)
        w, f = random_field(rng, 5, 5, vmax=1.4)
        model = model_for((w, f), 0.85, int(w.free_cells[5]))
        _, obs = sample_trajectory(model.P, model.pi, 10, seed=9)
        perm = rng.permutation(9)
        Q2 = np.zeros_like(model.Q)
        Q2[:, perm] = model.Q
        model2 = HmmModel(P=model.P, Q=Q2, pi=model.pi)
        decoded1, logp1 = viterbi(model, obs)
        decoded2, logp2 = viterbi(model2, [int(perm[int(y)]) for y in obs])
        assert decoded1 == decoded2
        assert logp1 == pytest.approx(logp2)

    def test_zero_probability_carries_step(self):
        w, f = make_field(3, 5, u=1.0)
        model = model_for((w, f), 1.0, w.index(1, 0))
        with pytest.raises(ZeroProbabilityError) as exc:
            viterbi(model, [Direction.E, Direction.E, Direction.W])
        assert exc.value.step == 3

    def test_empty_history_rejected(self):
        w, f = make_field(3, 3)
        model = model_for((w, f), 0.9, 1)
        with pytest.raises(ValueError):
            viterbi(model, [])

    def test_model_validation(self):
        w, f = make_field(3, 3)
        smap = build_stochastic_map(build_cell_map(f), 0.9)
        P = transition_matrix(smap)
        Q = emission_matrix(smap)
        with pytest.raises(ValueError):
            HmmModel(P=P, Q=Q[:, :5], pi=initial_distribution(w, 1, "deterministic"))
        with pytest.raises(ValueError):
            HmmModel(P=P, Q=Q, pi=np.full(9, 0.2))
