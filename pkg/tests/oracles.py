"""Independent oracle implementations used to cross-check the package.

Everything here recomputes expected results through a different route than
the code under test: plain O(n^2) dominance loops, synchronous value
iteration over the full transition table, and a hand-rolled single-objective
Q-learning loop that mirrors the training schedule step for step.
"""

from __future__ import annotations

import math

import numpy as np

from paretoq.learning import ExperienceBuffer
from paretoq.momdp import Momdp, make_env
from paretoq.orchestrator import RunConfig
from paretoq.rng import RunStreams


def brute_force_non_dominated(points):
    """Indices of survivors per pairwise dominance and duplicate checks."""
    pts = [np.asarray(p, dtype=float) for p in points]
    survivors = []
    for i, a in enumerate(pts):
        dominated = False
        for j, b in enumerate(pts):
            if i == j:
                continue
            if bool(np.all(b >= a) and np.any(b > a)):
                dominated = True
                break
        if dominated:
            continue
        if any(np.array_equal(pts[k], a) for k in survivors):
            continue
        survivors.append(i)
    return survivors


def brute_force_non_dominated_matrix(points):
    """Same filter through full pairwise comparison matrices."""
    pts = np.asarray(points, dtype=float)
    ge = np.all(pts[:, None, :] >= pts[None, :, :], axis=2)
    gt = np.any(pts[:, None, :] > pts[None, :, :], axis=2)
    dominated = np.any(ge & gt, axis=0)
    equal = ge & ~gt
    keep = []
    for j in range(len(pts)):
        if dominated[j]:
            continue
        if np.any(equal[:j, j]):
            continue
        keep.append(j)
    return keep


def all_transition_experiences(env: Momdp):
    """One Experience per (state, action) pair of a deterministic env."""
    from paretoq.momdp import Experience

    sweep = []
    zero = np.zeros(env.n_objectives)
    for s in range(env.n_states):
        for a in range(env.n_actions):
            outcomes = env.outcomes(s, a)
            assert len(outcomes) == 1, "sweep training expects a deterministic env"
            _, ns, r, term = outcomes[0]
            sweep.append(Experience(s, a, r, ns, term, zero.copy()))
    return sweep


def value_iteration_scalar(env: Momdp, lam, gamma: float, sweeps: int | None = None):
    """Synchronous fixed point of scalarized Q-learning."""
    lam = np.asarray(lam, dtype=float)
    sweeps = sweeps if sweeps is not None else env.max_episode_steps + 2
    q = np.zeros((env.n_states, env.n_actions))
    for _ in range(sweeps):
        nxt = np.zeros_like(q)
        for s in range(env.n_states):
            for a in range(env.n_actions):
                for p, ns, r, term in env.outcomes(s, a):
                    boot = 0.0 if term else q[ns].max()
                    nxt[s, a] += p * (float(lam @ r) + gamma * boot)
        q = nxt
    return q


def value_iteration_vector(env: Momdp, lam, gamma: float, sweeps: int | None = None):
    """Synchronous fixed point of the vector-valued update."""
    lam = np.asarray(lam, dtype=float)
    sweeps = sweeps if sweeps is not None else env.max_episode_steps + 2
    q = np.zeros((env.n_states, env.n_actions, env.n_objectives))
    for _ in range(sweeps):
        nxt = np.zeros_like(q)
        for s in range(env.n_states):
            for a in range(env.n_actions):
                for p, ns, r, term in env.outcomes(s, a):
                    if term:
                        nxt[s, a] += p * r
                    else:
                        best = int(np.argmax(q[ns] @ lam))
                        nxt[s, a] += p * (r + gamma * q[ns, best])
        q = nxt
    return q


def value_iteration_envelope(env: Momdp, weights, gamma: float,
                             sweeps: int | None = None):
    """Synchronous fixed point of the envelope update over a weight set.

    The bootstrap scans next actions and all weight rows, keeping the vector
    with the largest scalarization under the row being updated; ties resolve
    to the lowest action, then the lowest weight index.
    """
    ws = [np.asarray(w, dtype=float) for w in weights]
    sweeps = sweeps if sweeps is not None else env.max_episode_steps + 2
    q = np.zeros((env.n_states, len(ws), env.n_actions, env.n_objectives))
    for _ in range(sweeps):
        nxt = np.zeros_like(q)
        for s in range(env.n_states):
            for l, lam in enumerate(ws):
                for a in range(env.n_actions):
                    for p, ns, r, term in env.outcomes(s, a):
                        if term:
                            nxt[s, l, a] += p * r
                            continue
                        best_vec, best_score = None, -np.inf
                        for a2 in range(env.n_actions):
                            for l2 in range(len(ws)):
                                score = float(lam @ q[ns, l2, a2])
                                if score > best_score:
                                    best_score, best_vec = score, q[ns, l2, a2]
                        nxt[s, l, a] += p * (r + gamma * best_vec)
        q = nxt
    return q


def standalone_scalar_q_learning(config: RunConfig, lam):
    """Plain single-objective Q-learning on the pre-scalarized reward.

    Reproduces the exact sampling and replay schedule of a one-subproblem
    run so the learned table can be compared bit for bit: same derived
    random streams, same one-coin-per-step exploration, same buffer draws,
    and the textbook temporal-difference update on the scalar reward.
    """
    env = make_env(config.env)
    lam = np.asarray(lam, dtype=float)
    streams = RunStreams(config.seed)
    buffer = ExperienceBuffer(config.buffer_capacity, config.buffer_replacement)
    q: dict[int, np.ndarray] = {}

    span = config.epsilon_decay_fraction * config.total_steps

    def epsilon(step):
        if span <= 0:
            return config.epsilon_min
        return config.epsilon_start + min(1.0, step / span) * (
            config.epsilon_min - config.epsilon_start)

    def row(state):
        r = q.get(state)
        if r is None:
            r = q[state] = np.zeros(env.n_actions)
        return r

    from paretoq.momdp import Experience

    steps = 0
    iterations = math.ceil(config.total_steps / config.steps_per_iteration) \
        if config.total_steps else 0
    for iteration in range(iterations):
        target = min(config.total_steps, (iteration + 1) * config.steps_per_iteration)
        while steps < target:
            state = env.initial_state(streams.env)
            accrued = np.zeros(env.n_objectives)
            trace = []
            while True:
                if streams.explore.random() < epsilon(steps + len(trace)):
                    action = int(streams.explore.integers(env.n_actions))
                else:
                    action = int(np.argmax(q.get(state, np.zeros(env.n_actions))))
                ns, r, term = env.step(state, action, streams.env)
                done = term or len(trace) + 1 >= env.max_episode_steps
                trace.append(Experience(state, action, r, ns, done, accrued.copy()))
                accrued = accrued + r
                state = ns
                if done:
                    break
            buffer.push(trace)
            steps += len(trace)
        for _ in range(config.update_passes):
            if len(buffer) == 0:
                break
            batch = buffer.sample(config.batch_size, streams.buffer)
            for e in batch:
                reward = float(np.dot(lam, e.reward))
                boot = 0.0 if e.terminal else float(row(e.next_state).max())
                r_ = row(e.state)
                r_[e.action] += config.alpha * (reward + config.gamma * boot - r_[e.action])
    return q
