"""Multi-objective MDPs, episode rollouts, and brute-force value oracles.

A :class:`Momdp` is a finite MDP whose reward is a length-``m`` float vector,
one entry per objective. Objective vectors are plain 1-D numpy arrays
throughout the package; :func:`ensure_objective` validates them at the
boundaries (fixed length, finite entries).

Two benchmark environments ship with the package:

* ``dst-corridor`` -- a five-column seabed corridor. The agent either
  advances along the surface (reward ``(0, -1)``) or dives to collect the
  treasure under the current column (reward ``(treasure, -1)``, terminal).
  Treasures are ``[1, 2, 3, 5, 10]``, so the Pareto front has exactly five
  points of which only the two extremes ``(1, -1)`` and ``(10, -5)`` lie on
  the convex hull. The corridor ends at the last column: advancing there
  collects the deepest treasure.
* ``tiny-tree`` -- a depth-2 deterministic binary tree with four leaves
  valued ``(4,0), (3,1), (1,3), (0,4)``; the smallest environment on which
  every learner can be checked against exhaustive enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

ENUMERATION_LIMIT = 10**6


def ensure_objective(values, m: int | None = None) -> np.ndarray:
    """Validate and return an objective vector as a 1-D float array."""
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1:
        raise ValueError(f"objective vector must be 1-D, got shape {vec.shape}")
    if m is not None and vec.shape[0] != m:
        raise ValueError(f"objective vector has length {vec.shape[0]}, expected {m}")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"objective vector contains non-finite entries: {vec}")
    return vec


@dataclass(eq=False)
class Experience:
    """One environment step.

    ``accrued`` is the undiscounted vector reward accumulated strictly before
    this step (the zero vector on the first step of an episode), so the total
    episodic return of a finished episode is ``accrued + reward`` of its last
    step. ``terminal`` is True for genuine termination and for horizon
    truncation alike; learners bootstrap with zero in both cases.
    """

    state: int
    action: int
    reward: np.ndarray
    next_state: int
    terminal: bool
    accrued: np.ndarray


class Momdp:
    """Finite multi-objective MDP with an explicit transition table.

    ``transitions[s][a]`` is a list of outcomes ``(prob, next_state, reward,
    terminal)``. Probabilities of each outcome list must sum to 1 within
    1e-12 and every reward must be a finite length-``m`` vector. Instances
    are immutable descriptions; all rollout state lives in the caller.
    """

    def __init__(self, n_states, n_actions, n_objectives, transitions,
                 initial_dist, max_episode_steps, name="momdp",
                 hv_reference_default=None):
        if n_states < 1 or n_actions < 1 or n_objectives < 1:
            raise ValueError("state, action and objective counts must be positive")
        if max_episode_steps < 1:
            raise ValueError("max_episode_steps must be positive")
        self.n_states = int(n_states)
        self.n_actions = int(n_actions)
        self.n_objectives = int(n_objectives)
        self.max_episode_steps = int(max_episode_steps)
        self.name = name

        self._transitions = []
        for s in range(self.n_states):
            row = []
            for a in range(self.n_actions):
                outcomes = [
                    (float(p), int(ns), ensure_objective(r, self.n_objectives), bool(term))
                    for p, ns, r, term in transitions[s][a]
                ]
                total = sum(p for p, *_ in outcomes)
                if abs(total - 1.0) > 1e-12:
                    raise ValueError(
                        f"transition probabilities for state {s}, action {a} "
                        f"sum to {total!r}, expected 1")
                row.append(outcomes)
            self._transitions.append(row)

        self.initial_dist = np.asarray(initial_dist, dtype=float)
        if self.initial_dist.shape != (self.n_states,):
            raise ValueError("initial distribution must have one entry per state")
        if abs(self.initial_dist.sum() - 1.0) > 1e-12:
            raise ValueError(f"initial distribution sums to {self.initial_dist.sum()!r}")

        self.hv_reference_default = (
            None if hv_reference_default is None
            else ensure_objective(hv_reference_default, self.n_objectives))
        self.deterministic = self._is_deterministic()

    def _is_deterministic(self) -> bool:
        if np.count_nonzero(self.initial_dist) != 1:
            return False
        return all(len(self._transitions[s][a]) == 1
                   for s in range(self.n_states) for a in range(self.n_actions))

    def outcomes(self, state: int, action: int):
        """Outcome list ``[(prob, next_state, reward, terminal), ...]``."""
        return self._transitions[state][action]

    def initial_state(self, rng: np.random.Generator | None = None) -> int:
        support = np.flatnonzero(self.initial_dist)
        if support.size == 1:
            return int(support[0])
        # inverse-CDF draw; a single uniform keeps stream usage predictable
        u = rng.random()
        return int(np.searchsorted(np.cumsum(self.initial_dist), u, side="right"))

    def step(self, state: int, action: int, rng: np.random.Generator | None = None):
        """Sample one transition; returns ``(next_state, reward, terminal)``.

        Deterministic transitions consume no randomness.
        """
        outcomes = self._transitions[state][action]
        if len(outcomes) == 1:
            p, ns, r, term = outcomes[0]
            return ns, r, term
        u = rng.random()
        acc = 0.0
        for p, ns, r, term in outcomes:
            acc += p
            if u < acc:
                return ns, r, term
        return outcomes[-1][1:]


GREEDY = "greedy-deterministic"
EPSILON_GREEDY = "epsilon-greedy"
SOFTMAX = "softmax"


@dataclass
class TabularPolicy:
    """Action preferences per (augmented) state.

    ``preferences`` maps a state key to an array of one real per action;
    greedy selection takes the argmax with ties broken to the lowest action
    index. For accrued-reward-augmented policies the key is
    ``(state, tuple(accrued))``. ``default_row`` backs states absent from the
    table (learners hand out zero rows so a fresh policy is defined
    everywhere); without it, visiting an unknown state is an error.
    """

    kind: str = GREEDY
    preferences: dict = field(default_factory=dict)
    epsilon: float = 0.0
    augmented: bool = False
    default_row: np.ndarray | None = None

    def key(self, state, accrued=None):
        if not self.augmented:
            return state
        return (state, tuple(float(x) for x in accrued))

    def row(self, state, accrued=None) -> np.ndarray:
        prefs = self.preferences.get(self.key(state, accrued))
        if prefs is None:
            if self.default_row is None:
                raise ValueError(
                    f"unreachable-state policy gap: no preferences for state "
                    f"{self.key(state, accrued)!r}")
            prefs = self.default_row
        return prefs

    def action(self, state, accrued=None, rng: np.random.Generator | None = None) -> int:
        prefs = self.row(state, accrued)
        if self.kind == GREEDY:
            return int(np.argmax(prefs))
        if self.kind == EPSILON_GREEDY:
            if rng.random() < self.epsilon:
                return int(rng.integers(len(prefs)))
            return int(np.argmax(prefs))
        if self.kind == SOFTMAX:
            shifted = np.exp(prefs - np.max(prefs))
            probs = shifted / shifted.sum()
            return int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
        raise ValueError(f"unknown policy kind {self.kind!r}")


def rollout(env: Momdp, policy: TabularPolicy, rng_seed=0):
    """Run one episode; returns ``(trace, episodic_return)``.

    The trace is a list of :class:`Experience`; the return is the
    component-wise (undiscounted) sum of its rewards. Episodes stop on a
    terminal transition or after ``env.max_episode_steps`` steps, whichever
    comes first; truncation is recorded as terminal in the trace.
    """
    rng = np.random.default_rng(rng_seed)
    state = env.initial_state(rng)
    accrued = np.zeros(env.n_objectives)
    trace: list[Experience] = []
    while True:
        action = policy.action(state, accrued, rng)
        next_state, reward, terminal = env.step(state, action, rng)
        done = terminal or len(trace) + 1 >= env.max_episode_steps
        trace.append(Experience(state, action, reward, next_state, done, accrued.copy()))
        accrued = accrued + reward
        state = next_state
        if done:
            return trace, accrued


def evaluate_policy(env: Momdp, policy: TabularPolicy, episodes: int,
                    gamma: float, rng_seed=0) -> np.ndarray:
    """Average discounted vector return over ``episodes`` rollouts.

    Exact (zero variance) for a deterministic environment and policy, in
    which case a single rollout is performed since all episodes coincide.
    """
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    rng = np.random.default_rng(rng_seed)
    runs = 1 if (env.deterministic and policy.kind == GREEDY) else episodes
    total = np.zeros(env.n_objectives)
    for _ in range(runs):
        trace, _ = rollout(env, policy, rng)
        value = np.zeros(env.n_objectives)
        discount = 1.0
        for exp in trace:
            value += discount * exp.reward
            discount *= gamma
        total += value
    return total / runs


def enumerate_deterministic_policies(env: Momdp, gamma: float):
    """Exhaustive (policy, exact value) pairs for every deterministic policy.

    Values come from exact finite-horizon dynamic programming over the
    horizon ``env.max_episode_steps`` with truncation treated as
    termination, not from sampling. Guarded against combinatorial blowup:
    ``n_actions ** n_states`` may not exceed 10**6.
    """
    count = env.n_actions ** env.n_states
    if count > ENUMERATION_LIMIT:
        raise ValueError(
            f"oracle too large: {env.n_actions}^{env.n_states} = {count} "
            f"deterministic policies exceeds the {ENUMERATION_LIMIT} bound")
    results = []
    for assignment in itertools.product(range(env.n_actions), repeat=env.n_states):
        value = _exact_policy_value(env, assignment, gamma)
        prefs = {s: _one_hot(env.n_actions, a) for s, a in enumerate(assignment)}
        results.append((TabularPolicy(kind=GREEDY, preferences=prefs), value))
    return results


def _one_hot(n: int, idx: int) -> np.ndarray:
    row = np.zeros(n)
    row[idx] = 1.0
    return row


def _exact_policy_value(env: Momdp, assignment, gamma: float) -> np.ndarray:
    horizon = env.max_episode_steps
    # u[s] holds the value-to-go with t steps remaining, built backwards
    u = np.zeros((env.n_states, env.n_objectives))
    for _ in range(horizon):
        nxt = np.zeros_like(u)
        for s in range(env.n_states):
            for p, ns, r, term in env.outcomes(s, assignment[s]):
                nxt[s] += p * (r if term else r + gamma * u[ns])
        u = nxt
    return env.initial_dist @ u


def mixture_value(values, probabilities) -> np.ndarray:
    """Convex combination of objective vectors: ``sum(p_i * v_i)``.

    This is the value of the stochastic mixture that plays policy ``i`` for
    a whole episode with probability ``p_i``.
    """
    if len(values) != len(probabilities):
        raise ValueError("values and probabilities must have equal length")
    probs = np.asarray(probabilities, dtype=float)
    if np.any(probs < 0):
        raise ValueError("mixture probabilities must be non-negative")
    if abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"mixture probabilities sum to {probs.sum()!r}, expected 1")
    vecs = [ensure_objective(v) for v in values]
    m = vecs[0].shape[0]
    for v in vecs:
        if v.shape[0] != m:
            raise ValueError("mixture components have mismatched lengths")
    return sum(p * v for p, v in zip(probs, vecs))


def dst_corridor() -> Momdp:
    """Five-column treasure corridor; see the module docstring."""
    treasures = [1.0, 2.0, 3.0, 5.0, 10.0]
    depth = len(treasures)
    transitions = []
    for col in range(depth):
        descend = [(1.0, col, np.array([treasures[col], -1.0]), True)]
        if col + 1 < depth:
            advance = [(1.0, col + 1, np.array([0.0, -1.0]), False)]
        else:
            # the corridor ends here: the wall forces the dive
            advance = [(1.0, col, np.array([treasures[col], -1.0]), True)]
        transitions.append([advance, descend])
    mu0 = np.zeros(depth)
    mu0[0] = 1.0
    return Momdp(depth, 2, 2, transitions, mu0, max_episode_steps=depth + 1,
                 name="dst-corridor", hv_reference_default=(0.0, -50.0))


def tiny_tree() -> Momdp:
    """Depth-2 binary tree with four distinctly valued leaves."""
    leaves = {(1, 0): (4.0, 0.0), (1, 1): (3.0, 1.0),
              (2, 0): (1.0, 3.0), (2, 1): (0.0, 4.0)}
    transitions = [
        [[(1.0, 1, np.zeros(2), False)], [(1.0, 2, np.zeros(2), False)]],
        [[(1.0, 1, np.array(leaves[(1, 0)]), True)],
         [(1.0, 1, np.array(leaves[(1, 1)]), True)]],
        [[(1.0, 2, np.array(leaves[(2, 0)]), True)],
         [(1.0, 2, np.array(leaves[(2, 1)]), True)]],
    ]
    mu0 = np.array([1.0, 0.0, 0.0])
    return Momdp(3, 2, 2, transitions, mu0, max_episode_steps=3,
                 name="tiny-tree", hv_reference_default=(-1.0, -1.0))


_REGISTRY = {
    "dst-corridor": dst_corridor,
    "tiny-tree": tiny_tree,
}


def register_env(env_id: str, factory) -> None:
    """Register a factory under a string id for :func:`make_env`."""
    _REGISTRY[env_id] = factory


def make_env(env_id: str) -> Momdp:
    try:
        factory = _REGISTRY[env_id]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise ValueError(f"unknown environment id {env_id!r} (known: {known})") from None
    return factory()
