"""Pareto dominance, non-dominated pruning, and the external archive.

The archive keeps every (evaluation, policy snapshot) pair whose evaluation
is not Pareto-dominated by any other kept evaluation. Snapshots are opaque
byte payloads so the archive never depends on learner internals. An optional
capacity is enforced by evicting the entry with the smallest crowding
distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .momdp import ensure_objective


def dominates(a, b) -> bool:
    """True iff ``a`` is at least as good everywhere and better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors have mismatched shapes {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a > b))


def prune(candidates):
    """Non-dominated, de-duplicated subset of ``(eval, payload)`` pairs.

    Every entry dominated by some other input entry is dropped, as is any
    later entry whose evaluation exactly repeats an earlier one. Input order
    of the survivors is preserved. Implemented as sequential archive
    insertion with the survivor set held in one matrix, which gives the same
    result as a full pairwise filter.
    """
    payloads: list = []
    mat: np.ndarray | None = None
    for eval_, payload in candidates:
        vec = ensure_objective(eval_)
        if mat is None:
            mat = vec[None, :]
            payloads.append(payload)
            continue
        if vec.shape[0] != mat.shape[1]:
            raise ValueError(
                f"objective vectors have mismatched lengths {vec.shape[0]} "
                f"vs {mat.shape[1]}")
        # a survivor that is >= everywhere either dominates or duplicates vec
        if np.any(np.all(mat >= vec, axis=1)):
            continue
        keep = ~(np.all(vec >= mat, axis=1) & np.any(vec > mat, axis=1))
        if not np.all(keep):
            mat = mat[keep]
            payloads = [p for p, k in zip(payloads, keep) if k]
        mat = np.concatenate([mat, vec[None, :]])
        payloads.append(payload)
    if mat is None:
        return []
    return [(mat[i], payloads[i]) for i in range(len(payloads))]


def crowding_distance(front) -> np.ndarray:
    """NSGA-II crowding distance of each point in ``front``.

    Per objective, points are sorted (stably) and the first and last get
    infinite distance; interior points accumulate the normalized gap between
    their sorted neighbors. An objective whose range is zero contributes
    nothing to interior points.
    """
    pts = np.atleast_2d(np.asarray(front, dtype=float))
    n, m = pts.shape
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for j in range(m):
        order = np.argsort(pts[:, j], kind="stable")
        span = pts[order[-1], j] - pts[order[0], j]
        dist[order[0]] = dist[order[-1]] = np.inf
        if span == 0:
            continue
        for pos in range(1, n - 1):
            dist[order[pos]] += (pts[order[pos + 1], j] - pts[order[pos - 1], j]) / span
    return dist


@dataclass(eq=False)
class ArchiveEntry:
    eval: np.ndarray
    payload: object
    subproblem: int = -1
    step: int = 0


class ParetoArchive:
    """Mutually non-dominated store of evaluations with opaque payloads."""

    def __init__(self, capacity: int | None = None):
        if capacity is not None and capacity < 1:
            raise ValueError("capacity must be positive when set")
        self.capacity = capacity
        self.entries: list[ArchiveEntry] = []

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def evals(self) -> np.ndarray:
        if not self.entries:
            return np.empty((0, 0))
        return np.array([e.eval for e in self.entries])

    def would_accept(self, eval_) -> bool:
        """Acceptance check without mutating (and without snapshot cost)."""
        vec = ensure_objective(eval_)
        return not any(np.array_equal(e.eval, vec) or dominates(e.eval, vec)
                       for e in self.entries)

    def insert(self, eval_, payload, subproblem: int = -1, step: int = 0) -> bool:
        """Insert if non-dominated and new; evict entries it dominates.

        Returns whether the candidate was accepted. When a capacity is set
        and exceeded, the entry with the smallest crowding distance is
        evicted (oldest first among ties).
        """
        vec = ensure_objective(eval_)
        if not self.would_accept(vec):
            return False
        self.entries = [e for e in self.entries if not dominates(vec, e.eval)]
        self.entries.append(ArchiveEntry(vec, payload, subproblem, step))
        while self.capacity is not None and len(self.entries) > self.capacity:
            victim = int(np.argmin(crowding_distance(self.evals())))
            del self.entries[victim]
        return True

    def csv_rows(self):
        """Rows ``(obj_0, ..., obj_{m-1}, subproblem, step)`` per entry."""
        for e in self.entries:
            yield tuple(e.eval) + (e.subproblem, e.step)

    def write_csv(self, path) -> None:
        m = self.entries[0].eval.shape[0] if self.entries else 0
        header = [f"obj_{j}" for j in range(m)] + ["subproblem", "step"]
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in self.csv_rows():
                objs = [f"{v:.9g}" for v in row[:-2]]
                fh.write(",".join(objs + [str(row[-2]), str(row[-1])]) + "\n")
