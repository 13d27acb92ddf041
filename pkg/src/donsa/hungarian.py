"""Maximisation assignment solver for square weight matrices.

Two interchangeable backends run the same shortest-augmenting-path variant of
the Hungarian method:

* ``donsa._hungarian`` -- Cython kernel, used when the extension is built;
* ``_solve_python`` -- numpy implementation, used otherwise or when the
  environment variable ``DONSA_PURE_PYTHON`` is set to a non-empty value.

Both work in ``numpy.longdouble`` so that very large padding weights do not
swamp the real rates, and both follow the same tie rule: rows are augmented
in ascending index order and, among columns tied at the shortest reduced
distance, an unassigned column wins, otherwise the first one in scan order.
Identical inputs therefore give identical permutations on either backend.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import InvalidArgument

try:
    from ._hungarian import solve_min as _solve_compiled
except ImportError:  # extension not built
    _solve_compiled = None

__all__ = ["BACKEND", "NonFinite", "NonSquare", "hungarian_solve", "assignment_value"]


class NonSquare(InvalidArgument):
    pass


class NonFinite(InvalidArgument):
    pass


def _select_backend() -> str:
    if os.environ.get("DONSA_PURE_PYTHON") or _solve_compiled is None:
        return "python"
    return "compiled"


BACKEND = _select_backend()


def _solve_python(cost: np.ndarray) -> np.ndarray:
    n = cost.shape[0]
    ld = np.longdouble
    u = np.zeros(n, dtype=ld)
    v = np.zeros(n, dtype=ld)
    path = np.full(n, -1, dtype=np.intp)
    row4col = np.full(n, -1, dtype=np.intp)
    col4row = np.full(n, -1, dtype=np.intp)
    inf = ld(np.inf)

    for cur in range(n):
        spc = np.full(n, inf, dtype=ld)
        remaining = np.arange(n, dtype=np.intp)
        num_remaining = n
        sr = np.zeros(n, dtype=bool)
        sc = np.zeros(n, dtype=bool)
        min_val = ld(0)
        i = cur
        sink = -1
        while sink == -1:
            sr[i] = True
            js = remaining[:num_remaining]
            r = min_val + cost[i, js] - u[i] - v[js]
            better = r < spc[js]
            upd = js[better]
            path[upd] = i
            spc[upd] = r[better]
            vals = spc[js]
            lowest = vals.min()
            if not np.isfinite(lowest):
                raise ValueError("cost matrix admits no finite assignment")
            tied = vals == lowest
            free = tied & (row4col[js] == -1)
            index = int(np.argmax(free)) if free.any() else int(np.argmax(tied))
            min_val = lowest
            j = int(js[index])
            if row4col[j] == -1:
                sink = j
            else:
                i = int(row4col[j])
            sc[j] = True
            num_remaining -= 1
            remaining[index] = remaining[num_remaining]

        u[cur] += min_val
        others = np.flatnonzero(sr)
        others = others[others != cur]
        u[others] += min_val - spc[col4row[others]]
        v[sc] -= min_val - spc[sc]
        j = sink
        while True:
            i = int(path[j])
            row4col[j] = i
            col4row[i], j = j, int(col4row[i])
            if i == cur:
                break
    return col4row


def hungarian_solve(weights, maximize: bool = True, backend: str | None = None) -> np.ndarray:
    """Solve the square assignment problem on ``weights``.

    Returns ``perm`` with ``perm[i]`` the column assigned to row ``i``. The
    total ``sum(weights[i, perm[i]])`` is maximal (or minimal when
    ``maximize`` is false).
    """
    w = np.asarray(weights)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise NonFinite("weight matrix contains NaN or infinite entries")
    cost = np.ascontiguousarray(w, dtype=np.longdouble)
    if maximize:
        cost = -cost
    if w.shape[0] == 0:
        return np.empty(0, dtype=np.intp)
    use = backend or BACKEND
    if use == "compiled":
        if _solve_compiled is None:
            raise RuntimeError("compiled backend requested but extension is not built")
        return np.asarray(_solve_compiled(cost), dtype=np.intp)
    if use == "python":
        return _solve_python(cost)
    raise ValueError(f"unknown backend {use!r}")


def assignment_value(weights, perm) -> float:
    w = np.asarray(weights, dtype=float)
    return float(w[np.arange(len(perm)), perm].sum())
