"""PSLQ integer-relation detection with a certified norm bound.

Besides a relation, the search reports the running lower bound on the
Euclidean norm of any integer relation, so "no relation up to height H" can
be stated rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp


@dataclass(frozen=True)
class RelationSearch:
    status: str  # "relation", "bound" or "exhausted"
    relation: tuple | None
    norm_bound: float
    iterations: int


def pslq(x, max_norm, dps, maxsteps=10_000):
    """Search an integer vector m with sum m_i x_i = 0.

    Stops with status "relation" when one is found and verified, with
    "bound" once every relation provably has Euclidean norm > max_norm, and
    with "exhausted" when the working precision runs out first.
    """
    n = len(x)
    if n < 2:
        raise ValueError("need at least two numbers")
    with mp.workdps(dps):
        x = [mp.mpf(v) for v in x]
        scale = max(abs(v) for v in x)
        if scale == 0:
            raise ValueError("all inputs are zero")
        tol = mp.mpf(10) ** (-int(0.8 * dps))
        for i, v in enumerate(x):
            if abs(v) < tol * scale:
                rel = [0] * n
                rel[i] = 1
                return RelationSearch("relation", tuple(rel), 0.0, 0)
        x = [v / scale for v in x]
        g = mp.sqrt(mp.mpf(4) / 3)
        s = [mp.sqrt(mp.fsum(v * v for v in x[k:])) for k in range(n)]
        t = s[0]
        y = [v / t for v in x]
        s = [v / t for v in s]
        H = [[mp.mpf(0)] * (n - 1) for _ in range(n)]
        for i in range(n):
            for j in range(n - 1):
                if i == j:
                    H[i][j] = s[i + 1] / s[i]
                elif i > j:
                    H[i][j] = -y[i] * y[j] / (s[j] * s[j + 1])
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        B = [[int(i == j) for j in range(n)] for i in range(n)]

        def reduce_rows(i_from, j_cap):
            for i in range(i_from, n):
                for j in range(min(i - 1, j_cap), -1, -1):
                    if H[j][j] == 0:
                        continue
                    q = int(mp.nint(H[i][j] / H[j][j]))
                    if q == 0:
                        continue
                    y[j] += q * y[i]
                    for k in range(j + 1):
                        H[i][k] -= q * H[j][k]
                    for k in range(n):
                        A[i][k] -= q * A[j][k]
                        B[k][j] += q * B[k][i]

        reduce_rows(1, n)
        best_bound = mp.mpf(0)
        limit = mp.mpf(10) ** (dps - 5)
        for it in range(1, maxsteps + 1):
            m = max(range(n - 1), key=lambda i: g ** (i + 1) * abs(H[i][i]))
            y[m], y[m + 1] = y[m + 1], y[m]
            H[m], H[m + 1] = H[m + 1], H[m]
            A[m], A[m + 1] = A[m + 1], A[m]
            for k in range(n):
                B[k][m], B[k][m + 1] = B[k][m + 1], B[k][m]
            if m <= n - 3:
                t0 = mp.sqrt(H[m][m] ** 2 + H[m][m + 1] ** 2)
                if t0 == 0:
                    return RelationSearch("exhausted", None, float(best_bound), it)
                t1, t2 = H[m][m] / t0, H[m][m + 1] / t0
                for i in range(m, n):
                    t3, t4 = H[i][m], H[i][m + 1]
                    H[i][m] = t1 * t3 + t2 * t4
                    H[i][m + 1] = -t2 * t3 + t1 * t4
            reduce_rows(m + 1, m + 1)
            diag = max(abs(H[j][j]) for j in range(n - 1))
            if diag > 0:
                best_bound = max(best_bound, 1 / diag)
            for j in range(n):
                if abs(y[j]) < tol:
                    rel = tuple(int(B[k][j]) for k in range(n))
                    resid = abs(mp.fsum(c * v for c, v in zip(rel, x)))
                    if any(rel) and resid < tol * (1 + sum(abs(c) for c in rel)):
                        if rel[next(i for i, c in enumerate(rel) if c)] < 0:
                            rel = tuple(-c for c in rel)
                        return RelationSearch("relation", rel, float(best_bound), it)
            if best_bound > max_norm:
                return RelationSearch("bound", None, float(best_bound), it)
            if max(abs(a) for row in A for a in row) > limit:
                return RelationSearch("exhausted", None, float(best_bound), it)
        return RelationSearch("exhausted", None, float(best_bound), maxsteps)
