"""Exact maximum-weight assignment (Hungarian method with potentials)"""

from fractions import Fraction

INF = float('inf')


def max_weight_assignment(weights):
    """
    Maximum-weight assignment of every row to a distinct column.

    Args:
        weights: n x m matrix (n <= m) of Fractions; negative entries allowed,
            every row must be matched.

    Returns:
        (value, assignment) where assignment[r] is the column of row r
    """
    n = len(weights)
    if n == 0:
        return Fraction(0), ()
    m = len(weights[0])
    if m < n:
        raise ValueError(f"Cannot assign {n} rows into {m} columns")

    # Minimise cost = -weight; 1-indexed arrays, index 0 is the virtual column
    u = [Fraction(0)] * (n + 1)
    v = [Fraction(0)] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            row = weights[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = -row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break

    assignment = [0] * n
    for j in range(1, m + 1):
        if p[j]:
            assignment[p[j] - 1] = j - 1
    value = sum((weights[r][c] for r, c in enumerate(assignment)), Fraction(0))
    return value, tuple(assignment)


def lexmin_optimal_assignment(weights):
    """
    Among maximum-weight assignments, the lexicographically smallest column vector.

    Fixes rows in order, each to the smallest column that keeps the optimum reachable.
    """
    n = len(weights)
    if n == 0:
        return Fraction(0), ()
    m = len(weights[0])
    best, _ = max_weight_assignment(weights)
    chosen = []
    taken = set()
    remaining_value = best
    for r in range(n):
        rest_rows = list(range(r + 1, n))
        for c in range(m):
            if c in taken:
                continue
            cols = [k for k in range(m) if k not in taken and k != c]
            if len(cols) < len(rest_rows):
                continue
            sub = [[weights[i][k] for k in cols] for i in rest_rows]
            rest_value, _ = max_weight_assignment(sub)
            if weights[r][c] + rest_value == remaining_value:
                chosen.append(c)
                taken.add(c)
                remaining_value -= weights[r][c]
                break
    return best, tuple(chosen)
