"""Independent oracles for the test suite.

Everything here is deliberately computed by a different route than the
package under test: resistances via the Moore-Penrose pseudoinverse of
the full Laplacian, hitting times via the one-step equations, covering
numbers via exhaustive set cover, cover times via closed forms, and
branching-process size laws via convolution.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from covertime import MultiGraph


def laplacian(g: MultiGraph) -> np.ndarray:
    n = g.vertex_count
    L = np.zeros((n, n))
    for u, v, m in g.edges:
        if u == v:
            continue
        L[u, v] -= m
        L[v, u] -= m
        L[u, u] += m
        L[v, v] += m
    return L


def resistance_matrix_pinv(g: MultiGraph) -> np.ndarray:
    """All-pairs effective resistance via the Laplacian pseudoinverse."""
    Lp = np.linalg.pinv(laplacian(g))
    d = np.diag(Lp)
    return d[:, None] + d[None, :] - 2 * Lp


def cycle_resistance(n: int, k: int) -> float:
    """Closed form for a unit cycle: two arcs of k and n-k in parallel."""
    return k * (n - k) / n


def transition_matrix(g: MultiGraph) -> np.ndarray:
    """Walk transition probabilities with the loop convention (a loop at v
    is taken with probability 2*mult/degree and stays)."""
    n = g.vertex_count
    P = np.zeros((n, n))
    for v, nbrs in enumerate(g.adjacency):
        d = g.degrees[v]
        for w, m in nbrs:
            P[v, w] += (2 * m if w == v else m) / d
    return P


def hitting_time_onestep(g: MultiGraph, u: int, v: int) -> float:
    """E_u[tau_v] by solving the one-step equations h = 1 + P h on V - {v}."""
    if u == v:
        return 0.0
    n = g.vertex_count
    P = transition_matrix(g)
    keep = [x for x in range(n) if x != v]
    A = np.eye(n - 1) - P[np.ix_(keep, keep)]
    h = np.linalg.solve(A, np.ones(n - 1))
    return float(h[keep.index(u)])


def return_time_exact(g: MultiGraph, v: int) -> float:
    """E_v[first return]: one step, then the hitting time back to v."""
    P = transition_matrix(g)
    total = 1.0
    for w in range(g.vertex_count):
        if w != v and P[v, w] > 0:
            total += P[v, w] * hitting_time_onestep(g, w, v)
    return total


def minimal_cover_size(R: np.ndarray, radius: float, rtol: float = 1e-9) -> int:
    """Smallest number of closed resistance balls of the given radius that
    cover every vertex; exhaustive search over center subsets."""
    n = R.shape[0]
    rad = radius * (1 + rtol) + 1e-12
    balls = [frozenset(np.flatnonzero(R[v] <= rad).tolist()) for v in range(n)]
    everything = frozenset(range(n))
    for size in range(1, n + 1):
        for centers in combinations(range(n), size):
            union = frozenset().union(*(balls[c] for c in centers))
            if union == everything:
                return size
    return n


def coupon_collector_cover(n: int) -> float:
    """Cover time of the complete graph: (n-1) * H_{n-1}."""
    return (n - 1) * sum(1.0 / j for j in range(1, n))


def cycle_cover(n: int) -> float:
    return n * (n - 1) / 2.0


def borel_pmf(mu: float, max_size: int) -> np.ndarray:
    """P(total branching-process progeny = j) for j = 1..max_size, by the
    convolution recursion q_j = sum_d Poisson(mu)(d) * (q^{*d})_{j-1};
    each q_j uses only q_1..q_{j-1}, so the sizes build up exhaustively.
    Cross-checked against the closed form e^(-mu j)(mu j)^(j-1)/j!."""
    q = np.zeros(max_size + 1)
    for j in range(1, max_size + 1):
        pois = math.exp(-mu)          # P(root has 0 children)
        conv = np.zeros(j)            # pmf of the sum of d subtree sizes, < j
        conv[0] = 1.0
        total = pois * conv[j - 1]
        for d in range(1, j):         # d parts, each >= 1, summing to j-1
            pois *= mu / d
            new = np.zeros(j)
            for a in range(1, j):
                if q[a]:
                    new[a:] += q[a] * conv[: j - a]
            conv = new
            total += pois * conv[j - 1]
        q[j] = total
    return q[1:]


def borel_closed_form(mu: float, j: int) -> float:
    return math.exp(-mu * j + (j - 1) * math.log(mu * j) - math.lgamma(j + 1))


def all_labeled_trees(k: int) -> list[frozenset]:
    """Every labeled tree on k vertices as a frozenset of sorted edges,
    by brute force over (k-1)-edge subsets."""
    assert 2 <= k <= 6
    pairs = list(combinations(range(k), 2))
    trees = []
    for subset in combinations(pairs, k - 1):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for a, b in subset:
            ra, rb = find(a), find(b)
            if ra == rb:
                ok = False
                break
            parent[ra] = rb
        if ok:
            trees.append(frozenset(subset))
    return trees


def canonical_edges(g: MultiGraph) -> frozenset:
    return frozenset((u, v) for u, v, _ in g.edges)


def random_connected_multigraph(
    rng: np.random.Generator,
    n: int,
    extra_edges: int = 0,
    loops: int = 0,
    max_multiplicity: int = 1,
) -> MultiGraph:
    """Test-side connected multigraph: a random attachment tree plus extra
    uniform edges, loops, and multiplicities. Independent of the package's
    tree samplers."""
    edges = []
    for v in range(1, n):
        edges.append((int(rng.integers(0, v)), v, int(rng.integers(1, max_multiplicity + 1))))
    for _ in range(extra_edges):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            edges.append((u, v, int(rng.integers(1, max_multiplicity + 1))))
    for _ in range(loops):
        v = int(rng.integers(0, n))
        edges.append((v, v, int(rng.integers(1, max_multiplicity + 1))))
    return MultiGraph(n, edges)
