import numpy as np

from powerspec.graph import Graph


def random_connected_graph(rng, n, p=0.4, weighted=True):
    """Random graph with a spanning path so every degree is positive."""
    edges = {}
    perm = rng.permutation(n)
    for a, b in zip(perm[:-1], perm[1:]):
        edges[(min(a, b), max(a, b))] = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges[(i, j)] = 1.0
    out = []
    for (i, j) in sorted(edges):
        w = float(rng.uniform(0.5, 2.0)) if weighted else 1.0
        out.append((int(i), int(j), w))
    return Graph(n, tuple(out))


def planted_automorphism_graph(rng, half, p=0.5):
    """Two copies of a random graph joined by a matching between twins.

    Vertex ``i`` and ``i + half`` are swapped by the automorphism
    ``sigma(i) = (i + half) mod 2*half``.
    """
    base = random_connected_graph(rng, half, p=p)
    edges = []
    for i, j, w in base.edges:
        edges.append((i, j, w))
        edges.append((i + half, j + half, w))
    for i in range(half):
        if i == 0 or rng.random() < 0.5:
            w = float(rng.uniform(0.5, 2.0))
            edges.append((i, i + half, w))
    sigma = np.concatenate([np.arange(half, 2 * half), np.arange(half)])
    return Graph(2 * half, tuple(edges)), sigma


def cdf_integral_w1(xa, wa, xb, wb):
    """W1 as the integral of |F_a - F_b| over the merged support (independent oracle)."""
    xs = sorted(set(map(float, xa)) | set(map(float, xb)))
    total = 0.0
    for left, right in zip(xs[:-1], xs[1:]):
        fa = sum(w for x, w in zip(xa, wa) if x <= left)
        fb = sum(w for x, w in zip(xb, wb) if x <= left)
        total += abs(fa - fb) * (right - left)
    return total


def expanded_wp(xa, counts_a, xb, counts_b, p):
    """W_p between measures with rational masses ``counts / N`` (equal denominators).

    Each measure expands to ``N`` equally weighted points; the optimal coupling
    pairs sorted samples.
    """
    a = np.repeat(np.asarray(xa, dtype=float), counts_a)
    b = np.repeat(np.asarray(xb, dtype=float), counts_b)
    assert a.size == b.size
    return float(np.mean(np.abs(np.sort(a) - np.sort(b)) ** p) ** (1.0 / p))
