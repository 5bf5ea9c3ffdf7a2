"""
erdos_renyi
"""

import collections
import dataclasses
import fractions
import functools
import itertools
import logging
import math
import typing

import networkx as nx
import numpy as np

import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.models as models
import modphi.partition_combinatorics as partition_combinatorics
import modphi.util as util

Probability = fractions.Fraction | float

_ER_STREAM = 3
MAX_BRUTEFORCE_VERTICES = 6
MAX_SCAN_VERTICES = 1000
MAX_OVERLAP_TUPLES = 10**7


@dataclasses.dataclass(frozen=True, kw_only=True)
class PatternGraph:
    """A fixed simple graph γ on the vertices 0, …, k−1."""

    k: int
    edges: tuple[tuple[int, int], ...]
    name: str = "custom"

    def __post_init__(self):
        normalized = []
        for u, v in self.edges:
            if u == v:
                raise errors.OutOfRange(f"pattern {self.name} has a loop at vertex {u + 1}")
            if not (0 <= u < self.k and 0 <= v < self.k):
                raise errors.OutOfRange(f"pattern edge {u + 1}-{v + 1} leaves the {self.k} vertices")
            normalized.append((min(u, v), max(u, v)))
        if len(set(normalized)) != len(normalized):
            raise errors.OutOfRange(f"pattern {self.name} has a repeated edge")
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @property
    def h(self) -> int:
        return len(self.edges)

    @classmethod
    def from_name(cls, name: str) -> "PatternGraph":
        """Builds one of the named patterns edge, triangle or path3.

        Example:

        >>> t = PatternGraph.from_name("triangle")
        >>> t.k, t.h
        (3, 3)
        """
        match name:
            case "edge":
                return cls(k=2, edges=((0, 1),), name=name)
            case "triangle":
                return cls(k=3, edges=((0, 1), (1, 2), (0, 2)), name=name)
            case "path3":
                return cls(k=3, edges=((0, 1), (1, 2)), name=name)
        raise errors.OutOfRange(f"unknown pattern name: {name}")

    @classmethod
    def from_edge_list(cls, text: str) -> "PatternGraph":
        """Builds a pattern from a one-based edge list such as "1-2,2-3".

        Example:

        >>> PatternGraph.from_edge_list("1-2,2-3,3-4").k
        4
        """
        edges = util.parse_edge_list(text)
        if not edges:
            raise errors.OutOfRange("pattern edge list is empty")
        k = 1 + max(max(e) for e in edges)
        return cls(k=k, edges=tuple(edges), name=text)

    @functools.cached_property
    def automorphisms(self) -> int:
        """Number of vertex permutations preserving the edge set.

        Example:

        >>> PatternGraph.from_name("triangle").automorphisms
        6
        """
        edge_set = set(self.edges)
        return sum(
            1
            for perm in itertools.permutations(range(self.k))
            if {tuple(sorted((perm[u], perm[v]))) for u, v in self.edges} == edge_set
        )

    def cumulant_degree(self, r: int) -> int:
        """Degree in n of the r-th cumulant of the arrangement count, k + (r−1)(k−2)."""
        return self.k + (r - 1) * (self.k - 2)

    @property
    def shape(self) -> str | None:
        """edge, triangle or path3 when the pattern is one of those up to relabeling."""
        if self.k == 2 and self.h == 1:
            return "edge"
        if self.k == 3 and self.h == 3:
            return "triangle"
        if self.k == 3 and self.h == 2:
            return "path3"
        return None


@dataclasses.dataclass(frozen=True, kw_only=True)
class SubgraphCumulants:
    n: int
    p: Probability
    kappa: tuple
    """κ¹, κ², … of the arrangement count."""

    method: models.OracleKind
    stderr: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.method != models.OracleKind.MONTE_CARLO and len(self.kappa) > 1 and self.kappa[1] < 0:
            raise errors.NumericalError(f"exact κ² is negative: {self.kappa[1]}")


def _fraction(p) -> fractions.Fraction:
    value = fractions.Fraction(p)
    if not 0 <= value <= 1:
        raise errors.OutOfRange(f"edge probability must lie in [0, 1], got {p}")
    return value


def _count_batch(A: np.ndarray, shape: str) -> np.ndarray:
    """Arrangement counts of a closed-form pattern for a stack of adjacency matrices."""
    if shape == "edge":
        return A.sum(axis=(-2, -1))
    if shape == "path3":
        d = A.sum(axis=-1)
        return (d * (d - 1)).sum(axis=-1)
    # closed walks of length 3 are exactly the ordered triangles
    return (np.matmul(A, A) * A).sum(axis=(-2, -1))


def _count_backtracking(adj: list[set[int]], pattern: PatternGraph) -> int:
    order = list(range(pattern.k))
    neighbours = {v: set() for v in order}
    for u, v in pattern.edges:
        neighbours[u].add(v)
        neighbours[v].add(u)
    earlier = [[u for u in order[:i] if u in neighbours[order[i]]] for i in range(len(order))]
    vertices = set(range(len(adj)))

    def extend(i: int, image: dict[int, int], used: set[int]) -> int:
        if i == len(order):
            return 1
        constraints = [adj[image[u]] for u in earlier[i]]
        candidates = set.intersection(*constraints) if constraints else vertices
        total = 0
        for c in candidates - used:
            image[order[i]] = c
            used.add(c)
            total += extend(i + 1, image, used)
            used.discard(c)
        image.pop(order[i], None)
        return total

    return extend(0, {}, set())


def _count_matrix(A: np.ndarray, pattern: PatternGraph) -> int:
    if pattern.shape is not None:
        return int(round(float(_count_batch(A, pattern.shape))))
    adj = [set(np.nonzero(row)[0].tolist()) for row in A]
    return _count_backtracking(adj, pattern)


def count_copies(graph: nx.Graph, pattern: PatternGraph) -> int:
    """Counts the arrangements (a_1, …, a_k) of distinct vertices with γ ⊆ Γ[a_1, …, a_k].

    Every unlabeled copy is counted once per automorphism of γ times the
    ways to place it, i.e. this is the sum over arrangements of the copy
    indicator.

    Args:
        graph (nx.Graph): Simple graph
        pattern (PatternGraph): The pattern γ

    Raises:
        errors.TooLarge: If a pattern without closed form is scanned on more than 1000 vertices

    Returns:
        int: The arrangement count X_γ

    Examples:

    >>> count_copies(nx.complete_graph(4), PatternGraph.from_name("triangle"))
    24
    >>> count_copies(nx.complete_graph(3), PatternGraph.from_name("edge"))
    6
    >>> count_copies(nx.empty_graph(5), PatternGraph.from_edge_list("1-2,2-3,3-4"))
    0
    """
    nodes = sorted(graph.nodes)
    if pattern.shape is None and len(nodes) > MAX_SCAN_VERTICES:
        raise errors.TooLarge(f"arrangement scan is limited to {MAX_SCAN_VERTICES} vertices, got {len(nodes)}")
    A = nx.to_numpy_array(graph, nodelist=nodes, dtype=np.float64)
    np.fill_diagonal(A, 0.0)
    return _count_matrix((A > 0).astype(np.float64), pattern)


def count_unlabeled(graph: nx.Graph, pattern: PatternGraph) -> int:
    """Number of (not necessarily induced) copies of γ, the arrangement count over |Aut γ|.

    Example:

    >>> count_unlabeled(nx.complete_graph(4), PatternGraph.from_name("triangle"))
    4
    """
    return count_copies(graph, pattern) // pattern.automorphisms


def _all_graph_counts(n: int, pattern: PatternGraph) -> tuple[np.ndarray, np.ndarray]:
    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    masks = np.arange(2**m, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(m)) & 1
    edge_counts = bits.sum(axis=1)
    if pattern.shape is not None:
        A = np.zeros((len(masks), n, n), dtype=np.int64)
        if m:
            rows, cols = zip(*pairs)
            A[:, rows, cols] = bits
            A[:, cols, rows] = bits
        return edge_counts, _count_batch(A, pattern.shape)
    counts = np.empty(len(masks), dtype=np.int64)
    for g, row in enumerate(bits):
        adj = [set() for _ in range(n)]
        for (u, v), bit in zip(pairs, row):
            if bit:
                adj[u].add(v)
                adj[v].add(u)
        counts[g] = _count_backtracking(adj, pattern)
    return edge_counts, counts


def exact_cumulants_bruteforce(
    n: int, pattern: PatternGraph, p: Probability, orders: int = 4
) -> SubgraphCumulants:
    """Exact cumulants of X_γ in G(n, p) by summing over all 2^{C(n,2)} graphs.

    Args:
        n (int): Number of vertices, at most 6
        pattern (PatternGraph): The pattern γ
        p (Probability): Edge probability, taken as an exact rational
        orders (int, optional): Number of cumulants. Defaults to 4.

    Raises:
        errors.TooLarge: If n > 6
        errors.OutOfRange: If p is outside [0, 1]

    Returns:
        SubgraphCumulants: κ¹ … κ^orders as Fractions

    Example: edges of K₃ at p = 1/2

    >>> c = exact_cumulants_bruteforce(3, PatternGraph.from_name("edge"), fractions.Fraction(1, 2), orders=2)
    >>> c.kappa
    (Fraction(3, 1), Fraction(3, 1))
    """
    if n > MAX_BRUTEFORCE_VERTICES:
        raise errors.TooLarge(f"brute force is limited to n={MAX_BRUTEFORCE_VERTICES}, got {n}")
    if n < 0:
        raise errors.OutOfRange(f"number of vertices must be non-negative, got {n}")
    p = _fraction(p)
    m = n * (n - 1) // 2
    edge_counts, counts = _all_graph_counts(n, pattern)
    classes = collections.Counter(zip(edge_counts.tolist(), counts.tolist()))
    moments = [fractions.Fraction(0)] * orders
    for (e, x), multiplicity in classes.items():
        weight = multiplicity * p**e * (1 - p) ** (m - e)
        for j in range(orders):
            moments[j] += weight * x ** (j + 1)
    kappa = partition_combinatorics.moments_to_cumulants(moments)
    logging.debug(f"brute force over {2**m} graphs on {n} vertices, {len(classes)} classes")
    return SubgraphCumulants(
        n=n, p=p, kappa=tuple(fractions.Fraction(k) for k in kappa), method=models.OracleKind.BRUTE_FORCE
    )


def _sample_adjacency(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    A = np.zeros((n, n), dtype=np.float64)
    rows, cols = np.triu_indices(n, 1)
    A[rows, cols] = rng.random(len(rows)) < p
    return A + A.T


def mc_counts(
    n: int,
    pattern: PatternGraph,
    p: Probability,
    trials: int,
    seed: int | None = None,
    cfg: config.Config = config.Config(),
) -> np.ndarray:
    """Draws `trials` arrangement counts of γ in independent G(n, p) samples.

    Raises:
        errors.BudgetExceeded: If trials·n² exceeds `cfg.budget`
    """
    p = float(_fraction(p))
    if trials * n * n > cfg.budget:
        raise errors.BudgetExceeded(f"trials·n² = {trials * n * n} exceeds the budget {cfg.budget}")
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)

    def _sample(rng: np.random.Generator, size: int) -> np.ndarray:
        return np.array([_count_matrix(_sample_adjacency(rng, n, p), pattern) for _ in range(size)], dtype=np.float64)

    parts = util.run_chunks(_ER_STREAM, trials, _sample, cfg)
    return np.concatenate(parts) if parts else np.zeros(0)


def _k_statistics(s1, s2, s3, m):
    mean = s1 / m
    m2 = s2 / m - mean**2
    m3 = s3 / m - 3 * mean * s2 / m + 2 * mean**3
    return mean, m / (m - 1) * m2, m * m / ((m - 1) * (m - 2)) * m3


def mc_cumulants(
    n: int,
    pattern: PatternGraph,
    p: Probability,
    trials: int,
    seed: int | None = None,
    cfg: config.Config = config.Config(),
) -> SubgraphCumulants:
    """Monte Carlo κ¹, κ², κ³ of X_γ from unbiased k-statistics, with jackknife standard errors.

    Raises:
        errors.OutOfRange: If trials < 1000
    """
    if trials < 1000:
        raise errors.OutOfRange(f"Monte Carlo cumulants need at least 1000 trials, got {trials}")
    x = mc_counts(n, pattern, p, trials, seed, cfg)
    shift = float(x.mean())
    d = x - shift
    N = len(d)
    s1, s2, s3 = d.sum(), (d**2).sum(), (d**3).sum()
    mean, k2, k3 = _k_statistics(s1, s2, s3, N)
    # delete-one jackknife
    loo = _k_statistics(s1 - d, s2 - d**2, s3 - d**3, N - 1)
    stderr = tuple(
        math.sqrt((N - 1) / N * float(((est - est.mean()) ** 2).sum())) for est in loo
    )
    logging.info(f"{N} samples of G({n}, {float(p)}): κ² = {k2:.6g}, κ³ = {k3:.6g}")
    return SubgraphCumulants(
        n=n,
        p=float(p),
        kappa=(mean + shift, k2, k3),
        method=models.OracleKind.MONTE_CARLO,
        stderr=stderr,
    )


def sigma2_L(pattern: PatternGraph, p: Probability) -> tuple:
    """σ² = 2h²p^{2h−1}(1−p) and L = 12h³(h−1)p^{3h−2}(1−p)² + 4h³p^{3h−2}(1−p)(1−2p).

    Rational p gives exact Fractions.

    Raises:
        errors.DegenerateP: If p is not strictly between 0 and 1

    Example: triangle at p = 1/2

    >>> sigma2_L(PatternGraph.from_name("triangle"), fractions.Fraction(1, 2))
    (Fraction(9, 32), Fraction(81, 64))
    """
    if not 0 < p < 1:
        raise errors.DegenerateP(f"σ² and L need 0 < p < 1, got {p}")
    h = pattern.h
    sigma2 = 2 * h**2 * p ** (2 * h - 1) * (1 - p)
    L = 12 * h**3 * (h - 1) * p ** (3 * h - 2) * (1 - p) ** 2 + 4 * h**3 * p ** (3 * h - 2) * (1 - p) * (1 - 2 * p)
    return sigma2, L


def triangle_threshold(n: int, p: float, v: float) -> float:
    """n³p³ + n²(v − 3p³), the level of the triangle deviation."""
    return n**3 * p**3 + n**2 * (v - 3 * p**3)


def triangle_deviation(n: int, p: float, v: float) -> deviation_engine.DeviationEstimate:
    """Estimates P[T_n ≥ n³p³ + n²(v − 3p³)] for the ordered triangle count T_n.

    √(9p⁵(1−p)/(πv²)) exp(−v²/(36p⁵(1−p)) + (7−8p)v³/(324 n p⁸(1−p)²)),
    valid for 1 ≪ v ≪ n^{1/2}.

    Raises:
        errors.OutOfRange: If v ≤ 0
        errors.DegenerateP: If p is not strictly between 0 and 1

    Example:

    >>> e = triangle_deviation(150, 0.5, 2.0)
    >>> e.regime.value, 0 < e.prob < 1
    ('cumulant_moderate', True)
    """
    if not 0 < p < 1:
        raise errors.DegenerateP(f"triangle deviations need 0 < p < 1, got {p}")
    if not v > 0:
        raise errors.OutOfRange(f"v must be positive, got {v}")
    flags = []
    if v < 1:
        logging.warning(f"v={v} is below the window 1 ≪ v, the prefactor blows up")
        flags.append("below_window")
    if v > math.sqrt(n):
        logging.warning(f"v={v} is above the window v ≪ n^(1/2)={math.sqrt(n):.4g}")
        flags.append("above_window")
    q = p**5 * (1 - p)
    leading = math.sqrt(9 * q / (math.pi * v * v))
    rate = v * v / (36 * q) - (7 - 8 * p) * v**3 / (324 * n * p**8 * (1 - p) ** 2)
    return deviation_engine.build_estimate(deviation_engine.Regime.CUMULANT_MODERATE, rate, leading, 1.0, flags)


def triangle_tail_mc(
    n: int,
    p: float,
    v: float,
    trials: int,
    seed: int | None = None,
    cfg: config.Config = config.Config(),
) -> models.Comparison:
    """Compares `triangle_deviation` with the empirical tail over `trials` samples of G(n, p)."""
    estimate = triangle_deviation(n, p, v)
    counts = mc_counts(n, PatternGraph.from_name("triangle"), p, trials, seed, cfg)
    tail = float((counts >= triangle_threshold(n, p, v)).mean())
    return models.Comparison(
        model="er_triangle",
        params={"n": n, "p": p, "v": v, "trials": trials},
        estimate=estimate,
        oracle=tail,
        oracle_kind=models.OracleKind.MONTE_CARLO,
        oracle_stderr=math.sqrt(tail * (1 - tail) / trials),
    )


def _indicator_cumulant_terms(edge_sets: typing.Sequence[frozenset]) -> collections.Counter:
    """Joint cumulant of the copy indicators as {exponent of p: coefficient}."""
    terms: collections.Counter = collections.Counter()
    for partition in partition_combinatorics.set_partitions(len(edge_sets)):
        exponent = sum(len(frozenset().union(*(edge_sets[i] for i in block))) for block in partition.blocks)
        terms[exponent] += partition_combinatorics.mobius(partition)
    return terms


def _overlap_connected(edge_sets: typing.Sequence[frozenset]) -> bool:
    reached = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in range(len(edge_sets)):
            if j not in reached and edge_sets[i] & edge_sets[j]:
                reached.add(j)
                frontier.append(j)
    return len(reached) == len(edge_sets)


@functools.lru_cache(maxsize=64)
def _overlap_class(edges: tuple[tuple[int, int], ...], k: int, r: int, s: int) -> tuple[tuple[int, int], ...]:
    """Σ of joint cumulants over r-tuples of arrangements covering exactly s labeled vertices."""
    placements = []
    for image in itertools.permutations(range(s), k):
        placements.append(
            (frozenset(tuple(sorted((image[u], image[v]))) for u, v in edges), frozenset(image))
        )
    if len(placements) ** r > MAX_OVERLAP_TUPLES:
        raise errors.TooLarge(f"{len(placements)}^{r} overlap configurations on {s} vertices")
    total: collections.Counter = collections.Counter()
    for combo in itertools.product(placements, repeat=r):
        if len(frozenset().union(*(verts for _, verts in combo))) != s:
            continue
        edge_sets = [e for e, _ in combo]
        if not _overlap_connected(edge_sets):
            continue
        total.update(_indicator_cumulant_terms(edge_sets))
    return tuple(sorted((e, c) for e, c in total.items() if c != 0))


def overlap_cumulant(n: int, pattern: PatternGraph, p: Probability, r: int) -> fractions.Fraction:
    """r-th cumulant of X_γ in G(n, p) at any n, summed over overlap classes.

    r-tuples of arrangements whose edge sets do not form a connected overlap
    graph contribute nothing. The connected ones cover at most
    k + (r−1)(k−2) vertices, and each class on s vertices occurs C(n, s) times.

    Example: the edge count, κ² = 2n(n−1)p(1−p)

    >>> overlap_cumulant(10, PatternGraph.from_name("edge"), fractions.Fraction(1, 3), 2)
    Fraction(40, 1)
    """
    p = _fraction(p)
    if r < 1:
        raise errors.OutOfRange(f"cumulant order must be positive, got {r}")
    total = fractions.Fraction(0)
    for s in range(pattern.k, pattern.cumulant_degree(r) + 1):
        if s > n:
            break
        for exponent, coefficient in _overlap_class(pattern.edges, pattern.k, r, s):
            total += math.comb(n, s) * coefficient * p**exponent
    return total


def overlap_kappa2(n: int, pattern: PatternGraph, p: Probability) -> fractions.Fraction:
    """κ² of X_γ at any n from the overlap classes."""
    return overlap_cumulant(n, pattern, p, 2)


def subgraph_cumulant_bound(n: int, k: int, r: int) -> int:
    """2^{r−1} r^{r−2} n^k (k⁴ n^{k−2})^{r−1}, bound on |κ^(r)(X_γ)| for a pattern on k vertices.

    Example:

    >>> subgraph_cumulant_bound(6, 3, 2)
    209952
    """
    if r < 2:
        raise errors.OutOfRange(f"the bound is stated for r ≥ 2, got {r}")
    return 2 ** (r - 1) * r ** (r - 2) * n**k * (k**4 * n ** (k - 2)) ** (r - 1)


PolynomialFit = partition_combinatorics.PolynomialFit


def polynomiality_check(
    pattern: PatternGraph,
    p: Probability,
    n_list: typing.Sequence[int],
    r: int = 2,
    oracle: str = "bruteforce",
) -> PolynomialFit:
    """Interpolates κ^(r)(X_γ) as a polynomial in n and checks it on held-out points.

    The first degree+1 values of n fit the polynomial of degree
    k + (r−1)(k−2); every further n is held out.

    Args:
        oracle (str, optional): "bruteforce" (n ≤ 6) or "overlap". Defaults to "bruteforce".

    Raises:
        errors.InsufficientPoints: If fewer than degree+2 distinct n are given

    Example: the edge count has κ² = 2n(n−1)p(1−p)

    >>> fit = polynomiality_check(PatternGraph.from_name("edge"), fractions.Fraction(1, 2), [2, 3, 4, 5])
    >>> fit.leading, fit.residuals
    (Fraction(1, 2), {5: Fraction(0, 1)})
    """
    degree = pattern.cumulant_degree(r)
    points = sorted(set(n_list))
    if len(points) < degree + 2:
        raise errors.InsufficientPoints(
            f"a degree {degree} fit with a held-out point needs {degree + 2} values of n, got {len(points)}"
        )
    p = _fraction(p)

    def value(n: int) -> fractions.Fraction:
        if oracle == "overlap":
            return overlap_cumulant(n, pattern, p, r)
        return exact_cumulants_bruteforce(n, pattern, p, orders=r).kappa[r - 1]

    return partition_combinatorics.fit_polynomial({n: value(n) for n in points}, degree, r)


def sample_graph(n: int, p: float, seed: int) -> nx.Graph:
    """A G(n, p) sample. The same (n, p, seed) always gives the same graph."""
    return nx.gnp_random_graph(n, float(p), seed=seed)
