"""
partition_combinatorics
"""

import dataclasses
import fractions
import functools
import itertools
import logging
import math
import typing

import networkx as nx
import numpy as np
import sympy

import modphi.deviation_engine as deviation_engine
import modphi.errors as errors

Fraction = fractions.Fraction

MAX_VARIABLES = 9
MAX_SUBSET_EDGES = 24
MAX_RECURSION_EDGES = 40
MAX_TUTTE_EDGES = 20
MAX_CROSS_CHECK_EDGES = 12
MAX_SAMPLE_SPACE = 2**20


@dataclasses.dataclass(frozen=True)
class SetPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if any(len(b) == 0 for b in blocks):
            raise errors.OutOfRange(f"blocks must be non-empty: {self.blocks}")
        elements = [i for b in blocks for i in b]
        if sorted(elements) != list(range(len(elements))):
            raise errors.OutOfRange(f"blocks must partition 0..n−1 disjointly: {self.blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        for index, block in enumerate(self.blocks):
            if i in block:
                return index
        raise errors.OutOfRange(f"{i} is not in the ground set of size {self.n}")


def set_partitions(n: int) -> typing.Iterator[SetPartition]:
    """Enumerates the set partitions of {0, …, n−1} in restricted-growth-string order.

    Example:

    >>> [p.blocks for p in set_partitions(3)]
    [((0, 1, 2),), ((0, 1), (2,)), ((0, 2), (1,)), ((0,), (1, 2)), ((0,), (1,), (2,))]
    """
    if n == 0:
        yield SetPartition(())
        return

    def _grow(prefix: list[int], maximum: int) -> typing.Iterator[list[int]]:
        if len(prefix) == n:
            yield prefix
            return
        for label in range(maximum + 2):
            yield from _grow(prefix + [label], max(maximum, label))

    for rgs in _grow([0], 0):
        blocks: dict[int, list[int]] = {}
        for i, label in enumerate(rgs):
            blocks.setdefault(label, []).append(i)
        yield SetPartition(tuple(tuple(b) for b in blocks.values()))


def refines(pi: SetPartition, sigma: SetPartition) -> bool:
    """Whether every block of pi lies inside a block of sigma.

    >>> refines(SetPartition(((0,), (1,), (2,))), SetPartition(((0, 1), (2,))))
    True
    >>> refines(SetPartition(((0, 1), (2,))), SetPartition(((0,), (1, 2))))
    False
    """
    if pi.n != sigma.n:
        return False
    return all(len({sigma.block_of(i) for i in block}) == 1 for block in pi.blocks)


def mobius(partition: SetPartition) -> int:
    """Möbius function μ(π, {[n]}) = (−1)^{#π−1} (#π−1)! of the partition lattice.

    Examples:

    >>> mobius(SetPartition(((0, 1, 2),)))
    1
    >>> mobius(SetPartition(((0,), (1,), (2,))))
    2
    >>> mobius(SetPartition(((0, 1), (2,))))
    -1
    """
    k = len(partition)
    return (-1) ** (k - 1) * math.factorial(k - 1)


def _check_variables(r: int):
    if r > MAX_VARIABLES:
        raise errors.TooManyVariables(
            f"at most {MAX_VARIABLES} variables are supported, got {r}"
        )


def moments_to_cumulants(moments: typing.Sequence) -> list:
    """Univariate cumulants κ₁…κ_r from moments m₁…m_r by Möbius inversion.

    Example: Bernoulli(1/2) has all moments 1/2

    >>> moments_to_cumulants([Fraction(1, 2)] * 4)
    [Fraction(1, 2), Fraction(1, 4), Fraction(0, 1), Fraction(-1, 8)]
    """
    _check_variables(len(moments))
    cumulants = []
    for r in range(1, len(moments) + 1):
        total = 0
        for pi in set_partitions(r):
            total += mobius(pi) * math.prod(moments[len(b) - 1] for b in pi.blocks)
        cumulants.append(total)
    return cumulants


def cumulants_to_moments(cumulants: typing.Sequence) -> list:
    """Moments m₁…m_r from cumulants κ₁…κ_r, m_r = Σ_π Π_B κ_{|B|}.

    >>> cumulants_to_moments([0, 1, 0, 0])
    [0, 1, 0, 3]
    """
    _check_variables(len(cumulants))
    return [
        sum(math.prod(cumulants[len(b) - 1] for b in pi.blocks) for pi in set_partitions(r))
        for r in range(1, len(cumulants) + 1)
    ]


Outcome = tuple[Fraction, tuple]


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class DependencyFamily:
    N: int
    graph: nx.Graph
    """Dependency graph on the vertices 0..N−1."""

    outcomes: tuple[Outcome, ...]
    """Finite sample space: (probability, values of Y_0..Y_{N−1})."""

    A: Fraction
    """Uniform bound on |Y_α|."""

    _cache: dict = dataclasses.field(default_factory=dict, repr=False)

    def __post_init__(self):
        total = sum(p for p, _ in self.outcomes)
        if total != 1:
            raise errors.OutOfRange(f"outcome probabilities sum to {total}, not 1")
        if any(len(values) != self.N for _, values in self.outcomes):
            raise errors.OutOfRange(f"every outcome must carry {self.N} values")
        if set(self.graph.nodes) != set(range(self.N)):
            raise errors.OutOfRange(f"dependency graph must have the vertices 0..{self.N - 1}")

    @property
    def max_degree(self) -> int:
        return max((d for _, d in self.graph.degree), default=0)

    @functools.cached_property
    def sum_law(self) -> dict[Fraction, Fraction]:
        """Law of Σ Y_α as value → probability."""
        law: dict[Fraction, Fraction] = {}
        for p, values in self.outcomes:
            s = sum(values, Fraction(0))
            law[s] = law.get(s, Fraction(0)) + p
        return law

    def moment(self, indices: typing.Iterable[int]) -> Fraction:
        """E[Π_{i∈indices} Y_i] for a multiset of indices."""
        key = tuple(sorted(indices))
        if key not in self._cache:
            self._cache[key] = sum(
                (p * math.prod(values[i] for i in key) for p, values in self.outcomes),
                Fraction(0),
            )
        return self._cache[key]

    def scaled(self, index: int, c) -> "DependencyFamily":
        """The family with Y_index replaced by c·Y_index."""
        outcomes = tuple(
            (p, tuple(v * c if i == index else v for i, v in enumerate(values)))
            for p, values in self.outcomes
        )
        return DependencyFamily(
            N=self.N, graph=self.graph, outcomes=outcomes, A=max(self.A, abs(c) * self.A)
        )


def _product_space(ps: typing.Sequence[Fraction]) -> list[tuple[Fraction, tuple[int, ...]]]:
    """All outcomes of independent Bernoulli(p_j) coins with their probabilities."""
    space = []
    for bits in itertools.product((0, 1), repeat=len(ps)):
        weight = math.prod((p if bit else 1 - p) for p, bit in zip(ps, bits))
        if weight:
            space.append((Fraction(weight), bits))
    return space


def _check_space(coins: int):
    if 2**coins > MAX_SAMPLE_SPACE:
        raise errors.TooLarge(f"sample space 2^{coins} exceeds {MAX_SAMPLE_SPACE}")


def independent_bernoulli_family(ps: typing.Sequence, centered: bool = False) -> DependencyFamily:
    """Independent Y_i ~ Bernoulli(p_i), optionally centered; the graph has no edges."""
    ps = [Fraction(p) for p in ps]
    _check_space(len(ps))
    outcomes = tuple(
        (w, tuple(Fraction(b) - (p if centered else 0) for b, p in zip(bits, ps)))
        for w, bits in _product_space(ps)
    )
    graph = nx.empty_graph(len(ps))
    return DependencyFamily(N=len(ps), graph=graph, outcomes=outcomes, A=Fraction(1))


def m_dependent_family(N: int, m: int, p) -> DependencyFamily:
    """Sliding-window products Y_i = ξ_i ξ_{i+1} ⋯ ξ_{i+m−1} of i.i.d. Bernoulli(p) coins.

    Y_i and Y_j are dependent exactly when |i − j| < m.
    """
    if m < 1 or N < 1:
        raise errors.OutOfRange(f"need N ≥ 1 and m ≥ 1, got N={N}, m={m}")
    p = Fraction(p)
    coins = N + m - 1
    _check_space(coins)
    outcomes = tuple(
        (w, tuple(Fraction(math.prod(bits[i : i + m])) for i in range(N)))
        for w, bits in _product_space([p] * coins)
    )
    graph = nx.empty_graph(N)
    graph.add_edges_from((i, j) for i in range(N) for j in range(i + 1, min(N, i + m)))
    return DependencyFamily(N=N, graph=graph, outcomes=outcomes, A=Fraction(1))


def clique_family(groups: typing.Sequence[typing.Sequence[int]], p, centered: bool = True) -> DependencyFamily:
    """Variables in one group are copies of the same Bernoulli(p) coin.

    Example: Y₀ = Y₁ = B − 1/2 and Y₂ an independent copy

    >>> f = clique_family([[0, 1], [2]], Fraction(1, 2))
    >>> f.N, sorted(f.graph.edges), f.max_degree
    (3, [(0, 1)], 1)
    """
    p = Fraction(p)
    N = sum(len(g) for g in groups)
    _check_space(len(groups))
    owner = {i: k for k, group in enumerate(groups) for i in group}
    if sorted(owner) != list(range(N)):
        raise errors.OutOfRange(f"groups must partition 0..{N - 1}: {groups}")
    shift = p if centered else 0
    outcomes = tuple(
        (w, tuple(Fraction(bits[owner[i]]) - shift for i in range(N)))
        for w, bits in _product_space([p] * len(groups))
    )
    graph = nx.empty_graph(N)
    for group in groups:
        graph.add_edges_from(itertools.combinations(sorted(group), 2))
    A = max(shift, 1 - shift)
    return DependencyFamily(N=N, graph=graph, outcomes=outcomes, A=Fraction(A))


def is_dependency_graph(family: DependencyFamily, splits: int = 20, seed: int = 0) -> bool:
    """Spot-checks factorization of moments over random separated index sets."""
    rng = np.random.default_rng(seed)
    vertices = list(range(family.N))
    for _ in range(splits):
        first = [v for v in vertices if rng.random() < 0.5]
        blocked = set(first) | {w for v in first for w in family.graph.neighbors(v)}
        second = [v for v in vertices if v not in blocked and rng.random() < 0.5]
        if not first or not second:
            continue
        if family.moment(first + second) != family.moment(first) * family.moment(second):
            logging.info(f"moments do not factor over {first} and {second}")
            return False
    return True


def joint_cumulant(family: DependencyFamily, indices: typing.Sequence[int]) -> Fraction:
    """Exact joint cumulant κ(Y_{i₁}, …, Y_{i_r}) = Σ_π μ(π) Π_B E[Π_{j∈B} Y_{i_j}].

    Indices may repeat.

    Raises:
        errors.TooManyVariables: If r > 9

    Examples:

    >>> f = independent_bernoulli_family([Fraction(1, 2), Fraction(1, 3)])
    >>> joint_cumulant(f, [0, 0])
    Fraction(1, 4)
    >>> joint_cumulant(f, [0, 1])
    Fraction(0, 1)
    """
    r = len(indices)
    _check_variables(r)
    total = Fraction(0)
    for pi in set_partitions(r):
        term = Fraction(mobius(pi))
        for block in pi.blocks:
            term *= family.moment(indices[j] for j in block)
            if term == 0:
                break
        total += term
    return total


def cumulant_bound(N: int, D: int, A, r: int) -> Fraction:
    """Dependency-graph bound 2^{r−1} r^{r−2} N (D+1)^{r−1} A^r on |κ^(r)(Σ Y_α)|.

    D is the maximal degree of the dependency graph.

    Examples:

    >>> cumulant_bound(3, 1, 1, 2)
    Fraction(12, 1)
    >>> cumulant_bound(5, 2, Fraction(1, 2), 1)
    Fraction(5, 2)
    """
    if r < 1:
        raise errors.OutOfRange(f"cumulant order must be positive, got {r}")
    return 2 ** (r - 1) * Fraction(r) ** (r - 2) * N * (D + 1) ** (r - 1) * Fraction(A) ** r


def joint_cumulant_bound(v1_size: int, degrees: typing.Sequence[int], A) -> Fraction:
    """Joint variant 2^{r−1} r^{r−2} |V₁| (D₂+1)⋯(D_r+1) A^r, r = 1 + len(degrees).

    >>> joint_cumulant_bound(3, [1], 1)
    Fraction(12, 1)
    """
    r = 1 + len(degrees)
    return (
        2 ** (r - 1)
        * Fraction(r) ** (r - 2)
        * v1_size
        * math.prod(d + 1 for d in degrees)
        * Fraction(A) ** r
    )


@dataclasses.dataclass(frozen=True, kw_only=True)
class BoundCheck:
    cumulant: Fraction
    bound: Fraction
    ok: bool


def verify_bound(family: DependencyFamily, r: int) -> BoundCheck:
    """Compares the exact κ^(r)(Σ Y_α) with `cumulant_bound`.

    Raises:
        errors.TooLarge: If the sample space has more than 2^20 outcomes

    Example:

    >>> check = verify_bound(clique_family([[0, 1], [2]], Fraction(1, 2)), 2)
    >>> check.cumulant, check.ok
    (Fraction(5, 4), True)
    """
    if len(family.outcomes) > MAX_SAMPLE_SPACE:
        raise errors.TooLarge(f"sample space of {len(family.outcomes)} outcomes is too large")
    _check_variables(r)
    law = family.sum_law
    moments = [sum((p * s**k for s, p in law.items()), Fraction(0)) for k in range(1, r + 1)]
    cumulant = moments_to_cumulants(moments)[r - 1]
    bound = cumulant_bound(family.N, family.max_degree, family.A, r)
    if abs(cumulant) > bound:
        logging.error(f"|κ^({r})| = {abs(cumulant)} exceeds the bound {bound}")
    return BoundCheck(cumulant=cumulant, bound=bound, ok=abs(cumulant) <= bound)


def sparse_graph_scheme(
    N_n: float, D_n: float, kappa2: float, kappa3: float
) -> deviation_engine.CumulantModel:
    """Packages the sparse dependency-graph scaling of X_n = Σ Y_α as a CumulantModel.

    Args:
        N_n (float): Number of variables
        D_n (float): Maximal degree plus one
        kappa2 (float): κ²(X_n/D_n)
        kappa3 (float): κ³(X_n/D_n)

    Raises:
        errors.NonPositiveVariance: If σ² = (D_n/N_n) κ²(X_n/D_n) ≤ 0

    Returns:
        deviation_engine.CumulantModel: α = N_n/D_n, β = D_n, σ² and L = (D_n/N_n) κ³(X_n/D_n)

    Example: i.i.d. centered Bernoulli(1/2) sums, D_n = 1

    >>> cm = sparse_graph_scheme(100, 1, 25.0, 0.0)
    >>> cm.alpha_n, cm.beta_n, cm.sigma2, cm.L
    (100.0, 1.0, 0.25, 0.0)
    """
    ratio = D_n / N_n
    if ratio > 0.5:
        logging.warning(f"D_n/N_n = {ratio} is not small, the scaling is not in its sparse regime")
    return deviation_engine.CumulantModel(
        alpha_n=float(N_n / D_n),
        beta_n=float(D_n),
        sigma2=float(ratio * kappa2),
        L=float(ratio * kappa3),
    )


@dataclasses.dataclass(frozen=True)
class MultiGraph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()
    """Edge multiset of unordered pairs (u ≤ v); loops are (v, v)."""

    def __post_init__(self):
        normalized = tuple(sorted((min(u, v), max(u, v)) for u, v in self.edges))
        for u, v in normalized:
            if u < 0 or v >= self.n:
                raise errors.OutOfRange(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
        object.__setattr__(self, "edges", normalized)

    @classmethod
    def from_edge_list(cls, edges: typing.Sequence[tuple[int, int]], n: int | None = None) -> "MultiGraph":
        if n is None:
            n = 1 + max((max(e) for e in edges), default=0)
        return cls(n, tuple(edges))

    @property
    def loops(self) -> int:
        return sum(1 for u, v in self.edges if u == v)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def is_connected(self) -> bool:
        if self.n <= 1:
            return self.n == 1
        return nx.is_connected(self.to_networkx())

    def delete(self, index: int) -> "MultiGraph":
        return MultiGraph(self.n, self.edges[:index] + self.edges[index + 1 :])

    def contract(self, index: int) -> "MultiGraph":
        """Merges the endpoints of edge `index`; parallel edges become loops."""
        u, v = self.edges[index]
        if u == v:
            return self.delete(index)

        def relabel(w: int) -> int:
            w = u if w == v else w
            return w - 1 if w > v else w

        rest = self.edges[:index] + self.edges[index + 1 :]
        return MultiGraph(self.n - 1, tuple((relabel(a), relabel(b)) for a, b in rest))

    def induced(self, block: typing.Sequence[int]) -> "MultiGraph":
        """H[block] with vertices renumbered in the order of `block`."""
        position = {v: i for i, v in enumerate(block)}
        return MultiGraph(
            len(block),
            tuple((position[u], position[v]) for u, v in self.edges if u in position and v in position),
        )

    def quotient(self, partition: SetPartition) -> "MultiGraph":
        """H/π: one vertex per block, edges inside a block become loops."""
        return MultiGraph(
            len(partition),
            tuple((partition.block_of(u), partition.block_of(v)) for u, v in self.edges),
        )

    def canonical_key(self) -> tuple[int, tuple[tuple[int, int], ...]]:
        """Edge multiset after relabeling vertices by iterated degree refinement.

        Equal keys imply isomorphic multigraphs; isomorphic graphs may still
        get different keys.
        """
        neighbors: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neighbors[u].append(v)
            if u != v:
                neighbors[v].append(u)
        colors = [len(nb) for nb in neighbors]
        for _ in range(2):
            signature = [(colors[v], tuple(sorted(colors[w] for w in neighbors[v]))) for v in range(self.n)]
            ranks = {s: i for i, s in enumerate(sorted(set(signature)))}
            colors = [ranks[s] for s in signature]
        order = sorted(range(self.n), key=lambda v: (colors[v], v))
        position = {v: i for i, v in enumerate(order)}
        edges = tuple(sorted(tuple(sorted((position[u], position[v]))) for u, v in self.edges))
        return self.n, edges


def _spans_connected(n: int, edges: typing.Iterable[tuple[int, int]]) -> bool:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    components = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            components -= 1
    return components == 1


def _F_by_subsets(H: MultiGraph) -> int:
    total = 0
    edges = H.edges
    for mask in range(1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        if _spans_connected(H.n, chosen):
            total += (-1) ** (len(chosen) - H.n + 1)
    return total


@functools.lru_cache(maxsize=1 << 16)
def _tutte(key: tuple[int, tuple[tuple[int, int], ...]], x: int, y: int) -> int:
    n, edges = key
    H = MultiGraph(n, edges)
    if not edges:
        return 1
    for index, (u, v) in enumerate(edges):
        if u == v:
            return y * _tutte(H.delete(index).canonical_key(), x, y)
    # an edge whose deletion disconnects is a bridge
    deleted = H.delete(0)
    contracted = H.contract(0).canonical_key()
    if not _spans_connected(n, deleted.edges):
        return x * _tutte(contracted, x, y)
    return _tutte(deleted.canonical_key(), x, y) + _tutte(contracted, x, y)


def tutte_point(H: MultiGraph, x: int, y: int) -> int:
    """Evaluates the Tutte polynomial T_H(x, y) by memoized deletion–contraction.

    T_H(1, 0) = F_H and T_H(1, 1) = ST_H.

    Raises:
        errors.Disconnected: If H is not connected
        errors.TooLarge: If H has more than 20 edges

    Examples:

    >>> K3 = MultiGraph(3, ((0, 1), (1, 2), (0, 2)))
    >>> tutte_point(K3, 1, 1), tutte_point(K3, 1, 0)
    (3, 2)
    """
    if len(H.edges) > MAX_TUTTE_EDGES:
        raise errors.TooLarge(f"Tutte evaluation supports at most {MAX_TUTTE_EDGES} edges, got {len(H.edges)}")
    if not H.is_connected():
        raise errors.Disconnected(f"graph on {H.n} vertices with edges {list(H.edges)} is disconnected")
    return _tutte(H.canonical_key(), x, y)


def F_functional(H: MultiGraph, method: str = "auto") -> int:
    """F_H = Σ over connected spanning edge sets E of (−1)^{|E|−|V(H)|+1}.

    Args:
        H (MultiGraph): Multigraph, loops allowed
        method (str, optional): "subsets", "recursion" or "auto", which
            enumerates subsets up to 24 edges. Defaults to "auto".

    Raises:
        errors.TooLarge: If the chosen method cannot handle the number of edges

    Examples:

    >>> F_functional(MultiGraph(1))
    1
    >>> F_functional(MultiGraph(2))
    0
    >>> F_functional(MultiGraph(3, ((0, 1), (1, 2), (0, 2))))
    2
    """
    if H.n == 0 or not H.is_connected():
        return 0
    edges = len(H.edges)
    if method == "auto":
        method = "subsets" if edges <= MAX_SUBSET_EDGES else "recursion"
    if method == "subsets":
        if edges > MAX_SUBSET_EDGES:
            raise errors.TooLarge(f"subset enumeration supports at most {MAX_SUBSET_EDGES} edges, got {edges}")
        return _F_by_subsets(H)
    if method == "recursion":
        if edges > MAX_RECURSION_EDGES:
            raise errors.TooLarge(f"deletion–contraction supports at most {MAX_RECURSION_EDGES} edges, got {edges}")
        return _tutte(H.canonical_key(), 1, 0)
    raise errors.OutOfRange(f"unknown method: {method}")


def spanning_tree_count(H: MultiGraph) -> int:
    """Number of spanning trees of H counted with edge multiplicity.

    Uses the exact determinant of a reduced weighted Laplacian; loops are
    ignored. Graphs with at most 12 edges are cross-checked with
    deletion–contraction.

    Examples:

    >>> spanning_tree_count(MultiGraph(1, ((0, 0), (0, 0))))
    1
    >>> spanning_tree_count(MultiGraph(2, ((0, 1),) * 4))
    4
    >>> spanning_tree_count(MultiGraph(3, ((0, 1),)))
    0
    """
    if H.n == 0:
        return 0
    if H.n == 1:
        return 1
    laplacian = sympy.zeros(H.n, H.n)
    for u, v in H.edges:
        if u == v:
            continue
        laplacian[u, u] += 1
        laplacian[v, v] += 1
        laplacian[u, v] -= 1
        laplacian[v, u] -= 1
    count = int(laplacian[1:, 1:].det())
    if len(H.edges) <= MAX_CROSS_CHECK_EDGES and count > 0:
        assert count == _tutte(H.canonical_key(), 1, 1), (H, count)
    return count


def bicolored_identity_check(H: MultiGraph) -> tuple[int, int]:
    """Both sides of 2^{r−1} ST_H = Σ_π ST_{H/π} Π_i ST_{H[π_i]}, r = |V(H)|.

    Raises:
        errors.TooLarge: If H has more than 9 vertices

    Examples:

    >>> bicolored_identity_check(MultiGraph(3, ((0, 1), (1, 2), (0, 2))))
    (12, 12)
    >>> bicolored_identity_check(MultiGraph(2, ((0, 1),)))
    (2, 2)
    """
    if H.n > MAX_VARIABLES:
        raise errors.TooLarge(f"identity check supports at most {MAX_VARIABLES} vertices, got {H.n}")
    lhs = 2 ** (H.n - 1) * spanning_tree_count(H)
    rhs = 0
    for pi in set_partitions(H.n):
        inside = 1
        for block in pi.blocks:
            inside *= spanning_tree_count(H.induced(block))
            if inside == 0:
                break
        if inside:
            rhs += spanning_tree_count(H.quotient(pi)) * inside
    return lhs, rhs


@dataclasses.dataclass(frozen=True, kw_only=True)
class PolynomialFit:
    r: int
    degree: int
    polynomial: sympy.Poly
    """Interpolating polynomial in n."""

    residuals: dict[int, Fraction]
    """Exact residual at each held-out n."""

    @property
    def leading(self) -> Fraction:
        """Coefficient of n^degree."""
        value = sympy.Rational(self.polynomial.coeff_monomial(self.polynomial.gen**self.degree))
        return Fraction(int(value.p), int(value.q))


def fit_polynomial(values: typing.Mapping[int, Fraction], degree: int, r: int) -> PolynomialFit:
    """Interpolates exact values of a cumulant on the first degree+1 values of n.

    Every further n is held out and its residual against the interpolant is
    reported.

    Raises:
        errors.InsufficientPoints: If fewer than degree+2 distinct n are given

    Example:

    >>> fit = fit_polynomial({n: Fraction(n * n) for n in range(1, 5)}, degree=2, r=1)
    >>> fit.leading, fit.residuals
    (Fraction(1, 1), {4: Fraction(0, 1)})
    """
    points = sorted(values)
    if len(points) < degree + 2:
        raise errors.InsufficientPoints(
            f"a degree {degree} fit with a held-out point needs {degree + 2} values of n, got {len(points)}"
        )
    n_sym = sympy.Symbol("n")
    fit_points = [(n, sympy.Rational(values[n].numerator, values[n].denominator)) for n in points[: degree + 1]]
    poly = sympy.Poly(sympy.interpolate(fit_points, n_sym), n_sym)
    residuals = {}
    for n in points[degree + 1 :]:
        fitted = sympy.Rational(poly.eval(n))
        residuals[n] = Fraction(values[n]) - Fraction(int(fitted.p), int(fitted.q))
    return PolynomialFit(r=r, degree=degree, polynomial=poly, residuals=residuals)
