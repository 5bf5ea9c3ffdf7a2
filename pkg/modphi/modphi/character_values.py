"""
character_values
"""

import dataclasses
import fractions
import functools
import logging
import math
import typing

import numpy as np
import pandas as pd

import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.models as models
import modphi.partition_combinatorics as partition_combinatorics

Fraction = fractions.Fraction
Number = float | Fraction

MAX_TABLE_SIZE = 10
MAX_LIMIT_SIZE = 12
_SUM_TOLERANCE = 1e-12
_DEGENERATE_SIGMA2 = 1e-14


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def _parse_number(text: str) -> Number:
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return float(text)


@dataclasses.dataclass(frozen=True)
class ThomaParameter:
    """A point ω = (α, β) of the Thoma simplex.

    Integers and Fractions keep every derived quantity exact; a single float
    coordinate switches the whole computation to floating point.
    """

    alpha: tuple[Number, ...] = ()
    beta: tuple[Number, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        for name, seq in (("alpha", self.alpha), ("beta", self.beta)):
            for i, value in enumerate(seq):
                if value < 0:
                    raise errors.OutOfRange(f"{name} coordinates must be nonnegative, got {value}", index=i)
                if i and value > seq[i - 1]:
                    raise errors.OutOfRange(f"{name} must be non-increasing", index=i)
        total = sum(self.alpha) + sum(self.beta)
        if total > 1 + (0 if self.exact else _SUM_TOLERANCE):
            raise errors.OutOfRange(f"Σα + Σβ must be at most 1, got {total}")

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for v in self.alpha + self.beta)

    @property
    def gamma(self) -> Number:
        """1 − Σα − Σβ

        >>> ThomaParameter(alpha=(Fraction(1, 2),), beta=(Fraction(1, 4),)).gamma
        Fraction(1, 4)
        """
        return 1 - sum(self.alpha, Fraction(0)) - sum(self.beta, Fraction(0))

    @classmethod
    def from_text(cls, alpha: str | None, beta: str | None = None) -> "ThomaParameter":
        """Parses comma separated coordinates, e.g. "0.6,0.3" or "3/5,3/10".

        >>> ThomaParameter.from_text("3/5,3/10").alpha
        (Fraction(3, 5), Fraction(3, 10))
        >>> ThomaParameter.from_text("0.6", "").alpha
        (0.6,)
        """

        def parse(text: str | None) -> tuple[Number, ...]:
            if not text:
                return ()
            return tuple(_parse_number(part) for part in text.split(",") if part.strip())

        return cls(alpha=parse(alpha), beta=parse(beta))

    def as_dict(self) -> dict:
        return {
            "alpha": ",".join(str(a) for a in self.alpha),
            "beta": ",".join(str(b) for b in self.beta),
            "gamma": str(self.gamma),
        }


@functools.total_ordering
@dataclasses.dataclass(frozen=True)
class Partition:
    """An integer partition λ, parts non-increasing and positive."""

    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        for i, part in enumerate(self.parts):
            if part < 1:
                raise errors.OutOfRange(f"parts must be positive, got {part}", index=i)
            if i and part > self.parts[i - 1]:
                raise errors.OutOfRange("parts must be non-increasing", index=i)

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)

    def __lt__(self, other: "Partition") -> bool:
        return (self.size, self.parts) < (other.size, other.parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def z(self) -> int:
        """z_μ = Π i^{m_i} m_i!, the centralizer size of the cycle type μ.

        >>> Partition((2, 2, 1)).z
        8
        """
        value = 1
        for part in set(self.parts):
            m = self.parts.count(part)
            value *= part**m * math.factorial(m)
        return value

    def conjugate(self) -> "Partition":
        """
        >>> Partition((3, 1)).conjugate()
        Partition(parts=(2, 1, 1))
        """
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def padded(self, n: int) -> "Partition":
        """μ ⊔ 1^{n−|μ|}, the cycle type of μ seen as a permutation of S(n).

        >>> Partition((2,)).padded(4)
        Partition(parts=(2, 1, 1))
        """
        if n < self.size:
            raise errors.OutOfRange(f"a cycle type of size {self.size} does not fit in S({n})")
        return Partition(self.parts + (1,) * (n - self.size))

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        return cls(tuple(sorted((int(p) for p in text.split(",") if p.strip()), reverse=True)))


@functools.cache
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    result = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            result.append((first,) + rest)
    return tuple(result)


def partitions(n: int) -> typing.Iterator[Partition]:
    """All partitions of n, in decreasing lexicographic order.

    >>> [str(p) for p in partitions(4)]
    ['4', '3,1', '2,2', '2,1,1', '1,1,1,1']
    """
    if n < 0:
        raise errors.OutOfRange(f"n must be nonnegative, got {n}")
    for parts in _partitions(n, n):
        yield Partition(parts)


def power_sum(omega: ThomaParameter, k: int) -> Number:
    """p_k(ω) = Σα_i^k + (−1)^{k−1} Σβ_i^k, with p₁(ω) = 1.

    Examples:

    >>> omega = ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))
    >>> power_sum(omega, 1), power_sum(omega, 2)
    (Fraction(1, 1), Fraction(9, 20))
    >>> power_sum(ThomaParameter(beta=(Fraction(1, 2),)), 2)
    Fraction(-1, 4)
    """
    if k < 1:
        raise errors.OutOfRange(f"k must be at least 1, got {k}")
    start = Fraction(0) if omega.exact else 0.0
    if k == 1:
        return start + 1
    return sum((a**k for a in omega.alpha), start) + (-1) ** (k - 1) * sum((b**k for b in omega.beta), start)


def tau_omega(omega: ThomaParameter, mu: Partition) -> Number:
    """τ_ω of a permutation of cycle type μ, the product of p_{μ_i}(ω).

    >>> omega = ThomaParameter(alpha=(Fraction(1, 2),))
    >>> tau_omega(omega, Partition((2, 2))), tau_omega(omega, Partition((1, 1, 1)))
    (Fraction(1, 16), Fraction(1, 1))
    """
    value = Fraction(1) if omega.exact else 1.0
    for part in mu.parts:
        value *= power_sum(omega, part)
    return value


@functools.cache
def _murnaghan_nakayama(beta: frozenset[int], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1
    r, rest = mu[0], mu[1:]
    total = 0
    for b in beta:
        if b - r < 0 or b - r in beta:
            continue
        # each bead jumped over flips the sign of the rim hook
        height = sum(1 for c in beta if b - r < c < b)
        total += (-1) ** height * _murnaghan_nakayama((beta - {b}) | {b - r}, rest)
    return total


def character(lam: Partition, mu: Partition) -> int:
    """χ^λ(μ), the irreducible character of S(|λ|) on the cycle type μ.

    Evaluated by the Murnaghan–Nakayama rule on the beta-set of λ.

    Raises:
        errors.OutOfRange: If |λ| ≠ |μ|

    Example:

    >>> character(Partition((2, 1)), Partition((3,)))
    -1
    >>> character(Partition((2, 1)), Partition((1, 1, 1)))
    2
    """
    if lam.size != mu.size:
        raise errors.OutOfRange(f"|λ| = {lam.size} differs from |μ| = {mu.size}")
    ell = lam.length
    beta = frozenset(part + ell - 1 - i for i, part in enumerate(lam.parts))
    return _murnaghan_nakayama(beta, mu.parts)


def dimension(lam: Partition) -> int:
    """dim λ = n!/Π hook lengths.

    >>> dimension(Partition((3, 2))), dimension(Partition((2, 2, 1)))
    (5, 5)
    """
    conj = lam.conjugate().parts
    hooks = 1
    for i, row in enumerate(lam.parts):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(lam.size) // hooks


def _check_size(n: int):
    if n > MAX_TABLE_SIZE:
        raise errors.TooLarge(f"character tables are built for n ≤ {MAX_TABLE_SIZE}, got {n}")
    if n < 1:
        raise errors.OutOfRange(f"n must be positive, got {n}")


@dataclasses.dataclass(frozen=True, eq=False)
class CharacterTable:
    n: int
    partitions: tuple[Partition, ...]
    values: np.ndarray
    """values[i, j] = χ^{partitions[i]}(partitions[j])"""

    def as_frame(self) -> pd.DataFrame:
        labels = [str(p) for p in self.partitions]
        return pd.DataFrame(self.values, index=labels, columns=labels)


@functools.cache
def character_table(n: int) -> CharacterTable:
    """The character table of S(n). Rows are irreducibles, columns cycle types.

    Raises:
        errors.TooLarge: If n > 10

    Example:

    >>> character_table(3).values.tolist()
    [[1, 1, 1], [-1, 0, 2], [1, -1, 1]]
    """
    _check_size(n)
    parts = tuple(partitions(n))
    values = np.array([[character(lam, mu) for mu in parts] for lam in parts], dtype=np.int64)
    logging.debug(f"built the character table of S({n}) with {len(parts)} classes")
    return CharacterTable(n=n, partitions=parts, values=values)


def central_measure(omega: ThomaParameter, n: int) -> dict[Partition, Number]:
    """The central measure P_{ω,n} on partitions of n.

    P[λ] = dim λ · Σ_μ z_μ^{−1} p_μ(ω) χ^λ(μ).

    Raises:
        errors.TooLarge: If n > 10
        errors.NotPositive: If a mass is below −1e−12

    Example: on S(2), P[(2)] = (1 + p₂)/2

    >>> omega = ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))
    >>> {str(lam): mass for lam, mass in central_measure(omega, 2).items()}
    {'2': Fraction(29, 40), '1,1': Fraction(11, 40)}
    """
    table = character_table(n)
    weights = [tau_omega(omega, mu) / mu.z for mu in table.partitions]
    measure = {}
    for i, lam in enumerate(table.partitions):
        mass = dimension(lam) * sum(w * int(chi) for w, chi in zip(weights, table.values[i]))
        if mass < -_SUM_TOLERANCE:
            raise errors.NotPositive(f"P[{lam}] = {mass} is negative; ω is not a valid Thoma parameter")
        measure[lam] = mass
    return measure


def measure_frame(measure: typing.Mapping[Partition, Number]) -> pd.DataFrame:
    return pd.DataFrame(
        {"partition": [str(lam) for lam in measure], "mass": [float(m) for m in measure.values()]}
    )


def _random_character(omega: ThomaParameter, mu: Partition, n: int) -> list[tuple[Number, Number]]:
    """(P[λ], χ̂^λ(μ)) for every λ ⊢ n."""
    measure = central_measure(omega, n)
    rho = mu.padded(n)
    column = character_table(n).partitions.index(rho)
    table = character_table(n).values
    result = []
    for i, (lam, mass) in enumerate(measure.items()):
        chi, dim = int(table[i, column]), dimension(lam)
        result.append((mass, Fraction(chi, dim) if omega.exact else chi / dim))
    return result


def cycle_type_cumulants(omega: ThomaParameter, mu: Partition, n: int, r: int) -> list[Number]:
    """κ¹…κ^r of X_μ^(n) = χ̂^λ(μ) under λ ~ P_{ω,n}, by direct summation over λ ⊢ n.

    Example: the mean is τ_ω(μ)

    >>> omega = ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))
    >>> cycle_type_cumulants(omega, Partition((2,)), 4, 1)
    [Fraction(9, 20)]
    """
    _check_size(n)
    pairs = _random_character(omega, mu, n)
    moments = [sum(mass * x**j for mass, x in pairs) for j in range(1, r + 1)]
    return partition_combinatorics.moments_to_cumulants(moments)


def cycle_type_cumulant_exact(omega: ThomaParameter, mu: Partition, n: int, r: int) -> Number:
    return cycle_type_cumulants(omega, mu, n, r)[r - 1]


def char_cumulants_exact(omega: ThomaParameter, k: int, n: int, r: int) -> Number:
    """κ^(r) of the random character value on a k-cycle.

    Example: a one-row point mass carries no fluctuation

    >>> char_cumulants_exact(ThomaParameter(alpha=(1,)), 3, 6, 2)
    Fraction(0, 1)
    """
    return cycle_type_cumulant_exact(omega, Partition((k,)), n, r)


def joint_character_cumulant(omega: ThomaParameter, mus: typing.Sequence[Partition], n: int) -> Number:
    """κ(X_{μ¹}, …, X_{μ^r}) of random character values on one random λ.

    Example: two identical arguments give the variance

    >>> omega = ThomaParameter(alpha=(Fraction(1, 2), Fraction(1, 4)))
    >>> mu = Partition((2,))
    >>> joint_character_cumulant(omega, [mu, mu], 5) == cycle_type_cumulant_exact(omega, mu, 5, 2)
    True
    """
    _check_size(n)
    columns = [_random_character(omega, mu, n) for mu in mus]
    masses = [mass for mass, _ in columns[0]]

    @functools.cache
    def moment(block: tuple[int, ...]) -> Number:
        total = 0
        for s, mass in enumerate(masses):
            total += mass * math.prod(columns[i][s][1] for i in block)
        return total

    total = 0
    for pi in partition_combinatorics.set_partitions(len(mus)):
        total += partition_combinatorics.mobius(pi) * math.prod(moment(tuple(b)) for b in pi.blocks)
    return total


def prop_bound_single(k: int, n: int, r: int) -> Fraction:
    """r^{r−2} (2k²/n)^{r−1}, bound on |κ^(r)| of the character value on a k-cycle.

    >>> prop_bound_single(2, 8, 3)
    Fraction(3, 1)
    """
    return Fraction(r) ** (r - 2) * Fraction(2 * k * k, n) ** (r - 1)


def prop_bound_joint(ks: typing.Sequence[int], n: int) -> Fraction:
    """k₁⋯k_r (r·max k_i)^{r−2} (2/n)^{r−1}, bound on joint cumulants of character values.

    >>> prop_bound_joint([2, 3], 6)
    Fraction(2, 1)
    """
    r = len(ks)
    return math.prod(ks) * Fraction(r * max(ks)) ** (r - 2) * Fraction(2, n) ** (r - 1)


def character_polynomiality(
    omega: ThomaParameter,
    mu: Partition,
    n_list: typing.Sequence[int],
    r: int = 2,
) -> partition_combinatorics.PolynomialFit:
    """Interpolates (n↓k)^r κ^(r)(X_μ^(n)) in n, k = |μ|, and checks held-out points.

    The interpolant has degree rk − (r−1); its leading coefficient is the
    limit of n^{r−1} κ^(r).

    Raises:
        errors.DomainError: If ω is not rational
        errors.InsufficientPoints: If fewer than degree+2 values of n are given
    """
    if not omega.exact:
        raise errors.DomainError("polynomiality is checked on rational Thoma parameters only")
    k = mu.size
    degree = r * k - (r - 1)
    values = {}
    for n in sorted(set(n_list)):
        if n < k:
            raise errors.OutOfRange(f"n = {n} is smaller than |μ| = {k}")
        falling = math.perm(n, k)
        values[n] = falling**r * cycle_type_cumulant_exact(omega, mu, n, r)
    return partition_combinatorics.fit_polynomial(values, degree, r)


def sigma2_L_char(omega: ThomaParameter, k: int) -> tuple[Number, Number]:
    """Limits σ² of n·κ² and L of n²·κ³ for the character value on a k-cycle.

    σ² = k²(p_{2k−1} − p_k²),
    L = k³((3k−2)p_{3k−2} − (6k−3)p_{2k−1}p_k + (3k−1)p_k³).

    Example:

    >>> sigma2_L_char(ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10))), 2)
    (Fraction(81, 500), Fraction(891, 5000))
    """
    if k < 2:
        raise errors.OutOfRange(f"k must be at least 2, got {k}")
    p_k = power_sum(omega, k)
    p_2k = power_sum(omega, 2 * k - 1)
    p_3k = power_sum(omega, 3 * k - 2)
    sigma2 = k * k * (p_2k - p_k * p_k)
    L = k**3 * ((3 * k - 2) * p_3k - (6 * k - 3) * p_2k * p_k + (3 * k - 1) * p_k**3)
    if sigma2 <= _DEGENERATE_SIGMA2:
        logging.warning(f"σ² = {sigma2} vanishes for k={k}; the character value is degenerate at this ω")
    return sigma2, L


def _without(parts: typing.Sequence[int], *indices: int) -> list[int]:
    return [p for i, p in enumerate(parts) if i not in indices]


def _join(mu: typing.Sequence[int], i: int, nu: typing.Sequence[int], j: int) -> list[int]:
    """(μ⋈ν)(i,j) = μ∖μ_i ⊔ ν∖ν_j ⊔ {μ_i+ν_j−1}"""
    return _without(mu, i) + _without(nu, j) + [mu[i] + nu[j] - 1]


def _second_limit(p: typing.Callable, mu: tuple[int, ...], nu: tuple[int, ...]) -> Number:
    base = p(mu + nu)
    total = 0
    for i, a in enumerate(mu):
        for j, b in enumerate(nu):
            total += a * b * (p(_join(mu, i, nu, j)) - base)
    return total


def _third_limit(p: typing.Callable, mu: tuple[int, ...], nu: tuple[int, ...], delta: tuple[int, ...]) -> Number:
    base = p(mu + nu + delta)
    total = 0
    for x, y, z in ((mu, nu, delta), (nu, delta, mu), (delta, mu, nu)):
        for i, xi in enumerate(x):
            for j, yj in enumerate(y):
                # y_j meets x_i and z_k through distinct points
                for k, zk in enumerate(z):
                    merged = _without(x, i) + _without(y, j) + _without(z, k) + [xi + yj + zk - 2]
                    total += (
                        xi * yj * (yj - 1) * zk
                        * (base + p(merged) - p(_join(x, i, y, j) + list(z)) - p(_join(y, j, z, k) + list(x)))
                    )
                # two distinct cycles of y, one meeting x_i, one meeting z_l
                for m, ym in enumerate(y):
                    if m == j:
                        continue
                    for l, zl in enumerate(z):
                        merged = (
                            _without(x, i) + _without(y, j, m) + _without(z, l) + [xi + yj - 1, ym + zl - 1]
                        )
                        total += (
                            xi * yj * ym * zl
                            * (base + p(merged) - p(_join(x, i, y, j) + list(z)) - p(_join(y, m, z, l) + list(x)))
                        )
    # one point shared by all three
    for i, a in enumerate(mu):
        for j, b in enumerate(nu):
            for k, c in enumerate(delta):
                merged = _without(mu, i) + _without(nu, j) + _without(delta, k) + [a + b + c - 2]
                total += (
                    a * b * c
                    * (
                        2 * base
                        + p(merged)
                        - p(_join(mu, i, nu, j) + list(delta))
                        - p(_join(nu, j, delta, k) + list(mu))
                        - p(_join(mu, i, delta, k) + list(nu))
                    )
                )
    return total


def general_mu_limits(omega: ThomaParameter, mu: Partition) -> tuple[Number, Number]:
    """Limits σ²(μ) of n·κ² and L(μ) of n²·κ³ for the character value on cycle type μ.

    Raises:
        errors.TooLarge: If |μ| > 12

    Examples:

    >>> omega = ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))
    >>> general_mu_limits(omega, Partition((2,))) == sigma2_L_char(omega, 2)
    True
    >>> general_mu_limits(omega, Partition((1,)))
    (Fraction(0, 1), Fraction(0, 1))
    """
    if mu.size > MAX_LIMIT_SIZE:
        raise errors.TooLarge(f"limits are summed for |μ| ≤ {MAX_LIMIT_SIZE}, got {mu.size}")

    @functools.cache
    def p_sorted(parts: tuple[int, ...]) -> Number:
        return tau_omega(omega, Partition(parts))

    def p(parts: typing.Iterable[int]) -> Number:
        return p_sorted(tuple(sorted(parts, reverse=True)))

    sigma2 = _second_limit(p, mu.parts, mu.parts)
    L = _third_limit(p, mu.parts, mu.parts, mu.parts)
    if sigma2 <= _DEGENERATE_SIGMA2:
        logging.warning(f"σ²({mu}) = {sigma2} vanishes; no mod-Gaussian convergence at this ω")
    return sigma2, L


def character_deviation(omega: ThomaParameter, k: int, n: int, x: float) -> deviation_engine.DeviationEstimate:
    """P[|X_k^(n) − p_k(ω)| ≥ x/√n] from the second and third cumulant limits.

    2 e^{−x²/2σ²}/√(2π x²/σ²) · cosh(L x³/(6 σ⁶ √n)), valid for 1 ≪ x ≪ n^{1/4}.

    Raises:
        errors.NonPositiveVariance: If σ² vanishes at ω

    Example:

    >>> e = character_deviation(ThomaParameter(alpha=(0.6, 0.3)), 2, 1000, 1.0)
    >>> str(e.regime), round(e.exponent_rate, 6)
    ('cumulant_moderate', 3.08642)
    """
    sigma2, L = sigma2_L_char(omega, k)
    model = deviation_engine.CumulantModel(alpha_n=float(n), beta_n=1.0, sigma2=float(sigma2), L=float(L))
    T = x * math.sqrt(n) / math.sqrt(model.sigma2)
    return deviation_engine.cumulant_moderate(model, T, tail=deviation_engine.Tail.TWO_SIDED)


def character_deviation_check(omega: ThomaParameter, k: int, n: int, x: float) -> models.Comparison:
    """Compares character_deviation with the exact two-sided tail at n ≤ 10."""
    estimate = character_deviation(omega, k, n, x)
    centre = float(power_sum(omega, k))
    threshold = x / math.sqrt(n)
    oracle = sum(
        float(mass)
        for mass, value in _random_character(omega, Partition((k,)), n)
        if abs(float(value) - centre) >= threshold - 1e-12
    )
    return models.Comparison(
        model="character",
        params={"k": k, "n": n, "x": x, **omega.as_dict()},
        estimate=estimate,
        oracle=oracle,
    )
