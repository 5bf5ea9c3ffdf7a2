"""
models
"""

import cmath
import dataclasses
import enum
import fractions
import functools
import logging
import math
import typing

import numpy as np
import pandas as pd
import scipy.special
import scipy.stats

import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.limiting_functions as limiting_functions
import modphi.reference_laws as reference_laws
import modphi.util as util

_ZEROS_STREAM = 5
_ZEROS_BATCH = 256
_ZEROS_CUTOFF = 1e-18

_CYCLES_MAX = 10**6
_CYCLES_EXACT_MAX = 500
_ISING_MAX = 4000
_WPERM_MAX = 4000
_OMEGA_MAX = 10**8


@enum.unique
class OracleKind(util.StrEnum):
    EXACT = "exact"
    BRUTE_FORCE = "brute-force"
    MONTE_CARLO = "monte-carlo"


@dataclasses.dataclass(frozen=True, kw_only=True)
class Comparison:
    """An estimate paired with the value it is checked against."""

    model: str
    params: dict
    estimate: deviation_engine.DeviationEstimate
    oracle: float
    oracle_kind: OracleKind = OracleKind.EXACT
    oracle_stderr: float | None = None

    @property
    def ratio(self) -> float:
        """estimate/oracle, computed on the log scale so that tiny tails do not underflow.

        Example:

        >>> e = deviation_engine.DeviationEstimate(
        ...     regime=deviation_engine.Regime.CLT, log_prob=math.log(0.3), leading=0.3
        ... )
        >>> round(Comparison(model="m", params={}, estimate=e, oracle=0.2).ratio, 12)
        1.5
        """
        if self.oracle > 0:
            return math.exp(self.estimate.log_prob - math.log(self.oracle))
        return util.ratio(self.estimate.prob, self.oracle)


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class ExactDistribution:
    values: np.ndarray
    """Support points in increasing order."""

    masses: np.ndarray
    exact: tuple[fractions.Fraction, ...] | None = None
    """Rational masses aligned with `values`, when computed exactly."""

    def __post_init__(self):
        if self.values.shape != self.masses.shape:
            raise errors.InvalidLaw(
                f"{len(self.values)} support points but {len(self.masses)} masses"
            )
        if (self.masses < -1e-15).any():
            raise errors.NumericalError(f"negative mass {self.masses.min()}")
        total = math.fsum(self.masses)
        if abs(total - 1) > 1e-12:
            raise errors.NumericalError(f"masses sum to {total!r} instead of 1")

    def pmf(self, v: float) -> float:
        """P[X = v]

        Example:

        >>> d = cycles_exact(3, exact=True)
        >>> d.pmf(2), d.pmf(7)
        (0.5, 0.0)
        """
        i = int(np.searchsorted(self.values, v))
        if i < len(self.values) and self.values[i] == v:
            return float(self.masses[i])
        return 0.0

    def sf(self, v: float) -> float:
        """P[X ≥ v]"""
        return math.fsum(self.masses[self.values >= v])

    def cdf(self, v: float) -> float:
        """P[X ≤ v]"""
        return math.fsum(self.masses[self.values <= v])

    @property
    def mean(self) -> float:
        return math.fsum(self.values * self.masses)

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum((self.values - m) ** 2 * self.masses)

    def mgf(self, z: complex) -> complex:
        """E[e^{zX}] by direct summation."""
        return complex(np.sum(self.masses * np.exp(z * self.values)))

    def log_mgf(self, z: float) -> float:
        """log E[e^{zX}] for real z, safe for large |z X|."""
        positive = self.masses > 0
        return float(
            scipy.special.logsumexp(z * self.values[positive], b=self.masses[positive])
        )

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"value": self.values, "mass": self.masses})


@dataclasses.dataclass(frozen=True)
class SeriesRing:
    """Power series a_0 + a_1 t + … + a_M t^M truncated at order M.

    Coefficients that are all int or Fraction are handled exactly. Anything
    else goes through numpy in float or complex arithmetic.
    """

    coefficients: tuple

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, fractions.Fraction)) for c in self.coefficients)

    def __getitem__(self, n: int):
        return self.coefficients[n]

    def _array(self) -> np.ndarray:
        dtype = np.complex128 if any(isinstance(c, complex) for c in self.coefficients) else np.float64
        return np.array(self.coefficients, dtype=dtype)

    def truncate(self, order: int) -> "SeriesRing":
        return SeriesRing(self.coefficients[: order + 1])

    def __add__(self, other: "SeriesRing") -> "SeriesRing":
        order = min(self.order, other.order)
        return SeriesRing(tuple(a + b for a, b in zip(self.coefficients[: order + 1], other.coefficients)))

    def __mul__(self, other: "SeriesRing") -> "SeriesRing":
        """Truncated product.

        Example:

        >>> (SeriesRing((1, 1, 0)) * SeriesRing((1, 1, 0))).coefficients
        (1, 2, 1)
        """
        order = min(self.order, other.order)
        if self.exact and other.exact:
            return SeriesRing(
                tuple(
                    sum(self.coefficients[k] * other.coefficients[m - k] for k in range(m + 1))
                    for m in range(order + 1)
                )
            )
        product = np.convolve(self.truncate(order)._array(), other.truncate(order)._array())
        return SeriesRing(tuple(product[: order + 1].tolist()))

    def scale(self, c: complex) -> "SeriesRing":
        """Multiplies every coefficient by c, e.g. c = e^w in exp(e^w g(t))."""
        return SeriesRing(tuple(c * a for a in self.coefficients))

    def exp(self) -> "SeriesRing":
        """exp of a series without constant term, by n b_n = Σ_k k a_k b_{n−k}.

        Raises:
            errors.DomainError: If a_0 ≠ 0

        Example:

        >>> [str(c) for c in SeriesRing((0, 1, 0, 0, 0)).exp().coefficients]
        ['1', '1', '1/2', '1/6', '1/24']
        """
        if self.coefficients[0] != 0:
            raise errors.DomainError(f"series exponential needs a_0 = 0, got {self.coefficients[0]}")
        M = self.order
        if self.exact:
            ka = [k * fractions.Fraction(a) for k, a in enumerate(self.coefficients)]
            b = [fractions.Fraction(1)]
            for m in range(1, M + 1):
                b.append(sum(ka[k] * b[m - k] for k in range(1, m + 1)) / m)
            return SeriesRing(tuple(b))
        a = self._array()
        ka = a * np.arange(M + 1)
        b = np.zeros(M + 1, dtype=a.dtype)
        b[0] = 1
        for m in range(1, M + 1):
            b[m] = np.dot(ka[1 : m + 1], b[m - 1 :: -1]) / m
        return SeriesRing(tuple(b.tolist()))

    def log(self) -> "SeriesRing":
        """log of a series with a_0 = 1, by m b_m = m a_m − Σ_{k<m} k b_k a_{m−k}.

        Raises:
            errors.DomainError: If a_0 ≠ 1

        Example:

        >>> SeriesRing((1, 2, 1)).log().coefficients
        (Fraction(0, 1), Fraction(2, 1), Fraction(-1, 1))
        """
        if self.coefficients[0] != 1:
            raise errors.DomainError(f"series logarithm needs a_0 = 1, got {self.coefficients[0]}")
        a = self.coefficients
        zero = fractions.Fraction(0) if self.exact else 0.0
        b = [zero]
        for m in range(1, self.order + 1):
            s = sum((k * b[k] * a[m - k] for k in range(1, m)), zero)
            b.append(a[m] - s / m)
        return SeriesRing(tuple(b))


def _cycle_cutoff(n: int) -> int:
    return min(n, math.ceil(4 * math.log(n)) + 30)


@functools.lru_cache(maxsize=8)
def cycles_exact(n: int, exact: bool = False) -> ExactDistribution:
    """Exact law of the number of cycles of a uniform permutation of size n.

    The count is a sum of independent Bernoulli(1/i), i = 1..n. The float mode
    convolves them and drops the mass above 4 log n + 30, which is far below
    double precision. The exact mode uses the unsigned Stirling numbers of the
    first kind over n!.

    Args:
        n (int): Permutation size, 1 ≤ n ≤ 10⁶ (≤ 500 in exact mode)
        exact (bool, optional): Also compute the rational masses. Defaults to False.

    Raises:
        errors.OutOfRange: If n < 1
        errors.TooLarge: If n exceeds the mode's limit

    Returns:
        ExactDistribution: Masses over k = 0, 1, …

    Examples:

    >>> cycles_exact(1).pmf(1)
    1.0
    >>> [str(m) for m in cycles_exact(3, exact=True).exact]
    ['0', '1/3', '1/2', '1/6']
    """
    if n < 1:
        raise errors.OutOfRange(f"permutation size must be positive, got {n}")
    if n > _CYCLES_MAX:
        raise errors.TooLarge(f"cycle counts are computed up to n={_CYCLES_MAX}, got {n}")
    if exact:
        if n > _CYCLES_EXACT_MAX:
            raise errors.TooLarge(f"exact cycle counts are computed up to n={_CYCLES_EXACT_MAX}, got {n}")
        stirling = [0, 1]
        for i in range(2, n + 1):
            stirling = [(i - 1) * c + prev for c, prev in zip(stirling + [0], [0] + stirling)]
        total = math.factorial(n)
        rational = tuple(fractions.Fraction(c, total) for c in stirling)
        return ExactDistribution(
            values=np.arange(n + 1, dtype=np.float64),
            masses=np.array([float(m) for m in rational]),
            exact=rational,
        )

    k_max = _cycle_cutoff(n)
    p = np.zeros(k_max + 1)
    p[0] = 1.0
    for i in range(1, n + 1):
        q = 1.0 / i
        p[1:] = p[1:] * (1.0 - q) + p[:-1] * q
        p[0] *= 1.0 - q
    total = math.fsum(p)
    logging.debug(f"cycle count law of n={n} truncated at k={k_max}, mass {total!r}")
    return ExactDistribution(values=np.arange(k_max + 1, dtype=np.float64), masses=p / total)


def cycles_mgf(n: int, z: complex) -> complex:
    """∏_{i≤n} (1 + (e^z − 1)/i), summed in log form.

    Example:

    >>> cycles_mgf(10, 0.0)
    (1+0j)
    >>> round(cycles_mgf(2, math.log(2)).real, 12)
    3.0
    """
    if n < 1:
        raise errors.OutOfRange(f"permutation size must be positive, got {n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    u = (cmath.exp(z) - 1) / i
    return complex(np.exp(np.sum(np.log1p(u.astype(np.complex128)))))


def cycles_model(n: int) -> deviation_engine.ModPhiModel:
    """Mod-Poisson model of the cycle count: t_n = log n and ψ(z) = 1/Γ(e^z)."""
    return deviation_engine.ModPhiModel(
        law=reference_laws.poisson(1.0),
        t_n=math.log(n),
        psi=limiting_functions.inv_gamma_exp(),
    )


def cycles_estimate(
    n: int, k: int, tail: bool = False, order: int = 0, cfg: config.Config = config.Config()
) -> Comparison:
    """Compares the lattice estimate of P[C_n = k] (or P[C_n ≥ k]) with the exact law.

    Raises:
        errors.OutOfRange: If n < 2, or k ≤ log n for the tail
    """
    model = cycles_model(n)
    x = k / model.t_n
    dist = cycles_exact(n)
    if tail:
        estimate = deviation_engine.lattice_tail(model, x, order, cfg)
        oracle = dist.sf(k)
    else:
        estimate = deviation_engine.lattice_point_mass(model, x, order, cfg)
        oracle = dist.pmf(k)
    return Comparison(
        model="cycles",
        params={"n": n, "k": k, "tail": tail, "order": order},
        estimate=estimate,
        oracle=oracle,
    )


def bahadur_rao_check(
    n: int,
    x: float,
    law: str = "bernoulli",
    q: float = 0.5,
    tail: bool = False,
    cfg: config.Config = config.Config(),
) -> Comparison:
    """Compares the engine estimate for a sum of n i.i.d. variables with the exact law.

    Args:
        n (int): Number of summands, t_n = n
        x (float): Deviation level, so the event is S_n = nx or S_n ≥ nx
        law (str, optional): bernoulli, poisson or exponential. Defaults to "bernoulli".
        q (float, optional): Bernoulli parameter. Defaults to 0.5.
        tail (bool, optional): Tail instead of point mass. Exponential sums
            are always compared on the tail (upper if x > 1, lower if x < 1).

    Raises:
        errors.OutOfRange: If x is the mean, or nx is not an integer for a lattice law

    Returns:
        Comparison: estimate against the binomial, Poisson or Gamma law of S_n

    Example:

    >>> c = bahadur_rao_check(1000, 0.75)
    >>> abs(c.ratio - 1) < 0.01
    True
    """
    if n < 1:
        raise errors.OutOfRange(f"number of summands must be positive, got {n}")
    params = {"n": n, "x": x, "law": law, "tail": tail}

    if law == "exponential":
        if abs(x - 1) < 1e-12:
            raise errors.OutOfRange(f"x={x} is the mean of the exponential law")
        model = deviation_engine.ModPhiModel(
            law=reference_laws.exponential(), t_n=float(n), psi=limiting_functions.one()
        )
        estimate = deviation_engine.nonlattice_tail(model, x, cfg)
        if x > 1:
            oracle = float(scipy.special.gammaincc(n, n * x))
        else:
            oracle = float(scipy.special.gammainc(n, n * x))
        return Comparison(model="bahadur", params=params, estimate=estimate, oracle=oracle)

    if law == "bernoulli":
        ref = reference_laws.bernoulli(q)
        exact_law = scipy.stats.binom(n, q)
        mean = q
        params["q"] = q
    elif law == "poisson":
        ref = reference_laws.poisson(1.0)
        exact_law = scipy.stats.poisson(n)
        mean = 1.0
    else:
        raise errors.InvalidLaw(f"unknown law for the i.i.d. comparison: {law}")
    if abs(x - mean) < 1e-12:
        raise errors.OutOfRange(f"x={x} is the mean of the {law} law, h = 0")
    k = round(n * x)
    if abs(n * x - k) > 1e-9 * max(1.0, n * x):
        raise errors.OutOfRange(f"n·x = {n * x} is not an integer")

    model = deviation_engine.ModPhiModel(law=ref, t_n=float(n), psi=limiting_functions.one())
    if tail:
        estimate = deviation_engine.lattice_tail(model, x, cfg=cfg)
        oracle = math.exp(exact_law.logsf(k - 1))
    else:
        estimate = deviation_engine.lattice_point_mass(model, x, cfg=cfg)
        oracle = math.exp(exact_law.logpmf(k))
    return Comparison(model="bahadur", params=params, estimate=estimate, oracle=oracle)


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class PoissonBernoulli:
    ps: tuple[float, ...]
    distribution: ExactDistribution
    t_n: float
    """Σ p_k"""

    psi: limiting_functions.LimitingFunction
    """∏ (1 + p_k(e^z − 1)) e^{−p_k(e^z − 1)}"""

    @property
    def model(self) -> deviation_engine.ModPhiModel:
        return deviation_engine.ModPhiModel(
            law=reference_laws.poisson(1.0), t_n=self.t_n, psi=self.psi
        )

    def deviation(self, eps: float, cfg: config.Config = config.Config()) -> Comparison:
        """Compares the estimate of P[X ≥ (1+ε) t_n] with the exact law.

        The threshold is rounded up to the next integer k, so x = k/t_n.
        """
        k = math.ceil((1 + eps) * self.t_n - 1e-12)
        estimate = deviation_engine.lattice_tail(self.model, k / self.t_n, cfg=cfg)
        if self.t_n < 10:
            logging.warning(f"t_n = {self.t_n:.4g} is small, the estimate is not asymptotic")
            estimate = dataclasses.replace(estimate, flags=estimate.flags + ("small_t",))
        return Comparison(
            model="pb",
            params={"terms": len(self.ps), "eps": eps, "k": k},
            estimate=estimate,
            oracle=self.distribution.sf(k),
        )


def poisson_bernoulli(ps: typing.Sequence[float]) -> PoissonBernoulli:
    """Sum of independent Bernoulli(p_k) as a mod-Poisson sequence with t_n = Σ p_k.

    Raises:
        errors.OutOfRange: If some p_k is outside [0, 1)

    Example:

    >>> pb = poisson_bernoulli([0.0, 0.0])
    >>> pb.t_n, pb.distribution.pmf(0), pb.psi.real(0.7)
    (0.0, 1.0, 1.0)
    """
    for i, p in enumerate(ps):
        if not 0 <= p < 1:
            raise errors.OutOfRange(f"p_{i + 1} = {p} is outside [0, 1)", index=i)
    arr = np.asarray(ps, dtype=np.float64)
    masses = np.array([1.0])
    for p in arr:
        masses = np.convolve(masses, [1.0 - p, p])

    def evaluate(z):
        u = arr * (cmath.exp(z) - 1)
        return cmath.exp(complex(np.sum(np.log1p(u.astype(np.complex128)) - u)))

    return PoissonBernoulli(
        ps=tuple(float(p) for p in arr),
        distribution=ExactDistribution(values=np.arange(len(masses), dtype=np.float64), masses=masses),
        t_n=math.fsum(arr),
        psi=limiting_functions.custom(evaluate, name="poisson_bernoulli"),
    )


def _ising_eigenvalues(beta: float, z: float) -> tuple[float, float]:
    c = math.cosh(z)
    root = math.sqrt(math.sinh(z) ** 2 + math.exp(-2 * beta))
    return c + root, c - root


def ising_log_mgf(n: int, beta: float, z: float) -> float:
    """log E[e^{z M_n}] for the magnetization of the Ising ring of n spins.

    Example: independent spins

    >>> abs(ising_log_mgf(10, 0.0, 0.3) - 10 * math.log(math.cosh(0.3))) < 1e-12
    True
    """
    if n < 3:
        raise errors.OutOfRange(f"the Ising ring needs at least 3 spins, got {n}")
    plus, minus = _ising_eigenvalues(beta, z)
    plus0, minus0 = _ising_eigenvalues(beta, 0.0)
    return (
        n * (math.log(plus) - math.log(plus0))
        + math.log1p((minus / plus) ** n)
        - math.log1p((minus0 / plus0) ** n)
    )


def ising_mgf(n: int, beta: float, z: float) -> float:
    """E[e^{z M_n}] = tr T(z)^n / tr T(0)^n through the two transfer-matrix eigenvalues."""
    return math.exp(ising_log_mgf(n, beta, z))


@functools.lru_cache(maxsize=8)
def ising_exact(n: int, beta: float) -> ExactDistribution:
    """Exact law of the magnetization M_n of the Ising ring.

    Configurations carry the weight e^{−β·#disagreeing neighbours}. The ring
    is closed by running the chain DP once per value of the first spin and
    applying the closing bond at the end. Both chains share one rescaling.

    Raises:
        errors.OutOfRange: If n < 3
        errors.TooLarge: If n > 4000

    Example:

    >>> d = ising_exact(3, 0.0)
    >>> d.values.tolist(), [round(m * 8, 12) for m in d.masses]
    ([-3.0, -1.0, 1.0, 3.0], [1.0, 3.0, 3.0, 1.0])
    """
    if n < 3:
        raise errors.OutOfRange(f"the Ising ring needs at least 3 spins, got {n}")
    if n > _ISING_MAX:
        raise errors.TooLarge(f"exact Ising laws are computed up to n={_ISING_MAX}, got {n}")
    flip = math.exp(-beta)
    # first spin, last spin (0 down, 1 up), number of up spins
    w = np.zeros((2, 2, n + 1))
    w[0, 0, 0] = 1.0
    w[1, 1, 1] = 1.0
    for _ in range(n - 1):
        nxt = np.zeros_like(w)
        nxt[:, 0, :] = w[:, 0, :] + flip * w[:, 1, :]
        nxt[:, 1, 1:] = w[:, 1, :-1] + flip * w[:, 0, :-1]
        w = nxt / nxt.sum()
    closed = w[0, 0] + flip * w[0, 1] + flip * w[1, 0] + w[1, 1]
    return ExactDistribution(
        values=2.0 * np.arange(n + 1) - n,
        masses=closed / closed.sum(),
    )


def ising_mod_gaussian(beta: float, n: int) -> deviation_engine.ModPhiModel:
    """Mod-Gaussian model of M_n/n^{1/4}.

    t_n = √n, variance e^β and ψ(z) = exp(−(3e^{3β} − e^β) z⁴/24).

    Example:

    >>> m = ising_mod_gaussian(0.0, 10_000)
    >>> m.t_n, m.law.variance, m.psi.params["L"]
    (100.0, 1.0, -2.0)
    """
    return deviation_engine.ModPhiModel(
        law=reference_laws.gaussian(0.0, math.exp(beta)),
        t_n=math.sqrt(n),
        psi=limiting_functions.exp_monomial(L=-(3 * math.exp(3 * beta) - math.exp(beta)), v=4),
    )


def ising_cumulant_model(beta: float, n: int) -> deviation_engine.CumulantModel:
    """Cumulant model of M_n: α_n = n, β_n = 1, σ² = e^β.

    The third cumulant of M_n vanishes by the ±1 symmetry, so L = 0.

    Example:

    >>> cm = ising_cumulant_model(0.0, 500)
    >>> cm.alpha_n, cm.beta_n, cm.sigma2, cm.L
    (500.0, 1.0, 1.0, 0.0)
    """
    return deviation_engine.CumulantModel(
        alpha_n=float(n), beta_n=1.0, sigma2=math.exp(beta), L=0.0
    )


@enum.unique
class IsingEstimate(util.StrEnum):
    CUMULANT = "cumulant"
    MOD_GAUSSIAN = "mod_gaussian"


def ising_deviation(
    n: int,
    beta: float,
    x: float,
    cfg: config.Config = config.Config(),
    estimate: IsingEstimate | str = IsingEstimate.CUMULANT,
) -> Comparison:
    """Compares an estimate of P[M_n ≥ x n^{3/4}] with the exact DP tail.

    M_n lives on n − 2ℤ, so the estimate is taken half a lattice step below
    the first admissible value m* ≥ x n^{3/4}. The default estimate is
    `cumulant_moderate` at T = (m*−1)/e^{β/2} on `ising_cumulant_model`;
    `mod_gaussian` uses the non-lattice tail of M_n/n^{1/4} instead.

    Raises:
        errors.OutOfRange: If x ≤ 0 or the threshold exceeds n
        errors.ValidationError: If the estimate is unknown
    """
    try:
        estimate = IsingEstimate(estimate)
    except ValueError:
        raise errors.ValidationError(f"unknown Ising estimate {estimate!r}") from None
    if not x > 0:
        raise errors.OutOfRange(f"x must be positive, got {x}")
    dist = ising_exact(n, beta)
    scale = n**0.75
    threshold = x * scale
    i = int(np.searchsorted(dist.values, threshold - 1e-9))
    if i >= len(dist.values):
        raise errors.OutOfRange(f"threshold {threshold} exceeds the largest magnetization {n}")
    m_star = float(dist.values[i])
    if estimate == IsingEstimate.CUMULANT:
        value = deviation_engine.cumulant_moderate(
            ising_cumulant_model(beta, n), (m_star - 1) / math.exp(beta / 2)
        )
    else:
        value = deviation_engine.nonlattice_tail(
            ising_mod_gaussian(beta, n), (m_star - 1) / scale, cfg
        )
    return Comparison(
        model="ising",
        params={"n": n, "beta": beta, "x": x, "m": m_star, "estimate": str(estimate)},
        estimate=value,
        oracle=dist.sf(m_star),
    )


def _zero_probabilities(h: float) -> np.ndarray:
    if not h > 0:
        raise errors.OutOfRange(f"hyperbolic area must be positive, got {h}")
    r2 = h / (h + 4 * math.pi)
    count = max(1, math.ceil(math.log(_ZEROS_CUTOFF) / math.log(r2)))
    return r2 ** np.arange(1, count + 1, dtype=np.float64)


def hyperbolic_zeros_cgf(h: float, z: float) -> float:
    """log E[e^{z N_h / h^{1/3}}] for the zeros of the hyperbolic analytic function in a disc of area h.

    N_h is a sum of independent Bernoulli(r^{2k}) with r² = h/(h + 4π).

    Example:

    >>> hyperbolic_zeros_cgf(100.0, 0.0)
    0.0
    """
    q = _zero_probabilities(h)
    w = z / h ** (1.0 / 3.0)
    return math.fsum(np.log1p(q * math.expm1(w)))


def hyperbolic_zeros_mean(h: float) -> float:
    """E[N_h] = r²/(1 − r²) = h/4π"""
    if not h > 0:
        raise errors.OutOfRange(f"hyperbolic area must be positive, got {h}")
    return h / (4 * math.pi)


def hyperbolic_cubic_coefficient(h: float, z: float = 1.0) -> float:
    """Cubic coefficient of the cumulant generating function in z.

    Taken from the odd part (cgf(z) − cgf(−z))/2 minus the exact linear term
    h^{2/3} z/4π, divided by z³. Tends to 1/144π.
    """
    odd = (hyperbolic_zeros_cgf(h, z) - hyperbolic_zeros_cgf(h, -z)) / 2
    return (odd - h ** (2.0 / 3.0) * z / (4 * math.pi)) / z**3


def sample_Nh(
    h: float, trials: int, seed: int | None = None, cfg: config.Config = config.Config()
) -> np.ndarray:
    """Draws N_h = Σ_k B(r^{2k}) with independent Bernoulli terms.

    Each term is the indicator that a Poisson variable of mean −log(1 − r^{2k})
    is positive, so a draw is one Poisson number of marks spread over the
    terms, and N_h counts the terms that got at least one mark.

    Raises:
        errors.BudgetExceeded: If the expected number of marks exceeds `cfg.budget`

    Returns:
        np.ndarray: `trials` integer draws
    """
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    q = _zero_probabilities(h)
    rates = -np.log1p(-q)
    total = float(rates.sum())
    if trials * total > cfg.budget:
        raise errors.BudgetExceeded(f"{trials} draws need about {trials * total:.3g} marks, over the budget {cfg.budget}")
    weights = rates / total
    terms = len(q)

    def _sample(rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.int64)
        for start in range(0, size, _ZEROS_BATCH):
            m = min(_ZEROS_BATCH, size - start)
            marks = rng.poisson(total, size=m)
            owners = np.repeat(np.arange(m), marks)
            slots = rng.choice(terms, size=int(marks.sum()), p=weights)
            hit = np.zeros((m, terms), dtype=bool)
            hit[owners, slots] = True
            out[start : start + m] = hit.sum(axis=1)
        return out

    parts = util.run_chunks(_ZEROS_STREAM, trials, _sample, cfg)
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


@dataclasses.dataclass(frozen=True, kw_only=True)
class ThetaSpec:
    """Cycle weights θ_m: `table[m−1]` for m ≤ len(table), `theta` beyond."""

    theta: float | fractions.Fraction
    table: tuple = ()

    def __post_init__(self):
        for m, value in enumerate((*self.table, self.theta), start=1):
            if value < 0:
                raise errors.NonPositiveWeights(f"cycle weight θ_{m} = {value} is negative")

    def weight(self, m: int):
        return self.table[m - 1] if m <= len(self.table) else self.theta

    @property
    def K(self) -> float:
        """Constant of g_Θ(t) = θ log(1/(1−t)) + K + o(1) as t → 1.

        Example:

        >>> ThetaSpec(theta=1.0, table=(2.0,)).K
        1.0
        """
        return math.fsum((float(v) - float(self.theta)) / m for m, v in enumerate(self.table, start=1))


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class WeightedPermutations:
    spec: ThetaSpec
    g: SeriesRing
    """g_Θ(t) = Σ θ_m t^m / m"""

    h: SeriesRing
    """Σ h_n t^n = exp(g_Θ(t))"""

    @property
    def n_max(self) -> int:
        return self.g.order

    def _h(self, n: int) -> float:
        if not 0 <= n <= self.n_max:
            raise errors.OutOfRange(f"n must lie in [0, {self.n_max}], got {n}")
        value = float(self.h[n])
        if value == 0:
            raise errors.ZeroPartitionFunction(f"h_{n} = 0, the weighted measure is undefined")
        return value

    def mgf(self, n: int, w: complex) -> complex:
        """E_Θ[e^{w C_n}] = [t^n] exp(e^w g_Θ(t)) / h_n for the cycle count C_n."""
        h_n = self._h(n)
        series = self.g.truncate(n).scale(cmath.exp(w)).exp()
        return complex(series[n]) / h_n

    def psi_n(self, n: int, w: complex) -> complex:
        """mgf · e^{−(e^w − 1)(K + θ log n)}, which tends to Γ(θ)/Γ(θ e^w)."""
        shift = (cmath.exp(w) - 1) * (self.spec.K + float(self.spec.theta) * math.log(n))
        return self.mgf(n, w) * cmath.exp(-shift)

    def h_asymptotic(self, n: int) -> float:
        """e^K n^{θ−1}/Γ(θ)"""
        theta = float(self.spec.theta)
        return math.exp(self.spec.K) * n ** (theta - 1) / math.gamma(theta)

    def psi_limit(self) -> limiting_functions.LimitingFunction:
        return limiting_functions.gamma_ratio(float(self.spec.theta))


def weighted_perm(spec: ThetaSpec, n_max: int) -> WeightedPermutations:
    """Builds the generating functions of permutations weighted by ∏ θ_{|c|} over cycles.

    Rational weights (int or Fraction) give exact h_n.

    Raises:
        errors.TooLarge: If n_max > 4000
        errors.OutOfRange: If n_max < 1

    Example: θ ≡ 2 gives h_n = n + 1

    >>> wp = weighted_perm(ThetaSpec(theta=2), 4)
    >>> [int(c) for c in wp.h.coefficients]
    [1, 2, 3, 4, 5]
    """
    if n_max < 1:
        raise errors.OutOfRange(f"n_max must be positive, got {n_max}")
    if n_max > _WPERM_MAX:
        raise errors.TooLarge(f"weighted permutations are computed up to n={_WPERM_MAX}, got {n_max}")
    weights = [spec.weight(m) for m in range(1, n_max + 1)]
    if all(isinstance(v, (int, fractions.Fraction)) for v in weights):
        g = SeriesRing((0, *(fractions.Fraction(v) / m for m, v in enumerate(weights, start=1))))
    else:
        g = SeriesRing((0.0, *(float(v) / m for m, v in enumerate(weights, start=1))))
    h = g.exp()
    logging.debug(f"computed h_n up to n={n_max} for θ={spec.theta}")
    return WeightedPermutations(spec=spec, g=g, h=h)


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class OmegaStatistics:
    N: int
    omega: np.ndarray
    """ω(k) at index k for 1 ≤ k ≤ N, ω(0) unused."""

    counts: np.ndarray
    """counts[m] = #{k ≤ N : ω(k) = m}"""

    def mean(self) -> float:
        return math.fsum(np.arange(len(self.counts)) * self.counts) / self.N

    def empirical_mgf(self, z: float) -> float:
        """(1/N) Σ_{k≤N} e^{z ω(k)}"""
        return math.fsum(self.counts * np.exp(z * np.arange(len(self.counts)))) / self.N

    def tail_count(self, m: int) -> int:
        """#{k ≤ N : ω(k) ≥ m}"""
        return int(self.counts[m:].sum())

    def predicted_mgf(self, z: float) -> float:
        """e^{(log log N + γ) x} Π_P(x) Π_ℕ*(x) with x = e^z − 1, the product over primes truncated at N.

        Uses e^{γx} Π_ℕ*(x) = 1/Γ(1 + x).
        """
        x = math.expm1(z)
        primes = limiting_functions.weierstrass_product(x, "primes", self.N)
        return math.exp(math.log(math.log(self.N)) * x + primes.log_value) * float(
            scipy.special.rgamma(1 + x)
        )

    def mgf_ratio(self, z: float) -> float:
        return self.empirical_mgf(z) / self.predicted_mgf(z)


def omega_statistics(N: int) -> OmegaStatistics:
    """Number of distinct prime factors of every k ≤ N by a prime sieve.

    Raises:
        errors.OutOfRange: If N < 3
        errors.TooLarge: If N > 10⁸

    Example:

    >>> stats = omega_statistics(30)
    >>> int(stats.omega[30]), int(stats.omega[16]), stats.tail_count(2), stats.tail_count(3)
    (3, 1, 13, 1)
    """
    if N < 3:
        raise errors.OutOfRange(f"sieve bound must be at least 3, got {N}")
    if N > _OMEGA_MAX:
        raise errors.TooLarge(f"the sieve is limited to N={_OMEGA_MAX}, got {N}")
    omega = np.zeros(N + 1, dtype=np.uint8)
    for p in limiting_functions.primes_up_to(N):
        omega[p::p] += 1
    counts = np.bincount(omega[1:]).astype(np.int64)
    logging.info(f"sieved ω(k) for k ≤ {N}, max ω = {len(counts) - 1}")
    return OmegaStatistics(N=N, omega=omega, counts=counts)


def charpoly_deviation(
    group: limiting_functions.BarnesGroup | str,
    n: int,
    x: float,
    lower: bool = False,
    cfg: config.Config = config.Config(),
) -> deviation_engine.DeviationEstimate:
    """Estimates P[X ≥ x log n] (or P[X ≤ −x log n]) for characteristic polynomials.

    X is log|Z_n| at 1 for USp and SO(2n), with t_n = log(n/2), or the real
    part of log Z_n over U(n), with t_n = log(n)/2. The reference law is the
    standard Gaussian and ψ is the matching Barnes-G ratio.

    Raises:
        errors.OutOfRange: If x ≤ 0 or t_n ≤ 0
        errors.DomainError: If the Barnes ratio is undefined at the saddle point
    """
    group = limiting_functions.BarnesGroup(group)
    if not x > 0:
        raise errors.OutOfRange(f"x must be positive, got {x}")
    if n < 2:
        raise errors.OutOfRange(f"matrix size must be at least 2, got {n}")
    if group == limiting_functions.BarnesGroup.U_REAL:
        t = math.log(n) / 2
    else:
        t = math.log(n / 2)
    model = deviation_engine.ModPhiModel(
        law=reference_laws.gaussian(), t_n=t, psi=limiting_functions.barnes_ratio(group)
    )
    x_engine = x * math.log(n) / t
    return deviation_engine.nonlattice_tail(model, -x_engine if lower else x_engine, cfg)
