"""
deviation_engine
"""

import dataclasses
import enum
import logging
import math
import typing

import scipy.special
from numpy.polynomial import Polynomial

import modphi.config as config
import modphi.errors as errors
import modphi.limiting_functions as limiting_functions
import modphi.reference_laws as reference_laws
import modphi.util as util

RealEvaluator = typing.Callable[[float], float]


@enum.unique
class Regime(util.StrEnum):
    LATTICE_POINT = "lattice_point"  # P[X_n = t_n x] for a lattice reference law
    LATTICE_TAIL = "lattice_tail"  # P[X_n ≥ t_n x] with the 1/(1−e^{−h}) factor
    NONLATTICE_TAIL = "nonlattice_tail"  # P[X_n ≥ t_n x] with the 1/h factor
    CLT = "clt"  # crossover formula evaluated at y ≤ t_n^{1/6}
    CROSSOVER = "crossover"  # crossover formula evaluated at y > t_n^{1/6}
    CUMULANT_MODERATE = "cumulant_moderate"  # estimate from the second and third cumulants
    CONIC = "conic"  # multi-dimensional conic estimate
    BOREL = "borel"  # upper bound on a finite union of intervals


@enum.unique
class Tail(util.StrEnum):
    UPPER = "upper"
    LOWER = "lower"
    TWO_SIDED = "two_sided"


@dataclasses.dataclass(frozen=True, kw_only=True)
class ModPhiModel:
    law: reference_laws.ReferenceLaw
    t_n: float
    """The parameter t_n at the evaluation index."""

    psi: limiting_functions.LimitingFunction
    psi_derivs: tuple[RealEvaluator, RealEvaluator] | None = None
    """ψ' and ψ'' on the real axis. None means central finite differences."""

    def __post_init__(self):
        if not self.t_n > 0:
            raise errors.OutOfRange(f"t_n must be positive, got {self.t_n}")

    def psi_value(self, h: float) -> float:
        """ψ(h) for real h, which must be positive."""
        value = self.psi.real(h)
        if not value > 0:
            raise errors.NotPositive(f"{self.psi.label} is not positive at h={h}: {value}")
        return value

    def psi_derivative(self, order: int, h: float) -> float:
        if self.psi_derivs is not None and order <= len(self.psi_derivs):
            return float(self.psi_derivs[order - 1](h))
        return self.psi.derivative(order, h)


@dataclasses.dataclass(frozen=True, kw_only=True)
class DeviationEstimate:
    regime: Regime
    log_prob: float
    leading: float
    correction: float = 1.0
    """Multiplicative correction, 1 when absent."""

    exponent_rate: float = 0.0
    """t_n F(x), or the analogous exponent of the estimate."""

    flags: tuple[str, ...] = ()
    """Regime warnings, e.g. 'near_mean', 'lower' or 'above_window'."""

    @property
    def prob(self) -> float:
        """The estimate on the linear scale. May underflow to 0."""
        return math.exp(self.log_prob)

    def as_row(self) -> dict:
        """Returns the fields emitted by the command line.

        Example:

        >>> e = DeviationEstimate(regime=Regime.CLT, log_prob=math.log(0.5), leading=0.5)
        >>> e.as_row()["regime"], round(e.as_row()["prob"], 12)
        ('clt', 0.5)
        """
        return {
            "regime": str(self.regime),
            "log_prob": self.log_prob,
            "prob": self.prob,
            "rate": self.exponent_rate,
            "leading": self.leading,
            "correction": self.correction,
            "flags": ",".join(self.flags),
        }


@dataclasses.dataclass(frozen=True, kw_only=True)
class CumulantModel:
    alpha_n: float
    beta_n: float
    sigma2: float
    L: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise errors.NonPositiveVariance(f"σ² must be positive, got {self.sigma2}")
        if not (self.alpha_n > 0 and self.beta_n > 0):
            raise errors.OutOfRange(
                f"α_n and β_n must be positive, got {self.alpha_n} and {self.beta_n}"
            )

    def as_mod_gaussian(self) -> ModPhiModel:
        """The mod-Gaussian model of S_n/(β_n α_n^{1/3}).

        Parameter t_n = α_n^{1/3} on the law N(0, σ²) and limiting function
        exp(L z³/6).

        Example:

        >>> m = CumulantModel(alpha_n=1000.0, beta_n=1.0, sigma2=2.0, L=0.5).as_mod_gaussian()
        >>> round(m.t_n, 12), m.law.variance, m.psi.params["L"]
        (10.0, 2.0, 0.5)
        """
        return ModPhiModel(
            law=reference_laws.gaussian(0.0, self.sigma2),
            t_n=self.alpha_n ** (1.0 / 3.0),
            psi=limiting_functions.exp_monomial(L=self.L, v=3),
        )


def build_estimate(
    regime: Regime,
    rate: float,
    leading: float,
    correction: float = 1.0,
    flags: typing.Iterable[str] = (),
) -> DeviationEstimate:
    if not leading > 0:
        raise errors.NumericalError(f"{regime} estimate has non-positive leading term {leading}")
    if not correction > 0:
        raise errors.NumericalError(
            f"{regime} estimate has non-positive correction {correction}; t_n is too small for the expansion"
        )
    return DeviationEstimate(
        regime=regime,
        log_prob=-rate + math.log(leading) + math.log(correction),
        leading=leading,
        correction=correction,
        exponent_rate=rate,
        flags=tuple(flags),
    )


def _check_integral(model: ModPhiModel, x: float):
    tx = model.t_n * x
    if abs(tx - round(tx)) > 1e-9 * max(1.0, abs(tx)):
        raise errors.OutOfRange(f"t_n·x = {tx} is not an integer")


def a1_coefficient(model: ModPhiModel, h: float) -> float:
    """Closed form of the first correction coefficient of the lattice point mass.

    a₁ = −ψ''/(2η'') + (ψ η'''' + 4 ψ' η''')/(8 η''²) − 15 ψ (η''')²/(72 η''³), all at h.
    """
    law = model.law
    e2, e3, e4 = (law.derivative(k, h) for k in (2, 3, 4))
    psi0 = model.psi_value(h)
    psi1 = model.psi_derivative(1, h)
    psi2 = model.psi_derivative(2, h)
    return (
        -psi2 / (2 * e2)
        + (psi0 * e4 + 4 * psi1 * e3) / (8 * e2**2)
        - 15 * psi0 * e3**2 / (72 * e2**3)
    )


def _gaussian_moment(j: int, eta2: float) -> float:
    """E[(i w/√η'')^j] for w standard normal."""
    if j % 2:
        return 0.0
    sign = -1.0 if (j // 2) % 2 else 1.0
    return sign * math.prod(range(1, j, 2)) / eta2 ** (j // 2)


def _series_mul(a: list[Polynomial], b: list[Polynomial]) -> list[Polynomial]:
    """Product of two series in ε with polynomial coefficients, truncated after ε²."""
    return [
        a[0] * b[0],
        a[0] * b[1] + a[1] * b[0],
        a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
    ]


def _second_order_mean(series: list[Polynomial], eta2: float) -> float:
    return math.fsum(
        c * _gaussian_moment(j, eta2) for j, c in enumerate(series[2].coef)
    )


def correction_coefficients(model: ModPhiModel, x: float) -> tuple[float, float]:
    """Computes (a₁, b₁) of the lattice point-mass and tail expansions.

    The integrand of the Fourier inversion is expanded in ε = t_n^{−1/2}
    around the saddle point, as ψ(h+vε)·exp(Σ_{k≥3} η^(k) v^k ε^{k−2}/k!),
    times (1−e^{−h})/(1−e^{−h−vε}) for the tail. The ε² coefficient is then
    averaged against the Gaussian law of v = i w/√η''(h). a₁ is cross-checked
    against `a1_coefficient`. b₁ is nan when h ≤ 0.

    Example: Poisson reference, ψ ≡ 1, x = 2 gives a₁ = −1/24 and b₁ = −25/24

    >>> m = ModPhiModel(law=reference_laws.poisson(1.0), t_n=100.0, psi=limiting_functions.one())
    >>> [round(c * 24, 9) for c in correction_coefficients(m, 2.0)]
    [-1.0, -25.0]
    """
    point = reference_laws.solve_saddle(model.law, x)
    h = point.h
    law = model.law
    e2, e3, e4 = (law.derivative(k, h) for k in (2, 3, 4))
    psi0 = model.psi_value(h)
    psi1 = model.psi_derivative(1, h)
    psi2 = model.psi_derivative(2, h)

    psi_series = [Polynomial([psi0]), Polynomial([0, psi1]), Polynomial([0, 0, psi2 / 2])]
    exp_series = [
        Polynomial([1.0]),
        Polynomial([0, 0, 0, e3 / 6]),
        Polynomial([0, 0, 0, 0, e4 / 24, 0, e3**2 / 72]),
    ]
    point_series = _series_mul(psi_series, exp_series)
    a1 = _second_order_mean(point_series, e2)

    closed = a1_coefficient(model, h)
    assert math.isclose(a1, closed, rel_tol=1e-9, abs_tol=1e-12), (a1, closed)

    if h <= 0:
        return a1, math.nan
    m = math.exp(-h)
    d0 = -math.expm1(-h)
    q1 = -m / d0
    q2 = m / (2 * d0) + (m / d0) ** 2
    lattice_series = [Polynomial([1.0]), Polynomial([0, q1]), Polynomial([0, 0, q2])]
    b1 = _second_order_mean(_series_mul(point_series, lattice_series), e2)
    return a1, b1


def lattice_point_mass(
    model: ModPhiModel, x: float, order: int = 0, cfg: config.Config = config.Config()
) -> DeviationEstimate:
    """Estimates P[X_n = t_n x] for a lattice reference law of span 1.

    Args:
        model (ModPhiModel): Lattice mod-φ model
        x (float): Point with t_n·x integral
        order (int, optional): 0 for the leading term, 1 to include a₁. Defaults to 0.

    Raises:
        errors.NotLattice: If the law is not lattice of span 1
        errors.OutOfRange: If t_n·x is not an integer or x is not in the image of η'

    Returns:
        DeviationEstimate: leading = ψ(h)/√(2π t_n η''(h)), correction = 1 + a₁/(t_n ψ(h))

    Example:

    >>> m = ModPhiModel(law=reference_laws.poisson(1.0), t_n=100.0, psi=limiting_functions.one())
    >>> round(lattice_point_mass(m, 1.0).prob, 7)
    0.0398942
    """
    if not model.law.lattice:
        raise errors.NotLattice(f"law {model.law.name} is not a lattice law")
    if model.law.lattice_span != 1:
        raise errors.NotLattice(
            f"law {model.law.name} has lattice span {model.law.lattice_span}, expected 1"
        )
    if order not in (0, 1):
        raise errors.UnsupportedOrder(f"lattice point mass supports order 0 or 1, got {order}")
    _check_integral(model, x)
    point = reference_laws.solve_saddle(model.law, x, cfg)
    h = point.h
    t = model.t_n
    psi_h = model.psi_value(h)
    leading = psi_h / math.sqrt(2 * math.pi * t * model.law.derivative(2, h))
    correction = 1.0
    if order == 1:
        correction = 1.0 + a1_coefficient(model, h) / (t * psi_h)
    return build_estimate(Regime.LATTICE_POINT, t * point.F, leading, correction)


def lattice_tail(
    model: ModPhiModel, x: float, order: int = 0, cfg: config.Config = config.Config()
) -> DeviationEstimate:
    """Estimates P[X_n ≥ t_n x] for x above the mean of a lattice reference law.

    The leading term is the point-mass one times 1/(1−e^{−h}). With order=1
    the correction 1 + b₁/(t_n ψ(h)) from `correction_coefficients` is applied.

    Raises:
        errors.NotLattice: If the law is not lattice
        errors.OutOfRange: If h ≤ 0, i.e. x ≤ η'(0)
    """
    if not model.law.lattice:
        raise errors.NotLattice(f"law {model.law.name} is not a lattice law")
    if order not in (0, 1):
        raise errors.UnsupportedOrder(f"lattice tail supports order 0 or 1, got {order}")
    point = reference_laws.solve_saddle(model.law, x, cfg)
    h = point.h
    if not h > 0:
        raise errors.OutOfRange(
            f"lattice tail needs x above η'(0) = {model.law.mean}, got x={x} (h={h})"
        )
    t = model.t_n
    eta2 = model.law.derivative(2, h)
    psi_h = model.psi_value(h)
    leading = psi_h / (math.sqrt(2 * math.pi * t * eta2) * -math.expm1(-h))
    flags = []
    if h * math.sqrt(t * eta2) < 1:
        logging.warning(
            f"x={x} is within one standard deviation of the mean, the 1/(1−e^{{−h}}) factor blows up"
        )
        flags.append("near_mean")
    correction = 1.0
    if order == 1:
        _, b1 = correction_coefficients(model, x)
        correction = 1.0 + b1 / (t * psi_h)
    return build_estimate(Regime.LATTICE_TAIL, t * point.F, leading, correction, flags)


def nonlattice_tail(
    model: ModPhiModel, x: float, cfg: config.Config = config.Config()
) -> DeviationEstimate:
    """Estimates P[X_n ≥ t_n x] for x > η'(0), or P[X_n ≤ t_n x] for x < η'(0).

    Raises:
        errors.IsLattice: If the reference law is a lattice law
        errors.OutOfRange: If x = η'(0) or x is outside the image of η'

    Example: Gaussian reference, ψ ≡ 1, t_n = 100, x = 0.5

    >>> m = ModPhiModel(law=reference_laws.gaussian(), t_n=100.0, psi=limiting_functions.one())
    >>> e = nonlattice_tail(m, 0.5)
    >>> e.exponent_rate, round(e.leading * 0.5 * math.sqrt(200 * math.pi), 12)
    (12.5, 1.0)
    """
    if model.law.lattice:
        raise errors.IsLattice(f"law {model.law.name} is a lattice law, use lattice_tail")
    point = reference_laws.solve_saddle(model.law, x, cfg)
    h = point.h
    if h == 0:
        raise errors.OutOfRange(f"x={x} is the mean of the reference law, the tail estimate is undefined")
    t = model.t_n
    eta2 = model.law.derivative(2, h)
    leading = model.psi_value(h) / (abs(h) * math.sqrt(2 * math.pi * t * eta2))
    flags = ["lower"] if h < 0 else []
    return build_estimate(Regime.NONLATTICE_TAIL, t * point.F, leading, 1.0, flags)


def crossover_tail(
    model: ModPhiModel, y: float, cfg: config.Config = config.Config()
) -> DeviationEstimate:
    """Estimates P[X_n ≥ t_n η'(0) + √(t_n η''(0)) y], uniformly from the CLT scale on.

    Evaluates e^{−t_n F(η'(0)+s)} e^{β²/2} P[N(0,1) ≥ β] with
    s = y √(η''(0)/t_n) and β = h √(t_n η''(h)). The regime label is clt when
    y ≤ t_n^{1/6} and crossover above.

    Raises:
        errors.OutOfRange: If y < 0 or η'(0)+s is outside the image of η'

    Examples:

    >>> m = ModPhiModel(law=reference_laws.poisson(1.0), t_n=10_000.0, psi=limiting_functions.one())
    >>> e = crossover_tail(m, 0.0)
    >>> round(e.prob, 12), str(e.regime)
    (0.5, 'clt')
    """
    if y < 0:
        raise errors.OutOfRange(f"crossover tail needs y ≥ 0, got {y}")
    law = model.law
    t = model.t_n
    s = y * math.sqrt(law.variance / t)
    point = reference_laws.solve_saddle(law, law.mean + s, cfg)
    h = point.h
    beta = h * math.sqrt(t * law.derivative(2, h))
    # e^{β²/2} P[N ≥ β] without overflow
    leading = 0.5 * float(scipy.special.erfcx(beta / math.sqrt(2.0)))
    regime = Regime.CLT if y <= t ** (1.0 / 6.0) else Regime.CROSSOVER
    return build_estimate(regime, t * point.F, leading)


def _log_cosh(c: float) -> float:
    c = abs(c)
    return c + math.log1p(math.exp(-2 * c)) - math.log(2)


def cumulant_moderate(
    model: CumulantModel,
    T: float,
    tail: Tail | str = Tail.UPPER,
) -> DeviationEstimate:
    """Moderate deviations of S_n/(β_n σ) from its second and third cumulants.

    P[S_n/(β_n σ) ≥ T] ≈ e^{−T²/(2α_n)}/√(2π T²/α_n) · exp(L T³/(6 σ³ α_n²)).
    The lower tail flips the sign of L; the two-sided version doubles the
    prefactor and replaces the exponential by a cosh.

    T outside α_n^{1/2} ≤ T ≪ α_n^{3/4} is accepted with a warning.

    Raises:
        errors.OutOfRange: If T ≤ 0

    Example: L = 0 is the Gaussian tail equivalent

    >>> cm = CumulantModel(alpha_n=100.0, beta_n=1.0, sigma2=1.0, L=0.0)
    >>> e = cumulant_moderate(cm, 30.0)
    >>> e.exponent_rate, round(e.leading * 3 * math.sqrt(2 * math.pi), 12), e.correction
    (4.5, 1.0, 1.0)
    """
    tail = Tail(tail)
    if not T > 0:
        raise errors.OutOfRange(f"T must be positive, got {T}")
    alpha = model.alpha_n
    flags = []
    if T < math.sqrt(alpha):
        logging.warning(f"T={T} is below the moderate deviation window α_n^(1/2)={math.sqrt(alpha)}")
        flags.append("below_window")
    if T > alpha**0.75:
        logging.warning(f"T={T} is beyond the validity window α_n^(3/4)={alpha**0.75}")
        flags.append("above_window")
    if tail == Tail.LOWER:
        flags.append("lower")
    leading = 1.0 / math.sqrt(2 * math.pi * T * T / alpha)
    cubic = model.L * T**3 / (6 * model.sigma2**1.5 * alpha**2)
    rate = T * T / (2 * alpha)
    if tail == Tail.UPPER:
        log_correction = cubic
    elif tail == Tail.LOWER:
        log_correction = -cubic
    else:
        leading *= 2
        log_correction = _log_cosh(cubic)
    try:
        correction = math.exp(log_correction)
    except OverflowError:
        correction = math.inf
    return DeviationEstimate(
        regime=Regime.CUMULANT_MODERATE,
        log_prob=-rate + math.log(leading) + log_correction,
        leading=leading,
        correction=correction,
        exponent_rate=rate,
        flags=tuple(flags),
    )


def _petrov_recursion(kappas: list, v: int) -> list:
    """λ^(2..v) from the b-coefficient recursion, for any κ^(2)."""
    k = {r: kappas[r - 2] for r in range(2, v + 1)}
    b: dict[int, typing.Any] = {}
    for j in range(1, v):
        acc = 1 if j == 1 else 0
        for r in range(2, j + 1):
            acc -= k[r + 1] / math.factorial(r) * _composition_sum(b, j, r)
        b[j] = acc / k[2]
    return [-b[r - 1] / r for r in range(2, v + 1)]


def _composition_sum(b: dict, j: int, r: int):
    """Σ over compositions j = j₁+⋯+j_r (j_i ≥ 1) of b_{j₁}⋯b_{j_r}."""
    if r == 1:
        return b[j]
    return sum(b[first] * _composition_sum(b, j - first, r - 1) for first in range(1, j - r + 2))


def petrov_coefficients(kappas: list, v: int) -> list:
    """Coefficients λ^(2..v) of the Cramér–Petrov series, for v ≤ 4.

    Args:
        kappas (list): κ^(2), κ^(3), …, κ^(v). Fractions stay exact.
        v (int): Highest order, between 2 and 4

    Raises:
        errors.UnsupportedOrder: If v > 4 or v < 2
        errors.OutOfRange: If fewer than v−1 cumulants are given

    Examples:

    >>> petrov_coefficients([1, 6], 3)
    [-0.5, 1.0]
    >>> petrov_coefficients([1, 1, 27], 4)
    [-0.5, 0.16666666666666666, 1.0]
    >>> petrov_coefficients([1, 0, 0, 0], 5)
    Traceback (most recent call last):
      ...
    modphi.errors.UnsupportedOrder: Petrov coefficients are only available up to order 4, got 5
    """
    if v > 4 or v < 2:
        raise errors.UnsupportedOrder(
            f"Petrov coefficients are only available up to order 4, got {v}"
        )
    if len(kappas) < v - 1:
        raise errors.OutOfRange(f"need κ^(2..{v}), got {len(kappas)} values")
    k2 = kappas[0]
    if k2 == 0:
        raise errors.NonPositiveVariance("κ^(2) must not vanish")
    lambdas = [-1 / (2 * k2)]
    if v >= 3:
        k3 = kappas[1]
        lambdas.append(k3 / (6 * k2**3))
    if v >= 4:
        k4 = kappas[2]
        lambdas.append((k2 * k4 - 3 * k3**2) / (24 * k2**5))
    for hard, recursive in zip(lambdas, _petrov_recursion(kappas, v)):
        assert math.isclose(hard, recursive, rel_tol=1e-9, abs_tol=1e-12), (hard, recursive)
    return lambdas


def cumulant_moderate_petrov(
    K: list[float], alpha_n: float, T: float, v: int
) -> DeviationEstimate:
    """Order-v moderate deviations from the limits K(r) of κ^(r)(S_n)/(α_n β_n^r).

    P[S_n/(β_n σ) ≥ T] ≈ e^{−T²/(2α_n)}/√(2π T²/α_n) · exp(Σ_{r=3}^{v} λ^(r) u^r)
    with u = T/√α_n and λ^(r) the Petrov coefficients of the standardized
    cumulants K(r) α_n^{1−r/2}/σ^r. For v = 3 this is `cumulant_moderate`.
    """
    if len(K) < v - 1:
        raise errors.OutOfRange(f"need K(2..{v}), got {len(K)} values")
    sigma2 = K[0]
    if not sigma2 > 0:
        raise errors.NonPositiveVariance(f"σ² = K(2) must be positive, got {sigma2}")
    if not T > 0:
        raise errors.OutOfRange(f"T must be positive, got {T}")
    standardized = [
        K[r - 2] * alpha_n ** (1 - r / 2) / sigma2 ** (r / 2) for r in range(2, v + 1)
    ]
    lambdas = petrov_coefficients(standardized, v)
    u = T / math.sqrt(alpha_n)
    log_correction = math.fsum(lambdas[r - 2] * u**r for r in range(3, v + 1))
    leading = 1.0 / math.sqrt(2 * math.pi * T * T / alpha_n)
    rate = T * T / (2 * alpha_n)
    flags = ["above_window"] if T > alpha_n ** (1 - 1 / v) else []
    return DeviationEstimate(
        regime=Regime.CUMULANT_MODERATE,
        log_prob=-rate + math.log(leading) + log_correction,
        leading=leading,
        correction=math.exp(log_correction),
        exponent_rate=rate,
        flags=tuple(flags),
    )


def berry_esseen_cdf(model: ModPhiModel, x: float) -> float:
    """Corrected Gaussian CDF G_n(x) of (X_n − t_n η'(0))/√(t_n η''(0)).

    G_n(x) = Φ(x) − ψ'(0) g(x)/√(t_n η''(0)) − η'''(0) (x²−1) g(x)/(6 √(t_n η''(0)³)),
    g the standard normal density. The value is not clipped to [0, 1].

    Example:

    >>> m = ModPhiModel(law=reference_laws.gaussian(), t_n=25.0, psi=limiting_functions.one())
    >>> berry_esseen_cdf(m, 0.0)
    0.5
    """
    law = model.law
    t = model.t_n
    eta2 = law.variance
    density = math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
    cdf = float(scipy.special.ndtr(x))
    psi1 = model.psi_derivative(1, 0.0)
    eta3 = law.derivative(3, 0.0)
    return (
        cdf
        - psi1 * density / math.sqrt(t * eta2)
        - eta3 * (x * x - 1) * density / (6 * math.sqrt(t * eta2**3))
    )


@dataclasses.dataclass(frozen=True, kw_only=True)
class BorelBound:
    upper: float
    """Probability-scale bound e^{−t_n F(B)}/√(2π t_n) · constant; +inf when η'(0) ∈ B."""

    log_upper: float
    constant: float
    """Σ_{a∈B_min} ψ(h(a))/(|h(a)| √η''(h(a))), or the lattice variant."""

    rate: float
    """F(B) = min_{x∈B} F(x)."""

    attained_set: list[float]
    lower_tight: bool
    """Some [a, a+δ) (or (a−δ, a]) around each minimizer lies in B."""

    infinite: bool


def borel_bound(
    model: ModPhiModel,
    B: list[tuple[float, float]],
    cfg: config.Config = config.Config(),
) -> BorelBound:
    """Upper bound on P[X_n ∈ t_n B] for a finite union of closed intervals B.

    Args:
        model (ModPhiModel): The model
        B (list[tuple[float, float]]): Intervals (lo, hi); ±inf allowed as endpoints

    Raises:
        errors.NotAdmissible: If B is empty or F is infinite on all of B

    Returns:
        BorelBound: the bound, the minimizing points and the tightness flag

    Example:

    >>> m = ModPhiModel(law=reference_laws.gaussian(), t_n=10.0, psi=limiting_functions.one())
    >>> borel_bound(m, [(-1.0, 1.0)]).infinite
    True
    """
    intervals = [(float(lo), float(hi)) for lo, hi in B]
    if not intervals or any(lo > hi for lo, hi in intervals):
        raise errors.NotAdmissible(f"B must be a non-empty union of intervals lo ≤ hi: {B}")
    law = model.law
    t = model.t_n
    mean = law.mean

    if any(lo <= mean <= hi for lo, hi in intervals):
        logging.info(f"η'(0)={mean} lies in B, the bound is infinite")
        return BorelBound(
            upper=math.inf,
            log_upper=math.inf,
            constant=math.inf,
            rate=0.0,
            attained_set=[mean],
            lower_tight=True,
            infinite=True,
        )

    candidates = []
    above = [lo for lo, _ in intervals if lo > mean]
    below = [hi for _, hi in intervals if hi < mean]
    if above:
        candidates.append(min(above))
    if below:
        candidates.append(max(below))

    points = []
    for a in candidates:
        try:
            points.append(reference_laws.solve_saddle(law, a, cfg))
        except errors.OutOfRange:
            logging.debug(f"F is infinite at {a}")
    if not points:
        raise errors.NotAdmissible(f"F is infinite on all of B={B}")

    rate = min(p.F for p in points)
    minimizers = [p for p in points if math.isclose(p.F, rate, rel_tol=1e-12, abs_tol=1e-15)]

    constant = 0.0
    for p in minimizers:
        eta2 = law.derivative(2, p.h)
        if law.lattice:
            denominator = -math.expm1(-abs(p.h)) * math.sqrt(eta2)
        else:
            denominator = abs(p.h) * math.sqrt(eta2)
        constant += model.psi_value(p.h) / denominator

    def _tight(a: float) -> bool:
        delta = 1e-3 * max(abs(a), 1e-12)
        if a > mean:
            return any(lo <= a and a + delta <= hi for lo, hi in intervals)
        return any(lo <= a - delta and a <= hi for lo, hi in intervals)

    log_upper = -t * rate - 0.5 * math.log(2 * math.pi * t) + math.log(constant)
    return BorelBound(
        upper=math.exp(log_upper),
        log_upper=log_upper,
        constant=constant,
        rate=rate,
        attained_set=[p.x for p in minimizers],
        lower_tight=all(_tight(p.x) for p in minimizers),
        infinite=False,
    )
