"""
multidim_engine
"""

import dataclasses
import fractions
import functools
import itertools
import logging
import math
import typing

import numpy as np
import numpy.polynomial.legendre as legendre
import pandas as pd
import scipy.integrate
import scipy.stats

import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.util as util

VectorEvaluator = typing.Callable[[np.ndarray], float]
Indicator = typing.Callable[[np.ndarray], bool]

_WALK_STREAM = 2
_QUARTER_STREAM = 4
_GAUSS_NODES = 8
_MAX_SURFACE_POINTS = 200_000


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class MultiModGaussianModel:
    d: int
    A: np.ndarray
    """Symmetric positive definite scaling matrix."""

    t_n: float
    psi: VectorEvaluator
    """ψ on real vectors of ℝ^d."""

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        if A.shape != (self.d, self.d):
            raise errors.InvalidLaw(f"A must be {self.d}×{self.d}, got shape {A.shape}")
        if not np.allclose(A, A.T):
            raise errors.InvalidLaw("A must be symmetric")
        try:
            np.linalg.cholesky(A)
        except np.linalg.LinAlgError as ex:
            raise errors.InvalidLaw("A must be positive definite") from ex
        if not self.t_n > 0:
            raise errors.OutOfRange(f"t_n must be positive, got {self.t_n}")
        at_zero = float(self.psi(np.zeros(self.d)))
        if abs(at_zero - 1.0) > 1e-12:
            raise errors.InvalidLaw(f"ψ(0) must be 1, got {at_zero}")
        object.__setattr__(self, "A", A)


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class ConicSector:
    d: int
    b: float
    theta1: float = 0.0
    """Start of the angular interval, used for d = 2."""

    theta2: float = 2 * math.pi
    """End of the angular interval, used for d = 2."""

    indicator: Indicator | None = None
    """Membership of a unit vector in S for d ≠ 2. None means the full sphere."""

    def __post_init__(self):
        if not self.b > 0:
            raise errors.OutOfRange(f"sector radius b must be positive, got {self.b}")
        if self.d < 1:
            raise errors.OutOfRange(f"dimension must be at least 1, got {self.d}")
        if self.d == 2 and not 0 <= self.theta2 - self.theta1 <= 2 * math.pi + 1e-12:
            raise errors.OutOfRange(
                f"angular interval ({self.theta1}, {self.theta2}) must have length in [0, 2π]"
            )

    def contains(self, u: np.ndarray) -> bool:
        if self.indicator is None:
            return True
        return bool(self.indicator(u))


def full_sphere(d: int, b: float) -> ConicSector:
    return ConicSector(d=d, b=b)


def _gauss_panels(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss–Legendre on [lo, hi]."""
    x, w = legendre.leggauss(_GAUSS_NODES)
    edges = np.linspace(lo, hi, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _spherical_point(angles: typing.Sequence[float]) -> tuple[np.ndarray, float]:
    """Unit vector and surface Jacobian for hyperspherical angles φ₁…φ_{d−1}."""
    d = len(angles) + 1
    u = np.empty(d)
    sin_product = 1.0
    jacobian = 1.0
    for k, phi in enumerate(angles):
        u[k] = sin_product * math.cos(phi)
        if k < d - 2:
            jacobian *= math.sin(phi) ** (d - 2 - k)
        sin_product *= math.sin(phi)
    u[d - 1] = sin_product
    return u, jacobian


def _integrate_2d(
    model: MultiModGaussianModel, sector: ConicSector, panels: int
) -> tuple[float, float]:
    nodes, weights = _gauss_panels(sector.theta1, sector.theta2, panels)
    b = sector.b
    values = []
    for theta in nodes:
        u = np.array([math.cos(theta), math.sin(theta)])
        values.append(float(model.psi(b * (model.A @ u))))
    integral = math.fsum(w * v * b for w, v in zip(weights, values))
    measure = math.fsum(weights) * b
    return integral, measure


def _integrate_sphere(
    model: MultiModGaussianModel, sector: ConicSector, panels: int
) -> tuple[float, float]:
    d = sector.d
    b = sector.b
    polar = _gauss_panels(0.0, math.pi, panels)
    azimuth = _gauss_panels(0.0, 2 * math.pi, panels)
    grids = [polar] * (d - 2) + [azimuth]
    radius_factor = b ** (d - 1)
    integral_terms = []
    measure_terms = []
    for combo in itertools.product(*(zip(*grid) for grid in grids)):
        angles = [node for node, _ in combo]
        weight = math.prod(w for _, w in combo)
        u, jacobian = _spherical_point(angles)
        if not sector.contains(u):
            continue
        dmu = weight * jacobian * radius_factor
        measure_terms.append(dmu)
        integral_terms.append(dmu * float(model.psi(b * (model.A @ u))))
    return math.fsum(integral_terms), math.fsum(measure_terms)


def surface_integral(
    model: MultiModGaussianModel,
    sector: ConicSector,
    cfg: config.Config = config.Config(),
) -> tuple[float, float]:
    """Computes ∫_S ψ dμ on the sphere of radius b and the surface measure of S.

    d = 1 uses the counting measure on {−b, b}. d = 2 refines composite
    Gauss–Legendre in θ, d ≥ 3 refines product Gauss–Legendre in
    hyperspherical angles, until the relative change drops below
    `cfg.surface_tolerance`. ψ is evaluated at b·A·u for unit vectors u.

    Returns:
        tuple[float, float]: (integral, surface measure)

    Example: Full circle of radius 2 and ψ ≡ 1

    >>> m = MultiModGaussianModel(d=2, A=np.eye(2), t_n=1.0, psi=lambda z: 1.0)
    >>> integral, measure = surface_integral(m, full_sphere(2, 2.0))
    >>> round(integral / math.pi, 10), round(measure / math.pi, 10)
    (4.0, 4.0)
    """
    if sector.d != model.d:
        raise errors.OutOfRange(f"sector dimension {sector.d} does not match model dimension {model.d}")
    if sector.d == 1:
        integral = 0.0
        measure = 0.0
        for sign in (1.0, -1.0):
            u = np.array([sign])
            if sector.contains(u):
                measure += 1.0
                integral += float(model.psi(sector.b * (model.A @ u)))
        return integral, measure

    integrate = _integrate_2d if sector.d == 2 else _integrate_sphere
    panels = 1
    previous, measure = integrate(model, sector, panels)
    while True:
        panels *= 2
        if (panels * _GAUSS_NODES) ** max(1, sector.d - 1) > _MAX_SURFACE_POINTS:
            logging.warning(
                f"surface quadrature stopped at {panels // 2} panels before reaching relative change {cfg.surface_tolerance}"
            )
            return previous, measure
        current, measure = integrate(model, sector, panels)
        if abs(current - previous) <= cfg.surface_tolerance * max(abs(current), 1e-300):
            return current, measure
        previous = current


def conic_probability(
    model: MultiModGaussianModel,
    sector: ConicSector,
    cfg: config.Config = config.Config(),
) -> deviation_engine.DeviationEstimate:
    """Estimates the probability that the normalized variable lies in the cone [1, ∞)·bS.

    (t_n/2π)^{d/2} e^{−t_n b²/2} ∫_S ψ(x)/(t_n b) dμ(x)

    Raises:
        errors.DegenerateSector: If S has zero surface measure

    Example: d = 2, full circle, ψ ≡ 1 gives exactly e^{−t_n b²/2}

    >>> m = MultiModGaussianModel(d=2, A=np.eye(2), t_n=10.0, psi=lambda z: 1.0)
    >>> e = conic_probability(m, full_sphere(2, 1.0))
    >>> e.exponent_rate, round(e.leading, 10)
    (5.0, 1.0)
    """
    integral, measure = surface_integral(model, sector, cfg)
    if measure == 0:
        raise errors.DegenerateSector(f"sector of dimension {sector.d} has zero surface measure")
    t = model.t_n
    b = sector.b
    leading = (t / (2 * math.pi)) ** (sector.d / 2) * integral / (t * b)
    return deviation_engine.build_estimate(deviation_engine.Regime.CONIC, t * b * b / 2, leading)


def walk_psi_2d(r: float, theta: float) -> float:
    """The angular limiting function exp(−r⁴ sin²(2θ)/96) of the planar walk."""
    return math.exp(-(r**4) * math.sin(2 * theta) ** 2 / 96)


@functools.lru_cache(maxsize=256)
def _angle_normalizer(r: float, tolerance: float) -> float:
    value, _ = scipy.integrate.quad(
        lambda theta: walk_psi_2d(r, theta),
        0.0,
        2 * math.pi,
        epsabs=tolerance,
        epsrel=tolerance,
        limit=200,
        points=[k * math.pi / 4 for k in range(1, 8)],
    )
    return value


def walk2d_angle_density(
    r: float, theta: float, cfg: config.Config = config.Config()
) -> float:
    """Normalized density of the endpoint angle of a planar walk conditioned to be far.

    Args:
        r (float): Threshold coefficient, ≥ 0
        theta (float): Angle

    Examples:

    >>> round(walk2d_angle_density(0.0, 1.0) * 2 * math.pi, 12)
    1.0
    >>> r = 96 ** 0.25
    >>> round(walk2d_angle_density(r, 0.0) / walk2d_angle_density(r, math.pi / 4), 12) == round(math.e, 12)
    True
    """
    if r < 0:
        raise errors.OutOfRange(f"r must be non-negative, got {r}")
    return walk_psi_2d(r, theta) / _angle_normalizer(float(r), cfg.normalizer_tolerance)


def walk2d_validity(n: int, r: float) -> bool:
    """Whether r stays below n^{1/12}, the range the angular density is stated for.

    >>> walk2d_validity(4096, 2.0), walk2d_validity(4096, 2.5)
    (True, False)
    """
    return r <= n ** (1.0 / 12.0) + 1e-12


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class WalkHistogram:
    n: int
    r: float
    trials: int
    accepted: int
    edges: np.ndarray
    counts: np.ndarray
    theoretical: np.ndarray
    """Bin probabilities of `walk2d_angle_density`."""

    valid: bool
    """r ≤ n^{1/12}."""

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.trials

    @property
    def empirical(self) -> np.ndarray:
        return self.counts / self.accepted

    @property
    def tv_distance(self) -> float:
        return 0.5 * float(np.abs(self.empirical - self.theoretical).sum())

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "theta_bin": (self.edges[:-1] + self.edges[1:]) / 2,
                "empirical": self.empirical,
                "theoretical": self.theoretical,
            }
        )


def walk2d_conditional_mc(
    n: int,
    r: float,
    trials: int,
    seed: int | None = None,
    cfg: config.Config = config.Config(),
) -> WalkHistogram:
    """Histograms the endpoint angle of simple planar walks with ‖S_n‖ ≥ r n^{3/4}.

    Walk endpoints are drawn exactly through the multinomial law of the step
    counts. Randomness comes from `util.run_chunks`, so the histogram only
    depends on (seed, trials, chunk size).

    Args:
        n (int): Number of steps, at least 100
        r (float): Threshold coefficient
        trials (int): Number of walks
        seed (int, optional): Overrides `cfg.seed`

    Raises:
        errors.OutOfRange: If n < 100 or r < 0
        errors.BudgetExceeded: If trials·n exceeds `cfg.budget`
        errors.ZeroAcceptance: If no walk reaches the threshold

    Returns:
        WalkHistogram: counts over `cfg.bins` angular bins with the theoretical bin masses
    """
    if n < 100:
        raise errors.OutOfRange(f"walk length must be at least 100, got {n}")
    if r < 0:
        raise errors.OutOfRange(f"r must be non-negative, got {r}")
    if trials * n > cfg.budget:
        raise errors.BudgetExceeded(f"trials·n = {trials * n} exceeds the budget {cfg.budget}")
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)

    expected = math.exp(-math.sqrt(n) * r * r)
    if expected < 1e-4:
        logging.warning(f"expected acceptance rate {expected:.3g} is below 1e-4")
    if not walk2d_validity(n, r):
        logging.warning(f"r={r} exceeds n^(1/12)={n ** (1 / 12):.4g}, the angular density may not apply")

    edges = np.linspace(0.0, 2 * math.pi, cfg.bins + 1)
    threshold = r * r * n**1.5

    def _sample(rng: np.random.Generator, size: int) -> tuple[np.ndarray, int]:
        steps = rng.multinomial(n, [0.25] * 4, size=size)
        x = steps[:, 0] - steps[:, 1]
        y = steps[:, 2] - steps[:, 3]
        keep = x.astype(np.float64) ** 2 + y.astype(np.float64) ** 2 >= threshold
        theta = np.mod(np.arctan2(y[keep], x[keep]), 2 * math.pi)
        counts, _ = np.histogram(theta, bins=edges)
        return counts.astype(np.int64), int(keep.sum())

    parts = util.run_chunks(_WALK_STREAM, trials, _sample, cfg)
    counts = np.zeros(cfg.bins, dtype=np.int64)
    accepted = 0
    for part_counts, part_accepted in parts:
        counts += part_counts
        accepted += part_accepted
    if accepted == 0:
        raise errors.ZeroAcceptance(f"no walk of length {n} out of {trials} reached r={r}")

    theoretical = np.array(
        [
            scipy.integrate.quad(
                lambda theta: walk2d_angle_density(r, theta, cfg), lo, hi, epsabs=cfg.normalizer_tolerance
            )[0]
            for lo, hi in zip(edges[:-1], edges[1:])
        ]
    )
    logging.info(f"accepted {accepted} of {trials} walks of length {n}")
    return WalkHistogram(
        n=n,
        r=r,
        trials=trials,
        accepted=accepted,
        edges=edges,
        counts=counts,
        theoretical=theoretical,
        valid=walk2d_validity(n, r),
    )


@dataclasses.dataclass(frozen=True, kw_only=True, eq=False)
class QuarterTurnTest:
    n: int
    trials: int
    counts: np.ndarray
    """counts[q, s]: endpoints in quarter q, below (s = 0) or on and above (s = 1) the diagonal."""

    p_value: float
    """Chi-square homogeneity of the four quarters."""


def walk2d_quarter_turn_test(
    n: int,
    trials: int,
    seed: int | None = None,
    cfg: config.Config = config.Config(),
) -> QuarterTurnTest:
    """Tests the unconditioned walk endpoint for invariance under quarter turns.

    Each endpoint is rotated back into the quarter u > 0, v ≥ 0 and split by the
    diagonal with integer comparisons only, so lattice points on bin borders are
    assigned consistently. The origin is dropped; odd n never reaches it.

    Raises:
        errors.OutOfRange: If n < 1
        errors.BudgetExceeded: If trials·n exceeds `cfg.budget`
    """
    if n < 1:
        raise errors.OutOfRange(f"walk length must be positive, got {n}")
    if trials * n > cfg.budget:
        raise errors.BudgetExceeded(f"trials·n = {trials * n} exceeds the budget {cfg.budget}")
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)

    def _sample(rng: np.random.Generator, size: int) -> np.ndarray:
        steps = rng.multinomial(n, [0.25] * 4, size=size)
        u = steps[:, 0] - steps[:, 1]
        v = steps[:, 2] - steps[:, 3]
        counts = np.zeros((4, 2), dtype=np.int64)
        for quarter in range(4):
            inside = (u > 0) & (v >= 0)
            counts[quarter, 0] = int((inside & (v < u)).sum())
            counts[quarter, 1] = int((inside & (v >= u)).sum())
            u, v = v, -u
        return counts

    counts = sum(util.run_chunks(_QUARTER_STREAM, trials, _sample, cfg), np.zeros((4, 2), dtype=np.int64))
    p_value = float(scipy.stats.chi2_contingency(counts).pvalue)
    logging.info(f"quarter-turn test on {trials} walks of length {n}: p = {p_value:.4g}")
    return QuarterTurnTest(n=n, trials=trials, counts=counts, p_value=p_value)


def walk_step_cumulant4(d: int, z: typing.Sequence) -> fractions.Fraction | float:
    """Exact fourth cumulant of ⟨z, X⟩ for X uniform on the 2d unit steps ±e_i.

    Integer or Fraction coordinates give an exact Fraction.

    Example:

    >>> walk_step_cumulant4(2, [1, 0])
    Fraction(-1, 4)
    """
    if d < 1 or len(z) != d:
        raise errors.OutOfRange(f"need a vector of length d={d}, got {len(z)}")
    values = [sign * c for c in z for sign in (1, -1)]
    p = fractions.Fraction(1, 2 * d)
    m2 = sum(p * v**2 for v in values)
    m4 = sum(p * v**4 for v in values)
    # odd moments vanish by symmetry
    return m4 - 3 * m2**2


def dwalk_kurtosis_psi(d: int, z: typing.Sequence[float]) -> float:
    """Fourth-cumulant limiting function exp(κ⁴(⟨z, X⟩)/24) of the simple walk in ℤ^d.

    For d = 2 this is exp(−(z₁⁴ + z₂⁴ + 6 (z₁z₂)²)/96).

    Examples:

    >>> dwalk_kurtosis_psi(2, [0.0, 0.0])
    1.0
    >>> abs(dwalk_kurtosis_psi(2, [2.0, 0.0]) - math.exp(-16 / 96)) < 1e-15
    True
    """
    if d < 2:
        raise errors.OutOfRange(f"dimension must be at least 2, got {d}")
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (d,):
        raise errors.OutOfRange(f"need a vector of length d={d}, got shape {z.shape}")
    s2 = float(np.sum(z**2))
    s4 = float(np.sum(z**4))
    return math.exp((s4 / d - 3 * s2 * s2 / d**2) / 24)
