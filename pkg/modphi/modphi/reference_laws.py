"""
reference_laws
"""

import cmath
import dataclasses
import fractions
import logging
import math
import pathlib
import sys
import typing

import regex
import scipy.special

import modphi.config as config
import modphi.errors as errors
import modphi.util as util

Evaluator = typing.Callable[[complex], complex]
RealEvaluator = typing.Callable[[float], float]

# Above this argument erfc underflows in double precision and the asymptotic
# series takes over.
_TAIL_SWITCH = 38.0


@dataclasses.dataclass(frozen=True, kw_only=True)
class ReferenceLaw:
    name: str
    """One of gaussian, poisson, bernoulli, exponential or the name of a custom law."""

    eta: Evaluator
    """Cumulant generating function η(z) on the strip."""

    eta_derivs: tuple[RealEvaluator, ...] | None = None
    """η', η'', η''', η'''' on the real axis. None means central finite differences."""

    strip_halfwidth: float = math.inf
    """The c of the strip |Re z| < c on which η is analytic."""

    lattice: bool = False
    lattice_span: float = 1.0

    def __post_init__(self):
        if not self.strip_halfwidth > 0:
            raise errors.InvalidLaw(
                f"strip half-width must be positive: {self.strip_halfwidth}"
            )
        if not self.lattice_span > 0:
            raise errors.InvalidLaw(f"lattice span must be positive: {self.lattice_span}")
        eta0 = complex(self.eta(0.0))
        if abs(eta0) > 1e-12:
            raise errors.InvalidLaw(f"law {self.name} has η(0) = {eta0} instead of 0")
        if self.eta_derivs is not None and len(self.eta_derivs) != 4:
            raise errors.InvalidLaw(
                f"law {self.name} needs exactly four derivative evaluators, got {len(self.eta_derivs)}"
            )

    def eta_real(self, h: float) -> float:
        """η(h) for real h. Overflow is reported as +inf."""
        try:
            return float(complex(self.eta(h)).real)
        except OverflowError:
            return math.inf

    def derivative(self, order: int, h: float) -> float:
        """Returns η^(order)(h) for a real h and an order between 1 and 4.

        Overflow of η' is reported as an infinity with the sign of h, which is
        what the bracketing in `solve_saddle` expects from an increasing map.
        """
        try:
            if self.eta_derivs is not None:
                return float(self.eta_derivs[order - 1](h))
            return util.central_derivative(self.eta_real, h, order)
        except (OverflowError, ZeroDivisionError):
            if order == 1:
                return math.copysign(math.inf, h)
            return math.inf

    @property
    def mean(self) -> float:
        """η'(0)"""
        return self.derivative(1, 0.0)

    @property
    def variance(self) -> float:
        """η''(0)"""
        return self.derivative(2, 0.0)


@dataclasses.dataclass(frozen=True, kw_only=True)
class LegendrePoint:
    x: float
    h: float
    """Saddle point, the unique solution of η'(h) = x."""

    F: float
    """Rate F(x) = x h − η(h) ≥ 0."""

    Fp: float
    """F'(x), equal to h."""

    Fpp: float
    """F''(x) = 1/η''(h)."""


def gaussian(m: float = 0.0, s2: float = 1.0) -> ReferenceLaw:
    """The normal law N(m, s2) with η(z) = m z + s2 z²/2.

    Example:

    >>> law = gaussian(1.0, 4.0)
    >>> law.mean, law.variance
    (1.0, 4.0)
    """
    if not s2 > 0:
        raise errors.InvalidLaw(f"gaussian variance must be positive: {s2}")
    return ReferenceLaw(
        name="gaussian",
        eta=lambda z: m * z + s2 * z * z / 2,
        eta_derivs=(
            lambda h: m + s2 * h,
            lambda h: s2,
            lambda h: 0.0,
            lambda h: 0.0,
        ),
    )


def poisson(lam: float = 1.0) -> ReferenceLaw:
    """The Poisson law of parameter lam, η(z) = lam (e^z − 1), lattice span 1.

    Example:

    >>> law = poisson(2.0)
    >>> law.lattice, law.mean
    (True, 2.0)
    """
    if not lam > 0:
        raise errors.InvalidLaw(f"poisson parameter must be positive: {lam}")

    def _d(h: float) -> float:
        return lam * math.exp(h)

    return ReferenceLaw(
        name="poisson",
        eta=lambda z: lam * (cmath.exp(z) - 1),
        eta_derivs=(_d, _d, _d, _d),
        lattice=True,
    )


def bernoulli(q: float) -> ReferenceLaw:
    """The Bernoulli law B(q), η(z) = log(1 − q + q e^z), lattice span 1.

    Not infinitely divisible; used for the i.i.d. sums of the Bahadur–Rao
    comparison, where only real arguments occur.
    """
    if not 0 < q < 1:
        raise errors.InvalidLaw(f"bernoulli parameter must lie in (0, 1): {q}")

    def _p(h: float) -> float:
        # q e^h / (1 − q + q e^h) written without overflow
        return scipy.special.expit(h + math.log(q) - math.log1p(-q))

    return ReferenceLaw(
        name="bernoulli",
        eta=lambda z: cmath.log(1 - q + q * cmath.exp(z)),
        eta_derivs=(
            _p,
            lambda h: _p(h) * (1 - _p(h)),
            lambda h: _p(h) * (1 - _p(h)) * (1 - 2 * _p(h)),
            lambda h: _p(h) * (1 - _p(h)) * (1 - 6 * _p(h) + 6 * _p(h) ** 2),
        ),
        lattice=True,
    )


def exponential() -> ReferenceLaw:
    """The standard exponential law, η(z) = −log(1 − z), analytic for Re z < 1."""
    return ReferenceLaw(
        name="exponential",
        eta=lambda z: -cmath.log(1 - z),
        eta_derivs=(
            lambda h: 1 / (1 - h),
            lambda h: 1 / (1 - h) ** 2,
            lambda h: 2 / (1 - h) ** 3,
            lambda h: 6 / (1 - h) ** 4,
        ),
        strip_halfwidth=1.0,
    )


def custom(
    name: str,
    eta: Evaluator,
    eta_derivs: tuple[RealEvaluator, ...] | None = None,
    strip_halfwidth: float = math.inf,
    lattice: bool = False,
    lattice_span: float = 1.0,
) -> ReferenceLaw:
    """A law given by its η only. Derivatives default to central differences.

    Example:

    >>> law = custom("shifted", lambda z: 2 * z + z * z)
    >>> round(law.derivative(2, 0.3), 5)
    2.0
    """
    return ReferenceLaw(
        name=name,
        eta=eta,
        eta_derivs=eta_derivs,
        strip_halfwidth=strip_halfwidth,
        lattice=lattice,
        lattice_span=lattice_span,
    )


def _bracket(law: ReferenceLaw, x: float, direction: int) -> tuple[float, float]:
    """Returns (lo, hi) with η'(lo) ≤ x ≤ η'(hi), grown geometrically from 0."""
    c = law.strip_halfwidth
    inner = 0.0
    for k in range(1, 64):
        if math.isinf(c):
            outer = direction * 2.0 ** (k - 1)
        else:
            outer = direction * c * (1.0 - 2.0**-k)
        value = law.derivative(1, outer)
        if math.isnan(value):
            break
        if (value - x) * direction >= 0:
            return (inner, outer) if direction > 0 else (outer, inner)
        inner = outer
    raise errors.OutOfRange(
        f"x={x} lies outside the image of η' for law {law.name} on (−{c}, {c})"
    )


def solve_saddle(
    law: ReferenceLaw, x: float, cfg: config.Config = config.Config()
) -> LegendrePoint:
    """Solves η'(h) = x and returns the Legendre–Fenchel data at x.

    Safeguarded Newton iteration on the increasing map h ↦ η'(h), with
    bisection whenever the Newton step leaves the current bracket.

    Args:
        law (ReferenceLaw): Reference law
        x (float): Point at which to evaluate the transform
        cfg (config.Config, optional): Supplies the tolerance and iteration budget.

    Raises:
        errors.OutOfRange: If x is not in the image of η' on the strip
        errors.NonConvergence: If the iteration budget is exhausted
        errors.InvalidLaw: If η'' is not positive at the solution

    Returns:
        LegendrePoint: x, h, F(x), F'(x) and F''(x)

    Examples:

    >>> p = solve_saddle(gaussian(0, 1), 2.0)
    >>> p.h, p.F, p.Fpp
    (2.0, 2.0, 1.0)

    >>> p = solve_saddle(poisson(1.0), math.e)
    >>> round(p.h, 12), round(p.F, 12)
    (1.0, 1.0)

    >>> solve_saddle(exponential(), -0.5)
    Traceback (most recent call last):
      ...
    modphi.errors.OutOfRange: x=-0.5 lies outside the image of η' for law exponential on (−1.0, 1.0)
    """
    if math.isnan(x) or math.isinf(x):
        raise errors.OutOfRange(f"x={x} is not a finite number")
    tol = cfg.saddle_tolerance * max(1.0, abs(x))

    def residual(h: float) -> float:
        return law.derivative(1, h) - x

    g = residual(0.0)
    if abs(g) <= tol:
        h = 0.0
    else:
        lo, hi = _bracket(law, x, 1 if g < 0 else -1)
        h = 0.0
        for iteration in range(cfg.saddle_max_iterations):
            g = residual(h)
            if math.isnan(g):
                raise errors.NonConvergence(
                    f"η'(h) evaluated to nan at h={h} for law {law.name}"
                )
            if abs(g) <= tol:
                break
            if g < 0:
                lo = max(lo, h)
            else:
                hi = min(hi, h)
            if hi - lo <= 4 * sys.float_info.epsilon * max(1.0, abs(h)):
                logging.debug(
                    f"bracket collapsed at h={h} with residual {g} for law {law.name}"
                )
                break
            slope = law.derivative(2, h)
            step_ok = slope > 0 and math.isfinite(slope)
            candidate = h - g / slope if step_ok else math.nan
            if not (lo <= candidate <= hi):
                candidate = 0.5 * (lo + hi)
            h = candidate
        else:
            raise errors.NonConvergence(
                f"saddle point for x={x} not found within {cfg.saddle_max_iterations} iterations for law {law.name}"
            )

    eta2 = law.derivative(2, h)
    if not eta2 > 0:
        raise errors.InvalidLaw(f"law {law.name} is degenerate at h={h}: η''={eta2}")
    rate = max(x * h - law.eta_real(h), 0.0)
    return LegendrePoint(x=x, h=h, F=rate, Fp=h, Fpp=1.0 / eta2)


def legendre_grid(
    law: ReferenceLaw, xs: list[float], cfg: config.Config = config.Config()
) -> list[LegendrePoint]:
    """Element-wise `solve_saddle`, in input order.

    Raises:
        errors.OutOfRange: With the index of the first inadmissible element

    Example:

    >>> [p.F for p in legendre_grid(gaussian(0, 1), [-1.0, 0.0, 1.0])]
    [0.5, 0.0, 0.5]
    """
    points = []
    for index, x in enumerate(xs):
        try:
            points.append(solve_saddle(law, x, cfg))
        except errors.OutOfRange as ex:
            raise errors.OutOfRange(str(ex), index=index) from ex
    return points


def _tail_series(a: float) -> float:
    """1 − 1/a² + 3/a⁴ − 15/a⁶ + 105/a⁸, the Gaussian Mills ratio series."""
    inv = 1.0 / (a * a)
    return 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)))


def gaussian_tail(a: float) -> float:
    """Returns P[N(0,1) ≥ a].

    Examples:

    >>> gaussian_tail(0.0)
    0.5
    >>> round(gaussian_tail(1.0), 12)
    0.158655253931
    >>> round(gaussian_tail(-1.0) + gaussian_tail(1.0), 13)
    1.0
    """
    if a <= _TAIL_SWITCH:
        return 0.5 * float(scipy.special.erfc(a / math.sqrt(2.0)))
    return math.exp(-a * a / 2) / (a * math.sqrt(2 * math.pi)) * _tail_series(a)


def log_gaussian_tail(a: float) -> float:
    """Returns log P[N(0,1) ≥ a], finite far beyond the underflow of `gaussian_tail`.

    Example:

    >>> round(log_gaussian_tail(0.0), 12)
    -0.69314718056
    >>> round(log_gaussian_tail(60.0) + 1800.0 + math.log(60.0 * math.sqrt(2 * math.pi)), 3)
    -0.0
    """
    if a <= _TAIL_SWITCH:
        return float(scipy.special.log_ndtr(-a))
    return (
        -a * a / 2
        - math.log(a * math.sqrt(2 * math.pi))
        + math.log(_tail_series(a))
    )


# A term of a custom η: coefficient, power of z, power of e^z.
EtaTerm = tuple[fractions.Fraction, int, int]


def parse_eta_expression(text: str) -> list[EtaTerm]:
    """Parses a sum of terms `coef * z^k * exp(z)^m` into (coef, k, m) triples.

    Coefficients are rationals ("1/2", "0.25", "3"); both powers are optional
    and default to one when the factor is present without exponent.

    Raises:
        ValueError: If a term cannot be parsed

    Examples:

    >>> parse_eta_expression("exp(z) - 1")
    [(Fraction(1, 1), 0, 1), (Fraction(-1, 1), 0, 0)]

    >>> parse_eta_expression("1/2*z^2 + 3*z")
    [(Fraction(1, 2), 2, 0), (Fraction(3, 1), 1, 0)]

    >>> parse_eta_expression("2*log(z)")
    Traceback (most recent call last):
      ...
    ValueError: invalid factor in η expression: log(z)
    """
    compact = regex.sub(pattern=r"\s+", repl="", string=text)
    if compact == "":
        raise ValueError("empty η expression")
    terms: list[EtaTerm] = []
    for sign, body in regex.findall(pattern=r"([+-]?)([^+-]+)", string=compact):
        coef = fractions.Fraction(-1 if sign == "-" else 1)
        k = 0
        m = 0
        for factor in body.split("*"):
            if regex.fullmatch(pattern=r"[0-9]+(/[0-9]+)?|[0-9]*\.[0-9]+", string=factor):
                coef *= fractions.Fraction(factor)
            elif match := regex.fullmatch(pattern=r"z(\^([0-9]+))?", string=factor):
                k += int(match[2]) if match[2] else 1
            elif match := regex.fullmatch(pattern=r"exp\(z\)(\^([0-9]+))?", string=factor):
                m += int(match[2]) if match[2] else 1
            else:
                raise ValueError(f"invalid factor in η expression: {factor}")
        terms.append((coef, k, m))
    return terms


def _differentiate(terms: list[EtaTerm]) -> list[EtaTerm]:
    out: list[EtaTerm] = []
    for coef, k, m in terms:
        if k > 0:
            out.append((coef * k, k - 1, m))
        if m != 0:
            out.append((coef * m, k, m))
    return out


def _evaluator(terms: list[EtaTerm]) -> Evaluator:
    frozen = [(complex(float(c)), k, m) for c, k, m in terms]

    def evaluate(z):
        return sum(c * z**k * cmath.exp(m * z) for c, k, m in frozen)

    return evaluate


def custom_from_expression(
    name: str,
    expression: str,
    strip_halfwidth: float = math.inf,
    lattice: bool = False,
) -> ReferenceLaw:
    """Builds a custom law from a term expression with exact derivatives.

    Example:

    >>> law = custom_from_expression("poisson-like", "exp(z) - 1", lattice=True)
    >>> law.mean, law.variance
    (1.0, 1.0)
    """
    terms = parse_eta_expression(expression)
    derivs = []
    current = terms
    for _ in range(4):
        current = _differentiate(current)
        evaluator = _evaluator(current)
        derivs.append(lambda h, e=evaluator: complex(e(h)).real)
    return custom(
        name=name,
        eta=_evaluator(terms),
        eta_derivs=tuple(derivs),
        strip_halfwidth=strip_halfwidth,
        lattice=lattice,
    )


def custom_law_from_file(path: str | pathlib.Path) -> ReferenceLaw:
    """Reads a custom law file made of `key = value` lines.

    Recognized keys are `name`, `eta`, `lattice` and `strip`; `#` starts a
    comment.

    Raises:
        ValueError: If `eta` is missing or a line is malformed

    Example:

    >>> import modphi.file_access as file_access
    >>> p = file_access.write_to_temp_file("# Poisson(2)\\neta = 2*exp(z) - 2\\nlattice = true\\n")
    >>> law = custom_law_from_file(p)
    >>> law.name, law.lattice, law.mean
    ('custom', True, 2.0)
    """
    values: dict[str, str] = {}
    for lineno, line in enumerate(pathlib.Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line == "":
            continue
        match = regex.fullmatch(pattern=r"([a-z_]+)\s*=\s*(.+)", string=line)
        if match is None:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got: {line}")
        values[match[1]] = match[2].strip()
    if "eta" not in values:
        raise ValueError(f"{path}: missing 'eta' entry")
    unknown = set(values) - {"name", "eta", "lattice", "strip"}
    if unknown:
        logging.warning(f"{path}: ignoring unknown keys {sorted(unknown)}")
    return custom_from_expression(
        name=values.get("name", "custom"),
        expression=values["eta"],
        strip_halfwidth=float(values.get("strip", "inf")),
        lattice=values.get("lattice", "false").lower() in ("true", "yes", "1"),
    )
