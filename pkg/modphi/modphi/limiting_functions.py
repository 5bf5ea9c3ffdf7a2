"""
limiting_functions
"""

import cmath
import dataclasses
import enum
import functools
import logging
import math
import typing

import numpy as np
import scipy.special

import modphi.errors as errors
import modphi.util as util

# ζ'(−1) = 1/12 − log(Glaisher's constant)
_ZETA_PRIME_MINUS_ONE = -0.16542114370045092

# Below this argument log G is shifted upwards through G(x+1) = Γ(x) G(x)
# before the asymptotic series is used.
_BARNES_SWITCH = 10.0


@enum.unique
class PsiKind(util.StrEnum):
    EXP_MONOMIAL = "exp_monomial"  # exp(L z^v / v!)
    INV_GAMMA_EXP = "inv_gamma_exp"  # 1/Γ(e^z)
    GAMMA_RATIO = "gamma_ratio"  # Γ(θ)/Γ(θ e^z)
    BARNES_RATIO = "barnes_ratio"  # ratios of Barnes G on the real axis
    WEIERSTRASS_PRODUCT = "weierstrass_product"  # ∏_A Π_A(e^z − 1)
    CUSTOM = "custom"  # user supplied evaluator


@enum.unique
class IndexSet(util.StrEnum):
    PRIMES = "primes"
    INTEGERS = "integers"

    @property
    def smallest(self) -> int:
        """Smallest element of the index set.

        Example:

        >>> IndexSet.PRIMES.smallest, IndexSet.INTEGERS.smallest
        (2, 1)
        """
        return 2 if self == IndexSet.PRIMES else 1


@enum.unique
class BarnesGroup(util.StrEnum):
    USP = "usp"  # G(3/2)/G(3/2+x)
    SO_EVEN = "so_even"  # G(1/2)/G(1/2+x)
    U_REAL = "u_real"  # G(1+x/2)²/G(1+x)


@dataclasses.dataclass(frozen=True, kw_only=True)
class LimitingFunction:
    kind: PsiKind
    evaluator: typing.Callable[[complex], complex]
    params: dict = dataclasses.field(default_factory=dict)
    """Parameters of the kind, e.g. {"L": 1, "v": 3}. Informational and used for output."""

    def __call__(self, z: complex) -> complex:
        return eval_psi(self, z)

    def real(self, h: float) -> float:
        """ψ(h) for a real h, as a float."""
        return float(complex(eval_psi(self, h)).real)

    def derivative(self, order: int, h: float, base: float = 1e-4) -> float:
        """ψ^(order)(h) by central differences on the real axis.

        Example:

        >>> abs(exp_monomial(L=6.0, v=3).derivative(1, 0.0)) < 1e-8
        True
        """
        return util.central_derivative(self.real, h, order, base)

    @property
    def label(self) -> str:
        """Human readable kind and parameters.

        Example:

        >>> exp_monomial(L=1.0, v=3).label
        'exp_monomial(L=1.0, v=3)'
        """
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.kind}({args})"


def eval_psi(psi: LimitingFunction, z: complex) -> complex:
    """Evaluates ψ at z.

    Raises:
        errors.DomainError: If z is outside the domain of the kind

    Examples:

    >>> eval_psi(exp_monomial(L=1.0, v=3), 0)
    (1+0j)
    >>> abs(eval_psi(inv_gamma_exp(), 0) - 1) < 1e-12
    True
    >>> abs(eval_psi(gamma_ratio(2.0), 0) - 1) < 1e-12
    True
    """
    try:
        value = complex(psi.evaluator(z))
    except (OverflowError, ZeroDivisionError) as ex:
        raise errors.DomainError(f"{psi.label} cannot be evaluated at z={z}: {ex}") from ex
    if cmath.isnan(value):
        raise errors.DomainError(f"{psi.label} is undefined at z={z}")
    return value


def exp_monomial(L: float, v: int) -> LimitingFunction:
    """ψ(z) = exp(L z^v / v!), the residue of a sequence with one dominant cumulant."""
    scale = L / math.factorial(v)
    return LimitingFunction(
        kind=PsiKind.EXP_MONOMIAL,
        evaluator=lambda z: cmath.exp(scale * z**v),
        params={"L": L, "v": v},
    )


def one() -> LimitingFunction:
    """The trivial limiting function ψ ≡ 1."""
    return LimitingFunction(
        kind=PsiKind.EXP_MONOMIAL, evaluator=lambda z: 1.0, params={"L": 0.0, "v": 1}
    )


def inv_gamma_exp() -> LimitingFunction:
    """ψ(z) = 1/Γ(e^z). Entire, so no domain restriction."""
    return LimitingFunction(
        kind=PsiKind.INV_GAMMA_EXP,
        evaluator=lambda z: scipy.special.rgamma(cmath.exp(z)),
    )


def gamma_ratio(theta: float) -> LimitingFunction:
    """ψ(w) = Γ(θ)/Γ(θ e^w) for θ > 0."""
    if not theta > 0:
        raise errors.DomainError(f"gamma_ratio needs θ > 0, got {theta}")
    gamma_theta = scipy.special.gamma(theta)
    return LimitingFunction(
        kind=PsiKind.GAMMA_RATIO,
        evaluator=lambda w: gamma_theta * scipy.special.rgamma(theta * cmath.exp(w)),
        params={"theta": theta},
    )


def barnes_log_G(x: float) -> float:
    """Returns log G(x) for real x > 0, G being the Barnes G-function.

    Uses the asymptotic series of log G(z+1) for x ≥ 10 and the functional
    equation G(x+1) = Γ(x) G(x) to shift smaller arguments up.

    Raises:
        errors.DomainError: If x ≤ 0

    Examples:

    >>> abs(barnes_log_G(1.0)) < 1e-10, abs(barnes_log_G(2.0)) < 1e-10, abs(barnes_log_G(3.0)) < 1e-10
    (True, True, True)
    >>> round(barnes_log_G(4.0), 10) == round(math.log(2.0), 10)
    True
    >>> barnes_log_G(0.0)
    Traceback (most recent call last):
      ...
    modphi.errors.DomainError: Barnes G is only evaluated for x > 0, got 0.0
    """
    if not x > 0:
        raise errors.DomainError(f"Barnes G is only evaluated for x > 0, got {x}")
    shift = 0
    if x < _BARNES_SWITCH:
        shift = math.ceil(_BARNES_SWITCH - x)
    z = x + shift - 1.0
    log_z = math.log(z)
    inv2 = 1.0 / (z * z)
    series = inv2 * (
        -1.0 / 240
        + inv2
        * (
            1.0 / 1008
            + inv2
            * (
                -1.0 / 1440
                + inv2 * (1.0 / 1056 + inv2 * (-691.0 / 327600 + inv2 / 144))
            )
        )
    )
    value = (
        z * z / 2 * (log_z - 1.5)
        + z / 2 * math.log(2 * math.pi)
        - log_z / 12
        + _ZETA_PRIME_MINUS_ONE
        + series
    )
    if shift:
        value -= math.fsum(scipy.special.gammaln(x + j) for j in range(shift))
    return value


def _real_argument(z: complex, label: str) -> float:
    z = complex(z)
    if z.imag != 0:
        raise errors.DomainError(f"{label} is only evaluated on the real axis, got {z}")
    return z.real


def barnes_ratio(group: BarnesGroup | str) -> LimitingFunction:
    """Barnes-G limiting functions of characteristic polynomials, real axis only.

    Example:

    >>> round(barnes_ratio("usp").real(0.0), 12)
    1.0
    >>> barnes_ratio("u_real")(1j)
    Traceback (most recent call last):
      ...
    modphi.errors.DomainError: barnes_ratio is only evaluated on the real axis, got 1j
    """
    group = BarnesGroup(group)
    label = str(PsiKind.BARNES_RATIO)

    if group == BarnesGroup.USP:

        def evaluate(z):
            x = _real_argument(z, label)
            return math.exp(barnes_log_G(1.5) - barnes_log_G(1.5 + x))

    elif group == BarnesGroup.SO_EVEN:

        def evaluate(z):
            x = _real_argument(z, label)
            return math.exp(barnes_log_G(0.5) - barnes_log_G(0.5 + x))

    else:

        def evaluate(z):
            x = _real_argument(z, label)
            return math.exp(2 * barnes_log_G(1 + x / 2) - barnes_log_G(1 + x))

    return LimitingFunction(
        kind=PsiKind.BARNES_RATIO, evaluator=evaluate, params={"group": str(group)}
    )


@functools.lru_cache(maxsize=16)
def _index_array(index_set: IndexSet, K: int) -> np.ndarray:
    if index_set == IndexSet.INTEGERS:
        return np.arange(1, K + 1, dtype=np.float64)
    sieve = np.ones(K + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(K) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    logging.debug(f"sieved {int(sieve.sum())} primes up to {K}")
    return np.nonzero(sieve)[0].astype(np.float64)


def primes_up_to(K: int) -> np.ndarray:
    """Returns the primes p ≤ K as an integer array.

    Example:

    >>> primes_up_to(20).tolist()
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    return _index_array(IndexSet.PRIMES, K).astype(np.int64)


@dataclasses.dataclass(frozen=True, kw_only=True)
class WeierstrassValue:
    value: complex | float
    log_value: complex | float
    tail_bound: float
    """Bound on the absolute value of the omitted log-terms beyond the truncation."""


def weierstrass_log(x: complex, index_set: IndexSet | str, K: int) -> complex:
    """Σ_{a∈A, a≤K} log(1 + x/a) − x/a for real or complex x."""
    a = _index_array(IndexSet(index_set), K)
    u = x / a
    return complex(np.sum(np.log1p(u) - u))


def weierstrass_product(
    x: float, index_set: IndexSet | str, K: int
) -> WeierstrassValue:
    """Truncated product Π_A(x) = ∏_{a∈A, a≤K} (1 + x/a) e^{−x/a}.

    Args:
        x (float): Argument, larger than minus the smallest index
        index_set (IndexSet|str): "primes" or "integers"
        K (int): Truncation bound

    Raises:
        errors.DomainError: If x ≤ −min(A) or K < 1

    Returns:
        WeierstrassValue: value, log-value and a tail bound on the log scale

    Examples:

    >>> weierstrass_product(0.0, "integers", 10).value
    1.0
    >>> w = weierstrass_product(1.0, "integers", 1)
    >>> round(w.value, 12) == round(2 * math.exp(-1), 12)
    True
    """
    index_set = IndexSet(index_set)
    if K < 1:
        raise errors.DomainError(f"truncation must be at least 1, got {K}")
    if not x > -index_set.smallest:
        raise errors.DomainError(
            f"weierstrass product over {index_set} needs x > −{index_set.smallest}, got {x}"
        )
    log_value = weierstrass_log(x, index_set, K).real
    if index_set == IndexSet.INTEGERS:
        tail = x * x / K
    else:
        tail = x * x / (K * math.log(max(K, 2)))
    return WeierstrassValue(value=math.exp(log_value), log_value=log_value, tail_bound=tail)


def weierstrass_limit(
    index_sets: typing.Sequence[IndexSet | str], K: int
) -> LimitingFunction:
    """ψ(z) = ∏_A Π_A(e^z − 1), each product truncated at K."""
    sets = tuple(IndexSet(s) for s in index_sets)

    def evaluate(z):
        x = cmath.exp(z) - 1
        return cmath.exp(sum(weierstrass_log(x, s, K) for s in sets))

    return LimitingFunction(
        kind=PsiKind.WEIERSTRASS_PRODUCT,
        evaluator=evaluate,
        params={"index_sets": ",".join(str(s) for s in sets), "K": K},
    )


def custom(evaluator: typing.Callable[[complex], complex], name: str = "custom") -> LimitingFunction:
    """Wraps a user evaluator, checking ψ(0) = 1.

    Example:

    >>> custom(lambda z: 2.0)
    Traceback (most recent call last):
      ...
    modphi.errors.DomainError: limiting function custom has ψ(0) = (2+0j) instead of 1
    """
    psi0 = complex(evaluator(0))
    if abs(psi0 - 1) > 1e-12:
        raise errors.DomainError(f"limiting function {name} has ψ(0) = {psi0} instead of 1")
    return LimitingFunction(kind=PsiKind.CUSTOM, evaluator=evaluator, params={"name": name})


def from_name(kind: str, **params) -> LimitingFunction:
    """Builds a limiting function from its kind name and keyword parameters.

    Used by the model files and the command line.

    Example:

    >>> from_name("exp_monomial", L=2.0, v=3).label
    'exp_monomial(L=2.0, v=3)'
    >>> from_name("one").label
    'exp_monomial(L=0.0, v=1)'
    """
    if kind == "one":
        return one()
    kind = PsiKind(kind)
    if kind == PsiKind.EXP_MONOMIAL:
        return exp_monomial(L=float(params.get("L", 0.0)), v=int(params.get("v", 3)))
    if kind == PsiKind.INV_GAMMA_EXP:
        return inv_gamma_exp()
    if kind == PsiKind.GAMMA_RATIO:
        return gamma_ratio(float(params.get("theta", 1.0)))
    if kind == PsiKind.BARNES_RATIO:
        return barnes_ratio(params.get("group", "usp"))
    if kind == PsiKind.WEIERSTRASS_PRODUCT:
        sets = params.get("index_sets", ["primes", "integers"])
        if isinstance(sets, str):
            sets = sets.split(",")
        return weierstrass_limit(sets, int(params.get("K", 100_000)))
    raise errors.DomainError(f"limiting function kind {kind} needs an evaluator")
