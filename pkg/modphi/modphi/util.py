"""
util
"""

import concurrent.futures
import enum
import fractions
import functools
import logging
import math
import sys
import typing

import numpy as np
import regex

import modphi.config as config

if sys.version_info >= (3, 11):
    StrEnum = enum.StrEnum
else:

    class StrEnum(str, enum.Enum):
        """Python 3.10 stand-in for `enum.StrEnum`."""

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()

# Coefficients of the 4th-order central stencils, keyed by derivative order.
# Each entry maps the offset (in units of the step) to its weight and comes
# with the denominator as a multiple of step**order.
_STENCILS: dict[int, tuple[dict[int, int], int]] = {
    1: ({-2: 1, -1: -8, 1: 8, 2: -1}, 12),
    2: ({-2: -1, -1: 16, 0: -30, 1: 16, 2: -1}, 12),
    3: ({-3: 1, -2: -8, -1: 13, 1: -13, 2: 8, 3: -1}, 8),
    4: ({-3: -1, -2: 12, -1: -39, 0: 56, 1: -39, 2: 12, 3: -1}, 6),
}


def fd_step(x: float, order: int, base: float = 1e-4) -> float:
    """Returns the finite-difference step used at x for the given derivative order.

    Higher orders use a step ten times larger per extra order beyond two so
    that round-off stays below the truncation error.

    Example:

    >>> fd_step(0.0, 1)
    0.0001
    >>> fd_step(1.0, 2)
    0.0002
    >>> round(fd_step(0.0, 4), 12)
    0.01
    """
    return base * (1.0 + abs(x)) * 10.0 ** max(0, order - 2)


def central_derivative(
    f: typing.Callable[[float], float],
    x: float,
    order: int,
    base: float = 1e-4,
) -> float:
    """Central 4th-order finite-difference derivative of f at x.

    Args:
        f (Callable): Real function
        x (float): Evaluation point
        order (int): Derivative order between 1 and 4
        base (float, optional): Base step, scaled by (1+|x|). Defaults to 1e-4.

    Raises:
        ValueError: If the order is not supported

    Returns:
        float: Approximation of f^(order)(x)

    Example:

    >>> round(central_derivative(lambda v: v**3, 2.0, 1), 8)
    12.0
    >>> round(central_derivative(lambda v: v**3, 2.0, 2), 6)
    12.0
    >>> central_derivative(lambda v: v, 0.0, 5)
    Traceback (most recent call last):
      ...
    ValueError: unsupported derivative order: 5
    """
    if order not in _STENCILS:
        raise ValueError(f"unsupported derivative order: {order}")
    weights, denominator = _STENCILS[order]
    s = fd_step(x, order, base)
    total = math.fsum(w * f(x + k * s) for k, w in weights.items())
    return total / (denominator * s**order)


def parse_float_list(text: str) -> list[float]:
    """Parses a comma separated list of floats as given on the command line.

    Example:

    >>> parse_float_list("0.6, 0.3")
    [0.6, 0.3]
    >>> parse_float_list("")
    []
    >>> parse_float_list("0.6,x")
    Traceback (most recent call last):
      ...
    ValueError: invalid number in list: x
    """
    values = []
    for item in regex.split(pattern=r"\s*,\s*", string=text.strip()):
        if item == "":
            continue
        try:
            values.append(float(item))
        except ValueError as ex:
            raise ValueError(f"invalid number in list: {item}") from ex
    return values


def parse_fraction(text: str) -> fractions.Fraction:
    """Parses an exact rational such as "1/2", "0.25" or "3".

    Example:

    >>> parse_fraction("1/2")
    Fraction(1, 2)
    >>> parse_fraction("0.25")
    Fraction(1, 4)
    """
    return fractions.Fraction(text.strip())


def parse_edge_list(text: str) -> list[tuple[int, int]]:
    """Parses an edge list like "1-2,2-3,1-3" into zero-based vertex pairs.

    Vertices in the text are one-based. Loops ("2-2") are kept.

    Args:
        text (str): Comma separated list of "u-v" pairs

    Raises:
        ValueError: If an item is not of the form "u-v" with positive integers

    Returns:
        list[tuple[int, int]]: Zero-based edges in input order

    Examples:

    >>> parse_edge_list("1-2,2-3,1-3")
    [(0, 1), (1, 2), (0, 2)]

    >>> parse_edge_list(" 1 - 1 ")
    [(0, 0)]

    >>> parse_edge_list("1-2,3")
    Traceback (most recent call last):
      ...
    ValueError: invalid edge: 3
    """
    edges = []
    for item in regex.split(pattern=r"\s*,\s*", string=text.strip()):
        if item == "":
            continue
        match = regex.fullmatch(pattern=r"\s*([1-9][0-9]*)\s*-\s*([1-9][0-9]*)\s*", string=item)
        if match is None:
            raise ValueError(f"invalid edge: {item}")
        edges.append((int(match[1]) - 1, int(match[2]) - 1))
    return edges


def falling_factorial(n: int, k: int) -> int:
    """Returns n(n−1)⋯(n−k+1).

    Example:

    >>> falling_factorial(6, 3)
    120
    >>> falling_factorial(2, 3)
    0
    """
    return math.perm(n, k) if n >= 0 else 0


@functools.cache
def harmonic(n: int) -> fractions.Fraction:
    """Returns the exact harmonic number Σ_{i≤n} 1/i.

    Example:

    >>> harmonic(3)
    Fraction(11, 6)
    """
    if n <= 0:
        return fractions.Fraction(0)
    total = fractions.Fraction(0)
    for i in range(1, n + 1):
        total += fractions.Fraction(1, i)
    return total


def log_add(a: float, b: float) -> float:
    """Returns log(e^a + e^b) without overflow.

    Example:

    >>> round(log_add(math.log(2), math.log(3)), 12) == round(math.log(5), 12)
    True
    >>> log_add(-math.inf, 1.5)
    1.5
    """
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = max(a, b), min(a, b)
    return hi + math.log1p(math.exp(lo - hi))


T = typing.TypeVar("T")


def chunk_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    """Returns the generator of chunk `index` in random stream `stream`.

    Example:

    >>> a = chunk_rng(7, 1, 3).integers(0, 1000, size=3)
    >>> b = chunk_rng(7, 1, 3).integers(0, 1000, size=3)
    >>> bool((a == b).all())
    True
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def run_chunks(
    stream: int,
    trials: int,
    sample: typing.Callable[[np.random.Generator, int], T],
    cfg: config.Config,
) -> list[T]:
    """Runs `sample(rng, size)` once per chunk of `trials` on a thread pool.

    Results come back in chunk order and only depend on the seed, the stream
    and the chunk size, never on the number of threads.

    Example:

    >>> cfg = config.Config(seed=3, chunk_trials=4)
    >>> parts = run_chunks(0, 10, lambda rng, size: size, cfg)
    >>> parts
    [4, 4, 2]
    """
    sizes = cfg.chunks(trials)
    logging.debug(f"running {trials} trials of stream {stream} in {len(sizes)} chunks")

    def _one(item: tuple[int, int]) -> T:
        index, size = item
        return sample(chunk_rng(cfg.seed, stream, index), size)

    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.thread_count) as pool:
        return list(pool.map(_one, enumerate(sizes)))


def ratio(estimate: float, oracle: float) -> float:
    """Returns estimate/oracle, or nan when the oracle vanishes.

    Example:

    >>> ratio(3.0, 2.0)
    1.5
    >>> ratio(1.0, 0.0)
    nan
    """
    if oracle == 0:
        logging.debug(f"oracle vanishes, ratio undefined for estimate {estimate}")
        return math.nan
    return estimate / oracle
