"""
config
"""

import dataclasses
import os


@dataclasses.dataclass(kw_only=True)
class Config:
    seed: int = 0
    """Seed for every stochastic subcommand. Recorded verbatim in the output for replay."""

    trials: int = 100_000
    """Default number of Monte Carlo trials."""

    budget: float = 1e10
    """Maximum number of elementary sampled events a single run may request."""

    threads_env: str = "MODPHI_THREADS"
    """Name of the environment variable which overrides the number of worker threads"""

    default_threads: int = 4
    """Number of worker threads when the environment variable is not set."""

    chunk_trials: int = 10_000
    """Number of Monte Carlo trials per independent random stream."""

    saddle_tolerance: float = 1e-12
    """Relative tolerance on |η'(h) − x| when solving the saddle-point equation."""

    saddle_max_iterations: int = 200
    """Iteration budget of the safeguarded Newton solver."""

    fd_step: float = 1e-4
    """Base step of the central finite differences used for derivatives of custom evaluators."""

    normalizer_tolerance: float = 1e-10
    """Absolute tolerance of one-dimensional normalizing integrals."""

    surface_tolerance: float = 1e-6
    """Relative change at which the adaptive surface quadrature stops refining."""

    bins: int = 36
    """Number of angular bins of walk histograms."""

    output_format: str = "json"
    """Either 'json' or 'csv'."""

    output_path: str | None = None
    """Where to write rows. None means standard output."""

    schema: int = 1
    """Version of the emitted JSON and CSV layout."""

    fast: bool = False
    """Run acceptance suites with reduced trial counts and widened tolerances."""

    fast_factor: int = 10
    """Divisor applied to trial counts in fast mode."""

    @property
    def thread_count(self) -> int:
        """Returns the number of worker threads.

        The environment variable named by `threads_env` wins over `default_threads`.

        Example:

        >>> os.environ.pop("MODPHI_TEST_THREADS", None)
        >>> Config(threads_env="MODPHI_TEST_THREADS", default_threads=3).thread_count
        3
        >>> os.environ["MODPHI_TEST_THREADS"] = "7"
        >>> Config(threads_env="MODPHI_TEST_THREADS").thread_count
        7
        >>> os.environ["MODPHI_TEST_THREADS"] = "zero"
        >>> Config(threads_env="MODPHI_TEST_THREADS", default_threads=2).thread_count
        2
        >>> _ = os.environ.pop("MODPHI_TEST_THREADS")
        """
        value = os.getenv(self.threads_env)
        if value is None:
            return self.default_threads
        try:
            threads = int(value)
        except ValueError:
            return self.default_threads
        return max(1, threads)

    @property
    def effective_trials(self) -> int:
        """Returns the trial count to use, reduced in fast mode.

        Example:

        >>> Config(trials=1000).effective_trials
        1000
        >>> Config(trials=1000, fast=True).effective_trials
        100
        """
        if self.fast:
            return max(1, self.trials // self.fast_factor)
        return self.trials

    def chunks(self, trials: int) -> list[int]:
        """Splits a number of trials into the per-stream chunk sizes.

        The split only depends on `trials` and `chunk_trials`, never on the
        number of threads.

        Example:

        >>> Config(chunk_trials=4).chunks(10)
        [4, 4, 2]
        >>> Config(chunk_trials=4).chunks(0)
        []
        """
        full, rest = divmod(trials, self.chunk_trials)
        sizes = [self.chunk_trials] * full
        if rest:
            sizes.append(rest)
        return sizes

    def as_dict(self) -> dict:
        """Returns the replayable part of the config as a plain dict.

        Example:

        >>> d = Config(seed=5).as_dict()
        >>> d["seed"], d["schema"]
        (5, 1)
        """
        return dataclasses.asdict(self)
