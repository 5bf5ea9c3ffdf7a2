"""
suite
"""

import dataclasses
import logging
import math
import typing
from fractions import Fraction

import networkx as nx
import numpy as np
import scipy.optimize
import scipy.stats

import modphi.character_values as character_values
import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.erdos_renyi as erdos_renyi
import modphi.errors as errors
import modphi.limiting_functions as limiting_functions
import modphi.models as models
import modphi.multidim_engine as multidim_engine
import modphi.partition_combinatorics as partition_combinatorics
import modphi.reference_laws as reference_laws

GROUPS = (
    "legendre",
    "combinatorics",
    "cumulants",
    "deviations",
    "models",
    "graphs",
    "characters",
    "walk",
    "omega",
)


@dataclasses.dataclass(frozen=True, kw_only=True)
class CriterionResult:
    number: int
    name: str
    group: str
    passed: bool
    measured: dict

    def as_row(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "group": self.group,
            "passed": self.passed,
            **{f"measured.{k}": v for k, v in self.measured.items()},
        }


Check = typing.Callable[[config.Config], tuple[bool, dict]]


@dataclasses.dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    group: str
    check: Check


CRITERIA: list[Criterion] = []


def criterion(number: int, name: str, group: str) -> typing.Callable[[Check], Check]:
    """Registers an acceptance check under `group`."""

    def register(check: Check) -> Check:
        CRITERIA.append(Criterion(number, name, group, check))
        return check

    return register


def _mc_slack(cfg: config.Config) -> float:
    """Widening of Monte Carlo tolerances, √fast_factor in fast mode since trials shrink by fast_factor."""
    return math.sqrt(cfg.fast_factor) if cfg.fast else 1.0


def _trials(cfg: config.Config, trials: int) -> int:
    return max(1, trials // cfg.fast_factor) if cfg.fast else trials


@criterion(1, "legendre closed forms", "legendre")
def legendre_closed_forms(cfg: config.Config) -> tuple[bool, dict]:
    worst = 0.0
    gauss = reference_laws.gaussian(0.5, 2.0)
    for pt in reference_laws.legendre_grid(gauss, np.linspace(-4.0, 5.0, 100).tolist(), cfg):
        expected = ((pt.x - 0.5) ** 2 / 4.0, (pt.x - 0.5) / 2.0, 0.5)
        worst = max(worst, *(abs(a - b) for a, b in zip((pt.F, pt.h, pt.Fpp), expected)))
    pois = reference_laws.poisson(1.5)
    for pt in reference_laws.legendre_grid(pois, np.linspace(0.2, 6.0, 100).tolist(), cfg):
        expected = (pt.x * math.log(pt.x / 1.5) - pt.x + 1.5, math.log(pt.x / 1.5), 1.0 / pt.x)
        worst = max(worst, *(abs(a - b) for a, b in zip((pt.F, pt.h, pt.Fpp), expected)))
    return worst <= 1e-10, {"max_abs_error": worst}


def _random_connected_multigraph(rng: np.random.Generator) -> partition_combinatorics.MultiGraph:
    n = int(rng.integers(1, 8))
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    extra = int(rng.integers(0, 14 - len(edges) + 1))
    for _ in range(extra):
        u, v = (int(a) for a in rng.integers(0, n, size=2))
        edges.append((u, v))
    return partition_combinatorics.MultiGraph.from_edge_list(edges, n)


@criterion(2, "graph functionals", "combinatorics")
def graph_functionals(cfg: config.Config) -> tuple[bool, dict]:
    identity_failures = 0
    simple = 0
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() > 5 or not nx.is_connected(g):
            continue
        simple += 1
        H = partition_combinatorics.MultiGraph.from_edge_list(list(g.edges()), g.number_of_nodes())
        lhs, rhs = partition_combinatorics.bicolored_identity_check(H)
        identity_failures += lhs != rhs

    rng = np.random.default_rng(cfg.seed)
    tutte_failures = 0
    for _ in range(200):
        H = _random_connected_multigraph(rng)
        F = partition_combinatorics.F_functional(H)
        trees = partition_combinatorics.spanning_tree_count(H)
        ok = (
            F == partition_combinatorics.tutte_point(H, 1, 0)
            and trees == partition_combinatorics.tutte_point(H, 1, 1)
            and 0 <= F <= trees
        )
        tutte_failures += not ok
    measured = {"simple_graphs": simple, "identity_failures": identity_failures, "tutte_failures": tutte_failures}
    return identity_failures == 0 and tutte_failures == 0, measured


_FAMILY_PS = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))


def _random_dependency_family(rng: np.random.Generator, clique: bool) -> partition_combinatorics.DependencyFamily:
    N = int(rng.integers(4, 15))
    p = _FAMILY_PS[int(rng.integers(len(_FAMILY_PS)))]
    if not clique:
        return partition_combinatorics.m_dependent_family(N, int(rng.integers(1, 3)), p)
    cuts = np.sort(rng.choice(np.arange(1, N), size=int(rng.integers(1, N)), replace=False))
    groups = [sorted(int(i) for i in chunk) for chunk in np.split(rng.permutation(N), cuts)]
    return partition_combinatorics.clique_family(groups, p)


@criterion(3, "dependency graph bound", "cumulants")
def dependency_graph_bound(cfg: config.Config) -> tuple[bool, dict]:
    rng = np.random.default_rng(cfg.seed)
    worst = {"m_dependent": Fraction(0), "clique": Fraction(0)}
    passed = True
    for i in range(50):
        kind = "clique" if i % 2 else "m_dependent"
        family = _random_dependency_family(rng, clique=kind == "clique")
        for r in range(1, 7):
            check = partition_combinatorics.verify_bound(family, r)
            passed &= check.ok
            worst[kind] = max(worst[kind], abs(check.cumulant) / check.bound)
    measured = {"families": 50, **{f"{kind}_max_ratio": float(ratio) for kind, ratio in worst.items()}}
    return passed, measured


@criterion(4, "moment cumulant inversion", "cumulants")
def moment_cumulant_inversion(cfg: config.Config) -> tuple[bool, dict]:
    gaussian_moments = [Fraction(v) for v in (0, 1, 0, 3, 0, 15)]
    cumulants = partition_combinatorics.moments_to_cumulants(gaussian_moments)
    ok = cumulants == [0, 1, 0, 0, 0, 0]
    # Poisson(3/2) has every cumulant 3/2
    poisson = partition_combinatorics.cumulants_to_moments([Fraction(3, 2)] * 6)
    ok &= partition_combinatorics.moments_to_cumulants(poisson) == [Fraction(3, 2)] * 6
    for r in range(1, 7):
        moments = [Fraction(j * j + 1, j + 2) for j in range(1, r + 1)]
        ok &= partition_combinatorics.cumulants_to_moments(partition_combinatorics.moments_to_cumulants(moments)) == moments
    return ok, {"gaussian_cumulants": ",".join(str(c) for c in cumulants)}


@criterion(5, "cycle count estimate", "deviations")
def cycle_count_estimate(cfg: config.Config) -> tuple[bool, dict]:
    measured = {}
    passed = True
    errors_by_n = []
    for n in (1_000, 31_623, 1_000_000):
        k = round(2 * math.log(n))
        point = models.cycles_estimate(n, k, tail=False, cfg=cfg).ratio
        tail = models.cycles_estimate(n, k, tail=True, cfg=cfg).ratio
        measured[f"point_ratio_{n}"] = point
        measured[f"tail_ratio_{n}"] = tail
        errors_by_n.append(max(abs(point - 1), abs(tail - 1)))
    passed &= 0.85 <= measured["point_ratio_1000000"] <= 1.15
    passed &= 0.85 <= measured["tail_ratio_1000000"] <= 1.15
    passed &= errors_by_n[0] > errors_by_n[1] > errors_by_n[2]
    return passed, measured


@criterion(6, "bahadur-rao", "deviations")
def bahadur_rao(cfg: config.Config) -> tuple[bool, dict]:
    point = models.bahadur_rao_check(1000, 0.75, tail=False, cfg=cfg).ratio
    tail = models.bahadur_rao_check(1000, 0.75, tail=True, cfg=cfg).ratio
    return abs(point - 1) <= 0.01 and abs(tail - 1) <= 0.03, {"point_ratio": point, "tail_ratio": tail}


@criterion(7, "poisson crossover", "deviations")
def poisson_crossover(cfg: config.Config) -> tuple[bool, dict]:
    t = 10_000.0
    model = deviation_engine.ModPhiModel(law=reference_laws.poisson(1.0), t_n=t, psi=limiting_functions.one())
    worst = 0.0
    for j in range(10):
        k = t + 1 + math.floor(j * (10 * math.sqrt(t) - 1) / 9)
        y = (k - 0.5 - t) / math.sqrt(t)
        estimate = deviation_engine.crossover_tail(model, y, cfg)
        exact = float(scipy.stats.poisson.logsf(k - 1, t))
        worst = max(worst, abs(math.expm1(estimate.log_prob - exact)))
    return worst <= 0.05, {"max_relative_error": worst}


@criterion(8, "berry-esseen correction", "deviations")
def berry_esseen_correction(cfg: config.Config) -> tuple[bool, dict]:
    model = deviation_engine.ModPhiModel(law=reference_laws.exponential(), t_n=100.0, psi=limiting_functions.one())
    xs = np.linspace(-3.0, 3.0, 200)
    exact = scipy.stats.gamma.cdf(100 + 10 * xs, a=100)
    plain = float(np.max(np.abs(scipy.stats.norm.cdf(xs) - exact)))
    corrected = max(abs(deviation_engine.berry_esseen_cdf(model, float(x)) - e) for x, e in zip(xs, exact))
    improvement = plain / corrected
    return improvement >= 3, {"clt_error": plain, "corrected_error": corrected, "improvement": improvement}


@criterion(9, "erdos-renyi cumulants and triangle tail", "graphs")
def erdos_renyi_checks(cfg: config.Config) -> tuple[bool, dict]:
    triangle = erdos_renyi.PatternGraph.from_name("triangle")
    half = Fraction(1, 2)
    passed = True
    for n in range(3, 7):
        brute = erdos_renyi.exact_cumulants_bruteforce(n, triangle, half, orders=3)
        for r in (2, 3):
            passed &= brute.kappa[r - 1] == erdos_renyi.overlap_cumulant(n, triangle, half, r)
    fits = {r: erdos_renyi.polynomiality_check(triangle, half, range(3, 10), r, "overlap") for r in (2, 3)}
    passed &= fits[2].leading == Fraction(9, 32) and fits[3].leading == Fraction(81, 64)
    passed &= all(res == 0 for fit in fits.values() for res in fit.residuals.values())

    n, p = 150, 0.5
    v = scipy.optimize.brentq(lambda v: erdos_renyi.triangle_deviation(n, p, v).prob - 1e-2, 1.0, 6.0)
    comparison = erdos_renyi.triangle_tail_mc(n, p, v, _trials(cfg, 100_000), cfg.seed, cfg)
    passed &= abs(comparison.ratio - 1) <= 0.15 * _mc_slack(cfg)
    measured = {
        "leading_r2": str(fits[2].leading),
        "leading_r3": str(fits[3].leading),
        "v": v,
        "mc_ratio": comparison.ratio,
    }
    return passed, measured


@criterion(10, "ising ring", "models")
def ising_ring(cfg: config.Config) -> tuple[bool, dict]:
    ratio = models.ising_deviation(2000, 0.5, 0.8, cfg, estimate="cumulant").ratio
    mod_gaussian = models.ising_deviation(2000, 0.5, 0.8, cfg, estimate="mod_gaussian").ratio
    dist = models.ising_exact(50, 0.5)
    mgf_error = max(abs(dist.log_mgf(z) - models.ising_log_mgf(50, 0.5, z)) for z in (-1.0, -0.25, 0.3, 1.0))
    measured = {"ratio": ratio, "mod_gaussian_ratio": mod_gaussian, "log_mgf_error": mgf_error}
    return abs(ratio - 1) <= 0.1 and mgf_error <= 1e-10, measured


@criterion(11, "two-dimensional walk", "walk")
def two_dimensional_walk(cfg: config.Config) -> tuple[bool, dict]:
    hist = multidim_engine.walk2d_conditional_mc(400, math.sqrt(0.2), _trials(cfg, 1_000_000), cfg.seed, cfg)
    test = multidim_engine.walk2d_quarter_turn_test(101, _trials(cfg, 100_000), cfg.seed, cfg)
    passed = hist.tv_distance <= 0.05 * _mc_slack(cfg) and test.p_value > 0.01
    measured = {
        "acceptance_rate": hist.acceptance_rate,
        "expected_acceptance": math.exp(-math.sqrt(400) * 0.2),
        "tv_distance": hist.tv_distance,
        "quarter_turn_p": test.p_value,
    }
    return passed, measured


@criterion(12, "weighted permutations", "models")
def weighted_permutations(cfg: config.Config) -> tuple[bool, dict]:
    n = 2000
    wp = models.weighted_perm(models.ThetaSpec(theta=2.0), n)
    h_ratio = float(wp.h[n]) / wp.h_asymptotic(n)
    limit = wp.psi_limit()
    psi_error = max(abs(wp.psi_n(n, w).real / limit.real(w) - 1) for w in (-0.5, 0.0, 0.3, 0.5))
    uniform = models.weighted_perm(models.ThetaSpec(theta=1.0), 200)
    mgf_error = max(
        abs(uniform.mgf(m, w) - models.cycles_mgf(m, w)) / abs(models.cycles_mgf(m, w))
        for m in (1, 10, 50, 200)
        for w in (-0.5, 0.25, 1.0)
    )
    passed = 0.99 <= h_ratio <= 1.01 and psi_error <= 0.02 and mgf_error <= 1e-10
    return passed, {"h_ratio": h_ratio, "psi_error": psi_error, "uniform_mgf_error": mgf_error}


@criterion(13, "hyperbolic zeros", "models")
def hyperbolic_zeros(cfg: config.Config) -> tuple[bool, dict]:
    h = 1e4
    cubic = models.hyperbolic_cubic_coefficient(h)
    predicted = 1 / (144 * math.pi)
    trials = _trials(cfg, 100_000)
    sample = models.sample_Nh(h, trials, cfg.seed, cfg)
    stderr = float(sample.std(ddof=1)) / math.sqrt(trials)
    mean_gap = abs(float(sample.mean()) - models.hyperbolic_zeros_mean(h)) / stderr
    passed = abs(cubic / predicted - 1) <= 0.02 and mean_gap <= 4
    return passed, {"cubic": cubic, "predicted_cubic": predicted, "mean_gap_stderrs": mean_gap}


@criterion(14, "random character values", "characters")
def random_character_values(cfg: config.Config) -> tuple[bool, dict]:
    omega = character_values.ThomaParameter(alpha=(0.6, 0.3))
    two_cycle = character_values.Partition((2,))
    sigma2, _ = character_values.sigma2_L_char(omega, 2)
    scaled = {}
    passed = True
    for n in (6, 8, 10):
        kappas = character_values.cycle_type_cumulants(omega, two_cycle, n, 4)
        scaled[n] = n * kappas[1]
        passed &= all(abs(kappas[r - 1]) <= character_values.prop_bound_single(2, n, r) for r in range(2, 5))
        total = sum(character_values.central_measure(omega, n).values())
        passed &= abs(total - 1) <= 1e-12
    gaps = [abs(scaled[n] - sigma2) for n in (6, 8, 10)]
    passed &= gaps[0] > gaps[1] > gaps[2] and gaps[2] <= 0.2 * sigma2

    exact = character_values.ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))
    mu = character_values.Partition((2, 1))
    fit = character_values.character_polynomiality(exact, mu, range(3, 11), r=2)
    limit, _ = character_values.general_mu_limits(exact, mu)
    passed &= fit.leading == limit and all(res == 0 for res in fit.residuals.values())
    measured = {"n_kappa2_10": float(scaled[10]), "sigma2": float(sigma2), "leading_21": str(fit.leading)}
    return passed, measured


@criterion(15, "omega of integers", "omega")
def omega_of_integers(cfg: config.Config) -> tuple[bool, dict]:
    gaps = [abs(models.omega_statistics(N).mgf_ratio(0.5) - 1) for N in (10**5, 10**6, 10**7)]
    return gaps[0] > gaps[1] > gaps[2], {f"gap_1e{e}": g for e, g in zip((5, 6, 7), gaps)}


def run_suite(name: str = "all", cfg: config.Config = config.Config()) -> list[CriterionResult]:
    """Runs every criterion of group `name`, or all of them.

    Raises:
        errors.OutOfRange: If `name` is neither 'all' nor a known group

    Example:

    >>> [r.passed for r in run_suite("cumulants")]
    [True, True]
    """
    if name != "all" and name not in GROUPS:
        raise errors.OutOfRange(f"unknown suite {name}, choose one of all, {', '.join(GROUPS)}")
    results = []
    for item in sorted(CRITERIA, key=lambda c: c.number):
        if name not in ("all", item.group):
            continue
        logging.info(f"criterion {item.number}: {item.name}")
        passed, measured = item.check(cfg)
        if not passed:
            logging.error(f"criterion {item.number} ({item.name}) failed: {measured}")
        results.append(
            CriterionResult(number=item.number, name=item.name, group=item.group, passed=bool(passed), measured=measured)
        )
    return results
