"""
harness
"""

import dataclasses
import enum
import fractions
import io
import json
import logging
import math
import pathlib
import sys
import typing

import munch
import numpy as np
import pandas as pd

import modphi.character_values as character_values
import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.erdos_renyi as erdos_renyi
import modphi.errors as errors
import modphi.file_access as file_access
import modphi.limiting_functions as limiting_functions
import modphi.model_file as model_file
import modphi.models as models
import modphi.multidim_engine as multidim_engine
import modphi.partition_combinatorics as partition_combinatorics
import modphi.reference_laws as reference_laws
import modphi.suite as suite
import modphi.util as util

Row = dict[str, typing.Any]

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_VALIDATION = 2

_PSI_PARAMS = ("L", "v", "theta", "group", "index_sets", "K")
_MODEL_PARAMS = {
    "cycles": ("n", "k"),
    "bahadur-rao": ("n", "x"),
    "poisson-bernoulli": ("ps", "eps"),
    "ising": ("n", "beta", "x"),
    "charpoly": ("group", "n", "x"),
    "zeros": ("h",),
    "wperm": ("theta", "n", "w"),
    "omega": ("N", "z"),
}


@dataclasses.dataclass(frozen=True, kw_only=True)
class ComparisonRow:
    """One estimate next to its oracle, as emitted on the command line."""

    model: str
    params: dict
    estimate: float
    log_estimate: float
    oracle: float
    oracle_kind: str
    oracle_stderr: float | None
    ratio: float
    regime: str
    flags: str

    @classmethod
    def from_comparison(cls, comparison: models.Comparison) -> "ComparisonRow":
        """
        Example:

        >>> e = deviation_engine.DeviationEstimate(
        ...     regime=deviation_engine.Regime.CLT, log_prob=math.log(0.3), leading=0.3
        ... )
        >>> row = ComparisonRow.from_comparison(models.Comparison(model="m", params={"n": 1}, estimate=e, oracle=0.2))
        >>> row.oracle_kind, round(row.ratio, 12)
        ('exact', 1.5)
        """
        estimate = comparison.estimate
        return cls(
            model=comparison.model,
            params=dict(comparison.params),
            estimate=estimate.prob,
            log_estimate=estimate.log_prob,
            oracle=float(comparison.oracle),
            oracle_kind=str(comparison.oracle_kind),
            oracle_stderr=comparison.oracle_stderr,
            ratio=comparison.ratio,
            regime=str(estimate.regime),
            flags=",".join(estimate.flags),
        )

    def as_dict(self) -> Row:
        """Flattens the parameters into `param.<name>` columns after the model id."""
        row: Row = {"model": self.model}
        row.update({f"param.{k}": v for k, v in self.params.items()})
        row.update(
            {
                "estimate": self.estimate,
                "log_estimate": self.log_estimate,
                "oracle": self.oracle,
                "oracle_kind": self.oracle_kind,
                "oracle_stderr": self.oracle_stderr,
                "ratio": self.ratio,
                "regime": self.regime,
                "flags": self.flags,
            }
        )
        return row


def _plain(value: typing.Any) -> typing.Any:
    """Converts exact and numpy values into what JSON and CSV can carry.

    Example:

    >>> _plain(fractions.Fraction(1, 3)), _plain(np.int64(4)), _plain(deviation_engine.Tail.UPPER)
    ('1/3', 4, 'upper')
    """
    if isinstance(value, fractions.Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, enum.Enum):
        return str(value)
    return value


def render(command: str, params: dict, rows: list[Row], cfg: config.Config) -> str:
    """Renders rows with the run header in the configured format.

    The same command, params, rows and config always give the same text.

    Example:

    >>> text = render("psi", {"kind": "one"}, [{"z": 0.5, "value": 1.0}], config.Config(output_format="csv"))
    >>> print(text.splitlines()[1:])
    ['z,value', '0.5,1']
    """
    run = {"schema": cfg.schema, "command": command, "params": params, "config": cfg.as_dict()}
    rows = [{k: _plain(v) for k, v in row.items()} for row in rows]
    if cfg.output_format == "json":
        return json.dumps({**run, "rows": rows}, sort_keys=True, indent=2, default=str) + "\n"
    if cfg.output_format == "csv":
        buffer = io.StringIO()
        buffer.write("# " + json.dumps(run, sort_keys=True, default=str) + "\n")
        pd.DataFrame(rows).to_csv(buffer, index=False, float_format="%.12g", lineterminator="\n")
        return buffer.getvalue()
    raise errors.OutOfRange(f"unknown output format: {cfg.output_format}")


def error_object(ex: BaseException, kind: str) -> Row:
    """
    Example:

    >>> error_object(errors.OutOfRange("n must be positive", index=2), "validation")
    {'error': 'OutOfRange', 'kind': 'validation', 'message': 'element 2: n must be positive', 'index': 2}
    """
    obj = {"error": type(ex).__name__, "kind": kind, "message": str(ex)}
    index = getattr(ex, "index", None)
    if index is not None:
        obj["index"] = index
    return obj


class Harness:
    """Runs one subcommand at a time and writes its rows.

    Nothing here touches global state: every run works on its own config.
    """

    def __init__(
        self,
        cfg: config.Config = config.Config(),
        stdout: typing.TextIO | None = None,
        stderr: typing.TextIO | None = None,
    ):
        self.config = cfg
        self.stdout = stdout
        self.stderr = stderr

    def run(self, command: str, params: dict) -> int:
        """Runs `command` and returns the exit status.

        A ValidationError (or any ValueError) exits with 2 and an arithmetic
        failure with 1; both write one JSON error object to the error stream
        and no rows.
        """
        handler = getattr(self, f"cmd_{command}", None)
        if handler is None:
            return self._fail(errors.OutOfRange(f"unknown subcommand: {command}"), "validation", EXIT_VALIDATION)
        p = munch.Munch(params)
        try:
            rows, status = handler(p)
            text = render(command, params, rows, self.config)
        except ValueError as ex:
            return self._fail(ex, "validation", EXIT_VALIDATION)
        except ArithmeticError as ex:
            return self._fail(ex, "numerical", EXIT_NUMERICAL)
        self._emit(text)
        return status

    def _emit(self, text: str):
        if self.config.output_path:
            pathlib.Path(self.config.output_path).write_text(text)
            logging.info(f"wrote {self.config.output_path} (sha256 {file_access.digest(self.config.output_path)})")
        else:
            (self.stdout or sys.stdout).write(text)

    def _fail(self, ex: BaseException, kind: str, status: int) -> int:
        logging.error(f"{kind} error: {ex}")
        (self.stderr or sys.stderr).write(json.dumps(error_object(ex, kind), sort_keys=True) + "\n")
        return status

    @property
    def trials(self) -> int:
        return self.config.effective_trials

    def _require_seed(self, p: munch.Munch, what: str):
        if p.get("seed") is None:
            raise errors.OutOfRange(f"--seed is required for {what}")

    @staticmethod
    def _require(p: munch.Munch, what: str, *names: str):
        missing = [name for name in names if p.get(name) is None]
        if missing:
            raise errors.OutOfRange(f"{what} needs " + ", ".join(f"--{name.replace('_', '-')}" for name in missing))

    # Builders shared by several subcommands

    @staticmethod
    def _law(p: munch.Munch) -> reference_laws.ReferenceLaw:
        spec = munch.munchify(
            {
                "law": {
                    "name": p.get("law") or "gaussian",
                    "mean": p.get("mean") or 0.0,
                    "variance": p.get("variance") or 1.0,
                    "lambda": p.get("lam") or 1.0,
                    "q": p.get("q") or 0.5,
                    "eta_file": p.get("eta_file"),
                }
            }
        )
        return model_file.law_from_spec(spec)

    @staticmethod
    def _psi(p: munch.Munch) -> limiting_functions.LimitingFunction:
        params = {key: p.get(f"psi_{key}") for key in _PSI_PARAMS if p.get(f"psi_{key}") is not None}
        return limiting_functions.from_name(p.get("psi_kind") or "one", **params)

    # Subcommands. Each returns (rows, exit status).

    def cmd_legendre(self, p: munch.Munch) -> tuple[list[Row], int]:
        law = self._law(p)
        points = reference_laws.legendre_grid(law, util.parse_float_list(p.x), self.config)
        rows = [{"law": law.name, "x": pt.x, "h": pt.h, "F": pt.F, "Fp": pt.Fp, "Fpp": pt.Fpp} for pt in points]
        return rows, EXIT_OK

    def cmd_psi(self, p: munch.Munch) -> tuple[list[Row], int]:
        params = {key: p.get(key) for key in _PSI_PARAMS if p.get(key) is not None}
        psi = limiting_functions.from_name(p.kind, **params)
        return [{"psi": psi.label, "z": z, "value": psi.real(z)} for z in util.parse_float_list(p.z)], EXIT_OK

    def _cumulants(self, p: munch.Munch, spec: munch.Munch | None) -> deviation_engine.CumulantModel:
        if spec is not None:
            cumulants = model_file.cumulant_model(spec)
            if cumulants is None:
                raise errors.OutOfRange(f"{p.model_file} has no [cumulant] section")
            return cumulants
        self._require(p, "the cumulant estimate", "alpha_n", "sigma2")
        return deviation_engine.CumulantModel(
            alpha_n=float(p.alpha_n),
            beta_n=float(p.get("beta_n") or 1.0),
            sigma2=float(p.sigma2),
            L=float(p.get("cumulant_L") or 0.0),
        )

    def cmd_deviate(self, p: munch.Munch) -> tuple[list[Row], int]:
        xs = util.parse_float_list(p.x)
        kind = p.get("estimate") or "tail"
        spec = model_file.load(p.model_file) if p.get("model_file") else None
        # a file with only a [cumulant] section has no other estimate
        if kind == "cumulant" or (spec is not None and "cumulant" in spec and "model" not in spec):
            cumulants = self._cumulants(p, spec)
            tail = p.get("tail") or "upper"
            rows = [{"T": T, **deviation_engine.cumulant_moderate(cumulants, T, tail=tail).as_row()} for T in xs]
            return rows, EXIT_OK
        if spec is not None:
            model = model_file.mod_phi_model(spec)
        else:
            self._require(p, "deviate without --model", "t_n")
            model = deviation_engine.ModPhiModel(law=self._law(p), t_n=float(p.t_n), psi=self._psi(p))

        order = int(p.get("order") or 0)
        rows = []
        if kind == "borel":
            bound = deviation_engine.borel_bound(model, _parse_intervals(p.get("intervals") or ""), self.config)
            rows.append(
                {
                    "upper": bound.upper,
                    "log_upper": bound.log_upper,
                    "rate": bound.rate,
                    "constant": bound.constant,
                    "attained": ",".join(str(a) for a in bound.attained_set),
                    "lower_tight": bound.lower_tight,
                    "infinite": bound.infinite,
                }
            )
            return rows, EXIT_OK
        for x in xs:
            if kind == "berry-esseen":
                rows.append({"x": x, "cdf": deviation_engine.berry_esseen_cdf(model, x)})
                continue
            if kind == "point":
                est = deviation_engine.lattice_point_mass(model, x, order, self.config)
            elif kind == "crossover":
                est = deviation_engine.crossover_tail(model, x, self.config)
            elif model.law.lattice:
                est = deviation_engine.lattice_tail(model, x, order, self.config)
            else:
                est = deviation_engine.nonlattice_tail(model, x, self.config)
            rows.append({"x": x, **est.as_row()})
        return rows, EXIT_OK

    def cmd_walk2d(self, p: munch.Munch) -> tuple[list[Row], int]:
        self._require_seed(p, "walk2d")
        cfg = self.config
        if p.get("bins") is not None:
            if int(p.bins) < 1:
                raise errors.OutOfRange(f"--bins must be positive, got {p.bins}")
            cfg = dataclasses.replace(cfg, bins=int(p.bins))
        trials = self.trials
        if p.get("quarter_turn"):
            test = multidim_engine.walk2d_quarter_turn_test(p.n, trials, p.seed, cfg)
            rows = [
                {"quarter": q, "below_diagonal": int(test.counts[q, 0]), "above_diagonal": int(test.counts[q, 1]),
                 "p_value": test.p_value}
                for q in range(4)
            ]
            return rows, EXIT_OK
        hist = multidim_engine.walk2d_conditional_mc(p.n, p.r, trials, p.seed, cfg)
        frame = hist.as_frame()
        frame.insert(0, "n", hist.n)
        frame.insert(1, "r", hist.r)
        frame["accepted"] = hist.accepted
        frame["tv_distance"] = hist.tv_distance
        frame["valid"] = hist.valid
        return frame.to_dict(orient="records"), EXIT_OK

    def cmd_conic(self, p: munch.Munch) -> tuple[list[Row], int]:
        if p.get("model_file"):
            spec = model_file.load(p.model_file)
        else:
            A = [util.parse_float_list(row) for row in (p.get("A") or "").split(";") if row.strip()]
            spec = munch.munchify(
                {
                    "conic": {
                        "d": p.get("d") or 2,
                        "t_n": p.get("t_n"),
                        "A": A or None,
                        "psi": p.get("conic_psi") or "one",
                    }
                }
            )
        model = model_file.conic_model(spec)
        # flags win over the model file
        section = spec.conic
        b = p.get("b") if p.get("b") is not None else section.get("b")
        if b is None:
            raise errors.OutOfRange("conic needs --b or conic.b in the model file")
        theta1 = p.get("theta1") if p.get("theta1") is not None else section.get("theta1", 0.0)
        theta2 = p.get("theta2") if p.get("theta2") is not None else section.get("theta2", 2 * math.pi)
        sector = multidim_engine.ConicSector(d=model.d, b=float(b), theta1=float(theta1), theta2=float(theta2))
        est = multidim_engine.conic_probability(model, sector, self.config)
        return [{"d": model.d, "b": sector.b, **est.as_row()}], EXIT_OK

    def cmd_combi(self, p: munch.Munch) -> tuple[list[Row], int]:
        op = p.get("op") or "graph"
        if op == "graph":
            H = partition_combinatorics.MultiGraph.from_edge_list(util.parse_edge_list(p.edges), p.get("vertices"))
            row: Row = {
                "vertices": H.n,
                "edges": len(H.edges),
                "F": partition_combinatorics.F_functional(H),
                "spanning_trees": partition_combinatorics.spanning_tree_count(H),
                "tutte_1_0": partition_combinatorics.tutte_point(H, 1, 0),
                "tutte_1_1": partition_combinatorics.tutte_point(H, 1, 1),
            }
            if H.n <= partition_combinatorics.MAX_VARIABLES:
                row["identity_lhs"], row["identity_rhs"] = partition_combinatorics.bicolored_identity_check(H)
            return [row], EXIT_OK
        if op == "bound":
            prob = util.parse_fraction(p.get("p") or "1/2")
            if p.get("family") == "clique":
                sizes = [int(s) for s in util.parse_float_list(p.groups)]
                groups, start = [], 0
                for size in sizes:
                    groups.append(list(range(start, start + size)))
                    start += size
                family = partition_combinatorics.clique_family(groups, prob)
            else:
                family = partition_combinatorics.m_dependent_family(int(p.N), int(p.m), prob)
            rows = []
            status = EXIT_OK
            for r in range(1, int(p.r) + 1):
                check = partition_combinatorics.verify_bound(family, r)
                rows.append({"r": r, "cumulant": check.cumulant, "bound": check.bound, "ok": check.ok})
                if not check.ok:
                    status = EXIT_NUMERICAL
            return rows, status
        if op == "moments":
            moments = [util.parse_fraction(m) for m in p.moments.split(",")]
            cumulants = partition_combinatorics.moments_to_cumulants(moments)
            back = partition_combinatorics.cumulants_to_moments(cumulants)
            rows = [
                {"order": i + 1, "moment": m, "cumulant": k, "round_trip": b == m}
                for i, (m, k, b) in enumerate(zip(moments, cumulants, back))
            ]
            return rows, EXIT_OK
        raise errors.OutOfRange(f"unknown combi operation: {op}")

    def cmd_model(self, p: munch.Munch) -> tuple[list[Row], int]:
        name = p.name
        self._require(p, f"model {name}", *_MODEL_PARAMS.get(name, ()))
        comparisons: list[models.Comparison] = []
        if name == "cycles":
            comparisons.append(models.cycles_estimate(p.n, p.k, bool(p.get("tail")), int(p.get("order") or 0), self.config))
        elif name == "bahadur-rao":
            comparisons.append(
                models.bahadur_rao_check(p.n, p.x, p.get("law") or "bernoulli", p.get("q") or 0.5, bool(p.get("tail")), self.config)
            )
        elif name == "poisson-bernoulli":
            comparisons.append(models.poisson_bernoulli(util.parse_float_list(p.ps)).deviation(p.eps, self.config))
        elif name == "ising":
            comparisons.append(models.ising_deviation(p.n, p.beta, p.x, self.config))
        elif name == "charpoly":
            est = models.charpoly_deviation(p.group, p.n, p.x, bool(p.get("lower")), self.config)
            return [{"group": p.group, "n": p.n, "x": p.x, **est.as_row()}], EXIT_OK
        elif name == "zeros":
            self._require_seed(p, "model zeros")
            trials = self.trials
            sample = models.sample_Nh(p.h, trials, p.seed, self.config)
            row = {
                "h": p.h,
                "trials": trials,
                "mean": float(sample.mean()),
                "stderr": float(sample.std(ddof=1) / math.sqrt(trials)),
                "predicted_mean": models.hyperbolic_zeros_mean(p.h),
                "cubic": models.hyperbolic_cubic_coefficient(p.h),
                "predicted_cubic": 1 / (144 * math.pi),
            }
            return [row], EXIT_OK
        elif name == "wperm":
            wp = models.weighted_perm(models.ThetaSpec(theta=p.theta), p.n)
            limit = wp.psi_limit()
            rows = [
                {
                    "theta": p.theta,
                    "n": p.n,
                    "w": w,
                    "psi_n": wp.psi_n(p.n, w).real,
                    "psi_limit": limit.real(w),
                    "h_ratio": float(wp.h[p.n]) / wp.h_asymptotic(p.n),
                }
                for w in util.parse_float_list(p.w)
            ]
            return rows, EXIT_OK
        elif name == "omega":
            stats = models.omega_statistics(p.N)
            rows = [
                {"N": p.N, "z": z, "empirical": stats.empirical_mgf(z), "predicted": stats.predicted_mgf(z),
                 "ratio": stats.mgf_ratio(z)}
                for z in util.parse_float_list(p.z)
            ]
            return rows, EXIT_OK
        else:
            raise errors.OutOfRange(f"unknown model: {name}")
        return [ComparisonRow.from_comparison(c).as_dict() for c in comparisons], EXIT_OK

    def cmd_er(self, p: munch.Munch) -> tuple[list[Row], int]:
        if p.get("edges"):
            pattern = erdos_renyi.PatternGraph.from_edge_list(p.edges)
        else:
            pattern = erdos_renyi.PatternGraph.from_name(p.get("pattern") or "triangle")
        op = p.get("op") or "cumulants"
        prob = util.parse_fraction(p.p) if op in ("cumulants", "overlap", "polynomiality") else float(util.parse_fraction(p.p))
        r = int(p.get("r") or 2)
        if op == "cumulants":
            result = erdos_renyi.exact_cumulants_bruteforce(p.n, pattern, prob, orders=r)
            rows = [{"order": i + 1, "kappa": k, "method": str(result.method)} for i, k in enumerate(result.kappa)]
            return rows, EXIT_OK
        if op == "overlap":
            rows = [{"order": s, "kappa": erdos_renyi.overlap_cumulant(p.n, pattern, prob, s)} for s in range(2, r + 1)]
            return rows, EXIT_OK
        if op == "mc":
            self._require_seed(p, "er mc")
            result = erdos_renyi.mc_cumulants(p.n, pattern, prob, self.trials, p.seed, self.config)
            rows = [
                {"order": i + 1, "kappa": k, "stderr": result.stderr[i] if result.stderr else None, "method": str(result.method)}
                for i, k in enumerate(result.kappa)
            ]
            return rows, EXIT_OK
        if op == "deviation":
            self._require(p, "er deviation", "v")
            if p.get("mc"):
                self._require_seed(p, "er deviation with Monte Carlo")
                comparison = erdos_renyi.triangle_tail_mc(p.n, prob, p.v, self.trials, p.seed, self.config)
                return [ComparisonRow.from_comparison(comparison).as_dict()], EXIT_OK
            est = erdos_renyi.triangle_deviation(p.n, prob, p.v)
            return [{"n": p.n, "p": prob, "v": p.v, **est.as_row()}], EXIT_OK
        if op == "polynomiality":
            n_list = [int(n) for n in util.parse_float_list(p.n_list)]
            fit = erdos_renyi.polynomiality_check(pattern, prob, n_list, r, p.get("oracle") or "bruteforce")
            rows = [{"r": r, "degree": fit.degree, "leading": fit.leading, "n": n, "residual": res} for n, res in fit.residuals.items()]
            return rows, EXIT_OK
        if op == "count":
            self._require_seed(p, "er count")
            graph = erdos_renyi.sample_graph(p.n, prob, p.seed)
            return [{"n": p.n, "p": prob, "pattern": pattern.name, "copies": erdos_renyi.count_copies(graph, pattern)}], EXIT_OK
        raise errors.OutOfRange(f"unknown er operation: {op}")

    def cmd_thoma(self, p: munch.Munch) -> tuple[list[Row], int]:
        omega = character_values.ThomaParameter.from_text(p.get("alpha"), p.get("beta"))
        k = int(p.get("k") or 2)
        mu = character_values.Partition.from_text(p.mu) if p.get("mu") else character_values.Partition((k,))
        action = p.action
        if action == "measure":
            measure = character_values.central_measure(omega, p.n)
            return [{"partition": str(lam), "mass": m} for lam, m in measure.items()], EXIT_OK
        if action == "table":
            frame = character_values.character_table(p.n).as_frame()
            return frame.reset_index(names="irreducible").to_dict(orient="records"), EXIT_OK
        if action == "cumulants":
            r_max = int(p.get("r") or 3)
            kappas = character_values.cycle_type_cumulants(omega, mu, p.n, r_max)
            rows = []
            for r, kappa in enumerate(kappas, start=1):
                bound = character_values.prop_bound_single(mu.size, p.n, r) if mu.length == 1 and r >= 2 else None
                rows.append(
                    {"mu": str(mu), "n": p.n, "r": r, "kappa": kappa, "bound": bound,
                     "within_bound": None if bound is None else abs(kappa) <= bound}
                )
            return rows, EXIT_OK
        if action == "limits":
            sigma2, L = character_values.general_mu_limits(omega, mu)
            return [{"mu": str(mu), "sigma2": sigma2, "L": L, **omega.as_dict()}], EXIT_OK
        if action == "deviation":
            if p.n <= character_values.MAX_TABLE_SIZE:
                comparison = character_values.character_deviation_check(omega, k, p.n, p.x)
                return [ComparisonRow.from_comparison(comparison).as_dict()], EXIT_OK
            est = character_values.character_deviation(omega, k, p.n, p.x)
            return [{"k": k, "n": p.n, "x": p.x, **est.as_row()}], EXIT_OK
        raise errors.OutOfRange(f"unknown thoma action: {action}")

    def cmd_suite(self, p: munch.Munch) -> tuple[list[Row], int]:
        results = suite.run_suite(p.get("suite_name") or "all", self.config)
        rows = [result.as_row() for result in results]
        failed = [result.name for result in results if not result.passed]
        if failed:
            logging.error(f"failed criteria: {', '.join(failed)}")
            return rows, EXIT_NUMERICAL
        return rows, EXIT_OK


def _parse_intervals(text: str) -> list[tuple[float, float]]:
    """Parses "a:b;c:d" into closed intervals, "inf" and "-inf" allowed.

    Example:

    >>> _parse_intervals("1:2; 3:inf")
    [(1.0, 2.0), (3.0, inf)]
    """
    intervals = []
    for item in text.split(";"):
        if not item.strip():
            continue
        lo, _, hi = item.partition(":")
        intervals.append((float(lo), float(hi)))
    return intervals
