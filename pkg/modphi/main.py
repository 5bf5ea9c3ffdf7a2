import argparse
import json
import logging
import sys

import modphi.config as config
import modphi.errors as errors
import modphi.harness as harness
import modphi.suite as suite

# Options that configure the run rather than the computation
_RUN_OPTIONS = ("command", "json", "csv", "budget", "fast")


class ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as a JSON error object and exits with 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        ex = errors.OutOfRange(message)
        sys.stderr.write(json.dumps(harness.error_object(ex, "validation"), sort_keys=True) + "\n")
        sys.exit(harness.EXIT_VALIDATION)


def add_law_arguments(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--law",
        type=str,
        choices=["gaussian", "poisson", "bernoulli", "exponential", "custom"],
        dest="law",
        default="gaussian",
        help="Reference law of the model",
    )
    parser.add_argument("--mean", type=float, dest="mean", default=0.0, help="Mean of the gaussian law")
    parser.add_argument("--variance", type=float, dest="variance", default=1.0, help="Variance of the gaussian law")
    parser.add_argument("--lambda", type=float, dest="lam", default=1.0, help="Parameter of the poisson law")
    parser.add_argument("--q", type=float, dest="q", default=0.5, help="Success probability of the bernoulli law")
    parser.add_argument(
        "--eta-file",
        metavar="PATH",
        type=str,
        dest="eta_file",
        default=None,
        help="Custom law file of 'key = value' lines, e.g. 'eta = exp(z) - 1'",
    )


def main():
    cfg = config.Config()

    logging.basicConfig(
        level=logging.INFO,
        format="[%(asctime)s] %(levelname)s [%(filename)s:%(lineno)d %(funcName)s] %(message)s",
        datefmt="%d/%b/%Y %H:%M:%S",
        stream=sys.stderr,
    )

    # This shows the default value of arguments in the help text.
    # See https://docs.python.org/3/library/argparse.html#argparse.ArgumentDefaultsHelpFormatter
    parser_args = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    common = ArgumentParser(add_help=False)
    common.add_argument(
        "--seed",
        type=int,
        dest="seed",
        default=None,
        help="Seed of the random streams. Required by every Monte Carlo subcommand.",
    )
    common.add_argument(
        "--trials",
        type=int,
        dest="trials",
        default=cfg.trials,
        help="Number of Monte Carlo trials",
    )
    common.add_argument(
        "--budget",
        type=float,
        dest="budget",
        default=cfg.budget,
        help="Maximum number of elementary sampled events of a run",
    )
    output = common.add_mutually_exclusive_group()
    output.add_argument(
        "--json",
        metavar="PATH",
        nargs="?",
        const="-",
        dest="json",
        default=None,
        help="Write rows as JSON (the default) to PATH, or to stdout without PATH",
    )
    output.add_argument(
        "--csv",
        metavar="PATH",
        nargs="?",
        const="-",
        dest="csv",
        default=None,
        help="Write rows as CSV to PATH, or to stdout without PATH",
    )
    common.add_argument(
        "--fast",
        action="store_true",
        dest="fast",
        help=f"Divide trial counts by {cfg.fast_factor} and widen Monte Carlo tolerances",
    )

    mainparser = ArgumentParser(
        description="Precise deviations of mod-φ convergent sequences",
        **parser_args,
    )

    subparsers = mainparser.add_subparsers(help="Command to run", dest="command", required=True)

    subparser_legendre = subparsers.add_parser(
        "legendre",
        description="Saddle point h(x), Legendre transform F(x) and its derivatives on a grid",
        parents=[common],
        **parser_args,
    )
    add_law_arguments(subparser_legendre)
    subparser_legendre.add_argument(
        "--x", metavar="X1,X2,...", type=str, dest="x", required=True, help="Grid of points"
    )

    subparser_psi = subparsers.add_parser(
        "psi",
        description="Evaluates a limiting function on a real grid",
        parents=[common],
        **parser_args,
    )
    subparser_psi.add_argument(
        "--kind",
        type=str,
        choices=["one", "exp_monomial", "inv_gamma_exp", "gamma_ratio", "barnes_ratio", "weierstrass_product"],
        dest="kind",
        required=True,
        help="Family of the limiting function",
    )
    subparser_psi.add_argument("--L", type=float, dest="L", default=None, help="Coefficient of exp(L z^v / v!)")
    subparser_psi.add_argument("--v", type=int, dest="v", default=None, help="Degree of exp(L z^v / v!)")
    subparser_psi.add_argument("--theta", type=float, dest="theta", default=None, help="θ of Γ(θ)/Γ(θ e^z)")
    subparser_psi.add_argument(
        "--group", type=str, choices=["usp", "so_even", "u_real"], dest="group", default=None, help="Compact group"
    )
    subparser_psi.add_argument(
        "--index-sets",
        metavar="SET1,SET2",
        type=str,
        dest="index_sets",
        default=None,
        help="Index sets of the Weierstrass products, 'primes' and/or 'integers'",
    )
    subparser_psi.add_argument("--K", type=int, dest="K", default=None, help="Truncation of the Weierstrass products")
    subparser_psi.add_argument("--z", metavar="Z1,Z2,...", type=str, dest="z", required=True, help="Grid of points")

    subparser_deviate = subparsers.add_parser(
        "deviate",
        description="Deviation estimates of a mod-φ model given by flags or a model file",
        parents=[common],
        **parser_args,
    )
    add_law_arguments(subparser_deviate)
    subparser_deviate.add_argument(
        "--model",
        "--model-file",
        metavar="PATH",
        type=str,
        dest="model_file",
        default=None,
        help="TOML model file with [law], [model], [psi] and optionally [cumulant] sections",
    )
    subparser_deviate.add_argument(
        "--t-n", type=float, dest="t_n", default=None, help="Parameter t_n of the model"
    )
    subparser_deviate.add_argument(
        "--psi", type=str, dest="psi_kind", default="one", help="Kind of the limiting function (see the psi command)"
    )
    subparser_deviate.add_argument("--psi-L", type=float, dest="psi_L", default=None)
    subparser_deviate.add_argument("--psi-v", type=int, dest="psi_v", default=None)
    subparser_deviate.add_argument("--psi-theta", type=float, dest="psi_theta", default=None)
    subparser_deviate.add_argument("--psi-group", type=str, dest="psi_group", default=None)
    subparser_deviate.add_argument("--psi-index-sets", type=str, dest="psi_index_sets", default=None)
    subparser_deviate.add_argument("--psi-K", type=int, dest="psi_K", default=None)
    subparser_deviate.add_argument(
        "--kind",
        "--estimate",
        type=str,
        choices=["tail", "point", "crossover", "cumulant", "berry-esseen", "borel"],
        dest="estimate",
        default="tail",
        help="Which estimate to compute. crossover and berry-esseen take points in CLT units, cumulant takes T.",
    )
    subparser_deviate.add_argument(
        "--order", type=int, choices=[0, 1, 2], dest="order", default=0, help="Number of correction terms"
    )
    subparser_deviate.add_argument(
        "--tail",
        type=str,
        choices=["upper", "lower", "two_sided"],
        dest="tail",
        default="upper",
        help="Tail of the cumulant estimate",
    )
    subparser_deviate.add_argument(
        "--alpha-n", type=float, dest="alpha_n", default=None, help="α_n of the cumulant estimate"
    )
    subparser_deviate.add_argument(
        "--beta-n", type=float, dest="beta_n", default=None, help="β_n of the cumulant estimate"
    )
    subparser_deviate.add_argument(
        "--sigma2", type=float, dest="sigma2", default=None, help="σ² of the cumulant estimate"
    )
    subparser_deviate.add_argument(
        "--L", type=float, dest="cumulant_L", default=None, help="L of the cumulant estimate"
    )
    subparser_deviate.add_argument(
        "--x", "--y", "--T", metavar="X1,X2,...", type=str, dest="x", default="", help="Points of the chosen estimate"
    )
    subparser_deviate.add_argument(
        "--intervals",
        metavar="A:B;C:D",
        type=str,
        dest="intervals",
        default=None,
        help="Union of closed intervals for the borel estimate, 'inf' allowed",
    )

    subparser_walk2d = subparsers.add_parser(
        "walk2d",
        description="Angle of a planar lattice walk conditioned on a large norm",
        parents=[common],
        **parser_args,
    )
    subparser_walk2d.add_argument("--n", type=int, dest="n", required=True, help="Walk length")
    subparser_walk2d.add_argument("--r", type=float, dest="r", default=0.5, help="Norm threshold r n^(3/4)")
    subparser_walk2d.add_argument(
        "--quarter-turn",
        action="store_true",
        dest="quarter_turn",
        help="Test the unconditioned endpoint for invariance under quarter turns instead",
    )
    subparser_walk2d.add_argument(
        "--bins", type=int, dest="bins", default=cfg.bins, help="Number of angular bins of the histogram"
    )

    subparser_conic = subparsers.add_parser(
        "conic",
        description="Probability of a conic sector for a multi-dimensional mod-Gaussian model",
        parents=[common],
        **parser_args,
    )
    subparser_conic.add_argument(
        "--model",
        "--model-file",
        metavar="PATH",
        type=str,
        dest="model_file",
        default=None,
        help="TOML model file with a [conic] section of d, t_n, A, psi and optionally b, theta1, theta2",
    )
    subparser_conic.add_argument("--d", type=int, dest="d", default=2, help="Dimension")
    subparser_conic.add_argument(
        "--A", metavar="ROW;ROW", type=str, dest="A", default=None, help="Scaling matrix, identity when absent"
    )
    subparser_conic.add_argument("--t-n", type=float, dest="t_n", default=None, help="Parameter t_n of the model")
    subparser_conic.add_argument("--b", type=float, dest="b", default=None, help="Radius of the sector")
    subparser_conic.add_argument(
        "--theta1", type=float, dest="theta1", default=None, help="Start angle (d = 2), 0 when absent"
    )
    subparser_conic.add_argument(
        "--theta2", type=float, dest="theta2", default=None, help="End angle (d = 2), 2π when absent"
    )
    subparser_conic.add_argument(
        "--psi",
        type=str,
        choices=["one", "kurtosis"],
        dest="conic_psi",
        default="one",
        help="Limiting function, the fourth cumulant of the lattice walk step for 'kurtosis'",
    )

    subparser_combi = subparsers.add_parser(
        "combi",
        description="Graph functionals, dependency graph bounds and moment/cumulant conversion",
        parents=[common],
        **parser_args,
    )
    subparser_combi.add_argument("op", type=str, choices=["graph", "bound", "moments"], help="Operation")
    subparser_combi.add_argument("--edges", metavar="1-2,2-3", type=str, dest="edges", default="", help="Edges")
    subparser_combi.add_argument("--vertices", type=int, dest="vertices", default=None, help="Number of vertices")
    subparser_combi.add_argument(
        "--family", type=str, choices=["m-dependent", "clique"], dest="family", default="m-dependent"
    )
    subparser_combi.add_argument("--N", type=int, dest="N", default=6, help="Number of variables")
    subparser_combi.add_argument("--m", type=int, dest="m", default=2, help="Window of the m-dependent family")
    subparser_combi.add_argument("--p", type=str, dest="p", default="1/2", help="Bernoulli parameter")
    subparser_combi.add_argument("--groups", metavar="3,2,1", type=str, dest="groups", default="3,2,1")
    subparser_combi.add_argument("--r", type=int, dest="r", default=4, help="Largest cumulant order")
    subparser_combi.add_argument("--moments", metavar="M1,M2,...", type=str, dest="moments", default="")

    subparser_model = subparsers.add_parser(
        "model",
        description="Estimates of the built-in models next to exact or Monte Carlo values",
        parents=[common],
        **parser_args,
    )
    subparser_model.add_argument(
        "name",
        type=str,
        choices=["cycles", "bahadur-rao", "poisson-bernoulli", "ising", "zeros", "wperm", "omega", "charpoly"],
        help="Model",
    )
    subparser_model.add_argument("--n", type=int, dest="n", default=1000)
    subparser_model.add_argument("--k", type=int, dest="k", default=None)
    subparser_model.add_argument("--tail", action="store_true", dest="tail", help="Tail instead of point mass")
    subparser_model.add_argument("--order", type=int, dest="order", default=0)
    subparser_model.add_argument("--x", type=float, dest="x", default=None)
    subparser_model.add_argument("--law", type=str, choices=["bernoulli", "poisson"], dest="law", default="bernoulli")
    subparser_model.add_argument("--q", type=float, dest="q", default=0.5)
    subparser_model.add_argument("--ps", metavar="P1,P2,...", type=str, dest="ps", default="")
    subparser_model.add_argument("--eps", type=float, dest="eps", default=None)
    subparser_model.add_argument("--beta", type=float, dest="beta", default=0.5)
    subparser_model.add_argument("--group", type=str, choices=["usp", "so_even", "u_real"], dest="group", default="usp")
    subparser_model.add_argument("--lower", action="store_true", dest="lower")
    subparser_model.add_argument("--h", type=float, dest="h", default=None)
    subparser_model.add_argument("--theta", type=float, dest="theta", default=1.0)
    subparser_model.add_argument("--w", metavar="W1,W2,...", type=str, dest="w", default="0")
    subparser_model.add_argument("--N", type=int, dest="N", default=10**6)
    subparser_model.add_argument("--z", metavar="Z1,Z2,...", type=str, dest="z", default="0.5")

    subparser_er = subparsers.add_parser(
        "er",
        description="Subgraph counts of Erdős–Rényi graphs",
        parents=[common],
        **parser_args,
    )
    subparser_er.add_argument(
        "op", type=str, choices=["cumulants", "overlap", "mc", "deviation", "polynomiality", "count"], help="Operation"
    )
    subparser_er.add_argument(
        "--pattern", type=str, choices=["edge", "triangle", "path3"], dest="pattern", default="triangle"
    )
    subparser_er.add_argument(
        "--edges", metavar="1-2,2-3", type=str, dest="edges", default=None, help="Custom pattern graph"
    )
    subparser_er.add_argument("--n", type=int, dest="n", default=5)
    subparser_er.add_argument("--p", type=str, dest="p", default="1/2", help="Edge probability, e.g. 1/2 or 0.3")
    subparser_er.add_argument("--r", type=int, dest="r", default=2, help="Cumulant order")
    subparser_er.add_argument("--v", type=float, dest="v", default=None, help="Deviation level")
    subparser_er.add_argument("--mc", action="store_true", dest="mc", help="Compare with Monte Carlo")
    subparser_er.add_argument("--n-list", metavar="N1,N2,...", type=str, dest="n_list", default="3,4,5,6,7,8,9")
    subparser_er.add_argument(
        "--oracle", type=str, choices=["bruteforce", "overlap"], dest="oracle", default="bruteforce"
    )

    subparser_thoma = subparsers.add_parser(
        "thoma",
        description="Random character values of the symmetric groups under central measures",
        parents=[common],
        **parser_args,
    )
    subparser_thoma.add_argument(
        "action", type=str, choices=["measure", "cumulants", "limits", "deviation", "table"], help="Action"
    )
    subparser_thoma.add_argument("--alpha", metavar="A1,A2,...", type=str, dest="alpha", default="")
    subparser_thoma.add_argument("--beta", metavar="B1,B2,...", type=str, dest="beta", default="")
    subparser_thoma.add_argument("--k", type=int, dest="k", default=2, help="Cycle length")
    subparser_thoma.add_argument("--mu", metavar="3,1", type=str, dest="mu", default=None, help="Cycle type")
    subparser_thoma.add_argument("--n", type=int, dest="n", default=6)
    subparser_thoma.add_argument("--r", type=int, dest="r", default=3)
    subparser_thoma.add_argument("--x", type=float, dest="x", default=1.0)

    subparser_suite = subparsers.add_parser(
        "suite",
        description="Runs the acceptance criteria",
        parents=[common],
        **parser_args,
    )
    subparser_suite.add_argument(
        "suite_name", type=str, nargs="?", choices=["all", *suite.GROUPS], default="all", help="Group to run"
    )

    args = mainparser.parse_args()
    cfg.trials = args.trials
    cfg.budget = args.budget
    cfg.fast = args.fast
    if args.seed is not None:
        cfg.seed = args.seed
    if args.csv is not None:
        cfg.output_format = "csv"
        cfg.output_path = None if args.csv == "-" else args.csv
    elif args.json is not None:
        cfg.output_path = None if args.json == "-" else args.json
    params = {k: v for k, v in vars(args).items() if k not in _RUN_OPTIONS}
    sys.exit(harness.Harness(cfg=cfg).run(args.command, params))


if __name__ == "__main__":
    main()
