"""
model_file
"""

import functools
import logging
import pathlib
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import fnc
import munch
import numpy as np

import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.limiting_functions as limiting_functions
import modphi.multidim_engine as multidim_engine
import modphi.reference_laws as reference_laws

_PSI_KEYS = ("L", "v", "theta", "group", "index_sets", "K")


def load(path: str | pathlib.Path) -> munch.Munch:
    """Reads a TOML model file into a `munch.Munch`.

    Raises:
        errors.InvalidLaw: If the file is not valid TOML

    Example:

    >>> import modphi.file_access as file_access
    >>> p = file_access.write_to_temp_file("[law]\\nname = 'poisson'\\nlambda = 2.0\\n", suffix=".toml")
    >>> load(p).law.name
    'poisson'
    """
    path = pathlib.Path(path)
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as ex:
        raise errors.InvalidLaw(f"{path}: {ex}") from ex
    spec = munch.munchify(data)
    spec.base_dir = str(path.parent)
    logging.debug(f"loaded model file {path} with sections {sorted(data)}")
    return spec


def law_from_spec(spec: munch.Munch) -> reference_laws.ReferenceLaw:
    """Builds the reference law of the `[law]` section.

    Supported names are gaussian (mean, variance), poisson (lambda),
    bernoulli (q), exponential and custom (eta_file, relative to the model
    file).

    Example:

    >>> law_from_spec(munch.munchify({"law": {"name": "gaussian", "variance": 2.0}})).variance
    2.0
    """
    name = fnc.get("law.name", spec, default="gaussian")
    if name == "gaussian":
        return reference_laws.gaussian(
            float(fnc.get("law.mean", spec, default=0.0)),
            float(fnc.get("law.variance", spec, default=1.0)),
        )
    if name == "poisson":
        return reference_laws.poisson(float(fnc.get("law.lambda", spec, default=1.0)))
    if name == "bernoulli":
        return reference_laws.bernoulli(float(fnc.get("law.q", spec, default=0.5)))
    if name == "exponential":
        return reference_laws.exponential()
    if name == "custom":
        eta_file = fnc.get("law.eta_file", spec, default=None)
        if eta_file is None:
            raise errors.InvalidLaw("a custom law needs law.eta_file")
        return reference_laws.custom_law_from_file(pathlib.Path(spec.get("base_dir", ".")) / eta_file)
    raise errors.InvalidLaw(f"unknown law: {name}")


def psi_from_spec(spec: munch.Munch) -> limiting_functions.LimitingFunction:
    """Builds the limiting function of the `[psi]` section, ψ ≡ 1 when absent.

    Example:

    >>> psi_from_spec(munch.munchify({"psi": {"kind": "exp_monomial", "L": 1.5, "v": 3}})).label
    'exp_monomial(L=1.5, v=3)'
    >>> psi_from_spec(munch.Munch()).label
    'exp_monomial(L=0.0, v=1)'
    """
    kind = fnc.get("psi.kind", spec, default="one")
    params = {key: fnc.get(f"psi.{key}", spec) for key in _PSI_KEYS if fnc.get(f"psi.{key}", spec) is not None}
    return limiting_functions.from_name(kind, **params)


def mod_phi_model(spec: munch.Munch) -> deviation_engine.ModPhiModel:
    """The mod-φ model of a model file: law, `model.t_n` and ψ.

    Raises:
        errors.OutOfRange: If t_n is missing or not positive
    """
    t_n = fnc.get("model.t_n", spec, default=None)
    if t_n is None or not float(t_n) > 0:
        raise errors.OutOfRange(f"model.t_n must be a positive number, got {t_n}")
    return deviation_engine.ModPhiModel(law=law_from_spec(spec), t_n=float(t_n), psi=psi_from_spec(spec))


def cumulant_model(spec: munch.Munch) -> deviation_engine.CumulantModel | None:
    """The cumulant data of the `[cumulant]` section, None when the file has none.

    Example:

    >>> cm = cumulant_model(munch.munchify({"cumulant": {"alpha_n": 100, "beta_n": 1, "sigma2": 2, "L": 0.5}}))
    >>> cm.alpha_n, cm.sigma2
    (100.0, 2.0)
    """
    section = spec.get("cumulant")
    if section is None:
        return None
    return deviation_engine.CumulantModel(
        alpha_n=float(fnc.get("alpha_n", section)),
        beta_n=float(fnc.get("beta_n", section, default=1.0)),
        sigma2=float(fnc.get("sigma2", section)),
        L=float(fnc.get("L", section, default=0.0)),
    )


def _no_correction(z: np.ndarray) -> float:
    return 1.0


def conic_model(spec: munch.Munch) -> multidim_engine.MultiModGaussianModel:
    """The d-dimensional mod-Gaussian model of the `[conic]` section.

    Keys are d (default 2), t_n, A (rows of the scaling matrix, identity when
    absent) and psi, either "one" or "kurtosis" for the fourth cumulant
    correction of the lattice walk step.

    Raises:
        errors.OutOfRange: If t_n is missing or not positive, or psi is unknown
        errors.InvalidLaw: If A is not a symmetric positive definite d×d matrix

    Example:

    >>> m = conic_model(munch.munchify({"conic": {"d": 2, "t_n": 100, "psi": "kurtosis"}}))
    >>> m.A.tolist(), m.t_n
    ([[1.0, 0.0], [0.0, 1.0]], 100.0)
    """
    d = int(fnc.get("conic.d", spec, default=2))
    t_n = fnc.get("conic.t_n", spec, default=None)
    if t_n is None or not float(t_n) > 0:
        raise errors.OutOfRange(f"conic.t_n must be a positive number, got {t_n}")
    A = fnc.get("conic.A", spec, default=None)
    A = np.eye(d) if A is None else np.array(A, dtype=np.float64)
    kind = fnc.get("conic.psi", spec, default="one")
    if kind == "kurtosis":
        psi = functools.partial(multidim_engine.dwalk_kurtosis_psi, d)
    elif kind == "one":
        psi = _no_correction
    else:
        raise errors.OutOfRange(f"unknown conic limiting function: {kind}")
    return multidim_engine.MultiModGaussianModel(d=d, A=A, t_n=float(t_n), psi=psi)
