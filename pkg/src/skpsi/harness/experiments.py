"""Experiment runners behind the command-line harness.

Every experiment reads its inputs from an :class:`ExperimentConfig`, fills
a :class:`ReportEnvelope` with tables, fitted slopes and named checks, and
leaves all I/O to the caller.
"""

import logging
from typing import Callable, Optional

import numpy as np
import pandas as pd

from skpsi import __version__
from skpsi.config import calculus_config as cc
from skpsi.core.grid import CircleGrid
from skpsi.core.strip import ParameterStrip, sample_lambda
from skpsi.ellipticity.parametrix import Parametrix
from skpsi.ellipticity.refined import check_ellipticity
from skpsi.ellipticity.report import (
    EllipticityReport,
    smallest_singular_values,
)
from skpsi.exceptions import CalculusError, ConfigInvalid, NotInCalculus
from skpsi.harness.config import RANDOM_SYMBOL, ExperimentConfig
from skpsi.harness.report import ReportEnvelope
from skpsi.quantization.operator import (
    interior_gap,
    oracle_compose,
    oracle_invert,
    quantize,
)
from skpsi.symbols.base import SymbolExpr, TaylorHomogeneous
from skpsi.symbols.calculus import leibniz_product
from skpsi.symbols.catalog import get_symbol, random_trig_polynomial
from skpsi.symbols.limits import (
    limit_convergence,
    membership_by_derivative_decay,
)
from skpsi.toeplitz.compression import (
    _compressed_smallest,
    toeplitz_ellipticity,
    toeplitz_parametrix,
)
from skpsi.toeplitz.projections import (
    OrderReductionPair,
    ProjectionSymbol,
    make_hardy_projection,
    make_identity_projection,
    make_rotated_projection,
    make_zero_projection,
)
from skpsi.toeplitz.resolvent import remark_identity_check, resolvent_pipeline
from skpsi.utils.validation import ensure_list

logger = logging.getLogger(__name__)

__all__ = ["RUNNERS", "run", "sweep", "make_projection", "witness_value"]

RESIDUAL_TOL = 1e-8
WITNESS_TOL = 1e-3
SLOPE_RANGE = (-1.1, -0.9)
DEFAULTS = {
    "compose": {"left": "bessel-1", "right": "exp-ix"},
    "membership": {"A": "limit-model"},
    "taylor": {"A": "taylor-resolvent"},
    "ellipticity": {"A": "resolvent-reduced"},
    "parametrix": {"A": "resolvent-reduced"},
    "toeplitz": {"A": "transport", "projection": "hardy"},
    "resolvent": {"A": "bessel1", "projection": "hardy"},
    "invert": {"A": "param-bessel1"},
}


def _inputs(config: ExperimentConfig, experiment: str) -> dict:
    return {**DEFAULTS.get(experiment, {}), **config.symbol}


def _symbol(inputs: dict, key: str, seed: int) -> SymbolExpr:
    ident = inputs[key]
    if ident == RANDOM_SYMBOL:
        return random_trig_polynomial(seed, inputs.get("bandwidth", 8))
    params = {}
    if "eps" in inputs:
        params["eps"] = float(inputs["eps"])
    return get_symbol(ident, **params)


def make_projection(name: str, K: int, n: int = 1) -> ProjectionSymbol:
    """Projection by name: hardy, rotated, identity or zero."""
    if name == "hardy":
        return make_hardy_projection(K)
    if name == "rotated":
        return make_rotated_projection()
    if name == "identity":
        return make_identity_projection(n)
    if name == "zero":
        return make_zero_projection(n)
    raise ConfigInvalid(f"Unknown projection {name!r}.")


def _projections(inputs: dict, K: int, n: int) -> tuple:
    default = inputs.get("projection", "identity")
    P0 = make_projection(inputs.get("P0", default), K, n)
    P1 = make_projection(inputs.get("P1", default), K, n)
    return P0, P1


def witness_value(
    a: SymbolExpr,
    report: EllipticityReport,
    P0: Optional[ProjectionSymbol] = None,
    P1: Optional[ProjectionSymbol] = None,
) -> float:
    """Re-evaluate the smallest singular value at a report's witness.

    Principal conditions are recomputed from the principal symbols at the
    witness point; other conditions return the recorded value.
    """
    w = report.witness or {}
    condition = w.get("condition")
    if condition not in ("S1-principal", "1-principal"):
        return float(w.get("value", np.nan))
    point = (w["x"], w["xi"], w["tau"], w["theta"])
    value = a.require_principal()(*point)
    if condition == "S1-principal":
        return float(smallest_singular_values(value).item())
    p0 = P0.symbol.require_principal()(*point)
    p1 = P1.symbol.require_principal()(*point)
    smallest, _, _ = _compressed_smallest(p1, value, p0)
    return float(np.asarray(smallest).item())


def _negative_control(envelope, a, report, P0=None, P1=None):
    envelope.check("negative-control", not report.passed)
    if report.passed:
        return
    value = witness_value(a, report, P0, P1)
    envelope.results["witness_value"] = value
    envelope.results["witness"] = report.witness
    envelope.check("witness-small", value <= WITNESS_TOL)


def _report_table(report: EllipticityReport) -> pd.DataFrame:
    w = report.witness or {}
    rows = [
        {
            "tau": w.get("tau", np.nan) if not ok else np.nan,
            "theta": w.get("theta", np.nan) if not ok else np.nan,
            "condition": name,
            "passed": ok,
            "constant": report.constants.get(name, np.nan),
        }
        for name, ok in report.verdicts.items()
    ]
    return pd.DataFrame(rows)


def run_compose(config, strip, grid, envelope):
    """Leibniz truncation error against the oracle product per order N."""
    inputs = _inputs(config, "compose")
    left = _symbol(inputs, "left", config.seed)
    right = _symbol(inputs, "right", config.seed)
    orders = [int(n) for n in inputs.get("orders", [0, 1, 2, 3])]
    low, high = grid.K / 4, grid.K / 2
    rows = []
    for lam in sample_lambda(strip)[:1]:
        product = oracle_compose(
            quantize(left, lam, grid), quantize(right, lam, grid)
        )
        for N in orders:
            approx = quantize(leibniz_product(left, right, N), lam, grid)
            rows.append(
                {
                    "tau": lam[0],
                    "theta": lam[1],
                    "N": N,
                    "error": interior_gap(approx, product, low, high),
                }
            )
    table = pd.DataFrame(rows)
    envelope.add_table("compose", table)
    errors = table.error.to_numpy()
    envelope.results["errors"] = dict(zip(orders, errors.tolist()))
    envelope.check("leibniz-decreasing", bool(np.all(np.diff(errors) < 0)))
    if "tol" in inputs:
        envelope.check("leibniz-final", errors[-1] <= float(inputs["tol"]))


def run_membership(config, strip, grid, envelope):
    """Decay of a(tau) towards its limit-family along every theta ray."""
    inputs = _inputs(config, "membership")
    a = _symbol(inputs, "A", config.seed)
    limit = None
    try:
        limit = a.limit
    except NotInCalculus:
        verdict = membership_by_derivative_decay(
            a, float(inputs.get("delta", 0.5)), strip, grid
        )
        envelope.results["derivative_bound"] = verdict.bound
        envelope.check("derivative-decay", verdict.passed)
        if not verdict.passed:
            return
        limit = verdict.limit

    tables = []
    for theta in strip.theta_samples:
        ray = ParameterStrip(theta, theta, strip.tau_samples, [theta])
        table = limit_convergence(a, ray, grid, limit=limit)
        envelope.slopes[f"theta={theta:.6g}"] = table.attrs["slope"]
        tables.append(table.assign(theta=float(theta)))
    envelope.add_table("limit", pd.concat(tables, ignore_index=True))
    slopes = np.array(list(envelope.slopes.values()), dtype=float)
    max_slope = float(inputs.get("max_slope", -0.9))
    envelope.results["worst_slope"] = float(np.nanmax(slopes))
    envelope.check("limit-decay", bool(np.all(slopes <= max_slope)))

    if a.classical and a.principal is not None:
        thetas = np.asarray(strip.theta_samples)
        pole = a.require_principal()(0.0, 0.0, 1.0, thetas)
        gap = np.abs(limit(0.0, 0.0, thetas) - pole).max()
        envelope.results["pole_gap"] = float(gap)
        envelope.check("limit-pole", gap <= 1e-6)


def run_taylor(config, strip, grid, envelope):
    """North-pole coefficients and remainder slopes of a Taylor symbol."""
    inputs = _inputs(config, "taylor")
    a = _symbol(inputs, "A", config.seed)
    if not isinstance(a, TaylorHomogeneous):
        raise ConfigInvalid(f"{a!r} carries no north-pole expansion.")
    data = a.taylor
    rows = []
    for theta in strip.theta_samples:
        for phi in (1.0, -1.0):
            for j, coefficient in enumerate(data.coefficients):
                value = np.asarray(coefficient(0.0, phi, theta)).flat[0]
                value = complex(value)
                rows.append(
                    {
                        "tau": 1.0,
                        "theta": float(theta),
                        "phi": phi,
                        "j": j,
                        "real": value.real,
                        "imag": value.imag,
                    }
                )
    envelope.add_table("taylor", pd.DataFrame(rows))
    slopes = {int(ell): float(s) for ell, s in data.remainder_slopes.items()}
    envelope.slopes.update({f"ell={ell}": s for ell, s in slopes.items()})
    envelope.check(
        "taylor-remainder",
        all(s >= ell + 1 - 0.1 for ell, s in slopes.items()),
    )


def run_ellipticity(config, strip, grid, envelope):
    inputs = _inputs(config, "ellipticity")
    a = _symbol(inputs, "A", config.seed)
    calculus = inputs.get("calculus", "refined")
    report = check_ellipticity(a, strip, grid, calculus)
    envelope.results["report"] = report.to_dict()
    envelope.results.update(
        {f"constant[{k}]": float(v) for k, v in report.constants.items()}
    )
    envelope.add_table("ellipticity", _report_table(report))
    if inputs.get("expect", "pass") == "fail":
        _negative_control(envelope, a, report)
    else:
        envelope.check("elliptic", report.passed)


def run_parametrix(config, strip, grid, envelope):
    """Parametrix residuals and oracle gaps past the uniform threshold."""
    inputs = _inputs(config, "parametrix")
    a = _symbol(inputs, "A", config.seed)
    est = Parametrix(
        depth=inputs.get("depth"),
        calculus=inputs.get("calculus", "refined"),
        K=grid.K,
        sobolev_s=float(inputs.get("sobolev_s", 0.0)),
        n_jobs=inputs.get("n_jobs"),
    ).fit(a, strip)
    result = est.result_
    envelope.add_table("residuals", result.residuals)
    past = result.past_threshold()
    envelope.results["tau_threshold"] = result.tau_threshold
    envelope.results["max_residual"] = result.max_residual()
    gap = float(past.oracle_gap.max()) if len(past) else np.inf
    envelope.results["max_oracle_gap"] = gap
    tol = float(inputs.get("tol", RESIDUAL_TOL))
    envelope.check("residuals", result.max_residual() <= tol)
    envelope.check("oracle-gap", gap <= tol)


def run_toeplitz(config, strip, grid, envelope):
    """Inverse of the compressed operator P1 A P0 for large tau."""
    inputs = _inputs(config, "toeplitz")
    A = _symbol(inputs, "A", config.seed)
    P0, P1 = _projections(inputs, grid.K, A.shape[0])
    if inputs.get("expect", "pass") == "fail":
        report = toeplitz_ellipticity(A, P0, P1, strip, grid)
        envelope.add_table("ellipticity", _report_table(report))
        RS = OrderReductionPair(A.order, n=A.shape[0])
        _negative_control(envelope, RS.apply_reduction(A), report, P0, P1)
        return
    result = toeplitz_parametrix(
        A,
        P0,
        P1,
        strip,
        grid,
        L=inputs.get("depth"),
        sobolev_s=float(inputs.get("sobolev_s", 0.0)),
        n_jobs=inputs.get("n_jobs"),
    )
    envelope.add_table("residuals", result.residuals)
    envelope.results["tau_threshold"] = result.tau_threshold
    envelope.results["max_residual"] = result.max_residual()
    envelope.results["chain_residual"] = result.chain_residual
    tol = float(inputs.get("tol", RESIDUAL_TOL))
    envelope.check("residuals", result.max_residual() <= tol)


def run_resolvent(config, strip, grid, envelope):
    """Resolvent decay of P A P over the sector, with the splitting identity
    when a complementary symbol ``B`` is configured."""
    inputs = _inputs(config, "resolvent")
    A = _symbol(inputs, "A", config.seed)
    P = make_projection(inputs["projection"], grid.K, A.shape[0])
    record = resolvent_pipeline(
        A,
        P,
        strip,
        grid,
        sobolev_s=float(inputs.get("sobolev_s", 0.0)),
        L=inputs.get("depth"),
        n_jobs=inputs.get("n_jobs"),
    )
    envelope.add_table("resolvent", record.table)
    for theta, slope in zip(record.slopes.theta, record.slopes.slope):
        envelope.slopes[f"theta={theta:.6g}"] = float(slope)
    envelope.results.update(
        {
            "fitted_slope": record.fitted_slope,
            "C_fit": record.C_fit,
            "tau_threshold": record.tau_threshold,
            "domain_gain": record.domain_gain,
            "mixed_seminorms": record.mixed_seminorms,
        }
    )
    low, high = inputs.get("slope_range", SLOPE_RANGE)
    envelope.check("resolvent-decay", low <= record.fitted_slope <= high)
    table = record.table
    tau0 = table.tau[table.tau >= record.tau_threshold].min()
    first = table[table.tau == tau0]
    envelope.check(
        "domain-gain",
        record.domain_gain <= 2.0 * float(first.domain_gain.max()),
    )
    if "B" in inputs:
        B = _symbol(inputs, "B", config.seed)
        remark = remark_identity_check(A, B, P, strip, grid)
        envelope.results["remark"] = remark
        envelope.check("remark-identity", remark["passed"])
        envelope.check("spectral-equivalence", remark["spectral"]["agree"])


def run_invert(config, strip, grid, envelope):
    """Exact inverse of Op(A)(lambda) at every strip sample.

    A truncation that is singular to tolerance raises, so a ``sweep`` over
    this experiment records the error per cutoff.
    """
    inputs = _inputs(config, "invert")
    A = _symbol(inputs, "A", config.seed)
    regularize = inputs.get("regularize")
    if regularize is not None:
        regularize = float(regularize)
    rows = []
    for lam in sample_lambda(strip):
        T = quantize(A, lam, grid, float(inputs.get("sobolev_s", 0.0)))
        inverse, report = oracle_invert(T, regularize)
        product = oracle_compose(T, inverse).matrix
        residual = np.linalg.norm(product - np.eye(product.shape[0]), 2)
        rows.append(
            {
                "tau": lam[0],
                "theta": lam[1],
                "smallest": report.smallest,
                "largest": report.largest,
                "condition": report.condition,
                "residual": float(residual),
            }
        )
    table = pd.DataFrame(rows)
    envelope.add_table("invert", table)
    envelope.results["max_condition"] = float(table.condition.max())
    envelope.results["min_smallest"] = float(table.smallest.min())
    envelope.results["max_residual"] = float(table.residual.max())
    if regularize is None:
        tol = float(inputs.get("tol", RESIDUAL_TOL))
        envelope.check("inverse-residual", table.residual.max() <= tol)


RUNNERS: dict[str, Callable] = {
    "compose": run_compose,
    "membership": run_membership,
    "taylor": run_taylor,
    "ellipticity": run_ellipticity,
    "parametrix": run_parametrix,
    "toeplitz": run_toeplitz,
    "resolvent": run_resolvent,
    "invert": run_invert,
}


def _envelope(config: ExperimentConfig) -> ReportEnvelope:
    return ReportEnvelope(config.experiment, config.to_dict(), __version__)


def _execute(config: ExperimentConfig, experiment: str, grid: CircleGrid):
    envelope = _envelope(config)
    strip = config.build_strip()
    logger.info("Running %s at K=%d", experiment, grid.K)
    try:
        RUNNERS[experiment](config, strip, grid, envelope)
    except CalculusError as err:
        err.add_note(f"while running experiment {experiment!r} at K={grid.K}")
        raise
    return envelope.finish()


def run(config: ExperimentConfig) -> ReportEnvelope:
    """Run one experiment; ``sweep`` configurations are forwarded.

    Raises
    ------
    ConfigInvalid, CatalogMiss
        For invalid inputs.
    CalculusError
        Any module error, annotated with the experiment and cutoff.
    """
    if config.experiment == "sweep":
        return sweep(config)
    return _execute(config, config.experiment, config.build_grid())


def _drift(low: float, high: float) -> float:
    scale = max(abs(low), abs(high))
    return abs(high - low) / scale if scale > 0 else 0.0


def sweep(config: ExperimentConfig) -> ReportEnvelope:
    """Run the base experiment at K and 2K and report relative drifts.

    Errors raised at either cutoff are recorded by type; the sweep is
    consistent when both cutoffs raise the same error or none.
    """
    base = config.symbol.get("base", "ellipticity")
    K = config.grid["K"]
    envelope = _envelope(config)
    runs, failures = {}, {}
    for cutoff in (K, 2 * K):
        try:
            runs[cutoff] = _execute(config, base, config.build_grid(cutoff))
        except CalculusError as err:
            failures[cutoff] = type(err).__name__
            logger.debug("Sweep at K=%d raised %s", cutoff, err)
    envelope.results["errors_by_K"] = {str(k): v for k, v in failures.items()}
    if failures:
        consistent = len(failures) == 2 and len(set(failures.values())) == 1
        envelope.check("consistent-errors", consistent)
        return envelope.finish()

    low, high = runs[K], runs[2 * K]
    # a single key read from the environment arrives as a string
    keys = ensure_list(config.symbol.get("drift_keys") or sorted(low.results))
    rows = []
    for key in keys:
        a, b = low.results.get(key), high.results.get(key)
        if not isinstance(a, (int, float)) or not isinstance(b, (int, float)):
            continue
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        rows.append(
            {
                "tau": np.nan,
                "theta": np.nan,
                "quantity": key,
                "value_K": float(a),
                "value_2K": float(b),
                "drift": _drift(a, b),
            }
        )
    table = pd.DataFrame(
        rows,
        columns=["tau", "theta", "quantity", "value_K", "value_2K", "drift"],
    )
    envelope.add_table("sweep", table)
    max_drift = float(table.drift.max()) if len(table) else 0.0
    envelope.results["max_drift"] = max_drift
    envelope.checks.update({f"K:{k}": v for k, v in low.checks.items()})
    envelope.checks.update({f"2K:{k}": v for k, v in high.checks.items()})
    envelope.check("doubling-drift", max_drift < cc.doubling_drift)
    return envelope.finish()
