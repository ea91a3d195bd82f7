"""
Harness - cross-validation of the S(x, eta) evaluators.

This module defines the Harness class, which drives every check the CLI exposes:
1. compare: all valid methods against each other on a grid
2. images_check: series kernel against the method-of-images closed form
3. dispersive_scan: sup |S| over a grid and its boundedness in x
4. order_check: empirical convergence orders at small and large x
5. scan: one method over a grid, as a table
6. selfcheck: random-sample checks of the special functions and b_0
"""

from __future__ import annotations

import itertools
import math
from pathlib import Path
from typing import Any, Literal, Optional, TextIO, Union

import numpy as np
import pandas as pd
import structlog

from .asymptotic import (
    b0_closed_form,
    cauchy_coefficient,
    images_closed_form,
    s_uniform,
    small_x_majorant,
    uniform_feasible,
)
from .evaluators import (
    BaseEvaluator,
    evaluate_auto,
    get_all_evaluators,
    get_evaluator,
    valid_methods,
)
from .exceptions import ConeKernelException, DomainException
from .kernel import assemble_kernel, interface_distance, reduce
from .models import ConeGeometry, EvalResult, KernelQuery, Method
from .schemas import GridSpec, MethodValue, PairDiff, PointRecord, Report, SlopeFit
from .series import s_series
from .settings import Settings
from .specfun import bessel_j, erfc_asymptotic, erfc_cplx

logger = structlog.get_logger(__name__)

SCAN_COLUMNS = ["rho", "x", "eta", "method", "re", "im", "abs_err"]

# Upper half of the x range may exceed the lower half by this factor
BOUNDEDNESS_FACTOR = 1.05
# RMS log-residual above which a slope fit is inconclusive
MAX_FIT_RESIDUAL = 0.5
ORDER_SAMPLES = 16
# |erfc - leading term| may exceed the first omitted term by O(|z|^-4) on the 45 degree ray
ERFC_TAIL_FACTOR = 1.1


def write_csv(df: pd.DataFrame, path: Union[str, Path, TextIO]) -> None:
    """Write a scan table with 17 significant digits and \\n line endings."""
    df.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")


def fit_slope(
    xs: list[float], errors: list[float], target: float, window: float, mode: str
) -> SlopeFit:
    """
    Least-squares slope of log(error) against log(x).

    Points with zero error are dropped; fewer than three points or an RMS residual
    above MAX_FIT_RESIDUAL make the verdict inconclusive.
    """
    fit = SlopeFit(mode=mode, target=target, window=window, x=xs, errors=errors)
    pairs = [(x, e) for x, e in zip(xs, errors) if e > 0.0 and math.isfinite(e)]
    if len(pairs) < 3:
        return fit
    lx = np.log([p[0] for p in pairs])
    le = np.log([p[1] for p in pairs])
    slope, intercept = np.polyfit(lx, le, 1)
    residual = float(np.sqrt(np.mean((le - (slope * lx + intercept)) ** 2)))
    if residual > MAX_FIT_RESIDUAL:
        verdict = "inconclusive"
    elif abs(slope - target) <= window:
        verdict = "pass"
    else:
        verdict = "fail"
    return fit.model_copy(update={"slope": float(slope), "residual": residual, "verdict": verdict})


class Harness:
    """
    Runs cross-checks between the evaluators and packages them as Reports.

    Each check is a plain loop over independent grid points followed by a single
    reduction into the Report.
    """

    def __init__(self, settings: Optional[Settings] = None, kmax: Optional[int] = None) -> None:
        """
        Initialize the harness.

        Args:
            settings: Tunables; shipped defaults when omitted
            kmax: Diffractive order for the uniform expansion (settings.kmax when omitted)
        """
        self.settings = settings or Settings()
        self.kmax = self.settings.kmax if kmax is None else kmax
        self.evaluators: list[BaseEvaluator] = get_all_evaluators(self.settings, self.kmax)
        logger.debug("harness_initialized", kmax=self.kmax)

    # ============================================
    # compare
    # ============================================

    def evaluate_point(self, x: float, eta: float, g: ConeGeometry, tol: float) -> PointRecord:
        """Evaluate every valid method at one point and diff them pairwise."""
        methods = set(valid_methods(x, eta, g, self.settings))
        valid = [ev for ev in self.evaluators if ev.method in methods]
        values: list[MethodValue] = []
        errors: dict[str, str] = {}
        for ev in valid:
            try:
                values.append(MethodValue.from_result(ev.evaluate(x, eta, g)))
            except ConeKernelException as e:
                errors[ev.get_name()] = str(e)
                logger.warning(
                    "method_failed", method=ev.get_name(), x=x, eta=eta, rho=g.rho, error=str(e)
                )

        diffs = []
        for a, b in itertools.combinations(values, 2):
            diff = abs(a.value - b.value)
            allowed = tol + a.abs_err + b.abs_err
            diffs.append(
                PairDiff(a=a.method, b=b.method, diff=diff, allowed=allowed, passed=diff <= allowed)
            )
        return PointRecord(
            rho=g.rho,
            x=x,
            eta=eta,
            valid_methods=[ev.get_name() for ev in valid],
            values=values,
            diffs=diffs,
            errors=errors,
            passed=all(d.passed for d in diffs),
        )

    def compare(self, grid: GridSpec, tol: Optional[float] = None) -> Report:
        """
        Compare all valid methods pairwise at every grid point.

        A point fails when some |a - b| exceeds tol + abs_err(a) + abs_err(b). Points
        with no usable method are recorded, not failed.
        """
        tol = self.settings.compare_tol if tol is None else tol
        logger.info("compare_started", rho_list=grid.rho_list, points=_grid_size(grid))

        records = []
        for rho in grid.rho_list:
            g = ConeGeometry(rho=rho)
            for x in grid.x_values():
                for eta in grid.eta_values(g):
                    record = self.evaluate_point(x, eta, g, tol)
                    if not record.passed:
                        logger.warning("comparison_failed", rho=rho, x=x, eta=eta)
                    records.append(record)

        all_diffs = [d.diff for r in records for d in r.diffs]
        by_pair: dict[str, float] = {}
        for r in records:
            for d in r.diffs:
                key = f"{d.a}-{d.b}"
                by_pair[key] = max(by_pair.get(key, 0.0), d.diff)
        failed = sum(not r.passed for r in records)
        summary = {
            "points": len(records),
            "failed": failed,
            "empty": sum(not r.values for r in records),
            "max_diff": max(all_diffs, default=0.0),
            "median_diff": float(np.median(all_diffs)) if all_diffs else 0.0,
            "max_diff_by_pair": by_pair,
        }
        logger.info("compare_finished", points=len(records), failed=failed)
        return Report(
            kind="compare",
            passed=failed == 0,
            parameters={"grid": grid.model_dump(mode="json"), "tol": tol, "kmax": self.kmax},
            summary=summary,
            records=records,
        )

    # ============================================
    # images_check
    # ============================================

    def images_check(self, N: int, grid: GridSpec, tol: Optional[float] = None) -> Report:
        """
        Compare the series kernel at rho = 1/N with the N-image closed form.

        Each (x, eta) is realised as t = 1, r1 = r2 = sqrt(2x), theta1 = eta, theta2 = 0.
        The rho_list of the grid is ignored.
        """
        if N < 1:
            raise DomainException(f"images_check: N must be >= 1, got {N}")
        tol = self.settings.images_tol if tol is None else tol
        g = ConeGeometry(rho=1.0 / N)
        cfg = self.settings.series_config()
        logger.info("images_check_started", N=N)

        records = []
        for x in grid.x_values():
            if x <= 0.0:
                continue
            r = math.sqrt(2.0 * x)
            for eta in grid.eta_values(g):
                q = KernelQuery(t=1.0, r1=r, r2=r, theta1=eta, theta2=0.0)
                K = assemble_kernel(s_series(x, reduce(q, g).eta, g, cfg), q, g)
                closed = images_closed_form(q, N)
                diff = abs(K.value - closed)
                passed = diff <= tol
                records.append(
                    PointRecord(
                        rho=g.rho,
                        x=x,
                        eta=eta,
                        valid_methods=[Method.SERIES.value, Method.IMAGES.value],
                        values=[
                            MethodValue.from_result(K),
                            MethodValue(
                                method=Method.IMAGES.value,
                                re=closed.real,
                                im=closed.imag,
                                abs_err=0.0,
                            ),
                        ],
                        diffs=[
                            PairDiff(
                                a=Method.SERIES.value,
                                b=Method.IMAGES.value,
                                diff=diff,
                                allowed=tol,
                                passed=passed,
                            )
                        ],
                        passed=passed,
                    )
                )

        max_diff = max((d.diff for r in records for d in r.diffs), default=0.0)
        failed = sum(not r.passed for r in records)
        logger.info("images_check_finished", N=N, points=len(records), max_diff=max_diff)
        return Report(
            kind="images_check",
            passed=failed == 0,
            parameters={"N": N, "grid": grid.model_dump(mode="json"), "tol": tol},
            summary={"points": len(records), "failed": failed, "max_diff": max_diff},
            records=records,
        )

    # ============================================
    # dispersive_scan
    # ============================================

    def dispersive_value(self, x: float, eta: float, g: ConeGeometry) -> EvalResult:
        """Series up to the asymptotic floor, uniform expansion beyond it off the interface."""
        if x > self.settings.asymptotic_min_x and uniform_feasible(
            eta, g, self.settings.cauchy_radius
        ):
            return s_uniform(
                x,
                eta,
                g,
                self.kmax,
                nodes=self.settings.cauchy_nodes,
                radius=self.settings.cauchy_radius,
            )
        return s_series(x, eta, g, self.settings.series_config())

    def dispersive_scan(self, g: ConeGeometry, grid: GridSpec) -> Report:
        """
        Estimate sup |S| over the grid; |t K| = sup|S| / (4 pi rho).

        Bounded when the sup over the upper half of the x range is at most 1.05 times
        the sup over the lower half.
        """
        xs = grid.x_values()
        midpoint = 0.5 * (xs[0] + xs[-1])
        logger.info("dispersive_scan_started", rho=g.rho, points=len(xs) * grid.eta_count)

        sup = -1.0
        argmax = (math.nan, math.nan)
        sup_lower = 0.0
        sup_upper = 0.0
        methods: dict[str, int] = {}
        for x in xs:
            for eta in grid.eta_values(g):
                result = self.dispersive_value(x, eta, g)
                methods[result.method.value] = methods.get(result.method.value, 0) + 1
                modulus = abs(result.value)
                if modulus > sup:
                    sup, argmax = modulus, (x, eta)
                if x <= midpoint:
                    sup_lower = max(sup_lower, modulus)
                else:
                    sup_upper = max(sup_upper, modulus)

        bounded = sup_upper <= BOUNDEDNESS_FACTOR * sup_lower
        summary: dict[str, Any] = {
            "sup_abs_s": sup,
            "sup_abs_tk": sup / (4.0 * math.pi * g.rho),
            "argmax_x": argmax[0],
            "argmax_eta": argmax[1],
            "sup_lower_half": sup_lower,
            "sup_upper_half": sup_upper,
            "verdict": "bounded" if bounded else "growing",
            "methods": methods,
        }
        logger.info("dispersive_scan_finished", rho=g.rho, sup=sup, bounded=bounded)
        return Report(
            kind="dispersive",
            passed=bounded,
            parameters={"rho": g.rho, "grid": grid.model_dump(mode="json"), "kmax": self.kmax},
            summary=summary,
        )

    # ============================================
    # order_check
    # ============================================

    def order_check(
        self,
        g: ConeGeometry,
        eta: float,
        mode: Literal["small_x", "large_x"],
        kmax: Optional[int] = None,
    ) -> Report:
        """
        Fit the empirical order of the small-x or large-x approximation.

        small_x: |S - 1| over x in [1e-3, 0.3] against slope min(2, 1/rho); the explicit
        majorant must also dominate the error at every sample.
        large_x: the RMS of |s_uniform - s_series| over x and x + pi/2, for x in [40, 400],
        against -(2 kmax + 3)/2.

        Raises:
            ValidityException: If mode is large_x and eta lies on the interface
        """
        kmax = self.kmax if kmax is None else kmax
        cfg = self.settings.series_config()
        parameters: dict[str, Any] = {"rho": g.rho, "eta": eta, "mode": mode}
        summary: dict[str, Any] = {}

        if mode == "small_x":
            xs = [float(x) for x in np.geomspace(1e-3, 0.3, ORDER_SAMPLES)]
            errors = [abs(s_series(x, eta, g, cfg).value - 1.0) for x in xs]
            target = min(2.0, 1.0 / g.rho)
            fit = fit_slope(xs, errors, target, self.settings.small_x_slope_window, mode)
            dominated = all(e <= small_x_majorant(x, g) for x, e in zip(xs, errors))
            summary["majorant_dominates"] = dominated
            passed = fit.verdict != "fail" and dominated
        else:
            parameters["kmax"] = kmax
            xs = [float(x) for x in np.geomspace(40.0, 400.0, ORDER_SAMPLES)]
            errors = []
            for x in xs:
                # the remainder is a(x)e^{ix} + b(x)e^{-ix}; averaging |.|^2 over x and
                # x + pi/2 cancels the cross term and leaves a smooth envelope
                pair = [
                    abs(
                        s_uniform(
                            xp,
                            eta,
                            g,
                            kmax,
                            nodes=self.settings.cauchy_nodes,
                            radius=self.settings.cauchy_radius,
                        ).value
                        - s_series(xp, eta, g, cfg).value
                    )
                    for xp in (x, x + 0.5 * math.pi)
                ]
                errors.append(math.sqrt(0.5 * (pair[0] ** 2 + pair[1] ** 2)))
            target = -(2 * kmax + 3) / 2.0
            fit = fit_slope(xs, errors, target, self.settings.large_x_slope_window, mode)
            passed = fit.verdict == "pass"

        summary.update({"slope": fit.slope, "target": target, "verdict": fit.verdict})
        logger.info("order_check_finished", rho=g.rho, mode=mode, verdict=fit.verdict)
        return Report(
            kind="orders", passed=passed, parameters=parameters, summary=summary, fits=[fit]
        )

    # ============================================
    # scan
    # ============================================

    def scan(self, g: ConeGeometry, grid: GridSpec, method: str = "auto") -> pd.DataFrame:
        """
        Evaluate one method (or the auto policy) over the grid.

        Points where an explicit method is not valid are skipped.

        Returns:
            DataFrame with columns rho, x, eta, method, re, im, abs_err
        """
        evaluator = None if method == "auto" else get_evaluator(method, self.settings, self.kmax)
        rows = []
        skipped = 0
        for x in grid.x_values():
            for eta in grid.eta_values(g):
                if evaluator is None:
                    result = evaluate_auto(x, eta, g, self.settings, self.kmax)
                elif evaluator.is_valid(x, eta, g):
                    result = evaluator.evaluate(x, eta, g)
                else:
                    skipped += 1
                    continue
                rows.append(
                    {
                        "rho": g.rho,
                        "x": x,
                        "eta": eta,
                        "method": result.method.value,
                        "re": result.value.real,
                        "im": result.value.imag,
                        "abs_err": result.abs_err,
                    }
                )
        if skipped:
            logger.info("scan_points_skipped", method=method, skipped=skipped)
        return pd.DataFrame(rows, columns=SCAN_COLUMNS)

    # ============================================
    # selfcheck
    # ============================================

    def selfcheck(self, seed: Optional[int] = None, samples: int = 20) -> Report:
        """
        Random-sample checks, reproducible through the seed:

        - Bessel three-term recurrence residual on 10*samples random (nu, x)
        - erfc reflection and conjugation identities on the +-45 degree rays, |z| <= 4
        - one-term large-|z| erfc remainder against its first omitted term, |z| in [5, 12]
        - closed-form b_0 against Cauchy extraction on `samples` off-interface points
        - cancellation of b_0 over alpha for rho = 1/2
        """
        seed = self.settings.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        cfg = self.settings.specfun_config()

        bessel_residual = 0.0
        for _ in range(10 * samples):
            nu = float(rng.uniform(1.0, 30.0))
            x = float(rng.uniform(0.1, 40.0))
            jm, j0, jp = (bessel_j(nu + d, x, cfg) for d in (-1.0, 0.0, 1.0))
            scale = max(1.0, abs(jm), abs(jp))
            bessel_residual = max(bessel_residual, abs(jm + jp - 2.0 * nu / x * j0) / scale)

        erfc_residual = 0.0
        for radius in np.linspace(0.25, 4.0, 16):
            for angle in (0.25 * math.pi, -0.25 * math.pi, 0.75 * math.pi, -0.75 * math.pi):
                z = complex(radius * math.cos(angle), radius * math.sin(angle))
                reflect = abs(erfc_cplx(z, cfg) + erfc_cplx(-z, cfg) - 2.0)
                conj = abs(erfc_cplx(z.conjugate(), cfg) - erfc_cplx(z, cfg).conjugate())
                erfc_residual = max(erfc_residual, reflect, conj)

        # first omitted term of the large-|z| series bounds the one-term remainder
        erfc_tail_ratio = 0.0
        for s in np.linspace(5.0, 12.0, 15):
            z = complex(math.cos(0.25 * math.pi), math.sin(0.25 * math.pi)) * s
            lead = erfc_asymptotic(z, terms=1)
            bound = abs(lead) / (2.0 * abs(z) ** 2)
            erfc_tail_ratio = max(erfc_tail_ratio, abs(erfc_cplx(z, cfg) - lead) / bound)

        b0_diff = 0.0
        taken = 0
        while taken < samples:
            rho = float(rng.uniform(0.3, 2.5))
            g = ConeGeometry(rho=rho)
            eta = float(rng.uniform(-math.pi * rho, math.pi * rho))
            if interface_distance(eta, g) < 0.1:
                continue
            alpha = 1 if rng.random() < 0.5 else -1
            beta = 1 if rng.random() < 0.5 else -1
            closed = b0_closed_form(eta, g, alpha, beta)
            extracted = cauchy_coefficient(
                eta, g, alpha, beta, 0, self.settings.cauchy_nodes, self.settings.cauchy_radius
            )
            b0_diff = max(b0_diff, abs(closed - extracted))
            taken += 1

        half = ConeGeometry(rho=0.5)
        half_cone = max(
            abs(b0_closed_form(0.4, half, 1, beta) + b0_closed_form(0.4, half, -1, beta))
            for beta in (1, -1)
        )

        checks = {
            "bessel_recurrence": bessel_residual <= 1e-9,
            "erfc_identities": erfc_residual <= 1e-12,
            "erfc_asymptotic_bound": erfc_tail_ratio <= ERFC_TAIL_FACTOR,
            "b0_cross_oracle": b0_diff <= 1e-8,
            "half_cone_b0_cancellation": half_cone <= 1e-9,
        }
        summary: dict[str, Any] = {
            "bessel_max_residual": bessel_residual,
            "erfc_max_residual": erfc_residual,
            "erfc_tail_ratio": erfc_tail_ratio,
            "b0_max_diff": b0_diff,
            "half_cone_b0_max": half_cone,
            "checks": checks,
        }
        passed = all(checks.values())
        logger.info("selfcheck_finished", seed=seed, passed=passed)
        return Report(
            kind="selfcheck",
            passed=passed,
            parameters={"seed": seed, "samples": samples},
            summary=summary,
        )


def _grid_size(grid: GridSpec) -> int:
    extra = 3 if grid.include_interface else 0
    return len(grid.rho_list) * grid.x_count * (grid.eta_count + extra)
