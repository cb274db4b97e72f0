"""Identity suite: closed forms checked against independent quadrature.

Each check returns a :class:`CheckResult`. ``tolerance_scale`` multiplies
every tolerance; a check that fails only because of that scaling (its error
is within the unscaled tolerance) is marked ``tolerance_induced``.

The ``fault`` hook exists for mutation testing: ``"fisher"`` hands the
numerical Fisher computation a channel with a corrupted noise level and
line-of-sight coefficient, which the check must catch.
"""
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import __version__
from .asymptotics import closed_form_cddot_fixed_peak, cddot_fixed_peak_quadrature, derivs_fourth_moment
from .channel import ChannelParams, fisher_information, kl_conditional_numeric, kl_onoff_closed_form
from .errors import InvalidParameterError
from .mutual_info import COMPLEX_2D, RADIAL, mutual_information
from .signaling import lemma_brute_force, lemma_max_fourth_moment, make_ook

FAULTS = ("fisher",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    error: float
    tolerance: float
    base_tolerance: float
    detail: str = ""
    seconds: float = 0.0

    @property
    def tolerance_induced(self) -> bool:
        return (not self.passed) and self.error <= self.base_tolerance

    def as_dict(self) -> dict:
        d = asdict(self)
        d["tolerance_induced"] = self.tolerance_induced
        for k in ("error", "tolerance", "base_tolerance"):
            if not math.isfinite(d[k]):
                d[k] = repr(d[k])
        return d


@dataclass
class VerifyReport:
    checks: List[CheckResult] = field(default_factory=list)
    tolerance_scale: float = 1.0
    fault: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "version": __version__,
            "passed": self.passed,
            "tolerance_scale": self.tolerance_scale,
            "fault": self.fault,
            "checks": [c.as_dict() for c in self.checks],
        }


def _worst(errors):
    errors = [abs(e) for e in errors]
    return max(errors) if errors else 0.0


def check_kl_identity():
    ch = ChannelParams(m=0.8 + 0.3j, gamma_sq=0.5, n0=1.0)
    errs = []
    for x0_sq in (0.1, 1.0, 10.0):
        errs.append(kl_onoff_closed_form(x0_sq, ch) - kl_conditional_numeric(math.sqrt(x0_sq), ch))
    return _worst(errs), 1e-7, "on-off KL closed form vs plane quadrature, |x0|^2 in {0.1, 1, 10}"


def check_bessel_integral():
    errs = []
    for K in (0.0, 1.0, 2.0):
        ch = ChannelParams.from_rician_factor(K)
        for eta in (0.2, 0.5, 0.8):
            nu = eta * ch.n0 / ch.gamma_sq
            exact = closed_form_cddot_fixed_peak(ch, nu)
            errs.append((cddot_fixed_peak_quadrature(ch, nu) - exact) / abs(exact))
    return _worst(errs), 1e-6, "fixed-peak curvature closed form vs quadrature (relative)"


FISHER_CASES = (
    ChannelParams(m=1.0 + 1.0j, gamma_sq=1.0, n0=2.0),
    ChannelParams.from_rician_factor(1.0),
    ChannelParams(m=0.3 - 0.7j, gamma_sq=0.4, n0=0.5),
)


def check_fisher(fault=None):
    errs = []
    for ch in FISHER_CASES:
        target = 2.0 * ch.m_sq / ch.n0
        used = ch
        if fault == "fisher":
            used = ChannelParams(m=1.1 * ch.m, gamma_sq=ch.gamma_sq, n0=1.5 * ch.n0)
        J = fisher_information(used)
        errs.append(float(np.max(np.abs(J - target * np.eye(2)))))
        # half the top eigenvalue times n0 is the first-order capacity slope |m|^2
        c_dot, _ = derivs_fourth_moment(ch, 2.0)
        errs.append(0.5 * float(np.max(np.linalg.eigvalsh(J))) * ch.n0 - c_dot)
    return _worst(errs), 1e-6, "Fisher matrix at x=0 vs (2|m|^2/n0) I for three channels"


def check_lemma():
    errs = []
    for kappa in (1.0, 2.0, 4.0, 10.0):
        exact, witness = lemma_max_fourth_moment(1.0, kappa)
        bf = lemma_brute_force(1.0, kappa, 200)
        errs.append(max(bf.pair_value - exact, 0.0) * 1e3)  # an overshoot is weighted heavily
        errs.append(exact - bf.pair_value)
        errs.append(bf.lp_value - exact)
        errs.append(witness.fourth_moment() - exact)
    return _worst(errs), 1e-6, "fourth-moment supremum vs 200-point grid search, kappa in {1, 2, 4, 10}"


def check_radial_vs_plane():
    ch = ChannelParams.from_rician_factor(1.0)
    errs = []
    for snr in (1e-3, 0.1, 1.0):
        d = make_ook(snr * ch.n0, 0.25)
        errs.append(
            mutual_information(d, ch, method=RADIAL).value
            - mutual_information(d, ch, method=COMPLEX_2D, n_phase=16).value
        )
    return _worst(errs), 1e-8, "radial vs 2-D mutual information for uniform-phase OOK"


CHECKS = {
    "kl_identity": check_kl_identity,
    "bessel_integral": check_bessel_integral,
    "fisher": check_fisher,
    "lemma": check_lemma,
    "radial_vs_plane": check_radial_vs_plane,
}


def run_suite(
    tolerance_scale: float = 1.0,
    fault: Optional[str] = None,
    names=None,
    progress: Optional[Callable[[CheckResult], None]] = None,
) -> VerifyReport:
    """Run the identity checks and collect a report."""
    if not (tolerance_scale >= 0 and math.isfinite(tolerance_scale)):
        raise InvalidParameterError("tolerance_scale must be finite and >= 0")
    if fault is not None and fault not in FAULTS:
        raise InvalidParameterError(f"unknown fault {fault!r}")
    report = VerifyReport(tolerance_scale=tolerance_scale, fault=fault)
    for name in names or CHECKS:
        fn = CHECKS[name]
        t0 = time.perf_counter()
        err, tol, detail = fn(fault) if name == "fisher" else fn()
        scaled = tol * tolerance_scale
        res = CheckResult(name, bool(err <= scaled), float(err), scaled, tol, detail, time.perf_counter() - t0)
        report.checks.append(res)
        if progress:
            progress(res)
    return report
