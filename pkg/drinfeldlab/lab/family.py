"""Specializing a family over F_q(T)(u) at u = beta.

The generic fibre lives over the tower; its canonical height is computed with
the vanishing height-difference constants there. Each fibre phi_beta is a
module over F_q(T), where the local decomposition is exact in practice and
Method A serves as a cross-check. The slope of h_hat(x_beta) against h(beta)
should approach the generic canonical height.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.drinfeld.module import DrinfeldModule
from drinfeldlab.fields.heights import naive_height
from drinfeldlab.fields.places import FieldDescriptor
from drinfeldlab.heights.canonical import canonical_height_detail, h_phi, local_decomposition, zimmer_bounds
from drinfeldlab.heights.checks import check_height_agreement
from drinfeldlab.heights.interval import format_rational
from drinfeldlab.heights.torsion import is_torsion
from drinfeldlab.lab.codec import encode_module, encode_ratfunc
from drinfeldlab.lab.experiments import ScanReport
from drinfeldlab.lab.schema import Instance, instance_blob
from drinfeldlab.utils.config import AppConfig
from drinfeldlab.utils.errors import SchemaError
from drinfeldlab.utils.logging import get_logger


def specialize(x: RatFunc, beta: RatFunc) -> Optional[RatFunc]:
    """x(u = beta), or None at a pole."""
    den = x.den(beta)
    if den.is_zero():
        return None
    return x.num(beta) / den


def specialize_module(M: DrinfeldModule, beta: RatFunc) -> Optional[DrinfeldModule]:
    """phi_beta over F_q(T); None when a coefficient has a pole or a_r vanishes."""
    base = FieldDescriptor.base_rational(M.descriptor.config)
    coeffs = []
    for a in M.coeffs:
        value = specialize(a, beta)
        if value is None:
            return None
        coeffs.append(value)
    if coeffs[-1].is_zero():
        return None
    return DrinfeldModule(base, tuple(coeffs))


def least_squares_slope(pairs: Sequence[Tuple[Fraction, Fraction]]) -> Optional[Fraction]:
    """Exact least-squares slope; None when the abscissae are all equal."""
    n = len(pairs)
    if n < 2:
        return None
    mean_x = sum((p for p, _ in pairs), Fraction(0)) / n
    mean_y = sum((y for _, y in pairs), Fraction(0)) / n
    sxx = sum(((p - mean_x) ** 2 for p, _ in pairs), Fraction(0))
    if sxx == 0:
        return None
    sxy = sum(((p - mean_x) * (y - mean_y) for p, y in pairs), Fraction(0))
    return sxy / sxx


def is_isotrivial(M: DrinfeldModule) -> bool:
    return all(a.is_constant() for a in M.coeffs)


def cmd_family(instance: Instance, config: Optional[AppConfig] = None, tol: Optional[Fraction] = None) -> ScanReport:
    cfg = config or AppConfig()
    logger = get_logger()
    M = instance.module
    if M is None or not M.descriptor.is_tower:
        raise SchemaError("a family is a module over the tower", path="field.instance")
    if not instance.specializations:
        raise SchemaError("at least one specialization is required", path="family.specializations")
    x = instance.points[0] if instance.points else M.field.one
    tol = tol or instance.tol or cfg.heights.default_tol(M.q)
    n_max = instance.experiment.n_max or cfg.heights.n_max
    max_degree = cfg.heights.max_degree

    generic = canonical_height_detail(M, x, tol, max_degree)
    if is_isotrivial(M):
        logger.warning("family coefficients do not depend on u: the family is isotrivial")

    report = ScanReport(
        "family",
        {"tol": format_rational(tol), "nMax": n_max, "specializations": len(instance.specializations)},
    )
    pairs: List[Tuple[Fraction, Fraction]] = []
    degenerate: List[Dict[str, Any]] = []
    flagged_heights: List[Fraction] = []
    for beta in instance.specializations:
        fibre = specialize_module(M, beta)
        x_beta = specialize(x, beta)
        if fibre is None or x_beta is None:
            logger.warning("degenerate fibre at beta = %r; skipped", beta)
            degenerate.append(encode_ratfunc(beta))
            continue
        glob = canonical_height_detail(fibre, x_beta, tol, max_degree)
        local = local_decomposition(fibre, x_beta, n_max, max_degree)
        agreement = check_height_agreement(glob.interval, local.total)
        report.add_violations([agreement], instance_blob(fibre, [x_beta]))
        value = glob.interval.intersect(local.total) if agreement.holds else glob.interval
        torsion = value.exact and value.lo == 0 or is_torsion(fibre, x_beta)
        h_beta = naive_height(beta)
        if torsion:
            flagged_heights.append(h_beta)
        pairs.append((h_beta, value.mid))
        report.records.append(
            {
                "beta": encode_ratfunc(beta),
                "hBeta": format_rational(h_beta),
                "module": encode_module(fibre),
                "point": encode_ratfunc(x_beta),
                "hHat": value.to_dict(),
                "hPhi": format_rational(h_phi(fibre)),
                "hHatMinusH": (value - naive_height(x_beta)).to_dict(),
                "torsion": torsion,
            }
        )

    slope = least_squares_slope(pairs)
    if slope is None:
        logger.warning("slope undefined: fewer than two distinct h(beta); reporting 0")
        slope = Fraction(0)
    target = generic.interval.mid
    report.summary = {
        "generic": generic.to_dict(),
        "genericBounds": zimmer_bounds(M).to_dict(),
        "slope": format_rational(slope),
        "slopeFloat": float(slope),
        "relativeError": format_rational(abs(slope - target) / target) if target else None,
        "isotrivial": is_isotrivial(M),
        "degenerate": degenerate,
        "torsionFibres": len(flagged_heights),
        "maxTorsionHeight": format_rational(max(flagged_heights)) if flagged_heights else None,
        "violations": len(report.counterexamples),
    }
    return report

