"""Experiment drivers behind the CLI subcommands.

Every driver returns a `ScanReport`: per-instance records, a summary, and the
list of counterexamples (each with a replayable instance document). Work per
instance is independent; with `workers > 1` it fans out to a process pool via
`map`, which keeps input order, so reports are deterministic for a seed.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

from drinfeldlab.algebra.fq import FqConfig
from drinfeldlab.algebra.ratfunc import RatFunc
from drinfeldlab.drinfeld.local import j_phi_v
from drinfeldlab.drinfeld.module import DrinfeldModule, is_l_isomorphic
from drinfeldlab.fields.heights import count_bounded_height, enumerate_bounded_height, naive_height
from drinfeldlab.fields.places import FieldDescriptor, Place, sort_places
from drinfeldlab.heights.canonical import (
    ZimmerBounds,
    canonical_height_detail,
    h_phi,
    j_height,
    local_decomposition,
    relevant_places,
    zimmer_bounds,
)
from drinfeldlab.heights.checks import (
    CheckOutcome,
    check_conjugation_covariance,
    check_disc_corollary,
    check_disc_sandwich,
    check_green_functional_equation,
    check_green_ultrametric,
    check_height_agreement,
    check_height_difference,
    check_lambda_functional_equation,
    check_positive_height,
    local_checks,
)
from drinfeldlab.heights.interval import HeightInterval, format_rational
from drinfeldlab.heights.torsion import annihilator, is_torsion, torsion_submodule, verify_submodule
from drinfeldlab.lab.codec import encode_module, encode_place, encode_ratfunc, encode_upoly
from drinfeldlab.lab.schema import Instance, instance_blob
from drinfeldlab.minimality.discriminant import (
    check_lowernorthcott,
    finite_coefficient_places,
    minimal_discriminant,
    minimal_global_model,
)
from drinfeldlab.utils.config import AppConfig
from drinfeldlab.utils.errors import InequalityViolation, ResourceGuardError, SchemaError, UnsupportedFieldError
from drinfeldlab.utils.logging import get_logger

J = TypeVar("J")
R = TypeVar("R")


@dataclass
class ScanReport:
    command: str
    parameters: Dict[str, Any]
    records: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    counterexamples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def add_violations(self, outcomes: Iterable[CheckOutcome], blob: Dict[str, Any]) -> None:
        for outcome in outcomes:
            if outcome.violated:
                self.counterexamples.append({"check": outcome.to_dict(), "instance": blob})

    def raise_for_violations(self) -> None:
        if self.counterexamples:
            first = self.counterexamples[0]
            raise InequalityViolation(
                f"{len(self.counterexamples)} violation(s); first: {first['check']['name']}",
                instance=first["instance"],
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "records": self.records,
            "summary": self.summary,
            "counterexamples": self.counterexamples,
            "passed": self.passed,
        }


def pool_map(fn: Callable[[J], R], jobs: Sequence[J], workers: int = 1) -> List[R]:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, jobs))


def _cfg(config: Optional[AppConfig]) -> AppConfig:
    return config or AppConfig()


def random_module(desc: FieldDescriptor, rng: random.Random, rank: int, coeff_height: int) -> DrinfeldModule:
    fld = desc.field
    coeffs = [fld.random_element(rng, coeff_height) for _ in range(rank - 1)]
    coeffs.append(fld.random_element(rng, coeff_height, nonzero=True))
    return DrinfeldModule(desc, tuple(coeffs))


def _deviation_ratio(h_hat: HeightInterval, h: Fraction, bounds: ZimmerBounds) -> Fraction:
    """Least |h_hat - h| over the enclosure, normalized by the bound on that side."""
    diff = h_hat - h
    if diff.lo > 0:
        return diff.lo / bounds.B_upper if bounds.B_upper else Fraction(0)
    if diff.hi < 0:
        return -diff.hi / bounds.B_lower if bounds.B_lower else Fraction(0)
    return Fraction(0)


# -- height ---------------------------------------------------------------------------


def _certified_height(M: DrinfeldModule, x: RatFunc, bounds: ZimmerBounds, glob: HeightInterval) -> HeightInterval:
    """Method A, falling back on the first iterate above B_lower when that is sharper on the left.

    x must be non-torsion, or the iteration does not stop.
    """
    if glob.lo > 0:
        return glob
    y, n = x, 0
    qr = M.q ** M.rank
    while naive_height(y) <= bounds.B_lower:
        y, n = M(y), n + 1
    scale = Fraction(1, qr ** n)
    escape = HeightInterval((naive_height(y) - bounds.B_lower) * scale, (naive_height(y) + bounds.B_upper) * scale)
    return glob.intersect(escape) if glob.intersects(escape) else escape


def module_checks(M: DrinfeldModule, beta: Optional[RatFunc] = None) -> List[CheckOutcome]:
    """Checks on the module alone: discriminant bounds, conjugation by beta (default T), minimal model."""
    outcomes: List[CheckOutcome] = []
    for v in finite_coefficient_places(M):
        outcomes.append(check_disc_sandwich(M, v))
        outcomes.append(check_disc_corollary(M, v))
    outcomes.extend(check_conjugation_covariance(M, M.descriptor.T if beta is None else beta))
    _, cert = minimal_global_model(M)
    outcomes.append(CheckOutcome("minimalfixedpoint", True, cert.validate()))
    return outcomes


def pair_checks(
    M: DrinfeldModule, x: RatFunc, y: RatFunc, n_max: int, places_hint: Sequence[Place] = ()
) -> List[CheckOutcome]:
    """Checks that need two points: the ultrametric bound on Green's functions."""
    try:
        places = sort_places(
            v for z in (x, y, x + y) for v in relevant_places(M, z, places_hint)
        )
    except UnsupportedFieldError as exc:
        get_logger().info("pair checks skipped: %s", exc)
        return []
    return [check_green_ultrametric(M, v, x, y, n_max) for v in places]


def height_record(
    M: DrinfeldModule,
    x: RatFunc,
    tol: Fraction,
    n_max: int,
    max_degree: int,
    bounds: ZimmerBounds,
    places_hint: Sequence[Place] = (),
) -> Tuple[Dict[str, Any], List[CheckOutcome], HeightInterval]:
    """Both canonical-height methods on one point, with every applicable check."""
    glob = canonical_height_detail(M, x, tol, max_degree, bounds)
    h = naive_height(x)
    outcomes = [check_height_difference(M, x, glob.interval, bounds)]
    best = glob.interval
    record: Dict[str, Any] = {
        "point": encode_ratfunc(x),
        "naiveHeight": format_rational(h),
        "hHat": glob.interval.to_dict(),
        "methodA": glob.to_dict(),
    }
    try:
        local = local_decomposition(M, x, n_max, max_degree, places_hint)
    except UnsupportedFieldError as exc:
        get_logger().info("local decomposition skipped: %s", exc)
        local = None
    if local is not None:
        record["methodB"] = local.to_dict()
        outcomes.append(check_height_agreement(glob.interval, local.total))
        if not x.is_zero():
            a_t = M.descriptor.a_poly((0, 1))
            for term in local.terms:
                outcomes.extend(local_checks(M, term.place, x, n_max))
                if not M.descriptor.is_tower:
                    outcomes.append(check_green_functional_equation(M, term.place, x, a_t, n_max))
                    outcomes.append(check_lambda_functional_equation(M, term.place, x, a_t, n_max))
        if glob.interval.intersects(local.total):
            best = glob.interval.intersect(local.total)
            record["hHat"] = best.to_dict()
    if not M.descriptor.is_tower:
        torsion = is_torsion(M, x, bounds)
        record["torsion"] = torsion
        if not torsion:
            outcomes.append(check_positive_height(_certified_height(M, x, bounds, glob.interval)))
    record["checks"] = [o.to_dict() for o in outcomes if o.applicable]
    return record, outcomes, best


def cmd_height(instance: Instance, config: Optional[AppConfig] = None, tol: Optional[Fraction] = None) -> ScanReport:
    cfg = _cfg(config)
    M = instance.module
    if M is None:
        raise SchemaError("the height command needs a module", path="module")
    if not instance.points:
        raise SchemaError("the height command needs at least one point", path="points")
    tol = tol or instance.tol or cfg.heights.default_tol(M.q)
    n_max = instance.experiment.n_max or cfg.heights.n_max
    bounds = zimmer_bounds(M)
    report = ScanReport(
        "height",
        {"tol": format_rational(tol), "nMax": n_max, "maxDegree": cfg.heights.max_degree},
    )
    experiment = {"tol": format_rational(tol), "nMax": n_max}
    for x in instance.points:
        record, outcomes, _ = height_record(M, x, tol, n_max, cfg.heights.max_degree, bounds, instance.point_places)
        report.records.append(record)
        report.add_violations(outcomes, instance_blob(M, [x], experiment))
    for x, y in zip(instance.points, instance.points[1:]):
        report.add_violations(
            pair_checks(M, x, y, n_max, instance.point_places), instance_blob(M, [x, y], experiment)
        )
    module_outcomes: List[CheckOutcome] = []
    if not M.descriptor.is_tower:
        module_outcomes = module_checks(M, instance.conjugator)
        if instance.conjugator is not None:
            experiment = dict(experiment, conjugator=encode_ratfunc(instance.conjugator))
        report.add_violations(module_outcomes, instance_blob(M, instance.points[:1], experiment))
    report.summary = {
        "moduleChecks": sum(1 for o in module_outcomes if o.applicable),
        "module": encode_module(M),
        "hPhi": format_rational(bounds.h_phi),
        "hJ": format_rational(j_height(M)),
        "bounds": bounds.to_dict(),
        "points": len(instance.points),
        "violations": len(report.counterexamples),
    }
    return report


# -- scan-zimmer ----------------------------------------------------------------------


def _zimmer_job(job: Tuple[DrinfeldModule, RatFunc, RatFunc, Fraction, int, int]) -> Dict[str, Any]:
    M, x, partner, tol, n_max, max_degree = job
    bounds = zimmer_bounds(M)
    record, outcomes, h_hat = height_record(M, x, tol, n_max, max_degree, bounds)
    outcomes.extend(pair_checks(M, x, partner, n_max))
    record["partner"] = encode_ratfunc(partner)
    record["module"] = encode_module(M)
    record["ratio"] = format_rational(_deviation_ratio(h_hat, naive_height(x), bounds))
    record["checks"] = [o.to_dict() for o in outcomes if o.applicable]
    record["violations"] = [o.to_dict() for o in outcomes if o.violated]
    return record


def cmd_scan_zimmer(
    seed: int,
    count: int,
    q: int,
    r: int,
    coeff_height_bound: int,
    config: Optional[AppConfig] = None,
    tol: Optional[Fraction] = None,
) -> ScanReport:
    cfg = _cfg(config)
    if count < 1:
        raise SchemaError("count must be at least 1", path="count")
    desc = FieldDescriptor.base_rational(FqConfig.of_order(q))
    tol = tol or cfg.heights.default_tol(q)
    rng = random.Random(seed)
    jobs = []
    for _ in range(count):
        M = random_module(desc, rng, r, coeff_height_bound)
        x = desc.field.random_element(rng, coeff_height_bound)
        partner = desc.field.random_element(rng, coeff_height_bound)
        jobs.append((M, x, partner, tol, cfg.heights.n_max, cfg.heights.max_degree))
    get_logger().info("scan-zimmer: %d instance(s) over F_%d(T), rank %d", count, q, r)
    records = pool_map(_zimmer_job, jobs, cfg.scan.workers)
    report = ScanReport(
        "scan-zimmer",
        {"seed": seed, "count": count, "q": q, "r": r, "bound": coeff_height_bound, "tol": format_rational(tol)},
    )
    experiment = {"tol": format_rational(tol), "nMax": cfg.heights.n_max}
    for (M, x, partner, *_), record in zip(jobs, records):
        report.records.append(record)
        for violation in record["violations"]:
            report.counterexamples.append({"check": violation, "instance": instance_blob(M, [x, partner], experiment)})
    qr = q ** r
    report.summary = {
        "C1": format_rational(Fraction(qr, (qr - 1) ** 2)),
        "C2": format_rational(Fraction(1, qr - 1)),
        "maxRatio": format_rational(max(Fraction(rec["ratio"]) for rec in records)),
        "violations": len(report.counterexamples),
    }
    return report


# -- scan-jplaces ---------------------------------------------------------------------


def persistently_bad_places(M: DrinfeldModule) -> List[Place]:
    """Finite places with j_v > 0."""
    return [v for v in finite_coefficient_places(M) if j_phi_v(M, v) > 0]


def _jplaces_job(
    job: Tuple[int, DrinfeldModule, int, Sequence[RatFunc], Fraction, int, int, int]
) -> Tuple[Dict[str, Any], List[Dict[str, Any]]]:
    """One module of the scan: its record and its counterexamples, each carrying the violating point."""
    index, M, s, points, tol, max_degree, ann_degree, ln_degree = job
    record: Dict[str, Any] = {"index": index, "module": encode_module(M)}
    bad = persistently_bad_places(M)
    record["badPlaces"] = [encode_place(v) for v in bad]
    if len(bad) > s:
        record["skipped"] = "too many persistently bad places"
        return record, []

    beta = M.descriptor.T
    experiment = {"tol": format_rational(tol), "conjugator": encode_ratfunc(beta)}
    # (outcome, witness point or None for module-level checks)
    witnessed: List[Tuple[CheckOutcome, Optional[RatFunc]]] = [(o, None) for o in module_checks(M, beta)]
    northcott = check_lowernorthcott(M, ln_degree)
    witnessed.append(
        (CheckOutcome("lowernorthcott", northcott.conclusive, True, northcott.h_phi, northcott.bound), None)
    )

    h_j = j_height(M)
    deg_d = minimal_discriminant(M).degree
    denominator = max(h_j, deg_d)
    record.update(
        {
            "hJ": format_rational(h_j),
            "degMinDisc": format_rational(deg_d),
            "lowerNorthcott": northcott.to_dict(),
        }
    )
    bounds = zimmer_bounds(M)
    ratios: List[Tuple[Fraction, Fraction]] = []
    torsion: List[Dict[str, Any]] = []
    for x in points:
        if is_torsion(M, x, bounds):
            a = annihilator(M, x, ann_degree)
            torsion.append(
                {"point": encode_ratfunc(x), "annihilator": None if a is None else encode_upoly(a)}
            )
            continue
        if denominator == 0:
            continue
        glob = canonical_height_detail(M, x, tol, max_degree, bounds).interval
        h_hat = _certified_height(M, x, bounds, glob)
        witnessed.append((check_positive_height(h_hat), x))
        ratios.append((h_hat.lo / denominator, h_hat.mid / denominator))
    record["excluded"] = denominator == 0
    record["torsion"] = torsion
    record["nonTorsion"] = len(ratios)
    if ratios:
        record["minRatioLower"] = format_rational(min(lo for lo, _ in ratios))
        record["minRatio"] = format_rational(min(mid for _, mid in ratios))
    record["checks"] = [o.to_dict() for o, _ in witnessed if o.applicable]
    record["violations"] = [o.to_dict() for o, _ in witnessed if o.violated]
    counterexamples = [
        {
            "check": o.to_dict(),
            "instance": instance_blob(M, [x] if x is not None else points[:1], experiment),
        }
        for o, x in witnessed
        if o.violated
    ]
    return record, counterexamples


def enumerate_modules(desc: FieldDescriptor, rank: int, coeff_bounds: Sequence[int]) -> List[DrinfeldModule]:
    """Every module whose a_j has height <= coeff_bounds[j-1], a_r nonzero."""
    fld = desc.field
    pools = [list(enumerate_bounded_height(fld, b)) for b in coeff_bounds]
    pools[-1] = [a for a in pools[-1] if not a.is_zero()]
    return [DrinfeldModule(desc, tuple(combo)) for combo in product(*pools)]


def cmd_scan_jplaces(
    seed: int,
    q: int,
    r: int,
    s: int,
    enumeration_bound: int,
    config: Optional[AppConfig] = None,
    tol: Optional[Fraction] = None,
    point_height: Optional[int] = None,
) -> ScanReport:
    cfg = _cfg(config)
    if s < 0:
        raise SchemaError("s must be nonnegative", path="s")
    desc = FieldDescriptor.base_rational(FqConfig.of_order(q))
    tol = tol or cfg.heights.default_tol(q)
    point_height = cfg.scan.point_height if point_height is None else point_height
    n_coeffs = count_bounded_height(q, enumeration_bound)
    n_modules = n_coeffs ** (r - 1) * (n_coeffs - 1)
    n_points = count_bounded_height(q, point_height) - 1
    if n_modules * n_points > cfg.scan.enumeration_guard:
        raise ResourceGuardError(
            f"{n_modules} modules x {n_points} points exceed the guard {cfg.scan.enumeration_guard}",
            bound=enumeration_bound,
        )
    modules = enumerate_modules(desc, r, [enumeration_bound] * r)
    points = [x for x in enumerate_bounded_height(desc.field, point_height) if not x.is_zero()]
    order = list(range(len(modules)))
    random.Random(seed).shuffle(order)
    jobs = [
        (i, modules[i], s, points, tol, cfg.heights.max_degree, cfg.scan.annihilator_degree, cfg.scan.lowernorthcott_degree)
        for i in order
    ]
    get_logger().info("scan-jplaces: %d module(s), %d point(s) each", len(modules), len(points))
    results = sorted(pool_map(_jplaces_job, jobs, cfg.scan.workers), key=lambda pair: pair[0]["index"])
    records = [rec for rec, _ in results]

    report = ScanReport(
        "scan-jplaces",
        {"seed": seed, "q": q, "r": r, "s": s, "bound": enumeration_bound, "pointHeight": point_height},
        records,
    )
    for _, counterexamples in results:
        report.counterexamples.extend(counterexamples)
    used = [rec for rec in records if "skipped" not in rec]
    with_ratio = [rec for rec in used if "minRatio" in rec]
    report.summary = {
        "modules": len(records),
        "used": len(used),
        "excluded": sum(1 for rec in used if rec.get("excluded")),
        "epsilonHat": format_rational(min(Fraction(rec["minRatio"]) for rec in with_ratio)) if with_ratio else None,
        "epsilonHatLower": (
            format_rational(min(Fraction(rec["minRatioLower"]) for rec in with_ratio)) if with_ratio else None
        ),
        "epsilonHatLabel": "empirical lower-bound estimate",
        "maxTorsionPoints": max((len(rec["torsion"]) for rec in used), default=0),
        "lowerNorthcottInconclusive": sum(1 for rec in used if not rec["lowerNorthcott"]["conclusive"]),
        "violations": len(report.counterexamples),
    }
    return report


# -- torsion --------------------------------------------------------------------------


def cmd_torsion(instance: Instance, config: Optional[AppConfig] = None) -> ScanReport:
    cfg = _cfg(config)
    M = instance.module
    if M is None:
        raise SchemaError("the torsion command needs a module", path="module")
    if M.descriptor.is_tower:
        raise SchemaError("torsion enumeration runs over F_q(T) only", path="field.instance")
    points = torsion_submodule(M, cfg.scan.torsion_guard)
    closed = verify_submodule(M, points)
    report = ScanReport("torsion", {"guard": cfg.scan.torsion_guard, "annihilatorDegree": cfg.scan.annihilator_degree})
    for x in points:
        a = annihilator(M, x, cfg.scan.annihilator_degree)
        report.records.append(
            {
                "point": encode_ratfunc(x),
                "annihilator": None if a is None else encode_upoly(a),
                "annihilatorDegree": None if a is None else a.degree,
            }
        )
    report.add_violations([CheckOutcome("submoduleclosure", True, closed)], instance_blob(M, points))
    bounds = zimmer_bounds(M)
    report.summary = {
        "module": encode_module(M),
        "size": len(points),
        "searchHeight": int(bounds.B_lower),
        "closed": closed,
        "violations": len(report.counterexamples),
    }
    return report


# -- enumerate ------------------------------------------------------------------------


def cmd_enumerate_modules(
    q: int,
    r: int,
    height_bound: Fraction,
    config: Optional[AppConfig] = None,
    seed: int = 0,
) -> ScanReport:
    """Modules with h(phi) <= bound, up to isomorphism over F_q(T).

    h(phi) >= h(a_j) / (q^j - 1) for every j, which bounds the search.
    """
    cfg = _cfg(config)
    height_bound = Fraction(height_bound)
    desc = FieldDescriptor.base_rational(FqConfig.of_order(q))
    coeff_bounds = [int(height_bound * (q ** j - 1)) for j in range(1, r + 1)]
    total = 1
    for j, b in enumerate(coeff_bounds, start=1):
        total *= count_bounded_height(q, b) - (1 if j == r else 0)
    if total > cfg.scan.enumeration_guard:
        raise ResourceGuardError(f"{total} candidate modules exceed the guard", bound=height_bound)
    candidates = enumerate_modules(desc, r, coeff_bounds)
    random.Random(seed).shuffle(candidates)
    classes: List[List[Tuple[DrinfeldModule, Fraction]]] = []
    for M in candidates:
        h = h_phi(M)
        if h > height_bound:
            continue
        for members in classes:
            if is_l_isomorphic(members[0][0], M):
                members.append((M, h))
                break
        else:
            classes.append([(M, h)])

    def _key(item: Tuple[DrinfeldModule, Fraction]) -> Tuple[Any, ...]:
        return (item[1], tuple(a.key() for a in item[0].coeffs))

    reps = sorted(((min(members, key=_key), len(members)) for members in classes), key=lambda pair: _key(pair[0]))
    report = ScanReport("enumerate", {"q": q, "r": r, "bound": format_rational(height_bound), "seed": seed})
    for (M, h), size in reps:
        report.records.append({"module": encode_module(M), "hPhi": format_rational(h), "models": size})
    report.summary = {"classes": len(reps), "candidates": len(candidates)}
    return report
