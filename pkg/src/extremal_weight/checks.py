"""Named verification checks over a constructed weight, with witnesses and a claim table."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from gmpy2 import mpq

from .norms.hilbest import hilbest_report
from .norms.sawyer import random_triadic_pair, sawyer_verify
from .norms.testing import testing_constant
from .ops.maximal import maximal_periodic
from .weightlab import ConstructedWeight, expected_tail_measure, piece_count, running_average_sups, tail_sets

__all__ = ["CheckResult", "VerifyReport", "run_checks", "CHECK_NAMES", "TRACEABILITY"]

CHECK_NAMES = (
    "pieces",
    "av",
    "avest",
    "al",
    "maxest",
    "partcase",
    "testing",
    "hilbest-components",
    "sawyer",
)

# claim -> checks that exercise it
TRACEABILITY = {
    "mass of w and sigma on the period": ("pieces",),
    "construction parameters and base block": ("pieces", "av"),
    "recursive block averages of w and sigma": ("av",),
    "prefix and suffix running averages": ("avest",),
    "tail interval measures and their halves": ("al", "hilbest-components"),
    "auxiliary majorant of the maximal function": ("maxest",),
    "square integral of the auxiliary function on nested intervals": ("partcase",),
    "testing estimate and its case analysis": ("testing",),
    "maximal operator norm bracket": ("testing",),
    "five-part decomposition of the Hilbert transform": ("hilbest-components",),
    "component bounds on tail halves": ("hilbest-components",),
    "telescoping checkpoint bound": ("hilbest-components",),
    "lower bound for the Hilbert norm on tail halves": ("hilbest-components",),
    "stopping-time packing inequality": ("sawyer",),
    "level-set chain": ("sawyer",),
}

MAX_WITNESSES = 10


@dataclass
class CheckResult:
    name: str
    status: bool
    exact: bool
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def fail(self, witness: dict):
        self.status = False
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def to_json(self) -> dict:
        return {
            "status": "pass" if self.status else "fail",
            "exact": self.exact,
            "witnesses": self.witnesses,
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


@dataclass
class VerifyReport:
    params: dict
    checks: list

    @property
    def passes(self) -> bool:
        return all(c.status for c in self.checks)

    def get(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "checks": {c.name: c.to_json() for c in self.checks},
            "traceability": {claim: list(names) for claim, names in TRACEABILITY.items()},
            "passes": self.passes,
        }


def _node_witness(nd) -> dict:
    return {"node": [str(nd.lo), str(nd.hi)], "level": nd.level, "depth": nd.depth}


def check_pieces(cw: ConstructedWeight) -> CheckResult:
    pr = cw.params
    res = CheckResult("pieces", True, True)
    expected = piece_count(pr.k, pr.nu)
    mass_w = cw.w.integrate()
    mass_s = cw.sigma.integrate()
    res.details = {"pieces": len(cw.w), "expected": expected, "mass_w": str(mass_w), "mass_sigma": str(mass_s)}
    if len(cw.w) != expected:
        res.fail({"pieces": len(cw.w), "expected": expected})
    if mass_w != 1:
        res.fail({"mass_w": str(mass_w)})
    if mass_s != pr.p:
        res.fail({"mass_sigma": str(mass_s), "expected": str(pr.p)})
    for v, s in zip(cw.w.values, cw.sigma.values):
        if v * s != 1:
            res.fail({"sigma_mismatch": str(v)})
            break
    return res


def check_av(cw: ConstructedWeight) -> CheckResult:
    res = CheckResult("av", True, True)
    p = cw.params.p
    w, s = cw.w, cw.sigma
    for nd in cw.nodes:
        scale = mpq(2) ** nd.level
        aw = w.mass(nd.lo, nd.hi) / nd.length
        asg = s.mass(nd.lo, nd.hi) / nd.length
        if aw != scale or asg != p / scale:
            res.fail({**_node_witness(nd), "avg_w": str(aw), "avg_sigma": str(asg)})
    res.details = {"nodes": len(cw.nodes)}
    return res


def check_avest(cw: ConstructedWeight) -> CheckResult:
    res = CheckResult("avest", True, True)
    worst_p = worst_s = 0.0
    for nd in cw.nodes:
        scale = mpq(2) ** nd.level
        ps, _, ss, _ = running_average_sups(cw.node_fn(nd))
        worst_p = max(worst_p, float(ps / scale))
        worst_s = max(worst_s, float(ss / scale))
        if ps > 3 * scale or ss > mpq(9, 2) * scale:
            res.fail({**_node_witness(nd), "prefix_sup": str(ps), "suffix_sup": str(ss)})
    res.details = {"max_prefix_over_2l": worst_p, "max_suffix_over_2l": worst_s}
    return res


def check_al(cw: ConstructedWeight) -> CheckResult:
    res = CheckResult("al", True, True)
    for level, ts in tail_sets(cw).items():
        want = expected_tail_measure(cw.params, level)
        res.details[str(level)] = str(ts.measure)
        if ts.measure != want or ts.half_measure != want / 2:
            res.fail({"level": level, "measure": str(ts.measure), "expected": str(want)})
    return res


def check_maxest(cw: ConstructedWeight, window: int = 3) -> CheckResult:
    res = CheckResult("maxest", True, True)
    maj = maximal_periodic(cw.periodic, window)
    worst = 0.0
    for (a, b, _), u, wt in zip(cw.w.pieces(), maj.upper, cw.w_tilde.values):
        worst = max(worst, float(u / wt))
        if u > mpq(9, 2) * wt:
            res.fail({"piece": [str(a), str(b)], "majorant": str(u), "w_tilde": str(wt)})
    res.details = {"max_ratio": worst, "bound": 4.5}
    return res


def check_partcase(cw: ConstructedWeight) -> CheckResult:
    res = CheckResult("partcase", True, True)
    k, p = cw.params.k, cw.params.p
    integrand = cw.w_tilde.square().multiply(cw.sigma)
    worst = 0.0
    count = 0
    for nd in cw.nodes:
        if nd.depth < 1:
            continue
        for m in range(k - 1):
            lo, hi = nd.sub(m, k)
            lhs = integrand.mass(lo, hi)
            mass = cw.w.mass(lo, hi)
            rhs = 30 * p * p * mass
            count += 1
            worst = max(worst, float(lhs / (p * p * mass)))
            if lhs > rhs:
                res.fail({**_node_witness(nd), "m": m, "lhs": str(lhs), "rhs": str(rhs)})
    res.details = {"intervals": count, "max_over_p2_mass": worst, "bound": 30}
    return res


def check_testing(cw: ConstructedWeight, window: int = 3, scale_floor: int | None = None):
    rep = testing_constant(cw, scale_floor=scale_floor, window=window)
    res = CheckResult("testing", rep.passes, True, details=rep.to_json())
    if not rep.passes:
        for case, good in rep.case_ok().items():
            if not good:
                res.witnesses.append({"case": case, "max": float(rep.case_max[case])})
        res.witnesses.append({"sup": float(rep.sup), "argmax": str(rep.measured_argmax)})
    return res, rep


def check_hilbest(cw: ConstructedWeight, digits: int = 50, samples: int = 5):
    rep = hilbest_report(cw, samples_per_interval=samples, digits=digits)
    res = CheckResult("hilbest-components", rep.passes, False, details=rep.to_json())
    for lv in rep.levels:
        res.witnesses.extend(lv.witnesses[: MAX_WITNESSES - len(res.witnesses)])
    res.witnesses.extend(rep.checkpoint_failures[: max(0, MAX_WITNESSES - len(res.witnesses))])
    return res, rep


def check_sawyer(seed: int = 0, instances: int = 100, a: int = 2) -> CheckResult:
    res = CheckResult("sawyer", True, True)
    rng = random.Random(seed)
    worst = 0.0
    for i in range(instances):
        f, w = random_triadic_pair(rng, depth=rng.choice((2, 3, 4)))
        rep = sawyer_verify(f, w, a)
        wp = rep.worst_packing()
        if wp is not None:
            worst = max(worst, float(wp[0]))
        if not rep.passes:
            res.fail({"instance": i, "report": rep.to_json()})
    res.details = {"instances": instances, "seed": seed, "a": a, "max_packing_ratio": worst}
    return res


def run_checks(
    cw: ConstructedWeight,
    window: int = 3,
    digits: int = 50,
    seed: int = 0,
    scale_floor: int | None = None,
    sawyer_instances: int = 100,
) -> VerifyReport:
    """Every named check; exact checks compare exact scalars, the Hilbert check compares arb balls."""
    jobs = (
        lambda: check_pieces(cw),
        lambda: check_av(cw),
        lambda: check_avest(cw),
        lambda: check_al(cw),
        lambda: check_maxest(cw, window),
        lambda: check_partcase(cw),
        lambda: check_testing(cw, window, scale_floor)[0],
        lambda: check_hilbest(cw, digits)[0],
        lambda: check_sawyer(seed, sawyer_instances),
    )
    results = []
    for job in jobs:
        t0 = time.perf_counter()
        r = job()
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return VerifyReport(cw.params.to_json(), results)
