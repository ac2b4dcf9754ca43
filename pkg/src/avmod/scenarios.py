"""Scenario runner: named checks over modules, atlases and representations.

A scenario is a JSON object::

    {"name": "p1-det-lambda",
     "tags": ["glue"],
     "module": "tensor(ring(x), det(1/2))",      # optional module expression
     "fixture": "corrupt-gauge",                   # optional, instead of "module"
     "checks": [{"kind": "glue", "atlas": "p1", "rule": "det:2"},
                {"kind": "smash", "degree": 3, "expect": "fail"}]}

Each check yields ``pass`` or ``fail`` plus a value and witnesses.  A check
with ``"expect": "fail"`` passes exactly when the underlying test fails
(negative controls); the witness of the failure is kept in the report.
"""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import gln
from .atlas import (casimir_invariance_check, get_atlas, glue_check, gm_intertwiner_exponents,
                    gm_reparam_failures, rule_for)
from .build import build_module
from .expr import ParseError
from .gk import bernstein_check, frame_from_spec, growth_exponent, growth_series
from .jets import JetRep
from .local_iso import check_homomorphism, roundtrip_generators
from .modules import (ChargedTwist, RingDModule, SyzygyViolation, TensorModule, Unknown,
                      elliptic_gauge_data, gauge_module, minimal_differentiability,
                      validate_smash)
from .rings import elliptic, laurent, poly


class ScenarioError(ValueError):
    pass


@dataclass
class CheckResult:
    kind: str
    status: str
    value: object = None
    witnesses: list = field(default_factory=list)
    seconds: float | None = None

    def as_dict(self, timings: bool) -> dict:
        d = {"kind": self.kind, "status": self.status, "value": self.value}
        if self.witnesses:
            d["witnesses"] = self.witnesses
        if timings and self.seconds is not None:
            d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class Report:
    name: str
    seed: int
    checks: list = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.status == "pass" for c in self.checks)

    def as_dict(self, timings: bool = False) -> dict:
        d = {"scenario": self.name, "seed": self.seed,
             "status": "pass" if self.passed else "fail",
             "checks": [c.as_dict(timings) for c in self.checks]}
        if self.error:
            d["error"] = self.error
        return d


# ---------------------------------------------------------------- fixtures

def _corrupt_gauge():
    # tau(T) = (t^2 + 2) Y breaks compatibility with y Y = (t^2 - 1) T
    A = elliptic()
    t, _ = A.gens()
    return gauge_module(elliptic_gauge_data(tau_T=(A.zero(), t * t + 2)), check=False)


def _broken_jetchain():
    # X d_X acting by diag(a, a + 2) no longer matches the bracket with X^2 d_X
    J = JetRep.jetchain(2, Fraction(1))
    mats = dict(J.mats)
    X = next(g for g in mats if g.k == (1,))
    mats[X] = mats[X].copy()
    mats[X][1, 1] = Fraction(3)
    return TensorModule(RingDModule(poly("x")), JetRep(1, J.s, J.dim, mats, "broken-jetchain", check=False))


def _second_order_twist():
    return ChargedTwist(RingDModule(laurent("t")), Fraction(1, 2), second_order=True)


FIXTURES = {
    "corrupt-gauge": _corrupt_gauge,
    "broken-jetchain": _broken_jetchain,
    "second-order-twist": _second_order_twist,
}


# ---------------------------------------------------------------- checks

def _module(scn: dict):
    if "fixture" in scn:
        if scn["fixture"] not in FIXTURES:
            raise ScenarioError(f"unknown fixture {scn['fixture']!r}")
        return FIXTURES[scn["fixture"]]()
    if "module" not in scn:
        raise ScenarioError("this check needs a 'module' or 'fixture'")
    return build_module(scn["module"])


def _q(x) -> str:
    return str(Fraction(x))


def check_smash(scn, chk, ctx):
    rep = validate_smash(ctx.module(), int(chk.get("degree", 3)), max_pairs=chk.get("max_pairs"))
    return rep.passed, {"relations": rep.checks}, rep.witnesses


def check_diff_order(scn, chk, ctx):
    M = ctx.module()
    got = minimal_differentiability(M, int(chk.get("nmax", 4)), int(chk.get("degree", 6)),
                                    chk.get("route", "auto"))
    value = str(got) if isinstance(got, Unknown) else got
    if "expect_value" not in chk:
        return not isinstance(got, Unknown), value, []
    ok = value == chk["expect_value"]
    return ok, value, [] if ok else [f"expected {chk['expect_value']}, got {value}"]


def check_glue(scn, chk, ctx):
    atlas = get_atlas(chk.get("atlas") or scn.get("atlas"))
    rep = glue_check(atlas, rule_for(atlas, chk["rule"]), int(chk.get("bound", 3)))
    return rep.passed, rep.entries, [e["witness"] for e in rep.entries if e["status"] == "fail"]


def check_elliptic_gauge(scn, chk, ctx):
    try:
        M = gauge_module(elliptic_gauge_data())
    except SyzygyViolation as e:
        return False, None, [str(e)]
    D = M.P
    t, y = D.ring.gens()
    lhs = D.act_d(0, D.gen(1, y))              # tau(y Y)
    rhs = D.act_d(0, D.gen(0, t * t - 1))      # tau((t^2 - 1) T)
    want = D.gen(1, t ** 4 + 4 * t * t - 1)
    ok = D.eq(lhs, rhs) and D.eq(lhs, want)
    return ok, D.to_text(D.normal(lhs)), [] if ok else [f"{D.to_text(lhs)} vs {D.to_text(rhs)}"]


def check_gm_reparam(scn, chk, ctx):
    bad = {}
    for lam in chk.get("lams", ["0", "1/2", "1", "1/3", "-2"]):
        fails = gm_reparam_failures(Fraction(lam), int(chk.get("range", 3)))
        if fails:
            bad[lam] = fails
    return not bad, {"checked": chk.get("lams")}, [f"lambda={k}: (k,l) in {v[:5]}" for k, v in bad.items()]


def check_gm_intertwiner(scn, chk, ctx):
    lam = Fraction(chk["lam"])
    got = gm_intertwiner_exponents(lam)
    want = chk.get("expect_value")
    if want is None:
        return bool(got), got, [] if got else ["no exponent c in -4..4 matches"]
    ok = got == want
    return ok, got, [] if ok else [f"expected {want}, got {got}"]


def check_casimir_table(scn, chk, ctx):
    bad = []
    for n in range(1, int(chk.get("n_max", 4)) + 1):
        for k in range(n + 1):
            cc = gln.central_character(gln.ext(k, n), 2)
            want = [Fraction(k), Fraction(k * (n + 1 - k))]
            if cc[:2] != want:
                bad.append(f"ext({k},{n}): {[_q(c) for c in cc[:2]]} != {[_q(c) for c in want]}")
    return not bad, None, bad


def check_casimir(scn, chk, ctx):
    rep = gln.rep_build(chk["rep"])
    cc = [_q(c) for c in gln.central_character(rep, int(chk.get("k", rep.n)))]
    want = chk.get("expect_value")
    ok = want is None or cc == [_q(c) for c in want]
    return ok, cc, [] if ok else [f"expected {want}, got {cc}"]


def obstruction_catalog() -> list:
    """``(label, rep, expected k or None)`` for the exterior-type classification."""
    out = []
    for n in range(1, 4):
        for k in range(n + 1):
            out.append((f"ext({k},{n})", gln.ext(k, n), k))
    out.append(("det(1) n=2", gln.det(1, 2), 2))
    for n in (2, 3):
        out.append((f"sym(2,{n})", gln.sym(2, n), None))
        top = [1] + [0] * (n - 2) + [-1]
        out.append((f"hwc(natural(x)dual, n={n})",
                    gln.hwc(gln.tensor(gln.natural(n), gln.dual(gln.natural(n))), top), None))
        for lam in (1, -1):
            out.append((f"det({lam})(x)natural({n})", gln.tensor(gln.det(lam, n), gln.natural(n)), None))
    return out


def check_obstruction(scn, chk, ctx):
    if "rep" in chk:
        got = gln.is_exterior_type(gln.rep_build(chk["rep"]))
        want = chk.get("expect_value", got)
        return got == want, got, [] if got == want else [f"expected {want}, got {got}"]
    bad, table = [], {}
    for label, rep, want in obstruction_catalog():
        got = gln.is_exterior_type(rep)
        table[label] = got
        if got != want:
            bad.append(f"{label}: expected {want}, got {got}")
    return not bad, table, bad


def check_local_iso_roundtrip(scn, chk, ctx):
    bad = []
    s_max = int(chk.get("s", 4))
    for n in range(1, int(chk.get("n_max", 2)) + 1):
        ring = poly(*("x", "y")[:n]) if n <= 2 else poly(*[f"x{i + 1}" for i in range(n)])
        for s in range(1, s_max + 1):
            for want, got in roundtrip_generators(ring, s):
                if want != got:
                    bad.append(f"n={n} s={s}: {want} -> {got}")
    return not bad, None, bad[:5]


def check_local_iso_hom(scn, chk, ctx):
    pairs = int(chk.get("pairs", ctx.samples))
    bad = []
    for n in range(1, int(chk.get("n_max", 2)) + 1):
        ring = poly(*("x", "y")[:n])
        fails = check_homomorphism(ring, pairs, int(chk.get("s", 3)), ctx.seed, int(chk.get("deg", 3)))
        bad += [f"n={n} pair {i}" for i in fails]
    return not bad, {"pairs": pairs}, bad[:5]


def check_casimir_invariance(scn, chk, ctx):
    atlas = get_atlas(chk.get("atlas") or scn.get("atlas"))
    drop = bool(chk.get("drop_inverse", False))
    bad = []
    for k in chk.get("ks", [1, 2]):
        for a, b in atlas.sigma:
            if not casimir_invariance_check(atlas, a, b, int(k), drop):
                bad.append(f"k={k} chart {a}->{b}")
    return not bad, None, bad


def check_gk(scn, chk, ctx):
    M = ctx.module()
    seed = [M.basis(0)[0]]
    series = growth_series(M, frame_from_spec(M, chk.get("frame", "")), seed, int(chk.get("lmax", 24)))
    fit = growth_exponent(series.dims)
    value = {"exponent": round(fit.exponent, 4), "dims": series.dims}
    if "expect_value" not in chk:
        return True, value, []
    ok = abs(fit.exponent - chk["expect_value"]) <= chk.get("tol", 0.15)
    return ok, value, [] if ok else [f"exponent {fit.exponent:.4f} not within tolerance of {chk['expect_value']}"]


def check_bernstein(scn, chk, ctx):
    M = ctx.module()
    res = bernstein_check(M, int(chk["n"]), int(chk.get("lmax", 24)))
    return res.passed, {"exponent": round(res.exponent, 4)}, [] if res.passed else [
        f"exponent {res.exponent:.4f} < {chk['n']} - 0.2"]


CHECKS = {
    "smash": check_smash,
    "diff-order": check_diff_order,
    "glue": check_glue,
    "elliptic-gauge": check_elliptic_gauge,
    "gm-reparam": check_gm_reparam,
    "gm-intertwiner": check_gm_intertwiner,
    "casimir-table": check_casimir_table,
    "casimir": check_casimir,
    "obstruction": check_obstruction,
    "local-iso-roundtrip": check_local_iso_roundtrip,
    "local-iso-hom": check_local_iso_hom,
    "casimir-invariance": check_casimir_invariance,
    "gk": check_gk,
    "bernstein": check_bernstein,
}


# ---------------------------------------------------------------- running

class _Context:
    def __init__(self, scn: dict, seed: int, samples: int):
        self.scn, self.seed, self.samples = scn, seed, samples
        self._M = None

    def module(self):
        if self._M is None:
            self._M = _module(self.scn)
        return self._M


def validate_scenario(scn: dict) -> None:
    if not isinstance(scn, dict) or not isinstance(scn.get("name"), str):
        raise ScenarioError("a scenario is a JSON object with a string 'name'")
    checks = scn.get("checks")
    if not isinstance(checks, list) or not checks:
        raise ScenarioError(f"{scn['name']}: 'checks' must be a non-empty list")
    for i, c in enumerate(checks):
        if not isinstance(c, dict) or c.get("kind") not in CHECKS:
            raise ScenarioError(f"{scn['name']}: check {i} has unknown kind {c.get('kind') if isinstance(c, dict) else c!r}")
        if c.get("expect", "pass") not in ("pass", "fail"):
            raise ScenarioError(f"{scn['name']}: check {i}: expect must be 'pass' or 'fail'")
    if "module" in scn:
        build_module(scn["module"])
    if "fixture" in scn and scn["fixture"] not in FIXTURES:
        raise ScenarioError(f"{scn['name']}: unknown fixture {scn['fixture']!r}")
    atlases = [scn.get("atlas")] + [c.get("atlas") for c in checks]
    for a in atlases:
        if a is not None:
            get_atlas(a)


def run_scenario(scn: dict, seed: int = 0, samples: int = 64) -> Report:
    rep = Report(scn.get("name", "?"), seed)
    try:
        validate_scenario(scn)
    except (ScenarioError, ParseError, KeyError, ValueError) as e:
        rep.error = str(e)
        return rep
    ctx = _Context(scn, seed, samples)
    random.seed(seed)
    for chk in scn["checks"]:
        t0 = time.perf_counter()
        try:
            ok, value, wit = CHECKS[chk["kind"]](scn, chk, ctx)
        except Exception as e:  # a raised error is a failed check with the error as witness
            ok, value, wit = False, None, [f"{type(e).__name__}: {e}"]
        expect_fail = chk.get("expect") == "fail"
        status = "pass" if ok != expect_fail else "fail"
        if expect_fail and not ok:
            wit = ["expected failure observed"] + list(wit)
        elif expect_fail and ok:
            wit = ["negative control unexpectedly passed"]
        rep.checks.append(CheckResult(chk["kind"], status, _jsonable(value), [str(w) for w in wit],
                                      time.perf_counter() - t0))
    return rep


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _run_one(args):
    scn, seed, samples = args
    return run_scenario(scn, seed, samples)


def run_many(scns: list, seed: int = 0, samples: int = 64, jobs: int = 1) -> list:
    """Run scenarios (concurrently when ``jobs > 1``); reports come back sorted by name."""
    work = [(s, seed, samples) for s in scns]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            reports = list(ex.map(_run_one, work))
    else:
        reports = [_run_one(w) for w in work]
    return sorted(reports, key=lambda r: r.name)


def select(scns: list, pattern: str | None) -> list:
    if not pattern:
        return list(scns)
    return [s for s in scns if pattern in s["name"] or pattern in s.get("tags", [])]


def load_scenarios(path: str) -> list:
    with open(path) as fh:
        data = json.load(fh)
    return data if isinstance(data, list) else [data]


def dump_reports(reports: list, timings: bool = False) -> str:
    return json.dumps([r.as_dict(timings) for r in reports], indent=2, sort_keys=True)


# ---------------------------------------------------------------- built-in suite

SMASH_CONSTRUCTIONS = [
    "ring(x)",
    "ring(x,y)",
    "laurent(t)",
    "elliptic",
    "circle(x)",
    "delta(0)",
    "delta(0,0)",
    "tensor(ring(x), natural(1))",
    "tensor(ring(x), det(1/2))",
    "tensor(ring(x), jetchain(3,1))",
    "tensor(ring(x,y), natural(2))",
    "tensor(ring(x,y), sym(2,2))",
    "tensor(laurent(t), det(-1))",
    "tensor(circle(x), natural(1))",
    "gauge(elliptic)",
    "charged(ring(x), 1/3)",
    "charged(laurent(t), 1/2)",
    "rudakov(0, natural(1))",
    "rudakov([0,0], natural(2))",
    "alpha(0)",
    "alpha(1)",
    "alpha(-1)",
    "dual(tensor(ring(x), det(1/2)))",
    "dual(tensor(ring(x,y), natural(2)))",
    "mtensor(tensor(ring(x), natural(1)), tensor(ring(x), det(1/3)))",
]


def _slug(expr: str) -> str:
    out = "".join(c if c.isalnum() else "-" for c in expr)
    while "--" in out:
        out = out.replace("--", "-")
    return out.strip("-")


def builtin_scenarios() -> list:
    S = []
    S.append({"name": "elliptic-gauge", "tags": ["gauge", "identity"],
              "checks": [{"kind": "elliptic-gauge"}]})
    S.append({"name": "gm-reparam", "tags": ["glue"],
              "checks": [{"kind": "gm-reparam", "lams": ["0", "1/2", "1", "1/3", "-2", "3/2"]}]})
    for name, expr, want in [
        ("diff-order-ring-x", "ring(x)", 1),
        ("diff-order-delta", "delta(0)", 1),
        ("diff-order-det-half", "tensor(ring(x), det(1/2))", 2),
        ("diff-order-det-2", "tensor(ring(x), det(2))", 2),
        ("diff-order-det-minus-1", "tensor(ring(x), det(-1))", 2),
        ("diff-order-jets-natural-2", "tensor(ring(x,y), natural(2))", 2),
        ("diff-order-alpha-0", "alpha(0)", 3),
        ("diff-order-alpha-1", "alpha(1)", 3),
        ("diff-order-alpha-minus-1", "alpha(-1)", 3),
    ]:
        S.append({"name": name, "tags": ["diff-order"], "module": expr,
                  "checks": [{"kind": "diff-order", "nmax": 4, "degree": 6, "expect_value": want}]})
    S.append({"name": "casimir-exterior-table", "tags": ["casimir"],
              "checks": [{"kind": "casimir-table", "n_max": 4}]})
    S.append({"name": "obstruction-catalog", "tags": ["obstruction"],
              "checks": [{"kind": "obstruction"}]})
    S.append({"name": "local-iso", "tags": ["local-iso"],
              "checks": [{"kind": "local-iso-roundtrip", "s": 4, "n_max": 2},
                         {"kind": "local-iso-hom", "pairs": 50, "s": 3, "deg": 3, "n_max": 2}]})
    for lam in ("-2", "-1", "0", "1", "2"):
        S.append({"name": f"p1-det-lambda-{lam}", "tags": ["glue"],
                  "checks": [{"kind": "glue", "atlas": "p1", "rule": f"det:{lam}"}]})
    S.append({"name": "p1-det-lambda-1/2-rejected", "tags": ["glue"],
              "checks": [{"kind": "glue", "atlas": "p1", "rule": "det:1/2", "expect": "fail"}]})
    for lam, c in (("0", [0]), ("1/2", [1]), ("1", [2])):
        S.append({"name": f"gm-intertwiner-{lam}", "tags": ["glue"],
                  "checks": [{"kind": "gm-intertwiner", "lam": lam, "expect_value": c}]})
    S.append({"name": "gm-intertwiner-1/3-none", "tags": ["glue"],
              "checks": [{"kind": "gm-intertwiner", "lam": "1/3", "expect_value": []}]})
    for atlas in ("p1", "circle"):
        S.append({"name": f"casimir-invariance-{atlas}", "tags": ["casimir", "glue"], "atlas": atlas,
                  "checks": [{"kind": "casimir-invariance", "ks": [1, 2]},
                             {"kind": "casimir-invariance", "ks": [2], "drop_inverse": True,
                              "expect": "fail"}]})
    for name, expr, frame, want in [
        ("gk-ring-x", "ring(x)", "x,dx", 1),
        ("gk-ring-xy", "ring(x,y)", "x,y,dx,dy", 2),
        ("gk-jetchain-3", "tensor(ring(x), jetchain(3,1))", "x,dx,jets", 1),
        ("gk-delta", "delta(0)", "x,dx", 1),
    ]:
        S.append({"name": name, "tags": ["gk"], "module": expr,
                  "checks": [{"kind": "gk", "frame": frame, "lmax": 24, "expect_value": want,
                              "tol": 0.15}]})
    S.append({"name": "gk-bernstein-natural-2", "tags": ["gk"], "module": "tensor(ring(x,y), natural(2))",
              "checks": [{"kind": "bernstein", "n": 2, "lmax": 24}]})
    for expr in SMASH_CONSTRUCTIONS:
        S.append({"name": f"smash-{_slug(expr)}", "tags": ["smash"], "module": expr,
                  "checks": [{"kind": "smash", "degree": 3}]})
    for fx in FIXTURES:
        S.append({"name": f"negative-{fx}", "tags": ["smash", "negative"], "fixture": fx,
                  "checks": [{"kind": "smash", "degree": 3, "expect": "fail"}]})
    return sorted(S, key=lambda s: s["name"])
