"""Verification suites over module families.

A suite builds a deterministic family of modules over a ring, resolves each
one, and checks divisibility statements on the modules whose Betti numbers
are certified bounded, i.e. whose resolution was shown to be periodic within
the stage budget.  Plateau-only modules are reported but never used in an
assertion.

Reports are plain dictionaries serialized with sorted keys, so a run is a
deterministic function of the ring and the configuration.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .algebra import (
    CharMismatch,
    LocalAlgebra,
    build_algebra,
    classify,
    hilbert,
    load_ring,
    monomial_ci,
    tensor_algebra,
)
from .modules import (
    FreeMatrix,
    ModulePresentation,
    cyclic_module,
    extension_module,
    free_module,
    restrict_scalars,
)
from .resolution import DEFAULT_CAP, StageBudgetExceeded, resolve
from .series import alternating_tail, fit_rational, ratio_limit_check

__all__ = [
    "SuiteConfig",
    "SuiteReport",
    "Member",
    "WrongRingClass",
    "BadExponents",
    "generate_family",
    "verify_ci4",
    "verify_short_nonci",
    "verify_curv",
    "verify_flat",
    "verify_monomial_ci",
    "verify_limits",
    "linear_forms",
]


class WrongRingClass(ValueError):
    """The ring does not satisfy the hypothesis of the requested suite."""


class BadExponents(ValueError):
    pass


@dataclass
class SuiteConfig:
    ring: str = ""
    seed: int = 0
    count: int = 50  # extension-closure members
    stages: int = 12
    trials: int = 64
    window: int = 4
    cap: int = DEFAULT_CAP
    syzygies: int = 2  # Omega^1..Omega^s of each cyclic member
    controls: int = 10
    max_cyclic: int = 400
    max_extension_length: int = 24
    char: int = 7  # characteristic for suites that build their own ring

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Member:
    """One module of a family together with where it came from."""

    id: str
    kind: str  # free | cyclic | syzygy | extension | control
    source: str
    module: ModulePresentation


@dataclass
class SuiteReport:
    suite: str
    config: dict
    ring: dict
    records: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def check(self, name: str, ok: bool, detail="") -> bool:
        self.assertions.append({"name": name, "passed": bool(ok), "detail": detail})
        return bool(ok)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "version": self.version,
            "config": self.config,
            "ring": self.ring,
            "records": self.records,
            "aggregates": self.aggregates,
            "assertions": self.assertions,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        width = max((len(r["betti"]) for r in self.records), default=0)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["module", "length"] + [f"beta_{i}" for i in range(width)]
                   + ["bounded", "periodic_i", "periodic_j"])
        for r in self.records:
            per = r["periodic"] or {}
            betti = r["betti"] + [""] * (width - len(r["betti"]))
            w.writerow([r["id"], r["length"]] + betti + [r["certified"], per.get("i", ""), per.get("j", "")])
        return buf.getvalue()


def _rng(seed: int, *job) -> np.random.Generator:
    return np.random.default_rng([int(seed), *[int(j) for j in job]])


def linear_forms(A: LocalAlgebra, limit: Optional[int] = None, seed: int = 0):
    """Nonzero linear forms up to scalars: points of P^{v-1}(GF(p)).

    Coefficient vectors are normalized so the first nonzero entry is 1 and
    listed in lexicographic order.  With ``limit`` smaller than the number
    of points a seeded sample of that size is returned instead (in the same
    order).
    """
    p, v = A.p, A.nvars
    total = (p**v - 1) // (p - 1)
    if limit is not None and total > limit:
        rng = _rng(seed, 17)
        picked = set()
        while len(picked) < limit:
            c = rng.integers(0, p, size=v)
            nz = np.flatnonzero(c)
            if nz.size == 0:
                continue
            c = c * pow(int(c[nz[0]]), -1, p) % p
            picked.add(tuple(int(x) for x in c))
        return sorted(picked)
    out = []
    for c in itertools.product(range(p), repeat=v):
        nz = [i for i, x in enumerate(c) if x]
        if nz and c[nz[0]] == 1:
            out.append(tuple(c))
    return out


def _form(A: LocalAlgebra, coeffs) -> np.ndarray:
    return np.tensordot(np.asarray(coeffs, dtype=np.int64), A.gens, axes=(0, 0)) % A.p


def _form_str(A: LocalAlgebra, coeffs) -> str:
    return A.element_str(_form(A, coeffs))


def _random_control(A: LocalAlgebra, rng: np.random.Generator) -> tuple[ModulePresentation, str]:
    # shapes with more relations than generators or the reverse; square
    # presentations are left out because over rings with exact zero
    # divisors they are often periodic
    t, s = [(1, 2), (2, 1), (2, 3), (3, 2)][int(rng.integers(0, 4))]
    e = rng.integers(0, A.p, size=(t, s, A.dim))
    e[:, :, 0] = 0
    return ModulePresentation(FreeMatrix(A, e), name="control"), f"random {t}x{s} presentation in m"


@dataclass
class _Resolved:
    member: Member
    table: object
    diffs: list  # d_1 .. d_{syzygies + 1}; later ones are dropped to save memory
    truncated: bool
    m2_kills: list  # per differential, is m^2 * (column space of d_i) zero?


def _resolve_member(m: Member, cfg: SuiteConfig, job: int) -> _Resolved:
    try:
        table, diffs = resolve(m.module, cfg.stages, window=cfg.window, cap=cfg.cap,
                               trials=cfg.trials, seed=cfg.seed + job)
        truncated = False
    except StageBudgetExceeded as exc:
        table, diffs, truncated = exc.table, exc.differentials, True
    kills = [_m2_kills(d.algebra, d) for d in diffs]
    return _Resolved(m, table, diffs[:cfg.syzygies + 1], truncated, kills)


def _certified(r: _Resolved) -> bool:
    return not r.truncated and r.table.periodic is not None


def generate_family(A: LocalAlgebra, cfg: SuiteConfig, resolved: Optional[list] = None) -> list[Member]:
    """The module family of a suite run.

    In order: the free module A; cyclic modules A/(l) for l over the
    projective space of linear forms; their syzygies Omega^1..Omega^s;
    ``cfg.count`` seeded extensions of certified-bounded members (each new
    certified extension joins the pool); ``cfg.controls`` random
    presentations.  When ``resolved`` is a list it receives the resolution
    of every member, since building the extension pool needs them anyway.
    """
    sink = resolved if resolved is not None else []
    members: list[Member] = []

    def add(m: Member) -> _Resolved:
        members.append(m)
        r = _resolve_member(m, cfg, len(members) - 1)
        sink.append(r)
        return r

    add(Member("free", "free", "A", free_module(A, 1)))
    cyclic = []
    for c in linear_forms(A, cfg.max_cyclic, cfg.seed):
        label = _form_str(A, c)
        r = add(Member(f"cyclic[{label}]", "cyclic", f"A/({label})", cyclic_module(A, [_form(A, c)])))
        cyclic.append(r)
    for r in cyclic:
        for i in range(1, cfg.syzygies + 1):
            if i >= len(r.diffs):
                break
            d = r.diffs[i]  # d_{i+1} presents Omega^i
            src = r.member.source
            add(Member(f"syz{i}[{src}]", "syzygy", f"Omega^{i} {src}", ModulePresentation(d)))
    pool = [r for r in sink if _certified(r)]
    made = 0
    attempt = 0
    while made < cfg.count and pool and attempt < 20 * max(cfg.count, 1):
        rng = _rng(cfg.seed, 1, attempt)
        attempt += 1
        a = pool[int(rng.integers(0, len(pool)))]
        b = pool[int(rng.integers(0, len(pool)))]
        if a.table.syzygy_lengths[0] + b.table.syzygy_lengths[0] > cfg.max_extension_length:
            continue
        E = extension_module(a.member.module, b.member.module, seed=int(rng.integers(0, 2**31)))
        r = add(Member(f"ext{made}", "extension", f"ext({a.member.id}, {b.member.id})", E))
        made += 1
        if _certified(r):
            pool.append(r)
    for k in range(cfg.controls):
        M, src = _random_control(A, _rng(cfg.seed, 2, k))
        add(Member(f"control{k}", "control", src, M))
    return members


def _m2_kills(A: LocalAlgebra, d: FreeMatrix) -> bool:
    """Is m^2 * (column space of d) zero?"""
    filt = A.rad_filtration
    if len(filt) <= 2 or d.rows == 0 or d.cols == 0:
        return True
    sq = filt[2]
    if sq.size == 0:
        return True
    # e is killed by m^2 iff basis[b] * e = 0 for every b in m^2
    ops = A.mult[sq].transpose(1, 0, 2).reshape(A.dim, -1).astype(np.int64)
    flat = d.entries.reshape(-1, A.dim)
    flat = flat[flat.any(axis=1)]
    step = 1 << 16
    for lo in range(0, flat.shape[0], step):
        if ((flat[lo:lo + step].astype(np.int64) @ ops) % A.p).any():
            return False
    return True


def _identity(table, n: int) -> dict:
    """Count stages where l(Omega^{i+1}) = b_i n - l(Omega^i) holds or fails."""
    lengths = table.syzygy_lengths
    ok = [lengths[i + 1] == table.betti[i] * n - lengths[i] for i in range(len(lengths) - 1)]
    return {"checked": len(ok), "failed": ok.count(False)}


def _record(r: _Resolved, A: LocalAlgebra, short: bool) -> dict:
    t = r.table
    per = t.periodic
    lengths = t.syzygy_lengths
    rec = {
        "id": r.member.id,
        "kind": r.member.kind,
        "source": r.member.source,
        "length": lengths[0] if lengths else None,
        "betti": t.betti,
        "syzygy_lengths": lengths,
        "plateau": t.bounded_flag,
        "certified": _certified(r),
        "periodic": None if per is None else {"i": per.i, "j": per.j, "method": per.method},
        "truncated": r.truncated,
        "length_identity": _identity(t, A.dim),
    }
    if short:
        kills = r.m2_kills  # d_i presents Omega^i inside A^{b_{i-1}}
        rec["m2_annihilation"] = {"checked": len(kills), "failed": kills.count(False)}
    return rec


def _ring_info(A: LocalAlgebra) -> dict:
    hd = hilbert(A)
    return {"name": A.name, "char": A.p, "vars": list(A.names), "dim": A.dim,
            "hilbert": hd.h, "socle_dim": hd.socle_dim, **classify(A).to_dict()}


def _gcd(values) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, int(v))
    return g


def _run_family(A: LocalAlgebra, cfg: SuiteConfig, suite: str) -> tuple[SuiteReport, list]:
    resolved: list = []
    generate_family(A, cfg, resolved)
    short = classify(A).short
    report = SuiteReport(suite=suite, config=cfg.to_dict(), ring=_ring_info(A))
    report.records = [_record(r, A, short) for r in resolved]
    recs = report.records
    report.aggregates.update({
        "modules": len(recs),
        "certified": sum(r["certified"] for r in recs),
        "certified_nonfree": sum(r["certified"] and r["kind"] != "free" for r in recs),
        "truncated": sum(r["truncated"] for r in recs),
        "controls": sum(r["kind"] == "control" for r in recs),
        "controls_increasing": sum(r["kind"] == "control" and _increasing_tail(r["betti"]) for r in recs),
        "length_identity_checks": sum(r["length_identity"]["checked"] for r in recs),
    })
    bad = [r["id"] for r in recs if r["length_identity"]["failed"]]
    report.check("length identity l(Omega^{i+1}) = b_i l(A) - l(Omega^i)", not bad, bad)
    if short:
        report.aggregates["m2_annihilation_checks"] = sum(r["m2_annihilation"]["checked"] for r in recs)
        bad = [r["id"] for r in recs if r["m2_annihilation"]["failed"]]
        report.check("m^2 Omega^i = 0 for i >= 1", not bad, bad)
    return report, resolved


def _increasing_tail(betti, lo: int = 4) -> bool:
    tail = betti[lo:]
    return len(tail) >= 2 and all(a < b for a, b in zip(tail, tail[1:]))


def _even_check(report: SuiteReport, divisor: int, label: str):
    recs = [r for r in report.records if r["certified"]]
    bad = [r["id"] for r in recs if any(l % divisor for l in r["syzygy_lengths"])]
    g = _gcd(r["length"] for r in recs)
    report.aggregates["gcd_certified_lengths"] = g
    report.check(f"{label}: {divisor} divides l(Omega^i M) for certified M, all i <= stages", not bad, bad)
    report.check("gcd of certified lengths is at least 2", g != 1, g)


def _ring(A_or_path) -> LocalAlgebra:
    if isinstance(A_or_path, LocalAlgebra):
        return A_or_path
    return build_algebra(load_ring(A_or_path))


def verify_ci4(A, cfg: SuiteConfig) -> SuiteReport:
    """Even lengths for certified-bounded modules over a CI of multiplicity 4."""
    A = _ring(A)
    if not classify(A).ci4_candidate:
        raise WrongRingClass(f"{A.name} does not have Hilbert function [1, 2, 1]")
    report, _ = _run_family(A, cfg, "ci4")
    _even_check(report, 2, "evenness")
    return report


def verify_monomial_ci(exponents: Sequence[int], cfg: SuiteConfig) -> SuiteReport:
    exps = [int(a) for a in exponents]
    if len(exps) < 2 or any(a < 2 for a in exps) or sum(a % 2 == 0 for a in exps) < 2:
        raise BadExponents(f"need at least two exponents, all >= 2, two of them even; got {exps}")
    A = monomial_ci(exps, cfg.char)
    report, _ = _run_family(A, cfg, "monomial-ci")
    report.ring["exponents"] = exps
    _even_check(report, 2, "evenness")
    return report


def verify_short_nonci(A, cfg: SuiteConfig) -> SuiteReport:
    A = _ring(A)
    cls = classify(A)
    hd = hilbert(A)
    if not cls.short or cls.ci4_candidate or hd.embdim < 2:
        raise WrongRingClass(f"{A.name} is not a short non-CI ring of embedding dimension >= 2")
    report, _ = _run_family(A, cfg, "short")
    recs = [r for r in report.records if r["certified"] and r["kind"] != "free"]
    g = _gcd(r["length"] for r in recs)
    report.aggregates["gcd_certified_lengths"] = g
    report.aggregates["vacuous"] = not recs
    if recs:
        report.check("gcd of certified non-free lengths is at least 2", g != 1, g)
    if cls.lescot is not None and cls.lescot[1] == 1:
        h = cls.lescot[0]
        report.check(f"free module: h+1 = {h + 1} divides l(A)", A.dim % (h + 1) == 0, A.dim)
        report.aggregates["h_plus_1_divides_all"] = all(r["length"] % (h + 1) == 0 for r in recs)
    else:
        free = [r for r in report.records if r["kind"] == "free"]
        report.check("free module: l(A) divides l(A^b)", all(r["length"] % A.dim == 0 for r in free))
    return report


def _curvature_estimate(rec) -> Optional[Fraction]:
    betti = rec["betti"]
    if rec["certified"]:
        return Fraction(1)
    if len(betti) < 2 or betti[-2] == 0:
        return None
    return Fraction(betti[-1], betti[-2])


def verify_curv(A, cfg: SuiteConfig) -> SuiteReport:
    A = _ring(A)
    les = classify(A).lescot
    if les is None:
        raise WrongRingClass(f"{A.name} has no Lescot form 1/((1 - r1 z)(1 - r2 z)) with r1 < r2")
    _, r1, r2 = les
    report, _ = _run_family(A, cfg, "curv")
    threshold = Fraction(2 * r2 - 1, 2)
    qualifying = []
    for rec in report.records:
        est = _curvature_estimate(rec)
        rec["curvature_estimate"] = None if est is None else float(est)
        if est is not None and est < threshold and not rec["truncated"]:
            qualifying.append(rec)
    bad = [r["id"] for r in qualifying if any(l % (r2 + 1) for l in r["syzygy_lengths"][1:])]
    report.aggregates["qualifying"] = len(qualifying)
    report.aggregates["vacuous"] = not qualifying
    report.check(f"r2+1 = {r2 + 1} divides l(Omega^i M), 1 <= i <= stages, when curv M < {float(threshold)}",
                 not bad, bad)
    return report


def _divisor_for(R: LocalAlgebra) -> Optional[int]:
    cls = classify(R)
    if cls.ci4_candidate:
        return 2
    if cls.lescot is not None and cls.lescot[1] == 1:
        return cls.lescot[0] + 1
    return None


def verify_flat(R, T, cfg: SuiteConfig) -> SuiteReport:
    """Lengths and boundedness transfer from S = R (x) T down to R."""
    R, T = _ring(R), _ring(T)
    if R.p != T.p:
        raise CharMismatch(f"characteristics {R.p} and {T.p} differ")
    S = tensor_algebra(R, T)
    report, resolved = _run_family(S, cfg, "flat")
    report.ring["base"] = _ring_info(R)
    images = S.gens[: R.nvars]
    divisor = _divisor_for(R)
    transferred = 0
    for rec, r in zip(report.records, resolved):
        if not rec["certified"]:
            continue
        pres = restrict_scalars(R, images, r.member.module.module)
        sub = _resolve_member(Member(rec["id"], rec["kind"], rec["source"], pres), cfg, 0)
        rec["restricted"] = {
            "length": sub.table.syzygy_lengths[0],
            "betti": sub.table.betti,
            "certified": _certified(sub),
            "periodic": None if sub.table.periodic is None else
            {"i": sub.table.periodic.i, "j": sub.table.periodic.j, "method": sub.table.periodic.method},
            "length_identity": _identity(sub.table, R.dim),
        }
        transferred += 1
    rest = [r for r in report.records if "restricted" in r]
    report.aggregates["transferred"] = transferred
    report.aggregates["divisor_from_base"] = divisor
    report.aggregates["length_identity_checks"] += sum(r["restricted"]["length_identity"]["checked"] for r in rest)
    bad = [r["id"] for r in rest if r["restricted"]["length_identity"]["failed"]]
    report.check("length identity over R", not bad, bad)
    bad = [r["id"] for r in rest if r["restricted"]["length"] != r["length"]]
    report.check("l_R(N) = l_S(N)", not bad, bad)
    bad = [r["id"] for r in rest if not r["restricted"]["certified"]]
    report.check("R-Betti numbers certified bounded", not bad, bad)
    if divisor is not None:
        bad = [r["id"] for r in rest if r["length"] % divisor]
        report.check(f"{divisor} divides l_S(N)", not bad, bad)
    return report


def _theta(kind: str, h: int, n: int) -> list[int]:
    if kind == "geometric":
        return [h**i for i in range(n + 1)]
    return [(h ** (i + 1) - 1) // (h - 1) for i in range(n + 1)]


def verify_limits(hs: Sequence[int], n_max: int = 60, tol=Fraction(1, 10**6)) -> SuiteReport:
    """Alternating-tail and ratio limits for theta_n = h^n and 1 + h + ... + h^n."""
    hs = [int(h) for h in hs]
    if any(h < 2 for h in hs):
        raise ValueError("every h must be at least 2")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    report = SuiteReport(suite="limits", config={"h": hs, "n_max": n_max, "tol": str(tol)}, ring={})
    for h in hs:
        target = Fraction(1, h + 1)
        for kind in ("geometric", "sum"):
            theta = _theta(kind, h, n_max)
            r = alternating_tail(theta, n_max)
            err = abs(r - target)
            fit = (h + 1, h) if kind == "sum" else None
            rr = ratio_limit_check(theta, h, window=(n_max - 5, n_max - 1), fit=fit)
            report.records.append({
                "id": f"{kind}[h={h}]",
                "h": h,
                "theta": kind,
                "r_n": str(r),
                "r_n_float": float(r),
                "limit": str(target),
                "error": float(err),
                "ratio_tail": float(rr.tail_estimate),
            })
            report.check(f"|r_{n_max} - 1/{h + 1}| < {float(tol)} for {kind} theta", err < tol, float(err))
            report.check(f"theta_(n+1)/theta_n -> {h} for {kind} theta", rr.passed, float(rr.tail_estimate))
            if kind == "sum":
                report.check(f"1 + {h} + ... + {h}^n expands 1/(1 - {h + 1}z + {h}z^2)",
                             fit_rational(theta, h + 1, h))
    return report
