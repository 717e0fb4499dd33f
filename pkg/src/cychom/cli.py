"""Batch front door: config ingestion, job orchestration, caching, reports.

One command with a task per subcommand (or the equivalent --task flag).
Values from --config override flags; all randomness is derived from the
single --seed.  Result records are written as deterministic JSON
(records.json) keyed by a config digest, with wall time and cache
bookkeeping kept separately in report.json so records stay byte-identical
across reruns.  Exit codes: 0 all verdicts pass, 1 violations found,
2 configuration or resource error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from random import Random

from . import algebra, analysis, complexes, groups, pairing, sampling
from .algebra import enclosure_to_json
from .complexes import Convention
from .groups import ResourceCapExceeded
from .scalars import Enclosure

TASKS = (
    "homology",
    "growth",
    "seminorm",
    "norms",
    "pairing",
    "bound",
    "identity-suite",
    "list-builtins",
)


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class JobConfig:
    task: str
    seed: int = 0
    cap: int | None = None
    convention: str = "standard"
    group: str | None = None
    params: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        return {
            "task": self.task,
            "seed": self.seed,
            "cap": self.cap,
            "convention": self.convention,
            "group": self.group,
            "params": self.params,
        }

    def digest(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class RunReport:
    job_id: str
    digest: str
    task: str
    records: list
    violations: int
    wall_time: float
    cache_hit: bool

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "digest": self.digest,
            "task": self.task,
            "violations": self.violations,
            "wall_time_s": self.wall_time,
            "cache_hit": self.cache_hit,
            "records": self.records,
        }


def _records_text(cfg: JobConfig, records: list) -> str:
    payload = {
        "digest": cfg.digest(),
        "task": cfg.task,
        "seed": cfg.seed,
        "convention": cfg.convention,
        "records": records,
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _atomic_write(path: str, text: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ----------------------------------------------------------------------
# config assembly and validation
# ----------------------------------------------------------------------

_FLAG_PARAM_KEYS = (
    "variant", "n_max", "R", "degrees", "samples", "k", "cochain",
    "lambdas", "radii", "terms", "user_groups",
)


def build_config(args) -> JobConfig:
    """Merge defaults, flags, then the config file (config wins, per contract)."""
    cfg = {
        "task": args.task,
        "seed": args.seed,
        "cap": args.cap,
        "convention": args.convention,
        "group": args.group,
        "params": {},
    }
    for key in _FLAG_PARAM_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg["params"][key] = v
    if args.config:
        if not os.path.exists(args.config):
            raise ConfigError([f"config: file {args.config!r} does not exist"])
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError([f"config: invalid JSON ({exc})"]) from exc
        for key in ("task", "seed", "cap", "convention", "group"):
            if key in doc:
                cfg[key] = doc[key]
        cfg["params"].update(doc.get("params", {}))
    job = JobConfig(
        task=cfg["task"], seed=int(cfg["seed"]),
        cap=cfg["cap"] if cfg["cap"] is None else int(cfg["cap"]),
        convention=str(cfg["convention"]), group=cfg["group"],
        params=cfg["params"],
    )
    validate_config(job)
    return job


_GROUP_TASKS = ("homology", "growth", "seminorm", "norms", "pairing", "bound")


def validate_config(cfg: JobConfig):
    problems = []
    if cfg.task not in TASKS:
        problems.append(f"task: unknown task {cfg.task!r} (choose from {', '.join(TASKS)})")
    if cfg.convention not in ("standard", "paper"):
        problems.append(f"convention: {cfg.convention!r} is not 'standard' or 'paper'")
    if cfg.cap is not None and cfg.cap < 1:
        problems.append("cap: must be a positive integer")
    if cfg.task in _GROUP_TASKS and not cfg.group:
        problems.append(f"group: task {cfg.task!r} needs --group or config group")
    if cfg.group and not _group_resolvable(cfg.group):
        problems.append(f"group: cannot resolve {cfg.group!r} (builtin name or file)")
    p = cfg.params
    for key in ("n_max", "R", "samples", "terms", "k"):
        if key in p and (not isinstance(p[key], int) or p[key] < 0):
            problems.append(f"params.{key}: must be a nonnegative integer")
    if "degrees" in p:
        if not isinstance(p["degrees"], list) or not p["degrees"]:
            problems.append("params.degrees: must be a nonempty list")
    for key in ("lambdas", "radii"):
        if key in p and (not isinstance(p[key], list) or not p[key]):
            problems.append(f"params.{key}: must be a nonempty list")
    if cfg.task == "growth" and "cochain" not in p:
        problems.append("params.cochain: growth task needs a cochain document")
    if cfg.task in ("pairing", "bound"):
        if "cochain" not in p:
            problems.append(f"params.cochain: {cfg.task} task needs a cochain document")
        if "chains" not in p or not isinstance(p["chains"], list) or not p["chains"]:
            problems.append(f"params.chains: {cfg.task} task needs a chain list")
    if problems:
        raise ConfigError(problems)


def _group_resolvable(spec: str) -> bool:
    try:
        groups.resolve_group(spec)
        return True
    except (ValueError, OSError):
        return False


def _cochain_doc(p) -> dict:
    doc = p["cochain"]
    if isinstance(doc, str):
        return {"kind": doc}
    return doc


# ----------------------------------------------------------------------
# chain specs in manifests
# ----------------------------------------------------------------------

def _chains_from_spec(spec_list, group, rng: Random, cap) -> list:
    out = []
    for i, spec in enumerate(spec_list):
        if "file" in spec:
            ch = algebra.read_chain_file(spec["file"], group)
            out.append((spec.get("id", os.path.basename(spec["file"])), ch))
        elif "terms" in spec:
            ch = algebra.chain_from_json(spec, group)
            out.append((spec.get("id", f"inline-{i}"), ch))
        elif "random" in spec:
            r = spec["random"]
            for j in range(int(r.get("count", 1))):
                ch = sampling.random_chain(
                    rng, group, int(r["degree"]), int(r.get("R", 4)),
                    terms=int(r.get("terms", 4)),
                    gaussian=bool(r.get("gaussian", False)), cap=cap,
                )
                out.append((f"random-{i}-{j}", ch))
        else:
            raise ConfigError([f"params.chains[{i}]: need file, terms, or random"])
    return out


# ----------------------------------------------------------------------
# tasks
# ----------------------------------------------------------------------

def _task_homology(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    n_max = int(p.get("n_max", 2))
    radius = int(p.get("R", 4))
    variant = p.get("variant", "hochschild")
    degrees = p.get("degrees", [0])
    cx = complexes.build_truncated(
        group, n_max, radius, variant,
        convention=cfg.convention, k=int(p.get("k", 3)), cap=cfg.cap,
    )
    d2 = cx.verify_d_squared()
    records = [{
        "kind": "complex",
        "group": group.name,
        "variant": variant,
        "dims": {str(m): d for m, d in sorted(cx.dims.items())},
        "d_squared_zero": d2,
    }]
    for d in degrees:
        res = complexes.truncated_homology(cx, int(d))
        records.append({"kind": "homology", **res.to_json()})
    if p.get("export"):
        complexes.export_complex(cx, os.path.join(out_dir, f"complex-{cfg.digest()[:12]}"))
    return records, 0 if d2 else 1


def _task_identity_suite(cfg: JobConfig, out_dir: str):
    p = cfg.params
    names = p.get("groups", ["Z/4", "S3", "F2", "Z^2"])
    realizations = [groups.resolve_group(n) for n in names]
    samples = int(p.get("samples", 100))
    max_degree = int(p.get("max_degree", 3))
    radius = int(p.get("R", 6))
    terms = int(p.get("terms", 4))
    rng = Random(cfg.seed)
    conv = Convention.coerce(cfg.convention)
    counts = {
        "b_squared": 0, "B_squared": 0, "anticommute": 0,
        "filtration_closure": 0, "tau_composite": 0,
        "split_preservation": 0, "descent": 0,
    }
    checked = dict.fromkeys(counts, 0)
    for i in range(samples):
        group = realizations[i % len(realizations)]
        degree = i % (max_degree + 1)
        x = sampling.random_chain(rng, group, degree, radius, terms=terms,
                                  gaussian=bool(p.get("gaussian", False)),
                                  cap=cfg.cap)
        if x.is_zero:
            continue
        bound = x.max_total_length()
        Bx = complexes.connes_B(x)
        if degree >= 2:
            checked["b_squared"] += 1
            if not complexes.hochschild_b(complexes.hochschild_b(x)).is_zero:
                counts["b_squared"] += 1
        checked["B_squared"] += 1
        if not complexes.connes_B(Bx).is_zero:
            counts["B_squared"] += 1
        checked["anticommute"] += 1
        anti = complexes.hochschild_b(Bx)
        if degree >= 1:
            anti = anti + complexes.connes_B(complexes.hochschild_b(x))
        if not anti.is_zero:
            counts["anticommute"] += 1
        checked["filtration_closure"] += 1
        outputs = [Bx, complexes.cyclic_tau(x, conv)]
        if degree >= 1:
            outputs.append(complexes.hochschild_b(x))
        if any(y.max_total_length() > bound for y in outputs if not y.is_zero):
            counts["filtration_closure"] += 1
        checked["tau_composite"] += 1
        y = x
        for _ in range(degree + 1):
            y = complexes.cyclic_tau(y, conv)
        expected = x if conv is Convention.STANDARD or degree % 2 == 1 else -x
        if y != expected:
            counts["tau_composite"] += 1
        checked["split_preservation"] += 1
        rep = complexes.split_preservation_check(group, degree, [x])
        if not rep.passed:
            counts["split_preservation"] += 1
        if degree >= 1 and conv is Convention.STANDARD:
            checked["descent"] += 1
            rep = complexes.cyclic_descent_check(group, degree, conv, [x])
            if not rep.passed:
                counts["descent"] += 1
    records = [{
        "kind": "identity-suite",
        "groups": names,
        "samples": samples,
        "checks": [
            {"name": k, "checked": checked[k], "violations": counts[k]}
            for k in sorted(counts)
        ],
    }]
    return records, sum(counts.values())


def _task_growth(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    phi = analysis.load_cochain(_cochain_doc(p), group)
    lambdas = [Fraction(str(x)) for x in p.get("lambdas", ["2", "3/2", "5/4", "9/8"])]
    radii = [int(r) for r in p.get("radii", [4, 6, 8, 10])]
    report = analysis.growth_fit(phi, lambdas=lambdas, radii=radii, cap=cfg.cap)
    csv_path = os.path.join(out_dir, f"growth-{cfg.digest()[:12]}.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "R", "C"])
        writer.writerows(report.to_csv_rows())
    records = [{"kind": "growth", **report.to_json(), "csv": os.path.basename(csv_path)}]
    # monotonicity invariants are facts about the max formula; verify anyway
    violations = 0
    for lam in report.lambdas:
        vals = [report.table[(lam, r)] for r in report.radii]
        if any(vals[i].hi > vals[i + 1].hi or vals[i].lo > vals[i + 1].lo
               for i in range(len(vals) - 1)):
            violations += 1
    for r in report.radii:
        vals = [report.table[(lam, r)] for lam in report.lambdas]
        if any(vals[i].lo < vals[i + 1].lo for i in range(len(vals) - 1)):
            violations += 1
    return records, violations


def _task_seminorm(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    rng = Random(cfg.seed)
    samples = int(p.get("samples", 50))
    radius = int(p.get("R", 4))
    lambdas = sorted(Fraction(str(x)) for x in p.get("lambdas", ["1", "3/2", "2"]))
    n_grid = sorted(Fraction(str(x)) for x in p.get("N_grid", ["1", "2", "4"]))
    m_grid = sorted(int(m) for m in p.get("m_grid", [0, 1, 2]))
    degree = int(p.get("degree", 2))
    viol = {"nu_lambda_monotone": 0, "nu_submultiplicative": 0,
            "eta_m_monotone": 0, "eta_N_antitone": 0}
    for _ in range(samples):
        x = sampling.random_algebra_element(rng, group, radius, gaussian=True)
        y = sampling.random_algebra_element(rng, group, radius, gaussian=True)
        nus = [algebra.nu_lambda(x, lam) for lam in lambdas]
        for a, b in zip(nus, nus[1:]):
            if a.lo > b.hi:
                viol["nu_lambda_monotone"] += 1
        for lam in lambdas:
            prod = algebra.nu_lambda(x * y, lam)
            bound = algebra.nu_lambda(x, lam) * algebra.nu_lambda(y, lam)
            if not prod.possibly_le(bound):
                viol["nu_submultiplicative"] += 1
        ch = sampling.random_chain(rng, group, degree, radius, gaussian=True)
        lam = lambdas[-1]
        for N in n_grid:
            etas = [analysis.eta_seminorm(ch, analysis.EtaParams(lam=lam, N=N, m=m))
                    for m in m_grid]
            for a, b in zip(etas, etas[1:]):
                if a.lo > b.hi:
                    viol["eta_m_monotone"] += 1
        for m in m_grid:
            etas = [analysis.eta_seminorm(ch, analysis.EtaParams(lam=lam, N=N, m=m))
                    for N in n_grid]
            for a, b in zip(etas, etas[1:]):
                if b.lo > a.hi:  # larger N gives the smaller seminorm
                    viol["eta_N_antitone"] += 1
    records = [{
        "kind": "seminorm",
        "group": group.name,
        "samples": samples,
        "lambdas": [str(l) for l in lambdas],
        "N_grid": [str(n) for n in n_grid],
        "m_grid": m_grid,
        "checks": [{"name": k, "violations": v} for k, v in sorted(viol.items())],
    }]
    return records, sum(viol.values())


def _task_norms(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    rng = Random(cfg.seed)
    resolution = p.get("resolution")
    if "elements" in p:
        elems = [
            (e.get("id", f"elem-{i}"), algebra.algebra_element_from_json(e, group))
            for i, e in enumerate(p["elements"])
        ]
    else:
        count = int(p.get("samples", 10))
        radius = int(p.get("R", 3))
        elems = [
            (f"random-{i}",
             sampling.random_algebra_element(rng, group, radius, gaussian=False))
            for i in range(count)
        ]
    rows = []
    records = []
    violations = 0
    for name, x in elems:
        nu1 = algebra.nu_lambda(x, 1)
        red = algebra.reduced_norm(x, resolution=resolution)
        amax = algebra.amax_seminorm(x, resolution=resolution)
        dominated = red.lo <= nu1.hi
        if not dominated:
            violations += 1
        rows.append([name, float(nu1.midpoint), float(red.midpoint),
                     float(amax.midpoint), "yes" if dominated else "NO"])
        records.append({
            "kind": "norms",
            "element": name,
            "nu1": enclosure_to_json(nu1),
            "reduced": enclosure_to_json(red),
            "amax": enclosure_to_json(amax),
            "reduced_le_nu1": dominated,
        })
    pairs = [sampling.dominated_pair(rng, x) for _, x in elems]
    for seminorm in ("nu", "amax"):
        rep = algebra.check_unconditional(seminorm, pairs, lam=Fraction(1),
                                          resolution=resolution)
        records.append({"kind": "unconditionality", **rep.to_json()})
        violations += len(rep.violations())
    csv_path = os.path.join(out_dir, f"norms-{cfg.digest()[:12]}.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["element", "nu1", "reduced", "amax", "reduced<=nu1"])
        writer.writerows(rows)
    return records, violations


def _task_pairing(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    rng = Random(cfg.seed)
    phi = analysis.load_cochain(_cochain_doc(p), group)
    conv = Convention.coerce(cfg.convention)
    tc = pairing.extend_to_cyclic(phi, normalize=bool(p.get("normalize", False)),
                                  convention=conv)
    scan_radius = int(p.get("scan_radius", 3))
    cyclic_ok = pairing.verify_cyclicity(tc, scan_radius, cap=cfg.cap)
    if not cyclic_ok:
        tc = pairing.cyclic_symmetrize(tc)
    support_bad = pairing.support_violations(tc, scan_radius, cap=cfg.cap)
    records = [{
        "kind": "cocycle",
        "cochain": phi.name,
        "certificate": tc.certificate,
        "support_violations": len(support_bad),
    }]
    violations = len(support_bad)
    for name, ch in _chains_from_spec(p["chains"], group, rng, cfg.cap):
        value = pairing.pair(tc, ch)
        fact = pairing.homogeneous_factoring_check(
            phi, ch, normalize=bool(p.get("normalize", False)), convention=conv)
        if not fact.passed:
            violations += 1
        records.append({
            "kind": "pairing",
            "chain": name,
            "value": str(value),
            "factoring": fact.to_json(),
        })
    return records, violations


def _task_bound(cfg: JobConfig, out_dir: str):
    p = cfg.params
    group = groups.resolve_group(cfg.group)
    rng = Random(cfg.seed)
    phi = analysis.load_cochain(_cochain_doc(p), group)
    conv = Convention.coerce(cfg.convention)
    grid = p.get("params_grid", [{"lambda": "2", "N": "1", "m": 0}])
    chains = _chains_from_spec(p["chains"], group, rng, cfg.cap)
    records = []
    violations = 0
    for name, ch in chains:
        cover = int(p.get("cover_radius", ch.max_total_length()))
        for params in grid:
            ep = analysis.EtaParams(
                lam=Fraction(str(params.get("lambda", "2"))),
                N=Fraction(str(params.get("N", "1"))),
                m=int(params.get("m", 0)),
            )
            cert = pairing.verify_pairing_bound(
                phi, ch, ep, cover_radius=max(cover, ch.max_total_length()),
                normalize=bool(p.get("normalize", False)),
                convention=conv, cap=cfg.cap, chain_id=name,
            )
            if not cert.passed:
                violations += 1
            records.append({"kind": "bound-certificate", **cert.to_json()})
    return records, violations


def _task_list_builtins(cfg: JobConfig, out_dir: str):
    user_groups = []
    user_dir = cfg.params.get("user_groups")
    if user_dir and os.path.isdir(user_dir):
        for entry in sorted(os.listdir(user_dir)):
            if entry.endswith(".group"):
                try:
                    g = groups.load_group_file(os.path.join(user_dir, entry))
                    user_groups.append({"file": entry, **g.describe()})
                except (ValueError, OSError) as exc:
                    user_groups.append({"file": entry, "error": str(exc)})
    records = [{
        "kind": "catalog",
        "groups": groups.builtin_group_catalog(),
        "cochains": analysis.cochain_catalog(),
        "user_groups": user_groups,
    }]
    return records, 0


_TASK_RUNNERS = {
    "homology": _task_homology,
    "identity-suite": _task_identity_suite,
    "growth": _task_growth,
    "seminorm": _task_seminorm,
    "norms": _task_norms,
    "pairing": _task_pairing,
    "bound": _task_bound,
    "list-builtins": _task_list_builtins,
}


# ----------------------------------------------------------------------
# orchestration
# ----------------------------------------------------------------------

def run_job(cfg: JobConfig, out_dir: str, use_cache: bool = True) -> RunReport:
    os.makedirs(out_dir, exist_ok=True)
    cache_dir = os.path.join(out_dir, "cache")
    os.makedirs(cache_dir, exist_ok=True)
    digest = cfg.digest()
    cache_path = os.path.join(cache_dir, f"{digest}.json")
    start = time.monotonic()
    cache_hit = False
    if use_cache and os.path.exists(cache_path):
        with open(cache_path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        records = payload["records"]
        violations = payload["violations"]
        cache_hit = True
    else:
        records, violations = _TASK_RUNNERS[cfg.task](cfg, out_dir)
        _atomic_write(cache_path, json.dumps(
            {"digest": digest, "violations": violations, "records": records},
            sort_keys=True, indent=1) + "\n")
    _atomic_write(os.path.join(out_dir, "records.json"),
                  _records_text(cfg, records))
    report = RunReport(
        job_id=digest[:12], digest=digest, task=cfg.task, records=records,
        violations=violations, wall_time=time.monotonic() - start,
        cache_hit=cache_hit,
    )
    _atomic_write(os.path.join(out_dir, "report.json"),
                  json.dumps(report.to_json(), sort_keys=True, indent=1) + "\n")
    return report


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cychom",
        description="exact chain-level computations for group-algebra "
                    "Hochschild/cyclic complexes",
    )
    parser.add_argument("--config", metavar="PATH", help="JSON config; overrides flags")
    parser.add_argument("--task", choices=TASKS)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="out", metavar="DIR")
    parser.add_argument("--cap", type=int, default=None,
                        help="resource cap for balls and tuple enumerations")
    parser.add_argument("--convention", choices=("standard", "paper"),
                        default="standard")
    parser.add_argument("--group", help="builtin name (Z/4, S3, K4, F2, Z, Z^2) or file")
    parser.add_argument("--no-cache", action="store_true")
    # common task parameters; config file values win
    parser.add_argument("--variant", choices=complexes.VARIANTS)
    parser.add_argument("--n-max", dest="n_max", type=int)
    parser.add_argument("--radius", dest="R", type=int)
    parser.add_argument("--degrees", type=int, nargs="+")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--cochain", help="builtin cochain kind name")
    parser.add_argument("--lambdas", nargs="+")
    parser.add_argument("--radii", type=int, nargs="+")
    parser.add_argument("--terms", type=int)
    parser.add_argument("--user-groups", dest="user_groups", metavar="DIR")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in TASKS:
        argv = ["--task", argv[0]] + argv[1:]
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.task is None and not args.config:
        parser.print_usage(sys.stderr)
        print("cychom: a task is required (--task, subcommand, or config)",
              file=sys.stderr)
        return 2
    try:
        cfg = build_config(args)
        report = run_job(cfg, args.out, use_cache=not args.no_cache)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"cychom: config error: {problem}", file=sys.stderr)
        return 2
    except ResourceCapExceeded as exc:
        print(f"cychom: resource cap exceeded: {exc}", file=sys.stderr)
        return 2
    except algebra.UnsupportedRealizationError as exc:
        print(f"cychom: {exc}", file=sys.stderr)
        return 2
    print(f"cychom: task={report.task} job={report.job_id} "
          f"records={len(report.records)} violations={report.violations} "
          f"cache_hit={report.cache_hit} wall={report.wall_time:.2f}s")
    return 0 if report.violations == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
