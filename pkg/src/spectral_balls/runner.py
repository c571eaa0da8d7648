"""Run configurations: parse, execute checks concurrently, assemble reports.

A configuration names fixtures (inline or from fixture files), oracle
settings, one seed and a list of checks ``{id, check, params}``. Region
parameters are either fixture names or inline region documents.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import verifier
from ._workers import worker_count
from .errors import SchemaError, SpectralBallsError
from .geometry.serialization import SCHEMA_VERSION, _build, load_fixture_file, load_schema, to_dict
from .geometry.serialization import validate as validate_region
from .oracle import EigenOracle, FDSettings, MCSettings
from .verdict import Status, Verdict

REGION_PARAMS = {"B1", "B2", "omega", "omega1", "omega2", "A", "B", "C", "region"}

# check type -> (required params, optional params)
CHECK_TYPES = {
    "subadditivity": ({"B1", "B2"}, {"oracle", "mc"}),
    "lower_bound": ({"B1", "B2"}, set()),
    "monotonicity": ({"omega1", "omega2"}, {"sample_count"}),
    "homogeneity": ({"omega", "c"}, set()),
    "lieb_scan": ({"B1", "B2", "offsets"}, set()),
    "symmetry": ({"B1", "B2", "y"}, {"t", "mc"}),
    "logconcavity": ({"A", "B", "C", "x", "y", "lam", "t"}, {"mc", "sample_count"}),
    "kac": ({"region"}, {"mc", "rel_tol"}),
    "sqrt2_inclusion": ({"B1", "B2"}, {"sample_count", "direction_count"}),
    "proof_chain": ({"B1", "B2"}, {"direction_count"}),
    "theorem_suite": (set(), {"n_pairs", "seed", "cls"}),
}


def _mc_bearing(check: str, params: dict) -> bool:
    if check in ("logconcavity", "kac"):
        return True
    if check == "symmetry":
        return params.get("mc", True) is not False
    if check == "subadditivity":
        return params.get("oracle", "FD") in ("MC", "both")
    return False


@dataclass
class CheckEntry:
    id: str
    check: str
    params: dict


@dataclass
class RunConfig:
    checks: list
    fixtures: dict = field(default_factory=dict)  # name -> region document
    seed: Optional[int] = None
    fd: FDSettings = FDSettings()
    mc: MCSettings = MCSettings()
    out: Optional[str] = None

    def canonical(self) -> dict:
        """Everything that determines the results, in a fixed layout."""
        return {"schema_version": SCHEMA_VERSION, "seed": self.seed,
                "fd": self.fd.to_dict(), "mc": {k: v for k, v in self.mc.to_dict().items() if k != "seed"},
                "fixtures": self.fixtures,
                "checks": [{"id": c.id, "check": c.check, "params": c.params} for c in self.checks]}

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    def run_dir_name(self) -> str:
        return f"{self.seed if self.seed is not None else 'noseed'}-{self.config_hash()}"

    def select(self, ids) -> "RunConfig":
        known = {c.id for c in self.checks}
        missing = [i for i in ids if i not in known]
        if missing:
            raise SchemaError(f"unknown check ids: {', '.join(missing)}")
        return replace(self, checks=[c for c in self.checks if c.id in set(ids)])


def _fixture_docs(path) -> dict:
    load_fixture_file(path)  # validates
    with open(path) as fh:
        return json.load(fh)["fixtures"]


def parse_config(doc: dict, base_dir=None) -> RunConfig:
    """Validate a configuration document and resolve its fixtures.

    Rejects unknown check types, missing or unexpected parameters, duplicate
    ids, unresolved fixture names, and MC-bearing checks without a seed.
    """
    try:
        jsonschema.validate(doc, load_schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"invalid run configuration: {exc.message}") from exc
    fixtures = {}
    for rel in doc.get("fixture_files", []):
        path = Path(rel)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        fixtures.update(_fixture_docs(path))
    for name, region in doc.get("fixtures", {}).items():
        validate_region(region)
        fixtures[name] = region

    checks, seen = [], set()
    for item in doc["checks"]:
        cid, kind, params = item["id"], item["check"], dict(item.get("params", {}))
        if cid in seen:
            raise SchemaError(f"duplicate check id {cid!r}")
        seen.add(cid)
        required, optional = CHECK_TYPES[kind]
        missing = required - params.keys()
        extra = params.keys() - required - optional
        if missing or extra:
            raise SchemaError(f"check {cid!r}: missing {sorted(missing)}, unexpected {sorted(extra)}")
        for key in REGION_PARAMS & params.keys():
            ref = params[key]
            if isinstance(ref, str):
                if ref not in fixtures:
                    raise SchemaError(f"check {cid!r}: unknown fixture {ref!r}")
                params[key] = fixtures[ref]
            else:
                validate_region(ref)
        if _mc_bearing(kind, params) and doc.get("seed") is None:
            raise SchemaError(f"check {cid!r} uses Monte Carlo and needs a seed")
        checks.append(CheckEntry(cid, kind, params))

    fd = FDSettings(**doc.get("fd", {}))
    mc = MCSettings(**doc.get("mc", {}), seed=doc.get("seed") or 0)
    return RunConfig(checks, {k: fixtures[k] for k in sorted(fixtures)}, doc.get("seed"), fd, mc,
                     doc.get("out"))


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config(doc, Path(path).parent)


def bundled_suite() -> RunConfig:
    data = resources.files("spectral_balls.data")
    doc = json.loads(data.joinpath("suite.json").read_text())
    with resources.as_file(data) as base:
        return parse_config(doc, base)


# -- execution ---------------------------------------------------------------

def _mc_for(cfg: RunConfig, params: dict, **defaults) -> MCSettings:
    over = params.get("mc")
    over = over if isinstance(over, dict) else {}
    return replace(cfg.mc, **{**defaults, **over})


def _theorem_suite(params, fd):
    rows = verifier.run_theorem_suite(params.get("n_pairs", 20), params.get("seed", 0),
                                      params.get("cls", "mixed"), fd)
    counts = {s.value: 0 for s in Status}
    out = []
    for row in rows:
        final = row.get("refined", row["result"])
        counts[final.verdict.status.value] += 1
        out.append({"seed": row["seed"], "first_pass": row["result"].to_dict(),
                    "refined": row["refined"].to_dict() if "refined" in row else None})
    if counts["Violated"]:
        status = Status.VIOLATED
    elif counts["Inconclusive"]:
        status = Status.INCONCLUSIVE
    else:
        status = Status.HOLDS
    margins = [r.get("refined", r["result"]).verdict.margin for r in rows]
    v = Verdict(status, float(min(margins)), 0.0, "strict",
                provenance={"rule": "worst pair after one refinement", "counts": counts})
    return verifier.CheckResult("theorem_suite", v, details={"pairs": out})


def run_check(spec: CheckEntry, cfg: RunConfig, fd: EigenOracle) -> verifier.CheckResult:
    p = {k: (_build(v) if k in REGION_PARAMS else v) for k, v in spec.params.items()}
    kind = spec.check
    if kind in ("subadditivity", "lower_bound"):
        oracle = p.get("oracle", "FD")
        mc = _mc_for(cfg, p) if oracle != "FD" else None
        res = verifier.check_subadditivity(p["B1"], p["B2"], oracle, fd, mc)
        return verifier.lower_bound_result(res) if kind == "lower_bound" else res
    if kind == "monotonicity":
        return verifier.check_monotonicity(p["omega1"], p["omega2"], fd, p.get("sample_count", 2048),
                                           cfg.seed or 0)
    if kind == "homogeneity":
        return verifier.check_homogeneity(p["omega"], float(p["c"]), fd)
    if kind == "lieb_scan":
        return verifier.lieb_translation_scan(p["B1"], p["B2"], p["offsets"], fd)
    if kind == "symmetry":
        mc = _mc_for(cfg, p, dt=1e-3) if p.get("mc", True) is not False else None
        return verifier.check_symmetry(p["B1"], p["B2"], p["y"], fd, mc, p.get("t", 0.5))
    if kind == "logconcavity":
        return verifier.check_logconcavity(p["A"], p["B"], p["C"], np.asarray(p["x"], float),
                                           np.asarray(p["y"], float), p["lam"], p["t"],
                                           _mc_for(cfg, p, dt=1e-3), p.get("sample_count", 2048))
    if kind == "kac":
        return verifier.check_kac(p["region"], fd, _mc_for(cfg, p), p.get("rel_tol", 0.05))
    if kind == "sqrt2_inclusion":
        return verifier.check_sqrt2_inclusion(p["B1"], p["B2"], p.get("sample_count", 2048), cfg.seed or 0,
                                           p.get("direction_count", 720))
    if kind == "proof_chain":
        return verifier.check_proof_chain(p["B1"], p["B2"], fd, p.get("direction_count", 720))
    if kind == "theorem_suite":
        return _theorem_suite(p, fd)
    raise SchemaError(f"unknown check type {kind!r}")


def exit_code_for(results: dict, errors: dict) -> int:
    """3 on any check error, else 1 if a theorem-class check is Violated,
    else 2 if one is Inconclusive, else 0."""
    if errors:
        return 3
    statuses = [r.verdict.status for r in results.values() if r.theorem_class]
    if Status.VIOLATED in statuses:
        return 1
    if Status.INCONCLUSIVE in statuses:
        return 2
    return 0


@dataclass
class RunOutcome:
    report: dict
    results: dict
    errors: dict
    exit_code: int

    def report_json(self) -> str:
        return dumps_report(self.report)


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, load_schema("report.schema.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"report does not match schema: {exc.message}") from exc


def run(cfg: RunConfig, workers: Optional[int] = None) -> RunOutcome:
    """Execute all checks (concurrently when workers > 1) and merge by id."""
    workers = worker_count() if workers is None else workers
    fd = EigenOracle(cfg.fd)

    def job(spec):
        try:
            return spec.id, run_check(spec, cfg, fd), None
        except (SpectralBallsError, ValueError) as exc:
            return spec.id, None, f"{type(exc).__name__}: {exc}"

    if workers > 1 and len(cfg.checks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, cfg.checks))
    else:
        outcomes = [job(s) for s in cfg.checks]
    results = {cid: r for cid, r, _ in outcomes if r is not None}
    errors = {cid: e for cid, _, e in outcomes if e is not None}
    code = exit_code_for(results, errors)

    counts = {s.value: 0 for s in Status}
    for r in results.values():
        counts[r.verdict.status.value] += 1
    checks = {}
    for cid in sorted(results):
        entry = results[cid].to_dict()
        entry["attachments"] = {name: _attachment_path(cid, name) for name in sorted(results[cid].attachments)}
        checks[cid] = entry
    report = {
        "schema_version": SCHEMA_VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "settings": {"fd": cfg.fd.to_dict(), "mc": cfg.mc.to_dict()},
        "fixtures": cfg.fixtures,
        "checks": checks,
        "errors": {k: errors[k] for k in sorted(errors)},
        "summary": {"exit_code": code, "counts": counts},
    }
    validate_report(report)
    return RunOutcome(report, results, errors, code)


def _attachment_path(cid: str, name: str) -> str:
    safe = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in cid)
    return f"curves/{safe}.{name}.csv"


def write_run(outcome: RunOutcome, cfg: RunConfig, out_root) -> Path:
    """Write ``report.json`` and CSV attachments under ``<out_root>/<seed>-<hash>``."""
    run_dir = Path(out_root) / cfg.run_dir_name()
    run_dir.mkdir(parents=True, exist_ok=True)
    for cid, res in outcome.results.items():
        for name, curve in res.attachments.items():
            path = run_dir / _attachment_path(cid, name)
            path.parent.mkdir(parents=True, exist_ok=True)
            curve.to_csv(path)
    (run_dir / "report.json").write_text(outcome.report_json())
    return run_dir


def strip_timestamp(report_text: str) -> str:
    """Report text with the timestamp removed, for determinism comparisons."""
    doc = json.loads(report_text)
    doc.pop("timestamp", None)
    return dumps_report(doc)


