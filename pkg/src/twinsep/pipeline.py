"""One-pass sieve -> scan -> histogram -> fit pipeline and its report files.

Reported counts follow a :class:`Convention`: the published table lists
pi1 = pi(N) - 1 and counts (3, 5) among the twins, so a ``twins`` checkpoint
``k`` means the k-th twin of the standard enumeration and sits at analyzed
twin ``k - pi2_offset``. The separation statistics always start at (5, 7).
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import hl_model
from .decay_fit import FitOptions, SlopeFit, fit_constrained
from .errors import FitConvergenceError, InsufficientDataError, ModelDomainError
from .prime_sieve import DEFAULT_SEGMENT_SIZE, PrimeStream, SieveConfig, SieveStats
from .sep_stats import fmt_real, to_frequency_table, write_frequency_table
from .table1 import BY_N, BY_PI2
from .twin_scan import CheckpointSnapshot, CheckpointSpec, TwinScanner

log = logging.getLogger(__name__)

SUMMARY_HEADER = ["pi2", "slope", "stat_error", "pi1", "N"]
RAW_HEADER = ["kind", "pi1_raw", "pi1_adjusted", "pi2_analyzed", "pi2_standard",
              "discarded_singletons", "bins_used", "mean_separation"]


@dataclass(frozen=True)
class Convention:
    """How reported counts relate to scan counts.

    reported pi1 = pi(N) - pi1_offset; reported pi2 = analyzed twins + pi2_offset.
    """

    pi1_offset: int = 1
    pi2_offset: int = 1


@dataclass
class RunConfig:
    limit: int
    checkpoints: list[CheckpointSpec] = field(default_factory=list)
    output_dir: Path = Path("out")
    fit_options: FitOptions = field(default_factory=FitOptions)
    emit_raw_counts: bool = False
    segment_size: int = DEFAULT_SEGMENT_SIZE
    workers: int = 1
    convention: Convention = field(default_factory=Convention)
    verify_table1: bool = False
    external: Path | None = None
    record_timing: bool = False

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        if not self.checkpoints:
            self.checkpoints = [CheckpointSpec.at_limit(self.limit)]
        self.checkpoints = sorted(self.checkpoints)
        limits = [c.value for c in self.checkpoints if c.kind == "limit"]
        if limits and max(limits) > self.limit:
            raise ValueError(f"limit checkpoint {max(limits)} exceeds --limit {self.limit}")
        for kind in ("twins", "limit"):
            vals = [c.value for c in self.checkpoints if c.kind == kind]
            if len(set(vals)) != len(vals):
                raise ValueError(f"duplicate {kind} checkpoint")


@dataclass
class CheckpointRow:
    pi2: int | None
    slope: float | None
    stat_error: float | None
    pi1: int | None
    N: int | None
    status: str = "ok"
    spec: CheckpointSpec | None = None
    snapshot: CheckpointSnapshot | None = None
    fit: SlopeFit | None = None


@dataclass
class RunResult:
    rows: list[CheckpointRow]
    model: hl_model.ModelFit | None
    convention: Convention
    convention_report: dict
    sieve: SieveStats
    sieved_through: int
    warnings: list[str]
    external: "ExternalData | None" = None


def _scan_index(spec: CheckpointSpec, pi2_offset: int) -> CheckpointSpec | None:
    if spec.kind == "limit":
        return spec
    k = spec.value - pi2_offset
    return CheckpointSpec("twins", k) if k >= 1 else None


def _detect_convention(config: RunConfig, snaps: dict[CheckpointSpec, CheckpointSnapshot]):
    """Fit both offsets from the first checkpoint that appears in the table."""
    for spec in sorted(config.checkpoints, key=lambda c: (c.kind != "twins", c.value)):
        if spec.kind == "twins" and spec.value in BY_PI2:
            ref = BY_PI2[spec.value]
            for pi2_offset in (config.convention.pi2_offset, 1 - config.convention.pi2_offset):
                snap = snaps.get(_scan_index(spec, pi2_offset))
                if snap is not None and snap.n_effective == ref.N:
                    return Convention(snap.pi1_raw - ref.pi1, pi2_offset), spec, ref
        elif spec.kind == "limit" and spec.value in BY_N:
            ref = BY_N[spec.value]
            snap = snaps.get(spec)
            if snap is not None:
                return Convention(snap.pi1_raw - ref.pi1, ref.pi2 - snap.pi2_analyzed), spec, ref
    return None


def _fit_row(spec: CheckpointSpec, snap: CheckpointSnapshot, conv: Convention,
             opts: FitOptions) -> CheckpointRow:
    row = CheckpointRow(
        pi2=snap.pi2_analyzed + conv.pi2_offset, slope=None, stat_error=None,
        pi1=snap.pi1_raw - conv.pi1_offset, N=snap.n_effective, spec=spec, snapshot=snap,
    )
    try:
        fit = fit_constrained(to_frequency_table(snap.histogram), opts)
    except (InsufficientDataError, FitConvergenceError) as exc:
        row.status = f"fit_failed: {exc}"
        return row
    row.fit, row.slope, row.stat_error = fit, fit.m, fit.std_error
    return row


def execute(config: RunConfig) -> RunResult:
    """Run the single sieve pass and fit every checkpoint (no file output)."""
    warnings: list[str] = []
    offsets = [config.convention.pi2_offset]
    if config.verify_table1:
        offsets = sorted({0, 1, config.convention.pi2_offset})
    scan_specs = {
        s for spec in config.checkpoints for off in offsets
        if (s := _scan_index(spec, off)) is not None
    }
    scanner = TwinScanner(scan_specs)
    stream = PrimeStream(SieveConfig(config.limit, config.segment_size), workers=config.workers)
    max_limit_cp = max((c.value for c in scan_specs if c.kind == "limit"), default=0)

    sieved_through = 0
    for i, seg in enumerate(stream.segments()):
        scanner.feed(seg)
        sieved_through = min((i + 1) * config.segment_size - 1, config.limit)
        if not any(c.kind == "twins" for c in scanner.pending) and max_limit_cp <= sieved_through:
            break
    scanner.finish(sieved_through)
    snaps = {s.spec: s for s in scanner.snapshots}

    conv = config.convention
    report = {"source": "configured", "pi1_offset": conv.pi1_offset, "pi2_offset": conv.pi2_offset}
    if config.verify_table1:
        detected = _detect_convention(config, snaps)
        if detected is None:
            msg = "verify-table1: no checkpoint matches a published row; keeping configured convention"
            warnings.append(msg)
            report["verified"] = False
        else:
            conv, spec, ref = detected
            report = {
                "source": "detected",
                "pi1_offset": conv.pi1_offset,
                "pi2_offset": conv.pi2_offset,
                "at_checkpoint": f"{spec.kind}:{spec.value}",
                "published_row": ref._asdict(),
                "verified": True,
            }
            log.info("detected convention pi1 = pi(N) - %d, pi2 = analyzed + %d",
                     conv.pi1_offset, conv.pi2_offset)

    rows = []
    for spec in config.checkpoints:
        snap = snaps.get(_scan_index(spec, conv.pi2_offset))
        if snap is None:
            msg = f"checkpoint {spec.kind}:{spec.value} not reached within limit {config.limit}"
            warnings.append(msg)
            log.warning(msg)
            rows.append(CheckpointRow(None, None, None, None, None, "incomplete", spec))
            continue
        row = _fit_row(spec, snap, conv, config.fit_options)
        if row.status != "ok":
            warnings.append(f"checkpoint {spec.kind}:{spec.value}: {row.status}")
            log.warning("checkpoint %s:%s %s", spec.kind, spec.value, row.status)
        rows.append(row)
    rows.sort(key=lambda r: (r.N is None, r.N or 0, r.spec.kind, r.spec.value))

    if config.verify_table1:
        report["rows"] = _compare_table1(rows)

    model = None
    try:
        model = hl_model.fit_inverse_log(_model_points(rows))
    except ModelDomainError as exc:
        msg = f"slope model fit skipped: {exc}"
        warnings.append(msg)
        log.warning(msg)

    external = None
    if config.external is not None:
        external = ingest_external(config.external)
        warnings.extend(external.issues)

    return RunResult(rows, model, conv, report, stream.stats, sieved_through, warnings, external)


def _compare_table1(rows: list[CheckpointRow]) -> list[dict]:
    out = []
    for row in rows:
        ref = BY_PI2.get(row.pi2) if row.pi2 is not None else None
        if ref is None or row.slope is None:
            continue
        out.append({
            "pi2": row.pi2,
            "counts_match": (row.pi1, row.N) == (ref.pi1, ref.N),
            "slope": row.slope,
            "published_slope": ref.slope,
            "slope_delta": row.slope - ref.slope,
            "stat_error": row.stat_error,
            "published_stat_error": ref.stat_error,
        })
    return out


def _model_points(rows: list[CheckpointRow]) -> list[tuple[float, float, float]]:
    return [(math.log(r.pi1), r.slope, r.stat_error) for r in rows if r.status == "ok"]


# -- external published counts ------------------------------------------------


@dataclass(frozen=True)
class ExternalPoint:
    N: int
    pi1_adjusted: int
    pi2_adjusted: int
    x: float
    m0: float


@dataclass
class ExternalData:
    points: list[ExternalPoint]
    issues: list[str]


def _parse_int(text: str) -> int:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        val = float(text)
        if not val.is_integer():
            raise
        return int(val)


def ingest_external(path: Path | str) -> ExternalData:
    """Read ``N,pi1,pi2`` rows of standard published counts.

    Each row is shifted to the scan's convention (pi1 - 2 for the primes 2
    and 3, pi2 - 1 for the pair (3, 5)) before computing m0. Bad rows are
    reported by line number and skipped.
    """
    points: list[ExternalPoint] = []
    issues: list[str] = []
    last_n = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            if fields == ["N", "pi1", "pi2"]:
                continue
            try:
                if len(fields) != 3:
                    raise ValueError(f"expected 3 fields, got {len(fields)}")
                n, pi1, pi2 = (_parse_int(f) for f in fields)
            except ValueError as exc:
                issues.append(f"{path}:{lineno}: malformed row {line!r} ({exc})")
                continue
            if last_n is not None and n <= last_n:
                issues.append(f"{path}:{lineno}: N={n} not increasing, row skipped")
                continue
            last_n = n
            pi1_adj, pi2_adj = pi1 - 2, pi2 - 1
            if pi2_adj < 1 or pi1_adj <= 2 * pi2_adj:
                issues.append(f"{path}:{lineno}: domain-invalid counts pi1={pi1}, pi2={pi2}")
                continue
            points.append(ExternalPoint(n, pi1_adj, pi2_adj, math.log(pi1_adj),
                                        hl_model.m0(pi1_adj, pi2_adj)))
    if not points:
        issues.append(f"{path}: no usable rows")
    for msg in issues:
        log.warning(msg)
    return ExternalData(points, issues)


# -- report files ---------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return fmt_real(v)
    return str(v)


def _write_csv(path: Path, header: list[str], rows, comments: list[str] = ()) -> None:
    with open(path, "w", newline="") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(v) for v in r])


def write_reports(config: RunConfig, result: RunResult, wall_time: float | None = None) -> None:
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)

    header = SUMMARY_HEADER + (RAW_HEADER if config.emit_raw_counts else []) + ["status"]
    table = []
    for r in result.rows:
        line = [r.pi2, r.slope, r.stat_error, r.pi1, r.N]
        if config.emit_raw_counts:
            sn = r.snapshot
            line += [r.spec.kind] + ([sn.pi1_raw, sn.pi1_adjusted, sn.pi2_analyzed, sn.pi2_standard,
                                      sn.discarded_singletons] if sn else [None] * 5)
            line += [r.fit.bins_used, r.fit.mean_separation] if r.fit else [None, None]
        table.append(line + [r.status])
    _write_csv(out / "summary.csv", header, table)

    for r in result.rows:
        if r.snapshot is None or r.snapshot.histogram.total_events < 2:
            continue
        with open(out / f"hist_{r.N}.csv", "w", newline="") as fh:
            write_frequency_table(to_frequency_table(r.snapshot.histogram), fh,
                                  r.slope if r.fit else None)

    model = result.model
    comments = ([f"C={fmt_real(model.C)}", f"C_err={fmt_real(model.C_err)}",
                 f"points_used={model.points_used}"] if model else
                ["model fit skipped: fewer than 2 fitted checkpoints"])
    pts = _model_points(result.rows)
    _write_csv(out / "slope_model.csv", ["x", "slope", "stat_error", "model"],
               [(x, m, e, model(x) if model else None) for x, m, e in pts], comments)

    ref_rows = []
    for r in result.rows:
        if r.snapshot is None:
            continue
        sn = r.snapshot
        try:
            est = hl_model.reference_estimates(sn.n_effective, sn.pi1_adjusted, sn.pi2_analyzed)
            lnln, bare = hl_model.s0_tilde_from_pi1(r.pi1)
        except ModelDomainError:
            continue
        ref_rows.append([sn.n_effective, sn.pi1_adjusted, sn.pi2_analyzed, est.li1, est.li2,
                         est.pi1_simple, est.pi2_simple, est.s0, est.m0, est.s0_tilde,
                         lnln, bare, hl_model.m_tilde(r.pi1), r.slope])
    _write_csv(out / "reference.csv",
               ["N", "pi1_adjusted", "pi2_analyzed", "li1", "li2", "pi1_simple", "pi2_simple",
                "s0", "m0", "s0_tilde", "s0_tilde_lnln", "s0_tilde_bare", "m_tilde", "slope"],
               ref_rows)

    if result.external is not None:
        _write_csv(out / "figure4.csv", ["x", "m0", "model"],
                   [(p.x, p.m0, model(p.x) if model else None) for p in result.external.points])

    fo = config.fit_options
    meta = {
        "limit": config.limit,
        "segment_size": config.segment_size,
        "checkpoints": [f"{c.kind}:{c.value}" for c in config.checkpoints],
        "fit_options": {"weighting": fo.weighting.value, "tolerance": fo.tolerance,
                        "max_iterations": fo.max_iterations},
        "convention": result.convention_report,
        "sieve": {**asdict(result.sieve), "sieved_through": result.sieved_through},
        "model": asdict(model) if model else None,
        "external": str(config.external) if config.external else None,
        "warnings": result.warnings,
    }
    if wall_time is not None:
        meta["wall_time_s"] = wall_time
    with open(out / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(config: RunConfig) -> RunResult:
    """Execute the pipeline and write every report file into ``config.output_dir``."""
    config.output_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    result = execute(config)
    wall = time.perf_counter() - t0
    log.info("run finished in %.2f s (sieved through %d)", wall, result.sieved_through)
    write_reports(config, result, wall if config.record_timing else None)
    return result
