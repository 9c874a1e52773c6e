#!/usr/bin/env python3
"""
Process Variant Fingerprint CLI

Runs the full pipeline on an event log: split it into two variants, encode
traces as Haar wavelet coefficients, select the events or edges on which a
classifier beats the no-information baseline, and write annotated
directly-follows graphs for both variants.

Subcommands:
- analyze: full pipeline, reports and fingerprints
- encode: dump the augmented design matrix
- describe: descriptive statistics of both variants
- synth: generate a synthetic log with planted differences

Exit codes: 0 differences found (or success), 2 no differences found, 1 error.

Usage:
    variant-fingerprint analyze --input log.xes --split-attr amount \\
        --split-rule ge:50,lt:50 --out results
    variant-fingerprint synth --spec plant.json --out synthetic
"""

import argparse
import logging
import os
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Literal

import psutil
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from scipy import sparse

# Add project root to path so the script also runs without installation
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.analysis.baseline import edge_frequency_baseline  # noqa: E402
from src.analysis.classify import ClassifierConfig  # noqa: E402
from src.analysis.encoding import (  # noqa: E402
    FeatureKind,
    build_augmented,
    dump_design_csv,
)
from src.analysis.fingerprint import (  # noqa: E402
    FingerprintFormat,
    build_fingerprints,
    emit,
)
from src.analysis.selection import (  # noqa: E402
    SelectionConfig,
    build_report,
    discriminatory_units,
    run_selection,
    selection_summary,
)
from src.config import ClassifierSettings, LoggingSettings, get_settings  # noqa: E402
from src.errors import ConfigurationError, FingerprintError  # noqa: E402
from src.models.events import EventLog, VariantSplit  # noqa: E402
from src.models.reports import (  # noqa: E402
    BaselineRecord,
    CandidateRecord,
    DurationRecord,
    RunManifest,
    VariantSummaryReport,
)
from src.models.synth import PlantSpec  # noqa: E402
from src.parsers.csv_log import CsvColumnMapping, parse_csv, write_csv  # noqa: E402
from src.parsers.variants import (  # noqa: E402
    parse_split_rule,
    split_variants,
    summarize,
)
from src.parsers.xes import parse_xes  # noqa: E402
from src.synth.generator import generate  # noqa: E402
from src.utils.log_config import FingerprintLogger  # noqa: E402
from src.utils.serialization import (  # noqa: E402
    file_sha256,
    write_bytes,
    write_json,
    write_records_csv,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_DIFFERENCES = 2

SELECTION_COLUMNS = [
    "unit",
    "gamma1",
    "gamma2",
    "baseline_f1",
    "weighted_f1",
    "p_value",
    "p_value_display",
    "q_value",
    "discriminatory",
    "exclusive_to",
    "n_instances1",
    "n_instances2",
    "dataset_gamma1",
    "dataset_gamma2",
    "k_folds_used",
    "skipped_reason",
]

DURATION_COLUMNS = [
    "edge",
    "mean1_days",
    "mean2_days",
    "p_value",
    "p_value_display",
    "n1",
    "n2",
    "dur_discriminatory",
    "skipped_reason",
]


class RunConfig(BaseModel):
    """Validated configuration of one analyze / encode / describe run."""

    input_path: Path
    input_format: Literal["xes", "csv"]
    csv_mapping: CsvColumnMapping = Field(default_factory=CsvColumnMapping)
    split_attribute: str = Field(..., min_length=1)
    split_rule: str
    feature_kind: FeatureKind = FeatureKind.EDGE
    alpha: float = Field(default=0.05, gt=0, lt=1)
    k_folds: int = Field(default=10, ge=2)
    min_support: int = Field(default=10, ge=2)
    classifier: ClassifierSettings = Field(default_factory=ClassifierSettings)
    seed: int = 42
    threads: int = Field(default=1, ge=1)
    output_dir: Path
    baseline: bool = False
    fdr: bool = False

    @field_validator("split_rule")
    @classmethod
    def validate_split_rule(cls, v: str) -> str:
        """Reject malformed rules before any work is done."""
        try:
            parse_split_rule(v)
        except ConfigurationError as e:
            raise ValueError(str(e))
        return v

    @model_validator(mode="after")
    def validate_paths(self) -> "RunConfig":
        if not self.input_path.is_file():
            raise ValueError(f"Input file not found: {self.input_path}")
        self.output_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(self.output_dir, os.W_OK):
            raise ValueError(f"Output directory is not writable: {self.output_dir}")
        return self

    def selection_config(self) -> SelectionConfig:
        return SelectionConfig(
            alpha=self.alpha,
            k_folds=self.k_folds,
            min_instances_per_class=self.min_support,
            feature_kind=self.feature_kind,
            classifier=ClassifierConfig.from_settings(self.classifier, self.seed),
            seed=self.seed,
            fdr=self.fdr,
            threads=self.threads,
        )


def infer_format(path: Path) -> Literal["xes", "csv"]:
    """Guess the log format from the file name."""
    name = path.name.lower()
    if name.endswith((".xes", ".xes.gz")):
        return "xes"
    if name.endswith(".csv"):
        return "csv"
    raise ConfigurationError(f"Cannot infer log format of '{path.name}'; use --format")


def resident_memory_mb() -> float:
    """Resident set size of this process."""
    return psutil.Process().memory_info().rss / (1024 * 1024)


class AnalysisMetrics:
    """Timing and counting of one run."""

    def __init__(self):
        self.start_time: float = 0.0
        self.end_time: float = 0.0
        self.stage_durations: dict[str, float] = {}
        self.traces: dict[str, int] = {}
        self.candidates: dict[str, int] = {}
        self.error_count: int = 0
        self.errors_by_type: dict[str, int] = {}
        self.peak_memory_mb: float = 0.0

    def start_timing(self):
        """Start timing the run."""
        self.start_time = time.time()

    def end_timing(self):
        """End timing the run."""
        self.end_time = time.time()

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        """Record the wall time of a pipeline stage."""
        started = time.perf_counter()
        try:
            yield
        finally:
            self.stage_durations[name] = time.perf_counter() - started
            self.peak_memory_mb = max(self.peak_memory_mb, resident_memory_mb())

    def add_error(self, error_type: str):
        """Add an error to the metrics."""
        self.error_count += 1
        self.errors_by_type[error_type] = self.errors_by_type.get(error_type, 0) + 1

    def get_summary(self) -> dict:
        """Get a summary of metrics."""
        duration = (
            self.end_time - self.start_time if self.end_time > self.start_time else 0
        )
        return {
            "duration_seconds": duration,
            "stage_seconds": dict(self.stage_durations),
            "traces": dict(self.traces),
            "candidates": dict(self.candidates),
            "error_count": self.error_count,
            "errors_by_type": dict(self.errors_by_type),
            "peak_memory_mb": self.peak_memory_mb,
        }


class VariantFingerprintRunner:
    """Runs the analyze, encode and describe pipelines for one RunConfig."""

    def __init__(self, config: RunConfig, logger: logging.Logger):
        self.config = config
        self.logger = logger
        self.metrics = AnalysisMetrics()
        self.outputs: list[Path] = []

    def _output(self, name: str) -> Path:
        path = self.config.output_dir / name
        self.outputs.append(path)
        return path

    def load_log(self) -> EventLog:
        self.logger.info(
            f"📂 Reading {self.config.input_format.upper()} log "
            f"{self.config.input_path}"
        )
        with self.metrics.stage("parse"), open(self.config.input_path, "rb") as handle:
            if self.config.input_format == "xes":
                log = parse_xes(handle)
            else:
                log = parse_csv(handle, self.config.csv_mapping)
        self.metrics.traces["input"] = len(log)
        return log

    def load_split(self) -> VariantSplit:
        log = self.load_log()
        with self.metrics.stage("split"):
            rule = parse_split_rule(self.config.split_rule)
            split = split_variants(log, self.config.split_attribute, rule)
        self.metrics.traces.update(
            variant1=len(split.variant1),
            variant2=len(split.variant2),
            dropped=split.dropped,
        )
        return split

    def _summary_report(self, split: VariantSplit) -> VariantSummaryReport:
        first, _, second = split.predicate_description.partition(" | ")
        return VariantSummaryReport(
            predicate=split.predicate_description,
            dropped=split.dropped,
            missing_attribute=split.missing_attribute,
            variants=[
                summarize(split.variant1, first),
                summarize(split.variant2, second),
            ],
        )

    def describe(self) -> int:
        split = self.load_split()
        report = self._summary_report(split)
        for summary in report.variants:
            self.logger.info(
                f"📊 {summary.label}: {summary.cases:,} cases, "
                f"{summary.distinct_sequences:,} distinct sequences, "
                f"trace length {summary.min_trace_len}-{summary.max_trace_len} "
                f"(avg {summary.avg_trace_len:.2f}), {summary.events:,} events, "
                f"{summary.distinct_activities} activities"
            )
        write_json(self._output("variant_summary.json"), report)
        return EXIT_OK

    def encode(self) -> int:
        split = self.load_split()
        with self.metrics.stage("encode"):
            aug, units = build_augmented(split, self.config.feature_kind)
        self.metrics.candidates["total"] = len(units)
        float_format = get_settings().output.float_format
        write_bytes(
            self._output("design_matrix.csv"), dump_design_csv(aug, float_format)
        )
        sparse.save_npz(self._output("design_matrix.npz"), aug.to_sparse())
        self.logger.info(
            f"💾 Wrote {len(aug):,} × {len(aug.layout):,} design matrix "
            f"to {self.config.output_dir}"
        )
        return EXIT_OK

    def analyze(self) -> int:
        split = self.load_split()
        selection = self.config.selection_config()
        float_format = get_settings().output.float_format

        with self.metrics.stage("encode"):
            aug, _ = build_augmented(split, selection.feature_kind)
        with self.metrics.stage("selection"):
            results = run_selection(split, selection, aug=aug)
        self.metrics.candidates = selection_summary(results)
        flagged = discriminatory_units(results)

        with self.metrics.stage("fingerprint"):
            fp1, fp2, durations = build_fingerprints(
                split.variant1, split.variant2, flagged, selection.alpha
            )

        report = build_report(results, selection)
        write_records_csv(
            self._output("selection_report.csv"),
            report.candidates,
            CandidateRecord,
            SELECTION_COLUMNS,
            float_format,
        )
        write_json(self._output("selection_report.json"), report)
        write_records_csv(
            self._output("durations.csv"),
            [comparison.to_record() for comparison in durations],
            DurationRecord,
            DURATION_COLUMNS,
            float_format,
        )
        for fp in (fp1, fp2):
            for fmt in FingerprintFormat:
                write_bytes(
                    self._output(f"fingerprint_variant{fp.variant_id}.{fmt.value}"),
                    emit(fp, fmt),
                )

        if self.config.baseline:
            with self.metrics.stage("baseline"):
                rows = edge_frequency_baseline(split, selection.alpha)
            write_records_csv(
                self._output("baseline_report.csv"),
                [row.to_record() for row in rows],
                BaselineRecord,
                float_format=float_format,
            )

        self._write_manifest("analyze", split)
        if not flagged:
            self.logger.warning("⚠️  no differences found: fingerprints are empty")
            return EXIT_NO_DIFFERENCES
        return EXIT_OK

    def _write_manifest(self, command: str, split: VariantSplit):
        self.metrics.end_timing()
        manifest_path = self._output("run_manifest.json")
        manifest = RunManifest(
            tool_version=get_settings().version,
            command=command,
            seed=self.config.seed,
            parameters=self.config.model_dump(mode="json"),
            input={
                "path": str(self.config.input_path),
                "format": self.config.input_format,
                "sha256": file_sha256(self.config.input_path),
            },
            variants=self._summary_report(split).variants,
            metrics=self.metrics.get_summary(),
            outputs=sorted(path.name for path in self.outputs),
        )
        write_json(manifest_path, manifest)

    def run(self, command: str) -> int:
        """Run one pipeline, mapping failures to exit code 1."""
        self.metrics.start_timing()
        self.logger.info("🚀 Starting variant fingerprint run")
        self.logger.info(f"⚙️  Configuration: {self._log_config(command)}")
        try:
            code = getattr(self, command)()
        except FingerprintError as e:
            self.metrics.add_error(type(e).__name__)
            self.logger.error(f"❌ {e}")
            return EXIT_ERROR
        except Exception as e:
            self.metrics.add_error("unexpected_error")
            self.logger.error(f"💥 Unexpected error: {e}", exc_info=True)
            return EXIT_ERROR
        self.metrics.end_timing()
        self._log_final_summary()
        return code

    def _log_config(self, command: str) -> str:
        return (
            f"command={command}, "
            f"input={self.config.input_path}, "
            f"split={self.config.split_attribute}:{self.config.split_rule}, "
            f"features={self.config.feature_kind.value}, "
            f"alpha={self.config.alpha}, k={self.config.k_folds}, "
            f"seed={self.config.seed}, threads={self.config.threads}"
        )

    def _log_final_summary(self):
        summary = self.metrics.get_summary()
        self.logger.info("=" * 80)
        self.logger.info("🎉 Variant fingerprint run complete!")
        self.logger.info("=" * 80)
        self.logger.info(f"   • Duration: {summary['duration_seconds']:.2f} seconds")
        for stage, seconds in summary["stage_seconds"].items():
            self.logger.info(f"   • {stage}: {seconds:.2f} s")
        for name, count in summary["traces"].items():
            self.logger.info(f"   • Traces {name}: {count:,}")
        for name, count in summary["candidates"].items():
            self.logger.info(f"   • Candidates {name}: {count:,}")
        self.logger.info(f"   • Peak memory: {summary['peak_memory_mb']:.1f} MB")
        self.logger.info(f"   • Outputs written to {self.config.output_dir}")


def run_synth(spec_path: Path, output_dir: Path, seed: int | None, logger) -> int:
    """Generate a synthetic log and its ground truth from a JSON spec."""
    try:
        spec = PlantSpec.model_validate_json(spec_path.read_bytes())
    except OSError as e:
        logger.error(f"❌ Cannot read spec: {e}")
        return EXIT_ERROR
    except ValidationError as e:
        logger.error(f"❌ Invalid spec {spec_path}: {e}")
        return EXIT_ERROR
    if seed is not None:
        spec = spec.model_copy(update={"seed": seed})

    logs = generate(spec)
    log_path = write_bytes(output_dir / "synthetic_log.csv", write_csv(logs.merged()))
    truth_path = write_json(output_dir / "ground_truth.json", logs.truth)
    logger.info(f"💾 Wrote {log_path} and {truth_path}")
    logger.info(
        f"   Analyze with --split-attr {spec.variant_attribute} --split-rule eq:1,eq:2"
    )
    return EXIT_OK


def create_argument_parser() -> argparse.ArgumentParser:
    """Create command line argument parser."""
    settings = get_settings()

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out",
        default=settings.output.directory,
        help=f"Output directory (default: {settings.output.directory})",
    )
    common.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"Random seed (default: {settings.seed})",
    )
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=settings.logging.level,
        help=f"Logging level (default: {settings.logging.level})",
    )
    common.add_argument(
        "--log-format",
        choices=["simple", "structured", "json"],
        default=settings.logging.format,
        help=f"Log format (default: {settings.logging.format})",
    )
    common.add_argument(
        "--log-file",
        default=settings.logging.file_path,
        help="Log file path (default: console only)",
    )

    log_input = argparse.ArgumentParser(add_help=False)
    log_input.add_argument("--input", required=True, help="Event log (XES or CSV)")
    log_input.add_argument(
        "--format",
        choices=["xes", "csv"],
        default=None,
        help="Log format (default: inferred from the file name)",
    )
    log_input.add_argument("--case-col", default="case_id", help="CSV case id column")
    log_input.add_argument(
        "--activity-col", default="activity", help="CSV activity column"
    )
    log_input.add_argument(
        "--time-col", default="timestamp", help="CSV timestamp column"
    )
    log_input.add_argument(
        "--time-format",
        default=None,
        help="CSV timestamp format, strftime style (default: ISO-8601)",
    )
    log_input.add_argument(
        "--split-attr", required=True, help="Attribute defining the variants"
    )
    log_input.add_argument(
        "--split-rule",
        required=True,
        help='Two predicates, e.g. "ge:50,lt:50" or "eq:A,eq:B"',
    )
    log_input.add_argument(
        "--features",
        choices=["events", "edges"],
        default=settings.selection.features,
        help=f"Candidate feature kind (default: {settings.selection.features})",
    )

    parser = argparse.ArgumentParser(
        prog="variant-fingerprint",
        description="Mutual fingerprints of two process variants",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Full analysis of a CSV log split on a case attribute
    variant-fingerprint analyze --input log.csv --split-attr amount \\
        --split-rule ge:50,lt:50 --out results

    # Event features, stricter alpha, FDR control and the frequency baseline
    variant-fingerprint analyze --input log.xes.gz --split-attr age \\
        --split-rule ge:70,le:35 --features events --alpha 0.01 --fdr --baseline

    # Inspect the design matrix
    variant-fingerprint encode --input toy.csv --split-attr group --split-rule eq:A,eq:B

    # Generate a synthetic log, then analyze it
    variant-fingerprint synth --spec plant.json --out synthetic
        """,
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser(
        "analyze", parents=[common, log_input], help="Run the full pipeline"
    )
    analyze.add_argument(
        "--alpha",
        type=float,
        default=settings.selection.alpha,
        help=f"Significance level (default: {settings.selection.alpha})",
    )
    analyze.add_argument(
        "--folds",
        type=int,
        default=settings.selection.k_folds,
        help=f"Cross-validation folds (default: {settings.selection.k_folds})",
    )
    analyze.add_argument(
        "--min-support",
        type=int,
        default=settings.selection.min_instances_per_class,
        help="Minimum unit-containing traces per variant "
        f"(default: {settings.selection.min_instances_per_class})",
    )
    analyze.add_argument(
        "--threads",
        type=int,
        default=settings.threads,
        help="Worker threads, 0 for all cores (default: %(default)s)",
    )
    analyze.add_argument(
        "--baseline",
        action="store_true",
        help="Also write the edge-frequency baseline report",
    )
    analyze.add_argument(
        "--fdr",
        action="store_true",
        default=settings.selection.fdr,
        help="Apply Benjamini-Hochberg control across candidates",
    )

    subparsers.add_parser(
        "encode", parents=[common, log_input], help="Dump the design matrix"
    )
    subparsers.add_parser(
        "describe", parents=[common, log_input], help="Describe both variants"
    )

    synth = subparsers.add_parser(
        "synth", parents=[common], help="Generate a synthetic log"
    )
    synth.add_argument("--spec", required=True, help="Plant specification JSON")

    return parser


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge settings and command line flags into a validated RunConfig."""
    settings = get_settings()
    input_path = Path(args.input)
    threads = getattr(args, "threads", settings.threads)
    return RunConfig(
        input_path=input_path,
        input_format=args.format or infer_format(input_path),
        csv_mapping=CsvColumnMapping(
            case_column=args.case_col,
            activity_column=args.activity_col,
            timestamp_column=args.time_col,
            timestamp_format=args.time_format,
        ),
        split_attribute=args.split_attr,
        split_rule=args.split_rule,
        feature_kind=FeatureKind.from_option(args.features),
        alpha=getattr(args, "alpha", settings.selection.alpha),
        k_folds=getattr(args, "folds", settings.selection.k_folds),
        min_support=getattr(
            args, "min_support", settings.selection.min_instances_per_class
        ),
        classifier=settings.classifier,
        seed=settings.seed if args.seed is None else args.seed,
        threads=threads or (os.cpu_count() or 1),
        output_dir=Path(args.out),
        baseline=getattr(args, "baseline", False),
        fdr=getattr(args, "fdr", settings.selection.fdr),
    )


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the script."""
    parser = create_argument_parser()
    args = parser.parse_args(argv)

    try:
        log_settings = LoggingSettings(
            level=args.log_level,
            format=args.log_format,
            file_path=args.log_file,
            max_file_size=get_settings().logging.max_file_size,
            backup_count=get_settings().logging.backup_count,
        )
    except ValidationError as e:
        print(f"❌ Invalid logging options: {e}", file=sys.stderr)
        return EXIT_ERROR
    logger = FingerprintLogger(log_settings).get_logger()

    try:
        if args.command == "synth":
            return run_synth(Path(args.spec), Path(args.out), args.seed, logger)

        try:
            config = build_run_config(args)
        except (ValidationError, ConfigurationError) as e:
            logger.error(f"❌ Invalid configuration: {e}")
            return EXIT_ERROR
        return VariantFingerprintRunner(config, logger).run(args.command)

    except KeyboardInterrupt:
        logger.error("🛑 Run cancelled by user")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
