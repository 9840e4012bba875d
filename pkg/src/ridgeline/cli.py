"""``ridgeline`` command line: synth -> barcodes -> features -> evaluate -> report.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import PipelineConfig, load_config
from .dataset import atomic_write, load_manifest
from .errors import ConfigError, DataError, RidgelineError
from .learning import GROUPS, run_experiment
from .learning.reports import (
    class_correlation_csv,
    confusion_csv,
    selected_features_csv,
    summary_csv,
    summary_text,
    trace_csv,
)
from .synthetic import generate_synthetic

log = logging.getLogger("ridgeline")

REPORT_DIR = "reports"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--dataset", type=Path, help="manifest CSV (default: <out>/data/manifest.csv)")
    common.add_argument("--seed", type=int, help="synthesis seed")
    common.add_argument("--workers", type=int, help="worker processes (fallback: RIDGELINE_WORKERS)")
    common.add_argument("--force", action="store_true", help="recompute cached artifacts")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="ridgeline", description="Persistent-homology fingerprint classification pipeline.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("synth", parents=[common], help="generate a seeded synthetic dataset")
    sub.add_parser("barcodes", parents=[common], help="compute and cache the 24 barcodes per print")
    sub.add_parser("features", parents=[common], help="build the 552-column feature table")
    ev = sub.add_parser("evaluate", parents=[common], help="prune, eliminate and report LOOCV accuracy")
    ev.add_argument("--group", action="append",
                    help=f"feature group, repeatable or comma separated ({', '.join(GROUPS)})")
    sub.add_parser("report", parents=[common], help="print the summary of the last evaluation")
    return parser


def resolve_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    groups = None
    if getattr(args, "group", None):
        groups = tuple(g.strip() for item in args.group for g in item.split(",") if g.strip())
    return cfg.override(out=args.out, dataset=args.dataset, seed=args.seed, workers=args.workers, groups=groups)


def cmd_synth(cfg: PipelineConfig, force: bool) -> int:
    target = cfg.out / "data"
    if (target / "manifest.csv").exists() and not force:
        log.info("synthetic dataset already present in %s (use --force to regenerate)", target)
        manifest = load_manifest(target / "manifest.csv")
    else:
        manifest = generate_synthetic(cfg.synth_params(), target)
    counts = {}
    for r in manifest.records:
        counts[r.label.token] = counts.get(r.label.token, 0) + 1
    print(f"{len(manifest)} prints in {target / 'manifest.csv'} "
          f"(A={counts.get('A', 0)}, L={counts.get('L', 0)}, W={counts.get('W', 0)})")
    return 0


def _manifest(cfg: PipelineConfig):
    path = cfg.manifest_path
    if not path.exists():
        hint = "run 'ridgeline synth' first" if cfg.dataset is None else "check the dataset path"
        raise DataError(f"manifest {path} not found; {hint}")
    manifest = load_manifest(path)
    if not manifest.records:
        raise DataError(f"manifest {path} lists no prints")
    return manifest


def cmd_barcodes(cfg: PipelineConfig, force: bool) -> int:
    manifest = _manifest(cfg)
    stats = pipeline.cache_barcodes(manifest, cfg.out, force=force, workers=cfg.resolved_workers(),
                                    metrics=cfg.metrics, max_scale=cfg.max_scale)
    print(f"barcodes: {len(stats.computed)} computed, {len(stats.skipped)} cached, {len(stats.failed)} failed")
    if stats.failed and not (stats.computed or stats.skipped):
        raise DataError("every print failed; see the log for details")
    return 0


def cmd_features(cfg: PipelineConfig, force: bool) -> int:
    manifest = _manifest(cfg)
    path = pipeline.cache_features(manifest, cfg.out, force=force, metrics=cfg.metrics)
    fm, _ = pipeline.load_features(path)
    print(f"features: {fm.shape[0]} prints x {fm.shape[1]} columns in {path}")
    return 0


def write_reports(reports, out_dir: Path) -> None:
    """Write per-group CSV/JSON reports and the cross-group summary."""
    for rep in reports:
        gdir = out_dir / rep.group
        atomic_write(gdir / "trace.csv", trace_csv(rep.trace))
        atomic_write(gdir / "confusion_largest.csv", confusion_csv(rep.peak_confusions[0]))
        atomic_write(gdir / "confusion_smallest.csv", confusion_csv(rep.peak_confusions[-1]))
        atomic_write(gdir / "selected_features.csv", selected_features_csv(rep.trace.peak_sets[-1]))
        atomic_write(gdir / "class_correlations.csv", class_correlation_csv(rep.class_correlations))
        atomic_write(gdir / "report.json", json.dumps(
            {**rep.to_dict(), "class_correlations": rep.class_correlations}, indent=2) + "\n")
    atomic_write(out_dir / "summary.csv", summary_csv(reports))
    atomic_write(out_dir / "summary.txt", summary_text(reports) + "\n")
    atomic_write(out_dir / "summary.json", json.dumps([r.to_dict() for r in reports], indent=2) + "\n")


def cmd_evaluate(cfg: PipelineConfig, force: bool) -> int:
    path = cfg.out / "features.csv"
    if not path.exists():
        raise DataError(f"feature table {path} not found; run 'ridgeline features' first")
    fm, labels = pipeline.load_features(path)
    reports = []
    for group in cfg.groups:
        log.info("evaluating group %s", group)
        try:
            reports.append(run_experiment(fm, labels, group, window=cfg.window, normalization=cfg.normalization,
                                          ridge=cfg.ridge, workers=cfg.resolved_workers()))
        except ValueError as exc:
            raise DataError(f"group {group}: {exc}") from exc
    write_reports(reports, cfg.out / REPORT_DIR)
    print(summary_text(reports))
    return 0


def cmd_report(cfg: PipelineConfig, force: bool) -> int:
    rdir = cfg.out / REPORT_DIR
    path = rdir / "summary.txt"
    if not path.exists():
        raise DataError(f"no evaluation found in {rdir}; run 'ridgeline evaluate' first")
    print(path.read_text(encoding="utf-8"), end="")
    try:
        summary = json.loads((rdir / "summary.json").read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read {rdir / 'summary.json'}: {exc}") from exc
    for row in summary:
        cm = row["peak_confusions"][-1]
        print(f"\n{row['group']}: confusion at {row['peak_sizes'][-1]} features "
              f"(accuracy {100 * cm['accuracy']:.1f}%)")
        print("actual\\pred " + " ".join(f"{c:>7}" for c in cm["classes"]))
        for name, counts in zip(cm["classes"], cm["counts"]):
            print(f"{name:<11} " + " ".join(f"{v:>7}" for v in counts))
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "barcodes": cmd_barcodes,
    "features": cmd_features,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args.force)
    except RidgelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
