"""Command-line interface for the corpus pipeline.

Subcommands: normalize, g2p, features, align, stats, all (plus demo-corpus
for generating the bundled synthetic dataset). Exit codes: 0 on success,
1 when any utterance failed, 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from vozprep import config as config_mod
from vozprep import corpus, formats, report
from vozprep.corpus import PipelineConfig

STEP_SETS = {
    "normalize": ("normalize",),
    "g2p": ("normalize", "g2p"),
    "features": ("features",),
    "align": ("normalize", "g2p", "align"),
    "all": ("normalize", "g2p", "features", "align"),
}


def _add_common(parser: argparse.ArgumentParser, need_out: bool = True) -> None:
    parser.add_argument("--manifest", required=True, help="TSV manifest: id, path, transcript")
    parser.add_argument("--root", default=".", help="directory audio paths are relative to")
    if need_out:
        parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--workers", type=int, default=1, help="parallel workers")
    for key in config_mod.config_keys():
        parser.add_argument(f"--{key}", dest=f"cfg_{key}", metavar="V", help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vozprep",
                                     description="Spanish TTS corpus preprocessing")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("normalize", "write normalized transcripts"),
        ("g2p", "write phoneme sequences (and the inventory)"),
        ("features", "write normalized log-mel features and norm stats"),
        ("align", "extract durations from posteriorgrams"),
        ("all", "run the full pipeline and render the report"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        if name in ("align", "all"):
            p.add_argument("--posteriors", help="directory holding <id>.post files")

    p = sub.add_parser("stats", help="report corpus statistics")
    _add_common(p, need_out=False)
    p.add_argument("--out", help="optional directory for the TSV/figure report")

    p = sub.add_parser("demo-corpus", help="generate the bundled synthetic corpus")
    p.add_argument("--out", required=True, help="target directory")
    p.add_argument("--seed", type=int, default=20210901)
    return parser


def _gather_config(args) -> PipelineConfig:
    overrides = {}
    if getattr(args, "config", None):
        overrides.update(config_mod.load_config_file(args.config))
    for key in config_mod.config_keys():
        value = getattr(args, f"cfg_{key}", None)
        if value is not None:
            overrides[key] = value
    feature_cfg, _ = config_mod.build_configs(overrides)
    posteriors = getattr(args, "posteriors", None)
    return PipelineConfig(
        feature=feature_cfg,
        workers=max(1, args.workers),
        posteriors_dir=Path(posteriors) if posteriors else None,
    )


def _print_summary(summary: corpus.PipelineSummary) -> None:
    n_total = len(summary.results)
    print(f"processed {n_total} utterances: {n_total - summary.n_failed} ok, "
          f"{summary.n_failed} failed")
    for utt_id, detail in summary.failures:
        print(f"  FAILED {utt_id}: {detail}", file=sys.stderr)


def _run_pipeline_command(args) -> int:
    cfg = _gather_config(args)
    entries = formats.read_manifest(args.manifest)
    steps = STEP_SETS[args.command]
    out = Path(args.out)
    need_audio = "features" in steps
    work = corpus.compute_pass(entries, args.root, cfg.feature, cfg.workers,
                               need_audio=need_audio)
    summary = corpus.write_artifacts(work, out, cfg, steps=steps)
    if args.command == "all":
        _render_full_report(out, work, cfg)
    summary.save(out / "summary.tsv")
    _print_summary(summary)
    return 1 if summary.n_failed else 0


def _render_full_report(out: Path, work, cfg: PipelineConfig) -> None:
    stats = corpus.stats_from_work(work)
    mel_preview = None
    stats_obj = corpus.norm_stats_from_work(work)
    for w in work:
        if w.ok and w.mel is not None and stats_obj is not None:
            from vozprep.dsp import MelSpectrogram, normalize_mel

            mel = MelSpectrogram(values=w.mel, normalized=False, config=cfg.feature)
            mel_preview = (w.utt_id, normalize_mel(mel, stats_obj).values)
            break
    durations = []
    dur_dir = out / corpus.DURATION_DIR
    if dur_dir.is_dir():
        for path in sorted(dur_dir.glob("*.dur")):
            _, frames = formats.read_durations(path)
            durations.extend(frames)
    report.render_report(out / corpus.REPORT_DIR, work, stats,
                         mel_preview=mel_preview, phoneme_durations=durations)


def _run_stats_command(args) -> int:
    cfg = _gather_config(args)
    entries = formats.read_manifest(args.manifest)
    work = corpus.compute_pass(entries, args.root, cfg.feature, cfg.workers)
    failures = [(w.utt_id, w.error) for w in work if not w.ok]
    stats = corpus.stats_from_work(work)
    print(f"samples\t{stats.n_samples}")
    print(f"words\t{stats.n_words}")
    print(f"hours\t{stats.total_hours:.4f}")
    if args.out:
        report_dir = Path(args.out) / corpus.REPORT_DIR
        report.render_report(report_dir, work, stats)
        print(f"report written to {report_dir}")
    for utt_id, error in failures:
        print(f"  FAILED {utt_id}: {error}", file=sys.stderr)
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "demo-corpus":
            from vozprep.synth import build_demo_corpus

            manifest = build_demo_corpus(args.out, seed=args.seed)
            print(f"demo corpus written, manifest at {manifest}")
            return 0
        if args.command == "stats":
            return _run_stats_command(args)
        return _run_pipeline_command(args)
    except (config_mod.ConfigError, formats.FileFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
