"""Command-line orchestration: segment, evaluate, train, adjudicate, stats."""

from __future__ import annotations

import re
from pathlib import Path

import click

from .backends.base import Backend
from .backends.cache import ResponseCache
from .backends.fewshot import demonstrations_from_files
from .backends.heuristic import HeuristicBackend
from .backends.local import (
    LocalBackend,
    TrainConfig,
    load_model,
    save_model,
    train_local,
    training_accuracy,
)
from .backends.remote import RemoteBackend, RemoteConfig
from .backends.replay import ReplayBackend
from .config import APPROACH_ALIASES, RunConfig, apply_overrides, load_run_config
from .corpus import CodeFile, adjudicate, corpus_stats, load_corpus, write_corpus
from .errors import CodesegError, EmptyCorpus, MissingDemonstrations
from .labels import Label
from .metrics import evaluate_run
from .pipeline import labels_of, run_line_by_line, run_range_based
from .prompts import template_hash
from .report import render_table, write_json, write_run_report, write_sweep
from .segment import Segment, consolidate
from .window import WindowConfig


def _config_from(config_path: str | None, **overrides: object) -> RunConfig:
    config = load_run_config(config_path) if config_path else RunConfig()
    config = apply_overrides(config, **overrides)
    config.validate()
    return config


def _resolve_input(config: RunConfig) -> str:
    if not config.input_path:
        raise EmptyCorpus("no corpus given: pass --input or set input_path in the config")
    if not Path(config.input_path).exists():
        raise EmptyCorpus(f"corpus not found: {config.input_path}")
    return config.input_path


def _build_backend(config: RunConfig) -> Backend:
    if config.backend == "heuristic":
        return HeuristicBackend()
    if config.backend == "replay":
        return ReplayBackend(config.replay_file)
    if config.backend == "local":
        if not config.model_path:
            raise CodesegError("local backend needs model_path (train one first)")
        return LocalBackend(load_model(config.model_path))
    remote_keys = dict(config.remote)
    try:
        remote_config = RemoteConfig(**remote_keys)
    except TypeError as exc:
        raise CodesegError(f"bad remote backend settings: {exc}") from None
    return RemoteBackend(remote_config)


def _filter_split(files: list[CodeFile], split: str) -> list[CodeFile]:
    if split != "all":
        files = [f for f in files if f.split == split]
    if not files:
        raise EmptyCorpus(f"no files in split {split!r}")
    return files


def _predict(
    config: RunConfig,
    files: list[CodeFile],
    backend: Backend,
    cache: ResponseCache,
    *,
    all_files: list[CodeFile],
    context_c: int,
) -> dict[str, list[Label]]:
    if config.approach == "range_based":
        return run_range_based(
            files,
            backend,
            repair_policy=config.repair_policy,
            cache=cache,
            lenient=config.lenient,
            max_in_flight=config.max_in_flight,
        )
    pool = None
    if config.prompt_mode == "carp_few_shot":
        train_files = [f for f in all_files if f.split == "train"]
        pool = demonstrations_from_files(train_files, c=context_c)
        if not pool:
            raise MissingDemonstrations(
                "carp_few_shot needs gold-labeled train-split lines in the corpus"
            )
    responses = run_line_by_line(
        files,
        backend,
        WindowConfig(
            c=context_c,
            max_tokens=config.max_tokens,
            reserved_tokens=config.reserved_tokens,
        ),
        mode=config.prompt_mode,
        demonstration_pool=pool,
        shots=config.shots,
        cache=cache,
        lenient=config.lenient,
        max_in_flight=config.max_in_flight,
    )
    return {file_id: labels_of(resp) for file_id, resp in responses.items()}


def _safe_stem(file_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", file_id)


def _annotated_source(file: CodeFile, segments: list[Segment]) -> str:
    starts = {segment.start: segment for segment in segments}
    out = []
    for line in file.lines:
        segment = starts.get(line.line_no)
        if segment is not None:
            out.append(
                f"# ==== {segment.label.display} [lines {segment.start}-{segment.end}] ===="
            )
        out.append(line.code)
    return "\n".join(out) + "\n"


@click.group()
@click.version_option(package_name="codeseg")
def main() -> None:
    """Segment statistical research code into labeled functional segments."""


shared_run_options = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                 help="TOML or JSON run config; flags override file values."),
    click.option("--approach", type=click.Choice(["line", "range"]), default=None,
                 help="line: per-line window classification; range: whole-file ranges."),
    click.option("--backend", type=click.Choice(["heuristic", "local", "remote", "replay"]),
                 default=None),
    click.option("--mode", "prompt_mode", type=click.Choice(["zero_shot", "carp_few_shot"]),
                 default=None),
    click.option("--shots", type=int, default=None, help="Demonstrations in CARP mode."),
    click.option("--repair", "repair_policy",
                 type=click.Choice(["strict", "first_wins_fill_invalid"]), default=None),
    click.option("--seed", type=int, default=None),
    click.option("--cache", "cache_path", type=click.Path(), default=None,
                 help="Response cache file; runs resume from it."),
    click.option("--replay-file", type=click.Path(exists=True), default=None),
    click.option("--model-path", type=click.Path(exists=True), default=None),
    click.option("--max-in-flight", type=int, default=None,
                 help="Bound on concurrent backend requests."),
    click.option("--strict", is_flag=True, default=False,
                 help="Abort on backend failures instead of scoring them Invalid."),
]


def _with_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


def _collect_config(config_path, approach, strict, **overrides) -> RunConfig:
    if approach is not None:
        overrides["approach"] = APPROACH_ALIASES[approach]
    config = _config_from(config_path, **overrides)
    if strict:
        config.lenient = False
    return config


@main.command()
@_with_options(shared_run_options)
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Corpus JSONL (or set input_path in the config file).")
@click.option("--context", "context_c", type=int, default=None)
@click.option("--split", default="all", help="Corpus split to segment (default: all).")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def segment(config_path, approach, backend, prompt_mode, shots, repair_policy, seed,
            cache_path, replay_file, model_path, max_in_flight, strict,
            input_path, context_c, split, out_dir) -> None:
    """Segment every file and write per-file segment JSON plus annotated source."""
    try:
        config = _collect_config(
            config_path, approach, strict, backend=backend, prompt_mode=prompt_mode,
            shots=shots, repair_policy=repair_policy, seed=seed, cache_path=cache_path,
            replay_file=replay_file, model_path=model_path, max_in_flight=max_in_flight,
            context_c=context_c, input_path=input_path,
        )
        all_files = load_corpus(_resolve_input(config),
                                expected_language=config.language)
        files = _filter_split(all_files, split)
        backend_obj = _build_backend(config)
        cache = ResponseCache(config.cache_path)
        predictions = _predict(config, files, backend_obj, cache,
                               all_files=all_files, context_c=config.context_c)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        extension = {"R": "R", "Python": "py"}[config.language]
        for file in files:
            segments = consolidate(predictions[file.file_id])
            stem = _safe_stem(file.file_id)
            write_json(
                {
                    "file_id": file.file_id,
                    "config_hash": config.hash(),
                    "segments": [
                        {"start": s.start, "end": s.end, "label": s.label.display}
                        for s in segments
                    ],
                },
                out / f"{stem}.segments.json",
            )
            (out / f"{stem}.annotated.{extension}").write_text(
                _annotated_source(file, segments), encoding="utf-8"
            )
        click.echo(f"segmented {len(files)} files into {out}")
    except CodesegError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from None


@main.command()
@_with_options(shared_run_options)
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Corpus JSONL (or set input_path in the config file).")
@click.option("--context", "contexts", default=None,
              help="Context size c, or a comma list (e.g. 1,3,7) for a sweep.")
@click.option("--split", default=None, help="Corpus split to score (default: test).")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Report JSON path, or a directory for sweeps.")
@click.option("--no-figures", is_flag=True, default=False)
def evaluate(config_path, approach, backend, prompt_mode, shots, repair_policy, seed,
             cache_path, replay_file, model_path, max_in_flight, strict,
             input_path, contexts, split, out_path, no_figures) -> None:
    """Score the configured approach against gold labels and write reports."""
    try:
        config = _collect_config(
            config_path, approach, strict, backend=backend, prompt_mode=prompt_mode,
            shots=shots, repair_policy=repair_policy, seed=seed, cache_path=cache_path,
            replay_file=replay_file, model_path=model_path, max_in_flight=max_in_flight,
            input_path=input_path,
        )
        all_files = load_corpus(_resolve_input(config),
                                expected_language=config.language)
        files = _filter_split(all_files, split if split is not None else config.split)
        backend_obj = _build_backend(config)
        cache = ResponseCache(config.cache_path)

        if contexts is None:
            context_list = [config.context_c]
        else:
            context_list = [int(c.strip()) for c in contexts.split(",") if c.strip()]
        sweep = len(context_list) > 1 and config.approach == "line_by_line"
        if config.approach == "range_based":
            context_list = context_list[:1]  # c is ignored by the range approach

        out = Path(out_path)
        if sweep and out.suffix == ".json":
            raise CodesegError("a context sweep writes several files; pass a directory for --out")
        reports = []
        for c in context_list:
            config.context_c = c
            predictions = _predict(config, files, backend_obj, cache,
                                   all_files=all_files, context_c=c)
            _, payload = evaluate_run(
                files,
                predictions,
                mode=config.approach,
                run_id=config.hash()[:16],
                backend=config.backend,
                context_c=None if config.approach == "range_based" else c,
                config_hash=config.hash(),
                template_hash=template_hash(),
            )
            reports.append(payload)

        figures = not no_figures
        if sweep or out.suffix != ".json":
            out_dir = out
            for payload in reports:
                stem = f"report_{config.approach}"
                if payload["context_c"] is not None:
                    stem += f"_c{payload['context_c']}"
                write_run_report(payload, out_dir, stem, figures=figures)
            if sweep:
                write_sweep(reports, out_dir, figures=figures)
        else:
            write_run_report(reports[0], out.parent, out.stem, figures=figures)
        click.echo(render_table(reports), nl=False)
    except CodesegError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from None


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--input", "input_path", type=click.Path(exists=True), default=None,
              help="Corpus JSONL (or set input_path in the config file).")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--feature-dim", type=int, default=None)
@click.option("--context", "context_c", type=int, default=None)
def train(config_path, input_path, out_path, seed, epochs, learning_rate,
          feature_dim, context_c) -> None:
    """Train the local line classifier on the corpus train split."""
    try:
        config = _config_from(
            config_path, seed=seed, epochs=epochs, learning_rate=learning_rate,
            feature_dim=feature_dim, context_c=context_c, input_path=input_path,
        )
        all_files = load_corpus(_resolve_input(config),
                                expected_language=config.language)
        files = _filter_split(all_files, "train")
        train_config = TrainConfig(
            epochs=config.epochs,
            learning_rate=config.learning_rate,
            feature_dim=config.feature_dim,
            seed=config.seed,
            context_c=config.context_c,
            batch_size=config.batch_size,
            max_tokens=config.max_tokens,
            reserved_tokens=config.reserved_tokens,
        )
        model = train_local(files, train_config)
        save_model(model, out_path)
        accuracy = training_accuracy(model, files, train_config)
        click.echo(
            f"trained on {sum(len(f) for f in files)} lines; "
            f"training accuracy {accuracy:.4f}; model -> {out_path}"
        )
    except CodesegError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from None


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True,
              help="Corpus JSONL with annotator labels.")
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="Gold-filled corpus JSONL.")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Optional agreement report JSON.")
@click.option("--language", default="R")
def adjudicate_cmd(input_path, out_path, report_path, language) -> None:
    """Fill gold labels by majority vote; report agreement and conflicts."""
    try:
        files = load_corpus(input_path, expected_language=language)
        adjudicated, agreement = adjudicate(files)
        write_corpus(adjudicated, out_path)
        click.echo(f"kappa: {agreement.kappa:.4f}")
        click.echo(f"resolvable fraction: {agreement.resolvable_fraction:.4f}")
        click.echo(f"conflicts: {len(agreement.conflict_lines)}")
        for file_id, line_no, votes in agreement.conflict_lines:
            click.echo(f"  {file_id}:{line_no} " + ", ".join(v.display for v in votes))
        if report_path:
            write_json(
                {
                    "kappa": agreement.kappa,
                    "resolvable_fraction": agreement.resolvable_fraction,
                    "conflicts": [
                        {
                            "file_id": file_id,
                            "line": line_no,
                            "annotators": [v.display for v in votes],
                        }
                        for file_id, line_no, votes in agreement.conflict_lines
                    ],
                },
                Path(report_path),
            )
    except CodesegError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from None


main.add_command(adjudicate_cmd, name="adjudicate")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--language", default="R")
def stats(input_path, language) -> None:
    """Print corpus statistics per split and in aggregate."""
    try:
        files = load_corpus(input_path, expected_language=language)
        summary = corpus_stats(files)
        header = f"{'Split':<12}{'Lines':>8}{'Files':>8}{'Lines/File':>12}{'Tokens/Line':>13}"
        click.echo(header)
        click.echo("-" * len(header))
        for split, row in summary.per_split.items():
            click.echo(
                f"{split:<12}{row.line_count:>8}{row.file_count:>8}"
                f"{row.avg_lines_per_file:>12.2f}{row.avg_tokens_per_line:>13.2f}"
            )
        agg = summary.aggregate
        click.echo(
            f"{'all':<12}{agg.line_count:>8}{agg.file_count:>8}"
            f"{agg.avg_lines_per_file:>12.2f}{agg.avg_tokens_per_line:>13.2f}"
        )
        click.echo(
            f"unweighted split means: lines/file "
            f"{summary.split_mean_lines_per_file:.2f}, tokens/line "
            f"{summary.split_mean_tokens_per_line:.2f}"
        )
    except CodesegError as exc:
        raise click.ClickException(f"{type(exc).__name__}: {exc}") from None


if __name__ == "__main__":
    main()
