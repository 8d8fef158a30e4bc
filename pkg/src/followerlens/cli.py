"""Command-line pipelines: synth, featurize, predict, detect, cluster, evaluate.

Conventions shared by every command:
  * all inputs and outputs are explicit paths; no environment variables;
  * every invocation writes `<out>.manifest.json` next to its outputs with the
    resolved parameters, input digests, seed, tool version and duration;
  * data outputs are byte-identical across runs with identical inputs and
    flags (the manifest's duration field is the one excluded wall-clock value);
  * diagnostics go to stderr, one line per error, prefixed with a machine
    code such as E_VALIDATION;
  * exit 0 on a clean run, 1 when any input record was rejected or the run
    failed on bad input, 2 on usage errors.

Report-style commands (predict, detect, cluster, evaluate) also render a PNG
figure next to the delimited output unless --no-figures is given.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from pathlib import Path

import click

from . import __version__
from .clustering import (
    select_aggressive,
    spectral_cluster,
    unfollow_series,
    write_cluster_report,
)
from .detection import (
    DEFAULT_BANDS,
    DEFAULT_THRESHOLD,
    bucket_for_count,
    detect,
    precision_recall,
    sweep_error_rates,
    tolerance_score,
)
from .errors import FollowerLensError
from .features import featurize, fit_normalizer, normalize, write_feature_matrix
from .model import Corpus, LoadResult, Rejection, load_corpus, save_corpus
from .neighborhood import (
    BACKENDS,
    PredictionRecord,
    build_index,
    predict_for_user,
    read_prediction_records,
    write_prediction_records,
)
from .synth import GeneratorConfig, generate, inject_manipulation
from . import report as figures


def _digest(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _emit_rejections(source: str, rejections: list[Rejection]) -> None:
    for rej in rejections:
        click.echo(
            f"E_VALIDATION {source} line={rej.line_no} field={rej.field}: {rej.message}",
            err=True,
        )


def _write_manifest(
    out_path: str,
    command: str,
    parameters: dict,
    inputs: dict[str, str],
    seed: int | None,
    started: float,
) -> None:
    manifest = {
        "command": command,
        "parameters": parameters,
        "input_digests": {name: _digest(Path(p)) for name, p in inputs.items()},
        "seed": seed,
        "tool_version": __version__,
        "duration_seconds": round(time.perf_counter() - started, 6),
    }
    Path(out_path + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _load_or_fail(path: str) -> LoadResult:
    result = load_corpus(path)
    _emit_rejections(path, result.rejections)
    return result


def _fig_path(out_path: str, suffix: str) -> str:
    return str(Path(out_path).with_suffix("")) + suffix


def _build_reference(corpus: Corpus, backend: str):
    vectors = {uid: featurize(trace) for uid, trace in corpus.traces.items()}
    normalizer = fit_normalizer(list(vectors.values()))
    population = [
        (uid, normalize(vectors[uid], normalizer), trace.displayed_follower_count)
        for uid, trace in corpus.traces.items()
    ]
    return build_index(population, backend=backend), normalizer


@click.group()
@click.version_option(version=__version__, prog_name="followerlens")
def main() -> None:
    """Estimate untampered follower counts and flag manipulated profiles."""


@main.command("synth")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Generator config JSON.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False),
              help="Corpus output path (JSON lines).")
def cmd_synth(config_path: str, out_path: str) -> None:
    """Generate a labeled synthetic corpus."""
    started = time.perf_counter()
    try:
        config = GeneratorConfig.from_file(config_path)
        corpus = generate(config)
        save_corpus(corpus, out_path)
    except (FollowerLensError, ValueError, json.JSONDecodeError) as exc:
        click.echo(f"E_CONFIG {exc}", err=True)
        sys.exit(1)
    _write_manifest(
        out_path, "synth", {"config": config.to_dict(), "out": out_path},
        {"config": config_path}, config.seed, started,
    )
    click.echo(f"wrote {len(corpus)} traces to {out_path}")


@main.command("featurize")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cmd_featurize(corpus_path: str, out_path: str) -> None:
    """Extract feature vectors for every user into a CSV matrix."""
    started = time.perf_counter()
    try:
        result = _load_or_fail(corpus_path)
        rows = [(uid, featurize(trace)) for uid, trace in result.corpus.traces.items()]
        write_feature_matrix(out_path, rows)
    except FollowerLensError as exc:
        click.echo(f"{exc.code} {exc}", err=True)
        sys.exit(1)
    _write_manifest(
        out_path, "featurize", {"corpus": corpus_path, "out": out_path},
        {"corpus": corpus_path}, None, started,
    )
    click.echo(f"wrote {len(rows)} feature rows to {out_path}")
    sys.exit(0 if result.clean else 1)


@main.command("predict")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Users to predict (query corpus).")
@click.option("--reference", "reference_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Random reference population corpus.")
@click.option("--backend", type=click.Choice(BACKENDS), default="kd_tree",
              show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--figures/--no-figures", "render_figures", default=True,
              show_default=True)
def cmd_predict(
    corpus_path: str, reference_path: str, backend: str, out_path: str,
    render_figures: bool,
) -> None:
    """Predict follower counts for a corpus against a reference population."""
    started = time.perf_counter()
    try:
        queries = _load_or_fail(corpus_path)
        reference = _load_or_fail(reference_path)
        index, normalizer = _build_reference(reference.corpus, backend)
        records = []
        for uid, trace in queries.corpus.traces.items():
            prediction = predict_for_user(trace, index, normalizer)
            records.append(
                PredictionRecord(
                    user_id=uid,
                    predicted=prediction.predicted_followers,
                    displayed=trace.displayed_follower_count,
                    neighbor_count=prediction.neighbor_count,
                )
            )
        write_prediction_records(out_path, records)
        if render_figures:
            figures.save_neighborhood_sizes(
                [rec.neighbor_count for rec in records],
                _fig_path(out_path, "_neighborhoods.png"),
            )
    except FollowerLensError as exc:
        click.echo(f"{exc.code} {exc}", err=True)
        sys.exit(1)
    _write_manifest(
        out_path, "predict",
        {"corpus": corpus_path, "reference": reference_path, "backend": backend,
         "out": out_path},
        {"corpus": corpus_path, "reference": reference_path}, None, started,
    )
    click.echo(f"wrote {len(records)} predictions to {out_path}")
    sys.exit(0 if queries.clean and reference.clean else 1)


@main.command("detect")
@click.option("--predictions", "predictions_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--threshold", type=float, default=DEFAULT_THRESHOLD, show_default=True,
              help="Relative deviation above which a user is flagged.")
@click.option("--labels", "labels_path", default=None,
              type=click.Path(exists=True, dir_okay=False),
              help="Optional corpus file carrying ground-truth labels.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--figures/--no-figures", "render_figures", default=True,
              show_default=True)
def cmd_detect(
    predictions_path: str, threshold: float, labels_path: str | None,
    out_path: str, render_figures: bool,
) -> None:
    """Turn a prediction batch into manipulation verdicts."""
    started = time.perf_counter()
    clean = True
    try:
        records, rejections = read_prediction_records(predictions_path)
        _emit_rejections(predictions_path, rejections)
        clean = not rejections
        reports = [
            detect(rec.predicted, rec.displayed, threshold,
                   user_id=rec.user_id, neighbor_count=rec.neighbor_count)
            for rec in records
        ]
        flagged = sum(1 for r in reports if r.verdict == "customer")
        summary: dict = {
            "threshold": threshold,
            "total": len(reports),
            "flagged": flagged,
        }
        inputs = {"predictions": predictions_path}
        if labels_path is not None:
            labels_result = _load_or_fail(labels_path)
            clean = clean and labels_result.clean
            labels = {
                uid: labels_result.corpus.labels.get(uid, "unlabeled")
                for uid in labels_result.corpus.traces
            }
            pr = precision_recall(reports, labels)
            summary["precision"] = pr.precision
            summary["recall"] = pr.recall
            summary["true_positives"] = pr.true_positives
            summary["false_positives"] = pr.false_positives
            summary["false_negatives"] = pr.false_negatives
            inputs["labels"] = labels_path
        write_detection_report(out_path, reports, summary)
        if render_figures:
            figures.save_deviation_histogram(
                [r.relative_deviation for r in reports], threshold,
                _fig_path(out_path, "_deviations.png"),
            )
    except FollowerLensError as exc:
        click.echo(f"{exc.code} {exc}", err=True)
        sys.exit(1)
    except ValueError as exc:
        click.echo(f"E_USAGE {exc}", err=True)
        sys.exit(2)
    _write_manifest(
        out_path, "detect",
        {"predictions": predictions_path, "threshold": threshold,
         "labels": labels_path, "out": out_path},
        inputs, None, started,
    )
    click.echo(f"flagged {flagged} of {len(reports)} users at threshold {threshold:g}")
    sys.exit(0 if clean else 1)


@main.command("cluster")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--figures/--no-figures", "render_figures", default=True,
              show_default=True)
def cmd_cluster(
    corpus_path: str, k: int, seed: int, out_path: str, render_figures: bool
) -> None:
    """Cluster users by their unfollow time series."""
    started = time.perf_counter()
    try:
        result = _load_or_fail(corpus_path)
        series = [unfollow_series(trace) for trace in result.corpus]
        assignment = spectral_cluster(series, k=k, seed=seed)
        aggressive = select_aggressive(assignment, series)
        write_cluster_report(out_path, assignment, series)
        if assignment.degenerate:
            click.echo("W_DEGENERATE all series identical; single cluster", err=True)
        if render_figures:
            figures.save_cluster_series(
                {s.user_id: s.counts for s in series}, assignment.labels,
                _fig_path(out_path, "_clusters.png"),
            )
    except FollowerLensError as exc:
        click.echo(f"{exc.code} {exc}", err=True)
        sys.exit(1)
    _write_manifest(
        out_path, "cluster",
        {"corpus": corpus_path, "k": k, "seed": seed, "out": out_path},
        {"corpus": corpus_path}, seed, started,
    )
    click.echo(
        f"clustered {len(series)} users into {k} groups; "
        f"{len(aggressive)} aggressive"
    )
    sys.exit(0 if result.clean else 1)


@main.command("evaluate")
@click.option("--corpus", "corpus_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Query users to evaluate predictions on.")
@click.option("--reference", "reference_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--bands", default=",".join(str(int(b)) for b in DEFAULT_BANDS),
              show_default=True, help="Comma-separated tolerance bands.")
@click.option("--backend", type=click.Choice(BACKENDS), default="kd_tree",
              show_default=True)
@click.option("--tolerance-probe", "probe", type=int, default=0, show_default=True,
              help="Users per follower bucket to probe with injected followers.")
@click.option("--inject-fraction", type=float, default=0.75, show_default=True,
              help="Injected amount as a fraction of the displayed count.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--figures/--no-figures", "render_figures", default=True,
              show_default=True)
def cmd_evaluate(
    corpus_path: str, reference_path: str, bands: str, backend: str, probe: int,
    inject_fraction: float, seed: int, out_path: str, render_figures: bool,
) -> None:
    """Accuracy-vs-band sweep plus optional manipulation-tolerance probe."""
    started = time.perf_counter()
    try:
        band_values = tuple(float(b) for b in bands.split(",") if b.strip())
        if not band_values or any(b <= 0 for b in band_values):
            raise click.BadParameter("bands must be positive numbers")
        queries = _load_or_fail(corpus_path)
        reference = _load_or_fail(reference_path)
        index, normalizer = _build_reference(reference.corpus, backend)

        predictions = {}
        for uid, trace in queries.corpus.traces.items():
            predictions[uid] = predict_for_user(trace, index, normalizer)
        pairs = [
            (predictions[uid].predicted_followers, float(t.displayed_follower_count))
            for uid, t in queries.corpus.traces.items()
        ]
        sweep = sweep_error_rates(pairs, band_values)

        rows = [
            {"kind": "band", "band": band, "error_rate": rate}
            for band, rate in sweep
        ]

        group_means: dict[str, float] = {}
        if probe > 0:
            by_group: dict[str, list[str]] = {"G1": [], "G2": [], "G3": []}
            for uid, trace in queries.corpus.traces.items():
                by_group[bucket_for_count(trace.displayed_follower_count)].append(uid)
            scores: dict[str, list[float]] = {g: [] for g in by_group}
            for group, uids in sorted(by_group.items()):
                for uid in uids[:probe]:
                    trace = queries.corpus.traces[uid]
                    amount = max(1, round(inject_fraction * trace.displayed_follower_count))
                    manipulated = inject_manipulation(trace, amount, 0.8, seed)
                    after = predict_for_user(manipulated, index, normalizer)
                    scores[group].append(
                        tolerance_score(predictions[uid], after, amount)
                    )
            for group, values in sorted(scores.items()):
                if values:
                    group_means[group] = sum(values) / len(values)
                    rows.append(
                        {"kind": "tolerance_group", "group": group,
                         "mean_score": group_means[group], "probed": len(values)}
                    )
        rows.append(
            {"kind": "summary", "queries": len(pairs),
             "max_error_rate": max(rate for _, rate in sweep),
             "min_error_rate": min(rate for _, rate in sweep)}
        )
        with Path(out_path).open("w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        if render_figures:
            figures.save_band_sweep(sweep, _fig_path(out_path, "_bands.png"))
            if group_means:
                figures.save_tolerance_bars(
                    group_means, _fig_path(out_path, "_tolerance.png")
                )
    except FollowerLensError as exc:
        click.echo(f"{exc.code} {exc}", err=True)
        sys.exit(1)
    _write_manifest(
        out_path, "evaluate",
        {"corpus": corpus_path, "reference": reference_path, "bands": list(band_values),
         "backend": backend, "tolerance_probe": probe,
         "inject_fraction": inject_fraction, "out": out_path},
        {"corpus": corpus_path, "reference": reference_path}, seed, started,
    )
    click.echo(f"evaluated {len(pairs)} users over {len(band_values)} bands")
    sys.exit(0 if queries.clean and reference.clean else 1)


if __name__ == "__main__":
    main()
