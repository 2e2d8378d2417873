"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage error. `--format json`
emits the same payloads the HTTP API serves.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import annotation as ann
from . import corpus, errors, generator, server, tagger, taxonomy as tx
from .workspace import Workspace, WorkspaceConfig, resolve_data_dir


def _load_workspace(ctx) -> Workspace:
    data_dir = resolve_data_dir(ctx.obj.get("data_dir"))
    return Workspace.load(WorkspaceConfig.for_dir(data_dir))


def _emit(payload, fmt: str, text_renderer) -> None:
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        text_renderer(payload)


format_option = click.option("--format", "fmt",
                             type=click.Choice(["text", "json"]),
                             default="text", show_default=True)


@click.group()
@click.option("--data-dir", type=click.Path(), default=None,
              help="Workspace directory (default: $ADVTAX_DATA_DIR or cwd).")
@click.pass_context
def main(ctx, data_dir):
    """Taxonomy, annotation, and scenario toolkit for adversarial AV events."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir


def _run(fn):
    try:
        fn()
    except errors.AdvtaxError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


# ---------------------------------------------------------------------- taxonomy

@main.group()
def taxonomy():
    """Inspect and revise the taxonomy."""


@taxonomy.command("validate")
@click.pass_context
def taxonomy_validate(ctx):
    def go():
        ws = _load_workspace(ctx)
        violations = tx.validate_taxonomy(ws.taxonomy)
        if violations:
            for v in violations:
                click.echo(f"{v.code.value} at {v.path}: {v.message}", err=True)
            sys.exit(1)
        leaves = len(list(tx.iter_leaves(ws.taxonomy)))
        click.echo(f"OK: {leaves} leaves, {len(ws.taxonomy.categories)} categories")
    _run(go)


@taxonomy.command("show")
@format_option
@click.pass_context
def taxonomy_show(ctx, fmt):
    def go():
        ws = _load_workspace(ctx)
        if fmt == "json":
            click.echo(tx.serialize(ws.taxonomy), nl=False)
            return
        click.echo(f"taxonomy version {ws.taxonomy.version}")
        for path, node in tx.walk(ws.taxonomy):
            indent = "  " * (path.count("/") - 1)
            if isinstance(node, tx.ElementClass):
                click.echo(f"{indent}{node.id}. {node.name}")
            else:
                click.echo(f"{indent}{node.name}")
    _run(go)


@taxonomy.command("amend")
@click.argument("leaf_id")
@click.argument("new_definition")
@click.option("--rationale", required=True)
@click.pass_context
def taxonomy_amend(ctx, leaf_id, new_definition, rationale):
    def go():
        ws = _load_workspace(ctx)
        ws.amend(leaf_id, new_definition, rationale)
        click.echo(f"amended {leaf_id}; taxonomy now version {ws.taxonomy.version}")
    _run(go)


@taxonomy.command("add")
@click.argument("parent_path")
@click.argument("leaf_id")
@click.argument("name")
@click.argument("definition")
@click.option("--rationale", required=True)
@click.pass_context
def taxonomy_add(ctx, parent_path, leaf_id, name, definition, rationale):
    def go():
        ws = _load_workspace(ctx)
        leaf = tx.ElementClass(id=leaf_id, name=name, definition=definition)
        ws.taxonomy = tx.add_leaf(ws.taxonomy, parent_path.split("/"), leaf,
                                  rationale)
        ws.store.register_taxonomy(ws.taxonomy)
        ws.save_taxonomy()
        click.echo(f"added {leaf_id}; taxonomy now version {ws.taxonomy.version}")
    _run(go)


@taxonomy.command("diff")
@click.argument("old_file", type=click.Path(exists=True))
@click.argument("new_file", type=click.Path(exists=True))
@format_option
def taxonomy_diff(old_file, new_file, fmt):
    def go():
        t1 = tx.deserialize(Path(old_file).read_text(encoding="utf-8"))
        t2 = tx.deserialize(Path(new_file).read_text(encoding="utf-8"))
        entries = tx.diff(t1, t2)
        payload = [
            {"sequence": e.sequence, "kind": e.kind, "target_id": e.target_id,
             "before": e.before, "after": e.after}
            for e in entries
        ]
        _emit(payload, fmt, lambda p: [
            click.echo(f"{e['kind']} {e['target_id']}") for e in p
        ])
    _run(go)


# ------------------------------------------------------------------------ corpus

@main.group("corpus")
def corpus_group():
    """Ingest and inspect collision-report corpora."""


@corpus_group.command("ingest")
@click.argument("csv_file", type=click.Path())
@format_option
@click.pass_context
def corpus_ingest(ctx, csv_file, fmt):
    def go():
        result = corpus.parse_reports_file(csv_file)
        ws_dir = resolve_data_dir(ctx.obj.get("data_dir"))
        ws_dir.mkdir(parents=True, exist_ok=True)
        (ws_dir / "reports.csv").write_text(
            corpus.serialize_reports(result.accepted), encoding="utf-8")
        payload = {
            "accepted": len(result.accepted),
            "excluded": [{"row": row, "reason": reason.value}
                         for row, reason in result.excluded],
        }
        _emit(payload, fmt, lambda p: click.echo(
            f"{p['accepted']} accepted, {len(p['excluded'])} excluded"
            + "".join(f"\n  row {e['row']}: {e['reason']}"
                      for e in p["excluded"])))
    _run(go)


# ---------------------------------------------------------------------- annotate

@main.group()
def annotate():
    """Record annotations."""


@annotate.command("add")
@click.option("--report", "report_id", required=True)
@click.option("--tags", required=True, help="Comma-separated leaf ids.")
@click.option("--primary", required=True)
@click.option("--difficulty", type=int, required=True)
@click.option("--annotator", default="gold", show_default=True)
@click.option("--notes", default="")
@click.pass_context
def annotate_add(ctx, report_id, tags, primary, difficulty, annotator, notes):
    def go():
        ws = _load_workspace(ctx)
        a = ann.Annotation(
            report_id=report_id,
            taxonomy_version=ws.taxonomy.version,
            tags=frozenset(t.strip() for t in tags.split(",") if t.strip()),
            primary=primary,
            difficulty=difficulty,
            annotator=annotator,
            notes=notes,
        )
        ws.record(a)
        click.echo(f"recorded annotation for {report_id}")
    _run(go)


@annotate.command("import")
@click.argument("log_file", type=click.Path())
@click.pass_context
def annotate_import(ctx, log_file):
    def go():
        ws = _load_workspace(ctx)
        try:
            text = Path(log_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise errors.FileUnreadable(f"cannot read {log_file}: {exc}")
        count = 0
        prior = len(ws.store.events)
        for line_number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            event = ann.parse_log_line(line, line_number)
            ws.store = ann.record_annotation(ws.store, event["annotation"],
                                             timestamp=event["timestamp"])
            count += 1
        ws.append_log_events(prior)
        click.echo(f"imported {count} annotations")
    _run(go)


# ------------------------------------------------------------------------- stats

@main.group()
def stats():
    """Evaluation statistics over the annotated corpus."""


@stats.command("coverage")
@format_option
@click.pass_context
def stats_coverage(ctx, fmt):
    def go():
        ws = _load_workspace(ctx)
        cov = ann.coverage(ws.store, ws.taxonomy)
        payload = server.coverage_payload(cov)

        def render(p):
            click.echo(f"total {p['total']}, unclassified {p['unclassified']}, "
                       f"success {p['success_rate']['rendered']}")
            for name, count in p["primary_counts"].items():
                click.echo(f"  {name}: {count}")
        _emit(payload, fmt, render)
    _run(go)


@stats.command("difficulty")
@format_option
@click.pass_context
def stats_difficulty(ctx, fmt):
    def go():
        ws = _load_workspace(ctx)
        cov = ann.coverage(ws.store, ws.taxonomy)
        payload = {str(k): v for k, v in cov.difficulty_histogram.items()}

        def render(p):
            for grade in sorted(p):
                label = ann.DIFFICULTY_LABELS[int(grade)]
                click.echo(f"{grade} {label}: {p[grade]}")
        _emit(payload, fmt, render)
    _run(go)


@stats.command("success")
@format_option
@click.pass_context
def stats_success(ctx, fmt):
    def go():
        ws = _load_workspace(ctx)
        classified, total = ann.success_counts(ws.store)
        rate = ann.success_rate(ws.store)
        payload = {"numerator": classified if total else 1,
                   "denominator": total if total else 1,
                   "rendered": ann.format_rate(rate)}
        _emit(payload, fmt, lambda p: click.echo(
            f"{p['numerator']}/{p['denominator']} ({p['rendered']})"))
    _run(go)


# ----------------------------------------------------------------------- suggest

@main.command("suggest")
@click.argument("report_id")
@format_option
@click.pass_context
def suggest_cmd(ctx, report_id, fmt):
    def go():
        ws = _load_workspace(ctx)
        report = ws.report_by_id(report_id)
        suggestions = tagger.suggest(report.narrative, ws.lexicon, ws.taxonomy)
        payload = [server.suggestion_payload(s) for s in suggestions]
        _emit(payload, fmt, lambda p: [
            click.echo(f"{s['leaf_id']}: {s['score']['value']:g} "
                       f"({', '.join(s['matched'])})")
            for s in p
        ])
    _run(go)


# ---------------------------------------------------------------------- generate

@main.group()
def generate():
    """Compose, vary, and sample scenario specifications."""


@generate.command("compose")
@click.option("--elements", required=True,
              help="Comma-separated leaf ids, e.g. G,E.")
@click.option("--out", type=click.Path(), default=None)
@click.pass_context
def generate_compose(ctx, elements, out):
    def go():
        ws = _load_workspace(ctx)
        pairs = [(leaf_id.strip(), {}) for leaf_id in elements.split(",")
                 if leaf_id.strip()]
        spec = generator.compose(ws.taxonomy, pairs)
        document = generator.export_spec(spec)
        if out:
            Path(out).write_text(document, encoding="utf-8")
            click.echo(f"wrote {out}")
        else:
            click.echo(document, nl=False)
    _run(go)


@generate.command("variants")
@click.argument("spec_file", type=click.Path(exists=True))
@click.option("--axis", "axes", multiple=True,
              help="instance_index:param:value1|value2|...")
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def generate_variants(ctx, spec_file, axes, count, seed):
    def go():
        ws = _load_workspace(ctx)
        spec = generator.import_spec(
            Path(spec_file).read_text(encoding="utf-8"), ws.taxonomy)
        parsed_axes = []
        for raw in axes:
            idx, param, values = raw.split(":", 2)
            parsed_axes.append(generator.VariationAxis(
                instance_index=int(idx), param_name=param,
                values=values.split("|")))
        for variant in generator.generate_variants(spec, parsed_axes, count, seed):
            click.echo(generator.export_spec(variant), nl=False)
    _run(go)


@generate.command("sample")
@click.option("--k", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def generate_sample(ctx, k, seed):
    def go():
        ws = _load_workspace(ctx)
        cov = ann.coverage(ws.store, ws.taxonomy)
        for spec in generator.sample_for_coverage(cov, ws.taxonomy, k, seed):
            click.echo(generator.export_spec(spec), nl=False)
    _run(go)


# ------------------------------------------------------------------------- serve

@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8712, show_default=True)
@click.option("--allow-remote", is_flag=True, default=False,
              help="Permit binding a non-loopback address.")
@click.pass_context
def serve_cmd(ctx, host, port, allow_remote):
    def go():
        ws = _load_workspace(ctx)
        server.serve(ws, host=host, port=port, allow_remote=allow_remote)
    _run(go)


if __name__ == "__main__":
    main()
