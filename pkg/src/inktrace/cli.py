"""Command-line interface.

Subcommands: analyze, reconstruct, describe, index build, retrieve,
report, serve, config show. Failures print the typed error name on
stderr and exit nonzero.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .config import Config
from .errors import EmptyCorpus, InkError, MalformedJson
from .pipeline import RecordStore, run_pipeline
from .renderer import reconstruct, to_png_bytes
from .retrieval import build_index as build_chunk_index
from .retrieval import load_index, retrieve as retrieve_chunks, save_index
from .stroke_log import parse_session


def _typed_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InkError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _canvas_option(fn):
    return click.option("--canvas", default=None, metavar="WxH",
                        help="Canvas dimensions; defaults to the final "
                             "image's size.")(fn)


def _resolve_canvas(canvas: str | None,
                    final_image: str | None) -> tuple[int, int] | None:
    if canvas:
        w, h = canvas.lower().split("x")
        return int(w), int(h)
    if final_image:
        from PIL import Image
        with Image.open(final_image) as img:
            return img.size
    return None


def _read(path: str | None) -> bytes | None:
    return Path(path).read_bytes() if path else None


@click.group()
def main():
    """Drawing-process analytics: features, replay, retrieval, reports."""


@main.command()
@click.argument("session_file", type=click.Path(exists=True))
@click.option("--annotations", type=click.Path(exists=True))
@click.option("--final-image", type=click.Path(exists=True))
@_canvas_option
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="json")
@_typed_errors
def analyze(session_file, annotations, final_image, canvas, fmt):
    """Compute the feature profile of a session log."""
    result = run_pipeline(
        _read(session_file),
        canvas=_resolve_canvas(canvas, final_image),
        final_png=_read(final_image),
        annotations_json=_read(annotations),
        config=Config.from_env())
    profile = result.profile.to_json_dict()
    if fmt == "json":
        click.echo(json.dumps(profile, indent=1))
    else:
        k = profile["kinematics"]
        click.echo(f"actions: {profile['actions']['total']}")
        click.echo(f"ink length: {k['length_px']:.1f} px, "
                   f"stroke time: {k['duration_s']:.2f} s")
        if k["speed_px_per_s"] is not None:
            click.echo(f"mean speed: {k['speed_px_per_s']:.1f} px/s")
        if k["sparc_sal"] is not None:
            click.echo(f"smoothness (mean SAL): {k['sparc_sal']:.3f}")
        click.echo(f"pause total: {k['pause_total_s']:.2f} s")


@main.command("reconstruct")
@click.argument("session_file", type=click.Path(exists=True))
@click.option("--at", "at_ms", type=int, default=None,
              help="Replay only up to this epoch-ms timestamp.")
@click.option("--output", "-o", type=click.Path(), required=True)
@_canvas_option
@click.option("--final-image", type=click.Path(exists=True))
@_typed_errors
def reconstruct_cmd(session_file, at_ms, output, canvas, final_image):
    """Replay a session log into a PNG."""
    dims = _resolve_canvas(canvas, final_image)
    if dims is None:
        raise MalformedJson("no canvas dimensions: pass --canvas or "
                            "--final-image")
    session = parse_session(_read(session_file), dims)
    Path(output).write_bytes(to_png_bytes(reconstruct(session, at_ms)))
    click.echo(output)


@main.command()
@click.argument("session_file", type=click.Path(exists=True))
@click.option("--annotations", type=click.Path(exists=True))
@click.option("--final-image", type=click.Path(exists=True))
@click.option("--questionnaire", type=click.Path(exists=True))
@_canvas_option
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
@_typed_errors
def describe(session_file, annotations, final_image, questionnaire, canvas, fmt):
    """Generate the structured textual description."""
    result = run_pipeline(
        _read(session_file),
        canvas=_resolve_canvas(canvas, final_image),
        final_png=_read(final_image),
        annotations_json=_read(annotations),
        questionnaire_json=_read(questionnaire),
        config=Config.from_env())
    if fmt == "json":
        click.echo(json.dumps(result.description.to_json_dict(), indent=1))
    else:
        from .description import to_query
        click.echo(to_query(result.description), nl=False)


@main.group()
def index():
    """Retrieval-index operations."""


@index.command("build")
@click.argument("corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--strategy", type=click.Choice(["char", "recursive",
                                               "semantic", "kmeans"]),
              default="semantic")
@click.option("--output", "-o", type=click.Path(), default="index.cidx")
@click.option("--chunk-size", type=int, default=None)
@click.option("--chunk-overlap", type=int, default=None)
@click.option("--threshold", type=float, default=None,
              help="Semantic grouping similarity threshold.")
@click.option("--k", type=int, default=None, help="K-means cluster count.")
@_typed_errors
def index_build(corpus_dir, strategy, output, chunk_size, chunk_overlap,
                threshold, k):
    """Build a chunk index from a directory of .txt/.md documents."""
    config = Config.from_env()
    documents = []
    for path in sorted(Path(corpus_dir).iterdir()):
        if path.suffix.lower() in (".txt", ".md") and path.is_file():
            documents.append((path.name, path.read_text(encoding="utf-8")))
    if not documents:
        raise EmptyCorpus(f"no .txt/.md documents in {corpus_dir}")
    built = build_chunk_index(
        documents, strategy, config.make_embedder(),
        chunk_size=chunk_size if chunk_size is not None else config.chunk_size,
        chunk_overlap=(chunk_overlap if chunk_overlap is not None
                       else config.chunk_overlap),
        semantic_threshold=(threshold if threshold is not None
                            else config.semantic_threshold),
        k=k, seed=config.kmeans_seed)
    save_index(built, output)
    click.echo(f"{output}: {len(built.chunks)} chunks "
               f"({strategy}, {built.provider_id})")


@main.command("retrieve")
@click.option("--index", "index_path", type=click.Path(exists=True),
              required=True)
@click.option("--query-file", type=click.Path(exists=True), required=True)
@click.option("--top-k", type=int, default=5)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
@_typed_errors
def retrieve_cmd(index_path, query_file, top_k, fmt):
    """Rank index chunks against a query text."""
    config = Config.from_env()
    idx = load_index(index_path)
    query = Path(query_file).read_text(encoding="utf-8")
    hits = retrieve_chunks(idx, query, config.make_embedder(), top_k)
    if fmt == "json":
        click.echo(json.dumps([
            {"id": c.id, "score": s, "source_doc": c.source_doc,
             "section_path": list(c.section_path), "text": c.text}
            for c, s in hits], indent=1))
    else:
        for c, s in hits:
            click.echo(f"{s: .4f}  {c.id}  {' / '.join(c.section_path)}")


@main.command()
@click.argument("session_file", type=click.Path(exists=True))
@click.option("--annotations", type=click.Path(exists=True))
@click.option("--final-image", type=click.Path(exists=True))
@click.option("--questionnaire", type=click.Path(exists=True))
@click.option("--index", "index_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None,
              help="Records root (defaults to the configured records_dir).")
@click.option("--llm-endpoint", default=None,
              help="Optional: POST the prompt here and store the response.")
@_canvas_option
@_typed_errors
def report(session_file, annotations, final_image, questionnaire, index_path,
           out, llm_endpoint, canvas):
    """Run the full pipeline and persist a session record directory."""
    config = Config.from_env()
    if llm_endpoint:
        config.llm_endpoint = llm_endpoint
    idx = load_index(index_path) if index_path else None
    result = run_pipeline(
        _read(session_file),
        canvas=_resolve_canvas(canvas, final_image),
        final_png=_read(final_image),
        annotations_json=_read(annotations),
        questionnaire_json=_read(questionnaire),
        index=idx,
        embedder=config.make_embedder() if idx is not None else None,
        config=config)
    store = RecordStore(out or config.records_dir)
    record_dir = store.save(result)
    click.echo(f"record: {record_dir}")
    for stage, status in result.stage_status.items():
        click.echo(f"  {stage}: {status}")


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8321)
@click.option("--records-dir", default=None)
@_typed_errors
def serve(host, port, records_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app
    config = Config.from_env()
    if records_dir:
        config.records_dir = records_dir
    uvicorn.run(create_app(config), host=host, port=port, log_level="warning")


@main.group("config")
def config_group():
    """Configuration helpers."""


@config_group.command("show")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]),
              default="text")
def config_show(fmt):
    """Print every setting with its default and environment override."""
    click.echo(Config.from_env().show(fmt))


if __name__ == "__main__":
    main()
