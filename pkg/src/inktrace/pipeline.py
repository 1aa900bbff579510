"""End-to-end orchestration and the content-addressed session store.

A run executes the stages in order (parse, kinematics/spatial/behavior
feature pass, replay fidelity, predicates, indicators, description,
retrieve, prompt, optional LLM call); stages whose optional inputs are
missing are skipped with an explicit status. Artifacts persist under
``records/<session_id>/blobs/<sha256>`` with a manifest mapping names to
hashes; the session id is itself a hash of the inputs, so identical
inputs produce identical records.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from . import renderer
from .annotations import (
    AnnotationSet,
    PredicateConfig,
    derive_feature_predicates,
    fetch_annotations,
    map_indicators,
    parse_annotations,
)
from .config import Config
from .description import generate_description, to_query
from .errors import BadResponse, InkError, MalformedJson, Timeout, Unreachable
from .features import compute_feature_profile
from .retrieval import ChunkIndex, assemble_prompt, retrieve
from .retrieval.embedding import Embedder
from .stroke_log import parse_session, parse_questionnaire

STAGES = ("parse", "features", "fidelity", "predicates", "indicators",
          "description", "retrieve", "prompt", "llm")


@dataclass
class PipelineResult:
    session_id: str
    stage_status: dict[str, str]
    session: object = None
    profile: object = None
    annotations: AnnotationSet | None = None
    predicates: frozenset[str] | None = None
    indicators: list | None = None
    description: object = None
    retrieved: list | None = None
    prompt: str | None = None
    llm_response: str | None = None
    reconstruction_png: bytes | None = None
    artifacts: dict[str, bytes] = field(default_factory=dict)


def _session_id(*parts: bytes | None) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(b"\x00" if part is None else b"\x01")
        if part is not None:
            digest.update(hashlib.sha256(part).digest())
    return digest.hexdigest()[:16]


def _json_bytes(data) -> bytes:
    return (json.dumps(data, indent=1) + "\n").encode("utf-8")


def run_pipeline(session_json: bytes,
                 canvas: tuple[int, int] | None = None,
                 final_png: bytes | None = None,
                 annotations_json: bytes | None = None,
                 questionnaire_json: bytes | None = None,
                 index: ChunkIndex | None = None,
                 embedder: Embedder | None = None,
                 config: Config | None = None) -> PipelineResult:
    """Run every runnable stage; raises typed errors with the stage named."""
    config = config or Config()
    status: dict[str, str] = {}
    result = PipelineResult(
        session_id=_session_id(session_json, final_png, annotations_json,
                               questionnaire_json),
        stage_status=status)

    # parse: canvas comes from the argument or the final PNG's dimensions
    try:
        if canvas is None:
            if final_png is None:
                raise MalformedJson("no canvas dimensions: pass them "
                                    "explicitly or attach the final PNG")
            image = renderer.from_png_bytes(final_png)
            canvas = (image.shape[1], image.shape[0])
        questionnaire = (parse_questionnaire(questionnaire_json)
                         if questionnaire_json is not None else None)
        session = parse_session(session_json, canvas,
                                session_id=result.session_id,
                                questionnaire=questionnaire)
    except InkError as exc:
        raise type(exc)(f"[stage parse] {exc.detail}") from exc
    result.session = session
    status["parse"] = "ok"

    annotation_set: AnnotationSet | None = None
    if annotations_json is not None:
        try:
            annotation_set = parse_annotations(annotations_json, canvas)
        except InkError as exc:
            raise type(exc)(f"[stage parse] {exc.detail}") from exc
        status["annotations"] = "file"
    elif config.inference_endpoint and final_png is not None:
        try:
            annotation_set = fetch_annotations(final_png,
                                               config.inference_endpoint,
                                               timeout=config.http_timeout_s)
        except InkError as exc:
            raise type(exc)(f"[stage fetch_annotations] {exc.detail}") from exc
        status["annotations"] = "fetched"
    else:
        status["annotations"] = "skipped: none supplied"
    result.annotations = annotation_set

    try:
        profile = compute_feature_profile(
            session, annotation_set,
            resample_hz=config.resample_hz,
            sparc_amplitude_threshold=config.sparc_amplitude_threshold,
            sparc_max_cutoff_hz=config.sparc_max_cutoff_hz)
    except InkError as exc:
        raise type(exc)(f"[stage features] {exc.detail}") from exc
    status["features"] = "ok"

    reconstruction = renderer.reconstruct(session)
    result.reconstruction_png = renderer.to_png_bytes(reconstruction)
    if final_png is not None:
        final_image = renderer.from_png_bytes(final_png)
        fid = renderer.fidelity(reconstruction, final_image)
        profile = _with_fidelity(profile, {
            "pixel_match_ratio": fid.pixel_match_ratio,
            "mean_channel_error": fid.mean_channel_error,
            "resampled": fid.resampled,
        })
        status["fidelity"] = "ok"
    else:
        status["fidelity"] = "skipped: no final image"
    result.profile = profile

    if annotation_set is not None:
        predicate_config = PredicateConfig(
            thick_width_px=config.thick_width_px,
            faint_opacity=config.faint_opacity,
            very_faint_opacity=config.very_faint_opacity,
            excessive_color_count=config.excessive_color_count,
            edge_tolerance_px=config.edge_tolerance_px)
        result.predicates = derive_feature_predicates(annotation_set, session,
                                                      predicate_config)
        result.indicators = map_indicators(result.predicates)
        status["predicates"] = "ok"
        status["indicators"] = "ok"
    else:
        status["predicates"] = "skipped: no annotations"
        status["indicators"] = "skipped: no annotations"

    result.description = generate_description(annotation_set, profile, session)
    status["description"] = "ok"
    query = to_query(result.description)

    if index is not None and embedder is not None:
        result.retrieved = retrieve(index, query, embedder,
                                    top_k=config.retrieve_top_k)
        status["retrieve"] = "ok"
    else:
        result.retrieved = []
        status["retrieve"] = "skipped: no index"

    result.prompt = assemble_prompt(query, result.retrieved,
                                    session.questionnaire)
    status["prompt"] = "ok"

    if config.llm_endpoint:
        result.llm_response = _call_llm(config.llm_endpoint, result.prompt,
                                        config.http_timeout_s)
        status["llm"] = "ok"
    else:
        status["llm"] = "skipped: no endpoint configured"

    result.artifacts = _collect_artifacts(result, session_json, final_png,
                                          annotations_json, questionnaire_json)
    return result


def _with_fidelity(profile, fidelity_dict):
    import dataclasses
    return dataclasses.replace(profile, fidelity=fidelity_dict)


def _call_llm(endpoint: str, prompt: str, timeout: float) -> str:
    try:
        response = httpx.post(endpoint, json={"prompt": prompt},
                              timeout=timeout)
    except httpx.TimeoutException as exc:
        raise Timeout(f"[stage llm] {exc}") from None
    except httpx.TransportError as exc:
        raise Unreachable(f"[stage llm] {exc}") from None
    if response.status_code < 200 or response.status_code >= 300:
        raise BadResponse(f"[stage llm] {response.text[:200]}",
                          status=response.status_code)
    try:
        return response.json()["text"]
    except Exception:
        raise BadResponse('[stage llm] response is not {"text": ...}') from None


def _collect_artifacts(result: PipelineResult, session_json: bytes,
                       final_png: bytes | None, annotations_json: bytes | None,
                       questionnaire_json: bytes | None) -> dict[str, bytes]:
    artifacts = {
        "session.json": session_json,
        "features.json": _json_bytes(result.profile.to_json_dict()),
        "description.json": _json_bytes(result.description.to_json_dict()),
        "description.txt": to_query(result.description).encode("utf-8"),
        "reconstruction.png": result.reconstruction_png,
        "prompt.txt": result.prompt.encode("utf-8"),
        "status.json": _json_bytes(result.stage_status),
    }
    if final_png is not None:
        artifacts["final.png"] = final_png
    if annotations_json is not None:
        artifacts["annotations.json"] = annotations_json
    if questionnaire_json is not None:
        artifacts["questionnaire.json"] = questionnaire_json
    if result.predicates is not None:
        artifacts["predicates.json"] = _json_bytes(sorted(result.predicates))
        artifacts["indicators.json"] = _json_bytes([
            {"meaning": m.meaning, "matched_features": list(m.matched_features),
             "rule_index": m.rule_index}
            for m in result.indicators])
    if result.retrieved:
        artifacts["retrieved.json"] = _json_bytes([
            {"id": c.id, "score": score, "source_doc": c.source_doc,
             "section_path": list(c.section_path), "text": c.text}
            for c, score in result.retrieved])
    if result.llm_response is not None:
        artifacts["llm_response.txt"] = result.llm_response.encode("utf-8")
    return artifacts


class RecordStore:
    """Flat-file store: records/<session_id>/{manifest.json, blobs/<sha256>}.

    Records are immutable once saved, except for attaching an LLM response
    later. Artifact bytes are content-addressed; the manifest carries the
    name-to-hash mapping plus the creation timestamp.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def record_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def exists(self, session_id: str) -> bool:
        return (self.record_dir(session_id) / "manifest.json").is_file()

    def save(self, result: PipelineResult) -> Path:
        record = self.record_dir(result.session_id)
        blobs = record / "blobs"
        blobs.mkdir(parents=True, exist_ok=True)
        names = {}
        for name, data in sorted(result.artifacts.items()):
            digest = hashlib.sha256(data).hexdigest()
            path = blobs / digest
            if not path.exists():
                path.write_bytes(data)
            names[name] = digest
        manifest = {
            "session_id": result.session_id,
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "stages": result.stage_status,
            "artifacts": names,
        }
        (record / "manifest.json").write_text(
            json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
        return record

    def manifest(self, session_id: str) -> dict:
        path = self.record_dir(session_id) / "manifest.json"
        return json.loads(path.read_text(encoding="utf-8"))

    def read_artifact(self, session_id: str, name: str) -> bytes:
        manifest = self.manifest(session_id)
        digest = manifest["artifacts"][name]
        return (self.record_dir(session_id) / "blobs" / digest).read_bytes()

    def attach_llm_response(self, session_id: str, text: str) -> None:
        record = self.record_dir(session_id)
        manifest = self.manifest(session_id)
        data = text.encode("utf-8")
        digest = hashlib.sha256(data).hexdigest()
        (record / "blobs" / digest).write_bytes(data)
        manifest["artifacts"]["llm_response.txt"] = digest
        (record / "manifest.json").write_text(
            json.dumps(manifest, indent=1) + "\n", encoding="utf-8")

    def list_sessions(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.name for p in self.root.iterdir()
                      if (p / "manifest.json").is_file())
