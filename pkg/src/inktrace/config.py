"""Runtime configuration: defaults, environment overrides, `config show`."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

_ENV_PREFIX = "INKTRACE_"


@dataclass
class Config:
    records_dir: str = "./records"
    inference_endpoint: str = ""   # empty: annotations come from files only
    embed_endpoint: str = ""       # empty: deterministic hashing fallback
    llm_endpoint: str = ""         # empty: pipeline stops at the prompt
    embed_dim: int = 64
    http_timeout_s: float = 30.0
    resample_hz: float = 100.0
    sparc_amplitude_threshold: float = 0.05
    sparc_max_cutoff_hz: float = 20.0
    thick_width_px: float = 8.0
    faint_opacity: float = 0.35
    very_faint_opacity: float = 0.2
    excessive_color_count: int = 5
    edge_tolerance_px: float = 2.0
    chunk_size: int = 400
    chunk_overlap: int = 0
    semantic_threshold: float = 0.75
    kmeans_seed: int = 0
    retrieve_top_k: int = 5

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "Config":
        env = os.environ if env is None else env
        kwargs = {}
        for f in dataclasses.fields(cls):
            raw = env.get(_ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            if f.type in ("int", int):
                kwargs[f.name] = int(raw)
            elif f.type in ("float", float):
                kwargs[f.name] = float(raw)
            else:
                kwargs[f.name] = raw
        return cls(**kwargs)

    def show(self, fmt: str = "text") -> str:
        data = dataclasses.asdict(self)
        if fmt == "json":
            return json.dumps(data, indent=2)
        width = max(len(k) for k in data)
        lines = [f"{k.ljust(width)}  {v!r}  (env {_ENV_PREFIX}{k.upper()})"
                 for k, v in data.items()]
        return "\n".join(lines)

    def make_embedder(self):
        from .retrieval.embedding import HashingEmbedder, HttpEmbedder
        if self.embed_endpoint:
            return HttpEmbedder(self.embed_endpoint, timeout=self.http_timeout_s)
        return HashingEmbedder(dim=self.embed_dim)
