"""Grounded-interpretation prompt assembly (deterministic template)."""

from __future__ import annotations

from typing import Sequence

from ..stroke_log import QuestionnaireResponse
from .index import KnowledgeChunk

_SYSTEM = (
    "You are assisting a clinician with a house-tree-person drawing "
    "assessment. Interpret the drawing description below using ONLY the "
    "numbered reference passages. Cite the passage number for every "
    "claim; if no passage supports a statement, say so instead of "
    "speculating."
)

_NO_CONTEXT = (
    "No reference passages are available. Restate only the observable "
    "facts from the description and questionnaire; do not make symbolic "
    "or psychological claims."
)


def assemble_prompt(description_text: str,
                    retrieved: Sequence[tuple[KnowledgeChunk, float]],
                    questionnaire: QuestionnaireResponse | None = None) -> str:
    parts = [_SYSTEM, ""]
    if retrieved:
        parts.append("# Reference passages")
        for i, (chunk, score) in enumerate(retrieved, start=1):
            where = " / ".join(chunk.section_path) or chunk.source_doc
            parts.append(f"[{i}] ({chunk.source_doc}: {where}; "
                         f"similarity {score:.3f})")
            parts.append(chunk.text)
            parts.append("")
    else:
        parts.append(_NO_CONTEXT)
        parts.append("")
    parts.append("# Drawing description")
    parts.append(description_text.rstrip("\n"))
    parts.append("")
    if questionnaire is not None and questionnaire.answers:
        parts.append("# Questionnaire")
        for question, answer in questionnaire.answers:
            parts.append(f"Q: {question}")
            parts.append(f"A: {answer}")
        parts.append("")
    parts.append(
        "# Task\n"
        "Write the interpretation. Ground every claim in a cited reference "
        "passage using [n] citations."
    )
    return "\n".join(parts) + "\n"
