// Session upload: multipart POST to the analysis service.

import type { DrawAction, Questionnaire } from "./schema.js";

export interface SubmitResult {
  sessionId: string;
  stages: Record<string, string>;
}

export class SubmitError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`upload failed (${status}): ${detail}`);
  }
}

export function buildForm(
  actions: DrawAction[], png: Blob | Uint8Array,
  canvas: { width: number; height: number },
  questionnaire?: Questionnaire,
): FormData {
  const form = new FormData();
  form.append("metadata",
    new Blob([JSON.stringify(actions)], { type: "application/json" }),
    "session.json");
  const pngBlob = png instanceof Blob
    ? png
    : new Blob([png.slice().buffer as ArrayBuffer], { type: "image/png" });
  form.append("image", pngBlob, "final.png");
  form.append("canvas", `${canvas.width}x${canvas.height}`);
  if (questionnaire) {
    form.append("questionnaire",
      new Blob([JSON.stringify(questionnaire)], { type: "application/json" }),
      "questionnaire.json");
  }
  return form;
}

export async function submitSession(
  baseUrl: string, form: FormData,
): Promise<SubmitResult> {
  const response = await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    body: form,
  });
  if (response.status !== 201) {
    throw new SubmitError(response.status, await response.text());
  }
  const body = await response.json();
  return { sessionId: body.session_id, stages: body.stages ?? {} };
}
