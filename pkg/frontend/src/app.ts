// Browser wiring: a fixed-size canvas driven by the DrawingEngine, a tool
// bar, the questionnaire form, and session submission with an offline
// download fallback.

import { DrawingEngine, Tool } from "./engine.js";
import { QUESTIONS, Questionnaire } from "./schema.js";
import { buildForm, submitSession } from "./submit.js";

const WIDTH = 800;
const HEIGHT = 600;
const SERVICE_URL = (window as any).INKTRACE_URL ?? "http://127.0.0.1:8321";

const engine = new DrawingEngine(WIDTH, HEIGHT);

const root = document.querySelector<HTMLDivElement>("#app")!;
root.innerHTML = `
  <h1>Drawing capture</h1>
  <p>Draw a house, a tree, and a person. Every stroke is recorded.</p>
  <div id="toolbar">
    <label>Tool
      <select id="tool">
        <option value="pen" selected>pen</option>
        <option value="eraser">eraser</option>
        <option value="bucket">bucket</option>
      </select>
    </label>
    <label>Color <input id="color" type="color" value="#000000"></label>
    <label>Width <input id="width" type="range" min="1" max="40" value="5"></label>
    <label>Opacity <input id="opacity" type="range" min="0.05" max="1" step="0.05" value="1"></label>
    <button id="undo">Undo</button>
    <button id="clear">Clear</button>
  </div>
  <canvas id="board" width="${WIDTH}" height="${HEIGHT}"></canvas>
  <form id="questionnaire">
    <h2>Questionnaire</h2>
    <label>Age <input name="age" type="number" min="1" max="120"></label>
    <label>Gender <input name="gender" type="text"></label>
  </form>
  <button id="submit">Submit drawing</button>
  <span id="status"></span>
`;

const board = document.querySelector<HTMLCanvasElement>("#board")!;
const context = board.getContext("2d")!;
const statusLine = document.querySelector<HTMLSpanElement>("#status")!;
const form = document.querySelector<HTMLFormElement>("#questionnaire")!;

for (const [i, question] of QUESTIONS.entries()) {
  const label = document.createElement("label");
  label.textContent = question;
  const input = document.createElement("input");
  input.type = "text";
  input.name = `q${i}`;
  label.append(input);
  form.append(label);
}

function repaint(): void {
  const image = new ImageData(
    new Uint8ClampedArray(engine.pixels()), WIDTH, HEIGHT);
  context.putImageData(image, 0, 0);
}
repaint();

function canvasPos(event: PointerEvent): [number, number] {
  const rect = board.getBoundingClientRect();
  return [event.clientX - rect.left, event.clientY - rect.top];
}

function pointerKind(event: PointerEvent): "mouse" | "pen" | "touch" {
  return event.pointerType === "pen" || event.pointerType === "touch"
    ? event.pointerType
    : "mouse";
}

let drawing = false;
board.addEventListener("pointerdown", (event) => {
  board.setPointerCapture(event.pointerId);
  drawing = true;
  const [x, y] = canvasPos(event);
  engine.pointerDown(x, y, pointerKind(event));
  repaint();
});
board.addEventListener("pointermove", (event) => {
  if (!drawing) return;
  const [x, y] = canvasPos(event);
  engine.pointerMove(x, y, pointerKind(event));
});
board.addEventListener("pointerup", () => {
  drawing = false;
  engine.pointerUp();
  repaint();
});

document.querySelector<HTMLSelectElement>("#tool")!.addEventListener(
  "change", (event) => {
    engine.settings.tool = (event.target as HTMLSelectElement).value as Tool;
  });
document.querySelector<HTMLInputElement>("#color")!.addEventListener(
  "input", (event) => {
    engine.settings.color = (event.target as HTMLInputElement).value;
  });
document.querySelector<HTMLInputElement>("#width")!.addEventListener(
  "input", (event) => {
    engine.settings.lineWidth = Number((event.target as HTMLInputElement).value);
  });
document.querySelector<HTMLInputElement>("#opacity")!.addEventListener(
  "input", (event) => {
    engine.settings.opacity = Number((event.target as HTMLInputElement).value);
  });
document.querySelector<HTMLButtonElement>("#undo")!.addEventListener(
  "click", () => {
    engine.undo();
    repaint();
  });
document.querySelector<HTMLButtonElement>("#clear")!.addEventListener(
  "click", () => {
    engine.clear();
    repaint();
  });

function collectQuestionnaire(): Questionnaire {
  const data = new FormData(form);
  const answers = [];
  for (const [i, question] of QUESTIONS.entries()) {
    const answer = String(data.get(`q${i}`) ?? "").trim();
    if (answer) answers.push({ question, answer });
  }
  const age = Number(data.get("age"));
  return {
    age: Number.isFinite(age) && age > 0 ? age : null,
    gender: String(data.get("gender") ?? "").trim() || null,
    answers,
  };
}

function exportBlob(): Promise<Blob> {
  repaint();
  return new Promise((resolve, reject) => {
    board.toBlob((blob) => blob ? resolve(blob) : reject(new Error("export failed")),
      "image/png");
  });
}

function download(name: string, blob: Blob): void {
  const anchor = document.createElement("a");
  anchor.href = URL.createObjectURL(blob);
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(anchor.href);
}

document.querySelector<HTMLButtonElement>("#submit")!.addEventListener(
  "click", async () => {
    if (engine.actionCount() === 0
        && !confirm("The canvas is empty. Submit anyway?")) {
      return;
    }
    statusLine.textContent = "uploading...";
    const png = await exportBlob();
    const formData = buildForm(engine.log(), png,
      { width: WIDTH, height: HEIGHT }, collectQuestionnaire());
    try {
      const result = await submitSession(SERVICE_URL, formData);
      statusLine.textContent = `submitted: session ${result.sessionId}`;
    } catch (error) {
      // offline fallback: keep the data locally, retry is manual
      statusLine.textContent = `upload failed (${error}); downloading instead`;
      download("session.json",
        new Blob([engine.exportLog()], { type: "application/json" }));
      download("final.png", png);
    }
  });
