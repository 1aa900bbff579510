// Drawing engine: turns pointer events into log actions and keeps the
// canvas buffer in sync by replaying the log. Undo removes the last action
// and re-renders from what remains, so the log is always the single source
// of truth for the pixels.

import type { ActionType, DrawAction, PointerType } from "./schema.js";
import { applyAction, Canvas, createCanvas, replay } from "./raster.js";

export type Tool = "pen" | "eraser" | "bucket";

export interface ToolSettings {
  tool: Tool;
  color: string;
  opacity: number;
  lineWidth: number;
}

export interface EngineOptions {
  clock?: () => number; // epoch ms; injectable for deterministic tests
}

const TOOL_ACTION: Record<Tool, ActionType> = {
  pen: "drawLine",
  eraser: "erase",
  bucket: "bucketFill",
};

export class DrawingEngine {
  readonly width: number;
  readonly height: number;
  settings: ToolSettings = { tool: "pen", color: "#000000", opacity: 1, lineWidth: 5 };

  private actions: DrawAction[] = [];
  private canvas: Canvas;
  private inProgress: DrawAction | null = null;
  private clock: () => number;
  private lastTimestamp = 0;

  constructor(width: number, height: number, options: EngineOptions = {}) {
    this.width = width;
    this.height = height;
    this.canvas = createCanvas(width, height);
    this.clock = options.clock ?? Date.now;
  }

  /** Monotone timestamp: never before the previous event or action end. */
  private now(): number {
    const t = Math.max(Math.round(this.clock()), this.lastTimestamp, 1);
    this.lastTimestamp = t;
    return t;
  }

  pointerDown(x: number, y: number, pointerType: PointerType = "mouse"): void {
    if (this.inProgress) this.pointerUp();
    const t = this.now();
    if (this.settings.tool === "bucket") {
      const action: DrawAction = {
        order: this.actions.length + 1,
        action_type: "bucketFill",
        color: this.settings.color,
        opacity: this.settings.opacity,
        line_width: this.settings.lineWidth,
        timestamp_start: t,
        timestamp_end: t,
        points: [{ x, y, pointerType, timestamp: t }],
      };
      this.actions.push(action);
      applyAction(this.canvas, action);
      return;
    }
    this.inProgress = {
      order: this.actions.length + 1,
      action_type: TOOL_ACTION[this.settings.tool],
      color: this.settings.color,
      opacity: this.settings.opacity,
      line_width: this.settings.lineWidth,
      timestamp_start: t,
      timestamp_end: t,
      points: [{ x, y, pointerType, timestamp: t }],
    };
  }

  pointerMove(x: number, y: number, pointerType: PointerType = "mouse"): void {
    if (!this.inProgress) return;
    this.inProgress.points.push({ x, y, pointerType, timestamp: this.now() });
  }

  /** Finalize the in-flight stroke (degenerate taps stay single-point). */
  pointerUp(): DrawAction | null {
    const action = this.inProgress;
    if (!action) return null;
    this.inProgress = null;
    action.timestamp_end = this.now();
    this.actions.push(action);
    applyAction(this.canvas, action);
    return action;
  }

  /** Remove the last action and re-render the canvas from the log. */
  undo(): boolean {
    if (this.inProgress) {
      this.inProgress = null;
      return true;
    }
    if (this.actions.length === 0) return false;
    this.actions.pop();
    this.canvas = replay(this.actions, this.width, this.height);
    return true;
  }

  clear(): void {
    this.actions = [];
    this.inProgress = null;
    this.canvas = createCanvas(this.width, this.height);
  }

  log(): DrawAction[] {
    return this.actions.map((a) => ({ ...a, points: [...a.points] }));
  }

  exportLog(): string {
    return JSON.stringify(this.actions);
  }

  /** Current pixels (RGBA); replay(log) is always identical to this. */
  pixels(): Uint8ClampedArray {
    return this.canvas.data;
  }

  actionCount(): number {
    return this.actions.length;
  }
}
