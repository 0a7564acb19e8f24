// Character-offset span selection. Offsets are raw character positions in
// the review text; no token snapping (downstream scoring normalizes).

import type { SpanPayload } from "./api.js";

export interface CharSpan {
  start: number;
  end: number;
}

// Normalize a (possibly reversed) selection into a half-open span, clamped
// to the text; empty selections yield null.
export function spanFromOffsets(text: string, anchor: number, focus: number): CharSpan | null {
  const start = Math.max(0, Math.min(anchor, focus));
  const end = Math.min(text.length, Math.max(anchor, focus));
  if (start >= end) return null;
  return { start, end };
}

export function surface(text: string, span: CharSpan): string {
  return text.slice(span.start, span.end);
}

export class SpanSet {
  private spans: SpanPayload[] = [];

  constructor(private readonly text: string) {}

  add(category: string, span: CharSpan): SpanPayload {
    if (span.start < 0 || span.end > this.text.length || span.start >= span.end) {
      throw new Error(`invalid span [${span.start}, ${span.end})`);
    }
    const payload = { category, start: span.start, end: span.end };
    this.spans.push(payload);
    return payload;
  }

  remove(index: number): void {
    this.spans.splice(index, 1);
  }

  list(): (SpanPayload & { surface: string })[] {
    return this.spans.map((s) => ({ ...s, surface: this.text.slice(s.start, s.end) }));
  }

  payload(): SpanPayload[] {
    return this.spans.map((s) => ({ ...s }));
  }

  clear(): void {
    this.spans = [];
  }
}
