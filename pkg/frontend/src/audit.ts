// Audit screen state: sampled machine-labeled reviews get human
// correct/incorrect verdicts; running accuracy is shown as they come in.

import type { AuditSample } from "./api.js";

export class AuditSession {
  private verdicts = new Map<string, boolean>();

  constructor(readonly sample: AuditSample) {}

  ids(): string[] {
    return [...this.sample.sampled_ids];
  }

  reviewText(id: string): string {
    return this.sample.reviews[id] ?? "";
  }

  llmLabels(id: string): string[] {
    return this.sample.llm_labels[id] ?? [];
  }

  setVerdict(id: string, correct: boolean): void {
    if (!this.sample.sampled_ids.includes(id)) {
      throw new Error(`review ${id} is not part of this audit sample`);
    }
    this.verdicts.set(id, correct);
  }

  verdict(id: string): boolean | undefined {
    return this.verdicts.get(id);
  }

  remaining(): string[] {
    return this.sample.sampled_ids.filter((id) => !this.verdicts.has(id));
  }

  complete(): boolean {
    return this.remaining().length === 0;
  }

  // Accuracy over the verdicts entered so far; null until the first one.
  runningAccuracy(): number | null {
    if (this.verdicts.size === 0) return null;
    let correct = 0;
    for (const ok of this.verdicts.values()) if (ok) correct += 1;
    return correct / this.verdicts.size;
  }

  payload(): Record<string, boolean> {
    const out: Record<string, boolean> = {};
    for (const [id, ok] of this.verdicts) out[id] = ok;
    return out;
  }
}
