import { describe, expect, it } from "vitest";

import type { AgreementReport } from "../src/api.js";
import { buildDashboardModel, buildTrend, trendSvg } from "../src/dashboard.js";
import { AuditSession } from "../src/audit.js";

const ORDER = ["PRODUCT", "PRICE", "PRODUCT.Color", "PRICE.Affordability"];

describe("buildDashboardModel", () => {
  it("passes kappa values through verbatim, never recomputing", () => {
    const agreement: AgreementReport = {
      available: true,
      annotators: ["ana", "ben"],
      n_items: 5,
      per_label: {
        PRODUCT: 0.6927083333333331,
        PRICE: 1.0,
        "PRODUCT.Color": -0.09090909090909091,
        "PRICE.Affordability": 0.0,
      },
      mean: 0.4004498106060606,
    };
    const model = buildDashboardModel(agreement, ORDER);
    expect(model.available).toBe(true);
    expect(model.mean).toBe(agreement.mean);
    for (const row of model.rows) {
      expect(row.kappa).toBe(agreement.per_label![row.slug]);
    }
    expect(model.rows.map((r) => r.slug)).toEqual(ORDER);
  });

  it("surfaces the unavailable case", () => {
    const model = buildDashboardModel(
      { available: false, reason: "need at least 2 annotators", annotators: ["ana"] },
      ORDER,
    );
    expect(model.available).toBe(false);
    expect(model.reason).toMatch(/2 annotators/);
    expect(model.rows).toEqual([]);
  });
});

describe("buildTrend", () => {
  it("orders rounds and marks unavailable ones", () => {
    const agreements = new Map<number, AgreementReport>([
      [2, { available: true, annotators: ["a", "b"], mean: 0.4, per_label: {} }],
      [1, { available: true, annotators: ["a", "b"], mean: 0.25, per_label: {} }],
      [3, { available: false, annotators: [], reason: "no overlap" }],
    ]);
    expect(buildTrend(agreements)).toEqual([
      { round: 1, mean: 0.25 },
      { round: 2, mean: 0.4 },
      { round: 3, mean: null },
    ]);
  });

  it("renders an svg with one dot per available round", () => {
    const svg = trendSvg([
      { round: 1, mean: 0.25 },
      { round: 2, mean: 0.4 },
      { round: 3, mean: null },
    ]);
    expect(svg).toContain("<svg");
    expect(svg.match(/<circle/g)).toHaveLength(2);
  });
});

describe("AuditSession", () => {
  const sample = {
    index: 1,
    seed: 7,
    sampled_ids: ["r1", "r2", "r3"],
    llm_labels: { r1: ["PRICE"], r2: [], r3: ["PRODUCT"] },
    reviews: { r1: "mura", r2: "ok", r3: "ganda" },
  };

  it("tracks running accuracy and completeness", () => {
    const session = new AuditSession(sample);
    expect(session.runningAccuracy()).toBeNull();
    session.setVerdict("r1", true);
    session.setVerdict("r2", false);
    expect(session.runningAccuracy()).toBeCloseTo(0.5, 12);
    expect(session.complete()).toBe(false);
    session.setVerdict("r3", true);
    expect(session.complete()).toBe(true);
    expect(session.runningAccuracy()).toBeCloseTo(2 / 3, 12);
    expect(session.payload()).toEqual({ r1: true, r2: false, r3: true });
  });

  it("rejects verdicts for unsampled reviews", () => {
    const session = new AuditSession(sample);
    expect(() => session.setVerdict("r99", true)).toThrow(/not part of this audit sample/);
  });
});
