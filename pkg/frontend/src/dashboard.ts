// Round dashboard model. Every kappa shown here is taken from the
// /agreement response as-is -- the UI never computes agreement itself.

import type { AgreementReport } from "./api.js";

export interface KappaRow {
  slug: string;
  kappa: number; // exactly the value from the response
}

export interface DashboardModel {
  available: boolean;
  reason?: string;
  annotators: string[];
  nItems?: number;
  mean?: number;
  rows: KappaRow[];
}

export function buildDashboardModel(
  agreement: AgreementReport,
  labelOrder: string[],
): DashboardModel {
  if (!agreement.available) {
    return {
      available: false,
      reason: agreement.reason ?? "agreement unavailable",
      annotators: agreement.annotators ?? [],
      rows: [],
    };
  }
  const perLabel = agreement.per_label ?? {};
  const rows = labelOrder
    .filter((slug) => slug in perLabel)
    .map((slug) => ({ slug, kappa: perLabel[slug] }));
  return {
    available: true,
    annotators: agreement.annotators,
    nItems: agreement.n_items,
    mean: agreement.mean,
    rows,
  };
}

export interface TrendPoint {
  round: number;
  mean: number | null; // null when that round's agreement is unavailable
}

export function buildTrend(agreements: Map<number, AgreementReport>): TrendPoint[] {
  return [...agreements.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([round, agreement]) => ({
      round,
      mean: agreement.available && agreement.mean !== undefined ? agreement.mean : null,
    }));
}

// Tiny dependency-free line chart of the round-over-round mean kappa.
export function trendSvg(points: TrendPoint[], width = 320, height = 120): string {
  const pad = 18;
  const plotted = points.filter((p) => p.mean !== null) as { round: number; mean: number }[];
  if (plotted.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"></svg>`;
  }
  const xs = plotted.map((p) => p.round);
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const x = (round: number) =>
    maxX === minX ? width / 2 : pad + ((round - minX) / (maxX - minX)) * (width - 2 * pad);
  const y = (mean: number) => height - pad - Math.max(0, Math.min(1, mean)) * (height - 2 * pad);
  const path = plotted
    .map((p, i) => `${i === 0 ? "M" : "L"}${x(p.round).toFixed(1)},${y(p.mean).toFixed(1)}`)
    .join(" ");
  const dots = plotted
    .map(
      (p) =>
        `<circle cx="${x(p.round).toFixed(1)}" cy="${y(p.mean).toFixed(1)}" r="3">` +
        `<title>round ${p.round}: ${p.mean}</title></circle>`,
    )
    .join("");
  return (
    `<svg width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" role="img">` +
    `<path d="${path}" fill="none" stroke="currentColor" stroke-width="1.5"/>${dots}</svg>`
  );
}

export function formatKappa(value: number): string {
  return value.toFixed(3);
}
