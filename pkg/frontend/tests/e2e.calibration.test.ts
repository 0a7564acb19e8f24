// Full calibration demo against a locally served backend: one campaign,
// one round, two annotators, five reviews each, then agreement on the
// dashboard. Spawns the Python service as a child process.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { buildDashboardModel, buildTrend } from "../src/dashboard.js";
import { LabelForm } from "../src/labelForm.js";
import { SpanSet, spanFromOffsets } from "../src/spans.js";

const PORT = 8750 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let corpusPath: string;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const response = await fetch(`${BASE}/taxonomy`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("backend did not come up");
}

beforeAll(async () => {
  const probe = spawnSync(
    "python3",
    ["-c", "from aspekto.corpus import synthetic_corpus_path; print(synthetic_corpus_path())"],
    { encoding: "utf-8" },
  );
  if (probe.status !== 0) throw new Error(`aspekto not importable: ${probe.stderr}`);
  corpusPath = probe.stdout.trim();

  const storeDir = mkdtempSync(join(tmpdir(), "aspekto-e2e-"));
  server = spawn(
    "python3",
    [
      "-c",
      "import sys, uvicorn; from aspekto.service.app import create_app; " +
        `uvicorn.run(create_app(store_dir=sys.argv[1]), host='127.0.0.1', port=${PORT}, log_level='error')`,
      storeDir,
    ],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("calibration demo (2 annotators, 5 reviews, 1 round)", () => {
  it("runs the whole loop against the live backend", async () => {
    const client = new Client(BASE);
    const taxonomy = await client.getTaxonomy();
    expect(taxonomy.generals).toHaveLength(4);
    expect(taxonomy.specifics).toHaveLength(21);

    const campaign = await client.createCampaign("e2e calibration", corpusPath);
    expect(campaign.n_reviews).toBe(60);
    const round = await client.openRound(campaign.id);
    expect(round.number).toBe(1);

    // each annotator labels the same five reviews through the form
    const reviewIds: string[] = [];
    for (const annotator of ["ana", "ben"]) {
      for (let i = 0; i < 5; i++) {
        const next = await client.nextUnlabeled(campaign.id, 1, annotator);
        expect(next.done).toBe(false);
        const review = next.review!;
        if (annotator === "ana") reviewIds.push(review.id);

        const form = new LabelForm(taxonomy);
        const spans = new SpanSet(review.text);
        // deterministic toy labeling policy, slightly annotator-dependent:
        // first general on; ben adds its first specific when i is even
        const general = taxonomy.generals[i % taxonomy.generals.length].slug;
        form.setGeneral(general, true);
        if (annotator === "ben" && i % 2 === 0) {
          const child = taxonomy.specifics.find((s) => s.general === general)!;
          form.setSpecific(child.slug, true);
        }
        const selection = spanFromOffsets(review.text, 0, Math.min(4, review.text.length));
        if (selection) spans.add(general, selection);

        expect(form.isConsistent()).toBe(true);
        await client.postAnnotation({
          campaign: campaign.id,
          round: 1,
          review_id: review.id,
          annotator,
          labels: form.payload(),
          spans: spans.payload(),
        });
      }
    }

    // the form physically blocks inconsistent payloads; prove the server
    // would have rejected one anyway (client blocks before the 400)
    const inconsistent: Record<string, boolean> = {};
    const specific = taxonomy.specifics[0];
    inconsistent[specific.slug] = true;
    await expect(
      client.postAnnotation({
        campaign: campaign.id,
        round: 1,
        review_id: reviewIds[0],
        annotator: "cid",
        labels: inconsistent,
        spans: [],
      }),
    ).rejects.toMatchObject({ status: 400 });

    // duplicates surface as 409 for optimistic-submission handling
    await expect(
      client.postAnnotation({
        campaign: campaign.id,
        round: 1,
        review_id: reviewIds[0],
        annotator: "ana",
        labels: { [taxonomy.generals[0].slug]: true },
        spans: [],
      }),
    ).rejects.toMatchObject({ status: 409 });

    await client.closeRound(campaign.id, 1);

    const agreement = await client.getAgreement(campaign.id, 1);
    expect(agreement.available).toBe(true);
    expect(agreement.annotators).toEqual(["ana", "ben"]);
    expect(agreement.n_items).toBe(5);

    // dashboard values are the service's numbers verbatim
    const order = [
      ...taxonomy.generals.map((g) => g.slug),
      ...taxonomy.specifics.map((s) => s.slug),
    ];
    const model = buildDashboardModel(agreement, order);
    expect(model.mean).toBe(agreement.mean);
    expect(model.rows).toHaveLength(order.length);
    for (const row of model.rows) {
      expect(row.kappa).toBe(agreement.per_label![row.slug]);
    }
    const trend = buildTrend(new Map([[1, agreement]]));
    expect(trend).toEqual([{ round: 1, mean: agreement.mean! }]);

    // generals were split 50/50 between matching rounds-robin labels, so
    // agreement must be strictly between chance-only and perfect
    expect(model.mean!).toBeGreaterThan(0);
    expect(model.mean!).toBeLessThanOrEqual(1);
  }, 30_000);

  it("shows 'agreement unavailable' for a zero-overlap round", async () => {
    const client = new Client(BASE);
    const campaign = await client.createCampaign("e2e zero overlap", corpusPath);
    await client.openRound(campaign.id);
    const next = await client.nextUnlabeled(campaign.id, 1, "solo");
    const taxonomy = await client.getTaxonomy();
    const form = new LabelForm(taxonomy);
    form.setGeneral(taxonomy.generals[0].slug, true);
    await client.postAnnotation({
      campaign: campaign.id,
      round: 1,
      review_id: next.review!.id,
      annotator: "solo",
      labels: form.payload(),
      spans: [],
    });
    const agreement = await client.getAgreement(campaign.id, 1);
    const model = buildDashboardModel(agreement, []);
    expect(model.available).toBe(false);
    expect(model.reason).toBeTruthy();
  }, 30_000);
});
