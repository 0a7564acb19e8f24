// Workbench shell: session bar + three screens (labeling, dashboard, audit).
// All data comes from the service; the taxonomy is fetched once at startup
// so label edits on the server never require a UI change.

import {
  AgreementReport,
  ApiError,
  Client,
  TaxonomyDoc,
} from "./api.js";
import { AuditSession } from "./audit.js";
import { buildDashboardModel, buildTrend, formatKappa, trendSvg } from "./dashboard.js";
import { LabelForm } from "./labelForm.js";
import { SpanSet, spanFromOffsets } from "./spans.js";

interface Session {
  client: Client;
  taxonomy: TaxonomyDoc;
  campaign: string;
  round: number;
  annotator: string;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function status(message: string, kind: "info" | "error" = "info"): void {
  const bar = document.getElementById("status")!;
  bar.textContent = message;
  bar.className = kind;
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (error) {
    if (error instanceof ApiError) status(`${error.status}: ${error.message}`, "error");
    else status(String(error), "error");
    return undefined;
  }
}

// --- labeling screen ---------------------------------------------------------

function renderLabelingScreen(root: HTMLElement, session: Session): void {
  root.replaceChildren();
  const reviewBox = el("div", { class: "review-text", id: "review-text" });
  const reviewMeta = el("div", { class: "muted" });
  const formBox = el("div", { class: "label-form" });
  const spanBox = el("div", { class: "span-list" });
  const submitButton = el("button", {}, "Submit annotation") as HTMLButtonElement;
  const skipNote = el("span", { class: "muted" }, "");

  let form = new LabelForm(session.taxonomy);
  let spans: SpanSet | null = null;
  let currentReviewId: string | null = null;
  let activeCategory: string | null = null;

  const displayName = new Map<string, string>();
  for (const g of session.taxonomy.generals) displayName.set(g.slug, g.display);
  for (const s of session.taxonomy.specifics) displayName.set(s.slug, s.display);

  function renderSpans(): void {
    spanBox.replaceChildren(el("h3", {}, "Spans"));
    if (!spans) return;
    spans.list().forEach((span, index) => {
      const chip = el(
        "span",
        { class: "chip" },
        `${span.category} [${span.start},${span.end}) "${span.surface}" `,
      );
      const removeButton = el("button", { class: "chip-x" }, "x");
      removeButton.addEventListener("click", () => {
        spans!.remove(index);
        renderSpans();
      });
      chip.append(removeButton);
      spanBox.append(chip);
    });
    const hint = activeCategory
      ? `select text in the review to add a ${activeCategory} span`
      : "enable a category and pick it below to add spans";
    spanBox.append(el("div", { class: "muted" }, hint));
  }

  function renderForm(): void {
    formBox.replaceChildren();
    for (const general of form.generals()) {
      const generalToggle = el("input", { type: "checkbox" }) as HTMLInputElement;
      generalToggle.checked = form.isOn(general);
      generalToggle.addEventListener("change", () => {
        form.setGeneral(general, generalToggle.checked);
        if (!generalToggle.checked && activeCategory === general) activeCategory = null;
        renderForm();
        renderSpans();
      });
      const headRow = el(
        "label",
        { class: "general-row" },
        generalToggle,
        ` ${displayName.get(general) ?? general}`,
      );
      const block = el("div", { class: "general-block" }, headRow);

      if (form.isOn(general)) {
        const spanPick = el("input", {
          type: "radio",
          name: "span-category",
        }) as HTMLInputElement;
        spanPick.checked = activeCategory === general;
        spanPick.addEventListener("change", () => {
          activeCategory = general;
          renderSpans();
        });
        headRow.append(el("span", { class: "muted" }, "  span target "), spanPick);

        const childBox = el("div", { class: "specifics" });
        for (const specific of form.visibleSpecifics(general)) {
          const box = el("input", { type: "checkbox" }) as HTMLInputElement;
          box.checked = form.isOn(specific);
          box.addEventListener("change", () => form.setSpecific(specific, box.checked));
          childBox.append(
            el("label", { class: "specific-row" }, box, ` ${displayName.get(specific) ?? specific}`),
          );
        }
        block.append(childBox);
      }
      formBox.append(block);
    }
  }

  async function loadNext(): Promise<void> {
    const next = await guard(() =>
      session.client.nextUnlabeled(session.campaign, session.round, session.annotator),
    );
    if (!next) return;
    if (next.done || !next.review) {
      currentReviewId = null;
      reviewBox.textContent = "";
      reviewMeta.textContent = "";
      skipNote.textContent = "No reviews left for you in this round.";
      submitButton.disabled = true;
      return;
    }
    currentReviewId = next.review.id;
    reviewBox.textContent = next.review.text;
    reviewMeta.textContent = `${next.review.id}${next.review.source ? ` - ${next.review.source}` : ""}`;
    form = new LabelForm(session.taxonomy);
    spans = new SpanSet(next.review.text);
    activeCategory = null;
    submitButton.disabled = false;
    skipNote.textContent = "";
    renderForm();
    renderSpans();
    status(`labeling ${next.review.id} as ${session.annotator} (round ${session.round})`);
  }

  reviewBox.addEventListener("mouseup", () => {
    if (!spans || !activeCategory || !currentReviewId) return;
    const selection = window.getSelection();
    if (!selection || selection.rangeCount === 0) return;
    const range = selection.getRangeAt(0);
    const textNode = reviewBox.firstChild;
    if (!textNode || range.startContainer !== textNode || range.endContainer !== textNode) return;
    const span = spanFromOffsets(reviewBox.textContent ?? "", range.startOffset, range.endOffset);
    if (!span) return;
    spans.add(activeCategory, span);
    selection.removeAllRanges();
    renderSpans();
  });

  submitButton.addEventListener("click", async () => {
    if (!currentReviewId || !spans) return;
    // structurally impossible to be inconsistent, but check anyway before
    // the server would reject with a 400
    if (!form.isConsistent()) {
      status("blocked: a specific aspect is on while its category is off", "error");
      return;
    }
    const posted = await guard(() =>
      session.client.postAnnotation({
        campaign: session.campaign,
        round: session.round,
        review_id: currentReviewId!,
        annotator: session.annotator,
        labels: form.payload(),
        spans: spans!.payload(),
      }),
    );
    if (posted !== undefined) {
      status(`saved ${currentReviewId}`);
      await loadNext();
    }
  });

  root.append(
    el("h2", {}, "Labeling"),
    reviewMeta,
    reviewBox,
    formBox,
    spanBox,
    el("div", { class: "actions" }, submitButton, skipNote),
  );
  void loadNext();
}

// --- round dashboard -----------------------------------------------------------

function renderDashboard(root: HTMLElement, session: Session): void {
  root.replaceChildren(el("h2", {}, "Round dashboard"));
  const controls = el("div", { class: "actions" });
  const content = el("div", {});
  root.append(controls, content);

  async function refresh(): Promise<void> {
    content.replaceChildren("loading...");
    const campaign = await guard(() => session.client.getCampaign(session.campaign));
    if (!campaign) {
      content.replaceChildren(el("div", { class: "error" }, "campaign not found"));
      return;
    }
    const agreements = new Map<number, AgreementReport>();
    for (const round of campaign.rounds) {
      const agreement = await guard(() =>
        session.client.getAgreement(session.campaign, round.number),
      );
      if (agreement) agreements.set(round.number, agreement);
    }
    const current = agreements.get(session.round);
    content.replaceChildren();

    const trend = buildTrend(agreements);
    content.append(el("h3", {}, "Mean κ by round"));
    const chart = el("div", { class: "trend" });
    chart.innerHTML = trendSvg(trend);
    content.append(
      chart,
      el(
        "div",
        { class: "muted" },
        trend.map((p) => `r${p.round}: ${p.mean === null ? "n/a" : formatKappa(p.mean)}`).join("   "),
      ),
    );

    content.append(el("h3", {}, `Round ${session.round} agreement`));
    if (!current) {
      content.append(el("div", { class: "error" }, "round not found"));
      return;
    }
    const labelOrder = [
      ...session.taxonomy.generals.map((g) => g.slug),
      ...session.taxonomy.specifics.map((s) => s.slug),
    ];
    const model = buildDashboardModel(current, labelOrder);
    if (!model.available) {
      content.append(el("div", { class: "warn" }, `agreement unavailable: ${model.reason}`));
      return;
    }
    content.append(
      el(
        "div",
        {},
        `annotators: ${model.annotators.join(", ")}   items: ${model.nItems}   `,
        el("strong", {}, `mean κ = ${formatKappa(model.mean!)}`),
      ),
    );
    const table = el("table", { class: "kappa" });
    table.append(el("tr", {}, el("th", {}, "label"), el("th", {}, "κ")));
    for (const row of model.rows) {
      const cell = el("td", {}, formatKappa(row.kappa));
      cell.dataset.kappa = String(row.kappa); // verbatim service value
      table.append(el("tr", {}, el("td", {}, row.slug), cell));
    }
    content.append(table);

    const disagreements = await guard(() =>
      session.client.getDisagreements(session.campaign, session.round),
    );
    content.append(el("h3", {}, "Disagreements"));
    if (!disagreements || disagreements.items.length === 0) {
      content.append(el("div", { class: "muted" }, "none"));
    } else {
      for (const item of disagreements.items) {
        const lines = Object.entries(item.labels).map(
          ([annotator, slugs]) => `${annotator}: ${slugs.join(", ") || "(none)"}`,
        );
        content.append(
          el(
            "div",
            { class: "disagreement" },
            el("strong", {}, item.review_id),
            ` ${item.text} `,
            el("div", { class: "muted" }, lines.join("  |  ")),
          ),
        );
      }
    }
  }

  const refreshButton = el("button", {}, "Refresh");
  refreshButton.addEventListener("click", () => void refresh());
  const closeButton = el("button", {}, "Close round / open next");
  closeButton.addEventListener("click", async () => {
    const closed = await guard(() => session.client.closeRound(session.campaign, session.round));
    if (closed === undefined) return;
    const opened = await guard(() => session.client.openRound(session.campaign));
    if (opened) {
      session.round = opened.number;
      (document.getElementById("session-round") as HTMLInputElement).value = String(opened.number);
      status(`round ${closed.number} closed; round ${opened.number} open`);
      void refresh();
    }
  });
  controls.append(refreshButton, closeButton);
  void refresh();
}

// --- audit screen -----------------------------------------------------------------

function renderAuditScreen(root: HTMLElement, session: Session): void {
  root.replaceChildren(el("h2", {}, "LLM audit"));
  const controls = el("div", { class: "actions" });
  const content = el("div", {});
  root.append(controls, content);
  let auditSession: AuditSession | null = null;

  const sizeInput = el("input", { type: "number", value: "13", min: "1" }) as HTMLInputElement;
  const seedInput = el("input", { type: "number", value: "7" }) as HTMLInputElement;
  const startButton = el("button", {}, "Sample for audit");

  function renderVerdicts(): void {
    content.replaceChildren();
    if (!auditSession) return;
    const accuracy = auditSession.runningAccuracy();
    content.append(
      el(
        "div",
        {},
        el("strong", {}, `running accuracy: ${accuracy === null ? "n/a" : accuracy.toFixed(4)}`),
        el("span", { class: "muted" }, `   ${auditSession.remaining().length} to review`),
      ),
    );
    for (const id of auditSession.ids()) {
      const verdict = auditSession.verdict(id);
      const correctButton = el("button", { class: verdict === true ? "on" : "" }, "correct");
      const wrongButton = el("button", { class: verdict === false ? "on" : "" }, "incorrect");
      correctButton.addEventListener("click", () => {
        auditSession!.setVerdict(id, true);
        renderVerdicts();
      });
      wrongButton.addEventListener("click", () => {
        auditSession!.setVerdict(id, false);
        renderVerdicts();
      });
      content.append(
        el(
          "div",
          { class: "audit-item" },
          el("strong", {}, id),
          ` ${auditSession.reviewText(id)} `,
          el("div", { class: "muted" }, `LLM: ${auditSession.llmLabels(id).join(", ") || "(none)"}`),
          correctButton,
          wrongButton,
        ),
      );
    }
    const submitButton = el("button", {}, "Record audit round") as HTMLButtonElement;
    submitButton.disabled = !auditSession.complete();
    submitButton.addEventListener("click", async () => {
      const recorded = await guard(() =>
        session.client.postVerdicts(
          session.campaign,
          auditSession!.sample.index,
          auditSession!.payload(),
        ),
      );
      if (recorded) {
        status(`audit round ${recorded.index} recorded: accuracy ${recorded.accuracy.toFixed(4)}`);
        auditSession = null;
        void renderHistory();
      }
    });
    content.append(el("div", { class: "actions" }, submitButton));
  }

  async function renderHistory(): Promise<void> {
    content.replaceChildren("loading...");
    const listed = await guard(() => session.client.listAuditRounds(session.campaign));
    content.replaceChildren();
    if (!listed) return;
    if (listed.pending) {
      auditSession = new AuditSession({ ...listed.pending, reviews: listed.pending.reviews ?? {} });
      renderVerdicts();
      return;
    }
    if (listed.rounds.length === 0) {
      content.append(el("div", { class: "muted" }, "no audit rounds yet"));
      return;
    }
    const table = el("table", { class: "kappa" });
    table.append(el("tr", {}, el("th", {}, "round"), el("th", {}, "sampled"), el("th", {}, "accuracy")));
    for (const round of listed.rounds) {
      table.append(
        el(
          "tr",
          {},
          el("td", {}, String(round.index)),
          el("td", {}, String(round.sampled_ids.length)),
          el("td", {}, round.accuracy.toFixed(4)),
        ),
      );
    }
    content.append(table);
  }

  startButton.addEventListener("click", async () => {
    const sample = await guard(() =>
      session.client.startAudit(session.campaign, Number(sizeInput.value), Number(seedInput.value)),
    );
    if (sample) {
      auditSession = new AuditSession(sample);
      renderVerdicts();
    }
  });

  controls.append("sample size ", sizeInput, " seed ", seedInput, startButton);
  void renderHistory();
}

// --- shell --------------------------------------------------------------------

async function boot(): Promise<void> {
  const app = document.getElementById("app")!;
  const serverInput = document.getElementById("session-server") as HTMLInputElement;
  const tokenInput = document.getElementById("session-token") as HTMLInputElement;
  const campaignInput = document.getElementById("session-campaign") as HTMLInputElement;
  const roundInput = document.getElementById("session-round") as HTMLInputElement;
  const annotatorInput = document.getElementById("session-annotator") as HTMLInputElement;
  const connectButton = document.getElementById("session-connect")!;

  let session: Session | null = null;

  function currentScreen(): string {
    const checked = document.querySelector<HTMLInputElement>("input[name=screen]:checked");
    return checked?.value ?? "labeling";
  }

  function renderScreen(): void {
    if (!session) return;
    session.campaign = campaignInput.value.trim();
    session.round = Number(roundInput.value);
    session.annotator = annotatorInput.value.trim();
    const screen = currentScreen();
    if (screen === "labeling") renderLabelingScreen(app, session);
    else if (screen === "dashboard") renderDashboard(app, session);
    else renderAuditScreen(app, session);
  }

  connectButton.addEventListener("click", async () => {
    const client = new Client(serverInput.value.replace(/\/$/, ""), tokenInput.value || undefined);
    const taxonomy = await guard(() => client.getTaxonomy());
    if (!taxonomy) return;
    session = {
      client,
      taxonomy,
      campaign: campaignInput.value.trim(),
      round: Number(roundInput.value),
      annotator: annotatorInput.value.trim(),
    };
    status(`connected: taxonomy v${taxonomy.version}, ${taxonomy.specifics.length} specific aspects`);
    renderScreen();
  });

  for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=screen]")) {
    radio.addEventListener("change", renderScreen);
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void boot();
}
