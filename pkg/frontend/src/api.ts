// Typed client for the aspekto HTTP API. The workbench talks only to this
// service; all agreement math happens server-side.

export interface TaxonomyGeneral {
  slug: string;
  display: string;
}

export interface TaxonomySpecific {
  slug: string;
  general: string;
  display: string;
}

export interface TaxonomyDoc {
  version: string;
  generals: TaxonomyGeneral[];
  specifics: TaxonomySpecific[];
}

export interface RoundInfo {
  number: number;
  status: string;
  annotators: string[];
  n_annotations: number;
}

export interface CampaignInfo {
  id: string;
  name: string;
  corpus_path: string;
  n_reviews: number;
  rounds: RoundInfo[];
  n_audit_rounds: number;
}

export interface AgreementReport {
  available: boolean;
  reason?: string;
  annotators: string[];
  n_items?: number;
  review_ids?: string[];
  per_label?: Record<string, number>;
  mean?: number;
}

export interface DisagreementItem {
  review_id: string;
  text: string;
  labels: Record<string, string[]>;
}

export interface SpanPayload {
  category: string;
  start: number;
  end: number;
}

export interface AnnotationPayload {
  campaign: string;
  round: number;
  review_id: string;
  annotator: string;
  labels: Record<string, boolean>;
  spans: SpanPayload[];
}

export interface ReviewOut {
  id: string;
  text: string;
  source?: string | null;
}

export interface NextReview {
  done: boolean;
  review: ReviewOut | null;
}

export interface AuditSample {
  index: number;
  seed: number;
  sampled_ids: string[];
  llm_labels: Record<string, string[]>;
  reviews: Record<string, string>;
}

export interface AuditRecorded {
  index: number;
  accuracy: number;
  verdicts: Record<string, boolean>;
}

export interface AuditList {
  rounds: { index: number; seed: number; sampled_ids: string[]; accuracy: number }[];
  pending: AuditSample | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class Client {
  constructor(
    private baseUrl: string,
    private token?: string,
  ) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    const headers: Record<string, string> = {
      "Content-Type": "application/json",
      ...(init.headers as Record<string, string> | undefined),
    };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(`${this.baseUrl}${path}`, { ...init, headers });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (body && typeof body.detail === "string") detail = body.detail;
        else if (body) detail = JSON.stringify(body);
      } catch {
        // non-JSON error body; keep statusText
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getTaxonomy(): Promise<TaxonomyDoc> {
    return this.request<TaxonomyDoc>("/taxonomy");
  }

  tag(text: string): Promise<Record<string, boolean>> {
    return this.request<Record<string, boolean>>("/tag", {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  listCampaigns(): Promise<CampaignInfo[]> {
    return this.request<CampaignInfo[]>("/campaigns");
  }

  getCampaign(id: string): Promise<CampaignInfo> {
    return this.request<CampaignInfo>(`/campaigns/${encodeURIComponent(id)}`);
  }

  createCampaign(name: string, corpusPath: string, llmLabelsPath?: string): Promise<CampaignInfo> {
    return this.request<CampaignInfo>("/campaigns", {
      method: "POST",
      body: JSON.stringify({
        name,
        corpus_path: corpusPath,
        llm_labels_path: llmLabelsPath ?? null,
      }),
    });
  }

  openRound(campaign: string): Promise<RoundInfo> {
    return this.request<RoundInfo>(`/campaigns/${encodeURIComponent(campaign)}/rounds`, {
      method: "POST",
      body: "{}",
    });
  }

  closeRound(campaign: string, round: number): Promise<RoundInfo> {
    return this.request<RoundInfo>(
      `/campaigns/${encodeURIComponent(campaign)}/rounds/${round}/close`,
      { method: "POST", body: "{}" },
    );
  }

  nextUnlabeled(campaign: string, round: number, annotator: string): Promise<NextReview> {
    const query = new URLSearchParams({ campaign, round: String(round), annotator });
    return this.request<NextReview>(`/reviews/next-unlabeled?${query}`);
  }

  postAnnotation(payload: AnnotationPayload): Promise<unknown> {
    return this.request("/annotations", { method: "POST", body: JSON.stringify(payload) });
  }

  getAgreement(campaign: string, round: number): Promise<AgreementReport> {
    const query = new URLSearchParams({ campaign, round: String(round) });
    return this.request<AgreementReport>(`/agreement?${query}`);
  }

  getDisagreements(campaign: string, round: number): Promise<{ items: DisagreementItem[] }> {
    const query = new URLSearchParams({ campaign, round: String(round) });
    return this.request<{ items: DisagreementItem[] }>(`/disagreements?${query}`);
  }

  startAudit(campaign: string, sampleSize: number, seed: number): Promise<AuditSample> {
    return this.request<AuditSample>(
      `/campaigns/${encodeURIComponent(campaign)}/audit-rounds`,
      { method: "POST", body: JSON.stringify({ sample_size: sampleSize, seed }) },
    );
  }

  listAuditRounds(campaign: string): Promise<AuditList> {
    return this.request<AuditList>(`/campaigns/${encodeURIComponent(campaign)}/audit-rounds`);
  }

  postVerdicts(campaign: string, index: number, verdicts: Record<string, boolean>): Promise<AuditRecorded> {
    return this.request<AuditRecorded>(
      `/campaigns/${encodeURIComponent(campaign)}/audit-rounds/${index}/verdicts`,
      { method: "POST", body: JSON.stringify({ verdicts }) },
    );
  }
}
