import {
    AnnotationBody,
    CoveragePayload,
    Report,
    ScenarioSpec,
    Suggestion,
    TaxonomyDoc,
} from "./types.js";

/** A fetch-shaped function, injectable so tests can intercept requests. */
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Error carrying the server's {code, message} body and HTTP status. */
export class ApiRequestError extends Error {
    public constructor(
        public readonly status: number,
        public readonly code: string,
        message: string,
    ) {
        super(message);
    }
}

/** Thin typed client over the workbench HTTP API. Performs no domain
 * computation: every value returned is the server payload as parsed. */
export class ApiClient {
    public constructor(
        private readonly baseUrl: string = "",
        private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    ) {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await this.fetchFn(this.baseUrl + path, init);
        if (!response.ok) {
            let code = `HTTP ${response.status}`;
            let message = response.statusText;
            try {
                const body = await response.json();
                if (typeof body.code === "string") code = body.code;
                if (typeof body.message === "string") message = body.message;
                else if (typeof body.detail === "string") message = body.detail;
            } catch {
                /* non-JSON error body; keep the status line */
            }
            throw new ApiRequestError(response.status, code, message);
        }
        return response.json() as Promise<T>;
    }

    public taxonomy(): Promise<TaxonomyDoc> {
        return this.request<TaxonomyDoc>("/api/taxonomy");
    }

    public async reports(): Promise<Report[]> {
        const body = await this.request<{ reports: Report[] }>("/api/reports");
        return body.reports;
    }

    public report(reportId: string): Promise<Report> {
        return this.request<Report>(`/api/reports/${encodeURIComponent(reportId)}`);
    }

    public async suggestions(reportId: string): Promise<Suggestion[]> {
        const body = await this.request<{ suggestions: Suggestion[] }>(
            `/api/suggestions/${encodeURIComponent(reportId)}`);
        return body.suggestions;
    }

    public coverage(): Promise<CoveragePayload> {
        return this.request<CoveragePayload>("/api/coverage");
    }

    public submitAnnotation(body: AnnotationBody): Promise<AnnotationBody> {
        return this.request<AnnotationBody>("/api/annotations", {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }

    public async sample(k: number, seed: number): Promise<ScenarioSpec[]> {
        const body = await this.request<{ scenarios: ScenarioSpec[] }>(
            `/api/scenarios/sample?k=${k}&seed=${seed}`);
        return body.scenarios;
    }
}
