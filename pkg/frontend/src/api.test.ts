import { describe, expect, it } from "vitest";

import { ApiClient, ApiRequestError, FetchLike } from "./api.js";
import { buildCoverageView } from "./coverage.js";
import { fixtureCoverage, fixtureScenario, fixtureTaxonomy } from "./fixtures.test.js";
import { AnnotationBody, CoveragePayload } from "./types.js";

/** Deterministic stand-in for the HTTP API: serves the fixture payloads
 * and applies submitted annotations to its coverage state so the round
 * trip can be checked without a live server. */
class FakeServer {
    public coveragePayload: CoveragePayload = fixtureCoverage();
    public submissions: AnnotationBody[] = [];
    public requests: string[] = [];

    public fetch: FetchLike = async (url, init) => {
        this.requests.push(url);
        const json = (status: number, body: unknown): Response =>
            new Response(JSON.stringify(body), {
                status,
                headers: { "Content-Type": "application/json" },
            });
        if (url === "/api/taxonomy") return json(200, fixtureTaxonomy());
        if (url === "/api/coverage") return json(200, this.coveragePayload);
        if (url.startsWith("/api/scenarios/sample")) {
            const params = new URLSearchParams(url.split("?")[1]);
            const k = Number(params.get("k"));
            const seed = Number(params.get("seed"));
            if (!(k >= 1)) return json(422, { detail: "k must be >= 1" });
            // keyed purely by (seed, ordinal): equal seeds, equal payloads
            return json(200, {
                scenarios: Array.from({ length: k }, (_, i) => ({
                    ...fixtureScenario(i),
                    scenario_id: `sample-${seed}-${i}`,
                    seed,
                })),
            });
        }
        if (url === "/api/annotations" && init?.method === "POST") {
            const body = JSON.parse(String(init.body)) as AnnotationBody;
            if (body.primary !== "Unclassified" && !body.tags.includes(body.primary))
                return json(400, {
                    code: "PrimaryNotInTags",
                    message: "primary must be among the tags",
                });
            this.submissions.push(body);
            const counts = { ...this.coveragePayload.primary_counts };
            if (body.primary === "M") counts["Traffic Agents"] += 1;
            this.coveragePayload = {
                ...this.coveragePayload,
                primary_counts: counts,
                total: this.coveragePayload.total + 1,
            };
            return json(200, body);
        }
        return json(404, { code: "NotFound", message: url });
    };
}

describe("ApiClient", () => {
    it("renders the coverage payload byte-for-byte after an annotation", async () => {
        const server = new FakeServer();
        const api = new ApiClient("", server.fetch);
        await api.submitAnnotation({
            report_id: "CA-2023-001",
            taxonomy_version: 1,
            tags: ["B", "E", "G", "I", "M"],
            primary: "M",
            difficulty: 2,
            annotator: "workbench",
            notes: "",
        });
        const payload = await api.coverage();
        expect(JSON.stringify(payload))
            .toBe(JSON.stringify(server.coveragePayload));
        const view = buildCoverageView(fixtureTaxonomy(), payload);
        const agents = view.bars.find((b) => b.name === "Traffic Agents");
        expect(agents?.count).toBe(73);
    });

    it("surfaces a 400 with the server's error code", async () => {
        const server = new FakeServer();
        const api = new ApiClient("", server.fetch);
        await expect(api.submitAnnotation({
            report_id: "CA-2023-001",
            taxonomy_version: 1,
            tags: ["G"],
            primary: "H",
            difficulty: 1,
            annotator: "workbench",
            notes: "",
        })).rejects.toMatchObject({ status: 400, code: "PrimaryNotInTags" });
        expect(server.submissions).toHaveLength(0);
    });

    it("returns identical sample lists for equal seeds across refreshes", async () => {
        const api = new ApiClient("", new FakeServer().fetch);
        const first = await api.sample(5, 7);
        const second = await api.sample(5, 7);
        expect(JSON.stringify(first)).toBe(JSON.stringify(second));
        expect(first).toHaveLength(5);
    });

    it("maps invalid sample parameters to an ApiRequestError", async () => {
        const api = new ApiClient("", new FakeServer().fetch);
        await expect(api.sample(0, 7)).rejects.toBeInstanceOf(ApiRequestError);
    });

    it("propagates network failure so the caller can show the offline banner", async () => {
        const api = new ApiClient("", async () => {
            throw new TypeError("fetch failed");
        });
        await expect(api.coverage()).rejects.toThrow("fetch failed");
    });
});
