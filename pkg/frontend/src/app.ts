import { ApiClient, ApiRequestError } from "./api.js";
import { buildCoverageView } from "./coverage.js";
import { DIFFICULTY_LABELS, DraftAnnotation, UNCLASSIFIED, leafIds } from "./draft.js";
import { formatScenarioDocument, scenarioSummary, validateSampleInputs } from "./sample.js";
import { Report, TaxonomyDoc, TaxonomyNode, isCategory } from "./types.js";

/** Wires the annotation flow, coverage dashboard, and sample panel to the
 * DOM. All displayed counts come straight from the server payloads. */
export class WorkbenchApp {
    private taxonomy!: TaxonomyDoc;
    private reports: Report[] = [];
    private position = 0;
    private draft: DraftAnnotation | null = null;

    public constructor(
        private readonly api: ApiClient,
        private readonly root: Document,
        private readonly annotator: string = "workbench",
    ) {}

    public async start(): Promise<void> {
        try {
            this.taxonomy = await this.api.taxonomy();
            this.reports = await this.api.reports();
            this.setOffline(false);
        } catch {
            this.setOffline(true);
            return;
        }
        this.renderTree();
        this.openReport(0);
        await this.refreshCoverage();
        this.root.addEventListener("keydown", (event) => {
            const target = event.target as HTMLElement | null;
            if (target && ["INPUT", "TEXTAREA", "SELECT"].includes(target.tagName))
                return;
            if (this.draft && this.draft.handleKey(event.key))
                this.renderDraft();
        });
        this.byId("sample-run").addEventListener("click", () => {
            void this.runSample();
        });
        this.byId("submit").addEventListener("click", () => {
            void this.submit();
        });
        this.byId("next-report").addEventListener("click", () => {
            this.openReport(this.position + 1);
        });
    }

    private byId(id: string): HTMLElement {
        const el = this.root.getElementById(id);
        if (!el) throw new Error(`missing element #${id}`);
        return el;
    }

    private setOffline(offline: boolean): void {
        this.byId("offline-banner").hidden = !offline;
    }

    private renderTree(): void {
        const container = this.byId("tree");
        container.textContent = "";
        const renderNode = (node: TaxonomyNode, parent: HTMLElement): void => {
            if (isCategory(node)) {
                const group = this.root.createElement("div");
                group.className = "tree-group";
                const heading = this.root.createElement("h4");
                heading.textContent = node.name;
                group.append(heading);
                node.children.forEach((child) => renderNode(child, group));
                parent.append(group);
            } else {
                const label = this.root.createElement("label");
                label.className = "tree-leaf";
                const box = this.root.createElement("input");
                box.type = "checkbox";
                box.dataset.leafId = node.id;
                box.addEventListener("change", () => {
                    this.draft?.toggleTag(node.id);
                    this.renderDraft();
                });
                label.append(box, ` ${node.id}. ${node.name}`);
                parent.append(label);
            }
        };
        this.taxonomy.categories.forEach((c) => renderNode(c, container));
    }

    private openReport(position: number): void {
        if (this.reports.length === 0) return;
        this.position = Math.min(position, this.reports.length - 1);
        const report = this.reports[this.position];
        this.draft = new DraftAnnotation(
            report.report_id, this.taxonomy.version, new Set(leafIds(this.taxonomy)));
        this.byId("report-id").textContent = report.report_id;
        this.byId("report-narrative").textContent = report.narrative;
        this.byId("report-meta").textContent =
            `${report.date} ${report.time_of_day} — ${report.manufacturer}, ` +
            `${report.city}, ${report.state} (${report.driving_mode})`;
        void this.renderSuggestions(report.report_id);
        this.renderDraft();
    }

    private async renderSuggestions(reportId: string): Promise<void> {
        const list = this.byId("suggestions");
        list.textContent = "";
        const suggestions = await this.api.suggestions(reportId);
        for (const s of suggestions) {
            const item = this.root.createElement("li");
            item.textContent = `${s.leaf_id} (${s.matched.join(", ")})`;
            list.append(item);
        }
    }

    private renderDraft(): void {
        if (!this.draft) return;
        for (const box of this.root.querySelectorAll<HTMLInputElement>(
                "#tree input[type=checkbox]")) {
            const leafId = box.dataset.leafId ?? "";
            box.checked = this.draft.tags.has(leafId);
        }
        const primary = this.byId("primary") as HTMLSelectElement;
        primary.textContent = "";
        for (const option of [...this.draft.tags].sort().concat(UNCLASSIFIED)) {
            const el = this.root.createElement("option");
            el.value = option;
            el.textContent = option;
            el.selected = option === this.draft.primary;
            primary.append(el);
        }
        primary.onchange = () => {
            this.draft?.setPrimary(primary.value);
            this.renderDraft();
        };
        const difficulty = this.byId("difficulty") as HTMLSelectElement;
        if (difficulty.childElementCount === 0) {
            for (const grade of [1, 2, 3, 4]) {
                const el = this.root.createElement("option");
                el.value = String(grade);
                el.textContent = `${grade} — ${DIFFICULTY_LABELS[grade]}`;
                difficulty.append(el);
            }
            difficulty.onchange = () => {
                this.draft?.setDifficulty(Number(difficulty.value));
                this.renderDraft();
            };
        }
        const blockers = this.draft.blockers();
        (this.byId("submit") as HTMLButtonElement).disabled = blockers.length > 0;
        this.byId("blockers").textContent = blockers.join("; ");
        this.byId("indecisive-badge").hidden = !this.draft.indecisiveWarning();
    }

    private async submit(): Promise<void> {
        if (!this.draft || !this.draft.canSubmit()) return;
        try {
            await this.api.submitAnnotation(this.draft.toBody(this.annotator));
            this.byId("submit-error").textContent = "";
            await this.refreshCoverage();
            this.openReport(this.position + 1);
        } catch (error) {
            this.byId("submit-error").textContent =
                error instanceof ApiRequestError
                    ? `${error.code}: ${error.message}`
                    : "request failed";
        }
    }

    private async refreshCoverage(): Promise<void> {
        let view;
        try {
            view = buildCoverageView(this.taxonomy, await this.api.coverage());
            this.setOffline(false);
        } catch {
            this.setOffline(true);
            return;
        }
        const bars = this.byId("coverage-bars");
        bars.textContent = "";
        const max = Math.max(1, ...view.bars.map((b) => b.count), view.unclassified);
        const addBar = (name: string, count: number): void => {
            const row = this.root.createElement("div");
            row.className = "bar-row";
            const label = this.root.createElement("span");
            label.textContent = `${name}: ${count}`;
            const bar = this.root.createElement("div");
            bar.className = "bar";
            bar.style.width = `${(count / max) * 100}%`;
            row.append(label, bar);
            bars.append(row);
        };
        for (const b of view.bars) addBar(b.name, b.count);
        addBar(UNCLASSIFIED, view.unclassified);
        this.byId("success-rate").textContent =
            `${view.successNumerator}/${view.successDenominator} ` +
            `(${view.successRendered})`;
        this.byId("difficulty-histogram").textContent = view.difficultyRows
            .map((r) => `${r.grade} ${DIFFICULTY_LABELS[Number(r.grade)]}: ${r.count}`)
            .join("  ");
    }

    private async runSample(): Promise<void> {
        const k = Number((this.byId("sample-k") as HTMLInputElement).value);
        const seed = Number((this.byId("sample-seed") as HTMLInputElement).value);
        const problems = validateSampleInputs(k, seed);
        this.byId("sample-error").textContent = problems.join("; ");
        if (problems.length > 0) return;
        const list = this.byId("sample-list");
        list.textContent = "";
        const scenarios = await this.api.sample(k, seed);
        for (const spec of scenarios) {
            const item = this.root.createElement("li");
            const summary = this.root.createElement("span");
            summary.textContent = scenarioSummary(spec);
            const copy = this.root.createElement("button");
            copy.textContent = "copy";
            copy.addEventListener("click", () => {
                void navigator.clipboard.writeText(formatScenarioDocument(spec));
            });
            item.append(summary, " ", copy);
            list.append(item);
        }
    }
}

if (typeof document !== "undefined" && document.getElementById("tree")) {
    void new WorkbenchApp(new ApiClient(), document).start();
}
