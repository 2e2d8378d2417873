import { TaxonomyDoc, TaxonomyNode, isCategory } from "./types.js";

export const UNCLASSIFIED = "Unclassified";

/** Human-readable difficulty labels shown beside the 1-4 grade picker. */
export const DIFFICULTY_LABELS: Record<number, string> = {
    1: "Easy",
    2: "Moderate",
    3: "Difficult",
    4: "Indecisive",
};

/** Collect leaf ids from a taxonomy document, in tree order. */
export function leafIds(doc: TaxonomyDoc): string[] {
    const ids: string[] = [];
    const visit = (node: TaxonomyNode): void => {
        if (isCategory(node)) node.children.forEach(visit);
        else ids.push(node.id);
    };
    doc.categories.forEach(visit);
    return ids;
}

/** Mutable draft of one annotation. Mirrors the server-side invariants so
 * the submit button can be gated before any network round trip; the server
 * remains authoritative and its rejections are surfaced inline. */
export class DraftAnnotation {
    public tags = new Set<string>();
    public primary: string | null = null;
    public difficulty: number | null = null;
    public notes = "";

    public constructor(
        public readonly reportId: string,
        public readonly taxonomyVersion: number,
        private readonly knownLeafIds: ReadonlySet<string>,
    ) {}

    /** Toggle a tag; the primary is cleared if its tag is removed. */
    public toggleTag(leafId: string): boolean {
        if (!this.knownLeafIds.has(leafId)) return false;
        if (this.tags.has(leafId)) {
            this.tags.delete(leafId);
            if (this.primary === leafId) this.primary = null;
        } else {
            this.tags.add(leafId);
        }
        return true;
    }

    /** Letter-key shortcut: an upper- or lower-case leaf letter toggles it. */
    public handleKey(key: string): boolean {
        if (key.length !== 1) return false;
        return this.toggleTag(key.toUpperCase());
    }

    /** A primary must be one of the selected tags, or Unclassified. */
    public setPrimary(value: string): boolean {
        if (value !== UNCLASSIFIED && !this.tags.has(value)) return false;
        this.primary = value;
        return true;
    }

    public setDifficulty(grade: number): boolean {
        if (!Number.isInteger(grade) || grade < 1 || grade > 4) return false;
        this.difficulty = grade;
        return true;
    }

    /** Reasons submission is still disabled; empty means ready. */
    public blockers(): string[] {
        const out: string[] = [];
        if (this.tags.size === 0) out.push("select at least one tag");
        if (this.primary === null) out.push("pick a primary (or Unclassified)");
        else if (this.primary !== UNCLASSIFIED && !this.tags.has(this.primary))
            out.push("primary must be one of the selected tags");
        if (this.difficulty === null) out.push("set a difficulty grade");
        return out;
    }

    public canSubmit(): boolean {
        return this.blockers().length === 0;
    }

    /** Grade 4 with a named primary is legal but flagged for review. */
    public indecisiveWarning(): boolean {
        return this.difficulty === 4 && this.primary !== null
            && this.primary !== UNCLASSIFIED;
    }

    public toBody(annotator: string): {
        report_id: string;
        taxonomy_version: number;
        tags: string[];
        primary: string;
        difficulty: number;
        annotator: string;
        notes: string;
    } {
        if (!this.canSubmit() || this.primary === null || this.difficulty === null)
            throw new Error("draft does not satisfy the submission invariants");
        return {
            report_id: this.reportId,
            taxonomy_version: this.taxonomyVersion,
            tags: [...this.tags].sort(),
            primary: this.primary,
            difficulty: this.difficulty,
            annotator,
            notes: this.notes,
        };
    }
}

/** True when a stored annotation predates the current taxonomy: the tree
 * picker shows a revision badge prompting re-review. */
export function needsReview(annotationVersion: number,
                            taxonomyVersion: number): boolean {
    return taxonomyVersion > annotationVersion;
}
