import { describe, expect, it } from "vitest";

import { DIFFICULTY_LABELS, DraftAnnotation, UNCLASSIFIED, leafIds, needsReview } from "./draft.js";
import { fixtureTaxonomy } from "./fixtures.test.js";

function makeDraft(): DraftAnnotation {
    return new DraftAnnotation("CA-2023-001", 1,
        new Set(leafIds(fixtureTaxonomy())));
}

describe("leafIds", () => {
    it("walks nested categories in tree order", () => {
        expect(leafIds(fixtureTaxonomy()).join("")).toBe("ABCDEFGHIJKLMNO");
    });
});

describe("DraftAnnotation", () => {
    it("starts with submission disabled", () => {
        expect(makeDraft().canSubmit()).toBe(false);
    });

    it("accepts the five-tag flow and produces a request body", () => {
        const draft = makeDraft();
        for (const leaf of ["G", "M", "B", "I", "E"]) draft.toggleTag(leaf);
        draft.setPrimary("M");
        draft.setDifficulty(2);
        expect(draft.canSubmit()).toBe(true);
        expect(draft.toBody("workbench")).toEqual({
            report_id: "CA-2023-001",
            taxonomy_version: 1,
            tags: ["B", "E", "G", "I", "M"],
            primary: "M",
            difficulty: 2,
            annotator: "workbench",
            notes: "",
        });
    });

    it("keeps submit disabled until a tag is selected", () => {
        const draft = makeDraft();
        expect(draft.setPrimary("M")).toBe(false);
        draft.setDifficulty(1);
        expect(draft.canSubmit()).toBe(false);
        expect(draft.blockers()).toContain("select at least one tag");
    });

    it("letter keys toggle tags case-insensitively", () => {
        const draft = makeDraft();
        expect(draft.handleKey("g")).toBe(true);
        expect(draft.tags.has("G")).toBe(true);
        expect(draft.handleKey("G")).toBe(true);
        expect(draft.tags.has("G")).toBe(false);
        expect(draft.handleKey("Enter")).toBe(false);
        expect(draft.handleKey("z")).toBe(false);
    });

    it("clears the primary when its tag is removed", () => {
        const draft = makeDraft();
        draft.toggleTag("H");
        draft.setPrimary("H");
        draft.toggleTag("H");
        expect(draft.primary).toBeNull();
    });

    it("allows Unclassified as primary without a matching tag", () => {
        const draft = makeDraft();
        draft.toggleTag("G");
        expect(draft.setPrimary(UNCLASSIFIED)).toBe(true);
        draft.setDifficulty(4);
        expect(draft.canSubmit()).toBe(true);
        expect(draft.indecisiveWarning()).toBe(false);
    });

    it("flags difficulty 4 with a named primary as indecisive", () => {
        const draft = makeDraft();
        draft.toggleTag("M");
        draft.setPrimary("M");
        draft.setDifficulty(4);
        expect(draft.indecisiveWarning()).toBe(true);
        expect(draft.canSubmit()).toBe(true);
    });

    it("rejects out-of-range difficulty grades", () => {
        const draft = makeDraft();
        expect(draft.setDifficulty(0)).toBe(false);
        expect(draft.setDifficulty(5)).toBe(false);
        expect(draft.setDifficulty(2.5)).toBe(false);
        expect(draft.difficulty).toBeNull();
    });

    it("refuses to build a body while invariants are unmet", () => {
        expect(() => makeDraft().toBody("workbench")).toThrow();
    });
});

describe("difficulty labels", () => {
    it("covers grades 1 through 4", () => {
        expect(DIFFICULTY_LABELS).toEqual({
            1: "Easy", 2: "Moderate", 3: "Difficult", 4: "Indecisive",
        });
    });
});

describe("needsReview", () => {
    it("only flags annotations older than the taxonomy", () => {
        expect(needsReview(1, 2)).toBe(true);
        expect(needsReview(2, 2)).toBe(false);
    });
});
