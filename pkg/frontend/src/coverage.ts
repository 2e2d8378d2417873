import { CoveragePayload, TaxonomyDoc, TaxonomyNode, isCategory } from "./types.js";

/** One bar of the per-class chart. Counts are copied from the server
 * payload untouched; zero-count leaves get an explicit zero bar. */
export interface CoverageBar {
    leafId: string;
    name: string;
    count: number;
}

export interface CoverageView {
    bars: CoverageBar[];
    unclassified: number;
    total: number;
    successRendered: string;
    successNumerator: number;
    successDenominator: number;
    difficultyRows: { grade: string; count: number }[];
    singleElement: number;
    multiElement: number;
}

/** Arrange the server coverage payload for rendering. Pure projection:
 * no count is summed, divided, or otherwise derived client-side. */
export function buildCoverageView(doc: TaxonomyDoc,
                                  payload: CoveragePayload): CoverageView {
    const bars: CoverageBar[] = [];
    const visit = (node: TaxonomyNode): void => {
        if (isCategory(node)) {
            node.children.forEach(visit);
        } else {
            bars.push({
                leafId: node.id,
                name: node.name,
                count: payload.primary_counts[node.name] ?? 0,
            });
        }
    };
    doc.categories.forEach(visit);
    return {
        bars,
        unclassified: payload.unclassified,
        total: payload.total,
        successRendered: payload.success_rate.rendered,
        successNumerator: payload.success_rate.numerator,
        successDenominator: payload.success_rate.denominator,
        difficultyRows: Object.keys(payload.difficulty_histogram).sort()
            .map((grade) => ({
                grade,
                count: payload.difficulty_histogram[grade],
            })),
        singleElement: payload.single_element,
        multiElement: payload.multi_element,
    };
}
