/** Payload shapes served by the HTTP API. The workbench renders these
 * verbatim and never derives counts or scores on its own. */

export interface TaxonomyLeaf {
    id: string;
    name: string;
    definition: string;
    example_refs?: string[];
    mitigation_refs?: string[];
}

export interface TaxonomyCategory {
    id: string;
    name: string;
    description: string;
    children: TaxonomyNode[];
}

export type TaxonomyNode = TaxonomyLeaf | TaxonomyCategory;

export interface TaxonomyDoc {
    version: number;
    categories: TaxonomyCategory[];
}

export function isCategory(node: TaxonomyNode): node is TaxonomyCategory {
    return (node as TaxonomyCategory).children !== undefined;
}

export interface Report {
    report_id: string;
    date: string;
    time_of_day: string;
    manufacturer: string;
    city: string;
    state: string;
    driving_mode: string;
    narrative: string;
    damage: string;
    injury: string;
}

export interface SuggestionScore {
    numerator: number;
    denominator: number;
    value: number;
}

export interface Suggestion {
    leaf_id: string;
    score: SuggestionScore;
    matched: string[];
}

export interface SuccessRate {
    numerator: number;
    denominator: number;
    rendered: string;
}

export interface CoveragePayload {
    total: number;
    primary_counts: Record<string, number>;
    unclassified: number;
    tag_counts: Record<string, number>;
    difficulty_histogram: Record<string, number>;
    success_rate: SuccessRate;
    single_element: number;
    multi_element: number;
}

export interface AnnotationBody {
    report_id: string;
    taxonomy_version: number;
    tags: string[];
    primary: string;
    difficulty: number;
    annotator: string;
    notes: string;
}

export interface ScenarioInstance {
    leaf_id: string;
    params: Record<string, unknown>;
    role_note: string | null;
}

export interface ScenarioSpec {
    scenario_id: string;
    taxonomy_version: number;
    instances: ScenarioInstance[];
    stages: number[][];
    seed: number;
    provenance: string | null;
    description: string | null;
}

export interface ApiError {
    code: string;
    message: string;
}
