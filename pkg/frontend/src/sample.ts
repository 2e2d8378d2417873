import { ScenarioSpec } from "./types.js";

/** Validate the sample-panel inputs before any request is made. */
export function validateSampleInputs(k: number, seed: number): string[] {
    const out: string[] = [];
    if (!Number.isInteger(k) || k < 1) out.push("k must be an integer >= 1");
    if (!Number.isInteger(seed)) out.push("seed must be an integer");
    return out;
}

/** Render one scenario document for display and copy-to-clipboard.
 * Stable key order so equal server payloads render identically. */
export function formatScenarioDocument(spec: ScenarioSpec): string {
    const ordered = {
        scenario_id: spec.scenario_id,
        taxonomy_version: spec.taxonomy_version,
        instances: spec.instances,
        stages: spec.stages,
        seed: spec.seed,
        provenance: spec.provenance,
        description: spec.description,
    };
    return JSON.stringify(ordered, null, 2) + "\n";
}

/** One-line summary shown in the sample list. */
export function scenarioSummary(spec: ScenarioSpec): string {
    const leaves = spec.instances.map((i) => i.leaf_id).join(", ");
    return `${spec.scenario_id} [${leaves}]`;
}
