"""Local HTTP API over a Workspace.

Single-user loopback tool: no auth, and serve() refuses a non-loopback
bind unless explicitly overridden. Taxonomy amendments use optimistic
concurrency (the client sends the version it expects).
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from . import annotation as ann
from . import errors, generator, tagger, taxonomy as tx
from .workspace import Workspace


class AnnotationBody(BaseModel):
    report_id: str
    taxonomy_version: int
    tags: list[str]
    primary: str
    difficulty: int
    annotator: str
    notes: str = ""


class AmendBody(BaseModel):
    leaf_id: str
    new_definition: str
    rationale: str
    expected_version: int


def coverage_payload(cov: ann.CoverageReport) -> dict:
    return {
        "total": cov.total,
        "primary_counts": cov.primary_counts,
        "unclassified": cov.unclassified,
        "tag_counts": cov.tag_counts,
        "difficulty_histogram": {str(k): v
                                 for k, v in cov.difficulty_histogram.items()},
        "success_rate": {
            "numerator": cov.total - cov.unclassified if cov.total else 1,
            "denominator": cov.total if cov.total else 1,
            "rendered": ann.format_rate(cov.success_rate),
        },
        "single_element": cov.single_element,
        "multi_element": cov.multi_element,
    }


def report_payload(r) -> dict:
    return {
        "report_id": r.report_id,
        "date": r.date.isoformat(),
        "time_of_day": r.time_of_day,
        "manufacturer": r.manufacturer,
        "city": r.city,
        "state": r.state,
        "driving_mode": r.driving_mode,
        "narrative": r.narrative,
        "damage": r.damage,
        "injury": r.injury,
    }


def suggestion_payload(s: tagger.Suggestion) -> dict:
    return {
        "leaf_id": s.leaf_id,
        "score": {"numerator": s.score.numerator,
                  "denominator": s.score.denominator,
                  "value": float(s.score)},
        "matched": list(s.matched),
    }


def spec_payload(spec: generator.ScenarioSpec) -> dict:
    return {
        "scenario_id": spec.scenario_id,
        "taxonomy_version": spec.taxonomy_version,
        "instances": [
            {"leaf_id": i.leaf_id, "params": i.params, "role_note": i.role_note}
            for i in spec.instances
        ],
        "stages": [list(stage) for stage in spec.staging],
        "seed": spec.seed,
        "provenance": spec.provenance,
        "description": spec.description,
    }


def _error_body(exc: Exception) -> dict:
    return {"code": type(exc).__name__, "message": str(exc)}


def create_app(ws: Workspace) -> FastAPI:
    app = FastAPI(title="advtax", docs_url=None, redoc_url=None)

    @app.exception_handler(errors.NotFound)
    async def _not_found(_, exc):
        return JSONResponse(status_code=404, content=_error_body(exc))

    @app.exception_handler(errors.AdvtaxError)
    async def _domain_error(_, exc):
        return JSONResponse(status_code=400, content=_error_body(exc))

    @app.get("/api/taxonomy", response_class=PlainTextResponse)
    def get_taxonomy():
        return PlainTextResponse(tx.serialize(ws.taxonomy),
                                 media_type="application/json")

    @app.get("/api/reports")
    def list_reports(manufacturer: Optional[str] = None,
                     mode: Optional[str] = None):
        from . import corpus
        reports = corpus.filter_corpus(ws.reports, mode=mode,
                                       manufacturer=manufacturer)
        return {"reports": [report_payload(r) for r in reports]}

    @app.get("/api/reports/{report_id}")
    def get_report(report_id: str):
        return report_payload(ws.report_by_id(report_id))

    @app.get("/api/suggestions/{report_id}")
    def get_suggestions(report_id: str):
        report = ws.report_by_id(report_id)
        suggestions = tagger.suggest(report.narrative, ws.lexicon, ws.taxonomy)
        return {"report_id": report_id,
                "suggestions": [suggestion_payload(s) for s in suggestions]}

    @app.post("/api/annotations")
    def post_annotation(body: AnnotationBody):
        a = ann.Annotation(
            report_id=body.report_id,
            taxonomy_version=body.taxonomy_version,
            tags=frozenset(body.tags),
            primary=body.primary,
            difficulty=body.difficulty,
            annotator=body.annotator,
            notes=body.notes,
        )
        ws.record(a)
        return {
            "report_id": a.report_id,
            "taxonomy_version": a.taxonomy_version,
            "tags": sorted(a.tags),
            "primary": a.primary,
            "difficulty": a.difficulty,
            "annotator": a.annotator,
            "notes": a.notes,
        }

    @app.get("/api/coverage")
    def get_coverage():
        return coverage_payload(ann.coverage(ws.store, ws.taxonomy))

    @app.post("/api/taxonomy/amend")
    def post_amend(body: AmendBody):
        if body.expected_version != ws.taxonomy.version:
            raise HTTPException(
                status_code=409,
                detail=f"taxonomy is at version {ws.taxonomy.version}, "
                       f"client expected {body.expected_version}",
            )
        ws.amend(body.leaf_id, body.new_definition, body.rationale)
        return PlainTextResponse(tx.serialize(ws.taxonomy),
                                 media_type="application/json")

    @app.get("/api/scenarios/sample")
    def sample_scenarios(k: int = Query(..., ge=1), seed: int = Query(0)):
        cov = ann.coverage(ws.store, ws.taxonomy)
        specs = generator.sample_for_coverage(cov, ws.taxonomy, k, seed)
        return {"scenarios": [spec_payload(s) for s in specs]}

    return app


def serve(ws: Workspace, host: str = "127.0.0.1", port: int = 8712,
          allow_remote: bool = False) -> None:
    if host not in ("127.0.0.1", "localhost", "::1") and not allow_remote:
        raise errors.ValidationError(
            f"refusing to bind non-loopback address {host!r} without "
            f"--allow-remote"
        )
    import uvicorn

    uvicorn.run(create_app(ws), host=host, port=port, log_level="warning")
