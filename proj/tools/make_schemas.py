#!/usr/bin/env python3
"""Regenerate docs/schemas from the definitions below."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "docs" / "schemas"

geo = {"type": "object", "required": ["lat", "lng"], "additionalProperties": False,
       "properties": {"lat": {"type": "number", "minimum": -90, "maximum": 90},
                      "lng": {"type": "number", "minimum": -180, "maximum": 180}}}
grid = {"type": "object", "required": ["origin", "cell_size_km", "rows", "cols"],
        "properties": {"origin": {"$ref": "#/$defs/geo"}, "cell_size_km": {"type": "number", "minimum": 0},
                       "rows": {"type": "integer", "minimum": 1}, "cols": {"type": "integer", "minimum": 1}}}
nums = {"type": "array", "items": {"type": "number"}}
count = {"type": "integer", "minimum": 0}
roles = {"type": "object", "required": ["primary", "backup"], "properties": {"primary": count, "backup": count}}
cell = {"type": "array", "minItems": 2, "items": {"type": "integer", "minimum": 0}}
criterion = {"type": "string", "enum": ["ART", "MRT", "ATD", "MTD", "SO"]}
bucketing = {"enum": ["month", "quarter", "year"]}
text = {"type": "string"}


def obj(req, props, **kw):
    return {"type": "object", "required": req, "properties": props, **kw}


five = obj(["year", "min", "q1", "median", "q3", "max", "count"],
           {**{k: {"type": "number"} for k in ["min", "q1", "median", "q3", "max"]},
            "year": {"type": "integer"}, "count": count})
years = obj(["years"], {"years": {"type": "array", "items": {"$ref": "#/$defs/five"}}})
node = obj(["id", "kind", "geo", "before", "after", "assigned"],
           {"id": text, "kind": {"enum": ["existing", "new", "unknown"]}, "geo": {"type": ["object", "null"]},
            "before": {"type": ["integer", "null"], "minimum": 0}, "after": {"type": ["integer", "null"], "minimum": 0},
            "assigned": {"type": ["integer", "null"], "minimum": 0}})
report = obj(["bucketing", "new_stations", "total_transferred", "unknown_station_ids", "periods"], {
    "bucketing": bucketing,
    "new_stations": {"type": "array", "items": obj(["id", "geo"], {"id": text, "geo": {"$ref": "#/$defs/geo"}})},
    "total_transferred": count,
    "unknown_station_ids": {"type": "array", "items": text},
    "periods": {"type": "array", "items": obj(["period", "total_transferred", "nodes", "edges"], {
        "period": text, "total_transferred": count,
        "nodes": {"type": "array", "items": {"$ref": "#/$defs/node"}},
        "edges": {"type": "array", "items": obj(["from", "to", "weight"],
                                                {"from": text, "to": text, "weight": {"type": "integer", "minimum": 1}})}})}})
ring = {"type": "array", "minItems": 4, "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}}

SCHEMAS = {
    "error": (obj(["error"], {"error": obj(["code", "message"], {"code": text, "message": text})}), {}),
    "health": (obj(["status", "forecast"], {"status": {"enum": ["ok"]}, "forecast": text}), {}),
    "stats_yearly": (obj(["years"], {"years": {"type": "array", "items": obj(["year", "count"], {"year": {"type": "integer"}, "count": count})}}), {}),
    "stats_response": (years, {"five": five}),
    "stats_stations": (obj(["stations"], {"stations": {"type": "array", "items": obj(
        ["id", "geo", "total", "roles"], {"id": text, "geo": {"$ref": "#/$defs/geo"}, "total": count, "roles": roles})}}), {"geo": geo}),
    "sd_series": (obj(["features", "series", "response_distribution", "commissions"], {
        "features": {"type": "array", "items": text},
        "series": {"type": "array", "items": obj(["month", "actual", "predicted", "baseline", "phi"], {
            "month": text, "actual": {"type": "number"}, "predicted": {"type": "number"}, "baseline": {"type": "number"},
            "phi": {"type": "object", "additionalProperties": {"type": "number"}}})},
        "response_distribution": years,
        "commissions": {"type": "array", "items": obj(["id", "commissioned"], {"id": text, "commissioned": text})}}), {"five": five}),
    "grid": (obj(["grid", "layout", "month", "channels", "attribution"], {
        "grid": {"$ref": "#/$defs/grid"}, "layout": text, "month": text,
        "channels": {"type": "object", "additionalProperties": nums},
        "attribution": {"type": ["object", "null"], "required": ["predicted", "abs_phi_sum", "phi"],
                        "properties": {"predicted": nums, "abs_phi_sum": nums,
                                       "phi": {"type": "object", "additionalProperties": nums}}}}), {"geo": geo, "grid": grid}),
    "reachability": (obj(["grid", "layout", "min_time_min", "k_minutes", "boundary"], {
        "grid": {"$ref": "#/$defs/grid"}, "layout": text, "min_time_min": nums, "k_minutes": {"type": "number", "minimum": 0},
        "boundary": {"$ref": "#/$defs/region"}}), {"geo": geo, "grid": grid, "region": obj(["type", "geometry", "properties"], {
            "type": {"enum": ["Feature"]},
            "geometry": obj(["type", "coordinates"], {"type": {"enum": ["MultiPolygon"]},
                                                      "coordinates": {"type": "array", "items": {"type": "array", "minItems": 1, "items": ring}}}),
            "properties": obj(["k_minutes", "covers_extent"], {"k_minutes": {"type": "number"}, "covers_extent": {"type": "boolean"}})})}),
    "underserved": (obj(["k_minutes", "cells"], {"k_minutes": {"type": "number"}, "cells": {"type": "array", "items": obj(
        ["cell", "fire_count", "avg_response_min", "min_time_min", "score"],
        {"cell": cell, "fire_count": {"type": "number", "minimum": 0}, "avg_response_min": {"type": "number"},
         "min_time_min": {"type": "number"}, "score": {"type": "number"}})}}), {}),
    "station_profile": (obj(["station_id", "k_minutes", "total", "roles", "compass", "time_sectors"], {
        "station_id": text, "k_minutes": {"type": "number"}, "total": count, "roles": roles,
        "compass": {"type": "array", "minItems": 6, "maxItems": 6, "items": count},
        "time_sectors": {"type": "array", "minItems": 1, "items": obj(["start_hour", "end_hour", "below_k", "at_or_above_k"], {
            "start_hour": {"type": "integer", "minimum": 0, "maximum": 24}, "end_hour": {"type": "integer", "minimum": 0, "maximum": 24},
            "below_k": count, "at_or_above_k": count})}}), {}),
    "job_handle": (obj(["id", "kind", "state", "progress", "result_ref", "error"], {
        "id": text, "kind": {"enum": ["optimize", "simulate"]}, "state": {"enum": ["queued", "running", "done", "failed"]},
        "progress": {"type": "number", "minimum": 0, "maximum": 1}, "result_ref": {"type": ["string", "null"]},
        "error": {"type": ["object", "null"]}}), {}),
    "pareto": (obj(["criteria", "k_new", "seed", "config", "solutions", "correlation", "area", "k_minutes", "include_existing"], {
        "criteria": {"type": "array", "minItems": 1, "items": criterion},
        "k_new": {"type": "integer", "minimum": 1}, "seed": {"type": "integer", "minimum": 0},
        "config": obj(["population", "generations", "crossover_prob", "eta_c", "eta_m", "seed"],
                      {"population": {"type": "integer", "minimum": 4}, "generations": {"type": "integer", "minimum": 0}}),
        "area": {"type": "object"}, "k_minutes": {"type": "number"}, "include_existing": {"type": "boolean"},
        "solutions": {"type": "array", "minItems": 1, "items": obj(["genome", "objectives", "normalized_objectives", "rank", "crowding"], {
            "genome": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/geo"}},
            "objectives": {"type": "object", "additionalProperties": {"type": "number"}},
            "normalized_objectives": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}},
            "rank": {"type": "integer", "minimum": 0}, "crowding": {"type": ["number", "null"]}})},
        "correlation": {"type": ["object", "null"], "required": ["criteria", "matrix", "zero_variance"], "properties": {
            "criteria": {"type": "array", "items": criterion},
            "matrix": {"type": "array", "items": {"type": "array", "items": {"type": ["number", "null"], "minimum": -1, "maximum": 1}}},
            "zero_variance": {"type": "array", "items": {"type": "boolean"}}}}}), {"geo": geo}),
    "evaluate": (obj(["genome", "objectives"], {"genome": {"type": "array", "items": {"$ref": "#/$defs/geo"}},
                                                "objectives": {"type": "object", "additionalProperties": {"type": "number"}}}), {"geo": geo}),
    "simulate_result": (obj(["bucketing", "transfer_backup", "reports", "comparison"], {
        "bucketing": bucketing, "transfer_backup": {"type": "boolean"},
        "reports": {"type": "array", "minItems": 1, "items": obj(["solution_id", "report"], {"solution_id": text, "report": {"$ref": "#/$defs/report"}})},
        "comparison": obj(["bucketing", "solutions", "periods", "totals", "cumulative"], {
            "bucketing": bucketing, "solutions": {"type": "array", "items": text}, "periods": {"type": "array", "items": text},
            "totals": {"type": "array", "items": {"type": "array", "items": count}},
            "cumulative": {"type": "array", "items": {"type": "array", "items": count}}})}),
        {"geo": geo, "node": node, "report": report}),
}

for name, (body, defs) in SCHEMAS.items():
    doc = {"$schema": "https://json-schema.org/draft/2020-12/schema", "title": name, **body}
    if defs:
        doc["$defs"] = defs
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
