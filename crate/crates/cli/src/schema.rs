use serde_json::{json, Value};

fn num() -> Value {
    json!({ "type": "number" })
}

fn nums() -> Value {
    json!({ "type": "array", "items": { "type": "number" } })
}

fn matrix() -> Value {
    json!({ "type": "array", "items": nums() })
}

fn rationals() -> Value {
    json!({ "type": "array", "items": { "type": "string", "pattern": "^-?[0-9]+(/[0-9]+)?$" } })
}

fn object(required: &[&str], properties: Value) -> Value {
    json!({ "type": "object", "required": required, "properties": properties, "additionalProperties": false })
}

fn nullable(v: Value) -> Value {
    json!({ "anyOf": [v, { "type": "null" }] })
}

/// JSON Schema (draft 2020-12) of the report printed by every command.
pub fn run_report_schema() -> Value {
    let int_rows = json!({ "type": "array", "items": { "type": "array", "items": { "type": "integer" } } });
    let input = object(
        &["cone_file", "dim", "facet_normals", "rays", "warnings", "gamma", "origin"],
        json!({
            "cone_file": { "type": "string" },
            "dim": { "type": "integer", "minimum": 1 },
            "facet_normals": int_rows,
            "rays": int_rows,
            "warnings": { "type": "array", "items": { "type": "string" } },
            "gamma": nullable(rationals()),
            "origin": nullable(rationals()),
            "decomposition": object(
                &["file", "base_reeb", "k"],
                json!({ "file": { "type": "string" }, "base_reeb": rationals(), "k": { "type": "integer", "minimum": 1 } }),
            ),
        }),
    );
    let face = object(
        &["dim", "active_normals", "elementary_divisors", "saturated"],
        json!({
            "dim": { "type": "integer" },
            "active_normals": { "type": "array", "items": { "type": "integer" } },
            "elementary_divisors": { "type": "array", "items": { "type": "string" } },
            "saturated": { "type": "boolean" },
        }),
    );
    let goodness = object(
        &["good", "good_away_from_apex", "worst_divisor", "faces"],
        json!({
            "good": { "type": "boolean" },
            "good_away_from_apex": { "type": "boolean" },
            "worst_divisor": { "type": "string" },
            "faces": { "type": "array", "items": face },
        }),
    );
    let witness = object(&["slice_vertex", "sum_point"], json!({ "slice_vertex": nums(), "sum_point": nums() }));
    let minkowski = object(
        &["holds", "discrepancy", "witness"],
        json!({ "holds": { "type": "boolean" }, "discrepancy": num(), "witness": nullable(witness) }),
    );
    let iterate = object(
        &["t", "W", "grad_norm", "step", "margin"],
        json!({ "t": nums(), "W": num(), "grad_norm": num(), "step": num(), "margin": num() }),
    );
    let minimization = object(
        &[
            "xi_star", "t_star", "W_star", "vol_star", "grad_norm", "hess_min_eig", "margin", "status", "iterations",
            "minkowski", "minkowski_holds", "coupled_obstruction", "existence_verdict", "trace",
        ],
        json!({
            "xi_star": nums(),
            "t_star": nums(),
            "W_star": num(),
            "vol_star": num(),
            "grad_norm": num(),
            "hess_min_eig": num(),
            "margin": num(),
            "status": { "enum": ["Converged", "DivergedToBoundary", "MaxIter"] },
            "iterations": { "type": "integer" },
            "minkowski": nullable(minkowski),
            "minkowski_holds": { "type": ["boolean", "null"] },
            "coupled_obstruction": nums(),
            "existence_verdict": {
                "enum": ["TransverseKE", "TransverseCoupledKE", "HypothesisFails", "NoCriticalPoint", "Unknown"]
            },
            "trace": { "type": "array", "items": iterate },
        }),
    );
    let stokes = object(
        &["q4", "q5", "max_relative", "exact"],
        json!({ "q4": num(), "q5": nums(), "max_relative": num(), "exact": { "type": "boolean" } }),
    );
    let obstruction = object(
        &[
            "W", "grad_norm", "hess_min_eig", "futaki", "futaki_norm", "coupled_obstruction", "coupled_norm",
            "barycenter_offset", "stokes_residuals",
        ],
        json!({
            "W": num(),
            "grad_norm": num(),
            "hess_min_eig": num(),
            "futaki": nums(),
            "futaki_norm": num(),
            "coupled_obstruction": nums(),
            "coupled_norm": num(),
            "barycenter_offset": num(),
            "stokes_residuals": stokes,
        }),
    );
    let certificate = object(
        &[
            "t", "xi", "per_piece_volumes", "gradient_zero", "hessian_positive_definite", "futaki_zero",
            "stokes_exact", "minkowski_holds",
        ],
        json!({
            "t": rationals(),
            "xi": rationals(),
            "per_piece_volumes": rationals(),
            "gradient_zero": { "type": "boolean" },
            "hessian_positive_definite": { "type": "boolean" },
            "futaki_zero": { "type": "boolean" },
            "stokes_exact": { "type": "boolean" },
            "minkowski_holds": { "type": "boolean" },
        }),
    );
    let grid = object(
        &["resolution", "points_evaluated", "grid_min", "grid_argmin", "margin", "cell", "within_one_cell"],
        json!({
            "resolution": { "type": "integer" },
            "points_evaluated": { "type": "integer" },
            "grid_min": num(),
            "grid_argmin": nums(),
            "margin": num(),
            "cell": nums(),
            "within_one_cell": { "type": "boolean" },
        }),
    );
    let moment_row = object(
        &["name", "exact", "estimate", "std_error", "z"],
        json!({ "name": { "type": "string" }, "exact": num(), "estimate": num(), "std_error": num(), "z": num() }),
    );
    let fd = object(
        &["t", "step", "gradient", "hessian", "gradient_error", "hessian_error"],
        json!({
            "t": nums(),
            "step": num(),
            "gradient": nums(),
            "hessian": matrix(),
            "gradient_error": num(),
            "hessian_error": num(),
        }),
    );
    let oracle = object(
        &["xi", "samples", "seed", "moments", "max_z", "finite_diff", "agrees"],
        json!({
            "xi": nums(),
            "xi_exact": rationals(),
            "samples": { "type": "integer" },
            "seed": { "type": "integer", "minimum": 0 },
            "moments": { "type": "array", "items": moment_row },
            "max_z": num(),
            "finite_diff": nullable(fd),
            "agrees": { "type": "boolean" },
        }),
    );
    let twist = object(
        &[
            "base_reeb", "xi_prime", "auto_selected", "k", "twisted_pieces", "minkowski_sum", "slice", "holds",
            "discrepancy", "witness",
        ],
        json!({
            "base_reeb": rationals(),
            "xi_prime": rationals(),
            "auto_selected": { "type": "boolean" },
            "k": { "type": "integer" },
            "twisted_pieces": { "type": "array", "items": { "type": "array", "items": rationals() } },
            "minkowski_sum": { "type": "array", "items": rationals() },
            "slice": { "type": "array", "items": rationals() },
            "holds": { "type": "boolean" },
            "discrepancy": num(),
            "witness": nullable(rationals()),
        }),
    );
    let mut schema = object(
        &["tool", "command", "exit_code"],
        json!({
            "tool": object(&["name", "version"], json!({ "name": { "const": "volmin" }, "version": { "type": "string" } })),
            "command": { "enum": ["validate", "minimize", "twist-demo", "oracle", "usage"] },
            "input": input,
            "goodness": goodness,
            "minimization": minimization,
            "obstruction": obstruction,
            "exact_certificate": certificate,
            "grid_certificate": grid,
            "oracle": oracle,
            "twist": twist,
            "timing_ms": num(),
            "exit_code": { "enum": [0, 1, 2, 3, 4, 5, 6, 7, 64] },
            "error": object(&["kind", "message"], json!({ "kind": { "type": "string" }, "message": { "type": "string" } })),
        }),
    );
    schema["$schema"] = json!("https://json-schema.org/draft/2020-12/schema");
    schema["title"] = json!("volmin run report");
    schema
}
