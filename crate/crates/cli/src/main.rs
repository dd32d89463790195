//! `vuix` — vulnerability analysis of power-system measurements.
//!
//! Subcommands: `rank` (closed-form ranking), `vuix` (Monte Carlo VuIx
//! statistics), `attack` (optimal attack constructions), `cost` (pointwise
//! cost and vulnerability evaluation).

mod error;
mod opts;
mod report;

use clap::Parser;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use error::CliError;
use opts::{AttackArgs, Cli, Command, CommonArgs, CostArgs, OutputFormat};
use report::{fmt_f64, json_f64, json_opt_f64, write_csv_tables, write_json, Table};

use vuix_core::attack::{
    cost_f, kl_divergence, mutual_information, optimal_gaussian_attack, single_sensor_attack,
    CostParams, ExistingAttackState,
};
use vuix_core::grid::{
    build_dc_jacobian, build_dc_jacobian_reduced, parse_case, GridCase, MeasurementKind,
};
use vuix_core::stochastic::{sigma2_from_snr, StateCovariance, SystemModel};
use vuix_core::vuix::{closed_form_ranking, monte_carlo_vuix, sample_attacked_set, DeltaContext};

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rank(args) => cmd_rank(&args),
        Command::Vuix(args) => cmd_vuix(&args),
        Command::Attack(args) => cmd_attack(&args),
        Command::Cost(args) => cmd_cost(&args),
    };
    if let Err(e) = result {
        if !e.message.is_empty() {
            eprintln!("error: {}", e.message);
        }
        std::process::exit(e.code);
    }
}

fn validate_common(args: &CommonArgs) -> Result<(), CliError> {
    if !args.snr_db.is_finite() {
        return Err(CliError::config(format!(
            "snr-db must be finite, got {}",
            args.snr_db
        )));
    }
    if !args.rho.is_finite() || !(0.0..1.0).contains(&args.rho) {
        return Err(CliError::config(format!(
            "rho must be in [0, 1), got {}",
            args.rho
        )));
    }
    if !args.lambda.is_finite() || args.lambda < 0.0 {
        return Err(CliError::config(format!(
            "lambda must be finite and nonnegative, got {}",
            args.lambda
        )));
    }
    if !args.v.is_finite() || args.v < 0.0 {
        return Err(CliError::config(format!(
            "v must be finite and nonnegative, got {}",
            args.v
        )));
    }
    Ok(())
}

fn load_case_and_model(args: &CommonArgs) -> Result<(GridCase, SystemModel), CliError> {
    let text = std::fs::read_to_string(&args.case).map_err(|e| {
        CliError::input(format!(
            "cannot read case file {}: {e}",
            args.case.display()
        ))
    })?;
    let case = parse_case(&text)?;
    let jac = if args.include_slack {
        build_dc_jacobian(&case)?
    } else {
        build_dc_jacobian_reduced(&case)?
    };
    let cov = StateCovariance::toeplitz(jac.n(), args.rho)?;
    let noise = sigma2_from_snr(jac.matrix(), &cov, args.snr_db)?;
    let model = SystemModel::from_jacobian(&jac, cov, noise)?;
    Ok((case, model))
}

fn kind_columns(kind: &MeasurementKind) -> (&'static str, String, String) {
    match kind {
        MeasurementKind::Flow { from, to, .. } => ("flow", from.to_string(), to.to_string()),
        MeasurementKind::Injection { bus } => ("injection", bus.to_string(), String::new()),
    }
}

fn kind_json(kind: &MeasurementKind) -> serde_json::Value {
    match kind {
        MeasurementKind::Flow { from, to, .. } => json!({
            "kind": "flow", "from_bus": from, "to_bus": to,
        }),
        MeasurementKind::Injection { bus } => json!({
            "kind": "injection", "from_bus": bus, "to_bus": serde_json::Value::Null,
        }),
    }
}

fn params_json(args: &CommonArgs) -> serde_json::Value {
    json!({
        "snr_db": json_f64(args.snr_db),
        "rho": json_f64(args.rho),
        "lambda": json_f64(args.lambda),
        "v": json_f64(args.v),
        "k": args.k,
        "trials": args.trials,
        "seed": args.seed,
        "include_slack": args.include_slack,
    })
}

fn cmd_rank(args: &CommonArgs) -> Result<(), CliError> {
    validate_common(args)?;
    let (case, model) = load_case_and_model(args)?;
    let params = CostParams::new(args.lambda, args.v)?;
    let state = ExistingAttackState::empty(model.m());
    let ctx = DeltaContext::new(&model, &state, params)?;
    let ranking = closed_form_ranking(&model);
    let descriptors = model
        .descriptors()
        .expect("grid-built models carry measurement descriptors")
        .to_vec();

    let mut rows = Vec::with_capacity(ranking.len());
    let mut json_rows = Vec::with_capacity(ranking.len());
    for (pos, &i) in ranking.order().iter().enumerate() {
        let delta = ctx.delta(i)?;
        let (kind, from, to) = kind_columns(&descriptors[i].kind);
        rows.push(vec![
            (pos + 1).to_string(),
            (i + 1).to_string(),
            kind.to_string(),
            from,
            to,
            fmt_f64(delta),
            fmt_f64(model.inv_diag(i)),
        ]);
        let mut row = kind_json(&descriptors[i].kind);
        let obj = row.as_object_mut().unwrap();
        obj.insert("vuix".into(), json!(pos + 1));
        obj.insert("measurement_id".into(), json!(i + 1));
        obj.insert("delta_at_v".into(), json_f64(delta));
        obj.insert("inv_diag".into(), json_f64(model.inv_diag(i)));
        json_rows.push(row);
    }

    match args.format {
        OutputFormat::Csv => write_csv_tables(
            &[Table {
                name: "ranking",
                header: vec![
                    "vuix",
                    "measurement_id",
                    "kind",
                    "from_bus",
                    "to_bus",
                    "delta_at_v",
                    "inv_diag",
                ],
                rows,
            }],
            args.out.as_deref(),
        ),
        OutputFormat::Json => write_json(
            &json!({
                "schema_version": 1,
                "command": "rank",
                "case": case.name,
                "m": model.m(),
                "n": model.n(),
                "params": params_json(args),
                "ranking": json_rows,
            }),
            args.out.as_deref(),
        ),
    }
}

fn cmd_vuix(args: &CommonArgs) -> Result<(), CliError> {
    validate_common(args)?;
    if args.trials == 0 {
        return Err(CliError::config("trials must be at least 1, got 0"));
    }
    let (case, model) = load_case_and_model(args)?;
    let params = CostParams::new(args.lambda, args.v)?;
    let report = monte_carlo_vuix(&model, args.k, &params, args.trials, args.seed)?;
    let descriptors = model
        .descriptors()
        .expect("grid-built models carry measurement descriptors")
        .to_vec();

    let mut meas_rows = Vec::with_capacity(report.per_measurement.len());
    let mut meas_json = Vec::with_capacity(report.per_measurement.len());
    for stat in &report.per_measurement {
        let kind = &descriptors[stat.measurement].kind;
        meas_rows.push(vec![
            (stat.measurement + 1).to_string(),
            kind.label().to_string(),
            stat.mean.map(fmt_f64).unwrap_or_default(),
            stat.variance.map(fmt_f64).unwrap_or_default(),
            stat.coverage.to_string(),
        ]);
        let mut row = kind_json(kind);
        let obj = row.as_object_mut().unwrap();
        obj.insert("measurement_id".into(), json!(stat.measurement + 1));
        obj.insert("mean_vuix".into(), json_opt_f64(stat.mean));
        obj.insert("var_vuix".into(), json_opt_f64(stat.variance));
        obj.insert("coverage".into(), json!(stat.coverage));
        meas_json.push(row);
    }

    let mut pos_rows = Vec::with_capacity(report.class_prob.len());
    let mut pos_json = Vec::with_capacity(report.class_prob.len());
    for row in &report.class_prob {
        pos_rows.push(vec![
            row.position.to_string(),
            fmt_f64(row.p_flow),
            fmt_f64(row.p_injection),
        ]);
        pos_json.push(json!({
            "position": row.position,
            "p_flow": json_f64(row.p_flow),
            "p_inj": json_f64(row.p_injection),
        }));
    }

    let mut pmf_rows = Vec::new();
    let mut pmf_json = Vec::new();
    for pmf in &report.class_pmf {
        for (j, &p) in pmf.probabilities.iter().enumerate() {
            pmf_rows.push(vec![pmf.label.clone(), (j + 1).to_string(), fmt_f64(p)]);
            pmf_json.push(json!({
                "class": pmf.label,
                "vuix": j + 1,
                "probability": json_f64(p),
            }));
        }
    }

    match args.format {
        OutputFormat::Csv => write_csv_tables(
            &[
                Table {
                    name: "measurements",
                    header: vec![
                        "measurement_id",
                        "kind",
                        "mean_vuix",
                        "var_vuix",
                        "coverage",
                    ],
                    rows: meas_rows,
                },
                Table {
                    name: "positions",
                    header: vec!["position", "p_flow", "p_inj"],
                    rows: pos_rows,
                },
                Table {
                    name: "pmf",
                    header: vec!["class", "vuix", "probability"],
                    rows: pmf_rows,
                },
            ],
            args.out.as_deref(),
        ),
        OutputFormat::Json => write_json(
            &json!({
                "schema_version": 1,
                "command": "vuix",
                "case": case.name,
                "m": model.m(),
                "n": model.n(),
                "params": params_json(args),
                "measurements": meas_json,
                "positions": pos_json,
                "pmf": pmf_json,
            }),
            args.out.as_deref(),
        ),
    }
}

fn cmd_attack(args: &AttackArgs) -> Result<(), CliError> {
    let common = &args.common;
    validate_common(common)?;
    let (case, model) = load_case_and_model(common)?;
    let descriptors = model
        .descriptors()
        .expect("grid-built models carry measurement descriptors")
        .to_vec();

    if args.sparse {
        let atk = single_sensor_attack(&model, common.lambda)?;
        let cov = atk.covariance(model.m());
        let mi = mutual_information(&model, &cov)?;
        let kl = kl_divergence(&model, &cov)?;
        let state = ExistingAttackState::empty(model.m());
        let cost = cost_f(
            &model,
            &state,
            &CostParams::new(common.lambda, atk.variance)?,
            atk.index,
        )?;
        let kind = &descriptors[atk.index].kind;
        let (kind_label, from, to) = kind_columns(kind);
        let row = vec![
            (atk.index + 1).to_string(),
            kind_label.to_string(),
            from,
            to,
            fmt_f64(atk.variance),
            fmt_f64(mi),
            fmt_f64(kl),
            fmt_f64(cost),
        ];
        match common.format {
            OutputFormat::Csv => write_csv_tables(
                &[Table {
                    name: "sparse_attack",
                    header: vec![
                        "measurement_id",
                        "kind",
                        "from_bus",
                        "to_bus",
                        "variance",
                        "mutual_information",
                        "kl_divergence",
                        "cost_f",
                    ],
                    rows: vec![row],
                }],
                common.out.as_deref(),
            ),
            OutputFormat::Json => {
                let mut result = kind_json(kind);
                let obj = result.as_object_mut().unwrap();
                obj.insert("measurement_id".into(), json!(atk.index + 1));
                obj.insert("variance".into(), json_f64(atk.variance));
                obj.insert("mutual_information".into(), json_f64(mi));
                obj.insert("kl_divergence".into(), json_f64(kl));
                obj.insert("cost_f".into(), json_f64(cost));
                write_json(
                    &json!({
                        "schema_version": 1,
                        "command": "attack",
                        "mode": "sparse",
                        "case": case.name,
                        "params": params_json(common),
                        "result": result,
                    }),
                    common.out.as_deref(),
                )
            }
        }
    } else {
        let cov = optimal_gaussian_attack(&model, common.lambda)?;
        let mi = mutual_information(&model, &cov)?;
        let kl = kl_divergence(&model, &cov)?;
        let diag_rows: Vec<Vec<String>> = (0..model.m())
            .map(|i| {
                vec![
                    (i + 1).to_string(),
                    descriptors[i].kind.label().to_string(),
                    fmt_f64(cov.matrix()[(i, i)]),
                ]
            })
            .collect();
        match common.format {
            OutputFormat::Csv => write_csv_tables(
                &[
                    Table {
                        name: "summary",
                        header: vec!["mutual_information", "kl_divergence"],
                        rows: vec![vec![fmt_f64(mi), fmt_f64(kl)]],
                    },
                    Table {
                        name: "diag",
                        header: vec!["measurement_id", "kind", "attack_variance"],
                        rows: diag_rows,
                    },
                ],
                common.out.as_deref(),
            ),
            OutputFormat::Json => {
                let diag_json: Vec<serde_json::Value> = (0..model.m())
                    .map(|i| {
                        json!({
                            "measurement_id": i + 1,
                            "kind": descriptors[i].kind.label(),
                            "attack_variance": json_f64(cov.matrix()[(i, i)]),
                        })
                    })
                    .collect();
                write_json(
                    &json!({
                        "schema_version": 1,
                        "command": "attack",
                        "mode": "dense",
                        "case": case.name,
                        "params": params_json(common),
                        "summary": {
                            "mutual_information": json_f64(mi),
                            "kl_divergence": json_f64(kl),
                        },
                        "diag": diag_json,
                    }),
                    common.out.as_deref(),
                )
            }
        }
    }
}

fn cmd_cost(args: &CostArgs) -> Result<(), CliError> {
    let common = &args.common;
    validate_common(common)?;
    let (case, model) = load_case_and_model(common)?;
    let m = model.m();
    if args.measurement == 0 || args.measurement > m {
        return Err(CliError::config(format!(
            "measurement id must be in 1..={m}, got {}",
            args.measurement
        )));
    }
    let i = args.measurement - 1;

    // A nonzero k evaluates against the same attacked set as Monte Carlo
    // trial 0 of this seed, so point evaluations are reproducible.
    let state = if common.k == 0 {
        ExistingAttackState::empty(m)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        rng.set_stream(0);
        sample_attacked_set(m, common.k, &mut rng)?
    };
    if state.is_attacked(i) {
        return Err(CliError::config(format!(
            "measurement {} falls in the sampled attacked set (k = {}, seed = {}); pick another measurement or seed",
            args.measurement, common.k, common.seed
        )));
    }

    let params = CostParams::new(common.lambda, common.v)?;
    let baseline_params = CostParams::new(common.lambda, 0.0)?;
    let with_probe = cost_f(&model, &state, &params, i)?;
    let baseline = cost_f(&model, &state, &baseline_params, i)?;
    let ctx = DeltaContext::new(&model, &state, params)?;
    let delta = ctx.delta(i)?;

    let descriptors = model
        .descriptors()
        .expect("grid-built models carry measurement descriptors")
        .to_vec();
    let kind = &descriptors[i].kind;
    let (kind_label, from, to) = kind_columns(kind);

    match common.format {
        OutputFormat::Csv => write_csv_tables(
            &[Table {
                name: "cost",
                header: vec![
                    "measurement_id",
                    "kind",
                    "from_bus",
                    "to_bus",
                    "k",
                    "cost_f",
                    "cost_f_baseline",
                    "delta",
                ],
                rows: vec![vec![
                    args.measurement.to_string(),
                    kind_label.to_string(),
                    from,
                    to,
                    common.k.to_string(),
                    fmt_f64(with_probe),
                    fmt_f64(baseline),
                    fmt_f64(delta),
                ]],
            }],
            common.out.as_deref(),
        ),
        OutputFormat::Json => {
            let mut result = kind_json(kind);
            let obj = result.as_object_mut().unwrap();
            obj.insert("measurement_id".into(), json!(args.measurement));
            obj.insert("cost_f".into(), json_f64(with_probe));
            obj.insert("cost_f_baseline".into(), json_f64(baseline));
            obj.insert("delta".into(), json_f64(delta));
            obj.insert(
                "attacked_set".into(),
                json!(state.attacked().iter().map(|&a| a + 1).collect::<Vec<_>>()),
            );
            write_json(
                &json!({
                    "schema_version": 1,
                    "command": "cost",
                    "case": case.name,
                    "params": params_json(common),
                    "result": result,
                }),
                common.out.as_deref(),
            )
        }
    }
}
