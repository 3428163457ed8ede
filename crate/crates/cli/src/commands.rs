use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use tensor_spectra::dual_pair::{f_from_g, SimplexFunction, XiFunction};
use tensor_spectra::field::Field;
use tensor_spectra::params::{ThetaWeights, Weighting};
use tensor_spectra::pencil::{commutative_rank, DEFAULT_TRIALS};
use tensor_spectra::polytope::{
    awsr_dual, awsr_primal, field_quantum_functional_on_grid, min_entropy_g, min_entropy_zeta,
    support_functional_zeta, uniform_marginals_feasible, FunctionalResult, UniformMarginals, ZetaGrid,
    DEFAULT_THETA_RESOLUTION,
};
use tensor_spectra::rep_dims::{
    entropy_rate_check, partitions, schur_dim_bound, schur_dim_exact, specht_bounds, specht_dim_exact,
    DEFAULT_RATE_BUDGET,
};
use tensor_spectra::slice_cover::{general_ub, verify_cover, weighted_cover_value};
use tensor_spectra::tensor::{build_diagonal, build_matmul, build_w_tensor, SparseTensor, Support};
use tensor_spectra::tightness::{find_tight_witness_seeded, verify_tight_witness, TightnessOutcome, DEFAULT_RADIUS};
use tensor_spectra::weights::{convergence_profile, DEFAULT_BUDGET};

use crate::output::{joined, num, Report, Table};
use crate::parse;
use crate::{DualTarget, Route, RunConfig, Tensors};

struct Loaded {
    path: String,
    tensor: SparseTensor,
    support: Support,
}

fn load(tensors: &Tensors) -> Result<Vec<Loaded>> {
    tensors
        .tensor
        .iter()
        .map(|p: &PathBuf| {
            let tensor = SparseTensor::load(p).with_context(|| format!("loading {}", p.display()))?;
            let support = tensor.support();
            Ok(Loaded { path: p.display().to_string(), tensor, support })
        })
        .collect()
}

/// One object for a single (tensor, parameter) pair, an array otherwise.
fn collect(items: Vec<Value>) -> Value {
    if items.len() == 1 {
        items.into_iter().next().expect("one item")
    } else {
        Value::Array(items)
    }
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

/// Runs `eval` over every (tensor, parameter) pair in input order.
fn batch<P: Copy>(
    tensors: &Tensors,
    params: &[String],
    parse: impl Fn(&str) -> Result<P>,
    coords: impl Fn(&P) -> [f64; 3],
    param_name: &str,
    extra_header: &[&str],
    eval: impl Fn(&Support, &P) -> Result<(Value, Vec<String>)>,
) -> Result<(Value, Table)> {
    let loaded = load(tensors)?;
    let parsed: Vec<P> = params.iter().map(|s| parse(s).with_context(|| format!("--{param_name} {s}"))).collect::<Result<_>>()?;
    let mut header = vec!["tensor".to_string()];
    header.extend((1..=3).map(|i| format!("{param_name}{i}")));
    header.extend(extra_header.iter().map(|s| s.to_string()));
    let mut table = Table { header, rows: Vec::new() };
    let mut items = Vec::new();
    for t in &loaded {
        for p in &parsed {
            let (value, cells) = eval(&t.support, p).with_context(|| t.path.clone())?;
            let mut row = vec![t.path.clone()];
            row.extend(coords(p).iter().map(|v| num(*v)));
            row.extend(cells);
            table.push(row);
            items.push(if params.len() * loaded.len() == 1 {
                value
            } else {
                json!({ "tensor": t.path, param_name: coords(p), "result": value })
            });
        }
    }
    Ok((collect(items), table))
}

const FUNCTIONAL_COLUMNS: [&str; 4] = ["value", "log2_value", "gap", "upper_bound"];

fn functional_cells(r: &FunctionalResult) -> Vec<String> {
    vec![num(r.value), num(r.log2_value), num(r.gap), r.upper_bound.to_string()]
}

fn functional(r: FunctionalResult) -> Result<(Value, Vec<String>)> {
    let cells = functional_cells(&r);
    Ok((to_value(&r)?, cells))
}

/// Min-entropy and field values are computed over `W(T)`, not the moment polytope.
fn torus_analog(r: FunctionalResult) -> Result<(Value, Vec<String>)> {
    let (mut value, cells) = functional(r)?;
    value["domain"] = json!("torus analog");
    Ok((value, cells))
}

pub fn cover(_cfg: &RunConfig, tensors: &Tensors, xi: &[String]) -> Result<Report> {
    let (json, table) = batch(
        tensors,
        xi,
        parse::weighting,
        |x: &Weighting| x.values(),
        "xi",
        &["value", "size1", "size2", "size3", "general_ub"],
        |s, x| {
            let r = weighted_cover_value(s, x)?;
            let checked = verify_cover(s, &r.witness, x)?;
            debug_assert!((checked - r.value).abs() <= 1e-9 * r.value.max(1.0));
            let ub = general_ub(s.dims(), x);
            let value = json!({
                "value": r.value,
                "log2_value": r.value.log2(),
                "witness": r.witness,
                "gap": 0.0,
                "sizes": r.sizes,
                "general_ub": ub,
            });
            let mut cells = vec![num(r.value)];
            cells.extend(r.sizes.iter().map(|v| v.to_string()));
            cells.push(num(ub));
            Ok((value, cells))
        },
    )?;
    Ok(Report::json(json, table))
}

pub fn tight(cfg: &RunConfig, tensors: &Tensors) -> Result<Report> {
    let loaded = load(tensors)?;
    let mut table = Table::new(&["tensor", "verdict", "axis", "a", "b", "u1", "u2", "u3"]);
    let mut items = Vec::new();
    let mut negative = Vec::new();
    for t in &loaded {
        let outcome = match find_tight_witness_seeded(&t.support, DEFAULT_RADIUS, cfg.seed)? {
            TightnessOutcome::Tight { witness } => {
                let witness = witness.normalized(&t.support);
                if !verify_tight_witness(&t.support, &witness)? {
                    bail!("{}: internal error, witness failed verification", t.path);
                }
                TightnessOutcome::Tight { witness }
            }
            other => other,
        };
        let verdict = match &outcome {
            TightnessOutcome::Tight { .. } => "tight".to_string(),
            TightnessOutcome::NotTight { axis, a, b } => {
                negative.push(format!(
                    "{}: definitely not tight; coordinates {a} and {b} on axis {axis} get equal labels in every solution",
                    t.path
                ));
                "definitely not tight".to_string()
            }
            TightnessOutcome::Inconclusive { radius } => {
                negative.push(format!("{}: inconclusive, no witness up to radius {radius}", t.path));
                "inconclusive".to_string()
            }
        };
        let row = match &outcome {
            TightnessOutcome::Tight { witness } => vec![
                String::new(),
                String::new(),
                String::new(),
                joined(&witness.u1),
                joined(&witness.u2),
                joined(&witness.u3),
            ],
            TightnessOutcome::NotTight { axis, a, b } => {
                vec![axis.to_string(), a.to_string(), b.to_string(), String::new(), String::new(), String::new()]
            }
            TightnessOutcome::Inconclusive { .. } => vec![String::new(); 6],
        };
        let mut cells = vec![t.path.clone(), verdict.clone()];
        cells.extend(row);
        table.push(cells);
        let mut value = to_value(&outcome)?;
        value["verdict"] = json!(verdict);
        if loaded.len() > 1 {
            value["tensor"] = json!(t.path);
        }
        items.push(value);
    }
    let mut report = Report::json(collect(items), table);
    if !negative.is_empty() {
        report.negative = Some(negative.join("\n"));
    }
    Ok(report)
}

pub fn zeta(cfg: &RunConfig, tensors: &Tensors, theta: &[String]) -> Result<Report> {
    let (json, table) =
        batch(tensors, theta, parse::theta, |t: &ThetaWeights| t.values(), "theta", &FUNCTIONAL_COLUMNS, |s, th| {
            functional(support_functional_zeta(s, th, cfg.tol)?)
        })?;
    Ok(Report::json(json, table))
}

pub fn gxi(cfg: &RunConfig, tensors: &Tensors, xi: &[String], route: Route) -> Result<Report> {
    let (json, table) =
        batch(tensors, xi, parse::weighting, |x: &Weighting| x.values(), "xi", &FUNCTIONAL_COLUMNS, |s, x| {
            functional(match route {
                Route::Primal => awsr_primal(s, x, cfg.tol)?,
                Route::Dual => awsr_dual(s, x, cfg.tol)?,
            })
        })?;
    Ok(Report::json(json, table))
}

pub fn minentropy(cfg: &RunConfig, tensors: &Tensors, xi: &[String], theta: &[String]) -> Result<Report> {
    let (json, table) = if theta.is_empty() {
        batch(tensors, xi, parse::weighting, |x: &Weighting| x.values(), "xi", &FUNCTIONAL_COLUMNS, |s, x| {
            torus_analog(min_entropy_g(s, x, cfg.tol)?)
        })?
    } else {
        batch(tensors, theta, parse::theta, |t: &ThetaWeights| t.values(), "theta", &FUNCTIONAL_COLUMNS, |s, th| {
            torus_analog(min_entropy_zeta(s, th, cfg.tol)?)
        })?
    };
    Ok(Report::json(json, table))
}

fn require_tight(support: &Support, seed: u64) -> Result<()> {
    match find_tight_witness_seeded(support, DEFAULT_RADIUS, seed)? {
        TightnessOutcome::Tight { .. } => Ok(()),
        TightnessOutcome::NotTight { .. } => Err(tensor_spectra::Error::NotTight.into()),
        TightnessOutcome::Inconclusive { radius } => {
            Err(anyhow::Error::new(tensor_spectra::Error::NotTight).context(format!("tightness inconclusive up to radius {radius}")))
        }
    }
}

pub fn field(cfg: &RunConfig, tensors: &Tensors, theta: &[String], resolution: usize) -> Result<Report> {
    let loaded = load(tensors)?;
    let grids: Vec<ZetaGrid> = loaded
        .iter()
        .map(|t| {
            require_tight(&t.support, cfg.seed).with_context(|| t.path.clone())?;
            Ok(ZetaGrid::new(&t.support, DEFAULT_THETA_RESOLUTION, cfg.tol / 4.0)?)
        })
        .collect::<Result<_>>()?;
    let parsed: Vec<ThetaWeights> = theta.iter().map(|s| parse::theta(s).with_context(|| format!("--theta {s}"))).collect::<Result<_>>()?;
    let mut table =
        Table::new(&["tensor", "theta1", "theta2", "theta3", "value", "log2_value", "gap", "xi1", "xi2", "xi3"]);
    let mut items = Vec::new();
    for (t, grid) in loaded.iter().zip(&grids) {
        for th in &parsed {
            let r = field_quantum_functional_on_grid(grid, th, resolution)?;
            let mut row = vec![t.path.clone()];
            row.extend(th.values().iter().map(|v| num(*v)));
            row.extend([num(r.value), num(r.log2_value), num(r.gap)]);
            row.extend(r.xi.values().iter().map(|v| num(*v)));
            table.push(row);
            let value = json!({ "value": r.value, "log2_value": r.log2_value, "witness": { "xi": r.xi }, "gap": r.gap, "domain": "torus analog" });
            items.push(if loaded.len() * parsed.len() == 1 {
                value
            } else {
                json!({ "tensor": t.path, "theta": th.values(), "result": value })
            });
        }
    }
    Ok(Report::json(collect(items), table))
}

pub fn semistable(tensors: &Tensors) -> Result<Report> {
    let loaded = load(tensors)?;
    let mut table = Table::new(&["tensor", "status", "certificate"]);
    let mut items = Vec::new();
    let mut negative = Vec::new();
    for t in &loaded {
        let cert = uniform_marginals_feasible(&t.support);
        let (status, entries) = match &cert {
            UniformMarginals::Feasible { weights } => ("feasible", weights),
            UniformMarginals::Infeasible { farkas } => {
                negative.push(format!("{}: no distribution on the support has uniform marginals", t.path));
                ("infeasible", farkas)
            }
        };
        table.push(vec![t.path.clone(), status.to_string(), joined(entries)]);
        let mut value = to_value(&cert)?;
        if loaded.len() > 1 {
            value["tensor"] = json!(t.path);
        }
        items.push(value);
    }
    let mut report = Report::json(collect(items), table);
    if !negative.is_empty() {
        report.negative = Some(negative.join("\n"));
    }
    Ok(report)
}

pub fn weights(cfg: &RunConfig, tensors: &Tensors, xi: &str, k: &str) -> Result<Report> {
    let loaded = load(tensors)?;
    let x = parse::weighting(xi).with_context(|| format!("--xi {xi}"))?;
    let ks = parse::usize_list(k).with_context(|| format!("--k {k}"))?;
    let budget = cfg.budget.map_or(DEFAULT_BUDGET, u128::from);
    let mut header = Vec::new();
    if loaded.len() > 1 {
        header.push("tensor");
    }
    header.extend(["k", "log2M", "log2M/k", "polytope_log2"]);
    let mut table = Table::new(&header);
    let mut items = Vec::new();
    for t in &loaded {
        let rows = convergence_profile(&t.support, &x, &ks, budget, cfg.tol).with_context(|| t.path.clone())?;
        for r in &rows {
            let mut cells = Vec::new();
            if loaded.len() > 1 {
                cells.push(t.path.clone());
            }
            cells.extend([r.k.to_string(), num(r.log2_m), num(r.log2_m_per_k), num(r.polytope_log2)]);
            table.push(cells);
        }
        items.push(if loaded.len() > 1 { json!({ "tensor": t.path, "rows": rows }) } else { to_value(&rows)? });
    }
    Ok(Report::csv(collect(items), table))
}

type Samples = Vec<([f64; 3], f64)>;

fn read_grid(path: &Path) -> Result<(Vec<String>, Samples)> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header.len() != 4 {
        bail!("{}: expected 4 columns (three coordinates and a value), got {}", path.display(), header.len());
    }
    let mut samples = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec?;
        let cell = |i: usize| parse::number(&rec[i]).with_context(|| format!("{} row {}", path.display(), line + 2));
        samples.push(([cell(0)?, cell(1)?, cell(2)?], cell(3)?));
    }
    Ok((header, samples))
}

pub fn dual(grid: &Path, to: DualTarget, resolution: Option<usize>) -> Result<Report> {
    let (header, samples) = read_grid(grid)?;
    let (names, r, rows) = match to {
        DualTarget::G => {
            if !header[0].starts_with("theta") {
                bail!("{}: a function on Θ needs columns theta1,theta2,theta3,value", grid.display());
            }
            let f = SimplexFunction::from_samples(&samples)?;
            let r = resolution.or(f.resolution()).expect("grid functions have a resolution");
            ("xi", r, XiFunction::conjugate_of(&f, r)?.samples(r))
        }
        DualTarget::F => {
            if !header[0].starts_with("xi") {
                bail!("{}: a function on Ξ needs columns xi1,xi2,xi3,value", grid.display());
            }
            let g = XiFunction::from_samples(&samples)?;
            let r = resolution.or(g.resolution()).expect("grid functions have a resolution");
            let f = SimplexFunction::tabulate(r, false, |th| f_from_g(&g, &th).value)?;
            ("theta", r, f.samples(r))
        }
    };
    let cols: Vec<String> = (1..=3).map(|i| format!("{names}{i}")).chain(["value".to_string()]).collect();
    let mut table = Table { header: cols, rows: Vec::new() };
    let mut items = Vec::new();
    for (c, v) in &rows {
        let point = c.map(|a| a as f64 / r as f64);
        let mut cells: Vec<String> = point.iter().map(|x| num(*x)).collect();
        cells.push(num(*v));
        table.push(cells);
        items.push(json!({ names: point, "value": v }));
    }
    Ok(Report::csv(Value::Array(items), table))
}

pub fn repdims(cfg: &RunConfig, k: usize, m: usize, n: usize) -> Result<Report> {
    if k == 0 {
        bail!("--k must be at least 1");
    }
    if m == 0 || n == 0 {
        bail!("--m and --n must be at least 1");
    }
    let budget = cfg.budget.map_or(DEFAULT_RATE_BUDGET, |b| usize::try_from(b).unwrap_or(usize::MAX));
    let mut table = Table::new(&[
        "lambda",
        "specht_dim",
        "specht_lower",
        "specht_upper",
        "schur_dim",
        "schur_bound",
        "n",
        "log2_dim_n",
        "log2_bound_n",
        "rate_holds",
    ]);
    let mut items = Vec::new();
    let bound = schur_dim_bound(k, m);
    for lambda in partitions(k) {
        let dim = specht_dim_exact(&lambda);
        let b = specht_bounds(&lambda);
        let schur = schur_dim_exact(&lambda, m);
        let rate = entropy_rate_check(&lambda, n, budget)?;
        table.push(vec![
            lambda.to_string(),
            dim.to_string(),
            b.lower.to_string(),
            b.upper.to_string(),
            schur.to_string(),
            bound.to_string(),
            n.to_string(),
            num(rate.log2_dim),
            num(rate.log2_bound),
            rate.holds.to_string(),
        ]);
        items.push(json!({
            "lambda": lambda.parts(),
            "specht_dim": dim.to_string(),
            "specht_lower": b.lower.to_string(),
            "specht_upper": b.upper.to_string(),
            "schur_dim": schur.to_string(),
            "schur_bound": bound.to_string(),
            "rate": rate,
        }));
    }
    Ok(Report::csv(Value::Array(items), table))
}

pub fn examples(cfg: &RunConfig) -> Result<Report> {
    let q = Field::Rational;
    let i3 = build_diagonal(3, q)?.support();
    let mm225 = build_matmul(2, 2, 5, q)?.support();
    let mm222 = build_matmul(2, 2, 2, q)?.support();
    let w = build_w_tensor(q).support();
    let ones = Weighting::ones();
    let half = Weighting::new([0.5, 1.0, 1.0])?;
    let uniform = ThetaWeights::uniform();

    let rows: Vec<(&str, &str, String, f64)> = vec![
        ("I_3", "cover", ones.to_string(), weighted_cover_value(&i3, &ones)?.value),
        ("I_3", "gxi", ones.to_string(), awsr_primal(&i3, &ones, cfg.tol)?.value),
        ("I_3", "zeta", uniform.to_string(), support_functional_zeta(&i3, &uniform, cfg.tol)?.value),
        ("<2,2,5>", "cover", half.to_string(), weighted_cover_value(&mm225, &half)?.value),
        ("<2,2,5>", "general_ub", half.to_string(), general_ub(mm225.dims(), &half)),
        ("<2,2,2>", "cover", ones.to_string(), weighted_cover_value(&mm222, &ones)?.value),
        ("<2,2,2>", "zeta", uniform.to_string(), support_functional_zeta(&mm222, &uniform, cfg.tol)?.value),
        ("W", "cover", ones.to_string(), weighted_cover_value(&w, &ones)?.value),
        ("W", "gxi", ones.to_string(), awsr_primal(&w, &ones, cfg.tol)?.value),
        ("W", "minentropy", ones.to_string(), min_entropy_g(&w, &ones, cfg.tol)?.value),
        ("W", "zeta", uniform.to_string(), support_functional_zeta(&w, &uniform, cfg.tol)?.value),
    ];
    let mut table = Table::new(&["tensor", "quantity", "parameter", "value"]);
    let mut items = Vec::new();
    for (tensor, quantity, parameter, value) in rows {
        let shown = format!("{value:.6}");
        table.push(vec![tensor.to_string(), quantity.to_string(), parameter.clone(), shown.clone()]);
        items.push(json!({ "tensor": tensor, "quantity": quantity, "parameter": parameter, "value": shown }));
    }
    Ok(Report::csv(Value::Array(items), table))
}

pub fn info(cfg: &RunConfig, tensors: &Tensors) -> Result<Report> {
    let loaded = load(tensors)?;
    let mut table = Table::new(&[
        "tensor",
        "dims",
        "field",
        "nnz",
        "rank1",
        "rank2",
        "rank3",
        "commutative_rank",
        "tightness",
        "uniform_marginals",
    ]);
    let mut items = Vec::new();
    for t in &loaded {
        let ranks = [1, 2, 3].map(|a| t.tensor.flattening_rank(a)).map(|r| r.expect("axis in range"));
        let crank = commutative_rank(&t.tensor, DEFAULT_TRIALS, cfg.seed);
        let tightness = if t.support.is_empty() {
            "empty".to_string()
        } else {
            match find_tight_witness_seeded(&t.support, DEFAULT_RADIUS, cfg.seed)? {
                TightnessOutcome::Tight { .. } => "tight".to_string(),
                TightnessOutcome::NotTight { .. } => "not tight".to_string(),
                TightnessOutcome::Inconclusive { .. } => "inconclusive".to_string(),
            }
        };
        let uniform = uniform_marginals_feasible(&t.support).is_feasible();
        let dims = t.tensor.dims();
        table.push(vec![
            t.path.clone(),
            joined(&dims),
            t.tensor.field().to_string(),
            t.tensor.nnz().to_string(),
            ranks[0].to_string(),
            ranks[1].to_string(),
            ranks[2].to_string(),
            crank.to_string(),
            tightness.clone(),
            uniform.to_string(),
        ]);
        items.push(json!({
            "tensor": t.path,
            "dims": dims,
            "field": t.tensor.field().to_string(),
            "nnz": t.tensor.nnz(),
            "flattening_ranks": ranks,
            "commutative_rank": crank,
            "tightness": tightness,
            "uniform_marginals": uniform,
        }));
    }
    Ok(Report::json(collect(items), table))
}
