//! The ten scenario checks. Each returns a JSON report plus optional tables
//! and plots; library errors surface as failed checks unless they hit the
//! ball cap.

use crossmetric::berezin::{self, CheckReport, StateSpec};
use crossmetric::crossed::VectorFunctional;
use crossmetric::mk::{self, FiniteSystem};
use crossmetric::numerics;
use crossmetric::seminorm::Nvert;
use crossmetric::{Error, GroupElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{Plot, Table};
use crate::scenario::{CheckName, Context, CqmsSystem};

pub const STRUCTURE_TOL: f64 = 1e-12;
pub const SANDWICH_SLACK: f64 = 1e-8;
pub const SANDWICH_UPPER_SLACK: f64 = 1e-6;
pub const MK_SLACK: f64 = 1e-9;
const KERNEL_SAMPLES: usize = 20;

pub struct CheckOutput {
    pub name: CheckName,
    pub pass: bool,
    pub body: Value,
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
}

impl CheckOutput {
    fn new(name: CheckName, pass: bool, body: Value) -> Self {
        CheckOutput { name, pass, body, tables: Vec::new(), plots: Vec::new() }
    }

    /// JSON report with the check name, its statement and the verdict first.
    pub fn report(&self) -> Value {
        let mut out = serde_json::Map::new();
        out.insert("check".into(), json!(self.name.as_str()));
        out.insert("reference".into(), json!(self.name.reference()));
        out.insert("pass".into(), json!(self.pass));
        if let Value::Object(m) = &self.body {
            for (k, v) in m {
                out.insert(k.clone(), v.clone());
            }
        }
        Value::Object(out)
    }
}

/// Per-check RNG so checks are independent of execution order.
fn rng_for(ctx: &Context, name: CheckName) -> ChaCha8Rng {
    let idx = CheckName::ALL.iter().position(|c| *c == name).expect("known check") as u64;
    ChaCha8Rng::seed_from_u64(ctx.seed ^ (idx + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

pub fn run(ctx: &Context, name: CheckName) -> Result<CheckOutput, Error> {
    match name {
        CheckName::FolnerConvergence => folner_convergence(ctx),
        CheckName::BerezinContraction => berezin_contraction(ctx),
        CheckName::SliceContraction => slice_contraction(ctx),
        CheckName::ApproximationIdentity => approximation_identity(ctx),
        CheckName::ApproximationBound => approximation_bound(ctx),
        CheckName::TensorSumSandwich => tensor_sum_sandwich(ctx),
        CheckName::SpectralTripleAudit => spectral_triple_audit(ctx),
        CheckName::MkDistance => mk_distance(ctx),
        CheckName::CqmsFinite => cqms_finite(ctx),
        CheckName::KernelAudit => kernel_audit(ctx),
    }
}

fn folner_convergence(ctx: &Context) -> Result<CheckOutput, Error> {
    let f = &ctx.scenario.folner;
    let ns: Vec<u32> = (f.n_min..=f.n_max).collect();
    let table = berezin::folner_convergence(&ctx.length, f.r, &ns)?;
    // Entries may reach 0 once F_n covers a finite group; decrease is required while positive.
    let pass = table.rows.windows(2).all(|w| w[1].rho_hat < w[0].rho_hat || (w[0].rho_hat == 0.0 && w[1].rho_hat == 0.0));
    let group = ctx.group.family().label();
    let length = ctx.length.name();
    let rows = table.rows.iter().map(|r| vec![r.n.to_string(), fmt(r.rho_hat), f.r.to_string(), group.clone(), length.to_string()]).collect();
    let mut out = CheckOutput::new(
        CheckName::FolnerConvergence,
        pass,
        json!({ "r": f.r, "strictly_decreasing": table.strictly_decreasing, "rows": table.rows }),
    );
    out.tables.push(Table { file: "folner.csv".into(), header: vec!["n", "rho_hat", "r", "group", "length"], rows });
    out.plots.push(Plot {
        file: "folner.svg".into(),
        title: format!("surrogate distance to the counit, r = {}", f.r),
        x_label: "n".into(),
        y_label: "rho_hat".into(),
        series: vec![("rho_hat".into(), table.rows.iter().map(|r| (r.n as f64, r.rho_hat)).collect())],
    });
    Ok(out)
}

fn berezin_contraction(ctx: &Context) -> Result<CheckOutput, Error> {
    let f = ctx.group.ball(ctx.scenario.folner.f_radius)?;
    let mut reports = Vec::new();
    for z in &ctx.samples {
        for &r in &ctx.scenario.radii {
            reports.push(berezin::contraction_check(&ctx.geo, &f, z, r)?);
        }
    }
    Ok(CheckOutput::new(CheckName::BerezinContraction, all_pass(&reports), json!({ "f_radius": f.radius, "reports": reports })))
}

fn slice_contraction(ctx: &Context) -> Result<CheckOutput, Error> {
    let mut rng = rng_for(ctx, CheckName::SliceContraction);
    let mut reports = Vec::new();
    for z in &ctx.samples {
        let eta = VectorFunctional::random(ctx.cp(), ctx.r_min(), &mut rng)?;
        reports.push(berezin::slice_contraction_check(&ctx.geo, &eta, z, ctx.r_min(), ctx.r_max(), 2)?);
    }
    Ok(CheckOutput::new(CheckName::SliceContraction, all_pass(&reports), json!({ "reports": reports })))
}

fn approximation_identity(ctx: &Context) -> Result<CheckOutput, Error> {
    let mut rng = rng_for(ctx, CheckName::ApproximationIdentity);
    let f = ctx.group.ball(ctx.scenario.folner.f_radius)?;
    let mut reports = Vec::new();
    for z in &ctx.samples {
        let eta = VectorFunctional::random(ctx.cp(), ctx.r_min(), &mut rng)?;
        reports.push(berezin::approximation_identity_check(ctx.cp(), &eta, &f, z)?);
    }
    Ok(CheckOutput::new(CheckName::ApproximationIdentity, all_pass(&reports), json!({ "f_radius": f.radius, "reports": reports })))
}

fn approximation_bound(ctx: &Context) -> Result<CheckOutput, Error> {
    let f = ctx.group.ball(ctx.scenario.folner.f_radius)?;
    let mut reports = Vec::new();
    for z in &ctx.samples {
        let r = ctx.cp().support_radius(z)?.max(1);
        reports.push(berezin::approximation_bound_check(&ctx.geo, &f, z, r, ctx.r_max().max(r))?);
    }
    Ok(CheckOutput::new(CheckName::ApproximationBound, all_pass(&reports), json!({ "f_radius": f.radius, "reports": reports })))
}

#[derive(Serialize)]
struct SandwichSample {
    sample: usize,
    rows: Vec<crossmetric::seminorm::SandwichRow>,
    lower_pass: bool,
    upper_pass: bool,
}

fn tensor_sum_sandwich(ctx: &Context) -> Result<CheckOutput, Error> {
    let radii = &ctx.scenario.radii;
    let tol = ctx.scenario.tolerances.convergence;
    let mut samples = Vec::new();
    let mut table = Vec::new();
    let mut series = Vec::new();
    for (k, z) in ctx.samples.iter().enumerate() {
        let rows = ctx.geo.sandwich(z, ctx.parities, radii, tol)?;
        let lower_pass = rows.iter().all(|r| r.d_v.max(r.d_h) <= r.tensor + SANDWICH_SLACK);
        let last = rows.last().expect("nonempty schedule");
        let upper_pass = last.tensor <= 2.0 * last.d_v.max(last.d_h) + SANDWICH_UPPER_SLACK;
        for r in &rows {
            table.push(vec![k.to_string(), r.radius.to_string(), fmt(r.d_v), fmt(r.d_h), fmt(r.tensor)]);
        }
        series.push((format!("z{k}"), rows.iter().map(|r| (r.radius as f64, r.tensor)).collect()));
        samples.push(SandwichSample { sample: k, rows, lower_pass, upper_pass });
    }
    let pass = samples.iter().all(|s| s.lower_pass && s.upper_pass);
    let mut out = CheckOutput::new(
        CheckName::TensorSumSandwich,
        pass,
        json!({ "parities": [ctx.parities.0, ctx.parities.1], "samples": samples }),
    );
    out.tables.push(Table { file: "sandwich.csv".into(), header: vec!["sample", "radius", "d_v", "d_h", "tensor"], rows: table });
    out.plots.push(Plot {
        file: "norm_traces.svg".into(),
        title: "truncated tensor-sum seminorm by radius".into(),
        x_label: "radius".into(),
        y_label: "||[D, z]||_R".into(),
        series,
    });
    Ok(out)
}

fn spectral_triple_audit(ctx: &Context) -> Result<CheckOutput, Error> {
    let r = ctx.r_max();
    let samples: Vec<_> = ctx.samples.iter().take(3).cloned().collect();
    let tensor = ctx.geo.audit_tensor_sum(ctx.parities, r, &samples)?;
    let t_s = ctx.geo.t_s_deviation(r.min(3))?;
    let length = ctx.length.audit(r)?;
    let action = ctx.cp().action().audit(&ctx.triple, r)?;
    let structural = tensor.hermitian_deviation <= STRUCTURE_TOL
        && tensor.grading_anticommutator.is_none_or(|v| v <= STRUCTURE_TOL)
        && tensor.grading_commutator.is_none_or(|v| v <= STRUCTURE_TOL)
        && t_s <= STRUCTURE_TOL;
    let pass = structural && length.pass && action.pass;
    Ok(CheckOutput::new(
        CheckName::SpectralTripleAudit,
        pass,
        json!({ "tolerance": STRUCTURE_TOL, "tensor_sum": tensor, "t_s_deviation": t_s, "length": length, "action": action }),
    ))
}

#[derive(Serialize)]
struct PointDistance {
    x: usize,
    y: usize,
    distance: f64,
    lower: f64,
    pass: bool,
}

fn mk_distance(ctx: &Context) -> Result<CheckOutput, Error> {
    let spec = &ctx.scenario.mk;
    let big_r = spec.seminorm_radius.unwrap_or(*spec.radii.last().expect("validated"));
    let f = ctx.group.ball(ctx.scenario.folner.f_radius)?;
    let certs = mk::mk_lower_schedule(&ctx.geo, &StateSpec::Folner(f), &StateSpec::Counit, &spec.radii, big_r, spec.budget, ctx.seed)?;
    let dominated = certs.iter().all(|c| c.upper.is_some_and(|u| c.lower <= u + MK_SLACK));
    let monotone = certs.windows(2).all(|w| w[1].lower >= w[0].lower);
    let mut points = Vec::new();
    if let crossmetric::base::BaseKind::FiniteMetric { distance } = ctx.triple.kind() {
        let sys = FiniteSystem::operator_system(&ctx.triple, &crossmetric::base::OperatorSystemSpec::full(&ctx.triple))?;
        for x in 0..distance.len() {
            for y in x + 1..distance.len() {
                let c = sys.mk_lower(sys.state(&format!("point{x}"))?, sys.state(&format!("point{y}"))?, spec.budget, ctx.seed, None)?;
                let d = distance[x][y];
                points.push(PointDistance { x, y, distance: d, lower: c.lower, pass: c.lower <= d * (1.0 + 1e-9) && c.lower >= 0.99 * d });
            }
        }
    }
    let pass = dominated && monotone && points.iter().all(|p| p.pass);
    let rows = certs
        .iter()
        .map(|c| vec![c.radius.to_string(), fmt(c.lower), c.upper.map_or(String::new(), fmt)])
        .collect();
    let mut out = CheckOutput::new(
        CheckName::MkDistance,
        pass,
        json!({
            "seminorm_radius": big_r,
            "budget": spec.budget,
            "dominated": dominated,
            "monotone": monotone,
            "certificates": certs,
            "point_evaluations": points,
        }),
    );
    out.tables.push(Table { file: "mk.csv".into(), header: vec!["radius", "lower", "upper"], rows });
    Ok(out)
}

fn cqms_finite(ctx: &Context) -> Result<CheckOutput, Error> {
    let spec = &ctx.scenario.cqms;
    let sys = match spec.system {
        CqmsSystem::ScalarSpan => mk::folner_span_system(&ctx.geo, spec.f_radius, ctx.r_max(), Nvert::Sup)?,
        CqmsSystem::Base => FiniteSystem::operator_system(&ctx.triple, &ctx.operator_system)?,
    };
    let report = sys.cqms_finite_check(spec.budget, ctx.seed)?;
    Ok(CheckOutput::new(CheckName::CqmsFinite, report.pass, json!({ "system": format!("{:?}", spec.system), "report": report })))
}

#[derive(Serialize)]
struct KernelRow {
    g: GroupElement,
    value: f64,
    bound: f64,
    pass: bool,
}

fn kernel_audit(ctx: &Context) -> Result<CheckOutput, Error> {
    let mut rng = rng_for(ctx, CheckName::KernelAudit);
    let r = ctx.r_max();
    let cp = ctx.cp();
    let mut zero = Vec::new();
    for _ in 0..KERNEL_SAMPLES {
        let x = ctx.triple.random_element(&mut rng);
        zero.push(ctx.geo.l_l(&cp.pi(x)?, &[r], 1.0)?.value);
    }
    let pool = ctx.group.ball(r.min(3))?;
    let mut rows = Vec::new();
    if pool.len() > 1 {
        for _ in 0..KERNEL_SAMPLES {
            let g = pool.elements[rng.gen_range(1..pool.len())].clone();
            let x = loop {
                let x = ctx.triple.random_element(&mut rng);
                if numerics::sigma_min(&x) > 1e-3 {
                    break x;
                }
            };
            let value = ctx.geo.l_l(&cp.monomial(x.clone(), &g)?, &[r], 1.0)?.value;
            let bound = 0.1 * ctx.length.sigma_min(&g)? * numerics::sigma_min(&x);
            rows.push(KernelRow { g, value, bound, pass: value > bound });
        }
    }
    let pass = zero.iter().all(|&v| v == 0.0) && rows.iter().all(|k| k.pass);
    Ok(CheckOutput::new(CheckName::KernelAudit, pass, json!({ "radius": r, "identity_values": zero, "off_identity": rows })))
}
