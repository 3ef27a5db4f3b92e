//! The subcommands over the core pipelines.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use zetalab_core::arith::{rat, PrimePower};
use zetalab_core::counting::{count_series, parse_variety, CountCache, CountOptions, PointCounts, VarietySpec};
use zetalab_core::lfun::{
    bounds_certificate, dirichlet_expand, euler_product_value, l_closed_form, order_dashboard, serre_bounds_certificate,
    ArithmeticModel, BadPrimePolicy, EulerOptions, WindingOptions,
};
use zetalab_core::ncspec::{
    factorization_check, nc_functional_check, nc_l_adic_check, nc_spectrum_from_weights, nc_weil_check,
    order_additivity_check, reciprocity_check, strong_tate_check, NcSpectrum, Parity,
};
use zetalab_core::report::{Check, Verdict};
use zetalab_core::zeta::{
    hasse_weil_functional_check, l_adic_check, weight_factorize, weil_check, zeta_rational, FactorOptions,
    WeightDecomposition, DEFAULT_SAMPLES,
};
use zetalab_core::Error;

use crate::config::{Format, RunConfig};
use crate::report::{ConjectureReport, SCHEMA, TOOL_VERSION};
use crate::{BeilinsonArgs, CheckCommand, CliError, Command, LfunArgs, ModelArgs, NcArgs, SerreArgs, VarietyArgs};

pub enum Emitted {
    Report(ConjectureReport),
    Counts(String),
}

pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<Emitted, CliError> {
    Ok(match command {
        Command::Count(a) => Emitted::Counts(cmd_count(a, cfg)?),
        Command::Zeta(a) => Emitted::Report(cmd_zeta(a, cfg)?),
        Command::Nc(a) => Emitted::Report(cmd_nc(a, cfg)?),
        Command::Lfun(a) => Emitted::Report(cmd_lfun(a, cfg)?),
        Command::Check { which } => Emitted::Report(cmd_check(which, cfg)?),
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(path: &Path) -> Result<VarietySpec, CliError> {
    parse_variety(&read(path)?).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<ArithmeticModel, CliError> {
    ArithmeticModel::from_json(&read(path)?).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

fn cache(cfg: &RunConfig) -> Result<CountCache, CliError> {
    match &cfg.cache_dir {
        Some(dir) => CountCache::persistent(dir).map_err(|e| CliError::User(e.to_string())),
        None => Ok(CountCache::in_memory()),
    }
}

fn count_options(cfg: &RunConfig) -> CountOptions {
    CountOptions { budget: cfg.enumeration_budget as u128, degree_cap: cfg.degree_cap, ..CountOptions::default() }
}

/// Errors caused by the request rather than by the tool.
fn is_user_error(e: &Error) -> bool {
    match e {
        Error::Parse { .. } | Error::Invalid(_) | Error::DegreeCap { .. } | Error::Budget { .. } => true,
        Error::AtDegree { source, .. } => is_user_error(source),
        _ => false,
    }
}

fn classify(e: Error) -> CliError {
    if is_user_error(&e) {
        CliError::User(e.to_string())
    } else {
        CliError::Internal(e.to_string())
    }
}

fn prime_power(a: &VarietyArgs) -> Result<PrimePower, CliError> {
    PrimePower::new(a.p, a.r).map_err(|e| CliError::User(e.to_string()))
}

/// Betti numbers from the flag, else the built-in ones of the spec.
fn betti_of(a: &VarietyArgs, spec: &VarietySpec) -> (Option<Vec<u64>>, bool) {
    match &a.betti {
        Some(b) => (Some(b.clone()), true),
        None => (spec.builtin_betti(), false),
    }
}

fn degrees_of(a: &VarietyArgs, betti: Option<&[u64]>) -> Result<u32, CliError> {
    match (a.degrees, betti) {
        (Some(0), _) => Err(CliError::User("--degrees must be positive".into())),
        (Some(m), _) => Ok(m),
        (None, Some(b)) => Ok((b.iter().sum::<u64>() as u32).max(1)),
        (None, None) => Err(CliError::User("no Betti numbers known for this spec: pass --degrees or --betti".into())),
    }
}

#[derive(Serialize)]
struct CountOutput<'a> {
    schema: u32,
    tool_version: &'static str,
    command: &'static str,
    subject: String,
    #[serde(flatten)]
    counts: &'a PointCounts,
    config: &'a RunConfig,
}

pub fn cmd_count(a: &VarietyArgs, cfg: &RunConfig) -> Result<String, CliError> {
    let spec = load_spec(&a.spec)?;
    let q = prime_power(a)?;
    let (betti, _) = betti_of(a, &spec);
    let m = degrees_of(a, betti.as_deref())?;
    let counts = count_series(&spec, q, m, &cache(cfg)?, &count_options(cfg)).map_err(classify)?;
    Ok(match cfg.format {
        Format::Json => {
            let out = CountOutput {
                schema: SCHEMA,
                tool_version: TOOL_VERSION,
                command: "count",
                subject: spec.canonical(),
                counts: &counts,
                config: cfg,
            };
            serde_json::to_string_pretty(&out).expect("serializable") + "\n"
        }
        Format::Text => {
            let list: Vec<String> = counts.counts.iter().map(u128::to_string).collect();
            format!("{} over F_{q}\nN_1..N_{m}: {}\n", spec.canonical(), list.join(" "))
        }
    })
}

/// The counted fiber and everything rebuilt from it.
struct Fiber {
    dec: WeightDecomposition,
}

fn failed_stage(name: &str, e: &Error) -> Check {
    let verdict = if matches!(e, Error::Unsupported(_)) { Verdict::Unsupported } else { Verdict::Indeterminate };
    Check::new(name, verdict, json!({ "error": e.to_string() }))
}

/// Counts, rebuilds the zeta function and splits it by weight. Stage failures after valid
/// input are recorded in the report and end the pipeline.
fn fiber_pipeline(a: &VarietyArgs, cfg: &RunConfig, report: &mut ConjectureReport) -> Result<Option<Fiber>, CliError> {
    let spec = load_spec(&a.spec)?;
    let q = prime_power(a)?;
    report.subject = format!("{} over F_{q}", spec.canonical());
    let (betti, supplied) = betti_of(a, &spec);
    let m = degrees_of(a, betti.as_deref())?;
    let d = match (&betti, spec.dimension()) {
        (Some(b), _) if b.len() % 2 == 1 => (b.len() - 1) / 2,
        (Some(b), _) => return Err(CliError::User(format!("--betti needs an odd number of entries, got {}", b.len()))),
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::User("cannot tell the dimension: pass --betti".into())),
    };
    let counts = count_series(&spec, q, m, &cache(cfg)?, &count_options(cfg)).map_err(classify)?;
    let z = match zeta_rational(&counts.counts, betti.as_deref()) {
        Ok(z) => z,
        Err(e) => {
            report.push(failed_stage("zeta-reconstruction", &e));
            return Ok(None);
        }
    };
    let opts = FactorOptions { digits: cfg.precision, cluster_tol: cfg.cluster_tol, ..FactorOptions::default() };
    let dec = match weight_factorize(&z, q, d, betti.as_deref(), &opts) {
        Ok(dec) => dec,
        Err(e) => {
            report.push(failed_stage("weight-decomposition", &e));
            return Ok(None);
        }
    };
    let mut check = Check::new(
        "zeta-reconstruction",
        Verdict::Info,
        json!({
            "counts": counts.counts.iter().map(u128::to_string).collect::<Vec<_>>(),
            "zeta": z.in_var("t"),
            "weights": dec.factors,
        }),
    );
    if supplied {
        check = check.with_fixture("betti", json!(betti));
    } else {
        report.hypothesis("the Betti numbers of the spec's family hold for this fiber (smooth reduction)");
    }
    report.push(check);
    Ok(Some(Fiber { dec }))
}

fn spectrum(fiber: &Fiber, report: &mut ConjectureReport) -> Option<NcSpectrum> {
    match nc_spectrum_from_weights(&fiber.dec) {
        Ok(s) => Some(s),
        Err(e) => {
            report.push(failed_stage("nc-spectrum", &e));
            None
        }
    }
}

fn push_result(report: &mut ConjectureReport, name: &str, r: zetalab_core::Result<Check>) {
    match r {
        Ok(c) => report.push(c),
        Err(e) => report.push(failed_stage(name, &e)),
    }
}

pub fn cmd_zeta(a: &VarietyArgs, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let mut report = ConjectureReport::new("zeta", "", cfg);
    if let Some(f) = fiber_pipeline(a, cfg, &mut report)? {
        report.push(weil_check(&f.dec, cfg.weil_tol, cfg.precision).to_check());
        report.push(l_adic_check(&f.dec).to_check());
        report.push(hasse_weil_functional_check(&f.dec, &DEFAULT_SAMPLES, cfg.functional_tol).to_check("functional"));
    }
    Ok(report)
}

fn tate_check(spec: &NcSpectrum, k0_rank: Option<usize>) -> Check {
    match k0_rank {
        None => Check::new("strong-tate", Verdict::Unsupported, json!({ "note": "no --k0-rank fixture supplied" })),
        Some(k) => match strong_tate_check(spec, k, None) {
            Ok(r) => r.to_check(),
            Err(e) => failed_stage("strong-tate", &e),
        },
    }
}

pub fn cmd_nc(a: &NcArgs, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let mut report = ConjectureReport::new("nc", "", cfg);
    let Some(f) = fiber_pipeline(&a.variety, cfg, &mut report)? else {
        return Ok(report);
    };
    let Some(s) = spectrum(&f, &mut report) else {
        return Ok(report);
    };
    report.push(nc_weil_check(&s, cfg.weil_tol, cfg.precision).to_check());
    report.push(nc_l_adic_check(&s).to_check());
    report.push(nc_functional_check(&s, &DEFAULT_SAMPLES, cfg.functional_tol).to_check());
    report.push(reciprocity_check(&s));
    push_result(&mut report, "nc-factorization", factorization_check(&f.dec));
    push_result(&mut report, "order-additivity", order_additivity_check(&f.dec, -2, f.dec.d as i64 + 2));
    if a.k0_rank.is_some() {
        report.push(tate_check(&s, a.k0_rank));
    }
    Ok(report)
}

fn policy(m: &ModelArgs) -> BadPrimePolicy {
    if m.replace_bad_primes {
        BadPrimePolicy::Replace
    } else {
        BadPrimePolicy::Exclude
    }
}

fn model_hypotheses(model: &ArithmeticModel, report: &mut ConjectureReport, policy: BadPrimePolicy) {
    report.hypothesis("good reduction at every prime not listed as bad in the model file");
    report.hypothesis(format!("Betti numbers of the generic fiber are {:?}", model.betti));
    let excluded: Vec<u64> = model
        .bad_primes
        .iter()
        .filter(|b| policy == BadPrimePolicy::Exclude || b.replacement.is_none())
        .map(|b| b.p)
        .collect();
    if !excluded.is_empty() {
        report.hypothesis(format!("bad primes {excluded:?} are left out of every product"));
    }
    let replaced: Vec<u64> = model
        .bad_primes
        .iter()
        .filter(|b| policy == BadPrimePolicy::Replace && b.replacement.is_some())
        .map(|b| b.p)
        .collect();
    if !replaced.is_empty() {
        report.hypothesis(format!("the replacement fibers at {replaced:?} give the true local factors"));
    }
}

fn parity_tag(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn euler_check(model: &ArithmeticModel, parity: Parity, s: f64, cfg: &RunConfig, policy: BadPrimePolicy) -> Check {
    let name = format!("euler-{}", parity_tag(parity));
    let opts = EulerOptions { policy, ..EulerOptions::default() };
    let product = match euler_product_value(model, parity, Complex64::new(s, 0.0), cfg.prime_cutoff, &opts) {
        Ok(p) => p,
        Err(e) => return failed_stage(&name, &e),
    };
    let mut details = serde_json::to_value(&product).expect("serializable");
    let verdict = match l_closed_form(model, parity, product.s) {
        Ok(exact) if product.excluded.is_empty() => {
            let gap = (product.value - exact).norm();
            details["closed_form_value"] = json!([exact.re, exact.im]);
            details["gap"] = json!(gap);
            // rounding in the product itself is far below the tail bound at any useful cutoff
            Verdict::from_bool(gap <= product.value_tail_bound + 1e-12)
        }
        _ => Verdict::Info,
    };
    Check::new(name, verdict, details)
}

fn dirichlet_check(model: &ArithmeticModel, parity: Parity, cfg: &RunConfig, policy: BadPrimePolicy) -> Check {
    let name = format!("dirichlet-{}", parity_tag(parity));
    let n = cfg.dirichlet_terms;
    match dirichlet_expand(model, parity, n, policy) {
        Ok(series) => {
            let mut broken = Vec::new();
            for a in 2..=n {
                for b in 2..=n / a {
                    if coprime(a, b) && !series.multiplicative_at(a, b) {
                        broken.push([a, b]);
                    }
                }
            }
            let ok = *series.b(1) == rat(1) && broken.is_empty();
            let details = json!({
                "bound": n,
                "coefficients": serde_json::to_value(&series).expect("serializable")["coeffs"],
                "excluded": series.excluded,
                "non_multiplicative_pairs": broken,
            });
            Check::new(name, Verdict::from_bool(ok), details)
        }
        Err(e) => failed_stage(&name, &e),
    }
}

fn coprime(mut a: usize, mut b: usize) -> bool {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a == 1
}

fn bounds_check(model: &ArithmeticModel, parity: Parity, cfg: &RunConfig, policy: BadPrimePolicy) -> Check {
    let name = format!("bounds-{}", parity_tag(parity));
    match bounds_certificate(model, parity, cfg.prime_cutoff, cfg.n_cutoff, policy) {
        Ok(c) => c.to_check(&name),
        Err(e) => failed_stage(&name, &e),
    }
}

pub fn cmd_lfun(a: &LfunArgs, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let model = load_model(&a.model.model)?;
    let policy = policy(&a.model);
    let mut report = ConjectureReport::new("lfun", model.name.clone(), cfg);
    model_hypotheses(&model, &mut report, policy);
    for (parity, s) in [(Parity::Even, a.s_even), (Parity::Odd, a.s_odd)] {
        report.push(euler_check(&model, parity, s, cfg, policy));
        report.push(dirichlet_check(&model, parity, cfg, policy));
        report.push(bounds_check(&model, parity, cfg, policy));
    }
    Ok(report)
}

fn cmd_serre(a: &SerreArgs, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let model = load_model(&a.model.model)?;
    let policy = policy(&a.model);
    let mut report = ConjectureReport::new("check serre", model.name.clone(), cfg);
    model_hypotheses(&model, &mut report, policy);
    let weights: Vec<usize> = if a.w.is_empty() {
        (0..model.betti.len()).filter(|&w| model.betti[w] > 0).collect()
    } else {
        a.w.clone()
    };
    for w in weights {
        let name = format!("serre-w{w}");
        match serre_bounds_certificate(&model, w, cfg.prime_cutoff, cfg.n_cutoff, policy) {
            Ok(c) => report.push(c.to_check(&name)),
            Err(e) if is_user_error(&e) => return Err(CliError::User(e.to_string())),
            Err(e) => report.push(failed_stage(&name, &e)),
        }
    }
    Ok(report)
}

fn cmd_beilinson(a: &BeilinsonArgs, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let model = load_model(&a.model.model)?;
    let mut report = ConjectureReport::new("check beilinson", model.name.clone(), cfg);
    let mut ranks = model.ranks.clone();
    let overrides = [
        (&mut ranks.k0_hom, a.k0_rank),
        (&mut ranks.k0_zero, a.k0_zero_rank),
        (&mut ranks.k1, a.k1_rank),
        (&mut ranks.k2, a.k2_rank),
        (&mut ranks.k3, a.k3_rank),
    ];
    for (slot, flag) in overrides {
        if flag.is_some() {
            *slot = flag;
        }
    }
    report.hypothesis("K-theory ranks are supplied fixtures, not computed");
    if model.closed_form.is_some() {
        report.hypothesis("orders come from the closed form of the L-function named in the model file");
    }
    let opts = WindingOptions { snap: cfg.snap_tol, ..WindingOptions::default() };
    for check in order_dashboard(&model, &a.j, &ranks, &opts).to_checks() {
        report.push(check);
    }
    Ok(report)
}

pub fn cmd_check(which: &CheckCommand, cfg: &RunConfig) -> Result<ConjectureReport, CliError> {
    let variety = |name: &str, a: &VarietyArgs| -> Result<(ConjectureReport, Option<Fiber>), CliError> {
        let mut report = ConjectureReport::new(format!("check {name}"), "", cfg);
        let fiber = fiber_pipeline(a, cfg, &mut report)?;
        Ok((report, fiber))
    };
    Ok(match which {
        CheckCommand::Weil(a) => {
            let (mut r, f) = variety("weil", a)?;
            if let Some(f) = f {
                r.push(weil_check(&f.dec, cfg.weil_tol, cfg.precision).to_check());
            }
            r
        }
        CheckCommand::Ladic(a) => {
            let (mut r, f) = variety("ladic", a)?;
            if let Some(f) = f {
                r.push(l_adic_check(&f.dec).to_check());
                if let Some(s) = spectrum(&f, &mut r) {
                    r.push(nc_l_adic_check(&s).to_check());
                }
            }
            r
        }
        CheckCommand::Functional(a) => {
            let (mut r, f) = variety("functional", a)?;
            if let Some(f) = f {
                r.push(hasse_weil_functional_check(&f.dec, &DEFAULT_SAMPLES, cfg.functional_tol).to_check("functional"));
            }
            r
        }
        CheckCommand::NcFunctional(a) => {
            let (mut r, f) = variety("nc-functional", a)?;
            if let Some(s) = f.as_ref().and_then(|f| spectrum(f, &mut r)) {
                r.push(nc_functional_check(&s, &DEFAULT_SAMPLES, cfg.functional_tol).to_check());
            }
            r
        }
        CheckCommand::Tate(a) => {
            let (mut r, f) = variety("tate", &a.variety)?;
            if let Some(s) = f.as_ref().and_then(|f| spectrum(f, &mut r)) {
                r.push(tate_check(&s, a.k0_rank));
            }
            r
        }
        CheckCommand::Serre(a) => cmd_serre(a, cfg)?,
        CheckCommand::Beilinson(a) => cmd_beilinson(a, cfg)?,
    })
}
