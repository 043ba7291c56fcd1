use std::fmt::Write as _;

use serde_json::{json, Value};

use genpoint::dimension::{
    convergence_exponent, geometric_schedule, local_dimension, relative_entropy_integral, relative_entropy_sum,
    DimensionReport, IntegralOptions, ReportParts,
};
use genpoint::gauss::{dim_generic_cf, CfOptions};
use genpoint::generic::{
    build_seed, export_stream, first_cap_violation, import_stream, sample_f, sample_ystar, verify_generic, Caps,
    FzParams, GenericPoint, SeedOptions,
};
use genpoint::gibbs::{gurevich_pressure, GibbsModel, ModelOptions, PressureOptions};
use genpoint::measures::conditional_entropy;
use genpoint::symbolic::{DigitSource, Finite};

use crate::config::Params;
use crate::spec::{self, Measure};
use crate::CliError;

/// A command's result before it is framed and written.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub csv: Option<String>,
}

fn required(v: &Option<String>, name: &str) -> Result<String, CliError> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing --{name}")))
}

fn positive<T: PartialOrd + Default + std::fmt::Display>(v: T, name: &str) -> Result<T, CliError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn json_of<S: serde::Serialize>(v: &S) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Lib(e.into()))
}

/// Maps over the items on `workers` threads, keeping their order.
fn par_map<T: Sync, R: Send>(items: &[T], workers: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if workers <= 1 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|sc| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| sc.spawn(move || c.iter().map(f).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn pressure(p: &mut Params) -> Result<Output, CliError> {
    let name = p.potential.get_or_insert_with(|| "gauss".into()).clone();
    let s = *p.s.get_or_insert(1.0);
    let pot = spec::potential(&name, s)?;
    let cap = positive(*p.cap.get_or_insert(pot.alphabet.unwrap_or(1000)), "N")?;
    let depth = positive(*p.depth.get_or_insert(if pot.alphabet.is_some() { 1 } else { 2 }), "d")?;
    let tol = *p.tol.get_or_insert(1e-14);
    p.seed.get_or_insert(0);
    let opts = PressureOptions { model: ModelOptions { tolerance: tol, ..Default::default() }, ..Default::default() };
    let (_, r) = gurevich_pressure(pot.phi, cap, depth, &opts)?;

    let mut text = String::new();
    let _ = writeln!(text, "potential = {}", r.potential);
    let _ = writeln!(text, "N = {}", r.cap);
    let _ = writeln!(text, "d = {}", r.depth);
    let _ = writeln!(text, "pressure = {}", r.pressure);
    let _ = writeln!(text, "eigen_residual = {:.3e}", r.eigen_residual);
    let _ = writeln!(text, "iterations = {}", r.iterations);
    let mut csv = String::from("N,d,pressure\n");
    for t in &r.trend {
        let _ = writeln!(text, "trend N={} d={} pressure={}", t.cap, t.depth, t.pressure);
        let _ = writeln!(csv, "{},{},{}", t.cap, t.depth, t.pressure);
    }
    for ps in &r.periodic {
        let _ = writeln!(text, "periodic n={} cap={} value={}", ps.period, ps.cap, ps.value);
    }
    Ok(Output { text, json: json_of(&r)?, csv: Some(csv) })
}

pub fn dim(p: &mut Params) -> Result<Output, CliError> {
    let mu_spec = required(&p.mu, "mu")?;
    let nu_spec = required(&p.nu, "nu")?;
    let mu = spec::measure(&mu_spec)?;
    if nu_spec.trim() == "gauss" {
        return cfdim_with(p, &mu);
    }
    let nu = spec::measure(&nu_spec)?;
    let cap = positive(*p.cap.get_or_insert(mu.support_cap().or(nu.support_cap()).unwrap_or(20)), "N")?;
    let k = positive(*p.k.get_or_insert(4), "k")?;
    let rank = positive(*p.rank.get_or_insert(100_000), "rank")?;
    p.seed.get_or_insert(0);

    let mut settings = std::collections::BTreeMap::new();
    settings.insert("N".into(), cap.to_string());
    settings.insert("k".into(), k.to_string());
    settings.insert("rank".into(), rank.to_string());
    let report = DimensionReport::assemble(ReportParts {
        label: format!("dim({} | {})", nu.describe(), mu.describe()),
        exponent: Some(convergence_exponent(nu.as_ref(), rank)?),
        h_mu: Some(conditional_entropy(mu.as_ref(), k, cap)?),
        sum: Some(relative_entropy_sum(nu.as_ref(), mu.as_ref(), k, cap)?),
        mu_equals_nu: mu_spec.trim() == nu_spec.trim(),
        settings,
        ..Default::default()
    })?;
    Ok(Output { text: report.to_text(), json: json_of(&report)?, csv: None })
}

fn seed_options(p: &mut Params) -> Result<SeedOptions, CliError> {
    Ok(SeedOptions {
        levels: positive(*p.levels.get_or_insert(3), "levels")?,
        seed: *p.seed.get_or_insert(0),
        ..Default::default()
    })
}

fn build(p: &mut Params, mu: &Measure) -> Result<(GenericPoint, Caps), CliError> {
    let caps = Caps::parse(p.caps.get_or_insert_with(|| "n".into()))?;
    let opts = seed_options(p)?;
    Ok((build_seed(mu.as_ref(), caps, &opts)?, caps))
}

pub fn seed(p: &mut Params) -> Result<Output, CliError> {
    let mu = spec::measure(&required(&p.mu, "mu")?)?;
    let (z, caps) = build(p, &mu)?;
    let length = positive(*p.length.get_or_insert(10_000), "length")?;
    if let Some((n, d)) = first_cap_violation(&z, &caps, length) {
        return Err(CliError::Lib(genpoint::Error::CapMismatch(format!("z_{} = {d} exceeds the cap", n + 1))));
    }
    let mut header = z.header();
    let _ = writeln!(header, "# caps respected up to n = {length}");
    let text = export_stream(&header, &z, length);
    let mut csv = String::from("level,eps,alphabet,m,word_length,reps,max_digit,d_star\n");
    for l in &z.schedule.levels {
        let reps = l.reps.map_or_else(|| "open".to_string(), |t| t.to_string());
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            l.j,
            l.eps,
            l.alphabet,
            l.m,
            l.word.len(),
            reps,
            l.max_digit,
            l.distance
        );
    }
    let json = json!({
        "measure": z.measure,
        "caps": caps.to_string(),
        "schedule": json_of(&z.schedule)?,
        "digits": z.prefix(length),
    });
    Ok(Output { text, json, csv: Some(csv) })
}

pub fn verify(p: &mut Params) -> Result<Output, CliError> {
    let mu = spec::measure(&required(&p.mu, "mu")?)?;
    let horizons = p.horizons.get_or_insert_with(|| vec![1000, 10_000, 100_000]).clone();
    let k = positive(*p.k.get_or_insert(4), "k")?;
    let cap = positive(*p.cap.get_or_insert(mu.support_cap().unwrap_or(8)), "N")?;
    let t = match p.stream.clone() {
        Some(path) => {
            p.seed.get_or_insert(0);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            verify_generic(&Finite(import_stream(&text)?), mu.as_ref(), &horizons, k, cap)?
        }
        None => {
            let (z, _) = build(p, &mu)?;
            verify_generic(&z, mu.as_ref(), &horizons, k, cap)?
        }
    };
    let mut text = String::new();
    let mut csv = String::from("horizon,d_star\n");
    for (h, d) in t.horizons.iter().zip(&t.distances) {
        let _ = writeln!(text, "horizon {h} d_star = {d}");
        let _ = writeln!(csv, "{h},{d}");
    }
    let _ = writeln!(text, "tail = {}", t.tail);
    let _ = writeln!(text, "decreasing = {}", t.decreasing);
    let _ = writeln!(text, "max_digit = {}", t.max_digit);
    Ok(Output { text, json: json_of(&t)?, csv: Some(csv) })
}

pub fn cantor(p: &mut Params) -> Result<Output, CliError> {
    let mu = spec::measure(&required(&p.mu, "mu")?)?;
    let kind = p.kind.get_or_insert_with(|| "ystar".into()).clone();
    let count = positive(*p.count.get_or_insert(50), "count")?;
    let length = positive(*p.length.get_or_insert(10_000), "length")?;
    let levels = *p.levels.get_or_insert(2);
    let workers = p.workers();
    let opts = SeedOptions { levels, seed: *p.seed.get_or_insert(0), ..Default::default() };
    let sched = geometric_schedule(length, 8);

    let (label, bound, liminfs) = match kind.as_str() {
        "ystar" => {
            let name = required(&p.potential, "potential")?;
            let s = *p.s.get_or_insert(1.0);
            let pot = spec::potential(&name, s)?;
            let cap = positive(*p.cap.get_or_insert(pot.alphabet.unwrap_or(1000)), "N")?;
            let depth = positive(*p.depth.get_or_insert(if pot.alphabet.is_some() { 1 } else { 2 }), "d")?;
            let k = positive(*p.k.get_or_insert(2), "k")?;
            let entropy_cap = positive(*p.entropy_cap.get_or_insert(mu.support_cap().unwrap_or(1000)), "entropy_cap")?;
            let model = GibbsModel::build(pot.phi, cap, depth, &ModelOptions::default())?;
            let y = sample_ystar(mu.as_ref(), &model, count, length, &opts)?;
            let h_rel = relative_entropy_integral(&model, mu.as_ref(), model.depth() + 1, &IntegralOptions::default())?.last;
            let h = conditional_entropy(mu.as_ref(), k, entropy_cap)?.value;
            let dims = par_map(&y.streams, workers, |x| {
                local_dimension(&Finite(x.clone()), &model, &y.measure, &sched).map(|l| l.liminf)
            });
            ("h_mu / h(nu|mu)", h / h_rel, dims)
        }
        "f" => {
            let nu = spec::measure(p.nu.get_or_insert_with(|| "inverse-square".into()))?;
            let params = FzParams {
                eps: *p.eps.get_or_insert(0.9),
                delta: *p.delta.get_or_insert(0.9),
                ranks: positive(*p.ranks.get_or_insert(1_000_000), "ranks")?,
            };
            let rank = positive(*p.rank.get_or_insert(100_000), "rank")?;
            let z = build_seed(mu.as_ref(), Caps::Unbounded, &opts)?;
            let f = sample_f(&z, nu.as_ref(), params, count, length, opts.seed)?;
            let alpha = convergence_exponent::<f64, _>(nu.as_ref(), rank)?.alpha;
            let dims = par_map(&f.streams, workers, |x| {
                local_dimension(&Finite(x.clone()), nu.as_ref(), &f.measure, &sched).map(|l| l.liminf)
            });
            ("alpha (1 - eps) delta / (1 + eps)", params.lower_bound(alpha), dims)
        }
        other => return Err(CliError::Config(format!("unknown cantor kind {other:?} (ystar or f)"))),
    };
    let liminfs: Vec<f64> = liminfs.into_iter().collect::<Result<_, _>>()?;
    let passed = liminfs.iter().filter(|&&l| l >= bound - 0.05).count();
    let min = liminfs.iter().copied().fold(f64::INFINITY, f64::min);

    let mut text = String::new();
    let _ = writeln!(text, "kind = {kind}");
    let _ = writeln!(text, "bound = {bound}");
    let _ = writeln!(text, "bound_formula = {label}");
    let _ = writeln!(text, "samples = {}", liminfs.len());
    let _ = writeln!(text, "at_least_bound_minus_0.05 = {passed}");
    let _ = writeln!(text, "min_liminf = {min}");
    let mut csv = String::from("sample,liminf\n");
    for (i, l) in liminfs.iter().enumerate() {
        let _ = writeln!(text, "sample {i} liminf = {l}");
        let _ = writeln!(csv, "{i},{l}");
    }
    let json = json!({ "kind": kind, "bound": bound, "passed": passed, "min_liminf": min, "liminf": liminfs });
    Ok(Output { text, json, csv: Some(csv) })
}

pub fn cfdim(p: &mut Params) -> Result<Output, CliError> {
    let mu = spec::measure(&required(&p.mu, "mu")?)?;
    cfdim_with(p, &mu)
}

fn cfdim_with(p: &mut Params, ell: &Measure) -> Result<Output, CliError> {
    let opts = CfOptions {
        cap: positive(*p.cap.get_or_insert(1000), "N")?,
        depth: positive(*p.depth.get_or_insert(2), "d")?,
        k: positive(*p.k.get_or_insert(2), "k")?,
        entropy_cap: positive(*p.entropy_cap.get_or_insert(10_000), "entropy_cap")?,
        rank: positive(*p.rank.get_or_insert(100_000), "rank")?,
        ..Default::default()
    };
    let s = *p.s.get_or_insert(1.0);
    p.seed.get_or_insert(0);
    let d = dim_generic_cf(ell.as_ref(), s, &opts)?;
    let mut text = d.report.to_text();
    if let Some(e) = &d.euclidean {
        text.push_str("[euclidean]\n");
        text.push_str(&e.to_text());
    }
    Ok(Output { text, json: json_of(&d)?, csv: None })
}
