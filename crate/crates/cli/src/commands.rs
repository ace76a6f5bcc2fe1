use std::fs;
use std::io::Write;
use std::path::Path;

use cyclic_chern::bismut::{bch_minus_iterated, bch_minus_total, bch_vs_rho_compare, sample_points, NumericForm};
use cyclic_chern::chen::{restrict_to_m, rho_eval, tilde_rho_eval, Plot};
use cyclic_chern::chern::{chern_minus, even_chern_of_interpolation, UnitaryMap};
use cyclic_chern::corpus;
use cyclic_chern::serialize::{
    chain_from_json, chain_to_json, form_to_json, map_from_json, parse_text, plot_from_json, scalar_to_json, to_text,
};
use cyclic_chern::suites::{run_suite, Check, SUITES};
use cyclic_chern::{Chain, Form, Scalar, VarSpace};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::CliError;

fn emit(cfg: &RunConfig, v: &Value) -> Result<(), CliError> {
    let text = to_text(v);
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_text(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// `corpus:<name>` or the path of a unitary map file.
pub fn load_map(spec: &str) -> Result<UnitaryMap, CliError> {
    if let Some(name) = spec.strip_prefix("corpus:") {
        return corpus::map_by_name(name).ok_or_else(|| CliError::Input(format!("no corpus map named `{name}`")));
    }
    let v = read_json(Path::new(spec))?;
    map_from_json(&v).map_err(|e| CliError::Input(format!("{spec}: {e}")))
}

fn check_json(c: &Check) -> Value {
    json!({ "id": c.id, "title": c.title, "status": c.status.label(), "detail": c.detail })
}

pub fn verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let mut names: Vec<String> = if cfg.suites.is_empty() || cfg.suites.iter().any(|s| s == "all") {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.suites.clone()
    };
    names.dedup();
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(CliError::Config(format!("unknown suite `{bad}` (expected one of {SUITES:?} or all)")));
    }
    let suite_cfg = cfg.suite_config();
    let results: Vec<(String, Vec<Check>)> = names
        .par_iter()
        .map(|n| (n.clone(), run_suite(n, &suite_cfg).expect("suite names checked above")))
        .collect();
    let mut all_ok = true;
    let mut suites = Vec::new();
    for (name, checks) in &results {
        let ok = checks.iter().all(Check::ok);
        all_ok &= ok;
        for c in checks {
            eprintln!("{name}: {}", c.line());
        }
        suites.push(json!({
            "name": name,
            "passed": ok,
            "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
        }));
    }
    eprintln!("{}", if all_ok { "all suites passed" } else { "some suites failed" });
    emit(
        cfg,
        &json!({ "format": "cyclic-chern/report", "passed": all_ok, "seed": suite_cfg.seed, "suites": suites }),
    )?;
    Ok(all_ok)
}

pub fn chern(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.map.as_deref().ok_or_else(|| CliError::Config("chern needs --map".into()))?;
    let g = load_map(spec)?;
    let top = cfg.truncate.unwrap_or(4);
    let chain = match cfg.parity.as_deref().unwrap_or("odd") {
        "odd" => {
            let parts: Vec<Chain> = (1..=top).map(|n| chern_minus(&g, n)).collect();
            Chain::sum(&VarSpace::periodic(g.d()), g.d(), &parts)
        }
        "even" => {
            let parts: Vec<Chain> = (0..=top).map(|n| even_chern_of_interpolation(&g, n)).collect();
            let first = &parts[0];
            Chain::sum(&first.space().clone(), first.coords(), &parts)
        }
        other => return Err(CliError::Config(format!("parity must be odd or even, got `{other}`"))),
    };
    emit(cfg, &chain_to_json(&chain.canonicalized()))
}

fn load_plot(cfg: &RunConfig) -> Result<Plot, CliError> {
    let path = cfg.plot.as_ref().ok_or_else(|| CliError::Config("this mode needs --plot".into()))?;
    plot_from_json(&read_json(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_chain(cfg: &RunConfig) -> Result<Chain, CliError> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Config("this mode needs --in".into()))?;
    chain_from_json(&read_json(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Every slot of every term must live on the torus the plot maps into.
fn check_layout(w: &Chain, d: usize) -> Result<(), CliError> {
    for (i, t) in w.terms().iter().enumerate() {
        for (k, f) in t.factors.iter().enumerate() {
            if f.coords() != d || f.space().len() != d {
                return Err(CliError::Input(format!(
                    "term {i}, slot {k} lives on {} variables with {} coordinates, but the target is T^{d}",
                    f.space().len(),
                    f.coords()
                )));
            }
        }
    }
    Ok(())
}

fn numeric_json(f: &NumericForm) -> Value {
    Value::Array(
        f.comps
            .iter()
            .map(|(mask, z)| {
                let dz: Vec<u32> = (0..32).filter(|i| mask & (1 << i) != 0).collect();
                json!({ "dz": dz, "re": z.re, "im": z.im })
            })
            .collect(),
    )
}

/// The exact ratio `restriction / Tr ω^{2n−1}`, when the two are proportional.
fn restriction_coefficient(g: &UnitaryMap, restriction: &Form, n: usize) -> Option<Scalar> {
    let omega = g.maurer_cartan();
    let mut power = omega.clone();
    for _ in 1..2 * n - 1 {
        power = power.mul(&omega).ok()?;
    }
    let tr = power.trace().ok()?.alpha;
    let (mask, p) = tr.components().find(|(_, p)| !p.is_zero())?;
    let (key, c) = p.terms().next()?;
    let got = restriction.component(mask).and_then(|q| q.terms().find(|(k, _)| *k == key).map(|(_, c)| c.clone()));
    let ratio = &got.unwrap_or_else(Scalar::zero) * &c.inverse()?;
    (restriction == &tr.scale(&ratio)).then_some(ratio)
}

pub fn eval(cfg: &RunConfig) -> Result<bool, CliError> {
    let mode = cfg.mode.as_deref().ok_or_else(|| CliError::Config("eval needs --mode".into()))?;
    match mode {
        "rho" | "tilde-rho" => {
            let w = load_chain(cfg)?;
            let plot = load_plot(cfg)?;
            check_layout(&w, plot.d())?;
            let f = if mode == "rho" { rho_eval(&w, &plot)? } else { tilde_rho_eval(&w, &plot)? };
            emit(cfg, &form_to_json(&cyclic_chern::TTForm::from_alpha(f)))?;
            Ok(true)
        }
        "restrict" => {
            let w = load_chain(cfg)?;
            let d = w.coords();
            check_layout(&w, d)?;
            let f = restrict_to_m(&w, d)?;
            let mut out = form_to_json(&cyclic_chern::TTForm::from_alpha(f.clone()));
            if let (Some(spec), Some(n)) = (&cfg.map, cfg.degree) {
                let g = load_map(spec)?;
                if n == 0 {
                    return Err(CliError::Config("degree index starts at 1".into()));
                }
                let part = f.part(2 * n - 1);
                out["coefficient"] = match restriction_coefficient(&g, &part, n) {
                    Some(c) => json!({ "n": n, "value": c.to_string(), "exact": scalar_to_json(&c) }),
                    None => Value::Null,
                };
            }
            emit(cfg, &out)?;
            Ok(true)
        }
        "bch-ode" | "bch-iter" | "compare" => {
            let spec = cfg.map.as_deref().ok_or_else(|| CliError::Config("bch modes need --map".into()))?;
            let g = load_map(spec)?;
            let plot = load_plot(cfg)?;
            if plot.d() != g.d() {
                return Err(CliError::Input(format!("plot maps into T^{} but the map lives on T^{}", plot.d(), g.d())));
            }
            let opts = cfg.bch_options();
            let top = cfg.degree.unwrap_or(2).max(1);
            let points = sample_points(plot.m());
            if mode == "compare" {
                let tol = cfg.tolerance.unwrap_or(if plot.is_constant() { 1e-9 } else { 1e-6 });
                let mut worst: f64 = 0.0;
                let mut cases = Vec::new();
                for x in &points {
                    for c in bch_vs_rho_compare(&g, &plot, x, top, &opts)? {
                        worst = worst.max(c.max_deviation());
                        cases.push(json!({
                            "x": x, "n": c.n, "deviation": c.max_deviation(), "richardson": c.richardson,
                            "exact": numeric_json(&c.exact), "ode": numeric_json(&c.ode),
                            "iterated": numeric_json(&c.iterated),
                        }));
                    }
                }
                let passed = worst < tol;
                eprintln!("max deviation {worst:.3e} (tolerance {tol:.1e}): {}", if passed { "pass" } else { "FAIL" });
                emit(
                    cfg,
                    &json!({ "format": "cyclic-chern/compare", "max_deviation": worst, "tolerance": tol, "passed": passed, "cases": cases }),
                )?;
                return Ok(passed);
            }
            let mut values = Vec::new();
            for x in &points {
                let per_n: Vec<NumericForm> = if mode == "bch-ode" {
                    let total = bch_minus_total(&g, &plot, x, &opts)?;
                    (1..=top).map(|n| total.part(2 * n as u32 - 1)).collect()
                } else {
                    (1..=top).map(|n| bch_minus_iterated(&g, &plot, x, n, &opts)).collect::<Result<_, _>>()?
                };
                for (k, f) in per_n.iter().enumerate() {
                    values.push(json!({ "x": x, "n": k + 1, "components": numeric_json(f) }));
                }
            }
            emit(cfg, &json!({ "format": "cyclic-chern/numeric", "mode": mode, "values": values }))?;
            Ok(true)
        }
        other => Err(CliError::Config(format!(
            "unknown mode `{other}` (rho, tilde-rho, restrict, bch-ode, bch-iter, compare)"
        ))),
    }
}
