use blur_core::blur::{GeneralizedCylinder, PointHat};
use blur_core::ergopt::{beta_certified, finite_support_alphabet, integral, maximizing_measure, BetaCertificate};
use blur_core::lambda::connect;
use blur_core::measures::{beta_hat, classify_maximizers, AtomicMeasureHat};
use blur_core::shift::{check_fcpa, ShiftSpec};
use blur_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;

/// Human-readable lines plus the JSON document.
#[derive(Debug, Clone)]
pub struct Report {
    pub lines: Vec<String>,
    pub json: Value,
}

impl Report {
    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push_str("\n\n");
        s.push_str(&serde_json::to_string_pretty(&self.json).expect("reports serialize"));
        s.push('\n');
        s
    }
}

pub fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub depth: Option<usize>,
    pub truncation: Option<u64>,
}

fn truncation(c: &RunConfig, o: Overrides) -> u64 {
    o.truncation
        .or(c.truncation)
        .or_else(|| c.shift.lambda().and_then(|l| l.max_class()))
        .unwrap_or(8)
}

fn depth(c: &RunConfig, o: Overrides) -> usize {
    o.depth.or(c.depth).unwrap_or(3)
}

pub fn validate(c: &RunConfig) -> Result<Report> {
    let res = c.validate()?;
    let mut lines = vec![format!("shift family: {:?}", c.shift.family())];
    if let Some(r) = &res {
        lines.push(format!("resolution: {} blurred sets, certificate {}", r.size, r.certificate));
    }
    if let Some(a) = &c.potential {
        lines.push(format!("potential: {}", a.kind()));
    }
    lines.push("valid".into());
    Ok(Report {
        lines,
        json: json!({
            "valid": true,
            "family": to_json(&c.shift.family()),
            "resolution": res.map(|r| to_json(&r)),
            "potential": c.potential.as_ref().map(|a| a.kind()),
        }),
    })
}

fn certificate(c: &RunConfig, o: Overrides) -> Result<BetaCertificate> {
    beta_certified(&c.shift, c.potential()?, truncation(c, o), c.reading)
}

fn beta_lines(cert: &BetaCertificate) -> Vec<String> {
    let mut lines = vec![
        format!("{:<14}{}", "beta", cert.lower),
        format!("{:<14}{}", "exact", cert.exact),
        format!("{:<14}{:?}", "argument", cert.argument),
        format!("{:<14}{}", "truncation", cert.truncation),
        format!("{:<14}[{}, {}]", "bracket", cert.lower, cert.upper),
        format!("{:<14}{}", "tail bound", cert.tail_bound),
        format!("{:<14}{}", "orbit", cert.orbit),
    ];
    if let Some(cr) = &cert.critical {
        lines.push(format!("{:<14}{:?}", "critical", cr.symbols));
    }
    lines
}

fn beta_json(cert: &BetaCertificate) -> Value {
    json!({
        "beta": cert.lower.to_string(),
        "exact": cert.exact,
        "truncation": cert.truncation,
        "critical_cycle": cert.critical.as_ref().map(|c| c.symbols.clone()),
        "orbit": cert.orbit.to_string(),
        "certificate": to_json(cert),
    })
}

pub fn beta(c: &RunConfig, o: Overrides) -> Result<Report> {
    let cert = certificate(c, o)?;
    Ok(Report {
        lines: beta_lines(&cert),
        json: beta_json(&cert),
    })
}

pub fn maximize(c: &RunConfig, o: Overrides) -> Result<Report> {
    let a = c.potential()?;
    let cert = certificate(c, o)?;
    let mu = maximizing_measure(&c.shift, a, &cert)?;
    let value = integral(&c.shift, a, &mu)?;
    let tail = a.tail_condition(&c.shift, &cert.lower)?;
    let support = match finite_support_alphabet(&c.shift, a, &cert.lower) {
        Ok(s) => json!(s),
        Err(e @ Error::HypothesisViolated(_)) => json!({ "unavailable": e.to_string() }),
        Err(e) => return Err(e),
    };
    let mut lines = beta_lines(&cert);
    lines.push(format!("{:<14}{}", "integral", value));
    lines.push(format!("{:<14}{}", "tail holds", tail.holds));
    lines.push(format!("{:<14}{}", "support", support));
    let mut j = beta_json(&cert);
    j["maximizing_measure"] = to_json(&mu);
    j["integral"] = json!(value.to_string());
    j["tail_condition"] = to_json(&tail);
    j["finite_support"] = support;
    Ok(Report { lines, json: j })
}

pub fn classify(c: &RunConfig, o: Overrides) -> Result<Report> {
    let a = c.potential()?;
    let bs = c.blur_shift()?;
    let cert = certificate(c, o)?;
    let mu = maximizing_measure(&c.shift, a, &cert)?;
    let cl = classify_maximizers(&bs, a, &cert.lower, vec![mu])?;
    let bh = beta_hat(&bs, a, &cert.lower)?;
    let lines = vec![
        format!("{:<14}{:?}", "case", cl.case),
        format!("{:<14}{}", "beta", cl.beta),
        format!("{:<14}{}", "beta hat", bh),
        format!("{:<14}{}", "max on L0", cl.level0_max),
        cl.description.clone(),
    ];
    Ok(Report {
        lines,
        json: json!({ "classification": to_json(&cl), "beta_hat": bh.to_string(), "certificate": to_json(&cert) }),
    })
}

pub fn fcpa(c: &RunConfig) -> Result<Report> {
    let p = c
        .fcpa
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs `fcpa` parameters".into()))?;
    let r = check_fcpa(&c.shift, p.symbol, p.m_max, p.bound)?;
    let mut lines: Vec<String> = r
        .per_m
        .iter()
        .map(|(m, s)| format!("m = {m:<3} P ∩ F_m = {}", describe(s)))
        .collect();
    lines.push(format!("all finite: {} ({:?})", r.all_finite, r.certificate));
    Ok(Report {
        lines,
        json: to_json(&r),
    })
}

pub fn describe(s: &blur_core::symbols::SymbolSet) -> String {
    match s.as_finite() {
        Some(xs) => format!("{xs:?}"),
        None => format!("infinite, starting {:?}", s.first_n(5)),
    }
}

pub fn connect_cmd(c: &RunConfig, o: Overrides) -> Result<Report> {
    let p = c
        .connect
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this command needs `connect` parameters".into()))?;
    let l = blur_core::lambda::require_lambda(&c.shift)?;
    let used = p
        .u
        .symbols()
        .iter()
        .chain(p.w.symbols())
        .filter_map(|&a| l.class_of(a))
        .max()
        .unwrap_or(2)
        .max(2);
    let k = o.truncation.or(c.truncation).unwrap_or(used);
    let r = connect(&c.shift, &p.u, &p.w, k)?;
    Ok(Report {
        lines: vec![
            format!("u = {}", p.u),
            format!("v = {}", r.v),
            format!("w = {}", p.w),
            format!("|v| = {} <= N({k}) = {}; verified {}", r.v.len(), r.bound, r.verified),
        ],
        json: json!({ "u": p.u, "w": p.w, "max_class": k, "result": to_json(&r) }),
    })
}

fn cylinders_around(m: &AtomicMeasureHat, depth: usize) -> Vec<GeneralizedCylinder> {
    let mut out = Vec::new();
    for p in m.atoms().keys() {
        match p {
            PointHat::Blur(b) => {
                out.push(GeneralizedCylinder::blur(b.stem.clone(), b.r, []));
                if !b.stem.is_empty() {
                    out.push(GeneralizedCylinder::plain(b.stem.clone()));
                }
            }
            PointHat::Seq(x) => out.push(GeneralizedCylinder::plain(x.prefix(depth))),
        }
    }
    out.sort_by_key(|c| c.to_string());
    out.dedup();
    out
}

pub fn limit(c: &RunConfig, o: Overrides) -> Result<Report> {
    let bs = c.blur_shift()?;
    let n = c.samples.unwrap_or(12);
    if let Some(f) = &c.family {
        let lim = bs.limit_of_family(f)?;
        let mut lines: Vec<String> = f
            .sample(&bs, n.min(5))?
            .into_iter()
            .map(|(k, x)| format!("k = {k:<6} {x}"))
            .collect();
        lines.push(format!("limit: {lim}"));
        return Ok(Report {
            lines,
            json: json!({ "family": f.to_string(), "limit": to_json(&lim), "limit_display": lim.to_string() }),
        });
    }
    let fam = c
        .measure_family
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("`limit` needs a `family` or a `measure_family`".into()))?;
    let lim = fam.limit_measure(&bs)?;
    let push = lim.pushforward();
    let invariant = lim.is_invariant();
    let cyl = cylinders_around(&lim, depth(c, o));
    let conv = fam.check_convergence(&bs, &cyl, n)?;
    let masses = lim.level_masses(depth(c, o));
    let mut lines = vec![
        format!("limit:       {lim}"),
        format!("invariant:   {invariant}"),
        format!("pushforward: {push}"),
    ];
    for cc in &conv {
        let from = cc.settled_from.map_or("never".to_string(), |k| format!("k >= {k}"));
        lines.push(format!("  {:<28} -> {:<6} from {from}", cc.cylinder.to_string(), cc.limit_value));
    }
    Ok(Report {
        lines,
        json: json!({
            "limit": to_json(&lim),
            "invariant": invariant,
            "pushforward": to_json(&push),
            "level_masses": to_json(&masses),
            "convergence": to_json(&conv),
        }),
    })
}

pub fn decompose(c: &RunConfig, o: Overrides) -> Result<Report> {
    let bs = c.blur_shift()?;
    let mu = c.measure()?;
    let d = mu.decompose(&bs)?;
    let masses = mu.level_masses(depth(c, o));
    let alphas: Vec<String> = d.alphas.iter().map(|a| a.to_string()).collect();
    let lines = vec![
        format!("t     = {}", d.t),
        format!("base  = {}", d.base.as_ref().map_or("none".to_string(), |b| b.to_string())),
        format!("alpha = ({})", alphas.join(", ")),
    ];
    Ok(Report {
        lines,
        json: json!({ "decomposition": to_json(&d), "level_masses": to_json(&masses), "measure": to_json(mu) }),
    })
}
