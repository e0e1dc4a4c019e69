//! Scripted scenarios; each asserts its expected values and reports them.

use std::collections::BTreeSet;
use std::fmt::Display;

use blur_core::blur::{BlurPoint, BlurShift, GeneralizedCylinder, PointFamily, PointHat, Resolution, SequencePoint, Slot};
use blur_core::ergopt::{
    beta_certified, finite_support_alphabet, integral, maximizing_measure, CycleReading, PeriodicMeasure,
};
use blur_core::lambda::{
    class_decomposition, connect, glue_periodic, non_local_compactness_witness, standard_resolution,
    transitivity_witness,
};
use blur_core::measures::{
    beta_hat, classify_maximizers, max_integral, simplex_family, AtomicMeasureHat, Case, MeasureFamily,
};
use blur_core::potential::{coercive, progression, DenseValueExample, Potential, TailRule, TailShape, Weight};
use blur_core::shift::{check_fcpa, LambdaShift, MarkovRows, MarkovShift, Shift, ShiftSpec};
use blur_core::symbols::Word;
use blur_core::value::{int, ratio, ExtendedValue};
use blur_core::{Error, Result};
use serde_json::{json, Value};

use crate::commands::{describe, to_json, Report};

pub const DEMOS: &[&str] = &[
    "discontinuity",
    "non-closedness",
    "coercive",
    "classification",
    "converse",
    "no-continuous-extension",
    "lambda-fcpa",
    "lambda-existence",
    "lambda-witnesses",
];

#[derive(Default)]
struct Checks {
    lines: Vec<String>,
    items: Vec<Value>,
    data: serde_json::Map<String, Value>,
}

impl Checks {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn check(&mut self, name: &str, expected: impl Display, actual: impl Display) {
        let (e, a) = (expected.to_string(), actual.to_string());
        let pass = e == a;
        self.lines.push(format!("[{}] {name}: {a}", if pass { "ok" } else { "FAILED" }));
        if !pass {
            self.lines.push(format!("       expected {e}"));
        }
        self.items.push(json!({ "name": name, "expected": e, "actual": a, "pass": pass }));
    }

    fn put(&mut self, key: &str, v: Value) {
        self.data.insert(key.into(), v);
    }

    fn finish(self, demo: &str) -> Report {
        let passed = self.items.iter().all(|c| c["pass"] == json!(true));
        let mut lines = vec![format!("demo {demo}")];
        lines.extend(self.lines);
        lines.push(format!("{} checks, {}", self.items.len(), if passed { "all passed" } else { "FAILURES" }));
        Report {
            lines,
            json: json!({ "demo": demo, "passed": passed, "checks": self.items, "data": self.data }),
        }
    }
}

pub fn run(name: &str) -> Result<Report> {
    match name {
        "discontinuity" => discontinuity(),
        "non-closedness" => non_closedness(),
        "coercive" => coercive_demo(),
        "classification" => classification(),
        "converse" => converse(),
        "no-continuous-extension" => no_continuous_extension(),
        "lambda-fcpa" => lambda_fcpa(),
        "lambda-existence" => lambda_existence(),
        "lambda-witnesses" => lambda_witnesses(),
        _ => Err(Error::UnknownDemo(name.into())),
    }
}

fn evens_odds() -> Resolution {
    Resolution {
        sets: vec![progression(0, 2), progression(1, 2)],
    }
}

fn full_blur() -> Result<BlurShift> {
    BlurShift::new(Shift::full(), evens_odds())
}

fn star() -> Result<Shift> {
    Ok(Shift::Markov(MarkovShift::new(MarkovRows::Star { hub: 0 })?))
}

fn seq(period: &[u64]) -> Result<SequencePoint> {
    SequencePoint::periodic(period.to_vec())
}

fn discontinuity() -> Result<Report> {
    let bs = full_blur()?;
    let mut c = Checks::default();
    let w = bs.discontinuity_witness(&BlurPoint::fixed(1))?;
    c.line(format!("{:<26}{:<26}{}", "sequence", "k = 0, 2, 4, 6", "limit"));
    let row = |f: &PointFamily| -> Result<String> {
        let pts: Vec<String> = f.sample(&bs, 4)?.into_iter().map(|(_, x)| x.to_string()).collect();
        Ok(pts.join("  "))
    };
    c.line(format!("{:<26}{:<26}{}", w.family.to_string(), row(&w.family)?, w.limit_of_family));
    c.line(format!(
        "{:<26}{:<26}{}",
        format!("σ {}", w.family),
        row(&w.family_after_shift)?,
        w.limit_after_shift
    ));
    c.line(format!("σ̂ of the limit: {}", w.shift_of_limit));
    c.check("family", "(k) (0)^∞", &w.family);
    c.check("limit of the family", PointHat::Blur(BlurPoint::fixed(1)), &w.limit_of_family);
    c.check("limit of the shifted family", PointHat::Seq(seq(&[0])?), &w.limit_after_shift);
    c.check("shift of the limit", PointHat::Blur(BlurPoint::fixed(1)), &w.shift_of_limit);
    c.check("σ̂ discontinuous at the level-0 point", true, w.limit_after_shift != w.shift_of_limit);
    let level1 = bs.discontinuity_witness(&BlurPoint::new(vec![0], 1));
    c.check(
        "no witness at a level-1 point",
        "no-witness-found",
        level1.err().map_or("found", |e| e.code()),
    );
    c.put("witness", to_json(&w));
    Ok(c.finish("discontinuity"))
}

fn k0_family() -> PointFamily {
    PointFamily {
        pre: vec![],
        period: vec![Slot::Var(0), Slot::Fixed(0)],
        r: 1,
        domain: None,
    }
}

fn non_closedness() -> Result<Report> {
    let bs = full_blur()?;
    let mut c = Checks::default();
    let fam = MeasureFamily::periodic(&k0_family())?;
    for k in [2, 4, 6] {
        let m = fam.instantiate(&bs, k)?;
        c.line(format!("k = {k}: {m} (invariant: {})", m.is_invariant()));
    }
    let lim = fam.limit_measure(&bs)?;
    let expected = AtomicMeasureHat::new([
        (PointHat::Blur(BlurPoint::fixed(1)), ratio(1, 2)),
        (PointHat::Blur(BlurPoint::new(vec![0], 1)), ratio(1, 2)),
    ])?;
    c.check("every member is invariant", true, [2, 4, 100].iter().all(|&k| fam.instantiate(&bs, k).is_ok_and(|m| m.is_invariant())));
    c.check("limit", &expected, &lim);
    c.check("limit is invariant", false, lim.is_invariant());
    c.check("pushforward of the limit", AtomicMeasureHat::dirac(BlurPoint::fixed(1)), lim.pushforward());
    let masses = lim.level_masses(2);
    c.check("mass on level 0", "1/2", &masses.levels[0]);
    c.check("mass on level 1", "1/2", &masses.levels[1]);
    let cyl = [
        GeneralizedCylinder::plain(vec![0]),
        GeneralizedCylinder::blur(vec![], 1, []),
        GeneralizedCylinder::blur(vec![0], 1, []),
    ];
    let conv = fam.check_convergence(&bs, &cyl, 12)?;
    for cc in &conv {
        c.check(&format!("measure of {} settles", cc.cylinder), true, cc.settled_from.is_some());
    }
    c.put("limit", to_json(&lim));
    c.put("convergence", to_json(&conv));
    Ok(c.finish("non-closedness"))
}

fn coercive_demo() -> Result<Report> {
    let bs = full_blur()?;
    let a = coercive(int(1));
    let mut c = Checks::default();
    let cert = beta_certified(&bs.shift, &a, 8, CycleReading::AllCycles)?;
    let mu = maximizing_measure(&bs.shift, &a, &cert)?;
    let bh = beta_hat(&bs, &a, &cert.lower)?;
    c.line("A(x) = 1 − x_0 on the full shift over ℕ, blurred sets: evens, odds");
    c.check("beta", "1", &cert.lower);
    c.check("beta exact", true, cert.exact);
    c.check("maximizing orbit", "(0)^∞", &mu.orbit);
    for p in bs.level0() {
        c.check(&format!("Â at {p}"), "-inf", a.tail_limsup(&bs, &p)?);
    }
    c.check("beta hat equals beta", "1", &bh);
    let cl = classify_maximizers(&bs, &a, &cert.lower, vec![mu.clone()])?;
    c.check("case", "I", format!("{:?}", cl.case));
    let d = AtomicMeasureHat::from_periodic(&mu).decompose(&bs)?;
    c.check("maximizing measure has t = 1", "1", &d.t);
    c.put("classification", to_json(&cl));
    Ok(c.finish("coercive"))
}

struct Instance {
    label: &'static str,
    bs: BlurShift,
    a: Potential,
    case: Case,
    beta: &'static str,
    beta_hat: &'static str,
}

fn instances() -> Result<Vec<Instance>> {
    let y = seq(&[0, 1])?;
    Ok(vec![
        Instance {
            label: "coercive A = 1 − x_0 on the full shift",
            bs: full_blur()?,
            a: coercive(int(1)),
            case: Case::I,
            beta: "1",
            beta_hat: "1",
        },
        Instance {
            label: "distance to the orbit of (0,1)^∞ on the full shift",
            bs: full_blur()?,
            a: Potential::distance(y, Weight::Shifted),
            case: Case::II,
            beta: "0",
            beta_hat: "0",
        },
        Instance {
            label: "star shift, A(0) = −3, A = 5 elsewhere",
            bs: BlurShift::new(star()?, evens_odds())?,
            a: Potential::per_symbol([(0, int(-3))], TailRule::constant(int(5))),
            case: Case::III,
            beta: "1",
            beta_hat: "5",
        },
    ])
}

fn classification() -> Result<Report> {
    let mut c = Checks::default();
    let mut out = Vec::new();
    for inst in instances()? {
        let cert = beta_certified(&inst.bs.shift, &inst.a, 8, CycleReading::AllCycles)?;
        let mu = maximizing_measure(&inst.bs.shift, &inst.a, &cert)?;
        let cl = classify_maximizers(&inst.bs, &inst.a, &cert.lower, vec![mu.clone()])?;
        let bh = beta_hat(&inst.bs, &inst.a, &cert.lower)?;
        let fam = simplex_family(&inst.bs, &AtomicMeasureHat::from_periodic(&mu))?;
        let best = max_integral(&inst.bs, &inst.a, &fam)?;
        c.line(format!("{}: {}", inst.label, cl.description));
        c.check(&format!("{}: beta", inst.label), inst.beta, &cert.lower);
        c.check(&format!("{}: beta exact", inst.label), true, cert.exact);
        c.check(&format!("{}: case", inst.label), format!("{:?}", inst.case), format!("{:?}", cl.case));
        c.check(&format!("{}: beta hat", inst.label), inst.beta_hat, &bh);
        c.check(&format!("{}: max of ∫Â over the simplex family", inst.label), &bh, &best);
        out.push(to_json(&cl));
    }
    c.put("classifications", Value::Array(out));
    Ok(c.finish("classification"))
}

fn converse() -> Result<Report> {
    let bs = full_blur()?;
    let y = seq(&[0, 1])?;
    let a = Potential::distance(y.clone(), Weight::Shifted);
    let mut c = Checks::default();
    c.line(format!("A(x) = −d(orb y, x)/(x_0 + 1), y = {y}"));
    let cert = beta_certified(&bs.shift, &a, 8, CycleReading::AllCycles)?;
    let mu = maximizing_measure(&bs.shift, &a, &cert)?;
    c.check("beta", "0", &cert.lower);
    c.check("beta exact", true, cert.exact);
    c.check("maximizing measure", &y, &mu.orbit);
    c.check("integral of the maximizing measure", "0", integral(&bs.shift, &a, &mu)?);
    c.check("sup A", "0", a.sup_on_cylinder(&bs.shift, &Word::empty())?);
    c.check("tail limsup", "0", a.tail_value(&bs.shift)?);
    let tail = a.tail_condition(&bs.shift, &cert.lower)?;
    c.check("strict tail condition", false, tail.holds);
    for p in bs.level0() {
        c.check(&format!("Â at {p}"), "0", a.tail_limsup(&bs, &p)?);
    }
    let cl = classify_maximizers(&bs, &a, &cert.lower, vec![mu])?;
    c.check("case", "II", format!("{:?}", cl.case));
    c.line(cl.description.clone());
    c.check(
        "finite-support proposition does not apply",
        "hypothesis-violated",
        finite_support_alphabet(&bs.shift, &a, &cert.lower).err().map_or("applies", |e| e.code()),
    );
    c.put("classification", to_json(&cl));
    Ok(c.finish("converse"))
}

fn no_continuous_extension() -> Result<Report> {
    let mut c = Checks::default();
    let ex = DenseValueExample::new(progression(0, 2))?;
    let exclude: BTreeSet<u64> = (0..10).collect();
    let osc = ex.oscillation(&exclude, 8);
    c.line("values on [a] for a ∈ B_1: rationals of (0, 1] on infinitely many disjoint pieces");
    for (a, v) in &osc.small_values {
        c.line(format!("  A on [{a}] = {v}"));
    }
    c.check("sup on every neighbourhood Z[B_1; S]", "1", &osc.max);
    c.check("values within 1/n of 0 found for n ≤ 8", 8, osc.small_values.len());
    c.check(
        "values below 1/8 found",
        true,
        osc.min_seen <= ratio(1, 8),
    );
    c.put("oscillation", to_json(&osc));
    Ok(c.finish("no-continuous-extension"))
}

fn lambda_fcpa() -> Result<Report> {
    let l = LambdaShift::standard();
    let mut c = Checks::default();
    let r = check_fcpa(&l, 1, 10, 10_000)?;
    for (m, s) in &r.per_m {
        c.line(format!("m = {m:<3} P(1) ∩ F_m(1) = {}", describe(s)));
        let allowed: BTreeSet<u64> = (2..=(*m as u64 + 1)).map(|k| l.layout().last(k)).collect();
        let inside = s.as_finite().is_some_and(|xs| xs.is_subset(&allowed));
        c.check(&format!("m = {m}: finite, inside {{max Z_k : |Z_k| ≤ {}}}", m + 1), true, inside);
    }
    c.check("all finite", true, r.all_finite);
    c.put("fcpa", to_json(&r));
    Ok(c.finish("lambda-fcpa"))
}

fn class_decaying() -> Potential {
    Potential::per_symbol(
        [(1, int(0))],
        TailRule::on_classes(TailShape::Reciprocal {
            c: int(0),
            s: int(2),
            shift: 0,
        }),
    )
}

fn lambda_existence() -> Result<Report> {
    let l = Shift::Lambda(LambdaShift::standard());
    let a = class_decaying();
    let mut c = Checks::default();
    c.line("Λ with |Z_k| = k, A = 2/k on Z_k (k ≥ 2), A(1) = 0, classes ≤ 4 scanned");
    let cert = beta_certified(&l, &a, 4, CycleReading::AllCycles)?;
    c.check("beta exact", true, cert.exact);
    c.check("beta", "1", &cert.lower);
    c.check("upper end of the bracket", &cert.lower, &cert.upper);
    let mu = maximizing_measure(&l, &a, &cert)?;
    c.check("integral of the maximizing measure", "1", integral(&l, &a, &mu)?);
    let tail = a.tail_condition(&l, &cert.lower)?;
    c.check("strict tail condition", true, tail.holds);
    let support = finite_support_alphabet(&l, &a, &cert.lower)?;
    c.check("finite support alphabet", "{2, 3}", format!("{support:?}"));
    let crit_classes: BTreeSet<Option<u64>> = mu.orbit.period().iter().map(|&x| l.lambda().unwrap().class_of(x)).collect();
    c.check("critical orbit lies in class", "{Some(2)}", format!("{crit_classes:?}"));
    let strict = beta_certified(&l, &a, 4, CycleReading::C1Strict)?;
    c.check("beta under the strict reading", "1", &strict.lower);

    c.line("same tail with A(1) = 2: excursions through 1 now pay off");
    let a1 = Potential::per_symbol([(1, int(2))], a.tail().expect("per-symbol").clone());
    let cert = beta_certified(&l, &a1, 4, CycleReading::AllCycles)?;
    c.check("beta over all cycles", "4/3", &cert.lower);
    c.check("critical orbit", "(2,3,1)^∞", &cert.orbit);
    c.check("argument", "ClassDecomposition", format!("{:?}", cert.argument));
    c.check("tail bound below beta", true, cert.tail_bound < ExtendedValue::Finite(cert.lower.clone()));
    let strict = beta_certified(&l, &a1, 4, CycleReading::C1Strict)?;
    c.check("beta without cycles through 1", "1", &strict.lower);
    c.check("strict reading exact", true, strict.exact);
    c.put("certificate", to_json(&cert));
    c.put("maximizing_measure", to_json(&mu));
    Ok(c.finish("lambda-existence"))
}

fn lambda_witnesses() -> Result<Report> {
    let base = LambdaShift::standard();
    let l = base.with_max_class(3);
    let mut c = Checks::default();

    let pairs: [(&[u64], &[u64]); 3] = [(&[5], &[3]), (&[2], &[2]), (&[1], &[1])];
    for (u, w) in pairs {
        let (u, w) = (Word(u.to_vec()), Word(w.to_vec()));
        let r = connect(&l, &u, &w, 3)?;
        c.line(format!("connect {u} → {w}: v = {} (N(3) = {})", r.v, r.bound));
        c.check(&format!("{u}·v·{w} allowed, |v| ≤ N(3)"), true, r.verified);
    }
    let r = connect(&l, &Word(vec![1]), &Word(vec![1]), 3)?;
    c.check("padding block between two 1s", "(2,3)", &r.v);

    let t = transitivity_witness(&l, &Word(vec![4, 5, 6]), &Word(vec![2, 3, 3]), 3)?;
    c.line(format!("transitivity: z = {}, n = {}", t.point, t.n));
    c.check("z starts in [4,5,6]", "(4,5,6)", t.point.prefix(3));
    c.check("σⁿ z starts in [2,3,3]", "(2,3,3)", Word(t.point.prefix(t.n + 3).symbols()[t.n..].to_vec()));

    let bs = BlurShift::new(Shift::Lambda(base.clone()), standard_resolution(&base))?;
    let nl = non_local_compactness_witness(&bs, &Word(vec![2]))?;
    c.line(format!("non-local compactness: y^k = {} → {}", nl.family, nl.limit));
    c.check("limit lies on the boundary", true, matches!(nl.limit, PointHat::Blur(_)));
    if let PointHat::Blur(b) = &nl.limit {
        c.check("limit stem ends at 1", 1, b.stem.last().unwrap_or(0));
        c.check("limit blurred set is the class minima", 1, b.r);
    }

    let a = PeriodicMeasure::new(&l, vec![4, 5, 6])?;
    let b = PeriodicMeasure::new(&l, vec![5])?;
    let two = PeriodicMeasure::new(&l, vec![2])?;
    let mix = AtomicMeasureHat::mix(&[
        (ratio(1, 2), AtomicMeasureHat::from_periodic(&a)),
        (ratio(1, 2), AtomicMeasureHat::from_periodic(&two)),
    ])?;
    let d = class_decomposition(&base, &mix)?;
    c.check("class masses of ½ μ(4,5,6) + ½ μ(2)", "{2: \"1/2\", 3: \"1/2\"}", format!("{:?}", d.per_class));
    let through = AtomicMeasureHat::from_periodic(&PeriodicMeasure::new(&l, vec![1, 2, 3])?);
    let d1 = class_decomposition(&base, &through)?;
    c.check("orbit through 1 is flagged", 3, d1.flagged.len());

    let g = glue_periodic(&l, &[a.clone(), b], &[ratio(1, 2), ratio(1, 2)], 50)?;
    c.line(format!(
        "glued orbit: length {}, connectors {}, max depth-1 error {}",
        g.length, g.connector_symbols, g.max_error
    ));
    c.check("depth-1 error within connectors/length", true, g.max_error <= g.error_bound);
    c.check("depth-1 error within 10/M", true, g.max_error <= ratio(10, 50));
    c.check(
        "cross-class gluing",
        "orbits-not-coclass",
        glue_periodic(&l, &[a, two], &[ratio(1, 2), ratio(1, 2)], 10).err().map_or("glued", |e| e.code()),
    );
    c.put("glued", to_json(&g));
    c.put("transitivity", to_json(&t));
    c.put("non_local_compactness", to_json(&nl));
    Ok(c.finish("lambda-witnesses"))
}
