use blur_core::blur::{BlurPoint, BlurShift, GeneralizedCylinder, PointFamily, PointHat, Resolution, SequencePoint, Slot};
use blur_core::ergopt::{beta_certified, maximizing_measure, CycleReading};
use blur_core::lambda::standard_resolution;
use blur_core::measures::{
    beta_hat, classify_maximizers, max_integral, simplex_family, AtomicMeasureHat, Case, FamilyComponent, MeasureFamily,
};
use blur_core::potential::{coercive, progression, Potential, TailRule, TailShape, Weight};
use blur_core::classes::Position;
use blur_core::shift::{LambdaShift, MarkovRows, MarkovShift, Shift};
use blur_core::symbols::SymbolSet;
use blur_core::value::{int, ratio, ExtendedValue, Rational};
use num::{BigInt, One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn evens_odds() -> Resolution {
    Resolution {
        sets: vec![progression(0, 2), progression(1, 2)],
    }
}

fn full_blur() -> BlurShift {
    BlurShift::new(Shift::full(), evens_odds()).unwrap()
}

fn star_blur() -> BlurShift {
    let s = Shift::Markov(MarkovShift::new(MarkovRows::Star { hub: 0 }).unwrap());
    BlurShift::new(s, evens_odds()).unwrap()
}

fn q(n: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

// ------------------------------------------------------------ generators

#[derive(Debug, Clone)]
enum RawPoint {
    Seq(Vec<u64>, Vec<u64>),
    Blur(Vec<u64>, usize),
}

fn raw_point() -> impl Strategy<Value = RawPoint> {
    prop_oneof![
        (prop::collection::vec(0u64..6, 0..3), prop::collection::vec(0u64..6, 1..3))
            .prop_map(|(p, q)| RawPoint::Seq(p, q)),
        (prop::collection::vec(0u64..6, 0..4), 1usize..=2).prop_map(|(w, r)| RawPoint::Blur(w, r)),
    ]
}

fn point(r: &RawPoint) -> PointHat {
    match r {
        RawPoint::Seq(p, q) => PointHat::Seq(SequencePoint::unchecked(p.clone(), q.clone()).unwrap()),
        RawPoint::Blur(w, r) => PointHat::Blur(BlurPoint::new(w.clone(), *r)),
    }
}

fn measure_from(raw: &[(RawPoint, u64)]) -> AtomicMeasureHat {
    let total: u64 = raw.iter().map(|(_, w)| w).sum();
    AtomicMeasureHat::new(raw.iter().map(|(p, w)| (point(p), q(*w, total)))).unwrap()
}

fn cylinder() -> impl Strategy<Value = GeneralizedCylinder> {
    prop_oneof![
        prop::collection::vec(0u64..6, 0..4).prop_map(GeneralizedCylinder::plain),
        (
            prop::collection::vec(0u64..6, 0..4),
            1usize..=2,
            prop::collection::btree_set(0u64..8, 0..3)
        )
            .prop_map(|(w, r, s)| GeneralizedCylinder::blur(w, r, s)),
    ]
}

/// Mixtures of periodic orbits and level-0 Diracs, all σ̂-invariant.
fn invariant_measure(rng: &mut ChaCha8Rng) -> AtomicMeasureHat {
    let mut parts = Vec::new();
    let n = rng.gen_range(1..=4);
    let den: u64 = 12;
    let mut left = den;
    for i in 0..n {
        let w = if i + 1 == n { left } else { rng.gen_range(1..=left - (n - i - 1) as u64) };
        left -= w;
        let m = if rng.gen_bool(0.35) {
            AtomicMeasureHat::dirac(BlurPoint::fixed(rng.gen_range(1..=2)))
        } else {
            let len = rng.gen_range(1..=4);
            let period: Vec<u64> = (0..len).map(|_| rng.gen_range(0..5)).collect();
            AtomicMeasureHat::periodic(&SequencePoint::periodic(period).unwrap())
        };
        parts.push((q(w, den), m));
    }
    AtomicMeasureHat::mix(&parts).unwrap()
}

// ------------------------------------------------------------ properties

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn preimage_measure_equals_pushforward_measure(
        raw in prop::collection::vec((raw_point(), 1u64..5), 1..5),
        c in cylinder(),
    ) {
        let bs = full_blur();
        let mu = measure_from(&raw);
        let pre = bs.preimage_cylinder(&c).unwrap();
        // pointwise: p ∈ σ̂⁻¹C iff σ̂p ∈ C
        for p in mu.atoms().keys() {
            prop_assert_eq!(bs.preimage_contains(&pre, p), bs.cylinder_contains(&c, &p.shift_hat()));
        }
        prop_assert_eq!(mu.measure_of_preimage(&bs, &pre), mu.pushforward().measure_of_cylinder(&bs, &c));
    }

    #[test]
    fn cylinder_splits_into_children(w in prop::collection::vec(0u64..6, 0..3), raw in prop::collection::vec((raw_point(), 1u64..5), 1..6)) {
        // Z[w] = Z[wB_1; ∅] ⊔ Z[wB_2; ∅] on the full shift with evens and odds
        let bs = full_blur();
        let mu = measure_from(&raw);
        let whole = mu.measure_of_cylinder(&bs, &GeneralizedCylinder::plain(w.clone()));
        let parts: Rational = (1..=2)
            .map(|r| mu.measure_of_cylinder(&bs, &GeneralizedCylinder::blur(w.clone(), r, [])))
            .sum();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn excluding_symbols_moves_mass_to_plain_children(w in prop::collection::vec(0u64..6, 0..3), raw in prop::collection::vec((raw_point(), 1u64..5), 1..6)) {
        let bs = full_blur();
        let mu = measure_from(&raw);
        let s = [0u64, 2, 4];
        let blurred = mu.measure_of_cylinder(&bs, &GeneralizedCylinder::blur(w.clone(), 1, []));
        let cut = mu.measure_of_cylinder(&bs, &GeneralizedCylinder::blur(w.clone(), 1, s));
        let children: Rational = s
            .iter()
            .map(|&a| {
                let mut v = w.clone();
                v.push(a);
                mu.measure_of_cylinder(&bs, &GeneralizedCylinder::plain(v))
            })
            .sum();
        prop_assert_eq!(blurred, cut + children);
    }
}

#[test]
fn invariant_measures_decompose_and_live_on_level_zero() {
    let bs = full_blur();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let mu = invariant_measure(&mut rng);
        assert!(mu.is_invariant(), "{mu}");
        let masses = mu.level_masses(4);
        assert!(masses.levels[1..].iter().all(Zero::is_zero), "{mu}");
        assert!(masses.deeper.is_zero());
        let d = mu.decompose(&bs).unwrap();
        assert_eq!(d.t, masses.sigma);
        assert_eq!(Rational::one() - &d.t, masses.levels[0]);
        assert_eq!(d.compose().unwrap(), mu);
    }
}

#[test]
fn non_invariant_measure_does_not_decompose() {
    let bs = full_blur();
    let mu = AtomicMeasureHat::dirac(BlurPoint::new(vec![0], 1));
    assert!(mu.decompose(&bs).is_err());
}

#[test]
fn non_closedness_limit() {
    let bs = full_blur();
    let fam = MeasureFamily::periodic(&PointFamily {
        pre: vec![],
        period: vec![Slot::Var(0), Slot::Fixed(0)],
        r: 1,
        domain: None,
    })
    .unwrap();
    for k in [2, 4, 10, 1000] {
        assert!(fam.instantiate(&bs, k).unwrap().is_invariant());
    }
    let lim = fam.limit_measure(&bs).unwrap();
    let expected = AtomicMeasureHat::new([
        (PointHat::Blur(BlurPoint::fixed(1)), ratio(1, 2)),
        (PointHat::Blur(BlurPoint::new(vec![0], 1)), ratio(1, 2)),
    ])
    .unwrap();
    assert_eq!(lim, expected);
    assert!(!lim.is_invariant());
    assert_eq!(lim.pushforward(), AtomicMeasureHat::dirac(BlurPoint::fixed(1)));
}

fn random_pattern(rng: &mut ChaCha8Rng) -> Vec<Slot> {
    let len = rng.gen_range(1..=6);
    let mut p: Vec<Slot> = (0..len)
        .map(|_| if rng.gen_bool(0.3) { Slot::Var(0) } else { Slot::Fixed(rng.gen_range(0..3)) })
        .collect();
    let i = rng.gen_range(0..len);
    p[i] = Slot::Var(0);
    p
}

#[test]
fn level_masses_of_limits_decrease() {
    let bs = full_blur();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let fam = MeasureFamily::periodic(&PointFamily {
            pre: vec![],
            period: random_pattern(&mut rng),
            r: rng.gen_range(1..=2),
            domain: None,
        })
        .unwrap();
        let lim = fam.limit_measure(&bs).unwrap();
        let m = lim.level_masses(7);
        assert!(m.sigma.is_zero());
        for k in 0..6 {
            assert!(m.levels[k + 1] <= m.levels[k], "{lim}: {:?}", m.levels);
        }
    }
}

#[test]
fn lambda_family_limits_carry_no_level_one_mass() {
    let l = LambdaShift::standard();
    let bs = BlurShift::new(Shift::Lambda(l.clone()), standard_resolution(&l)).unwrap();
    let interior = l.class_set(3, &[Position::Interior]);
    let mins = l.class_set(3, &[Position::Min]);
    let fam = |period: Vec<Slot>, r: usize, domain: &SymbolSet| PointFamily {
        pre: vec![],
        period,
        r,
        domain: Some(domain.clone()),
    };
    let mut families = Vec::new();
    for len in 1..=3 {
        families.push(MeasureFamily::periodic(&fam(vec![Slot::Var(0); len], 2, &interior)).unwrap());
        families.push(MeasureFamily::periodic(&fam(vec![Slot::Var(0); len], 1, &mins)).unwrap());
    }
    for (w, v) in [(ratio(1, 2), ratio(1, 2)), (ratio(1, 3), ratio(2, 3))] {
        families.push(MeasureFamily {
            components: vec![
                FamilyComponent {
                    weight: w,
                    family: fam(vec![Slot::Var(0)], 2, &interior),
                },
                FamilyComponent {
                    weight: v,
                    family: fam(vec![Slot::Var(0), Slot::Var(0)], 1, &mins),
                },
            ],
        });
    }
    for f in families {
        if f.components.len() == 1 {
            for k in f.components[0].family.domain(&bs).unwrap().first_n(4) {
                assert!(f.instantiate(&bs, k).unwrap().is_invariant());
            }
        }
        let lim = f.limit_measure(&bs).unwrap();
        let m = lim.level_masses(3);
        assert!(m.levels[1].is_zero(), "{lim}");
        assert_eq!(m.levels[0], Rational::one());
    }
}

// ------------------------------------------------------- maximization

struct Instance {
    bs: BlurShift,
    a: Potential,
}

fn maximization_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    // full shift, per-symbol, max value ≥ tail constant: Â|L̂_0 ≤ β
    for _ in 0..8 {
        let c = rng.gen_range(-3..=3);
        let top = c + rng.gen_range(0..=2);
        let values = (0..4u64).map(|a| (a, int(if a == 1 { top } else { rng.gen_range(-5..=top) })));
        out.push(Instance {
            bs: full_blur(),
            a: Potential::per_symbol(values, TailRule::constant(int(c))),
        });
    }
    // reciprocal tails decreasing to c
    for s in 1..=3 {
        out.push(Instance {
            bs: full_blur(),
            a: Potential::per_symbol(
                [],
                TailRule::on_symbols(TailShape::Reciprocal {
                    c: int(-1),
                    s: int(s),
                    shift: 1,
                }),
            ),
        });
    }
    out.push(Instance {
        bs: full_blur(),
        a: coercive(int(2)),
    });
    out.push(Instance {
        bs: full_blur(),
        a: Potential::distance(SequencePoint::periodic(vec![0, 1]).unwrap(), Weight::Shifted),
    });
    out.push(Instance {
        bs: full_blur(),
        a: Potential::distance(SequencePoint::periodic(vec![2]).unwrap(), Weight::Shifted),
    });
    // star shift: the hub must be revisited, so β = (A(hub) + spoke value)/2
    for _ in 0..8 {
        let h = rng.gen_range(-6..=4);
        let c = rng.gen_range(-2..=5);
        let spoke = rng.gen_range(-4..=c);
        out.push(Instance {
            bs: star_blur(),
            a: Potential::per_symbol([(0, int(h)), (3, int(spoke))], TailRule::constant(int(c))),
        });
    }
    out
}

#[test]
fn beta_hat_is_the_max_over_the_simplex() {
    let mut orderings = [0usize; 3];
    let instances = maximization_instances();
    assert!(instances.len() >= 20);
    for inst in &instances {
        let cert = beta_certified(&inst.bs.shift, &inst.a, 8, CycleReading::AllCycles).unwrap();
        assert!(cert.exact, "{:?}", inst.a);
        let mu = maximizing_measure(&inst.bs.shift, &inst.a, &cert).unwrap();
        let base = AtomicMeasureHat::from_periodic(&mu);
        assert_eq!(base.integral_hat(&inst.bs, &inst.a).unwrap(), ExtendedValue::Finite(cert.lower.clone()));
        let family = simplex_family(&inst.bs, &base).unwrap();
        for m in &family {
            assert!(m.is_invariant());
        }
        let bh = beta_hat(&inst.bs, &inst.a, &cert.lower).unwrap();
        assert_eq!(max_integral(&inst.bs, &inst.a, &family).unwrap(), bh, "{:?}", inst.a);
        let l0 = inst.a.max_over_level0(&inst.bs).unwrap();
        let b = ExtendedValue::Finite(cert.lower.clone());
        orderings[if l0 < b { 0 } else if l0 == b { 1 } else { 2 }] += 1;
    }
    assert!(orderings.iter().all(|&n| n > 0), "{orderings:?}");
}

#[test]
fn star_beta_by_hand() {
    // hub 0 with A = -3, spokes worth 5: every cycle alternates, so β = 1
    let bs = star_blur();
    let a = Potential::per_symbol([(0, int(-3))], TailRule::constant(int(5)));
    let cert = beta_certified(&bs.shift, &a, 8, CycleReading::AllCycles).unwrap();
    assert_eq!(cert.lower, int(1));
    assert!(cert.exact);
}

#[test]
fn classification_one_instance_per_case() {
    let cases = [
        (full_blur(), coercive(int(1)), Case::I, int(1)),
        (
            full_blur(),
            Potential::distance(SequencePoint::periodic(vec![0, 1]).unwrap(), Weight::Shifted),
            Case::II,
            int(0),
        ),
        (
            star_blur(),
            Potential::per_symbol([(0, int(-3))], TailRule::constant(int(5))),
            Case::III,
            int(1),
        ),
    ];
    for (bs, a, case, beta) in cases {
        let cert = beta_certified(&bs.shift, &a, 8, CycleReading::AllCycles).unwrap();
        assert!(cert.exact);
        assert_eq!(cert.lower, beta);
        let mu = maximizing_measure(&bs.shift, &a, &cert).unwrap();
        let cl = classify_maximizers(&bs, &a, &cert.lower, vec![mu.clone()]).unwrap();
        assert_eq!(cl.case, case);
        match case {
            Case::I => {
                let d = AtomicMeasureHat::from_periodic(&mu).decompose(&bs).unwrap();
                assert_eq!(d.t, Rational::one());
                assert_eq!(cl.beta_hat, ExtendedValue::Finite(beta));
            }
            Case::II => {
                assert_eq!(a.tail_value(&bs.shift).unwrap(), ExtendedValue::zero());
                assert_eq!(cl.level0_max, ExtendedValue::zero());
                assert_eq!(cl.d_hat_max.len(), 2);
            }
            Case::III => {
                assert_eq!(cl.beta_hat, int(5).into());
                // the level-0 Diracs beat every measure on Σ
                let d = AtomicMeasureHat::dirac(BlurPoint::fixed(1));
                assert_eq!(d.integral_hat(&bs, &a).unwrap(), int(5).into());
            }
        }
    }
}

#[test]
fn mixed_measure_integral_is_linear() {
    let bs = full_blur();
    let a = Potential::per_symbol([(0, int(2)), (1, int(-1))], TailRule::constant(int(0)));
    let x = AtomicMeasureHat::periodic(&SequencePoint::periodic(vec![0, 1]).unwrap());
    let m = AtomicMeasureHat::mix(&[
        (ratio(1, 3), x),
        (ratio(2, 3), AtomicMeasureHat::dirac(BlurPoint::fixed(2))),
    ])
    .unwrap();
    assert_eq!(m.integral_hat(&bs, &a).unwrap(), ratio(1, 6).into());
}
