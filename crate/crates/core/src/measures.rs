//! Finite atomic measures on `Σ̂` and the decomposition of blur-invariant measures.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::blur::{BlurPoint, BlurShift, GeneralizedCylinder, PointFamily, PointHat, Preimage, SequencePoint};
use crate::ergopt::PeriodicMeasure;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::symbols::Symbol;
use crate::value::{rational_str, rational_vec, ExtendedValue, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicMeasureHat {
    atoms: BTreeMap<PointHat, Rational>,
}

#[derive(Serialize, Deserialize)]
struct AtomEntry {
    point: PointHat,
    #[serde(with = "rational_str")]
    weight: Rational,
}

impl Serialize for AtomicMeasureHat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.atoms.iter().map(|(p, w)| AtomEntry {
            point: p.clone(),
            weight: w.clone(),
        }))
    }
}

impl<'de> Deserialize<'de> for AtomicMeasureHat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<AtomEntry>::deserialize(d)?;
        AtomicMeasureHat::new(v.into_iter().map(|e| (e.point, e.weight))).map_err(serde::de::Error::custom)
    }
}

impl AtomicMeasureHat {
    /// Merges repeated atoms; weights must be positive and sum to 1.
    pub fn new(atoms: impl IntoIterator<Item = (PointHat, Rational)>) -> Result<Self> {
        let mut m: BTreeMap<PointHat, Rational> = BTreeMap::new();
        for (p, w) in atoms {
            if w.is_negative() {
                return Err(Error::InvalidInput(format!("negative weight {w} at {p}")));
            }
            *m.entry(p).or_insert_with(Rational::zero) += w;
        }
        m.retain(|_, w| !w.is_zero());
        let total: Rational = m.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        Ok(AtomicMeasureHat { atoms: m })
    }

    pub fn dirac(p: impl Into<PointHat>) -> Self {
        AtomicMeasureHat {
            atoms: BTreeMap::from([(p.into(), Rational::one())]),
        }
    }

    /// Uniform mass on the orbit of a periodic point.
    pub fn periodic(x: &SequencePoint) -> Self {
        let orbit = x.orbit();
        let w = Rational::new(1.into(), (orbit.len() as i64).into());
        AtomicMeasureHat {
            atoms: orbit.into_iter().map(|y| (PointHat::Seq(y), w.clone())).collect(),
        }
    }

    pub fn from_periodic(mu: &PeriodicMeasure) -> Self {
        AtomicMeasureHat::periodic(&mu.orbit)
    }

    /// `Σ c_i μ_i`.
    pub fn mix(parts: &[(Rational, AtomicMeasureHat)]) -> Result<Self> {
        AtomicMeasureHat::new(
            parts
                .iter()
                .flat_map(|(c, m)| m.atoms.iter().map(move |(p, w)| (p.clone(), c * w))),
        )
    }

    pub fn atoms(&self) -> &BTreeMap<PointHat, Rational> {
        &self.atoms
    }

    pub fn weight(&self, p: &PointHat) -> Rational {
        self.atoms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn pushforward(&self) -> AtomicMeasureHat {
        let mut m: BTreeMap<PointHat, Rational> = BTreeMap::new();
        for (p, w) in &self.atoms {
            *m.entry(p.shift_hat()).or_insert_with(Rational::zero) += w;
        }
        AtomicMeasureHat { atoms: m }
    }

    pub fn is_invariant(&self) -> bool {
        self.pushforward() == *self
    }

    pub fn measure_of_cylinder(&self, bs: &BlurShift, c: &GeneralizedCylinder) -> Rational {
        self.atoms
            .iter()
            .filter(|(p, _)| bs.cylinder_contains(c, p))
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn measure_of_preimage(&self, bs: &BlurShift, pre: &Preimage) -> Rational {
        self.atoms
            .iter()
            .filter(|(p, _)| bs.preimage_contains(pre, p))
            .map(|(_, w)| w.clone())
            .sum()
    }

    pub fn level_masses(&self, depth: usize) -> LevelMasses {
        let mut sigma = Rational::zero();
        let mut levels = vec![Rational::zero(); depth + 1];
        let mut deeper = Rational::zero();
        for (p, w) in &self.atoms {
            match p.level() {
                None => sigma += w,
                Some(l) if l <= depth => levels[l] += w,
                Some(_) => deeper += w,
            }
        }
        LevelMasses { sigma, levels, deeper }
    }

    /// `∫ Â dμ`; atoms of weight 0 never occur, so `−∞` only comes from a charged point.
    pub fn integral_hat(&self, bs: &BlurShift, a: &Potential) -> Result<ExtendedValue> {
        let mut sum = ExtendedValue::zero();
        for (p, w) in &self.atoms {
            sum = sum + a.extension_value(bs, p)?.scale(w);
        }
        Ok(sum)
    }

    pub fn decompose(&self, bs: &BlurShift) -> Result<DecomposedMeasure> {
        if !self.is_invariant() {
            return Err(Error::NotInvariant);
        }
        let masses = self.level_masses(0);
        if !masses.deeper.is_zero() {
            return Err(Error::Internal("an invariant measure charges a level ≥ 1".into()));
        }
        let t = masses.sigma.clone();
        let base = if t.is_zero() {
            None
        } else {
            Some(AtomicMeasureHat {
                atoms: self
                    .atoms
                    .iter()
                    .filter(|(p, _)| p.level().is_none())
                    .map(|(p, w)| (p.clone(), w / &t))
                    .collect(),
            })
        };
        let rest = Rational::one() - &t;
        let alphas = (1..=bs.size())
            .map(|r| {
                if rest.is_zero() {
                    if r == 1 { Rational::one() } else { Rational::zero() }
                } else {
                    self.weight(&PointHat::Blur(BlurPoint::fixed(r))) / &rest
                }
            })
            .collect();
        Ok(DecomposedMeasure { t, base, alphas })
    }
}

impl fmt::Display for AtomicMeasureHat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.atoms.iter().map(|(p, w)| format!("{w}·δ[{p}]")).collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelMasses {
    #[serde(with = "rational_str")]
    pub sigma: Rational,
    /// Mass of `L̂_0, L̂_1, …` up to the requested depth.
    #[serde(with = "rational_vec")]
    pub levels: Vec<Rational>,
    #[serde(with = "rational_str")]
    pub deeper: Rational,
}

/// `t · base + (1 − t) Σ α_r δ_{(B_r, …)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedMeasure {
    #[serde(with = "rational_str")]
    pub t: Rational,
    pub base: Option<AtomicMeasureHat>,
    #[serde(with = "rational_vec")]
    pub alphas: Vec<Rational>,
}

impl DecomposedMeasure {
    pub fn compose(&self) -> Result<AtomicMeasureHat> {
        if self.t.is_negative() || self.t > Rational::one() {
            return Err(Error::InvalidInput(format!("t = {} is outside [0, 1]", self.t)));
        }
        let alpha_sum: Rational = self.alphas.iter().sum();
        if !alpha_sum.is_one() || self.alphas.iter().any(|a| a.is_negative()) {
            return Err(Error::InvalidInput("α must be a probability vector".into()));
        }
        let mut parts = Vec::new();
        if !self.t.is_zero() {
            let base = self
                .base
                .as_ref()
                .ok_or_else(|| Error::InvalidInput("t > 0 needs a base measure".into()))?;
            if base.atoms.keys().any(|p| p.level().is_some()) || !base.is_invariant() {
                return Err(Error::InvalidInput("the base must be σ-invariant on Σ".into()));
            }
            parts.push((self.t.clone(), base.clone()));
        }
        let rest = Rational::one() - &self.t;
        for (i, a) in self.alphas.iter().enumerate() {
            if !a.is_zero() {
                parts.push((&rest * a, AtomicMeasureHat::dirac(BlurPoint::fixed(i + 1))));
            }
        }
        AtomicMeasureHat::mix(&parts)
    }
}

// ----------------------------------------------------------------- families

/// `Σ c_i δ_{x_i^k}` with one parameter `k` shared by all components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFamily {
    pub components: Vec<FamilyComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyComponent {
    #[serde(with = "rational_str")]
    pub weight: Rational,
    pub family: PointFamily,
}

impl MeasureFamily {
    /// The periodic-orbit measures of a purely periodic pattern: uniform over its rotations.
    pub fn periodic(pattern: &PointFamily) -> Result<Self> {
        if !pattern.pre.is_empty() {
            return Err(Error::InvalidInput("periodic families need an empty preperiod".into()));
        }
        let p = pattern.period.len();
        let w = Rational::new(1.into(), (p as i64).into());
        let mut comps = Vec::new();
        let mut cur = pattern.clone();
        for _ in 0..p {
            comps.push(FamilyComponent {
                weight: w.clone(),
                family: cur.clone(),
            });
            cur = cur.shifted();
        }
        Ok(MeasureFamily { components: comps })
    }

    fn parameters(&self, bs: &BlurShift, n: usize) -> Result<Vec<Symbol>> {
        let lead = self
            .components
            .iter()
            .find(|c| c.family.first_slot().is_some())
            .or(self.components.first())
            .ok_or_else(|| Error::InvalidInput("empty measure family".into()))?;
        if lead.family.first_slot().is_none() {
            return Ok(vec![0]);
        }
        Ok(lead.family.domain(bs)?.first_n(n))
    }

    pub fn instantiate(&self, bs: &BlurShift, k: Symbol) -> Result<AtomicMeasureHat> {
        let mut atoms = Vec::new();
        for c in &self.components {
            atoms.push((PointHat::Seq(c.family.instantiate(&bs.shift, k)?), c.weight.clone()));
        }
        AtomicMeasureHat::new(atoms)
    }

    pub fn limit_measure(&self, bs: &BlurShift) -> Result<AtomicMeasureHat> {
        let mut atoms = Vec::new();
        for c in &self.components {
            atoms.push((bs.limit_of_family(&c.family)?, c.weight.clone()));
        }
        AtomicMeasureHat::new(atoms)
    }

    /// Eventual equality of cylinder values along the first `n` parameters.
    ///
    /// Returns, per cylinder, the limit value and the first sampled parameter from which
    /// every later sample agrees with it.
    pub fn check_convergence(
        &self,
        bs: &BlurShift,
        cylinders: &[GeneralizedCylinder],
        n: usize,
    ) -> Result<Vec<CylinderConvergence>> {
        let limit = self.limit_measure(bs)?;
        let ks = self.parameters(bs, n)?;
        let samples: Vec<AtomicMeasureHat> = ks.iter().map(|&k| self.instantiate(bs, k)).collect::<Result<_>>()?;
        let mut out = Vec::new();
        for c in cylinders {
            let target = limit.measure_of_cylinder(bs, c);
            let mut from = None;
            for (k, m) in ks.iter().zip(&samples).rev() {
                if m.measure_of_cylinder(bs, c) == target {
                    from = Some(*k);
                } else {
                    break;
                }
            }
            out.push(CylinderConvergence {
                cylinder: c.clone(),
                limit_value: target,
                settled_from: from,
            });
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CylinderConvergence {
    pub cylinder: GeneralizedCylinder,
    #[serde(with = "rational_str")]
    pub limit_value: Rational,
    /// `None` when even the last sample disagrees.
    pub settled_from: Option<Symbol>,
}

// ------------------------------------------------------------ maximization

/// `β̂ = β ∨ max_r Â(B_r, B_r, …)`.
pub fn beta_hat(bs: &BlurShift, a: &Potential, beta: &Rational) -> Result<ExtendedValue> {
    Ok(ExtendedValue::Finite(beta.clone()).max(a.max_over_level0(bs)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
    #[serde(rename = "iii")]
    III,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximizerClassification {
    pub case: Case,
    #[serde(with = "rational_str")]
    pub beta: Rational,
    pub beta_hat: ExtendedValue,
    pub level0_max: ExtendedValue,
    /// Level-0 points where `Â` attains its maximum over `L̂_0`.
    pub d_hat_max: Vec<BlurPoint>,
    pub m_max: Vec<PeriodicMeasure>,
    pub description: String,
}

pub fn classify_maximizers(
    bs: &BlurShift,
    a: &Potential,
    beta: &Rational,
    m_max: Vec<PeriodicMeasure>,
) -> Result<MaximizerClassification> {
    let level0 = bs.level0();
    let values: Vec<ExtendedValue> = level0.iter().map(|p| a.tail_limsup(bs, p)).collect::<Result<_>>()?;
    let level0_max = values.iter().cloned().max().unwrap_or(ExtendedValue::NegInf);
    let d_hat_max: Vec<BlurPoint> = level0
        .into_iter()
        .zip(&values)
        .filter(|(_, v)| **v == level0_max)
        .map(|(p, _)| p)
        .collect();
    let b = ExtendedValue::Finite(beta.clone());
    let deltas = d_hat_max.iter().map(|p| format!("δ[{p}]")).collect::<Vec<_>>().join(", ");
    let orbits = m_max.iter().map(|m| format!("μ[{}]", m.orbit)).collect::<Vec<_>>().join(", ");
    let (case, description) = if level0_max < b {
        (Case::I, format!("M̂_max = M_max(A) = {{{orbits}}}"))
    } else if level0_max == b {
        (Case::II, format!("M̂_max = Conv({{{orbits}}} ⊔ {{{deltas}}})"))
    } else {
        (Case::III, format!("M̂_max = Conv({{{deltas}}})"))
    };
    Ok(MaximizerClassification {
        case,
        beta: beta.clone(),
        beta_hat: b.max(level0_max.clone()),
        level0_max,
        d_hat_max,
        m_max,
        description,
    })
}

/// Vertices and midpoints of the decomposition simplex over a maximizing periodic measure.
pub fn simplex_family(bs: &BlurShift, base: &AtomicMeasureHat) -> Result<Vec<AtomicMeasureHat>> {
    let s = bs.size();
    let mut out = vec![base.clone()];
    for r in 1..=s {
        out.push(AtomicMeasureHat::dirac(BlurPoint::fixed(r)));
    }
    let half = Rational::new(1.into(), 2.into());
    for r in 1..=s {
        out.push(AtomicMeasureHat::mix(&[
            (half.clone(), base.clone()),
            (half.clone(), AtomicMeasureHat::dirac(BlurPoint::fixed(r))),
        ])?);
    }
    let third = Rational::new(1.into(), (s as i64 + 1).into());
    let mut parts = vec![(third.clone(), base.clone())];
    parts.extend((1..=s).map(|r| (third.clone(), AtomicMeasureHat::dirac(BlurPoint::fixed(r)))));
    out.push(AtomicMeasureHat::mix(&parts)?);
    Ok(out)
}

pub fn max_integral(bs: &BlurShift, a: &Potential, family: &[AtomicMeasureHat]) -> Result<ExtendedValue> {
    let mut best = ExtendedValue::NegInf;
    for m in family {
        best = best.max(m.integral_hat(bs, a)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blur::{Resolution, Slot};
    use crate::potential::{progression, TailRule};
    use crate::shift::Shift;
    use crate::value::{int, ratio};

    fn full_blur() -> BlurShift {
        BlurShift::new(
            Shift::full(),
            Resolution {
                sets: vec![progression(0, 2), progression(1, 2)],
            },
        )
        .unwrap()
    }

    fn k0() -> PointFamily {
        PointFamily {
            pre: vec![],
            period: vec![Slot::Var(0), Slot::Fixed(0)],
            r: 1,
            domain: None,
        }
    }

    #[test]
    fn non_closedness() {
        let bs = full_blur();
        let fam = MeasureFamily::periodic(&k0()).unwrap();
        let lim = fam.limit_measure(&bs).unwrap();
        let half = ratio(1, 2);
        let expect = AtomicMeasureHat::new([
            (PointHat::Blur(BlurPoint::fixed(1)), half.clone()),
            (PointHat::Blur(BlurPoint::new(vec![0], 1)), half),
        ])
        .unwrap();
        assert_eq!(lim, expect);
        assert!(!lim.is_invariant());
        assert_eq!(lim.pushforward(), AtomicMeasureHat::dirac(BlurPoint::fixed(1)));
        let m = lim.level_masses(2);
        assert_eq!(m.levels, vec![ratio(1, 2), ratio(1, 2), int(0)]);
        for k in [2, 4, 100] {
            assert!(fam.instantiate(&bs, k).unwrap().is_invariant());
        }
        let cyl = [
            GeneralizedCylinder::plain(vec![0]),
            GeneralizedCylinder::blur(vec![], 1, [0, 2]),
            GeneralizedCylinder::blur(vec![0], 1, []),
        ];
        for c in fam.check_convergence(&bs, &cyl, 12).unwrap() {
            assert!(c.settled_from.is_some(), "{c:?}");
        }
    }

    #[test]
    fn decomposition_round_trip() {
        let bs = full_blur();
        let per = AtomicMeasureHat::periodic(&SequencePoint::periodic(vec![0, 1]).unwrap());
        let mu = AtomicMeasureHat::mix(&[
            (ratio(1, 4), per.clone()),
            (ratio(3, 4), AtomicMeasureHat::dirac(BlurPoint::fixed(1))),
        ])
        .unwrap();
        let d = mu.decompose(&bs).unwrap();
        assert_eq!(d.t, ratio(1, 4));
        assert_eq!(d.alphas, vec![int(1), int(0)]);
        assert_eq!(d.compose().unwrap(), mu);
        assert_eq!(per.measure_of_cylinder(&bs, &GeneralizedCylinder::plain(vec![0])), ratio(1, 2));
        let bad = AtomicMeasureHat::dirac(BlurPoint::new(vec![3], 1));
        assert!(matches!(bad.decompose(&bs), Err(Error::NotInvariant)));
    }

    #[test]
    fn classification_cases() {
        let bs = full_blur();
        let per = |c: i64| Potential::per_symbol([(0, int(1))], TailRule::constant(int(c)));
        let mm = vec![PeriodicMeasure {
            orbit: SequencePoint::periodic(vec![0]).unwrap(),
        }];
        let c1 = classify_maximizers(&bs, &crate::potential::coercive(int(1)), &int(1), mm.clone()).unwrap();
        assert_eq!(c1.case, Case::I);
        assert_eq!(classify_maximizers(&bs, &per(1), &int(1), mm.clone()).unwrap().case, Case::II);
        let c3 = classify_maximizers(&bs, &per(5), &int(1), mm).unwrap();
        assert_eq!(c3.case, Case::III);
        assert_eq!(c3.beta_hat, int(5).into());
        assert_eq!(c3.d_hat_max.len(), 2);
    }
}
