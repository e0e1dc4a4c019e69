use std::path::{Path, PathBuf};

use blur_core::blur::{validate_resolution, BlurShift, PointFamily, Resolution, ResolutionReport};
use blur_core::ergopt::CycleReading;
use blur_core::measures::{AtomicMeasureHat, MeasureFamily};
use blur_core::potential::Potential;
use blur_core::shift::{Shift, ShiftSpec};
use blur_core::symbols::{Symbol, Word};
use blur_core::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FcpaParams {
    pub symbol: Symbol,
    pub m_max: usize,
    #[serde(default = "default_bound")]
    pub bound: Symbol,
}

fn default_bound() -> Symbol {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectParams {
    pub u: Word,
    pub w: Word,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub shift: Shift,
    #[serde(default)]
    pub resolution: Option<Resolution>,
    #[serde(default)]
    pub potential: Option<Potential>,
    #[serde(default)]
    pub truncation: Option<u64>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub reading: CycleReading,
    #[serde(default)]
    pub fcpa: Option<FcpaParams>,
    #[serde(default)]
    pub connect: Option<ConnectParams>,
    /// A point family (`limit`).
    #[serde(default)]
    pub family: Option<PointFamily>,
    #[serde(default)]
    pub measure_family: Option<MeasureFamily>,
    /// An atomic measure (`decompose`).
    #[serde(default)]
    pub measure: Option<AtomicMeasureHat>,
    /// Parameters sampled when checking family convergence.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if let Some(p) = raw.get("potential") {
            let kind = p.get("kind").and_then(|k| k.as_str()).unwrap_or("");
            if kind != "distance-to-orbit" && p.get("tail").is_none() {
                return Err(Error::TailRuleMissing(format!("{kind} potential without a `tail` rule")));
            }
        }
        let c: RunConfig = serde_json::from_value(raw).map_err(|e| Error::InvalidInput(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Shift sanity, resolution clauses and potential tail rules.
    pub fn validate(&self) -> Result<Option<ResolutionReport>> {
        if self.shift.alphabet().iter().next().is_none() {
            return Err(Error::InvalidInput("empty alphabet".into()));
        }
        let report = match &self.resolution {
            Some(v) => Some(validate_resolution(&self.shift, v)?),
            None => None,
        };
        if let Some(a) = &self.potential {
            a.validate(&self.shift)?;
        }
        Ok(report)
    }

    pub fn potential(&self) -> Result<&Potential> {
        self.potential
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs a `potential`".into()))
    }

    pub fn blur_shift(&self) -> Result<BlurShift> {
        let v = self
            .resolution
            .clone()
            .ok_or_else(|| Error::InvalidInput("this command needs a `resolution`".into()))?;
        BlurShift::new(self.shift.clone(), v)
    }

    pub fn measure(&self) -> Result<&AtomicMeasureHat> {
        self.measure
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs a `measure`".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_config_parses() {
        let c = RunConfig::parse(r#"{"shift": {"family": "lambda", "class_sizes": "k", "max_class": 4}}"#).unwrap();
        assert!(c.shift.lambda().is_some());
    }

    #[test]
    fn missing_tail_rule_is_invalid_input() {
        let e = RunConfig::parse(r#"{"shift": {"family": "full"}, "potential": {"kind": "per-symbol", "values": {"0": "1"}}}"#)
            .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.code(), "tail-rule-missing");
    }

    #[test]
    fn overlapping_blurred_sets_name_the_clause() {
        let e = RunConfig::parse(
            r#"{"shift": {"family": "full"},
                "resolution": [{"semilinear": {"progressions": [[0, 1]]}}, {"semilinear": {"progressions": [[0, 2]]}}]}"#,
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("infinite intersection"), "{e}");
    }
}
