//! Necessary and sufficient condition checks on the built-in scalar families.

use fts_core::analysis::{
    check_necessary_condition, default_envelope_grid, fit_sufficient_envelope, EnvelopeFit,
    SlopeTrend, SlopeVerdict,
};

use crate::scenario::Family;

#[derive(Debug, Clone)]
pub struct FieldCheck {
    pub family: Family,
    pub k: f64,
    pub alpha: f64,
    pub trend: SlopeTrend,
    pub envelope: EnvelopeFit,
}

impl FieldCheck {
    /// A trusted sufficient envelope implies a divergent slope; a finite slope
    /// rules out finite-time stability.
    pub fn consistent(&self) -> bool {
        let trusted = self.envelope.found && !self.envelope.degenerate;
        !trusted || self.trend.verdict == SlopeVerdict::DivergentSlope
    }

    pub fn render(&self) -> String {
        let mut t = toml::Table::new();
        t.insert("family".into(), self.family.name().into());
        t.insert("k".into(), self.k.into());
        t.insert("alpha".into(), self.alpha.into());
        let verdict = match self.trend.verdict {
            SlopeVerdict::DivergentSlope => "divergent-slope",
            SlopeVerdict::FiniteSlope => "finite-slope",
            SlopeVerdict::Inconclusive => "inconclusive",
        };
        t.insert("necessary".into(), verdict.into());
        if let Some(l) = self.trend.limit {
            t.insert("slope_limit".into(), l.into());
        }
        let e = &self.envelope;
        let mut env = toml::Table::new();
        env.insert("found".into(), e.found.into());
        env.insert("degenerate".into(), e.degenerate.into());
        if e.found {
            env.insert("k".into(), e.k.into());
            env.insert("alpha".into(), e.alpha.into());
            env.insert("violation_margin".into(), e.violation_margin.into());
        }
        if let Some(s) = e.inner_slope {
            env.insert("inner_slope".into(), s.into());
        }
        t.insert("consistent".into(), self.consistent().into());
        t.insert("envelope".into(), env.into());
        toml::to_string(&t).expect("check tables serialize")
    }
}

/// Runs both checks on `[-edge, edge]` (the counter-example ignores `k`,
/// `alpha` and uses its own domain).
pub fn check_family(family: Family, k: f64, alpha: f64, edge: f64) -> fts_core::Result<FieldCheck> {
    let field = family.field(k, alpha, edge)?;
    let (lo, hi) = field.domain();
    let reach = lo.abs().min(hi);
    let trend = check_necessary_condition(&field, reach, 64)?;
    let envelope = fit_sufficient_envelope(&field, &default_envelope_grid(lo, hi))?;
    Ok(FieldCheck {
        family,
        k,
        alpha,
        trend,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_separate() {
        let p = check_family(Family::PowerLaw, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(p.trend.verdict, SlopeVerdict::DivergentSlope);
        assert!(p.envelope.found && !p.envelope.degenerate && p.consistent());
        let l = check_family(Family::Linear, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(l.trend.verdict, SlopeVerdict::FiniteSlope);
        assert!(!l.envelope.found && l.consistent());
        let c = check_family(Family::CounterExample, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(c.trend.verdict, SlopeVerdict::DivergentSlope);
        assert!(!c.envelope.found || c.envelope.degenerate);
        assert!(c.render().contains("necessary = \"divergent-slope\""));
    }
}
