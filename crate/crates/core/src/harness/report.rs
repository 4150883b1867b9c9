//! Experiment reports and their JSON/CSV forms.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::function::FunctionDescriptor;
use crate::tower::TowerReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One compared inequality. `margin_log` is signed so that positive
/// means the inequality named by `check` holds.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: usize,
    pub lhs_tower: TowerReal,
    pub rhs_tower: TowerReal,
    pub margin_log: f64,
    pub check: String,
    pub holds: bool,
}

impl Row {
    /// Row for `lhs >= rhs`; equality counts as holding.
    pub fn at_least(n: usize, check: &str, lhs: TowerReal, rhs: TowerReal) -> Row {
        Row { n, margin_log: lhs.log_ratio(&rhs), holds: lhs >= rhs, lhs_tower: lhs, rhs_tower: rhs, check: check.into() }
    }

    /// Row for `lhs <= rhs`.
    pub fn at_most(n: usize, check: &str, lhs: TowerReal, rhs: TowerReal) -> Row {
        Row { n, margin_log: rhs.log_ratio(&lhs), holds: lhs <= rhs, lhs_tower: lhs, rhs_tower: rhs, check: check.into() }
    }

    /// Row for `lhs <= rhs` on plain reals, with the margin `rhs − lhs`.
    pub fn real_at_most(n: usize, check: &str, lhs: f64, rhs: f64) -> Row {
        Row {
            n,
            lhs_tower: tower_of_real(lhs),
            rhs_tower: tower_of_real(rhs),
            margin_log: rhs - lhs,
            holds: lhs <= rhs,
            check: check.into(),
        }
    }

    /// A row whose inequality has no content (for example a negative
    /// iteration index); it holds by convention.
    pub fn vacuous(n: usize, check: &str, lhs: TowerReal) -> Row {
        Row {
            n,
            lhs_tower: lhs,
            rhs_tower: TowerReal::from_value(0.0),
            margin_log: f64::INFINITY,
            check: format!("{check}:vacuous"),
            holds: true,
        }
    }
}

/// Towers hold non-negative values; negative reals are clamped to 0 in the
/// tower columns while `margin_log` keeps the signed difference.
fn tower_of_real(x: f64) -> TowerReal {
    if x.is_finite() { TowerReal::from_value(x.max(0.0)) } else { TowerReal::from_value(f64::INFINITY) }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub function: Value,
    pub parameters: BTreeMap<String, Value>,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
    pub tolerances: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(id: &str, f: Option<&FunctionDescriptor>) -> Self {
        ExperimentReport {
            experiment_id: id.into(),
            function: f.map(|f| f.to_json_value()).unwrap_or(Value::Null),
            parameters: BTreeMap::new(),
            rows: Vec::new(),
            verdict: Verdict::Inconclusive,
            tolerances: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, k: &str, v: impl Serialize) -> &mut Self {
        self.parameters.insert(k.into(), serde_json::to_value(v).expect("serializable parameter"));
        self
    }

    pub fn tol(&mut self, k: &str, v: f64) -> &mut Self {
        self.tolerances.insert(k.into(), v);
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    pub fn violations(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.holds)
    }

    /// Pass when every row holds, Fail otherwise.
    pub fn settle(&mut self) {
        self.verdict = if self.rows.iter().all(|r| r.holds) { Verdict::Pass } else { Verdict::Fail };
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "lhs_tower", "rhs_tower", "margin_log", "check"])?;
        for r in &self.rows {
            w.write_record([r.n.to_string(), r.lhs_tower.to_string(), r.rhs_tower.to_string(), format!("{}", r.margin_log), r.check.clone()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `rows.csv` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json())?;
        self.write_csv(fs::File::create(dir.join("rows.csv"))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_verdicts() {
        let mut r = ExperimentReport::new("x", Some(&FunctionDescriptor::exp()));
        r.rows.push(Row::at_least(1, "lower", TowerReal::from_value(3.0), TowerReal::from_value(2.0)));
        r.settle();
        assert_eq!(r.verdict, Verdict::Pass);
        r.rows.push(Row::at_most(2, "upper", TowerReal::from_value(3.0), TowerReal::from_value(2.0)));
        r.settle();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.violations().count(), 1);
        assert!((r.rows[0].margin_log - 1.5f64.ln()).abs() < 1e-15);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("n,lhs_tower,rhs_tower,margin_log,check\n1,E^0(3."), "{s}");
        let j: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["verdict"], "Fail");
        assert_eq!(j["function"]["variant"], "exp_affine");
    }
}
