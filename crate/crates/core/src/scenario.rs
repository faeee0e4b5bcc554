//! Scenario orchestration: which checks run where, in what order, and the
//! combined report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{dims_report, verify_multiplication_formula, verify_rho_decomposition};
use crate::error::{Error, Result};
use crate::forms::FormKind;
use crate::report::{DualityReport, LevelRow, Status};
use crate::tensor::ComponentIndex;
use crate::verify;

/// Declaration order is execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Check {
    Dims,
    Brauer,
    MulFormula,
    Restricted,
    Levi,
    Parabolic,
    Filtration,
    Annihilation,
    SanityGl,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Dims,
        Check::Brauer,
        Check::MulFormula,
        Check::Restricted,
        Check::Levi,
        Check::Parabolic,
        Check::Filtration,
        Check::Annihilation,
        Check::SanityGl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Dims => "dims",
            Check::Brauer => "brauer",
            Check::MulFormula => "mulformula",
            Check::Restricted => "restricted",
            Check::Levi => "levi",
            Check::Parabolic => "parabolic",
            Check::Filtration => "filtration",
            Check::Annihilation => "annihilation",
            Check::SanityGl => "sanity-gl",
        }
    }

    /// Checks that solve a commutant on the enhanced tensor power.
    pub fn needs_enhanced_commutant(self) -> bool {
        matches!(
            self,
            Check::Restricted | Check::Levi | Check::Parabolic | Check::Filtration
        )
    }

    /// Parses a comma-separated list, sorted into execution order.
    pub fn parse_list(s: &str) -> Result<Vec<Check>> {
        let mut out: Vec<Check> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::Empty("checks"));
        }
        Ok(out)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub form: FormKind,
    pub n: usize,
    pub r: usize,
    pub checks: Vec<Check>,
    pub seed: u64,
    /// Unlocks commutants on `V̄^⊗r` for `r ≥ 3`.
    pub stress: bool,
    pub timings: bool,
}

/// Largest `r` accepted: the enhanced operator space grows like `(n+1)^{4r}`.
pub const MAX_R: usize = 4;

/// Samples drawn by the seeded multiplication-formula check at `r ≥ 3`.
pub const MULFORMULA_SAMPLES: usize = 200;

impl ScenarioConfig {
    pub fn new(form: FormKind, n: usize, r: usize, checks: Vec<Check>, seed: u64) -> Self {
        ScenarioConfig {
            form,
            n,
            r,
            checks,
            seed,
            stress: false,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidDimension("n must be positive".into()));
        }
        if self.form == FormKind::Symplectic && self.n % 2 == 1 {
            return Err(Error::InvalidDimension(format!(
                "symplectic form needs even n, got {}",
                self.n
            )));
        }
        if self.r == 0 || self.r > MAX_R {
            return Err(Error::OutOfRange(format!(
                "r must lie in 1..={MAX_R}, got {}",
                self.r
            )));
        }
        if self.checks.is_empty() {
            return Err(Error::Empty("checks"));
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Vec<DualityReport>> {
        self.validate()?;
        let mut out = Vec::new();
        for &check in &self.checks {
            out.extend(self.run_check(check)?);
        }
        Ok(out)
    }

    fn run_check(&self, check: Check) -> Result<Vec<DualityReport>> {
        let (kind, n, r, seed) = (self.form, self.n, self.r, self.seed);
        if r >= 3 && check.needs_enhanced_commutant() && !self.stress {
            let mut rep = DualityReport::new(check.name(), kind, n, r);
            rep.status = Status::NotApplicable;
            rep.note("skipped: commutant on the enhanced space at r >= 3 needs --stress");
            return Ok(vec![rep]);
        }
        let timed = |f: &dyn Fn() -> Result<DualityReport>| -> Result<DualityReport> {
            let start = Instant::now();
            let mut rep = f()?;
            if self.timings {
                rep.elapsed_ms = Some(start.elapsed().as_millis() as u64);
            }
            Ok(rep)
        };
        Ok(match check {
            Check::Dims => vec![timed(&|| dims_report(kind, n, r).map(|(rep, _)| rep))?],
            Check::Brauer => vec![timed(&|| verify::verify_brauer_duality(kind, n, r, seed))?],
            Check::MulFormula => vec![
                timed(&|| verify_multiplication_formula(kind, n, r, MULFORMULA_SAMPLES, seed))?,
                timed(&|| match verify_rho_decomposition(kind, n, r) {
                    Err(Error::Precondition(why)) => {
                        let mut rep = DualityReport::new("rho-decomposition", kind, n, r);
                        rep.status = Status::NotApplicable;
                        rep.note(why);
                        Ok(rep)
                    }
                    other => other,
                })?,
            ],
            Check::Restricted => vec![timed(&|| verify::verify_restricted(kind, n, r, seed))?],
            Check::Levi => vec![timed(&|| verify::verify_levi(kind, n, r, seed))?],
            Check::Parabolic => vec![timed(&|| verify::verify_parabolic(kind, n, r, seed))?],
            Check::Filtration => vec![timed(&|| verify::verify_filtration(kind, n, r, seed))?],
            Check::Annihilation => ComponentIndex::all(r)
                .into_iter()
                .filter(|j| !j.is_full())
                .map(|j| timed(&|| verify::verify_annihilation(kind, n, r, &j)))
                .collect::<Result<_>>()?,
            Check::SanityGl => vec![timed(&|| verify::verify_gl_sanity(n, r, kind))?],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Default,
    Extended,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Suite::Default),
            "extended" => Ok(Suite::Extended),
            _ => Err(Error::Parse(format!("unknown suite '{s}'"))),
        }
    }
}

impl Suite {
    /// `(O,4,2)` and `(Sp,6,2)` with every check; the extended suite adds
    /// span and dimension checks at `(O,6,3)`.
    pub fn scenarios(self, seed: u64) -> Vec<ScenarioConfig> {
        let mut out = vec![
            ScenarioConfig::new(FormKind::Orthogonal, 4, 2, Check::ALL.to_vec(), seed),
            ScenarioConfig::new(FormKind::Symplectic, 6, 2, Check::ALL.to_vec(), seed),
        ];
        if self == Suite::Extended {
            out.push(ScenarioConfig::new(
                FormKind::Orthogonal,
                6,
                3,
                vec![Check::Dims, Check::Brauer, Check::MulFormula],
                seed,
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub status: Status,
    pub seed: u64,
    pub reports: Vec<DualityReport>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        !self.status.is_failure()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Per-level dimension rows from every report that carries them.
    pub fn dimension_rows(&self) -> Vec<DimensionRow> {
        self.reports
            .iter()
            .flat_map(|rep| {
                rep.per_level
                    .iter()
                    .map(move |row: &LevelRow| DimensionRow {
                        check: rep.check.clone(),
                        scenario: rep.scenario.clone(),
                        epsilon: rep.epsilon,
                        n: rep.n,
                        r: rep.r,
                        l: row.l,
                        dim: row.dim,
                        expected: row.expected,
                        matches: row.matches,
                    })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionRow {
    pub check: String,
    pub scenario: String,
    pub epsilon: i64,
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub dim: usize,
    pub expected: Option<usize>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

/// Runs scenarios concurrently; the report keeps the input order.
pub fn run_all(configs: &[ScenarioConfig], seed: u64) -> Result<RunReport> {
    for c in configs {
        c.validate()?;
    }
    let per: Vec<Vec<DualityReport>> =
        configs.par_iter().map(|c| c.run()).collect::<Result<_>>()?;
    let reports: Vec<DualityReport> = per.into_iter().flatten().collect();
    let failed = reports.iter().any(|r| r.status.is_failure());
    Ok(RunReport {
        status: Status::from_bool(!failed),
        seed,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_checks_sorted() {
        let c = Check::parse_list("levi,dims,levi").unwrap();
        assert_eq!(c, vec![Check::Dims, Check::Levi]);
        assert!(Check::parse_list("").is_err());
        assert!(Check::parse_list("dims,bogus").is_err());
    }

    #[test]
    fn odd_symplectic_rejected() {
        let c = ScenarioConfig::new(FormKind::Symplectic, 5, 2, vec![Check::Dims], 0);
        assert!(matches!(c.validate(), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn dims_levels() {
        let c = ScenarioConfig::new(
            FormKind::Orthogonal,
            4,
            2,
            vec![Check::Dims, Check::Levi],
            0,
        );
        let rep = run_all(&[c], 0).unwrap();
        assert!(rep.passed());
        let dims: Vec<usize> = rep.reports[0].per_level.iter().map(|l| l.dim).collect();
        assert_eq!(dims, vec![1, 4, 3]);
    }

    #[test]
    fn r3_commutants_gated() {
        let c = ScenarioConfig::new(FormKind::Orthogonal, 6, 3, vec![Check::Levi], 0);
        let rep = c.run().unwrap();
        assert_eq!(rep[0].status, Status::NotApplicable);
    }
}
