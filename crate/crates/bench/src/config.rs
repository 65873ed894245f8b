use std::path::{Path, PathBuf};
use std::time::Duration;

use essp_core::recipe::{Recipe, RecipeOpts};
use essp_core::synth::FactorSpec;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// One solver column of the matrix. `opts` replaces the config-wide
/// recipe options for this solver only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "SolverEntryRepr", into = "SolverEntryRepr")]
pub struct SolverEntry {
    pub name: String,
    pub opts: Option<RecipeOpts>,
}

// a bare string or `{"name": .., "opts": {..}}`
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SolverEntryRepr {
    Name(String),
    Full {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        opts: Option<RecipeOpts>,
    },
}

impl From<SolverEntryRepr> for SolverEntry {
    fn from(r: SolverEntryRepr) -> Self {
        match r {
            SolverEntryRepr::Name(name) => SolverEntry { name, opts: None },
            SolverEntryRepr::Full { name, opts } => SolverEntry { name, opts },
        }
    }
}

impl From<SolverEntry> for SolverEntryRepr {
    fn from(e: SolverEntry) -> Self {
        match e.opts {
            None => SolverEntryRepr::Name(e.name),
            Some(opts) => SolverEntryRepr::Full { name: e.name, opts: Some(opts) },
        }
    }
}

impl SolverEntry {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), opts: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub n: usize,
    pub instances_per_cell: usize,
    pub cr: Vec<f64>,
    pub sr: Vec<f64>,
    pub ug: Vec<f64>,
    /// Coefficient magnitude bound of the generator.
    pub scale: f64,
    pub solvers: Vec<SolverEntry>,
    /// Wall-clock budget per run, in seconds.
    pub budget_secs: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Options shared by every solver without its own.
    pub recipe: RecipeOpts,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            n: 200,
            instances_per_cell: 5,
            cr: vec![0.1, 0.3, 0.5],
            sr: vec![0.1, 0.3, 0.5],
            ug: vec![0.0, 0.1],
            scale: 10.0,
            solvers: ["bp", "bp+essp", "rand+essp", "rand+qpbo-i", "bp+qpbo-i", "rand+essp+i", "qpbo"]
                .iter()
                .map(|s| SolverEntry::named(s))
                .collect(),
            budget_secs: 10.0,
            out_dir: PathBuf::from("bench-out"),
            seed: 0,
            recipe: RecipeOpts::default(),
        }
    }
}

/// Grid point of the factor matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub cr: f64,
    pub sr: f64,
    pub ug: f64,
}

impl Cell {
    pub fn key(&self) -> String {
        format!("cr{:.2}-sr{:.2}-ug{:.2}", self.cr, self.sr, self.ug)
    }
}

impl BenchConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let cfg: BenchConfig = serde_json::from_str(&text).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn budget(&self) -> Duration {
        Duration::from_secs_f64(self.budget_secs)
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &cr in &self.cr {
            for &sr in &self.sr {
                for &ug in &self.ug {
                    cells.push(Cell { cr, sr, ug });
                }
            }
        }
        cells
    }

    pub fn recipes(&self) -> Result<Vec<Recipe>> {
        self.solvers
            .iter()
            .map(|s| s.name.parse::<Recipe>().map_err(|_| BenchError::Config(format!("unknown solver {:?}", s.name))))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.cr.is_empty() || self.sr.is_empty() || self.ug.is_empty() {
            return bad("factor grid has an empty axis".into());
        }
        if self.solvers.is_empty() {
            return bad("solver list is empty".into());
        }
        if self.instances_per_cell == 0 {
            return bad("instances_per_cell must be at least 1".into());
        }
        if !(self.budget_secs > 0.0 && self.budget_secs.is_finite()) {
            return bad(format!("budget_secs = {} must be positive", self.budget_secs));
        }
        self.recipes()?;
        for cell in self.cells() {
            let spec = FactorSpec { scale: self.scale, ..FactorSpec::new(self.n, cell.cr, cell.sr, cell.ug, 0) };
            spec.validate().map_err(|e| BenchError::Config(format!("cell {}: {e}", cell.key())))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        BenchConfig::default().validate().unwrap();
        assert_eq!(BenchConfig::default().cells().len(), 18);
    }

    #[test]
    fn solver_entries_accept_both_shapes() {
        let cfg: BenchConfig = serde_json::from_str(
            r#"{"solvers": ["bp", {"name": "bp+essp", "opts": {"essp_permutations": 3}}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.solvers[0], SolverEntry::named("bp"));
        assert_eq!(cfg.solvers[1].opts.as_ref().unwrap().essp_permutations, 3);
        assert_eq!(cfg.n, 200);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let cases = [
            r#"{"cr": []}"#,
            r#"{"solvers": []}"#,
            r#"{"budget_secs": 0}"#,
            r#"{"solvers": ["nope"]}"#,
            r#"{"n": 3, "cr": [1.0]}"#,
        ];
        for c in cases {
            let cfg: BenchConfig = serde_json::from_str(c).unwrap();
            assert!(matches!(cfg.validate(), Err(BenchError::Config(_))), "{c}");
        }
        assert!(serde_json::from_str::<BenchConfig>(r#"{"typo": 1}"#).is_err());
    }
}
