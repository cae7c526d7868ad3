//! Suite selection, parameter bindings and output settings, from flags or a
//! `key = value` file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use condsym::catalog::{build_variable_mass, invariant_operator, Branch};
use condsym::expr::{parse, Context, RatFunc};
use condsym::numerics::checks::NumericConfig;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "CONDSYM_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    Roots,
    Invariance,
    Potentials,
    Numeric,
    Bridge,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Algebra, Suite::Roots, Suite::Invariance, Suite::Potentials, Suite::Numeric, Suite::Bridge];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Roots => "roots",
            Suite::Invariance => "invariance",
            Suite::Potentials => "potentials",
            Suite::Numeric => "numeric",
            Suite::Bridge => "bridge",
        }
    }

    /// Parses a comma list; `all` selects every suite.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>, CliError> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            if item == "all" {
                out.extend(Suite::ALL);
                continue;
            }
            let suite = Suite::from_str(item, true).map_err(|_| {
                CliError::Config(format!(
                    "unknown suite `{item}`; valid suites are all, {}",
                    Suite::ALL.map(Suite::name).join(", ")
                ))
            })?;
            out.push(suite);
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    #[default]
    Markdown,
}

/// `n,h,dt`: grid points, spacing, finest time step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<GridSpec, CliError> {
        let bad = || CliError::Config(format!("grid `{s}` must be `n,h,dt` with n a power of two >= 16 and h, dt > 0"));
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: usize = parts[0].parse().map_err(|_| bad())?;
        let h: f64 = parts[1].parse().map_err(|_| bad())?;
        let dt: f64 = parts[2].parse().map_err(|_| bad())?;
        if n < 16 || !n.is_power_of_two() || h.is_nan() || h <= 0.0 || dt.is_nan() || dt <= 0.0 {
            return Err(bad());
        }
        Ok(GridSpec { n, h, dt })
    }
}

/// Value of `--x`: a branch, optionally with a concrete value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XChoice {
    pub text: String,
    pub branch: Branch,
    /// A concrete `x != 1/2` bound in the generic branch.
    pub value: Option<String>,
}

impl XChoice {
    pub fn parse(s: &str) -> Result<XChoice, CliError> {
        let text = s.trim().to_string();
        if text == "generic" {
            return Ok(XChoice { text, branch: Branch::Generic, value: None });
        }
        let v = parse_constant("x", &text)?;
        if v == RatFunc::ratio(1, 2) {
            Ok(XChoice { text, branch: Branch::Half, value: None })
        } else {
            Ok(XChoice { text, branch: Branch::Generic, value: Some(v.to_string()) })
        }
    }

    pub fn numeric(&self) -> Result<f64, CliError> {
        match (&self.value, self.branch) {
            (_, Branch::Half) => Ok(0.5),
            (Some(v), _) => ratfunc_value(&parse_constant("x", v)?),
            (None, _) => Err(CliError::Config("numeric suites need a concrete x".into())),
        }
    }
}

fn parse_constant(key: &str, value: &str) -> Result<RatFunc, CliError> {
    let e = parse(value, &Context::standard()).map_err(|err| CliError::Config(format!("value of `{key}`: {err}")))?;
    e.as_constant()
        .filter(|c| c.params().is_empty())
        .ok_or_else(|| CliError::Config(format!("value of `{key}` must be a rational number, got `{value}`")))
}

fn ratfunc_value(r: &RatFunc) -> Result<f64, CliError> {
    r.eval(&|_| None).map(|c| c.re).ok_or_else(|| CliError::Config(format!("`{r}` is not a number")))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub suites: Vec<Suite>,
    /// Table rows to restrict to; empty means all.
    pub cases: Vec<u8>,
    pub params: BTreeMap<String, String>,
    pub real: bool,
    pub x: Option<XChoice>,
    pub grid: Option<GridSpec>,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", no + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| CliError::Config(format!("config line {}: {}", no + 1, e.message())))?;
        }
        Ok(())
    }

    /// Sets one option by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "suite" | "suites" => self.suites = Suite::parse_list(value)?,
            "case" | "cases" => self.cases = parse_cases(value)?,
            "params" => self.params = parse_params(value)?,
            "real" => {
                self.real = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("`real` must be true or false, got `{value}`")))?
            }
            "x" => self.x = Some(XChoice::parse(value)?),
            "grid" => self.grid = Some(GridSpec::parse(value)?),
            "format" => {
                self.format = Format::from_str(value, true)
                    .map_err(|_| CliError::Config(format!("format must be json or markdown, got `{value}`")))?
            }
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(CliError::Config(format!("unknown option `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.suites.is_empty() {
            return Err(CliError::Usage("no suite selected".into()));
        }
        let cases: Vec<u8> = if self.cases.is_empty() { (1..=8).collect() } else { self.cases.clone() };
        let mut known = std::collections::BTreeSet::new();
        for &c in &cases {
            known.extend(case_parameters(c)?);
        }
        for key in self.params.keys() {
            if key == "x" {
                return Err(CliError::Config("bind x with --x, not --params".into()));
            }
            if !known.contains(key) {
                let list: Vec<&str> = known.iter().map(String::as_str).filter(|k| *k != "x").collect();
                return Err(CliError::Config(format!(
                    "parameter `{key}` is not used by the selected cases; available: {}",
                    list.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Branches selected by `--x`.
    pub fn branches(&self) -> Vec<Branch> {
        match &self.x {
            Some(x) => vec![x.branch],
            None => Branch::BOTH.to_vec(),
        }
    }

    /// Parameter values to substitute, including a concrete `x`.
    pub fn bindings(&self) -> Result<BTreeMap<String, RatFunc>, CliError> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.params {
            out.insert(k.clone(), parse_constant(k, v)?);
        }
        if let Some(v) = self.x.as_ref().and_then(|x| x.value.as_ref()) {
            out.insert("x".into(), parse_constant("x", v)?);
        }
        Ok(out)
    }

    pub fn numeric(&self) -> Result<NumericConfig, CliError> {
        let mut cfg = NumericConfig::default();
        if let Some(g) = self.grid {
            cfg.n = g.n;
            cfg.length = g.n as f64 * g.h;
            cfg.dt = g.dt;
        }
        if let Some(x) = &self.x {
            cfg.x = x.numeric()?;
        }
        Ok(cfg)
    }

    /// The output directory: the flag, else the environment, else `fallback`.
    pub fn out_dir(&self, fallback: Option<&str>) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .or_else(|| fallback.map(PathBuf::from))
    }
}

pub fn parse_cases(s: &str) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        match item.parse::<u8>() {
            Ok(n) if (1..=8).contains(&n) => out.push(n),
            _ => return Err(CliError::Config(format!("unknown case `{item}`; valid cases are 1-8"))),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `k=v,k2=v2`.
pub fn parse_params(s: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter binding `{item}` must look like name=value")))?;
        let (k, v) = (k.trim(), v.trim());
        parse_constant(k, v)?;
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

/// Parameters the generators and operators of a row depend on, in either branch.
pub fn case_parameters(case: u8) -> Result<std::collections::BTreeSet<String>, CliError> {
    let mut out = std::collections::BTreeSet::new();
    for branch in Branch::BOTH {
        let rep = build_variable_mass(case, branch).map_err(|e| CliError::Config(e.to_string()))?;
        for (_, f) in &rep.generators {
            for c in f.coeffs.iter().chain([&f.scalar]) {
                out.extend(c.params());
            }
        }
        for op in invariant_operator(case, branch).map_err(|e| CliError::Config(e.to_string()))? {
            out.extend(op.params());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lists() {
        assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(Suite::parse_list("roots, bridge").unwrap(), vec![Suite::Roots, Suite::Bridge]);
        assert!(Suite::parse_list("roots,nope").is_err());
    }

    #[test]
    fn grid_and_x() {
        let g = GridSpec::parse("128, 0.25, 1e-3").unwrap();
        assert_eq!((g.n, g.h, g.dt), (128, 0.25, 1e-3));
        for bad in ["100,0.1,0.1", "8,0.1,0.1", "64,0,0.1", "64,0.1", "a,b,c"] {
            assert!(GridSpec::parse(bad).is_err(), "{bad}");
        }
        assert_eq!(XChoice::parse("1/2").unwrap().branch, Branch::Half);
        let x = XChoice::parse("3/4").unwrap();
        assert_eq!(x.branch, Branch::Generic);
        assert_eq!(x.numeric().unwrap(), 0.75);
        assert!(XChoice::parse("generic").unwrap().value.is_none());
        assert!(XChoice::parse("t").is_err());
    }

    #[test]
    fn file_and_flags_share_keys() {
        let mut from_file = SuiteConfig::default();
        from_file.apply_file("suite = invariance # symbolic\ncase = 3,1,3\nparams = p01=0\nx = 1/2\n").unwrap();
        let mut from_flags = SuiteConfig::default();
        for (k, v) in [("suites", "invariance"), ("cases", "1,3"), ("params", "p01=0"), ("x", "1/2")] {
            from_flags.set(k, v).unwrap();
        }
        assert_eq!(from_file, from_flags);
        assert_eq!(from_file.cases, vec![1, 3]);
        from_file.validate().unwrap();
        assert_eq!(from_file.branches(), vec![Branch::Half]);
        assert_eq!(from_file.bindings().unwrap()["p01"], RatFunc::zero());
    }

    #[test]
    fn validation_errors() {
        let cfg = SuiteConfig::default();
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        assert!(matches!(cfg.validate(), Err(CliError::Usage(_))));
        let mut cfg = SuiteConfig { suites: vec![Suite::Invariance], ..SuiteConfig::default() };
        cfg.set("params", "x=1").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("params", "s=2").unwrap();
        cfg.validate().unwrap();
        cfg.set("case", "1").unwrap();
        assert!(cfg.validate().is_err());
        assert!(cfg.set("colour", "red").is_err());
        assert!(parse_cases("0").is_err());
        assert!(parse_params("s").is_err());
        assert!(parse_params("s=t").is_err());
    }
}
