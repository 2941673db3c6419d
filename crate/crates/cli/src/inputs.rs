//! Merges flags, the optional config file and defaults into validated inputs.
//!
//! Config files hold one `key = value` per line (`#` starts a comment); keys
//! are the long flag names with `-` or `_`. A JSON document written by
//! `--output json` is accepted as well: its `inputs` object is read.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ampo::analysis::{Strategy, DEFAULT_BUDGET, DEFAULT_SCAN_POINTS};
use ampo::oracle::LatticeConfig;
use ampo::{AmpoError, ContractParams, ExponentForm, MarketParams, OptionKind};

use crate::args::{CommonArgs, OutputFormat, ValidateArgs};
use crate::CliError;

const KEYS: &[&str] = &[
    "kind",
    "spot",
    "strike",
    "rate",
    "vol",
    "amort",
    "exponents",
    "q_min",
    "q_max",
    "q_steps",
    "budget",
    "strategy",
    "output",
    "steps",
    "horizon",
    "tolerance",
    "perturb_premium",
    "vega_per_point",
];

pub type ConfigMap = BTreeMap<String, String>;

pub fn load_config(path: &Path) -> Result<ConfigMap, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let map = if text.trim_start().starts_with('{') {
        parse_json_config(&text)?
    } else {
        parse_key_values(&text)?
    };
    for key in map.keys() {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown config key `{key}`")));
        }
    }
    Ok(map)
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

fn parse_key_values(text: &str) -> Result<ConfigMap, CliError> {
    let mut map = ConfigMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
        map.insert(normalize(key), value.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

fn parse_json_config(text: &str) -> Result<ConfigMap, CliError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
    let inputs = doc
        .get("inputs")
        .and_then(|v| v.as_object())
        .ok_or_else(|| CliError::Usage("JSON config has no `inputs` object".into()))?;
    inputs
        .iter()
        .map(|(k, v)| {
            let value = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(_) | serde_json::Value::Bool(_) => v.to_string(),
                other => {
                    return Err(CliError::Usage(format!("config key `{k}`: unsupported value {other}")))
                }
            };
            Ok((normalize(k), value))
        })
        .collect()
}

fn lookup<T: std::str::FromStr>(flag: Option<T>, config: &ConfigMap, key: &str) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    config
        .get(key)
        .map(|raw| {
            raw.parse::<T>()
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`")))
        })
        .transpose()
}

fn domain(e: AmpoError) -> CliError {
    CliError::Usage(e.to_string())
}

fn invalid(field: &str, requirement: &str, value: f64) -> CliError {
    CliError::Usage(format!("{field} must be {requirement} (got {value})"))
}

/// Everything a command may need, resolved and validated.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub market: MarketParams,
    pub contract: ContractParams,
    pub q_min: Option<f64>,
    pub q_max: Option<f64>,
    pub q_steps: Option<usize>,
    pub budget: f64,
    pub strategy: Strategy,
    pub output: OutputFormat,
    pub vega_per_point: bool,
    pub validate: ValidateInputs,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateInputs {
    pub lattice: LatticeConfig,
    pub perturb_premium: f64,
}

impl Inputs {
    pub fn resolve(
        common: &CommonArgs,
        validate: Option<&ValidateArgs>,
        vega_per_point_flag: bool,
        env_output: Option<String>,
    ) -> Result<Self, CliError> {
        let config = match &common.config {
            Some(path) => load_config(path)?,
            None => ConfigMap::new(),
        };
        let c = &config;

        let kind = match lookup(common.kind.clone(), c, "kind")? {
            Some(s) => s.parse::<OptionKind>().map_err(domain)?,
            None => OptionKind::Call,
        };
        let form = match lookup(common.exponents.clone(), c, "exponents")? {
            Some(s) => s.parse::<ExponentForm>().map_err(domain)?,
            None => ExponentForm::Published,
        };
        let strategy = match lookup(common.strategy.clone(), c, "strategy")? {
            Some(s) => s.parse::<Strategy>().map_err(domain)?,
            None => Strategy::PutOnly,
        };
        let output = match lookup(common.output.map(|o| o.as_str().to_string()), c, "output")? {
            Some(s) => parse_output(&s)?,
            None => match env_output {
                Some(s) => parse_output(&s)?,
                None => OutputFormat::Table,
            },
        };

        let spot = lookup(common.spot, c, "spot")?.unwrap_or(100.0);
        let strike = lookup(common.strike, c, "strike")?.unwrap_or(100.0);
        let rate = lookup(common.rate, c, "rate")?.unwrap_or(0.05);
        let vol = lookup(common.vol, c, "vol")?.unwrap_or(0.5);
        let amort = lookup(common.amort, c, "amort")?.unwrap_or(0.1);
        let market = MarketParams::new(spot, rate, vol).map_err(domain)?;
        let contract = ContractParams::new(strike, amort, kind).map_err(domain)?.with_form(form);

        let q_min = lookup(common.q_min, c, "q_min")?;
        let q_max = lookup(common.q_max, c, "q_max")?;
        let q_steps = lookup(common.q_steps, c, "q_steps")?;
        for (field, q) in [("q_min", q_min), ("q_max", q_max)] {
            if let Some(q) = q {
                if !(q.is_finite() && q > 0.0) {
                    return Err(invalid(field, "> 0", q));
                }
            }
        }
        if let Some(n) = q_steps {
            if n < 2 {
                return Err(invalid("q_steps", ">= 2", n as f64));
            }
        }
        let budget = lookup(common.budget, c, "budget")?.unwrap_or(DEFAULT_BUDGET);
        if !(budget.is_finite() && budget > 0.0) {
            return Err(invalid("budget", "> 0", budget));
        }

        let vega_per_point = vega_per_point_flag || lookup(None, c, "vega_per_point")?.unwrap_or(false);

        let v = |f: fn(&ValidateArgs) -> Option<f64>| validate.and_then(f);
        let steps = lookup(validate.and_then(|a| a.steps), c, "steps")?;
        let horizon = lookup(v(|a| a.horizon), c, "horizon")?;
        let tolerance = lookup(v(|a| a.tolerance), c, "tolerance")?;
        let perturb_premium = lookup(v(|a| a.perturb_premium), c, "perturb_premium")?.unwrap_or(0.0);
        let defaults = LatticeConfig::default();
        let lattice = LatticeConfig {
            horizon: horizon.unwrap_or_else(|| LatticeConfig::horizon_for(amort)),
            steps: steps.unwrap_or(defaults.steps),
            convergence: tolerance.unwrap_or(defaults.convergence),
            ..defaults
        };
        lattice.validate().map_err(domain)?;
        if !perturb_premium.is_finite() || perturb_premium <= -1.0 {
            return Err(invalid("perturb_premium", "> -1", perturb_premium));
        }

        Ok(Self {
            market,
            contract,
            q_min,
            q_max,
            q_steps,
            budget,
            strategy,
            output,
            vega_per_point,
            validate: ValidateInputs {
                lattice,
                perturb_premium,
            },
        })
    }

    /// Grid bounds and point count, falling back to the given defaults.
    pub fn grid(&self, lo: f64, hi: f64, points: usize) -> Result<(f64, f64, usize), CliError> {
        let lo = self.q_min.unwrap_or(lo);
        let hi = self.q_max.unwrap_or(hi);
        if lo >= hi {
            return Err(invalid("q_max", &format!("> q_min = {lo}"), hi));
        }
        Ok((lo, hi, self.q_steps.unwrap_or(points)))
    }

    pub fn scan_points(&self) -> usize {
        self.q_steps.unwrap_or(DEFAULT_SCAN_POINTS)
    }
}

fn parse_output(s: &str) -> Result<OutputFormat, CliError> {
    OutputFormat::parse(s)
        .ok_or_else(|| CliError::Usage(format!("unknown output format `{s}` (expected json, csv or table)")))
}
