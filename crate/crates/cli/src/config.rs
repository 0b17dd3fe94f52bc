//! Run configuration: strict JSON plus `--set key=value` overrides.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use serde_json::{Map, Value};
use temporal_bell::{BcWeighting, InequalityType, PotentialForm, SignAssignment, SquidParams};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Spin,
    Squid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSquid {
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "C")]
    c: Option<f64>,
    #[serde(rename = "I_c")]
    i_c: Option<f64>,
    n: Option<i64>,
    potential_form: Option<String>,
    n_points: Option<usize>,
    modes: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: System,
    omega: Option<f64>,
    squid: Option<RawSquid>,
    inequality: Option<String>,
    signs: Option<String>,
    bc_weighting: Option<String>,
    n_time: Option<usize>,
    n_xi: Option<usize>,
    xi_tolerance: Option<f64>,
    output: Option<PathBuf>,
    sidecar: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquidConfig {
    pub params: SquidParams,
    pub n_points: usize,
    pub modes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemConfig {
    Spin { omega: f64 },
    Squid(SquidConfig),
}

/// Either one sign assignment or all eight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignsSelection {
    One(SignAssignment),
    All,
}

impl SignsSelection {
    pub fn assignments(self) -> Vec<SignAssignment> {
        match self {
            SignsSelection::One(s) => vec![s],
            SignsSelection::All => SignAssignment::all().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub inequality: InequalityType,
    pub signs: SignsSelection,
    pub bc_weighting: BcWeighting,
    pub n_time: usize,
    pub n_xi: usize,
    pub xi_tolerance: f64,
    pub output: Option<PathBuf>,
    pub sidecar: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_N_TIME: usize = 256;
pub const DEFAULT_N_XI: usize = 200;
pub const DEFAULT_XI_TOLERANCE: f64 = 1e-3;

/// Sets `value` at a dotted key path, creating intermediate objects.
/// The value is read as JSON when it parses, and as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let Some((key, raw)) = assignment.split_once('=') else {
        return err(format!("override `{assignment}` is not of the form key=value"));
    };
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return err(format!("override has an empty key path: `{assignment}`"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let Value::Object(map) = node else {
            return err(format!("cannot set `{key}`: `{part}` is below a non-object value"));
        };
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    unreachable!("key path has at least one component")
}

/// Parses a configuration document and applies overrides in order.
pub fn parse_config(text: Option<&str>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut root = match text {
        Some(t) => serde_json::from_str(t).map_err(|e| ConfigError(format!("malformed JSON: {e}")))?,
        None => Value::Object(Map::new()),
    };
    if !root.is_object() {
        return err("top level must be a JSON object");
    }
    for o in overrides {
        apply_override(&mut root, o)?;
    }
    let raw: RawConfig = serde_path_to_error::deserialize(root).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            ConfigError(e.into_inner().to_string())
        } else {
            ConfigError(format!("at `{path}`: {}", e.into_inner()))
        }
    })?;
    validate(raw)
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        err(format!("`{key}` must be positive and finite, got {v}"))
    }
}

fn validate(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    let system = match raw.system {
        System::Spin => {
            if raw.squid.is_some() {
                return err("`squid` is only valid with system \"squid\"");
            }
            let Some(omega) = raw.omega else {
                return err("missing required key `omega` for system \"spin\"");
            };
            if !(omega >= 0.0) || !omega.is_finite() {
                return err(format!("`omega` must be non-negative and finite, got {omega}"));
            }
            SystemConfig::Spin { omega }
        }
        System::Squid => {
            if raw.omega.is_some() {
                return err("`omega` is only valid with system \"spin\"");
            }
            SystemConfig::Squid(validate_squid(raw.squid.unwrap_or_default())?)
        }
    };

    let inequality = match raw.inequality.as_deref().unwrap_or("I").parse::<InequalityType>() {
        Ok(InequalityType::III) => {
            return err(format!("`inequality`: {}", temporal_bell::Error::UnsupportedInequality))
        }
        Ok(k) => k,
        Err(e) => return err(format!("`inequality`: {e}")),
    };
    let signs = match raw.signs.as_deref().unwrap_or("+--") {
        "all" => SignsSelection::All,
        s => SignsSelection::One(s.parse().map_err(|e| ConfigError(format!("`signs`: {e}")))?),
    };
    let bc_weighting = match raw.bc_weighting.as_deref().unwrap_or("joint") {
        "joint" => BcWeighting::Joint,
        "conditional" => BcWeighting::Conditional,
        other => return err(format!("`bc_weighting`: expected joint or conditional, got `{other}`")),
    };
    let n_time = raw.n_time.unwrap_or(DEFAULT_N_TIME);
    if n_time < 2 {
        return err(format!("`n_time` must be at least 2, got {n_time}"));
    }
    let n_xi = raw.n_xi.unwrap_or(DEFAULT_N_XI);
    if n_xi < 2 {
        return err(format!("`n_xi` must be at least 2, got {n_xi}"));
    }
    let xi_tolerance = positive("xi_tolerance", raw.xi_tolerance.unwrap_or(DEFAULT_XI_TOLERANCE))?;

    Ok(RunConfig {
        system,
        inequality,
        signs,
        bc_weighting,
        n_time,
        n_xi,
        xi_tolerance,
        output: raw.output,
        sidecar: raw.sidecar,
        format: raw.format.unwrap_or_default(),
    })
}

fn validate_squid(raw: RawSquid) -> Result<SquidConfig, ConfigError> {
    let require = |key: &str, v: Option<f64>| match v {
        Some(v) => positive(&format!("squid.{key}"), v),
        None => err(format!("missing required key `squid.{key}`")),
    };
    let (l, c, i_c) = (require("L", raw.l)?, require("C", raw.c)?, require("I_c", raw.i_c)?);
    let potential_form = match raw.potential_form.as_deref() {
        None => PotentialForm::default(),
        Some(s) => s.parse().map_err(|e| ConfigError(format!("`squid.potential_form`: {e}")))?,
    };
    let mut params = SquidParams::new(l, c, i_c).map_err(|e| ConfigError(e.to_string()))?.with_form(potential_form);
    params.flux_bias = raw.n.unwrap_or(0);

    let n_points = raw.n_points.unwrap_or(temporal_bell::squid::DEFAULT_GRID_POINTS);
    if n_points < 128 {
        return err(format!("`squid.n_points` must be at least 128, got {n_points}"));
    }
    let modes = raw.modes.unwrap_or(temporal_bell::squid::DEFAULT_MODES);
    if !(2..=32).contains(&modes) {
        return err(format!("`squid.modes` must lie in 2..=32, got {modes}"));
    }
    Ok(SquidConfig { params, n_points, modes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spin_config_gets_defaults() {
        let c = parse_config(Some(r#"{"system":"spin","omega":1.0}"#), &[]).unwrap();
        assert_eq!(c.system, SystemConfig::Spin { omega: 1.0 });
        assert_eq!((c.n_time, c.n_xi, c.xi_tolerance), (256, 200, 1e-3));
        assert_eq!(c.inequality, InequalityType::I);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn override_replaces_default() {
        let c = parse_config(Some(r#"{"system":"spin","omega":1.0,"n_time":512}"#), &[]).unwrap();
        assert_eq!(c.n_time, 512);
        let c = parse_config(None, &["system=spin".into(), "omega=2".into(), "signs=all".into()]).unwrap();
        assert_eq!(c.signs, SignsSelection::All);
        assert_eq!(c.system, SystemConfig::Spin { omega: 2.0 });
    }

    #[test]
    fn squid_without_parameters_names_first_key() {
        let e = parse_config(Some(r#"{"system":"squid"}"#), &[]).unwrap_err();
        assert!(e.0.contains("squid.L"), "{e}");
    }

    #[test]
    fn dotted_overrides_build_nested_objects() {
        let c = parse_config(
            Some(r#"{"system":"squid"}"#),
            &["squid.L=150e-12".into(), "squid.C=0.15e-12".into(), "squid.I_c=2.5e-6".into()],
        )
        .unwrap();
        let SystemConfig::Squid(s) = c.system else { panic!() };
        assert_eq!(s.params.critical_current, 2.5e-6);
        assert_eq!((s.n_points, s.modes), (2048, 16));
    }

    #[test]
    fn unknown_and_mistyped_keys_are_located() {
        let e = parse_config(Some(r#"{"system":"spin","omega":1.0,"colour":1}"#), &[]).unwrap_err();
        assert!(e.0.contains("colour"), "{e}");
        let e = parse_config(Some(r#"{"system":"spin","omega":1.0,"n_time":"many"}"#), &[]).unwrap_err();
        assert!(e.0.contains("n_time"), "{e}");
        let e = parse_config(Some(r#"{"system":"squid","squid":{"L":1,"C":1,"I_c":1,"Lx":2}}"#), &[]).unwrap_err();
        assert!(e.0.contains("squid") && e.0.contains("Lx"), "{e}");
    }

    #[test]
    fn constraint_violations() {
        for bad in [
            r#"{"system":"spin"}"#,
            r#"{"system":"spin","omega":1.0,"n_time":1}"#,
            r#"{"system":"spin","omega":1.0,"n_xi":1}"#,
            r#"{"system":"spin","omega":1.0,"inequality":"III"}"#,
            r#"{"system":"spin","omega":1.0,"signs":"+-"}"#,
            r#"{"system":"spin","omega":1.0,"squid":{}}"#,
            r#"{"system":"qubit"}"#,
            r#"[1,2]"#,
        ] {
            assert!(parse_config(Some(bad), &[]).is_err(), "{bad}");
        }
        let e = parse_config(Some(r#"{"system":"spin","omega":1.0,"inequality":"III"}"#), &[]).unwrap_err();
        assert!(e.0.contains("definite state"));
    }

    #[test]
    fn malformed_override() {
        let mut v = serde_json::json!({"omega": 1.0});
        assert!(apply_override(&mut v, "omega").is_err());
        assert!(apply_override(&mut v, "omega.x=1").is_err());
        assert!(apply_override(&mut v, "a..b=1").is_err());
    }
}
