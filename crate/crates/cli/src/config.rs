//! Experiment configuration: a JSON document with the sections `family`,
//! `innovations`, `regime`, `set` and `experiment`, laid over the committed
//! defaults.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use maruin::model::{
    CoefficientFamily, CoefficientKind, HeavyProfile, InnovationLaw, InnovationModel,
    Normalization, RegimeSpec, RegimeTag, TargetSet,
};

use crate::CliError;

pub const DEFAULTS: &str = include_str!("../defaults.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    pub family: FamilyConfig,
    pub innovations: InnovationsConfig,
    pub regime: RegimeConfig,
    pub set: TargetSet,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyConfig {
    #[serde(flatten)]
    pub kind: CoefficientKind,
    #[serde(default)]
    pub normalized: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnovationsConfig {
    #[serde(flatten)]
    pub law: InnovationLaw,
    #[serde(default)]
    pub heavy: Option<HeavyProfile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    pub tag: RegimeTag,
    pub normalization: Normalization,
    #[serde(default)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub seed: u64,
    pub mu: Vec<f64>,
    #[serde(default)]
    pub lag: Option<u64>,
    pub segments: SegmentsConfig,
    pub ruin: RuinConfig,
    pub tables: TablesConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentsConfig {
    pub n_paths: usize,
    pub m_min: usize,
    pub m_max: usize,
    pub per_decade: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuinMethod {
    Auto,
    Plain,
    Tilted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuinConfig {
    pub u: Vec<f64>,
    pub n_paths: usize,
    pub horizon_multiplier: f64,
    pub method: RuinMethod,
}

/// A rational given as `"p/q"`, an integer or a decimal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rational {
    Text(String),
    Number(f64),
}

impl Rational {
    pub fn parse(&self) -> Result<Ratio<i64>, String> {
        match self {
            Rational::Text(s) => {
                let s = s.trim();
                match s.split_once('/') {
                    Some((p, q)) => {
                        let p: i64 = p
                            .trim()
                            .parse()
                            .map_err(|_| format!("bad numerator in {s:?}"))?;
                        let q: i64 = q
                            .trim()
                            .parse()
                            .map_err(|_| format!("bad denominator in {s:?}"))?;
                        if q == 0 {
                            return Err(format!("zero denominator in {s:?}"));
                        }
                        Ok(Ratio::new(p, q))
                    }
                    None => s
                        .parse::<f64>()
                        .map_err(|_| format!("not a number: {s:?}"))
                        .and_then(|x| Rational::Number(x).parse()),
                }
            }
            Rational::Number(x) => Ratio::approximate_float(*x)
                .ok_or_else(|| format!("cannot represent {x} as a ratio")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesConfig {
    pub alpha: Vec<Rational>,
    pub beta: Vec<Rational>,
    pub omega: Vec<Rational>,
}

/// Sections replaced as a whole by a user config; `regime` and
/// `experiment` are merged key by key.
const WHOLE_SECTIONS: [&str; 3] = ["family", "innovations", "set"];

fn merge(base: &mut Value, over: Value, depth: usize, key: &str) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) if !(depth == 1 && WHOLE_SECTIONS.contains(&key)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v, depth + 1, &k),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn unknown_key(given: &Value, parsed: &Value, path: String) -> Option<String> {
    let join = |k: &str| {
        if path.is_empty() {
            k.to_string()
        } else {
            format!("{path}.{k}")
        }
    };
    match (given, parsed) {
        (Value::Object(g), Value::Object(p)) => g.iter().find_map(|(k, v)| match p.get(k) {
            None => Some(join(k)),
            Some(pv) => unknown_key(v, pv, join(k)),
        }),
        (Value::Array(g), Value::Array(p)) => g
            .iter()
            .zip(p)
            .enumerate()
            .find_map(|(i, (a, b))| unknown_key(a, b, format!("{path}[{i}]"))),
        _ => None,
    }
}

impl Config {
    pub fn defaults() -> Self {
        Self::from_value(serde_json::from_str(DEFAULTS).expect("defaults parse"))
            .expect("defaults are valid")
    }

    /// Parse a user document laid over the defaults.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let over: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        if !over.is_object() {
            return Err(CliError::Config("the config must be a JSON object".into()));
        }
        let mut base: Value = serde_json::from_str(DEFAULTS).expect("defaults parse");
        merge(&mut base, over, 0, "");
        Self::from_value(base)
    }

    fn from_value(v: Value) -> Result<Self, CliError> {
        let cfg: Config = serde_path_to_error::deserialize(v.clone())
            .map_err(|e| CliError::Config(format!("key `{}`: {}", e.path(), e.inner())))?;
        // tagged and flattened sections swallow stray keys; whatever the
        // parsed config does not write back was not understood
        let back = serde_json::to_value(&cfg).expect("config serializes");
        if let Some(k) = unknown_key(&v, &back, String::new()) {
            return Err(CliError::Config(format!("unknown key `{k}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |k: &str, m: &str| Err(CliError::Config(format!("key `{k}`: {m}")));
        let e = &self.experiment;
        if e.segments.n_paths < 2 {
            return bad("experiment.segments.n_paths", "need at least 2 paths");
        }
        if e.segments.m_min < 2 || e.segments.m_max < e.segments.m_min {
            return bad("experiment.segments.m_max", "need 2 ≤ m_min ≤ m_max");
        }
        if e.segments.per_decade == 0 {
            return bad("experiment.segments.per_decade", "must be positive");
        }
        if e.ruin.u.is_empty() || e.ruin.u.iter().any(|u| !(*u > 0.0)) {
            return bad("experiment.ruin.u", "need positive values");
        }
        if e.ruin.n_paths == 0 {
            return bad("experiment.ruin.n_paths", "must be positive");
        }
        if !(e.ruin.horizon_multiplier >= 2.0) {
            return bad("experiment.ruin.horizon_multiplier", "must be at least 2");
        }
        if e.lag == Some(0) {
            return bad("experiment.lag", "must be at least 1");
        }
        for (k, list) in [
            ("alpha", &e.tables.alpha),
            ("beta", &e.tables.beta),
            ("omega", &e.tables.omega),
        ] {
            for r in list {
                if let Err(m) = r.parse() {
                    return bad(&format!("experiment.tables.{k}"), &m);
                }
            }
        }
        Ok(())
    }

    /// Core objects described by the config.
    pub fn build(&self) -> Result<Built, CliError> {
        let ctx =
            |k: &'static str| move |e: maruin::Error| CliError::Config(format!("key `{k}`: {e}"));
        let family = CoefficientFamily::new(self.family.kind.clone(), self.family.normalized)
            .map_err(ctx("family"))?;
        let mut model =
            InnovationModel::new(self.innovations.law.clone()).map_err(ctx("innovations"))?;
        if let Some(h) = &self.innovations.heavy {
            model = model
                .with_heavy_profile(h.clone())
                .map_err(ctx("innovations.heavy"))?;
        }
        let regime = RegimeSpec::new(
            self.regime.tag,
            self.regime.normalization,
            &family,
            self.regime.beta,
        )
        .map_err(ctx("regime"))?;
        let d = model.dim();
        if self.set.dim() != d {
            return Err(CliError::Config(format!(
                "key `set`: dimension {} differs from innovations ({d})",
                self.set.dim()
            )));
        }
        if self.experiment.mu.len() != d {
            return Err(CliError::Config(format!(
                "key `experiment.mu`: length {} differs from innovations ({d})",
                self.experiment.mu.len()
            )));
        }
        Ok(Built {
            family,
            model,
            regime,
            target: self.set.clone(),
            mu: self.experiment.mu.clone(),
        })
    }
}

#[derive(Debug)]
pub struct Built {
    pub family: CoefficientFamily,
    pub model: InnovationModel,
    pub regime: RegimeSpec,
    pub target: TargetSet,
    pub mu: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_build() {
        let c = Config::defaults();
        c.build().unwrap();
        assert_eq!(c.experiment.ruin.u.len(), 9);
    }

    #[test]
    fn overrides_merge() {
        let c =
            Config::from_json(r#"{"experiment": {"seed": 5, "ruin": {"n_paths": 10}}}"#).unwrap();
        assert_eq!(c.experiment.seed, 5);
        assert_eq!(c.experiment.ruin.n_paths, 10);
        assert_eq!(c.experiment.ruin.horizon_multiplier, 20.0);
        let c = Config::from_json(r#"{"family": {"kind": "geometric", "ratio": 0.5, "normalizer": 1, "normalized": true}}"#)
            .unwrap();
        c.build().unwrap();
    }

    #[test]
    fn errors_name_the_key() {
        let e = Config::from_json(r#"{"experiment": {"ruin": {"n_paths": "many"}}}"#).unwrap_err();
        assert!(e.to_string().contains("experiment.ruin.n_paths"), "{e}");
        let e = Config::from_json(r#"{"experiment": {"colour": 1}}"#).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let e = Config::from_json(
            r#"{"family": {"kind": "finite_lag", "lags": [[0, 1]], "extra": 2}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("family.extra"), "{e}");
        let e = Config::from_json(r#"{"experiment": {"ruin": {"horizon_multiplier": 1}}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("horizon_multiplier"), "{e}");
        let e = Config::from_json(r#"{"regime": {"tag": "S3"}}"#)
            .unwrap()
            .build()
            .unwrap_err();
        assert!(e.to_string().contains("regime"), "{e}");
    }

    #[test]
    fn rationals() {
        assert_eq!(
            Rational::Text("3/4".into()).parse().unwrap(),
            Ratio::new(3, 4)
        );
        assert_eq!(Rational::Number(0.6).parse().unwrap(), Ratio::new(3, 5));
        assert_eq!(
            Rational::Text("2".into()).parse().unwrap(),
            Ratio::from_integer(2)
        );
        assert!(Rational::Text("1/0".into()).parse().is_err());
    }
}
