//! JSON configuration files.
//!
//! ```json
//! {
//!   "physical": { "rho": 1, "bulk": 1, "shear": 0.75, "alpha": 1,
//!                 "kappa": 1, "c_rho": 1, "theta0": 1, "l": 3.141592653589793 },
//!   "run": { "tau": 0.1, "horizon": 1, "n_modes": 32, "dt": 0.005, "dx": 0.0123 },
//!   "data": {
//!     "initial": { "kind": "preset", "name": "single_mode", "n": 1, "amplitude": [1, 1, 1] },
//!     "forcing": { "kind": "modal", "coefficients": [[0, 0, 0], [0.5, 0, 0]] }
//!   }
//! }
//! ```
//!
//! Every key is optional. A missing prehistory is the constant extension of
//! the initial data. A top-level `manifest` object is ignored, so a run
//! manifest can be fed back as a configuration.

use serde_json::{json, Map, Value};

use crate::model::{
    validate_problem, Grids, PhysicalParameters, ProblemSpec, SpatialData, TemporalData,
};
use crate::{Error, Result};

pub const DEFAULT_TAU: f64 = 0.1;
pub const DEFAULT_HORIZON: f64 = 1.0;
pub const DEFAULT_N_MODES: usize = 32;
pub const DEFAULT_TAU_LIST: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

/// A data item as written in the configuration; constant in time.
#[derive(Debug, Clone, PartialEq)]
pub enum DataConfig {
    Zero,
    Modal(Vec<[f64; 3]>),
    SingleMode {
        n: usize,
        amplitude: [f64; 3],
    },
    /// `amplitude · exp(−((x − center)/width)²)` in one component (1, 2 or 3).
    GaussianBump {
        center: f64,
        width: f64,
        amplitude: f64,
        component: usize,
    },
}

impl DataConfig {
    pub fn to_spatial(&self) -> SpatialData {
        match self {
            DataConfig::Zero => SpatialData::Zero,
            DataConfig::Modal(c) => SpatialData::Modal(c.clone()),
            DataConfig::SingleMode { n, amplitude } => {
                let mut c = vec![[0.0; 3]; n + 1];
                c[*n] = *amplitude;
                SpatialData::Modal(c)
            }
            &DataConfig::GaussianBump {
                center,
                width,
                amplitude,
                component,
            } => SpatialData::evaluator(move |x| {
                let mut v = [0.0; 3];
                v[component - 1] = amplitude * (-((x - center) / width).powi(2)).exp();
                v
            }),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            DataConfig::Zero => json!({"kind": "preset", "name": "zero"}),
            DataConfig::Modal(c) => json!({"kind": "modal", "coefficients": c}),
            DataConfig::SingleMode { n, amplitude } => {
                json!({"kind": "preset", "name": "single_mode", "n": n, "amplitude": amplitude})
            }
            DataConfig::GaussianBump {
                center,
                width,
                amplitude,
                component,
            } => json!({
                "kind": "preset",
                "name": "gaussian_bump",
                "center": center,
                "width": width,
                "amplitude": amplitude,
                "component": component,
            }),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n_modes: Option<usize>,
    pub tau: Option<f64>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub dx: Option<f64>,
    pub tau_list: Option<Vec<f64>>,
}

/// Every setting after defaults and overrides, as echoed into the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub physical: PhysicalParameters,
    pub tau: f64,
    pub horizon: f64,
    pub n_modes: usize,
    pub dt: f64,
    pub dx: f64,
    pub tau_list: Vec<f64>,
    pub initial: DataConfig,
    pub prehistory: Option<DataConfig>,
    pub forcing: DataConfig,
}

impl ResolvedConfig {
    pub fn to_json(&self) -> Value {
        let physical: Map<String, Value> = self
            .physical
            .fields()
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        let mut data = Map::new();
        data.insert("initial".into(), self.initial.to_json());
        if let Some(p) = &self.prehistory {
            data.insert("prehistory".into(), p.to_json());
        }
        data.insert("forcing".into(), self.forcing.to_json());
        json!({
            "physical": physical,
            "run": {
                "tau": self.tau,
                "horizon": self.horizon,
                "n_modes": self.n_modes,
                "dt": self.dt,
                "dx": self.dx,
                "tau_list": self.tau_list,
            },
            "data": data,
        })
    }

    /// The validated problem described by this configuration.
    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let initial = self.initial.to_spatial();
        let prehistory = match &self.prehistory {
            Some(p) => TemporalData::Steady(p.to_spatial()),
            None => TemporalData::Steady(initial.clone()),
        };
        let spec = ProblemSpec::new(self.physical, self.tau, self.horizon, self.n_modes, initial)?
            .with_prehistory(prehistory)
            .with_forcing(TemporalData::Steady(self.forcing.to_spatial()))
            .with_grids(Grids {
                dt: self.dt,
                dx: self.dx,
            });
        validate_problem(spec)
    }
}

/// Parses and validates a configuration with no overrides.
pub fn parse_config(text: &str) -> Result<(ProblemSpec, ResolvedConfig)> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<(ProblemSpec, ResolvedConfig)> {
    let resolved = resolve(text, overrides)?;
    let spec = resolved.to_spec()?;
    Ok((spec, resolved))
}

/// Applies defaults and overrides without building the problem.
pub fn resolve(text: &str, overrides: &Overrides) -> Result<ResolvedConfig> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::ConfigSyntax {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    let root = object(&root, "")?;
    check_keys(root, "", &["physical", "run", "data", "manifest"])?;

    let mut physical = PhysicalParameters::unit();
    if let Some(p) = root.get("physical") {
        let p = object(p, "physical")?;
        check_keys(
            p,
            "physical",
            &["rho", "bulk", "shear", "alpha", "kappa", "c_rho", "theta0", "l"],
        )?;
        let slots: [(&str, &mut f64); 8] = [
            ("rho", &mut physical.rho),
            ("bulk", &mut physical.bulk),
            ("shear", &mut physical.shear),
            ("alpha", &mut physical.alpha),
            ("kappa", &mut physical.kappa),
            ("c_rho", &mut physical.c_rho),
            ("theta0", &mut physical.theta0),
            ("l", &mut physical.l),
        ];
        for (name, slot) in slots {
            if let Some(v) = p.get(name) {
                *slot = number(v, &format!("physical.{name}"))?;
            }
        }
    }

    let empty = Map::new();
    let run = match root.get("run") {
        Some(r) => object(r, "run")?,
        None => &empty,
    };
    check_keys(run, "run", &["tau", "horizon", "n_modes", "dt", "dx", "tau_list"])?;
    let opt_number = |key: &str| -> Result<Option<f64>> {
        run.get(key).map(|v| number(v, &format!("run.{key}"))).transpose()
    };
    let tau = overrides.tau.or(opt_number("tau")?).unwrap_or(DEFAULT_TAU);
    let horizon = overrides.horizon.or(opt_number("horizon")?).unwrap_or(DEFAULT_HORIZON);
    let n_modes = match (overrides.n_modes, run.get("n_modes")) {
        (Some(n), _) => n,
        (None, Some(v)) => integer(v, "run.n_modes")?,
        (None, None) => DEFAULT_N_MODES,
    };
    let defaults = Grids::default_for(tau, physical.l);
    let dt = overrides.dt.or(opt_number("dt")?).unwrap_or(defaults.dt);
    let dx = overrides.dx.or(opt_number("dx")?).unwrap_or(defaults.dx);
    let tau_list = match (&overrides.tau_list, run.get("tau_list")) {
        (Some(list), _) => list.clone(),
        (None, Some(v)) => number_array(v, "run.tau_list")?,
        (None, None) => DEFAULT_TAU_LIST.to_vec(),
    };

    let data = match root.get("data") {
        Some(d) => object(d, "data")?,
        None => &empty,
    };
    check_keys(data, "data", &["initial", "prehistory", "forcing"])?;
    let initial = match data.get("initial") {
        Some(v) => data_item(v, "data.initial")?,
        None => DataConfig::SingleMode {
            n: 1,
            amplitude: [1.0, 1.0, 1.0],
        },
    };
    let prehistory = data.get("prehistory").map(|v| data_item(v, "data.prehistory")).transpose()?;
    let forcing = match data.get("forcing") {
        Some(v) => data_item(v, "data.forcing")?,
        None => DataConfig::Zero,
    };

    Ok(ResolvedConfig {
        physical,
        tau,
        horizon,
        n_modes,
        dt,
        dx,
        tau_list,
        initial,
        prehistory,
        forcing,
    })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn check_keys(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::UnknownKey(join(path, k))),
        None => Ok(()),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| {
        let what = if path.is_empty() { "the document" } else { path };
        Error::Config(format!("{what} must be an object"))
    })
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::Config(format!("`{path}` must be a number")))
}

fn integer(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::Config(format!("`{path}` must be a non-negative integer")))
}

fn number_array(v: &Value, path: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Config(format!("`{path}` must be an array of numbers")))?;
    arr.iter().map(|x| number(x, path)).collect()
}

fn triple(v: &Value, path: &str) -> Result<[f64; 3]> {
    let arr = number_array(v, path)?;
    <[f64; 3]>::try_from(arr)
        .map_err(|_| Error::Config(format!("`{path}` must have exactly three entries")))
}

fn data_item(v: &Value, path: &str) -> Result<DataConfig> {
    let map = object(v, path)?;
    let field = |key: &str| -> Result<&Value> {
        map.get(key)
            .ok_or_else(|| Error::Config(format!("`{}` is required", join(path, key))))
    };
    let kind = field("kind")?
        .as_str()
        .ok_or_else(|| Error::Config(format!("`{path}.kind` must be a string")))?;
    match kind {
        "modal" => {
            check_keys(map, path, &["kind", "coefficients"])?;
            let key = join(path, "coefficients");
            let rows = field("coefficients")?
                .as_array()
                .ok_or_else(|| Error::Config(format!("`{key}` must be an array")))?;
            let coeffs = rows.iter().map(|r| triple(r, &key)).collect::<Result<Vec<_>>>()?;
            Ok(DataConfig::Modal(coeffs))
        }
        "preset" => {
            let name = field("name")?
                .as_str()
                .ok_or_else(|| Error::Config(format!("`{path}.name` must be a string")))?;
            match name {
                "zero" => {
                    check_keys(map, path, &["kind", "name"])?;
                    Ok(DataConfig::Zero)
                }
                "single_mode" => {
                    check_keys(map, path, &["kind", "name", "n", "amplitude"])?;
                    Ok(DataConfig::SingleMode {
                        n: integer(field("n")?, &join(path, "n"))?,
                        amplitude: triple(field("amplitude")?, &join(path, "amplitude"))?,
                    })
                }
                "gaussian_bump" => {
                    check_keys(
                        map,
                        path,
                        &["kind", "name", "center", "width", "amplitude", "component"],
                    )?;
                    let component = integer(field("component")?, &join(path, "component"))?;
                    if !(1..=3).contains(&component) {
                        return Err(Error::Config(format!("`{path}.component` must be 1, 2 or 3")));
                    }
                    let width = number(field("width")?, &join(path, "width"))?;
                    if !(width > 0.0) {
                        return Err(Error::NonPositive {
                            field: join(path, "width"),
                        });
                    }
                    Ok(DataConfig::GaussianBump {
                        center: number(field("center")?, &join(path, "center"))?,
                        width,
                        amplitude: number(field("amplitude")?, &join(path, "amplitude"))?,
                        component,
                    })
                }
                other => Err(Error::Config(format!("unknown preset `{other}` in `{path}`"))),
            }
        }
        other => Err(Error::Config(format!("unknown data kind `{other}` in `{path}`"))),
    }
}
