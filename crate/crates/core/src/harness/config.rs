//! Flat `key = value` configuration of sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{config, io_at, Error, Result};
use crate::funcspaces::{ClassF, WeightKind};
use crate::initial_data::{BaseProfile, DataRecipe};
use crate::spectral::Grid;

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{line}'", no + 1)))?;
        let k = k.trim();
        if k.is_empty() {
            return config(format!("line {}: empty key", no + 1));
        }
        if map.insert(k.to_string(), v.trim().to_string()).is_some() {
            return config(format!("line {}: duplicate key '{k}'", no + 1));
        }
    }
    Ok(map)
}

/// `1+ln` style weight selectors: `log:<α>`, `power:<β>`, `loglog`.
pub fn parse_weight(s: &str) -> Result<ClassF> {
    let kind = match s.split_once(':') {
        Some(("log", a)) => WeightKind::OnePlusLogPow(parse_f64("weight", a)?),
        Some(("power", b)) => WeightKind::Power(parse_f64("weight", b)?),
        None if s == "loglog" => WeightKind::OnePlusLogLogTimesLog,
        None if s == "log" => WeightKind::OnePlusLogPow(1.0),
        _ => return config(format!("unknown weight '{s}' (expected log:<a>, power:<b> or loglog)")),
    };
    Ok(ClassF::verified(kind))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim().parse::<f64>().map_err(|_| Error::Config(format!("{key}: '{v}' is not a number")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_f64(key, x)).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parameters of an ε-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Strictly decreasing Mach numbers.
    pub epsilons: Vec<f64>,
    pub n: usize,
    pub box_length: f64,
    pub t_final: f64,
    pub sample_dt: f64,
    pub s: f64,
    pub alpha: f64,
    pub p: f64,
    /// Exponents of the `L^q` convergence table, each `≥ p`.
    pub q: Vec<f64>,
    /// `W^{1,r}` exponent; `2p/(2 − p)` when `None`.
    pub r: Option<f64>,
    /// Weight selector, see [`parse_weight`].
    pub weight: String,
    pub profile: String,
    pub k: Option<u32>,
    pub cutoff_radius: f64,
    pub budget: f64,
    pub sound_amplitude: f64,
    pub compressible_amplitude: f64,
    pub gamma_bar: f64,
    pub seed: u64,
    /// Accuracy cap `dt ≤ factor·ε`; 0 disables it.
    pub dt_mach_factor: f64,
    pub dt_safety: f64,
    pub dt_max: f64,
    pub blowup_threshold: f64,
    /// Data-dependent constant `C₀` of the lifespan bound.
    pub lifespan_c0: f64,
    /// Constant `C` inside `F(e^{Cy})` of the Osgood functional.
    pub osgood_c: f64,
    pub out_dir: PathBuf,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let r = DataRecipe::default();
        Self {
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            n: 128,
            box_length: 8.0 * std::f64::consts::PI,
            t_final: 0.5,
            sample_dt: 0.1,
            s: r.s,
            alpha: r.alpha,
            p: 1.5,
            q: vec![1.5, 2.0, 4.0],
            r: None,
            weight: "log:1".into(),
            profile: r.profile.name().into(),
            k: None,
            cutoff_radius: r.cutoff_radius,
            budget: r.budget,
            sound_amplitude: r.sound_amplitude,
            compressible_amplitude: r.compressible_amplitude,
            gamma_bar: r.gamma_bar,
            seed: r.seed,
            dt_mach_factor: 0.5,
            dt_safety: 0.5,
            dt_max: 0.05,
            blowup_threshold: crate::compressible::BLOWUP_THRESHOLD,
            lifespan_c0: 1.0,
            osgood_c: 1.0,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl SweepConfig {
    /// Applies the keys of a parsed file over the defaults. Unknown keys are errors.
    /// `epsilon`, `L`, `T` and `data_recipe` are accepted as aliases of
    /// `epsilons`, `box_length`, `t_final` and `profile`.
    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut c = Self::default();
        let mut seen = std::collections::BTreeSet::new();
        for (k, v) in map {
            let f = || parse_f64(k, v);
            let canonical = match k.as_str() {
                "epsilon" => "epsilons",
                "L" => "box_length",
                "T" => "t_final",
                "data_recipe" => "profile",
                other => other,
            };
            if !seen.insert(canonical) {
                return config(format!("key '{k}' duplicates '{canonical}'"));
            }
            match canonical {
                "epsilons" => c.epsilons = parse_list(k, v)?,
                "n" => c.n = v.parse().map_err(|_| Error::Config(format!("n: '{v}' is not an integer")))?,
                "box_length" => c.box_length = f()?,
                "t_final" => c.t_final = f()?,
                "sample_dt" => c.sample_dt = f()?,
                "s" => c.s = f()?,
                "alpha" => c.alpha = f()?,
                "p" => c.p = f()?,
                "q" => c.q = parse_list(k, v)?,
                "r" => c.r = if v == "auto" { None } else { Some(f()?) },
                "weight" => c.weight = v.clone(),
                "profile" => c.profile = v.clone(),
                "k" => {
                    c.k = if v == "auto" {
                        None
                    } else {
                        Some(v.parse().map_err(|_| Error::Config(format!("k: '{v}' is not an integer")))?)
                    }
                }
                "cutoff_radius" => c.cutoff_radius = f()?,
                "budget" => c.budget = f()?,
                "sound_amplitude" => c.sound_amplitude = f()?,
                "compressible_amplitude" => c.compressible_amplitude = f()?,
                "gamma_bar" => c.gamma_bar = f()?,
                "seed" => c.seed = v.parse().map_err(|_| Error::Config(format!("seed: '{v}' is not an integer")))?,
                "dt_mach_factor" => c.dt_mach_factor = f()?,
                "dt_safety" => c.dt_safety = f()?,
                "dt_max" => c.dt_max = f()?,
                "blowup_threshold" => c.blowup_threshold = f()?,
                "lifespan_c0" => c.lifespan_c0 = f()?,
                "osgood_c" => c.osgood_c = f()?,
                "out_dir" => c.out_dir = PathBuf::from(v),
                other => return config(format!("unknown configuration key '{other}'")),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_key_values(&parse_key_values(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_at(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return config("epsilons must not be empty");
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return config("every epsilon must lie in (0, 1)");
        }
        if self.epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return config("epsilons must be strictly decreasing");
        }
        if !(self.p > 1.0 && self.p < 2.0) {
            return config(format!("p must lie in (1, 2), got {}", self.p));
        }
        if self.q.iter().any(|&q| !(q >= self.p)) {
            return config(format!("every q must be at least p = {}", self.p));
        }
        if let Some(r) = self.r {
            if !(r >= self.r_lower()) {
                return config(format!("r must be at least 2p/(2 − p) = {}", self.r_lower()));
            }
        }
        if !(self.s > 0.0 && self.s < 1.0 && self.alpha > 0.0 && self.alpha < 1.0) {
            return config("s and alpha must lie in (0, 1)");
        }
        if !(self.t_final > 0.0 && self.sample_dt > 0.0 && self.sample_dt <= self.t_final) {
            return config("need 0 < sample_dt ≤ t_final");
        }
        if !(self.dt_mach_factor >= 0.0) {
            return config("dt_mach_factor must be nonnegative");
        }
        Grid::new(self.n, self.box_length)?;
        BaseProfile::parse(&self.profile)?;
        parse_weight(&self.weight)?;
        Ok(())
    }

    /// `2p/(2 − p)`.
    pub fn r_lower(&self) -> f64 {
        2.0 * self.p / (2.0 - self.p)
    }

    pub fn r_resolved(&self) -> f64 {
        self.r.unwrap_or_else(|| self.r_lower())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.box_length)
    }

    pub fn weight_fn(&self) -> Result<ClassF> {
        parse_weight(&self.weight)
    }

    /// Data recipe at `epsilon`.
    pub fn recipe(&self, epsilon: f64) -> Result<DataRecipe> {
        Ok(DataRecipe {
            profile: BaseProfile::parse(&self.profile)?,
            k: self.k,
            cutoff_radius: self.cutoff_radius,
            epsilon,
            s: self.s,
            alpha: self.alpha,
            budget: self.budget,
            sound_amplitude: self.sound_amplitude,
            compressible_amplitude: self.compressible_amplitude,
            gamma_bar: self.gamma_bar,
            seed: self.seed,
        })
    }

    /// Every key with its value, `r` and `k` resolved where possible.
    pub fn to_resolved_string(&self) -> String {
        let mut s = String::new();
        let k = match self.k {
            Some(k) => k.to_string(),
            None => self.recipe(self.epsilons[0]).and_then(|r| r.resolve_k()).map_or("auto".into(), |k| k.to_string()),
        };
        let lines: [(&str, String); 26] = [
            ("epsilons", join(&self.epsilons)),
            ("n", self.n.to_string()),
            ("box_length", self.box_length.to_string()),
            ("t_final", self.t_final.to_string()),
            ("sample_dt", self.sample_dt.to_string()),
            ("s", self.s.to_string()),
            ("alpha", self.alpha.to_string()),
            ("p", self.p.to_string()),
            ("q", join(&self.q)),
            ("r", self.r_resolved().to_string()),
            ("weight", self.weight.clone()),
            ("profile", self.profile.clone()),
            ("k", k),
            ("cutoff_radius", self.cutoff_radius.to_string()),
            ("budget", self.budget.to_string()),
            ("sound_amplitude", self.sound_amplitude.to_string()),
            ("compressible_amplitude", self.compressible_amplitude.to_string()),
            ("gamma_bar", self.gamma_bar.to_string()),
            ("seed", self.seed.to_string()),
            ("dt_mach_factor", self.dt_mach_factor.to_string()),
            ("dt_safety", self.dt_safety.to_string()),
            ("dt_max", self.dt_max.to_string()),
            ("blowup_threshold", self.blowup_threshold.to_string()),
            ("lifespan_c0", self.lifespan_c0.to_string()),
            ("osgood_c", self.osgood_c.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
        ];
        for (k, v) in lines {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
