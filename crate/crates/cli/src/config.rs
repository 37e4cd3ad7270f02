//! JSON run configurations, translated into the equivalent command line so that
//! `run` and the direct subcommands share one code path.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use crate::output::{read_json, CliError, CliResult};

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum RunCommand {
    Verify,
    Oscillator,
    Classical,
    Quantum,
    Search,
    Errata,
    Appendix,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum AppendixKind {
    Lie,
    IPair,
    Bunch,
    Isorep,
    Standard,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub pair: Option<PathBuf>,
    pub rep: Option<PathBuf>,
    /// `sl2`, `abelian:N` or a path.
    pub g: Option<String>,
    pub bunch: Option<PathBuf>,
    pub isorep: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub eps1: Value,
    pub eps2: Value,
    pub eps3: Value,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integrator {
    pub method: Option<String>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub stride: Option<usize>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub drift_tol: Option<f64>,
    pub audit_tol: Option<f64>,
    #[serde(default)]
    pub refine: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Search {
    pub d1: Option<usize>,
    pub d2: Option<usize>,
    pub sweep: Option<usize>,
    pub seeds: Option<usize>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub min_norm_sq: Option<f64>,
    pub min_generator_norm_sq: Option<f64>,
    pub hom: Option<[usize; 2]>,
    pub keep1: Option<Vec<usize>>,
    pub keep2: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: RunCommand,
    pub appendix: Option<AppendixKind>,
    #[serde(default)]
    pub inputs: Inputs,
    pub params: Option<Params>,
    pub state: Option<[f64; 6]>,
    pub integrator: Option<Integrator>,
    pub search: Option<Search>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn scalar_text(name: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        other => Err(CliError::Usage(format!("params.{name}: expected a number or string, found {other}"))),
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

struct Argv {
    args: Vec<String>,
    base: PathBuf,
}

impl Argv {
    fn flag(&mut self, name: &str, value: impl ToString) {
        self.args.push(format!("--{name}"));
        self.args.push(value.to_string());
    }

    fn opt(&mut self, name: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.flag(name, v);
        }
    }

    fn path(&self, p: &Path) -> String {
        self.base.join(p).display().to_string()
    }

    fn path_flag(&mut self, name: &str, p: &Option<PathBuf>) {
        if let Some(p) = p {
            let s = self.path(p);
            self.flag(name, s);
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }

    /// The argument vector (without program name) equivalent to this configuration,
    /// with relative paths taken from `base`.
    pub fn to_argv(&self, base: &Path) -> CliResult<Vec<String>> {
        let mut a = Argv { args: Vec::new(), base: base.to_path_buf() };
        let sub = match self.command {
            RunCommand::Verify => "verify",
            RunCommand::Oscillator => "oscillator",
            RunCommand::Classical => "classical",
            RunCommand::Quantum => "quantum",
            RunCommand::Search => "search",
            RunCommand::Errata => "errata",
            RunCommand::Appendix => "appendix",
        };
        a.args.push(sub.into());
        if self.command != RunCommand::Appendix && self.appendix.is_some() {
            return Err(CliError::Usage("config: 'appendix' applies only to command 'appendix'".into()));
        }
        match self.command {
            RunCommand::Verify => {
                let pair = self.inputs.pair.as_ref().ok_or_else(|| CliError::Usage("config: verify needs inputs.pair".into()))?;
                let p = a.path(pair);
                a.args.push(p);
            }
            RunCommand::Quantum => {
                if self.inputs.rep.is_none() {
                    return Err(CliError::Usage("config: quantum needs inputs.rep".into()));
                }
                a.path_flag("rep", &self.inputs.rep);
            }
            RunCommand::Search => a.path_flag("pair", &self.inputs.pair),
            RunCommand::Appendix => {
                let kind = self.appendix.ok_or_else(|| CliError::Usage("config: appendix needs 'appendix'".into()))?;
                a.args.push(
                    match kind {
                        AppendixKind::Lie => "lie",
                        AppendixKind::IPair => "i-pair",
                        AppendixKind::Bunch => "bunch",
                        AppendixKind::Isorep => "isorep",
                        AppendixKind::Standard => "standard",
                    }
                    .into(),
                );
                if let Some(g) = &self.inputs.g {
                    let g = if g == "sl2" || g.starts_with("abelian:") { g.clone() } else { a.path(Path::new(g)) };
                    a.flag("g", g);
                }
                a.path_flag("bunch", &self.inputs.bunch);
                a.path_flag("isorep", &self.inputs.isorep);
            }
            _ => {}
        }
        if let Some(p) = &self.params {
            a.flag("eps1", scalar_text("eps1", &p.eps1)?);
            a.flag("eps2", scalar_text("eps2", &p.eps2)?);
            a.flag("eps3", scalar_text("eps3", &p.eps3)?);
        }
        if let Some(s) = &self.state {
            a.flag("state", join(s));
        }
        if let Some(i) = &self.integrator {
            a.opt("method", i.method.as_ref());
            a.opt("dt", i.dt);
            a.opt("t-end", i.t_end);
            a.opt("stride", i.stride);
            a.opt("abs-tol", i.abs_tol);
            a.opt("rel-tol", i.rel_tol);
            a.opt("drift-tol", i.drift_tol);
            a.opt("audit-tol", i.audit_tol);
            if i.refine {
                a.args.push("--refine".into());
            }
        }
        if let Some(s) = &self.search {
            a.opt("d1", s.d1);
            a.opt("d2", s.d2);
            a.opt("sweep", s.sweep);
            a.opt("seeds", s.seeds);
            a.opt("max-iters", s.max_iters);
            a.opt("tol", s.tol);
            a.opt("min-norm-sq", s.min_norm_sq);
            a.opt("min-generator-norm-sq", s.min_generator_norm_sq);
            a.opt("hom", s.hom.map(|h| join(&h)));
            a.opt("keep1", s.keep1.as_ref().map(|k| join(k)));
            a.opt("keep2", s.keep2.as_ref().map(|k| join(k)));
        }
        a.opt("base-seed", self.seed);
        if let Some(out) = &self.output {
            let o = a.path(out);
            a.flag("out", o);
        }
        Ok(a.args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_translates_to_flags() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"command": "classical", "params": {"eps1": 1, "eps2": "3", "eps3": 3},
                "state": [1, 0, 1, 0, 1, 1], "integrator": {"dt": 0.001, "t_end": 2}, "output": "out"}"#,
        )
        .unwrap();
        let argv = cfg.to_argv(Path::new("/cfg")).unwrap();
        assert_eq!(argv[0], "classical");
        assert!(argv.windows(2).any(|w| w == ["--state", "1,0,1,0,1,1"]));
        assert!(argv.windows(2).any(|w| w == ["--out", "/cfg/out"]));
        assert!(argv.windows(2).any(|w| w == ["--dt", "0.001"]));
    }

    #[test]
    fn unknown_keys_and_missing_inputs_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"command": "errata", "colour": 1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"command": "errata", "integrator": {"order": 4}}"#).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"command": "verify"}"#).unwrap();
        assert!(cfg.to_argv(Path::new(".")).is_err());
    }

    #[test]
    fn named_lie_algebras_are_not_treated_as_paths() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"command": "appendix", "appendix": "standard", "inputs": {"g": "sl2"}}"#).unwrap();
        assert_eq!(cfg.to_argv(Path::new("/x")).unwrap(), ["appendix", "standard", "--g", "sl2"]);
    }
}
