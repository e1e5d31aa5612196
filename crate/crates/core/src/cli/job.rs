//! Job files and effective options.

use serde::{Deserialize, Serialize};

use crate::geometry::{FormTuple, VectorField};
use crate::grid::GridSpec;
use crate::groebner::{Budget, Ideal};
use crate::ring::{parse_rational, Poly, Rational, Ring, TermOrder, Variable};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    RankLocus,
    RankCheck,
    TangencyOrder,
    Certificate,
    Solve,
    SolveParametric,
    Stability,
    HomotopyStep,
    Pipeline,
}

/// Every field except `command` is optional; each command reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub command: Command,
    /// Space variables; `x1..xn` when only `n` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forms: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primitives: Option<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_tilde: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specializations: Option<Vec<String>>,
    #[serde(default)]
    pub options: JobOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_retries: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_extra: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<TermOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_samples: Option<usize>,
    /// Degree bound of the direct solve tried before perturbing; 0 disables it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_degree: Option<u32>,
}

/// Options after defaults and command-line overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effective {
    pub seed: u64,
    pub degree_bound: u32,
    pub perturbation_degree: u32,
    pub max_retries: usize,
    pub max_rounds: usize,
    pub chain_steps: usize,
    pub field_extra: u32,
    pub max_pairs: usize,
    pub max_degree: u32,
    pub grid: String,
    pub order: TermOrder,
    pub epsilon: String,
    pub t_samples: usize,
    pub direct_degree: u32,
}

impl JobOptions {
    pub fn resolve(&self) -> Effective {
        let b = Budget::default();
        Effective {
            seed: self.seed.unwrap_or(0),
            degree_bound: self.degree_bound.unwrap_or(2),
            perturbation_degree: self.perturbation_degree.unwrap_or(2),
            max_retries: self.max_retries.unwrap_or(5),
            max_rounds: self.max_rounds.unwrap_or(4),
            chain_steps: self.chain_steps.unwrap_or(8),
            field_extra: self.field_extra.unwrap_or(4),
            max_pairs: self.max_pairs.unwrap_or(b.max_pairs),
            max_degree: self.max_degree.unwrap_or(b.max_degree),
            grid: self.grid.clone().unwrap_or_else(|| "0,1,9".into()),
            order: self.order.unwrap_or_default(),
            epsilon: self.epsilon.clone().unwrap_or_else(|| "1/10".into()),
            t_samples: self.t_samples.unwrap_or(9),
            direct_degree: self.direct_degree.unwrap_or(3),
        }
    }
}

impl Effective {
    pub fn budget(&self) -> Budget {
        Budget { max_pairs: self.max_pairs, max_degree: self.max_degree }
    }

    pub fn grid(&self, n: usize) -> Result<GridSpec, CliError> {
        GridSpec::parse_uniform(&self.grid, n).map_err(|e| CliError::Input(format!("grid: {e}")))
    }

    pub fn epsilon(&self) -> Result<Rational, CliError> {
        parse_rational(&self.epsilon).ok_or_else(|| CliError::Input(format!("epsilon: cannot parse `{}`", self.epsilon)))
    }
}

/// Parsed inputs over the job's ring.
pub struct Inputs<'a> {
    pub job: &'a Job,
    pub ring: Ring,
}

fn input<T, E: std::fmt::Display>(what: &str, r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Input(format!("{what}: {e}")))
}

impl<'a> Inputs<'a> {
    pub fn new(job: &'a Job, order: TermOrder) -> Result<Self, CliError> {
        let names: Vec<String> = match (&job.variables, job.n, &job.forms) {
            (Some(v), _, _) => v.clone(),
            (None, Some(n), _) => (1..=n).map(|i| format!("x{i}")).collect(),
            (None, None, Some(rows)) if !rows.is_empty() => (1..=rows[0].len()).map(|i| format!("x{i}")).collect(),
            _ => return Err(CliError::Input("the job must give `variables` or `n`".into())),
        };
        let mut vars: Vec<Variable> = names.into_iter().map(Variable::space).collect();
        vars.extend(job.parameters.iter().cloned().map(Variable::parameter));
        let ring = input("variables", Ring::new(vars, order))?;
        Ok(Self { job, ring })
    }

    pub fn poly(&self, what: &str, s: &str) -> Result<Poly, CliError> {
        input(&format!("{what} `{s}`"), self.ring.parse(s))
    }

    pub fn polys(&self, what: &str, v: &[String]) -> Result<Vec<Poly>, CliError> {
        v.iter().enumerate().map(|(i, s)| self.poly(&format!("{what}[{i}]"), s)).collect()
    }

    fn need<'b, T>(&self, what: &str, v: &'b Option<T>) -> Result<&'b T, CliError> {
        v.as_ref().ok_or_else(|| CliError::Input(format!("missing `{what}`")))
    }

    pub fn forms(&self) -> Result<FormTuple, CliError> {
        let rows = self.need("forms", &self.job.forms)?;
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, r)| self.polys(&format!("forms[{i}]"), r))
            .collect::<Result<Vec<_>, _>>()?;
        input("forms", FormTuple::new(&self.ring, rows))
    }

    pub fn ideal(&self) -> Result<Ideal, CliError> {
        let gens = self.polys("ideal", self.need("ideal", &self.job.ideal)?)?;
        input("ideal", Ideal::new(&self.ring, gens))
    }

    pub fn field(&self) -> Result<VectorField, CliError> {
        let comps = self.polys("field", self.need("field", &self.job.field)?)?;
        input("field", VectorField::new(&self.ring, comps))
    }

    pub fn g(&self) -> Result<Poly, CliError> {
        self.poly("g", self.need("g", &self.job.g)?)
    }

    pub fn function(&self) -> Result<Poly, CliError> {
        self.poly("function", self.need("function", &self.job.function)?)
    }

    pub fn k(&self, q: usize) -> Result<usize, CliError> {
        let k = *self.need("k", &self.job.k)?;
        if k >= q {
            return Err(CliError::Input(format!("k = {k} but there are {q} forms")));
        }
        Ok(k)
    }

    pub fn list(&self, what: &str, v: &Option<Vec<String>>) -> Result<Vec<Poly>, CliError> {
        self.polys(what, self.need(what, v)?)
    }

    pub fn primitives(&self) -> Result<Vec<Option<Poly>>, CliError> {
        let Some(p) = &self.job.primitives else { return Ok(Vec::new()) };
        p.iter()
            .enumerate()
            .map(|(i, s)| s.as_ref().map(|s| self.poly(&format!("primitives[{i}]"), s)).transpose())
            .collect()
    }
}
