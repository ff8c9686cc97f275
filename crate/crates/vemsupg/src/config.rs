//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": { "kind": "problem1", "alpha": 1e-7 },
//!   "family": ["m1", "m2", "m4"],
//!   "k": [1, 2, 3],
//!   "n": 5,
//!   "refinements": 4,
//!   "output": { "csv": "rates.csv" }
//! }
//! ```
//!
//! Unknown fields are rejected and every error names the offending field.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;
use vemsupg_core::analysis::{LayerProblem, MonomialProblem, Problem, Problem1};
use vemsupg_core::assembly::{FormOptions, FunctionProjection};
use vemsupg_core::geometry::Point2;
use vemsupg_core::mesh::MeshFamily;
use vemsupg_core::solver::{SolveMethod, SolveOptions};
use vemsupg_core::supg::{CoefficientField, ExactSolution, Tensor2};

use crate::expr::{Expr, Var};
use crate::pipeline::RunOptions;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    #[default]
    Km1,
    K,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Direct,
    Krylov,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: Method,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restart: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self {
            method: Method::Direct,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            restart: d.restart,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Table output: errors, rates, sweep or layer metrics.
    pub csv: Option<PathBuf>,
    /// Solution samples `x,y,u`.
    pub samples: Option<PathBuf>,
}

/// Diffusion as a scalar multiple of the identity or a full symmetric tensor.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DiffusionSpec {
    Scalar(String),
    Tensor([[String; 2]; 2]),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Problem1 {
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "yes")]
        reaction: bool,
    },
    Layer {
        #[serde(default = "default_layer_kappa")]
        kappa: f64,
        /// Flow angle in degrees.
        #[serde(default = "default_angle")]
        angle: f64,
        #[serde(default = "default_split")]
        split: f64,
    },
    Monomial {
        mu: u32,
        nu: u32,
        #[serde(default = "one")]
        kappa: f64,
        #[serde(default = "unit_beta")]
        beta: [f64; 2],
        #[serde(default = "one")]
        gamma: f64,
    },
    /// Coefficients given as expressions in `x` and `y`. Without `source`
    /// the forcing is derived from `exact`.
    Expressions {
        diffusion: DiffusionSpec,
        convection: [String; 2],
        #[serde(default = "zero_expr")]
        reaction: String,
        source: Option<String>,
        exact: Option<String>,
        dirichlet: Option<String>,
    },
}

fn default_alpha() -> f64 {
    Problem1::DEFAULT_ALPHA
}
fn default_layer_kappa() -> f64 {
    LayerProblem::default().kappa
}
fn default_angle() -> f64 {
    LayerProblem::default().angle.to_degrees()
}
fn default_split() -> f64 {
    LayerProblem::default().split
}
fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn unit_beta() -> [f64; 2] {
    [1.0, 1.0]
}
fn zero_expr() -> String {
    String::from("0")
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Defaults per command: Problem 1 for `solve` and `convergence`,
    /// Problem 1 without reaction for `sweep-alpha`, the layer problem for
    /// `layer`.
    #[serde(default)]
    pub problem: Option<ProblemSpec>,
    #[serde(default)]
    pub family: Option<OneOrMany<String>>,
    /// Mesh file; replaces `family` and `n` for `solve`.
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    /// Degrees; the default depends on the command.
    #[serde(default)]
    pub k: Option<OneOrMany<usize>>,
    /// Resolution; the coarsest one for `convergence`.
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of meshes in a convergence study.
    #[serde(default)]
    pub refinements: Option<usize>,
    #[serde(default = "default_c_tau")]
    pub c_tau: f64,
    #[serde(default)]
    pub function_projection: Projection,
    #[serde(default = "yes")]
    pub divergence_correction: bool,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Diffusion scalings for `sweep-alpha`.
    #[serde(default)]
    pub alphas: Option<Vec<f64>>,
    /// Samples per direction of the output grid.
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_c_tau() -> f64 {
    0.5
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            // unknown fields are reported by name, their parent is the path
            invalid(if path == "." { String::from("(root)") } else { path }, inner.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let ks = self.k.as_ref().map(OneOrMany::to_vec).unwrap_or_else(|| vec![1]);
        if ks.is_empty() {
            return Err(invalid("k", "at least one degree is required"));
        }
        if let Some(&k) = ks.iter().find(|&&k| !(1..=3).contains(&k)) {
            return Err(invalid("k", format!("degree must be 1, 2 or 3, got {k}")));
        }
        if self.refinements == Some(0) {
            return Err(invalid("refinements", "must be at least 1"));
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(invalid("n", format!("resolution must be at least 2, got {n}")));
            }
        }
        if !(self.c_tau > 0.0 && self.c_tau < 1.0) {
            return Err(invalid("c_tau", format!("must lie in (0, 1), got {}", self.c_tau)));
        }
        if !(self.solver.tolerance > 0.0) {
            return Err(invalid("solver.tolerance", "must be positive"));
        }
        if self.solver.max_iterations == 0 {
            return Err(invalid("solver.max_iterations", "must be positive"));
        }
        if self.solver.restart == 0 {
            return Err(invalid("solver.restart", "must be positive"));
        }
        if let Some(f) = &self.family {
            let names = f.to_vec();
            if names.is_empty() {
                return Err(invalid("family", "at least one mesh family is required"));
            }
            for name in names {
                name.parse::<MeshFamily>()
                    .map_err(|e| invalid("family", format!("{name:?}: {e}")))?;
            }
        }
        if self.family.is_some() && self.mesh.is_some() {
            return Err(invalid("mesh", "give either `mesh` or `family`, not both"));
        }
        if let Some(a) = &self.alphas {
            if a.is_empty() || a.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                return Err(invalid("alphas", "must be a non-empty list of positive numbers"));
            }
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(invalid("grid", "must be positive"));
            }
        }
        if let Some(p) = &self.problem {
            build_problem(p)?;
        }
        Ok(())
    }

    pub fn degrees(&self, default: &[usize]) -> Vec<usize> {
        self.k.as_ref().map_or_else(|| default.to_vec(), OneOrMany::to_vec)
    }

    pub fn families(&self, default: &[MeshFamily]) -> Vec<MeshFamily> {
        match &self.family {
            // names were checked by `validate`
            Some(f) => f.to_vec().iter().filter_map(|s| s.parse().ok()).collect(),
            None => default.to_vec(),
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            forms: FormOptions {
                function_projection: match self.function_projection {
                    Projection::Km1 => FunctionProjection::Km1,
                    Projection::K => FunctionProjection::K,
                },
                divergence_correction: self.divergence_correction,
                c_tau: self.c_tau,
            },
            solver: SolveOptions {
                method: match self.solver.method {
                    Method::Direct => SolveMethod::Direct,
                    Method::Krylov => SolveMethod::Krylov,
                },
                tolerance: self.solver.tolerance,
                max_iterations: self.solver.max_iterations,
                restart: self.solver.restart,
            },
        }
    }
}

/// A problem whose data are parsed expressions.
#[derive(Clone, Debug)]
pub struct ExprProblem {
    k: [[Expr; 2]; 2],
    /// `dk[a][i][j] = d_a K_ij`.
    dk: [[[Expr; 2]; 2]; 2],
    beta: [Expr; 2],
    div_beta: Expr,
    gamma: Expr,
    source: Option<Expr>,
    dirichlet: Expr,
    exact: Option<ExactExpr>,
}

#[derive(Clone, Debug)]
struct ExactExpr {
    u: Expr,
    grad: [Expr; 2],
    /// `[u_xx, u_xy, u_yy]`.
    hess: [Expr; 3],
}

impl ExactSolution for ExactExpr {
    fn value(&self, p: Point2) -> f64 {
        self.u.eval(p.x, p.y)
    }

    fn gradient(&self, p: Point2) -> [f64; 2] {
        [self.grad[0].eval(p.x, p.y), self.grad[1].eval(p.x, p.y)]
    }
}

fn parse_expr(field: &str, s: &str) -> Result<Expr, ConfigError> {
    s.parse::<Expr>().map_err(|e| invalid(field, e.to_string()))
}

impl ExprProblem {
    fn new(
        diffusion: &DiffusionSpec,
        convection: &[String; 2],
        reaction: &str,
        source: Option<&str>,
        exact: Option<&str>,
        dirichlet: Option<&str>,
    ) -> Result<Self, ConfigError> {
        let f = "problem.diffusion";
        let k = match diffusion {
            DiffusionSpec::Scalar(s) => {
                let e = parse_expr(f, s)?;
                [[e.clone(), Expr::Num(0.0)], [Expr::Num(0.0), e]]
            }
            DiffusionSpec::Tensor(t) => {
                let p = |i: usize, j: usize| parse_expr(&format!("{f}[{i}][{j}]"), &t[i][j]);
                [[p(0, 0)?, p(0, 1)?], [p(1, 0)?, p(1, 1)?]]
            }
        };
        let dk = [Var::X, Var::Y].map(|v| [[k[0][0].diff(v), k[0][1].diff(v)], [k[1][0].diff(v), k[1][1].diff(v)]]);
        let beta = [
            parse_expr("problem.convection[0]", &convection[0])?,
            parse_expr("problem.convection[1]", &convection[1])?,
        ];
        let div_beta = Expr::Add(Box::new(beta[0].diff(Var::X)), Box::new(beta[1].diff(Var::Y)));
        let gamma = parse_expr("problem.reaction", reaction)?;
        let source = source.map(|s| parse_expr("problem.source", s)).transpose()?;
        let exact = exact
            .map(|s| {
                let u = parse_expr("problem.exact", s)?;
                let grad = u.gradient();
                let hess = [grad[0].diff(Var::X), grad[0].diff(Var::Y), grad[1].diff(Var::Y)];
                Ok::<_, ConfigError>(ExactExpr { u, grad, hess })
            })
            .transpose()?;
        if source.is_none() && exact.is_none() {
            return Err(invalid("problem.source", "required when `exact` is not given"));
        }
        let dirichlet = match (dirichlet, &exact) {
            (Some(s), _) => parse_expr("problem.dirichlet", s)?,
            (None, Some(e)) => e.u.clone(),
            (None, None) => Expr::Num(0.0),
        };
        Ok(Self {
            k,
            dk,
            beta,
            div_beta,
            gamma,
            source,
            dirichlet,
            exact,
        })
    }
}

fn eval_tensor(t: &[[Expr; 2]; 2], p: Point2) -> Tensor2 {
    [
        [t[0][0].eval(p.x, p.y), t[0][1].eval(p.x, p.y)],
        [t[1][0].eval(p.x, p.y), t[1][1].eval(p.x, p.y)],
    ]
}

impl CoefficientField for ExprProblem {
    fn diffusion(&self, p: Point2) -> Tensor2 {
        eval_tensor(&self.k, p)
    }

    fn diffusion_gradient(&self, p: Point2) -> Option<[Tensor2; 2]> {
        Some([eval_tensor(&self.dk[0], p), eval_tensor(&self.dk[1], p)])
    }

    fn convection(&self, p: Point2) -> [f64; 2] {
        [self.beta[0].eval(p.x, p.y), self.beta[1].eval(p.x, p.y)]
    }

    fn convection_divergence(&self, p: Point2) -> Option<f64> {
        Some(self.div_beta.eval(p.x, p.y))
    }

    fn reaction(&self, p: Point2) -> f64 {
        self.gamma.eval(p.x, p.y)
    }

    fn source(&self, p: Point2) -> f64 {
        if let Some(f) = &self.source {
            return f.eval(p.x, p.y);
        }
        let Some(e) = &self.exact else { return 0.0 };
        let g = e.gradient(p);
        let h = e.hess.each_ref().map(|d| d.eval(p.x, p.y));
        let k = self.diffusion(p);
        let dk = [eval_tensor(&self.dk[0], p), eval_tensor(&self.dk[1], p)];
        let div = vemsupg_core::supg::div_flux(k, dk, g, [[h[0], h[1]], [h[1], h[2]]]);
        let b = self.convection(p);
        -div + b[0] * g[0] + b[1] * g[1] + self.reaction(p) * e.value(p)
    }
}

impl Problem for ExprProblem {
    fn name(&self) -> String {
        String::from("expressions")
    }

    fn dirichlet(&self, p: Point2) -> f64 {
        self.dirichlet.eval(p.x, p.y)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        self.exact.as_ref().map(|e| e as &dyn ExactSolution)
    }
}

pub fn build_problem(spec: &ProblemSpec) -> Result<Box<dyn Problem>, ConfigError> {
    Ok(match spec {
        ProblemSpec::Problem1 { alpha, reaction } => {
            if !(*alpha > 0.0) {
                return Err(invalid("problem.alpha", "must be positive"));
            }
            Box::new(Problem1 {
                alpha: *alpha,
                no_reaction: !reaction,
            })
        }
        ProblemSpec::Layer { kappa, angle, split } => {
            if !(*kappa > 0.0) {
                return Err(invalid("problem.kappa", "must be positive"));
            }
            if !(*split > 0.0 && *split < 1.0) {
                return Err(invalid("problem.split", "must lie in (0, 1)"));
            }
            Box::new(LayerProblem {
                kappa: *kappa,
                angle: angle.to_radians(),
                split: *split,
            })
        }
        ProblemSpec::Monomial {
            mu,
            nu,
            kappa,
            beta,
            gamma,
        } => {
            if !(*kappa > 0.0) {
                return Err(invalid("problem.kappa", "must be positive"));
            }
            if *gamma < 0.0 {
                return Err(invalid("problem.gamma", "must be non-negative"));
            }
            Box::new(MonomialProblem {
                mu: *mu,
                nu: *nu,
                kappa: *kappa,
                beta: *beta,
                gamma: *gamma,
            })
        }
        ProblemSpec::Expressions {
            diffusion,
            convection,
            reaction,
            source,
            exact,
            dirichlet,
        } => Box::new(ExprProblem::new(
            diffusion,
            convection,
            reaction,
            source.as_deref(),
            exact.as_deref(),
            dirichlet.as_deref(),
        )?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(text: &str) -> String {
        match RunConfig::from_json(text) {
            Err(ConfigError::Invalid { field, .. }) => field,
            other => panic!("expected an error, got {other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c.degrees(&[1, 2]), vec![1, 2]);
        assert_eq!(c.refinements, None);
        assert_eq!(c.c_tau, 0.5);
        assert!(c.divergence_correction);
        assert_eq!(c.run_options(), RunOptions::default());
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn full_config() {
        let c = RunConfig::from_json(
            r#"{"problem": {"kind": "problem1", "alpha": 1e-5, "reaction": false},
                "family": ["m1", "M4"], "k": [1, 3], "n": 10, "refinements": 3,
                "c_tau": 0.25, "function_projection": "k", "divergence_correction": false,
                "solver": {"method": "krylov", "tolerance": 1e-10},
                "output": {"csv": "a.csv", "samples": "b.csv"}}"#,
        )
        .unwrap();
        assert_eq!(c.families(&[]), vec![MeshFamily::M1, MeshFamily::M4]);
        assert_eq!(c.degrees(&[2]), vec![1, 3]);
        assert_eq!(c.refinements, Some(3));
        let o = c.run_options();
        assert_eq!(o.forms.function_projection, FunctionProjection::K);
        assert_eq!(o.solver.method, SolveMethod::Krylov);
        assert_eq!(o.solver.tolerance, 1e-10);
        assert_eq!(o.solver.restart, SolveOptions::default().restart);
        let p = build_problem(c.problem.as_ref().unwrap()).unwrap();
        assert_eq!(p.reaction(Point2::new(0.5, 0.5)), 0.0);
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(field_of(r#"{"k": 4}"#), "k");
        assert_eq!(field_of(r#"{"k": [1, 0]}"#), "k");
        assert_eq!(field_of(r#"{"refinements": 0}"#), "refinements");
        assert_eq!(field_of(r#"{"c_tau": 1.0}"#), "c_tau");
        assert_eq!(field_of(r#"{"c_tau": "big"}"#), "c_tau");
        assert_eq!(field_of(r#"{"n": 1}"#), "n");
        assert_eq!(field_of(r#"{"solver": {"tolerance": 0}}"#), "solver.tolerance");
        assert_eq!(field_of(r#"{"family": "m9"}"#), "family");
        assert_eq!(field_of(r#"{"alphas": [1e-4, -1]}"#), "alphas");
        assert_eq!(field_of(r#"{"problem": {"kind": "problem1", "alpha": 0}}"#), "problem.alpha");
        assert_eq!(
            field_of(r#"{"problem": {"kind": "expressions", "diffusion": "1", "convection": ["1", "q"], "source": "0"}}"#),
            "problem.convection[1]"
        );
        let e = RunConfig::from_json(r#"{"colour": 1}"#).unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let e = RunConfig::from_json(r#"{"solver": {"tol": 1}}"#).unwrap_err().to_string();
        assert!(e.contains("solver") && e.contains("tol"), "{e}");
        let e = RunConfig::from_json(r#"{"problem": {"kind": "problem1", "beta": 1}}"#).unwrap_err().to_string();
        assert!(e.contains("problem") && e.contains("beta"), "{e}");
    }

    #[test]
    fn expression_problem_matches_problem1() {
        let c = RunConfig::from_json(
            r#"{"problem": {"kind": "expressions",
                "diffusion": [["1e-3*(1 + x^2)", "1e-3*x*y"], ["1e-3*x*y", "1e-3*(1 + y^2)"]],
                "convection": ["cos(2*pi*x)", "sin(2*pi*y)"],
                "reaction": "exp(x + y)",
                "exact": "sin(2*pi*x)*sin(2*pi*y) + x^5 + y^5 + 1"}}"#,
        )
        .unwrap();
        let e = build_problem(c.problem.as_ref().unwrap()).unwrap();
        let r = Problem1::new(1e-3);
        for &(x, y) in &[(0.1, 0.2), (0.5, 0.9), (0.77, 0.33)] {
            let p = Point2::new(x, y);
            assert!((e.source(p) - r.source(p)).abs() < 1e-10 * (1.0 + r.source(p).abs()));
            assert!((e.dirichlet(p) - r.dirichlet(p)).abs() < 1e-14);
            let (ge, gr) = (e.exact().unwrap().gradient(p), r.gradient(p));
            assert!((ge[0] - gr[0]).abs() < 1e-12 && (ge[1] - gr[1]).abs() < 1e-12);
            assert!((e.convection_divergence(p).unwrap() - r.convection_divergence(p).unwrap()).abs() < 1e-12);
            let (de, dr) = (e.diffusion_gradient(p).unwrap(), r.diffusion_gradient(p).unwrap());
            for a in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((de[a][i][j] - dr[a][i][j]).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn expression_problem_requires_source_or_exact() {
        let text = r#"{"problem": {"kind": "expressions", "diffusion": "1", "convection": ["0", "0"]}}"#;
        assert_eq!(field_of(text), "problem.source");
        let text = r#"{"problem": {"kind": "expressions", "diffusion": "1", "convection": ["0", "0"], "source": "1"}}"#;
        let c = RunConfig::from_json(text).unwrap();
        let p = build_problem(c.problem.as_ref().unwrap()).unwrap();
        assert!(p.exact().is_none());
        assert_eq!(p.dirichlet(Point2::new(0.0, 0.3)), 0.0);
    }

    #[test]
    fn layer_defaults() {
        let c = RunConfig::from_json(r#"{"problem": {"kind": "layer"}}"#).unwrap();
        let p = build_problem(c.problem.as_ref().unwrap()).unwrap();
        let b = p.convection(Point2::new(0.5, 0.5));
        assert!((b[0] - b[1]).abs() < 1e-15);
        assert_eq!(p.diffusion(Point2::new(0.5, 0.5))[0][0], 1e-6);
    }
}
