use crate::error::{check_dim, Error, Result};
use crate::geometry::{Point, SimpleTerm};
use crate::linalg::Matrix;
use crate::problems::data::{
    edges_to_matrix, gen_gaussian_family, gen_graph, gen_svm, laplacian, load_dense_csv, load_libsvm,
    load_symmetric_matrix, load_vector,
};
use crate::problems::{
    estimate_constants, hinge_sum, holder_power, lp_term, ridge, scaled, specproj_term, CompositeProblem, SummandSpec,
};

use super::config::{ExperimentConfig, ProblemSpec};

const SIGMA_TOL: f64 = 1e-8;
const SIGMA_MAX_ITERS: usize = 200_000;

/// A problem plus what is known about it by construction.
#[derive(Debug)]
pub struct BuiltProblem {
    pub problem: CompositeProblem,
    pub x0: Point,
    /// A minimizer, when the construction plants one.
    pub x_star: Option<Vec<f64>>,
    /// `(μ, p)` of a Hölder growth condition the objective is known to satisfy.
    pub growth: Option<(f64, f64)>,
}

impl BuiltProblem {
    /// `ξ(x0, x*)`, when `x*` is known.
    pub fn xi0(&self) -> Option<f64> {
        let x_star = self.x_star.as_ref()?;
        self.problem.geometry().xi(&self.x0, x_star).ok()
    }
}

pub fn build_problem(cfg: &ExperimentConfig) -> Result<BuiltProblem> {
    let (mut problem, mut x_star, growth) = build_spec(&cfg.problem)?;
    let simple = cfg.simple.clone().unwrap_or_default();
    if simple != SimpleTerm::default() {
        // The planted optimum is only optimal without Ψ and Q.
        x_star = None;
        problem = problem.without_p_star();
        problem = problem.with_simple(simple)?;
    }
    if let Some(p) = cfg.p_star {
        problem = problem.with_p_star(p);
    }
    let x0 = match &cfg.x0 {
        Some(x) => {
            check_dim(problem.dim(), x.len())
                .map_err(|_| Error::config("x0", format!("expected {} entries, got {}", problem.dim(), x.len())))?;
            Point::new(x.clone())?
        }
        None => Point::zeros(problem.dim()),
    };
    if !problem.simple().contains(&x0) {
        return Err(Error::config("x0", "starting point is outside the feasible set"));
    }
    Ok(BuiltProblem {
        problem,
        x0,
        x_star,
        growth,
    })
}

type Built = (CompositeProblem, Option<Vec<f64>>, Option<(f64, f64)>);

fn build_spec(spec: &ProblemSpec) -> Result<Built> {
    match spec {
        ProblemSpec::Quadratic { center, scale } => {
            let f = holder_power(*scale, 1.0, center.len())?.centered(center.clone())?;
            let p = CompositeProblem::new(center.len()).with_summand(f)?.with_p_star(0.0);
            Ok((p, Some(center.clone()), Some((*scale, 2.0))))
        }
        ProblemSpec::Lp { matrix, rhs, p } => {
            let a = load_dense_csv(matrix)?;
            let b = load_vector(rhs)?;
            let spec = lp_spec(&a, &b, *p)?;
            let n = a.cols();
            let prob = CompositeProblem::new(n).with_summand_spec(lp_term(a, b, *p)?, spec)?;
            Ok((prob, None, None))
        }
        ProblemSpec::TwoTerm { m, n, c, seed } => {
            let mut family = gen_gaussian_family(*m, *n, 2, *seed);
            let second = family.pop().expect("two instances");
            let first = family.pop().expect("two instances");
            let x_star = first.x_star.clone();
            let smooth = estimate_constants(&first.a, &first.b, 2.0)?;
            let mut prob = CompositeProblem::new(*n).with_summand_spec(
                scaled(lp_term(first.a, first.b, 2.0)?.with_label("smooth"), 0.5)?,
                SummandSpec::new(smooth.m, 1.0, "smooth")?,
            )?;
            if *c > 0.0 {
                let lip = lp_spec(&second.a, &second.b, 1.0)?;
                prob = prob.with_summand_spec(
                    scaled(lp_term(second.a, second.b, 1.0)?.with_label("nonsmooth"), *c)?,
                    SummandSpec::new(c * lip.m, 0.0, "nonsmooth")?,
                )?;
            }
            Ok((prob.with_p_star(0.0), Some(x_star), None))
        }
        ProblemSpec::Svm {
            path,
            samples,
            dim,
            seed,
            lambda,
        } => {
            let data = match path {
                Some(p) => load_libsvm(p)?,
                None => gen_svm(
                    samples.expect("validated"),
                    dim.expect("validated"),
                    seed.expect("validated"),
                ),
            };
            let d = data.x.cols();
            let hinge_m = data.x.sigma_max(SIGMA_TOL, SIGMA_MAX_ITERS)? * (data.x.rows() as f64).sqrt();
            let prob = CompositeProblem::new(d)
                .with_summand_spec(hinge_sum(data.x, data.y)?, SummandSpec::new(hinge_m, 0.0, "hinge")?)?
                .with_summand(ridge(*lambda, d)?)?;
            Ok((prob, None, Some((*lambda, 2.0))))
        }
        ProblemSpec::Specproj {
            path,
            nodes,
            density,
            seed,
            alpha,
            laplacian: use_laplacian,
            y_bar,
        } => {
            let w = match path {
                Some(p) => load_symmetric_matrix(p)?,
                None => {
                    let nodes = nodes.expect("validated");
                    let edges = gen_graph(nodes, density.expect("validated"), seed.expect("validated"));
                    edges_to_matrix(nodes, &edges)?
                }
            };
            let l = if *use_laplacian { laplacian(&w) } else { w };
            let d = l.rows();
            let y_bar = y_bar.clone().unwrap_or_else(|| vec![1.0; d]);
            check_dim(d, y_bar.len())?;
            let (quad, penalty) = specproj_term(l, *alpha, y_bar)?;
            let prob = CompositeProblem::new(d).with_summand(quad)?.with_summand(penalty)?;
            Ok((prob, None, Some((1.0, 2.0))))
        }
        ProblemSpec::HolderSum { dim, terms } => {
            let mut prob = CompositeProblem::new(*dim);
            let mut centers = Vec::new();
            for t in terms {
                let c = t.center.clone().unwrap_or_else(|| vec![0.0; *dim]);
                check_dim(*dim, c.len())?;
                centers.push(c.clone());
                prob = prob.with_summand(holder_power(t.m, t.v, *dim)?.centered(c)?)?;
            }
            let shared = centers.windows(2).all(|w| w[0] == w[1]);
            if shared {
                Ok((prob.with_p_star(0.0), Some(centers[0].clone()), None))
            } else {
                Ok((prob, None, None))
            }
        }
    }
}

/// Safe Hölder data for the unscaled `‖Ax − b‖_p^p`.
fn lp_spec(a: &Matrix, b: &[f64], p: f64) -> Result<SummandSpec> {
    let s = estimate_constants(a, b, p)?;
    // At the endpoints the estimate is for the halved square and for the
    // Lipschitz constant; both need a factor 2 as Hölder data of the term.
    let m = if p == 1.0 || p == 2.0 { 2.0 * s.m } else { s.m };
    SummandSpec::new(m, p - 1.0, s.label)
}
