//! Extrema of a form on the unit sphere of `C^n = R^{2n}`.
//!
//! Multi-start projected gradient descent with Armijo backtracking, followed
//! (for `n ≤ 3`) by a grid pass over the faces of the cube `[-1, 1]^{2n}`
//! projected onto the sphere. The grid value minus `L · r`, with
//! `L = 2m Σ|c_{αβ}|` and `r` the covering radius of the grid, is a
//! certified lower bound.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{CompiledForm, HermitianForm};
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Clone, Debug)]
pub struct SphereOptions {
    /// Relative tolerance on the optimum (scaled by `Σ|c|`).
    pub tolerance: f64,
    pub random_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Run the certified grid pass when `n ≤ 3`.
    pub certify: bool,
    /// Grid points per axis on each cube face; `None` picks a default by `n`.
    pub grid_per_axis: Option<usize>,
    pub execution: Execution,
}

impl Default for SphereOptions {
    fn default() -> Self {
        SphereOptions {
            tolerance: 1e-9,
            random_starts: 64,
            seed: 0x5eed_0001,
            max_iterations: 20_000,
            certify: true,
            grid_per_axis: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereExtremum {
    /// Best value found (attained at `point`).
    pub value: f64,
    #[serde(skip)]
    pub point: Vec<Complex64>,
    /// Certified bound on the other side of `value` (lower bound for a
    /// minimum, upper bound for a maximum), when the grid pass ran.
    pub certified_bound: Option<f64>,
    /// `|value - certified_bound|`, or `None` without a certificate.
    pub radius: Option<f64>,
    pub lipschitz: f64,
    pub converged: bool,
}

/// `λ(f) = min_{‖z‖=1} f`.
pub fn lambda_min(form: &HermitianForm, opts: &SphereOptions) -> Result<SphereExtremum> {
    if form.validate().is_err() {
        return Err(Error::InvalidArgument("form does not validate".into()));
    }
    Ok(minimize(&form.compile(), opts))
}

/// `Λ♯(f) = sup_{‖z‖=1} |f|`, from the minima of `f` and `-f`.
pub fn lambda_sharp(form: &HermitianForm, opts: &SphereOptions) -> Result<SphereExtremum> {
    let low = lambda_min(form, opts)?;
    let high = lambda_min(&form.neg(), opts)?;
    // sup |f| = max(-min f, -min(-f))
    let (value, point) = if -high.value >= -low.value {
        (-high.value, high.point)
    } else {
        (-low.value, low.point)
    };
    let certified_bound = match (low.certified_bound, high.certified_bound) {
        (Some(l), Some(h)) => Some((-l).max(-h)),
        _ => None,
    };
    Ok(SphereExtremum {
        value,
        point,
        radius: certified_bound.map(|b| (b - value).max(0.0)),
        certified_bound,
        lipschitz: low.lipschitz,
        converged: low.converged && high.converged,
    })
}

fn minimize(cf: &CompiledForm, opts: &SphereOptions) -> SphereExtremum {
    let n = cf.n();
    let lipschitz = cf.lipschitz();
    if cf.abs_sum() == 0.0 {
        let mut point = vec![Complex64::new(0.0, 0.0); n];
        point[0] = Complex64::new(1.0, 0.0);
        return SphereExtremum {
            value: 0.0,
            point,
            certified_bound: Some(0.0),
            radius: Some(0.0),
            lipschitz,
            converged: true,
        };
    }

    let starts = starting_points(n, opts.random_starts, opts.seed);
    let runs = opts.execution.map(&starts, |s| descend(cf, s, opts));
    let (mut value, mut point, mut converged) = pick_best(runs);

    let mut certified_bound = None;
    if opts.certify && n <= 3 {
        let per_axis = opts.grid_per_axis.unwrap_or(match n {
            1 => 4000,
            2 => 24,
            _ => 8,
        });
        let grid = grid_minimum(cf, per_axis, opts.execution);
        if grid.value < value {
            let refined = descend(cf, &grid.point, opts);
            if refined.0 < value {
                (value, point, converged) = refined;
            }
        }
        certified_bound = Some(grid.value.min(value) - lipschitz * grid.covering_radius);
    }

    SphereExtremum {
        value,
        point,
        radius: certified_bound.map(|b| (value - b).max(0.0)),
        certified_bound,
        lipschitz,
        converged,
    }
}

fn pick_best(runs: Vec<(f64, Vec<Complex64>, bool)>) -> (f64, Vec<Complex64>, bool) {
    // Ties resolve to the earliest start, so the result is order-stable.
    let mut best: Option<(f64, Vec<Complex64>, bool)> = None;
    for run in runs {
        match &best {
            Some(b) if b.0 <= run.0 => {}
            _ => best = Some(run),
        }
    }
    best.expect("at least one start")
}

fn starting_points(n: usize, random: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut starts = Vec::new();
    for i in 0..n {
        let mut e = vec![zero; n];
        e[i] = one;
        starts.push(e);
    }
    if n > 1 {
        starts.push(vec![one; n]);
        starts.push((0..n).map(|i| if i % 2 == 0 { one } else { -one }).collect());
        starts.push(
            (0..n)
                .map(|i| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * i as f64))
                .collect(),
        );
    }
    starts.extend(unit_sphere_samples(n, random, seed));
    starts.into_iter().map(|mut z| {
        normalize(&mut z);
        z
    }).collect()
}

/// `count` deterministic points uniformly distributed on the unit sphere.
pub fn unit_sphere_samples(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut z: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
                })
                .collect();
            normalize(&mut z);
            z
        })
        .collect()
}

fn normalize(z: &mut [Complex64]) {
    let norm = z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
    for w in z.iter_mut() {
        *w /= norm;
    }
}

/// Projected gradient descent from `start`. Returns (value, point, converged).
fn descend(cf: &CompiledForm, start: &[Complex64], opts: &SphereOptions) -> (f64, Vec<Complex64>, bool) {
    let scale = cf.abs_sum();
    let grad_tol = 1e-2 * opts.tolerance * scale;
    let mut z = start.to_vec();
    normalize(&mut z);
    let (mut value, mut g) = cf.value_and_dzbar(&z);
    let mut step = 1.0 / cf.lipschitz();
    let mut converged = false;

    for _ in 0..opts.max_iterations {
        // real gradient is 2g; remove the radial component
        let grad: Vec<Complex64> = g.iter().map(|gi| 2.0 * gi).collect();
        let radial: f64 = z.iter().zip(&grad).map(|(zi, gi)| (zi.conj() * gi).re).sum();
        let tangent: Vec<Complex64> = grad.iter().zip(&z).map(|(gi, zi)| gi - radial * zi).collect();
        let tnorm2: f64 = tangent.iter().map(|t| t.norm_sqr()).sum();
        if tnorm2.sqrt() <= grad_tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        while step > 1e-18 / scale.max(1e-300) {
            let mut trial: Vec<Complex64> = z.iter().zip(&tangent).map(|(zi, ti)| zi - step * ti).collect();
            normalize(&mut trial);
            let trial_value = cf.value_unchecked(&trial);
            if trial_value <= value - 1e-4 * step * tnorm2 {
                z = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no further decrease representable in double precision
            converged = tnorm2.sqrt() <= 1e3 * grad_tol;
            break;
        }
        let (v, gn) = cf.value_and_dzbar(&z);
        value = v;
        g = gn;
        step *= 2.0;
    }
    (value, z, converged)
}

struct GridMinimum {
    value: f64,
    point: Vec<Complex64>,
    covering_radius: f64,
}

/// Minimum over the radial projection of a regular grid on every face of
/// the cube `[-1, 1]^{2n}`.
fn grid_minimum(cf: &CompiledForm, per_axis: usize, exec: Execution) -> GridMinimum {
    let n = cf.n();
    let dim = 2 * n;
    let k = per_axis.max(1);
    let face_points = (k + 1).pow(dim as u32 - 1);
    let faces: Vec<(usize, f64)> = (0..dim).flat_map(|d| [(d, -1.0), (d, 1.0)]).collect();

    let best_per_face = exec.map(&faces, |&(d, sign)| {
        let mut coords = vec![0.0f64; dim];
        let mut best = (f64::INFINITY, Vec::new());
        for idx in 0..face_points {
            let mut rest = idx;
            for (axis, c) in coords.iter_mut().enumerate() {
                if axis == d {
                    *c = sign;
                } else {
                    *c = -1.0 + 2.0 * (rest % (k + 1)) as f64 / k as f64;
                    rest /= k + 1;
                }
            }
            let mut z: Vec<Complex64> = (0..n).map(|i| Complex64::new(coords[2 * i], coords[2 * i + 1])).collect();
            normalize(&mut z);
            let v = cf.value_unchecked(&z);
            if v < best.0 {
                best = (v, z);
            }
        }
        best
    });
    let (value, point) = best_per_face
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, b| if b.0 < acc.0 { b } else { acc });
    GridMinimum {
        value,
        point,
        covering_radius: ((dim - 1) as f64).sqrt() / k as f64,
    }
}
