//! Differential approximants.
//!
//! A series is matched by the power-series solution of a linear ODE with
//! polynomial coefficients, written in the z d/dz operator basis so the
//! origin stays a regular singular point. The fitted equation hands over
//! the singularity locations (roots of the top coefficient), the local
//! exponents (indicial balance at each simple root), and a linear
//! recurrence that extends the series past the known terms. Fitting is
//! exact rational linear algebra; floating point enters only for root
//! finding and when the recurrence is run forward.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::series::{HighPrec, SeriesSample};

/// Relative residual a reported root of the top polynomial must meet.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;
/// Below this relative derivative magnitude a root counts as multiple and
/// gets no exponent.
pub const MULTIPLE_ROOT_TOL: f64 = 1e-6;
/// A root this far inside the consensus radius marks its approximant
/// defective.
pub const DEFECT_RADIUS_MARGIN: f64 = 0.1;
/// Default z-score beyond which a radius estimate is discarded as an
/// outlier.
pub const DEFAULT_RADIUS_ZSCORE: f64 = 3.0;
/// Agreement-digit ceiling; spreads below working precision saturate here.
pub const AGREEMENT_DIGIT_CAP: u32 = 75;
/// Predicted terms agreeing to fewer digits than this are dropped before
/// ratio analysis.
pub const DEFAULT_AGREEMENT_FLOOR: u32 = 5;

#[derive(Debug, Error)]
pub enum DAError {
    #[error("invalid approximant shape: {0}")]
    BadConfig(String),
    #[error("configuration consumes {need} coefficients, only {have} available")]
    TooFewCoefficients { need: usize, have: usize },
    #[error("matching system is rank-deficient by {missing} rows")]
    RankDeficient { missing: usize },
    #[error("indicial polynomial vanishes at index {index}; the recurrence does not determine that term")]
    CannotAdvance { index: usize },
    #[error("no usable approximants out of {attempted}; prediction unavailable")]
    AllDefective { attempted: usize },
}

/// Shape of one approximant: polynomial degrees for each operator order
/// plus the degree of the inhomogeneous side (-1 for none).
///
/// A shape with degrees N_0..N_M and inhomogeneity K consumes exactly
/// K + sum(N_k + 1) leading series coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DAConfig {
    degrees: Vec<usize>,
    inhomogeneity: i64,
}

impl DAConfig {
    pub fn new(degrees: Vec<usize>, inhomogeneity: i64) -> Result<DAConfig, DAError> {
        if degrees.len() < 2 {
            return Err(DAError::BadConfig(
                "need at least a first-order operator".into(),
            ));
        }
        if *degrees.last().unwrap() == 0 {
            return Err(DAError::BadConfig(
                "top polynomial must have positive degree".into(),
            ));
        }
        if inhomogeneity < -1 {
            return Err(DAError::BadConfig(
                "inhomogeneity degree below -1".into(),
            ));
        }
        Ok(DAConfig {
            degrees,
            inhomogeneity,
        })
    }

    pub fn order(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Degree of the inhomogeneous polynomial, -1 when absent.
    pub fn inhomogeneity(&self) -> i64 {
        self.inhomogeneity
    }

    /// Series coefficients consumed by the fit.
    pub fn coefficients_used(&self) -> usize {
        let total: usize = self.degrees.iter().map(|d| d + 1).sum();
        (self.inhomogeneity + total as i64) as usize
    }

    /// Unknowns after pinning the top constant term to one.
    fn unknowns(&self) -> usize {
        self.degrees.iter().map(|d| d + 1).sum::<usize>() - 1
    }
}

/// Near-diagonal configurations of orders 1..3 whose coefficient budgets
/// sweep the last ten usable window sizes.
pub fn config_grid(available: usize) -> Vec<DAConfig> {
    config_grid_orders(available, &[1, 2, 3])
}

/// Same sweep restricted to the given operator orders.
pub fn config_grid_orders(available: usize, orders: &[usize]) -> Vec<DAConfig> {
    let lo = available.saturating_sub(10);
    let mut grid = Vec::new();
    for &m in orders {
        if m == 0 {
            continue;
        }
        for used in lo..=available {
            for k in [-1i64, 0, 2] {
                let budget = used as i64 - k;
                let polys = (m + 1) as i64;
                // Keep every polynomial at degree one or more.
                if budget < 2 * polys {
                    continue;
                }
                let base = (budget / polys - 1) as usize;
                let rem = (budget % polys) as usize;
                let mut degrees = vec![base; m + 1];
                for t in 0..rem {
                    degrees[m - t] += 1;
                }
                if let Ok(cfg) = DAConfig::new(degrees, k) {
                    debug_assert_eq!(cfg.coefficients_used(), used);
                    grid.push(cfg);
                }
            }
        }
    }
    grid
}

/// A fitted approximant. The polynomials are exact rationals with the top
/// constant term pinned to one, so the object regenerates the coefficients
/// it was fitted to without error.
#[derive(Clone, Debug)]
pub struct DiffApproximant {
    /// q[k] lists the coefficients of the k-th operator polynomial, low
    /// power first.
    q: Vec<Vec<BigRational>>,
    /// Inhomogeneous polynomial; empty means none.
    p: Vec<BigRational>,
    /// Input values at indices where the indicial polynomial vanishes;
    /// the recurrence cannot produce these, so they ride along.
    seeds: Vec<(usize, BigRational)>,
    used: usize,
    reduced_rank: bool,
}

impl DiffApproximant {
    pub fn order(&self) -> usize {
        self.q.len() - 1
    }

    /// Coefficients of the k-th operator polynomial, low power first.
    pub fn poly(&self, k: usize) -> &[BigRational] {
        &self.q[k]
    }

    /// Inhomogeneous polynomial, None when the fit was homogeneous.
    pub fn inhomogeneous_part(&self) -> Option<&[BigRational]> {
        if self.p.is_empty() {
            None
        } else {
            Some(&self.p)
        }
    }

    pub fn coefficients_used(&self) -> usize {
        self.used
    }

    /// True when the matching system was singular and a particular
    /// solution was chosen by zeroing the free directions.
    pub fn reduced_rank(&self) -> bool {
        self.reduced_rank
    }

    /// Indicial polynomial at integer argument m: sum of q_k0 * m^k. Its
    /// zeros are the series indices the recurrence cannot solve for.
    fn indicial(&self, m: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for (k, poly) in self.q.iter().enumerate() {
            acc += &poly[0] * BigRational::from_integer(ipow(m as i64, k));
        }
        acc
    }

    /// Right-hand side of the recurrence at index m, given everything
    /// below m: P_m - sum over j >= 1 of q_kj * (m-j)^k * c_{m-j}.
    fn recurrence_rhs(&self, m: usize, below: &[BigRational]) -> BigRational {
        let mut acc = if m < self.p.len() {
            self.p[m].clone()
        } else {
            BigRational::zero()
        };
        for (k, poly) in self.q.iter().enumerate() {
            for (j, qkj) in poly.iter().enumerate().skip(1) {
                if j > m || qkj.is_zero() {
                    continue;
                }
                let w = BigRational::from_integer(ipow((m - j) as i64, k));
                acc -= qkj * w * &below[m - j];
            }
        }
        acc
    }

    /// Run the recurrence from scratch. Indices with vanishing indicial
    /// polynomial come from the stored seeds; everything else is solved
    /// for. Exact: over the fitted range the result equals the input.
    pub fn regenerate(&self, n: usize) -> Result<Vec<BigRational>, DAError> {
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for m in 0..n {
            let a = self.indicial(m);
            if a.is_zero() {
                match self.seeds.iter().find(|(s, _)| *s == m) {
                    Some((_, v)) => out.push(v.clone()),
                    None => return Err(DAError::CannotAdvance { index: m }),
                }
            } else {
                let rhs = self.recurrence_rhs(m, &out);
                out.push(rhs / a);
            }
        }
        Ok(out)
    }

    /// Extend a known prefix by `count` recurrence steps. The prefix must
    /// cover the fitted range; arithmetic is high precision rather than
    /// exact because predicted terms are approximations anyway.
    pub fn advance(&self, history: &[HighPrec], count: usize) -> Result<Vec<HighPrec>, DAError> {
        if history.len() < self.used {
            return Err(DAError::TooFewCoefficients {
                need: self.used,
                have: history.len(),
            });
        }
        let qf: Vec<Vec<HighPrec>> = self
            .q
            .iter()
            .map(|poly| poly.iter().map(hp_rat).collect())
            .collect();
        let mut buf = history.to_vec();
        for _ in 0..count {
            let m = buf.len();
            let a = self.indicial(m);
            if a.is_zero() {
                return Err(DAError::CannotAdvance { index: m });
            }
            let mut acc = HighPrec::zero();
            for (k, poly) in qf.iter().enumerate() {
                for (j, qkj) in poly.iter().enumerate().skip(1) {
                    if j > m || qkj.is_zero() {
                        continue;
                    }
                    let w = HighPrec::from_u64((m - j) as u64).powi(k);
                    acc = acc - qkj * &w * &buf[m - j];
                }
            }
            buf.push(acc / hp_rat(&a));
        }
        Ok(buf[history.len()..].to_vec())
    }
}

/// Fit the matching system exactly. The system must have full rank; a
/// singular system is reported with its deficiency.
pub fn fit_da(coeffs: &[BigInt], cfg: &DAConfig) -> Result<DiffApproximant, DAError> {
    fit_inner(&rationalize(coeffs), cfg, false)
}

/// Like [`fit_da`] but a consistent singular system is resolved by zeroing
/// the free directions instead of failing. Any such particular solution
/// still reproduces the fitted coefficients exactly; the flag
/// [`DiffApproximant::reduced_rank`] records the choice. Prediction grids
/// use this form so that shapes larger than a series' minimal equation
/// stay usable.
pub fn fit_da_lenient(coeffs: &[BigInt], cfg: &DAConfig) -> Result<DiffApproximant, DAError> {
    fit_inner(&rationalize(coeffs), cfg, true)
}

/// [`fit_da`] for series with rational terms, e.g. a ratio sequence.
/// Each matching row is scaled by its denominators' lcm before the integer
/// elimination; row scaling leaves the solution set untouched, so the
/// approximant still reproduces the rational input exactly.
pub fn fit_da_rational(coeffs: &[BigRational], cfg: &DAConfig) -> Result<DiffApproximant, DAError> {
    fit_inner(coeffs, cfg, false)
}

/// Lenient form of [`fit_da_rational`]; see [`fit_da_lenient`].
pub fn fit_da_rational_lenient(
    coeffs: &[BigRational],
    cfg: &DAConfig,
) -> Result<DiffApproximant, DAError> {
    fit_inner(coeffs, cfg, true)
}

fn rationalize(coeffs: &[BigInt]) -> Vec<BigRational> {
    coeffs
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect()
}

fn fit_inner(
    coeffs: &[BigRational],
    cfg: &DAConfig,
    lenient: bool,
) -> Result<DiffApproximant, DAError> {
    let n_used = cfg.coefficients_used();
    if coeffs.len() < n_used {
        return Err(DAError::TooFewCoefficients {
            need: n_used,
            have: coeffs.len(),
        });
    }
    let order = cfg.order();
    let k_inh = cfg.inhomogeneity;
    let t = cfg.unknowns();

    // Unknown layout: (k, j) pairs in k-major order with the pinned
    // (order, 0) slot skipped.
    let mut vars: Vec<(usize, usize)> = Vec::with_capacity(t);
    for (k, &deg) in cfg.degrees.iter().enumerate() {
        for j in 0..=deg {
            if k == order && j == 0 {
                continue;
            }
            vars.push((k, j));
        }
    }
    debug_assert_eq!(vars.len(), t);

    // One row per matched power of z above the inhomogeneous range. The
    // pinned unknown contributes -m^order * c_m on the right. Rational
    // entries are cleared by the row's common denominator so the
    // elimination stays over the integers.
    let mut mat: Vec<Vec<BigInt>> = Vec::with_capacity(t);
    for row in 0..t {
        let m = (k_inh + 1) as usize + row;
        let mut r: Vec<BigRational> = Vec::with_capacity(t + 1);
        for &(k, j) in &vars {
            if j > m {
                r.push(BigRational::zero());
            } else {
                r.push(&coeffs[m - j] * BigRational::from_integer(ipow((m - j) as i64, k)));
            }
        }
        r.push(-(&coeffs[m] * BigRational::from_integer(ipow(m as i64, order))));
        let mut scale = BigInt::one();
        for e in &r {
            scale = scale.lcm(e.denom());
        }
        let scale = BigRational::from_integer(scale);
        mat.push(
            r.into_iter()
                .map(|e| {
                    let s = e * &scale;
                    debug_assert!(s.is_integer());
                    s.to_integer()
                })
                .collect(),
        );
    }

    let (solution, reduced_rank) = match solve_exact(mat) {
        Solve::Unique(x) => (x, false),
        Solve::Deficient { particular, missing } => {
            if !lenient {
                return Err(DAError::RankDeficient { missing });
            }
            match particular {
                Some(x) => (x, true),
                // Inconsistent: the pinned normalization admits no solution.
                None => return Err(DAError::RankDeficient { missing }),
            }
        }
    };

    let mut q: Vec<Vec<BigRational>> = cfg
        .degrees
        .iter()
        .map(|&d| vec![BigRational::zero(); d + 1])
        .collect();
    q[order][0] = BigRational::one();
    for (v, &(k, j)) in vars.iter().enumerate() {
        q[k][j] = solution[v].clone();
    }

    // The inhomogeneous coefficients are whatever the low rows evaluate to.
    let mut p: Vec<BigRational> = Vec::new();
    if k_inh >= 0 {
        for m in 0..=(k_inh as usize) {
            let mut acc = BigRational::zero();
            for (k, poly) in q.iter().enumerate() {
                for (j, qkj) in poly.iter().enumerate() {
                    if j > m || qkj.is_zero() {
                        continue;
                    }
                    let w = BigRational::from_integer(ipow((m - j) as i64, k));
                    acc += qkj * w * &coeffs[m - j];
                }
            }
            p.push(acc);
        }
    }

    let mut da = DiffApproximant {
        q,
        p,
        seeds: Vec::new(),
        used: n_used,
        reduced_rank,
    };
    for m in 0..n_used {
        if da.indicial(m).is_zero() {
            da.seeds.push((m, coeffs[m].clone()));
        }
    }
    Ok(da)
}

enum Solve {
    Unique(Vec<BigRational>),
    Deficient {
        particular: Option<Vec<BigRational>>,
        missing: usize,
    },
}

/// Fraction-free elimination with full pivoting over the integers, then
/// rational back-substitution. Free coordinates of a consistent singular
/// system are set to zero.
fn solve_exact(mut a: Vec<Vec<BigInt>>) -> Solve {
    let n = a.len();
    if n == 0 {
        return Solve::Unique(Vec::new());
    }
    debug_assert!(a.iter().all(|r| r.len() == n + 1));
    let mut colvar: Vec<usize> = (0..n).collect();
    let mut prev = BigInt::one();
    let mut rank = n;

    for step in 0..n {
        // Smallest nonzero entry keeps the fraction-free growth gentle.
        let mut pivot: Option<(usize, usize, u64)> = None;
        for i in step..n {
            for j in step..n {
                if a[i][j].is_zero() {
                    continue;
                }
                let bits = a[i][j].bits();
                if pivot.map_or(true, |(_, _, b)| bits < b) {
                    pivot = Some((i, j, bits));
                }
            }
        }
        let Some((pi, pj, _)) = pivot else {
            rank = step;
            break;
        };
        a.swap(step, pi);
        if pj != step {
            for row in a.iter_mut() {
                row.swap(step, pj);
            }
            colvar.swap(step, pj);
        }
        let lead = a[step].clone();
        for i in step + 1..n {
            let li = a[i][step].clone();
            for j in step + 1..=n {
                let num = &lead[step] * &a[i][j] - &li * &lead[j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][step] = BigInt::zero();
        }
        prev = lead[step].clone();
    }

    if rank < n {
        for row in a.iter().take(n).skip(rank) {
            if !row[n].is_zero() {
                return Solve::Deficient {
                    particular: None,
                    missing: n - rank,
                };
            }
        }
    }

    let mut x = vec![BigRational::zero(); n];
    for i in (0..rank).rev() {
        let mut acc = BigRational::from_integer(a[i][n].clone());
        for (j, xj) in x.iter().enumerate().take(n).skip(i + 1) {
            if a[i][j].is_zero() || xj.is_zero() {
                continue;
            }
            acc -= BigRational::from_integer(a[i][j].clone()) * xj;
        }
        x[i] = acc / BigRational::from_integer(a[i][i].clone());
    }
    let mut sol = vec![BigRational::zero(); n];
    for (c, xc) in x.into_iter().enumerate() {
        sol[colvar[c]] = xc;
    }
    if rank == n {
        Solve::Unique(sol)
    } else {
        Solve::Deficient {
            particular: Some(sol),
            missing: n - rank,
        }
    }
}

/// One root of the top polynomial. `gamma` is the local exponent of a
/// singular solution (1 - z/z0)^(-gamma); it is omitted when the root
/// looks multiple or its residual misses the contract.
#[derive(Clone, Debug)]
pub struct SingularityEstimate {
    pub z: Complex64,
    pub gamma: Option<Complex64>,
    /// Scale-free residual of the root in the float image of Q_M.
    pub residual: f64,
    /// Set for roots that fail the residual or simplicity checks, and by
    /// [`mark_defective`] for roots strictly inside the consensus radius.
    pub defective: bool,
}

/// Locate the roots of the top polynomial and read off the exponents.
///
/// At a simple root z0 the two highest operator terms balance, giving
/// gamma = 1 - M + Q_{M-1}(z0) / (z0 Q_M'(z0)) for a singular part
/// (1 - z/z0)^(-gamma). A pole of 1/(1-2z) therefore reports gamma = 1.
pub fn singularities(da: &DiffApproximant) -> Vec<SingularityEstimate> {
    let order = da.order();
    let mut top: Vec<f64> = da.q[order].iter().map(|c| hp_rat(c).to_f64()).collect();
    while top.len() > 1 && top.last() == Some(&0.0) {
        top.pop();
    }
    // Exact zeros were trimmed; a non-finite image of a huge rational is
    // unusable for root finding, so degrade by dropping it too.
    while top.len() > 1 && !top.last().unwrap().is_finite() {
        top.pop();
    }
    if top.len() <= 1 {
        return Vec::new();
    }
    let scale = top.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let scaled: Vec<f64> = top.iter().map(|c| c / scale).collect();
    let sub: Vec<f64> = da.q[order - 1].iter().map(|c| hp_rat(c).to_f64()).collect();
    let dtop = deriv(&scaled);

    let mut out: Vec<SingularityEstimate> = poly_roots(&scaled)
        .into_iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .map(|z| {
            let denom: f64 = scaled
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs() * z.norm().powi(j as i32))
                .sum();
            let residual = eval(&scaled, z).norm() / denom.max(f64::MIN_POSITIVE);
            let dscale: f64 = dtop
                .iter()
                .enumerate()
                .map(|(j, c)| c.abs() * z.norm().powi(j as i32))
                .sum::<f64>()
                .max(f64::MIN_POSITIVE);
            let dz = eval(&dtop, z);
            let simple = dz.norm() > MULTIPLE_ROOT_TOL * dscale;
            let ok = residual <= ROOT_RESIDUAL_TOL && simple;
            let gamma = if ok {
                // The derivative of the scaled polynomial differs from
                // Q_M' by the same factor scale, which cancels nowhere
                // here, so evaluate Q_M' unscaled.
                let dq = eval(&deriv(&top), z);
                Some(Complex64::new(1.0 - order as f64, 0.0) + eval(&sub, z) / (z * dq))
            } else {
                None
            };
            SingularityEstimate {
                z,
                gamma,
                residual,
                defective: !ok,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        (a.z.norm().total_cmp(&b.z.norm()))
            .then(a.z.re.total_cmp(&b.z.re))
            .then(a.z.im.total_cmp(&b.z.im))
    });
    out
}

/// Population verdict from [`mark_defective`].
#[derive(Clone, Debug)]
pub struct DefectVerdict {
    /// Per-approximant flag, aligned with the input order.
    pub defective: Vec<bool>,
    /// Median of the per-approximant closest-root radii.
    pub consensus_radius: Option<f64>,
    /// False when the population was too small to filter.
    pub filtered: bool,
}

/// Flag approximants carrying a root strictly inside the consensus radius
/// of convergence, then discard radius outliers beyond `zscore` standard
/// deviations. Fewer than three approximants: nothing is filtered.
pub fn mark_defective(estimates: &mut [Vec<SingularityEstimate>], zscore: f64) -> DefectVerdict {
    let n = estimates.len();
    let mut verdict = DefectVerdict {
        defective: vec![false; n],
        consensus_radius: None,
        filtered: false,
    };
    if n < 3 {
        return verdict;
    }
    let radii: Vec<Option<f64>> = estimates
        .iter()
        .map(|ests| {
            ests.iter()
                .map(|e| e.z.norm())
                .filter(|r| r.is_finite())
                .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))))
        })
        .collect();
    let mut known: Vec<f64> = radii.iter().flatten().copied().collect();
    if known.is_empty() {
        return verdict;
    }
    known.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let consensus = if known.len() % 2 == 1 {
        known[known.len() / 2]
    } else {
        0.5 * (known[known.len() / 2 - 1] + known[known.len() / 2])
    };
    verdict.consensus_radius = Some(consensus);
    verdict.filtered = true;

    let cutoff = (1.0 - DEFECT_RADIUS_MARGIN) * consensus;
    for (i, ests) in estimates.iter_mut().enumerate() {
        for e in ests.iter_mut() {
            if e.z.norm() < cutoff {
                e.defective = true;
                verdict.defective[i] = true;
            }
        }
    }

    // Secondary pass over the untouched approximants: a radius far from
    // the pack is distrusted even when it is not small.
    let survivors: Vec<(usize, f64)> = radii
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i, r)))
        .filter(|(i, _)| !verdict.defective[*i])
        .collect();
    if survivors.len() >= 3 {
        let mean: f64 = survivors.iter().map(|(_, r)| r).sum::<f64>() / survivors.len() as f64;
        let var: f64 = survivors.iter().map(|(_, r)| (r - mean).powi(2)).sum::<f64>()
            / (survivors.len() - 1) as f64;
        let std = var.sqrt();
        if std > 0.0 {
            for (i, r) in survivors {
                if (r - mean).abs() > zscore * std {
                    verdict.defective[i] = true;
                }
            }
        }
    }
    verdict
}

/// One predicted series coefficient, averaged over the surviving
/// approximants with outliers excluded.
#[derive(Clone, Debug)]
pub struct PredictedCoefficient {
    /// Position in the series, continuing the input indexing from zero.
    pub index: u32,
    pub value: HighPrec,
    /// Leading decimal digits on which the contributors agree.
    pub agreed_digits: u32,
    pub std_dev: HighPrec,
    /// Approximants left after outlier trimming.
    pub contributors: usize,
}

/// Fit every configuration in the grid, drop defective approximants, run
/// each survivor's recurrence forward, and average per index.
pub fn predict_coefficients(
    coeffs: &[BigInt],
    grid: &[DAConfig],
    count: usize,
) -> Result<Vec<PredictedCoefficient>, DAError> {
    predict_rational(&rationalize(coeffs), grid, count)
}

/// [`predict_coefficients`] over a rational series such as a ratio
/// sequence.
pub fn predict_rational(
    coeffs: &[BigRational],
    grid: &[DAConfig],
    count: usize,
) -> Result<Vec<PredictedCoefficient>, DAError> {
    if coeffs.len() < 10 {
        return Err(DAError::TooFewCoefficients {
            need: 10,
            have: coeffs.len(),
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let das = surviving_das(coeffs, grid)?;
    let history: Vec<HighPrec> = coeffs.iter().map(hp_rat).collect();
    let runs: Vec<Vec<HighPrec>> = das
        .par_iter()
        .map(|da| da.advance(&history, count).ok())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    aggregate_runs(&runs, count, coeffs.len() as u32, grid.len())
}

/// Grid-fit the series leniently and drop the defective approximants.
fn surviving_das(
    series: &[BigRational],
    grid: &[DAConfig],
) -> Result<Vec<DiffApproximant>, DAError> {
    let das: Vec<DiffApproximant> = grid
        .par_iter()
        .map(|cfg| fit_da_rational_lenient(series, cfg).ok())
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    if das.is_empty() {
        return Err(DAError::AllDefective {
            attempted: grid.len(),
        });
    }
    let mut sings: Vec<Vec<SingularityEstimate>> =
        das.par_iter().map(singularities).collect();
    let verdict = mark_defective(&mut sings, DEFAULT_RADIUS_ZSCORE);
    let kept: Vec<DiffApproximant> = das
        .into_iter()
        .zip(verdict.defective)
        .filter(|(_, bad)| !bad)
        .map(|(da, _)| da)
        .collect();
    if kept.is_empty() {
        return Err(DAError::AllDefective {
            attempted: grid.len(),
        });
    }
    Ok(kept)
}

/// Per-index consensus over the surviving recurrences: outliers trimmed,
/// the mean reported with the digit count the survivors agree to.
fn aggregate_runs(
    runs: &[Vec<HighPrec>],
    count: usize,
    index0: u32,
    attempted: usize,
) -> Result<Vec<PredictedCoefficient>, DAError> {
    if runs.is_empty() {
        return Err(DAError::AllDefective { attempted });
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let values: Vec<HighPrec> = runs
            .iter()
            .map(|r| r[i].clone())
            .filter(|v| v.is_finite())
            .collect();
        if values.is_empty() {
            return Err(DAError::AllDefective { attempted });
        }
        let kept = mad_trim(values);
        let mean = &kept.iter().fold(HighPrec::zero(), |a, v| a + v)
            / &HighPrec::from_u64(kept.len() as u64);
        let spread = kept
            .iter()
            .map(|v| (v - &mean).abs())
            .fold(HighPrec::zero(), HighPrec::max);
        let agreed_digits = agreement_digits(&mean, &spread, kept.len());
        let std_dev = if kept.len() >= 2 {
            let ss = kept
                .iter()
                .map(|v| {
                    let d = v - &mean;
                    &d * &d
                })
                .fold(HighPrec::zero(), |a, v| a + v);
            (ss / HighPrec::from_u64((kept.len() - 1) as u64)).sqrt()
        } else {
            HighPrec::zero()
        };
        out.push(PredictedCoefficient {
            index: index0 + i as u32,
            value: mean,
            agreed_digits,
            std_dev,
            contributors: kept.len(),
        });
    }
    Ok(out)
}

/// Keep values within three median absolute deviations of the median. The
/// tiny relative floor keeps identical-up-to-rounding populations intact
/// while still evicting a lone wild value.
fn mad_trim(mut values: Vec<HighPrec>) -> Vec<HighPrec> {
    if values.len() <= 2 {
        return values;
    }
    let med = median(&mut values.clone());
    let mut devs: Vec<HighPrec> = values.iter().map(|v| (v - &med).abs()).collect();
    let mad = median(&mut devs);
    let limit = &HighPrec::from_u64(3) * &mad + med.abs() * HighPrec::from_f64(1e-30);
    values.retain(|v| (v - &med).abs() <= limit);
    values
}

fn median(values: &mut [HighPrec]) -> HighPrec {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2].clone()
    } else {
        (&values[n / 2 - 1] + &values[n / 2]) / HighPrec::from_u64(2)
    }
}

fn agreement_digits(mean: &HighPrec, spread: &HighPrec, contributors: usize) -> u32 {
    if contributors < 2 {
        return 0;
    }
    if spread.is_zero() {
        return AGREEMENT_DIGIT_CAP;
    }
    if mean.is_zero() {
        return 0;
    }
    let rel = (spread / &mean.abs()).to_f64();
    if !(rel > 0.0) {
        return AGREEMENT_DIGIT_CAP;
    }
    let digits = -rel.log10();
    if digits <= 0.0 {
        0
    } else {
        (digits.floor() as u32).min(AGREEMENT_DIGIT_CAP)
    }
}

/// Knobs for [`extend_for_ratio_analysis`].
#[derive(Clone, Debug)]
pub struct ExtendOptions {
    /// Smallest agreement-digit count a predicted term may carry into the
    /// ratio toolkit.
    pub floor_digits: u32,
    /// Operator orders swept by the grid.
    pub orders: Vec<usize>,
    /// Growth constant of the dominant lambda^(L^2) factor, if one is
    /// known. When set, the series is deflated by deflate^(L^2) before
    /// fitting and the predictions are inflated back, giving the
    /// recurrence a plain power-law singularity to model. When absent the
    /// ratio sequence c_{n+1}/c_n is extended instead, which needs no
    /// external constant.
    pub deflate: Option<HighPrec>,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        ExtendOptions {
            floor_digits: DEFAULT_AGREEMENT_FLOOR,
            orders: vec![1, 2, 3],
            deflate: None,
        }
    }
}

/// Exact terms spliced with accepted predictions, ready for ratio work.
#[derive(Clone, Debug)]
pub struct ExtendedSeries {
    /// Exact input terms followed by the predictions that met the floor.
    pub sample: SeriesSample,
    /// Leading terms of `sample` that are exact.
    pub exact_len: usize,
    /// Every prediction, including the ones below the floor. Indices here
    /// are absolute, i.e. `start` plus the position in `sample`. Each
    /// entry's `agreed_digits` and `std_dev` grade the ratio step into
    /// that term (what ratio analysis consumes), not the absolute value,
    /// whose error compounds over the horizon.
    pub predictions: Vec<PredictedCoefficient>,
    /// Predictions that made it into `sample`.
    pub accepted: usize,
}

/// Predict `count` further terms and splice the trustworthy prefix onto
/// the exact series.
///
/// The sequences this feeds on grow like lambda^(L^2), which no fixed
/// linear recurrence can follow, so the recurrences run on a transformed
/// sequence with ordinary power-series growth: the ratio sequence
/// c_{n+1}/c_n by default, or the series deflated by a known
/// lambda^(L^2) when [`ExtendOptions::deflate`] supplies the constant.
///
/// Ratio analysis consumes term-to-term ratios, not absolute terms, and
/// within one recurrence the errors of neighbouring terms are strongly
/// correlated, so the ratios stay accurate long after the terms
/// themselves have drifted. The quoted `agreed_digits` therefore measure
/// the cross-approximant agreement of each step's ratio; the spliced
/// values are the running product of the consensus ratios, so the ratio
/// trail of `sample` is exactly the consensus. The first step falling
/// below `floor_digits` ends the splice; everything after it is reported
/// but not handed to analysis.
pub fn extend_for_ratio_analysis(
    coeffs: &[BigInt],
    start: u32,
    count: usize,
    opts: &ExtendOptions,
) -> Result<ExtendedSeries, DAError> {
    // Leading zero terms carry no growth information; skip them. The
    // remainder must stay nonzero for the ratio bookkeeping.
    let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
    let tail = &coeffs[lead..];
    if tail.iter().any(|c| c.is_zero()) {
        return Err(DAError::BadConfig(
            "interior zero term; the ratio bookkeeping needs nonzero terms".into(),
        ));
    }
    let (runs, attempted) = match &opts.deflate {
        None => extend_runs_by_ratios(coeffs, tail, lead, count, opts)?,
        Some(base) => extend_runs_by_deflation(tail, lead, start, count, opts, base)?,
    };

    let last = HighPrec::from_bigint(coeffs.last().expect("nonzero tail exists"));
    let ratio_runs: Vec<Vec<HighPrec>> = runs
        .iter()
        .map(|run| {
            let mut prev = last.clone();
            run.iter()
                .map(|v| {
                    let r = v / &prev;
                    prev = v.clone();
                    r
                })
                .collect()
        })
        .collect();
    let ratio_preds = aggregate_runs(
        &ratio_runs,
        count,
        start + coeffs.len() as u32,
        attempted,
    )?;

    let mut predictions = Vec::with_capacity(ratio_preds.len());
    let mut value = last;
    for rp in &ratio_preds {
        value = &value * &rp.value;
        let step_rel_std = if rp.value.is_zero() {
            HighPrec::zero()
        } else {
            &rp.std_dev / &rp.value.abs()
        };
        predictions.push(PredictedCoefficient {
            index: rp.index,
            value: value.clone(),
            agreed_digits: rp.agreed_digits,
            std_dev: value.abs() * step_rel_std,
            contributors: rp.contributors,
        });
    }
    let accepted = predictions
        .iter()
        .take_while(|p| p.agreed_digits >= opts.floor_digits)
        .count();
    let mut values: Vec<HighPrec> = coeffs.iter().map(HighPrec::from_bigint).collect();
    values.extend(predictions.iter().take(accepted).map(|p| p.value.clone()));
    Ok(ExtendedSeries {
        sample: SeriesSample::from_values(start, values),
        exact_len: coeffs.len(),
        predictions,
        accepted,
    })
}

/// Grid for extension runs: only the widest usable windows. A window much
/// shorter than the series trains an approximant on the early terms,
/// which extrapolates poorly and drags the consensus, so the sweep stays
/// within four sizes of full length (and never below ten coefficients).
fn extension_grid(available: usize, orders: &[usize]) -> Vec<DAConfig> {
    let keep = available.saturating_sub(4).max(available.min(10));
    config_grid_orders(available, orders)
        .into_iter()
        .filter(|c| c.coefficients_used() >= keep)
        .collect()
}

/// One raw-value continuation per surviving approximant, via the ratio
/// transform: each recurrence extends c_{n+1}/c_n and its ratios are
/// multiplied back up from the last exact term.
fn extend_runs_by_ratios(
    coeffs: &[BigInt],
    tail: &[BigInt],
    lead: usize,
    count: usize,
    opts: &ExtendOptions,
) -> Result<(Vec<Vec<HighPrec>>, usize), DAError> {
    if tail.len() < 11 {
        return Err(DAError::TooFewCoefficients {
            need: lead + 11,
            have: lead + tail.len(),
        });
    }
    let ratios: Vec<BigRational> = tail
        .windows(2)
        .map(|w| BigRational::new(w[1].clone(), w[0].clone()))
        .collect();
    let grid = extension_grid(ratios.len(), &opts.orders);
    let das = surviving_das(&ratios, &grid)?;
    let history: Vec<HighPrec> = ratios.iter().map(hp_rat).collect();
    let last = HighPrec::from_bigint(coeffs.last().expect("nonempty by the length check"));
    let runs = das
        .par_iter()
        .map(|da| {
            da.advance(&history, count).ok().map(|rs| {
                let mut v = last.clone();
                rs.into_iter()
                    .map(|r| {
                        v = &v * &r;
                        v.clone()
                    })
                    .collect()
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok((runs, grid.len()))
}

/// One raw-value continuation per surviving approximant, deflating by
/// base^(L^2) so the fit sees a sequence with a finite radius of
/// convergence. The deflated terms are exact dyadic rationals, so the fit
/// itself stays exact; the base's own uncertainty cancels when the
/// predictions are inflated back with the same constant.
fn extend_runs_by_deflation(
    tail: &[BigInt],
    lead: usize,
    start: u32,
    count: usize,
    opts: &ExtendOptions,
    base: &HighPrec,
) -> Result<(Vec<Vec<HighPrec>>, usize), DAError> {
    if !base.is_positive() {
        return Err(DAError::BadConfig(
            "deflation constant must be positive".into(),
        ));
    }
    if tail.len() < 10 {
        return Err(DAError::TooFewCoefficients {
            need: lead + 10,
            have: lead + tail.len(),
        });
    }
    let first_l = start as usize + lead;
    let deflated: Vec<BigRational> = tail
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let l = first_l + m;
            (HighPrec::from_bigint(v) / base.powi(l * l))
                .to_rational()
                .ok_or_else(|| DAError::BadConfig("deflated term is not finite".into()))
        })
        .collect::<Result<_, _>>()?;
    let grid = extension_grid(deflated.len(), &opts.orders);
    let das = surviving_das(&deflated, &grid)?;
    let history: Vec<HighPrec> = deflated.iter().map(hp_rat).collect();
    let runs = das
        .par_iter()
        .map(|da| {
            da.advance(&history, count).ok().map(|ws| {
                ws.into_iter()
                    .enumerate()
                    .map(|(i, w)| {
                        let l = first_l + tail.len() + i;
                        w * base.powi(l * l)
                    })
                    .collect()
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok((runs, grid.len()))
}

fn ipow(base: i64, exp: usize) -> BigInt {
    let mut acc = BigInt::one();
    let b = BigInt::from(base);
    for _ in 0..exp {
        acc *= &b;
    }
    acc
}

fn hp_rat(r: &BigRational) -> HighPrec {
    HighPrec::from_bigint(r.numer()) / HighPrec::from_bigint(r.denom())
}

fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn deriv(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| j as f64 * c)
        .collect()
}

/// All complex roots by simultaneous iteration, polished by Newton steps.
/// Callers check residuals; the contract is the achieved residual, not
/// the method.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut w: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..600 {
        let mut worst = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= w[i] - w[j];
                }
            }
            if denom.norm() == 0.0 {
                w[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(&monic, w[i]) / denom;
            w[i] -= step;
            worst = worst.max(step.norm() / (1.0 + w[i].norm()));
        }
        if worst < 1e-14 {
            break;
        }
    }
    let dm = deriv(&monic);
    for wi in w.iter_mut() {
        for _ in 0..8 {
            let dv = eval(&dm, *wi);
            if dv.norm() < f64::MIN_POSITIVE * 1e10 {
                break;
            }
            *wi -= eval(&monic, *wi) / dv;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(big(n), big(d))
    }

    fn geometric(ratio: i64, n: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(n);
        let mut c = BigInt::one();
        for _ in 0..n {
            out.push(c.clone());
            c *= ratio;
        }
        out
    }

    /// Coefficients of (1 - 4z)^(-g) for g with 2g integral; these are
    /// exact integers for g in {1/2, 1, 3/2, 2}.
    fn binomial_power(gamma: BigRational, n: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(n);
        let mut c = BigRational::one();
        for i in 0..n {
            assert!(c.is_integer());
            out.push(c.to_integer());
            let i = BigRational::from_integer(big(i as i64));
            c = c * rat(4, 1) * (&i + &gamma) / (i + BigRational::one());
        }
        out
    }

    fn cfg(degrees: &[usize], inhom: i64) -> DAConfig {
        DAConfig::new(degrees.to_vec(), inhom).unwrap()
    }

    #[test]
    fn minimal_fit_recovers_the_generating_equation() {
        let c = geometric(2, 10);
        let da = fit_da(&c, &cfg(&[1, 1], -1)).unwrap();
        assert_eq!(da.poly(1), &[rat(1, 1), rat(-2, 1)]);
        assert_eq!(da.poly(0), &[rat(0, 1), rat(-2, 1)]);
        assert!(da.inhomogeneous_part().is_none());
        assert!(!da.reduced_rank());

        let sing = singularities(&da);
        assert_eq!(sing.len(), 1);
        assert!((sing[0].z - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!(sing[0].residual <= ROOT_RESIDUAL_TOL);
        let gamma = sing[0].gamma.unwrap();
        assert!((gamma - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn regeneration_reproduces_the_input_exactly() {
        for (series, shape) in [
            (geometric(2, 30), cfg(&[1, 1], -1)),
            (binomial_power(rat(1, 2), 30), cfg(&[1, 1], -1)),
            (binomial_power(rat(1, 2), 30), cfg(&[1, 1], 0)),
        ] {
            let da = fit_da(&series, &shape).unwrap();
            let n = da.coefficients_used();
            let regen = da.regenerate(n).unwrap();
            for (r, c) in regen.iter().zip(&series) {
                assert_eq!(r, &BigRational::from_integer(c.clone()));
            }
        }
    }

    #[test]
    fn central_binomials_locate_the_quarter_singularity() {
        let c = binomial_power(rat(1, 2), 30);
        let da = fit_da(&c, &cfg(&[1, 1], -1)).unwrap();
        assert_eq!(da.poly(1), &[rat(1, 1), rat(-4, 1)]);
        let sing = singularities(&da);
        assert_eq!(sing.len(), 1);
        assert!((sing[0].z - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        let gamma = sing[0].gamma.unwrap();
        assert!((gamma - Complex64::new(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn both_poles_of_a_two_pole_function_are_found() {
        // 1/((1-z)(1+2z)): partial fractions give c_n = (1 + 2(-2)^n) / 3.
        let c: Vec<BigInt> = (0..12)
            .map(|n| (big(1) + big(2) * ipow(-2, n)) / big(3))
            .collect();
        let da = fit_da(&c, &cfg(&[2, 2], -1)).unwrap();
        let sing = singularities(&da);
        assert_eq!(sing.len(), 2);
        assert!((sing[0].z - Complex64::new(-0.5, 0.0)).norm() < 1e-10);
        assert!((sing[1].z - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        for s in &sing {
            let gamma = s.gamma.unwrap();
            assert!((gamma - Complex64::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn exponents_recovered_across_the_half_integer_family() {
        for (num, den) in [(1i64, 2i64), (1, 1), (3, 2), (2, 1)] {
            let gamma = rat(num, den);
            let c = binomial_power(gamma.clone(), 12);
            let da = fit_da(&c, &cfg(&[1, 1], -1)).unwrap();
            let sing = singularities(&da);
            assert_eq!(sing.len(), 1);
            assert!((sing[0].z - Complex64::new(0.25, 0.0)).norm() < 1e-10);
            let want = num as f64 / den as f64;
            let got = sing[0].gamma.unwrap();
            assert!(
                (got - Complex64::new(want, 0.0)).norm() < 1e-8,
                "gamma {want}: got {got}"
            );
        }
    }

    #[test]
    fn oversized_shapes_report_their_deficiency() {
        let c = geometric(2, 12);
        match fit_da(&c, &cfg(&[2, 2], -1)) {
            Err(DAError::RankDeficient { missing }) => assert_eq!(missing, 1),
            other => panic!("expected rank report, got {other:?}"),
        }
        let da = fit_da_lenient(&c, &cfg(&[2, 2], -1)).unwrap();
        assert!(da.reduced_rank());
        let regen = da.regenerate(da.coefficients_used()).unwrap();
        for (r, c) in regen.iter().zip(&c) {
            assert_eq!(r, &BigRational::from_integer(c.clone()));
        }
    }

    #[test]
    fn grid_prediction_on_a_geometric_series_is_exact() {
        let c = geometric(2, 30);
        let grid = config_grid(30);
        assert!(grid.len() > 20);
        let preds = predict_coefficients(&c, &grid, 10).unwrap();
        assert_eq!(preds.len(), 10);
        let mut truth = HighPrec::from_u64(1 << 30);
        for (i, p) in preds.iter().enumerate() {
            assert_eq!(p.index as usize, 30 + i);
            let rel = ((&p.value - &truth) / &truth).abs();
            assert!(rel < HighPrec::from_f64(1e-60), "index {}: {}", p.index, rel);
            assert!(p.agreed_digits >= 50, "digits {}", p.agreed_digits);
            truth = &truth * &HighPrec::from_u64(2);
        }
    }

    fn fake_estimates(moduli: &[f64]) -> Vec<SingularityEstimate> {
        moduli
            .iter()
            .map(|&r| SingularityEstimate {
                z: Complex64::new(r, 0.0),
                gamma: None,
                residual: 0.0,
                defective: false,
            })
            .collect()
    }

    #[test]
    fn spurious_inner_root_marks_its_approximant() {
        let mut pop = vec![
            fake_estimates(&[0.500, 2.0]),
            fake_estimates(&[0.501]),
            fake_estimates(&[0.499, 1.5]),
            fake_estimates(&[0.250, 0.500]),
            fake_estimates(&[0.502]),
        ];
        let verdict = mark_defective(&mut pop, DEFAULT_RADIUS_ZSCORE);
        assert!(verdict.filtered);
        assert_eq!(verdict.defective, vec![false, false, false, true, false]);
        assert!(pop[3][0].defective);
        assert!(!pop[3][1].defective);
        let r = verdict.consensus_radius.unwrap();
        assert!((r - 0.5).abs() < 0.01);
    }

    #[test]
    fn clean_population_is_left_alone() {
        let mut pop = vec![
            fake_estimates(&[0.500]),
            fake_estimates(&[0.5001]),
            fake_estimates(&[0.4999]),
            fake_estimates(&[0.5002]),
        ];
        let verdict = mark_defective(&mut pop, DEFAULT_RADIUS_ZSCORE);
        assert!(verdict.filtered);
        assert!(verdict.defective.iter().all(|d| !d));
    }

    #[test]
    fn tiny_population_skips_filtering() {
        let mut pop = vec![fake_estimates(&[0.5]), fake_estimates(&[0.1])];
        let verdict = mark_defective(&mut pop, DEFAULT_RADIUS_ZSCORE);
        assert!(!verdict.filtered);
        assert!(verdict.defective.iter().all(|d| !d));
    }

    #[test]
    fn outlier_trimming_rejects_a_wild_value() {
        let mut values: Vec<HighPrec> = (0..9)
            .map(|i| HighPrec::from_f64(1.0 + 1e-12 * i as f64))
            .collect();
        values.push(HighPrec::from_f64(5.0));
        let kept = mad_trim(values);
        assert_eq!(kept.len(), 9);
        assert!(kept.iter().all(|v| v < &HighPrec::from_f64(2.0)));
    }

    #[test]
    fn advance_and_regenerate_agree_with_the_truth() {
        let c = binomial_power(rat(1, 2), 20);
        let truth = binomial_power(rat(1, 2), 30);
        let da = fit_da(&c, &cfg(&[1, 1], -1)).unwrap();
        let history: Vec<HighPrec> = c.iter().map(HighPrec::from_bigint).collect();
        let ext = da.advance(&history, 10).unwrap();
        for (i, v) in ext.iter().enumerate() {
            let t = HighPrec::from_bigint(&truth[20 + i]);
            let rel = ((v - &t) / &t).abs();
            assert!(rel < HighPrec::from_f64(1e-80));
        }
    }

    #[test]
    fn too_few_coefficients_are_refused() {
        let c = geometric(2, 5);
        match predict_coefficients(&c, &config_grid(5), 3) {
            Err(DAError::TooFewCoefficients { need: 10, have: 5 }) => (),
            other => panic!("unexpected: {other:?}"),
        }
        match fit_da(&geometric(2, 2), &cfg(&[1, 1], -1)) {
            Err(DAError::TooFewCoefficients { need: 3, have: 2 }) => (),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn grid_budgets_match_their_declared_consumption() {
        for avail in [12usize, 17, 30] {
            let grid = config_grid(avail);
            assert!(!grid.is_empty());
            for cfg in &grid {
                assert!(cfg.coefficients_used() <= avail);
                assert!(cfg.coefficients_used() + 10 >= avail);
                let degs = cfg.degrees();
                let lo = degs.iter().min().unwrap();
                let hi = degs.iter().max().unwrap();
                assert!(hi - lo <= 2);
            }
        }
    }

    #[test]
    fn extension_splices_and_respects_the_floor() {
        // A sequence the approximants cannot capture exactly: geometric
        // growth plus a comparably sized arithmetic wobble.
        let mut c = Vec::new();
        let mut base = BigInt::one();
        let mut state: u64 = 0x243f6a8885a308d3;
        for _ in 0..20 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let noise = (state >> 40) as i64 - (1 << 23);
            let mag = &base / big(1 << 20);
            c.push(&base + mag * big(noise.signum() * (noise.abs() % 7)));
            base *= 3;
        }
        let ext = extend_for_ratio_analysis(&c, 0, 15, &ExtendOptions::default()).unwrap();
        assert_eq!(ext.exact_len, 20);
        assert_eq!(ext.predictions.len(), 15);
        assert_eq!(ext.sample.len(), 20 + ext.accepted);
        for p in ext.predictions.iter().take(ext.accepted) {
            assert!(p.agreed_digits >= DEFAULT_AGREEMENT_FLOOR);
        }
        if ext.accepted < ext.predictions.len() {
            assert!(ext.predictions[ext.accepted].agreed_digits < DEFAULT_AGREEMENT_FLOOR);
        }
    }
}
