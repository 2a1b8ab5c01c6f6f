//! Ratio-method sequence analysis.
//!
//! Everything here works on estimator trails: sequences derived from
//! successive-term ratios whose limits are the growth constant and the
//! power-law correction exponents. Trails converge like 1/n, so the tooling
//! leans on intercept combinations that cancel the leading corrections
//! exactly, plus a final extrapolation whose spread over the last few
//! entries doubles as the quoted uncertainty.

use thiserror::Error;

use crate::series::{HighPrec, SeriesError, SeriesSample};

/// An estimator sequence keyed by the index of its newest source term.
pub type Trail = Vec<(u32, HighPrec)>;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("need at least {need} usable terms, have {got}")]
    TooFewTerms { got: usize, need: usize },
    #[error("paired series must sample the same indices")]
    IndexMismatch,
    #[error("pair normalization divides by a zero term at index {0}")]
    ZeroDenominator(u32),
}

/// Successive-term ratios r_n = c_n / c_{n-1} over consecutive indices.
pub fn ratios(s: &SeriesSample) -> Result<Trail, AnalysisError> {
    let (tail, _) = s.positive_tail()?;
    if tail.len() < 2 {
        return Err(AnalysisError::TooFewTerms {
            got: tail.len(),
            need: 2,
        });
    }
    Ok(tail
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| (w[1].0, &w[1].1 / &w[0].1))
        .collect())
}

fn hp(n: u32) -> HighPrec {
    HighPrec::from_u64(n as u64)
}

/// Linear intercepts l_n = n r_n - (n-1) r_{n-1}; cancels a 1/n correction
/// exactly.
pub fn linear_intercepts(r: &Trail) -> Trail {
    r.windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let n = w[1].0;
            (n, hp(n) * &w[1].1 - hp(n - 1) * &w[0].1)
        })
        .collect()
}

/// Parity-averaged intercepts l_n = [n r_n - (n-2) r_{n-2}] / 2. Lattice
/// square sequences carry a small odd/even wobble; stepping by two damps it.
pub fn parity_intercepts(r: &Trail) -> Trail {
    let mut out = Vec::new();
    for i in 0..r.len() {
        let n = r[i].0;
        if let Some(prev) = r[..i].iter().rfind(|(m, _)| *m == n - 2) {
            out.push((n, (hp(n) * &r[i].1 - hp(n - 2) * &prev.1) / hp(2)));
        }
    }
    out
}

/// Quadratic intercepts q_n = [n^2 l_n - (n-1)^2 l_{n-1}] / (2n-1); cancels
/// a 1/n^2 correction in the intercepts exactly.
pub fn quadratic_intercepts(l: &Trail) -> Trail {
    l.windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let n = w[1].0;
            let num = hp(n).powi(2) * &w[1].1 - hp(n - 1).powi(2) * &w[0].1;
            (n, num / hp(2 * n - 1))
        })
        .collect()
}

/// Exponent estimators for a known singularity location z_c:
/// gamma_n = n (z_c r_n - 1) + 1.
pub fn exponent_known_zc(r: &Trail, z_c: &HighPrec) -> Trail {
    r.iter()
        .map(|(n, rn)| {
            let g = hp(*n) * (z_c * rn - HighPrec::one()) + HighPrec::one();
            (*n, g)
        })
        .collect()
}

/// Exponent estimators with no singularity location:
/// gamma_n = 1 + n^2 (1 - r_n / r_{n-1}).
pub fn exponent_unknown_zc(r: &Trail) -> Trail {
    r.windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let n = w[1].0;
            let g = HighPrec::one() + hp(n).powi(2) * (HighPrec::one() - &w[1].1 / &w[0].1);
            (n, g)
        })
        .collect()
}

/// Growth-constant estimators for a known exponent:
/// mu_n = n r_n / (n + gamma - 1). Entries with a vanishing denominator are
/// dropped.
pub fn growth_known_gamma(r: &Trail, gamma: &HighPrec) -> Trail {
    r.iter()
        .filter_map(|(n, rn)| {
            let den = hp(*n) + gamma - HighPrec::one();
            if den.is_zero() {
                None
            } else {
                Some((*n, hp(*n) * rn / den))
            }
        })
        .collect()
}

/// Strips the dominant lambda^(L^2) factor: c_L / lambda^(L^2).
pub fn normalize_divide(s: &SeriesSample, lambda: &HighPrec) -> SeriesSample {
    let terms = s
        .terms()
        .iter()
        .map(|(n, v)| {
            let sq = (*n as usize) * (*n as usize);
            (*n, v / lambda.powi(sq))
        })
        .collect();
    SeriesSample::new(terms).expect("indices preserved")
}

/// Termwise quotient of two series sampled at identical indices.
pub fn normalize_pair(a: &SeriesSample, b: &SeriesSample) -> Result<SeriesSample, AnalysisError> {
    if a.len() != b.len()
        || a.terms()
            .iter()
            .zip(b.terms())
            .any(|((na, _), (nb, _))| na != nb)
    {
        return Err(AnalysisError::IndexMismatch);
    }
    let mut terms = Vec::with_capacity(a.len());
    for ((n, va), (_, vb)) in a.terms().iter().zip(b.terms()) {
        if vb.is_zero() {
            return Err(AnalysisError::ZeroDenominator(*n));
        }
        terms.push((*n, va / vb));
    }
    Ok(SeriesSample::new(terms).expect("indices preserved"))
}

/// A value plus the spread of the extrapolants that produced it.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: HighPrec,
    pub spread: HighPrec,
}

impl Estimate {
    fn from_trail(trail: &Trail, window: usize) -> Option<Estimate> {
        let (_, value) = trail.last()?;
        let lo = trail.len().saturating_sub(window.max(1));
        let spread = trail[lo..]
            .iter()
            .map(|(_, v)| (v - value).abs())
            .fold(HighPrec::zero(), HighPrec::max);
        Some(Estimate {
            value: value.clone(),
            spread,
        })
    }
}

/// Tuning for `fit_subdominant`.
#[derive(Clone, Debug)]
pub struct FitOptions {
    /// How many trailing extrapolants feed the quoted spread.
    pub window: usize,
    /// Parity-averaged intercepts (lattice squares) instead of plain ones.
    pub parity_averaged: bool,
    /// External reference constants (b, c, g) of a companion sequence; when
    /// present the fit also reports (b - d, c - e, g - h).
    pub reference: Option<(f64, f64, f64)>,
}

impl Default for FitOptions {
    fn default() -> FitOptions {
        FitOptions {
            window: 5,
            parity_averaged: true,
            reference: None,
        }
    }
}

/// Fitted parameters of c_L ~ lambda^(L^2 + d L + e) * L^h.
#[derive(Clone, Debug)]
pub struct AsymptoticFit {
    /// The externally supplied growth constant the fit is relative to.
    pub lambda: HighPrec,
    /// Limit of the normalized ratios, lambda^d.
    pub mu: Estimate,
    pub d: Estimate,
    pub h: Estimate,
    /// Limit of the amplitude trail, lambda^e.
    pub amplitude: Estimate,
    pub e: Estimate,
    /// (b - d, c - e, g - h) against the reference constants, if given.
    pub relative_to_reference: Option<(HighPrec, HighPrec, HighPrec)>,
    /// Ratio-limit estimators (quadratic intercept stage).
    pub mu_trail: Trail,
    /// Power-law estimators delta_L = (r_L / mu - 1) L.
    pub delta_trail: Trail,
    /// Amplitude estimators c_L / lambda^(L^2 + d L) / L^h.
    pub amplitude_trail: Trail,
}

/// Full subdominant fit of a raw sequence against an external growth
/// constant: strips lambda^(L^2), extracts mu (hence d) from intercept
/// extrapolation, the power h from the delta trail, and lambda^e (hence e)
/// from the amplitude trail. Needs at least 8 usable terms.
pub fn fit_subdominant(
    s: &SeriesSample,
    lambda: &HighPrec,
    opts: &FitOptions,
) -> Result<AsymptoticFit, AnalysisError> {
    let normalized = normalize_divide(s, lambda);
    let (tail, _) = normalized.positive_tail()?;
    if tail.len() < 8 {
        return Err(AnalysisError::TooFewTerms {
            got: tail.len(),
            need: 8,
        });
    }
    let intercept = if opts.parity_averaged {
        parity_intercepts
    } else {
        linear_intercepts
    };
    // Two acceleration stages: the intercepts cancel the 1/L correction
    // exactly, the quadratic intercepts the remaining 1/L^2 one. Short
    // trails fall back to whatever stage still has entries.
    let ladder = |trail: &Trail| -> Option<(Estimate, Trail)> {
        let stage1 = intercept(trail);
        let stage2 = quadratic_intercepts(&stage1);
        let best = if !stage2.is_empty() {
            stage2
        } else if !stage1.is_empty() {
            stage1
        } else {
            trail.clone()
        };
        Estimate::from_trail(&best, opts.window).map(|e| (e, best))
    };
    let short = |got: usize| AnalysisError::TooFewTerms { got, need: 8 };

    let r = ratios(&normalized)?;
    let (mut mu, mut mu_trail) = ladder(&r).ok_or(short(r.len()))?;

    // r_L / mu - 1 ~ h / L, so (r_L / mu - 1) L converges to h. An error
    // eps in mu leaks into this trail as a term linear in L, which the
    // intercept stages amplify; iterating the pair of estimates against
    // each other contracts both errors geometrically. Three rounds land
    // well inside the extrapolation residual.
    let delta_of = |mu: &Estimate| -> Trail {
        r.iter()
            .map(|(n, rn)| (*n, (rn / &mu.value - HighPrec::one()) * hp(*n)))
            .collect()
    };
    let mut delta_trail = delta_of(&mu);
    let (mut h, _) = ladder(&delta_trail).ok_or(short(delta_trail.len()))?;
    for _ in 0..3 {
        // Remove the fitted power from the ratios; what remains converges
        // to mu with the 1/L correction taken out analytically.
        let depowered: Trail = r
            .iter()
            .map(|(n, rn)| {
                let frac = (hp(*n) - HighPrec::one()) / hp(*n);
                (*n, rn * frac.pow(&h.value))
            })
            .collect();
        let (m, t) = ladder(&depowered).ok_or(short(depowered.len()))?;
        mu = m;
        mu_trail = t;
        delta_trail = delta_of(&mu);
        let (hh, _) = ladder(&delta_trail).ok_or(short(delta_trail.len()))?;
        h = hh;
    }

    let ln_lambda = lambda.ln();
    let d_value = mu.value.ln() / &ln_lambda;
    let d_spread = (&mu.spread / &mu.value) / &ln_lambda;
    let d = Estimate {
        value: d_value.clone(),
        spread: d_spread.abs(),
    };

    // What is left after removing lambda^(L^2 + d L) L^h converges to
    // lambda^e.
    let amplitude_trail: Trail = tail
        .iter()
        .map(|(n, v)| {
            let nn = hp(*n);
            let amp = v / mu.value.powi(*n as usize) / nn.pow(&h.value);
            (*n, amp)
        })
        .collect();
    let (amplitude, _) = ladder(&amplitude_trail).ok_or(short(amplitude_trail.len()))?;
    let e_value = amplitude.value.ln() / &ln_lambda;
    let e_spread = (&amplitude.spread / &amplitude.value) / &ln_lambda;
    let e = Estimate {
        value: e_value.clone(),
        spread: e_spread.abs(),
    };

    let relative_to_reference = opts.reference.map(|(b, c, g)| {
        (
            HighPrec::from_f64(b) - &d.value,
            HighPrec::from_f64(c) - &e.value,
            HighPrec::from_f64(g) - &h.value,
        )
    });

    Ok(AsymptoticFit {
        lambda: lambda.clone(),
        mu,
        d,
        h,
        amplitude,
        e,
        relative_to_reference,
        mu_trail,
        delta_trail,
        amplitude_trail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hps(s: &str) -> HighPrec {
        HighPrec::parse(s).unwrap()
    }

    fn sample(start: u32, vals: Vec<HighPrec>) -> SeriesSample {
        SeriesSample::from_values(start, vals)
    }

    fn close(a: &HighPrec, b: &HighPrec, tol: &str) -> bool {
        (a - b).abs() < hps(tol)
    }

    #[test]
    fn geometric_series_gives_constant_trails() {
        let s = sample(1, (1..=12).map(|n| hps("2").powi(n)).collect());
        let r = ratios(&s).unwrap();
        assert!(r.iter().all(|(_, v)| *v == hps("2")));
        let l = linear_intercepts(&r);
        assert!(l.iter().all(|(_, v)| *v == hps("2")));
        let g = exponent_unknown_zc(&r);
        assert!(g.iter().all(|(_, v)| *v == hps("1")));
        let m = growth_known_gamma(&r, &HighPrec::one());
        assert!(m.iter().all(|(_, v)| *v == hps("2")));
    }

    #[test]
    fn intercepts_cancel_pure_inverse_correction_exactly() {
        // r_n = mu (1 + (gamma-1)/n) reconstructed from synthetic ratios.
        let mu = hps("3");
        let gm1 = hps("1.5");
        let r: Trail = (2..=20)
            .map(|n| {
                let corr = HighPrec::one() + &gm1 / HighPrec::from_u64(n);
                (n as u32, &mu * corr)
            })
            .collect();
        for (_, v) in linear_intercepts(&r) {
            assert!(close(&v, &mu, "1e-70"));
        }
    }

    #[test]
    fn quadratic_intercepts_cancel_inverse_square_exactly() {
        let mu = hps("0.105");
        let c = hps("-2.3");
        let l: Trail = (2..=20)
            .map(|n| {
                let corr = HighPrec::one() + &c / HighPrec::from_u64(n).powi(2);
                (n as u32, &mu * corr)
            })
            .collect();
        for (_, v) in quadratic_intercepts(&l) {
            assert!(close(&v, &mu, "1e-70"));
        }
        // Constant input stays constant.
        let flat: Trail = (2..=9).map(|n| (n, mu.clone())).collect();
        for (_, v) in quadratic_intercepts(&flat) {
            assert!(close(&v, &mu, "1e-75"));
        }
    }

    #[test]
    fn parity_averaging_damps_alternating_corrections() {
        let mu = hps("2");
        let r: Trail = (2..=30)
            .map(|n| {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let corr =
                    HighPrec::one() + HighPrec::from_f64(sign) / HighPrec::from_u64(n).powi(2);
                (n as u32, &mu * corr)
            })
            .collect();
        let spread = |t: &Trail| {
            t.iter()
                .map(|(_, v)| (v - &mu).abs())
                .fold(HighPrec::zero(), HighPrec::max)
        };
        let plain = spread(&linear_intercepts(&r));
        let parity = spread(&parity_intercepts(&r));
        assert!(parity < plain, "parity {parity} vs plain {plain}");
    }

    #[test]
    fn known_location_exponent_estimators_are_exact_on_closed_forms() {
        // (1-z)^-2 has c_n = n + 1: the estimator is exactly 2 at every n.
        let s = sample(0, (1..=15).map(HighPrec::from_u64).collect());
        let r = ratios(&s).unwrap();
        for (_, g) in exponent_known_zc(&r, &HighPrec::one()) {
            assert!(close(&g, &hps("2"), "1e-70"));
        }
        // Central binomials: r_n = (4n-2)/n, z_c = 1/4 gives exactly 1/2,
        // and the growth estimator with gamma = 1/2 gives exactly 4.
        let mut c = vec![HighPrec::one()];
        for n in 1..=20u64 {
            let prev = c.last().unwrap();
            c.push(prev * HighPrec::from_u64(4 * n - 2) / HighPrec::from_u64(n));
        }
        let s = sample(0, c);
        let r = ratios(&s).unwrap();
        for (_, g) in exponent_known_zc(&r, &hps("0.25")) {
            assert!(close(&g, &hps("0.5"), "1e-60"));
        }
        for (_, m) in growth_known_gamma(&r, &hps("0.5")) {
            assert!(close(&m, &hps("4"), "1e-60"));
        }
    }

    #[test]
    fn unknown_location_exponent_estimators_converge() {
        // c_n = mu^n n has gamma = 2; c_n = mu^n n^(3/4) has gamma = 7/4.
        let mu = hps("0.3");
        for (power, want) in [("1", "2"), ("0.75", "1.75")] {
            let p = hps(power);
            let c: Vec<HighPrec> = (1..=40)
                .map(|n| mu.powi(n) * HighPrec::from_u64(n as u64).pow(&p))
                .collect();
            let r = ratios(&sample(1, c)).unwrap();
            let trail = exponent_unknown_zc(&r);
            let ext = linear_intercepts(&trail);
            let (_, last) = ext.last().unwrap();
            assert!(close(last, &hps(want), "1e-2"), "{last} vs {want}");
        }
    }

    #[test]
    fn normalization_modes() {
        let lambda = hps("1.7445498");
        let c: Vec<HighPrec> = (1..=6).map(|n| lambda.powi(n * n)).collect();
        let s = sample(1, c);
        for (_, v) in normalize_divide(&s, &lambda).terms() {
            assert!(close(v, &HighPrec::one(), "1e-70"));
        }
        let p = normalize_pair(&s, &s).unwrap();
        assert!(p.terms().iter().all(|(_, v)| *v == HighPrec::one()));
        let shifted = sample(2, (1..=6).map(|n| lambda.powi(n)).collect());
        assert!(matches!(
            normalize_pair(&s, &shifted),
            Err(AnalysisError::IndexMismatch)
        ));
    }

    #[test]
    fn derived_trails_ignore_constant_scaling_but_amplitude_tracks_it() {
        let lambda = hps("1.7445498");
        let s = synthetic(&lambda, -4.0, 8.0, 0.75, 24);
        let k = hps("7");
        let scaled = s.scaled(&k);
        let opts = FitOptions::default();
        let f1 = fit_subdominant(&s, &lambda, &opts).unwrap();
        let f2 = fit_subdominant(&scaled, &lambda, &opts).unwrap();
        assert!(close(&f1.mu.value, &f2.mu.value, "1e-40"));
        assert!(close(&f1.h.value, &f2.h.value, "1e-30"));
        let ratio = &f2.amplitude.value / &f1.amplitude.value;
        assert!(close(&ratio, &k, "1e-20"));
    }

    fn synthetic(lambda: &HighPrec, d: f64, e: f64, h: f64, lmax: u32) -> SeriesSample {
        let dd = HighPrec::from_f64(d);
        let ee = HighPrec::from_f64(e);
        let hh = HighPrec::from_f64(h);
        let vals = (2..=lmax)
            .map(|l| {
                let ll = HighPrec::from_u64(l as u64);
                let expo = HighPrec::from_u64((l * l) as u64) + &dd * &ll + &ee;
                lambda.pow(&expo) * ll.pow(&hh)
            })
            .collect();
        SeriesSample::from_values(2, vals)
    }

    #[test]
    fn subdominant_fit_recovers_synthetic_parameters() {
        let lambda = hps("1.7445498");
        let (d, e, h) = (-4.04354, 8.0, 0.75);
        let s = synthetic(&lambda, d, e, h, 40);
        let fit = fit_subdominant(&s, &lambda, &FitOptions::default()).unwrap();
        assert!(
            close(&fit.d.value, &HighPrec::from_f64(d), "1e-3"),
            "d {} want {d}",
            fit.d.value
        );
        assert!(
            close(&fit.h.value, &HighPrec::from_f64(h), "1e-2"),
            "h {} want {h}",
            fit.h.value
        );
        assert!(
            close(&fit.e.value, &HighPrec::from_f64(e), "1e-1"),
            "e {} want {e}",
            fit.e.value
        );
        // Reference constants produce the difference report.
        let opts = FitOptions {
            reference: Some((-0.04354, -1.197, -0.5)),
            ..FitOptions::default()
        };
        let fit = fit_subdominant(&s, &lambda, &opts).unwrap();
        let (alpha, _, delta) = fit.relative_to_reference.unwrap();
        assert!(close(&alpha, &hps("4.0"), "1e-2"));
        assert!(close(&delta, &hps("-1.25"), "1e-1"));
    }

    #[test]
    fn randomized_synthetic_recovery() {
        // Cheap deterministic draws; the acceptance suite runs more.
        let lambda = hps("1.7445498");
        let mut state = 0x243f6a8885a308d3u64;
        let mut unit = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..5 {
            let d = -5.0 + 2.0 * unit();
            let h = 2.0 * unit();
            let e = 4.0 + 6.0 * unit();
            let s = synthetic(&lambda, d, e, h, 38);
            let fit = fit_subdominant(&s, &lambda, &FitOptions::default()).unwrap();
            assert!(close(&fit.d.value, &HighPrec::from_f64(d), "1e-3"));
            assert!(close(&fit.h.value, &HighPrec::from_f64(h), "1e-2"));
            assert!(close(&fit.e.value, &HighPrec::from_f64(e), "1e-1"));
        }
    }

    #[test]
    fn too_few_terms_is_reported() {
        let lambda = hps("1.7445498");
        let s = synthetic(&lambda, -4.0, 8.0, 0.75, 8);
        assert!(matches!(
            fit_subdominant(&s, &lambda, &FitOptions::default()),
            Err(AnalysisError::TooFewTerms { .. })
        ));
    }
}
