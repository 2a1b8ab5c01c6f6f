//! Assembly of per-prime enumeration runs into exact integer results.
//!
//! Every prime defines a fully independent sweep, so the runs fan out across
//! threads and meet again here: residues are combined once, on the finished
//! panel totals, by the Chinese remainder theorem. The prime budget comes
//! from the a-priori bound that no coefficient can exceed the number of cell
//! subsets of the board, and every reconstruction is re-checked with one
//! extra prime before it is accepted.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::modarith::{
    crt_reconstruct, gen_primes_skipping, ModArithError, PrimeSet, ResidueValue,
};
use crate::transfer::{run_panel_poly, run_panel_scalar, PanelKind, TransferError};

/// Polynomial sweeps track many small coefficients; 30-bit primes keep the
/// per-cell products inside 64-bit accumulators.
pub const POLY_PRIME_BITS: u32 = 30;
/// Scalar sweeps carry single residues, so the widest primes that still
/// multiply safely in 128 bits are used.
pub const SCALAR_PRIME_BITS: u32 = 62;

const STABILITY_ROUNDS: usize = 8;

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    ModArith(#[from] ModArithError),
    #[error("reconstruction for side {0} kept changing after {1} extra primes")]
    Unstable(usize, usize),
    #[error("equal-split count for side {0} is odd; the enumeration is inconsistent")]
    OddSplit(usize),
}

/// One-sided counts by area: coefficient k is the number of valid cuts of
/// the L x L board whose distinguished piece covers k cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PanelPolynomial {
    pub l: usize,
    /// Dense coefficients, index = area, length L^2 + 1.
    pub p: Vec<BigUint>,
    /// Primes whose runs produced the reconstruction, stability extra included.
    pub primes: PrimeSet,
}

/// Two-sided counts: coefficient k admits either piece as the distinguished
/// one, so g_k = p_k + p_{L^2 - k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GerrymanderPolynomial {
    pub l: usize,
    /// Dense coefficients, index = area, length L^2 + 1. Both ends are zero
    /// because a valid cut leaves neither piece empty.
    pub g: Vec<BigUint>,
    pub primes: PrimeSet,
}

impl GerrymanderPolynomial {
    /// Coefficient symmetry g_k = g_{L^2-k} holds by construction; this
    /// re-checks the stored data.
    pub fn is_symmetric(&self) -> bool {
        let n = self.l * self.l;
        (0..=n).all(|k| self.g[k] == self.g[n - k])
    }

    /// Whether the coefficients rise monotonically up to the central area.
    /// Observed on every computed board, reported rather than assumed.
    pub fn is_unimodal(&self) -> bool {
        let half = self.l * self.l / 2;
        (1..half).all(|k| self.g[k] <= self.g[k + 1])
    }

    pub fn sum(&self) -> BigUint {
        self.g.iter().sum()
    }
}

/// Primes needed before the stability extra: enough that their product
/// exceeds 2^(L^2), the count of all cell subsets, plus one for margin.
fn base_prime_count(l: usize, bits: u32) -> usize {
    (l * l).div_ceil(bits as usize) + 1
}

/// Runs `residues_for` over a growing prime batch until reconstruction with
/// n primes equals reconstruction with n+1, then returns the stable values
/// and the batch. `width` is the number of coefficients per run.
fn reconstruct_stable(
    l: usize,
    bits: u32,
    skip: usize,
    width: usize,
    residues_for: impl Fn(&[u64]) -> Result<Vec<Vec<u64>>, TransferError> + Sync,
) -> Result<(Vec<BigUint>, PrimeSet), AssembleError> {
    let base = base_prime_count(l, bits);
    let mut primes = gen_primes_skipping(bits, base + 1, skip)?;
    let mut runs = residues_for(&primes.primes)?;
    debug_assert!(runs.iter().all(|r| r.len() == width));

    for _ in 0..STABILITY_ROUNDS {
        let shorter = PrimeSet {
            bit_width: bits,
            primes: primes.primes[..primes.primes.len() - 1].to_vec(),
        };
        let full = reconstruct_each(&runs, &primes, width)?;
        let runs_short: Vec<Vec<u64>> = runs[..runs.len() - 1].to_vec();
        let part = reconstruct_each(&runs_short, &shorter, width)?;
        if full == part {
            return Ok((full, primes));
        }
        // The shorter product was too small; widen the batch by one.
        let grown = gen_primes_skipping(bits, primes.primes.len() + 1, skip)?;
        let extra = *grown.primes.last().expect("nonempty batch");
        runs.extend(residues_for(&[extra])?);
        primes = grown;
    }
    Err(AssembleError::Unstable(l, STABILITY_ROUNDS))
}

fn reconstruct_each(
    runs: &[Vec<u64>],
    primes: &PrimeSet,
    width: usize,
) -> Result<Vec<BigUint>, AssembleError> {
    let mut out = Vec::with_capacity(width);
    for k in 0..width {
        let value = ResidueValue {
            residues: runs.iter().map(|r| r[k]).collect(),
        };
        out.push(crt_reconstruct(&value, primes)?);
    }
    Ok(out)
}

/// Both sweep runs added, per prime. The two runs of one prime share nothing,
/// so they are forked as well.
fn one_sided_runs_poly(l: usize, primes: &[u64]) -> Result<Vec<Vec<u64>>, TransferError> {
    primes
        .par_iter()
        .map(|&p| {
            let (a, b) = rayon::join(
                || run_panel_poly(PanelKind::BottomAnchored, l, p),
                || run_panel_poly(PanelKind::SideAndInterior, l, p),
            );
            let (a, b) = (a?, b?);
            Ok(a.iter()
                .zip(&b)
                .map(|(&x, &y)| crate::modarith::addmod(x, y, p))
                .collect())
        })
        .collect()
}

fn one_sided_runs_scalar(l: usize, primes: &[u64]) -> Result<Vec<Vec<u64>>, TransferError> {
    primes
        .par_iter()
        .map(|&p| {
            let (a, b) = rayon::join(
                || run_panel_scalar(PanelKind::BottomAnchored, l, p),
                || run_panel_scalar(PanelKind::SideAndInterior, l, p),
            );
            Ok(vec![crate::modarith::addmod(a?, b?, p)])
        })
        .collect()
}

/// Exact one-sided counts p_{L,k} for the L x L board.
pub fn panel_total(l: usize) -> Result<PanelPolynomial, AssembleError> {
    panel_total_skipping(l, 0)
}

/// As `panel_total`, starting the prime scan `skip` primes below the bound.
/// Batches with non-overlapping skip ranges are disjoint, which is how the
/// independent-reconstruction cross-check gets a second opinion.
pub fn panel_total_skipping(l: usize, skip: usize) -> Result<PanelPolynomial, AssembleError> {
    let width = l * l + 1;
    let (p, primes) = reconstruct_stable(l, POLY_PRIME_BITS, skip, width, |ps| {
        one_sided_runs_poly(l, ps)
    })?;
    Ok(PanelPolynomial { l, p, primes })
}

/// Exact two-sided counts g_{L,k} for the L x L board.
pub fn gerrymander_polynomial(l: usize) -> Result<GerrymanderPolynomial, AssembleError> {
    let total = panel_total(l)?;
    let n = l * l;
    let mut g = vec![BigUint::zero(); n + 1];
    for k in 1..n {
        g[k] = &total.p[k] + &total.p[n - k];
    }
    Ok(GerrymanderPolynomial {
        l,
        g,
        primes: total.primes,
    })
}

/// Number of cuts of the L x L board into two pieces of equal area (the
/// central coefficient; zero area difference is impossible on odd boards,
/// where the closest-to-equal split is counted instead).
pub fn generalised_gerrymander(l: usize) -> Result<BigUint, AssembleError> {
    Ok(gerrymander_polynomial(l)?.g[l * l / 2].clone())
}

/// Equal-area cuts of the 2L x 2L board, halved so that each unordered pair
/// of pieces is counted once.
pub fn gerrymander(l: usize) -> Result<BigUint, AssembleError> {
    let doubled = generalised_gerrymander(2 * l)?;
    if (&doubled % 2u32) != BigUint::zero() {
        return Err(AssembleError::OddSplit(2 * l));
    }
    Ok(doubled / 2u32)
}

/// Total number of cuts of the L x L board into two pieces, irrespective of
/// area: the scalar pipeline, reaching larger boards than the polynomial one.
pub fn partition_count(l: usize) -> Result<BigUint, AssembleError> {
    Ok(partition_count_with_primes(l)?.0)
}

/// As `partition_count`, also returning the primes used (for run manifests).
pub fn partition_count_with_primes(l: usize) -> Result<(BigUint, PrimeSet), AssembleError> {
    let (mut totals, primes) = reconstruct_stable(l, SCALAR_PRIME_BITS, 0, 1, |ps| {
        one_sided_runs_scalar(l, ps)
    })?;
    Ok((totals.pop().expect("single total"), primes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{brute_cycles, brute_partitions, census_recombined, SpanFilter};

    fn small(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn one_sided_l3_matches_published_coefficients() {
        let t = panel_total(3).unwrap();
        assert_eq!(t.p, small(&[0, 9, 12, 14, 10, 6, 2, 0, 0, 0]));
    }

    #[test]
    fn one_sided_l4_matches_census() {
        let t = panel_total(4).unwrap();
        assert_eq!(t.p, small(&census_recombined(4).unwrap()));
    }

    #[test]
    fn polynomial_l3_matches_published_coefficients() {
        let g = gerrymander_polynomial(3).unwrap();
        assert_eq!(g.g, small(&[0, 9, 12, 16, 16, 16, 16, 12, 9, 0]));
    }

    #[test]
    fn polynomial_l4_matches_partition_census() {
        let g = gerrymander_polynomial(4).unwrap();
        assert_eq!(g.g, small(&brute_partitions(4, false).unwrap()));
    }

    #[test]
    fn polynomials_are_symmetric_and_observed_unimodal() {
        for l in 1..=6 {
            let g = gerrymander_polynomial(l).unwrap();
            assert!(g.is_symmetric(), "asymmetric at side {l}");
            assert!(g.is_unimodal(), "non-unimodal at side {l}");
        }
    }

    #[test]
    fn equal_split_counts_match_published_list() {
        let want: [u128; 10] = [
            0,
            4,
            16,
            140,
            2804,
            161036,
            27803749,
            14314228378,
            21838347160809,
            99704315229167288,
        ];
        for (i, &w) in want.iter().enumerate() {
            let got = generalised_gerrymander(i + 1).unwrap();
            assert_eq!(got, BigUint::from(w), "side {}", i + 1);
        }
    }

    #[test]
    fn doubled_board_sequence_starts_correctly() {
        assert_eq!(gerrymander(1).unwrap(), BigUint::from(2u32));
        assert_eq!(gerrymander(2).unwrap(), BigUint::from(70u32));
        assert_eq!(gerrymander(3).unwrap(), BigUint::from(80518u32));
    }

    #[test]
    fn partition_counts_match_published_list() {
        let want: [u64; 8] = [0, 6, 53, 627, 16213, 1123743, 221984391, 127561384993];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(partition_count(i + 1).unwrap(), BigUint::from(w));
        }
    }

    #[test]
    fn polynomial_sum_is_twice_the_scalar_total() {
        for l in 2..=5 {
            let g = gerrymander_polynomial(l).unwrap();
            let total = partition_count(l).unwrap();
            assert_eq!(g.sum(), total * 2u32);
        }
    }

    #[test]
    fn disjoint_prime_batches_reconstruct_identically() {
        let a = panel_total_skipping(4, 0).unwrap();
        let b = panel_total_skipping(4, a.primes.primes.len()).unwrap();
        assert!(a.primes.primes.iter().all(|p| !b.primes.primes.contains(p)));
        assert_eq!(a.p, b.p);
    }

    #[test]
    fn totals_sit_between_spanning_and_unrestricted_cycle_counts() {
        // An equal-area cut encloses at least one cycle that fits the board,
        // and any cycle on the shrunken board extends to a cut of the full
        // one, so the total is sandwiched between the two cycle censuses.
        for l in 3..=4 {
            let lower: u64 = brute_cycles(l - 2, l - 2, SpanFilter::FourSides)
                .unwrap()
                .iter()
                .sum();
            let upper: u64 = brute_cycles(l, l, SpanFilter::All).unwrap().iter().sum();
            let total = partition_count(l).unwrap();
            assert!(BigUint::from(lower) <= total);
            assert!(total <= BigUint::from(upper));
        }
    }
}
