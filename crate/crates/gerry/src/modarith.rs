//! Word-sized modular arithmetic and exact reconstruction.
//!
//! The enumeration runs once per prime with all counts reduced, then the
//! exact integers come back via the Chinese remainder theorem. Polynomial
//! runs use primes just under 2^30 so coefficient arithmetic stays in u64;
//! scalar runs use primes just under 2^62 with u128 intermediates.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModArithError {
    #[error("bit width {0} out of range 3..=62")]
    BadBitWidth(u32),
    #[error("not enough primes below 2^{bit_width} (wanted {wanted})")]
    NotEnoughPrimes { bit_width: u32, wanted: usize },
    #[error("residue count {got} does not match prime count {want}")]
    LengthMismatch { got: usize, want: usize },
    #[error("primes are not pairwise coprime")]
    NotCoprime,
}

/// A batch of distinct primes below `2^bit_width`, largest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet {
    pub bit_width: u32,
    pub primes: Vec<u64>,
}

/// One exact value, represented by its residues in `PrimeSet` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueValue {
    pub residues: Vec<u64>,
}

#[inline]
pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn submod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. This witness set decides primality for every
/// 64-bit input.
pub fn is_prime_u64(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n % w == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &w in &WITNESSES {
        let mut x = powmod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The largest `count` primes below `2^bit_width`, in descending order.
pub fn gen_primes(bit_width: u32, count: usize) -> Result<PrimeSet, ModArithError> {
    gen_primes_skipping(bit_width, count, 0)
}

/// As `gen_primes`, but skipping the first `skip` primes below the bound.
/// Two calls with disjoint skip ranges give disjoint sets, which is how the
/// reconstruction cross-check picks independent prime batches.
pub fn gen_primes_skipping(
    bit_width: u32,
    count: usize,
    skip: usize,
) -> Result<PrimeSet, ModArithError> {
    if !(3..=62).contains(&bit_width) {
        return Err(ModArithError::BadBitWidth(bit_width));
    }
    let mut primes = Vec::with_capacity(count);
    let mut skipped = 0usize;
    let mut n = (1u64 << bit_width) - 1;
    while primes.len() < count {
        if is_prime_u64(n) {
            if skipped < skip {
                skipped += 1;
            } else {
                primes.push(n);
            }
        }
        n = n.checked_sub(2).filter(|&v| v >= 3).ok_or(
            ModArithError::NotEnoughPrimes {
                bit_width,
                wanted: count,
            },
        )?;
        // Walking odd numbers skips 2, which never matters for widths >= 3.
    }
    Ok(PrimeSet { bit_width, primes })
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid on signed 128-bit words; p is prime and a != 0 mod p.
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inputs were not coprime");
    old_s.rem_euclid(p as i128) as u64
}

/// Reduce an exact value to its residues.
pub fn reduce_biguint(v: &BigUint, primes: &PrimeSet) -> ResidueValue {
    let residues = primes
        .primes
        .iter()
        .map(|&p| (v % BigUint::from(p)).try_into().expect("residue fits u64"))
        .collect();
    ResidueValue { residues }
}

/// Rebuild the exact value from residues. The result is the unique
/// representative in `0..product(primes)`.
pub fn crt_reconstruct(
    value: &ResidueValue,
    primes: &PrimeSet,
) -> Result<BigUint, ModArithError> {
    if value.residues.len() != primes.primes.len() {
        return Err(ModArithError::LengthMismatch {
            got: value.residues.len(),
            want: primes.primes.len(),
        });
    }
    let mut modulus = BigUint::from(1u32);
    for &p in &primes.primes {
        modulus *= p;
    }
    let mut acc = BigUint::zero();
    for (&r, &p) in value.residues.iter().zip(&primes.primes) {
        debug_assert!(r < p);
        let m_i = &modulus / p;
        let m_i_mod_p: u64 = (&m_i % BigUint::from(p)).try_into().unwrap();
        if m_i_mod_p == 0 {
            return Err(ModArithError::NotCoprime);
        }
        let c = mulmod(r, inv_mod(m_i_mod_p, p), p);
        acc += m_i * c;
    }
    Ok(acc % modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    // Independent oracle: trial division.
    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    struct Lcg(u64);
    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            self.0
        }
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime_u64(n), is_prime_trial(n), "n = {n}");
        }
    }

    #[test]
    fn largest_primes_below_the_working_widths() {
        // 2^30 - 35 and 2^62 - 57, cross-checked against an independent
        // prev_prime implementation during development.
        assert_eq!(gen_primes(30, 1).unwrap().primes, vec![1_073_741_789]);
        assert_eq!(
            gen_primes(62, 1).unwrap().primes,
            vec![4_611_686_018_427_387_847]
        );
        // Nothing above them is prime below the respective bounds.
        for n in 1_073_741_790..(1u64 << 30) {
            assert!(!is_prime_u64(n));
        }
        for n in 4_611_686_018_427_387_848..(1u64 << 62) {
            assert!(!is_prime_u64(n));
        }
    }

    #[test]
    fn prime_batches_are_descending_distinct_and_prime() {
        let ps = gen_primes(30, 12).unwrap();
        assert_eq!(ps.primes.len(), 12);
        for w in ps.primes.windows(2) {
            assert!(w[0] > w[1]);
        }
        for &p in &ps.primes {
            assert!(is_prime_u64(p));
            assert!(p < (1 << 30));
            // Trial division re-verifies the whole batch independently.
            assert!(is_prime_trial(p));
        }
        // Skipping yields a disjoint continuation.
        let tail = gen_primes_skipping(30, 12, 12).unwrap();
        assert_eq!(gen_primes(30, 24).unwrap().primes[12..], tail.primes);
        assert!(ps.primes.iter().all(|p| !tail.primes.contains(p)));
    }

    #[test]
    fn modular_ops_match_biguint() {
        let p30 = gen_primes(30, 1).unwrap().primes[0];
        let p62 = gen_primes(62, 1).unwrap().primes[0];
        let mut rng = Lcg(0x9e3779b97f4a7c15);
        for &p in &[p30, p62] {
            let big_p = BigUint::from(p);
            for _ in 0..1_000_000 {
                let a = rng.next() % p;
                let b = rng.next() % p;
                let m = mulmod(a, b, p);
                assert_eq!(
                    BigUint::from(m),
                    (BigUint::from(a) * b) % &big_p
                );
                assert_eq!(
                    BigUint::from(addmod(a, b, p)),
                    (BigUint::from(a) + b) % &big_p
                );
                assert_eq!(
                    (BigUint::from(submod(a, b, p)) + b) % &big_p,
                    BigUint::from(a)
                );
            }
        }
    }

    #[test]
    fn crt_small_example() {
        // x = 2 mod 3, x = 3 mod 5 -> x = 8.
        let primes = PrimeSet {
            bit_width: 3,
            primes: vec![3, 5],
        };
        let v = ResidueValue {
            residues: vec![2, 3],
        };
        assert_eq!(crt_reconstruct(&v, &primes).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn crt_round_trips_wide_values() {
        // Values around 200 bits across seven 30-bit primes.
        let primes = gen_primes(30, 7).unwrap();
        let mut rng = Lcg(42);
        for _ in 0..200 {
            let mut v = BigUint::one();
            for _ in 0..3 {
                v = (v << 64) | BigUint::from(rng.next());
            }
            let reduced = reduce_biguint(&v, &primes);
            assert_eq!(crt_reconstruct(&reduced, &primes).unwrap(), v);
        }
    }

    #[test]
    fn crt_is_invariant_under_prime_order() {
        let base = gen_primes(30, 5).unwrap();
        let v = BigUint::parse_bytes(b"14314228378", 10).unwrap();
        let want = crt_reconstruct(&reduce_biguint(&v, &base), &base).unwrap();
        assert_eq!(want, v);
        // Same primes, shuffled.
        let mut primes = base.primes.clone();
        primes.rotate_left(2);
        primes.swap(0, 3);
        let shuffled = PrimeSet {
            bit_width: 30,
            primes,
        };
        assert_eq!(
            crt_reconstruct(&reduce_biguint(&v, &shuffled), &shuffled).unwrap(),
            v
        );
    }

    #[test]
    fn crt_rejects_mismatched_lengths() {
        let primes = gen_primes(30, 3).unwrap();
        let v = ResidueValue {
            residues: vec![1, 2],
        };
        assert!(matches!(
            crt_reconstruct(&v, &primes),
            Err(ModArithError::LengthMismatch { got: 2, want: 3 })
        ));
    }

    #[test]
    fn width_and_exhaustion_errors() {
        assert!(matches!(
            gen_primes(2, 1),
            Err(ModArithError::BadBitWidth(2))
        ));
        assert!(matches!(
            gen_primes(63, 1),
            Err(ModArithError::BadBitWidth(63))
        ));
        // There are only four primes below 2^3 (7, 5, 3, 2); we walk odds only.
        assert!(matches!(
            gen_primes(3, 4),
            Err(ModArithError::NotEnoughPrimes { .. })
        ));
    }
}
