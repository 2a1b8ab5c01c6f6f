//! Boundary signatures and their Motzkin-path ranking.
//!
//! A signature records the state of the sweep boundary: one slot per
//! horizontal edge level plus one slot for the kink vertex, bottom to top.
//! Arc slots form a balanced parenthesis string, so reading a signature as
//! level/up/down steps gives a Motzkin path. Ranking those paths in
//! lexicographic order (level < up < down) yields a minimal perfect hash,
//! which is what lets the count tables be flat arrays.

use std::sync::{Mutex, OnceLock};
use thiserror::Error;

/// Widest supported boundary: `width + 1` slots at 2 bits each must fit a u64.
pub const MAX_WIDTH: usize = 30;

/// State of one signature slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SigState {
    /// No arc crosses here.
    Empty,
    /// Lower end of an arc: `(`.
    LowerArc,
    /// Upper end of an arc: `)`.
    UpperArc,
    /// Vertex with both incident cell edges occupied. Only legal at the kink.
    Blocked,
}

impl SigState {
    fn code(self) -> u8 {
        match self {
            SigState::Empty => 0,
            SigState::LowerArc => 1,
            SigState::UpperArc => 2,
            SigState::Blocked => 3,
        }
    }

    fn from_code(c: u8) -> SigState {
        match c {
            0 => SigState::Empty,
            1 => SigState::LowerArc,
            2 => SigState::UpperArc,
            _ => SigState::Blocked,
        }
    }

    fn glyph(self) -> char {
        match self {
            SigState::Empty => '-',
            SigState::LowerArc => '(',
            SigState::UpperArc => ')',
            SigState::Blocked => '*',
        }
    }
}

/// One step of a Motzkin path.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    Level,
    Up,
    Down,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("signature width {0} out of range 1..={MAX_WIDTH}")]
    WidthOutOfRange(usize),
    #[error("kink position {kink} out of range for {slots} slots")]
    KinkOutOfRange { kink: usize, slots: usize },
    #[error("arc slots are not balanced")]
    Unbalanced,
    #[error("blocked state at slot {0}, which is not the kink vertex")]
    BlockedOffKink(usize),
    #[error("more than one blocked slot")]
    MultipleBlocked,
    #[error("expected an unblocked signature")]
    UnexpectedBlocked,
    #[error("expected a blocked signature")]
    ExpectedBlocked,
    #[error("rank {rank} out of range 1..={count}")]
    RankOutOfRange { rank: u64, count: u64 },
    #[error("signature width {got} does not match space width {want}")]
    WidthMismatch { got: usize, want: usize },
}

/// Number of Motzkin paths of length `n`. Cached across calls.
///
/// Panics if the count overflows u64, which cannot happen for the widths this
/// crate accepts (`n <= MAX_WIDTH + 1`).
pub fn motzkin_count(n: usize) -> u64 {
    static CACHE: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![1, 1]));
    let mut nums = cache.lock().unwrap();
    while nums.len() <= n {
        let m = nums.len();
        // M_m = M_{m-1} + sum_{k=0}^{m-2} M_k * M_{m-2-k}
        let mut v = nums[m - 1];
        for k in 0..=m - 2 {
            v = v
                .checked_add(nums[k].checked_mul(nums[m - 2 - k]).expect("overflow"))
                .expect("overflow");
        }
        nums.push(v);
    }
    nums[n]
}

/// Ranking tables for Motzkin paths of a fixed length.
///
/// `ways[i][h]` counts the admissible completions of length `len - i` that
/// start at height `h` and return to height 0 without going negative. Ranks
/// are 1-based and ordered lexicographically with level < up < down.
pub struct PathTable {
    len: usize,
    ways: Vec<Vec<u64>>,
}

impl PathTable {
    pub fn new(len: usize) -> PathTable {
        let mut ways = vec![vec![0u64; len + 2]; len + 1];
        ways[len][0] = 1;
        for i in (0..len).rev() {
            for h in 0..=len {
                let mut v = ways[i + 1][h]; // level
                v += ways[i + 1][h + 1]; // up
                if h > 0 {
                    v += ways[i + 1][h - 1]; // down
                }
                ways[i][h] = v;
            }
        }
        PathTable { len, ways }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total number of paths, i.e. the Motzkin number for this length.
    pub fn count(&self) -> u64 {
        self.ways[0][0]
    }

    /// Rank of a path given as codes 0 = level, 1 = up, 2 = down.
    ///
    /// The caller guarantees the codes form a valid path of the right length;
    /// only debug builds check.
    pub fn rank_codes(&self, codes: &[u8]) -> u64 {
        debug_assert_eq!(codes.len(), self.len);
        let mut rank = 1u64;
        let mut h = 0usize;
        for (i, &c) in codes.iter().enumerate() {
            match c {
                0 => {}
                1 => {
                    rank += self.ways[i + 1][h];
                    h += 1;
                }
                _ => {
                    debug_assert!(h > 0, "path dips below zero");
                    rank += self.ways[i + 1][h] + self.ways[i + 1][h + 1];
                    h -= 1;
                }
            }
        }
        debug_assert_eq!(h, 0, "path does not return to zero");
        rank
    }

    /// Inverse of `rank_codes`. `out.len()` must equal the path length.
    pub fn unrank_into(&self, rank: u64, out: &mut [u8]) {
        debug_assert_eq!(out.len(), self.len);
        debug_assert!(rank >= 1 && rank <= self.count());
        let mut r = rank - 1;
        let mut h = 0usize;
        for (i, slot) in out.iter_mut().enumerate() {
            let level = self.ways[i + 1][h];
            if r < level {
                *slot = 0;
                continue;
            }
            r -= level;
            let up = self.ways[i + 1][h + 1];
            if r < up {
                *slot = 1;
                h += 1;
                continue;
            }
            r -= up;
            *slot = 2;
            h -= 1;
        }
    }
}

/// A boundary signature: `width + 1` slots packed two bits each.
///
/// Slot `i` is the state at height `i`; `kink_pos` marks which slot is the
/// vertex. Everything is validated on construction, so a `Signature` value is
/// always well formed.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    packed: u64,
    slots: u8,
    kink_pos: u8,
}

impl Signature {
    pub fn from_states(states: &[SigState], kink_pos: usize) -> Result<Signature, SignatureError> {
        let slots = states.len();
        if slots < 2 || slots > MAX_WIDTH + 1 {
            return Err(SignatureError::WidthOutOfRange(slots.saturating_sub(1)));
        }
        if kink_pos >= slots {
            return Err(SignatureError::KinkOutOfRange {
                kink: kink_pos,
                slots,
            });
        }
        let mut depth = 0i32;
        let mut blocked = None;
        for (i, &s) in states.iter().enumerate() {
            match s {
                SigState::Empty => {}
                SigState::LowerArc => depth += 1,
                SigState::UpperArc => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(SignatureError::Unbalanced);
                    }
                }
                SigState::Blocked => {
                    if blocked.is_some() {
                        return Err(SignatureError::MultipleBlocked);
                    }
                    if i != kink_pos {
                        return Err(SignatureError::BlockedOffKink(i));
                    }
                    blocked = Some(i);
                }
            }
        }
        if depth != 0 {
            return Err(SignatureError::Unbalanced);
        }
        let mut packed = 0u64;
        for (i, &s) in states.iter().enumerate() {
            packed |= (s.code() as u64) << (2 * i);
        }
        Ok(Signature {
            packed,
            slots: slots as u8,
            kink_pos: kink_pos as u8,
        })
    }

    /// Slot count, i.e. `width + 1`.
    pub fn slots(&self) -> usize {
        self.slots as usize
    }

    pub fn width(&self) -> usize {
        self.slots as usize - 1
    }

    pub fn kink_pos(&self) -> usize {
        self.kink_pos as usize
    }

    pub fn state(&self, i: usize) -> SigState {
        assert!(i < self.slots());
        SigState::from_code(((self.packed >> (2 * i)) & 0b11) as u8)
    }

    pub fn states(&self) -> Vec<SigState> {
        (0..self.slots()).map(|i| self.state(i)).collect()
    }

    pub fn is_blocked(&self) -> bool {
        self.state(self.kink_pos()) == SigState::Blocked
    }

    /// The Motzkin path read off an unblocked signature.
    pub fn to_steps(&self) -> Result<Vec<Step>, SignatureError> {
        if self.is_blocked() {
            return Err(SignatureError::UnexpectedBlocked);
        }
        Ok((0..self.slots())
            .map(|i| match self.state(i) {
                SigState::Empty => Step::Level,
                SigState::LowerArc => Step::Up,
                _ => Step::Down,
            })
            .collect())
    }
}

impl std::fmt::Debug for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.slots()).map(|i| self.state(i).glyph()).collect();
        write!(f, "Signature({s}, kink {})", self.kink_pos)
    }
}

/// Hash tables for all signatures of one boundary width.
///
/// Unblocked signatures of width W are Motzkin paths of length W + 1;
/// blocked ones drop their kink slot and are paths of length W. Both hashes
/// are minimal and perfect: they cover exactly 1..=count.
pub struct SignatureSpace {
    width: usize,
    phi: PathTable,
    psi: PathTable,
}

impl SignatureSpace {
    pub fn new(width: usize) -> Result<SignatureSpace, SignatureError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(SignatureError::WidthOutOfRange(width));
        }
        Ok(SignatureSpace {
            width,
            phi: PathTable::new(width + 1),
            psi: PathTable::new(width),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of unblocked signatures: the Motzkin number for width + 1.
    pub fn unblocked_count(&self) -> u64 {
        self.phi.count()
    }

    /// Number of blocked signatures at any fixed kink: the Motzkin number for
    /// the width itself.
    pub fn blocked_count(&self) -> u64 {
        self.psi.count()
    }

    pub fn hash_unblocked(&self, sig: &Signature) -> Result<u64, SignatureError> {
        self.check_width(sig)?;
        if sig.is_blocked() {
            return Err(SignatureError::UnexpectedBlocked);
        }
        let codes: Vec<u8> = (0..sig.slots()).map(|i| sig.state(i).code()).collect();
        Ok(self.phi.rank_codes(&codes))
    }

    pub fn hash_blocked(&self, sig: &Signature) -> Result<u64, SignatureError> {
        self.check_width(sig)?;
        if !sig.is_blocked() {
            return Err(SignatureError::ExpectedBlocked);
        }
        let codes: Vec<u8> = (0..sig.slots())
            .filter(|&i| i != sig.kink_pos())
            .map(|i| sig.state(i).code())
            .collect();
        Ok(self.psi.rank_codes(&codes))
    }

    /// Signature for an unblocked rank. The kink is placed at the top slot,
    /// the state a fresh column starts in.
    pub fn unhash_unblocked(&self, rank: u64) -> Result<Signature, SignatureError> {
        if rank < 1 || rank > self.unblocked_count() {
            return Err(SignatureError::RankOutOfRange {
                rank,
                count: self.unblocked_count(),
            });
        }
        let mut codes = vec![0u8; self.width + 1];
        self.phi.unrank_into(rank, &mut codes);
        let states: Vec<SigState> = codes.iter().map(|&c| SigState::from_code(c)).collect();
        Signature::from_states(&states, self.width)
    }

    /// Signature for a blocked rank with the blocked vertex at `kink_pos`.
    pub fn unhash_blocked(&self, rank: u64, kink_pos: usize) -> Result<Signature, SignatureError> {
        if rank < 1 || rank > self.blocked_count() {
            return Err(SignatureError::RankOutOfRange {
                rank,
                count: self.blocked_count(),
            });
        }
        if kink_pos > self.width {
            return Err(SignatureError::KinkOutOfRange {
                kink: kink_pos,
                slots: self.width + 1,
            });
        }
        let mut codes = vec![0u8; self.width];
        self.psi.unrank_into(rank, &mut codes);
        let mut states = Vec::with_capacity(self.width + 1);
        for (i, &c) in codes.iter().enumerate() {
            if i == kink_pos {
                states.push(SigState::Blocked);
            }
            states.push(SigState::from_code(c));
        }
        if kink_pos == self.width {
            states.push(SigState::Blocked);
        }
        Signature::from_states(&states, kink_pos)
    }

    fn check_width(&self, sig: &Signature) -> Result<(), SignatureError> {
        if sig.width() != self.width {
            return Err(SignatureError::WidthMismatch {
                got: sig.width(),
                want: self.width,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent oracle: enumerate Motzkin paths recursively, trying steps
    // in the order level, up, down so the output is already in lex order.
    fn enumerate_paths(len: usize) -> Vec<Vec<u8>> {
        fn go(len: usize, h: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if cur.len() == len {
                if h == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            // Prune paths that cannot return to zero in the remaining steps.
            if h > len - cur.len() {
                return;
            }
            for step in 0u8..3 {
                if step == 2 && h == 0 {
                    continue;
                }
                cur.push(step);
                let nh = match step {
                    0 => h,
                    1 => h + 1,
                    _ => h - 1,
                };
                go(len, nh, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(len, 0, &mut Vec::new(), &mut out);
        out
    }

    fn sig(s: &str, kink: usize) -> Signature {
        let states: Vec<SigState> = s
            .chars()
            .map(|c| match c {
                '-' => SigState::Empty,
                '(' => SigState::LowerArc,
                ')' => SigState::UpperArc,
                '*' => SigState::Blocked,
                _ => panic!("bad glyph {c}"),
            })
            .collect();
        Signature::from_states(&states, kink).unwrap()
    }

    #[test]
    fn motzkin_small_values() {
        let expect = [1u64, 1, 2, 4, 9, 21, 51, 127, 323, 835, 2188];
        for (n, &m) in expect.iter().enumerate() {
            assert_eq!(motzkin_count(n), m, "n = {n}");
        }
    }

    #[test]
    fn motzkin_matches_enumeration() {
        for n in 0..=12 {
            assert_eq!(
                motzkin_count(n),
                enumerate_paths(n).len() as u64,
                "n = {n}"
            );
        }
    }

    #[test]
    fn path_counts_match_motzkin() {
        for len in 1..=16 {
            assert_eq!(PathTable::new(len).count(), motzkin_count(len));
        }
    }

    #[test]
    fn ranks_are_lexicographic_and_bijective() {
        // Covers every width the blocked and unblocked hashes use up to W = 8.
        for len in 1..=9 {
            let table = PathTable::new(len);
            let paths = enumerate_paths(len);
            assert_eq!(paths.len() as u64, table.count());
            let mut buf = vec![0u8; len];
            for (pos, path) in paths.iter().enumerate() {
                let rank = table.rank_codes(path);
                assert_eq!(rank, pos as u64 + 1, "path {path:?}");
                table.unrank_into(rank, &mut buf);
                assert_eq!(&buf, path);
            }
        }
    }

    #[test]
    fn all_empty_signature_ranks_first() {
        for w in 1..=10 {
            let space = SignatureSpace::new(w).unwrap();
            let empty = Signature::from_states(&vec![SigState::Empty; w + 1], w).unwrap();
            assert_eq!(space.hash_unblocked(&empty).unwrap(), 1);
            assert_eq!(space.unhash_unblocked(1).unwrap(), empty);
        }
    }

    #[test]
    fn blocked_hash_drops_the_kink_slot() {
        // Width 2, blocked at the kink, remaining slots empty: the residual
        // is the all-level path of length 2, which ranks first.
        let space = SignatureSpace::new(2).unwrap();
        for kink in 0..=2 {
            let mut states = vec![SigState::Empty; 3];
            states[kink] = SigState::Blocked;
            let s = Signature::from_states(&states, kink).unwrap();
            assert_eq!(space.hash_blocked(&s).unwrap(), 1);
            assert_eq!(space.unhash_blocked(1, kink).unwrap(), s);
        }
    }

    #[test]
    fn blocked_hash_is_bijective_per_kink() {
        let space = SignatureSpace::new(4).unwrap();
        for kink in 0..=4 {
            for rank in 1..=space.blocked_count() {
                let s = space.unhash_blocked(rank, kink).unwrap();
                assert!(s.is_blocked());
                assert_eq!(s.kink_pos(), kink);
                assert_eq!(space.hash_blocked(&s).unwrap(), rank);
            }
        }
    }

    #[test]
    fn to_steps_maps_states() {
        let s = sig("()-", 2);
        assert_eq!(s.to_steps().unwrap(), vec![Step::Up, Step::Down, Step::Level]);
    }

    #[test]
    fn unblocked_hash_is_minimal_perfect() {
        for w in 1..=8 {
            let space = SignatureSpace::new(w).unwrap();
            let mut seen = vec![false; space.unblocked_count() as usize + 1];
            for path in enumerate_paths(w + 1) {
                let states: Vec<SigState> =
                    path.iter().map(|&c| SigState::from_code(c)).collect();
                let s = Signature::from_states(&states, w).unwrap();
                let rank = space.hash_unblocked(&s).unwrap() as usize;
                assert!(!seen[rank]);
                seen[rank] = true;
                assert_eq!(space.unhash_unblocked(rank as u64).unwrap(), s);
            }
            assert!(seen[1..].iter().all(|&b| b));
        }
    }

    #[test]
    fn validation_rejects_malformed_signatures() {
        use SignatureError::*;
        let states = |s: &str| -> Vec<SigState> {
            s.chars()
                .map(|c| match c {
                    '-' => SigState::Empty,
                    '(' => SigState::LowerArc,
                    ')' => SigState::UpperArc,
                    _ => SigState::Blocked,
                })
                .collect()
        };
        assert_eq!(
            Signature::from_states(&states(")("), 1).unwrap_err(),
            Unbalanced
        );
        assert_eq!(
            Signature::from_states(&states("(()"), 2).unwrap_err(),
            Unbalanced
        );
        assert_eq!(
            Signature::from_states(&states("*-("), 2).unwrap_err(),
            BlockedOffKink(0)
        );
        assert_eq!(
            Signature::from_states(&states("*-*"), 0).unwrap_err(),
            MultipleBlocked
        );
        assert_eq!(
            Signature::from_states(&states("-"), 0).unwrap_err(),
            WidthOutOfRange(0)
        );
        let wide = vec![SigState::Empty; MAX_WIDTH + 2];
        assert!(matches!(
            Signature::from_states(&wide, 0).unwrap_err(),
            WidthOutOfRange(_)
        ));
        assert!(matches!(
            Signature::from_states(&states("--"), 5).unwrap_err(),
            KinkOutOfRange { .. }
        ));
    }

    #[test]
    fn packing_survives_round_trips() {
        let s = sig("(()-)*", 5);
        assert_eq!(s.states().len(), 6);
        assert_eq!(s.state(0), SigState::LowerArc);
        assert_eq!(s.state(3), SigState::Empty);
        assert_eq!(s.state(5), SigState::Blocked);
        let again = Signature::from_states(&s.states(), s.kink_pos()).unwrap();
        assert_eq!(s, again);
    }

    proptest! {
        #[test]
        fn unblocked_round_trip(w in 1usize..=10, seed in any::<u64>()) {
            let space = SignatureSpace::new(w).unwrap();
            let rank = seed % space.unblocked_count() + 1;
            let s = space.unhash_unblocked(rank).unwrap();
            prop_assert_eq!(space.hash_unblocked(&s).unwrap(), rank);
            let rebuilt = Signature::from_states(&s.states(), s.kink_pos()).unwrap();
            prop_assert_eq!(s, rebuilt);
        }

        #[test]
        fn blocked_round_trip(w in 1usize..=10, seed in any::<u64>(), kink_seed in any::<usize>()) {
            let space = SignatureSpace::new(w).unwrap();
            let rank = seed % space.blocked_count() + 1;
            let kink = kink_seed % (w + 1);
            let s = space.unhash_blocked(rank, kink).unwrap();
            prop_assert_eq!(space.hash_blocked(&s).unwrap(), rank);
        }
    }
}
