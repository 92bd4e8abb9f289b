//! The fixed indeterminate alphabet.

use std::fmt;
use std::str::FromStr;

/// Number of slots in the alphabet: `n k r s x p q` followed by the weight
/// symbols `w1..w9`.
pub const NVARS: usize = 16;

/// Largest weight index available (`w1..=w9`).
pub const MAX_WEIGHTS: usize = NVARS - 7;

/// An indeterminate from the ordered alphabet `n < k < r < s < x < p < q < w1 < … < w9`
/// (earlier letters rank higher in the monomial order).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u8);

impl Var {
    pub const N: Var = Var(0);
    pub const K: Var = Var(1);
    pub const R: Var = Var(2);
    pub const S: Var = Var(3);
    pub const X: Var = Var(4);
    pub const P: Var = Var(5);
    pub const Q: Var = Var(6);

    /// Weight symbol `w_i` for `1 <= i <= MAX_WEIGHTS`.
    pub fn weight(i: usize) -> Var {
        assert!((1..=MAX_WEIGHTS).contains(&i), "weight index {i} out of range");
        Var((6 + i) as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Var {
        assert!(i < NVARS);
        Var(i as u8)
    }

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS).map(Var::from_index)
    }

    pub fn name(self) -> String {
        match self.0 {
            0 => "n".into(),
            1 => "k".into(),
            2 => "r".into(),
            3 => "s".into(),
            4 => "x".into(),
            5 => "p".into(),
            6 => "q".into(),
            i => format!("w{}", i - 6),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> Result<Var, String> {
        Ok(match s {
            "n" => Var::N,
            "k" => Var::K,
            "r" => Var::R,
            "s" => Var::S,
            "x" => Var::X,
            "p" => Var::P,
            "q" => Var::Q,
            _ => {
                let idx = s
                    .strip_prefix('w')
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|i| (1..=MAX_WEIGHTS).contains(i))
                    .ok_or_else(|| format!("unknown variable {s:?}"))?;
                Var::weight(idx)
            }
        })
    }
}
