//! Exact arithmetic in the discrete Heisenberg group.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The matrix `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HeisElem {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl HeisElem {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        HeisElem { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn identity() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn x() -> Self {
        Self::new(1, 0, 0)
    }

    pub fn y() -> Self {
        Self::new(0, 1, 0)
    }

    pub fn z() -> Self {
        Self::new(0, 0, 1)
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    /// `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
    pub fn mul(&self, o: &HeisElem) -> HeisElem {
        HeisElem { a: &self.a + &o.a, b: &self.b + &o.b, c: &self.c + &o.c + &self.a * &o.b }
    }

    /// `(-a, -b, a b - c)`.
    pub fn inv(&self) -> HeisElem {
        HeisElem { a: -&self.a, b: -&self.b, c: &self.a * &self.b - &self.c }
    }

    /// `g h g^-1 h^-1`.
    pub fn commutator(&self, h: &HeisElem) -> HeisElem {
        self.mul(h).mul(&self.inv()).mul(&h.inv())
    }

    pub fn pow(&self, n: i64) -> HeisElem {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut acc = HeisElem::identity();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            sq = sq.mul(&sq);
            k >>= 1;
        }
        acc
    }

    pub fn matrix(&self) -> [[BigInt; 3]; 3] {
        let (z, o) = (BigInt::zero(), BigInt::one());
        [[o.clone(), self.a.clone(), self.c.clone()], [z.clone(), o.clone(), self.b.clone()], [z.clone(), z, o]]
    }

    /// Entries as `i64` when they fit.
    pub fn small(&self) -> Option<(i64, i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?))
    }

    /// Whether the element is central (`a = b = 0`).
    pub fn is_central(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn abs_c(&self) -> BigInt {
        self.c.abs()
    }
}

/// Product of 3x3 integer matrices, used to cross-check the tuple law.
pub fn matrix_mul(p: &[[BigInt; 3]; 3], q: &[[BigInt; 3]; 3]) -> [[BigInt; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &p[i][k] * &q[k][j]).sum()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    X,
    XInv,
    Y,
    YInv,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::X, Gen::XInv, Gen::Y, Gen::YInv];

    pub fn elem(self) -> HeisElem {
        match self {
            Gen::X => HeisElem::new(1, 0, 0),
            Gen::XInv => HeisElem::new(-1, 0, 0),
            Gen::Y => HeisElem::new(0, 1, 0),
            Gen::YInv => HeisElem::new(0, -1, 0),
        }
    }

    pub fn inverse(self) -> Gen {
        match self {
            Gen::X => Gen::XInv,
            Gen::XInv => Gen::X,
            Gen::Y => Gen::YInv,
            Gen::YInv => Gen::Y,
        }
    }

    fn letter(self) -> (char, i64) {
        match self {
            Gen::X => ('X', 1),
            Gen::XInv => ('X', -1),
            Gen::Y => ('Y', 1),
            Gen::YInv => ('Y', -1),
        }
    }
}

/// A word in `X^+-1, Y^+-1`. Displayed in run-length form, e.g. `X^2 Y X^-2 Y^-1`;
/// the empty word is `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn new(gens: Vec<Gen>) -> Self {
        Word(gens)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `g^n` for a generator `g`; negative `n` uses the inverse letter.
    pub fn power(g: Gen, n: i64) -> Word {
        let letter = if n < 0 { g.inverse() } else { g };
        Word(vec![letter; n.unsigned_abs() as usize])
    }

    pub fn concat(mut self, other: &Word) -> Word {
        self.0.extend_from_slice(&other.0);
        self
    }

    pub fn eval(&self) -> HeisElem {
        self.0.iter().fold(HeisElem::identity(), |acc, g| acc.mul(&g.elem()))
    }

    /// The reversed word with every letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    /// `[X^a, Y^b] = X^a Y^b X^-a Y^-b`.
    pub fn commutator_word(a: i64, b: i64) -> Word {
        Word::power(Gen::X, a)
            .concat(&Word::power(Gen::Y, b))
            .concat(&Word::power(Gen::X, -a))
            .concat(&Word::power(Gen::Y, -b))
    }

    /// Cancels adjacent inverse pairs.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Gen> = Vec::with_capacity(self.0.len());
        for &g in &self.0 {
            if out.last() == Some(&g.inverse()) {
                out.pop();
            } else {
                out.push(g);
            }
        }
        Word(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let mut runs: Vec<(char, i64)> = Vec::new();
        for g in &self.0 {
            let (c, e) = g.letter();
            match runs.last_mut() {
                Some((lc, le)) if *lc == c && le.signum() == e => *le += e,
                _ => runs.push((c, e)),
            }
        }
        let parts: Vec<String> =
            runs.iter().map(|(c, e)| if *e == 1 { c.to_string() } else { format!("{c}^{e}") }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Accepts run-length tokens (`X^3`, `Y^-1`, `X`) separated by spaces,
    /// or packed letters where lower case means the inverse (`XYxy`).
    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::default());
        }
        let bad = || Error::Parameter(format!("not a word in X, Y: {s:?}"));
        let mut gens = Vec::new();
        for tok in s.split_whitespace() {
            if !tok.contains('^') && tok.chars().all(|c| "XYxy".contains(c)) {
                for c in tok.chars() {
                    gens.push(match c {
                        'X' => Gen::X,
                        'x' => Gen::XInv,
                        'Y' => Gen::Y,
                        _ => Gen::YInv,
                    });
                }
                continue;
            }
            let (base, exp) = tok.split_once('^').ok_or_else(bad)?;
            let n: i64 = exp.parse().map_err(|_| bad())?;
            let g = match base {
                "X" => Gen::X,
                "Y" => Gen::Y,
                _ => return Err(bad()),
            };
            gens.extend(Word::power(g, n).0);
        }
        Ok(Word(gens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_products() {
        assert_eq!(HeisElem::x().mul(&HeisElem::y()), HeisElem::new(1, 1, 1));
        assert_eq!(HeisElem::x().commutator(&HeisElem::y()), HeisElem::z());
        assert_eq!(HeisElem::x().pow(2).commutator(&HeisElem::y().pow(2)), HeisElem::new(0, 0, 4));
        let g = HeisElem::new(3, -2, 7);
        assert!(g.mul(&g.inv()).is_identity());
        assert_eq!(g.pow(-3), g.inv().pow(3));
    }

    #[test]
    fn witness_identity_up_to_64() {
        for n in 1..=64i64 {
            assert_eq!(Word::commutator_word(n, n).eval(), HeisElem::new(0, 0, n * n));
            assert_eq!(HeisElem::x().pow(n).commutator(&HeisElem::y().pow(n)), HeisElem::z().pow(n * n));
        }
    }

    #[test]
    fn words_print_and_parse() {
        let w = Word::commutator_word(2, 1);
        assert_eq!(w.to_string(), "X^2 Y X^-2 Y^-1");
        assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
        assert_eq!("XYxy".parse::<Word>().unwrap().eval(), HeisElem::z());
        assert_eq!("e".parse::<Word>().unwrap(), Word::default());
        assert!("X^a".parse::<Word>().is_err());
        assert!(w.clone().concat(&w.inverse()).reduced().is_empty());
    }
}
