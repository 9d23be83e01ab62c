//! Word lengths by breadth-first search in the Cayley graph, and the
//! distortion table of the center.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::group::{Gen, HeisElem, Word};
use crate::error::{Error, Result};

type Key = (i64, i64, i64);

fn step(g: Key, s: Gen) -> Key {
    let (a, b, c) = g;
    match s {
        Gen::X => (a + 1, b, c),
        Gen::XInv => (a - 1, b, c),
        Gen::Y => (a, b + 1, c + a),
        Gen::YInv => (a, b - 1, c - a),
    }
}

/// Default cap on stored states; the radius-14 ball has 16381 elements, and
/// the ball grows like `r^4`.
pub const DEFAULT_MAX_STATES: usize = 5_000_000;

/// The ball of a given radius about the identity, with the last letter of a
/// geodesic for each element.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    radius: usize,
    seen: HashMap<Key, (u16, Option<Gen>)>,
    sizes: Vec<usize>,
}

impl CayleyBall {
    /// Layered BFS; fails with a resource error, naming the last complete
    /// radius, once `max_states` would be exceeded.
    pub fn new(radius: usize, max_states: usize) -> Result<Self> {
        let mut seen: HashMap<Key, (u16, Option<Gen>)> = HashMap::new();
        seen.insert((0, 0, 0), (0, None));
        let mut frontier = vec![(0, 0, 0)];
        let mut sizes = vec![1];
        for r in 1..=radius {
            let mut next = Vec::with_capacity(frontier.len() * 3);
            for &g in &frontier {
                for s in Gen::ALL {
                    let h = step(g, s);
                    if !seen.contains_key(&h) {
                        seen.insert(h, (r as u16, Some(s)));
                        next.push(h);
                    }
                }
            }
            if seen.len() > max_states {
                return Err(Error::Resource {
                    msg: format!("Cayley ball of radius {r} exceeds {max_states} states"),
                    reached: r - 1,
                });
            }
            sizes.push(seen.len());
            frontier = next;
        }
        Ok(CayleyBall { radius, seen, sizes })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Cumulative ball sizes for radii `0..=radius`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Exact word length, or `None` when it exceeds the radius.
    pub fn length(&self, g: &HeisElem) -> Option<usize> {
        let k = g.small()?;
        self.seen.get(&k).map(|(d, _)| *d as usize)
    }

    /// A geodesic word for `g`, when it lies in the ball.
    pub fn geodesic(&self, g: &HeisElem) -> Option<Word> {
        let mut k = g.small()?;
        let mut rev = Vec::new();
        loop {
            let (_, last) = *self.seen.get(&k)?;
            match last {
                None => break,
                Some(s) => {
                    rev.push(s);
                    k = step(k, s.inverse());
                }
            }
        }
        rev.reverse();
        Some(Word(rev))
    }

    pub fn elements(&self) -> impl Iterator<Item = (HeisElem, usize)> + '_ {
        self.seen.iter().map(|(&(a, b, c), (d, _))| (HeisElem::new(a, b, c), *d as usize))
    }
}

/// Word length of `g` when it is at most `radius`.
pub fn word_length(g: &HeisElem, radius: usize) -> Result<Option<usize>> {
    Ok(CayleyBall::new(radius, DEFAULT_MAX_STATES)?.length(g))
}

/// A short word for `Z^m` (`m >= 0`) from `[X^a, Y^q] = Z^(a q)`: split
/// `m = a q + rest` and recurse on `rest`, minimizing over `a`.
/// `exact` supplies known geodesics for small `m`.
pub fn central_witness(m: u64, exact: &dyn Fn(u64) -> Option<Word>) -> Word {
    let mut memo: HashMap<u64, Word> = HashMap::new();
    witness_rec(m, exact, &mut memo)
}

fn witness_rec(m: u64, exact: &dyn Fn(u64) -> Option<Word>, memo: &mut HashMap<u64, Word>) -> Word {
    if m == 0 {
        return Word::default();
    }
    if let Some(w) = memo.get(&m) {
        return w.clone();
    }
    let mut best = exact(m);
    let cap = (m as f64).sqrt() as u64 + 2;
    for a in 1..=cap.min(m) {
        let q = m / a;
        let rest = m - a * q;
        let cost_head = 2 * (a + q) as usize;
        if best.as_ref().is_some_and(|b| b.len() <= cost_head) {
            continue;
        }
        let tail = witness_rec(rest, exact, memo);
        let w = Word::commutator_word(a as i64, q as i64).concat(&tail);
        if best.as_ref().is_none_or(|b| w.len() < b.len()) {
            best = Some(w);
        }
    }
    let w = best.expect("a = 1 always gives a word");
    memo.insert(m, w.clone());
    w
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub m: u64,
    /// Exact when `exact`, otherwise the length of `witness_word` (an upper bound).
    pub length: usize,
    pub ratio: f64,
    pub exact: bool,
    pub witness_word: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionProfile {
    pub radius: usize,
    pub rows: Vec<DistortionRow>,
    /// `|Z^(n^2)| <= 4 n` checked for `n = 1..=n_max`.
    pub square_bound_holds: bool,
    /// Running minimum of `length / m` never increases.
    pub min_ratio_nonincreasing: bool,
}

/// `|Z^m|` for `m = 1..=n_max^2`: exact inside the BFS ball, witness upper
/// bounds beyond it. Every witness word is checked to evaluate to `Z^m`.
pub fn distortion_profile(n_max: u64, radius: usize) -> Result<DistortionProfile> {
    if n_max == 0 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    let ball = CayleyBall::new(radius, DEFAULT_MAX_STATES)?;
    let exact = |m: u64| ball.geodesic(&HeisElem::new(0, 0, m as i64));
    let m_max = n_max * n_max;
    let mut rows = Vec::with_capacity(m_max as usize);
    let mut memo = HashMap::new();
    for m in 1..=m_max {
        let target = HeisElem::new(0, 0, m as i64);
        let (word, is_exact) = match exact(m) {
            Some(w) => (w, true),
            None => (witness_rec(m, &exact, &mut memo), false),
        };
        if word.eval() != target {
            return Err(Error::Construction(format!("witness {word} does not evaluate to Z^{m}")));
        }
        rows.push(DistortionRow {
            m,
            length: word.len(),
            ratio: word.len() as f64 / m as f64,
            exact: is_exact,
            witness_word: word.to_string(),
        });
    }
    let square_bound_holds = (1..=n_max).all(|n| rows[(n * n - 1) as usize].length as u64 <= 4 * n);
    let mut running = f64::INFINITY;
    let mut min_ratio_nonincreasing = true;
    for r in &rows {
        let next = running.min(r.ratio);
        min_ratio_nonincreasing &= next <= running;
        running = next;
    }
    Ok(DistortionProfile { radius, rows, square_bound_holds, min_ratio_nonincreasing })
}

/// CSV with columns `m,length,ratio,witness_word`.
pub fn write_distortion_csv<W: Write>(profile: &DistortionProfile, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Unsupported(format!("writing CSV: {e}"));
    w.write_record(["m", "length", "ratio", "witness_word"]).map_err(io)?;
    for r in &profile.rows {
        w.write_record([r.m.to_string(), r.length.to_string(), format!("{:.6}", r.ratio), r.witness_word.clone()])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Unsupported(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_sizes_match_the_oracle() {
        let ball = CayleyBall::new(14, DEFAULT_MAX_STATES).unwrap();
        assert_eq!(
            ball.sizes(),
            &[1, 5, 17, 53, 135, 299, 593, 1069, 1793, 2845, 4309, 6281, 8871, 12195, 16381]
        );
        assert_eq!(ball.length(&HeisElem::new(2, -1, 0)), Some(3));
        assert_eq!(ball.length(&HeisElem::new(1, 1, 1)), Some(2));
        assert_eq!(ball.length(&HeisElem::new(3, 2, -5)), Some(9));
        assert_eq!(ball.length(&HeisElem::z()), Some(4));
        assert_eq!(ball.length(&HeisElem::identity()), Some(0));
    }

    #[test]
    fn geodesics_evaluate_to_their_element() {
        let ball = CayleyBall::new(8, DEFAULT_MAX_STATES).unwrap();
        for (g, d) in ball.elements() {
            let w = ball.geodesic(&g).unwrap();
            assert_eq!(w.len(), d);
            assert_eq!(w.eval(), g);
        }
    }

    #[test]
    fn budget_is_enforced() {
        match CayleyBall::new(14, 1000) {
            Err(Error::Resource { reached, .. }) => assert_eq!(reached, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn central_lengths() {
        let ball = CayleyBall::new(14, DEFAULT_MAX_STATES).unwrap();
        let got: Vec<usize> = (1..=12).map(|m| ball.length(&HeisElem::new(0, 0, m)).unwrap()).collect();
        assert_eq!(got, [4, 6, 8, 8, 10, 10, 12, 12, 12, 14, 14, 14]);
        assert_eq!(ball.length(&HeisElem::new(0, 0, 13)), None);
    }

    #[test]
    fn profile_rows_and_csv() {
        let p = distortion_profile(12, 14).unwrap();
        assert_eq!(p.rows.len(), 144);
        assert_eq!((p.rows[0].length, p.rows[0].ratio), (4, 4.0));
        assert!(p.rows[3].length <= 8 && p.rows[3].exact);
        assert!(!p.rows[143].exact && p.rows[143].length <= 48);
        assert!(p.square_bound_holds && p.min_ratio_nonincreasing);
        let mut buf = Vec::new();
        write_distortion_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,length,ratio,witness_word\n1,4,4.000000,"));
    }
}
