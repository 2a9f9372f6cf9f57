//! Cyclic quotient singularities `(1/n)(w1, w2, w3)`: ages, the terminality
//! test, and the vertex singularities of weighted projective 3-spaces.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SingularError {
    #[error("group order must be at least 2, got {0}")]
    Order(i64),
    #[error("age index {j} outside 1..{n}")]
    AgeIndex { j: i64, n: i64 },
    #[error("{0} is not isolated: a weight shares a factor with the order")]
    NotIsolated(CyclicQuotient),
    #[error("weights {0:?} are not a well-formed weighted projective space")]
    IllFormed(Vec<i64>),
}

/// `(1/n)(w1, w2, w3)` with weights reduced into `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicQuotient {
    pub n: i64,
    pub weights: [i64; 3],
}

impl CyclicQuotient {
    pub fn new(n: i64, weights: [i64; 3]) -> Result<Self, SingularError> {
        if n < 2 {
            return Err(SingularError::Order(n));
        }
        Ok(CyclicQuotient {
            n,
            weights: weights.map(|w| w.rem_euclid(n)),
        })
    }

    /// Every weight is a unit mod `n`, so the origin is the only fixed point.
    pub fn is_isolated(&self) -> bool {
        self.weights.iter().all(|w| w.gcd(&self.n) == 1)
    }

    /// No element fixes a divisor pointwise: `gcd(n, wi, wj) = 1` for each pair.
    pub fn is_well_formed(&self) -> bool {
        let w = self.weights;
        [(0, 1), (0, 2), (1, 2)]
            .iter()
            .all(|&(i, j)| self.n.gcd(&w[i]).gcd(&w[j]) == 1)
    }
}

impl fmt::Display for CyclicQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.weights;
        write!(f, "1/{}({},{},{})", self.n, a, b, c)
    }
}

/// `Σ (j·wi mod n) / n`.
pub fn age(q: &CyclicQuotient, j: i64) -> Result<Ratio<i64>, SingularError> {
    if j < 1 || j >= q.n {
        return Err(SingularError::AgeIndex { j, n: q.n });
    }
    let s: i64 = q.weights.iter().map(|w| (j * w).rem_euclid(q.n)).sum();
    Ok(Ratio::new(s, q.n))
}

/// Reid–Tai: terminal iff every age is strictly greater than 1. Only the
/// isolated case is decided.
pub fn is_terminal(q: &CyclicQuotient) -> Result<bool, SingularError> {
    if !q.is_isolated() {
        return Err(SingularError::NotIsolated(*q));
    }
    let one = Ratio::from_integer(1);
    for j in 1..q.n {
        if age(q, j)? <= one {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether some unit multiple and permutation of the weights reads
/// `(1, a, n - a)`.
pub fn is_one_a_minus_a(q: &CyclicQuotient) -> bool {
    let n = q.n;
    (1..n).filter(|u| u.gcd(&n) == 1).any(|u| {
        let w = q.weights.map(|x| (u * x).rem_euclid(n));
        PERMS.iter().any(|p| {
            let (x, a, b) = (w[p[0]], w[p[1]], w[p[2]]);
            x == 1 && (a + b) % n == 0 && a != 0
        })
    })
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub quotient: CyclicQuotient,
    pub terminal: bool,
    pub of_form_one_a_minus_a: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalTable {
    pub n_max: i64,
    pub checked: u64,
    pub terminal: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Compares [`is_terminal`] with [`is_one_a_minus_a`] on every isolated
/// triple of every order `2 ≤ n ≤ n_max`.
pub fn classify_terminal_types(n_max: i64) -> TerminalTable {
    let mut table = TerminalTable {
        n_max,
        checked: 0,
        terminal: 0,
        counterexamples: Vec::new(),
    };
    for n in 2..=n_max {
        let units: Vec<i64> = (1..n).filter(|u| u.gcd(&n) == 1).collect();
        for &a in &units {
            for &b in &units {
                for &c in &units {
                    let q = CyclicQuotient { n, weights: [a, b, c] };
                    let t = is_terminal(&q).expect("isolated by construction");
                    let f = is_one_a_minus_a(&q);
                    table.checked += 1;
                    table.terminal += t as u64;
                    if t != f {
                        table.counterexamples.push(Counterexample {
                            quotient: q,
                            terminal: t,
                            of_form_one_a_minus_a: f,
                        });
                    }
                }
            }
        }
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSingularity {
    /// Index of the coordinate that is nonzero at the vertex.
    pub vertex: usize,
    pub quotient: CyclicQuotient,
    /// `None` when the quotient is not isolated.
    pub terminal: Option<bool>,
}

/// The quotient type at each coordinate vertex of `P(w0, w1, w2, w3)` whose
/// weight exceeds 1.
pub fn wps_singularity_report(weights: &[i64]) -> Result<Vec<VertexSingularity>, SingularError> {
    let ill = || SingularError::IllFormed(weights.to_vec());
    if weights.len() != 4 || weights.iter().any(|&w| w < 1) {
        return Err(ill());
    }
    for skip in 0..4 {
        let g = (0..4)
            .filter(|&i| i != skip)
            .fold(0i64, |g, i| g.gcd(&weights[i]));
        if g != 1 {
            return Err(ill());
        }
    }
    let mut out = Vec::new();
    for (v, &m) in weights.iter().enumerate() {
        if m == 1 {
            continue;
        }
        let others: Vec<i64> = (0..4).filter(|&i| i != v).map(|i| weights[i]).collect();
        let q = CyclicQuotient::new(m, [others[0], others[1], others[2]])?;
        out.push(VertexSingularity {
            vertex: v,
            quotient: q,
            terminal: is_terminal(&q).ok(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, w: [i64; 3]) -> CyclicQuotient {
        CyclicQuotient::new(n, w).unwrap()
    }

    #[test]
    fn ages() {
        assert_eq!(age(&q(2, [1, 1, 1]), 1).unwrap(), Ratio::new(3, 2));
        assert_eq!(age(&q(3, [1, 1, 2]), 2).unwrap(), Ratio::new(5, 3));
        assert_eq!(age(&q(3, [1, 1, 1]), 1).unwrap(), Ratio::from_integer(1));
        assert!(matches!(
            age(&q(3, [1, 1, 1]), 3),
            Err(SingularError::AgeIndex { j: 3, n: 3 })
        ));
        assert_eq!(q(5, [-1, 7, 5]).weights, [4, 2, 0]);
    }

    #[test]
    fn terminality() {
        assert!(is_terminal(&q(2, [1, 1, 1])).unwrap());
        assert!(!is_terminal(&q(3, [1, 1, 1])).unwrap());
        assert!(is_terminal(&q(3, [1, 1, 2])).unwrap());
        assert!(matches!(
            is_terminal(&q(4, [1, 2, 3])),
            Err(SingularError::NotIsolated(_))
        ));
        assert!(!q(4, [2, 2, 1]).is_well_formed());
        assert!(q(4, [2, 1, 3]).is_well_formed());
    }

    #[test]
    fn small_classification() {
        let t = classify_terminal_types(10);
        assert!(t.counterexamples.is_empty());
        let t2 = classify_terminal_types(2);
        assert_eq!((t2.checked, t2.terminal), (1, 1));
        // (1,2,4) mod 7: no pair sums to 0 under any unit
        let s = q(7, [1, 2, 4]);
        assert!(!is_one_a_minus_a(&s));
        assert!(!is_terminal(&s).unwrap());
    }

    #[test]
    fn weighted_projective_vertices() {
        let r = wps_singularity_report(&[1, 1, 1, 2]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].quotient, q(2, [1, 1, 1]));
        assert_eq!(r[0].terminal, Some(true));
        let r = wps_singularity_report(&[1, 1, 2, 3]).unwrap();
        let qs: Vec<_> = r.iter().map(|v| v.quotient).collect();
        assert_eq!(qs, vec![q(2, [1, 1, 1]), q(3, [1, 1, 2])]);
        assert!(r.iter().all(|v| v.terminal == Some(true)));
        assert!(wps_singularity_report(&[1, 1, 1, 1]).unwrap().is_empty());
        assert!(wps_singularity_report(&[1, 2, 4, 6]).is_err());
        assert!(wps_singularity_report(&[1, 1, 0, 2]).is_err());
        let r = wps_singularity_report(&[1, 2, 3, 6]).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[2].quotient, q(6, [1, 2, 3]));
        assert_eq!(r[2].terminal, None);
    }
}
