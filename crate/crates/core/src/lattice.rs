//! Exact intersection theory on the Picard lattice of a degree-3 del Pezzo
//! resolution: the rank-7 unimodular lattice `Z e_0 + Z e_1 + ... + Z e_6`
//! with Gram matrix `diag(+1, -1, -1, -1, -1, -1, -1)`.
//!
//! All arithmetic is exact rational arithmetic; no floating point enters
//! any computation in this crate outside the quadrature cross-checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Rational from a numerator/denominator pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses "p/q" or "p".
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let mut it = s.splitn(2, '/');
    let num: BigInt = it
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|_| format!("bad rational `{s}`"))?;
    match it.next() {
        None => Ok(Rat::from_integer(num)),
        Some(d) => {
            let den: BigInt = d.trim().parse().map_err(|_| format!("bad rational `{s}`"))?;
            if den.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// Renders a rational as `p/q` (or `p` when integral).
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A divisor class `(d; m_1, ..., m_6)` meaning `d e_0 + m_1 e_1 + ... + m_6 e_6`
/// in the blow-up basis of the plane. The canonical class is `(-3; 1,...,1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    coeffs: [Rat; 7],
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", fmt_rat(&self.coeffs[0]))?;
        for c in &self.coeffs[1..] {
            write!(f, ";{}", fmt_rat(c))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl DivisorClass {
    pub fn new(coeffs: [Rat; 7]) -> Self {
        DivisorClass { coeffs }
    }

    pub fn from_ints(v: [i64; 7]) -> Self {
        DivisorClass::new(v.map(rint))
    }

    pub fn zero() -> Self {
        DivisorClass::new(std::array::from_fn(|_| Rat::zero()))
    }

    pub fn coeffs(&self) -> &[Rat; 7] {
        &self.coeffs
    }

    /// Intersection pairing: `d_a d_b - sum_i m_{a,i} m_{b,i}`.
    pub fn intersect(&self, other: &DivisorClass) -> Rat {
        let mut acc = &self.coeffs[0] * &other.coeffs[0];
        for i in 1..7 {
            acc -= &self.coeffs[i] * &other.coeffs[i];
        }
        acc
    }

    pub fn self_intersection(&self) -> Rat {
        self.intersect(self)
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass::new(std::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]))
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass::new(std::array::from_fn(|i| &self.coeffs[i] - &other.coeffs[i]))
    }

    pub fn scale(&self, c: &Rat) -> DivisorClass {
        DivisorClass::new(std::array::from_fn(|i| c * &self.coeffs[i]))
    }

    pub fn neg(&self) -> DivisorClass {
        DivisorClass::new(std::array::from_fn(|i| -self.coeffs[i].clone()))
    }

    /// `cls^2 = -1` and `cls.K = -1`: the class of a (-1)-curve.
    pub fn is_line_class(&self) -> bool {
        self.self_intersection() == rint(-1) && self.intersect(&canonical_class()) == rint(-1)
    }

    /// `cls^2 = -2` and `cls.K = 0`: a root of the degree-3 root lattice.
    pub fn is_root_class(&self) -> bool {
        self.self_intersection() == rint(-2) && self.intersect(&canonical_class()).is_zero()
    }
}

/// The canonical class `K = (-3; 1,1,1,1,1,1)`, with `K.K = 3`.
pub fn canonical_class() -> DivisorClass {
    DivisorClass::from_ints([-3, 1, 1, 1, 1, 1, 1])
}

/// `-K`, the anticanonical class.
pub fn anticanonical_class() -> DivisorClass {
    canonical_class().neg()
}

/// Determinant of an exact rational matrix by Gaussian elimination.
#[cfg(test)]
fn det(mat: &[Vec<Rat>]) -> Rat {
    let n = mat.len();
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let mut d = Rat::one();
    for col in 0..n {
        let piv = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let pv = m[col][col].clone();
        d *= &pv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &pv;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    d
}

/// Exact negative-definiteness test for the Gram matrix of a family of
/// classes, via signs of leading principal minors: the k-th minor must have
/// sign (-1)^k. One elimination pass without row swaps yields the minors as
/// running pivot products; a zero pivot already refutes definiteness.
pub fn is_negative_definite(classes: &[DivisorClass]) -> bool {
    let n = classes.len();
    if n == 0 {
        return false;
    }
    let mut gram: Vec<Vec<Rat>> = classes
        .iter()
        .map(|a| classes.iter().map(|b| a.intersect(b)).collect())
        .collect();
    for k in 0..n {
        let pivot = gram[k][k].clone();
        // pivot_k = minor_k / minor_{k-1}; alternating minor signs mean
        // every pivot of a negative definite matrix is negative
        if !pivot.is_negative() {
            return false;
        }
        for r in k + 1..n {
            if gram[r][k].is_zero() {
                continue;
            }
            let f = &gram[r][k] / &pivot;
            for c in k..n {
                let sub = &f * &gram[k][c];
                gram[r][c] -= sub;
            }
        }
    }
    true
}

/// Solves `M x = b` exactly over the rationals. Pivot choice is the entry of
/// largest absolute value in the column, for determinism. Returns `None` when
/// the matrix is singular.
pub fn solve_linear(mat: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = mat.len();
    debug_assert!(mat.iter().all(|r| r.len() == n) && rhs.len() == n);
    let mut m: Vec<Vec<Rat>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()))?;
        m.swap(piv, col);
        let pv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let sub = &f * &m[col][c];
                    m[r][c] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(i: usize, j: usize) -> DivisorClass {
        let mut v = [0i64; 7];
        v[0] = 1;
        v[i] = -1;
        v[j] = -1;
        DivisorClass::from_ints(v)
    }

    fn exc(i: usize) -> DivisorClass {
        let mut v = [0i64; 7];
        v[i] = 1;
        DivisorClass::from_ints(v)
    }

    #[test]
    fn canonical_self_intersection_is_three() {
        let k = canonical_class();
        assert_eq!(k.intersect(&k), rint(3));
    }

    #[test]
    fn basis_vectors_orthogonal() {
        assert_eq!(exc(1).intersect(&exc(2)), rint(0));
    }

    #[test]
    fn exceptional_class_has_anticanonical_degree_one() {
        // -K . e_1 = 1
        assert_eq!(anticanonical_class().intersect(&exc(1)), rint(1));
    }

    #[test]
    fn line_through_two_points() {
        // The strict transform of the line through the first two blown-up
        // points is h - e_1 - e_2 = (1; -1, -1, 0, 0, 0, 0).
        let l = line(1, 2);
        assert_eq!(l.self_intersection(), rint(-1));
        assert_eq!(l.intersect(&canonical_class()), rint(-1));
        assert!(l.is_line_class());
    }

    #[test]
    fn negative_definite_frozen_minors() {
        // single (-2)-class: 1x1 Gram (-2)
        let root = DivisorClass::from_ints([0, 1, -1, 0, 0, 0, 0]);
        assert!(is_negative_definite(std::slice::from_ref(&root)));

        // two (-2)-classes meeting once: minors -2, +3
        let root2 = DivisorClass::from_ints([0, 0, 1, -1, 0, 0, 0]);
        assert_eq!(root.intersect(&root2), rint(1));
        assert!(is_negative_definite(&[root.clone(), root2]));

        // two (-1)-classes meeting once: minors -1, 0 -> not definite
        let a = exc(1);
        let b = line(1, 2);
        assert_eq!(a.intersect(&b), rint(1));
        assert!(!is_negative_definite(&[a, b]));
    }

    #[test]
    fn gram_signature_one_positive() {
        // Sylvester on the diagonal form: leading minors alternate as
        // +1, -1, +1, ... so exactly one positive eigenvalue.
        let basis: Vec<DivisorClass> = (0..7)
            .map(|i| {
                let mut v = [0i64; 7];
                v[i] = 1;
                DivisorClass::from_ints(v)
            })
            .collect();
        let mut signs = Vec::new();
        for k in 1..=7 {
            let block: Vec<Vec<Rat>> = basis[..k]
                .iter()
                .map(|a| basis[..k].iter().map(|b| a.intersect(b)).collect())
                .collect();
            signs.push(det(&block).is_positive());
        }
        assert_eq!(signs, vec![true, false, true, false, true, false, true]);
    }

    #[test]
    fn solve_linear_small_system() {
        let m = vec![vec![rint(-2), rint(1)], vec![rint(1), rint(-2)]];
        let b = vec![rint(1), rint(0)];
        let x = solve_linear(&m, &b).unwrap();
        assert_eq!(x, vec![rat(-2, 3), rat(-1, 3)]);
    }

    #[test]
    fn rational_round_trip_is_exact() {
        let a = rat(355, 113);
        let b = rat(113, 355);
        assert_eq!(&a * &b, rint(1));
        assert_eq!(parse_rat("355/113").unwrap(), a);
        assert_eq!(parse_rat(&fmt_rat(&a)).unwrap(), a);
    }
}
