//! Exact rational linear algebra for integral stress data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::StressSignature;

pub type Rational = BigRational;
pub type RMatrix = Vec<Vec<Rational>>;

pub fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Exact value of an integral float, `None` otherwise.
pub fn from_integral_f64(x: f64) -> Option<Rational> {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        Some(int(x as i64))
    } else {
        None
    }
}

pub fn to_f64(m: &RMatrix) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect()
}

/// Rank by fraction-free row reduction over the rationals.
pub fn rank(rows: &RMatrix) -> usize {
    let mut m = rows.clone();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Characteristic polynomial `det(x I - A)`, coefficients from the
/// constant term up (Faddeev-LeVerrier).
pub fn char_poly(a: &RMatrix) -> Vec<Rational> {
    let n = a.len();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m: RMatrix = vec![vec![Rational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        let am = mul(a, &next);
        let trace: Rational = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs[n - k] = -trace / int(k as i64);
        m = next;
    }
    coeffs
}

fn mul(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let n = a.len();
    let p = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..b.len()).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn sign_changes<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> usize {
    let signs: Vec<bool> = coeffs.filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Exact inertia of a symmetric rational matrix. All roots of the
/// characteristic polynomial are real, so Descartes' rule of signs counts
/// them exactly.
pub fn inertia(a: &RMatrix) -> StressSignature {
    let p = char_poly(a);
    let n_zero = p.iter().take_while(|c| c.is_zero()).count();
    let n_plus = sign_changes(p.iter());
    let flipped: Vec<Rational> =
        p.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() }).collect();
    let n_minus = sign_changes(flipped.iter());
    StressSignature { n_plus, n_minus, n_zero }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RMatrix {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn char_poly_of_small_matrices() {
        // [[2,1],[1,2]]: x^2 - 4x + 3
        assert_eq!(char_poly(&m(&[&[2, 1], &[1, 2]])), vec![int(3), int(-4), int(1)]);
    }

    #[test]
    fn inertia_counts() {
        let s = inertia(&m(&[&[2, 0, 0, 0], &[0, -1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]));
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 1, 2));
        let l = m(&[&[1, 1, -2, 1], &[1, 1, -2, 1], &[-2, -2, 4, -2], &[1, 1, -2, 1]]);
        let s = inertia(&l);
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 0, 3));
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]])), 2);
        assert_eq!(rank(&m(&[&[0, 0], &[0, 0]])), 0);
    }
}
