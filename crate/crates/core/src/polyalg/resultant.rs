use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::{Add, Mul, Neg, Sub};

use super::DensePoly;

/// Univariate polynomial with arbitrary-precision integer coefficients, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn to_dense(&self) -> DensePoly {
        DensePoly::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
                .collect(),
        )
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// q^deg · p(num/q), exact.
    pub fn eval_rational(&self, num: &BigInt, den: &BigInt) -> BigInt {
        let d = self.degree();
        let mut acc = BigInt::zero();
        let mut np = BigInt::one();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * &np * num_traits::pow(den.clone(), d - i);
            np *= num;
        }
        acc
    }

    /// Greatest common divisor of the coefficients (content), positive.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with a positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.content();
        let sign = if self.coeffs.last().unwrap().is_negative() { -1 } else { 1 };
        Self::new(self.coeffs.iter().map(|c| c / &g * sign).collect())
    }

    /// Exact division; `None` when the divisor does not divide evenly over Z.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let dl = d.coeffs.last().unwrap();
        let dd = d.degree();
        let mut q = vec![BigInt::zero(); self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let (qk, r) = rem[k + dd].div_rem(dl);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] -= &qk * dc;
            }
            q[k] = qk;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

/// Polynomial in x whose coefficients are integer polynomials in λ.
/// `coeffs[i]` multiplies x^i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBivarPoly {
    coeffs: Vec<IntPoly>,
}

impl IntBivarPoly {
    pub fn new(mut coeffs: Vec<IntPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Build from a table `table[i][j]` = coefficient of x^i λ^j.
    pub fn from_table(table: &[Vec<i64>]) -> Self {
        Self::new(table.iter().map(|row| IntPoly::from_i64(row)).collect())
    }

    pub fn coeffs(&self) -> &[IntPoly] {
        &self.coeffs
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn derivative_x(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &IntPoly::constant(BigInt::from(i)))
                .collect(),
        )
    }

    /// Specialize λ to a complex value.
    pub fn at_lambda(&self, lambda: Complex64) -> DensePoly {
        DensePoly::new(self.coeffs.iter().map(|c| c.to_dense().eval(lambda)).collect())
    }
}

/// Res_x(P, Q) as an integer polynomial in λ, via fraction-free (Bareiss)
/// elimination of the Sylvester matrix.
pub fn resultant_eliminate_x(p: &IntBivarPoly, q: &IntBivarPoly) -> IntPoly {
    let m = p.degree_x();
    let n = q.degree_x();
    if p.coeffs.is_empty() || q.coeffs.is_empty() {
        return IntPoly::zero();
    }
    let size = m + n;
    if size == 0 {
        return IntPoly::constant(BigInt::one());
    }
    let mut mat = vec![vec![IntPoly::zero(); size]; size];
    // Rows 0..n carry P shifted, rows n..n+m carry Q shifted; columns run from x^(size-1) down.
    for r in 0..n {
        for (i, c) in p.coeffs.iter().enumerate() {
            mat[r][r + m - i] = c.clone();
        }
    }
    for r in 0..m {
        for (i, c) in q.coeffs.iter().enumerate() {
            mat[n + r][r + n - i] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut a: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = a.len();
    let mut sign = false;
    let mut prev = IntPoly::constant(BigInt::one());
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = !sign;
                }
                None => return IntPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step must divide exactly");
            }
            a[i][k] = IntPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign {
        -&det
    } else {
        det
    }
}
