use num_bigint::BigInt;
use num_complex::Complex64;

use super::{DensePoly, IntPoly};

/// U_m with exact integer coefficients, from U_0 = 1, U_1 = 2x,
/// U_{m+1} = 2x U_m - U_{m-1}.
pub fn chebyshev_u(m: usize) -> IntPoly {
    let two_x = IntPoly::from_i64(&[0, 2]);
    let mut prev = IntPoly::zero();
    let mut cur = IntPoly::constant(BigInt::from(1));
    for _ in 0..m {
        let next = &(&two_x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn chebyshev_u_poly(m: usize) -> DensePoly {
    chebyshev_u(m).to_dense()
}

/// U_m(x) by the three-term recurrence.
pub fn chebyshev_u_eval(m: usize, x: Complex64) -> Complex64 {
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
