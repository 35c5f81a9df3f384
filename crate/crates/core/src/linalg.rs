//! Dense complex matrix product on row-major slices.

use num_complex::Complex64 as C64;

/// `alpha * A * B` for row-major `A` (m x k) and `B` (k x n).
pub(crate) fn matmul(a: &[C64], b: &[C64], m: usize, k: usize, n: usize, alpha: f64) -> Vec<C64> {
    assert_eq!(a.len(), m * k);
    assert_eq!(b.len(), k * n);
    let mut c = vec![C64::new(0.0, 0.0); m * n];
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    // SAFETY: Complex64 is repr(C) with layout [re, im], matching [f64; 2]; the
    // strides describe contiguous row-major buffers whose lengths are asserted above.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [alpha, 0.0],
            a.as_ptr() as *const [f64; 2],
            k as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            n as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            n as isize,
            1,
        );
    }
    c
}
