use super::{Point, ORDER};

// Central stencils (offset multiple, weight) for the m-th derivative with
// unit step; all have O(h^2) leading error in even powers of h.
const STENCILS: [&[(i32, f64)]; ORDER + 1] = [
    &[(0, 1.0)],
    &[(-1, -0.5), (1, 0.5)],
    &[(-1, 1.0), (0, -2.0), (1, 1.0)],
    &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
    &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
];

/// Base step for a derivative of the given total order.
///
/// Orders up to two use `1e-3`; higher orders use wider steps because the
/// roundoff of an `m`-th difference grows like `eps / h^m`.
pub fn fd_step(total_order: usize) -> f64 {
    match total_order {
        0..=2 => 1e-3,
        3 => 5e-3,
        _ => 2e-2,
    }
}

fn tensor_stencil<F: Fn(Point) -> f64>(f: &F, p: Point, multi: [usize; 3], h: f64) -> f64 {
    let [s0, s1, s2] = multi.map(|m| STENCILS[m]);
    let mut acc = 0.0;
    for &(i, wi) in s0 {
        for &(j, wj) in s1 {
            for &(k, wk) in s2 {
                let q = Point::new(
                    p.nu + i as f64 * h,
                    p.r + j as f64 * h,
                    p.x + k as f64 * h,
                );
                acc += wi * wj * wk * f(q);
            }
        }
    }
    let m: usize = multi.iter().sum();
    acc / h.powi(m as i32)
}

/// Finite-difference estimate of `d^(i+j+k) f / dnu^i dr^j dx^k` at `p`.
///
/// Tensor-product central differences at steps `h` and `h/2`, combined by
/// one Richardson level; the truncation error is `O(h^4)`.
///
/// # Panics
/// If the total order exceeds 4.
pub fn fd_oracle<F: Fn(Point) -> f64>(f: F, p: Point, multi: [usize; 3]) -> f64 {
    let m: usize = multi.iter().sum();
    assert!(m <= ORDER, "fd_oracle supports total order <= {ORDER}");
    if m == 0 {
        return f(p);
    }
    let h = fd_step(m);
    let coarse = tensor_stencil(&f, p, multi, h);
    let fine = tensor_stencil(&f, p, multi, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}
