use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::{Jet, ORDER};

/// Number of monomials `nu^i r^j x^k` with `i + j + k <= 4`.
pub const NUM_COEFFS: usize = 35;
/// Number of index pairs whose exponents add to a total degree `<= 4`.
const NUM_PRODUCTS: usize = 210;
const NONE: u8 = u8::MAX;

const fn build_exponents() -> [[u8; 3]; NUM_COEFFS] {
    let mut out = [[0u8; 3]; NUM_COEFFS];
    let mut n = 0;
    let mut deg = 0;
    while deg <= ORDER {
        let mut i = deg as i32;
        while i >= 0 {
            let mut j = deg as i32 - i;
            while j >= 0 {
                let k = deg as i32 - i - j;
                out[n] = [i as u8, j as u8, k as u8];
                n += 1;
                j -= 1;
            }
            i -= 1;
        }
        deg += 1;
    }
    out
}

const EXPONENTS: [[u8; 3]; NUM_COEFFS] = build_exponents();

const fn build_index() -> [[[u8; ORDER + 1]; ORDER + 1]; ORDER + 1] {
    let mut idx = [[[NONE; ORDER + 1]; ORDER + 1]; ORDER + 1];
    let mut n = 0;
    while n < NUM_COEFFS {
        let e = EXPONENTS[n];
        idx[e[0] as usize][e[1] as usize][e[2] as usize] = n as u8;
        n += 1;
    }
    idx
}

const INDEX: [[[u8; ORDER + 1]; ORDER + 1]; ORDER + 1] = build_index();

const fn build_products() -> [[u8; 3]; NUM_PRODUCTS] {
    let mut out = [[0u8; 3]; NUM_PRODUCTS];
    let mut n = 0;
    let mut a = 0;
    while a < NUM_COEFFS {
        let mut b = 0;
        while b < NUM_COEFFS {
            let ea = EXPONENTS[a];
            let eb = EXPONENTS[b];
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            if (e[0] + e[1] + e[2]) as usize <= ORDER {
                out[n] = [a as u8, b as u8, INDEX[e[0] as usize][e[1] as usize][e[2] as usize]];
                n += 1;
            }
            b += 1;
        }
        a += 1;
    }
    assert!(n == NUM_PRODUCTS);
    out
}

const PRODUCTS: [[u8; 3]; NUM_PRODUCTS] = build_products();

fn index_of(e: [usize; 3]) -> Option<usize> {
    if e.iter().sum::<usize>() > ORDER {
        return None;
    }
    match INDEX[e[0]][e[1]][e[2]] {
        NONE => None,
        i => Some(i as usize),
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

/// Coordinate triple in the fixed order `(nu, r, x)` = axes `(0, 1, 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub nu: f64,
    pub r: f64,
    pub x: f64,
}

impl Point {
    pub const fn new(nu: f64, r: f64, x: f64) -> Self {
        Self { nu, r, x }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.nu, self.r, self.x]
    }

    pub fn shifted(self, axis: usize, delta: f64) -> Self {
        let mut a = self.to_array();
        a[axis] += delta;
        Self::from_array(a)
    }

    pub fn is_finite(&self) -> bool {
        self.nu.is_finite() && self.r.is_finite() && self.x.is_finite()
    }

    /// Coordinate functions seeded as independent jet variables.
    pub fn coords(&self) -> [Jet3; 3] {
        let a = self.to_array();
        std::array::from_fn(|v| Jet3::var(v, a[v]))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(nu={}, r={}, x={})", self.nu, self.r, self.x)
    }
}

/// Trivariate jet over `(nu, r, x)`, dense storage of all 35 Taylor
/// coefficients through total order 4.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet3 {
    c: [f64; NUM_COEFFS],
}

impl Jet3 {
    /// Coordinate function `axis` seeded at `value`.
    pub fn var(axis: usize, value: f64) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        let mut c = [0.0; NUM_COEFFS];
        c[0] = value;
        c[index_of(e).expect("first-order monomial")] = 1.0;
        Self { c }
    }

    /// Taylor coefficient of `nu^i r^j x^k`.
    pub fn coeff(&self, multi: [usize; 3]) -> f64 {
        index_of(multi).map_or(0.0, |i| self.c[i])
    }

    /// The partial derivative `d^(i+j+k) / dnu^i dr^j dx^k`.
    pub fn partial(&self, multi: [usize; 3]) -> f64 {
        self.coeff(multi) * multi.iter().map(|&m| factorial(m)).product::<f64>()
    }

    /// First partial derivative along `axis`.
    pub fn d(&self, axis: usize) -> f64 {
        let mut e = [0; 3];
        e[axis] = 1;
        self.partial(e)
    }

    /// Jet of the partial derivative along `axis`. Exact through total order
    /// 3; the order-4 coefficients of the result are set to zero.
    pub fn diff(&self, axis: usize) -> Self {
        let mut c = [0.0; NUM_COEFFS];
        for (n, e) in EXPONENTS.iter().enumerate() {
            let mut up = [e[0] as usize, e[1] as usize, e[2] as usize];
            up[axis] += 1;
            if let Some(i) = index_of(up) {
                c[n] = up[axis] as f64 * self.c[i];
            }
        }
        Self { c }
    }

    pub fn coeffs(&self) -> &[f64; NUM_COEFFS] {
        &self.c
    }

    /// Composes this expansion, taken in variables `u` at the values of
    /// `inner`, with `u = inner(v)`; the result is a jet in `v`.
    pub fn compose3(&self, inner: &[Jet3; 3]) -> Jet3 {
        let shifts: [Jet3; 3] = std::array::from_fn(|p| inner[p] - inner[p].value());
        let powers: [[Jet3; ORDER + 1]; 3] = std::array::from_fn(|p| {
            let mut row = [Jet3::one(); ORDER + 1];
            for k in 1..=ORDER {
                row[k] = row[k - 1] * shifts[p];
            }
            row
        });
        let mut acc = Jet3::zero();
        for (n, e) in EXPONENTS.iter().enumerate() {
            if self.c[n] == 0.0 {
                continue;
            }
            let [i, j, k] = [e[0] as usize, e[1] as usize, e[2] as usize];
            acc += powers[0][i] * powers[1][j] * powers[2][k] * self.c[n];
        }
        acc
    }

    /// Multi-index of every stored coefficient, in storage order.
    pub fn multi_indices() -> impl Iterator<Item = [usize; 3]> {
        EXPONENTS
            .iter()
            .map(|e| [e[0] as usize, e[1] as usize, e[2] as usize])
    }
}

impl fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet3")
            .field("value", &self.c[0])
            .field("grad", &[self.c[1], self.c[2], self.c[3]])
            .finish_non_exhaustive()
    }
}

impl Jet for Jet3 {
    fn constant(v: f64) -> Self {
        let mut c = [0.0; NUM_COEFFS];
        c[0] = v;
        Self { c }
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }
}

impl Add for Jet3 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|k| self.c[k] + rhs.c[k]),
        }
    }
}

impl Sub for Jet3 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            c: std::array::from_fn(|k| self.c[k] - rhs.c[k]),
        }
    }
}

impl Mul for Jet3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; NUM_COEFFS];
        for &[a, b, out] in PRODUCTS.iter() {
            c[out as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        Self { c }
    }
}

impl Neg for Jet3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            c: self.c.map(|v| -v),
        }
    }
}

impl Add<f64> for Jet3 {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet3 {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet3 {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self {
            c: self.c.map(|v| v * rhs),
        }
    }
}

impl AddAssign for Jet3 {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet3 {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn composition_with_linear_map() {
        // f(u) = u0 u2^2 + sin(u1) under u = (v0 + v1, 2 v1, -v2)
        let v = Point::new(0.3, -0.2, 0.5).coords();
        let u = [v[0] + v[1], v[1] * 2.0, -v[2]];
        let direct = u[0] * u[2].square() + u[1].sin();
        let at = Point::new(u[0].value(), u[1].value(), u[2].value()).coords();
        let f = at[0] * at[2].square() + at[1].sin();
        let composed = f.compose3(&u);
        for (a, b) in direct.coeffs().iter().zip(composed.coeffs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn index_tables_are_consistent() {
        for (n, e) in Jet3::multi_indices().enumerate() {
            assert_eq!(index_of(e), Some(n));
        }
        assert_eq!(index_of([5, 0, 0]), None);
        assert_eq!(index_of([2, 2, 1]), None);
    }

    #[test]
    fn seeding_gives_unit_gradient() {
        let p = Point::new(0.3, -0.2, 1.1);
        let [nu, r, x] = p.coords();
        assert_eq!([nu.d(0), nu.d(1), nu.d(2)], [1.0, 0.0, 0.0]);
        assert_eq!([r.d(0), r.d(1), r.d(2)], [0.0, 1.0, 0.0]);
        assert_eq!([x.d(0), x.d(1), x.d(2)], [0.0, 0.0, 1.0]);
        assert_eq!(x.value(), 1.1);
    }

    #[test]
    fn monomial_partials() {
        // f = nu^2 r x at (1, 2, 3)
        let [nu, r, x] = Point::new(1.0, 2.0, 3.0).coords();
        let f = nu * nu * r * x;
        assert_eq!(f.value(), 6.0);
        assert_relative_eq!(f.partial([2, 1, 1]), 2.0);
        assert_relative_eq!(f.partial([1, 1, 1]), 2.0 * 1.0);
        assert_relative_eq!(f.partial([2, 0, 0]), 2.0 * 2.0 * 3.0);
        assert_relative_eq!(f.partial([0, 0, 1]), 2.0);
        assert_eq!(f.partial([3, 0, 0]), 0.0);
    }

    #[test]
    fn diff_of_jet_matches_partials() {
        let [nu, r, x] = Point::new(0.2, 0.5, -0.4).coords();
        let f = (nu * r).sin() * x.exp() + r * r * x;
        let fx = f.diff(2);
        for e in Jet3::multi_indices().filter(|e| e.iter().sum::<usize>() < ORDER) {
            let mut up = e;
            up[2] += 1;
            assert_relative_eq!(fx.partial(e), f.partial(up), max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn mixed_sin_cos_partial() {
        let [nu, _, x] = Point::new(0.3, 0.0, 0.7).coords();
        let f = x.sin() * nu.cos();
        assert_relative_eq!(f.partial([1, 0, 1]), -0.7_f64.cos() * 0.3_f64.sin(), max_relative = 1e-14);
    }
}
