//! Finite-difference curvature oracle assembled from metric and 1-form
//! values only. Derivatives use central differences with two Richardson
//! levels; higher derivatives nest the same rule.

#![allow(dead_code)]

use ewh_core::curvature::{MetricField, OneFormField};
use ewh_core::jets::Point;

pub type M3 = [[f64; 3]; 3];
pub type T3 = [[[f64; 3]; 3]; 3];

/// `d f / d axis` at `p` with base step `h`.
pub fn d1<const N: usize>(f: &impl Fn(Point) -> [f64; N], p: Point, axis: usize, h: f64) -> [f64; N] {
    let c = |s: f64| {
        let (a, b) = (f(p.shifted(axis, s)), f(p.shifted(axis, -s)));
        std::array::from_fn::<f64, N, _>(|i| (a[i] - b[i]) / (2.0 * s))
    };
    let (c1, c2, c4) = (c(h), c(h / 2.0), c(h / 4.0));
    std::array::from_fn(|i| {
        let r1 = (4.0 * c2[i] - c1[i]) / 3.0;
        let r2 = (4.0 * c4[i] - c2[i]) / 3.0;
        (16.0 * r2 - r1) / 15.0
    })
}

fn flat9(m: &M3) -> [f64; 9] {
    std::array::from_fn(|i| m[i / 3][i % 3])
}

fn unflat9(v: [f64; 9]) -> M3 {
    std::array::from_fn(|a| std::array::from_fn(|b| v[3 * a + b]))
}

fn flat27(t: &T3) -> [f64; 27] {
    std::array::from_fn(|i| t[i / 9][(i / 3) % 3][i % 3])
}

fn unflat27(v: [f64; 27]) -> T3 {
    std::array::from_fn(|a| std::array::from_fn(|b| std::array::from_fn(|c| v[9 * a + 3 * b + c])))
}

pub fn inverse(m: &M3) -> M3 {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let cof = |r: usize, c: usize| {
        let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
        let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i) / det))
}

pub fn metric(g: &MetricField, p: Point) -> M3 {
    g.values(p).unwrap()
}

pub const H_INNER: f64 = 2e-3;
pub const H_OUTER: f64 = 2e-2;

/// `Gamma^a_bc` from first differences of `g`.
pub fn christoffel(g: &MetricField, p: Point, h: f64) -> T3 {
    let gv = metric(g, p);
    let gi = inverse(&gv);
    let dg: [M3; 3] = std::array::from_fn(|e| unflat9(d1(&|q| flat9(&metric(g, q)), p, e, h)));
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                (0..3)
                    .map(|d| 0.5 * gi[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]))
                    .sum()
            })
        })
    })
}

/// `R_bd = d_a G^a_db - d_d G^a_ab + G^a_ae G^e_db - G^a_de G^e_ab`.
pub fn ricci(g: &MetricField, p: Point) -> M3 {
    let gam = christoffel(g, p, H_INNER);
    let dgam: [T3; 3] =
        std::array::from_fn(|e| unflat27(d1(&|q| flat27(&christoffel(g, q, H_INNER)), p, e, H_OUTER)));
    std::array::from_fn(|b| {
        std::array::from_fn(|d| {
            let mut v = 0.0;
            for a in 0..3 {
                v += dgam[a][a][d][b] - dgam[d][a][a][b];
                for e in 0..3 {
                    v += gam[a][a][e] * gam[e][d][b] - gam[a][d][e] * gam[e][a][b];
                }
            }
            v
        })
    })
}

pub fn scalar(g: &MetricField, p: Point) -> f64 {
    let gi = inverse(&metric(g, p));
    let r = ricci(g, p);
    (0..9).map(|i| gi[i / 3][i % 3] * r[i / 3][i % 3]).sum()
}

/// `P = Ric - (R / 4) g`.
pub fn schouten(g: &MetricField, p: Point) -> M3 {
    let (r, s, gv) = (ricci(g, p), scalar(g, p), metric(g, p));
    std::array::from_fn(|a| std::array::from_fn(|b| r[a][b] - 0.25 * s * gv[a][b]))
}

/// `nabla_(a X_b) + X_a X_b + P_ab`.
pub fn ew_tensor(g: &MetricField, x: &OneFormField, p: Point) -> M3 {
    let gam = christoffel(g, p, H_INNER);
    let xv = x.values(p).unwrap();
    let dx: [[f64; 3]; 3] = std::array::from_fn(|a| d1(&|q| x.values(q).unwrap(), p, a, H_INNER));
    let nabla = |a: usize, b: usize| dx[a][b] - (0..3).map(|c| gam[c][a][b] * xv[c]).sum::<f64>();
    let sch = schouten(g, p);
    std::array::from_fn(|a| {
        std::array::from_fn(|b| 0.5 * (nabla(a, b) + nabla(b, a)) + xv[a] * xv[b] + sch[a][b])
    })
}

/// `C_abc = nabla_c P_ab - nabla_b P_ac`, with `P` differentiated through
/// the library's own Schouten values at nearby points.
pub fn cotton_from_schouten(g: &MetricField, p: Point, sch: &impl Fn(Point) -> M3) -> T3 {
    let gam = christoffel(g, p, H_INNER);
    let pv = sch(p);
    let dp: [M3; 3] = std::array::from_fn(|e| unflat9(d1(&|q| flat9(&sch(q)), p, e, H_OUTER)));
    let nabla = |c: usize, a: usize, b: usize| {
        let mut v = dp[c][a][b];
        for d in 0..3 {
            v -= gam[d][c][a] * pv[d][b] + gam[d][c][b] * pv[a][d];
        }
        v
    };
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| nabla(c, a, b) - nabla(b, a, c)))
    })
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn flat_m(m: &M3) -> Vec<f64> {
    flat9(m).to_vec()
}

pub fn flat_t(t: &T3) -> Vec<f64> {
    flat27(t).to_vec()
}
