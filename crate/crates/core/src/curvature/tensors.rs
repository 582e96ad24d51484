use super::fields::{inverse3, MetricField, OneFormField};
use super::{Mat3, Tensor3};
use crate::error::{Error, Result};
use crate::jets::{Jet, Jet3, Point};

type JetMat = [[Jet3; 3]; 3];
type JetTensor = [[[Jet3; 3]; 3]; 3];

/// Curvature quantities of a metric at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvaturePack {
    pub point: Point,
    pub metric: Mat3,
    pub inverse: Mat3,
    /// `christoffel[a][b][c] = Gamma^a_bc`.
    pub christoffel: Tensor3,
    pub ricci: Mat3,
    pub scalar: f64,
    pub schouten: Mat3,
    /// `cotton[a][b][c] = C_abc`.
    pub cotton: Tensor3,
}

struct Connection {
    g: JetMat,
    ginv: JetMat,
    gamma: JetTensor,
}

fn require(what: &'static str, label: &str, have: usize, need: usize) -> Result<()> {
    if have < need {
        return Err(Error::InvalidParams(format!(
            "{what} needs jets exact to order {need}, but '{label}' is exact to order {have}"
        )));
    }
    Ok(())
}

fn connection(g: &MetricField, p: Point, what: &'static str, need: usize) -> Result<Connection> {
    require(what, g.label(), g.order(), need)?;
    let gj = g.jets(p)?;
    let ginv = inverse3(&gj)?;
    let dg: [JetMat; 3] = std::array::from_fn(|e| gj.map(|row| row.map(|v| v.diff(e))));
    // lowered[d][b][c] = Gamma_dbc
    let lowered: JetTensor = std::array::from_fn(|d| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]) * 0.5)
        })
    });
    let gamma = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                let mut acc = Jet3::zero();
                for d in 0..3 {
                    acc += ginv[a][d] * lowered[d][b][c];
                }
                acc
            })
        })
    });
    Ok(Connection { g: gj, ginv, gamma })
}

fn ricci_jets(conn: &Connection) -> JetMat {
    let gm = &conn.gamma;
    let trace: [Jet3; 3] = std::array::from_fn(|b| gm[0][0][b] + gm[1][1][b] + gm[2][2][b]);
    std::array::from_fn(|b| {
        std::array::from_fn(|d| {
            let mut acc = Jet3::zero();
            for a in 0..3 {
                acc += gm[a][d][b].diff(a);
            }
            acc -= trace[b].diff(d);
            for e in 0..3 {
                acc += trace[e] * gm[e][d][b];
                for a in 0..3 {
                    acc -= gm[a][d][e] * gm[e][a][b];
                }
            }
            acc
        })
    })
}

fn contract(inv: &JetMat, t: &JetMat) -> Jet3 {
    let mut acc = Jet3::zero();
    for a in 0..3 {
        for b in 0..3 {
            acc += inv[a][b] * t[a][b];
        }
    }
    acc
}

fn schouten_jets(conn: &Connection) -> (JetMat, Jet3, JetMat) {
    let ric = ricci_jets(conn);
    let scalar = contract(&conn.ginv, &ric);
    let quarter = scalar * 0.25;
    let p = std::array::from_fn(|a| std::array::from_fn(|b| ric[a][b] - conn.g[a][b] * quarter));
    (ric, scalar, p)
}

fn values(m: &JetMat) -> Mat3 {
    m.map(|row| row.map(|v| v.value()))
}

fn values3(t: &JetTensor) -> Tensor3 {
    t.map(|m| values(&m))
}

fn cotton_from(conn: &Connection, p: &JetMat) -> Tensor3 {
    let gm = &conn.gamma;
    // nabla[c][a][b] = nabla_c P_ab
    let nabla: [Mat3; 3] = std::array::from_fn(|c| {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let mut v = p[a][b].d(c);
                for e in 0..3 {
                    v -= gm[e][c][a].value() * p[e][b].value() + gm[e][c][b].value() * p[a][e].value();
                }
                v
            })
        })
    });
    std::array::from_fn(|a| {
        std::array::from_fn(|b| std::array::from_fn(|c| nabla[c][a][b] - nabla[b][a][c]))
    })
}

/// Christoffel symbols `Gamma^a_bc` of the Levi-Civita connection.
pub fn christoffel(g: &MetricField, p: Point) -> Result<Tensor3> {
    Ok(values3(&connection(g, p, "christoffel", 1)?.gamma))
}

/// Ricci tensor, scalar curvature and 3D Schouten tensor `Ric - (R/4) g`.
pub fn ricci_scalar_schouten(g: &MetricField, p: Point) -> Result<(Mat3, f64, Mat3)> {
    let conn = connection(g, p, "ricci", 2)?;
    let (ric, scalar, sch) = schouten_jets(&conn);
    Ok((values(&ric), scalar.value(), values(&sch)))
}

/// Cotton tensor `C_abc = nabla_c P_ab - nabla_b P_ac`.
pub fn cotton(g: &MetricField, p: Point) -> Result<Tensor3> {
    let conn = connection(g, p, "cotton", 3)?;
    let (_, _, sch) = schouten_jets(&conn);
    Ok(cotton_from(&conn, &sch))
}

/// Every curvature quantity at once.
pub fn curvature_pack(g: &MetricField, p: Point) -> Result<CurvaturePack> {
    let conn = connection(g, p, "curvature pack", 3)?;
    let (ric, scalar, sch) = schouten_jets(&conn);
    Ok(CurvaturePack {
        point: p,
        metric: values(&conn.g),
        inverse: values(&conn.ginv),
        christoffel: values3(&conn.gamma),
        ricci: values(&ric),
        scalar: scalar.value(),
        schouten: values(&sch),
        cotton: cotton_from(&conn, &sch),
    })
}

/// `T_ab = nabla_(a X_b) + X_a X_b + P_ab` together with the metric values.
fn ew_parts(g: &MetricField, x: &OneFormField, p: Point) -> Result<(Mat3, Mat3, Mat3)> {
    require("einstein-weyl residual", x.label(), x.order(), 1)?;
    let conn = connection(g, p, "einstein-weyl residual", 2)?;
    let (_, _, sch) = schouten_jets(&conn);
    let xj = x.jets(p)?;
    let xv = xj.map(|v| v.value());
    let nabla = |a: usize, b: usize| {
        let mut v = xj[b].d(a);
        for c in 0..3 {
            v -= conn.gamma[c][a][b].value() * xv[c];
        }
        v
    };
    let t = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            0.5 * (nabla(a, b) + nabla(b, a)) + xv[a] * xv[b] + sch[a][b].value()
        })
    });
    Ok((t, values(&conn.g), values(&conn.ginv)))
}

/// The tensor `nabla_(a X_b) + X_a X_b + P_ab` before trace removal.
pub fn ew_tensor(g: &MetricField, x: &OneFormField, p: Point) -> Result<Mat3> {
    Ok(ew_parts(g, x, p)?.0)
}

/// Trace-free part of `nabla_(a X_b) + X_a X_b + P_ab`; it vanishes exactly
/// when `(g, X)` is Einstein-Weyl at `p`.
pub fn ew_residual(g: &MetricField, x: &OneFormField, p: Point) -> Result<Mat3> {
    let (t, gv, ginv) = ew_parts(g, x, p)?;
    let mut trace = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            trace += ginv[a][b] * t[a][b];
        }
    }
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|b| t[a][b] - trace / 3.0 * gv[a][b])
    }))
}

/// Faraday 2-form `(dX)_ab = d_a X_b - d_b X_a`.
pub fn faraday(x: &OneFormField, p: Point) -> Result<Mat3> {
    require("faraday", x.label(), x.order(), 1)?;
    let xj = x.jets(p)?;
    Ok(std::array::from_fn(|a| {
        std::array::from_fn(|b| if a == b { 0.0 } else { xj[b].d(a) - xj[a].d(b) })
    }))
}
