use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jets::{Jet, Jet3, Point, ORDER};

type MetricFn = dyn Fn(&[Jet3; 3]) -> Result<[[Jet3; 3]; 3]> + Send + Sync;
type OneFormFn = dyn Fn(&[Jet3; 3]) -> Result<[Jet3; 3]> + Send + Sync;
type ScalarFn = dyn Fn(&[Jet3; 3]) -> Result<Jet3> + Send + Sync;

const DET_FLOOR: f64 = 1e-12;

/// Symmetric metric components `g_ab` as a function of the coordinate jets.
///
/// Only the upper triangle returned by the closure is read; the lower one is
/// mirrored from it, so the field is symmetric by construction.
#[derive(Clone)]
pub struct MetricField {
    label: String,
    order: usize,
    f: Arc<MetricFn>,
}

impl MetricField {
    /// `order` is the derivative order through which the component jets are
    /// exact (at most 4).
    pub fn new(
        label: impl Into<String>,
        order: usize,
        f: impl Fn(&[Jet3; 3]) -> Result<[[Jet3; 3]; 3]> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            order: order.min(ORDER),
            f: Arc::new(f),
        }
    }

    /// Metric with constant components.
    pub fn constant(label: impl Into<String>, g: [[f64; 3]; 3]) -> Self {
        Self::new(label, ORDER, move |_| {
            Ok(g.map(|row| row.map(Jet3::constant)))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Components at the seeded coordinate jets of a point, without the
    /// degeneracy check. Closures may differentiate along the jet axes, so
    /// `coords` must be the output of [`Point::coords`].
    pub fn eval_at(&self, coords: &[Jet3; 3]) -> Result<[[Jet3; 3]; 3]> {
        let mut g = (self.f)(coords)?;
        for a in 0..3 {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        Ok(g)
    }

    /// Component jets at `p`; fails when `|det g| <= 1e-12`.
    pub fn jets(&self, p: Point) -> Result<[[Jet3; 3]; 3]> {
        let g = self.eval_at(&p.coords())?;
        let det = det3(&g).value();
        if !(det.abs() > DET_FLOOR) {
            return Err(Error::DegenerateMetric {
                det: det.abs(),
                at: p.to_string(),
            });
        }
        Ok(g)
    }

    pub fn values(&self, p: Point) -> Result<[[f64; 3]; 3]> {
        Ok(self.jets(p)?.map(|row| row.map(|v| v.value())))
    }

    pub fn det(&self, p: Point) -> Result<f64> {
        Ok(det3(&self.eval_at(&p.coords())?).value())
    }

    /// Pullback along the linear coordinate change `old = A new`.
    pub fn pullback_linear(&self, a: [[f64; 3]; 3]) -> Self {
        let inner = self.clone();
        Self::new(format!("{} (linear pullback)", self.label), self.order, move |y| {
            let old = apply_linear(&a, y);
            let g = inner
                .eval_at(&point_of(&old).coords())?
                .map(|row| row.map(|v| v.compose3(&old)));
            Ok(std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let mut acc = Jet3::zero();
                    for (p, row) in g.iter().enumerate() {
                        for (q, gpq) in row.iter().enumerate() {
                            if a[p][i] != 0.0 && a[q][j] != 0.0 {
                                acc += *gpq * (a[p][i] * a[q][j]);
                            }
                        }
                    }
                    acc
                })
            }))
        })
    }
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

/// Components `X_a` of a 1-form.
#[derive(Clone)]
pub struct OneFormField {
    label: String,
    order: usize,
    f: Arc<OneFormFn>,
}

impl OneFormField {
    pub fn new(
        label: impl Into<String>,
        order: usize,
        f: impl Fn(&[Jet3; 3]) -> Result<[Jet3; 3]> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            order: order.min(ORDER),
            f: Arc::new(f),
        }
    }

    pub fn zero() -> Self {
        Self::new("0", ORDER, |_| Ok([Jet3::zero(); 3]))
    }

    /// The exact form `d phi`.
    pub fn exact(phi: &ScalarField3D) -> Self {
        let phi = phi.clone();
        Self::new(
            format!("d({})", phi.label()),
            phi.order().saturating_sub(1),
            move |c| {
                let v = phi.eval_at(c)?;
                Ok(std::array::from_fn(|a| v.diff(a)))
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Components at the seeded coordinate jets of a point.
    pub fn eval_at(&self, coords: &[Jet3; 3]) -> Result<[Jet3; 3]> {
        let x = (self.f)(coords)?;
        if let Some(bad) = x.iter().find(|v| !v.value().is_finite()) {
            return Err(Error::SingularPoint {
                op: "one-form evaluation",
                value: bad.value(),
            });
        }
        Ok(x)
    }

    pub fn jets(&self, p: Point) -> Result<[Jet3; 3]> {
        self.eval_at(&p.coords())
    }

    pub fn values(&self, p: Point) -> Result<[f64; 3]> {
        Ok(self.jets(p)?.map(|v| v.value()))
    }

    /// Multiplies every component by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.clone();
        Self::new(format!("{s} * {}", self.label), self.order, move |c| {
            Ok(inner.eval_at(c)?.map(|v| v * s))
        })
    }

    /// Pullback along the linear coordinate change `old = A new`.
    pub fn pullback_linear(&self, a: [[f64; 3]; 3]) -> Self {
        let inner = self.clone();
        Self::new(format!("{} (linear pullback)", self.label), self.order, move |y| {
            let old = apply_linear(&a, y);
            let x = inner
                .eval_at(&point_of(&old).coords())?
                .map(|v| v.compose3(&old));
            Ok(std::array::from_fn(|i| {
                let mut acc = Jet3::zero();
                for (p, xp) in x.iter().enumerate() {
                    if a[p][i] != 0.0 {
                        acc += *xp * a[p][i];
                    }
                }
                acc
            }))
        })
    }
}

impl fmt::Debug for OneFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneFormField")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

/// A scalar function of `(nu, r, x)`.
#[derive(Clone)]
pub struct ScalarField3D {
    label: String,
    order: usize,
    f: Arc<ScalarFn>,
}

impl ScalarField3D {
    pub fn new(
        label: impl Into<String>,
        order: usize,
        f: impl Fn(&[Jet3; 3]) -> Result<Jet3> + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            order: order.min(ORDER),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Value at the seeded coordinate jets of a point.
    pub fn eval_at(&self, coords: &[Jet3; 3]) -> Result<Jet3> {
        (self.f)(coords)
    }

    pub fn jet(&self, p: Point) -> Result<Jet3> {
        self.eval_at(&p.coords())
    }

    pub fn value(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p)?.value())
    }
}

impl fmt::Debug for ScalarField3D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField3D")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish_non_exhaustive()
    }
}

fn point_of(c: &[Jet3; 3]) -> Point {
    Point::new(c[0].value(), c[1].value(), c[2].value())
}

fn apply_linear(a: &[[f64; 3]; 3], y: &[Jet3; 3]) -> [Jet3; 3] {
    std::array::from_fn(|p| {
        let mut acc = Jet3::zero();
        for (q, yq) in y.iter().enumerate() {
            if a[p][q] != 0.0 {
                acc += *yq * a[p][q];
            }
        }
        acc
    })
}

pub(crate) fn det3<J: Jet>(g: &[[J; 3]; 3]) -> J {
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
        - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

/// Inverse through the adjugate; the caller has checked the determinant.
pub(crate) fn inverse3<J: Jet>(g: &[[J; 3]; 3]) -> Result<[[J; 3]; 3]> {
    let inv_det = det3(g).recip()?;
    let cof = |i: usize, j: usize| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]
    };
    // inverse[j][i] = cofactor(i, j) / det
    Ok(std::array::from_fn(|j| {
        std::array::from_fn(|i| cof(i, j) * inv_det)
    }))
}

/// Weyl gauge transformation `(g, X) -> (Omega^2 g, X + d ln Omega)`.
pub fn conformal_rescale(
    g: &MetricField,
    x: &OneFormField,
    ln_omega: &ScalarField3D,
) -> (MetricField, OneFormField) {
    let (g0, w) = (g.clone(), ln_omega.clone());
    let metric = MetricField::new(
        format!("exp(2 {}) {}", ln_omega.label(), g.label()),
        g.order().min(ln_omega.order()),
        move |c| {
            let factor = (w.eval_at(c)? * 2.0).exp();
            Ok(g0.eval_at(c)?.map(|row| row.map(|v| v * factor)))
        },
    );
    let (x0, w) = (x.clone(), ln_omega.clone());
    let form = OneFormField::new(
        format!("{} + d({})", x.label(), ln_omega.label()),
        x.order().min(ln_omega.order().saturating_sub(1)),
        move |c| {
            let lw = w.eval_at(c)?;
            let base = x0.eval_at(c)?;
            Ok(std::array::from_fn(|a| base[a] + lw.diff(a)))
        },
    );
    (metric, form)
}
