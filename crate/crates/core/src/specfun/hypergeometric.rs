use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1};

const REL_TOL: f64 = 1e-12;
const MAX_TERMS: usize = 10_000;

/// Gauss hypergeometric series `2F1(a, b; c; z)` for `|z| < 1`, generic over
/// jets so that derivatives in `z` come out exactly.
pub fn hyp2f1_jet<J: Jet>(a: f64, b: f64, c: f64, z: J) -> Result<J> {
    let zv = z.value();
    if !(zv.abs() < 1.0) {
        return Err(Error::Domain {
            op: "hyp2f1",
            value: zv,
            reason: "series requires |z| < 1",
        });
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::Domain {
            op: "hyp2f1",
            value: c,
            reason: "c must not be a non-positive integer",
        });
    }
    let mut term = J::one();
    let mut sum = J::one();
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        if ratio == 0.0 {
            return Ok(sum);
        }
        term = term * z * ratio;
        sum += term;
        if (ratio * zv).abs() < 1.0 && term.max_abs() <= REL_TOL * sum.max_abs() {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy {
        estimate: sum.value(),
        bound: term.max_abs(),
    })
}

/// Scalar `2F1(a, b; c; z)`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_jet(a, b, c, z)
}

impl Jet1 {
    /// Convenience: `2F1` composed with this jet.
    pub fn hyp2f1(self, a: f64, b: f64, c: f64) -> Result<Jet1> {
        hyp2f1_jet(a, b, c, self)
    }
}
