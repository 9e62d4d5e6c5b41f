//! Truncated Taylor series in time.
//!
//! A [`Jet`] of order `p` stores `x(t0 + s) = sum_j c_j s^j` for `j <= p`,
//! i.e. `c_j = x^(j)(t0) / j!`. Arithmetic truncates to the lower order of
//! the operands.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

fn factorial(j: usize) -> f64 {
    (1..=j).map(|i| i as f64).product()
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Self { c }
    }

    /// Builds a jet from `[x, x', x'', ...]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "a jet needs at least its value");
        Self {
            c: d.iter().enumerate().map(|(j, v)| v / factorial(j)).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `j`-th time derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        self.c[j] * factorial(j)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let len = self.c.len().min(other.c.len());
        Jet {
            c: (0..len).map(|j| f(self.c[j], other.c[j])).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let len = self.c.len().min(other.c.len());
        let mut c = vec![0.0; len];
        for (i, ci) in c.iter_mut().enumerate() {
            *ci = (0..=i).map(|j| self.c[j] * other.c[i - j]).sum();
        }
        Jet { c }
    }

    /// Time derivative; the order drops by one (order 0 stays a zero constant).
    pub fn differentiate(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet { c: vec![0.0] };
        }
        Jet {
            c: (1..self.c.len()).map(|j| j as f64 * self.c[j]).collect(),
        }
    }

    /// `f(self)` given `f^(m)` at `self.value()` for `m = 0..=order`.
    pub fn compose(&self, f_derivs: &[f64]) -> Jet {
        let p = self.order();
        assert!(f_derivs.len() > p, "need derivatives up to the jet order");
        let mut shifted = self.clone();
        shifted.c[0] = 0.0;
        let mut out = Jet::constant(f_derivs[0], p);
        let mut power = Jet::constant(1.0, p);
        for (m, fm) in f_derivs.iter().enumerate().take(p + 1).skip(1) {
            power = power.mul(&shifted);
            let w = fm / factorial(m);
            for (o, q) in out.c.iter_mut().zip(&power.c) {
                *o += w * q;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        // x(t) = 1 + 2t, y(t) = 3 - t  => xy = 3 + 5t - 2t^2
        let x = Jet::from_derivatives(&[1.0, 2.0, 0.0]);
        let y = Jet::from_derivatives(&[3.0, -1.0, 0.0]);
        assert_eq!(x.mul(&y).coefficients(), &[3.0, 5.0, -2.0]);
    }

    #[test]
    fn compose_matches_chain_rule() {
        // exp(sin t) around t = 0: value 1, first 1, second 1, third 0
        let s = Jet::from_derivatives(&[0.0, 1.0, 0.0, -1.0]);
        let e = s.compose(&[1.0, 1.0, 1.0, 1.0]);
        let d: Vec<f64> = (0..=3).map(|j| e.derivative(j)).collect();
        for (got, want) in d.iter().zip([1.0, 1.0, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-14, "{d:?}");
        }
    }

    #[test]
    fn differentiate_shifts() {
        let x = Jet::from_derivatives(&[1.0, 2.0, 6.0]);
        let dx = x.differentiate();
        assert_eq!(dx.order(), 1);
        assert_eq!(dx.derivative(0), 2.0);
        assert_eq!(dx.derivative(1), 6.0);
    }
}
