//! Conformal metrics `g = e^{2φ}(dx² + dy²)` on the plane with closed-form
//! conformal factor, gradient, Laplacian and Gaussian curvature.
//!
//! Three families are built in:
//!
//! - `Flat`: φ ≡ 0, the Euclidean plane;
//! - `Bump`/`BumpSum`: smooth bumps `φ = A·exp(1/(s² − 1))` with
//!   `s = |p − c|/ρ`, supported in the disc of radius ρ around `c`. The
//!   conformal factor is exactly 1 outside the supports, so these surfaces
//!   are complete and flat at infinity;
//! - `Stereographic(κ)`: `φ = −log(1 + (κ/4)|p|²)`, constant curvature κ,
//!   kept as a closed-form oracle for Jacobi-field and area tests.
//!
//! All derivatives are closed-form; finite differences appear only in test
//! oracles.

use alloc::vec::Vec;
use core::fmt;

use crate::geom::{Point2, Vec2};
use crate::math::FloatExt;

/// One smooth compactly supported bump of the conformal factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bump {
    /// Amplitude `A`; the bump's peak value of φ is `A·e^{−1}`.
    pub amplitude: f64,
    pub center: Point2,
    /// Support radius ρ > 0.
    pub radius: f64,
}

impl Bump {
    pub fn new(amplitude: f64, center: Point2, radius: f64) -> Self {
        Bump {
            amplitude,
            center,
            radius,
        }
    }
}

/// A complete conformal metric on the plane.
#[derive(Clone, Debug, PartialEq)]
pub enum ConformalMetric {
    Flat,
    Bump(Bump),
    BumpSum(Vec<Bump>),
    /// Constant curvature κ through the stereographic conformal factor
    /// `(1 + (κ/4)|p|²)^{-1}`. For κ > 0 the chart covers the sphere minus a
    /// point; for κ < 0 only the disc `|p|² < −4/κ`.
    Stereographic { kappa: f64 },
}

/// φ and its derivatives at a point, plus the Gaussian curvature
/// `K = −e^{−2φ}·Δφ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample {
    pub phi: f64,
    pub grad_phi: Vec2,
    pub laplacian_phi: f64,
    pub curvature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricError {
    /// The stereographic factor `1 + (κ/4)|p|²` is not positive at `p`.
    OutsideDomain { point: Point2, kappa: f64 },
    NonFinitePoint,
    /// A bump radius is not strictly positive.
    BadRadius(f64),
}

impl fmt::Display for MetricError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricError::OutsideDomain { point, kappa } => write!(
                f,
                "point ({}, {}) is outside the stereographic chart for kappa = {}",
                point.x, point.y, kappa
            ),
            MetricError::NonFinitePoint => write!(f, "point has non-finite coordinates"),
            MetricError::BadRadius(r) => write!(f, "bump radius must be positive, got {}", r),
        }
    }
}

impl core::error::Error for MetricError {}

/// (φ, ∇φ, Δφ) of a single bump at `p`; exactly zero outside the support.
fn bump_terms(b: &Bump, p: Point2) -> (f64, Vec2, f64) {
    let d = p - b.center;
    let rho2 = b.radius * b.radius;
    let u = d.norm_sq() / rho2;
    if u >= 1.0 {
        return (0.0, Vec2::ZERO, 0.0);
    }
    let um1 = u - 1.0;
    let g = (1.0 / um1).exp();
    if g == 0.0 {
        // Underflows just inside the support edge; all derivatives vanish
        // faster than any power, so zero is the correct rounding.
        return (0.0, Vec2::ZERO, 0.0);
    }
    let a = b.amplitude;
    // dφ/du = −A·g/(u−1)², d²φ/du² = A·g·(2u−1)/(u−1)⁴
    let dphi_du = -a * g / (um1 * um1);
    let d2phi_du2 = a * g * (2.0 * u - 1.0) / um1.powi(4);
    // u = |p−c|²/ρ²: ∇u = 2(p−c)/ρ², |∇u|² = 4u/ρ², Δu = 4/ρ²
    let grad_u = d * (2.0 / rho2);
    let lap = d2phi_du2 * (4.0 * u / rho2) + dphi_du * (4.0 / rho2);
    (a * g, grad_u * dphi_du, lap)
}

impl ConformalMetric {
    pub fn flat() -> Self {
        ConformalMetric::Flat
    }

    pub fn bump(amplitude: f64, center: Point2, radius: f64) -> Self {
        ConformalMetric::Bump(Bump::new(amplitude, center, radius))
    }

    pub fn bump_sum(bumps: Vec<Bump>) -> Self {
        ConformalMetric::BumpSum(bumps)
    }

    pub fn stereographic(kappa: f64) -> Self {
        ConformalMetric::Stereographic { kappa }
    }

    /// Validates construction parameters.
    pub fn validate(&self) -> Result<(), MetricError> {
        let check = |b: &Bump| {
            if b.radius > 0.0 && b.radius.is_finite() {
                Ok(())
            } else {
                Err(MetricError::BadRadius(b.radius))
            }
        };
        match self {
            ConformalMetric::Flat | ConformalMetric::Stereographic { .. } => Ok(()),
            ConformalMetric::Bump(b) => check(b),
            ConformalMetric::BumpSum(bs) => bs.iter().try_for_each(check),
        }
    }

    /// φ, ∇φ, Δφ and K at `p`, all closed-form.
    pub fn eval(&self, p: Point2) -> Result<MetricSample, MetricError> {
        if !p.is_finite() {
            return Err(MetricError::NonFinitePoint);
        }
        let (phi, grad, lap) = match self {
            ConformalMetric::Flat => (0.0, Vec2::ZERO, 0.0),
            ConformalMetric::Bump(b) => bump_terms(b, p),
            ConformalMetric::BumpSum(bs) => {
                let mut phi = 0.0;
                let mut grad = Vec2::ZERO;
                let mut lap = 0.0;
                for b in bs {
                    let (f, g, l) = bump_terms(b, p);
                    phi += f;
                    grad += g;
                    lap += l;
                }
                (phi, grad, lap)
            }
            ConformalMetric::Stereographic { kappa } => {
                // φ = −log w, w = 1 + (κ/4)|p|²; Δφ = −κ/w², K ≡ κ.
                let w = 1.0 + 0.25 * kappa * p.to_vec().norm_sq();
                if w <= 0.0 {
                    return Err(MetricError::OutsideDomain {
                        point: p,
                        kappa: *kappa,
                    });
                }
                let grad = p.to_vec() * (-0.5 * kappa / w);
                (-w.ln(), grad, -kappa / (w * w))
            }
        };
        let curvature = -(-2.0 * phi).exp() * lap;
        Ok(MetricSample {
            phi,
            grad_phi: grad,
            laplacian_phi: lap,
            curvature,
        })
    }

    /// Gaussian curvature at `p`.
    pub fn gaussian_curvature(&self, p: Point2) -> Result<f64, MetricError> {
        Ok(self.eval(p)?.curvature)
    }

    /// φ alone (cheaper than [`eval`](Self::eval) for length integrals).
    pub fn phi(&self, p: Point2) -> Result<f64, MetricError> {
        match self {
            ConformalMetric::Flat => Ok(0.0),
            ConformalMetric::Bump(b) => Ok(bump_phi(b, p)),
            ConformalMetric::BumpSum(bs) => Ok(bs.iter().map(|b| bump_phi(b, p)).sum()),
            ConformalMetric::Stereographic { kappa } => {
                let w = 1.0 + 0.25 * kappa * p.to_vec().norm_sq();
                if w <= 0.0 {
                    return Err(MetricError::OutsideDomain {
                        point: p,
                        kappa: *kappa,
                    });
                }
                Ok(-w.ln())
            }
        }
    }

    /// The discs outside of which the metric is exactly Euclidean, or `None`
    /// when no such region exists (stereographic). An empty list means flat
    /// everywhere.
    pub fn flat_exterior(&self) -> Option<&[Bump]> {
        match self {
            ConformalMetric::Flat => Some(&[]),
            ConformalMetric::Bump(b) => Some(core::slice::from_ref(b)),
            ConformalMetric::BumpSum(bs) => Some(bs.as_slice()),
            ConformalMetric::Stereographic { .. } => None,
        }
    }

    /// Euclidean distance from `p` to the union of curvature supports
    /// (`+∞` when the metric is flat everywhere, `None` for stereographic).
    /// Within that distance of `p` the metric is exactly Euclidean.
    pub fn flat_clearance(&self, p: Point2) -> Option<f64> {
        let bumps = self.flat_exterior()?;
        let mut clearance = f64::INFINITY;
        for b in bumps {
            clearance = clearance.min(p.dist(b.center) - b.radius);
        }
        Some(clearance)
    }

    /// Conformal length of the straight chart segment from `a` to `b`,
    /// by composite Simpson on `e^{φ}`.
    pub fn segment_length(&self, a: Point2, b: Point2, panels: usize) -> Result<f64, MetricError> {
        let n = panels.max(1);
        let d = b - a;
        let len = d.norm();
        if len == 0.0 {
            return Ok(0.0);
        }
        let h = 1.0 / (n as f64);
        let mut acc = (self.phi(a)?.exp() + self.phi(b)?.exp()) * 0.5;
        let mut mid = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) * h;
            mid += self.phi(a + d * t)?.exp();
            if i > 0 {
                acc += self.phi(a + d * (i as f64 * h))?.exp();
            }
        }
        // Simpson from trapezoid + midpoint: (T + 2M)/3
        Ok(len * h * (acc + 2.0 * mid) / 3.0)
    }
}

#[inline]
fn bump_phi(b: &Bump, p: Point2) -> f64 {
    let u = (p - b.center).norm_sq() / (b.radius * b.radius);
    if u >= 1.0 {
        0.0
    } else {
        b.amplitude * (1.0 / (u - 1.0)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_is_flat() {
        let m = ConformalMetric::flat();
        let s = m.eval(Point2::new(3.0, 4.0)).unwrap();
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.grad_phi, Vec2::ZERO);
        assert_eq!(s.curvature, 0.0);
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let m = ConformalMetric::bump(0.5, Point2::ORIGIN, 1.0);
        let s = m.eval(Point2::new(2.0, 0.0)).unwrap();
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.grad_phi, Vec2::ZERO);
        assert_eq!(s.laplacian_phi, 0.0);
        assert_eq!(s.curvature, 0.0);
    }

    #[test]
    fn bump_peak_value() {
        let m = ConformalMetric::bump(0.5, Point2::ORIGIN, 1.0);
        let s = m.eval(Point2::ORIGIN).unwrap();
        assert!((s.phi - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn stereographic_curvature_is_constant() {
        let m = ConformalMetric::stereographic(1.0);
        let s = m.eval(Point2::new(0.3, -0.2)).unwrap();
        assert!((s.curvature - 1.0).abs() < 1e-12);
        let m = ConformalMetric::stereographic(-0.7);
        let s = m.eval(Point2::new(1.0, 1.0)).unwrap();
        assert!((s.curvature + 0.7).abs() < 1e-12);
    }

    #[test]
    fn stereographic_domain_error() {
        let m = ConformalMetric::stereographic(-1.0);
        // |p|² = 8 > 4 = −4/κ
        assert!(matches!(
            m.eval(Point2::new(2.0, 2.0)),
            Err(MetricError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn non_finite_point_rejected() {
        let m = ConformalMetric::flat();
        assert!(matches!(
            m.eval(Point2::new(f64::NAN, 0.0)),
            Err(MetricError::NonFinitePoint)
        ));
    }

    #[test]
    fn flat_clearance_reports_support_distance() {
        let m = ConformalMetric::bump(0.5, Point2::new(1.0, 0.0), 0.5);
        assert!((m.flat_clearance(Point2::new(-2.0, 0.0)).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(
            ConformalMetric::flat().flat_clearance(Point2::ORIGIN),
            Some(f64::INFINITY)
        );
        assert_eq!(
            ConformalMetric::stereographic(1.0).flat_clearance(Point2::ORIGIN),
            None
        );
    }

    #[test]
    fn segment_length_flat_is_euclidean() {
        let m = ConformalMetric::flat();
        let l = m
            .segment_length(Point2::ORIGIN, Point2::new(3.0, 4.0), 16)
            .unwrap();
        assert!((l - 5.0).abs() < 1e-12);
    }
}
