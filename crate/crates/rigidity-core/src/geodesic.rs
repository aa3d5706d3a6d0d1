//! Unit-speed geodesics of a conformal metric and the scalar Jacobi equation
//! along them.
//!
//! The chart equations come from the Christoffel symbols of `e^{2φ}δ`:
//!
//! ```text
//! ẍ = −φ_x(ẋ² − ẏ²) − 2φ_y ẋẏ
//! ÿ =  φ_y(ẋ² − ẏ²) − 2φ_x ẋẏ
//! ```
//!
//! integrated with classical fixed-step RK4. The parameter is g-arclength:
//! the initial chart speed is `e^{−φ}` and the velocity is renormalized to
//! unit g-norm after every step, with the pre-renormalization drift kept as
//! a diagnostic. Where the metric is exactly flat (outside all bump
//! supports) a step is a straight segment, which RK4 reproduces exactly; the
//! hybrid tracer used for long-range work takes coarse straight steps there
//! instead of fine ones.

use alloc::vec::Vec;
use core::fmt;

use crate::geom::{Point2, Vec2};
use crate::math::FloatExt;
use crate::metric::{ConformalMetric, MetricError};

/// Coarse step taken where the metric is exactly Euclidean.
pub const FLAT_COARSE_STEP: f64 = 0.1;

/// One sample of a traced geodesic: arclength, chart position, chart
/// velocity (of Euclidean norm `e^{−φ}`, i.e. unit g-norm).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub pos: Point2,
    pub vel: Vec2,
}

/// An arclength-parametrized geodesic trace.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    /// Nominal fine step used inside curved regions.
    pub step: f64,
    /// Max of `| |γ̇|_g − 1 |` observed before per-step renormalization.
    pub max_unit_speed_drift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GeodesicError {
    BadArgument(&'static str),
    Metric(MetricError),
}

impl fmt::Display for GeodesicError {
    fmt_impl!();
}

// Small macro to keep the two error Displays uniform.
macro_rules! fmt_impl {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match self {
                GeodesicError::BadArgument(msg) => write!(f, "bad argument: {}", msg),
                GeodesicError::Metric(e) => write!(f, "metric evaluation failed: {}", e),
            }
        }
    };
}
use fmt_impl;

impl core::error::Error for GeodesicError {}

impl From<MetricError> for GeodesicError {
    fn from(e: MetricError) -> Self {
        GeodesicError::Metric(e)
    }
}

impl GeodesicPath {
    /// Total arclength of the trace.
    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn start(&self) -> PathSample {
        self.samples[0]
    }

    pub fn end(&self) -> PathSample {
        *self.samples.last().expect("path has at least one sample")
    }

    /// Position and velocity at arclength `t`, by cubic Hermite interpolation
    /// on the bracketing interval (exact on straight segments).
    pub fn sample_at(&self, t: f64) -> PathSample {
        let n = self.samples.len();
        if t <= self.samples[0].t {
            return self.samples[0];
        }
        if t >= self.samples[n - 1].t {
            return self.samples[n - 1];
        }
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.samples[mid].t <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = self.samples[lo];
        let b = self.samples[hi];
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (pos, dpos) = hermite(a.pos, a.vel * h, b.pos, b.vel * h, s);
        PathSample {
            t,
            pos,
            vel: dpos / h,
        }
    }
}

/// Cubic Hermite point and derivative (w.r.t. the unit parameter `s`).
fn hermite(p0: Point2, m0: Vec2, p1: Point2, m1: Vec2, s: f64) -> (Point2, Vec2) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let pos = Point2::new(
        h00 * p0.x + h10 * m0.x + h01 * p1.x + h11 * m1.x,
        h00 * p0.y + h10 * m0.y + h01 * p1.y + h11 * m1.y,
    );
    let d00 = 6.0 * s2 - 6.0 * s;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = -d00;
    let d11 = 3.0 * s2 - 2.0 * s;
    let dpos = Vec2::new(
        d00 * p0.x + d10 * m0.x + d01 * p1.x + d11 * m1.x,
        d00 * p0.y + d10 * m0.y + d01 * p1.y + d11 * m1.y,
    );
    (pos, dpos)
}

/// Chart acceleration of a unit-speed conformal geodesic.
#[inline]
fn acceleration(grad_phi: Vec2, v: Vec2) -> Vec2 {
    let q = v.x * v.x - v.y * v.y;
    let w = v.x * v.y;
    Vec2::new(
        -grad_phi.x * q - 2.0 * grad_phi.y * w,
        grad_phi.y * q - 2.0 * grad_phi.x * w,
    )
}

struct Stepper<'a> {
    metric: &'a ConformalMetric,
    pos: Point2,
    vel: Vec2,
    t: f64,
    max_drift: f64,
}

impl<'a> Stepper<'a> {
    fn new(metric: &'a ConformalMetric, pos: Point2, angle: f64) -> Result<Self, GeodesicError> {
        let phi = metric.eval(pos)?.phi;
        let vel = Vec2::from_angle(angle) * (-phi).exp();
        Ok(Stepper {
            metric,
            pos,
            vel,
            t: 0.0,
            max_drift: 0.0,
        })
    }

    fn sample(&self) -> PathSample {
        PathSample {
            t: self.t,
            pos: self.pos,
            vel: self.vel,
        }
    }

    /// One RK4 step of arclength `h`, followed by renormalization to unit
    /// g-speed.
    fn rk4(&mut self, h: f64) -> Result<(), GeodesicError> {
        let m = self.metric;
        let (p, v) = (self.pos, self.vel);
        let a1 = acceleration(m.eval(p)?.grad_phi, v);
        let p2 = p + v * (0.5 * h);
        let v2 = v + a1 * (0.5 * h);
        let a2 = acceleration(m.eval(p2)?.grad_phi, v2);
        let p3 = p + v2 * (0.5 * h);
        let v3 = v + a2 * (0.5 * h);
        let a3 = acceleration(m.eval(p3)?.grad_phi, v3);
        let p4 = p + v3 * h;
        let v4 = v + a3 * h;
        let a4 = acceleration(m.eval(p4)?.grad_phi, v4);
        self.pos = p + (v + (v2 + v3) * 2.0 + v4) * (h / 6.0);
        self.vel = v + (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
        self.t += h;
        let phi = m.eval(self.pos)?.phi;
        let g_speed = self.vel.norm() * phi.exp();
        let drift = (g_speed - 1.0).abs();
        if drift > self.max_drift {
            self.max_drift = drift;
        }
        self.vel = self.vel * ((-phi).exp() / self.vel.norm());
        Ok(())
    }

    /// Exact straight advance; valid only while the segment stays in the
    /// flat exterior, where the chart velocity already has unit norm.
    fn straight(&mut self, h: f64) {
        self.pos += self.vel * h;
        self.t += h;
    }
}

fn check_args(length: f64, step: f64, start: Point2, angle: f64) -> Result<(), GeodesicError> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(GeodesicError::BadArgument("length must be positive"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(GeodesicError::BadArgument("step must be positive"));
    }
    if step > length {
        return Err(GeodesicError::BadArgument("step exceeds length"));
    }
    if !start.is_finite() || !angle.is_finite() {
        return Err(GeodesicError::BadArgument("non-finite start or angle"));
    }
    Ok(())
}

/// Integrates the unit-speed geodesic from `start` at chart angle `angle`
/// for total arclength `length`, sampled every `step` (last step partial).
pub fn shoot(
    metric: &ConformalMetric,
    start: Point2,
    angle: f64,
    length: f64,
    step: f64,
) -> Result<GeodesicPath, GeodesicError> {
    check_args(length, step, start, angle)?;
    let mut st = Stepper::new(metric, start, angle)?;
    let n = (length / step).ceil() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(st.sample());
    for i in 0..n {
        let target = if i + 1 == n { length } else { (i as f64 + 1.0) * step };
        let h = target - st.t;
        if h <= 0.0 {
            break;
        }
        match st.metric.flat_clearance(st.pos) {
            Some(c) if c >= h => st.straight(h),
            _ => st.rk4(h)?,
        }
        st.t = target; // kill accumulated rounding in the arclength grid
        samples.push(st.sample());
    }
    Ok(GeodesicPath {
        samples,
        step,
        max_unit_speed_drift: st.max_drift,
    })
}

/// Long-range tracer: identical to [`shoot`] inside curved regions but takes
/// straight steps of up to [`FLAT_COARSE_STEP`] through the flat exterior.
/// Sample spacing is `fine_step` near curvature and coarse elsewhere.
pub(crate) fn shoot_hybrid(
    metric: &ConformalMetric,
    start: Point2,
    angle: f64,
    length: f64,
    fine_step: f64,
) -> Result<GeodesicPath, GeodesicError> {
    check_args(length, fine_step, start, angle.rem_euclid_f(core::f64::consts::TAU))?;
    let mut st = Stepper::new(metric, start, angle)?;
    let mut samples = Vec::new();
    samples.push(st.sample());
    while st.t < length {
        let remaining = length - st.t;
        let clearance = st.metric.flat_clearance(st.pos);
        match clearance {
            Some(c) if c >= fine_step => {
                let h = c.min(FLAT_COARSE_STEP).min(remaining);
                st.straight(h);
            }
            _ => {
                let h = fine_step.min(remaining);
                st.rk4(h)?;
            }
        }
        samples.push(st.sample());
    }
    Ok(GeodesicPath {
        samples,
        step: fine_step,
        max_unit_speed_drift: st.max_drift,
    })
}

/// Scalar Jacobi field along a traced geodesic: `J'' + K(γ(t))·J = 0`,
/// `J(0) = 0`, `J'(0) = 1`.
#[derive(Clone, Debug)]
pub struct JacobiTrace {
    /// J at each path sample.
    pub values: Vec<f64>,
    /// J' at each path sample.
    pub derivatives: Vec<f64>,
    /// First sign change of J in `(0, T]`, by linear interpolation.
    pub first_zero: Option<f64>,
}

/// Integrates the Jacobi equation along `path`, interval by interval, with
/// curvature read at the endpoints and at the Hermite midpoint of each
/// interval. Reports the first conjugate parameter if J changes sign.
pub fn jacobi(metric: &ConformalMetric, path: &GeodesicPath) -> Result<JacobiTrace, GeodesicError> {
    let n = path.samples.len();
    let mut values = Vec::with_capacity(n);
    let mut derivatives = Vec::with_capacity(n);
    let mut j = 0.0f64;
    let mut jp = 1.0f64;
    values.push(j);
    derivatives.push(jp);
    let mut first_zero = None;
    let mut k_lo = metric.eval(path.samples[0].pos)?.curvature;
    for i in 0..n - 1 {
        let a = path.samples[i];
        let b = path.samples[i + 1];
        let h = b.t - a.t;
        let k_hi = metric.eval(b.pos)?.curvature;
        let k_mid = if k_lo == 0.0 && k_hi == 0.0 && metric.flat_exterior().is_some() {
            // Straight flat segment: J advances linearly, no midpoint needed.
            0.0
        } else {
            let (mid, _) = hermite(a.pos, a.vel * h, b.pos, b.vel * h, 0.5);
            metric.eval(mid)?.curvature
        };
        // RK4 for (J, J')' = (J', −K J) with K at t, t+h/2, t+h.
        let (k1j, k1p) = (jp, -k_lo * j);
        let (k2j, k2p) = (jp + 0.5 * h * k1p, -k_mid * (j + 0.5 * h * k1j));
        let (k3j, k3p) = (jp + 0.5 * h * k2p, -k_mid * (j + 0.5 * h * k2j));
        let (k4j, k4p) = (jp + h * k3p, -k_hi * (j + h * k3j));
        let j_next = j + (h / 6.0) * (k1j + 2.0 * (k2j + k3j) + k4j);
        let jp_next = jp + (h / 6.0) * (k1p + 2.0 * (k2p + k3p) + k4p);
        if first_zero.is_none() && i > 0 && j > 0.0 && j_next <= 0.0 {
            first_zero = Some(a.t + h * j / (j - j_next));
        }
        j = j_next;
        jp = jp_next;
        values.push(j);
        derivatives.push(jp);
        k_lo = k_hi;
    }
    Ok(JacobiTrace {
        values,
        derivatives,
        first_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_shoot_is_straight() {
        let m = ConformalMetric::flat();
        let p = shoot(&m, Point2::ORIGIN, 0.0, 5.0, 1e-3).unwrap();
        let end = p.end();
        assert!((end.pos.x - 5.0).abs() < 1e-9);
        assert!(end.pos.y.abs() < 1e-12);
        assert!((p.length() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bump_axis_is_a_geodesic() {
        // Reflection symmetry across the x-axis keeps the geodesic on it.
        let m = ConformalMetric::bump(0.4, Point2::ORIGIN, 1.0);
        let p = shoot(&m, Point2::new(-3.0, 0.0), 0.0, 6.0, 1e-3).unwrap();
        assert!(p.end().pos.y.abs() < 1e-9);
        assert!(p.max_unit_speed_drift < 1e-8);
    }

    #[test]
    fn unit_speed_holds_at_every_sample() {
        let m = ConformalMetric::bump(0.3, Point2::new(1.0, 0.5), 1.2);
        let p = shoot(&m, Point2::new(-2.0, 0.1), 0.2, 8.0, 1e-3).unwrap();
        for s in &p.samples {
            let phi = m.eval(s.pos).unwrap().phi;
            assert!((s.vel.norm() * phi.exp() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn arclength_grid_is_uniform() {
        let m = ConformalMetric::bump(0.3, Point2::ORIGIN, 1.0);
        let p = shoot(&m, Point2::new(-2.0, 0.2), 0.1, 4.0005, 1e-3).unwrap();
        for w in p.samples.windows(2) {
            let dt = w[1].t - w[0].t;
            assert!(dt <= 1e-3 + 1e-12 && dt > 0.0);
        }
        assert!((p.length() - 4.0005).abs() < 1e-12);
    }

    #[test]
    fn reversal_returns_to_start() {
        let m = ConformalMetric::bump(0.4, Point2::new(0.3, -0.2), 1.0);
        let fwd = shoot(&m, Point2::new(-2.5, 0.4), -0.1, 6.0, 1e-3).unwrap();
        let end = fwd.end();
        let back_angle = (-end.vel).angle();
        let back = shoot(&m, end.pos, back_angle, fwd.length(), 1e-3).unwrap();
        assert!(back.end().pos.dist(Point2::new(-2.5, 0.4)) < 1e-6);
    }

    #[test]
    fn flat_jacobi_is_linear() {
        let m = ConformalMetric::flat();
        let p = shoot(&m, Point2::ORIGIN, 0.7, 10.0, 1e-3).unwrap();
        let tr = jacobi(&m, &p).unwrap();
        for (s, j) in p.samples.iter().zip(&tr.values) {
            assert!((j - s.t).abs() < 1e-8);
        }
        assert!(tr.first_zero.is_none());
    }

    #[test]
    fn sphere_jacobi_is_sine() {
        let m = ConformalMetric::stereographic(1.0);
        let p = shoot(&m, Point2::ORIGIN, 0.3, 2.0, 1e-3).unwrap();
        let tr = jacobi(&m, &p).unwrap();
        let mut worst = 0.0f64;
        for (s, j) in p.samples.iter().zip(&tr.values) {
            worst = worst.max((j - s.t.sin()).abs());
        }
        assert!(worst < 1e-6, "sup |J - sin t| = {}", worst);
        assert!(tr.first_zero.is_none());
    }

    #[test]
    fn sphere_conjugate_point_at_pi() {
        let m = ConformalMetric::stereographic(1.0);
        let p = shoot(&m, Point2::ORIGIN, 0.0, 3.5, 1e-3).unwrap();
        let tr = jacobi(&m, &p).unwrap();
        let z = tr.first_zero.expect("sin has a zero at pi");
        assert!((z - core::f64::consts::PI).abs() < 1e-5);
    }

    #[test]
    fn hybrid_matches_strict_far_field() {
        let m = ConformalMetric::bump(0.3, Point2::ORIGIN, 1.0);
        let strict = shoot(&m, Point2::new(-4.0, 0.35), 0.05, 12.0, 1e-3).unwrap();
        let hybrid = shoot_hybrid(&m, Point2::new(-4.0, 0.35), 0.05, 12.0, 1e-3).unwrap();
        let e1 = strict.end();
        let e2 = hybrid.end();
        assert!(e1.pos.dist(e2.pos) < 1e-9);
        assert!((e1.vel - e2.vel).norm() < 1e-9);
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let m = ConformalMetric::flat();
        assert!(shoot(&m, Point2::ORIGIN, 0.0, 5.0, 0.0).is_err());
        assert!(shoot(&m, Point2::ORIGIN, 0.0, -1.0, 1e-3).is_err());
        assert!(shoot(&m, Point2::ORIGIN, f64::NAN, 5.0, 1e-3).is_err());
        assert!(shoot(&m, Point2::ORIGIN, 0.0, 1e-4, 1e-3).is_err());
    }

    #[test]
    fn sample_at_interpolates_exactly_on_straight_runs() {
        let m = ConformalMetric::flat();
        let p = shoot(&m, Point2::ORIGIN, 0.0, 5.0, 0.5).unwrap();
        let s = p.sample_at(1.23);
        assert!((s.pos.x - 1.23).abs() < 1e-12);
        assert!(s.pos.y.abs() < 1e-12);
    }
}
