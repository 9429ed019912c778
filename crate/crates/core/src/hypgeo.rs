//! Geometry of the Poincaré disk.
//!
//! Points are plain complex numbers checked to lie in the open unit disk.
//! Geodesics are stored in the canonical form used for reflections: either a
//! diameter at angle `θ`, or an arc which becomes symmetric about the real
//! axis after rotating by `e^{iθ}` and then crosses it at `(a, 0)`.
//! Reflection across an arc is `z ↦ e^{-iθ} T⁻¹(−conj T(e^{iθ} z))` with
//! `T(z) = (z − a)/(1 − a z)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Half-width of the band around a geodesic that is classified as lying on it.
pub const ON_GEODESIC_TOL: f64 = 1e-12;

/// Smallest admissible arc intercept; `1 − MIN_INTERCEPT` is the largest.
pub const MIN_INTERCEPT: f64 = 1e-9;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A point of the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointD(Complex64);

impl PointD {
    pub const ORIGIN: PointD = PointD(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm_sqr() < 1.0 {
            Ok(PointD(z))
        } else {
            Err(Error::OutsideDisk { re: z.re, im: z.im })
        }
    }

    /// Wraps a value already known to be in the disk (images of disk
    /// automorphisms). Roundoff can place such images at `|z| = 1` only for
    /// inputs within machine precision of the boundary.
    pub(crate) fn from_complex_unchecked(z: Complex64) -> Self {
        PointD(z)
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn z(self) -> Complex64 {
        self.0
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(self) -> f64 {
        self.0.norm_sqr()
    }
}

impl fmt::Display for PointD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0.re, self.0.im)
    }
}

/// `[z, w]²` on raw complex values.
#[inline]
pub(crate) fn pseudo_distance_sqr_c(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm_sqr();
    let den = (ONE - z.conj() * w).norm_sqr();
    num / den
}

#[inline]
pub(crate) fn pseudo_distance_c(z: Complex64, w: Complex64) -> f64 {
    pseudo_distance_sqr_c(z, w).sqrt()
}

#[inline]
pub(crate) fn mobius_phi_c(z: Complex64, w: Complex64) -> Complex64 {
    (z - w) / (ONE - z.conj() * w)
}

/// Pseudo-hyperbolic distance `[z, w] = |z − w| / |1 − z̄ w|`.
pub fn pseudo_distance(z: PointD, w: PointD) -> f64 {
    pseudo_distance_c(z.0, w.0)
}

/// Hyperbolic distance `2 atanh [z, w]`.
pub fn hyperbolic_distance(z: PointD, w: PointD) -> f64 {
    2.0 * pseudo_distance(z, w).atanh()
}

/// The involutive disk automorphism `φ_z(w) = (z − w)/(1 − z̄ w)`.
pub fn mobius_phi(z: PointD, w: PointD) -> PointD {
    PointD::from_complex_unchecked(mobius_phi_c(z.0, w.0))
}

#[inline]
fn t_map(a: f64, z: Complex64) -> Complex64 {
    (z - a) / (ONE - a * z)
}

#[inline]
fn t_inv(a: f64, w: Complex64) -> Complex64 {
    (w + a) / (ONE + a * w)
}

/// The real Möbius map `T(z) = (z − a)/(1 − a z)` sending `a` to the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusT {
    a: f64,
}

impl MobiusT {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a < 1.0 {
            Ok(MobiusT { a })
        } else {
            Err(invalid(format!("Möbius parameter a = {a} must lie in (0, 1)")))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn map(&self, z: PointD) -> PointD {
        PointD::from_complex_unchecked(t_map(self.a, z.0))
    }

    pub fn inverse(&self, w: PointD) -> PointD {
        PointD::from_complex_unchecked(t_inv(self.a, w.0))
    }

    /// `T` on the whole complex plane (e.g. boundary points of the disk).
    pub fn map_extended(&self, z: Complex64) -> Complex64 {
        t_map(self.a, z)
    }
}

/// Which side of a geodesic a point lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Positive,
    Negative,
    On,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
            Side::On => Side::On,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeodesicKind {
    Diameter,
    Arc,
}

/// A geodesic of the Poincaré disk in canonical form.
///
/// `theta` is always reduced into `[0, π)`. For arcs whose rotation would need
/// `θ ∈ [π, 2π)`, the rotation is taken as `θ − π` and the intercept is stored
/// with a negative sign; the reflection formula is unchanged.
///
/// Side convention: for a diameter, `Positive` is `Re(i e^{-iθ} z) > 0`. For an
/// arc, `Positive` is the region enclosed by the arc's circle, i.e. the side
/// not containing the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geodesic {
    kind: GeodesicKind,
    theta: f64,
    a: f64,
    rot: Complex64,
}

fn reduce_angle(theta: f64, period: f64) -> f64 {
    let t = theta.rem_euclid(period);
    if t >= period {
        0.0
    } else {
        t
    }
}

impl Geodesic {
    /// The diameter making angle `theta` with the real axis.
    pub fn diameter(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid("diameter angle must be finite"));
        }
        let theta = reduce_angle(theta, PI);
        Ok(Geodesic { kind: GeodesicKind::Diameter, theta, a: 0.0, rot: Complex64::from_polar(1.0, theta) })
    }

    /// The arc `e^{-iθ}(C ∩ 𝔻)` where `C` is the circle orthogonal to the unit
    /// circle through `(a, 0)` and symmetric about the real axis.
    pub fn arc(theta: f64, a: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid("arc rotation angle must be finite"));
        }
        if !(MIN_INTERCEPT..=1.0 - MIN_INTERCEPT).contains(&a) {
            return Err(invalid(format!("arc intercept a = {a} outside [{MIN_INTERCEPT}, {}]", 1.0 - MIN_INTERCEPT)));
        }
        let t = theta.rem_euclid(2.0 * PI);
        let (t, a) = if t >= PI { (t - PI, -a) } else { (t, a) };
        let t = reduce_angle(t, PI);
        Ok(Geodesic { kind: GeodesicKind::Arc, theta: t, a, rot: Complex64::from_polar(1.0, t) })
    }

    /// The arc whose Euclidean circle is centred at `center` (`|center| > 1`);
    /// orthogonality to the unit circle fixes its radius.
    pub fn from_circle_center(center: Complex64) -> Result<Self> {
        let d = center.norm();
        if !(d.is_finite() && d > 1.0) {
            return Err(invalid(format!("circle centre {center} must satisfy |c| > 1")));
        }
        let a = 1.0 / (d + (d * d - 1.0).sqrt());
        Geodesic::arc(-center.arg(), a)
    }

    pub fn kind(&self) -> GeodesicKind {
        self.kind
    }

    /// Canonical rotation angle in `[0, π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Signed real-axis intercept of the rotated arc (0 for diameters).
    pub fn intercept(&self) -> f64 {
        self.a
    }

    /// Euclidean centre and radius of the arc's circle `C`.
    pub fn circle(&self) -> Option<(Complex64, f64)> {
        match self.kind {
            GeodesicKind::Diameter => None,
            GeodesicKind::Arc => {
                let a = self.a;
                let z0 = (1.0 + a * a) / (2.0 * a);
                let r = ((1.0 - a * a) / (2.0 * a)).abs();
                Some((self.rot.conj() * z0, r))
            }
        }
    }

    /// The two points where the geodesic meets the unit circle.
    pub fn endpoints(&self) -> (Complex64, Complex64) {
        match self.kind {
            GeodesicKind::Diameter => (self.rot, -self.rot),
            GeodesicKind::Arc => {
                let a = self.a;
                let s = 2.0 * a / (a * a + 1.0);
                let h = (1.0 - a * a) / (2.0 * a);
                let p = Complex64::new(s, s * h);
                let q = Complex64::new(s, -s * h);
                (self.rot.conj() * p, self.rot.conj() * q)
            }
        }
    }

    /// Signed quantity whose sign is the side of `z`; zero exactly on the geodesic.
    #[inline]
    pub(crate) fn side_value_c(&self, z: Complex64) -> f64 {
        match self.kind {
            GeodesicKind::Diameter => (Complex64::i() * self.rot.conj() * z).re,
            GeodesicKind::Arc => t_map(self.a, self.rot * z).re * self.a.signum(),
        }
    }

    pub fn side_value(&self, z: PointD) -> f64 {
        self.side_value_c(z.0)
    }

    #[inline]
    pub(crate) fn side_c(&self, z: Complex64) -> Side {
        let s = self.side_value_c(z);
        if s.abs() < ON_GEODESIC_TOL {
            Side::On
        } else if s > 0.0 {
            Side::Positive
        } else {
            Side::Negative
        }
    }

    pub fn side(&self, z: PointD) -> Side {
        self.side_c(z.0)
    }

    #[inline]
    pub(crate) fn reflect_c(&self, z: Complex64) -> Complex64 {
        match self.kind {
            GeodesicKind::Diameter => self.rot * self.rot * z.conj(),
            GeodesicKind::Arc => {
                let t = t_map(self.a, self.rot * z);
                self.rot.conj() * t_inv(self.a, -t.conj())
            }
        }
    }

    /// The reflection `σ_𝒢(z)`.
    pub fn reflect(&self, z: PointD) -> PointD {
        PointD::from_complex_unchecked(self.reflect_c(z.0))
    }

    /// `|det Dσ(z)| = (1 − |σ(z)|²)² / (1 − |z|²)²`.
    pub fn reflection_jacobian(&self, z: PointD) -> f64 {
        let s = self.reflect_c(z.0);
        let num = 1.0 - s.norm_sqr();
        let den = 1.0 - z.0.norm_sqr();
        (num * num) / (den * den)
    }

    /// The geodesic through `p` meeting this one at a right angle.
    ///
    /// `p` must lie on this geodesic up to `tol` in side value.
    pub fn orthogonal_through(&self, p: PointD, tol: f64) -> Result<Geodesic> {
        if self.side_value(p).abs() > tol {
            return Err(invalid(format!("point {p} is not on the geodesic")));
        }
        let z = p.0;
        let tangent = match self.kind {
            GeodesicKind::Diameter => self.rot,
            GeodesicKind::Arc => {
                let (c, _) = self.circle().expect("arc has a circle");
                let radial = z - c;
                Complex64::i() * radial / radial.norm()
            }
        };
        if z.norm() < 1e-14 {
            return Geodesic::diameter(self.theta + 0.5 * PI);
        }
        let d = (z.conj() * tangent).re;
        if d.abs() < 1e-14 {
            // tangent is perpendicular to the radius through p
            return Geodesic::diameter(z.arg());
        }
        let t = (1.0 - z.norm_sqr()) / (2.0 * d);
        Geodesic::from_circle_center(z + tangent * t)
    }
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeodesicKind::Diameter => write!(f, "diam:{}", self.theta),
            GeodesicKind::Arc => write!(f, "arc:{}:{}", self.theta, self.a),
        }
    }
}

/// `Δ_ρ(z) = {w : [z, w] < ρ}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolicDisk {
    center: PointD,
    rho: f64,
}

impl HyperbolicDisk {
    pub fn new(center: PointD, rho: f64) -> Result<Self> {
        if rho > 0.0 && rho < 1.0 {
            Ok(HyperbolicDisk { center, rho })
        } else {
            Err(invalid(format!("pseudo-hyperbolic radius {rho} must lie in (0, 1)")))
        }
    }

    pub fn center(&self) -> PointD {
        self.center
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Euclidean centre and radius of the same set.
    pub fn euclidean_params(&self) -> (PointD, f64) {
        let z = self.center.0;
        let s = z.norm_sqr();
        let r2 = self.rho * self.rho;
        let den = 1.0 - r2 * s;
        let c = z * ((1.0 - r2) / den);
        (PointD::from_complex_unchecked(c), self.rho * (1.0 - s) / den)
    }

    /// Lebesgue area `π(1 − |z|²)² ρ² / (1 − |z|² ρ²)²`.
    pub fn lebesgue_measure(&self) -> f64 {
        let s = self.center.norm_sqr();
        let r2 = self.rho * self.rho;
        let den = 1.0 - s * r2;
        PI * (1.0 - s) * (1.0 - s) * r2 / (den * den)
    }

    /// Hyperbolic measure `ρ²/(1 − ρ²)`, independent of the centre.
    pub fn measure(&self) -> f64 {
        let r2 = self.rho * self.rho;
        r2 / (1.0 - r2)
    }

    #[inline]
    pub(crate) fn contains_c(&self, w: Complex64) -> bool {
        pseudo_distance_sqr_c(self.center.0, w) < self.rho * self.rho
    }

    pub fn contains(&self, w: PointD) -> bool {
        self.contains_c(w.0)
    }

    /// Image under the reflection across `g` (reflections are isometries).
    pub fn reflect(&self, g: &Geodesic) -> HyperbolicDisk {
        HyperbolicDisk { center: g.reflect(self.center), rho: self.rho }
    }
}

/// Hyperbolic measure `ρ²/(1 − ρ²)` of any disk of pseudo-hyperbolic radius `ρ`.
pub fn hyperbolic_disk_measure(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!("pseudo-hyperbolic radius {rho} must lie in [0, 1)")));
    }
    let r2 = rho * rho;
    Ok(r2 / (1.0 - r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;

    fn p(re: f64, im: f64) -> PointD {
        PointD::new(re, im).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_points_outside() {
        assert!(matches!(PointD::new(1.0, 0.0), Err(Error::OutsideDisk { .. })));
        assert!(PointD::new(0.6, 0.8).is_err());
        assert!(PointD::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn pseudo_distance_examples() {
        let w = p(0.3, -0.4);
        assert!(close(pseudo_distance(PointD::ORIGIN, w), 0.5, 1e-15));
        assert_eq!(pseudo_distance(w, w), 0.0);
        assert!(close(pseudo_distance(p(0.5, 0.0), p(-0.5, 0.0)), 0.8, 1e-15));
    }

    #[test]
    fn hyperbolic_distance_examples() {
        assert_eq!(hyperbolic_distance(PointD::ORIGIN, PointD::ORIGIN), 0.0);
        let d = hyperbolic_distance(PointD::ORIGIN, p(0.5, 0.0));
        assert!(close(d, 3f64.ln(), 1e-14));
        let (z, w) = (p(0.1, 0.7), p(-0.2, -0.3));
        assert_eq!(hyperbolic_distance(z, w), hyperbolic_distance(w, z));
    }

    #[test]
    fn phi_examples() {
        let z = p(0.25, -0.6);
        let w = p(-0.4, 0.1);
        assert!(mobius_phi(z, z).norm() < 1e-16);
        assert!((mobius_phi(z, PointD::ORIGIN).z() - z.z()).norm() < 1e-16);
        assert!((mobius_phi(z, mobius_phi(z, w)).z() - w.z()).norm() < 1e-15);
        assert!(close(mobius_phi(z, w).norm(), pseudo_distance(z, w), 1e-15));
    }

    #[test]
    fn map_t_examples() {
        let t = MobiusT::new(0.5).unwrap();
        assert!(t.map(p(0.5, 0.0)).norm() < 1e-16);
        let image = t.map_extended(Complex64::new(0.8, 0.6));
        assert!((image - Complex64::i()).norm() < 1e-15, "{image}");
        let image = t.map_extended(Complex64::new(0.8, -0.6));
        assert!((image + Complex64::i()).norm() < 1e-15, "{image}");
        let z = p(0.3, 0.1);
        assert!((t.inverse(t.map(z)).z() - z.z()).norm() < 1e-15);
        assert!(MobiusT::new(1.0).is_err());
        assert!(MobiusT::new(0.0).is_err());
    }

    #[test]
    fn side_examples() {
        let g = Geodesic::arc(0.0, 0.5).unwrap();
        assert_eq!(g.side(PointD::ORIGIN), Side::Negative);
        assert_eq!(g.side(p(0.5, 0.0)), Side::On);
        assert_eq!(g.side(p(0.9, 0.0)), Side::Positive);
        let d = Geodesic::diameter(PI / 2.0).unwrap();
        assert_eq!(d.side(p(0.3, 0.0)), Side::Positive);
        assert_eq!(d.side(p(-0.3, 0.0)), Side::Negative);
    }

    #[test]
    fn reflect_examples() {
        let d = Geodesic::diameter(PI / 2.0).unwrap();
        let r = d.reflect(p(0.3, 0.2)).z();
        assert!((r - Complex64::new(-0.3, 0.2)).norm() < 1e-15);
        let g = Geodesic::arc(0.0, 0.5).unwrap();
        assert!((g.reflect(p(0.5, 0.0)).z() - 0.5).norm() < 1e-16);
        let z = p(0.1, -0.2);
        assert!((g.reflect(g.reflect(z)).z() - z.z()).norm() < 1e-15);
    }

    #[test]
    fn normalisation_rotates_by_pi() {
        let g1 = Geodesic::arc(0.3, 0.4).unwrap();
        let g2 = Geodesic::arc(0.3 + PI, 0.4).unwrap();
        assert!(close(g2.theta(), 0.3, 1e-15));
        assert!(close(g2.intercept(), -0.4, 0.0));
        // g2 is the point reflection of g1; both keep the origin on the negative side
        assert_eq!(g2.side(PointD::ORIGIN), Side::Negative);
        let z = p(0.2, 0.1);
        let gz = g1.reflect(z).z();
        let g2z = g2.reflect(p(-0.2, -0.1)).z();
        assert!((gz + g2z).norm() < 1e-14);
        let dd = Geodesic::diameter(1.5 * PI).unwrap();
        assert!(close(dd.theta(), 0.5 * PI, 1e-15));
    }

    #[test]
    fn arc_intercept_limits() {
        assert!(Geodesic::arc(0.0, 0.0).is_err());
        assert!(Geodesic::arc(0.0, 1.0).is_err());
        assert!(Geodesic::arc(0.0, 1e-10).is_err());
        assert!(Geodesic::arc(0.0, 1e-9).is_ok());
        assert!(Geodesic::from_circle_center(Complex64::new(0.5, 0.5)).is_err());
    }

    #[test]
    fn endpoints_on_unit_circle() {
        for &a in &[0.05, 0.5, 0.93] {
            let g = Geodesic::arc(0.7, a).unwrap();
            let (e1, e2) = g.endpoints();
            assert!(close(e1.norm(), 1.0, 1e-12));
            assert!(close(e2.norm(), 1.0, 1e-12));
            let (c, r) = g.circle().unwrap();
            assert!(close((e1 - c).norm(), r, 1e-12));
            assert!(close(c.norm_sqr() - r * r, 1.0, 1e-9));
        }
        let g = Geodesic::arc(0.0, 0.5).unwrap();
        let (a_pt, b_pt) = g.endpoints();
        assert!((a_pt - Complex64::new(0.8, 0.6)).norm() < 1e-15);
        assert!((b_pt - Complex64::new(0.8, -0.6)).norm() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let g = Geodesic::arc(0.0, 0.5).unwrap();
        let z = p(0.2, 0.0);
        let h = 1e-5;
        let f = |x: f64, y: f64| g.reflect_c(Complex64::new(x, y));
        let dx = (f(z.re() + h, z.im()) - f(z.re() - h, z.im())) / (2.0 * h);
        let dy = (f(z.re(), z.im() + h) - f(z.re(), z.im() - h)) / (2.0 * h);
        let det = (dx.re * dy.im - dx.im * dy.re).abs();
        assert!(close(g.reflection_jacobian(z), det, 1e-6), "{det}");
        let d = Geodesic::diameter(0.4).unwrap();
        assert!(close(d.reflection_jacobian(p(0.3, 0.5)), 1.0, 1e-14));
        assert!(close(g.reflection_jacobian(p(0.5, 0.0)), 1.0, 1e-14));
    }

    #[test]
    fn orthogonal_geodesic_through_point() {
        let g = Geodesic::arc(1.1, 0.3).unwrap();
        let (c, r) = g.circle().unwrap();
        // a point of 𝒢 inside the disk
        let (e1, e2) = g.endpoints();
        let mid = {
            // rotate off the symmetry axis, where the answer would be a diameter
            let m = (0.5 * (e1 + e2) - c) * Complex64::from_polar(1.0, 0.3);
            c + m / m.norm() * r
        };
        let mid = PointD::new(mid.re, mid.im).unwrap();
        let h = g.orthogonal_through(mid, 1e-9).unwrap();
        assert_eq!(h.side(mid), Side::On);
        let (c2, r2) = h.circle().expect("orthogonal geodesic here is an arc");
        // radii at the crossing are perpendicular
        let dot = ((mid.z() - c).conj() * (mid.z() - c2)).re;
        assert!(dot.abs() < 1e-10 * r * r2);
    }

    #[test]
    fn disk_euclidean_params() {
        let d = HyperbolicDisk::new(PointD::ORIGIN, 0.3).unwrap();
        let (c, r) = d.euclidean_params();
        assert_eq!(c, PointD::ORIGIN);
        assert!(close(r, 0.3, 1e-16));
        assert!(close(d.lebesgue_measure(), PI * 0.09, 1e-15));
        let d = HyperbolicDisk::new(p(0.5, 0.0), 0.1).unwrap();
        let (_, r) = d.euclidean_params();
        assert!(close(PI * r * r, d.lebesgue_measure(), 1e-12));
        // π (0.75)² (0.01) / (1 − 0.0025)²
        assert!(close(d.lebesgue_measure(), 0.017_760_148_4, 1e-9), "{}", d.lebesgue_measure());
    }

    #[test]
    fn disk_area_by_monte_carlo_membership() {
        use rand::{Rng, SeedableRng};
        let d = HyperbolicDisk::new(p(0.5, 0.0), 0.1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        // bounding box [0.4, 0.6] × [−0.1, 0.1]
        let n = 400_000;
        let hits = (0..n)
            .filter(|_| {
                let w = Complex64::new(rng.gen_range(0.4..0.6), rng.gen_range(-0.1..0.1));
                d.contains_c(w)
            })
            .count();
        let est = 0.04 * hits as f64 / n as f64;
        assert!((est - d.lebesgue_measure()).abs() < 2e-4, "{est}");
    }

    #[test]
    fn disk_measure_values() {
        assert_eq!(hyperbolic_disk_measure(0.0).unwrap(), 0.0);
        assert!(hyperbolic_disk_measure(1e-8).unwrap() < 1e-15);
        assert!(close(hyperbolic_disk_measure(0.5).unwrap(), 1.0 / 3.0, 1e-16));
        assert!(hyperbolic_disk_measure(1.0).is_err());
        // radial quadrature of dτ = 2r dr/(1 − r²)²
        let q = quadrature::integrate(|r| 2.0 * r / (1.0 - r * r).powi(2), 0.0, 0.5).unwrap();
        assert!(close(q.value, 1.0 / 3.0, 1e-10));
    }

    #[test]
    fn disk_measure_is_centre_independent() {
        // 2D quadrature of dA/(π(1 − |w|²)²) in polar coordinates about the Euclidean centre
        let tau = |d: HyperbolicDisk| {
            let (c, r) = d.euclidean_params();
            let c = c.z();
            quadrature::integrate(
                |t| {
                    let e = Complex64::from_polar(1.0, t);
                    quadrature::integrate(
                        |s| {
                            let w = c + e * s;
                            s / (PI * (1.0 - w.norm_sqr()).powi(2))
                        },
                        0.0,
                        r,
                    )
                    .unwrap()
                    .value
                },
                0.0,
                2.0 * PI,
            )
            .unwrap()
            .value
        };
        let a = tau(HyperbolicDisk::new(PointD::ORIGIN, 0.5).unwrap());
        let b = tau(HyperbolicDisk::new(p(0.3, 0.0), 0.5).unwrap());
        assert!(close(a, b, 1e-10), "{a} {b}");
        assert!(close(a, 1.0 / 3.0, 1e-10));
    }
}
