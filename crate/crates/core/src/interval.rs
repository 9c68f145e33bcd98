//! Real intervals, the exterior Joukowski map and interval Green functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    LeftOfInterval,
    RightOfInterval,
    Inside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorPoint {
    pub x: f64,
    pub relation: Relation,
}

/// ψ(x) stored as `sign * (1 + excess)` so that points close to an endpoint
/// keep full relative accuracy in `ψ ∓ 1`.
#[derive(Debug, Clone, Copy)]
struct Psi {
    sign: f64,
    excess: f64,
}

impl Psi {
    fn value(self) -> f64 {
        self.sign * (1.0 + self.excess)
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::invalid(format!("interval endpoints must be finite, got [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::invalid(format!("interval needs a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b })
    }

    /// The reference interval [-1, 1].
    pub fn unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Affine image of `x` in the [-1, 1] frame.
    pub fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn from_unit(&self, s: f64) -> f64 {
        self.mid() + self.half_width() * s
    }

    /// Point `mid - half_width * cos(theta)`, which runs from a to b as theta
    /// goes from 0 to π.
    pub fn from_angle(&self, theta: f64) -> f64 {
        if theta <= 0.0 {
            return self.a;
        }
        if theta >= std::f64::consts::PI {
            return self.b;
        }
        // written via sin² of the half angles to stay accurate near both ends
        let s = (0.5 * theta).sin();
        let c = (0.5 * theta).cos();
        if theta < std::f64::consts::FRAC_PI_2 {
            self.a + self.width() * s * s
        } else {
            self.b - self.width() * c * c
        }
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.a && x < self.b
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }

    pub fn classify(&self, x: f64) -> ExteriorPoint {
        let relation = if x <= self.a {
            Relation::LeftOfInterval
        } else if x >= self.b {
            Relation::RightOfInterval
        } else {
            Relation::Inside
        };
        ExteriorPoint { x, relation }
    }

    fn psi(&self, x: f64) -> Result<Psi> {
        // u is the distance to the nearest endpoint in units of the half width
        let (sign, u) = match self.classify(x).relation {
            Relation::LeftOfInterval => (-1.0, 2.0 * (self.a - x) / self.width()),
            Relation::RightOfInterval => (1.0, 2.0 * (x - self.b) / self.width()),
            Relation::Inside => {
                return Err(Error::domain(format!("{x} lies inside ({}, {})", self.a, self.b)));
            }
        };
        let excess = if u.is_infinite() { f64::INFINITY } else { u + (u * (u + 2.0)).sqrt() };
        Ok(Psi { sign, excess })
    }

    /// Inverse Joukowski map ψ(x) = z + sign(z)√(z²−1) for x outside (a, b).
    pub fn joukowski_exterior_map(&self, x: f64) -> Result<f64> {
        Ok(self.psi(x)?.value())
    }

    /// Green function with pole at infinity, log|ψ(x)|.
    pub fn green_infinity(&self, x: f64) -> Result<f64> {
        Ok(self.psi(x)?.excess.ln_1p())
    }

    /// Green function with finite pole y, log|(ψ(x)ψ(y) − 1)/(ψ(x) − ψ(y))|.
    /// An infinite `y` gives the Green function with pole at infinity.
    pub fn green_pole(&self, x: f64, y: f64) -> Result<f64> {
        if y.is_infinite() {
            return self.green_infinity(x);
        }
        if x.is_infinite() {
            return self.green_infinity(y);
        }
        let px = self.psi(x)?;
        let py = self.psi(y)?;
        let scale = 1f64.max(x.abs()).max(y.abs());
        if (x - y).abs() <= 4.0 * f64::EPSILON * scale {
            return Err(Error::Singularity(format!("Green function pole: x = {x} coincides with y = {y}")));
        }
        let (ex, ey) = (px.excess, py.excess);
        if px.sign != py.sign {
            // numerator minus denominator is exactly ex·ey
            return Ok((ex * ey / (2.0 + ex + ey)).ln_1p());
        }
        let (num, den) = (ex + ey + ex * ey, (ex - ey).abs());
        if den == 0.0 {
            return Err(Error::Singularity(format!("Green function pole: ψ({x}) = ψ({y})")));
        }
        Ok((num / den).ln())
    }

    /// Density of the arcsine (Robin) measure of the interval.
    pub fn robin_density(&self, t: f64) -> Result<f64> {
        if !self.contains_open(t) {
            return Err(Error::domain(format!("{t} is not inside ({}, {})", self.a, self.b)));
        }
        Ok(1.0 / (std::f64::consts::PI * ((t - self.a) * (self.b - t)).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn joukowski_examples() {
        let u = Interval::unit();
        assert_eq!(u.joukowski_exterior_map(1.0).unwrap(), 1.0);
        assert_eq!(u.joukowski_exterior_map(-1.0).unwrap(), -1.0);
        let p = u.joukowski_exterior_map(2.0).unwrap();
        assert!(close(p, 2.0 + 3f64.sqrt(), 1e-15));
        assert!(close(p + 1.0 / p, 4.0, 1e-14));
        let i = Interval::new(1.0, 4.0).unwrap();
        assert!(close(i.joukowski_exterior_map(0.0).unwrap(), -3.0, 1e-15));
        assert!(matches!(u.joukowski_exterior_map(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn green_infinity_examples() {
        let i = Interval::new(1.0, 4.0).unwrap();
        let g = i.green_infinity(0.0).unwrap();
        let r: f64 = 2.0; // sqrt(b/a)
        let alt = -((r - 1.0) / (r + 1.0)).ln();
        assert!(close(g, 3f64.ln(), 1e-15));
        assert!(close(g, alt, 1e-14));
        let u = Interval::unit();
        assert_eq!(u.green_infinity(1.0).unwrap(), 0.0);
        assert_eq!(u.green_infinity(-1.0).unwrap(), 0.0);
        assert!(close(u.green_infinity(2.0).unwrap(), (2.0 + 3f64.sqrt()).ln(), 1e-15));
        assert!(close(u.green_infinity(2.0).unwrap(), 1.316_957_896_924_816_6, 1e-15));
    }

    #[test]
    fn green_pole_examples() {
        let u = Interval::unit();
        assert!(close(u.green_pole(2.0, -2.0).unwrap(), 2f64.ln(), 1e-15));
        assert!(matches!(u.green_pole(1.5, 1.5), Err(Error::Singularity(_))));
        let near = u.green_pole(1.5, 1.5 + 1e-10).unwrap();
        let nearer = u.green_pole(1.5, 1.5 + 1e-13).unwrap();
        assert!(near > 20.0 && nearer > near);
        assert!(matches!(u.green_pole(0.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn green_pole_tends_to_green_infinity() {
        let i = Interval::new(0.5, 3.0).unwrap();
        for x in [-2.0, 0.0, 0.4, 3.5, 10.0] {
            let lim = i.green_infinity(x).unwrap();
            let e3 = (i.green_pole(x, 1e3).unwrap() - lim).abs();
            let e6 = (i.green_pole(x, 1e6).unwrap() - lim).abs();
            // O(1/y): a thousandfold increase in y shrinks the gap about a thousandfold
            assert!(e6 < 2e-3 * e3 + 1e-14, "x={x}: {e3} {e6}");
            assert!(e3 < 50.0 / 1e3);
            assert_eq!(i.green_pole(x, f64::INFINITY).unwrap(), lim);
        }
    }

    #[test]
    fn robin_density_examples() {
        let u = Interval::unit();
        assert!(close(u.robin_density(0.0).unwrap(), 1.0 / std::f64::consts::PI, 1e-16));
        let h = Interval::new(0.0, 1.0).unwrap();
        assert!(close(h.robin_density(0.5).unwrap(), 2.0 / std::f64::consts::PI, 1e-15));
        assert!(h.robin_density(0.0).is_err());
        assert!(h.robin_density(1.2).is_err());
        for (a, b) in [(0.0, 1.0), (-0.3, 2.0), (1.0, 4.0)] {
            let i = Interval::new(a, b).unwrap();
            // in t the last cells hit the endpoints at machine resolution, which
            // caps the attainable accuracy near 1e-8
            let direct = integrate(|t| i.robin_density(t).unwrap_or(0.0), a, b, QuadOptions::abs(1e-12)).unwrap();
            assert!((direct.value - 1.0).abs() < 1e-7, "{}", direct.value);
            let jac = |th: f64| 0.5 * i.width() * th.sin();
            let angular = integrate(
                |th: f64| i.robin_density(i.from_angle(th)).unwrap_or(0.0) * jac(th),
                0.0,
                std::f64::consts::PI,
                QuadOptions::abs(1e-12),
            )
            .unwrap();
            assert!((angular.value - 1.0).abs() < 1e-10, "{}", angular.value);
        }
    }

    #[test]
    fn invalid_intervals() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn angle_map_hits_endpoints() {
        let i = Interval::new(0.25, 1.0).unwrap();
        assert_eq!(i.from_angle(0.0), 0.25);
        assert_eq!(i.from_angle(std::f64::consts::PI), 1.0);
        assert!(close(i.from_angle(std::f64::consts::FRAC_PI_2), i.mid(), 1e-15));
        assert!(close(i.from_angle(1.0), i.mid() - i.half_width() * 1f64.cos(), 1e-15));
    }

    fn exterior(a: f64, w: f64, side: bool, d: f64) -> f64 {
        if side {
            a + w + d
        } else {
            a - d
        }
    }

    proptest! {
        #[test]
        fn psi_identity(a in -5.0..5.0f64, w in 0.01..10.0f64, side: bool, d in 0.0..50.0f64) {
            let i = Interval::new(a, a + w).unwrap();
            let x = exterior(a, w, side, d);
            let p = i.joukowski_exterior_map(x).unwrap();
            let z = i.to_unit(x);
            prop_assert!(p.abs() >= 1.0);
            prop_assert_eq!(p.signum(), if side { 1.0 } else { -1.0 });
            prop_assert!((p + 1.0 / p - 2.0 * z).abs() <= 1e-13 * z.abs().max(1.0));
        }

        #[test]
        fn green_pole_symmetric(a in -5.0..5.0f64, w in 0.01..10.0f64,
                                s1: bool, d1 in 0.0..20.0f64, s2: bool, d2 in 0.0..20.0f64) {
            let i = Interval::new(a, a + w).unwrap();
            let x = exterior(a, w, s1, d1);
            let y = exterior(a, w, s2, d2);
            prop_assume!((x - y).abs() > 1e-6);
            let gxy = i.green_pole(x, y).unwrap();
            let gyx = i.green_pole(y, x).unwrap();
            prop_assert!(gxy >= 0.0);
            prop_assert!((gxy - gyx).abs() <= 1e-14 * gxy.max(1.0));
        }

        #[test]
        fn green_infinity_monotone(a in -5.0..5.0f64, w in 0.01..10.0f64, side: bool,
                                   d in 0.0..20.0f64, step in 1e-6..5.0f64) {
            let i = Interval::new(a, a + w).unwrap();
            let g1 = i.green_infinity(exterior(a, w, side, d)).unwrap();
            let g2 = i.green_infinity(exterior(a, w, side, d + step)).unwrap();
            prop_assert!(g2 > g1);
        }

        #[test]
        fn green_infinity_at_zero_matches_condition_factor(a in 1e-6..10.0f64, ratio in 1.0001..1e6f64) {
            let b = a * ratio;
            let i = Interval::new(a, b).unwrap();
            let r = (b / a).sqrt();
            let expected = (r - 1.0) / (r + 1.0);
            let got = (-i.green_infinity(0.0).unwrap()).exp();
            prop_assert!((got - expected).abs() <= 1e-13 * expected.max(1e-300) + 1e-16);
        }
    }
}
