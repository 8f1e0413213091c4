use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Range `r` (m), horizontal angle `theta` in [0, pi] and pitch `phi` in
/// [-pi/2, pi/2], with the base station at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spherical {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Spherical {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Spherical { r, theta, phi }
    }

    /// Spatial-domain direction `(Psi, Omega) = (cos phi cos theta, sin phi)`.
    pub fn spatial_direction(&self) -> (f64, f64) {
        (self.phi.cos() * self.theta.cos(), self.phi.sin())
    }
}

/// Cartesian to spherical.
///
/// `theta = |atan2(y, x)|`: points behind the array plane (y < 0) fold onto
/// their mirror image, which has the same range and the same spatial-domain
/// direction. On the z axis `theta` is 0.
pub fn cart_to_sph(p: &Vec3) -> Result<Spherical> {
    if !p.iter().all(|c| c.is_finite()) {
        return Err(Error::Domain(format!("non-finite point {p:?}")));
    }
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::Domain("point coincides with the base station".into()));
    }
    let horizontal = p.x.hypot(p.y);
    let phi = p.z.atan2(horizontal);
    let theta = if horizontal == 0.0 { 0.0 } else { p.y.atan2(p.x).abs() };
    Ok(Spherical { r, theta, phi })
}

pub fn sph_to_cart(s: &Spherical) -> Vec3 {
    let (sin_phi, cos_phi) = s.phi.sin_cos();
    let (sin_theta, cos_theta) = s.theta.sin_cos();
    Vec3::new(s.r * cos_phi * cos_theta, s.r * cos_phi * sin_theta, s.r * sin_phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

    fn close(a: Spherical, b: Spherical) -> bool {
        (a.r - b.r).abs() < 1e-12 * b.r && (a.theta - b.theta).abs() < 1e-12 && (a.phi - b.phi).abs() < 1e-12
    }

    #[test]
    fn on_axis_y() {
        let s = cart_to_sph(&Vec3::new(0.0, 100.0, 0.0)).unwrap();
        assert!(close(s, Spherical::new(100.0, FRAC_PI_2, 0.0)));
    }

    #[test]
    fn forward_inverse_construction() {
        let (c30, s30) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
        let (c60, s60) = (60f64.to_radians().cos(), 60f64.to_radians().sin());
        let p = Vec3::new(50.0 * c30 * c60, 50.0 * c30 * s60, 50.0 * s30);
        let s = cart_to_sph(&p).unwrap();
        assert!(close(s, Spherical::new(50.0, FRAC_PI_3, FRAC_PI_6)), "{s:?}");
    }

    #[test]
    fn pole_convention() {
        let s = cart_to_sph(&Vec3::new(0.0, 0.0, 50.0)).unwrap();
        assert_eq!(s, Spherical::new(50.0, 0.0, FRAC_PI_2));
        let s = cart_to_sph(&Vec3::new(-0.0, 0.0, -5.0)).unwrap();
        assert_eq!(s, Spherical::new(5.0, 0.0, -FRAC_PI_2));
    }

    #[test]
    fn origin_is_domain_error() {
        assert!(matches!(cart_to_sph(&Vec3::zeros()), Err(Error::Domain(_))));
        assert!(matches!(cart_to_sph(&Vec3::new(f64::NAN, 1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn behind_the_array_folds_to_mirror() {
        let front = cart_to_sph(&Vec3::new(3.0, 4.0, 1.0)).unwrap();
        let back = cart_to_sph(&Vec3::new(3.0, -4.0, 1.0)).unwrap();
        assert_eq!(front, back);
        assert_eq!(front.spatial_direction(), back.spatial_direction());
    }

    proptest::proptest! {
        #[test]
        fn round_trip_front_half_space(
            x in -1e3f64..1e3, y in 0.0f64..1e3, z in -1e3f64..1e3,
        ) {
            let p = Vec3::new(x, y, z);
            proptest::prop_assume!(p.norm() > 1e-6);
            let s = cart_to_sph(&p).unwrap();
            proptest::prop_assert!(s.r > 0.0);
            proptest::prop_assert!((0.0..=std::f64::consts::PI).contains(&s.theta));
            proptest::prop_assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&s.phi));
            let back = sph_to_cart(&s);
            proptest::prop_assert!((back - p).norm() <= 1e-9 * s.r);
        }

        #[test]
        fn sph_cart_sph_identity(
            r in 1e-3f64..2e3, theta in 0.0f64..std::f64::consts::PI, phi in -1.5f64..1.5,
        ) {
            let s = Spherical::new(r, theta, phi);
            let back = cart_to_sph(&sph_to_cart(&s)).unwrap();
            proptest::prop_assert!((back.r - r).abs() <= 1e-9 * r);
            proptest::prop_assert!((back.theta - theta).abs() <= 1e-9);
            proptest::prop_assert!((back.phi - phi).abs() <= 1e-9);
        }
    }
}
