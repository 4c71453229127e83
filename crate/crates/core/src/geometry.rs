//! Vector and projective primitives shared by every other module.

use nalgebra::{Vector2 as NVector2, Vector3 as NVector3};
use thiserror::Error;

/// A point or direction in 3-space.
pub type Vector3 = NVector3<f64>;

/// A planar vector in the chart of the central plane.
pub type Vector2 = NVector2<f64>;

/// Default relative tolerance for geometric predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("lines are coincident")]
    CoincidentLines,
    #[error("point is not on the line through the endpoints (residual {residual:e})")]
    NotCollinear { residual: f64 },
    #[error("an endpoint lies at infinity")]
    InfiniteEndpoint,
    #[error("endpoints coincide")]
    CoincidentEndpoints,
}

/// Determinant of the 3x3 matrix with rows `u`, `v`, `w`.
pub fn triple_product(u: &Vector3, v: &Vector3, w: &Vector3) -> f64 {
    u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x)
}

/// Sign of the 2x2 determinant `det(e1, e2)` with a relative dead zone.
pub fn orientation_sign(e1: &Vector2, e2: &Vector2, tol: f64) -> i8 {
    let d = e1.x * e2.y - e1.y * e2.x;
    let scale = e1.norm() * e2.norm();
    if d.abs() <= tol * scale {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

fn normalized(h: [f64; 3]) -> [f64; 3] {
    let n = (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt();
    if n == 0.0 || !n.is_finite() {
        return h;
    }
    [h[0] / n, h[1] / n, h[2] / n]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Homogeneous point `(h0, h1, h2)` of the central plane, unit norm.
/// `h2 == 0` marks a point at infinity in direction `(h0, h1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint2 {
    pub h: [f64; 3],
}

impl ProjectivePoint2 {
    pub fn new(h0: f64, h1: f64, h2: f64) -> Self {
        Self { h: normalized([h0, h1, h2]) }
    }

    pub fn from_affine(p: &Vector2) -> Self {
        Self::new(p.x, p.y, 1.0)
    }

    /// Points whose weight is tiny relative to their norm count as infinite.
    pub fn is_infinite(&self, tol: f64) -> bool {
        self.h[2].abs() <= tol * norm3(&self.h)
    }

    pub fn to_affine(&self) -> Option<Vector2> {
        if self.h[2] == 0.0 {
            None
        } else {
            Some(Vector2::new(self.h[0] / self.h[2], self.h[1] / self.h[2]))
        }
    }

    /// Direction of a point at infinity (or of the homogeneous vector).
    pub fn direction(&self) -> Vector2 {
        Vector2::new(self.h[0], self.h[1])
    }
}

/// Homogeneous line `l0 x + l1 y + l2 = 0`, unit norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2 {
    pub l: [f64; 3],
}

impl Line2 {
    pub fn new(l0: f64, l1: f64, l2: f64) -> Self {
        Self { l: normalized([l0, l1, l2]) }
    }

    pub fn through(p: &ProjectivePoint2, q: &ProjectivePoint2) -> Self {
        let c = cross3(&p.h, &q.h);
        Self { l: normalized(c) }
    }

    /// Normalized incidence residual `|<l, p>| / (|l| |p|)`.
    pub fn residual(&self, p: &ProjectivePoint2) -> f64 {
        dot3(&self.l, &p.h).abs() / (norm3(&self.l) * norm3(&p.h))
    }

    /// Whether this is a genuine affine line (not the line at infinity).
    pub fn is_affine(&self, tol: f64) -> bool {
        self.l[0].hypot(self.l[1]) > tol * norm3(&self.l)
    }
}

/// Intersection of two lines as a homogeneous point.
pub fn intersect_lines(l1: &Line2, l2: &Line2) -> Result<ProjectivePoint2, GeometryError> {
    let c = cross3(&l1.l, &l2.l);
    if norm3(&c) <= 1e-14 * norm3(&l1.l) * norm3(&l2.l) {
        return Err(GeometryError::CoincidentLines);
    }
    Ok(ProjectivePoint2 { h: normalized(c) })
}

/// `t` with `A = t B + (1 - t) C`, solved along the dominant coordinate of `B - C`.
pub fn affine_ratio(
    a: &ProjectivePoint2,
    b: &ProjectivePoint2,
    c: &ProjectivePoint2,
    tol: f64,
) -> Result<f64, GeometryError> {
    let (Some(bp), Some(cp)) = (b.to_affine(), c.to_affine()) else {
        return Err(GeometryError::InfiniteEndpoint);
    };
    if b.is_infinite(1e-14) || c.is_infinite(1e-14) {
        return Err(GeometryError::InfiniteEndpoint);
    }
    let Some(ap) = a.to_affine() else {
        return Err(GeometryError::NotCollinear { residual: f64::INFINITY });
    };
    let d = bp - cp;
    let scale = ap.abs().max().max(bp.abs().max()).max(cp.abs().max()).max(1e-300);
    if d.norm() <= tol * scale {
        return Err(GeometryError::CoincidentEndpoints);
    }
    let e = ap - cp;
    let residual = (d.x * e.y - d.y * e.x).abs() / d.norm();
    if residual > tol * scale {
        return Err(GeometryError::NotCollinear { residual });
    }
    Ok(if d.x.abs() >= d.y.abs() { e.x / d.x } else { e.y / d.y })
}

/// Orthonormal chart of a plane in 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrame {
    pub origin: Vector3,
    pub e1: Vector3,
    pub e2: Vector3,
    pub normal: Vector3,
}

impl PlaneFrame {
    /// Least-squares plane through `points`; the normal follows the polygon's
    /// winding (Newell normal), so the chart is positively oriented.
    pub fn best_fit(points: &[Vector3]) -> Option<Self> {
        let n = points.len();
        if n < 3 {
            return None;
        }
        let centroid = points.iter().fold(Vector3::zeros(), |s, p| s + p) / n as f64;
        let mut cov = nalgebra::Matrix3::<f64>::zeros();
        for p in points {
            let d = p - centroid;
            cov += d * d.transpose();
        }
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut k = 0;
        for j in 1..3 {
            if eig.eigenvalues[j] < eig.eigenvalues[k] {
                k = j;
            }
        }
        let mut normal: Vector3 = eig.eigenvectors.column(k).into_owned();
        let newell = newell_normal(points);
        if newell.dot(&normal) < 0.0 {
            normal = -normal;
        }
        let normal = normal.try_normalize(0.0)?;
        let seed = (points[1] - points[0]).try_normalize(0.0)?;
        let e1 = (seed - normal * seed.dot(&normal)).try_normalize(0.0)?;
        let e2 = normal.cross(&e1);
        Some(Self { origin: centroid, e1, e2, normal })
    }

    pub fn project(&self, p: &Vector3) -> Vector2 {
        let d = p - self.origin;
        Vector2::new(d.dot(&self.e1), d.dot(&self.e2))
    }

    pub fn lift(&self, q: &Vector2) -> Vector3 {
        self.origin + self.e1 * q.x + self.e2 * q.y
    }

    pub fn height(&self, p: &Vector3) -> f64 {
        (p - self.origin).dot(&self.normal)
    }
}

/// Newell's area-weighted normal of a closed polygon.
pub fn newell_normal(points: &[Vector3]) -> Vector3 {
    let n = points.len();
    let mut s = Vector3::zeros();
    for i in 0..n {
        s += points[i].cross(&points[(i + 1) % n]);
    }
    s
}

/// Angle between two vectors in `[0, pi]` via `atan2`, robust near 0 and pi.
pub fn angle_between(u: &Vector3, v: &Vector3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_product_examples() {
        let e = |x, y, z| Vector3::new(x, y, z);
        assert_eq!(triple_product(&e(1., 0., 0.), &e(0., 1., 0.), &e(0., 0., 1.)), 1.0);
        assert_eq!(triple_product(&e(1., 0., 0.), &e(0., 1., 0.), &e(1., 1., 0.)), 0.0);
        // cofactor expansion along the first row: 0*(0-1) - 1*(0-1) + 1*(1-0)
        assert_eq!(triple_product(&e(0., 1., 1.), &e(1., 0., 1.), &e(1., 1., 0.)), 2.0);
    }

    #[test]
    fn intersections() {
        let x_axis = Line2::new(0.0, 1.0, 0.0);
        let y_axis = Line2::new(1.0, 0.0, 0.0);
        let o = intersect_lines(&x_axis, &y_axis).unwrap().to_affine().unwrap();
        assert!(o.norm() < 1e-15);

        let y1 = Line2::new(0.0, 1.0, -1.0);
        let inf = intersect_lines(&x_axis, &y1).unwrap();
        assert!(inf.is_infinite(1e-15));
        let d = inf.direction();
        assert!(d.y.abs() < 1e-15 && d.x.abs() > 0.5);

        // y = x and y = -x + 2 meet at (1, 1)
        let l1 = Line2::new(1.0, -1.0, 0.0);
        let l2 = Line2::new(1.0, 1.0, -2.0);
        let p = intersect_lines(&l1, &l2).unwrap().to_affine().unwrap();
        assert!((p - Vector2::new(1.0, 1.0)).norm() < 1e-14);

        assert_eq!(intersect_lines(&l1, &Line2::new(-2.0, 2.0, 0.0)), Err(GeometryError::CoincidentLines));
    }

    #[test]
    fn ratios() {
        let p = |x, y| ProjectivePoint2::from_affine(&Vector2::new(x, y));
        let b = p(0.0, 0.0);
        let c = p(3.0, 0.0);
        assert!((affine_ratio(&p(1.5, 0.0), &b, &c, DEFAULT_TOL).unwrap() - 0.5).abs() < 1e-15);
        assert!((affine_ratio(&b, &b, &c, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-15);
        assert!((affine_ratio(&p(1.0, 0.0), &b, &c, DEFAULT_TOL).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            affine_ratio(&p(1.0, 1.0), &b, &c, DEFAULT_TOL),
            Err(GeometryError::NotCollinear { .. })
        ));
        let inf = ProjectivePoint2::new(1.0, 0.0, 0.0);
        assert_eq!(affine_ratio(&b, &inf, &c, DEFAULT_TOL), Err(GeometryError::InfiniteEndpoint));
    }

    #[test]
    fn orientation() {
        let v = Vector2::new;
        assert_eq!(orientation_sign(&v(1.0, 0.0), &v(0.0, 1.0), DEFAULT_TOL), 1);
        assert_eq!(orientation_sign(&v(1.0, 0.0), &v(2.0, 0.0), DEFAULT_TOL), 0);
        assert_eq!(orientation_sign(&v(0.0, 1.0), &v(1.0, 0.0), DEFAULT_TOL), -1);
    }

    #[test]
    fn best_fit_frame_follows_winding() {
        let pts = [
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(1.0, 0.0, 1.0),
            Vector3::new(1.0, 1.0, 1.0),
            Vector3::new(0.0, 1.0, 1.0),
        ];
        let f = PlaneFrame::best_fit(&pts).unwrap();
        assert!((f.normal - Vector3::z()).norm() < 1e-12);
        for p in &pts {
            assert!(f.height(p).abs() < 1e-12);
            assert!((f.lift(&f.project(p)) - p).norm() < 1e-12);
        }
    }
}
