//! Small fixed-dimension geometry kit: 3-vectors, axis-angle rotations,
//! capsules and segment/box distance queries. Everything here works in the
//! 3D workspace; configuration-space math lives in the parent module.

use serde::{Deserialize, Serialize};

/// Workspace point / vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert!(v.len() == 3, "expected 3 components, got {}", v.len());
        Vec3::new(v[0], v[1], v[2])
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize a zero vector");
        self * (1.0 / n)
    }

    pub fn min(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn max(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Rigid transform: rotation matrix (row-major) plus translation.
#[derive(Debug, Clone, Copy)]
pub struct Isometry {
    pub rot: [[f64; 3]; 3],
    pub trans: Vec3,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            rot: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            trans: Vec3::ZERO,
        }
    }

    /// Rotation of `angle` radians about the (unit) `axis`, Rodrigues form.
    pub fn rotation(axis: Vec3, angle: f64) -> Self {
        let a = axis.normalized();
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let (x, y, z) = (a.x, a.y, a.z);
        Isometry {
            rot: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
            trans: Vec3::ZERO,
        }
    }

    pub fn translation(t: Vec3) -> Self {
        Isometry { rot: Isometry::identity().rot, trans: t }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        let r = &self.rot;
        Vec3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z + self.trans.x,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z + self.trans.y,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z + self.trans.z,
        )
    }

    /// self ∘ other (apply `other` first, then `self`).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = &self.rot;
        let b = &other.rot;
        let mut rot = [[0.0; 3]; 3];
        for (i, row) in rot.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        Isometry { rot, trans: self.apply(other.trans) }
    }
}

/// Capsule: segment from `a` to `b` inflated by `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capsule {
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
}

impl Capsule {
    pub fn transformed(&self, iso: &Isometry) -> Capsule {
        Capsule { a: iso.apply(self.a), b: iso.apply(self.b), radius: self.radius }
    }
}

/// Distance from a point to an axis-aligned box given by center and half extents.
/// Zero when the point is inside or on the boundary.
pub fn point_box_distance(p: Vec3, center: Vec3, half: Vec3) -> f64 {
    let d = Vec3::new(
        ((p.x - center.x).abs() - half.x).max(0.0),
        ((p.y - center.y).abs() - half.y).max(0.0),
        ((p.z - center.z).abs() - half.z).max(0.0),
    );
    d.norm()
}

/// True iff the point lies inside the box or on its boundary.
pub fn point_in_box(p: Vec3, center: Vec3, half: Vec3) -> bool {
    (p.x - center.x).abs() <= half.x
        && (p.y - center.y).abs() <= half.y
        && (p.z - center.z).abs() <= half.z
}

/// Exact segment vs. axis-aligned box intersection (slab clipping).
/// Boundary contact counts as intersection.
pub fn segment_intersects_box(a: Vec3, b: Vec3, center: Vec3, half: Vec3) -> bool {
    let d = b - a;
    let mut t_min = 0.0_f64;
    let mut t_max = 1.0_f64;
    let a_rel = a - center;
    for (delta, origin, h) in [(d.x, a_rel.x, half.x), (d.y, a_rel.y, half.y), (d.z, a_rel.z, half.z)] {
        if delta.abs() < f64::EPSILON {
            if origin.abs() > h {
                return false;
            }
        } else {
            let inv = 1.0 / delta;
            let mut t0 = (-h - origin) * inv;
            let mut t1 = (h - origin) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return false;
            }
        }
    }
    true
}

/// Minimum distance between a segment and an axis-aligned box.
///
/// The per-point distance to the box is convex along the segment, so a
/// ternary search converges to the global minimum.
pub fn segment_box_distance(a: Vec3, b: Vec3, center: Vec3, half: Vec3) -> f64 {
    let f = |t: f64| point_box_distance(a + (b - a) * t, center, half);
    let (mut l, mut r) = (0.0_f64, 1.0_f64);
    for _ in 0..64 {
        let m1 = l + (r - l) / 3.0;
        let m2 = r - (r - l) / 3.0;
        if f(m1) <= f(m2) {
            r = m2;
        } else {
            l = m1;
        }
    }
    f(0.5 * (l + r)).min(f(0.0)).min(f(1.0))
}

/// True iff the capsule touches or penetrates the box.
pub fn capsule_intersects_box(c: &Capsule, center: Vec3, half: Vec3) -> bool {
    // Prefilter on the capsule's bounding box inflated by its radius.
    let lo = c.a.min(c.b);
    let hi = c.a.max(c.b);
    if lo.x - c.radius > center.x + half.x
        || lo.y - c.radius > center.y + half.y
        || lo.z - c.radius > center.z + half.z
        || hi.x + c.radius < center.x - half.x
        || hi.y + c.radius < center.y - half.y
        || hi.z + c.radius < center.z - half.z
    {
        return false;
    }
    segment_box_distance(c.a, c.b, center, half) <= c.radius
}
