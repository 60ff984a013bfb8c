use super::GeometryError;

pub type Point3 = [f64; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub vertices: [Point3; 3],
    /// Facet normal as stored in the source file, if any.
    pub normal: Option<Point3>,
}

impl Triangle {
    pub fn new(v0: Point3, v1: Point3, v2: Point3) -> Self {
        Self {
            vertices: [v0, v1, v2],
            normal: None,
        }
    }

    /// Unit normal from the winding order; zero for degenerate triangles.
    pub fn geometric_normal(&self) -> Point3 {
        let [a, b, c] = self.vertices;
        let u = sub(b, a);
        let v = sub(c, a);
        let n = cross(u, v);
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len > 0.0 {
            [n[0] / len, n[1] / len, n[2] / len]
        } else {
            [0.0; 3]
        }
    }

    pub fn flipped(&self) -> Self {
        let [a, b, c] = self.vertices;
        Self {
            vertices: [a, c, b],
            normal: self.normal.map(|n| [-n[0], -n[1], -n[2]]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn extent(&self) -> Point3 {
        sub(self.max, self.min)
    }

    /// True when `other` lies inside `self` with a gap on every side.
    pub fn strictly_contains(&self, other: &Aabb, tol: f64) -> bool {
        (0..3).all(|a| other.min[a] > self.min[a] + tol && other.max[a] < self.max[a] - tol)
    }
}

/// Triangle soup in millimetres.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub triangles: Vec<Triangle>,
}

impl TriMesh {
    pub fn new(triangles: Vec<Triangle>) -> Result<Self, GeometryError> {
        let mesh = Self { triangles };
        mesh.check_finite()?;
        Ok(mesh)
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub(crate) fn check_finite(&self) -> Result<(), GeometryError> {
        for (i, t) in self.triangles.iter().enumerate() {
            if t.vertices.iter().flatten().any(|c| !c.is_finite()) {
                return Err(GeometryError::NonFiniteVertex { triangle: i });
            }
        }
        Ok(())
    }

    pub fn bbox(&self) -> Option<Aabb> {
        let mut it = self.triangles.iter().flat_map(|t| t.vertices.iter());
        let first = *it.next()?;
        let mut bb = Aabb {
            min: first,
            max: first,
        };
        for v in it {
            for a in 0..3 {
                bb.min[a] = bb.min[a].min(v[a]);
                bb.max[a] = bb.max[a].max(v[a]);
            }
        }
        Some(bb)
    }

    pub fn translated(&self, offset: Point3) -> Self {
        let triangles = self
            .triangles
            .iter()
            .map(|t| Triangle {
                vertices: t.vertices.map(|v| [v[0] + offset[0], v[1] + offset[1], v[2] + offset[2]]),
                normal: t.normal,
            })
            .collect();
        Self { triangles }
    }

    /// Enclosed volume from the divergence theorem. Only meaningful for closed,
    /// consistently oriented meshes.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices;
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }

    /// Axis-aligned box with outward-facing triangles.
    pub fn cuboid(min: Point3, max: Point3) -> Self {
        let mut triangles = Vec::with_capacity(12);
        push_box_faces(&mut triangles, min, max, [true; 6]);
        Self { triangles }
    }

    /// Closed triangulated sphere (latitude/longitude tessellation).
    pub fn uv_sphere(center: Point3, radius: f64, stacks: usize, slices: usize) -> Self {
        let stacks = stacks.max(2);
        let slices = slices.max(3);
        let point = |i: usize, j: usize| -> Point3 {
            if i == 0 {
                return [center[0], center[1], center[2] + radius];
            }
            if i == stacks {
                return [center[0], center[1], center[2] - radius];
            }
            let theta = std::f64::consts::PI * i as f64 / stacks as f64;
            let phi = std::f64::consts::TAU * (j % slices) as f64 / slices as f64;
            [
                center[0] + radius * theta.sin() * phi.cos(),
                center[1] + radius * theta.sin() * phi.sin(),
                center[2] + radius * theta.cos(),
            ]
        };
        let mut triangles = Vec::new();
        for i in 0..stacks {
            for j in 0..slices {
                let p00 = point(i, j);
                let p01 = point(i, j + 1);
                let p10 = point(i + 1, j);
                let p11 = point(i + 1, j + 1);
                if i != 0 {
                    triangles.push(Triangle::new(p00, p10, p01));
                }
                if i + 1 != stacks {
                    triangles.push(Triangle::new(p01, p10, p11));
                }
            }
        }
        Self { triangles }
    }
}

/// Faces in order -x, +x, -y, +y, -z, +z.
pub(crate) fn push_box_faces(out: &mut Vec<Triangle>, min: Point3, max: Point3, faces: [bool; 6]) {
    let [x0, y0, z0] = min;
    let [x1, y1, z1] = max;
    let quads: [[Point3; 4]; 6] = [
        [[x0, y0, z0], [x0, y0, z1], [x0, y1, z1], [x0, y1, z0]],
        [[x1, y0, z0], [x1, y1, z0], [x1, y1, z1], [x1, y0, z1]],
        [[x0, y0, z0], [x1, y0, z0], [x1, y0, z1], [x0, y0, z1]],
        [[x0, y1, z0], [x0, y1, z1], [x1, y1, z1], [x1, y1, z0]],
        [[x0, y0, z0], [x0, y1, z0], [x1, y1, z0], [x1, y0, z0]],
        [[x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1]],
    ];
    for (quad, keep) in quads.iter().zip(faces) {
        if keep {
            out.push(Triangle::new(quad[0], quad[1], quad[2]));
            out.push(Triangle::new(quad[0], quad[2], quad[3]));
        }
    }
}

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuboid_is_closed_and_outward() {
        let m = TriMesh::cuboid([0.0; 3], [2.0, 3.0, 4.0]);
        assert_eq!(m.len(), 12);
        assert!((m.signed_volume() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_volume_converges() {
        let m = TriMesh::uv_sphere([0.0; 3], 5.0, 64, 128);
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 125.0;
        assert!((m.signed_volume() - exact).abs() / exact < 0.01);
    }

    #[test]
    fn non_finite_rejected() {
        let t = Triangle::new([0.0, f64::NAN, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert!(matches!(
            TriMesh::new(vec![t]),
            Err(GeometryError::NonFiniteVertex { triangle: 0 })
        ));
    }
}
