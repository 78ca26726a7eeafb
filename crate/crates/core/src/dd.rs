//! Double-double arithmetic for the few places where rounding of the
//! working precision would otherwise dominate.

use std::ops::{Add, Mul, Neg, Sub};

use crate::geometry::Point;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd(pub(crate) f64, pub(crate) f64);

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

impl Dd {
    #[inline]
    pub(crate) fn from(a: f64) -> Dd {
        Dd(a, 0.0)
    }

    #[inline]
    pub(crate) fn diff(a: f64, b: f64) -> Dd {
        two_sum(a, -b)
    }

    #[inline]
    pub(crate) fn value(self) -> f64 {
        self.0 + self.1
    }

    pub(crate) fn recip(self) -> Dd {
        let q = 1.0 / self.0;
        // One Newton step: q (2 − a q).
        let r = Dd::from(1.0) - self * Dd::from(q);
        Dd::from(q) + r * Dd::from(q)
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        let t = two_sum(self.1, o.1);
        let s = quick_two_sum(s.0, s.1 + t.0);
        quick_two_sum(s.0, s.1 + t.1)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        quick_two_sum(p, e + (self.0 * o.1 + self.1 * o.0))
    }
}

pub(crate) type V3 = [Dd; 3];

fn cross(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: &V3, b: &V3) -> Dd {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Scaled barycentric gradients `C_a = det · ∇λ_a` and `det`.
pub(crate) fn cofactors(coords: &[Point], dim: usize) -> ([V3; 4], Dd) {
    let z = Dd::default();
    let edge = |i: usize| -> V3 { [0, 1, 2].map(|c| Dd::diff(coords[i][c], coords[0][c])) };
    let mut c = [[z; 3]; 4];
    let det = if dim == 2 {
        let (e1, e2) = (edge(1), edge(2));
        c[1] = [e2[1], -e2[0], z];
        c[2] = [-e1[1], e1[0], z];
        e1[0] * e2[1] - e1[1] * e2[0]
    } else {
        let (e1, e2, e3) = (edge(1), edge(2), edge(3));
        c[1] = cross(&e2, &e3);
        c[2] = cross(&e3, &e1);
        c[3] = cross(&e1, &e2);
        dot(&e1, &c[1])
    };
    for k in 0..3 {
        let mut s = z;
        for a in 1..=dim {
            s = s + c[a][k];
        }
        c[0][k] = -s;
    }
    (c, det)
}

/// Signed measure: `det · t / 2` for triangles, `det / 6` for tetrahedra.
pub(crate) fn signed_measure(coords: &[Point], dim: usize, thickness: f64) -> Dd {
    let (_, det) = cofactors(coords, dim);
    if dim == 2 {
        det * Dd::from(0.5 * thickness)
    } else {
        det * Dd::from(6.0).recip()
    }
}
