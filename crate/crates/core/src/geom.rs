//! Exact rational geometry on the affine slice of the positive cone.
//!
//! Rank-3 chambers are carved as convex polygons in the plane of classes with
//! fixed polarization pairing; rank-2 chambers are intervals on a line. All
//! coordinates are exact rationals.

use crate::matrix::Rat;
use num::{Signed, Zero};

pub type Pt2 = [Rat; 2];

/// Affine functional c0 + c1*y + c2*z on the slice plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine2 {
    pub c0: Rat,
    pub c1: Rat,
    pub c2: Rat,
}

impl Affine2 {
    pub fn eval(&self, p: &Pt2) -> Rat {
        &self.c0 + &self.c1 * &p[0] + &self.c2 * &p[1]
    }
}

/// Convex polygon, vertices in counter-clockwise order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    pub vertices: Vec<Pt2>,
}

impl Polygon {
    /// Axis-aligned square [-h, h]^2.
    pub fn square(h: Rat) -> Polygon {
        let neg = -h.clone();
        Polygon {
            vertices: vec![
                [neg.clone(), neg.clone()],
                [h.clone(), neg],
                [h.clone(), h.clone()],
                [-h.clone(), h],
            ],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3 || self.double_area().is_zero()
    }

    /// Twice the signed area (shoelace).
    pub fn double_area(&self) -> Rat {
        let n = self.vertices.len();
        let mut acc = Rat::zero();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            acc += &a[0] * &b[1] - &b[0] * &a[1];
        }
        acc
    }

    /// Clip to the halfplane {f >= 0} (Sutherland-Hodgman, convex input).
    pub fn clip(&self, f: &Affine2) -> Polygon {
        let n = self.vertices.len();
        let mut out: Vec<Pt2> = Vec::new();
        for i in 0..n {
            let cur = &self.vertices[i];
            let nxt = &self.vertices[(i + 1) % n];
            let fc = f.eval(cur);
            let fnx = f.eval(nxt);
            if !fc.is_negative() {
                out.push(cur.clone());
            }
            if (fc.is_positive() && fnx.is_negative()) || (fc.is_negative() && fnx.is_positive()) {
                // fc + t (fnx - fc) = 0
                let t = &fc / (&fc - &fnx);
                let y = &cur[0] + &t * (&nxt[0] - &cur[0]);
                let z = &cur[1] + &t * (&nxt[1] - &cur[1]);
                out.push([y, z]);
            }
        }
        // drop consecutive duplicates (vertices exactly on the cut line)
        let mut dedup: Vec<Pt2> = Vec::new();
        for p in out {
            if dedup.last() != Some(&p) {
                dedup.push(p);
            }
        }
        if dedup.len() > 1 && dedup.first() == dedup.last() {
            dedup.pop();
        }
        Polygon { vertices: dedup }
    }

    /// Some vertices strictly positive and some strictly negative.
    pub fn strictly_crosses(&self, f: &Affine2) -> bool {
        let mut pos = false;
        let mut neg = false;
        for v in &self.vertices {
            let x = f.eval(v);
            pos |= x.is_positive();
            neg |= x.is_negative();
        }
        pos && neg
    }

    /// The edge of the polygon lying on {f = 0}, if one exists.
    pub fn edge_on_line(&self, f: &Affine2) -> Option<(Pt2, Pt2)> {
        let n = self.vertices.len();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            if a != b && f.eval(a).is_zero() && f.eval(b).is_zero() {
                return Some((a.clone(), b.clone()));
            }
        }
        None
    }

    pub fn contains_strictly(&self, p: &Pt2) -> bool {
        let n = self.vertices.len();
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            // cross((b - a), (p - a)) > 0 required for CCW interior
            let cross = (&b[0] - &a[0]) * (&p[1] - &a[1]) - (&b[1] - &a[1]) * (&p[0] - &a[0]);
            if !cross.is_positive() {
                return false;
            }
        }
        n >= 3
    }

    /// Ensure counter-clockwise orientation.
    pub fn oriented_ccw(mut self) -> Polygon {
        if self.double_area().is_negative() {
            self.vertices.reverse();
        }
        self
    }

    pub fn centroid(&self) -> Pt2 {
        let n = Rat::from(crate::matrix::Int::from(self.vertices.len() as i64));
        let mut y = Rat::zero();
        let mut z = Rat::zero();
        for v in &self.vertices {
            y += &v[0];
            z += &v[1];
        }
        [y / n.clone(), z / n]
    }
}

/// Closed interval on the slice line (rank-2 chambers).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

/// Affine functional c0 + c1*y on the slice line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine1 {
    pub c0: Rat,
    pub c1: Rat,
}

impl Affine1 {
    pub fn eval(&self, y: &Rat) -> Rat {
        &self.c0 + &self.c1 * y
    }

    pub fn root(&self) -> Option<Rat> {
        if self.c1.is_zero() {
            None
        } else {
            Some(-&self.c0 / &self.c1)
        }
    }
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn clip(&self, f: &Affine1) -> Interval {
        let flo = f.eval(&self.lo);
        let fhi = f.eval(&self.hi);
        if !flo.is_negative() && !fhi.is_negative() {
            return self.clone();
        }
        if flo.is_negative() && fhi.is_negative() {
            return Interval {
                lo: self.hi.clone(),
                hi: self.lo.clone(),
            }; // empty
        }
        let r = f.root().expect("sign change implies nonconstant");
        if flo.is_negative() {
            Interval {
                lo: r,
                hi: self.hi.clone(),
            }
        } else {
            Interval {
                lo: self.lo.clone(),
                hi: r,
            }
        }
    }

    pub fn strictly_crosses(&self, f: &Affine1) -> bool {
        let flo = f.eval(&self.lo);
        let fhi = f.eval(&self.hi);
        (flo.is_positive() && fhi.is_negative()) || (flo.is_negative() && fhi.is_positive())
    }

    pub fn endpoint_on(&self, f: &Affine1) -> Option<Rat> {
        if f.eval(&self.lo).is_zero() {
            return Some(self.lo.clone());
        }
        if f.eval(&self.hi).is_zero() {
            return Some(self.hi.clone());
        }
        None
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / Rat::from(crate::matrix::Int::from(2))
    }

    pub fn contains_strictly(&self, y: &Rat) -> bool {
        *y > self.lo && *y < self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Int;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    #[test]
    fn clip_square_to_triangle() {
        let sq = Polygon::square(rat(1, 1));
        // keep y + z >= 0
        let f = Affine2 {
            c0: rat(0, 1),
            c1: rat(1, 1),
            c2: rat(1, 1),
        };
        let clipped = sq.clip(&f);
        assert!(!clipped.is_empty());
        // the line passes through two opposite corners: half the square
        assert_eq!(clipped.double_area(), rat(4, 1));
        assert!(clipped.strictly_crosses(&Affine2 {
            c0: rat(0, 1),
            c1: rat(1, 1),
            c2: rat(0, 1)
        }));
        // the cut line now supports an edge
        assert!(clipped.edge_on_line(&f).is_some());
    }

    #[test]
    fn clip_to_empty() {
        let sq = Polygon::square(rat(1, 1));
        let f = Affine2 {
            c0: rat(-2, 1),
            c1: rat(1, 1),
            c2: rat(0, 1),
        };
        assert!(sq.clip(&f).is_empty());
    }

    #[test]
    fn contains_and_centroid() {
        let sq = Polygon::square(rat(1, 1));
        assert!(sq.contains_strictly(&[rat(0, 1), rat(0, 1)]));
        assert!(!sq.contains_strictly(&[rat(1, 1), rat(0, 1)]));
        assert_eq!(sq.centroid(), [rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn interval_ops() {
        let iv = Interval {
            lo: rat(-1, 1),
            hi: rat(1, 1),
        };
        let f = Affine1 {
            c0: rat(1, 2),
            c1: rat(1, 1),
        }; // zero at -1/2
        let c = iv.clip(&f);
        assert_eq!(c.lo, rat(-1, 2));
        assert_eq!(c.hi, rat(1, 1));
        assert!(iv.strictly_crosses(&f));
        assert!(!c.strictly_crosses(&f));
        assert_eq!(c.endpoint_on(&f), Some(rat(-1, 2)));
    }
}
