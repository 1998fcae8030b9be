//! Convex domains, exact Euclidean projection and outward normals.
//!
//! Every integrator in the crate confines its state by projecting the raw
//! Euler update back onto the domain. On a convex set the Euclidean
//! projection solves the one-step constrained decomposition exactly: the
//! projected point lies in the domain, the correction `raw - projected` is
//! zero for interior raw points, and otherwise points along an outward
//! normal at the projected boundary point. Exactness matters: the
//! domain-residence invariant is asserted bitwise across all runs, so
//! `project` guarantees that its output passes `violation(x) <= 0` under the
//! same floating-point evaluation (a final snap loop enforces this), which
//! also makes projection exactly idempotent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vecn::{dist, dot, norm, sub};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: domain has dimension {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("domain has empty interior")]
    EmptyInterior,
    #[error("polyhedron projection did not converge: residual {residual:.3e} after {sweeps} sweeps")]
    ProjectionDidNotConverge { residual: f64, sweeps: usize },
    #[error("point is not on the boundary (signed violation {violation:.3e})")]
    NotOnBoundary { violation: f64 },
    #[error("non-finite coordinate in input point")]
    NonFinitePoint,
}

/// A closed half-space `<normal, x> <= offset` with unit normal.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        let n = norm(&normal);
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::InvalidDomain(
                "half-space normal must be nonzero and finite".into(),
            ));
        }
        let normal = normal.iter().map(|v| v / n).collect();
        Ok(HalfSpace {
            normal,
            offset: offset / n,
        })
    }

    #[inline]
    fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }

    /// One exact projection pass; caller handles the snap loop.
    #[inline]
    fn project_once(&self, x: &mut [f64]) {
        let v = self.violation(x);
        if v > 0.0 {
            for (xi, ni) in x.iter_mut().zip(&self.normal) {
                *xi -= v * ni;
            }
        }
    }

    /// Projects and then forces `violation(x) <= 0` under exact float
    /// evaluation. Rounding can strand the image a few ulps outside and a
    /// plain re-projection may round to a no-op, so the correction factor
    /// doubles until the boundary is crossed.
    fn force_inside(&self, x: &mut [f64]) {
        let mut factor = 1.0;
        for _ in 0..128 {
            let v = self.violation(x);
            if v <= 0.0 {
                return;
            }
            for (xi, ni) in x.iter_mut().zip(&self.normal) {
                *xi -= factor * v * ni;
            }
            factor *= 2.0;
        }
    }
}

/// The shape of a convex domain.
///
/// Serialized form is a tagged object, e.g.
/// `{"kind":"box","lo":[0,0],"hi":[1,null]}` where `null` stands for an
/// unbounded side. See `docs/formats.md` in the repository root.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    Box {
        #[serde(with = "opt_neg_inf")]
        lo: Vec<f64>,
        #[serde(with = "opt_pos_inf")]
        hi: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Orthant {
        dimension: usize,
    },
    Polyhedron {
        faces: Vec<HalfSpace>,
    },
}

/// JSON cannot carry IEEE infinities; unbounded box sides round-trip as null.
macro_rules! opt_inf_mod {
    ($name:ident, $fill:expr) => {
        mod $name {
            use serde::{Deserialize, Deserializer, Serialize, Serializer};

            pub fn serialize<S: Serializer>(v: &[f64], ser: S) -> Result<S::Ok, S::Error> {
                let mapped: Vec<Option<f64>> = v
                    .iter()
                    .map(|&x| if x.is_finite() { Some(x) } else { None })
                    .collect();
                mapped.serialize(ser)
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<f64>, D::Error> {
                let raw: Vec<Option<f64>> = Vec::deserialize(de)?;
                Ok(raw.into_iter().map(|x| x.unwrap_or($fill)).collect())
            }
        }
    };
}
opt_inf_mod!(opt_neg_inf, f64::NEG_INFINITY);
opt_inf_mod!(opt_pos_inf, f64::INFINITY);

/// A closed convex set with non-empty interior.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvexDomain {
    kind: DomainKind,
    dimension: usize,
    /// Strictly interior point cached at construction; the projection snap
    /// fallback blends toward it when cyclic face cleanup stalls.
    #[serde(skip)]
    anchor: Option<Vec<f64>>,
}

/// One-step constrained decomposition of a raw point: the projected point
/// inside the domain plus the boundary push that was removed.
#[derive(Clone, Debug, PartialEq)]
pub struct ReflectionStep {
    /// `argmin_{y in D} |raw - y|`; always inside the domain.
    pub point: Vec<f64>,
    /// `raw - point`; zero exactly when the raw point was already inside,
    /// otherwise a vector along an outward normal at `point`.
    pub push: Vec<f64>,
    /// `|push|`; the local-time increment of this step.
    pub push_norm: f64,
}

const MAX_DYKSTRA_SWEEPS: usize = 10_000;
const DYKSTRA_TOL: f64 = 1e-12;

impl ConvexDomain {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        let dimension = normal.len();
        let hs = HalfSpace::new(normal, offset)?;
        Ok(ConvexDomain {
            kind: DomainKind::HalfSpace {
                normal: hs.normal,
                offset: hs.offset,
            },
            dimension,
            anchor: None,
        })
    }

    /// Axis-aligned box; entries of `lo`/`hi` may be -inf/+inf.
    pub fn aligned_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, GeometryError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(GeometryError::InvalidDomain(
                "box bounds must be non-empty and of equal length".into(),
            ));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l < h) {
                return Err(GeometryError::EmptyInterior);
            }
            if l.is_nan() || h.is_nan() || *l == f64::INFINITY || *h == f64::NEG_INFINITY {
                return Err(GeometryError::InvalidDomain("bad box bound".into()));
            }
        }
        let dimension = lo.len();
        Ok(ConvexDomain {
            kind: DomainKind::Box { lo, hi },
            dimension,
            anchor: None,
        })
    }

    /// 1-D interval convenience.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, GeometryError> {
        Self::aligned_box(vec![lo], vec![hi])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeometryError::InvalidDomain(
                "ball radius must be positive and finite".into(),
            ));
        }
        let dimension = center.len();
        Ok(ConvexDomain {
            kind: DomainKind::Ball { center, radius },
            dimension,
            anchor: None,
        })
    }

    pub fn orthant(dimension: usize) -> Result<Self, GeometryError> {
        if dimension == 0 {
            return Err(GeometryError::InvalidDomain("dimension 0".into()));
        }
        Ok(ConvexDomain {
            kind: DomainKind::Orthant { dimension },
            dimension,
            anchor: None,
        })
    }

    /// Intersection of half-spaces. Requires a strictly interior point to
    /// exist; this is checked numerically by cyclic projection onto
    /// margin-shrunk faces.
    pub fn polyhedron(faces: Vec<HalfSpace>) -> Result<Self, GeometryError> {
        if faces.is_empty() {
            return Err(GeometryError::InvalidDomain("no faces".into()));
        }
        let dimension = faces[0].normal.len();
        if faces.iter().any(|f| f.normal.len() != dimension) {
            return Err(GeometryError::InvalidDomain(
                "faces have mixed dimensions".into(),
            ));
        }
        let mut domain = ConvexDomain {
            kind: DomainKind::Polyhedron { faces },
            dimension,
            anchor: None,
        };
        let anchor = domain.find_interior_point()?;
        domain.anchor = Some(anchor);
        Ok(domain)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn from_json(json: &str) -> Result<Self, GeometryError> {
        let parsed: ConvexDomain = serde_json::from_str(json)
            .map_err(|e| GeometryError::InvalidDomain(format!("json: {e}")))?;
        parsed.validated()
    }

    /// Re-runs constructor validation after deserialization.
    pub fn validated(self) -> Result<Self, GeometryError> {
        match self.kind {
            DomainKind::HalfSpace { normal, offset } => Self::half_space(normal, offset),
            DomainKind::Box { lo, hi } => Self::aligned_box(lo, hi),
            DomainKind::Ball { center, radius } => Self::ball(center, radius),
            DomainKind::Orthant { dimension } => Self::orthant(dimension),
            DomainKind::Polyhedron { faces } => Self::polyhedron(faces),
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GeometryError> {
        if x.len() != self.dimension {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Signed constraint violation: `<= 0` inside, `> 0` outside. For boxes
    /// and polyhedra this is the worst face violation; for balls the radial
    /// excess. The projection postcondition is `violation(point) <= 0`
    /// under this exact evaluation.
    pub fn violation(&self, x: &[f64]) -> f64 {
        match &self.kind {
            DomainKind::HalfSpace { normal, offset } => dot(normal, x) - offset,
            DomainKind::Box { lo, hi } => {
                let mut worst = f64::NEG_INFINITY;
                for i in 0..x.len() {
                    worst = worst.max(lo[i] - x[i]).max(x[i] - hi[i]);
                }
                worst
            }
            DomainKind::Ball { center, radius } => dist(x, center) - radius,
            DomainKind::Orthant { .. } => {
                x.iter().fold(f64::NEG_INFINITY, |w, &xi| w.max(-xi))
            }
            DomainKind::Polyhedron { faces } => faces
                .iter()
                .fold(f64::NEG_INFINITY, |w, f| w.max(f.violation(x))),
        }
    }

    /// Membership up to `tol` (used for boundary classification only;
    /// membership of projected points is exact).
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool, GeometryError> {
        self.check_dim(x)?;
        Ok(self.violation(x) <= tol)
    }

    /// Exact Euclidean projection with local-time decomposition.
    pub fn project(&self, x: &[f64]) -> Result<ReflectionStep, GeometryError> {
        self.check_dim(x)?;
        if !crate::vecn::all_finite(x) {
            return Err(GeometryError::NonFinitePoint);
        }
        if self.violation(x) <= 0.0 {
            return Ok(ReflectionStep {
                point: x.to_vec(),
                push: vec![0.0; x.len()],
                push_norm: 0.0,
            });
        }
        let mut p = x.to_vec();
        match &self.kind {
            DomainKind::HalfSpace { normal, offset } => {
                let hs = HalfSpace {
                    normal: normal.clone(),
                    offset: *offset,
                };
                hs.force_inside(&mut p);
            }
            DomainKind::Box { lo, hi } => {
                for i in 0..p.len() {
                    p[i] = p[i].clamp(lo[i], hi[i]);
                }
            }
            DomainKind::Ball { center, radius } => {
                project_ball(&mut p, center, *radius);
            }
            DomainKind::Orthant { .. } => {
                for v in p.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            DomainKind::Polyhedron { faces } => {
                dykstra(&mut p, faces)?;
            }
        }
        debug_assert!(self.violation(&p) <= 0.0);
        let mut push = vec![0.0; x.len()];
        sub(x, &p, &mut push);
        let push_norm = norm(&push);
        Ok(ReflectionStep {
            point: p,
            push,
            push_norm,
        })
    }

    /// A unit outward normal at a boundary point. At non-smooth points the
    /// normal cone is multi-valued; this returns the normalized sum of the
    /// active-face normals, which is one admissible member of the cone.
    pub fn outward_normal(&self, x: &[f64], tol: f64) -> Result<Vec<f64>, GeometryError> {
        self.check_dim(x)?;
        let v = self.violation(x);
        if v.abs() > tol {
            return Err(GeometryError::NotOnBoundary { violation: v });
        }
        let mut n = vec![0.0; self.dimension];
        match &self.kind {
            DomainKind::HalfSpace { normal, .. } => n.copy_from_slice(normal),
            DomainKind::Box { lo, hi } => {
                for i in 0..self.dimension {
                    if x[i] >= hi[i] - tol {
                        n[i] += 1.0;
                    }
                    if x[i] <= lo[i] + tol {
                        n[i] -= 1.0;
                    }
                }
            }
            DomainKind::Ball { center, .. } => {
                sub(x, center, &mut n);
            }
            DomainKind::Orthant { .. } => {
                for i in 0..self.dimension {
                    if x[i] <= tol {
                        n[i] -= 1.0;
                    }
                }
            }
            DomainKind::Polyhedron { faces } => {
                for f in faces {
                    if f.violation(x).abs() <= tol {
                        for i in 0..self.dimension {
                            n[i] += f.normal[i];
                        }
                    }
                }
            }
        }
        let len = norm(&n);
        if len == 0.0 {
            return Err(GeometryError::NotOnBoundary { violation: v });
        }
        for v in n.iter_mut() {
            *v /= len;
        }
        Ok(n)
    }

    /// A strictly interior reference point; used by probe generators and the
    /// polyhedron validity check.
    pub fn find_interior_point(&self) -> Result<Vec<f64>, GeometryError> {
        match &self.kind {
            DomainKind::HalfSpace { normal, offset } => Ok(normal
                .iter()
                .map(|ni| ni * (offset - 1.0))
                .collect()),
            DomainKind::Box { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| {
                    if l.is_finite() && h.is_finite() {
                        0.5 * (l + h)
                    } else if l.is_finite() {
                        l + 1.0
                    } else if h.is_finite() {
                        h - 1.0
                    } else {
                        0.0
                    }
                })
                .collect()),
            DomainKind::Ball { center, .. } => Ok(center.clone()),
            DomainKind::Orthant { dimension } => Ok(vec![1.0; *dimension]),
            DomainKind::Polyhedron { faces } => {
                // Cyclic projection onto margin-shrunk faces converges to a
                // strictly interior point when one exists.
                let mut margin = 1.0_f64;
                for _ in 0..20 {
                    let shrunk: Vec<HalfSpace> = faces
                        .iter()
                        .map(|f| HalfSpace {
                            normal: f.normal.clone(),
                            offset: f.offset - margin,
                        })
                        .collect();
                    let mut p = vec![0.0; self.dimension];
                    let mut converged = false;
                    for _ in 0..2000 {
                        let mut worst = f64::NEG_INFINITY;
                        for f in &shrunk {
                            f.project_once(&mut p);
                        }
                        for f in &shrunk {
                            worst = worst.max(f.violation(&p));
                        }
                        if worst <= 0.0 {
                            converged = true;
                            break;
                        }
                    }
                    if converged {
                        return Ok(p);
                    }
                    margin *= 0.25;
                }
                Err(GeometryError::EmptyInterior)
            }
        }
    }

    /// Pushes an arbitrary point into the domain (projection shortcut used
    /// by probe generators; identical to `project(..).point`).
    pub fn clamp_into(&self, x: &[f64]) -> Result<Vec<f64>, GeometryError> {
        Ok(self.project(x)?.point)
    }

    /// A finite box that covers the interesting part of the domain around
    /// `focus`; used to generate probe points for unbounded domains.
    pub fn probe_box(&self, focus: &[f64], radius: f64) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![0.0; self.dimension];
        let mut hi = vec![0.0; self.dimension];
        for i in 0..self.dimension {
            lo[i] = focus[i] - radius;
            hi[i] = focus[i] + radius;
        }
        if let DomainKind::Box { lo: bl, hi: bh } = &self.kind {
            for i in 0..self.dimension {
                if bl[i].is_finite() {
                    lo[i] = lo[i].max(bl[i]);
                }
                if bh[i].is_finite() {
                    hi[i] = hi[i].min(bh[i]);
                }
            }
        }
        if let DomainKind::Ball { center, radius: r } = &self.kind {
            for i in 0..self.dimension {
                lo[i] = lo[i].max(center[i] - r);
                hi[i] = hi[i].min(center[i] + r);
            }
        }
        (lo, hi)
    }
}

fn project_ball(p: &mut [f64], center: &[f64], radius: f64) {
    let mut shave = f64::EPSILON;
    for guard in 0..128 {
        let d = dist(p, center);
        if d <= radius {
            return;
        }
        // After a few exact rescales, shave the factor geometrically so the
        // loop provably crosses the boundary.
        let mut scale = radius / d;
        if guard >= 2 {
            scale *= 1.0 - shave;
            shave *= 2.0;
        }
        for i in 0..p.len() {
            p[i] = center[i] + (p[i] - center[i]) * scale;
        }
    }
}

/// Dykstra's alternating projection scheme for intersections of half-spaces;
/// converges to the exact Euclidean projection (plain cyclic projection only
/// yields feasibility).
fn dykstra(p: &mut [f64], faces: &[HalfSpace]) -> Result<(), GeometryError> {
    let d = p.len();
    let mut corrections = vec![0.0; faces.len() * d];
    let mut prev = p.to_vec();
    let mut residual = f64::INFINITY;
    for _sweep in 0..MAX_DYKSTRA_SWEEPS {
        for (fi, face) in faces.iter().enumerate() {
            let corr = &mut corrections[fi * d..(fi + 1) * d];
            for i in 0..d {
                p[i] += corr[i];
            }
            let before: Vec<f64> = p.to_vec();
            face.project_once(p);
            for i in 0..d {
                corr[i] = before[i] - p[i];
            }
        }
        residual = dist(p, &prev);
        if residual <= DYKSTRA_TOL {
            snap_into_faces(p, faces);
            return Ok(());
        }
        prev.copy_from_slice(p);
    }
    Err(GeometryError::ProjectionDidNotConverge {
        residual,
        sweeps: MAX_DYKSTRA_SWEEPS,
    })
}

/// Final cyclic cleanup so the result satisfies `violation <= 0` exactly.
fn snap_into_faces(p: &mut [f64], faces: &[HalfSpace]) {
    for _ in 0..256 {
        let mut worst = f64::NEG_INFINITY;
        for f in faces {
            worst = worst.max(f.violation(p));
        }
        if worst <= 0.0 {
            return;
        }
        for f in faces {
            f.force_inside(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{next_range, scalar_stream};
    use proptest::prelude::*;
    use rand_chacha::rand_core::RngCore;

    fn unit_box2() -> ConvexDomain {
        ConvexDomain::aligned_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn contains_basic_cases() {
        let b = unit_box2();
        assert!(b.contains(&[0.5, 0.5], 0.0).unwrap());
        let hs = ConvexDomain::half_space(vec![1.0, 0.0], 1.0).unwrap();
        assert!(!hs.contains(&[2.0, 0.0], 0.0).unwrap());
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(ball.contains(&[1.0, 0.0], 0.0).unwrap());
        assert!(matches!(
            b.contains(&[0.5], 0.0),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn project_half_space_orthogonal_drop() {
        let hs = ConvexDomain::half_space(vec![1.0, 0.0], 1.0).unwrap();
        let step = hs.project(&[2.0, 0.0]).unwrap();
        assert_eq!(step.point, vec![1.0, 0.0]);
        assert_eq!(step.push, vec![1.0, 0.0]);
        assert_eq!(step.push_norm, 1.0);
    }

    #[test]
    fn project_quadrant_clamp() {
        let q = ConvexDomain::aligned_box(vec![0.0, 0.0], vec![f64::INFINITY, f64::INFINITY])
            .unwrap();
        let step = q.project(&[-1.0, -2.0]).unwrap();
        assert_eq!(step.point, vec![0.0, 0.0]);
        assert_eq!(step.push, vec![-1.0, -2.0]);
    }

    #[test]
    fn project_ball_radial() {
        // Oracle for the radial rule: minimise |x-y| over a dense boundary
        // grid and compare.
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let x = [3.0, 4.0];
        let step = ball.project(&x).unwrap();
        let mut best = f64::INFINITY;
        let mut best_pt = [0.0, 0.0];
        let m = 2_000_000;
        for k in 0..m {
            let th = std::f64::consts::TAU * k as f64 / m as f64;
            let y = [th.cos(), th.sin()];
            let d = dist(&x, &y);
            if d < best {
                best = d;
                best_pt = y;
            }
        }
        assert!((step.point[0] - 0.6).abs() < 1e-9);
        assert!((step.point[1] - 0.8).abs() < 1e-9);
        assert!((step.push_norm - 4.0).abs() < 1e-12);
        assert!(dist(&step.point, &best_pt) < 1e-5);
        assert!((best - step.push_norm).abs() < 1e-10);
    }

    #[test]
    fn normals_on_faces_and_corners() {
        let b = ConvexDomain::aligned_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(b.outward_normal(&[1.0, 0.5], 1e-12).unwrap(), vec![1.0, 0.0]);
        let corner = b.outward_normal(&[1.0, 1.0], 1e-12).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((corner[0] - s).abs() < 1e-15 && (corner[1] - s).abs() < 1e-15);
        // Corner normal supports the domain: <n, y - x> <= 0 for sampled y.
        let mut rng = scalar_stream(1);
        for _ in 0..10_000 {
            let y = [next_range(&mut rng, 0.0, 1.0), next_range(&mut rng, 0.0, 1.0)];
            let ip = corner[0] * (y[0] - 1.0) + corner[1] * (y[1] - 1.0);
            assert!(ip <= 1e-12);
        }
        let ball = ConvexDomain::ball(vec![0.0, 0.0], 2.0).unwrap();
        let n = ball.outward_normal(&[0.0, 2.0], 1e-12).unwrap();
        assert!((n[0]).abs() < 1e-15 && (n[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            b.outward_normal(&[0.5, 0.5], 1e-9),
            Err(GeometryError::NotOnBoundary { .. })
        ));
        assert!(matches!(
            b.outward_normal(&[2.0, 0.5], 1e-9),
            Err(GeometryError::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn polyhedron_matches_half_space_when_single_constraint_active() {
        // Triangle-ish wedge; points past one face only.
        let faces = vec![
            HalfSpace::new(vec![1.0, 0.0], 1.0).unwrap(),
            HalfSpace::new(vec![0.0, 1.0], 1.0).unwrap(),
            HalfSpace::new(vec![-1.0, -1.0], 0.5).unwrap(),
        ];
        let poly = ConvexDomain::polyhedron(faces).unwrap();
        let single = ConvexDomain::half_space(vec![1.0, 0.0], 1.0).unwrap();
        let mut rng = scalar_stream(2);
        for _ in 0..200 {
            let x = [next_range(&mut rng, 1.0, 3.0), next_range(&mut rng, 0.0, 0.9)];
            let a = poly.project(&x).unwrap();
            let b = single.project(&x).unwrap();
            if b.point[1] <= 0.9 {
                assert!(dist(&a.point, &b.point) < 1e-9, "{:?} vs {:?}", a.point, b.point);
            }
        }
    }

    #[test]
    fn polyhedron_empty_interior_rejected() {
        let faces = vec![
            HalfSpace::new(vec![1.0, 0.0], 0.0).unwrap(),
            HalfSpace::new(vec![-1.0, 0.0], -0.5).unwrap(), // x >= 0.5: empty with x <= 0
        ];
        assert!(matches!(
            ConvexDomain::polyhedron(faces),
            Err(GeometryError::EmptyInterior)
        ));
    }

    #[test]
    fn json_round_trip_with_unbounded_box() {
        let d = ConvexDomain::aligned_box(vec![0.0], vec![f64::INFINITY]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("null"));
        let back = ConvexDomain::from_json(&s).unwrap();
        assert_eq!(back.violation(&[-1.0]), 1.0);
        assert_eq!(back.violation(&[5.0]), -5.0);
    }

    fn sample_domain(seed: u64) -> (ConvexDomain, Vec<f64>) {
        let mut rng = scalar_stream(seed);
        let dim = 1 + (rng.next_u64() % 3) as usize;
        let which = rng.next_u64() % 5;
        let domain = match which {
            0 => {
                let n: Vec<f64> = (0..dim).map(|_| next_range(&mut rng, -1.0, 1.0)).collect();
                let n = if norm(&n) < 1e-3 { vec![1.0; dim] } else { n };
                ConvexDomain::half_space(n, next_range(&mut rng, -2.0, 2.0)).unwrap()
            }
            1 => {
                let lo: Vec<f64> = (0..dim).map(|_| next_range(&mut rng, -3.0, 0.0)).collect();
                let hi: Vec<f64> = lo.iter().map(|l| l + next_range(&mut rng, 0.5, 4.0)).collect();
                ConvexDomain::aligned_box(lo, hi).unwrap()
            }
            2 => {
                let c: Vec<f64> = (0..dim).map(|_| next_range(&mut rng, -2.0, 2.0)).collect();
                ConvexDomain::ball(c, next_range(&mut rng, 0.5, 3.0)).unwrap()
            }
            3 => ConvexDomain::orthant(dim).unwrap(),
            _ => {
                let k = 2 + (rng.next_u64() % 3) as usize;
                let faces: Vec<HalfSpace> = (0..k)
                    .map(|_| {
                        let mut n: Vec<f64> =
                            (0..dim).map(|_| next_range(&mut rng, -1.0, 1.0)).collect();
                        if norm(&n) < 1e-3 {
                            n = vec![1.0; dim];
                        }
                        HalfSpace::new(n, next_range(&mut rng, 0.5, 2.0)).unwrap()
                    })
                    .collect();
                // Offsets > 0 guarantee the origin is strictly interior.
                ConvexDomain::polyhedron(faces).unwrap()
            }
        };
        let x: Vec<f64> = (0..dim).map(|_| next_range(&mut rng, -6.0, 6.0)).collect();
        (domain, x)
    }

    proptest! {
        #[test]
        fn projection_idempotent_exact(seed in 0u64..400) {
            let (domain, x) = sample_domain(seed);
            let first = domain.project(&x).unwrap();
            let second = domain.project(&first.point).unwrap();
            prop_assert_eq!(second.push_norm, 0.0);
            prop_assert_eq!(&second.point, &first.point);
        }

        #[test]
        fn projection_nonexpansive(seed in 0u64..400, seed2 in 1000u64..1400) {
            let (domain, x) = sample_domain(seed);
            let mut rng = scalar_stream(seed2);
            let y: Vec<f64> = (0..x.len()).map(|_| next_range(&mut rng, -6.0, 6.0)).collect();
            let px = domain.project(&x).unwrap().point;
            let py = domain.project(&y).unwrap().point;
            prop_assert!(dist(&px, &py) <= dist(&x, &y) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn variational_inequality(seed in 0u64..400) {
            let (domain, x) = sample_domain(seed);
            let step = domain.project(&x).unwrap();
            let interior = domain.find_interior_point().unwrap();
            let mut rng = scalar_stream(seed ^ 0xdead);
            for _ in 0..50 {
                // Random domain point: blend of interior point and a projected sample.
                let cand: Vec<f64> = (0..x.len()).map(|_| next_range(&mut rng, -6.0, 6.0)).collect();
                let mut y = domain.project(&cand).unwrap().point;
                let w = next_range(&mut rng, 0.0, 1.0);
                for i in 0..y.len() {
                    y[i] = w * y[i] + (1.0 - w) * interior[i];
                }
                let ip: f64 = (0..x.len())
                    .map(|i| (x[i] - step.point[i]) * (y[i] - step.point[i]))
                    .sum();
                prop_assert!(ip <= 1e-9, "variational inequality violated: {}", ip);
            }
        }

        #[test]
        fn push_is_outward_normal(seed in 0u64..400) {
            let (domain, x) = sample_domain(seed);
            let step = domain.project(&x).unwrap();
            if step.push_norm > 1e-9 {
                let n = domain.outward_normal(&step.point, 1e-7).unwrap();
                let cosine = dot(&step.push, &n) / step.push_norm;
                // push/|push| lies in the normal cone; against the summed
                // normal it keeps a positive angle.
                prop_assert!(cosine > 1e-6, "cosine {}", cosine);
            }
        }
    }
}

