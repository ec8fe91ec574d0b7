//! Planar projective geometry between camera image planes and the court
//! ground plane: homography estimation from four point correspondences,
//! application to homogeneous points, inversion, and camera calibration.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dehomogenization threshold: |w| at or below this is a point at infinity.
pub const EPSILON_W: f64 = 1e-12;
/// Triangle area at or below this marks a corner triple as collinear.
pub const COLLINEAR_AREA: f64 = 1e-9;
/// Determinant magnitude at or below this marks a matrix as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// A 2D point in pixels or meters depending on the frame it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "(f64, f64)", from = "(f64, f64)")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<Point2> for (f64, f64) {
    fn from(p: Point2) -> (f64, f64) {
        (p.x, p.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Point2 {
        Point2 { x, y }
    }
}

/// A point in homogeneous coordinates; real position is (x/w, y/w) when
/// |w| is above [`EPSILON_W`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousPoint {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

/// Which input quadrilateral of a correspondence failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerSet {
    Source,
    Destination,
}

impl std::fmt::Display for CornerSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CornerSet::Source => write!(f, "source"),
            CornerSet::Destination => write!(f, "destination"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("corners {i}, {j}, {k} of the {set} quadrilateral are collinear")]
    DegenerateConfiguration {
        set: CornerSet,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("correspondence system is rank-deficient")]
    RankDeficient,
    #[error("point at infinity: |w| = {w:e} is at or below the dehomogenization threshold")]
    PointAtInfinity { w: f64 },
    #[error("singular matrix: |det| = {det:e}")]
    SingularMatrix { det: f64 },
}

/// A 3x3 projective map, row-major, normalized so m[2][2] = 1 whenever the
/// bottom-right entry is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Homography {
    pub m: [[f64; 3]; 3],
}

impl Homography {
    pub fn new(m: [[f64; 3]; 3]) -> Self {
        Homography { m }.normalized()
    }

    pub fn identity() -> Self {
        Homography {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    fn normalized(mut self) -> Self {
        let s = self.m[2][2];
        if s.abs() > EPSILON_W {
            for row in &mut self.m {
                for v in row {
                    *v /= s;
                }
            }
        }
        self
    }

    /// Applies the map and dehomogenizes in one step.
    pub fn project(&self, p: Point2) -> Result<Point2, GeometryError> {
        dehomogenize(apply(self, p))
    }
}

/// Multiplies h by the homogeneous lift (x, y, 1).
pub fn apply(h: &Homography, p: Point2) -> HomogeneousPoint {
    let m = &h.m;
    HomogeneousPoint {
        x: m[0][0] * p.x + m[0][1] * p.y + m[0][2],
        y: m[1][0] * p.x + m[1][1] * p.y + m[1][2],
        w: m[2][0] * p.x + m[2][1] * p.y + m[2][2],
    }
}

pub fn dehomogenize(hp: HomogeneousPoint) -> Result<Point2, GeometryError> {
    if hp.w.abs() <= EPSILON_W {
        return Err(GeometryError::PointAtInfinity { w: hp.w });
    }
    Ok(Point2::new(hp.x / hp.w, hp.y / hp.w))
}

/// Matrix product a * b: the composed map applies `b` first, then `a`.
pub fn compose(a: &Homography, b: &Homography) -> Homography {
    let mut m = [[0.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            for k in 0..3 {
                *v += a.m[i][k] * b.m[k][j];
            }
        }
    }
    Homography::new(m)
}

pub fn invert(h: &Homography) -> Result<Homography, GeometryError> {
    let m = &h.m;
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() <= SINGULAR_DET {
        return Err(GeometryError::SingularMatrix { det: det.abs() });
    }
    let adj = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = adj[i][j] / det;
        }
    }
    Ok(Homography::new(inv))
}

// Returns the first corner triple whose triangle area is not above the
// collinearity threshold. A NaN coordinate fails the area test and is
// reported the same way.
fn collinear_triple(pts: &[Point2; 4]) -> Option<(usize, usize, usize)> {
    const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];
    for &(i, j, k) in &TRIPLES {
        let area = 0.5
            * ((pts[j].x - pts[i].x) * (pts[k].y - pts[i].y)
                - (pts[k].x - pts[i].x) * (pts[j].y - pts[i].y))
                .abs();
        if !(area > COLLINEAR_AREA) {
            return Some((i, j, k));
        }
    }
    None
}

// Gaussian elimination with partial pivoting on the augmented system.
fn solve8(a: &mut [[f64; 9]; 8]) -> Option<[f64; 8]> {
    for col in 0..8 {
        let pivot = (col..8)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..8 {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..9 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut x = [0.0; 8];
    for row in (0..8).rev() {
        let mut s = a[row][8];
        for k in row + 1..8 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Estimates the homography mapping each `src[i]` to `dst[i]`.
///
/// Sets up the standard 8x8 linear system in the eight unknowns (with
/// m[2][2] fixed to 1) and solves it by Gaussian elimination with partial
/// pivoting, which is exact for four correspondences.
///
/// ```
/// use courtfusion::geometry::{compute_homography, Point2};
/// let square = [
///     Point2::new(0.0, 0.0),
///     Point2::new(1.0, 0.0),
///     Point2::new(1.0, 1.0),
///     Point2::new(0.0, 1.0),
/// ];
/// let h = compute_homography(&square, &square).unwrap();
/// assert_eq!(h.m[0][0], 1.0);
/// ```
pub fn compute_homography(
    src: &[Point2; 4],
    dst: &[Point2; 4],
) -> Result<Homography, GeometryError> {
    for (pts, set) in [(src, CornerSet::Source), (dst, CornerSet::Destination)] {
        if let Some((i, j, k)) = collinear_triple(pts) {
            return Err(GeometryError::DegenerateConfiguration { set, i, j, k });
        }
    }
    let mut a = [[0.0; 9]; 8];
    for idx in 0..4 {
        let (p, q) = (src[idx], dst[idx]);
        a[2 * idx] = [p.x, p.y, 1.0, 0.0, 0.0, 0.0, -p.x * q.x, -p.y * q.x, q.x];
        a[2 * idx + 1] = [0.0, 0.0, 0.0, p.x, p.y, 1.0, -p.x * q.y, -p.y * q.y, q.y];
    }
    let h = solve8(&mut a).ok_or(GeometryError::RankDeficient)?;
    Ok(Homography::new([
        [h[0], h[1], h[2]],
        [h[3], h[4], h[5]],
        [h[6], h[7], 1.0],
    ]))
}

/// One camera's four corner correspondences; the on-disk corners schema.
/// Corner order is fixed: near-left, near-right, far-right, far-left.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CornerCorrespondence {
    /// Image-frame corners in pixels.
    pub image_corners: [Point2; 4],
    /// World-frame corners in meters.
    pub world_corners: [Point2; 4],
}

/// One camera's correspondence pairs plus the derived forward and inverse
/// ground-plane homographies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "CornerCorrespondence")]
pub struct CameraCalibration {
    pub image_corners: [Point2; 4],
    pub world_corners: [Point2; 4],
    /// Image pixels to world meters.
    pub to_world: Homography,
    /// World meters to image pixels; the inverse of `to_world`.
    pub from_world: Homography,
}

impl TryFrom<CornerCorrespondence> for CameraCalibration {
    type Error = GeometryError;

    fn try_from(c: CornerCorrespondence) -> Result<Self, GeometryError> {
        calibrate(&c.image_corners, &c.world_corners)
    }
}

/// Builds a [`CameraCalibration`] from four image/world corner pairs.
pub fn calibrate(
    image_corners: &[Point2; 4],
    world_corners: &[Point2; 4],
) -> Result<CameraCalibration, GeometryError> {
    let to_world = compute_homography(image_corners, world_corners)?;
    let from_world = invert(&to_world)?;
    Ok(CameraCalibration {
        image_corners: *image_corners,
        world_corners: *world_corners,
        to_world,
        from_world,
    })
}

impl CameraCalibration {
    /// Largest distance between a mapped image corner and its world corner.
    pub fn max_reprojection_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (img, world) in self.image_corners.iter().zip(&self.world_corners) {
            if let Ok(mapped) = self.to_world.project(*img) {
                worst = worst.max(mapped.distance(*world));
            }
        }
        worst
    }
}

/// Court dimensions as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CourtDims {
    pub width_m: f64,
    pub length_m: f64,
    #[serde(default = "CourtDims::default_margin")]
    pub boundary_margin_m: f64,
}

impl CourtDims {
    fn default_margin() -> f64 {
        0.5
    }
}

impl TryFrom<CourtDims> for CourtModel {
    type Error = String;

    fn try_from(d: CourtDims) -> Result<Self, Self::Error> {
        if !(d.width_m > 0.0 && d.length_m > 0.0) {
            return Err(format!(
                "court dimensions must be positive, got {} x {}",
                d.width_m, d.length_m
            ));
        }
        if d.boundary_margin_m < 0.0 {
            return Err(format!("boundary margin must be nonnegative, got {}", d.boundary_margin_m));
        }
        Ok(CourtModel::new(d.width_m, d.length_m, d.boundary_margin_m))
    }
}

impl From<CourtModel> for CourtDims {
    fn from(c: CourtModel) -> Self {
        CourtDims {
            width_m: c.width,
            length_m: c.length,
            boundary_margin_m: c.boundary_margin,
        }
    }
}

/// The court rectangle in world coordinates, origin at the near-left corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CourtDims", into = "CourtDims")]
pub struct CourtModel {
    pub width: f64,
    pub length: f64,
    /// Near-left, near-right, far-right, far-left; always the axis-aligned
    /// rectangle (0,0)-(width,length).
    pub corners: [Point2; 4],
    /// Extra band outside the lines still counted as "on court" for exit
    /// detection.
    pub boundary_margin: f64,
}

impl CourtModel {
    pub fn new(width: f64, length: f64, boundary_margin: f64) -> Self {
        assert!(width > 0.0 && length > 0.0, "court dimensions must be positive");
        CourtModel {
            width,
            length,
            corners: [
                Point2::new(0.0, 0.0),
                Point2::new(width, 0.0),
                Point2::new(width, length),
                Point2::new(0.0, length),
            ],
            boundary_margin,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.length
    }

    pub fn contains_with_margin(&self, p: Point2) -> bool {
        let m = self.boundary_margin;
        p.x >= -m && p.x <= self.width + m && p.y >= -m && p.y <= self.length + m
    }
}

impl Default for CourtModel {
    /// Official doubles court: 13.40 m long, 6.10 m wide, 0.5 m margin.
    fn default() -> Self {
        CourtModel::new(6.10, 13.40, 0.5)
    }
}
