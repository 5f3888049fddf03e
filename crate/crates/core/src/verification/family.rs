//! Seeded, enumerable shape families. Trial `t` of seed `s` always yields the
//! same shape: the generator is ChaCha8 seeded with `s` on stream `t`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Shape;
use crate::convex::{ConvexPolygon, ConvexPolytope};
use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice, DEFAULT_MAX_CELLS};

/// Vertex count of polygonized disks and ellipses.
pub const ROUND_VERTICES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Disks with random centers and radii.
    Balls,
    /// Hulls of 5 to 30 uniform points in a disk, randomly scaled so both
    /// `R < r` and `R >= r` occur.
    RandomHulls,
    /// Ellipses of area π with aspect ratio swept from 1 to 10 over the trials.
    Ellipses,
    /// Rotated rectangles with random aspect and area.
    Boxes,
    /// Rectangles `[0, L] x [0, w]` with `w / L` between 10^-2.5 and 10^-1.
    ThinRectangles,
    /// Two disjoint disks on a grid.
    FarUnions,
    /// Unit-area rectangles `L x 1/L`, `L` log-uniform in `[1, 32]`.
    Cylinders,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Balls,
        Family::RandomHulls,
        Family::Ellipses,
        Family::Boxes,
        Family::ThinRectangles,
        Family::FarUnions,
        Family::Cylinders,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Balls => "balls",
            Family::RandomHulls => "random-hulls",
            Family::Ellipses => "ellipses",
            Family::Boxes => "boxes",
            Family::ThinRectangles => "thin-rectangles",
            Family::FarUnions => "far-unions",
            Family::Cylinders => "cylinders",
        }
    }

    /// Trial `trial` of `trials`. `r` sets the grid spacing of grid families.
    pub fn generate(self, seed: u64, trial: usize, trials: usize, r: f64) -> Result<(String, Shape)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let id = format!("{}-{trial}", self.name());
        let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (rng.random_range(lo.ln()..hi.ln())).exp();
        let shape = match self {
            Family::Balls => {
                let c = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
                let radius = log_uniform(&mut rng, 0.02, 2.0);
                polygon(ConvexPolygon::regular(ROUND_VERTICES, c, radius)?)
            }
            Family::RandomHulls => {
                let k = rng.random_range(5..=30);
                let scale = log_uniform(&mut rng, 0.05, 1.5);
                let shift = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
                let pts: Vec<[f64; 2]> = (0..k)
                    .map(|_| {
                        let rho = rng.random_range(0.0f64..1.0).sqrt() * scale;
                        let t = rng.random_range(0.0..std::f64::consts::TAU);
                        [shift[0] + rho * t.cos(), shift[1] + rho * t.sin()]
                    })
                    .collect();
                polygon(ConvexPolygon::hull(&pts)?)
            }
            Family::Ellipses => {
                let aspect = if trials > 1 { 1.0 + 9.0 * trial as f64 / (trials - 1) as f64 } else { 1.0 };
                let (a, b) = (aspect.sqrt(), 1.0 / aspect.sqrt());
                let pts: Vec<[f64; 2]> = (0..ROUND_VERTICES)
                    .map(|i| {
                        let t = std::f64::consts::TAU * i as f64 / ROUND_VERTICES as f64;
                        [a * t.cos(), b * t.sin()]
                    })
                    .collect();
                polygon(ConvexPolygon::from_vertices(pts)?.rescale_to_volume(std::f64::consts::PI)?)
            }
            Family::Boxes => {
                let aspect = rng.random_range(1.0..10.0);
                let area = log_uniform(&mut rng, 0.01, 4.0);
                let angle = rng.random_range(0.0..std::f64::consts::PI);
                let (w, h) = ((area * aspect).sqrt(), (area / aspect).sqrt());
                polygon(ConvexPolygon::rectangle([-0.5 * w, -0.5 * h], w, h)?.rotated(angle))
            }
            Family::ThinRectangles => {
                let l = rng.random_range(2.0..20.0);
                let w = l * 10f64.powf(-rng.random_range(1.0..2.5));
                polygon(ConvexPolygon::rectangle([0.0, 0.0], l, w)?)
            }
            Family::FarUnions => {
                let r1: f64 = rng.random_range(0.4..1.0);
                let r2: f64 = rng.random_range(0.4..1.0);
                let gap = rng.random_range(1.0..3.0);
                let h = (r / 4.0).min(r1.min(r2) / 16.0);
                let (c1, c2) = (0.0, r1 + gap + r2);
                let lo = [c1 - r1, -r1.max(r2)];
                let hi = [c2 + r2, r1.max(r2)];
                let g = GridSet::from_indicator(&lo, &hi, h, Lattice::Tiled, 2, DEFAULT_MAX_CELLS, |x| {
                    (x[0] - c1).hypot(x[1]) < r1 || (x[0] - c2).hypot(x[1]) < r2
                })?;
                Shape::Grid(g)
            }
            Family::Cylinders => {
                let l = log_uniform(&mut rng, 1.0, 32.0);
                polygon(ConvexPolygon::rectangle([0.0, 0.0], l, 1.0 / l)?)
            }
        };
        Ok((id, shape))
    }
}

fn polygon(p: ConvexPolygon<f64>) -> Shape {
    Shape::Polytope(ConvexPolytope::Polygon(p))
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_distinct() {
        for fam in Family::ALL {
            let (_, a) = fam.generate(42, 3, 10, 0.1).unwrap();
            let (_, b) = fam.generate(42, 3, 10, 0.1).unwrap();
            assert_eq!(a, b);
            assert!(a.volume() > 0.0);
        }
        let (_, a) = Family::RandomHulls.generate(42, 0, 10, 0.1).unwrap();
        let (_, b) = Family::RandomHulls.generate(42, 1, 10, 0.1).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn names_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.name().parse::<Family>().unwrap(), fam);
        }
        assert!("circles".parse::<Family>().is_err());
    }
}
