use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spin::{SphericalAngle, SpinQuantumNumber};

use super::grid::SphereGrid;

/// `[theta_lo, theta_hi) × [phi_lo, phi_hi)`; upper edges at `π` and `2π`
/// are closed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularRect {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub phi_lo: f64,
    pub phi_hi: f64,
}

impl AngularRect {
    pub fn new(theta_lo: f64, theta_hi: f64, phi_lo: f64, phi_hi: f64) -> Result<Self> {
        let ok = 0.0 <= theta_lo
            && theta_lo < theta_hi
            && theta_hi <= PI + 1e-12
            && 0.0 <= phi_lo
            && phi_lo < phi_hi
            && phi_hi <= 2.0 * PI + 1e-12;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "invalid angular rectangle theta [{theta_lo}, {theta_hi}) phi [{phi_lo}, {phi_hi})"
            )));
        }
        Ok(Self {
            theta_lo,
            theta_hi: theta_hi.min(PI),
            phi_lo,
            phi_hi: phi_hi.min(2.0 * PI),
        })
    }

    pub fn theta_band(theta_lo: f64, theta_hi: f64) -> Result<Self> {
        Self::new(theta_lo, theta_hi, 0.0, 2.0 * PI)
    }

    pub fn contains(&self, a: &SphericalAngle) -> bool {
        let in_theta = a.theta >= self.theta_lo && (a.theta < self.theta_hi || self.theta_hi >= PI);
        let in_phi = a.phi >= self.phi_lo && (a.phi < self.phi_hi || self.phi_hi >= 2.0 * PI);
        in_theta && in_phi
    }

    /// Solid angle in steradians.
    pub fn area(&self) -> f64 {
        (self.phi_hi - self.phi_lo) * (self.theta_lo.cos() - self.theta_hi.cos())
    }

    fn overlap_area(&self, other: &Self) -> f64 {
        let t0 = self.theta_lo.max(other.theta_lo);
        let t1 = self.theta_hi.min(other.theta_hi);
        let p0 = self.phi_lo.max(other.phi_lo);
        let p1 = self.phi_hi.min(other.phi_hi);
        if t1 <= t0 || p1 <= p0 {
            0.0
        } else {
            (p1 - p0) * (t0.cos() - t1.cos())
        }
    }

    /// Angular distance from `a` to the rectangle's boundary, ignoring the
    /// poles and the `φ = 0 ≡ 2π` seam, which are not physical borders.
    pub fn border_distance(&self, a: &SphericalAngle) -> f64 {
        let mut d = f64::INFINITY;
        if self.theta_lo > 0.0 {
            d = d.min((a.theta - self.theta_lo).abs());
        }
        if self.theta_hi < PI {
            d = d.min((a.theta - self.theta_hi).abs());
        }
        let full_phi = self.phi_lo <= 0.0 && self.phi_hi >= 2.0 * PI;
        if !full_phi {
            let s = a.theta.sin();
            for edge in [self.phi_lo, self.phi_hi] {
                let dphi = (a.phi - edge).rem_euclid(2.0 * PI);
                let dphi = dphi.min(2.0 * PI - dphi);
                d = d.min(dphi * s);
            }
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub name: String,
    pub regions: Vec<AngularRect>,
}

impl Slot {
    pub fn new(name: impl Into<String>, regions: Vec<AngularRect>) -> Self {
        Self { name: name.into(), regions }
    }

    pub fn contains(&self, a: &SphericalAngle) -> bool {
        self.regions.iter().any(|r| r.contains(a))
    }

    pub fn area(&self) -> f64 {
        self.regions.iter().map(AngularRect::area).sum()
    }
}

/// Disjoint angular slots covering the sphere, for a given spin.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotPartition {
    spin: SpinQuantumNumber,
    slots: Vec<Slot>,
    coarse_graining_scale: f64,
}

impl SlotPartition {
    /// `ΔΘ·√j` at or above this value counts as coarse-grained.
    pub const COARSE_THRESHOLD: f64 = 3.0;

    pub fn new(spin: SpinQuantumNumber, slots: Vec<Slot>) -> Result<Self> {
        if slots.is_empty() || slots.iter().any(|s| s.regions.is_empty()) {
            return Err(Error::InvalidArgument("partition needs non-empty slots".into()));
        }
        let rects: Vec<&AngularRect> = slots.iter().flat_map(|s| s.regions.iter()).collect();
        for (i, a) in rects.iter().enumerate() {
            for b in &rects[i + 1..] {
                if a.overlap_area(b) > 1e-12 {
                    return Err(Error::InvalidArgument("partition slots overlap".into()));
                }
            }
        }
        let area: f64 = rects.iter().map(|r| r.area()).sum();
        if (area - 4.0 * PI).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "partition covers {area:.6} sr instead of 4pi"
            )));
        }
        let coarse_graining_scale = rects
            .iter()
            .map(|r| (r.theta_hi - r.theta_lo).min(r.phi_hi - r.phi_lo))
            .fold(f64::INFINITY, f64::min);
        Ok(Self { spin, slots, coarse_graining_scale })
    }

    pub fn whole_sphere(spin: SpinQuantumNumber) -> Self {
        Self::new(spin, vec![Slot::new("sphere", vec![band(0.0, PI)])]).expect("valid partition")
    }

    pub fn hemispheres(spin: SpinQuantumNumber) -> Self {
        Self::new(
            spin,
            vec![
                Slot::new("north", vec![band(0.0, PI / 2.0)]),
                Slot::new("south", vec![band(PI / 2.0, PI)]),
            ],
        )
        .expect("valid partition")
    }

    /// North cap `θ < π/3`, equatorial band, south cap `θ > 2π/3`.
    pub fn three_region(spin: SpinQuantumNumber) -> Self {
        Self::new(
            spin,
            vec![
                Slot::new("north", vec![band(0.0, PI / 3.0)]),
                Slot::new("equator", vec![band(PI / 3.0, 2.0 * PI / 3.0)]),
                Slot::new("south", vec![band(2.0 * PI / 3.0, PI)]),
            ],
        )
        .expect("valid partition")
    }

    /// Polar bands of width `width` from the north pole; the last band
    /// absorbs the remainder.
    pub fn theta_bands(spin: SpinQuantumNumber, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidArgument("band width must be positive".into()));
        }
        let mut edges = vec![0.0];
        while *edges.last().unwrap() + width < PI - 1e-12 {
            edges.push(edges.last().unwrap() + width);
        }
        edges.push(PI);
        let slots = edges
            .windows(2)
            .enumerate()
            .map(|(k, e)| Slot::new(format!("band{k}"), vec![band(e[0], e[1])]))
            .collect();
        Self::new(spin, slots)
    }

    /// `n_theta × n_phi` equal rectangles in `(θ, φ)`.
    pub fn rectangles(spin: SpinQuantumNumber, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidArgument("rectangle counts must be positive".into()));
        }
        let (dt, dp) = (PI / n_theta as f64, 2.0 * PI / n_phi as f64);
        let edge = |k: usize, n: usize, step: f64, end: f64| if k == n { end } else { k as f64 * step };
        let mut slots = Vec::with_capacity(n_theta * n_phi);
        for a in 0..n_theta {
            for b in 0..n_phi {
                let rect = AngularRect::new(
                    edge(a, n_theta, dt, PI),
                    edge(a + 1, n_theta, dt, PI),
                    edge(b, n_phi, dp, 2.0 * PI),
                    edge(b + 1, n_phi, dp, 2.0 * PI),
                )?;
                slots.push(Slot::new(format!("r{a}_{b}"), vec![rect]));
            }
        }
        Self::new(spin, slots)
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.spin
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn coarse_graining_scale(&self) -> f64 {
        self.coarse_graining_scale
    }

    /// Whether `ΔΘ√j ≥ 3`, i.e. slots are wide compared with a coherent state.
    pub fn is_coarse_grained(&self) -> bool {
        self.coarse_graining_scale * self.spin.j().sqrt() >= Self::COARSE_THRESHOLD
    }

    pub fn slot_of(&self, a: &SphericalAngle) -> Option<usize> {
        self.slots.iter().position(|s| s.contains(a))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s.name == name)
    }

    /// Slot index of every grid node; fails if a node is claimed by zero or
    /// several slots.
    pub fn assign(&self, grid: &SphereGrid) -> Result<Vec<usize>> {
        grid.nodes()
            .iter()
            .map(|a| {
                let mut owners = self.slots.iter().enumerate().filter(|(_, s)| s.contains(a));
                match (owners.next(), owners.next()) {
                    (Some((k, _)), None) => Ok(k),
                    (None, _) => Err(Error::InvalidArgument(format!(
                        "node ({}, {}) belongs to no slot",
                        a.theta, a.phi
                    ))),
                    _ => Err(Error::InvalidArgument(format!(
                        "node ({}, {}) belongs to several slots",
                        a.theta, a.phi
                    ))),
                }
            })
            .collect()
    }

    /// Distance from `a` to the nearest slot border.
    pub fn border_distance(&self, a: &SphericalAngle) -> f64 {
        self.slots
            .iter()
            .flat_map(|s| s.regions.iter())
            .map(|r| r.border_distance(a))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distinct polar and azimuthal break points (including the range ends).
    pub fn breakpoints(&self) -> (Vec<f64>, Vec<f64>) {
        let mut theta = vec![0.0, PI];
        let mut phi = vec![0.0, 2.0 * PI];
        for r in self.slots.iter().flat_map(|s| s.regions.iter()) {
            theta.extend([r.theta_lo, r.theta_hi]);
            phi.extend([r.phi_lo, r.phi_hi]);
        }
        (dedup_sorted(theta), dedup_sorted(phi))
    }
}

fn band(lo: f64, hi: f64) -> AngularRect {
    AngularRect::theta_band(lo, hi).expect("valid band")
}

fn dedup_sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}
