//! Discrete domains: hyperbolic quadrature grids, masks, fields and polarization.
//!
//! A grid is a set of nodes with hyperbolic cell weights `h²/(π(1 − |z|²)²)`.
//! Plain grids are the centres of a uniform Cartesian lattice of pitch `h`
//! (lattice points `((i + ½)h, (j + ½)h)`) that fall inside the domain. A
//! paired grid is closed under the reflection of a polarizer: lattice centres
//! are generated on the polarizer side `ℋ` and their mirror images are
//! appended with identical weights, so polarization acts by an exact node
//! permutation.
//!
//! Masks and fields hold an `Arc` to their grid; operations between objects
//! on different grids fail with [`Error::GridMismatch`].

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypgeo::{Geodesic, HyperbolicDisk, PointD, Side};

/// Minimum number of inside nodes a grid must provide.
pub const MIN_NODES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Union,
    Subtract,
}

/// One hyperbolic disk `Δ_ρ(c)` of a domain description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskTerm {
    pub cx: f64,
    pub cy: f64,
    pub rho: f64,
    pub op: SetOp,
}

impl DiskTerm {
    pub fn disk(&self) -> Result<HyperbolicDisk> {
        HyperbolicDisk::new(PointD::new(self.cx, self.cy)?, self.rho)
    }
}

/// A bounded domain given as a left-to-right union/difference of hyperbolic
/// disks, starting from the empty set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub disks: Vec<DiskTerm>,
}

/// Validated, evaluable form of a [`DomainSpec`].
#[derive(Clone, Debug)]
pub struct Domain {
    terms: Vec<(HyperbolicDisk, SetOp)>,
    bounding_radius: f64,
}

impl DomainSpec {
    pub fn disk(center: (f64, f64), rho: f64) -> Self {
        DomainSpec { disks: vec![DiskTerm { cx: center.0, cy: center.1, rho, op: SetOp::Union }] }
    }

    pub fn union(mut self, center: (f64, f64), rho: f64) -> Self {
        self.disks.push(DiskTerm { cx: center.0, cy: center.1, rho, op: SetOp::Union });
        self
    }

    pub fn subtract(mut self, center: (f64, f64), rho: f64) -> Self {
        self.disks.push(DiskTerm { cx: center.0, cy: center.1, rho, op: SetOp::Subtract });
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain spec serializes")
    }

    pub fn build(&self) -> Result<Domain> {
        let mut terms = Vec::with_capacity(self.disks.len());
        let mut bound: f64 = 0.0;
        for t in &self.disks {
            let d = t.disk()?;
            if t.op == SetOp::Union {
                let (c, r) = d.euclidean_params();
                bound = bound.max(c.norm() + r);
            }
            terms.push((d, t.op));
        }
        if !terms.iter().any(|(_, op)| *op == SetOp::Union) {
            return Err(invalid("domain has no union term and is empty"));
        }
        Ok(Domain { terms, bounding_radius: bound })
    }
}

impl Domain {
    #[inline]
    pub(crate) fn contains_c(&self, z: Complex64) -> bool {
        let mut inside = false;
        for (d, op) in &self.terms {
            match op {
                SetOp::Union => inside = inside || d.contains_c(z),
                SetOp::Subtract => inside = inside && !d.contains_c(z),
            }
        }
        inside
    }

    pub fn contains(&self, z: PointD) -> bool {
        self.contains_c(z.z())
    }

    /// Euclidean radius `k < 1` with `Ω ⊂ {|z| ≤ k}`.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }
}

/// One open side `ℋ` of a geodesic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polarizer {
    pub geodesic: Geodesic,
    pub side: Side,
}

impl Polarizer {
    pub fn new(geodesic: Geodesic, side: Side) -> Result<Self> {
        if side == Side::On {
            return Err(invalid("a polarizer must be an open side, not the geodesic"));
        }
        Ok(Polarizer { geodesic, side })
    }

    /// Whether `z ∈ ℋ`; points on the geodesic are not.
    #[inline]
    pub fn contains(&self, z: PointD) -> bool {
        self.geodesic.side(z) == self.side
    }
}

/// CLI grammar: `diam:<theta>` or `arc:<theta>:<a>`.
impl FromStr for Geodesic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| invalid(format!("bad number '{t}' in '{s}'")));
        match parts.as_slice() {
            ["diam", t] => Geodesic::diameter(num(t)?),
            ["arc", t, a] => Geodesic::arc(num(t)?, num(a)?),
            _ => Err(invalid(format!("geodesic '{s}' is not diam:<theta> or arc:<theta>:<a>"))),
        }
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" => Ok(Side::Positive),
            "neg" | "negative" => Ok(Side::Negative),
            _ => Err(invalid(format!("side '{s}' is not pos|neg"))),
        }
    }
}

/// Node pairing of a grid that is closed under a polarizer's reflection.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub polarizer: Polarizer,
    /// `σ(node_i) = node_{partner[i]}`; an involution.
    pub partner: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    nodes: Vec<PointD>,
    weights: Vec<f64>,
    pitch: f64,
    pairing: Option<Pairing>,
}

impl QuadratureGrid {
    pub fn nodes(&self) -> &[PointD] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pairing(&self) -> Option<&Pairing> {
        self.pairing.as_ref()
    }

    /// Total hyperbolic weight.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Lebesgue area of node `i`'s cell, `π w_i (1 − |z_i|²)²`. Equal to
    /// `pitch²` for lattice nodes; reflected nodes carry the Jacobian-scaled area.
    pub fn cell_area(&self, i: usize) -> f64 {
        let s = 1.0 - self.nodes[i].norm_sqr();
        PI * self.weights[i] * s * s
    }

    /// Builds a grid from explicit nodes and weights (no pairing).
    pub fn from_parts(nodes: Vec<PointD>, weights: Vec<f64>, pitch: f64) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(invalid("node and weight counts differ"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("weights must be positive, found {w}")));
        }
        Ok(QuadratureGrid { nodes, weights, pitch, pairing: None })
    }
}

/// Hyperbolic midpoint weight of a Cartesian cell of side `pitch` centred at `z`.
#[inline]
pub fn cell_weight(z: Complex64, pitch: f64) -> f64 {
    let s = 1.0 - z.norm_sqr();
    pitch * pitch / (PI * s * s)
}

fn check_pitch(pitch: f64) -> Result<()> {
    if pitch.is_finite() && pitch > 0.0 && pitch < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("pitch {pitch} must lie in (0, 1)")))
    }
}

/// Lattice cell centres in the square `[-bound, bound]²`, row-major.
fn lattice(pitch: f64, bound: f64) -> impl Iterator<Item = Complex64> {
    let n = (bound / pitch).ceil() as i64 + 1;
    (-n..n).flat_map(move |j| {
        let y = (j as f64 + 0.5) * pitch;
        (-n..n).map(move |i| Complex64::new((i as f64 + 0.5) * pitch, y))
    })
}

/// Indicator of a set on a grid.
#[derive(Clone, Debug)]
pub struct DomainMask {
    grid: Arc<QuadratureGrid>,
    inside: Vec<bool>,
}

impl DomainMask {
    pub fn new(grid: Arc<QuadratureGrid>, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != grid.len() {
            return Err(invalid("mask length differs from grid size"));
        }
        if !inside.iter().any(|&b| b) {
            return Err(Error::TooFewNodes { found: 0, required: 1 });
        }
        Ok(DomainMask { grid, inside })
    }

    pub fn from_domain(grid: Arc<QuadratureGrid>, domain: &Domain) -> Result<Self> {
        let inside = grid.nodes.iter().map(|z| domain.contains(*z)).collect();
        DomainMask::new(grid, inside)
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Indices of inside nodes, in grid order.
    pub fn indices(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&i| self.inside[i]).collect()
    }

    /// Hyperbolic measure `τ` of the masked set.
    pub fn measure(&self) -> f64 {
        self.indices().iter().map(|&i| self.grid.weights[i]).sum()
    }

    /// Lebesgue area of the masked cells.
    pub fn area(&self) -> f64 {
        self.indices().iter().map(|&i| self.grid.cell_area(i)).sum()
    }

    /// The image `σ_𝒢(Ω)` on a paired grid.
    pub fn reflect(&self) -> Result<DomainMask> {
        let pairing = self.grid.pairing().ok_or(Error::UnpairedGrid)?;
        let inside = pairing.partner.iter().map(|&j| self.inside[j]).collect();
        DomainMask::new(self.grid.clone(), inside)
    }

    pub fn same_grid(&self, other: &DomainMask) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid)
    }
}

impl PartialEq for DomainMask {
    fn eq(&self, other: &Self) -> bool {
        self.same_grid(other) && self.inside == other.inside
    }
}

/// Builds a Cartesian grid whose nodes are the lattice centres inside `spec`.
pub fn build_grid(spec: &DomainSpec, pitch: f64) -> Result<(Arc<QuadratureGrid>, DomainMask)> {
    check_pitch(pitch)?;
    let domain = spec.build()?;
    let nodes: Vec<PointD> = lattice(pitch, domain.bounding_radius())
        .filter(|z| z.norm_sqr() < 1.0 && domain.contains_c(*z))
        .map(PointD::from_complex_unchecked)
        .collect();
    if nodes.len() < MIN_NODES {
        return Err(Error::TooFewNodes { found: nodes.len(), required: MIN_NODES });
    }
    let weights = nodes.iter().map(|z| cell_weight(z.z(), pitch)).collect();
    let grid = Arc::new(QuadratureGrid { nodes, weights, pitch, pairing: None });
    let inside = vec![true; grid.len()];
    let mask = DomainMask::new(grid.clone(), inside)?;
    Ok((grid, mask))
}

/// Builds a grid closed under the polarizer's reflection that covers `Ω ∪ σΩ`.
///
/// Lattice centres `z ∈ ℋ` with `z ∈ Ω` or `σz ∈ Ω` are kept and immediately
/// followed by `σz` carrying the same weight. Lattice centres on the geodesic
/// that lie in `Ω` are kept once and paired with themselves.
pub fn build_paired_grid(
    spec: &DomainSpec,
    pitch: f64,
    polarizer: Polarizer,
) -> Result<(Arc<QuadratureGrid>, DomainMask)> {
    check_pitch(pitch)?;
    let domain = spec.build()?;
    let g = polarizer.geodesic;
    let reflected_bound = spec
        .disks
        .iter()
        .filter(|t| t.op == SetOp::Union)
        .map(|t| {
            let (c, r) = t.disk().expect("validated").reflect(&g).euclidean_params();
            c.norm() + r
        })
        .fold(0.0_f64, f64::max);
    let bound = domain.bounding_radius().max(reflected_bound);

    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut partner = Vec::new();
    for z in lattice(pitch, bound) {
        if z.norm_sqr() >= 1.0 {
            continue;
        }
        match g.side_c(z) {
            Side::On => {
                if domain.contains_c(z) {
                    let i = nodes.len();
                    nodes.push(PointD::from_complex_unchecked(z));
                    weights.push(cell_weight(z, pitch));
                    partner.push(i);
                }
            }
            s if s == polarizer.side => {
                let sz = g.reflect_c(z);
                if domain.contains_c(z) || domain.contains_c(sz) {
                    let i = nodes.len();
                    let w = cell_weight(z, pitch);
                    nodes.push(PointD::from_complex_unchecked(z));
                    nodes.push(PointD::from_complex_unchecked(sz));
                    weights.push(w);
                    weights.push(w);
                    partner.push(i + 1);
                    partner.push(i);
                }
            }
            _ => {}
        }
    }
    let inside: Vec<bool> = nodes.iter().map(|z| domain.contains(*z)).collect();
    let count = inside.iter().filter(|&&b| b).count();
    if count < MIN_NODES {
        return Err(Error::TooFewNodes { found: count, required: MIN_NODES });
    }
    let grid = Arc::new(QuadratureGrid { nodes, weights, pitch, pairing: Some(Pairing { polarizer, partner }) });
    let mask = DomainMask::new(grid.clone(), inside)?;
    Ok((grid, mask))
}

fn pairing_of(grid: &QuadratureGrid) -> Result<&Pairing> {
    grid.pairing().ok_or(Error::UnpairedGrid)
}

/// `P_ℋ(Ω) = [(Ω ∪ σΩ) ∩ ℋ] ∪ [Ω ∩ σΩ]`, node by node.
pub fn polarize_mask(mask: &DomainMask) -> Result<DomainMask> {
    let grid = &mask.grid;
    let pairing = pairing_of(grid)?;
    let inside = (0..grid.len())
        .map(|i| {
            let j = pairing.partner[i];
            if pairing.polarizer.contains(grid.nodes[i]) {
                mask.inside[i] || mask.inside[j]
            } else {
                mask.inside[i] && mask.inside[j]
            }
        })
        .collect();
    DomainMask::new(grid.clone(), inside)
}

/// Lebesgue area of the symmetric difference of two masks on the same grid.
pub fn symmetric_difference_measure(a: &DomainMask, b: &DomainMask) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    Ok((0..a.inside.len())
        .filter(|&i| a.inside[i] != b.inside[i])
        .map(|i| a.grid.cell_area(i))
        .fold(0.0, |acc, x| acc + x))
}

/// Real samples on every node of a grid; implicitly zero off any support mask.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: Arc<QuadratureGrid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<QuadratureGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("field length differs from grid size"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field value".into()));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Arc<QuadratureGrid>) -> Self {
        let n = grid.len();
        ScalarField { grid, values: vec![0.0; n] }
    }

    /// `value` on the mask, zero elsewhere.
    pub fn constant_on(mask: &DomainMask, value: f64) -> Self {
        let values = mask.inside.iter().map(|&b| if b { value } else { 0.0 }).collect();
        ScalarField { grid: mask.grid.clone(), values }
    }

    pub fn from_fn<F: FnMut(usize, PointD) -> f64>(grid: Arc<QuadratureGrid>, mut f: F) -> Result<Self> {
        let values = grid.nodes.iter().enumerate().map(|(i, z)| f(i, *z)).collect();
        ScalarField::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        if !Arc::ptr_eq(&self.grid, &other.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ScalarField { grid: self.grid.clone(), values })
    }

    /// Zero every value outside `mask`.
    pub fn restrict(&self, mask: &DomainMask) -> Result<ScalarField> {
        if !Arc::ptr_eq(&self.grid, &mask.grid) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&mask.inside).map(|(&v, &b)| if b { v } else { 0.0 }).collect();
        Ok(ScalarField { grid: self.grid.clone(), values })
    }

    /// Whether the field vanishes at every node outside `mask`.
    pub fn supported_in(&self, mask: &DomainMask) -> bool {
        self.values.iter().zip(&mask.inside).all(|(&v, &b)| b || v == 0.0)
    }

    /// `f ∘ σ` on a paired grid.
    pub fn reflect(&self) -> Result<ScalarField> {
        let pairing = pairing_of(&self.grid)?;
        let values = pairing.partner.iter().map(|&j| self.values[j]).collect();
        Ok(ScalarField { grid: self.grid.clone(), values })
    }
}

/// `∫ f dτ ≈ Σ f_i w_i`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.values.iter().zip(&f.grid.weights).map(|(v, w)| v * w).sum()
}

/// `‖f‖_{L²} ≈ (Σ f_i² w_i)^{1/2}`.
pub fn l2_norm(f: &ScalarField) -> f64 {
    f.values.iter().zip(&f.grid.weights).map(|(v, w)| v * v * w).sum::<f64>().sqrt()
}

/// `P_ℋ f`: `max(f, f∘σ)` on `ℋ`, `min(f, f∘σ)` off it.
pub fn polarize_field(f: &ScalarField) -> Result<ScalarField> {
    let grid = &f.grid;
    let pairing = pairing_of(grid)?;
    let values = (0..grid.len())
        .map(|i| {
            let (a, b) = (f.values[i], f.values[pairing.partner[i]]);
            if pairing.polarizer.contains(grid.nodes[i]) {
                a.max(b)
            } else {
                a.min(b)
            }
        })
        .collect();
    Ok(ScalarField { grid: grid.clone(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeo::hyperbolic_disk_measure;

    fn arc_polarizer() -> Polarizer {
        Polarizer::new(Geodesic::arc(0.0, 0.5).unwrap(), Side::Negative).unwrap()
    }

    #[test]
    fn spec_json_shape() {
        let s = DomainSpec::disk((0.1, -0.2), 0.4).subtract((0.1, -0.2), 0.1);
        let j = s.to_json();
        assert_eq!(
            j,
            r#"{"disks":[{"cx":0.1,"cy":-0.2,"rho":0.4,"op":"union"},{"cx":0.1,"cy":-0.2,"rho":0.1,"op":"subtract"}]}"#
        );
        assert_eq!(DomainSpec::from_json(&j).unwrap(), s);
        assert!(DomainSpec::from_json(r#"{"disks":[{"cx":0,"cy":0,"rho":0.5,"op":"xor"}]}"#).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(DomainSpec { disks: vec![] }.build().is_err());
        assert!(DomainSpec::disk((0.0, 0.0), 1.0).build().is_err());
        assert!(DomainSpec::disk((1.0, 0.0), 0.2).build().is_err());
        let only_sub = DomainSpec { disks: vec![DiskTerm { cx: 0.0, cy: 0.0, rho: 0.3, op: SetOp::Subtract }] };
        assert!(only_sub.build().is_err());
    }

    #[test]
    fn grid_measure_converges_to_disk_measure() {
        let spec = DomainSpec::disk((0.0, 0.0), 0.5);
        let exact = hyperbolic_disk_measure(0.5).unwrap();
        let mut errs = Vec::new();
        for &h in &[0.02, 0.005] {
            let (grid, mask) = build_grid(&spec, h).unwrap();
            assert_eq!(mask.count(), grid.len());
            errs.push((grid.measure() - exact).abs());
        }
        assert!(errs[1] < 2e-3, "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn annulus_measure() {
        let spec = DomainSpec::disk((0.0, 0.0), 0.5).subtract((0.0, 0.0), 0.2);
        let (grid, _) = build_grid(&spec, 0.004).unwrap();
        let exact = 1.0 / 3.0 - 1.0 / 24.0;
        assert!((grid.measure() - exact).abs() < 2e-3, "{}", grid.measure());
    }

    #[test]
    fn too_few_nodes() {
        let spec = DomainSpec::disk((0.0, 0.0), 0.05);
        assert!(matches!(build_grid(&spec, 0.08), Err(Error::TooFewNodes { .. })));
        assert!(build_grid(&spec, 0.0).is_err());
    }

    #[test]
    fn lattice_weights() {
        let (grid, _) = build_grid(&DomainSpec::disk((0.2, 0.1), 0.3), 0.05).unwrap();
        for (z, w) in grid.nodes().iter().zip(grid.weights()) {
            let expect = 0.0025 / (PI * (1.0 - z.norm_sqr()).powi(2));
            assert!((w - expect).abs() < 1e-15 * expect);
        }
        assert!((grid.cell_area(0) - 0.0025).abs() < 1e-15);
    }

    #[test]
    fn paired_grid_structure() {
        let p = arc_polarizer();
        let (grid, mask) = build_paired_grid(&DomainSpec::disk((0.3, 0.0), 0.25), 0.03, p).unwrap();
        let pairing = grid.pairing().unwrap();
        for i in 0..grid.len() {
            let j = pairing.partner[i];
            assert_eq!(pairing.partner[j], i);
            assert_eq!(grid.weights()[i], grid.weights()[j]);
            let s = p.geodesic.reflect(grid.nodes()[i]);
            assert!((s.z() - grid.nodes()[j].z()).norm() < 1e-14);
        }
        assert!(mask.count() >= MIN_NODES);
        assert!(mask.count() < grid.len());
    }

    #[test]
    fn symmetric_domain_mask_is_pairing_invariant() {
        // the disk centred on the real axis is symmetric about the real diameter
        let p = Polarizer::new(Geodesic::diameter(0.0).unwrap(), Side::Positive).unwrap();
        let (_, mask) = build_paired_grid(&DomainSpec::disk((0.2, 0.0), 0.3), 0.03, p).unwrap();
        assert_eq!(mask.reflect().unwrap(), mask);
        assert_eq!(polarize_mask(&mask).unwrap(), mask);
    }

    #[test]
    fn polarize_mask_cases() {
        let p = arc_polarizer();
        // Ω inside ℋ (the origin side)
        let (_, inner) = build_paired_grid(&DomainSpec::disk((-0.2, 0.1), 0.2), 0.03, p).unwrap();
        assert_eq!(polarize_mask(&inner).unwrap(), inner);
        // Ω on the far side, disjoint from its mirror image
        let (_, outer) = build_paired_grid(&DomainSpec::disk((0.8, 0.0), 0.3), 0.02, p).unwrap();
        let refl = outer.reflect().unwrap();
        assert!(outer.inside().iter().zip(refl.inside()).all(|(a, b)| !(a & b)));
        assert_eq!(polarize_mask(&outer).unwrap(), refl);
    }

    #[test]
    fn polarization_preserves_measure_and_is_idempotent() {
        let p = arc_polarizer();
        let (_, m) = build_paired_grid(&DomainSpec::disk((0.55, 0.1), 0.25), 0.02, p).unwrap();
        let pm = polarize_mask(&m).unwrap();
        assert_eq!(pm.count(), m.count());
        assert!((pm.measure() - m.measure()).abs() < 1e-12);
        assert_eq!(polarize_mask(&pm).unwrap(), pm);
        assert!(symmetric_difference_measure(&pm, &m).unwrap() > 0.0);
    }

    #[test]
    fn unpaired_grid_errors() {
        let (grid, mask) = build_grid(&DomainSpec::disk((0.0, 0.0), 0.3), 0.05).unwrap();
        assert!(matches!(polarize_mask(&mask), Err(Error::UnpairedGrid)));
        let f = ScalarField::zeros(grid);
        assert!(matches!(polarize_field(&f), Err(Error::UnpairedGrid)));
    }

    #[test]
    fn symmetric_difference_cases() {
        let (grid, m) = build_grid(&DomainSpec::disk((0.0, 0.0), 0.4), 0.05).unwrap();
        assert_eq!(symmetric_difference_measure(&m, &m).unwrap(), 0.0);
        let half_a: Vec<bool> = grid.nodes().iter().map(|z| z.re() < 0.0).collect();
        let half_b: Vec<bool> = half_a.iter().map(|b| !b).collect();
        let a = DomainMask::new(grid.clone(), half_a).unwrap();
        let b = DomainMask::new(grid.clone(), half_b).unwrap();
        let d = symmetric_difference_measure(&a, &b).unwrap();
        assert!((d - (a.area() + b.area())).abs() < 1e-14);
        let (_, other) = build_grid(&DomainSpec::disk((0.0, 0.0), 0.4), 0.05).unwrap();
        assert!(matches!(symmetric_difference_measure(&m, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn integrate_and_norm() {
        let spec = DomainSpec::disk((0.0, 0.0), 0.5);
        let (grid, mask) = build_grid(&spec, 0.005).unwrap();
        let one = ScalarField::constant_on(&mask, 1.0);
        assert!((integrate(&one) - 1.0 / 3.0).abs() < 2e-3);
        assert_eq!(integrate(&ScalarField::zeros(grid.clone())), 0.0);
        let f = ScalarField::from_fn(grid, |_, z| z.re() - 0.3 * z.im()).unwrap();
        assert!((l2_norm(&f.scaled(-2.5)) - 2.5 * l2_norm(&f)).abs() < 1e-15);
    }

    #[test]
    fn polarize_field_properties() {
        let p = arc_polarizer();
        let (grid, m) = build_paired_grid(&DomainSpec::disk((0.3, 0.0), 0.25), 0.03, p).unwrap();
        let f = ScalarField::from_fn(grid.clone(), |i, z| {
            if m.inside()[i] {
                1.0 + z.re() * z.im() + (i % 7) as f64
            } else {
                0.0
            }
        })
        .unwrap();
        let pf = polarize_field(&f).unwrap();
        assert!((l2_norm(&pf) - l2_norm(&f)).abs() < 1e-12);
        assert!(pf.supported_in(&polarize_mask(&m).unwrap()));
        // σ-symmetric nonnegative field is fixed
        let sym = f.add(&f.reflect().unwrap()).unwrap();
        assert_eq!(polarize_field(&sym).unwrap().values(), sym.values());
    }

    #[test]
    fn reflection_change_of_variables() {
        // Σ_{σ(E)} f w = Σ_E (f∘σ) w on a paired grid
        let p = Polarizer::new(Geodesic::arc(0.9, 0.35).unwrap(), Side::Positive).unwrap();
        let (grid, e) = build_paired_grid(&DomainSpec::disk((0.1, 0.2), 0.4), 0.03, p).unwrap();
        let f = ScalarField::from_fn(grid.clone(), |_, z| (3.0 * z.re()).sin() + z.im()).unwrap();
        let se = e.reflect().unwrap();
        let lhs = integrate(&f.restrict(&se).unwrap());
        let rhs = integrate(&f.reflect().unwrap().restrict(&e).unwrap());
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn geodesic_and_side_grammar() {
        let g: Geodesic = "arc:0:0.5".parse().unwrap();
        assert_eq!(g, Geodesic::arc(0.0, 0.5).unwrap());
        let d: Geodesic = "diam:1.2".parse().unwrap();
        assert_eq!(d, Geodesic::diameter(1.2).unwrap());
        assert!("arc:0".parse::<Geodesic>().is_err());
        assert!("line:0".parse::<Geodesic>().is_err());
        assert_eq!("pos".parse::<Side>().unwrap(), Side::Positive);
        assert!("on".parse::<Side>().is_err());
        assert!(Polarizer::new(g, Side::On).is_err());
    }
}
