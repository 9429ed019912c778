//! The kernel `K(z, w) = ½ log(1/[z, w])`, its Nyström matrix, potentials and energies.
//!
//! The discrete operator acts on nodal values `u_i` by
//! `(L u)_i = Σ_j K_ij u_j w_j`. It is stored in the symmetrized form
//! `B = W^{1/2} K W^{1/2}`, which has the same spectrum and orthonormal
//! eigenvectors `v = √w ∘ u`.
//!
//! The kernel is singular on the diagonal. A node's self term is the mean of
//! `K(z, ·)` over the hyperbolic disk around `z` whose hyperbolic measure is
//! the node weight; see [`diagonal_value`] and [`self_kernel`].

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::domain::{DomainMask, QuadratureGrid, ScalarField, MIN_NODES};
use crate::error::{invalid, Error, Result};
use crate::hypgeo::{pseudo_distance_c, PointD};

/// `½ log(1/[z, w])` for distinct points.
pub fn kernel(z: PointD, w: PointD) -> Result<f64> {
    let d = pseudo_distance_c(z.z(), w.z());
    if d == 0.0 {
        return Err(Error::SingularKernel);
    }
    Ok(-0.5 * d.ln())
}

#[inline]
fn kernel_c(z: Complex64, w: Complex64) -> f64 {
    -0.5 * pseudo_distance_c(z, w).ln()
}

/// Mean of `log(1/[z, ·])` over a hyperbolic disk `Δ_ρ(z)` of hyperbolic measure `weight`.
///
/// With `τ = ρ²/(1 − ρ²) = weight`, this is
/// `F(ρ)/τ` where `F(ρ) = ρ² log(1/ρ)/(1 − ρ²) − ½ log(1 − ρ²)`,
/// evaluated here as `½ log((1 + w)/w) + log(1 + w)/(2w)`.
pub fn diagonal_value(weight: f64) -> Result<f64> {
    if !(weight.is_finite() && weight > 0.0) {
        return Err(invalid(format!("diagonal weight {weight} must be positive")));
    }
    let w = weight;
    Ok(0.5 * (w.ln_1p() - w.ln()) + 0.5 * w.ln_1p() / w)
}

/// Radius `ρ` of the hyperbolic disk of measure `weight`: `ρ² = w/(1 + w)`.
pub fn matched_radius(weight: f64) -> f64 {
    (weight / (1.0 + weight)).sqrt()
}

/// Self-interaction `K_ii = ½ diagonal_value(w_i)`, the mean of `K` over the matched disk.
pub fn self_kernel(weight: f64) -> Result<f64> {
    Ok(0.5 * diagonal_value(weight)?)
}

/// Symmetric Nyström matrix of the operator on the inside nodes of a mask.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    grid: Arc<QuadratureGrid>,
    indices: Vec<usize>,
    sqrt_w: Vec<f64>,
    b: Vec<f64>,
}

/// Assembles `B_ij = √w_i K(z_i, z_j) √w_j` with the self term on the diagonal.
pub fn assemble(mask: &DomainMask) -> Result<DiscreteOperator> {
    let grid = mask.grid().clone();
    let indices = mask.indices();
    let n = indices.len();
    if n < MIN_NODES {
        return Err(Error::TooFewNodes { found: n, required: MIN_NODES });
    }
    let z: Vec<Complex64> = indices.iter().map(|&i| grid.nodes()[i].z()).collect();
    let w: Vec<f64> = indices.iter().map(|&i| grid.weights()[i]).collect();
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        b[i * n + i] = w[i] * self_kernel(w[i])?;
        for j in 0..i {
            let d = pseudo_distance_c(z[i], z[j]);
            if d == 0.0 {
                return Err(Error::SingularKernel);
            }
            let v = sqrt_w[i] * (-0.5 * d.ln()) * sqrt_w[j];
            b[i * n + j] = v;
            b[j * n + i] = v;
        }
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("operator entry".into()));
    }
    Ok(DiscreteOperator { grid, indices, sqrt_w, b })
}

impl DiscreteOperator {
    pub fn n(&self) -> usize {
        self.indices.len()
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    /// Grid indices of the operator's rows, in order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sqrt_weights(&self) -> &[f64] {
        &self.sqrt_w
    }

    /// Row-major `n × n` matrix `B`.
    pub fn matrix(&self) -> &[f64] {
        &self.b
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.n() + j]
    }

    /// `y = B x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        for (row, yi) in self.b.chunks_exact(n).zip(y.iter_mut()) {
            *yi = dot(row, x);
        }
    }

    /// Frobenius norm of `B`, an upper bound for its spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.b.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `√w ∘ u` on the operator's nodes; errors if `u` lives on another grid or
    /// is nonzero outside the operator's nodes.
    pub fn symmetrized(&self, u: &ScalarField) -> Result<Vec<f64>> {
        if !Arc::ptr_eq(u.grid(), &self.grid) {
            return Err(Error::GridMismatch);
        }
        let mut inside = vec![false; self.grid.len()];
        for &i in &self.indices {
            inside[i] = true;
        }
        if u.values().iter().zip(&inside).any(|(&v, &b)| !b && v != 0.0) {
            return Err(invalid("field is supported outside the operator's domain"));
        }
        Ok(self.indices.iter().zip(&self.sqrt_w).map(|(&i, s)| s * u.values()[i]).collect())
    }

    /// Field with `u_i = x_i / √w_i` on the operator's nodes and zero elsewhere.
    pub fn unsymmetrize(&self, x: &[f64]) -> Result<ScalarField> {
        let mut values = vec![0.0; self.grid.len()];
        for ((&i, s), v) in self.indices.iter().zip(&self.sqrt_w).zip(x) {
            values[i] = v / s;
        }
        ScalarField::new(self.grid.clone(), values)
    }

    /// Writes `n` as a little-endian `u64` followed by `B` as row-major little-endian `f64`.
    pub fn dump(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(&(self.n() as u64).to_le_bytes())?;
        for x in &self.b {
            out.write_all(&x.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reads a matrix written by [`DiscreteOperator::dump`]: `(n, row-major entries)`.
pub fn read_dump(path: &Path) -> Result<(usize, Vec<f64>)> {
    let mut input = BufReader::new(File::open(path)?);
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    let n = u64::from_le_bytes(buf) as usize;
    let mut b = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        input.read_exact(&mut buf)?;
        b.push(f64::from_le_bytes(buf));
    }
    Ok((n, b))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators let the compiler vectorize
    let mut s = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            s[k] += x[k] * y[k];
        }
    }
    (s[0] + s[1]) + (s[2] + s[3]) + tail
}

/// `Σ_j K(z, z_j) f_j w_j` over the field's grid, anywhere in the disk.
///
/// A node that coincides with `z` contributes its self term instead.
pub fn apply_potential(f: &ScalarField, z: PointD) -> f64 {
    let grid = f.grid();
    let zc = z.z();
    let mut total = 0.0;
    for ((node, &w), &v) in grid.nodes().iter().zip(grid.weights()).zip(f.values()) {
        if v == 0.0 {
            continue;
        }
        let d = pseudo_distance_c(zc, node.z());
        let k = if d == 0.0 { self_kernel(w).expect("grid weights are positive") } else { -0.5 * d.ln() };
        total += k * v * w;
    }
    total
}

/// `E(u, v) = Σ_ij K_ij u_i v_j w_i w_j = (√w∘u)ᵀ B (√w∘v)`.
pub fn energy(op: &DiscreteOperator, u: &ScalarField, v: &ScalarField) -> Result<f64> {
    let x = op.symmetrized(u)?;
    let y = op.symmetrized(v)?;
    let mut by = vec![0.0; y.len()];
    op.matvec(&y, &mut by);
    Ok(dot(&x, &by))
}

/// The same bilinear form as [`energy`], summed pair by pair from the kernel
/// over every node of the grid without forming a matrix.
pub fn direct_energy(u: &ScalarField, v: &ScalarField) -> Result<f64> {
    if !Arc::ptr_eq(u.grid(), v.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = u.grid();
    let nodes = grid.nodes();
    let w = grid.weights();
    let (uv, vv) = (u.values(), v.values());
    let mut total = 0.0;
    for i in 0..nodes.len() {
        if uv[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..nodes.len() {
            if vv[j] == 0.0 {
                continue;
            }
            let k = if i == j { self_kernel(w[j])? } else { kernel_c(nodes[i].z(), nodes[j].z()) };
            row += k * vv[j] * w[j];
        }
        total += uv[i] * w[i] * row;
    }
    Ok(total)
}
