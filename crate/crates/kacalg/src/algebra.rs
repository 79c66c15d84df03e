//! A common interface for the finite-dimensional *-algebras-with-trace the
//! tower machinery works with: interval algebras, tensor pairs of intervals,
//! and plain Kac algebras under their regular trace.

use std::sync::Arc;

use crate::error::{KacError, Result};
use crate::kac::{KacAlgebra, SparseVec};
use crate::linalg::{Mat, Vect};
use crate::scalar::{C64, ONE, ZERO};

pub trait TracedAlgebra: Send + Sync + 'static {
    fn dim(&self) -> usize;
    fn label(&self) -> String;
    fn unit(&self) -> Vect;
    /// e_i · e_j as a sparse coefficient vector.
    fn mul_basis(&self, i: usize, j: usize) -> SparseVec;
    /// (e_i)^* as a sparse coefficient vector.
    fn star_basis(&self, i: usize) -> SparseVec;
    /// Normalised trace of e_i.
    fn trace_basis(&self, i: usize) -> C64;
    fn as_any(&self) -> &dyn std::any::Any;
}

pub type AlgRef = Arc<dyn TracedAlgebra>;

pub fn multiply(alg: &dyn TracedAlgebra, a: &Vect, b: &Vect) -> Vect {
    let mut out = Vect::zeros(alg.dim());
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm() <= 1e-300 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj.norm() <= 1e-300 {
                continue;
            }
            let prod = alg.mul_basis(i, j);
            let w = ai * bj;
            for (k, c) in prod {
                out[k] += w * c;
            }
        }
    }
    out
}

pub fn star(alg: &dyn TracedAlgebra, a: &Vect) -> Vect {
    let mut out = Vect::zeros(alg.dim());
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm() <= 1e-300 {
            continue;
        }
        let s = alg.star_basis(i);
        let w = ai.conj();
        for (k, c) in s {
            out[k] += w * c;
        }
    }
    out
}

pub fn trace(alg: &dyn TracedAlgebra, a: &Vect) -> C64 {
    a.iter()
        .enumerate()
        .map(|(i, &ai)| ai * alg.trace_basis(i))
        .sum()
}

/// Trace inner product <x, y> = tr(y* x).
pub fn trace_inner(alg: &dyn TracedAlgebra, x: &Vect, y: &Vect) -> C64 {
    let ys = star(alg, y);
    trace(alg, &multiply(alg, &ys, x))
}

/// Matrix of left multiplication by `v` on coefficient vectors.
pub fn left_mult_matrix(alg: &dyn TracedAlgebra, v: &Vect) -> Mat {
    let n = alg.dim();
    let mut m = Mat::zeros(n, n);
    for (i, &vi) in v.iter().enumerate() {
        if vi.norm() <= 1e-300 {
            continue;
        }
        for j in 0..n {
            for (k, c) in alg.mul_basis(i, j) {
                m[(k, j)] += vi * c;
            }
        }
    }
    m
}

/// Matrix of right multiplication by `v`.
pub fn right_mult_matrix(alg: &dyn TracedAlgebra, v: &Vect) -> Mat {
    let n = alg.dim();
    let mut m = Mat::zeros(n, n);
    for (j, &vj) in v.iter().enumerate() {
        if vj.norm() <= 1e-300 {
            continue;
        }
        for i in 0..n {
            for (k, c) in alg.mul_basis(i, j) {
                m[(k, i)] += vj * c;
            }
        }
    }
    m
}

/// Gram-Schmidt with respect to the trace inner product; drops dependent
/// vectors. Returns a trace-orthonormal basis of the span.
pub fn trace_onb(alg: &dyn TracedAlgebra, vectors: &[Vect], tol: f64) -> Vec<Vect> {
    let mut basis: Vec<Vect> = Vec::new();
    let mut stars: Vec<Vect> = Vec::new();
    let scale = vectors
        .iter()
        .map(|v| trace_inner(alg, v, v).re.abs().sqrt())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return basis;
    }
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for (b, bs) in basis.iter().zip(stars.iter()) {
                // <w, b> = tr(b* w)
                let coeff = trace(alg, &multiply(alg, bs, &w));
                w.axpy(-coeff, b, ONE);
            }
        }
        let nrm2 = trace(alg, &multiply(alg, &star(alg, &w), &w)).re;
        if nrm2.max(0.0).sqrt() > tol * scale {
            let w = w / crate::scalar::cr(nrm2.sqrt());
            stars.push(star(alg, &w));
            basis.push(w);
        }
    }
    basis
}

/// Trace-preserving conditional expectation onto the span of a trace-ONB.
pub fn conditional_expectation(alg: &dyn TracedAlgebra, onb: &[Vect], x: &Vect) -> Vect {
    let mut out = Vect::zeros(alg.dim());
    for b in onb {
        let bs = star(alg, b);
        let coeff = trace(alg, &multiply(alg, &bs, x));
        out.axpy(coeff, b, ONE);
    }
    out
}

/// A linear map between algebras, stored densely as dst.dim x src.dim.
#[derive(Clone)]
pub struct AlgMap {
    pub src: AlgRef,
    pub dst: AlgRef,
    pub mat: Mat,
}

impl AlgMap {
    pub fn new(src: &AlgRef, dst: &AlgRef, mat: Mat) -> Self {
        assert_eq!(mat.nrows(), dst.dim());
        assert_eq!(mat.ncols(), src.dim());
        AlgMap {
            src: Arc::clone(src),
            dst: Arc::clone(dst),
            mat,
        }
    }

    pub fn identity(alg: &AlgRef) -> Self {
        AlgMap {
            src: Arc::clone(alg),
            dst: Arc::clone(alg),
            mat: Mat::identity(alg.dim(), alg.dim()),
        }
    }

    pub fn apply(&self, v: &Vect) -> Vect {
        &self.mat * v
    }

    pub fn column(&self, j: usize) -> Vect {
        self.mat.column(j).into_owned()
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &AlgMap) -> Result<AlgMap> {
        if !Arc::ptr_eq(&self.src, &other.dst) {
            return Err(KacError::AmbientMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.src.label(),
                self.dst.label(),
                other.src.label(),
                other.dst.label()
            )));
        }
        Ok(AlgMap {
            src: Arc::clone(&other.src),
            dst: Arc::clone(&self.dst),
            mat: &self.mat * &other.mat,
        })
    }

    /// Worst residual of multiplicativity over all basis pairs of the source.
    pub fn multiplicativity_residual(&self) -> f64 {
        let n = self.src.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let ci = self.column(i);
            for j in 0..n {
                let cj = self.column(j);
                let lhs = {
                    let mut v = Vect::zeros(n);
                    for (k, c) in self.src.mul_basis(i, j) {
                        v[k] += c;
                    }
                    self.apply(&v)
                };
                let rhs = multiply(self.dst.as_ref(), &ci, &cj);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    pub fn unitality_residual(&self) -> f64 {
        (self.apply(&self.src.unit()) - self.dst.unit()).norm()
    }

    pub fn star_residual(&self) -> f64 {
        let n = self.src.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut s = Vect::zeros(n);
            for (k, c) in self.src.star_basis(i) {
                s[k] += c;
            }
            let lhs = self.apply(&s);
            let rhs = star(self.dst.as_ref(), &self.column(i));
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    pub fn trace_residual(&self) -> f64 {
        let n = self.src.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let lhs = self.src.trace_basis(i);
            let rhs = trace(self.dst.as_ref(), &self.column(i));
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    /// Injectivity: smallest singular value relative to the largest.
    pub fn injectivity_margin(&self) -> f64 {
        let svd = self.mat.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smax == 0.0 {
            0.0
        } else {
            smin / smax
        }
    }
}

/// A plain Kac algebra viewed with its normalised left-regular trace; used
/// for block decompositions of abstract algebras such as Drinfeld doubles.
pub struct RegularTraced {
    pub alg: Arc<KacAlgebra>,
    trace_vec: Vect,
}

impl RegularTraced {
    pub fn new(alg: &Arc<KacAlgebra>) -> Arc<Self> {
        let n = alg.dim;
        let mut tv = Vect::zeros(n);
        for g in 0..n {
            // normalised trace of left multiplication by e_g
            let mut t = ZERO;
            for j in 0..n {
                for &(k, c) in &alg.mul[g][j] {
                    if k == j {
                        t += c;
                    }
                }
            }
            tv[g] = t / crate::scalar::cr(n as f64);
        }
        Arc::new(RegularTraced {
            alg: Arc::clone(alg),
            trace_vec: tv,
        })
    }
}

impl TracedAlgebra for RegularTraced {
    fn dim(&self) -> usize {
        self.alg.dim
    }
    fn label(&self) -> String {
        self.alg.name.clone()
    }
    fn unit(&self) -> Vect {
        self.alg.unit.clone()
    }
    fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        self.alg.mul[i][j].clone()
    }
    fn star_basis(&self, i: usize) -> SparseVec {
        let n = self.alg.dim;
        let mut v = Vect::zeros(n);
        v[i] = ONE;
        crate::kac::sparse_from_dense(&self.alg.star(&v), 1e-300)
    }
    fn trace_basis(&self, i: usize) -> C64 {
        self.trace_vec[i]
    }
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// An element tagged with its ambient algebra; arithmetic checks ambients.
#[derive(Clone)]
pub struct AlgElement {
    pub alg: AlgRef,
    pub coeffs: Vect,
}

impl AlgElement {
    pub fn new(alg: &AlgRef, coeffs: Vect) -> Result<Self> {
        if coeffs.len() != alg.dim() {
            return Err(KacError::Dimension(format!(
                "coefficient length {} in {} of dimension {}",
                coeffs.len(),
                alg.label(),
                alg.dim()
            )));
        }
        Ok(AlgElement {
            alg: Arc::clone(alg),
            coeffs,
        })
    }

    pub fn mul(&self, other: &AlgElement) -> Result<AlgElement> {
        if !Arc::ptr_eq(&self.alg, &other.alg) {
            return Err(KacError::AmbientMismatch(format!(
                "{} vs {}",
                self.alg.label(),
                other.alg.label()
            )));
        }
        Ok(AlgElement {
            alg: Arc::clone(&self.alg),
            coeffs: multiply(self.alg.as_ref(), &self.coeffs, &other.coeffs),
        })
    }

    pub fn star(&self) -> AlgElement {
        AlgElement {
            alg: Arc::clone(&self.alg),
            coeffs: star(self.alg.as_ref(), &self.coeffs),
        }
    }

    pub fn trace(&self) -> C64 {
        trace(self.alg.as_ref(), &self.coeffs)
    }
}
