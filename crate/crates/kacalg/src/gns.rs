//! Finite-dimensional GNS representations with respect to the trace inner
//! product <a, b> = tr(b* a), and the Jones projection as a matrix on L^2.

use std::sync::Arc;

use crate::algebra::{multiply, star, trace, AlgMap, AlgRef};
use crate::error::{KacError, Result};
use crate::linalg::{orthonormal_columns, Mat, Vect};
use crate::scalar::{C64, ONE, RANK_TOL};

/// GNS data: a trace-orthonormal basis of the algebra, plus the coordinate
/// transforms between algebra coefficients and L^2 coordinates.
pub struct GnsRep {
    pub alg: AlgRef,
    pub onb: Vec<Vect>,
    /// column k = coefficients of the k-th ONB vector
    pub from_onb: Mat,
    /// inverse transform: coefficients -> ONB coordinates
    pub to_onb: Mat,
}

pub fn gns(alg: &AlgRef) -> Result<GnsRep> {
    let n = alg.dim();
    let coords: Vec<Vect> = (0..n)
        .map(|i| {
            let mut v = Vect::zeros(n);
            v[i] = ONE;
            v
        })
        .collect();
    let onb = crate::algebra::trace_onb(alg.as_ref(), &coords, 1e-10);
    if onb.len() != n {
        return Err(KacError::Solver(format!(
            "trace on {} is not faithful: Gram rank {} < {}",
            alg.label(),
            onb.len(),
            n
        )));
    }
    let mut from_onb = Mat::zeros(n, n);
    for (k, o) in onb.iter().enumerate() {
        from_onb.set_column(k, o);
    }
    let to_onb = from_onb
        .clone()
        .try_inverse()
        .ok_or_else(|| KacError::Solver("GNS basis not invertible".into()))?;
    Ok(GnsRep {
        alg: Arc::clone(alg),
        onb,
        from_onb,
        to_onb,
    })
}

impl GnsRep {
    pub fn dim(&self) -> usize {
        self.onb.len()
    }

    /// L^2 coordinates of an algebra element.
    pub fn coords(&self, v: &Vect) -> Vect {
        &self.to_onb * v
    }

    /// Matrix of left multiplication by `v` in the orthonormal basis.
    pub fn left_mult(&self, v: &Vect) -> Mat {
        let lm = crate::algebra::left_mult_matrix(self.alg.as_ref(), v);
        &self.to_onb * lm * &self.from_onb
    }

    /// The vacuum vector, the image of the unit.
    pub fn vacuum(&self) -> Vect {
        self.coords(&self.alg.unit())
    }

    /// tr(a) = <λ(a) Ω, Ω>; returns the worst residual over basis elements.
    pub fn vacuum_trace_residual(&self) -> f64 {
        let omega = self.vacuum();
        let n = self.alg.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut v = Vect::zeros(n);
            v[i] = ONE;
            let lm = self.left_mult(&v);
            let lhs = (&lm * &omega).dotc(&omega).conj();
            let rhs = self.alg.trace_basis(i);
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    /// Worst residual of λ(a*) = λ(a)^† over the coordinate basis.
    pub fn star_compatibility_residual(&self) -> f64 {
        let n = self.alg.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            let mut v = Vect::zeros(n);
            v[i] = ONE;
            let lhs = self.left_mult(&star(self.alg.as_ref(), &v));
            let rhs = self.left_mult(&v).adjoint();
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    /// Worst residual of λ(a)λ(b) = λ(ab) over basis pairs.
    pub fn multiplicativity_residual(&self) -> f64 {
        let n = self.alg.dim();
        let mats: Vec<Mat> = (0..n)
            .map(|i| {
                let mut v = Vect::zeros(n);
                v[i] = ONE;
                self.left_mult(&v)
            })
            .collect();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut prod = Vect::zeros(n);
                for (k, c) in self.alg.mul_basis(i, j) {
                    prod[k] += c;
                }
                let lhs = &mats[i] * &mats[j];
                let rhs = self.left_mult(&prod);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }
}

/// The Jones projection of a unital inclusion A ⊆ B as the orthogonal
/// projection of L^2(B) onto the closure of A·Ω.
pub fn jones_projection(gns_b: &GnsRep, incl: &AlgMap) -> Result<Mat> {
    if !Arc::ptr_eq(&incl.dst, &gns_b.alg) {
        return Err(KacError::AmbientMismatch(
            "inclusion target must be the GNS algebra".into(),
        ));
    }
    let cols: Vec<Vect> = (0..incl.src.dim())
        .map(|j| gns_b.coords(&incl.column(j)))
        .collect();
    let basis = orthonormal_columns(&cols, RANK_TOL);
    let n = gns_b.dim();
    let mut p = Mat::zeros(n, n);
    for b in &basis {
        p += b * b.adjoint();
    }
    Ok(p)
}

/// Report for the matrix-level Jones projection checks.
#[derive(Clone, Debug)]
pub struct JonesMatrixReport {
    pub projection_residual: f64,
    pub commutes_with_subalgebra: f64,
    pub implements_expectation: f64,
    pub normalized_trace: f64,
}

/// Check the defining properties of the GNS Jones projection: p = p* = p^2,
/// [p, λ(a)] = 0, and p λ(b) p = λ(E_A(b)) p.
pub fn check_jones_projection(gns_b: &GnsRep, incl: &AlgMap, p: &Mat) -> Result<JonesMatrixReport> {
    let alg = gns_b.alg.as_ref();
    let proj_res = (p * p - p).norm().max((p.adjoint() - p).norm());
    let mut comm = 0.0f64;
    for j in 0..incl.src.dim() {
        let la = gns_b.left_mult(&incl.column(j));
        comm = comm.max((&la * p - p * &la).norm());
    }
    // E_A(b) via the trace-orthogonal projection onto the image of A
    let image: Vec<Vect> = (0..incl.src.dim()).map(|j| incl.column(j)).collect();
    let onb = crate::algebra::trace_onb(alg, &image, 1e-10);
    let n = gns_b.dim();
    let mut imp = 0.0f64;
    for i in 0..n {
        let mut v = Vect::zeros(n);
        v[i] = ONE;
        let lb = gns_b.left_mult(&v);
        let ea = crate::algebra::conditional_expectation(alg, &onb, &v);
        let lea = gns_b.left_mult(&ea);
        imp = imp.max((p * lb * p - lea * p).norm());
    }
    let tracep: C64 = p.diagonal().iter().copied().sum();
    Ok(JonesMatrixReport {
        projection_residual: proj_res,
        commutes_with_subalgebra: comm,
        implements_expectation: imp,
        normalized_trace: (tracep / crate::scalar::cr(n as f64)).re,
    })
}

/// Trace-preserving conditional expectation onto the image of an inclusion,
/// as an ambient endomorphism built from a trace-ONB of the image. This is
/// the generic (GNS) route; interval trace-out formulas are checked against it.
pub fn expectation_onto_image(ambient: &AlgRef, incl: &AlgMap) -> Result<Mat> {
    if !Arc::ptr_eq(&incl.dst, ambient) {
        return Err(KacError::AmbientMismatch(
            "inclusion target must be the ambient algebra".into(),
        ));
    }
    let image: Vec<Vect> = (0..incl.src.dim()).map(|j| incl.column(j)).collect();
    let onb = crate::algebra::trace_onb(ambient.as_ref(), &image, 1e-10);
    let n = ambient.dim();
    let mut mat = Mat::zeros(n, n);
    for o in &onb {
        let os = star(ambient.as_ref(), o);
        // row functional: tr(o* e_j)
        let mut row = Vect::zeros(n);
        for j in 0..n {
            let mut ej = Vect::zeros(n);
            ej[j] = ONE;
            row[j] = trace(ambient.as_ref(), &multiply(ambient.as_ref(), &os, &ej));
        }
        mat += o * row.transpose();
    }
    Ok(mat)
}
