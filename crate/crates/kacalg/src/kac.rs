//! Finite-dimensional Kac algebras given by structure tensors over a fixed
//! basis: Hopf operations, axiom verification, integrals, duals and the
//! Fourier transform.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{KacError, Result};
use crate::linalg::{nullspace, Mat, Vect};
use crate::scalar::{cr, C64, ONE, TOL, ZERO};

/// Sparse coefficient vector: (basis index, coefficient), sorted by index.
pub type SparseVec = Vec<(usize, C64)>;
/// Sparse coproduct of one basis element: (left leg, right leg, coefficient).
pub type SparseComul = Vec<(usize, usize, C64)>;

pub fn sparse_from_dense(v: &Vect, tol: f64) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > tol)
        .map(|(i, z)| (i, *z))
        .collect()
}

pub fn dense_from_sparse(s: &SparseVec, dim: usize) -> Vect {
    let mut v = Vect::zeros(dim);
    for &(i, z) in s {
        v[i] += z;
    }
    v
}

/// The idempotent two-sided integrals of an algebra and its dual: `h` is the
/// integral of the algebra itself, `phi` the integral of the dual, stored as
/// the functional it induces on the algebra.
#[derive(Clone, Debug)]
pub struct Integrals {
    pub h: Vect,
    pub phi: Vect,
}

/// A finite-dimensional Kac algebra presented by structure constants.
///
/// `mul[i][j]` is the coefficient vector of `e_i e_j`, `comul[i]` the sparse
/// expansion of `Δ(e_i)`, `antipode`/`star` act on coefficient vectors (star
/// after entrywise conjugation). `delta` is the positive square root of the
/// dimension.
pub struct KacAlgebra {
    pub name: String,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub mul: Vec<Vec<SparseVec>>,
    pub unit: Vect,
    pub comul: Vec<SparseComul>,
    pub counit: Vect,
    pub antipode: Mat,
    pub star_mat: Mat,
    pub delta: f64,
    pub integrals: Option<Integrals>,
}

impl std::fmt::Debug for KacAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "KacAlgebra({}, dim {})", self.name, self.dim)
    }
}

/// A coefficient vector tagged with its ambient algebra.
#[derive(Clone)]
pub struct Element {
    pub algebra: Arc<KacAlgebra>,
    pub coeffs: Vect,
}

impl Element {
    pub fn new(algebra: &Arc<KacAlgebra>, coeffs: Vect) -> Result<Self> {
        if coeffs.len() != algebra.dim {
            return Err(KacError::Dimension(format!(
                "element of length {} in algebra {} of dimension {}",
                coeffs.len(),
                algebra.name,
                algebra.dim
            )));
        }
        Ok(Element {
            algebra: Arc::clone(algebra),
            coeffs,
        })
    }

    pub fn basis(algebra: &Arc<KacAlgebra>, i: usize) -> Self {
        let mut v = Vect::zeros(algebra.dim);
        v[i] = ONE;
        Element {
            algebra: Arc::clone(algebra),
            coeffs: v,
        }
    }

    pub fn unit(algebra: &Arc<KacAlgebra>) -> Self {
        Element {
            algebra: Arc::clone(algebra),
            coeffs: algebra.unit.clone(),
        }
    }

    fn same_ambient(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(KacError::AmbientMismatch(format!(
                "{} vs {}",
                self.algebra.name, other.algebra.name
            )))
        }
    }

    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.same_ambient(other)?;
        Ok(Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.algebra.multiply(&self.coeffs, &other.coeffs),
        })
    }

    pub fn star(&self) -> Element {
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.algebra.star(&self.coeffs),
        }
    }

    pub fn antipode(&self) -> Element {
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.algebra.apply_antipode(&self.coeffs),
        }
    }

    pub fn counit(&self) -> C64 {
        self.algebra.counit_of(&self.coeffs)
    }
}

/// `Δ_m(a)` as a sparse tensor with `m+1` legs over the algebra basis.
#[derive(Clone, Debug)]
pub struct SparseTensor {
    pub legs: usize,
    pub dim: usize,
    pub terms: Vec<(Vec<usize>, C64)>,
}

impl KacAlgebra {
    pub fn multiply(&self, a: &Vect, b: &Vect) -> Vect {
        let mut out = Vect::zeros(self.dim);
        for (i, &ai) in a.iter().enumerate() {
            if ai.norm() <= 1e-300 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj.norm() <= 1e-300 {
                    continue;
                }
                for &(k, c) in &self.mul[i][j] {
                    out[k] += ai * bj * c;
                }
            }
        }
        out
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.mul[i][j]
    }

    /// Δ(a) as a dense vector over the tensor-square basis, index `i*dim + j`.
    pub fn comultiply(&self, a: &Vect) -> Vect {
        let mut out = Vect::zeros(self.dim * self.dim);
        for (i, &ai) in a.iter().enumerate() {
            if ai.norm() <= 1e-300 {
                continue;
            }
            for &(p, q, c) in &self.comul[i] {
                out[p * self.dim + q] += ai * c;
            }
        }
        out
    }

    pub fn counit_of(&self, a: &Vect) -> C64 {
        self.counit.iter().zip(a.iter()).map(|(e, x)| e * x).sum()
    }

    pub fn apply_antipode(&self, a: &Vect) -> Vect {
        &self.antipode * a
    }

    /// The star operation: conjugate coefficients, then apply the star matrix.
    pub fn star(&self, a: &Vect) -> Vect {
        &self.star_mat * a.map(|z| z.conj())
    }

    /// Left-nested iterated coproduct `Δ_m`, with `Δ_0 = id` and
    /// `Δ_m = (Δ ⊗ id^{⊗(m-1)}) ∘ Δ_{m-1}`.
    pub fn iterated_coproduct(&self, a: &Vect, m: usize) -> SparseTensor {
        let mut terms: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
        for (i, &ai) in a.iter().enumerate() {
            if ai.norm() > 1e-300 {
                *terms.entry(vec![i]).or_insert(ZERO) += ai;
            }
        }
        for _ in 0..m {
            let mut next: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
            for (legs, coeff) in &terms {
                // split the leftmost leg
                for &(p, q, c) in &self.comul[legs[0]] {
                    let mut nl = Vec::with_capacity(legs.len() + 1);
                    nl.push(p);
                    nl.push(q);
                    nl.extend_from_slice(&legs[1..]);
                    *next.entry(nl).or_insert(ZERO) += coeff * c;
                }
            }
            terms = next;
        }
        SparseTensor {
            legs: m + 1,
            dim: self.dim,
            terms: terms
                .into_iter()
                .filter(|(_, c)| c.norm() > 1e-14)
                .collect(),
        }
    }

    /// The coefficient-functional pairing `<e*_i, a> = a_i` extended to a
    /// functional vector `f`: evaluates `f(a)`.
    pub fn pair(f: &Vect, a: &Vect) -> C64 {
        f.iter().zip(a.iter()).map(|(x, y)| x * y).sum()
    }

    /// Solve for the unique idempotent two-sided integral.
    pub fn integral(&self) -> Result<Vect> {
        let n = self.dim;
        // stack (L_a - eps(a) I) and (R_a - eps(a) I) over all basis a
        let mut rows = Mat::zeros(2 * n * n, n);
        for g in 0..n {
            let eps = self.counit[g];
            for t in 0..n {
                for &(k, c) in &self.mul[g][t] {
                    rows[(g * n + k, t)] += c;
                }
                rows[(g * n + t, t)] -= eps;
                for &(k, c) in &self.mul[t][g] {
                    rows[(n * n + g * n + k, t)] += c;
                }
                rows[(n * n + g * n + t, t)] -= eps;
            }
        }
        let ns = nullspace(&rows, 1e-10);
        if ns.len() != 1 {
            return Err(KacError::Integral(format!(
                "integral space of {} has dimension {}, expected 1",
                self.name,
                ns.len()
            )));
        }
        let t = &ns[0];
        // normalise so that t^2 = t; possible iff eps(t) != 0
        let t2 = self.multiply(t, t);
        // t2 = gamma * t on the line
        let gamma = {
            let (idx, _) = t
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap();
            t2[idx] / t[idx]
        };
        if gamma.norm() < 1e-12 {
            return Err(KacError::Integral(format!(
                "integral of {} admits no idempotent normalisation",
                self.name
            )));
        }
        let h = t / gamma;
        let h2 = self.multiply(&h, &h);
        if (&h2 - &h).norm() > TOL {
            return Err(KacError::Integral(format!(
                "idempotent normalisation failed for {}",
                self.name
            )));
        }
        Ok(h)
    }

    /// Compute and attach the integrals (h of the algebra, phi of the dual).
    pub fn compute_integrals(self: &Arc<Self>) -> Result<Integrals> {
        if let Some(ints) = &self.integrals {
            return Ok(ints.clone());
        }
        let h = self.integral()?;
        let dual = dual_unattached(self);
        let phi = dual.integral()?;
        Ok(Integrals { h, phi })
    }

    pub fn integrals(&self) -> Result<&Integrals> {
        self.integrals
            .as_ref()
            .ok_or_else(|| KacError::Integral(format!("no integrals attached to {}", self.name)))
    }
}

/// Attach integrals eagerly; fails when the input is not a Kac algebra.
pub fn with_integrals(mut alg: KacAlgebra) -> Result<Arc<KacAlgebra>> {
    let tmp = Arc::new(KacAlgebra {
        integrals: None,
        ..clone_tensors(&alg)
    });
    let ints = tmp.compute_integrals()?;
    alg.integrals = Some(ints);
    Ok(Arc::new(alg))
}

fn clone_tensors(a: &KacAlgebra) -> KacAlgebra {
    KacAlgebra {
        name: a.name.clone(),
        dim: a.dim,
        basis_labels: a.basis_labels.clone(),
        mul: a.mul.clone(),
        unit: a.unit.clone(),
        comul: a.comul.clone(),
        counit: a.counit.clone(),
        antipode: a.antipode.clone(),
        star_mat: a.star_mat.clone(),
        delta: a.delta,
        integrals: a.integrals.clone(),
    }
}

/// The dual Kac algebra on the coordinate-dual basis: multiplication is the
/// transpose of Δ, comultiplication the transpose of multiplication.
pub fn dual(a: &Arc<KacAlgebra>) -> Result<Arc<KacAlgebra>> {
    with_integrals(dual_unattached(a))
}

fn dual_unattached(a: &KacAlgebra) -> KacAlgebra {
    let n = a.dim;
    // (e*_i . e*_j)(e_k) = (e*_i ⊗ e*_j)(Δ e_k)
    let mut mul = vec![vec![SparseVec::new(); n]; n];
    for k in 0..n {
        for &(p, q, c) in &a.comul[k] {
            mul[p][q].push((k, c));
        }
    }
    for row in mul.iter_mut() {
        for cell in row.iter_mut() {
            normalize_sparse(cell);
        }
    }
    // Δ(e*_k) = sum_{i,j} coeff of e_k in e_i e_j * (e*_i ⊗ e*_j)
    let mut comul = vec![SparseComul::new(); n];
    for i in 0..n {
        for j in 0..n {
            for &(k, c) in &a.mul[i][j] {
                if c.norm() > 1e-300 {
                    comul[k].push((i, j, c));
                }
            }
        }
    }
    // star of the dual: (f*)(x) = conj(f(S(x)*))
    let sbar = a.antipode.map(|z| z.conj());
    let star_dual = (a.star_mat.map(|z| z.conj()) * &sbar).transpose();
    KacAlgebra {
        name: format!("dual({})", a.name),
        dim: n,
        basis_labels: a.basis_labels.iter().map(|l| format!("{l}^")).collect(),
        mul,
        unit: a.counit.clone(),
        comul,
        counit: a.unit.clone(),
        antipode: a.antipode.transpose(),
        star_mat: star_dual,
        delta: a.delta,
        integrals: None,
    }
}

fn normalize_sparse(v: &mut SparseVec) {
    v.sort_by_key(|&(i, _)| i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for &(i, c) in v.iter() {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|&(_, c)| c.norm() > 1e-300);
    *v = out;
}

/// Fourier transform `F(a) = δ φ_1(a) φ_2` into the dual algebra.
pub fn fourier(a: &Arc<KacAlgebra>, dual_a: &Arc<KacAlgebra>, x: &Vect) -> Result<Vect> {
    let ints = a.integrals()?;
    let phi = &ints.phi; // integral of the dual, as element of dual
    let mut out = Vect::zeros(a.dim);
    // Δ_{H*}(φ) expanded in the dual algebra
    for (i, &pi) in phi.iter().enumerate() {
        if pi.norm() <= 1e-300 {
            continue;
        }
        for &(p, q, c) in &dual_a.comul[i] {
            // (e*_p)(x) = x_p
            out[q] += cr(a.delta) * pi * c * x[p];
        }
    }
    Ok(out)
}

/// Matrix of the Fourier transform on coefficient vectors.
pub fn fourier_matrix(a: &Arc<KacAlgebra>, dual_a: &Arc<KacAlgebra>) -> Result<Mat> {
    let n = a.dim;
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        let mut v = Vect::zeros(n);
        v[j] = ONE;
        let img = fourier(a, dual_a, &v)?;
        m.set_column(j, &img);
    }
    Ok(m)
}

/// One named axiom check with its worst residual.
#[derive(Clone, Debug)]
pub struct AxiomCheck {
    pub name: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub algebra: String,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    fn push(&mut self, name: &str, residual: f64, tol: f64) {
        self.checks.push(AxiomCheck {
            name: name.to_string(),
            residual,
            pass: residual < tol,
        });
    }
}

/// Verify every Kac-algebra axiom, reporting the worst residual per axiom.
pub fn verify_kac_axioms(a: &Arc<KacAlgebra>) -> AxiomReport {
    verify_kac_axioms_tol(a, TOL)
}

pub fn verify_kac_axioms_tol(a: &Arc<KacAlgebra>, tol: f64) -> AxiomReport {
    let n = a.dim;
    let mut rep = AxiomReport {
        algebra: a.name.clone(),
        checks: Vec::new(),
    };
    let basis: Vec<Vect> = (0..n)
        .map(|i| {
            let mut v = Vect::zeros(n);
            v[i] = ONE;
            v
        })
        .collect();

    // associativity
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let ij = a.multiply(&basis[i], &basis[j]);
            for k in 0..n {
                let jk = a.multiply(&basis[j], &basis[k]);
                let lhs = a.multiply(&ij, &basis[k]);
                let rhs = a.multiply(&basis[i], &jk);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    rep.push("associativity", worst, tol);

    // unit
    let mut worst = 0.0f64;
    for b in &basis {
        worst = worst.max((a.multiply(&a.unit, b) - b).norm());
        worst = worst.max((a.multiply(b, &a.unit) - b).norm());
    }
    rep.push("unit", worst, tol);

    // coassociativity, computed on sparse coproducts
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut lhs: BTreeMap<(usize, usize, usize), C64> = BTreeMap::new();
        let mut rhs: BTreeMap<(usize, usize, usize), C64> = BTreeMap::new();
        for &(p, q, c) in &a.comul[i] {
            for &(r, s, d) in &a.comul[p] {
                *lhs.entry((r, s, q)).or_insert(ZERO) += c * d;
            }
            for &(r, s, d) in &a.comul[q] {
                *rhs.entry((p, r, s)).or_insert(ZERO) += c * d;
            }
        }
        for (key, v) in &lhs {
            worst = worst.max((v - rhs.get(key).copied().unwrap_or(ZERO)).norm());
        }
        for (key, v) in &rhs {
            if !lhs.contains_key(key) {
                worst = worst.max(v.norm());
            }
        }
    }
    rep.push("coassociativity", worst, tol);

    // counit axiom (eps ⊗ id) Δ = id = (id ⊗ eps) Δ
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut left = Vect::zeros(n);
        let mut right = Vect::zeros(n);
        for &(p, q, c) in &a.comul[i] {
            left[q] += a.counit[p] * c;
            right[p] += a.counit[q] * c;
        }
        worst = worst.max((&left - &basis[i]).norm());
        worst = worst.max((&right - &basis[i]).norm());
    }
    rep.push("counit", worst, tol);

    // Δ is an algebra map
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut lhs: BTreeMap<(usize, usize), C64> = BTreeMap::new();
            for &(k, c) in &a.mul[i][j] {
                for &(p, q, d) in &a.comul[k] {
                    *lhs.entry((p, q)).or_insert(ZERO) += c * d;
                }
            }
            let mut rhs: BTreeMap<(usize, usize), C64> = BTreeMap::new();
            for &(p1, q1, c1) in &a.comul[i] {
                for &(p2, q2, c2) in &a.comul[j] {
                    for &(p, cp) in &a.mul[p1][p2] {
                        for &(q, cq) in &a.mul[q1][q2] {
                            *rhs.entry((p, q)).or_insert(ZERO) += c1 * c2 * cp * cq;
                        }
                    }
                }
            }
            for (key, v) in &lhs {
                worst = worst.max((v - rhs.get(key).copied().unwrap_or(ZERO)).norm());
            }
            for (key, v) in &rhs {
                if !lhs.contains_key(key) {
                    worst = worst.max(v.norm());
                }
            }
        }
    }
    // Δ(1) = 1 ⊗ 1
    {
        let d1 = a.comultiply(&a.unit);
        let mut expected = Vect::zeros(n * n);
        for (i, &ui) in a.unit.iter().enumerate() {
            for (j, &uj) in a.unit.iter().enumerate() {
                expected[i * n + j] = ui * uj;
            }
        }
        worst = worst.max((d1 - expected).norm());
    }
    rep.push("comultiplication is an algebra map", worst, tol);

    // eps is an algebra map
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let prod = a.multiply(&basis[i], &basis[j]);
            let lhs = a.counit_of(&prod);
            let rhs = a.counit[i] * a.counit[j];
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst = worst.max((a.counit_of(&a.unit) - ONE).norm());
    rep.push("counit is an algebra map", worst, tol);

    // antipode axiom m(S ⊗ id)Δ = eta eps = m(id ⊗ S)Δ
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut left = Vect::zeros(n);
        let mut right = Vect::zeros(n);
        for &(p, q, c) in &a.comul[i] {
            let sp = a.apply_antipode(&basis[p]);
            let sq = a.apply_antipode(&basis[q]);
            left += a.multiply(&sp, &basis[q]) * c;
            right += a.multiply(&basis[p], &sq) * c;
        }
        let target = a.unit.clone() * a.counit[i];
        worst = worst.max((&left - &target).norm());
        worst = worst.max((&right - &target).norm());
    }
    rep.push("antipode axiom", worst, tol);

    // S^2 = id
    let s2 = &a.antipode * &a.antipode;
    let eye = Mat::identity(n, n);
    rep.push("antipode is involutive", (&s2 - &eye).norm(), tol);

    // star: involutive antilinear anti-automorphism
    let mut worst = 0.0f64;
    for b in &basis {
        worst = worst.max((a.star(&a.star(b)) - b).norm());
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = a.star(&a.multiply(&basis[i], &basis[j]));
            let rhs = a.multiply(&a.star(&basis[j]), &a.star(&basis[i]));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst = worst.max((a.star(&a.unit) - &a.unit).norm());
    rep.push("star is an involutive anti-automorphism", worst, tol);

    // Δ(a*) = Δ(a)^{*⊗*}
    let mut worst = 0.0f64;
    for i in 0..n {
        let lhs = a.comultiply(&a.star(&basis[i]));
        let mut rhs = Vect::zeros(n * n);
        for &(p, q, c) in &a.comul[i] {
            let sp = a.star(&basis[p]);
            let sq = a.star(&basis[q]);
            for (u, &su) in sp.iter().enumerate() {
                if su.norm() <= 1e-300 {
                    continue;
                }
                for (v, &sv) in sq.iter().enumerate() {
                    rhs[u * n + v] += c.conj() * su * sv;
                }
            }
        }
        worst = worst.max((lhs - rhs).norm());
    }
    rep.push("comultiplication commutes with star", worst, tol);

    // S(a*) = S(a)* (holds for Kac algebras, where S^2 = id)
    let mut worst = 0.0f64;
    for b in &basis {
        let lhs = a.apply_antipode(&a.star(b));
        let rhs = a.star(&a.apply_antipode(b));
        worst = worst.max((lhs - rhs).norm());
    }
    rep.push("antipode commutes with star", worst, tol);

    // integrals: existence, idempotency, phi(h) = 1/dim
    match a.integral() {
        Ok(h) => {
            let mut worst = 0.0f64;
            for b in &basis {
                let lhs = a.multiply(b, &h);
                let rhs = h.clone() * a.counit_of(b);
                worst = worst.max((lhs - rhs).norm());
            }
            worst = worst.max((a.multiply(&h, &h) - &h).norm());
            rep.push("integral is idempotent and absorbing", worst, tol);
            let dual_alg = Arc::new(dual_unattached(a));
            match dual_alg.integral() {
                Ok(phi) => {
                    let pairing = KacAlgebra::pair(&phi, &h);
                    rep.push(
                        "phi(h) = 1/dim",
                        (pairing - cr(1.0 / n as f64)).norm(),
                        tol,
                    );
                }
                Err(_) => rep.push("phi(h) = 1/dim", f64::INFINITY, tol),
            }
        }
        Err(_) => rep.push("integral is idempotent and absorbing", f64::INFINITY, tol),
    }

    rep
}

/// Structural equality of two algebras presented over the same basis size.
pub fn tensors_equal(a: &KacAlgebra, b: &KacAlgebra, tol: f64) -> bool {
    if a.dim != b.dim {
        return false;
    }
    let n = a.dim;
    for i in 0..n {
        for j in 0..n {
            let va = dense_from_sparse(&a.mul[i][j], n);
            let vb = dense_from_sparse(&b.mul[i][j], n);
            if (va - vb).norm() > tol {
                return false;
            }
        }
    }
    if (&a.unit - &b.unit).norm() > tol || (&a.counit - &b.counit).norm() > tol {
        return false;
    }
    for i in 0..n {
        let mut da = Vect::zeros(n * n);
        for &(p, q, c) in &a.comul[i] {
            da[p * n + q] += c;
        }
        let mut db = Vect::zeros(n * n);
        for &(p, q, c) in &b.comul[i] {
            db[p * n + q] += c;
        }
        if (da - db).norm() > tol {
            return false;
        }
    }
    (&a.antipode - &b.antipode).norm() < tol && (&a.star_mat - &b.star_mat).norm() < tol
}

/// Algebra-only equality: multiplication tensor and unit.
pub fn algebra_tensors_equal(a: &KacAlgebra, b: &KacAlgebra, tol: f64) -> bool {
    if a.dim != b.dim {
        return false;
    }
    let n = a.dim;
    for i in 0..n {
        for j in 0..n {
            let va = dense_from_sparse(&a.mul[i][j], n);
            let vb = dense_from_sparse(&b.mul[i][j], n);
            if (va - vb).norm() > tol {
                return false;
            }
        }
    }
    (&a.unit - &b.unit).norm() < tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{function_algebra, group_algebra, GroupTable};

    fn basis_vec(n: usize, i: usize) -> Vect {
        let mut v = Vect::zeros(n);
        v[i] = ONE;
        v
    }

    /// Dense vector on the tensor square from sparse (left, right, coeff) terms.
    fn tensor2(n: usize, terms: &[(Vect, Vect, C64)]) -> Vect {
        let mut out = Vect::zeros(n * n);
        for (u, v, c) in terms {
            for (i, &ui) in u.iter().enumerate() {
                for (j, &vj) in v.iter().enumerate() {
                    out[i * n + j] += c * ui * vj;
                }
            }
        }
        out
    }

    #[test]
    fn group_multiplication_examples() {
        // C[Z_2]: g.g = 1
        let z2 = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let g = basis_vec(2, 1);
        assert!((z2.multiply(&g, &g) - &z2.unit).norm() < 1e-12);
        // C(Z_2): disjoint indicators multiply to zero
        let fz2 = function_algebra(&GroupTable::cyclic(2)).unwrap();
        let d_e = basis_vec(2, 0);
        let d_g = basis_vec(2, 1);
        assert!(fz2.multiply(&d_e, &d_g).norm() < 1e-12);
    }

    #[test]
    fn s3_cayley_oracle() {
        // Recompute the product of the transpositions (12) and (13) with an
        // independent brute-force composition, row acting first.
        let t = GroupTable::s3();
        let idx12 = t.labels.iter().position(|l| l == "(12)").unwrap();
        let idx13 = t.labels.iter().position(|l| l == "(13)").unwrap();
        // one-line notations
        let perms = [
            [0usize, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let p = perms[idx12];
        let q = perms[idx13];
        let composite = [q[p[0]], q[p[1]], q[p[2]]];
        let kidx = perms.iter().position(|r| *r == composite).unwrap();
        assert_eq!(t.cayley[idx12][idx13], kidx);
        assert_eq!(t.labels[kidx], "(123)");
        // and in the group algebra
        let s3 = group_algebra(&t).unwrap();
        let prod = s3.multiply(&basis_vec(6, idx12), &basis_vec(6, idx13));
        assert!((prod - basis_vec(6, kidx)).norm() < 1e-12);
    }

    #[test]
    fn comultiply_counit_antipode_examples() {
        let z2 = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let g = basis_vec(2, 1);
        // Δ(g) = g ⊗ g
        let dg = z2.comultiply(&g);
        let expected = tensor2(2, &[(g.clone(), g.clone(), ONE)]);
        assert!((dg - expected).norm() < 1e-12);
        assert!((z2.counit_of(&g) - ONE).norm() < 1e-12);
        assert!((z2.apply_antipode(&g) - &g).norm() < 1e-12);
        // unit axioms: S(1) = 1, Δ(1) = 1 ⊗ 1
        assert!((z2.apply_antipode(&z2.unit) - &z2.unit).norm() < 1e-12);
        let d1 = z2.comultiply(&z2.unit);
        let e11 = tensor2(2, &[(z2.unit.clone(), z2.unit.clone(), ONE)]);
        assert!((d1 - e11).norm() < 1e-12);
        // C(Z_2): Δ(δ_e) = δ_e ⊗ δ_e + δ_g ⊗ δ_g
        let fz2 = function_algebra(&GroupTable::cyclic(2)).unwrap();
        let de = basis_vec(2, 0);
        let dgv = basis_vec(2, 1);
        let lhs = fz2.comultiply(&de);
        let rhs = tensor2(2, &[(de.clone(), de.clone(), ONE), (dgv.clone(), dgv, ONE)]);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn iterated_coproduct_examples() {
        let z3 = group_algebra(&GroupTable::cyclic(3)).unwrap();
        let g = basis_vec(3, 1);
        // Δ_1 = Δ
        let d1 = z3.iterated_coproduct(&g, 1);
        assert_eq!(d1.terms, vec![(vec![1, 1], ONE)]);
        // Δ_2(g) = g ⊗ g ⊗ g
        let d2 = z3.iterated_coproduct(&g, 2);
        assert_eq!(d2.terms, vec![(vec![1, 1, 1], ONE)]);
        // coassociativity: right-nested equals left-nested on a function algebra
        let fz3 = function_algebra(&GroupTable::cyclic(3)).unwrap();
        for i in 0..3 {
            let b = basis_vec(3, i);
            let left = fz3.iterated_coproduct(&b, 2);
            // (id ⊗ Δ) Δ computed by splitting the rightmost leg
            let mut rhs: BTreeMap<Vec<usize>, C64> = BTreeMap::new();
            for &(p, q, c) in &fz3.comul[i] {
                for &(r, s, d) in &fz3.comul[q] {
                    *rhs.entry(vec![p, r, s]).or_insert(ZERO) += c * d;
                }
            }
            for (legs, c) in &left.terms {
                let r = rhs.get(legs).copied().unwrap_or(ZERO);
                assert!((c - r).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn axiom_suite_passes_and_catches_corruption() {
        let s3 = group_algebra(&GroupTable::s3()).unwrap();
        let rep = verify_kac_axioms(&s3);
        assert!(rep.pass(), "S3 axiom failures: {:?}", rep.checks);
        assert!(rep.max_residual() < 1e-9);
        // dual of a passing algebra passes
        let d = dual(&s3).unwrap();
        assert!(verify_kac_axioms(&d).pass());
        // corrupt the antipode: axiom must fail
        let mut bad = clone_tensors(&s3);
        bad.antipode[(0, 1)] += cr(0.5);
        let bad = Arc::new(bad);
        let rep = verify_kac_axioms(&bad);
        assert!(!rep.pass());
        assert!(rep
            .checks
            .iter()
            .any(|c| c.name.contains("antipode") && !c.pass));
    }

    #[test]
    fn integral_examples() {
        // C[Z_2] -> (1+g)/2
        let z2 = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let h = z2.integral().unwrap();
        let expected = Vect::from_vec(vec![cr(0.5), cr(0.5)]);
        assert!((h - expected).norm() < 1e-10);
        // C(Z_2) -> δ_e
        let fz2 = function_algebra(&GroupTable::cyclic(2)).unwrap();
        let hf = fz2.integral().unwrap();
        let expected = Vect::from_vec(vec![ONE, ZERO]);
        assert!((hf - expected).norm() < 1e-10);
        // φ(h) = 1/2 for n = 2
        let ints = z2.integrals().unwrap();
        assert!((KacAlgebra::pair(&ints.phi, &ints.h) - cr(0.5)).norm() < 1e-12);
        // absorption: a h = eps(a) h
        for i in 0..2 {
            let b = basis_vec(2, i);
            let lhs = z2.multiply(&b, &ints.h);
            let rhs = ints.h.clone() * z2.counit_of(&b);
            assert!((lhs - rhs).norm() < 1e-10);
        }
    }

    #[test]
    fn dual_constructions() {
        let t = GroupTable::s3();
        let s3 = group_algebra(&t).unwrap();
        let d = dual(&s3).unwrap();
        let f = function_algebra(&t).unwrap();
        assert!(tensors_equal(&d, &f, 1e-12), "dual(C[G]) = C(G)");
        assert_eq!(d.dim, s3.dim);
        let dd = dual(&d).unwrap();
        assert!(tensors_equal(&dd, &s3, 1e-12), "double dual is the identity");
    }

    #[test]
    fn fourier_examples_z2() {
        let z2 = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let dz2 = dual(&z2).unwrap();
        let sqrt2 = 2f64.sqrt();
        // F(1) = sqrt(2) δ_e
        let f1 = fourier(&z2, &dz2, &z2.unit).unwrap();
        let expected = Vect::from_vec(vec![cr(sqrt2), ZERO]);
        assert!((f1 - expected).norm() < 1e-10);
        // F(h) = (1/sqrt 2) 1_{H*}
        let ints = z2.integrals().unwrap();
        let fh = fourier(&z2, &dz2, &ints.h).unwrap();
        let expected = Vect::from_vec(vec![cr(1.0 / sqrt2), cr(1.0 / sqrt2)]);
        assert!((fh - expected).norm() < 1e-10);
    }

    #[test]
    fn fourier_squared_is_antipode() {
        for alg in [
            group_algebra(&GroupTable::cyclic(3)).unwrap(),
            group_algebra(&GroupTable::s3()).unwrap(),
        ] {
            let d = dual(&alg).unwrap();
            let f_h = fourier_matrix(&alg, &d).unwrap();
            let f_hstar = fourier_matrix(&d, &alg).unwrap();
            let composed = &f_hstar * &f_h;
            assert!(
                (composed - &alg.antipode).norm() < 1e-9,
                "F_H* F_H = S fails for {}",
                alg.name
            );
        }
    }

    #[test]
    fn fourier_is_deltascaled_multiplicative_on_coproducts() {
        // F(x_1) F(x_2) = δ F(x) on all basis x
        for alg in [
            group_algebra(&GroupTable::cyclic(2)).unwrap(),
            group_algebra(&GroupTable::s3()).unwrap(),
        ] {
            let d = dual(&alg).unwrap();
            let n = alg.dim;
            for i in 0..n {
                let mut lhs = Vect::zeros(n);
                for &(p, q, c) in &alg.comul[i] {
                    let fp = fourier(&alg, &d, &basis_vec(n, p)).unwrap();
                    let fq = fourier(&alg, &d, &basis_vec(n, q)).unwrap();
                    lhs += d.multiply(&fp, &fq) * c;
                }
                let rhs = fourier(&alg, &d, &basis_vec(n, i)).unwrap() * cr(alg.delta);
                assert!((lhs - rhs).norm() < 1e-9, "failed at basis {i} of {}", alg.name);
            }
        }
    }

    #[test]
    fn hopf_identities_with_integrals() {
        for alg in [
            group_algebra(&GroupTable::s3()).unwrap(),
            function_algebra(&GroupTable::s3()).unwrap(),
        ] {
            let dual_alg = dual(&alg).unwrap();
            let n = alg.dim;
            let ints = alg.integrals().unwrap();
            let h = &ints.h;
            let phi = &ints.phi;
            // Δ(φ) in the dual algebra, sparse
            let dphi = dual_alg.iterated_coproduct(phi, 1);
            // (a) f Sφ_1 ⊗ φ_2 = Sφ_1 ⊗ φ_2 f   in H* ⊗ H*
            // (b) φ_1 ⊗ φ_2 f = φ_1 Sf ⊗ φ_2
            for fi in 0..n {
                let f = basis_vec(n, fi);
                let mut lhs_a = Vect::zeros(n * n);
                let mut rhs_a = Vect::zeros(n * n);
                let mut lhs_b = Vect::zeros(n * n);
                let mut rhs_b = Vect::zeros(n * n);
                let sf = dual_alg.apply_antipode(&f);
                for (legs, c) in &dphi.terms {
                    let p1 = basis_vec(n, legs[0]);
                    let p2 = basis_vec(n, legs[1]);
                    let sp1 = dual_alg.apply_antipode(&p1);
                    let f_sp1 = dual_alg.multiply(&f, &sp1);
                    let p2_f = dual_alg.multiply(&p2, &f);
                    let p1_sf = dual_alg.multiply(&p1, &sf);
                    for (u, &cu) in f_sp1.iter().enumerate() {
                        for (v, &cv) in p2.iter().enumerate() {
                            lhs_a[u * n + v] += c * cu * cv;
                        }
                    }
                    for (u, &cu) in sp1.iter().enumerate() {
                        for (v, &cv) in p2_f.iter().enumerate() {
                            rhs_a[u * n + v] += c * cu * cv;
                        }
                    }
                    for (u, &cu) in p1.iter().enumerate() {
                        for (v, &cv) in p2_f.iter().enumerate() {
                            lhs_b[u * n + v] += c * cu * cv;
                        }
                    }
                    for (u, &cu) in p1_sf.iter().enumerate() {
                        for (v, &cv) in p2.iter().enumerate() {
                            rhs_b[u * n + v] += c * cu * cv;
                        }
                    }
                }
                assert!((lhs_a - rhs_a).norm() < 1e-9, "(a) fails for {}", alg.name);
                assert!((lhs_b - rhs_b).norm() < 1e-9, "(b) fails for {}", alg.name);
            }
            // (c) x h_1 ⊗ Sh_2 = h_1 ⊗ Sh_2 x  and (d) h_1 ⊗ h_2 = h_2 ⊗ h_1
            let dh = alg.iterated_coproduct(h, 1);
            let mut flip_res = Vect::zeros(n * n);
            for (legs, c) in &dh.terms {
                flip_res[legs[0] * n + legs[1]] += *c;
                flip_res[legs[1] * n + legs[0]] -= *c;
            }
            assert!(flip_res.norm() < 1e-9, "(d) fails for {}", alg.name);
            for xi in 0..n {
                let x = basis_vec(n, xi);
                let mut lhs = Vect::zeros(n * n);
                let mut rhs = Vect::zeros(n * n);
                for (legs, c) in &dh.terms {
                    let h1 = basis_vec(n, legs[0]);
                    let h2 = basis_vec(n, legs[1]);
                    let sh2 = alg.apply_antipode(&h2);
                    let xh1 = alg.multiply(&x, &h1);
                    let sh2x = alg.multiply(&sh2, &x);
                    for (u, &cu) in xh1.iter().enumerate() {
                        for (v, &cv) in sh2.iter().enumerate() {
                            lhs[u * n + v] += c * cu * cv;
                        }
                    }
                    for (u, &cu) in h1.iter().enumerate() {
                        for (v, &cv) in sh2x.iter().enumerate() {
                            rhs[u * n + v] += c * cu * cv;
                        }
                    }
                }
                assert!((lhs - rhs).norm() < 1e-9, "(c) fails for {}", alg.name);
            }
        }
    }
}
