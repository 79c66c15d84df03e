//! The grid A_{k,n} of iterated crossed products with its embeddings, Jones
//! projections, basic-construction verifiers, Markov checks, commuting
//! squares and Temperley-Lieb relations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{multiply, trace, AlgMap, AlgRef, TracedAlgebra};
use crate::crossed::{CrossedContext, IntervalAlgebra, TensorPairAlgebra};
use crate::error::{KacError, Result};
use crate::jones::{
    solve_jones_element, verify_jones_element, BasicConstructionReport, JonesSolveOptions,
    JonesTriple,
};
use crate::linalg::{rank, Mat, Vect};
use crate::scalar::{cr, C64, ONE, RANK_TOL};

/// A unital inclusion together with its trace-preserving conditional
/// expectation back onto the source coordinates.
#[derive(Clone)]
pub struct Embedding {
    pub map: AlgMap,
    pub exp: AlgMap,
}

impl Embedding {
    pub fn new(map: AlgMap, exp: AlgMap) -> Result<Self> {
        if !Arc::ptr_eq(&map.src, &exp.dst) || !Arc::ptr_eq(&map.dst, &exp.src) {
            return Err(KacError::AmbientMismatch(
                "expectation must invert the embedding's endpoints".into(),
            ));
        }
        Ok(Embedding { map, exp })
    }

    /// other first, then self.
    pub fn compose(&self, other: &Embedding) -> Result<Embedding> {
        Ok(Embedding {
            map: self.map.compose(&other.map)?,
            exp: other.exp.compose(&self.exp)?,
        })
    }

    /// Residual of E ∘ ι = id.
    pub fn retraction_residual(&self) -> f64 {
        let n = self.map.src.dim();
        let composed = &self.exp.mat * &self.map.mat;
        (composed - Mat::identity(n, n)).norm()
    }

    /// Residual of trace preservation of the expectation.
    pub fn expectation_trace_residual(&self) -> f64 {
        let big = self.map.dst.as_ref();
        let small = self.map.src.as_ref();
        let mut worst = 0.0f64;
        for j in 0..big.dim() {
            let mut v = Vect::zeros(big.dim());
            v[j] = ONE;
            let lhs = trace(big, &v);
            let rhs = trace(small, &self.exp.apply(&v));
            worst = worst.max((lhs - rhs).norm());
        }
        worst
    }

    /// The expectation as a projection of the big algebra onto the image.
    pub fn projection_matrix(&self) -> Mat {
        &self.map.mat * &self.exp.mat
    }
}

fn slot_trace_weight(ctx: &CrossedContext, s: i64, d: usize) -> C64 {
    if crate::crossed::slot_is_h(s) {
        ctx.integrals().phi[d]
    } else {
        ctx.integrals().h[d]
    }
}

/// Trace-out conditional expectation onto a nested subinterval, with values
/// in the subinterval coordinates (the explicit tensor-of-traces pattern).
pub fn interval_expectation_to(
    ctx: &CrossedContext,
    ambient: &Arc<IntervalAlgebra>,
    sub: &Arc<IntervalAlgebra>,
) -> Result<AlgMap> {
    if !sub.is_empty() && (ambient.lo > sub.lo || sub.hi > ambient.hi) {
        return Err(KacError::Dimension("subinterval not nested".into()));
    }
    let n = ctx.n();
    let mut mat = Mat::zeros(sub.dim(), ambient.dim());
    for j in 0..ambient.dim() {
        let digits = ambient.digits(j);
        let mut scalar = ONE;
        let mut kept: Vec<usize> = Vec::new();
        for (k, &d) in digits.iter().enumerate() {
            let s = ambient.lo + k as i64;
            if !sub.is_empty() && sub.lo <= s && s <= sub.hi {
                kept.push(d);
            } else {
                scalar *= slot_trace_weight(ctx, s, d);
            }
        }
        if scalar.norm() <= 1e-300 {
            continue;
        }
        let idx = kept.iter().fold(0usize, |acc, &d| acc * n + d);
        mat[(idx, j)] += scalar;
    }
    let srcref: AlgRef = Arc::clone(ambient) as AlgRef;
    let dstref: AlgRef = Arc::clone(sub) as AlgRef;
    Ok(AlgMap::new(&srcref, &dstref, mat))
}

/// Expectation of an interval onto an embedded tensor pair, in pair
/// coordinates.
pub fn interval_expectation_to_pair(
    ctx: &CrossedContext,
    ambient: &Arc<IntervalAlgebra>,
    pair: &Arc<TensorPairAlgebra>,
) -> Result<AlgMap> {
    let (l, r) = (&pair.left, &pair.right);
    if ambient.lo > l.lo || r.hi > ambient.hi || l.hi >= r.lo {
        return Err(KacError::Dimension("pair not nested in interval".into()));
    }
    let n = ctx.n();
    let mut mat = Mat::zeros(pair.dim(), ambient.dim());
    for j in 0..ambient.dim() {
        let digits = ambient.digits(j);
        let mut scalar = ONE;
        let mut kept_l: Vec<usize> = Vec::new();
        let mut kept_r: Vec<usize> = Vec::new();
        for (k, &d) in digits.iter().enumerate() {
            let s = ambient.lo + k as i64;
            if l.lo <= s && s <= l.hi {
                kept_l.push(d);
            } else if r.lo <= s && s <= r.hi {
                kept_r.push(d);
            } else {
                scalar *= slot_trace_weight(ctx, s, d);
            }
        }
        if scalar.norm() <= 1e-300 {
            continue;
        }
        let li = kept_l.iter().fold(0usize, |acc, &d| acc * n + d);
        let ri = kept_r.iter().fold(0usize, |acc, &d| acc * n + d);
        mat[(pair.join(li, ri), j)] += scalar;
    }
    let srcref: AlgRef = Arc::clone(ambient) as AlgRef;
    let dstref: AlgRef = Arc::clone(pair) as AlgRef;
    Ok(AlgMap::new(&srcref, &dstref, mat))
}

/// Expectation of a tensor pair onto a smaller pair, factorwise trace-out.
pub fn pair_expectation_to_pair(
    ctx: &CrossedContext,
    big: &Arc<TensorPairAlgebra>,
    small: &Arc<TensorPairAlgebra>,
) -> Result<AlgMap> {
    let el = interval_expectation_to(ctx, &big.left, &small.left)?;
    let er = interval_expectation_to(ctx, &big.right, &small.right)?;
    let mut mat = Mat::zeros(small.dim(), big.dim());
    for jl in 0..big.left.dim() {
        let cl = el.mat.column(jl);
        for jr in 0..big.right.dim() {
            let crv = er.mat.column(jr);
            let j = big.join(jl, jr);
            for (il, &a) in cl.iter().enumerate() {
                if a.norm() <= 1e-300 {
                    continue;
                }
                for (ir, &b) in crv.iter().enumerate() {
                    if b.norm() > 1e-300 {
                        mat[(small.join(il, ir), j)] += a * b;
                    }
                }
            }
        }
    }
    let srcref: AlgRef = Arc::clone(big) as AlgRef;
    let dstref: AlgRef = Arc::clone(small) as AlgRef;
    Ok(AlgMap::new(&srcref, &dstref, mat))
}

/// Expectation of a pair onto a subinterval of its right factor.
pub fn pair_expectation_to_right_sub(
    ctx: &CrossedContext,
    big: &Arc<TensorPairAlgebra>,
    sub: &Arc<IntervalAlgebra>,
) -> Result<AlgMap> {
    let er = interval_expectation_to(ctx, &big.right, sub)?;
    let mut mat = Mat::zeros(sub.dim(), big.dim());
    for jl in 0..big.left.dim() {
        let tl = big.left.trace_basis(jl);
        if tl.norm() <= 1e-300 {
            continue;
        }
        for jr in 0..big.right.dim() {
            let j = big.join(jl, jr);
            let col = er.mat.column(jr);
            for (i, &c) in col.iter().enumerate() {
                if c.norm() > 1e-300 {
                    mat[(i, j)] += tl * c;
                }
            }
        }
    }
    let srcref: AlgRef = Arc::clone(big) as AlgRef;
    let dstref: AlgRef = Arc::clone(sub) as AlgRef;
    Ok(AlgMap::new(&srcref, &dstref, mat))
}

// ---------------------------------------------------------------------------
// named basic-construction instances
// ---------------------------------------------------------------------------

/// H_{[p,q]} ⊂ H_{[k,l]} ⊂ H_{[2k-p, 2l-q]} with Markov modulus
/// δ^{2(p+l-k-q)}; an empty middle interval (p > q) encodes the scalars.
pub fn triple_interval_extension(
    ctx: &CrossedContext,
    k: i64,
    p: i64,
    q: i64,
    l: i64,
) -> Result<JonesTriple> {
    if k > l || (p <= q && (k > p || q > l)) {
        return Err(KacError::Dimension("need k <= p <= q <= l".into()));
    }
    let a = ctx.interval(p, q);
    let b = ctx.interval(k, l);
    let c = ctx.interval(2 * k - p, 2 * l - q);
    let incl_a = ctx.natural_inclusion(&a, &c)?;
    let incl_b = ctx.natural_inclusion(&b, &c)?;
    let ea = interval_expectation_to(ctx, &c, &a)?;
    let eb = interval_expectation_to(ctx, &c, &b)?;
    let exp_a = &incl_a.mat * &ea.mat;
    let exp_b = &incl_b.mat * &eb.mat;
    let modulus = ctx.delta().powi(2 * (p + l - k - q) as i32);
    let ambient: AlgRef = c as AlgRef;
    Ok(JonesTriple::new(
        &format!(
            "H[{p},{q}] in H[{k},{l}] in H[{},{}]",
            2 * k - p,
            2 * l - q
        ),
        &ambient,
        incl_a,
        incl_b,
        exp_a,
        exp_b,
        modulus,
    ))
}

/// C ⊂ B ⊂ C_top for explicit intervals, with the stated Markov modulus.
pub fn triple_scalar_bottom(
    ctx: &CrossedContext,
    b: (i64, i64),
    c: (i64, i64),
    modulus: f64,
) -> Result<JonesTriple> {
    let a = ctx.interval(0, -1);
    let bi = ctx.interval(b.0, b.1);
    let ci = ctx.interval(c.0, c.1);
    let incl_a = ctx.natural_inclusion(&a, &ci)?;
    let incl_b = ctx.natural_inclusion(&bi, &ci)?;
    let ea = interval_expectation_to(ctx, &ci, &a)?;
    let eb = interval_expectation_to(ctx, &ci, &bi)?;
    let exp_a = &incl_a.mat * &ea.mat;
    let exp_b = &incl_b.mat * &eb.mat;
    let ambient: AlgRef = ci as AlgRef;
    Ok(JonesTriple::new(
        &format!("C in H[{},{}] in H[{},{}]", b.0, b.1, c.0, c.1),
        &ambient,
        incl_a,
        incl_b,
        exp_a,
        exp_b,
        modulus,
    ))
}

/// Part 2: H_{[-l,-1]} ⊗ H_{[2,2+s]} ⊂ H_{[-l,2+s]} ⊂ H_{[-l,-1]} ⊗ H_{[2,6+s]}
/// (natural, then ψ), Markov modulus δ^4.
pub fn triple_psi_middle(ctx: &CrossedContext, l: i64, s: i64) -> Result<JonesTriple> {
    let a_pair = ctx.tensor_pair(-l, -1, 2, 2 + s);
    let b = ctx.interval(-l, 2 + s);
    let c_pair = ctx.tensor_pair(-l, -1, 2, 6 + s);
    let a_in_b = ctx.pair_inclusion(&a_pair)?;
    let psi = ctx.psi_embedding(l, s)?;
    let incl_a = psi.compose(&a_in_b)?;
    let incl_b = psi.clone();
    let exp_psi = ctx.cond_exp_psi(l, s)?;
    let e_a_in_b = interval_expectation_to_pair(ctx, &b, &a_pair)?;
    let exp_b = &psi.mat * &exp_psi.mat;
    let exp_a = &incl_a.mat * &(&e_a_in_b.mat * &exp_psi.mat);
    let ambient: AlgRef = c_pair as AlgRef;
    Ok(JonesTriple::new(
        &format!(
            "H[-{l},-1]xH[2,{}] in H[-{l},{}] in H[-{l},-1]xH[2,{}]",
            2 + s,
            2 + s,
            6 + s
        ),
        &ambient,
        incl_a,
        incl_b,
        exp_a,
        exp_b,
        ctx.delta().powi(4),
    ))
}

/// Part 3: H_{[-l,2+s]} ⊂ H_{[-l,-1]} ⊗ H_{[2,6+s]} ⊂ H_{[-l,6+s]}
/// (ψ, then natural), Markov modulus δ^4.
pub fn triple_psi_bottom(ctx: &CrossedContext, l: i64, s: i64) -> Result<JonesTriple> {
    let b_pair = ctx.tensor_pair(-l, -1, 2, 6 + s);
    let c = ctx.interval(-l, 6 + s);
    let psi = ctx.psi_embedding(l, s)?;
    let b_in_c = ctx.pair_inclusion(&b_pair)?;
    let incl_a = b_in_c.compose(&psi)?;
    let incl_b = b_in_c.clone();
    let e_b = interval_expectation_to_pair(ctx, &c, &b_pair)?;
    let exp_psi = ctx.cond_exp_psi(l, s)?;
    let exp_b = &b_in_c.mat * &e_b.mat;
    let exp_a = &incl_a.mat * &(&exp_psi.mat * &e_b.mat);
    let ambient: AlgRef = c as AlgRef;
    Ok(JonesTriple::new(
        &format!(
            "H[-{l},{}] in H[-{l},-1]xH[2,{}] in H[-{l},{}]",
            2 + s,
            6 + s,
            6 + s
        ),
        &ambient,
        incl_a,
        incl_b,
        exp_a,
        exp_b,
        ctx.delta().powi(4),
    ))
}

/// Run the full basic-construction verification, solving for the Jones
/// element first.
pub fn basic_construction_check(
    t: &JonesTriple,
    opts: &JonesSolveOptions,
) -> Result<(Vect, BasicConstructionReport)> {
    let e = solve_jones_element(t, opts)?;
    let rep = verify_jones_element(t, &e);
    Ok((e, rep))
}

/// Markov-property residual of a given projection for its triple.
pub fn markov_check(t: &JonesTriple, e: &Vect, modulus: f64) -> f64 {
    let alg = t.ambient.as_ref();
    let mut worst = 0.0f64;
    for j in 0..t.incl_b.src.dim() {
        let b = t.incl_b.column(j);
        let lhs = trace(alg, &multiply(alg, &b, e));
        let rhs = trace(alg, &b) * cr(1.0 / modulus);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

// ---------------------------------------------------------------------------
// commuting squares
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CommutingSquareReport {
    pub label: String,
    pub expectation_composition: f64,
    pub span_dim: usize,
    pub ambient_dim: usize,
}

impl CommutingSquareReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.expectation_composition < tol && self.span_dim == self.ambient_dim
    }
}

/// Check the square P ⊆ Q ⊆ S, P ⊆ R ⊆ S: E_Q ∘ E_R = E_P on S and the
/// symmetry condition span(Q·R) = S.
pub fn commuting_square_check(
    label: &str,
    s_alg: &AlgRef,
    p_in_s: &AlgMap,
    q_in_s: &AlgMap,
    r_in_s: &AlgMap,
) -> Result<CommutingSquareReport> {
    let eq = crate::gns::expectation_onto_image(s_alg, q_in_s)?;
    let er = crate::gns::expectation_onto_image(s_alg, r_in_s)?;
    let ep = crate::gns::expectation_onto_image(s_alg, p_in_s)?;
    let composition = (&eq * &er - &ep).norm();
    let mut cols: Vec<Vect> = Vec::with_capacity(q_in_s.src.dim() * r_in_s.src.dim());
    for i in 0..q_in_s.src.dim() {
        let qi = q_in_s.column(i);
        for j in 0..r_in_s.src.dim() {
            let rj = r_in_s.column(j);
            cols.push(multiply(s_alg.as_ref(), &qi, &rj));
        }
    }
    let span_dim = rank(&cols, RANK_TOL);
    Ok(CommutingSquareReport {
        label: label.to_string(),
        expectation_composition: composition,
        span_dim,
        ambient_dim: s_alg.dim(),
    })
}

// ---------------------------------------------------------------------------
// the grid A_{k,n}
// ---------------------------------------------------------------------------

/// A grid cell is either an interval or a tensor pair of intervals.
#[derive(Clone)]
pub enum Cell {
    Interval(Arc<IntervalAlgebra>),
    Pair(Arc<TensorPairAlgebra>),
}

impl Cell {
    pub fn alg(&self) -> AlgRef {
        match self {
            Cell::Interval(a) => Arc::clone(a) as AlgRef,
            Cell::Pair(p) => Arc::clone(p) as AlgRef,
        }
    }
}

/// The concrete cell algebras, following the case list of the grid.
pub fn typed_cell(ctx: &CrossedContext, k: usize, n: usize) -> Cell {
    let ki = k as i64;
    let ni = n as i64;
    if k == 0 {
        if n == 0 {
            Cell::Interval(ctx.interval(0, -1))
        } else {
            Cell::Interval(ctx.interval(-2 * (ni - 1), 1))
        }
    } else if n % 2 == 0 {
        Cell::Pair(ctx.tensor_pair(-ki, -1, 2, 2 * ni + ki + 1))
    } else {
        Cell::Interval(ctx.interval(-ki, 2 * ni + ki - 1))
    }
}

pub fn cell_dim(n_alg: usize, k: usize, n: usize) -> u128 {
    if k == 0 && n == 0 {
        1
    } else {
        (n_alg as u128).pow((2 * n + 2 * k) as u32)
    }
}

/// The inclusion A_{k,n} ⊆ A_{k,n+1} with its conditional expectation.
pub fn right_embedding(ctx: &CrossedContext, k: usize, n: usize) -> Result<Embedding> {
    let ki = k as i64;
    let ni = n as i64;
    if k == 0 {
        let s = match typed_cell(ctx, 0, n) {
            Cell::Interval(a) => a,
            _ => unreachable!(),
        };
        let d = match typed_cell(ctx, 0, n + 1) {
            Cell::Interval(a) => a,
            _ => unreachable!(),
        };
        let map = ctx.natural_inclusion(&s, &d)?;
        let exp = interval_expectation_to(ctx, &d, &s)?;
        Embedding::new(map, exp)
    } else if n % 2 == 0 {
        let s = match typed_cell(ctx, k, n) {
            Cell::Pair(p) => p,
            _ => unreachable!(),
        };
        let d = match typed_cell(ctx, k, n + 1) {
            Cell::Interval(a) => a,
            _ => unreachable!(),
        };
        let map = ctx.pair_inclusion(&s)?;
        if !Arc::ptr_eq(&map.dst, &(Arc::clone(&d) as AlgRef)) {
            return Err(KacError::Dimension("pair inclusion target mismatch".into()));
        }
        let exp = interval_expectation_to_pair(ctx, &d, &s)?;
        Embedding::new(map, exp)
    } else {
        let l = ki;
        let sp = 2 * ni + ki - 3;
        let map = ctx.psi_embedding(l, sp)?;
        let exp = ctx.cond_exp_psi(l, sp)?;
        Embedding::new(map, exp)
    }
}

/// The inclusion A_{k,n} ⊆ A_{k+1,n} with its conditional expectation.
pub fn up_embedding(ctx: &CrossedContext, k: usize, n: usize) -> Result<Embedding> {
    let ni = n as i64;
    if k == 0 {
        if n == 0 {
            let src = typed_cell(ctx, 0, 0).alg();
            let d = match typed_cell(ctx, 1, 0) {
                Cell::Pair(p) => p,
                _ => unreachable!(),
            };
            let dref = Arc::clone(&d) as AlgRef;
            let mut mat = Mat::zeros(d.dim(), 1);
            mat.set_column(0, &d.unit());
            let map = AlgMap::new(&src, &dref, mat);
            let mut emat = Mat::zeros(1, d.dim());
            for j in 0..d.dim() {
                emat[(0, j)] = d.trace_basis(j);
            }
            let exp = AlgMap::new(&dref, &src, emat);
            Embedding::new(map, exp)
        } else if n % 2 == 1 {
            // A_{0,n} = H_{[-2(n-1),1]} ≅ H_{[0,2n-1]} ⊆ H_{[-1,2n]} = A_{1,n}
            let s = match typed_cell(ctx, 0, n) {
                Cell::Interval(a) => a,
                _ => unreachable!(),
            };
            let d = match typed_cell(ctx, 1, n) {
                Cell::Interval(a) => a,
                _ => unreachable!(),
            };
            let shift = ctx.shift_iso(&s, 2 * (ni - 1))?;
            let shifted = ctx.interval(0, 2 * ni - 1);
            let natural = ctx.natural_inclusion(&shifted, &d)?;
            let map = natural.compose(&shift)?;
            let eback = interval_expectation_to(ctx, &d, &shifted)?;
            let unshift = AlgMap::new(
                &(Arc::clone(&shifted) as AlgRef),
                &(Arc::clone(&s) as AlgRef),
                Mat::identity(s.dim(), s.dim()),
            );
            let exp = unshift.compose(&eback)?;
            Embedding::new(map, exp)
        } else {
            // A_{0,n} ≅ H_{[2,2n+1]} ⊆ H_{-1} ⊗ H_{[2,2n+2]} = A_{1,n}
            let s = match typed_cell(ctx, 0, n) {
                Cell::Interval(a) => a,
                _ => unreachable!(),
            };
            let d = match typed_cell(ctx, 1, n) {
                Cell::Pair(p) => p,
                _ => unreachable!(),
            };
            let shift = ctx.shift_iso(&s, 2 * ni)?;
            let shifted = ctx.interval(2, 2 * ni + 1);
            let into = ctx.into_right_factor(&shifted, &d)?;
            let map = into.compose(&shift)?;
            let eback = pair_expectation_to_right_sub(ctx, &d, &shifted)?;
            let unshift = AlgMap::new(
                &(Arc::clone(&shifted) as AlgRef),
                &(Arc::clone(&s) as AlgRef),
                Mat::identity(s.dim(), s.dim()),
            );
            let exp = unshift.compose(&eback)?;
            Embedding::new(map, exp)
        }
    } else if n % 2 == 0 {
        let s = match typed_cell(ctx, k, n) {
            Cell::Pair(p) => p,
            _ => unreachable!(),
        };
        let d = match typed_cell(ctx, k + 1, n) {
            Cell::Pair(p) => p,
            _ => unreachable!(),
        };
        let map = ctx.pair_in_pair(&s, &d)?;
        let exp = pair_expectation_to_pair(ctx, &d, &s)?;
        Embedding::new(map, exp)
    } else {
        let s = match typed_cell(ctx, k, n) {
            Cell::Interval(a) => a,
            _ => unreachable!(),
        };
        let d = match typed_cell(ctx, k + 1, n) {
            Cell::Interval(a) => a,
            _ => unreachable!(),
        };
        let map = ctx.natural_inclusion(&s, &d)?;
        let exp = interval_expectation_to(ctx, &d, &s)?;
        Embedding::new(map, exp)
    }
}

pub struct Grid {
    pub kmax: usize,
    pub nmax: usize,
    /// the k = 0 row extends one step past nmax for the Temperley-Lieb checks
    pub top0: usize,
    pub cells: BTreeMap<(usize, usize), AlgRef>,
    pub right: BTreeMap<(usize, usize), Embedding>,
    pub up: BTreeMap<(usize, usize), Embedding>,
    /// e_{k,n} ∈ A_{k,n} for n ≥ 2
    pub jones: BTreeMap<(usize, usize), Vect>,
}

/// Build the grid for 0 ≤ k ≤ kmax, 0 ≤ n ≤ nmax. `dim_guard` refuses cells
/// larger than the given dimension.
pub fn build_grid(
    ctx: &CrossedContext,
    kmax: usize,
    nmax: usize,
    seed: u64,
    dim_guard: Option<u128>,
) -> Result<Grid> {
    let n_alg = ctx.n();
    let top0 = nmax.max(2) + 1;
    if let Some(guard) = dim_guard {
        let mut worst = 0u128;
        for k in 0..=kmax {
            let ntop = if k == 0 { top0 } else { nmax };
            for n in 0..=ntop {
                worst = worst.max(cell_dim(n_alg, k, n));
            }
        }
        if worst > guard {
            return Err(KacError::ResourceBound(format!(
                "largest grid cell has dimension {worst} > {guard}"
            )));
        }
    }
    let mut cells = BTreeMap::new();
    let mut right = BTreeMap::new();
    let mut up = BTreeMap::new();
    for k in 0..=kmax {
        let ntop = if k == 0 { top0 } else { nmax };
        for n in 0..=ntop {
            cells.insert((k, n), typed_cell(ctx, k, n).alg());
        }
    }
    for k in 0..=kmax {
        let ntop = if k == 0 { top0 } else { nmax };
        for n in 0..ntop {
            right.insert((k, n), right_embedding(ctx, k, n)?);
        }
    }
    for k in 0..kmax {
        for n in 0..=nmax {
            up.insert((k, n), up_embedding(ctx, k, n)?);
        }
    }

    // Jones projections: solve on the small k = 0 row, transport upward.
    let mut jones = BTreeMap::new();
    for n in 2..=top0 {
        let t = grid_triple(ctx, &cells, &right, 0, n)?;
        let opts = JonesSolveOptions {
            seed: seed ^ ((n as u64) << 8),
            ..Default::default()
        };
        let e = solve_jones_element(&t, &opts)?;
        jones.insert((0, n), e);
    }
    for k in 1..=kmax {
        for n in 2..=nmax {
            let below = jones[&(k - 1, n)].clone();
            let emb = &up[&(k - 1, n)];
            jones.insert((k, n), emb.map.apply(&below));
        }
    }
    Ok(Grid {
        kmax,
        nmax,
        top0,
        cells,
        right,
        up,
        jones,
    })
}

/// The vertical triple A_{k,n-2} ⊆ A_{k,n-1} ⊆ A_{k,n} with modulus δ^4.
pub fn grid_triple(
    ctx: &CrossedContext,
    cells: &BTreeMap<(usize, usize), AlgRef>,
    right: &BTreeMap<(usize, usize), Embedding>,
    k: usize,
    n: usize,
) -> Result<JonesTriple> {
    if n < 2 {
        return Err(KacError::Dimension("triple needs n >= 2".into()));
    }
    let c = cells
        .get(&(k, n))
        .ok_or_else(|| KacError::Dimension("cell out of range".into()))?;
    let step1 = &right[&(k, n - 2)];
    let step2 = &right[&(k, n - 1)];
    let a_emb = step2.compose(step1)?;
    let incl_a = a_emb.map.clone();
    let incl_b = step2.map.clone();
    let exp_a = a_emb.projection_matrix();
    let exp_b = step2.projection_matrix();
    Ok(JonesTriple::new(
        &format!("A({k},{}) in A({k},{}) in A({k},{n})", n - 2, n - 1),
        c,
        incl_a,
        incl_b,
        exp_a,
        exp_b,
        ctx.delta().powi(4),
    ))
}

#[derive(Clone, Debug)]
pub struct GridReport {
    pub embedding_residual: f64,
    pub square_residual: f64,
    pub triples: Vec<BasicConstructionReport>,
    pub carries_jones_up: Vec<BasicConstructionReport>,
    pub temperley_lieb: f64,
}

impl GridReport {
    pub fn pass(&self, tol: f64) -> bool {
        self.embedding_residual < tol
            && self.square_residual < tol
            && self.triples.iter().all(|t| t.pass(tol))
            && self.carries_jones_up.iter().all(|t| t.pass(tol))
            && self.temperley_lieb < tol
    }
}

/// All grid facts: embeddings are trace-compatible unital *-algebra maps,
/// the squares commute, the vertical triples are δ^4 basic constructions,
/// the transported e_{k,n} stay Jones projections one row up, and the
/// Temperley-Lieb relations hold among consecutive Jones projections.
pub fn verify_grid(ctx: &CrossedContext, grid: &Grid) -> Result<GridReport> {
    let mut emb_res = 0.0f64;
    for e in grid.right.values().chain(grid.up.values()) {
        emb_res = emb_res.max(e.map.multiplicativity_residual());
        emb_res = emb_res.max(e.map.unitality_residual());
        emb_res = emb_res.max(e.map.star_residual());
        emb_res = emb_res.max(e.map.trace_residual());
        emb_res = emb_res.max(e.retraction_residual());
        emb_res = emb_res.max(e.expectation_trace_residual());
    }

    let mut sq_res = 0.0f64;
    for k in 0..grid.kmax {
        for n in 0..grid.nmax {
            let path1 = grid.up[&(k, n + 1)].map.compose(&grid.right[&(k, n)].map)?;
            let path2 = grid.right[&(k + 1, n)].map.compose(&grid.up[&(k, n)].map)?;
            sq_res = sq_res.max((&path1.mat - &path2.mat).norm());
        }
    }

    let mut triples = Vec::new();
    for k in 0..=grid.kmax {
        let ntop = if k == 0 { grid.top0 } else { grid.nmax };
        for n in 2..=ntop {
            if let Some(e) = grid.jones.get(&(k, n)) {
                let t = grid_triple(ctx, &grid.cells, &grid.right, k, n)?;
                triples.push(verify_jones_element(&t, e));
            }
        }
    }

    // the transported elements are verified as part of `triples`; re-examine
    // the carrying explicitly so failures name the offending row
    let mut carries = Vec::new();
    for k in 0..grid.kmax {
        for n in 2..=grid.nmax {
            let lifted = grid.up[&(k, n)].map.apply(&grid.jones[&(k, n)]);
            let t = grid_triple(ctx, &grid.cells, &grid.right, k + 1, n)?;
            carries.push(verify_jones_element(&t, &lifted));
        }
    }

    // Temperley-Lieb relations in the top k = 0 cell
    let top = grid.top0;
    let top_alg = &grid.cells[&(0, top)];
    let mut es: Vec<Vect> = Vec::new();
    for n in 2..=top {
        let mut v = grid.jones[&(0, n)].clone();
        for m in n..top {
            v = grid.right[&(0, m)].map.apply(&v);
        }
        es.push(v);
    }
    let lam_inv = cr(1.0 / ctx.delta().powi(4));
    let alg = top_alg.as_ref();
    let mut tl = 0.0f64;
    for i in 0..es.len() {
        for j in 0..es.len() {
            if i == j {
                continue;
            }
            if i.abs_diff(j) == 1 {
                let prod = multiply(alg, &multiply(alg, &es[i], &es[j]), &es[i]);
                tl = tl.max((prod - &es[i] * lam_inv).norm());
            } else {
                let ij = multiply(alg, &es[i], &es[j]);
                let ji = multiply(alg, &es[j], &es[i]);
                tl = tl.max((ij - ji).norm());
            }
        }
    }

    Ok(GridReport {
        embedding_residual: emb_res,
        square_residual: sq_res,
        triples,
        carries_jones_up: carries,
        temperley_lieb: tl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{group_algebra, GroupTable};

    #[test]
    fn small_grid_z2_passes_all_checks() {
        let base = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let ctx = CrossedContext::new(&base).unwrap();
        let grid = build_grid(&ctx, 2, 3, 42, Some(10_000)).unwrap();
        let report = verify_grid(&ctx, &grid).unwrap();
        eprintln!(
            "emb {:.2e} sq {:.2e} tl {:.2e}",
            report.embedding_residual, report.square_residual, report.temperley_lieb
        );
        for t in &report.triples {
            eprintln!(
                "triple {}: pass {} maxres {:.2e} span {}/{} trace {:.6}",
                t.label,
                t.pass(1e-8),
                t.max_residual(),
                t.span_dim,
                t.ambient_dim,
                t.trace_of_e
            );
        }
        for t in &report.carries_jones_up {
            eprintln!(
                "carry {}: pass {} maxres {:.2e} span {}/{}",
                t.label,
                t.pass(1e-8),
                t.max_residual(),
                t.span_dim,
                t.ambient_dim
            );
        }
        assert!(report.pass(1e-8));
    }
}
