//! Iterated crossed products H_{[i,j]}: the canonical actions, the interval
//! algebras with their traces and embeddings, the prime anti-isomorphism and
//! the explicit conditional expectations.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::algebra::{multiply, star, AlgMap, AlgRef, TracedAlgebra};
use crate::error::{KacError, Result};
use crate::kac::{dual, Integrals, KacAlgebra, SparseVec};
use crate::linalg::{Mat, Vect};
use crate::scalar::{C64, ONE, ZERO};

/// Slot s carries H when s is odd and H* when s is even.
pub fn slot_is_h(s: i64) -> bool {
    s.rem_euclid(2) == 1
}

/// Precomputed canonical actions between H and H*.
///
/// `fx[f][x]` expands f.e_x = f((e_x)_2) (e_x)_1 for f = e*_f acting on H;
/// `xf[x][f]` expands e_x.e*_f, where (x.g)(y) = g(yx).
pub struct SlotActions {
    pub fx: Vec<Vec<SparseVec>>,
    pub xf: Vec<Vec<SparseVec>>,
}

impl SlotActions {
    fn build(base: &KacAlgebra) -> Self {
        let n = base.dim;
        let mut fx = vec![vec![SparseVec::new(); n]; n];
        for x in 0..n {
            for &(p, q, c) in &base.comul[x] {
                // e*_q picks out the second leg
                fx[q][x].push((p, c));
            }
        }
        let mut xf = vec![vec![SparseVec::new(); n]; n];
        // (e_x . g)(e_t) = g(e_t e_x): so e_x . e*_f = sum_t coeff of e_f in e_t e_x * e*_t
        for x in 0..n {
            for t in 0..n {
                for &(k, c) in &base.mul[t][x] {
                    xf[x][k].push((t, c));
                }
            }
        }
        SlotActions { fx, xf }
    }
}

/// The iterated crossed product H_{[lo, hi]} (the complex numbers when
/// lo > hi). Basis elements are slot tuples, leftmost slot most significant.
pub struct IntervalAlgebra {
    pub base: Arc<KacAlgebra>,
    pub dual: Arc<KacAlgebra>,
    pub lo: i64,
    pub hi: i64,
    pub slots: usize,
    n: usize,
    dim: usize,
    inner: Option<Arc<IntervalAlgebra>>,
    actions: Arc<SlotActions>,
    ints: Integrals,
    dual_ints: Integrals,
    mul_memo: RwLock<HashMap<(u64, u64), SparseVec>>,
    star_memo: RwLock<HashMap<u64, SparseVec>>,
}

impl IntervalAlgebra {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn slot_algebra(&self, s: i64) -> &Arc<KacAlgebra> {
        if slot_is_h(s) {
            &self.base
        } else {
            &self.dual
        }
    }

    /// Unit of the slot algebra: 1_H on odd slots, the counit of H on even.
    pub fn slot_unit(&self, s: i64) -> Vect {
        self.slot_algebra(s).unit.clone()
    }

    /// The integral element of the slot algebra.
    pub fn slot_integral(&self, s: i64) -> Vect {
        if slot_is_h(s) {
            self.ints.h.clone()
        } else {
            self.dual_ints.h.clone()
        }
    }

    /// Normalised trace weight of basis index t at slot s: phi(e_t) on
    /// H-slots, e*_t(h) on H*-slots.
    fn slot_trace(&self, s: i64, t: usize) -> C64 {
        if slot_is_h(s) {
            self.ints.phi[t]
        } else {
            self.ints.h[t]
        }
    }

    /// Decompose a basis index into its per-slot digits, slot lo first.
    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.slots];
        for k in (0..self.slots).rev() {
            out[k] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0usize, |acc, &d| acc * self.n + d)
    }

    fn mul_basis_inner(&self, i: usize, j: usize) -> SparseVec {
        if self.is_empty() {
            return vec![(0, ONE)];
        }
        if self.slots == 1 {
            return self.slot_algebra(self.hi).mul[i][j].clone();
        }
        if let Some(hit) = self.mul_memo.read().unwrap().get(&(i as u64, j as u64)) {
            return hit.clone();
        }
        let n = self.n;
        let inner = self.inner.as_ref().unwrap();
        let (ap, ax) = (i / n, i % n);
        let (bp, bx) = (j / n, j % n);
        // (a ⋊ x)(b ⋊ y) = a α_{x_1}(b) ⋊ x_2 y, with x_1 acting on the
        // last slot of b only
        let (bpp, bw) = (bp / n, bp % n);
        let slot = self.slot_algebra(self.hi);
        let mut acc: HashMap<usize, C64> = HashMap::new();
        for &(x1, x2, c) in &slot.comul[ax] {
            let action = if slot_is_h(self.hi) {
                // H acting on H* below it
                &self.actions.xf[x1][bw]
            } else {
                // H* acting on H below it
                &self.actions.fx[x1][bw]
            };
            if action.is_empty() {
                continue;
            }
            let slot_prod = &slot.mul[x2][bx];
            if slot_prod.is_empty() {
                continue;
            }
            for &(p2, cb) in action {
                let bprime = if inner.slots == 1 { p2 } else { bpp * n + p2 };
                let inner_prod = inner.mul_basis_inner(ap, bprime);
                for &(u, cu) in &inner_prod {
                    for &(v, cv) in slot_prod {
                        *acc.entry(u * n + v).or_insert(ZERO) += c * cb * cu * cv;
                    }
                }
            }
        }
        let mut out: SparseVec = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-300)
            .collect();
        out.sort_by_key(|&(k, _)| k);
        self.mul_memo
            .write()
            .unwrap()
            .insert((i as u64, j as u64), out.clone());
        out
    }

    fn star_basis_inner(&self, i: usize) -> SparseVec {
        if self.is_empty() {
            return vec![(0, ONE)];
        }
        if self.slots == 1 {
            let alg = self.slot_algebra(self.hi);
            let mut v = Vect::zeros(self.n);
            v[i] = ONE;
            return crate::kac::sparse_from_dense(&alg.star(&v), 1e-300);
        }
        if let Some(hit) = self.star_memo.read().unwrap().get(&(i as u64)) {
            return hit.clone();
        }
        let n = self.n;
        let inner = self.inner.as_ref().unwrap();
        let (ap, ax) = (i / n, i % n);
        let slot = self.slot_algebra(self.hi);
        // (a ⋊ x)^* = α_{x*_1}(a^*) ⋊ x*_2
        let mut xs = Vect::zeros(n);
        xs[ax] = ONE;
        let xstar = slot.star(&xs);
        let astar = inner.star_basis_inner(ap);
        let mut acc: HashMap<usize, C64> = HashMap::new();
        for (s, &cs) in xstar.iter().enumerate() {
            if cs.norm() <= 1e-300 {
                continue;
            }
            for &(w1, w2, c) in &slot.comul[s] {
                for &(ai, ca) in &astar {
                    let (app, aw) = if inner.slots == 1 {
                        (0usize, ai)
                    } else {
                        (ai / n, ai % n)
                    };
                    let action = if slot_is_h(self.hi) {
                        &self.actions.xf[w1][aw]
                    } else {
                        &self.actions.fx[w1][aw]
                    };
                    for &(p2, cb) in action {
                        let aidx = if inner.slots == 1 { p2 } else { app * n + p2 };
                        *acc.entry(aidx * n + w2).or_insert(ZERO) += cs * c * ca * cb;
                    }
                }
            }
        }
        let mut out: SparseVec = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > 1e-300)
            .collect();
        out.sort_by_key(|&(k, _)| k);
        self.star_memo
            .write()
            .unwrap()
            .insert(i as u64, out.clone());
        out
    }
}

impl TracedAlgebra for IntervalAlgebra {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> String {
        if self.is_empty() {
            format!("C ({} interval)", self.base.name)
        } else {
            format!("{}[{},{}]", self.base.name, self.lo, self.hi)
        }
    }

    fn unit(&self) -> Vect {
        if self.is_empty() {
            return Vect::from_element(1, ONE);
        }
        let mut u = Vect::from_element(1, ONE);
        for s in self.lo..=self.hi {
            u = kron(&u, &self.slot_unit(s));
        }
        u
    }

    fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        self.mul_basis_inner(i, j)
    }

    fn star_basis(&self, i: usize) -> SparseVec {
        self.star_basis_inner(i)
    }

    fn trace_basis(&self, i: usize) -> C64 {
        if self.is_empty() {
            return ONE;
        }
        let digits = self.digits(i);
        let mut t = ONE;
        for (k, &d) in digits.iter().enumerate() {
            t *= self.slot_trace(self.lo + k as i64, d);
        }
        t
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

pub fn kron(a: &Vect, b: &Vect) -> Vect {
    let mut out = Vect::zeros(a.len() * b.len());
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm() <= 1e-300 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i * b.len() + j] = ai * bj;
        }
    }
    out
}

/// Tensor product of two interval algebras whose slots are at distance at
/// least two, so that componentwise multiplication agrees with the ambient.
pub struct TensorPairAlgebra {
    pub left: Arc<IntervalAlgebra>,
    pub right: Arc<IntervalAlgebra>,
}

impl TensorPairAlgebra {
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.right.dim(), idx % self.right.dim())
    }

    pub fn join(&self, l: usize, r: usize) -> usize {
        l * self.right.dim() + r
    }
}

impl TracedAlgebra for TensorPairAlgebra {
    fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    fn label(&self) -> String {
        format!("{} (x) {}", self.left.label(), self.right.label())
    }

    fn unit(&self) -> Vect {
        kron(&self.left.unit(), &self.right.unit())
    }

    fn mul_basis(&self, i: usize, j: usize) -> SparseVec {
        let (il, ir) = self.split(i);
        let (jl, jr) = self.split(j);
        let pl = self.left.mul_basis(il, jl);
        let pr = self.right.mul_basis(ir, jr);
        let mut out = SparseVec::with_capacity(pl.len() * pr.len());
        for &(kl, cl) in &pl {
            for &(kr, cr) in &pr {
                out.push((self.join(kl, kr), cl * cr));
            }
        }
        out.sort_by_key(|&(k, _)| k);
        out
    }

    fn star_basis(&self, i: usize) -> SparseVec {
        let (il, ir) = self.split(i);
        let sl = self.left.star_basis(il);
        let sr = self.right.star_basis(ir);
        let mut out = SparseVec::with_capacity(sl.len() * sr.len());
        for &(kl, cl) in &sl {
            for &(kr, cr) in &sr {
                out.push((self.join(kl, kr), cl * cr));
            }
        }
        out.sort_by_key(|&(k, _)| k);
        out
    }

    fn trace_basis(&self, i: usize) -> C64 {
        let (il, ir) = self.split(i);
        self.left.trace_basis(il) * self.right.trace_basis(ir)
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// Shared context for all crossed-product constructions over one base Kac
/// algebra: caches interval algebras so ambient identity is pointer identity.
pub struct CrossedContext {
    pub base: Arc<KacAlgebra>,
    pub dual: Arc<KacAlgebra>,
    actions: Arc<SlotActions>,
    ints: Integrals,
    dual_ints: Integrals,
    intervals: RwLock<HashMap<(i64, i64), Arc<IntervalAlgebra>>>,
    pairs: RwLock<HashMap<(i64, i64, i64, i64), Arc<TensorPairAlgebra>>>,
}

impl CrossedContext {
    pub fn new(base: &Arc<KacAlgebra>) -> Result<Self> {
        let ints = base.compute_integrals()?;
        let dual_alg = dual(base)?;
        let dual_ints = dual_alg.compute_integrals()?;
        Ok(CrossedContext {
            base: Arc::clone(base),
            dual: dual_alg,
            actions: Arc::new(SlotActions::build(base)),
            ints,
            dual_ints,
            intervals: RwLock::new(HashMap::new()),
            pairs: RwLock::new(HashMap::new()),
        })
    }

    pub fn n(&self) -> usize {
        self.base.dim
    }

    pub fn delta(&self) -> f64 {
        self.base.delta
    }

    pub fn integrals(&self) -> &Integrals {
        &self.ints
    }

    pub fn dual_integrals(&self) -> &Integrals {
        &self.dual_ints
    }

    /// H_{[lo, hi]}; all empty intervals are the one cached copy of C.
    pub fn interval(&self, lo: i64, hi: i64) -> Arc<IntervalAlgebra> {
        let key = if lo > hi { (0, -1) } else { (lo, hi) };
        if let Some(hit) = self.intervals.read().unwrap().get(&key) {
            return Arc::clone(hit);
        }
        let alg = self.build_interval(key.0, key.1);
        self.intervals
            .write()
            .unwrap()
            .entry(key)
            .or_insert(alg)
            .clone()
    }

    fn build_interval(&self, lo: i64, hi: i64) -> Arc<IntervalAlgebra> {
        let n = self.base.dim;
        let slots = if lo > hi { 0 } else { (hi - lo + 1) as usize };
        let inner = if slots >= 2 {
            Some(self.interval(lo, hi - 1))
        } else {
            None
        };
        Arc::new(IntervalAlgebra {
            base: Arc::clone(&self.base),
            dual: Arc::clone(&self.dual),
            lo,
            hi,
            slots,
            n,
            dim: n.pow(slots as u32),
            inner,
            actions: Arc::clone(&self.actions),
            ints: self.ints.clone(),
            dual_ints: self.dual_ints.clone(),
            mul_memo: RwLock::new(HashMap::new()),
            star_memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn tensor_pair(
        &self,
        llo: i64,
        lhi: i64,
        rlo: i64,
        rhi: i64,
    ) -> Arc<TensorPairAlgebra> {
        let key = (llo, lhi, rlo, rhi);
        if let Some(hit) = self.pairs.read().unwrap().get(&key) {
            return Arc::clone(hit);
        }
        let pair = Arc::new(TensorPairAlgebra {
            left: self.interval(llo, lhi),
            right: self.interval(rlo, rhi),
        });
        self.pairs
            .write()
            .unwrap()
            .entry(key)
            .or_insert(pair)
            .clone()
    }

    /// Natural inclusion H_{[src]} ⊆ H_{[dst]} padding new slots with units.
    pub fn natural_inclusion(
        &self,
        src: &Arc<IntervalAlgebra>,
        dst: &Arc<IntervalAlgebra>,
    ) -> Result<AlgMap> {
        if !src.is_empty() && (dst.lo > src.lo || src.hi > dst.hi) {
            return Err(KacError::Dimension(format!(
                "interval [{},{}] is not nested in [{},{}]",
                src.lo, src.hi, dst.lo, dst.hi
            )));
        }
        let mut left_pad = Vect::from_element(1, ONE);
        let mut right_pad = Vect::from_element(1, ONE);
        if src.is_empty() {
            for s in dst.lo..=dst.hi {
                left_pad = kron(&left_pad, &dst.slot_unit(s));
            }
        } else {
            for s in dst.lo..src.lo {
                left_pad = kron(&left_pad, &dst.slot_unit(s));
            }
            for s in (src.hi + 1)..=dst.hi {
                right_pad = kron(&right_pad, &dst.slot_unit(s));
            }
        }
        let mut mat = Mat::zeros(dst.dim(), src.dim());
        for j in 0..src.dim() {
            let mut col = Vect::zeros(src.dim());
            col[j] = ONE;
            let padded = kron(&kron(&left_pad, &col), &right_pad);
            mat.set_column(j, &padded);
        }
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// Parity-preserving relabelling H_{[lo,hi]} -> H_{[lo+2t, hi+2t]}.
    pub fn shift_iso(&self, src: &Arc<IntervalAlgebra>, by: i64) -> Result<AlgMap> {
        if by % 2 != 0 {
            return Err(KacError::Dimension("slot shift must be even".into()));
        }
        let dst = self.interval(src.lo + by, src.hi + by);
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(&dst) as AlgRef;
        Ok(AlgMap::new(
            &srcref,
            &dstref,
            Mat::identity(src.dim(), src.dim()),
        ))
    }

    /// Inclusion of a tensor pair into the spanning interval, padding the gap
    /// between the factors with units.
    pub fn pair_inclusion(&self, pair: &Arc<TensorPairAlgebra>) -> Result<AlgMap> {
        let (l, r) = (&pair.left, &pair.right);
        if l.is_empty() || r.is_empty() || r.lo - l.hi < 2 {
            return Err(KacError::Dimension(
                "tensor pair factors must be separated by at least two slots".into(),
            ));
        }
        let dst = self.interval(l.lo, r.hi);
        let mut mid = Vect::from_element(1, ONE);
        for s in (l.hi + 1)..r.lo {
            mid = kron(&mid, &dst.slot_unit(s));
        }
        let mut mat = Mat::zeros(dst.dim(), pair.dim());
        for jl in 0..l.dim() {
            let mut cl = Vect::zeros(l.dim());
            cl[jl] = ONE;
            for jr in 0..r.dim() {
                let mut crv = Vect::zeros(r.dim());
                crv[jr] = ONE;
                let padded = kron(&kron(&cl, &mid), &crv);
                mat.set_column(pair.join(jl, jr), &padded);
            }
        }
        let srcref: AlgRef = Arc::clone(pair) as AlgRef;
        let dstref: AlgRef = Arc::clone(&dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// Inclusion of one tensor pair into a larger one, factorwise.
    pub fn pair_in_pair(
        &self,
        src: &Arc<TensorPairAlgebra>,
        dst: &Arc<TensorPairAlgebra>,
    ) -> Result<AlgMap> {
        let il = self.natural_inclusion(&src.left, &dst.left)?;
        let ir = self.natural_inclusion(&src.right, &dst.right)?;
        let mut mat = Mat::zeros(dst.dim(), src.dim());
        for jl in 0..src.left.dim() {
            for jr in 0..src.right.dim() {
                let padded = kron(&il.mat.column(jl).into_owned(), &ir.mat.column(jr).into_owned());
                mat.set_column(src.join(jl, jr), &padded);
            }
        }
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// Map into the right factor of a pair, with unit in the left factor.
    pub fn into_right_factor(
        &self,
        src: &Arc<IntervalAlgebra>,
        dst: &Arc<TensorPairAlgebra>,
    ) -> Result<AlgMap> {
        let inner = self.natural_inclusion(src, &dst.right)?;
        let ul = dst.left.unit();
        let mut mat = Mat::zeros(dst.dim(), src.dim());
        for j in 0..src.dim() {
            let padded = kron(&ul, &inner.mat.column(j).into_owned());
            mat.set_column(j, &padded);
        }
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// The embedding ψ_{l,s} of H_{[-l, 2+s]} into H_{[-l,-1]} ⊗ H_{[2, 6+s]}:
    /// the slot -1 leg is split by Δ and the non-negative slots move up by 4.
    pub fn psi_embedding(&self, l: i64, s: i64) -> Result<AlgMap> {
        if l < 1 || s < 0 {
            return Err(KacError::Dimension(format!("psi embedding needs l >= 1, s >= 0; got ({l},{s})")));
        }
        let src = self.interval(-l, 2 + s);
        let pair = self.tensor_pair(-l, -1, 2, 6 + s);
        let n = self.n();
        let left_slots = l as usize; // slots -l..-1
        let tail_slots = (3 + s) as usize; // slots 0..2+s
        let right = &pair.right;
        // column of e_(prefix, x_{-1}, tail): sum over Δ(x_{-1}) of
        //   (prefix ⋊ x_1) ⊗ (ε ⋊ x_2 ⋊ tail)
        let eps_vec = right.slot_unit(2); // unit of the H*-slot 2
        let mut mat = Mat::zeros(pair.dim(), src.dim());
        for j in 0..src.dim() {
            let digits = src.digits(j);
            let (pref, xm1, tail) = (
                &digits[..left_slots - 1],
                digits[left_slots - 1],
                &digits[left_slots..],
            );
            debug_assert_eq!(tail.len(), tail_slots);
            let mut col = Vect::zeros(pair.dim());
            for &(x1, x2, c) in &self.base.comul[xm1] {
                // left factor index: prefix digits + x1
                let mut ldigits = pref.to_vec();
                ldigits.push(x1);
                let lidx = ldigits.iter().fold(0usize, |acc, &d| acc * n + d);
                // right factor: eps at slot 2, x2 at slot 3, then the tail
                let mut rvec = Vect::zeros(right.dim());
                // build index ranges: slot2 digit varies over eps support
                for (e_idx, &e_c) in eps_vec.iter().enumerate() {
                    if e_c.norm() <= 1e-300 {
                        continue;
                    }
                    let mut rdigits = Vec::with_capacity(2 + tail_slots);
                    rdigits.push(e_idx);
                    rdigits.push(x2);
                    rdigits.extend_from_slice(tail);
                    let ridx = rdigits.iter().fold(0usize, |acc, &d| acc * n + d);
                    rvec[ridx] += e_c;
                }
                for (ridx, &rc) in rvec.iter().enumerate() {
                    if rc.norm() > 1e-300 {
                        col[pair.join(lidx, ridx)] += c * rc;
                    }
                }
            }
            mat.set_column(j, &col);
        }
        let srcref: AlgRef = Arc::clone(&src) as AlgRef;
        let dstref: AlgRef = Arc::clone(&pair) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// The prime map X -> X': reverse the slots and apply the antipode in
    /// each slot. A *-anti-isomorphism onto the parity-matched interval
    /// starting at slot 0 or 1.
    pub fn prime_map(&self, src: &Arc<IntervalAlgebra>) -> Result<AlgMap> {
        if src.is_empty() {
            return Err(KacError::Dimension("prime map needs a nonempty interval".into()));
        }
        let len = src.slots as i64;
        // new slot k holds the old slot hi - k; parity of new start = parity of old end
        let start = if slot_is_h(src.hi) { 1 } else { 0 };
        let dst = self.interval(start, start + len - 1);
        let n = self.n();
        let mut mat = Mat::zeros(dst.dim(), src.dim());
        for j in 0..src.dim() {
            let digits = src.digits(j);
            // apply S slotwise, reverse
            let mut factors: Vec<Vect> = Vec::with_capacity(digits.len());
            for (k, &d) in digits.iter().enumerate().rev() {
                let s = src.lo + k as i64;
                let alg = src.slot_algebra(s);
                let mut v = Vect::zeros(n);
                v[d] = ONE;
                factors.push(alg.apply_antipode(&v));
            }
            let mut col = Vect::from_element(1, ONE);
            for f in &factors {
                col = kron(&col, f);
            }
            mat.set_column(j, &col);
        }
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(&dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// Strip the last slot of an interval element that is padded by the slot
    /// unit: apply the counit (H-slot) or evaluation at 1 (H*-slot).
    pub fn unpad_last(&self, src: &Arc<IntervalAlgebra>) -> Result<AlgMap> {
        if src.is_empty() {
            return Err(KacError::Dimension("cannot unpad the empty interval".into()));
        }
        let dst = self.interval(src.lo, src.hi - 1);
        let n = self.n();
        let weight: Vect = if slot_is_h(src.hi) {
            self.base.counit.clone()
        } else {
            // evaluation of a dual-basis functional at 1_H
            self.base.unit.clone()
        };
        let mut mat = Mat::zeros(dst.dim(), src.dim());
        for j in 0..src.dim() {
            let (pref, last) = (j / n, j % n);
            mat[(pref, j)] += weight[last];
        }
        let srcref: AlgRef = Arc::clone(src) as AlgRef;
        let dstref: AlgRef = Arc::clone(&dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// Trace-out conditional expectation of H_{[p,q]} onto an embedded tensor
    /// of subintervals: identity on kept slots, the slot trace elsewhere.
    /// Returns the map as an endomorphism of the ambient interval.
    pub fn cond_exp_interval(
        &self,
        ambient: &Arc<IntervalAlgebra>,
        kept: &[(i64, i64)],
    ) -> Result<Mat> {
        for w in kept.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(KacError::Dimension("kept intervals must be increasing".into()));
            }
        }
        for &(a, b) in kept {
            if a > b || a < ambient.lo || b > ambient.hi {
                return Err(KacError::Dimension("kept interval out of range".into()));
            }
        }
        let keep: Vec<bool> = (ambient.lo..=ambient.hi)
            .map(|s| kept.iter().any(|&(a, b)| a <= s && s <= b))
            .collect();
        let dim = ambient.dim();
        let mut mat = Mat::zeros(dim, dim);
        for j in 0..dim {
            let digits = ambient.digits(j);
            let mut scalar = ONE;
            for (k, &d) in digits.iter().enumerate() {
                if !keep[k] {
                    scalar *= ambient.slot_trace(ambient.lo + k as i64, d);
                }
            }
            if scalar.norm() <= 1e-300 {
                continue;
            }
            // rebuild with units in the traced-out slots
            let mut col = Vect::from_element(1, ONE);
            for (k, &d) in digits.iter().enumerate() {
                let s = ambient.lo + k as i64;
                if keep[k] {
                    let mut v = Vect::zeros(self.n());
                    v[d] = ONE;
                    col = kron(&col, &v);
                } else {
                    col = kron(&col, &ambient.slot_unit(s));
                }
            }
            for (t, &c) in col.iter().enumerate() {
                if c.norm() > 1e-300 {
                    mat[(t, j)] += scalar * c;
                }
            }
        }
        Ok(mat)
    }

    /// The conditional expectation of H_{[-l,-1]} ⊗ H_{[2,6+s]} onto the
    /// ψ-embedded copy of H_{[-l,2+s]}, expressed in the source coordinates
    /// of ψ. For a decomposable Y = (prefix ⋊ x^{-1}) ⊗ (f^2 ⋊ x^3 ⋊ tail):
    /// E(Y) = φ(S(x^{-1}_2) x^3) f^2(h) · prefix ⋊ x^{-1}_1 ⋊ tail.
    pub fn cond_exp_psi(&self, l: i64, s: i64) -> Result<AlgMap> {
        if l < 1 || s < 0 {
            return Err(KacError::Dimension(format!("cond_exp_psi needs l >= 1, s >= 0; got ({l},{s})")));
        }
        let pair = self.tensor_pair(-l, -1, 2, 6 + s);
        let dst = self.interval(-l, 2 + s);
        let n = self.n();
        let phi = &self.ints.phi;
        let h = &self.ints.h;
        let mut mat = Mat::zeros(dst.dim(), pair.dim());
        let left_slots = l as usize;
        for j in 0..pair.dim() {
            let (lj, rj) = pair.split(j);
            let ldigits = pair.left.digits(lj);
            let rdigits = pair.right.digits(rj);
            let (pref, xm1) = (&ldigits[..left_slots - 1], ldigits[left_slots - 1]);
            let (f2, x3, tail) = (rdigits[0], rdigits[1], &rdigits[2..]);
            let f2h = h[f2];
            if f2h.norm() <= 1e-300 {
                continue;
            }
            let mut col = Vect::zeros(dst.dim());
            for &(x1, x2, c) in &self.base.comul[xm1] {
                // φ(S(e_{x2}) e_{x3})
                let mut v = Vect::zeros(n);
                v[x2] = ONE;
                let sx2 = self.base.apply_antipode(&v);
                let mut w = Vect::zeros(n);
                w[x3] = ONE;
                let prod = self.base.multiply(&sx2, &w);
                let scalar = KacAlgebra::pair(phi, &prod) * f2h * c;
                if scalar.norm() <= 1e-300 {
                    continue;
                }
                let mut digits = pref.to_vec();
                digits.push(x1);
                digits.extend_from_slice(tail);
                let idx = digits.iter().fold(0usize, |acc, &d| acc * n + d);
                col[idx] += scalar;
            }
            for (t, &c) in col.iter().enumerate() {
                if c.norm() > 1e-300 {
                    mat[(t, j)] += c;
                }
            }
        }
        let srcref: AlgRef = Arc::clone(&pair) as AlgRef;
        let dstref: AlgRef = Arc::clone(&dst) as AlgRef;
        Ok(AlgMap::new(&srcref, &dstref, mat))
    }

    /// The canonical action f.x = f(x_2) x_1 of H* on H (direction `DualOnBase`)
    /// or its mirror (x.f)(y) = f(yx) of H on H*.
    pub fn canonical_action(&self, direction: ActionDirection, u: &Vect, v: &Vect) -> Vect {
        let n = self.n();
        let mut out = Vect::zeros(n);
        match direction {
            ActionDirection::DualOnBase => {
                for (f, &uf) in u.iter().enumerate() {
                    if uf.norm() <= 1e-300 {
                        continue;
                    }
                    for (x, &vx) in v.iter().enumerate() {
                        if vx.norm() <= 1e-300 {
                            continue;
                        }
                        for &(p, c) in &self.actions.fx[f][x] {
                            out[p] += uf * vx * c;
                        }
                    }
                }
            }
            ActionDirection::BaseOnDual => {
                for (x, &ux) in u.iter().enumerate() {
                    if ux.norm() <= 1e-300 {
                        continue;
                    }
                    for (f, &vf) in v.iter().enumerate() {
                        if vf.norm() <= 1e-300 {
                            continue;
                        }
                        for &(p, c) in &self.actions.xf[x][f] {
                            out[p] += ux * vf * c;
                        }
                    }
                }
            }
        }
        out
    }

    /// Build an interval element that places the given per-slot vectors at
    /// `legs` and slot units everywhere else.
    pub fn element_with_legs(
        &self,
        ambient: &Arc<IntervalAlgebra>,
        legs: &[(i64, Vect)],
    ) -> Result<Vect> {
        let mut col = Vect::from_element(1, ONE);
        for s in ambient.lo..=ambient.hi {
            let mut placed: Option<&Vect> = None;
            for (ls, v) in legs {
                if *ls == s {
                    if placed.is_some() {
                        return Err(KacError::Dimension(format!("duplicate leg at slot {s}")));
                    }
                    placed = Some(v);
                }
            }
            match placed {
                Some(v) => col = kron(&col, v),
                None => col = kron(&col, &ambient.slot_unit(s)),
            }
        }
        for (ls, _) in legs {
            if *ls < ambient.lo || *ls > ambient.hi {
                return Err(KacError::Dimension(format!("leg slot {ls} outside ambient")));
            }
        }
        Ok(col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionDirection {
    /// H* acting on H by f.x = f(x_2) x_1.
    DualOnBase,
    /// H acting on H* by (x.f)(y) = f(yx).
    BaseOnDual,
}

/// Worst-case commutator residual between images of two algebra maps with a
/// common target, over all basis pairs.
pub fn commutation_residual(a: &AlgMap, b: &AlgMap) -> Result<f64> {
    if !Arc::ptr_eq(&a.dst, &b.dst) {
        return Err(KacError::AmbientMismatch("commutation of maps with different targets".into()));
    }
    let alg = a.dst.as_ref();
    let mut worst = 0.0f64;
    for i in 0..a.src.dim() {
        let x = a.column(i);
        for j in 0..b.src.dim() {
            let y = b.column(j);
            let xy = multiply(alg, &x, &y);
            let yx = multiply(alg, &y, &x);
            worst = worst.max((xy - yx).norm());
        }
    }
    Ok(worst)
}

/// Star of a dense element (free-function form used across modules).
pub fn star_of(alg: &dyn TracedAlgebra, v: &Vect) -> Vect {
    star(alg, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{conditional_expectation, trace, trace_onb};
    use crate::zoo::{group_algebra, GroupTable};
    use rand::Rng;
    use rand::SeedableRng;

    fn z2_ctx() -> CrossedContext {
        let base = group_algebra(&GroupTable::cyclic(2)).unwrap();
        CrossedContext::new(&base).unwrap()
    }

    fn basis_vec(n: usize, i: usize) -> Vect {
        let mut v = Vect::zeros(n);
        v[i] = ONE;
        v
    }

    fn random_vec(n: usize, rng: &mut impl Rng) -> Vect {
        Vect::from_iterator(n, (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)))
    }

    #[test]
    fn canonical_action_examples() {
        let ctx = z2_ctx();
        // δ_g . g = δ_g(g) g = g
        let dg = basis_vec(2, 1);
        let g = basis_vec(2, 1);
        let out = ctx.canonical_action(ActionDirection::DualOnBase, &dg, &g);
        assert!((out - &g).norm() < 1e-12);
        // ε . x = x for every basis x
        let eps = ctx.dual.unit.clone();
        for i in 0..2 {
            let x = basis_vec(2, i);
            let out = ctx.canonical_action(ActionDirection::DualOnBase, &eps, &x);
            assert!((out - &x).norm() < 1e-12);
        }
        // 1 . f = f in the mirrored action
        for i in 0..2 {
            let f = basis_vec(2, i);
            let out = ctx.canonical_action(ActionDirection::BaseOnDual, &ctx.base.unit, &f);
            assert!((out - &f).norm() < 1e-12);
        }
    }

    #[test]
    fn module_algebra_law_both_directions() {
        let base = group_algebra(&GroupTable::s3()).unwrap();
        let ctx = CrossedContext::new(&base).unwrap();
        let n = 6;
        // α_f(xy) = α_{f_1}(x) α_{f_2}(y) for the H* action on H
        for fi in 0..n {
            for xi in 0..n {
                for yi in 0..n {
                    let x = basis_vec(n, xi);
                    let y = basis_vec(n, yi);
                    let f = basis_vec(n, fi);
                    let xy = ctx.base.multiply(&x, &y);
                    let lhs = ctx.canonical_action(ActionDirection::DualOnBase, &f, &xy);
                    let mut rhs = Vect::zeros(n);
                    for &(f1, f2, c) in &ctx.dual.comul[fi] {
                        let ax = ctx.canonical_action(
                            ActionDirection::DualOnBase,
                            &basis_vec(n, f1),
                            &x,
                        );
                        let ay = ctx.canonical_action(
                            ActionDirection::DualOnBase,
                            &basis_vec(n, f2),
                            &y,
                        );
                        rhs += ctx.base.multiply(&ax, &ay) * c;
                    }
                    assert!((lhs - rhs).norm() < 1e-9);
                }
            }
        }
        // α_x(fg) = α_{x_1}(f) α_{x_2}(g) for the mirrored H action on H*
        for xi in 0..n {
            for fi in 0..n {
                for gi in 0..n {
                    let f = basis_vec(n, fi);
                    let g = basis_vec(n, gi);
                    let x = basis_vec(n, xi);
                    let fg = ctx.dual.multiply(&f, &g);
                    let lhs = ctx.canonical_action(ActionDirection::BaseOnDual, &x, &fg);
                    let mut rhs = Vect::zeros(n);
                    for &(x1, x2, c) in &ctx.base.comul[xi] {
                        let af = ctx.canonical_action(
                            ActionDirection::BaseOnDual,
                            &basis_vec(n, x1),
                            &f,
                        );
                        let ag = ctx.canonical_action(
                            ActionDirection::BaseOnDual,
                            &basis_vec(n, x2),
                            &g,
                        );
                        rhs += ctx.dual.multiply(&af, &ag) * c;
                    }
                    assert!((lhs - rhs).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn crossed_multiplication_example() {
        // H_{[0,1]} for H = C[Z_2]: (δ_e ⋊ g)(δ_g ⋊ g) = δ_e ⋊ 1
        let ctx = z2_ctx();
        let a01 = ctx.interval(0, 1);
        // index = f-digit * 2 + x-digit
        let lhs_idx = 0 * 2 + 1; // δ_e ⋊ g
        let rhs_idx = 1 * 2 + 1; // δ_g ⋊ g
        let prod = a01.mul_basis(lhs_idx, rhs_idx);
        let dense = crate::kac::dense_from_sparse(&prod, 4);
        let mut expected = Vect::zeros(4);
        expected[0] = ONE; // δ_e ⋊ 1
        assert!((dense - expected).norm() < 1e-12);
    }

    #[test]
    fn empty_interval_is_scalars() {
        let ctx = z2_ctx();
        let c = ctx.interval(3, 1);
        assert_eq!(c.dim(), 1);
        assert_eq!(c.mul_basis(0, 0), vec![(0, ONE)]);
        assert!((trace(c.as_ref(), &c.unit()) - ONE).norm() < 1e-12);
    }

    #[test]
    fn interval_is_associative_and_unital() {
        let ctx = z2_ctx();
        let alg = ctx.interval(0, 2);
        let n = alg.dim();
        let u = alg.unit();
        for i in 0..n {
            let ei = basis_vec(n, i);
            assert!((multiply(alg.as_ref(), &u, &ei) - &ei).norm() < 1e-12);
            assert!((multiply(alg.as_ref(), &ei, &u) - &ei).norm() < 1e-12);
            for j in 0..n {
                let ej = basis_vec(n, j);
                let ij = multiply(alg.as_ref(), &ei, &ej);
                for k in 0..n {
                    let ek = basis_vec(n, k);
                    let jk = multiply(alg.as_ref(), &ej, &ek);
                    let lhs = multiply(alg.as_ref(), &ij, &ek);
                    let rhs = multiply(alg.as_ref(), &ei, &jk);
                    assert!((lhs - rhs).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn far_slots_commute() {
        // elements supported in slots p, q with |p - q| >= 2 commute
        let ctx = z2_ctx();
        let alg = ctx.interval(0, 3);
        for i in 0..2 {
            for j in 0..2 {
                let x = ctx
                    .element_with_legs(&alg, &[(0, basis_vec(2, i))])
                    .unwrap();
                let y = ctx
                    .element_with_legs(&alg, &[(2, basis_vec(2, j))])
                    .unwrap();
                let xy = multiply(alg.as_ref(), &x, &y);
                let yx = multiply(alg.as_ref(), &y, &x);
                assert!((xy - yx).norm() < 1e-12);
                let x = ctx
                    .element_with_legs(&alg, &[(1, basis_vec(2, i))])
                    .unwrap();
                let y = ctx
                    .element_with_legs(&alg, &[(3, basis_vec(2, j))])
                    .unwrap();
                let xy = multiply(alg.as_ref(), &x, &y);
                let yx = multiply(alg.as_ref(), &y, &x);
                assert!((xy - yx).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn star_is_antimultiplicative_involution() {
        let ctx = z2_ctx();
        let alg = ctx.interval(-1, 2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let x = random_vec(alg.dim(), &mut rng);
            let y = random_vec(alg.dim(), &mut rng);
            let lhs = star(alg.as_ref(), &multiply(alg.as_ref(), &x, &y));
            let rhs = multiply(alg.as_ref(), &star(alg.as_ref(), &y), &star(alg.as_ref(), &x));
            assert!((lhs - rhs).norm() < 1e-9);
            let xss = star(alg.as_ref(), &star(alg.as_ref(), &x));
            assert!((xss - x).norm() < 1e-10);
        }
        assert!((star(alg.as_ref(), &alg.unit()) - alg.unit()).norm() < 1e-12);
    }

    #[test]
    fn trace_examples_and_traciality() {
        let ctx = z2_ctx();
        let a01 = ctx.interval(0, 1);
        // tr(δ_e ⋊ 1) = δ_e(h) φ(1) = 1/2
        let x = basis_vec(4, 0 * 2 + 0); // δ_e ⋊ e, and e = 1 in C[Z_2]
        assert!((trace(a01.as_ref(), &x) - crate::scalar::cr(0.5)).norm() < 1e-12);
        assert!((trace(a01.as_ref(), &a01.unit()) - ONE).norm() < 1e-12);
        // traciality on H_{[0,3]}
        let a03 = ctx.interval(0, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..6 {
            let x = random_vec(a03.dim(), &mut rng);
            let y = random_vec(a03.dim(), &mut rng);
            let txy = trace(a03.as_ref(), &multiply(a03.as_ref(), &x, &y));
            let tyx = trace(a03.as_ref(), &multiply(a03.as_ref(), &y, &x));
            assert!((txy - tyx).norm() < 1e-9, "trace fails to be tracial");
        }
        // positivity and faithfulness on basis elements
        for i in 0..a03.dim() {
            let e = basis_vec(a03.dim(), i);
            let es = star(a03.as_ref(), &e);
            let t = trace(a03.as_ref(), &multiply(a03.as_ref(), &es, &e));
            assert!(t.re > 1e-12 && t.im.abs() < 1e-12);
        }
    }

    #[test]
    fn natural_inclusions_are_algebra_maps() {
        let ctx = z2_ctx();
        let small = ctx.interval(0, 1);
        let big = ctx.interval(-1, 2);
        let incl = ctx.natural_inclusion(&small, &big).unwrap();
        assert!(incl.multiplicativity_residual() < 1e-10);
        assert!(incl.unitality_residual() < 1e-12);
        assert!(incl.star_residual() < 1e-10);
        assert!(incl.trace_residual() < 1e-12);
        // composing embeddings equals the direct embedding
        let mid = ctx.interval(0, 3);
        let big2 = ctx.interval(-1, 4);
        let step1 = ctx.natural_inclusion(&small, &mid).unwrap();
        let step2 = ctx.natural_inclusion(&mid, &big2).unwrap();
        let direct = ctx.natural_inclusion(&small, &big2).unwrap();
        let composed = step2.compose(&step1).unwrap();
        assert!((composed.mat - direct.mat).norm() < 1e-12);
    }

    #[test]
    fn prime_map_is_star_anti_isomorphism() {
        let ctx = z2_ctx();
        // A(H*)_3 = H_{[0,2]}
        let alg = ctx.interval(0, 2);
        let prime = ctx.prime_map(&alg).unwrap();
        assert_eq!(prime.dst.dim(), alg.dim());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let x = random_vec(alg.dim(), &mut rng);
            let y = random_vec(alg.dim(), &mut rng);
            let lhs = prime.apply(&multiply(alg.as_ref(), &x, &y));
            let rhs = multiply(
                prime.dst.as_ref(),
                &prime.apply(&y),
                &prime.apply(&x),
            );
            assert!((lhs - rhs).norm() < 1e-9, "(XY)' = Y'X' fails");
            let lhs = prime.apply(&star(alg.as_ref(), &x));
            let rhs = star(prime.dst.as_ref(), &prime.apply(&x));
            assert!((lhs - rhs).norm() < 1e-9, "(X*)' = (X')* fails");
        }
        // identity maps to identity; applying twice gives back the original
        assert!((prime.apply(&alg.unit()) - prime.dst.unit()).norm() < 1e-12);
        let twice = &prime.mat * &prime.mat;
        assert!((twice - Mat::identity(alg.dim(), alg.dim())).norm() < 1e-12);
    }

    #[test]
    fn psi_embedding_is_monomorphism() {
        let ctx = z2_ctx();
        let psi = ctx.psi_embedding(1, 0).unwrap();
        // unit to unit
        assert!(psi.unitality_residual() < 1e-12);
        // multiplicative on all basis pairs
        assert!(psi.multiplicativity_residual() < 1e-9);
        assert!(psi.star_residual() < 1e-9);
        // injective
        assert!(psi.injectivity_margin() > 1e-6);
        // trace-compatible
        assert!(psi.trace_residual() < 1e-12);
    }

    #[test]
    fn cond_exp_interval_matches_generic_projection() {
        let ctx = z2_ctx();
        // E: H_{[0,1]} -> H_0 kills δ_e ⋊ g
        let a01 = ctx.interval(0, 1);
        let e = ctx.cond_exp_interval(&a01, &[(0, 0)]).unwrap();
        let x = basis_vec(4, 0 * 2 + 1);
        assert!((&e * &x).norm() < 1e-12, "E(δ_e ⋊ g) = φ(g) δ_e = 0");
        // fixes the target subalgebra
        let emb = ctx
            .natural_inclusion(&ctx.interval(0, 0), &a01)
            .unwrap();
        for j in 0..2 {
            let v = emb.column(j);
            assert!(((&e * &v) - &v).norm() < 1e-12);
        }
        // trace-preserving and equal to the trace-orthogonal projection
        let amb = ctx.interval(-1, 2);
        let kept = [(-1i64, -1i64), (2, 2)];
        let em = ctx.cond_exp_interval(&amb, &kept).unwrap();
        let pair = ctx.tensor_pair(-1, -1, 2, 2);
        let incl = ctx.pair_inclusion(&pair).unwrap();
        let image: Vec<Vect> = (0..pair.dim()).map(|j| incl.column(j)).collect();
        let onb = trace_onb(amb.as_ref(), &image, 1e-10);
        assert_eq!(onb.len(), 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..6 {
            let x = random_vec(amb.dim(), &mut rng);
            let via_formula = &em * &x;
            let via_onb = conditional_expectation(amb.as_ref(), &onb, &x);
            assert!(
                (via_formula.clone() - via_onb).norm() < 1e-9,
                "trace-out formula disagrees with orthogonal projection"
            );
            let t1 = trace(amb.as_ref(), &x);
            let t2 = trace(amb.as_ref(), &via_formula);
            assert!((t1 - t2).norm() < 1e-10);
        }
    }

    #[test]
    fn cond_exp_psi_properties() {
        let ctx = z2_ctx();
        let psi = ctx.psi_embedding(1, 0).unwrap();
        let exp = ctx.cond_exp_psi(1, 0).unwrap();
        let src = ctx.interval(-1, 2);
        let pair_ref = &psi.dst;
        // E ∘ ψ = id on H_{[-1,2]}
        let composed = &exp.mat * &psi.mat;
        assert!((composed - Mat::identity(src.dim(), src.dim())).norm() < 1e-10);
        // trace-preserving: tr(E(Y)) = tr(Y)
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..6 {
            let y = random_vec(pair_ref.dim(), &mut rng);
            let t1 = trace(pair_ref.as_ref(), &y);
            let t2 = trace(src.as_ref(), &exp.apply(&y));
            assert!((t1 - t2).norm() < 1e-9, "cond_exp_psi is not trace-preserving");
        }
        // bimodule law: E(ψ(X) Y ψ(X~)) = X E(Y) X~
        for _ in 0..6 {
            let x = random_vec(src.dim(), &mut rng);
            let xt = random_vec(src.dim(), &mut rng);
            let y = random_vec(pair_ref.dim(), &mut rng);
            let lhs = exp.apply(&multiply(
                pair_ref.as_ref(),
                &multiply(pair_ref.as_ref(), &psi.apply(&x), &y),
                &psi.apply(&xt),
            ));
            let rhs = multiply(
                src.as_ref(),
                &multiply(src.as_ref(), &x, &exp.apply(&y)),
                &xt,
            );
            assert!((lhs - rhs).norm() < 1e-9, "bimodule law fails");
        }
    }

    #[test]
    fn pair_inclusion_is_algebra_map() {
        let ctx = z2_ctx();
        let pair = ctx.tensor_pair(-1, -1, 2, 2);
        let incl = ctx.pair_inclusion(&pair).unwrap();
        assert!(incl.multiplicativity_residual() < 1e-10);
        assert!(incl.unitality_residual() < 1e-12);
        assert!(incl.star_residual() < 1e-10);
        assert!(incl.trace_residual() < 1e-12);
    }

    #[test]
    fn unpad_inverts_padding() {
        let ctx = z2_ctx();
        let small = ctx.interval(0, 2);
        let big = ctx.interval(0, 3);
        let pad = ctx.natural_inclusion(&small, &big).unwrap();
        let unpad = ctx.unpad_last(&big).unwrap();
        let round = &unpad.mat * &pad.mat;
        assert!((round - Mat::identity(small.dim(), small.dim())).norm() < 1e-12);
    }
}
