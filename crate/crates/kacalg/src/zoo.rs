//! Constructors for concrete Kac algebras: group algebras, function algebras
//! and algebras loaded from structure-constant files.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{KacError, Result};
use crate::kac::{with_integrals, KacAlgebra, SparseComul, SparseVec};
use crate::linalg::{Mat, Vect};
use crate::scalar::{C64, ONE};

/// A finite group as a Cayley table. `cayley[a][b]` is the product "a then b":
/// composing permutations, the row element acts first.
#[derive(Clone, Debug)]
pub struct GroupTable {
    pub order: usize,
    pub cayley: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
    pub labels: Vec<String>,
    pub name: String,
}

impl GroupTable {
    pub fn new(name: &str, cayley: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let order = cayley.len();
        if order == 0 {
            return Err(KacError::InvalidGroupTable("empty table".into()));
        }
        for row in &cayley {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(KacError::InvalidGroupTable("ragged or out-of-range row".into()));
            }
        }
        // Latin square
        for i in 0..order {
            let mut seen_row = vec![false; order];
            let mut seen_col = vec![false; order];
            for j in 0..order {
                if seen_row[cayley[i][j]] || seen_col[cayley[j][i]] {
                    return Err(KacError::InvalidGroupTable("not a Latin square".into()));
                }
                seen_row[cayley[i][j]] = true;
                seen_col[cayley[j][i]] = true;
            }
        }
        // identity
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| cayley[e][x] == x && cayley[x][e] == x))
            .ok_or_else(|| KacError::InvalidGroupTable("no identity".into()))?;
        // associativity
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]] {
                        return Err(KacError::InvalidGroupTable("not associative".into()));
                    }
                }
            }
        }
        let mut inverse = vec![0usize; order];
        for a in 0..order {
            inverse[a] = (0..order)
                .find(|&b| cayley[a][b] == identity)
                .ok_or_else(|| KacError::InvalidGroupTable("missing inverse".into()))?;
        }
        let labels = if labels.len() == order {
            labels
        } else {
            (0..order).map(|i| format!("g{i}")).collect()
        };
        Ok(GroupTable {
            order,
            cayley,
            inverse,
            identity,
            labels,
            name: name.to_string(),
        })
    }

    pub fn cyclic(k: usize) -> Self {
        let cayley = (0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect();
        let labels = (0..k)
            .map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") })
            .collect();
        GroupTable::new(&format!("Z{k}"), cayley, labels).expect("cyclic group is valid")
    }

    pub fn product(a: &GroupTable, b: &GroupTable) -> Self {
        let n = a.order * b.order;
        let idx = |x: usize, y: usize| x * b.order + y;
        let mut cayley = vec![vec![0usize; n]; n];
        for x1 in 0..a.order {
            for y1 in 0..b.order {
                for x2 in 0..a.order {
                    for y2 in 0..b.order {
                        cayley[idx(x1, y1)][idx(x2, y2)] =
                            idx(a.cayley[x1][x2], b.cayley[y1][y2]);
                    }
                }
            }
        }
        let labels = (0..a.order)
            .flat_map(|x| {
                let b_labels = b.labels.clone();
                let ax = a.labels[x].clone();
                b_labels.into_iter().map(move |by| format!("({ax},{by})"))
            })
            .collect();
        GroupTable::new(&format!("{}x{}", a.name, b.name), cayley, labels)
            .expect("product group is valid")
    }

    /// The symmetric group on three points, as permutations in one-line
    /// notation composed left-to-right (row acts first).
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let labels = vec!["e", "(23)", "(12)", "(123)", "(132)", "(13)"]
            .into_iter()
            .map(String::from)
            .collect();
        let find = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
        let mut cayley = vec![vec![0usize; 6]; 6];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                // i then j: x -> q(p(x))
                let composite = [q[p[0]], q[p[1]], q[p[2]]];
                cayley[i][j] = find(&composite);
            }
        }
        GroupTable::new("S3", cayley, labels).expect("S3 is valid")
    }

    pub fn trivial() -> Self {
        GroupTable::new("1", vec![vec![0]], vec!["e".into()]).expect("trivial group")
    }

    /// Builtin groups accepted by the CLI.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "Z2" => Ok(GroupTable::cyclic(2)),
            "Z3" => Ok(GroupTable::cyclic(3)),
            "Z4" => Ok(GroupTable::cyclic(4)),
            "Z2xZ2" => Ok(GroupTable::product(
                &GroupTable::cyclic(2),
                &GroupTable::cyclic(2),
            )),
            "S3" => Ok(GroupTable::s3()),
            other => Err(KacError::Parse(format!("unknown builtin group {other}"))),
        }
    }
}

/// The group algebra C[G]: basis indexed by group elements, Δ(g) = g ⊗ g,
/// S(g) = g^{-1} = g*.
pub fn group_algebra(t: &GroupTable) -> Result<Arc<KacAlgebra>> {
    let n = t.order;
    let mut mul = vec![vec![SparseVec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            mul[i][j].push((t.cayley[i][j], ONE));
        }
    }
    let mut unit = Vect::zeros(n);
    unit[t.identity] = ONE;
    let comul: Vec<SparseComul> = (0..n).map(|i| vec![(i, i, ONE)]).collect();
    let counit = Vect::from_element(n, ONE);
    let mut antipode = Mat::zeros(n, n);
    let mut star = Mat::zeros(n, n);
    for i in 0..n {
        antipode[(t.inverse[i], i)] = ONE;
        star[(t.inverse[i], i)] = ONE;
    }
    with_integrals(KacAlgebra {
        name: format!("C[{}]", t.name),
        dim: n,
        basis_labels: t.labels.clone(),
        mul,
        unit,
        comul,
        counit,
        antipode,
        star_mat: star,
        delta: (n as f64).sqrt(),
        integrals: None,
    })
}

/// The function algebra C(G): indicator functions under pointwise product,
/// Δ(δ_s) = Σ_{uv=s} δ_u ⊗ δ_v.
pub fn function_algebra(t: &GroupTable) -> Result<Arc<KacAlgebra>> {
    let n = t.order;
    let mut mul = vec![vec![SparseVec::new(); n]; n];
    for i in 0..n {
        mul[i][i].push((i, ONE));
    }
    let unit = Vect::from_element(n, ONE);
    let mut comul = vec![SparseComul::new(); n];
    for u in 0..n {
        for v in 0..n {
            comul[t.cayley[u][v]].push((u, v, ONE));
        }
    }
    let mut counit = Vect::zeros(n);
    counit[t.identity] = ONE;
    let mut antipode = Mat::zeros(n, n);
    for i in 0..n {
        antipode[(t.inverse[i], i)] = ONE;
    }
    let star = Mat::identity(n, n);
    with_integrals(KacAlgebra {
        name: format!("C({})", t.name),
        dim: n,
        basis_labels: t.labels.iter().map(|l| format!("d_{l}")).collect(),
        mul,
        unit,
        comul,
        counit,
        antipode,
        star_mat: star,
        delta: (n as f64).sqrt(),
        integrals: None,
    })
}

/// Tensor product of two Kac algebras, basis index `i*dim_b + j`.
pub fn kac_tensor(a: &Arc<KacAlgebra>, b: &Arc<KacAlgebra>) -> Result<Arc<KacAlgebra>> {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let idx = |i: usize, j: usize| i * nb + j;
    let mut mul = vec![vec![SparseVec::new(); n]; n];
    for i1 in 0..na {
        for j1 in 0..nb {
            for i2 in 0..na {
                for j2 in 0..nb {
                    let mut cell = SparseVec::new();
                    for &(ka, ca) in &a.mul[i1][i2] {
                        for &(kb, cb) in &b.mul[j1][j2] {
                            cell.push((idx(ka, kb), ca * cb));
                        }
                    }
                    mul[idx(i1, j1)][idx(i2, j2)] = cell;
                }
            }
        }
    }
    let mut unit = Vect::zeros(n);
    for (i, &ua) in a.unit.iter().enumerate() {
        for (j, &ub) in b.unit.iter().enumerate() {
            unit[idx(i, j)] = ua * ub;
        }
    }
    let mut comul = vec![SparseComul::new(); n];
    for i in 0..na {
        for j in 0..nb {
            for &(p1, q1, c1) in &a.comul[i] {
                for &(p2, q2, c2) in &b.comul[j] {
                    comul[idx(i, j)].push((idx(p1, p2), idx(q1, q2), c1 * c2));
                }
            }
        }
    }
    let mut counit = Vect::zeros(n);
    for i in 0..na {
        for j in 0..nb {
            counit[idx(i, j)] = a.counit[i] * b.counit[j];
        }
    }
    let mut antipode = Mat::zeros(n, n);
    let mut star = Mat::zeros(n, n);
    for i in 0..na {
        for j in 0..nb {
            for p in 0..na {
                for q in 0..nb {
                    antipode[(idx(p, q), idx(i, j))] = a.antipode[(p, i)] * b.antipode[(q, j)];
                    star[(idx(p, q), idx(i, j))] = a.star_mat[(p, i)] * b.star_mat[(q, j)];
                }
            }
        }
    }
    let labels = (0..na)
        .flat_map(|i| {
            let la = a.basis_labels[i].clone();
            let bl = b.basis_labels.clone();
            bl.into_iter().map(move |lb| format!("{la}*{lb}"))
        })
        .collect();
    with_integrals(KacAlgebra {
        name: format!("{}(x){}", a.name, b.name),
        dim: n,
        basis_labels: labels,
        mul,
        unit,
        comul,
        counit,
        antipode,
        star_mat: star,
        delta: (n as f64).sqrt(),
        integrals: None,
    })
}

// ---------------------------------------------------------------------------
// structure-constant file format
// ---------------------------------------------------------------------------

type CPair = [f64; 2];

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    dim: usize,
    basis: Vec<String>,
    /// mul[i][j] = dense coefficient vector of e_i e_j
    mul: Vec<Vec<Vec<CPair>>>,
    /// comul[i] = sparse list [p, q, [re, im]]
    comul: Vec<Vec<(usize, usize, CPair)>>,
    counit: Vec<CPair>,
    antipode: Vec<Vec<CPair>>,
    star: Vec<Vec<CPair>>,
    #[serde(default)]
    unit: Option<Vec<CPair>>,
}

fn cpx(p: CPair) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(z: C64) -> CPair {
    [z.re, z.im]
}

/// Load an algebra from the JSON structure-constant format. The algebra is
/// returned even when the axiom suite fails; callers inspect the report.
pub fn load_algebra(path: &Path) -> Result<(Arc<KacAlgebra>, crate::kac::AxiomReport)> {
    let text = std::fs::read_to_string(path)?;
    let file: AlgebraFile = serde_json::from_str(&text)
        .map_err(|e| KacError::Parse(format!("{}: {e}", path.display())))?;
    let n = file.dim;
    if file.mul.len() != n || file.comul.len() != n || file.counit.len() != n {
        return Err(KacError::Parse(format!(
            "{}: tensor sizes disagree with dim {n}",
            path.display()
        )));
    }
    let mut mul = vec![vec![SparseVec::new(); n]; n];
    for i in 0..n {
        if file.mul[i].len() != n {
            return Err(KacError::Parse(format!("{}: mul[{i}] has wrong arity", path.display())));
        }
        for j in 0..n {
            if file.mul[i][j].len() != n {
                return Err(KacError::Parse(format!(
                    "{}: mul[{i}][{j}] has wrong length",
                    path.display()
                )));
            }
            for (k, &p) in file.mul[i][j].iter().enumerate() {
                let z = cpx(p);
                if z.norm() > 0.0 {
                    mul[i][j].push((k, z));
                }
            }
        }
    }
    let comul = file
        .comul
        .iter()
        .map(|row| row.iter().map(|&(p, q, z)| (p, q, cpx(z))).collect())
        .collect();
    let counit = Vect::from_vec(file.counit.iter().map(|&p| cpx(p)).collect());
    let to_mat = |rows: &Vec<Vec<CPair>>, what: &str| -> Result<Mat> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(KacError::Parse(format!(
                "{}: {what} is not {n}x{n}",
                path.display()
            )));
        }
        let mut m = Mat::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &p) in r.iter().enumerate() {
                m[(i, j)] = cpx(p);
            }
        }
        Ok(m)
    };
    let antipode = to_mat(&file.antipode, "antipode")?;
    let star = to_mat(&file.star, "star")?;
    let unit = match file.unit {
        Some(u) => Vect::from_vec(u.iter().map(|&p| cpx(p)).collect()),
        None => solve_unit(&mul, n)?,
    };
    let alg = KacAlgebra {
        name: file.name,
        dim: n,
        basis_labels: file.basis,
        mul,
        unit,
        comul,
        counit,
        antipode,
        star_mat: star,
        delta: (n as f64).sqrt(),
        integrals: None,
    };
    let arc = Arc::new(alg);
    let report = crate::kac::verify_kac_axioms(&arc);
    let arc = if report.pass() {
        // re-wrap with integrals attached
        match crate::kac::with_integrals(clone_for_attach(&arc)) {
            Ok(a) => a,
            Err(_) => arc,
        }
    } else {
        arc
    };
    Ok((arc, report))
}

fn clone_for_attach(a: &Arc<KacAlgebra>) -> KacAlgebra {
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
        integrals: None,
    }
}

fn solve_unit(mul: &[Vec<SparseVec>], n: usize) -> Result<Vect> {
    // unit u satisfies sum_i u_i (e_i e_j) = e_j for all j
    let mut m = Mat::zeros(n * n, n);
    let mut rhs = crate::linalg::Vect::zeros(n * n);
    for j in 0..n {
        rhs[j * n + j] = ONE;
        for i in 0..n {
            for &(k, c) in &mul[i][j] {
                m[(j * n + k, i)] += c;
            }
        }
    }
    let u = crate::linalg::lstsq(&m, &rhs, 1e-12);
    let residual = (&m * &u - rhs).norm();
    if residual > 1e-8 {
        return Err(KacError::Parse("file algebra has no unit".into()));
    }
    Ok(u)
}

/// Serialise an algebra into the structure-constant JSON format.
pub fn save_algebra(alg: &KacAlgebra, path: &Path) -> Result<()> {
    let n = alg.dim;
    let mul = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let dense = crate::kac::dense_from_sparse(&alg.mul[i][j], n);
                    dense.iter().map(|&z| pair(z)).collect()
                })
                .collect()
        })
        .collect();
    let comul = alg
        .comul
        .iter()
        .map(|row| row.iter().map(|&(p, q, c)| (p, q, pair(c))).collect())
        .collect();
    let file = AlgebraFile {
        name: alg.name.clone(),
        dim: n,
        basis: alg.basis_labels.clone(),
        mul,
        comul,
        counit: alg.counit.iter().map(|&z| pair(z)).collect(),
        antipode: (0..n)
            .map(|i| (0..n).map(|j| pair(alg.antipode[(i, j)])).collect())
            .collect(),
        star: (0..n)
            .map(|i| (0..n).map(|j| pair(alg.star_mat[(i, j)])).collect())
            .collect(),
        unit: Some(alg.unit.iter().map(|&z| pair(z)).collect()),
    };
    let text = serde_json::to_string_pretty(&file).expect("serialisable");
    std::fs::write(path, text)?;
    Ok(())
}

/// Helper used by tests and the CLI: residual of commutativity of the
/// multiplication (0 for commutative algebras).
pub fn commutativity_residual(a: &Arc<KacAlgebra>) -> f64 {
    let n = a.dim;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let ij = crate::kac::dense_from_sparse(&a.mul[i][j], n);
            let ji = crate::kac::dense_from_sparse(&a.mul[j][i], n);
            worst = worst.max((ij - ji).norm());
        }
    }
    worst
}

/// Residual of cocommutativity of the comultiplication.
pub fn cocommutativity_residual(a: &Arc<KacAlgebra>) -> f64 {
    let n = a.dim;
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut d = Vect::zeros(n * n);
        let mut dflip = Vect::zeros(n * n);
        for &(p, q, c) in &a.comul[i] {
            d[p * n + q] += c;
            dflip[q * n + p] += c;
        }
        worst = worst.max((d - dflip).norm());
    }
    worst
}

pub fn delta_of(n: usize) -> f64 {
    (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kac::{tensors_equal, verify_kac_axioms, KacAlgebra};

    #[test]
    fn builtin_tables_are_valid_groups() {
        for name in ["Z2", "Z3", "Z4", "Z2xZ2", "S3"] {
            let t = GroupTable::builtin(name).unwrap();
            assert_eq!(t.cayley[t.identity][0], 0);
        }
        let bad = GroupTable::new("bad", vec![vec![0, 0], vec![1, 1]], vec![]);
        assert!(bad.is_err());
    }

    #[test]
    fn trivial_group_gives_complex_numbers() {
        let c = group_algebra(&GroupTable::trivial()).unwrap();
        assert_eq!(c.dim, 1);
        assert!(verify_kac_axioms(&c).pass());
    }

    #[test]
    fn group_algebras_pass_axioms() {
        for name in ["Z2", "Z3", "Z4", "Z2xZ2", "S3"] {
            let t = GroupTable::builtin(name).unwrap();
            let a = group_algebra(&t).unwrap();
            assert!(verify_kac_axioms(&a).pass(), "axioms fail for C[{name}]");
            let f = function_algebra(&t).unwrap();
            assert!(verify_kac_axioms(&f).pass(), "axioms fail for C({name})");
        }
    }

    #[test]
    fn commutativity_properties() {
        let t = GroupTable::s3();
        let g = group_algebra(&t).unwrap();
        let f = function_algebra(&t).unwrap();
        // C[S3] is cocommutative but not commutative; C(S3) the reverse
        assert!(cocommutativity_residual(&g) < 1e-12);
        assert!(commutativity_residual(&g) > 0.5);
        assert!(commutativity_residual(&f) < 1e-12);
        assert!(cocommutativity_residual(&f) > 0.5);
        // abelian case: both commutative and cocommutative
        let z4 = group_algebra(&GroupTable::cyclic(4)).unwrap();
        assert!(commutativity_residual(&z4) < 1e-12);
        assert!(cocommutativity_residual(&z4) < 1e-12);
    }

    #[test]
    fn function_algebra_matches_dual_and_units() {
        let t = GroupTable::cyclic(3);
        let g = group_algebra(&t).unwrap();
        let f = function_algebra(&t).unwrap();
        let d = crate::kac::dual(&g).unwrap();
        assert!(tensors_equal(&f, &d, 1e-12));
        // unit of C(G) is the constant function
        assert!((f.unit.iter().map(|z| (z - ONE).norm()).fold(0.0, f64::max)) < 1e-12);
        // integral of C(Z2) is δ_e
        let fz2 = function_algebra(&GroupTable::cyclic(2)).unwrap();
        let h = fz2.integral().unwrap();
        assert!((h[0] - ONE).norm() < 1e-10 && h[1].norm() < 1e-10);
    }

    #[test]
    fn save_and_load_roundtrip() {
        let dir = std::env::temp_dir().join("kacalg_zoo_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("z3.json");
        let z3 = group_algebra(&GroupTable::cyclic(3)).unwrap();
        save_algebra(&z3, &path).unwrap();
        let (loaded, report) = load_algebra(&path).unwrap();
        assert!(report.pass());
        assert!(tensors_equal(&loaded, &z3, 1e-12));
        // malformed file reports a parse error mentioning the location
        let bad = dir.join("bad.json");
        std::fs::write(&bad, "{ \"name\": \"x\", \n \"dim\": oops }").unwrap();
        let err = load_algebra(&bad).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line"), "error should carry a line number: {msg}");
    }

    #[test]
    fn loaded_axiom_failure_is_flagged_not_fatal() {
        let dir = std::env::temp_dir().join("kacalg_zoo_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("broken.json");
        let z2 = group_algebra(&GroupTable::cyclic(2)).unwrap();
        let mut broken = KacAlgebra {
            name: "broken".into(),
            dim: z2.dim,
            basis_labels: z2.basis_labels.clone(),
            mul: z2.mul.clone(),
            unit: z2.unit.clone(),
            comul: z2.comul.clone(),
            counit: z2.counit.clone(),
            antipode: z2.antipode.clone(),
            star_mat: z2.star_mat.clone(),
            delta: z2.delta,
            integrals: None,
        };
        broken.antipode[(0, 0)] += crate::scalar::cr(0.25);
        save_algebra(&broken, &path).unwrap();
        let (alg, report) = load_algebra(&path).unwrap();
        assert_eq!(alg.dim, 2);
        assert!(!report.pass());
    }
}
