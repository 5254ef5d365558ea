//! Quantum products, Dubrovin connections, flat sections, and the WDVV /
//! Open WDVV residual calculus.
//!
//! The cohomology basis for n Kahler parameters is
//!   (e3, H_1..H_n, D_1..D_n, e0)
//! with e3 the unit in degree 0, H_i the divisor classes, D_i their
//! degree-4 duals and e0 the point class.  The polarization form pairs
//! e3 with e0 and H_i with D_i; all product formulas contract with the
//! symmetric intersection pairing obtained from it by a degree-parity
//! sign flip.  In this basis the unit axiom fixes the classical triple
//! products c(e3, H_i, D_j) = -delta_ij and c(e3, e3, e0) = 1, and the
//! one-parameter connection matrix comes out with entries (+1, -Phi''',
//! -1) in the closed block and -Psi'' in each brane column, matching
//! the normalization used by the period computations in this crate.
//!
//! Flatness of the connection is checked through two independent code
//! paths: the matrix calculus R_ij = dA_j/dt_i - dA_i/dt_j + [A_i, A_j],
//! and an assembly of the same matrices from the WDVV and Open WDVV
//! residual tensors.  Their entry-by-entry agreement is the content of
//! the flatness-equals-WDVV equivalence.

use crate::constants::{rat_i, Rat};
use crate::matrix::QMat;
use crate::series::Series;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pairing matrix is singular")]
    SingularPairing,
    #[error("derived intersection pairing is not symmetric")]
    AsymmetricPairing,
    #[error("operation requires a one-parameter potential")]
    NotRankOne,
    #[error("series shape: {0}")]
    SeriesShape(String),
}

/// Dimension of the even cohomology basis for n Kahler parameters.
pub fn basis_dim(n: usize) -> usize {
    2 * n + 2
}

/// Truncated multivariate q-polynomial with rational exponents e/cover
/// per variable, known modulo total degree trunc_num/cover.
#[derive(Clone, Debug)]
pub struct MPoly {
    nvars: usize,
    cover: i64,
    trunc_num: i64,
    terms: BTreeMap<Vec<i64>, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize, cover: i64, trunc_num: i64) -> Self {
        assert!(nvars >= 1 && cover >= 1 && trunc_num >= 1);
        MPoly { nvars, cover, trunc_num, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, cover: i64, trunc_num: i64, c: Rat) -> Self {
        let mut p = MPoly::zero(nvars, cover, trunc_num);
        p.add_term(&vec![0; nvars], c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cover(&self) -> i64 {
        self.cover
    }

    pub fn trunc_num(&self) -> i64 {
        self.trunc_num
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Rat)> {
        self.terms.iter()
    }

    /// Add c * q^(exps/cover), dropping the term if it lands at or past
    /// the truncation.
    pub fn add_term(&mut self, exps: &[i64], c: Rat) {
        assert_eq!(exps.len(), self.nvars);
        assert!(exps.iter().all(|&e| e >= 0), "negative exponent");
        let total: i64 = exps.iter().sum();
        if total >= self.trunc_num || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.to_vec()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(exps);
        }
    }

    pub fn coeff(&self, exps: &[i64]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    /// Minimal total degree (in cover units) of a stored term; the
    /// truncation when there is none.
    fn valuation_num(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .min()
            .unwrap_or(self.trunc_num)
    }

    /// Rewrite on a multiple of the current cover.
    fn lift_cover(&self, new_cover: i64) -> MPoly {
        assert!(new_cover % self.cover == 0);
        let f = new_cover / self.cover;
        if f == 1 {
            return self.clone();
        }
        let mut out = MPoly::zero(self.nvars, new_cover, self.trunc_num * f);
        for (e, c) in &self.terms {
            let scaled: Vec<i64> = e.iter().map(|x| x * f).collect();
            out.terms.insert(scaled, c.clone());
        }
        out
    }

    /// Drop the cover to the smallest compatible value.
    pub fn normalize_cover(&self) -> MPoly {
        let mut g = self.cover;
        for e in self.terms.keys() {
            for &x in e {
                g = g.gcd(&x);
            }
        }
        g = g.gcd(&self.trunc_num);
        if g <= 1 {
            return self.clone();
        }
        let mut out = MPoly::zero(self.nvars, self.cover / g, self.trunc_num / g);
        for (e, c) in &self.terms {
            let scaled: Vec<i64> = e.iter().map(|x| x / g).collect();
            out.terms.insert(scaled, c.clone());
        }
        out
    }

    fn unify(&self, other: &MPoly) -> (MPoly, MPoly) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let cover = self.cover.lcm(&other.cover);
        let mut a = self.lift_cover(cover);
        let mut b = other.lift_cover(cover);
        let trunc = a.trunc_num.min(b.trunc_num);
        a.trunc_num = trunc;
        b.trunc_num = trunc;
        a.terms.retain(|e, _| e.iter().sum::<i64>() < trunc);
        b.terms.retain(|e, _| e.iter().sum::<i64>() < trunc);
        (a, b)
    }

    pub fn neg(&self) -> MPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let (mut a, b) = self.unify(other);
        for (e, c) in &b.terms {
            let entry = a.terms.entry(e.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                a.terms.remove(e);
            }
        }
        a
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars, self.cover, self.trunc_num);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let (a, b) = self.unify(other);
        let trunc = (a.trunc_num + b.valuation_num())
            .min(b.trunc_num + a.valuation_num())
            .min(a.trunc_num);
        let mut out = MPoly::zero(a.nvars, a.cover, trunc.max(1));
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(&e, ca * cb);
            }
        }
        out
    }

    /// Derivative with respect to the i-th flat coordinate t_i, acting
    /// as q^e -> (e_i/cover) q^e.
    pub fn deriv(&self, i: usize) -> MPoly {
        assert!(i < self.nvars);
        let mut out = MPoly::zero(self.nvars, self.cover, self.trunc_num);
        let cov = rat_i(self.cover);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                out.terms.insert(e.clone(), c * rat_i(e[i]) / cov.clone());
            }
        }
        out
    }

    /// View a one-variable polynomial as a log-free series.
    pub fn to_series(&self) -> Result<Series, QuantumError> {
        if self.nvars != 1 {
            return Err(QuantumError::NotRankOne);
        }
        let mut s = Series::zero(self.cover, self.trunc_num);
        for (e, c) in &self.terms {
            s.add_term(e[0], 0, c.clone());
        }
        Ok(s)
    }

    /// Import a log-free one-variable series.
    pub fn from_series(s: &Series) -> Result<MPoly, QuantumError> {
        if !s.is_log_free() {
            return Err(QuantumError::SeriesShape("series carries log terms".into()));
        }
        let mut p = MPoly::zero(1, s.cover(), s.trunc_num());
        for ((e, _), c) in s.iter() {
            p.add_term(&[*e], c.clone());
        }
        Ok(p)
    }
}

impl PartialEq for MPoly {
    fn eq(&self, other: &MPoly) -> bool {
        let a = self.normalize_cover();
        let b = other.normalize_cover();
        a.terms == b.terms
    }
}

/// Gromov-Witten potential: a symmetric classical cubic over the full
/// basis plus a quantum part depending on the Kahler coordinates only.
#[derive(Clone, Debug)]
pub struct Potential {
    n: usize,
    classical: BTreeMap<[usize; 3], Rat>,
    pub quantum: MPoly,
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut k = [a, b, c];
    k.sort_unstable();
    k
}

impl Potential {
    pub fn new(n: usize, quantum: MPoly) -> Result<Self, QuantumError> {
        if n == 0 || quantum.nvars() != n {
            return Err(QuantumError::DimensionMismatch(format!(
                "quantum part has {} variables for n = {n}",
                quantum.nvars()
            )));
        }
        Ok(Potential { n, classical: BTreeMap::new(), quantum })
    }

    /// Structured potential of a Calabi-Yau threefold: unit products
    /// fixed by the pairing, Kahler cubic given by the triple
    /// intersections kappa(i, j, k) on indices 1..=n.
    pub fn closed_cy(
        n: usize,
        kappa: &dyn Fn(usize, usize, usize) -> Rat,
        quantum: MPoly,
    ) -> Result<Self, QuantumError> {
        let mut phi = Potential::new(n, quantum)?;
        let dim = basis_dim(n);
        phi.set_classical(0, 0, dim - 1, Rat::one());
        for i in 1..=n {
            phi.set_classical(0, i, n + i, -Rat::one());
        }
        for i in 1..=n {
            for j in i..=n {
                for k in j..=n {
                    phi.set_classical(i, j, k, kappa(i, j, k));
                }
            }
        }
        Ok(phi)
    }

    /// One-parameter structured potential with triple intersection kappa.
    pub fn rank_one(kappa: Rat, quantum: MPoly) -> Result<Self, QuantumError> {
        Potential::closed_cy(1, &move |_, _, _| kappa.clone(), quantum)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        basis_dim(self.n)
    }

    pub fn set_classical(&mut self, a: usize, b: usize, c: usize, v: Rat) {
        let key = sorted3(a, b, c);
        assert!(key[2] < self.dim(), "basis index out of range");
        if v.is_zero() {
            self.classical.remove(&key);
        } else {
            self.classical.insert(key, v);
        }
    }

    pub fn classical(&self, a: usize, b: usize, c: usize) -> Rat {
        self.classical
            .get(&sorted3(a, b, c))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn is_kahler(&self, idx: usize) -> bool {
        (1..=self.n).contains(&idx)
    }

    /// Third derivative of the full potential along flat coordinates
    /// a, b, c of the basis.
    pub fn d3(&self, a: usize, b: usize, c: usize) -> MPoly {
        let mut out = MPoly::constant(
            self.n,
            self.quantum.cover(),
            self.quantum.trunc_num(),
            self.classical(a, b, c),
        );
        if self.is_kahler(a) && self.is_kahler(b) && self.is_kahler(c) {
            out = out.add(&self.quantum.deriv(a - 1).deriv(b - 1).deriv(c - 1));
        }
        out
    }

    /// All nonzero third derivatives, keyed by sorted index triple.
    pub fn d3_table(&self) -> BTreeMap<[usize; 3], MPoly> {
        let dim = self.dim();
        let mut table = BTreeMap::new();
        for a in 0..dim {
            for b in a..dim {
                for c in b..dim {
                    let v = self.d3(a, b, c);
                    if !v.is_zero() {
                        table.insert([a, b, c], v);
                    }
                }
            }
        }
        table
    }
}

/// Superpotential of a single brane: classical quadratic form on the
/// Kahler directions plus a quantum part.
#[derive(Clone, Debug)]
pub struct OpenPotential {
    pub lambda: Vec<Vec<Rat>>,
    pub quantum: MPoly,
}

impl OpenPotential {
    pub fn new(lambda: Vec<Vec<Rat>>, quantum: MPoly) -> Result<Self, QuantumError> {
        let n = quantum.nvars();
        if lambda.len() != n || lambda.iter().any(|r| r.len() != n) {
            return Err(QuantumError::DimensionMismatch(
                "brane quadratic form size".into(),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                if lambda[i][j] != lambda[j][i] {
                    return Err(QuantumError::DimensionMismatch(
                        "brane quadratic form not symmetric".into(),
                    ));
                }
            }
        }
        Ok(OpenPotential { lambda, quantum })
    }

    pub fn rank_one(lambda: Rat, quantum: MPoly) -> Result<Self, QuantumError> {
        OpenPotential::new(vec![vec![lambda]], quantum)
    }

    /// Second derivative of the superpotential along flat coordinates
    /// a, b of the full basis; nonzero only on Kahler pairs.
    pub fn d2(&self, n: usize, a: usize, b: usize) -> MPoly {
        let kahler = |idx: usize| (1..=n).contains(&idx);
        let mut out = MPoly::zero(self.quantum.nvars(), self.quantum.cover(), self.quantum.trunc_num());
        if kahler(a) && kahler(b) {
            out = out.add(&MPoly::constant(
                self.quantum.nvars(),
                self.quantum.cover(),
                self.quantum.trunc_num(),
                self.lambda[a - 1][b - 1].clone(),
            ));
            out = out.add(&self.quantum.deriv(a - 1).deriv(b - 1));
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct OpenPotentialSet {
    pub branes: Vec<OpenPotential>,
}

impl OpenPotentialSet {
    pub fn new(branes: Vec<OpenPotential>) -> Self {
        OpenPotentialSet { branes }
    }
}

/// Polarization form together with the symmetric intersection pairing
/// derived from it, used to raise indices in all product formulas.
#[derive(Clone, Debug)]
pub struct PairingMatrix {
    pub n: usize,
    pub q: QMat,
    pub eta: QMat,
    pub eta_inv: QMat,
}

fn degree_sign(n: usize, idx: usize) -> i64 {
    if idx == 0 || (idx > n && idx <= 2 * n) {
        1
    } else {
        -1
    }
}

impl PairingMatrix {
    /// Build from a polarization form on the basis (e3, H_i, D_i, e0).
    /// The intersection pairing flips the sign of the odd-parity rows.
    pub fn from_polarization(n: usize, q: QMat) -> Result<Self, QuantumError> {
        let dim = basis_dim(n);
        if q.nrows() != dim || q.ncols() != dim {
            return Err(QuantumError::DimensionMismatch(format!(
                "polarization form must be {dim} x {dim}"
            )));
        }
        let mut eta = QMat::zero(dim, dim);
        for i in 0..dim {
            let s = rat_i(degree_sign(n, i));
            for j in 0..dim {
                eta.set(i, j, q.get(i, j) * s.clone());
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if eta.get(i, j) != eta.get(j, i) {
                    return Err(QuantumError::AsymmetricPairing);
                }
            }
        }
        let eta_inv = eta.inverse().ok_or(QuantumError::SingularPairing)?;
        Ok(PairingMatrix { n, q, eta, eta_inv })
    }

    /// Standard polarization: e3 against e0 and H_i against D_i.
    pub fn standard(n: usize) -> Self {
        let dim = basis_dim(n);
        let mut q = QMat::zero(dim, dim);
        q.set(0, dim - 1, Rat::one());
        q.set(dim - 1, 0, -Rat::one());
        for i in 1..=n {
            q.set(i, n + i, Rat::one());
            q.set(n + i, i, -Rat::one());
        }
        PairingMatrix::from_polarization(n, q).expect("standard polarization")
    }
}

/// Square matrix of truncated q-polynomials.
#[derive(Clone, Debug)]
pub struct PolyMat {
    pub entries: Vec<Vec<MPoly>>,
}

impl PolyMat {
    pub fn zero(rows: usize, cols: usize, proto: &MPoly) -> Self {
        let z = MPoly::zero(proto.nvars(), proto.cover(), proto.trunc_num());
        PolyMat { entries: vec![vec![z; cols]; rows] }
    }

    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &PolyMat) -> PolyMat {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
            .collect();
        PolyMat { entries }
    }

    pub fn sub(&self, other: &PolyMat) -> PolyMat {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.sub(b)).collect())
            .collect();
        PolyMat { entries }
    }

    pub fn mul(&self, other: &PolyMat) -> PolyMat {
        assert_eq!(self.ncols(), other.nrows());
        let proto = &self.entries[0][0];
        let mut out = PolyMat::zero(self.nrows(), other.ncols(), proto);
        for i in 0..self.nrows() {
            for k in 0..self.ncols() {
                if self.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.ncols() {
                    if other.entries[k][j].is_zero() {
                        continue;
                    }
                    let term = self.entries[i][k].mul(&other.entries[k][j]);
                    out.entries[i][j] = out.entries[i][j].add(&term);
                }
            }
        }
        out
    }

    pub fn deriv(&self, i: usize) -> PolyMat {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|p| p.deriv(i)).collect())
            .collect();
        PolyMat { entries }
    }

    pub fn eq_mat(&self, other: &PolyMat) -> bool {
        self.nrows() == other.nrows()
            && self.ncols() == other.ncols()
            && self.sub(other).is_zero()
    }
}

/// Connection matrices A_i, one per Kahler direction, on the closed
/// basis optionally extended by brane generators f_k.
#[derive(Clone, Debug)]
pub struct ConnectionFamily {
    pub n: usize,
    pub closed_dim: usize,
    pub ext: usize,
    pub mats: Vec<PolyMat>,
}

/// Dubrovin connection A_i(e_k) = sum_{l,m} d3(i,k,l) eta^{lm} e_m with
/// brane columns A_i(f_k) = sum_{l,m} d2Psi_k(i,l) eta^{lm} e_m.
pub fn dubrovin_connection(
    phi: &Potential,
    psis: Option<&OpenPotentialSet>,
    pairing: &PairingMatrix,
) -> Result<ConnectionFamily, QuantumError> {
    let n = phi.n();
    if pairing.n != n {
        return Err(QuantumError::DimensionMismatch(
            "pairing size does not match potential".into(),
        ));
    }
    let dim = basis_dim(n);
    let ext = psis.map_or(0, |p| p.branes.len());
    if let Some(set) = psis {
        for brane in &set.branes {
            if brane.quantum.nvars() != n {
                return Err(QuantumError::DimensionMismatch(
                    "brane potential variable count".into(),
                ));
            }
        }
    }
    let total = dim + ext;
    let table = phi.d3_table();
    let mut mats = Vec::new();
    for dir in 1..=n {
        let mut a = PolyMat::zero(total, total, &phi.quantum);
        for k in 0..dim {
            for l in 0..dim {
                let Some(d3) = table.get(&sorted3(dir, k, l)) else {
                    continue;
                };
                for m in 0..dim {
                    let w = pairing.eta_inv.get(l, m);
                    if w.is_zero() {
                        continue;
                    }
                    a.entries[m][k] = a.entries[m][k].add(&d3.scale(&w));
                }
            }
        }
        if let Some(set) = psis {
            for (kk, brane) in set.branes.iter().enumerate() {
                for l in 0..dim {
                    let d2 = brane.d2(n, dir, l);
                    if d2.is_zero() {
                        continue;
                    }
                    for m in 0..dim {
                        let w = pairing.eta_inv.get(l, m);
                        if w.is_zero() {
                            continue;
                        }
                        a.entries[m][dim + kk] = a.entries[m][dim + kk].add(&d2.scale(&w));
                    }
                }
            }
        }
        mats.push(a);
    }
    Ok(ConnectionFamily { n, closed_dim: dim, ext, mats })
}

/// Curvature R_ij = dA_j/dt_i - dA_i/dt_j + [A_i, A_j] for i < j.
pub fn curvature(conn: &ConnectionFamily) -> Vec<((usize, usize), PolyMat)> {
    let mut out = Vec::new();
    for i in 0..conn.n {
        for j in (i + 1)..conn.n {
            let ai = &conn.mats[i];
            let aj = &conn.mats[j];
            let r = aj
                .deriv(i)
                .sub(&ai.deriv(j))
                .add(&ai.mul(aj))
                .sub(&aj.mul(ai));
            out.push(((i + 1, j + 1), r));
        }
    }
    out
}

/// WDVV residual for one index tuple: the difference of the two
/// pair-of-pants channels of the four-point function.
pub fn wdvv_residual(
    phi: &Potential,
    pairing: &PairingMatrix,
    idx: [usize; 4],
) -> MPoly {
    let table = phi.d3_table();
    wdvv_residual_with(&table, pairing, phi, idx)
}

fn channel(
    table: &BTreeMap<[usize; 3], MPoly>,
    pairing: &PairingMatrix,
    proto: &MPoly,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> MPoly {
    let dim = pairing.eta_inv.nrows();
    let mut acc = MPoly::zero(proto.nvars(), proto.cover(), proto.trunc_num());
    for a in 0..dim {
        let Some(left) = table.get(&sorted3(a, i, j)) else {
            continue;
        };
        for b in 0..dim {
            let w = pairing.eta_inv.get(a, b);
            if w.is_zero() {
                continue;
            }
            let Some(right) = table.get(&sorted3(b, k, l)) else {
                continue;
            };
            acc = acc.add(&left.mul(right).scale(&w));
        }
    }
    acc
}

fn wdvv_residual_with(
    table: &BTreeMap<[usize; 3], MPoly>,
    pairing: &PairingMatrix,
    phi: &Potential,
    [i, j, k, l]: [usize; 4],
) -> MPoly {
    let proto = &phi.quantum;
    channel(table, pairing, proto, i, j, k, l)
        .sub(&channel(table, pairing, proto, i, k, j, l))
}

/// Full WDVV residual tensor; only nonzero entries are kept.
pub fn wdvv_residual_tensor(
    phi: &Potential,
    pairing: &PairingMatrix,
) -> BTreeMap<[usize; 4], MPoly> {
    let table = phi.d3_table();
    let dim = phi.dim();
    let mut out = BTreeMap::new();
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                for l in 0..dim {
                    let r = wdvv_residual_with(&table, pairing, phi, [i, j, k, l]);
                    if !r.is_zero() {
                        out.insert([i, j, k, l], r);
                    }
                }
            }
        }
    }
    out
}

fn open_channels(
    table: &BTreeMap<[usize; 3], MPoly>,
    brane: &OpenPotential,
    pairing: &PairingMatrix,
    phi: &Potential,
    [i, j, l]: [usize; 3],
) -> MPoly {
    let n = phi.n();
    let dim = phi.dim();
    let proto = &phi.quantum;
    let mut acc = MPoly::zero(proto.nvars(), proto.cover(), proto.trunc_num());
    for a in 0..dim {
        for b in 0..dim {
            let w = pairing.eta_inv.get(a, b);
            if w.is_zero() {
                continue;
            }
            if let Some(left) = table.get(&sorted3(a, i, j)) {
                let right = brane.d2(n, b, l);
                if !right.is_zero() {
                    acc = acc.add(&left.mul(&right).scale(&w));
                }
            }
            let psi_left = brane.d2(n, a, i);
            if !psi_left.is_zero() {
                if let Some(right) = table.get(&sorted3(b, j, l)) {
                    acc = acc.sub(&psi_left.mul(right).scale(&w));
                }
            }
        }
    }
    acc
}

/// Open WDVV residual for one brane and one index tuple (i, j, l).
pub fn open_wdvv_residual(
    phi: &Potential,
    brane: &OpenPotential,
    pairing: &PairingMatrix,
    idx: [usize; 3],
) -> MPoly {
    let table = phi.d3_table();
    open_channels(&table, brane, pairing, phi, idx)
}

/// Full Open WDVV residual tensor for one brane, indexed over the
/// Kahler directions (the superpotential depends on those alone, so
/// they are the tuples the disk-level associativity constrains).
pub fn open_wdvv_residual_tensor(
    phi: &Potential,
    brane: &OpenPotential,
    pairing: &PairingMatrix,
) -> BTreeMap<[usize; 3], MPoly> {
    let table = phi.d3_table();
    let n = phi.n();
    let mut out = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n {
            for l in 1..=n {
                let r = open_channels(&table, brane, pairing, phi, [i, j, l]);
                if !r.is_zero() {
                    out.insert([i, j, l], r);
                }
            }
        }
    }
    out
}

/// Independent assembly of the curvature matrices from the residual
/// tensors:
///   coeff of e_p in R_ij(e_k)  = sum_l (res(j,k,i,l) + res(i,j,k,l)) eta^{lp}
///   coeff of e_p in R_ij(f_k)  = sum_l (ores(i,j,l) - ores(j,i,l)) eta^{lp}
/// This shares no code with the matrix-calculus path in `curvature`.
pub fn curvature_from_residuals(
    phi: &Potential,
    psis: Option<&OpenPotentialSet>,
    pairing: &PairingMatrix,
) -> Vec<((usize, usize), PolyMat)> {
    let n = phi.n();
    let dim = phi.dim();
    let ext = psis.map_or(0, |p| p.branes.len());
    let total = dim + ext;
    let table = phi.d3_table();
    let mut out = Vec::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            let mut r = PolyMat::zero(total, total, &phi.quantum);
            for k in 0..dim {
                for l in 0..dim {
                    let combo = wdvv_residual_with(&table, pairing, phi, [j, k, i, l])
                        .add(&wdvv_residual_with(&table, pairing, phi, [i, j, k, l]));
                    if combo.is_zero() {
                        continue;
                    }
                    for p in 0..dim {
                        let w = pairing.eta_inv.get(l, p);
                        if w.is_zero() {
                            continue;
                        }
                        r.entries[p][k] = r.entries[p][k].add(&combo.scale(&w));
                    }
                }
            }
            if let Some(set) = psis {
                for (kk, brane) in set.branes.iter().enumerate() {
                    for l in 0..dim {
                        let combo = open_channels(&table, brane, pairing, phi, [i, j, l])
                            .sub(&open_channels(&table, brane, pairing, phi, [j, i, l]));
                        if combo.is_zero() {
                            continue;
                        }
                        for p in 0..dim {
                            let w = pairing.eta_inv.get(l, p);
                            if w.is_zero() {
                                continue;
                            }
                            r.entries[p][dim + kk] =
                                r.entries[p][dim + kk].add(&combo.scale(&w));
                        }
                    }
                }
            }
            out.push(((i, j), r));
        }
    }
    out
}

/// Multiplication operator e_a . on the closed sector for any flat
/// basis direction a in 0..dim, not only the Kahler ones.  The entry
/// (m, k) is sum_l d3(a, k, l) eta^{lm}.
pub fn closed_direction_matrix(
    phi: &Potential,
    pairing: &PairingMatrix,
    a: usize,
) -> PolyMat {
    let dim = phi.dim();
    let table = phi.d3_table();
    let mut mat = PolyMat::zero(dim, dim, &phi.quantum);
    for k in 0..dim {
        for l in 0..dim {
            let Some(d3) = table.get(&sorted3(a, k, l)) else {
                continue;
            };
            for m in 0..dim {
                let w = pairing.eta_inv.get(l, m);
                if w.is_zero() {
                    continue;
                }
                mat.entries[m][k] = mat.entries[m][k].add(&d3.scale(&w));
            }
        }
    }
    mat
}

fn deriv_along(mat: &PolyMat, dir: usize, n: usize, proto: &MPoly) -> PolyMat {
    // Only the Kahler directions 1..=n carry a coordinate the potential
    // depends on; every other directional derivative is zero.
    if (1..=n).contains(&dir) {
        mat.deriv(dir - 1)
    } else {
        PolyMat::zero(mat.nrows(), mat.ncols(), proto)
    }
}

/// Closed-sector curvature over every pair of flat directions, not
/// only the Kahler ones.  Vanishing of the whole family is equivalent
/// to associativity of the quantum product, hence to the vanishing of
/// the full WDVV residual tensor.
pub fn closed_curvature_all(
    phi: &Potential,
    pairing: &PairingMatrix,
) -> Vec<((usize, usize), PolyMat)> {
    let n = phi.n();
    let dim = phi.dim();
    let mats: Vec<PolyMat> = (0..dim)
        .map(|a| closed_direction_matrix(phi, pairing, a))
        .collect();
    let mut out = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let r = deriv_along(&mats[b], a, n, &phi.quantum)
                .sub(&deriv_along(&mats[a], b, n, &phi.quantum))
                .add(&mats[a].mul(&mats[b]))
                .sub(&mats[b].mul(&mats[a]));
            out.push(((a, b), r));
        }
    }
    out
}

/// Independent assembly of the full-direction closed curvature from
/// the WDVV residual tensor:
///   coeff of e_p in R_ab(e_k) = sum_l (res(b,k,a,l) + res(a,b,k,l)) eta^{lp}
/// This shares no code with the matrix-calculus path above.
pub fn closed_curvature_all_from_residuals(
    phi: &Potential,
    pairing: &PairingMatrix,
) -> Vec<((usize, usize), PolyMat)> {
    let dim = phi.dim();
    let table = phi.d3_table();
    let mut out = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let mut r = PolyMat::zero(dim, dim, &phi.quantum);
            for k in 0..dim {
                for l in 0..dim {
                    let combo = wdvv_residual_with(&table, pairing, phi, [b, k, a, l])
                        .add(&wdvv_residual_with(&table, pairing, phi, [a, b, k, l]));
                    if combo.is_zero() {
                        continue;
                    }
                    for p in 0..dim {
                        let w = pairing.eta_inv.get(l, p);
                        if w.is_zero() {
                            continue;
                        }
                        r.entries[p][k] = r.entries[p][k].add(&combo.scale(&w));
                    }
                }
            }
            out.push(((a, b), r));
        }
    }
    out
}

/// Flat sections of the one-parameter connection in q-coordinates, with
/// t represented by the log symbol.  Rows are (g3, g2, g1, g0, h_k),
/// columns are components over (e3, e2, e1, e0, f_k).
pub fn flat_sections(
    phi: &Potential,
    psis: Option<&OpenPotentialSet>,
) -> Result<Vec<Vec<Series>>, QuantumError> {
    if phi.n() != 1 {
        return Err(QuantumError::NotRankOne);
    }
    let kappa = phi.classical(1, 1, 1);
    let phih = phi.quantum.to_series()?;
    let cover = phih.cover();
    let trunc = phih.trunc_num();
    let d = psis.map_or(0, |p| p.branes.len());
    let total = 4 + d;
    let zero = || Series::zero(cover, trunc);
    let t = Series::monomial(cover, trunc, 0, 1, Rat::one());
    let t2 = t.mul(&t);
    let t3 = t2.mul(&t);
    let p1 = phih.theta();
    let p2 = p1.theta();

    let mut rows = Vec::new();
    // g3 = e3 - t e2 + (Phi' - t Phi'' - kappa t^2/2) e1
    //      + (2 Phi - t Phi' - kappa t^3/6) e0
    let mut g3 = vec![zero(); total];
    g3[0] = Series::constant(Rat::one(), 1).lift_cover(cover).truncate(trunc);
    g3[1] = t.neg();
    g3[2] = p1
        .sub(&t.mul(&p2))
        .sub(&t2.scale(&(kappa.clone() / rat_i(2))));
    g3[3] = phih
        .scale(&rat_i(2))
        .sub(&t.mul(&p1))
        .sub(&t3.scale(&(kappa.clone() / rat_i(6))));
    rows.push(g3);
    // g2 = e2 + (Phi'' + kappa t) e1 + (Phi' + kappa t^2/2) e0
    let mut g2 = vec![zero(); total];
    g2[1] = Series::constant(Rat::one(), 1).lift_cover(cover).truncate(trunc);
    g2[2] = p2.add(&t.scale(&kappa));
    g2[3] = p1.add(&t2.scale(&(kappa.clone() / rat_i(2))));
    rows.push(g2);
    // g1 = e1 + t e0
    let mut g1 = vec![zero(); total];
    g1[2] = Series::constant(Rat::one(), 1).lift_cover(cover).truncate(trunc);
    g1[3] = t.clone();
    rows.push(g1);
    // g0 = e0
    let mut g0 = vec![zero(); total];
    g0[3] = Series::constant(Rat::one(), 1).lift_cover(cover).truncate(trunc);
    rows.push(g0);
    if let Some(set) = psis {
        for (kk, brane) in set.branes.iter().enumerate() {
            let lam = brane.lambda[0][0].clone();
            let psih = brane.quantum.to_series()?;
            let q1 = psih.theta();
            // h = f + (Psi' + lambda t) e1 + (Psi + lambda t^2/2) e0
            let mut h = vec![zero(); total];
            h[2] = q1.add(&t.scale(&lam));
            h[3] = psih.add(&t2.scale(&(lam.clone() / rat_i(2))));
            h[4 + kk] = Series::constant(Rat::one(), 1).lift_cover(cover).truncate(trunc);
            rows.push(h);
        }
    }
    Ok(rows)
}

/// One-parameter connection matrix as series entries, for applying to
/// sections in q-coordinates.
pub fn connection_series_rank1(
    conn: &ConnectionFamily,
) -> Result<Vec<Vec<Series>>, QuantumError> {
    if conn.n != 1 {
        return Err(QuantumError::NotRankOne);
    }
    let a = &conn.mats[0];
    let mut out = Vec::new();
    for row in &a.entries {
        let mut r = Vec::new();
        for p in row {
            r.push(p.to_series()?);
        }
        out.push(r);
    }
    Ok(out)
}

/// Apply the one-parameter connection to a section: theta on each
/// component plus the matrix action.
pub fn apply_connection_rank1(a: &[Vec<Series>], section: &[Series]) -> Vec<Series> {
    let dim = section.len();
    let mut out: Vec<Series> = section.iter().map(|s| s.theta()).collect();
    for (p, row) in a.iter().enumerate().take(dim) {
        for (k, entry) in row.iter().enumerate().take(dim) {
            if entry.is_zero() || section[k].is_zero() {
                continue;
            }
            out[p] = out[p].add(&entry.mul(&section[k]));
        }
    }
    out
}
