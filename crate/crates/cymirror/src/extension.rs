//! Open-string extension data: superpotential decomposition, disk
//! two-point functions, extended monodromy, Abel-Jacobi limits, the
//! real-quintic open Gromov-Witten pipeline and the OGW axiom checker.
//!
//! Superpotentials live in q-coordinates with the log symbol standing
//! for the canonical coordinate t, and decompose on the r-fold cover as
//!   W = (lambda/r^2) t^2 + (s/r) t + c + sum_d ntilde_d q^(d/r)
//! with lambda integral and s integral modulo r.

use crate::constants::{double_factorial, frac_part, rat, rat_i, FormalConstant, Rat};
use crate::matrix::QMat;
use crate::series::{Series, SeriesError};
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("non-integral coefficient: {0}")]
    NonIntegral(String),
    #[error("shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Canonical pieces of a superpotential on the r-fold cover.
#[derive(Clone, Debug)]
pub struct SuperpotentialDecomposition {
    pub lambda: i64,
    pub s: i64,
    pub r: i64,
    pub c: FormalConstant,
    pub w_series: Series,
    pub ntilde: Vec<Rat>,
}

impl SuperpotentialDecomposition {
    /// Torsion class of s in Z/rZ, represented in 0..r.
    pub fn s_mod_r(&self) -> i64 {
        self.s.rem_euclid(self.r)
    }

    /// Rebuild the superpotential series exactly.
    pub fn reassemble(&self) -> Series {
        let cover = self.w_series.cover();
        let trunc = self.w_series.trunc_num();
        let mut out = self.w_series.clone();
        out.add_term(0, 2, rat(self.lambda, self.r * self.r));
        out.add_term(0, 1, rat(self.s, self.r));
        out.add_term(0, 0, self.c.rational.clone());
        out.truncate(trunc).lift_cover(cover)
    }
}

fn rat_to_i64(x: &Rat, what: &str) -> Result<i64, ExtensionError> {
    if !x.denom().is_one() {
        return Err(ExtensionError::NonIntegral(format!("{what} = {x}")));
    }
    x.numer()
        .to_i64()
        .ok_or_else(|| ExtensionError::NonIntegral(format!("{what} out of range")))
}

/// Split a superpotential into quadratic, torsion, constant and
/// holomorphic parts on the r-fold cover.
pub fn superpotential_decompose(
    w: &Series,
    r: i64,
) -> Result<SuperpotentialDecomposition, ExtensionError> {
    if r < 1 {
        return Err(ExtensionError::Shape("cover order must be positive".into()));
    }
    if w.max_log_power() > 2 {
        return Err(ExtensionError::Shape("log power above 2".into()));
    }
    let cover = w.cover();
    let mut tail = Series::zero(cover, w.trunc_num());
    for ((e, l), cfe) in w.iter() {
        if (*e * r) % cover != 0 {
            return Err(ExtensionError::Shape(format!(
                "exponent {e}/{cover} is not a multiple of 1/{r}"
            )));
        }
        if *e < 0 {
            return Err(ExtensionError::Shape("negative exponent".into()));
        }
        if *e > 0 && *l > 0 {
            return Err(ExtensionError::Shape(
                "log term at positive exponent".into(),
            ));
        }
        if *e > 0 {
            tail.add_term(*e, 0, cfe.clone());
        }
    }
    let lambda = rat_to_i64(&(w.coeff(0, 2) * rat_i(r * r)), "lambda")?;
    let s = rat_to_i64(&(w.coeff(0, 1) * rat_i(r)), "s")?;
    let c = FormalConstant::from_rat(w.coeff(0, 0));
    let mut ntilde = Vec::new();
    let mut d = 1;
    loop {
        let num = d * cover;
        if num % r != 0 || num / r >= w.trunc_num() {
            if num / r >= w.trunc_num() {
                break;
            }
            d += 1;
            continue;
        }
        ntilde.push(tail.coeff(num / r, 0));
        d += 1;
    }
    Ok(SuperpotentialDecomposition { lambda, s, r, c, w_series: tail, ntilde })
}

/// Griffiths infinitesimal invariant D = theta^2 W.
pub fn infinitesimal_invariant(w: &Series) -> Series {
    w.theta().theta()
}

/// Normalized B-brane superpotential of the real quintic:
/// tau(z) = 2 sum_{d odd} (5d)!!/(d!!)^5 z^(d/2), through z-order `order`.
pub fn real_quintic_tau(order: i64) -> Series {
    let mut tau = Series::zero(2, 2 * order);
    let mut d = 1;
    while d < 2 * order {
        let num = double_factorial(5 * d as u64);
        let den = double_factorial(d as u64).pow(5);
        tau.add_term(d, 0, rat_i(2) * Rat::new(num, den));
        d += 2;
    }
    tau
}

/// Open Gromov-Witten potential in the canonical coordinate:
/// Psi_h(q) = tau(z(q)) / w0(z(q)).
pub fn open_potential_q(
    tau: &Series,
    w0: &Series,
    z_q: &Series,
) -> Result<Series, ExtensionError> {
    Ok(tau.div(w0)?.compose(z_q)?)
}

/// Domain wall tension W+ - W-, reported modulo the closed-string
/// period lattice t Z + Z: the t-coefficient is reduced to [0, 1) and
/// the constant to (-1/2, 1/2].
pub fn domain_wall(wp: &Series, wm: &Series) -> Series {
    let mut diff = wp.sub(wm);
    let c1 = diff.coeff(0, 1);
    let red1 = frac_part(&c1);
    diff.add_term(0, 1, red1 - c1);
    let c0 = diff.coeff(0, 0);
    let shift = (c0.clone() - rat(1, 2)).ceil();
    diff.add_term(0, 0, -shift);
    diff
}

/// Monodromy logarithm of the extended local system on the r-cover.
#[derive(Clone, Debug)]
pub struct ExtendedMonodromy {
    pub nhat: QMat,
    pub r: i64,
    pub branes: Vec<(i64, i64)>,
}

/// Assemble N-hat: the closed block is r N and each brane column sends
/// h_k to lambda_k g1 + s_k g0.
pub fn extended_monodromy(
    n_closed: &QMat,
    r: i64,
    branes: &[(i64, i64)],
) -> Result<ExtendedMonodromy, ExtensionError> {
    if n_closed.nrows() != 4 || n_closed.ncols() != 4 {
        return Err(ExtensionError::Shape("closed logarithm must be 4 x 4".into()));
    }
    if r < 1 {
        return Err(ExtensionError::Shape("cover order must be positive".into()));
    }
    let d = branes.len();
    let total = 4 + d;
    let mut nhat = QMat::zero(total, total);
    for i in 0..4 {
        for j in 0..4 {
            nhat.set(i, j, n_closed.get(i, j) * rat_i(r));
        }
    }
    for (k, (lambda, s)) in branes.iter().enumerate() {
        nhat.set(2, 4 + k, rat_i(*lambda));
        nhat.set(3, 4 + k, rat_i(*s));
    }
    if !nhat.pow(4).is_zero() {
        return Err(ExtensionError::Shape("assembled logarithm not nilpotent".into()));
    }
    Ok(ExtendedMonodromy { nhat, r, branes: branes.to_vec() })
}

/// Abel-Jacobi limit of the normal function: the pair
/// (Q(h(0), e2), Q(h(0), e3)) = (s/r mod 1, c).
pub fn abel_jacobi_limit(dec: &SuperpotentialDecomposition) -> (Rat, FormalConstant) {
    (frac_part(&rat(dec.s, dec.r)), dec.c.clone())
}

/// Express a rational limit constant as a multiple of
/// zeta(2)/(2 pi i)^2 = -1/24.
pub fn as_zeta2hat(c: &Rat) -> FormalConstant {
    FormalConstant::zeta2hat(c * rat_i(-24))
}

/// Table of open Gromov-Witten invariants with bulk insertions only.
/// Keys are (degree numerator d with beta = (d/r) ell, sorted list of
/// even insertion degrees); H-pairing of beta is d/r.
#[derive(Clone, Debug)]
pub struct OGWTable {
    pub r: i64,
    pub lambda: Rat,
    pub entries: BTreeMap<(i64, Vec<i64>), Rat>,
}

impl OGWTable {
    pub fn new(r: i64, lambda: Rat) -> Self {
        OGWTable { r, lambda, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, d: i64, insertions: &[i64], value: Rat) {
        let mut ins = insertions.to_vec();
        ins.sort_unstable();
        self.entries.insert((d, ins), value);
    }

    pub fn get(&self, d: i64, insertions: &[i64]) -> Option<&Rat> {
        let mut ins = insertions.to_vec();
        ins.sort_unstable();
        self.entries.get(&(d, ins))
    }
}

/// One axiom violation found by the checker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OGWViolation {
    pub degree: i64,
    pub insertions: Vec<i64>,
    pub axiom: &'static str,
    pub detail: String,
}

/// Check every table entry against the Degree, Unit, Zero and Divisor
/// axioms; violations are reported, not raised.
pub fn ogw_axioms_check(table: &OGWTable) -> Vec<OGWViolation> {
    let mut out = Vec::new();
    let mut flag = |d: i64, ins: &Vec<i64>, axiom: &'static str, detail: String| {
        out.push(OGWViolation { degree: d, insertions: ins.clone(), axiom, detail });
    };
    for ((d, ins), value) in &table.entries {
        let n = ins.len() as i64;
        // Degree: dim X - 3 + 2n = sum of insertion degrees, dim X = 3.
        let total: i64 = ins.iter().sum();
        if total != 2 * n && !value.is_zero() {
            flag(*d, ins, "Degree", format!("degree sum {total} != {}", 2 * n));
        }
        // Unit: an identity insertion forces zero away from beta = 0.
        if ins.contains(&0) && *d != 0 && !value.is_zero() {
            flag(*d, ins, "Unit", "unit insertion with beta != 0".into());
        }
        // Zero: beta = 0 reduces to the classical chain integral.
        if *d == 0 {
            let expect = if ins.as_slice() == [2, 2] {
                table.lambda.clone()
            } else {
                Rat::zero()
            };
            if *value != expect {
                flag(*d, ins, "Zero", format!("expected {expect}, found {value}"));
            }
        }
        // Divisor: stripping one degree-2 insertion divides by the
        // H-pairing of beta.
        if *d != 0 && ins.contains(&2) {
            let mut rest = ins.clone();
            let pos = rest.iter().position(|&x| x == 2).unwrap();
            rest.remove(pos);
            if let Some(base) = table.entries.get(&(*d, rest.clone())) {
                let expect = base * rat(*d, table.r);
                if *value != expect {
                    flag(*d, ins, "Divisor", format!("expected {expect}, found {value}"));
                }
            }
        }
    }
    out
}

/// Build a table from disk invariants ntilde_d by repeated application
/// of the Divisor axiom, with up to `max_insertions` H-insertions.
pub fn divisor_axiom_table(
    r: i64,
    lambda: Rat,
    ntilde: &[(i64, Rat)],
    max_insertions: usize,
) -> OGWTable {
    let mut table = OGWTable::new(r, lambda);
    for (d, base) in ntilde {
        let mut value = base.clone();
        for k in 0..=max_insertions {
            table.insert(*d, &vec![2; k], value.clone());
            value = value * rat(*d, r);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_mirror::{mirror_map, monodromy_matrices};
    use crate::constants::rat_string;
    use crate::picard_fuchs::{frobenius_mum_basis, PFOperator};
    use num_traits::One;

    fn quintic_psih(order: i64) -> Series {
        let op = PFOperator::quintic();
        let basis = frobenius_mum_basis(&op, order).unwrap();
        let mm = mirror_map(&basis).unwrap();
        let tau = real_quintic_tau(order);
        open_potential_q(&tau, basis.holomorphic(), &mm.z_q).unwrap()
    }

    #[test]
    fn tau_double_factorial_values() {
        let tau = real_quintic_tau(4);
        assert_eq!(tau.coeff(1, 0), rat_i(30));
        assert_eq!(tau.coeff(3, 0), rat(50050, 3));
        for ((e, _), c) in tau.iter() {
            assert!(e % 2 == 1 || c.is_zero(), "even exponent term in tau");
        }
    }

    #[test]
    fn tau_solves_inhomogeneous_picard_fuchs() {
        let op = PFOperator::quintic();
        let mut rhs = Series::zero(2, 10);
        rhs.add_term(1, 0, rat(15, 8));
        let particular = op.solve_inhomogeneous(&rhs).unwrap();
        let tau = real_quintic_tau(5);
        assert!(particular.sub(&tau).is_zero(), "tau mismatch");
    }

    #[test]
    fn open_potential_matches_printed_series() {
        let psih = quintic_psih(7);
        assert_eq!(psih.coeff(1, 0), rat_i(30));
        assert_eq!(psih.coeff(3, 0), rat(4600, 3));
        assert_eq!(psih.coeff(5, 0), rat(5441256, 5));
    }

    #[test]
    fn infinitesimal_invariant_values() {
        // theta^2 of lambda t^2 / 2 is the constant lambda.
        let mut w = Series::zero(1, 3);
        w.add_term(0, 2, rat(7, 2));
        let d = infinitesimal_invariant(&w);
        assert_eq!(d.coeff(0, 0), rat_i(7));
        assert!(d.coeff(0, 1).is_zero());
        // Disk two-point function of the real quintic.
        let psih = quintic_psih(7);
        let dd = infinitesimal_invariant(&psih.scale(&rat_i(2)));
        assert_eq!(dd.coeff(1, 0), rat_i(15));
        assert_eq!(dd.coeff(3, 0), rat_i(6900));
        assert_eq!(dd.coeff(5, 0), rat_i(13603140));
    }

    #[test]
    fn decompose_real_quintic_vacua() {
        let psih = quintic_psih(6);
        let cover = psih.cover();
        let trunc = psih.trunc_num();
        // W+ = t^2/4 + Psi_h
        let mut wp = psih.clone();
        wp.add_term(0, 2, rat(1, 4));
        let dp = superpotential_decompose(&wp, 2).unwrap();
        assert_eq!((dp.lambda, dp.s), (1, 0));
        assert!(dp.c.is_zero());
        assert!(dp.w_series.sub(&psih).is_zero());
        assert_eq!(dp.ntilde[0], rat_i(30));
        assert!(dp.reassemble().sub(&wp).is_zero());
        // W- = t^2/4 - t/2 + 1/4 - Psi_h
        let mut wm = psih.neg();
        wm.add_term(0, 2, rat(1, 4));
        wm.add_term(0, 1, rat(-1, 2));
        wm.add_term(0, 0, rat(1, 4));
        let dm = superpotential_decompose(&wm, 2).unwrap();
        assert_eq!((dm.lambda, dm.s), (1, -1));
        assert_eq!(dm.s_mod_r(), 1);
        assert_eq!(dm.c.rational, rat(1, 4));
        assert!(dm.w_series.add(&psih).is_zero());
        assert!(dm.reassemble().sub(&wm).is_zero());
        // Zero superpotential decomposes trivially.
        let dz = superpotential_decompose(&Series::zero(cover, trunc), 2).unwrap();
        assert_eq!((dz.lambda, dz.s), (0, 0));
        assert!(dz.c.is_zero() && dz.w_series.is_zero());
    }

    #[test]
    fn non_integral_lambda_rejected() {
        let mut w = Series::zero(2, 4);
        w.add_term(0, 2, rat(1, 3));
        assert!(matches!(
            superpotential_decompose(&w, 2),
            Err(ExtensionError::NonIntegral(_))
        ));
    }

    #[test]
    fn domain_wall_tension() {
        let psih = quintic_psih(6);
        let mut wp = psih.clone();
        wp.add_term(0, 2, rat(1, 4));
        let mut wm = psih.neg();
        wm.add_term(0, 2, rat(1, 4));
        wm.add_term(0, 1, rat(-1, 2));
        wm.add_term(0, 0, rat(1, 4));
        let ta = domain_wall(&wp, &wm);
        // T_A = t/2 - 1/4 + 2 Psi_h
        assert_eq!(ta.coeff(0, 1), rat(1, 2));
        assert_eq!(ta.coeff(0, 0), rat(-1, 4));
        assert!(ta.coeff(0, 2).is_zero());
        assert_eq!(ta.coeff(1, 0), rat_i(60));
        let dec = superpotential_decompose(&ta, 2).unwrap();
        assert_eq!((dec.lambda, dec.s), (0, 1));
        assert_eq!(dec.c.rational, rat(-1, 4));
        assert!(dec.w_series.sub(&psih.scale(&rat_i(2))).is_zero());
        // Identical vacua give the zero tension.
        assert!(domain_wall(&wp, &wp).is_zero());
        // Lattice reduction of out-of-window terms.
        let mut shifted = wp.clone();
        shifted.add_term(0, 1, rat(5, 2));
        shifted.add_term(0, 0, rat_i(3));
        let red = domain_wall(&shifted, &wm);
        assert_eq!(red.coeff(0, 1), Rat::zero());
        assert_eq!(red.coeff(0, 0), rat(-1, 4));
    }

    #[test]
    fn extended_monodromy_quintic_example() {
        let closed = monodromy_matrices(5, 50);
        let ext = extended_monodromy(&closed.n, 2, &[(1, 0), (1, -1)]).unwrap();
        let expect = QMat::new(vec![
            vec![rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(-2), rat_i(0), rat_i(0), rat_i(0), rat_i(0), rat_i(0)],
            vec![rat_i(5), rat_i(10), rat_i(0), rat_i(0), rat_i(1), rat_i(1)],
            vec![rat(-25, 3), rat_i(5), rat_i(2), rat_i(0), rat_i(0), rat_i(-1)],
            vec![rat_i(0); 6],
            vec![rat_i(0); 6],
        ]);
        assert_eq!(ext.nhat, expect);
        // exp(N-hat) is the square of the printed half-monodromy.
        let mhat = QMat::from_i64(&[
            &[1, 0, 0, 0, 0, 0],
            &[-1, 1, 0, 0, 0, 0],
            &[0, 5, 1, 0, 1, 0],
            &[-5, 5, 1, 1, 0, 0],
            &[0, 0, 0, 0, 0, 1],
            &[0, 0, 0, 0, 1, 0],
        ]);
        assert_eq!(ext.nhat.nilpotent_exp(), mhat.mul(&mhat));
        // The domain-wall brane (lambda, s) = (0, 1) gives the 5 x 5 log.
        let ta = extended_monodromy(&closed.n, 2, &[(0, 1)]).unwrap();
        assert_eq!(ta.nhat.get(2, 4), Rat::zero());
        assert_eq!(ta.nhat.get(3, 4), Rat::one());
        // No branes: just the rescaled closed logarithm.
        let bare = extended_monodromy(&closed.n, 2, &[]).unwrap();
        assert_eq!(bare.nhat, closed.n.scale(&rat_i(2)));
    }

    #[test]
    fn abel_jacobi_limit_values() {
        let psih = quintic_psih(6);
        let mut wp = psih.clone();
        wp.add_term(0, 2, rat(1, 4));
        let mut wm = psih.neg();
        wm.add_term(0, 2, rat(1, 4));
        wm.add_term(0, 1, rat(-1, 2));
        wm.add_term(0, 0, rat(1, 4));
        let ta = domain_wall(&wp, &wm);
        let dec = superpotential_decompose(&ta, 2).unwrap();
        let (half, c) = abel_jacobi_limit(&dec);
        assert_eq!(half, rat(1, 2));
        assert_eq!(c.rational, rat(-1, 4));
        let z2 = as_zeta2hat(&c.rational);
        assert_eq!(z2.zeta2, rat_i(6));
        assert_eq!(rat_string(&z2.zeta2), "6");
        // Zero superpotential limits to (0, 0).
        let dz = superpotential_decompose(&Series::zero(2, 4), 2).unwrap();
        let (a, b) = abel_jacobi_limit(&dz);
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn ogw_divisor_table_passes_axioms() {
        let ntilde = vec![(1, rat_i(30)), (3, rat(4600, 3)), (5, rat(5441256, 5))];
        let table = divisor_axiom_table(2, Rat::one(), &ntilde, 3);
        assert_eq!(table.get(1, &[2, 2]), Some(&rat(15, 2)));
        assert!(ogw_axioms_check(&table).is_empty());
    }

    #[test]
    fn ogw_perturbed_entries_are_flagged() {
        let ntilde = vec![(1, rat_i(30)), (3, rat(4600, 3))];
        let mut table = divisor_axiom_table(2, Rat::one(), &ntilde, 2);
        // Break one Divisor relation.
        table.insert(3, &[2, 2], rat_i(1));
        let report = ogw_axioms_check(&table);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].axiom, "Divisor");
        assert_eq!(report[0].degree, 3);
        // A unit insertion away from beta = 0 must vanish.
        let mut t2 = divisor_axiom_table(2, Rat::one(), &ntilde, 0);
        t2.insert(1, &[0, 2, 2], rat_i(4));
        let r2 = ogw_axioms_check(&t2);
        assert!(r2.iter().any(|v| v.axiom == "Unit"));
        // Mismatched total insertion degree.
        let mut t3 = divisor_axiom_table(2, Rat::one(), &ntilde, 0);
        t3.insert(1, &[4], rat_i(9));
        let r3 = ogw_axioms_check(&t3);
        assert!(r3.iter().any(|v| v.axiom == "Degree"));
        // A broken beta = 0 classical value.
        let mut t4 = OGWTable::new(2, Rat::one());
        t4.insert(0, &[2, 2], rat_i(5));
        let r4 = ogw_axioms_check(&t4);
        assert!(r4.iter().any(|v| v.axiom == "Zero"));
    }
}
