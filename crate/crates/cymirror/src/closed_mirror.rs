//! Closed-string pipeline: mirror map, Yukawa coupling, prepotential and
//! instanton numbers, integral monodromy and limiting period matrices.
//!
//! Conventions: in q-coordinates the formal log symbol stands for the
//! canonical coordinate t = log(q)/(2*pi*i), and quantum q-series are
//! stored with the power of 2*pi*i matching their t-grading absorbed, so
//! every coefficient is rational. The logarithmic derivative theta acts
//! as d/dt with theta(q^d) = d q^d.

use crate::constants::{rat, rat_i, FormalConstant, Rat};
use crate::matrix::QMat;
use crate::picard_fuchs::FrobeniusBasis;
use crate::picard_fuchs::PFOperator;
use crate::series::{Series, SeriesError};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error)]
pub enum ClosedError {
    #[error("series operation failed: {0}")]
    Series(#[from] SeriesError),
    #[error("Yukawa reduction needs a3 = p3/p4 with vanishing constant term")]
    YukawaShape,
    #[error("prepotential recovery needs C(0) = kappa")]
    YukawaConstant,
}

/// Mirror map data: t(z) = log(z)-stratum plus holomorphic tail, and the
/// inverse pair q(z), z(q).
#[derive(Clone, Debug)]
pub struct MirrorMap {
    pub t_z: Series,
    pub q_z: Series,
    pub z_q: Series,
}

pub fn mirror_map(basis: &FrobeniusBasis) -> Result<MirrorMap, ClosedError> {
    let t_z = basis.solutions[1].div(basis.holomorphic())?;
    // t = log z + S(z); q = z * exp(S)
    let s = t_z.sub(&Series::log_x(t_z.trunc_num()));
    let q_z = s.exp()?.mul_monomial(1, 0, &Rat::one());
    let z_q = q_z.reverse()?;
    Ok(MirrorMap { t_z, q_z, z_q })
}

/// Antiderivative with respect to theta on a log-free series with zero
/// constant term: each q^e picks up a factor 1/e.
fn antitheta(f: &Series) -> Series {
    assert!(f.is_log_free(), "antitheta needs a log-free series");
    let mut out = Series::zero(f.cover(), f.trunc_num());
    for (&(e, _), c) in f.iter() {
        assert!(e > 0, "antitheta needs vanishing constant term");
        let e_rat = Rat::new(BigInt::from(e), BigInt::from(f.cover()));
        out.add_term(e, 0, c / e_rat);
    }
    out
}

/// Yukawa coupling C(q) = Y(z(q)) * w0(z(q))^-2 * (theta_q z / z)^3 with
/// Y the solution of theta log Y = -a3/2, a3 = p3/p4, normalized Y(0) = kappa.
pub fn yukawa_coupling(
    op: &PFOperator,
    kappa: i64,
    mm: &MirrorMap,
    w0: &Series,
) -> Result<Series, ClosedError> {
    let order = w0.trunc_num();
    let poly = |i: usize| {
        let mut s = Series::zero_int(order);
        for (m, c) in op.theta_polys[i].iter().enumerate() {
            s.add_term(m as i64, 0, c.clone());
        }
        s
    };
    let a3 = poly(3).div(&poly(4))?;
    if !a3.coeff(0, 0).is_zero() {
        return Err(ClosedError::YukawaShape);
    }
    let log_y = antitheta(&a3.scale(&rat(-1, 2)));
    let y = log_y.exp()?.scale(&rat_i(kappa));

    let y_q = y.compose(&mm.z_q)?;
    let w0_q = w0.compose(&mm.z_q)?;
    let dlog = mm.z_q.theta().div(&mm.z_q)?;
    let dlog3 = dlog.mul(&dlog).mul(&dlog);
    let c = y_q.div(&w0_q.mul(&w0_q))?.mul(&dlog3);
    Ok(c)
}

/// Quantum prepotential part recovered from the Yukawa coupling:
/// f(q) = sum Ntilde_d q^d with Ntilde_d = C_d / d^3, so theta^3 f = C - kappa.
pub struct PrepotentialData {
    pub f_q: Series,
    pub ntilde: Vec<Rat>,
}

pub fn prepotential_recover(c: &Series, kappa: i64) -> Result<PrepotentialData, ClosedError> {
    if c.coeff(0, 0) != rat_i(kappa) || !c.is_log_free() {
        return Err(ClosedError::YukawaConstant);
    }
    assert_eq!(c.cover(), 1, "Yukawa coupling lives on integer degrees");
    let mut f_q = Series::zero_int(c.trunc_num());
    let mut ntilde = Vec::new();
    for d in 1..c.trunc_num() {
        let cd = c.coeff(d, 0);
        let nt = cd / Rat::from_integer(BigInt::from(d).pow(3));
        f_q.add_term(d, 0, nt.clone());
        ntilde.push(nt);
    }
    Ok(PrepotentialData { f_q, ntilde })
}

/// Multicover inversion N_d = Ntilde_d - sum_{k | d, k > 1} N_{d/k} / k^3.
pub fn instanton_invert(ntilde: &[Rat]) -> Vec<Rat> {
    let mut n: Vec<Rat> = Vec::with_capacity(ntilde.len());
    for d in 1..=ntilde.len() {
        let mut acc = ntilde[d - 1].clone();
        for k in 2..=d {
            if d % k == 0 {
                let prev = n[d / k - 1].clone();
                acc -= prev / Rat::from_integer(BigInt::from(k).pow(3));
            }
        }
        n.push(acc);
    }
    n
}

/// Divisor re-summation Ntilde_d = sum_{k | d} N_{d/k} / k^3, the forward
/// direction of the multicover formula.
pub fn multicover_resum(n: &[Rat]) -> Vec<Rat> {
    let mut ntilde = Vec::with_capacity(n.len());
    for d in 1..=n.len() {
        let mut acc = Rat::zero();
        for k in 1..=d {
            if d % k == 0 {
                acc += n[d / k - 1].clone() / Rat::from_integer(BigInt::from(k).pow(3));
            }
        }
        ntilde.push(acc);
    }
    ntilde
}

/// The full prepotential kappa/6 t^3 + kappa/4 t^2 - a/24 t + f(q) as a
/// stored series (t is the log symbol).
pub fn prepotential_series(kappa: i64, a: i64, f_q: &Series) -> Series {
    let order = f_q.trunc_num();
    let t = Series::log_x(order);
    let t2 = t.mul(&t);
    let t3 = t2.mul(&t);
    t3.scale(&rat(kappa, 6))
        .add(&t2.scale(&rat(kappa, 4)))
        .add(&t.scale(&rat(-a, 24)))
        .add(f_q)
}

/// The 4x4 period matrix of the flat basis over the Hodge basis, rows
/// (g3, g2, g1, g0), columns (e3, e2, e1, e0), in the normalization
/// w0 = 1. Under t -> t+1 it transforms by transpose(M) on the left.
pub fn flat_period_matrix(kappa: i64, a: i64, f_q: &Series) -> Vec<Vec<Series>> {
    let order = f_q.trunc_num();
    let big_f = prepotential_series(kappa, a, f_q);
    let tf = big_f.theta();
    let t2f = tf.theta();
    let t = Series::log_x(order);
    let zero = Series::zero_int(order);
    let one = Series::one(order);
    vec![
        vec![
            one.clone(),
            t.neg(),
            tf.sub(&t.mul(&t2f)),
            big_f.scale(&rat_i(2)).sub(&t.mul(&tf)),
        ],
        vec![zero.clone(), one.clone(), t2f.clone(), tf.clone()],
        vec![zero.clone(), zero.clone(), one.clone(), t.clone()],
        vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
    ]
}

/// Integral monodromy data in the flat basis (g3, g2, g1, g0).
#[derive(Clone, Debug)]
pub struct IntegralMonodromy {
    pub m: QMat,
    pub n: QMat,
    pub q: QMat,
}

/// The polarization form in the basis (e3, e2, e1, e0) and equally in the
/// flat basis.
pub fn polarization_form() -> QMat {
    QMat::from_i64(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, -1, 0, 0], &[-1, 0, 0, 0]])
}

pub fn monodromy_matrices(kappa: i64, a: i64) -> IntegralMonodromy {
    let half_k = rat(kappa, 2);
    let m = QMat::new(vec![
        vec![rat_i(1), rat_i(0), rat_i(0), rat_i(0)],
        vec![rat_i(-1), rat_i(1), rat_i(0), rat_i(0)],
        vec![rat_i(0), rat_i(kappa), rat_i(1), rat_i(0)],
        vec![rat(-(a + 2 * kappa), 12), rat_i(kappa), rat_i(1), rat_i(1)],
    ]);
    let n = QMat::new(vec![
        vec![rat_i(0), rat_i(0), rat_i(0), rat_i(0)],
        vec![rat_i(-1), rat_i(0), rat_i(0), rat_i(0)],
        vec![half_k.clone(), rat_i(kappa), rat_i(0), rat_i(0)],
        vec![rat(-a, 12), half_k, rat_i(1), rat_i(0)],
    ]);
    let q = polarization_form();
    // construction-time invariants
    assert_eq!(n.nilpotent_exp(), m, "exp(N) != M");
    assert!(n.pow(4).is_zero(), "monodromy logarithm is not nilpotent");
    if kappa != 0 {
        assert!(!n.pow(3).is_zero(), "monodromy is not MUM");
    }
    assert_eq!(m.transpose().mul(&q).mul(&m), q, "M does not preserve Q");
    IntegralMonodromy { m, n, q }
}

/// Limiting period matrix: rows (g~0, g~1, g~2, g~3) then one row per
/// brane, columns (e3, e2, e1, e0) then one column per brane generator.
/// The zeta(3) entry follows the Gamma-class normalization
/// zeta3hat = zeta(3)/(2*pi*i)^3.
pub fn limiting_period_matrix(
    kappa: i64,
    a: i64,
    b: i64,
    branes: &[(Rat, FormalConstant)],
) -> Vec<Vec<FormalConstant>> {
    let d = branes.len();
    let n = 4 + d;
    let mut out = vec![vec![FormalConstant::zero(); n]; n];
    for (i, row) in out.iter_mut().enumerate().take(4) {
        row[i] = FormalConstant::one();
    }
    out[2][0] = FormalConstant::from_rat(rat(a, 24));
    out[2][1] = FormalConstant::from_rat(rat(-kappa, 2));
    out[3][0] = FormalConstant::zeta3hat(rat_i(b));
    out[3][1] = FormalConstant::from_rat(rat(a, 24));
    for (k, (s_over_r, c)) in branes.iter().enumerate() {
        out[2][4 + k] = FormalConstant::from_rat(s_over_r.clone());
        out[3][4 + k] = c.clone();
    }
    out
}

/// Everything the closed pipeline produces for one geometry.
pub struct ClosedMirrorData {
    pub kappa: i64,
    pub a: i64,
    pub b: i64,
    pub mirror: MirrorMap,
    pub yukawa: Series,
    pub f_q: Series,
    pub ntilde: Vec<Rat>,
    pub instanton: Vec<Rat>,
    pub monodromy: IntegralMonodromy,
    pub limit_matrix: Vec<Vec<FormalConstant>>,
}

pub fn closed_pipeline(
    op: &PFOperator,
    kappa: i64,
    a: i64,
    b: i64,
    order: i64,
) -> Result<ClosedMirrorData, ClosedError> {
    let basis = crate::picard_fuchs::frobenius_mum_basis(op, order)
        .expect("operator checked MUM on construction");
    let mirror = mirror_map(&basis)?;
    let yukawa = yukawa_coupling(op, kappa, &mirror, basis.holomorphic())?;
    let prep = prepotential_recover(&yukawa, kappa)?;
    let instanton = instanton_invert(&prep.ntilde);
    let monodromy = monodromy_matrices(kappa, a);
    let limit_matrix = limiting_period_matrix(kappa, a, b, &[]);
    Ok(ClosedMirrorData {
        kappa,
        a,
        b,
        mirror,
        yukawa,
        f_q: prep.f_q,
        ntilde: prep.ntilde,
        instanton,
        monodromy,
        limit_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard_fuchs::frobenius_mum_basis;

    fn quintic_mirror(order: i64) -> (PFOperator, FrobeniusBasis, MirrorMap) {
        let op = PFOperator::quintic();
        let basis = frobenius_mum_basis(&op, order).unwrap();
        let mm = mirror_map(&basis).unwrap();
        (op, basis, mm)
    }

    #[test]
    fn mirror_map_round_trip() {
        let (_, _, mm) = quintic_mirror(8);
        assert_eq!(mm.z_q.coeff(1, 0), rat_i(1));
        let round = mm.q_z.compose(&mm.z_q).unwrap();
        assert_eq!(round, Series::x(round.trunc_num()));
        let round2 = mm.z_q.compose(&mm.q_z).unwrap();
        assert_eq!(round2, Series::x(round2.trunc_num()));
    }

    #[test]
    fn quintic_yukawa_series() {
        let (op, basis, mm) = quintic_mirror(8);
        let c = yukawa_coupling(&op, 5, &mm, basis.holomorphic()).unwrap();
        assert_eq!(c.coeff(0, 0), rat_i(5));
        assert_eq!(c.coeff(1, 0), rat_i(2875));
        assert_eq!(c.coeff(2, 0), rat_i(4876875));
        assert_eq!(c.coeff(3, 0), rat_i(8564575000));
    }

    #[test]
    fn quintic_rational_yukawa_z() {
        // intermediate check: Y(z) = 5/(1 - 3125 z)
        let op = PFOperator::quintic();
        let order = 6;
        let p3 = Series::monomial(1, order, 1, 0, rat_i(-6250));
        let p4 = Series::one(order).add(&Series::monomial(1, order, 1, 0, rat_i(-3125)));
        let a3 = p3.div(&p4).unwrap();
        let y = antitheta(&a3.scale(&rat(-1, 2))).exp().unwrap().scale(&rat_i(5));
        let expected = Series::constant(rat_i(5), order).div(&p4).unwrap();
        assert_eq!(y, expected);
        let _ = op;
    }

    #[test]
    fn quintic_prepotential_and_instantons() {
        let (op, basis, mm) = quintic_mirror(8);
        let c = yukawa_coupling(&op, 5, &mm, basis.holomorphic()).unwrap();
        let prep = prepotential_recover(&c, 5).unwrap();
        assert_eq!(prep.ntilde[0], rat_i(2875));
        assert_eq!(prep.ntilde[1], rat(4876875, 8));
        assert_eq!(prep.ntilde[2], rat(8564575000, 27));
        // theta^3 f = C - kappa
        let back = prep.f_q.theta().theta().theta();
        assert_eq!(back, c.sub(&Series::constant(rat_i(5), c.trunc_num())));
        let inst = instanton_invert(&prep.ntilde);
        assert_eq!(inst[0], rat_i(2875));
        assert_eq!(inst[1], rat_i(609250));
        assert_eq!(inst[2], rat_i(317206375));
        // multicover round trip
        assert_eq!(multicover_resum(&inst), prep.ntilde);
    }

    #[test]
    fn monodromy_invariants_and_entry() {
        let mon = monodromy_matrices(5, 50);
        assert_eq!(mon.m.rows[3][0], rat_i(-5));
        // invariants exp(N) = M, nilpotency, M^T Q M = Q run on construction
    }

    #[test]
    fn flat_matrix_monodromy_transformation() {
        let (op, basis, mm) = quintic_mirror(8);
        let c = yukawa_coupling(&op, 5, &mm, basis.holomorphic()).unwrap();
        let prep = prepotential_recover(&c, 5).unwrap();
        let p = flat_period_matrix(5, 50, &prep.f_q);
        let mon = monodromy_matrices(5, 50);
        // t -> t+1 acts entrywise by shifting the log symbol
        for i in 0..4 {
            for j in 0..4 {
                let shifted = p[i][j].shift_log(&Rat::one());
                let mut acc = Series::zero_int(p[i][j].trunc_num());
                for k in 0..4 {
                    if !mon.m.rows[k][i].is_zero() {
                        acc = acc.add(&p[k][j].scale(&mon.m.rows[k][i]));
                    }
                }
                assert_eq!(shifted, acc.truncate(shifted.trunc_num()), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn limiting_matrix_quintic_entries() {
        let lim = limiting_period_matrix(5, 50, -200, &[]);
        assert_eq!(lim[3][1], FormalConstant::from_rat(rat(25, 12)));
        assert_eq!(lim[3][0], FormalConstant::zeta3hat(rat_i(-200)));
        assert_eq!(lim[2][0], FormalConstant::from_rat(rat(25, 12)));
        let trivial = limiting_period_matrix(0, 0, 0, &[]);
        for i in 0..4 {
            for j in 0..4 {
                let expect =
                    if i == j { FormalConstant::one() } else { FormalConstant::zero() };
                assert_eq!(trivial[i][j], expect);
            }
        }
    }
}
