//! Order-4 Picard-Fuchs operators in theta = z d/dz and the Frobenius
//! method at a point of maximal unipotent monodromy (MUM).
//!
//! The log-graded solutions are produced by running the holomorphic
//! recurrence over the nilpotent ring Q[eps]/(eps^4) with the ansatz
//! z^eps * sum c_n(eps) z^n; powers of eps become powers of log z.

use crate::constants::Rat;
use crate::series::Series;
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PFError {
    #[error("operator violates the MUM condition (need p4(0) != 0 and p_i(0) = 0 for i < 4)")]
    NotMum,
    #[error("operator needs exactly 5 theta-coefficient polynomials")]
    WrongOrder,
    #[error("resonant inhomogeneity exponent {0} meets the indicial root")]
    Resonance(String),
}

/// Element of Q[eps]/(eps^4): a[0] + a[1] eps + a[2] eps^2 + a[3] eps^3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eps(pub [Rat; 4]);

impl Eps {
    pub fn zero() -> Self {
        Eps([Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()])
    }

    pub fn one() -> Self {
        Eps::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Eps([r, Rat::zero(), Rat::zero(), Rat::zero()])
    }

    /// n + eps for an integer-shifted exponent.
    pub fn shifted(n: i64) -> Self {
        Eps([
            Rat::from_integer(BigInt::from(n)),
            Rat::one(),
            Rat::zero(),
            Rat::zero(),
        ])
    }

    pub fn add(&self, other: &Eps) -> Eps {
        let mut out = self.clone();
        for (x, y) in out.0.iter_mut().zip(&other.0) {
            *x += y;
        }
        out
    }

    pub fn mul(&self, other: &Eps) -> Eps {
        let mut out = Eps::zero();
        for i in 0..4 {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..(4 - i) {
                let p = &self.0[i] * &other.0[j];
                out.0[i + j] += p;
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Eps {
        let mut out = self.clone();
        for x in out.0.iter_mut() {
            *x *= c;
        }
        out
    }

    pub fn pow(&self, k: usize) -> Eps {
        let mut acc = Eps::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse, defined when the constant part is nonzero:
    /// (c(1+u))^{-1} = (1/c)(1 - u + u^2 - u^3) with u nilpotent.
    pub fn inv(&self) -> Option<Eps> {
        if self.0[0].is_zero() {
            return None;
        }
        let c = self.0[0].clone();
        let mut u = self.scale(&(Rat::one() / &c));
        u.0[0] = Rat::zero();
        let mut acc = Eps::one();
        let mut pow = Eps::one();
        for k in 1..4 {
            pow = pow.mul(&u);
            let sign = if k % 2 == 1 { -Rat::one() } else { Rat::one() };
            acc = acc.add(&pow.scale(&sign));
        }
        Some(acc.scale(&(Rat::one() / c)))
    }
}

/// D = sum_i p_i(z) theta^i with rational polynomial coefficients,
/// normalized so the indicial polynomial at z = 0 is rho^4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFOperator {
    /// theta_polys[i][m] is the z^m coefficient of p_i(z).
    pub theta_polys: Vec<Vec<Rat>>,
}

impl PFOperator {
    pub fn new(theta_polys: Vec<Vec<Rat>>) -> Result<Self, PFError> {
        if theta_polys.len() != 5 {
            return Err(PFError::WrongOrder);
        }
        let p = |i: usize, m: usize| -> Rat {
            theta_polys[i].get(m).cloned().unwrap_or_else(Rat::zero)
        };
        if p(4, 0).is_zero() || (0..4).any(|i| !p(i, 0).is_zero()) {
            return Err(PFError::NotMum);
        }
        Ok(PFOperator { theta_polys })
    }

    /// z^m coefficient of p_i(z).
    pub fn coeff(&self, i: usize, m: usize) -> Rat {
        self.theta_polys[i].get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// Largest z-degree appearing in any p_i.
    pub fn z_degree(&self) -> usize {
        self.theta_polys.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)
    }

    /// theta^4 - scale * z * prod_k (w*theta + k), the hypergeometric
    /// family containing the quintic (w = 5, k = 1..4, scale = 5).
    pub fn hypergeometric(w: i64, shifts: &[i64], scale: &Rat) -> Result<Self, PFError> {
        assert!(!shifts.is_empty(), "need at least one shift");
        // expand prod (w*theta + k) as a polynomial in theta
        let mut prod: Vec<Rat> = vec![Rat::one()];
        for &k in shifts {
            let mut next = vec![Rat::zero(); prod.len() + 1];
            for (i, c) in prod.iter().enumerate() {
                next[i + 1] += c * Rat::from_integer(BigInt::from(w));
                next[i] += c * Rat::from_integer(BigInt::from(k));
            }
            prod = next;
        }
        let mut theta_polys = vec![vec![Rat::zero()]; 5];
        theta_polys[4] = vec![Rat::one()];
        for (i, c) in prod.iter().enumerate() {
            if i > 4 {
                if !c.is_zero() {
                    return Err(PFError::WrongOrder);
                }
                continue;
            }
            // p_i gains -scale * c at z^1
            let entry = -(scale * c);
            while theta_polys[i].len() < 2 {
                theta_polys[i].push(Rat::zero());
            }
            theta_polys[i][1] += entry;
        }
        PFOperator::new(theta_polys)
    }

    /// The quintic operator theta^4 - 5z(5theta+1)(5theta+2)(5theta+3)(5theta+4).
    pub fn quintic() -> Self {
        PFOperator::hypergeometric(5, &[1, 2, 3, 4], &Rat::from_integer(BigInt::from(5)))
            .expect("quintic operator is MUM")
    }

    /// Apply the operator to a series: sum_{i,m} p_{i,m} z^m theta^i(f).
    pub fn apply(&self, f: &Series) -> Series {
        let mut thetas = Vec::with_capacity(5);
        thetas.push(f.clone());
        for i in 1..=4 {
            let prev: &Series = &thetas[i - 1];
            thetas.push(prev.theta());
        }
        let mut out = Series::zero(f.cover(), f.trunc_num());
        for (i, poly) in self.theta_polys.iter().enumerate() {
            for (m, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let shifted = thetas[i].mul_monomial((m as i64) * thetas[i].cover(), 0, c);
                out = out.add(&shifted);
            }
        }
        out
    }

    /// Indicial polynomial P(x) = sum_i p_i(0) x^i evaluated over Q[eps]/(eps^4).
    fn indicial_eps(&self, x: &Eps) -> Eps {
        let mut acc = Eps::zero();
        for i in 0..5 {
            let c = self.coeff(i, 0);
            if !c.is_zero() {
                acc = acc.add(&x.pow(i).scale(&c));
            }
        }
        acc
    }

    /// Indicial polynomial at a rational exponent.
    fn indicial_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut pow = Rat::one();
        for i in 0..5 {
            acc += self.coeff(i, 0) * &pow;
            pow *= x;
        }
        acc
    }

    /// The unique log-free particular solution of D psi = rhs, supported on
    /// the exponent lattice of rhs (rhs exponents plus nonnegative integers).
    /// Fails when a needed exponent meets the indicial root.
    pub fn solve_inhomogeneous(&self, rhs: &Series) -> Result<Series, PFError> {
        assert!(rhs.is_log_free(), "inhomogeneity with log terms is unsupported");
        let cover = rhs.cover();
        let trunc = rhs.trunc_num();
        let mut out = Series::zero(cover, trunc);
        if rhs.is_zero() {
            return Ok(out);
        }
        // residues mod cover present in the rhs support, with their minima
        let mut start: std::collections::BTreeMap<i64, i64> = std::collections::BTreeMap::new();
        for (&(e, _), _) in rhs.iter() {
            let res = e.rem_euclid(cover);
            let entry = start.entry(res).or_insert(e);
            if e < *entry {
                *entry = e;
            }
        }
        let zdeg = self.z_degree() as i64;
        for (&res, &min_e) in &start {
            let mut e = min_e;
            while e < trunc {
                debug_assert_eq!(e.rem_euclid(cover), res);
                let e_rat = Rat::new(BigInt::from(e), BigInt::from(cover));
                let p_e = self.indicial_rat(&e_rat);
                if p_e.is_zero() {
                    return Err(PFError::Resonance(crate::constants::rat_string(&e_rat)));
                }
                let mut acc = rhs.coeff(e, 0);
                for m in 1..=zdeg {
                    let em = e - m * cover;
                    if em < min_e {
                        break;
                    }
                    let c_prev = out.coeff(em, 0);
                    if c_prev.is_zero() {
                        continue;
                    }
                    let em_rat = Rat::new(BigInt::from(em), BigInt::from(cover));
                    let mut pow = Rat::one();
                    for i in 0..5 {
                        let pim = self.coeff(i, m as usize);
                        if !pim.is_zero() {
                            acc -= pim * &pow * &c_prev;
                        }
                        pow *= &em_rat;
                    }
                }
                out.add_term(e, 0, acc / p_e);
                e += cover;
            }
        }
        Ok(out)
    }
}

/// The four MUM solutions graded by log-power.
#[derive(Clone, Debug)]
pub struct FrobeniusBasis {
    /// solutions[k] has maximal log-power exactly k; solutions[0] is the
    /// holomorphic period with constant term 1.
    pub solutions: [Series; 4],
    pub order: i64,
}

impl FrobeniusBasis {
    pub fn holomorphic(&self) -> &Series {
        &self.solutions[0]
    }
}

/// Frobenius basis at the MUM point, to the given z-order.
pub fn frobenius_mum_basis(op: &PFOperator, order: i64) -> Result<FrobeniusBasis, PFError> {
    assert!(order > 0);
    let zdeg = op.z_degree();
    let mut coeffs: Vec<Eps> = vec![Eps::one()];
    for n in 1..order {
        let mut acc = Eps::zero();
        for m in 1..=zdeg.min(n as usize) {
            let x = Eps::shifted(n - m as i64);
            let c_prev = &coeffs[n as usize - m];
            let mut pow = Eps::one();
            for i in 0..5 {
                let pim = op.coeff(i, m);
                if !pim.is_zero() {
                    acc = acc.add(&pow.mul(c_prev).scale(&pim));
                }
                pow = pow.mul(&x);
            }
        }
        let denom = op.indicial_eps(&Eps::shifted(n));
        let inv = denom.inv().expect("MUM indicial value is a unit off the origin");
        coeffs.push(acc.scale(&-Rat::one()).mul(&inv));
    }

    // z^eps = sum_j eps^j log(z)^j / j!; pick out eps^k and scale by k!
    let mut solutions: Vec<Series> = Vec::with_capacity(4);
    for k in 0..4usize {
        let mut s = Series::zero_int(order);
        let mut kfac = Rat::one();
        for i in 2..=k {
            kfac *= Rat::from_integer(BigInt::from(i as i64));
        }
        for (n, c) in coeffs.iter().enumerate() {
            for j in 0..=k {
                // eps^j from z^eps, eps^{k-j} from c_n
                let mut jfac = Rat::one();
                for i in 2..=j {
                    jfac *= Rat::from_integer(BigInt::from(i as i64));
                }
                let coeff = &c.0[k - j] * &kfac / jfac;
                s.add_term(n as i64, j as u8, coeff);
            }
        }
        solutions.push(s);
    }
    let solutions: [Series; 4] = solutions.try_into().unwrap();
    Ok(FrobeniusBasis { solutions, order })
}
