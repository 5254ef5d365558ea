//! Truncated Puiseux series with logarithmic terms over the rationals.
//!
//! A series is a finite sum of terms c * x^(e) * log(x)^j with c rational,
//! e a nonnegative multiple of 1/cover, and j a small nonnegative integer.
//! Exponents are stored as integer numerators over the cover degree.
//! `log(x)` is a formal symbol with theta(log x) = 1 for the logarithmic
//! derivative theta = x d/dx.
//!
//! Every series carries an explicit truncation order: it is known modulo
//! x^trunc, terms with exponent >= trunc are never stored, and binary
//! operations propagate the minimum of the operands' truncation orders.
//! Zero coefficients are never stored.

use crate::constants::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Errors from series operations whose preconditions can fail on user data.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series whose leading term carries log factors")]
    DivisorLeadingLog,
    #[error("division by the zero series")]
    DivisorZero,
    #[error("composition inner series must have strictly positive valuation")]
    ComposeValuation,
    #[error("composition inner series must be log-free")]
    ComposeInnerLog,
    #[error("composition with log or fractional outer terms needs inner leading coefficient 1, got {0}")]
    ComposeLeadingCoeff(String),
    #[error("reversion needs a series c1*x + O(x^2) with c1 != 0 and no logs")]
    ReverseShape,
    #[error("exp needs strictly positive valuation")]
    ExpShape,
    #[error("log needs constant term 1")]
    LogShape,
}

/// Key: (exponent numerator over the cover degree, log power).
type Key = (i64, u8);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    /// Exponents lie in (1/cover) * Z_{>=0}.
    cover: i64,
    /// Known modulo x^(trunc_num/cover); stored exponents are strictly below.
    trunc_num: i64,
    terms: BTreeMap<Key, Rat>,
}

impl Series {
    /// Zero series on the given cover, truncated at x^(trunc_num/cover).
    pub fn zero(cover: i64, trunc_num: i64) -> Self {
        assert!(cover > 0 && trunc_num > 0);
        Series { cover, trunc_num, terms: BTreeMap::new() }
    }

    /// Zero series with integer exponents truncated at x^order.
    pub fn zero_int(order: i64) -> Self {
        Series::zero(1, order)
    }

    pub fn constant(c: Rat, order: i64) -> Self {
        let mut s = Series::zero_int(order);
        s.add_term(0, 0, c);
        s
    }

    pub fn one(order: i64) -> Self {
        Series::constant(Rat::one(), order)
    }

    /// The unit series on an arbitrary cover and truncation numerator.
    pub fn unit(cover: i64, trunc_num: i64) -> Self {
        Series::monomial(cover, trunc_num, 0, 0, Rat::one())
    }

    /// The variable x itself.
    pub fn x(order: i64) -> Self {
        let mut s = Series::zero_int(order);
        s.add_term(1, 0, Rat::one());
        s
    }

    /// The formal symbol log(x).
    pub fn log_x(order: i64) -> Self {
        let mut s = Series::zero_int(order);
        s.add_term(0, 1, Rat::one());
        s
    }

    /// Single term c * x^(exp_num/cover) * log(x)^log_pow.
    pub fn monomial(cover: i64, trunc_num: i64, exp_num: i64, log_pow: u8, c: Rat) -> Self {
        let mut s = Series::zero(cover, trunc_num);
        s.add_term(exp_num, log_pow, c);
        s
    }

    pub fn cover(&self) -> i64 {
        self.cover
    }

    /// Truncation order as a rational.
    pub fn truncation(&self) -> Rat {
        Rat::new(BigInt::from(self.trunc_num), BigInt::from(self.cover))
    }

    pub fn trunc_num(&self) -> i64 {
        self.trunc_num
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_log_free(&self) -> bool {
        self.terms.keys().all(|&(_, j)| j == 0)
    }

    pub fn max_log_power(&self) -> u8 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    /// Smallest exponent (numerator over cover) present, if any.
    pub fn valuation_num(&self) -> Option<i64> {
        self.terms.keys().map(|&(e, _)| e).min()
    }

    /// Add c to the coefficient of x^(exp_num/cover) * log^log_pow,
    /// dropping the term if it cancels or lies at/beyond truncation.
    pub fn add_term(&mut self, exp_num: i64, log_pow: u8, c: Rat) {
        assert!(exp_num >= 0, "negative exponent");
        if c.is_zero() || exp_num >= self.trunc_num {
            return;
        }
        let entry = self.terms.entry((exp_num, log_pow)).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(exp_num, log_pow));
        }
    }

    /// Coefficient of x^(exp_num/cover) * log^log_pow on this series' cover.
    pub fn coeff(&self, exp_num: i64, log_pow: u8) -> Rat {
        self.terms.get(&(exp_num, log_pow)).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficient of x^e * log^j for a rational exponent e = (p, q).
    pub fn coeff_rat(&self, e: &Rat, log_pow: u8) -> Rat {
        let num = e.numer() * BigInt::from(self.cover);
        let den = e.denom().clone();
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Rat::zero();
        }
        match i64::try_from(&q) {
            Ok(n) => self.coeff(n, log_pow),
            Err(_) => Rat::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &Rat)> {
        self.terms.iter()
    }

    /// Rewrite on a finer cover (new_cover a multiple of the current one).
    pub fn lift_cover(&self, new_cover: i64) -> Series {
        assert!(new_cover % self.cover == 0);
        let m = new_cover / self.cover;
        if m == 1 {
            return self.clone();
        }
        let mut out = Series::zero(new_cover, self.trunc_num * m);
        for (&(e, j), c) in &self.terms {
            out.add_term(e * m, j, c.clone());
        }
        out
    }

    /// Remove redundancy in the cover degree (e.g. only even numerators on
    /// cover 2 become integer exponents on cover 1).
    pub fn normalize_cover(&self) -> Series {
        let mut g = self.cover;
        for &(e, _) in self.terms.keys() {
            g = g.gcd(&e);
        }
        g = g.gcd(&self.trunc_num);
        if g <= 1 {
            return self.clone();
        }
        let mut out = Series::zero(self.cover / g, self.trunc_num / g);
        for (&(e, j), c) in &self.terms {
            out.add_term(e / g, j, c.clone());
        }
        out
    }

    /// Re-declare the truncation order. Raising it is only sound when the
    /// caller knows the dropped error terms genuinely live beyond the new
    /// order (used inside compose after shifting a tail back up by x^v).
    fn with_trunc(&self, trunc_num: i64) -> Series {
        let mut out = Series::zero(self.cover, trunc_num);
        for (&(e, j), c) in &self.terms {
            out.add_term(e, j, c.clone());
        }
        out
    }

    /// Restrict to a smaller truncation order (numerator on this cover).
    pub fn truncate(&self, trunc_num: i64) -> Series {
        assert!(trunc_num > 0);
        let mut out = Series::zero(self.cover, trunc_num.min(self.trunc_num));
        for (&(e, j), c) in &self.terms {
            out.add_term(e, j, c.clone());
        }
        out
    }

    /// Bring two series onto a common cover.
    fn unify(a: &Series, b: &Series) -> (Series, Series) {
        let cover = a.cover.lcm(&b.cover);
        (a.lift_cover(cover), b.lift_cover(cover))
    }

    pub fn neg(&self) -> Series {
        let mut out = Series::zero(self.cover, self.trunc_num);
        for (&(e, j), c) in &self.terms {
            out.add_term(e, j, -c.clone());
        }
        out
    }

    pub fn add(&self, other: &Series) -> Series {
        let (a, b) = Series::unify(self, other);
        let trunc = a.trunc_num.min(b.trunc_num);
        let mut out = Series::zero(a.cover, trunc);
        for (&(e, j), c) in a.terms.iter().chain(b.terms.iter()) {
            out.add_term(e, j, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Series {
        if c.is_zero() {
            return Series::zero(self.cover, self.trunc_num);
        }
        let mut out = Series::zero(self.cover, self.trunc_num);
        for (&(e, j), v) in &self.terms {
            out.add_term(e, j, v * c);
        }
        out
    }

    pub fn add_scalar(&self, c: &Rat) -> Series {
        let mut out = self.clone();
        out.add_term(0, 0, c.clone());
        out
    }

    /// Multiply by x^(exp_num/cover) on this series' cover; truncation order
    /// is kept, so high terms fall off.
    pub fn mul_monomial(&self, exp_num: i64, log_pow: u8, c: &Rat) -> Series {
        let mut out = Series::zero(self.cover, self.trunc_num);
        for (&(e, j), v) in &self.terms {
            out.add_term(e + exp_num, j + log_pow, v * c);
        }
        out
    }

    pub fn mul(&self, other: &Series) -> Series {
        let (a, b) = Series::unify(self, other);
        let trunc = a.trunc_num.min(b.trunc_num);
        let mut out = Series::zero(a.cover, trunc);
        for (&(ea, ja), ca) in &a.terms {
            if ea >= trunc {
                break;
            }
            for (&(eb, jb), cb) in &b.terms {
                if ea + eb >= trunc {
                    // later keys can still have smaller eb only within the
                    // same exponent block, so filter instead of breaking
                    continue;
                }
                out.add_term(ea + eb, ja + jb, ca * cb);
            }
        }
        out
    }

    /// Exact division; the divisor's lowest exponent must carry a log-free
    /// invertible part and no log terms at that same exponent.
    pub fn div(&self, other: &Series) -> Result<Series, SeriesError> {
        let (a, b) = Series::unify(self, other);
        let v = match b.valuation_num() {
            Some(v) => v,
            None => return Err(SeriesError::DivisorZero),
        };
        if b.terms.keys().any(|&(e, j)| e == v && j > 0) {
            return Err(SeriesError::DivisorLeadingLog);
        }
        let lead = b.coeff(v, 0);
        // b = lead * x^(v) * (1 + u); b known mod x^T makes 1+u known mod x^(T-v)
        let trunc = a.trunc_num.min(b.trunc_num);
        let u_trunc = (b.trunc_num - v).max(1);
        let mut u = Series::zero(b.cover, u_trunc);
        for (&(e, j), c) in &b.terms {
            if e > v {
                u.add_term(e - v, j, c / &lead);
            }
        }
        // 1/(1+u) = sum (-u)^k, terminating at the truncation order
        let inv_tail = geometric_inverse(&u);
        // a / b = (a * inv_tail / lead) shifted down by v
        let num = a.mul(&inv_tail).scale(&(Rat::one() / lead));
        let mut out = Series::zero(num.cover, (num.trunc_num - v).max(1).min(trunc));
        for (&(e, j), c) in &num.terms {
            let e2 = e - v;
            if e2 < 0 {
                // cannot represent negative exponents; the quotient's
                // valuation must be nonnegative for our applications
                panic!("division produced a negative exponent");
            }
            out.add_term(e2, j, c.clone());
        }
        Ok(out)
    }

    /// Logarithmic derivative theta = x d/dx with theta(log x) = 1:
    /// theta(x^e log^j) = e x^e log^j + j x^e log^(j-1).
    pub fn theta(&self) -> Series {
        let mut out = Series::zero(self.cover, self.trunc_num);
        let cov = Rat::from_integer(BigInt::from(self.cover));
        for (&(e, j), c) in &self.terms {
            let e_rat = Rat::from_integer(BigInt::from(e)) / &cov;
            out.add_term(e, j, c * e_rat);
            if j > 0 {
                out.add_term(e, j - 1, c * Rat::from_integer(BigInt::from(j)));
            }
        }
        out
    }

    /// Replace the symbol log(x) by log(x) + c (the deck transformation
    /// t -> t + c on the log-polynomial part).
    pub fn shift_log(&self, shift: &Rat) -> Series {
        let mut out = Series::zero(self.cover, self.trunc_num);
        for (&(e, j), c) in &self.terms {
            // (l + shift)^j expanded binomially
            let mut binom = Rat::one();
            let mut pow = Rat::one();
            for k in (0..=j).rev() {
                // coefficient of l^k: C(j, k) * shift^(j-k)
                out.add_term(e, k, c * &binom * &pow);
                if k > 0 {
                    binom = binom * Rat::new(BigInt::from(k), BigInt::from(j - k + 1));
                    pow = pow * shift;
                }
            }
        }
        out
    }

    /// Coefficients of log^j at exponent 0, as the q -> 0 limit of a series
    /// whose positive-exponent terms are discarded.
    pub fn limit_at_origin(&self) -> Vec<Rat> {
        let maxj = self.max_log_power();
        (0..=maxj).map(|j| self.coeff(0, j)).collect()
    }

    /// Composition outer(inner). The inner series must be log-free with
    /// strictly positive valuation; if the outer series has log terms or
    /// fractional exponents the inner leading coefficient must be 1, so
    /// that log(inner) and fractional powers of inner stay rational.
    pub fn compose(&self, inner: &Series) -> Result<Series, SeriesError> {
        if !inner.is_log_free() {
            return Err(SeriesError::ComposeInnerLog);
        }
        let v = match inner.valuation_num() {
            Some(v) if v > 0 => v,
            None => {
                // composing with the zero series keeps only the constant
                // term; a log term at exponent 0 would need log(0)
                if self.terms.keys().any(|&(e, j)| e == 0 && j > 0) {
                    return Err(SeriesError::ComposeValuation);
                }
                return Ok(Series::constant(self.coeff(0, 0), 1)
                    .lift_cover(inner.cover)
                    .truncate(inner.trunc_num));
            }
            Some(_) => return Err(SeriesError::ComposeValuation),
        };
        let lead = inner.coeff(v, 0);
        let needs_unit_lead = !self.is_log_free() || self.cover > 1;
        if needs_unit_lead && !lead.is_one() {
            return Err(SeriesError::ComposeLeadingCoeff(lead.to_string()));
        }

        // Result lives on the cover refining both inner exponents and
        // v * (outer exponents): inner.cover * self.cover is always enough.
        let cover = inner.cover * self.cover;
        let inner_l = inner.lift_cover(cover);
        let v_l = v * (cover / inner.cover);

        // Truncation: error x^T in inner enters linearly; error from outer
        // truncation enters at exponent v * outer.trunc.
        let t_from_outer = {
            // v/cover * trunc_num/self.cover, as numerator over `cover`
            let t = BigInt::from(v_l) * BigInt::from(self.trunc_num);
            let d = BigInt::from(self.cover);
            let (q, r) = t.div_rem(&d);
            let q: i64 = i64::try_from(&q).expect("truncation overflow");
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        let trunc = inner_l.trunc_num.min(t_from_outer).max(1);
        let mut out = Series::zero(cover, trunc);

        // tail u with inner = lead * x^(v) * (1 + u)
        let mut u = Series::zero(cover, (inner_l.trunc_num - v_l).max(1));
        for (&(e, _), c) in &inner_l.terms {
            if e > v_l {
                u.add_term(e - v_l, 0, c / &lead);
            }
        }
        u = u.truncate(trunc);

        // log(inner) = v * log(x) + log(1+u), valid since lead = 1 whenever
        // log terms are substituted
        let log_inner = if self.is_log_free() {
            None
        } else {
            let v_rat = Rat::new(BigInt::from(v), BigInt::from(inner.cover));
            let mut l = log1p(&u);
            l = l.add(&Series::monomial(cover, trunc, 0, 1, v_rat));
            Some(l)
        };
        let maxj = self.max_log_power();
        let mut log_pows: Vec<Series> = vec![Series::unit(cover, trunc)];
        if let Some(li) = &log_inner {
            for j in 1..=maxj {
                let prev = log_pows[(j - 1) as usize].clone();
                log_pows.push(prev.mul(li));
            }
        }

        // Group outer terms by exponent so inner^e is computed once each.
        let mut by_exp: BTreeMap<i64, Vec<(u8, Rat)>> = BTreeMap::new();
        for (&(e, j), c) in &self.terms {
            by_exp.entry(e).or_default().push((j, c.clone()));
        }
        for (e, parts) in by_exp {
            // inner^(e/self.cover) = lead^(e/self.cover) * x^(v*e/self.cover) * (1+u)^(e/self.cover)
            let alpha = Rat::new(BigInt::from(e), BigInt::from(self.cover));
            let shift_num_big = BigInt::from(v_l) * BigInt::from(e);
            // v_l*e must be divisible by self.cover for the exponent to
            // live on `cover`; with unit lead and our cover choice it is,
            // otherwise lift further
            let (shift_q, shift_r) = shift_num_big.div_rem(&BigInt::from(self.cover));
            assert!(shift_r.is_zero(), "composition exponent lattice mismatch");
            let shift: i64 = i64::try_from(&shift_q).expect("exponent overflow");
            if shift >= trunc {
                continue;
            }
            let lead_pow = if lead.is_one() {
                Rat::one()
            } else {
                // alpha is a nonnegative integer here (log-free outer on
                // cover 1), checked by needs_unit_lead above
                rat_int_pow(&lead, &alpha)
            };
            let tail_pow = binomial_pow(&u, &alpha);
            // (1+u)^alpha is known mod x^(u.trunc); after the x^shift twist
            // the product is known mod x^(u.trunc + shift)
            let mut term = if alpha.is_zero() {
                Series::unit(cover, trunc)
            } else {
                let known = (u.trunc_num() + shift).min(trunc);
                tail_pow.with_trunc(known).mul_monomial(shift, 0, &lead_pow)
            };
            let mut acc = Series::zero(cover, trunc);
            for (j, c) in parts {
                let piece = if j == 0 {
                    term.scale(&c)
                } else {
                    term.mul(&log_pows[j as usize]).scale(&c)
                };
                acc = acc.add(&piece);
            }
            term = acc;
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Compositional inverse of f = c1 x + O(x^2), c1 != 0, log-free,
    /// integer exponents.
    pub fn reverse(&self) -> Result<Series, SeriesError> {
        if !self.is_log_free() || self.cover != 1 {
            return Err(SeriesError::ReverseShape);
        }
        if self.valuation_num() != Some(1) {
            return Err(SeriesError::ReverseShape);
        }
        let c1 = self.coeff(1, 0);
        let trunc = self.trunc_num;
        let inv_c1 = Rat::one() / &c1;
        let mut g = Series::x(trunc).scale(&inv_c1);
        // Newton-style fixed point: each pass gains at least one order.
        for _ in 0..trunc {
            let fg = self.compose(&g)?.truncate(trunc);
            let err = fg.sub(&Series::x(trunc));
            if err.is_zero() {
                break;
            }
            g = g.sub(&err.scale(&inv_c1)).truncate(trunc);
        }
        Ok(g)
    }

    /// exp of a series with strictly positive valuation (no logs).
    pub fn exp(&self) -> Result<Series, SeriesError> {
        if self.is_zero() {
            return Ok(Series::unit(self.cover, self.trunc_num));
        }
        if !self.is_log_free() || self.valuation_num().map_or(true, |v| v <= 0) {
            return Err(SeriesError::ExpShape);
        }
        let v = self.valuation_num().unwrap();
        let mut out = Series::unit(self.cover, self.trunc_num);
        let mut pow = out.clone();
        let mut k: i64 = 0;
        loop {
            k += 1;
            if v * k >= self.trunc_num {
                break;
            }
            pow = pow.mul(self).scale(&Rat::new(BigInt::one(), BigInt::from(k)));
            if pow.is_zero() {
                break;
            }
            out = out.add(&pow);
        }
        Ok(out)
    }

    /// log of a series with constant term 1 (the tail may contain logs).
    pub fn log(&self) -> Result<Series, SeriesError> {
        if !self.coeff(0, 0).is_one() || self.terms.keys().any(|&(e, j)| e == 0 && j > 0) {
            return Err(SeriesError::LogShape);
        }
        let u = self.sub(&Series::unit(self.cover, self.trunc_num));
        Ok(log1p(&u))
    }

    /// Map every coefficient (used for oracle-side rescalings in tests).
    pub fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> Series {
        let mut out = Series::zero(self.cover, self.trunc_num);
        for (&(e, j), c) in &self.terms {
            out.add_term(e, j, f(c));
        }
        out
    }

    /// Deterministic listing "(exp, logpow) -> coeff" for machine output.
    pub fn term_list(&self) -> Vec<(Rat, u8, Rat)> {
        self.terms
            .iter()
            .map(|(&(e, j), c)| {
                (Rat::new(BigInt::from(e), BigInt::from(self.cover)), j, c.clone())
            })
            .collect()
    }
}

/// 1/(1+u) for u of strictly positive valuation (logs allowed in u).
fn geometric_inverse(u: &Series) -> Series {
    let trunc = u.trunc_num;
    let mut out = Series::unit(u.cover, trunc);
    if u.is_zero() {
        return out;
    }
    assert!(u.valuation_num().unwrap() > 0, "geometric inverse needs positive valuation");
    let mut pow = out.clone();
    loop {
        pow = pow.mul(u).neg();
        if pow.is_zero() {
            break;
        }
        out = out.add(&pow);
    }
    out
}

/// log(1+u) for u of strictly positive valuation.
pub fn log1p(u: &Series) -> Series {
    let trunc = u.trunc_num;
    let mut out = Series::zero(u.cover, trunc);
    if u.is_zero() {
        return out;
    }
    assert!(u.valuation_num().unwrap() > 0, "log1p needs positive valuation");
    let mut pow = Series::unit(u.cover, trunc);
    let mut k: i64 = 0;
    loop {
        k += 1;
        pow = pow.mul(u);
        if pow.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { Rat::one() } else { -Rat::one() };
        out = out.add(&pow.scale(&(sign / Rat::from_integer(BigInt::from(k)))));
    }
    out
}

/// (1+u)^alpha for rational alpha via the binomial series.
pub fn binomial_pow(u: &Series, alpha: &Rat) -> Series {
    let trunc = u.trunc_num;
    let one = Series::unit(u.cover, trunc);
    if u.is_zero() {
        return one;
    }
    assert!(u.valuation_num().unwrap() > 0, "binomial power needs positive valuation");
    let mut out = one.clone();
    let mut pow = one;
    let mut coeff = Rat::one();
    let mut k: i64 = 0;
    loop {
        // C(alpha, k+1) = C(alpha, k) * (alpha - k)/(k+1)
        let factor = (alpha - Rat::from_integer(BigInt::from(k)))
            / Rat::from_integer(BigInt::from(k + 1));
        coeff = coeff * factor;
        k += 1;
        pow = pow.mul(u);
        if pow.is_zero() || coeff.is_zero() {
            break;
        }
        out = out.add(&pow.scale(&coeff));
    }
    out
}

/// c^alpha for integer alpha >= 0 packaged as a rational.
fn rat_int_pow(c: &Rat, alpha: &Rat) -> Rat {
    assert!(alpha.denom().is_one() && !alpha.is_negative(), "need nonnegative integer power");
    let mut n = alpha.numer().clone();
    let mut acc = Rat::one();
    while n.is_positive() {
        acc *= c;
        n -= BigInt::one();
    }
    acc
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 + O(x^{})", self.truncation());
        }
        let mut first = true;
        for (&(e, j), c) in &self.terms {
            let cs = crate::constants::rat_string(c);
            if first {
                write!(f, "{cs}")?;
                first = false;
            } else if let Some(stripped) = cs.strip_prefix('-') {
                write!(f, " - {stripped}")?;
            } else {
                write!(f, " + {cs}")?;
            }
            if e != 0 {
                let e_rat = Rat::new(BigInt::from(e), BigInt::from(self.cover));
                write!(f, "*x^{}", crate::constants::rat_string(&e_rat))?;
            }
            if j == 1 {
                write!(f, "*log")?;
            } else if j > 1 {
                write!(f, "*log^{j}")?;
            }
        }
        write!(f, " + O(x^{})", crate::constants::rat_string(&self.truncation()))
    }
}
