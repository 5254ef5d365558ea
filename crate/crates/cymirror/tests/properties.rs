//! Property-based checks of the structural invariants: the truncated
//! series carrier is a commutative ring with a derivation, the
//! analytic round trips are exact, random quantum potentials satisfy
//! the curvature-residual equivalence, and every nilpotent operator
//! admits a valid weight filtration.

use cymirror::constants::{rat, Rat};
use cymirror::hodge::{check_filtration_properties, weight_filtration, NilpotentOperator};
use cymirror::matrix::QMat;
use cymirror::quantum::{
    closed_curvature_all, closed_curvature_all_from_residuals, curvature,
    curvature_from_residuals, dubrovin_connection, open_wdvv_residual_tensor,
    wdvv_residual_tensor, MPoly, OpenPotential, OpenPotentialSet, PairingMatrix,
    Potential,
};
use cymirror::series::Series;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

/// Raw term data for a series on a fixed cover: (exponent numerator,
/// log power, coefficient).
fn arb_terms(max_exp: i64, max_log: u8) -> impl Strategy<Value = Vec<(i64, u8, Rat)>> {
    prop::collection::vec((0..max_exp, 0..=max_log, arb_rat()), 1..=5)
}

fn build_series(cover: i64, trunc: i64, terms: &[(i64, u8, Rat)]) -> Series {
    let mut s = Series::zero(cover, trunc);
    for (e, l, c) in terms {
        s.add_term(*e, *l, c.clone());
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_laws(
        cover in 1i64..=3,
        mult in 3i64..=6,
        ta in arb_terms(12, 2),
        tb in arb_terms(12, 2),
        tc in arb_terms(12, 2),
    ) {
        let trunc = cover * mult;
        let a = build_series(cover, trunc, &ta);
        let b = build_series(cover, trunc, &tb);
        let c = build_series(cover, trunc, &tc);
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).truncate(trunc), b.mul(&a).truncate(trunc));
        prop_assert_eq!(
            a.mul(&b).mul(&c).truncate(trunc),
            a.mul(&b.mul(&c)).truncate(trunc)
        );
        prop_assert_eq!(
            a.mul(&b.add(&c)).truncate(trunc),
            a.mul(&b).add(&a.mul(&c)).truncate(trunc)
        );
        prop_assert_eq!(a.sub(&a), Series::zero(cover, trunc));
        // The logarithmic derivative is a derivation of the ring.
        prop_assert_eq!(
            a.mul(&b).theta().truncate(trunc),
            a.theta().mul(&b).add(&a.mul(&b.theta())).truncate(trunc)
        );
    }

    #[test]
    fn exp_log_round_trips(
        cover in 1i64..=3,
        mult in 3i64..=6,
        tv in arb_terms(12, 0),
    ) {
        let trunc = cover * mult;
        // exp then log on a positive-valuation series.
        let mut v = Series::zero(cover, trunc);
        for (e, _, c) in &tv {
            v.add_term(e + 1, 0, c.clone());
        }
        let v = v.truncate(trunc);
        prop_assert_eq!(v.exp().unwrap().log().unwrap(), v.clone());
        // log then exp on a series with constant term one.
        let u = v.add_scalar(&Rat::one());
        prop_assert_eq!(u.log().unwrap().exp().unwrap(), u);
    }

    #[test]
    fn compose_reverse_round_trips(
        trunc in 4i64..=7,
        tf in arb_terms(7, 0),
    ) {
        // f = x + higher order terms on the integer cover.
        let mut f = Series::x(trunc);
        for (e, _, c) in &tf {
            if *e >= 2 {
                f.add_term(*e, 0, c.clone());
            }
        }
        let f = f.truncate(trunc);
        let g = f.reverse().unwrap();
        let x = Series::x(trunc);
        prop_assert_eq!(f.compose(&g).unwrap().truncate(trunc), x.clone());
        prop_assert_eq!(g.compose(&f).unwrap().truncate(trunc), x);
    }

    #[test]
    fn division_inverts_multiplication(
        cover in 1i64..=3,
        mult in 3i64..=6,
        ta in arb_terms(12, 0),
        tb in arb_terms(12, 0),
    ) {
        let trunc = cover * mult;
        let a = build_series(cover, trunc, &ta);
        // Make the divisor a unit.
        let mut b = build_series(cover, trunc, &tb);
        b.add_term(0, 0, Rat::one() - b.coeff(0, 0));
        prop_assert_eq!(
            a.mul(&b).div(&b).unwrap().truncate(trunc),
            a.truncate(trunc)
        );
    }
}

/// Raw data for one random potential: the quantum part lives in the
/// Kahler coordinates, the classical perturbation can touch any basis
/// triple.
#[derive(Clone, Debug)]
struct PotentialData {
    n: usize,
    structured: bool,
    kappa: Vec<Rat>,
    quantum: Vec<(Vec<i64>, Rat)>,
    classical: Vec<(usize, usize, usize, Rat)>,
    brane: Option<(Vec<Rat>, Vec<(Vec<i64>, Rat)>)>,
}

fn arb_exps(n: usize, trunc: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0..trunc, n)
}

fn arb_potential() -> impl Strategy<Value = PotentialData> {
    (2usize..=3, any::<bool>()).prop_flat_map(|(n, structured)| {
        let trunc = 3i64;
        let dim = 2 * n + 2;
        let kappa_len = n * n * n;
        (
            prop::collection::vec(arb_rat(), kappa_len),
            prop::collection::vec((arb_exps(n, trunc), arb_rat()), 1..=4),
            prop::collection::vec(
                (0..dim, 0..dim, 0..dim, arb_rat()),
                3..=6,
            ),
            prop::option::of((
                prop::collection::vec(arb_rat(), n * n),
                prop::collection::vec((arb_exps(n, trunc), arb_rat()), 1..=3),
            )),
        )
            .prop_map(move |(kappa, quantum, classical, brane)| PotentialData {
                n,
                structured,
                kappa,
                quantum,
                classical,
                brane,
            })
    })
}

fn build_potential(data: &PotentialData) -> (Potential, Option<OpenPotentialSet>) {
    let n = data.n;
    let trunc = 3;
    let mut quantum = MPoly::zero(n, 1, trunc);
    for (exps, c) in &data.quantum {
        if exps.iter().sum::<i64>() >= 1 {
            quantum.add_term(exps, c.clone());
        }
    }
    let phi = if data.structured {
        let kappa = |i: usize, j: usize, k: usize| {
            data.kappa[(i - 1) * n * n + (j - 1) * n + (k - 1)].clone()
        };
        Potential::closed_cy(n, &kappa, quantum).unwrap()
    } else {
        let mut phi = Potential::new(n, quantum).unwrap();
        for (a, b, c, v) in &data.classical {
            let mut idx = [*a, *b, *c];
            idx.sort_unstable();
            phi.set_classical(idx[0], idx[1], idx[2], v.clone());
        }
        phi
    };
    let psis = data.brane.as_ref().map(|(lam, qterms)| {
        let mut sym = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = lam[i * n + j].clone() + lam[j * n + i].clone();
                sym[i][j] = v;
            }
        }
        let mut q = MPoly::zero(n, 1, 3);
        for (exps, c) in qterms {
            if exps.iter().sum::<i64>() >= 1 {
                q.add_term(exps, c.clone());
            }
        }
        OpenPotentialSet::new(vec![OpenPotential::new(sym, q).unwrap()])
    });
    (phi, psis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_residual_equivalence(data in arb_potential()) {
        let (phi, psis) = build_potential(&data);
        let pairing = PairingMatrix::standard(data.n);
        let dim = phi.dim();

        // Dual paths agree over the Kahler pairs, extension included.
        let conn = dubrovin_connection(&phi, psis.as_ref(), &pairing).unwrap();
        let direct = curvature(&conn);
        let assembled = curvature_from_residuals(&phi, psis.as_ref(), &pairing);
        prop_assert_eq!(direct.len(), assembled.len());
        let mut ext_flat = true;
        for ((pa, ra), (pb, rb)) in direct.iter().zip(&assembled) {
            prop_assert_eq!(pa, pb);
            prop_assert!(ra.eq_mat(rb), "extended curvature paths disagree");
            for row in &ra.entries {
                for entry in row.iter().skip(dim) {
                    ext_flat &= entry.is_zero();
                }
            }
        }

        // Full-direction closed curvature: dual paths agree and the
        // family vanishes exactly when the residual tensors do.
        let closed_direct = closed_curvature_all(&phi, &pairing);
        let closed_assembled = closed_curvature_all_from_residuals(&phi, &pairing);
        prop_assert_eq!(closed_direct.len(), closed_assembled.len());
        let mut closed_flat = true;
        for ((pa, ra), (pb, rb)) in closed_direct.iter().zip(&closed_assembled) {
            prop_assert_eq!(pa, pb);
            prop_assert!(ra.eq_mat(rb), "closed curvature paths disagree");
            closed_flat &= ra.is_zero();
        }

        let mut residuals_zero = wdvv_residual_tensor(&phi, &pairing).is_empty();
        if let Some(set) = &psis {
            for b in &set.branes {
                residuals_zero &= open_wdvv_residual_tensor(&phi, b, &pairing).is_empty();
            }
        }
        prop_assert_eq!(closed_flat && ext_flat, residuals_zero);
        if data.structured {
            prop_assert!(closed_flat && ext_flat, "structured potential must be flat");
        }
    }

    #[test]
    fn nilpotent_operators_admit_weight_filtrations(
        upper in prop::collection::vec(arb_rat(), 6),
        center in -3i64..=3,
    ) {
        // Any strictly upper triangular 4 x 4 matrix is nilpotent and
        // its weight filtration must satisfy every structural axiom.
        let mut m = QMat::zero(4, 4);
        let mut pos = 0usize;
        for i in 0..4 {
            for j in (i + 1)..4 {
                m.set(i, j, upper[pos].clone());
                pos += 1;
            }
        }
        let op = NilpotentOperator::new(m, center).unwrap();
        let filt = weight_filtration(&op);
        let report = check_filtration_properties(&op, &filt);
        prop_assert!(report.ok(), "filtration axioms failed: {:?}", report.failures);
    }
}
