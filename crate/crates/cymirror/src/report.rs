//! Result bundles for the command-line driver: assembling the closed,
//! open, and consistency-check pipelines from a job specification and
//! rendering them as a human table or a machine-stable text block.

use crate::closed_mirror::{closed_pipeline, limiting_period_matrix, ClosedMirrorData};
use crate::constants::{rat_string, FormalConstant, Rat};
use crate::extension::{
    abel_jacobi_limit, domain_wall, extended_monodromy, infinitesimal_invariant,
    open_potential_q, real_quintic_tau, superpotential_decompose, ExtendedMonodromy,
    ExtensionError, SuperpotentialDecomposition,
};
use crate::hodge::{
    check_filtration_properties, extended_candidate_filtration,
    extended_filtration_check, weight_filtration, ExtendedFiltrationReport,
    NilpotentOperator,
};
use crate::jobspec::{JobSpec, OpenSpec, OutputFormat, TauSpec};
use crate::matrix::QMat;
use crate::picard_fuchs::frobenius_mum_basis;
use crate::quantum::{
    closed_curvature_all, closed_curvature_all_from_residuals, curvature,
    curvature_from_residuals, dubrovin_connection, open_wdvv_residual_tensor,
    wdvv_residual_tensor, MPoly, OpenPotential, OpenPotentialSet, PairingMatrix,
    Potential,
};
use crate::series::Series;
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

/// Driver failure, split by exit code: input problems exit 1,
/// mathematical inconsistencies exit 2.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Input(String),
    #[error("inconsistency: {0}")]
    Math(String),
}

fn input_err(e: impl ToString) -> RunError {
    RunError::Input(e.to_string())
}

/// Everything computed for the open section of a spec.
pub struct OpenResults {
    pub r: i64,
    pub psih: Series,
    pub dseries: Series,
    pub decompositions: Vec<SuperpotentialDecomposition>,
    pub domain_wall: Option<SuperpotentialDecomposition>,
    pub aj_limits: Vec<(Rat, FormalConstant)>,
    pub extended: ExtendedMonodromy,
    pub filtration: ExtendedFiltrationReport,
    pub limit_matrix: Vec<Vec<FormalConstant>>,
}

/// Pass/fail summary of the flatness and filtration checks.
pub struct CheckResults {
    pub wdvv_ok: bool,
    pub open_wdvv_ok: Vec<bool>,
    pub curvature_zero: bool,
    pub dual_path_ok: bool,
    pub closed_filtration_ok: bool,
    pub graded_dims: Vec<usize>,
    pub extended_filtration: Option<ExtendedFiltrationReport>,
}

impl CheckResults {
    pub fn all_ok(&self) -> bool {
        self.wdvv_ok
            && self.open_wdvv_ok.iter().all(|b| *b)
            && self.curvature_zero
            && self.dual_path_ok
            && self.closed_filtration_ok
            && self
                .extended_filtration
                .as_ref()
                .map_or(true, |r| r.ok())
    }
}

/// One driver run: the closed pipeline always, plus whatever the
/// subcommand adds on top.
pub struct ResultBundle {
    pub command: &'static str,
    pub order: i64,
    pub closed: ClosedMirrorData,
    pub open: Option<OpenResults>,
    pub check: Option<CheckResults>,
}

fn run_closed(spec: &JobSpec, order: i64) -> Result<ClosedMirrorData, RunError> {
    closed_pipeline(&spec.operator, spec.kappa, spec.a, spec.b, order)
        .map_err(input_err)
}

fn tau_series(spec: &JobSpec, open: &OpenSpec, order: i64) -> Result<Series, RunError> {
    match &open.tau {
        TauSpec::RealQuintic => Ok(real_quintic_tau(order)),
        TauSpec::Inhomogeneity { cover, terms } => {
            let mut rhs = Series::zero(*cover, cover * order);
            for (e, c) in terms {
                rhs.add_term(*e, 0, c.clone());
            }
            spec.operator
                .solve_inhomogeneous(&rhs)
                .map_err(|e| RunError::Math(e.to_string()))
        }
    }
}

fn run_open(
    spec: &JobSpec,
    closed: &ClosedMirrorData,
    order: i64,
) -> Result<OpenResults, RunError> {
    let open = spec
        .open
        .as_ref()
        .ok_or_else(|| RunError::Input("spec has no [open] section".into()))?;
    let basis = frobenius_mum_basis(&spec.operator, order).map_err(input_err)?;
    let tau = tau_series(spec, open, order)?;
    let psih = open_potential_q(&tau, basis.holomorphic(), &closed.mirror.z_q)
        .map_err(|e| RunError::Math(e.to_string()))?;
    let dseries = infinitesimal_invariant(&psih).scale(&Rat::from_integer(2.into()));
    let r = open.r;
    let mut superpotentials = Vec::new();
    for brane in &open.branes {
        let mut w = psih.scale(&brane.psi_coeff);
        w.add_term(0, 2, Rat::new(BigInt::from(brane.lambda), BigInt::from(r * r)));
        w.add_term(0, 1, Rat::new(BigInt::from(brane.s), BigInt::from(r)));
        w.add_term(0, 0, brane.c.clone());
        superpotentials.push(w);
    }
    let mut decompositions = Vec::new();
    for w in &superpotentials {
        let dec = superpotential_decompose(w, r).map_err(|e| match e {
            ExtensionError::NonIntegral(m) => RunError::Math(m),
            other => RunError::Math(other.to_string()),
        })?;
        decompositions.push(dec);
    }
    let wall = if superpotentials.len() >= 2 {
        let t = domain_wall(&superpotentials[0], &superpotentials[1]);
        Some(
            superpotential_decompose(&t, r)
                .map_err(|e| RunError::Math(e.to_string()))?,
        )
    } else {
        None
    };
    let aj_limits: Vec<(Rat, FormalConstant)> =
        decompositions.iter().map(abel_jacobi_limit).collect();
    let charges: Vec<(i64, i64)> =
        open.branes.iter().map(|b| (b.lambda, b.s)).collect();
    let extended = extended_monodromy(&closed.monodromy.n, r, &charges)
        .map_err(|e| RunError::Math(e.to_string()))?;
    let w = extended_candidate_filtration(&extended)
        .map_err(|e| RunError::Math(e.to_string()))?;
    let filtration = extended_filtration_check(&extended, &w);
    let brane_limits: Vec<(Rat, FormalConstant)> = aj_limits.clone();
    let limit_matrix =
        limiting_period_matrix(closed.kappa, closed.a, closed.b, &brane_limits);
    Ok(OpenResults {
        r,
        psih,
        dseries,
        decompositions,
        domain_wall: wall,
        aj_limits,
        extended,
        filtration,
        limit_matrix,
    })
}

fn run_check(
    spec: &JobSpec,
    closed: &ClosedMirrorData,
    open: Option<&OpenResults>,
) -> Result<CheckResults, RunError> {
    let quantum = MPoly::from_series(&closed.f_q).map_err(input_err)?;
    let phi = Potential::rank_one(Rat::from_integer(closed.kappa.into()), quantum)
        .map_err(input_err)?;
    let pairing = PairingMatrix::standard(1);
    let psis = match (open, spec.open.as_ref()) {
        (Some(o), Some(os)) => {
            let mut branes = Vec::new();
            for b in &os.branes {
                let q = MPoly::from_series(&o.psih.scale(&b.psi_coeff))
                    .map_err(input_err)?;
                let lam = Rat::new(BigInt::from(2 * b.lambda), BigInt::from(o.r * o.r));
                branes.push(OpenPotential::rank_one(lam, q).map_err(input_err)?);
            }
            Some(OpenPotentialSet::new(branes))
        }
        _ => None,
    };
    let wdvv_ok = wdvv_residual_tensor(&phi, &pairing).is_empty();
    let open_wdvv_ok = match &psis {
        Some(set) => set
            .branes
            .iter()
            .map(|b| open_wdvv_residual_tensor(&phi, b, &pairing).is_empty())
            .collect(),
        None => Vec::new(),
    };
    let conn = dubrovin_connection(&phi, psis.as_ref(), &pairing).map_err(input_err)?;
    let curv = curvature(&conn);
    // In one parameter the Kahler-pair family is empty, so the closed
    // flatness statement lives on the full-direction family instead.
    let closed_curv = closed_curvature_all(&phi, &pairing);
    let curvature_zero = curv.iter().all(|(_, m)| m.is_zero())
        && closed_curv.iter().all(|(_, m)| m.is_zero());
    let from_res = curvature_from_residuals(&phi, psis.as_ref(), &pairing);
    let closed_from_res = closed_curvature_all_from_residuals(&phi, &pairing);
    let dual_path_ok = curv.len() == from_res.len()
        && curv
            .iter()
            .zip(&from_res)
            .all(|((ij, m), (ij2, m2))| ij == ij2 && m.eq_mat(m2))
        && closed_curv.len() == closed_from_res.len()
        && closed_curv
            .iter()
            .zip(&closed_from_res)
            .all(|((ab, m), (ab2, m2))| ab == ab2 && m.eq_mat(m2));
    let log = NilpotentOperator::new(closed.monodromy.n.clone(), 3)
        .map_err(|e| RunError::Math(e.to_string()))?;
    let filt = weight_filtration(&log);
    let closed_filtration_ok = check_filtration_properties(&log, &filt).ok();
    let graded_dims = filt.graded_dims(0, 6);
    let extended_filtration = open.map(|o| o.filtration.clone());
    Ok(CheckResults {
        wdvv_ok,
        open_wdvv_ok,
        curvature_zero,
        dual_path_ok,
        closed_filtration_ok,
        graded_dims,
        extended_filtration,
    })
}

pub fn cmd_closed(spec: &JobSpec, order: i64) -> Result<ResultBundle, RunError> {
    let closed = run_closed(spec, order)?;
    Ok(ResultBundle { command: "closed", order, closed, open: None, check: None })
}

pub fn cmd_open(spec: &JobSpec, order: i64) -> Result<ResultBundle, RunError> {
    let closed = run_closed(spec, order)?;
    let open = run_open(spec, &closed, order)?;
    Ok(ResultBundle { command: "open", order, closed, open: Some(open), check: None })
}

pub fn cmd_check(spec: &JobSpec, order: i64) -> Result<ResultBundle, RunError> {
    let closed = run_closed(spec, order)?;
    let open = match spec.open {
        Some(_) => Some(run_open(spec, &closed, order)?),
        None => None,
    };
    let check = run_check(spec, &closed, open.as_ref())?;
    Ok(ResultBundle { command: "check", order, closed, open, check: Some(check) })
}

/// Format a formal constant as a compact sum of a rational part and
/// zeta-value parts, using z3 = zeta(3)/(2 pi i)^3 and
/// z2 = zeta(2)/(2 pi i)^2.
pub fn fc_string(c: &FormalConstant) -> String {
    let mut parts = Vec::new();
    if !c.rational.is_zero() {
        parts.push(rat_string(&c.rational));
    }
    if !c.zeta3.is_zero() {
        parts.push(format!("{}*z3", rat_string(&c.zeta3)));
    }
    if !c.zeta2.is_zero() {
        parts.push(format!("{}*z2", rat_string(&c.zeta2)));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+").replace("+-", "-")
    }
}

fn exp_string(var: &str, e: &Rat, log_pow: u8) -> String {
    let mut s = if e.is_zero() {
        "1".to_string()
    } else {
        format!("{}^({})", var, rat_string(e))
    };
    if log_pow > 0 {
        if s == "1" {
            s.clear();
        } else {
            s.push('*');
        }
        s.push_str(&format!("t^{log_pow}"));
    }
    s
}

/// Human-readable series line: nonzero coefficients first, then the
/// monomials they sit at and the truncation order.
fn table_series(name: &str, s: &Series, var: &str) -> String {
    let terms = s.term_list();
    let trunc = rat_string(&s.truncation());
    if terms.is_empty() {
        return format!("{name}: 0 (truncated at {var}^({trunc}))");
    }
    let coeffs: Vec<String> = terms.iter().map(|(_, _, c)| rat_string(c)).collect();
    let places: Vec<String> = terms
        .iter()
        .map(|(e, l, _)| exp_string(var, e, *l))
        .collect();
    format!(
        "{name}: {} (at {}; truncated at {var}^({trunc}))",
        coeffs.join(", "),
        places.join(", ")
    )
}

fn machine_series(name: &str, s: &Series) -> String {
    let terms: Vec<String> = s
        .iter()
        .map(|((e, l), c)| format!("{e}:{l}:{}", rat_string(c)))
        .collect();
    format!(
        "series {name} cover={} trunc={} terms={}",
        s.cover(),
        s.trunc_num(),
        terms.join(";")
    )
}

fn table_qmat(name: &str, m: &QMat) -> String {
    let rows: Vec<String> = m
        .rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(rat_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("{name}: {}", rows.join(" "))
}

fn machine_qmat(name: &str, m: &QMat) -> String {
    let rows: Vec<String> = m
        .rows
        .iter()
        .map(|r| r.iter().map(rat_string).collect::<Vec<_>>().join(","))
        .collect();
    format!("matrix {name} {}", rows.join(";"))
}

fn fc_matrix_lines(name: &str, m: &[Vec<FormalConstant>], machine: bool) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(fc_string).collect();
            if machine {
                cells.join(",")
            } else {
                format!("[{}]", cells.join(", "))
            }
        })
        .collect();
    if machine {
        format!("cmatrix {name} {}", rows.join(";"))
    } else {
        format!("{name}: {}", rows.join(" "))
    }
}

fn rat_list(xs: &[Rat]) -> String {
    xs.iter().map(rat_string).collect::<Vec<_>>().join(", ")
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

impl ResultBundle {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.render_table(),
            OutputFormat::Machine => self.render_machine(),
        }
    }

    fn render_table(&self) -> String {
        let mut out = Vec::new();
        let c = &self.closed;
        out.push(format!(
            "# cymirror {} (order {}, kappa={}, a={}, b={})",
            self.command, self.order, c.kappa, c.a, c.b
        ));
        out.push("# z3 = zeta(3)/(2*pi*i)^3, z2 = zeta(2)/(2*pi*i)^2, t = log(q)/(2*pi*i)".into());
        out.push(table_series("mirror map z(q)", &c.mirror.z_q, "q"));
        out.push(table_series("yukawa", &c.yukawa, "q"));
        out.push(format!("Ntilde_d (d>=1): {}", rat_list(&c.ntilde)));
        out.push(format!("N_d (d>=1): {}", rat_list(&c.instanton)));
        out.push(table_qmat("monodromy M", &c.monodromy.m));
        out.push(table_qmat("monodromy log N", &c.monodromy.n));
        out.push(table_qmat("polarization Q", &c.monodromy.q));
        let limit = self
            .open
            .as_ref()
            .map(|o| &o.limit_matrix)
            .unwrap_or(&c.limit_matrix);
        out.push(fc_matrix_lines("limit matrix", limit, false));
        if let Some(o) = &self.open {
            out.push(format!("open section: r={}", o.r));
            out.push(table_series("psi_h", &o.psih, "q"));
            out.push(table_series("d_invariant", &o.dseries, "q"));
            for (k, d) in o.decompositions.iter().enumerate() {
                out.push(format!(
                    "brane {k}: lambda={} s={} c={}",
                    d.lambda,
                    d.s,
                    fc_string(&d.c)
                ));
                let (sr, cc) = &o.aj_limits[k];
                out.push(format!(
                    "brane {k} aj-limit: ({}, {})",
                    rat_string(sr),
                    fc_string(cc)
                ));
            }
            if let Some(wall) = &o.domain_wall {
                let (sr, cc) = abel_jacobi_limit(wall);
                out.push(format!(
                    "domain wall: lambda={} s={} c={} aj-limit: ({}, {})",
                    wall.lambda,
                    wall.s,
                    fc_string(&wall.c),
                    rat_string(&sr),
                    fc_string(&cc)
                ));
            }
            out.push(table_qmat("extended monodromy log N-hat", &o.extended.nhat));
            out.push(format!(
                "extended filtration: {} (torsion index {})",
                pass(o.filtration.ok()),
                o.filtration
                    .torsion_index
                    .as_ref()
                    .map(|x| x.to_string())
                    .unwrap_or_else(|| "?".into())
            ));
        }
        if let Some(ch) = &self.check {
            out.push(format!("check wdvv: {}", pass(ch.wdvv_ok)));
            for (k, b) in ch.open_wdvv_ok.iter().enumerate() {
                out.push(format!("check open-wdvv brane {k}: {}", pass(*b)));
            }
            out.push(format!("check curvature vanishes: {}", pass(ch.curvature_zero)));
            out.push(format!(
                "check curvature equals residual assembly: {}",
                pass(ch.dual_path_ok)
            ));
            out.push(format!(
                "check weight filtration: {} (graded dims {})",
                pass(ch.closed_filtration_ok),
                ch.graded_dims
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            if let Some(r) = &ch.extended_filtration {
                out.push(format!(
                    "check extended filtration: {} (torsion index {})",
                    pass(r.ok()),
                    r.torsion_index
                        .as_ref()
                        .map(|x| x.to_string())
                        .unwrap_or_else(|| "?".into())
                ));
            }
        }
        out.push(String::new());
        out.join("\n")
    }

    fn render_machine(&self) -> String {
        let mut out = Vec::new();
        let c = &self.closed;
        out.push("schema=cymirror.machine.v1".to_string());
        out.push(format!("command={}", self.command));
        out.push(format!("order={}", self.order));
        out.push(format!("kappa={}", c.kappa));
        out.push(format!("a={}", c.a));
        out.push(format!("b={}", c.b));
        out.push(machine_series("mirror_z_q", &c.mirror.z_q));
        out.push(machine_series("mirror_t_z", &c.mirror.t_z));
        out.push(machine_series("yukawa", &c.yukawa));
        out.push(machine_series("prepotential_quantum", &c.f_q));
        out.push(format!(
            "vec ntilde {}",
            c.ntilde.iter().map(rat_string).collect::<Vec<_>>().join(";")
        ));
        out.push(format!(
            "vec instanton {}",
            c.instanton.iter().map(rat_string).collect::<Vec<_>>().join(";")
        ));
        out.push(machine_qmat("monodromy_m", &c.monodromy.m));
        out.push(machine_qmat("monodromy_n", &c.monodromy.n));
        out.push(machine_qmat("polarization_q", &c.monodromy.q));
        let limit = self
            .open
            .as_ref()
            .map(|o| &o.limit_matrix)
            .unwrap_or(&c.limit_matrix);
        out.push(fc_matrix_lines("limit_matrix", limit, true));
        if let Some(o) = &self.open {
            out.push(format!("open_r={}", o.r));
            out.push(machine_series("psi_h", &o.psih));
            out.push(machine_series("d_invariant", &o.dseries));
            for (k, d) in o.decompositions.iter().enumerate() {
                out.push(format!(
                    "brane {k} lambda={} s={} c={}",
                    d.lambda,
                    d.s,
                    fc_string(&d.c)
                ));
                let (sr, cc) = &o.aj_limits[k];
                out.push(format!(
                    "aj {k} {} {}",
                    rat_string(sr),
                    fc_string(cc)
                ));
            }
            if let Some(wall) = &o.domain_wall {
                let (sr, cc) = abel_jacobi_limit(wall);
                out.push(format!(
                    "domain_wall lambda={} s={} c={} aj={} {}",
                    wall.lambda,
                    wall.s,
                    fc_string(&wall.c),
                    rat_string(&sr),
                    fc_string(&cc)
                ));
            }
            out.push(machine_qmat("nhat", &o.extended.nhat));
            out.push(format!(
                "extended_filtration ok={} torsion={}",
                o.filtration.ok(),
                o.filtration
                    .torsion_index
                    .as_ref()
                    .map(|x| x.to_string())
                    .unwrap_or_else(|| "?".into())
            ));
        }
        if let Some(ch) = &self.check {
            out.push(format!("check wdvv={}", ch.wdvv_ok));
            for (k, b) in ch.open_wdvv_ok.iter().enumerate() {
                out.push(format!("check open_wdvv.{k}={b}"));
            }
            out.push(format!("check curvature_zero={}", ch.curvature_zero));
            out.push(format!("check dual_path={}", ch.dual_path_ok));
            out.push(format!(
                "check filtration={} graded={}",
                ch.closed_filtration_ok,
                ch.graded_dims
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            if let Some(r) = &ch.extended_filtration {
                out.push(format!(
                    "check extended_filtration={} torsion={}",
                    r.ok(),
                    r.torsion_index
                        .as_ref()
                        .map(|x| x.to_string())
                        .unwrap_or_else(|| "?".into())
                ));
            }
        }
        out.push(String::new());
        out.join("\n")
    }
}
