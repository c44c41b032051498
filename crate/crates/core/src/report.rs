//! Report document shared by every CLI subcommand, with JSON and text
//! renderings.
//!
//! Every section is built from a model plus explicit settings, and all
//! sampling goes through a seeded generator, so a report is a pure function
//! of its inputs.

use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::classify::{Evidence, NatureReport};
use crate::continuation::{Continuation, ContinuationConfig, ContinuationError};
use crate::curve::{BranchPoint, BranchPoints, CurveAnalytics, CurveError, Periods, UniformizationData};
use crate::group::{GroupReport, GroupVerdict};
use crate::kernel::{
    build_kernel, degeneracy_test, discriminant, genus_classify, Axis, DegeneracyCase, DegeneracyReport, GenusReport,
    KernelError, QuarticDiscriminant,
};
use crate::model::WeightedModel;
use crate::par::{map_slice, Execution};
use crate::poly::RatPoly;
use crate::series::{check_functional_equation_with, count_walks_with, fmt_fraction, tail_bound};
use crate::Rational;

/// Bumped on any breaking change of the JSON layout.
pub const REPORT_VERSION: u32 = 1;

pub fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_fraction(q))
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Settings that influence the report's content.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ConfigSnapshot {
    pub seed: u64,
    pub precision_bits: u32,
    pub max_denominator: u64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check_feq: Option<usize>,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightEntry {
    pub i: i8,
    pub j: i8,
    pub weight: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelEcho {
    pub weights: Vec<WeightEntry>,
    pub t: String,
    pub support_size: usize,
}

impl ModelEcho {
    pub fn new(model: &WeightedModel) -> Self {
        Self {
            weights: model
                .weights()
                .map(|(s, w)| WeightEntry {
                    i: s.i,
                    j: s.j,
                    weight: fmt_fraction(w),
                })
                .collect(),
            t: fmt_fraction(model.t()),
            support_size: model.step_set().len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalEquationCheck {
    /// Compared modulo `t^(order + 1)`.
    pub order: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesSection {
    pub max_steps: usize,
    pub entries: Vec<SeriesEntry>,
    /// Total weight `sum_{i,j} q_{i,j,k}` of each layer.
    pub layer_masses: Vec<String>,
    /// Bound `t^(K+1)/(1-t)` on the truncation error of `Q` on the closed bidisk.
    pub tail_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional_equation: Option<FunctionalEquationCheck>,
}

impl SeriesSection {
    pub fn new(model: &WeightedModel, max_steps: usize, check_feq: Option<usize>, exec: Execution) -> Self {
        let depth = max_steps.max(check_feq.unwrap_or(0));
        let table = count_walks_with(model, depth, exec);
        let shown = count_walks_with(model, max_steps, exec);
        let entries = shown
            .nonzero_entries()
            .map(|(i, j, k, v)| SeriesEntry {
                i,
                j,
                k,
                value: fmt_fraction(v),
            })
            .collect();
        Self {
            max_steps,
            entries,
            layer_masses: (0..=max_steps).map(|k| fmt_fraction(&shown.layer_mass(k))).collect(),
            tail_bound: tail_bound(model.t_f64(), max_steps),
            functional_equation: check_feq.map(|order| FunctionalEquationCheck {
                order,
                holds: check_functional_equation_with(model, &table, order),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscriminantSection {
    pub axis: Axis,
    /// `alpha_0 .. alpha_4` as polynomials in `t`.
    pub coefficients_in_t: Vec<String>,
    /// `alpha_0 .. alpha_4` at the model's `t`.
    pub values: Vec<String>,
}

impl DiscriminantSection {
    fn new(d: &QuarticDiscriminant) -> Self {
        Self {
            axis: d.axis,
            coefficients_in_t: d.coeffs_t.iter().map(|p| fmt_poly(p, "t")).collect(),
            values: d.values.iter().map(fmt_fraction).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSection {
    pub kernel: String,
    pub degree_x: Option<usize>,
    pub degree_y: Option<usize>,
    pub delta1: Option<DiscriminantSection>,
    pub delta2: Option<DiscriminantSection>,
    pub degeneracy: DegeneracyReport,
    pub genus: GenusReport,
}

impl KernelSection {
    pub fn new(model: &WeightedModel) -> Self {
        let kernel = build_kernel(model);
        let disc = |axis| -> Option<DiscriminantSection> {
            discriminant(&kernel, axis).ok().map(|d| DiscriminantSection::new(&d))
        };
        Self {
            kernel: kernel.to_string(),
            degree_x: kernel.degree_x(),
            degree_y: kernel.degree_y(),
            delta1: disc(Axis::X),
            delta2: disc(Axis::Y),
            degeneracy: degeneracy_test(model),
            genus: genus_classify(model.step_set()),
        }
    }
}

/// Max-over-samples residuals of the uniformization.
#[derive(Debug, Clone, Serialize)]
pub struct UniformizationResiduals {
    pub samples: usize,
    /// Normalized `|K(x(w), y(w))|`.
    pub kernel: f64,
    /// `d(iota1(Lambda(w)), Lambda(-w))`.
    pub iota1_lift: f64,
    /// `d(iota2(Lambda(w)), Lambda(w3 - w))`.
    pub iota2_lift: f64,
    /// `d(sigma(Lambda(w)), Lambda(w + w3))`.
    pub sigma_lift: f64,
}

impl UniformizationResiduals {
    pub fn new(curve: &CurveAnalytics, samples: usize, seed: u64, exec: Execution) -> Result<Self, CurveError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let omegas: Vec<Complex64> = (0..samples).map(|_| curve.sample_omega(&mut rng)).collect();
        let rows = map_slice(exec, &omegas, |&w| -> Result<[f64; 4], CurveError> {
            let p = curve.point(w);
            Ok([
                curve.residual(&p),
                curve.involution1(&p)?.distance(&curve.point(curve.lift_iota1(w))),
                curve.involution2(&p)?.distance(&curve.point(curve.lift_iota2(w))),
                curve.sigma(&p)?.distance(&curve.point(curve.lift_sigma(w))),
            ])
        });
        let mut max = [0.0f64; 4];
        for row in rows {
            for (m, v) in max.iter_mut().zip(row?) {
                *m = m.max(v);
            }
        }
        Ok(Self {
            samples,
            kernel: max[0],
            iota1_lift: max[1],
            iota2_lift: max[2],
            sigma_lift: max[3],
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeSection {
    pub g2: Complex64,
    pub g3: Complex64,
    pub tau: Complex64,
    pub nome_modulus: f64,
    /// Relative mismatch between the nome-series invariants and those of the
    /// discriminant expansion.
    pub invariant_mismatch: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSection {
    pub branch_points: BranchPoints,
    pub periods: Periods,
    pub ratio: f64,
    /// Arc of `P^1(R)` integrated for `omega2`.
    pub omega2_contour: String,
    pub omega3_contour: String,
    pub lattice: LatticeSection,
    pub uniformization: UniformizationData,
    pub residuals: UniformizationResiduals,
}

fn fmt_branch(b: &BranchPoint) -> String {
    match b.value {
        Some(v) => format!("{v:.15}"),
        None => "[1:0]".into(),
    }
}

impl CurveSection {
    pub fn new(curve: &CurveAnalytics, samples: usize, seed: u64, exec: Execution) -> Result<Self, CurveError> {
        let a = &curve.branch.a;
        let through_infinity = match (a[3].value, a[0].value) {
            (Some(a4), Some(a1)) => a1 < a4,
            _ => true,
        };
        let omega2_contour = format!(
            "arc of P^1(R) from a4 = {} to a1 = {}{}",
            fmt_branch(&a[3]),
            fmt_branch(&a[0]),
            if through_infinity { " through [1:0]" } else { "" }
        );
        let omega3_contour = match curve.periods.omega3_endpoint {
            Some(x) => format!("arc of P^1(R) from a4 = {} to X(b4) = {x:.15}", fmt_branch(&a[3])),
            None => format!("arc of P^1(R) from a4 = {} to X(b4) = [1:0]", fmt_branch(&a[3])),
        };
        let lattice = &curve.lattice;
        Ok(Self {
            branch_points: curve.branch.clone(),
            periods: curve.periods.clone(),
            ratio: curve.periods.ratio(),
            omega2_contour,
            omega3_contour,
            lattice: LatticeSection {
                g2: lattice.g2(),
                g3: lattice.g3(),
                tau: lattice.tau(),
                nome_modulus: lattice.nome().norm(),
                invariant_mismatch: curve.invariant_mismatch,
            },
            uniformization: curve.uniformization,
            residuals: UniformizationResiduals::new(curve, samples, seed, exec)?,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationSample {
    pub omega: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub rx: Complex64,
    pub ry: Complex64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationSection {
    pub truncation: usize,
    pub tail_bound: f64,
    pub seed: u64,
    /// Seeded points of the overlap `B_x n B_y`.
    pub samples: Vec<ContinuationSample>,
    /// Max `|r_x + r_y - K(0,0)Q(0,0) + x y|`.
    pub identity_residual: f64,
    /// Max `|r_x(w + w1) - r_x(w)|`.
    pub omega1_periodicity: f64,
    /// Max `|r_x(w + w3) - r_x(w) - b_x(w)|`.
    pub telescoping: f64,
}

impl ContinuationSection {
    pub fn new(
        curve: &CurveAnalytics,
        config: ContinuationConfig,
        samples: usize,
        seed: u64,
        exec: Execution,
    ) -> Result<Self, ContinuationError> {
        let c = Continuation::new(curve, config)?;
        let points = c.sample_overlap(samples, seed);
        let rows = map_slice(
            exec,
            &points,
            |&w| -> Result<(ContinuationSample, [f64; 3]), ContinuationError> {
                let rx = c.continue_rx(w)?;
                let ry = c.continue_ry(w)?;
                let sample = ContinuationSample {
                    omega: w,
                    x: c.x(w)?,
                    y: c.y(w)?,
                    rx,
                    ry,
                };
                let identity = c.identity_check(w)?;
                let period = (c.continue_rx(w + curve.omega1())? - rx).norm();
                let tele = (c.continue_rx(w + curve.omega3())? - rx - c.bx(w)?).norm();
                Ok((sample, [identity, period, tele]))
            },
        );
        let mut out = Vec::with_capacity(points.len());
        let mut max = [0.0f64; 3];
        for row in rows {
            let (sample, r) = row?;
            for (m, v) in max.iter_mut().zip(r) {
                *m = m.max(v);
            }
            out.push(sample);
        }
        Ok(Self {
            truncation: c.config().truncation,
            tail_bound: c.tail_bound(),
            seed,
            samples: out,
            identity_residual: max[0],
            omega1_periodicity: max[1],
            telescoping: max[2],
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub report_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    pub config: ConfigSnapshot,
    pub model: ModelEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub continuation: Option<ContinuationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<NatureReport>,
    /// Stages skipped and why.
    pub notes: Vec<String>,
}

impl ReportDocument {
    pub fn new(command: &str, config: ConfigSnapshot, model: &WeightedModel) -> Self {
        Self {
            report_version: REPORT_VERSION,
            tool: ToolInfo::default(),
            command: command.to_string(),
            config,
            model: ModelEcho::new(model),
            series: None,
            kernel: None,
            curve: None,
            group: None,
            continuation: None,
            classification: None,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering; sections appear in pipeline order and the
    /// classification verdict, when present, is the last line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let o = &mut out;
        line(
            o,
            format!("{} {} ({})", self.tool.name, self.tool.version, self.command),
        );
        line(o, format!("seed: {}", self.config.seed));
        let weights: Vec<String> = self
            .model
            .weights
            .iter()
            .map(|w| format!("d({},{}) = {}", w.i, w.j, w.weight))
            .collect();
        line(o, format!("model: {}; t = {}", weights.join(", "), self.model.t));
        for n in &self.notes {
            line(o, format!("note: {n}"));
        }
        if let Some(s) = &self.series {
            text_series(o, s);
        }
        if let Some(k) = &self.kernel {
            text_kernel(o, k);
        }
        if let Some(c) = &self.curve {
            text_curve(o, c);
        }
        if let Some(g) = &self.group {
            text_group(o, g);
        }
        if let Some(c) = &self.continuation {
            text_continuation(o, c);
        }
        if let Some(n) = &self.classification {
            text_classification(o, n);
        }
        out
    }
}

fn line(out: &mut String, s: String) {
    out.push_str(&s);
    out.push('\n');
}

fn header(out: &mut String, name: &str) {
    line(out, String::new());
    line(out, format!("[{name}]"));
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.12}", z.re)
    } else {
        format!(
            "{:.12} {} {:.12}i",
            z.re,
            if z.im < 0.0 { '-' } else { '+' },
            z.im.abs()
        )
    }
}

fn text_series(o: &mut String, s: &SeriesSection) {
    header(o, "series");
    line(o, format!("max steps: {}", s.max_steps));
    for e in &s.entries {
        line(o, format!("q {} {} {} = {}", e.i, e.j, e.k, e.value));
    }
    line(o, format!("layer masses: {}", s.layer_masses.join(", ")));
    line(o, format!("truncation tail bound: {:.3e}", s.tail_bound));
    if let Some(f) = &s.functional_equation {
        line(
            o,
            format!(
                "functional equation mod t^{}: {}",
                f.order + 1,
                if f.holds { "holds" } else { "FAILS" }
            ),
        );
    }
}

fn fmt_case(c: DegeneracyCase) -> String {
    match c {
        DegeneracyCase::EmptyColumn { i } => format!("column i = {i} empty"),
        DegeneracyCase::EmptyRow { j } => format!("row j = {j} empty"),
        DegeneracyCase::Diagonal => "support on the diagonal".into(),
        DegeneracyCase::AntiDiagonal => "support on the anti-diagonal".into(),
        DegeneracyCase::None => "none".into(),
    }
}

fn fmt_genus(g: &GenusReport) -> String {
    use crate::kernel::HalfPlaneClass as H;
    let class = match g.class {
        H::Elliptic => "genus one (no half-plane contains the steps)",
        H::Genus0Family1 => "genus zero, family 1 (steps in i + j >= 0)",
        H::Genus0Family2 => "genus zero, family 2 (steps in j >= i)",
        H::Genus0Family3 => "genus zero, family 3 (steps in i + j <= 0)",
        H::Genus0Family4 => "genus zero, family 4 (steps in j <= i)",
        H::DegenerateHalfPlane => "steps in an axis half-plane",
    };
    class.to_string()
}

fn text_kernel(o: &mut String, k: &KernelSection) {
    header(o, "kernel");
    line(o, format!("K(x,y) = {}", k.kernel));
    let deg = |d: Option<usize>| d.map_or("-inf".to_string(), |d| d.to_string());
    line(
        o,
        format!("degrees: {} in x, {} in y", deg(k.degree_x), deg(k.degree_y)),
    );
    for (name, d) in [("Delta1", &k.delta1), ("Delta2", &k.delta2)] {
        match d {
            Some(d) => {
                for (n, (p, v)) in d.coefficients_in_t.iter().zip(&d.values).enumerate() {
                    line(o, format!("{name} alpha{n} = {p} = {v}"));
                }
            }
            None => line(o, format!("{name}: kernel not quadratic in the eliminated variable")),
        }
    }
    line(
        o,
        format!(
            "degenerate: {} ({})",
            if k.degeneracy.degenerate { "yes" } else { "no" },
            fmt_case(k.degeneracy.matched_case)
        ),
    );
    line(o, format!("genus: {}", fmt_genus(&k.genus)));
}

fn text_curve(o: &mut String, c: &CurveSection) {
    header(o, "curve");
    for (name, pts) in [("a", &c.branch_points.a), ("b", &c.branch_points.b)] {
        for (n, p) in pts.iter().enumerate() {
            line(
                o,
                format!("{name}{} = {} (+/- {:.1e})", n + 1, fmt_branch(p), p.error_radius),
            );
        }
    }
    let p = &c.periods;
    line(o, format!("omega1 = {} (+/- {:.1e})", fmt_c(p.omega1), p.errors[0]));
    line(o, format!("omega2 = {:.12} (+/- {:.1e})", p.omega2, p.errors[1]));
    line(o, format!("omega3 = {:.12} (+/- {:.1e})", p.omega3, p.errors[2]));
    line(o, format!("omega3/omega2 = {:.12}", c.ratio));
    line(o, format!("omega2 contour: {}", c.omega2_contour));
    line(o, format!("omega3 contour: {}", c.omega3_contour));
    line(o, format!("g2 = {}", fmt_c(c.lattice.g2)));
    line(o, format!("g3 = {}", fmt_c(c.lattice.g3)));
    line(o, format!("tau = {}", fmt_c(c.lattice.tau)));
    line(o, format!("nome modulus = {:.6e}", c.lattice.nome_modulus));
    line(o, format!("invariant mismatch = {:.3e}", c.lattice.invariant_mismatch));
    let r = &c.residuals;
    line(
        o,
        format!("max kernel residual over {} samples = {:.3e}", r.samples, r.kernel),
    );
    line(o, format!("max iota1 lift residual = {:.3e}", r.iota1_lift));
    line(o, format!("max iota2 lift residual = {:.3e}", r.iota2_lift));
    line(o, format!("max sigma lift residual = {:.3e}", r.sigma_lift));
}

fn text_group(o: &mut String, g: &GroupReport) {
    header(o, "group");
    line(o, format!("omega3/omega2 = {:.12}", g.ratio));
    match g.verdict {
        GroupVerdict::Finite {
            k,
            ell,
            order_sigma,
            order_group,
        } => {
            line(o, format!("ratio = {k}/{ell} (residual {:.3e})", g.residual));
            line(
                o,
                format!("finite: order of sigma {order_sigma}, group order {order_group}"),
            );
        }
        GroupVerdict::InfinitePresumed { bound_checked } => {
            line(o, format!("presumed infinite: no ratio k/l with l <= {bound_checked}"));
        }
    }
    if let Some(c) = &g.order_check {
        line(
            o,
            format!(
                "order check l = {}: lattice residual {:.3e}, orbit residual {:.3e}",
                c.ell, c.lattice_residual, c.orbit_residual
            ),
        );
    }
    let returns: Vec<String> = g
        .orbit_returns
        .iter()
        .map(|r| r.map_or("none".to_string(), |n| n.to_string()))
        .collect();
    line(o, format!("orbit first returns: {}", returns.join(", ")));
    line(
        o,
        format!("max denominator: {}, tolerance {:.1e}", g.max_denominator, g.tolerance),
    );
    line(o, format!("caveat: {}", g.caveat));
}

fn text_continuation(o: &mut String, c: &ContinuationSection) {
    header(o, "continuation");
    line(
        o,
        format!("truncation N = {} (tail bound {:.3e})", c.truncation, c.tail_bound),
    );
    for s in &c.samples {
        line(
            o,
            format!(
                "w = {}: x = {}, y = {}, r_x = {}, r_y = {}",
                fmt_c(s.omega),
                fmt_c(s.x),
                fmt_c(s.y),
                fmt_c(s.rx),
                fmt_c(s.ry)
            ),
        );
    }
    line(
        o,
        format!(
            "max identity residual over {} samples = {:.3e}",
            c.samples.len(),
            c.identity_residual
        ),
    );
    line(
        o,
        format!("max omega1-periodicity residual = {:.3e}", c.omega1_periodicity),
    );
    line(o, format!("max telescoping residual = {:.3e}", c.telescoping));
}

fn text_classification(o: &mut String, n: &NatureReport) {
    header(o, "classification");
    for e in &n.evidence {
        match e {
            Evidence::Degeneracy(d) => line(
                o,
                format!(
                    "degeneracy: {} ({})",
                    if d.degenerate { "degenerate" } else { "not degenerate" },
                    fmt_case(d.matched_case)
                ),
            ),
            Evidence::Genus(g) => line(o, format!("genus: {}", fmt_genus(g))),
            Evidence::Group(g) => line(
                o,
                format!(
                    "group: {}",
                    match g.verdict {
                        GroupVerdict::Finite { order_group, .. } => format!("finite, order {order_group}"),
                        GroupVerdict::InfinitePresumed { bound_checked } =>
                            format!("presumed infinite (denominators up to {bound_checked})"),
                    }
                ),
            ),
        }
    }
    if let Some(cf) = &n.closed_form {
        line(o, format!("closed form: Q = {}", cf.expression));
    }
    for c in &n.caveats {
        line(o, format!("caveat: {c}"));
    }
    line(o, format!("note: {}", n.per_variable_note));
    line(o, n.verdict_line());
}

/// `c_0 + c_1 v + ...` with exact rational coefficients.
pub fn fmt_poly(p: &RatPoly, var: &str) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (e, c) in p.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        let coeff = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("({}/{})", a.numer(), a.denom())
        };
        match e {
            0 => out.push_str(&coeff),
            _ => {
                if !a.is_one() {
                    let _ = write!(out, "{coeff} ");
                }
                out.push_str(var);
                if e > 1 {
                    let _ = write!(out, "^{e}");
                }
            }
        }
    }
    out
}

/// Errors from building a report, sorted into input and numeric failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StageError {
    #[error("kernel: {0}")]
    Kernel(#[from] KernelError),
    #[error("curve: {0}")]
    Curve(#[from] CurveError),
    #[error("group: {0}")]
    Group(#[from] crate::group::GroupError),
    #[error("continuation: {0}")]
    Continuation(#[from] ContinuationError),
    #[error("classify: {0}")]
    Classify(#[from] crate::classify::ClassifyError),
}

impl StageError {
    /// True when the failure is an unmet precondition of the model itself
    /// (degenerate or genus-zero kernel) rather than a numeric breakdown.
    pub fn is_precondition(&self) -> bool {
        use crate::classify::ClassifyError;
        use crate::group::GroupError;
        let curve = match self {
            Self::Kernel(_) => return true,
            Self::Curve(c) => c,
            Self::Group(GroupError::Curve(c)) => c,
            Self::Classify(ClassifyError::Group(GroupError::Curve(c))) => c,
            _ => return false,
        };
        matches!(
            curve,
            CurveError::Degenerate | CurveError::NotElliptic { .. } | CurveError::Kernel(_)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_formatting() {
        let p = RatPoly::new(vec![
            Rational::one(),
            Rational::zero(),
            -Rational::new(1.into(), 4.into()),
            -Rational::one(),
        ]);
        assert_eq!(fmt_poly(&p, "t"), "1 - (1/4) t^2 - t^3");
        assert_eq!(fmt_poly(&RatPoly::zero(), "t"), "0");
        assert_eq!(fmt_poly(&RatPoly::from_i64(&[0, -2]), "t"), "-2 t");
    }
}
