//! Walk models: nine exact weights `d_{i,j}` on `{-1,0,1}^2` and a rational
//! evaluation point `t` in `(0,1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rational;

/// A small step `(i, j)` with `i, j` in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub i: i8,
    pub j: i8,
}

impl Step {
    pub const fn new(i: i8, j: i8) -> Self {
        Step { i, j }
    }

    pub fn is_small(self) -> bool {
        (-1..=1).contains(&self.i) && (-1..=1).contains(&self.j)
    }

    /// Position in the canonical ordering of [`ALL_STEPS`].
    pub fn index(self) -> usize {
        ((self.i + 1) * 3 + (self.j + 1)) as usize
    }

    pub fn transpose(self) -> Self {
        Step::new(self.j, self.i)
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// All nine small steps, ordered by `(i, j)`.
pub const ALL_STEPS: [Step; 9] = [
    Step::new(-1, -1),
    Step::new(-1, 0),
    Step::new(-1, 1),
    Step::new(0, -1),
    Step::new(0, 0),
    Step::new(0, 1),
    Step::new(1, -1),
    Step::new(1, 0),
    Step::new(1, 1),
];

/// The eight nonzero small steps.
pub fn nonzero_steps() -> impl Iterator<Item = Step> {
    ALL_STEPS.into_iter().filter(|s| *s != Step::new(0, 0))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: negative weight {value} for step {step}")]
    NegativeWeight { line: usize, step: Step, value: String },
    #[error("line {line}: weight out of range: {value} for step {step} exceeds 1")]
    WeightOutOfRange { line: usize, step: Step, value: String },
    #[error("line {line}: duplicate weight for step {step}")]
    DuplicateStep { line: usize, step: Step },
    #[error("line {line}: duplicate t line")]
    DuplicateT { line: usize },
    #[error("missing `t = ...` line")]
    MissingT,
    #[error("t = {0} is outside the open interval (0,1)")]
    TOutOfRange(String),
    #[error("weights sum to {0}, expected exactly 1 (use normalisation for unnormalised weights)")]
    NotNormalized(String),
    #[error("total weight is zero")]
    ZeroMass,
    #[error("step {0} is not a small step")]
    NotSmallStep(Step),
}

/// Support of a model: the steps with nonzero weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StepSet {
    mask: u16,
}

impl StepSet {
    pub fn empty() -> Self {
        StepSet { mask: 0 }
    }

    pub fn from_steps<I: IntoIterator<Item = Step>>(steps: I) -> Self {
        let mut s = Self::empty();
        for step in steps {
            s.insert(step);
        }
        s
    }

    /// Builds from a 9-bit mask indexed by [`Step::index`].
    pub fn from_mask(mask: u16) -> Self {
        StepSet { mask: mask & 0x1ff }
    }

    pub fn mask(self) -> u16 {
        self.mask
    }

    pub fn insert(&mut self, step: Step) {
        assert!(step.is_small(), "step {step} outside {{-1,0,1}}^2");
        self.mask |= 1 << step.index();
    }

    pub fn contains(self, step: Step) -> bool {
        step.is_small() && self.mask & (1 << step.index()) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Step> {
        ALL_STEPS.into_iter().filter(move |s| self.contains(*s))
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    /// Same set without the zero step.
    pub fn without_origin(self) -> Self {
        StepSet {
            mask: self.mask & !(1 << Step::new(0, 0).index()),
        }
    }

    /// Applies a map on steps (used for the symmetries of the square).
    pub fn map(self, f: impl Fn(Step) -> Step) -> Self {
        Self::from_steps(self.iter().map(f))
    }
}

impl fmt::Display for StepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, s) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// A validated walk model. Weights are nonnegative, at most 1, and sum to
/// exactly 1; `0 < t < 1`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedModel {
    weights: [Rational; 9],
    t: Rational,
}

impl WeightedModel {
    /// Builds a model from explicit weights (missing steps weigh 0).
    pub fn new<I>(weights: I, t: Rational) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (Step, Rational)>,
    {
        let mut w: [Rational; 9] = Default::default();
        for (step, value) in weights {
            if !step.is_small() {
                return Err(ModelError::NotSmallStep(step));
            }
            check_weight(0, step, &value)?;
            w[step.index()] = value;
        }
        let sum: Rational = w.iter().sum();
        if sum != Rational::one() {
            return Err(ModelError::NotNormalized(sum.to_string()));
        }
        check_t(&t)?;
        Ok(WeightedModel { weights: w, t })
    }

    /// Equal weights on the given support.
    pub fn uniform(steps: StepSet, t: Rational) -> Result<Self, ModelError> {
        if steps.is_empty() {
            return Err(ModelError::ZeroMass);
        }
        let w = Rational::new(BigInt::one(), BigInt::from(steps.len()));
        Self::new(steps.iter().map(|s| (s, w.clone())), t)
    }

    pub fn weight(&self, i: i8, j: i8) -> &Rational {
        &self.weights[Step::new(i, j).index()]
    }

    pub fn weight_of(&self, step: Step) -> &Rational {
        &self.weights[step.index()]
    }

    pub fn weight_f64(&self, i: i8, j: i8) -> f64 {
        crate::poly::rat_to_f64(self.weight(i, j))
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn t_f64(&self) -> f64 {
        crate::poly::rat_to_f64(&self.t)
    }

    /// Same weights at a different `t`.
    pub fn with_t(&self, t: Rational) -> Result<Self, ModelError> {
        check_t(&t)?;
        Ok(WeightedModel {
            weights: self.weights.clone(),
            t,
        })
    }

    /// Exact support of the weight map.
    pub fn step_set(&self) -> StepSet {
        StepSet::from_steps(ALL_STEPS.into_iter().filter(|s| !self.weight_of(*s).is_zero()))
    }

    /// Nonzero weights in canonical step order.
    pub fn weights(&self) -> impl Iterator<Item = (Step, &Rational)> {
        ALL_STEPS
            .into_iter()
            .map(|s| (s, self.weight_of(s)))
            .filter(|(_, w)| !w.is_zero())
    }

    /// Reflection `(i,j) -> (j,i)`, exchanging the roles of `x` and `y`.
    pub fn transpose(&self) -> Self {
        let mut w: [Rational; 9] = Default::default();
        for s in ALL_STEPS {
            w[s.transpose().index()] = self.weight_of(s).clone();
        }
        WeightedModel {
            weights: w,
            t: self.t.clone(),
        }
    }

    /// Serialises into the line-oriented model file format.
    pub fn to_model_file(&self) -> String {
        let mut out = String::new();
        for (s, w) in self.weights() {
            out.push_str(&format!("d {} {} = {}\n", s.i, s.j, w));
        }
        out.push_str(&format!("t = {}\n", self.t));
        out
    }
}

impl FromStr for WeightedModel {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_model(s)
    }
}

fn check_weight(line: usize, step: Step, value: &Rational) -> Result<(), ModelError> {
    if value.is_negative() {
        return Err(ModelError::NegativeWeight {
            line,
            step,
            value: value.to_string(),
        });
    }
    if *value > Rational::one() {
        return Err(ModelError::WeightOutOfRange {
            line,
            step,
            value: value.to_string(),
        });
    }
    Ok(())
}

fn check_t(t: &Rational) -> Result<(), ModelError> {
    if !t.is_positive() || *t >= Rational::one() {
        return Err(ModelError::TOutOfRange(t.to_string()));
    }
    Ok(())
}

/// Rescales raw nonnegative weights of total mass `sigma` to probabilities
/// and `t` to `t * sigma`, so that the generating series is unchanged.
/// Returns the model and `sigma`.
pub fn normalize<I>(raw_weights: I, t_raw: &Rational) -> Result<(WeightedModel, Rational), ModelError>
where
    I: IntoIterator<Item = (Step, Rational)>,
{
    let raw: Vec<(Step, Rational)> = raw_weights.into_iter().collect();
    for (s, w) in &raw {
        if !s.is_small() {
            return Err(ModelError::NotSmallStep(*s));
        }
        if w.is_negative() {
            return Err(ModelError::NegativeWeight {
                line: 0,
                step: *s,
                value: w.to_string(),
            });
        }
    }
    let sigma: Rational = raw.iter().map(|(_, w)| w).sum();
    if sigma.is_zero() {
        return Err(ModelError::ZeroMass);
    }
    let t = t_raw * &sigma;
    check_t(&t)?;
    let model = WeightedModel::new(raw.into_iter().map(|(s, w)| (s, w / &sigma)), t)?;
    Ok((model, sigma))
}

struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let mut toks = Vec::new();
    let mut start: Option<usize> = None;
    for (pos, ch) in line.char_indices() {
        if ch.is_whitespace() || ch == '=' {
            if let Some(s) = start.take() {
                toks.push(Tok {
                    text: &line[s..pos],
                    column: s + 1,
                });
            }
            if ch == '=' {
                toks.push(Tok {
                    text: &line[pos..pos + 1],
                    column: pos + 1,
                });
            }
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    if let Some(s) = start {
        toks.push(Tok {
            text: &line[s..],
            column: s + 1,
        });
    }
    toks
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ModelError {
    ModelError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses `p/q` or an integer (optionally signed).
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let valid = |s: &str, signed: bool| {
        let digits = if signed {
            s.strip_prefix(['-', '+']).unwrap_or(s)
        } else {
            s
        };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(n, true) || !valid(d, false) {
        return None;
    }
    let n: BigInt = n.trim_start_matches('+').parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

fn parse_coord(tok: &Tok<'_>, line: usize) -> Result<i8, ModelError> {
    match tok.text {
        "-1" => Ok(-1),
        "0" | "+0" | "-0" => Ok(0),
        "1" | "+1" => Ok(1),
        other => Err(syntax(
            line,
            tok.column,
            format!("step coordinate must be -1, 0 or 1, found `{other}`"),
        )),
    }
}

/// Parses a model file. Comment lines start with `#`; weight lines are
/// `d <i> <j> = <rational>`; exactly one `t = <rational>` line is required.
pub fn parse_model(text: &str) -> Result<WeightedModel, ModelError> {
    let mut weights: BTreeMap<Step, Rational> = BTreeMap::new();
    let mut t: Option<Rational> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokenize(raw);
        let end_col = raw.chars().count() + 1;
        match toks[0].text {
            "d" => {
                if toks.len() < 5 {
                    return Err(syntax(line, end_col, "expected `d <i> <j> = <weight>`"));
                }
                let i = parse_coord(&toks[1], line)?;
                let j = parse_coord(&toks[2], line)?;
                if toks[3].text != "=" {
                    return Err(syntax(line, toks[3].column, "expected `=`"));
                }
                if toks.len() > 5 {
                    return Err(syntax(line, toks[5].column, "unexpected trailing token"));
                }
                let value = parse_rational(toks[4].text)
                    .ok_or_else(|| syntax(line, toks[4].column, format!("invalid rational `{}`", toks[4].text)))?;
                let step = Step::new(i, j);
                check_weight(line, step, &value)?;
                if weights.insert(step, value).is_some() {
                    return Err(ModelError::DuplicateStep { line, step });
                }
            }
            "t" => {
                if toks.len() < 3 || toks[1].text != "=" {
                    return Err(syntax(
                        line,
                        toks.get(1).map_or(end_col, |t| t.column),
                        "expected `t = <value>`",
                    ));
                }
                if toks.len() > 3 {
                    return Err(syntax(line, toks[3].column, "unexpected trailing token"));
                }
                let value = parse_rational(toks[2].text)
                    .ok_or_else(|| syntax(line, toks[2].column, format!("invalid rational `{}`", toks[2].text)))?;
                if t.is_some() {
                    return Err(ModelError::DuplicateT { line });
                }
                check_t(&value)?;
                t = Some(value);
            }
            other => {
                return Err(syntax(line, toks[0].column, format!("unknown key `{other}`")));
            }
        }
    }
    let t = t.ok_or(ModelError::MissingT)?;
    WeightedModel::new(weights, t)
}
