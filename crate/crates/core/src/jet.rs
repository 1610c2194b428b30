//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] of order `K` at a center `p` stores the Taylor coefficients
//! `∂^α f(p) / α!` for every multi-index `|α| ≤ K`. Monomials are laid out in
//! graded order (all degree-0, then degree-1, ...), so a jet of lower order is
//! a prefix of a jet of higher order in the same [`JetSpace`].

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::expr::{BinaryOp, ScalarExpr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by a jet with zero constant term")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogDomain(f64),
    #[error("square root of non-positive value {0}")]
    SqrtDomain(f64),
    #[error("power {exponent} undefined at base value {base}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("non-finite value produced")]
    NonFinite,
    #[error("expression references coordinate {index} but only {available} inputs were given")]
    MissingInput { index: usize, available: usize },
    #[error("jet of order {have} cannot be differentiated further (need order {need})")]
    InsufficientOrder { have: usize, need: usize },
}

/// Monomial bookkeeping shared by all jets in `nvars` variables up to
/// `max_order`.
pub struct JetSpace {
    nvars: usize,
    max_order: usize,
    monomials: Vec<Vec<u8>>,
    /// `degree_end[d]` = number of monomials of degree `≤ d`.
    degree_end: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    /// Products grouped by output monomial: pairs for output `k` live in
    /// `mul_pairs[mul_offsets[k]..mul_offsets[k + 1]]`.
    mul_offsets: Vec<usize>,
    mul_pairs: Vec<(u32, u32)>,
    /// `shift[var][p]` = index of monomial `p + e_var`, when within `max_order`.
    shift: Vec<Vec<Option<u32>>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("max_order", &self.max_order)
            .field("len", &self.monomials.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    // Lexicographically descending exponents: x^d, x^(d-1) y, ...
    fn rec(nvars: usize, remaining: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(remaining as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e as u8);
            rec(nvars, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

impl JetSpace {
    fn build(nvars: usize, max_order: usize) -> Self {
        let mut monomials = Vec::new();
        let mut degree_end = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            monomials.extend(monomials_of_degree(nvars, d));
            degree_end.push(monomials.len());
        }
        let index: HashMap<Vec<u8>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let degree = |m: &[u8]| m.iter().map(|&e| e as usize).sum::<usize>();

        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); monomials.len()];
        let mut sum = vec![0u8; nvars];
        for (i, a) in monomials.iter().enumerate() {
            let da = degree(a);
            for (j, b) in monomials.iter().enumerate() {
                if da + degree(b) > max_order {
                    // graded layout: all later b have degree ≥ this one
                    if degree(b) > max_order - da {
                        break;
                    }
                    continue;
                }
                for v in 0..nvars {
                    sum[v] = a[v] + b[v];
                }
                let k = index[&sum];
                buckets[k].push((i as u32, j as u32));
            }
        }
        let mut mul_offsets = Vec::with_capacity(monomials.len() + 1);
        let mut mul_pairs = Vec::new();
        mul_offsets.push(0);
        for bucket in buckets {
            mul_pairs.extend(bucket);
            mul_offsets.push(mul_pairs.len());
        }

        let shift = (0..nvars)
            .map(|v| {
                monomials
                    .iter()
                    .map(|m| {
                        let mut up = m.clone();
                        up[v] += 1;
                        index.get(&up).map(|&k| k as u32)
                    })
                    .collect()
            })
            .collect();

        JetSpace {
            nvars,
            max_order,
            monomials,
            degree_end,
            index,
            mul_offsets,
            mul_pairs,
            shift,
        }
    }

    /// Shared space for `nvars` variables supporting jets up to `max_order`.
    pub fn get(nvars: usize, max_order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, max_order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, max_order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn len_for(&self, order: usize) -> usize {
        self.degree_end[order]
    }

    pub fn monomial(&self, k: usize) -> &[u8] {
        &self.monomials[k]
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }
}

/// Truncated Taylor expansion of a scalar field at a point.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    center: Arc<[f64]>,
    order: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("center", &&*self.center)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, center: &Arc<[f64]>, order: usize, value: f64) -> Jet {
        assert!(order <= space.max_order, "jet order exceeds space");
        let mut coeffs = vec![0.0; space.len_for(order)];
        coeffs[0] = value;
        Jet {
            space: space.clone(),
            center: center.clone(),
            order,
            coeffs,
        }
    }

    /// The coordinate function `x_var` expanded at `center`.
    pub fn variable(space: &Arc<JetSpace>, center: &Arc<[f64]>, order: usize, var: usize) -> Jet {
        let mut jet = Jet::constant(space, center, order, center[var]);
        if order >= 1 {
            jet.coeffs[1 + var] = 1.0;
        }
        jet
    }

    /// Seed jets for every coordinate at `point`.
    pub fn coordinates(point: &[f64], order: usize) -> Vec<Jet> {
        let space = JetSpace::get(point.len(), order);
        let center: Arc<[f64]> = point.into();
        (0..point.len())
            .map(|v| Jet::variable(&space, &center, order, v))
            .collect()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    /// Taylor coefficients in graded monomial order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `∂^α f / α!` (zero beyond the truncation order).
    pub fn coeff(&self, exponents: &[u8]) -> f64 {
        match self.space.index_of(exponents) {
            Some(k) if k < self.coeffs.len() => self.coeffs[k],
            _ => 0.0,
        }
    }

    /// The raw partial derivative `∂^α f` at the center.
    pub fn partial(&self, exponents: &[u8]) -> f64 {
        let factorial: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product();
        self.coeff(exponents) * factorial
    }

    /// Gradient at the center.
    pub fn gradient(&self) -> Vec<f64> {
        (0..self.nvars())
            .map(|v| if self.order >= 1 { self.coeffs[1 + v] } else { 0.0 })
            .collect()
    }

    pub fn zero_like(&self) -> Jet {
        Jet {
            space: self.space.clone(),
            center: self.center.clone(),
            order: self.order,
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    pub fn constant_like(&self, value: f64) -> Jet {
        let mut jet = self.zero_like();
        jet.coeffs[0] = value;
        jet
    }

    /// Drop all terms above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet {
            space: self.space.clone(),
            center: self.center.clone(),
            order,
            coeffs: self.coeffs[..self.space.len_for(order)].to_vec(),
        }
    }

    /// `∂f/∂x_var` as a jet of order `K − 1`.
    pub fn derivative(&self, var: usize) -> Result<Jet, EvalError> {
        if self.order == 0 {
            return Err(EvalError::InsufficientOrder { have: 0, need: 1 });
        }
        let order = self.order - 1;
        let len = self.space.len_for(order);
        let shift = &self.space.shift[var];
        let coeffs = (0..len)
            .map(|p| {
                let up = shift[p].expect("shift within max order") as usize;
                let e = self.space.monomials[p][var] as f64 + 1.0;
                e * self.coeffs[up]
            })
            .collect();
        Ok(Jet {
            space: self.space.clone(),
            center: self.center.clone(),
            order,
            coeffs,
        })
    }

    fn check_compatible(&self, other: &Jet) {
        debug_assert_eq!(self.space.nvars, other.space.nvars, "jets over different charts");
        debug_assert!(
            self.center.len() == other.center.len()
                && self
                    .center
                    .iter()
                    .zip(other.center.iter())
                    .all(|(a, b)| a == b),
            "jets at different centers"
        );
    }

    fn binary_shape(&self, other: &Jet) -> (usize, usize) {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        (order, self.space.len_for(order))
    }

    fn with_coeffs(&self, order: usize, coeffs: Vec<f64>) -> Jet {
        Jet {
            space: self.space.clone(),
            center: self.center.clone(),
            order,
            coeffs,
        }
    }

    pub fn plus(&self, other: &Jet) -> Jet {
        let (order, len) = self.binary_shape(other);
        let coeffs = (0..len).map(|k| self.coeffs[k] + other.coeffs[k]).collect();
        self.with_coeffs(order, coeffs)
    }

    pub fn minus(&self, other: &Jet) -> Jet {
        let (order, len) = self.binary_shape(other);
        let coeffs = (0..len).map(|k| self.coeffs[k] - other.coeffs[k]).collect();
        self.with_coeffs(order, coeffs)
    }

    pub fn scaled(&self, s: f64) -> Jet {
        self.with_coeffs(self.order, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn add_constant(&self, s: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Truncated Cauchy product.
    pub fn times(&self, other: &Jet) -> Jet {
        let (order, len) = self.binary_shape(other);
        let mut coeffs = vec![0.0; len];
        self.mul_into(other, &mut coeffs);
        self.with_coeffs(order, coeffs)
    }

    fn mul_into(&self, other: &Jet, out: &mut [f64]) {
        let sp = &self.space;
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(i, j) in &sp.mul_pairs[sp.mul_offsets[k]..sp.mul_offsets[k + 1]] {
                acc += self.coeffs[i as usize] * other.coeffs[j as usize];
            }
            *slot += acc;
        }
    }

    /// `self += a * b`, truncated to the lowest order involved.
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let order = self.order.min(a.order).min(b.order);
        if order < self.order {
            self.coeffs.truncate(self.space.len_for(order));
            self.order = order;
        }
        let mut coeffs = std::mem::take(&mut self.coeffs);
        a.mul_into(b, &mut coeffs);
        self.coeffs = coeffs;
    }

    /// Quotient by recursive Taylor division.
    pub fn divide(&self, other: &Jet) -> Result<Jet, EvalError> {
        let (order, len) = self.binary_shape(other);
        let b0 = other.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(EvalError::DivisionByZero);
        }
        let sp = &self.space;
        let mut c = vec![0.0; len];
        for k in 0..len {
            let mut acc = self.coeffs[k];
            for &(i, j) in &sp.mul_pairs[sp.mul_offsets[k]..sp.mul_offsets[k + 1]] {
                let (i, j) = (i as usize, j as usize);
                if j == k {
                    continue; // the (0, k) pair carries the unknown
                }
                acc -= other.coeffs[i] * c[j];
            }
            c[k] = acc / b0;
        }
        Ok(self.with_coeffs(order, c))
    }

    pub fn recip(&self) -> Result<Jet, EvalError> {
        self.constant_like(1.0).divide(self)
    }

    /// Compose with a univariate function given its scaled derivatives
    /// `d[m] = f^(m)(a0) / m!` at the constant term `a0`.
    fn compose_univariate(&self, d: &[f64]) -> Jet {
        let mut tail = self.clone();
        tail.coeffs[0] = 0.0;
        let mut acc = self.constant_like(d[self.order]);
        for m in (0..self.order).rev() {
            acc = acc.times(&tail);
            acc.coeffs[0] += d[m];
        }
        acc
    }

    pub fn exp(&self) -> Jet {
        let a0 = self.value();
        let e = a0.exp();
        let mut d = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                fact *= m as f64;
            }
            d.push(e / fact);
        }
        self.compose_univariate(&d)
    }

    pub fn ln(&self) -> Result<Jet, EvalError> {
        let a0 = self.value();
        if a0 <= 0.0 || !a0.is_finite() {
            return Err(EvalError::LogDomain(a0));
        }
        let mut d = vec![a0.ln()];
        for m in 1..=self.order {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign / (m as f64 * a0.powi(m as i32)));
        }
        Ok(self.compose_univariate(&d))
    }

    pub fn sqrt(&self) -> Result<Jet, EvalError> {
        let a0 = self.value();
        if a0 <= 0.0 || !a0.is_finite() {
            return Err(EvalError::SqrtDomain(a0));
        }
        Ok(self.compose_univariate(&binomial_series(a0, 0.5, self.order)))
    }

    fn trig(&self, phase: f64) -> Jet {
        let a0 = self.value();
        let mut d = Vec::with_capacity(self.order + 1);
        let mut fact = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                fact *= m as f64;
            }
            d.push((a0 + phase + m as f64 * std::f64::consts::FRAC_PI_2).sin() / fact);
        }
        self.compose_univariate(&d)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0.0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(std::f64::consts::FRAC_PI_2)
    }

    /// Power with a constant real exponent.
    pub fn powf(&self, exponent: f64) -> Result<Jet, EvalError> {
        let a0 = self.value();
        let is_int = exponent.fract() == 0.0 && exponent.abs() < 1e9;
        if is_int && exponent >= 0.0 {
            let mut result = self.constant_like(1.0);
            let mut base = self.clone();
            let mut e = exponent as u64;
            while e > 0 {
                if e & 1 == 1 {
                    result = result.times(&base);
                }
                e >>= 1;
                if e > 0 {
                    base = base.times(&base);
                }
            }
            return Ok(result);
        }
        if is_int {
            if a0 == 0.0 {
                return Err(EvalError::PowDomain { base: a0, exponent });
            }
            return self.powf(-exponent)?.recip();
        }
        if a0 <= 0.0 || !a0.is_finite() {
            return Err(EvalError::PowDomain { base: a0, exponent });
        }
        Ok(self.compose_univariate(&binomial_series(a0, exponent, self.order)))
    }
}

/// `d[m] = binom(p, m) a0^(p − m)`.
fn binomial_series(a0: f64, p: f64, order: usize) -> Vec<f64> {
    let mut d = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    for m in 0..=order {
        if m > 0 {
            binom *= (p - (m as f64 - 1.0)) / m as f64;
        }
        d.push(binom * a0.powf(p - m as f64));
    }
    d
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.plus(rhs)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.minus(rhs)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.times(rhs)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scaled(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scaled(-1.0)
    }
}

/// Evaluate `expr` with each coordinate bound to the given jet. Binding
/// coordinates to jets of other fields realizes composition.
pub fn eval_with(expr: &ScalarExpr, inputs: &[Jet]) -> Result<Jet, EvalError> {
    let first = inputs.first().ok_or(EvalError::MissingInput {
        index: 0,
        available: 0,
    })?;
    let out = eval_rec(expr, inputs, first)?;
    if out.coeffs.iter().all(|c| c.is_finite()) {
        Ok(out)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_rec(expr: &ScalarExpr, inputs: &[Jet], like: &Jet) -> Result<Jet, EvalError> {
    Ok(match expr {
        ScalarExpr::Const(c) => like.constant_like(*c),
        ScalarExpr::Coord(i) => inputs
            .get(*i)
            .cloned()
            .ok_or(EvalError::MissingInput {
                index: *i,
                available: inputs.len(),
            })?,
        ScalarExpr::Unary(op, e) => {
            let v = eval_rec(e, inputs, like)?;
            match op {
                UnaryOp::Neg => -&v,
                UnaryOp::Exp => v.exp(),
                UnaryOp::Ln => v.ln()?,
                UnaryOp::Sqrt => v.sqrt()?,
                UnaryOp::Sin => v.sin(),
                UnaryOp::Cos => v.cos(),
            }
        }
        ScalarExpr::Binary(op, l, r) => {
            let a = eval_rec(l, inputs, like)?;
            let b = eval_rec(r, inputs, like)?;
            match op {
                BinaryOp::Add => &a + &b,
                BinaryOp::Sub => &a - &b,
                BinaryOp::Mul => &a * &b,
                BinaryOp::Div => a.divide(&b)?,
            }
        }
        ScalarExpr::Pow(e, p) => eval_rec(e, inputs, like)?.powf(*p)?,
    })
}

/// Jet of `expr` at `point`, truncated at `order`.
pub fn jet_eval(expr: &ScalarExpr, point: &[f64], order: usize) -> Result<Jet, EvalError> {
    eval_with(expr, &Jet::coordinates(point, order))
}

/// Plain floating-point evaluation.
pub fn eval_f64(expr: &ScalarExpr, point: &[f64]) -> Result<f64, EvalError> {
    jet_eval(expr, point, 0).map(|j| j.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn space_layout_is_graded() {
        let sp = JetSpace::get(2, 3);
        assert_eq!(sp.len_for(0), 1);
        assert_eq!(sp.len_for(1), 3);
        assert_eq!(sp.len_for(2), 6);
        assert_eq!(sp.len_for(3), 10);
        assert_eq!(sp.monomial(1), &[1, 0]);
        assert_eq!(sp.monomial(2), &[0, 1]);
        assert_eq!(sp.monomial(3), &[2, 0]);
        assert_eq!(sp.monomial(4), &[1, 1]);
    }

    #[test]
    fn inverse_square_coefficients() {
        // f(y) = y^-2 at y = 2: f = 1/4, f' = -1/4, f''/2 = 3/16.
        let coords = names(&["y"]);
        let e = parse_expr("1/(y*y)", &coords).unwrap();
        let jet = jet_eval(&e, &[2.0], 2).unwrap();
        let frozen = [0.25, -0.25, 0.1875];
        for (c, f) in jet.coeffs().iter().zip(frozen) {
            assert!((c - f).abs() < 1e-15, "{c} vs {f}");
        }
        // central finite differences, step 1e-4
        let f = |y: f64| 1.0 / (y * y);
        let h = 1e-4;
        let d1 = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        let d2 = (f(2.0 + h) - 2.0 * f(2.0) + f(2.0 - h)) / (h * h);
        assert!((jet.coeffs()[1] - d1).abs() < 1e-6);
        assert!((jet.coeffs()[2] - d2 / 2.0).abs() < 1e-6);
    }

    #[test]
    fn bilinear_product() {
        let coords = names(&["x", "y"]);
        let e = parse_expr("x*y", &coords).unwrap();
        let jet = jet_eval(&e, &[2.0, 3.0], 2).unwrap();
        assert_eq!(jet.value(), 6.0);
        assert_eq!(jet.coeff(&[1, 0]), 3.0);
        assert_eq!(jet.coeff(&[0, 1]), 2.0);
        assert_eq!(jet.coeff(&[1, 1]), 1.0);
        assert_eq!(jet.coeff(&[2, 0]), 0.0);
        assert_eq!(jet.coeff(&[0, 2]), 0.0);
    }

    #[test]
    fn pole_is_a_domain_error() {
        let coords = names(&["y"]);
        let e = parse_expr("1/(y-1)", &coords).unwrap();
        assert_eq!(jet_eval(&e, &[1.0], 2).unwrap_err(), EvalError::DivisionByZero);
        let e = parse_expr("ln(y - 1)", &coords).unwrap();
        assert!(matches!(jet_eval(&e, &[1.0], 2), Err(EvalError::LogDomain(_))));
        let e = parse_expr("sqrt(-y)", &coords).unwrap();
        assert!(matches!(jet_eval(&e, &[1.0], 2), Err(EvalError::SqrtDomain(_))));
        let e = parse_expr("y^0.5", &coords).unwrap();
        assert!(matches!(jet_eval(&e, &[-1.0], 2), Err(EvalError::PowDomain { .. })));
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let coords = names(&["x"]);
        let x0 = 0.7f64;
        let check = |src: &str, derivs: [f64; 4]| {
            let e = parse_expr(src, &coords).unwrap();
            let jet = jet_eval(&e, &[x0], 3).unwrap();
            for (m, d) in derivs.iter().enumerate() {
                let got = jet.partial(&[m as u8]);
                assert!((got - d).abs() < 1e-12, "{src} d{m}: {got} vs {d}");
            }
        };
        check("exp(x)", [x0.exp(); 4]);
        check("sin(x)", [x0.sin(), x0.cos(), -x0.sin(), -x0.cos()]);
        check("cos(x)", [x0.cos(), -x0.sin(), -x0.cos(), x0.sin()]);
        check("ln(x)", [x0.ln(), 1.0 / x0, -1.0 / (x0 * x0), 2.0 / x0.powi(3)]);
        check(
            "sqrt(x)",
            [
                x0.sqrt(),
                0.5 / x0.sqrt(),
                -0.25 * x0.powf(-1.5),
                0.375 * x0.powf(-2.5),
            ],
        );
        check("x^3", [x0.powi(3), 3.0 * x0 * x0, 6.0 * x0, 6.0]);
        check(
            "x^-2",
            [x0.powi(-2), -2.0 * x0.powi(-3), 6.0 * x0.powi(-4), -24.0 * x0.powi(-5)],
        );
    }

    #[test]
    fn derivative_lowers_order() {
        let coords = names(&["x", "y"]);
        let e = parse_expr("x*x*y + sin(y)", &coords).unwrap();
        let jet = jet_eval(&e, &[1.5, 0.3], 3).unwrap();
        let dx = jet.derivative(0).unwrap();
        assert_eq!(dx.order(), 2);
        // ∂x = 2xy, ∂x∂y = 2x
        assert!((dx.value() - 2.0 * 1.5 * 0.3).abs() < 1e-14);
        assert!((dx.coeff(&[0, 1]) - 3.0).abs() < 1e-14);
        let c = jet.constant_like(1.0).truncate(0);
        assert!(c.derivative(0).is_err());
    }

    #[test]
    fn division_inverts_multiplication() {
        let coords = names(&["x", "y"]);
        let a = jet_eval(&parse_expr("exp(x) + y", &coords).unwrap(), &[0.2, 0.4], 4).unwrap();
        let b = jet_eval(&parse_expr("2 + x*y - y^3", &coords).unwrap(), &[0.2, 0.4], 4).unwrap();
        let q = a.divide(&b).unwrap();
        let back = q.times(&b);
        for (u, v) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((u - v).abs() < 1e-13);
        }
    }
}
