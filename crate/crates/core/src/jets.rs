//! Truncated multivariate Taylor arithmetic ("jets") up to order 4.
//!
//! A [`Jet`] carries the Taylor coefficients (partial derivative divided by
//! the multi-index factorial) of a scalar function of `dim` variables at a
//! point, truncated at total degree `order <= 4`. Sums, products, quotients
//! and elementary-function composition are exact in the truncated algebra,
//! so every metric partial up to fourth order comes out at machine
//! precision. Order 4 suffices for second covariant derivatives of the
//! Riemann tensor, which is the deepest derivative the identity suite needs.
//!
//! Storage is dense over the graded-lexicographic multi-index list; the
//! index tables (including the pairwise product map) are built once per
//! `(dim, order)` and shared.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;

const NO_PRODUCT: u32 = u32::MAX;

/// Index bookkeeping for one `(dim, order)` jet space.
#[derive(Debug)]
pub(crate) struct JetTable {
    dim: usize,
    order: usize,
    /// Multi-indices in graded-lex order; all degrees `<= order`.
    indices: Vec<Vec<u8>>,
    rank_of: HashMap<Vec<u8>, usize>,
    /// `product[i * n + j]` = rank of `indices[i] + indices[j]`, or `NO_PRODUCT`.
    product: Vec<u32>,
    /// `shift_up[axis][r]` = rank of `indices[r] + e_axis`, or `NO_PRODUCT`.
    shift_up: Vec<Vec<u32>>,
    /// Product of factorials of the multi-index entries, per rank.
    factorial: Vec<f64>,
    degree: Vec<u8>,
}

impl JetTable {
    fn build(dim: usize, order: usize) -> JetTable {
        let mut indices: Vec<Vec<u8>> = Vec::new();
        for d in 0..=order {
            push_degree(dim, d as u8, &mut Vec::new(), &mut indices);
        }
        let rank_of: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(r, m)| (m.clone(), r))
            .collect();
        let n = indices.len();
        let mut product = vec![NO_PRODUCT; n * n];
        for i in 0..n {
            for j in 0..n {
                let sum: Vec<u8> = indices[i]
                    .iter()
                    .zip(&indices[j])
                    .map(|(a, b)| a + b)
                    .collect();
                if sum.iter().map(|&x| x as usize).sum::<usize>() <= order {
                    product[i * n + j] = rank_of[&sum] as u32;
                }
            }
        }
        let mut shift_up = vec![vec![NO_PRODUCT; n]; dim];
        for (r, m) in indices.iter().enumerate() {
            for (axis, shift) in shift_up.iter_mut().enumerate() {
                let mut up = m.clone();
                up[axis] += 1;
                if let Some(&k) = rank_of.get(&up) {
                    shift[r] = k as u32;
                }
            }
        }
        let factorial = indices
            .iter()
            .map(|m| m.iter().map(|&k| fact(k as usize)).product())
            .collect();
        let degree = indices
            .iter()
            .map(|m| m.iter().map(|&x| x as usize).sum::<usize>() as u8)
            .collect();
        JetTable {
            dim,
            order,
            indices,
            rank_of,
            product,
            shift_up,
            factorial,
            degree,
        }
    }

    fn n(&self) -> usize {
        self.indices.len()
    }
}

fn push_degree(dim: usize, remaining: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() == dim - 1 {
        prefix.push(remaining);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        prefix.push(k);
        push_degree(dim, remaining - k, prefix, out);
        prefix.pop();
    }
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn table(dim: usize, order: usize) -> Arc<JetTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((dim, order))
        .or_insert_with(|| Arc::new(JetTable::build(dim, order)))
        .clone()
}

/// Truncated Taylor expansion of a scalar in `dim` variables.
#[derive(Clone)]
pub struct Jet {
    table: Arc<JetTable>,
    coeffs: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet")
            .field("dim", &self.dim())
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl Jet {
    pub fn constant(dim: usize, order: usize, value: f64) -> Result<Jet> {
        if order > MAX_ORDER {
            return Err(Error::OrderOutOfRange(order));
        }
        let table = table(dim, order);
        let mut coeffs = vec![0.0; table.n()];
        coeffs[0] = value;
        Ok(Jet { table, coeffs })
    }

    /// The jet of the coordinate function `x^index` at `value`.
    pub fn variable(dim: usize, order: usize, index: usize, value: f64) -> Result<Jet> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut jet = Jet::constant(dim, order, value)?;
        if order >= 1 {
            let mut m = vec![0u8; dim];
            m[index] = 1;
            let r = jet.table.rank_of[&m];
            jet.coeffs[r] = 1.0;
        }
        Ok(jet)
    }

    pub fn dim(&self) -> usize {
        self.table.dim
    }

    pub fn order(&self) -> usize {
        self.table.order
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of the given multi-index.
    pub fn coeff(&self, multi_index: &[usize]) -> Result<f64> {
        let r = self.rank(multi_index)?;
        Ok(self.coeffs[r])
    }

    /// True partial derivative: coefficient times the multi-index factorial.
    pub fn extract_partial(&self, multi_index: &[usize]) -> Result<f64> {
        let r = self.rank(multi_index)?;
        Ok(self.coeffs[r] * self.table.factorial[r])
    }

    fn rank(&self, multi_index: &[usize]) -> Result<usize> {
        if multi_index.len() != self.dim() {
            return Err(Error::DimMismatch(format!(
                "multi-index length {} vs dim {}",
                multi_index.len(),
                self.dim()
            )));
        }
        let degree: usize = multi_index.iter().sum();
        if degree > self.order() {
            return Err(Error::DegreeExceedsOrder {
                degree,
                order: self.order(),
            });
        }
        let key: Vec<u8> = multi_index.iter().map(|&x| x as u8).collect();
        Ok(self.table.rank_of[&key])
    }

    fn check_match(&self, other: &Jet) -> Result<()> {
        if !Arc::ptr_eq(&self.table, &other.table)
            && (self.dim() != other.dim() || self.order() != other.order())
        {
            return Err(Error::JetMismatch(
                self.dim(),
                self.order(),
                other.dim(),
                other.order(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Jet) -> Result<Jet> {
        self.check_match(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Jet {
            table: self.table.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet> {
        self.check_match(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Jet {
            table: self.table.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> Jet {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            table: self.table.clone(),
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Jet) -> Result<Jet> {
        self.check_match(other)?;
        let n = self.table.n();
        let prod = &self.table.product;
        let mut coeffs = vec![0.0; n];
        for i in 0..n {
            let ai = self.coeffs[i];
            if ai == 0.0 {
                continue;
            }
            let row = &prod[i * n..(i + 1) * n];
            for (j, &k) in row.iter().enumerate() {
                if k != NO_PRODUCT {
                    coeffs[k as usize] += ai * other.coeffs[j];
                }
            }
        }
        Ok(Jet {
            table: self.table.clone(),
            coeffs,
        })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Jet> {
        let c = self.constant_term();
        if c == 0.0 {
            return Err(Error::SingularPoint(
                "division by a jet with zero constant term".into(),
            ));
        }
        let mut d = [0.0; MAX_ORDER + 1];
        let mut p = 1.0 / c;
        let mut k_fact_sign = 1.0;
        for (k, slot) in d.iter_mut().enumerate().take(self.order() + 1) {
            // k-th derivative of 1/x: (-1)^k k! / x^{k+1}
            *slot = k_fact_sign * fact(k) * p;
            p /= c;
            k_fact_sign = -k_fact_sign;
        }
        Ok(self.compose(&d))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.mul(&other.recip()?)
    }

    /// Integer power by repeated multiplication (negative via reciprocal).
    pub fn powi(&self, n: i64) -> Result<Jet> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        let mut acc = Jet::constant(self.dim(), self.order(), 1.0)?;
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Composition with a univariate function given its derivatives
    /// `derivs[k] = f^(k)(constant term)`. Exact in the truncated algebra
    /// because `h = self - const` is nilpotent beyond the order.
    fn compose(&self, derivs: &[f64; MAX_ORDER + 1]) -> Jet {
        let order = self.order();
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut acc = Jet::constant(self.dim(), order, derivs[order] / fact(order)).unwrap();
        for k in (0..order).rev() {
            acc = acc.mul(&h).unwrap();
            acc.coeffs[0] += derivs[k] / fact(k);
        }
        acc
    }

    /// Jet of the partial derivative along `axis`; drops one order.
    ///
    /// Panics if the order is already 0 (internal pipelines always hold a
    /// spare order before differentiating).
    pub fn partial(&self, axis: usize) -> Jet {
        assert!(self.order() > 0, "cannot differentiate an order-0 jet");
        assert!(axis < self.dim());
        let sub = table(self.dim(), self.order() - 1);
        let shift = &self.table.shift_up[axis];
        let coeffs = (0..sub.n())
            .map(|r| {
                let up = shift[r] as usize;
                (self.table.indices[r][axis] + 1) as f64 * self.coeffs[up]
            })
            .collect();
        Jet { table: sub, coeffs }
    }

    /// Copy truncated to a lower (or equal) order.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order <= self.order());
        if order == self.order() {
            return self.clone();
        }
        let sub = table(self.dim(), order);
        Jet {
            coeffs: self.coeffs[..sub.n()].to_vec(),
            table: sub,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Elementary functions available on jets (and in the metric DSL).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElemFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    PowConst(f64),
}

/// Composition with an elementary function around the constant term.
pub fn jet_elementary(a: &Jet, f: ElemFn) -> Result<Jet> {
    let x = a.constant_term();
    let mut d = [0.0; MAX_ORDER + 1];
    match f {
        ElemFn::Sin => {
            let (s, c) = (x.sin(), x.cos());
            d = [s, c, -s, -c, s];
        }
        ElemFn::Cos => {
            let (s, c) = (x.sin(), x.cos());
            d = [c, -s, -c, s, c];
        }
        ElemFn::Tan => {
            if x.cos() == 0.0 {
                return Err(Error::SingularPoint(format!("tan evaluated at a pole (x = {x})")));
            }
            let t = x.tan();
            let d1 = 1.0 + t * t;
            let d2 = 2.0 * t * d1;
            let d3 = 2.0 * (d1 * d1 + t * d2);
            let d4 = 6.0 * d1 * d2 + 2.0 * t * d3;
            d = [t, d1, d2, d3, d4];
        }
        ElemFn::Exp => {
            let e = x.exp();
            d = [e; MAX_ORDER + 1];
        }
        ElemFn::Log => {
            if x <= 0.0 {
                return Err(Error::SingularPoint(format!("log of non-positive value {x}")));
            }
            d = [x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x)];
        }
        ElemFn::Sqrt => {
            if x <= 0.0 {
                return Err(Error::SingularPoint(format!("sqrt of non-positive value {x}")));
            }
            let r = x.sqrt();
            d = [
                r,
                0.5 / r,
                -0.25 / (r * x),
                0.375 / (r * x * x),
                -0.9375 / (r * x * x * x),
            ];
        }
        ElemFn::Sinh => {
            let (s, c) = (x.sinh(), x.cosh());
            d = [s, c, s, c, s];
        }
        ElemFn::Cosh => {
            let (s, c) = (x.sinh(), x.cosh());
            d = [c, s, c, s, c];
        }
        ElemFn::Tanh => {
            let t = x.tanh();
            let d1 = 1.0 - t * t;
            let d2 = -2.0 * t * d1;
            let d3 = -2.0 * (d1 * d1 + t * d2);
            let d4 = -6.0 * d1 * d2 - 2.0 * t * d3;
            d = [t, d1, d2, d3, d4];
        }
        ElemFn::PowConst(r) => {
            if x <= 0.0 {
                return Err(Error::SingularPoint(format!(
                    "non-integer power of non-positive base {x}"
                )));
            }
            // k-th derivative: r(r-1)...(r-k+1) x^{r-k}
            let mut c = x.powf(r);
            let mut coef = 1.0;
            for (k, slot) in d.iter_mut().enumerate().take(a.order() + 1) {
                *slot = coef * c;
                coef *= r - k as f64;
                c /= x;
            }
        }
    }
    Ok(a.compose(&d))
}

/// Binary arithmetic with operand checking (the error-reporting entry point;
/// the inherent methods are what internal code uses).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn jet_arith(a: &Jet, b: &Jet, op: JetOp) -> Result<Jet> {
    match op {
        JetOp::Add => a.add(b),
        JetOp::Sub => a.sub(b),
        JetOp::Mul => a.mul(b),
        JetOp::Div => a.div(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(dim: usize, order: usize, i: usize, v: f64) -> Jet {
        Jet::variable(dim, order, i, v).unwrap()
    }

    #[test]
    fn coordinate_jet_coefficients() {
        let j = var(2, 2, 0, 3.0);
        assert_eq!(j.coeff(&[0, 0]).unwrap(), 3.0);
        assert_eq!(j.coeff(&[1, 0]).unwrap(), 1.0);
        assert_eq!(j.coeff(&[0, 1]).unwrap(), 0.0);
        assert_eq!(j.coeff(&[2, 0]).unwrap(), 0.0);
        assert_eq!(j.coeff(&[1, 1]).unwrap(), 0.0);

        let j = var(1, 0, 0, 5.0);
        assert_eq!(j.coeff(&[0]).unwrap(), 5.0);

        let j = var(3, 1, 2, 0.0);
        assert_eq!(j.coeff(&[0, 0, 0]).unwrap(), 0.0);
        assert_eq!(j.coeff(&[0, 0, 1]).unwrap(), 1.0);
        assert_eq!(j.coeff(&[1, 0, 0]).unwrap(), 0.0);
        assert_eq!(j.coeff(&[0, 1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn variable_errors() {
        assert!(Jet::variable(2, 2, 2, 0.0).is_err());
        assert!(Jet::variable(2, 5, 0, 0.0).is_err());
    }

    #[test]
    fn polynomial_product() {
        // (1 + x)(1 - x) = 1 - x^2 at order 2
        let x = var(1, 2, 0, 0.0);
        let one = Jet::constant(1, 2, 1.0).unwrap();
        let p = one.add(&x).unwrap().mul(&one.sub(&x).unwrap()).unwrap();
        assert_eq!(p.coeff(&[0]).unwrap(), 1.0);
        assert_eq!(p.coeff(&[1]).unwrap(), 0.0);
        assert_eq!(p.coeff(&[2]).unwrap(), -1.0);
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - x) = 1 + x + x^2 + x^3 at order 3
        let x = var(1, 3, 0, 0.0);
        let one = Jet::constant(1, 3, 1.0).unwrap();
        let q = one.div(&one.sub(&x).unwrap()).unwrap();
        for k in 0..=3 {
            assert!((q.coeff(&[k]).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn division_at_singular_point() {
        let x = var(1, 2, 0, 0.0);
        assert!(matches!(x.div(&x), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn sin_maclaurin() {
        let x = var(1, 3, 0, 0.0);
        let s = jet_elementary(&x, ElemFn::Sin).unwrap();
        assert!((s.coeff(&[0]).unwrap()).abs() < 1e-16);
        assert!((s.coeff(&[1]).unwrap() - 1.0).abs() < 1e-16);
        assert!((s.coeff(&[2]).unwrap()).abs() < 1e-16);
        assert!((s.coeff(&[3]).unwrap() + 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn exp_of_zero_jet() {
        let z = Jet::constant(2, 4, 0.0).unwrap();
        let e = jet_elementary(&z, ElemFn::Exp).unwrap();
        assert_eq!(e.coeff(&[0, 0]).unwrap(), 1.0);
        assert_eq!(e.max_abs_coeff(), 1.0);
    }

    #[test]
    fn sqrt_domain_error() {
        let j = Jet::constant(1, 2, -1.0).unwrap();
        assert!(matches!(
            jet_elementary(&j, ElemFn::Sqrt),
            Err(Error::SingularPoint(_))
        ));
    }

    #[test]
    fn extract_partials() {
        // d^2(x^2)/dx^2 = 2 at x = 1
        let x = var(1, 2, 0, 1.0);
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.extract_partial(&[2]).unwrap(), 2.0);
        assert_eq!(sq.extract_partial(&[0]).unwrap(), 1.0);
        assert!(sq.extract_partial(&[3]).is_err());

        // d^2/dxdy of sin(x)*y at (0,0) = 1
        let x = var(2, 3, 0, 0.0);
        let y = var(2, 3, 1, 0.0);
        let f = jet_elementary(&x, ElemFn::Sin).unwrap().mul(&y).unwrap();
        assert!((f.extract_partial(&[1, 1]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn partial_drops_order() {
        // d/dx of x^2 y at (2, 3), order 4 -> 2xy with order 3
        let x = var(2, 4, 0, 2.0);
        let y = var(2, 4, 1, 3.0);
        let f = x.mul(&x).unwrap().mul(&y).unwrap();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 3);
        assert!((fx.constant_term() - 12.0).abs() < 1e-14);
        assert!((fx.extract_partial(&[1, 0]).unwrap() - 6.0).abs() < 1e-14);
        assert!((fx.extract_partial(&[0, 1]).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn elementary_against_closed_forms() {
        // tan, tanh, log, pow at a generic point against hand derivatives
        let x0 = 0.7;
        let x = var(1, 4, 0, x0);
        let t = jet_elementary(&x, ElemFn::Tan).unwrap();
        assert!((t.extract_partial(&[1]).unwrap() - 1.0 / x0.cos().powi(2)).abs() < 1e-13);
        let l = jet_elementary(&x, ElemFn::Log).unwrap();
        assert!((l.extract_partial(&[2]).unwrap() + 1.0 / (x0 * x0)).abs() < 1e-13);
        let p = jet_elementary(&x, ElemFn::PowConst(2.5)).unwrap();
        assert!((p.extract_partial(&[1]).unwrap() - 2.5 * x0.powf(1.5)).abs() < 1e-13);
        assert!(
            (p.extract_partial(&[3]).unwrap() - 2.5 * 1.5 * 0.5 * x0.powf(-0.5)).abs() < 1e-12
        );
        let th = jet_elementary(&x, ElemFn::Tanh).unwrap();
        let sech2 = 1.0 - x0.tanh().powi(2);
        assert!((th.extract_partial(&[1]).unwrap() - sech2).abs() < 1e-13);
    }

    #[test]
    fn powi_matches_pow_const() {
        let x = var(1, 4, 0, 1.3);
        let a = x.powi(5).unwrap();
        let b = jet_elementary(&x, ElemFn::PowConst(5.0)).unwrap();
        for k in 0..=4 {
            assert!((a.coeff(&[k]).unwrap() - b.coeff(&[k]).unwrap()).abs() < 1e-11);
        }
        let n = x.powi(-3).unwrap();
        assert!((n.constant_term() - 1.3f64.powi(-3)).abs() < 1e-14);
    }

    #[test]
    fn mismatched_operands_error() {
        let a = var(2, 2, 0, 1.0);
        let b = var(2, 3, 0, 1.0);
        assert!(jet_arith(&a, &b, JetOp::Add).is_err());
        let c = var(3, 2, 0, 1.0);
        assert!(jet_arith(&a, &c, JetOp::Mul).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_jet(dim: usize, order: usize) -> impl Strategy<Value = Jet> {
            let n = table(dim, order).n();
            proptest::collection::vec(-1.0f64..1.0, n).prop_map(move |coeffs| Jet {
                table: table(dim, order),
                coeffs,
            })
        }

        proptest! {
            #[test]
            fn mul_commutative(a in arb_jet(2, 4), b in arb_jet(2, 4)) {
                let ab = a.mul(&b).unwrap();
                let ba = b.mul(&a).unwrap();
                let diff = ab.sub(&ba).unwrap().max_abs_coeff();
                prop_assert!(diff <= 1e-14, "diff = {diff}");
            }

            #[test]
            fn mul_associative(a in arb_jet(2, 4), b in arb_jet(2, 4), c in arb_jet(2, 4)) {
                let l = a.mul(&b).unwrap().mul(&c).unwrap();
                let r = a.mul(&b.mul(&c).unwrap()).unwrap();
                let diff = l.sub(&r).unwrap().max_abs_coeff();
                prop_assert!(diff <= 1e-14, "diff = {diff}");
            }

            #[test]
            fn div_round_trip(
                mut a in arb_jet(2, 4),
                b in arb_jet(2, 4),
                c0 in prop_oneof![0.3f64..2.0, -2.0f64..-0.3],
            ) {
                a.coeffs[0] = c0;
                let q = b.div(&a).unwrap();
                let back = a.mul(&q).unwrap();
                let err = back.sub(&b).unwrap().max_abs_coeff();
                let scale = b.max_abs_coeff().max(1.0);
                prop_assert!(err / scale <= 1e-12, "err = {err}, scale = {scale}");
            }
        }
    }
}
