//! Independent finite-difference oracle.
//!
//! A deliberately separate code path used by the test suite to cross-check
//! the jet engine: metric components are evaluated by a plain `f64` tree
//! walk (no jets), partial derivatives come from 4th-order central stencils,
//! and the Christoffel/Riemann oracle assembles curvature from those
//! stencils with an `nalgebra` matrix inverse. Agreement is limited by
//! stencil truncation and roundoff, hence the looser tolerances in the
//! tests that consume it.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr};
use crate::metric::MetricSpec;

/// Plain f64 evaluation of an expression (independent of the jet path).
pub fn eval_f64(expr: &Expr, vars: &BTreeMap<String, f64>) -> Result<f64> {
    Ok(match expr {
        Expr::Num(v) => *v,
        Expr::Ident(name) => *vars.get(name).ok_or_else(|| Error::UnknownIdentifier {
            name: name.clone(),
            line: 0,
            col: 0,
        })?,
        Expr::Neg(e) => -eval_f64(e, vars)?,
        Expr::Bin(op, l, r) => {
            let (a, b) = (eval_f64(l, vars)?, eval_f64(r, vars)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => {
                    if b.fract() == 0.0 && b.abs() <= 12.0 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Expr::Call(f, e) => f.eval_f64(eval_f64(e, vars)?),
    })
}

/// Metric component values at a point, evaluated without jets.
pub fn metric_value(spec: &MetricSpec, point: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut vars: BTreeMap<String, f64> = spec
        .coords()
        .iter()
        .cloned()
        .zip(point.iter().copied())
        .collect();
    for (name, value) in spec.params() {
        vars.insert(name.clone(), *value);
    }
    let n = spec.dim();
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if let Some(e) = spec.component(i, j) {
                g[i][j] = eval_f64(e, &vars)?;
            }
        }
    }
    Ok(g)
}

/// 4th-order central first derivative along axis `i`.
pub fn central_d1<F>(f: &mut F, x: &[f64], i: usize, h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut at = |s: f64| -> Result<f64> {
        let mut y = x.to_vec();
        y[i] += s;
        f(&y)
    };
    Ok((-at(2.0 * h)? + 8.0 * at(h)? - 8.0 * at(-h)? + at(-2.0 * h)?) / (12.0 * h))
}

/// 4th-order central second derivative along one axis.
pub fn central_d2<F>(f: &mut F, x: &[f64], i: usize, h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut at = |s: f64| -> Result<f64> {
        let mut y = x.to_vec();
        y[i] += s;
        f(&y)
    };
    Ok(
        (-at(2.0 * h)? + 16.0 * at(h)? - 30.0 * at(0.0)? + 16.0 * at(-h)? - at(-2.0 * h)?)
            / (12.0 * h * h),
    )
}

/// Mixed second derivative via nested first-derivative stencils.
pub fn central_d1d1<F>(f: &mut F, x: &[f64], i: usize, j: usize, h: f64) -> Result<f64>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut outer = |y: &[f64]| -> Result<f64> {
        let mut g = |z: &[f64]| f(z);
        central_d1(&mut g, y, j, h)
    };
    central_d1(&mut outer, x, i, h)
}

/// Finite-difference partial of a metric component for |multi| <= 2.
pub fn fd_metric_partial(
    spec: &MetricSpec,
    i: usize,
    j: usize,
    point: &[f64],
    multi: &[usize],
    h: f64,
) -> Result<f64> {
    let mut f = |x: &[f64]| -> Result<f64> { Ok(metric_value(spec, x)?[i][j]) };
    let axes: Vec<usize> = multi
        .iter()
        .enumerate()
        .flat_map(|(axis, &k)| std::iter::repeat(axis).take(k))
        .collect();
    match axes.as_slice() {
        [] => f(point),
        [a] => central_d1(&mut f, point, *a, h),
        [a, b] if a == b => central_d2(&mut f, point, *a, h),
        [a, b] => central_d1d1(&mut f, point, *a, *b, h),
        _ => Err(Error::DegreeExceedsOrder {
            degree: axes.len(),
            order: 2,
        }),
    }
}

/// Christoffel symbols from finite differences: Gamma[d][b][c].
pub fn fd_christoffel(spec: &MetricSpec, point: &[f64], h: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = spec.dim();
    let g = metric_value(spec, point)?;
    let gm = DMatrix::from_fn(n, n, |i, j| g[i][j]);
    let ginv = gm
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric(point.to_vec()))?;
    // dg[k][c][b] = d_b g_{kc}
    let mut dg = vec![vec![vec![0.0; n]; n]; n];
    for k in 0..n {
        for c in 0..n {
            let mut f = |x: &[f64]| -> Result<f64> { Ok(metric_value(spec, x)?[k][c]) };
            for (b, slot) in dg[k][c].iter_mut().enumerate() {
                *slot = central_d1(&mut f, point, b, h)?;
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for d in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += ginv[(d, k)] * (dg[k][c][b] + dg[k][b][c] - dg[b][c][k]);
                }
                gamma[d][b][c] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Riemann tensor R[a][b][c][d] (upper slot last) from finite differences of
/// the Christoffel oracle, using the same sign convention as the jet path:
/// R_abc^d = d_b G^d_ac - d_a G^d_bc + G^d_bk G^k_ac - G^d_ak G^k_bc.
pub fn fd_riemann(spec: &MetricSpec, point: &[f64], h: f64) -> Result<Vec<Vec<Vec<Vec<f64>>>>> {
    let n = spec.dim();
    let gamma = fd_christoffel(spec, point, h)?;
    // dgamma[e][d][b][c] = d_e Gamma^d_bc, second-order stencil on the oracle
    let mut dgamma = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for e in 0..n {
        let mut plus = point.to_vec();
        plus[e] += h;
        let mut minus = point.to_vec();
        minus[e] -= h;
        let gp = fd_christoffel(spec, &plus, h)?;
        let gm = fd_christoffel(spec, &minus, h)?;
        for d in 0..n {
            for b in 0..n {
                for c in 0..n {
                    dgamma[e][d][b][c] = (gp[d][b][c] - gm[d][b][c]) / (2.0 * h);
                }
            }
        }
    }
    let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut quad = 0.0;
                    for k in 0..n {
                        quad += gamma[d][b][k] * gamma[k][a][c] - gamma[d][a][k] * gamma[k][b][c];
                    }
                    r[a][b][c][d] = dgamma[b][d][a][c] - dgamma[a][d][b][c] + quad;
                }
            }
        }
    }
    Ok(r)
}
