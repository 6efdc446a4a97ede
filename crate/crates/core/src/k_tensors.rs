//! The generalized curvature-tensor family: projective, conformal (Weyl),
//! concircular, conharmonic and quasi-conformal tensors, their closed-form
//! divergences, the cyclic-derivative source tensors B, and the divergences
//! of B.
//!
//! Every closed form here is paired with a direct route that assembles the
//! K tensor as a jet field and differentiates it; the tests require the two
//! to agree, which is what validates the formulas (including two source
//! formulas whose printed forms are completed from the cyclic pattern of
//! the conformal case: the conharmonic wedge block and the quasi-conformal
//! linear combination, both rederived from the definitions).

use crate::curvature::{CurvaturePoint, JetTensor};
use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::tensor::{einsum, TensorValue, Variance};

use Variance::{Contravariant as Up, Covariant as Lo};

/// Which member of the curvature-tensor family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KKind {
    Projective,
    Conformal,
    Concircular,
    Conharmonic,
    QuasiConformal { a: f64, b: f64 },
}

impl KKind {
    /// Minimum dimension in which the tensor is defined (n-2 denominators).
    pub fn min_dim(&self) -> usize {
        match self {
            KKind::Projective | KKind::Concircular => 2,
            KKind::Conformal | KKind::Conharmonic | KKind::QuasiConformal { .. } => 3,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n < self.min_dim() {
            return Err(Error::DimensionTooSmall {
                kind: self.label(),
                min: self.min_dim(),
                dim: n,
            });
        }
        if let KKind::QuasiConformal { a, b } = self {
            if *a == 0.0 && *b == 0.0 {
                return Err(Error::Config(
                    "quasi-conformal constants a, b must not both vanish".into(),
                ));
            }
        }
        Ok(())
    }

    /// Default quasi-conformal constants: a = 1, b = 1/(n-2), which
    /// interpolates nontrivially between the concircular and conformal
    /// tensors.
    pub fn default_quasi(n: usize) -> KKind {
        KKind::QuasiConformal {
            a: 1.0,
            b: 1.0 / (n as f64 - 2.0),
        }
    }

    /// The five kinds with default quasi constants for dimension `n`,
    /// restricted to the ones defined in that dimension.
    pub fn all_for_dim(n: usize) -> Vec<KKind> {
        let mut kinds = vec![KKind::Projective, KKind::Concircular];
        if n >= 3 {
            kinds.insert(1, KKind::Conformal);
            kinds.push(KKind::Conharmonic);
            kinds.push(KKind::default_quasi(n));
        }
        kinds
    }

    /// CLI selector: `projective`, `conformal`, `concircular`,
    /// `conharmonic`, or `quasi[:a:b]` (defaults depend on the dimension).
    pub fn parse(s: &str, n: usize) -> Result<KKind> {
        let bad = |s: &str| {
            Error::Config(format!(
                "unknown k-tensor `{s}`; expected projective, conformal, concircular, conharmonic or quasi:a:b"
            ))
        };
        match s {
            "projective" => Ok(KKind::Projective),
            "conformal" => Ok(KKind::Conformal),
            "concircular" => Ok(KKind::Concircular),
            "conharmonic" => Ok(KKind::Conharmonic),
            "quasi" => Ok(KKind::default_quasi(n)),
            other => {
                let mut parts = other.split(':');
                if parts.next() != Some("quasi") {
                    return Err(bad(s));
                }
                let a: f64 = parts
                    .next()
                    .ok_or_else(|| bad(s))?
                    .parse()
                    .map_err(|_| bad(s))?;
                let b: f64 = parts
                    .next()
                    .ok_or_else(|| bad(s))?
                    .parse()
                    .map_err(|_| bad(s))?;
                if parts.next().is_some() {
                    return Err(bad(s));
                }
                Ok(KKind::QuasiConformal { a, b })
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            KKind::Projective => "projective".into(),
            KKind::Conformal => "conformal".into(),
            KKind::Concircular => "concircular".into(),
            KKind::Conharmonic => "conharmonic".into(),
            KKind::QuasiConformal { a, b } => format!("quasi:{a}:{b}"),
        }
    }
}

fn identity_tensor(dim: usize) -> TensorValue {
    // slots (e, b): delta^e_b
    TensorValue::from_fn(dim, &[Up, Lo], |i| if i[0] == i[1] { 1.0 } else { 0.0 })
}

/// The K tensor of the given kind at a point, slots (s1, s2, s3; up) like
/// the Riemann tensor it corrects.
pub fn k_tensor(cp: &CurvaturePoint, kind: KKind) -> Result<TensorValue> {
    let n = cp.dim();
    kind.check_dim(n)?;
    let nf = n as f64;
    let id = identity_tensor(n);
    let r = &cp.riemann;
    let ric = &cp.ricci;
    let g = &cp.metric.g;
    let ricmix = einsum("em,bm->be", &[&cp.metric.g_inv, ric]); // Ric_b^e, slots (b, e)
    Ok(match kind {
        KKind::Projective => {
            // P_bcd^e = R_bcd^e + (delta^e_b Ric_cd - delta^e_c Ric_bd)/(n-1)
            let wedge = einsum("eb,cd->bcde", &[&id, ric]).sub(&einsum("ec,bd->bcde", &[&id, ric]));
            r.add(&wedge.scale(1.0 / (nf - 1.0)))
        }
        KKind::Conformal => {
            // C_abc^d = R_abc^d
            //   + [delta_a^d Ric_bc - delta_b^d Ric_ac + Ric_a^d g_bc - Ric_b^d g_ac]/(n-2)
            //   - R [delta_a^d g_bc - delta_b^d g_ac]/((n-1)(n-2))
            let w1 = einsum("da,bc->abcd", &[&id, ric]).sub(&einsum("db,ac->abcd", &[&id, ric]));
            let w2 = einsum("ad,bc->abcd", &[&ricmix, g]).sub(&einsum("bd,ac->abcd", &[&ricmix, g]));
            let w3 = einsum("da,bc->abcd", &[&id, g]).sub(&einsum("db,ac->abcd", &[&id, g]));
            r.add(&w1.add(&w2).scale(1.0 / (nf - 2.0)))
                .sub(&w3.scale(cp.scalar / ((nf - 1.0) * (nf - 2.0))))
        }
        KKind::Concircular => {
            let wedge = einsum("eb,cd->bcde", &[&id, g]).sub(&einsum("ec,bd->bcde", &[&id, g]));
            r.add(&wedge.scale(cp.scalar / (nf * (nf - 1.0))))
        }
        KKind::Conharmonic => {
            let w1 = einsum("eb,cd->bcde", &[&id, ric]).sub(&einsum("ec,bd->bcde", &[&id, ric]));
            let w2 = einsum("be,cd->bcde", &[&ricmix, g]).sub(&einsum("ce,bd->bcde", &[&ricmix, g]));
            r.add(&w1.add(&w2).scale(1.0 / (nf - 2.0)))
        }
        KKind::QuasiConformal { a, b } => {
            let conc = k_tensor(cp, KKind::Concircular)?;
            let conf = k_tensor(cp, KKind::Conformal)?;
            conc.scale(a).add(&conf.sub(&conc).scale(b * (nf - 2.0)))
        }
    })
}

/// The same K tensor as a jet field (order 2), for direct differentiation.
pub fn k_jets(cp: &CurvaturePoint, kind: KKind) -> Result<JetTensor> {
    let cj = cp.jets();
    let n = cj.dim();
    kind.check_dim(n)?;
    let nf = n as f64;
    let r = &cj.riemann;
    let ric = &cj.ricci;
    let g2 = cj.g.truncated(2);
    let gi2 = cj.g_inv.truncated(2);
    let scalar = &cj.scalar;
    // mixed Ricci jets: Ric_b^e = g^{em} Ric_bm
    let mut ricmix = JetTensor::zeros(n, &[Lo, Up], 2)?;
    for b in 0..n {
        for e in 0..n {
            let mut s = Jet::constant(n, 2, 0.0)?;
            for m in 0..n {
                s = s.add(&gi2.get(&[e, m]).mul(ric.get(&[b, m]))?)?;
            }
            ricmix.set(&[b, e], s);
        }
    }
    let delta = |i: usize, j: usize| i == j;
    let mut out = JetTensor::zeros(n, &[Lo, Lo, Lo, Up], 2)?;
    match kind {
        KKind::Projective => {
            let c = 1.0 / (nf - 1.0);
            crate::tensor::for_each_index(n, 4, |idx| {
                let (b, cc, d, e) = (idx[0], idx[1], idx[2], idx[3]);
                let mut jet = r.get(idx).clone();
                if delta(e, b) {
                    jet = jet.add(&ric.get(&[cc, d]).scale(c)).unwrap();
                }
                if delta(e, cc) {
                    jet = jet.sub(&ric.get(&[b, d]).scale(c)).unwrap();
                }
                out.set(idx, jet);
            });
        }
        KKind::Conformal => {
            let c2 = 1.0 / (nf - 2.0);
            let c12 = 1.0 / ((nf - 1.0) * (nf - 2.0));
            crate::tensor::for_each_index(n, 4, |idx| {
                let (a, b, cc, d) = (idx[0], idx[1], idx[2], idx[3]);
                let mut jet = r.get(idx).clone();
                if delta(a, d) {
                    jet = jet.add(&ric.get(&[b, cc]).scale(c2)).unwrap();
                    jet = jet
                        .sub(&scalar.mul(g2.get(&[b, cc])).unwrap().scale(c12))
                        .unwrap();
                }
                if delta(b, d) {
                    jet = jet.sub(&ric.get(&[a, cc]).scale(c2)).unwrap();
                    jet = jet
                        .add(&scalar.mul(g2.get(&[a, cc])).unwrap().scale(c12))
                        .unwrap();
                }
                jet = jet
                    .add(&ricmix.get(&[a, d]).mul(g2.get(&[b, cc])).unwrap().scale(c2))
                    .unwrap();
                jet = jet
                    .sub(&ricmix.get(&[b, d]).mul(g2.get(&[a, cc])).unwrap().scale(c2))
                    .unwrap();
                out.set(idx, jet);
            });
        }
        KKind::Concircular => {
            let c = 1.0 / (nf * (nf - 1.0));
            crate::tensor::for_each_index(n, 4, |idx| {
                let (b, cc, d, e) = (idx[0], idx[1], idx[2], idx[3]);
                let mut jet = r.get(idx).clone();
                if delta(e, b) {
                    jet = jet
                        .add(&scalar.mul(g2.get(&[cc, d])).unwrap().scale(c))
                        .unwrap();
                }
                if delta(e, cc) {
                    jet = jet
                        .sub(&scalar.mul(g2.get(&[b, d])).unwrap().scale(c))
                        .unwrap();
                }
                out.set(idx, jet);
            });
        }
        KKind::Conharmonic => {
            let c = 1.0 / (nf - 2.0);
            crate::tensor::for_each_index(n, 4, |idx| {
                let (b, cc, d, e) = (idx[0], idx[1], idx[2], idx[3]);
                let mut jet = r.get(idx).clone();
                if delta(e, b) {
                    jet = jet.add(&ric.get(&[cc, d]).scale(c)).unwrap();
                }
                if delta(e, cc) {
                    jet = jet.sub(&ric.get(&[b, d]).scale(c)).unwrap();
                }
                jet = jet
                    .add(&ricmix.get(&[b, e]).mul(g2.get(&[cc, d])).unwrap().scale(c))
                    .unwrap();
                jet = jet
                    .sub(&ricmix.get(&[cc, e]).mul(g2.get(&[b, d])).unwrap().scale(c))
                    .unwrap();
                out.set(idx, jet);
            });
        }
        KKind::QuasiConformal { a, b } => {
            let conc = k_jets(cp, KKind::Concircular)?;
            let conf = k_jets(cp, KKind::Conformal)?;
            let w = b * (nf - 2.0);
            crate::tensor::for_each_index(n, 4, |idx| {
                let jet = conc
                    .get(idx)
                    .scale(a - w)
                    .add(&conf.get(idx).scale(w))
                    .unwrap();
                out.set(idx, jet);
            });
        }
    }
    Ok(out)
}

/// How the divergence is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivMode {
    /// Differentiate the assembled K jet field and contract.
    Direct,
    /// Evaluate the closed-form expression in nabla R pieces.
    ClosedForm,
}

/// Divergence nabla_m K_{s1 s2 s3}^m, slots (s1, s2, s3).
pub fn k_divergence(cp: &CurvaturePoint, kind: KKind, mode: DivMode) -> Result<TensorValue> {
    kind.check_dim(cp.dim())?;
    match mode {
        DivMode::Direct => {
            let kj = k_jets(cp, kind)?;
            let nk = cp.jets().covariant_derivative(&kj)?;
            Ok(nk.contract(0, 4).value())
        }
        DivMode::ClosedForm => {
            let n = cp.dim() as f64;
            let div_r = &cp.div_riemann;
            let g = &cp.metric.g;
            let ns = &cp.nabla_scalar;
            // gradient wedge nabla_{s1} R g_{s2 s3} - nabla_{s2} R g_{s1 s3}
            let wedge = einsum("b,cd->bcd", &[ns, g]).sub(&einsum("c,bd->bcd", &[ns, g]));
            Ok(match kind {
                KKind::Projective => div_r.scale((n - 2.0) / (n - 1.0)),
                KKind::Conformal => div_r
                    .add(&wedge.scale(1.0 / (2.0 * (n - 1.0))))
                    .scale((n - 3.0) / (n - 2.0)),
                KKind::Concircular => div_r.add(&wedge.scale(1.0 / (n * (n - 1.0)))),
                KKind::Conharmonic => div_r
                    .scale((n - 3.0) / (n - 2.0))
                    .add(&wedge.scale(1.0 / (2.0 * (n - 2.0)))),
                KKind::QuasiConformal { a, b } => div_r.scale(a + b).add(
                    &wedge.scale((2.0 * a - b * (n - 1.0) * (n - 4.0)) / (2.0 * n * (n - 1.0))),
                ),
            })
        }
    }
}

/// Coefficients of the divergence decomposition
/// nabla_m K^m = A nabla_m R^m + B (nabla_{s1} R g_{s2 s3} - nabla_{s2} R g_{s1 s3}),
/// with the curvature scalar as potential and the metric as the (trivial)
/// Codazzi tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDivergenceForm {
    pub a: f64,
    pub b: f64,
}

pub fn k_divergence_form(kind: KKind, n: usize) -> Result<KDivergenceForm> {
    kind.check_dim(n)?;
    let nf = n as f64;
    Ok(match kind {
        KKind::Projective => KDivergenceForm {
            a: (nf - 2.0) / (nf - 1.0),
            b: 0.0,
        },
        KKind::Conformal => KDivergenceForm {
            a: (nf - 3.0) / (nf - 2.0),
            b: (nf - 3.0) / (2.0 * (nf - 1.0) * (nf - 2.0)),
        },
        KKind::Concircular => KDivergenceForm {
            a: 1.0,
            b: 1.0 / (nf * (nf - 1.0)),
        },
        KKind::Conharmonic => KDivergenceForm {
            a: (nf - 3.0) / (nf - 2.0),
            b: 1.0 / (2.0 * (nf - 2.0)),
        },
        KKind::QuasiConformal { a, b } => KDivergenceForm {
            a: a + b,
            b: (2.0 * a - b * (nf - 1.0) * (nf - 4.0)) / (2.0 * nf * (nf - 1.0)),
        },
    })
}

impl KDivergenceForm {
    /// Rebuild the divergence from the (A, B) pair and the point data.
    pub fn reconstruct(&self, cp: &CurvaturePoint) -> TensorValue {
        let g = &cp.metric.g;
        let ns = &cp.nabla_scalar;
        let wedge = einsum("b,cd->bcd", &[ns, g]).sub(&einsum("c,bd->bcd", &[ns, g]));
        cp.div_riemann.scale(self.a).add(&wedge.scale(self.b))
    }
}

/// The cyclic-derivative source tensor B_{abcd}^e evaluated two ways.
pub struct KBianchiCheck {
    /// Cyclic sum of the jet-differentiated K field.
    pub direct: TensorValue,
    /// Closed-form right-hand side.
    pub closed: TensorValue,
    /// Max-abs discrepancy between the two routes.
    pub discrepancy: f64,
}

/// B_{abcd}^e = nabla_a K_{bcd}^e + nabla_b K_{cad}^e + nabla_c K_{abd}^e,
/// with the closed-form source expression for comparison.
pub fn k_bianchi_b(cp: &CurvaturePoint, kind: KKind) -> Result<KBianchiCheck> {
    kind.check_dim(cp.dim())?;
    let kj = k_jets(cp, kind)?;
    let nk = cp.jets().covariant_derivative(&kj)?.value();
    let direct = nk.cyclic_sum(&[0, 1, 2])?;
    let closed = k_bianchi_closed(cp, kind)?;
    let discrepancy = direct.sub(&closed).max_abs();
    Ok(KBianchiCheck {
        direct,
        closed,
        discrepancy,
    })
}

fn k_bianchi_closed(cp: &CurvaturePoint, kind: KKind) -> Result<TensorValue> {
    let n = cp.dim();
    let nf = n as f64;
    let id = identity_tensor(n);
    let g = &cp.metric.g;
    let ns = &cp.nabla_scalar;
    let div_r = &cp.div_riemann;
    // delta^e_a nabla_p R_{bcd}^p, summed over the (a, b, c) cycle
    let delta_block = einsum("ea,bcd->abcde", &[&id, div_r]).cyclic_sum(&[0, 1, 2])?;
    // scalar wedge delta^e_a (nabla_c R g_bd - nabla_b R g_cd), cycled
    let scalar_block = {
        let t = einsum("ea,c,bd->abcde", &[&id, ns, g]).sub(&einsum("ea,b,cd->abcde", &[&id, ns, g]));
        t.cyclic_sum(&[0, 1, 2])?
    };
    // metric wedge g_cd (nabla_a Ric_b^e - nabla_b Ric_a^e), cycled
    let ric_block = || -> Result<TensorValue> {
        let nricmix = einsum("em,abm->abe", &[&cp.metric.g_inv, &cp.nabla_ricci]);
        let anti = nricmix.sub(&einsum("bae->abe", &[&nricmix]));
        einsum("cd,abe->abcde", &[g, &anti]).cyclic_sum(&[0, 1, 2])
    };
    Ok(match kind {
        KKind::Projective => delta_block.scale(1.0 / (nf - 1.0)),
        KKind::Conformal => delta_block
            .add(&ric_block()?)
            .scale(1.0 / (nf - 2.0))
            .sub(&scalar_block.scale(1.0 / ((nf - 1.0) * (nf - 2.0)))),
        KKind::Concircular => scalar_block.scale(1.0 / (nf * (nf - 1.0))),
        KKind::Conharmonic => delta_block.add(&ric_block()?).scale(1.0 / (nf - 2.0)),
        KKind::QuasiConformal { a, b } => {
            // from the definition W = a C~ + b(n-2)(C - C~)
            let conf = k_bianchi_closed(cp, KKind::Conformal)?;
            let conc = k_bianchi_closed(cp, KKind::Concircular)?;
            let w = b * (nf - 2.0);
            conc.scale(a - w).add(&conf.scale(w))
        }
    })
}

/// Divergence of the source tensor B per the closed forms: a multiple of
/// the cyclic sum of nabla nabla (div R), zero for the concircular kind.
pub fn k_div_b(cp: &CurvaturePoint, kind: KKind) -> Result<TensorValue> {
    let n = cp.dim();
    kind.check_dim(n)?;
    let nf = n as f64;
    let cyc = einsum("apbcdp->abcd", &[&cp.nabla2_riemann]).cyclic_sum(&[0, 1, 2])?;
    Ok(match kind {
        KKind::Projective => cyc.scale(1.0 / (nf - 1.0)),
        KKind::Conformal | KKind::Conharmonic => cyc.scale(1.0 / (nf - 2.0)),
        KKind::Concircular => TensorValue::zeros(n, &[Lo, Lo, Lo, Lo]),
        KKind::QuasiConformal { b, .. } => cyc.scale(-b),
    })
}
