//! Curvature at a point: Christoffel symbols with partials, the Riemann
//! tensor, Ricci and scalar curvature, and first/second covariant
//! derivatives of the Riemann tensor, all computed in jet arithmetic so the
//! values are exact to roundoff.
//!
//! Index conventions (fixed across the crate):
//!   - Riemann slots are (a, b, c; d) with the antisymmetric pair first:
//!     R_abc^d = d_b G^d_ac - d_a G^d_bc + G^d_bk G^k_ac - G^d_ak G^k_bc.
//!   - Ricci is the slot-1-with-upper contraction, Ric_ac = R_abc^b. The
//!     unit 2-sphere then carries Ric = +g and scalar curvature +2; the
//!     corpus tests pin these values to prevent convention drift.
//!   - Covariant-derivative slots prepend, so nabla2 slots are
//!     (f, e, a, b, c; d) for nabla_f nabla_e R_abc^d.
//!   - Commutators expand as [nabla_a, nabla_b] T = +R_abs^k T(..k..) per
//!     covariant slot s and -R_abk^s T(..k..) per contravariant slot.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::jets::Jet;
use crate::metric::MetricSpec;
use crate::tensor::{einsum, MetricAtPoint, TensorValue, Variance};

use Variance::{Contravariant as Up, Covariant as Lo};

/// Dense tensor of jets; the field-level counterpart of [`TensorValue`].
#[derive(Debug, Clone)]
pub struct JetTensor {
    dim: usize,
    valence: Vec<Variance>,
    comps: Vec<Jet>,
}

impl JetTensor {
    pub fn filled(dim: usize, valence: &[Variance], jet: Jet) -> JetTensor {
        let n = dim.pow(valence.len() as u32);
        JetTensor {
            dim,
            valence: valence.to_vec(),
            comps: vec![jet; n],
        }
    }

    pub fn zeros(dim: usize, valence: &[Variance], order: usize) -> Result<JetTensor> {
        Ok(JetTensor::filled(dim, valence, Jet::constant(dim, order, 0.0)?))
    }

    pub fn scalar(dim: usize, jet: Jet) -> JetTensor {
        JetTensor {
            dim,
            valence: Vec::new(),
            comps: vec![jet],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn valence(&self) -> &[Variance] {
        &self.valence
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    fn flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], jet: Jet) {
        let k = self.flat(idx);
        self.comps[k] = jet;
    }

    pub fn truncated(&self, order: usize) -> JetTensor {
        JetTensor {
            dim: self.dim,
            valence: self.valence.clone(),
            comps: self.comps.iter().map(|j| j.truncate(order)).collect(),
        }
    }

    /// Constant terms as a pointwise tensor.
    pub fn value(&self) -> TensorValue {
        let mut out = TensorValue::zeros(self.dim, &self.valence);
        let mut flat = 0;
        crate::tensor::for_each_index(self.dim, self.rank(), |idx| {
            out.set(idx, self.comps[flat].constant_term());
            flat += 1;
        });
        out
    }

    /// Trace over two slots (raw component sum; callers pair co/contra).
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> JetTensor {
        let rank = self.rank();
        assert!(slot_a != slot_b && slot_a < rank && slot_b < rank);
        let keep: Vec<usize> = (0..rank).filter(|s| *s != slot_a && *s != slot_b).collect();
        let valence: Vec<Variance> = keep.iter().map(|&s| self.valence[s]).collect();
        let mut out = JetTensor::zeros(self.dim, &valence, self.order()).unwrap();
        let mut full = vec![0usize; rank];
        let mut flat = 0;
        crate::tensor::for_each_index(self.dim, keep.len(), |idx| {
            for (pos, &s) in keep.iter().enumerate() {
                full[s] = idx[pos];
            }
            let mut sum = Jet::constant(self.dim, self.order(), 0.0).unwrap();
            for k in 0..self.dim {
                full[slot_a] = k;
                full[slot_b] = k;
                sum = sum.add(self.get(&full)).unwrap();
            }
            out.comps[flat] = sum;
            flat += 1;
        });
        out
    }
}

/// Gauss-Jordan inverse of a symmetric jet matrix, pivoting on constant
/// terms. The caller has already rejected singular constant parts.
fn invert_jet_matrix(g: &[Vec<Jet>]) -> Result<Vec<Vec<Jet>>> {
    let n = g.len();
    let dim = g[0][0].dim();
    let order = g[0][0].order();
    let mut a: Vec<Vec<Jet>> = g.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet::constant(dim, order, if i == j { 1.0 } else { 0.0 }).unwrap())
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r][col]
                    .constant_term()
                    .abs()
                    .total_cmp(&a[s][col].constant_term().abs())
            })
            .unwrap();
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot_inv = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j].mul(&pivot_inv)?;
            inv[col][j] = inv[col][j].mul(&pivot_inv)?;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col].clone();
            if factor.max_abs_coeff() == 0.0 {
                continue;
            }
            for j in 0..n {
                a[r][j] = a[r][j].sub(&factor.mul(&a[col][j])?)?;
                inv[r][j] = inv[r][j].sub(&factor.mul(&inv[col][j])?)?;
            }
        }
    }
    Ok(inv)
}

/// All curvature fields at one point, as jets. This is what identity
/// evaluators differentiate when they need a derivative beyond the
/// precomputed ones.
pub struct CurvatureJets {
    dim: usize,
    point: Vec<f64>,
    /// Metric components, order 4.
    pub g: JetTensor,
    /// Inverse metric, order 4.
    pub g_inv: JetTensor,
    /// Christoffel symbols with slots (d, b, c), order 3.
    pub gamma: JetTensor,
    /// Riemann tensor with slots (a, b, c; d), order 2.
    pub riemann: JetTensor,
    /// Ricci tensor, order 2.
    pub ricci: JetTensor,
    /// Scalar curvature, order 2.
    pub scalar: Jet,
}

impl CurvatureJets {
    pub fn new(spec: &MetricSpec, point: &[f64]) -> Result<CurvatureJets> {
        let dim = spec.dim();
        let g_mat = spec.eval(point, 4)?;

        let det = DMatrix::from_fn(dim, dim, |i, j| g_mat[i][j].constant_term()).determinant();
        if det.abs() <= 1e-12 {
            return Err(Error::SingularMetric(point.to_vec()));
        }
        let ginv_mat = invert_jet_matrix(&g_mat)?;

        let mut g = JetTensor::zeros(dim, &[Lo, Lo], 4)?;
        let mut g_inv = JetTensor::zeros(dim, &[Up, Up], 4)?;
        for i in 0..dim {
            for j in 0..dim {
                g.set(&[i, j], g_mat[i][j].clone());
                g_inv.set(&[i, j], ginv_mat[i][j].clone());
            }
        }

        // Christoffel: G^d_bc = 1/2 g^dk (d_b g_kc + d_c g_kb - d_k g_bc),
        // built for b <= c and mirrored so the symmetry is bit-exact.
        let mut gamma = JetTensor::zeros(dim, &[Up, Lo, Lo], 3)?;
        let ginv3: Vec<Vec<Jet>> = (0..dim)
            .map(|i| (0..dim).map(|j| ginv_mat[i][j].truncate(3)).collect())
            .collect();
        let dg = |k: usize, c: usize, b: usize| g_mat[k][c].partial(b);
        for b in 0..dim {
            for c in b..dim {
                for d in 0..dim {
                    let mut sum = Jet::constant(dim, 3, 0.0)?;
                    for k in 0..dim {
                        let bracket = dg(k, c, b).add(&dg(k, b, c))?.sub(&dg(b, c, k))?;
                        sum = sum.add(&ginv3[d][k].mul(&bracket)?)?;
                    }
                    let jet = sum.scale(0.5);
                    if b != c {
                        gamma.set(&[d, c, b], jet.clone());
                    }
                    gamma.set(&[d, b, c], jet);
                }
            }
        }

        // Riemann with the pair-antisymmetric construction
        // X(a,b;c,d) = d_b G^d_ac + G^d_bk G^k_ac, R = X(a,b) - X(b,a).
        let gamma2 = gamma.truncated(2);
        let mut riemann = JetTensor::zeros(dim, &[Lo, Lo, Lo, Up], 2)?;
        let x_part = |a: usize, b: usize, c: usize, d: usize| -> Result<Jet> {
            let mut sum = gamma.get(&[d, a, c]).partial(b);
            for k in 0..dim {
                sum = sum.add(&gamma2.get(&[d, b, k]).mul(gamma2.get(&[k, a, c]))?)?;
            }
            Ok(sum)
        };
        for a in 0..dim {
            for b in (a + 1)..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        let r = x_part(a, b, c, d)?.sub(&x_part(b, a, c, d)?)?;
                        riemann.set(&[b, a, c, d], r.neg());
                        riemann.set(&[a, b, c, d], r);
                    }
                }
            }
        }

        let ricci = riemann.contract(1, 3);
        let mut scalar = Jet::constant(dim, 2, 0.0)?;
        for a in 0..dim {
            for c in 0..dim {
                scalar = scalar.add(&ginv_mat[a][c].truncate(2).mul(ricci.get(&[a, c]))?)?;
            }
        }

        Ok(CurvatureJets {
            dim,
            point: point.to_vec(),
            g,
            g_inv,
            gamma,
            riemann,
            ricci,
            scalar,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    /// Covariant derivative of a jet-tensor field; the derivative slot is
    /// prepended and one order of differentiability is consumed.
    pub fn covariant_derivative(&self, t: &JetTensor) -> Result<JetTensor> {
        if t.order() == 0 {
            return Err(Error::OrderOutOfRange(0));
        }
        let ord = t.order() - 1;
        let gm = self.gamma.truncated(ord);
        let tt = t.truncated(ord);
        let rank = t.rank();
        let mut valence = vec![Lo];
        valence.extend_from_slice(&t.valence);
        let mut out = JetTensor::zeros(self.dim, &valence, ord)?;
        let mut src = vec![0usize; rank];
        let mut out_idx = vec![0usize; rank + 1];
        let dim = self.dim;
        let mut body = |idx: &[usize]| -> Result<()> {
            for e in 0..dim {
                let mut jet = t.get(idx).partial(e);
                for (s, v) in t.valence.iter().enumerate() {
                    src.copy_from_slice(idx);
                    match v {
                        Lo => {
                            for k in 0..dim {
                                src[s] = k;
                                let corr = gm.get(&[k, e, idx[s]]).mul(tt.get(&src))?;
                                jet = jet.sub(&corr)?;
                            }
                        }
                        Up => {
                            for k in 0..dim {
                                src[s] = k;
                                let corr = gm.get(&[idx[s], e, k]).mul(tt.get(&src))?;
                                jet = jet.add(&corr)?;
                            }
                        }
                    }
                }
                out_idx[0] = e;
                out_idx[1..].copy_from_slice(idx);
                out.set(&out_idx, jet);
            }
            Ok(())
        };
        let mut status = Ok(());
        crate::tensor::for_each_index(self.dim, rank, |idx| {
            if status.is_ok() {
                status = body(idx);
            }
        });
        status?;
        Ok(out)
    }

    pub fn metric_at_point(&self) -> MetricAtPoint {
        MetricAtPoint {
            g: self.g.value(),
            g_inv: self.g_inv.value(),
        }
    }
}

/// Christoffel symbols and their partials at a point.
///
/// Slots: `gamma` (d, b, c); `dgamma` (e, d, b, c) for d_e G^d_bc;
/// `ddgamma` (f, e, d, b, c) for d_f d_e G^d_bc.
#[derive(Debug, Clone)]
pub struct ConnectionJet {
    pub gamma: TensorValue,
    pub dgamma: TensorValue,
    pub ddgamma: TensorValue,
}

/// All curvature data at one point; the shared input of every identity
/// check.
pub struct CurvaturePoint {
    pub point: Vec<f64>,
    pub metric: MetricAtPoint,
    pub connection: ConnectionJet,
    /// R_abc^d, slots (a, b, c; d).
    pub riemann: TensorValue,
    /// Fully lowered R_abcd.
    pub riemann_low: TensorValue,
    pub ricci: TensorValue,
    pub scalar: f64,
    /// nabla_e R_abc^d, slots (e, a, b, c; d).
    pub nabla_riemann: TensorValue,
    /// nabla_f nabla_e R_abc^d, slots (f, e, a, b, c; d).
    pub nabla2_riemann: TensorValue,
    /// nabla_f nabla_e R_abcd (last slot lowered).
    pub nabla2_riemann_low: TensorValue,
    /// nabla_e Ric_ab, slots (e, a, b).
    pub nabla_ricci: TensorValue,
    /// nabla_e R (gradient of the curvature scalar).
    pub nabla_scalar: TensorValue,
    /// nabla_m R_abc^m, slots (a, b, c).
    pub div_riemann: TensorValue,
    jets: CurvatureJets,
}

impl CurvaturePoint {
    pub fn jets(&self) -> &CurvatureJets {
        &self.jets
    }

    pub fn dim(&self) -> usize {
        self.jets.dim
    }
}

/// Christoffel symbols (with partials to second order) at a point.
pub fn christoffel(spec: &MetricSpec, point: &[f64]) -> Result<ConnectionJet> {
    let cj = CurvatureJets::new(spec, point)?;
    Ok(connection_from_jets(&cj))
}

fn connection_from_jets(cj: &CurvatureJets) -> ConnectionJet {
    let dim = cj.dim;
    let gamma = cj.gamma.value();
    let mut dgamma = TensorValue::zeros(dim, &[Lo, Up, Lo, Lo]);
    let mut ddgamma = TensorValue::zeros(dim, &[Lo, Lo, Up, Lo, Lo]);
    crate::tensor::for_each_index(dim, 3, |dbc| {
        let jet = cj.gamma.get(dbc);
        for e in 0..dim {
            let mut m = vec![0usize; dim];
            m[e] += 1;
            dgamma.set(
                &[e, dbc[0], dbc[1], dbc[2]],
                jet.extract_partial(&m).unwrap(),
            );
            for f in 0..dim {
                let mut m2 = vec![0usize; dim];
                m2[e] += 1;
                m2[f] += 1;
                ddgamma.set(
                    &[f, e, dbc[0], dbc[1], dbc[2]],
                    jet.extract_partial(&m2).unwrap(),
                );
            }
        }
    });
    ConnectionJet {
        gamma,
        dgamma,
        ddgamma,
    }
}

/// Full curvature data at a point.
pub fn riemann_at(spec: &MetricSpec, point: &[f64]) -> Result<CurvaturePoint> {
    let jets = CurvatureJets::new(spec, point)?;
    let nabla_r_jets = jets.covariant_derivative(&jets.riemann)?;
    let nabla2_r_jets = jets.covariant_derivative(&nabla_r_jets)?;

    let metric = jets.metric_at_point();
    let connection = connection_from_jets(&jets);
    let riemann = jets.riemann.value();
    let ricci = jets.ricci.value();
    let scalar = jets.scalar.constant_term();
    let riemann_low = einsum("abce,ed->abcd", &[&riemann, &metric.g]);
    let nabla_riemann = nabla_r_jets.value();
    let nabla2_riemann = nabla2_r_jets.value();
    let nabla2_riemann_low = einsum("feabcx,xd->feabcd", &[&nabla2_riemann, &metric.g]);
    let nabla_ricci = einsum("eabcb->eac", &[&nabla_riemann]);
    let nabla_scalar = einsum("ac,eac->e", &[&metric.g_inv, &nabla_ricci]);
    let div_riemann = einsum("mabcm->abc", &[&nabla_riemann]);

    Ok(CurvaturePoint {
        point: point.to_vec(),
        metric,
        connection,
        riemann,
        riemann_low,
        ricci,
        scalar,
        nabla_riemann,
        nabla2_riemann,
        nabla2_riemann_low,
        nabla_ricci,
        nabla_scalar,
        div_riemann,
        jets,
    })
}

/// Covariant derivative of an arbitrary tensor field given as a jet
/// evaluator, to first or second order. Derivative slots prepend.
pub fn covariant_derivative(
    spec: &MetricSpec,
    point: &[f64],
    field: &dyn Fn(&CurvatureJets) -> Result<JetTensor>,
    order: usize,
) -> Result<TensorValue> {
    if order == 0 || order > 2 {
        return Err(Error::OrderOutOfRange(order));
    }
    let cj = CurvatureJets::new(spec, point)?;
    let mut t = field(&cj)?;
    for _ in 0..order {
        t = cj.covariant_derivative(&t)?;
    }
    Ok(t.value())
}

/// Action of the derivative commutator [nabla_a, nabla_b] on a tensor,
/// assembled from curvature alone (no differentiation): +R_abs^k per
/// covariant slot, -R_abk^s per contravariant slot. Two covariant slots are
/// prepended.
pub fn commutator_action(cp: &CurvaturePoint, t: &TensorValue) -> TensorValue {
    let dim = cp.dim();
    let rank = t.rank();
    let mut valence = vec![Lo, Lo];
    valence.extend_from_slice(t.valence());
    let mut out = TensorValue::zeros(dim, &valence);
    let r = &cp.riemann;
    let mut src = vec![0usize; rank];
    let mut out_idx = vec![0usize; rank + 2];
    crate::tensor::for_each_index(dim, rank, |idx| {
        for a in 0..dim {
            for b in 0..dim {
                let mut sum = 0.0;
                for (s, v) in t.valence().iter().enumerate() {
                    src.copy_from_slice(idx);
                    for k in 0..dim {
                        src[s] = k;
                        match v {
                            Lo => sum += r.get(&[a, b, idx[s], k]) * t.get(&src),
                            Up => sum -= r.get(&[a, b, k, idx[s]]) * t.get(&src),
                        }
                    }
                }
                out_idx[0] = a;
                out_idx[1] = b;
                out_idx[2..].copy_from_slice(idx);
                out.set(&out_idx, sum);
            }
        }
    });
    out
}

/// The divergence of the Riemann tensor both ways: by contracting the
/// stored nabla R, and as the contracted-Bianchi combination
/// nabla_b Ric_ac - nabla_a Ric_bc. The two must agree.
pub fn riemann_divergence(cp: &CurvaturePoint) -> (TensorValue, TensorValue) {
    let direct = cp.div_riemann.clone();
    let nric = &cp.nabla_ricci;
    let bianchi = einsum("bac->abc", &[nric]).sub(nric);
    (direct, bianchi)
}
