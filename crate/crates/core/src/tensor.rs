//! Dense pointwise tensors with explicit valence, plus the index gymnastics
//! the identity evaluators lean on: contraction, raising/lowering, cyclic
//! sums, (anti)symmetrization, and a small einsum over named slots.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// Dense tensor value at a point. Components are stored row-major, the last
/// slot varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    valence: Vec<Variance>,
    components: Vec<f64>,
}

/// Walk all index tuples of the given rank.
pub(crate) fn for_each_index(dim: usize, rank: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; rank];
    loop {
        f(&idx);
        let mut k = rank;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dim {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl TensorValue {
    pub fn zeros(dim: usize, valence: &[Variance]) -> TensorValue {
        TensorValue {
            dim,
            valence: valence.to_vec(),
            components: vec![0.0; dim.pow(valence.len() as u32)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> TensorValue {
        TensorValue {
            dim,
            valence: Vec::new(),
            components: vec![value],
        }
    }

    pub fn from_fn(
        dim: usize,
        valence: &[Variance],
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> TensorValue {
        let mut t = TensorValue::zeros(dim, valence);
        let mut flat = 0;
        for_each_index(dim, valence.len(), |idx| {
            t.components[flat] = f(idx);
            flat += 1;
        });
        t
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

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.components[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.flat_index(idx);
        self.components[k] = v;
    }

    pub fn add(&self, other: &TensorValue) -> TensorValue {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.valence, other.valence);
        TensorValue {
            dim: self.dim,
            valence: self.valence.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorValue) -> TensorValue {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.valence, other.valence);
        TensorValue {
            dim: self.dim,
            valence: self.valence.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> TensorValue {
        TensorValue {
            dim: self.dim,
            valence: self.valence.clone(),
            components: self.components.iter().map(|a| a * s).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Maximum absolute component and where it sits.
    pub fn argmax_abs(&self) -> (f64, Vec<usize>) {
        let mut best = 0.0;
        let mut at = 0;
        for (k, c) in self.components.iter().enumerate() {
            if c.abs() > best {
                best = c.abs();
                at = k;
            }
        }
        let mut idx = vec![0; self.rank()];
        let mut rem = at;
        for slot in (0..self.rank()).rev() {
            idx[slot] = rem % self.dim;
            rem /= self.dim;
        }
        (best, idx)
    }

    /// Frobenius inner product over the flattened components.
    pub fn dot(&self, other: &TensorValue) -> f64 {
        assert_eq!(self.components.len(), other.components.len());
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Trace over one covariant and one contravariant slot.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<TensorValue> {
        let rank = self.rank();
        for s in [slot_a, slot_b] {
            if s >= rank {
                return Err(Error::SlotOutOfRange { slot: s, rank });
            }
        }
        if slot_a == slot_b {
            return Err(Error::VarianceMismatch("cannot contract a slot with itself".into()));
        }
        if self.valence[slot_a] == self.valence[slot_b] {
            return Err(Error::VarianceMismatch(
                "contraction needs one covariant and one contravariant slot (raise or lower first)"
                    .into(),
            ));
        }
        let keep: Vec<usize> = (0..rank).filter(|s| *s != slot_a && *s != slot_b).collect();
        let out_valence: Vec<Variance> = keep.iter().map(|&s| self.valence[s]).collect();
        let mut out = TensorValue::zeros(self.dim, &out_valence);
        let mut full = vec![0usize; rank];
        let mut flat = 0;
        for_each_index(self.dim, keep.len(), |idx| {
            for (pos, &s) in keep.iter().enumerate() {
                full[s] = idx[pos];
            }
            let mut sum = 0.0;
            for k in 0..self.dim {
                full[slot_a] = k;
                full[slot_b] = k;
                sum += self.get(&full);
            }
            out.components[flat] = sum;
            flat += 1;
        });
        Ok(out)
    }

    /// Flip one slot's variance by contracting with the metric or its inverse.
    pub fn raise_lower(&self, slot: usize, m: &MetricAtPoint) -> Result<TensorValue> {
        if slot >= self.rank() {
            return Err(Error::SlotOutOfRange {
                slot,
                rank: self.rank(),
            });
        }
        let metric = match self.valence[slot] {
            Variance::Covariant => &m.g_inv,
            Variance::Contravariant => &m.g,
        };
        let mut valence = self.valence.clone();
        valence[slot] = match self.valence[slot] {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        };
        let mut out = TensorValue::zeros(self.dim, &valence);
        let rank = self.rank();
        let mut full = vec![0usize; rank];
        let mut flat = 0;
        for_each_index(self.dim, rank, |idx| {
            full.copy_from_slice(idx);
            let mut sum = 0.0;
            for k in 0..self.dim {
                full[slot] = k;
                sum += metric.get(&[idx[slot], k]) * self.get(&full);
            }
            out.components[flat] = sum;
            flat += 1;
        });
        Ok(out)
    }

    /// Sum over cyclic rotations of the listed slots (3 or 4 of them), other
    /// slots fixed: out(idx) = sum_k t(idx with the listed slots rotated k
    /// places), matching K_(abc) = K_abc + K_bca + K_cab.
    pub fn cyclic_sum(&self, slots: &[usize]) -> Result<TensorValue> {
        if slots.len() != 3 && slots.len() != 4 {
            return Err(Error::BadCycleLength(slots.len()));
        }
        self.check_slots_same_variance(slots)?;
        let rank = self.rank();
        let mut out = TensorValue::zeros(self.dim, &self.valence);
        let mut src = vec![0usize; rank];
        let mut flat = 0;
        for_each_index(self.dim, rank, |idx| {
            let mut sum = 0.0;
            for rot in 0..slots.len() {
                src.copy_from_slice(idx);
                for (pos, &s) in slots.iter().enumerate() {
                    // slot s of the source takes the value from the slot
                    // `rot` places further along the cycle
                    src[s] = idx[slots[(pos + rot) % slots.len()]];
                }
                sum += self.get(&src);
            }
            out.components[flat] = sum;
            flat += 1;
        });
        Ok(out)
    }

    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<TensorValue> {
        self.sym_impl(slots, true)
    }

    pub fn symmetrize(&self, slots: &[usize]) -> Result<TensorValue> {
        self.sym_impl(slots, false)
    }

    fn sym_impl(&self, slots: &[usize], signed: bool) -> Result<TensorValue> {
        self.check_slots_same_variance(slots)?;
        let rank = self.rank();
        let perms = permutations(slots.len());
        let norm = 1.0 / perms.len() as f64;
        let mut out = TensorValue::zeros(self.dim, &self.valence);
        let mut src = vec![0usize; rank];
        let mut flat = 0;
        for_each_index(self.dim, rank, |idx| {
            let mut sum = 0.0;
            for (perm, sign) in &perms {
                src.copy_from_slice(idx);
                for (pos, &s) in slots.iter().enumerate() {
                    src[s] = idx[slots[perm[pos]]];
                }
                let term = self.get(&src);
                sum += if signed && *sign < 0 { -term } else { term };
            }
            out.components[flat] = sum * norm;
            flat += 1;
        });
        Ok(out)
    }

    fn check_slots_same_variance(&self, slots: &[usize]) -> Result<()> {
        for &s in slots {
            if s >= self.rank() {
                return Err(Error::SlotOutOfRange {
                    slot: s,
                    rank: self.rank(),
                });
            }
        }
        if slots.windows(2).any(|w| self.valence[w[0]] != self.valence[w[1]]) {
            return Err(Error::VarianceMismatch(
                "listed slots must share variance".into(),
            ));
        }
        Ok(())
    }
}

/// All permutations of 0..n with parity, n <= 4.
fn permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    assert!(n <= 4, "permutation helper covers ranks up to 4");
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn rec(items: &mut Vec<usize>, k: usize, sign: i8, out: &mut Vec<(Vec<usize>, i8)>) {
        if k == items.len() {
            out.push((items.clone(), sign));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            let s = if i == k { sign } else { -sign };
            rec(items, k + 1, s, out);
            items.swap(k, i);
        }
    }
    rec(&mut items, 0, 1, &mut out);
    out
}

/// Metric and inverse at a point, for raising and lowering.
#[derive(Debug, Clone)]
pub struct MetricAtPoint {
    pub g: TensorValue,
    pub g_inv: TensorValue,
}

/// The generalized Kronecker delta with slots (d, a, c, b) and components
/// delta^a_b delta^d_c - delta^a_c delta^d_b.
pub fn gen_kronecker(dim: usize) -> TensorValue {
    use Variance::{Contravariant as Up, Covariant as Lo};
    TensorValue::from_fn(dim, &[Up, Up, Lo, Lo], |idx| {
        let (d, a, c, b) = (idx[0], idx[1], idx[2], idx[3]);
        let kron = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        kron(a, b) * kron(d, c) - kron(a, c) * kron(d, b)
    })
}

/// Tiny einsum over up to a handful of operands, e.g.
/// `einsum("am,bcem->abce", &[&ricci, &riemann])`. All operands share the
/// same dimension; labels absent from the output are summed. This works on
/// raw components; variance bookkeeping is taken from the first occurrence
/// of each output label, and contractions against the metric must be written
/// explicitly as operands.
pub fn einsum(spec: &str, ops: &[&TensorValue]) -> TensorValue {
    let (lhs, out_labels) = spec.split_once("->").expect("einsum spec needs `->`");
    let in_specs: Vec<&str> = lhs.split(',').collect();
    assert_eq!(in_specs.len(), ops.len(), "operand count mismatch in `{spec}`");
    let dim = ops.first().map(|t| t.dim()).unwrap_or(0);
    for (s, t) in in_specs.iter().zip(ops) {
        assert_eq!(s.len(), t.rank(), "rank mismatch for `{s}` in `{spec}`");
        assert_eq!(t.dim(), dim, "dimension mismatch in `{spec}`");
    }
    let out_chars: Vec<char> = out_labels.chars().collect();
    let mut axes: Vec<char> = out_chars.clone();
    for s in &in_specs {
        for c in s.chars() {
            if !axes.contains(&c) {
                axes.push(c);
            }
        }
    }
    // slot positions per operand in axis space
    let op_axes: Vec<Vec<usize>> = in_specs
        .iter()
        .map(|s| {
            s.chars()
                .map(|c| axes.iter().position(|&a| a == c).unwrap())
                .collect()
        })
        .collect();
    let out_valence: Vec<Variance> = out_chars
        .iter()
        .map(|&c| {
            for (s, t) in in_specs.iter().zip(ops) {
                if let Some(pos) = s.chars().position(|x| x == c) {
                    return t.valence()[pos];
                }
            }
            panic!("output label `{c}` missing from inputs in `{spec}`")
        })
        .collect();
    let mut out = TensorValue::zeros(dim, &out_valence);
    let n_out = out_chars.len();
    let mut op_idx: Vec<Vec<usize>> = in_specs.iter().map(|s| vec![0usize; s.len()]).collect();
    for_each_index(dim, axes.len(), |vals| {
        let mut prod = 1.0;
        for (k, t) in ops.iter().enumerate() {
            for (slot, &axis) in op_axes[k].iter().enumerate() {
                op_idx[k][slot] = vals[axis];
            }
            prod *= t.get(&op_idx[k]);
            if prod == 0.0 {
                break;
            }
        }
        if prod != 0.0 {
            let flat = vals[..n_out]
                .iter()
                .fold(0usize, |acc, &i| acc * dim + i);
            out.components[flat] += prod;
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::{Contravariant as Up, Covariant as Lo};

    fn mixed_identity(dim: usize) -> TensorValue {
        TensorValue::from_fn(dim, &[Lo, Up], |idx| if idx[0] == idx[1] { 1.0 } else { 0.0 })
    }

    #[test]
    fn contract_identity_gives_dimension() {
        let t = mixed_identity(4);
        let s = t.contract(0, 1).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.get(&[]), 4.0);
    }

    #[test]
    fn contract_requires_opposite_variance() {
        let t = TensorValue::zeros(3, &[Lo, Lo]);
        assert!(matches!(
            t.contract(0, 1),
            Err(Error::VarianceMismatch(_))
        ));
        assert!(t.contract(0, 5).is_err());
    }

    #[test]
    fn raise_lower_flat_metric_is_bit_identical() {
        let g = TensorValue::from_fn(3, &[Lo, Lo], |i| if i[0] == i[1] { 1.0 } else { 0.0 });
        let m = MetricAtPoint {
            g_inv: TensorValue::from_fn(3, &[Up, Up], |i| if i[0] == i[1] { 1.0 } else { 0.0 }),
            g,
        };
        let t = TensorValue::from_fn(3, &[Lo, Lo, Lo], |i| {
            (i[0] * 9 + i[1] * 3 + i[2]) as f64 * 0.37
        });
        let r = t.raise_lower(1, &m).unwrap();
        assert_eq!(r.valence()[1], Up);
        assert_eq!(r.components(), t.components());
    }

    #[test]
    fn raise_then_lower_round_trips() {
        let g = TensorValue::from_fn(2, &[Lo, Lo], |i| match (i[0], i[1]) {
            (0, 0) => 2.0,
            (1, 1) => 3.0,
            _ => 0.5,
        });
        let g_inv = {
            let det = 2.0 * 3.0 - 0.25;
            TensorValue::from_fn(2, &[Up, Up], |i| match (i[0], i[1]) {
                (0, 0) => 3.0 / det,
                (1, 1) => 2.0 / det,
                _ => -0.5 / det,
            })
        };
        let m = MetricAtPoint { g, g_inv };
        let t = TensorValue::from_fn(2, &[Lo, Lo], |i| (1 + i[0] * 2 + i[1]) as f64);
        let back = t
            .raise_lower(0, &m)
            .unwrap()
            .raise_lower(0, &m)
            .unwrap();
        for (a, b) in back.components().iter().zip(t.components()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_application_order_is_irrelevant() {
        // contracting two covariant slots after raising either one
        let g = TensorValue::from_fn(2, &[Lo, Lo], |i| match (i[0], i[1]) {
            (0, 0) => 2.0,
            (1, 1) => 3.0,
            _ => 0.5,
        });
        let g_inv = {
            let det = 5.75;
            TensorValue::from_fn(2, &[Up, Up], |i| match (i[0], i[1]) {
                (0, 0) => 3.0 / det,
                (1, 1) => 2.0 / det,
                _ => -0.5 / det,
            })
        };
        let m = MetricAtPoint { g, g_inv };
        let t = TensorValue::from_fn(2, &[Lo, Lo, Lo], |i| {
            (i[0] as f64) * 1.3 - (i[1] as f64) * 0.7 + (i[2] as f64) * 0.2 + 0.4
        });
        let a = t.raise_lower(0, &m).unwrap().contract(0, 1).unwrap();
        let b = t.raise_lower(1, &m).unwrap().contract(1, 0).unwrap();
        for (x, y) in a.components().iter().zip(b.components()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn cyclic_sum_of_antisymmetric_pair_is_three_times_alternation() {
        let t = TensorValue::from_fn(3, &[Lo, Lo, Lo], |i| {
            // antisymmetric in the first two slots
            let v = (i[0] as f64) - (i[1] as f64) + 0.3 * (i[2] as f64) * ((i[0] + i[1]) as f64);
            if i[0] == i[1] {
                0.0
            } else if i[0] < i[1] {
                v
            } else {
                -((i[1] as f64) - (i[0] as f64) + 0.3 * (i[2] as f64) * ((i[0] + i[1]) as f64))
            }
        });
        // enforce exact antisymmetry first
        let t = t.antisymmetrize(&[0, 1]).unwrap();
        let cyc = t.cyclic_sum(&[0, 1, 2]).unwrap();
        let alt = t.antisymmetrize(&[0, 1, 2]).unwrap().scale(3.0);
        for (a, b) in cyc.components().iter().zip(alt.components()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cyclic_sum_of_symmetric_tensor_is_three_times_it() {
        let t = TensorValue::from_fn(2, &[Lo, Lo, Lo], |i| {
            ((i[0] + i[1] + i[2]) as f64).powi(2)
        });
        let cyc = t.cyclic_sum(&[0, 1, 2]).unwrap();
        for (a, b) in cyc.components().iter().zip(t.components()) {
            assert!((a - 3.0 * b).abs() < 1e-14);
        }
    }

    #[test]
    fn cyclic_sum_twice_over_four_slots_is_four_times_once() {
        let t = TensorValue::from_fn(2, &[Lo, Lo, Lo, Lo], |i| {
            (i[0] * 8 + i[1] * 4 + i[2] * 2 + i[3]) as f64 * 0.21 + 1.0
        });
        let once = t.cyclic_sum(&[0, 1, 2, 3]).unwrap();
        let twice = once.cyclic_sum(&[0, 1, 2, 3]).unwrap();
        for (a, b) in twice.components().iter().zip(once.components()) {
            assert!((a - 4.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn antisymmetrize_kills_symmetric_pairs_and_is_idempotent() {
        let t = TensorValue::from_fn(3, &[Lo, Lo], |i| ((i[0] + i[1]) as f64).exp());
        let anti = t.antisymmetrize(&[0, 1]).unwrap();
        assert!(anti.max_abs() < 1e-15);

        let t = TensorValue::from_fn(3, &[Lo, Lo, Lo], |i| {
            (i[0] as f64) * 2.0 + (i[1] as f64) * 0.5 - (i[2] as f64)
        });
        let once = t.antisymmetrize(&[0, 2]).unwrap();
        let twice = once.antisymmetrize(&[0, 2]).unwrap();
        for (a, b) in twice.components().iter().zip(once.components()) {
            assert!((a - b).abs() < 1e-15);
        }
        // untouched slot ordering preserved
        assert_eq!(once.valence()[1], Lo);
    }

    #[test]
    fn symmetrize_preserves_symmetric_input() {
        let t = TensorValue::from_fn(2, &[Lo, Lo], |i| ((i[0] * i[1]) as f64) + 1.0);
        let s = t.symmetrize(&[0, 1]).unwrap();
        for (a, b) in s.components().iter().zip(t.components()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn gen_kronecker_components() {
        let d2 = gen_kronecker(2);
        // slots (d, a, c, b): component d=0, a=1, c=0, b=1 -> 1
        assert_eq!(d2.get(&[0, 1, 0, 1]), 1.0);
        // antisymmetry under d <-> a
        for_each_index(2, 4, |i| {
            let swapped = [i[1], i[0], i[2], i[3]];
            assert_eq!(d2.get(i), -d2.get(&swapped));
        });
        // trace over (a, b) gives (dim - 1) * identity on (d, c)
        for dim in 2..=4 {
            let t = gen_kronecker(dim).contract(1, 3).unwrap();
            for_each_index(dim, 2, |i| {
                let expect = if i[0] == i[1] { (dim - 1) as f64 } else { 0.0 };
                assert_eq!(t.get(i), expect);
            });
        }
    }

    #[test]
    fn einsum_matches_hand_contractions() {
        let a = TensorValue::from_fn(3, &[Lo, Up], |i| (i[0] * 3 + i[1]) as f64 + 0.5);
        let b = TensorValue::from_fn(3, &[Lo, Up], |i| (i[0] as f64) - 2.0 * (i[1] as f64));
        // matrix product
        let ab = einsum("ak,kb->ab", &[&a, &b]);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a.get(&[i, k]) * b.get(&[k, j]);
                }
                assert!((ab.get(&[i, j]) - s).abs() < 1e-14);
            }
        }
        // trace
        let tr = einsum("aa->", &[&a]);
        assert!((tr.get(&[]) - (a.get(&[0, 0]) + a.get(&[1, 1]) + a.get(&[2, 2]))).abs() < 1e-14);
        // transpose keeps data
        let at = einsum("ab->ba", &[&a]);
        assert_eq!(at.get(&[2, 1]), a.get(&[1, 2]));
        assert_eq!(at.valence()[0], Up);
    }
}
