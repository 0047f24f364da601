//! Systematic polar codes with successive cancellation list decoding.
//!
//! Codewords are `x = u F^{⊗n}` with `F = [[1, 0], [1, 1]]` in natural
//! (non bit-reversed) order, so the first half of `u` sees the check-node
//! combination of the two halves of the channel and the second half sees the
//! variable-node combination. LLRs follow `log P(0)/P(1)`.

use crate::Bit;
use thiserror::Error;

/// Decoder input magnitude bound.
pub const LLR_CLIP: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PolarError {
    #[error("length {0} is not a power of two")]
    NonPowerOfTwoLength(usize),
    #[error("dimension {k} outside 0..={n}")]
    InvalidDimension { k: usize, n: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("list size must be in 1..=64")]
    InvalidListSize,
    #[error("information set is not closed under binary domination")]
    NotDominationContiguous,
}

/// Reliability construction for the synthetic channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReliabilityDesign {
    /// Bhattacharyya parameters of a binary erasure channel, `Z -> (2Z - Z^2, Z^2)`.
    Bhattacharyya { erasure_prob: f64 },
    /// Polarization weight `sum_j b_j beta^j` over the index bits.
    BetaExpansion { beta: f64 },
}

impl Default for ReliabilityDesign {
    fn default() -> Self {
        ReliabilityDesign::Bhattacharyya { erasure_prob: 0.5 }
    }
}

/// In-place Arıkan transform. `bits.len()` must be a power of two.
pub fn transform_in_place(bits: &mut [Bit]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x ^= *y;
            }
        }
        half *= 2;
    }
}

/// `u F^{⊗n}` over GF(2). The transform is its own inverse.
pub fn polar_transform(u: &[Bit]) -> Result<Vec<Bit>, PolarError> {
    if !u.len().is_power_of_two() {
        return Err(PolarError::NonPowerOfTwoLength(u.len()));
    }
    let mut x = u.to_vec();
    transform_in_place(&mut x);
    Ok(x)
}

/// Synthetic-channel indices ordered from least to most reliable.
/// Ties are broken by ascending index.
pub fn build_reliability_order(
    n: usize,
    design: ReliabilityDesign,
) -> Result<Vec<usize>, PolarError> {
    if !n.is_power_of_two() {
        return Err(PolarError::NonPowerOfTwoLength(n));
    }
    let levels = n.trailing_zeros();
    let mut order: Vec<usize> = (0..n).collect();
    match design {
        ReliabilityDesign::Bhattacharyya { erasure_prob } => {
            // (ln Z, ln(1 - Z)) so neither end of the range loses precision
            let mut logs = vec![(erasure_prob.ln(), (-erasure_prob).ln_1p())];
            for _ in 0..levels {
                let mut next = Vec::with_capacity(2 * logs.len());
                for &(lz, l1z) in &logs {
                    // 2Z - Z^2 = 1 - (1 - Z)^2
                    next.push((lz + l1z.exp().ln_1p(), 2.0 * l1z));
                    // Z^2, with 1 - Z^2 = (1 - Z)(1 + Z)
                    next.push((2.0 * lz, l1z + lz.exp().ln_1p()));
                }
                logs = next;
            }
            let logit: Vec<f64> = logs.iter().map(|&(lz, l1z)| lz - l1z).collect();
            order.sort_by(|&a, &b| logit[b].total_cmp(&logit[a]).then(a.cmp(&b)));
        }
        ReliabilityDesign::BetaExpansion { beta } => {
            let weight = |i: usize| -> f64 {
                (0..levels)
                    .filter(|&j| i >> j & 1 == 1)
                    .map(|j| beta.powi(j as i32))
                    .sum()
            };
            let w: Vec<f64> = (0..n).map(weight).collect();
            order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
        }
    }
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    /// Every leaf below is frozen.
    Frozen,
    /// Every leaf below carries information.
    Free,
}

/// Maximal uniform subtree visited as one unit by the list decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Node {
    depth: usize,
    first: usize,
    kind: NodeKind,
}

fn build_schedule(frozen: &[bool], depth: usize, first: usize, out: &mut Vec<Node>) {
    let len = frozen.len() >> depth;
    let span = &frozen[first..first + len];
    if span.iter().all(|&f| f) {
        out.push(Node {
            depth,
            first,
            kind: NodeKind::Frozen,
        });
    } else if span.iter().all(|&f| !f) {
        out.push(Node {
            depth,
            first,
            kind: NodeKind::Free,
        });
    } else {
        build_schedule(frozen, depth + 1, first, out);
        build_schedule(frozen, depth + 1, first + len / 2, out);
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    metric: f64,
    src: usize,
    flips: u64,
}

impl Candidate {
    fn cmp(a: &Self, b: &Self) -> std::cmp::Ordering {
        a.metric
            .total_cmp(&b.metric)
            .then(a.src.cmp(&b.src))
            .then(a.flips.cmp(&b.flips))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarCode {
    n: usize,
    k: usize,
    reliability_order: Vec<usize>,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    schedule: Vec<Node>,
}

impl PolarCode {
    pub fn new(n: usize, k: usize, design: ReliabilityDesign) -> Result<Self, PolarError> {
        let order = build_reliability_order(n, design)?;
        Self::from_order(order, k)
    }

    /// Uses the `k` last (most reliable) entries of `order` as the information set.
    pub fn from_order(order: Vec<usize>, k: usize) -> Result<Self, PolarError> {
        let n = order.len();
        if !n.is_power_of_two() {
            return Err(PolarError::NonPowerOfTwoLength(n));
        }
        if k > n {
            return Err(PolarError::InvalidDimension { k, n });
        }
        let mut info_set = order[n - k..].to_vec();
        info_set.sort_unstable();
        let mut frozen = vec![true; n];
        for &i in &info_set {
            frozen[i] = false;
        }
        let mut schedule = Vec::new();
        build_schedule(&frozen, 0, 0, &mut schedule);
        let code = Self {
            n,
            k,
            reliability_order: order,
            info_set,
            frozen,
            schedule,
        };
        // every binary supermask of an information index must carry
        // information too, which makes the double-transform encoder systematic
        let full = n - 1;
        let closed = code.info_set.iter().all(|&i| {
            let mut j = i;
            loop {
                if code.frozen[j] {
                    return false;
                }
                if j == full {
                    return true;
                }
                j = (j + 1) | i;
            }
        });
        if !closed {
            return Err(PolarError::NotDominationContiguous);
        }
        Ok(code)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn reliability_order(&self) -> &[usize] {
        &self.reliability_order
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    /// Systematic encoding: `info` appears at the information-set coordinates of
    /// the codeword and the frozen `u` coordinates are zero.
    pub fn systematic_encode(&self, info: &[Bit]) -> Result<Vec<Bit>, PolarError> {
        if info.len() != self.k {
            return Err(PolarError::LengthMismatch {
                expected: self.k,
                got: info.len(),
            });
        }
        let mut x = vec![0; self.n];
        self.encode_into(info, &mut x);
        Ok(x)
    }

    pub(crate) fn encode_into(&self, info: &[Bit], x: &mut [Bit]) {
        x.fill(0);
        for (&i, &b) in self.info_set.iter().zip(info) {
            x[i] = b;
        }
        transform_in_place(x);
        for (v, &f) in x.iter_mut().zip(&self.frozen) {
            if f {
                *v = 0;
            }
        }
        transform_in_place(x);
    }

    /// True when the inverse transform of `x` is zero on every frozen index.
    pub fn is_codeword(&self, x: &[Bit]) -> bool {
        if x.len() != self.n {
            return false;
        }
        let mut u = x.to_vec();
        transform_in_place(&mut u);
        u.iter().zip(&self.frozen).all(|(&b, &f)| !f || b == 0)
    }

    pub fn extract_info(&self, x: &[Bit]) -> Vec<Bit> {
        self.info_set.iter().map(|&i| x[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SclResult {
    pub codeword: Vec<Bit>,
    pub info: Vec<Bit>,
    /// Accumulated `|LLR|` of every decision that disagreed with its LLR sign.
    pub path_metric: f64,
}

#[inline]
fn check_node(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) ^ (b < 0.0) {
        -m
    } else {
        m
    }
}

#[inline]
fn penalty(llr: f64, bit: Bit) -> f64 {
    if (llr < 0.0) != (bit == 1) {
        llr.abs()
    } else {
        0.0
    }
}

/// Reusable SCL workspace for one code length and list size.
///
/// Per-depth LLR and partial-sum arrays are shared between paths and only
/// reallocated when a shared array is about to be written.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    n: usize,
    levels: usize,
    list_size: usize,
    channel: Vec<f64>,
    /// `llr[d]` holds `list_size` arrays of `n >> d` values, `d` in `1..=levels`.
    llr: Vec<Vec<f64>>,
    llr_refs: Vec<Vec<u32>>,
    llr_free: Vec<Vec<usize>>,
    /// Codeword of the last completed left child at each depth.
    bits: Vec<Vec<Bit>>,
    bit_refs: Vec<Vec<u32>>,
    bit_free: Vec<Vec<usize>>,
    /// `[path][depth]` array indices.
    path_llr: Vec<Vec<usize>>,
    path_bits: Vec<Vec<usize>>,
    metric: Vec<f64>,
    active: Vec<bool>,
    free_paths: Vec<usize>,
    finals: Vec<Vec<Bit>>,
    scratch: [Vec<Bit>; 2],
}

impl SclDecoder {
    pub fn new(n: usize, list_size: usize) -> Result<Self, PolarError> {
        if !n.is_power_of_two() {
            return Err(PolarError::NonPowerOfTwoLength(n));
        }
        // flip sets of a candidate are tracked in a u64
        if list_size == 0 || list_size > 64 {
            return Err(PolarError::InvalidListSize);
        }
        let levels = n.trailing_zeros() as usize;
        let l = list_size;
        let mut llr = vec![Vec::new()];
        let mut bits = vec![Vec::new()];
        for d in 1..=levels {
            llr.push(vec![0.0; l * (n >> d)]);
            bits.push(vec![0; l * (n >> d)]);
        }
        Ok(Self {
            n,
            levels,
            list_size: l,
            channel: vec![0.0; n],
            llr,
            llr_refs: vec![vec![0; l]; levels + 1],
            llr_free: vec![Vec::new(); levels + 1],
            bits,
            bit_refs: vec![vec![0; l]; levels + 1],
            bit_free: vec![Vec::new(); levels + 1],
            path_llr: vec![vec![0; levels + 1]; l],
            path_bits: vec![vec![0; levels + 1]; l],
            metric: vec![0.0; l],
            active: vec![false; l],
            free_paths: Vec::new(),
            finals: vec![vec![0; n]; l],
            scratch: [vec![0; n], vec![0; n]],
        })
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn decode(&mut self, code: &PolarCode, llrs: &[f64]) -> Result<SclResult, PolarError> {
        self.run(code, llrs, None)
    }

    /// Metric accumulated by the single path that follows the given codeword.
    pub fn codeword_metric(
        &mut self,
        code: &PolarCode,
        llrs: &[f64],
        codeword: &[Bit],
    ) -> Result<f64, PolarError> {
        if codeword.len() != self.n {
            return Err(PolarError::LengthMismatch {
                expected: self.n,
                got: codeword.len(),
            });
        }
        let mut u = codeword.to_vec();
        transform_in_place(&mut u);
        Ok(self.run(code, llrs, Some(&u))?.path_metric)
    }

    fn reset(&mut self) {
        for d in 1..=self.levels {
            self.llr_refs[d].fill(0);
            self.bit_refs[d].fill(0);
            self.llr_free[d].clear();
            self.llr_free[d].extend((0..self.list_size).rev());
            self.bit_free[d].clear();
            self.bit_free[d].extend((0..self.list_size).rev());
        }
        self.active.fill(false);
        self.free_paths.clear();
        self.free_paths.extend((0..self.list_size).rev());
    }

    fn spawn_root(&mut self) -> usize {
        let p = self.free_paths.pop().expect("free path");
        self.active[p] = true;
        self.metric[p] = 0.0;
        for d in 1..=self.levels {
            let a = self.llr_free[d].pop().expect("free llr array");
            self.llr_refs[d][a] = 1;
            self.path_llr[p][d] = a;
            let b = self.bit_free[d].pop().expect("free bit array");
            self.bit_refs[d][b] = 1;
            self.path_bits[p][d] = b;
        }
        p
    }

    fn kill(&mut self, p: usize) {
        self.active[p] = false;
        for d in 1..=self.levels {
            let a = self.path_llr[p][d];
            self.llr_refs[d][a] -= 1;
            if self.llr_refs[d][a] == 0 {
                self.llr_free[d].push(a);
            }
            let b = self.path_bits[p][d];
            self.bit_refs[d][b] -= 1;
            if self.bit_refs[d][b] == 0 {
                self.bit_free[d].push(b);
            }
        }
        self.free_paths.push(p);
    }

    fn clone_path(&mut self, p: usize) -> usize {
        let q = self.free_paths.pop().expect("free path");
        self.active[q] = true;
        self.metric[q] = self.metric[p];
        for d in 1..=self.levels {
            let a = self.path_llr[p][d];
            self.path_llr[q][d] = a;
            self.llr_refs[d][a] += 1;
            let b = self.path_bits[p][d];
            self.path_bits[q][d] = b;
            self.bit_refs[d][b] += 1;
        }
        q
    }

    /// Array index of path `p` at depth `d`, detached from other paths.
    fn own_llr(&mut self, p: usize, d: usize) -> usize {
        let a = self.path_llr[p][d];
        if self.llr_refs[d][a] == 1 {
            return a;
        }
        self.llr_refs[d][a] -= 1;
        let fresh = self.llr_free[d].pop().expect("free llr array");
        self.llr_refs[d][fresh] = 1;
        self.path_llr[p][d] = fresh;
        fresh
    }

    fn own_bits(&mut self, p: usize, d: usize) -> usize {
        let b = self.path_bits[p][d];
        if self.bit_refs[d][b] == 1 {
            return b;
        }
        self.bit_refs[d][b] -= 1;
        let fresh = self.bit_free[d].pop().expect("free bit array");
        self.bit_refs[d][fresh] = 1;
        self.path_bits[p][d] = fresh;
        fresh
    }

    /// Computes the LLRs of the node at depth `d` whose first leaf is `phase`.
    fn node_llr(&mut self, p: usize, phase: usize, d: usize) {
        let levels = self.levels;
        let n = self.n;
        let start = if phase == 0 {
            1
        } else {
            // right child of the common ancestor with the previous leaf
            let r = levels - phase.trailing_zeros() as usize;
            let len = n >> r;
            let dst = self.own_llr(p, r);
            let left = self.path_bits[p][r];
            let (lo, hi) = self.llr.split_at_mut(r);
            let parent: &[f64] = if r == 1 {
                &self.channel
            } else {
                let a = self.path_llr[p][r - 1];
                &lo[r - 1][a * 2 * len..(a + 1) * 2 * len]
            };
            let out = &mut hi[0][dst * len..(dst + 1) * len];
            let u = &self.bits[r][left * len..(left + 1) * len];
            let (pa, pb) = parent.split_at(len);
            for i in 0..len {
                out[i] = if u[i] == 0 {
                    pb[i] + pa[i]
                } else {
                    pb[i] - pa[i]
                };
            }
            r + 1
        };
        for dd in start..=d {
            let len = n >> dd;
            let dst = self.own_llr(p, dd);
            let (lo, hi) = self.llr.split_at_mut(dd);
            let parent: &[f64] = if dd == 1 {
                &self.channel
            } else {
                let a = self.path_llr[p][dd - 1];
                &lo[dd - 1][a * 2 * len..(a + 1) * 2 * len]
            };
            let out = &mut hi[0][dst * len..(dst + 1) * len];
            let (pa, pb) = parent.split_at(len);
            for i in 0..len {
                out[i] = check_node(pa[i], pb[i]);
            }
        }
    }

    fn node_values(&self, p: usize, d: usize) -> &[f64] {
        let len = self.n >> d;
        let a = self.path_llr[p][d];
        &self.llr[d][a * len..(a + 1) * len]
    }

    /// Stores the decided codeword of the node at depth `d` (first leaf
    /// `phase`) and folds completed right children into their parents.
    fn commit(&mut self, p: usize, phase: usize, d: usize, word: &[Bit]) {
        let levels = self.levels;
        let mut len = word.len();
        let mut d = d;
        if phase >> (levels - d) & 1 == 0 {
            let b = self.own_bits(p, d);
            self.bits[d][b * len..(b + 1) * len].copy_from_slice(word);
            return;
        }
        let [cur, next] = &mut self.scratch;
        cur[..len].copy_from_slice(word);
        loop {
            // cur is the right child at depth d
            let left = self.path_bits[p][d];
            let lbits = &self.bits[d][left * len..(left + 1) * len];
            for i in 0..len {
                next[i] = lbits[i] ^ cur[i];
                next[len + i] = cur[i];
            }
            std::mem::swap(cur, next);
            len *= 2;
            d -= 1;
            if d == 0 {
                self.finals[p].copy_from_slice(&cur[..len]);
                return;
            }
            if phase >> (levels - d) & 1 == 0 {
                break;
            }
        }
        let dst = self.own_bits(p, d);
        self.bits[d][dst * len..(dst + 1) * len].copy_from_slice(&self.scratch[0][..len]);
    }

    fn run(
        &mut self,
        code: &PolarCode,
        llrs: &[f64],
        forced_u: Option<&[Bit]>,
    ) -> Result<SclResult, PolarError> {
        if code.len() != self.n {
            return Err(PolarError::LengthMismatch {
                expected: self.n,
                got: code.len(),
            });
        }
        if llrs.len() != self.n {
            return Err(PolarError::LengthMismatch {
                expected: self.n,
                got: llrs.len(),
            });
        }
        for (c, &v) in self.channel.iter_mut().zip(llrs) {
            *c = v.clamp(-LLR_CLIP, LLR_CLIP);
        }
        self.reset();
        let root = self.spawn_root();
        if self.levels == 0 {
            let lam = self.channel[0];
            let u = match forced_u {
                Some(f) => f[0],
                None if code.is_frozen(0) => 0,
                None => (lam < 0.0) as Bit,
            };
            self.finals[root][0] = u;
            self.metric[root] = penalty(lam, u);
            return Ok(self.result(code, root));
        }

        // forced decoding walks every leaf so that the metric is the plain
        // successive-cancellation one
        let leaf_schedule;
        let schedule: &[Node] = match forced_u {
            Some(_) => {
                leaf_schedule = (0..self.n)
                    .map(|i| Node {
                        depth: self.levels,
                        first: i,
                        kind: if code.is_frozen(i) {
                            NodeKind::Frozen
                        } else {
                            NodeKind::Free
                        },
                    })
                    .collect::<Vec<_>>();
                &leaf_schedule
            }
            None => &code.schedule,
        };

        let l = self.list_size;
        let mut order: Vec<usize> = Vec::with_capacity(l);
        let mut cands: Vec<Candidate> = Vec::with_capacity(2 * l);
        let mut grown: Vec<Candidate> = Vec::with_capacity(2 * l);
        let mut words: Vec<Vec<Bit>> = vec![vec![0; self.n]; l];
        let mut owner: Vec<Option<usize>> = vec![None; l];
        let mut weak: Vec<usize> = Vec::with_capacity(self.n);
        let mut weak_sets: Vec<Vec<usize>> = vec![Vec::with_capacity(l); l];
        let zero_word = vec![0 as Bit; self.n];

        for node in schedule {
            let d = node.depth;
            let len = self.n >> d;
            order.clear();
            order.extend((0..l).filter(|&p| self.active[p]));
            for &p in &order {
                self.node_llr(p, node.first, d);
            }
            if let Some(f) = forced_u {
                // leaf schedule: len == 1
                let u = f[node.first];
                for &p in &order {
                    let lam = self.node_values(p, d)[0];
                    self.metric[p] += penalty(lam, u);
                    self.commit(p, node.first, d, &[u]);
                }
                continue;
            }
            match node.kind {
                NodeKind::Frozen => {
                    for &p in &order {
                        let pen: f64 = self
                            .node_values(p, d)
                            .iter()
                            .filter(|v| **v < 0.0)
                            .map(|v| -v)
                            .sum();
                        self.metric[p] += pen;
                        self.commit(p, node.first, d, &zero_word[..len]);
                    }
                }
                NodeKind::Free => {
                    // candidates carry a bitmask over the weakest positions of their source path
                    let splits = (l - 1).min(len);
                    cands.clear();
                    for &p in &order {
                        cands.push(Candidate {
                            metric: self.metric[p],
                            src: p,
                            flips: 0,
                        });
                    }
                    for &p in &order {
                        let vals = self.node_values(p, d);
                        weak.clear();
                        weak.extend(0..len);
                        if splits < len {
                            weak.select_nth_unstable_by(splits, |&a, &b| {
                                vals[a].abs().total_cmp(&vals[b].abs()).then(a.cmp(&b))
                            });
                        }
                        weak.truncate(splits);
                        weak.sort_by(|&a, &b| {
                            vals[a].abs().total_cmp(&vals[b].abs()).then(a.cmp(&b))
                        });
                        weak_sets[p].clear();
                        weak_sets[p].extend_from_slice(&weak);
                    }
                    for s in 0..splits {
                        grown.clear();
                        for c in &cands {
                            let pos = weak_sets[c.src][s];
                            let mag = self.node_values(c.src, d)[pos].abs();
                            grown.push(*c);
                            grown.push(Candidate {
                                metric: c.metric + mag,
                                src: c.src,
                                flips: c.flips | 1 << s,
                            });
                        }
                        if grown.len() > l {
                            grown.select_nth_unstable_by(l - 1, Candidate::cmp);
                            grown.truncate(l);
                        }
                        std::mem::swap(&mut cands, &mut grown);
                    }
                    cands.sort_by(Candidate::cmp);
                    for (slot, c) in cands.iter().enumerate() {
                        let vals = self.node_values(c.src, d);
                        let w = &mut words[slot][..len];
                        for (b, &v) in w.iter_mut().zip(vals) {
                            *b = (v < 0.0) as Bit;
                        }
                        for (s, &pos) in weak_sets[c.src].iter().enumerate() {
                            if c.flips >> s & 1 == 1 {
                                w[pos] ^= 1;
                            }
                        }
                    }
                    for &p in &order {
                        if !cands.iter().any(|c| c.src == p) {
                            self.kill(p);
                        }
                    }
                    owner.fill(None);
                    for slot in 0..cands.len() {
                        let src = cands[slot].src;
                        let p = if cands[..slot].iter().any(|c| c.src == src) {
                            self.clone_path(src)
                        } else {
                            src
                        };
                        owner[slot] = Some(p);
                        self.metric[p] = cands[slot].metric;
                    }
                    for slot in 0..cands.len() {
                        let p = owner[slot].expect("assigned above");
                        let word = std::mem::take(&mut words[slot]);
                        self.commit(p, node.first, d, &word[..len]);
                        words[slot] = word;
                    }
                }
            }
        }

        let best = (0..l)
            .filter(|&p| self.active[p])
            .min_by(|&a, &b| self.metric[a].total_cmp(&self.metric[b]).then(a.cmp(&b)))
            .expect("at least one surviving path");
        Ok(self.result(code, best))
    }

    fn result(&self, code: &PolarCode, p: usize) -> SclResult {
        let codeword = self.finals[p].clone();
        let info = code.extract_info(&codeword);
        SclResult {
            codeword,
            info,
            path_metric: self.metric[p],
        }
    }
}

/// One-shot SCL decoding; allocates a fresh workspace.
pub fn scl_decode(
    code: &PolarCode,
    llrs: &[f64],
    list_size: usize,
) -> Result<SclResult, PolarError> {
    SclDecoder::new(code.len(), list_size)?.decode(code, llrs)
}
