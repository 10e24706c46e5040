//! Representation numbers `r(T, Q) = #{G ∈ ℤ^{r×n} : ᵗG Q G = T}`.
//!
//! Every index is first reduced to a positive definite key (see
//! [`super::reduce`]); keys are counted once per form and memoised.
//!
//! * rank 1: the size of a norm shell;
//! * rank 2: the inner-product distribution between two shells;
//! * rank ≥ 3: backtracking where each later column holds a bitset of the
//!   still-admissible vectors of its shell, narrowed by one inner-product
//!   filter per fixed column. Filters come from precomputed pair tables when
//!   those fit in memory and from a scan over the surviving bits otherwise.
//!
//! Both halves of every shell are related by negation, and the solution set
//! is closed under `G ↦ −G`; the counters use this to halve the work.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::Rational64;

use super::expansion::Expansion;
use super::index::{enumerate_indices, FourierIndex};
use super::reduce::{reduce, ReducedKey};
use crate::enumeration::{self, constrained_filter};
use crate::par::{self, Budget, Execution};
use crate::qforms::{verify_even_unimodular, QuadraticForm};
use crate::{Error, Result};

const CHUNK: usize = 64;
const PAIR_BLOCK: usize = 2048;

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Maximum work per top-level call, in visited candidate vectors.
    pub budget: u64,
    pub execution: Execution,
    /// Largest shell that may be materialised.
    pub shell_limit: usize,
    /// Largest pair table, in 64-bit words.
    pub table_limit: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            budget: 1_000_000_000_000,
            execution: Execution::default(),
            shell_limit: 4_000_000,
            table_limit: 8 << 20,
        }
    }
}

struct Shell {
    rank: usize,
    len: usize,
    coords: Vec<i16>,
    /// `Q·v` for every shell vector `v`.
    dual: Vec<i16>,
}

impl Shell {
    fn build(q: &QuadraticForm, s: &enumeration::NormShell) -> Result<Self> {
        let r = q.rank();
        let mut coords = Vec::with_capacity(s.len() * r);
        let mut dual = Vec::with_capacity(s.len() * r);
        for i in 0..s.len() {
            let row = s.row(i);
            coords.extend_from_slice(row);
            for a in 0..r {
                let v: i64 = (0..r).map(|b| q.entry(a, b) * row[b] as i64).sum();
                dual.push(i16::try_from(v).map_err(|_| Error::Overflow)?);
            }
        }
        Ok(Self {
            rank: r,
            len: s.len(),
            coords,
            dual,
        })
    }

    fn row(&self, i: usize) -> &[i16] {
        &self.coords[i * self.rank..(i + 1) * self.rank]
    }

    fn dual_row(&self, i: usize) -> &[i16] {
        &self.dual[i * self.rank..(i + 1) * self.rank]
    }

    fn words(&self) -> usize {
        self.len.div_ceil(64)
    }
}

#[inline]
fn dot(a: &[i16], b: &[i16]) -> i32 {
    a.iter().zip(b).map(|(&x, &y)| x as i32 * y as i32).sum()
}

/// Adds `|⟨x, y_j⟩|` for `j ∈ start..start + acc.len()` to `hist`, reading
/// the duals of the `y_j` from the column-major `dual_t`.
fn pair_kernel(x: &[i16], dual_t: &[i16], stride: usize, start: usize, acc: &mut [i16], hist: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the feature was detected at run time.
        unsafe { pair_kernel_avx2(x, dual_t, stride, start, acc, hist) };
        return;
    }
    pair_kernel_body(x, dual_t, stride, start, acc, hist);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn pair_kernel_avx2(x: &[i16], dual_t: &[i16], stride: usize, start: usize, acc: &mut [i16], hist: &mut [u64]) {
    pair_kernel_body(x, dual_t, stride, start, acc, hist);
}

#[inline(always)]
fn pair_kernel_body(x: &[i16], dual_t: &[i16], stride: usize, start: usize, acc: &mut [i16], hist: &mut [u64]) {
    let len = acc.len();
    acc.fill(0);
    for (a, &xa) in x.iter().enumerate() {
        if xa != 0 {
            let col = &dual_t[a * stride + start..a * stride + start + len];
            for (s, &d) in acc.iter_mut().zip(col) {
                *s = s.wrapping_add(xa.wrapping_mul(d));
            }
        }
    }
    // hist[c] counts |⟨x, y⟩| = c; the zero bin is what remains.
    let mut rest = len as u64;
    for (c, h) in hist.iter_mut().enumerate().skip(1) {
        let n = acc
            .iter()
            .map(|&v| (v.wrapping_abs() == c as i16) as u16)
            .fold(0u16, u16::wrapping_add) as u64;
        *h += n;
        rest -= n;
    }
    hist[0] += rest;
}

fn isqrt(v: i64) -> i64 {
    let mut r = (v.max(0) as f64).sqrt() as i64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Row `(x, c)` is the bitset of target-shell vectors `y` with `x·Q·y = c`.
struct PairTable {
    cmax: i64,
    ncv: usize,
    words: usize,
    bits: Vec<u64>,
}

impl PairTable {
    fn row(&self, x: usize, c: i64) -> Option<&[u64]> {
        if c.abs() > self.cmax {
            return None;
        }
        let start = (x * self.ncv + (c + self.cmax) as usize) * self.words;
        Some(&self.bits[start..start + self.words])
    }
}

struct FormData {
    form: QuadraticForm,
    shells: Mutex<HashMap<i64, Arc<Shell>>>,
    norm_counts: Mutex<HashMap<i64, u64>>,
    dists: Mutex<HashMap<(i64, i64), Arc<Vec<u64>>>>,
    tables: Mutex<HashMap<(i64, i64), Option<Arc<PairTable>>>>,
    memo: Mutex<HashMap<ReducedKey, u64>>,
}

/// Counting engine with per-form caches of shells, distributions and counts.
pub struct Engine {
    config: EngineConfig,
    forms: Mutex<HashMap<(usize, Vec<i64>), Arc<FormData>>>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Self {
        Self {
            config,
            forms: Mutex::new(HashMap::new()),
        }
    }

    /// Process-wide engine with the default configuration.
    pub fn global() -> &'static Engine {
        static GLOBAL: OnceLock<Engine> = OnceLock::new();
        GLOBAL.get_or_init(|| Engine::new(EngineConfig::default()))
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn data(&self, q: &QuadraticForm) -> Arc<FormData> {
        let key = (q.rank(), q.gram().to_vec());
        let mut forms = self.forms.lock().expect("engine lock");
        forms
            .entry(key)
            .or_insert_with(|| {
                Arc::new(FormData {
                    form: q.clone(),
                    shells: Mutex::default(),
                    norm_counts: Mutex::default(),
                    dists: Mutex::default(),
                    tables: Mutex::default(),
                    memo: Mutex::default(),
                })
            })
            .clone()
    }

    /// `r(T, Q)`.
    pub fn representation_count(&self, q: &QuadraticForm, t: &FourierIndex) -> Result<BigInt> {
        let budget = Budget::new(self.config.budget);
        let fd = self.data(q);
        let key = reduce(t.matrix(), t.genus());
        Ok(BigInt::from(self.count_key(&fd, &key, &budget)?))
    }

    /// Truncated theta series `θ_{Q,n}`: every index of trace at most
    /// `trace_bound`, weight `rank/2`, constant term 1.
    pub fn theta_expansion(
        &self,
        q: &QuadraticForm,
        genus: usize,
        trace_bound: i64,
    ) -> Result<Expansion> {
        let report = verify_even_unimodular(q);
        if !report.passed() {
            return Err(Error::InvalidForm(report.to_string()));
        }
        let weight = Rational64::new(q.rank() as i64, 2);
        let indices = enumerate_indices(genus, trace_bound);
        let keys: Vec<ReducedKey> = indices
            .iter()
            .map(|t| reduce(t.matrix(), t.genus()))
            .collect();
        let mut unique: Vec<&ReducedKey> = keys.iter().collect::<BTreeSet<_>>().into_iter().collect();
        unique.sort_by_key(|k| (k.k, k.diagonal().iter().sum::<i64>()));
        let budget = Budget::new(self.config.budget);
        let fd = self.data(q);
        let mut counts = HashMap::new();
        for key in unique {
            counts.insert(key.clone(), self.count_key(&fd, key, &budget)?);
        }
        let coeffs = indices
            .into_iter()
            .zip(&keys)
            .map(|(t, k)| (t, BigInt::from(counts[k])))
            .collect();
        Expansion::new(genus, weight, trace_bound, q.label(), coeffs)
    }

    fn count_key(&self, fd: &FormData, key: &ReducedKey, budget: &Budget) -> Result<u64> {
        if let Some(&c) = fd.memo.lock().expect("memo lock").get(key) {
            return Ok(c);
        }
        let count = match key.k {
            0 => 1,
            1 => self.norm_count(fd, key.t[0], budget)?,
            2 => {
                let (a, b, c) = (key.entry(0, 0), key.entry(1, 1), key.entry(0, 1));
                let dist = self.pair_distribution(fd, a, b, budget)?;
                let cmax = isqrt(a * b);
                if c.abs() > cmax {
                    0
                } else {
                    dist[(c + cmax) as usize]
                }
            }
            _ => self.backtrack(fd, key, budget)?,
        };
        fd.memo.lock().expect("memo lock").insert(key.clone(), count);
        Ok(count)
    }

    fn norm_count(&self, fd: &FormData, m: i64, budget: &Budget) -> Result<u64> {
        if let Some(s) = fd.shells.lock().expect("shell lock").get(&m) {
            return Ok(s.len as u64);
        }
        if let Some(&c) = fd.norm_counts.lock().expect("count lock").get(&m) {
            return Ok(c);
        }
        let c = enumeration::count_by_norm_with(&fd.form, m, self.config.execution, budget)?;
        fd.norm_counts.lock().expect("count lock").insert(m, c);
        Ok(c)
    }

    fn shell(&self, fd: &FormData, m: i64, budget: &Budget) -> Result<Arc<Shell>> {
        if let Some(s) = fd.shells.lock().expect("shell lock").get(&m) {
            return Ok(s.clone());
        }
        let size = self.norm_count(fd, m, budget)?;
        if size > self.config.shell_limit as u64 {
            return Err(Error::ShellTooLarge {
                norm: m,
                size,
                limit: self.config.shell_limit,
            });
        }
        let raw = enumeration::vectors_of_norm_with(&fd.form, m, self.config.execution, budget)?;
        let shell = Arc::new(Shell::build(&fd.form, &raw)?);
        fd.shells.lock().expect("shell lock").insert(m, shell.clone());
        Ok(shell)
    }

    /// `dist[c + cmax] = #{(x, y) ∈ S_a × S_b : ᵗx Q y = c}`.
    fn pair_distribution(
        &self,
        fd: &FormData,
        a: i64,
        b: i64,
        budget: &Budget,
    ) -> Result<Arc<Vec<u64>>> {
        if let Some(d) = fd.dists.lock().expect("dist lock").get(&(a, b)) {
            return Ok(d.clone());
        }
        let sa = self.shell(fd, a, budget)?;
        let sb = self.shell(fd, b, budget)?;
        let cmax = isqrt(a * b);
        let width = (2 * cmax + 1) as usize;
        // Rows i and len−1−i are negatives of each other.
        let half = sa.len / 2;
        let chunks = half.div_ceil(CHUNK);
        // Column-major duals of `sb`, so one row of `sa` against a block of
        // `sb` is a run of lane-wise multiply-adds. Sums wrap in i16; the
        // true values lie in [−cmax, cmax], so the wrapped ones are exact.
        let r = sb.rank;
        let mut dual_t = vec![0i16; r * sb.len];
        for j in 0..sb.len {
            for (a, &v) in sb.dual_row(j).iter().enumerate() {
                dual_t[a * sb.len + j] = v;
            }
        }
        let parts = par::try_map(self.config.execution, &(0..chunks).collect::<Vec<_>>(), |&ch| {
            let lo = ch * CHUNK;
            let hi = (lo + CHUNK).min(half);
            budget.charge(((hi - lo) * sb.len) as u64)?;
            let mut hist = vec![0u64; cmax as usize + 1];
            let mut acc = vec![0i16; PAIR_BLOCK];
            for start in (0..sb.len).step_by(PAIR_BLOCK) {
                let len = PAIR_BLOCK.min(sb.len - start);
                let acc = &mut acc[..len];
                for i in lo..hi {
                    pair_kernel(sa.row(i), &dual_t, sb.len, start, acc, &mut hist);
                }
            }
            Ok::<_, Error>(hist)
        })?;
        let mut dist = vec![0u64; width];
        for h in parts {
            for (c, v) in h.into_iter().enumerate() {
                dist[cmax as usize + c] += v;
                dist[cmax as usize - c] += v;
            }
        }
        let dist = Arc::new(dist);
        fd.dists.lock().expect("dist lock").insert((a, b), dist.clone());
        Ok(dist)
    }

    fn pair_table(
        &self,
        fd: &FormData,
        a: i64,
        d: i64,
        budget: &Budget,
    ) -> Result<Option<Arc<PairTable>>> {
        if let Some(t) = fd.tables.lock().expect("table lock").get(&(a, d)) {
            return Ok(t.clone());
        }
        let sa = self.shell(fd, a, budget)?;
        let sd = self.shell(fd, d, budget)?;
        let cmax = isqrt(a * d);
        let ncv = (2 * cmax + 1) as usize;
        let words = sd.words();
        let size = sa.len as u128 * ncv as u128 * words as u128;
        let table = if size > self.config.table_limit as u128 {
            None
        } else {
            let chunks = sa.len.div_ceil(CHUNK);
            let parts =
                par::try_map(self.config.execution, &(0..chunks).collect::<Vec<_>>(), |&ch| {
                    let lo = ch * CHUNK;
                    let hi = (lo + CHUNK).min(sa.len);
                    budget.charge(((hi - lo) * sd.len) as u64)?;
                    let mut bits = vec![0u64; (hi - lo) * ncv * words];
                    for i in lo..hi {
                        let x = sa.row(i);
                        for j in 0..sd.len {
                            let c = dot(x, sd.dual_row(j)) as i64;
                            let w = ((i - lo) * ncv + (c + cmax) as usize) * words + j / 64;
                            bits[w] |= 1u64 << (j % 64);
                        }
                    }
                    Ok::<_, Error>(bits)
                })?;
            Some(Arc::new(PairTable {
                cmax,
                ncv,
                words,
                bits: parts.concat(),
            }))
        };
        fd.tables
            .lock()
            .expect("table lock")
            .insert((a, d), table.clone());
        Ok(table)
    }

    fn backtrack(&self, fd: &FormData, key: &ReducedKey, budget: &Budget) -> Result<u64> {
        let k = key.k;
        let diag = key.diagonal();
        let shells: Vec<Arc<Shell>> = diag
            .iter()
            .map(|&d| self.shell(fd, d, budget))
            .collect::<Result<_>>()?;
        if shells.iter().any(|s| s.len == 0) {
            return Ok(0);
        }
        let mut tables: Vec<Vec<Option<Arc<PairTable>>>> = vec![vec![None; k]; k];
        for j in 0..k {
            for l in j + 1..k {
                tables[j][l] = self.pair_table(fd, diag[j], diag[l], budget)?;
            }
        }
        let ctx = Backtrack {
            key,
            shells: &shells,
            tables: &tables,
        };
        let half = shells[0].len / 2;
        let chunks = half.div_ceil(CHUNK);
        let total = par::try_sum_range(
            self.config.execution,
            0..chunks,
            || Error::Overflow,
            |ch| {
                let lo = ch * CHUNK;
                let hi = (lo + CHUNK).min(half);
                let mut scratch = ctx.scratch();
                let mut nodes = 0u64;
                let mut count = 0u64;
                for i0 in lo..hi {
                    count += ctx.start_at(i0, &mut scratch, &mut nodes);
                }
                budget.charge(nodes)?;
                Ok(count)
            },
        )?;
        total.checked_mul(2).ok_or(Error::Overflow)
    }
}

struct Backtrack<'a> {
    key: &'a ReducedKey,
    shells: &'a [Arc<Shell>],
    tables: &'a [Vec<Option<Arc<PairTable>>>],
}

/// `sets[m][l]` is the candidate bitset of column `l` once columns `0..=m`
/// are fixed.
struct Scratch {
    sets: Vec<Vec<Vec<u64>>>,
    chosen: Vec<usize>,
}

impl Backtrack<'_> {
    fn k(&self) -> usize {
        self.key.k
    }

    fn scratch(&self) -> Scratch {
        let k = self.k();
        Scratch {
            sets: (0..k)
                .map(|_| self.shells.iter().map(|s| vec![0u64; s.words()]).collect())
                .collect(),
            chosen: vec![0; k],
        }
    }

    /// `out = input ∩ {y ∈ S_l : x_j·Q·y = t_jl}` where `x_j` is row `xi` of
    /// column `j`'s shell. Returns whether `out` is nonempty.
    fn refine(&self, out: &mut [u64], input: Option<&[u64]>, j: usize, xi: usize, l: usize, nodes: &mut u64) -> bool {
        let c = self.key.entry(j, l);
        let target = &self.shells[l];
        if let Some(table) = &self.tables[j][l] {
            let Some(row) = table.row(xi, c) else {
                out.fill(0);
                return false;
            };
            *nodes += row.len() as u64;
            let mut any = 0u64;
            match input {
                Some(inp) => {
                    for w in 0..out.len() {
                        out[w] = inp[w] & row[w];
                        any |= out[w];
                    }
                }
                None => {
                    out.copy_from_slice(row);
                    any = row.iter().fold(0, |a, &w| a | w);
                }
            }
            return any != 0;
        }
        let x = self.shells[j].row(xi);
        let c = c as i32;
        let mut any = false;
        for w in 0..out.len() {
            let mut bits = match input {
                Some(inp) => inp[w],
                None => {
                    let rem = target.len - w * 64;
                    if rem >= 64 {
                        u64::MAX
                    } else {
                        (1u64 << rem) - 1
                    }
                }
            };
            let mut kept = 0u64;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                *nodes += 1;
                if dot(x, target.dual_row(w * 64 + b)) == c {
                    kept |= 1u64 << b;
                }
            }
            out[w] = kept;
            any |= kept != 0;
        }
        any
    }

    fn start_at(&self, i0: usize, s: &mut Scratch, nodes: &mut u64) -> u64 {
        let k = self.k();
        *nodes += 1;
        s.chosen[0] = i0;
        let mut level = std::mem::take(&mut s.sets[0]);
        for l in 1..k {
            if !self.refine(&mut level[l], None, 0, i0, l, nodes) {
                s.sets[0] = level;
                return 0;
            }
        }
        s.sets[0] = level;
        self.descend(1, s, nodes)
    }

    /// Columns `0..m` are fixed; `s.sets[m − 1]` holds the candidates.
    fn descend(&self, m: usize, s: &mut Scratch, nodes: &mut u64) -> u64 {
        let k = self.k();
        if m == k - 1 {
            return s.sets[m - 1][m].iter().map(|w| w.count_ones() as u64).sum();
        }
        let mut count = 0u64;
        let cand = s.sets[m - 1][m].clone();
        for (w, &word) in cand.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let xi = w * 64 + b;
                *nodes += 1;
                s.chosen[m] = xi;
                if m + 1 == k - 1 {
                    count += self.fused_last(m, xi, &s.sets[m - 1][k - 1], nodes);
                    continue;
                }
                let (before, after) = s.sets.split_at_mut(m);
                let prev = &before[m - 1];
                let next = &mut after[0];
                let mut alive = true;
                for l in m + 1..k {
                    if !self.refine(&mut next[l], Some(&prev[l]), m, xi, l, nodes) {
                        alive = false;
                        break;
                    }
                }
                if alive {
                    count += self.descend(m + 1, s, nodes);
                }
            }
        }
        count
    }

    /// `|input ∩ {y : x_m·Q·y = t_{m,k−1}}|` without materialising the set.
    fn fused_last(&self, m: usize, xi: usize, input: &[u64], nodes: &mut u64) -> u64 {
        let l = self.k() - 1;
        let c = self.key.entry(m, l);
        if let Some(table) = &self.tables[m][l] {
            *nodes += input.len() as u64;
            return match table.row(xi, c) {
                Some(row) => input
                    .iter()
                    .zip(row)
                    .map(|(a, b)| (a & b).count_ones() as u64)
                    .sum(),
                None => 0,
            };
        }
        let x = self.shells[m].row(xi);
        let target = &self.shells[l];
        let mut count = 0u64;
        for (w, &word) in input.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                *nodes += 1;
                if dot(x, target.dual_row(w * 64 + b)) == c as i32 {
                    count += 1;
                }
            }
        }
        count
    }
}

/// `r(T, Q)` through the shared engine.
pub fn representation_count(q: &QuadraticForm, t: &FourierIndex) -> Result<BigInt> {
    Engine::global().representation_count(q, t)
}

/// `θ_{Q,n}` up to trace `trace_bound` through the shared engine.
pub fn theta_expansion(q: &QuadraticForm, genus: usize, trace_bound: i64) -> Result<Expansion> {
    Engine::global().theta_expansion(q, genus, trace_bound)
}

/// `r(T, Q)` by plain column-by-column extension, without reduction or
/// memoisation: columns in descending diagonal order, each one the set of
/// shell vectors with the prescribed inner products against the columns
/// already fixed. Exponential; meant for small cross-checks.
pub fn representation_count_direct(q: &QuadraticForm, t: &FourierIndex) -> Result<BigInt> {
    let n = t.genus();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (-t.entry(i, i), i));
    let mut shells = HashMap::new();
    for i in 0..n {
        let m = t.entry(i, i);
        if let std::collections::hash_map::Entry::Vacant(e) = shells.entry(m) {
            e.insert(enumeration::vectors_of_norm(q, m)?);
        }
    }
    fn go(
        q: &QuadraticForm,
        t: &FourierIndex,
        order: &[usize],
        shells: &HashMap<i64, enumeration::NormShell>,
        fixed: &mut Vec<Vec<i64>>,
    ) -> Result<BigInt> {
        let pos = fixed.len();
        if pos == order.len() {
            return Ok(BigInt::from(1));
        }
        let col = order[pos];
        let inner: Vec<i64> = order[..pos].iter().map(|&j| t.entry(j, col)).collect();
        let mut total = BigInt::from(0);
        for x in constrained_filter(q, &shells[&t.entry(col, col)], fixed, &inner)? {
            fixed.push(x);
            total += go(q, t, order, shells, fixed)?;
            fixed.pop();
        }
        Ok(total)
    }
    go(q, t, &order, &shells, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qforms::make_e8;

    fn idx(n: usize, upper: &[i64]) -> FourierIndex {
        FourierIndex::from_upper(n, upper).unwrap()
    }

    #[test]
    fn e8_small_counts() {
        let q = make_e8();
        let r = |t: FourierIndex| representation_count(&q, &t).unwrap();
        assert_eq!(r(idx(1, &[0])), BigInt::from(1));
        assert_eq!(r(idx(1, &[2])), BigInt::from(240));
        assert_eq!(r(idx(2, &[2, 1, 2])), BigInt::from(13440));
        assert_eq!(r(idx(2, &[2, 0, 2])), BigInt::from(240 * 126));
    }

    #[test]
    fn direct_and_reduced_agree() {
        let q = make_e8();
        let cases = [
            idx(2, &[2, 1, 2]),
            idx(2, &[4, 2, 2]),
            idx(2, &[2, 2, 2]),
            idx(3, &[2, 1, 0, 2, 1, 2]),
            idx(3, &[2, 1, 1, 2, 1, 2]),
            idx(3, &[2, 0, 0, 2, 0, 2]),
            idx(3, &[4, 1, 0, 2, 0, 0]),
            idx(4, &[2, 1, 0, 0, 2, 1, 0, 2, 1, 2]),
            idx(4, &[2, 0, 0, 1, 2, 0, 1, 2, 1, 2]),
        ];
        for t in cases {
            assert_eq!(
                representation_count(&q, &t).unwrap(),
                representation_count_direct(&q, &t).unwrap(),
                "{t}"
            );
        }
    }

    #[test]
    fn scan_and_table_paths_agree() {
        let q = make_e8();
        let t = idx(3, &[4, 1, 1, 2, 1, 2]);
        let with_tables = Engine::new(EngineConfig::default());
        let without = Engine::new(EngineConfig {
            table_limit: 0,
            execution: Execution::Sequential,
            ..EngineConfig::default()
        });
        assert_eq!(
            with_tables.representation_count(&q, &t).unwrap(),
            without.representation_count(&q, &t).unwrap()
        );
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let q = make_e8();
        let engine = Engine::new(EngineConfig {
            budget: 100,
            ..EngineConfig::default()
        });
        let err = engine.theta_expansion(&q, 2, 4).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}
