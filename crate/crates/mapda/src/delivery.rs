//! One-shot zero-forcing delivery over a MAPDA on a real Gaussian MISO
//! channel, with exact bookkeeping of users served per block.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::mapda::{Entry, Mapda};

/// Condition-number estimate above which a channel draw is rejected.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Fresh draws attempted after the first before giving up.
pub const MAX_RESAMPLES: u32 = 3;

/// Real channel gains, one row of `L` coefficients per user.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    users: usize,
    antennas: usize,
    gains: Vec<f64>,
    seed: u64,
}

impl Channel {
    /// I.i.d. standard normal gains from a ChaCha stream seeded by `seed`.
    pub fn gaussian(users: usize, antennas: usize, seed: u64) -> Channel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gains = (0..users * antennas).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        Channel { users, antennas, gains, seed }
    }

    /// Fixed gains; resampling falls back to Gaussian draws seeded by `seed`.
    pub fn from_rows(rows: &[Vec<f64>], seed: u64) -> Result<Channel> {
        let antennas = rows.first().map_or(0, Vec::len);
        if antennas == 0 || rows.iter().any(|r| r.len() != antennas) {
            return Err(Error::InvalidParameter("channel rows must be non-empty and equal length".into()));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("channel gains must be finite".into()));
        }
        Ok(Channel { users: rows.len(), antennas, gains: rows.concat(), seed })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.gains[user * self.antennas..(user + 1) * self.antennas]
    }

    /// The next Gaussian draw in this channel's resampling sequence.
    pub fn resample(&self) -> Channel {
        let seed = mix(self.seed, 0x5eed);
        Channel::gaussian(self.users, self.antennas, seed)
    }
}

pub fn gen_channel(users: usize, antennas: usize, seed: u64) -> Channel {
    Channel::gaussian(users, antennas, seed)
}

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic payload of packet `row` of file `file`, uniform in `[-1, 1)`.
pub fn payload(seed: u64, file: usize, row: usize) -> f64 {
    let h = mix(mix(seed, file as u64), row as u64);
    (h >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

/// Per-block structure of an array: served `(user, row)` pairs and the
/// zero-forcing system behind each packet's precoder. Packets whose
/// precoders null the same set of users share one factorization per channel.
#[derive(Clone, Debug)]
pub struct DeliveryPlan {
    antennas: usize,
    users: usize,
    symbols: u32,
    blocks: Vec<BlockLayout>,
    systems: Vec<ConstraintSet>,
    slots: usize,
}

#[derive(Clone, Debug)]
struct BlockLayout {
    served: Vec<(usize, usize)>,
    /// Precoder slot of each served packet.
    slots: Vec<usize>,
    /// `(system, i)` of each served packet.
    targets: Vec<(usize, usize)>,
    /// Per served user, the packets it does not cache (its own included),
    /// concatenated; `audible_end[k]` closes user `k`'s run.
    audible: Vec<u32>,
    audible_end: Vec<u32>,
}

/// Users (ascending) that hear a packet either as its target or as a
/// zero-forced bystander, with the precoder slots solved against them.
#[derive(Clone, Debug)]
struct ConstraintSet {
    users: Vec<usize>,
    /// `(i, slot)`: unit gain at `users[i]`, null at the rest.
    solves: Vec<(usize, usize)>,
}

impl DeliveryPlan {
    /// Requires every block to use each column at most once and to null at
    /// most `L - 1` users per packet.
    pub fn new(q: &Mapda) -> Result<DeliveryPlan> {
        let occ = q.occurrences();
        if occ.len() != q.symbols() as usize + 1 {
            return Err(Error::InvalidArray("entries exceed the declared block count".into()));
        }
        // per block: served pairs and, per packet, (user set, target index)
        let layouts = exec::try_map_slice(&occ[1..], |o| {
            let mut served: Vec<(usize, usize)> = o.iter().map(|&(r, c)| (c, r)).collect();
            served.sort_unstable();
            if served.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidArray("a block repeats in a column".into()));
            }
            let sets = served
                .iter()
                .map(|&(user, row)| {
                    let set: Vec<usize> =
                        served.iter().map(|&(j, _)| j).filter(|&j| j == user || q.get(row, j) != Entry::Star).collect();
                    if set.len() > q.antennas() {
                        return Err(Error::InvalidArray(format!(
                            "a packet must be nulled at {} users with {} antennas",
                            set.len() - 1,
                            q.antennas()
                        )));
                    }
                    let i = set.binary_search(&user).expect("target is in its own set");
                    Ok((set, i))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut audible = Vec::new();
            let mut audible_end = Vec::with_capacity(served.len());
            for &(user, _) in &served {
                audible.extend((0..served.len() as u32).filter(|&j| {
                    let (u, row) = served[j as usize];
                    u == user || q.get(row, user) != Entry::Star
                }));
                audible_end.push(audible.len() as u32);
            }
            Ok((served, sets, audible, audible_end))
        })?;
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut slot_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut systems: Vec<ConstraintSet> = Vec::new();
        let mut blocks = Vec::with_capacity(layouts.len());
        for (served, sets, audible, audible_end) in layouts {
            let mut slots = Vec::with_capacity(sets.len());
            let mut targets = Vec::with_capacity(sets.len());
            for (set, i) in sets {
                let sys = *index.entry(set).or_insert_with_key(|set| {
                    systems.push(ConstraintSet { users: set.clone(), solves: Vec::new() });
                    systems.len() - 1
                });
                let next = slot_of.len();
                let slot = *slot_of.entry((sys, i)).or_insert_with(|| {
                    systems[sys].solves.push((i, next));
                    next
                });
                slots.push(slot);
                targets.push((sys, i));
            }
            blocks.push(BlockLayout { served, slots, targets, audible, audible_end });
        }
        Ok(DeliveryPlan { antennas: q.antennas(), users: q.cols(), symbols: q.symbols(), blocks, systems, slots: slot_of.len() })
    }

    /// Precoders for every slot on channel `ch`, `L` gains per slot. Fails
    /// with the condition estimate of the first ill-conditioned system.
    fn precoder_table(&self, ch: &Channel, solver: &mut Solver, table: &mut Vec<f64>) -> std::result::Result<(), f64> {
        let l = self.antennas;
        table.clear();
        table.resize(self.slots * l, 0.0);
        for sys in &self.systems {
            solver.factor(ch, sys.users.iter().copied())?;
            for &(i, slot) in &sys.solves {
                solver.solve_unit(i, &mut table[slot * l..(slot + 1) * l]);
            }
        }
        Ok(())
    }

    pub fn served(&self, s: u32) -> Result<&[(usize, usize)]> {
        self.block(s).map(|b| b.served.as_slice())
    }

    fn block(&self, s: u32) -> Result<&BlockLayout> {
        if s == 0 || s > self.symbols {
            return Err(Error::UnknownSymbol(s));
        }
        let b = &self.blocks[s as usize - 1];
        if b.served.is_empty() {
            return Err(Error::UnknownSymbol(s));
        }
        Ok(b)
    }

    /// `sum_s r_s / S` as an exact rational.
    pub fn measured_dof(&self) -> BigRational {
        let total: usize = self.blocks.iter().map(|b| b.served.len()).sum();
        BigRational::new(BigInt::from(total), BigInt::from(self.symbols.max(1)))
    }
}

/// Precoders for one block: `precoders[k]` has unit gain at `served[k].0`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPlan {
    pub symbol: u32,
    /// `(user, packet row)` pairs in user order.
    pub served: Vec<(usize, usize)>,
    pub precoders: Vec<Vec<f64>>,
}

/// Scratch space for least-norm solves of at most `L` equations.
struct Solver {
    l: usize,
    m: usize,
    /// Rows of `A`, i.e. columns of `A^T`, reduced in place to `R`.
    a: Vec<f64>,
    /// Householder vectors, one per column.
    h: Vec<f64>,
    y: Vec<f64>,
}

impl Solver {
    fn new(l: usize) -> Self {
        Solver { l, m: 0, a: vec![0.0; l * l], h: vec![0.0; l * l], y: vec![0.0; l] }
    }

    /// Householder QR of `A^T`, where the rows of `A` are the gains of
    /// `users`. Fails with the condition estimate `||R||_F ||R^-1||_F`, an
    /// upper bound on the 2-norm condition number of `A`, when it exceeds
    /// [`CONDITION_LIMIT`].
    fn factor(&mut self, ch: &Channel, users: impl Iterator<Item = usize>) -> std::result::Result<(), f64> {
        let l = self.l;
        let mut m = 0;
        for u in users {
            self.a[m * l..(m + 1) * l].copy_from_slice(ch.row(u));
            m += 1;
        }
        self.m = m;
        for j in 0..m {
            let col = &self.a[j * l..(j + 1) * l];
            let norm = col[j..].iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(f64::INFINITY);
            }
            let alpha = if col[j] > 0.0 { -norm } else { norm };
            let hv = &mut self.h[j * l..(j + 1) * l];
            hv[..j].fill(0.0);
            hv[j..].copy_from_slice(&col[j..]);
            hv[j] -= alpha;
            let hn = hv[j..].iter().map(|x| x * x).sum::<f64>().sqrt();
            if hn > 0.0 {
                hv[j..].iter_mut().for_each(|x| *x /= hn);
            }
            for c in j..m {
                let hv = &self.h[j * l..(j + 1) * l];
                let col = &mut self.a[c * l..(c + 1) * l];
                let d: f64 = (j..l).map(|k| hv[k] * col[k]).sum();
                (j..l).for_each(|k| col[k] -= 2.0 * d * hv[k]);
            }
        }
        let cond = self.frobenius_condition();
        if !(cond <= CONDITION_LIMIT) {
            return Err(cond);
        }
        Ok(())
    }

    /// Least-norm `v` with `A v = e_i` for the last factored `A`.
    fn solve_unit(&mut self, i: usize, out: &mut [f64]) {
        let (l, m) = (self.l, self.m);
        // R^T w = e_i, then v = Q [w; 0]
        self.y.fill(0.0);
        for j in i..m {
            let mut s = if j == i { 1.0 } else { 0.0 };
            for k in i..j {
                s -= self.a[j * l + k] * self.y[k];
            }
            self.y[j] = s / self.a[j * l + j];
        }
        for j in (0..m).rev() {
            let hv = &self.h[j * l..(j + 1) * l];
            let d: f64 = (j..l).map(|k| hv[k] * self.y[k]).sum();
            (j..l).for_each(|k| self.y[k] -= 2.0 * d * hv[k]);
        }
        out.copy_from_slice(&self.y);
    }

    fn frobenius_condition(&mut self) -> f64 {
        let (l, m) = (self.l, self.m);
        let r = |i: usize, j: usize, a: &[f64]| a[j * l + i];
        let norm_r: f64 = (0..m).flat_map(|j| (0..=j).map(move |i| (i, j))).map(|(i, j)| r(i, j, &self.a).powi(2)).sum();
        // columns of R^-1 by back substitution, accumulated into the norm
        let mut norm_inv = 0.0;
        for c in 0..m {
            for i in (0..=c).rev() {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in i + 1..=c {
                    s -= r(i, k, &self.a) * self.y[k];
                }
                self.y[i] = s / r(i, i, &self.a);
            }
            norm_inv += self.y[..=c].iter().map(|x| x * x).sum::<f64>();
        }
        (norm_r * norm_inv).sqrt()
    }
}

fn check_channel(plan: &DeliveryPlan, ch: &Channel) -> Result<()> {
    if ch.users != plan.users || ch.antennas != plan.antennas {
        return Err(Error::InvalidParameter(format!(
            "channel is {}x{}, array needs {}x{}",
            ch.users, ch.antennas, plan.users, plan.antennas
        )));
    }
    Ok(())
}

fn block_precoders(plan: &DeliveryPlan, b: &BlockLayout, ch: &Channel, solver: &mut Solver) -> std::result::Result<Vec<Vec<f64>>, f64> {
    let mut out = Vec::with_capacity(b.served.len());
    for &(sys, i) in &b.targets {
        solver.factor(ch, plan.systems[sys].users.iter().copied())?;
        let mut v = vec![0.0; plan.antennas];
        solver.solve_unit(i, &mut v);
        out.push(v);
    }
    Ok(out)
}

/// Zero-forcing precoders for block `s` on channel `ch`.
pub fn build_precoders(q: &Mapda, s: u32, ch: &Channel) -> Result<BlockPlan> {
    let plan = DeliveryPlan::new(q)?;
    check_channel(&plan, ch)?;
    let b = plan.block(s)?;
    let mut solver = Solver::new(plan.antennas);
    let precoders = block_precoders(&plan, b, ch, &mut solver)
        .map_err(|c| Error::ChannelDegeneracy(format!("block {s}: condition estimate {c:e} exceeds {CONDITION_LIMIT:e}")))?;
    Ok(BlockPlan { symbol: s, served: b.served.clone(), precoders })
}

/// Outcome of delivering one demand vector.
#[derive(Clone, Debug, PartialEq)]
pub struct DeliveryReport {
    pub all_decoded: bool,
    pub max_residual: f64,
    pub measured_dof: BigRational,
    /// Channel draws rejected before delivery succeeded.
    pub resamples: u32,
}

/// Runs every block on `ch`, resampling the whole channel when a block is
/// ill-conditioned. `demand[k]` is the file (1-based) requested by user `k`.
pub fn simulate_with_channel(q: &Mapda, demand: &[usize], ch: &Channel, tol: f64) -> Result<DeliveryReport> {
    let plan = DeliveryPlan::new(q)?;
    simulate_plan(&plan, demand, ch, tol, 0)
}

/// [`simulate_with_channel`] on a Gaussian channel drawn from `seed`.
pub fn simulate(q: &Mapda, demand: &[usize], seed: u64, tol: f64) -> Result<DeliveryReport> {
    let plan = DeliveryPlan::new(q)?;
    let ch = Channel::gaussian(plan.users, plan.antennas, seed);
    simulate_plan(&plan, demand, &ch, tol, seed)
}

/// Delivers with a prepared plan; `payload_seed` fixes the packet contents.
pub fn simulate_plan(plan: &DeliveryPlan, demand: &[usize], ch: &Channel, tol: f64, payload_seed: u64) -> Result<DeliveryReport> {
    check_channel(plan, ch)?;
    if demand.len() != plan.users || demand.contains(&0) {
        return Err(Error::InvalidParameter(format!("demand must name a file (1-based) for each of {} users", plan.users)));
    }
    let mut solver = Solver::new(plan.antennas);
    let mut current = ch.clone();
    let mut resamples = 0;
    loop {
        match deliver(plan, demand, &current, tol, payload_seed, &mut solver) {
            Ok((all_decoded, max_residual)) => {
                return Ok(DeliveryReport { all_decoded, max_residual, measured_dof: plan.measured_dof(), resamples });
            }
            Err(_) if resamples < MAX_RESAMPLES => {
                resamples += 1;
                current = current.resample();
            }
            Err(cond) => {
                return Err(Error::ChannelDegeneracy(format!(
                    "condition estimate {cond:e} after {MAX_RESAMPLES} resamples"
                )));
            }
        }
    }
}

fn deliver(plan: &DeliveryPlan, demand: &[usize], ch: &Channel, tol: f64, seed: u64, solver: &mut Solver) -> std::result::Result<(bool, f64), f64> {
    let l = plan.antennas;
    let mut table = Vec::new();
    plan.precoder_table(ch, solver, &mut table)?;
    let mut packets = Vec::new();
    let mut max_residual = 0.0f64;
    for b in &plan.blocks {
        packets.clear();
        packets.extend(b.served.iter().map(|&(user, row)| payload(seed, demand[user], row)));
        let mut start = 0;
        for (k, &(user, _)) in b.served.iter().enumerate() {
            let h = ch.row(user);
            let end = b.audible_end[k] as usize;
            // packets cached at this user cancel exactly and are skipped
            let mut heard = 0.0;
            for &j in &b.audible[start..end] {
                let slot = b.slots[j as usize];
                let gain: f64 = h.iter().zip(&table[slot * l..(slot + 1) * l]).map(|(a, b)| a * b).sum();
                heard += gain * packets[j as usize];
            }
            start = end;
            max_residual = max_residual.max((heard - packets[k]).abs());
        }
    }
    Ok((max_residual < tol, max_residual))
}

/// Summary of many independent demand/channel draws.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialsReport {
    pub trials: usize,
    pub all_decoded: bool,
    pub max_residual: f64,
    pub measured_dof: BigRational,
    pub resamples: u32,
}

/// Random demand over `files` files for each user, drawn from `seed`.
pub fn random_demand(users: usize, files: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..users).map(|_| rng.random_range(1..=files.max(1))).collect()
}

/// Runs `trials` seeded trials, each with its own demand and channel.
pub fn simulate_trials(q: &Mapda, files: usize, trials: usize, seed: u64, tol: f64) -> Result<TrialsReport> {
    let plan = DeliveryPlan::new(q)?;
    let reports = exec::try_map_range(trials, |i| {
        let s = mix(seed, i as u64 + 1);
        let demand = random_demand(plan.users, files, s);
        let ch = Channel::gaussian(plan.users, plan.antennas, mix(s, 1));
        simulate_plan(&plan, &demand, &ch, tol, s)
    })?;
    Ok(TrialsReport {
        trials,
        all_decoded: reports.iter().all(|r| r.all_decoded),
        max_residual: reports.iter().map(|r| r.max_residual).fold(0.0, f64::max),
        measured_dof: plan.measured_dof(),
        resamples: reports.iter().map(|r| r.resamples).sum(),
    })
}
