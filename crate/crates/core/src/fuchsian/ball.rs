use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::FuchsianGroup;
use crate::error::{Error, Result};
use crate::hplane::{hyp_distance, HPoint, MobiusTransform};
use crate::par;

/// Quantization step for deduplication keys.
const KEY_STEP: f64 = 1e-6;
/// Entries closer than this (relative) are the same transform. Words that
/// wander out and cancel back accumulate ~1e-11 absolute drift, while
/// distinct elements of a discrete group in the ball differ by far more.
const SAME_TOL: f64 = 1e-7;
/// Records may exceed the radius by this much.
const RADIUS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub transform: MobiusTransform,
    /// `d(z1, gamma z2)`.
    pub rho: f64,
    pub word: String,
}

/// All group elements moving `z2` to within `radius` of `z1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrbitBall {
    pub z1: HPoint,
    pub z2: HPoint,
    pub radius: f64,
    /// Sorted by `rho`, then word.
    pub records: Vec<BallRecord>,
    pub complete: bool,
}

impl OrbitBall {
    pub fn is_centred(&self) -> bool {
        self.z1 == self.z2
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn rhos(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.rho)
    }

    /// Restricts to records with `rho <= radius`.
    pub fn truncated(&self, radius: f64) -> OrbitBall {
        OrbitBall {
            z1: self.z1,
            z2: self.z2,
            radius: radius.min(self.radius),
            records: self.records.iter().filter(|r| r.rho <= radius + RADIUS_SLACK).cloned().collect(),
            complete: self.complete,
        }
    }

    /// Pairs of records with (numerically) equal transforms; empty for a
    /// correctly deduplicated ball.
    pub fn duplicate_audit(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.records.len() {
            for j in i + 1..self.records.len() {
                if (self.records[j].rho - self.records[i].rho).abs() > 1e-7 {
                    break;
                }
                if self.records[i].transform.approx_eq(&self.records[j].transform, 1e-7) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BallOptions {
    /// Cap on the number of distinct elements visited.
    pub budget: usize,
    /// Extra pruning radius at the base point; defaults to the group's
    /// Dirichlet circumradius, else twice the largest generator displacement.
    pub prune_slack: Option<f64>,
    /// Use integer enumeration when the group is exactly Gamma0(N).
    pub arithmetic: bool,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self { budget: 2_000_000, prune_slack: None, arithmetic: true }
    }
}

pub fn enumerate_ball(
    group: &FuchsianGroup,
    z1: HPoint,
    z2: HPoint,
    radius: f64,
    options: BallOptions,
) -> Result<OrbitBall> {
    if !(radius >= 0.0) {
        return Err(Error::NonpositiveRadius(radius));
    }
    if options.budget == 0 {
        return Err(Error::Config("ball budget must be positive".into()));
    }
    match group.gamma0_level() {
        Some(level) if options.arithmetic => gamma0_ball(level, z1, z2, radius, options.budget),
        _ => word_ball(group, z1, z2, radius, options),
    }
}

type Key = [i64; 4];

fn key_candidates(t: &MobiusTransform) -> Vec<Key> {
    // neighbouring buckets are probed when an entry sits near a bucket edge
    let mut keys = vec![[0i64; 4]];
    for (i, v) in t.entries().into_iter().enumerate() {
        let scaled = v / KEY_STEP;
        let base = scaled.round();
        let frac = scaled - base;
        let mut next = Vec::with_capacity(keys.len() * 2);
        for k in &keys {
            let mut k0 = *k;
            k0[i] = base as i64;
            next.push(k0);
            if frac.abs() > 0.25 {
                let mut k1 = *k;
                k1[i] = base as i64 + frac.signum() as i64;
                next.push(k1);
            }
        }
        keys = next;
    }
    keys
}

fn primary_key(t: &MobiusTransform) -> Key {
    t.entries().map(|v| (v / KEY_STEP).round() as i64)
}

struct Dedup {
    buckets: HashMap<Key, Vec<usize>>,
}

impl Dedup {
    fn new() -> Self {
        Self { buckets: HashMap::new() }
    }

    fn find(&self, t: &MobiusTransform, store: &[MobiusTransform]) -> Option<usize> {
        key_candidates(t).into_iter().find_map(|k| {
            self.buckets.get(&k)?.iter().copied().find(|&i| store[i].approx_eq(t, SAME_TOL))
        })
    }

    fn insert(&mut self, t: &MobiusTransform, index: usize) {
        self.buckets.entry(primary_key(t)).or_default().push(index);
    }
}

/// Breadth-first word expansion, pruned at the base point `b`.
///
/// `d(z1, t z2) <= R` implies `d(b, t b) <= R + d(z1, b) + d(z2, b) = L`.
/// Walking the geodesic from `b` to `t b` through translates of a Dirichlet
/// domain shows every prefix of some word for `t` moves `b` by at most
/// `L + circumradius`, so expanding only those words loses nothing.
fn word_ball(
    group: &FuchsianGroup,
    z1: HPoint,
    z2: HPoint,
    radius: f64,
    options: BallOptions,
) -> Result<OrbitBall> {
    let b = group.base_point();
    let slack = match options.prune_slack.or(group.dirichlet_radius()) {
        Some(s) => s,
        None => 2.0 * group.max_generator_displacement(b)?,
    };
    let prune = radius + hyp_distance(z1, b) + hyp_distance(z2, b) + slack;
    let gens = group.generators();
    let labels = group.labels();

    let mut store: Vec<MobiusTransform> = vec![MobiusTransform::IDENTITY];
    let mut words: Vec<String> = vec![String::new()];
    let mut rhos: Vec<f64> = vec![hyp_distance(z1, z2)];
    let mut dedup = Dedup::new();
    dedup.insert(&MobiusTransform::IDENTITY, 0);
    let mut frontier = vec![0usize];
    let mut complete = true;

    while !frontier.is_empty() {
        let expanded: Vec<Vec<(MobiusTransform, usize, f64)>> = par::map(&frontier, |&i| {
            gens.iter()
                .enumerate()
                .filter_map(|(k, g)| {
                    let t = store[i].compose(g);
                    (hyp_distance(b, t.apply(b).ok()?) <= prune).then(|| {
                        let rho = t.apply(z2).map(|w| hyp_distance(z1, w)).unwrap_or(f64::INFINITY);
                        (t, k, rho)
                    })
                })
                .collect()
        });
        let mut next = Vec::new();
        for (parent, children) in frontier.iter().zip(expanded) {
            for (t, k, rho) in children {
                if dedup.find(&t, &store).is_some() {
                    continue;
                }
                let index = store.len();
                dedup.insert(&t, index);
                store.push(t);
                let mut word = words[*parent].clone();
                if !word.is_empty() {
                    word.push('.');
                }
                word.push_str(&labels[k]);
                words.push(word);
                rhos.push(rho);
                next.push(index);
            }
        }
        if store.len() > options.budget {
            complete = false;
            break;
        }
        frontier = next;
    }

    let mut records: Vec<BallRecord> = (0..store.len())
        .filter(|&i| rhos[i] <= radius + RADIUS_SLACK)
        .map(|i| BallRecord {
            transform: store[i],
            rho: rhos[i],
            word: if words[i].is_empty() { "id".into() } else { words[i].clone() },
        })
        .collect();
    sort_records(&mut records);
    Ok(OrbitBall { z1, z2, radius, records, complete })
}

fn sort_records(records: &mut [BallRecord]) {
    records.sort_by(|a, b| a.rho.total_cmp(&b.rho).then_with(|| a.word.cmp(&b.word)));
}

/// Exhaustive enumeration of `[[a, b], [c, d]]` in Gamma0(N) with
/// `d(z1, gamma z2) <= radius`, one representative per `+-` pair.
///
/// With `A = M1^-1 gamma M2`, where `Mk` sends `i` to `zk`, we have
/// `2 cosh d = |A|_F^2`; each row of `A` bounds one pair of integer entries.
fn gamma0_ball(level: u64, z1: HPoint, z2: HPoint, radius: f64, budget: usize) -> Result<OrbitBall> {
    let n = level as i64;
    let k = 2.0 * radius.cosh() * (1.0 + 1e-12);
    let (x1, y1, x2, y2) = (z1.x(), z1.y(), z2.x(), z2.y());
    let c_max = (k / (y1 * y2)).sqrt().floor() as i64;
    let mut records = Vec::new();

    let push = |records: &mut Vec<BallRecord>, a: i64, b: i64, c: i64, d: i64| -> Result<()> {
        let t = MobiusTransform::from_integers(a, b, c, d)?;
        let rho = hyp_distance(z1, t.apply(z2)?);
        if rho <= radius + RADIUS_SLACK {
            records.push(BallRecord { transform: t, rho, word: format!("[[{a},{b}],[{c},{d}]]") });
        }
        Ok(())
    };

    // c = 0: the translations z -> z + b
    let b_span = (k * y1 * y2).sqrt();
    let b_lo = (x1 - x2 - b_span).floor() as i64;
    let b_hi = (x1 - x2 + b_span).ceil() as i64;
    for b in b_lo..=b_hi {
        push(&mut records, 1, b, 0, 1)?;
    }

    let mut c = n;
    while c <= c_max {
        let cf = c as f64;
        // y1 (c^2 y2 + (c x2 + d)^2 / y2) <= k
        let room = y2 * (k / y1 - cf * cf * y2);
        if room >= 0.0 {
            let span = room.sqrt();
            let d_lo = (-cf * x2 - span).floor() as i64;
            let d_hi = (-cf * x2 + span).ceil() as i64;
            // (a - x1 c)^2 y2 / y1 <= k
            let a_span = (k * y1 / y2).sqrt();
            let a_lo = (x1 * cf - a_span).floor() as i64;
            let a_hi = (x1 * cf + a_span).ceil() as i64;
            for d in d_lo..=d_hi {
                if crate::arith::gcd(c, d) != 1 {
                    continue;
                }
                for a in a_lo..=a_hi {
                    let num = a * d - 1;
                    if num % c != 0 {
                        continue;
                    }
                    push(&mut records, a, num / c, c, d)?;
                }
            }
        }
        if records.len() > budget {
            return Err(Error::BudgetExhausted { budget });
        }
        c += n;
    }
    sort_records(&mut records);
    Ok(OrbitBall { z1, z2, radius, records, complete: true })
}

/// `N(z1, z2; rho)` sampled at sorted thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountProfile {
    pub thresholds: Vec<f64>,
    pub counts: Vec<usize>,
    /// False when the counts are only lower bounds.
    pub complete: bool,
}

impl CountProfile {
    /// Profile with one threshold per distinct `rho` in the ball, so the
    /// counting measure's atoms are all represented.
    pub fn atoms(ball: &OrbitBall) -> Self {
        let mut thresholds: Vec<f64> = Vec::new();
        let mut counts = Vec::new();
        for (i, r) in ball.records.iter().enumerate() {
            match thresholds.last() {
                Some(&last) if (r.rho - last).abs() <= 1e-12 => *counts.last_mut().unwrap() = i + 1,
                _ => {
                    thresholds.push(r.rho);
                    counts.push(i + 1);
                }
            }
        }
        Self { thresholds, counts, complete: ball.complete }
    }

    /// `sum f(rho) dN` over atoms with `rho <= upto`.
    pub fn stieltjes_sum(&self, f: impl Fn(f64) -> f64, upto: f64) -> f64 {
        let mut prev = 0;
        let mut total = 0.0;
        for (&t, &n) in self.thresholds.iter().zip(&self.counts) {
            if t > upto + RADIUS_SLACK {
                break;
            }
            total += f(t) * (n - prev) as f64;
            prev = n;
        }
        total
    }

    pub fn max_threshold(&self) -> f64 {
        self.thresholds.last().copied().unwrap_or(0.0)
    }
}

pub fn count_profile(ball: &OrbitBall, thresholds: &[f64]) -> Result<CountProfile> {
    let mut sorted = thresholds.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut counts = Vec::with_capacity(sorted.len());
    for &t in &sorted {
        if t > ball.radius + RADIUS_SLACK {
            return Err(Error::ThresholdExceedsRadius { threshold: t, radius: ball.radius });
        }
        counts.push(ball.records.partition_point(|r| r.rho <= t + RADIUS_SLACK));
    }
    Ok(CountProfile { thresholds: sorted, counts, complete: ball.complete })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{bolza, cyclic_test, gamma0, BOLZA_SYSTOLE};
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn ball(group: &FuchsianGroup, z: HPoint, r: f64) -> OrbitBall {
        enumerate_ball(group, z, z, r, BallOptions::default()).unwrap()
    }

    #[test]
    fn dirichlet_pruning_matches_conservative_pruning() {
        let g = bolza();
        let z1 = HPoint::new(0.4, 0.7).unwrap();
        let z2 = HPoint::new(-0.3, 1.6).unwrap();
        let tight = enumerate_ball(&g, z1, z2, 4.0, BallOptions::default()).unwrap();
        let loose_opts = BallOptions { prune_slack: Some(2.0 * BOLZA_SYSTOLE + 2.0), ..BallOptions::default() };
        let loose = enumerate_ball(&g, z1, z2, 4.0, loose_opts).unwrap();
        assert!(tight.complete && loose.complete);
        assert!(tight.len() > 5);
        let a: Vec<f64> = tight.rhos().collect();
        let b: Vec<f64> = loose.rhos().collect();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, epsilon = 1e-9);
        }
    }

    #[test]
    fn cyclic_ball_axis_oracle() {
        // axis oracle: d(i, 4^k i) = 2|k| ln 2
        let b = ball(&cyclic_test(), HPoint::I, 2.5);
        assert!(b.complete);
        let rhos: Vec<f64> = b.rhos().collect();
        assert_eq!(rhos.len(), 3);
        assert_eq!(rhos[0], 0.0);
        assert_relative_eq!(rhos[1], 2.0 * LN_2, epsilon = 1e-14);
        assert_relative_eq!(rhos[2], 2.0 * LN_2, epsilon = 1e-14);
        assert_ne!(b.records[1].transform, b.records[2].transform);

        // k = +-2 sit at 4 ln 2 < 3
        let b = ball(&cyclic_test(), HPoint::I, 3.0);
        let rhos: Vec<f64> = b.rhos().collect();
        assert_eq!(rhos.len(), 5);
        assert_relative_eq!(rhos[4], 4.0 * LN_2, epsilon = 1e-14);
    }

    #[test]
    fn below_systole_only_identity() {
        let b = ball(&bolza(), HPoint::I, BOLZA_SYSTOLE - 0.01);
        assert_eq!(b.len(), 1);
        assert!(b.records[0].transform.is_identity(1e-12));
        let b = ball(&cyclic_test(), HPoint::I, 1.0);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn bolza_radius_four() {
        let b = ball(&bolza(), HPoint::I, 4.0);
        assert!(b.complete);
        assert!(b.duplicate_audit().is_empty());
        let min_nontrivial = b.records[1].rho;
        assert!(min_nontrivial >= BOLZA_SYSTOLE - 1e-9);
        assert_relative_eq!(min_nontrivial, BOLZA_SYSTOLE, epsilon = 1e-9);
        // the eight side pairings at distance exactly the systole
        assert_eq!(b.rhos().filter(|r| (r - BOLZA_SYSTOLE).abs() < 1e-9).count(), 8);
    }

    #[test]
    fn count_profile_examples() {
        let b = ball(&bolza(), HPoint::I, 1.0);
        assert_eq!(count_profile(&b, &[0.0]).unwrap().counts, vec![1]);
        let b = ball(&cyclic_test(), HPoint::I, 3.0);
        assert_eq!(count_profile(&b, &[1.0, 1.5, 3.0]).unwrap().counts, vec![1, 3, 5]);
        assert_eq!(count_profile(&b, &[3.0, 1.0]).unwrap().thresholds, vec![1.0, 3.0]);
        assert!(matches!(count_profile(&b, &[3.5]), Err(Error::ThresholdExceedsRadius { .. })));
    }

    #[test]
    fn atoms_profile_matches_records() {
        let b = ball(&bolza(), HPoint::new(0.1, 1.2).unwrap(), 5.0);
        let prof = CountProfile::atoms(&b);
        assert_eq!(*prof.counts.last().unwrap(), b.len());
        let direct: f64 = b.rhos().map(|r| (-2.0 * r).exp()).sum();
        assert_relative_eq!(prof.stieltjes_sum(|r| (-2.0 * r).exp(), 5.0), direct, epsilon = 1e-13);
    }

    #[test]
    fn budget_exhaustion_marks_incomplete() {
        let opts = BallOptions { budget: 50, ..Default::default() };
        let b = enumerate_ball(&bolza(), HPoint::I, HPoint::I, 6.0, opts).unwrap();
        assert!(!b.complete);
    }

    #[test]
    fn deterministic() {
        let z = HPoint::new(0.2, 0.9).unwrap();
        let a = ball(&bolza(), z, 5.0);
        let b = ball(&bolza(), z, 5.0);
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn gamma0_words_agree_with_integer_enumeration() {
        let g = gamma0(23).unwrap();
        let z = HPoint::new(0.13, 0.6).unwrap();
        let exact = ball(&g, z, 3.0);
        let words = enumerate_ball(
            &g,
            z,
            z,
            3.0,
            BallOptions { arithmetic: false, prune_slack: Some(6.0), ..Default::default() },
        )
        .unwrap();
        assert!(exact.len() > 1);
        // every word-found element must also be found by the exhaustive search
        for r in &words.records {
            assert!(exact.records.iter().any(|e| e.transform.approx_eq(&r.transform, 1e-9)), "{}", r.word);
        }
        assert_eq!(words.len(), exact.len());
    }

    #[test]
    fn gamma0_ball_contains_translations() {
        let g = gamma0(29).unwrap();
        let z = HPoint::new(0.0, 2.0).unwrap();
        let b = ball(&g, z, 1.0);
        // d(2i, 2i + 1) = 2 asinh(1/4)
        let expected = 2.0 * (0.25f64).asinh();
        assert_eq!(b.rhos().filter(|r| (r - expected).abs() < 1e-12).count(), 2);
    }
}
