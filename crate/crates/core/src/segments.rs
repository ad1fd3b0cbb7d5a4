//! Longest strange segments `R_m(A; a)` and their dual hitting times
//! `T_r(A; a)`.
//!
//! Every target set is a half-space `{v·x > c}`, so both reduce to the
//! projected sums `P_k = v·S_k` and the test `P_l − P_k > c·a_{l−k}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Normalization, RegimeSpec, TargetSet};
use crate::simulate::{sample_path, Path, PathConfig, PathStream};

/// Default cap on `m` for the quadratic scan.
pub const EXACT_MAX_M: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Segment {
    /// `R_m`, `0` when no window qualifies.
    pub r: usize,
    /// `(l, n)`: `(S_l − S_{l−n})/a_n ∈ A`.
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Use the closure of `A` instead of `A`.
    pub closed: bool,
    pub max_m: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            closed: false,
            max_m: EXACT_MAX_M,
        }
    }
}

fn unit_form(a: &TargetSet, dim: usize) -> Result<(Vec<f64>, f64)> {
    if a.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: a.dim(),
        });
    }
    Ok(a.normal_form())
}

#[inline]
fn hit(diff: f64, bound: f64, closed: bool) -> bool {
    if closed {
        diff >= bound
    } else {
        diff > bound
    }
}

/// Quadratic scan on projected sums `p[0..=m]`: lengths from `m` down,
/// the largest window increment of each length against `c·a_n`.
pub fn exact_on_sums(p: &[f64], c: f64, a: impl Fn(u64) -> f64, closed: bool) -> Segment {
    let m = p.len() - 1;
    for n in (1..=m).rev() {
        let bound = c * a(n as u64);
        let mut best = f64::NEG_INFINITY;
        let mut at = 0;
        for l in n..=m {
            let d = p[l] - p[l - n];
            if d > best {
                best = d;
                at = l;
            }
        }
        if hit(best, bound, closed) {
            return Segment {
                r: n,
                witness: Some((at, n)),
            };
        }
    }
    Segment {
        r: 0,
        witness: None,
    }
}

/// `R_m` by the exact scan, for any half-space `A` and any `a_n`.
pub fn longest_strange_segment_exact(
    path: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
) -> Result<Segment> {
    longest_strange_segment_exact_with(path, a, reg, ScanOptions::default())
}

pub fn longest_strange_segment_exact_with(
    path: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
    opts: ScanOptions,
) -> Result<Segment> {
    let (v, c) = unit_form(a, path.dim)?;
    if path.len() > opts.max_m {
        return Err(Error::OutOfRange(format!(
            "exact scan is capped at m = {}, got {}",
            opts.max_m,
            path.len()
        )));
    }
    let p = path.projected_sums(&v);
    Ok(exact_on_sums(&p, c, |n| reg.a(n), opts.closed))
}

/// For each `l`, `l − k*(l)` where `k*(l)` is the earliest `k` with
/// `S̃_k < S̃_l` (`≤` when closed), `S̃_k = P_k − y k`; `0` if none.
fn best_lengths(p: &[f64], y: f64, closed: bool) -> Vec<usize> {
    let m = p.len() - 1;
    let mut pm = Vec::with_capacity(m + 1);
    let mut out = vec![0usize; m + 1];
    let mut run = f64::INFINITY;
    for (l, pl) in p.iter().enumerate() {
        let t = pl - y * l as f64;
        if l > 0 {
            // pm is nonincreasing: first index with pm[k] below t
            let k = pm.partition_point(|&q: &f64| !hit(t, q, closed));
            if k < l {
                out[l] = l - k;
            }
        }
        run = run.min(t);
        pm.push(run);
    }
    out
}

fn check_fast(path: &Path, a: &TargetSet, reg: &RegimeSpec) -> Result<(Vec<f64>, f64)> {
    let y = match a {
        TargetSet::HalfLine { y } if path.dim == 1 => *y,
        _ => {
            return Err(Error::UnsupportedSet(
                "the fast scan needs d = 1 and A = (y, ∞)".into(),
            ))
        }
    };
    if reg.normalization() != (Normalization::Power { omega: 1.0 }) {
        return Err(Error::UnsupportedSet("the fast scan needs a_n = n".into()));
    }
    Ok((path.s.clone(), y))
}

/// `R_m` for `A = (y, ∞)`, `a_n = n` in `O(m log m)`.
pub fn longest_strange_segment_fast(
    path: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
) -> Result<Segment> {
    longest_strange_segment_fast_with(path, a, reg, false)
}

pub fn longest_strange_segment_fast_with(
    path: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
    closed: bool,
) -> Result<Segment> {
    let (p, y) = check_fast(path, a, reg)?;
    let best = best_lengths(&p, y, closed);
    let mut seg = Segment {
        r: 0,
        witness: None,
    };
    for (l, &n) in best.iter().enumerate() {
        if n > seg.r {
            seg = Segment {
                r: n,
                witness: Some((l, n)),
            };
        }
    }
    Ok(seg)
}

/// `R_m` for every `m` in `grid` (ascending) from one pass of the fast scan.
pub fn fast_running(
    path: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
    grid: &[usize],
) -> Result<Vec<usize>> {
    let (p, y) = check_fast(path, a, reg)?;
    let best = best_lengths(&p, y, false);
    let mut out = Vec::with_capacity(grid.len());
    let mut run = 0usize;
    let mut l = 0usize;
    for &m in grid {
        let m = m.min(path.len());
        while l <= m {
            run = run.max(best[l]);
            l += 1;
        }
        out.push(run);
    }
    Ok(out)
}

/// Exact `R_m` on the first `m` steps, using the fast scan when it applies.
pub fn longest_strange_segment(path: &Path, a: &TargetSet, reg: &RegimeSpec) -> Result<Segment> {
    match longest_strange_segment_fast(path, a, reg) {
        Err(Error::UnsupportedSet(_)) => longest_strange_segment_exact(path, a, reg),
        other => other,
    }
}

/// `T_r` on a stream of projected sums `P_1, P_2, …` (with `P_0 = 0`):
/// the least `l` with some `k ≤ l − r` and `P_l − P_k > c·a_{l−k}`.
pub fn first_hitting_on_sums<I: Iterator<Item = f64>>(
    sums: I,
    c: f64,
    reg: &RegimeSpec,
    r: usize,
    cap: usize,
) -> Result<usize> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be at least 1".into()));
    }
    let linear = reg.normalization() == (Normalization::Power { omega: 1.0 });
    let mut p = vec![0.0];
    let mut pm = vec![0.0];
    for (idx, pl) in sums.take(cap).enumerate() {
        let l = idx + 1;
        p.push(pl);
        if linear {
            let t = pl - c * l as f64;
            let k = pm.partition_point(|&q: &f64| q >= t);
            pm.push(pm[l - 1].min(t));
            if k + r <= l {
                return Ok(l);
            }
        } else if l >= r {
            for k in 0..=l - r {
                if p[l] - p[k] > c * reg.a((l - k) as u64) {
                    return Ok(l);
                }
            }
        }
    }
    Err(Error::NotFoundWithinBudget { cap })
}

/// `T_r` on a fixed path; the budget is the path length.
pub fn first_hitting_t(path: &Path, a: &TargetSet, reg: &RegimeSpec, r: usize) -> Result<usize> {
    let (v, c) = unit_form(a, path.dim)?;
    let p = path.projected_sums(&v);
    first_hitting_on_sums(p.into_iter().skip(1), c, reg, r, path.len())
}

/// `T_r` on a stream extended on demand up to `cap` steps.
pub fn first_hitting_t_stream(
    stream: &mut PathStream,
    a: &TargetSet,
    reg: &RegimeSpec,
    r: usize,
    cap: usize,
) -> Result<usize> {
    let (v, c) = unit_form(a, stream.s().len())?;
    let sums =
        std::iter::from_fn(|| Some(stream.advance().iter().zip(&v).map(|(s, w)| s * w).sum()));
    first_hitting_on_sums(sums, c, reg, r, cap)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentRecord {
    pub m: usize,
    pub path_id: u64,
    pub r_m: usize,
    pub b_r: f64,
    pub statistic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub m: usize,
    pub mean: f64,
    pub std: f64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
    pub records: Vec<SegmentRecord>,
}

fn normalize_grid(grid: &[usize]) -> Vec<usize> {
    let mut grid: Vec<usize> = grid.iter().copied().filter(|m| *m >= 2).collect();
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// `R_m` for each `m` in an ascending grid: one fast pass when it applies,
/// the exact scan on each prefix otherwise.
pub fn running_segments(
    p: &Path,
    a: &TargetSet,
    reg: &RegimeSpec,
    grid: &[usize],
) -> Result<Vec<usize>> {
    match fast_running(p, a, reg, grid) {
        Err(Error::UnsupportedSet(_)) => grid
            .iter()
            .map(|&m| {
                let m = m.min(p.len());
                let q = Path {
                    x: p.x[..m * p.dim].to_vec(),
                    s: p.s[..(m + 1) * p.dim].to_vec(),
                    ..p.clone()
                };
                longest_strange_segment_exact(&q, a, reg).map(|s| s.r)
            })
            .collect(),
        other => other,
    }
}

fn assemble(ids: &[u64], per_path: &[Vec<usize>], reg: &RegimeSpec, grid: &[usize]) -> GrowthTable {
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for (gi, &m) in grid.iter().enumerate() {
        let mut stats = Vec::with_capacity(ids.len());
        for (id, rs) in ids.iter().zip(per_path) {
            let r_m = rs[gi];
            let b_r = reg.b(r_m as u64);
            let statistic = b_r / (m as f64).ln();
            stats.push(statistic);
            records.push(SegmentRecord {
                m,
                path_id: *id,
                r_m,
                b_r,
                statistic,
            });
        }
        let k = stats.len() as f64;
        let mean = stats.iter().sum::<f64>() / k;
        let std = (stats.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
        rows.push(GrowthRow {
            m,
            mean,
            std,
            n_paths: ids.len(),
        });
    }
    GrowthTable { rows, records }
}

/// `b_{R_m} / log m` over a batch of paths for each `m` in `grid`.
pub fn growth_statistic(
    paths: &[Path],
    a: &TargetSet,
    reg: &RegimeSpec,
    grid: &[usize],
) -> Result<GrowthTable> {
    if paths.len() < 2 {
        return Err(Error::InvalidParameter(
            "growth statistic needs at least 2 paths".into(),
        ));
    }
    let grid = normalize_grid(grid);
    let per_path: Vec<Vec<usize>> = paths
        .par_iter()
        .map(|p| running_segments(p, a, reg, &grid))
        .collect::<Result<_>>()?;
    let ids: Vec<u64> = paths.iter().map(|p| p.path_index).collect();
    Ok(assemble(&ids, &per_path, reg, &grid))
}

/// [`growth_statistic`] on paths `0..n_paths` of `cfg`, each generated,
/// measured and dropped in turn.
pub fn simulate_growth(
    cfg: &PathConfig,
    n_paths: usize,
    a: &TargetSet,
    reg: &RegimeSpec,
    grid: &[usize],
) -> Result<GrowthTable> {
    if n_paths < 2 {
        return Err(Error::InvalidParameter(
            "growth statistic needs at least 2 paths".into(),
        ));
    }
    let grid = normalize_grid(grid);
    let per_path: Vec<Vec<usize>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|k| running_segments(&sample_path(&cfg.clone().with_path(k))?, a, reg, &grid))
        .collect::<Result<_>>()?;
    let ids: Vec<u64> = (0..n_paths as u64).collect();
    Ok(assemble(&ids, &per_path, reg, &grid))
}

/// `m = 10^k` style grid with `per_decade` points per decade up to `m_max`.
pub fn log_grid(m_min: usize, m_max: usize, per_decade: usize) -> Vec<usize> {
    let (lo, hi) = ((m_min.max(2) as f64).log10(), (m_max as f64).log10());
    let steps = ((hi - lo) * per_decade as f64).round().max(0.0) as usize;
    let mut g: Vec<usize> = (0..=steps)
        .map(|i| {
            10f64
                .powf(lo + (hi - lo) * i as f64 / steps.max(1) as f64)
                .round() as usize
        })
        .collect();
    g.dedup();
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CoefficientFamily, InnovationModel, RegimeTag};

    fn linear() -> RegimeSpec {
        RegimeSpec::new(
            RegimeTag::S1,
            Normalization::Power { omega: 1.0 },
            &CoefficientFamily::iid(),
            None,
        )
        .unwrap()
    }

    fn path(x: &[f64]) -> Path {
        Path::from_increments(x.to_vec(), 1)
    }

    fn brute(x: &[f64], y: f64) -> usize {
        let s: Vec<f64> = std::iter::once(0.0)
            .chain(x.iter().scan(0.0, |a, v| {
                *a += v;
                Some(*a)
            }))
            .collect();
        let mut best = 0;
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                if (s[j] - s[i]) / (j - i) as f64 > y {
                    best = best.max(j - i);
                }
            }
        }
        best
    }

    #[test]
    fn listed_examples() {
        let a = TargetSet::half_line(1.0);
        let r = linear();
        let s = longest_strange_segment_exact(&path(&[2.0, -1.0, 3.0]), &a, &r).unwrap();
        assert_eq!(
            s,
            Segment {
                r: 3,
                witness: Some((3, 3))
            }
        );
        assert_eq!(
            longest_strange_segment_exact(&path(&[-1.0, -1.0]), &a, &r)
                .unwrap()
                .r,
            0
        );
        assert!(longest_strange_segment_exact(&path(&[-1.0, -1.0]), &a, &r)
            .unwrap()
            .witness
            .is_none());
        assert_eq!(
            longest_strange_segment_exact(&path(&[0.5, 2.0, 0.5]), &a, &r)
                .unwrap()
                .r,
            2
        );
        assert_eq!(
            longest_strange_segment_fast(&path(&[0.5, 2.0, 0.5]), &a, &r)
                .unwrap()
                .r,
            2
        );
        // closure admits the full window
        let opts = ScanOptions {
            closed: true,
            ..Default::default()
        };
        assert_eq!(
            longest_strange_segment_exact_with(&path(&[0.5, 2.0, 0.5]), &a, &r, opts)
                .unwrap()
                .r,
            3
        );
        assert_eq!(
            longest_strange_segment_fast_with(&path(&[0.5, 2.0, 0.5]), &a, &r, true)
                .unwrap()
                .r,
            3
        );
        assert_eq!(
            first_hitting_t(&path(&[0.5, 2.0, 0.5]), &a, &r, 1).unwrap(),
            2
        );
    }

    #[test]
    fn monotone_extremes() {
        let a = TargetSet::half_line(0.5);
        let r = linear();
        let up = path(&[1.0; 20]);
        assert_eq!(longest_strange_segment_fast(&up, &a, &r).unwrap().r, 20);
        let down = path(&[0.0; 20]);
        assert_eq!(longest_strange_segment_fast(&down, &a, &r).unwrap().r, 0);
    }

    #[test]
    fn budget_exhausted() {
        let a = TargetSet::half_line(1.0);
        let e = first_hitting_t(&path(&[0.0, 0.0, 0.0]), &a, &linear(), 5).unwrap_err();
        assert_eq!(e, Error::NotFoundWithinBudget { cap: 3 });
    }

    #[test]
    fn fast_scan_refuses_other_sets() {
        let a = TargetSet::half_space(vec![1.0], 1.0).unwrap();
        assert!(matches!(
            longest_strange_segment_fast(&path(&[1.0]), &a, &linear()),
            Err(Error::UnsupportedSet(_))
        ));
    }

    #[test]
    fn exact_and_fast_agree_with_brute_force() {
        let cfg = PathConfig::new(
            CoefficientFamily::iid(),
            InnovationModel::gaussian_1d(1.0).unwrap(),
            60,
            3,
        );
        for k in 0..200 {
            let p = sample_path(&cfg.clone().with_path(k)).unwrap();
            for y in [0.0, 0.5, 1.0] {
                let a = TargetSet::half_line(y);
                let b = brute(&p.x, y);
                assert_eq!(
                    longest_strange_segment_exact(&p, &a, &linear()).unwrap().r,
                    b
                );
                assert_eq!(
                    longest_strange_segment_fast(&p, &a, &linear()).unwrap().r,
                    b
                );
            }
        }
    }

    #[test]
    fn running_values_match_prefix_paths() {
        let cfg = PathConfig::new(
            CoefficientFamily::iid(),
            InnovationModel::gaussian_1d(1.0).unwrap(),
            400,
            5,
        );
        let p = sample_path(&cfg).unwrap();
        let a = TargetSet::half_line(1.0);
        let grid = [10, 50, 100, 400];
        let run = fast_running(&p, &a, &linear(), &grid).unwrap();
        for (m, r) in grid.iter().zip(run) {
            assert_eq!(brute(&p.x[..*m], 1.0), r);
        }
    }

    #[test]
    fn power_normalization_uses_exact_scan_and_speed() {
        let fam = CoefficientFamily::iid();
        let reg = RegimeSpec::new(
            RegimeTag::S3,
            Normalization::Power { omega: 0.75 },
            &fam,
            None,
        )
        .unwrap();
        let p = path(&[1.0, 1.0, 1.0, 1.0]);
        let a = TargetSet::half_line(1.0);
        // S_n / n^{3/4} = n^{1/4} > 1 for n ≥ 2
        let s = longest_strange_segment(&p, &a, &reg).unwrap();
        assert_eq!(s.r, 4);
        let paths = vec![p.clone(), p];
        let t = growth_statistic(&paths, &a, &reg, &[4]).unwrap();
        assert!((t.rows[0].mean - 2.0 / 4f64.ln()).abs() < 1e-12);
        assert_eq!(t.rows[0].std, 0.0);
    }

    #[test]
    fn zero_segments_give_zero_statistic() {
        let paths = vec![path(&[-1.0; 10]), path(&[-2.0; 10])];
        let t = growth_statistic(&paths, &TargetSet::half_line(1.0), &linear(), &[10]).unwrap();
        assert_eq!(t.rows[0].mean, 0.0);
    }

    #[test]
    fn stream_hitting_time_matches_path() {
        let fam = CoefficientFamily::iid();
        let cfg = PathConfig::new(fam, InnovationModel::gaussian_1d(1.0).unwrap(), 500, 12);
        let p = sample_path(&cfg).unwrap();
        let a = TargetSet::half_line(0.8);
        for r in [1, 3, 6] {
            let t1 = first_hitting_t(&p, &a, &linear(), r);
            let mut st = cfg.stream(None).unwrap();
            let t2 = first_hitting_t_stream(&mut st, &a, &linear(), r, 500);
            assert_eq!(t1, t2);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(100, 1_000_000, 2);
        assert_eq!(g.first(), Some(&100));
        assert_eq!(g.last(), Some(&1_000_000));
        assert_eq!(g.len(), 9);
    }
}
