//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, derive_seed};
use crate::potentials::Mat;

pub const DEFAULT_RESTARTS: usize = 10;
const MAX_LLOYD_ITERS: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeans {
    /// Labels numbered in order of first appearance.
    pub labels: Vec<usize>,
    pub centroids: Mat,
    pub inertia: f64,
}

fn sq_dist(points: &Mat, i: usize, centroids: &Mat, c: usize) -> f64 {
    points
        .row(i)
        .iter()
        .zip(centroids.row(c).iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

/// Cluster the rows of `points` into `k` classes. Deterministic in `seed`.
pub fn kmeans(points: &Mat, k: usize, seed: u64, restarts: usize) -> Result<KMeans> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::TooFewPoints { points: n, k });
    }
    let mut best: Option<KMeans> = None;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let run = lloyd(points, k, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");
    relabel(&mut best, k);
    Ok(best)
}

fn seed_plus_plus(points: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Mat {
    let n = points.nrows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut dist: Vec<f64> = (0..n)
        .map(|i| {
            points
                .row(i)
                .iter()
                .zip(points.row(chosen[0]).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum()
        })
        .collect();
    while chosen.len() < k {
        let total: f64 = dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in dist.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total mass")
        } else {
            (0..n).find(|i| !chosen.contains(i)).expect("k ≤ n")
        };
        chosen.push(next);
        for (i, slot) in dist.iter_mut().enumerate() {
            let d: f64 = points
                .row(i)
                .iter()
                .zip(points.row(next).iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            *slot = slot.min(d);
        }
    }
    Mat::from_fn(k, points.ncols(), |c, j| points[(chosen[c], j)])
}

fn lloyd(points: &Mat, k: usize, rng: &mut ChaCha8Rng) -> KMeans {
    let n = points.nrows();
    let mut centroids = seed_plus_plus(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..MAX_LLOYD_ITERS {
        let mut changed = false;
        for (i, label) in labels.iter_mut().enumerate() {
            let mut best = 0;
            let mut best_d = sq_dist(points, i, &centroids, 0);
            for c in 1..k {
                let d = sq_dist(points, i, &centroids, c);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if *label != best {
                *label = best;
                changed = true;
            }
        }
        repair_empty(points, k, &mut labels, &centroids);
        centroids = means(points, k, &labels);
        if !changed {
            break;
        }
    }
    let inertia = compensated_sum((0..n).map(|i| sq_dist(points, i, &centroids, labels[i])));
    KMeans { labels, centroids, inertia }
}

/// Move the point farthest from its centroid (among classes with more than
/// one member, lowest index on ties) into each empty class.
fn repair_empty(points: &Mat, k: usize, labels: &mut [usize], centroids: &Mat) {
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut pick = None;
        let mut pick_d = -1.0;
        for i in 0..labels.len() {
            if sizes[labels[i]] > 1 {
                let d = sq_dist(points, i, centroids, labels[i]);
                if d > pick_d {
                    pick = Some(i);
                    pick_d = d;
                }
            }
        }
        labels[pick.expect("k ≤ n guarantees a donor")] = empty;
    }
}

fn means(points: &Mat, k: usize, labels: &[usize]) -> Mat {
    let mut sums = Mat::zeros(k, points.ncols());
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l] += 1;
        let mut row = sums.row_mut(l);
        row += points.row(i);
    }
    for c in 0..k {
        if counts[c] > 0 {
            sums.row_mut(c).scale_mut(1.0 / counts[c] as f64);
        }
    }
    sums
}

fn relabel(result: &mut KMeans, k: usize) {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    for &l in &result.labels {
        if map[l] == usize::MAX {
            map[l] = next;
            next += 1;
        }
    }
    let old = result.centroids.clone();
    for (c, &to) in map.iter().enumerate() {
        if to != usize::MAX {
            result.centroids.set_row(to, &old.row(c));
        }
    }
    for l in &mut result.labels {
        *l = map[*l];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn separates_two_blobs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = Normal::new(0.0, 0.3).unwrap();
        let mut pts = Mat::zeros(60, 2);
        for i in 0..60 {
            let c = if i % 2 == 0 { 0.0 } else { 5.0 };
            pts[(i, 0)] = c + noise.sample(&mut rng);
            pts[(i, 1)] = c + noise.sample(&mut rng);
        }
        let res = kmeans(&pts, 2, 7, 10).unwrap();
        for i in 0..60 {
            assert_eq!(res.labels[i], i % 2);
        }
    }

    #[test]
    fn identical_points_single_class() {
        let pts = Mat::from_element(5, 3, 1.5);
        let res = kmeans(&pts, 1, 0, 3).unwrap();
        assert_eq!(res.labels, vec![0; 5]);
        assert_eq!(res.inertia, 0.0);
    }

    #[test]
    fn one_class_per_point() {
        let pts = Mat::from_fn(6, 2, |i, j| (i * 3 + j) as f64);
        let res = kmeans(&pts, 6, 4, 2).unwrap();
        assert_eq!(res.labels, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn duplicates_still_fill_every_class() {
        let mut pts = Mat::zeros(5, 1);
        pts[(4, 0)] = 1.0;
        let res = kmeans(&pts, 3, 9, 2).unwrap();
        let mut seen = res.labels.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn too_few_points() {
        let pts = Mat::zeros(2, 2);
        assert!(matches!(kmeans(&pts, 3, 0, 1), Err(Error::TooFewPoints { points: 2, k: 3 })));
    }

    #[test]
    fn deterministic_in_seed() {
        let pts = Mat::from_fn(40, 3, |i, j| ((i * 7 + j * 13) % 11) as f64);
        let a = kmeans(&pts, 4, 123, 5).unwrap();
        let b = kmeans(&pts, 4, 123, 5).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia.to_bits(), b.inertia.to_bits());
    }
}
