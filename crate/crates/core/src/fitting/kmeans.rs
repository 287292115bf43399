//! Seeded k-means (k-means++ initialization, Lloyd iterations, restarts).

use rand::Rng;

const MAX_ITER: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeans {
    pub labels: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of `restarts` k-means runs by inertia; earlier runs win ties.
///
/// `points` must be non-empty and share one dimension; `1 <= k`. When there
/// are fewer distinct points than `k`, some clusters stay empty.
pub fn kmeans<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, restarts: usize, rng: &mut R) -> KMeans {
    assert!(!points.is_empty() && k >= 1, "kmeans needs points and k >= 1");
    let mut best: Option<KMeans> = None;
    for _ in 0..restarts.max(1) {
        let run = lloyd(points, plus_plus_init(points, k, rng));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    best.expect("at least one restart")
}

fn plus_plus_init<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // every point coincides with a center
            0
        };
        centers.push(points[pick].clone());
        let c = centers.last().expect("just pushed");
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, c));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>) -> KMeans {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..MAX_ITER {
        let mut changed = false;
        let mut dists = vec![0.0; points.len()];
        for (i, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            dists[i] = d;
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }

        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        // reseed empty clusters from the points farthest from their center
        let mut taken = vec![false; points.len()];
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far: Option<usize> = None;
            for i in 0..points.len() {
                if taken[i] || counts[labels[i]] <= 1 || dists[i] <= 0.0 {
                    continue;
                }
                if far.is_none_or(|f| dists[i] > dists[f]) {
                    far = Some(i);
                }
            }
            if let Some(i) = far {
                taken[i] = true;
                counts[labels[i]] -= 1;
                labels[i] = c;
                counts[c] = 1;
                dists[i] = 0.0;
                changed = true;
            }
        }

        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &l) in points.iter().zip(&labels) {
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        if !changed {
            break;
        }
    }
    let inertia = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum();
    KMeans {
        labels,
        centers,
        inertia,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn separates_two_blobs() {
        let mut pts = Vec::new();
        for i in 0..20 {
            let e = i as f64 * 0.001;
            pts.push(vec![0.0 + e, 1.0 - e]);
            pts.push(vec![5.0 - e, -3.0 + e]);
        }
        let km = kmeans(&pts, 2, 10, &mut substream(1, &[]));
        for i in (0..40).step_by(2) {
            assert_eq!(km.labels[i], km.labels[0]);
            assert_eq!(km.labels[i + 1], km.labels[1]);
        }
        assert_ne!(km.labels[0], km.labels[1]);
    }

    #[test]
    fn single_cluster() {
        let pts = vec![vec![1.0], vec![2.0], vec![3.0]];
        let km = kmeans(&pts, 1, 3, &mut substream(1, &[]));
        assert_eq!(km.labels, vec![0, 0, 0]);
        assert!((km.inertia - 2.0).abs() < 1e-12);
    }

    #[test]
    fn duplicates_leave_clusters_empty_without_panicking() {
        let pts = vec![vec![1.0, 0.0]; 6];
        let km = kmeans(&pts, 3, 4, &mut substream(2, &[]));
        assert!(km.labels.iter().all(|&l| l == km.labels[0]));
        assert_eq!(km.inertia, 0.0);
    }

    #[test]
    fn every_cluster_used_when_points_are_distinct() {
        let pts: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64]).collect();
        for seed in 0..10 {
            let km = kmeans(&pts, 5, 1, &mut substream(seed, &[]));
            let mut used = km.labels.clone();
            used.sort_unstable();
            used.dedup();
            assert_eq!(used.len(), 5);
        }
    }
}
