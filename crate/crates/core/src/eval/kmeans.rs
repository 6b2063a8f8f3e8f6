use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::SeedRng;

pub const DEFAULT_MAX_ITER: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    /// Within-cluster sum of squares after seeding and after each Lloyd
    /// iteration.
    pub inertia: Vec<f64>,
}

impl KMeansResult {
    pub fn final_inertia(&self) -> f64 {
        *self.inertia.last().expect("at least the seeding inertia")
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assign(points: &Matrix, centroids: &Matrix, labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let row = points.row(i);
        let mut best = (0, f64::INFINITY);
        for c in 0..centroids.rows() {
            let d = sq_dist(row, centroids.row(c));
            if d < best.1 {
                best = (c, d);
            }
        }
        *label = best.0;
        inertia += best.1;
    }
    inertia
}

/// k-means++ seeding followed by Lloyd iterations until labels stop
/// changing or `max_iter` is reached. A cluster that loses all its points is
/// moved to the point farthest from its current centroid.
pub fn kmeans(points: &Matrix, k: usize, seed: u64, max_iter: usize) -> Result<KMeansResult> {
    let (n, d) = points.shape();
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(alloc::format!("k = {k} for {n} points")));
    }
    let mut rng = SeedRng::new(seed);
    let mut centroids = Matrix::zeros(k, d);
    centroids.row_mut(0).copy_from_slice(points.row(rng.below(n)));
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), centroids.row(0))).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            rng.categorical(&nearest)
        } else {
            rng.below(n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, best) in nearest.iter_mut().enumerate() {
            *best = best.min(sq_dist(points.row(i), centroids.row(c)));
        }
    }

    let mut labels = vec![0; n];
    let mut inertia = vec![assign(points, &centroids, &mut labels)];
    for _ in 0..max_iter {
        let mut sums = Matrix::zeros(k, d);
        let mut sizes = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            for (s, v) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
                *s += v;
            }
        }
        for c in 0..k {
            if sizes[c] == 0 {
                continue;
            }
            let m = sizes[c] as f64;
            for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s / m;
            }
        }
        for c in (0..k).filter(|&c| sizes[c] == 0) {
            let far = (0..n)
                .map(|i| (i, sq_dist(points.row(i), centroids.row(labels[i]))))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
                .0;
            centroids.row_mut(c).copy_from_slice(points.row(far));
            labels[far] = c;
        }
        let before = labels.clone();
        inertia.push(assign(points, &centroids, &mut labels));
        if labels == before {
            break;
        }
    }
    Ok(KMeansResult {
        labels,
        centroids,
        inertia,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_points_each_own_cluster() {
        let p = Matrix::from_rows(&[vec![0.0, 0.0], vec![5.0, 1.0], vec![-3.0, 2.0]]).unwrap();
        let r = kmeans(&p, 3, 1, DEFAULT_MAX_ITER).unwrap();
        let mut l = r.labels.clone();
        l.sort_unstable();
        assert_eq!(l, [0, 1, 2]);
        assert_eq!(r.final_inertia(), 0.0);
    }

    #[test]
    fn two_blobs() {
        let mut rng = SeedRng::new(3);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let c = if i < 20 { -10.0 } else { 10.0 };
                vec![c + rng.normal(), rng.normal()]
            })
            .collect();
        let p = Matrix::from_rows(&rows).unwrap();
        let r = kmeans(&p, 2, 9, DEFAULT_MAX_ITER).unwrap();
        assert!(r.labels[..20].iter().all(|&l| l == r.labels[0]));
        assert!(r.labels[20..].iter().all(|&l| l == r.labels[20]));
        assert_ne!(r.labels[0], r.labels[20]);
        assert!(r.inertia.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    }

    #[test]
    fn bad_k() {
        let p = Matrix::zeros(2, 1);
        assert!(kmeans(&p, 0, 0, 10).is_err());
        assert!(kmeans(&p, 3, 0, 10).is_err());
    }
}
