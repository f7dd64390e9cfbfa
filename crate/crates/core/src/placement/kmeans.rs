use super::{
    check_k, dist2, farthest_weighted, weighted_objective, GatewaySet, PlacementError, PlacementInput,
    PlacementStrategy, Provenance,
};

/// Weighted k-means over node positions, weights from centrality and flow.
#[derive(Debug, Clone, Copy)]
pub struct DegreeCentrality {
    pub max_iterations: usize,
    /// Stop once no center moves more than this fraction of the bbox diagonal.
    pub tolerance: f64,
}

impl Default for DegreeCentrality {
    fn default() -> Self {
        DegreeCentrality { max_iterations: 100, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub centers: Vec<(f64, f64)>,
    pub assignment: Vec<usize>,
    pub iterations: usize,
    /// Objective of the seeding, then after every Lloyd step.
    pub objective_history: Vec<f64>,
}

fn nearest(p: (f64, f64), centers: &[(f64, f64)]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, &c) in centers.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Deterministic weighted farthest-point seeding: the heaviest node first,
/// then repeatedly the node maximising `w · d²` to its nearest chosen center.
fn seed_centers(positions: &[(f64, f64)], weights: &[f64], k: usize) -> Vec<(f64, f64)> {
    let first = weights
        .iter()
        .enumerate()
        .fold(0, |best, (i, &w)| if w > weights[best] { i } else { best });
    let mut taken = vec![false; positions.len()];
    taken[first] = true;
    let mut centers = vec![positions[first]];
    let mut nearest_d2: Vec<f64> = positions.iter().map(|&p| dist2(p, positions[first])).collect();
    while centers.len() < k {
        let next = farthest_weighted(positions, weights, &nearest_d2, &taken);
        taken[next] = true;
        let c = positions[next];
        centers.push(c);
        for (d, &p) in nearest_d2.iter_mut().zip(positions) {
            *d = d.min(dist2(p, c));
        }
    }
    centers
}

pub fn weighted_kmeans(
    input: &PlacementInput<'_>,
    k: usize,
    max_iterations: usize,
    tolerance: f64,
) -> Result<KMeansOutcome, PlacementError> {
    let (positions, weights) = (input.positions, input.weights);
    check_k(k, positions.len())?;
    if !weights.iter().any(|&w| w > 0.0) {
        return Err(PlacementError::AllZeroWeights);
    }

    let mut centers = seed_centers(positions, weights, k);
    let stop = tolerance * input.bbox.diagonal();
    let mut assignment = vec![0; positions.len()];
    let mut history = vec![weighted_objective(positions, weights, &centers)];
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let mut sum = vec![(0.0, 0.0, 0.0); k];
        let mut members = vec![0usize; k];
        for (i, &p) in positions.iter().enumerate() {
            let (j, _) = nearest(p, &centers);
            assignment[i] = j;
            members[j] += 1;
            let w = weights[i];
            sum[j].0 += w * p.0;
            sum[j].1 += w * p.1;
            sum[j].2 += w;
        }

        let mut updated = centers.clone();
        for j in 0..k {
            // zero-weight clusters keep their center; the objective ignores them
            if sum[j].2 > 0.0 {
                updated[j] = (sum[j].0 / sum[j].2, sum[j].1 / sum[j].2);
            }
        }
        for j in 0..k {
            if members[j] == 0 {
                let taken: Vec<bool> = positions.iter().map(|p| updated.contains(p)).collect();
                let nearest_d2: Vec<f64> = positions.iter().map(|&p| nearest(p, &updated).1).collect();
                updated[j] = positions[farthest_weighted(positions, weights, &nearest_d2, &taken)];
            }
        }

        let moved = centers
            .iter()
            .zip(&updated)
            .map(|(&a, &b)| dist2(a, b).sqrt())
            .fold(0.0, f64::max);
        centers = updated;
        let objective = weighted_objective(positions, weights, &centers);
        debug_assert!(
            objective <= history.last().unwrap() * (1.0 + 1e-9) + 1e-12,
            "k-means objective increased"
        );
        history.push(objective);
        if moved <= stop {
            break;
        }
    }
    for (i, &p) in positions.iter().enumerate() {
        assignment[i] = nearest(p, &centers).0;
    }
    Ok(KMeansOutcome { centers, assignment, iterations, objective_history: history })
}

impl PlacementStrategy for DegreeCentrality {
    fn name(&self) -> &'static str {
        "degree_centrality"
    }

    fn place(&self, input: &PlacementInput<'_>, k: usize, seed: u64) -> Result<GatewaySet, PlacementError> {
        let out = weighted_kmeans(input, k, self.max_iterations, self.tolerance)?;
        Ok(GatewaySet {
            strategy: self.name().into(),
            k,
            positions: out.centers,
            provenance: Provenance {
                seed,
                iterations: Some(out.iterations),
                objective_history: out.objective_history,
                ..Default::default()
            },
        })
    }
}
