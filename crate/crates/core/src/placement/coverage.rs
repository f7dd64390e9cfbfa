use std::collections::{BinaryHeap, HashMap};

use super::{check_k, dist2, farthest_weighted, GatewaySet, PlacementError, PlacementInput, PlacementStrategy, Provenance};

/// Greedy weighted max-coverage: gateways go on node sites, each pick
/// covering the largest uncovered weight within `radius_m`. Once everything
/// is covered, remaining gateways fall back to weighted farthest-point.
#[derive(Debug, Clone, Copy)]
pub struct MaxCoverage {
    pub radius_m: f64,
}

fn neighbourhoods(positions: &[(f64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let cell = radius.max(f64::MIN_POSITIVE);
    let key = |p: (f64, f64)| ((p.0 / cell).floor() as i64, (p.1 / cell).floor() as i64);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &p) in positions.iter().enumerate() {
        buckets.entry(key(p)).or_default().push(i);
    }
    let r2 = radius * radius;
    positions
        .iter()
        .map(|&p| {
            let (cx, cy) = key(p);
            let mut near = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(cx + dx, cy + dy)) {
                        near.extend(list.iter().copied().filter(|&j| dist2(p, positions[j]) <= r2));
                    }
                }
            }
            near.sort_unstable();
            near
        })
        .collect()
}

#[derive(PartialEq)]
struct Candidate {
    gain: f64,
    site: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gain.total_cmp(&other.gain).then(other.site.cmp(&self.site))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl PlacementStrategy for MaxCoverage {
    fn name(&self) -> &'static str {
        "max_coverage"
    }

    fn place(&self, input: &PlacementInput<'_>, k: usize, seed: u64) -> Result<GatewaySet, PlacementError> {
        let (positions, weights) = (input.positions, input.weights);
        check_k(k, positions.len())?;
        if !(self.radius_m > 0.0) {
            return Err(PlacementError::InvalidInput("coverage radius must be positive".into()));
        }
        let near = neighbourhoods(positions, self.radius_m);
        let mut covered = vec![false; positions.len()];
        let mut taken = vec![false; positions.len()];
        let gain = |site: usize, covered: &[bool]| near[site].iter().filter(|&&j| !covered[j]).map(|&j| weights[j]).sum::<f64>();

        // Gains only shrink as coverage grows, so stale heap entries are
        // upper bounds and can be re-evaluated lazily.
        let mut heap: BinaryHeap<Candidate> =
            (0..positions.len()).map(|site| Candidate { gain: gain(site, &covered), site }).collect();
        let mut sites = Vec::with_capacity(k);
        while sites.len() < k {
            let Some(top) = heap.pop() else { break };
            let fresh = gain(top.site, &covered);
            if fresh <= 0.0 {
                continue;
            }
            if heap.peek().is_some_and(|next| fresh < next.gain || (fresh == next.gain && next.site < top.site)) {
                heap.push(Candidate { gain: fresh, site: top.site });
                continue;
            }
            sites.push(top.site);
            taken[top.site] = true;
            for &j in &near[top.site] {
                covered[j] = true;
            }
        }

        let mut nearest_d2: Vec<f64> = positions
            .iter()
            .map(|&p| sites.iter().map(|&s| dist2(p, positions[s])).fold(f64::INFINITY, f64::min))
            .collect();
        while sites.len() < k {
            let next = farthest_weighted(positions, weights, &nearest_d2, &taken);
            taken[next] = true;
            sites.push(next);
            for (d, &p) in nearest_d2.iter_mut().zip(positions) {
                *d = d.min(dist2(p, positions[next]));
            }
        }

        Ok(GatewaySet {
            strategy: self.name().into(),
            k,
            positions: sites.iter().map(|&s| positions[s]).collect(),
            provenance: Provenance { seed, ..Default::default() },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_heaviest_cluster_first() {
        let pos = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (100.0, 0.0), (101.0, 0.0)];
        let w = [1.0, 1.0, 1.0, 5.0, 5.0];
        let input = PlacementInput::new(&pos, &w).unwrap();
        let set = MaxCoverage { radius_m: 1.5 }.place(&input, 2, 0).unwrap();
        assert_eq!(set.positions, vec![(100.0, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn extra_gateways_after_full_coverage() {
        let pos = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let input = PlacementInput::new(&pos, &[1.0; 3]).unwrap();
        let set = MaxCoverage { radius_m: 10.0 }.place(&input, 3, 0).unwrap();
        assert_eq!(set.positions.len(), 3);
        let mut xs: Vec<f64> = set.positions.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn neighbourhoods_match_brute_force() {
        let pos: Vec<(f64, f64)> = (0..60).map(|i| ((i * 37 % 101) as f64, (i * 53 % 97) as f64)).collect();
        let near = neighbourhoods(&pos, 15.0);
        for (i, list) in near.iter().enumerate() {
            let brute: Vec<usize> = (0..pos.len()).filter(|&j| dist2(pos[i], pos[j]) <= 225.0).collect();
            assert_eq!(list, &brute);
        }
    }
}
