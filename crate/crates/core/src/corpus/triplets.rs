use crate::error::{Error, Result};
use crate::numcore::SeededRng;

/// Indices of an anchor, a same-class positive and an other-class negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
}

/// Uniform triplet sampler over a fixed label vector.
///
/// Anchors are uniform over documents whose class has at least two members
/// (drawn uniformly over all documents, redrawing singletons), positives
/// uniform over the anchor's class minus the anchor, negatives uniform over
/// every document of another class.
#[derive(Debug, Clone)]
pub struct TripletSampler {
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl TripletSampler {
    pub fn new(labels: &[usize]) -> Result<Self> {
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        let mut members = vec![Vec::new(); classes];
        for (i, &l) in labels.iter().enumerate() {
            members[l].push(i);
        }
        let present = members.iter().filter(|m| !m.is_empty()).count();
        if present < 2 {
            return Err(Error::Config(format!(
                "triplet sampling needs at least 2 classes, found {present}"
            )));
        }
        if members.iter().all(|m| m.len() < 2) {
            return Err(Error::Config(
                "triplet sampling needs a class with at least 2 documents".into(),
            ));
        }
        Ok(TripletSampler {
            labels: labels.to_vec(),
            members,
        })
    }

    pub fn sample_one(&self, rng: &mut SeededRng) -> Triplet {
        let n = self.labels.len();
        let (anchor, class) = loop {
            let a = rng.below(n);
            let c = self.labels[a];
            if self.members[c].len() >= 2 {
                break (a, c);
            }
        };
        let same = &self.members[class];
        let mut k = rng.below(same.len() - 1);
        if same[k] == anchor {
            k = same.len() - 1;
        }
        let positive = same[k];

        let mut r = rng.below(n - same.len());
        let mut negative = usize::MAX;
        for (c, m) in self.members.iter().enumerate() {
            if c == class {
                continue;
            }
            if r < m.len() {
                negative = m[r];
                break;
            }
            r -= m.len();
        }
        Triplet {
            anchor,
            positive,
            negative,
        }
    }

    pub fn sample(&self, batch: usize, rng: &mut SeededRng) -> Vec<Triplet> {
        (0..batch).map(|_| self.sample_one(rng)).collect()
    }
}

pub fn sample_triplets(
    labels: &[usize],
    batch: usize,
    rng: &mut SeededRng,
) -> Result<Vec<Triplet>> {
    Ok(TripletSampler::new(labels)?.sample(batch, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn valid(t: &Triplet, labels: &[usize]) -> bool {
        labels[t.anchor] == labels[t.positive]
            && labels[t.anchor] != labels[t.negative]
            && t.anchor != t.positive
    }

    #[test]
    fn small_balanced() {
        let labels = [0, 0, 1, 1];
        let ts = sample_triplets(&labels, 8, &mut SeededRng::new(3)).unwrap();
        assert_eq!(ts.len(), 8);
        assert!(ts.iter().all(|t| valid(t, &labels)));
    }

    #[test]
    fn singletons_only_is_an_error() {
        assert!(sample_triplets(&[0, 1], 4, &mut SeededRng::new(3)).is_err());
        assert!(sample_triplets(&[0, 0, 0], 4, &mut SeededRng::new(3)).is_err());
    }

    #[test]
    fn singleton_anchor_is_redrawn() {
        let labels = [0, 0, 1];
        let ts = sample_triplets(&labels, 200, &mut SeededRng::new(5)).unwrap();
        assert!(ts.iter().all(|t| valid(t, &labels) && t.negative == 2));
    }

    #[test]
    fn deterministic() {
        let labels = [0, 1, 2, 0, 1, 2, 0];
        let a = sample_triplets(&labels, 50, &mut SeededRng::new(8)).unwrap();
        let b = sample_triplets(&labels, 50, &mut SeededRng::new(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn covers_all_negatives() {
        let labels = [0, 0, 1, 2, 2, 3];
        let ts = sample_triplets(&labels, 2000, &mut SeededRng::new(1)).unwrap();
        for target in 0..labels.len() {
            assert!(ts.iter().any(|t| t.negative == target));
        }
    }

    proptest! {
        #[test]
        fn every_triplet_is_valid(labels in proptest::collection::vec(0usize..5, 2..40), seed in any::<u64>()) {
            match TripletSampler::new(&labels) {
                Ok(s) => {
                    let mut rng = SeededRng::new(seed);
                    for t in s.sample(64, &mut rng) {
                        prop_assert!(valid(&t, &labels));
                    }
                }
                Err(_) => {
                    let mut counts = [0usize; 5];
                    labels.iter().for_each(|&l| counts[l] += 1);
                    let present = counts.iter().filter(|&&c| c > 0).count();
                    prop_assert!(present < 2 || counts.iter().all(|&c| c < 2));
                }
            }
        }
    }
}
