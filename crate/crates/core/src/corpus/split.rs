use super::LabeledCorpus;
use crate::error::{Error, Result};
use crate::numcore::SeededRng;

/// Per-class shuffle-and-cut. Each class sends
/// `round(size * test_fraction)` documents, clamped to `[1, size - 1]`, to
/// the test side. Both outputs keep the input's document order.
pub fn stratified_split(
    corpus: &LabeledCorpus,
    test_fraction: f64,
    rng: &mut SeededRng,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Config(format!(
            "test fraction must lie strictly between 0 and 1, got {test_fraction}"
        )));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); corpus.num_classes()];
    for (pos, doc) in corpus.documents().iter().enumerate() {
        members[doc.label].push(pos);
    }
    let mut is_test = vec![false; corpus.len()];
    for (class, positions) in members.iter_mut().enumerate() {
        let size = positions.len();
        if size == 0 {
            continue;
        }
        if size < 2 {
            return Err(Error::Config(format!(
                "class {:?} has {size} document; splitting needs at least 2",
                corpus.label_names()[class]
            )));
        }
        let n_test = ((size as f64 * test_fraction).round() as usize).clamp(1, size - 1);
        rng.shuffle(positions);
        for &p in &positions[..n_test] {
            is_test[p] = true;
        }
    }
    let (test, train): (Vec<usize>, Vec<usize>) = (0..corpus.len()).partition(|&p| is_test[p]);
    Ok((corpus.subset(&train), corpus.subset(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced(per_class: usize, classes: usize) -> LabeledCorpus {
        LabeledCorpus::from_texts(
            (0..per_class * classes).map(|i| (format!("doc {i}"), i % classes)),
            (0..classes).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn eighty_twenty_per_class() {
        let c = balanced(100, 4);
        let (train, test) = stratified_split(&c, 0.2, &mut SeededRng::new(1)).unwrap();
        assert_eq!(train.class_counts(), vec![80; 4]);
        assert_eq!(test.class_counts(), vec![20; 4]);
        let mut ids: Vec<usize> = train
            .documents()
            .iter()
            .chain(test.documents())
            .map(|d| d.id)
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..400).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic() {
        let c = balanced(30, 3);
        let a = stratified_split(&c, 0.3, &mut SeededRng::new(9)).unwrap();
        let b = stratified_split(&c, 0.3, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singleton_class_is_rejected() {
        let c = LabeledCorpus::from_texts(
            [("a", 0), ("b", 0), ("c", 1)],
            vec!["big".into(), "lonely".into()],
        )
        .unwrap();
        let err = stratified_split(&c, 0.5, &mut SeededRng::new(1)).unwrap_err();
        assert!(err.to_string().contains("lonely"));
    }

    #[test]
    fn clamp_keeps_both_sides_non_empty() {
        let c = balanced(2, 2);
        let (train, test) = stratified_split(&c, 0.01, &mut SeededRng::new(1)).unwrap();
        assert_eq!(train.class_counts(), vec![1, 1]);
        assert_eq!(test.class_counts(), vec![1, 1]);
    }
}
