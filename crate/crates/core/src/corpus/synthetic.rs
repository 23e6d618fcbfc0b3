//! Small generated corpora for examples, tests and smoke runs.
//!
//! Every class owns a pool of topic words; documents mix topic words with
//! words from a pool shared by all classes. `topic_ratio` controls how
//! separable the classes are.

use super::LabeledCorpus;
use crate::numcore::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopicCorpusSpec {
    pub classes: usize,
    pub docs_per_class: usize,
    pub words_per_doc: usize,
    pub topic_words: usize,
    pub shared_words: usize,
    /// Probability that a token is drawn from the document's class pool.
    pub topic_ratio: f64,
}

impl Default for TopicCorpusSpec {
    fn default() -> Self {
        TopicCorpusSpec {
            classes: 4,
            docs_per_class: 50,
            words_per_doc: 12,
            topic_words: 30,
            shared_words: 60,
            topic_ratio: 0.5,
        }
    }
}

pub fn topic_corpus(spec: &TopicCorpusSpec, seed: u64) -> LabeledCorpus {
    let mut rng = SeededRng::new(seed);
    let mut texts = Vec::with_capacity(spec.classes * spec.docs_per_class);
    // interleave classes so file-order prefixes stay roughly balanced
    for i in 0..spec.docs_per_class * spec.classes {
        let class = i % spec.classes;
        let words: Vec<String> = (0..spec.words_per_doc)
            .map(|_| {
                if rng.uniform() < spec.topic_ratio {
                    format!("t{class}w{}", rng.below(spec.topic_words.max(1)))
                } else {
                    format!("s{}", rng.below(spec.shared_words.max(1)))
                }
            })
            .collect();
        texts.push((words.join(" "), class));
    }
    let names = (0..spec.classes).map(|c| format!("topic{c}")).collect();
    LabeledCorpus::from_texts(texts, names).expect("labels are below the class count")
}

/// Renders a corpus with at most four classes in the AG News CSV layout
/// (first two words become the title).
pub fn to_ag_news_csv(corpus: &LabeledCorpus) -> String {
    assert!(corpus.num_classes() <= 4, "AG News layout has 4 classes");
    let mut out = String::new();
    for doc in corpus.documents() {
        let mut words = doc.text.splitn(3, ' ');
        let title = [words.next(), words.next()]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join(" ");
        let body = words.next().unwrap_or("");
        out.push_str(&format!("{},\"{}\",\"{}\"\n", doc.label + 1, title, body));
    }
    out
}

/// Renders a corpus with at most sixteen classes in the MBTI CSV layout,
/// mapping class `i` to the i-th type code and splitting each document into
/// `|||`-joined posts of four words.
pub fn to_mbti_csv(corpus: &LabeledCorpus) -> String {
    let codes = super::MBTI_TYPES;
    assert!(corpus.num_classes() <= codes.len());
    let mut out = String::from("type,posts\n");
    for doc in corpus.documents() {
        let words: Vec<&str> = doc.text.split(' ').collect();
        let posts: Vec<String> = words.chunks(4).map(|c| c.join(" ")).collect();
        out.push_str(&format!("{},\"{}\"\n", codes[doc.label], posts.join("|||")));
    }
    out
}
