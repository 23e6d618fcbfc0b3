//! Fits TF-IDF on a small corpus and prints the weighted vectors.
//!
//! cargo run --example tfidf_baseline

use manifold_embed::baselines::fit_tfidf;
use manifold_embed::corpus::{build_vocabulary, LabeledCorpus};

fn main() -> manifold_embed::Result<()> {
    let corpus = LabeledCorpus::from_texts(
        [
            ("apple banana apple", 0),
            ("banana cherry", 1),
            ("cherry date date date", 0),
        ],
        vec!["fruit".into(), "other".into()],
    )?;
    let vocab = build_vocabulary(&corpus, 100, 1);
    let tfidf = fit_tfidf(&corpus, &vocab);
    let columns = &vocab.tokens()[2..];
    println!("{:<24} {}", "document", columns.join("      "));
    for doc in corpus.documents() {
        let row: Vec<String> = tfidf
            .transform(doc)
            .iter()
            .map(|x| format!("{x:.4}"))
            .collect();
        println!("{:<24} {}", doc.text, row.join("  "));
    }
    for t in columns {
        println!("idf({t}) = {:.4}", tfidf.idf(t).unwrap_or(f64::NAN));
    }
    Ok(())
}
