//! The semantic map: one node per vocabulary word, sized by the log of its
//! count and colored by factor, joined by cosine-weighted edges.

pub mod pajek;
pub mod tables;

use crate::cooccurrence::EdgeList;
use crate::corpus::{FrequencyTable, Vocabulary};
use crate::error::{Error, Result};
use crate::factors::FactorReport;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub label: String,
    pub count: u64,
    /// Natural log of `count`.
    pub size: f64,
    /// Factor number, 0 when the word has no positive loading.
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemanticGraph {
    pub nodes: Vec<Node>,
    pub edges: EdgeList,
}

impl SemanticGraph {
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .edges
            .iter()
            .filter(|e| e.source == node || e.target == node)
            .count()
    }
}

pub fn build_semantic_graph(
    vocab: &Vocabulary,
    table: &FrequencyTable,
    edges: &EdgeList,
    report: &FactorReport,
) -> Result<SemanticGraph> {
    let n = vocab.len();
    if report.loadings.labels() != vocab.labels() {
        return Err(Error::VocabularyMismatch(
            "factor report rows differ from the vocabulary".into(),
        ));
    }
    if let Some(e) = edges.edges.iter().find(|e| e.source >= n || e.target >= n) {
        return Err(Error::VocabularyMismatch(format!(
            "edge ({}, {}) outside {n} nodes",
            e.source, e.target
        )));
    }
    let mut nodes = Vec::with_capacity(n);
    for (i, word) in vocab.words().iter().enumerate() {
        let count = table.count(word);
        if count != vocab.counts()[i] {
            return Err(Error::VocabularyMismatch(format!(
                "`{word}` counted {count} times in the table but {} in the vocabulary",
                vocab.counts()[i]
            )));
        }
        nodes.push(Node {
            label: vocab.labels()[i].clone(),
            count,
            size: (count as f64).ln(),
            cluster: report.assignment[i].cluster_id(),
        });
    }
    Ok(SemanticGraph {
        nodes,
        edges: edges.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccurrence::{
        build_occurrence_matrix, cosine_matrix, threshold_edges, MatrixMode,
    };
    use crate::corpus::{build_frequency_table, select_vocabulary, Document};
    use crate::factors::analyze;
    use crate::segmenter::Token;

    fn fixture() -> (Vocabulary, FrequencyTable, EdgeList, FactorReport) {
        let docs: Vec<Document> = [
            "学报 大学",
            "学报 大学",
            "学报 学院",
            "医学 临床",
            "医学 临床",
            "医学",
            "学报",
            "杂志",
            "杂志 学报",
            "大学",
            "学院 学报",
            "临床",
            "学院",
        ]
        .iter()
        .enumerate()
        .map(|(i, s)| Document {
            id: i.to_string(),
            raw: s.to_string(),
            tokens: Some(s.split(' ').map(Token::infer).collect()),
        })
        .collect();
        let table = build_frequency_table(&docs).unwrap();
        let vocab = select_vocabulary(&table, 2).unwrap();
        let occ = build_occurrence_matrix(&docs, &vocab, MatrixMode::Count).unwrap();
        let sim = cosine_matrix(&occ).unwrap();
        let edges = threshold_edges(&sim, 0.5);
        let report = analyze(&occ, 2).unwrap();
        (vocab, table, edges, report)
    }

    #[test]
    fn nodes_follow_vocabulary() {
        let (vocab, table, edges, report) = fixture();
        let g = build_semantic_graph(&vocab, &table, &edges, &report).unwrap();
        assert_eq!(g.nodes.len(), vocab.len());
        for (node, label) in g.nodes.iter().zip(vocab.labels()) {
            assert_eq!(&node.label, label);
            assert_eq!(node.size, (node.count as f64).ln());
            assert!(node.cluster <= 2);
        }
    }

    #[test]
    fn size_is_natural_log() {
        assert_eq!(format!("{:.6}", 10f64.ln()), "2.302585");
    }

    #[test]
    fn isolated_nodes_are_kept() {
        let (vocab, table, mut edges, report) = fixture();
        edges.edges.clear();
        let g = build_semantic_graph(&vocab, &table, &edges, &report).unwrap();
        assert_eq!(g.nodes.len(), vocab.len());
        assert!((0..g.nodes.len()).all(|i| g.degree(i) == 0));
    }

    #[test]
    fn unassigned_maps_to_zero() {
        let (vocab, table, edges, mut report) = fixture();
        report.assignment[0] = crate::factors::Assignment::Unassigned;
        let g = build_semantic_graph(&vocab, &table, &edges, &report).unwrap();
        assert_eq!(g.nodes[0].cluster, 0);
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let (vocab, table, edges, report) = fixture();
        let smaller = vocab.without(&[0]);
        assert!(matches!(
            build_semantic_graph(&smaller, &table, &edges, &report),
            Err(Error::VocabularyMismatch(_))
        ));
        let mut bad = edges.clone();
        bad.edges.push(crate::cooccurrence::Edge {
            source: 0,
            target: 99,
            weight: 0.9,
        });
        assert!(build_semantic_graph(&vocab, &table, &bad, &report).is_err());
    }
}
