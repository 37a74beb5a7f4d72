//! Princeton WordNet 3.0 flat-file store: parsing, linking, the hypernym
//! taxonomy, cross-version id maps and coverage statistics.

mod coverage;
mod db;
mod id;
mod parse;
mod synset;
mod taxonomy;
mod version_map;

use std::path::{Path, PathBuf};

pub use coverage::{coverage_report, CoverageReport, PosCoverage};
pub use db::{load_db, WordnetDb};
pub use id::{IdError, PartOfSpeech, SynsetId, MAX_OFFSET};
pub use parse::{parse_data_file, parse_index_file, write_data_file, write_data_line, IndexEntry, ParseError};
pub use synset::{index_key, Lemma, Relation, RelationKind, Synset, VerbFrame};
pub use taxonomy::{Taxonomy, TaxonomyNode};
pub use version_map::{Mapped, VersionMap};

#[derive(Debug, thiserror::Error)]
pub enum WordnetError {
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("{file} is not valid UTF-8 (first bad byte at {byte_offset})")]
    Encoding { file: String, byte_offset: usize },
    #[error("unresolved relation targets: {}", format_pairs(.unresolved))]
    Link { unresolved: Vec<(SynsetId, SynsetId)> },
    #[error("missing {file} in {}", .dir.display())]
    MissingFile { file: String, dir: PathBuf },
    #[error("inconsistent wordnet data:\n  {}", .offenders.join("\n  "))]
    Consistency { offenders: Vec<String> },
    #[error("version map line {line}: {message}")]
    VersionMap { line: usize, message: String },
    #[error("synset {0} not found")]
    NotFound(SynsetId),
    #[error("{0} has no hypernym taxonomy")]
    UnsupportedPos(PartOfSpeech),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl WordnetError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn format_pairs(pairs: &[(SynsetId, SynsetId)]) -> String {
    pairs
        .iter()
        .map(|(from, to)| format!("{to} (from {from})"))
        .collect::<Vec<_>>()
        .join(", ")
}
