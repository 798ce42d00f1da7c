//! Loading datasets from files and TOML manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ntriples::{parse_nquads, parse_ntriples, LineError};
use super::{Dataset, DefaultGraph};
use crate::syntax::{Term, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileFormat {
    Ntriples,
    Nquads,
}

impl FileFormat {
    /// Guesses from the extension (`.nq` is N-Quads, anything else N-Triples).
    pub fn from_path(p: &Path) -> FileFormat {
        match p.extension().and_then(|e| e.to_str()) {
            Some("nq") => FileFormat::Nquads,
            _ => FileFormat::Ntriples,
        }
    }
}

/// One input file. `graph` assigns N-Triples content to a named graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub path: PathBuf,
    pub format: FileFormat,
    pub graph: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestFile {
    pub path: PathBuf,
    pub format: Option<FileFormat>,
    pub graph: Option<String>,
}

/// ```toml
/// default_graph = "union"
///
/// [[file]]
/// path = "chembl.nt"
/// graph = "http://example.org/graph/chembl"
/// ```
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub default_graph: DefaultGraph,
    #[serde(default, rename = "file")]
    pub files: Vec<ManifestFile>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: LineError,
    },
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
}

/// Loads files in order. Blank node labels from the second file onwards
/// are suffixed with the file index so files never share blank nodes.
pub fn load(sources: &[Source], default_graph: DefaultGraph) -> Result<Dataset, LoadError> {
    let mut d = Dataset::with_default_graph(default_graph);
    for (idx, src) in sources.iter().enumerate() {
        let text = std::fs::read_to_string(&src.path).map_err(|source| LoadError::Io {
            path: src.path.clone(),
            source,
        })?;
        let parse_err = |source| LoadError::Parse {
            path: src.path.clone(),
            source,
        };
        let scope = |t: Term| match t {
            Term::Blank { label } if idx > 0 => Term::blank(format!("{label}_{idx}")),
            other => other,
        };
        let rescope = |t: Triple| Triple {
            subject: scope(t.subject),
            predicate: t.predicate,
            object: scope(t.object),
        };
        if let Some(g) = &src.graph {
            d.create_graph(g);
        }
        match src.format {
            FileFormat::Ntriples => {
                for t in parse_ntriples(&text).map_err(parse_err)? {
                    d.insert(src.graph.as_deref(), rescope(t));
                }
            }
            FileFormat::Nquads => {
                for q in parse_nquads(&text).map_err(parse_err)? {
                    let g = q.graph.as_deref().or(src.graph.as_deref());
                    d.insert(g, rescope(q.triple));
                }
            }
        }
    }
    Ok(d)
}

/// Reads a manifest; relative file paths resolve against its directory.
pub fn load_manifest(path: &Path) -> Result<Dataset, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let m: Manifest = toml::from_str(&text).map_err(|e| LoadError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let sources: Vec<Source> = m
        .files
        .iter()
        .map(|f| {
            let p = dir.join(&f.path);
            Source {
                format: f.format.unwrap_or_else(|| FileFormat::from_path(&p)),
                path: p,
                graph: f.graph.clone(),
            }
        })
        .collect();
    load(&sources, m.default_graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_assigns_graphs_and_scopes_blanks() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.nt"), "_:x <http://p> <http://o> .\n").unwrap();
        std::fs::write(dir.path().join("b.nt"), "_:x <http://p> <http://o> .\n").unwrap();
        std::fs::write(dir.path().join("empty.nt"), "").unwrap();
        std::fs::write(
            dir.path().join("m.toml"),
            "[[file]]\npath = \"a.nt\"\ngraph = \"http://g/a\"\n\
             [[file]]\npath = \"b.nt\"\ngraph = \"http://g/b\"\n\
             [[file]]\npath = \"empty.nt\"\ngraph = \"http://g/e\"\n",
        )
        .unwrap();
        let d = load_manifest(&dir.path().join("m.toml")).unwrap();
        assert_eq!(d.graph_names().count(), 3);
        assert_eq!(d.named_graph("http://g/e").unwrap().len(), 0);
        assert_eq!(d.default_graph().len(), 2);
    }

    #[test]
    fn parse_error_names_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.nt");
        std::fs::write(&p, "<http://s> <http://p> .\n").unwrap();
        let e = load(
            &[Source {
                path: p,
                format: FileFormat::Ntriples,
                graph: None,
            }],
            DefaultGraph::Union,
        )
        .unwrap_err();
        assert!(e.to_string().contains("bad.nt"), "{e}");
        assert!(e.to_string().contains("line 1"), "{e}");
    }
}
