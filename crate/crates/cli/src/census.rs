//! Census of irreducible ladderful diagrams per rank, with DOT export.

use serde::Serialize;

use rab_core::diagram::{enumerate_ladderful, Diagram};
use rab_core::dot::diagram_to_dot;

use crate::spec::CliError;

#[derive(Debug, Serialize)]
pub struct CensusTable {
    pub per_rank: Vec<CensusRow>,
}

#[derive(Debug, Serialize)]
pub struct CensusRow {
    pub rank: usize,
    pub count: usize,
    #[serde(skip)]
    pub diagrams: Vec<Diagram>,
}

pub fn census(max_rank: usize) -> Result<CensusTable, CliError> {
    let mut per_rank = Vec::new();
    for rank in 1..=max_rank {
        let diagrams = enumerate_ladderful(rank).map_err(CliError::from)?;
        per_rank.push(CensusRow {
            rank,
            count: diagrams.len(),
            diagrams,
        });
    }
    Ok(CensusTable { per_rank })
}

pub fn render_text(t: &CensusTable) -> String {
    let mut out = String::from("rank  irreducible ladderful diagrams\n");
    for row in &t.per_rank {
        out.push_str(&format!("{:>4}  {}\n", row.rank, row.count));
    }
    out
}

/// Writes one DOT file per diagram into `dir`.
pub fn write_dot_files(t: &CensusTable, dir: &std::path::Path) -> Result<Vec<String>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(e.to_string()))?;
    let mut written = Vec::new();
    for row in &t.per_rank {
        for (k, d) in row.diagrams.iter().enumerate() {
            let name = format!("ladderful_rank{}_{:03}", row.rank, k);
            let path = dir.join(format!("{name}.dot"));
            std::fs::write(&path, diagram_to_dot(d, &name))
                .map_err(|e| CliError::Io(e.to_string()))?;
            written.push(path.display().to_string());
        }
    }
    Ok(written)
}
