//! Deterministic DOT/JSON exports of balls and tree-wall trees.

use rab_core::dot::{ball_to_dot, ball_to_json, tree_wall_tree_to_dot, tree_wall_tree_to_json};

use crate::spec::{BuildingSpec, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportKind {
    Ball,
    TreeWallTree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

pub fn export(
    spec: &BuildingSpec,
    what: ExportKind,
    type_label: Option<&str>,
    radius: usize,
    format: ExportFormat,
    limit: usize,
) -> Result<String, CliError> {
    let b = &spec.building;
    let ball = b.ball(&b.base(), radius, limit).map_err(CliError::from)?;
    match what {
        ExportKind::Ball => Ok(match format {
            ExportFormat::Dot => ball_to_dot(b, &ball),
            ExportFormat::Json => serde_json::to_string_pretty(&ball_to_json(b, &ball))
                .map_err(|e| CliError::Io(e.to_string()))?,
        }),
        ExportKind::TreeWallTree => {
            let label = type_label.ok_or_else(|| {
                CliError::Schema("exporting a tree-wall tree needs --type".into())
            })?;
            let i = b.diagram().lookup(label).map_err(CliError::from)?;
            let tree = b.tree_wall_tree(i, &ball);
            Ok(match format {
                ExportFormat::Dot => tree_wall_tree_to_dot(b, &tree),
                ExportFormat::Json => serde_json::to_string_pretty(&tree_wall_tree_to_json(b, &tree))
                    .map_err(|e| CliError::Io(e.to_string()))?,
            })
        }
    }
}
