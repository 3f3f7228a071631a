use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::{Error, Point, Result};

/// On-disk mesh layout. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_vertices: Vec<usize>,
    pub refinement_edge: Vec<u8>,
}

impl From<&Mesh> for MeshFile {
    fn from(m: &Mesh) -> Self {
        MeshFile {
            vertices: m.vertices.clone(),
            triangles: m.triangles.clone(),
            boundary_vertices: m.boundary_vertices(),
            refinement_edge: m.refinement_edge.clone(),
        }
    }
}

impl TryFrom<MeshFile> for Mesh {
    type Error = Error;

    fn try_from(f: MeshFile) -> Result<Mesh> {
        let refinement = (!f.refinement_edge.is_empty()).then_some(f.refinement_edge);
        let mesh = Mesh::new(f.vertices, f.triangles, refinement)?;
        let mut declared = f.boundary_vertices;
        declared.sort_unstable();
        declared.dedup();
        let actual = mesh.boundary_vertices();
        if declared != actual {
            let v = declared
                .iter()
                .find(|v| !actual.contains(v))
                .or_else(|| actual.iter().find(|v| !declared.contains(v)))
                .unwrap();
            return Err(Error::InvalidMesh(format!(
                "boundary_vertices disagrees with the topology at vertex {v}"
            )));
        }
        Ok(mesh)
    }
}

impl Mesh {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeshFile::from(self)).expect("mesh serialisation cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Mesh> {
        let file: MeshFile = serde_json::from_str(s)?;
        Mesh::try_from(file)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Mesh> {
        Mesh::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}
