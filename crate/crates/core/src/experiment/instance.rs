use std::path::Path;

use crate::circuits::GateCircuit;
use crate::gadget::{Graph, Permutation};
use crate::linalg::{read_symmetric, SparseSymmetricMatrix};
use crate::{Error, Result};

/// Any instance file, recognized by its header keyword.
#[derive(Clone, Debug)]
pub enum Instance {
    Matrix(SparseSymmetricMatrix),
    Graph(Graph),
    Circuit(GateCircuit),
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self> {
        let keyword = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .and_then(|l| l.split_whitespace().next())
            .unwrap_or("");
        match keyword {
            "symmetric" => Ok(Self::Matrix(read_symmetric(text)?)),
            "graph" => Ok(Self::Graph(Graph::parse(text)?)),
            "circuit" => Ok(Self::Circuit(GateCircuit::parse(text)?)),
            other => Err(Error::Parse {
                line: 1,
                message: format!("unknown instance header `{other}`"),
            }),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Matrix(_) => "symmetric",
            Self::Graph(_) => "graph",
            Self::Circuit(_) => "circuit",
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    Instance::parse(&read_text(path)?)
}

pub fn load_permutation(path: &Path) -> Result<Permutation> {
    Permutation::parse(&read_text(path)?)
}
