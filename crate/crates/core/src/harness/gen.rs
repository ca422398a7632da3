use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::data::{
    gen_gaussian_family, gen_graph, gen_svm, write_dense_csv, write_edge_list, write_libsvm, write_vector, GenMetadata,
};

#[derive(Debug, Clone, PartialEq)]
pub enum GenKind {
    /// `count` pairs `A{i}.csv`, `b{i}.txt` sharing one `x_star.txt`.
    Gaussian { m: usize, n: usize, count: usize },
    /// `data.libsvm`
    Svm { samples: usize, dim: usize },
    /// `graph.edges`
    Graph { nodes: usize, density: f64 },
}

/// Writes generated data and its `meta.json` sidecar into `out`.
pub fn generate(kind: &GenKind, seed: u64, out: &Path) -> Result<GenMetadata> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut params = BTreeMap::new();
    let mut files = Vec::new();
    let name = match kind {
        GenKind::Gaussian { m, n, count } => {
            if *count == 0 || *m == 0 || *n == 0 {
                return Err(Error::invalid("gaussian", "m, n and count must be positive"));
            }
            params.insert("m".into(), *m as f64);
            params.insert("n".into(), *n as f64);
            params.insert("count".into(), *count as f64);
            let family = gen_gaussian_family(*m, *n, *count, seed);
            for (i, inst) in family.iter().enumerate() {
                let a = format!("A{}.csv", i + 1);
                let b = format!("b{}.txt", i + 1);
                write_dense_csv(out.join(&a), &inst.a)?;
                write_vector(out.join(&b), &inst.b)?;
                files.push(a);
                files.push(b);
            }
            write_vector(out.join("x_star.txt"), &family[0].x_star)?;
            files.push("x_star.txt".into());
            "gaussian"
        }
        GenKind::Svm { samples, dim } => {
            if *samples == 0 || *dim == 0 {
                return Err(Error::invalid("svm", "samples and dim must be positive"));
            }
            params.insert("samples".into(), *samples as f64);
            params.insert("dim".into(), *dim as f64);
            write_libsvm(out.join("data.libsvm"), &gen_svm(*samples, *dim, seed))?;
            files.push("data.libsvm".into());
            "svm"
        }
        GenKind::Graph { nodes, density } => {
            if *nodes == 0 || !(0.0..=1.0).contains(density) {
                return Err(Error::invalid("graph", "need nodes > 0 and density in [0, 1]"));
            }
            params.insert("nodes".into(), *nodes as f64);
            params.insert("density".into(), *density);
            write_edge_list(out.join("graph.edges"), *nodes, &gen_graph(*nodes, *density, seed))?;
            files.push("graph.edges".into());
            "graph"
        }
    };
    let meta = GenMetadata {
        kind: name.into(),
        seed,
        params,
        files,
    };
    meta.write(out)?;
    Ok(meta)
}
