//! Plain-text plot data: one block of vertex lines per part, blocks
//! separated by a blank line, `#` comment headers. Gnuplot, numpy and
//! most plotting tools read this directly.

use anyhow::{bail, Result};
use polyinv::geometry::json::number;
use polyinv::{Hyperbox, PolyUnion};

/// Returns the text and whether no part produced any vertices.
pub fn vertex_blocks(set: &PolyUnion, clip: Option<&Hyperbox>) -> Result<(String, bool)> {
    let dim = set.dim();
    if dim != 1 && dim != 2 {
        bail!("plot data needs a 1-D or 2-D set, got dimension {dim}");
    }
    if let Some(c) = clip {
        if c.dim() != dim {
            bail!("clip box has dimension {}, set has {dim}", c.dim());
        }
    }
    let mut blocks = Vec::new();
    for (i, part) in set.parts().iter().enumerate() {
        let p = match clip {
            Some(c) => part.intersect(&c.to_polyhedron())?,
            None => part.clone(),
        };
        if p.is_empty()? {
            continue;
        }
        let mut block = format!("# part {i}\n");
        if dim == 1 {
            let h = p.box_hull()?;
            if !h.lo[0].is_finite() || !h.hi[0].is_finite() {
                bail!("part {i} is unbounded; pass --clip");
            }
            block.push_str(&format!("{}\n{}\n", number(h.lo[0]), number(h.hi[0])));
        } else {
            let vs = p.vertices_2d().map_err(|e| match e {
                polyinv::Error::Unbounded => anyhow::anyhow!("part {i} is unbounded; pass --clip"),
                other => other.into(),
            })?;
            for v in vs {
                block.push_str(&format!("{} {}\n", number(v[0]), number(v[1])));
            }
        }
        blocks.push(block);
    }
    let empty = blocks.is_empty();
    Ok((blocks.join("\n"), empty))
}
