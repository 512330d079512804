use super::{smat, svec, Cone};
use crate::error::Result;
use crate::linalg::{eigh, SymMatrix};

/// Euclidean projection of `v` onto the product cone, block by block.
pub fn project_onto_cone(cones: &[Cone], v: &mut [f64]) -> Result<()> {
    let mut off = 0;
    for cone in cones {
        let m = cone.rows();
        let block = &mut v[off..off + m];
        match *cone {
            Cone::Zero(_) => block.iter_mut().for_each(|b| *b = 0.0),
            Cone::NonNeg(_) => block.iter_mut().for_each(|b| *b = b.max(0.0)),
            Cone::Soc(_) => project_soc(block),
            Cone::Psd(k) => project_psd(k, block)?,
        }
        off += m;
    }
    Ok(())
}

fn project_soc(block: &mut [f64]) {
    let t = block[0];
    let norm = block[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= t {
        return;
    }
    if norm <= -t {
        block.iter_mut().for_each(|b| *b = 0.0);
        return;
    }
    let a = 0.5 * (t + norm);
    block[0] = a;
    let r = a / norm;
    block[1..].iter_mut().for_each(|b| *b *= r);
}

fn project_psd(k: usize, block: &mut [f64]) -> Result<()> {
    if k == 1 {
        block[0] = block[0].max(0.0);
        return Ok(());
    }
    let sp = eigh(&SymMatrix::symmetrized(smat(k, block)))?;
    if sp.min() >= 0.0 {
        return Ok(());
    }
    let proj = sp.map(|l| l.max(0.0));
    block.copy_from_slice(&svec(proj.as_matrix()));
    Ok(())
}
