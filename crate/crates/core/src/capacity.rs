//! Mutual information of memoryless systems.

use alloc::vec;

use crate::math::log;
use crate::model::SystemModel;
use crate::{Error, Result};

/// Single-letter joint law `P(y, z) = sum_x G(x) V(y|x) W(z|x)` as a
/// row-major `|Y| x |Z|` table. Requires every state space to be trivial.
pub fn single_letter_joint(model: &SystemModel) -> Result<alloc::vec::Vec<f64>> {
    if !model.states().is_memoryless() {
        return Err(Error::NotMemoryless);
    }
    let a = model.alphabet();
    let mut joint = vec![0.0; a.y_size * a.z_size];
    for x in 0..a.x_size {
        let g = model.source().prob(x, 0, 0);
        for y in 0..a.y_size {
            let gv = g * model.secondary().prob(y, 0, x, 0);
            for z in 0..a.z_size {
                joint[y * a.z_size + z] += gv * model.primary().prob(z, 0, x, 0);
            }
        }
    }
    Ok(joint)
}

/// `I(Y; Z)` in nats for a memoryless system; fails with `NotMemoryless`
/// otherwise.
pub fn capacity_memoryless(model: &SystemModel) -> Result<f64> {
    let joint = single_letter_joint(model)?;
    let a = model.alphabet();
    let mut py = vec![0.0; a.y_size];
    let mut pz = vec![0.0; a.z_size];
    for y in 0..a.y_size {
        for z in 0..a.z_size {
            let p = joint[y * a.z_size + z];
            py[y] += p;
            pz[z] += p;
        }
    }
    let mut info = 0.0;
    for y in 0..a.y_size {
        for z in 0..a.z_size {
            let p = joint[y * a.z_size + z];
            if p > 0.0 {
                info += p * log(p / (py[y] * pz[z]));
            }
        }
    }
    Ok(info.max(0.0))
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * log(q) } else { 0.0 };
    term(p) + term(1.0 - p)
}
