use crate::error::{Error, Result};

fn check(a: &[f64], p: &[f64], n: &[f64]) -> Result<()> {
    if a.len() == p.len() && a.len() == n.len() {
        Ok(())
    } else {
        Err(Error::Shape {
            op: "triplet_loss",
            left: (a.len(), p.len()),
            right: (n.len(), a.len()),
        })
    }
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Value inside the hinge: `‖a−p‖² − ‖a−n‖² + α`.
fn pre_hinge(a: &[f64], p: &[f64], n: &[f64], margin: f64) -> f64 {
    squared_distance(a, p) - squared_distance(a, n) + margin
}

/// `max(0, ‖a−p‖² − ‖a−n‖² + α)` on ambient coordinates.
pub fn triplet_loss(a: &[f64], p: &[f64], n: &[f64], margin: f64) -> Result<f64> {
    check(a, p, n)?;
    Ok(pre_hinge(a, p, n, margin).max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletGrads {
    pub anchor: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    /// Whether the hinge was strictly positive.
    pub active: bool,
}

/// Subgradient of [`triplet_loss`]. The hinge boundary takes the zero branch.
pub fn triplet_loss_backward(a: &[f64], p: &[f64], n: &[f64], margin: f64) -> Result<TripletGrads> {
    check(a, p, n)?;
    let dim = a.len();
    if pre_hinge(a, p, n, margin) <= 0.0 {
        return Ok(TripletGrads {
            anchor: vec![0.0; dim],
            positive: vec![0.0; dim],
            negative: vec![0.0; dim],
            active: false,
        });
    }
    let mut grads = TripletGrads {
        anchor: Vec::with_capacity(dim),
        positive: Vec::with_capacity(dim),
        negative: Vec::with_capacity(dim),
        active: true,
    };
    for i in 0..dim {
        let to_pos = a[i] - p[i];
        let to_neg = a[i] - n[i];
        grads.anchor.push(2.0 * to_pos - 2.0 * to_neg);
        grads.positive.push(-2.0 * to_pos);
        grads.negative.push(2.0 * to_neg);
    }
    Ok(grads)
}
