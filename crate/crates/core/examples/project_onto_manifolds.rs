//! Projects a few head outputs onto each surface and checks membership.
//!
//! cargo run --example project_onto_manifolds

use manifold_embed::manifolds::{on_manifold, project, ManifoldKind};

fn main() -> manifold_embed::Result<()> {
    let kinds = [
        ManifoldKind::sphere(3),
        ManifoldKind::TorusFlat,
        ManifoldKind::torus_embedded(),
        ManifoldKind::MobiusFlat,
        ManifoldKind::MobiusEmbedded,
    ];
    for kind in kinds {
        let head: Vec<f64> = (0..kind.input_arity())
            .map(|i| 0.7 - 0.4 * i as f64)
            .collect();
        let point = project(&kind, &head)?;
        let on = on_manifold(&kind, &point, 1e-9)?;
        println!(
            "{:<28} {head:>6.2?} -> {point:>7.4?} on surface: {on}",
            kind.to_string()
        );
    }

    // one trip around the strip flips the width coordinate
    let a = project(
        &ManifoldKind::MobiusEmbedded,
        &[0.3 + 2.0 * std::f64::consts::PI, 0.5],
    )?;
    let b = project(&ManifoldKind::MobiusEmbedded, &[0.3, -0.5])?;
    println!("half-twist: {a:.6?} == {b:.6?}");
    Ok(())
}
