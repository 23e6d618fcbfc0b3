//! Compares the analytic projection Jacobians with central differences.
//!
//! cargo run --example gradient_check

use manifold_embed::manifolds::{project, project_backward, ManifoldKind};
use manifold_embed::numcore::{finite_diff_gradient, relative_error, Matrix, SeededRng};

fn main() -> manifold_embed::Result<()> {
    let mut rng = SeededRng::new(7);
    for kind in [
        ManifoldKind::sphere(3),
        ManifoldKind::TorusFlat,
        ManifoldKind::torus_embedded(),
        ManifoldKind::MobiusFlat,
        ManifoldKind::MobiusEmbedded,
    ] {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let v: Vec<f64> = (0..kind.input_arity())
                .map(|_| rng.uniform_in(-1.5, 1.5))
                .collect();
            let u: Vec<f64> = (0..kind.ambient_dim())
                .map(|_| rng.uniform_in(-1.0, 1.0))
                .collect();
            let analytic = project_backward(&kind, &v, &u)?;
            // d/dv of <u, project(v)>
            let numeric = finite_diff_gradient(
                |m| {
                    let p = project(&kind, m.as_slice()).expect("finite input");
                    p.iter().zip(&u).map(|(a, b)| a * b).sum()
                },
                &Matrix::row_vector(&v)?,
                1e-6,
            )?;
            worst = worst.max(relative_error(&analytic, numeric.as_slice()));
        }
        println!(
            "{:<28} worst relative error over 100 pairs: {worst:.2e}",
            kind.to_string()
        );
    }
    Ok(())
}
