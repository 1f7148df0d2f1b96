//! Convolution with the screened kernel: recursive against direct
//! quadrature on a smooth input, and the velocity of a tanh front.

use frontlab::helmholtz::{
    convolve_extended, potential_from_phi, velocity, ConvolutionMethod, KernelSpec,
};
use frontlab::{Grid1D, ModelParams};

fn main() -> frontlab::Result<()> {
    let k = KernelSpec::new(1.0)?;
    // u = exp(-x^2) solves u - u'' = (3 - 4x^2) exp(-x^2)
    println!("{:>6} {:>12} {:>12}", "h", "recursive", "direct");
    for h in [0.08, 0.04, 0.02, 0.01] {
        let g = Grid1D::with_spacing(10.0, h)?;
        let f: Vec<f64> = g
            .nodes()
            .iter()
            .map(|x| (3.0 - 4.0 * x * x) * (-x * x).exp())
            .collect();
        let err = |m| -> frontlab::Result<f64> {
            let u = convolve_extended(k, &g, &f, 0.0, 0.0, m)?;
            Ok(g.nodes()
                .iter()
                .zip(&u.u)
                .map(|(x, v)| (v - (-x * x).exp()).abs())
                .fold(0.0, f64::max))
        };
        println!(
            "{h:>6} {:>12.3e} {:>12.3e}",
            err(ConvolutionMethod::Recursive)?,
            err(ConvolutionMethod::Direct)?
        );
    }
    let p = ModelParams::new(1.0, 1.0, 2.0)?;
    let g = Grid1D::with_spacing(30.0, 0.01)?;
    let phi: Vec<f64> = g
        .nodes()
        .iter()
        .map(|x| 0.5 - 0.5 * (x / 2.0).tanh())
        .collect();
    let field = potential_from_phi(&p, &g, &phi, ConvolutionMethod::Recursive)?;
    let v = velocity(&field);
    println!(
        "\ntanh front, a = b = 1, lambda = 2: sup u = {:.6}, sup |V| = {:.6}",
        field.u_sup(),
        field.du_sup()
    );
    println!(
        "V at xi = -5, 0, 5: {:.6} {:.6} {:.6}",
        v[g.mid() - 500],
        v[g.mid()],
        v[g.mid() + 500]
    );
    Ok(())
}
