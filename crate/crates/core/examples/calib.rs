use krflab::bounds::{self, MinimizeOptions};
use krflab::rk45::{self, Rk45Options};
use krflab::reaction::reaction_term;
use krflab::sample::sample_kahler_tensor;
use krflab::tensor::{GgTensor, KahlerCurvatureTensor};
use num_complex::Complex64;

fn probe(r0: &KahlerCurvatureTensor, t_end: f64, label: &str) {
    let n = r0.dim();
    let state0: Vec<f64> = r0.entries().iter().flat_map(|z| [z.re, z.im]).collect();
    let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
        let entries: Vec<Complex64> = y.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        let proj = KahlerCurvatureTensor::symmetrize(&entries, n);
        let mx = proj.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        let scaled: Vec<Complex64> = proj.iter().map(|z| z / mx).collect();
        let t = KahlerCurvatureTensor::from_entries(scaled, n).unwrap().scaled(mx);
        let r = reaction_term(&t);
        for (slot, z) in dy.chunks_exact_mut(2).zip(r.entries()) { slot[0] = z.re; slot[1] = z.im; }
    };
    match rk45::integrate(rhs, (0.0, t_end), &state0, &Rk45Options { tol: 1e-10, ..Default::default() }) {
        Err(e) => println!("{label}: integration error: {e}"),
        Ok(sol) => {
            let entries: Vec<Complex64> = sol.states.last().unwrap().chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            let mx = entries.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
            let sym = KahlerCurvatureTensor::symmetrize(&entries, n);
            let viol: f64 = entries.iter().zip(sym.iter()).map(|(a,b)| (a-b).norm()).fold(0.0, f64::max);
            let mx_traj: f64 = sol.states.iter().map(|s| s.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()))).fold(0.0, f64::max);
            println!("{label}: end max|entry| {mx:.3e}, traj max {mx_traj:.3e}, end asymmetry {viol:.3e}, steps {}", sol.times.len());
        }
    }
}

fn main() {
    let opts = MinimizeOptions::fast();
    let gg = GgTensor::new(2).as_tensor();
    let mut failures = 0u32;
    for seed in 0..200u64 {
        let raw = sample_kahler_tensor(2, seed).unwrap();
        let (lam, _) = bounds::ricci_min(&raw);
        let (ob, _) = bounds::min_orthogonal_bisectional(&raw, &opts).unwrap();
        let eps = 1e-3 + 0.1 * (seed as f64 / 200.0);
        let shift = (-lam / 3.0).max(-ob) + eps;
        let r0 = raw.linear_combination(1.0, &gg, shift);
        let r0 = r0.scaled(0.8 / r0.max_abs().max(0.8));
        let n2 = r0.dim();
        let state0: Vec<f64> = r0.entries().iter().flat_map(|z| [z.re, z.im]).collect();
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            let entries: Vec<Complex64> = y.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
            let proj = KahlerCurvatureTensor::symmetrize(&entries, n2);
            let mxv = proj.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            let scaled: Vec<Complex64> = proj.iter().map(|z| z / mxv).collect();
            let t = KahlerCurvatureTensor::from_entries(scaled, n2).unwrap().scaled(mxv);
            let r = reaction_term(&t);
            for (slot, z) in dy.chunks_exact_mut(2).zip(r.entries()) { slot[0] = z.re; slot[1] = z.im; }
        };
        match rk45::integrate(rhs, (0.0, 2.0), &state0, &Rk45Options { tol: 1e-10, ..Default::default() }) {
            Err(e) => { failures += 1; println!("seed {seed}: {e}"); }
            Ok(sol) => {
                let mx: f64 = sol.states.iter().map(|st| st.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()))).fold(0.0, f64::max);
                if mx > 50.0 { println!("seed {seed}: traj max {mx:.2e}"); }
            }
        }
    }
    println!("failures: {failures}");
}
