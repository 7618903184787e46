//! Named space presets.

use tgasum_core::{CoefVector, SpaceSpec, Weights};

pub const DEFAULT_CAP: usize = 64;

/// `(name, description)` of every preset.
pub const PRESETS: [(&str, &str); 10] = [
    ("l1", "l_1, unit vector basis"),
    ("l2", "l_2, unit vector basis"),
    ("l_inf", "c_0 / l_inf sup norm, unit vector basis"),
    ("l1_5", "l_p with p = 1.5"),
    ("summing", "summing basis of c_0: ||sum a_n s_n|| = sup_k |a_k + a_{k+1} + ...|"),
    ("lorentz_harmonic", "Lorentz space d(w, 1) with w_n = 1/n"),
    ("weighted_l1_geometric", "weighted l_1 with w_n = 2^-n"),
    ("max_pairs", "max(sup |a_n|, max_k |a_{2k-1} + a_{2k}|)"),
    ("circ_summing", "summing basis renormed by max(||x|| / alpha_1, ||x||_inf)"),
    ("circ_weighted_l1", "geometric weighted l_1 renormed by max(||x|| / alpha_1, ||x||_inf)"),
];

pub fn preset(name: &str, cap: usize) -> Option<SpaceSpec> {
    Some(match name {
        "l1" => SpaceSpec::lp(1.0, cap),
        "l2" => SpaceSpec::lp(2.0, cap),
        "l_inf" => SpaceSpec::l_inf(cap),
        "l1_5" => SpaceSpec::lp(1.5, cap),
        "summing" => SpaceSpec::summing(cap),
        "lorentz_harmonic" => SpaceSpec::lorentz(Weights::Harmonic, cap),
        "weighted_l1_geometric" => SpaceSpec::weighted_l1(Weights::Geometric(0.5), cap),
        "max_pairs" => {
            let fs = (1..=cap / 2)
                .map(|k| CoefVector::from_pairs([(2 * k - 1, 1.0), (2 * k, 1.0)]).expect("valid pair"))
                .collect();
            SpaceSpec::max_functionals(fs, cap)
        }
        "circ_summing" => SpaceSpec::circ(SpaceSpec::summing(cap)),
        "circ_weighted_l1" => SpaceSpec::circ(SpaceSpec::weighted_l1(Weights::Geometric(0.5), cap)),
        _ => return None,
    })
}

/// Every preset at dimension cap `cap`.
pub fn all(cap: usize) -> Vec<(&'static str, SpaceSpec)> {
    PRESETS.iter().map(|(n, _)| (*n, preset(n, cap).expect("listed preset"))).collect()
}
