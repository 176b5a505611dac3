mod common;

use common::{erlang_cdf, ks_statistic, mean_sd};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rivsed::discretization::Grid;
use rivsed::gcbi::GcbiModel;
use rivsed::problem::{identified_model, ProblemSpec};
use rivsed::simulate::{
    default_small_jump_cut, estimate_hamiltonian, replication_rng, sample_erlang, sample_path, simulate_managed,
    DischargeProcess, JumpSampler, PathConfig, DEFAULT_DROPPED_FRACTION,
};
use rivsed::solver::Policy;

#[test]
fn erlang_sampler_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (l, w) in [(1usize, 48.0), (3, 48.0), (10, 4.8)] {
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| sample_erlang(l, w, &mut rng).unwrap()).collect();
        let (mean, sd) = mean_sd(&xs);
        let lf = l as f64;
        let mean_sigma = lf.sqrt() * w / (n as f64).sqrt();
        let kurt = 3.0 + 6.0 / lf;
        let sd_sigma = lf.sqrt() * w * ((kurt - 1.0) / (4.0 * n as f64)).sqrt();
        assert!((mean - lf * w).abs() < 3.0 * mean_sigma, "l {l}: mean {mean}");
        assert!((sd - lf.sqrt() * w).abs() < 3.0 * sd_sigma, "l {l}: sd {sd}");
        let d = ks_statistic(&mut xs, |x| erlang_cdf(l, w, x));
        assert!(d < 1.63 / (n as f64).sqrt(), "l {l}: KS {d}");
    }
}

#[test]
fn jump_sizes_follow_truncated_kernel() {
    let model = identified_model().unwrap();
    let cut = default_small_jump_cut(&model.kernel, DEFAULT_DROPPED_FRACTION).unwrap();
    let dropped = model.kernel.small_jump_first_moment(cut).unwrap();
    assert!(dropped <= DEFAULT_DROPPED_FRACTION * model.m1() * (1.0 + 1e-9));
    assert!(dropped >= 0.99 * DEFAULT_DROPPED_FRACTION * model.m1());
    let sampler = JumpSampler::new(&model.kernel, cut).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 20_000;
    let mut zs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
    let total = model.kernel.tail_mass(cut).unwrap();
    let cdf = |z: f64| 1.0 - model.kernel.tail_mass(z).unwrap() / total;
    let d = ks_statistic(&mut zs, cdf);
    assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
}

#[test]
fn paths_are_deterministic_per_seed() {
    let model = identified_model().unwrap();
    let config = PathConfig { horizon: 5_000.0, ..Default::default() };
    let a = sample_path(&model, &config, &mut replication_rng(7, 0)).unwrap();
    let b = sample_path(&model, &config, &mut replication_rng(7, 0)).unwrap();
    let c = sample_path(&model, &config, &mut replication_rng(7, 1)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.values, c.values);
    assert!(a.values.iter().all(|q| *q >= 0.0));
}

/// Integral of `Q + A` over `[0, T]` reconstructed from the jump record,
/// together with the number of jumps.
fn exact_exposure(model: &GcbiModel, config: &PathConfig, seed: u64) -> (f64, usize) {
    let cut = default_small_jump_cut(&model.kernel, DEFAULT_DROPPED_FRACTION).unwrap();
    let m_small = model.kernel.small_jump_first_moment(cut).unwrap();
    let decay = model.rho - m_small;
    let level = (model.rho * model.q_min + m_small * model.a_shift) / decay;
    let mut rng = replication_rng(seed, 0);
    let path = sample_path(model, config, &mut rng).unwrap();
    let mut q = config.q0;
    let mut t = 0.0;
    let mut integral = 0.0;
    let mut segment = |q: f64, tau: f64| -> f64 {
        integral += (level + model.a_shift) * tau + (q - level) * (1.0 - (-decay * tau).exp()) / decay;
        level + (q - level) * (-decay * tau).exp()
    };
    for &(tj, z) in &path.jumps {
        q = segment(q, tj - t) + z;
        t = tj;
    }
    segment(q, config.horizon - t);
    (integral, path.jumps.len())
}

#[test]
fn jump_count_matches_intensity() {
    let model = identified_model().unwrap();
    let config = PathConfig { horizon: 4e5, ..Default::default() };
    let cut = default_small_jump_cut(&model.kernel, DEFAULT_DROPPED_FRACTION).unwrap();
    let rate = JumpSampler::new(&model.kernel, cut).unwrap().total_rate();
    let (exposure, count) = exact_exposure(&model, &config, 31);
    let expected = rate * exposure;
    assert!((count as f64 - expected).abs() < 3.0 * expected.sqrt(), "{count} jumps, expected {expected}");
}

#[test]
fn process_state_tracks_time_and_jumps() {
    let model = identified_model().unwrap();
    let config = PathConfig::default();
    let mut rng = replication_rng(3, 0);
    let mut p = DischargeProcess::new(&model, &config, &mut rng).unwrap();
    let mut seen = 0;
    p.advance_to(1000.0, &mut rng, |t, z| {
        assert!(t <= 1000.0 && z >= p_cut(&model));
        seen += 1;
    });
    assert_eq!(p.time(), 1000.0);
    assert_eq!(p.jump_count(), seen);
    assert!(DischargeProcess::new(&model, &PathConfig { small_jump_cut: Some(0.0), ..config }, &mut rng).is_err());
}

fn p_cut(model: &GcbiModel) -> f64 {
    default_small_jump_cut(&model.kernel, DEFAULT_DROPPED_FRACTION).unwrap()
}

fn forced_policy(grid: Grid) -> Policy {
    Policy::from_parts(grid, vec![1; grid.layer_len()], vec![0; grid.layer_len()]).unwrap()
}

#[test]
fn never_replenishing_costs_penalty_plus_observation_rate() {
    let problem = ProblemSpec::demonstration().unwrap();
    let grid = Grid::new(20, 20, 200.0, 400.0, 4).unwrap();
    let policy = forced_policy(grid);
    let config = PathConfig { horizon: 1e5, s0: 0.0, seed: 4, ..Default::default() };
    let est = estimate_hamiltonian(&problem, &policy, &config, 20).unwrap();
    let expected = 1.0 + problem.costs.o / problem.costs.w_hours();
    assert!((est.mean - expected).abs() < 3.0 * est.std_error, "{} ± {} vs {expected}", est.mean, est.std_error);
}

#[test]
fn storage_depletes_from_full() {
    let problem = ProblemSpec::demonstration().unwrap();
    let grid = Grid::new(20, 20, 200.0, 400.0, 4).unwrap();
    let config = PathConfig { horizon: 2e5, s0: 400.0, burn_in: 5e4, q0: 100.0, seed: 9, ..Default::default() };
    let acc = simulate_managed(&problem, &forced_policy(grid), &config, &mut replication_rng(9, 0)).unwrap();
    assert_eq!(acc.time, 1.5e5);
    assert!(acc.j1 / acc.time > 0.99);
    let too_full = PathConfig { s0: 401.0, ..config };
    assert!(simulate_managed(&problem, &forced_policy(grid), &too_full, &mut replication_rng(9, 0)).is_err());
}

#[test]
fn estimates_repeat_with_seed() {
    let problem = ProblemSpec::demonstration().unwrap();
    let grid = Grid::new(10, 10, 200.0, 400.0, 2).unwrap();
    let config = PathConfig { horizon: 2e4, seed: 12, ..Default::default() };
    let a = estimate_hamiltonian(&problem, &forced_policy(grid), &config, 4).unwrap();
    let b = estimate_hamiltonian(&problem, &forced_policy(grid), &config, 4).unwrap();
    assert_eq!(a, b);
    assert!(estimate_hamiltonian(&problem, &forced_policy(grid), &config, 1).is_err());
}
