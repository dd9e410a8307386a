use fd_secrecy::baselines::{self, Scheme};
use fd_secrecy::error::Error;
use fd_secrecy::harness::{derive_seed, gen_channels};
use fd_secrecy::model::{self, SystemConfig};
use fd_secrecy::spca::SpcaOptions;

fn feasible(cfg: &SystemConfig, n: usize) -> Vec<fd_secrecy::model::ChannelSet> {
    (0..)
        .map(|k| gen_channels(cfg, derive_seed(21, k)))
        .filter(|ch| model::is_feasible(ch, cfg))
        .take(n)
        .collect()
}

#[test]
fn every_scheme_meets_energy_and_reports_consistent_rates() {
    let cfg = SystemConfig::default();
    let opts = SpcaOptions::default();
    for ch in feasible(&cfg, 5) {
        for k in Scheme::ALL {
            let r = match baselines::solve_scheme(k, &ch, &cfg, &opts) {
                Ok(r) => r,
                Err(Error::Infeasible(_)) if k == Scheme::HalfDuplex => continue,
                Err(e) => panic!("{k}: {e}"),
            };
            assert_eq!(r.scheme, k);
            assert!(r.downlink_rate >= 0.0 && r.uplink_rate >= 0.0);
            assert!((r.sum_rate - r.downlink_rate - r.uplink_rate).abs() < 1e-12);
            assert!(r.energy >= cfg.e_min * (1.0 - 1e-8), "{k}: energy {}", r.energy);
        }
    }
}

#[test]
fn perfect_fd_ignores_self_interference_level() {
    let cfg = SystemConfig::default();
    let strong = SystemConfig {
        sigma_si2: 1e-4,
        ..cfg.clone()
    };
    let opts = SpcaOptions::default();
    for ch in feasible(&cfg, 3) {
        let a = baselines::perfect_fd_solve(&ch, &cfg, &opts).unwrap();
        let b = baselines::perfect_fd_solve(&ch, &strong, &opts).unwrap();
        assert_eq!(a.sum_rate.to_bits(), b.sum_rate.to_bits());
    }
}

#[test]
fn half_duplex_infeasible_when_phase_one_cannot_harvest() {
    let cfg = SystemConfig {
        e_min: 10.0,
        ..SystemConfig::default()
    };
    let ch = gen_channels(&cfg, 3);
    assert!(matches!(
        baselines::half_duplex_solve(&ch, &cfg, &SpcaOptions::default()),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn scheme_names_parse_back() {
    for k in Scheme::ALL {
        assert_eq!(k.name().parse::<Scheme>().unwrap(), k);
    }
    assert!("simplex".parse::<Scheme>().is_err());
}
