use gos_core::eval::{generate_library, run_eval, run_strategy, write_tsv, Strategy, SyntheticSpec};
use gos_core::index::{cosine, stub_embed};
use gos_core::{default_config, Providers, RelationType, Workspace};

fn small(chain_length: usize, noise: f64) -> SyntheticSpec {
    SyntheticSpec {
        library_sizes: vec![50],
        chain_count: 6,
        chain_length,
        paraphrase_noise: noise,
        random_seed: 3,
        strategies: Strategy::ALL.to_vec(),
        k_vector: chain_length,
    }
}

fn workspace(spec: &SyntheticSpec, size: usize) -> (Workspace, Vec<gos_core::eval::SyntheticTask>) {
    let corpus = generate_library(spec, size).unwrap();
    let ws = Workspace::build(corpus.records, default_config(), &Providers::local()).unwrap();
    (ws, corpus.tasks)
}

#[test]
fn default_spec_enumerates_sizes_and_strategies() {
    let rows = run_eval(&SyntheticSpec::default(), &default_config()).unwrap();
    let keys: Vec<(usize, Strategy)> = rows.iter().map(|r| (r.library_size, r.strategy)).collect();
    use Strategy::*;
    assert_eq!(keys, [(50, Vanilla), (50, Vector), (50, Gos), (200, Vanilla), (200, Vector), (200, Gos)]);
    for r in &rows {
        match r.strategy {
            Vanilla => assert_eq!(r.recall, 1.0),
            Gos => {
                assert_eq!(r.recall, 1.0);
                assert!(r.cost <= default_config().global_budget as f64);
            }
            _ => {}
        }
    }
    let vanilla = |size| rows.iter().find(|r| r.library_size == size && r.strategy == Vanilla).unwrap().cost;
    assert!(vanilla(50) > default_config().global_budget as f64);
    assert!(vanilla(200) >= 4.0 * vanilla(50) * 0.95);
}

#[test]
fn eval_is_deterministic() {
    let spec = small(3, 0.5);
    let a = write_tsv(&run_eval(&spec, &default_config()).unwrap());
    let b = write_tsv(&run_eval(&spec, &default_config()).unwrap());
    assert_eq!(a, b);
}

#[test]
fn generated_chains_are_wired_and_semantically_weak() {
    for len in 2..=4 {
        let spec = small(len, 0.0);
        let (ws, tasks) = workspace(&spec, 50);
        for t in &tasks {
            assert_eq!(t.chain.len(), len);
            assert_eq!(t.chain.last(), Some(&t.target_head));
            assert_eq!(t.ground_truth_bundle, t.chain.iter().cloned().collect());
            for w in t.chain.windows(2) {
                assert!(ws
                    .graph
                    .edges()
                    .iter()
                    .any(|e| e.source == w[0] && e.target == w[1] && e.relation == RelationType::Dep));
            }
            let qv = stub_embed(&t.query_text);
            for id in &t.chain[..len - 1] {
                assert_eq!(cosine(ws.vectors.get(id).unwrap(), &qv), 0.0);
            }
        }
    }
}

#[test]
fn vector_with_k_one_misses_prerequisites() {
    let spec = small(3, 0.0);
    let (ws, tasks) = workspace(&spec, 50);
    let metrics = run_strategy(Strategy::Vector, &ws, &tasks, &default_config(), 1).unwrap();
    assert!(metrics.iter().all(|m| m.recall <= 1.0 / 3.0 + 1e-12));
    let gos = run_strategy(Strategy::Gos, &ws, &tasks, &default_config(), 1).unwrap();
    assert!(gos.iter().all(|m| m.recall == 1.0 && m.completeness > 0.0));
}

#[test]
fn gos_dominates_vector_on_noiseless_chains() {
    for len in 2..=4 {
        let spec = small(len, 0.0);
        let (ws, tasks) = workspace(&spec, 50);
        let cfg = default_config();
        let gos = run_strategy(Strategy::Gos, &ws, &tasks, &cfg, len).unwrap();
        let vector = run_strategy(Strategy::Vector, &ws, &tasks, &cfg, len).unwrap();
        let vanilla = run_strategy(Strategy::Vanilla, &ws, &tasks, &cfg, len).unwrap();
        for ((g, v), all) in gos.iter().zip(&vector).zip(&vanilla) {
            assert!(g.recall >= v.recall);
            assert_eq!(all.recall, 1.0);
            assert!(g.cost <= cfg.global_budget && cfg.global_budget < all.cost);
        }
    }
}

#[test]
fn unknown_strategy_names_are_rejected() {
    assert!("gos-backward".parse::<Strategy>().is_err());
    for s in Strategy::ALL {
        assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
    }
}
