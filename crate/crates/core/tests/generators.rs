use asbm_core::distributions::RngStream;
use asbm_core::generators::{
    generate_lfr, generate_sbm, generate_sbm_sizes, generate_star_example, realized_mixing, LfrSpec, SbmSpec,
};
use asbm_core::BlockState;

#[test]
fn lfr_reference_spec_over_fifty_graphs() {
    let spec = LfrSpec::default();
    let root = RngStream::new(2024);
    let (mut deg, mut mix) = (0.0, 0.0);
    for rep in 0..50 {
        let mut rng = root.split(rep);
        let (g, z) = generate_lfr(&mut rng, &spec).unwrap();
        let d = 2.0 * g.n_edges() as f64 / g.n() as f64;
        let m = realized_mixing(&g, &z).unwrap();
        println!("rep {rep}: mean degree {d:.2}, mixing {m:.3}");
        assert!((d - 20.0).abs() <= 0.15 * 20.0, "mean degree {d}");
        assert!((m - 0.2).abs() <= 0.05, "mixing {m}");
        deg += d;
        mix += m;
        let s = BlockState::from_labels(&g, &z).unwrap();
        assert!(s.sizes().iter().all(|&c| (5..=50).contains(&c)));
        for i in 0..g.n() {
            assert!(!g.neighbors(i).contains(&i));
            assert!(g.neighbors(i).windows(2).all(|w| w[0] < w[1]));
        }
    }
    println!("average mean degree {:.2}, average mixing {:.3}", deg / 50.0, mix / 50.0);
}

#[test]
fn lfr_grid_community_counts() {
    let root = RngStream::new(7);
    let (mut lo, mut hi) = (usize::MAX, 0);
    let mut idx = 0;
    for mu in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        for d_avg in [10.0, 15.0, 20.0, 25.0] {
            let spec = LfrSpec { mu, d_avg, ..Default::default() };
            let (mut dsum, mut msum) = (0.0, 0.0);
            for _ in 0..10 {
                let (g, z) = generate_lfr(&mut root.split(idx), &spec).unwrap();
                idx += 1;
                let k = z.iter().max().unwrap() + 1;
                lo = lo.min(k);
                hi = hi.max(k);
                dsum += 2.0 * g.n_edges() as f64 / g.n() as f64;
                msum += realized_mixing(&g, &z).unwrap();
            }
            println!("mu {mu} d {d_avg}: mean degree {:.2}, mixing {:.3}", dsum / 10.0, msum / 10.0);
            assert!((dsum / 10.0 - d_avg).abs() <= 0.15 * d_avg);
            assert!((msum / 10.0 - mu).abs() <= 0.05);
        }
    }
    println!("community counts span {lo}..={hi}");
    assert!(lo >= 4 && hi <= 40, "{lo}..{hi}");
}

#[test]
fn sbm_pair_frequencies_converge() {
    let p = vec![vec![0.3, 0.05], vec![0.05, 0.2]];
    let (g, z) = generate_sbm_sizes(&mut RngStream::new(3), &[1000, 1000], &p).unwrap();
    let s = BlockState::from_labels(&g, &z).unwrap();
    for a in 0..2 {
        for b in a..2 {
            let cap = s.pair_capacity(a, b) as f64;
            let freq = s.edge_count(a, b) as f64 / cap;
            let se = (p[a][b] * (1.0 - p[a][b]) / cap).sqrt();
            assert!((freq - p[a][b]).abs() < 4.0 * se, "({a},{b}): {freq}");
        }
    }
}

#[test]
fn sbm_labels_follow_pi() {
    let spec = SbmSpec {
        n: 4000,
        pi: vec![0.7, 0.3],
        p: vec![vec![0.0; 2]; 2],
    };
    let (g, z) = generate_sbm(&mut RngStream::new(4), &spec).unwrap();
    assert_eq!(g.n_edges(), 0);
    let frac = z.iter().filter(|&&c| c == 0).count() as f64 / 4000.0;
    assert!((frac - 0.7).abs() < 0.03);
}

#[test]
fn star_example_expected_counts() {
    // E[within-periphery edges] = C(20,2) * 0.13 = 24.7, E[periphery-periphery] = 400 * 0.01 = 4
    let root = RngStream::new(5);
    let reps = 400;
    let (mut within, mut between) = (0.0, 0.0);
    for r in 0..reps {
        let (g, z) = generate_star_example(&mut root.split(r)).unwrap();
        let s = BlockState::from_labels(&g, &z).unwrap();
        assert_eq!(s.sizes(), &[60, 20, 20]);
        within += s.edge_count(1, 1) as f64;
        between += s.edge_count(1, 2) as f64;
    }
    let (within, between) = (within / reps as f64, between / reps as f64);
    assert!((within - 24.7).abs() < 0.75, "{within}");
    assert!((between - 4.0).abs() < 0.3, "{between}");
}

#[test]
fn generators_are_seeded() {
    let spec = LfrSpec::default();
    let a = generate_lfr(&mut RngStream::new(11), &spec).unwrap();
    let b = generate_lfr(&mut RngStream::new(11), &spec).unwrap();
    assert_eq!(a, b);
}
