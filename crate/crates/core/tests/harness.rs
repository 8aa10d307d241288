use squaresort::harness::{generate_input, run_io_trial, run_time_trial, Algorithm, InputDistribution, IoScope};
use squaresort::memory::{CacheConfig, Memory, NativeMemory, SimMemory};
use squaresort::sort::{merge_sort_into, sort_native};
use squaresort::verify::check_sorted_permutation;
use squaresort::{square_sort, Rng, SortParams};

#[test]
fn baselines_agree_on_every_family() {
    let params = SortParams::default();
    for dist in InputDistribution::ALL {
        for n in [2usize, 17, 1000, 30_000] {
            let input = generate_input(dist, n, 11);
            let square = sort_native(&input, &params, &mut Rng::seed_from_u64(11));

            let mut mem = NativeMemory::new();
            let src = mem.alloc(n);
            let dst = mem.alloc(n);
            mem.load(src, &input);
            merge_sort_into(&mut mem, src, dst);
            let merge = mem.snapshot(dst);

            let mut host = input.clone();
            host.sort_unstable();
            assert_eq!(square, host, "{dist} n={n}");
            assert_eq!(merge, host, "{dist} n={n}");
        }
    }
}

#[test]
fn timed_trials_verify_their_output() {
    let params = SortParams::default();
    let rec = run_time_trial(Algorithm::MergeSort, InputDistribution::Binary, 10_000, 4, &params, 3).unwrap();
    assert_eq!((rec.algo, rec.size), (Algorithm::MergeSort, 10_000));
    let rec = run_time_trial(
        Algorithm::SquareSort,
        InputDistribution::Permutation,
        100_000,
        4,
        &params,
        2,
    )
    .unwrap();
    assert!(rec.norm > 0.0 && rec.median_ns > 0.0);
}

#[test]
fn full_sort_reads_and_writes_every_block() {
    let config = CacheConfig::new(4096, 64).unwrap();
    let rec = run_io_trial(1 << 16, config, 9, &SortParams::default(), IoScope::FullSort, false).unwrap();
    assert!(rec.io_total >= 2048, "io = {}", rec.io_total);
    let again = run_io_trial(1 << 16, config, 9, &SortParams::default(), IoScope::FullSort, false).unwrap();
    assert_eq!(rec, again);
}

#[test]
fn merge_baseline_io_grows_with_n() {
    let config = CacheConfig::new(1024, 32).unwrap();
    let p = SortParams::default();
    let io: Vec<u64> = (10..=16)
        .map(|k| {
            run_io_trial(1 << k, config, 1, &p, IoScope::MergeBaseline, false)
                .unwrap()
                .io_total
        })
        .collect();
    assert!(io.windows(2).all(|w| w[0] < w[1]), "{io:?}");
}

#[test]
fn simulated_and_native_backends_agree() {
    let input = generate_input(InputDistribution::UniformSqrt, 20_000, 5);
    let params = SortParams::default();
    let native = sort_native(&input, &params, &mut Rng::seed_from_u64(5));

    let mut mem = SimMemory::new(CacheConfig::new(256, 16).unwrap());
    let src = mem.alloc(input.len());
    let dst = mem.alloc(input.len());
    mem.load(src, &input);
    square_sort(&mut mem, src, dst, &params, &mut Rng::seed_from_u64(5));
    assert_eq!(mem.snapshot(dst), native);
    assert!(check_sorted_permutation(&input, &native).is_ok());
}

#[test]
fn independent_sorts_run_on_separate_threads() {
    let handles: Vec<_> = (0..4u64)
        .map(|t| {
            std::thread::spawn(move || {
                let input = generate_input(InputDistribution::UniformFull, 50_000, t);
                let out = sort_native(&input, &SortParams::default(), &mut Rng::seed_from_u64(t));
                check_sorted_permutation(&input, &out)
            })
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), Ok(()));
    }
}
