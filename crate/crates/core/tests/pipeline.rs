use phbar_core::{
    compute_barcode, filtration_of, generate_uniform_cloud, kruskal_barcode, mst_total_weight,
    predict_steps, read_points, write_points, MachineProfile, PointCloud, ReductionOptions,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_agrees_with_union_find(n in 0usize..40, dim in 1usize..4, seed: u64, workers in 1usize..4) {
        let cloud = generate_uniform_cloud(n, dim, seed).unwrap();
        let f = filtration_of(&cloud);
        let opts = ReductionOptions::default().with_workers(workers);
        let got = compute_barcode(&cloud, &opts).unwrap();
        let want = kruskal_barcode(&f, n);
        prop_assert_eq!(got.death_grades(), want.death_grades());
        prop_assert_eq!(got.essential_count, want.essential_count);
    }

    #[test]
    fn death_lengths_sum_to_mst_weight(n in 2usize..40, seed: u64) {
        let cloud = generate_uniform_cloud(n, 2, seed).unwrap();
        let f = filtration_of(&cloud);
        let b = compute_barcode(&cloud, &ReductionOptions::default()).unwrap();
        let total: f64 = b.death_lengths().iter().sum();
        let mst = mst_total_weight(&f, n);
        prop_assert!((total - mst).abs() <= 1e-12 * mst.max(1.0));
    }
}

#[test]
fn duplicate_points_die_at_grade_one() {
    let cloud =
        PointCloud::from_points(2, &[vec![0.5, 0.5], vec![0.5, 0.5], vec![1.5, 0.5]]).unwrap();
    let b = compute_barcode(&cloud, &ReductionOptions::default()).unwrap();
    assert_eq!(b.death_grades(), vec![1, 2]);
    assert_eq!(b.death_lengths(), vec![0.0, 1.0]);
}

#[test]
fn text_round_trip_preserves_barcode() {
    let cloud = generate_uniform_cloud(25, 3, 11).unwrap();
    let back = read_points(write_points(&cloud).as_bytes()).unwrap();
    assert_eq!(back, cloud);
    let opts = ReductionOptions::default();
    assert_eq!(
        compute_barcode(&back, &opts).unwrap(),
        compute_barcode(&cloud, &opts).unwrap()
    );
}

#[test]
fn sequential_model_is_quartic_over_the_ladder() {
    let p = MachineProfile::new(1).unwrap();
    let ladder = [64usize, 96, 128, 192, 256, 384, 512];
    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .map(|&n| {
            (
                (n as f64).ln(),
                (predict_steps(n, &p).unwrap().reduce as f64).ln(),
            )
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    assert!((sxy / sxx - 4.0).abs() < 0.1, "slope {}", sxy / sxx);
}
