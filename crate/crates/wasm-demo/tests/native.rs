use repeater_wasm_demo::{code_names, lstar_points, min_pairs, pfail_points, table1_text};

#[test]
fn lstar_points_are_interleaved_and_falling() {
    let pts = lstar_points("hamming-7", 1e-4, 1e-1, 30, 0.95).unwrap();
    assert_eq!(pts.len(), 60);
    assert!((pts[0] - 1e-4).abs() < 1e-18);
    let ls: Vec<f64> = pts.chunks(2).map(|c| c[1]).collect();
    assert!(ls.windows(2).all(|w| w[1] < w[0]));
    assert!(lstar_points("hamming-7", 1e-1, 1e-4, 30, 0.95).is_err());
    assert!(lstar_points("steane", 1e-4, 1e-1, 30, 0.95).is_err());
}

#[test]
fn pfail_points_fall_to_target() {
    let pts = pfail_points(7, 0.95, 1e-3, 1e-3, 3, 20).unwrap();
    assert_eq!(pts[0], 55.0);
    assert!((pts[1] - 1.0).abs() < 1e-12);
    let last = pts[pts.len() - 1];
    assert!(last < 1e-5);
    assert_eq!(min_pairs(7, 0.95, 1e-3, 1e-3, 3, 1e-5).unwrap(), 106);
    assert!(pfail_points(0, 0.95, 1e-3, 1e-3, 3, 20).is_err());
}

#[test]
fn table_lists_every_code() {
    let text = table1_text(3e-3, 0.95, 10.0).unwrap();
    assert_eq!(text.lines().count(), 1 + code_names().len());
    assert!(text.contains("hamming-7,7,1,1,42,"));
}
