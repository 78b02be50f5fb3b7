use gillum::emit::{emit, parse_csv, to_svg, Format};
use gillum::figures::{run_figure, Curve, CurveSet, Figure, SweepConfig};
use gillum::Error;

fn reduced(figure: Figure, points: usize) -> SweepConfig {
    let mut cfg = SweepConfig::preset(figure);
    cfg.sweep.points = points;
    cfg
}

#[test]
fn csv_round_trip_preserves_values() {
    let set = run_figure(&reduced(Figure::Fig1, 40)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    emit(&set, Format::Csv, &path).unwrap();
    let back = parse_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back.len(), set.curves.len());
    for (curve, (label, points)) in set.curves.iter().zip(&back) {
        assert_eq!(&curve.label, label);
        for (&(x, y), &(bx, by)) in curve.points.iter().zip(points) {
            assert!((x - bx).abs() <= 1e-10 * x.abs().max(1.0));
            assert!((y - by).abs() <= 1e-10 * y.abs().max(1.0), "{label}: {y} vs {by}");
        }
    }
}

#[test]
fn two_point_curves_give_two_coordinate_pairs() {
    let set = CurveSet {
        title: "two".into(),
        x_label: "x".into(),
        y_label: "y".into(),
        log_x: false,
        curves: vec![
            Curve { label: "a".into(), points: vec![(1.0, 2.0), (3.0, 4.0)] },
            Curve { label: "b".into(), points: vec![(1.0, -1.0), (3.0, 0.5)] },
        ],
    };
    let svg = to_svg(&set).unwrap();
    let polylines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
    assert_eq!(polylines.len(), 2);
    for line in polylines {
        let points = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(points.split(' ').count(), 2);
    }
}

#[test]
fn empty_curve_set_writes_nothing() {
    let set = CurveSet { title: String::new(), x_label: "x".into(), y_label: "y".into(), log_x: true, curves: vec![] };
    let dir = tempfile::tempdir().unwrap();
    for format in [Format::Csv, Format::Json, Format::Svg] {
        let path = dir.path().join(format!("{format:?}"));
        assert!(matches!(emit(&set, format, &path), Err(Error::Config(_))));
        assert!(!path.exists());
    }
}

#[test]
fn unwritable_path_is_an_io_error() {
    let set = run_figure(&reduced(Figure::S1, 3)).unwrap();
    let err = emit(&set, Format::Json, std::path::Path::new("/nonexistent-dir/out.json")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn json_mirrors_curve_set() {
    let set = run_figure(&reduced(Figure::Fig5b, 6)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig5b.json");
    emit(&set, Format::Json, &path).unwrap();
    let back: CurveSet = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(back, set);
}

#[test]
fn receiver_selection_orders_curves() {
    let mut cfg = reduced(Figure::Fig1, 4);
    cfg.receivers = Some(vec!["dh".into(), "coh-hd".into(), "bound".into()]);
    let labels: Vec<String> = run_figure(&cfg).unwrap().curves.into_iter().map(|c| c.label).collect();
    assert_eq!(labels, ["dh", "coh-hd", "bound"]);
}

#[test]
fn kappa_axis_preset() {
    let set = run_figure(&reduced(Figure::Fig5a, 5)).unwrap();
    assert_eq!(set.x_label, "kappa");
    let first = &set.curves[0].points;
    assert_eq!(first[0].0, 1e-3);
    assert_eq!(first[4].0, 0.1);
}
