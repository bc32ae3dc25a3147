use super::*;
use crate::imgproc::{compute_params, distance_transform};
use crate::keypoints::{classify, prune_split_ends};
use crate::raster::{line_pixels, stamp_disk, BinaryMask};
use crate::skeleton::thin;

fn stroke(mask: &mut BinaryMask, a: Px, b: Px, r: f64) {
    for p in line_pixels(a, b) {
        stamp_disk(mask, p, r);
    }
}

fn repair(mask: &BinaryMask) -> Repair {
    let dist = distance_transform(mask);
    let params = compute_params(&dist).unwrap();
    let mut sk = thin(mask);
    let kp = classify(&mut sk);
    let (kp, sk) = prune_split_ends(kp, sk, params.delta);
    repair_intersections(&kp, sk, &dist, f64::from(params.epsilon)).unwrap()
}

/// After rewiring, branch pixels exist only on the patches, and the number
/// of segments leaving each patch equals its number of generated ends.
/// (Straight lines into the center may share pixels for shallow crossings,
/// so one patch can re-read as two nearby Ys.)
fn assert_junctions_only_on_patches(r: &Repair) {
    let mut sk = r.skeleton.clone();
    let kp = classify(&mut sk);
    for b in cluster_pixels(&kp.intersections, &sk).unwrap() {
        assert!(
            r.intersections
                .iter()
                .any(|i| b.members.iter().all(|m| i.patch_pixels().any(|q| q == *m))),
            "branch {b:?} off every patch"
        );
    }
    for i in &r.intersections {
        let patch: BTreeSet<Px> = i.patch_pixels().collect();
        let leaving: BTreeSet<Px> = patch
            .iter()
            .flat_map(|p| p.neighbors8())
            .filter(|q| sk.contains(*q) && !patch.contains(q))
            .collect();
        let runs = BinaryMask::from_bits(
            sk.dims().width,
            sk.dims().height,
            (0..sk.dims().len())
                .map(|k| leaving.contains(&sk.dims().px(k)))
                .collect(),
        )
        .unwrap()
        .count_components8();
        assert_eq!(runs, i.generated_ends.len(), "at {:?}", i.center);
    }
}

#[test]
fn perpendicular_crossing_becomes_one_x() {
    let mut m = BinaryMask::new(120, 120);
    stroke(&mut m, Px::new(10, 60), Px::new(110, 60), 5.0);
    stroke(&mut m, Px::new(60, 10), Px::new(60, 110), 5.0);
    let r = repair(&m);
    assert_eq!(r.intersections.len(), 1, "{:?}", r.intersections);
    let i = &r.intersections[0];
    assert!(i.center.dist(Px::new(60, 60)) <= 1.5, "{:?}", i.center);
    assert_eq!(i.generated_ends.len(), 4);
    assert_eq!(i.through_paths.len(), 2);
    // each strand joins opposite ends
    for t in &i.through_paths {
        let (a, b) = (i.generated_ends[t.from], i.generated_ends[t.to.unwrap()]);
        assert!((a.x - b.x).abs() > 10 || (a.y - b.y).abs() > 10, "{a:?} {b:?}");
        assert!(t.pixels.contains(&i.center));
        assert_eq!(t.pixels.first(), Some(&a));
        assert_eq!(t.pixels.last(), Some(&b));
        for w in t.pixels.windows(2) {
            assert!(w[0].is_adjacent8(w[1]));
        }
    }
    assert_eq!(r.ends.len(), 4);
    assert_junctions_only_on_patches(&r);
    assert_eq!(
        i.arm_extensions.iter().map(Vec::len).collect::<Vec<_>>(),
        vec![ARM_EXTENSION; 4]
    );
}

#[test]
fn shallow_crossing_rewires_to_a_single_patch() {
    let mut m = BinaryMask::new(200, 120);
    stroke(&mut m, Px::new(10, 40), Px::new(190, 80), 5.0);
    stroke(&mut m, Px::new(10, 80), Px::new(190, 40), 5.0);
    let r = repair(&m);
    assert_eq!(r.intersections.len(), 1, "{:?}", r.intersections);
    let i = &r.intersections[0];
    assert!(i.center.dist(Px::new(100, 60)) <= 2.5, "{:?}", i.center);
    assert_eq!(i.generated_ends.len(), 4);
    // the straight-through pairing wins
    for t in &i.through_paths {
        let (a, b) = (i.generated_ends[t.from], i.generated_ends[t.to.unwrap()]);
        assert!((a.x < 100) != (b.x < 100), "{a:?} {b:?}");
        assert!((a.y < 60) != (b.y < 60), "{a:?} {b:?}");
    }
    assert_junctions_only_on_patches(&r);
}

#[test]
fn end_resting_on_a_segment_gives_three_ends() {
    let mut m = BinaryMask::new(140, 100);
    stroke(&mut m, Px::new(10, 50), Px::new(130, 50), 5.0);
    stroke(&mut m, Px::new(70, 90), Px::new(70, 50), 5.0);
    let r = repair(&m);
    assert_eq!(r.intersections.len(), 1);
    let i = &r.intersections[0];
    assert_eq!(i.kind, CrossingKind::SingleY);
    assert_eq!(i.generated_ends.len(), 3);
    assert_eq!(i.through_paths.len(), 2);
    let stub = i.through_paths.iter().find(|t| t.to.is_none()).unwrap();
    assert_eq!(stub.pixels.last(), Some(&i.center));
    // the horizontal pair is continuous
    let through = i.through_paths.iter().find(|t| t.to.is_some()).unwrap();
    let (a, b) = (i.generated_ends[through.from], i.generated_ends[through.to.unwrap()]);
    assert!((a.y - b.y).abs() <= 2 && (a.x - b.x).abs() > 10, "{a:?} {b:?}");
    assert_junctions_only_on_patches(&r);
}

#[test]
fn scene_without_crossings_is_unchanged() {
    let mut m = BinaryMask::new(100, 40);
    stroke(&mut m, Px::new(10, 20), Px::new(90, 20), 4.0);
    let dist = distance_transform(&m);
    let mut sk = thin(&m);
    let kp = classify(&mut sk);
    let (kp, sk) = prune_split_ends(kp, sk, 8);
    let r = repair_intersections(&kp, sk.clone(), &dist, 40.0).unwrap();
    assert!(r.intersections.is_empty());
    assert_eq!(r.skeleton, sk);
    assert_eq!(r.ends, kp.ends);
}

#[test]
fn cut_length_scales_with_width() {
    let m = DistanceMap::from_values(3, 1, vec![0.0, 4.2, 1.0]).unwrap();
    assert_eq!(cut_length(&m, Px::new(1, 0)), 9);
    assert_eq!(cut_length(&m, Px::new(2, 0)), MIN_CUT);
    assert_eq!(cut_length(&m, Px::new(0, 0)), MIN_CUT);
}

#[test]
fn dump_names_chosen_pairs() {
    let mut m = BinaryMask::new(120, 120);
    stroke(&mut m, Px::new(10, 60), Px::new(110, 60), 5.0);
    stroke(&mut m, Px::new(60, 10), Px::new(60, 110), 5.0);
    let r = repair(&m);
    let dump = IntersectionDump::from(&r.intersections[0]);
    let json = serde_json::to_value(&dump).unwrap();
    assert_eq!(json["matchings"].as_array().unwrap().len(), 3);
    assert_eq!(json["chosen_pairs"].as_array().unwrap().len(), 2);
}
