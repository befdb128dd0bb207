use std::time::Instant;

use utm_core::spectral::delta;
use utm_core::zeros::{certify_contour_clearance, count_zeros, find_zeros, rotation_defect, Rect, RegionTag};
use utm_core::C64;

#[test]
fn zero_set_up_to_40() {
    let t0 = Instant::now();
    let zs = find_zeros::<f64>(40.0).unwrap();
    eprintln!("{} zeros in {:?}", zs.len(), t0.elapsed());
    for z in zs.iter().take(8) {
        eprintln!("  {:?}", z);
    }
    let origin: Vec<_> = zs.iter().filter(|z| z.region_tag == RegionTag::Origin).collect();
    assert_eq!(origin.len(), 1);
    assert_eq!(origin[0].multiplicity, 2);
    for z in &zs {
        assert!(z.resolved);
        if z.region_tag == RegionTag::Origin {
            continue;
        }
        let c = z.location * z.location * z.location;
        assert!(c.im > 0.0 && z.location.norm() > 1.0, "{z:?}");
        assert_ne!(z.region_tag, RegionTag::Elsewhere);
        let j = utm_core::spectral::dominant_sector(z.location);
        let dp = utm_core::spectral::delta_prime_scaled(z.location, j).norm();
        assert!(z.residual <= 1e-10 * dp.max(1.0), "{z:?}");
    }
    let defect = rotation_defect(&zs);
    eprintln!("rotation defect {defect:e}");
    assert!(defect <= 1e-8);
    let t0 = Instant::now();
    let big = count_zeros(Rect::new(-40.0, 40.0, -40.0, 40.0)).unwrap();
    let wide = find_zeros::<f64>(57.0).unwrap();
    let inside: usize = wide
        .iter()
        .filter(|z| z.location.re.abs() < 40.0 && z.location.im.abs() < 40.0)
        .map(|z| z.multiplicity)
        .sum();
    eprintln!("box count {} vs {} ({:?})", big.count, inside, t0.elapsed());
    assert_eq!(big.count, inside);
    let ok = certify_contour_clearance(&zs, 40.0, 0.1, 0.0).unwrap();
    eprintln!("{ok:?}");
    assert!(ok.pass);
    assert!(!certify_contour_clearance(&zs, 40.0, 10.0, 0.0).unwrap().pass);
    let d = certify_contour_clearance(&zs, 40.0, 0.1, std::f64::consts::PI / 24.0).unwrap();
    assert!(d.pass && d.swept.is_empty());
    assert!(certify_contour_clearance::<f64>(&[], 40.0, 10.0, 0.0).unwrap().pass);
    let _ = delta(C64::new(0.0, 0.0));
}
