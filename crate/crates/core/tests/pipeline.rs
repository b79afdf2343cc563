use num_bigint::BigInt;
use quadfib::config::Witness;
use quadfib::gf::Field;
use quadfib::fibration::{count_y_enumerate, count_y_stratified, y_polynomial, ModelSpec};
use quadfib::resolution::{count_resolved, qmap_certify};

#[test]
fn witness_file_to_counts() {
    let a = Field::new(3, 3).unwrap().smallest_nonsquare();
    let text = format!("3^3; {}; 1,9,17; 1,17,20", a.0);
    let w: Witness = text.parse().unwrap();
    let ms = ModelSpec::from_witness(&w).unwrap();
    let q = ms.field.q() as u64;
    let enumerated = count_y_enumerate(&ms, 1, 1 << 20).unwrap();
    assert!(enumerated.rank_mismatches.is_empty());
    assert_eq!(enumerated.total, count_y_stratified(&ms, 1).unwrap().total);
    assert_eq!(enumerated.total, y_polynomial(&ms, 1).unwrap().eval(q, 1));
    let r = count_resolved(&ms, 2, 1 << 12).unwrap();
    assert!(r.agree && r.centers_disjoint);
    assert!(r.x > BigInt::from(0));
    assert!(qmap_certify(&ms).unwrap().ok);
}
