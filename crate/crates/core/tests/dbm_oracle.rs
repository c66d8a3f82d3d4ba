mod support;

use support::dbm_enum;

#[test]
fn operations_agree_with_enumeration() {
    for r in dbm_enum::run(7, 500) {
        assert_eq!(r.instances, 500, "{}", r.op);
        assert_eq!(r.disagreements, 0, "{r:?}");
        assert!(r.positives >= 50, "{r:?}");
        if matches!(r.op, "includes" | "federation_covers") {
            assert!(r.instances - r.positives >= 50, "{r:?}");
        }
    }
}
