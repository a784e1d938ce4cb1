//! Every case table entry against its definition, over generated graphs.

use ftconn::verify::{audit_tables, corpus};
use ftconn::Oracle;

#[test]
fn tables_match_definitions() {
    let mut checked = 0;
    for g in corpus(&[4, 8, 12, 14], 4, 60) {
        match audit_tables(&Oracle::new(&g)) {
            Ok(k) => checked += k,
            Err(e) => panic!("{}\n{:#?}", g.to_text(), &e[..e.len().min(10)]),
        }
    }
    assert!(checked > 10_000);
}
