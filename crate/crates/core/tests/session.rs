mod common;

use common::fixture;
use fdq_core::session::Session;

fn session() -> Session {
    let mut s = Session::new().with_clock(|| "2024-01-01T00:00:00Z".into());
    s.add_relation(fixture("iowa.csv", "IOWA"));
    s
}

fn run(s: &mut Session, stmt: &str) -> String {
    s.run_command(stmt)
        .unwrap_or_else(|e| panic!("{stmt}: {e}"))
        .text
}

#[test]
fn stale_fdset_still_answers() {
    let mut s = session();
    run(
        &mut s,
        "MINEFD fs AS SELECT LHS -> RHS FROM IOWA WHERE LHS LENGTH = 1",
    );
    let before = run(
        &mut s,
        r#"SELECTDEP LHS -> RHS FROM fs WHERE RHS LIKE {"Zip"}"#,
    );
    assert!(!before.contains("warning"));

    let upd = run(&mut s, r#"UPDATE IOWA SET "Pack" = 6 WHERE "Vendor" = 65"#);
    assert_eq!(
        upd,
        "updated 3 rows of IOWA\nwarning: FD set \"fs\" was built on an earlier snapshot of IOWA\n"
    );
    let after = run(
        &mut s,
        r#"SELECTDEP LHS -> RHS FROM fs WHERE RHS LIKE {"Zip"}"#,
    );
    assert_eq!(
        after,
        format!("warning: FD set \"fs\" was built on an earlier snapshot of IOWA\n{before}")
    );
    assert!(s.fdset("fs").unwrap().is_stale(s.relation("IOWA").unwrap()));
}

#[test]
fn diff_after_update_lists_changed_dependencies() {
    let mut s = session();
    run(
        &mut s,
        "MINEFD old AS SELECT LHS -> RHS FROM IOWA WHERE LHS LENGTH = 1",
    );
    run(
        &mut s,
        r#"UPDATE IOWA SET "Zip" = 51333 WHERE "Address" = 'HWY 71'"#,
    );
    run(
        &mut s,
        "MINEFD new AS SELECT LHS -> RHS FROM IOWA WHERE LHS LENGTH = 1",
    );
    let diff = run(&mut s, "DIFF old new");
    assert!(diff.contains("+      | Address | Zip"), "{diff}");
    assert!(!diff.contains("-      | Address | Zip"), "{diff}");
}

#[test]
fn null_token_applies_to_output() {
    let mut s = session();
    run(
        &mut s,
        r#"UPDATE IOWA SET "Zip" = NULL WHERE "Vendor" = 65"#,
    );
    run(&mut s, "\\null -");
    let out = run(
        &mut s,
        r#"SELECT "Address", "Zip" FROM IOWA WHERE "Vendor" = 65"#,
    );
    assert_eq!(
        out,
        "# | Address  | Zip\n--+----------+----\n5 | RIDGE RD |   -\n6 | HWY 71   |   -\n\
         8 | HWY 71   |   -\n(3 rows)\n"
    );
}
