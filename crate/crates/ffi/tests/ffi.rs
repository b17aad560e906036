use std::ffi::{CStr, CString};
use std::ptr;

use condec_ffi::*;

fn last_error() -> String {
    let p = condec_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn c5() -> *mut CondecGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { condec_graph_new(5, &mut g) }, CondecStatus::Ok);
    for i in 0..5 {
        assert_eq!(
            unsafe { condec_graph_add_edge(g, i, (i + 1) % 5) },
            CondecStatus::Ok
        );
    }
    g
}

fn items(s: *const CondecSolution) -> Vec<usize> {
    let mut need = 0;
    let st = unsafe { condec_solution_items(s, ptr::null_mut(), 0, &mut need) };
    if need == 0 {
        assert_eq!(st, CondecStatus::Ok);
        return Vec::new();
    }
    assert_eq!(st, CondecStatus::InvalidArgument);
    let mut buf = vec![0usize; need];
    assert_eq!(
        unsafe { condec_solution_items(s, buf.as_mut_ptr(), buf.len(), &mut need) },
        CondecStatus::Ok
    );
    buf
}

#[test]
fn solve_c5_with_every_engine() {
    let g = c5();
    assert_eq!(unsafe { condec_graph_num_vertices(g) }, 5);
    assert_eq!(unsafe { condec_graph_num_edges(g) }, 5);
    for engine in [CondecEngine::Baker, CondecEngine::Dp, CondecEngine::Brute] {
        let mut s = ptr::null_mut();
        assert_eq!(
            unsafe { condec_solve(g, CondecProblem::Oct, 1, engine, 1, &mut s) },
            CondecStatus::Ok
        );
        assert!(unsafe { condec_solution_feasible(s) });
        assert_eq!(unsafe { condec_solution_size(s) }, 1);
        assert_eq!(items(s), vec![0]);
        unsafe { condec_solution_free(s) };

        let mut s = ptr::null_mut();
        assert_eq!(
            unsafe { condec_solve(g, CondecProblem::Eb, 1, engine, 1, &mut s) },
            CondecStatus::Ok
        );
        assert_eq!(items(s), vec![0, 1]);
        unsafe { condec_solution_free(s) };
    }
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { condec_solve(g, CondecProblem::Oct, 0, CondecEngine::Baker, 1, &mut s) },
        CondecStatus::Ok
    );
    assert!(!unsafe { condec_solution_feasible(s) });
    assert!(items(s).is_empty());
    unsafe { condec_solution_free(s) };
    unsafe { condec_graph_free(g) };
}

#[test]
fn errors_set_status_and_message() {
    let g = c5();
    assert_eq!(
        unsafe { condec_graph_add_edge(g, 0, 1) },
        CondecStatus::InvalidArgument
    );
    assert!(last_error().contains("duplicate"));
    assert_eq!(
        unsafe { condec_graph_add_edge(g, 0, 9) },
        CondecStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { condec_graph_add_edge(ptr::null_mut(), 0, 1) },
        CondecStatus::NullPointer
    );
    assert!(last_error().contains("null"));
    assert_eq!(unsafe { condec_graph_add_edge(g, 1, 3) }, CondecStatus::Ok);
    assert!(condec_last_error_message().is_null());
    unsafe { condec_graph_free(g) };

    let mut h = ptr::null_mut();
    let bad = CString::new("3 1\n0 5\n").unwrap();
    assert_eq!(
        unsafe { condec_graph_parse(bad.as_ptr(), &mut h) },
        CondecStatus::Parse
    );
    assert!(last_error().contains("line 2"));
    assert!(h.is_null());
}

#[test]
fn non_planar_input_is_reported() {
    let text = CString::new("5 10\n0 1\n0 2\n0 3\n0 4\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { condec_graph_parse(text.as_ptr(), &mut g) },
        CondecStatus::Ok
    );
    let mut width = 0;
    assert_eq!(
        unsafe { condec_heuristic_width(g, &mut width) },
        CondecStatus::Ok
    );
    assert_eq!(width, 4);
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { condec_solve(g, CondecProblem::Oct, 3, CondecEngine::Baker, 1, &mut s) },
        CondecStatus::NonPlanar
    );
    assert!(s.is_null());
    // the DP engine does not need an embedding
    assert_eq!(
        unsafe { condec_solve(g, CondecProblem::Oct, 3, CondecEngine::Dp, 1, &mut s) },
        CondecStatus::Ok
    );
    assert_eq!(unsafe { condec_solution_size(s) }, 3);
    unsafe { condec_solution_free(s) };
    unsafe { condec_graph_free(g) };
}

#[test]
fn header_declares_the_api() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/condec.h")).unwrap();
    for name in [
        "condec_graph_new",
        "condec_graph_parse",
        "condec_solve",
        "condec_solution_items",
        "condec_last_error_message",
        "CONDEC_STATUS_NON_PLANAR",
        "typedef struct CondecGraph CondecGraph",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"condec.h\"\nint main(void) { CondecGraph *g = 0; return condec_graph_new(3, &g) == CONDEC_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc)
            .arg("--version")
            .output()
            .is_ok()
        {
            return Ok(cc);
        }
    }
    Err(())
}
