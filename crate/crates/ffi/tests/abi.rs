use std::ffi::{c_char, CStr, CString};
use std::ptr;

use graphconc_ffi::*;

const BERNOULLI_3: &str =
    r#"{"variant": "bernoulli", "probs": [[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]]}"#;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe {
        gc_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn exact(json: &str) -> *mut GcExact {
    let json = CString::new(json).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { gc_exact_from_model(json.as_ptr(), 0, &mut d) },
        GcStatus::Ok
    );
    d
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(gc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn graph_lifecycle() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(gc_graph_new(4, false, &mut g), GcStatus::Ok);
        assert_eq!(gc_graph_set_edge(g, 0, 1, true), GcStatus::Ok);
        assert_eq!(gc_graph_set_edge(g, 1, 2, true), GcStatus::Ok);
        assert!(gc_graph_has_edge(g, 1, 0));
        assert!(!gc_graph_has_edge(g, 0, 9));
        assert_eq!((gc_graph_node_count(g), gc_graph_edge_count(g)), (4, 2));
        assert!(!gc_graph_is_directed(g));

        assert_eq!(gc_graph_set_edge(g, 2, 2, true), GcStatus::InvalidArgument);
        assert!(last_error().contains("self-loop"));

        let mut len = 0;
        let mut values = [0.0; 8];
        assert_eq!(
            gc_graph_distribution(
                g,
                GcKind::Degree,
                values.as_mut_ptr(),
                values.len(),
                &mut len
            ),
            GcStatus::Ok
        );
        assert_eq!(&values[..len], &[0.25, 0.5, 0.25, 0.0]);

        // too small: length reported, buffer untouched
        let mut small = [7.0; 2];
        assert_eq!(
            gc_graph_distribution(g, GcKind::Degree, small.as_mut_ptr(), small.len(), &mut len),
            GcStatus::BufferTooSmall
        );
        assert_eq!((len, small), (4, [7.0; 2]));

        let mut text_len = 0;
        assert_eq!(
            gc_graph_to_edge_list(g, ptr::null_mut(), 0, &mut text_len),
            GcStatus::BufferTooSmall
        );
        let mut buf = vec![0 as c_char; text_len + 1];
        assert_eq!(
            gc_graph_to_edge_list(g, buf.as_mut_ptr(), buf.len(), &mut text_len),
            GcStatus::Ok
        );
        let mut h = ptr::null_mut();
        assert_eq!(gc_graph_parse(buf.as_ptr(), &mut h), GcStatus::Ok);
        assert_eq!(gc_graph_edge_count(h), 2);
        assert!(gc_graph_has_edge(h, 2, 1));
        gc_graph_free(h);
        gc_graph_free(g);
        gc_graph_free(ptr::null_mut());
    }
}

#[test]
fn null_and_bad_input() {
    unsafe {
        assert_eq!(
            gc_graph_new(3, false, ptr::null_mut()),
            GcStatus::NullPointer
        );
        assert_eq!(
            gc_graph_set_edge(ptr::null_mut(), 0, 1, true),
            GcStatus::NullPointer
        );
        assert_eq!(gc_graph_node_count(ptr::null()), 0);
        let mut g = ptr::null_mut();
        assert_eq!(gc_graph_new(0, false, &mut g), GcStatus::InvalidArgument);
        let bad = CString::new("directed 0\nnodes 2\nedges\n1 5\n").unwrap();
        assert_eq!(gc_graph_parse(bad.as_ptr(), &mut g), GcStatus::Parse);
        assert!(last_error().starts_with("line 4"));
        let garbage = CString::new("nodes x").unwrap();
        assert_eq!(gc_graph_parse(garbage.as_ptr(), &mut g), GcStatus::Parse);
        assert!(!last_error().is_empty());
        let not_json = CString::new("{").unwrap();
        let mut d = ptr::null_mut();
        assert_eq!(
            gc_exact_from_model(not_json.as_ptr(), 0, &mut d),
            GcStatus::Parse
        );
        let big =
            CString::new(r#"{"variant": "beta-model", "theta": [0, 0, 0, 0, 0, 0, 0]}"#).unwrap();
        assert_eq!(
            gc_exact_from_model(big.as_ptr(), 0, &mut d),
            GcStatus::StateSpaceTooLarge
        );
        // a success clears the message
        assert_eq!(gc_graph_new(2, false, &mut g), GcStatus::Ok);
        assert_eq!(gc_last_error_message(ptr::null_mut(), 0), 0);
        gc_graph_free(g);
    }
}

#[test]
fn exact_oracle() {
    unsafe {
        let d = exact(BERNOULLI_3);
        assert_eq!(gc_exact_state_count(d), 8);
        let mut theta = [0.0; 3];
        let mut len = 0;
        assert_eq!(
            gc_exact_theta_star(d, GcKind::Degree, theta.as_mut_ptr(), 3, &mut len),
            GcStatus::Ok
        );
        for (a, b) in theta.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-12);
        }
        let mut tail = 0.0;
        assert_eq!(
            gc_exact_tail_prob(d, GcKind::Degree, 0.5, &mut tail),
            GcStatus::Ok
        );
        assert!((tail - 0.25).abs() < 1e-12);
        assert_eq!(
            gc_exact_tail_prob(d, GcKind::Degree, 0.0, &mut tail),
            GcStatus::InvalidArgument
        );

        let mut p = GcProfile::default();
        assert_eq!(gc_exact_profile(d, GcKind::Degree, &mut p), GcStatus::Ok);
        assert_eq!((p.units, p.bins), (3, 3));
        assert!((p.c_n - 0.25).abs() < 1e-12);
        assert!(p.has_delta_n && (p.delta_n - 0.25).abs() < 1e-12);
        assert!((p.d_n - 2.592592592592593).abs() < 1e-12);

        let pred = CString::new("edges=2").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(gc_exact_condition(d, pred.as_ptr(), &mut c), GcStatus::Ok);
        assert_eq!(gc_exact_state_count(c), 3);
        let bad = CString::new("edges=").unwrap();
        let mut unused = ptr::null_mut();
        assert_eq!(
            gc_exact_condition(d, bad.as_ptr(), &mut unused),
            GcStatus::InvalidArgument
        );
        assert!(unused.is_null());
        assert_eq!(
            gc_exact_profile(d, GcKind::OutDegree, &mut p),
            GcStatus::InvalidArgument
        );
        gc_exact_free(c);
        gc_exact_free(d);
    }
}

#[test]
fn sampling_is_seeded() {
    let json = CString::new(BERNOULLI_3.replace("0.5", "1")).unwrap();
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(gc_model_sample(json.as_ptr(), 0, 9, &mut a), GcStatus::Ok);
        assert_eq!(gc_model_sample(json.as_ptr(), 0, 9, &mut b), GcStatus::Ok);
        assert_eq!(gc_graph_edge_count(a), 3);
        assert_eq!(gc_graph_edge_count(a), gc_graph_edge_count(b));
        gc_graph_free(a);
        gc_graph_free(b);
    }
}

#[test]
fn bounds() {
    let ok = CString::new(r#"{"bound": "Thm1-exp", "D_N": 1.0, "M": 100, "p": 99}"#).unwrap();
    let mut out = GcBound::default();
    unsafe {
        assert_eq!(gc_bound_evaluate(ok.as_ptr(), &mut out), GcStatus::Ok);
        assert!((out.epsilon - (1.5 * 100f64.ln() / 100.0).sqrt()).abs() < 1e-15);
        assert!((out.confidence - 0.9998).abs() < 1e-12);
        assert!(!out.vacuous);
        let pre = CString::new(r#"{"bound": "Thm2", "D_N": 1.0, "M": 100, "p": 99, "r_n": 0.5}"#)
            .unwrap();
        assert_eq!(
            gc_bound_evaluate(pre.as_ptr(), &mut out),
            GcStatus::Precondition
        );
    }
}
