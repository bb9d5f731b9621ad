//! Exercises the C ABI through the extern "C" surface, including the
//! generated header.

use std::ffi::{CStr, CString};

use stgeo_ffi::*;

fn frame_flat(t: usize, cols: &[usize]) -> Vec<f64> {
    let k = cols.len();
    let mut flat = vec![0.0; 2 * t * k];
    for (j, &row) in cols.iter().enumerate() {
        flat[2 * (row * k + j)] = 1.0;
    }
    flat
}

#[test]
fn load_analyze_store_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("book.json");
    std::fs::write(
        &path,
        r#"{
            "space": "grassmann", "T": 4, "k": 2,
            "symbols": [
                [[[1,0],[0,0]],[[0,0],[1,0]],[[0,0],[0,0]],[[0,0],[0,0]]],
                [[[0,0],[0,0]],[[0,0],[0,0]],[[1,0],[0,0]],[[0,0],[1,0]]]
            ]
        }"#,
    )
    .unwrap();
    let c_path = CString::new(path.to_str().unwrap()).unwrap();

    let mut handle: *mut StgeoCodebook = std::ptr::null_mut();
    let status = unsafe { stgeo_codebook_load(c_path.as_ptr(), &mut handle) };
    assert_eq!(status, StgeoStatus::Ok);
    assert!(!handle.is_null());

    unsafe {
        assert_eq!(stgeo_codebook_size(handle), 2);
        assert_eq!(stgeo_codebook_block_len(handle), 4);
        assert_eq!(stgeo_codebook_antennas(handle), 2);
        let mut rate = 0.0;
        assert_eq!(stgeo_codebook_rate(handle, &mut rate), StgeoStatus::Ok);
        assert!((rate - 0.25).abs() < 1e-15);

        let mut stats = StgeoCodeStats::default();
        assert_eq!(
            stgeo_code_stats(handle, 1.0, 1, false, &mut stats),
            StgeoStatus::Ok
        );
        assert!((stats.min_dsum * stats.min_dsum - 2.0).abs() < 1e-9);
        assert_eq!((stats.argmin_i, stats.argmin_j), (0, 1));

        let mut symbol = vec![0.0; 2 * 4 * 2];
        assert_eq!(
            stgeo_codebook_symbol(handle, 0, symbol.as_mut_ptr()),
            StgeoStatus::Ok
        );
        assert_eq!(symbol[0], 1.0);

        let out_path = dir.path().join("copy.json");
        let c_out = CString::new(out_path.to_str().unwrap()).unwrap();
        assert_eq!(stgeo_codebook_store(handle, c_out.as_ptr()), StgeoStatus::Ok);
        let copied = std::fs::read_to_string(out_path).unwrap();
        assert!(copied.contains("grassmann"));

        stgeo_codebook_free(handle);
    }
}

#[test]
fn pair_geometry_and_pep_through_ffi() {
    let a = frame_flat(4, &[0, 1]);
    let b = frame_flat(4, &[2, 3]);
    let mut g = StgeoPairGeometry::default();
    let status = unsafe { stgeo_pair_geometry(4, 2, a.as_ptr(), b.as_ptr(), &mut g) };
    assert_eq!(status, StgeoStatus::Ok);
    assert!((g.d_noncoh * g.d_noncoh - 2.0).abs() < 1e-9);
    assert!((g.dist * g.dist - 4.0).abs() < 1e-9);

    let mut pep = 0.0;
    let mut bound = 0.0;
    unsafe {
        assert_eq!(
            stgeo_exact_pep(4, 2, a.as_ptr(), b.as_ptr(), 4.0, 1, false, &mut pep),
            StgeoStatus::Ok
        );
        assert_eq!(
            stgeo_chernov_bound(4, 2, a.as_ptr(), b.as_ptr(), 4.0, 1, false, &mut bound),
            StgeoStatus::Ok
        );
    }
    assert!(pep > 0.0 && pep <= bound + 1e-12);
}

#[test]
fn error_paths_report_codes_and_messages() {
    let mut handle: *mut StgeoCodebook = std::ptr::null_mut();
    let missing = CString::new("definitely-missing.json").unwrap();
    let status = unsafe { stgeo_codebook_load(missing.as_ptr(), &mut handle) };
    assert_eq!(status, StgeoStatus::IoError);
    let msg = unsafe { CStr::from_ptr(stgeo_last_error_message()) };
    assert!(!msg.to_bytes().is_empty());

    let status = unsafe { stgeo_codebook_load(std::ptr::null(), &mut handle) };
    assert_eq!(status, StgeoStatus::NullArgument);

    let bad_json = CString::new("{\"space\": \"stiefel\"").unwrap();
    let status = unsafe { stgeo_codebook_from_json(bad_json.as_ptr(), &mut handle) };
    assert_eq!(status, StgeoStatus::ParseError);

    // degenerate pair through the PEP surface
    let a = frame_flat(4, &[0, 1]);
    let mut pep = 0.0;
    let status =
        unsafe { stgeo_exact_pep(4, 2, a.as_ptr(), a.as_ptr(), 1.0, 1, true, &mut pep) };
    assert_eq!(status, StgeoStatus::DegeneratePair);

    // a non-orthonormal frame is invalid input
    let mut junk = frame_flat(4, &[0, 0]);
    junk[0] = 0.5;
    let mut g = StgeoPairGeometry::default();
    let status = unsafe { stgeo_pair_geometry(4, 2, junk.as_ptr(), a.as_ptr(), &mut g) };
    assert_eq!(status, StgeoStatus::InvalidInput);
}

#[test]
fn haar_unitary_is_deterministic_and_unitary() {
    let n = 3;
    let mut u1 = vec![0.0; 2 * n * n];
    let mut u2 = vec![0.0; 2 * n * n];
    unsafe {
        assert_eq!(stgeo_haar_unitary(n, 99, u1.as_mut_ptr()), StgeoStatus::Ok);
        assert_eq!(stgeo_haar_unitary(n, 99, u2.as_mut_ptr()), StgeoStatus::Ok);
    }
    assert_eq!(u1, u2);
    // unitarity: columns orthonormal
    let entry = |m: &[f64], i: usize, j: usize| {
        num_complex::Complex64::new(m[2 * (i * n + j)], m[2 * (i * n + j) + 1])
    };
    for p in 0..n {
        for q in 0..n {
            let mut acc = num_complex::Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += entry(&u1, i, p).conj() * entry(&u1, i, q);
            }
            let expect = if p == q { 1.0 } else { 0.0 };
            assert!((acc - expect).norm() < 1e-10);
        }
    }
}

#[test]
fn version_and_header_exist() {
    let v = unsafe { CStr::from_ptr(stgeo_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));

    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("stgeo.h");
    let text = std::fs::read_to_string(header).expect("cbindgen header generated at build time");
    for needle in [
        "STGEO_H",
        "StgeoStatus",
        "StgeoCodebook",
        "stgeo_codebook_load",
        "stgeo_pair_geometry",
        "stgeo_exact_pep",
        "stgeo_last_error_message",
    ] {
        assert!(text.contains(needle), "header lacks {needle}");
    }
}
