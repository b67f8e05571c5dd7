use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use steinlab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sl_last_error()) }.to_string_lossy().into_owned()
}

fn poisson(lambda: f64) -> *mut SlPmf {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sl_pmf_poisson(lambda, 1e-15, &mut h) }, SlStatus::Ok);
    h
}

#[test]
fn pmf_roundtrip() {
    let w = [1.0, 2.0, 1.0];
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(sl_pmf_from_weights(w.as_ptr(), w.len(), &mut h), SlStatus::Ok);
        assert_eq!(sl_pmf_len(h), 3);
        assert_eq!(sl_pmf_omitted_mass(h), 0.0);
        let mut buf = [0.0; 3];
        assert_eq!(sl_pmf_probs(h, buf.as_mut_ptr(), 3), SlStatus::Ok);
        assert_eq!(buf, [0.25, 0.5, 0.25]);
        assert_eq!(sl_pmf_probs(h, buf.as_mut_ptr(), 2), SlStatus::InvalidArgument);

        let (mut m, mut v) = (0.0, 0.0);
        assert_eq!(sl_pmf_moments(h, &mut m, &mut v), SlStatus::Ok);
        assert_eq!((m, v), (1.0, 0.5));

        let mut sb = ptr::null_mut();
        assert_eq!(sl_pmf_size_bias(h, &mut sb), SlStatus::Ok);
        let mut buf = [0.0; 3];
        assert_eq!(sl_pmf_probs(sb, buf.as_mut_ptr(), 3), SlStatus::Ok);
        assert_eq!(buf, [0.0, 0.5, 0.5]);
        sl_pmf_free(sb);
        sl_pmf_free(h);
    }
}

#[test]
fn zip_bound_is_exact() {
    let (p, lambda) = (0.9, 2.0);
    let mut zip = ptr::null_mut();
    unsafe {
        assert_eq!(sl_pmf_zip(p, lambda, 1e-15, &mut zip), SlStatus::Ok);
        let po = poisson(p * lambda);
        let (mut tv, mut err) = (0.0, 0.0);
        assert_eq!(sl_tv_distance(zip, po, &mut tv, &mut err), SlStatus::Ok);

        let (mut mu, mut var) = (0.0, 0.0);
        assert_eq!(sl_pmf_moments(zip, &mut mu, &mut var), SlStatus::Ok);
        let mut b = SlBound {
            total: 0.0,
            lambda_used: 0.0,
            p_used: 0.0,
            vacuous: true,
            n_terms: 0,
            terms: [0.0; SL_MAX_TERMS],
        };
        assert_eq!(sl_bound_negative(mu, var, p, lambda, &mut b), SlStatus::Ok);
        assert_eq!(b.n_terms, 3);
        assert!(!b.vacuous);
        let sum: f64 = b.terms[..b.n_terms].iter().sum();
        assert!((sum - b.total).abs() < 1e-15);
        assert!((b.total - (1.0 - p) * (1.0 - (-lambda).exp())).abs() < 1e-12);
        assert!(tv <= b.total + err + 1e-12);
        sl_pmf_free(zip);
        sl_pmf_free(po);
    }
}

#[test]
fn other_bounds() {
    let mut b = SlBound {
        total: 0.0,
        lambda_used: 0.0,
        p_used: 0.0,
        vacuous: false,
        n_terms: 0,
        terms: [0.0; SL_MAX_TERMS],
    };
    unsafe {
        assert_eq!(sl_classic_bound(2.0, 2.0, &mut b), SlStatus::Ok);
        assert_eq!(b.total, 0.0);
        assert_eq!(sl_bound_positive(2.0, 2.5, 0.6, 2.0, 0.5, &mut b), SlStatus::Ok);
        assert_eq!(b.n_terms, 3);
        assert_eq!(sl_neg_assoc_bound(2.0, 1.5, 1.0, &mut b), SlStatus::Ok);
        assert_eq!(sl_epidemic_bound(4.0, 3.0, 0.99, &mut b), SlStatus::Ok);
        assert_eq!(b.n_terms, 2);
        let values = [0u64, 1, 1, 2];
        assert_eq!(sl_sampling_bound(values.as_ptr(), 4, 2, &mut b), SlStatus::Ok);
        assert!((b.total - 2.594).abs() < 1e-3);
        assert_eq!(b.p_used, 0.5);
        assert_eq!(sl_sampling_bound(values.as_ptr(), 4, 4, &mut b), SlStatus::InvalidArgument);
    }
}

#[test]
fn poincare_and_kolmogorov() {
    unsafe {
        let po = poisson(3.0);
        let mut c = 0.0;
        assert_eq!(sl_poincare_oracle(po, &mut c), SlStatus::Ok);
        assert!((c / 3.0 - 1.0).abs() < 0.01, "{c}");
        let mut zb = 0.0;
        assert_eq!(sl_zip_poincare_bound(1.0, 3.0, &mut zb), SlStatus::Ok);
        assert!(c <= zb * (1.0 + 1e-9));
        let mut pb = 0.0;
        assert_eq!(sl_poincare_bound(3.0, 1.0, 0.5, &mut pb), SlStatus::Ok);
        assert_eq!(pb, 3.0);
        assert_eq!(sl_poincare_bound(3.0, 1.0, 0.0, &mut pb), SlStatus::InvalidArgument);

        let mut k = 0.0;
        assert_eq!(sl_kolmogorov_to_std_normal(po, 3.0, 3f64.sqrt(), &mut k), SlStatus::Ok);
        assert!(k > 0.0 && k < 0.5);
        assert_eq!(sl_kolmogorov_to_std_normal(po, 3.0, -1.0, &mut k), SlStatus::InvalidArgument);
        sl_pmf_free(po);
    }
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(sl_pmf_poisson(-1.0, 1e-15, &mut h), SlStatus::InvalidArgument);
        assert!(h.is_null());
        assert!(last_error().contains("lambda"), "{}", last_error());

        let zero = [1.0, 0.0];
        assert_eq!(sl_pmf_from_weights(zero.as_ptr(), 2, &mut h), SlStatus::Ok);
        let mut sb = ptr::null_mut();
        assert_eq!(sl_pmf_size_bias(h, &mut sb), SlStatus::ZeroMean);
        sl_pmf_free(h);

        let neg = [1.0, -1.0];
        assert_eq!(sl_pmf_from_weights(neg.as_ptr(), 2, &mut h), SlStatus::InvalidArgument);

        let single = [0.0, 1.0];
        assert_eq!(sl_pmf_from_weights(single.as_ptr(), 2, &mut h), SlStatus::Ok);
        let mut c = 0.0;
        assert_eq!(sl_poincare_oracle(h, &mut c), SlStatus::Singular);
        sl_pmf_free(h);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        assert_eq!(sl_pmf_from_weights(ptr::null(), 3, &mut ptr::null_mut()), SlStatus::NullPointer);
        assert!(last_error().contains("weights"));
        assert_eq!(sl_pmf_poisson(1.0, 1e-15, ptr::null_mut()), SlStatus::NullPointer);
        assert_eq!(sl_classic_bound(1.0, 1.0, ptr::null_mut()), SlStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(sl_poincare_oracle(ptr::null(), &mut v), SlStatus::NullPointer);
        assert_eq!(sl_pmf_len(ptr::null()), 0);
        assert!(sl_pmf_omitted_mass(ptr::null()).is_nan());
        sl_pmf_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(sl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/steinlab.h")).unwrap();
    for needle in [
        "#ifndef STEINLAB_H",
        "typedef struct SlPmf SlPmf;",
        "SL_STATUS_NULL_POINTER = 2",
        "double terms[SL_MAX_TERMS];",
        "sl_pmf_free(struct SlPmf *pmf);",
        "sl_sampling_bound(const uint64_t *values",
        "const char *sl_last_error(void);",
    ] {
        assert!(header.contains(needle), "missing {needle}");
    }
}

/// Directory holding the library artifacts next to this test binary.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = artifact_dir().join("libsteinlab_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.starts_with(env!("CARGO_PKG_VERSION")), "{text}");
}
