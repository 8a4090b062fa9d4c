use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use lyapcomp_ffi::*;
use nalgebra::DMatrix;

fn last_error() -> String {
    let mut buf = vec![0u8; 512];
    let n = unsafe { lc_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    assert!(n > 0);
    CStr::from_bytes_until_nul(&buf).unwrap().to_string_lossy().into_owned()
}

/// Symmetric positive definite test matrix with known structure.
fn spd(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            3.0 + i as f64 / n as f64
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        }
    })
}

fn dense_operator(a: &DMatrix<f64>) -> *mut LcOperator {
    let mut op = ptr::null_mut();
    assert_eq!(unsafe { lc_operator_from_dense(a.nrows(), a.as_ptr(), &mut op) }, LcStatus::Ok);
    op
}

/// Solves `(A ⊗ I + I ⊗ A) vec(X) = vec(c cᵀ)` densely.
fn kronecker_solution(a: &DMatrix<f64>, c: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = a.kronecker(&eye) + eye.kronecker(a);
    let cv = nalgebra::DVector::from_column_slice(c);
    let rhs = nalgebra::DVector::from_column_slice((&cv * cv.transpose()).as_slice());
    let x = k.cholesky().unwrap().solve(&rhs);
    DMatrix::from_column_slice(n, n, x.as_slice())
}

#[test]
fn solves_all_methods_against_dense_oracle() {
    let n = 24;
    let a = spd(n);
    let c: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
    let x = kronecker_solution(&a, &c);
    let op = dense_operator(&a);
    for method in [LcMethod::Compress, LcMethod::TwoPass, LcMethod::Reference] {
        let mut config = lc_config_default();
        config.tol = 1e-10;
        config.maxmem = 40;
        config.method = method;
        let mut sol = ptr::null_mut();
        let status = unsafe { lc_solve(op, c.as_ptr(), n, &config, &mut sol) };
        assert_eq!(status, LcStatus::Ok, "{method:?}: {}", last_error());
        unsafe {
            assert_eq!(lc_solution_dimension(sol), n);
            let r = lc_solution_rank(sol);
            let mut z = vec![0.0; n * r];
            let mut y = vec![0.0; r * r];
            assert_eq!(lc_solution_factor(sol, z.as_mut_ptr(), z.len()), LcStatus::Ok);
            assert_eq!(lc_solution_core(sol, y.as_mut_ptr(), y.len()), LcStatus::Ok);
            let z = DMatrix::from_column_slice(n, r, &z);
            let y = DMatrix::from_column_slice(r, r, &y);
            let err = (&z * y * z.transpose() - &x).norm() / x.norm();
            assert!(err <= 1e-8, "{method:?}: relative error {err:e}");

            let mut report = std::mem::zeroed::<LcReport>();
            assert_eq!(lc_solution_report(sol, &mut report), LcStatus::Ok);
            assert_ne!(report.termination, LcTermination::MatvecCap);
            assert!(report.matvecs > 0 && report.total_steps > 0);
            let mut res = f64::NAN;
            assert_eq!(lc_solution_residual(op, sol, c.as_ptr(), n, &mut res), LcStatus::Ok);
            assert!(res <= 1e-8, "{method:?}: residual {res:e}");
            lc_solution_free(sol);
        }
    }
    unsafe { lc_operator_free(op) };
}

#[test]
fn csr_input_and_spectrum_hint() {
    let n: usize = 50;
    let mut offsets = vec![0usize];
    let (mut cols, mut vals) = (Vec::new(), Vec::new());
    for i in 0..n {
        for j in i.saturating_sub(1)..(i + 2).min(n) {
            cols.push(j);
            vals.push(if i == j { 2.5 } else { -1.0 });
        }
        offsets.push(cols.len());
    }
    let mut op = ptr::null_mut();
    let status = unsafe { lc_operator_from_csr(n, offsets.as_ptr(), cols.as_ptr(), vals.as_ptr(), &mut op) };
    assert_eq!(status, LcStatus::Ok);
    assert_eq!(unsafe { lc_operator_dimension(op) }, n);
    let theta = std::f64::consts::PI / (n + 1) as f64;
    let (lo, hi) = (0.5 + 2.0 - 2.0 * theta.cos(), 0.5 + 2.0 + 2.0 * theta.cos());
    assert_eq!(unsafe { lc_operator_set_spectrum(op, lo, hi) }, LcStatus::Ok);
    assert_eq!(unsafe { lc_operator_set_spectrum(op, hi, lo) }, LcStatus::InvalidInput);

    let c = vec![1.0; n];
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { lc_solve(op, c.as_ptr(), n, ptr::null(), &mut sol) }, LcStatus::Ok);
    let mut report = unsafe { std::mem::zeroed::<LcReport>() };
    unsafe { lc_solution_report(sol, &mut report) };
    // Normalized interval is the hint divided by ‖c‖².
    assert!((report.interval_lo * n as f64 - lo).abs() <= 1e-12 * lo);
    assert!((report.interval_hi * n as f64 - hi).abs() <= 1e-12 * hi);
    unsafe {
        lc_solution_free(sol);
        lc_operator_free(op);
    }
}

#[test]
fn errors_are_reported_with_messages() {
    let a = spd(4);
    let op = dense_operator(&a);
    let mut sol = ptr::null_mut();
    unsafe {
        assert_eq!(lc_solve(ptr::null(), [1.0].as_ptr(), 1, ptr::null(), &mut sol), LcStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(lc_solve(op, [1.0; 3].as_ptr(), 3, ptr::null(), &mut sol), LcStatus::DimensionMismatch);
        assert!(sol.is_null());
        assert_eq!(lc_solve(op, ptr::null(), 4, ptr::null(), &mut sol), LcStatus::NullPointer);
        assert_eq!(lc_solve(op, [0.0; 4].as_ptr(), 4, ptr::null(), &mut sol), LcStatus::InvalidInput);

        let mut config = lc_config_default();
        config.tol = 2.0;
        assert_eq!(lc_solve(op, [1.0; 4].as_ptr(), 4, &config, &mut sol), LcStatus::InvalidInput);
        assert!(last_error().contains("tol"), "{}", last_error());

        let neg = -spd(30);
        let nop = dense_operator(&neg);
        let c = vec![1.0; 30];
        assert_eq!(lc_solve(nop, c.as_ptr(), 30, ptr::null(), &mut sol), LcStatus::NotPositiveDefinite);
        lc_operator_free(nop);

        let mut other = ptr::null_mut();
        let asym = [1.0, 2.0, 0.0, 1.0];
        assert_eq!(lc_operator_from_dense(2, asym.as_ptr(), &mut other), LcStatus::InvalidInput);
        assert!(other.is_null());
        let bad_offsets = [0usize, 2, 1];
        assert_eq!(
            lc_operator_from_csr(2, bad_offsets.as_ptr(), [0usize, 1].as_ptr(), [1.0, 1.0].as_ptr(), &mut other),
            LcStatus::InvalidInput
        );
        let offsets = [0usize, 1, 2];
        assert_eq!(
            lc_operator_from_csr(2, offsets.as_ptr(), [0usize, 5].as_ptr(), [1.0, 1.0].as_ptr(), &mut other),
            LcStatus::InvalidInput
        );
        assert_eq!(lc_operator_from_dense(0, ptr::null(), &mut other), LcStatus::InvalidInput);

        let mut small = [0u8; 4];
        let full = lc_last_error(small.as_mut_ptr().cast(), small.len());
        assert!(full > small.len());
        assert_eq!(small[3], 0);

        lc_operator_free(op);
        lc_operator_free(ptr::null_mut());
        lc_solution_free(ptr::null_mut());
        assert_eq!(lc_operator_dimension(ptr::null()), 0);
        assert_eq!(lc_solution_rank(ptr::null()), 0);
        assert_eq!(CStr::from_ptr(lc_status_string(LcStatus::Ok)).to_str().unwrap(), "ok");
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

fn find_static_lib(profile_dir: &Path) -> Option<PathBuf> {
    [profile_dir.join("liblyapcomp_ffi.a"), profile_dir.join("deps/liblyapcomp_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = manifest.join("include/lyapcomp.h");
    assert!(header.exists(), "header not generated");
    let Some(lib) = find_static_lib(&target_dir()) else {
        eprintln!("static library not found; skipping C link test");
        return;
    };
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let exe = Path::new(env!("CARGO_TARGET_TMPDIR")).join("lyapcomp_smoke");
    let compile = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output();
    let compile = match compile {
        Ok(out) => out,
        Err(e) => {
            eprintln!("no C compiler ({e}); skipping C link test");
            return;
        }
    };
    assert!(compile.status.success(), "{}", String::from_utf8_lossy(&compile.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}{}",
        String::from_utf8_lossy(&run.stdout),
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("rank "));
}
