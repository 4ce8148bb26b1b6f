fn main() {
    // LAPACK backend for ndarray-linalg: link the system OpenBLAS, which
    // bundles LAPACK. Avoids compiling a vendored BLAS from source.
    println!("cargo:rustc-link-lib=dylib=openblas");
}
