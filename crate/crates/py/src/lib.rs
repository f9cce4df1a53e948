//! Python bindings: exact cyclotomic values, Gauss/Jacobi sums,
//! hypergeometric functions, equivariant point counts, and zeta series.
//!
//! Build with `cargo build -p ffhyper-py`, then import the produced
//! `libffhyper_py.so` as `ffhyper_py` (see python/smoke_test.py).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ffhyper::counting::{classes, dwork_n, fermat_n, formula_n, Surface};
use ffhyper::ffield::{build_field, FieldElem};
use ffhyper::hyperf::HGParams;
use ffhyper::lfun::zeta;
use ffhyper::numeric::approx_cyclo;
use ffhyper::Char;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An exact element of a cyclotomic field Q(zeta_N).
#[pyclass(name = "Cyclo", from_py_object)]
#[derive(Clone)]
struct PyCyclo {
    inner: ffhyper::Cyclo,
}

#[pymethods]
impl PyCyclo {
    /// Root-of-unity order of the representation.
    #[getter]
    fn order(&self) -> u64 {
        self.inner.order()
    }

    /// Power-basis coordinates as (numerator, denominator) strings.
    fn coeffs(&self) -> Vec<(String, String)> {
        self.inner
            .coeffs()
            .iter()
            .map(|c| (c.numer().to_string(), c.denom().to_string()))
            .collect()
    }

    /// Complex approximation (value, error_bound).
    fn approx(&self) -> (f64, f64, f64) {
        use num_traits::ToPrimitive;
        let a = approx_cyclo(&self.inner, 64);
        (
            a.re.to_f64().unwrap_or(f64::NAN),
            a.im.to_f64().unwrap_or(f64::NAN),
            a.err.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Exact integer value, if the number is a rational integer.
    fn as_integer(&self) -> Option<String> {
        self.inner.as_integer().ok().map(|v| v.to_string())
    }

    fn __add__(&self, other: &PyCyclo) -> PyCyclo {
        PyCyclo { inner: self.inner.add(&other.inner) }
    }

    fn __mul__(&self, other: &PyCyclo) -> PyCyclo {
        PyCyclo { inner: self.inner.mul(&other.inner) }
    }

    fn __neg__(&self) -> PyCyclo {
        PyCyclo { inner: self.inner.neg() }
    }

    fn __eq__(&self, other: &PyCyclo) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Cyclo({})", self.inner)
    }

    fn conj(&self) -> PyCyclo {
        PyCyclo { inner: self.inner.conj() }
    }
}

/// zeta_n^k as an exact cyclotomic number.
#[pyfunction]
fn root_of_unity(n: u64, k: i64) -> PyResult<PyCyclo> {
    if n == 0 {
        return Err(err("order must be positive"));
    }
    Ok(PyCyclo { inner: ffhyper::Cyclo::root(n, k) })
}

/// Gauss sum g(phi^k) over F_{p^f}.
#[pyfunction]
#[pyo3(signature = (p, k, f = 1))]
fn gauss_sum(p: u64, k: i64, f: u32) -> PyResult<PyCyclo> {
    let ctx = build_field(p, f).map_err(err)?;
    Ok(PyCyclo { inner: ffhyper::gauss(&Char::new(&ctx, k)) })
}

/// Jacobi sum j(phi^{k_1}, ..., phi^{k_n}) over F_{p^f}.
#[pyfunction]
#[pyo3(signature = (p, chars, f = 1))]
fn jacobi_sum(p: u64, chars: Vec<i64>, f: u32) -> PyResult<PyCyclo> {
    if chars.is_empty() {
        return Err(err("need at least one character exponent"));
    }
    let ctx = build_field(p, f).map_err(err)?;
    let cs: Vec<Char> = chars.iter().map(|&k| Char::new(&ctx, k)).collect();
    Ok(PyCyclo { inner: ffhyper::jacobi(&cs) })
}

/// Hypergeometric function F(alphas; betas; lambda) over F_{p^f}
/// (balanced parameter lists, lambda as a field element 0..q).
#[pyfunction]
#[pyo3(signature = (p, alphas, betas, lam, f = 1))]
fn hyper_f(p: u64, alphas: Vec<i64>, betas: Vec<i64>, lam: u64, f: u32) -> PyResult<PyCyclo> {
    let ctx = build_field(p, f).map_err(err)?;
    if lam >= ctx.q {
        return Err(err("lambda outside the field"));
    }
    let a: Vec<Char> = alphas.iter().map(|&k| Char::new(&ctx, k)).collect();
    let b: Vec<Char> = betas.iter().map(|&k| Char::new(&ctx, k)).collect();
    let params = HGParams::new(a, b).map_err(err)?;
    Ok(PyCyclo { inner: ffhyper::hyper_f(&params, FieldElem(lam)) })
}

/// Per-class counts N_1(D_lambda; chi^w) of the diagonal hypersurface
/// X_1^d + ... + X_n^d = d lambda X^h over F_p, at extension level r.
/// Returns a list of (w, value) pairs.
#[pyfunction]
#[pyo3(signature = (p, d, h, lam, r = 1))]
fn surface_counts(p: u64, d: u64, h: Vec<u64>, lam: u64, r: u32) -> PyResult<Vec<(Vec<u64>, PyCyclo)>> {
    let ctx = build_field(p, 1).map_err(err)?;
    let s = Surface::new(&ctx, d, h, FieldElem(lam)).map_err(err)?;
    let mut out = Vec::new();
    for c in classes(&s) {
        let v = if s.lambda.0 == 0 {
            fermat_n(&s, &c, r, false)
        } else if s.is_dwork() {
            dwork_n(&s, &c, r).map_err(err)?
        } else {
            formula_n(&s, &c, r).map_err(err)?
        };
        out.push((c.w.clone(), PyCyclo { inner: v }));
    }
    Ok(out)
}

/// Integer coefficients of the zeta series of a smooth diagonal
/// hypersurface through t^trunc, as decimal strings.
#[pyfunction]
#[pyo3(signature = (p, d, h, lam, trunc = 8))]
fn zeta_series(p: u64, d: u64, h: Vec<u64>, lam: u64, trunc: usize) -> PyResult<Vec<String>> {
    let ctx = build_field(p, 1).map_err(err)?;
    let s = Surface::new(&ctx, d, h, FieldElem(lam)).map_err(err)?;
    let z = zeta(&s, trunc).map_err(err)?;
    Ok(z.series_integers.iter().map(|v| v.to_string()).collect())
}

/// Run a verification suite ("identities", "counts", "relations", "all");
/// returns (name, pass, witness) triples.
#[pyfunction]
fn verify(suite: &str) -> PyResult<Vec<(String, bool, Option<String>)>> {
    let checks = match suite {
        "identities" => ffhyper::verify::identity_fields()
            .into_iter()
            .flat_map(|(p, f)| ffhyper::verify::identities_for_field(p, f))
            .collect(),
        "counts" => {
            let mut v = Vec::new();
            for (p, d, h) in ffhyper::verify::count_surfaces() {
                v.extend(ffhyper::verify::counts_for_surface(p, d, &h));
                v.extend(ffhyper::verify::fermat_for_surface(p, d, &h));
            }
            v
        }
        "relations" => ffhyper::verify::relation_checks(),
        "all" => ffhyper::verify::verify_all(),
        other => return Err(err(format!("unknown suite: {}", other))),
    };
    Ok(checks.into_iter().map(|c| (c.name, c.pass, c.witness)).collect())
}

#[pymodule]
fn ffhyper_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCyclo>()?;
    m.add_function(wrap_pyfunction!(root_of_unity, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_sum, m)?)?;
    m.add_function(wrap_pyfunction!(jacobi_sum, m)?)?;
    m.add_function(wrap_pyfunction!(hyper_f, m)?)?;
    m.add_function(wrap_pyfunction!(surface_counts, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_series, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
