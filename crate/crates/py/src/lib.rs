//! Python module `curvepull`.

use curvepull_core::curves::{self, Classification, Curve, OrbitResult, PullbackStep as CoreStep};
use curvepull_core::mapdef::{self, LoadedMap};
use curvepull_core::verify::{self, Suite, SuiteOptions};
use curvepull_core::{AbelianVirtualEndo, RationalMatrix as CoreMatrix, Word};
use num_rational::Rational64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational64) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*r.numer(), *r.denom()))
}

/// A map definition with its virtual endomorphism.
#[pyclass(module = "curvepull", name = "Map", frozen)]
struct PyMap {
    inner: LoadedMap,
}

impl PyMap {
    fn word(&self, text: &str) -> PyResult<Word> {
        self.inner.parse_word(text).map_err(value_err)
    }

    fn fmt(&self, w: &Word) -> String {
        self.inner.format_word(w)
    }

    fn curve(&self, text: &str) -> PyResult<Curve> {
        curves::parse_curve(&self.inner.axes, &self.inner.alphabet, text).map_err(value_err)
    }

    fn name_of(&self, c: &Curve) -> String {
        c.display(&self.inner.axes, &self.inner.alphabet).to_string()
    }
}

#[pymethods]
impl PyMap {
    /// `"rabbit"` or `"dendrite"`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyMap {
            inner: mapdef::builtin(name).map_err(value_err)?,
        })
    }

    /// Parses map-definition text.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyMap {
            inner: mapdef::parse_mapdef(text).map_err(value_err)?.load(),
        })
    }

    /// A built-in name or a path to a map file.
    #[staticmethod]
    fn load(spec: &str) -> PyResult<Self> {
        Ok(PyMap {
            inner: mapdef::resolve(spec, &[]).map_err(value_err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.inner.definition.generators.to_vec()
    }

    #[getter]
    fn axes(&self) -> Vec<(String, String)> {
        (0..3)
            .map(|i| (self.inner.axes.name(i).to_string(), self.fmt(self.inner.axes.word(i))))
            .collect()
    }

    /// Map-definition text.
    fn definition(&self) -> String {
        self.inner.definition.serialize()
    }

    /// Freely reduced form of a word.
    fn reduce(&self, word: &str) -> PyResult<String> {
        Ok(self.fmt(&self.word(word)?))
    }

    fn in_domain(&self, word: &str) -> PyResult<bool> {
        Ok(self.inner.endo.in_domain(&self.word(word)?))
    }

    /// `ψ(w)`; raises `ValueError` outside the domain.
    fn psi(&self, word: &str) -> PyResult<String> {
        let w = self.word(word)?;
        Ok(self.fmt(&self.inner.endo.apply(&w).map_err(value_err)?))
    }

    /// `ψⁿ(w)`.
    #[pyo3(signature = (word, n))]
    fn psi_iter(&self, word: &str, n: usize) -> PyResult<String> {
        let w = self.word(word)?;
        Ok(self.fmt(&self.inner.endo.apply_iter(&w, n).map_err(value_err)?))
    }

    /// `ψ̂(w)`, defined on the whole group.
    fn psi_hat(&self, word: &str) -> PyResult<String> {
        Ok(self.fmt(&self.inner.endo.apply_hat(&self.word(word)?)))
    }

    /// Canonical name of a curve expression such as `"z^(x y^-1)"`.
    fn canonical(&self, curve: &str) -> PyResult<String> {
        Ok(self.name_of(&self.curve(curve)?))
    }

    fn pullback(&self, curve: &str) -> PyResult<PyPullbackStep> {
        let c = self.curve(curve)?;
        let step = curves::pullback(&self.inner.endo, &self.inner.axes, &c).map_err(value_err)?;
        Ok(self.step(&step))
    }

    #[pyo3(signature = (curve, max_steps = 1000))]
    fn orbit(&self, curve: &str, max_steps: usize) -> PyResult<PyOrbit> {
        if max_steps == 0 {
            return Err(value_err("max_steps must be at least 1"));
        }
        let c = self.curve(curve)?;
        let res = curves::orbit(&self.inner.endo, &self.inner.axes, &c, max_steps).map_err(value_err)?;
        Ok(self.orbit_result(&res))
    }

    /// Classification counts and counterexamples for every curve whose
    /// conjugator has length at most `max_len`.
    #[pyo3(signature = (max_len, max_steps = 1000))]
    fn sweep<'py>(&self, py: Python<'py>, max_len: usize, max_steps: usize) -> PyResult<Bound<'py, PyDict>> {
        let rep = py
            .detach(|| verify::run_sweep(&self.inner, max_len, max_steps))
            .map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("curves", rep.results.len())?;
        for label in ["trivial", "cycle", "unresolved"] {
            d.set_item(label, rep.count(label))?;
        }
        let hist: Vec<(String, usize, usize)> = rep
            .histogram
            .iter()
            .map(|((l, s), c)| (l.clone(), *s, *c))
            .collect();
        d.set_item("histogram", hist)?;
        let cex: Vec<(String, String)> = rep
            .counterexamples
            .iter()
            .map(|(c, why)| (self.name_of(c), why.clone()))
            .collect();
        d.set_item("counterexamples", cex)?;
        Ok(d)
    }

    /// Runs one verification suite; returns `(label, passed, detail)` rows.
    #[pyo3(signature = (suite, n = 12, samples = 10_000, seed = None))]
    fn verify(&self, suite: &str, n: usize, samples: usize, seed: Option<u64>) -> PyResult<Vec<(String, bool, String)>> {
        let suite = Suite::from_name(suite).map_err(value_err)?;
        let mut opts = SuiteOptions {
            depth: n,
            samples,
            ..SuiteOptions::default()
        };
        if let Some(s) = seed {
            opts.seed = s;
        }
        let rep = verify::run_suite(&self.inner, suite, &opts).map_err(value_err)?;
        Ok(rep.items.into_iter().map(|i| (i.label, i.pass, i.detail)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Map({:?})", self.inner.name())
    }
}

impl PyMap {
    fn step(&self, s: &CoreStep) -> PyPullbackStep {
        PyPullbackStep {
            target: s.target.as_ref().map(|c| self.name_of(c)),
            s: s.s,
            t: s.t,
            weight: s.weight,
        }
    }

    fn orbit_result(&self, r: &OrbitResult) -> PyOrbit {
        let (kind, steps, preperiod, cycle, weights, product) = match &r.classification {
            Classification::EventuallyTrivial { steps } => ("trivial", Some(*steps), None, vec![], vec![], None),
            Classification::EntersCycle {
                preperiod,
                cycle,
                weights,
                product,
            } => (
                "cycle",
                None,
                Some(*preperiod),
                cycle.iter().map(|c| self.name_of(c)).collect(),
                weights.clone(),
                Some(*product),
            ),
            Classification::Unresolved { .. } => ("unresolved", None, None, vec![], vec![], None),
        };
        PyOrbit {
            start: self.name_of(&r.start),
            trajectory: r.trajectory.iter().map(|s| self.step(s)).collect(),
            kind,
            steps_to_trivial: steps,
            preperiod,
            cycle,
            weights,
            product,
        }
    }
}

/// One pullback: the target curve (or `None` when trivial), `s`, `t` and
/// the weight `|t|/s`.
#[pyclass(module = "curvepull", name = "PullbackStep", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPullbackStep {
    #[pyo3(get)]
    target: Option<String>,
    #[pyo3(get)]
    s: u8,
    #[pyo3(get)]
    t: i64,
    weight: Rational64,
}

#[pymethods]
impl PyPullbackStep {
    #[getter]
    fn weight<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.weight)
    }

    fn __repr__(&self) -> String {
        format!(
            "PullbackStep(target={}, s={}, t={}, weight={})",
            self.target.as_deref().unwrap_or("None"),
            self.s,
            self.t,
            self.weight
        )
    }
}

#[pyclass(module = "curvepull", name = "Orbit", frozen)]
struct PyOrbit {
    #[pyo3(get)]
    start: String,
    trajectory: Vec<PyPullbackStep>,
    /// `"trivial"`, `"cycle"` or `"unresolved"`.
    #[pyo3(get)]
    kind: &'static str,
    #[pyo3(get)]
    steps_to_trivial: Option<usize>,
    #[pyo3(get)]
    preperiod: Option<usize>,
    #[pyo3(get)]
    cycle: Vec<String>,
    weights: Vec<Rational64>,
    product: Option<Rational64>,
}

#[pymethods]
impl PyOrbit {
    #[getter]
    fn trajectory(&self) -> Vec<PyPullbackStep> {
        self.trajectory.clone()
    }

    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.weights.iter().map(|w| fraction(py, w)).collect()
    }

    #[getter]
    fn product<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.product.as_ref().map(|p| fraction(py, p)).transpose()
    }

    fn __len__(&self) -> usize {
        self.trajectory.len()
    }

    fn __repr__(&self) -> String {
        format!("Orbit(start={}, kind={}, steps={})", self.start, self.kind, self.trajectory.len())
    }
}

/// Square nonnegative rational matrix.
#[pyclass(module = "curvepull", name = "Matrix", frozen)]
struct PyMatrix {
    inner: CoreMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Rows of entries given as ints or `"p/q"` strings.
    #[new]
    fn new(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let n = rows.len();
        let mut text = format!("{n}\n");
        for row in &rows {
            if row.len() != n {
                return Err(value_err("matrix must be square"));
            }
            let cells: Vec<String> = row.iter().map(|c| c.str().map(|s| s.to_string())).collect::<PyResult<_>>()?;
            text.push_str(&cells.join(" "));
            text.push('\n');
        }
        Self::parse(&text)
    }

    /// Matrix file text: `n`, then `n` rows.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyMatrix {
            inner: CoreMatrix::parse(text).map_err(value_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[pyo3(signature = (tol = 1e-12))]
    fn leading_eigenvalue(&self, tol: f64) -> PyResult<f64> {
        self.inner.leading_eigenvalue(tol).map_err(value_err)
    }

    /// Exact test of spectral radius < 1.
    fn is_contracting(&self) -> bool {
        self.inner.is_contracting()
    }

    #[pyo3(signature = (n_steps = 40, trials = 8, seed = 0))]
    fn contraction_estimate(&self, n_steps: usize, trials: usize, seed: u64) -> PyResult<f64> {
        if n_steps == 0 {
            return Err(value_err("n_steps must be at least 1"));
        }
        Ok(AbelianVirtualEndo::with_default_scale(self.inner.clone()).contraction_coefficient_estimate(n_steps, trials, seed))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pymodule]
fn curvepull(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMap>()?;
    m.add_class::<PyPullbackStep>()?;
    m.add_class::<PyOrbit>()?;
    m.add_class::<PyMatrix>()?;
    Ok(())
}
