//! Python bindings. Exact values cross the boundary as strings in the
//! polynomial grammar, so nothing is rounded.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::holoindex::algebra::{parse_poly, GaussianRational as GR, PolySeries};
use ::holoindex::blowup::{blow_up_linear_center, blow_up_point};
use ::holoindex::canonical_sections::{extract_section, singular_points, SectionData, SectionKind};
use ::holoindex::cli::{run_problem as run_problem_file, Flags, ProblemFile};
use ::holoindex::germ_analysis::{contact_profile, dicritical_test, AdaptedChart, MapGerm};
use ::holoindex::index::{verify_index_theorem, CompactGeometry, GeometryKind};
use ::holoindex::residues::{
    residue_cs_grothendieck, residue_cs_n2_smooth, residue_cs_singular_curve, BranchParametrization,
    ResidueFormula,
};

fn err(e: ::holoindex::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.kind()))
}

fn scalar(s: &str) -> PyResult<GR> {
    let p = parse_poly(s, 1).map_err(err)?;
    if !p.is_constant() {
        return Err(PyValueError::new_err(format!("{s} is not a constant")));
    }
    Ok(p.constant_term())
}

fn strings(ps: &[PolySeries]) -> Vec<String> {
    ps.iter().map(|p| p.to_string()).collect()
}

fn literals(xs: &[GR]) -> Vec<String> {
    xs.iter().map(GR::to_poly_literal).collect()
}

/// A map germ fixing `{z1 = ... = z_codim = 0}` pointwise.
#[pyclass(module = "holoindex", frozen)]
struct Germ {
    inner: MapGerm,
}

#[pymethods]
impl Germ {
    #[new]
    #[pyo3(signature = (components, codim = 1, denominator = None, trunc = None))]
    fn new(components: Vec<String>, codim: usize, denominator: Option<String>, trunc: Option<u32>) -> PyResult<Self> {
        let n = components.len();
        let comps = components
            .iter()
            .map(|s| parse_poly(s, n).map(|p| if let Some(t) = trunc { p.with_trunc(t) } else { p }))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let label = if codim == n { "O" } else { "z" };
        let chart = AdaptedChart::new(n, codim, label).map_err(err)?;
        let inner = match denominator {
            None => MapGerm::new(chart, comps),
            Some(d) => {
                let d = parse_poly(&d, n).map_err(err)?;
                let work = MapGerm::new(chart.clone(), comps.clone()).map(|g| g.work_trunc()).unwrap_or(6);
                MapGerm::with_denominator(chart, comps, d, work)
            }
        }
        .map_err(err)?;
        Ok(Germ { inner })
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    #[getter]
    fn codim(&self) -> usize {
        self.inner.chart().codim
    }

    fn components(&self) -> PyResult<Vec<String>> {
        Ok(strings(&self.inner.components().map_err(err)?))
    }

    fn contact_profile<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let p = contact_profile(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("nu_f", p.nu_f)?;
        d.set_item("tangential", p.tangential)?;
        d.set_item(
            "per_coordinate_orders",
            p.per_coordinate_orders.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
        )?;
        d.set_item("b1", p.b1.map(|b| b.to_string()))?;
        Ok(d)
    }

    fn dicritical_test<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let t = dicritical_test(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("dicritical", t.dicritical)?;
        d.set_item("order", t.order)?;
        Ok(d)
    }

    #[pyo3(signature = (kind = "X_f"))]
    fn section(&self, kind: &str) -> PyResult<Section> {
        let kind: SectionKind = kind.parse().map_err(err)?;
        Ok(Section { inner: extract_section(&self.inner, kind).map_err(err)? })
    }

    /// Chart germs of the lift to the blow-up along the fixed locus (or the
    /// origin, for a point germ).
    fn blow_up(&self) -> PyResult<Vec<Germ>> {
        let m = self.inner.chart().codim;
        let l = if m == self.inner.nvars() {
            blow_up_point(&self.inner)
        } else {
            blow_up_linear_center(&self.inner, m)
        }
        .map_err(err)?;
        Ok(l.charts.into_iter().map(|c| Germ { inner: c.germ }).collect())
    }

    /// Per-point residues on the exceptional divisor and their sum against
    /// the Chern number.
    #[pyo3(signature = (geometry = None))]
    fn verify_index<'py>(&self, py: Python<'py>, geometry: Option<&str>) -> PyResult<Bound<'py, PyDict>> {
        let n = self.inner.nvars();
        let m = self.inner.chart().codim;
        let geo = match geometry {
            Some(k) => {
                let kind: GeometryKind = k.parse().map_err(err)?;
                CompactGeometry::from_kind(kind, n, Some(m)).map_err(err)?
            }
            None if m < n => CompactGeometry::exceptional_linear_center(n, m).map_err(err)?,
            None if n == 2 => CompactGeometry::exceptional_p1(),
            None => CompactGeometry::exceptional_pn(n).map_err(err)?,
        };
        let v = verify_index_theorem(&self.inner, &geo).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("nu", v.nu)?;
        d.set_item("section_kind", v.section_kind.as_str())?;
        d.set_item(
            "residues",
            v.per_point.iter().map(|p| (p.label.clone(), p.residue.value.to_poly_literal())).collect::<Vec<_>>(),
        )?;
        d.set_item("sum", v.exact_sum.to_poly_literal())?;
        d.set_item("expected", v.expected.to_poly_literal())?;
        d.set_item("pass", v.pass)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let comps = self.inner.components().map(|c| strings(&c).join(", ")).unwrap_or_default();
        format!("Germ(({comps}), codim={})", self.inner.chart().codim)
    }
}

#[pyclass(module = "holoindex", frozen)]
struct Section {
    inner: SectionData,
}

#[pymethods]
impl Section {
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn nu(&self) -> u32 {
        self.inner.nu
    }

    #[getter]
    fn g_on_s(&self) -> Vec<String> {
        strings(&self.inner.g_on_s)
    }

    #[getter]
    fn h1_on_s(&self) -> String {
        self.inner.h1_on_s.to_string()
    }

    /// Rational zeros as coordinate lists, and minimal polynomials of the
    /// remaining ones.
    fn singular_points(&self) -> PyResult<(Vec<Vec<String>>, Vec<String>)> {
        let l = singular_points(&self.inner).map_err(err)?;
        let pts = l.points.iter().map(|p| literals(&p.coords)).collect();
        let orbits = l.orbits.iter().map(|o| o.minpoly.display_in(&format!("z{}", o.var + 1))).collect();
        Ok((pts, orbits))
    }

    /// Camacho-Sad residue at a rational zero.
    fn residue(&self, point: Vec<String>) -> PyResult<String> {
        let p = point.iter().map(|s| scalar(s)).collect::<PyResult<Vec<_>>>()?;
        let r = if self.inner.nvars() == 2 {
            residue_cs_n2_smooth(&self.inner, &p)
        } else {
            residue_cs_grothendieck(&self.inner, &p)
        }
        .map_err(err)?;
        Ok(r.value.to_poly_literal())
    }
}

/// Residue along one branch of a plane curve `{ell = 0}`; the branch is given
/// by two polynomials in `t`.
#[pyfunction]
#[pyo3(signature = (germ, ell, aux, branch, comfortable = false))]
fn curve_branch_residue(germ: &Germ, ell: &str, aux: &str, branch: Vec<String>, comfortable: bool) -> PyResult<String> {
    let ell = parse_poly(ell, 2).map_err(err)?;
    let aux = parse_poly(aux, 2).map_err(err)?;
    let comps = branch
        .iter()
        .map(|s| parse_poly(&s.replace('t', "z1"), 1))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let b = BranchParametrization::new(comps).map_err(err)?;
    let formula =
        if comfortable { ResidueFormula::CsSingularCurveComfortable } else { ResidueFormula::CsSingularCurve };
    let r = residue_cs_singular_curve(&germ.inner, &ell, &aux, &b, formula).map_err(err)?;
    Ok(r.value.to_poly_literal())
}

/// Runs a problem file given as JSON text and returns the canonical report.
#[pyfunction]
fn run_problem(text: &str) -> PyResult<String> {
    let p = ProblemFile::parse(text).map_err(err)?;
    Ok(run_problem_file(&p, &Flags::default()).to_canonical_json())
}

#[pymodule]
fn holoindex(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Germ>()?;
    m.add_class::<Section>()?;
    m.add_function(wrap_pyfunction!(curve_branch_residue, m)?)?;
    m.add_function(wrap_pyfunction!(run_problem, m)?)?;
    Ok(())
}
