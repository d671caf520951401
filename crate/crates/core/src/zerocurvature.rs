//! Pairwise zero-curvature residuals, Lax operators, flat transport and
//! spectral expansions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat;
use crate::error::{Error, Result};
use crate::fields::{ComplexField, Field, GridSpec, MatrixField, ResidualReport, ScalarField, Scheme};

/// Connection matrices keyed by the axis they differentiate along.
#[derive(Clone, Debug)]
pub struct ConnectionSet {
    members: Vec<(String, MatrixField)>,
    pub params: Option<LaxParameters>,
}

impl ConnectionSet {
    pub fn new(members: Vec<(&str, MatrixField)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::Invalid("connection set has no members".into()));
        };
        let spec = first.spec().clone();
        let dim = first.dim();
        for (i, (name, f)) in members.iter().enumerate() {
            if f.spec() != &spec {
                return Err(Error::GridMismatch);
            }
            if f.dim() != dim {
                return Err(Error::DimMismatch(dim, f.dim()));
            }
            if !spec.has_axis(name) {
                return Err(Error::UnknownAxis(name.to_string()));
            }
            if members[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::Invalid(format!("duplicate member for axis `{name}`")));
            }
        }
        Ok(ConnectionSet {
            members: members
                .into_iter()
                .map(|(n, f)| (n.to_string(), f))
                .collect(),
            params: None,
        })
    }

    pub fn with_params(mut self, p: LaxParameters) -> Self {
        self.params = Some(p);
        self
    }

    pub fn spec(&self) -> &GridSpec {
        self.members[0].1.spec()
    }

    pub fn dim(&self) -> usize {
        self.members[0].1.dim()
    }

    pub fn axes(&self) -> Vec<&str> {
        self.members.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn members(&self) -> &[(String, MatrixField)] {
        &self.members
    }

    pub fn get(&self, axis: &str) -> Result<&MatrixField> {
        self.members
            .iter()
            .find(|(n, _)| n == axis)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::Missing(format!("connection member for axis `{axis}`")))
    }

    pub fn replace(&mut self, axis: &str, f: MatrixField) -> Result<()> {
        if f.spec() != self.spec() {
            return Err(Error::GridMismatch);
        }
        let slot = self
            .members
            .iter_mut()
            .find(|(n, _)| n == axis)
            .ok_or_else(|| Error::Missing(format!("connection member for axis `{axis}`")))?;
        slot.1 = f;
        Ok(())
    }

    /// Largest node norm over all members; residuals are judged relative to it.
    pub fn scale(&self) -> f64 {
        self.members
            .iter()
            .map(|(_, f)| f.norms().0)
            .fold(0.0, f64::max)
    }

    /// Same connection with every member conjugated: `C⁻¹ A C`.
    pub fn conjugated(&self, c: &Mat) -> Result<Self> {
        let ci = c
            .inverse()
            .ok_or(Error::Singular { node: 0 })?;
        Ok(ConnectionSet {
            members: self
                .members
                .iter()
                .map(|(n, f)| (n.clone(), f.map(|m| ci * m * *c)))
                .collect(),
            params: self.params,
        })
    }
}

/// Spectral parameter and the weights of the Lax operators. `e_power` and
/// `f_power` are the λ exponents multiplying `e` and `f` in the second
/// operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaxParameters {
    pub lambda: C64,
    pub a: C64,
    pub b: C64,
    pub e: C64,
    pub f: C64,
    #[serde(default = "default_e_power")]
    pub e_power: i32,
    #[serde(default = "default_f_power")]
    pub f_power: i32,
}

fn default_e_power() -> i32 {
    3
}

fn default_f_power() -> i32 {
    4
}

impl Default for LaxParameters {
    fn default() -> Self {
        let z = C64::new(0.0, 0.0);
        LaxParameters {
            lambda: z,
            a: z,
            b: z,
            e: z,
            f: z,
            e_power: default_e_power(),
            f_power: default_f_power(),
        }
    }
}

impl LaxParameters {
    pub fn validate(&self) -> Result<()> {
        if [self.lambda, self.a, self.b, self.e, self.f]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::Invalid("Lax parameters must be finite".into()))
        }
    }
}

/// `∂_{axisQ}P − ∂_{axisP}Q + [P, Q]` node-wise, central2 differences.
pub fn zc_residual(p: &MatrixField, q: &MatrixField, axis_p: &str, axis_q: &str) -> Result<MatrixField> {
    zc_residual_with(p, q, axis_p, axis_q, Scheme::Central2)
}

pub fn zc_residual_with(
    p: &MatrixField,
    q: &MatrixField,
    axis_p: &str,
    axis_q: &str,
    scheme: Scheme,
) -> Result<MatrixField> {
    if axis_p == axis_q {
        return Err(Error::Invalid(format!(
            "zero-curvature pair needs distinct axes, got `{axis_p}` twice"
        )));
    }
    if p.spec() != q.spec() {
        return Err(Error::GridMismatch);
    }
    let pq = p.partial(axis_q, scheme)?;
    let qp = q.partial(axis_p, scheme)?;
    let br = p.commutator(q)?;
    let mut out = pq.sub(&qp)?;
    for (o, b) in out.values_mut().iter_mut().zip(br.values()) {
        *o += *b;
    }
    Ok(out)
}

/// One pairwise residual per unordered pair of members, labelled
/// `F[a,b]` in member order.
pub fn mmlxii_residual(conns: &ConnectionSet) -> Result<ResidualReport> {
    mmlxii_residual_with(conns, Scheme::Central2)
}

pub fn mmlxii_residual_with(conns: &ConnectionSet, scheme: Scheme) -> Result<ResidualReport> {
    let m = conns.members();
    if m.len() < 2 {
        return Err(Error::Invalid(format!(
            "zero-curvature system needs at least 2 axes, got {}",
            m.len()
        )));
    }
    let mut rep = ResidualReport::new();
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let r = zc_residual_with(&m[i].1, &m[j].1, &m[i].0, &m[j].0, scheme)?;
            rep.push(&format!("F[{},{}]", m[i].0, m[j].0), r.norms());
        }
    }
    Ok(rep)
}

/// `C_ξ2 − b C_ξ4 + a G_ξ3 − G_ξ1 + [C, G]`, the compatibility condition of
/// `E_ξ1 = a E_ξ3 + C E`, `E_ξ2 = b E_ξ4 + G E`. Derivatives along `xi` axes
/// absent from the grid are taken as zero.
pub fn mmlxviii_residual(c: &MatrixField, g: &MatrixField, a: C64, b: C64, scheme: Scheme) -> Result<MatrixField> {
    if c.spec() != g.spec() {
        return Err(Error::GridMismatch);
    }
    let spec = c.spec();
    let mut out = c.commutator(g)?;
    let mut add = |f: &MatrixField, axis: &str, w: C64| -> Result<()> {
        if spec.has_axis(axis) && w != C64::new(0.0, 0.0) {
            let d = f.partial(axis, scheme)?;
            for (o, v) in out.values_mut().iter_mut().zip(d.values()) {
                *o += v.scale(w);
            }
        }
        Ok(())
    };
    let one = C64::new(1.0, 0.0);
    add(c, "xi2", one)?;
    add(c, "xi4", -b)?;
    add(g, "xi3", a)?;
    add(g, "xi1", -one)?;
    Ok(out)
}

/// Scalar data of the plane case. `n3` accompanies a `z` axis and `omega3`
/// a `t` axis.
pub struct PlaneFields<'a> {
    pub k: &'a ScalarField,
    pub m3: &'a ScalarField,
    pub n3: Option<&'a ScalarField>,
    pub omega3: Option<&'a ScalarField>,
}

/// Residuals of the scalar compatibility equations `k_y = m3_x`,
/// `k_z = n3_x`, `m3_z = n3_y`, `m3_t = ω3_y`, `n3_t = ω3_z`, `k_t = ω3_x`,
/// restricted to the axes present.
pub fn plane_residuals(f: &PlaneFields, scheme: Scheme) -> Result<ResidualReport> {
    let spec = f.k.spec();
    for a in ["x", "y"] {
        if !spec.has_axis(a) {
            return Err(Error::Missing(format!("plane case needs axis `{a}`")));
        }
    }
    for g in [Some(f.m3), f.n3, f.omega3].into_iter().flatten() {
        if g.spec() != spec {
            return Err(Error::GridMismatch);
        }
    }
    let has_z = spec.has_axis("z");
    let has_t = spec.has_axis("t");
    if has_z != f.n3.is_some() {
        return Err(Error::Missing("n3 must be given exactly when the grid has a z axis".into()));
    }
    if has_t != f.omega3.is_some() {
        return Err(Error::Missing(
            "omega3 must be given exactly when the grid has a t axis".into(),
        ));
    }
    let mut rep = ResidualReport::new();
    let mut eq = |label: &str, lhs: &ScalarField, la: &str, rhs: &ScalarField, ra: &str| -> Result<()> {
        let d = lhs
            .partial(la, scheme)?
            .linear_combination(1.0, &rhs.partial(ra, scheme)?, -1.0)?;
        rep.push(label, d.norms());
        Ok(())
    };
    eq("k_y - m3_x", f.k, "y", f.m3, "x")?;
    if let Some(n3) = f.n3 {
        eq("k_z - n3_x", f.k, "z", n3, "x")?;
        eq("m3_z - n3_y", f.m3, "z", n3, "y")?;
    }
    if let Some(w) = f.omega3 {
        eq("m3_t - omega3_y", f.m3, "t", w, "y")?;
        if let Some(n3) = f.n3 {
            eq("n3_t - omega3_z", n3, "t", w, "z")?;
        }
        eq("k_t - omega3_x", f.k, "t", w, "x")?;
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LaxForm {
    /// `L = D_x + aλD_y + bλ²D_z`, `M = D_t + eλ^pD_y + fλ^qD_z`.
    Covariant3p1,
    /// `L = D_x + aλD_y`, `M = D_t + eλ^pD_y`.
    Covariant2p1,
    /// `L = D_xi1 − λD_xi3`, `M = D_xi2 − λD_xi4`.
    SdymNull,
}

/// A linear operator `ψ ↦ Σ c_j (∂_j ψ − A_j ψ)`.
#[derive(Clone, Debug)]
pub struct CovariantOperator {
    pub terms: Vec<(String, C64)>,
    conns: ConnectionSet,
    scheme: Scheme,
}

impl CovariantOperator {
    pub fn apply(&self, psi: &MatrixField) -> Result<MatrixField> {
        if psi.spec() != self.conns.spec() {
            return Err(Error::GridMismatch);
        }
        let mut out = psi.map(|m| Mat::zeros(m.dim()));
        for (axis, c) in &self.terms {
            if *c == C64::new(0.0, 0.0) {
                continue;
            }
            let d = psi.partial(axis, self.scheme)?;
            let a = self.conns.get(axis)?;
            let cov = d.sub(&a.mul(psi)?)?;
            for (o, v) in out.values_mut().iter_mut().zip(cov.values()) {
                *o += v.scale(*c);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct LaxPair {
    pub l: CovariantOperator,
    pub m: CovariantOperator,
}

pub fn build_lax(conns: &ConnectionSet, params: &LaxParameters, form: LaxForm) -> Result<LaxPair> {
    build_lax_with(conns, params, form, Scheme::Central2)
}

pub fn build_lax_with(
    conns: &ConnectionSet,
    params: &LaxParameters,
    form: LaxForm,
    scheme: Scheme,
) -> Result<LaxPair> {
    params.validate()?;
    let one = C64::new(1.0, 0.0);
    let lam = params.lambda;
    let (l, m): (Vec<(&str, C64)>, Vec<(&str, C64)>) = match form {
        LaxForm::Covariant3p1 => (
            vec![("x", one), ("y", params.a * lam), ("z", params.b * lam * lam)],
            vec![
                ("t", one),
                ("y", params.e * lam.powi(params.e_power)),
                ("z", params.f * lam.powi(params.f_power)),
            ],
        ),
        LaxForm::Covariant2p1 => (
            vec![("x", one), ("y", params.a * lam)],
            vec![("t", one), ("y", params.e * lam.powi(params.e_power))],
        ),
        LaxForm::SdymNull => (
            vec![("xi1", one), ("xi3", -lam)],
            vec![("xi2", one), ("xi4", -lam)],
        ),
    };
    for (axis, _) in l.iter().chain(&m) {
        conns.get(axis)?;
        conns.spec().axis_index(axis)?;
    }
    let mk = |t: Vec<(&str, C64)>| CovariantOperator {
        terms: t.into_iter().map(|(a, c)| (a.to_string(), c)).collect(),
        conns: conns.clone(),
        scheme,
    };
    Ok(LaxPair { l: mk(l), m: mk(m) })
}

pub type Wavefunction = MatrixField;

/// Transports `psi` along one grid line, from index 0 to the last node, with
/// exponential trapezoid steps `ψ ← exp(h (P_i + P_{i+1})/2) ψ`.
fn transport_line(p: &MatrixField, axis: usize, start: &[usize], psi: Mat) -> Result<(Mat, Vec<usize>)> {
    let spec = p.spec();
    let n = spec.axes()[axis].count;
    let h = spec.axes()[axis].spacing;
    let mut idx = start.to_vec();
    idx[axis] = 0;
    let mut psi = psi;
    let mut prev = p.at(&idx);
    for i in 1..n {
        idx[axis] = i;
        let cur = p.at(&idx);
        psi = (prev + cur).scale_re(0.5 * h).expm() * psi;
        if psi.inverse().is_none() {
            return Err(Error::Singular { node: spec.node(&idx) });
        }
        prev = cur;
    }
    Ok((psi, idx))
}

/// Transports `psi0` from the first grid node to the last along the axes in
/// `order`, then in reverse order, and reports the relative mismatch of the
/// two endpoint values as `path-mismatch`.
pub fn wavefunction_path_check(conns: &ConnectionSet, psi0: &Mat, order: &[&str]) -> Result<ResidualReport> {
    if order.len() < 2 {
        return Err(Error::Invalid("path check needs at least two axes".into()));
    }
    if psi0.dim() != conns.dim() {
        return Err(Error::DimMismatch(conns.dim(), psi0.dim()));
    }
    if psi0.inverse().is_none() {
        return Err(Error::Singular { node: 0 });
    }
    let spec = conns.spec();
    let mut rep = ResidualReport::new();
    let flat = mmlxii_residual(conns)?;
    let h = spec.max_spacing();
    let tol = 10.0 * h * h * conns.scale().max(1.0);
    if flat.max_linf() > tol {
        rep.warn(format!(
            "connection is not flat to tolerance: max residual {:.3e} > {:.3e}",
            flat.max_linf(),
            tol
        ));
    }
    let run = |axes: &mut dyn Iterator<Item = &&str>| -> Result<Mat> {
        let mut psi = *psi0;
        let mut idx = vec![0; spec.ndim()];
        for a in axes {
            let ax = spec.axis_index(a)?;
            let (next, end) = transport_line(conns.get(a)?, ax, &idx, psi)?;
            psi = next;
            idx = end;
        }
        Ok(psi)
    };
    let forward = run(&mut order.iter())?;
    let backward = run(&mut order.iter().rev())?;
    let mismatch = (forward - backward).frobenius() / forward.frobenius().max(1e-300);
    rep.push("path-mismatch", (mismatch, mismatch));
    rep.merge("flatness ", flat);
    Ok(rep)
}

/// Weight multiplying one coefficient in a spectral expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    /// `λ^j`.
    Power(i32),
    /// `P(λ)/Q(λ)` with coefficients in ascending powers.
    Rational { num: Vec<C64>, den: Vec<C64> },
}

fn poly(c: &[C64], x: C64) -> (C64, f64) {
    let mut v = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (j, a) in c.iter().enumerate() {
        v += a * x.powi(j as i32);
        mag += a.norm() * x.norm().powi(j as i32);
    }
    (v, mag)
}

impl Weight {
    pub fn eval(&self, lambda: C64) -> Result<C64> {
        match self {
            Weight::Power(j) => {
                if *j < 0 && lambda.norm() == 0.0 {
                    return Err(Error::Pole(lambda));
                }
                Ok(lambda.powi(*j))
            }
            Weight::Rational { num, den } => {
                let (q, mag) = poly(den, lambda);
                if q.norm() <= 1e-12 * mag.max(1e-300) {
                    return Err(Error::Pole(lambda));
                }
                Ok(poly(num, lambda).0 / q)
            }
        }
    }
}

/// Coefficient field of one expansion term.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Real(ScalarField),
    Complex(ComplexField),
}

impl Coefficient {
    fn spec(&self) -> &GridSpec {
        match self {
            Coefficient::Real(f) => f.spec(),
            Coefficient::Complex(f) => f.spec(),
        }
    }

    fn value(&self, node: usize) -> C64 {
        match self {
            Coefficient::Real(f) => C64::new(f.values()[node], 0.0),
            Coefficient::Complex(f) => f.values()[node],
        }
    }
}

/// `k(λ) = Σ w_j(λ) k_j` and likewise for σ, τ and ω.
#[derive(Clone, Debug, Default)]
pub struct SpectralExpansion {
    pub k: Vec<(Weight, Coefficient)>,
    pub sigma: Vec<(Weight, Coefficient)>,
    pub tau: Vec<(Weight, Coefficient)>,
    pub omega: Vec<(Weight, Coefficient)>,
}

/// Values of an expansion at one λ; quantities with no terms are `None`.
#[derive(Clone, Debug)]
pub struct ExpansionValues {
    pub k: Option<ComplexField>,
    pub sigma: Option<ComplexField>,
    pub tau: Option<ComplexField>,
    pub omega: Option<ComplexField>,
}

pub fn eval_expansion(exp: &SpectralExpansion, lambda: C64) -> Result<ExpansionValues> {
    let sum = |terms: &[(Weight, Coefficient)]| -> Result<Option<ComplexField>> {
        let Some((_, first)) = terms.first() else {
            return Ok(None);
        };
        let spec = first.spec().clone();
        let mut out = vec![C64::new(0.0, 0.0); spec.len()];
        for (w, c) in terms {
            if c.spec() != &spec {
                return Err(Error::GridMismatch);
            }
            let wv = w.eval(lambda)?;
            for (n, o) in out.iter_mut().enumerate() {
                *o += wv * c.value(n);
            }
        }
        Field::new(spec, out).map(Some)
    };
    Ok(ExpansionValues {
        k: sum(&exp.k)?,
        sigma: sum(&exp.sigma)?,
        tau: sum(&exp.tau)?,
        omega: sum(&exp.omega)?,
    })
}
