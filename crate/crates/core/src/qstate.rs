//! Pure states over heterogeneous registers.
//!
//! A [`Register`] is an ordered list of labeled subsystems (atomic qubits,
//! cavity field modes, and the path and polarization of a flying qubit).
//! Basis states are indexed in mixed radix with the **first** subsystem as
//! the most significant digit. This ordering is used everywhere in the crate.
//!
//! Amplitudes are stored densely. Every operation returns a new state.

use std::collections::HashSet;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Matrix = Array2<C64>;

/// Tolerance for unitarity and normalization checks.
pub const TOL: f64 = 1e-9;
/// Projections with probability at or below this yield no post-state.
pub const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsystemKind {
    /// Lower states `|L⟩`, `|R⟩` of a three-level atom.
    #[serde(rename = "atom-LR")]
    AtomLR,
    /// Ground and excited state of a two-level atom.
    #[serde(rename = "atom-ge")]
    AtomGe,
    /// Cavity mode restricted to vacuum and one photon.
    #[serde(rename = "field-01")]
    Field01,
    /// Spatial mode (rail) of a flying qubit.
    Path,
    /// Circular polarization of a photon.
    #[serde(rename = "pol-LR")]
    PolLR,
}

impl SubsystemKind {
    fn parse(self, label: &str, dim: usize) -> Option<usize> {
        match self {
            SubsystemKind::AtomLR => match label {
                "L" => Some(0),
                "R" => Some(1),
                _ => None,
            },
            SubsystemKind::AtomGe => match label {
                "g" => Some(0),
                "e" => Some(1),
                _ => None,
            },
            SubsystemKind::Field01 => match label {
                "0" => Some(0),
                "1" => Some(1),
                _ => None,
            },
            SubsystemKind::PolLR => match label {
                "L" | "𝓛" => Some(0),
                "R" | "𝓡" => Some(1),
                _ => None,
            },
            SubsystemKind::Path => label.parse::<usize>().ok().filter(|&i| i < dim),
        }
    }

    fn name(self, index: usize) -> String {
        let two = |a: &str, b: &str| if index == 0 { a } else { b }.to_string();
        match self {
            SubsystemKind::AtomLR | SubsystemKind::PolLR => two("L", "R"),
            SubsystemKind::AtomGe => two("g", "e"),
            SubsystemKind::Field01 => two("0", "1"),
            SubsystemKind::Path => index.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub kind: SubsystemKind,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, kind: SubsystemKind, dim: usize) -> Self {
        Subsystem {
            label: label.into(),
            kind,
            dim,
        }
    }

    pub fn atom_lr(label: impl Into<String>) -> Self {
        Self::new(label, SubsystemKind::AtomLR, 2)
    }

    pub fn atom_ge(label: impl Into<String>) -> Self {
        Self::new(label, SubsystemKind::AtomGe, 2)
    }

    pub fn field(label: impl Into<String>) -> Self {
        Self::new(label, SubsystemKind::Field01, 2)
    }

    pub fn pol(label: impl Into<String>) -> Self {
        Self::new(label, SubsystemKind::PolLR, 2)
    }

    pub fn path(label: impl Into<String>, modes: usize) -> Self {
        Self::new(label, SubsystemKind::Path, modes)
    }

    /// Basis index of `label`, or an invalid-label error.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.kind
            .parse(label, self.dim)
            .ok_or_else(|| Error::InvalidLabel {
                subsystem: self.label.clone(),
                label: label.to_string(),
            })
    }

    pub fn label_of(&self, index: usize) -> String {
        self.kind.name(index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    subsystems: Vec<Subsystem>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl Register {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &subsystems {
            if !seen.insert(s.label.as_str()) {
                return Err(Error::Parameter(format!(
                    "duplicate subsystem label {:?}",
                    s.label
                )));
            }
            let ok = match s.kind {
                SubsystemKind::Path => s.dim >= 2,
                _ => s.dim == 2,
            };
            if !ok {
                return Err(Error::Parameter(format!(
                    "subsystem {:?} of kind {:?} cannot have dimension {}",
                    s.label, s.kind, s.dim
                )));
            }
        }
        let mut strides = vec![1; subsystems.len()];
        for k in (0..subsystems.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * subsystems[k + 1].dim;
        }
        let total_dim = subsystems.iter().map(|s| s.dim).product();
        Ok(Register {
            subsystems,
            strides,
            total_dim,
        })
    }

    /// `n` two-level subsystems of one kind, labeled `{prefix}1..{prefix}n`.
    pub fn qubits(prefix: &str, kind: SubsystemKind, n: usize) -> Result<Self> {
        Self::new(
            (1..=n)
                .map(|i| Subsystem::new(format!("{prefix}{i}"), kind, 2))
                .collect(),
        )
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSubsystem(label.to_string()))
    }

    pub fn subsystem(&self, label: &str) -> Result<&Subsystem> {
        Ok(&self.subsystems[self.position(label)?])
    }

    pub fn stride(&self, position: usize) -> usize {
        self.strides[position]
    }

    /// Digit of subsystem `position` in basis index `index`.
    #[inline]
    pub fn digit(&self, index: usize, position: usize) -> usize {
        (index / self.strides[position]) % self.subsystems[position].dim
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.len()).map(|k| self.digit(index, k)).collect()
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} digits for a register of {} subsystems",
                digits.len(),
                self.len()
            )));
        }
        let mut index = 0;
        for (k, (&d, s)) in digits.iter().zip(&self.subsystems).enumerate() {
            if d >= s.dim {
                return Err(Error::Shape(format!(
                    "digit {d} out of range for {:?}",
                    s.label
                )));
            }
            index += d * self.strides[k];
        }
        Ok(index)
    }

    pub fn index_of_labels(&self, labels: &[&str]) -> Result<usize> {
        if labels.len() != self.len() {
            return Err(Error::Shape(format!(
                "{} labels for a register of {} subsystems",
                labels.len(),
                self.len()
            )));
        }
        let digits = self
            .subsystems
            .iter()
            .zip(labels)
            .map(|(s, l)| s.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        self.index_of_digits(&digits)
    }

    /// Compact label string of a basis index, e.g. `RLLRRL`.
    pub fn basis_string(&self, index: usize) -> String {
        let parts: Vec<String> = self
            .subsystems
            .iter()
            .enumerate()
            .map(|(k, s)| s.label_of(self.digit(index, k)))
            .collect();
        if parts.iter().all(|p| p.chars().count() == 1) {
            parts.concat()
        } else {
            parts.join(",")
        }
    }

    /// Same dimensions and kinds, labels may differ.
    pub fn same_shape(&self, other: &Register) -> bool {
        self.len() == other.len()
            && self
                .subsystems
                .iter()
                .zip(&other.subsystems)
                .all(|(a, b)| a.kind == b.kind && a.dim == b.dim)
    }

    pub fn without(&self, label: &str) -> Result<Register> {
        let k = self.position(label)?;
        let mut subs = self.subsystems.clone();
        subs.remove(k);
        Register::new(subs)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.label.as_str()).collect()
    }
}

/// Maximum elementwise deviation of `U†U` from the identity.
pub fn unitarity_defect(u: &Matrix) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[[k, i]].conj() * u[[k, j]];
            }
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - expected).norm());
        }
    }
    worst
}

pub fn check_unitary(u: &Matrix) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > TOL {
        Err(Error::NotUnitary(defect))
    } else {
        Ok(())
    }
}

/// Conjugate transpose.
pub fn dagger(u: &Matrix) -> Matrix {
    u.t().mapv(|z| z.conj())
}

/// Kronecker product, `a` on the more significant digit.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    register: Register,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Basis state selected by one label per subsystem.
    pub fn product_state(register: &Register, labels: &[&str]) -> Result<Self> {
        let index = register.index_of_labels(labels)?;
        Ok(Self::basis(register, index))
    }

    pub fn basis(register: &Register, index: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); register.total_dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        PureState {
            register: register.clone(),
            amplitudes,
        }
    }

    /// Wrap an amplitude vector that must already be normalized.
    pub fn from_amplitudes(register: &Register, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != register.total_dim() {
            return Err(Error::Shape(format!(
                "{} amplitudes for a register of dimension {}",
                amplitudes.len(),
                register.total_dim()
            )));
        }
        let state = PureState {
            register: register.clone(),
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Shape(format!("amplitudes have norm {norm}")));
        }
        Ok(state)
    }

    /// Normalize an arbitrary nonzero amplitude vector.
    pub fn normalized(register: &Register, amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= ZERO_PROBABILITY {
            return Err(Error::Shape("cannot normalize the zero vector".into()));
        }
        Self::from_amplitudes(register, amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, labels: &[&str]) -> Result<C64> {
        Ok(self.amplitudes[self.register.index_of_labels(labels)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn target_positions(&self, targets: &[&str]) -> Result<Vec<usize>> {
        let positions = targets
            .iter()
            .map(|t| self.register.position(t))
            .collect::<Result<Vec<_>>>()?;
        let unique: HashSet<_> = positions.iter().collect();
        if unique.len() != positions.len() {
            return Err(Error::Shape(format!("repeated target in {targets:?}")));
        }
        Ok(positions)
    }

    /// Index offsets of every joint target value, first target most significant.
    fn joint_offsets(&self, positions: &[usize]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for &p in positions {
            let dim = self.register.subsystems[p].dim;
            let stride = self.register.stride(p);
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dim).map(move |d| o + d * stride))
                .collect();
        }
        offsets
    }

    fn apply_on_blocks(
        &self,
        positions: &[usize],
        matrix: &Matrix,
        mut selects: impl FnMut(usize) -> bool,
    ) -> Result<Self> {
        let joint: usize = positions
            .iter()
            .map(|&p| self.register.subsystems[p].dim)
            .product();
        if matrix.dim() != (joint, joint) {
            return Err(Error::Shape(format!(
                "matrix is {:?}, targets span dimension {joint}",
                matrix.dim()
            )));
        }
        check_unitary(matrix)?;
        let offsets = self.joint_offsets(positions);
        let mut out = self.amplitudes.clone();
        let mut gathered = vec![C64::new(0.0, 0.0); joint];
        for base in 0..self.register.total_dim() {
            if positions.iter().any(|&p| self.register.digit(base, p) != 0) || !selects(base) {
                continue;
            }
            for (g, &o) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base + o];
            }
            for (row, &o) in offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (col, g) in gathered.iter().enumerate() {
                    acc += matrix[[row, col]] * g;
                }
                out[base + o] = acc;
            }
        }
        Ok(PureState {
            register: self.register.clone(),
            amplitudes: out,
        })
    }

    /// Apply `matrix` to the joint space of `targets` (first target most
    /// significant), identity elsewhere.
    pub fn apply_unitary(&self, targets: &[&str], matrix: &Matrix) -> Result<Self> {
        let positions = self.target_positions(targets)?;
        self.apply_on_blocks(&positions, matrix, |_| true)
    }

    /// Apply `matrix` to `targets` only on the branch where `control` is in
    /// basis state `value`.
    pub fn apply_controlled(
        &self,
        control: &str,
        value: usize,
        targets: &[&str],
        matrix: &Matrix,
    ) -> Result<Self> {
        let positions = self.target_positions(targets)?;
        let c = self.register.position(control)?;
        if positions.contains(&c) {
            return Err(Error::Shape(format!(
                "control {control:?} is also a target"
            )));
        }
        if value >= self.register.subsystems[c].dim {
            return Err(Error::Shape(format!("control value {value} out of range")));
        }
        let reg = self.register.clone();
        self.apply_on_blocks(&positions, matrix, move |base| reg.digit(base, c) == value)
    }

    /// Outcome probabilities of a computational-basis measurement of `target`.
    pub fn probabilities(&self, target: &str) -> Result<Vec<f64>> {
        let p = self.register.position(target)?;
        let mut probs = vec![0.0; self.register.subsystems[p].dim];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[self.register.digit(i, p)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Project `target` onto the basis state named `outcome`.
    pub fn project(&self, target: &str, outcome: &str) -> Result<(f64, Option<PureState>)> {
        let value = self.register.subsystem(target)?.index_of(outcome)?;
        self.project_index(target, value)
    }

    pub fn project_index(&self, target: &str, value: usize) -> Result<(f64, Option<PureState>)> {
        let p = self.register.position(target)?;
        if value >= self.register.subsystems[p].dim {
            return Err(Error::Shape(format!(
                "outcome {value} out of range for {target:?}"
            )));
        }
        let mut amps = self.amplitudes.clone();
        let mut prob = 0.0;
        for (i, a) in amps.iter_mut().enumerate() {
            if self.register.digit(i, p) == value {
                prob += a.norm_sqr();
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        if prob <= ZERO_PROBABILITY {
            return Ok((prob, None));
        }
        let scale = prob.sqrt();
        amps.iter_mut().for_each(|a| *a /= scale);
        Ok((
            prob,
            Some(PureState {
                register: self.register.clone(),
                amplitudes: amps,
            }),
        ))
    }

    /// Project `target` onto `value` and drop it from the register.
    pub fn collapse_out(&self, target: &str, value: usize) -> Result<(f64, Option<PureState>)> {
        let (prob, post) = self.project_index(target, value)?;
        match post {
            None => Ok((prob, None)),
            Some(post) => Ok((prob, Some(post.restrict(target, value)?))),
        }
    }

    /// Keep only the slice `target = value` without renormalizing.
    fn restrict(&self, target: &str, value: usize) -> Result<PureState> {
        let p = self.register.position(target)?;
        let register = self.register.without(target)?;
        let amplitudes = (0..self.register.total_dim())
            .filter(|&i| self.register.digit(i, p) == value)
            .map(|i| self.amplitudes[i])
            .collect();
        Ok(PureState {
            register,
            amplitudes,
        })
    }

    /// Split off a subsystem that is in a product with the rest.
    ///
    /// Returns the remaining state and the subsystem's amplitudes. The phase
    /// convention puts the largest subsystem amplitude on the positive real
    /// axis; the remaining state absorbs the rest of the global phase.
    pub fn factor_out(&self, target: &str) -> Result<(PureState, Vec<C64>)> {
        let p = self.register.position(target)?;
        let dim = self.register.subsystems[p].dim;
        let columns: Vec<PureState> = (0..dim)
            .map(|v| self.restrict(target, v))
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = columns.iter().map(|c| c.norm()).collect();
        let lead = (0..dim)
            .max_by(|&a, &b| norms[a].total_cmp(&norms[b]))
            .expect("nonempty subsystem");
        let lead_norm = norms[lead];
        let rest: Vec<C64> = columns[lead]
            .amplitudes
            .iter()
            .map(|a| a / lead_norm)
            .collect();
        let mut sub = Vec::with_capacity(dim);
        for column in &columns {
            let coeff: C64 = rest
                .iter()
                .zip(&column.amplitudes)
                .map(|(r, c)| r.conj() * c)
                .sum();
            let residual = column
                .amplitudes
                .iter()
                .zip(&rest)
                .map(|(c, r)| (c - coeff * r).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if residual > TOL {
                return Err(Error::NotProduct(target.to_string()));
            }
            sub.push(coeff);
        }
        Ok((
            PureState {
                register: columns[lead].register.clone(),
                amplitudes: rest,
            },
            sub,
        ))
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if !self.register.same_shape(&other.register) {
            return Err(Error::Shape(
                "overlap between registers of different shape".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Same amplitudes on a relabeled register of identical shape.
    pub fn relabel(&self, register: &Register) -> Result<PureState> {
        if !self.register.same_shape(register) {
            return Err(Error::Shape(
                "relabel onto a register of different shape".into(),
            ));
        }
        Ok(PureState {
            register: register.clone(),
            amplitudes: self.amplitudes.clone(),
        })
    }

    /// Basis indices with non-negligible amplitude.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.amplitudes.len())
            .filter(|&i| self.amplitudes[i].norm() > threshold)
            .collect()
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in self.support(1e-12) {
            let a = self.amplitudes[i];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{}⟩",
                a.re,
                a.im,
                self.register.basis_string(i)
            )?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Convenience constructor for small literal matrices (row-major).
pub fn matrix(n: usize, entries: &[C64]) -> Matrix {
    Array2::from_shape_vec((n, n), entries.to_vec()).expect("square matrix literal")
}

pub fn real_matrix(n: usize, entries: &[f64]) -> Matrix {
    Array2::from_shape_vec((n, n), entries.iter().map(|&x| C64::new(x, 0.0)).collect())
        .expect("square matrix literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn lr(n: usize) -> Register {
        Register::qubits("a", SubsystemKind::AtomLR, n).unwrap()
    }

    fn x() -> Matrix {
        real_matrix(2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn product_state_index_is_mixed_radix() {
        let reg = lr(2);
        let s = PureState::product_state(&reg, &["L", "L"]).unwrap();
        assert_eq!(s.amplitudes()[0], C64::new(1.0, 0.0));

        let six = lr(6);
        let s = PureState::product_state(&six, &["L", "L", "R", "R", "L", "L"]).unwrap();
        assert_eq!(s.support(0.5), vec![0b001100]);
        assert_eq!(six.basis_string(0b001100), "LLRRLL");
    }

    #[test]
    fn product_state_field_atom() {
        let reg = Register::new(vec![Subsystem::field("f"), Subsystem::atom_ge("a")]).unwrap();
        let s = PureState::product_state(&reg, &["1", "g"]).unwrap();
        assert_eq!(s.support(0.5), vec![2]);
        assert_eq!(reg.basis_string(2), "1g");
    }

    #[test]
    fn invalid_labels_rejected() {
        let reg = lr(2);
        assert!(matches!(
            PureState::product_state(&reg, &["L", "g"]),
            Err(Error::InvalidLabel { .. })
        ));
        let path = Register::new(vec![Subsystem::path("p", 3)]).unwrap();
        assert!(PureState::product_state(&path, &["2"]).is_ok());
        assert!(PureState::product_state(&path, &["3"]).is_err());
    }

    #[test]
    fn register_rejects_duplicates_and_bad_dims() {
        assert!(Register::new(vec![Subsystem::field("f"), Subsystem::atom_ge("f")]).is_err());
        assert!(Register::new(vec![Subsystem::new("f", SubsystemKind::Field01, 3)]).is_err());
        assert!(Register::new(vec![Subsystem::path("p", 1)]).is_err());
    }

    #[test]
    fn identity_and_bit_flip() {
        let reg = lr(2);
        let s = PureState::product_state(&reg, &["L", "L"]).unwrap();
        let id = real_matrix(2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(s.apply_unitary(&["a1"], &id).unwrap(), s);
        let flipped = s.apply_unitary(&["a1"], &x()).unwrap();
        assert_eq!(flipped.amplitude(&["R", "L"]).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn ramsey_on_ground() {
        let reg = Register::new(vec![Subsystem::atom_ge("a")]).unwrap();
        let s = PureState::product_state(&reg, &["g"]).unwrap();
        let h = real_matrix(
            2,
            &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        );
        let out = s.apply_unitary(&["a"], &h).unwrap();
        assert!((out.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn non_unitary_and_shape_errors() {
        let reg = lr(2);
        let s = PureState::basis(&reg, 0);
        let bad = real_matrix(2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            s.apply_unitary(&["a1"], &bad),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            s.apply_unitary(&["a1", "a2"], &x()),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            s.apply_unitary(&["a1", "a1"], &kron(&x(), &x())),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn target_order_sets_significance() {
        let reg = lr(2);
        let s = PureState::product_state(&reg, &["L", "R"]).unwrap();
        // CNOT with first target as control.
        let cnot = real_matrix(
            4,
            &[
                1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.,
            ],
        );
        let a = s.apply_unitary(&["a1", "a2"], &cnot).unwrap();
        assert_eq!(a, s);
        let b = s.apply_unitary(&["a2", "a1"], &cnot).unwrap();
        assert_eq!(b.amplitude(&["R", "R"]).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn controlled_application() {
        let reg = Register::new(vec![Subsystem::path("p", 2), Subsystem::atom_lr("a")]).unwrap();
        let plus = PureState::normalized(
            &reg,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let out = plus.apply_controlled("p", 1, &["a"], &x()).unwrap();
        assert!((out.amplitude(&["0", "L"]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&["1", "R"]).unwrap().re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(plus.apply_controlled("p", 0, &["p"], &x()).is_err());
    }

    #[test]
    fn projection_examples() {
        let reg = lr(1);
        let l = PureState::product_state(&reg, &["L"]).unwrap();
        let (p, post) = l.project("a1", "L").unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(post.unwrap(), l);

        let plus = PureState::normalized(&reg, vec![C64::new(1.0, 0.0); 2]).unwrap();
        let (p, post) = plus.project("a1", "R").unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(
            post.unwrap(),
            PureState::product_state(&reg, &["R"]).unwrap()
        );

        let (p, post) = l.project("a1", "R").unwrap();
        assert_eq!(p, 0.0);
        assert!(post.is_none());
        assert!(l.project("a1", "x").is_err());
    }

    #[test]
    fn overlaps() {
        let reg = lr(1);
        let l = PureState::product_state(&reg, &["L"]).unwrap();
        let r = PureState::product_state(&reg, &["R"]).unwrap();
        assert_eq!(l.overlap(&l).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(l.overlap(&r).unwrap(), C64::new(0.0, 0.0));

        let reg3 = lr(3);
        let mut plus = vec![C64::new(0.0, 0.0); 8];
        let mut minus = plus.clone();
        plus[0] = C64::new(1.0, 0.0);
        plus[7] = C64::new(1.0, 0.0);
        minus[0] = C64::new(-1.0, 0.0);
        minus[7] = C64::new(1.0, 0.0);
        let a = PureState::normalized(&reg3, plus).unwrap();
        let b = PureState::normalized(&reg3, minus).unwrap();
        assert!(a.overlap(&b).unwrap().norm() < 1e-15);
        assert!(matches!(a.overlap(&l), Err(Error::Shape(_))));
    }

    #[test]
    fn factor_out_product_and_entangled() {
        let reg = Register::new(vec![Subsystem::atom_lr("a"), Subsystem::pol("p")]).unwrap();
        // (|L⟩ - |R⟩)/√2 ⊗ |R⟩ with an overall minus sign on the pol factor.
        let amps = vec![
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let s = PureState::normalized(&reg, amps).unwrap();
        let (rest, pol) = s.factor_out("p").unwrap();
        assert!(pol[0].norm() < 1e-15);
        assert!((pol[1].re - 1.0).abs() < 1e-15);
        assert!((rest.amplitudes()[0].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(rest.register().labels(), vec!["a"]);

        let bell = PureState::normalized(
            &reg,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(bell.factor_out("p"), Err(Error::NotProduct(_))));
    }

    #[test]
    fn collapse_out_drops_subsystem() {
        let reg = Register::new(vec![Subsystem::path("p", 3), Subsystem::atom_lr("a")]).unwrap();
        let s = PureState::normalized(
            &reg,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let (p, post) = s.collapse_out("p", 1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let post = post.unwrap();
        assert_eq!(post.register().labels(), vec!["a"]);
        assert_eq!(post.amplitudes()[1], C64::new(1.0, 0.0));
        assert!(s.collapse_out("p", 2).unwrap().1.is_none());
    }

    #[test]
    fn kron_and_dagger() {
        let k = kron(&x(), &real_matrix(2, &[1.0, 0.0, 0.0, -1.0]));
        assert_eq!(k[[2, 0]], C64::new(1.0, 0.0));
        assert_eq!(k[[3, 1]], C64::new(-1.0, 0.0));
        let s = matrix(
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::i(),
            ],
        );
        assert_eq!(dagger(&s)[[1, 1]], -C64::i());
    }
}
