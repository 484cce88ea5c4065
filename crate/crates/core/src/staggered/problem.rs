use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::AlgebraElement;
use crate::error::{Result, VirError};
use crate::scalars::Scalar;
use crate::structure::{classify, left_right_compatible, Branch, Compatibility, LatticeEntry, LatticeType, ModuleStructure};
use crate::verma::{GradedVector, HwModule, VermaModule};

use super::module::{Data, StaggeredModule};

/// How the rank of `omega_0` and the lattice of the left module constrain
/// the data; see [`StaggeredProblem::case`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// `omega_0 = x`, so `ell = 0`.
    Zero,
    /// One rank `rho - 1` singular vector to test against.
    One,
    /// Braid with `rho = 1`, `omega_0 = X_1^+ x` and `X_1^- x` nonzero.
    OnePrime,
    /// Braid with `rho >= 2`: two rank `rho - 1` singular vectors.
    Two,
    /// As [`CaseTag::Two`] with `omega_0 = X_rho^+ x` and `X_rho^- x` nonzero.
    TwoPrime,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::Zero => "0",
            CaseTag::One => "1",
            CaseTag::OnePrime => "1'",
            CaseTag::Two => "2",
            CaseTag::TwoPrime => "2'",
        };
        write!(f, "{s}")
    }
}

/// A left module and a right module for which staggered modules are
/// sought, together with the integers derived from them.
#[derive(Debug, Clone)]
pub struct StaggeredProblem {
    left: Arc<HwModule>,
    right: Arc<HwModule>,
    compat: Compatibility,
    ell: usize,
    lattice: ModuleStructure,
    omega0: GradedVector,
    case: CaseTag,
}

impl StaggeredProblem {
    /// Fails with [`VirError::Incompatible`] unless the pair passes
    /// [`left_right_compatible`].
    pub fn new(left: Arc<HwModule>, right: Arc<HwModule>) -> Result<Self> {
        let compat = left_right_compatible(&left, &right)?;
        if !compat.compatible {
            return Err(VirError::Incompatible(compat.reason.clone().unwrap_or_default()));
        }
        let ell = compat.ell.expect("compatible pairs have ell");
        let top = ell + right.generator_grades().iter().copied().max().unwrap_or(0);
        let lattice = classify(left.h(), left.t(), top.max(1))?;
        let omega0 = left.singular_image(ell)?.expect("compatible pairs have omega_0");
        let case = Self::determine_case(&left, &lattice, ell, compat.rho)?;
        Ok(StaggeredProblem { left, right, compat, ell, lattice, omega0, case })
    }

    /// Convenience constructor from weights and generator grades.
    pub fn from_weights(
        t: &Scalar,
        h_left: &Scalar,
        left_gens: &[usize],
        h_right: &Scalar,
        right_gens: &[usize],
    ) -> Result<Self> {
        let left = HwModule::new(h_left, t, left_gens)?;
        let right = HwModule::new(h_right, t, right_gens)?;
        Self::new(left, right)
    }

    fn determine_case(
        left: &HwModule,
        lattice: &ModuleStructure,
        ell: usize,
        rho: usize,
    ) -> Result<CaseTag> {
        if rho == 0 {
            return Ok(CaseTag::Zero);
        }
        if lattice.kind != LatticeType::Braid {
            return Ok(CaseTag::One);
        }
        let entry = lattice.entry_at(ell).expect("omega_0 is in the lattice");
        let prime = if entry.branch == Some(Branch::Plus) {
            let minus = lattice
                .of_rank(rho)
                .into_iter()
                .find(|e| e.branch == Some(Branch::Minus))
                .expect("braid levels start with a minus entry");
            left.singular_image(minus.grade)?.is_some_and(|v| !v.is_zero())
        } else {
            false
        };
        Ok(match (rho, prime) {
            (1, false) => CaseTag::One,
            (1, true) => CaseTag::OnePrime,
            (_, false) => CaseTag::Two,
            (_, true) => CaseTag::TwoPrime,
        })
    }

    pub fn left(&self) -> &Arc<HwModule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<HwModule> {
        &self.right
    }

    pub fn t(&self) -> &Scalar {
        self.left.t()
    }

    pub fn c(&self) -> &Scalar {
        self.left.c()
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn rho(&self) -> usize {
        self.compat.rho
    }

    pub fn b(&self) -> usize {
        self.compat.b
    }

    pub fn compatibility(&self) -> &Compatibility {
        &self.compat
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn lattice(&self) -> &ModuleStructure {
        &self.lattice
    }

    /// `omega_0` in the left module.
    pub fn omega0(&self) -> &GradedVector {
        &self.omega0
    }

    /// The same left module with a Verma module on the right.
    pub fn with_right_verma(&self) -> Result<Self> {
        Self::new(self.left.clone(), HwModule::verma_of(self.right.h(), self.t())?)
    }

    /// Both modules replaced by their Verma covers.
    pub fn with_verma_modules(&self) -> Result<Self> {
        Self::new(
            HwModule::verma_of(self.left.h(), self.t())?,
            HwModule::verma_of(self.right.h(), self.t())?,
        )
    }

    /// Lattice entries whose singular vectors carry the beta invariants:
    /// the rank `rho - 1` ones surviving in the left module.
    pub fn beta_entries(&self) -> Result<Vec<LatticeEntry>> {
        if self.rho() == 0 {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for e in self.lattice.of_rank(self.rho() - 1) {
            if self.left.singular_image(e.grade)?.is_some_and(|v| !v.is_zero()) {
                out.push(e);
            }
        }
        Ok(out)
    }

    /// Labels of the beta invariants, in order.
    pub fn beta_labels(&self) -> Result<Vec<String>> {
        Ok(self
            .beta_entries()?
            .iter()
            .map(|e| match e.branch {
                None => "beta".to_string(),
                Some(b) => format!("beta{}", b.symbol()),
            })
            .collect())
    }

    /// Staggered module (with Verma right module) realising `data`.
    pub fn module(&self, data: &Data) -> Result<StaggeredModule> {
        self.check_data_shape(data)?;
        Ok(StaggeredModule::new(
            self.left.clone(),
            VermaModule::new(self.right.h(), self.t())?,
            self.ell,
            self.omega0.clone(),
            data.clone(),
        ))
    }

    pub fn check_data_shape(&self, d: &Data) -> Result<()> {
        let l = self.ell as i64;
        let ok = d.omega1.grade == l - 1
            && d.omega2.grade == l - 2
            && d.omega1.coords.len() == self.left.dim(l - 1)
            && d.omega2.coords.len() == self.left.dim(l - 2);
        if ok {
            Ok(())
        } else {
            Err(VirError::InvalidModule("data has the wrong grades or dimensions".into()))
        }
    }

    pub fn zero_data(&self) -> Data {
        Data::zero(&self.left, self.ell)
    }

    /// Singular vector of `V_{h^L + shift}` at `grade` as an element.
    pub fn singular_element(&self, shift: usize, grade: usize) -> Result<AlgebraElement> {
        singular_element(&(self.left.h() + &Scalar::int(shift as i64)), self.t(), grade)
    }

    pub fn summary_json(&self) -> Value {
        json!({
            "t": self.t().to_json(),
            "c": self.c().to_json(),
            "h_left": self.left.h().to_json(),
            "left_generators": self.left.generator_grades(),
            "h_right": self.right.h().to_json(),
            "right_generators": self.right.generator_grades(),
            "derived": self.compat.to_json(),
            "case": self.case.to_string(),
            "lattice": self.lattice.to_string(),
        })
    }
}

/// Normalised singular vector of `V_h` at `grade`, as a creation element.
pub fn singular_element(h: &Scalar, t: &Scalar, grade: usize) -> Result<AlgebraElement> {
    let v = VermaModule::new(h, t)?;
    let coords = v.singular_coords(grade)?.ok_or_else(|| {
        VirError::Internal(format!("V_{h} has no singular vector at grade {grade}"))
    })?;
    Ok(AlgebraElement::from_partition_coords(v.c(), grade, &coords))
}
