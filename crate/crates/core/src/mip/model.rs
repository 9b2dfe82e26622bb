use serde::{Deserialize, Serialize};

use super::MipError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
    Integer,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub kind: VarKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - lhs).max(0.0),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Which family a cut belongs to. Only used for bookkeeping and logs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutSource {
    Disjunctive,
    StarPartition,
    SizeFacet,
    Hull,
}

impl CutSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CutSource::Disjunctive => "disjunctive",
            CutSource::StarPartition => "star_partition",
            CutSource::SizeFacet => "size_facet",
            CutSource::Hull => "hull",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub source: CutSource,
}

impl Cut {
    pub fn as_constraint(&self, name: String) -> Constraint {
        Constraint {
            name,
            coeffs: self.coeffs.clone(),
            sense: self.sense,
            rhs: self.rhs,
        }
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.as_constraint(String::new()).violation(x)
    }
}

/// A mixed-integer linear program in row form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub name: String,
    pub vars: Vec<Variable>,
    pub cons: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
    pub obj_offset: f64,
    pub obj_sense: ObjSense,
}

impl LinearModel {
    pub fn new(name: impl Into<String>, obj_sense: ObjSense) -> Self {
        LinearModel {
            name: name.into(),
            vars: Vec::new(),
            cons: Vec::new(),
            objective: Vec::new(),
            obj_offset: 0.0,
            obj_sense,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, kind: VarKind) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lb,
            ub,
            kind,
        });
        self.vars.len() - 1
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, 0.0, 1.0, VarKind::Binary)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> usize {
        self.add_var(name, lb, ub, VarKind::Continuous)
    }

    /// Adds a row, merging duplicate column entries and dropping exact zeros.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.cons.push(Constraint {
            name: name.into(),
            coeffs: merge_terms(coeffs),
            sense,
            rhs,
        });
        self.cons.len() - 1
    }

    pub fn set_obj_coeff(&mut self, var: usize, c: f64) {
        if let Some(e) = self.objective.iter_mut().find(|e| e.0 == var) {
            e.1 = c;
        } else {
            self.objective.push((var, c));
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_cons(&self) -> usize {
        self.cons.len()
    }

    pub fn dense_objective(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.vars.len()];
        for &(j, v) in &self.objective {
            c[j] += v;
        }
        c
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.obj_offset + self.objective.iter().map(|&(j, c)| c * x[j]).sum::<f64>()
    }

    pub fn integer_vars(&self) -> Vec<usize> {
        (0..self.vars.len())
            .filter(|&j| self.vars[j].kind.is_integral())
            .collect()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lb - xv).max(xv - v.ub);
        }
        for c in &self.cons {
            worst = worst.max(c.violation(x));
        }
        worst
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.vars.len() {
            return false;
        }
        let bounds_ok = self
            .vars
            .iter()
            .zip(x)
            .all(|(v, &xv)| xv >= v.lb - tol && xv <= v.ub + tol);
        bounds_ok
            && self
                .cons
                .iter()
                .all(|c| c.violation(x) <= tol * (1.0 + c.rhs.abs()))
    }

    pub fn validate(&self) -> Result<(), MipError> {
        for (j, v) in self.vars.iter().enumerate() {
            if v.lb.is_nan() || v.ub.is_nan() || v.lb > v.ub {
                return Err(MipError::InvalidModel(format!(
                    "variable {j} ({}) has bounds [{}, {}]",
                    v.name, v.lb, v.ub
                )));
            }
            if v.kind == VarKind::Binary && (v.lb < 0.0 || v.ub > 1.0) {
                return Err(MipError::InvalidModel(format!(
                    "binary variable {} has bounds outside [0, 1]",
                    v.name
                )));
            }
        }
        let n = self.vars.len();
        for (i, c) in self.cons.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(MipError::InvalidModel(format!("row {i} ({}) has rhs {}", c.name, c.rhs)));
            }
            for &(j, a) in &c.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(MipError::InvalidModel(format!(
                        "row {i} ({}) references column {j} with coefficient {a}",
                        c.name
                    )));
                }
            }
        }
        for &(j, c) in &self.objective {
            if j >= n || !c.is_finite() {
                return Err(MipError::InvalidModel(format!(
                    "objective references column {j} with coefficient {c}"
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn merge_terms(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coeffs.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
    for (j, a) in coeffs {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += a,
            _ => out.push((j, a)),
        }
    }
    out.retain(|e| e.1 != 0.0);
    out
}
