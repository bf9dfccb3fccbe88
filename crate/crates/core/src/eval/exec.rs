//! Dense semantics of contraction-bank plans.

use super::{DenseTensor, GraphData, Scalar};
use crate::contraction::{ContractionPlan, TensorOp, Terminal};
use crate::error::{Error, Result};

#[derive(Clone)]
enum Value<T> {
    Scalar(T),
    Vector(Vec<T>),
    Matrix(Vec<T>),
}

struct Ctx {
    n: usize,
}

impl Ctx {
    fn fail(&self, what: &str) -> Error {
        Error::Dimension(format!("contraction plan: {what}"))
    }

    fn overflow() -> Error {
        Error::Overflow("contraction plan".into())
    }

    fn hadamard<T: Scalar>(&self, a: &Value<T>, b: &Value<T>) -> Result<Value<T>> {
        let mul = |x: &[T], y: &[T]| -> Result<Vec<T>> {
            x.iter()
                .zip(y)
                .map(|(&p, &q)| p.checked_mul(q).ok_or_else(Self::overflow))
                .collect()
        };
        match (a, b) {
            (Value::Vector(x), Value::Vector(y)) => Ok(Value::Vector(mul(x, y)?)),
            (Value::Matrix(x), Value::Matrix(y)) => Ok(Value::Matrix(mul(x, y)?)),
            _ => Err(self.fail("hadamard of mismatched shapes")),
        }
    }

    fn transpose<T: Scalar>(&self, a: &Value<T>) -> Result<Value<T>> {
        let n = self.n;
        match a {
            Value::Matrix(m) => Ok(Value::Matrix((0..n * n).map(|k| m[(k % n) * n + k / n]).collect())),
            _ => Err(self.fail("transpose of a non-matrix")),
        }
    }

    fn matvec<T: Scalar>(&self, m: &Value<T>, w: Option<&Value<T>>, transpose: bool) -> Result<Value<T>> {
        let n = self.n;
        let Value::Matrix(m) = m else {
            return Err(self.fail("matvec without a matrix"));
        };
        let w = match w {
            None => vec![T::one(); n],
            Some(Value::Vector(w)) => w.clone(),
            Some(_) => return Err(self.fail("matvec weight is not a vector")),
        };
        let mut y = vec![T::zero(); n];
        for (i, yi) in y.iter_mut().enumerate() {
            for (k, &wk) in w.iter().enumerate() {
                let e = if transpose { m[k * n + i] } else { m[i * n + k] };
                *yi = yi
                    .checked_add(e.checked_mul(wk).ok_or_else(Self::overflow)?)
                    .ok_or_else(Self::overflow)?;
            }
        }
        Ok(Value::Vector(y))
    }

    fn matmul<T: Scalar>(&self, a: &Value<T>, b: &Value<T>) -> Result<Value<T>> {
        let n = self.n;
        let (Value::Matrix(a), Value::Matrix(b)) = (a, b) else {
            return Err(self.fail("matmul of non-matrices"));
        };
        let mut c = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let t = aik.checked_mul(b[k * n + j]).ok_or_else(Self::overflow)?;
                    c[i * n + j] = c[i * n + j].checked_add(t).ok_or_else(Self::overflow)?;
                }
            }
        }
        Ok(Value::Matrix(c))
    }
}

/// Execute a plan produced by `contraction::decide` on `x`. The output has
/// the same shape as the naive oracle for the decided graph.
pub fn execute_contraction_plan<T: Scalar>(plan: &ContractionPlan, x: &GraphData) -> Result<DenseTensor<T>> {
    let n = x.n();
    let ctx = Ctx { n };
    let xs: Vec<T> = x.to_scalar()?;
    let mut slots: Vec<Value<T>> = plan
        .inputs
        .iter()
        .map(|&(s, d)| {
            if s == d {
                Value::Vector((0..n).map(|i| xs[i * n + i]).collect())
            } else {
                Value::Matrix(xs.clone())
            }
        })
        .collect();
    for step in &plan.steps {
        if step.output != slots.len() {
            return Err(ctx.fail("steps out of order"));
        }
        let arg = |i: usize| -> Result<&Value<T>> {
            step.inputs
                .get(i)
                .and_then(|&s| slots.get(s))
                .ok_or_else(|| ctx.fail("missing input slot"))
        };
        let v = match step.op {
            TensorOp::Hadamard => ctx.hadamard(arg(0)?, arg(1)?)?,
            TensorOp::Transpose => ctx.transpose(arg(0)?)?,
            TensorOp::MatVec { transpose } => {
                let w = if step.inputs.len() > 1 { Some(arg(1)?) } else { None };
                ctx.matvec(arg(0)?, w, transpose)?
            }
            TensorOp::RowBroadcast => match arg(0)? {
                Value::Vector(y) => Value::Matrix((0..n * n).map(|k| y[k / n]).collect()),
                _ => return Err(ctx.fail("broadcast of a non-vector")),
            },
            TensorOp::MatMul => ctx.matmul(arg(0)?, arg(1)?)?,
            TensorOp::Total => match step.inputs.first() {
                None => Value::Scalar(T::from_count(n).ok_or_else(Ctx::overflow)?),
                Some(_) => match arg(0)? {
                    Value::Vector(y) => Value::Scalar(
                        y.iter()
                            .try_fold(T::zero(), |a, &b| a.checked_add(b))
                            .ok_or_else(Ctx::overflow)?,
                    ),
                    _ => return Err(ctx.fail("total of a non-vector")),
                },
            },
        };
        slots.push(v);
    }
    let mut factor = T::one();
    for &s in &plan.scalars {
        match slots.get(s) {
            Some(Value::Scalar(v)) => factor = factor.checked_mul(*v).ok_or_else(Ctx::overflow)?,
            _ => return Err(ctx.fail("scalar slot is not a scalar")),
        }
    }
    let scale = |data: Vec<T>| -> Result<Vec<T>> {
        data.into_iter()
            .map(|v| v.checked_mul(factor).ok_or_else(Ctx::overflow))
            .collect()
    };
    Ok(match plan.terminal {
        Terminal::Scalar => DenseTensor::scalar(factor),
        Terminal::Node(slot) => {
            let data = match slot.map(|s| &slots[s]) {
                None => vec![T::one(); n],
                Some(Value::Vector(y)) => y.clone(),
                Some(_) => return Err(ctx.fail("node output is not a vector")),
            };
            DenseTensor {
                order: 1,
                n,
                data: scale(data)?,
            }
        }
        Terminal::Edge(slot) => {
            let data = match slot.map(|s| &slots[s]) {
                None => vec![T::one(); n * n],
                Some(Value::Matrix(m)) => m.clone(),
                Some(_) => return Err(ctx.fail("edge output is not a matrix")),
            };
            DenseTensor {
                order: 2,
                n,
                data: scale(data)?,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{decide, Bank};
    use crate::eval::{eval_naive_p, DEFAULT_NAIVE_BUDGET};
    use crate::multigraph::parse_signature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plans_match_naive_on_directed_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 4;
        let x = GraphData::general(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let cases = [
            "il,ik,ij,kj->ij",
            "il,ik,ij,kj->jj",
            "ab,bc,ca->",
            "aa,ab,ba,bb->aa",
            "ab,cb,cc,dc->ad",
            "ab,ab,ba,bc,cc->cc",
            "aa,bb->ab",
            "ab->ba",
            "ab,ac->bc",
            "ac,cb,cb,ca->ab",
            "aa,aa,bb->ab",
            "->ab",
            "->aa",
            "ab,bc->",
        ];
        for s in cases {
            let h = parse_signature(s, false).unwrap();
            let naive: DenseTensor<f64> = eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET).unwrap();
            for bank in [Bank::node(), Bank::edge()] {
                if let Some(plan) = decide(&h, &bank).plan {
                    let y: DenseTensor<f64> = execute_contraction_plan(&plan, &x).unwrap();
                    assert!(y.approx_eq(&naive, 1e-9), "{s} {:?}", bank.model);
                }
            }
        }
    }
}
