use serde::{Deserialize, Serialize};

use super::{init_model, normalize_objective, objective, strata_means, FitConfig, Model, StrataDataset};
use crate::error::{Error, Result};

/// Loss snapshot taken after `iteration` outer iterations (0 is the initial model).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub iteration: usize,
    /// `sqrt(objective)`.
    pub loss: f64,
    /// `None` only for an all-zero dataset.
    pub normalized_loss: Option<f64>,
    pub strata_means: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossTrace {
    records: Vec<LossRecord>,
}

impl LossTrace {
    pub fn records(&self) -> &[LossRecord] {
        &self.records
    }

    pub fn last(&self) -> Option<&LossRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn losses(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.loss)
    }

    /// Appends a record; iteration indices must strictly increase.
    pub fn push(&mut self, record: LossRecord) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.iteration <= last.iteration {
                return Err(Error::invalid(format!(
                    "trace iteration {} does not follow {}",
                    record.iteration, last.iteration
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }
}

fn snapshot(model: &Model, data: &StrataDataset, iteration: usize) -> Result<LossRecord> {
    let obj = objective(model, data)?;
    Ok(LossRecord {
        iteration,
        loss: obj.sqrt(),
        normalized_loss: normalize_objective(obj, data).ok(),
        strata_means: strata_means(model),
    })
}

/// Initializes from `config.seed` and runs `config.outer_iters` outer iterations.
pub fn fit(data: &StrataDataset, config: &FitConfig) -> Result<(Model, LossTrace)> {
    let model = init_model(data, config)?;
    fit_from(model, data, config)
}

/// Runs the update loop from a given model. Each outer iteration performs
/// `inner_v_updates` v updates, one W update and one H update, in that order.
/// The trace holds the initial state, every `log_every`-th iteration, and the
/// final iteration, each logged after that iteration's updates.
pub fn fit_from(mut model: Model, data: &StrataDataset, config: &FitConfig) -> Result<(Model, LossTrace)> {
    config.validate()?;
    model.check_compatible(data)?;
    let mut trace = LossTrace::default();
    trace.push(snapshot(&model, data, 0)?)?;
    for k in 1..=config.outer_iters {
        model.step(data, config.eps, config.inner_v_updates)?;
        if k % config.log_every == 0 || k == config.outer_iters {
            trace.push(snapshot(&model, data, k)?)?;
        }
    }
    Ok((model, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    fn small_data() -> StrataDataset {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0, 0.5], [0.0, 1.0, 3.0]]).unwrap();
        let b = DenseMatrix::from_rows(&[[4.0, 2.0, 0.5]]).unwrap();
        StrataDataset::new(vec![a.into(), b.into()]).unwrap()
    }

    #[test]
    fn zero_iterations_returns_initial_model() {
        let data = small_data();
        let cfg = FitConfig::new(2, 0);
        let (model, trace) = fit(&data, &cfg).unwrap();
        assert_eq!(model, init_model(&data, &cfg).unwrap());
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.records()[0].iteration, 0);
    }

    #[test]
    fn log_cadence_includes_last_iteration() {
        let data = small_data();
        let mut cfg = FitConfig::new(2, 10);
        cfg.log_every = 4;
        let (_, trace) = fit(&data, &cfg).unwrap();
        let its: Vec<_> = trace.records().iter().map(|r| r.iteration).collect();
        assert_eq!(its, vec![0, 4, 8, 10]);
    }

    #[test]
    fn fit_runs_the_documented_step_sequence() {
        let data = small_data();
        let cfg = FitConfig::new(2, 3);
        let (model, _) = fit(&data, &cfg).unwrap();
        let mut manual = init_model(&data, &cfg).unwrap();
        for _ in 0..3 {
            manual.update_v(&data, cfg.eps).unwrap();
            manual.update_v(&data, cfg.eps).unwrap();
            manual.update_w(&data, cfg.eps).unwrap();
            manual.update_h(&data, cfg.eps).unwrap();
        }
        assert_eq!(model, manual);
    }

    #[test]
    fn trace_rejects_non_increasing_iterations() {
        let mut t = LossTrace::default();
        let rec = |iteration| LossRecord {
            iteration,
            loss: 0.0,
            normalized_loss: None,
            strata_means: vec![],
        };
        t.push(rec(3)).unwrap();
        assert!(t.push(rec(3)).is_err());
    }

    #[test]
    fn all_zero_data_has_no_normalized_loss() {
        let data = StrataDataset::new(vec![DenseMatrix::zeros(2, 2).into()]).unwrap();
        let (model, trace) = fit(&data, &FitConfig::new(1, 2)).unwrap();
        assert!(trace.records().iter().all(|r| r.normalized_loss.is_none()));
        assert!(model.v()[0].as_slice().iter().all(|&x| x == 0.0));
    }
}
