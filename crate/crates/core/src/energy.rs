//! Per-node battery bookkeeping under a per-bit radio cost model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("invalid {field}: {value}")]
    Invalid { field: &'static str, value: f64 },
}

/// Per-bit radio costs in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyModel {
    pub tx_cost: f64,
    pub rx_cost: f64,
}

impl EnergyModel {
    /// MICA2 figures: 0.312 µJ/bit to send, 0.234 µJ/bit to receive.
    pub const MICA2: EnergyModel = EnergyModel { tx_cost: 0.312e-6, rx_cost: 0.234e-6 };

    pub fn new(tx_cost: f64, rx_cost: f64) -> Result<Self, EnergyError> {
        if !(tx_cost.is_finite() && tx_cost > 0.0) {
            return Err(EnergyError::Invalid { field: "tx_cost", value: tx_cost });
        }
        if !(rx_cost.is_finite() && rx_cost > 0.0) {
            return Err(EnergyError::Invalid { field: "rx_cost", value: rx_cost });
        }
        Ok(EnergyModel { tx_cost, rx_cost })
    }
}

impl Default for EnergyModel {
    fn default() -> Self {
        EnergyModel::MICA2
    }
}

/// Outcome of charging one radio transaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Charge {
    /// Full cost of the transaction.
    pub requested: f64,
    /// What was actually drawn; less than `requested` only on depletion.
    pub charged: f64,
    /// False when the node was already dead or died during this transaction.
    pub completed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyState {
    initial: f64,
    consumed: f64,
}

impl EnergyState {
    pub fn new(initial: f64) -> Result<Self, EnergyError> {
        if !(initial.is_finite() && initial > 0.0) {
            return Err(EnergyError::Invalid { field: "initial_energy", value: initial });
        }
        Ok(EnergyState { initial, consumed: 0.0 })
    }

    /// A battery that starts partially drained, e.g. from a fixed node table.
    pub fn with_residual_fraction(initial: f64, fraction: f64) -> Result<Self, EnergyError> {
        let mut s = EnergyState::new(initial)?;
        if !(0.0..=1.0).contains(&fraction) {
            return Err(EnergyError::Invalid { field: "residual_percent", value: fraction * 100.0 });
        }
        s.consumed = if fraction == 0.0 { initial } else { initial - initial * fraction };
        Ok(s)
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn consumed(&self) -> f64 {
        self.consumed
    }

    /// Residual energy: initial minus consumed.
    pub fn residual(&self) -> f64 {
        self.initial - self.consumed
    }

    pub fn residual_fraction(&self) -> f64 {
        (self.residual() / self.initial).clamp(0.0, 1.0)
    }

    pub fn is_alive(&self) -> bool {
        self.consumed < self.initial
    }

    pub fn consume_tx(&mut self, model: &EnergyModel, bits: u64) -> Charge {
        self.draw(bits as f64 * model.tx_cost)
    }

    pub fn consume_rx(&mut self, model: &EnergyModel, bits: u64) -> Charge {
        self.draw(bits as f64 * model.rx_cost)
    }

    fn draw(&mut self, cost: f64) -> Charge {
        if !self.is_alive() {
            return Charge { requested: cost, charged: 0.0, completed: false };
        }
        let residual = self.residual();
        if cost >= residual {
            self.consumed = self.initial;
            return Charge { requested: cost, charged: residual, completed: false };
        }
        self.consumed += cost;
        Charge { requested: cost, charged: cost, completed: true }
    }
}
