//! Deterministic compensated quadrature over field maps.
//!
//! All volume integrals run single-threaded in cell order with Neumaier
//! compensation, so results are bit-reproducible across runs and platforms
//! and stay accurate for maps with millions of cells of widely varying
//! volume.

use crate::types::{FieldCell, FieldMap};

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Volume integrals of a field map needed by every coupling quantity,
/// gathered in a single pass.
#[derive(Debug, Clone, Copy)]
pub struct FieldIntegrals {
    /// `∫_sample H_x dV`, A·m²
    pub hx_sample: f64,
    /// `∫_sample H_y dV`, A·m²
    pub hy_sample: f64,
    /// `∫_sample H_z dV`, A·m²
    pub hz_sample: f64,
    /// `∫_all |H|² dV`, A²/m² · m³
    pub h_energy_all: f64,
    /// `∫_sample |H|² dV`
    pub h_energy_sample: f64,
    /// `∫_all ε_r |E|² dV`
    pub e_energy_all: f64,
    /// `∫_sample ε_r |E|² dV`
    pub e_energy_sample: f64,
    /// Sample volume, m³
    pub sample_volume_m3: f64,
    /// Total mapped volume, m³
    pub total_volume_m3: f64,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn integrate(map: &FieldMap) -> FieldIntegrals {
    let mut hx = CompensatedSum::default();
    let mut hy = CompensatedSum::default();
    let mut hz = CompensatedSum::default();
    let mut h_all = CompensatedSum::default();
    let mut h_sample = CompensatedSum::default();
    let mut e_all = CompensatedSum::default();
    let mut e_sample = CompensatedSum::default();
    let mut v_sample = CompensatedSum::default();
    let mut v_total = CompensatedSum::default();

    for cell in &map.cells {
        let dv = cell.volume_m3;
        let h2 = dot(&cell.h_field, &cell.h_field) * dv;
        let e2 = map.cell_eps_r(cell) * dot(&cell.e_field, &cell.e_field) * dv;
        h_all.push(h2);
        e_all.push(e2);
        v_total.push(dv);
        if cell.region.is_sample() {
            hx.push(cell.h_field[0] * dv);
            hy.push(cell.h_field[1] * dv);
            hz.push(cell.h_field[2] * dv);
            h_sample.push(h2);
            e_sample.push(e2);
            v_sample.push(dv);
        }
    }

    FieldIntegrals {
        hx_sample: hx.value(),
        hy_sample: hy.value(),
        hz_sample: hz.value(),
        h_energy_all: h_all.value(),
        h_energy_sample: h_sample.value(),
        e_energy_all: e_all.value(),
        e_energy_sample: e_sample.value(),
        sample_volume_m3: v_sample.value(),
        total_volume_m3: v_total.value(),
    }
}

/// Convenience for tests and fixtures.
pub fn cell(position_m: [f64; 3], volume_m3: f64, region: crate::types::Region, h: [f64; 3]) -> FieldCell {
    FieldCell {
        position_m,
        volume_m3,
        region,
        e_field: [0.0; 3],
        h_field: h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_survives_catastrophic_cancellation() {
        let mut s = CompensatedSum::default();
        s.push(1e16);
        for _ in 0..1000 {
            s.push(1.0);
        }
        s.push(-1e16);
        assert_eq!(s.value(), 1000.0);

        // the naive sum loses all of the small terms
        let mut naive = 1e16;
        for _ in 0..1000 {
            naive += 1.0;
        }
        naive += -1e16;
        assert_ne!(naive, 1000.0);
    }
}
