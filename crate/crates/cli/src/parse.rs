//! Parsers for the compact value syntaxes used on the command line.
//!
//! Magnon dispersions are written as `kind:args`:
//!
//! * `linear:GEFF,BOFF` — effective g-factor and field offset in T,
//! * `poly:C0,C1,...` — polynomial coefficients in GHz, GHz/T, GHz/T², ...,
//! * `turnover:GR,BR,GF,BF,W` — rising and falling linear asymptotes
//!   (g-factor, offset pairs) blended over a width `W` in GHz.
//!
//! Field windows are written as `LO,HI` in tesla.

use polariton_core::{LinearZeeman, MagnonDispersion, PolynomialDispersion, SmoothTurnover};

fn parse_floats(text: &str, what: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|piece| {
            piece
                .trim()
                .parse::<f64>()
                .map_err(|_| format!("{what}: {piece:?} is not a number"))
        })
        .collect()
}

/// Parse the `kind:args` dispersion syntax.
pub fn parse_dispersion(text: &str) -> Result<MagnonDispersion, String> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| "expected kind:args, e.g. linear:2.061,0.1231".to_string())?;
    let values = parse_floats(rest, "dispersion")?;
    match kind {
        "linear" => {
            if values.len() != 2 {
                return Err(format!(
                    "linear dispersion takes GEFF,BOFF (2 numbers), got {}",
                    values.len()
                ));
            }
            Ok(MagnonDispersion::linear(values[0], values[1]))
        }
        "poly" => {
            if values.is_empty() {
                return Err("poly dispersion needs at least one coefficient".into());
            }
            Ok(MagnonDispersion::Polynomial(PolynomialDispersion::new(
                values,
            )))
        }
        "turnover" => {
            if values.len() != 5 {
                return Err(format!(
                    "turnover dispersion takes GR,BR,GF,BF,W (5 numbers), got {}",
                    values.len()
                ));
            }
            if !(values[4] > 0.0) {
                return Err(format!(
                    "turnover blend width must be positive, got {}",
                    values[4]
                ));
            }
            Ok(MagnonDispersion::SmoothTurnover(SmoothTurnover::new(
                LinearZeeman::new(values[0], values[1]),
                LinearZeeman::new(values[2], values[3]),
                values[4],
            )))
        }
        other => Err(format!(
            "unknown dispersion kind {other:?}; expected linear, poly, or turnover"
        )),
    }
}

/// Parse a `LO,HI` field window in tesla.
pub fn parse_window(text: &str) -> Result<[f64; 2], String> {
    let values = parse_floats(text, "window")?;
    if values.len() != 2 {
        return Err(format!("window takes LO,HI (2 numbers), got {}", values.len()));
    }
    if !(values[1] > values[0]) {
        return Err(format!(
            "window must have LO < HI, got {},{}",
            values[0], values[1]
        ));
    }
    Ok([values[0], values[1]])
}

/// Environment variable that overrides every other seed source.
pub const SEED_ENV_VAR: &str = "POLARITON_SEED";

/// Apply the `POLARITON_SEED` override: env > flag > config file > default.
pub fn seed_with_env_override(seed: u64) -> Result<u64, String> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("{SEED_ENV_VAR}={text:?} is not a valid u64 seed")),
        Err(_) => Ok(seed),
    }
}
