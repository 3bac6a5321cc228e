//! Initial data from a configuration.

use std::io::BufReader;

use nls_core::evolution::{dilated_ground_state, gaussian, natural_scaled_ground_state};
use nls_core::field_io::read_field;
use nls_core::groundstate::GroundState;
use nls_core::spectral::{FieldState, GridSpec};

use crate::config::{Family, InitialData};
use crate::failure::Failure;

/// Builds `u₀` on `grid`. File data keep their own grid but must match
/// the dimension.
pub fn build_initial(
    grid: GridSpec,
    init: &InitialData,
    gs: &GroundState,
) -> Result<FieldState, Failure> {
    let field = match init.family {
        Family::ScaledQ => dilated_ground_state(grid, &gs.profile, init.lambda),
        Family::ScaledQNatural => natural_scaled_ground_state(grid, &gs.profile, init.lambda),
        Family::Gaussian => {
            let mut k = [0.0; 3];
            for (a, v) in init.velocity.iter().enumerate().take(3) {
                k[a] = *v;
            }
            gaussian(grid, init.amplitude, init.width, k)
        }
        Family::File => {
            let path = init
                .path
                .as_ref()
                .ok_or_else(|| Failure::Config("family = \"file\" needs initial.path".into()))?;
            let f = std::fs::File::open(path)
                .map_err(|e| Failure::Config(format!("cannot open {}: {e}", path.display())))?;
            let field = read_field(BufReader::new(f))
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            if field.grid.dim != grid.dim {
                return Err(Failure::Config(format!(
                    "field file is {}-dimensional, configuration says {}",
                    field.grid.dim, grid.dim
                )));
            }
            field
        }
    };
    if !field.is_finite() {
        return Err(Failure::Config("initial data is not finite".into()));
    }
    Ok(field)
}
