//! Synthetic reference geometries with known analytic overlap factors.

use crate::types::{FieldCell, FieldMap, FieldMapError, Region};

/// Sphere radius of the reference fixture, m.
const SPHERE_RADIUS_M: f64 = 5e-3;
/// Sub-samples per axis used to split sphere-boundary cells into
/// sample/vacuum volume fractions.
const SUBSAMPLES_3D: usize = 8;
/// Sub-samples per axis for the cylinder wall, a 2D problem solved once per
/// cell column.
const SUBSAMPLES_2D: usize = 48;

/// A sphere inscribed in a snug cylinder (radius = sphere radius, height =
/// diameter) filled with a uniform transverse field along x.
///
/// The sphere is the sample, the remaining cylinder volume is vacuum, and
/// nothing outside the cylinder is mapped.  Because the field is uniform,
/// the form factor reduces to `sqrt(V_sphere / V_cylinder) = sqrt(2/3) ≈
/// 0.8165`, which makes the fixture an analytic benchmark for the
/// quadrature.  Cells cut by either surface are split into coincident
/// sample and vacuum cells with sub-sampled volume fractions, so the
/// discretization error falls well below the cell size.
pub fn sphere_in_cylinder(
    cells_per_diameter: usize,
    omega_c_ghz: f64,
) -> Result<FieldMap, FieldMapError> {
    assert!(cells_per_diameter >= 4, "grid too coarse to resolve the sphere");
    let r = SPHERE_RADIUS_M;
    let n = cells_per_diameter;
    let h = 2.0 * r / n as f64;
    let h_field = [1.0, 0.0, 0.0];
    // a cell whose centre lies within half a diagonal of a surface may be
    // cut by it
    let band = 0.5 * 3f64.sqrt() * h;

    let mut cells = Vec::new();
    let mut push = |position: [f64; 3], volume: f64, region: Region| {
        if volume > 0.0 {
            cells.push(FieldCell {
                position_m: position,
                volume_m3: volume,
                region,
                e_field: [0.0; 3],
                h_field,
            });
        }
    };

    for ix in 0..n {
        let x = -r + (ix as f64 + 0.5) * h;
        for iy in 0..n {
            let y = -r + (iy as f64 + 0.5) * h;
            let radial = f64::hypot(x, y);
            if radial > r + band {
                continue; // entire column of cells lies outside the cylinder
            }
            let cylinder_frac = if radial <= r - band {
                1.0
            } else {
                disc_fraction(x, y, h, r)
            };
            if cylinder_frac <= 0.0 {
                continue;
            }
            for iz in 0..n {
                let z = -r + (iz as f64 + 0.5) * h;
                let dist = (x * x + y * y + z * z).sqrt();

                let vol = h * h * h;
                let sphere_frac = if dist <= r - band {
                    1.0
                } else if dist >= r + band {
                    0.0
                } else {
                    ball_fraction(x, y, z, h, r)
                };
                // the sphere never pokes through the cylinder wall, but the
                // two sub-sampled estimates are independent, so keep the
                // vacuum part non-negative by construction
                let vacuum_frac = (cylinder_frac - sphere_frac).max(0.0);

                push([x, y, z], vol * sphere_frac, Region::Sample);
                push([x, y, z], vol * vacuum_frac, Region::Vacuum);
            }
        }
    }

    FieldMap::new(cells, omega_c_ghz, None)
}

/// Fraction of the cell's xy cross-section inside the disc of radius `r`.
fn disc_fraction(x: f64, y: f64, h: f64, r: f64) -> f64 {
    let s = SUBSAMPLES_2D;
    let mut hits = 0usize;
    for i in 0..s {
        let px = x + ((i as f64 + 0.5) / s as f64 - 0.5) * h;
        for j in 0..s {
            let py = y + ((j as f64 + 0.5) / s as f64 - 0.5) * h;
            if px * px + py * py <= r * r {
                hits += 1;
            }
        }
    }
    hits as f64 / (s * s) as f64
}

/// Fraction of the cell volume inside the ball of radius `r`.
fn ball_fraction(x: f64, y: f64, z: f64, h: f64, r: f64) -> f64 {
    let s = SUBSAMPLES_3D;
    let mut hits = 0usize;
    for i in 0..s {
        let px = x + ((i as f64 + 0.5) / s as f64 - 0.5) * h;
        for j in 0..s {
            let py = y + ((j as f64 + 0.5) / s as f64 - 0.5) * h;
            for k in 0..s {
                let pz = z + ((k as f64 + 0.5) / s as f64 - 0.5) * h;
                if px * px + py * py + pz * pz <= r * r {
                    hits += 1;
                }
            }
        }
    }
    hits as f64 / (s * s * s) as f64
}
