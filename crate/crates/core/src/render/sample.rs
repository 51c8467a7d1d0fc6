use rayon::prelude::*;

use super::{ImageGrid, RenderError, ScalarField, Window};

/// Samples a 2D field on a `resx x resy` grid of cell-centred points over
/// `window`. Row 0 is the bottom (`min[1]`) of the window; pixels outside the
/// domain are 0.
pub fn sample2d(
    field: &dyn ScalarField,
    resx: usize,
    resy: usize,
    window: Window,
) -> Result<ImageGrid, RenderError> {
    if field.dim() != 2 {
        return Err(RenderError::FieldDimension {
            expected: 2,
            got: field.dim(),
        });
    }
    if resx == 0 || resy == 0 {
        return Err(RenderError::InvalidConfig(format!(
            "resolution must be positive, got {resx}x{resy}"
        )));
    }
    let mut values = vec![0.0; resx * resy];
    values
        .par_chunks_mut(resx)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, out) in row.iter_mut().enumerate() {
                let p = window.point(i, j, resx, resy);
                *out = field.probe(&p).unwrap_or(0.0);
            }
        });
    let mut img = ImageGrid::new(resx, resy, values);
    img.window = Some(window);
    Ok(img)
}
