use rayon::prelude::*;

use super::{Camera, ImageGrid, RenderError, ScalarField};

/// Samples farther than `radius` from `center` are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipSphere {
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderConfig {
    /// Ray-march step length.
    pub step: f64,
    pub clip: Option<ClipSphere>,
    /// Initial ray value; pixels whose rays never see a larger sample keep it.
    pub background: f64,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            step: 0.01,
            clip: None,
            background: 0.0,
        }
    }
}

impl RenderConfig {
    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(RenderError::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if let Some(clip) = &self.clip {
            if !(clip.radius.is_finite() && clip.radius > 0.0) {
                return Err(RenderError::InvalidConfig(format!(
                    "clip radius must be positive, got {}",
                    clip.radius
                )));
            }
        }
        if !self.background.is_finite() {
            return Err(RenderError::InvalidConfig(
                "background must be finite".into(),
            ));
        }
        Ok(())
    }
}

/// Maximum intensity projection: for every pixel, march the perspective ray
/// from `near` to `far` in `step` increments and keep the largest field
/// value among samples that are inside the domain (and the clip sphere).
///
/// Rows are rendered in parallel; each pixel is independent, so the result
/// does not depend on the thread count.
pub fn mip_render(
    field: &dyn ScalarField,
    camera: &Camera,
    config: &RenderConfig,
) -> Result<ImageGrid, RenderError> {
    if field.dim() != 3 {
        return Err(RenderError::FieldDimension {
            expected: 3,
            got: field.dim(),
        });
    }
    camera.validate()?;
    config.validate()?;
    let frame = camera.frame();
    let steps = ((camera.far - camera.near) / config.step).floor() as usize;
    let mut values = vec![config.background; camera.width * camera.height];
    values
        .par_chunks_mut(camera.width)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, out) in row.iter_mut().enumerate() {
                let dir = camera.ray_direction(&frame, i, j);
                let mut best = config.background;
                for s in 0..=steps {
                    let t = camera.near + s as f64 * config.step;
                    let pos: [f64; 3] = std::array::from_fn(|a| camera.eye[a] + t * dir[a]);
                    if let Some(clip) = &config.clip {
                        let d2: f64 = (0..3).map(|a| (pos[a] - clip.center[a]).powi(2)).sum();
                        if d2 >= clip.radius * clip.radius {
                            continue;
                        }
                    }
                    if let Some(v) = field.probe(&pos) {
                        best = best.max(v);
                    }
                }
                *out = best;
            }
        });
    Ok(ImageGrid::new(camera.width, camera.height, values))
}
