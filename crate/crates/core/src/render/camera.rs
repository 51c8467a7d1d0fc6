use super::RenderError;

/// Perspective pinhole camera. Pixel rows run top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera {
    pub eye: [f64; 3],
    pub look_at: [f64; 3],
    pub up: [f64; 3],
    /// Vertical field of view in degrees.
    pub fov_deg: f64,
    pub width: usize,
    pub height: usize,
    /// Ray parameter range, in world units along the normalized direction.
    pub near: f64,
    pub far: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Orthonormal view frame.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    pub forward: [f64; 3],
    pub right: [f64; 3],
    pub up: [f64; 3],
    pub tan_half: f64,
}

impl Camera {
    /// Camera at `eye` aimed at `look_at` with y up, 30 degree field of view,
    /// 100x100 pixels, and rays spanning twice the eye-target distance.
    pub fn looking_at(eye: [f64; 3], look_at: [f64; 3]) -> Self {
        let dist = norm(sub(look_at, eye));
        Camera {
            eye,
            look_at,
            up: [0.0, 1.0, 0.0],
            fov_deg: 30.0,
            width: 100,
            height: 100,
            near: 0.0,
            far: 2.0 * dist,
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: &str| Err(RenderError::InvalidCamera(m.to_string()));
        let finite = |v: &[f64; 3]| v.iter().all(|x| x.is_finite());
        if !(finite(&self.eye) && finite(&self.look_at) && finite(&self.up)) {
            return bad("non-finite vector");
        }
        let view = sub(self.look_at, self.eye);
        if norm(view) == 0.0 {
            return bad("eye and look_at coincide");
        }
        let n_up = norm(self.up);
        if n_up == 0.0 || norm(cross(view, self.up)) <= 1e-12 * norm(view) * n_up {
            return bad("up vector is parallel to the view direction");
        }
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return bad("field of view must lie in (0, 180) degrees");
        }
        if self.width == 0 || self.height == 0 {
            return bad("resolution must be positive");
        }
        if !(self.near.is_finite() && self.far.is_finite() && self.near < self.far) {
            return bad("near must be less than far");
        }
        Ok(())
    }

    pub(crate) fn frame(&self) -> Frame {
        let forward = normalize(sub(self.look_at, self.eye));
        let right = normalize(cross(forward, self.up));
        let up = cross(right, forward);
        Frame {
            forward,
            right,
            up,
            tan_half: (self.fov_deg.to_radians() * 0.5).tan(),
        }
    }

    /// Unit direction of the ray through the centre of pixel `(i, j)`.
    pub(crate) fn ray_direction(&self, frame: &Frame, i: usize, j: usize) -> [f64; 3] {
        let aspect = self.width as f64 / self.height as f64;
        let sx = (2.0 * (i as f64 + 0.5) / self.width as f64 - 1.0) * frame.tan_half * aspect;
        let sy = (1.0 - 2.0 * (j as f64 + 0.5) / self.height as f64) * frame.tan_half;
        normalize(std::array::from_fn(|a| {
            frame.forward[a] + sx * frame.right[a] + sy * frame.up[a]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let good = Camera::looking_at([1.0, 1.0, 5.0], [1.0, 1.0, 1.0]);
        assert!(good.validate().is_ok());
        let mut c = good.clone();
        c.look_at = c.eye;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.up = [0.0, 0.0, 1.0];
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.fov_deg = 180.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.near = c.far;
        assert!(c.validate().is_err());
        let mut c = good;
        c.width = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn frame_looking_down_z() {
        let c = Camera::looking_at([1.0, 1.0, 5.0], [1.0, 1.0, 1.0]);
        let f = c.frame();
        assert_eq!(f.forward, [0.0, 0.0, -1.0]);
        assert_eq!(f.right, [1.0, 0.0, 0.0]);
        assert_eq!(f.up, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn center_pixel_looks_forward() {
        let mut c = Camera::looking_at([0.0, 0.0, 0.0], [0.0, 0.0, -3.0]);
        c.width = 3;
        c.height = 3;
        let f = c.frame();
        assert_eq!(c.ray_direction(&f, 1, 1), [0.0, 0.0, -1.0]);
        // top-left pixel leans left and up
        let d = c.ray_direction(&f, 0, 0);
        assert!(d[0] < 0.0 && d[1] > 0.0);
    }
}
