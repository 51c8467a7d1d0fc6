use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::RenderError;

/// Physical rectangle sampled by [`super::sample2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Window {
    pub fn unit() -> Self {
        Window {
            min: [0.0, 0.0],
            max: [1.0, 1.0],
        }
    }

    /// Centre of pixel `(i, j)` on a `resx x resy` grid.
    pub fn point(&self, i: usize, j: usize, resx: usize, resy: usize) -> [f64; 2] {
        let fx = (i as f64 + 0.5) / resx as f64;
        let fy = (j as f64 + 0.5) / resy as f64;
        [
            self.min[0] + (self.max[0] - self.min[0]) * fx,
            self.min[1] + (self.max[1] - self.min[1]) * fy,
        ]
    }
}

/// Row-major grid of scalar samples; `values[j * width + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    values: Vec<f64>,
    pub window: Option<Window>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), width * height, "image buffer size");
        ImageGrid {
            width,
            height,
            values,
            window: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    /// `(i, j, value)` of the first maximal pixel in row-major order.
    pub fn argmax(&self) -> (usize, usize, f64) {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        (best % self.width, best / self.width, self.values[best])
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Image turned a quarter turn about its centre: output pixel `(i, j)`
    /// takes input pixel `(j, n - 1 - i)`. Square images only.
    pub fn rotate90(&self) -> ImageGrid {
        assert_eq!(self.width, self.height, "rotate90 needs a square image");
        let n = self.width;
        let mut values = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                values[j * n + i] = self.get(j, n - 1 - i);
            }
        }
        ImageGrid::new(n, n, values)
    }

    fn check_finite(&self) -> Result<(), RenderError> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(RenderError::NonFinite(i)),
            None => Ok(()),
        }
    }
}

/// Pixelwise `|a - b|`.
pub fn diff_image(a: &ImageGrid, b: &ImageGrid) -> Result<ImageGrid, RenderError> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(RenderError::SizeMismatch {
            a: (a.width, a.height),
            b: (b.width, b.height),
        });
    }
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .collect();
    let mut out = ImageGrid::new(a.width, a.height, values);
    out.window = a.window;
    Ok(out)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RenderError + '_ {
    move |source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// NRRD header preceding the raw payload.
pub fn nrrd_header(width: usize, height: usize) -> String {
    format!(
        "NRRD0004\ntype: double\ndimension: 2\nsizes: {width} {height}\nendian: little\nencoding: raw\n\n"
    )
}

/// Attached-header NRRD: raw little-endian doubles, row-major.
pub fn write_nrrd(grid: &ImageGrid, path: &Path) -> Result<(), RenderError> {
    grid.check_finite()?;
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    w.write_all(nrrd_header(grid.width, grid.height).as_bytes())
        .map_err(io_err(path))?;
    for v in &grid.values {
        w.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads what [`write_nrrd`] writes (2D, double, raw, little-endian).
pub fn read_nrrd(path: &Path) -> Result<ImageGrid, RenderError> {
    let bad = |message: String| RenderError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut line = String::new();
    r.read_line(&mut line).map_err(io_err(path))?;
    if !line.starts_with("NRRD000") {
        return Err(bad("missing NRRD magic".into()));
    }
    let mut sizes = None;
    loop {
        line.clear();
        if r.read_line(&mut line).map_err(io_err(path))? == 0 {
            return Err(bad("header not terminated".into()));
        }
        let l = line.trim_end_matches(['\n', '\r']);
        if l.is_empty() {
            break;
        }
        if l.starts_with('#') {
            continue;
        }
        let (key, value) = l
            .split_once(':')
            .ok_or_else(|| bad(format!("bad header line `{l}`")))?;
        let value = value.trim();
        match key.trim() {
            "type" if value != "double" => return Err(bad(format!("unsupported type {value}"))),
            "dimension" if value != "2" => {
                return Err(bad(format!("unsupported dimension {value}")))
            }
            "endian" if value != "little" => {
                return Err(bad(format!("unsupported endian {value}")))
            }
            "encoding" if value != "raw" => {
                return Err(bad(format!("unsupported encoding {value}")))
            }
            "sizes" => {
                let s: Vec<usize> = value
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad(format!("bad sizes `{value}`"))))
                    .collect::<Result<_, _>>()?;
                if s.len() != 2 {
                    return Err(bad(format!("bad sizes `{value}`")));
                }
                sizes = Some((s[0], s[1]));
            }
            _ => {}
        }
    }
    let (width, height) = sizes.ok_or_else(|| bad("missing sizes".into()))?;
    let mut payload = Vec::new();
    r.read_to_end(&mut payload).map_err(io_err(path))?;
    if payload.len() != 8 * width * height {
        return Err(bad(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            8 * width * height
        )));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok(ImageGrid::new(width, height, values))
}

/// PGM bytes: binary P5, values min-max scaled to 0..=255 (all zero when the
/// image is constant).
pub fn pgm_bytes(grid: &ImageGrid) -> Result<Vec<u8>, RenderError> {
    grid.check_finite()?;
    let lo = grid.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = grid.max();
    let range = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", grid.width, grid.height).into_bytes();
    out.extend(grid.values.iter().map(|&v| {
        if range > 0.0 {
            ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    }));
    Ok(out)
}

pub fn write_pgm(grid: &ImageGrid, path: &Path) -> Result<(), RenderError> {
    let bytes = pgm_bytes(grid)?;
    std::fs::write(path, bytes).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_normalization() {
        let g = ImageGrid::new(2, 2, vec![0.0, 1.0, 2.0, 3.0]);
        let bytes = pgm_bytes(&g).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 85, 170, 255]);
        let flat = ImageGrid::new(2, 1, vec![4.0, 4.0]);
        assert_eq!(&pgm_bytes(&flat).unwrap()[11..], &[0, 0]);
    }

    #[test]
    fn nrrd_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.nrrd");
        let vals = vec![0.1, -2.5e-300, 3.0, f64::MIN_POSITIVE, 7.25, 1.0 / 3.0];
        let g = ImageGrid::new(3, 2, vals.clone());
        write_nrrd(&g, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = nrrd_header(3, 2);
        assert!(bytes.starts_with(header.as_bytes()));
        assert_eq!(bytes.len() - header.len(), 8 * 6);
        let back = read_nrrd(&path).unwrap();
        assert_eq!((back.width, back.height), (3, 2));
        let same = back
            .values()
            .iter()
            .zip(&vals)
            .all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same);
    }

    #[test]
    fn non_finite_rejected() {
        let g = ImageGrid::new(1, 2, vec![0.0, f64::NAN]);
        assert!(matches!(pgm_bytes(&g), Err(RenderError::NonFinite(1))));
    }

    #[test]
    fn io_errors_name_the_path() {
        let g = ImageGrid::new(1, 1, vec![0.0]);
        let err = write_nrrd(&g, Path::new("/nonexistent/dir/x.nrrd")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.nrrd"));
    }

    #[test]
    fn diff_properties() {
        let a = ImageGrid::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let b = ImageGrid::new(2, 2, vec![4.0, 2.0, 1.0, 0.5]);
        assert!(diff_image(&a, &a)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(diff_image(&a, &b).unwrap(), diff_image(&b, &a).unwrap());
        assert_eq!(diff_image(&a, &b).unwrap().values(), &[3.0, 0.0, 2.0, 3.5]);
        let c = ImageGrid::new(4, 1, vec![0.0; 4]);
        assert!(matches!(
            diff_image(&a, &c),
            Err(RenderError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn rotation_and_argmax() {
        let g = ImageGrid::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let r = g.rotate90();
        assert_eq!(r.values(), &[3.0, 1.0, 4.0, 2.0]);
        assert_eq!(r.rotate90().rotate90().rotate90(), g);
        assert_eq!(g.argmax(), (1, 1, 4.0));
    }
}
