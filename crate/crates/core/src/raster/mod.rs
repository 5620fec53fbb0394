//! Raster containers and pixel-level operations shared by every stage.
//!
//! [`GrayImage`] holds 8-bit intensities. [`BinaryImage`] holds values in
//! `{0, 1}` where `0` is displayed black and `1` white; its [`Polarity`] tag
//! records which of the two values is the content (foreground).

mod codec;

pub use codec::{decode, decode_pgm, encode_pgm, load_gray, save_binary_pgm, save_pgm};

use crate::{Error, Result};

/// Single-channel 8-bit image, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.width, self.height)
    }
}

impl GrayImage {
    /// Creates a `width` x `height` image filled with `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn new(width: usize, height: usize, value: u8) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.width + x] = v;
    }

    /// Fills the rectangle `[x, x+w) x [y, y+h)`, clipped to the image.
    pub fn fill_rect(&mut self, x: usize, y: usize, w: usize, h: usize, v: u8) {
        let x1 = (x + w).min(self.width);
        let y1 = (y + h).min(self.height);
        for yy in y.min(self.height)..y1 {
            let row = yy * self.width;
            self.data[row + x.min(x1)..row + x1].fill(v);
        }
    }

    /// 256-bin intensity histogram.
    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &v in &self.data {
            hist[v as usize] += 1;
        }
        hist
    }
}

/// Which binary value denotes content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Polarity {
    /// `1` is content: white foreground on black background.
    ForegroundIsOne,
    /// `0` is content: black foreground on white background.
    ForegroundIsZero,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::ForegroundIsOne => Polarity::ForegroundIsZero,
            Polarity::ForegroundIsZero => Polarity::ForegroundIsOne,
        }
    }

    /// Pixel value used for content under this polarity.
    pub fn foreground(self) -> u8 {
        match self {
            Polarity::ForegroundIsOne => 1,
            Polarity::ForegroundIsZero => 0,
        }
    }
}

/// Binary raster with values in `{0, 1}`.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
    polarity: Polarity,
}

impl std::fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BinaryImage({}x{}, {:?})",
            self.width, self.height, self.polarity
        )
    }
}

impl BinaryImage {
    /// Panics if either dimension is zero or `value > 1`.
    pub fn new(width: usize, height: usize, value: u8, polarity: Polarity) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert!(value <= 1, "binary value must be 0 or 1");
        Self {
            width,
            height,
            data: vec![value; width * height],
            polarity,
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<u8>, polarity: Polarity) -> Result<Self> {
        check_dims(width, height, data.len())?;
        if let Some(bad) = data.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidImage(format!(
                "binary pixel value {bad} is not 0 or 1"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
            polarity,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        debug_assert!(v <= 1);
        self.data[y * self.width + x] = v;
    }

    /// Number of pixels equal to `value`.
    pub fn count(&self, value: u8) -> usize {
        self.data.iter().filter(|&&v| v == value).count()
    }

    /// Same pixels, different semantic tag. Kept crate-private so that the
    /// tag changes only through inversion or normalisation.
    pub(crate) fn with_polarity(mut self, polarity: Polarity) -> Self {
        self.polarity = polarity;
        self
    }

    pub(crate) fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Renders `0` as black and `1` as white.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| v * 255).collect(),
        }
    }

    fn same_shape(&self, other: &BinaryImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        if self.polarity != other.polarity {
            return Err(Error::PolarityMismatch {
                expected: self.polarity,
                found: other.polarity,
            });
        }
        Ok(())
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidImage(format!(
            "dimensions must be >= 1, got {width}x{height}"
        )));
    }
    if width * height != len {
        return Err(Error::InvalidImage(format!(
            "buffer of {len} values does not match {width}x{height}"
        )));
    }
    Ok(())
}

/// Binarisation threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Threshold {
    Fixed(u8),
    /// Otsu's between-class variance maximisation.
    Auto,
}

/// Maps `p > threshold` to `1` (white) and everything else to `0` (black).
/// The result has black content on white, [`Polarity::ForegroundIsZero`].
pub fn binarize(img: &GrayImage, threshold: Threshold) -> BinaryImage {
    let t = match threshold {
        Threshold::Fixed(t) => t,
        Threshold::Auto => otsu_threshold(img),
    };
    BinaryImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&p| u8::from(p > t)).collect(),
        polarity: Polarity::ForegroundIsZero,
    }
}

/// Otsu threshold over the 256-bin histogram. Classes are `[0, t]` and
/// `[t+1, 255]`; the smallest `t` attaining the maximum variance wins.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = img.histogram();
    let total = img.data.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();

    let mut best_t = 0u8;
    let mut best_var = -1.0f64;
    let mut weight_bg = 0.0f64;
    let mut sum_bg = 0.0f64;
    for t in 0..=255usize {
        weight_bg += hist[t] as f64;
        sum_bg += t as f64 * hist[t] as f64;
        let weight_fg = total - weight_bg;
        if weight_bg == 0.0 || weight_fg == 0.0 {
            continue;
        }
        let mean_bg = sum_bg / weight_bg;
        let mean_fg = (sum_all - sum_bg) / weight_fg;
        let var = weight_bg * weight_fg * (mean_bg - mean_fg).powi(2);
        // relative epsilon so float noise cannot move the first maximum
        if var > best_var * (1.0 + 1e-12) {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

pub fn invert(img: &BinaryImage) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&v| 1 - v).collect(),
        polarity: img.polarity.flipped(),
    }
}

pub fn bitwise_or(a: &BinaryImage, b: &BinaryImage) -> Result<BinaryImage> {
    zip_with(a, b, |x, y| x | y)
}

pub fn bitwise_and(a: &BinaryImage, b: &BinaryImage) -> Result<BinaryImage> {
    zip_with(a, b, |x, y| x & y)
}

fn zip_with(a: &BinaryImage, b: &BinaryImage, f: impl Fn(u8, u8) -> u8) -> Result<BinaryImage> {
    a.same_shape(b)?;
    Ok(BinaryImage {
        width: a.width,
        height: a.height,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
        polarity: a.polarity,
    })
}

/// `k` x `k` median filter with edge replication.
pub fn median_filter(img: &GrayImage, k: usize) -> Result<GrayImage> {
    if k == 0 || k % 2 == 0 {
        return Err(Error::InvalidKernel(format!(
            "median kernel side must be odd and >= 1, got {k}"
        )));
    }
    if k == 1 {
        return Ok(img.clone());
    }
    let r = (k / 2) as isize;
    let (w, h) = (img.width as isize, img.height as isize);
    let mid = k * k / 2;
    let mut out = vec![0u8; img.data.len()];
    let mut window = Vec::with_capacity(k * k);
    for y in 0..h {
        for x in 0..w {
            window.clear();
            for dy in -r..=r {
                let sy = (y + dy).clamp(0, h - 1) as usize;
                let row = &img.data[sy * img.width..(sy + 1) * img.width];
                for dx in -r..=r {
                    window.push(row[(x + dx).clamp(0, w - 1) as usize]);
                }
            }
            let (_, m, _) = window.select_nth_unstable(mid);
            out[(y * w + x) as usize] = *m;
        }
    }
    Ok(GrayImage {
        width: img.width,
        height: img.height,
        data: out,
    })
}

/// Rotates `img` counter-clockwise (as displayed) by `angle` degrees about
/// the image centre using bilinear interpolation. The output has the same
/// size; samples that fall outside the source take `fill`.
pub fn rotate(img: &GrayImage, angle: f64, fill: u8) -> GrayImage {
    if angle == 0.0 {
        return img.clone();
    }
    let (sin, cos) = angle.to_radians().sin_cos();
    let cx = (img.width as f64 - 1.0) / 2.0;
    let cy = (img.height as f64 - 1.0) / 2.0;
    let sample = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= img.width as isize || y >= img.height as isize {
            fill as f64
        } else {
            img.get(x as usize, y as usize) as f64
        }
    };
    let mut out = vec![fill; img.data.len()];
    for oy in 0..img.height {
        for ox in 0..img.width {
            let dx = ox as f64 - cx;
            let dy = oy as f64 - cy;
            // inverse of the forward map dx' = dx cos + dy sin, dy' = -dx sin + dy cos
            let sx = dx * cos - dy * sin + cx;
            let sy = dx * sin + dy * cos + cy;
            if sx <= -1.0 || sy <= -1.0 || sx >= img.width as f64 || sy >= img.height as f64 {
                continue;
            }
            let x0 = sx.floor();
            let y0 = sy.floor();
            let fx = sx - x0;
            let fy = sy - y0;
            let (x0, y0) = (x0 as isize, y0 as isize);
            let top = sample(x0, y0) * (1.0 - fx) + sample(x0 + 1, y0) * fx;
            let bottom = sample(x0, y0 + 1) * (1.0 - fx) + sample(x0 + 1, y0 + 1) * fx;
            let v = top * (1.0 - fy) + bottom * fy;
            out[oy * img.width + ox] = v.round().clamp(0.0, 255.0) as u8;
        }
    }
    GrayImage {
        width: img.width,
        height: img.height,
        data: out,
    }
}

/// Luminance `0.299 R + 0.587 G + 0.114 B`, rounded.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .round()
        .clamp(0.0, 255.0) as u8
}
