//! Binary erosion and dilation with solid rectangular kernels.
//!
//! For a kernel of size `w x h` anchored at `(ax, ay)`:
//!
//! ```text
//! dilate(x, y) = max { I(x + i - ax, y + j - ay) : 0 <= i < w, 0 <= j < h }
//! erode(x, y)  = min { I(x + i - ax, y + j - ay) : 0 <= i < w, 0 <= j < h }
//! ```
//!
//! Out-of-bounds samples contribute according to a [`Border`] rule; the
//! plain [`erode`] and [`dilate`] use [`Border::Zero`]. Both operations are
//! separable for rectangles, so they run as two windowed-count passes over
//! prefix sums, linear in the pixel count regardless of kernel size.

use serde::{Deserialize, Serialize};

use crate::{BinaryImage, Error, Result};

/// Solid rectangular structuring element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Kernel {
    width: usize,
    height: usize,
    anchor: (usize, usize),
}

impl Kernel {
    /// Kernel anchored at `(width / 2, height / 2)`.
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::with_anchor(width, height, (width / 2, height / 2))
    }

    pub fn with_anchor(width: usize, height: usize, anchor: (usize, usize)) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidKernel(format!(
                "kernel must be at least 1x1, got {width}x{height}"
            )));
        }
        if anchor.0 >= width || anchor.1 >= height {
            return Err(Error::InvalidKernel(format!(
                "anchor {anchor:?} outside {width}x{height} kernel"
            )));
        }
        Ok(Self {
            width,
            height,
            anchor,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }
}

/// How out-of-bounds samples take part in the min/max.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Border {
    /// Off-canvas samples read as `0`.
    #[default]
    Zero,
    /// Off-canvas samples are skipped; only covered in-bounds pixels count.
    Ignore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripLength {
    Fixed(usize),
    /// Image width for horizontal strips, image height for vertical ones.
    FullExtent,
}

/// Thin elongated kernel description, resolved against image dimensions by
/// [`make_strip_kernel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripKernelSpec {
    pub orientation: Orientation,
    pub length: StripLength,
    pub thickness: usize,
}

impl StripKernelSpec {
    pub fn horizontal(length: StripLength, thickness: usize) -> Self {
        Self {
            orientation: Orientation::Horizontal,
            length,
            thickness,
        }
    }

    pub fn vertical(length: StripLength, thickness: usize) -> Self {
        Self {
            orientation: Orientation::Vertical,
            length,
            thickness,
        }
    }
}

/// Resolves a strip spec to a concrete kernel. Horizontal strips are
/// `length x thickness`, vertical ones `thickness x length`.
pub fn make_strip_kernel(spec: StripKernelSpec, img_dims: (usize, usize)) -> Result<Kernel> {
    if spec.thickness == 0 {
        return Err(Error::InvalidSpec("strip thickness must be >= 1".into()));
    }
    let length = match spec.length {
        StripLength::Fixed(n) if n < 2 => {
            return Err(Error::InvalidSpec(format!(
                "strip length must be >= 2, got {n}"
            )))
        }
        StripLength::Fixed(n) => n,
        StripLength::FullExtent => match spec.orientation {
            Orientation::Horizontal => img_dims.0,
            Orientation::Vertical => img_dims.1,
        },
    };
    match spec.orientation {
        Orientation::Horizontal => Kernel::new(length, spec.thickness),
        Orientation::Vertical => Kernel::new(spec.thickness, length),
    }
    .map_err(|e| Error::InvalidSpec(e.to_string()))
}

pub fn dilate(img: &BinaryImage, k: &Kernel) -> BinaryImage {
    dilate_with(img, k, Border::Zero)
}

pub fn erode(img: &BinaryImage, k: &Kernel) -> BinaryImage {
    erode_with(img, k, Border::Zero)
}

pub fn dilate_with(img: &BinaryImage, k: &Kernel, _border: Border) -> BinaryImage {
    // A zero sample never raises a max, so both border rules coincide.
    apply(img, k, |count, _covered, _full| count > 0)
}

pub fn erode_with(img: &BinaryImage, k: &Kernel, border: Border) -> BinaryImage {
    match border {
        Border::Zero => apply(img, k, |count, _covered, full| count == full),
        Border::Ignore => apply(img, k, |count, covered, _full| count == covered),
    }
}

/// Erosion by a strip whose long axis covers the whole image from every
/// anchor position, with off-canvas samples ignored.
///
/// With `Horizontal`, a pixel stays `1` iff every image row within its
/// `thickness`-high band is entirely `1`. This is erosion by a
/// `(2W - 1) x thickness` kernel anchored at `(W - 1, thickness / 2)` under
/// [`Border::Ignore`]; `Vertical` is the transposed case.
pub fn erode_spanning(
    img: &BinaryImage,
    orientation: Orientation,
    thickness: usize,
) -> Result<BinaryImage> {
    if thickness == 0 {
        return Err(Error::InvalidSpec("strip thickness must be >= 1".into()));
    }
    let (w, h) = img.dims();
    let k = match orientation {
        Orientation::Horizontal => Kernel::with_anchor(2 * w - 1, thickness, (w - 1, thickness / 2))?,
        Orientation::Vertical => Kernel::with_anchor(thickness, 2 * h - 1, (thickness / 2, h - 1))?,
    };
    Ok(erode_with(img, &k, Border::Ignore))
}

/// Runs the separable horizontal then vertical window pass. `keep` receives
/// the number of ones in the window, the number of in-bounds samples, and the
/// full window length.
fn apply(img: &BinaryImage, k: &Kernel, keep: impl Fn(usize, usize, usize) -> bool) -> BinaryImage {
    let (w, h) = img.dims();
    let mut rows = vec![0u8; w * h];
    let mut prefix = vec![0usize; w.max(h) + 1];

    for y in 0..h {
        let src = &img.data()[y * w..(y + 1) * w];
        window_pass(src.iter().copied(), w, k.width, k.anchor.0, &mut prefix, &keep, |x, v| {
            rows[y * w + x] = v
        });
    }

    let mut out = img.clone();
    let dst = out.data_mut();
    for x in 0..w {
        let column = (0..h).map(|y| rows[y * w + x]);
        window_pass(column, h, k.height, k.anchor.1, &mut prefix, &keep, |y, v| {
            dst[y * w + x] = v
        });
    }
    out
}

fn window_pass(
    line: impl Iterator<Item = u8>,
    n: usize,
    len: usize,
    anchor: usize,
    prefix: &mut [usize],
    keep: &impl Fn(usize, usize, usize) -> bool,
    mut write: impl FnMut(usize, u8),
) {
    prefix[0] = 0;
    for (i, v) in line.enumerate() {
        prefix[i + 1] = prefix[i] + v as usize;
    }
    for i in 0..n {
        // window [i - anchor, i - anchor + len) clipped to [0, n)
        let lo = i.saturating_sub(anchor);
        let hi = (i + len - anchor).min(n);
        let count = prefix[hi] - prefix[lo];
        write(i, u8::from(keep(count, hi - lo, len)));
    }
}
