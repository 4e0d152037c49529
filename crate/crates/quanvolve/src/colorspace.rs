//! Color conversions, angle encoding, and bilinear resizing.
//!
//! The preprocessing pipeline is fixed as **convert → scale to [0, 1] →
//! resize → map to [−π, π]** ([`to_angle_tensor`]); scaling uses each
//! channel's fixed nominal range, never data min/max, so the transform is
//! data-independent. Conversions follow the published formulas exactly:
//! sRGB inverse gamma and the D65 sRGB→XYZ matrix feeding CIELAB, and
//! BT.601 studio-swing YCbCr. The LAB→RGB inverse exists only in tests, as
//! a round-trip check.

use std::f64::consts::PI;

use ndarray::Array3;

/// Interpretation of an [`ImageTensor`]'s values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    /// sRGB components in [0, 1].
    Rgb01,
    /// CIELAB: L in [0, 100], A/B nominally [−128, 127].
    Lab,
    /// BT.601 studio-swing: Y in [16, 235], Cb/Cr in [16, 240].
    Ycbcr,
    /// Rotation angles in [−π, π], ready for circuit encoding.
    Angles,
}

impl ColorSpace {
    /// Nominal (lo, hi) range used for angle scaling of `channel`.
    ///
    /// LAB A/B use the full signed byte range even though sRGB-gamut values
    /// span less, keeping the affine map fixed.
    pub fn nominal_range(self, channel: usize) -> (f64, f64) {
        match (self, channel) {
            (ColorSpace::Rgb01, _) => (0.0, 1.0),
            (ColorSpace::Lab, 0) => (0.0, 100.0),
            (ColorSpace::Lab, _) => (-128.0, 127.0),
            (ColorSpace::Ycbcr, 0) => (16.0, 235.0),
            (ColorSpace::Ycbcr, _) => (16.0, 240.0),
            (ColorSpace::Angles, _) => (-PI, PI),
        }
    }

    /// Channel labels as used in experiment tables.
    pub fn channel_labels(self) -> [&'static str; 3] {
        match self {
            ColorSpace::Rgb01 => ["R", "G", "B"],
            ColorSpace::Lab => ["L", "A", "B"],
            ColorSpace::Ycbcr => ["Y", "Cb", "Cr"],
            ColorSpace::Angles => ["0", "1", "2"],
        }
    }

    /// Label for the all-channels row of experiment tables.
    pub fn full_label(self) -> &'static str {
        match self {
            ColorSpace::Rgb01 => "RGB",
            ColorSpace::Lab => "LAB",
            ColorSpace::Ycbcr => "YCbCr",
            ColorSpace::Angles => "angles",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorSpace::Rgb01 => "RGB",
            ColorSpace::Lab => "LAB",
            ColorSpace::Ycbcr => "YCbCr",
            ColorSpace::Angles => "ANGLES",
        }
    }
}

impl std::fmt::Display for ColorSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown color space '{0}' (expected RGB, LAB, or YCbCr)")]
pub struct UnknownColorSpace(pub String);

impl std::str::FromStr for ColorSpace {
    type Err = UnknownColorSpace;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RGB" | "RGB01" => Ok(ColorSpace::Rgb01),
            "LAB" => Ok(ColorSpace::Lab),
            "YCBCR" => Ok(ColorSpace::Ycbcr),
            _ => Err(UnknownColorSpace(s.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ColorError {
    #[error("value {value} outside [{lo}, {hi}] for {space} channel {channel}")]
    OutOfRange {
        value: f64,
        lo: f64,
        hi: f64,
        space: ColorSpace,
        channel: usize,
    },
    #[error("operation needs a {expected} tensor, got {got}")]
    WrongSpace { expected: ColorSpace, got: ColorSpace },
    #[error("zero target dimensions {0}×{1}")]
    ZeroTargetDims(usize, usize),
    #[error("channel index {index} out of range for {channels} channels")]
    ChannelOutOfRange { index: usize, channels: usize },
}

/// H×W×C image with a declared value interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    space: ColorSpace,
    values: Array3<f64>,
}

impl ImageTensor {
    pub fn new(space: ColorSpace, values: Array3<f64>) -> Self {
        Self { space, values }
    }

    pub fn space(&self) -> ColorSpace {
        self.space
    }

    pub fn height(&self) -> usize {
        self.values.shape()[0]
    }

    pub fn width(&self) -> usize {
        self.values.shape()[1]
    }

    pub fn channels(&self) -> usize {
        self.values.shape()[2]
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.values[[y, x, c]]
    }

    /// Extracts one channel as a single-channel tensor of the same space.
    pub fn channel(&self, index: usize) -> Result<ImageTensor, ColorError> {
        if index >= self.channels() {
            return Err(ColorError::ChannelOutOfRange {
                index,
                channels: self.channels(),
            });
        }
        let (h, w) = (self.height(), self.width());
        let values = Array3::from_shape_fn((h, w, 1), |(y, x, _)| self.values[[y, x, index]]);
        Ok(ImageTensor {
            space: self.space,
            values,
        })
    }

    fn expect_space(&self, expected: ColorSpace) -> Result<(), ColorError> {
        if self.space != expected {
            return Err(ColorError::WrongSpace {
                expected,
                got: self.space,
            });
        }
        Ok(())
    }

    fn check_in_range(&self, slack: f64) -> Result<(), ColorError> {
        for ((_, _, c), &v) in self.values.indexed_iter() {
            let (lo, hi) = self.space.nominal_range(c);
            if v < lo - slack || v > hi + slack {
                return Err(ColorError::OutOfRange {
                    value: v,
                    lo,
                    hi,
                    space: self.space,
                    channel: c,
                });
            }
        }
        Ok(())
    }
}

/// sRGB inverse gamma (electro-optical transfer).
fn srgb_linearize(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

/// CIELAB companding function with the (6/29)³ linear-piece threshold.
fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// One sRGB pixel (components in [0, 1]) to CIELAB.
pub fn rgb_to_lab_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let (rl, gl, bl) = (srgb_linearize(r), srgb_linearize(g), srgb_linearize(b));
    let xyz = [
        SRGB_TO_XYZ[0][0] * rl + SRGB_TO_XYZ[0][1] * gl + SRGB_TO_XYZ[0][2] * bl,
        SRGB_TO_XYZ[1][0] * rl + SRGB_TO_XYZ[1][1] * gl + SRGB_TO_XYZ[1][2] * bl,
        SRGB_TO_XYZ[2][0] * rl + SRGB_TO_XYZ[2][1] * gl + SRGB_TO_XYZ[2][2] * bl,
    ];
    let fx = lab_f(xyz[0] / D65_WHITE[0]);
    let fy = lab_f(xyz[1] / D65_WHITE[1]);
    let fz = lab_f(xyz[2] / D65_WHITE[2]);
    (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
}

/// One sRGB pixel to BT.601 studio-swing YCbCr.
pub fn rgb_to_ycbcr_pixel(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    (
        16.0 + 65.481 * r + 128.553 * g + 24.966 * b,
        128.0 - 37.797 * r - 74.203 * g + 112.0 * b,
        128.0 + 112.0 * r - 93.786 * g - 18.214 * b,
    )
}

fn convert_pixels(
    img: &ImageTensor,
    space: ColorSpace,
    f: impl Fn(f64, f64, f64) -> (f64, f64, f64),
) -> Result<ImageTensor, ColorError> {
    img.expect_space(ColorSpace::Rgb01)?;
    img.check_in_range(0.0)?;
    let (h, w) = (img.height(), img.width());
    let mut out = Array3::zeros((h, w, 3));
    for y in 0..h {
        for x in 0..w {
            let (a, b, c) = f(img.get(y, x, 0), img.get(y, x, 1), img.get(y, x, 2));
            out[[y, x, 0]] = a;
            out[[y, x, 1]] = b;
            out[[y, x, 2]] = c;
        }
    }
    Ok(ImageTensor::new(space, out))
}

/// sRGB image to CIELAB.
pub fn rgb_to_lab(img: &ImageTensor) -> Result<ImageTensor, ColorError> {
    convert_pixels(img, ColorSpace::Lab, rgb_to_lab_pixel)
}

/// sRGB image to YCbCr.
pub fn rgb_to_ycbcr(img: &ImageTensor) -> Result<ImageTensor, ColorError> {
    convert_pixels(img, ColorSpace::Ycbcr, rgb_to_ycbcr_pixel)
}

/// Slack beyond the nominal range tolerated (and clamped) before erroring.
///
/// Must absorb conversion roundoff: the published sRGB-to-XYZ rows do not
/// sum exactly to the D65 white point, so pure white lands near
/// `L = 100.000004`. Real wiring mistakes (wrong units, unscaled bytes)
/// overshoot by orders of magnitude more than this.
const RANGE_SLACK: f64 = 1e-4;

/// Maps every channel value through its nominal range onto [−π, π]:
/// `θ = 2π·(v − lo)/(hi − lo) − π`.
pub fn normalize_to_angles(img: &ImageTensor) -> Result<ImageTensor, ColorError> {
    if img.space == ColorSpace::Angles {
        return Err(ColorError::WrongSpace {
            expected: ColorSpace::Rgb01,
            got: ColorSpace::Angles,
        });
    }
    img.check_in_range(RANGE_SLACK)?;
    let mut out = img.values.clone();
    for ((_, _, c), v) in out.indexed_iter_mut() {
        let (lo, hi) = img.space.nominal_range(c);
        let unit = ((*v - lo) / (hi - lo)).clamp(0.0, 1.0);
        *v = 2.0 * PI * unit - PI;
    }
    Ok(ImageTensor::new(ColorSpace::Angles, out))
}

/// Bilinear resample with half-pixel centers:
/// `src = (dst + 0.5)·(in/out) − 0.5`, clamped to borders, channelwise, no
/// anti-aliasing prefilter.
pub fn bilinear_resize(
    img: &ImageTensor,
    out_h: usize,
    out_w: usize,
) -> Result<ImageTensor, ColorError> {
    if out_h == 0 || out_w == 0 {
        return Err(ColorError::ZeroTargetDims(out_h, out_w));
    }
    let (h, w, c) = (img.height(), img.width(), img.channels());
    let values = resize_raw(&img.values, h, w, c, out_h, out_w);
    Ok(ImageTensor::new(img.space, values))
}

fn resize_raw(
    values: &Array3<f64>,
    h: usize,
    w: usize,
    c: usize,
    out_h: usize,
    out_w: usize,
) -> Array3<f64> {
    let scale_y = h as f64 / out_h as f64;
    let scale_x = w as f64 / out_w as f64;
    let mut out = Array3::zeros((out_h, out_w, c));
    for oy in 0..out_h {
        let sy = ((oy as f64 + 0.5) * scale_y - 0.5).clamp(0.0, (h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let fy = sy - y0 as f64;
        for ox in 0..out_w {
            let sx = ((ox as f64 + 0.5) * scale_x - 0.5).clamp(0.0, (w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let fx = sx - x0 as f64;
            for ch in 0..c {
                let top = values[[y0, x0, ch]] * (1.0 - fx) + values[[y0, x1, ch]] * fx;
                let bot = values[[y1, x0, ch]] * (1.0 - fx) + values[[y1, x1, ch]] * fx;
                out[[oy, ox, ch]] = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    out
}

/// Full preprocessing: convert an RGB01 image into `target` space, scale
/// each channel to [0, 1] by its nominal range, bilinear-resize, then map
/// onto [−π, π]. The scale and angle halves sandwich the resize so
/// interpolation always happens on unit-range data.
pub fn to_angle_tensor(
    rgb01: &ImageTensor,
    target: ColorSpace,
    out_h: usize,
    out_w: usize,
) -> Result<ImageTensor, ColorError> {
    if out_h == 0 || out_w == 0 {
        return Err(ColorError::ZeroTargetDims(out_h, out_w));
    }
    let converted = match target {
        ColorSpace::Rgb01 => {
            rgb01.expect_space(ColorSpace::Rgb01)?;
            rgb01.check_in_range(0.0)?;
            rgb01.clone()
        }
        ColorSpace::Lab => rgb_to_lab(rgb01)?,
        ColorSpace::Ycbcr => rgb_to_ycbcr(rgb01)?,
        ColorSpace::Angles => {
            return Err(ColorError::WrongSpace {
                expected: ColorSpace::Rgb01,
                got: ColorSpace::Angles,
            })
        }
    };
    converted.check_in_range(RANGE_SLACK)?;
    let (h, w, c) = (
        converted.height(),
        converted.width(),
        converted.channels(),
    );
    let mut unit = converted.values.clone();
    for ((_, _, ch), v) in unit.indexed_iter_mut() {
        let (lo, hi) = target.nominal_range(ch);
        *v = ((*v - lo) / (hi - lo)).clamp(0.0, 1.0);
    }
    let resized = resize_raw(&unit, h, w, c, out_h, out_w);
    let angles = resized.mapv(|u| 2.0 * PI * u - PI);
    Ok(ImageTensor::new(ColorSpace::Angles, angles))
}

#[cfg(test)]
mod tests {
    use ndarray::Array3;
    use proptest::prelude::*;

    use super::*;

    fn pixel(space: ColorSpace, v: [f64; 3]) -> ImageTensor {
        ImageTensor::new(
            space,
            Array3::from_shape_vec((1, 1, 3), v.to_vec()).unwrap(),
        )
    }

    fn lab_of(v: [f64; 3]) -> [f64; 3] {
        let out = rgb_to_lab(&pixel(ColorSpace::Rgb01, v)).unwrap();
        [out.get(0, 0, 0), out.get(0, 0, 1), out.get(0, 0, 2)]
    }

    fn ycbcr_of(v: [f64; 3]) -> [f64; 3] {
        let out = rgb_to_ycbcr(&pixel(ColorSpace::Rgb01, v)).unwrap();
        [out.get(0, 0, 0), out.get(0, 0, 1), out.get(0, 0, 2)]
    }

    #[test]
    fn lab_anchors() {
        let white = lab_of([1.0, 1.0, 1.0]);
        assert!((white[0] - 100.0).abs() < 1e-3);
        assert!(white[1].abs() < 0.01 && white[2].abs() < 0.01);

        let black = lab_of([0.0, 0.0, 0.0]);
        assert!(black.iter().all(|v| v.abs() < 1e-9));

        // Frozen from an independent evaluation of the published formulas.
        let red = lab_of([1.0, 0.0, 0.0]);
        assert!((red[0] - 53.240794141).abs() < 1e-6);
        assert!((red[1] - 80.092459596).abs() < 1e-6);
        assert!((red[2] - 67.203196516).abs() < 1e-6);

        let green = lab_of([0.0, 1.0, 0.0]);
        assert!((green[0] - 87.734722353).abs() < 1e-6);
        assert!((green[1] + 86.182716421).abs() < 1e-6);
        assert!((green[2] - 83.179320503).abs() < 1e-6);

        let blue = lab_of([0.0, 0.0, 1.0]);
        assert!((blue[0] - 32.297010933).abs() < 1e-6);
        assert!((blue[1] - 79.187519845).abs() < 1e-6);
        assert!((blue[2] + 107.860161754).abs() < 1e-6);

        let teal = lab_of([0.2, 0.6, 0.7]);
        assert!((teal[0] - 58.712715761).abs() < 1e-6);
        assert!((teal[1] + 20.539289338).abs() < 1e-6);
        assert!((teal[2] + 21.725456764).abs() < 1e-6);
    }

    #[test]
    fn ycbcr_anchors() {
        assert_eq!(ycbcr_of([0.0, 0.0, 0.0]), [16.0, 128.0, 128.0]);
        let white = ycbcr_of([1.0, 1.0, 1.0]);
        assert!((white[0] - 235.0).abs() < 1e-9);
        assert!((white[1] - 128.0).abs() < 1e-9);
        assert!((white[2] - 128.0).abs() < 1e-9);

        let red = ycbcr_of([1.0, 0.0, 0.0]);
        assert!((red[0] - 81.481).abs() < 1e-9);
        assert!((red[1] - 90.203).abs() < 1e-9);
        assert!((red[2] - 240.0).abs() < 1e-9);

        let teal = ycbcr_of([0.2, 0.6, 0.7]);
        assert!((teal[0] - 123.7042).abs() < 1e-9);
        assert!((teal[1] - 154.3188).abs() < 1e-9);
        assert!((teal[2] - 81.3786).abs() < 1e-9);
    }

    #[test]
    fn gray_has_neutral_chroma() {
        // Chroma coefficients sum to zero, so gray is neutral; rounding of
        // the coefficient constants leaves ~1e-13 residue except at 0.5,
        // which lands on 128.0 exactly.
        for g in [0.1, 0.25, 0.5, 0.8] {
            let lab = lab_of([g, g, g]);
            assert!(lab[1].abs() < 1e-4 && lab[2].abs() < 1e-4, "gray {g}");
            let ycc = ycbcr_of([g, g, g]);
            assert!((ycc[1] - 128.0).abs() < 1e-12, "gray {g}");
            assert!((ycc[2] - 128.0).abs() < 1e-12, "gray {g}");
        }
        assert_eq!(ycbcr_of([0.5, 0.5, 0.5]), [125.5, 128.0, 128.0]);
    }

    #[test]
    fn conversions_reject_out_of_range() {
        let img = pixel(ColorSpace::Rgb01, [1.2, 0.0, 0.0]);
        assert!(matches!(
            rgb_to_lab(&img),
            Err(ColorError::OutOfRange { channel: 0, .. })
        ));
        let lab = pixel(ColorSpace::Lab, [50.0, 0.0, 0.0]);
        assert!(matches!(
            rgb_to_ycbcr(&lab),
            Err(ColorError::WrongSpace { .. })
        ));
    }

    #[test]
    fn angle_map_anchors() {
        let rgb = normalize_to_angles(&pixel(ColorSpace::Rgb01, [0.5, 0.0, 1.0])).unwrap();
        assert!(rgb.get(0, 0, 0).abs() < 1e-12);
        assert!((rgb.get(0, 0, 1) + PI).abs() < 1e-12);
        assert!((rgb.get(0, 0, 2) - PI).abs() < 1e-12);

        let lab = normalize_to_angles(&pixel(ColorSpace::Lab, [0.0, -128.0, 127.0])).unwrap();
        assert!((lab.get(0, 0, 0) + PI).abs() < 1e-12);
        let lab_high = normalize_to_angles(&pixel(ColorSpace::Lab, [100.0, 0.0, 0.0])).unwrap();
        assert!((lab_high.get(0, 0, 0) - PI).abs() < 1e-12);

        let ycc = normalize_to_angles(&pixel(ColorSpace::Ycbcr, [125.5, 16.0, 240.0])).unwrap();
        assert!(ycc.get(0, 0, 0).abs() < 1e-12);
        assert!((ycc.get(0, 0, 1) + PI).abs() < 1e-12);
        assert!((ycc.get(0, 0, 2) - PI).abs() < 1e-12);
    }

    #[test]
    fn pure_white_survives_the_lab_pipeline() {
        // White converts to L fractionally above 100 (conversion-matrix
        // roundoff); the pipeline must clamp it, not reject the image.
        let white = ImageTensor::new(
            ColorSpace::Rgb01,
            Array3::from_elem((4, 4, 3), 1.0),
        );
        let angles = to_angle_tensor(&white, ColorSpace::Lab, 4, 4).unwrap();
        assert!((angles.get(0, 0, 0) - PI).abs() < 1e-3);
    }

    #[test]
    fn angle_map_slack_and_rejection() {
        let slightly_low = pixel(ColorSpace::Rgb01, [-5e-7, 0.5, 0.5]);
        let out = normalize_to_angles(&slightly_low).unwrap();
        assert!((out.get(0, 0, 0) + PI).abs() < 1e-12);

        let far_out = pixel(ColorSpace::Rgb01, [-0.01, 0.5, 0.5]);
        assert!(matches!(
            normalize_to_angles(&far_out),
            Err(ColorError::OutOfRange { .. })
        ));
    }

    #[test]
    fn resize_identity_and_constant() {
        let img = ImageTensor::new(
            ColorSpace::Rgb01,
            Array3::from_shape_fn((4, 5, 3), |(y, x, c)| {
                (y as f64 * 0.1 + x as f64 * 0.05 + c as f64 * 0.02).min(1.0)
            }),
        );
        let same = bilinear_resize(&img, 4, 5).unwrap();
        assert_eq!(same.values(), img.values());

        let constant = ImageTensor::new(
            ColorSpace::Rgb01,
            Array3::from_elem((6, 6, 1), 0.37),
        );
        let shrunk = bilinear_resize(&constant, 2, 3).unwrap();
        for v in shrunk.values() {
            assert!((v - 0.37).abs() < 1e-15);
        }
    }

    #[test]
    fn resize_two_by_two_to_three_by_three() {
        let img = ImageTensor::new(
            ColorSpace::Rgb01,
            Array3::from_shape_vec((2, 2, 1), vec![0.0, 1.0, 2.0, 3.0]).unwrap(),
        );
        let out = bilinear_resize(&img, 3, 3).unwrap();
        // Frozen from hand-evaluating the half-pixel formula.
        let want = [
            [0.0, 0.5, 1.0],
            [1.0, 1.5, 2.0],
            [2.0, 2.5, 3.0],
        ];
        for y in 0..3 {
            for x in 0..3 {
                assert!(
                    (out.get(y, x, 0) - want[y][x]).abs() < 1e-9,
                    "({y},{x}): {}",
                    out.get(y, x, 0)
                );
            }
        }
    }

    #[test]
    fn resize_rejects_zero_dims() {
        let img = pixel(ColorSpace::Rgb01, [0.0, 0.0, 0.0]);
        assert!(matches!(
            bilinear_resize(&img, 0, 3),
            Err(ColorError::ZeroTargetDims(0, 3))
        ));
    }

    #[test]
    fn pipeline_matches_componentwise_path_without_resize() {
        let img = ImageTensor::new(
            ColorSpace::Rgb01,
            Array3::from_shape_fn((3, 3, 3), |(y, x, c)| {
                ((y * 3 + x) as f64 / 10.0 + c as f64 * 0.01).min(1.0)
            }),
        );
        let direct = normalize_to_angles(&rgb_to_lab(&img).unwrap()).unwrap();
        let pipeline = to_angle_tensor(&img, ColorSpace::Lab, 3, 3).unwrap();
        for (a, b) in direct.values().iter().zip(pipeline.values().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn channel_extraction() {
        let img = pixel(ColorSpace::Lab, [50.0, 10.0, -20.0]);
        let a = img.channel(1).unwrap();
        assert_eq!(a.channels(), 1);
        assert_eq!(a.get(0, 0, 0), 10.0);
        assert!(matches!(
            img.channel(3),
            Err(ColorError::ChannelOutOfRange { index: 3, .. })
        ));
    }

    // Test-only LAB→RGB inverse. The XYZ→RGB matrix is the exact adjugate
    // inverse of the forward matrix, not the published rounded inverse,
    // so the round-trip isolates genuine conversion error.
    fn lab_to_rgb_pixel(l: f64, a: f64, b: f64) -> (f64, f64, f64) {
        const DELTA: f64 = 6.0 / 29.0;
        let finv = |t: f64| {
            if t > DELTA {
                t * t * t
            } else {
                3.0 * DELTA * DELTA * (t - 4.0 / 29.0)
            }
        };
        let fy = (l + 16.0) / 116.0;
        let fx = fy + a / 500.0;
        let fz = fy - b / 200.0;
        let xyz = [
            D65_WHITE[0] * finv(fx),
            D65_WHITE[1] * finv(fy),
            D65_WHITE[2] * finv(fz),
        ];
        let m = &SRGB_TO_XYZ;
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let inv = [
            [
                (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
                (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
                (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
            ],
            [
                (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
                (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
                (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det,
            ],
            [
                (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
                (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
                (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det,
            ],
        ];
        let gamma = |c: f64| {
            if c <= 0.0031308 {
                12.92 * c
            } else {
                1.055 * c.powf(1.0 / 2.4) - 0.055
            }
        };
        let lin = |row: [f64; 3]| row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2];
        (gamma(lin(inv[0])), gamma(lin(inv[1])), gamma(lin(inv[2])))
    }

    proptest! {
        #[test]
        fn lab_round_trips_in_gamut(r in 0.0..=1.0f64, g in 0.0..=1.0f64, b in 0.0..=1.0f64) {
            let [l, la, lb] = lab_of([r, g, b]);
            let (rr, rg, rb) = lab_to_rgb_pixel(l, la, lb);
            prop_assert!((rr - r).abs() < 1e-6);
            prop_assert!((rg - g).abs() < 1e-6);
            prop_assert!((rb - b).abs() < 1e-6);
        }

        #[test]
        fn angle_map_is_invertible(v in 0.0..=1.0f64, ch in 0usize..3) {
            let (lo, hi) = ColorSpace::Ycbcr.nominal_range(ch);
            let raw = lo + v * (hi - lo);
            let mut px = [125.5, 128.0, 128.0];
            px[ch] = raw;
            let angles = normalize_to_angles(&pixel(ColorSpace::Ycbcr, px)).unwrap();
            let theta = angles.get(0, 0, ch);
            let recovered = lo + (theta + PI) / (2.0 * PI) * (hi - lo);
            prop_assert!((recovered - raw).abs() < 1e-12 * (hi - lo).max(1.0));
        }

        #[test]
        fn resize_preserves_bounds(
            seed in 0u64..1000,
            oh in 1usize..9,
            ow in 1usize..9,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let values = Array3::from_shape_fn((5, 4, 2), |_| rng.gen_range(-3.0..3.0));
            let img = ImageTensor::new(ColorSpace::Angles, values);
            let lo = img.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = img.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let out = bilinear_resize(&img, oh, ow).unwrap();
            for v in out.values() {
                prop_assert!(*v >= lo - 1e-12 && *v <= hi + 1e-12);
            }
        }
    }
}
