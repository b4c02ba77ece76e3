//! MNIST IDX files and the 20x20 training set built from them.
//!
//! Images: big-endian `u32` magic `0x00000803`, count, rows, cols, then
//! `count * rows * cols` pixel bytes row-major. Labels: magic `0x00000801`,
//! count, then one byte per label. Files may be gzip-compressed as
//! distributed; [`read_idx_file`] inflates them transparently.

use std::fs;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use ndarray::Array2;
use rand::Rng;
use thiserror::Error;

use crate::nn::{Dataset, NetError, NetworkShape};
use crate::scalar::Scalar;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const IMAGE_SIDE: usize = 28;
/// First row/column kept by the center crop.
pub const CROP_OFFSET: usize = 4;
pub const CROP_SIDE: usize = 20;

#[derive(Debug, Error)]
pub enum IdxError {
    #[error("bad magic at offset 0: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },
    #[error("truncated input: need {needed} bytes, stream ends at byte offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("{extra} trailing bytes after offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("images are {rows}x{cols}, expected {expected}x{expected}")]
    ImageSize {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("{images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("label {label} at index {index} is not a digit")]
    LabelOutOfRange { index: usize, label: u8 },
    #[error("requested {requested} examples but only {available} are available")]
    SubsetTooLarge { requested: usize, available: usize },
    #[error("synthetic dataset needs m >= {classes}, got {m}")]
    TooFewExamples { m: usize, classes: usize },
    #[error("separability must be in [0, 1], got {0}")]
    InvalidSeparability(f64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Images and labels as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMnist {
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` bytes, row-major per image.
    pub pixels: Vec<u8>,
    pub labels: Vec<u8>,
}

impl RawMnist {
    pub fn new(images: IdxImages, labels: Vec<u8>) -> Result<Self, IdxError> {
        if images.count != labels.len() {
            return Err(IdxError::CountMismatch {
                images: images.count,
                labels: labels.len(),
            });
        }
        if let Some(index) = labels.iter().position(|&l| l > 9) {
            return Err(IdxError::LabelOutOfRange {
                index,
                label: labels[index],
            });
        }
        Ok(Self {
            rows: images.rows,
            cols: images.cols,
            pixels: images.pixels,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, index: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[index * size..(index + 1) * size]
    }

    /// Reads an images file and a labels file (plain or gzip).
    pub fn load(images: &Path, labels: &Path) -> Result<Self, IdxError> {
        let images = parse_idx_images(&read_idx_file(images)?)?;
        let labels = parse_idx_labels(&read_idx_file(labels)?)?;
        Self::new(images, labels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, IdxError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or(IdxError::Truncated {
            offset: bytes.len(),
            needed: offset + 4,
        })
}

fn payload(bytes: &[u8], header: usize, len: usize) -> Result<&[u8], IdxError> {
    let needed = header + len;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            offset: bytes.len(),
            needed,
        });
    }
    if bytes.len() > needed {
        return Err(IdxError::TrailingBytes {
            offset: needed,
            extra: bytes.len() - needed,
        });
    }
    Ok(&bytes[header..])
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages, IdxError> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(IdxError::BadMagic {
            expected: IMAGE_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let pixels = payload(bytes, 16, count * rows * cols)?.to_vec();
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels,
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    let magic = read_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(IdxError::BadMagic {
            expected: LABEL_MAGIC,
            found: magic,
        });
    }
    let count = read_u32(bytes, 4)? as usize;
    Ok(payload(bytes, 8, count)?.to_vec())
}

pub fn write_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [
        IMAGE_MAGIC,
        images.count as u32,
        images.rows as u32,
        images.cols as u32,
    ] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn write_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// File contents, gunzipped when the gzip magic is present.
pub fn read_idx_file(path: &Path) -> Result<Vec<u8>, IdxError> {
    let io = |source| IdxError::Io {
        path: path.display().to_string(),
        source,
    };
    let raw = fs::read(path).map_err(io)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(io)?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

/// Center 20x20 crop (rows and columns 4..=23), row-major.
pub fn crop_center(image: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(CROP_SIDE * CROP_SIDE);
    for r in CROP_OFFSET..CROP_OFFSET + CROP_SIDE {
        let start = r * IMAGE_SIDE + CROP_OFFSET;
        out.extend_from_slice(&image[start..start + CROP_SIDE]);
    }
    out
}

/// First `subset_m` examples in file order, cropped to 20x20 and scaled
/// into `[0, 1]`.
pub fn to_dataset<T: Scalar>(raw: &RawMnist, subset_m: usize) -> Result<Dataset<T>, IdxError> {
    if raw.rows != IMAGE_SIDE || raw.cols != IMAGE_SIDE {
        return Err(IdxError::ImageSize {
            rows: raw.rows,
            cols: raw.cols,
            expected: IMAGE_SIDE,
        });
    }
    if subset_m > raw.len() {
        return Err(IdxError::SubsetTooLarge {
            requested: subset_m,
            available: raw.len(),
        });
    }
    let features = CROP_SIDE * CROP_SIDE;
    let scale = T::lit(1.0 / 255.0);
    let mut x = Array2::<T>::zeros((subset_m, features));
    for (i, mut row) in x.rows_mut().into_iter().enumerate() {
        for (dst, &px) in row.iter_mut().zip(&crop_center(raw.image(i))) {
            *dst = T::lit(px as f64) * scale;
        }
    }
    let labels = raw.labels[..subset_m].iter().map(|&l| l as usize).collect();
    Ok(Dataset::new(x, labels, 10)?)
}

/// Class-conditional clusters for tests that should not need MNIST.
///
/// Each class gets a random binary prototype. Example `i` has class
/// `i % output` and features `s * prototype + (1 - s) * noise`, with noise
/// uniform in `[0, 1]` and `s` the separability.
pub fn synthetic_dataset<T: Scalar, R: Rng + ?Sized>(
    m: usize,
    shape: NetworkShape,
    separability: f64,
    rng: &mut R,
) -> Result<Dataset<T>, IdxError> {
    shape.validate()?;
    if m < shape.output {
        return Err(IdxError::TooFewExamples {
            m,
            classes: shape.output,
        });
    }
    if !(0.0..=1.0).contains(&separability) {
        return Err(IdxError::InvalidSeparability(separability));
    }
    let prototypes: Vec<Vec<f64>> = (0..shape.output)
        .map(|_| {
            (0..shape.input)
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let mut x = Array2::<T>::zeros((m, shape.input));
    let mut labels = Vec::with_capacity(m);
    for (i, mut row) in x.rows_mut().into_iter().enumerate() {
        let class = i % shape.output;
        for (dst, &p) in row.iter_mut().zip(&prototypes[class]) {
            let noise: f64 = rng.random_range(0.0..=1.0);
            *dst = T::lit((separability * p + (1.0 - separability) * noise).clamp(0.0, 1.0));
        }
        labels.push(class);
    }
    Ok(Dataset::new(x, labels, shape.output)?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn image_file(count: u32, pixels: usize) -> Vec<u8> {
        let mut bytes = Vec::new();
        for v in [IMAGE_MAGIC, count, 28, 28] {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        bytes.extend((0..pixels).map(|i| (i % 251) as u8));
        bytes
    }

    #[test]
    fn parses_single_image() {
        let img = parse_idx_images(&image_file(1, 784)).unwrap();
        assert_eq!((img.count, img.rows, img.cols), (1, 28, 28));
        assert_eq!(img.pixels.len(), 784);
        assert_eq!(img.pixels[300], (300 % 251) as u8);
    }

    #[test]
    fn parses_labels() {
        let bytes = [0, 0, 8, 1, 0, 0, 0, 1, 7];
        assert_eq!(parse_idx_labels(&bytes).unwrap(), vec![7]);
    }

    #[test]
    fn truncated_images() {
        match parse_idx_images(&image_file(1, 783)) {
            Err(IdxError::Truncated { offset, needed }) => {
                assert_eq!(offset, 16 + 783);
                assert_eq!(needed, 16 + 784);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_idx_images(&[0, 0, 8]),
            Err(IdxError::Truncated { .. })
        ));
    }

    #[test]
    fn wrong_magic() {
        let bytes = [0, 0, 8, 1, 0, 0, 0, 1, 7];
        assert!(matches!(
            parse_idx_images(&bytes),
            Err(IdxError::BadMagic {
                expected: IMAGE_MAGIC,
                found: LABEL_MAGIC
            })
        ));
        assert!(matches!(
            parse_idx_labels(&image_file(1, 784)),
            Err(IdxError::BadMagic { .. })
        ));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let bytes = [0, 0, 8, 1, 0, 0, 0, 1, 7, 9];
        assert!(matches!(
            parse_idx_labels(&bytes),
            Err(IdxError::TrailingBytes {
                offset: 9,
                extra: 1
            })
        ));
    }

    #[test]
    fn count_mismatch() {
        let img = parse_idx_images(&image_file(2, 2 * 784)).unwrap();
        assert!(matches!(
            RawMnist::new(img.clone(), vec![1]),
            Err(IdxError::CountMismatch { .. })
        ));
        assert!(matches!(
            RawMnist::new(img, vec![1, 10]),
            Err(IdxError::LabelOutOfRange { index: 1, .. })
        ));
    }

    fn raw_from(images: Vec<Vec<u8>>, labels: Vec<u8>) -> RawMnist {
        let count = images.len();
        RawMnist::new(
            IdxImages {
                count,
                rows: 28,
                cols: 28,
                pixels: images.concat(),
            },
            labels,
        )
        .unwrap()
    }

    #[test]
    fn crop_examples() {
        let mut single = vec![0u8; 784];
        single[4 * 28 + 4] = 255;
        let raw = raw_from(vec![vec![0u8; 784], single], vec![3, 5]);
        let d: Dataset<f64> = to_dataset(&raw, 2).unwrap();
        assert_eq!(d.features().dim(), (2, 400));
        assert!(d.features().row(0).iter().all(|&v| v == 0.0));
        assert_eq!(d.features()[[1, 0]], 1.0);
        assert_eq!(d.features().row(1).iter().filter(|&&v| v != 0.0).count(), 1);
        assert_eq!(d.labels(), &[3, 5]);
        assert_eq!(d.targets()[[1, 5]], 1.0);
        assert!(matches!(
            to_dataset::<f64>(&raw, 3),
            Err(IdxError::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn synthetic_contract() {
        let shape = NetworkShape::new(16, 5, 10).unwrap();
        let a: Dataset<f64> =
            synthetic_dataset(10, shape, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b: Dataset<f64> =
            synthetic_dataset(10, shape, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.labels(), &(0..10).collect::<Vec<_>>()[..]);
        assert!(a.features().iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(matches!(
            synthetic_dataset::<f64, _>(9, shape, 1.0, &mut ChaCha8Rng::seed_from_u64(1)),
            Err(IdxError::TooFewExamples { m: 9, classes: 10 })
        ));
        assert!(
            synthetic_dataset::<f64, _>(10, shape, 1.5, &mut ChaCha8Rng::seed_from_u64(1)).is_err()
        );
    }
}
