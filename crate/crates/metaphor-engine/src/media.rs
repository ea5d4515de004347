//! Frame selection and encoding.
//!
//! Models receive frames as inline base64 images. Frame *extraction*
//! from raw video is delegated to an external command; this module only
//! selects, reads, and encodes already-extracted frame files.

use std::path::{Path, PathBuf};
use std::process::Command;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use sha2::Digest as _;
use thiserror::Error;

use crate::backend::ImagePayload;

#[derive(Debug, Error)]
pub enum MediaError {
    #[error("frame file {0}: {1}")]
    Frame(PathBuf, std::io::Error),

    #[error("no frames found in {0}")]
    NoFrames(PathBuf),

    #[error("frame sampler not configured and {0} is not a frame directory")]
    NoSampler(PathBuf),

    #[error("frame sampler exited with {status}: {output}")]
    SamplerFailed { status: i32, output: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Pick at most `max` items at evenly spaced positions, preserving order.
pub fn evenly_spaced<T: Clone>(items: &[T], max: usize) -> Vec<T> {
    if max == 0 || items.is_empty() {
        return Vec::new();
    }
    if items.len() <= max {
        return items.to_vec();
    }
    (0..max).map(|i| items[i * items.len() / max].clone()).collect()
}

fn mime_for(path: &Path) -> &'static str {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("jpg") | Some("jpeg") => "image/jpeg",
        Some("png") => "image/png",
        Some("webp") => "image/webp",
        _ => "application/octet-stream",
    }
}

/// Read and base64-encode up to `max_frames` evenly spaced frames.
pub fn load_frames(paths: &[PathBuf], max_frames: usize) -> Result<Vec<ImagePayload>, MediaError> {
    evenly_spaced(paths, max_frames)
        .into_iter()
        .map(|path| {
            let bytes = std::fs::read(&path).map_err(|e| MediaError::Frame(path.clone(), e))?;
            Ok(ImagePayload {
                mime: mime_for(&path).to_string(),
                base64: BASE64.encode(bytes),
            })
        })
        .collect()
}

/// External frame-extraction command. `{input}` and `{outdir}` in the
/// template expand to the video reference and the destination directory.
#[derive(Clone, Debug, Default)]
pub struct FrameSampler {
    pub command: Option<String>,
    pub max_frames: usize,
}

/// Resolve a video reference into at most `max_frames` evenly spaced
/// frame paths.
///
/// A directory of frame images is used as-is; anything else is handed to
/// the configured external sampler command first.
pub fn prepare_frames(video_ref: &str, sampler: &FrameSampler) -> Result<Vec<PathBuf>, MediaError> {
    let source = Path::new(video_ref);
    let frame_dir: PathBuf = if source.is_dir() {
        source.to_path_buf()
    } else {
        let Some(command) = &sampler.command else {
            return Err(MediaError::NoSampler(source.to_path_buf()));
        };
        let outdir = std::env::temp_dir().join(format!(
            "frames-{}",
            hex::encode(&sha2::Sha256::digest(video_ref.as_bytes())[..8])
        ));
        std::fs::create_dir_all(&outdir)?;
        let outdir_str = outdir.display().to_string();
        let argv: Vec<String> = command
            .split_whitespace()
            .map(|tok| {
                tok.replace("{input}", video_ref)
                    .replace("{outdir}", &outdir_str)
            })
            .collect();
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| MediaError::NoSampler(source.to_path_buf()))?;
        let output = Command::new(program).args(args).output()?;
        if !output.status.success() {
            let mut combined = String::from_utf8_lossy(&output.stdout).to_string();
            combined.push_str(&String::from_utf8_lossy(&output.stderr));
            return Err(MediaError::SamplerFailed {
                status: output.status.code().unwrap_or(-1),
                output: combined.chars().take(500).collect(),
            });
        }
        outdir
    };

    let mut frames: Vec<PathBuf> = std::fs::read_dir(&frame_dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    frames.sort();
    if frames.is_empty() {
        return Err(MediaError::NoFrames(frame_dir));
    }
    Ok(evenly_spaced(&frames, sampler.max_frames))
}
