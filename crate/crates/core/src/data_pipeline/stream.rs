use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{DetectionFrame, WireFrame};

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub frames: Vec<DetectionFrame>,
    pub skipped: Vec<SkippedLine>,
}

impl IngestReport {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Parses a frame log from any reader. Malformed lines are skipped and
/// reported with 1-based line numbers; a timestamp that does not increase
/// within one source is an error. Frames come back in timestamp order.
pub fn read_frames(reader: impl BufRead) -> Result<IngestReport> {
    let mut report = IngestReport::default();
    let mut last_t: BTreeMap<String, f64> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io("<frame stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: WireFrame = match serde_json::from_str(&line) {
            Ok(w) => w,
            Err(e) => {
                report.skipped.push(SkippedLine {
                    line: line_no,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        if let Err(reason) = wire.check() {
            report.skipped.push(SkippedLine {
                line: line_no,
                reason,
            });
            continue;
        }
        if let Some(&prev) = last_t.get(&wire.source) {
            if wire.t <= prev {
                return Err(Error::NonMonotoneTimestamp {
                    source_id: wire.source,
                    previous: prev,
                    current: wire.t,
                });
            }
        }
        last_t.insert(wire.source.clone(), wire.t);
        report.frames.push(wire.into_frame());
    }
    report
        .frames
        .sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(report)
}

pub fn ingest_stream(path: impl AsRef<Path>) -> Result<IngestReport> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_frames(BufReader::new(file))
}

/// Writes one JSON object per line. Every object must carry a track id.
pub fn write_frames<'a>(
    mut w: impl Write,
    frames: impl IntoIterator<Item = &'a DetectionFrame>,
) -> Result<()> {
    for f in frames {
        if f.objects.iter().any(|d| d.object.track_id.is_none()) {
            return Err(Error::MissingTrackId(f.timestamp));
        }
        writeln!(w, "{}", f.to_json_line()).map_err(|e| Error::io("<frame sink>", e))?;
    }
    w.flush().map_err(|e| Error::io("<frame sink>", e))
}

/// Exports associated frames to `path`. Nothing is written if any object
/// lacks a track id.
pub fn export_unified(frames: &[DetectionFrame], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(f) = frames
        .iter()
        .find(|f| f.objects.iter().any(|d| d.object.track_id.is_none()))
    {
        return Err(Error::MissingTrackId(f.timestamp));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_frames(BufWriter::new(file), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_pipeline::Detection;
    use crate::sim_kernel::{ObjectClass, ObjectState};

    fn line(t: f64) -> String {
        format!(
            r#"{{"t":{t},"source":"iu1","objects":[{{"id":"a","class":"car","x":1,"y":2,"z":0,"yaw":0.1,"l":4.5,"w":1.8,"h":1.5,"speed":3,"conf":0.9}}]}}"#
        )
    }

    #[test]
    fn empty_input() {
        let r = read_frames("".as_bytes()).unwrap();
        assert!(r.frames.is_empty());
        assert_eq!(r.skipped_count(), 0);
    }

    #[test]
    fn malformed_lines_skipped_with_line_numbers() {
        let text = format!("{}\n{{not json\n{}\n{}\n", line(0.1), line(0.2), line(0.3));
        let r = read_frames(text.as_bytes()).unwrap();
        assert_eq!(r.frames.len(), 3);
        assert_eq!(r.skipped_count(), 1);
        assert_eq!(r.skipped[0].line, 2);
    }

    #[test]
    fn out_of_range_confidence_is_malformed() {
        let bad = line(0.1).replace("0.9", "1.5");
        let r = read_frames(bad.as_bytes()).unwrap();
        assert_eq!(r.skipped_count(), 1);
    }

    #[test]
    fn non_monotone_timestamps_error() {
        let text = format!("{}\n{}\n", line(1.0), line(0.9));
        match read_frames(text.as_bytes()) {
            Err(Error::NonMonotoneTimestamp { previous, current, .. }) => {
                assert_eq!((previous, current), (1.0, 0.9));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn export_requires_ids() {
        let mut f = DetectionFrame::new(0.5, "s");
        f.objects.push(Detection::certain(ObjectState::new(ObjectClass::Car)));
        let mut buf = Vec::new();
        assert!(matches!(write_frames(&mut buf, [&f]), Err(Error::MissingTrackId(t)) if t == 0.5));
    }

    #[test]
    fn empty_export_is_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.ndjson");
        export_unified(&[], &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap().len(), 0);
    }
}
