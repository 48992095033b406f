//! Minimal single-font PDF writer and a validator that re-reads the output.
//!
//! Layout: US Letter, Courier 10 pt, 54 lines per page, 90 columns.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub const PAGE_WIDTH: u32 = 612;
pub const PAGE_HEIGHT: u32 = 792;
pub const LINES_PER_PAGE: usize = 54;
pub const WRAP_COLUMNS: usize = 90;
const FONT_SIZE: u32 = 10;
const LEADING: u32 = 13;
const MARGIN: u32 = 54;

/// Splits text into lines and hard-wraps each at [`WRAP_COLUMNS`].
/// Non-ASCII characters become `?`.
pub fn wrap_lines(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let chars: Vec<char> = line
            .chars()
            .map(|c| {
                if c.is_ascii() && !c.is_ascii_control() {
                    c
                } else if c == '\t' {
                    ' '
                } else {
                    '?'
                }
            })
            .collect();
        if chars.is_empty() {
            out.push(String::new());
            continue;
        }
        for chunk in chars.chunks(WRAP_COLUMNS) {
            out.push(chunk.iter().collect());
        }
    }
    out
}

fn escape(line: &str) -> String {
    let mut s = String::with_capacity(line.len());
    for c in line.chars() {
        if matches!(c, '(' | ')' | '\\') {
            s.push('\\');
        }
        s.push(c);
    }
    s
}

fn content_stream(lines: &[String]) -> String {
    let mut s = format!(
        "BT\n/F1 {FONT_SIZE} Tf\n{LEADING} TL\n{MARGIN} {} Td\n",
        PAGE_HEIGHT - MARGIN
    );
    for line in lines {
        s.push('(');
        s.push_str(&escape(line));
        s.push_str(") Tj T*\n");
    }
    s.push_str("ET\n");
    s
}

/// Renders `text` as PDF bytes. Always produces at least one page.
pub fn render_pdf(text: &str) -> Vec<u8> {
    let lines = wrap_lines(text);
    let pages: Vec<&[String]> = if lines.is_empty() {
        vec![&[][..]]
    } else {
        lines.chunks(LINES_PER_PAGE).collect()
    };
    let n_pages = pages.len();
    // 1 catalog, 2 page tree, 3 font, then (page, content) pairs.
    let page_id = |i: usize| 4 + 2 * i;
    let total = 3 + 2 * n_pages;

    let mut bodies: Vec<Vec<u8>> = Vec::with_capacity(total);
    bodies.push(b"<< /Type /Catalog /Pages 2 0 R >>".to_vec());
    let kids: Vec<String> = (0..n_pages).map(|i| format!("{} 0 R", page_id(i))).collect();
    bodies.push(format!("<< /Type /Pages /Kids [{}] /Count {n_pages} >>", kids.join(" ")).into_bytes());
    bodies.push(b"<< /Type /Font /Subtype /Type1 /BaseFont /Courier >>".to_vec());
    for (i, page_lines) in pages.iter().enumerate() {
        bodies.push(
            format!(
                "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 {PAGE_WIDTH} {PAGE_HEIGHT}] \
                 /Resources << /Font << /F1 3 0 R >> >> /Contents {} 0 R >>",
                page_id(i) + 1
            )
            .into_bytes(),
        );
        let stream = content_stream(page_lines);
        let mut obj = format!("<< /Length {} >>\nstream\n", stream.len()).into_bytes();
        obj.extend_from_slice(stream.as_bytes());
        obj.extend_from_slice(b"endstream");
        bodies.push(obj);
    }

    let mut out = b"%PDF-1.4\n".to_vec();
    let mut offsets = Vec::with_capacity(total);
    for (i, body) in bodies.iter().enumerate() {
        offsets.push(out.len());
        out.extend_from_slice(format!("{} 0 obj\n", i + 1).as_bytes());
        out.extend_from_slice(body);
        out.extend_from_slice(b"\nendobj\n");
    }
    let xref = out.len();
    out.extend_from_slice(format!("xref\n0 {}\n0000000000 65535 f \n", total + 1).as_bytes());
    for off in offsets {
        out.extend_from_slice(format!("{off:010} 00000 n \n").as_bytes());
    }
    out.extend_from_slice(
        format!(
            "trailer\n<< /Size {} /Root 1 0 R >>\nstartxref\n{xref}\n%%EOF\n",
            total + 1
        )
        .as_bytes(),
    );
    out
}

pub fn export_pdf(text: &str, path: &Path) -> std::io::Result<()> {
    fs::write(path, render_pdf(text))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdfError {
    #[error("missing %PDF- header")]
    Header,
    #[error("missing or malformed startxref")]
    StartXref,
    #[error("xref table malformed: {0}")]
    Xref(String),
    #[error("object {id} offset {offset} does not point at its header")]
    Offset { id: usize, offset: usize },
    #[error("trailer inconsistent: {0}")]
    Trailer(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdfInfo {
    pub objects: usize,
    pub pages: usize,
}

fn find_last(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).rposition(|w| w == needle)
}

fn count(hay: &[u8], needle: &[u8]) -> usize {
    hay.windows(needle.len()).filter(|w| *w == needle).count()
}

/// Re-reads a PDF produced by [`render_pdf`] and checks header, xref
/// offsets, trailer size and page count.
pub fn validate_pdf(bytes: &[u8]) -> Result<PdfInfo, PdfError> {
    if !bytes.starts_with(b"%PDF-") {
        return Err(PdfError::Header);
    }
    let sx = find_last(bytes, b"startxref\n").ok_or(PdfError::StartXref)?;
    let tail = std::str::from_utf8(&bytes[sx + 10..]).map_err(|_| PdfError::StartXref)?;
    let xref: usize = tail
        .lines()
        .next()
        .and_then(|l| l.trim().parse().ok())
        .ok_or(PdfError::StartXref)?;
    if !bytes.get(xref..).is_some_and(|b| b.starts_with(b"xref\n")) {
        return Err(PdfError::Xref("startxref does not point at xref".into()));
    }
    let mut pos = xref + 5;
    let header_end = bytes[pos..]
        .iter()
        .position(|&b| b == b'\n')
        .ok_or(PdfError::Xref("truncated".into()))?
        + pos;
    let header = std::str::from_utf8(&bytes[pos..header_end]).map_err(|_| PdfError::Xref("header".into()))?;
    let mut parts = header.split(' ');
    let (Some("0"), Some(n)) = (parts.next(), parts.next()) else {
        return Err(PdfError::Xref(format!("bad subsection header {header:?}")));
    };
    let size: usize = n.parse().map_err(|_| PdfError::Xref("bad size".into()))?;
    pos = header_end + 1;
    for id in 0..size {
        let entry = bytes
            .get(pos..pos + 20)
            .ok_or(PdfError::Xref("truncated entry".into()))?;
        let entry = std::str::from_utf8(entry).map_err(|_| PdfError::Xref("entry".into()))?;
        if !entry.ends_with(" \n") {
            return Err(PdfError::Xref(format!("entry {id} is not 20 bytes")));
        }
        if id > 0 {
            let offset: usize = entry[..10].parse().map_err(|_| PdfError::Xref("offset".into()))?;
            let expect = format!("{id} 0 obj");
            if !bytes.get(offset..).is_some_and(|b| b.starts_with(expect.as_bytes())) {
                return Err(PdfError::Offset { id, offset });
            }
        }
        pos += 20;
    }
    if !bytes[pos..].starts_with(b"trailer") {
        return Err(PdfError::Trailer("missing trailer after xref".into()));
    }
    let trailer = std::str::from_utf8(&bytes[pos..sx]).map_err(|_| PdfError::Trailer("utf8".into()))?;
    if !trailer.contains(&format!("/Size {size} ")) {
        return Err(PdfError::Trailer(format!("/Size does not match {size}")));
    }
    let objects = count(bytes, b" 0 obj\n");
    if objects != size - 1 {
        return Err(PdfError::Trailer(format!(
            "{objects} objects but xref lists {}",
            size - 1
        )));
    }
    let pages = count(bytes, b"/Type /Page ");
    if !trailer.contains("/Root 1 0 R") || count(bytes, b"/Type /Pages ") != 1 {
        return Err(PdfError::Trailer("missing catalog or page tree".into()));
    }
    Ok(PdfInfo { objects, pages })
}
