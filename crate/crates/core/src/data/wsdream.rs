use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{QosDataset, QosRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsDreamPaths {
    pub rt_matrix: PathBuf,
    pub tp_matrix: PathBuf,
    pub user_meta: PathBuf,
    pub node_meta: PathBuf,
}

impl WsDreamPaths {
    /// The standard file names inside an extracted WS-Dream dataset directory.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            rt_matrix: dir.join("rtMatrix.txt"),
            tp_matrix: dir.join("tpMatrix.txt"),
            user_meta: dir.join("userlist.txt"),
            node_meta: dir.join("wslist.txt"),
        }
    }
}

/// Column layout of a metadata file. Lines that are blank or start with `[`, `=` or
/// `#` are treated as headers.
#[derive(Clone, Debug, PartialEq)]
pub struct MetadataFormat {
    /// Field separator; `None` splits on runs of whitespace.
    pub delimiter: Option<char>,
    pub id_column: usize,
    pub lat_column: usize,
    pub lon_column: usize,
}

impl MetadataFormat {
    /// `userlist.txt`: id, IP, country, IP number, AS, latitude, longitude.
    pub fn wsdream_users() -> Self {
        Self { delimiter: Some('\t'), id_column: 0, lat_column: 5, lon_column: 6 }
    }

    /// `wslist.txt`: id, WSDL, provider, IP, country, IP number, AS, latitude, longitude.
    pub fn wsdream_services() -> Self {
        Self { delimiter: Some('\t'), id_column: 0, lat_column: 7, lon_column: 8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadOptions {
    pub user_format: MetadataFormat,
    pub node_format: MetadataFormat,
    /// Keep only the first `max_users` rows.
    pub max_users: Option<usize>,
    /// Keep only the first `max_nodes` columns.
    pub max_nodes: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            user_format: MetadataFormat::wsdream_users(),
            node_format: MetadataFormat::wsdream_services(),
            max_users: None,
            max_nodes: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IngestSummary {
    pub n_users: usize,
    pub n_nodes: usize,
    pub cells: usize,
    pub records: usize,
    /// Cells dropped because either value was non-positive or non-finite.
    pub filtered: usize,
}

/// Loads the response-time and throughput matrices (row = user, column = node) plus
/// per-entity coordinates. A record is kept only when both cells are positive.
pub fn load_wsdream(paths: &WsDreamPaths, opts: &LoadOptions) -> Result<(QosDataset, IngestSummary)> {
    let rt = read_matrix(&paths.rt_matrix, opts)?;
    let tp = read_matrix(&paths.tp_matrix, opts)?;
    let n_users = rt.len();
    let n_nodes = rt.first().map_or(0, Vec::len);
    if tp.len() != n_users || tp.first().map_or(0, Vec::len) != n_nodes {
        return Err(Error::Ingest {
            path: paths.tp_matrix.clone(),
            line: 0,
            message: format!(
                "matrix is {}x{} but the response-time matrix is {n_users}x{n_nodes}",
                tp.len(),
                tp.first().map_or(0, Vec::len)
            ),
        });
    }
    let user_locations = read_metadata(&paths.user_meta, &opts.user_format, n_users, "user")?;
    let node_locations = read_metadata(&paths.node_meta, &opts.node_format, n_nodes, "node")?;

    let mut records = Vec::new();
    for u in 0..n_users {
        for n in 0..n_nodes {
            let (r, t) = (rt[u][n], tp[u][n]);
            if r > 0.0 && t > 0.0 && r.is_finite() && t.is_finite() {
                records.push(QosRecord {
                    user_id: u,
                    node_id: n,
                    user_lat: user_locations[u].0,
                    user_lon: user_locations[u].1,
                    node_lat: node_locations[n].0,
                    node_lon: node_locations[n].1,
                    response_time: r,
                    throughput: t,
                });
            }
        }
    }
    let cells = n_users * n_nodes;
    let summary = IngestSummary {
        n_users,
        n_nodes,
        cells,
        records: records.len(),
        filtered: cells - records.len(),
    };
    Ok((
        QosDataset { records, n_users, n_nodes, user_locations, node_locations },
        summary,
    ))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn read_matrix(path: &Path, opts: &LoadOptions) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if opts.max_users.is_some_and(|m| rows.len() >= m) {
            break;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split_whitespace().enumerate() {
            if opts.max_nodes.is_some_and(|m| col >= m) {
                break;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Ingest {
                path: path.to_path_buf(),
                line: i + 1,
                message: format!("column {}: non-numeric cell {cell:?}", col + 1),
            })?;
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Ingest {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("row has {} cells, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    Ok(rows)
}

fn read_metadata(path: &Path, fmt: &MetadataFormat, count: usize, what: &str) -> Result<Vec<(f64, f64)>> {
    let text = read_text(path)?;
    let mut locs: Vec<Option<(f64, f64)>> = vec![None; count];
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(['[', '=', '#']) {
            continue;
        }
        let fields: Vec<&str> = match fmt.delimiter {
            Some(d) => line.split(d).map(str::trim).collect(),
            None => line.split_whitespace().collect(),
        };
        let bad = |message: String| Error::Ingest { path: path.to_path_buf(), line: i + 1, message };
        let field = |col: usize| {
            fields
                .get(col)
                .copied()
                .ok_or_else(|| bad(format!("missing column {}", col + 1)))
        };
        let id: usize = field(fmt.id_column)?
            .parse()
            .map_err(|_| bad(format!("{what} id is not an integer")))?;
        let lat: f64 = field(fmt.lat_column)?
            .parse()
            .map_err(|_| bad(format!("{what} {id}: latitude is not numeric")))?;
        let lon: f64 = field(fmt.lon_column)?
            .parse()
            .map_err(|_| bad(format!("{what} {id}: longitude is not numeric")))?;
        if id < count {
            locs[id] = Some((lat, lon));
        }
    }
    locs.into_iter()
        .enumerate()
        .map(|(id, l)| {
            l.ok_or_else(|| Error::Ingest {
                path: path.to_path_buf(),
                line: 0,
                message: format!("no metadata for {what} {id}"),
            })
        })
        .collect()
}

/// Writes a dataset in the WS-Dream layout (missing cells as `-1`), readable by
/// [`load_wsdream`] with the default options.
pub fn write_wsdream(dataset: &QosDataset, dir: impl AsRef<Path>) -> Result<WsDreamPaths> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = WsDreamPaths::in_dir(dir);
    let mut rt = vec![vec![-1.0; dataset.n_nodes]; dataset.n_users];
    let mut tp = rt.clone();
    for r in &dataset.records {
        rt[r.user_id][r.node_id] = r.response_time;
        tp[r.user_id][r.node_id] = r.throughput;
    }
    write_matrix(&paths.rt_matrix, &rt)?;
    write_matrix(&paths.tp_matrix, &tp)?;

    let mut users = String::from("[User ID]\t[IP Address]\t[Country]\t[IP No.]\t[AS]\t[Latitude]\t[Longitude]\n");
    for (id, (lat, lon)) in dataset.user_locations.iter().enumerate() {
        users.push_str(&format!("{id}\t-\t-\t-\t-\t{lat}\t{lon}\n"));
    }
    write_file(&paths.user_meta, &users)?;
    let mut nodes = String::from(
        "[Service ID]\t[WSDL Address]\t[Service Provider]\t[IP Address]\t[Country]\t[IP No.]\t[AS]\t[Latitude]\t[Longitude]\n",
    );
    for (id, (lat, lon)) in dataset.node_locations.iter().enumerate() {
        nodes.push_str(&format!("{id}\t-\t-\t-\t-\t-\t-\t{lat}\t{lon}\n"));
    }
    write_file(&paths.node_meta, &nodes)?;
    Ok(paths)
}

fn write_matrix(path: &Path, m: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    write_file(path, &out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}
