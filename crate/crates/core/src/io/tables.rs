use std::collections::HashMap;
use std::path::Path;

use super::{read_text, write_text, IoError};
use crate::analysis::{HeatMap, OverlayPoint};
use crate::graph::{validate_plan_by_id, DualGraph, Plan};
use crate::persistence::{Death, Diagram, PersistencePoint};

fn render(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(header).expect("writing to memory");
    }
    for row in rows {
        w.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

fn records(text: &str, headers: bool, path: &Path) -> Result<Vec<csv::StringRecord>, IoError> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| IoError::format(path, e))
}

fn field<'r>(rec: &'r csv::StringRecord, i: usize, path: &Path) -> Result<&'r str, IoError> {
    rec.get(i).ok_or_else(|| {
        let line = rec.position().map_or(0, |p| p.line());
        IoError::format(path, format!("line {line}: missing column {}", i + 1))
    })
}

fn number(s: &str, path: &Path) -> Result<f64, IoError> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| IoError::format(path, format!("not a number: {s:?}"))),
    }
}

fn fmt_number(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        x.to_string()
    }
}

/// `node_id,district` rows in graph node order.
pub fn plan_to_csv(g: &DualGraph, plan: &Plan) -> String {
    render(
        &["node_id", "district"],
        plan.assignment()
            .iter()
            .enumerate()
            .map(|(v, d)| vec![g.node(v).id.clone(), d.to_string()]),
    )
}

/// Parses and validates a plan; `k` defaults to the largest district label plus one.
pub fn plan_from_csv(text: &str, g: &DualGraph, k: Option<usize>, epsilon: f64, path: &Path) -> Result<Plan, IoError> {
    let mut by_id = HashMap::new();
    for rec in records(text, true, path)? {
        let id = field(&rec, 0, path)?.to_string();
        let district: usize = field(&rec, 1, path)?
            .parse()
            .map_err(|_| IoError::format(path, format!("bad district for node {id:?}")))?;
        if by_id.insert(id.clone(), district).is_some() {
            return Err(IoError::format(path, format!("node {id:?} listed twice")));
        }
    }
    let k = k.unwrap_or_else(|| by_id.values().max().map_or(0, |&d| d + 1));
    Ok(validate_plan_by_id(g, &by_id, k, epsilon)?)
}

pub fn write_plan(path: &Path, g: &DualGraph, plan: &Plan) -> Result<(), IoError> {
    write_text(path, &plan_to_csv(g, plan))
}

pub fn read_plan(path: &Path, g: &DualGraph, k: Option<usize>, epsilon: f64) -> Result<Plan, IoError> {
    plan_from_csv(&read_text(path)?, g, k, epsilon, path)
}

fn point_row(p: &PersistencePoint<f64>) -> Vec<String> {
    vec![
        p.birth.to_string(),
        p.death.to_string(),
        p.anchor.map(|a| a.to_string()).unwrap_or_default(),
    ]
}

/// `birth,death,anchor` rows; infinite death is `inf`, a missing anchor is empty.
pub fn diagram_to_csv(d: &Diagram<f64>) -> String {
    render(&["birth", "death", "anchor"], d.points.iter().map(point_row))
}

pub fn diagram_from_csv(text: &str, path: &Path) -> Result<Diagram<f64>, IoError> {
    let points = records(text, true, path)?
        .iter()
        .map(|rec| {
            let birth = number(field(rec, 0, path)?, path)?;
            let death = match number(field(rec, 1, path)?, path)? {
                d if d == f64::INFINITY => Death::Infinite,
                d => Death::Finite(d),
            };
            let anchor = match rec.get(2).unwrap_or("") {
                "" => None,
                a => Some(
                    a.parse()
                        .map_err(|_| IoError::format(path, format!("bad anchor {a:?}")))?,
                ),
            };
            Ok(PersistencePoint { birth, death, anchor })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Diagram::new(points))
}

pub fn write_diagram(path: &Path, d: &Diagram<f64>) -> Result<(), IoError> {
    write_text(path, &diagram_to_csv(d))
}

pub fn read_diagram(path: &Path) -> Result<Diagram<f64>, IoError> {
    diagram_from_csv(&read_text(path)?, path)
}

/// Pooled points: `plan,birth,death,anchor`.
pub fn overlay_to_csv(points: &[OverlayPoint]) -> String {
    render(
        &["plan", "birth", "death", "anchor"],
        points.iter().map(|o| {
            let mut row = vec![o.plan.to_string()];
            row.extend(point_row(&o.point));
            row
        }),
    )
}

pub fn write_overlay(path: &Path, points: &[OverlayPoint]) -> Result<(), IoError> {
    write_text(path, &overlay_to_csv(points))
}

/// Square matrix, one row per line, no header.
pub fn matrix_to_csv(m: &[Vec<f64>]) -> String {
    render(&[], m.iter().map(|row| row.iter().map(|&x| fmt_number(x)).collect()))
}

pub fn matrix_from_csv(text: &str, path: &Path) -> Result<Vec<Vec<f64>>, IoError> {
    let rows: Vec<Vec<f64>> = records(text, false, path)?
        .iter()
        .map(|rec| rec.iter().map(|s| number(s, path)).collect())
        .collect::<Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(IoError::format(path, "matrix is not square"));
    }
    Ok(rows)
}

pub fn write_matrix(path: &Path, m: &[Vec<f64>]) -> Result<(), IoError> {
    write_text(path, &matrix_to_csv(m))
}

pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, IoError> {
    matrix_from_csv(&read_text(path)?, path)
}

/// `unit_id,frequency`; an undefined heat map leaves every frequency empty.
pub fn heat_map_to_csv(g: &DualGraph, heat: &[f64]) -> String {
    render(
        &["unit_id", "frequency"],
        g.nodes()
            .iter()
            .zip(heat)
            .map(|(n, f)| vec![n.id.clone(), f.to_string()]),
    )
}

pub fn write_heat_map(path: &Path, g: &DualGraph, heat: &HeatMap) -> Result<(), IoError> {
    let text = match &heat.frequency {
        Some(f) => heat_map_to_csv(g, f),
        None => render(
            &["unit_id", "frequency"],
            g.nodes().iter().map(|n| vec![n.id.clone(), String::new()]),
        ),
    };
    write_text(path, &text)
}

/// `step,bottleneck`.
pub fn trace_to_csv(trace: &[(usize, f64)]) -> String {
    render(
        &["step", "bottleneck"],
        trace.iter().map(|&(s, d)| vec![s.to_string(), fmt_number(d)]),
    )
}

pub fn write_trace(path: &Path, trace: &[(usize, f64)]) -> Result<(), IoError> {
    write_text(path, &trace_to_csv(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_plan, NodeRecord};

    #[test]
    fn diagram_round_trip() {
        let d = Diagram::new(vec![
            PersistencePoint::essential(0.1 + 0.2).anchored(3),
            PersistencePoint::finite(1.0 / 3.0, 0.7),
        ]);
        let text = diagram_to_csv(&d);
        assert!(text.starts_with("birth,death,anchor\n0.30000000000000004,inf,3\n"));
        assert_eq!(diagram_from_csv(&text, Path::new("d.csv")).unwrap(), d);
    }

    #[test]
    fn matrix_round_trip() {
        let m = vec![
            vec![0.0, 0.25, f64::INFINITY],
            vec![0.25, 0.0, 1e-17],
            vec![f64::INFINITY, 1e-17, 0.0],
        ];
        assert_eq!(matrix_from_csv(&matrix_to_csv(&m), Path::new("m.csv")).unwrap(), m);
    }

    #[test]
    fn plan_round_trip() {
        let nodes = (0..4).map(|i| NodeRecord::new(format!("u{i}"), 1)).collect();
        let edges = [("u0", "u1"), ("u1", "u2"), ("u2", "u3")];
        let g = DualGraph::new(nodes, &edges).unwrap();
        let plan = validate_plan(&g, vec![1, 1, 0, 0], 2, 0.1).unwrap();
        let text = plan_to_csv(&g, &plan);
        assert_eq!(plan_from_csv(&text, &g, None, 0.1, Path::new("p.csv")).unwrap(), plan);
        let bad = "node_id,district\nu0,0\nu1,0\nu2,0\nu3,1\n";
        assert!(plan_from_csv(bad, &g, None, 0.1, Path::new("p.csv")).is_err());
    }
}
