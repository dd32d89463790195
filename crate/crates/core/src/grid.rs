//! Grid topology: case-file parsing and the DC measurement Jacobian.
//!
//! A case describes buses and branches of a transmission network. Two input
//! formats are accepted: the MATLAB case-script subset used by common test
//! archives (`mpc.baseMVA`, `mpc.bus`, `mpc.branch` matrices) and an
//! equivalent JSON document. From a parsed case, [`build_dc_jacobian`]
//! assembles the measurement matrix `H` of the DC approximation: one active
//! power flow row per in-service branch followed by one active power
//! injection row per bus.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while reading a case or assembling its Jacobian.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    /// The case text could not be understood (missing matrix, non-numeric
    /// token, ragged rows, bad field values).
    #[error("malformed case: {0}")]
    Malformed(String),
    /// The case parsed but describes an inconsistent network (unknown bus
    /// reference, duplicate bus id, self-loop).
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    /// An in-service branch carries a reactance that cannot enter the DC
    /// model. `index` is the zero-based position in the branch list.
    #[error("branch {index} ({from} -> {to}) has nonpositive reactance {x}")]
    NonpositiveReactance {
        index: usize,
        from: usize,
        to: usize,
        x: f64,
    },
    /// Every branch is out of service, so the Jacobian would have no flow
    /// rows.
    #[error("case has no in-service branch")]
    NoInServiceBranch,
}

/// Bus role in the original power-flow data. Only the reference flag matters
/// to this crate (optional state reduction); the rest is carried through for
/// reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BusType {
    Pq,
    Pv,
    Ref,
    Isolated,
}

impl BusType {
    fn from_code(code: f64) -> Option<Self> {
        match code as i64 {
            1 if code == 1.0 => Some(BusType::Pq),
            2 if code == 2.0 => Some(BusType::Pv),
            3 if code == 3.0 => Some(BusType::Ref),
            4 if code == 4.0 => Some(BusType::Isolated),
            _ => None,
        }
    }

    fn code(self) -> u32 {
        match self {
            BusType::Pq => 1,
            BusType::Pv => 2,
            BusType::Ref => 3,
            BusType::Isolated => 4,
        }
    }
}

impl fmt::Display for BusType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BusType::Pq => "PQ",
            BusType::Pv => "PV",
            BusType::Ref => "REF",
            BusType::Isolated => "ISOLATED",
        };
        f.write_str(s)
    }
}

/// One bus row of a case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusRecord {
    /// External bus number as written in the case file (positive, unique).
    pub id: usize,
    #[serde(rename = "type")]
    pub bus_type: BusType,
}

/// One branch row of a case. Endpoints are external bus ids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub from: usize,
    pub to: usize,
    /// Series reactance in per unit; must be positive on in-service branches.
    pub x: f64,
    /// Out-of-service branches are retained in the case but contribute no
    /// measurement rows.
    #[serde(default = "default_status")]
    pub status: bool,
}

fn default_status() -> bool {
    true
}

/// A parsed network case: buses and branches in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    #[serde(default)]
    pub name: String,
    pub base_mva: f64,
    pub buses: Vec<BusRecord>,
    pub branches: Vec<BranchRecord>,
}

impl GridCase {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    /// Zero-based position of an external bus id in the bus list.
    pub fn bus_position(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    /// Indices (into `branches`) of the in-service branches, in file order.
    pub fn in_service_branches(&self) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.status)
            .map(|(i, _)| i)
            .collect()
    }

    /// Regenerates case-script text for this case. Only the fields this
    /// crate consumes are written; parsing the result yields an identical
    /// `GridCase`.
    pub fn to_matpower(&self) -> String {
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str(&format!("function mpc = {}\n", self.name));
        }
        out.push_str(&format!("mpc.baseMVA = {};\n", self.base_mva));
        out.push_str("mpc.bus = [\n");
        for bus in &self.buses {
            out.push_str(&format!("\t{}\t{};\n", bus.id, bus.bus_type.code()));
        }
        out.push_str("];\n");
        out.push_str("mpc.branch = [\n");
        for br in &self.branches {
            out.push_str(&format!(
                "\t{}\t{}\t0\t{}\t0\t0\t0\t0\t0\t0\t{};\n",
                br.from,
                br.to,
                br.x,
                if br.status { 1 } else { 0 }
            ));
        }
        out.push_str("];\n");
        out
    }
}

/// What a measurement row of the Jacobian observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Active power flow on branch `branch` (zero-based position in the
    /// case's branch list), oriented from `from` to `to` (external ids).
    Flow {
        from: usize,
        to: usize,
        branch: usize,
    },
    /// Active power injection at the bus with external id `bus`.
    Injection { bus: usize },
}

impl MeasurementKind {
    pub fn is_flow(&self) -> bool {
        matches!(self, MeasurementKind::Flow { .. })
    }

    /// Short lowercase class label used in tabular output.
    pub fn label(&self) -> &'static str {
        match self {
            MeasurementKind::Flow { .. } => "flow",
            MeasurementKind::Injection { .. } => "injection",
        }
    }
}

/// Row-level metadata for a Jacobian: which physical quantity row `index`
/// measures. Indices are zero-based; user-facing output adds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeasurementDescriptor {
    pub index: usize,
    pub kind: MeasurementKind,
}

/// The DC measurement matrix together with per-row descriptors.
///
/// Rows are ordered flows first (in-service branches in file order), then
/// injections (buses in file order). Columns are bus voltage angles in file
/// order. Every row sums to zero: flow rows hold `+1/x` and `-1/x`, and each
/// injection row is the signed sum of the flow rows incident to its bus.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    matrix: DMatrix<f64>,
    descriptors: Vec<MeasurementDescriptor>,
}

impl JacobianMatrix {
    /// Number of measurements (rows).
    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of state variables (columns).
    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn descriptors(&self) -> &[MeasurementDescriptor] {
        &self.descriptors
    }
}

/// Parses a case in either supported format, sniffing JSON by its leading
/// `{`.
pub fn parse_case(text: &str) -> Result<GridCase, GridError> {
    if text.trim_start().starts_with('{') {
        parse_json_case(text)
    } else {
        parse_matpower_case(text)
    }
}

/// Parses the case-script subset: `mpc.baseMVA`, `mpc.bus`, `mpc.branch`.
///
/// `%` starts a comment. Bus rows need at least two columns (id, type);
/// branch rows need at least eleven (from, to, r, x, ..., status). Extra
/// columns are ignored. Out-of-service branches (status 0) are kept but
/// flagged.
pub fn parse_matpower_case(text: &str) -> Result<GridCase, GridError> {
    let stripped = strip_comments(text);
    let name = case_name(&stripped);

    let base_mva = scalar_field(&stripped, "baseMVA")?;
    if !base_mva.is_finite() || base_mva <= 0.0 {
        return Err(GridError::Malformed(format!(
            "baseMVA must be a positive number, got {base_mva}"
        )));
    }

    let bus_rows = matrix_field(&stripped, "bus")?;
    if bus_rows.is_empty() {
        return Err(GridError::Malformed("bus matrix is empty".into()));
    }
    require_rectangular(&bus_rows, "bus", 2)?;
    let mut buses = Vec::with_capacity(bus_rows.len());
    for row in &bus_rows {
        let id = integer_field(row[0], "bus id")?;
        let bus_type = BusType::from_code(row[1]).ok_or_else(|| {
            GridError::Malformed(format!("bus {id} has unknown type code {}", row[1]))
        })?;
        buses.push(BusRecord { id, bus_type });
    }

    let branch_rows = matrix_field(&stripped, "branch")?;
    if branch_rows.is_empty() {
        return Err(GridError::Malformed("branch matrix is empty".into()));
    }
    require_rectangular(&branch_rows, "branch", 11)?;
    let mut branches = Vec::with_capacity(branch_rows.len());
    for row in &branch_rows {
        let from = integer_field(row[0], "branch from-bus")?;
        let to = integer_field(row[1], "branch to-bus")?;
        let x = row[3];
        let status = row[10] != 0.0;
        branches.push(BranchRecord {
            from,
            to,
            x,
            status,
        });
    }

    let case = GridCase {
        name,
        base_mva,
        buses,
        branches,
    };
    validate_case(&case)?;
    Ok(case)
}

/// Parses the JSON case form:
/// `{"name", "base_mva", "buses": [{"id", "type"}], "branches": [{"from",
/// "to", "x", "status"}]}` with bus types spelled `"PQ" | "PV" | "REF" |
/// "ISOLATED"` and `status` defaulting to true.
pub fn parse_json_case(text: &str) -> Result<GridCase, GridError> {
    let case: GridCase =
        serde_json::from_str(text).map_err(|e| GridError::Malformed(e.to_string()))?;
    if !case.base_mva.is_finite() || case.base_mva <= 0.0 {
        return Err(GridError::Malformed(format!(
            "base_mva must be a positive number, got {}",
            case.base_mva
        )));
    }
    if case.buses.is_empty() {
        return Err(GridError::Malformed("bus list is empty".into()));
    }
    if case.branches.is_empty() {
        return Err(GridError::Malformed("branch list is empty".into()));
    }
    validate_case(&case)?;
    Ok(case)
}

fn validate_case(case: &GridCase) -> Result<(), GridError> {
    let mut seen = HashMap::new();
    for bus in &case.buses {
        if bus.id == 0 {
            return Err(GridError::Malformed("bus id must be positive".into()));
        }
        if seen.insert(bus.id, ()).is_some() {
            return Err(GridError::InvalidTopology(format!(
                "duplicate bus id {}",
                bus.id
            )));
        }
    }
    for (i, br) in case.branches.iter().enumerate() {
        if br.from == br.to {
            return Err(GridError::InvalidTopology(format!(
                "branch {i} connects bus {} to itself",
                br.from
            )));
        }
        for end in [br.from, br.to] {
            if !seen.contains_key(&end) {
                return Err(GridError::InvalidTopology(format!(
                    "branch {i} references unknown bus {end}"
                )));
            }
        }
        if !br.x.is_finite() {
            return Err(GridError::Malformed(format!(
                "branch {i} has non-finite reactance {}",
                br.x
            )));
        }
        if br.status && br.x <= 0.0 {
            return Err(GridError::NonpositiveReactance {
                index: i,
                from: br.from,
                to: br.to,
                x: br.x,
            });
        }
    }
    Ok(())
}

/// Builds the DC measurement matrix with one state column per bus.
///
/// Flow row for a branch of reactance `x` holds `+1/x` at the from-bus column
/// and `-1/x` at the to-bus column. The injection row of a bus is the signed
/// sum of its incident flow rows (leaving positive, entering negative),
/// accumulated branch by branch so the shared-entry identity holds exactly.
pub fn build_dc_jacobian(case: &GridCase) -> Result<JacobianMatrix, GridError> {
    build_jacobian_with_columns(case, &(0..case.buses.len()).collect::<Vec<_>>())
}

/// Like [`build_dc_jacobian`] but with the reference-bus angle removed from
/// the state (one column dropped per `REF`-typed bus). Errors if the case
/// has no reference bus.
pub fn build_dc_jacobian_reduced(case: &GridCase) -> Result<JacobianMatrix, GridError> {
    let keep: Vec<usize> = case
        .buses
        .iter()
        .enumerate()
        .filter(|(_, b)| b.bus_type != BusType::Ref)
        .map(|(i, _)| i)
        .collect();
    if keep.len() == case.buses.len() {
        return Err(GridError::InvalidTopology(
            "no reference bus to eliminate from the state".into(),
        ));
    }
    build_jacobian_with_columns(case, &keep)
}

fn build_jacobian_with_columns(
    case: &GridCase,
    state_buses: &[usize],
) -> Result<JacobianMatrix, GridError> {
    let n = state_buses.len();
    // Map bus-list position -> state column (None for eliminated buses).
    let mut col_of = vec![None; case.buses.len()];
    for (c, &p) in state_buses.iter().enumerate() {
        col_of[p] = Some(c);
    }
    let pos_of_id: HashMap<usize, usize> = case
        .buses
        .iter()
        .enumerate()
        .map(|(p, b)| (b.id, p))
        .collect();

    let in_service = case.in_service_branches();
    if in_service.is_empty() {
        return Err(GridError::NoInServiceBranch);
    }

    let n_flows = in_service.len();
    let m = n_flows + case.buses.len();
    let mut h = DMatrix::zeros(m, n);
    let mut descriptors = Vec::with_capacity(m);

    for (row, &bi) in in_service.iter().enumerate() {
        let br = &case.branches[bi];
        let b = 1.0 / br.x;
        let fp = pos_of_id[&br.from];
        let tp = pos_of_id[&br.to];
        if let Some(c) = col_of[fp] {
            h[(row, c)] += b;
        }
        if let Some(c) = col_of[tp] {
            h[(row, c)] -= b;
        }
        // Injection rows accumulate the same +/-b terms, one branch at a
        // time, so each equals the signed sum of its incident flow rows
        // bit for bit.
        let from_inj = n_flows + fp;
        let to_inj = n_flows + tp;
        if let Some(c) = col_of[fp] {
            h[(from_inj, c)] += b;
            h[(to_inj, c)] -= b;
        }
        if let Some(c) = col_of[tp] {
            h[(from_inj, c)] -= b;
            h[(to_inj, c)] += b;
        }
        descriptors.push(MeasurementDescriptor {
            index: row,
            kind: MeasurementKind::Flow {
                from: br.from,
                to: br.to,
                branch: bi,
            },
        });
    }
    for (p, bus) in case.buses.iter().enumerate() {
        descriptors.push(MeasurementDescriptor {
            index: n_flows + p,
            kind: MeasurementKind::Injection { bus: bus.id },
        });
    }

    Ok(JacobianMatrix {
        matrix: h,
        descriptors,
    })
}

fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        match line.find('%') {
            Some(p) => out.push_str(&line[..p]),
            None => out.push_str(line),
        }
        out.push('\n');
    }
    out
}

fn case_name(text: &str) -> String {
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("function") {
            if let Some(eq) = rest.find('=') {
                return rest[eq + 1..].trim().trim_end_matches(';').to_string();
            }
        }
    }
    String::new()
}

fn scalar_field(text: &str, key: &str) -> Result<f64, GridError> {
    let pat = format!("mpc.{key}");
    let start = text
        .find(&pat)
        .ok_or_else(|| GridError::Malformed(format!("missing mpc.{key}")))?;
    let rest = &text[start + pat.len()..];
    let eq = rest
        .find('=')
        .ok_or_else(|| GridError::Malformed(format!("mpc.{key} has no assignment")))?;
    let rest = &rest[eq + 1..];
    let end = rest
        .find(';')
        .ok_or_else(|| GridError::Malformed(format!("mpc.{key} is not terminated by ';'")))?;
    parse_number(rest[..end].trim(), &format!("mpc.{key}"))
}

fn matrix_field(text: &str, key: &str) -> Result<Vec<Vec<f64>>, GridError> {
    let pat = format!("mpc.{key}");
    let start = text
        .find(&pat)
        .ok_or_else(|| GridError::Malformed(format!("missing mpc.{key}")))?;
    let rest = &text[start + pat.len()..];
    let open = rest
        .find('[')
        .ok_or_else(|| GridError::Malformed(format!("mpc.{key} has no matrix literal")))?;
    let rest = &rest[open + 1..];
    let close = rest
        .find(']')
        .ok_or_else(|| GridError::Malformed(format!("mpc.{key} matrix is not closed")))?;
    let body = &rest[..close];

    let mut rows = Vec::new();
    for raw in body.split(';') {
        let cleaned = raw.replace(',', " ");
        let tokens: Vec<&str> = cleaned.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(tokens.len());
        for tok in tokens {
            row.push(parse_number(tok, &format!("mpc.{key}"))?);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn require_rectangular(rows: &[Vec<f64>], key: &str, min_cols: usize) -> Result<(), GridError> {
    let w = rows[0].len();
    if rows.iter().any(|r| r.len() != w) {
        return Err(GridError::Malformed(format!(
            "{key} matrix has ragged rows"
        )));
    }
    if w < min_cols {
        return Err(GridError::Malformed(format!(
            "{key} rows need at least {min_cols} columns, got {w}"
        )));
    }
    Ok(())
}

fn parse_number(token: &str, context: &str) -> Result<f64, GridError> {
    token
        .parse::<f64>()
        .map_err(|_| GridError::Malformed(format!("non-numeric token `{token}` in {context}")))
}

fn integer_field(value: f64, what: &str) -> Result<usize, GridError> {
    if value.fract() != 0.0 || value < 1.0 || value > usize::MAX as f64 {
        return Err(GridError::Malformed(format!(
            "{what} must be a positive integer, got {value}"
        )));
    }
    Ok(value as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_bus_case(x: f64) -> GridCase {
        GridCase {
            name: "pair".into(),
            base_mva: 100.0,
            buses: vec![
                BusRecord {
                    id: 1,
                    bus_type: BusType::Ref,
                },
                BusRecord {
                    id: 2,
                    bus_type: BusType::Pq,
                },
            ],
            branches: vec![BranchRecord {
                from: 1,
                to: 2,
                x,
                status: true,
            }],
        }
    }

    #[test]
    fn two_bus_jacobian_layout() {
        let jac = build_dc_jacobian(&two_bus_case(0.5)).unwrap();
        assert_eq!(jac.m(), 3);
        assert_eq!(jac.n(), 2);
        let expected = DMatrix::from_row_slice(3, 2, &[2.0, -2.0, 2.0, -2.0, -2.0, 2.0]);
        assert_eq!(jac.matrix(), &expected);
        assert_eq!(
            jac.descriptors()[0].kind,
            MeasurementKind::Flow {
                from: 1,
                to: 2,
                branch: 0
            }
        );
        assert_eq!(
            jac.descriptors()[1].kind,
            MeasurementKind::Injection { bus: 1 }
        );
        assert_eq!(
            jac.descriptors()[2].kind,
            MeasurementKind::Injection { bus: 2 }
        );
    }

    #[test]
    fn descriptor_indices_are_a_permutation() {
        let jac = build_dc_jacobian(&two_bus_case(0.5)).unwrap();
        let mut idx: Vec<usize> = jac.descriptors().iter().map(|d| d.index).collect();
        idx.sort_unstable();
        assert_eq!(idx, (0..jac.m()).collect::<Vec<_>>());
    }

    #[test]
    fn out_of_service_branches_add_no_rows() {
        let mut case = two_bus_case(0.5);
        case.branches.push(BranchRecord {
            from: 2,
            to: 1,
            x: 1.0,
            status: false,
        });
        let jac = build_dc_jacobian(&case).unwrap();
        // Still one flow row; the dead branch contributes nothing anywhere.
        assert_eq!(jac.m(), 3);
        assert!(jac.descriptors().iter().all(|d| d.kind
            != MeasurementKind::Flow {
                from: 2,
                to: 1,
                branch: 1
            }));
    }

    #[test]
    fn all_branches_out_of_service_is_an_error() {
        let mut case = two_bus_case(0.5);
        case.branches[0].status = false;
        assert_eq!(build_dc_jacobian(&case), Err(GridError::NoInServiceBranch));
    }

    #[test]
    fn reduced_jacobian_drops_reference_column() {
        let jac = build_dc_jacobian_reduced(&two_bus_case(0.5)).unwrap();
        assert_eq!(jac.m(), 3);
        assert_eq!(jac.n(), 1);
        let expected = DMatrix::from_row_slice(3, 1, &[-2.0, -2.0, 2.0]);
        assert_eq!(jac.matrix(), &expected);
    }

    #[test]
    fn reduced_jacobian_requires_a_reference_bus() {
        let mut case = two_bus_case(0.5);
        case.buses[0].bus_type = BusType::Pq;
        assert!(matches!(
            build_dc_jacobian_reduced(&case),
            Err(GridError::InvalidTopology(_))
        ));
    }

    const TOY: &str = "\
function mpc = toy
% demo case
mpc.baseMVA = 100;
mpc.bus = [
\t1\t3;
\t2\t1;
];
mpc.branch = [
\t1\t2\t0\t0.5\t0\t0\t0\t0\t0\t0\t1;
];
";

    #[test]
    fn parses_case_script_subset() {
        let case = parse_matpower_case(TOY).unwrap();
        assert_eq!(case.name, "toy");
        assert_eq!(case.base_mva, 100.0);
        assert_eq!(case.buses.len(), 2);
        assert_eq!(case.branches.len(), 1);
        assert_eq!(case.branches[0].x, 0.5);
        assert!(case.branches[0].status);
    }

    #[test]
    fn parse_is_deterministic() {
        let a = parse_matpower_case(TOY).unwrap();
        let b = parse_matpower_case(TOY).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            build_dc_jacobian(&a).unwrap(),
            build_dc_jacobian(&b).unwrap()
        );
    }

    #[test]
    fn roundtrip_through_case_text() {
        let case = parse_matpower_case(TOY).unwrap();
        let regenerated = case.to_matpower();
        assert_eq!(parse_matpower_case(&regenerated).unwrap(), case);
    }

    #[test]
    fn unknown_bus_reference_is_invalid_topology() {
        let text = TOY.replace("\t1\t2\t0", "\t1\t99\t0");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::InvalidTopology(msg)) if msg.contains("99")
        ));
    }

    #[test]
    fn duplicate_bus_id_is_invalid_topology() {
        let text = TOY.replace("\t2\t1;", "\t1\t1;");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::InvalidTopology(msg)) if msg.contains("duplicate")
        ));
    }

    #[test]
    fn self_loop_is_invalid_topology() {
        let text = TOY.replace("\t1\t2\t0", "\t1\t1\t0");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::InvalidTopology(msg)) if msg.contains("itself")
        ));
    }

    #[test]
    fn nonpositive_reactance_is_rejected() {
        let text = TOY.replace("0.5", "-0.5");
        assert_eq!(
            parse_matpower_case(&text),
            Err(GridError::NonpositiveReactance {
                index: 0,
                from: 1,
                to: 2,
                x: -0.5
            })
        );
    }

    #[test]
    fn zero_reactance_on_dead_branch_is_allowed() {
        let text = TOY.replace("0.5", "0").replace("\t0\t0\t1;", "\t0\t0\t0;");
        let case = parse_matpower_case(&text).unwrap();
        assert!(!case.branches[0].status);
        assert_eq!(build_dc_jacobian(&case), Err(GridError::NoInServiceBranch));
    }

    #[test]
    fn non_numeric_token_is_malformed() {
        let text = TOY.replace("0.5", "abc");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::Malformed(msg)) if msg.contains("abc")
        ));
    }

    #[test]
    fn ragged_rows_are_malformed() {
        let text = TOY.replace("\t2\t1;", "\t2\t1\t7;");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::Malformed(msg)) if msg.contains("ragged")
        ));
    }

    #[test]
    fn missing_matrix_is_malformed() {
        let text = TOY.replace("mpc.branch", "mpc.other");
        assert!(matches!(
            parse_matpower_case(&text),
            Err(GridError::Malformed(msg)) if msg.contains("mpc.branch")
        ));
    }

    #[test]
    fn comments_and_commas_are_tolerated() {
        let text = "\
mpc.baseMVA = 100; % base
mpc.bus = [ 1, 3; 2, 1 ]; % two buses
mpc.branch = [ 1, 2, 0, 0.25, 0, 0, 0, 0, 0, 0, 1 ];
";
        let case = parse_matpower_case(text).unwrap();
        assert_eq!(case.name, "");
        assert_eq!(case.buses.len(), 2);
        assert_eq!(case.branches[0].x, 0.25);
    }

    #[test]
    fn json_form_parses() {
        let text = r#"{
            "name": "pair",
            "base_mva": 100.0,
            "buses": [{"id": 1, "type": "REF"}, {"id": 2, "type": "PQ"}],
            "branches": [{"from": 1, "to": 2, "x": 0.5}]
        }"#;
        let case = parse_json_case(text).unwrap();
        assert_eq!(case, two_bus_case(0.5));
        // Dispatcher sniffs the JSON form.
        assert_eq!(parse_case(text).unwrap(), case);
    }

    #[test]
    fn json_validation_matches_script_validation() {
        let text = r#"{
            "base_mva": 100.0,
            "buses": [{"id": 1, "type": "REF"}],
            "branches": [{"from": 1, "to": 5, "x": 0.5}]
        }"#;
        assert!(matches!(
            parse_json_case(text),
            Err(GridError::InvalidTopology(msg)) if msg.contains('5')
        ));
    }
}
