//! Line-oriented map configs.
//!
//! A config is `key = value` lines with one `[branch]` section per
//! partition interval. `#` starts a comment, blank lines are skipped,
//! and numbers may be written as rationals `p/q`. Nested branch kinds
//! (glued pieces, composite chains, reflected inners) use dotted key
//! prefixes: `piece.0.kind`, `chain.1.coeff`, `inner.slope`.

use std::fmt;

use mil_core::map::{EPS_GRID, EPS_MARKOV};
use mil_core::{BranchKind, BranchSpec, MapError, MarkovIntervalMap};

#[derive(Debug)]
pub enum ConfigError {
    /// The text does not describe a map. Line 0 means the file as a whole.
    Parse { line: usize, message: String },
    /// The described map fails the Markov, expansion, or monotonicity checks.
    Validation(MapError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line: 0, message } => write!(f, "config: {message}"),
            ConfigError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ConfigError::Validation(e) => write!(f, "validation failed: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, message: message.into() }
}

/// Everything a config file pins down: the map itself plus optional
/// tolerance and series-depth overrides.
#[derive(Debug, Clone)]
pub struct MapConfig {
    pub partition: Vec<f64>,
    pub branches: Vec<BranchSpec>,
    pub eps_markov: Option<f64>,
    pub eps_grid: Option<f64>,
    pub depth: Option<usize>,
}

impl MapConfig {
    pub fn to_map(&self) -> MarkovIntervalMap {
        MarkovIntervalMap::new(self.partition.clone(), self.branches.clone()).with_tolerances(
            self.eps_markov.unwrap_or(EPS_MARKOV),
            self.eps_grid.unwrap_or(EPS_GRID),
        )
    }

    /// Config describing an existing map; None when a branch has no
    /// written form (opaque custom evaluators).
    pub fn from_map(map: &MarkovIntervalMap) -> Option<MapConfig> {
        if map.branches.iter().any(|spec| !writable(&spec.kind)) {
            return None;
        }
        Some(MapConfig {
            partition: map.partition.clone(),
            branches: map.branches.clone(),
            eps_markov: (map.eps_markov != EPS_MARKOV).then_some(map.eps_markov),
            eps_grid: (map.eps_grid != EPS_GRID).then_some(map.eps_grid),
            depth: None,
        })
    }
}

fn writable(kind: &BranchKind) -> bool {
    match kind {
        BranchKind::Custom { .. } => false,
        BranchKind::Glued { pieces } => pieces.iter().all(|(_, _, k)| writable(k)),
        BranchKind::Composite { chain } => chain.iter().all(writable),
        BranchKind::Reflected { inner, .. } => writable(inner),
        _ => true,
    }
}

/// Parse and validate. The returned config already passed the map checks
/// at its own tolerances.
pub fn parse_config(text: &str) -> Result<MapConfig, ConfigError> {
    let cfg = parse_config_unchecked(text)?;
    cfg.to_map().validate().map_err(ConfigError::Validation)?;
    Ok(cfg)
}

/// Parse without running the map checks, for callers that adjust
/// tolerances before validating.
pub fn parse_config_unchecked(text: &str) -> Result<MapConfig, ConfigError> {
    parse_layout(text)
}

struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

struct Section {
    header_line: usize,
    entries: Vec<Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let entry = self.entries.iter_mut().find(|e| e.key == key)?;
        entry.used = true;
        Some((entry.line, entry.value.clone()))
    }

    fn has(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    fn first_unused(&self) -> Option<&Entry> {
        self.entries.iter().find(|e| !e.used)
    }
}

fn parse_layout(text: &str) -> Result<MapConfig, ConfigError> {
    let mut preamble = Section { header_line: 0, entries: Vec::new() };
    let mut sections: Vec<Section> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        if stripped.starts_with('[') {
            if stripped != "[branch]" {
                return Err(parse_err(line, format!("unknown section '{stripped}'; only [branch] is recognized")));
            }
            sections.push(Section { header_line: line, entries: Vec::new() });
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(parse_err(line, "expected 'key = value'"));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(parse_err(line, "empty key"));
        }
        let target = sections.last_mut().unwrap_or(&mut preamble);
        if target.has(&key) {
            return Err(parse_err(line, format!("duplicate key '{key}'")));
        }
        target.entries.push(Entry { line, key, value, used: false });
    }

    let (part_line, part_value) = preamble
        .take("partition")
        .ok_or_else(|| parse_err(0, "missing 'partition'"))?;
    let partition = parse_list(&part_value, part_line)?;
    if partition.len() < 2 {
        return Err(parse_err(part_line, "partition needs at least two points"));
    }
    if partition.windows(2).any(|w| w[0] >= w[1]) {
        return Err(parse_err(part_line, "partition values must be strictly increasing"));
    }

    if let Some((dline, dvalue)) = preamble.take("domain") {
        let domain = parse_list(&dvalue, dline)?;
        if domain.len() != 2 {
            return Err(parse_err(dline, "domain takes exactly two values"));
        }
        if domain[0] != partition[0] || domain[1] != partition[partition.len() - 1] {
            return Err(parse_err(dline, "domain does not match the partition endpoints"));
        }
    }

    let eps_markov = take_positive(&mut preamble, "eps_markov")?;
    let eps_grid = take_positive(&mut preamble, "eps_grid")?;
    let depth = match preamble.take("depth") {
        Some((line, value)) => {
            let d: usize = value
                .parse()
                .map_err(|_| parse_err(line, format!("depth must be a positive integer, got '{value}'")))?;
            if d == 0 {
                return Err(parse_err(line, "depth must be positive"));
            }
            Some(d)
        }
        None => None,
    };
    if let Some(entry) = preamble.first_unused() {
        return Err(parse_err(entry.line, format!("unknown key '{}'", entry.key)));
    }

    let intervals = partition.len() - 1;
    if sections.len() != intervals {
        return Err(parse_err(
            part_line,
            format!("partition has {} intervals but {} [branch] sections follow", intervals, sections.len()),
        ));
    }

    let mut branches = Vec::with_capacity(sections.len());
    for mut section in sections {
        let orientation = match section.take("orientation") {
            Some((line, value)) => match parse_number(&value, line)? {
                v if v == 1.0 => 1,
                v if v == -1.0 => -1,
                v if v == 0.0 => 0,
                _ => return Err(parse_err(line, "orientation must be +1, -1, or 0")),
            },
            None => 0,
        };
        let kind = build_kind(&mut section, "")?;
        if let Some(entry) = section.first_unused() {
            return Err(parse_err(entry.line, format!("unknown or unused key '{}'", entry.key)));
        }
        branches.push(BranchSpec::oriented(kind, orientation));
    }

    Ok(MapConfig { partition, branches, eps_markov, eps_grid, depth })
}

fn take_positive(section: &mut Section, key: &str) -> Result<Option<f64>, ConfigError> {
    match section.take(key) {
        Some((line, value)) => {
            let v = parse_number(&value, line)?;
            if !(v > 0.0) {
                return Err(parse_err(line, format!("{key} must be positive")));
            }
            Ok(Some(v))
        }
        None => Ok(None),
    }
}

fn build_kind(section: &mut Section, prefix: &str) -> Result<BranchKind, ConfigError> {
    let kind_key = format!("{prefix}kind");
    let (kind_line, name) = section
        .take(&kind_key)
        .ok_or_else(|| parse_err(section.header_line, format!("missing '{kind_key}'")))?;

    match name.as_str() {
        "affine" => {
            let slope = take_number(section, prefix, "slope", kind_line)?;
            let intercept = take_number(section, prefix, "intercept", kind_line)?;
            Ok(BranchKind::Affine { slope, intercept })
        }
        "power_offset" => {
            let anchor = take_number(section, prefix, "anchor", kind_line)?;
            let coeff = take_number(section, prefix, "coeff", kind_line)?;
            let (aline, avalue) = section
                .take(&format!("{prefix}alpha"))
                .ok_or_else(|| parse_err(kind_line, format!("missing '{prefix}alpha'")))?;
            let alpha = parse_number(&avalue, aline)?;
            if !(alpha > 1.0) {
                return Err(parse_err(aline, "alpha must exceed 1"));
            }
            let offset = take_number(section, prefix, "offset", kind_line)?;
            Ok(BranchKind::PowerOffset { anchor, coeff, alpha, offset })
        }
        "log_reciprocal" => {
            let anchor = take_number(section, prefix, "anchor", kind_line)?;
            let coeff = take_number(section, prefix, "coeff", kind_line)?;
            Ok(BranchKind::LogReciprocal { anchor, coeff })
        }
        "iter_log_power" => {
            let (rline, rvalue) = section
                .take(&format!("{prefix}rho"))
                .ok_or_else(|| parse_err(kind_line, format!("missing '{prefix}rho'")))?;
            let rho = parse_number(&rvalue, rline)?;
            let rho_max = (-std::f64::consts::E.powf(std::f64::consts::E)).exp();
            if !(rho > 0.0 && rho < rho_max) {
                return Err(parse_err(rline, format!("rho must lie in (0, {rho_max:e})")));
            }
            Ok(BranchKind::IterLogPower { rho })
        }
        "derivative_blend" => {
            let x0 = take_number(section, prefix, "x0", kind_line)?;
            let x1 = take_number(section, prefix, "x1", kind_line)?;
            if !(x1 > x0) {
                return Err(parse_err(kind_line, "derivative_blend needs x1 > x0"));
            }
            let d0 = take_number(section, prefix, "d0", kind_line)?;
            let d1 = take_number(section, prefix, "d1", kind_line)?;
            let y0 = take_number(section, prefix, "y0", kind_line)?;
            Ok(BranchKind::DerivativeBlend { x0, x1, d0, d1, y0 })
        }
        "glued" => {
            let mut pieces: Vec<(f64, f64, BranchKind)> = Vec::new();
            loop {
                let sub = format!("{prefix}piece.{}.", pieces.len());
                if !section.has(&format!("{sub}kind")) {
                    break;
                }
                let (rline, rvalue) = section
                    .take(&format!("{sub}range"))
                    .ok_or_else(|| parse_err(kind_line, format!("missing '{sub}range'")))?;
                let range = parse_list(&rvalue, rline)?;
                if range.len() != 2 || range[0] >= range[1] {
                    return Err(parse_err(rline, "range takes two increasing values"));
                }
                if let Some(&(_, prev_hi, _)) = pieces.last() {
                    if range[0] != prev_hi {
                        return Err(parse_err(rline, "piece ranges must be contiguous"));
                    }
                }
                let kind = build_kind(section, &sub)?;
                pieces.push((range[0], range[1], kind));
            }
            if pieces.is_empty() {
                return Err(parse_err(kind_line, "glued branch needs at least 'piece.0.kind'"));
            }
            Ok(BranchKind::Glued { pieces })
        }
        "composite" => {
            let mut chain = Vec::new();
            loop {
                let sub = format!("{prefix}chain.{}.", chain.len());
                if !section.has(&format!("{sub}kind")) {
                    break;
                }
                chain.push(build_kind(section, &sub)?);
            }
            if chain.is_empty() {
                return Err(parse_err(kind_line, "composite branch needs at least 'chain.0.kind'"));
            }
            Ok(BranchKind::Composite { chain })
        }
        "reflected" => {
            let sum = take_number(section, prefix, "sum", kind_line)?;
            let inner = build_kind(section, &format!("{prefix}inner."))?;
            Ok(BranchKind::Reflected { inner: Box::new(inner), sum })
        }
        "custom" => Err(parse_err(kind_line, "custom branches have no config form")),
        other => Err(parse_err(kind_line, format!("unknown branch kind '{other}'"))),
    }
}

fn take_number(section: &mut Section, prefix: &str, name: &str, fallback_line: usize) -> Result<f64, ConfigError> {
    let key = format!("{prefix}{name}");
    let (line, value) = section
        .take(&key)
        .ok_or_else(|| parse_err(fallback_line, format!("missing '{key}'")))?;
    parse_number(&value, line)
}

fn parse_number(raw: &str, line: usize) -> Result<f64, ConfigError> {
    let s = raw.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("expected a number, got '{num}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| parse_err(line, format!("expected a number, got '{den}'")))?;
        if d == 0.0 {
            return Err(parse_err(line, "zero denominator in rational literal"));
        }
        return Ok(n / d);
    }
    s.parse().map_err(|_| parse_err(line, format!("expected a number, got '{s}'")))
}

fn parse_list(raw: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    raw.split(',').map(|part| parse_number(part, line)).collect()
}

/// Inverse of [`parse_config`] up to comments and number spelling:
/// the output reparses to an identical config.
pub fn serialize_config(cfg: &MapConfig) -> String {
    let mut out = String::new();
    let points: Vec<String> = cfg.partition.iter().map(|p| format!("{p:?}")).collect();
    out.push_str(&format!("partition = {}\n", points.join(", ")));
    if let Some(e) = cfg.eps_markov {
        out.push_str(&format!("eps_markov = {e:?}\n"));
    }
    if let Some(e) = cfg.eps_grid {
        out.push_str(&format!("eps_grid = {e:?}\n"));
    }
    if let Some(d) = cfg.depth {
        out.push_str(&format!("depth = {d}\n"));
    }
    for spec in &cfg.branches {
        out.push_str("\n[branch]\n");
        if spec.orientation != 0 {
            out.push_str(&format!("orientation = {:+}\n", spec.orientation));
        }
        write_kind(&mut out, "", &spec.kind);
    }
    out
}

fn kv(out: &mut String, prefix: &str, name: &str, value: &str) {
    out.push_str(&format!("{prefix}{name} = {value}\n"));
}

fn write_kind(out: &mut String, prefix: &str, kind: &BranchKind) {
    match kind {
        BranchKind::Affine { slope, intercept } => {
            kv(out, prefix, "kind", "affine");
            kv(out, prefix, "slope", &format!("{slope:?}"));
            kv(out, prefix, "intercept", &format!("{intercept:?}"));
        }
        BranchKind::PowerOffset { anchor, coeff, alpha, offset } => {
            kv(out, prefix, "kind", "power_offset");
            kv(out, prefix, "anchor", &format!("{anchor:?}"));
            kv(out, prefix, "coeff", &format!("{coeff:?}"));
            kv(out, prefix, "alpha", &format!("{alpha:?}"));
            kv(out, prefix, "offset", &format!("{offset:?}"));
        }
        BranchKind::LogReciprocal { anchor, coeff } => {
            kv(out, prefix, "kind", "log_reciprocal");
            kv(out, prefix, "anchor", &format!("{anchor:?}"));
            kv(out, prefix, "coeff", &format!("{coeff:?}"));
        }
        BranchKind::IterLogPower { rho } => {
            kv(out, prefix, "kind", "iter_log_power");
            kv(out, prefix, "rho", &format!("{rho:?}"));
        }
        BranchKind::DerivativeBlend { x0, x1, d0, d1, y0 } => {
            kv(out, prefix, "kind", "derivative_blend");
            kv(out, prefix, "x0", &format!("{x0:?}"));
            kv(out, prefix, "x1", &format!("{x1:?}"));
            kv(out, prefix, "d0", &format!("{d0:?}"));
            kv(out, prefix, "d1", &format!("{d1:?}"));
            kv(out, prefix, "y0", &format!("{y0:?}"));
        }
        BranchKind::Glued { pieces } => {
            kv(out, prefix, "kind", "glued");
            for (i, (lo, hi, piece)) in pieces.iter().enumerate() {
                let sub = format!("{prefix}piece.{i}.");
                out.push_str(&format!("{sub}range = {lo:?}, {hi:?}\n"));
                write_kind(out, &sub, piece);
            }
        }
        BranchKind::Composite { chain } => {
            kv(out, prefix, "kind", "composite");
            for (i, link) in chain.iter().enumerate() {
                write_kind(out, &format!("{prefix}chain.{i}."), link);
            }
        }
        BranchKind::Reflected { inner, sum } => {
            kv(out, prefix, "kind", "reflected");
            kv(out, prefix, "sum", &format!("{sum:?}"));
            write_kind(out, &format!("{prefix}inner."), inner);
        }
        BranchKind::Custom { .. } => unreachable!("custom branches are rejected before serialization"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLING: &str = "partition = 0, 1/2, 1\n\n[branch]\nkind = affine\nslope = 2\nintercept = 0\n\n[branch]\nkind = affine\nslope = 2\nintercept = -1\n";

    #[test]
    fn doubling_text_round_trips() {
        let cfg = parse_config(DOUBLING).expect("parses");
        assert_eq!(cfg.partition, vec![0.0, 0.5, 1.0]);
        let text = serialize_config(&cfg);
        let again = parse_config(&text).expect("reparses");
        assert_eq!(serialize_config(&again), text, "serialization is a fixed point");
    }

    #[test]
    fn rationals_and_comments_are_accepted() {
        let text = "# a comment\npartition = 0, 3/4, 1  # trailing\n\n[branch]\nkind = affine\nslope = 4/3\nintercept = 0\n\n[branch]\nkind = affine\nslope = 4\nintercept = -3\n";
        let cfg = parse_config(text).expect("parses");
        assert_eq!(cfg.partition[1], 0.75);
        match cfg.branches[0].kind {
            BranchKind::Affine { slope, .. } => assert!((slope - 4.0 / 3.0).abs() < 1e-15),
            ref other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_the_line() {
        let text = "partition = 0, 1, 1/2\n\n[branch]\nkind = affine\nslope = 2\nintercept = 0\n";
        match parse_layout(text) {
            Err(ConfigError::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("strictly increasing"), "{message}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = "partition = 0, 1\nwobble = 3\n\n[branch]\nkind = affine\nslope = 2\nintercept = 0\n";
        match parse_layout(text) {
            Err(ConfigError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("wobble"), "{message}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_markov_maps_fail_validation_not_parsing() {
        let text = "partition = 0, 1/2, 1\n\n[branch]\nkind = affine\nslope = 3/2\nintercept = 0\n\n[branch]\nkind = affine\nslope = 2\nintercept = -1\n";
        match parse_config(text) {
            Err(ConfigError::Validation(MapError::NotMarkov { index: 0, .. })) => {}
            other => panic!("expected a Markov violation, got {other:?}"),
        }
    }

    #[test]
    fn glued_sections_round_trip() {
        let text = "partition = 0, 1/2, 1\n\n[branch]\nkind = glued\npiece.0.range = 0, 1/16\npiece.0.kind = power_offset\npiece.0.anchor = 0\npiece.0.coeff = 1\npiece.0.alpha = 2\npiece.0.offset = 0\npiece.1.range = 1/16, 1/2\npiece.1.kind = derivative_blend\npiece.1.x0 = 1/16\npiece.1.x1 = 1/2\npiece.1.d0 = 2\npiece.1.d1 = 10/7\npiece.1.y0 = 1/4\n\n[branch]\nkind = affine\nslope = 2\nintercept = -1\n";
        let cfg = parse_config(text).expect("parses");
        let text2 = serialize_config(&cfg);
        let again = parse_config(&text2).expect("reparses");
        assert_eq!(serialize_config(&again), text2);
    }
}
