//! Plain-text rendering of analysis results.
//!
//! Every renderer is deterministic: the same map and depth produce
//! byte-identical output.

use mil_core::adapted::BetaSource;
use mil_core::{
    AdaptednessStatus, AdaptednessVerdict, BetaInterval, DimensionBracket, HolderClass,
    LocalProfile, LorenzFamilyReport, LorenzScenario, LyapunovBracket, MarkovIntervalMap,
    OrbitClass, Rule, SeriesBoundReport, SeriesVerdict, Side, SingularityInfo, ValidationReport,
};

pub fn status_token(status: AdaptednessStatus) -> &'static str {
    match status {
        AdaptednessStatus::Adapted => "ADAPTED",
        AdaptednessStatus::Nonadapted => "NONADAPTED",
        AdaptednessStatus::AllMeasuresAdapted => "ALL_MEASURES_ADAPTED",
        AdaptednessStatus::Indeterminate => "INDETERMINATE",
    }
}

pub fn rule_text(rule: Rule) -> &'static str {
    match rule {
        Rule::NonrecurrentHolder => {
            "the singular orbit never returns and the anchor obeys a Holder bound, so every invariant measure is adapted"
        }
        Rule::NonrecurrentNotHolder => {
            "the singular orbit never returns but no Holder bound holds at the anchor; decided by the series test"
        }
        Rule::FullStrengthSingularity => "the blow-up exponent reaches 1, too strong for any entropy",
        Rule::EntropyAboveBand => "entropy clears the upper edge of the blow-up band",
        Rule::EntropyBelowBand => "entropy falls below the lower edge of the blow-up band",
        Rule::PowerLawMatchesEntropy => "exact power law at a fixed singular point with h = log alpha",
        Rule::InsideBand => "entropy lands inside the blow-up band; no exact rule applies",
    }
}

fn side_text(side: Side) -> &'static str {
    match side {
        Side::Plus => "from the right",
        Side::Minus => "from the left",
        Side::None => "two-sided",
    }
}

fn orbit_text(orbit: OrbitClass) -> String {
    match orbit {
        OrbitClass::Periodic { period: 1 } => "fixed point".to_string(),
        OrbitClass::Periodic { period } => format!("periodic with period {period}"),
        OrbitClass::Preperiodic { preperiod, period } => {
            format!("preperiodic: enters a period-{period} cycle after {preperiod} steps")
        }
    }
}

fn holder_text(holder: HolderClass) -> String {
    match holder {
        HolderClass::Holder { exponent, constant } => {
            format!("Holder inverse with exponent {exponent} and constant {constant}")
        }
        HolderClass::NotHolder => "no Holder bound at the anchor".to_string(),
    }
}

fn profile_text(profile: &LocalProfile) -> String {
    match profile {
        LocalProfile::Power { alpha, coeff } => {
            format!("exact power law, alpha = {alpha}, coeff = {coeff}")
        }
        LocalProfile::LogType { coeff } => format!("logarithmic blow-up, coeff = {coeff}"),
        LocalProfile::IterLogType { rho } => format!("iterated-log power on (0, {rho:?})"),
        LocalProfile::Unknown => "no closed form; sampled".to_string(),
    }
}

fn beta_text(beta: &BetaInterval) -> String {
    let source = match beta.source {
        BetaSource::ClosedForm => "closed form",
        BetaSource::Sampled { .. } => "sampled",
    };
    format!("[{}, {}] ({source})", beta.lower, beta.upper)
}

fn band_text(band: (f64, f64)) -> String {
    if band.1.is_finite() {
        format!("[{}, {}]", band.0, band.1)
    } else {
        format!("[{}, inf)", band.0)
    }
}

fn series_line(report: &SeriesBoundReport) -> String {
    match &report.verdict {
        SeriesVerdict::ConvergesWithBound { total_upper, tail_bound, ratio } => format!(
            "series (depth {}): converges; total upper bound {total_upper}, tail bound {tail_bound:e}, worst tail ratio {ratio}",
            report.depth
        ),
        SeriesVerdict::DivergesWithRate { slope } => format!(
            "series (depth {}): diverges; lower partial sums grow {slope} per ring",
            report.depth
        ),
        SeriesVerdict::Inconclusive { computed_to } => format!(
            "series (depth {}): inconclusive after {computed_to} rings",
            report.depth
        ),
    }
}

pub fn render_validation(map: &MarkovIntervalMap, report: &ValidationReport) -> String {
    let (a, b) = map.domain();
    let mut out = format!("map on [{a}, {b}]: {} branches\n", map.branch_count());
    out.push_str(&format!("  lambda_exp = {}\n", report.lambda_exp));
    for i in 0..map.branch_count() {
        let (lo, hi) = map.interval(i);
        let (ilo, ihi) = report.branch_images[i];
        out.push_str(&format!(
            "  branch {i}: [{lo}, {hi}] -> [{ilo}, {ihi}], orientation {:+}\n",
            report.orientations[i]
        ));
    }
    out.push_str(&format!("  max markov mismatch = {:e}\n", report.max_markov_mismatch));
    out.push_str("OK\n");
    out
}

/// The classify output: a status line, then the numbers behind it.
pub fn render_verdict(verdict: &AdaptednessVerdict) -> String {
    let mut out = format!("{} ({})\n", status_token(verdict.status), rule_text(verdict.rule));
    out.push_str(&format!("entropy = {}\n", verdict.entropy));
    out.push_str(&format!("beta = {}\n", beta_text(&verdict.beta)));
    if let Some(band) = verdict.band {
        let period = verdict.period.expect("a band comes from a periodic orbit");
        out.push_str(&format!("band = {} (period {period})\n", band_text(band)));
    }
    if let Some(series) = &verdict.series {
        out.push_str(&series_line(series));
        out.push('\n');
    }
    if verdict.reflected {
        out.push_str("analysis ran on the mirrored map (the singular side faced left)\n");
    }
    out
}

pub fn render_singularity(sing: &SingularityInfo) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "  anchor x = {} ({}), branch {}\n",
        sing.location.x,
        side_text(sing.location.side),
        sing.branch_index
    ));
    out.push_str(&format!("  orbit: {}\n", orbit_text(sing.orbit)));
    out.push_str(&format!("  regularity: {}\n", holder_text(sing.holder)));
    out.push_str(&format!("  profile: {}\n", profile_text(&sing.profile)));
    out
}

pub fn render_components(
    components: &[(Vec<usize>, Option<f64>)],
    singular_symbol: Option<usize>,
) -> String {
    let mut out = String::from("coding components (cyclic ones carry an eigenvalue)\n");
    for (symbols, eigenvalue) in components {
        let list: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
        let mark = match singular_symbol {
            Some(s) if symbols.contains(&s) => " <- singular branch",
            _ => "",
        };
        match eigenvalue {
            Some(lambda) => out.push_str(&format!(
                "  {{{}}}: eigenvalue {lambda}, entropy {}{mark}\n",
                list.join(", "),
                lambda.ln()
            )),
            None => out.push_str(&format!("  {{{}}}: transient{mark}\n", list.join(", "))),
        }
    }
    out
}

pub fn render_adjacency(rows: &[Vec<f64>]) -> String {
    let mut out = String::from("  adjacency\n");
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&v| format!("{v}")).collect();
        out.push_str(&format!("    {i}: {}\n", cells.join(" ")));
    }
    out
}

pub fn render_dimension(entropy: f64, lyap: &LyapunovBracket, dim: &DimensionBracket) -> String {
    let mut out = String::new();
    out.push_str(&format!("  entropy = {entropy}\n"));
    out.push_str(&format!("  lyapunov exponent in {}\n", band_text((lyap.lower, lyap.upper))));
    if lyap.lower_diverging && !lyap.upper.is_finite() {
        out.push_str("  the log-derivative integral diverges: the exponent is infinite\n");
    }
    out.push_str(&format!("  dimension in {}\n", band_text((dim.lower, dim.upper))));
    out
}

pub fn render_series_csv(report: &SeriesBoundReport) -> String {
    let mut out = String::from("n,lower_term,upper_term,lower_partial,upper_partial\n");
    for term in &report.terms {
        out.push_str(&format!(
            "{},{:.15e},{:.15e},{:.15e},{:.15e}\n",
            term.k, term.lower_term, term.upper_term, term.lower_partial, term.upper_partial
        ));
    }
    out
}

pub fn render_lorenz(report: &LorenzFamilyReport) -> String {
    let reason = match (report.status, report.threshold) {
        (AdaptednessStatus::AllMeasuresAdapted, _) => {
            "nonperiodic critical orbit: the singular orbit never returns".to_string()
        }
        (AdaptednessStatus::Adapted, Some(t)) => {
            format!("log alpha = {} stays below the periodic threshold {t}", report.log_alpha)
        }
        (AdaptednessStatus::Nonadapted, Some(t)) => {
            format!("log alpha = {} exceeds the periodic threshold {t}", report.log_alpha)
        }
        (AdaptednessStatus::Indeterminate, Some(t)) => {
            format!("log alpha = {} sits within margin of the threshold {t}", report.log_alpha)
        }
        (status, None) => format!("{status:?} without a threshold"),
    };
    let mut out = format!("{} ({reason})\n", status_token(report.status));
    out.push_str(&format!(
        "eigenvalues: lambda1 = {}, lambda2 = {}, lambda3 = {}\n",
        report.params.lambda1, report.params.lambda2, report.params.lambda3
    ));
    out.push_str(&format!(
        "branch exponent alpha = {} (contraction ratio b = {})\n",
        report.params.alpha, report.params.b
    ));
    if let LorenzScenario::PeriodicCritical { period, entropy } = report.scenario {
        out.push_str(&format!(
            "scenario: periodic critical orbit, period {period}, return entropy {entropy}\n"
        ));
    } else {
        out.push_str("scenario: nonperiodic critical orbit\n");
    }
    out.push_str(&format!(
        "sample map with the same exponent: {} ({})\n",
        status_token(report.sample_verdict.status),
        rule_text(report.sample_verdict.rule)
    ));
    out
}
