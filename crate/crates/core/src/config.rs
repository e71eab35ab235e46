//! Scenario configuration files: a flat `key = value` format with
//! `[section]` headers. Sections: topology, sweep, solver, profiles,
//! demands. `#` and `;` start comments; grid values accept inclusive
//! ranges (`1..6`) or comma lists (`1,2,5.5`).

use std::path::Path;

use crate::error::{Error, Result};
use crate::optimizer::CandidatePolicy;
use crate::powermodel::Catalog;
use crate::scalar::Scalar;
use crate::scenarios::{ScenarioConfig, SolverKind};
use crate::topology::NodeKind;
use crate::workload::DEFAULT_INTENSITY;

#[derive(Debug, Clone)]
pub struct ParsedConfig<T> {
    pub scenario: ScenarioConfig<T>,
    pub catalog: Catalog<T>,
}

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

/// Inclusive integer range `a..b`, comma list, or single value.
pub fn parse_usize_grid(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("cannot parse '{s}' as an integer grid"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect()
}

/// Inclusive range `a..b` with unit step, comma list, or single value.
pub fn parse_float_grid<T: Scalar>(s: &str) -> Result<Vec<T>> {
    let bad = || Error::InvalidParameter(format!("cannot parse '{s}' as a numeric grid"));
    if let Some((a, b)) = s.split_once("..") {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        let mut out = Vec::new();
        let mut v = a;
        while v <= b + 1e-9 {
            out.push(T::c(v));
            v += 1.0;
        }
        return Ok(out);
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map(T::c).map_err(|_| bad()))
        .collect()
}

pub fn parse_policy(s: &str) -> Result<CandidatePolicy> {
    match s {
        "hierarchy" => Ok(CandidatePolicy::Hierarchy),
        "peers" => Ok(CandidatePolicy::Peers { cross_site: true }),
        "peers-local" => Ok(CandidatePolicy::Peers { cross_site: false }),
        "cloud-only" => Ok(CandidatePolicy::CloudOnly),
        other => Err(Error::InvalidParameter(format!(
            "unknown candidate policy '{other}' (expected hierarchy, peers, peers-local or cloud-only)"
        ))),
    }
}

fn device_kind(s: &str) -> Option<NodeKind> {
    Some(match s {
        "iot" => NodeKind::IotDevice,
        "accessfog" => NodeKind::AccessFog,
        "edgefog" => NodeKind::EdgeFog,
        "metro_switch" => NodeKind::MetroSwitch,
        "metro_router" => NodeKind::MetroRouter,
        "core" => NodeKind::CoreNode,
        "cloud_switch" => NodeKind::CloudLanSwitch,
        "cloud_router" => NodeKind::CloudLanRouter,
        "cloud_server" => NodeKind::CloudServer,
        _ => return None,
    })
}

fn apply_profile_override<T: Scalar>(
    catalog: &mut Catalog<T>,
    line: usize,
    key: &str,
    value: &str,
) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let [dev, sub, field] = parts[..] else {
        return Err(cfg_err(
            line,
            format!("profile key '{key}' is not of the form device.subsystem.field"),
        ));
    };
    let kind = device_kind(dev)
        .ok_or_else(|| cfg_err(line, format!("unknown device '{dev}' in profile key")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| cfg_err(line, format!("profile value '{value}' is not a number")))?;
    let profile = catalog.profile_mut(kind);
    let slot = match sub {
        "net" => profile.network.as_mut(),
        "cpu" => profile.processing.as_mut(),
        other => {
            return Err(cfg_err(
                line,
                format!("unknown subsystem '{other}' (expected net or cpu)"),
            ))
        }
    };
    let Some(slot) = slot else {
        return Err(cfg_err(
            line,
            format!("device '{dev}' has no {sub} subsystem to override"),
        ));
    };
    match field {
        "idle_w" => slot.idle_power = T::c(value),
        "max_w" => slot.max_power = T::c(value),
        "capacity" => slot.capacity = T::c(value),
        "pue" => slot.pue = T::c(value),
        other => {
            return Err(cfg_err(
                line,
                format!("unknown profile field '{other}' (expected idle_w, max_w, capacity or pue)"),
            ))
        }
    }
    Ok(())
}

pub fn parse_config<T: Scalar>(text: &str) -> Result<ParsedConfig<T>> {
    let mut catalog = Catalog::table1();
    let mut name = String::from("scenario");
    let mut site_count = 4usize;
    let mut iot_per_site = 5usize;
    let mut core_hop_count = 4usize;
    let mut active_iot_count: Option<usize> = None;
    let mut intensity = T::c(DEFAULT_INTENSITY);
    let mut traffic_mbps: Vec<T> = parse_float_grid("1..10")?;
    let mut k_values: Vec<usize> = (1..=6).collect();
    let mut solver = SolverKind::Exact;
    let mut policy = CandidatePolicy::Hierarchy;
    let mut min_alloc = T::one();
    let mut max_nodes = 500_000u64;
    let mut sources: Vec<(usize, usize, T)> = Vec::new();

    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw
            .split(|c| c == '#' || c == ';')
            .next()
            .unwrap_or("")
            .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(sec) = rest.strip_suffix(']') else {
                return Err(cfg_err(lineno, "unterminated section header"));
            };
            section = sec.trim().to_string();
            if !matches!(
                section.as_str(),
                "topology" | "sweep" | "solver" | "profiles" | "demands"
            ) {
                return Err(cfg_err(lineno, format!("unknown section '{section}'")));
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(cfg_err(lineno, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim();
        let value = value.trim();
        let at = |e: Error| match e {
            Error::Config { .. } => e,
            other => cfg_err(lineno, other.to_string()),
        };
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| cfg_err(lineno, format!("'{v}' is not a non-negative integer")))
        };
        let parse_float = |v: &str| -> Result<T> {
            v.parse::<f64>()
                .map(T::c)
                .map_err(|_| cfg_err(lineno, format!("'{v}' is not a number")))
        };
        match (section.as_str(), key) {
            ("", "name") => name = value.to_string(),
            ("topology", "sites") => site_count = parse_usize(value)?,
            ("topology", "iot_per_site") => iot_per_site = parse_usize(value)?,
            ("topology", "core_hops") => core_hop_count = parse_usize(value)?,
            ("sweep", "active_iot") => active_iot_count = Some(parse_usize(value)?),
            ("sweep", "intensity") => intensity = parse_float(value)?,
            ("sweep", "traffic_mbps") => traffic_mbps = parse_float_grid(value).map_err(at)?,
            ("sweep", "k") => k_values = parse_usize_grid(value).map_err(at)?,
            ("solver", "kind") => solver = value.parse().map_err(at)?,
            ("solver", "policy") => policy = parse_policy(value).map_err(at)?,
            ("solver", "min_alloc") => min_alloc = parse_float(value)?,
            ("solver", "max_nodes") => {
                max_nodes = value
                    .parse()
                    .map_err(|_| cfg_err(lineno, format!("'{value}' is not a node budget")))?
            }
            ("profiles", key) => apply_profile_override(&mut catalog, lineno, key, value)?,
            ("demands", "demand") => {
                let fields: Vec<&str> = value.split_whitespace().collect();
                let [site, dev, mbps] = fields[..] else {
                    return Err(cfg_err(
                        lineno,
                        "demand lines are '<site> <device> <mbps>'",
                    ));
                };
                sources.push((parse_usize(site)?, parse_usize(dev)?, parse_float(mbps)?));
            }
            (sec, key) => {
                let place = if sec.is_empty() {
                    "outside any section".to_string()
                } else {
                    format!("in section [{sec}]")
                };
                return Err(cfg_err(lineno, format!("unknown key '{key}' {place}")));
            }
        }
    }

    catalog.validate().map_err(|e| cfg_err(0, e.to_string()))?;
    let scenario = ScenarioConfig {
        name,
        site_count,
        iot_per_site,
        core_hop_count,
        active_iot_count: active_iot_count.unwrap_or(site_count * iot_per_site),
        intensity,
        traffic_mbps,
        k_values,
        solver,
        policy,
        min_alloc,
        max_nodes,
        sources: if sources.is_empty() {
            None
        } else {
            Some(sources)
        },
    };
    scenario.validate().map_err(|e| cfg_err(0, e.to_string()))?;
    Ok(ParsedConfig { scenario, catalog })
}

pub fn load_config<T: Scalar>(path: &Path) -> Result<ParsedConfig<T>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_usize_grid("1..6").unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse_usize_grid("3").unwrap(), vec![3]);
        assert_eq!(parse_usize_grid("2,4,6").unwrap(), vec![2, 4, 6]);
        assert!(parse_usize_grid("6..1").is_err());
        assert!(parse_usize_grid("a..b").is_err());
        assert_eq!(
            parse_float_grid::<f64>("1..4").unwrap(),
            vec![1.0, 2.0, 3.0, 4.0]
        );
        assert_eq!(
            parse_float_grid::<f64>("0.5, 2.5").unwrap(),
            vec![0.5, 2.5]
        );
    }

    #[test]
    fn defaults_apply() {
        let parsed = parse_config::<f64>("").unwrap();
        let s = parsed.scenario;
        assert_eq!(s.site_count, 4);
        assert_eq!(s.iot_per_site, 5);
        assert_eq!(s.core_hop_count, 4);
        assert_eq!(s.active_iot_count, 20);
        assert_eq!(s.traffic_mbps.len(), 10);
        assert_eq!(s.k_values, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(s.solver, SolverKind::Exact);
        assert_eq!(s.min_alloc, 1.0);
    }

    #[test]
    fn full_file_round_trip() {
        let text = "\
name = demo            # scenario label
[topology]
sites = 2
iot_per_site = 3
core_hops = 5
[sweep]
active_iot = 4
intensity = 870
traffic_mbps = 2,4
k = 1..3
[solver]
kind = greedy
policy = peers-local
min_alloc = 0.5
max_nodes = 1000
[profiles]
iot.cpu.capacity = 1200
[demands]
demand = 0 1 2.5
";
        let parsed = parse_config::<f64>(text).unwrap();
        let s = &parsed.scenario;
        assert_eq!(s.name, "demo");
        assert_eq!(s.site_count, 2);
        assert_eq!(s.core_hop_count, 5);
        assert_eq!(s.intensity, 870.0);
        assert_eq!(s.traffic_mbps, vec![2.0, 4.0]);
        assert_eq!(s.k_values, vec![1, 2, 3]);
        assert_eq!(s.solver, SolverKind::Greedy);
        assert_eq!(s.policy, CandidatePolicy::Peers { cross_site: false });
        assert_eq!(s.sources.as_deref(), Some(&[(0, 1, 2.5)][..]));
        assert_eq!(
            parsed
                .catalog
                .processing(NodeKind::IotDevice)
                .unwrap()
                .capacity,
            1200.0
        );
    }

    #[test]
    fn errors_carry_line_numbers() {
        let check = |text: &str, want_line: usize| {
            match parse_config::<f64>(text) {
                Err(Error::Config { line, .. }) => assert_eq!(line, want_line, "{text}"),
                other => panic!("expected config error for {text:?}, got {other:?}"),
            }
        };
        check("[nope]", 1);
        check("\n[solver]\nkind = simplex", 3);
        check("[topology]\nsites = many", 2);
        check("junk line", 1);
        check("[profiles]\niot.gpu.idle_w = 1", 2);
        check("[profiles]\ncore.cpu.idle_w = 1", 2); // core has no cpu subsystem
        // idle > max is caught by catalog validation at the end (line 0)
        check("[profiles]\niot.net.idle_w = 99", 0);
    }

    #[test]
    fn bad_demand_lines_rejected() {
        assert!(parse_config::<f64>("[demands]\ndemand = 0 1").is_err());
        assert!(parse_config::<f64>("[demands]\ndemand = 0 1 x").is_err());
    }
}
