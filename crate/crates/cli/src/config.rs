use serde::{Deserialize, Serialize};

use holoflow::expr::{parse as parse_expr, Expr};
use holoflow::Complex64;

/// Effective run configuration: every documented flag, resolved. Serializes
/// to the JSON schema accepted back through `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub f: Option<String>,
    pub rational: Option<String>,
    pub psi: Option<String>,
    pub phi: Option<String>,
    pub elliptic_wp: bool,
    pub region: [f64; 4],
    pub res: [usize; 2],
    pub bins: usize,
    pub palette: String,
    pub z0: Option<String>,
    pub z0_base: Option<String>,
    pub tau: f64,
    pub steps: usize,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub depth: usize,
    pub lattice: Option<[String; 2]>,
    pub overlay: [u8; 3],
    pub output: Option<String>,
}

/// Unresolved option set, as parsed from flags or loaded from a config file.
/// `None` means "not specified here"; flags win over the file, the file wins
/// over defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PartialConfig {
    pub f: Option<String>,
    pub rational: Option<String>,
    pub psi: Option<String>,
    pub phi: Option<String>,
    pub elliptic_wp: Option<bool>,
    pub region: Option<[f64; 4]>,
    pub res: Option<[usize; 2]>,
    pub bins: Option<usize>,
    pub palette: Option<String>,
    pub z0: Option<String>,
    pub z0_base: Option<String>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub depth: Option<usize>,
    pub lattice: Option<[String; 2]>,
    pub overlay: Option<[u8; 3]>,
    pub output: Option<String>,
}

impl PartialConfig {
    /// Resolves flags over file values over defaults.
    pub fn resolve(command: &str, flags: PartialConfig, file: Option<PartialConfig>) -> RunConfig {
        let file = file.unwrap_or_default();
        // A field source given on the command line supersedes all sources in
        // the file, not just its own slot.
        let flags_have_source = flags.f.is_some()
            || flags.rational.is_some()
            || flags.psi.is_some()
            || flags.phi.is_some()
            || flags.elliptic_wp == Some(true);
        let (f, rational, psi, phi, elliptic_wp) = if flags_have_source {
            (
                flags.f,
                flags.rational,
                flags.psi,
                flags.phi,
                flags.elliptic_wp.unwrap_or(false),
            )
        } else {
            (
                file.f,
                file.rational,
                file.psi,
                file.phi,
                file.elliptic_wp.unwrap_or(false),
            )
        };
        RunConfig {
            command: command.to_string(),
            f,
            rational,
            psi,
            phi,
            elliptic_wp,
            region: flags.region.or(file.region).unwrap_or([-2.0, 2.0, -2.0, 2.0]),
            res: flags.res.or(file.res).unwrap_or([800, 800]),
            bins: flags.bins.or(file.bins).unwrap_or(24),
            palette: flags.palette.or(file.palette).unwrap_or_else(|| "duotone".into()),
            z0: flags.z0.or(file.z0),
            z0_base: flags.z0_base.or(file.z0_base),
            tau: flags.tau.or(file.tau).unwrap_or(1.0),
            steps: flags.steps.or(file.steps).unwrap_or(100),
            h: flags.h.or(file.h),
            tol: flags.tol.or(file.tol),
            depth: flags.depth.or(file.depth).unwrap_or(5),
            lattice: flags.lattice.or(file.lattice),
            overlay: flags.overlay.or(file.overlay).unwrap_or([255, 0, 0]),
            output: flags.output.or(file.output),
        }
    }
}

/// Parses a complex literal in the `a+bi` form (no spaces; decimals only).
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    match parse_expr(text) {
        Ok(Expr::Const(c)) => Ok(c),
        Ok(_) => Err(format!("`{text}` is not a complex literal")),
        Err(e) => Err(format!("bad complex literal `{text}`: {e}")),
    }
}

pub fn parse_region(text: &str) -> Result<[f64; 4], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("region `{text}` must be x_min,x_max,y_min,y_max"));
    }
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|_| format!("bad region component `{p}`"))?;
    }
    Ok(out)
}

pub fn parse_resolution(text: &str) -> Result<[usize; 2], String> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(format!("resolution `{text}` must be WIDTHxHEIGHT"));
    }
    let w = parts[0].parse().map_err(|_| format!("bad width `{}`", parts[0]))?;
    let h = parts[1].parse().map_err(|_| format!("bad height `{}`", parts[1]))?;
    Ok([w, h])
}

pub fn parse_lattice(text: &str) -> Result<[String; 2], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("lattice `{text}` must be g1,g2 (two complex literals)"));
    }
    parse_complex(parts[0])?;
    parse_complex(parts[1])?;
    Ok([parts[0].to_string(), parts[1].to_string()])
}

pub fn parse_rgb(text: &str) -> Result<[u8; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("color `{text}` must be r,g,b"));
    }
    let mut out = [0u8; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.trim().parse().map_err(|_| format!("bad channel `{p}`"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("-0.5-0.5i").unwrap(), Complex64::new(-0.5, -0.5));
        assert_eq!(
            parse_complex("0+1.5707963267948966i").unwrap(),
            Complex64::new(0.0, std::f64::consts::FRAC_PI_2)
        );
        assert!(parse_complex("z+1").is_err());
    }

    #[test]
    fn region_and_resolution() {
        assert_eq!(parse_region("-2,2,-2,2").unwrap(), [-2.0, 2.0, -2.0, 2.0]);
        assert!(parse_region("1,2,3").is_err());
        assert_eq!(parse_resolution("800x600").unwrap(), [800, 600]);
        assert!(parse_resolution("800").is_err());
    }

    #[test]
    fn precedence_flags_over_file_over_defaults() {
        let flags = PartialConfig {
            bins: Some(12),
            ..Default::default()
        };
        let file = PartialConfig {
            bins: Some(48),
            palette: Some("hue12".into()),
            rational: Some("z".into()),
            ..Default::default()
        };
        let rc = PartialConfig::resolve("plane", flags, Some(file));
        assert_eq!(rc.bins, 12, "flag wins");
        assert_eq!(rc.palette, "hue12", "file beats default");
        assert_eq!(rc.res, [800, 800], "default fills the rest");
        assert_eq!(rc.rational.as_deref(), Some("z"), "file supplies the field");
    }

    #[test]
    fn flag_field_source_supersedes_file_sources() {
        let flags = PartialConfig {
            phi: Some("sin(z)".into()),
            ..Default::default()
        };
        let file = PartialConfig {
            rational: Some("z".into()),
            ..Default::default()
        };
        let rc = PartialConfig::resolve("plane", flags, Some(file));
        assert_eq!(rc.phi.as_deref(), Some("sin(z)"));
        assert_eq!(rc.rational, None, "file source dropped when a flag source exists");
    }

    #[test]
    fn run_config_json_round_trip() {
        let rc = PartialConfig::resolve(
            "compare",
            PartialConfig {
                f: Some("exp(z)".into()),
                z0: Some("0+1.5i".into()),
                h: Some(0.01),
                output: Some("err.csv".into()),
                ..Default::default()
            },
            None,
        );
        let json = serde_json::to_string_pretty(&rc).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(rc, back);
    }
}
