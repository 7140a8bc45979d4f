//! Hamiltonian identification from sampled probe traces.

pub mod config;
pub mod fig2;
pub mod fit;
pub mod identify;

pub use config::{
    default_q, simulate_trace, simulate_trace_with_rng, DataTrace, ExperimentConfig, ProbeEntry,
};
pub use fig2::{
    benchmark_spec, default_grid, run_fig2_experiment, write_fig2_csv, Fig2Row, Fig2Settings,
};
pub use fit::{
    chebyshev_design, design_matrix, entry_error_bound, estimate_entry, truncation_bound, EntryFit,
    TruncationBound, FIT_CONDITION_LIMIT,
};
pub use identify::{
    identify_from_traces, identify_hamiltonian, identify_matrix, probe_plan, write_estimation_csv,
    EntryReport, EstimationResult, NormSource, ProbeChoice,
};

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    const DIGITS: usize = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        let decimals = (DIGITS as i32 - 1 - exp) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_sig(0.1), "0.1");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(-2.5e-7), "-2.5e-07");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(0.0001), "0.0001");
        assert_eq!(format_sig(999999999999.5), "1e+12");
    }
}
