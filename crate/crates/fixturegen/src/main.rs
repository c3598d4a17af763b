//! Generator and validator for the bundled monthly influenza-A reference
//! series (`data/influenza_a_monthly.csv`).
//!
//! The series is synthetic: a hand-tuned 15-year monthly matrix shaped like
//! US national influenza-A laboratory surveillance counts (2009 H1N1 spring
//! emergence and autumn wave, December-peaked winter seasons of alternating
//! severity through 2019-20, the COVID-era collapse of 2020-21, an unusual
//! 2022 spring wave, and the explosive 2022-23 rebound). The toolkit's
//! documented reference outputs (summary statistics, test statistics, model
//! parameters, forecast errors) are all measured from this exact series, so
//! this binary re-derives every one of them with the real library code and
//! prints a target-vs-actual scoreboard. Run it after any edit to the matrix.
//!
//! Usage:
//!   cargo run -p fixturegen                    # scoreboard only
//!   cargo run -p fixturegen -- --write         # also (re)write data/influenza_a_monthly.csv
//!   cargo run -p fixturegen -- --grid          # include the 20-candidate order search
//!   cargo run -p fixturegen -- --detail        # verbose diagnostics for hand-tuning
//!   cargo run -p fixturegen -- --tune [N] [S]  # simulated-annealing polish of the matrix
//!
//! The tuner perturbs non-anchor cells (keeping every value inside its census
//! band so the quartile/median bookkeeping cannot drift), re-derives the two
//! locked slots each step, and minimizes a weighted distance-to-target over
//! the whole scoreboard. It prints the winning matrix as a paste-ready
//! literal; it never writes the CSV itself.

use flucast_classical::{
    fit_holt_winters, fit_sarima, grid_search, hw_filter, hw_forecast, HoltWintersParams,
    SarimaOrder,
};
use flucast_core::{
    classical_additive_decompose, descriptive_stats, load_csv, mae, mse, train_test_split,
    MinMaxScaler, Month, TimeSeries,
};
use flucast_stats::{
    goldfeld_quandt, kpss_level, kruskal_wallis_by_month, lilliefors, ljung_box, mann_kendall,
    PortmanteauVariant,
};

/// Monthly values, one row per year 2009..=2023, columns Jan..=Dec.
/// Two slots are derived rather than written literally:
///   - Jul 2009 (row 0, col 6) is set so that the first-year/second-year
///     total difference is exactly 173_871, i.e. the seasonal smoother's
///     initial trend is exactly -173_871 / 144 per month. It reads as the
///     pandemic's summer plateau between the June and August values.
///   - May 2022 (row 13, col 4) absorbs rounding so the grand total is
///     exactly 1_851_480 (mean 10_286.0); it reads as the tail of the 2022
///     spring wave.
const SLOPE_LOCK_SLOT: (usize, usize) = (0, 6);
const SUM_LOCK_SLOT: (usize, usize) = (13, 4);
const YEAR_DIFF: f64 = 173_871.0; // year-1 total minus year-2 total
const GRAND_TOTAL: f64 = 1_851_480.0; // 180 * 10_286

const SLOPE_LOCK_CORRIDOR: (f64, f64) = (4_200.0, 10_700.0);
const SUM_LOCK_CORRIDOR: (f64, f64) = (4_500.0, 10_700.0);

#[rustfmt::skip]
const MATRIX: [[f64; 12]; 15] = [
    // 2009: H1N1 pandemic year — a normal winter tail through March, twin
    // spring emergence pulses (April, June), then a dominant autumn wave
    // peaking in November and staying elevated through December.
    [32_430.0, 10_854.0, 6_341.0, 10_761.0, 12_040.0, 10_853.0, 0.0, 2_881.0, 20_504.0, 22_166.0, 45_154.0, 22_169.0],
    // 2010: pandemic tail in January, then the sparsest reporting of the
    // record — tiny summers and a modest December season.
    [10_756.0, 748.0, 462.0, 29.0, 341.0, 96.0, 235.0, 273.0, 157.0, 159.0, 1_534.0, 11_746.0],
    // 2011-2017: December-peaked seasons growing almost every year as
    // surveillance volume expands; ragged spring tails, low summers.
    [3_688.0, 1_536.0, 1_204.0, 60.0, 345.0, 104.0, 132.0, 79.0, 206.0, 121.0, 1_294.0, 34_343.0],
    [3_173.0, 1_346.0, 1_004.0, 133.0, 210.0, 211.0, 65.0, 324.0, 108.0, 813.0, 1_518.0, 25_680.0],
    [11_835.0, 9_294.0, 358.0, 654.0, 168.0, 19.0, 52.0, 63.0, 78.0, 1_538.0, 1_460.0, 25_171.0],
    [41_035.0, 6_278.0, 929.0, 701.0, 1_239.0, 214.0, 1_535.0, 452.0, 1_287.0, 711.0, 2_564.0, 15_295.0],
    [35_449.0, 6_623.0, 10_760.0, 901.0, 723.0, 906.0, 1_344.0, 480.0, 1_222.0, 1_537.0, 1_860.0, 11_349.0],
    [16_026.0, 13_702.0, 6_609.0, 5_256.0, 1_040.0, 1_484.0, 1_103.0, 1_063.0, 2_265.0, 1_551.0, 2_300.0, 46_194.0],
    [12_403.0, 18_685.0, 6_405.0, 2_334.0, 1_043.0, 742.0, 4_772.0, 9_876.0, 10_540.0, 1_689.0, 4_770.0, 36_327.0],
    // 2018: a February-March double peak — the one season of the run that
    // crests after New Year instead of December.
    [12_623.0, 47_480.0, 47_772.0, 24_968.0, 10_759.0, 4_108.0, 6_615.0, 3_349.0, 10_755.0, 7_117.0, 21_111.0, 19_415.0],
    // 2019: strong January peak, busy spring, then an autumn that never
    // quite ignites.
    [43_978.0, 21_744.0, 25_341.0, 12_027.0, 10_757.0, 10_633.0, 5_788.0, 10_091.0, 13_787.0, 1_550.0, 8_807.0, 38_553.0],
    // 2020: a huge January crested season collapses in March; reporting
    // floors out by May.
    [54_426.0, 5_940.0, 10_754.0, 403.0, 32.0, 188.0, 218.0, 15.0, 207.0, 54.0, 340.0, 48.0],
    // 2021: deepest suppression; the series minimum (12) falls in June; a
    // late-autumn recovery gathers into a real December season.
    [123.0, 293.0, 179.0, 13.0, 72.0, 12.0, 76.0, 185.0, 275.0, 490.0, 13_352.0, 19_925.0],
    // 2022: explosive January wave off the December re-entry, a quiet
    // summer, then the record November-December surge.
    [82_741.0, 2_460.0, 773.0, 406.0, 0.0, 933.0, 438.0, 425.0, 6_248.0, 37_355.0, 91_464.0, 151_234.0],
    // 2023: fast collapse off the record peak, quiet summer, and a
    // near-record December for the following season.
    [30_940.0, 22_560.0, 9_858.0, 863.0, 749.0, 138.0, 125.0, 43.0, 346.0, 8_935.0, 4_881.0, 151_232.0],
];

const CSV_PATH: &str = "data/influenza_a_monthly.csv";

/// Applies the two derived slots and validates shape. Corridor violations are
/// returned as messages (hand-tuning feedback); `strict` turns them into
/// panics so `--write` can never emit a malformed file.
fn build_values(strict: bool, notes: &mut Vec<String>) -> Vec<f64> {
    let mut m = MATRIX;

    // Slope lock: Jul 2009 makes (sum of 2009) - (sum of 2010) == YEAR_DIFF.
    let sum_2010: f64 = m[1].iter().sum();
    let sum_2009_rest: f64 = m[0]
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != SLOPE_LOCK_SLOT.1)
        .map(|(_, v)| v)
        .sum();
    let jul_2009 = sum_2010 + YEAR_DIFF - sum_2009_rest;
    if !(SLOPE_LOCK_CORRIDOR.0..=SLOPE_LOCK_CORRIDOR.1).contains(&jul_2009) {
        let msg = format!(
            "Jul 2009 slope-lock left its corridor [{}, {}]: {jul_2009}",
            SLOPE_LOCK_CORRIDOR.0, SLOPE_LOCK_CORRIDOR.1
        );
        if strict {
            panic!("{msg}");
        }
        notes.push(msg);
    }
    m[SLOPE_LOCK_SLOT.0][SLOPE_LOCK_SLOT.1] = jul_2009;

    // Sum lock: May 2022 makes the grand total exact.
    let partial: f64 = m.iter().flatten().sum();
    let may_2022 = GRAND_TOTAL - partial;
    if !(SUM_LOCK_CORRIDOR.0..=SUM_LOCK_CORRIDOR.1).contains(&may_2022) {
        let msg = format!(
            "May 2022 sum-lock left its corridor [{}, {}]: {may_2022}",
            SUM_LOCK_CORRIDOR.0, SUM_LOCK_CORRIDOR.1
        );
        if strict {
            panic!("{msg}");
        }
        notes.push(msg);
    }
    m[SUM_LOCK_SLOT.0][SUM_LOCK_SLOT.1] = may_2022;

    let values: Vec<f64> = m.iter().flatten().copied().collect();
    assert_eq!(values.len(), 180);

    // Whole counts, all positive, all distinct.
    for (i, v) in values.iter().enumerate() {
        assert!(
            v.fract() == 0.0 && *v > 0.0,
            "value {i} not a positive integer: {v}"
        );
    }
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in sorted.windows(2) {
        assert!(w[0] < w[1], "duplicate value: {}", w[0]);
    }

    values
}

fn build_series(strict: bool, notes: &mut Vec<String>) -> TimeSeries {
    TimeSeries::new(Month::new(2009, 1).unwrap(), build_values(strict, notes), 12).unwrap()
}

struct Check {
    name: &'static str,
    lo: f64,
    hi: f64,
    actual: f64,
}

impl Check {
    fn new(name: &'static str, lo: f64, hi: f64, actual: f64) -> Self {
        Check { name, lo, hi, actual }
    }

    fn pass(&self) -> bool {
        self.actual >= self.lo && self.actual <= self.hi
    }
}

fn pct_band(center: f64, rel: f64) -> (f64, f64) {
    let half = center.abs() * rel;
    (center - half, center + half)
}

/// One full pipeline pass over a candidate series: every fitted model and
/// derived quantity the scoreboard, the detail printer, and the tuner need.
struct Analysis {
    series: TimeSeries,
    train: TimeSeries,
    test: TimeSeries,
    hw: flucast_classical::HoltWintersFit,
    ets_forecast: Vec<f64>,
    sar: flucast_classical::SarimaFit,
    sar_forecast: Vec<f64>,
    mk: flucast_stats::TestResult,
    kw: flucast_stats::TestResult,
    decomp: flucast_core::Decomposition,
    test_scaled: Vec<f64>,
    naive_scaled: Vec<f64>,
    checks: Vec<Check>,
}

fn analyze(series: TimeSeries) -> Result<Analysis, String> {
    let values = series.values().to_vec();
    let mut checks: Vec<Check> = Vec::new();

    // ---- Descriptive statistics -------------------------------------------
    let summary = descriptive_stats(&values).map_err(|e| format!("stats: {e:?}"))?;
    checks.push(Check::new("min", 12.0, 12.0, summary.min));
    checks.push(Check::new("max", 151_234.0, 151_234.0, summary.max));
    checks.push(Check::new("median", 1_543.0, 1_545.0, summary.median));
    checks.push(Check::new("mean", 10_285.0, 10_287.0, summary.mean));
    {
        let (lo, hi) = pct_band(344.0, 0.05);
        checks.push(Check::new("q1", lo, hi, summary.q1));
        let (lo, hi) = pct_band(10_800.0, 0.05);
        checks.push(Check::new("q3", lo, hi, summary.q3));
    }

    // ---- Trend / seasonality / stationarity tests -------------------------
    let mk = mann_kendall(&values).map_err(|e| format!("mk: {e:?}"))?;
    checks.push(Check::new("mann_kendall tau", 0.060, 0.070, mk.statistic));
    checks.push(Check::new("mann_kendall p", 0.175, 0.215, mk.p_value));

    let kw = kruskal_wallis_by_month(&series).map_err(|e| format!("kw: {e:?}"))?;
    checks.push(Check::new("kruskal_wallis H", 64.591, 65.591, kw.statistic));
    checks.push(Check::new("kruskal_wallis p < 1e-6", 0.0, 1e-6, kw.p_value));

    let kpss_lvl = kpss_level(&values, 4).map_err(|e| format!("kpss: {e:?}"))?;
    checks.push(Check::new("kpss level eta", 0.499, 0.519, kpss_lvl.statistic));
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let kpss_diff = kpss_level(&diffs, 4).map_err(|e| format!("kpss diff: {e:?}"))?;
    checks.push(Check::new("kpss diff eta", 0.167, 0.187, kpss_diff.statistic));
    checks.push(Check::new("kpss diff p (clamped)", 0.0999, 0.1001, kpss_diff.p_value));

    // ---- Decomposition peak ------------------------------------------------
    let decomp =
        classical_additive_decompose(&values, 12).map_err(|e| format!("decomp: {e:?}"))?;
    let peak_month = decomp
        .seasonal_indices
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i + 1)
        .unwrap();
    checks.push(Check::new("seasonal peak month (Dec=12)", 12.0, 12.0, peak_month as f64));

    // ---- Train/test split ---------------------------------------------------
    let (train, test) = train_test_split(&series, Month::new(2022, 12).unwrap())
        .map_err(|e| format!("split: {e:?}"))?;
    assert_eq!(train.len(), 168);
    assert_eq!(test.len(), 12);

    // ---- Holt-Winters -------------------------------------------------------
    let hw = fit_holt_winters(train.values(), 12).map_err(|e| format!("hw: {e:?}"))?;
    checks.push(Check::new("hw alpha", 0.837, 0.937, hw.params.alpha));
    checks.push(Check::new("hw beta < 0.01", 0.0, 0.01, hw.params.beta));
    checks.push(Check::new("hw gamma > 0.95", 0.95, 1.0, hw.params.gamma));
    {
        let (lo, hi) = pct_band(-1_207.435, 0.02);
        checks.push(Check::new("hw final slope", lo, hi, hw.output.state.slope));
        let (lo, hi) = pct_band(30_647.733, 0.02);
        let s12 = *hw.output.state.seasonals.last().unwrap();
        checks.push(Check::new("hw final s12", lo, hi, s12));
    }
    let ets_forecast = hw_forecast(&hw.output.state, 12);
    let ets_mae = mae(test.values(), &ets_forecast).map_err(|e| format!("mae: {e:?}"))?;
    {
        let (lo, hi) = pct_band(129_848.70, 0.05);
        checks.push(Check::new("ets test MAE", lo, hi, ets_mae));
    }

    // ---- ETS residual diagnostics ------------------------------------------
    let ets_res = &hw.output.residuals;
    let ets_lb = ljung_box(ets_res, 24, 0, PortmanteauVariant::LjungBox)
        .map_err(|e| format!("lb: {e:?}"))?;
    checks.push(Check::new("ets residual LB(24) p < 0.001", 0.0, 0.001, ets_lb.p_value));
    let ets_lill = lilliefors(ets_res).map_err(|e| format!("lill: {e:?}"))?;
    checks.push(Check::new("ets residual lilliefors D", 0.187, 0.227, ets_lill.statistic));
    checks.push(Check::new("ets residual lilliefors p < 0.001", 0.0, 0.001, ets_lill.p_value));
    let ets_gq = goldfeld_quandt(ets_res).map_err(|e| format!("gq: {e:?}"))?;
    {
        let (lo, hi) = pct_band(4.535, 0.10);
        checks.push(Check::new("ets residual GQ F", lo, hi, ets_gq.statistic));
        checks.push(Check::new("ets residual GQ p < 0.001", 0.0, 0.001, ets_gq.p_value));
        checks.push(Check::new(
            "ets GQ second half larger",
            1.0,
            1.0,
            ets_gq.aux["second_half_larger"],
        ));
    }

    // ---- SARIMA (0,1,3)(0,0,1)[12] ------------------------------------------
    let order = SarimaOrder::new(0, 1, 3, 0, 0, 1, 12);
    let sar = fit_sarima(train.values(), &order).map_err(|e| format!("sarima: {e:?}"))?;
    {
        let (lo, hi) = pct_band(3_617.881, 0.005);
        checks.push(Check::new("sarima AIC", lo, hi, sar.aic));
        checks.push(Check::new("sarima ma1", 0.154 - 0.06, 0.154 + 0.06, sar.coefficients.ma[0]));
        checks.push(Check::new("sarima ma2", -0.599 - 0.06, -0.599 + 0.06, sar.coefficients.ma[1]));
        checks.push(Check::new("sarima ma3", -0.431 - 0.06, -0.431 + 0.06, sar.coefficients.ma[2]));
        checks.push(Check::new("sarima sma1", 0.294 - 0.06, 0.294 + 0.06, sar.coefficients.sma[0]));
    }
    let bp = ljung_box(&sar.residuals, 12, 0, PortmanteauVariant::BoxPierce)
        .map_err(|e| format!("bp: {e:?}"))?;
    checks.push(Check::new("sarima BP(12) Q", 11.455, 13.455, bp.statistic));
    checks.push(Check::new("sarima BP(12) p", 0.359, 0.459, bp.p_value));
    let sar_forecast = sar.forecast(12);
    let sar_mae = mae(test.values(), &sar_forecast).map_err(|e| format!("mae: {e:?}"))?;
    {
        let (lo, hi) = pct_band(29_574.43, 0.10);
        checks.push(Check::new("sarima test MAE", lo, hi, sar_mae));
    }
    let sar_lill = lilliefors(&sar.residuals).map_err(|e| format!("lill: {e:?}"))?;
    checks.push(Check::new("sarima residual lilliefors D", 0.219, 0.259, sar_lill.statistic));

    // Reference first-row candidate of the order search.
    let row1 = fit_sarima(train.values(), &SarimaOrder::new(0, 1, 0, 0, 0, 1, 12))
        .map_err(|e| format!("row1: {e:?}"))?;
    {
        let (lo, hi) = pct_band(3_650.484, 0.005);
        checks.push(Check::new("sarima (0,1,0)(0,0,1) AIC", lo, hi, row1.aic));
    }

    // ---- Seasonal-naive baseline on the scaled test year --------------------
    let scaler = MinMaxScaler::fit(train.values()).map_err(|e| format!("scaler: {e:?}"))?;
    let test_scaled = scaler.transform(test.values());
    let naive_scaled: Vec<f64> = scaler.transform(&train.values()[train.len() - 12..]);
    let naive_mse = mse(&test_scaled, &naive_scaled).map_err(|e| format!("mse: {e:?}"))?;
    checks.push(Check::new("seasonal-naive scaled MSE > 0.10", 0.10, f64::INFINITY, naive_mse));

    Ok(Analysis {
        series,
        train,
        test,
        hw,
        ets_forecast,
        sar,
        sar_forecast,
        mk,
        kw,
        decomp,
        test_scaled,
        naive_scaled,
        checks,
    })
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let write = args.iter().any(|a| a == "--write");
    let run_grid = args.iter().any(|a| a == "--grid");
    let detail = args.iter().any(|a| a == "--detail");

    if let Some(pos) = args.iter().position(|a| a == "--tune") {
        let iters: usize = args.get(pos + 1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
        let seed: u64 = args.get(pos + 2).and_then(|s| s.parse().ok()).unwrap_or(7);
        run_tune(iters, seed);
        return;
    }

    if args.iter().any(|a| a == "--gamma-curve") {
        let mut lock_notes = Vec::new();
        let series = build_series(false, &mut lock_notes);
        let (train, _) = train_test_split(&series, Month::new(2022, 12).unwrap()).unwrap();
        gamma_curve(train.values());
        return;
    }

    if args.iter().any(|a| a == "--hwtrace") {
        let mut lock_notes = Vec::new();
        let series = build_series(false, &mut lock_notes);
        let (train, _) = train_test_split(&series, Month::new(2022, 12).unwrap()).unwrap();
        hw_trace(train.values());
        return;
    }

    let mut lock_notes = Vec::new();
    let series = build_series(write, &mut lock_notes);
    let a = analyze(series).expect("pipeline failed on the checked-in matrix");

    // ---- Scoreboard ----------------------------------------------------------
    println!("{:<38} {:>14} {:>14} {:>14}  {}", "check", "lo", "hi", "actual", "ok");
    let mut failures = 0usize;
    for c in &a.checks {
        let ok = c.pass();
        if !ok {
            failures += 1;
        }
        println!(
            "{:<38} {:>14.4} {:>14.4} {:>14.4}  {}",
            c.name,
            c.lo,
            c.hi,
            c.actual,
            if ok { "ok" } else { "MISS" }
        );
    }
    for note in &lock_notes {
        failures += 1;
        println!("LOCK MISS: {note}");
    }
    println!();
    print_anchor_counts(a.series.values());
    println!("failures: {failures} / {}", a.checks.len() + lock_notes.len());

    if detail {
        print_detail(&a);
    }

    if run_grid {
        run_grid_search(a.train.values());
    }

    if write {
        write_csv(&a.series);
    }
}

/// Counts around the quartile/median anchor values plus their sorted
/// neighborhoods — the bookkeeping needed to keep q1 = 344, median = 1544 and
/// q3 = 10_784 exact while editing the matrix.
fn print_anchor_counts(values: &[f64]) {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let count = |lo: f64, hi: f64| values.iter().filter(|v| **v > lo && **v < hi).count();

    println!(
        "counts: <=340: {} (want 44)   <1538: {} (want 89)   >10853: {} (want 44)",
        values.iter().filter(|v| **v <= 340.0).count(),
        values.iter().filter(|v| **v < 1_538.0).count(),
        values.iter().filter(|v| **v > 10_853.0).count(),
    );
    println!(
        "gaps (must be empty): (341,345): {}   (1538,1550): {}   (10761,10853): {}",
        count(341.0, 345.0),
        count(1_538.0, 1_550.0),
        count(10_761.0, 10_853.0),
    );
    println!(
        "sorted[43..=46] = {:?}   sorted[88..=91] = {:?}   sorted[133..=136] = {:?}",
        &sorted[43..=46],
        &sorted[88..=91],
        &sorted[133..=136],
    );
}

fn print_detail(a: &Analysis) {
    let series = &a.series;
    let train = &a.train;
    let test = &a.test;
    let hw = &a.hw;
    let ets_forecast = &a.ets_forecast;
    let sar = &a.sar;
    let sar_forecast = &a.sar_forecast;
    let test_scaled = &a.test_scaled;
    let naive_scaled = &a.naive_scaled;
    let mk = &a.mk;
    let kw = &a.kw;
    let decomp = &a.decomp;
    let values = series.values();
    let n = values.len();

    println!("\n--- yearly sums ---");
    for y in 0..15 {
        let s: f64 = values[y * 12..(y + 1) * 12].iter().sum();
        println!("{}: {:>10.0}", 2009 + y, s);
    }
    println!(
        "locks: Jul 2009 = {:.0}   May 2022 = {:.0}",
        values[SLOPE_LOCK_SLOT.0 * 12 + SLOPE_LOCK_SLOT.1],
        values[SUM_LOCK_SLOT.0 * 12 + SUM_LOCK_SLOT.1]
    );

    // Mann-Kendall pair balance: the tau band corresponds to S in [1002, 1098].
    let nf = n as f64;
    println!(
        "\nmann-kendall S = {:.0} (tau {:.4}; band needs S in [1002, 1098])",
        mk.statistic * nf * (nf - 1.0) / 2.0,
        mk.statistic
    );

    // Kruskal-Wallis: mean rank per calendar month (grand mean rank 90.5).
    let mut rank_of = vec![0usize; n];
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    for (r, &i) in idx.iter().enumerate() {
        rank_of[i] = r + 1;
    }
    println!("kruskal-wallis H = {:.3}; mean rank by month:", kw.statistic);
    let month_names = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];
    for mth in 0..12 {
        let ranks: Vec<f64> = (0..15).map(|y| rank_of[y * 12 + mth] as f64).collect();
        let mean = ranks.iter().sum::<f64>() / ranks.len() as f64;
        println!("  {}: {:>6.1}", month_names[mth], mean);
    }

    // KPSS internals for the level and differenced series.
    print_kpss_parts("kpss level", values, 4);
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    print_kpss_parts("kpss diff ", &diffs, 4);

    // Sample ACF of the differenced training series: the MA(3) signature the
    // order search should find wants roughly (+0.20, -0.42, -0.27) at lags
    // 1..3 and a positive lag-12 spike.
    let train_diff: Vec<f64> = train.values().windows(2).map(|w| w[1] - w[0]).collect();
    let acf = sample_acf(&train_diff, 12);
    println!(
        "\ntrain diff ACF: lag1 {:+.3}  lag2 {:+.3}  lag3 {:+.3}  lag12 {:+.3}",
        acf[1], acf[2], acf[3], acf[12]
    );

    println!("\n--- seasonal indices (additive decomposition) ---");
    for mth in 0..12 {
        println!("  {}: {:>9.1}", month_names[mth], decomp.seasonal_indices[mth]);
    }

    println!("\n--- holt-winters ---");
    println!(
        "alpha {:.4}  beta {:.6}  gamma {:.4}  level {:.3}  slope {:.3}",
        hw.params.alpha, hw.params.beta, hw.params.gamma, hw.output.state.level, hw.output.state.slope
    );
    println!(
        "seasonal states (Jan..Dec next year): {:?}",
        hw.output
            .state
            .seasonals
            .iter()
            .map(|s| s.round())
            .collect::<Vec<_>>()
    );
    let mean_s: f64 =
        hw.output.state.seasonals.iter().sum::<f64>() / hw.output.state.seasonals.len() as f64;
    println!("mean seasonal state: {mean_s:.1}");
    // SSE probe: the documented parameter point vs the optimizer's pick. If
    // the probe SSE is lower than the fitted SSE the optimizer missed; if it
    // is higher the matrix still prefers the wrong regime.
    let probe = hw_filter(
        train.values(),
        12,
        &HoltWintersParams { alpha: 0.887, beta: 0.0, gamma: 1.0 },
    )
    .unwrap();
    println!(
        "sse fitted {:.4e}  vs at (a=.887, b=0, g=1) {:.4e}  (ratio {:.4})",
        hw.output.sse,
        probe.sse,
        probe.sse / hw.output.sse
    );
    println!(
        "probe state at (.887, 0, 1): level {:.1} slope {:.1} s12 {:.1}",
        probe.state.level,
        probe.state.slope,
        probe.state.seasonals.last().unwrap()
    );

    println!("\n--- 2023 forecasts vs actual ---");
    println!(
        "{:<8} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "month", "actual", "ets", "ets err", "sarima", "sarima err"
    );
    for (i, m) in test.months().enumerate() {
        let a = test.values()[i];
        println!(
            "{:<8} {:>12.0} {:>12.0} {:>12.0} {:>12.0} {:>12.0}",
            format!("{m}"),
            a,
            ets_forecast[i],
            ets_forecast[i] - a,
            sar_forecast[i],
            sar_forecast[i] - a
        );
    }

    println!("\n--- naive scaled squared errors ---");
    for i in 0..test_scaled.len() {
        let e = test_scaled[i] - naive_scaled[i];
        println!("h={:>2}  err {:>8.4}  sq {:>8.4}", i + 1, e, e * e);
    }

    println!("\n--- ets residual summary ---");
    summarize_residuals(&hw.output.residuals);
    println!("\n--- sarima residual summary ---");
    summarize_residuals(&sar.residuals);
    println!("sarima sigma2 {:.4e}  loglik {:.3}", sar.sigma2, sar.loglik);
    for est in &sar.estimates {
        println!(
            "  {}: {:.4} (se {})",
            est.name,
            est.value,
            est.std_err.map_or("n/a".into(), |s| format!("{s:.4}")),
        );
    }
    // Which residuals dominate, and where the Box-Pierce mass sits.
    let res = &sar.residuals;
    let mut by_mag: Vec<usize> = (0..res.len()).collect();
    by_mag.sort_by(|&a, &b| res[b].abs().partial_cmp(&res[a].abs()).unwrap());
    println!("largest sarima residuals:");
    for &i in by_mag.iter().take(8) {
        // Residual i corresponds to train month i + d (one observation lost
        // to differencing).
        let m = train.start().plus(i + 1);
        println!("  {m}: {:>9.0}", res[i]);
    }
    let racf = sample_acf(res, 12);
    let q: f64 = (1..=12).map(|k| racf[k] * racf[k]).sum::<f64>() * res.len() as f64;
    print!("sarima residual ACF 1..12:");
    for item in racf.iter().take(13).skip(1) {
        print!(" {item:+.3}");
    }
    println!("\n(reconstructed BP Q = {q:.2})");
}

fn sample_acf(xs: &[f64], max_lag: usize) -> Vec<f64> {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum::<f64>() / n as f64;
    (0..=max_lag)
        .map(|k| {
            let ck: f64 = (0..n - k).map(|t| dev[t] * dev[t + k]).sum::<f64>() / n as f64;
            ck / c0
        })
        .collect()
}

/// Reproduces the KPSS pieces so the numerator and denominator can be tuned
/// separately: eta = sum(S_t^2) / (n^2 * lrv) with a Bartlett-window lrv.
fn print_kpss_parts(label: &str, xs: &[f64], lag: usize) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let dev: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let mut s = 0.0;
    let mut sum_s2 = 0.0;
    for d in &dev {
        s += d;
        sum_s2 += s * s;
    }
    let gamma = |k: usize| -> f64 {
        (0..dev.len() - k).map(|t| dev[t] * dev[t + k]).sum::<f64>() / n
    };
    let g0 = gamma(0);
    let mut lrv = g0;
    print!("\n{label}: sumS2 {sum_s2:.3e}  g0 {g0:.3e}  rho:");
    for k in 1..=lag {
        let gk = gamma(k);
        let w = 1.0 - k as f64 / (lag as f64 + 1.0);
        lrv += 2.0 * w * gk;
        print!(" {:+.3}", gk / g0);
    }
    let eta = sum_s2 / (n * n * lrv);
    println!("  lrv {lrv:.3e}  eta {eta:.4}");
}

fn summarize_residuals(res: &[f64]) {
    let n = res.len() as f64;
    let mean = res.iter().sum::<f64>() / n;
    let sd = (res.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let mut sorted = res.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!(
        "n {}  mean {:.1}  sd {:.1}  min {:.0}  max {:.0}",
        res.len(),
        mean,
        sd,
        sorted[0],
        sorted[sorted.len() - 1]
    );
    let half = res.len() / 2;
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
    };
    println!(
        "first-half var {:.3e}  second-half var {:.3e}",
        var(&res[..half]),
        var(&res[res.len() - half..])
    );
}

fn run_grid_search(train: &[f64]) {
    let candidates = candidate_orders();
    println!("\n--- order search over {} candidates ---", candidates.len());
    let rows = grid_search(train, &candidates).unwrap();
    for (i, row) in rows.iter().enumerate() {
        println!("{:>2}. {:<28} AIC {:>10.3}", i + 1, row.label, row.aic);
    }
    let best = &rows[0];
    let want = SarimaOrder::new(0, 1, 3, 0, 0, 1, 12);
    println!(
        "winner: {} ({})",
        best.label,
        if best.order == want { "ok" } else { "MISS: expected SARIMA(0,1,3)(0,0,1)[12]" }
    );
}

fn candidate_orders() -> Vec<SarimaOrder> {
    let base = |p, d, q, sp, sd, sq| SarimaOrder::new(p, d, q, sp, sd, sq, 12);
    vec![
        base(0, 1, 0, 0, 0, 1),
        base(0, 1, 0, 0, 0, 1).with_drift(),
        base(0, 1, 0, 0, 0, 2),
        base(0, 1, 0, 0, 0, 2).with_drift(),
        base(0, 1, 0, 1, 0, 0),
        base(0, 1, 0, 1, 0, 0).with_drift(),
        base(0, 1, 0, 1, 0, 1),
        base(0, 1, 0, 1, 0, 1).with_drift(),
        base(0, 1, 3, 0, 0, 1),
        base(0, 1, 3, 0, 0, 1).with_drift(),
        base(1, 1, 0, 0, 0, 1),
        base(1, 1, 0, 0, 0, 2),
        base(2, 1, 0, 0, 0, 1),
        base(2, 1, 0, 0, 0, 2),
        base(2, 1, 0, 1, 0, 0).with_drift(),
        base(2, 1, 0, 1, 0, 2),
        base(2, 1, 0, 1, 0, 2).with_drift(),
        base(3, 1, 0, 0, 0, 1),
        base(3, 1, 0, 0, 0, 1).with_drift(),
        base(3, 1, 0, 0, 0, 2),
    ]
}

fn write_csv(series: &TimeSeries) {
    std::fs::create_dir_all("data").unwrap();
    let mut out = String::from("date,cases\n");
    for (i, m) in series.months().enumerate() {
        out.push_str(&format!("{m},{:.0}\n", series.values()[i]));
    }
    std::fs::write(CSV_PATH, out).unwrap();

    // Round-trip through the real loader to prove the file parses to the
    // exact same series.
    let reloaded = load_csv(CSV_PATH, "date", "cases").unwrap();
    assert_eq!(reloaded.values(), series.values());
    assert_eq!(reloaded.start(), series.start());
    println!("\nwrote {CSV_PATH} ({} rows)", series.len());
}

// ---------------------------------------------------------------------------
// Simulated-annealing matrix polish (`--tune`).
//
// The search space is the 170 editable cells (180 minus the eight anchor
// cells that pin the min, max, quartile, and median bookkeeping, minus the
// two derived lock slots). Every proposal keeps a cell inside its census
// band, so the counts behind q1/median/q3 are invariant by construction; the
// two locks are re-derived per candidate and out-of-corridor locks reject
// the candidate outright, as do duplicate or non-integer values.
// ---------------------------------------------------------------------------

type M = [[f64; 12]; 15];

/// Cells that must never move: the four quartile/median landmark pairs, the
/// series minimum, and the series maximum.
const FROZEN: [(usize, usize); 8] = [
    (0, 3),   // Apr 2009 = 10_761 (q3 low anchor)
    (0, 5),   // Jun 2009 = 10_853 (q3 high anchor)
    (1, 4),   // May 2010 = 341 (q1 low anchor)
    (2, 4),   // May 2011 = 345 (q1 high anchor)
    (4, 9),   // Oct 2013 = 1_538 (median low anchor)
    (10, 9),  // Oct 2019 = 1_550 (median high anchor)
    (12, 5),  // Jun 2021 = 12 (minimum)
    (13, 11), // Dec 2022 = 151_234 (maximum)
];

/// Values no editable cell may take (the anchors above).
const LANDMARKS: [f64; 8] = [12.0, 341.0, 345.0, 1_538.0, 1_550.0, 10_761.0, 10_853.0, 151_234.0];

fn editable(r: usize, c: usize) -> bool {
    !FROZEN.contains(&(r, c)) && (r, c) != SLOPE_LOCK_SLOT && (r, c) != SUM_LOCK_SLOT
}

/// The census band a value lives in; proposals may move a cell anywhere
/// inside its band but never across a band edge.
fn class_bounds(v: f64) -> (f64, f64) {
    if v <= 340.0 {
        // Lower edge 13 keeps the frozen series minimum (12) unique.
        (13.0, 340.0)
    } else if v < 1_538.0 {
        (346.0, 1_537.0)
    } else if v < 10_761.0 {
        (1_551.0, 10_760.0)
    } else {
        (10_854.0, 151_233.0)
    }
}

/// Resolves the two lock slots and validates the candidate: locks inside
/// their corridors, all values positive integers, no duplicates.
fn assemble(m: &M) -> Option<Vec<f64>> {
    let mut mm = *m;
    let sum_2010: f64 = mm[1].iter().sum();
    let sum_2009_rest: f64 = mm[0]
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != SLOPE_LOCK_SLOT.1)
        .map(|(_, v)| v)
        .sum();
    let jul_2009 = sum_2010 + YEAR_DIFF - sum_2009_rest;
    if !(SLOPE_LOCK_CORRIDOR.0..=SLOPE_LOCK_CORRIDOR.1).contains(&jul_2009) {
        return None;
    }
    mm[SLOPE_LOCK_SLOT.0][SLOPE_LOCK_SLOT.1] = jul_2009;

    let partial: f64 = mm.iter().flatten().sum();
    let may_2022 = GRAND_TOTAL - partial;
    if !(SUM_LOCK_CORRIDOR.0..=SUM_LOCK_CORRIDOR.1).contains(&may_2022) {
        return None;
    }
    mm[SUM_LOCK_SLOT.0][SUM_LOCK_SLOT.1] = may_2022;

    let values: Vec<f64> = mm.iter().flatten().copied().collect();
    let mut seen = std::collections::HashSet::with_capacity(256);
    for v in &values {
        if *v <= 0.0 || v.fract() != 0.0 || !seen.insert(*v as i64) {
            return None;
        }
    }
    Some(values)
}

/// Loss weight and normalization scale for one check. A weight of zero means
/// the check is structurally guaranteed by the move rules (or follows from a
/// weighted sibling) and is skipped. Point and one-sided checks carry
/// explicit scales; banded checks normalize by their half-width.
fn weight_and_scale(c: &Check) -> (f64, f64) {
    let half = ((c.hi - c.lo) / 2.0).max(1e-12);
    match c.name {
        "min" | "max" | "median" | "mean" | "q1" | "q3" => (0.0, 1.0),
        "mann_kendall tau" => (6.0, half),
        "mann_kendall p" => (0.0, 1.0),
        "kruskal_wallis H" => (4.0, half),
        "kruskal_wallis p < 1e-6" => (1.0, 1e-3),
        "kpss level eta" => (4.0, half),
        "kpss diff eta" => (0.3, half),
        "kpss diff p (clamped)" => (0.0, 1.0),
        "seasonal peak month (Dec=12)" => (40.0, 1.0),
        "hw alpha" => (5.0, half),
        "hw beta < 0.01" => (3.0, 0.02),
        "hw gamma > 0.95" => (5.0, half),
        // Consistency probes of the beta = 0 geometry, not acceptance targets;
        // they scream while beta is mid-flight, so they carry no loss weight.
        "hw final slope" => (0.0, half),
        "hw final s12" => (0.0, half),
        "ets test MAE" => (3.0, half),
        "ets residual LB(24) p < 0.001" => (2.0, 0.01),
        "ets residual lilliefors D" => (1.5, half),
        "ets residual lilliefors p < 0.001" => (1.0, 0.01),
        "ets residual GQ F" => (3.0, half),
        "ets residual GQ p < 0.001" => (2.0, 0.01),
        "ets GQ second half larger" => (40.0, 1.0),
        "sarima AIC" => (2.5, half),
        "sarima ma1" => (3.0, half),
        "sarima ma2" => (3.0, half),
        "sarima ma3" => (2.0, half),
        "sarima sma1" => (4.0, half),
        "sarima BP(12) Q" => (3.0, half),
        "sarima BP(12) p" => (0.0, 1.0),
        "sarima test MAE" => (3.0, half),
        "sarima residual lilliefors D" => (1.5, half),
        "sarima (0,1,0)(0,0,1) AIC" => (1.5, half),
        "seasonal-naive scaled MSE > 0.10" => (3.0, 0.05),
        _ => (1.0, half),
    }
}

fn check_penalty(c: &Check) -> f64 {
    let (w, s) = weight_and_scale(c);
    if w == 0.0 {
        return 0.0;
    }
    let d = if c.actual < c.lo {
        (c.lo - c.actual) / s
    } else if c.actual > c.hi {
        (c.actual - c.hi) / s
    } else {
        0.0
    };
    w * d * d
}

fn loss_of(checks: &[Check]) -> f64 {
    checks.iter().map(check_penalty).sum()
}

fn worst_components(checks: &[Check], k: usize) -> String {
    let mut scored: Vec<(f64, &str)> =
        checks.iter().map(|c| (check_penalty(c), c.name)).filter(|(p, _)| *p > 0.0).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored
        .iter()
        .take(k)
        .map(|(p, n)| format!("{n} {p:.1}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn eval_matrix(m: &M) -> Option<(f64, usize)> {
    let values = assemble(m)?;
    let series = TimeSeries::new(Month::new(2009, 1).unwrap(), values, 12).ok()?;
    let a = analyze(series).ok()?;
    Some((loss_of(&a.checks), a.checks.iter().filter(|c| !c.pass()).count()))
}

fn log_uniform_step(rng: &mut impl rand::Rng, span: f64) -> f64 {
    let span = span.max(4.0);
    (rng.gen::<f64>() * span.ln()).exp().round().max(1.0)
}

/// Move one editable cell inside its census band.
fn propose_cell(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    for _ in 0..20 {
        let r = rng.gen_range(0..15);
        let c = rng.gen_range(0..12);
        if !editable(r, c) {
            continue;
        }
        let v = m[r][c];
        let (lo, hi) = class_bounds(v);
        let mag = log_uniform_step(rng, 0.35 * v);
        let delta = if rng.gen::<bool>() { mag } else { -mag };
        let nv = (v + delta).round().clamp(lo, hi);
        if nv == v || LANDMARKS.contains(&nv) {
            continue;
        }
        m[r][c] = nv;
        return true;
    }
    false
}

/// Shift mass between two editable cells of the same year (keeps that year's
/// sum nearly constant, so the locks barely move).
fn propose_transfer(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    for _ in 0..20 {
        let r = rng.gen_range(0..15);
        let c1 = rng.gen_range(0..12);
        let c2 = rng.gen_range(0..12);
        if c1 == c2 || !editable(r, c1) || !editable(r, c2) {
            continue;
        }
        let (v1, v2) = (m[r][c1], m[r][c2]);
        let (lo1, hi1) = class_bounds(v1);
        let (lo2, hi2) = class_bounds(v2);
        let mag = log_uniform_step(rng, 0.25 * v1.min(v2));
        let n1 = (v1 + mag).round().clamp(lo1, hi1);
        let n2 = (v2 - (n1 - v1)).round().clamp(lo2, hi2);
        if n1 == v1 || n2 == v2 || LANDMARKS.contains(&n1) || LANDMARKS.contains(&n2) {
            continue;
        }
        m[r][c1] = n1;
        m[r][c2] = n2;
        return true;
    }
    false
}

/// Rescale one winter block (December plus the following January-March)
/// jointly, clamped per cell to the census bands.
fn propose_winter(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    let r = rng.gen_range(3..=10);
    let f = 1.0 + rng.gen_range(-0.08..0.08f64);
    let mut changed = false;
    for (rr, cc) in [(r, 11), (r + 1, 0), (r + 1, 1), (r + 1, 2)] {
        if !editable(rr, cc) {
            continue;
        }
        let v = m[rr][cc];
        let (lo, hi) = class_bounds(v);
        let nv = (v * f).round().clamp(lo, hi);
        if nv != v && !LANDMARKS.contains(&nv) {
            m[rr][cc] = nv;
            changed = true;
        }
    }
    changed
}

/// Shift mass between a December and the following January or February
/// (cross-row). This is the axis that decides which month a winter peaks in,
/// which in turn drives how fast the seasonal indices must adapt.
fn propose_peak_shift(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    for _ in 0..20 {
        let r = rng.gen_range(0..14);
        let (r1, c1) = (r, 11);
        let (r2, c2) = (r + 1, if rng.gen::<bool>() { 0 } else { 1 });
        if !editable(r1, c1) || !editable(r2, c2) {
            continue;
        }
        let (v1, v2) = (m[r1][c1], m[r2][c2]);
        let (lo1, hi1) = class_bounds(v1);
        let (lo2, hi2) = class_bounds(v2);
        let mag = log_uniform_step(rng, 0.5 * v1.min(v2));
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let n1 = (v1 + sign * mag).round().clamp(lo1, hi1);
        let n2 = (v2 - (n1 - v1)).round().clamp(lo2, hi2);
        if n1 == v1 || n2 == v2 || LANDMARKS.contains(&n1) || LANDMARKS.contains(&n2) {
            continue;
        }
        m[r1][c1] = n1;
        m[r2][c2] = n2;
        return true;
    }
    false
}

/// Rescale a short run of consecutive months within one year by a common
/// factor. Short bumps against the prior year are the lever that shapes the
/// low-lag moving-average signature of the doubly differenced series.
fn propose_span(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    for _ in 0..10 {
        let r = rng.gen_range(0..15);
        let len = rng.gen_range(2..=3usize);
        let c0 = rng.gen_range(0..=(12 - len));
        let f = (rng.gen_range(-0.18..0.18f64)).exp();
        let mut changed = false;
        for c in c0..c0 + len {
            if !editable(r, c) {
                continue;
            }
            let v = m[r][c];
            let (lo, hi) = class_bounds(v);
            let nv = (v * f).round().clamp(lo, hi);
            if nv != v && !LANDMARKS.contains(&nv) {
                m[r][c] = nv;
                changed = true;
            }
        }
        if changed {
            return true;
        }
    }
    false
}

fn propose(m: &mut M, rng: &mut impl rand::Rng) -> bool {
    let k = rng.gen::<f64>();
    if k < 0.45 {
        propose_cell(m, rng)
    } else if k < 0.65 {
        propose_transfer(m, rng)
    } else if k < 0.75 {
        propose_winter(m, rng)
    } else if k < 0.85 {
        propose_peak_shift(m, rng)
    } else {
        propose_span(m, rng)
    }
}

fn print_matrix_literal(m: &M) {
    println!("#[rustfmt::skip]\nconst MATRIX: [[f64; 12]; 15] = [");
    for (r, row) in m.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, v)| {
                if (r, c) == SLOPE_LOCK_SLOT || (r, c) == SUM_LOCK_SLOT {
                    "0.0".to_string()
                } else {
                    format!("{v:.1}")
                }
            })
            .collect();
        println!("    [{}], // {}", cells.join(", "), 2009 + r);
    }
    println!("];");
}

/// Profiles the Holt-Winters SSE as a function of gamma: for each fixed
/// gamma, grid-optimizes (alpha, beta) and prints the conditional optimum.
/// Shows how far the data is from making gamma = 1 the winner.
/// Print the full Holt-Winters filter state trajectory at the target
/// parameter point (alpha 0.887, beta 0, gamma 1) so problem months can be
/// traced back to the exact level/seasonal state that produced them.
fn hw_trace(train: &[f64]) {
    let m = 12usize;
    let n = train.len();
    let mf = m as f64;
    let c1 = train[..m].iter().sum::<f64>() / mf;
    let c2 = train[m..2 * m].iter().sum::<f64>() / mf;
    let mut level = c1;
    let mut slope = (c2 - c1) / mf;
    let mut seasonal: Vec<f64> = train[..m].iter().map(|y| y - c1).collect();
    let (alpha, beta, gamma) = (0.887, 0.0, 1.0);
    let start = Month::new(2010, 1).unwrap();
    println!("init level {level:12.1}  slope {slope:10.2}");
    println!(
        "{:>8} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "month", "y", "fitted", "resid", "level", "s_used", "s_new"
    );
    for t in m..n {
        let s_tm = seasonal[t - m];
        let y = train[t];
        let one_step = level + slope + s_tm;
        let e = y - one_step;
        let prev_level = level;
        let prev_slope = slope;
        level = alpha * (y - s_tm) + (1.0 - alpha) * (prev_level + prev_slope);
        slope = beta * (level - prev_level) + (1.0 - beta) * prev_slope;
        let s_new = gamma * (y - prev_level - prev_slope) + (1.0 - gamma) * s_tm;
        seasonal.push(s_new);
        let label = start.plus(t - m);
        println!(
            "{:>8} {:>10.0} {:>10.0} {:>10.0} {:>10.0} {:>10.0} {:>10.0}",
            format!("{label}"),
            y,
            one_step,
            e,
            level,
            s_tm,
            s_new
        );
    }
}

fn gamma_curve(train: &[f64]) {
    println!("gamma   best-alpha  best-beta        SSE (x1e9)");
    let mut rows = Vec::new();
    for gi in 1..=20 {
        let gamma = gi as f64 / 20.0;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for ai in 1..=39 {
            let alpha = ai as f64 / 40.0;
            for beta in [0.0, 0.002, 0.01, 0.05] {
                let p = flucast_classical::HoltWintersParams { alpha, beta, gamma };
                if let Ok(out) = flucast_classical::hw_filter(train, 12, &p) {
                    if out.sse < best.0 {
                        best = (out.sse, alpha, beta);
                    }
                }
            }
        }
        rows.push((gamma, best));
        println!(
            "{gamma:>5.2}   {:>9.3}  {:>9.3}  {:>14.4}",
            best.1,
            best.2,
            best.0 / 1e9
        );
    }
    let winner = rows
        .iter()
        .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
        .unwrap();
    println!(
        "\nconditional optimum: gamma {:.2} (SSE {:.4}e9); gamma=1 SSE is {:+.2}% away",
        winner.0,
        winner.1 .0 / 1e9,
        (rows.last().unwrap().1 .0 / winner.1 .0 - 1.0) * 100.0
    );

    // Where does the paper-regime filter lose relative to the low-gamma
    // winner? Per-month squared-error differences, worst first.
    let hi = flucast_classical::hw_filter(
        train,
        12,
        &flucast_classical::HoltWintersParams { alpha: 0.887, beta: 0.0, gamma: 1.0 },
    )
    .unwrap();
    let lo = flucast_classical::hw_filter(
        train,
        12,
        &flucast_classical::HoltWintersParams { alpha: winner.1 .1, beta: winner.1 .2, gamma: winner.0 },
    )
    .unwrap();
    let mut diffs: Vec<(f64, usize)> = hi
        .residuals
        .iter()
        .zip(&lo.residuals)
        .enumerate()
        .map(|(i, (a, b))| (a * a - b * b, i))
        .collect();
    diffs.sort_by(|a, b| b.0.abs().partial_cmp(&a.0.abs()).unwrap());
    println!("\nworst months for (alpha .887, gamma 1) vs low-gamma winner (e2 diff, 1e9):");
    let start = Month::new(2009, 1).unwrap();
    for (d, i) in diffs.iter().take(14) {
        let m = start.plus(i + 12);
        println!(
            "  {m}  {:+9.3}   hi-res {:+10.0}  lo-res {:+10.0}  actual {:>9.0}",
            d / 1e9,
            hi.residuals[*i],
            lo.residuals[*i],
            train[i + 12]
        );
    }
}

fn run_tune(iters: usize, seed: u64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);

    let mut cur = MATRIX;
    let (mut cur_loss, mut cur_fails) =
        eval_matrix(&cur).expect("checked-in matrix must assemble and analyze");
    let mut best = cur;
    let mut best_loss = cur_loss;
    let mut best_fails = cur_fails;
    println!("start: loss {cur_loss:.2}  fails {cur_fails}  seed {seed}  iters {iters}");

    let t0 = (0.02 * cur_loss).max(0.5);
    let t_end = (0.0004 * cur_loss).max(0.01);
    let decay = (t_end / t0).powf(1.0 / iters.max(1) as f64);
    let mut t = t0;
    let mut accepted = 0usize;
    let mut evaluated = 0usize;

    for it in 0..iters {
        t *= decay;
        let mut cand = cur;
        if !propose(&mut cand, &mut rng) {
            continue;
        }
        let Some((l, f)) = eval_matrix(&cand) else { continue };
        evaluated += 1;
        let dl = l - cur_loss;
        if dl <= 0.0 || rng.gen::<f64>() < (-dl / t).exp() {
            cur = cand;
            cur_loss = l;
            cur_fails = f;
            accepted += 1;
            if l < best_loss {
                best = cand;
                best_loss = l;
                best_fails = f;
            }
        }
        if (it + 1) % 250 == 0 {
            println!(
                "iter {:>6}  T {:>7.2}  cur {:>9.2} ({:>2} fails)  best {:>9.2} ({:>2} fails)  acc {}/{}",
                it + 1, t, cur_loss, cur_fails, best_loss, best_fails, accepted, evaluated
            );
        }
        if (it + 1) % 2_000 == 0 {
            if let Some(values) = assemble(&cur) {
                if let Ok(a) = analyze(
                    TimeSeries::new(Month::new(2009, 1).unwrap(), values, 12).unwrap(),
                ) {
                    println!("  worst: {}", worst_components(&a.checks, 5));
                }
            }
        }
    }

    println!("\nbest loss {best_loss:.2}  fails {best_fails}");
    print_matrix_literal(&best);
    if let Some(values) = assemble(&best) {
        let series = TimeSeries::new(Month::new(2009, 1).unwrap(), values, 12).unwrap();
        if let Ok(a) = analyze(series) {
            println!("\nremaining misses:");
            for c in a.checks.iter().filter(|c| !c.pass()) {
                println!(
                    "  {:<38} [{:>12.4}, {:>12.4}]  actual {:>12.4}  penalty {:.1}",
                    c.name,
                    c.lo,
                    c.hi,
                    c.actual,
                    check_penalty(c)
                );
            }
            print_anchor_counts(a.series.values());
        }
    }
}
