//! Scratch probe: per-approximant spread of predicted ratio steps. Delete me.

use gerry::diffapprox::{
    config_grid_orders, fit_da_rational_lenient, mark_defective, singularities, DAConfig,
    DiffApproximant,
};
use gerry::series::HighPrec;
use num_bigint::BigInt;
use num_rational::BigRational;

const GHAT: [&str; 22] = [
    "0",
    "4",
    "16",
    "140",
    "2804",
    "161036",
    "27803749",
    "14314228378",
    "21838347160809",
    "99704315229167288",
    "1367135978051264146578",
    "56578717186086829451888706",
    "7065692298178203128922479762418",
    "2670113158846160742372913777087464324",
    "3052313665715695874527667027409186333152556",
    "10576314351887299911761821933016870059157696799590",
    "111034100174173892447665912670921261073467364516352741228",
    "3537028455649887297336276306453996860419253673550043079822024000",
    "341733163421465989689352428385746691084586717358593912894419042539233990",
    "100252523974388276666190532080484359784524540996444484455535420554238978388252504",
    "89264965524987466095382312579079040669851719236758669481553261745368627073196518991122982",
    "241454160053307991366810217012218245577185945222070621347619706812992698342006623035833679925950124",
];

fn extension_grid(available: usize, orders: &[usize]) -> Vec<DAConfig> {
    let keep = available.saturating_sub(4).max(available.min(10));
    config_grid_orders(available, orders)
        .into_iter()
        .filter(|c| c.coefficients_used() >= keep)
        .collect()
}

fn survivors(series: &[BigRational], grid: &[DAConfig]) -> Vec<DiffApproximant> {
    let das: Vec<DiffApproximant> = grid
        .iter()
        .filter_map(|cfg| fit_da_rational_lenient(series, cfg).ok())
        .collect();
    let mut sings: Vec<_> = das.iter().map(singularities).collect();
    let verdict = mark_defective(&mut sings, 3.0);
    das.into_iter()
        .zip(verdict.defective)
        .filter(|(_, bad)| !bad)
        .map(|(da, _)| da)
        .collect()
}

fn hp_rat(r: &BigRational) -> HighPrec {
    HighPrec::from_bigint(r.numer()) / HighPrec::from_bigint(r.denom())
}

fn main() {
    let all: Vec<BigInt> = GHAT.iter().map(|s| s.parse().unwrap()).collect();
    let exact_n = 14;
    let count = 8;
    let tail = &all[1..exact_n];

    // ratio transform
    let ratios: Vec<BigRational> = tail
        .windows(2)
        .map(|w| BigRational::new(w[1].clone(), w[0].clone()))
        .collect();
    let grid = extension_grid(ratios.len(), &[1, 2, 3]);
    let das = survivors(&ratios, &grid);
    println!("ratio mode: {} survivors of {} configs", das.len(), grid.len());
    let history: Vec<HighPrec> = ratios.iter().map(hp_rat).collect();
    let runs: Vec<Vec<HighPrec>> = das
        .iter()
        .filter_map(|da| da.advance(&history, count).ok())
        .collect();
    // runs[r][i] is the predicted ratio c_{exact_n+i}/c_{exact_n+i-1} itself
    for i in 0..count {
        let idx = exact_n + i;
        let truth = if idx < all.len() {
            Some(HighPrec::from_bigint(&all[idx]) / HighPrec::from_bigint(&all[idx - 1]))
        } else {
            None
        };
        let mut vals: Vec<f64> = runs.iter().map(|r| r[i].to_f64()).collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        let t = truth.as_ref().map(|t| t.to_f64()).unwrap_or(f64::NAN);
        println!("idx {idx} truth {t:.6e}");
        let rels: Vec<String> = vals
            .iter()
            .map(|v| format!("{:+.1e}", (v - t) / t))
            .collect();
        println!("  member relerr: {}", rels.join(" "));
    }
}
