//! Scratch probe: what closes the short-series gap for ghat. Delete me.

use gerry::analysis::{fit_subdominant, FitOptions};
use gerry::diffapprox::{extend_for_ratio_analysis, ExtendOptions};
use gerry::series::{HighPrec, SeriesSample};
use num_bigint::BigInt;

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

fn hp(x: f64) -> HighPrec {
    HighPrec::from_f64(x)
}

fn lsq_intercept(pts: &[(HighPrec, HighPrec)], degree: usize) -> HighPrec {
    let k = degree + 1;
    let mut g = vec![vec![HighPrec::zero(); k]; k];
    let mut b = vec![HighPrec::zero(); k];
    for (x, y) in pts {
        let mut xi = HighPrec::one();
        let mut pows = Vec::with_capacity(2 * k - 1);
        for _ in 0..(2 * k - 1) {
            pows.push(xi.clone());
            xi = &xi * x;
        }
        for i in 0..k {
            for j in 0..k {
                g[i][j] = &g[i][j] + &pows[i + j];
            }
            b[i] = &b[i] + &(y * &pows[i]);
        }
    }
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if g[r][col].abs() > g[piv][col].abs() {
                piv = r;
            }
        }
        g.swap(col, piv);
        b.swap(col, piv);
        for r in (col + 1)..k {
            let f = &g[r][col] / &g[col][col];
            for c in col..k {
                g[r][c] = &g[r][c] - &(&f * &g[col][c]);
            }
            b[r] = &b[r] - &(&f * &b[col]);
        }
    }
    for col in (0..k).rev() {
        for r in 0..col {
            let f = &g[r][col] / &g[col][col];
            b[r] = &b[r] - &(&f * &b[col]);
        }
    }
    &b[0] / &g[0][0]
}

fn norm_ratios(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> Vec<(u32, HighPrec)> {
    let mut out = Vec::new();
    for w in terms.windows(2) {
        let (l0, ref v0) = w[0];
        let (l1, ref v1) = w[1];
        if l1 != l0 + 1 || v0.is_zero() || v1.is_zero() {
            continue;
        }
        out.push((l1, (v1 / v0) / lambda.powi((2 * l1 - 1) as usize)));
    }
    out
}

fn regression_fit(terms: &[(u32, HighPrec)], lambda: &HighPrec, cutoff: u32) -> (f64, f64, f64) {
    let rats = norm_ratios(terms, lambda);
    let pts: Vec<(HighPrec, HighPrec)> = rats
        .iter()
        .filter(|(l, _)| *l >= cutoff)
        .map(|(l, r)| (HighPrec::one() / hp(*l as f64), r.clone()))
        .collect();
    let mu = lsq_intercept(&pts, 2);
    let dpts: Vec<(HighPrec, HighPrec)> = rats
        .iter()
        .filter(|(l, _)| *l >= cutoff)
        .map(|(l, r)| {
            let delta = (r / &mu - HighPrec::one()) * hp(*l as f64);
            (HighPrec::one() / hp(*l as f64), delta)
        })
        .collect();
    let h = lsq_intercept(&dpts, 2);
    let d = mu.ln() / lambda.ln();
    let apts: Vec<(HighPrec, HighPrec)> = terms
        .iter()
        .filter(|(l, v)| *l >= cutoff && !v.is_zero())
        .map(|(l, v)| {
            let ll = hp(*l as f64);
            let amp = v / lambda.powi((*l * *l) as usize) / mu.powi(*l as usize) / ll.pow(&h);
            (HighPrec::one() / ll, amp)
        })
        .collect();
    let e = lsq_intercept(&apts, 1).ln() / lambda.ln();
    (d.to_f64(), h.to_f64(), e.to_f64())
}

fn ladder_fit(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> Option<(f64, f64, f64)> {
    let vals: Vec<HighPrec> = terms.iter().map(|(_, v)| v.clone()).collect();
    let first = terms.first()?.0;
    let sample = SeriesSample::from_values(first, vals);
    fit_subdominant(&sample, lambda, &FitOptions::default())
        .ok()
        .map(|f| {
            (
                f.d.value.to_f64(),
                f.h.value.to_f64(),
                f.e.value.to_f64(),
            )
        })
}

fn main() {
    let all: Vec<BigInt> = GHAT.iter().map(|s| s.parse().unwrap()).collect();
    let lambda = HighPrec::parse("1.7445498").unwrap();

    println!("-- exact prefix sweep --");
    for n in 12..=22usize {
        let terms: Vec<(u32, HighPrec)> = (1..n)
            .map(|i| (1 + i as u32, HighPrec::from_bigint(&all[i])))
            .collect();
        let lad = ladder_fit(&terms, &lambda).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        let c1 = n as u32 / 2;
        let (rd, rh, re) = regression_fit(&terms, &lambda, c1);
        println!(
            "n {n:2} | ladder d {:+.5} h {:+.4} e {:+.3} | reg(cut {c1:2}) d {rd:+.5} h {rh:+.4} e {re:+.3}",
            lad.0, lad.1, lad.2
        );
    }

    for deflate in [false, true] {
        println!("-- splice sweep from 14 exact, deflate {deflate} --");
        let exact = &all[..14];
        let mut opts = ExtendOptions::default();
        opts.floor_digits = 0;
        if deflate {
            opts.deflate = Some(HighPrec::parse("1.7445498").unwrap());
        }
        let ext = extend_for_ratio_analysis(exact, 1, 8, &opts).unwrap();
        let exact_terms: Vec<(u32, HighPrec)> = (1..14)
            .map(|i| (1 + i as u32, HighPrec::from_bigint(&all[i])))
            .collect();
        for k in 0..=8usize {
            let mut terms = exact_terms.clone();
            for p in ext.predictions.iter().take(k) {
                terms.push((p.index, p.value.clone()));
            }
            let top = terms.last().unwrap().0;
            let lad = ladder_fit(&terms, &lambda).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            for cutoff in [7u32, top / 2 + 2] {
                let (rd, rh, re) = regression_fit(&terms, &lambda, cutoff);
                println!(
                    "k {k} top {top:2} | ladder d {:+.5} h {:+.4} e {:+.3} | reg(cut {cutoff:2}) d {rd:+.5} h {rh:+.4} e {re:+.3}",
                    lad.0, lad.1, lad.2
                );
            }
        }
    }
    println!("targets: d -4.04354  h 0.75  e ~8   bands d +-0.01  h +-0.05");
}
