//! Scratch probe: regression estimators on extended samples. Delete me.

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

const GPOL: [&str; 26] = [
    "0",
    "6",
    "53",
    "627",
    "16213",
    "1123743",
    "221984391",
    "127561384993",
    "215767063451331",
    "1082828220389781579",
    "16209089366362071416785",
    "726438398002211876667379681",
    "97741115155002465272674416929195",
    "39565596445488219947994403962984729307",
    "48266553553179571390563558537192580883946581",
    "177681396812088238354165934687481183466893654956289",
    "1975937643872352724089992826014929798118573656798037151869",
    "66439263265451619293993827233543293728049358568766901433376111533",
    "6759530908927225810082912389523913516153699624404397503364760209750198965",
    "2082175573105919327579605927684972257244834479905043487606018480891006067503189435",
    "1942921711925290132823971776864238644417661540760987603847662976606820344224527922302926211",
    "5494467860345971380570753195590132183781118478869271589678543047862011487452888227090933031310123701",
    "47108220518641518802118971470955381408131440042706598149849757389472954451355452889071492134660868248563001011",
    "1224939601435250677240944373082090949943585589026155133464810175292336195388826375748636115618176553643756803498606264191",
    "96628963298447280919927953386332031167682264043092747711368137641453332526883992822518172167968007887771992080746478077722442851831",
    "23130601650038998858250356469453469539571044679175753615930334928835892794769268061796821453552124424327952585726630671538922720993311640741787",
];

fn parse(strs: &[&str]) -> Vec<BigInt> {
    strs.iter().map(|s| s.parse().unwrap()).collect()
}

fn hp(x: f64) -> HighPrec {
    HighPrec::from_f64(x)
}

/// Least squares for y ~ sum_j beta_j * x^j, degree <= 2. Returns beta_0.
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

/// Normalized ratios r_L = (v_L / v_{L-1}) / lambda^(2L-1).
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

/// Parity intercepts then quadratic intercepts; last value of the deepest
/// nonempty trail.
fn ladder_tip(rats: &[(u32, HighPrec)]) -> HighPrec {
    let lin: Vec<(u32, HighPrec)> = rats
        .windows(3)
        .filter(|w| w[2].0 == w[0].0 + 2)
        .map(|w| {
            let l = w[2].0;
            let v = (hp(l as f64) * &w[2].1 - hp((l - 2) as f64) * &w[0].1) * hp(0.5);
            (l, v)
        })
        .collect();
    let quad: Vec<(u32, HighPrec)> = lin
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let l = w[1].0;
            let num = hp((l * l) as f64) * &w[1].1 - hp(((l - 1) * (l - 1)) as f64) * &w[0].1;
            (l, num / hp((2 * l - 1) as f64))
        })
        .collect();
    if let Some((_, v)) = quad.last() {
        v.clone()
    } else if let Some((_, v)) = lin.last() {
        v.clone()
    } else {
        rats.last().expect("nonempty ratio trail").1.clone()
    }
}

/// Hybrid: mu from an intercept ladder on the exact prefix (de-powered by
/// the current h), h from a polynomial fit of the delta trail over the
/// whole splice.
fn hybrid_fit(
    terms: &[(u32, HighPrec)],
    exact_end: u32,
    lambda: &HighPrec,
    cutoff: u32,
    deg: usize,
) -> (f64, f64, f64) {
    let rats = norm_ratios(terms, lambda);
    let exact: Vec<(u32, HighPrec)> = rats.iter().filter(|(l, _)| *l <= exact_end).cloned().collect();
    let mut mu = ladder_tip(&exact);
    let mut h = HighPrec::zero();
    for _ in 0..3 {
        let dpts: Vec<(HighPrec, HighPrec)> = rats
            .iter()
            .filter(|(l, _)| *l >= cutoff)
            .map(|(l, r)| {
                let delta = (r / &mu - HighPrec::one()) * hp(*l as f64);
                (HighPrec::one() / hp(*l as f64), delta)
            })
            .collect();
        h = lsq_intercept(&dpts, deg);
        let depowered: Vec<(u32, HighPrec)> = exact
            .iter()
            .map(|(l, r)| {
                let f = (hp((*l - 1) as f64) / hp(*l as f64)).pow(&h);
                (*l, r * f)
            })
            .collect();
        mu = ladder_tip(&depowered);
    }
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

/// Pure regression: quadratic fit of r against 1/L for mu, then delta and
/// amplitude fits.
fn regression_fit(
    terms: &[(u32, HighPrec)],
    lambda: &HighPrec,
    cutoff: u32,
) -> (f64, f64, f64) {
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

fn run(name: &str, all: &[BigInt], exact_n: usize, count: usize, deflate: bool) {
    let exact = &all[..exact_n];
    let mut opts = ExtendOptions::default();
    opts.floor_digits = 0;
    if deflate {
        opts.deflate = Some(HighPrec::parse("1.7445498").unwrap());
    }
    let lambda = HighPrec::parse("1.7445498").unwrap();
    let ext = match extend_for_ratio_analysis(exact, 1, count, &opts) {
        Err(e) => {
            println!("{name}: ERROR {e}");
            return;
        }
        Ok(ext) => ext,
    };
    println!("== {name} (deflate {deflate}) ==");
    let mut prev = HighPrec::from_bigint(&all[exact_n - 1]);
    for (i, p) in ext.predictions.iter().enumerate() {
        let cons_r = &p.value / &prev;
        prev = p.value.clone();
        let truth_idx = exact_n + i;
        let audit = if truth_idx < all.len() {
            let tr = HighPrec::from_bigint(&all[truth_idx])
                / HighPrec::from_bigint(&all[truth_idx - 1]);
            format!(
                "ratio_relerr {:9.2e}",
                ((&cons_r - &tr) / &tr).abs().to_f64()
            )
        } else {
            String::new()
        };
        println!(
            "  idx {:2} claims {:2} contrib {:2}  {}",
            p.index, p.agreed_digits, p.contributors, audit
        );
    }
    let exact_terms: Vec<(u32, HighPrec)> = (0..exact_n)
        .map(|i| (1 + i as u32, HighPrec::from_bigint(&all[i])))
        .collect();
    for floor in [5u32, 4, 3, 2] {
        let acc = ext
            .predictions
            .iter()
            .take_while(|p| p.agreed_digits >= floor)
            .count();
        let mut terms = exact_terms.clone();
        for p in ext.predictions.iter().take(acc) {
            terms.push((p.index, p.value.clone()));
        }
        let top = terms.last().unwrap().0;
        let exact_end = exact_n as u32;
        for cutoff in [exact_end / 2, top / 2, exact_end.min(top * 2 / 3)] {
            let (rd, rh, re) = regression_fit(&terms, &lambda, cutoff);
            let (hd1, hh1, he1) = hybrid_fit(&terms, exact_end, &lambda, cutoff, 1);
            let (hd2, hh2, he2) = hybrid_fit(&terms, exact_end, &lambda, cutoff, 2);
            println!(
                "  floor {floor} acc {acc:2} top {top:2} cut {cutoff:2} | reg d {rd:+.5} h {rh:+.4} e {re:+.3} | hy1 d {hd1:+.5} h {hh1:+.4} e {he1:+.3} | hy2 d {hd2:+.5} h {hh2:+.4} e {he2:+.3}"
            );
        }
        // ladder fit on the gated splice, via the real analysis entry point
        let vals: Vec<HighPrec> = terms.iter().map(|(_, v)| v.clone()).collect();
        let sample = SeriesSample::from_values(1, vals);
        match fit_subdominant(&sample, &lambda, &FitOptions::default()) {
            Ok(f) => println!(
                "  floor {floor} acc {acc:2} top {top:2}        | ladder d {:+.5} h {:+.4} e {:+.3}",
                f.d.value.to_f64(),
                f.h.value.to_f64(),
                f.e.value.to_f64()
            ),
            Err(e) => println!("  floor {floor} ladder ERROR {e}"),
        }
    }
}

fn main() {
    let ghat = parse(&GHAT);
    let gpol = parse(&GPOL);
    run("ghat14+8 ", &ghat, 14, 8, true);
    run("ghat14+8 ", &ghat, 14, 8, false);
    run("gpol16+10", &gpol, 16, 10, true);
    run("gpol16+10", &gpol, 16, 10, false);
    run("ghat22+20", &ghat, 22, 20, true);
    run("gpol26+16", &gpol, 26, 16, true);
    println!("targets: d -4.04354  h(ghat) 0.75  h(gpol) 1.75  e ~8");
    println!("bands:   d +-0.01    h +-0.05");
}
