//! Scratch probe: parity-safe ladder (stride-2 all the way, branch-tip
//! mean). Delete me.

use gerry::diffapprox::{extend_for_ratio_analysis, ExtendOptions};
use gerry::series::HighPrec;
use num_bigint::BigInt;
use num_traits::Zero;

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

fn hp(x: f64) -> HighPrec {
    HighPrec::from_f64(x)
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

/// Stride-2 linear intercepts: (L a_L - (L-2) a_{L-2}) / 2.
fn lin2(trail: &[(u32, HighPrec)]) -> Vec<(u32, HighPrec)> {
    trail
        .windows(3)
        .filter(|w| w[2].0 == w[0].0 + 2)
        .map(|w| {
            let l = w[2].0;
            let v = (hp(l as f64) * &w[2].1 - hp((l - 2) as f64) * &w[0].1) * hp(0.5);
            (l, v)
        })
        .collect()
}

/// Stride-2 quadratic intercepts: (L^2 a_L - (L-2)^2 a_{L-2}) / (4(L-1)).
fn quad2(trail: &[(u32, HighPrec)]) -> Vec<(u32, HighPrec)> {
    trail
        .windows(3)
        .filter(|w| w[2].0 == w[0].0 + 2)
        .map(|w| {
            let l = w[2].0;
            let num =
                hp((l * l) as f64) * &w[2].1 - hp(((l - 2) * (l - 2)) as f64) * &w[0].1;
            (l, num / hp((4 * (l - 1)) as f64))
        })
        .collect()
}

/// Mean of the last two trail entries (adjacent entries anchor opposite
/// parities, so the mean cancels the leading alternating residue).
fn tip(trail: &[(u32, HighPrec)]) -> HighPrec {
    match trail {
        [] => HighPrec::zero(),
        [x] => x.1.clone(),
        [.., a, b] => (&a.1 + &b.1) * hp(0.5),
    }
}

fn best_trail(rats: &[(u32, HighPrec)]) -> Vec<(u32, HighPrec)> {
    let l1 = lin2(rats);
    let l2 = quad2(&l1);
    if !l2.is_empty() {
        l2
    } else if !l1.is_empty() {
        l1
    } else {
        rats.to_vec()
    }
}

fn fit_v2(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> (f64, f64, f64) {
    let rats = norm_ratios(terms, lambda);
    let mut mu = tip(&best_trail(&rats));
    let mut h = HighPrec::zero();
    for _ in 0..3 {
        let deltas: Vec<(u32, HighPrec)> = rats
            .iter()
            .map(|(l, r)| (*l, (r / &mu - HighPrec::one()) * hp(*l as f64)))
            .collect();
        h = tip(&best_trail(&deltas));
        let depowered: Vec<(u32, HighPrec)> = rats
            .iter()
            .map(|(l, r)| {
                let f = (hp((*l - 1) as f64) / hp(*l as f64)).pow(&h);
                (*l, r * f)
            })
            .collect();
        mu = tip(&best_trail(&depowered));
    }
    let d = mu.ln() / lambda.ln();
    let amps: Vec<(u32, HighPrec)> = terms
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(l, v)| {
            let ll = hp(*l as f64);
            (
                *l,
                v / lambda.powi((*l * *l) as usize) / mu.powi(*l as usize) / ll.pow(&h),
            )
        })
        .collect();
    let e = tip(&best_trail(&amps)).ln() / lambda.ln();
    (d.to_f64(), h.to_f64(), e.to_f64())
}

/// Least-squares line in x = 1/L^2 over the trailing half of a trail;
/// returns the x -> 0 intercept.
fn tail_intercept(trail: &[(u32, HighPrec)]) -> HighPrec {
    if trail.is_empty() {
        return HighPrec::zero();
    }
    if trail.len() == 1 {
        return trail[0].1.clone();
    }
    let keep = (trail.len() / 2).max(4).min(trail.len());
    let pts = &trail[trail.len() - keep..];
    let mut sx = HighPrec::zero();
    let mut sy = HighPrec::zero();
    let mut sxx = HighPrec::zero();
    let mut sxy = HighPrec::zero();
    let n = hp(pts.len() as f64);
    for (l, v) in pts {
        let x = HighPrec::one() / hp((l * l) as f64);
        sx = &sx + &x;
        sy = &sy + v;
        sxx = &sxx + &(&x * &x);
        sxy = &sxy + &(&x * v);
    }
    let det = &(&n * &sxx) - &(&sx * &sx);
    if det.is_zero() {
        return pts.last().unwrap().1.clone();
    }
    (&(&sxx * &sy) - &(&sx * &sxy)) / &det
}

fn fit_v3(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> (f64, f64, f64) {
    let rats = norm_ratios(terms, lambda);
    let lr = lin2(&rats);
    let mut mu = tail_intercept(&lr);
    let mut h = HighPrec::zero();
    for _ in 0..3 {
        let deltas: Vec<(u32, HighPrec)> = rats
            .iter()
            .map(|(l, r)| (*l, (r / &mu - HighPrec::one()) * hp(*l as f64)))
            .collect();
        h = tail_intercept(&lin2(&deltas));
        let depowered: Vec<(u32, HighPrec)> = rats
            .iter()
            .map(|(l, r)| {
                let f = (hp((*l - 1) as f64) / hp(*l as f64)).pow(&h);
                (*l, r * f)
            })
            .collect();
        mu = tail_intercept(&lin2(&depowered));
    }
    let d = mu.ln() / lambda.ln();
    let amps: Vec<(u32, HighPrec)> = terms
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(l, v)| {
            let ll = hp(*l as f64);
            (
                *l,
                v / lambda.powi((*l * *l) as usize) / mu.powi(*l as usize) / ll.pow(&h),
            )
        })
        .collect();
    let e = tail_intercept(&lin2(&amps)).ln() / lambda.ln();
    (d.to_f64(), h.to_f64(), e.to_f64())
}

/// Alternate-term ratios s_L = sqrt(v_L / v_{L-2}) / lambda^(2L-2); same
/// mu(1 + h/L + ...) form as the plain normalized ratios, but the
/// odd-even oscillation enters differenced and so one power of L weaker.
fn alt_ratios(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> Vec<(u32, HighPrec)> {
    let mut out = Vec::new();
    for w in terms.windows(3) {
        let (l0, ref v0) = w[0];
        let (l2, ref v2) = w[2];
        if l2 != l0 + 2 || v0.is_zero() || v2.is_zero() {
            continue;
        }
        let q = v2 / v0;
        if !q.is_positive() {
            continue;
        }
        out.push((l2, q.sqrt() / lambda.powi((2 * l2 - 2) as usize)));
    }
    out
}

/// Stride-1 linear intercepts L a_L - (L-1) a_{L-1}.
fn lin1(trail: &[(u32, HighPrec)]) -> Vec<(u32, HighPrec)> {
    trail
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let l = w[1].0;
            (l, hp(l as f64) * &w[1].1 - hp((l - 1) as f64) * &w[0].1)
        })
        .collect()
}

/// Stride-1 quadratic intercepts (L^2 l_L - (L-1)^2 l_{L-1}) / (2L-1).
fn quad1(trail: &[(u32, HighPrec)]) -> Vec<(u32, HighPrec)> {
    trail
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1)
        .map(|w| {
            let l = w[1].0;
            let num = hp((l * l) as f64) * &w[1].1 - hp(((l - 1) * (l - 1)) as f64) * &w[0].1;
            (l, num / hp((2 * l - 1) as f64))
        })
        .collect()
}

fn deep_tip(trail: &[(u32, HighPrec)]) -> HighPrec {
    let l1 = lin1(trail);
    let l2 = quad1(&l1);
    let best = if !l2.is_empty() {
        &l2
    } else if !l1.is_empty() {
        &l1
    } else {
        return tip(trail);
    };
    best.last().unwrap().1.clone()
}

fn fit_v4(terms: &[(u32, HighPrec)], lambda: &HighPrec) -> (f64, f64, f64) {
    let alts = alt_ratios(terms, lambda);
    let mut mu = deep_tip(&alts);
    let mut h = HighPrec::zero();
    for _ in 0..3 {
        let deltas: Vec<(u32, HighPrec)> = alts
            .iter()
            .map(|(l, s)| (*l, (s / &mu - HighPrec::one()) * hp(*l as f64)))
            .collect();
        h = deep_tip(&deltas);
        let half_h = &h * hp(0.5);
        let depowered: Vec<(u32, HighPrec)> = alts
            .iter()
            .map(|(l, s)| {
                let f = (hp((*l - 2) as f64) / hp(*l as f64)).pow(&half_h);
                (*l, s * f)
            })
            .collect();
        mu = deep_tip(&depowered);
    }
    let d = mu.ln() / lambda.ln();
    let amps: Vec<(u32, HighPrec)> = terms
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(l, v)| {
            let ll = hp(*l as f64);
            (
                *l,
                v / lambda.powi((*l * *l) as usize) / mu.powi(*l as usize) / ll.pow(&h),
            )
        })
        .collect();
    let e = tip(&best_trail(&amps)).ln() / lambda.ln();
    (d.to_f64(), h.to_f64(), e.to_f64())
}

fn run_exact(name: &str, all: &[BigInt], lo: usize, hi: usize, lambda: &HighPrec) {
    println!("-- {name} exact prefix sweep --");
    for n in lo..=hi {
        let terms: Vec<(u32, HighPrec)> = (0..n)
            .filter(|&i| !all[i].is_zero() || i > 0)
            .map(|i| (1 + i as u32, HighPrec::from_bigint(&all[i])))
            .collect();
        let (d, h, e) = fit_v2(&terms, lambda);
        let (d4, h4, e4) = fit_v4(&terms, lambda);
        println!(
            "n {n:2} | v2 d {d:+.5} h {h:+.4} e {e:+.3} | v4 d {d4:+.5} h {h4:+.4} e {e4:+.3}"
        );
    }
}

fn run_splice(name: &str, all: &[BigInt], exact_n: usize, count: usize, deflate: bool) {
    let lambda = HighPrec::parse("1.7445498").unwrap();
    let exact = &all[..exact_n];
    let mut opts = ExtendOptions::default();
    opts.floor_digits = 0;
    if deflate {
        opts.deflate = Some(lambda.clone());
    }
    let ext = match extend_for_ratio_analysis(exact, 1, count, &opts) {
        Ok(e) => e,
        Err(e) => {
            println!("{name}: ERROR {e}");
            return;
        }
    };
    let exact_terms: Vec<(u32, HighPrec)> = (0..exact_n)
        .map(|i| (1 + i as u32, HighPrec::from_bigint(&all[i])))
        .collect();
    println!("-- {name} splice sweep (deflate {deflate}) --");
    for k in 0..=count {
        let mut terms = exact_terms.clone();
        for p in ext.predictions.iter().take(k) {
            terms.push((p.index, p.value.clone()));
        }
        let (d, h, e) = fit_v2(&terms, &lambda);
        let (d3, h3, e3) = fit_v3(&terms, &lambda);
        let (d4, h4, e4) = fit_v4(&terms, &lambda);
        let claims = ext
            .predictions
            .get(k.wrapping_sub(1))
            .map(|p| p.agreed_digits)
            .unwrap_or(99);
        println!(
            "k {k:2} top {:2} (claims {claims:2}) | v2 d {d:+.5} h {h:+.4} e {e:+.3} | v3 d {d3:+.5} h {h3:+.4} e {e3:+.3} | v4 d {d4:+.5} h {h4:+.4} e {e4:+.3}",
            exact_n + k
        );
    }
}

fn main() {
    let ghat: Vec<BigInt> = GHAT.iter().map(|s| s.parse().unwrap()).collect();
    let gpol: Vec<BigInt> = GPOL.iter().map(|s| s.parse().unwrap()).collect();
    let lambda = HighPrec::parse("1.7445498").unwrap();
    run_exact("ghat", &ghat, 12, 22, &lambda);
    run_exact("gpol", &gpol, 12, 26, &lambda);
    run_splice("ghat14+8", &ghat, 14, 8, false);
    run_splice("ghat14+8", &ghat, 14, 8, true);
    run_splice("ghat22+20", &ghat, 22, 20, true);
    run_splice("gpol16+10", &gpol, 16, 10, true);
    run_splice("gpol26+16", &gpol, 26, 16, true);
    println!("targets: d -4.04354  h(ghat) 0.75 h(gpol) 1.75  e ~8");
    println!("bands: d +-0.01  h +-0.05");
}
