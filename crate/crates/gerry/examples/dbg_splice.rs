//! Scratch probe for the ratio-sequence extension path. Delete me.

use gerry::analysis::{fit_subdominant, FitOptions};
use gerry::diffapprox::{extend_for_ratio_analysis, ExtendOptions};
use gerry::series::HighPrec;
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

fn check(name: &str, exact_n: usize, count: usize, all: &[BigInt], start: u32, deflate: bool) {
    println!("=== {name}: extend from {exact_n} exact terms by {count} (deflate={deflate}) ===");
    let exact = &all[..exact_n];
    let mut opts = ExtendOptions::default();
    if deflate {
        opts.deflate = Some(HighPrec::parse("1.7445498").unwrap());
    }
    match extend_for_ratio_analysis(exact, start, count, &opts) {
        Err(e) => println!("  ERROR: {e}"),
        Ok(ext) => {
            println!("  accepted {} of {}", ext.accepted, ext.predictions.len());
            let mut prev = HighPrec::from_bigint(&all[exact_n - 1]);
            for (i, p) in ext.predictions.iter().enumerate() {
                let pos = exact_n + i;
                let truth = if pos < all.len() {
                    let t = HighPrec::from_bigint(&all[pos]);
                    let re = ((&p.value - &t) / &t).abs().to_f64();
                    let rhat = &p.value / &prev;
                    let tprev = HighPrec::from_bigint(&all[pos - 1]);
                    let rtrue = &t / &tprev;
                    let rre = ((&rhat - &rtrue) / &rtrue).abs().to_f64();
                    format!("value relerr {:.3e}  ratio relerr {:.3e}", re, rre)
                } else {
                    "(no truth)".to_string()
                };
                prev = p.value.clone();
                println!(
                    "  idx {:2}  digits {:2}  contrib {:2}  {}",
                    p.index, p.agreed_digits, p.contributors, truth
                );
            }
            // Fit the spliced sample like the acceptance criterion does,
            // and a forced splice of every prediction for comparison.
            let lambda = HighPrec::parse("1.7445498").unwrap();
            let mut forced_vals: Vec<HighPrec> =
                exact.iter().map(HighPrec::from_bigint).collect();
            forced_vals.extend(ext.predictions.iter().map(|p| p.value.clone()));
            let forced = gerry::series::SeriesSample::from_values(start, forced_vals);
            for (tag, s) in [("gated", &ext.sample), ("forced", &forced)] {
                match fit_subdominant(s, &lambda, &FitOptions::default()) {
                    Err(e) => println!("  fit({tag}) ERROR: {e}"),
                    Ok(fit) => println!(
                        "  fit({tag}): d = {} +- {}   h = {} +- {}   e = {} +- {}",
                        fit.d.value.to_sci(8),
                        fit.d.spread.to_sci(2),
                        fit.h.value.to_sci(8),
                        fit.h.spread.to_sci(2),
                        fit.e.value.to_sci(8),
                        fit.e.spread.to_sci(2),
                    ),
                }
            }
        }
    }
}

fn main() {
    let ghat = parse(&GHAT);
    let gpol = parse(&GPOL);

    for deflate in [false, true] {
        check("ghat L<=14", 14, 8, &ghat, 1, deflate);
        check("ghat L<=22 (paper setup)", 22, 20, &ghat, 1, deflate);
        check("G_L(1)/2 L<=16", 16, 10, &gpol, 1, deflate);
        check("G_L(1)/2 L<=26", 26, 16, &gpol, 1, deflate);
    }

    // Fit on exact-only data for comparison.
    for (name, data, n) in [("ghat exact14", &ghat, 14), ("gpol exact16", &gpol, 16)] {
        let vals: Vec<HighPrec> = data[..n].iter().map(HighPrec::from_bigint).collect();
        let s = gerry::series::SeriesSample::from_values(1, vals);
        let lambda = HighPrec::parse("1.7445498").unwrap();
        match fit_subdominant(&s, &lambda, &FitOptions::default()) {
            Err(e) => println!("{name}: fit ERROR: {e}"),
            Ok(fit) => println!(
                "{name}: d = {}  h = {}  e = {}",
                fit.d.value.to_sci(8),
                fit.h.value.to_sci(8),
                fit.e.value.to_sci(8),
            ),
        }
    }
}
