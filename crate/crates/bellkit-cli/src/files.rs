//! Outcome table file format: CSV with header `i,j,eps,epsp,p`, sixteen
//! rows in entry order, probabilities rendered with 17 significant digits
//! so values round-trip bit-exactly.

use bellkit::chsh::{Outcome, PairwiseTable, Setting};

use crate::CliError;

pub const TABLE_HEADER: &str = "i,j,eps,epsp,p";

pub fn render_table(table: &PairwiseTable) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for i in Setting::ALL {
        for j in Setting::ALL {
            for e in Outcome::ALL {
                for ep in Outcome::ALL {
                    out.push_str(&format!(
                        "{},{},{},{},{:.16e}\n",
                        i.number(),
                        j.number(),
                        e.value(),
                        ep.value(),
                        table.prob(i, j, e, ep)
                    ));
                }
            }
        }
    }
    out
}

pub fn parse_table(text: &str) -> Result<PairwiseTable, CliError> {
    let bad = |line: usize, message: String| {
        CliError::validation(format!("table line {line}: {message}"))
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == TABLE_HEADER => {}
        Some((_, header)) => {
            return Err(bad(1, format!("expected header {TABLE_HEADER:?}, got {header:?}")))
        }
        None => return Err(bad(1, "empty table file".into())),
    }

    let mut probs = [0.0; 16];
    let mut seen = [false; 16];
    for (number, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(number + 1, format!("expected 5 fields, got {}", fields.len())));
        }
        let setting = |text: &str| {
            text.parse::<u8>()
                .ok()
                .and_then(Setting::from_number)
                .ok_or_else(|| format!("bad setting {text:?}"))
        };
        let outcome = |text: &str| {
            text.parse::<i8>()
                .ok()
                .and_then(Outcome::from_value)
                .ok_or_else(|| format!("bad outcome {text:?}"))
        };
        let i = setting(fields[0]).map_err(|m| bad(number + 1, m))?;
        let j = setting(fields[1]).map_err(|m| bad(number + 1, m))?;
        let e = outcome(fields[2]).map_err(|m| bad(number + 1, m))?;
        let ep = outcome(fields[3]).map_err(|m| bad(number + 1, m))?;
        let p: f64 = fields[4]
            .parse()
            .map_err(|_| bad(number + 1, format!("bad probability {:?}", fields[4])))?;
        let entry = ((i.index() * 2 + j.index()) * 2 + e.index()) * 2 + ep.index();
        if seen[entry] {
            return Err(bad(number + 1, format!("duplicate entry ({},{},{},{})", fields[0], fields[1], fields[2], fields[3])));
        }
        seen[entry] = true;
        probs[entry] = p;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(CliError::validation(format!(
            "table is missing entry index {missing}; sixteen rows are required",
        )));
    }
    PairwiseTable::from_probs(probs).map_err(|e| CliError::validation(e.to_string()))
}
