use super::DescribeError;

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 10] = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

pub const MAX_WORDS_VALUE: u32 = 99_999;

fn below_hundred(n: u32) -> String {
    debug_assert!(n < 100);
    if n < 20 {
        UNITS[n as usize].to_string()
    } else if n % 10 == 0 {
        TENS[(n / 10) as usize].to_string()
    } else {
        format!("{}-{}", TENS[(n / 10) as usize], UNITS[(n % 10) as usize])
    }
}

fn below_thousand(n: u32) -> String {
    debug_assert!(n > 0 && n < 1000);
    let (h, rest) = (n / 100, n % 100);
    match (h, rest) {
        (0, r) => below_hundred(r),
        (h, 0) => format!("{} hundred", UNITS[h as usize]),
        (h, r) => format!("{} hundred and {}", UNITS[h as usize], below_hundred(r)),
    }
}

/// British-English cardinal: "one hundred and ninety-one",
/// "twelve thousand and five".
pub fn int_to_words(n: u32) -> Result<String, DescribeError> {
    if n > MAX_WORDS_VALUE {
        return Err(DescribeError::OutOfRange(n));
    }
    if n == 0 {
        return Ok("zero".into());
    }
    let (thousands, rest) = (n / 1000, n % 1000);
    let mut out = String::new();
    if thousands > 0 {
        out.push_str(&below_hundred(thousands));
        out.push_str(" thousand");
    }
    if rest > 0 {
        if thousands > 0 {
            out.push_str(if rest < 100 { " and " } else { " " });
        }
        out.push_str(&below_thousand(rest));
    }
    Ok(out)
}
