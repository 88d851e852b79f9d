//! Template descriptions of routes.
//!
//! A description is two to four sentences: an opening with length, shape and
//! endpoints; the elevation sentence; an optional "predominantly
//! uphill/downhill" sentence; and one sentence of comma-joined area clauses.
//! Numbers in the km, gain and area slots are written as digits or words
//! depending on seeded draws, see [`RandomStyle`].

mod words;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::RouteAttributes;
use crate::rng::{self, StreamRng};
pub use words::{int_to_words, MAX_WORDS_VALUE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescribeError {
    #[error("{0} is outside the range that can be spelled out")]
    OutOfRange(u32),
    #[error("invalid description config: {0}")]
    InvalidConfig(String),
}

/// Regular expression every generated description matches.
pub const DESCRIPTION_GRAMMAR: &str = concat!(
    r"^This is a (?:circular, )?(?:\d+|[a-z]+(?:[ -][a-z]+)*) km (?:coastal )?walk that ",
    r"(?:begins and ends (?:in .+?|at an unnamed location)",
    r"|begins (?:in .+?|at an unnamed location) and ends (?:in .+?|at an unnamed location))\. ",
    r"Total elevation gain is (?:\d+|[a-z]+(?:[ -][a-z]+)*) metres, and elevation grade is \d+\.\d\.",
    r"(?: The walk is predominantly (?:uphill|downhill)\.)?",
    r"(?: (?:(?:About (?:\d+|[a-z]+(?:[ -][a-z]+)*) percent|Most) of the walk ",
    r"(?:is within a national park|is in a wooded area|goes through an urban area|is within green space|is along the coast|is alongside a body of water)",
    r"|The walk is entirely (?:within a national park|in a wooded area|in an urban area|within green space|along the coast|alongside a body of water))",
    r"(?:, (?:(?:about (?:\d+|[a-z]+(?:[ -][a-z]+)*) percent|most) of the walk ",
    r"(?:is within a national park|is in a wooded area|goes through an urban area|is within green space|is along the coast|is alongside a body of water)",
    r"|the walk is entirely (?:within a national park|in a wooded area|in an urban area|within green space|along the coast|alongside a body of water)))*\.)?$",
);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DescriptionConfig {
    pub seed: u64,
    pub word_swap_probability: f64,
    /// Area clauses are emitted for percentages at or above this value.
    pub mention_threshold: f64,
    /// Metres by which gain must exceed loss (or vice versa) for the
    /// predominance sentence.
    pub predominance_threshold: f64,
}

impl Default for DescriptionConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            word_swap_probability: 0.5,
            mention_threshold: 5.0,
            predominance_threshold: 100.0,
        }
    }
}

impl DescriptionConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), DescribeError> {
        if !(0.0..=1.0).contains(&self.word_swap_probability) {
            return Err(DescribeError::InvalidConfig(format!(
                "word_swap_probability {} not in [0, 1]",
                self.word_swap_probability
            )));
        }
        if !(0.0..=100.0).contains(&self.mention_threshold) {
            return Err(DescribeError::InvalidConfig(format!(
                "mention_threshold {} not in [0, 100]",
                self.mention_threshold
            )));
        }
        if !(self.predominance_threshold >= 0.0) {
            return Err(DescribeError::InvalidConfig(format!(
                "predominance_threshold {} is negative",
                self.predominance_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    pub route_id: String,
    pub text: String,
    pub char_length: usize,
    pub token_estimate: usize,
}

impl Description {
    pub fn new(route_id: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let char_length = text.chars().count();
        Self {
            route_id: route_id.into(),
            token_estimate: estimate_token_count(&text),
            char_length,
            text,
        }
    }
}

/// Rough word-piece count, `ceil(chars / 4.5)`, for sequence-limit warnings.
pub fn estimate_token_count(text: &str) -> usize {
    let chars = text.chars().count();
    (2 * chars).div_ceil(9)
}

/// Whole kilometres shown in the opening sentence: truncated, at least 1.
pub fn format_km(length_m: f64) -> u32 {
    ((length_m / 1000.0).floor() as u32).max(1)
}

/// Grade as shown in text: one decimal, halves rounded away from zero.
pub fn format_grade(grade: f64) -> String {
    format!("{:.1}", (grade * 10.0).round() / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AreaKind {
    NationalPark,
    Woodland,
    Urban,
    Greenspace,
    Coast,
    Water,
}

impl AreaKind {
    /// Order of clauses in the area sentence.
    pub const ORDER: [AreaKind; 6] = [
        AreaKind::NationalPark,
        AreaKind::Woodland,
        AreaKind::Urban,
        AreaKind::Greenspace,
        AreaKind::Coast,
        AreaKind::Water,
    ];

    fn percent(self, a: &RouteAttributes) -> f64 {
        match self {
            AreaKind::NationalPark => a.in_national_parks,
            AreaKind::Woodland => a.in_woodland,
            AreaKind::Urban => a.in_urban,
            AreaKind::Greenspace => a.in_greenspace,
            AreaKind::Coast => a.along_coast,
            AreaKind::Water => a.along_surfacewater,
        }
    }

    fn partial(self) -> &'static str {
        match self {
            AreaKind::NationalPark => "is within a national park",
            AreaKind::Woodland => "is in a wooded area",
            AreaKind::Urban => "goes through an urban area",
            AreaKind::Greenspace => "is within green space",
            AreaKind::Coast => "is along the coast",
            AreaKind::Water => "is alongside a body of water",
        }
    }

    fn entire(self) -> &'static str {
        match self {
            AreaKind::NationalPark => "within a national park",
            AreaKind::Woodland => "in a wooded area",
            AreaKind::Urban => "in an urban area",
            AreaKind::Greenspace => "within green space",
            AreaKind::Coast => "along the coast",
            AreaKind::Water => "alongside a body of water",
        }
    }
}

/// A number slot in the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Km,
    Gain,
    Area(AreaKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spelling {
    Digits,
    Words,
    /// "most of the walk"; only meaningful for area slots.
    Most,
}

/// Chooses how each number slot is written.
pub trait NumberStyle {
    fn choose(&mut self, slot: Slot, value: u32) -> Spelling;
}

/// Seeded choice: one uniform draw per slot, words when it falls below the
/// swap probability. For area slots of 60 percent or more that were swapped,
/// a second draw picks "most" with probability 0.25. A 100 percent area is
/// written "entirely" and consumes no draw.
pub struct RandomStyle {
    rng: StreamRng,
    swap_probability: f64,
}

impl RandomStyle {
    pub const MOST_PROBABILITY: f64 = 0.25;
    pub const MOST_MIN_PERCENT: u32 = 60;

    pub fn new(rng: StreamRng, swap_probability: f64) -> Self {
        Self { rng, swap_probability }
    }

    /// Stream for one route under `config.seed`.
    pub fn for_route(config: &DescriptionConfig, route_id: &str) -> Self {
        Self::new(rng::stream(config.seed, route_id), config.word_swap_probability)
    }
}

impl NumberStyle for RandomStyle {
    fn choose(&mut self, slot: Slot, value: u32) -> Spelling {
        if rng::unit_f64(&mut self.rng) >= self.swap_probability {
            return Spelling::Digits;
        }
        if matches!(slot, Slot::Area(_))
            && value >= Self::MOST_MIN_PERCENT
            && rng::unit_f64(&mut self.rng) < Self::MOST_PROBABILITY
        {
            return Spelling::Most;
        }
        Spelling::Words
    }
}

/// Same spelling for every slot.
pub struct FixedStyle(pub Spelling);

impl NumberStyle for FixedStyle {
    fn choose(&mut self, _slot: Slot, _value: u32) -> Spelling {
        self.0
    }
}

impl<F: FnMut(Slot, u32) -> Spelling> NumberStyle for F {
    fn choose(&mut self, slot: Slot, value: u32) -> Spelling {
        self(slot, value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Km,
    Metres,
    Percent,
}

/// `value` followed by its unit, as digits or words. [`Spelling::Most`]
/// yields "most", which callers use without a unit.
pub fn render_number(value: u32, unit: Unit, spelling: Spelling) -> String {
    let number = match spelling {
        Spelling::Most => return "most".to_string(),
        // values past the words range fall back to digits
        Spelling::Words => int_to_words(value).unwrap_or_else(|_| value.to_string()),
        Spelling::Digits => value.to_string(),
    };
    let unit = match unit {
        Unit::Km => "km",
        Unit::Metres => "metres",
        Unit::Percent => "percent",
    };
    format!("{number} {unit}")
}

fn area_clause(kind: AreaKind, percent: u32, style: &mut impl NumberStyle) -> String {
    if percent >= 100 {
        return format!("the walk is entirely {}", kind.entire());
    }
    match style.choose(Slot::Area(kind), percent) {
        Spelling::Most => format!("most of the walk {}", kind.partial()),
        s => format!("about {} of the walk {}", render_number(percent, Unit::Percent, s), kind.partial()),
    }
}

fn location(place: &Option<String>) -> String {
    match place {
        Some(name) => format!("in {name}"),
        None => "at an unnamed location".to_string(),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Renders the description text with an explicit number style.
pub fn render_description(
    attrs: &RouteAttributes,
    config: &DescriptionConfig,
    style: &mut impl NumberStyle,
) -> String {
    let km = format_km(attrs.length_m);
    let km_text = render_number(km, Unit::Km, style.choose(Slot::Km, km));
    let shape = if attrs.is_circular { "circular, " } else { "" };
    let coastal = if attrs.is_coastal { " coastal" } else { "" };
    let ends = if attrs.is_circular {
        format!("begins and ends {}", location(&attrs.start_place))
    } else {
        format!("begins {} and ends {}", location(&attrs.start_place), location(&attrs.end_place))
    };
    let mut text = format!("This is a {shape}{km_text}{coastal} walk that {ends}.");

    let gain = attrs.total_gain.round().max(0.0) as u32;
    let gain_text = render_number(gain, Unit::Metres, style.choose(Slot::Gain, gain));
    text.push_str(&format!(
        " Total elevation gain is {gain_text}, and elevation grade is {}.",
        format_grade(attrs.grade)
    ));

    let net = attrs.total_gain - attrs.total_loss;
    let t = config.predominance_threshold;
    if net > 0.0 && net >= t {
        text.push_str(" The walk is predominantly uphill.");
    } else if net < 0.0 && -net >= t {
        text.push_str(" The walk is predominantly downhill.");
    }

    let clauses: Vec<String> = AreaKind::ORDER
        .iter()
        .filter(|k| k.percent(attrs) >= config.mention_threshold && k.percent(attrs) > 0.0)
        .map(|k| area_clause(*k, k.percent(attrs).round() as u32, style))
        .collect();
    if !clauses.is_empty() {
        text.push(' ');
        text.push_str(&capitalize(&clauses.join(", ")));
        text.push('.');
    }
    text
}

/// Description with the route's own seeded number style.
pub fn generate_description(attrs: &RouteAttributes, config: &DescriptionConfig) -> Description {
    let mut style = RandomStyle::for_route(config, &attrs.route_id);
    Description::new(attrs.route_id.clone(), render_description(attrs, config, &mut style))
}

#[derive(Debug, Serialize, Deserialize)]
struct DescriptionRecord {
    route_id: String,
    text: String,
}

/// One `{"route_id": .., "text": ..}` object per line.
pub fn write_descriptions<W: Write>(mut w: W, descriptions: &[Description]) -> std::io::Result<()> {
    for d in descriptions {
        let rec = DescriptionRecord { route_id: d.route_id.clone(), text: d.text.clone() };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::other)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_descriptions<R: BufRead>(reader: R) -> std::io::Result<Vec<Description>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DescriptionRecord = serde_json::from_str(&line).map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
        })?;
        out.push(Description::new(rec.route_id, rec.text));
    }
    Ok(out)
}
