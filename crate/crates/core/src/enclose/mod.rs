//! Rigorous dyadic interval arithmetic and enclosures of `texp` and `Exp`.

mod boxes;
mod dyadic;
mod interval;
mod texp;

pub use boxes::{BoxParseError, IntervalBox};
pub use dyadic::{parse_rational, Dyadic, DyadicParseError, Round};
pub use interval::Interval;
pub use texp::{exp_fin_enclosure, exp_fin_scale, exp_on_closed_unit, series_order, texp_enclosure};

