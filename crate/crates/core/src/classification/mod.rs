//! DRASTIC rating tables and natural-breaks classification.

mod jenks;
mod rating;

pub use jenks::{classify, default_labels, jenks_breaks, within_class_sse, ClassBreaks};
pub use rating::{
    apply_rating, standard_scheme, standard_schemes, CategoryRating, IntervalRating, RatedGrid,
    RatingEntries, RatingScheme,
};
