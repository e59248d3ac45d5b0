//! Rectangle exchanges: piecewise translations of the unit square.

use std::fmt;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geometry::{self, Point, Rect, SegmentSet};
use crate::rational::{self, ExactRational};

/// First tiling violation found by [`rect_validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingError {
    LengthMismatch { sources: usize, translations: usize },
    Empty,
    Degenerate(usize),
    SourceOutOfBounds(usize),
    Overlap(usize, usize),
    Gap { covered: String },
    ImageOutOfBounds(usize),
    ImageOverlap(usize, usize),
}

impl fmt::Display for TilingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingError::LengthMismatch { sources, translations } => {
                write!(f, "{sources} sources but {translations} translations")
            }
            TilingError::Empty => write!(f, "no source rectangles"),
            TilingError::Degenerate(i) => write!(f, "rectangle {i} has zero area"),
            TilingError::SourceOutOfBounds(i) => write!(f, "source rectangle {i} leaves the unit square"),
            TilingError::Overlap(i, j) => write!(f, "source rectangles {i} and {j} overlap"),
            TilingError::Gap { covered } => write!(f, "sources cover area {covered}, leaving a gap"),
            TilingError::ImageOutOfBounds(i) => write!(f, "image of rectangle {i} leaves the unit square"),
            TilingError::ImageOverlap(i, j) => write!(f, "images of rectangles {i} and {j} overlap"),
        }
    }
}

impl std::error::Error for TilingError {}

/// Checks that the sources tile the unit square and that the translated
/// images do too.
pub fn rect_validate(sources: &[Rect], translations: &[Point]) -> std::result::Result<(), TilingError> {
    if sources.len() != translations.len() {
        return Err(TilingError::LengthMismatch {
            sources: sources.len(),
            translations: translations.len(),
        });
    }
    if sources.is_empty() {
        return Err(TilingError::Empty);
    }
    for (i, r) in sources.iter().enumerate() {
        if r.is_degenerate() {
            return Err(TilingError::Degenerate(i));
        }
        if !r.within_unit_square() {
            return Err(TilingError::SourceOutOfBounds(i));
        }
    }
    for i in 0..sources.len() {
        for j in i + 1..sources.len() {
            if sources[i].intersection(&sources[j]).is_some() {
                return Err(TilingError::Overlap(i, j));
            }
        }
    }
    let covered: ExactRational = sources.iter().map(Rect::area).sum();
    if covered != rational::one() {
        return Err(TilingError::Gap {
            covered: rational::format_rational(&covered),
        });
    }
    let images: Vec<Rect> = sources.iter().zip(translations).map(|(r, t)| r.translate(t)).collect();
    for (i, r) in images.iter().enumerate() {
        if !r.within_unit_square() {
            return Err(TilingError::ImageOutOfBounds(i));
        }
    }
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].intersection(&images[j]).is_some() {
                return Err(TilingError::ImageOverlap(i, j));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangleExchange {
    sources: Vec<Rect>,
    translations: Vec<Point>,
}

impl RectangleExchange {
    pub fn new(sources: Vec<Rect>, translations: Vec<Point>) -> Result<Self> {
        rect_validate(&sources, &translations)?;
        Ok(RectangleExchange { sources, translations })
    }

    pub fn identity() -> Self {
        RectangleExchange {
            sources: vec![Rect::unit()],
            translations: vec![(rational::zero(), rational::zero())],
        }
    }

    /// Swaps the left and right vertical halves.
    pub fn vertical_swap() -> Self {
        let h = rational::ratio(1, 2);
        Self::new(
            vec![
                Rect::new(rational::zero(), h.clone(), rational::zero(), rational::one()),
                Rect::new(h.clone(), rational::one(), rational::zero(), rational::one()),
            ],
            vec![(h.clone(), rational::zero()), (-h, rational::zero())],
        )
        .expect("vertical swap tiles")
    }

    /// `(x, y) -> (x + alpha, y + beta) mod 1` as four rectangles.
    pub fn product_rotation(alpha: &ExactRational, beta: &ExactRational) -> Result<Self> {
        let valid = |a: &ExactRational| a.is_positive() && a < &rational::one();
        if !valid(alpha) || !valid(beta) {
            return Err(Error::validation("rotation angles must lie in (0,1)"));
        }
        let z = rational::zero();
        let o = rational::one();
        let xa = &o - alpha;
        let yb = &o - beta;
        let sources = vec![
            Rect::new(z.clone(), xa.clone(), z.clone(), yb.clone()),
            Rect::new(xa.clone(), o.clone(), z.clone(), yb.clone()),
            Rect::new(z.clone(), xa.clone(), yb.clone(), o.clone()),
            Rect::new(xa, o.clone(), yb, o.clone()),
        ];
        let translations = vec![
            (alpha.clone(), beta.clone()),
            (alpha - &o, beta.clone()),
            (alpha.clone(), beta - &o),
            (alpha - &o, beta - &o),
        ];
        Self::new(sources, translations)
    }

    pub fn sources(&self) -> &[Rect] {
        &self.sources
    }

    pub fn translations(&self) -> &[Point] {
        &self.translations
    }

    pub fn images(&self) -> Vec<Rect> {
        self.sources
            .iter()
            .zip(&self.translations)
            .map(|(r, t)| r.translate(t))
            .collect()
    }

    fn source_index(&self, p: &Point) -> Result<usize> {
        self.sources.iter().position(|r| r.contains(p)).ok_or_else(|| {
            Error::Domain(format!(
                "({}, {}) is outside the unit square",
                rational::format_rational(&p.0),
                rational::format_rational(&p.1)
            ))
        })
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        let i = self.source_index(p)?;
        let t = &self.translations[i];
        Ok((&p.0 + &t.0, &p.1 + &t.1))
    }

    pub fn inverse(&self) -> Self {
        RectangleExchange {
            sources: self.images(),
            translations: self
                .translations
                .iter()
                .map(|(a, b)| (-a.clone(), -b.clone()))
                .collect(),
        }
    }

    /// Interior segments across which the translation vector jumps.
    pub fn discontinuities(&self) -> SegmentSet {
        let tiles: Vec<(Rect, &Point)> = self.sources.iter().cloned().zip(&self.translations).collect();
        geometry::labeled_boundary(&tiles)
    }

    /// Discontinuity set of the inverse map (boundaries between images).
    pub fn image_discontinuities(&self) -> SegmentSet {
        let tiles: Vec<(Rect, &Point)> = self.images().into_iter().zip(&self.translations).collect();
        geometry::labeled_boundary(&tiles)
    }

    /// Exact length of the interior discontinuity set.
    pub fn discontinuity_length(&self) -> ExactRational {
        self.discontinuities().total_length()
    }

    /// Image of a segment set: each segment is cut by the sources that own
    /// it (lower-left inclusion) and translated; pieces landing on the
    /// outer boundary of the square are dropped.
    pub fn push_segments(&self, segs: &SegmentSet) -> SegmentSet {
        let mut out = SegmentSet::new();
        for (y, a, b) in segs.horizontal() {
            for (r, t) in self.sources.iter().zip(&self.translations) {
                if !(&r.y0 <= y && y < &r.y1) {
                    continue;
                }
                let lo = a.max(&r.x0);
                let hi = b.min(&r.x1);
                if lo < hi {
                    let ny = y + &t.1;
                    if !geometry::on_outer_line(&ny) {
                        out.add_horizontal(ny, lo + &t.0, hi + &t.0);
                    }
                }
            }
        }
        for (x, a, b) in segs.vertical() {
            for (r, t) in self.sources.iter().zip(&self.translations) {
                if !(&r.x0 <= x && x < &r.x1) {
                    continue;
                }
                let lo = a.max(&r.y0);
                let hi = b.min(&r.y1);
                if lo < hi {
                    let nx = x + &t.0;
                    if !geometry::on_outer_line(&nx) {
                        out.add_vertical(nx, lo + &t.1, hi + &t.1);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(a: (i64, i64), b: (i64, i64)) -> Point {
        (ratio(a.0, a.1), ratio(b.0, b.1))
    }

    #[test]
    fn identity_fixes_points() {
        let id = RectangleExchange::identity();
        assert_eq!(id.apply(&p((1, 3), (2, 7))).unwrap(), p((1, 3), (2, 7)));
        assert!(id.discontinuity_length() == rational::zero());
    }

    #[test]
    fn swap_halves() {
        let s = RectangleExchange::vertical_swap();
        assert_eq!(s.apply(&p((1, 4), (1, 3))).unwrap(), p((3, 4), (1, 3)));
        assert_eq!(s.discontinuity_length(), ratio(1, 1));
    }

    #[test]
    fn product_rotation_origin() {
        let a = ratio(2, 5);
        let b = ratio(1, 3);
        let t = RectangleExchange::product_rotation(&a, &b).unwrap();
        assert_eq!(t.apply(&p((0, 1), (0, 1))).unwrap(), (a.clone(), b.clone()));
        assert_eq!(t.apply(&p((4, 5), (5, 6))).unwrap(), p((1, 5), (1, 6)));
        assert_eq!(t.discontinuity_length(), ratio(2, 1));
        assert_eq!(t.image_discontinuities().total_length(), ratio(2, 1));
    }

    #[test]
    fn inverse_recovers_point() {
        let t = RectangleExchange::product_rotation(&ratio(3, 7), &ratio(5, 11)).unwrap();
        let inv = t.inverse();
        for (a, b) in [((1, 9), (2, 3)), ((6, 7), (10, 11)), ((4, 7), (0, 1))] {
            let q = p(a, b);
            assert_eq!(inv.apply(&t.apply(&q).unwrap()).unwrap(), q);
        }
    }

    #[test]
    fn validation_reports() {
        let h = ratio(1, 2);
        let z = ratio(0, 1);
        let o = ratio(1, 1);
        let overlap = rect_validate(
            &[
                Rect::new(z.clone(), o.clone(), z.clone(), o.clone()),
                Rect::new(z.clone(), h.clone(), z.clone(), h.clone()),
            ],
            &[(z.clone(), z.clone()), (z.clone(), z.clone())],
        );
        assert_eq!(overlap, Err(TilingError::Overlap(0, 1)));

        let out = rect_validate(
            &[
                Rect::new(z.clone(), h.clone(), z.clone(), o.clone()),
                Rect::new(h.clone(), o.clone(), z.clone(), o.clone()),
            ],
            &[(h.clone(), z.clone()), (h.clone(), z.clone())],
        );
        assert_eq!(out, Err(TilingError::ImageOutOfBounds(1)));

        let gap = rect_validate(&[Rect::new(z.clone(), h.clone(), z.clone(), o.clone())], &[(z.clone(), z.clone())]);
        assert!(matches!(gap, Err(TilingError::Gap { .. })));

        assert!(RectangleExchange::new(
            vec![
                Rect::new(z.clone(), h.clone(), z.clone(), o.clone()),
                Rect::new(h.clone(), o.clone(), z.clone(), o.clone()),
            ],
            vec![(h.clone(), z.clone()), (-h.clone(), z.clone())],
        )
        .is_ok());
    }

    #[test]
    fn outside_point_is_domain_error() {
        let s = RectangleExchange::vertical_swap();
        assert!(matches!(s.apply(&p((1, 1), (0, 1))), Err(Error::Domain(_))));
    }
}
