use std::cmp::Ordering;
use std::fmt;

use crate::scalar::{cmp_scalar, Scalar};

/// Death time of a component: a filtration value, or never.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Death<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> Death<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Death::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Death::Finite(d) => Some(d),
            Death::Infinite => None,
        }
    }

    /// Value with `∞` mapped to `T::infinity()`, for comparisons only.
    pub fn value(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    /// Value with `∞` drawn at `placeholder` (plots use 1.1).
    pub fn plotted(&self, placeholder: T) -> T {
        self.finite().unwrap_or(placeholder)
    }

    pub fn greater_than(&self, threshold: T) -> bool {
        match *self {
            Death::Finite(d) => d > threshold,
            Death::Infinite => true,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Death<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(d) => write!(f, "{d}"),
            Death::Infinite => f.write_str("inf"),
        }
    }
}

/// One `(birth, death)` pair; `anchor` is the vertex whose appearance started the component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePoint<T> {
    pub birth: T,
    pub death: Death<T>,
    pub anchor: Option<usize>,
}

impl<T: Scalar> PersistencePoint<T> {
    pub fn finite(birth: T, death: T) -> Self {
        Self {
            birth,
            death: Death::Finite(death),
            anchor: None,
        }
    }

    pub fn essential(birth: T) -> Self {
        Self {
            birth,
            death: Death::Infinite,
            anchor: None,
        }
    }

    pub fn anchored(mut self, anchor: usize) -> Self {
        self.anchor = Some(anchor);
        self
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// `death - birth`, infinite for essential points.
    pub fn persistence(&self) -> T {
        match self.death {
            Death::Finite(d) => d - self.birth,
            Death::Infinite => T::infinity(),
        }
    }

    /// Northwest quadrant: `b < .5` and `d > .5`.
    pub fn in_nw_quadrant(&self) -> bool {
        let half = T::lit(0.5);
        self.birth < half && self.death.greater_than(half)
    }

    /// Same point with anchor dropped.
    pub fn geometric(&self) -> Self {
        Self { anchor: None, ..*self }
    }
}

/// Multiset of persistence points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram<T> {
    pub points: Vec<PersistencePoint<T>>,
    /// Vertex count of the filtered graph this came from; 0 for synthetic diagrams.
    pub k: usize,
}

impl<T: Scalar> Diagram<T> {
    pub fn new(points: Vec<PersistencePoint<T>>) -> Self {
        Self { points, k: 0 }
    }

    /// Diagram from `(birth, death)` pairs; `None` death is infinite.
    pub fn from_pairs(pairs: &[(T, Option<T>)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|&(b, d)| match d {
                    Some(d) => PersistencePoint::finite(b, d),
                    None => PersistencePoint::essential(b),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn essential_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_essential()).count()
    }

    /// Indices of finite and essential points, in storage order.
    pub fn split_indices(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.points.len()).partition(|&i| !self.points[i].is_essential())
    }

    pub fn nw_quadrant(&self) -> Diagram<T> {
        nw_quadrant(self)
    }

    /// Points sorted by `(birth, death)`, anchors dropped: the multiset view for equality checks.
    pub fn canonical_points(&self) -> Vec<PersistencePoint<T>> {
        let mut pts: Vec<_> = self.points.iter().map(|p| p.geometric()).collect();
        pts.sort_by(point_order);
        pts
    }

    pub fn same_multiset(&self, other: &Diagram<T>) -> bool {
        self.canonical_points() == other.canonical_points()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Diagram<U> {
        Diagram {
            points: self
                .points
                .iter()
                .map(|p| PersistencePoint {
                    birth: f(p.birth),
                    death: match p.death {
                        Death::Finite(d) => Death::Finite(f(d)),
                        Death::Infinite => Death::Infinite,
                    },
                    anchor: p.anchor,
                })
                .collect(),
            k: self.k,
        }
    }
}

pub(crate) fn point_order<T: Scalar>(a: &PersistencePoint<T>, b: &PersistencePoint<T>) -> Ordering {
    cmp_scalar(&a.birth, &b.birth)
        .then_with(|| cmp_scalar(&a.death.value(), &b.death.value()))
        .then_with(|| a.anchor.cmp(&b.anchor))
}

/// Points with `b < .5` and `d > .5`, anchors preserved.
pub fn nw_quadrant<T: Scalar>(diagram: &Diagram<T>) -> Diagram<T> {
    Diagram {
        points: diagram.points.iter().filter(|p| p.in_nw_quadrant()).copied().collect(),
        k: diagram.k,
    }
}
