//! Curve data for the six published density plots.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::density::{DensityFlag, DensitySpec, Family};
use crate::error::{Error, Result};
use crate::fc::build_fc_spec;
use crate::raney::build_raney_spec;

pub const MIN_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub const ALL: [FigureId; 6] =
        [FigureId::Fig1, FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6];

    /// The densities drawn in the figure, in legend order.
    pub fn families(self) -> Vec<Family> {
        let raney_row = |p: u32| (1..=p + 1).map(|r| Family::Raney { p, r }).collect();
        match self {
            FigureId::Fig1 => vec![Family::FussCatalan { s: 1 }, Family::FussCatalan { s: 2 }],
            FigureId::Fig2 => (3..=6).map(|s| Family::FussCatalan { s }).collect(),
            FigureId::Fig3 => raney_row(2),
            FigureId::Fig4 => raney_row(3),
            FigureId::Fig5 => raney_row(4),
            FigureId::Fig6 => (2..=5).map(|r| Family::Raney { p: r, r }).collect(),
        }
    }

    /// Left end of the plotted range; fig2 only shows the tails `x ≥ 5`.
    fn x_min(self) -> f64 {
        match self {
            FigureId::Fig2 => 5.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = FigureId::ALL.iter().position(|id| id == self).unwrap_or(0) + 1;
        write!(f, "fig{i}")
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown figure '{s}' (fig1..fig6)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub density: f64,
    pub flag: DensityFlag,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub label: String,
    pub family: Family,
    /// False for the dashed quasi-measure curves.
    pub is_probability: bool,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure {
    pub id: FigureId,
    pub curves: Vec<Curve>,
}

pub fn spec_for(family: Family) -> Result<DensitySpec> {
    match family {
        Family::FussCatalan { s } => build_fc_spec(s),
        Family::Raney { p, r } => build_raney_spec(p, r),
    }
}

/// `points` samples of one density on `(x_min, K]`, right end included.
pub fn sample_curve(spec: &DensitySpec, x_min: f64, points: usize) -> Result<Curve> {
    let k = spec.support_upper;
    let points = (1..=points)
        .map(|i| {
            let x = x_min + (k - x_min) * i as f64 / points as f64;
            let (density, flag) = spec.density_for_plot(x)?;
            Ok(CurvePoint { x, density, flag })
        })
        .collect::<Result<_>>()?;
    Ok(Curve { label: spec.family.to_string(), family: spec.family, is_probability: spec.is_probability(), points })
}

pub fn figure_reproduce(id: FigureId, points: usize) -> Result<Figure> {
    if points < MIN_POINTS {
        return Err(Error::InvalidParameter(format!("points = {points} must be >= {MIN_POINTS}")));
    }
    let curves = id
        .families()
        .into_iter()
        .map(|f| sample_curve(&spec_for(f)?, id.x_min(), points))
        .collect::<Result<_>>()?;
    Ok(Figure { id, curves })
}
