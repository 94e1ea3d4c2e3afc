//! Spatial layer: Poisson point process sampling, the nearest-base-station
//! distance law, and construction of per-trial network snapshots.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::scalar::{real, Real};

/// How many times an empty base-station field is re-sampled before
/// snapshot construction gives up.
pub const EMPTY_FIELD_RETRY_CAP: usize = 8;

/// A point in the simulation plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D<R: Real> {
    pub x: R,
    pub y: R,
}

impl<R: Real> Point2D<R> {
    #[inline]
    pub fn new(x: R, y: R) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist2(&self, other: &Self) -> R {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> R {
        self.dist2(other).sqrt()
    }
}

/// Axis-aligned rectangle centered on the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<R: Real> {
    half_width: R,
    half_height: R,
}

impl<R: Real> Window<R> {
    pub fn new(width_m: R, height_m: R) -> Result<Self> {
        if !(width_m > R::zero()) || !(height_m > R::zero()) {
            return Err(Error::invalid("window", "width and height must be > 0"));
        }
        Ok(Self {
            half_width: width_m / real(2.0),
            half_height: height_m / real(2.0),
        })
    }

    pub fn from_km(width_km: R, height_km: R) -> Result<Self> {
        Self::new(width_km * real(1000.0), height_km * real(1000.0))
    }

    #[inline]
    pub fn area(&self) -> R {
        real::<R>(4.0) * self.half_width * self.half_height
    }

    #[inline]
    pub fn center(&self) -> Point2D<R> {
        Point2D::new(R::zero(), R::zero())
    }

    #[inline]
    pub fn contains(&self, p: &Point2D<R>) -> bool {
        p.x.abs() <= self.half_width && p.y.abs() <= self.half_height
    }

    fn sample_point<G: Rng + ?Sized>(&self, rng: &mut G) -> Point2D<R> {
        let two = real::<R>(2.0);
        let x = (R::sample_standard(rng) - real(0.5)) * two * self.half_width;
        let y = (R::sample_standard(rng) - real(0.5)) * two * self.half_height;
        Point2D::new(x, y)
    }
}

/// One realization of a homogeneous Poisson point process on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PppField<R: Real> {
    pub density: R,
    pub window: Window<R>,
    pub points: Vec<Point2D<R>>,
}

impl<R: Real> PppField<R> {
    /// Index of the point nearest to `p`, ties broken by lowest index.
    pub fn nearest_index(&self, p: &Point2D<R>) -> Option<usize> {
        let mut best: Option<(usize, R)> = None;
        for (i, q) in self.points.iter().enumerate() {
            let d2 = q.dist2(p);
            match best {
                Some((_, b)) if d2 >= b => {}
                _ => best = Some((i, d2)),
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Draw a homogeneous PPP: `Poisson(density * area)` points placed i.i.d.
/// uniformly on the window.
pub fn sample_ppp<R: Real, G: Rng + ?Sized>(
    density: R,
    window: Window<R>,
    rng: &mut G,
) -> Result<PppField<R>> {
    if !(density > R::zero()) || !density.is_finite() {
        return Err(Error::invalid("density", format!("{density} must be > 0")));
    }
    let mean = (density * window.area())
        .to_f64()
        .ok_or_else(|| Error::invalid("density", "mean count not representable"))?;
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid("density", format!("poisson mean {mean}: {e}")))?
        .sample(rng) as usize;
    let points = (0..count).map(|_| window.sample_point(rng)).collect();
    Ok(PppField {
        density,
        window,
        points,
    })
}

/// Nearest-neighbor distance density `2 pi lambda d exp(-lambda pi d^2)`.
pub fn nearest_distance_pdf<R: Real>(d: R, density: R) -> Result<R> {
    if !(density > R::zero()) {
        return Err(Error::invalid("density", format!("{density} must be > 0")));
    }
    if d < R::zero() {
        return Err(Error::invalid("d", format!("{d} must be >= 0")));
    }
    let pi = real::<R>(std::f64::consts::PI);
    Ok(real::<R>(2.0) * pi * density * d * (-density * pi * d * d).exp())
}

/// CDF of the nearest-neighbor distance: `1 - exp(-lambda pi d^2)`.
pub fn nearest_distance_cdf<R: Real>(d: R, density: R) -> Result<R> {
    if !(density > R::zero()) {
        return Err(Error::invalid("density", format!("{density} must be > 0")));
    }
    if d < R::zero() {
        return Err(Error::invalid("d", format!("{d} must be >= 0")));
    }
    let pi = real::<R>(std::f64::consts::PI);
    Ok(R::one() - (-density * pi * d * d).exp())
}

/// Inverse-CDF draw from the nearest-neighbor law:
/// `r = sqrt(-ln U / (pi lambda))` with `U` uniform on `(0, 1]`.
pub fn sample_nearest_distance<R: Real, G: Rng + ?Sized>(density: R, rng: &mut G) -> Result<R> {
    if !(density > R::zero()) {
        return Err(Error::invalid("density", format!("{density} must be > 0")));
    }
    let u = R::sample_open_closed(rng);
    let pi = real::<R>(std::f64::consts::PI);
    Ok((-u.ln() / (pi * density)).sqrt())
}

/// One sampled network realization.
///
/// The mobile cell sits at the window center; its serving macrocell is the
/// nearest point of the macro field. The selected cellular user is placed
/// `r_u` from the serving macrocell at an angle that realizes the configured
/// MC-to-user distance `r_mu` whenever the triangle is feasible. The
/// in-vehicle user sits at a uniform offset in `(0, r_av_max]` from the AL
/// antenna; the access link itself is budgeted at the worst-case service
/// distance `r_av_max` (see the link evaluators).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSnapshot<R: Real> {
    pub menbs: PppField<R>,
    pub senbs: PppField<R>,
    pub mc_position: Point2D<R>,
    /// Index of the serving (nearest) macrocell in `menbs`.
    pub amenb_index: usize,
    pub cues: Vec<Point2D<R>>,
    /// AL-antenna to in-vehicle user distance actually realized (<= r_av_max).
    pub mue_offset: R,
    /// In-vehicle user position.
    pub mue_position: Point2D<R>,
    /// BH antenna to AL antenna separation.
    pub r_am: R,
    /// MC-to-CUE distance actually realized (equals the configured r_mu when
    /// the placement triangle is feasible).
    pub realized_r_mu: R,
}

impl<R: Real> NetworkSnapshot<R> {
    /// Distance from the mobile cell to its serving macrocell.
    pub fn r_m(&self) -> R {
        self.menbs.points[self.amenb_index].dist(&self.mc_position)
    }

    pub fn amenb(&self) -> Point2D<R> {
        self.menbs.points[self.amenb_index]
    }
}

/// Sample a full snapshot. The fields are re-drawn up to
/// [`EMPTY_FIELD_RETRY_CAP`] times if the macro field comes up empty.
pub fn build_snapshot<R: Real, G: Rng + ?Sized>(
    params: &SystemParams<R>,
    window: Window<R>,
    rng: &mut G,
) -> Result<NetworkSnapshot<R>> {
    params.validate()?;
    let mut menbs = None;
    for _ in 0..EMPTY_FIELD_RETRY_CAP {
        let field = sample_ppp(params.lambda_m, window, rng)?;
        if !field.points.is_empty() {
            menbs = Some(field);
            break;
        }
    }
    let menbs = menbs.ok_or_else(|| {
        Error::Snapshot(format!(
            "no macrocell sampled in {EMPTY_FIELD_RETRY_CAP} attempts (lambda_m * area too small)"
        ))
    })?;
    let senbs = sample_ppp(params.lambda_s, window, rng)?;

    let mc = window.center();
    let amenb_index = menbs.nearest_index(&mc).expect("nonempty field");
    let amenb = menbs.points[amenb_index];

    // The fallback angle is always drawn so the draw sequence does not
    // depend on r_mu or the realized geometry.
    let tau = real::<R>(2.0 * std::f64::consts::PI);
    let fallback_angle = R::sample_standard(rng) * tau;
    let (cue, realized_r_mu) = place_cue(&mc, &amenb, params.r_u, params.r_mu, fallback_angle);

    // In-vehicle user offset uniform on (0, r_av_max].
    let mue_offset = params.r_av_max * R::sample_open_closed(rng);
    let mue_angle = R::sample_standard(rng) * tau;
    let mue_position = Point2D::new(
        mc.x + mue_offset * mue_angle.cos(),
        mc.y + mue_offset * mue_angle.sin(),
    );

    Ok(NetworkSnapshot {
        menbs,
        senbs,
        mc_position: mc,
        amenb_index,
        cues: vec![cue],
        mue_offset,
        mue_position,
        r_am: params.r_am,
        realized_r_mu,
    })
}

/// Place the selected CUE at distance `r_u` from the serving macrocell so
/// that its distance to the MC equals `r_mu` when `|r_m - r_u| <= r_mu <=
/// r_m + r_u`; otherwise fall back to the provided angle.
fn place_cue<R: Real>(
    mc: &Point2D<R>,
    amenb: &Point2D<R>,
    r_u: R,
    r_mu: R,
    fallback_angle: R,
) -> (Point2D<R>, R) {
    let r_m = amenb.dist(mc);
    let feasible = r_m > R::zero() && {
        let lo = (r_m - r_u).abs();
        let hi = r_m + r_u;
        r_mu >= lo && r_mu <= hi
    };
    // Unit vector from the serving macrocell toward the MC.
    let (ex, ey) = if r_m > R::zero() {
        ((mc.x - amenb.x) / r_m, (mc.y - amenb.y) / r_m)
    } else {
        (R::one(), R::zero())
    };
    let phi = if feasible {
        // Law of cosines at the serving macrocell vertex.
        let c = (r_m * r_m + r_u * r_u - r_mu * r_mu) / (real::<R>(2.0) * r_m * r_u);
        c.max(-R::one()).min(R::one()).acos()
    } else {
        fallback_angle
    };
    let (s, c) = (phi.sin(), phi.cos());
    let cue = Point2D::new(
        amenb.x + r_u * (c * ex - s * ey),
        amenb.y + r_u * (s * ex + c * ey),
    );
    (cue, cue.dist(mc))
}
