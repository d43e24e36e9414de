use rand::Rng;

use crate::geometry::{polygon, PlanarSpace, Point};

/// A point of the space: a piece is chosen uniformly, then a point uniform
/// in its Lebesgue measure (area or length).
pub(crate) fn sample_point<R: Rng>(space: &PlanarSpace, rng: &mut R) -> Point {
    let n_regions = space.regions().len();
    let n = n_regions + space.segments().len();
    let k = rng.gen_range(0..n);
    if k < n_regions {
        let r = &space.regions()[k];
        let (x0, x1, y0, y1) = polygon::bounding_box(r.outline());
        loop {
            let p = Point::new(rng.gen_range(x0..=x1), rng.gen_range(y0..=y1));
            if r.contains(p, 0.0) {
                return p;
            }
        }
    }
    let s = &space.segments()[k - n_regions];
    Point::new(rng.gen_range(s.start().x..=s.end().x), s.y())
}
