use crate::geometry::{intersection_area, OrientedBox};

/// Bird's-eye-view IoU of two rotated rectangles by convex clipping.
pub fn bev_iou(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let inter = intersection_area(a, b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use std::f64::consts::FRAC_PI_4;

    fn unit(x: f64, yaw: f64) -> OrientedBox {
        OrientedBox::new(Vec2::new(x, 0.0), 1.0, 1.0, yaw)
    }

    #[test]
    fn identical() {
        assert!((bev_iou(&unit(0.0, 0.3), &unit(0.0, 0.3)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_offset() {
        assert!((bev_iou(&unit(0.0, 0.0), &unit(0.5, 0.0)) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_square_octagon() {
        // Intersection is a regular octagon of area 2(sqrt2 - 1).
        let inter = 2.0 * (2f64.sqrt() - 1.0);
        let expected = inter / (2.0 - inter);
        let got = bev_iou(&unit(0.0, 0.0), &unit(0.0, FRAC_PI_4));
        assert!((got - expected).abs() < 1e-12);
        assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn disjoint() {
        assert_eq!(bev_iou(&unit(0.0, 0.0), &unit(3.0, 0.0)), 0.0);
    }
}
