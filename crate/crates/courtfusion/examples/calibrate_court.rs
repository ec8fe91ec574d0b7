//! Derives image-to-court homographies from four corner correspondences,
//! then round-trips sample pixels through the forward and inverse maps.
//!
//! Run with `cargo run --example calibrate_court`.

use courtfusion::geometry::{calibrate, Point2};

fn main() {
    // Pixel locations of the court corners as seen by an overhead camera,
    // paired with their metric positions on a standard doubles court.
    let image_corners = [
        Point2::new(70.0, 1230.0),
        Point2::new(650.0, 1230.0),
        Point2::new(640.0, 50.0),
        Point2::new(80.0, 50.0),
    ];
    let world_corners = [
        Point2::new(0.0, 0.0),
        Point2::new(6.1, 0.0),
        Point2::new(6.1, 13.4),
        Point2::new(0.0, 13.4),
    ];

    let cal = calibrate(&image_corners, &world_corners).expect("corners are in general position");
    println!(
        "max corner reprojection error: {:e} m",
        cal.max_reprojection_error()
    );

    for px in [
        Point2::new(360.0, 640.0),
        Point2::new(200.0, 900.0),
        Point2::new(600.0, 120.0),
    ] {
        let world = cal.to_world.project(px).expect("pixel maps to a finite point");
        let back = cal.from_world.project(world).expect("world maps back");
        println!(
            "pixel ({:6.1}, {:6.1}) -> court ({:5.2} m, {:5.2} m) -> pixel ({:6.1}, {:6.1})",
            px.x, px.y, world.x, world.y, back.x, back.y
        );
    }
}
