//! Sliding-window detection with a linear scorer over HOG descriptors.
//!
//! The "model" here is built on the spot: its weight vector is the HOG
//! descriptor of a template person window, so scoring reduces to template
//! correlation in descriptor space. A trained SVM drops into the same
//! [`LinearSvmModel`] slot.
//!
//! Run with `cargo run --example detect_players`.

use courtfusion::features::{
    detect, hog, GrayImage, HogParams, LinearSvmModel, Window,
};

fn draw_person(img: &mut Vec<f64>, width: usize, px: usize, py: usize) {
    for y in 0..96 {
        for x in 0..16 {
            img[(py + 16 + y) * width + px + 24 + x] = 0.85;
        }
    }
}

fn main() {
    let (width, height) = (320, 160);
    let mut data = vec![0.1; width * height];
    draw_person(&mut data, width, 40, 10);
    draw_person(&mut data, width, 200, 24);
    let scene = GrayImage::new(width, height, data).expect("dimensions match the buffer");

    let params = HogParams::default();
    let mut template = vec![0.12; 64 * 128];
    draw_person_into_window(&mut template);
    let template_img = GrayImage::new(64, 128, template).expect("dimensions match the buffer");
    let descriptor = hog(&template_img, Window::new(0, 0, 64, 128), &params)
        .expect("template window fits");

    let self_score: f64 = descriptor.values.iter().map(|v| v * v).sum();
    let model = LinearSvmModel {
        weights: descriptor.values,
        bias: 0.0,
        threshold: 0.5 * self_score,
    };

    let detections = detect(&scene, &model, &params, 8, 0.3).expect("parameters are valid");
    println!("found {} detections:", detections.len());
    for d in &detections {
        let foot = d.foot_point();
        println!(
            "  box at ({:5.1}, {:5.1}) {}x{}  score {:6.2}  foot ({:5.1}, {:5.1})",
            d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h, d.score, foot.x, foot.y
        );
    }
}

fn draw_person_into_window(img: &mut [f64]) {
    for y in 0..96 {
        for x in 0..16 {
            img[(16 + y) * 64 + 24 + x] = 0.85;
        }
    }
}
