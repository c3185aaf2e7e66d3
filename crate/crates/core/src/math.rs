//! Thin float helpers; `core` has no transcendental functions.

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

pub fn round(x: f64) -> f64 {
    libm::round(x)
}

pub fn roundf(x: f32) -> f32 {
    libm::roundf(x)
}


/// Round to the nearest intensity and saturate into `0..=255`.
pub fn to_u8(v: f32) -> u8 {
    let r = roundf(v);
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}
