//! The seed-in, buffer-out functions meant for foreign-language bindings.

use augforge::array_api;
use augforge::augment::FillPolicy;

fn main() -> augforge::Result<()> {
    let shape = (8, 3);
    let data: Vec<f32> = (0..24).map(|i| i as f32).collect();

    let (spliced, s_shape) = array_api::splice_out(&data, shape, 2, 3, 77)?;
    println!("splice_out -> {s_shape:?}");
    for row in spliced.chunks(s_shape.1) {
        println!("  {row:?}");
    }

    let (masked, _) = array_api::freq_mask(&data, shape, 1, 2, FillPolicy::Value(-1.0), 77)?;
    println!("freq_mask first row: {:?}", &masked[..3]);

    let ones = vec![1.0f32; 24];
    let ((mixed, _), label) = array_api::mixup(&data, &[1.0, 0.0], &ones, &[0.0, 1.0], shape, 0.75)?;
    println!("mixup(0.75) first row {:?}, label {label:?}", &mixed[..3]);

    // same seed, same bytes
    assert_eq!(array_api::splice_out(&data, shape, 2, 3, 77)?.0, spliced);
    Ok(())
}
