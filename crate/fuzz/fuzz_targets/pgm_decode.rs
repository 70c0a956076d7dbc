#![no_main]

use l1pc::cli::io::{decode_pgm, encode_pgm};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(image) = decode_pgm(data) else { return };
    assert_eq!(image.pixels.len(), image.width * image.height);
    // a decoded image survives both encodings unchanged
    for binary in [true, false] {
        let bytes = encode_pgm(&image, binary).expect("decoded image encodes");
        let back = decode_pgm(&bytes).expect("encoded image decodes");
        assert_eq!(back, image);
    }
});
