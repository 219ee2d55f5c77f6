#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = ebel::io::read_series_csv(data) {
        assert_eq!(x.len() * x.dim(), x.as_slice().len());
        assert!(x.as_slice().iter().all(|v| v.is_finite()));
    }
});
