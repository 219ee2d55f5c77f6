#![no_main]

use ebel::io::MethodSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = text.parse::<MethodSpec>() {
        let again: MethodSpec = v.to_string().parse().expect("display output reparses");
        assert_eq!(again.to_string(), v.to_string());
    }
});
