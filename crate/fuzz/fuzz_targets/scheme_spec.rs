#![no_main]

use ebel::bel::BlockRule;
use ebel::blocking::BlockScheme;
use ebel::limit_law::Discretization;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rule) = text.parse::<BlockRule>() {
        assert_eq!(rule.to_string().parse::<BlockRule>().expect("reparse"), rule);
    }
    if let Ok(scheme) = text.parse::<BlockScheme>() {
        assert_eq!(scheme.name().parse::<BlockScheme>().expect("reparse"), scheme);
    }
    if let Ok(disc) = text.parse::<Discretization>() {
        assert_eq!(disc.name().parse::<Discretization>().expect("reparse"), disc);
    }
});
