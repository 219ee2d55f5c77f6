#![no_main]

use ebel_cli::Params;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = Params::from_toml(text) {
        let echoed = p.echo().join("\n");
        let again = Params::from_toml(&echoed).expect("echoed configuration reparses");
        assert_eq!(again.echo(), p.echo());
    }
});
