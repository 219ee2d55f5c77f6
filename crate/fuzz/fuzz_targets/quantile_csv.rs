#![no_main]

use ebel::io::{read_quantile_csv, write_quantile_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = read_quantile_csv(data) {
        let mut out = Vec::new();
        write_quantile_csv(&table, &[], &mut out).expect("writing a parsed table");
        assert_eq!(read_quantile_csv(out.as_slice()).expect("reparse"), table);
    }
});
