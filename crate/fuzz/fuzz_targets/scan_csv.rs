#![no_main]

use hotgate::cli::output::SCAN_COLUMNS;
use hotgate::cli::parse_scan_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_scan_csv(text) {
        for rec in &table.records {
            assert_eq!(rec.fields.len(), SCAN_COLUMNS.len());
            let _ = rec.key();
            let _ = rec.is_ok();
        }
    }
});
