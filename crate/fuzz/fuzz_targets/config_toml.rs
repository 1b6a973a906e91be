#![no_main]

use hotgate::cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml_str(text) {
        // Anything that loads must also produce settings and a hash.
        let _ = cfg.gate_settings();
        let _ = cfg.trap_spec();
        let _ = cfg.grid();
        assert_eq!(cfg.hash().len(), 16);
    }
});
